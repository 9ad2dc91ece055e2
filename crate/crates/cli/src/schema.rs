//! JSON problem files.
//!
//! Complex numbers are `[re, im]`, matrices row-major nested arrays. Floats
//! are written in shortest round-trip form, so re-reading an emitted file
//! reproduces every value bit for bit.

use std::fs;
use std::path::Path;

use povm_forge::hermitian::HERM_TOL;
use povm_forge::symmetry::{generate_group, MAX_ORDER};
use povm_forge::{c64, ComplexMatrix, Ensemble, FiniteRep, HermitianMatrix, Povm};
use serde::{Deserialize, Serialize};

use crate::error::{domain, usage, CliResult};

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<JsonMatrix>>,
    #[serde(default)]
    pub metadata: Metadata,
    /// Free-form results attached by commands that emit problem files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<serde_json::Value>,
}

pub fn to_json_matrix(m: &ComplexMatrix) -> JsonMatrix {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn hermitian_list(ops: &[HermitianMatrix]) -> Vec<JsonMatrix> {
    ops.iter().map(|o| to_json_matrix(o.as_matrix())).collect()
}

fn from_json_matrix(m: &JsonMatrix, d: usize, what: &str) -> CliResult<ComplexMatrix> {
    if m.len() != d || m.iter().any(|row| row.len() != d) {
        return Err(usage(format!("{what}: expected a {d}×{d} matrix")));
    }
    let rows: Vec<Vec<c64>> = m
        .iter()
        .map(|row| row.iter().map(|&[re, im]| c64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| usage(format!("{what}: {e}")))
}

/// Hermitian operator from a file; a non-Hermitian matrix is a domain
/// failure, a malformed one a parse failure.
fn hermitian(m: &JsonMatrix, d: usize, what: &str) -> CliResult<HermitianMatrix> {
    let cm = from_json_matrix(m, d, what)?;
    HermitianMatrix::with_tol(cm, HERM_TOL).map_err(|e| domain(format!("{what}: {e}")))
}

impl ProblemFile {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let file: ProblemFile =
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: invalid problem file: {e}", path.display())))?;
        if file.dimension == 0 {
            return Err(usage(format!("{}: dimension must be positive", path.display())));
        }
        if file.states.is_some() != file.priors.is_some() {
            return Err(usage(format!("{}: states and priors must be given together", path.display())));
        }
        Ok(file)
    }

    pub fn to_pretty_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn has_ensemble(&self) -> bool {
        self.states.is_some()
    }

    pub fn state_operators(&self) -> CliResult<Option<Vec<HermitianMatrix>>> {
        let Some(states) = &self.states else { return Ok(None) };
        states
            .iter()
            .enumerate()
            .map(|(i, m)| hermitian(m, self.dimension, &format!("state {i}")))
            .collect::<CliResult<Vec<_>>>()
            .map(Some)
    }

    /// The ensemble, structurally checked only.
    pub fn ensemble(&self) -> CliResult<Option<Ensemble>> {
        let Some(states) = self.state_operators()? else { return Ok(None) };
        let priors = self.priors.clone().unwrap_or_default();
        Ensemble::new(states, priors).map(Some).map_err(|e| usage(format!("ensemble: {e}")))
    }

    pub fn require_ensemble(&self) -> CliResult<Ensemble> {
        self.ensemble()?.ok_or_else(|| usage("problem file has no ensemble (states, priors)"))
    }

    pub fn povm_operators(&self) -> CliResult<Option<Vec<HermitianMatrix>>> {
        let Some(ops) = &self.povm else { return Ok(None) };
        if ops.is_empty() {
            return Err(usage("povm: operator list is empty"));
        }
        ops.iter()
            .enumerate()
            .map(|(i, m)| hermitian(m, self.dimension, &format!("povm operator {i}")))
            .collect::<CliResult<Vec<_>>>()
            .map(Some)
    }

    pub fn require_povm(&self) -> CliResult<Povm> {
        let ops = self.povm_operators()?.ok_or_else(|| usage("problem file has no povm"))?;
        Povm::new(ops).map_err(|e| usage(format!("povm: {e}")))
    }

    pub fn generator_matrices(&self) -> CliResult<Option<Vec<ComplexMatrix>>> {
        let Some(gens) = &self.generators else { return Ok(None) };
        gens.iter()
            .enumerate()
            .map(|(i, m)| from_json_matrix(m, self.dimension, &format!("generator {i}")))
            .collect::<CliResult<Vec<_>>>()
            .map(Some)
    }

    /// Group generated by the listed generators (trivial for an empty list).
    pub fn group(&self) -> CliResult<Option<FiniteRep>> {
        let Some(gens) = self.generator_matrices()? else { return Ok(None) };
        generate_group(self.dimension, &gens, MAX_ORDER)
            .map(Some)
            .map_err(|e| domain(format!("group: {e}")))
    }

    pub fn with_ensemble(mut self, s: &Ensemble) -> Self {
        self.states = Some(hermitian_list(s.states()));
        self.priors = Some(s.priors().to_vec());
        self
    }

    pub fn with_povm(mut self, p: &Povm) -> Self {
        self.povm = Some(hermitian_list(p.ops()));
        self
    }

    pub fn with_generators(mut self, gens: &[ComplexMatrix]) -> Self {
        self.generators = Some(gens.iter().map(to_json_matrix).collect());
        self
    }

    pub fn named(dimension: usize, name: &str, description: &str) -> Self {
        Self {
            dimension,
            metadata: Metadata {
                name: name.into(),
                description: description.into(),
            },
            ..Self::default()
        }
    }
}
