use std::fs;
use std::path::{Path, PathBuf};

use povm_forge::caratheodory::{decompose_identity, prune_povm, prune_symmetric_povm, PruneOutcome};
use povm_forge::infotheory::mutual_information;
use povm_forge::quantum::{normalize_povm, validate_ensemble, validate_povm, Violation, VALIDATION_TOL};
use povm_forge::symmetry::{complex_orbit_bound, real_orbit_bound};
use povm_forge::{Ensemble, FiniteRep, Povm};
use serde_json::{json, Value};

use crate::error::{domain, usage, CliError, CliResult};
use crate::schema::{hermitian_list, ProblemFile};

fn violation_json(invariant: &str, message: String) -> Value {
    json!({ "invariant": invariant, "message": message })
}

fn violations_json(vs: &[Violation]) -> Vec<Value> {
    vs.iter().map(|v| violation_json(v.invariant(), v.to_string())).collect()
}

/// Runs a loader; a domain failure (e.g. a non-Hermitian matrix) becomes a
/// violation, a parse failure propagates.
fn load_or_violation<T>(f: impl FnOnce() -> CliResult<T>, invariant: &str) -> CliResult<Result<T, Value>> {
    match f() {
        Ok(v) => Ok(Ok(v)),
        Err(CliError::Domain(m)) => Ok(Err(violation_json(invariant, m))),
        Err(e) => Err(e),
    }
}

pub struct Report {
    pub json: Value,
    pub valid: bool,
}

pub fn validate(path: &Path, tol: f64) -> CliResult<Report> {
    if !(tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let file = ProblemFile::read(path)?;
    let mut checks = Vec::new();

    if file.has_ensemble() {
        let violations = match load_or_violation(|| file.ensemble(), "hermitian")? {
            Ok(Some(s)) => violations_json(&validate_ensemble(&s, tol).violations),
            Ok(None) => Vec::new(),
            Err(v) => vec![v],
        };
        checks.push(json!({ "object": "ensemble", "valid": violations.is_empty(), "violations": violations }));
    }
    if file.povm.is_some() {
        let violations = match load_or_violation(|| file.require_povm(), "hermitian")? {
            Ok(p) => violations_json(&validate_povm(&p, tol).violations),
            Err(v) => vec![v],
        };
        checks.push(json!({ "object": "povm", "valid": violations.is_empty(), "violations": violations }));
    }
    if file.generators.is_some() {
        let check = match load_or_violation(|| file.group(), "finite_group")? {
            Ok(Some(g)) => json!({ "object": "group", "valid": true, "order": g.order(), "violations": [] }),
            Ok(None) => unreachable!("generators present"),
            Err(v) => json!({ "object": "group", "valid": false, "violations": [v] }),
        };
        checks.push(check);
    }
    let valid = checks.iter().all(|c| c["valid"] == json!(true));
    Ok(Report {
        json: json!({ "file": path.display().to_string(), "valid": valid, "tolerance": tol, "checks": checks }),
        valid,
    })
}

/// Human-readable lines for every violation in a validation report.
pub fn violation_lines(report: &Value) -> Vec<String> {
    let mut out = Vec::new();
    for check in report["checks"].as_array().into_iter().flatten() {
        for v in check["violations"].as_array().into_iter().flatten() {
            out.push(format!(
                "{}: [{}] {}",
                check["object"].as_str().unwrap_or("?"),
                v["invariant"].as_str().unwrap_or("?"),
                v["message"].as_str().unwrap_or("")
            ));
        }
    }
    out
}

pub struct Bounds {
    pub order: usize,
    pub complex: usize,
    pub real: Option<usize>,
}

pub fn bound(path: &Path, real: bool) -> CliResult<Bounds> {
    let file = ProblemFile::read(path)?;
    let group = file.group()?.ok_or_else(|| usage("problem file has no generators"))?;
    Ok(Bounds {
        order: group.order(),
        complex: complex_orbit_bound(&group)?,
        real: if real { Some(real_orbit_bound(&group)?) } else { None },
    })
}

fn require_valid_povm(p: &Povm) -> CliResult<()> {
    match validate_povm(p, VALIDATION_TOL).violations.first() {
        Some(v) => Err(domain(format!("invalid povm: [{}] {v}", v.invariant()))),
        None => Ok(()),
    }
}

fn require_valid_ensemble(s: &Ensemble) -> CliResult<()> {
    match validate_ensemble(s, VALIDATION_TOL).violations.first() {
        Some(v) => Err(domain(format!("invalid ensemble: [{}] {v}", v.invariant()))),
        None => Ok(()),
    }
}

pub fn decompose(path: &Path) -> CliResult<Value> {
    let file = ProblemFile::read(path)?;
    let p = file.require_povm()?;
    require_valid_povm(&p)?;
    let ensemble = file.ensemble()?;
    if let Some(s) = &ensemble {
        require_valid_ensemble(s)?;
    }
    let norm = normalize_povm(&p)?;
    let dec = decompose_identity(&norm)?;

    let mut leaves = Vec::with_capacity(dec.len());
    let mut best: Option<(usize, f64)> = None;
    for (k, (mu, nu)) in dec.weights.iter().zip(&dec.solutions).enumerate() {
        let support = dec.support(k);
        let mut leaf = json!({ "mu": mu, "nu": nu, "support": support });
        if let Some(s) = &ensemble {
            let ops = support.iter().map(|&j| norm.normalized_ops[j].scale(nu[j])).collect();
            let info = mutual_information(s, &Povm::new(ops)?)?;
            leaf["information_bits"] = json!(info);
            if best.map_or(true, |(_, b)| info > b) {
                best = Some((k, info));
            }
        }
        leaves.push(leaf);
    }
    let mut out = json!({
        "dimension": norm.dim,
        "operators": p.len(),
        "rank": dec.rank,
        "lambda": norm.weights,
        "leaves": leaves,
    });
    if let Some(s) = &ensemble {
        out["input_information_bits"] = json!(mutual_information(s, &p)?);
    }
    if let Some((k, info)) = best {
        out["best_leaf"] = json!({ "index": k, "information_bits": info });
    }
    Ok(out)
}

/// `None`: no group; `Some(None)`: generators from the problem file;
/// `Some(Some(path))`: generators from another file.
pub type GroupSource = Option<Option<PathBuf>>;

fn load_group(file: &ProblemFile, source: &GroupSource) -> CliResult<Option<(FiniteRep, ProblemFile)>> {
    let group_file = match source {
        None => return Ok(None),
        Some(None) => file.clone(),
        Some(Some(path)) => ProblemFile::read(path)?,
    };
    if group_file.dimension != file.dimension {
        return Err(usage(format!(
            "group dimension {} does not match problem dimension {}",
            group_file.dimension, file.dimension
        )));
    }
    let rep = group_file.group()?.ok_or_else(|| usage("no generators available for --group"))?;
    Ok(Some((rep, group_file)))
}

pub struct Pruned {
    pub file: ProblemFile,
    pub outcome: PruneOutcome,
}

pub fn prune(path: &Path, group: &GroupSource, real: bool) -> CliResult<Pruned> {
    let file = ProblemFile::read(path)?;
    let s = file.require_ensemble()?;
    require_valid_ensemble(&s)?;
    let p = file.require_povm()?;
    require_valid_povm(&p)?;
    if real && s.max_imag() > 1e-12 {
        return Err(domain("--real requires a real ensemble"));
    }
    let group = load_group(&file, group)?;
    let outcome = match &group {
        Some((rep, _)) => prune_symmetric_povm(&s, &p, rep, real)?,
        None if real => prune_povm(&s, &p.real_part())?,
        None => prune_povm(&s, &p)?,
    };
    let mut out = ProblemFile::named(
        file.dimension,
        &format!("{}_pruned", if file.metadata.name.is_empty() { "problem" } else { &file.metadata.name }),
        &format!("pruned from {}", path.display()),
    )
    .with_ensemble(&s);
    out.povm = Some(hermitian_list(outcome.povm.ops()));
    if let Some((_, gf)) = &group {
        out.generators = gf.generators.clone();
    }
    out.report = Some(json!({
        "operators": outcome.povm.len(),
        "orbits": if group.is_some() { json!(outcome.orbits.len()) } else { Value::Null },
        "bound": outcome.bound,
        "information_before_bits": outcome.info_before,
        "information_after_bits": outcome.info_after,
        "leaves": outcome.leaf_count,
    }));
    Ok(Pruned { file: out, outcome })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| domain(format!("cannot write {}: {e}", path.display())))
}
