//! Mutual information between an ensemble and a measurement.

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::quantum::{validate_povm, Ensemble, Povm, VALIDATION_TOL};

/// Negative probabilities down to this are rounding noise and clamp to 0.
pub const NEGATIVE_PROB_TOL: f64 = 1e-12;
pub const PROPORTIONALITY_TOL: f64 = 1e-9;

/// `H(u) = u log2 u` with `H(0) = 0`.
#[inline]
pub fn h(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        u * u.log2()
    }
}

/// `p_ij = p(i) tr(Π_j ρ_i)` as an m×n row-major table.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    p: Vec<f64>,
}

impl JointDistribution {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.p[i * self.cols..(i + 1) * self.cols]
    }

    /// `(p_1j, …, p_mj)`, the probability vector induced by operator j.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// `Σ_ij H(p_ij) − Σ_i H(r_i) − Σ_j H(Σ_i p_ij)` for the given row marginals.
    fn information_with_rows(&self, row_marginals: &[f64]) -> f64 {
        let joint: f64 = self.p.iter().map(|&x| h(x)).sum();
        let rows: f64 = row_marginals.iter().map(|&x| h(x)).sum();
        let cols: f64 = self.col_sums().iter().map(|&x| h(x)).sum();
        joint - rows - cols
    }
}

/// Joint distribution of ensemble index and outcome for any operator list.
pub fn joint_from_operators(s: &Ensemble, ops: &[HermitianMatrix]) -> Result<JointDistribution> {
    let (rows, cols) = (s.len(), ops.len());
    let mut p = Vec::with_capacity(rows * cols);
    for (rho, &prior) in s.states().iter().zip(s.priors()) {
        for op in ops {
            if op.dim() != rho.dim() {
                return Err(Error::DimensionMismatch {
                    expected: rho.dim(),
                    got: op.dim(),
                });
            }
            let v = prior * op.expectation(rho);
            if v < -NEGATIVE_PROB_TOL {
                return Err(Error::NegativeProbability(v));
            }
            p.push(v.max(0.0));
        }
    }
    Ok(JointDistribution { rows, cols, p })
}

pub fn joint_distribution(s: &Ensemble, p: &Povm) -> Result<JointDistribution> {
    joint_from_operators(s, p.ops())
}

/// Mutual information `I(S, P)` in bits. The POVM is validated first.
pub fn mutual_information(s: &Ensemble, p: &Povm) -> Result<f64> {
    let report = validate_povm(p, VALIDATION_TOL);
    if let Some(v) = report.violations.first() {
        return Err(Error::InvalidPovm(v.to_string()));
    }
    let joint = joint_distribution(s, p)?;
    Ok(joint.information_with_rows(&joint.row_sums()))
}

/// Information of an already computed joint distribution.
pub fn information_of(joint: &JointDistribution) -> f64 {
    joint.information_with_rows(&joint.row_sums())
}

/// "Formal" information of an incomplete operator set, e.g. one orbit:
/// the row-marginal term uses the priors `p(i)` instead of `Σ_j p_ij`.
/// Coincides with [`mutual_information`] for a complete POVM and may be
/// negative otherwise.
pub fn orbit_information(s: &Ensemble, ops: &[HermitianMatrix]) -> Result<f64> {
    let joint = joint_from_operators(s, ops)?;
    Ok(joint.information_with_rows(s.priors()))
}

/// Equality condition of the convexity inequality at column j: the vectors
/// induced by `P_j` and `Q_j` are proportional,
/// `p_ij Σ_k q_kj = q_ij Σ_k p_kj` for all i.
pub fn equality_condition(s: &Ensemble, p: &Povm, q: &Povm, j: usize) -> Result<bool> {
    if p.len() != q.len() {
        return Err(Error::CountMismatch(p.len(), q.len()));
    }
    if j >= p.len() {
        return Err(Error::BadIndex { index: j, len: p.len() });
    }
    let pv = joint_from_operators(s, &p.ops()[j..=j])?.column(0);
    let qv = joint_from_operators(s, &q.ops()[j..=j])?.column(0);
    Ok(vectors_proportional(&pv, &qv, PROPORTIONALITY_TOL))
}

/// `a_i Σ b = b_i Σ a` for all i, within `tol`.
pub fn vectors_proportional(a: &[f64], b: &[f64], tol: f64) -> bool {
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    a.iter().zip(b).all(|(&x, &y)| (x * sb - y * sa).abs() <= tol)
}
