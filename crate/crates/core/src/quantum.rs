//! Ensembles, POVMs and the operations that build new POVMs from old ones.

use std::fmt;

use crate::error::{Error, Result};
use crate::hermitian::{c64, inv_sqrt_psd, sum_hermitian, HermitianMatrix, NULL_TOL};

/// Operators with max-norm at or below this are treated as zero.
pub const ZERO_OP_TOL: f64 = 1e-12;
/// Default tolerance for POVM and ensemble validation.
pub const VALIDATION_TOL: f64 = 1e-9;

/// Finite ensemble of density matrices `ρ_i` with priors `p(i)`.
///
/// Duplicate states are allowed (multiset semantics).
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    states: Vec<HermitianMatrix>,
    priors: Vec<f64>,
}

impl Ensemble {
    /// Structural checks only (non-empty, equal lengths, equal dimensions).
    /// Use [`validate_ensemble`] for the physical invariants.
    pub fn new(states: Vec<HermitianMatrix>, priors: Vec<f64>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if states.len() != priors.len() {
            return Err(Error::CountMismatch(states.len(), priors.len()));
        }
        let d = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.dim(),
            });
        }
        Ok(Self { states, priors })
    }

    pub fn uniform(states: Vec<HermitianMatrix>) -> Result<Self> {
        let n = states.len();
        Self::new(states, vec![1.0 / n as f64; n])
    }

    /// Pure states `|ψ_i⟩⟨ψ_i|` from state vectors.
    pub fn from_pure_states(vectors: &[Vec<c64>], priors: Vec<f64>) -> Result<Self> {
        Self::new(vectors.iter().map(|v| HermitianMatrix::projector(v)).collect(), priors)
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[HermitianMatrix] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// `ρ = Σ p(i) ρ_i`.
    pub fn average_state(&self) -> HermitianMatrix {
        let weighted: Vec<HermitianMatrix> = self
            .states
            .iter()
            .zip(&self.priors)
            .map(|(s, &p)| s.scale(p))
            .collect();
        sum_hermitian(weighted.iter(), self.dim())
    }

    /// Largest |Im| over all states.
    pub fn max_imag(&self) -> f64 {
        self.states.iter().map(HermitianMatrix::max_imag).fold(0.0, f64::max)
    }
}

/// A POVM: PSD operators summing to the identity.
///
/// Zero operators are rejected by validation unless the POVM was built with
/// [`Povm::padded`].
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    ops: Vec<HermitianMatrix>,
    allow_zero: bool,
}

impl Povm {
    pub fn new(ops: Vec<HermitianMatrix>) -> Result<Self> {
        Self::build(ops, false)
    }

    /// A POVM that may contain zero operators (padding).
    pub fn padded(ops: Vec<HermitianMatrix>) -> Result<Self> {
        Self::build(ops, true)
    }

    fn build(ops: Vec<HermitianMatrix>, allow_zero: bool) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let d = ops[0].dim();
        if let Some(op) = ops.iter().find(|op| op.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: op.dim(),
            });
        }
        Ok(Self { ops, allow_zero })
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[HermitianMatrix] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<HermitianMatrix> {
        self.ops
    }

    pub fn allows_zero(&self) -> bool {
        self.allow_zero
    }

    pub fn sum(&self) -> HermitianMatrix {
        sum_hermitian(self.ops.iter(), self.dim())
    }

    pub fn max_imag(&self) -> f64 {
        self.ops.iter().map(HermitianMatrix::max_imag).fold(0.0, f64::max)
    }

    /// Entrywise real parts. For a real ensemble this gives the same
    /// statistics as the original POVM.
    pub fn real_part(&self) -> Self {
        Self {
            ops: self.ops.iter().map(HermitianMatrix::real_part).collect(),
            allow_zero: self.allow_zero,
        }
    }
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotPsd { index: usize, min_eigenvalue: f64 },
    ZeroOperator { index: usize },
    IdentityDefect { max_abs: f64 },
    BadTrace { index: usize, trace: f64 },
    NegativePrior { index: usize, value: f64 },
    PriorSum { sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotPsd { index, min_eigenvalue } => {
                write!(f, "positivity: operator {index} has min eigenvalue {min_eigenvalue:e}")
            }
            Violation::ZeroOperator { index } => write!(f, "non-zero: operator {index} is zero"),
            Violation::IdentityDefect { max_abs } => {
                write!(f, "completeness: sum of operators differs from identity by {max_abs:e}")
            }
            Violation::BadTrace { index, trace } => write!(f, "unit trace: state {index} has trace {trace}"),
            Violation::NegativePrior { index, value } => write!(f, "priors: p({index}) = {value} is negative"),
            Violation::PriorSum { sum } => write!(f, "priors: sum is {sum}, expected 1"),
        }
    }
}

impl Violation {
    /// Short machine-readable invariant name.
    pub fn invariant(&self) -> &'static str {
        match self {
            Violation::NotPsd { .. } => "psd",
            Violation::ZeroOperator { .. } => "nonzero",
            Violation::IdentityDefect { .. } => "sums_to_identity",
            Violation::BadTrace { .. } => "unit_trace",
            Violation::NegativePrior { .. } => "nonnegative_priors",
            Violation::PriorSum { .. } => "priors_sum_to_one",
        }
    }
}

/// Outcome of a validation: `valid` iff `violations` is empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks positivity, non-zero operators (unless padded) and completeness.
pub fn validate_povm(p: &Povm, tol: f64) -> ValidationReport {
    let mut violations = Vec::new();
    for (index, op) in p.ops.iter().enumerate() {
        if !p.allow_zero && op.max_abs() <= ZERO_OP_TOL {
            violations.push(Violation::ZeroOperator { index });
        }
        let min_eigenvalue = op.min_eigenvalue();
        if min_eigenvalue < -tol {
            violations.push(Violation::NotPsd { index, min_eigenvalue });
        }
    }
    let defect = p.sum().max_abs_diff(&HermitianMatrix::identity(p.dim()));
    if defect > tol {
        violations.push(Violation::IdentityDefect { max_abs: defect });
    }
    ValidationReport { violations }
}

/// [`validate_povm`] on a raw operator list; mismatched dimensions are a
/// structural error.
pub fn validate_operators(ops: &[HermitianMatrix], tol: f64) -> Result<ValidationReport> {
    Ok(validate_povm(&Povm::new(ops.to_vec())?, tol))
}

pub fn validate_ensemble(s: &Ensemble, tol: f64) -> ValidationReport {
    let mut violations = Vec::new();
    for (index, rho) in s.states.iter().enumerate() {
        let min_eigenvalue = rho.min_eigenvalue();
        if min_eigenvalue < -tol {
            violations.push(Violation::NotPsd { index, min_eigenvalue });
        }
        let trace = rho.trace();
        if (trace - 1.0).abs() > tol {
            violations.push(Violation::BadTrace { index, trace });
        }
    }
    for (index, &value) in s.priors.iter().enumerate() {
        if value < 0.0 {
            violations.push(Violation::NegativePrior { index, value });
        }
    }
    let sum: f64 = s.priors.iter().sum();
    if (sum - 1.0).abs() > tol {
        violations.push(Violation::PriorSum { sum });
    }
    ValidationReport { violations }
}

fn check_unit_interval(name: &'static str, lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value: lambda,
            range: "[0, 1]",
        })
    }
}

/// `{λΠ_1, …, λΠ_m, (1−λ)Q_1, …, (1−λ)Q_n}` with zero operators dropped.
pub fn convex_combine(p: &Povm, q: &Povm, lambda: f64) -> Result<Povm> {
    check_unit_interval("lambda", lambda)?;
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let ops: Vec<HermitianMatrix> = p
        .ops
        .iter()
        .map(|op| op.scale(lambda))
        .chain(q.ops.iter().map(|op| op.scale(1.0 - lambda)))
        .filter(|op| op.max_abs() > ZERO_OP_TOL)
        .collect();
    Povm::build(ops, p.allow_zero && q.allow_zero)
}

/// Replaces `Π_index` by the adjacent pair `λΠ_index, (1−λ)Π_index`;
/// a part that vanishes is dropped.
pub fn split_operator(p: &Povm, index: usize, lambda: f64) -> Result<Povm> {
    check_unit_interval("lambda", lambda)?;
    if index >= p.len() {
        return Err(Error::BadIndex { index, len: p.len() });
    }
    let mut ops = Vec::with_capacity(p.len() + 1);
    for (i, op) in p.ops.iter().enumerate() {
        if i == index {
            for part in [op.scale(lambda), op.scale(1.0 - lambda)] {
                if part.max_abs() > ZERO_OP_TOL {
                    ops.push(part);
                }
            }
        } else {
            ops.push(op.clone());
        }
    }
    Povm::build(ops, p.allow_zero)
}

/// POVM rewritten as `Π_i = λ_i Π′_i` with `tr Π′_i = d`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedPovm {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub normalized_ops: Vec<HermitianMatrix>,
}

impl NormalizedPovm {
    /// `‖Σ λ_i Π′_i − I‖_max`.
    pub fn identity_residual(&self) -> f64 {
        let weighted: Vec<HermitianMatrix> = self
            .normalized_ops
            .iter()
            .zip(&self.weights)
            .map(|(op, &w)| op.scale(w))
            .collect();
        sum_hermitian(weighted.iter(), self.dim).max_abs_diff(&HermitianMatrix::identity(self.dim))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

pub fn normalize_povm(p: &Povm) -> Result<NormalizedPovm> {
    let d = p.dim();
    let df = d as f64;
    let mut weights = Vec::with_capacity(p.len());
    let mut normalized_ops = Vec::with_capacity(p.len());
    for (index, op) in p.ops.iter().enumerate() {
        let tr = op.trace();
        if tr <= ZERO_OP_TOL {
            return Err(Error::DegenerateOperator(index));
        }
        weights.push(tr / df);
        normalized_ops.push(op.scale(df / tr));
    }
    Ok(NormalizedPovm {
        dim: d,
        weights,
        normalized_ops,
    })
}

/// Pretty good measurement `Π_i = ρ^{-1/2} p(i) ρ_i ρ^{-1/2}`.
///
/// When the average state is rank deficient the completion `I − Π_supp` is
/// appended as a last operator; it has zero probability on every ensemble
/// state. States with zero prior yield zero operators, so the result is
/// marked as padded in that case to keep indices aligned with the states.
pub fn pretty_good_measurement(s: &Ensemble) -> Result<Povm> {
    let rho = s.average_state();
    let n = inv_sqrt_psd(&rho, NULL_TOL)?;
    let nm = n.as_matrix();
    let mut ops: Vec<HermitianMatrix> = s
        .states
        .iter()
        .zip(&s.priors)
        .map(|(state, &p)| HermitianMatrix::hermitian_part(&(&(nm * state.as_matrix()) * nm)).scale(p))
        .collect();
    let padded = ops.iter().any(|op| op.max_abs() <= ZERO_OP_TOL);
    let support = sum_hermitian(ops.iter(), s.dim());
    let completion = &HermitianMatrix::identity(s.dim()) - &support;
    if completion.max_abs() > 1e-9 {
        ops.push(completion);
    }
    Povm::build(ops, padded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{numeric_rank_hermitian, ComplexMatrix};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_povm(rng: &mut impl Rng, d: usize, n: usize) -> Povm {
        let raw: Vec<HermitianMatrix> = (0..n)
            .map(|_| {
                let g = ComplexMatrix::from_fn(d, d, |_, _| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                HermitianMatrix::hermitian_part(&(&g * &g.adjoint()))
            })
            .collect();
        let s = sum_hermitian(raw.iter(), d);
        let n_half = inv_sqrt_psd(&s, NULL_TOL).unwrap();
        Povm::new(raw.iter().map(|a| a.conjugate_by(n_half.as_matrix())).collect()).unwrap()
    }

    #[test]
    fn identity_povm_validates() {
        let p = Povm::new(vec![HermitianMatrix::identity(2)]).unwrap();
        assert!(validate_povm(&p, 1e-9).is_valid());
    }

    #[test]
    fn incomplete_povm_rejected() {
        let p = Povm::new(vec![HermitianMatrix::diag(&[0.5, 0.5]), HermitianMatrix::diag(&[0.5, 0.6])]).unwrap();
        let r = validate_povm(&p, 1e-9);
        assert!(!r.is_valid());
        assert_eq!(r.violations[0].invariant(), "sums_to_identity");
    }

    #[test]
    fn trine_orbit_povm_validates() {
        let nu = (1.0_f64 / 3.0).sqrt().acos();
        let s3 = 3.0_f64.sqrt();
        let r = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, -0.5, s3 / 2.0], &[0.0, -s3 / 2.0, -0.5]]).unwrap();
        let base = HermitianMatrix::real_projector(&[nu.cos(), nu.sin(), 0.0]);
        let ops = vec![base.clone(), base.conjugate_by(&r), base.conjugate_by(&(&r * &r))];
        assert!(validate_operators(&ops, 1e-9).unwrap().is_valid());
    }

    #[test]
    fn mismatched_dimensions_are_structural() {
        let ops = vec![HermitianMatrix::identity(2), HermitianMatrix::identity(3)];
        assert!(matches!(validate_operators(&ops, 1e-9), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn zero_operator_needs_padding_flag() {
        let ops = vec![HermitianMatrix::identity(2), HermitianMatrix::zeros(2)];
        assert!(!validate_povm(&Povm::new(ops.clone()).unwrap(), 1e-9).is_valid());
        assert!(validate_povm(&Povm::padded(ops).unwrap(), 1e-9).is_valid());
    }

    #[test]
    fn ensemble_validation() {
        let e = Ensemble::new(vec![HermitianMatrix::diag(&[1.0, 0.0]), HermitianMatrix::diag(&[0.0, 1.0])], vec![0.5, 0.6]).unwrap();
        assert_eq!(validate_ensemble(&e, 1e-9).violations, vec![Violation::PriorSum { sum: 1.1 }]);
        let e = Ensemble::new(vec![HermitianMatrix::diag(&[0.9, 0.0])], vec![1.0]).unwrap();
        assert!(matches!(validate_ensemble(&e, 1e-9).violations[0], Violation::BadTrace { .. }));
    }

    #[test]
    fn convex_combine_examples() {
        let i2 = Povm::new(vec![HermitianMatrix::identity(2)]).unwrap();
        assert_eq!(convex_combine(&i2, &i2, 1.0).unwrap(), i2);
        let half = convex_combine(&i2, &i2, 0.5).unwrap();
        assert_eq!(half.ops(), &[HermitianMatrix::identity(2).scale(0.5), HermitianMatrix::identity(2).scale(0.5)]);
        assert!(matches!(convex_combine(&i2, &i2, 1.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn split_examples() {
        let i2 = Povm::new(vec![HermitianMatrix::identity(2)]).unwrap();
        let s = split_operator(&i2, 0, 0.3).unwrap();
        assert_eq!(s.ops(), &[HermitianMatrix::identity(2).scale(0.3), HermitianMatrix::identity(2).scale(0.7)]);
        assert_eq!(split_operator(&i2, 0, 0.0).unwrap(), i2);
        assert!(matches!(split_operator(&i2, 3, 0.5), Err(Error::BadIndex { .. })));
    }

    #[test]
    fn normalize_examples() {
        let n = normalize_povm(&Povm::new(vec![HermitianMatrix::identity(2)]).unwrap()).unwrap();
        assert_eq!(n.weights, vec![1.0]);
        assert_eq!(n.normalized_ops, vec![HermitianMatrix::identity(2)]);
        let n = normalize_povm(&Povm::new(vec![HermitianMatrix::diag(&[1.0, 0.0]), HermitianMatrix::diag(&[0.0, 1.0])]).unwrap()).unwrap();
        assert_eq!(n.weights, vec![0.5, 0.5]);
        assert_eq!(n.normalized_ops, vec![HermitianMatrix::diag(&[2.0, 0.0]), HermitianMatrix::diag(&[0.0, 2.0])]);
        let zero = Povm::padded(vec![HermitianMatrix::identity(2), HermitianMatrix::zeros(2)]).unwrap();
        assert_eq!(normalize_povm(&zero).unwrap_err(), Error::DegenerateOperator(1));
    }

    #[test]
    fn pgm_of_orthogonal_states_is_projective() {
        let e = Ensemble::new(vec![HermitianMatrix::diag(&[1.0, 0.0]), HermitianMatrix::diag(&[0.0, 1.0])], vec![0.5, 0.5]).unwrap();
        let p = pretty_good_measurement(&e).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.ops()[0].max_abs_diff(&HermitianMatrix::diag(&[1.0, 0.0])) < 1e-12);
        assert!(p.ops()[1].max_abs_diff(&HermitianMatrix::diag(&[0.0, 1.0])) < 1e-12);
    }

    #[test]
    fn pgm_rank_deficient_gets_completion() {
        let e = Ensemble::uniform(vec![
            HermitianMatrix::real_projector(&[1.0, 0.0, 0.0]),
            HermitianMatrix::real_projector(&[0.6, 0.8, 0.0]),
        ])
        .unwrap();
        let p = pretty_good_measurement(&e).unwrap();
        assert_eq!(p.len(), 3);
        assert!(validate_povm(&p, 1e-9).is_valid());
        assert!(p.ops()[2].max_abs_diff(&HermitianMatrix::diag(&[0.0, 0.0, 1.0])) < 1e-9);
    }

    #[test]
    fn pgm_random_full_rank_ensembles_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 2..=4 {
            for _ in 0..20 {
                let m = rng.gen_range(1..=d);
                let vecs: Vec<Vec<c64>> = (0..m)
                    .map(|_| {
                        let v: Vec<c64> = (0..d).map(|_| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                        v.iter().map(|z| z / n).collect()
                    })
                    .collect();
                let mut priors: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
                let tot: f64 = priors.iter().sum();
                priors.iter_mut().for_each(|p| *p /= tot);
                let e = Ensemble::from_pure_states(&vecs, priors).unwrap();
                let p = pretty_good_measurement(&e).unwrap();
                assert!(validate_povm(&p, 1e-9).is_valid());
                for (op, state) in p.ops().iter().zip(e.states()) {
                    assert!(numeric_rank_hermitian(op, 1e-9) <= numeric_rank_hermitian(state, 1e-9));
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn normalize_reproduces_identity(seed in any::<u64>(), d in 2usize..=4, n in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_povm(&mut rng, d, n);
            let np = normalize_povm(&p).unwrap();
            prop_assert!((np.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(np.identity_residual() <= 1e-9);
        }

        #[test]
        fn convex_combine_validates(seed in any::<u64>(), lambda in 0.01f64..0.99) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_povm(&mut rng, 3, 4);
            let q = random_povm(&mut rng, 3, 2);
            let c = convex_combine(&p, &q, lambda).unwrap();
            prop_assert_eq!(c.len(), 6);
            prop_assert!(validate_povm(&c, 1e-9).is_valid());
        }

        #[test]
        fn split_then_merge_is_identity(seed in any::<u64>(), lambda in 0.0f64..=1.0, idx in 0usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_povm(&mut rng, 2, 5);
            let s = split_operator(&p, idx, lambda).unwrap();
            if s.len() == p.len() {
                // one part vanished
                prop_assert!(s.ops()[idx].max_abs_diff(&p.ops()[idx]) <= 1e-15);
            } else {
                let merged = &s.ops()[idx] + &s.ops()[idx + 1];
                prop_assert!(merged.max_abs_diff(&p.ops()[idx]) <= 1e-15);
                prop_assert_eq!(&s.ops()[idx + 2..], &p.ops()[idx + 1..]);
            }
        }
    }
}
