//! Decomposing a convex resolution of the identity into basic feasible
//! solutions, and pruning POVMs with it.
//!
//! A POVM written as `Σ λ_j Π′_j = I` with `tr Π′_j = d` is the linear system
//! `D λ = c`, where column j of `D` is `(1, coords(Π′_j))` and
//! `c = (1, 1…1, 0…0)`. Every nonnegative solution is a convex combination of
//! basic solutions whose support is a linearly independent column set, so
//! at most `rank(D)` operators each. The decomposition below walks kernel
//! directions to the boundary of the solution polytope until every branch
//! ends in such a basic solution.

use crate::error::{Error, Result};
use crate::hermitian::{coords, HermitianMatrix};
use crate::infotheory::mutual_information;
use crate::quantum::{normalize_povm, validate_povm, Ensemble, NormalizedPovm, Povm, VALIDATION_TOL};
use crate::symmetry::{
    complex_orbit_bound, is_symmetric_ensemble, orbit_elements, orbit_sum, real_orbit_bound, FiniteRep,
};

/// Relative pivot threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-10;
/// Allowed deviation of `tr Π′` from d.
pub const TRACE_TOL: f64 = 1e-9;
/// Coefficients at or below this are treated as leaving the support.
pub const SUPPORT_TOL: f64 = 1e-11;
/// Eigenvalues at or below this are dropped when splitting into rank one.
pub const EIG_CUTOFF: f64 = 1e-12;
/// Tolerance for the input resolution `D λ = c`.
pub const INPUT_RESIDUAL_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-9;
const REAL_TOL: f64 = 1e-9;

/// The linear system `D λ = c` of a normalized POVM.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    dim: usize,
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    target: Vec<f64>,
}

impl DesignMatrix {
    /// Hilbert-space dimension d.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// `‖D x − c‖_∞`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.mul_vec(x)
            .iter()
            .zip(&self.target)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Row-major copy of the columns listed in `cols`.
    fn submatrix(&self, cols: &[usize]) -> Dense {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            data.extend(cols.iter().map(|&j| self.get(i, j)));
        }
        Dense {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    fn as_dense(&self) -> Dense {
        Dense {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        }
    }
}

pub fn build_design_matrix(normalized_ops: &[HermitianMatrix]) -> Result<DesignMatrix> {
    let first = normalized_ops.first().ok_or(Error::InvalidDimension(0))?;
    let d = first.dim();
    let df = d as f64;
    let rows = 1 + d * d;
    let cols = normalized_ops.len();
    let mut data = vec![0.0; rows * cols];
    for (j, op) in normalized_ops.iter().enumerate() {
        if op.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: op.dim(),
            });
        }
        let trace = op.trace();
        if (trace - df).abs() > TRACE_TOL {
            return Err(Error::Normalization {
                index: j,
                trace,
                expected: df,
            });
        }
        data[j] = 1.0;
        for (k, c) in coords(op).into_iter().enumerate() {
            data[(k + 1) * cols + j] = c;
        }
    }
    let mut target = vec![0.0; rows];
    target[..=d].iter_mut().for_each(|t| *t = 1.0);
    Ok(DesignMatrix {
        dim: d,
        rows,
        cols,
        data,
        target,
    })
}

/// Small dense real matrix used for elimination.
#[derive(Debug, Clone)]
struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Dense {
    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Reduced row echelon form with partial pivoting, columns scanned left
    /// to right. A pivot is accepted if it exceeds `rank_tol` times the
    /// largest initial entry. Returns the pivot columns.
    fn rref(&mut self, rank_tol: f64) -> Vec<usize> {
        let thresh = rank_tol * self.max_abs();
        let (m, n) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let (best, val) = (r..m)
                .map(|i| (i, self.data[i * n + c].abs()))
                .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if val <= thresh || val == 0.0 {
                for i in r..m {
                    self.data[i * n + c] = 0.0;
                }
                continue;
            }
            if best != r {
                for j in 0..n {
                    self.data.swap(best * n + j, r * n + j);
                }
            }
            let p = self.data[r * n + c];
            for j in 0..n {
                self.data[r * n + j] /= p;
            }
            for i in 0..m {
                if i == r {
                    continue;
                }
                let factor = self.data[i * n + c];
                if factor != 0.0 {
                    for j in 0..n {
                        self.data[i * n + j] -= factor * self.data[r * n + j];
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

/// Rank by row-echelon reduction with partial pivoting.
pub fn numeric_rank(d: &DesignMatrix, rank_tol: f64) -> usize {
    d.as_dense().rref(rank_tol).len()
}

/// Rank of an arbitrary row-major real matrix.
pub fn numeric_rank_of(rows: usize, cols: usize, data: &[f64], rank_tol: f64) -> usize {
    assert_eq!(data.len(), rows * cols);
    Dense {
        rows,
        cols,
        data: data.to_vec(),
    }
    .rref(rank_tol)
    .len()
}

/// Kernel vector of the listed columns: the first free column (smallest
/// index) gets coefficient 1, pivot columns are solved from the RREF.
/// `None` when the columns are independent.
fn kernel_direction(d: &DesignMatrix, support: &[usize]) -> Option<Vec<f64>> {
    let mut sub = d.submatrix(support);
    let pivots = sub.rref(RANK_TOL);
    if pivots.len() == support.len() {
        return None;
    }
    let free = (0..support.len()).find(|c| !pivots.contains(c))?;
    let n = sub.cols;
    let mut q = vec![0.0; d.cols];
    q[support[free]] = 1.0;
    for (r, &pc) in pivots.iter().enumerate() {
        q[support[pc]] = -sub.data[r * n + free];
    }
    Some(q)
}

/// Solve `D_S ν = c` for independent columns S. Overdetermined but
/// consistent; eliminates on the augmented system.
fn solve_on_support(d: &DesignMatrix, support: &[usize]) -> Option<Vec<f64>> {
    let k = support.len();
    let mut aug = Dense {
        rows: d.rows,
        cols: k + 1,
        data: Vec::with_capacity(d.rows * (k + 1)),
    };
    for i in 0..d.rows {
        aug.data.extend(support.iter().map(|&j| d.get(i, j)));
        aug.data.push(d.target[i]);
    }
    let pivots = aug.rref(RANK_TOL);
    if pivots.len() != k || pivots.iter().enumerate().any(|(r, &c)| r != c) {
        return None;
    }
    let mut x = vec![0.0; d.cols];
    for (r, &j) in support.iter().enumerate() {
        x[j] = aug.data[r * (k + 1) + k];
    }
    Some(x)
}

/// `Σ μ_i ν_i = λ`, each `ν_i` a basic feasible solution of `D ν = c`.
#[derive(Debug, Clone)]
pub struct IdentityDecomposition {
    pub design: DesignMatrix,
    pub rank: usize,
    pub weights: Vec<f64>,
    pub solutions: Vec<Vec<f64>>,
}

impl IdentityDecomposition {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn support(&self, leaf: usize) -> Vec<usize> {
        self.solutions[leaf]
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    /// `Σ_i μ_i ν_i`.
    pub fn recombine(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.design.cols];
        for (mu, nu) in self.weights.iter().zip(&self.solutions) {
            for (o, v) in out.iter_mut().zip(nu) {
                *o += mu * v;
            }
        }
        out
    }
}

/// Rewrites the identity `Σ λ_j Π′_j = I` as a convex mixture of basic
/// feasible solutions, with at most one leaf per initial support column.
///
/// Vertices are reached by kernel-direction walks (smallest free column
/// first), so the result is deterministic.
pub fn decompose_identity(normalized: &NormalizedPovm) -> Result<IdentityDecomposition> {
    let design = build_design_matrix(&normalized.normalized_ops)?;
    if let Some((j, &w)) = normalized.weights.iter().enumerate().find(|(_, &w)| !(w > 0.0)) {
        return Err(Error::OutOfRange {
            name: if j == 0 { "lambda_0" } else { "lambda_j" },
            value: w,
            range: "(0, 1]",
        });
    }
    let residual = design.residual(&normalized.weights);
    if residual > INPUT_RESIDUAL_TOL {
        return Err(Error::Residual(residual));
    }
    let rank = numeric_rank(&design, RANK_TOL);
    let n = normalized.weights.len();

    // Peel off one vertex at a time: with v a vertex of the face containing
    // x, push x away from v until a coordinate vanishes,
    // x' = x + t (x − v), so x = (t v + x') / (1 + t) and x' has strictly
    // smaller support. At most n leaves.
    let mut leaves: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut x = normalized.weights.clone();
    let mut remaining = 1.0_f64;
    for _ in 0..=n {
        let v = vertex_below(&design, x.clone())?;
        let dir: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a - b).collect();
        let step = if dir.iter().all(|q| q.abs() <= SUPPORT_TOL) {
            None
        } else {
            max_step(&x, &dir, 1.0)
        };
        let Some((t, hit)) = step else {
            // x is itself a vertex
            push_leaf(&mut leaves, remaining, polish(&design, v));
            break;
        };
        push_leaf(&mut leaves, remaining * t / (1.0 + t), polish(&design, v));
        remaining /= 1.0 + t;
        x = move_to_boundary(&x, &dir, t, hit);
    }
    if (leaves.iter().map(|l| l.0).sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Internal("decomposition did not terminate".into()));
    }
    leaves.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let (weights, solutions) = leaves.into_iter().unzip();
    Ok(IdentityDecomposition {
        design,
        rank,
        weights,
        solutions,
    })
}

/// Walks from `x` to a vertex of the smallest face containing it by moving
/// along kernel directions until the support columns are independent.
fn vertex_below(design: &DesignMatrix, mut x: Vec<f64>) -> Result<Vec<f64>> {
    for _ in 0..=x.len() {
        let support: Vec<usize> = (0..x.len()).filter(|&j| x[j] > 0.0).collect();
        let Some(q) = kernel_direction(design, &support) else {
            return Ok(x);
        };
        // Σ q = 0 through the all-ones row, so q has entries of both signs.
        let Some((t, hit)) = max_step(&x, &q, 1.0) else {
            return Err(Error::Internal("kernel direction is one-signed".into()));
        };
        x = move_to_boundary(&x, &q, t, hit);
    }
    Err(Error::Internal("support did not shrink".into()))
}

/// Re-solves `D_S ν = c` on the support to remove drift from the walk.
fn polish(design: &DesignMatrix, x: Vec<f64>) -> Vec<f64> {
    let support: Vec<usize> = (0..x.len()).filter(|&j| x[j] > 0.0).collect();
    solve_on_support(design, &support)
        .filter(|p| p.iter().zip(&x).all(|(a, b)| (a - b).abs() <= 1e-9 && *a >= 0.0))
        .unwrap_or(x)
        .into_iter()
        .map(|v| if v <= SUPPORT_TOL { 0.0 } else { v })
        .collect()
}

/// Largest `t ≥ 0` keeping `x + sign·t·q ≥ 0`, and the blocking index.
fn max_step(x: &[f64], q: &[f64], sign: f64) -> Option<(f64, usize)> {
    x.iter()
        .zip(q)
        .enumerate()
        .filter(|(_, (_, &qj))| sign * qj < 0.0)
        .map(|(j, (&xj, &qj))| (xj / (-sign * qj), j))
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

fn move_to_boundary(x: &[f64], q: &[f64], t: f64, hit: usize) -> Vec<f64> {
    let mut y: Vec<f64> = x.iter().zip(q).map(|(a, b)| a + t * b).collect();
    y[hit] = 0.0;
    for v in y.iter_mut() {
        if *v <= SUPPORT_TOL {
            *v = 0.0;
        }
    }
    y
}

fn push_leaf(leaves: &mut Vec<(f64, Vec<f64>)>, mu: f64, leaf: Vec<f64>) {
    if let Some(existing) = leaves
        .iter_mut()
        .find(|(_, v)| v.iter().zip(&leaf).all(|(a, b)| (a - b).abs() <= 1e-12))
    {
        existing.0 += mu;
    } else {
        leaves.push((mu, leaf));
    }
}

/// Splits every operator into eigenvalue-weighted rank-one projectors;
/// eigenvalues at or below [`EIG_CUTOFF`] are dropped.
pub fn rank_one_split(p: &Povm) -> Result<Povm> {
    let mut ops = Vec::new();
    for op in p.ops() {
        let eig = op.eig();
        for (k, &lam) in eig.values.iter().enumerate() {
            if lam > EIG_CUTOFF {
                ops.push(HermitianMatrix::projector(&eig.vector(k)).scale(lam));
            }
        }
    }
    Povm::new(ops)
}

/// One orbit `{ν · (1/|G|) σ(g) Π′ σ(g)†}` of a pruned symmetric POVM.
#[derive(Debug, Clone)]
pub struct OrbitComponent {
    pub weight: f64,
    pub normalized_base: HermitianMatrix,
}

/// Result of a pruning run.
#[derive(Debug, Clone)]
pub struct PruneOutcome {
    pub povm: Povm,
    pub info_before: f64,
    pub info_after: f64,
    /// Number of basic solutions in the decomposition.
    pub leaf_count: usize,
    /// Mutual information of every leaf, in decomposition order.
    pub leaf_infos: Vec<f64>,
    pub leaf_weights: Vec<f64>,
    /// Orbits of the chosen leaf (symmetric pruning only).
    pub orbits: Vec<OrbitComponent>,
    /// Applicable upper bound on the operator (or orbit) count.
    pub bound: usize,
}

fn require_valid(p: &Povm) -> Result<()> {
    match validate_povm(p, VALIDATION_TOL).violations.first() {
        Some(v) => Err(Error::InvalidPovm(v.to_string())),
        None => Ok(()),
    }
}

fn best_leaf(infos: &[f64]) -> usize {
    infos
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc })
        .0
}

/// Pruning by extreme points: returns a POVM of at most `rank(D) ≤ d²`
/// rank-one operators (`≤ d(d+1)/2` when all data is real) whose mutual
/// information is at least that of `p`.
pub fn prune_povm(s: &Ensemble, p: &Povm) -> Result<PruneOutcome> {
    require_valid(p)?;
    let info_before = mutual_information(s, p)?;
    let split = rank_one_split(p)?;
    let normalized = normalize_povm(&split)?;
    let dec = decompose_identity(&normalized)?;

    let mut povms = Vec::with_capacity(dec.len());
    let mut leaf_infos = Vec::with_capacity(dec.len());
    for nu in &dec.solutions {
        let ops: Vec<HermitianMatrix> = nu
            .iter()
            .zip(&normalized.normalized_ops)
            .filter(|(&v, _)| v > 0.0)
            .map(|(&v, op)| op.scale(v))
            .collect();
        let leaf = Povm::new(ops)?;
        leaf_infos.push(mutual_information(s, &leaf)?);
        povms.push(leaf);
    }
    let best = best_leaf(&leaf_infos);
    let real = s.max_imag() <= REAL_TOL && p.max_imag() <= REAL_TOL;
    let d = p.dim();
    Ok(PruneOutcome {
        info_after: leaf_infos[best],
        povm: povms.swap_remove(best),
        info_before,
        leaf_count: dec.len(),
        leaf_infos,
        leaf_weights: dec.weights,
        orbits: Vec::new(),
        bound: if real { d * (d + 1) / 2 } else { d * d },
    })
}

/// Pruning under a symmetry group: the result is a union of at most
/// `Σ m_i²` orbits of rank-one operators (`real_orbit_bound` in real mode)
/// with mutual information at least that of `p`.
///
/// In real mode the ensemble and representation must be real; the POVM is
/// replaced by its entrywise real part first, which gives identical
/// statistics on real states.
pub fn prune_symmetric_povm(s: &Ensemble, p: &Povm, rep: &FiniteRep, real_mode: bool) -> Result<PruneOutcome> {
    if !is_symmetric_ensemble(s, rep, SYMMETRY_TOL) {
        return Err(Error::NotSymmetric);
    }
    require_valid(p)?;
    let info_before = mutual_information(s, p)?;
    let bound = if real_mode {
        let imag = s.max_imag().max(rep.max_imag());
        if imag > REAL_TOL {
            return Err(Error::RealRepRequired(imag));
        }
        real_orbit_bound(rep)?
    } else {
        complex_orbit_bound(rep)?
    };
    let start = if real_mode { p.real_part() } else { p.clone() };
    let split = rank_one_split(&start)?;
    let normalized = normalize_povm(&split)?;
    let orbit_sums = normalized
        .normalized_ops
        .iter()
        .map(|op| orbit_sum(op, rep))
        .collect::<Result<Vec<_>>>()?;
    let sums = NormalizedPovm {
        dim: normalized.dim,
        weights: normalized.weights.clone(),
        normalized_ops: orbit_sums,
    };
    let dec = decompose_identity(&sums)?;

    let mut leaves = Vec::with_capacity(dec.len());
    let mut leaf_infos = Vec::with_capacity(dec.len());
    for nu in &dec.solutions {
        let mut ops = Vec::new();
        let mut orbits = Vec::new();
        for (&v, base) in nu.iter().zip(&normalized.normalized_ops) {
            if v > 0.0 {
                ops.extend(orbit_elements(&base.scale(v), rep)?);
                orbits.push(OrbitComponent {
                    weight: v,
                    normalized_base: base.clone(),
                });
            }
        }
        let leaf = Povm::new(ops)?;
        leaf_infos.push(mutual_information(s, &leaf)?);
        leaves.push((leaf, orbits));
    }
    let best = best_leaf(&leaf_infos);
    let (povm, orbits) = leaves.swap_remove(best);
    Ok(PruneOutcome {
        info_after: leaf_infos[best],
        povm,
        info_before,
        leaf_count: dec.len(),
        leaf_infos,
        leaf_weights: dec.weights,
        orbits,
        bound,
    })
}
