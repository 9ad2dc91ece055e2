//! Lifted trines and double trines: ensembles, single-orbit information
//! surfaces, one- and two-orbit optimization, the pretty-good-measurement
//! closed form and the curvature check at its optimum.
//!
//! An orbit is parameterized by a unit vector
//! `Ψ(a, b) = (cos a, sin a cos b, sin a sin b)` and consists of the three
//! rank-one operators `R^j |Ψ⟩⟨Ψ| R^{-j}`. It is a complete POVM exactly when
//! `x = cos² a = 1/3`; off that plane its information is the formal one
//! with priors as row marginals.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, LN_2, PI};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermitian::{c64, ComplexMatrix, HermitianMatrix};
use crate::infotheory::{h, orbit_information, vectors_proportional, PROPORTIONALITY_TOL};
use crate::optimize::{golden_section_max, linspace, maximize_1d};
use crate::quantum::Ensemble;
use crate::symmetry::{generate_group, FiniteRep, MAX_ORDER};

/// Upper end of the canonical b range.
pub const B_MAX: f64 = 2.0 * PI / 3.0;
pub const SCAN_GRID: usize = 200;
pub const OPT_GRID: usize = 512;
/// Grid used for the inner maximization over b in the two-orbit search.
pub const INNER_GRID: usize = 64;
pub const GOLDEN_TOL: f64 = 1e-10;
pub const HESSIAN_STEP: f64 = 1e-4;
const TWO_ORBIT_SEEDS: usize = 8;
const TWO_ORBIT_SWEEPS: usize = 3;
const X1_GRID: usize = 33;
const X2_GRID: usize = 65;
const DERIVATIVE_STEP: f64 = 1e-6;

/// `x = 1/3`, the plane on which a single orbit is a POVM.
pub const X_PLANE: f64 = 1.0 / 3.0;

/// `arccos √(1/3)`.
pub fn nu() -> f64 {
    X_PLANE.sqrt().acos()
}

/// The 120° rotation about the first axis.
pub fn trine_rotation() -> ComplexMatrix {
    let s3 = 3.0_f64.sqrt();
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, -0.5, 0.5 * s3], &[0.0, -0.5 * s3, -0.5]])
        .expect("static matrix")
}

/// The cyclic group generated by [`trine_rotation`].
pub fn trine_group() -> FiniteRep {
    generate_group(3, &[trine_rotation()], MAX_ORDER).expect("R has order 3")
}

pub fn psi(a: f64, b: f64) -> [f64; 3] {
    [a.cos(), a.sin() * b.cos(), a.sin() * b.sin()]
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "[0, 1]",
        })
    }
}

/// The three lifted trine state vectors.
pub fn lifted_trine_vectors(alpha: f64) -> Result<[[f64; 3]; 3]> {
    check_alpha(alpha)?;
    let (l, p) = (alpha.sqrt(), (1.0 - alpha).sqrt());
    let s3 = 3.0_f64.sqrt();
    Ok([[l, p, 0.0], [l, -0.5 * p, 0.5 * s3 * p], [l, -0.5 * p, -0.5 * s3 * p]])
}

/// Lifted trines ensemble with uniform priors.
pub fn lifted_trines(alpha: f64) -> Result<Ensemble> {
    let vs = lifted_trine_vectors(alpha)?;
    Ensemble::uniform(vs.iter().map(|v| HermitianMatrix::real_projector(v)).collect())
}

/// The orbit `{R^j |Ψ(a,b)⟩⟨Ψ(a,b)| R^{-j} : j = 0, 1, 2}`.
pub fn orbit_operators(a: f64, b: f64) -> Vec<HermitianMatrix> {
    let base = HermitianMatrix::real_projector(&psi(a, b));
    let r = trine_rotation();
    let r2 = &r * &r;
    vec![base.conjugate_by(&ComplexMatrix::identity(3)), base.conjugate_by(&r), base.conjugate_by(&r2)]
}

/// Formal information of the orbit at `(a, b)` for the lifted trines, via
/// the general operator route.
pub fn orbit_info(alpha: f64, a: f64, b: f64) -> Result<f64> {
    orbit_information(&lifted_trines(alpha)?, &orbit_operators(a, b))
}

/// Orbit point `(a, b)`; `x = cos² a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitParams {
    pub a: f64,
    pub b: f64,
}

impl OrbitParams {
    pub fn from_x(x: f64, b: f64) -> Self {
        Self {
            a: x.clamp(0.0, 1.0).sqrt().acos(),
            b,
        }
    }

    pub fn x(&self) -> f64 {
        self.a.cos().powi(2)
    }
}

/// Fast evaluator for the lifted trines orbit information, working on state
/// vectors directly instead of matrices.
#[derive(Debug, Clone)]
pub struct TrineModel {
    alpha: f64,
    states: [[f64; 3]; 3],
    rotations: [[[f64; 3]; 3]; 3],
}

fn mat3_vec(m: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl TrineModel {
    pub fn new(alpha: f64) -> Result<Self> {
        let states = lifted_trine_vectors(alpha)?;
        let r = trine_rotation();
        let to_real = |m: &ComplexMatrix| [0, 1, 2].map(|i| [0, 1, 2].map(|j| m[(i, j)].re));
        let r2 = &r * &r;
        Ok(Self {
            alpha,
            states,
            rotations: [to_real(&ComplexMatrix::identity(3)), to_real(&r), to_real(&r2)],
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `p_ij = (1/3) |⟨s_i | R^j v⟩|²`.
    pub fn joint_for_vector(&self, v: &[f64; 3]) -> [[f64; 3]; 3] {
        let rotated = self.rotations.map(|r| mat3_vec(&r, v));
        self.states.map(|s| rotated.map(|w| dot3(&s, &w).powi(2) / 3.0))
    }

    /// Formal orbit information for an arbitrary base vector.
    pub fn info_vector(&self, v: &[f64; 3]) -> f64 {
        let p = self.joint_for_vector(v);
        let joint: f64 = p.iter().flatten().map(|&x| h(x)).sum();
        let cols: f64 = (0..3).map(|j| h(p[0][j] + p[1][j] + p[2][j])).sum();
        joint - 3.0 * h(1.0 / 3.0) - cols
    }

    pub fn info(&self, a: f64, b: f64) -> f64 {
        self.info_vector(&psi(a, b))
    }

    /// `I(arccos √x, b)`.
    pub fn info_x(&self, x: f64, b: f64) -> f64 {
        self.info(x.sqrt().acos(), b)
    }

    /// Probability vector `(p_1j, p_2j, p_3j)` induced by the base operator
    /// `|Ψ(a,b)⟩⟨Ψ(a,b)|` (column j = 0).
    pub fn column(&self, a: f64, b: f64) -> [f64; 3] {
        let p = self.joint_for_vector(&psi(a, b));
        [p[0][0], p[1][0], p[2][0]]
    }

    /// `max_b I(arccos √x, b)` and its argmax.
    pub fn best_b(&self, x: f64, grid: usize) -> (f64, f64) {
        maximize_1d(|b| self.info_x(x, b), 0.0, B_MAX, grid, GOLDEN_TOL)
    }
}

/// One sample of the information surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub x: f64,
    pub b: f64,
    pub info_bits: f64,
    /// Central-difference `∂I/∂b`.
    pub dinfo_db: f64,
}

/// Uniform `nx × nb` grid over `x ∈ [0, 1]`, `b ∈ [0, 2π/3]`, x-major.
pub fn scan_surface(alpha: f64, nx: usize, nb: usize) -> Result<Vec<SurfacePoint>> {
    if nx < 2 || nb < 2 {
        return Err(Error::OutOfRange {
            name: "grid size",
            value: nx.min(nb) as f64,
            range: ">= 2",
        });
    }
    let model = TrineModel::new(alpha)?;
    let xs = linspace(0.0, 1.0, nx);
    let bs = linspace(0.0, B_MAX, nb);
    Ok(xs
        .par_iter()
        .flat_map_iter(|&x| {
            let model = &model;
            bs.iter().map(move |&b| SurfacePoint {
                x,
                b,
                info_bits: model.info_x(x, b),
                dinfo_db: (model.info_x(x, b + DERIVATIVE_STEP) - model.info_x(x, b - DERIVATIVE_STEP))
                    / (2.0 * DERIVATIVE_STEP),
            })
        })
        .collect())
}

/// Best single orbit on the plane `x = 1/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleOrbitOptimum {
    pub b: f64,
    pub info_bits: f64,
}

impl SingleOrbitOptimum {
    pub fn params(&self) -> OrbitParams {
        OrbitParams { a: nu(), b: self.b }
    }
}

/// Maximizes `I(ν, b)` over `b ∈ [0, 2π/3]` (grid of [`OPT_GRID`] points,
/// golden-section refinement). Symmetric ties resolve to the smaller b.
pub fn optimize_single_orbit(alpha: f64) -> Result<SingleOrbitOptimum> {
    let model = TrineModel::new(alpha)?;
    let a = nu();
    let (b, info_bits) = maximize_1d(|b| model.info(a, b), 0.0, B_MAX, OPT_GRID, GOLDEN_TOL);
    Ok(SingleOrbitOptimum { b, info_bits })
}

/// Weight λ solving `λ x1 + (1 − λ) x2 = 1/3`; `None` when `x1 = x2`.
pub fn konvex_lambda(x1: f64, x2: f64) -> Option<f64> {
    if (x2 - x1).abs() < 1e-14 {
        None
    } else {
        Some((x2 - X_PLANE) / (x2 - x1))
    }
}

/// Best convex combination of two orbits on opposite sides of `x = 1/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoOrbitSolution {
    /// Point with `x ≤ 1/3`.
    pub first: OrbitParams,
    /// Point with `x ≥ 1/3`.
    pub second: OrbitParams,
    pub lambda: f64,
    pub first_info: f64,
    pub second_info: f64,
    pub info_bits: f64,
}

struct TwoOrbitSearch<'a> {
    model: &'a TrineModel,
}

impl TwoOrbitSearch<'_> {
    fn g(&self, x: f64) -> (f64, f64) {
        self.model.best_b(x, INNER_GRID)
    }

    fn chord(&self, x1: f64, x2: f64) -> f64 {
        match konvex_lambda(x1, x2) {
            Some(l) => l * self.g(x1).1 + (1.0 - l) * self.g(x2).1,
            None => self.g(X_PLANE).1,
        }
    }
}

/// Maximizes `λ I(a, b) + (1 − λ) I(c, d)` subject to
/// `λ cos² a + (1 − λ) cos² c = 1/3`, with `cos² a ∈ [0, 1/3]` and
/// `cos² c ∈ [1/3, 1]`.
///
/// For fixed x values the b-coordinates decouple, so the search runs over
/// `(x1, x2)` with the inner maximum over b taken per point: a cached grid
/// scan picks seeds, then coordinate-wise golden sections refine each seed.
pub fn optimize_two_orbits(alpha: f64) -> Result<TwoOrbitSolution> {
    let model = TrineModel::new(alpha)?;
    let search = TwoOrbitSearch { model: &model };
    let x1s = linspace(0.0, X_PLANE, X1_GRID);
    let x2s = linspace(X_PLANE, 1.0, X2_GRID);
    let g1: Vec<f64> = x1s.par_iter().map(|&x| search.g(x).1).collect();
    let g2: Vec<f64> = x2s.par_iter().map(|&x| search.g(x).1).collect();

    let mut seeds: Vec<(f64, usize, usize)> = Vec::with_capacity(X1_GRID * X2_GRID);
    for (i, &x1) in x1s.iter().enumerate() {
        for (j, &x2) in x2s.iter().enumerate() {
            let v = match konvex_lambda(x1, x2) {
                Some(l) => l * g1[i] + (1.0 - l) * g2[j],
                None => g1[i],
            };
            seeds.push((v, i, j));
        }
    }
    seeds.sort_by(|a, b| b.0.total_cmp(&a.0));
    seeds.truncate(TWO_ORBIT_SEEDS);

    let step1 = X_PLANE / (X1_GRID - 1) as f64;
    let step2 = (1.0 - X_PLANE) / (X2_GRID - 1) as f64;
    let refined: Vec<(f64, f64, f64)> = seeds
        .par_iter()
        .map(|&(v0, i, j)| {
            let (mut x1, mut x2, mut best) = (x1s[i], x2s[j], v0);
            for _ in 0..TWO_ORBIT_SWEEPS {
                let lo = (x1 - step1).max(0.0);
                let hi = (x1 + step1).min(X_PLANE);
                let (c1, v1) = golden_section_max(|t| search.chord(t, x2), lo, hi, 1e-9);
                if v1 > best {
                    x1 = c1;
                    best = v1;
                }
                let lo = (x2 - step2).max(X_PLANE);
                let hi = (x2 + step2).min(1.0);
                let (c2, v2) = golden_section_max(|t| search.chord(x1, t), lo, hi, 1e-9);
                if v2 > best {
                    x2 = c2;
                    best = v2;
                }
            }
            (best, x1, x2)
        })
        .collect();
    let (_, x1, x2) = refined
        .into_iter()
        .fold((f64::NEG_INFINITY, 0.0, 0.0), |acc, r| if r.0 > acc.0 { r } else { acc });

    let (b1, i1) = search.g(x1);
    let (b2, i2) = search.g(x2);
    let (lambda, info_bits) = match konvex_lambda(x1, x2) {
        Some(l) => (l, l * i1 + (1.0 - l) * i2),
        None => (1.0, i1),
    };
    Ok(TwoOrbitSolution {
        first: OrbitParams::from_x(x1, b1),
        second: OrbitParams::from_x(x2, b2),
        lambda,
        first_info: i1,
        second_info: i2,
        info_bits,
    })
}

/// Basis change taking the double trines to lifted trines (plus a null
/// fourth coordinate).
pub fn double_trines_transform() -> ComplexMatrix {
    let s = 0.5_f64.sqrt();
    ComplexMatrix::from_real_rows(&[
        &[s, 0.0, 0.0, s],
        &[s, 0.0, 0.0, -s],
        &[0.0, s, s, 0.0],
        &[0.0, s, -s, 0.0],
    ])
    .expect("static matrix")
}

/// The two-qubit product vectors `ψ_i ⊗ ψ_i` of the planar trines.
pub fn double_trine_vectors() -> [[f64; 4]; 3] {
    let s3 = 3.0_f64.sqrt();
    [[1.0, 0.0, 0.0, 0.0], [0.25, 0.25 * s3, 0.25 * s3, 0.75], [0.25, -0.25 * s3, -0.25 * s3, 0.75]]
}

/// Double trines: the raw 4-dimensional ensemble and its 3-dimensional
/// projection after [`double_trines_transform`] (last coordinate dropped).
pub fn double_trines() -> Result<(Ensemble, Ensemble)> {
    let u = double_trines_transform();
    let mut raw = Vec::with_capacity(3);
    let mut projected = Vec::with_capacity(3);
    for v in double_trine_vectors() {
        let cv: Vec<c64> = v.iter().map(|&x| c64::new(x, 0.0)).collect();
        raw.push(HermitianMatrix::projector(&cv));
        let w = u.apply(&cv);
        projected.push(HermitianMatrix::projector(&w[..3]));
    }
    Ok((Ensemble::uniform(raw)?, Ensemble::uniform(projected)?))
}

fn gamma() -> f64 {
    let t = 3.0 + 2.0 * 2.0_f64.sqrt();
    (2.0 * t * t).ln()
}

/// `(2√2 γ − 9 ln 2) / (6 ln 2)` with `γ = ln(2 (3 + 2√2)²)`, ≈ 1.369 bit.
pub fn double_trines_closed_form() -> f64 {
    (2.0 * 2.0_f64.sqrt() * gamma() - 9.0 * LN_2) / (6.0 * LN_2)
}

/// Diagonal of the Hessian of `I(arccos √x, b)` at `(1/3, 0)` for the
/// double trines: `((81 − 27√2 γ)/(16 ln 2), (6 − (2 + √2) γ)/(3 ln 2))`.
pub fn double_trines_hessian_closed_form() -> [f64; 2] {
    let g = gamma();
    let r2 = 2.0_f64.sqrt();
    [(81.0 - 27.0 * r2 * g) / (16.0 * LN_2), (6.0 - (2.0 + r2) * g) / (3.0 * LN_2)]
}

/// Central finite-difference Hessian of `I(arccos √x, b)` in `(x, b)`.
pub fn hessian_at(alpha: f64, x: f64, b: f64, h: f64) -> Result<[[f64; 2]; 2]> {
    if !(h > 0.0) || x - h < 0.0 || x + h > 1.0 {
        return Err(Error::OutOfRange {
            name: "x ± h",
            value: x,
            range: "interior of [0, 1]",
        });
    }
    let m = TrineModel::new(alpha)?;
    let f = |x: f64, b: f64| m.info_x(x, b);
    let f0 = f(x, b);
    let fxx = (f(x + h, b) - 2.0 * f0 + f(x - h, b)) / (h * h);
    let fbb = (f(x, b + h) - 2.0 * f0 + f(x, b - h)) / (h * h);
    let fxb = (f(x + h, b + h) - f(x + h, b - h) - f(x - h, b + h) + f(x - h, b - h)) / (4.0 * h * h);
    Ok([[fxx, fxb], [fxb, fbb]])
}

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
pub fn symmetric_eigenvalues_2x2(m: &[[f64; 2]; 2]) -> [f64; 2] {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let r = (0.25 * (m[0][0] - m[1][1]).powi(2) + m[0][1] * m[1][0]).sqrt();
    [mean - r, mean + r]
}

/// Numerical version of the argument that a single orbit (of any rank) is
/// not optimal: the two optimal rank-one points induce non-proportional
/// probability vectors, so mixing them into one operator strictly loses
/// information.
#[derive(Debug, Clone, PartialEq)]
pub struct RankArgumentReport {
    pub two_orbit: TwoOrbitSolution,
    pub single_orbit: SingleOrbitOptimum,
    /// Representative of the `x ≤ 1/3` optimum used for the vector.
    pub first_point: OrbitParams,
    pub first_vector: [f64; 3],
    pub second_point: OrbitParams,
    pub second_vector: [f64; 3],
    /// `|I(first_point) − I(two_orbit.first)|`; zero up to rounding when the
    /// representative lies in the same symmetry class.
    pub representative_gap: f64,
    pub proportional: bool,
    /// Two orbits beat the best single orbit by more than 1e-9 bit.
    pub strict_gain: bool,
}

pub fn single_orbit_rank_argument(alpha: f64) -> Result<RankArgumentReport> {
    let model = TrineModel::new(alpha)?;
    let two_orbit = optimize_two_orbits(alpha)?;
    let single_orbit = optimize_single_orbit(alpha)?;
    // At x = 0 the points (π/2, π/2) and (π/2, π/6) are related by the
    // reflection swapping states 2 and 3; use the latter, whose vector has
    // its zero on the middle state.
    let first_point = if two_orbit.first.x() < 1e-6 {
        OrbitParams { a: FRAC_PI_2, b: FRAC_PI_6 }
    } else {
        two_orbit.first
    };
    let second_point = two_orbit.second;
    let first_vector = model.column(first_point.a, first_point.b);
    let second_vector = model.column(second_point.a, second_point.b);
    let representative_gap = (model.info(first_point.a, first_point.b) - two_orbit.first_info).abs();
    Ok(RankArgumentReport {
        proportional: vectors_proportional(&first_vector, &second_vector, PROPORTIONALITY_TOL),
        strict_gain: two_orbit.info_bits > single_orbit.info_bits + 1e-9,
        two_orbit,
        single_orbit,
        first_point,
        first_vector,
        second_point,
        second_vector,
        representative_gap,
    })
}
