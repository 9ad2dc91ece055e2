#![allow(dead_code)]

use povm_forge::hermitian::{inv_sqrt_psd, sum_hermitian, NULL_TOL};
use povm_forge::{c64, ComplexMatrix, Ensemble, HermitianMatrix, Povm};
use rand::Rng;

pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_psd(rng: &mut impl Rng, d: usize, rank: usize, real: bool) -> HermitianMatrix {
    let mut g = random_complex(rng, d, rank);
    if real {
        g = ComplexMatrix::from_fn(d, rank, |i, j| c64::new(g[(i, j)].re, 0.0));
    }
    HermitianMatrix::hermitian_part(&(&g * &g.adjoint()))
}

/// `Π_k = S^{-1/2} A_k S^{-1/2}` with `S = Σ A_k`, for random PSD `A_k` of
/// random rank.
pub fn random_povm(rng: &mut impl Rng, d: usize, n: usize, real: bool) -> Povm {
    let mut ranks: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=d)).collect();
    // the operators must span the space for S^{-1/2} to exist
    if ranks.iter().sum::<usize>() < d {
        ranks[n - 1] = d;
    }
    let raw: Vec<HermitianMatrix> = ranks.iter().map(|&r| random_psd(rng, d, r, real)).collect();
    let s = sum_hermitian(raw.iter(), d);
    let n_half = inv_sqrt_psd(&s, NULL_TOL).expect("psd sum");
    Povm::new(raw.iter().map(|a| a.conjugate_by(n_half.as_matrix())).collect()).expect("valid povm")
}

pub fn random_state(rng: &mut impl Rng, d: usize, real: bool) -> HermitianMatrix {
    let rank = rng.gen_range(1..=d);
    let rho = random_psd(rng, d, rank, real);
    rho.scale(1.0 / rho.trace())
}

pub fn random_priors(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
    let t: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= t);
    p
}

pub fn random_ensemble(rng: &mut impl Rng, d: usize, m: usize) -> Ensemble {
    let states = (0..m).map(|_| random_state(rng, d, false)).collect();
    Ensemble::new(states, random_priors(rng, m)).expect("valid ensemble")
}

/// A 120° rotation: planar for d = 2, about the first axis for d = 3.
pub fn c3_generator(d: usize) -> ComplexMatrix {
    let (c, s) = (-0.5, 0.75_f64.sqrt());
    match d {
        2 => ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]).unwrap(),
        3 => ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, c, -s], &[0.0, s, c]]).unwrap(),
        _ => panic!("unsupported dimension"),
    }
}

/// Union of `k` C3 orbits of random states; priors constant on each orbit.
pub fn random_c3_ensemble(rng: &mut impl Rng, d: usize, k: usize) -> Ensemble {
    let r = c3_generator(d);
    let r2 = &r * &r;
    let weights = random_priors(rng, k);
    let mut states = Vec::new();
    let mut priors = Vec::new();
    for w in weights {
        let rho = random_state(rng, d, false);
        for g in [ComplexMatrix::identity(d), r.clone(), r2.clone()] {
            states.push(rho.conjugate_by(&g));
            priors.push(w / 3.0);
        }
    }
    Ensemble::new(states, priors).expect("valid ensemble")
}

/// Real rows `(1, M_kk..., Re M_kl..., Im M_kl...)` of `Σ ν_j Π′_j = I`,
/// built directly from matrix entries.
pub fn constraint_system(normalized: &[HermitianMatrix]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let d = normalized[0].dim();
    let mut rows = vec![normalized.iter().map(|_| 1.0).collect::<Vec<f64>>()];
    let mut target = vec![1.0];
    for k in 0..d {
        rows.push(normalized.iter().map(|m| m.as_matrix()[(k, k)].re).collect());
        target.push(1.0);
    }
    for k in 0..d {
        for l in 0..k {
            rows.push(normalized.iter().map(|m| m.as_matrix()[(k, l)].re).collect());
            target.push(0.0);
            rows.push(normalized.iter().map(|m| m.as_matrix()[(k, l)].im).collect());
            target.push(0.0);
        }
    }
    (rows, target)
}

/// Least-squares solution on the columns `subset` via normal equations and
/// partial-pivot elimination; `None` when the columns are dependent.
fn solve_subset(rows: &[Vec<f64>], target: &[f64], subset: &[usize]) -> Option<Vec<f64>> {
    let k = subset.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for (p, &i) in subset.iter().enumerate() {
        for (q, &j) in subset.iter().enumerate() {
            a[p][q] = rows.iter().map(|r| r[i] * r[j]).sum();
        }
        a[p][k] = rows.iter().zip(target).map(|(r, t)| r[i] * t).sum();
    }
    for c in 0..k {
        let piv = (c..k).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[piv][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, piv);
        for r in 0..k {
            if r != c {
                let f = a[r][c] / a[c][c];
                for cc in c..=k {
                    a[r][cc] -= f * a[c][cc];
                }
            }
        }
    }
    Some((0..k).map(|c| a[c][k] / a[c][c]).collect())
}

pub fn system_residual(rows: &[Vec<f64>], target: &[f64], x: &[f64]) -> f64 {
    rows.iter()
        .zip(target)
        .map(|(r, t)| (r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - t).abs())
        .fold(0.0, f64::max)
}

/// Every basic feasible solution of `{ν ≥ 0 : Σ ν_j Π′_j = I}`, found by
/// trying all column subsets with linearly independent columns.
pub fn enumerate_vertices(normalized: &[HermitianMatrix]) -> Vec<Vec<f64>> {
    let (rows, target) = constraint_system(normalized);
    let n = normalized.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&j| mask & (1 << j) != 0).collect();
        if subset.len() > rows.len() {
            continue;
        }
        let Some(sol) = solve_subset(&rows, &target, &subset) else {
            continue;
        };
        if sol.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (&j, &v) in subset.iter().zip(&sol) {
            x[j] = v.max(0.0);
        }
        if system_residual(&rows, &target, &x) > 1e-8 {
            continue;
        }
        if !out.iter().any(|v| v.iter().zip(&x).all(|(a, b)| (a - b).abs() <= 1e-9)) {
            out.push(x);
        }
    }
    out
}
