//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs as a plain binary (`harness = false`).

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use povm_forge::caratheodory::{decompose_identity, numeric_rank, prune_povm};
use povm_forge::infotheory::{mutual_information, vectors_proportional};
use povm_forge::quantum::{convex_combine, normalize_povm, pretty_good_measurement, split_operator, validate_povm};
use povm_forge::symmetry::{complex_orbit_bound, generate_group, orbit_sum, real_orbit_bound, symmetrize, MAX_ORDER};
use povm_forge::trines::*;
use povm_forge::{FiniteRep, HermitianMatrix, Povm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn within(name: &str, got: f64, want: f64, tol: f64) -> Result<String, String> {
    let msg = format!("{name} = {got:.6} (want {want} ± {tol:e})");
    if (got - want).abs() <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ensure(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

const ALPHA: f64 = 0.05;

fn criterion_1() -> Check {
    let opt = optimize_single_orbit(ALPHA).map_err(|e| e.to_string())?;
    let a = within("I", opt.info_bits, 0.8456, 5e-4)?;
    let b = within("b", opt.b, 0.1377, 2e-3)?;
    Ok(format!("{a}; {b}"))
}

fn criterion_2() -> Check {
    let lo = orbit_info(ALPHA, FRAC_PI_2, FRAC_PI_2).map_err(|e| e.to_string())?;
    let hi = orbit_info(ALPHA, 0.3831_f64.sqrt().acos(), 0.0).map_err(|e| e.to_string())?;
    let a = within("I(π/2, π/2)", lo, 0.15996, 5e-5)?;
    let b = within("I(arccos √0.3831, 0)", hi, 0.9499, 5e-4)?;
    Ok(format!("{a}; {b}"))
}

fn criterion_3() -> Check {
    let single = optimize_single_orbit(ALPHA).map_err(|e| e.to_string())?;
    let two = optimize_two_orbits(ALPHA).map_err(|e| e.to_string())?;
    // the reported pair of points combined with the weight from x-balance
    let lambda = konvex_lambda(0.0, 0.3831).unwrap();
    let at_points = lambda * orbit_info(ALPHA, FRAC_PI_2, FRAC_PI_2).map_err(|e| e.to_string())?
        + (1.0 - lambda) * orbit_info(ALPHA, 0.3831_f64.sqrt().acos(), 0.0).map_err(|e| e.to_string())?;
    let a = within("λ-combination at reported points", at_points, 0.8472, 5e-4)?;
    let b = within("best two-orbit value", two.info_bits, 0.8472, 5e-4)?;
    ensure(
        (two.lambda * two.first.x() + (1.0 - two.lambda) * two.second.x() - 1.0 / 3.0).abs() <= 1e-12,
        "two-orbit solution violates x-balance".into(),
    )?;
    ensure(
        two.info_bits > single.info_bits && at_points > single.info_bits,
        format!("two-orbit {} does not exceed single {}", two.info_bits, single.info_bits),
    )?;
    Ok(format!("{a}; {b}; λ = {:.4}; single = {:.6}", two.lambda, single.info_bits))
}

fn criterion_4() -> Check {
    let closed = double_trines_closed_form();
    let (raw, projected) = double_trines().map_err(|e| e.to_string())?;
    let opt = optimize_single_orbit(0.5).map_err(|e| e.to_string())?;
    let a = within("b*", opt.b, 0.0, 1e-6)?;
    let b = within("I* − closed form", opt.info_bits - closed, 0.0, 1e-9)?;
    let c = within("closed form", closed, 1.369, 1e-3)?;
    let mut parts = vec![a, b, c];
    for (name, s) in [("raw", &raw), ("projected", &projected)] {
        let pgm = pretty_good_measurement(s).map_err(|e| e.to_string())?;
        let i = mutual_information(s, &pgm).map_err(|e| e.to_string())?;
        parts.push(within(&format!("I(PGM {name}) − closed form"), i - closed, 0.0, 1e-6)?);
    }
    Ok(parts.join("; "))
}

fn criterion_5() -> Check {
    let hess = hessian_at(0.5, 1.0 / 3.0, 0.0, HESSIAN_STEP).map_err(|e| e.to_string())?;
    let [hx, hb] = double_trines_hessian_closed_form();
    let a = within("∂²I/∂x²", hess[0][0], hx, 1e-2)?;
    let b = within("∂²I/∂b²", hess[1][1], hb, 1e-2)?;
    let ev = symmetric_eigenvalues_2x2(&hess);
    ensure(ev[1] < 0.0, format!("Hessian eigenvalues {ev:?} not both negative"))?;
    Ok(format!("{a}; {b}; eigenvalues ({:.4}, {:.4})", ev[0], ev[1]))
}

fn criterion_6() -> Check {
    let c3 = trine_group();
    let (cb, rb) = (
        complex_orbit_bound(&c3).map_err(|e| e.to_string())?,
        real_orbit_bound(&c3).map_err(|e| e.to_string())?,
    );
    ensure(cb == 3 && rb == 2, format!("C3: complex {cb}, real {rb}"))?;
    for d in 2..=4 {
        let g = FiniteRep::trivial(d);
        let (cb, rb) = (
            complex_orbit_bound(&g).map_err(|e| e.to_string())?,
            real_orbit_bound(&g).map_err(|e| e.to_string())?,
        );
        ensure(
            cb == d * d && rb == d * (d + 1) / 2,
            format!("trivial d={d}: complex {cb}, real {rb}"),
        )?;
    }
    Ok("C3 (3, 2); trivial d=2,3,4 (d², d(d+1)/2)".into())
}

const CASES: usize = 100;

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e57);
    let mut worst = [0.0_f64; 4];
    for d in [2, 3] {
        let group = generate_group(d, &[common::c3_generator(d)], MAX_ORDER).map_err(|e| e.to_string())?;
        for _ in 0..CASES {
            let m = rng.gen_range(1..=4);
            let s = common::random_ensemble(&mut rng, d, m);
            let n = rng.gen_range(1..=5);
            let p = common::random_povm(&mut rng, d, n, false);
            let q = common::random_povm(&mut rng, d, n, false);
            let lambda: f64 = rng.gen_range(0.0..=1.0);
            let ip = mutual_information(&s, &p).map_err(|e| e.to_string())?;
            let iq = mutual_information(&s, &q).map_err(|e| e.to_string())?;

            // additivity of the padded convex combination
            let c = convex_combine(&p, &q, lambda).map_err(|e| e.to_string())?;
            let ic = mutual_information(&s, &c).map_err(|e| e.to_string())?;
            worst[0] = worst[0].max((ic - (lambda * ip + (1.0 - lambda) * iq)).abs());

            // splitting one operator
            let idx = rng.gen_range(0..n);
            let split = split_operator(&p, idx, lambda).map_err(|e| e.to_string())?;
            worst[1] = worst[1].max((mutual_information(&s, &split).map_err(|e| e.to_string())? - ip).abs());

            // symmetrization under C3
            let k = rng.gen_range(1..=2);
            let sym_s = common::random_c3_ensemble(&mut rng, d, k);
            let sym_p = symmetrize(&p, &group).map_err(|e| e.to_string())?;
            let diff = mutual_information(&sym_s, &sym_p).map_err(|e| e.to_string())?
                - mutual_information(&sym_s, &p).map_err(|e| e.to_string())?;
            worst[2] = worst[2].max(diff.abs());

            // elementwise mixing is convex
            let mixed: Vec<HermitianMatrix> = p
                .ops()
                .iter()
                .zip(q.ops())
                .map(|(a, b)| &a.scale(lambda) + &b.scale(1.0 - lambda))
                .collect();
            let im = mutual_information(&s, &Povm::padded(mixed).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            worst[3] = worst[3].max(im - (lambda * ip + (1.0 - lambda) * iq));
        }
    }
    let msg = format!(
        "{} cases per d ∈ {{2,3}}: additivity {:.1e}, split {:.1e}, symmetrization {:.1e}, convexity excess {:.1e}",
        CASES, worst[0], worst[1], worst[2], worst[3]
    );
    ensure(worst[0] <= 1e-10 && worst[1] <= 1e-12 && worst[2] <= 1e-9 && worst[3] <= 1e-10, msg.clone())?;
    Ok(msg)
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xca7e);
    let mut leaves_checked = 0;
    for case in 0..200 {
        let n = rng.gen_range(1..=6);
        let p = common::random_povm(&mut rng, 2, n, case % 3 == 0);
        let norm = normalize_povm(&p).map_err(|e| e.to_string())?;
        let dec = decompose_identity(&norm).map_err(|e| e.to_string())?;
        let vertices = common::enumerate_vertices(&norm.normalized_ops);
        let (rows, target) = common::constraint_system(&norm.normalized_ops);
        let rank = numeric_rank(&dec.design, 1e-10);
        let wsum: f64 = dec.weights.iter().sum();
        ensure((wsum - 1.0).abs() <= 1e-10, format!("case {case}: weights sum {wsum}"))?;
        for (leaf, nu) in dec.solutions.iter().enumerate() {
            let support = dec.support(leaf).len();
            ensure(support <= rank, format!("case {case}: support {support} > rank {rank}"))?;
            let res = common::system_residual(&rows, &target, nu);
            ensure(res <= 1e-8, format!("case {case}: leaf residual {res:e}"))?;
            let matched = vertices
                .iter()
                .any(|v| v.iter().zip(nu).all(|(a, b)| (a - b).abs() <= 1e-7));
            ensure(matched, format!("case {case}: leaf {leaf} is not an enumerated vertex"))?;
            leaves_checked += 1;
        }
        let back = dec.recombine();
        let err = back.iter().zip(&norm.weights).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(err <= 1e-10, format!("case {case}: recombination error {err:e}"))?;
    }
    let mut pruned = 0;
    for case in 0..CASES {
        let d = [2, 3][case % 2];
        let (m, n) = (rng.gen_range(2..=4), rng.gen_range(d * d + 1..=d * d + 4));
        let s = common::random_ensemble(&mut rng, d, m);
        let p = common::random_povm(&mut rng, d, n, false);
        let out = prune_povm(&s, &p).map_err(|e| e.to_string())?;
        ensure(out.povm.len() <= d * d, format!("prune case {case}: {} ops", out.povm.len()))?;
        ensure(
            validate_povm(&out.povm, 1e-9).is_valid(),
            format!("prune case {case}: output does not validate"),
        )?;
        ensure(
            out.info_after >= out.info_before - 1e-9,
            format!("prune case {case}: {} < {}", out.info_after, out.info_before),
        )?;
        pruned += 1;
    }
    Ok(format!("{leaves_checked} leaves matched the vertex oracle; {pruned} pruned POVMs within d² ops"))
}

fn criterion_9() -> Check {
    let report = single_orbit_rank_argument(ALPHA).map_err(|e| e.to_string())?;
    let close = |v: &[f64; 3], w: [f64; 3]| v.iter().zip(w).all(|(a, b)| (a - b).abs() <= 5e-4);
    ensure(
        close(&report.first_vector, [0.2375, 0.0, 0.2375]),
        format!("first vector {:?}", report.first_vector),
    )?;
    ensure(
        close(&report.second_vector, [0.2724, 0.0199, 0.0199]),
        format!("second vector {:?}", report.second_vector),
    )?;
    ensure(!report.proportional, "vectors reported proportional".into())?;
    ensure(
        !vectors_proportional(&report.first_vector, &report.second_vector, 1e-9),
        "vectors proportional".into(),
    )?;
    let fmt = |v: &[f64; 3]| format!("({:.4}, {:.4}, {:.4})", v[0], v[1], v[2]);
    Ok(format!(
        "{} and {} are not proportional",
        fmt(&report.first_vector),
        fmt(&report.second_vector)
    ))
}

fn criterion_10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e);
    let g = trine_group();
    let r = trine_rotation();
    let r2 = &r * &r;
    let mut worst = 0.0_f64;
    for _ in 0..CASES {
        let a = rng.gen_range(0.0..PI);
        let b = rng.gen_range(0.0..2.0 * PI);
        let base = HermitianMatrix::real_projector(&psi(a, b));
        let x = a.cos().powi(2);
        let want = HermitianMatrix::diag(&[3.0 * x, 1.5 - 1.5 * x, 1.5 - 1.5 * x]);
        let direct = &(&base + &base.conjugate_by(&r)) + &base.conjugate_by(&r2);
        // orbit_sum averages over the group
        let via_group = orbit_sum(&base.scale(3.0), &g).map_err(|e| e.to_string())?;
        worst = worst.max(direct.max_abs_diff(&want)).max(via_group.max_abs_diff(&want));
    }
    let msg = format!("max deviation over {CASES} points: {worst:.1e}");
    ensure(worst <= 1e-10, msg.clone())?;
    Ok(msg)
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Check); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (k, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!("criterion {k:>2}: PASS  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {k:>2}: FAIL  {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
