//! Derivative-free 1-D maximization: uniform grid seeding followed by
//! golden-section refinement of every grid-local maximum.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on `[lo, hi]`, stopping when
/// the bracket is shorter than `tol`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    // the true maximum may sit on the original boundary
    if f1 > fx && f1 >= f2 {
        (x1, f1)
    } else if f2 > fx {
        (x2, f2)
    } else {
        (x, fx)
    }
}

/// `n` uniformly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Values closer than this count as ties; ties go to the smaller argument.
pub const TIE_TOL: f64 = 1e-12;

/// Global maximum over `[lo, hi]`: evaluate `grid` points, refine every
/// grid-local maximum by golden section within its neighbouring cells, and
/// return the best refined point. Ties are broken toward the smaller
/// argument so symmetric objectives give reproducible answers.
pub fn maximize_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize, tol: f64) -> (f64, f64) {
    let grid = grid.max(3);
    let xs = linspace(lo, hi, grid);
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = (xs[0], fs[0]);
    for k in 0..grid {
        let left = if k > 0 { fs[k - 1] } else { f64::NEG_INFINITY };
        let right = if k + 1 < grid { fs[k + 1] } else { f64::NEG_INFINITY };
        if fs[k] < left || fs[k] < right {
            continue;
        }
        let a = xs[k.saturating_sub(1)];
        let b = xs[(k + 1).min(grid - 1)];
        let cand = golden_section_max(&f, a, b, tol);
        let cand = if fs[k] > cand.1 { (xs[k], fs[k]) } else { cand };
        if cand.1 > best.1 + TIE_TOL || ((cand.1 - best.1).abs() <= TIE_TOL && cand.0 < best.0) {
            best = cand;
        }
    }
    best
}
