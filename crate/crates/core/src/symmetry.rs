//! Finite unitary representations given extensionally, orbits, and the
//! orbit-count bounds obtained from character sums.
//!
//! The Hermitian part of the commutant `Int(σ, σ)` has real dimension
//! `Σ m_i² = (1/|G|) Σ_g |χ(g)|²`. For a real orthogonal representation the
//! real symmetric commutant is the invariant subspace of `Sym²(V)`, whose
//! dimension is `(1/|G|) Σ_g (χ(g)² + χ(g²))/2`. Neither bound needs the
//! individual multiplicities.

use crate::error::{Error, Result};
use crate::hermitian::{sum_hermitian, ComplexMatrix, HermitianMatrix};
use crate::quantum::{Ensemble, Povm};

/// Tolerance for identifying two group elements.
pub const MATCH_TOL: f64 = 1e-8;
pub const UNITARY_TOL: f64 = 1e-9;
pub const MAX_ORDER: usize = 10_000;
/// Tolerance for deduplicating orbit elements.
pub const DEDUP_TOL: f64 = 1e-9;
const INTEGER_TOL: f64 = 1e-6;

/// A finite group as the full list of its unitary matrices. Element 0 is
/// the identity; the rest follow breadth-first discovery order.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRep {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl FiniteRep {
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            elements: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Index of the element matching `m` within [`MATCH_TOL`].
    pub fn position(&self, m: &ComplexMatrix) -> Option<usize> {
        self.elements.iter().position(|g| g.max_abs_diff(m) <= MATCH_TOL)
    }

    /// Characters `χ(g) = tr σ(g)` in element order.
    pub fn characters(&self) -> Vec<num_complex::Complex64> {
        self.elements.iter().map(ComplexMatrix::trace).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.elements.iter().map(ComplexMatrix::max_imag).fold(0.0, f64::max)
    }

    /// Largest distance of any product `gh` from the element list.
    pub fn closure_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for g in &self.elements {
            for h in &self.elements {
                let gh = g * h;
                let d = self
                    .elements
                    .iter()
                    .map(|k| k.max_abs_diff(&gh))
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Breadth-first closure of the generators under right multiplication.
pub fn generate_group(dim: usize, generators: &[ComplexMatrix], max_order: usize) -> Result<FiniteRep> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    for (index, g) in generators.iter().enumerate() {
        if g.rows() != dim || g.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: g.rows(),
            });
        }
        let defect = g.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary { index, defect });
        }
    }
    let mut rep = FiniteRep::trivial(dim);
    let mut next = 0;
    while next < rep.elements.len() {
        let g = rep.elements[next].clone();
        for s in generators {
            let h = &g * s;
            if rep.position(&h).is_none() {
                if rep.elements.len() >= max_order {
                    return Err(Error::GroupNotFinite(max_order));
                }
                rep.elements.push(h);
            }
        }
        next += 1;
    }
    Ok(rep)
}

fn check_dim(rep: &FiniteRep, d: usize) -> Result<()> {
    if rep.dim != d {
        return Err(Error::DimensionMismatch {
            expected: rep.dim,
            got: d,
        });
    }
    Ok(())
}

/// `(1/|G|) σ(g) op σ(g)†` for every g, in element order (no deduplication).
pub fn orbit_elements(op: &HermitianMatrix, rep: &FiniteRep) -> Result<Vec<HermitianMatrix>> {
    check_dim(rep, op.dim())?;
    let w = 1.0 / rep.order() as f64;
    Ok(rep.elements.iter().map(|g| op.conjugate_by(g).scale(w)).collect())
}

/// The orbit set of one operator, deduplicated.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub base: HermitianMatrix,
    pub elements: Vec<HermitianMatrix>,
}

pub fn orbit(base: &HermitianMatrix, rep: &FiniteRep) -> Result<Orbit> {
    let mut elements: Vec<HermitianMatrix> = Vec::new();
    for e in orbit_elements(base, rep)? {
        if !elements.iter().any(|x| x.max_abs_diff(&e) <= DEDUP_TOL) {
            elements.push(e);
        }
    }
    Ok(Orbit {
        base: base.clone(),
        elements,
    })
}

/// `P^G = {(1/|G|) σ(g) Π σ(g)† : g ∈ G, Π ∈ P}` as a multiset of
/// `|G|·|P|` operators, grouped by input operator.
pub fn symmetrize(p: &Povm, rep: &FiniteRep) -> Result<Povm> {
    check_dim(rep, p.dim())?;
    let mut ops = Vec::with_capacity(p.len() * rep.order());
    for op in p.ops() {
        ops.extend(orbit_elements(op, rep)?);
    }
    if p.allows_zero() {
        Povm::padded(ops)
    } else {
        Povm::new(ops)
    }
}

/// `D = (1/|G|) Σ_g σ(g) op σ(g)†`, which commutes with the representation.
pub fn orbit_sum(op: &HermitianMatrix, rep: &FiniteRep) -> Result<HermitianMatrix> {
    let elems = orbit_elements(op, rep)?;
    Ok(sum_hermitian(elems.iter(), op.dim()))
}

fn nearest_integer(sum: f64) -> Result<usize> {
    let rounded = sum.round();
    if (sum - rounded).abs() > INTEGER_TOL || rounded < 1.0 {
        return Err(Error::ClosureDefect(sum));
    }
    Ok(rounded as usize)
}

/// `Σ m_i²`, the real dimension of the Hermitian commutant.
pub fn complex_orbit_bound(rep: &FiniteRep) -> Result<usize> {
    let total: f64 = rep.characters().iter().map(|c| c.norm_sqr()).sum();
    nearest_integer(total / rep.order() as f64)
}

/// Dimension of the real symmetric commutant of a real orthogonal
/// representation.
pub fn real_orbit_bound(rep: &FiniteRep) -> Result<usize> {
    let imag = rep.max_imag();
    if imag > UNITARY_TOL {
        return Err(Error::RealRepRequired(imag));
    }
    let mut total = 0.0;
    for g in &rep.elements {
        let chi = g.trace().re;
        let chi_sq = (g * g).trace().re;
        total += 0.5 * (chi * chi + chi_sq);
    }
    nearest_integer(total / rep.order() as f64)
}

/// True iff conjugation by every group element maps each state onto some
/// state of the ensemble carrying the same prior.
pub fn is_symmetric_ensemble(s: &Ensemble, rep: &FiniteRep, tol: f64) -> bool {
    if s.dim() != rep.dim {
        return false;
    }
    rep.elements.iter().all(|g| {
        s.states().iter().zip(s.priors()).all(|(rho, &p)| {
            let image = rho.conjugate_by(g);
            s.states()
                .iter()
                .zip(s.priors())
                .any(|(other, &q)| other.max_abs_diff(&image) <= tol && (p - q).abs() <= tol)
        })
    })
}
