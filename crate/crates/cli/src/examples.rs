//! Built-in problem files (also the source of the bundled fixtures).

use clap::ValueEnum;
use povm_forge::hermitian::{inv_sqrt_psd, sum_hermitian, NULL_TOL};
use povm_forge::quantum::pretty_good_measurement;
use povm_forge::trines::{double_trines, lifted_trines, optimize_two_orbits, orbit_operators, trine_rotation};
use povm_forge::{ComplexMatrix, Ensemble, HermitianMatrix, Povm};

use crate::error::{usage, CliResult};
use crate::schema::ProblemFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    /// Lifted trines with the best two-orbit POVM and the C3 generator.
    LiftedTrines,
    /// Projected double trines with their pretty good measurement.
    DoubleTrines,
    /// Generator of the 120° rotation group of the trines (d = 3).
    TrineGroup,
    /// Two-dimensional irreducible representation of S3.
    S3Irrep,
    /// Empty generator list (trivial group).
    Trivial,
    /// Qubit POVM {|0⟩, |1⟩, |+⟩, |−⟩}/2 with the four matching states.
    PlusMinus,
    /// Seven-outcome qubit POVM on a deterministic spiral of Bloch vectors.
    SpiralQubit,
    /// The one-outcome POVM {I}.
    Identity,
}

fn two_orbit_povm(alpha: f64) -> CliResult<(Povm, f64)> {
    let sol = optimize_two_orbits(alpha)?;
    let mut ops: Vec<HermitianMatrix> = orbit_operators(sol.first.a, sol.first.b)
        .into_iter()
        .map(|o| o.scale(sol.lambda))
        .collect();
    ops.extend(orbit_operators(sol.second.a, sol.second.b).into_iter().map(|o| o.scale(1.0 - sol.lambda)));
    // drop an empty orbit when the optimum sits on x = 1/3
    ops.retain(|o| o.trace() > 1e-12);
    Ok((Povm::new(ops)?, sol.info_bits))
}

fn s3_generators() -> Vec<ComplexMatrix> {
    let (c, s) = (-0.5, 0.75_f64.sqrt());
    vec![
        ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]).expect("static"),
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).expect("static"),
    ]
}

/// Bloch-sphere spiral points turned into a POVM by `S^{-1/2} A_k S^{-1/2}`.
fn spiral_povm(n: usize) -> CliResult<Povm> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    let raw: Vec<HermitianMatrix> = (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            let (x, y) = (r * phi.cos(), r * phi.sin());
            // (I + r·σ)/2 with a weight varying along the spiral
            let w = 0.5 + 0.1 * k as f64;
            HermitianMatrix::hermitian_part(
                &ComplexMatrix::from_rows(&[
                    vec![povm_forge::c64::new(1.0 + z, 0.0), povm_forge::c64::new(x, -y)],
                    vec![povm_forge::c64::new(x, y), povm_forge::c64::new(1.0 - z, 0.0)],
                ])
                .expect("2×2"),
            )
            .scale(0.5 * w)
        })
        .collect();
    let s = sum_hermitian(raw.iter(), 2);
    let n_half = inv_sqrt_psd(&s, NULL_TOL)?;
    Ok(Povm::new(raw.iter().map(|a| a.conjugate_by(n_half.as_matrix())).collect())?)
}

pub fn build(name: ExampleName, alpha: f64, dim: usize) -> CliResult<ProblemFile> {
    let s = 0.5_f64.sqrt();
    Ok(match name {
        ExampleName::LiftedTrines => {
            let (p, info) = two_orbit_povm(alpha)?;
            ProblemFile::named(
                3,
                &format!("lifted_trines_{alpha}"),
                &format!("lifted trines, alpha = {alpha}; best-found two-orbit POVM ({info:.6} bit); C3 generator"),
            )
            .with_ensemble(&lifted_trines(alpha)?)
            .with_povm(&p)
            .with_generators(&[trine_rotation()])
        }
        ExampleName::DoubleTrines => {
            let (_, projected) = double_trines()?;
            ProblemFile::named(3, "double_trines", "double trines projected to d = 3; pretty good measurement; C3 generator")
                .with_povm(&pretty_good_measurement(&projected)?)
                .with_ensemble(&projected)
                .with_generators(&[trine_rotation()])
        }
        ExampleName::TrineGroup => {
            ProblemFile::named(3, "trine_group", "120 degree rotation about the first axis").with_generators(&[trine_rotation()])
        }
        ExampleName::S3Irrep => ProblemFile::named(2, "s3_irrep", "two-dimensional irreducible representation of S3")
            .with_generators(&s3_generators()),
        ExampleName::Trivial => {
            if dim == 0 {
                return Err(usage("--dim must be positive"));
            }
            ProblemFile::named(dim, &format!("trivial_d{dim}"), "trivial group (no generators)").with_generators(&[])
        }
        ExampleName::PlusMinus => {
            let projectors = vec![
                HermitianMatrix::real_projector(&[1.0, 0.0]),
                HermitianMatrix::real_projector(&[0.0, 1.0]),
                HermitianMatrix::real_projector(&[s, s]),
                HermitianMatrix::real_projector(&[s, -s]),
            ];
            let povm = Povm::new(projectors.iter().map(|p| p.scale(0.5)).collect())?;
            ProblemFile::named(2, "plus_minus", "qubit POVM from the Z and X bases, uniform ensemble of their eigenstates")
                .with_ensemble(&Ensemble::uniform(projectors)?)
                .with_povm(&povm)
        }
        ExampleName::SpiralQubit => {
            let states = vec![
                HermitianMatrix::real_projector(&[1.0, 0.0]),
                HermitianMatrix::real_projector(&[0.6, 0.8]),
                HermitianMatrix::diag(&[0.3, 0.7]),
            ];
            ProblemFile::named(2, "spiral_qubit", "seven-outcome qubit POVM on a Bloch-sphere spiral")
                .with_ensemble(&Ensemble::new(states, vec![0.5, 0.3, 0.2])?)
                .with_povm(&spiral_povm(7)?)
        }
        ExampleName::Identity => {
            if dim == 0 {
                return Err(usage("--dim must be positive"));
            }
            ProblemFile::named(dim, &format!("identity_d{dim}"), "the trivial one-outcome measurement")
                .with_povm(&Povm::new(vec![HermitianMatrix::identity(dim)])?)
        }
    })
}
