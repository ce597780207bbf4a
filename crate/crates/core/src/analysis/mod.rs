//! Fidelities, quality factors and parameter sweeps with CSV output.

mod csvio;
mod sweep;

pub use csvio::{read_csv, write_csv, SCHEMA_VERSION};
pub use sweep::{run_sweep, SweepOptions, SweepOutcome, SweepRecord};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::QuantumState;
use crate::scalar::Real;

/// `√⟨ψ|ρ|ψ⟩` for a density matrix, `|⟨ψ|φ⟩|` for a state vector.
pub fn fidelity<T: Real>(state: &QuantumState<T>, target: &QuantumState<f64>) -> Result<f64> {
    let psi = target
        .as_vector()
        .ok_or_else(|| Error::Params("fidelity target must be a state vector".into()))?;
    fidelity_to_vector(state, psi)
}

pub fn fidelity_to_vector<T: Real>(state: &QuantumState<T>, psi: &[Complex64]) -> Result<f64> {
    if state.dim() != psi.len() {
        return Err(Error::DimensionMismatch { left: state.dim(), right: psi.len() });
    }
    let to64 = |z: num_complex::Complex<T>| Complex64::new(z.re.to_f64_lossy(), z.im.to_f64_lossy());
    match state {
        QuantumState::Vector(phi) => Ok(psi.iter().zip(phi).map(|(a, b)| a.conj() * to64(*b)).sum::<Complex64>().norm()),
        QuantumState::Density(rho) => {
            let n = psi.len();
            let data = rho.data();
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, a) in psi.iter().enumerate() {
                if *a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row: Complex64 = data[i * n..(i + 1) * n].iter().zip(psi).map(|(r, b)| to64(*r) * b).sum();
                acc += a.conj() * row;
            }
            Ok(acc.re.max(0.0).sqrt())
        }
    }
}

/// `Q = ω_c / κ`.
pub fn quality_factor(omega_c: f64, kappa: f64) -> Result<f64> {
    if kappa == 0.0 {
        return Err(Error::DivisionByZero("quality factor is undefined for kappa = 0".into()));
    }
    Ok(omega_c / kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ghz;
    use crate::hilbert::DenseMatrix;

    fn ket(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn fidelity_trivial_cases() {
        let s = 0.5f64.sqrt();
        let psi = ket(&[s, s, 0.0, 0.0]);
        let target = QuantumState::vector(psi.clone()).unwrap();
        let rho = QuantumState::Density(DenseMatrix::outer(&psi));
        assert!((fidelity(&rho, &target).unwrap() - 1.0).abs() < 1e-12);
        let mixed = QuantumState::<f64>::maximally_mixed(4);
        assert!((fidelity(&mixed, &target).unwrap() - 0.5).abs() < 1e-12);
        let orth = QuantumState::vector(ket(&[s, -s, 0.0, 0.0])).unwrap();
        assert!(fidelity(&orth, &target).unwrap() < 1e-12);
        let wrong = QuantumState::vector(ket(&[1.0, 0.0])).unwrap();
        assert!(matches!(fidelity(&wrong, &target), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn fidelity_ignores_global_phase_of_vectors() {
        let s = 0.5f64.sqrt();
        let target = QuantumState::vector(ket(&[s, s])).unwrap();
        let phased = QuantumState::vector(vec![Complex64::new(0.0, s), Complex64::new(0.0, s)]).unwrap();
        assert!((fidelity(&phased, &target).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quality_factors_of_the_example_cavities() {
        let kappa = 1.0 / 10.0;
        let q1 = quality_factor(ghz(6.6), kappa).unwrap();
        let q2 = quality_factor(ghz(6.62), kappa).unwrap();
        assert!((q1 / 4.14e5 - 1.0).abs() < 0.01, "{q1}");
        assert!((q2 / 4.16e5 - 1.0).abs() < 0.01, "{q2}");
        assert!((quality_factor(ghz(6.6), 2.0 * kappa).unwrap() - q1 / 2.0).abs() < 1e-6);
        assert!(matches!(quality_factor(ghz(6.6), 0.0), Err(Error::DivisionByZero(_))));
    }
}
