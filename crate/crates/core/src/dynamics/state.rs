use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Fock cutoff used for a thermal state of mean occupation `nbar`.
pub fn fock_cutoff(nbar: f64) -> usize {
    let scaled = (10.0 * nbar).ceil();
    if scaled.is_finite() && scaled > 5.0 {
        scaled as usize
    } else {
        5
    }
}

/// Thermal occupation probabilities for n = 0..=n_max, renormalised.
/// Also returns the discarded tail weight.
pub fn thermal_populations(nbar: f64, n_max: usize) -> (Vec<f64>, f64) {
    if nbar <= 0.0 {
        let mut p = alloc::vec![0.0; n_max + 1];
        p[0] = 1.0;
        return (p, 0.0);
    }
    let q = nbar / (nbar + 1.0);
    let p: Vec<f64> = (0..=n_max).map(|n| (1.0 - q) * q.powi(n as i32)).collect();
    let kept: f64 = p.iter().sum();
    (p.into_iter().map(|x| x / kept).collect(), 1.0 - kept)
}

/// Density matrix over {g, e} ⊗ {|0⟩ … |n_max⟩}; index = s·(n_max+1) + n.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_max: usize,
    rho: CMatrix,
}

impl QuantumState {
    pub fn dim_for(n_max: usize) -> usize {
        2 * (n_max + 1)
    }

    pub fn index(&self, excited: bool, n: usize) -> usize {
        excited as usize * (self.n_max + 1) + n
    }

    pub fn fock(excited: bool, n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::Domain(format!("Fock level {n} above cutoff {n_max}")));
        }
        let mut rho = CMatrix::zeros(Self::dim_for(n_max));
        let i = excited as usize * (n_max + 1) + n;
        rho[(i, i)] = C64::new(1.0, 0.0);
        Ok(Self { n_max, rho })
    }

    pub fn ground(n_max: usize) -> Self {
        Self::fock(false, 0, n_max).expect("n = 0 is always inside the cutoff")
    }

    /// Internal ground state with a thermal mode, cutoff from [`fock_cutoff`].
    pub fn thermal(nbar: f64) -> Result<Self> {
        Self::thermal_with_cutoff(nbar, fock_cutoff(nbar))
    }

    pub fn thermal_with_cutoff(nbar: f64, n_max: usize) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::Domain(format!("mean phonon number {nbar} invalid")));
        }
        let (p, tail) = thermal_populations(nbar, n_max);
        if tail > 1e-6 {
            log::warn!("thermal tail {tail:.2e} beyond n_max = {n_max} discarded");
        }
        let mut rho = CMatrix::zeros(Self::dim_for(n_max));
        for (n, pn) in p.into_iter().enumerate() {
            rho[(n, n)] = C64::new(pn, 0.0);
        }
        Ok(Self { n_max, rho })
    }

    pub fn from_density(n_max: usize, rho: CMatrix) -> Result<Self> {
        if rho.dim() != Self::dim_for(n_max) {
            return Err(Error::Domain(format!(
                "density matrix dimension {} does not match n_max = {n_max}",
                rho.dim()
            )));
        }
        let s = Self { n_max, rho };
        s.validate()?;
        Ok(s)
    }

    pub(crate) fn from_raw(n_max: usize, rho: CMatrix) -> Self {
        Self { n_max, rho }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn density_matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn basis_labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.dim());
        for s in ["g", "e"] {
            for n in 0..=self.n_max {
                out.push(format!("{s},{n}"));
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn excited_population(&self) -> f64 {
        (0..=self.n_max)
            .map(|n| self.rho[(self.index(true, n), self.index(true, n))].re)
            .sum()
    }

    pub fn fock_population(&self, n: usize) -> f64 {
        if n > self.n_max {
            return 0.0;
        }
        self.rho[(self.index(false, n), self.index(false, n))].re
            + self.rho[(self.index(true, n), self.index(true, n))].re
    }

    pub fn mean_phonon_number(&self) -> f64 {
        (0..=self.n_max).map(|n| n as f64 * self.fock_population(n)).sum()
    }

    /// Population in the highest retained Fock level.
    pub fn truncation_tail(&self) -> f64 {
        self.fock_population(self.n_max)
    }

    pub fn purity(&self) -> f64 {
        self.rho.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn trace_distance(&self, other: &Self) -> f64 {
        self.rho.trace_distance(&other.rho)
    }

    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!("trace {tr} deviates from 1")));
        }
        let h = self.rho.hermiticity_error();
        if h > 1e-12 {
            return Err(Error::Numerical(format!("density matrix not Hermitian ({h:.2e})")));
        }
        let lowest = self.rho.hermitian_eigenvalues()[0];
        if lowest < -1e-9 {
            return Err(Error::Numerical(format!("negative eigenvalue {lowest:.2e}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_rule() {
        assert_eq!(fock_cutoff(0.05), 5);
        assert_eq!(fock_cutoff(0.0), 5);
        assert_eq!(fock_cutoff(0.71), 8);
        assert_eq!(fock_cutoff(2.0), 20);
    }

    #[test]
    fn thermal_state_is_valid() {
        let s = QuantumState::thermal(0.05).unwrap();
        assert_eq!(s.dim(), 12);
        s.validate().unwrap();
        assert!((s.mean_phonon_number() - 0.05).abs() < 1e-6);
        assert!(s.truncation_tail() < 1e-6);
        assert_eq!(s.excited_population(), 0.0);
        assert_eq!(s.basis_labels()[7], "e,1");
    }

    #[test]
    fn fock_outside_cutoff_rejected() {
        assert!(QuantumState::fock(true, 6, 5).is_err());
        assert!(QuantumState::thermal(-1.0).is_err());
    }
}
