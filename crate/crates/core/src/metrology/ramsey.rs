//! Detuning and contrast from four-phase Ramsey data.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PhaseCount {
    pub excited: u32,
    pub total: u32,
}

impl PhaseCount {
    pub fn new(excited: u32, total: u32) -> Self {
        Self { excited, total }
    }

    pub fn p(&self) -> f64 {
        self.excited as f64 / self.total as f64
    }

    pub fn variance(&self) -> f64 {
        let p = self.p();
        p * (1.0 - p) / self.total as f64
    }
}

/// Counts with the second π/2 pulse shifted by 0, +π/2, −π/2 and π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyPhaseSet {
    pub zero: PhaseCount,
    pub plus_half_pi: PhaseCount,
    pub minus_half_pi: PhaseCount,
    pub pi: PhaseCount,
    /// s
    pub t_pulse: f64,
    /// s
    pub t_wait: f64,
}

impl RamseyPhaseSet {
    pub fn validate(&self) -> Result<()> {
        for c in [self.zero, self.plus_half_pi, self.minus_half_pi, self.pi] {
            if c.total == 0 {
                return Err(Error::InsufficientData("phase setting without shots".into()));
            }
            if c.excited > c.total {
                return Err(Error::Domain(alloc::format!(
                    "{} excited out of {} shots",
                    c.excited,
                    c.total
                )));
            }
        }
        if !(self.t_pulse >= 0.0 && self.t_wait >= 0.0) {
            return Err(Error::Domain("pulse and wait times must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyEstimate {
    /// Hz, laser minus atom.
    pub detuning: f64,
    pub detuning_sigma: f64,
    pub contrast: f64,
    pub contrast_sigma: f64,
}

/// T + 4t/π for square π/2 pulses, or just T.
pub fn effective_wait(t_pulse: f64, t_wait: f64, finite_pulse_correction: bool) -> f64 {
    if finite_pulse_correction {
        t_wait + 4.0 * t_pulse / PI
    } else {
        t_wait
    }
}

pub fn estimate_detuning_contrast(set: &RamseyPhaseSet) -> Result<RamseyEstimate> {
    estimate_detuning_contrast_with(set, true)
}

/// The contrast is the fringe amplitude √((p₀ − p_π)² + (p₋ − p₊)²), which
/// keeps the phase estimate unbiased away from δ = 0.
pub fn estimate_detuning_contrast_with(set: &RamseyPhaseSet, finite_pulse_correction: bool) -> Result<RamseyEstimate> {
    set.validate()?;
    let a = set.zero.p() - set.pi.p();
    let b = set.minus_half_pi.p() - set.plus_half_pi.p();
    let var_a = set.zero.variance() + set.pi.variance();
    let var_b = set.minus_half_pi.variance() + set.plus_half_pi.variance();
    let c = a.hypot(b);
    if !(c > 0.0) {
        return Err(Error::DegenerateContrast(c));
    }
    if a <= 0.0 {
        return Err(Error::OutOfRange(alloc::format!(
            "accumulated phase beyond ±π/2 (p0 − pπ = {a:.3})"
        )));
    }
    let t_eff = effective_wait(set.t_pulse, set.t_wait, finite_pulse_correction);
    let phase = (b / c).asin();
    let c2 = c * c;
    let var_phase = (b * b * var_a + a * a * var_b) / (c2 * c2);
    let var_c = (a * a * var_a + b * b * var_b) / c2;
    let scale = 1.0 / (2.0 * PI * t_eff);
    Ok(RamseyEstimate {
        detuning: phase * scale,
        detuning_sigma: var_phase.sqrt() * scale,
        contrast: c,
        contrast_sigma: var_c.sqrt(),
    })
}

/// δ = asin(Δp / C) / (2π T_eff) for an externally known contrast.
pub fn detuning_from_fringe(contrast: f64, diff: f64, t_pulse: f64, t_wait: f64) -> Result<f64> {
    if !(contrast > 0.0) {
        return Err(Error::DegenerateContrast(contrast));
    }
    let arg = diff / contrast;
    if arg.abs() > 1.0 {
        return Err(Error::OutOfRange(alloc::format!("asin argument {arg} outside [-1, 1]")));
    }
    Ok(arg.asin() / (2.0 * PI * effective_wait(t_pulse, t_wait, true)))
}

/// Excitation probabilities at the four phases of an ideal fringe with
/// contrast `c`, offset `mid` and detuning `delta` (Hz).
pub fn ideal_phase_probabilities(delta: f64, c: f64, mid: f64, t_pulse: f64, t_wait: f64) -> [f64; 4] {
    let phi = 2.0 * PI * delta * effective_wait(t_pulse, t_wait, true);
    let p = |shift: f64| mid + 0.5 * c * (phi + shift).cos();
    // order: 0, +π/2, −π/2, π
    [p(0.0), p(PI / 2.0), p(-PI / 2.0), p(PI)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set_from(p: [f64; 4], n: u32, t: f64, wait: f64) -> RamseyPhaseSet {
        let c = |p: f64| PhaseCount::new((p * n as f64).round() as u32, n);
        RamseyPhaseSet {
            zero: c(p[0]),
            plus_half_pi: c(p[1]),
            minus_half_pi: c(p[2]),
            pi: c(p[3]),
            t_pulse: t,
            t_wait: wait,
        }
    }

    #[test]
    fn symmetric_fringe() {
        let s = set_from([0.905, 0.5, 0.5, 0.095], 1000, 50e-6, 200e-6);
        let e = estimate_detuning_contrast(&s).unwrap();
        assert_eq!(e.detuning, 0.0);
        assert!((e.contrast - 0.81).abs() < 1e-12);
        assert!(e.contrast_sigma > 0.0);
    }

    #[test]
    fn fringe_helper_value() {
        let d = detuning_from_fringe(0.8, 0.4, 50e-6, 100e-6).unwrap();
        assert!((d - 509.2).abs() < 0.1, "{d}");
        assert!(matches!(
            detuning_from_fringe(0.3, 0.4, 50e-6, 100e-6),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn flat_fringe_degenerate() {
        let s = set_from([0.5; 4], 100, 50e-6, 100e-6);
        assert!(matches!(
            estimate_detuning_contrast(&s),
            Err(Error::DegenerateContrast(_))
        ));
    }

    #[test]
    fn ideal_probabilities_round_trip() {
        let p = ideal_phase_probabilities(509.2, 0.8, 0.5, 50e-6, 100e-6);
        let s = set_from(p, 1_000_000, 50e-6, 100e-6);
        let e = estimate_detuning_contrast(&s).unwrap();
        assert!((e.detuning - 509.2).abs() < 1.0, "{}", e.detuning);
        assert!((e.contrast - 0.8).abs() < 1e-3);
    }

    #[test]
    fn empty_setting_rejected() {
        let mut s = set_from([0.9, 0.5, 0.5, 0.1], 100, 50e-6, 100e-6);
        s.pi.total = 0;
        assert!(matches!(
            estimate_detuning_contrast(&s),
            Err(Error::InsufficientData(_))
        ));
    }
}
