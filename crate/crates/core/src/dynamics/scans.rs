use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::master::{evolve, evolve_sampled, NoiseModel, Pulse, Sideband};
use super::state::{fock_cutoff, thermal_populations, QuantumState};
use crate::error::{Error, Result};

/// Excited population after a square pulse on a bare two-level system.
pub fn rabi_probability(rabi: f64, detuning: f64, duration: f64) -> f64 {
    let w2 = rabi * rabi + detuning * detuning;
    if w2 == 0.0 {
        return 0.0;
    }
    let s = (0.5 * w2.sqrt() * duration).sin();
    rabi * rabi / w2 * s * s
}

/// (duration, excitation) along one pulse.
pub fn rabi_curve(
    template: &Pulse,
    durations: &[f64],
    state0: &QuantumState,
    noise: &NoiseModel,
) -> Result<Vec<(f64, f64)>> {
    let states = evolve_sampled(state0, template, durations, noise)?;
    Ok(durations
        .iter()
        .zip(states)
        .map(|(&t, s)| (t, s.excited_population()))
        .collect())
}

/// Two equal pulses separated by free evolution, all at the template's detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseySequence {
    pub template: Pulse,
    pub pulse_duration: f64,
    pub wait: f64,
}

impl RamseySequence {
    /// π/2 pulses of length `pulse_duration`.
    pub fn half_pi(pulse_duration: f64, wait: f64) -> Self {
        let rabi = core::f64::consts::PI / (2.0 * pulse_duration);
        Self {
            template: Pulse::carrier(rabi, pulse_duration),
            pulse_duration,
            wait,
        }
    }

    pub fn pulses(&self, detuning: f64, phase: f64, wait: f64) -> [Pulse; 3] {
        let first = self
            .template
            .with_duration(self.pulse_duration)
            .with_detuning(detuning)
            .with_phase(0.0);
        [
            first,
            Pulse::wait(wait).with_detuning(detuning),
            first.with_phase(phase),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RamseyScan {
    /// rad/s
    Detuning(Vec<f64>),
    /// rad, second-pulse phase
    Phase(Vec<f64>),
    /// s; reports contrast instead of excitation
    WaitTime(Vec<f64>),
}

impl RamseyScan {
    pub fn values(&self) -> &[f64] {
        match self {
            RamseyScan::Detuning(v) | RamseyScan::Phase(v) | RamseyScan::WaitTime(v) => v,
        }
    }
}

pub fn ramsey_excitation(
    seq: &RamseySequence,
    detuning: f64,
    phase: f64,
    wait: f64,
    state0: &QuantumState,
    noise: &NoiseModel,
) -> Result<f64> {
    Ok(evolve(state0, &seq.pulses(detuning, phase, wait), noise)?.excited_population())
}

/// Fringe amplitude from four phase settings of the second pulse,
/// √((P₀ − P_π)² + (P₋π/₂ − P₊π/₂)²).
pub fn ramsey_contrast(seq: &RamseySequence, wait: f64, state0: &QuantumState, noise: &NoiseModel) -> Result<f64> {
    use core::f64::consts::{FRAC_PI_2, PI};
    let det = seq.template.detuning;
    let p = |phi| ramsey_excitation(seq, det, phi, wait, state0, noise);
    let a = p(0.0)? - p(PI)?;
    let b = p(-FRAC_PI_2)? - p(FRAC_PI_2)?;
    Ok(a.hypot(b))
}

/// One point of a Ramsey scan.
pub fn ramsey_point(
    seq: &RamseySequence,
    scan: &RamseyScan,
    x: f64,
    state0: &QuantumState,
    noise: &NoiseModel,
) -> Result<f64> {
    match scan {
        RamseyScan::Detuning(_) => ramsey_excitation(seq, x, 0.0, seq.wait, state0, noise),
        RamseyScan::Phase(_) => ramsey_excitation(seq, seq.template.detuning, x, seq.wait, state0, noise),
        RamseyScan::WaitTime(_) => ramsey_contrast(seq, x, state0, noise),
    }
}

pub fn ramsey_scan(
    seq: &RamseySequence,
    scan: &RamseyScan,
    state0: &QuantumState,
    noise: &NoiseModel,
) -> Result<Vec<(f64, f64)>> {
    if scan.values().is_empty() {
        return Err(Error::InsufficientData("empty Ramsey scan".into()));
    }
    scan.values()
        .iter()
        .map(|&x| Ok((x, ramsey_point(seq, scan, x, state0, noise)?)))
        .collect()
}

/// Scales the fringe about one half: 0.5 + c·(P − 0.5).
pub fn apply_contrast_factor(p: f64, factor: f64) -> f64 {
    0.5 + factor * (p - 0.5)
}

/// One motional mode as seen by the probed ion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoupling {
    /// Hz
    pub frequency: f64,
    pub lamb_dicke: f64,
    pub nbar: f64,
    /// phonons/s
    pub heating_rate: f64,
}

/// Residual detunings beyond this many effective Rabi frequencies use the
/// coherent closed form; the line there is far in its Lorentzian wing.
const FAR_WING: f64 = 50.0;

fn resonance_excitation(
    probe: &Pulse,
    sideband: Sideband,
    residual: f64,
    mode: Option<&ModeCoupling>,
    noise: &NoiseModel,
) -> Result<f64> {
    let (nbar, eta, heating) = match mode {
        Some(m) => (m.nbar, m.lamb_dicke, m.heating_rate),
        None => (0.0, 0.0, 0.0),
    };
    let mut pulse = *probe;
    pulse.sideband = sideband;
    pulse.detuning = residual;
    if sideband != Sideband::Carrier {
        pulse.lamb_dicke = eta;
        if eta == 0.0 {
            return Ok(0.0);
        }
    }
    let omega = pulse.effective_rabi();
    if omega == 0.0 {
        return Ok(0.0);
    }
    let n_max = if sideband == Sideband::Carrier {
        0
    } else {
        fock_cutoff(nbar)
    };
    let (pn, _) = thermal_populations(nbar, n_max);
    let heating = if sideband == Sideband::Carrier { 0.0 } else { heating };
    let coherent = noise.spontaneous_decay_rate == 0.0
        && noise.laser_dephasing_rate == 0.0
        && noise.drift_rate == 0.0
        && heating == 0.0;
    // without dissipation each |n⟩ manifold is an exact two-level problem
    if coherent || residual.abs() > FAR_WING * omega.abs() * ((n_max + 1) as f64).sqrt() {
        let detuning = residual - pulse.light_shift;
        let p = pn
            .iter()
            .enumerate()
            .map(|(n, w)| {
                let k = match sideband {
                    Sideband::Carrier => 1.0,
                    Sideband::Blue => ((n + 1) as f64).sqrt(),
                    Sideband::Red => (n as f64).sqrt(),
                };
                w * rabi_probability(omega * k, detuning, pulse.duration)
            })
            .sum();
        return Ok(p);
    }
    let noise = NoiseModel {
        heating_rate: heating,
        ..*noise
    };
    let state = QuantumState::thermal_with_cutoff(nbar, n_max)?;
    Ok(evolve(&state, &[pulse], &noise)?.excited_population())
}

/// Excitation at one probe detuning (rad/s): carrier plus first red and blue
/// sidebands of each mode, each evolved on its own and combined as
/// 1 − Π(1 − P_k).
pub fn spectrum_point(probe: &Pulse, detuning: f64, modes: &[ModeCoupling], noise: &NoiseModel) -> Result<f64> {
    let tau = core::f64::consts::TAU;
    let mut dark = 1.0 - resonance_excitation(probe, Sideband::Carrier, detuning, None, noise)?;
    for m in modes {
        let w = tau * m.frequency;
        dark *= 1.0 - resonance_excitation(probe, Sideband::Blue, detuning - w, Some(m), noise)?;
        dark *= 1.0 - resonance_excitation(probe, Sideband::Red, detuning + w, Some(m), noise)?;
    }
    Ok(1.0 - dark)
}

pub fn spectrum_scan(
    probe: &Pulse,
    detunings: &[f64],
    modes: &[ModeCoupling],
    noise: &NoiseModel,
) -> Result<Vec<(f64, f64)>> {
    detunings
        .iter()
        .map(|&d| Ok((d, spectrum_point(probe, d, modes, noise)?)))
        .collect()
}

/// Full width at half maximum of the highest peak, linear interpolation
/// between samples. Requires the curve to fall below half on both sides.
pub fn fwhm(curve: &[(f64, f64)]) -> Result<f64> {
    if curve.len() < 3 {
        return Err(Error::InsufficientData("need at least three samples".into()));
    }
    let (imax, &(_, ymax)) = curve
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty");
    let half = 0.5 * ymax;
    let cross = |a: (f64, f64), b: (f64, f64)| a.0 + (half - a.1) * (b.0 - a.0) / (b.1 - a.1);
    let left = (1..=imax)
        .rev()
        .find(|&i| curve[i - 1].1 < half)
        .map(|i| cross(curve[i - 1], curve[i]));
    let right = (imax..curve.len() - 1)
        .find(|&i| curve[i + 1].1 < half)
        .map(|i| cross(curve[i], curve[i + 1]));
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::InsufficientData(
            "peak not bracketed by half-maximum crossings".into(),
        )),
    }
}

/// Local maxima above `threshold`, as x positions.
pub fn find_peaks(curve: &[(f64, f64)], threshold: f64) -> Vec<f64> {
    curve
        .windows(3)
        .filter(|w| w[1].1 > threshold && w[1].1 >= w[0].1 && w[1].1 > w[2].1)
        .map(|w| w[1].0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{PI, TAU};

    #[test]
    fn carrier_rabi_matches_formula() {
        let w = TAU * 125e3;
        let ts: Vec<f64> = (0..40).map(|i| i as f64 * 0.5e-6).collect();
        let c = rabi_curve(
            &Pulse::carrier(w, 0.0),
            &ts,
            &QuantumState::ground(5),
            &NoiseModel::ideal(),
        )
        .unwrap();
        assert_eq!(c[0].1, 0.0);
        for (t, p) in c {
            assert!((p - (0.5 * w * t).sin().powi(2)).abs() < 1e-6);
        }
    }

    #[test]
    fn phase_scan_ideal() {
        let seq = RamseySequence::half_pi(10e-6, 50e-6);
        let phases: Vec<f64> = (0..9).map(|i| i as f64 * PI / 4.0).collect();
        let c = ramsey_scan(
            &seq,
            &RamseyScan::Phase(phases),
            &QuantumState::ground(0),
            &NoiseModel::ideal(),
        )
        .unwrap();
        for (phi, p) in c {
            assert!((p - 0.5 * (1.0 + phi.cos())).abs() < 1e-6, "{phi}: {p}");
        }
    }

    #[test]
    fn empty_scan_rejected() {
        let seq = RamseySequence::half_pi(10e-6, 50e-6);
        let r = ramsey_scan(
            &seq,
            &RamseyScan::Detuning(Vec::new()),
            &QuantumState::ground(0),
            &NoiseModel::ideal(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn positive_detuning_tilts_fringe() {
        use core::f64::consts::FRAC_PI_2;
        let seq = RamseySequence::half_pi(50e-6, 200e-6);
        let s = QuantumState::ground(0);
        let d = TAU * 300.0;
        let minus = ramsey_excitation(&seq, d, -FRAC_PI_2, 200e-6, &s, &NoiseModel::ideal()).unwrap();
        let plus = ramsey_excitation(&seq, d, FRAC_PI_2, 200e-6, &s, &NoiseModel::ideal()).unwrap();
        assert!(minus - plus > 0.1, "{minus} {plus}");
    }

    #[test]
    fn coherent_sideband_closed_form_matches_master_equation() {
        let probe = Pulse::carrier(TAU * 100e3, 40e-6);
        let mode = ModeCoupling {
            frequency: 888e3,
            lamb_dicke: 0.1,
            nbar: 0.3,
            heating_rate: 0.0,
        };
        for residual in [0.0, TAU * 3e3, -TAU * 11e3] {
            let closed =
                resonance_excitation(&probe, Sideband::Blue, residual, Some(&mode), &NoiseModel::ideal()).unwrap();
            let n_max = fock_cutoff(mode.nbar);
            let mut pulse = probe;
            pulse.sideband = Sideband::Blue;
            pulse.lamb_dicke = mode.lamb_dicke;
            pulse.detuning = residual;
            // a vanishing heating rate forces the integrator path
            let noise = NoiseModel {
                heating_rate: 1e-300,
                ..NoiseModel::ideal()
            };
            let me = evolve(
                &QuantumState::thermal_with_cutoff(mode.nbar, n_max).unwrap(),
                &[pulse],
                &noise,
            )
            .unwrap()
            .excited_population();
            assert!((closed - me).abs() < 1e-4, "{residual}: {closed} vs {me}");
        }
    }

    #[test]
    fn zero_lamb_dicke_leaves_only_carrier() {
        let probe = Pulse::carrier(TAU * 20e3, 25e-6);
        let modes = [ModeCoupling {
            frequency: 888e3,
            lamb_dicke: 0.0,
            nbar: 0.05,
            heating_rate: 0.0,
        }];
        let at_sb = spectrum_point(&probe, TAU * 888e3, &modes, &NoiseModel::ideal()).unwrap();
        let carrier_only = rabi_probability(TAU * 20e3, TAU * 888e3, 25e-6);
        assert!((at_sb - carrier_only).abs() < 1e-6);
        assert!(spectrum_point(&probe, 0.0, &modes, &NoiseModel::ideal()).unwrap() > 0.99);
    }

    #[test]
    fn closed_form_clock_line_width() {
        let t = 1e-3;
        let w = PI / t;
        let curve: Vec<(f64, f64)> = (-300..=300)
            .map(|i| {
                let f = i as f64 * 5.0;
                (f, rabi_probability(w, TAU * f, t))
            })
            .collect();
        let width = fwhm(&curve).unwrap();
        assert!((width - 799.0).abs() < 2.0, "{width}");
    }

    #[test]
    fn peaks_found() {
        let curve = [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 0.5), (4.0, 0.2)];
        assert_eq!(find_peaks(&curve, 0.1), [1.0, 3.0]);
        assert!(fwhm(&curve[..2]).is_err());
    }
}
