//! Clock-transition probing with the transfer and detection steps repeated.
//!
//! The clock state is long lived, so the observable is whether the Al⁺
//! state changed between consecutive experiments. A change is declared only
//! when both readouts of a cycle disagree with the previously accepted state.

use rand::Rng;

use super::shot::{sample_thermal, transfer_and_detect, BatchResult, ClockProbe, Outcome, ShotRecord};
use super::ProtocolConfig;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// State carried between consecutive clock experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClockSequence {
    /// True Al⁺ state (excited = ³P₀).
    pub al_excited: bool,
    /// State accepted from the last agreeing readout pair.
    pub accepted_excited: bool,
}

impl ClockSequence {
    pub fn new() -> Self {
        Self::default()
    }
}

/// One cycle: clock probe, then transfer and detection twice.
pub fn run_clock_shot<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    probe: &ClockProbe,
    seq: &mut ClockSequence,
    rng: &mut R,
) -> Result<ShotRecord> {
    config.validate()?;
    if !config.double_mapping {
        return Err(Error::Config("clock probing requires double_mapping = true".into()));
    }
    if !(probe.duration > 0.0 && probe.rabi_freq >= 0.0 && probe.detuning.is_finite()) {
        return Err(Error::Config(
            "clock probe needs positive duration and finite rates".into(),
        ));
    }
    let p = probe.excitation();
    if rng.random::<f64>() < p {
        seq.al_excited = !seq.al_excited;
    }
    let mut none = None;
    let mut read = |rng: &mut R| {
        let n = sample_thermal(config.bus_nbar(), rng);
        transfer_and_detect(config, seq.al_excited, n, rng, &mut none)
    };
    let r1 = read(rng);
    let r2 = read(rng);
    let change = r1 == r2 && r1 != seq.accepted_excited;
    if change {
        seq.accepted_excited = r1;
    }
    Ok(ShotRecord {
        outcome: if r2 { Outcome::Dark } else { Outcome::Bright },
        step_trace: None,
        rng_stream_id: 0,
        state_change: Some(change),
    })
}

/// Fraction of declared state changes over `n_shots` consecutive cycles.
/// The sequence is inherently serial, so it uses a single stream.
pub fn clock_batch(config: &ProtocolConfig, probe: &ClockProbe, n_shots: u64, seed: u64) -> Result<BatchResult> {
    if n_shots == 0 {
        return Err(Error::InsufficientData("batch needs at least one shot".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let mut seq = ClockSequence::new();
    let mut counts = 0;
    for _ in 0..n_shots {
        if run_clock_shot(config, probe, &mut seq, &mut rng)?.state_change == Some(true) {
            counts += 1;
        }
    }
    BatchResult::from_counts(counts, n_shots)
}

/// Probability that one readout reports the wrong state, from independent
/// flips with the given probabilities.
pub fn readout_error(flips: &[f64]) -> f64 {
    0.5 * (1.0 - flips.iter().map(|q| 1.0 - 2.0 * q).product::<f64>())
}

pub fn config_readout_error(config: &ProtocolConfig) -> f64 {
    readout_error(&[
        1.0 - config.carrier_pi_fidelity,
        1.0 - config.sideband_pi_fidelity,
        1.0 - config.mapping_pi_fidelity,
        config.detection_error,
    ])
}

/// Stationary false-change rate with no excitation and single readout.
pub fn single_mapping_false_change(eps: f64) -> f64 {
    2.0 * eps * (1.0 - eps)
}

/// Stationary false-change rate with no excitation and two agreeing readouts.
pub fn double_mapping_false_change(eps: f64) -> f64 {
    let a = eps * eps;
    let b = (1.0 - eps) * (1.0 - eps);
    2.0 * a * b / (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{run_shot, ProbeSpec};

    fn clock_cfg() -> ProtocolConfig {
        ProtocolConfig {
            double_mapping: true,
            ..ProtocolConfig::ideal()
        }
    }

    #[test]
    fn clock_without_double_mapping_rejected() {
        let mut r = stream_rng(0, 0);
        let probe = ClockProbe::pi_pulse(1e-3, 0.0);
        let err = run_shot(&ProtocolConfig::ideal(), &ProbeSpec::Clock(probe), &mut r);
        assert!(matches!(err, Err(Error::Config(_))));
        let mut seq = ClockSequence::new();
        assert!(matches!(
            run_clock_shot(&ProtocolConfig::ideal(), &probe, &mut seq, &mut r),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn no_excitation_no_change() {
        let probe = ClockProbe {
            rabi_freq: 0.0,
            detuning: 0.0,
            duration: 1e-3,
        };
        let b = clock_batch(&clock_cfg(), &probe, 2000, 1).unwrap();
        assert_eq!(b.counts, 0);
    }

    #[test]
    fn resonant_pi_always_changes() {
        let b = clock_batch(&clock_cfg(), &ClockProbe::pi_pulse(1e-3, 0.0), 500, 1).unwrap();
        assert_eq!(b.counts, 500);
    }

    #[test]
    fn double_mapping_suppresses_false_changes() {
        let cfg = ProtocolConfig {
            mapping_pi_fidelity: 0.9,
            ..clock_cfg()
        };
        let eps = config_readout_error(&cfg);
        assert!((eps - 0.1).abs() < 1e-12);
        let probe = ClockProbe {
            rabi_freq: 0.0,
            detuning: 0.0,
            duration: 1e-3,
        };
        let n = 200_000;
        let b = clock_batch(&cfg, &probe, n, 5).unwrap();
        let expect = double_mapping_false_change(eps);
        let sigma = (expect * (1.0 - expect) / n as f64).sqrt();
        assert!((b.p_hat - expect).abs() < 5.0 * sigma, "{} vs {}", b.p_hat, expect);
        assert!(expect < 0.2 * single_mapping_false_change(eps));
    }

    #[test]
    fn readout_error_composition() {
        assert_eq!(readout_error(&[]), 0.0);
        assert!((readout_error(&[0.1, 0.1]) - 0.18).abs() < 1e-12);
    }
}
