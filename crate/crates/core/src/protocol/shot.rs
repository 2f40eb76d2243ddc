//! Single experimental cycles and batches of them.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::ProtocolConfig;
use crate::dynamics::{evolve, rabi_probability, ramsey_excitation, NoiseModel, Pulse, QuantumState, RamseySequence};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    /// Ca⁺ fluoresces: found in S₁/₂.
    Bright,
    /// Ca⁺ shelved in D₅/₂.
    Dark,
}

impl Outcome {
    pub fn is_dark(self) -> bool {
        matches!(self, Outcome::Dark)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolStep {
    Cooling,
    LogicPrep,
    Probe,
    Transfer,
    Mapping,
    Detection,
}

/// Populations of one trajectory after a protocol step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPopulation {
    pub step: ProtocolStep,
    pub al_excited: f64,
    pub ca_shelved: f64,
    pub phonons: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    pub outcome: Outcome,
    pub step_trace: Option<Vec<StepPopulation>>,
    pub rng_stream_id: u64,
    /// Set by clock shots: whether a change of the Al⁺ state was declared.
    pub state_change: Option<bool>,
}

/// What step (iv) does to the spectroscopy ion.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeSpec {
    /// A known excitation probability.
    Excitation(f64),
    SinglePulse {
        pulse: Pulse,
        noise: NoiseModel,
    },
    Ramsey {
        sequence: RamseySequence,
        detuning: f64,
        phase: f64,
        noise: NoiseModel,
    },
    /// Rabi pulse on the clock transition. Requires double mapping.
    Clock(ClockProbe),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockProbe {
    /// rad/s
    pub rabi_freq: f64,
    /// rad/s
    pub detuning: f64,
    /// s
    pub duration: f64,
}

impl ClockProbe {
    /// A π-pulse of length `duration` at the given detuning.
    pub fn pi_pulse(duration: f64, detuning: f64) -> Self {
        Self {
            rabi_freq: core::f64::consts::PI / duration,
            detuning,
            duration,
        }
    }

    pub fn excitation(&self) -> f64 {
        rabi_probability(self.rabi_freq, self.detuning, self.duration)
    }
}

impl ProbeSpec {
    pub fn is_clock(&self) -> bool {
        matches!(self, ProbeSpec::Clock(_))
    }

    /// Al⁺ excitation probability after the probe.
    pub fn resolve(&self) -> Result<f64> {
        let p = match self {
            ProbeSpec::Excitation(p) => *p,
            ProbeSpec::SinglePulse { pulse, noise } => {
                evolve(&initial_state(noise)?, core::slice::from_ref(pulse), noise)?.excited_population()
            }
            ProbeSpec::Ramsey {
                sequence,
                detuning,
                phase,
                noise,
            } => ramsey_excitation(
                sequence,
                *detuning,
                *phase,
                sequence.wait,
                &initial_state(noise)?,
                noise,
            )?,
            ProbeSpec::Clock(c) => c.excitation(),
        };
        if !(-1e-9..=1.0 + 1e-9).contains(&p) {
            return Err(Error::Numerical(alloc::format!("probe excitation {p} outside [0, 1]")));
        }
        Ok(p.clamp(0.0, 1.0))
    }
}

fn initial_state(noise: &NoiseModel) -> Result<QuantumState> {
    if noise.thermal_nbar > 0.0 {
        QuantumState::thermal(noise.thermal_nbar)
    } else {
        Ok(QuantumState::ground(0))
    }
}

/// Thermal phonon number with mean `nbar`.
pub(crate) fn sample_thermal<R: Rng + ?Sized>(nbar: f64, rng: &mut R) -> u32 {
    if nbar <= 0.0 {
        return 0;
    }
    let q = 1.0 / (1.0 + nbar);
    match Geometric::new(q) {
        Ok(g) => g.sample(rng).min(u32::MAX as u64) as u32,
        Err(_) => 0,
    }
}

/// Blue-sideband π-pulse calibrated on n = 0 → 1, applied to |n⟩.
fn sideband_transfer(n: u32) -> f64 {
    let s = (core::f64::consts::FRAC_PI_2 * (n as f64).sqrt()).sin();
    s * s
}

/// Steps (v) and (vi) for a given Al⁺ state. Returns Ca⁺ shelved (dark) and
/// appends to the trace when one is kept.
pub(crate) fn transfer_and_detect<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    al_excited: bool,
    phonons: u32,
    rng: &mut R,
    trace: &mut Option<Vec<StepPopulation>>,
) -> bool {
    let flip = |rng: &mut R, fidelity: f64| fidelity < 1.0 && rng.random::<f64>() >= fidelity;
    let push = |trace: &mut Option<Vec<StepPopulation>>, step, al: bool, ca: bool, n: u32| {
        if let Some(t) = trace {
            t.push(StepPopulation {
                step,
                al_excited: al as u8 as f64,
                ca_shelved: ca as u8 as f64,
                phonons: n,
            });
        }
    };

    // Al⁺ blue sideband on the bus mode.
    let mut al = al_excited;
    let mut n = phonons;
    if !al {
        if rng.random::<f64>() < sideband_transfer(n + 1) {
            al = true;
            n += 1;
        }
    } else if n > 0 && rng.random::<f64>() < sideband_transfer(n) {
        al = false;
        n -= 1;
    }
    push(trace, ProtocolStep::Transfer, al, true, n);

    // Ca⁺ blue sideband from D₅/₂ back to S₁/₂ removes one phonon.
    let mut ca = true;
    if n > 0 && rng.random::<f64>() < sideband_transfer(n) {
        ca = false;
        n -= 1;
    }
    push(trace, ProtocolStep::Mapping, al, ca, n);

    let mut dark = ca;
    if flip(rng, config.carrier_pi_fidelity) {
        dark = !dark;
    }
    if flip(rng, config.sideband_pi_fidelity) {
        dark = !dark;
    }
    if flip(rng, config.mapping_pi_fidelity) {
        dark = !dark;
    }
    if config.detection_error > 0.0 && rng.random::<f64>() < config.detection_error {
        dark = !dark;
    }
    push(trace, ProtocolStep::Detection, al, dark, n);
    dark
}

/// One full cycle with Al⁺ excitation probability `p`.
pub fn shot_from_probability<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    p: f64,
    rng: &mut R,
    trace: bool,
) -> (bool, Option<Vec<StepPopulation>>) {
    let mut trace = trace.then(Vec::new);
    let n = sample_thermal(config.bus_nbar(), rng);
    if let Some(t) = &mut trace {
        t.push(StepPopulation {
            step: ProtocolStep::Cooling,
            al_excited: 0.0,
            ca_shelved: 0.0,
            phonons: n,
        });
        t.push(StepPopulation {
            step: ProtocolStep::LogicPrep,
            al_excited: 0.0,
            ca_shelved: 1.0,
            phonons: n,
        });
    }
    let al = rng.random::<f64>() < p;
    if let Some(t) = &mut trace {
        t.push(StepPopulation {
            step: ProtocolStep::Probe,
            al_excited: al as u8 as f64,
            ca_shelved: 1.0,
            phonons: n,
        });
    }
    let dark = transfer_and_detect(config, al, n, rng, &mut trace);
    (dark, trace)
}

/// Runs steps (i)–(vi) once. Clock probes go through the double-mapping readout.
pub fn run_shot<R: Rng + ?Sized>(config: &ProtocolConfig, probe: &ProbeSpec, rng: &mut R) -> Result<ShotRecord> {
    config.validate()?;
    if let ProbeSpec::Clock(c) = probe {
        let mut seq = super::ClockSequence::new();
        return super::run_clock_shot(config, c, &mut seq, rng);
    }
    let p = probe.resolve()?;
    let (dark, trace) = shot_from_probability(config, p, rng, false);
    Ok(ShotRecord {
        outcome: if dark { Outcome::Dark } else { Outcome::Bright },
        step_trace: trace,
        rng_stream_id: 0,
        state_change: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchResult {
    pub counts: u64,
    pub n: u64,
    pub p_hat: f64,
    pub sigma_qpn: f64,
}

impl BatchResult {
    pub fn from_counts(counts: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InsufficientData("batch needs at least one shot".into()));
        }
        let p_hat = counts as f64 / n as f64;
        Ok(Self {
            counts,
            n,
            p_hat,
            sigma_qpn: (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
        })
    }
}

/// Outcome of shot `index` of a batch. Each shot owns its random stream, so
/// any partition of the indices gives the same records.
pub fn batch_shot(config: &ProtocolConfig, p: f64, seed: u64, index: u64) -> ShotRecord {
    let mut rng = stream_rng(seed, index);
    let (dark, trace) = shot_from_probability(config, p, &mut rng, false);
    ShotRecord {
        outcome: if dark { Outcome::Dark } else { Outcome::Bright },
        step_trace: trace,
        rng_stream_id: index,
        state_change: None,
    }
}

pub fn run_batch(config: &ProtocolConfig, probe: &ProbeSpec, n_shots: u64, seed: u64) -> Result<BatchResult> {
    config.validate()?;
    if n_shots == 0 {
        return Err(Error::InsufficientData("batch needs at least one shot".into()));
    }
    if let ProbeSpec::Clock(c) = probe {
        return super::clock_batch(config, c, n_shots, seed);
    }
    let p = probe.resolve()?;
    let counts = (0..n_shots)
        .filter(|&i| batch_shot(config, p, seed, i).outcome.is_dark())
        .count() as u64;
    BatchResult::from_counts(counts, n_shots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_extremes() {
        let c = ProtocolConfig::ideal();
        for seed in 0..50 {
            let mut r = stream_rng(seed, 0);
            assert_eq!(
                run_shot(&c, &ProbeSpec::Excitation(0.0), &mut r).unwrap().outcome,
                Outcome::Bright
            );
            assert_eq!(
                run_shot(&c, &ProbeSpec::Excitation(1.0), &mut r).unwrap().outcome,
                Outcome::Dark
            );
        }
    }

    #[test]
    fn half_excitation_binomial() {
        let b = run_batch(&ProtocolConfig::ideal(), &ProbeSpec::Excitation(0.5), 10_000, 7).unwrap();
        assert!((b.p_hat - 0.5).abs() < 3.0 * 0.005, "{b:?}");
    }

    #[test]
    fn sigma_qpn_formula() {
        let b = BatchResult::from_counts(50, 100).unwrap();
        assert!((b.sigma_qpn - 0.05).abs() < 1e-15);
    }

    #[test]
    fn sideband_infidelity_sets_baseline() {
        let c = ProtocolConfig {
            sideband_pi_fidelity: 0.95,
            ..ProtocolConfig::ideal()
        };
        let b = run_batch(&c, &ProbeSpec::Excitation(1.0), 20_000, 3).unwrap();
        assert!(
            (b.p_hat - 0.95).abs() < 3.0 * (0.95f64 * 0.05 / 20_000.0).sqrt(),
            "{b:?}"
        );
    }

    #[test]
    fn same_seed_same_counts() {
        let c = ProtocolConfig::default();
        let a = run_batch(&c, &ProbeSpec::Excitation(0.3), 500, 11).unwrap();
        let b = run_batch(&c, &ProbeSpec::Excitation(0.3), 500, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pulse_probe_matches_rabi() {
        let pulse = Pulse::carrier(2.0 * core::f64::consts::PI * 125e3, 2e-6);
        let probe = ProbeSpec::SinglePulse {
            pulse,
            noise: NoiseModel::ideal(),
        };
        let p = probe.resolve().unwrap();
        assert!((p - 0.5).abs() < 1e-6, "{p}");
    }

    #[test]
    fn trace_is_binary() {
        let mut r = stream_rng(1, 2);
        let (_, t) = shot_from_probability(&ProtocolConfig::default(), 0.4, &mut r, true);
        let t = t.unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.iter().all(|s| s.al_excited == 0.0 || s.al_excited == 1.0));
    }

    #[test]
    fn rejects_bad_config() {
        let c = ProtocolConfig {
            mapping_pi_fidelity: 1.2,
            ..Default::default()
        };
        assert!(matches!(
            run_batch(&c, &ProbeSpec::Excitation(0.5), 10, 0),
            Err(Error::Config(_))
        ));
    }
}
