//! Generators for synthetic campaigns with known ground truth.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Normal};

use super::ramsey::{ideal_phase_probabilities, PhaseCount, RamseyPhaseSet};
use super::zeeman::{CombLock, MeasurementSet};
use crate::atomic::ca_pair_splitting_per_gauss;
use crate::constants::{PhysicalConstants, CITED};
use crate::error::{Error, Result};

fn normal(sigma: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, sigma).map_err(|e| Error::Domain(format!("normal({sigma}): {e}")))
}

fn binomial<R: Rng + ?Sized>(n: u32, p: f64, rng: &mut R) -> Result<u32> {
    let d =
        Binomial::new(n as u64, p.clamp(0.0, 1.0)).map_err(|e| Error::Domain(format!("binomial({n}, {p}): {e}")))?;
    Ok(d.sample(rng) as u32)
}

/// Draws shot counts at the four phases from excitation probabilities given
/// in the order 0, +π/2, −π/2, π.
pub fn sample_phase_set<R: Rng + ?Sized>(
    probabilities: [f64; 4],
    shots_per_phase: u32,
    t_pulse: f64,
    t_wait: f64,
    rng: &mut R,
) -> Result<RamseyPhaseSet> {
    let mut c = [PhaseCount::default(); 4];
    for (slot, p) in c.iter_mut().zip(probabilities) {
        *slot = PhaseCount::new(binomial(shots_per_phase, p, rng)?, shots_per_phase);
    }
    Ok(RamseyPhaseSet {
        zero: c[0],
        plus_half_pi: c[1],
        minus_half_pi: c[2],
        pi: c[3],
        t_pulse,
        t_wait,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeemanCampaignParams {
    pub n_sets: usize,
    /// Hz/G
    pub slope: f64,
    /// Hz relative to the anchor.
    pub f0_offset: f64,
    /// G
    pub b_field: f64,
    /// Set-to-set field wander, G.
    pub b_jitter: f64,
    /// Per-set scatter of the Al⁺ frequency, Hz.
    pub point_sigma: f64,
    /// Quoted field uncertainty, G.
    pub b_sigma: f64,
    /// Ca⁺ pair detuning noise, Hz.
    pub ca_sigma: f64,
    /// Set-to-set 729 nm laser offset, Hz.
    pub laser_wander: f64,
    /// Sets taken with the comb on quartz before switching to the 729 nm lock.
    pub quartz_sets: usize,
    /// Ramsey waits cycled through set by set, s.
    pub ramsey_times: Vec<f64>,
    /// Extra shift added to sets with the longest Ramsey wait, Hz.
    pub long_ramsey_shift: f64,
    pub frequency_ratio: f64,
    pub set_interval: f64,
}

impl Default for ZeemanCampaignParams {
    fn default() -> Self {
        Self {
            n_sets: 18,
            slope: 2.100_056e6,
            f0_offset: 0.0,
            b_field: 4.0,
            b_jitter: 2e-3,
            point_sigma: 36.0 * 18f64.sqrt(),
            b_sigma: 1e-6,
            ca_sigma: 1.0,
            laser_wander: 30.0,
            quartz_sets: 8,
            ramsey_times: alloc::vec![100e-6, 200e-6],
            long_ramsey_shift: 0.0,
            frequency_ratio: 2.731_697_740_923_842,
            set_interval: 900.0,
        }
    }
}

pub fn zeeman_campaign<R: Rng + ?Sized>(
    p: &ZeemanCampaignParams,
    c: &PhysicalConstants,
    rng: &mut R,
) -> Result<Vec<MeasurementSet>> {
    if p.n_sets < 2 || p.ramsey_times.is_empty() {
        return Err(Error::Config("campaign needs >= 2 sets and a Ramsey time".into()));
    }
    let per_gauss = ca_pair_splitting_per_gauss(CITED.g_ca_s12.value, CITED.g_ca_d52.value, c);
    let jitter = normal(p.b_jitter)?;
    let al_noise = normal(p.point_sigma)?;
    let ca_noise = normal(p.ca_sigma)?;
    let wander = normal(p.laser_wander)?;
    let longest = p.ramsey_times.iter().cloned().fold(f64::MIN, f64::max);
    let mut out = Vec::with_capacity(p.n_sets);
    for i in 0..p.n_sets {
        // +, −, −, +, … keeps both signs in every Ramsey time
        let s_pm: i8 = if (i + i / 2) % 2 == 0 { 1 } else { -1 };
        let ramsey_t = p.ramsey_times[(i / 2) % p.ramsey_times.len()];
        let b = p.b_field + jitter.sample(rng);
        let drift = wander.sample(rng);
        let lock = if i < p.quartz_sets {
            CombLock::Quartz
        } else {
            CombLock::Laser729
        };
        let mut al = p.f0_offset + p.slope * s_pm as f64 * b + al_noise.sample(rng);
        if lock == CombLock::Laser729 {
            al += p.frequency_ratio * drift;
        }
        if ramsey_t == longest && p.ramsey_times.len() > 1 {
            al += p.long_ramsey_shift;
        }
        out.push(MeasurementSet {
            set_id: format!("{}", i + 1),
            s_pm,
            ramsey_t,
            al_offset: al,
            al_sigma: p.point_sigma,
            ca_plus: 0.5 * per_gauss * b + drift + ca_noise.sample(rng),
            ca_minus: -0.5 * per_gauss * b + drift + ca_noise.sample(rng),
            ca_sigma: p.ca_sigma,
            b_sigma: p.b_sigma,
            comb_lock: lock,
            timestamp: i as f64 * p.set_interval,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabComparisonParams {
    /// s
    pub duration: f64,
    /// Time between consecutive frequency estimates in each lab, s.
    pub cycle: f64,
    /// Frequency of lab A minus lab B, Hz.
    pub offset: f64,
    pub shots_per_phase: u32,
    pub contrast: f64,
    pub t_pulse: f64,
    pub t_wait: f64,
    /// Amplitude of the common laser wander seen by both labs, Hz.
    pub common_wander: f64,
}

impl Default for LabComparisonParams {
    fn default() -> Self {
        Self {
            duration: 5.0 * 3600.0,
            cycle: 4.5,
            offset: 1.3,
            shots_per_phase: 50,
            contrast: 0.8,
            t_pulse: 50e-6,
            t_wait: 3e-3,
            common_wander: 8.0,
        }
    }
}

/// (t, detuning) pairs, s and Hz.
pub type TimeSeries = Vec<(f64, f64)>;

/// Two time series of Ramsey-estimated detunings (t, Hz) limited by
/// projection noise, sharing the same laser.
pub fn lab_comparison<R: Rng + ?Sized>(p: &LabComparisonParams, rng: &mut R) -> Result<(TimeSeries, TimeSeries)> {
    if !(p.cycle > 0.0 && p.duration > p.cycle) {
        return Err(Error::Config("comparison needs duration > cycle > 0".into()));
    }
    let n = (p.duration / p.cycle) as usize;
    let phase0: f64 = rng.random::<f64>() * core::f64::consts::TAU;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 * p.cycle;
        let laser = p.common_wander * (core::f64::consts::TAU * t / 3600.0 + phase0).sin();
        for (series, lab_offset, dt) in [(&mut a, p.offset, 0.0), (&mut b, 0.0, 0.5 * p.cycle)] {
            let delta = laser + lab_offset;
            let probs = ideal_phase_probabilities(delta, p.contrast, 0.5, p.t_pulse, p.t_wait);
            let set = sample_phase_set(probs, p.shots_per_phase, p.t_pulse, p.t_wait, rng)?;
            // rare projection-noise outliers can make the fringe unreadable; skip like the lab would
            if let Ok(e) = super::ramsey::estimate_detuning_contrast(&set) {
                series.push((t + dt, e.detuning));
            }
        }
    }
    Ok((a, b))
}
