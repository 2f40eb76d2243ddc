//! Optical pumping into a stretched ¹S₀ F=5/2 sublevel through ³P₁ F′=7/2.

#[allow(unused_imports)]
use num_traits::Float;

use super::ProtocolConfig;
use crate::atomic::{clebsch_gordan, HalfInt};
use crate::error::{Error, Result};

pub const GROUND_LEVELS: usize = 6;
pub const EXCITED_LEVELS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StretchedState {
    #[default]
    Plus,
    Minus,
}

impl StretchedState {
    pub fn sign(self) -> i8 {
        match self {
            StretchedState::Plus => 1,
            StretchedState::Minus => -1,
        }
    }
}

/// Populations of ¹S₀ m = −5/2…5/2 and ³P₁ F′=7/2 m′ = −7/2…7/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpState {
    pub ground: [f64; GROUND_LEVELS],
    pub excited: [f64; EXCITED_LEVELS],
}

impl PumpState {
    pub fn uniform_ground() -> Self {
        Self {
            ground: [1.0 / GROUND_LEVELS as f64; GROUND_LEVELS],
            excited: [0.0; EXCITED_LEVELS],
        }
    }

    pub fn stretched(target: StretchedState) -> Self {
        let mut s = Self {
            ground: [0.0; GROUND_LEVELS],
            excited: [0.0; EXCITED_LEVELS],
        };
        s.ground[ground_index(target)] = 1.0;
        s
    }

    pub fn total(&self) -> f64 {
        self.ground.iter().chain(self.excited.iter()).sum()
    }

    pub fn target_population(&self, target: StretchedState) -> f64 {
        self.ground[ground_index(target)]
    }

    pub fn validate(&self) -> Result<()> {
        if self.ground.iter().chain(self.excited.iter()).any(|p| !(*p >= 0.0)) {
            return Err(Error::Domain("negative pump population".into()));
        }
        let t = self.total();
        if (t - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(alloc::format!("pump populations sum to {t}")));
        }
        Ok(())
    }
}

fn ground_index(target: StretchedState) -> usize {
    match target {
        StretchedState::Plus => GROUND_LEVELS - 1,
        StretchedState::Minus => 0,
    }
}

/// m (doubled) of ground index i.
fn ground_m2(i: usize) -> i32 {
    2 * i as i32 - 5
}

fn excited_index(m2: i32) -> usize {
    ((m2 + 7) / 2) as usize
}

/// Squared CG coefficient for |7/2, m′⟩ → |5/2, m⟩ + photon.
pub fn branching_ratio(m_excited2: i32, m_ground2: i32) -> f64 {
    let q = m_excited2 - m_ground2;
    if q.abs() > 2 {
        return 0.0;
    }
    let h = HalfInt::from_doubled;
    clebsch_gordan(h(5), h(m_ground2), h(2), h(q), h(7), h(m_excited2)).powi(2)
}

/// Lets the excited manifold decay for `wait` with lifetime `tau`.
pub fn decay(state: &mut PumpState, wait: f64, tau: f64) {
    let frac = 1.0 - (-wait / tau).exp();
    for k in 0..EXCITED_LEVELS {
        let moved = state.excited[k] * frac;
        if moved == 0.0 {
            continue;
        }
        state.excited[k] -= moved;
        let mp2 = 2 * k as i32 - 7;
        for i in 0..GROUND_LEVELS {
            state.ground[i] += moved * branching_ratio(mp2, ground_m2(i));
        }
    }
}

/// One π-pulse on |m⟩ ↔ |m′ = m ± 1⟩ with transfer probability `fidelity`.
fn pi_pulse(state: &mut PumpState, ground: usize, excited: usize, fidelity: f64) {
    let g = state.ground[ground];
    let e = state.excited[excited];
    state.ground[ground] = (1.0 - fidelity) * g + fidelity * e;
    state.excited[excited] = fidelity * g + (1.0 - fidelity) * e;
}

/// The five σ-pulses of one repetition, each followed by a decay window.
/// Pulses run from the far end of the manifold towards the target.
pub fn pump_repetition(state: &mut PumpState, target: StretchedState, fidelity: f64, wait: f64, tau: f64) {
    let s = target.sign() as i32;
    for step in 0..(GROUND_LEVELS - 1) {
        let m2 = match target {
            StretchedState::Plus => -5 + 2 * step as i32,
            StretchedState::Minus => 5 - 2 * step as i32,
        };
        let gi = ((m2 + 5) / 2) as usize;
        let ei = excited_index(m2 + 2 * s);
        pi_pulse(state, gi, ei, fidelity);
        decay(state, wait, tau);
    }
}

pub fn optical_pump(state: &PumpState, config: &ProtocolConfig) -> Result<PumpState> {
    state.validate()?;
    config.validate()?;
    let mut s = *state;
    for _ in 0..config.pump_repetitions {
        pump_repetition(
            &mut s,
            config.target_zeeman_state,
            config.carrier_pi_fidelity,
            config.pump_wait,
            config.upper_state_lifetime,
        );
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_is_fixed_point() {
        let cfg = ProtocolConfig::default();
        for t in [StretchedState::Plus, StretchedState::Minus] {
            let c = ProtocolConfig {
                target_zeeman_state: t,
                ..cfg.clone()
            };
            let s = PumpState::stretched(t);
            assert_eq!(optical_pump(&s, &c).unwrap(), s);
        }
    }

    #[test]
    fn zero_repetitions_identity() {
        let c = ProtocolConfig {
            pump_repetitions: 0,
            ..Default::default()
        };
        let s = PumpState::uniform_ground();
        assert_eq!(optical_pump(&s, &c).unwrap(), s);
    }

    #[test]
    fn uniform_start_pumps_towards_target() {
        for t in [StretchedState::Plus, StretchedState::Minus] {
            let pump = |reps| {
                let c = ProtocolConfig {
                    target_zeeman_state: t,
                    pump_repetitions: reps,
                    ..Default::default()
                };
                optical_pump(&PumpState::uniform_ground(), &c).unwrap()
            };
            let ten = pump(10);
            ten.validate().unwrap();
            // The 3/2 → 5/2′ step returns to the target with only 2/7 branching,
            // so ten repetitions with 300 µs windows stop near 93.5 %.
            assert!((ten.target_population(t) - 0.934_978).abs() < 1e-5, "{ten:?}");
            assert!(pump(20).target_population(t) > 0.99);
        }
    }

    #[test]
    fn branching_rows_normalised() {
        for k in 0..EXCITED_LEVELS {
            let mp2 = 2 * k as i32 - 7;
            let s: f64 = (0..GROUND_LEVELS).map(|i| branching_ratio(mp2, ground_m2(i))).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert!((branching_ratio(7, 5) - 1.0).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn populations_stay_normalised(raw in proptest::collection::vec(0.0f64..1.0, 6), reps in 0u32..15) {
            let total: f64 = raw.iter().sum();
            proptest::prop_assume!(total > 1e-3);
            let mut s = PumpState { ground: [0.0; 6], excited: [0.0; 8] };
            for (g, r) in s.ground.iter_mut().zip(&raw) {
                *g = r / total;
            }
            let c = ProtocolConfig { pump_repetitions: reps, ..Default::default() };
            let out = optical_pump(&s, &c).unwrap();
            proptest::prop_assert!((out.total() - 1.0).abs() < 1e-9);
            proptest::prop_assert!(out.ground.iter().chain(out.excited.iter()).all(|p| *p >= 0.0));
        }

        #[test]
        fn more_repetitions_never_hurt(reps in 0u32..12) {
            let c = |r| ProtocolConfig { pump_repetitions: r, ..Default::default() };
            let s = PumpState::uniform_ground();
            let a = optical_pump(&s, &c(reps)).unwrap().target_population(StretchedState::Plus);
            let b = optical_pump(&s, &c(reps + 1)).unwrap().target_population(StretchedState::Plus);
            proptest::prop_assert!(b >= a - 1e-12);
        }
    }
}
