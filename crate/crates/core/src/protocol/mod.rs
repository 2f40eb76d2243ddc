//! The quantum-logic readout as a stochastic state machine: pumping,
//! modeled cooling, probing, state transfer to the logic ion and detection.

mod clock;
mod pump;
mod shot;

pub use clock::*;
pub use pump::*;
pub use shot::*;

use crate::constants::CITED;
use crate::error::{Error, Result};
use crate::trap::ModeLabel;

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub pump_repetitions: u32,
    /// Decay window after each pumping pulse, s.
    pub pump_wait: f64,
    /// ³P₁ lifetime used by the pumping model, s.
    pub upper_state_lifetime: f64,
    pub carrier_pi_fidelity: f64,
    pub sideband_pi_fidelity: f64,
    pub mapping_pi_fidelity: f64,
    /// Post-cooling n̄ per mode, indexed by [`ModeLabel::index`].
    pub cooling_result_nbar: [f64; 6],
    /// Mode carrying the phonon during state transfer.
    pub bus_mode: ModeLabel,
    pub detection_error: f64,
    pub target_zeeman_state: StretchedState,
    /// Repeat the transfer and detection steps and require both readouts to agree.
    pub double_mapping: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            pump_repetitions: 10,
            pump_wait: 300e-6,
            upper_state_lifetime: CITED.al_3p1_lifetime.value,
            carrier_pi_fidelity: 1.0,
            sideband_pi_fidelity: 1.0,
            mapping_pi_fidelity: 1.0,
            cooling_result_nbar: [0.05, 0.05, 8.0, 8.0, 8.0, 8.0],
            bus_mode: ModeLabel::AXIAL_OUT,
            detection_error: 0.0,
            target_zeeman_state: StretchedState::Plus,
            double_mapping: false,
        }
    }
}

impl ProtocolConfig {
    /// All fidelities 1, no detection error and a ground-state bus mode.
    pub fn ideal() -> Self {
        let mut c = Self::default();
        c.cooling_result_nbar[c.bus_mode.index()] = 0.0;
        c
    }

    pub fn bus_nbar(&self) -> f64 {
        self.cooling_result_nbar[self.bus_mode.index()]
    }

    /// Checks ranges. Zero pump repetitions is accepted and means no pumping.
    pub fn validate(&self) -> Result<()> {
        for (name, f) in [
            ("carrier_pi_fidelity", self.carrier_pi_fidelity),
            ("sideband_pi_fidelity", self.sideband_pi_fidelity),
            ("mapping_pi_fidelity", self.mapping_pi_fidelity),
            ("detection_error", self.detection_error),
        ] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::Config(alloc::format!("{name} = {f} outside [0, 1]")));
            }
        }
        if self.cooling_result_nbar.iter().any(|n| !(*n >= 0.0 && n.is_finite())) {
            return Err(Error::Config("cooling_result_nbar must be finite and >= 0".into()));
        }
        if !(self.pump_wait >= 0.0 && self.pump_wait.is_finite()) {
            return Err(Error::Config("pump_wait must be finite and >= 0".into()));
        }
        if !(self.upper_state_lifetime > 0.0 && self.upper_state_lifetime.is_finite()) {
            return Err(Error::Config("upper_state_lifetime must be positive".into()));
        }
        Ok(())
    }
}
