//! Scenario configuration: one TOML file, one section per subcommand.
//! Every section is optional and unknown keys are rejected.

use std::path::{Path, PathBuf};

use qls_core::constants::{CitedConstants, PhysicalConstants, CITED, CODATA, NU_CA_HZ};
use qls_core::metrology::synthetic::{LabComparisonParams, ZeemanCampaignParams};
use qls_core::protocol::{ProtocolConfig, StretchedState};
use qls_core::trap::{IonPair, ModeLabel, RadialPair, TrapConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub constants: ConstantsSection,
    pub trap: TrapSection,
    pub spectrum: SpectrumSection,
    pub rabi: RabiSection,
    pub ramsey: RamseySection,
    pub protocol: ProtocolSection,
    pub pump: PumpSection,
    pub qls_batch: BatchSection,
    pub clock: ClockSection,
    pub campaign: CampaignSection,
    pub hypothesis: HypothesisSection,
    pub budget: BudgetSection,
    pub comparison: ComparisonSection,
    pub chain: ChainSection,
}

/// A loaded configuration and where it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: Config,
    /// Directory that relative paths inside the file resolve against.
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn defaults() -> Self {
        Self {
            config: Config::default(),
            base_dir: PathBuf::from("."),
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config = Config::from_toml(&text).map_err(|source| CliError::Toml {
            path: path.to_path_buf(),
            source,
        })?;
        config.validate()?;
        Ok(Self {
            config,
            base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }

    pub fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// SHA-256 of the fully resolved configuration, defaults included.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).unwrap_or_default();
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> CliResult<()> {
        self.trap.to_trap().validate()?;
        self.protocol.to_protocol()?.validate()?;
        let positive = [
            ("spectrum.pulse_duration_s", self.spectrum.pulse_duration_s),
            ("spectrum.carrier_pi_time_s", self.spectrum.carrier_pi_time_s),
            ("spectrum.step_hz", self.spectrum.step_hz),
            ("rabi.carrier_pi_time_s", self.rabi.carrier_pi_time_s),
            ("rabi.sideband_pi_time_s", self.rabi.sideband_pi_time_s),
            ("ramsey.pulse_s", self.ramsey.pulse_s),
            ("clock.probe_time_s", self.clock.probe_time_s),
            ("comparison.bin_s", self.comparison.bin_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsSection {
    pub g_al_1s0: f64,
    pub g_al_3p1: f64,
    pub g_ca_s12: f64,
    pub g_ca_d52: f64,
    pub al_3p1_lifetime_s: f64,
    pub al_3p0_lifetime_s: f64,
    pub ca_d52_lifetime_s: f64,
    pub nu_ca_hz: u64,
    pub nu_ca_sigma_hz: f64,
    /// μ_B/h in Hz/G.
    pub bohr_magneton_hz_per_gauss: f64,
}

impl Default for ConstantsSection {
    fn default() -> Self {
        Self {
            g_al_1s0: CITED.g_al_1s0.value,
            g_al_3p1: CITED.g_al_3p1_f72.value,
            g_ca_s12: CITED.g_ca_s12.value,
            g_ca_d52: CITED.g_ca_d52.value,
            al_3p1_lifetime_s: CITED.al_3p1_lifetime.value,
            al_3p0_lifetime_s: CITED.al_3p0_lifetime.value,
            ca_d52_lifetime_s: CITED.ca_d52_lifetime.value,
            nu_ca_hz: NU_CA_HZ as u64,
            nu_ca_sigma_hz: CITED.nu_ca_sigma.value,
            bohr_magneton_hz_per_gauss: CODATA.bohr_magneton_over_h,
        }
    }
}

impl ConstantsSection {
    pub fn physical(&self) -> PhysicalConstants {
        PhysicalConstants {
            bohr_magneton_over_h: self.bohr_magneton_hz_per_gauss,
            ..CODATA
        }
    }

    pub fn cited(&self) -> CitedConstants {
        let mut c = CITED;
        let over = |v: f64, base: qls_core::constants::Cited| {
            if v == base.value {
                base
            } else {
                qls_core::constants::Cited::new(v, "configuration override")
            }
        };
        c.g_al_1s0 = over(self.g_al_1s0, c.g_al_1s0);
        c.g_al_3p1_f72 = over(self.g_al_3p1, c.g_al_3p1_f72);
        c.g_ca_s12 = over(self.g_ca_s12, c.g_ca_s12);
        c.g_ca_d52 = over(self.g_ca_d52, c.g_ca_d52);
        c.al_3p1_lifetime = over(self.al_3p1_lifetime_s, c.al_3p1_lifetime);
        c.al_3p0_lifetime = over(self.al_3p0_lifetime_s, c.al_3p0_lifetime);
        c.ca_d52_lifetime = over(self.ca_d52_lifetime_s, c.ca_d52_lifetime);
        c.nu_ca = over(self.nu_ca_hz as f64, c.nu_ca);
        c.nu_ca_sigma = over(self.nu_ca_sigma_hz, c.nu_ca_sigma);
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapSection {
    pub axial_hz: f64,
    pub radial_x_hz: f64,
    pub radial_y_hz: f64,
    pub dc_radial_asymmetry_hz: f64,
    pub rf_drive_hz: f64,
    pub modulation_index: f64,
    pub reference_mass_u: f64,
    /// Logic ion first, spectroscopy ion second.
    pub ion_masses_u: [f64; 2],
    /// phonons/s in the order z,in z,out x,in x,out y,in y,out.
    pub heating_rates_per_s: [f64; 6],
    pub mean_phonon_numbers: [f64; 6],
}

impl Default for TrapSection {
    fn default() -> Self {
        let t = TrapConfig::default();
        let p = IonPair::ca_al();
        Self {
            axial_hz: t.axial_freq_reference_ion,
            radial_x_hz: t.radial_freqs_reference_ion.x,
            radial_y_hz: t.radial_freqs_reference_ion.y,
            dc_radial_asymmetry_hz: t.dc_radial_asymmetry,
            rf_drive_hz: t.rf_drive_freq,
            modulation_index: t.residual_modulation_index,
            reference_mass_u: t.reference_mass,
            ion_masses_u: p.masses(),
            heating_rates_per_s: t.heating_rates,
            mean_phonon_numbers: t.mean_phonon_numbers,
        }
    }
}

impl TrapSection {
    pub fn to_trap(&self) -> TrapConfig {
        TrapConfig {
            axial_freq_reference_ion: self.axial_hz,
            radial_freqs_reference_ion: RadialPair {
                x: self.radial_x_hz,
                y: self.radial_y_hz,
            },
            dc_radial_asymmetry: self.dc_radial_asymmetry_hz,
            rf_drive_freq: self.rf_drive_hz,
            residual_modulation_index: self.modulation_index,
            reference_mass: self.reference_mass_u,
            heating_rates: self.heating_rates_per_s,
            mean_phonon_numbers: self.mean_phonon_numbers,
        }
    }

    pub fn pair(&self) -> IonPair {
        IonPair::new(self.ion_masses_u[0], self.ion_masses_u[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbedIon {
    Logic,
    Spectroscopy,
}

impl ProbedIon {
    pub fn index(self) -> usize {
        match self {
            ProbedIon::Logic => 0,
            ProbedIon::Spectroscopy => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub ion: ProbedIon,
    pub wavelength_nm: f64,
    /// Cosine between the probe k-vector and the z, x, y axes.
    pub projection: [f64; 3],
    pub carrier_pi_time_s: f64,
    pub pulse_duration_s: f64,
    pub start_hz: f64,
    pub stop_hz: f64,
    pub step_hz: f64,
    pub decay_rate_per_s: f64,
    pub dephasing_rate_per_s: f64,
    /// Heating during a 50 µs probe adds well under 0.01 quanta.
    pub include_heating: bool,
    pub peak_threshold: f64,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            ion: ProbedIon::Logic,
            wavelength_nm: qls_core::constants::wavelength::CA_QUADRUPOLE_NM,
            projection: [std::f64::consts::FRAC_1_SQRT_2, 0.5, 0.5],
            carrier_pi_time_s: 5e-6,
            pulse_duration_s: 50e-6,
            start_hz: -2.3e6,
            stop_hz: 2.3e6,
            step_hz: 2e3,
            decay_rate_per_s: 0.0,
            dephasing_rate_per_s: 0.0,
            include_heating: false,
            peak_threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RabiTransition {
    Carrier,
    Blue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RabiSection {
    pub transition: RabiTransition,
    pub carrier_pi_time_s: f64,
    /// Blue-sideband π-time from the motional ground state.
    pub sideband_pi_time_s: f64,
    pub dephasing_rate_per_s: f64,
    /// None uses the ³P₁ lifetime from [constants].
    pub decay_rate_per_s: Option<f64>,
    pub t_max_s: f64,
    pub points: usize,
    pub shots: u64,
}

impl Default for RabiSection {
    fn default() -> Self {
        Self {
            transition: RabiTransition::Blue,
            carrier_pi_time_s: 4e-6,
            sideband_pi_time_s: 15e-6,
            dephasing_rate_per_s: 5e3,
            decay_rate_per_s: None,
            t_max_s: 60e-6,
            points: 61,
            shots: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RamseyScanKind {
    Detuning,
    Phase,
    Wait,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RamseySection {
    pub scan: RamseyScanKind,
    pub pulse_s: f64,
    pub wait_s: f64,
    /// None uses the ³P₁ lifetime from [constants].
    pub decay_rate_per_s: Option<f64>,
    pub dephasing_rate_per_s: f64,
    pub detuning_start_hz: f64,
    pub detuning_stop_hz: f64,
    pub points: usize,
    /// Fixed detuning for phase and wait scans.
    pub detuning_hz: f64,
    pub waits_s: Vec<f64>,
    /// Scales the fringe amplitude about 1/2.
    pub contrast_factor: f64,
    /// Added to the modelled excitation before the contrast factor.
    pub baseline: f64,
    /// Shift of the fringe centre, Hz.
    pub offset_hz: f64,
    pub shots: u64,
}

impl Default for RamseySection {
    fn default() -> Self {
        Self {
            scan: RamseyScanKind::Detuning,
            pulse_s: 50e-6,
            wait_s: 200e-6,
            decay_rate_per_s: None,
            dephasing_rate_per_s: 0.0,
            detuning_start_hz: -8e3,
            detuning_stop_hz: 8e3,
            points: 161,
            detuning_hz: 0.0,
            waits_s: (1..=12).map(|k| k as f64 * 50e-6).collect(),
            contrast_factor: 1.0,
            baseline: 0.0,
            offset_hz: 0.0,
            shots: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSection {
    pub pump_repetitions: u32,
    pub pump_wait_s: f64,
    pub carrier_pi_fidelity: f64,
    pub sideband_pi_fidelity: f64,
    pub mapping_pi_fidelity: f64,
    pub cooling_result_nbar: [f64; 6],
    pub detection_error: f64,
    /// "+5/2" or "-5/2".
    pub target_zeeman_state: String,
    pub double_mapping: bool,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        let p = ProtocolConfig::default();
        Self {
            pump_repetitions: p.pump_repetitions,
            pump_wait_s: p.pump_wait,
            carrier_pi_fidelity: p.carrier_pi_fidelity,
            sideband_pi_fidelity: p.sideband_pi_fidelity,
            mapping_pi_fidelity: p.mapping_pi_fidelity,
            cooling_result_nbar: p.cooling_result_nbar,
            detection_error: p.detection_error,
            target_zeeman_state: "+5/2".into(),
            double_mapping: p.double_mapping,
        }
    }
}

impl ProtocolSection {
    pub fn to_protocol(&self) -> CliResult<ProtocolConfig> {
        let target = match self.target_zeeman_state.trim() {
            "+5/2" | "5/2" => StretchedState::Plus,
            "-5/2" => StretchedState::Minus,
            other => {
                return Err(CliError::Config(format!(
                    "protocol.target_zeeman_state must be \"+5/2\" or \"-5/2\", got {other:?}"
                )))
            }
        };
        Ok(ProtocolConfig {
            pump_repetitions: self.pump_repetitions,
            pump_wait: self.pump_wait_s,
            carrier_pi_fidelity: self.carrier_pi_fidelity,
            sideband_pi_fidelity: self.sideband_pi_fidelity,
            mapping_pi_fidelity: self.mapping_pi_fidelity,
            cooling_result_nbar: self.cooling_result_nbar,
            bus_mode: ModeLabel::AXIAL_OUT,
            detection_error: self.detection_error,
            target_zeeman_state: target,
            double_mapping: self.double_mapping,
            ..ProtocolConfig::default()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpSection {
    pub max_repetitions: u32,
}

impl Default for PumpSection {
    fn default() -> Self {
        Self { max_repetitions: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatchSection {
    pub excitation_probability: f64,
    pub shots: u64,
}

impl Default for BatchSection {
    fn default() -> Self {
        Self {
            excitation_probability: 0.5,
            shots: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClockSection {
    /// Length of the π-pulse on resonance, s.
    pub probe_time_s: f64,
    pub span_hz: f64,
    pub points: usize,
    pub shots_per_point: u64,
}

impl Default for ClockSection {
    fn default() -> Self {
        Self {
            probe_time_s: 1e-3,
            span_hz: 3e3,
            points: 121,
            shots_per_point: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaKind {
    /// Per-set σ is the spread of the individual measurements; divided by √n.
    Ensemble,
    /// Per-set σ is already the uncertainty of the set mean.
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignSection {
    /// Measurement-set CSV; when absent a synthetic campaign is generated.
    pub input_csv: Option<String>,
    pub sigma_kind: SigmaKind,
    pub measurements_per_set: u32,
    /// Frequency the set offsets are measured against, Hz.
    pub anchor_hz: u64,
    pub n_sets: usize,
    pub slope_hz_per_gauss: f64,
    pub f0_offset_hz: f64,
    pub b_field_gauss: f64,
    pub b_jitter_gauss: f64,
    pub point_sigma_hz: f64,
    pub b_sigma_gauss: f64,
    pub ca_sigma_hz: f64,
    pub laser_wander_hz: f64,
    pub quartz_sets: usize,
    pub ramsey_times_s: Vec<f64>,
    pub long_ramsey_shift_hz: f64,
    /// None derives ν_Al/ν_Ca from the anchor.
    pub frequency_ratio: Option<f64>,
    pub set_interval_s: f64,
}

impl Default for CampaignSection {
    fn default() -> Self {
        let p = ZeemanCampaignParams::default();
        Self {
            input_csv: None,
            sigma_kind: SigmaKind::Mean,
            measurements_per_set: 50,
            anchor_hz: 1_122_842_857_334_711,
            n_sets: p.n_sets,
            slope_hz_per_gauss: p.slope,
            f0_offset_hz: p.f0_offset,
            b_field_gauss: p.b_field,
            b_jitter_gauss: p.b_jitter,
            point_sigma_hz: p.point_sigma,
            b_sigma_gauss: p.b_sigma,
            ca_sigma_hz: p.ca_sigma,
            laser_wander_hz: p.laser_wander,
            quartz_sets: p.quartz_sets,
            ramsey_times_s: p.ramsey_times,
            long_ramsey_shift_hz: p.long_ramsey_shift,
            frequency_ratio: None,
            set_interval_s: p.set_interval,
        }
    }
}

impl CampaignSection {
    pub fn ratio(&self, nu_ca_hz: u64) -> f64 {
        self.frequency_ratio.unwrap_or(self.anchor_hz as f64 / nu_ca_hz as f64)
    }

    pub fn params(&self, nu_ca_hz: u64) -> ZeemanCampaignParams {
        ZeemanCampaignParams {
            n_sets: self.n_sets,
            slope: self.slope_hz_per_gauss,
            f0_offset: self.f0_offset_hz,
            b_field: self.b_field_gauss,
            b_jitter: self.b_jitter_gauss,
            point_sigma: self.point_sigma_hz,
            b_sigma: self.b_sigma_gauss,
            ca_sigma: self.ca_sigma_hz,
            laser_wander: self.laser_wander_hz,
            quartz_sets: self.quartz_sets,
            ramsey_times: self.ramsey_times_s.clone(),
            long_ramsey_shift: self.long_ramsey_shift_hz,
            frequency_ratio: self.ratio(nu_ca_hz),
            set_interval: self.set_interval_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HypothesisSection {
    /// Take δ, N and σ_r from the campaign instead of the values below.
    pub from_campaign: bool,
    pub delta_hz: f64,
    pub n_sets: usize,
    pub sigma_r_hz: f64,
}

impl Default for HypothesisSection {
    fn default() -> Self {
        Self {
            from_campaign: false,
            delta_hz: 40.0,
            n_sets: 18,
            sigma_r_hz: 36.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetSection {
    /// Shift table CSV; when absent the published table is used.
    pub table_csv: Option<String>,
    pub f0_hz: u64,
    /// None derives ν_Al/ν_Ca from f0.
    pub frequency_ratio: Option<f64>,
}

impl Default for BudgetSection {
    fn default() -> Self {
        Self {
            table_csv: None,
            f0_hz: 1_122_842_857_334_711,
            frequency_ratio: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ComparisonSection {
    pub duration_s: f64,
    pub cycle_s: f64,
    pub offset_hz: f64,
    pub shots_per_phase: u32,
    pub contrast: f64,
    pub pulse_s: f64,
    pub wait_s: f64,
    pub common_wander_hz: f64,
    pub bin_s: f64,
}

impl Default for ComparisonSection {
    fn default() -> Self {
        let p = LabComparisonParams::default();
        Self {
            duration_s: p.duration,
            cycle_s: p.cycle,
            offset_hz: p.offset,
            shots_per_phase: p.shots_per_phase,
            contrast: p.contrast,
            pulse_s: p.t_pulse,
            wait_s: p.t_wait,
            common_wander_hz: p.common_wander,
            bin_s: 60.0,
        }
    }
}

impl ComparisonSection {
    pub fn params(&self) -> LabComparisonParams {
        LabComparisonParams {
            duration: self.duration_s,
            cycle: self.cycle_s,
            offset: self.offset_hz,
            shots_per_phase: self.shots_per_phase,
            contrast: self.contrast,
            t_pulse: self.pulse_s,
            t_wait: self.wait_s,
            common_wander: self.common_wander_hz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainSection {
    /// 729 nm laser frequency, Hz. None uses ν_Ca.
    pub nu_729_hz: Option<u64>,
    /// Al⁺ line the chain should reach, Hz.
    pub target_hz: u64,
    pub n_729: i64,
    /// None picks the comb line nearest to the 1068 nm laser.
    pub n_1068: Option<i64>,
    pub f_ceo_mhz: i64,
    pub f_beat_729_mhz: i64,
    pub harmonic: i64,
}

impl Default for ChainSection {
    fn default() -> Self {
        Self {
            nu_729_hz: None,
            target_hz: 1_122_842_857_334_736,
            n_729: 1_644_168,
            n_1068: None,
            f_ceo_mhz: 20_000_000_000,
            f_beat_729_mhz: 30_000_000_000,
            harmonic: 4,
        }
    }
}
