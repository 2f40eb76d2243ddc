//! Physical constants and externally sourced atomic data.
//!
//! Fundamental constants follow CODATA 2018. Atomic parameters that come
//! from other measurements live in [`CitedConstants`] together with a
//! provenance string so they can be audited and overridden from
//! configuration.

use core::f64::consts::PI;

/// Fundamental constants in SI units, plus the Bohr magneton in Hz/G.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// μ_B / h in Hz per gauss.
    pub bohr_magneton_over_h: f64,
    /// Planck constant, J·s.
    pub planck_h: f64,
    /// Elementary charge, C.
    pub elementary_charge: f64,
    /// Bohr radius, m.
    pub bohr_radius: f64,
    /// Speed of light, m/s.
    pub speed_of_light: f64,
    /// Vacuum permittivity, F/m.
    pub vacuum_permittivity: f64,
    /// Atomic mass unit, kg.
    pub atomic_mass_unit: f64,
}

pub const CODATA: PhysicalConstants = PhysicalConstants {
    bohr_magneton_over_h: 1.399_624_493_61e6,
    planck_h: 6.626_070_15e-34,
    elementary_charge: 1.602_176_634e-19,
    bohr_radius: 5.291_772_109_03e-11,
    speed_of_light: 299_792_458.0,
    vacuum_permittivity: 8.854_187_812_8e-12,
    atomic_mass_unit: 1.660_539_066_60e-27,
};

impl Default for PhysicalConstants {
    fn default() -> Self {
        CODATA
    }
}

impl PhysicalConstants {
    pub fn hbar(&self) -> f64 {
        self.planck_h / (2.0 * PI)
    }

    /// Coulomb constant e²/(4πε₀) in J·m.
    pub fn coulomb_k(&self) -> f64 {
        self.elementary_charge * self.elementary_charge / (4.0 * PI * self.vacuum_permittivity)
    }

    /// One e·a₀² in C·m².
    pub fn quadrupole_unit(&self) -> f64 {
        self.elementary_charge * self.bohr_radius * self.bohr_radius
    }
}

/// A number taken from outside this code base, with where it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cited {
    pub value: f64,
    pub provenance: &'static str,
}

impl Cited {
    pub const fn new(value: f64, provenance: &'static str) -> Self {
        Self { value, provenance }
    }
}

/// Externally measured atomic data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CitedConstants {
    pub g_al_1s0: Cited,
    pub g_al_3p1_f72: Cited,
    pub g_ca_s12: Cited,
    pub g_ca_d52: Cited,
    pub g_ca_d32: Cited,
    pub g_ca_p12: Cited,
    pub g_ca_p32: Cited,
    /// Θ(D₅/₂) in e·a₀².
    pub ca_d52_quadrupole: Cited,
    /// ⟨³P₁‖Q₂‖³P₁⟩ in e·a₀².
    pub al_3p1_quadrupole_rme: Cited,
    /// ³P₁ lifetime, s.
    pub al_3p1_lifetime: Cited,
    /// ³P₀ lifetime, s.
    pub al_3p0_lifetime: Cited,
    pub ca_d52_lifetime: Cited,
    pub ca_d32_lifetime: Cited,
    /// Fine-structure coupling constant ζ for Al⁺ 3s3p ³P, Hz.
    pub al_fine_structure_zeta: Cited,
    /// Ca⁺ S₁/₂–D₅/₂ absolute frequency, Hz.
    pub nu_ca: Cited,
    /// Uncertainty of `nu_ca`, Hz.
    pub nu_ca_sigma: Cited,
}

pub const CITED: CitedConstants = CitedConstants {
    g_al_1s0: Cited::new(-0.000_792_48, "Al+ 1S0 nuclear g-factor (Rosenband et al. 2007)"),
    g_al_3p1_f72: Cited::new(0.428_132, "Al+ 3P1 F=7/2 g-factor, QLS measurement"),
    g_ca_s12: Cited::new(2.002_256_64, "Ca+ S1/2 g-factor (Tommaseo et al. 2003)"),
    g_ca_d52: Cited::new(1.200_334_0, "Ca+ D5/2 g-factor (Chwalla et al. 2009)"),
    g_ca_d32: Cited::new(0.799_3, "Ca+ D3/2 Lande g-factor (LS coupling)"),
    g_ca_p12: Cited::new(0.665_9, "Ca+ P1/2 Lande g-factor (LS coupling)"),
    g_ca_p32: Cited::new(1.334_1, "Ca+ P3/2 Lande g-factor (LS coupling)"),
    ca_d52_quadrupole: Cited::new(1.83, "Ca+ D5/2 quadrupole moment (Roos et al. 2006)"),
    al_3p1_quadrupole_rme: Cited::new(
        -5.438_537,
        "calibrated: -7.4 Hz stretched-state shift for an 888 kHz Ca/Al in-phase mode",
    ),
    al_3p1_lifetime: Cited::new(300e-6, "Al+ 3P1 lifetime (Traebert et al. 1999)"),
    al_3p0_lifetime: Cited::new(20.6, "Al+ 3P0 lifetime (Rosenband et al. 2007)"),
    ca_d52_lifetime: Cited::new(1.168, "Ca+ D5/2 lifetime (Kreuter et al. 2005)"),
    ca_d32_lifetime: Cited::new(1.176, "Ca+ D3/2 lifetime (Kreuter et al. 2005)"),
    al_fine_structure_zeta: Cited::new(1.8591e12, "Al+ 3P fine-structure coupling constant"),
    nu_ca: Cited::new(
        411_042_129_776_398.0,
        "weighted mean of Huang 2016, Chwalla 2009, Matsubara 2012",
    ),
    nu_ca_sigma: Cited::new(4.0, "uncertainty of the Ca+ reference frequency"),
};

/// Ca⁺ S₁/₂–D₅/₂ reference frequency in integer Hz.
pub const NU_CA_HZ: i128 = 411_042_129_776_398;

/// Masses in atomic mass units as used for crystal mechanics.
pub mod mass {
    pub const CA40: f64 = 40.0;
    pub const AL27: f64 = 27.0;
    pub const ALH28: f64 = 28.0;
}

/// Nominal operating point of the apparatus.
pub mod apparatus {
    /// Bias field, G.
    pub const BIAS_FIELD_G: f64 = 4.0;
    /// Fractional coil current stability.
    pub const CURRENT_STABILITY: f64 = 3e-6;
    /// Al⁺ probe beam diameter, m.
    pub const AL_BEAM_DIAMETER_M: f64 = 65e-6;
    /// Al⁺ probe power at the ions, W.
    pub const AL_BEAM_POWER_W: f64 = 200e-6;
    /// Fundamental laser linewidth at 4 s, Hz.
    pub const PROBE_LASER_LINEWIDTH_HZ: f64 = 1.6;
    /// 729 nm laser linewidth, Hz.
    pub const CA_LASER_LINEWIDTH_HZ: f64 = 1.0;
    /// Trap rf drive, Hz.
    pub const RF_DRIVE_HZ: f64 = 32e6;
    /// Residual micromotion modulation index bound.
    pub const MAX_MODULATION_INDEX: f64 = 1e-2;
    /// Single Ca⁺ axial frequency, Hz.
    pub const CA_AXIAL_HZ: f64 = 820e3;
    /// Upper bound on cross-mode dispersive shifts, Hz.
    pub const CROSS_MODE_SHIFT_BOUND_HZ: f64 = 5.0;
    /// Bound on black-body, time-dilation and other unlisted shifts, Hz.
    pub const OTHER_SHIFTS_BOUND_HZ: f64 = 1.0;
}

/// Transition wavelengths in nm.
pub mod wavelength {
    pub const AL_INTERCOMBINATION_NM: f64 = 267.0;
    pub const AL_CLOCK_NM: f64 = 267.4;
    pub const AL_MAGNETIC_QUADRUPOLE_NM: f64 = 266.1;
    pub const AL_SINGLET_NM: f64 = 167.0;
    pub const CA_QUADRUPOLE_NM: f64 = 729.0;
    pub const CA_COOLING_NM: f64 = 397.0;
    pub const CA_REPUMP_D32_NM: f64 = 866.0;
    pub const CA_REPUMP_D52_NM: f64 = 854.0;
    pub const CA_S_P32_NM: f64 = 393.0;
    pub const AL_PROBE_FUNDAMENTAL_NM: f64 = 1068.0;
}
