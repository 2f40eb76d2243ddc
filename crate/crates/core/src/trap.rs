//! Two-ion Coulomb crystal mechanics in a linear Paul trap.
//!
//! The trap is described by the secular frequencies of a single reference
//! ion. Other masses are obtained by splitting the radial confinement into
//! an rf pseudopotential part (ω² ∝ 1/m²) and a static part (ω² ∝ 1/m);
//! the static part obeys Laplace's equation together with the axial
//! confinement, with `dc_radial_asymmetry` lifting the x/y degeneracy.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::constants::{mass, PhysicalConstants};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPair {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrapConfig {
    /// Axial secular frequency of a single reference ion, Hz.
    pub axial_freq_reference_ion: f64,
    /// Radial secular frequencies of a single reference ion, Hz.
    pub radial_freqs_reference_ion: RadialPair,
    /// Static quadrupole splitting x/y, Hz; sign picks the stiffer axis.
    pub dc_radial_asymmetry: f64,
    pub rf_drive_freq: f64,
    pub residual_modulation_index: f64,
    /// Mass of the ion the frequencies refer to, u.
    pub reference_mass: f64,
    /// Heating rates per mode, phonons/s, indexed by [`ModeLabel::index`].
    pub heating_rates: [f64; 6],
    /// Mean phonon number per mode after cooling.
    pub mean_phonon_numbers: [f64; 6],
}

impl Default for TrapConfig {
    /// Operating point that reproduces the published Ca⁺/Al⁺ sideband spectrum.
    fn default() -> Self {
        let mut heating = [0.0; 6];
        heating[ModeLabel::AXIAL_IN.index()] = 70.0;
        heating[ModeLabel::AXIAL_OUT.index()] = 0.8;
        let mut nbar = [8.0; 6];
        nbar[ModeLabel::AXIAL_IN.index()] = 0.05;
        nbar[ModeLabel::AXIAL_OUT.index()] = 0.05;
        Self {
            axial_freq_reference_ion: 820e3,
            radial_freqs_reference_ion: RadialPair { x: 1.343e6, y: 1.168e6 },
            dc_radial_asymmetry: 0.455e6,
            rf_drive_freq: 32e6,
            residual_modulation_index: 5e-3,
            reference_mass: mass::CA40,
            heating_rates: heating,
            mean_phonon_numbers: nbar,
        }
    }
}

impl TrapConfig {
    pub fn validate(&self) -> Result<()> {
        let freqs = [
            self.axial_freq_reference_ion,
            self.radial_freqs_reference_ion.x,
            self.radial_freqs_reference_ion.y,
            self.rf_drive_freq,
        ];
        if freqs.iter().any(|f| !(*f > 0.0 && f.is_finite())) {
            return Err(Error::Config("trap frequencies must be positive and finite".into()));
        }
        if !(self.reference_mass > 0.0) {
            return Err(Error::Config("reference mass must be positive".into()));
        }
        if !(0.0..=1e-2).contains(&self.residual_modulation_index) {
            return Err(Error::Config(alloc::format!(
                "residual modulation index {} outside [0, 1e-2]",
                self.residual_modulation_index
            )));
        }
        if self
            .heating_rates
            .iter()
            .chain(self.mean_phonon_numbers.iter())
            .any(|v| !(*v >= 0.0))
        {
            return Err(Error::Config("heating rates and phonon numbers must be >= 0".into()));
        }
        Ok(())
    }

    fn omega_z_sq(&self) -> f64 {
        let w = 2.0 * PI * self.axial_freq_reference_ion;
        w * w
    }

    /// Static radial curvature for the reference ion, (rad/s)², x then y.
    fn dc_radial(&self) -> (f64, f64) {
        let a = 2.0 * PI * self.dc_radial_asymmetry;
        let a = a.signum() * a * a;
        let half = -0.5 * self.omega_z_sq();
        (half + a, half - a)
    }

    /// Single-ion secular angular frequencies squared for an ion of `mass_u`.
    pub fn single_ion_omega_sq(&self, mass_u: f64) -> [f64; 3] {
        let ratio = self.reference_mass / mass_u;
        let (dcx, dcy) = self.dc_radial();
        let wx = 2.0 * PI * self.radial_freqs_reference_ion.x;
        let wy = 2.0 * PI * self.radial_freqs_reference_ion.y;
        let px = wx * wx - dcx;
        let py = wy * wy - dcy;
        [
            self.omega_z_sq() * ratio,
            px * ratio * ratio + dcx * ratio,
            py * ratio * ratio + dcy * ratio,
        ]
    }

    /// Axial trap curvature ∂²Φ/∂z² from the electrodes alone, V/m².
    pub fn axial_field_gradient(&self, c: &PhysicalConstants) -> f64 {
        self.reference_mass * c.atomic_mass_unit * self.omega_z_sq() / c.elementary_charge
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Axial,
    RadialX,
    RadialY,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Axial => "z",
            Direction::RadialX => "x",
            Direction::RadialY => "y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    InPhase,
    OutOfPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeLabel {
    pub direction: Direction,
    pub phase: Phase,
}

impl ModeLabel {
    pub const AXIAL_IN: Self = Self::new(Direction::Axial, Phase::InPhase);
    pub const AXIAL_OUT: Self = Self::new(Direction::Axial, Phase::OutOfPhase);
    pub const X_IN: Self = Self::new(Direction::RadialX, Phase::InPhase);
    pub const X_OUT: Self = Self::new(Direction::RadialX, Phase::OutOfPhase);
    pub const Y_IN: Self = Self::new(Direction::RadialY, Phase::InPhase);
    pub const Y_OUT: Self = Self::new(Direction::RadialY, Phase::OutOfPhase);

    pub const ALL: [ModeLabel; 6] = [
        Self::AXIAL_IN,
        Self::AXIAL_OUT,
        Self::X_IN,
        Self::X_OUT,
        Self::Y_IN,
        Self::Y_OUT,
    ];

    pub const fn new(direction: Direction, phase: Phase) -> Self {
        Self { direction, phase }
    }

    pub fn index(self) -> usize {
        let d = match self.direction {
            Direction::Axial => 0,
            Direction::RadialX => 2,
            Direction::RadialY => 4,
        };
        d + matches!(self.phase, Phase::OutOfPhase) as usize
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.phase {
            Phase::InPhase => "i",
            Phase::OutOfPhase => "o",
        };
        write!(f, "{},{}", self.direction.name(), p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalMode {
    pub label: ModeLabel,
    /// Hz.
    pub frequency: f64,
    /// Mass-weighted participation of ion 1 and ion 2, unit norm.
    pub eigenvector: [f64; 2],
    /// phonons/s.
    pub heating_rate: f64,
    pub mean_phonon_number: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonPair {
    /// u
    pub mass_1: f64,
    /// u
    pub mass_2: f64,
}

impl IonPair {
    pub fn new(mass_1: f64, mass_2: f64) -> Self {
        Self { mass_1, mass_2 }
    }

    pub fn ca_al() -> Self {
        Self::new(mass::CA40, mass::AL27)
    }

    pub fn swapped(self) -> Self {
        Self::new(self.mass_2, self.mass_1)
    }

    pub fn masses(&self) -> [f64; 2] {
        [self.mass_1, self.mass_2]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crystal {
    pub pair: IonPair,
    /// Axial equilibrium positions, m.
    pub equilibrium: [f64; 2],
    /// All six modes sorted by frequency.
    pub modes: Vec<NormalMode>,
}

impl Crystal {
    pub fn separation(&self) -> f64 {
        (self.equilibrium[1] - self.equilibrium[0]).abs()
    }

    pub fn mode(&self, label: ModeLabel) -> &NormalMode {
        self.modes
            .iter()
            .find(|m| m.label == label)
            .expect("crystal always carries all six modes")
    }

    /// Total ∂²Φ/∂z² at either ion: electrodes plus the neighbouring ion.
    pub fn field_gradient_at_ion(&self, trap: &TrapConfig, c: &PhysicalConstants) -> f64 {
        let d = self.separation();
        let coulomb = 2.0 * c.elementary_charge / (4.0 * PI * c.vacuum_permittivity * d * d * d);
        trap.axial_field_gradient(c) + coulomb
    }

    pub fn lamb_dicke(
        &self,
        label: ModeLabel,
        ion_index: usize,
        wavelength_nm: f64,
        projection_cosine: f64,
        c: &PhysicalConstants,
    ) -> Result<f64> {
        let m = self.pair.masses()[ion_index.min(1)];
        lamb_dicke(self.mode(label), m, ion_index, wavelength_nm, projection_cosine, c)
    }
}

/// Symmetric 2×2 eigenproblem, eigenvalues ascending with unit eigenvectors.
fn sym_eigen2(a: f64, b: f64, d: f64) -> [(f64, [f64; 2]); 2] {
    let mean = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let r = half_diff.hypot(b);
    let (lo, hi) = (mean - r, mean + r);
    let vec_for = |lambda: f64| -> [f64; 2] {
        // pick the better conditioned of the two rows of (A − λ)v = 0
        let (u, v) = if (a - lambda).abs() > (d - lambda).abs() {
            (-b, a - lambda)
        } else {
            (d - lambda, -b)
        };
        let n = u.hypot(v);
        if n == 0.0 {
            if lambda == lo {
                [1.0, 0.0]
            } else {
                [0.0, 1.0]
            }
        } else {
            [u / n, v / n]
        }
    };
    let v_lo = vec_for(lo);
    let v_hi = [-v_lo[1], v_lo[0]];
    [(lo, v_lo), (hi, v_hi)]
}

/// Damped Newton solve of ½(x₁² + x₂²) + 1/|x₁ − x₂| in natural units.
fn equilibrium_natural() -> Result<[f64; 2]> {
    let mut x = [-0.6, 0.6];
    let force = |x: &[f64; 2]| -> [f64; 2] {
        let d = x[1] - x[0];
        let f = 1.0 / (d * d);
        [-x[0] - f, -x[1] + f]
    };
    for _ in 0..200 {
        let f = force(&x);
        let fnorm = f[0].abs().max(f[1].abs());
        if fnorm < 1e-15 {
            return Ok(x);
        }
        let d = x[1] - x[0];
        let k = 2.0 / (d * d * d);
        // Hessian [[1+k, -k], [-k, 1+k]]
        let (h11, h12) = (1.0 + k, -k);
        let det = h11 * h11 - h12 * h12;
        let step = [(h11 * f[0] - h12 * f[1]) / det, (h11 * f[1] - h12 * f[0]) / det];
        let mut t = 1.0;
        loop {
            let trial = [x[0] + t * step[0], x[1] + t * step[1]];
            let ft = force(&trial);
            let tn = ft[0].abs().max(ft[1].abs());
            if trial[1] > trial[0] && (tn < fnorm || t < 1e-6) {
                x = trial;
                break;
            }
            t *= 0.5;
        }
    }
    Err(Error::Numerical("crystal equilibrium did not converge".into()))
}

/// Equilibrium positions and all six normal modes of a two-ion crystal.
pub fn solve_crystal(trap: &TrapConfig, pair: IonPair, c: &PhysicalConstants) -> Result<Crystal> {
    trap.validate()?;
    if !(pair.mass_1 > 0.0 && pair.mass_2 > 0.0) {
        return Err(Error::Config("ion masses must be positive".into()));
    }
    let u = c.atomic_mass_unit;
    let ke2 = c.coulomb_k();
    // axial spring constant is mass independent
    let kz = trap.reference_mass * u * trap.omega_z_sq();
    let length = (ke2 / kz).cbrt();
    let eq = equilibrium_natural()?;
    let equilibrium = [eq[0] * length, eq[1] * length];
    let d = (equilibrium[1] - equilibrium[0]).abs();
    let kc = ke2 / (d * d * d);

    let m = [pair.mass_1 * u, pair.mass_2 * u];
    let w1 = trap.single_ion_omega_sq(pair.mass_1);
    let w2 = trap.single_ion_omega_sq(pair.mass_2);
    let springs = |axis: usize| [m[0] * w1[axis], m[1] * w2[axis]];

    let mut modes = Vec::with_capacity(6);
    let directions = [Direction::Axial, Direction::RadialX, Direction::RadialY];
    for (axis, direction) in directions.into_iter().enumerate() {
        let k = springs(axis);
        let (k11, k22, k12) = match direction {
            Direction::Axial => (k[0] + 2.0 * kc, k[1] + 2.0 * kc, -2.0 * kc),
            _ => (k[0] - kc, k[1] - kc, kc),
        };
        let s = [m[0].sqrt(), m[1].sqrt()];
        let eig = sym_eigen2(k11 / m[0], k12 / (s[0] * s[1]), k22 / m[1]);
        for (lambda, v) in eig {
            if !(lambda > 0.0) {
                return Err(Error::Instability {
                    direction: direction.name(),
                    eigenvalue: lambda,
                });
            }
            let phase = if v[0] * v[1] >= 0.0 {
                Phase::InPhase
            } else {
                Phase::OutOfPhase
            };
            let label = ModeLabel::new(direction, phase);
            // sign convention: first nonzero component positive
            let sign = if v[0] != 0.0 { v[0].signum() } else { v[1].signum() };
            modes.push(NormalMode {
                label,
                frequency: lambda.sqrt() / (2.0 * PI),
                eigenvector: [sign * v[0], sign * v[1]],
                heating_rate: trap.heating_rates[label.index()],
                mean_phonon_number: trap.mean_phonon_numbers[label.index()],
            });
        }
    }
    if modes[0].label.phase == modes[1].label.phase {
        // degenerate masses with a zero component can make the sign test ambiguous
        modes[1].label.phase = Phase::OutOfPhase;
        modes[0].label.phase = Phase::InPhase;
    }
    modes.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    Ok(Crystal {
        pair,
        equilibrium,
        modes,
    })
}

/// Axial in-phase and out-of-phase frequencies ν₁√((1+r) ∓ √((1−r)²+r)), r = m₁/m₂.
pub fn axial_modes_closed_form(m1: f64, m2: f64, nu1: f64) -> (f64, f64) {
    let r = m1 / m2;
    let root = ((1.0 - r) * (1.0 - r) + r).sqrt();
    (nu1 * (1.0 + r - root).sqrt(), nu1 * (1.0 + r + root).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassInference {
    /// Continuous root, u.
    pub mass: f64,
    pub nearest_integer: u32,
    /// 1σ mass uncertainty from the frequency uncertainty, u.
    pub sigma: f64,
    /// Two or more integer masses lie within 2σ of the root.
    pub ambiguous: bool,
}

const MASS_BRACKET: (f64, f64) = (1.0, 300.0);

/// Companion mass from a measured axial in-phase (tickle) frequency.
pub fn infer_companion_mass(
    measured_in_phase: f64,
    freq_sigma: f64,
    trap: &TrapConfig,
    known_mass: f64,
) -> Result<MassInference> {
    let nu1 = trap.axial_freq_reference_ion * (trap.reference_mass / known_mass).sqrt();
    let g = |m2: f64| axial_modes_closed_form(known_mass, m2, nu1).0 - measured_in_phase;
    let (mut lo, mut hi) = MASS_BRACKET;
    let (mut glo, ghi) = (g(lo), g(hi));
    if !(glo.is_finite() && ghi.is_finite()) || glo.signum() == ghi.signum() {
        if glo == 0.0 || ghi == 0.0 {
            let m = if glo == 0.0 { lo } else { hi };
            return Ok(finish_inference(m, freq_sigma, known_mass, nu1));
        }
        return Err(Error::OutOfRange(alloc::format!(
            "in-phase frequency {measured_in_phase} Hz has no companion mass in [{lo}, {hi}] u"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 || (hi - lo) < 1e-13 * mid {
            lo = mid;
            hi = mid;
            break;
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(finish_inference(0.5 * (lo + hi), freq_sigma, known_mass, nu1))
}

fn finish_inference(m: f64, freq_sigma: f64, known_mass: f64, nu1: f64) -> MassInference {
    let h = 1e-4 * m;
    let slope = (axial_modes_closed_form(known_mass, m + h, nu1).0 - axial_modes_closed_form(known_mass, m - h, nu1).0)
        / (2.0 * h);
    let sigma = if slope != 0.0 {
        (freq_sigma / slope).abs()
    } else {
        f64::INFINITY
    };
    let lo = (m - 2.0 * sigma).ceil();
    let hi = (m + 2.0 * sigma).floor();
    MassInference {
        mass: m,
        nearest_integer: m.round() as u32,
        sigma,
        ambiguous: hi - lo >= 1.0,
    }
}

/// η = (2π/λ) cosθ b_ion √(ħ / (2 m_ion ω)).
pub fn lamb_dicke(
    mode: &NormalMode,
    ion_mass_u: f64,
    ion_index: usize,
    wavelength_nm: f64,
    projection_cosine: f64,
    c: &PhysicalConstants,
) -> Result<f64> {
    if !(-1.0..=1.0).contains(&projection_cosine) {
        return Err(Error::Domain(alloc::format!(
            "projection cosine {projection_cosine} outside [-1, 1]"
        )));
    }
    if ion_index > 1 {
        return Err(Error::Domain(alloc::format!("ion index {ion_index} out of range")));
    }
    if !(mode.frequency > 0.0) {
        return Err(Error::Domain("mode frequency must be positive".into()));
    }
    let k = 2.0 * PI / (wavelength_nm * 1e-9);
    let omega = 2.0 * PI * mode.frequency;
    let m = ion_mass_u * c.atomic_mass_unit;
    Ok(k * projection_cosine * mode.eigenvector[ion_index] * (c.hbar() / (2.0 * m * omega)).sqrt())
}
