use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use super::integrator::{dopri5, IntegratorOptions};
use super::matrix::{CMatrix, SparseOp};
use super::state::QuantumState;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Target {
    #[default]
    Spectroscopy,
    Logic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sideband {
    Red,
    #[default]
    Carrier,
    Blue,
}

impl Sideband {
    pub fn order(self) -> i8 {
        match self {
            Sideband::Red => -1,
            Sideband::Carrier => 0,
            Sideband::Blue => 1,
        }
    }
}

impl TryFrom<i8> for Sideband {
    type Error = Error;
    fn try_from(order: i8) -> Result<Self> {
        match order {
            -1 => Ok(Sideband::Red),
            0 => Ok(Sideband::Carrier),
            1 => Ok(Sideband::Blue),
            _ => Err(Error::Domain(format!("sideband order {order} not in {{-1, 0, 1}}"))),
        }
    }
}

/// Square pulse in the frame rotating with the laser.
///
/// H = −(Δ − δ_ls)|e⟩⟨e| + (Ω/2)(e^{−iφ} σ₊ C + h.c.) with C = 1, ηa or ηa†.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pulse {
    pub target: Target,
    /// Ω, rad/s.
    pub rabi_freq: f64,
    /// Δ = ω_laser − ω_atom, rad/s.
    pub detuning: f64,
    /// rad
    pub phase: f64,
    /// s
    pub duration: f64,
    pub sideband: Sideband,
    pub lamb_dicke: f64,
    /// ac-Stark shift of the atomic resonance while the light is on, rad/s.
    pub light_shift: f64,
}

impl Pulse {
    pub fn carrier(rabi_freq: f64, duration: f64) -> Self {
        Self {
            rabi_freq,
            duration,
            ..Default::default()
        }
    }

    pub fn sideband(sideband: Sideband, rabi_freq: f64, lamb_dicke: f64, duration: f64) -> Self {
        Self {
            rabi_freq,
            duration,
            sideband,
            lamb_dicke,
            ..Default::default()
        }
    }

    /// Free evolution; keep the detuning so the rotating frame stays the laser's.
    pub fn wait(duration: f64) -> Self {
        Self::carrier(0.0, duration)
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = target;
        self
    }

    pub fn with_light_shift(mut self, light_shift: f64) -> Self {
        self.light_shift = light_shift;
        self
    }

    /// Coupling strength that multiplies √n or √(n+1).
    pub fn effective_rabi(&self) -> f64 {
        match self.sideband {
            Sideband::Carrier => self.rabi_freq,
            _ => self.rabi_freq * self.lamb_dicke,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.rabi_freq,
            self.detuning,
            self.phase,
            self.duration,
            self.lamb_dicke,
            self.light_shift,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("pulse parameters must be finite".into()));
        }
        if self.duration < 0.0 {
            return Err(Error::Domain(format!("pulse duration {} < 0", self.duration)));
        }
        if self.lamb_dicke < 0.0 {
            return Err(Error::Domain(format!("Lamb-Dicke factor {} < 0", self.lamb_dicke)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseModel {
    /// Γ, 1/s.
    pub spontaneous_decay_rate: f64,
    /// γ, 1/s; the e–g coherence decays at this rate.
    pub laser_dephasing_rate: f64,
    pub thermal_nbar: f64,
    /// Linear laser frequency drift, Hz/s, referenced to the sequence start.
    pub drift_rate: f64,
    /// Motional heating, phonons/s.
    pub heating_rate: f64,
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            self.spontaneous_decay_rate,
            self.laser_dephasing_rate,
            self.thermal_nbar,
            self.heating_rate,
        ];
        if rates.iter().any(|r| !(*r >= 0.0 && r.is_finite())) || !self.drift_rate.is_finite() {
            return Err(Error::Domain("noise rates must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Generator of one pulse: ρ̇ = −i(H_eff ρ − ρ H_eff†) + Σ L ρ L† + drift term.
struct Generator {
    dim: usize,
    h_eff: SparseOp,
    jumps: Vec<SparseOp>,
    excited_start: usize,
    drift: f64,
}

impl Generator {
    fn new(n_max: usize, pulse: &Pulse, noise: &NoiseModel) -> Self {
        let levels = n_max + 1;
        let dim = 2 * levels;
        let g = |n: usize| n;
        let e = |n: usize| levels + n;

        let mut h = SparseOp::default();
        let delta = pulse.detuning - pulse.light_shift * (pulse.rabi_freq != 0.0) as u8 as f64;
        for n in 0..levels {
            h.push(e(n), e(n), C64::new(-delta, 0.0));
        }
        let half = 0.5 * pulse.effective_rabi();
        let up = C64::from_polar(half, -pulse.phase);
        if half != 0.0 {
            for n in 0..levels {
                // (row = excited, col = ground, amplitude)
                let coupling = match pulse.sideband {
                    Sideband::Carrier => Some((e(n), g(n), 1.0)),
                    Sideband::Blue => (n + 1 < levels).then(|| (e(n + 1), g(n), ((n + 1) as f64).sqrt())),
                    Sideband::Red => (n >= 1).then(|| (e(n - 1), g(n), (n as f64).sqrt())),
                };
                if let Some((r, c, amp)) = coupling {
                    h.push(r, c, up * amp);
                    h.push(c, r, up.conj() * amp);
                }
            }
        }

        let mut jumps = Vec::new();
        if noise.spontaneous_decay_rate > 0.0 {
            let mut l = SparseOp::default();
            for n in 0..levels {
                l.push(g(n), e(n), C64::new(1.0, 0.0));
            }
            jumps.push(l.scaled(noise.spontaneous_decay_rate.sqrt()));
        }
        if noise.laser_dephasing_rate > 0.0 {
            let mut l = SparseOp::default();
            for n in 0..levels {
                l.push(e(n), e(n), C64::new(1.0, 0.0));
                l.push(g(n), g(n), C64::new(-1.0, 0.0));
            }
            jumps.push(l.scaled((0.5 * noise.laser_dephasing_rate).sqrt()));
        }
        if noise.heating_rate > 0.0 {
            let mut down = SparseOp::default();
            let mut up_op = SparseOp::default();
            for n in 1..levels {
                let amp = C64::new((n as f64).sqrt(), 0.0);
                for off in [0, levels] {
                    let s = |k: usize| off + k;
                    down.push(s(n - 1), s(n), amp);
                    up_op.push(s(n), s(n - 1), amp);
                }
            }
            let r = noise.heating_rate.sqrt();
            jumps.push(down.scaled(r));
            jumps.push(up_op.scaled(r));
        }

        let mut h_eff = h;
        for l in &jumps {
            for (i, j, v) in l.dagger_times_self(dim).entries {
                h_eff.push(i, j, C64::new(0.0, -0.5) * v);
            }
        }
        Self {
            dim,
            h_eff,
            jumps,
            excited_start: levels,
            drift: 2.0 * PI * noise.drift_rate,
        }
    }

    fn rhs(&self, t: f64, rho: &[C64], out: &mut [C64]) {
        let d = self.dim;
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        // A = H_eff ρ; out = −i A
        for &(i, k, v) in &self.h_eff.entries {
            let v = C64::new(v.im, -v.re); // −i·v
            let src = &rho[k * d..(k + 1) * d];
            let dst = &mut out[i * d..(i + 1) * d];
            for j in 0..d {
                dst[j] += v * src[j];
            }
        }
        // drift adds −δ(t)|e⟩⟨e| to H
        if self.drift != 0.0 {
            let w = C64::new(0.0, self.drift * t);
            for i in self.excited_start..d {
                for j in 0..d {
                    out[i * d + j] += w * rho[i * d + j];
                }
            }
        }
        // ρ̇ = −iA + (−iA)† for the Hamiltonian and anti-commutator part
        for i in 0..d {
            for j in i..d {
                let a = out[i * d + j];
                let b = out[j * d + i];
                let s = a + b.conj();
                out[i * d + j] = s;
                out[j * d + i] = s.conj();
            }
        }
        for l in &self.jumps {
            for &(i, k, a) in &l.entries {
                for &(j, m, b) in &l.entries {
                    out[i * d + j] += a * rho[k * d + m] * b.conj();
                }
            }
        }
    }

    /// Rough spectral radius used to seed the step size.
    fn scale(&self) -> f64 {
        let mut row = alloc::vec![0.0f64; self.dim];
        for &(i, _, v) in &self.h_eff.entries {
            row[i] += v.norm();
        }
        2.0 * row.iter().cloned().fold(0.0, f64::max) + self.drift.abs()
    }
}

fn validate_inputs(state: &QuantumState, pulses: &[Pulse], noise: &NoiseModel) -> Result<()> {
    noise.validate()?;
    pulses.iter().try_for_each(Pulse::validate)?;
    if (state.trace() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("initial state trace is not 1".into()));
    }
    Ok(())
}

fn step_hint(gen: &Generator, duration: f64) -> f64 {
    let s = gen.scale();
    if s > 0.0 {
        (0.5 / s).min(duration)
    } else {
        duration
    }
}

fn check_tail(rho: &CMatrix, n_max: usize) {
    let levels = n_max + 1;
    let tail = rho[(n_max, n_max)].re + rho[(levels + n_max, levels + n_max)].re;
    if tail > 1e-6 && n_max > 0 {
        log::warn!("population {tail:.2e} in top Fock level {n_max}; raise the cutoff");
    }
}

/// Integrates the master equation through a pulse sequence.
pub fn evolve(state: &QuantumState, pulses: &[Pulse], noise: &NoiseModel) -> Result<QuantumState> {
    evolve_with(state, pulses, noise, &IntegratorOptions::default())
}

pub fn evolve_with(
    state: &QuantumState,
    pulses: &[Pulse],
    noise: &NoiseModel,
    opts: &IntegratorOptions,
) -> Result<QuantumState> {
    validate_inputs(state, pulses, noise)?;
    let n_max = state.n_max();
    let mut y = state.density_matrix().clone().into_vec();
    let mut t = 0.0;
    for p in pulses {
        let gen = Generator::new(n_max, p, noise);
        let o = IntegratorOptions {
            initial_step: Some(opts.initial_step.unwrap_or(step_hint(&gen, p.duration))),
            ..*opts
        };
        dopri5(|tt, r, out| gen.rhs(tt, r, out), t, t + p.duration, &mut y, &o)?;
        t += p.duration;
        let rho = CMatrix::from_vec(gen.dim, y.clone()).expect("dimension preserved");
        check_tail(&rho, n_max);
    }
    let rho = CMatrix::from_vec(state.dim(), y).expect("dimension preserved");
    Ok(QuantumState::from_raw(n_max, rho))
}

/// Excited population after one pulse of each duration in `durations`
/// (ascending), integrating once through all of them.
pub fn evolve_sampled(
    state: &QuantumState,
    pulse: &Pulse,
    durations: &[f64],
    noise: &NoiseModel,
) -> Result<Vec<QuantumState>> {
    validate_inputs(state, core::slice::from_ref(pulse), noise)?;
    if durations.windows(2).any(|w| w[1] < w[0]) || durations.first().is_some_and(|d| *d < 0.0) {
        return Err(Error::Domain("durations must be ascending and >= 0".into()));
    }
    let n_max = state.n_max();
    let gen = Generator::new(n_max, pulse, noise);
    let last = durations.last().copied().unwrap_or(0.0);
    let opts = IntegratorOptions {
        initial_step: Some(step_hint(&gen, last.max(f64::MIN_POSITIVE))),
        ..Default::default()
    };
    let mut y = state.density_matrix().clone().into_vec();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(durations.len());
    for &d in durations {
        dopri5(|tt, r, o| gen.rhs(tt, r, o), t, d, &mut y, &opts)?;
        t = d;
        let rho = CMatrix::from_vec(gen.dim, y.clone()).expect("dimension preserved");
        check_tail(&rho, n_max);
        out.push(QuantumState::from_raw(n_max, rho));
    }
    Ok(out)
}
