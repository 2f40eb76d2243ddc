//! Brute-force reference for the master equation: the full Liouvillian as a
//! dense matrix, exponentiated per pulse.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use std::f64::consts::TAU;

use qls_core::dynamics::{CMatrix, NoiseModel, Pulse, QuantumState, Sideband, Target};
use rand::Rng;

pub type M = DMatrix<C>;

fn ket_bra(dim: usize, pairs: &[(usize, usize, C)]) -> M {
    let mut m = M::zeros(dim, dim);
    for &(i, j, v) in pairs {
        m[(i, j)] += v;
    }
    m
}

/// H = −(Δ − δ_ls)|e⟩⟨e| + (Ω/2)(e^{−iφ} σ₊ C + h.c.) on {g, e} ⊗ {0 … n_max}.
pub fn hamiltonian(n_max: usize, p: &Pulse) -> M {
    let l = n_max + 1;
    let d = 2 * l;
    let mut h = M::zeros(d, d);
    let shift = if p.rabi_freq != 0.0 { p.light_shift } else { 0.0 };
    for n in 0..l {
        h[(l + n, l + n)] = C::new(-(p.detuning - shift), 0.0);
    }
    let sigma_plus = ket_bra(d, &(0..l).map(|n| (l + n, n, C::new(1.0, 0.0))).collect::<Vec<_>>());
    let mut a = M::zeros(l, l);
    for n in 1..l {
        a[(n - 1, n)] = C::new((n as f64).sqrt(), 0.0);
    }
    let id2 = M::identity(2, 2);
    let big_a = id2.kronecker(&a);
    let coupling = match p.sideband {
        Sideband::Carrier => M::identity(d, d),
        Sideband::Red => big_a.clone() * C::new(p.lamb_dicke, 0.0),
        Sideband::Blue => big_a.adjoint() * C::new(p.lamb_dicke, 0.0),
    };
    let up = sigma_plus * coupling * C::from_polar(0.5 * p.rabi_freq, -p.phase);
    h += &up + up.adjoint();
    h
}

pub fn jump_operators(n_max: usize, noise: &NoiseModel) -> Vec<M> {
    let l = n_max + 1;
    let d = 2 * l;
    let mut out = Vec::new();
    let lower = ket_bra(d, &(0..l).map(|n| (n, l + n, C::new(1.0, 0.0))).collect::<Vec<_>>());
    out.push(lower * C::new(noise.spontaneous_decay_rate.sqrt(), 0.0));
    let mut sz = M::zeros(d, d);
    for n in 0..l {
        sz[(l + n, l + n)] = C::new(1.0, 0.0);
        sz[(n, n)] = C::new(-1.0, 0.0);
    }
    out.push(sz * C::new((0.5 * noise.laser_dephasing_rate).sqrt(), 0.0));
    let mut a = M::zeros(l, l);
    for n in 1..l {
        a[(n - 1, n)] = C::new((n as f64).sqrt(), 0.0);
    }
    let big_a = M::identity(2, 2).kronecker(&a);
    let r = C::new(noise.heating_rate.sqrt(), 0.0);
    out.push(big_a.adjoint() * r);
    out.push(big_a * r);
    out
}

/// Superoperator acting on column-stacked ρ: vec(AρB) = (Bᵀ ⊗ A) vec(ρ).
pub fn liouvillian(n_max: usize, p: &Pulse, noise: &NoiseModel) -> M {
    let d = 2 * (n_max + 1);
    let id = M::identity(d, d);
    let h = hamiltonian(n_max, p);
    let i = C::new(0.0, 1.0);
    let mut lv = (id.kronecker(&h) - h.transpose().kronecker(&id)) * (-i);
    for l in jump_operators(n_max, noise) {
        let ldl = l.adjoint() * &l;
        lv += l.conjugate().kronecker(&l);
        lv -= (id.kronecker(&ldl) + ldl.transpose().kronecker(&id)) * C::new(0.5, 0.0);
    }
    lv
}

pub fn to_nalgebra(s: &QuantumState) -> M {
    let d = s.dim();
    let flat = s.density_matrix().as_slice();
    M::from_fn(d, d, |i, j| flat[i * d + j])
}

pub fn from_nalgebra(n_max: usize, rho: &M) -> QuantumState {
    let d = rho.nrows();
    let data: Vec<C> = (0..d * d).map(|k| rho[(k / d, k % d)]).collect();
    QuantumState::from_density(n_max, CMatrix::from_vec(d, data).unwrap()).unwrap()
}

/// ρ after each pulse in turn, by exp(ℒ t) on the vectorised state.
pub fn propagate(state: &QuantumState, pulses: &[Pulse], noise: &NoiseModel) -> M {
    let n_max = state.n_max();
    let d = state.dim();
    let rho = to_nalgebra(state);
    let mut v = nalgebra::DVector::from_iterator(d * d, rho.iter().cloned());
    for p in pulses {
        let prop = (liouvillian(n_max, p, noise) * C::new(p.duration, 0.0)).exp();
        v = prop * v;
    }
    M::from_iterator(d, d, v.iter().cloned())
}

/// ½ Σ|λᵢ| of the Hermitian difference.
pub fn trace_distance(a: &M, b: &M) -> f64 {
    let diff = a - b;
    let herm = (&diff + diff.adjoint()) * C::new(0.5, 0.0);
    0.5 * herm.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
}

/// Random full-rank density matrix A A† / tr A A†.
pub fn random_density<R: Rng>(d: usize, rng: &mut R) -> M {
    let a = M::from_fn(d, d, |_, _| {
        C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn random_pulse<R: Rng>(rng: &mut R) -> Pulse {
    let sideband = [Sideband::Red, Sideband::Carrier, Sideband::Blue][rng.random_range(0..3)];
    Pulse {
        target: Target::Spectroscopy,
        rabi_freq: TAU * rng.random_range(0.0..150e3),
        detuning: TAU * rng.random_range(-40e3..40e3),
        phase: rng.random_range(0.0..TAU),
        duration: rng.random_range(0.0..20e-6),
        sideband,
        lamb_dicke: rng.random_range(0.0..0.3),
        light_shift: TAU * rng.random_range(-5e3..5e3),
    }
}

pub fn random_noise<R: Rng>(rng: &mut R) -> NoiseModel {
    NoiseModel {
        spontaneous_decay_rate: rng.random_range(0.0..5e3),
        laser_dephasing_rate: rng.random_range(0.0..5e3),
        heating_rate: rng.random_range(0.0..500.0),
        ..NoiseModel::ideal()
    }
}
