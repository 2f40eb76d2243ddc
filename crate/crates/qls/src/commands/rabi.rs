//! Rabi flops on the Al⁺ carrier or blue sideband, read out through the
//! quantum-logic protocol.

use std::f64::consts::PI;

use qls_core::dynamics::{fock_cutoff, rabi_curve, NoiseModel, Pulse, QuantumState, Sideband};
use qls_core::metrology::{damped_cosine, levenberg_marquardt, CurveFit};
use qls_core::protocol::{run_batch, ProbeSpec};
use qls_core::rng::substream_seed;
use qls_core::trap::ModeLabel;
use rayon::prelude::*;
use serde_json::json;

use super::{fit_sigma, linspace, Context, Outputs};
use crate::config::{Config, RabiTransition};
use crate::error::CliResult;
use crate::io::{num, Table};
use crate::plot::{Series, Style};

/// Nominal Lamb-Dicke factor; only the product ηΩ enters a sideband flop.
const ETA: f64 = 0.1;

pub struct RabiPoint {
    pub duration: f64,
    pub model: f64,
    pub measured: f64,
    pub sigma: f64,
}

pub struct Rabi {
    pub points: Vec<RabiPoint>,
    pub fit: Option<CurveFit>,
}

pub fn template_and_noise(cfg: &Config) -> CliResult<(Pulse, QuantumState, NoiseModel)> {
    let r = &cfg.rabi;
    let decay = r.decay_rate_per_s.unwrap_or(1.0 / cfg.constants.al_3p1_lifetime_s);
    let bus = ModeLabel::AXIAL_OUT.index();
    let nbar = cfg.protocol.cooling_result_nbar[bus];
    let (pulse, state, heating) = match r.transition {
        RabiTransition::Carrier => (
            Pulse::carrier(PI / r.carrier_pi_time_s, 0.0),
            QuantumState::ground(0),
            0.0,
        ),
        RabiTransition::Blue => (
            Pulse::sideband(Sideband::Blue, PI / (ETA * r.sideband_pi_time_s), ETA, 0.0),
            // room above the thermal cutoff for phonons added by the sideband and heating
            QuantumState::thermal_with_cutoff(
                nbar,
                fock_cutoff(nbar + cfg.trap.heating_rates_per_s[bus] * r.t_max_s) + 4,
            )?,
            cfg.trap.heating_rates_per_s[bus],
        ),
    };
    let noise = NoiseModel {
        spontaneous_decay_rate: decay,
        laser_dephasing_rate: r.dephasing_rate_per_s,
        thermal_nbar: nbar,
        heating_rate: heating,
        ..NoiseModel::ideal()
    };
    Ok((pulse, state, noise))
}

/// Fits a + b·e^{−λt}·cos(ωt + φ) to (t, p, σ).
pub fn fit_flop(t: &[f64], p: &[f64], sigma: &[f64], pi_time: f64) -> CliResult<CurveFit> {
    let span = t.last().copied().unwrap_or(pi_time).max(pi_time);
    let p0 = [0.5, -0.5, 1.0 / (4.0 * span), PI / pi_time, 0.0];
    Ok(levenberg_marquardt(damped_cosine, t, p, sigma, &p0)?)
}

pub fn compute(cfg: &Config, seed: u64, shots: Option<u64>) -> CliResult<Rabi> {
    let r = &cfg.rabi;
    let (pulse, state, noise) = template_and_noise(cfg)?;
    let durations = linspace(0.0, r.t_max_s, r.points);
    let curve = rabi_curve(&pulse, &durations, &state, &noise)?;
    let protocol = cfg.protocol.to_protocol()?;
    let shots = shots.unwrap_or(r.shots);
    let points = curve
        .par_iter()
        .enumerate()
        .map(|(i, &(t, p))| {
            let b = run_batch(
                &protocol,
                &ProbeSpec::Excitation(p),
                shots,
                substream_seed(seed, i as u64),
            )?;
            Ok(RabiPoint {
                duration: t,
                model: p,
                measured: b.p_hat,
                sigma: b.sigma_qpn,
            })
        })
        .collect::<Result<Vec<_>, qls_core::Error>>()?;
    let pi_time = match r.transition {
        RabiTransition::Carrier => r.carrier_pi_time_s,
        RabiTransition::Blue => r.sideband_pi_time_s,
    };
    let t: Vec<f64> = points.iter().map(|q| q.duration).collect();
    let y: Vec<f64> = points.iter().map(|q| q.measured).collect();
    let s: Vec<f64> = points.iter().map(|q| fit_sigma(q.measured, shots)).collect();
    let fit = fit_flop(&t, &y, &s, pi_time).ok();
    Ok(Rabi { points, fit })
}

pub fn run(ctx: &Context) -> CliResult<serde_json::Value> {
    let rabi = compute(&ctx.cfg.config, ctx.seed, ctx.shots)?;
    let mut t = Table::new(&["duration_us", "excitation_model", "excitation_measured", "sigma_qpn"]);
    for p in &rabi.points {
        t.push(vec![num(p.duration * 1e6), num(p.model), num(p.measured), num(p.sigma)]);
    }
    let mut out = Outputs::new(ctx, "rabi");
    out.csv("rabi.csv", &t)?;
    let model: Vec<_> = rabi.points.iter().map(|p| (p.duration * 1e6, p.model)).collect();
    let meas: Vec<_> = rabi.points.iter().map(|p| (p.duration * 1e6, p.measured)).collect();
    out.plot(
        "rabi.svg",
        "Rabi oscillations",
        "pulse duration (µs)",
        "excitation",
        &[
            Series {
                label: "model",
                data: &model,
                style: Style::Line,
            },
            Series {
                label: "QLS shots",
                data: &meas,
                style: Style::Points,
            },
        ],
    )?;
    let fit = rabi.fit.as_ref().map(|f| {
        json!({
            "offset": f.params[0],
            "amplitude": f.params[1],
            "damping_per_s": f.params[2],
            "damping_sigma_per_s": f.scaled_sigma(2),
            "angular_frequency_rad_per_s": f.params[3],
            "phase_rad": f.params[4],
            "chi2": f.chi2,
            "dof": f.dof,
        })
    });
    let peak = rabi.points.iter().map(|p| p.model).fold(0.0, f64::max);
    out.finish(json!({ "fit": fit, "peak_excitation_model": peak }))
}
