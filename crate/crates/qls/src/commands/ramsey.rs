//! Ramsey fringes on the Al⁺ intercombination line: detuning, phase and
//! waiting-time scans.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use qls_core::dynamics::{
    apply_contrast_factor, ramsey_contrast, ramsey_excitation, NoiseModel, QuantumState, RamseySequence,
};
use qls_core::metrology::{
    estimate_detuning_contrast, exponential_decay, levenberg_marquardt, CurveFit, PhaseCount, RamseyPhaseSet,
};
use qls_core::protocol::{run_batch, ProbeSpec, ProtocolConfig};
use qls_core::rng::substream_seed;
use rayon::prelude::*;
use serde_json::json;

use super::{linspace, Context, Outputs};
use crate::config::{Config, RamseyScanKind};
use crate::error::CliResult;
use crate::io::{num, Table};
use crate::plot::{Series, Style};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub x: f64,
    pub model: f64,
    pub measured: f64,
    pub sigma: f64,
}

pub struct WaitScan {
    pub points: Vec<ScanPoint>,
    pub model_fit: CurveFit,
    pub measured_fit: Option<CurveFit>,
}

pub fn sequence_and_noise(cfg: &Config) -> (RamseySequence, NoiseModel) {
    let r = &cfg.ramsey;
    let noise = NoiseModel {
        spontaneous_decay_rate: r.decay_rate_per_s.unwrap_or(1.0 / cfg.constants.al_3p1_lifetime_s),
        laser_dephasing_rate: r.dephasing_rate_per_s,
        ..NoiseModel::ideal()
    };
    (RamseySequence::half_pi(r.pulse_s, r.wait_s), noise)
}

/// Model excitation with offset, baseline and contrast adjustment.
fn adjusted(
    cfg: &Config,
    seq: &RamseySequence,
    noise: &NoiseModel,
    det_hz: f64,
    phase: f64,
    wait: f64,
) -> CliResult<f64> {
    let r = &cfg.ramsey;
    let p = ramsey_excitation(
        seq,
        TAU * (det_hz - r.offset_hz),
        phase,
        wait,
        &QuantumState::ground(0),
        noise,
    )?;
    Ok((r.baseline + apply_contrast_factor(p, r.contrast_factor)).clamp(0.0, 1.0))
}

fn measure(protocol: &ProtocolConfig, p: f64, shots: u64, seed: u64) -> CliResult<(f64, f64, u64)> {
    let b = run_batch(protocol, &ProbeSpec::Excitation(p), shots, seed)?;
    Ok((b.p_hat, b.sigma_qpn, b.counts))
}

/// Detuning (Hz) or phase (rad) scan.
pub fn fringe(cfg: &Config, seed: u64, shots: Option<u64>, kind: RamseyScanKind) -> CliResult<Vec<ScanPoint>> {
    let r = &cfg.ramsey;
    let (seq, noise) = sequence_and_noise(cfg);
    let protocol = cfg.protocol.to_protocol()?;
    let shots = shots.unwrap_or(r.shots);
    let xs = match kind {
        RamseyScanKind::Phase => linspace(-PI, PI, r.points),
        _ => linspace(r.detuning_start_hz, r.detuning_stop_hz, r.points),
    };
    xs.par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let model = match kind {
                RamseyScanKind::Phase => adjusted(cfg, &seq, &noise, r.detuning_hz, x, r.wait_s)?,
                _ => adjusted(cfg, &seq, &noise, x, 0.0, r.wait_s)?,
            };
            let (measured, sigma, _) = measure(&protocol, model, shots, substream_seed(seed, i as u64))?;
            Ok(ScanPoint {
                x,
                model,
                measured,
                sigma,
            })
        })
        .collect()
}

/// Contrast against waiting time with an exponential fit.
pub fn wait_scan(cfg: &Config, seed: u64, shots: Option<u64>) -> CliResult<WaitScan> {
    let r = &cfg.ramsey;
    let (seq, noise) = sequence_and_noise(cfg);
    let protocol = cfg.protocol.to_protocol()?;
    let shots = shots.unwrap_or(r.shots);
    let n = u32::try_from(shots).unwrap_or(u32::MAX);
    let det = TAU * (r.detuning_hz - r.offset_hz);
    let seq_det = RamseySequence {
        template: seq.template.with_detuning(det),
        ..seq
    };
    let points = r
        .waits_s
        .par_iter()
        .enumerate()
        .map(|(i, &w)| {
            let model = r.contrast_factor * ramsey_contrast(&seq_det, w, &QuantumState::ground(0), &noise)?;
            let mut counts = [PhaseCount::default(); 4];
            for (k, phase) in [0.0, FRAC_PI_2, -FRAC_PI_2, PI].into_iter().enumerate() {
                let p = adjusted(cfg, &seq, &noise, r.detuning_hz, phase, w)?;
                let (_, _, c) = measure(&protocol, p, shots, substream_seed(seed, 4 * i as u64 + k as u64))?;
                counts[k] = PhaseCount::new(c as u32, n);
            }
            let set = RamseyPhaseSet {
                zero: counts[0],
                plus_half_pi: counts[1],
                minus_half_pi: counts[2],
                pi: counts[3],
                t_pulse: r.pulse_s,
                t_wait: w,
            };
            let (measured, sigma) = match estimate_detuning_contrast(&set) {
                Ok(e) => (e.contrast, e.contrast_sigma),
                Err(_) => (f64::NAN, f64::NAN),
            };
            Ok(ScanPoint {
                x: w,
                model,
                measured,
                sigma,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let t: Vec<f64> = points.iter().map(|p| p.x).collect();
    let y: Vec<f64> = points.iter().map(|p| p.model).collect();
    let p0 = [
        y.first().copied().unwrap_or(1.0).max(1e-3),
        2.0 / noise.spontaneous_decay_rate.max(1.0),
    ];
    let model_fit = levenberg_marquardt(exponential_decay, &t, &y, &vec![1e-3; t.len()], &p0)?;
    let good: Vec<&ScanPoint> = points
        .iter()
        .filter(|p| p.measured.is_finite() && p.sigma > 0.0)
        .collect();
    let measured_fit = levenberg_marquardt(
        exponential_decay,
        &good.iter().map(|p| p.x).collect::<Vec<_>>(),
        &good.iter().map(|p| p.measured).collect::<Vec<_>>(),
        &good.iter().map(|p| p.sigma).collect::<Vec<_>>(),
        &model_fit.params,
    )
    .ok();
    Ok(WaitScan {
        points,
        model_fit,
        measured_fit,
    })
}

pub fn run(ctx: &Context, scan: Option<RamseyScanKind>) -> CliResult<serde_json::Value> {
    let cfg = &ctx.cfg.config;
    let kind = scan.unwrap_or(cfg.ramsey.scan);
    let mut out = Outputs::new(ctx, "ramsey");
    match kind {
        RamseyScanKind::Detuning | RamseyScanKind::Phase => {
            let pts = fringe(cfg, ctx.seed, ctx.shots, kind)?;
            let (col, file, xl, scale) = match kind {
                RamseyScanKind::Phase => ("phase_rad", "ramsey_phase.csv", "phase (rad)", 1.0),
                _ => ("detuning_hz", "ramsey_detuning.csv", "detuning (kHz)", 1e-3),
            };
            let mut t = Table::new(&[col, "excitation_model", "excitation_measured", "sigma_qpn"]);
            for p in &pts {
                t.push(vec![num(p.x), num(p.model), num(p.measured), num(p.sigma)]);
            }
            out.csv(file, &t)?;
            let m: Vec<_> = pts.iter().map(|p| (p.x * scale, p.model)).collect();
            let d: Vec<_> = pts.iter().map(|p| (p.x * scale, p.measured)).collect();
            out.plot(
                &file.replace(".csv", ".svg"),
                "Ramsey fringe",
                xl,
                "excitation",
                &[
                    Series {
                        label: "master equation",
                        data: &m,
                        style: Style::Line,
                    },
                    Series {
                        label: "QLS shots",
                        data: &d,
                        style: Style::Points,
                    },
                ],
            )?;
            out.finish(json!({ "scan": col, "points": pts.len() }))
        }
        RamseyScanKind::Wait => {
            let ws = wait_scan(cfg, ctx.seed, ctx.shots)?;
            let mut t = Table::new(&["wait_us", "contrast_model", "contrast_measured", "contrast_sigma"]);
            for p in &ws.points {
                t.push(vec![num(p.x * 1e6), num(p.model), num(p.measured), num(p.sigma)]);
            }
            out.csv("ramsey_wait.csv", &t)?;
            let m: Vec<_> = ws.points.iter().map(|p| (p.x * 1e6, p.model)).collect();
            let d: Vec<_> = ws.points.iter().map(|p| (p.x * 1e6, p.measured)).collect();
            out.plot(
                "ramsey_wait.svg",
                "Ramsey contrast",
                "waiting time (µs)",
                "contrast",
                &[
                    Series {
                        label: "master equation",
                        data: &m,
                        style: Style::Line,
                    },
                    Series {
                        label: "QLS shots",
                        data: &d,
                        style: Style::Points,
                    },
                ],
            )?;
            let mf = ws
                .measured_fit
                .as_ref()
                .map(|f| json!({ "contrast0": f.params[0], "tau_s": f.params[1], "tau_sigma_s": f.scaled_sigma(1) }));
            out.finish(json!({
                "model": { "contrast0": ws.model_fit.params[0], "tau_s": ws.model_fit.params[1] },
                "measured": mf,
            }))
        }
    }
}
