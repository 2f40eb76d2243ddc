//! Clock-line scan with double-mapping readout.

use std::f64::consts::TAU;

use qls_core::dynamics::{fwhm, rabi_probability};
use qls_core::metrology::levenberg_marquardt;
use qls_core::protocol::{run_clock_shot, ClockProbe, ClockSequence};
use qls_core::rng::{stream_rng, substream_seed};
use rayon::prelude::*;
use serde_json::json;

use super::{fit_sigma, linspace, Context, Outputs};
use crate::config::Config;
use crate::error::CliResult;
use crate::io::{num, Table};
use crate::plot::{Series, Style};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockPoint {
    pub detuning_hz: f64,
    pub model: f64,
    pub measured: f64,
    pub sigma: f64,
}

pub struct ClockScan {
    pub points: Vec<ClockPoint>,
    pub fwhm_model_hz: f64,
    /// FWHM of a Rabi line with free height, centre and Rabi frequency
    /// fitted to the measured change rate.
    pub fwhm_measured_hz: Option<f64>,
}

pub fn compute(cfg: &Config, seed: u64, shots: Option<u64>) -> CliResult<ClockScan> {
    let c = &cfg.clock;
    let protocol = cfg.protocol.to_protocol()?;
    let shots = shots.unwrap_or(c.shots_per_point);
    let grid = linspace(-c.span_hz, c.span_hz, c.points);
    let points = grid
        .par_iter()
        .enumerate()
        .map(|(i, &d)| {
            let probe = ClockProbe::pi_pulse(c.probe_time_s, TAU * d);
            let mut rng = stream_rng(substream_seed(seed, i as u64), 0);
            let mut seq = ClockSequence::new();
            let mut changes = 0u64;
            for _ in 0..shots {
                if run_clock_shot(&protocol, &probe, &mut seq, &mut rng)?.state_change == Some(true) {
                    changes += 1;
                }
            }
            let measured = changes as f64 / shots.max(1) as f64;
            Ok(ClockPoint {
                detuning_hz: d,
                model: probe.excitation(),
                measured,
                sigma: (measured * (1.0 - measured) / shots.max(1) as f64).sqrt(),
            })
        })
        .collect::<Result<Vec<_>, qls_core::Error>>()?;
    let model: Vec<(f64, f64)> = points.iter().map(|p| (p.detuning_hz, p.model)).collect();
    let fwhm_model_hz = fwhm(&model)?;
    let x: Vec<f64> = points.iter().map(|p| p.detuning_hz).collect();
    let y: Vec<f64> = points.iter().map(|p| p.measured).collect();
    let s: Vec<f64> = points.iter().map(|p| fit_sigma(p.measured, shots)).collect();
    let t = c.probe_time_s;
    let line = |d: f64, p: &[f64]| p[0] * rabi_probability(p[2], TAU * (d - p[1]), t);
    let p0 = [
        y.iter().cloned().fold(0.0, f64::max).max(0.1),
        0.0,
        std::f64::consts::PI / t,
    ];
    let fwhm_measured_hz = levenberg_marquardt(line, &x, &y, &s, &p0).ok().and_then(|f| {
        let fine: Vec<(f64, f64)> = linspace(-c.span_hz, c.span_hz, 20 * c.points)
            .into_iter()
            .map(|d| (d, line(d, &f.params)))
            .collect();
        fwhm(&fine).ok()
    });
    Ok(ClockScan {
        points,
        fwhm_model_hz,
        fwhm_measured_hz,
    })
}

pub fn run(ctx: &Context) -> CliResult<serde_json::Value> {
    let scan = compute(&ctx.cfg.config, ctx.seed, ctx.shots)?;
    let mut t = Table::new(&[
        "detuning_hz",
        "change_probability_model",
        "change_probability_measured",
        "sigma_qpn",
    ]);
    for p in &scan.points {
        t.push(vec![num(p.detuning_hz), num(p.model), num(p.measured), num(p.sigma)]);
    }
    let mut out = Outputs::new(ctx, "clock-scan");
    out.csv("clock_scan.csv", &t)?;
    let m: Vec<_> = scan.points.iter().map(|p| (p.detuning_hz, p.model)).collect();
    let d: Vec<_> = scan.points.iter().map(|p| (p.detuning_hz, p.measured)).collect();
    out.plot(
        "clock_scan.svg",
        "Clock transition",
        "detuning (Hz)",
        "state-change probability",
        &[
            Series {
                label: "Rabi line",
                data: &m,
                style: Style::Line,
            },
            Series {
                label: "double mapping",
                data: &d,
                style: Style::Points,
            },
        ],
    )?;
    out.finish(json!({
        "fwhm_model_hz": scan.fwhm_model_hz,
        "fwhm_measured_hz": scan.fwhm_measured_hz,
    }))
}
