//! Sideband absorption spectrum of one ion of the crystal.

use std::f64::consts::{PI, TAU};

use qls_core::dynamics::{find_peaks, spectrum_point, ModeCoupling, NoiseModel, Pulse};
use qls_core::trap::{Direction, ModeLabel};
use rayon::prelude::*;
use serde_json::json;

use super::{linspace, Context, Outputs};
use crate::config::Config;
use crate::error::CliResult;
use crate::io::{num, Table};
use crate::plot::{Series, Style};

pub struct Spectrum {
    /// (detuning Hz, excitation)
    pub curve: Vec<(f64, f64)>,
    pub peaks_hz: Vec<f64>,
    pub modes: Vec<(ModeLabel, ModeCoupling)>,
}

pub fn couplings(cfg: &Config) -> CliResult<Vec<(ModeLabel, ModeCoupling)>> {
    let s = &cfg.spectrum;
    let c = cfg.constants.physical();
    let crystal = super::modes::compute(cfg)?;
    let mut out = Vec::with_capacity(6);
    for m in &crystal.modes {
        let cos = match m.label.direction {
            Direction::Axial => s.projection[0],
            Direction::RadialX => s.projection[1],
            Direction::RadialY => s.projection[2],
        };
        let eta = crystal
            .lamb_dicke(m.label, s.ion.index(), s.wavelength_nm, cos, &c)?
            .abs();
        out.push((
            m.label,
            ModeCoupling {
                frequency: m.frequency,
                lamb_dicke: eta,
                nbar: m.mean_phonon_number,
                heating_rate: if s.include_heating { m.heating_rate } else { 0.0 },
            },
        ));
    }
    Ok(out)
}

pub fn compute(cfg: &Config) -> CliResult<Spectrum> {
    let s = &cfg.spectrum;
    let modes = couplings(cfg)?;
    let mc: Vec<ModeCoupling> = modes.iter().map(|m| m.1).collect();
    let probe = Pulse::carrier(PI / s.carrier_pi_time_s, s.pulse_duration_s);
    let noise = NoiseModel {
        spontaneous_decay_rate: s.decay_rate_per_s,
        laser_dephasing_rate: s.dephasing_rate_per_s,
        ..NoiseModel::ideal()
    };
    let n = ((s.stop_hz - s.start_hz) / s.step_hz).round().max(0.0) as usize + 1;
    let grid = linspace(s.start_hz, s.start_hz + s.step_hz * (n - 1) as f64, n);
    let curve = grid
        .par_iter()
        .map(|&f| Ok((f, spectrum_point(&probe, TAU * f, &mc, &noise)?)))
        .collect::<Result<Vec<_>, qls_core::Error>>()?;
    let peaks_hz = find_peaks(&curve, s.peak_threshold);
    Ok(Spectrum { curve, peaks_hz, modes })
}

pub fn run(ctx: &Context) -> CliResult<serde_json::Value> {
    let sp = compute(&ctx.cfg.config)?;
    let mut t = Table::new(&["detuning_hz", "excitation"]);
    for (f, p) in &sp.curve {
        t.push(vec![num(*f), num(*p)]);
    }
    let mut out = Outputs::new(ctx, "spectrum");
    out.csv("spectrum.csv", &t)?;
    let khz: Vec<(f64, f64)> = sp.curve.iter().map(|(f, p)| (f * 1e-3, *p)).collect();
    out.plot(
        "spectrum.svg",
        "Sideband spectrum",
        "detuning (kHz)",
        "excitation",
        &[Series {
            label: "model",
            data: &khz,
            style: Style::Line,
        }],
    )?;
    out.finish(json!({
        "peaks_hz": sp.peaks_hz,
        "modes": sp.modes.iter().map(|(l, m)| json!({
            "mode": l.to_string(),
            "frequency_hz": m.frequency,
            "lamb_dicke": m.lamb_dicke,
            "nbar": m.nbar,
        })).collect::<Vec<_>>(),
    }))
}
