//! Normal modes of the two-ion crystal.

use qls_core::constants::wavelength;
use qls_core::trap::{axial_modes_closed_form, solve_crystal, Crystal, Direction};
use serde_json::json;

use super::{Context, Outputs};
use crate::config::Config;
use crate::error::CliResult;
use crate::io::{num, Table};

pub fn compute(cfg: &Config) -> CliResult<Crystal> {
    let trap = cfg.trap.to_trap();
    Ok(solve_crystal(&trap, cfg.trap.pair(), &cfg.constants.physical())?)
}

pub fn run(ctx: &Context) -> CliResult<serde_json::Value> {
    let cfg = &ctx.cfg.config;
    let c = cfg.constants.physical();
    let crystal = compute(cfg)?;
    let mut t = Table::new(&[
        "mode",
        "frequency_hz",
        "amplitude_ion1",
        "amplitude_ion2",
        "heating_rate_quanta_per_s",
        "mean_phonon_number",
        "lamb_dicke_ion2_267nm",
        "lamb_dicke_ion1_729nm",
    ]);
    for m in &crystal.modes {
        // Lamb-Dicke factors for a beam along the mode axis
        let eta_al = crystal.lamb_dicke(m.label, 1, wavelength::AL_INTERCOMBINATION_NM, 1.0, &c)?;
        let eta_ca = crystal.lamb_dicke(m.label, 0, wavelength::CA_QUADRUPOLE_NM, 1.0, &c)?;
        t.push(vec![
            m.label.to_string(),
            num(m.frequency),
            num(m.eigenvector[0]),
            num(m.eigenvector[1]),
            num(m.heating_rate),
            num(m.mean_phonon_number),
            num(eta_al),
            num(eta_ca),
        ]);
    }
    let [m1, m2] = cfg.trap.pair().masses();
    let nu1 = cfg.trap.axial_hz * (cfg.trap.reference_mass_u / m1).sqrt();
    let (zin, zout) = axial_modes_closed_form(m1, m2, nu1);
    let mut out = Outputs::new(ctx, "modes");
    out.csv("modes.csv", &t)?;
    let axial: Vec<_> = crystal
        .modes
        .iter()
        .filter(|m| m.label.direction == Direction::Axial)
        .map(|m| m.frequency)
        .collect();
    out.finish(json!({
        "separation_m": crystal.separation(),
        "axial_modes_hz": axial,
        "axial_closed_form_hz": [zin, zout],
        "modes_hz": crystal.modes.iter().map(|m| (m.label.to_string(), m.frequency)).collect::<Vec<_>>(),
    }))
}
