//! Optical pumping into a stretched Zeeman state.

use qls_core::protocol::{optical_pump, ProtocolConfig, PumpState};
use serde_json::json;

use super::{Context, Outputs};
use crate::config::Config;
use crate::error::CliResult;
use crate::io::{num, Table};
use crate::plot::{Series, Style};

/// Populations after 0, 1, …, `max_repetitions` repetitions from a uniform start.
pub fn compute(cfg: &Config) -> CliResult<Vec<(u32, PumpState)>> {
    let base = cfg.protocol.to_protocol()?;
    (0..=cfg.pump.max_repetitions)
        .map(|reps| {
            let c = ProtocolConfig {
                pump_repetitions: reps,
                ..base.clone()
            };
            Ok((reps, optical_pump(&PumpState::uniform_ground(), &c)?))
        })
        .collect()
}

pub fn run(ctx: &Context) -> CliResult<serde_json::Value> {
    let cfg = &ctx.cfg.config;
    let target = cfg.protocol.to_protocol()?.target_zeeman_state;
    let rows = compute(cfg)?;
    let mut t = Table::new(&[
        "repetitions",
        "p_m-5/2",
        "p_m-3/2",
        "p_m-1/2",
        "p_m+1/2",
        "p_m+3/2",
        "p_m+5/2",
        "p_excited",
        "p_target",
    ]);
    for (r, s) in &rows {
        let mut row = vec![r.to_string()];
        row.extend(s.ground.iter().map(|p| num(*p)));
        row.push(num(s.excited.iter().sum()));
        row.push(num(s.target_population(target)));
        t.push(row);
    }
    let mut out = Outputs::new(ctx, "pump");
    out.csv("pump.csv", &t)?;
    let curve: Vec<_> = rows
        .iter()
        .map(|(r, s)| (*r as f64, s.target_population(target)))
        .collect();
    out.plot(
        "pump.svg",
        "Optical pumping",
        "repetitions",
        "target population",
        &[Series {
            label: "rate model",
            data: &curve,
            style: Style::Line,
        }],
    )?;
    let at_config = rows
        .iter()
        .find(|(r, _)| *r == cfg.protocol.pump_repetitions)
        .map(|(_, s)| s.target_population(target));
    let first_above_99 = rows
        .iter()
        .find(|(_, s)| s.target_population(target) > 0.99)
        .map(|(r, _)| *r);
    out.finish(json!({
        "target_population_at_configured_repetitions": at_config,
        "first_repetition_above_0_99": first_above_99,
    }))
}
