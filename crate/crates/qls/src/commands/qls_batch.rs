//! A batch of protocol shots at a fixed Al⁺ excitation probability.

use qls_core::protocol::{batch_shot, BatchResult, Outcome, ShotRecord};
use rayon::prelude::*;
use serde_json::json;

use super::{Context, Outputs};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::{num, Table};

pub fn compute(cfg: &Config, p: f64, shots: u64, seed: u64) -> CliResult<(Vec<ShotRecord>, BatchResult)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CliError::Config(format!("excitation probability {p} outside [0, 1]")));
    }
    let protocol = cfg.protocol.to_protocol()?;
    protocol.validate()?;
    let records: Vec<ShotRecord> = (0..shots)
        .into_par_iter()
        .map(|i| batch_shot(&protocol, p, seed, i))
        .collect();
    let dark = records.iter().filter(|r| r.outcome.is_dark()).count() as u64;
    Ok((records, BatchResult::from_counts(dark, shots)?))
}

pub fn run(ctx: &Context, p: Option<f64>) -> CliResult<serde_json::Value> {
    let cfg = &ctx.cfg.config;
    let p = p.unwrap_or(cfg.qls_batch.excitation_probability);
    let shots = ctx.shots.unwrap_or(cfg.qls_batch.shots);
    let (records, b) = compute(cfg, p, shots, ctx.seed)?;
    let mut t = Table::new(&["shot_index", "outcome"]);
    for r in &records {
        let o = match r.outcome {
            Outcome::Bright => "bright",
            Outcome::Dark => "dark",
        };
        t.push(vec![r.rng_stream_id.to_string(), o.into()]);
    }
    let mut out = Outputs::new(ctx, "qls-batch");
    out.csv("shots.csv", &t)?;
    let mut s = Table::new(&["excitation_probability", "shots", "dark_counts", "p_hat", "sigma_qpn"]);
    s.push(vec![
        num(p),
        b.n.to_string(),
        b.counts.to_string(),
        num(b.p_hat),
        num(b.sigma_qpn),
    ]);
    out.csv("batch.csv", &s)?;
    out.finish(json!({
        "p": p,
        "n": b.n,
        "counts": b.counts,
        "p_hat": b.p_hat,
        "sigma_qpn": b.sigma_qpn,
        "config_sha256": cfg.hash(),
    }))
}
