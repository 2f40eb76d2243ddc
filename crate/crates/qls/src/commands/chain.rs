//! Exact comb chain from the 729 nm laser to the Al⁺ probe.

use qls_core::metrology::{frequency_chain_eval, CombLink, Frequency, FrequencyChainNode};
use serde_json::json;

use super::{Context, Outputs};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::Table;

pub struct ChainResult {
    pub link: CombLink,
    pub nodes: Vec<FrequencyChainNode>,
    /// Output after each node.
    pub stages: Vec<Frequency>,
    pub target: Frequency,
}

pub fn compute(cfg: &Config) -> CliResult<ChainResult> {
    let c = &cfg.chain;
    let nu_729 = Frequency::from_hz(c.nu_729_hz.unwrap_or(cfg.constants.nu_ca_hz) as i128);
    let target = Frequency::from_hz(c.target_hz as i128);
    if c.n_729 <= 0 || c.harmonic <= 0 {
        return Err(CliError::Config(
            "chain.n_729 and chain.harmonic must be positive".into(),
        ));
    }
    let f_rep_mhz = (nu_729.millihertz() - c.f_ceo_mhz as i128 - c.f_beat_729_mhz as i128) as f64 / c.n_729 as f64;
    let n_1068 = match c.n_1068 {
        Some(n) => n as i128,
        None => {
            let nu_1068 = target.millihertz() as f64 / c.harmonic as f64;
            ((nu_1068 - c.f_ceo_mhz as f64) / f_rep_mhz).round() as i128
        }
    };
    let mut link = CombLink {
        n_729: c.n_729 as i128,
        n_1068,
        f_ceo: c.f_ceo_mhz as i128,
        f_beat_729: c.f_beat_729_mhz as i128,
        f_beat_1068: 0,
        harmonic: c.harmonic as i128,
    };
    link.f_beat_1068 = link.beat_for(nu_729, target)?;
    let nodes = link.chain()?.to_vec();
    let mut stages = Vec::with_capacity(nodes.len());
    for k in 1..=nodes.len() {
        stages.push(frequency_chain_eval(&nodes[..k], nu_729)?);
    }
    Ok(ChainResult {
        link,
        nodes,
        stages,
        target,
    })
}

pub fn run(ctx: &Context) -> CliResult<serde_json::Value> {
    let r = compute(&ctx.cfg.config)?;
    let mut t = Table::new(&["node", "a", "b_mhz", "output_hz"]);
    for (n, f) in r.nodes.iter().zip(&r.stages) {
        t.push(vec![
            n.label.clone(),
            n.a.to_string(),
            n.b_millihertz.to_string(),
            f.to_string(),
        ]);
    }
    let mut out = Outputs::new(ctx, "chain");
    out.csv("chain.csv", &t)?;
    let last = *r.stages.last().expect("chain has three nodes");
    out.finish(json!({
        "n_729": r.link.n_729.to_string(),
        "n_1068": r.link.n_1068.to_string(),
        "f_beat_1068_mhz": r.link.f_beat_1068.to_string(),
        "output_hz": last.to_string(),
        "target_hz": r.target.to_string(),
        "residual_mhz": (last.millihertz() - r.target.millihertz()).to_string(),
    }))
}
