//! Comparison of two setups probing the same laser.

use qls_core::metrology::synthetic::{lab_comparison, TimeSeries};
use qls_core::metrology::{comparison_histogram, Comparison};
use qls_core::rng::stream_rng;
use serde_json::json;

use super::{Context, Outputs};
use crate::config::Config;
use crate::error::CliResult;
use crate::io::{num, Table};
use crate::plot::{Series, Style};

pub fn compute(cfg: &Config, seed: u64) -> CliResult<(TimeSeries, TimeSeries, Comparison)> {
    let c = &cfg.comparison;
    let mut rng = stream_rng(seed, 0);
    let (a, b) = lab_comparison(&c.params(), &mut rng)?;
    let cmp = comparison_histogram(&a, &b, c.bin_s)?;
    Ok((a, b, cmp))
}

pub fn run(ctx: &Context) -> CliResult<serde_json::Value> {
    let (a, b, cmp) = compute(&ctx.cfg.config, ctx.seed)?;
    let mut out = Outputs::new(ctx, "compare");
    let mut s = Table::new(&["time_s", "setup", "detuning_hz"]);
    for (name, series) in [("a", &a), ("b", &b)] {
        for (t, f) in series {
            s.push(vec![num(*t), name.into(), num(*f)]);
        }
    }
    out.csv("series.csv", &s)?;
    let mut d = Table::new(&["bin_start_s", "difference_hz"]);
    for (t, f) in &cmp.differences {
        d.push(vec![num(*t), num(*f)]);
    }
    out.csv("differences.csv", &d)?;
    let mut h = Table::new(&["bin_center_hz", "count"]);
    for (x, n) in &cmp.histogram {
        h.push(vec![num(*x), n.to_string()]);
    }
    out.csv("histogram.csv", &h)?;
    let hist: Vec<_> = cmp.histogram.iter().map(|(x, n)| (*x, *n as f64)).collect();
    out.plot(
        "histogram.svg",
        "Frequency difference",
        "a − b (Hz)",
        "bins",
        &[Series {
            label: "one-minute bins",
            data: &hist,
            style: Style::Points,
        }],
    )?;
    out.finish(json!({
        "bins": cmp.differences.len(),
        "mean_diff_hz": cmp.mean_diff,
        "mean_diff_sigma_hz": cmp.mean_diff_sigma,
        "center_hz": cmp.center,
        "center_sigma_hz": cmp.center_sigma,
        "width_hz": cmp.width,
        "width_sigma_hz": cmp.width_sigma,
    }))
}
