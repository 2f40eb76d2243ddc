//! One module per subcommand. Each exposes a pure `compute` step that tests
//! can call directly and a `run` step that writes files.

pub mod budget;
pub mod chain;
pub mod clock;
pub mod compare;
pub mod fit;
pub mod modes;
pub mod pump;
pub mod qls_batch;
pub mod rabi;
pub mod ramsey;
pub mod spectrum;

use std::path::PathBuf;

use serde_json::Value;

use crate::config::LoadedConfig;
use crate::error::CliResult;
use crate::io::{write_atomic, Manifest, Table};
use crate::plot::{svg, Series};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything a subcommand needs besides its own flags.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: LoadedConfig,
    pub seed: u64,
    pub out: PathBuf,
    pub plots: bool,
    /// Overrides the per-subcommand shot count.
    pub shots: Option<u64>,
}

/// Collects the files a subcommand writes and finishes with a summary and
/// a manifest.
pub struct Outputs<'a> {
    ctx: &'a Context,
    name: &'static str,
    files: Vec<String>,
}

impl<'a> Outputs<'a> {
    pub fn new(ctx: &'a Context, name: &'static str) -> Self {
        Self {
            ctx,
            name,
            files: Vec::new(),
        }
    }

    pub fn csv(&mut self, file: &str, table: &Table) -> CliResult<()> {
        write_atomic(&self.ctx.out, file, &table.to_bytes()?)?;
        self.files.push(file.into());
        Ok(())
    }

    pub fn raw(&mut self, file: &str, bytes: &[u8]) -> CliResult<()> {
        write_atomic(&self.ctx.out, file, bytes)?;
        self.files.push(file.into());
        Ok(())
    }

    /// Writes an SVG only when plots were requested.
    pub fn plot(&mut self, file: &str, title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> CliResult<()> {
        if self.ctx.plots {
            self.raw(file, svg(title, xlabel, ylabel, series).as_bytes())?;
        }
        Ok(())
    }

    pub fn finish(mut self, summary: Value) -> CliResult<Value> {
        let text = serde_json::to_string_pretty(&summary).unwrap_or_default() + "\n";
        self.raw("summary.json", text.as_bytes())?;
        let m = Manifest {
            tool: "qls",
            version: VERSION,
            subcommand: self.name,
            seed: self.ctx.seed,
            config_sha256: self.ctx.cfg.config.hash(),
            files: self.files.clone(),
        };
        write_atomic(&self.ctx.out, "MANIFEST", m.render().as_bytes())?;
        Ok(summary)
    }
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// QPN σ used for weighting fits; never zero so that saturated points keep
/// finite weight.
pub fn fit_sigma(p_hat: f64, n: u64) -> f64 {
    let n = n.max(1) as f64;
    (p_hat * (1.0 - p_hat)).max(0.25 / n).sqrt() / n.sqrt()
}
