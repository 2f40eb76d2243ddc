//! Systematic-shift budget applied to a measured frequency.

use std::path::Path;

use qls_core::metrology::{error_budget_apply, BudgetResult, ErrorBudget, Frequency, Ion};
use serde_json::json;

use super::{Context, Outputs};
use crate::config::LoadedConfig;
use crate::error::CliResult;
use crate::io::{budget_table, ion_name, kind_name, num, read_budget, Table};

pub fn load(cfg: &LoadedConfig, table: Option<&Path>, f0: Option<u64>) -> CliResult<(ErrorBudget, Frequency)> {
    let c = &cfg.config;
    let f0_hz = f0.unwrap_or(c.budget.f0_hz);
    let nu_ca = c.constants.nu_ca_hz;
    let ratio = c.budget.frequency_ratio.unwrap_or(f0_hz as f64 / nu_ca as f64);
    let mut budget = ErrorBudget::published(ratio);
    budget.reference_frequency = Frequency::from_hz(nu_ca as i128);
    let path = table
        .map(Path::to_path_buf)
        .or_else(|| c.budget.table_csv.as_deref().map(|p| cfg.resolve(p)));
    if let Some(p) = path {
        budget.rows = read_budget(&p)?;
    }
    Ok((budget, Frequency::from_hz(f0_hz as i128)))
}

pub fn compute(budget: &ErrorBudget, f0: Frequency) -> CliResult<BudgetResult> {
    Ok(error_budget_apply(budget, f0)?)
}

pub fn run(ctx: &Context, table: Option<&Path>, f0: Option<u64>) -> CliResult<serde_json::Value> {
    let (budget, f0) = load(&ctx.cfg, table, f0)?;
    let r = compute(&budget, f0)?;
    let ratio = budget.frequency_ratio.unwrap_or(1.0);
    let mut out = Outputs::new(ctx, "budget");
    out.csv("budget_input.csv", &budget_table(&budget.rows))?;
    let mut t = Table::new(&[
        "label",
        "ion",
        "shift_hz",
        "uncertainty_hz",
        "kind",
        "al_correction_hz",
        "al_uncertainty_hz",
    ]);
    for row in &budget.rows {
        let (sign, scale) = match row.ion {
            Ion::Al => (-1.0, 1.0),
            Ion::Ca => (1.0, ratio),
        };
        t.push(vec![
            row.label.clone(),
            ion_name(row.ion).into(),
            num(row.shift),
            num(row.uncertainty),
            kind_name(row.kind).into(),
            num(sign * scale * row.shift),
            num(scale * row.uncertainty),
        ]);
    }
    out.csv("budget.csv", &t)?;
    let result = json!({
        "f0_raw_hz": f0.rounded_hz().to_string(),
        "correction_hz": r.correction,
        "f_final_hz": r.corrected.rounded_hz().to_string(),
        "f_final_exact_hz": r.corrected.to_string(),
        "uncertainty_hz": r.total_uncertainty,
        "frequency_ratio": ratio,
    });
    out.raw(
        "result.json",
        (serde_json::to_string_pretty(&result).unwrap_or_default() + "\n").as_bytes(),
    )?;
    out.finish(result)
}
