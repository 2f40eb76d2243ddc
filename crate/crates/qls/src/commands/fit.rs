//! Zero-field frequency and g-factor from a campaign of measurement sets,
//! and the test for a dependence on the Ramsey time.

use std::path::Path;

use qls_core::atomic::g_factor_from_splitting;
use qls_core::metrology::synthetic::zeeman_campaign;
use qls_core::metrology::{
    error_budget_apply, fit_zeeman_line, hypothesis_test, BudgetResult, ErrorBudget, Frequency, HypothesisResult,
    MeasurementSet, ZeemanFit, ZeemanFitOptions, TABLE_ROW_STATISTICS,
};
use qls_core::rng::stream_rng;
use serde_json::json;

use super::{Context, Outputs};
use crate::config::{Config, LoadedConfig, SigmaKind};
use crate::error::{CliError, CliResult};
use crate::io::{campaign_bytes, num, read_campaign, Table};
use crate::plot::{Series, Style};

pub struct Campaign {
    pub sets: Vec<MeasurementSet>,
    pub synthetic: bool,
}

/// Sets from `input`, from the configured CSV, or a synthetic campaign.
pub fn load_campaign(cfg: &LoadedConfig, input: Option<&Path>, seed: u64) -> CliResult<Campaign> {
    let c = &cfg.config;
    let path = input
        .map(Path::to_path_buf)
        .or_else(|| c.campaign.input_csv.as_deref().map(|p| cfg.resolve(p)));
    let (mut sets, synthetic) = match path {
        Some(p) => (read_campaign(&p)?, false),
        None => {
            let params = c.campaign.params(c.constants.nu_ca_hz);
            let mut rng = stream_rng(seed, 0);
            (zeeman_campaign(&params, &c.constants.physical(), &mut rng)?, true)
        }
    };
    if !synthetic && c.campaign.sigma_kind == SigmaKind::Ensemble {
        let k = (c.campaign.measurements_per_set.max(1) as f64).sqrt();
        for s in &mut sets {
            s.al_sigma /= k;
        }
    }
    Ok(Campaign { sets, synthetic })
}

pub struct FitOutcome {
    pub fit: ZeemanFit,
    pub g: f64,
    pub g_sigma: f64,
    pub ratio: f64,
    pub budget: BudgetResult,
}

pub fn compute(cfg: &Config, sets: &[MeasurementSet]) -> CliResult<FitOutcome> {
    let k = &cfg.constants;
    let c = k.physical();
    let ratio = cfg.campaign.ratio(k.nu_ca_hz);
    let anchor = Frequency::from_hz(cfg.campaign.anchor_hz as i128);
    let opts = ZeemanFitOptions {
        g_s: k.g_ca_s12,
        g_d: k.g_ca_d52,
        frequency_ratio: ratio,
    };
    let fit = fit_zeeman_line(sets, anchor, &opts, &c)?;
    let g = g_factor_from_splitting(fit.slope, k.g_al_1s0, &c)?;
    let g_sigma = 2.0 / 7.0 * fit.slope_sigma / c.bohr_magneton_over_h;
    let mut budget = ErrorBudget::published(ratio);
    budget.reference_frequency = Frequency::from_hz(k.nu_ca_hz as i128);
    for row in &mut budget.rows {
        if row.label == TABLE_ROW_STATISTICS {
            row.uncertainty = fit.f0_sigma;
        }
    }
    let applied = error_budget_apply(&budget, fit.f0)?;
    Ok(FitOutcome {
        fit,
        g,
        g_sigma,
        ratio,
        budget: applied,
    })
}

pub fn run(ctx: &Context, input: Option<&Path>) -> CliResult<serde_json::Value> {
    let cfg = &ctx.cfg.config;
    let campaign = load_campaign(&ctx.cfg, input, ctx.seed)?;
    let r = compute(cfg, &campaign.sets)?;
    let mut t = Table::new(&["set_id", "s_pm", "b_gauss", "residual_hz", "sigma_hz", "ramsey_t_us"]);
    for x in &r.fit.residuals {
        t.push(vec![
            x.set_id.clone(),
            x.s_pm.to_string(),
            num(x.b),
            num(x.residual),
            num(x.sigma),
            num(x.ramsey_t * 1e6),
        ]);
    }
    let mut out = Outputs::new(ctx, "fit");
    out.csv("residuals.csv", &t)?;
    if campaign.synthetic {
        out.raw("campaign.csv", &campaign_bytes(&campaign.sets)?)?;
    }
    let pts: Vec<_> = r
        .fit
        .residuals
        .iter()
        .map(|x| (x.s_pm as f64 * x.b, x.residual))
        .collect();
    out.plot(
        "residuals.svg",
        "Zeeman fit residuals",
        "s±B (G)",
        "residual (Hz)",
        &[Series {
            label: "sets",
            data: &pts,
            style: Style::Points,
        }],
    )?;
    let result = json!({
        "f0_raw_hz": r.fit.f0.rounded_hz().to_string(),
        "f0_sigma_hz": r.fit.f0_sigma,
        "slope_hz_per_gauss": r.fit.slope,
        "slope_sigma_hz_per_gauss": r.fit.slope_sigma,
        "chi2": r.fit.chi2,
        "n_sets": r.fit.residuals.len(),
        "correction_hz": r.budget.correction,
        "f_final_hz": r.budget.corrected.rounded_hz().to_string(),
        "uncertainty_hz": r.budget.total_uncertainty,
        "g": r.g,
        "g_sigma": r.g_sigma,
        "frequency_ratio": r.ratio,
        "synthetic": campaign.synthetic,
    });
    out.raw(
        "result.json",
        (serde_json::to_string_pretty(&result).unwrap_or_default() + "\n").as_bytes(),
    )?;
    out.finish(result)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dependence {
    pub delta: f64,
    pub n: usize,
    pub sigma_r: f64,
    pub result: HypothesisResult,
}

/// δ between the mean residuals of the longest and shortest Ramsey times,
/// σ_r the scatter of all residuals.
pub fn dependence_from_fit(fit: &ZeemanFit) -> CliResult<Dependence> {
    let res = &fit.residuals;
    let lo = res.iter().map(|r| r.ramsey_t).fold(f64::INFINITY, f64::min);
    let hi = res.iter().map(|r| r.ramsey_t).fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return Err(CliError::Core(qls_core::Error::InsufficientData(
            "campaign has a single Ramsey time".into(),
        )));
    }
    let mean = |t: f64| {
        let v: Vec<f64> = res.iter().filter(|r| r.ramsey_t == t).map(|r| r.residual).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let n = res.len();
    let m = res.iter().map(|r| r.residual).sum::<f64>() / n as f64;
    let sigma_r = (res.iter().map(|r| (r.residual - m).powi(2)).sum::<f64>() / (n - 1).max(1) as f64).sqrt();
    let delta = mean(hi) - mean(lo);
    Ok(Dependence {
        delta,
        n,
        sigma_r,
        result: hypothesis_test(delta, n, sigma_r)?,
    })
}

pub fn run_dependence(
    ctx: &Context,
    input: Option<&Path>,
    delta: Option<f64>,
    n: Option<usize>,
    sigma_r: Option<f64>,
) -> CliResult<serde_json::Value> {
    let cfg = &ctx.cfg.config;
    let h = &cfg.hypothesis;
    let d = if h.from_campaign || input.is_some() {
        let campaign = load_campaign(&ctx.cfg, input, ctx.seed)?;
        dependence_from_fit(&compute(cfg, &campaign.sets)?.fit)?
    } else {
        let (delta, n, sigma_r) = (
            delta.unwrap_or(h.delta_hz),
            n.unwrap_or(h.n_sets),
            sigma_r.unwrap_or(h.sigma_r_hz),
        );
        Dependence {
            delta,
            n,
            sigma_r,
            result: hypothesis_test(delta, n, sigma_r)?,
        }
    };
    let mut t = Table::new(&["delta_hz", "n_sets", "sigma_r_hz", "sigma_hz", "p_value"]);
    t.push(vec![
        num(d.delta),
        d.n.to_string(),
        num(d.sigma_r),
        num(d.result.sigma),
        num(d.result.p_value),
    ]);
    let mut out = Outputs::new(ctx, "test-ramsey-dependence");
    out.csv("ramsey_dependence.csv", &t)?;
    out.finish(json!({
        "delta_hz": d.delta,
        "n_sets": d.n,
        "sigma_r_hz": d.sigma_r,
        "sigma_hz": d.result.sigma,
        "p_value": d.result.p_value,
    }))
}
