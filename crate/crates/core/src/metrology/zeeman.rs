//! Field tracking with the Ca⁺ Zeeman pair and the f vs. s±B line fit.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

#[allow(unused_imports)]
use num_traits::Float;

use super::budget::Frequency;
use super::fit::weighted_line_fit;
use crate::atomic::ca_pair_splitting_per_gauss;
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldAndDrift {
    /// G
    pub b: f64,
    pub b_sigma: f64,
    /// Hz, common-mode shift of the pair (laser drift).
    pub drift: f64,
    pub drift_sigma: f64,
}

/// B and laser drift from the detunings of the Ca⁺ m=±1/2 → m′=±3/2 lines.
/// `sigma` is the uncertainty of each detuning.
pub fn field_and_drift_from_pair(
    f_plus: f64,
    f_minus: f64,
    sigma: f64,
    g_s: f64,
    g_d: f64,
    c: &PhysicalConstants,
) -> Result<FieldAndDrift> {
    if !(f_plus.is_finite() && f_minus.is_finite() && sigma.is_finite()) {
        return Err(Error::Domain("pair detunings must be finite".into()));
    }
    let per_gauss = ca_pair_splitting_per_gauss(g_s, g_d, c);
    let b = (f_plus - f_minus) / per_gauss;
    if !(b > 0.0) {
        return Err(Error::SignConvention(b));
    }
    Ok(FieldAndDrift {
        b,
        b_sigma: SQRT_2 * sigma.abs() / per_gauss.abs(),
        drift: 0.5 * (f_plus + f_minus),
        drift_sigma: sigma.abs() / SQRT_2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CombLock {
    #[default]
    Quartz,
    Laser729,
}

impl CombLock {
    pub fn name(self) -> &'static str {
        match self {
            CombLock::Quartz => "quartz",
            CombLock::Laser729 => "729",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "quartz" => Some(CombLock::Quartz),
            "729" | "729-locked" | "laser729" => Some(CombLock::Laser729),
            _ => None,
        }
    }
}

/// One interleaved Al⁺/Ca⁺ data set.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub set_id: String,
    /// +1 or −1, which stretched line was probed.
    pub s_pm: i8,
    /// s
    pub ramsey_t: f64,
    /// Measured Al⁺ line minus the anchor, Hz.
    pub al_offset: f64,
    pub al_sigma: f64,
    /// Ca⁺ pair detunings, Hz.
    pub ca_plus: f64,
    pub ca_minus: f64,
    pub ca_sigma: f64,
    /// Externally quoted field uncertainty, G.
    pub b_sigma: f64,
    pub comb_lock: CombLock,
    /// s
    pub timestamp: f64,
}

impl MeasurementSet {
    pub fn validate(&self) -> Result<()> {
        if self.s_pm != 1 && self.s_pm != -1 {
            return Err(Error::Domain(alloc::format!("set {}: s_pm must be ±1", self.set_id)));
        }
        if !(self.al_sigma > 0.0 && self.ca_sigma >= 0.0 && self.b_sigma >= 0.0) {
            return Err(Error::Domain(alloc::format!(
                "set {}: sigmas must be positive",
                self.set_id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeemanResidual {
    pub set_id: String,
    pub s_pm: i8,
    /// G
    pub b: f64,
    pub residual: f64,
    /// Effective σ used in the fit, Hz.
    pub sigma: f64,
    pub ramsey_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeemanFit {
    /// Zero-field frequency.
    pub f0: Frequency,
    /// Offset of f0 from the anchor, Hz.
    pub f0_offset: f64,
    pub f0_sigma: f64,
    /// Hz/G
    pub slope: f64,
    pub slope_sigma: f64,
    pub covariance: [[f64; 2]; 2],
    pub chi2: f64,
    pub residuals: Vec<ZeemanResidual>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeemanFitOptions {
    pub g_s: f64,
    pub g_d: f64,
    /// ν_Al/ν_Ca, maps Ca-tracked laser drift onto the Al⁺ probe when the comb
    /// follows the 729 nm laser.
    pub frequency_ratio: f64,
}

/// Weighted fit of f = f0 + slope·s±B. B and drift come from each set's
/// Ca⁺ pair; B uncertainty is folded into the per-point σ through the slope.
pub fn fit_zeeman_line(
    sets: &[MeasurementSet],
    f_anchor: Frequency,
    opts: &ZeemanFitOptions,
    c: &PhysicalConstants,
) -> Result<ZeemanFit> {
    if sets.len() < 2 {
        return Err(Error::InsufficientData("need at least two measurement sets".into()));
    }
    let mut x = Vec::with_capacity(sets.len());
    let mut y = Vec::with_capacity(sets.len());
    let mut sig = Vec::with_capacity(sets.len());
    let mut b_sig = Vec::with_capacity(sets.len());
    for s in sets {
        s.validate()?;
        let fd = field_and_drift_from_pair(s.ca_plus, s.ca_minus, s.ca_sigma, opts.g_s, opts.g_d, c)?;
        let (drift, drift_sigma) = match s.comb_lock {
            CombLock::Laser729 => (opts.frequency_ratio * fd.drift, opts.frequency_ratio * fd.drift_sigma),
            CombLock::Quartz => (0.0, 0.0),
        };
        x.push(s.s_pm as f64 * fd.b);
        y.push(s.al_offset - drift);
        sig.push(s.al_sigma.hypot(drift_sigma));
        b_sig.push(s.b_sigma.hypot(fd.b_sigma));
    }
    let first = weighted_line_fit(&x, &y, &sig)?;
    let eff: Vec<f64> = sig.iter().zip(&b_sig).map(|(s, b)| s.hypot(first.slope * b)).collect();
    let fit = weighted_line_fit(&x, &y, &eff)?;
    let residuals = sets
        .iter()
        .zip(x.iter().zip(&fit.residuals).zip(&eff))
        .map(|(s, ((x, r), e))| ZeemanResidual {
            set_id: s.set_id.clone(),
            s_pm: s.s_pm,
            b: x.abs(),
            residual: *r,
            sigma: *e,
            ramsey_t: s.ramsey_t,
        })
        .collect();
    Ok(ZeemanFit {
        f0: f_anchor.offset(fit.intercept)?,
        f0_offset: fit.intercept,
        f0_sigma: fit.intercept_sigma(),
        slope: fit.slope,
        slope_sigma: fit.slope_sigma(),
        covariance: fit.covariance,
        chi2: fit.chi2,
        residuals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisResult {
    pub sigma: f64,
    pub p_value: f64,
}

/// Two-sided test that the mean of N/2 vs N/2 measurements with scatter σ_r
/// differ by at least |δ|: σ = √(4/N)·σ_r, p = erfc(|δ|/(√2σ)).
pub fn hypothesis_test(delta: f64, n: usize, sigma_r: f64) -> Result<HypothesisResult> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Domain(alloc::format!("N = {n} must be even and >= 2")));
    }
    if !(sigma_r > 0.0) {
        return Err(Error::Domain("sigma_r must be > 0".into()));
    }
    let sigma = (4.0 / n as f64).sqrt() * sigma_r;
    Ok(HypothesisResult {
        sigma,
        p_value: libm::erfc(delta.abs() / (SQRT_2 * sigma)),
    })
}
