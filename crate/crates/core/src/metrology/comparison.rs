//! Binned frequency comparison between two setups.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::fit::{gaussian, levenberg_marquardt};
use crate::error::{Error, Result};

pub const MIN_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// (bin start s, a − b Hz) for every bin where both setups have data.
    pub differences: Vec<(f64, f64)>,
    pub mean_diff: f64,
    pub mean_diff_sigma: f64,
    /// Gaussian fit of the difference histogram.
    pub center: f64,
    pub center_sigma: f64,
    pub width: f64,
    pub width_sigma: f64,
    /// (bin centre Hz, count)
    pub histogram: Vec<(f64, u32)>,
}

fn span(series: &[(f64, f64)]) -> Option<(f64, f64)> {
    let lo = series.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = series.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    (lo <= hi).then_some((lo, hi))
}

/// Bins both time series into `bin`-second intervals, differences the bin
/// means, and fits a Gaussian to the histogram of the differences.
pub fn comparison_histogram(series_a: &[(f64, f64)], series_b: &[(f64, f64)], bin: f64) -> Result<Comparison> {
    if !(bin > 0.0 && bin.is_finite()) {
        return Err(Error::Domain(alloc::format!("bin width {bin} must be > 0")));
    }
    let none = || Error::InsufficientData("time series do not overlap".into());
    let (a0, a1) = span(series_a).ok_or_else(none)?;
    let (b0, b1) = span(series_b).ok_or_else(none)?;
    let (t0, t1) = (a0.max(b0), a1.min(b1));
    if t1 < t0 {
        return Err(none());
    }
    let nbins = ((t1 - t0) / bin).floor() as usize + 1;
    let mut acc = vec![(0.0, 0u32, 0.0, 0u32); nbins];
    let mut add = |t: f64, v: f64, first: bool| {
        if t < t0 || t > t1 {
            return;
        }
        let k = (((t - t0) / bin) as usize).min(nbins - 1);
        let e = &mut acc[k];
        if first {
            e.0 += v;
            e.1 += 1;
        } else {
            e.2 += v;
            e.3 += 1;
        }
    };
    series_a.iter().for_each(|&(t, v)| add(t, v, true));
    series_b.iter().for_each(|&(t, v)| add(t, v, false));
    let differences: Vec<(f64, f64)> = acc
        .iter()
        .enumerate()
        .filter(|(_, e)| e.1 > 0 && e.3 > 0)
        .map(|(k, e)| (t0 + k as f64 * bin, e.0 / e.1 as f64 - e.2 / e.3 as f64))
        .collect();
    let n = differences.len();
    if n < MIN_BINS {
        return Err(Error::InsufficientData(alloc::format!(
            "{n} overlapping bins, need at least {MIN_BINS}"
        )));
    }
    let mean = differences.iter().map(|d| d.1).sum::<f64>() / n as f64;
    let var = differences.iter().map(|d| (d.1 - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    let mean_sigma = sd / (n as f64).sqrt();

    if sd == 0.0 {
        return Ok(Comparison {
            differences,
            mean_diff: mean,
            mean_diff_sigma: 0.0,
            center: mean,
            center_sigma: 0.0,
            width: 0.0,
            width_sigma: 0.0,
            histogram: vec![(mean, n as u32)],
        });
    }

    // Scott's rule
    let h = 3.49 * sd * (n as f64).powf(-1.0 / 3.0);
    let lo = differences.iter().map(|d| d.1).fold(f64::INFINITY, f64::min);
    let hi = differences.iter().map(|d| d.1).fold(f64::NEG_INFINITY, f64::max);
    let nh = (((hi - lo) / h).floor() as usize + 1).max(1);
    let mut counts = vec![0u32; nh];
    for d in &differences {
        counts[(((d.1 - lo) / h) as usize).min(nh - 1)] += 1;
    }
    let histogram: Vec<(f64, u32)> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (lo + (i as f64 + 0.5) * h, c))
        .collect();
    let x: Vec<f64> = histogram.iter().map(|p| p.0).collect();
    let y: Vec<f64> = histogram.iter().map(|p| p.1 as f64).collect();
    let s: Vec<f64> = y.iter().map(|c| c.max(1.0).sqrt()).collect();
    let peak = y.iter().cloned().fold(0.0, f64::max);
    let (center, center_sigma, width, width_sigma) = if x.len() >= 3 {
        let fit = levenberg_marquardt(gaussian, &x, &y, &s, &[peak, mean, sd])?;
        (fit.params[1], fit.sigma(1), fit.params[2].abs(), fit.sigma(2))
    } else {
        (mean, mean_sigma, sd, sd / (2.0 * (n as f64 - 1.0)).sqrt())
    };
    Ok(Comparison {
        differences,
        mean_diff: mean,
        mean_diff_sigma: mean_sigma,
        center,
        center_sigma,
        width,
        width_sigma,
        histogram,
    })
}
