//! Weighted straight-line fits and a small Levenberg–Marquardt solver.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    /// [[var(a), cov(a,b)], [cov(a,b), var(b)]]
    pub covariance: [[f64; 2]; 2],
    pub chi2: f64,
    pub residuals: Vec<f64>,
}

impl LineFit {
    pub fn intercept_sigma(&self) -> f64 {
        self.covariance[0][0].sqrt()
    }

    pub fn slope_sigma(&self) -> f64 {
        self.covariance[1][1].sqrt()
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// y = a + b·x by weighted least squares with absolute σ's.
pub fn weighted_line_fit(x: &[f64], y: &[f64], sigma: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() != sigma.len() {
        return Err(Error::Domain("x, y and sigma lengths differ".into()));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData("line fit needs at least two points".into()));
    }
    if sigma.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::Domain("all sigmas must be positive".into()));
    }
    // centre x for conditioning
    let w: Vec<f64> = sigma.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let ym = y.iter().zip(&w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..x.len() {
        let dx = x[i] - xm;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * (y[i] - ym);
    }
    let spread = x.iter().map(|v| (v - xm).abs()).fold(0.0, f64::max);
    if !(sxx > 0.0) || spread <= 1e-14 * xm.abs().max(1.0) {
        return Err(Error::DegenerateFit("all x values equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let var_b = 1.0 / sxx;
    let var_a = 1.0 / sw + xm * xm / sxx;
    let cov_ab = -xm / sxx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(x, y)| y - (intercept + slope * x)).collect();
    let chi2 = residuals.iter().zip(&w).map(|(r, w)| r * r * w).sum();
    Ok(LineFit {
        intercept,
        slope,
        covariance: [[var_a, cov_ab], [cov_ab, var_b]],
        chi2,
        residuals,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveFit {
    pub params: Vec<f64>,
    /// (JᵀWJ)⁻¹, not rescaled by the reduced χ².
    pub covariance: Vec<f64>,
    pub chi2: f64,
    pub dof: usize,
    pub iterations: usize,
}

impl CurveFit {
    pub fn sigma(&self, i: usize) -> f64 {
        let n = self.params.len();
        self.covariance[i * n + i].sqrt()
    }

    /// σ scaled by √(χ²/dof), for fits where the weights are only relative.
    pub fn scaled_sigma(&self, i: usize) -> f64 {
        let s = if self.dof > 0 {
            (self.chi2 / self.dof as f64).sqrt()
        } else {
            1.0
        };
        self.sigma(i) * s
    }
}

/// Gauss–Jordan solve of A x = b in place; A is n×n row major.
fn solve(a: &mut [f64], b: &mut [f64], n: usize) -> Option<()> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        let d = a[col * n + col];
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    for i in 0..n {
        b[i] /= a[i * n + i];
    }
    Some(())
}

fn invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for c in 0..n {
        let mut m = a.to_vec();
        let mut e = vec![0.0; n];
        e[c] = 1.0;
        solve(&mut m, &mut e, n)?;
        for r in 0..n {
            inv[r * n + c] = e[r];
        }
    }
    Some(inv)
}

/// Minimises Σ((y − f(x; p))/σ)² starting from `p0`.
pub fn levenberg_marquardt<F>(model: F, x: &[f64], y: &[f64], sigma: &[f64], p0: &[f64]) -> Result<CurveFit>
where
    F: Fn(f64, &[f64]) -> f64,
{
    let n = p0.len();
    let m = x.len();
    if y.len() != m || sigma.len() != m {
        return Err(Error::Domain("x, y and sigma lengths differ".into()));
    }
    if m < n {
        return Err(Error::InsufficientData(alloc::format!("{m} points for {n} parameters")));
    }
    if sigma.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::Domain("all sigmas must be positive".into()));
    }
    let chi2_of = |p: &[f64]| -> f64 { (0..m).map(|i| ((y[i] - model(x[i], p)) / sigma[i]).powi(2)).sum() };
    let mut p = p0.to_vec();
    let mut chi2 = chi2_of(&p);
    if !chi2.is_finite() {
        return Err(Error::DegenerateFit("model not finite at the starting point".into()));
    }
    let mut lambda = 1e-3;
    let mut jac = vec![0.0; m * n];
    let mut iterations = 0;
    let mut jtj = vec![0.0; n * n];

    let build = |p: &[f64], jac: &mut [f64], jtj: &mut [f64], g: &mut [f64]| {
        for k in 0..n {
            let scale = p[k].abs().max(p0[k].abs());
            let h = if scale > 0.0 { 1e-6 * scale } else { 1e-6 };
            let mut hi = p.to_vec();
            let mut lo = p.to_vec();
            hi[k] += h;
            lo[k] -= h;
            for i in 0..m {
                jac[i * n + k] = (model(x[i], &hi) - model(x[i], &lo)) / (2.0 * h) / sigma[i];
            }
        }
        jtj.iter_mut().for_each(|v| *v = 0.0);
        g.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..m {
            let r = (y[i] - model(x[i], p)) / sigma[i];
            for a in 0..n {
                g[a] += jac[i * n + a] * r;
                for b in 0..n {
                    jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
                }
            }
        }
    };

    let mut g = vec![0.0; n];
    build(&p, &mut jac, &mut jtj, &mut g);
    for _ in 0..500 {
        iterations += 1;
        let mut a = jtj.clone();
        for k in 0..n {
            a[k * n + k] += lambda * jtj[k * n + k].max(1e-300);
        }
        let mut step = g.clone();
        if solve(&mut a, &mut step, n).is_none() {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
            continue;
        }
        let trial: Vec<f64> = p.iter().zip(&step).map(|(p, s)| p + s).collect();
        let c = chi2_of(&trial);
        if c.is_finite() && c <= chi2 {
            let done = chi2 - c <= 1e-12 * chi2.max(1e-300)
                && step
                    .iter()
                    .zip(&trial)
                    .all(|(s, p)| s.abs() <= 1e-9 * p.abs().max(1e-12));
            let small_gain = chi2 - c <= 1e-14 * chi2.max(1e-300);
            p = trial;
            chi2 = c;
            lambda = (lambda * 0.3).max(1e-12);
            build(&p, &mut jac, &mut jtj, &mut g);
            if done || small_gain {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    let covariance =
        invert(&jtj, n).ok_or_else(|| Error::DegenerateFit("singular normal matrix at the optimum".into()))?;
    Ok(CurveFit {
        params: p,
        covariance,
        chi2,
        dof: m - n,
        iterations,
    })
}

/// a + b·e^{−λt}·cos(ωt + φ), params [a, b, λ, ω, φ].
pub fn damped_cosine(t: f64, p: &[f64]) -> f64 {
    p[0] + p[1] * (-p[2] * t).exp() * (p[3] * t + p[4]).cos()
}

/// C₀·e^{−t/τ}, params [C₀, τ].
pub fn exponential_decay(t: f64, p: &[f64]) -> f64 {
    p[0] * (-t / p[1]).exp()
}

/// A·exp(−(x − μ)²/(2s²)), params [A, μ, s].
pub fn gaussian(x: f64, p: &[f64]) -> f64 {
    let z = (x - p[1]) / p[2];
    p[0] * (-0.5 * z * z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_recovered() {
        let x = [-4.0, -3.9, 4.1, 4.0];
        let y: Vec<f64> = x.iter().map(|x| 1e3 + 2.100056e6 * x).collect();
        let f = weighted_line_fit(&x, &y, &[1.0; 4]).unwrap();
        assert!((f.slope / 2.100056e6 - 1.0).abs() < 1e-12);
        assert!((f.intercept / 1e3 - 1.0).abs() < 1e-9);
        assert!(f.residuals.iter().all(|r| r.abs() < 1e-6));
    }

    #[test]
    fn line_uncertainties_textbook() {
        // symmetric x = ±1 with unit σ: var(a) = 1/n, var(b) = 1/n
        let f = weighted_line_fit(&[-1.0, 1.0, -1.0, 1.0], &[0.0; 4], &[1.0; 4]).unwrap();
        assert!((f.intercept_sigma() - 0.5).abs() < 1e-15);
        assert!((f.slope_sigma() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_line() {
        let e = weighted_line_fit(&[2.0, 2.0], &[1.0, 3.0], &[1.0, 1.0]).unwrap_err();
        assert!(matches!(e, Error::DegenerateFit(_)));
    }

    #[test]
    fn lm_gaussian() {
        let truth = [50.0, 1.3, 2.5];
        let x: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|&x| gaussian(x, &truth)).collect();
        let f = levenberg_marquardt(gaussian, &x, &y, &vec![1.0; x.len()], &[30.0, 0.0, 1.0]).unwrap();
        for (a, b) in f.params.iter().zip(truth) {
            assert!((a.abs() - b).abs() < 1e-6, "{:?}", f.params);
        }
    }

    #[test]
    fn lm_damped_cosine() {
        let truth = [0.5, -0.5, 3e3, 2e5, 0.0];
        let x: Vec<f64> = (0..200).map(|i| i as f64 * 2e-6).collect();
        let y: Vec<f64> = x.iter().map(|&x| damped_cosine(x, &truth)).collect();
        let f = levenberg_marquardt(
            damped_cosine,
            &x,
            &y,
            &vec![1e-3; x.len()],
            &[0.5, -0.5, 1e3, 1.9e5, 0.1],
        )
        .unwrap();
        assert!((f.params[2] / 3e3 - 1.0).abs() < 1e-6, "{:?}", f.params);
    }
}
