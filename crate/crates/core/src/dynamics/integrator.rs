//! Dormand–Prince 5(4) with embedded error estimate and PI-free step control.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Initial step guess, s; `None` lets the caller's scale decide.
    pub initial_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-11,
            max_steps: 2_000_000,
            initial_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub last_step: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates y' = f(t, y) from `t0` to `t1` in place.
pub fn dopri5<F>(mut f: F, t0: f64, t1: f64, y: &mut [C64], opts: &IntegratorOptions) -> Result<IntegratorStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len();
    let mut stats = IntegratorStats::default();
    let span = t1 - t0;
    if span == 0.0 || n == 0 {
        return Ok(stats);
    }
    if !(span > 0.0) {
        return Err(Error::Integrator {
            time: t0,
            step: span,
            steps: 0,
            reason: "negative integration span",
        });
    }
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![C64::new(0.0, 0.0); n]).collect();
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut ynew = vec![C64::new(0.0, 0.0); n];

    let mut t = t0;
    let mut h = opts.initial_step.unwrap_or(span / 100.0).min(span);
    f(t, y, &mut k[0]);

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integrator {
                time: t,
                step: h,
                steps: stats.accepted + stats.rejected,
                reason: "step budget exhausted",
            });
        }
        let last = t + h >= t1 - 1e-14 * span.abs();
        if last {
            h = t1 - t;
        }

        macro_rules! stage {
            ($dst:expr, $c:expr, [$($a:expr => $ki:expr),*]) => {{
                for i in 0..n {
                    tmp[i] = y[i] $(+ k[$ki][i] * (h * $a))*;
                }
                let (before, after) = k.split_at_mut($dst);
                let _ = before;
                f(t + $c * h, &tmp, &mut after[0]);
            }};
        }
        stage!(1, C2, [A21 => 0]);
        stage!(2, C3, [A31 => 0, A32 => 1]);
        stage!(3, C4, [A41 => 0, A42 => 1, A43 => 2]);
        stage!(4, C5, [A51 => 0, A52 => 1, A53 => 2, A54 => 3]);
        stage!(5, 1.0, [A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4]);
        for i in 0..n {
            ynew[i] = y[i] + (k[0][i] * B1 + k[2][i] * B3 + k[3][i] * B4 + k[4][i] * B5 + k[5][i] * B6) * h;
        }
        {
            let (before, after) = k.split_at_mut(6);
            let _ = before;
            f(t + h, &ynew, &mut after[0]);
        }

        let mut acc = 0.0;
        for i in 0..n {
            let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * h;
            let sc = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
            acc += (e.norm() / sc).powi(2);
        }
        let err = (acc / n as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Integrator {
                time: t,
                step: h,
                steps: stats.accepted + stats.rejected,
                reason: "non-finite error estimate",
            });
        }

        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&ynew);
            k.swap(0, 6);
            stats.accepted += 1;
            stats.last_step = h;
            if last {
                return Ok(stats);
            }
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).max(0.1);
        }
        if h < 1e-14 * span.abs().max(t.abs()) {
            return Err(Error::Integrator {
                time: t,
                step: h,
                steps: stats.accepted + stats.rejected,
                reason: "step size underflow",
            });
        }
    }
}
