//! Systematic-shift budget and exact absolute frequencies.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::constants::NU_CA_HZ;
use crate::error::{Error, Result};

/// Absolute optical frequency held as an integer number of mHz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Frequency(i128);

impl Frequency {
    pub const fn from_millihertz(mhz: i128) -> Self {
        Self(mhz)
    }

    pub const fn from_hz(hz: i128) -> Self {
        Self(hz * 1000)
    }

    pub const fn millihertz(self) -> i128 {
        self.0
    }

    /// Adds an offset in Hz, rounded to the nearest mHz.
    pub fn offset(self, hz: f64) -> Result<Self> {
        if !hz.is_finite() || hz.abs() > 1e30 {
            return Err(Error::Precision(alloc::format!("offset {hz} Hz not representable")));
        }
        let d = (hz * 1000.0).round() as i128;
        self.0
            .checked_add(d)
            .map(Self)
            .ok_or_else(|| Error::Precision("frequency overflow".into()))
    }

    /// Difference self − other in Hz.
    pub fn minus(self, other: Self) -> f64 {
        (self.0 - other.0) as f64 / 1000.0
    }

    pub fn as_hz_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    /// Nearest integer Hz, halves away from zero.
    pub fn rounded_hz(self) -> i128 {
        let q = self.0.div_euclid(1000);
        let r = self.0.rem_euclid(1000);
        if r >= 500 {
            q + 1
        } else {
            q
        }
    }

    pub fn ratio_to(self, other: Self) -> f64 {
        let a = self.0 as f64;
        let b = other.0 as f64;
        a / b
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let a = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:03}", a / 1000, a % 1000)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ion {
    Ca,
    Al,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RowKind {
    /// Shift is corrected and its uncertainty enters the total.
    #[default]
    Correction,
    /// Only the uncertainty enters; the value is a limit, never applied.
    Bound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetRow {
    pub label: String,
    pub ion: Ion,
    /// Hz, perturbed minus unperturbed frequency of that ion's transition.
    pub shift: f64,
    pub uncertainty: f64,
    pub kind: RowKind,
}

impl BudgetRow {
    pub fn new(label: &str, ion: Ion, shift: f64, uncertainty: f64) -> Self {
        Self {
            label: label.into(),
            ion,
            shift,
            uncertainty,
            kind: RowKind::Correction,
        }
    }

    pub fn bound(label: &str, ion: Ion, uncertainty: f64) -> Self {
        Self {
            kind: RowKind::Bound,
            ..Self::new(label, ion, 0.0, uncertainty)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBudget {
    pub rows: Vec<BudgetRow>,
    /// ν_Al / ν_Ca
    pub frequency_ratio: Option<f64>,
    pub reference_frequency: Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetResult {
    /// Hz, added to the measured frequency.
    pub correction: f64,
    pub total_uncertainty: f64,
    pub corrected: Frequency,
}

pub const TABLE_ROW_SD: &str = "S1/2-D5/2 frequency";
pub const TABLE_ROW_QUADRUPOLE: &str = "Electric quadrupole shift";
pub const TABLE_ROW_ZEEMAN2: &str = "2nd order Zeeman shift";
pub const TABLE_ROW_RAMSEY: &str = "Ramsey probe time dependence";
pub const TABLE_ROW_STATISTICS: &str = "Statistics";

impl ErrorBudget {
    pub fn new(frequency_ratio: Option<f64>) -> Self {
        Self {
            rows: Vec::new(),
            frequency_ratio,
            reference_frequency: Frequency::from_hz(NU_CA_HZ),
        }
    }

    /// Published shift table for the Al⁺ intercombination line.
    pub fn published(frequency_ratio: f64) -> Self {
        let mut b = Self::new(Some(frequency_ratio));
        b.rows = alloc::vec![
            BudgetRow::new(TABLE_ROW_SD, Ion::Ca, 0.0, 4.0),
            BudgetRow::new(TABLE_ROW_QUADRUPOLE, Ion::Ca, 2.7, 0.1),
            BudgetRow::new(TABLE_ROW_QUADRUPOLE, Ion::Al, -7.4, 0.0),
            BudgetRow::new(TABLE_ROW_ZEEMAN2, Ion::Ca, 2.8, 0.0),
            BudgetRow::new(TABLE_ROW_ZEEMAN2, Ion::Al, -2.1, 0.0),
            BudgetRow::new(TABLE_ROW_RAMSEY, Ion::Al, 0.0, 85.0),
            BudgetRow::new(TABLE_ROW_STATISTICS, Ion::Al, 0.0, 36.0),
        ];
        b
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.frequency_ratio {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Config(alloc::format!("frequency ratio {r} must be > 0")));
            }
        }
        for row in &self.rows {
            if !(row.uncertainty >= 0.0) || !row.shift.is_finite() {
                return Err(Error::Config(alloc::format!("row '{}' invalid", row.label)));
            }
        }
        Ok(())
    }

    /// Sum of correction-row shifts for one ion.
    pub fn total_shift(&self, ion: Ion) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.ion == ion && r.kind == RowKind::Correction)
            .map(|r| r.shift)
            .sum()
    }

    /// Quadrature sum of row uncertainties for one ion, unscaled.
    pub fn total_uncertainty(&self, ion: Ion) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.ion == ion)
            .map(|r| r.uncertainty * r.uncertainty)
            .sum::<f64>()
            .sqrt()
    }
}

/// Correction = −Σ Al + ratio·Σ Ca; uncertainty in quadrature with Ca rows
/// scaled by the ratio.
pub fn error_budget_apply(budget: &ErrorBudget, f0_measured: Frequency) -> Result<BudgetResult> {
    budget.validate()?;
    let has_ca = budget.rows.iter().any(|r| r.ion == Ion::Ca);
    let ratio = match (budget.frequency_ratio, has_ca) {
        (Some(r), _) => r,
        (None, false) => 1.0,
        (None, true) => return Err(Error::Config("frequency ratio not set".into())),
    };
    let mut correction = 0.0;
    let mut var = 0.0;
    for row in &budget.rows {
        let (sign, scale) = match row.ion {
            Ion::Al => (-1.0, 1.0),
            Ion::Ca => (1.0, ratio),
        };
        if row.kind == RowKind::Correction {
            correction += sign * scale * row.shift;
        }
        var += (scale * row.uncertainty).powi(2);
    }
    Ok(BudgetResult {
        correction,
        total_uncertainty: var.sqrt(),
        corrected: f0_measured.offset(correction)?,
    })
}

/// Fractional g-factor error bound from an ac field mimicking `mimic_field`
/// on top of the bias field `bias_field` (same units).
pub fn ac_zeeman_g_bound(mimic_field: f64, bias_field: f64) -> Result<f64> {
    if !(bias_field > 0.0) {
        return Err(Error::Domain("bias field must be > 0".into()));
    }
    Ok(mimic_field.abs() / bias_field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    const F0: Frequency = Frequency::from_hz(1_122_842_857_334_711);

    fn ratio() -> f64 {
        Frequency::from_hz(1_122_842_857_334_736).ratio_to(Frequency::from_hz(NU_CA_HZ))
    }

    #[test]
    fn published_budget() {
        let r = error_budget_apply(&ErrorBudget::published(ratio()), F0).unwrap();
        // oracle: 9.5 + 5.5·ratio, √(85² + 36² + (4·ratio)² + (0.1·ratio)²)
        let rt = ratio();
        assert!((r.correction - (9.5 + 5.5 * rt)).abs() < 1e-9);
        assert!((r.correction - 24.5).abs() < 0.1);
        let u = (85.0f64 * 85.0 + 36.0 * 36.0 + (4.0 * rt).powi(2) + (0.1 * rt).powi(2)).sqrt();
        assert!((r.total_uncertainty - u).abs() < 1e-9);
        assert!((r.total_uncertainty - 93.0).abs() < 1.0);
        assert_eq!(r.corrected.rounded_hz(), 1_122_842_857_334_736);
    }

    #[test]
    fn empty_budget() {
        let r = error_budget_apply(&ErrorBudget::new(None), F0).unwrap();
        assert_eq!((r.correction, r.total_uncertainty), (0.0, 0.0));
        assert_eq!(r.corrected, F0);
    }

    #[test]
    fn ca_rows_need_ratio() {
        let mut b = ErrorBudget::new(None);
        b.rows.push(BudgetRow::new("x", Ion::Ca, 1.0, 1.0));
        assert!(matches!(error_budget_apply(&b, F0), Err(Error::Config(_))));
    }

    #[test]
    fn bound_rows_never_correct() {
        let mut b = ErrorBudget::new(Some(2.0));
        b.rows.push(BudgetRow::bound("cross-mode", Ion::Al, 5.0));
        let r = error_budget_apply(&b, F0).unwrap();
        assert_eq!(r.correction, 0.0);
        assert_eq!(r.total_uncertainty, 5.0);
        assert!((ac_zeeman_g_bound(4e-6, 4.0).unwrap() - 1e-6).abs() < 1e-18);
    }

    #[test]
    fn display_and_rounding() {
        assert_eq!(Frequency::from_millihertz(1500).to_string(), "1.500");
        assert_eq!(Frequency::from_millihertz(-1500).to_string(), "-1.500");
        assert_eq!(Frequency::from_millihertz(1500).rounded_hz(), 2);
        assert_eq!(Frequency::from_millihertz(1499).rounded_hz(), 1);
    }

    proptest::proptest! {
        #[test]
        fn ratio_scaling_linear(shifts in proptest::collection::vec(-10.0f64..10.0, 1..6), r in 0.5f64..4.0) {
            let mut unit = ErrorBudget::new(Some(1.0));
            let mut scaled = ErrorBudget::new(Some(r));
            let mut pre = ErrorBudget::new(Some(1.0));
            for (i, s) in shifts.iter().enumerate() {
                let label = alloc::format!("row{i}");
                unit.rows.push(BudgetRow::new(&label, Ion::Ca, *s, 0.0));
                scaled.rows.push(BudgetRow::new(&label, Ion::Ca, *s, 0.0));
                pre.rows.push(BudgetRow::new(&label, Ion::Ca, s * r, 0.0));
            }
            let a = error_budget_apply(&unit, F0).unwrap().correction * r;
            let b = error_budget_apply(&scaled, F0).unwrap().correction;
            let c = error_budget_apply(&pre, F0).unwrap().correction;
            proptest::prop_assert!((a - b).abs() < 1e-9 && (b - c).abs() < 1e-9);
        }
    }
}
