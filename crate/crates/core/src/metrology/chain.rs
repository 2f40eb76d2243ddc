//! Exact affine frequency chains, ν_out = a·ν_in + b.

use alloc::string::String;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, One, Zero};

use super::budget::Frequency;
use crate::error::{Error, Result};

type Q = Ratio<i128>;

fn overflow() -> Error {
    Error::Precision("frequency chain overflowed 128-bit rational arithmetic".into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyChainNode {
    pub label: String,
    pub a: Ratio<i128>,
    /// Offset in mHz.
    pub b_millihertz: Ratio<i128>,
}

impl FrequencyChainNode {
    pub fn new(label: &str, a: Ratio<i128>, b_millihertz: Ratio<i128>) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Domain(alloc::format!("node '{label}' has a = 0")));
        }
        Ok(Self {
            label: label.into(),
            a,
            b_millihertz,
        })
    }

    pub fn identity() -> Self {
        Self {
            label: "identity".into(),
            a: Q::one(),
            b_millihertz: Q::zero(),
        }
    }

    pub fn scale(label: &str, num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Self::new(label, Q::new(num, den), Q::zero())
    }

    pub fn offset_hz(label: &str, hz: i128) -> Result<Self> {
        let b = hz.checked_mul(1000).ok_or_else(overflow)?;
        Self::new(label, Q::one(), Q::from_integer(b))
    }

    pub fn offset_millihertz(label: &str, mhz: i128) -> Result<Self> {
        Self::new(label, Q::one(), Q::from_integer(mhz))
    }

    /// `next ∘ self`: apply self, then next.
    pub fn then(&self, next: &Self) -> Result<Self> {
        let a = next.a.checked_mul(&self.a).ok_or_else(overflow)?;
        let b = next
            .a
            .checked_mul(&self.b_millihertz)
            .and_then(|ab| ab.checked_add(&next.b_millihertz))
            .ok_or_else(overflow)?;
        Ok(Self {
            label: alloc::format!("{} > {}", self.label, next.label),
            a,
            b_millihertz: b,
        })
    }

    /// Exact output in mHz as a rational.
    pub fn apply_exact(&self, input_millihertz: Q) -> Result<Q> {
        self.a
            .checked_mul(&input_millihertz)
            .and_then(|v| v.checked_add(&self.b_millihertz))
            .ok_or_else(overflow)
    }
}

/// Rounds a rational mHz value to the nearest mHz, halves away from zero.
fn round_mhz(q: &Q) -> i128 {
    q.round().to_integer()
}

/// Composes the chain left to right and evaluates it at `anchor`.
pub fn frequency_chain_eval(chain: &[FrequencyChainNode], anchor: Frequency) -> Result<Frequency> {
    let first = chain
        .first()
        .ok_or_else(|| Error::InsufficientData("empty frequency chain".into()))?;
    let mut total = first.clone();
    for n in &chain[1..] {
        total = total.then(n)?;
    }
    let out = total.apply_exact(Q::from_integer(anchor.millihertz()))?;
    Ok(Frequency::from_millihertz(round_mhz(&out)))
}

/// Comb settings linking the 729 nm laser to the fundamental of the Al⁺ probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CombLink {
    /// Mode number of the line beating with the 729 nm laser.
    pub n_729: i128,
    /// Mode number of the line beating with the 1068 nm laser.
    pub n_1068: i128,
    /// Carrier-envelope offset, mHz.
    pub f_ceo: i128,
    /// Beat of the 729 nm laser with its comb line, mHz.
    pub f_beat_729: i128,
    /// Beat of the 1068 nm laser with its comb line, mHz.
    pub f_beat_1068: i128,
    /// Harmonic from 1068 nm to the probe wavelength.
    pub harmonic: i128,
}

impl CombLink {
    /// ν_729 → f_rep → ν_1068 → ν_probe as three nodes.
    pub fn chain(&self) -> Result<[FrequencyChainNode; 3]> {
        if self.n_729 <= 0 || self.n_1068 <= 0 || self.harmonic <= 0 {
            return Err(Error::Domain("comb mode numbers and harmonic must be positive".into()));
        }
        let off = self.f_ceo.checked_add(self.f_beat_729).ok_or_else(overflow)?;
        let rep = FrequencyChainNode::new("repetition rate", Q::new(1, self.n_729), Q::new(-off, self.n_729))?;
        let line = FrequencyChainNode::new(
            "1068 nm comb line",
            Q::from_integer(self.n_1068),
            Q::from_integer(self.f_ceo.checked_add(self.f_beat_1068).ok_or_else(overflow)?),
        )?;
        let harm = FrequencyChainNode::scale("harmonic", self.harmonic, 1)?;
        Ok([rep, line, harm])
    }

    /// Beat note at 1068 nm that makes the chain output `target` from `nu_729`.
    pub fn beat_for(&self, nu_729: Frequency, target: Frequency) -> Result<i128> {
        let mut probe = *self;
        probe.f_beat_1068 = 0;
        let at_zero = frequency_chain_eval(&probe.chain()?, nu_729)?;
        let gap = target.millihertz() - at_zero.millihertz();
        // harmonic multiplies the beat
        Ok(Q::new(gap, self.harmonic).round().to_integer())
    }
}
