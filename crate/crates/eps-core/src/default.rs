//! Default at an independent random time with deterministic intensity.
//!
//! Zero-recovery claims paying at `T` only if `τ > T` are worth
//! `e^{-∫γ}` times their default-free value, whatever engine produced it.

use alloc::vec::Vec;

use crate::error::{ensure_non_negative, EpsError, Result};

/// Constant risk-neutral default intensities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DefaultParams {
    /// Intensity of the put seller (hedge counterparty).
    #[cfg_attr(feature = "serde", serde(default))]
    pub gamma_counterparty: f64,
    /// Intensity of the EPS provider toward its own counterparties.
    #[cfg_attr(feature = "serde", serde(default))]
    pub gamma_provider: f64,
}

impl DefaultParams {
    pub fn new(gamma_counterparty: f64, gamma_provider: f64) -> Result<Self> {
        let d = Self {
            gamma_counterparty,
            gamma_provider,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("gamma_counterparty", self.gamma_counterparty)?;
        ensure_non_negative("gamma_provider", self.gamma_provider)
    }
}

/// `P(τ > t) = e^{-γt}`.
pub fn survival_probability(gamma: f64, t: f64) -> Result<f64> {
    ensure_non_negative("gamma", gamma)?;
    ensure_non_negative("t", t)?;
    Ok(libm::exp(-gamma * t))
}

/// `P(τ ≤ T) = 1 - e^{-γT}`.
pub fn default_probability(gamma: f64, t: f64) -> Result<f64> {
    ensure_non_negative("gamma", gamma)?;
    ensure_non_negative("t", t)?;
    Ok(-libm::expm1(-gamma * t))
}

/// `e^{-γT} · base_price`.
pub fn defaultable_price(base_price: f64, gamma: f64, t: f64) -> Result<f64> {
    ensure_non_negative("base_price", base_price)?;
    Ok(survival_probability(gamma, t)? * base_price)
}

/// Piecewise-constant intensity: `rates[k]` applies on
/// `[knots[k-1], knots[k])` with `knots[-1] = 0`; the last rate extends
/// beyond the last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensitySchedule {
    knots: Vec<f64>,
    rates: Vec<f64>,
}

impl IntensitySchedule {
    pub fn new(knots: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if rates.len() != knots.len() + 1 {
            return Err(EpsError::Config(alloc::format!(
                "{} knots need {} intensities, got {}",
                knots.len(),
                knots.len() + 1,
                rates.len()
            )));
        }
        let mut prev = 0.0;
        for &k in &knots {
            if !(k.is_finite() && k > prev) {
                return Err(EpsError::Domain {
                    name: "knot",
                    value: k,
                });
            }
            prev = k;
        }
        for &r in &rates {
            ensure_non_negative("intensity", r)?;
        }
        Ok(Self { knots, rates })
    }

    pub fn constant(gamma: f64) -> Result<Self> {
        Self::new(Vec::new(), alloc::vec![gamma])
    }

    /// `∫_0^t γ(u) du`.
    pub fn integrated(&self, t: f64) -> Result<f64> {
        ensure_non_negative("t", t)?;
        let mut acc = 0.0;
        let mut start = 0.0;
        for (k, &rate) in self.rates.iter().enumerate() {
            let end = self.knots.get(k).copied().unwrap_or(f64::INFINITY);
            acc += rate * (t.min(end) - start);
            if t <= end {
                break;
            }
            start = end;
        }
        Ok(acc)
    }

    pub fn survival(&self, t: f64) -> Result<f64> {
        Ok(libm::exp(-self.integrated(t)?))
    }

    pub fn default_probability(&self, t: f64) -> Result<f64> {
        Ok(-libm::expm1(-self.integrated(t)?))
    }

    pub fn discount(&self, base_price: f64, t: f64) -> Result<f64> {
        ensure_non_negative("base_price", base_price)?;
        Ok(self.survival(t)? * base_price)
    }
}
