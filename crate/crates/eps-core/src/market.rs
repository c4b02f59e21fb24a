use crate::error::{ensure_finite, ensure_positive, Result};

/// Black-Scholes market inputs at valuation time zero.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MarketParams {
    pub spot: f64,
    /// Continuously compounded annual rate; any sign.
    pub rate: f64,
    pub volatility: f64,
    /// Years.
    pub maturity: f64,
}

impl MarketParams {
    pub fn new(spot: f64, rate: f64, volatility: f64, maturity: f64) -> Result<Self> {
        let m = Self {
            spot,
            rate,
            volatility,
            maturity,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("spot", self.spot)?;
        ensure_finite("rate", self.rate)?;
        ensure_positive("volatility", self.volatility)?;
        ensure_positive("maturity", self.maturity)
    }

    /// `e^{-rT}`.
    #[inline]
    pub fn discount(&self) -> f64 {
        libm::exp(-self.rate * self.maturity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum OptionKind {
    Call,
    Put,
}

impl OptionKind {
    #[inline]
    pub fn payoff(self, strike: f64, terminal: f64) -> f64 {
        match self {
            OptionKind::Call => (terminal - strike).max(0.0),
            OptionKind::Put => (strike - terminal).max(0.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OptionKind::Call => "call",
            OptionKind::Put => "put",
        }
    }
}
