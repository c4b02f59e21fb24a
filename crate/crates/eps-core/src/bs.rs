//! Black-Scholes European option prices at time zero.
//!
//! Time-`t` prices are obtained by passing the remaining maturity.

use crate::error::{ensure_finite, ensure_positive, Result};
use crate::market::{MarketParams, OptionKind};
use crate::normal::norm_cdf;

pub fn bs_call(mkt: &MarketParams, strike: f64) -> Result<f64> {
    bs_price(mkt, strike, OptionKind::Call)
}

pub fn bs_put(mkt: &MarketParams, strike: f64) -> Result<f64> {
    bs_price(mkt, strike, OptionKind::Put)
}

pub fn bs_price(mkt: &MarketParams, strike: f64, kind: OptionKind) -> Result<f64> {
    mkt.validate()?;
    ensure_positive("strike", strike)?;
    Ok(bs_kernel(
        mkt.spot,
        strike,
        mkt.rate,
        mkt.volatility,
        mkt.maturity,
        kind,
    ))
}

/// Unchecked kernel shared by the jump series. `rate` is used for both the
/// drift and the discounting, as in the standard formula.
#[inline]
pub(crate) fn bs_kernel(
    spot: f64,
    strike: f64,
    rate: f64,
    vol: f64,
    maturity: f64,
    kind: OptionKind,
) -> f64 {
    let sd = vol * libm::sqrt(maturity);
    let df = libm::exp(-rate * maturity);
    let d_plus = (libm::log(spot / strike) + (rate + 0.5 * vol * vol) * maturity) / sd;
    let d_minus = d_plus - sd;
    match kind {
        OptionKind::Call => spot * norm_cdf(d_plus) - df * strike * norm_cdf(d_minus),
        OptionKind::Put => df * strike * norm_cdf(-d_minus) - spot * norm_cdf(-d_plus),
    }
}

/// Checked variant for callers that already validated the market but pass
/// an adjusted rate/volatility pair.
pub(crate) fn bs_kernel_checked(
    spot: f64,
    strike: f64,
    rate: f64,
    vol: f64,
    maturity: f64,
    kind: OptionKind,
) -> Result<f64> {
    ensure_finite("rate", rate)?;
    ensure_positive("volatility", vol)?;
    Ok(bs_kernel(spot, strike, rate, vol, maturity, kind))
}
