//! Valuation and static hedging of equity protection swaps (EPS).
//!
//! An EPS pays the holder on portfolio losses (protection leg) and charges
//! on gains (fee leg), settled once at maturity through a piecewise-linear
//! adjusted return. This crate prices the vanilla options that replicate
//! that payoff under Black-Scholes, Merton jump-diffusion (full series and
//! the conditioned single-jump variants) and an independent random-time
//! default, builds the static hedge, and computes fair, default-adjusted
//! and super-hedging premiums. A seeded Monte Carlo oracle ([`mc`]) checks
//! every closed form.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bs;
pub mod default;
pub mod error;
pub mod hedging;
pub mod jump;
pub mod market;
pub mod mc;
pub mod normal;
pub mod payoff;

pub use bs::{bs_call, bs_price, bs_put};
pub use default::{
    default_probability, defaultable_price, survival_probability, DefaultParams, IntensitySchedule,
};
pub use error::{EpsError, Result};
pub use hedging::{
    build_hedge, default_adjustment, defaulted_cash_flow, first_protection_level, hedge_cost,
    hedge_payoff, hedged_cash_flow, premium_report, CreditTreatment, Engine, HedgeLeg,
    HedgePortfolio, PremiumReport,
};
pub use jump::{
    at_most_one_jump_price, characteristic_function, compensator, conditional_n_price,
    exactly_one_jump_price, merton_price, parity_gap, terminal_mean, CompensatorMode, JumpDerived,
    JumpModel, JumpParams,
};
pub use market::{MarketParams, OptionKind};
pub use normal::{std_normal_cdf, std_normal_inv_cdf};
pub use payoff::{EpsKind, EpsSpec};
