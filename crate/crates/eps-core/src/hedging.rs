//! Static replication of `-ψ` with vanilla options, hedge valuation under
//! a pluggable engine, and premiums that account for hedge counterparty
//! default.
//!
//! Quantities and cash flows are per unit nominal unless a function says
//! otherwise.

use alloc::vec::Vec;

use crate::default::default_probability;
use crate::error::{ensure_non_negative, EpsError, Result};
use crate::jump::{poisson_weights, JumpModel, JumpParams};
use crate::market::{MarketParams, OptionKind};
use crate::normal::norm_cdf;
use crate::payoff::EpsSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HedgeLeg {
    pub kind: OptionKind,
    pub strike: f64,
    /// Signed number of options per unit nominal; negative means sold.
    pub quantity: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HedgePortfolio {
    /// Spot the strikes were built from.
    pub spot: f64,
    pub legs: Vec<HedgeLeg>,
}

impl HedgePortfolio {
    /// Terminal value `H(T)` at return `r_t`.
    pub fn payoff(&self, r_t: f64) -> f64 {
        let terminal = self.spot * (1.0 + r_t);
        self.legs
            .iter()
            .map(|leg| leg.quantity * leg.kind.payoff(leg.strike, terminal))
            .sum()
    }

    /// The put legs alone, i.e. the hedge of the protection leg.
    pub fn protection_only(&self) -> Self {
        Self {
            spot: self.spot,
            legs: self
                .legs
                .iter()
                .filter(|l| l.kind == OptionKind::Put)
                .copied()
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.legs.is_empty()
    }
}

/// Puts at `S_0(1+l_i)` with quantity `(p_{i+1}-p_i)/S_0` and calls at
/// `S_0(1+g_j)` with quantity `-(f_{j+1}-f_j)/S_0`, with `l_0 = g_0 = 0`
/// and `p_0 = f_0 = 0`. Zero legs are dropped.
pub fn build_hedge(spec: &EpsSpec, mkt: &MarketParams) -> Result<HedgePortfolio> {
    spec.validate()?;
    mkt.validate()?;
    let s0 = mkt.spot;
    let mut legs = Vec::new();

    let mut prev = 0.0;
    for (i, &p) in spec.protection_rates.iter().enumerate() {
        let level = if i == 0 {
            0.0
        } else {
            spec.protection_levels[i - 1]
        };
        let dp = p - prev;
        if dp != 0.0 {
            legs.push(HedgeLeg {
                kind: OptionKind::Put,
                strike: s0 * (1.0 + level),
                quantity: dp / s0,
            });
        }
        prev = p;
    }

    let mut prev = 0.0;
    for (j, &f) in spec.fee_rates.iter().enumerate() {
        let level = if j == 0 { 0.0 } else { spec.fee_levels[j - 1] };
        let df = f - prev;
        if df != 0.0 {
            legs.push(HedgeLeg {
                kind: OptionKind::Call,
                strike: s0 * (1.0 + level),
                quantity: -df / s0,
            });
        }
        prev = f;
    }

    Ok(HedgePortfolio { spot: s0, legs })
}

/// `H(T)` for the portfolio at terminal return `r_t`.
pub fn hedge_payoff(port: &HedgePortfolio, r_t: f64) -> f64 {
    port.payoff(r_t)
}

/// How default risk discounts option values inside a hedge.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CreditTreatment {
    #[default]
    None,
    /// Every leg discounted by `e^{-γT}`.
    AllLegs { gamma: f64 },
    /// Long puts discounted by the counterparty intensity, short puts by
    /// the provider intensity; calls are left alone.
    PutCounterparty {
        gamma_counterparty: f64,
        gamma_provider: f64,
    },
}

impl CreditTreatment {
    fn factor(&self, leg: &HedgeLeg, maturity: f64) -> Result<f64> {
        let gamma = match *self {
            CreditTreatment::None => 0.0,
            CreditTreatment::AllLegs { gamma } => gamma,
            CreditTreatment::PutCounterparty {
                gamma_counterparty,
                gamma_provider,
            } => match leg.kind {
                OptionKind::Call => 0.0,
                OptionKind::Put if leg.quantity > 0.0 => gamma_counterparty,
                OptionKind::Put => gamma_provider,
            },
        };
        ensure_non_negative("default intensity", gamma)?;
        Ok(libm::exp(-gamma * maturity))
    }
}

/// A pricing regime for hedge legs: a base model (Black-Scholes when
/// `jumps` is `None`) plus a credit treatment.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Engine {
    pub jumps: Option<JumpModel>,
    pub credit: CreditTreatment,
}

impl Engine {
    pub const fn vanilla() -> Self {
        Self {
            jumps: None,
            credit: CreditTreatment::None,
        }
    }

    pub const fn merton() -> Self {
        Self {
            jumps: Some(JumpModel::Full),
            credit: CreditTreatment::None,
        }
    }

    pub const fn exactly_one_jump() -> Self {
        Self {
            jumps: Some(JumpModel::ExactlyOne),
            credit: CreditTreatment::None,
        }
    }

    pub const fn at_most_one_jump() -> Self {
        Self {
            jumps: Some(JumpModel::AtMostOne),
            credit: CreditTreatment::None,
        }
    }

    /// Black-Scholes legs all discounted for default at intensity `gamma`.
    pub const fn vanilla_with_default(gamma: f64) -> Self {
        Self {
            jumps: None,
            credit: CreditTreatment::AllLegs { gamma },
        }
    }

    /// Merton legs with long puts exposed to the counterparty and short
    /// puts to the provider.
    pub const fn merton_with_default(gamma_counterparty: f64, gamma_provider: f64) -> Self {
        Self {
            jumps: Some(JumpModel::Full),
            credit: CreditTreatment::PutCounterparty {
                gamma_counterparty,
                gamma_provider,
            },
        }
    }

    pub const fn with_credit(mut self, credit: CreditTreatment) -> Self {
        self.credit = credit;
        self
    }

    /// Default-free price of one option under the base model.
    pub fn base_price(
        &self,
        mkt: &MarketParams,
        jp: Option<&JumpParams>,
        strike: f64,
        kind: OptionKind,
    ) -> Result<f64> {
        match self.jumps {
            None => crate::bs::bs_price(mkt, strike, kind),
            Some(model) => {
                let jp = jp.ok_or_else(|| {
                    EpsError::Config(alloc::format!(
                        "{} engine needs jump parameters",
                        model.as_str()
                    ))
                })?;
                model.price(mkt, jp, strike, kind)
            }
        }
    }

    /// Signed value of one leg including its credit discount.
    pub fn leg_value(
        &self,
        mkt: &MarketParams,
        jp: Option<&JumpParams>,
        leg: &HedgeLeg,
    ) -> Result<f64> {
        let base = self.base_price(mkt, jp, leg.strike, leg.kind)?;
        Ok(leg.quantity * base * self.credit.factor(leg, mkt.maturity)?)
    }
}

/// `H(0)`: sum of signed leg values under `engine`.
pub fn hedge_cost(
    port: &HedgePortfolio,
    mkt: &MarketParams,
    jp: Option<&JumpParams>,
    engine: &Engine,
) -> Result<f64> {
    let mut acc = 0.0;
    for leg in &port.legs {
        acc += engine.leg_value(mkt, jp, leg)?;
    }
    Ok(acc)
}

/// `CF_T = N_p[(c - H(0)) e^{rT} + H(T) + ψ(R_T)]`, with `premium` and
/// `h0` per unit nominal.
pub fn hedged_cash_flow(
    spec: &EpsSpec,
    port: &HedgePortfolio,
    mkt: &MarketParams,
    h0: f64,
    premium: f64,
    r_t: f64,
) -> Result<f64> {
    let psi = spec.adjusted_return(r_t)?;
    let carry = (premium - h0) * libm::exp(mkt.rate * mkt.maturity);
    Ok(spec.nominal * (carry + port.payoff(r_t) + psi))
}

/// Cash flow after the put seller defaulted:
/// `N_p[(c - H(0)) e^{rT} - p̂ (l̂ - R_T)^+]`. Without any protection the
/// second term is absent.
pub fn defaulted_cash_flow(
    spec: &EpsSpec,
    mkt: &MarketParams,
    h0: f64,
    premium: f64,
    r_t: f64,
) -> Result<f64> {
    spec.adjusted_return(r_t)?;
    let carry = (premium - h0) * libm::exp(mkt.rate * mkt.maturity);
    let loss = match first_protection_level(spec) {
        Ok((l_hat, p_hat)) => p_hat * (l_hat - r_t).max(0.0),
        Err(_) => 0.0,
    };
    Ok(spec.nominal * (carry - loss))
}

/// `(l̂, p̂)`: the upper end of the first loss segment with positive
/// participation, and that participation.
pub fn first_protection_level(spec: &EpsSpec) -> Result<(f64, f64)> {
    spec.protection_rates
        .iter()
        .enumerate()
        .find(|(_, &p)| p > 0.0)
        .map(|(i, &p)| {
            let level = if i == 0 {
                0.0
            } else {
                spec.protection_levels[i - 1]
            };
            (level, p)
        })
        .ok_or(EpsError::NotApplicable(
            "EPS has no positive protection participation",
        ))
}

/// Default adjustment `DA`: probability of counterparty default times
/// `p̂ · Σ_n w_n e^{r_n T} N((ln(1+l̂) - (r_n + σ_n²/2)T) / (σ_n √T))`,
/// with the weights `w_n` set by `jumps` (`None` is Black-Scholes).
/// Specs without protection give zero.
pub fn default_adjustment(
    spec: &EpsSpec,
    mkt: &MarketParams,
    jp: Option<&JumpParams>,
    gamma_counterparty: f64,
    jumps: Option<JumpModel>,
) -> Result<f64> {
    spec.validate()?;
    mkt.validate()?;
    let pd = default_probability(gamma_counterparty, mkt.maturity)?;
    let (l_hat, p_hat) = match first_protection_level(spec) {
        Ok(v) => v,
        Err(_) => return Ok(0.0),
    };
    if 1.0 + l_hat <= 0.0 {
        return Err(EpsError::Domain {
            name: "1 + l_hat",
            value: 1.0 + l_hat,
        });
    }
    let log_k = libm::log1p(l_hat);
    let t = mkt.maturity;
    let severity = |rate: f64, vol: f64| {
        libm::exp(rate * t)
            * norm_cdf((log_k - (rate + 0.5 * vol * vol) * t) / (vol * libm::sqrt(t)))
    };

    let sum = match jumps {
        None => severity(mkt.rate, mkt.volatility),
        Some(model) => {
            let jp = jp.ok_or(EpsError::Config(alloc::string::String::from(
                "jump default adjustment needs jump parameters",
            )))?;
            jp.validate()?;
            let d = jp.derived();
            let term = |n: usize| severity(d.rate_n(mkt, n), d.vol_n(mkt, jp, n));
            let lt = jp.lambda * t;
            match model {
                JumpModel::Full => {
                    let mut acc = 0.0;
                    for (n, w) in poisson_weights(lt, jp.n_max, jp.tail_tol) {
                        acc += w * term(n);
                    }
                    acc
                }
                JumpModel::ExactlyOne => term(1),
                JumpModel::AtMostOne => (term(0) + lt * term(1)) / (1.0 + lt),
            }
        }
    };
    if !sum.is_finite() {
        return Err(EpsError::Numerical {
            context: "default_adjustment",
            n: 0,
        });
    }
    Ok(pd * p_hat * sum)
}

/// Premium figures for one base model.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PremiumReport {
    /// Base model; `None` is Black-Scholes.
    pub model: Option<JumpModel>,
    pub l_hat: f64,
    pub p_hat: f64,
    /// Default-free hedge cost `H(0)`.
    pub hedge_cost: f64,
    /// `ĉ = H(0)`.
    pub fair_premium: f64,
    /// Hedge cost with long puts discounted at the counterparty intensity.
    pub hedge_cost_credit: f64,
    pub default_adjustment: f64,
    /// `c^D`: credit hedge cost plus discounted `DA`.
    pub default_adjusted_premium: f64,
    /// `c^{SD}`: credit hedge cost plus the discounted worst-case loss
    /// `p̂(1+l̂)` weighted by the default probability.
    pub super_hedging_premium: f64,
}

pub fn premium_report(
    spec: &EpsSpec,
    mkt: &MarketParams,
    jp: Option<&JumpParams>,
    gamma_counterparty: f64,
    jumps: Option<JumpModel>,
) -> Result<PremiumReport> {
    let (l_hat, p_hat) = first_protection_level(spec)?;
    let port = build_hedge(spec, mkt)?;
    let engine = Engine {
        jumps,
        credit: CreditTreatment::None,
    };
    let hedge = hedge_cost(&port, mkt, jp, &engine)?;
    let credit = hedge_cost(
        &port,
        mkt,
        jp,
        &engine.with_credit(CreditTreatment::PutCounterparty {
            gamma_counterparty,
            gamma_provider: 0.0,
        }),
    )?;
    let da = default_adjustment(spec, mkt, jp, gamma_counterparty, jumps)?;
    let df = mkt.discount();
    let pd = default_probability(gamma_counterparty, mkt.maturity)?;
    Ok(PremiumReport {
        model: jumps,
        l_hat,
        p_hat,
        hedge_cost: hedge,
        fair_premium: hedge,
        hedge_cost_credit: credit,
        default_adjustment: da,
        default_adjusted_premium: credit + df * da,
        super_hedging_premium: credit + df * p_hat * (1.0 + l_hat) * pd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jump::CompensatorMode;
    use crate::payoff::tests::arb_spec;
    use proptest::prelude::*;

    fn mkt() -> MarketParams {
        MarketParams::new(100.0, 0.015, 0.2, 1.0).unwrap()
    }

    fn grid(n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| -0.999 + 3.999 * i as f64 / (n - 1) as f64)
    }

    fn leg(kind: OptionKind, strike: f64, quantity: f64) -> HedgeLeg {
        HedgeLeg {
            kind,
            strike,
            quantity,
        }
    }

    fn assert_legs(got: &[HedgeLeg], want: &[HedgeLeg]) {
        assert_eq!(got.len(), want.len(), "{got:?}");
        for (g, w) in got.iter().zip(want) {
            assert_eq!(g.kind, w.kind);
            assert!((g.strike - w.strike).abs() < 1e-12);
            assert!((g.quantity - w.quantity).abs() < 1e-15);
        }
    }

    #[test]
    fn named_product_legs() {
        let m = mkt();
        let b = build_hedge(&EpsSpec::buffer(-0.05, 0.05, 0.8, 0.5).unwrap(), &m).unwrap();
        assert_legs(
            &b.legs,
            &[
                leg(OptionKind::Put, 95.0, 0.008),
                leg(OptionKind::Call, 105.0, -0.005),
            ],
        );
        let f = build_hedge(&EpsSpec::floor(-0.10, 0.8, 0.10, 0.5).unwrap(), &m).unwrap();
        assert_legs(
            &f.legs,
            &[
                leg(OptionKind::Put, 100.0, 0.008),
                leg(OptionKind::Put, 90.0, -0.008),
                leg(OptionKind::Call, 110.0, -0.005),
            ],
        );
        let fc = build_hedge(&EpsSpec::floor_cap(-0.10, 0.10, 0.8, 0.5).unwrap(), &m).unwrap();
        assert_legs(
            &fc.legs,
            &[
                leg(OptionKind::Put, 100.0, 0.008),
                leg(OptionKind::Put, 90.0, -0.008),
                leg(OptionKind::Call, 100.0, -0.005),
                leg(OptionKind::Call, 110.0, 0.005),
            ],
        );
        let empty = EpsSpec::buffer(-0.05, 0.05, 0.0, 0.0).unwrap();
        let e = build_hedge(&empty, &m).unwrap();
        assert!(e.is_empty());
        assert_eq!(hedge_cost(&e, &m, None, &Engine::vanilla()).unwrap(), 0.0);
    }

    #[test]
    fn payoff_examples() {
        let m = mkt();
        let b = build_hedge(&EpsSpec::buffer(-0.05, 0.05, 0.8, 0.5).unwrap(), &m).unwrap();
        assert_eq!(hedge_payoff(&b, 0.0), 0.0);
        assert!((hedge_payoff(&b, -0.20) - 0.12).abs() < 1e-12);
        let f = build_hedge(&EpsSpec::floor(-0.10, 0.8, 0.10, 0.5).unwrap(), &m).unwrap();
        assert!((hedge_payoff(&f, 0.25) + 0.075).abs() < 1e-12);
    }

    #[test]
    fn vanilla_costs() {
        let m = mkt();
        let b = build_hedge(&EpsSpec::buffer(-0.05, 0.05, 0.8, 0.5).unwrap(), &m).unwrap();
        let h = hedge_cost(&b, &m, None, &Engine::vanilla()).unwrap();
        assert!((h - 0.0069).abs() < 5e-4, "{h}");
        let f = build_hedge(&EpsSpec::floor(-0.05, 0.8, 0.05, 0.5).unwrap(), &m).unwrap();
        let h = hedge_cost(&f, &m, None, &Engine::vanilla()).unwrap();
        assert!((h + 0.0144).abs() < 5e-4, "{h}");
    }

    #[test]
    fn counterparty_discounted_cost() {
        let m = mkt();
        let jp = JumpParams::new(0.2, -0.2, 0.1).unwrap();
        let b = build_hedge(&EpsSpec::buffer(-0.05, 0.10, 0.8, 0.5).unwrap(), &m).unwrap();
        let engine = Engine::at_most_one_jump().with_credit(CreditTreatment::PutCounterparty {
            gamma_counterparty: 0.3,
            gamma_provider: 0.0,
        });
        let h = hedge_cost(&b, &m, Some(&jp), &engine).unwrap();
        assert!((h - 0.0041).abs() < 5e-4, "{h}");
    }

    #[test]
    fn all_legs_discount_scales_cost() {
        let m = mkt();
        let f = build_hedge(&EpsSpec::floor(-0.05, 0.8, 0.05, 0.5).unwrap(), &m).unwrap();
        let van = hedge_cost(&f, &m, None, &Engine::vanilla()).unwrap();
        let rt = hedge_cost(&f, &m, None, &Engine::vanilla_with_default(0.3)).unwrap();
        assert!((rt - libm::exp(-0.3) * van).abs() < 1e-15);
    }

    #[test]
    fn jump_engine_needs_params() {
        let m = mkt();
        let b = build_hedge(&EpsSpec::buffer(-0.05, 0.05, 0.8, 0.5).unwrap(), &m).unwrap();
        assert!(matches!(
            hedge_cost(&b, &m, None, &Engine::merton()),
            Err(EpsError::Config(_))
        ));
    }

    #[test]
    fn cash_flows() {
        let m = mkt();
        let spec = EpsSpec::buffer(-0.05, 0.05, 0.8, 0.5).unwrap();
        let port = build_hedge(&spec, &m).unwrap();
        let h0 = hedge_cost(&port, &m, None, &Engine::vanilla()).unwrap();
        let max = grid(10_000)
            .map(|r| hedged_cash_flow(&spec, &port, &m, h0, h0, r).unwrap().abs())
            .fold(0.0, f64::max);
        assert!(max < 1e-12);
        let surplus = hedged_cash_flow(&spec, &port, &m, h0, h0 + 0.01, 0.37).unwrap();
        assert!((surplus - 0.01 * libm::exp(0.015)).abs() < 1e-12);

        assert!((defaulted_cash_flow(&spec, &m, h0, h0, -0.30).unwrap() + 0.20).abs() < 1e-12);
        assert_eq!(defaulted_cash_flow(&spec, &m, h0, h0, 0.5).unwrap(), 0.0);
        assert_eq!(defaulted_cash_flow(&spec, &m, h0, h0, -0.05).unwrap(), 0.0);

        let floor = EpsSpec::floor(-0.10, 0.8, 0.10, 0.5).unwrap();
        let near_wipeout = defaulted_cash_flow(&floor, &m, 0.0, 0.0, -1.0 + 1e-12).unwrap();
        assert!((near_wipeout + 0.8).abs() < 1e-9);

        let none = EpsSpec::buffer(-0.05, 0.05, 0.0, 0.5).unwrap();
        let cf = defaulted_cash_flow(&none, &m, 0.01, 0.02, -0.5).unwrap();
        assert!((cf - 0.01 * libm::exp(0.015)).abs() < 1e-15);

        let scaled = spec.clone().with_nominal(1000.0).unwrap();
        let cf = defaulted_cash_flow(&scaled, &m, h0, h0, -0.30).unwrap();
        assert!((cf + 200.0).abs() < 1e-9);
    }

    /// For the named products the stated defaulted cash flow equals the
    /// premium carry plus the hedge without its long puts plus `ψ`.
    #[test]
    fn defaulted_cash_flow_matches_surviving_legs() {
        let m = mkt();
        for spec in [
            EpsSpec::buffer(-0.05, 0.10, 0.8, 0.5).unwrap(),
            EpsSpec::floor(-0.15, 0.8, 0.10, 0.5).unwrap(),
            EpsSpec::floor_cap(-0.15, 0.10, 0.8, 0.5).unwrap(),
        ] {
            let port = build_hedge(&spec, &m).unwrap();
            let surviving = HedgePortfolio {
                spot: port.spot,
                legs: port
                    .legs
                    .iter()
                    .filter(|l| !(l.kind == OptionKind::Put && l.quantity > 0.0))
                    .copied()
                    .collect(),
            };
            for r in grid(2_000) {
                let direct = surviving.payoff(r) + spec.psi(r);
                let stated = defaulted_cash_flow(&spec, &m, 0.0, 0.0, r).unwrap();
                assert!((direct - stated).abs() < 1e-12, "{r}: {direct} vs {stated}");
            }
        }
    }

    #[test]
    fn first_protection_levels() {
        let b = EpsSpec::buffer(-0.05, 0.05, 0.8, 0.5).unwrap();
        assert_eq!(first_protection_level(&b).unwrap(), (-0.05, 0.8));
        let f = EpsSpec::floor(-0.10, 0.8, 0.10, 0.5).unwrap();
        assert_eq!(first_protection_level(&f).unwrap(), (0.0, 0.8));
        let fc = EpsSpec::floor_cap(-0.10, 0.10, 0.8, 0.5).unwrap();
        assert_eq!(first_protection_level(&fc).unwrap(), (0.0, 0.8));
        let none = EpsSpec::buffer(-0.05, 0.05, 0.0, 0.5).unwrap();
        assert!(matches!(
            first_protection_level(&none),
            Err(EpsError::NotApplicable(_))
        ));
    }

    fn table4_buffer() -> (EpsSpec, JumpParams) {
        (
            EpsSpec::buffer(-0.05, 0.10, 0.8, 0.5).unwrap(),
            JumpParams::new(0.1, -0.2, 0.1).unwrap(),
        )
    }

    #[test]
    fn default_adjustment_table_row() {
        let m = mkt();
        let (spec, jp) = table4_buffer();
        let da = |model| default_adjustment(&spec, &m, Some(&jp), 0.05, model).unwrap();
        assert!((da(Some(JumpModel::ExactlyOne)) - 0.0216).abs() < 1e-3);
        assert!((da(Some(JumpModel::Full)) - 0.0131).abs() < 1e-3);
        assert!((da(Some(JumpModel::AtMostOne)) - 0.0130).abs() < 1e-3);
        assert_eq!(
            default_adjustment(&spec, &m, Some(&jp), 0.0, Some(JumpModel::Full)).unwrap(),
            0.0
        );
        let none = EpsSpec::buffer(-0.05, 0.05, 0.0, 0.5).unwrap();
        assert_eq!(default_adjustment(&none, &m, None, 0.1, None).unwrap(), 0.0);
    }

    #[test]
    fn default_adjustment_black_scholes_form() {
        let m = mkt();
        let (spec, _) = table4_buffer();
        let da = default_adjustment(&spec, &m, None, 0.05, None).unwrap();
        let d = (libm::log(0.95) - (0.015 + 0.02)) / 0.2;
        let want = (1.0 - libm::exp(-0.05)) * 0.8 * libm::exp(0.015) * norm_cdf(d);
        assert!((da - want).abs() < 1e-15);
        // Zero intensity makes the jump series collapse to this form.
        let jp = JumpParams::new(0.0, -0.2, 0.1).unwrap();
        for model in [JumpModel::Full, JumpModel::AtMostOne] {
            let v = default_adjustment(&spec, &m, Some(&jp), 0.05, Some(model)).unwrap();
            assert!((v - da).abs() < 1e-15);
        }
    }

    #[test]
    fn premium_report_table_row() {
        let m = mkt();
        let (spec, jp) = table4_buffer();
        let rep = premium_report(&spec, &m, Some(&jp), 0.05, Some(JumpModel::ExactlyOne)).unwrap();
        assert!(
            (rep.default_adjusted_premium - 0.1198).abs() < 5e-3,
            "{rep:?}"
        );
        let sd = rep.hedge_cost_credit + libm::exp(-0.015) * 0.8 * 0.95 * (1.0 - libm::exp(-0.05));
        assert!((rep.super_hedging_premium - sd).abs() < 1e-15);
        assert!(rep.super_hedging_premium >= rep.default_adjusted_premium);
        assert!(rep.default_adjusted_premium >= rep.hedge_cost_credit);

        let rep0 = premium_report(&spec, &m, Some(&jp), 0.0, Some(JumpModel::AtMostOne)).unwrap();
        assert_eq!(rep0.default_adjusted_premium, rep0.fair_premium);
        assert_eq!(rep0.super_hedging_premium, rep0.hedge_cost);

        let none = EpsSpec::buffer(-0.05, 0.05, 0.0, 0.5).unwrap();
        assert!(matches!(
            premium_report(&none, &m, None, 0.1, None),
            Err(EpsError::NotApplicable(_))
        ));
    }

    #[test]
    fn hedge_cost_moves_with_intensities() {
        let m = mkt();
        let jp = JumpParams::new(0.2, -0.2, 0.1).unwrap();
        for spec in [
            EpsSpec::floor(-0.05, 0.8, 0.05, 0.5).unwrap(),
            EpsSpec::floor_cap(-0.05, 0.05, 0.8, 0.5).unwrap(),
        ] {
            let port = build_hedge(&spec, &m).unwrap();
            let cost = |gc, gp| {
                let e = Engine::at_most_one_jump().with_credit(CreditTreatment::PutCounterparty {
                    gamma_counterparty: gc,
                    gamma_provider: gp,
                });
                hedge_cost(&port, &m, Some(&jp), &e).unwrap()
            };
            assert!(cost(0.1, 0.0) < cost(0.0, 0.0));
            assert!(cost(0.3, 0.0) < cost(0.1, 0.0));
            assert!(cost(0.0, 0.1) > cost(0.0, 0.05));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn replication(spec in arb_spec(), spot in 1.0f64..1000.0) {
            let m = MarketParams::new(spot, 0.015, 0.2, 1.0).unwrap();
            let port = build_hedge(&spec, &m).unwrap();
            let h0 = hedge_cost(&port, &m, None, &Engine::vanilla()).unwrap();
            for r in grid(10_000) {
                prop_assert!((port.payoff(r) + spec.psi(r)).abs() < 1e-12);
                prop_assert!(hedged_cash_flow(&spec, &port, &m, h0, h0, r).unwrap().abs() < 1e-12);
            }
        }

        #[test]
        fn defaulted_loss_bounded(spec in arb_spec()) {
            prop_assume!(spec.has_protection());
            let m = mkt();
            let (l_hat, p_hat) = first_protection_level(&spec).unwrap();
            for r in grid(2_000) {
                let cf = defaulted_cash_flow(&spec, &m, 0.0, 0.0, r).unwrap();
                prop_assert!(cf <= 0.0 && cf >= -p_hat * (1.0 + l_hat) - 1e-15);
            }
        }

        #[test]
        fn default_adjustment_increasing(
            gamma in 0.0f64..1.0,
            dg in 0.001f64..0.5,
            lambda in 0.0f64..0.5,
            mode in prop::sample::select(alloc::vec![None, Some(JumpModel::Full), Some(JumpModel::ExactlyOne), Some(JumpModel::AtMostOne)]),
        ) {
            let m = mkt();
            let (spec, _) = table4_buffer();
            let jp = JumpParams::new(lambda, -0.2, 0.1).unwrap().with_mode(CompensatorMode::Exact);
            let a = default_adjustment(&spec, &m, Some(&jp), gamma, mode).unwrap();
            let b = default_adjustment(&spec, &m, Some(&jp), gamma + dg, mode).unwrap();
            prop_assert!(b > a);
        }
    }
}
