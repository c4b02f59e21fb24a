//! Merton jump-diffusion with normal log-jumps `Y ~ N(α, δ²)`.
//!
//! Prices are Poisson mixtures of Black-Scholes kernels with per-count
//! drift `r_n` and volatility `σ_n`:
//!
//! ```text
//! σ_n² T = σ² T + n δ²
//! r_n T  = (r + μ_J) T + n (α + δ²/2)
//! ```
//!
//! The mixture weights and prefactors always use `λ' = λ e^{α+δ²/2}` and
//! `ζ = e^{α+δ²/2} - 1`; [`CompensatorMode`] only decides which `μ_J`
//! enters `r_n`.

use num_complex::Complex64;

use crate::bs::bs_kernel_checked;
use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, EpsError, Result};
use crate::market::{MarketParams, OptionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CompensatorMode {
    /// `μ_J = -λ(e^{α+δ²/2} - 1)`: discounted stock is a martingale.
    #[default]
    Exact,
    /// `μ_J = -λα`, the first-order approximation.
    Linearized,
}

impl CompensatorMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CompensatorMode::Exact => "exact",
            CompensatorMode::Linearized => "linearized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JumpParams {
    /// Jump intensity per year.
    pub lambda: f64,
    /// Mean log-jump.
    pub alpha: f64,
    /// Log-jump standard deviation.
    pub delta: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub compensator_mode: CompensatorMode,
    /// Highest jump count kept in the series.
    #[cfg_attr(feature = "serde", serde(default = "default_n_max"))]
    pub n_max: usize,
    /// Weight below which the series stops once past its mode.
    #[cfg_attr(feature = "serde", serde(default = "default_tail_tol"))]
    pub tail_tol: f64,
}

#[cfg(feature = "serde")]
fn default_n_max() -> usize {
    JumpParams::DEFAULT_N_MAX
}

#[cfg(feature = "serde")]
fn default_tail_tol() -> f64 {
    JumpParams::DEFAULT_TAIL_TOL
}

impl JumpParams {
    pub const DEFAULT_N_MAX: usize = 20;
    pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

    pub fn new(lambda: f64, alpha: f64, delta: f64) -> Result<Self> {
        let jp = Self {
            lambda,
            alpha,
            delta,
            compensator_mode: CompensatorMode::Exact,
            n_max: Self::DEFAULT_N_MAX,
            tail_tol: Self::DEFAULT_TAIL_TOL,
        };
        jp.validate()?;
        Ok(jp)
    }

    pub fn with_mode(mut self, mode: CompensatorMode) -> Self {
        self.compensator_mode = mode;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("lambda", self.lambda)?;
        ensure_finite("alpha", self.alpha)?;
        ensure_non_negative("delta", self.delta)?;
        ensure_positive("tail_tol", self.tail_tol)
    }

    /// `α + δ²/2`, the log of the mean jump factor.
    #[inline]
    pub fn log_mean_jump(&self) -> f64 {
        self.alpha + 0.5 * self.delta * self.delta
    }

    pub fn derived(&self) -> JumpDerived {
        let kappa = self.log_mean_jump();
        JumpDerived {
            mu_j: compensator(self),
            zeta: libm::expm1(kappa),
            lambda_prime: self.lambda * libm::exp(kappa),
            kappa,
        }
    }
}

/// Quantities derived once from [`JumpParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpDerived {
    /// Drift compensator `μ_J` under the configured mode.
    pub mu_j: f64,
    /// Mean relative jump `ζ = e^{α+δ²/2} - 1`.
    pub zeta: f64,
    /// `λ' = λ e^{α+δ²/2}`.
    pub lambda_prime: f64,
    /// `α + δ²/2`.
    pub kappa: f64,
}

impl JumpDerived {
    /// Drift `r_n` conditional on `n` jumps.
    pub fn rate_n(&self, mkt: &MarketParams, n: usize) -> f64 {
        mkt.rate + self.mu_j + n as f64 * self.kappa / mkt.maturity
    }

    /// Volatility `σ_n` conditional on `n` jumps.
    pub fn vol_n(&self, mkt: &MarketParams, jp: &JumpParams, n: usize) -> f64 {
        libm::sqrt(mkt.volatility * mkt.volatility + n as f64 * jp.delta * jp.delta / mkt.maturity)
    }
}

/// Which conditioning of the jump count a price refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum JumpModel {
    /// Unconditional Merton series.
    Full,
    ExactlyOne,
    AtMostOne,
}

impl JumpModel {
    pub fn as_str(self) -> &'static str {
        match self {
            JumpModel::Full => "full",
            JumpModel::ExactlyOne => "exactly_one",
            JumpModel::AtMostOne => "at_most_one",
        }
    }

    pub fn price(
        self,
        mkt: &MarketParams,
        jp: &JumpParams,
        strike: f64,
        kind: OptionKind,
    ) -> Result<f64> {
        match self {
            JumpModel::Full => merton_price(mkt, jp, strike, kind),
            JumpModel::ExactlyOne => exactly_one_jump_price(mkt, jp, strike, kind),
            JumpModel::AtMostOne => at_most_one_jump_price(mkt, jp, strike, kind),
        }
    }
}

/// `μ_J` under the configured [`CompensatorMode`].
pub fn compensator(jp: &JumpParams) -> f64 {
    match jp.compensator_mode {
        CompensatorMode::Exact => -jp.lambda * libm::expm1(jp.log_mean_jump()),
        CompensatorMode::Linearized => -jp.lambda * jp.alpha,
    }
}

fn check(mkt: &MarketParams, jp: &JumpParams, strike: f64) -> Result<JumpDerived> {
    mkt.validate()?;
    jp.validate()?;
    ensure_positive("strike", strike)?;
    Ok(jp.derived())
}

/// Black-Scholes kernel at `(r_n, σ_n)`.
fn kernel_n(
    mkt: &MarketParams,
    jp: &JumpParams,
    d: &JumpDerived,
    strike: f64,
    n: usize,
    kind: OptionKind,
    context: &'static str,
) -> Result<f64> {
    let v = bs_kernel_checked(
        mkt.spot,
        strike,
        d.rate_n(mkt, n),
        d.vol_n(mkt, jp, n),
        mkt.maturity,
        kind,
    )
    .map_err(|_| EpsError::Numerical { context, n })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EpsError::Numerical { context, n })
    }
}

/// Iterates `(n, e^{-x} x^n / n!)` for `n = 0..=n_max`, stopping early
/// once past the mode with weight under `tail_tol`.
pub(crate) fn poisson_weights(
    x: f64,
    n_max: usize,
    tail_tol: f64,
) -> impl Iterator<Item = (usize, f64)> {
    let mut w = libm::exp(-x);
    (0..=n_max)
        .map(move |n| {
            if n > 0 {
                w *= x / n as f64;
            }
            (n, w)
        })
        .take_while(move |&(n, w)| !(n as f64 > x && w < tail_tol))
}

/// Full Merton series `Σ_n Poisson(λ'T)_n · BS(r_n, σ_n)`.
pub fn merton_price(
    mkt: &MarketParams,
    jp: &JumpParams,
    strike: f64,
    kind: OptionKind,
) -> Result<f64> {
    let d = check(mkt, jp, strike)?;
    let mut acc = 0.0;
    let mut last = (0, 0.0);
    for (n, w) in poisson_weights(d.lambda_prime * mkt.maturity, jp.n_max, jp.tail_tol) {
        acc += w * kernel_n(mkt, jp, &d, strike, n, kind, "merton_price")?;
        last = (n, w);
    }
    // Cut off by `n_max` while terms still mattered.
    if last.0 == jp.n_max && last.1 >= jp.tail_tol {
        return Err(EpsError::Numerical {
            context: "merton_price series truncated",
            n: jp.n_max,
        });
    }
    Ok(acc)
}

/// Price conditional on exactly `n` jumps: the `n`-th series term divided
/// by its Poisson(λT) probability, `e^{-λζT} e^{n(α+δ²/2)} BS(r_n, σ_n)`.
pub fn conditional_n_price(
    mkt: &MarketParams,
    jp: &JumpParams,
    strike: f64,
    n: usize,
    kind: OptionKind,
) -> Result<f64> {
    let d = check(mkt, jp, strike)?;
    let scale = libm::exp(-jp.lambda * d.zeta * mkt.maturity + n as f64 * d.kappa);
    Ok(scale * kernel_n(mkt, jp, &d, strike, n, kind, "conditional_n_price")?)
}

/// `e^{-λT(e^{α+δ²/2}-1)} e^{α+δ²/2} BS(r_1, σ_1)`.
pub fn exactly_one_jump_price(
    mkt: &MarketParams,
    jp: &JumpParams,
    strike: f64,
    kind: OptionKind,
) -> Result<f64> {
    let d = check(mkt, jp, strike)?;
    let pre = libm::exp(-mkt.maturity * jp.lambda * d.zeta) * libm::exp(d.kappa);
    Ok(pre * kernel_n(mkt, jp, &d, strike, 1, kind, "exactly_one_jump_price")?)
}

/// Two-term mixture renormalised by `P(N_T ≤ 1) = e^{-λT}(1 + λT)`.
pub fn at_most_one_jump_price(
    mkt: &MarketParams,
    jp: &JumpParams,
    strike: f64,
    kind: OptionKind,
) -> Result<f64> {
    let d = check(mkt, jp, strike)?;
    let t = mkt.maturity;
    let norm = libm::exp(-jp.lambda * t) * (1.0 + jp.lambda * t);
    let w0 = libm::exp(-d.lambda_prime * t) / norm;
    let w1 = libm::exp(-d.lambda_prime * t) * d.lambda_prime * t / norm;
    let k0 = kernel_n(mkt, jp, &d, strike, 0, kind, "at_most_one_jump_price")?;
    let k1 = kernel_n(mkt, jp, &d, strike, 1, kind, "at_most_one_jump_price")?;
    Ok(w0 * k0 + w1 * k1)
}

/// Risk-neutral `E[S_T]` implied by a model's jump-count law:
/// `S_0 e^{(r+μ_J)T}` times the mean of `e^{N(α+δ²/2)}`.
pub fn terminal_mean(mkt: &MarketParams, jp: &JumpParams, model: JumpModel) -> Result<f64> {
    mkt.validate()?;
    jp.validate()?;
    let d = jp.derived();
    let lt = jp.lambda * mkt.maturity;
    let jump_factor = match model {
        JumpModel::Full => libm::exp(lt * d.zeta),
        JumpModel::ExactlyOne => libm::exp(d.kappa),
        JumpModel::AtMostOne => (1.0 + lt * libm::exp(d.kappa)) / (1.0 + lt),
    };
    Ok(mkt.spot * libm::exp((mkt.rate + d.mu_j) * mkt.maturity) * jump_factor)
}

/// `C - P - e^{-rT}(E[S_T | model] - K)` with the model's own terminal
/// mean from [`terminal_mean`].
pub fn parity_gap(
    mkt: &MarketParams,
    jp: &JumpParams,
    model: JumpModel,
    strike: f64,
) -> Result<f64> {
    check(mkt, jp, strike)?;
    let mean = terminal_mean(mkt, jp, model)?;
    let call = model.price(mkt, jp, strike, OptionKind::Call)?;
    let put = model.price(mkt, jp, strike, OptionKind::Put)?;
    Ok(call - put - mkt.discount() * (mean - strike))
}

/// Characteristic function of `x_T = ln(S_T / (S_0 e^{rT}))`.
pub fn characteristic_function(mkt: &MarketParams, jp: &JumpParams, u: f64) -> Complex64 {
    let t = mkt.maturity;
    let s2 = mkt.volatility * mkt.volatility;
    let i = Complex64::i();
    let jump = (i * u * jp.alpha - 0.5 * u * u * jp.delta * jp.delta).exp() - 1.0;
    let exponent =
        i * u * (compensator(jp) - 0.5 * s2) * t - 0.5 * u * u * s2 * t + jump * (jp.lambda * t);
    exponent.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bs::{bs_call, bs_put};
    use proptest::prelude::*;

    fn mkt() -> MarketParams {
        MarketParams::new(100.0, 0.015, 0.2, 1.0).unwrap()
    }

    fn row1(mode: CompensatorMode) -> JumpParams {
        JumpParams::new(0.1, -0.2, 0.1).unwrap().with_mode(mode)
    }

    #[test]
    fn compensator_values() {
        assert_eq!(compensator(&JumpParams::new(0.0, -0.2, 0.1).unwrap()), 0.0);
        let approx = compensator(&row1(CompensatorMode::Linearized));
        assert!((approx - 0.02).abs() < 1e-15);
        // -0.1 * (e^{-0.195} - 1) by hand: e^{-0.195} = 0.822835...
        let exact = compensator(&row1(CompensatorMode::Exact));
        assert!((exact - 0.017_716_4).abs() < 1e-6);
    }

    #[test]
    fn zero_intensity_collapses_to_black_scholes() {
        let m = mkt();
        let jp = JumpParams::new(0.0, -0.3, 0.2).unwrap();
        for k in [60.0, 95.0, 100.0, 130.0] {
            let c = bs_call(&m, k).unwrap();
            let p = bs_put(&m, k).unwrap();
            for model in [JumpModel::Full, JumpModel::AtMostOne] {
                assert!((model.price(&m, &jp, k, OptionKind::Call).unwrap() - c).abs() < 1e-10);
                assert!((model.price(&m, &jp, k, OptionKind::Put).unwrap() - p).abs() < 1e-10);
            }
            assert!(
                (conditional_n_price(&m, &jp, k, 0, OptionKind::Call).unwrap() - c).abs() < 1e-10
            );
            assert!(parity_gap(&m, &jp, JumpModel::Full, k).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn zero_jump_law_exactly_one_is_black_scholes() {
        let m = mkt();
        let jp = JumpParams::new(0.4, 0.0, 0.0).unwrap();
        for mode in [CompensatorMode::Exact, CompensatorMode::Linearized] {
            let jp = jp.with_mode(mode);
            let v = exactly_one_jump_price(&m, &jp, 100.0, OptionKind::Call).unwrap();
            assert!((v - bs_call(&m, 100.0).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn conditional_zero_is_drift_shifted_kernel() {
        let m = mkt();
        let jp = row1(CompensatorMode::Exact);
        let mu = compensator(&jp);
        let shifted = MarketParams::new(100.0, 0.015 + mu, 0.2, 1.0).unwrap();
        let want = libm::exp(mu) * bs_call(&shifted, 100.0).unwrap();
        let got = conditional_n_price(&m, &jp, 100.0, 0, OptionKind::Call).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn exactly_one_matches_conditional_one() {
        let m = mkt();
        for mode in [CompensatorMode::Exact, CompensatorMode::Linearized] {
            let jp = row1(mode);
            for kind in [OptionKind::Call, OptionKind::Put] {
                let a = exactly_one_jump_price(&m, &jp, 100.0, kind).unwrap();
                let b = conditional_n_price(&m, &jp, 100.0, 1, kind).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn at_most_one_is_conditional_mixture() {
        let m = mkt();
        for mode in [CompensatorMode::Exact, CompensatorMode::Linearized] {
            let jp = JumpParams::new(0.3, -0.4, 0.15).unwrap().with_mode(mode);
            let lt = 0.3;
            for kind in [OptionKind::Call, OptionKind::Put] {
                for k in [80.0, 100.0, 120.0] {
                    let c0 = conditional_n_price(&m, &jp, k, 0, kind).unwrap();
                    let c1 = conditional_n_price(&m, &jp, k, 1, kind).unwrap();
                    let mix = (c0 + lt * c1) / (1.0 + lt);
                    let v = at_most_one_jump_price(&m, &jp, k, kind).unwrap();
                    assert!((v - mix).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn table_row_one_at_most_one_under_approx_mode() {
        let jp = row1(CompensatorMode::Linearized);
        let c = at_most_one_jump_price(&mkt(), &jp, 100.0, OptionKind::Call).unwrap();
        let p = at_most_one_jump_price(&mkt(), &jp, 100.0, OptionKind::Put).unwrap();
        assert!((c - 9.2014).abs() < 5e-4, "{c}");
        assert!((p - 7.3399).abs() < 5e-4, "{p}");
    }

    #[test]
    fn full_model_exact_parity() {
        let m = mkt();
        let jp = JumpParams::new(0.5, -0.4, 0.15).unwrap();
        for k in [70.0, 100.0, 140.0] {
            assert!(parity_gap(&m, &jp, JumpModel::Full, k).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn truncated_series_is_a_numerical_error() {
        let m = mkt();
        let jp = JumpParams::new(8.0, -0.1, 0.1).unwrap().with_n_max(5);
        assert!(matches!(
            merton_price(&m, &jp, 100.0, OptionKind::Call),
            Err(EpsError::Numerical { n: 5, .. })
        ));
        let jp = jp.with_n_max(80);
        assert!(merton_price(&m, &jp, 100.0, OptionKind::Call).is_ok());
    }

    #[test]
    fn series_weights() {
        let x = 0.5 * libm::exp(-0.4 + 0.5 * 0.15 * 0.15);
        let ws: alloc::vec::Vec<_> = poisson_weights(x, 20, 1e-12).collect();
        assert!(ws.iter().all(|&(_, w)| w > 0.0));
        let total: f64 = ws.iter().map(|&(_, w)| w).sum();
        let tail = 1.0 - total;
        assert!((-1e-15..1e-12 * 20.0).contains(&tail));

        // Large means keep the early, tiny weights.
        let ws: alloc::vec::Vec<_> = poisson_weights(40.0, 200, 1e-12).collect();
        assert!(ws.len() > 41);
        assert!((ws.iter().map(|&(_, w)| w).sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn characteristic_function_properties() {
        let m = mkt();
        let jp = row1(CompensatorMode::Exact);
        let one = characteristic_function(&m, &jp, 0.0);
        assert!((one.re - 1.0).abs() < 1e-15 && one.im.abs() < 1e-15);
        for i in 0..=1000 {
            let u = -50.0 + 0.1 * i as f64;
            assert!(characteristic_function(&m, &jp, u).norm() <= 1.0 + 1e-15);
        }
        let none = JumpParams::new(0.0, -0.2, 0.1).unwrap();
        let u = 1.7;
        let gauss = Complex64::new(-0.5 * u * u * 0.04, -0.5 * 0.04 * u).exp();
        assert!((characteristic_function(&m, &none, u) - gauss).norm() < 1e-15);
    }

    #[test]
    fn negative_jumps_cheapen_calls_and_lift_puts() {
        let m = mkt();
        let jp = row1(CompensatorMode::Exact);
        for i in 0..41 {
            let k = 60.0 + 2.0 * i as f64;
            let c = exactly_one_jump_price(&m, &jp, k, OptionKind::Call).unwrap();
            let p = exactly_one_jump_price(&m, &jp, k, OptionKind::Put).unwrap();
            assert!(c <= bs_call(&m, k).unwrap());
            assert!(p >= bs_put(&m, k).unwrap());
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(JumpParams::new(-0.1, 0.0, 0.1).is_err());
        assert!(JumpParams::new(0.1, 0.0, -0.1).is_err());
        let jp = row1(CompensatorMode::Exact);
        assert!(merton_price(&mkt(), &jp, 0.0, OptionKind::Call).is_err());
    }

    proptest! {
        #[test]
        fn conditional_parity(
            lambda in 0.0f64..1.0,
            alpha in -0.5f64..0.3,
            delta in 0.0f64..0.4,
            strike in 50.0f64..150.0,
            rate in -0.02f64..0.08,
            vol in 0.05f64..0.6,
            t in 0.1f64..5.0,
        ) {
            let m = MarketParams::new(100.0, rate, vol, t).unwrap();
            let jp = JumpParams::new(lambda, alpha, delta).unwrap();
            let mu = compensator(&jp);
            for n in 0..=5usize {
                let c = conditional_n_price(&m, &jp, strike, n, OptionKind::Call).unwrap();
                let p = conditional_n_price(&m, &jp, strike, n, OptionKind::Put).unwrap();
                let fwd = libm::exp((rate + mu) * t + n as f64 * jp.log_mean_jump());
                let want = m.discount() * (100.0 * fwd - strike);
                prop_assert!((c - p - want).abs() < 1e-8, "n={} gap={}", n, c - p - want);
            }
        }
    }
}
