//! Seeded Monte Carlo oracle for terminal values, option prices, default
//! adjustments and after-hedge cash flows.
//!
//! Only the terminal value matters for every payoff here, so paths are
//! sampled exactly:
//!
//! ```text
//! S_T = S_0 exp((r + μ_J - σ²/2)T + σ√T Z + Σ_{i≤N} Y_i)
//! ```
//!
//! Paths are grouped in blocks of [`BLOCK_PATHS`]. Block `b` draws from a
//! ChaCha8 stream seeded with the master seed and stream id `b`, so blocks
//! can run in any order or in parallel. Block statistics are merged in
//! ascending block order, which keeps results bit-identical between the
//! sequential and parallel executors. Normals come from the inverse CDF,
//! one uniform per normal, and every path consumes the same leading
//! uniforms whatever the conditioning.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::default::default_probability;
use crate::error::{ensure_non_negative, EpsError, Result};
use crate::hedging::{
    defaulted_cash_flow, first_protection_level, hedged_cash_flow, HedgePortfolio,
};
use crate::jump::{compensator, JumpParams};
use crate::market::{MarketParams, OptionKind};
use crate::normal::std_normal_inv_cdf;
use crate::payoff::EpsSpec;

pub const BLOCK_PATHS: u64 = 1 << 16;
pub const MIN_PATHS: u64 = 1_000;

/// What the jump count is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Conditioning {
    /// `N ~ Poisson(λT)`.
    #[default]
    Unconditional,
    /// `N = n` exactly.
    ExactlyN(u32),
    /// `N ≤ 1`, i.e. `N = 1` with probability `λT / (1 + λT)`.
    AtMostOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub paths: u64,
    pub seed: u64,
    pub conditioning: Conditioning,
    /// Pair each path with its mirror (`Z → -Z`, jump noise negated,
    /// same jump count and default draw). A pair counts as one sample.
    pub antithetic: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            paths: 1_000_000,
            seed: 0,
            conditioning: Conditioning::Unconditional,
            antithetic: false,
        }
    }
}

impl SimConfig {
    pub fn new(paths: u64, seed: u64) -> Self {
        Self {
            paths,
            seed,
            ..Self::default()
        }
    }

    pub fn conditioned(mut self, conditioning: Conditioning) -> Self {
        self.conditioning = conditioning;
        self
    }

    pub fn antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths < MIN_PATHS {
            return Err(EpsError::Config(alloc::format!(
                "at least {MIN_PATHS} paths required, got {}",
                self.paths
            )));
        }
        if self.antithetic && self.paths % 2 == 1 {
            return Err(EpsError::Config(alloc::format!(
                "antithetic sampling needs an even path count, got {}",
                self.paths
            )));
        }
        Ok(())
    }

    pub fn block_count(&self) -> u64 {
        self.paths.div_ceil(BLOCK_PATHS)
    }
}

/// One simulated terminal state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathDraw {
    pub terminal: f64,
    pub jumps: u32,
    /// Whether the default indicator `1{τ ≤ T}` fired.
    pub defaulted: bool,
}

/// Running mean and centred second moment.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn from_slice(xs: &[f64]) -> Self {
        let mut m = Self::default();
        for &x in xs {
            m.push(x);
        }
        m
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        let w = other.count as f64 / n;
        self.mean += d * w;
        self.m2 += other.m2 + d * d * self.count as f64 * w;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            libm::sqrt(self.variance() / self.count as f64)
        }
    }
}

/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    /// Independent samples (pairs when antithetic).
    pub samples: u64,
    pub paths: u64,
    pub seed: u64,
}

impl Estimate {
    /// `(mean - reference) / std_error`; zero when both coincide exactly.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean - reference;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }

    pub fn within(&self, reference: f64, sigmas: f64) -> bool {
        self.z_score(reference).abs() < sigmas
    }
}

/// Runs blocks and returns their sample vectors in block order.
pub trait BlockExecutor {
    fn map_blocks(&self, count: u64, block: &(dyn Fn(u64) -> Vec<f64> + Sync)) -> Vec<Vec<f64>>;
}

/// Runs blocks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl BlockExecutor for Sequential {
    fn map_blocks(&self, count: u64, block: &(dyn Fn(u64) -> Vec<f64> + Sync)) -> Vec<Vec<f64>> {
        (0..count).map(block).collect()
    }
}

/// Pre-computed sampling constants for one parameter set.
#[derive(Debug, Clone, Copy)]
pub struct Simulator {
    cfg: SimConfig,
    spot: f64,
    drift: f64,
    diffusion: f64,
    lambda_t: f64,
    alpha: f64,
    delta: f64,
    default_prob: f64,
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn poisson_inverse(u: f64, mean: f64) -> u32 {
    let mut k = 0u32;
    let mut p = libm::exp(-mean);
    let mut cdf = p;
    while u > cdf && k < 100_000 {
        k += 1;
        p *= mean / k as f64;
        if p == 0.0 && k as f64 > mean {
            break;
        }
        cdf += p;
    }
    k
}

impl Simulator {
    /// `jp = None` simulates pure Black-Scholes; `default_intensity` sets
    /// the probability `1 - e^{-γT}` of the default indicator.
    pub fn new(
        mkt: &MarketParams,
        jp: Option<&JumpParams>,
        default_intensity: f64,
        cfg: SimConfig,
    ) -> Result<Self> {
        mkt.validate()?;
        cfg.validate()?;
        ensure_non_negative("default intensity", default_intensity)?;
        let (mu_j, lambda, alpha, delta) = match jp {
            Some(jp) => {
                jp.validate()?;
                (compensator(jp), jp.lambda, jp.alpha, jp.delta)
            }
            None => {
                if let Conditioning::ExactlyN(n) = cfg.conditioning {
                    if n > 0 {
                        return Err(EpsError::Config(alloc::string::String::from(
                            "conditioning on jumps needs jump parameters",
                        )));
                    }
                }
                (0.0, 0.0, 0.0, 0.0)
            }
        };
        let t = mkt.maturity;
        let s2 = mkt.volatility * mkt.volatility;
        Ok(Self {
            cfg,
            spot: mkt.spot,
            drift: (mkt.rate + mu_j - 0.5 * s2) * t,
            diffusion: mkt.volatility * libm::sqrt(t),
            lambda_t: lambda * t,
            alpha,
            delta,
            default_prob: default_probability(default_intensity, t)?,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    /// Sample values of block `block`, one per path or per antithetic pair.
    pub fn block_samples<F: Fn(&PathDraw) -> f64>(&self, block: u64, f: &F) -> Vec<f64> {
        let start = block * BLOCK_PATHS;
        let end = (start + BLOCK_PATHS).min(self.cfg.paths);
        let paths = end.saturating_sub(start);
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(block);

        let per_sample = if self.cfg.antithetic { 2 } else { 1 };
        let mut out = Vec::with_capacity((paths / per_sample) as usize);
        for _ in 0..paths / per_sample {
            let z = std_normal_inv_cdf(uniform(&mut rng));
            let u_n = uniform(&mut rng);
            let defaulted = uniform(&mut rng) < self.default_prob;
            let jumps = match self.cfg.conditioning {
                Conditioning::Unconditional => poisson_inverse(u_n, self.lambda_t),
                Conditioning::ExactlyN(n) => n,
                Conditioning::AtMostOne => u32::from(u_n * (1.0 + self.lambda_t) > 1.0),
            };
            let mut noise = 0.0;
            for _ in 0..jumps {
                noise += std_normal_inv_cdf(uniform(&mut rng));
            }
            let mean_jump = jumps as f64 * self.alpha;
            let shock = self.diffusion * z + self.delta * noise;
            let draw = |sign: f64| PathDraw {
                terminal: self.spot * libm::exp(self.drift + mean_jump + sign * shock),
                jumps,
                defaulted,
            };
            if self.cfg.antithetic {
                out.push(0.5 * (f(&draw(1.0)) + f(&draw(-1.0))));
            } else {
                out.push(f(&draw(1.0)));
            }
        }
        out
    }

    /// Sample vectors of all blocks, in block order.
    pub fn samples<F, E>(&self, f: &F, exec: &E) -> Vec<Vec<f64>>
    where
        F: Fn(&PathDraw) -> f64 + Sync,
        E: BlockExecutor + ?Sized,
    {
        exec.map_blocks(self.cfg.block_count(), &|b| self.block_samples(b, f))
    }

    pub fn estimate<F, E>(&self, f: &F, exec: &E) -> Estimate
    where
        F: Fn(&PathDraw) -> f64 + Sync,
        E: BlockExecutor + ?Sized,
    {
        self.summarize(&self.samples(f, exec))
    }

    fn summarize(&self, blocks: &[Vec<f64>]) -> Estimate {
        let mut total = Moments::default();
        for b in blocks {
            total.merge(&Moments::from_slice(b));
        }
        Estimate {
            mean: total.mean,
            std_error: total.std_error(),
            samples: total.count,
            paths: self.cfg.paths,
            seed: self.cfg.seed,
        }
    }
}

/// Simulated terminal values with the estimate of their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalSample {
    /// `S_T` per sample (pair mean when antithetic).
    pub values: Vec<f64>,
    /// Estimate of `E[S_T]` (undiscounted).
    pub mean: Estimate,
}

pub fn simulate_terminal<E: BlockExecutor + ?Sized>(
    mkt: &MarketParams,
    jp: Option<&JumpParams>,
    cfg: SimConfig,
    exec: &E,
) -> Result<TerminalSample> {
    let sim = Simulator::new(mkt, jp, 0.0, cfg)?;
    let blocks = sim.samples(&|d: &PathDraw| d.terminal, exec);
    let mean = sim.summarize(&blocks);
    Ok(TerminalSample {
        values: blocks.concat(),
        mean,
    })
}

/// `e^{-rT} E[payoff(S_T)]`.
pub fn mc_option_price<E: BlockExecutor + ?Sized>(
    mkt: &MarketParams,
    jp: Option<&JumpParams>,
    cfg: SimConfig,
    strike: f64,
    kind: OptionKind,
    exec: &E,
) -> Result<Estimate> {
    crate::error::ensure_positive("strike", strike)?;
    let sim = Simulator::new(mkt, jp, 0.0, cfg)?;
    let df = mkt.discount();
    Ok(sim.estimate(&|d: &PathDraw| df * kind.payoff(strike, d.terminal), exec))
}

/// Both default-adjustment estimands, on the same draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefaultAdjustmentEstimate {
    /// `p̂ E[D (S_T/S_0) 1{R_T ≤ l̂}]`, the closed form's estimand.
    pub partial_expectation: Estimate,
    /// `p̂ E[D (l̂ - R_T)^+]`, the expected after-default shortfall.
    pub shortfall: Estimate,
}

pub fn mc_default_adjustment<E: BlockExecutor + ?Sized>(
    mkt: &MarketParams,
    jp: Option<&JumpParams>,
    gamma_counterparty: f64,
    spec: &EpsSpec,
    cfg: SimConfig,
    exec: &E,
) -> Result<DefaultAdjustmentEstimate> {
    let (l_hat, p_hat) = first_protection_level(spec)?;
    let sim = Simulator::new(mkt, jp, gamma_counterparty, cfg)?;
    let s0 = mkt.spot;
    let d = |draw: &PathDraw| if draw.defaulted { 1.0 } else { 0.0 };
    let partial = sim.estimate(
        &|draw: &PathDraw| {
            let ret = draw.terminal / s0 - 1.0;
            if ret <= l_hat {
                d(draw) * p_hat * draw.terminal / s0
            } else {
                0.0
            }
        },
        exec,
    );
    let shortfall = sim.estimate(
        &|draw: &PathDraw| d(draw) * p_hat * (l_hat - (draw.terminal / s0 - 1.0)).max(0.0),
        exec,
    );
    Ok(DefaultAdjustmentEstimate {
        partial_expectation: partial,
        shortfall,
    })
}

/// Distribution summary of the provider's terminal cash flow.
#[derive(Debug, Clone, PartialEq)]
pub struct CashflowSummary {
    pub mean: Estimate,
    pub min: f64,
    pub max: f64,
    /// `(probability, quantile)` pairs.
    pub quantiles: Vec<(f64, f64)>,
}

pub const SUMMARY_PROBS: [f64; 7] = [0.001, 0.01, 0.05, 0.5, 0.95, 0.99, 0.999];

/// Simulates the provider's after-hedge cash flow: the hedged flow while
/// the put seller survives, the defaulted flow otherwise. Antithetic pairing is rejected since pair
/// means would distort the quantiles.
#[allow(clippy::too_many_arguments)]
pub fn mc_hedged_cashflow_distribution<E: BlockExecutor + ?Sized>(
    spec: &EpsSpec,
    port: &HedgePortfolio,
    mkt: &MarketParams,
    jp: Option<&JumpParams>,
    gamma_counterparty: f64,
    h0: f64,
    premium: f64,
    cfg: SimConfig,
    exec: &E,
) -> Result<CashflowSummary> {
    if cfg.antithetic {
        return Err(EpsError::Config(alloc::string::String::from(
            "cash flow distributions use plain sampling",
        )));
    }
    spec.validate()?;
    let sim = Simulator::new(mkt, jp, gamma_counterparty, cfg)?;
    let s0 = mkt.spot;
    let flow = |draw: &PathDraw| {
        let r = draw.terminal / s0 - 1.0;
        let cf = if draw.defaulted {
            defaulted_cash_flow(spec, mkt, h0, premium, r)
        } else {
            hedged_cash_flow(spec, port, mkt, h0, premium, r)
        };
        // Terminal returns from exp() are always > -1; a total wipe-out
        // underflow is the only way to hit the domain edge.
        cf.unwrap_or(f64::NAN)
    };
    let blocks = sim.samples(&flow, exec);
    let mean = sim.summarize(&blocks);
    let mut all = blocks.concat();
    if all.iter().any(|x| x.is_nan()) {
        return Err(EpsError::Numerical {
            context: "mc_hedged_cashflow_distribution",
            n: 0,
        });
    }
    all.sort_by(f64::total_cmp);
    let quantile = |q: f64| all[((all.len() - 1) as f64 * q) as usize];
    Ok(CashflowSummary {
        mean,
        min: all[0],
        max: all[all.len() - 1],
        quantiles: SUMMARY_PROBS.iter().map(|&q| (q, quantile(q))).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bs::bs_call;
    use crate::hedging::{build_hedge, hedge_cost, Engine};
    use crate::jump::conditional_n_price;

    fn mkt() -> MarketParams {
        MarketParams::new(100.0, 0.015, 0.2, 1.0).unwrap()
    }

    fn row1() -> JumpParams {
        JumpParams::new(0.1, -0.2, 0.1).unwrap()
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| libm::sin(i as f64) * 3.0 + 1.0).collect();
        let whole = Moments::from_slice(&xs);
        let mut parts = Moments::default();
        for chunk in xs.chunks(77) {
            parts.merge(&Moments::from_slice(chunk));
        }
        assert_eq!(whole.count, parts.count);
        assert!((whole.mean - parts.mean).abs() < 1e-13);
        assert!((whole.m2 - parts.m2).abs() < 1e-9);
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(999, 0).validate().is_err());
        assert!(SimConfig::new(1001, 0).antithetic(true).validate().is_err());
        assert!(SimConfig::new(1000, 0).validate().is_ok());
        assert_eq!(SimConfig::new(BLOCK_PATHS + 1, 0).block_count(), 2);
        let none = Simulator::new(
            &mkt(),
            None,
            0.0,
            SimConfig::new(1000, 0).conditioned(Conditioning::ExactlyN(1)),
        );
        assert!(none.is_err());
    }

    #[test]
    fn seed_determinism_and_partial_blocks() {
        let cfg = SimConfig::new(100_003, 9);
        let a = mc_option_price(
            &mkt(),
            Some(&row1()),
            cfg,
            100.0,
            OptionKind::Call,
            &Sequential,
        )
        .unwrap();
        let b = mc_option_price(
            &mkt(),
            Some(&row1()),
            cfg,
            100.0,
            OptionKind::Call,
            &Sequential,
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples, 100_003);
        let c = mc_option_price(
            &mkt(),
            Some(&row1()),
            SimConfig::new(100_003, 10),
            100.0,
            OptionKind::Call,
            &Sequential,
        )
        .unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn zero_volatility_limit_is_deterministic_growth() {
        let m = MarketParams::new(100.0, 0.03, 1e-12, 2.0).unwrap();
        let s = simulate_terminal(&m, None, SimConfig::new(2_000, 1), &Sequential).unwrap();
        let want = 100.0 * libm::exp(0.06);
        assert!(s.values.iter().all(|v| (v - want).abs() < 1e-8));
    }

    #[test]
    fn black_scholes_call() {
        let m = mkt();
        let est = mc_option_price(
            &m,
            None,
            SimConfig::new(200_000, 3),
            100.0,
            OptionKind::Call,
            &Sequential,
        )
        .unwrap();
        assert!(est.within(bs_call(&m, 100.0).unwrap(), 3.0), "{est:?}");
    }

    #[test]
    fn conditional_terminal_mean() {
        let m = mkt();
        let jp = row1();
        let cfg = SimConfig::new(200_000, 4).conditioned(Conditioning::ExactlyN(1));
        let s = simulate_terminal(&m, Some(&jp), cfg, &Sequential).unwrap();
        let want = 100.0 * libm::exp(0.015 + compensator(&jp)) * libm::exp(jp.log_mean_jump());
        assert!(s.mean.within(want, 3.0), "{:?} vs {want}", s.mean);
    }

    #[test]
    fn jump_count_frequencies() {
        let m = mkt();
        let jp = JumpParams::new(1.5, -0.1, 0.1).unwrap();
        let sim = Simulator::new(&m, Some(&jp), 0.0, SimConfig::new(200_000, 5)).unwrap();
        let mut pmf = libm::exp(-1.5);
        for k in 0..=5u32 {
            if k > 0 {
                pmf *= 1.5 / k as f64;
            }
            let est = sim.estimate(
                &|d: &PathDraw| if d.jumps == k { 1.0 } else { 0.0 },
                &Sequential,
            );
            assert!(est.within(pmf, 4.0), "k={k}: {est:?} vs {pmf}");
        }
    }

    #[test]
    fn default_indicator_frequency() {
        let sim = Simulator::new(&mkt(), None, 0.3, SimConfig::new(200_000, 6)).unwrap();
        let est = sim.estimate(
            &|d: &PathDraw| if d.defaulted { 0.0 } else { 1.0 },
            &Sequential,
        );
        assert!(est.within(libm::exp(-0.3), 3.0), "{est:?}");
    }

    #[test]
    fn antithetic_keeps_estimand() {
        let m = mkt();
        let jp = row1();
        let plain = mc_option_price(
            &m,
            Some(&jp),
            SimConfig::new(200_000, 7),
            95.0,
            OptionKind::Put,
            &Sequential,
        )
        .unwrap();
        let anti = mc_option_price(
            &m,
            Some(&jp),
            SimConfig::new(200_000, 7).antithetic(true),
            95.0,
            OptionKind::Put,
            &Sequential,
        )
        .unwrap();
        assert_eq!(anti.samples, 100_000);
        let combined = libm::sqrt(plain.std_error.powi(2) + anti.std_error.powi(2));
        assert!((plain.mean - anti.mean).abs() < 3.0 * combined);
    }

    #[test]
    fn conditional_two_jumps_price() {
        let m = mkt();
        let jp = row1();
        let cfg = SimConfig::new(200_000, 8).conditioned(Conditioning::ExactlyN(2));
        let est = mc_option_price(&m, Some(&jp), cfg, 100.0, OptionKind::Put, &Sequential).unwrap();
        let closed = conditional_n_price(&m, &jp, 100.0, 2, OptionKind::Put).unwrap();
        assert!(est.within(closed, 3.0), "{est:?} vs {closed}");
    }

    #[test]
    fn zero_intensity_default_adjustment_is_zero() {
        let spec = EpsSpec::buffer(-0.05, 0.10, 0.8, 0.5).unwrap();
        let est = mc_default_adjustment(
            &mkt(),
            None,
            0.0,
            &spec,
            SimConfig::new(10_000, 1),
            &Sequential,
        )
        .unwrap();
        assert_eq!(est.partial_expectation.mean, 0.0);
        assert_eq!(est.partial_expectation.std_error, 0.0);
        assert_eq!(est.shortfall.mean, 0.0);
    }

    #[test]
    fn cash_flow_distribution_bounds() {
        let m = mkt();
        let spec = EpsSpec::buffer(-0.05, 0.10, 0.8, 0.5).unwrap();
        let port = build_hedge(&spec, &m).unwrap();
        let h0 = hedge_cost(&port, &m, None, &Engine::vanilla()).unwrap();
        let cfg = SimConfig::new(50_000, 2);
        let none =
            mc_hedged_cashflow_distribution(&spec, &port, &m, None, 0.0, h0, h0, cfg, &Sequential)
                .unwrap();
        assert!(none.min.abs() < 1e-12 && none.max.abs() < 1e-12);
        let some = mc_hedged_cashflow_distribution(
            &spec,
            &port,
            &m,
            Some(&row1()),
            0.05,
            h0,
            h0,
            cfg,
            &Sequential,
        )
        .unwrap();
        assert!(some.min >= -0.8 * 0.95 - 1e-12);
        assert!(some.mean.mean < 0.0);
        assert!(mc_hedged_cashflow_distribution(
            &spec,
            &port,
            &m,
            None,
            0.0,
            h0,
            h0,
            cfg.antithetic(true),
            &Sequential
        )
        .is_err());
    }
}
