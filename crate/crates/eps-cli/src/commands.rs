//! The `price`, `hedge`, `premium`, `payoff` and `mc` subcommands. Each
//! returns a [`Table`]; printing and file output happen in the caller.

use eps_core::mc::{
    mc_default_adjustment, mc_hedged_cashflow_distribution, mc_option_price, simulate_terminal,
    Conditioning, SimConfig,
};
use eps_core::{
    build_hedge, compensator, default_adjustment, defaulted_cash_flow, hedge_cost,
    hedged_cash_flow, premium_report, terminal_mean, HedgeLeg, JumpModel, OptionKind,
};

use crate::config::{McQuantity, RunConfig};
use crate::engines::{resolve, EngineTag};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};
use crate::parallel::Rayon;

/// Command-line overrides shared by the subcommands.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub engine: Option<String>,
    pub seed: Option<u64>,
    pub paths: Option<u64>,
    pub grid: Option<usize>,
    pub protection_only: bool,
}

pub const DEFAULT_GRID: usize = 200;
pub const DEFAULT_PATHS: u64 = 1_000_000;
pub const Z_LIMIT: f64 = 3.0;

fn check_finite(what: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Numerical(format!("{what} is not finite")))
    }
}

pub fn price(cfg: &RunConfig, opts: &Options) -> CliResult<Table> {
    let mkt = cfg.market("price")?;
    let jp = cfg.jump()?;
    let defaults = cfg.defaults()?;
    let tags = resolve(
        opts.engine.as_deref(),
        &cfg.engines,
        jp.is_some(),
        defaults.is_some(),
    )?;
    let strikes = if cfg.strikes.is_empty() {
        vec![mkt.spot]
    } else {
        cfg.strikes.clone()
    };

    let mut t = Table::new(&[
        "engine",
        "kind",
        "strike",
        "price",
        "lambda",
        "mu_j",
        "alpha",
        "delta",
        "gamma_counterparty",
        "gamma_provider",
    ]);
    for tag in tags {
        let engine = tag.engine(defaults.as_ref())?;
        let jump_cells = match (tag.jump_model(), &jp) {
            (Some(_), Some(jp)) => vec![
                jp.lambda.into(),
                compensator(jp).into(),
                jp.alpha.into(),
                jp.delta.into(),
            ],
            _ => vec![Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty],
        };
        let credit_cells = match (tag.needs_default(), &defaults) {
            (true, Some(d)) => vec![d.gamma_counterparty.into(), d.gamma_provider.into()],
            _ => vec![Cell::Empty, Cell::Empty],
        };
        for &strike in &strikes {
            for kind in [OptionKind::Call, OptionKind::Put] {
                let leg = HedgeLeg {
                    kind,
                    strike,
                    quantity: 1.0,
                };
                let v = check_finite("price", engine.leg_value(&mkt, jp.as_ref(), &leg)?)?;
                let mut row = vec![
                    tag.as_str().into(),
                    kind.as_str().into(),
                    strike.into(),
                    v.into(),
                ];
                row.extend(jump_cells.iter().cloned());
                row.extend(credit_cells.iter().cloned());
                t.push(row);
            }
        }
    }
    Ok(t)
}

pub fn hedge(cfg: &RunConfig, opts: &Options) -> CliResult<Table> {
    let mkt = cfg.market("hedge")?;
    let spec = cfg.eps("hedge")?;
    let jp = cfg.jump()?;
    let defaults = cfg.defaults()?;
    let tags = resolve(
        opts.engine.as_deref(),
        &cfg.engines,
        jp.is_some(),
        defaults.is_some(),
    )?;
    let mut port = build_hedge(&spec, &mkt)?;
    if opts.protection_only {
        port = port.protection_only();
    }

    let mut t = Table::new(&["record", "option", "strike", "quantity", "engine", "value"]);
    for leg in &port.legs {
        t.push(vec![
            "leg".into(),
            leg.kind.as_str().into(),
            leg.strike.into(),
            leg.quantity.into(),
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    for tag in tags {
        let engine = tag.engine(defaults.as_ref())?;
        let h0 = check_finite("hedge cost", hedge_cost(&port, &mkt, jp.as_ref(), &engine)?)?;
        t.push(vec![
            "cost".into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            tag.as_str().into(),
            h0.into(),
        ]);
    }
    Ok(t)
}

pub fn premium(cfg: &RunConfig, _opts: &Options) -> CliResult<Table> {
    let mkt = cfg.market("premium")?;
    let spec = cfg.eps("premium")?;
    let jp = cfg.jump()?;
    let defaults = cfg
        .defaults()?
        .ok_or_else(|| CliError::missing_section("default", "premium"))?;
    let mut models: Vec<Option<JumpModel>> = vec![None];
    if jp.is_some() {
        models.extend([
            Some(JumpModel::AtMostOne),
            Some(JumpModel::ExactlyOne),
            Some(JumpModel::Full),
        ]);
    }

    let mut t = Table::new(&[
        "model",
        "gamma_counterparty",
        "l_hat",
        "p_hat",
        "hedge_cost",
        "fair_premium",
        "hedge_cost_credit",
        "default_adjustment",
        "default_adjusted_premium",
        "super_hedging_premium",
    ]);
    for model in models {
        let r = premium_report(&spec, &mkt, jp.as_ref(), defaults.gamma_counterparty, model)?;
        let nums = [
            r.l_hat,
            r.p_hat,
            r.hedge_cost,
            r.fair_premium,
            r.hedge_cost_credit,
            r.default_adjustment,
            r.default_adjusted_premium,
            r.super_hedging_premium,
        ];
        for v in nums {
            check_finite("premium", v)?;
        }
        let mut row: Vec<Cell> = vec![
            model.map_or("none", JumpModel::as_str).into(),
            defaults.gamma_counterparty.into(),
        ];
        row.extend(nums.into_iter().map(Cell::Num));
        t.push(row);
    }
    Ok(t)
}

/// `H(0)` under the selected engine (first resolved, vanilla by default).
fn selected_cost(
    cfg: &RunConfig,
    opts: &Options,
    port: &eps_core::HedgePortfolio,
    mkt: &eps_core::MarketParams,
) -> CliResult<(EngineTag, f64)> {
    let jp = cfg.jump()?;
    let defaults = cfg.defaults()?;
    let tag = match (&opts.engine, cfg.engines.first()) {
        (Some(flag), _) => flag.parse()?,
        (None, Some(first)) => first.parse()?,
        (None, None) => EngineTag::Vanilla,
    };
    resolve(Some(tag.as_str()), &[], jp.is_some(), defaults.is_some())?;
    let engine = tag.engine(defaults.as_ref())?;
    let h0 = check_finite("hedge cost", hedge_cost(port, mkt, jp.as_ref(), &engine)?)?;
    Ok((tag, h0))
}

pub fn payoff(cfg: &RunConfig, opts: &Options) -> CliResult<Table> {
    let mkt = cfg.market("payoff")?;
    let spec = cfg.eps("payoff")?;
    let port = build_hedge(&spec, &mkt)?;
    let (_, h0) = selected_cost(cfg, opts, &port, &mkt)?;
    let premium = cfg.premium.unwrap_or(h0);
    let n = opts.grid.or(cfg.grid).unwrap_or(DEFAULT_GRID);
    if n < 2 {
        return Err(CliError::Config(format!(
            "grid needs at least 2 points, got {n}"
        )));
    }

    let (lo, hi) = (-0.99, 1.0);
    let mut t = Table::new(&[
        "R_T",
        "psi",
        "psi_p",
        "psi_f",
        "hedge_payoff",
        "cf",
        "cf_default",
    ]);
    for i in 0..n {
        let r = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        t.push(vec![
            r.into(),
            spec.adjusted_return(r)?.into(),
            spec.protection_leg(r)?.into(),
            spec.fee_leg(r)?.into(),
            port.payoff(r).into(),
            hedged_cash_flow(&spec, &port, &mkt, h0, premium, r)?.into(),
            defaulted_cash_flow(&spec, &mkt, h0, premium, r)?.into(),
        ]);
    }
    Ok(t)
}

/// Monte Carlo estimates next to their closed forms, with the largest
/// `|z|` over the rows that have one.
pub fn mc(cfg: &RunConfig, opts: &Options) -> CliResult<(Table, f64)> {
    let mkt = cfg.market("mc")?;
    let section = cfg
        .mc
        .clone()
        .ok_or_else(|| CliError::missing_section("mc", "mc"))?;
    let tag: EngineTag = match (&opts.engine, &section.model) {
        (Some(flag), _) => flag.parse()?,
        (None, Some(m)) => m.parse()?,
        (None, None) => EngineTag::Vanilla,
    };
    let model = tag.jump_model();
    let jp = match model {
        Some(_) => Some(
            cfg.jump()?
                .ok_or_else(|| CliError::missing_section("jump", "mc"))?,
        ),
        None => None,
    };
    let conditioning = match model {
        None | Some(JumpModel::Full) => Conditioning::Unconditional,
        Some(JumpModel::ExactlyOne) => Conditioning::ExactlyN(1),
        Some(JumpModel::AtMostOne) => Conditioning::AtMostOne,
    };
    let seed = opts.seed.or(cfg.seed).unwrap_or(0);
    let paths = opts.paths.or(cfg.paths).unwrap_or(DEFAULT_PATHS);
    let sim = SimConfig::new(paths, seed)
        .conditioned(conditioning)
        .antithetic(section.antithetic);
    let strike = section.strike.unwrap_or(mkt.spot);

    let mut t = Table::new(&[
        "quantity",
        "model",
        "estimate",
        "std_error",
        "closed_form",
        "z",
        "paths",
        "seed",
    ]);
    let mut row = |name: &str, est: &eps_core::mc::Estimate, closed: Option<f64>| {
        let z = closed.map(|c| est.z_score(c));
        t.push(vec![
            name.into(),
            tag.as_str().into(),
            est.mean.into(),
            est.std_error.into(),
            closed.into(),
            z.into(),
            Cell::Int(est.paths),
            Cell::Int(est.seed),
        ]);
        z
    };

    let mut worst: f64 = 0.0;
    match section.quantity {
        McQuantity::Call | McQuantity::Put => {
            let kind = if section.quantity == McQuantity::Call {
                OptionKind::Call
            } else {
                OptionKind::Put
            };
            let est = mc_option_price(&mkt, jp.as_ref(), sim, strike, kind, &Rayon)?;
            let closed = match (model, &jp) {
                (Some(m), Some(jp)) => m.price(&mkt, jp, strike, kind)?,
                _ => eps_core::bs_price(&mkt, strike, kind)?,
            };
            let name = kind.as_str();
            worst = worst.max(row(name, &est, Some(closed)).unwrap_or(0.0).abs());
        }
        McQuantity::TerminalMean => {
            let s = simulate_terminal(&mkt, jp.as_ref(), sim, &Rayon)?;
            let closed = match (model, &jp) {
                (Some(m), Some(jp)) => terminal_mean(&mkt, jp, m)?,
                _ => mkt.spot * (mkt.rate * mkt.maturity).exp(),
            };
            worst = worst.max(
                row("terminal_mean", &s.mean, Some(closed))
                    .unwrap_or(0.0)
                    .abs(),
            );
        }
        McQuantity::DefaultAdjustment => {
            let spec = cfg.eps("mc")?;
            let gamma = cfg
                .defaults()?
                .ok_or_else(|| CliError::missing_section("default", "mc"))?
                .gamma_counterparty;
            let est = mc_default_adjustment(&mkt, jp.as_ref(), gamma, &spec, sim, &Rayon)?;
            let closed = default_adjustment(&spec, &mkt, jp.as_ref(), gamma, model)?;
            worst = worst.max(
                row("default_adjustment", &est.partial_expectation, Some(closed))
                    .unwrap_or(0.0)
                    .abs(),
            );
            row("default_shortfall", &est.shortfall, None);
        }
        McQuantity::CashFlow => {
            let spec = cfg.eps("mc")?;
            let gamma = cfg
                .defaults()?
                .ok_or_else(|| CliError::missing_section("default", "mc"))?
                .gamma_counterparty;
            let port = build_hedge(&spec, &mkt)?;
            let (_, h0) = selected_cost(cfg, &Options::default(), &port, &mkt)?;
            let premium = cfg.premium.unwrap_or(h0);
            let sum = mc_hedged_cashflow_distribution(
                &spec,
                &port,
                &mkt,
                jp.as_ref(),
                gamma,
                h0,
                premium,
                sim,
                &Rayon,
            )?;
            row("cash_flow_mean", &sum.mean, None);
            let point = |v: f64| eps_core::mc::Estimate {
                mean: v,
                std_error: 0.0,
                ..sum.mean
            };
            row("cash_flow_min", &point(sum.min), None);
            for (q, v) in &sum.quantiles {
                row(&format!("cash_flow_q{q}"), &point(*v), None);
            }
            row("cash_flow_max", &point(sum.max), None);
        }
    }

    for r in &t.rows {
        if let Cell::Num(v) = &r[2] {
            check_finite("estimate", *v)?;
        }
    }
    Ok((t, worst))
}
