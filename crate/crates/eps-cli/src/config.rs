//! JSON run configuration shared by all subcommands.

use std::path::{Path, PathBuf};

use eps_core::{DefaultParams, EpsSpec, JumpParams, MarketParams};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default)]
    pub market: Option<MarketParams>,
    #[serde(default)]
    pub jump: Option<JumpParams>,
    #[serde(default, rename = "default")]
    pub default: Option<DefaultParams>,
    #[serde(default)]
    pub eps: Option<EpsSpec>,
    /// Engine tags; empty means every engine the sections allow.
    #[serde(default)]
    pub engines: Vec<String>,
    /// Strikes for `price`; empty means at-the-money.
    #[serde(default)]
    pub strikes: Vec<f64>,
    /// Point count of the `payoff` return grid.
    #[serde(default)]
    pub grid: Option<usize>,
    /// Premium for `payoff` and `mc` cash flows; defaults to `H(0)`.
    #[serde(default)]
    pub premium: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub paths: Option<u64>,
    #[serde(default)]
    pub mc: Option<McSection>,
    /// Reference values for `tables`; the bundled file when absent.
    #[serde(default)]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McQuantity {
    Call,
    Put,
    TerminalMean,
    DefaultAdjustment,
    CashFlow,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub quantity: McQuantity,
    #[serde(default)]
    pub strike: Option<f64>,
    /// Engine tag selecting the jump-count conditioning.
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub antithetic: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn market(&self, command: &str) -> CliResult<MarketParams> {
        let m = self
            .market
            .ok_or_else(|| CliError::missing_section("market", command))?;
        m.validate()?;
        Ok(m)
    }

    pub fn jump(&self) -> CliResult<Option<JumpParams>> {
        if let Some(jp) = &self.jump {
            jp.validate()?;
        }
        Ok(self.jump)
    }

    pub fn defaults(&self) -> CliResult<Option<DefaultParams>> {
        if let Some(d) = &self.default {
            d.validate()?;
        }
        Ok(self.default)
    }

    pub fn eps(&self, command: &str) -> CliResult<EpsSpec> {
        let spec = self
            .eps
            .clone()
            .ok_or_else(|| CliError::missing_section("eps", command))?;
        spec.validate()?;
        Ok(spec)
    }
}
