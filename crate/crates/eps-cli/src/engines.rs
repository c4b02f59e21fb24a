//! Engine tags used on the command line and in configs.

use std::fmt;
use std::str::FromStr;

use eps_core::{DefaultParams, Engine, JumpModel};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineTag {
    Vanilla,
    Merton,
    ExactlyOneJump,
    AtMostOneJump,
    VanillaWithDefault,
    MertonWithDefault,
}

impl EngineTag {
    pub const ALL: [EngineTag; 6] = [
        EngineTag::Vanilla,
        EngineTag::AtMostOneJump,
        EngineTag::ExactlyOneJump,
        EngineTag::Merton,
        EngineTag::VanillaWithDefault,
        EngineTag::MertonWithDefault,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EngineTag::Vanilla => "vanilla",
            EngineTag::Merton => "merton",
            EngineTag::ExactlyOneJump => "exactly_one_jump",
            EngineTag::AtMostOneJump => "at_most_one_jump",
            EngineTag::VanillaWithDefault => "vanilla_with_default",
            EngineTag::MertonWithDefault => "merton_with_default",
        }
    }

    pub fn jump_model(self) -> Option<JumpModel> {
        match self {
            EngineTag::Vanilla | EngineTag::VanillaWithDefault => None,
            EngineTag::Merton | EngineTag::MertonWithDefault => Some(JumpModel::Full),
            EngineTag::ExactlyOneJump => Some(JumpModel::ExactlyOne),
            EngineTag::AtMostOneJump => Some(JumpModel::AtMostOne),
        }
    }

    pub fn needs_default(self) -> bool {
        matches!(
            self,
            EngineTag::VanillaWithDefault | EngineTag::MertonWithDefault
        )
    }

    /// Resolves the tag against the config's default intensities.
    /// `vanilla_with_default` discounts every leg at the counterparty
    /// intensity.
    pub fn engine(self, defaults: Option<&DefaultParams>) -> CliResult<Engine> {
        let need = || {
            defaults.ok_or_else(|| {
                CliError::Config(format!(
                    "engine `{}` needs the `default` section in the config",
                    self.as_str()
                ))
            })
        };
        Ok(match self {
            EngineTag::Vanilla => Engine::vanilla(),
            EngineTag::Merton => Engine::merton(),
            EngineTag::ExactlyOneJump => Engine::exactly_one_jump(),
            EngineTag::AtMostOneJump => Engine::at_most_one_jump(),
            EngineTag::VanillaWithDefault => {
                Engine::vanilla_with_default(need()?.gamma_counterparty)
            }
            EngineTag::MertonWithDefault => {
                let d = need()?;
                Engine::merton_with_default(d.gamma_counterparty, d.gamma_provider)
            }
        })
    }
}

impl fmt::Display for EngineTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EngineTag {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EngineTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<_> = EngineTag::ALL.iter().map(|t| t.as_str()).collect();
                CliError::Config(format!(
                    "unknown engine `{s}` (known: {})",
                    known.join(", ")
                ))
            })
    }
}

/// Engines to run: the command-line tag, else the config list, else every
/// engine whose sections are present.
pub fn resolve(
    flag: Option<&str>,
    configured: &[String],
    has_jump: bool,
    has_default: bool,
) -> CliResult<Vec<EngineTag>> {
    let tags: Vec<EngineTag> = match flag {
        Some(tag) => vec![tag.parse()?],
        None if !configured.is_empty() => configured
            .iter()
            .map(|s| s.parse())
            .collect::<CliResult<_>>()?,
        None => EngineTag::ALL
            .into_iter()
            .filter(|t| {
                (has_jump || t.jump_model().is_none()) && (has_default || !t.needs_default())
            })
            .collect(),
    };
    for t in &tags {
        if t.jump_model().is_some() && !has_jump {
            return Err(CliError::Config(format!(
                "engine `{t}` needs the `jump` section in the config"
            )));
        }
        if t.needs_default() && !has_default {
            return Err(CliError::Config(format!(
                "engine `{t}` needs the `default` section in the config"
            )));
        }
    }
    Ok(tags)
}
