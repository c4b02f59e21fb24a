//! The adjusted return `ψ` of a standard EPS and its protection/fee split.
//!
//! Levels are pure returns. Protection levels run downwards from the
//! implicit `l_0 = 0` (`0 > l_1 > … > l_n > -1`), fee levels upwards from
//! the implicit `g_0 = 0`. Rate `p_{i+1}` applies between `l_{i+1}` and
//! `l_i`, so there is one more protection rate than protection level (the
//! last one runs down to -1); likewise for fees, the last rate running to
//! infinity. `ψ` is continuous and piecewise linear, so breakpoint
//! conventions do not matter.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{EpsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EpsKind {
    Buffer,
    Floor,
    FloorCap,
    General,
}

impl EpsKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EpsKind::Buffer => "buffer",
            EpsKind::Floor => "floor",
            EpsKind::FloorCap => "floor_cap",
            EpsKind::General => "general",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpsSpec {
    pub kind: EpsKind,
    /// `l_1 > … > l_n`, all in `(-1, 0)`.
    pub protection_levels: Vec<f64>,
    /// `p_1, …, p_{n+1}` in `[0, 1]`.
    pub protection_rates: Vec<f64>,
    /// `g_1 < … < g_m`, all positive.
    pub fee_levels: Vec<f64>,
    /// `f_1, …, f_{m+1}` in `[0, 1]`.
    pub fee_rates: Vec<f64>,
    /// Notional; only scales cash flows, never `ψ`.
    #[cfg_attr(feature = "serde", serde(default = "unit_nominal"))]
    pub nominal: f64,
}

#[cfg(feature = "serde")]
fn unit_nominal() -> f64 {
    1.0
}

impl EpsSpec {
    pub fn new(
        kind: EpsKind,
        protection_levels: Vec<f64>,
        protection_rates: Vec<f64>,
        fee_levels: Vec<f64>,
        fee_rates: Vec<f64>,
        nominal: f64,
    ) -> Result<Self> {
        let spec = Self {
            kind,
            protection_levels,
            protection_rates,
            fee_levels,
            fee_rates,
            nominal,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Buffer EPS: protection at rate `p2` below `l1`, fees at rate `f2`
    /// above `g1`, nothing in between.
    pub fn buffer(l1: f64, g1: f64, p2: f64, f2: f64) -> Result<Self> {
        Self::new(
            EpsKind::Buffer,
            vec![l1],
            vec![0.0, p2],
            vec![g1],
            vec![0.0, f2],
            1.0,
        )
    }

    /// Floor EPS: losses covered at rate `p1` down to `l1`, then nothing;
    /// fees at rate `f2` above `g1`.
    pub fn floor(l1: f64, p1: f64, g1: f64, f2: f64) -> Result<Self> {
        Self::new(
            EpsKind::Floor,
            vec![l1],
            vec![p1, 0.0],
            vec![g1],
            vec![0.0, f2],
            1.0,
        )
    }

    /// Floor-cap EPS: floor protection and fees at rate `f1` up to `g1`.
    pub fn floor_cap(l1: f64, g1: f64, p1: f64, f1: f64) -> Result<Self> {
        Self::new(
            EpsKind::FloorCap,
            vec![l1],
            vec![p1, 0.0],
            vec![g1],
            vec![f1, 0.0],
            1.0,
        )
    }

    pub fn with_nominal(mut self, nominal: f64) -> Result<Self> {
        self.nominal = nominal;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: alloc::string::String| Err(EpsError::InvalidSpec(msg));

        if self.protection_rates.len() != self.protection_levels.len() + 1 {
            return invalid(format!(
                "{} protection levels need {} rates, got {}",
                self.protection_levels.len(),
                self.protection_levels.len() + 1,
                self.protection_rates.len()
            ));
        }
        if self.fee_rates.len() != self.fee_levels.len() + 1 {
            return invalid(format!(
                "{} fee levels need {} rates, got {}",
                self.fee_levels.len(),
                self.fee_levels.len() + 1,
                self.fee_rates.len()
            ));
        }

        let mut prev = 0.0;
        for &l in &self.protection_levels {
            if !(l.is_finite() && l < prev && l > -1.0) {
                return invalid(format!(
                    "protection level {l} must lie in (-1, {prev}) to keep levels strictly decreasing"
                ));
            }
            prev = l;
        }
        let mut prev = 0.0;
        for &g in &self.fee_levels {
            if !(g.is_finite() && g > prev) {
                return invalid(format!(
                    "fee level {g} must exceed {prev} to keep levels strictly increasing"
                ));
            }
            prev = g;
        }
        for (name, rates) in [
            ("protection", &self.protection_rates),
            ("fee", &self.fee_rates),
        ] {
            if let Some(r) = rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
                return invalid(format!("{name} rate {r} outside [0, 1]"));
            }
        }
        if !(self.nominal.is_finite() && self.nominal > 0.0) {
            return invalid(format!("nominal {} must be positive", self.nominal));
        }

        let p = &self.protection_rates;
        let f = &self.fee_rates;
        let shape_ok = match self.kind {
            EpsKind::General => true,
            EpsKind::Buffer => p.len() == 2 && f.len() == 2 && p[0] == 0.0 && f[0] == 0.0,
            EpsKind::Floor => p.len() == 2 && f.len() == 2 && p[1] == 0.0 && f[0] == 0.0,
            EpsKind::FloorCap => p.len() == 2 && f.len() == 2 && p[1] == 0.0 && f[1] == 0.0,
        };
        if !shape_ok {
            return invalid(format!(
                "rates do not have the {} shape",
                self.kind.as_str()
            ));
        }
        Ok(())
    }

    /// `ψ(R)` per unit nominal.
    pub fn adjusted_return(&self, r_t: f64) -> Result<f64> {
        check_return(r_t)?;
        Ok(self.psi(r_t))
    }

    /// `ψ^p(R) = ψ(R) 1{R < 0}`, never positive.
    pub fn protection_leg(&self, r_t: f64) -> Result<f64> {
        check_return(r_t)?;
        Ok(self.psi_protection(r_t))
    }

    /// `ψ^f(R) = ψ(R) 1{R > 0}`, never negative.
    pub fn fee_leg(&self, r_t: f64) -> Result<f64> {
        check_return(r_t)?;
        Ok(self.psi_fee(r_t))
    }

    #[inline]
    pub(crate) fn psi(&self, r_t: f64) -> f64 {
        self.psi_protection(r_t) + self.psi_fee(r_t)
    }

    /// Walks the loss segments `[l_{i+1}, l_i]` downwards from zero.
    pub(crate) fn psi_protection(&self, r_t: f64) -> f64 {
        if r_t >= 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        let mut upper = 0.0;
        for (i, &rate) in self.protection_rates.iter().enumerate() {
            let lower = self
                .protection_levels
                .get(i)
                .copied()
                .unwrap_or(f64::NEG_INFINITY);
            acc += rate * (r_t.max(lower) - upper);
            if r_t >= lower {
                break;
            }
            upper = lower;
        }
        acc
    }

    pub(crate) fn psi_fee(&self, r_t: f64) -> f64 {
        if r_t <= 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        let mut lower = 0.0;
        for (j, &rate) in self.fee_rates.iter().enumerate() {
            let upper = self.fee_levels.get(j).copied().unwrap_or(f64::INFINITY);
            acc += rate * (r_t.min(upper) - lower);
            if r_t <= upper {
                break;
            }
            lower = upper;
        }
        acc
    }

    pub fn has_protection(&self) -> bool {
        self.protection_rates.iter().any(|&p| p > 0.0)
    }
}

fn check_return(r_t: f64) -> Result<()> {
    if r_t.is_finite() && r_t > -1.0 {
        Ok(())
    } else {
        Err(EpsError::Domain {
            name: "terminal return",
            value: r_t,
        })
    }
}
