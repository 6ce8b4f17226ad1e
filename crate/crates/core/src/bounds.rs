//! Treatment assignment from bounds on each arm's egalitarian equivalent.
//!
//! A bounding scheme yields `[ee_a_low, ee_a_high]` and `[ee_b_low,
//! ee_b_high]`. Regret is worst at the two corners where one arm is at its
//! best and the other at its worst, so the identified set reduces to those
//! two states and the minimax-regret rule applies directly.

use crate::error::{Error, Result};
use crate::rules::{
    minimax_regret_rule, regret_profile, Criterion, RegretRow, RuleResult, StatePair, StateSet,
};
use crate::welfare::WelfareSpec;

/// Bounds on both arms' EEs for one scheme and evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct EeBounds {
    pub scheme: String,
    pub gamma: f64,
    pub ee_a_low: f64,
    pub ee_a_high: f64,
    pub ee_b_low: f64,
    pub ee_b_high: f64,
}

impl EeBounds {
    pub fn new(
        scheme: impl Into<String>,
        gamma: f64,
        ee_a: (f64, f64),
        ee_b: (f64, f64),
    ) -> Result<Self> {
        let b = EeBounds {
            scheme: scheme.into(),
            gamma,
            ee_a_low: ee_a.0,
            ee_a_high: ee_a.1,
            ee_b_low: ee_b.0,
            ee_b_high: ee_b.1,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        WelfareSpec::new(self.gamma)?;
        for v in [self.ee_a_low, self.ee_a_high, self.ee_b_low, self.ee_b_high] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::domain(format!(
                    "{}: bounds must be positive and finite, got {v}",
                    self.scheme
                )));
            }
        }
        if self.ee_a_low > self.ee_a_high || self.ee_b_low > self.ee_b_high {
            return Err(Error::argument(format!(
                "{}: lower bound exceeds upper bound",
                self.scheme
            )));
        }
        Ok(())
    }

    pub fn welfare(&self) -> Result<WelfareSpec> {
        WelfareSpec::new(self.gamma)
    }
}

/// The two corner states `s_a = (ee_a_high, ee_b_low)` and
/// `s_b = (ee_a_low, ee_b_high)`.
pub fn bounds_to_states(b: &EeBounds) -> Result<StateSet> {
    b.validate()?;
    StateSet::new(vec![
        StatePair::new("s_a", b.ee_a_high, b.ee_b_low)?,
        StatePair::new("s_b", b.ee_a_low, b.ee_b_high)?,
    ])
}

/// Minimax-regret assignment for one row of bounds.
pub fn assign_from_bounds(b: &EeBounds) -> Result<RuleResult> {
    let ss = bounds_to_states(b)?;
    let spec = b.welfare()?;
    let shortcut = if b.ee_b_high <= b.ee_a_low {
        Some(0.0)
    } else if b.ee_b_low >= b.ee_a_high {
        Some(1.0)
    } else {
        None
    };
    match shortcut {
        Some(delta) => Ok(RuleResult {
            delta,
            criterion: Criterion::MinimaxRegret,
            value: 0.0,
            binding: ss.states().to_vec(),
            synthetic: false,
        }),
        None => minimax_regret_rule(&spec, &ss),
    }
}

/// Endpoint regrets `(ee_a_high - ee_b_low, ee_b_high - ee_a_low)`: the
/// regret of treating everyone when `a` was better, and of treating no one
/// when `b` was better.
pub fn worst_regret_decomposition(b: &EeBounds) -> (f64, f64) {
    (b.ee_a_high - b.ee_b_low, b.ee_b_high - b.ee_a_low)
}

pub fn bounds_regret_profile(b: &EeBounds, grid: usize) -> Result<Vec<RegretRow>> {
    regret_profile(&b.welfare()?, &bounds_to_states(b)?, grid)
}

/// One output row of a batch assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub scheme: String,
    pub gamma: f64,
    pub delta: f64,
    pub worst_regret: f64,
}

pub fn assign_all(rows: &[EeBounds]) -> Result<Vec<Assignment>> {
    rows.iter()
        .map(|b| {
            let r = assign_from_bounds(b)?;
            Ok(Assignment {
                scheme: b.scheme.clone(),
                gamma: b.gamma,
                delta: r.delta,
                worst_regret: r.value,
            })
        })
        .collect()
}
