//! Optimal treatment rules over a set of states that the data cannot tell
//! apart.
//!
//! Each state carries the egalitarian equivalents of the status quo `a` and
//! the innovation `b`. A rule `δ ∈ [0, 1]` is the fraction assigned to `b`;
//! its welfare in a state is the EE mixture of the two arms. Bayes and
//! maximin rules are bang-bang. The minimax-regret rule equalizes the regret
//! of the two extreme states
//!
//! ```text
//! s_a = (max ee_a, min ee_b)    best for a, worst for b
//! s_b = (min ee_a, max ee_b)    worst for a, best for b
//! ```
//!
//! by bisection on `H(δ) = R_b(δ, s_b) - R_a(δ, s_a)`, which is strictly
//! decreasing whenever the two states straddle zero effect.
//!
//! All indicator rules use strict inequalities, so ties go to `a`.

use std::fmt;

use crate::error::{Error, Result};
use crate::prospects::Prior;
use crate::welfare::WelfareSpec;

/// Egalitarian equivalents of both arms in one state.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub label: String,
    pub ee_a: f64,
    pub ee_b: f64,
}

impl StatePair {
    pub fn new(label: impl Into<String>, ee_a: f64, ee_b: f64) -> Result<Self> {
        for v in [ee_a, ee_b] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::domain(format!(
                    "state egalitarian equivalents must be positive and finite, got {v}"
                )));
            }
        }
        Ok(StatePair {
            label: label.into(),
            ee_a,
            ee_b,
        })
    }

    /// `ee_b - ee_a`.
    pub fn tau_ee(&self) -> f64 {
        self.ee_b - self.ee_a
    }

    /// EE of rule `delta` in this state.
    pub fn welfare(&self, spec: &WelfareSpec, delta: f64) -> Result<f64> {
        spec.ee_mixture(self.ee_a, self.ee_b, delta)
    }

    /// `max(ee_a, ee_b) - ee(δ)`, never negative.
    pub fn regret(&self, spec: &WelfareSpec, delta: f64) -> Result<f64> {
        Ok((self.ee_a.max(self.ee_b) - self.welfare(spec, delta)?).max(0.0))
    }
}

/// The identified set of states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSet(Vec<StatePair>);

/// Coordinate-wise extreme states of a [`StateSet`].
///
/// The `*_attained` flags say whether a member state carries both
/// coordinates; when one is false the corresponding state was synthesized.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeStates {
    /// `(min ee_a, min ee_b)`.
    pub worst: StatePair,
    /// `(max ee_a, min ee_b)`.
    pub best_a: StatePair,
    /// `(min ee_a, max ee_b)`.
    pub best_b: StatePair,
    pub worst_attained: bool,
    pub best_a_attained: bool,
    pub best_b_attained: bool,
}

impl ExtremeStates {
    pub fn all_attained(&self) -> bool {
        self.worst_attained && self.best_a_attained && self.best_b_attained
    }
}

impl StateSet {
    pub fn new(states: Vec<StatePair>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::argument("state set must be nonempty"));
        }
        Ok(StateSet(states))
    }

    pub fn states(&self) -> &[StatePair] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest EE magnitude in the set; scales solver tolerances.
    pub fn scale(&self) -> f64 {
        self.0
            .iter()
            .fold(0.0, |acc: f64, s| acc.max(s.ee_a).max(s.ee_b))
    }

    /// Extreme states under the rectangular-hull convention.
    pub fn extremes(&self) -> ExtremeStates {
        let (mut min_a, mut max_a) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut min_b, mut max_b) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.0 {
            min_a = min_a.min(s.ee_a);
            max_a = max_a.max(s.ee_a);
            min_b = min_b.min(s.ee_b);
            max_b = max_b.max(s.ee_b);
        }
        let find = |a: f64, b: f64| self.0.iter().find(|s| s.ee_a == a && s.ee_b == b);
        let make = |name: &str, a: f64, b: f64| match find(a, b) {
            Some(s) => (s.clone(), true),
            None => (
                StatePair {
                    label: name.to_owned(),
                    ee_a: a,
                    ee_b: b,
                },
                false,
            ),
        };
        let (worst, worst_attained) = make("s_w", min_a, min_b);
        let (best_a, best_a_attained) = make("s_a", max_a, min_b);
        let (best_b, best_b_attained) = make("s_b", min_a, max_b);
        ExtremeStates {
            worst,
            best_a,
            best_b,
            worst_attained,
            best_a_attained,
            best_b_attained,
        }
    }

    /// Like [`extremes`](Self::extremes) but errors unless every extreme
    /// state is a member of the set.
    pub fn extremes_strict(&self) -> Result<ExtremeStates> {
        let ex = self.extremes();
        if !ex.all_attained() {
            return Err(Error::precondition(
                "extreme states are not jointly attained by member states",
            ));
        }
        Ok(ex)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Bayes,
    Maximin,
    MinimaxRegret,
    PointId,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Bayes => "bayes",
            Criterion::Maximin => "maximin",
            Criterion::MinimaxRegret => "minimax-regret",
            Criterion::PointId => "point-id",
        })
    }
}

/// A chosen treatment fraction plus the quantity it optimizes.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleResult {
    pub delta: f64,
    pub criterion: Criterion,
    /// Worst regret for minimax regret, expected EE for Bayes, worst-state
    /// EE for maximin, the EETE for point identification.
    pub value: f64,
    /// States that determine the solution.
    pub binding: Vec<StatePair>,
    /// Whether any binding state was synthesized from coordinate extremes.
    pub synthetic: bool,
}

impl RuleResult {
    fn new(delta: f64, criterion: Criterion, value: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&delta));
        RuleResult {
            delta,
            criterion,
            value,
            binding: Vec::new(),
            synthetic: false,
        }
    }
}

fn indicator(positive: bool) -> f64 {
    if positive {
        1.0
    } else {
        0.0
    }
}

/// `δ = 1(τ_ee > 0)`.
pub fn point_id_rule(tau_ee: f64) -> Result<RuleResult> {
    if tau_ee.is_nan() {
        return Err(Error::argument("treatment effect is NaN"));
    }
    Ok(RuleResult::new(
        indicator(tau_ee > 0.0),
        Criterion::PointId,
        tau_ee,
    ))
}

/// `δ = 1(E_π[τ_ee] > 0)`.
pub fn bayes_rule(spec: &WelfareSpec, ss: &StateSet, prior: &Prior) -> Result<RuleResult> {
    prior.check_len(ss.len())?;
    let taus: Vec<f64> = ss.states().iter().map(StatePair::tau_ee).collect();
    let delta = indicator(prior.expect(&taus)? > 0.0);
    let welfare = ss
        .states()
        .iter()
        .map(|s| s.welfare(spec, delta))
        .collect::<Result<Vec<_>>>()?;
    let mut out = RuleResult::new(delta, Criterion::Bayes, prior.expect(&welfare)?);
    out.binding = ss.states().to_vec();
    Ok(out)
}

/// `δ = 1(τ_ee(s_w) > 0)` with `s_w = (min ee_a, min ee_b)`.
pub fn maximin_rule(spec: &WelfareSpec, ss: &StateSet) -> Result<RuleResult> {
    let ex = ss.extremes();
    let delta = indicator(ex.worst.tau_ee() > 0.0);
    let mut out = RuleResult::new(delta, Criterion::Maximin, ex.worst.welfare(spec, delta)?);
    out.synthetic = !ex.worst_attained;
    out.binding = vec![ex.worst];
    Ok(out)
}

/// Regret of rule `delta` at the best-for-`a` state: `ee_a(s_a) - ee(δ; s_a)`.
pub fn regret_a(spec: &WelfareSpec, s_a: &StatePair, delta: f64) -> Result<f64> {
    Ok(s_a.ee_a - s_a.welfare(spec, delta)?)
}

/// Regret of rule `delta` at the best-for-`b` state: `ee_b(s_b) - ee(δ; s_b)`.
pub fn regret_b(spec: &WelfareSpec, s_b: &StatePair, delta: f64) -> Result<f64> {
    Ok(s_b.ee_b - s_b.welfare(spec, delta)?)
}

pub const MAX_BISECTION_ITERATIONS: usize = 200;

/// Relative residual tolerance for regret-equalizing roots.
pub const ROOT_TOLERANCE: f64 = 1e-10;

/// Bracket width below which a root is accepted once its residual is small.
pub const BRACKET_TOLERANCE: f64 = 1e-13;

/// Root of a strictly decreasing `h` on `[0, 1]` with `h(0) > 0 > h(1)`.
///
/// Stops once the bracket is narrower than [`BRACKET_TOLERANCE`] and the
/// better end has `|h| ≤ tol`, or when the bracket can no longer be split in
/// `f64`. The bracket end with the smaller residual is returned as
/// `(root, residual)`.
pub fn bisect_decreasing<F>(mut h: F, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut h_lo, mut h_hi) = (h(lo)?, h(hi)?);
    if !(h_lo > 0.0 && h_hi < 0.0) {
        return Err(Error::precondition(format!(
            "root is not bracketed: H(0) = {h_lo}, H(1) = {h_hi}"
        )));
    }
    let best = |lo: f64, h_lo: f64, hi: f64, h_hi: f64| {
        if h_lo.abs() <= h_hi.abs() {
            (lo, h_lo)
        } else {
            (hi, h_hi)
        }
    };
    for _ in 0..MAX_BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(best(lo, h_lo, hi, h_hi));
        }
        let h_mid = h(mid)?;
        if h_mid == 0.0 {
            return Ok((mid, h_mid));
        }
        if h_mid > 0.0 {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
            h_hi = h_mid;
        }
        if hi - lo < BRACKET_TOLERANCE && h_lo.abs().min(h_hi.abs()) <= tol {
            return Ok(best(lo, h_lo, hi, h_hi));
        }
    }
    Err(Error::Solver {
        iterations: MAX_BISECTION_ITERATIONS,
        residual: h_lo.abs().min(h_hi.abs()),
    })
}

/// Minimax-regret rule.
///
/// Returns `δ = 0` when the innovation is never better (`max ee_b ≤
/// min ee_a`), `δ = 1` when it is never worse (`min ee_b ≥ max ee_a`), and
/// otherwise the interior `δ` at which `R_a(δ, s_a) = R_b(δ, s_b)`.
pub fn minimax_regret_rule(spec: &WelfareSpec, ss: &StateSet) -> Result<RuleResult> {
    let ex = ss.extremes();
    let s_a = ex.best_a.clone();
    let s_b = ex.best_b.clone();
    let synthetic = !(ex.best_a_attained && ex.best_b_attained);
    let (delta, worst) = if s_b.ee_b <= s_b.ee_a {
        (0.0, 0.0)
    } else if s_a.ee_b >= s_a.ee_a {
        (1.0, 0.0)
    } else {
        let tol = ROOT_TOLERANCE * ss.scale();
        let (delta, _) = bisect_decreasing(
            |d| Ok(regret_b(spec, &s_b, d)? - regret_a(spec, &s_a, d)?),
            tol,
        )?;
        let worst = regret_a(spec, &s_a, delta)?.max(regret_b(spec, &s_b, delta)?);
        (delta, worst)
    };
    let mut out = RuleResult::new(delta, Criterion::MinimaxRegret, worst);
    out.binding = vec![s_a, s_b];
    out.synthetic = synthetic;
    Ok(out)
}

/// One row of a regret profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretRow {
    pub delta: f64,
    pub regret_a: f64,
    pub regret_b: f64,
    pub worst: f64,
}

/// `R_a(δ, s_a)` and `R_b(δ, s_b)` on `grid` evenly spaced points of
/// `[0, 1]`.
///
/// The curves are the signed differences `ee_a(s_a) - ee(δ; s_a)` and
/// `ee_b(s_b) - ee(δ; s_b)`; when one arm dominates, the dominated curve
/// goes negative.
pub fn regret_profile(spec: &WelfareSpec, ss: &StateSet, grid: usize) -> Result<Vec<RegretRow>> {
    if grid < 2 {
        return Err(Error::argument(format!(
            "regret profile needs at least 2 grid points, got {grid}"
        )));
    }
    let ex = ss.extremes();
    (0..grid)
        .map(|i| {
            let delta = if i + 1 == grid {
                1.0
            } else {
                i as f64 / (grid - 1) as f64
            };
            let regret_a = regret_a(spec, &ex.best_a, delta)?;
            let regret_b = regret_b(spec, &ex.best_b, delta)?;
            Ok(RegretRow {
                delta,
                regret_a,
                regret_b,
                worst: regret_a.max(regret_b),
            })
        })
        .collect()
}
