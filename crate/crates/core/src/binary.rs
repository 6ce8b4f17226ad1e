//! Status quo versus innovation with binary outcomes.
//!
//! Every individual ends up with either `p_low` or `p_high`. A distribution
//! is summarized by its success share `P ∈ [0, 1]`, and the evaluator's
//! transform is normalized so that `f(p_low) = 0` and `f(p_high) = 1`,
//! which makes the egalitarian equivalent of a share `P` simply `f⁻¹(P)`.
//! The status quo's share `p_a` is known; the innovation's share is only
//! known to lie in a finite set of candidate states.
//!
//! The inequality-neutral evaluator works with shares directly; the
//! inequality-averse one works with `f⁻¹` of shares.

use crate::error::{Error, Result};
use crate::prospects::Prior;
use crate::rules::{bisect_decreasing, Criterion, RuleResult, StatePair, ROOT_TOLERANCE};
use crate::welfare::WelfareSpec;

/// Which evaluator to solve for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluator {
    /// Inequality neutral: welfare is the success share.
    Neutral,
    /// Inequality averse: welfare is the egalitarian equivalent.
    Averse,
}

impl Evaluator {
    pub fn label(&self) -> &'static str {
        match self {
            Evaluator::Neutral => "neutral",
            Evaluator::Averse => "averse",
        }
    }
}

/// The two outcome levels and the evaluator's aversion to inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryOutcomeSpec {
    p_low: f64,
    p_high: f64,
    welfare: WelfareSpec,
}

impl BinaryOutcomeSpec {
    pub fn new(p_low: f64, p_high: f64, welfare: WelfareSpec) -> Result<Self> {
        if !(p_low > 0.0 && p_low < p_high && p_high <= 1.0) {
            return Err(Error::argument(format!(
                "outcome levels must satisfy 0 < p_low < p_high <= 1, got {p_low} and {p_high}"
            )));
        }
        Ok(BinaryOutcomeSpec {
            p_low,
            p_high,
            welfare,
        })
    }

    pub fn p_low(&self) -> f64 {
        self.p_low
    }

    pub fn p_high(&self) -> f64 {
        self.p_high
    }

    pub fn welfare(&self) -> &WelfareSpec {
        &self.welfare
    }

    /// Egalitarian equivalent of a population with success share `share`.
    ///
    /// Equals `p_low` at 0 and `p_high` at 1; in between it is the EE
    /// mixture of the two levels, which is where the affine normalization
    /// of `f` drops out.
    pub fn ee(&self, share: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&share) {
            return Err(Error::argument(format!(
                "success share must lie in [0, 1], got {share}"
            )));
        }
        self.welfare.ee_mixture(self.p_low, self.p_high, share)
    }

    /// Welfare of a population with success share `share` for `evaluator`.
    pub fn welfare_of(&self, evaluator: Evaluator, share: f64) -> Result<f64> {
        match evaluator {
            Evaluator::Neutral => {
                self.ee(share)?;
                Ok(share)
            }
            Evaluator::Averse => self.ee(share),
        }
    }
}

/// `f⁻¹(share)` for the normalized transform.
pub fn ee_binary(outcome: &BinaryOutcomeSpec, share: f64) -> Result<f64> {
    outcome.ee(share)
}

/// Known status-quo share and candidate innovation shares.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryProblem {
    pub outcome: BinaryOutcomeSpec,
    pub p_a: f64,
    pub p_b_states: Vec<f64>,
}

impl BinaryProblem {
    pub fn new(outcome: BinaryOutcomeSpec, p_a: f64, p_b_states: Vec<f64>) -> Result<Self> {
        if !(p_a > 0.0 && p_a < 1.0) {
            return Err(Error::argument(format!(
                "status-quo success share must lie in (0, 1), got {p_a}"
            )));
        }
        if p_b_states.is_empty() {
            return Err(Error::argument("need at least one innovation state"));
        }
        if let Some(bad) = p_b_states.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::argument(format!(
                "innovation success shares must lie in [0, 1], got {bad}"
            )));
        }
        Ok(BinaryProblem {
            outcome,
            p_a,
            p_b_states,
        })
    }

    /// Success share of rule `delta` in a state where the innovation has
    /// share `p_b`: `p_a + (p_b - p_a) δ`.
    pub fn share(&self, p_b: f64, delta: f64) -> f64 {
        (self.p_a + (p_b - self.p_a) * delta).clamp(0.0, 1.0)
    }

    /// Welfare of rule `delta` in the state with innovation share `p_b`.
    pub fn welfare(&self, evaluator: Evaluator, p_b: f64, delta: f64) -> Result<f64> {
        self.outcome.welfare_of(evaluator, self.share(p_b, delta))
    }

    fn has_state(&self, p: f64) -> bool {
        self.p_b_states.contains(&p)
    }

    /// State pairs `(ee(p_a), ee(p_b^s))` for the general rules.
    pub fn state_pairs(&self) -> Result<Vec<StatePair>> {
        let ee_a = self.outcome.ee(self.p_a)?;
        self.p_b_states
            .iter()
            .map(|&p| StatePair::new(format!("p_b={p}"), ee_a, self.outcome.ee(p)?))
            .collect()
    }
}

/// Binding state reported in outcome units (always positive since
/// `p_low > 0`).
fn pair(problem: &BinaryProblem, p_b: f64) -> Result<StatePair> {
    StatePair::new(
        format!("p_b={p_b}"),
        problem.outcome.ee(problem.p_a)?,
        problem.outcome.ee(p_b)?,
    )
}

/// Bayes rule: accept the innovation (`δ = 1`) iff its expected welfare
/// beats the status quo.
pub fn bayes_binary(
    problem: &BinaryProblem,
    prior: &Prior,
    evaluator: Evaluator,
) -> Result<RuleResult> {
    prior.check_len(problem.p_b_states.len())?;
    let innovation = problem
        .p_b_states
        .iter()
        .map(|&p| problem.outcome.welfare_of(evaluator, p))
        .collect::<Result<Vec<_>>>()?;
    let expected_b = prior.expect(&innovation)?;
    let status_quo = problem.outcome.welfare_of(evaluator, problem.p_a)?;
    let accept = expected_b > status_quo;
    Ok(RuleResult {
        delta: if accept { 1.0 } else { 0.0 },
        criterion: Criterion::Bayes,
        value: if accept { expected_b } else { status_quo },
        binding: Vec::new(),
        synthetic: false,
    })
}

/// Minimax-regret rule with the extreme states `p_b = 0` and `p_b = 1`.
///
/// The neutral evaluator's solution is `1 - p_a`. The averse evaluator's
/// solution equalizes the regret in the two extreme states:
///
/// ```text
/// p_high - f⁻¹(p_a + (1 - p_a) δ) = f⁻¹(p_a) - f⁻¹(p_a (1 - δ))
/// ```
pub fn minimax_regret_binary(problem: &BinaryProblem, evaluator: Evaluator) -> Result<RuleResult> {
    if !(problem.has_state(0.0) && problem.has_state(1.0)) {
        return Err(Error::precondition(
            "minimax regret needs the extreme innovation states p_b = 0 and p_b = 1",
        ));
    }
    let binding = vec![pair(problem, 0.0)?, pair(problem, 1.0)?];
    let p_a = problem.p_a;
    let (delta, value) = match evaluator {
        Evaluator::Neutral => {
            let delta = 1.0 - p_a;
            (delta, p_a * delta)
        }
        Evaluator::Averse => {
            let out = &problem.outcome;
            let ee_a = out.ee(p_a)?;
            let regret_best = |d: f64| Ok(out.p_high() - out.ee((p_a + (1.0 - p_a) * d).min(1.0))?);
            let regret_worst = |d: f64| Ok(ee_a - out.ee((p_a * (1.0 - d)).max(0.0))?);
            let (delta, _) = bisect_decreasing(
                |d| Ok(regret_best(d)? - regret_worst(d)?),
                ROOT_TOLERANCE * out.p_high(),
            )?;
            let worst: f64 = regret_best(delta)?.max(regret_worst(delta)?);
            (delta, worst)
        }
    };
    Ok(RuleResult {
        delta,
        criterion: Criterion::MinimaxRegret,
        value,
        binding,
        synthetic: false,
    })
}

/// Maximin rule. Both evaluators agree because `f⁻¹` is monotone: treat
/// everyone only if the innovation beats the status quo even in its worst
/// state.
pub fn maximin_binary(problem: &BinaryProblem, evaluator: Evaluator) -> Result<RuleResult> {
    let worst_b = problem
        .p_b_states
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let delta = if worst_b > problem.p_a { 1.0 } else { 0.0 };
    Ok(RuleResult {
        delta,
        criterion: Criterion::Maximin,
        value: problem.welfare(evaluator, worst_b, delta)?,
        binding: vec![pair(problem, worst_b)?],
        synthetic: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{minimax_regret_rule, StateSet};
    use proptest::prelude::*;

    fn outcome(g: f64, lo: f64, hi: f64) -> BinaryOutcomeSpec {
        BinaryOutcomeSpec::new(lo, hi, WelfareSpec::new(g).unwrap()).unwrap()
    }

    fn problem(g: f64, p_a: f64, states: &[f64]) -> BinaryProblem {
        BinaryProblem::new(outcome(g, 0.25, 1.0), p_a, states.to_vec()).unwrap()
    }

    /// Brute-force optimizer over an evenly spaced δ grid.
    fn grid_argopt(points: usize, mut objective: impl FnMut(f64) -> f64, maximize: bool) -> f64 {
        let mut best = (0.0, objective(0.0));
        for i in 1..points {
            let d = i as f64 / (points - 1) as f64;
            let v = objective(d);
            if (maximize && v > best.1) || (!maximize && v < best.1) {
                best = (d, v);
            }
        }
        best.0
    }

    #[test]
    fn ee_binary_examples() {
        let o = outcome(1.0, 0.25, 1.0);
        assert_eq!(ee_binary(&o, 0.0).unwrap(), 0.25);
        assert_eq!(ee_binary(&o, 1.0).unwrap(), 1.0);
        assert!((ee_binary(&o, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(ee_binary(&o, 1.1).is_err());
    }

    #[test]
    fn ee_binary_matches_normalized_transform() {
        // Direct oracle: f(y) = (g(y) - g(lo)) / (g(hi) - g(lo)).
        for g in [0.5, 2.0, 3.5] {
            let o = outcome(g, 0.2, 0.9);
            let c = 1.0 - g;
            let gt = |y: f64| y.powf(c) / c;
            let g_inv = |z: f64| (c * z).powf(1.0 / c);
            for share in [0.1, 0.37, 0.8] {
                let direct = g_inv(gt(0.2) + share * (gt(0.9) - gt(0.2)));
                assert!((ee_binary(&o, share).unwrap() - direct).abs() < 1e-12);
                assert!(ee_binary(&o, share).unwrap() < 0.2 + share * 0.7);
            }
        }
    }

    #[test]
    fn outcome_validation() {
        let w = WelfareSpec::new(1.0).unwrap();
        assert!(BinaryOutcomeSpec::new(0.0, 1.0, w).is_err());
        assert!(BinaryOutcomeSpec::new(0.5, 0.5, w).is_err());
        assert!(BinaryOutcomeSpec::new(0.5, 1.2, w).is_err());
        let o = outcome(1.0, 0.25, 1.0);
        assert!(BinaryProblem::new(o, 1.0, vec![0.0, 1.0]).is_err());
        assert!(BinaryProblem::new(o, 0.5, vec![]).is_err());
        assert!(BinaryProblem::new(o, 0.5, vec![1.5]).is_err());
    }

    #[test]
    fn bayes_examples() {
        let p = problem(1.0, 0.5, &[0.0, 1.0]);
        let prior = Prior::new(vec![0.4, 0.6]).unwrap();
        assert_eq!(
            bayes_binary(&p, &prior, Evaluator::Neutral).unwrap().delta,
            1.0
        );
        let ia = bayes_binary(&p, &prior, Evaluator::Averse).unwrap();
        assert_eq!(ia.delta, 1.0);
        let oracle = grid_argopt(
            10_001,
            |d| {
                0.4 * p.welfare(Evaluator::Averse, 0.0, d).unwrap()
                    + 0.6 * p.welfare(Evaluator::Averse, 1.0, d).unwrap()
            },
            true,
        );
        assert_eq!(oracle, 1.0);

        let tie = problem(1.0, 0.5, &[0.5]);
        let point = Prior::new(vec![1.0]).unwrap();
        assert_eq!(
            bayes_binary(&tie, &point, Evaluator::Neutral)
                .unwrap()
                .delta,
            0.0
        );
        assert!(bayes_binary(&p, &point, Evaluator::Neutral).is_err());
    }

    #[test]
    fn averse_bayes_accepts_where_neutral_rejects() {
        // E[p_b] = 0.45 < p_a = 0.5, but E[f⁻¹(p_b)] = 0.55·0.25 + 0.45·1
        // = 0.5875 > f⁻¹(0.5) = 0.5.
        let p = problem(1.0, 0.5, &[0.0, 1.0]);
        let prior = Prior::new(vec![0.55, 0.45]).unwrap();
        assert_eq!(
            bayes_binary(&p, &prior, Evaluator::Neutral).unwrap().delta,
            0.0
        );
        assert_eq!(
            bayes_binary(&p, &prior, Evaluator::Averse).unwrap().delta,
            1.0
        );
    }

    #[test]
    fn minimax_regret_examples() {
        let p = problem(1.0, 0.5, &[0.0, 1.0]);
        assert_eq!(
            minimax_regret_binary(&p, Evaluator::Neutral).unwrap().delta,
            0.5
        );
        let ia = minimax_regret_binary(&p, Evaluator::Averse).unwrap();
        assert!(ia.delta > 0.5 && ia.delta < 1.0);
        let worst = |d: f64| {
            [0.0, 1.0]
                .iter()
                .map(|&pb| {
                    let best = p
                        .welfare(Evaluator::Averse, pb, 0.0)
                        .unwrap()
                        .max(p.welfare(Evaluator::Averse, pb, 1.0).unwrap());
                    best - p.welfare(Evaluator::Averse, pb, d).unwrap()
                })
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let oracle = grid_argopt(1_000_001, worst, false);
        assert!(
            (ia.delta - oracle).abs() < 1e-4,
            "{} vs {}",
            ia.delta,
            oracle
        );

        let near_one = problem(1.0, 1.0 - 1e-9, &[0.0, 1.0]);
        assert!(
            minimax_regret_binary(&near_one, Evaluator::Neutral)
                .unwrap()
                .delta
                < 1e-8
        );
    }

    #[test]
    fn minimax_regret_needs_extreme_states() {
        let p = problem(1.0, 0.5, &[0.2, 1.0]);
        assert!(matches!(
            minimax_regret_binary(&p, Evaluator::Averse),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn averse_solution_agrees_with_general_rule() {
        for g in [0.5, 1.0, 2.0, 4.0] {
            let p = problem(g, 0.3, &[0.0, 0.6, 1.0]);
            let direct = minimax_regret_binary(&p, Evaluator::Averse).unwrap().delta;
            let ss = StateSet::new(p.state_pairs().unwrap()).unwrap();
            let general = minimax_regret_rule(&WelfareSpec::new(g).unwrap(), &ss)
                .unwrap()
                .delta;
            assert!((direct - general).abs() < 1e-8, "{direct} vs {general}");
        }
    }

    #[test]
    fn maximin_examples() {
        for p_a in [0.5, 0.9] {
            let p = problem(1.0, p_a, &[0.0, 1.0]);
            for e in [Evaluator::Neutral, Evaluator::Averse] {
                assert_eq!(maximin_binary(&p, e).unwrap().delta, 0.0);
            }
        }
        let dominant = problem(1.0, 0.3, &[0.4, 0.9]);
        for e in [Evaluator::Neutral, Evaluator::Averse] {
            let r = maximin_binary(&dominant, e).unwrap();
            assert_eq!(r.delta, 1.0);
            let oracle = grid_argopt(
                1001,
                |d| {
                    [0.4, 0.9]
                        .iter()
                        .map(|&pb| dominant.welfare(e, pb, d).unwrap())
                        .fold(f64::INFINITY, f64::min)
                },
                true,
            );
            assert_eq!(oracle, 1.0);
        }
    }

    #[test]
    fn neutral_evaluator_at_zero_gamma_matches_averse() {
        let p = problem(0.0, 0.4, &[0.0, 1.0]);
        let a = minimax_regret_binary(&p, Evaluator::Averse).unwrap().delta;
        assert!((a - 0.6).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn equalized_regret_residual(
            g in 0.05f64..5.0,
            lo_frac in 0.05f64..0.95,
            hi in 0.1f64..=1.0,
            p_a in 0.01f64..0.99,
        ) {
            let o = BinaryOutcomeSpec::new(lo_frac * hi, hi, WelfareSpec::new(g).unwrap()).unwrap();
            let p = BinaryProblem::new(o, p_a, vec![0.0, 1.0]).unwrap();
            let r = minimax_regret_binary(&p, Evaluator::Averse).unwrap();
            let lhs = hi - o.ee(p_a + (1.0 - p_a) * r.delta).unwrap();
            let rhs = o.ee(p_a).unwrap() - o.ee(p_a * (1.0 - r.delta)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * hi);
            prop_assert!(r.delta > 1.0 - p_a);
        }
    }
}
