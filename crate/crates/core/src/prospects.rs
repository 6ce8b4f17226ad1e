//! Prospects (individuals × states outcome matrices), priors over states,
//! and representation-dependent rankings.

use crate::error::{Error, Result};
use crate::welfare::{IncomeVector, WelfareSpec};

/// Outcomes a treatment induces for `n` individuals across `m` states.
#[derive(Debug, Clone, PartialEq)]
pub struct Prospect {
    name: String,
    state_labels: Vec<String>,
    /// Row-major: `rows[i][s]` is individual `i` in state `s`.
    rows: Vec<Vec<f64>>,
}

impl Prospect {
    pub fn new(
        name: impl Into<String>,
        state_labels: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let m = state_labels.len();
        if m == 0 {
            return Err(Error::argument("a prospect needs at least one state"));
        }
        if rows.is_empty() {
            return Err(Error::argument("a prospect needs at least one individual"));
        }
        for row in &rows {
            if row.len() != m {
                return Err(Error::Dimension {
                    expected: m,
                    got: row.len(),
                });
            }
            if let Some(bad) = row.iter().find(|y| !y.is_finite() || **y <= 0.0) {
                return Err(Error::domain(format!(
                    "prospect outcomes must be positive, got {bad}"
                )));
            }
        }
        Ok(Prospect {
            name: name.into(),
            state_labels,
            rows,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_labels(&self) -> &[String] {
        &self.state_labels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn individuals(&self) -> usize {
        self.rows.len()
    }

    pub fn states(&self) -> usize {
        self.state_labels.len()
    }

    /// Income distribution in state `s`.
    pub fn column(&self, s: usize) -> IncomeVector {
        IncomeVector::new(self.rows.iter().map(|r| r[s]).collect())
            .expect("validated at construction")
    }
}

/// Probability weights over a finite state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior(Vec<f64>);

impl Prior {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::argument("prior must have at least one weight"));
        }
        if let Some(bad) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::argument(format!(
                "prior weights must be nonnegative, got {bad}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::argument(format!(
                "prior weights must sum to 1, got {total}"
            )));
        }
        Ok(Prior(weights))
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::argument("prior must have at least one weight"));
        }
        Ok(Prior(vec![1.0 / m as f64; m]))
    }

    pub fn point_mass(m: usize, state: usize) -> Result<Self> {
        if state >= m {
            return Err(Error::Dimension {
                expected: m,
                got: state + 1,
            });
        }
        let mut w = vec![0.0; m];
        w[state] = 1.0;
        Ok(Prior(w))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn check_len(&self, m: usize) -> Result<()> {
        if self.0.len() != m {
            return Err(Error::Dimension {
                expected: m,
                got: self.0.len(),
            });
        }
        Ok(())
    }

    /// `Σ π(s) x(s)`.
    pub fn expect(&self, values: &[f64]) -> Result<f64> {
        self.check_len(values.len())?;
        Ok(self.0.iter().zip(values).map(|(w, x)| w * x).sum())
    }
}

/// How a state's income distribution is summarized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// `f⁻¹(mean f(yᵢ))`, in outcome units.
    EgalitarianEquivalent,
    /// `mean f(yᵢ)`, in transformed units.
    TransformedMean,
    /// Arithmetic mean of outcomes, ignoring `γ`.
    RawMean,
}

/// Per-state summaries of a prospect.
pub fn state_scores(p: &Prospect, spec: &WelfareSpec, rep: Representation) -> Result<Vec<f64>> {
    (0..p.states())
        .map(|s| {
            let col = p.column(s);
            match rep {
                Representation::EgalitarianEquivalent => spec.ee(&col),
                Representation::TransformedMean => {
                    let mut total = 0.0;
                    for &y in col.as_slice() {
                        total += spec.f_eval(y)?;
                    }
                    Ok(total / col.len() as f64)
                }
                Representation::RawMean => Ok(col.mean()),
            }
        })
        .collect()
}

pub fn expected_score(
    p: &Prospect,
    spec: &WelfareSpec,
    rep: Representation,
    prior: &Prior,
) -> Result<f64> {
    prior.check_len(p.states())?;
    prior.expect(&state_scores(p, spec, rep)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedProspect {
    /// Position in the input list.
    pub index: usize,
    pub name: String,
    pub score: f64,
}

fn check_shared_states(ps: &[Prospect], min: usize) -> Result<()> {
    if ps.len() < min {
        return Err(Error::argument(format!(
            "need at least {min} prospect(s), got {}",
            ps.len()
        )));
    }
    let labels = ps[0].state_labels();
    for p in &ps[1..] {
        if p.state_labels() != labels {
            return Err(Error::argument(format!(
                "prospect '{}' does not share the state space of '{}'",
                p.name(),
                ps[0].name()
            )));
        }
    }
    Ok(())
}

/// Prospects in descending order of expected score; ties keep input order.
pub fn rank_prospects(
    ps: &[Prospect],
    spec: &WelfareSpec,
    rep: Representation,
    prior: &Prior,
) -> Result<Vec<RankedProspect>> {
    check_shared_states(ps, 2)?;
    let mut ranked = ps
        .iter()
        .enumerate()
        .map(|(index, p)| {
            Ok(RankedProspect {
                index,
                name: p.name().to_owned(),
                score: expected_score(p, spec, rep, prior)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    // Stable sort keeps input order among equal scores.
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(ranked)
}

/// The prospect with the largest worst-state score; the first such prospect
/// wins ties.
pub fn maximin_choice(
    ps: &[Prospect],
    spec: &WelfareSpec,
    rep: Representation,
) -> Result<RankedProspect> {
    check_shared_states(ps, 1)?;
    let mut best: Option<RankedProspect> = None;
    for (index, p) in ps.iter().enumerate() {
        let worst = state_scores(p, spec, rep)?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if best.as_ref().is_none_or(|b| worst > b.score) {
            best = Some(RankedProspect {
                index,
                name: p.name().to_owned(),
                score: worst,
            });
        }
    }
    Ok(best.expect("at least one prospect"))
}
