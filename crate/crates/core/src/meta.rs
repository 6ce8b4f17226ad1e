//! Lognormal outcome model: closed-form egalitarian equivalents, posterior
//! draw summaries, the plug-in rule and a Monte Carlo check of its
//! large-sample agreement with the infeasible rule.
//!
//! Within a site, log outcomes are normal with location `μ` and scale `σ`
//! under the status quo, and location `μ + ζ` and scale `σλ` under the
//! innovation. For Atkinson welfare the EE of a lognormal population is
//!
//! ```text
//! EE = exp(m + (1 - γ) s² / 2)
//! ```
//!
//! for log-location `m` and log-scale `s`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rules::{point_id_rule, RuleResult};
use crate::welfare::WelfareSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Control,
    Treated,
}

/// One site's lognormal parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteParams {
    pub mu: f64,
    pub zeta: f64,
    pub sigma: f64,
    pub lambda: f64,
}

impl SiteParams {
    pub fn new(mu: f64, zeta: f64, sigma: f64, lambda: f64) -> Result<Self> {
        let p = SiteParams {
            mu,
            zeta,
            sigma,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.zeta.is_finite()) {
            return Err(Error::domain("log locations must be finite"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::domain(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::domain(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    pub fn log_location(&self, arm: Arm) -> f64 {
        match arm {
            Arm::Control => self.mu,
            Arm::Treated => self.mu + self.zeta,
        }
    }

    pub fn log_scale(&self, arm: Arm) -> f64 {
        match arm {
            Arm::Control => self.sigma,
            Arm::Treated => self.sigma * self.lambda,
        }
    }
}

/// Closed-form EE of the lognormal outcome distribution of one arm.
pub fn ee_lognormal(spec: &WelfareSpec, p: &SiteParams, arm: Arm) -> f64 {
    let s = p.log_scale(arm);
    (p.log_location(arm) + 0.5 * (1.0 - spec.gamma()) * s * s).exp()
}

/// Mean and egalitarian-equivalent treatment effects at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauPair {
    pub tau: f64,
    pub tau_ee: f64,
}

pub fn tau_pair(spec: &WelfareSpec, p: &SiteParams) -> TauPair {
    let neutral = WelfareSpec::neutral();
    TauPair {
        tau: ee_lognormal(&neutral, p, Arm::Treated) - ee_lognormal(&neutral, p, Arm::Control),
        tau_ee: ee_lognormal(spec, p, Arm::Treated) - ee_lognormal(spec, p, Arm::Control),
    }
}

/// Posterior draws of one site's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    pub site: String,
    pub draws: Vec<SiteParams>,
}

impl PosteriorDraws {
    pub fn new(site: impl Into<String>, draws: Vec<SiteParams>) -> Result<Self> {
        let site = site.into();
        if draws.is_empty() {
            return Err(Error::argument(format!("site '{site}' has no draws")));
        }
        for d in &draws {
            d.validate()?;
        }
        Ok(PosteriorDraws { site, draws })
    }

    /// Component-wise posterior mean, the natural plug-in point estimate.
    pub fn posterior_mean(&self) -> SiteParams {
        let mean =
            |get: fn(&SiteParams) -> f64| order_free_mean(self.draws.iter().map(get).collect());
        SiteParams {
            mu: mean(|p| p.mu),
            zeta: mean(|p| p.zeta),
            sigma: mean(|p| p.sigma),
            lambda: mean(|p| p.lambda),
        }
    }
}

/// Mean that does not depend on the order of its inputs: values are sorted
/// before a compensated sum.
fn order_free_mean(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in &values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    (sum + comp) / values.len() as f64
}

/// Posterior summaries of one site.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaSummary {
    pub site: String,
    pub mean_tau: f64,
    pub prob_tau_pos: f64,
    pub mean_tau_ee: f64,
    pub prob_tau_ee_pos: f64,
    pub units: String,
}

impl MetaSummary {
    /// Bayes-optimal assignment, `1(E[τ_ee] > 0)`.
    pub fn bayes_delta(&self) -> f64 {
        if self.mean_tau_ee > 0.0 {
            1.0
        } else {
            0.0
        }
    }
}

pub fn summarize_posterior(spec: &WelfareSpec, d: &PosteriorDraws) -> Result<MetaSummary> {
    if d.draws.is_empty() {
        return Err(Error::argument(format!("site '{}' has no draws", d.site)));
    }
    let pairs: Vec<TauPair> = d.draws.iter().map(|p| tau_pair(spec, p)).collect();
    let n = pairs.len() as f64;
    let positive = |f: fn(&TauPair) -> f64| pairs.iter().filter(|t| f(t) > 0.0).count() as f64 / n;
    Ok(MetaSummary {
        site: d.site.clone(),
        mean_tau: order_free_mean(pairs.iter().map(|t| t.tau).collect()),
        prob_tau_pos: positive(|t| t.tau),
        mean_tau_ee: order_free_mean(pairs.iter().map(|t| t.tau_ee).collect()),
        prob_tau_ee_pos: positive(|t| t.tau_ee),
        units: "outcome units".to_owned(),
    })
}

/// `δ = 1(τ_ee(point) > 0)`.
pub fn plugin_rule(spec: &WelfareSpec, point: &SiteParams) -> Result<RuleResult> {
    point_id_rule(tau_pair(spec, point).tau_ee)
}

/// Arm-wise maximum-likelihood estimate from log outcomes.
///
/// Returns `None` when either arm has zero sample variance.
pub fn estimate_site(log_control: &[f64], log_treated: &[f64]) -> Option<SiteParams> {
    let moments = |xs: &[f64]| {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
        (m, v.sqrt())
    };
    let (m_a, s_a) = moments(log_control);
    let (m_b, s_b) = moments(log_treated);
    SiteParams::new(m_a, m_b - m_a, s_a, s_b / s_a).ok()
}

/// Input to [`finite_sample_sim`]; also the JSON schema of the simulation
/// config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(default)]
    pub gamma: Option<f64>,
    pub truth: SiteParams,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementRow {
    pub sample_size: usize,
    pub replications: usize,
    pub agreements: usize,
    pub skipped: usize,
}

impl AgreementRow {
    /// Agreement among non-skipped replications.
    pub fn rate(&self) -> f64 {
        let valid = self.replications - self.skipped;
        if valid == 0 {
            f64::NAN
        } else {
            self.agreements as f64 / valid as f64
        }
    }
}

/// RNG for one replication. Streams are keyed by (sample-size index,
/// replication) so results do not depend on evaluation order.
fn replication_rng(seed: u64, size_index: usize, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((size_index as u64) << 32) | rep as u64);
    rng
}

/// How often the plug-in rule on simulated samples of size `t` picks the
/// same treatment as the infeasible rule at the true parameters.
///
/// Each sample splits `t` between the arms (`t/2` control, the rest treated).
pub fn finite_sample_sim(
    spec: &WelfareSpec,
    truth: &SiteParams,
    sample_sizes: &[usize],
    replications: usize,
    seed: u64,
) -> Result<Vec<AgreementRow>> {
    truth.validate()?;
    if replications == 0 {
        return Err(Error::argument("need at least one replication"));
    }
    if let Some(bad) = sample_sizes.iter().find(|&&t| t < 4) {
        return Err(Error::argument(format!(
            "sample sizes must be at least 4, got {bad}"
        )));
    }
    let target = point_id_rule(tau_pair(spec, truth).tau_ee)?.delta;
    let mut rows = Vec::with_capacity(sample_sizes.len());
    let mut control = Vec::new();
    let mut treated = Vec::new();
    for (ti, &t) in sample_sizes.iter().enumerate() {
        let n_a = t / 2;
        let n_b = t - n_a;
        let mut row = AgreementRow {
            sample_size: t,
            replications,
            agreements: 0,
            skipped: 0,
        };
        for rep in 0..replications {
            let mut rng = replication_rng(seed, ti, rep);
            control.clear();
            treated.clear();
            let (loc_a, sc_a) = (
                truth.log_location(Arm::Control),
                truth.log_scale(Arm::Control),
            );
            let (loc_b, sc_b) = (
                truth.log_location(Arm::Treated),
                truth.log_scale(Arm::Treated),
            );
            control.extend((0..n_a).map(|_| loc_a + sc_a * rng.sample::<f64, _>(StandardNormal)));
            treated.extend((0..n_b).map(|_| loc_b + sc_b * rng.sample::<f64, _>(StandardNormal)));
            match estimate_site(&control, &treated) {
                Some(est) => {
                    if plugin_rule(spec, &est)?.delta == target {
                        row.agreements += 1;
                    }
                }
                None => row.skipped += 1,
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
