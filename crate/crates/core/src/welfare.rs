//! Atkinson-family welfare transforms and egalitarian-equivalent (EE)
//! aggregation.
//!
//! For an inequality-aversion parameter `γ ≥ 0` the transform is
//!
//! ```text
//! f(y) = y^(1-γ) / (1-γ)    γ ≠ 1
//! f(y) = ln y               γ = 1
//! ```
//!
//! and the egalitarian equivalent of a distribution is `f⁻¹(mean f(yᵢ))`:
//! the arithmetic mean at `γ = 0`, the geometric mean at `γ = 1` and the
//! harmonic mean at `γ = 2`.
//!
//! EE values are invariant under affine changes of `f`, so the aggregation
//! routines internally use the shifted form `(y^(1-γ) - 1) / (1-γ)`, which
//! stays well conditioned as `γ` approaches 1. [`WelfareSpec::f_eval`] and
//! [`WelfareSpec::f_inv`] expose the unshifted transform.

use crate::error::{Error, Result};

/// Values of `γ` this close to 1 use the logarithmic branch.
pub const LOG_SNAP_TOLERANCE: f64 = 1e-9;

/// Inequality-aversion parameter of an Atkinson evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelfareSpec {
    gamma: f64,
}

#[derive(Debug, Clone, Copy)]
enum Branch {
    Linear,
    Log,
    /// Carries `c = 1 - γ`.
    Power(f64),
}

impl WelfareSpec {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::argument(format!(
                "inequality aversion must be a finite nonnegative number, got {gamma}"
            )));
        }
        Ok(WelfareSpec { gamma })
    }

    /// The inequality-neutral evaluator, `γ = 0`.
    pub fn neutral() -> Self {
        WelfareSpec { gamma: 0.0 }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Whether `f` is unbounded below at zero, so zero incomes are rejected.
    pub fn requires_positive(&self) -> bool {
        self.gamma >= 1.0 - LOG_SNAP_TOLERANCE
    }

    fn branch(&self) -> Branch {
        if self.gamma == 0.0 {
            Branch::Linear
        } else if (self.gamma - 1.0).abs() < LOG_SNAP_TOLERANCE {
            Branch::Log
        } else {
            Branch::Power(1.0 - self.gamma)
        }
    }

    fn check_income(&self, y: f64) -> Result<()> {
        if !y.is_finite() || y < 0.0 || (y == 0.0 && self.requires_positive()) {
            return Err(Error::domain(format!(
                "income {y} is outside the domain of f for gamma = {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// `f(y)`: `y^(1-γ)/(1-γ)`, or `ln y` at `γ = 1`.
    pub fn f_eval(&self, y: f64) -> Result<f64> {
        self.check_income(y)?;
        Ok(match self.branch() {
            Branch::Linear => y,
            Branch::Log => y.ln(),
            Branch::Power(c) => y.powf(c) / c,
        })
    }

    /// Inverse of [`f_eval`](Self::f_eval).
    pub fn f_inv(&self, z: f64) -> Result<f64> {
        let out_of_range = || {
            Error::domain(format!(
                "{z} is outside the range of f for gamma = {}",
                self.gamma
            ))
        };
        if !z.is_finite() {
            return Err(out_of_range());
        }
        match self.branch() {
            Branch::Linear if z < 0.0 => Err(out_of_range()),
            Branch::Linear => Ok(z),
            Branch::Log => Ok(z.exp()),
            Branch::Power(c) => {
                // c z must be positive (γ < 1 ⇒ z ≥ 0, γ > 1 ⇒ z < 0).
                let cz = c * z;
                if cz < 0.0 || (cz == 0.0 && c < 0.0) {
                    return Err(out_of_range());
                }
                Ok(cz.powf(1.0 / c))
            }
        }
    }

    /// Shifted transform `(y^c - 1)/c`; affine in `f`.
    fn shifted(c: f64, y: f64) -> f64 {
        (c * y.ln()).exp_m1() / c
    }

    fn shifted_inv(c: f64, v: f64) -> f64 {
        let t = (c * v).max(-1.0);
        (t.ln_1p() / c).exp()
    }

    /// Income used to rescale before aggregating. EE is homogeneous of
    /// degree one, and picking the element whose `y^c` term is largest keeps
    /// the mean of the scaled terms at least `1/n` while never overflowing.
    fn reference(c: f64, lo: f64, hi: f64) -> f64 {
        if c > 0.0 {
            hi
        } else {
            lo
        }
    }

    fn aggregate(&self, values: &[f64], lo: f64, hi: f64) -> f64 {
        let n = values.len() as f64;
        match self.branch() {
            Branch::Linear => values.iter().sum::<f64>() / n,
            Branch::Log => (values.iter().map(|y| y.ln()).sum::<f64>() / n).exp(),
            Branch::Power(c) => {
                let r = Self::reference(c, lo, hi);
                if r == 0.0 {
                    return 0.0;
                }
                let mean = values.iter().map(|&y| Self::shifted(c, y / r)).sum::<f64>() / n;
                r * Self::shifted_inv(c, mean)
            }
        }
    }

    /// Egalitarian equivalent `f⁻¹((1/n) Σ f(yᵢ))`.
    ///
    /// The result always lies in `[min yᵢ, max yᵢ]`.
    pub fn ee(&self, incomes: &IncomeVector) -> Result<f64> {
        let values = incomes.as_slice();
        for &y in values {
            self.check_income(y)?;
        }
        let (lo, hi) = incomes.range();
        Ok(self.aggregate(values, lo, hi).clamp(lo, hi))
    }

    /// EE of assigning a fraction `delta` of the population to `b`, given the
    /// per-arm EEs: `f⁻¹(δ f(ee_b) + (1-δ) f(ee_a))`.
    pub fn ee_mixture(&self, ee_a: f64, ee_b: f64, delta: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::argument(format!(
                "treatment fraction must lie in [0, 1], got {delta}"
            )));
        }
        for ee in [ee_a, ee_b] {
            if !ee.is_finite() || ee <= 0.0 {
                return Err(Error::domain(format!(
                    "egalitarian equivalents must be positive and finite, got {ee}"
                )));
            }
        }
        if delta == 0.0 {
            return Ok(ee_a);
        }
        if delta == 1.0 {
            return Ok(ee_b);
        }
        let mixed = match self.branch() {
            Branch::Linear => (1.0 - delta) * ee_a + delta * ee_b,
            Branch::Log => ((1.0 - delta) * ee_a.ln() + delta * ee_b.ln()).exp(),
            Branch::Power(c) => {
                let r = Self::reference(c, ee_a.min(ee_b), ee_a.max(ee_b));
                let v =
                    (1.0 - delta) * Self::shifted(c, ee_a / r) + delta * Self::shifted(c, ee_b / r);
                r * Self::shifted_inv(c, v)
            }
        };
        Ok(mixed.clamp(ee_a.min(ee_b), ee_a.max(ee_b)))
    }

    /// Egalitarian-equivalent treatment effect `ee(y_b) - ee(y_a)`.
    pub fn eete(&self, y_a: &IncomeVector, y_b: &IncomeVector) -> Result<f64> {
        Ok(self.ee(y_b)? - self.ee(y_a)?)
    }
}

/// A nonempty distribution of nonnegative finite incomes.
///
/// Whether zeros are admissible depends on the evaluator, so that check is
/// deferred to [`WelfareSpec::ee`].
#[derive(Debug, Clone, PartialEq)]
pub struct IncomeVector(Vec<f64>);

impl IncomeVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::argument("income vector must be nonempty"));
        }
        if let Some(bad) = values.iter().find(|y| !y.is_finite() || **y < 0.0) {
            return Err(Error::domain(format!(
                "incomes must be nonnegative and finite, got {bad}"
            )));
        }
        Ok(IncomeVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    fn range(&self) -> (f64, f64) {
        self.0
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
                (lo.min(y), hi.max(y))
            })
    }
}

impl TryFrom<Vec<f64>> for IncomeVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        IncomeVector::new(values)
    }
}

impl TryFrom<&[f64]> for IncomeVector {
    type Error = Error;

    fn try_from(values: &[f64]) -> Result<Self> {
        IncomeVector::new(values.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(g: f64) -> WelfareSpec {
        WelfareSpec::new(g).unwrap()
    }

    fn inc(v: &[f64]) -> IncomeVector {
        IncomeVector::try_from(v).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn f_eval_examples() {
        assert_eq!(spec(0.0).f_eval(5.0).unwrap(), 5.0);
        assert!(close(spec(2.0).f_eval(2.0).unwrap(), -0.5, 1e-15));
        assert!(close(
            spec(1.0).f_eval(std::f64::consts::E).unwrap(),
            1.0,
            1e-15
        ));
    }

    #[test]
    fn high_aversion_with_large_incomes() {
        // γ = 10 on (1000, 2000): EE = 1000 · (2 / (1 + 2⁻⁹))^(1/9).
        let ee = spec(10.0)
            .ee(&IncomeVector::new(vec![1000.0, 2000.0]).unwrap())
            .unwrap();
        let exact = 1000.0 * (2.0 / (1.0 + 2f64.powi(-9))).powf(1.0 / 9.0);
        assert!(close(ee, exact, 1e-9), "{ee} vs {exact}");
        let mix = spec(10.0).ee_mixture(1000.0, 2000.0, 0.5).unwrap();
        assert!(close(mix, exact, 1e-9));
        let tiny = spec(0.5)
            .ee(&IncomeVector::new(vec![1e-300, 4e-300]).unwrap())
            .unwrap();
        assert!(close(tiny / 1e-300, 2.25, 1e-12), "{tiny}");
    }

    #[test]
    fn f_eval_rejects_nonpositive_under_log_and_above() {
        assert!(matches!(spec(1.0).f_eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(spec(2.0).f_eval(-1.0), Err(Error::Domain(_))));
        assert!(matches!(spec(0.5).f_eval(-1.0), Err(Error::Domain(_))));
        assert_eq!(spec(0.5).f_eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn f_inv_examples() {
        assert!(close(spec(2.0).f_inv(-0.5).unwrap(), 2.0, 1e-15));
        assert_eq!(spec(0.0).f_inv(7.3).unwrap(), 7.3);
        assert_eq!(spec(1.0).f_inv(0.0).unwrap(), 1.0);
    }

    #[test]
    fn f_inv_rejects_out_of_range() {
        assert!(spec(2.0).f_inv(0.5).is_err());
        assert!(spec(2.0).f_inv(0.0).is_err());
        assert!(spec(0.5).f_inv(-0.1).is_err());
        assert!(spec(0.0).f_inv(-0.1).is_err());
        assert!(spec(1.0).f_inv(f64::NAN).is_err());
    }

    #[test]
    fn gamma_near_one_snaps_to_log() {
        let near = spec(1.0 + 1e-10);
        assert_eq!(near.f_eval(3.0).unwrap(), 3.0f64.ln());
    }

    #[test]
    fn negative_gamma_rejected() {
        assert!(WelfareSpec::new(-0.1).is_err());
        assert!(WelfareSpec::new(f64::NAN).is_err());
    }

    #[test]
    fn ee_examples() {
        let y = inc(&[4.0, 6.0, 5.0]);
        assert!(close(spec(1.0).ee(&y).unwrap(), 4.93, 0.005));
        assert!(close(spec(0.0).ee(&y).unwrap(), 5.0, 1e-14));
        let harmonic = 3.0 / (1.0 / 4.0 + 1.0 / 6.0 + 1.0 / 5.0);
        assert!(close(spec(2.0).ee(&y).unwrap(), harmonic, 1e-12));
        assert!(close(harmonic, 4.8649, 5e-5));
    }

    #[test]
    fn zero_incomes_depend_on_gamma() {
        let y = inc(&[0.0, 4.0]);
        assert!(close(spec(0.0).ee(&y).unwrap(), 2.0, 1e-15));
        // f(y) = 2√y: mean f = (0 + 4)/2 = 2, and f⁻¹(2) = (0.5·2)² = 1.
        assert!(close(spec(0.5).ee(&y).unwrap(), 1.0, 1e-12));
        assert!(spec(1.0).ee(&y).is_err());
        assert!(spec(3.0).ee(&y).is_err());
        assert!(IncomeVector::new(vec![]).is_err());
        assert!(IncomeVector::new(vec![1.0, -2.0]).is_err());
    }

    #[test]
    fn ee_mixture_examples() {
        assert_eq!(spec(2.0).ee_mixture(4.1, 8.6, 0.0).unwrap(), 4.1);
        assert!(close(
            spec(0.0).ee_mixture(5.4, 12.0, 0.5).unwrap(),
            8.7,
            1e-14
        ));
        let h = 1.0 / (0.5 / 8.0 + 0.5 / 4.0);
        assert!(close(
            spec(2.0).ee_mixture(4.0, 8.0, 0.5).unwrap(),
            h,
            1e-12
        ));
        assert!(close(h, 5.3333, 5e-5));
    }

    #[test]
    fn ee_mixture_rejects_bad_delta() {
        assert!(matches!(
            spec(1.0).ee_mixture(1.0, 2.0, 1.5),
            Err(Error::Argument(_))
        ));
        assert!(spec(1.0).ee_mixture(1.0, 2.0, -0.1).is_err());
        assert!(spec(1.0).ee_mixture(1.0, 2.0, f64::NAN).is_err());
    }

    #[test]
    fn eete_examples() {
        assert!(close(
            spec(0.0)
                .eete(&inc(&[2.0, 2.0]), &inc(&[1.0, 3.0]))
                .unwrap(),
            0.0,
            1e-15
        ));
        let t = spec(1.0)
            .eete(&inc(&[4.0, 6.0, 5.0]), &inc(&[3.0, 8.0, 10.0]))
            .unwrap();
        assert!(close(t, 1.28, 0.01));
        let t = spec(2.0)
            .eete(&inc(&[1.0, 3.0]), &inc(&[2.0, 2.0]))
            .unwrap();
        assert!(close(t, 0.5, 1e-12));
    }

    #[test]
    fn ee_of_constant_vector_is_that_constant() {
        for g in [0.0, 0.3, 1.0, 2.0, 7.5] {
            assert_eq!(spec(g).ee(&inc(&[3.7; 5])).unwrap(), 3.7);
        }
    }

    fn gamma_strategy() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.0), Just(1.0), Just(2.0), 0.0f64..6.0]
    }

    fn incomes_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.05f64..200.0, 1..12)
    }

    proptest! {
        #[test]
        fn ee_is_bracketed(g in gamma_strategy(), v in incomes_strategy()) {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(0.0, f64::max);
            let e = spec(g).ee(&inc(&v)).unwrap();
            prop_assert!(lo <= e && e <= hi);
        }

        #[test]
        fn jensen_dominance(g in 0.05f64..6.0, v in prop::collection::vec(0.05f64..200.0, 2..12)) {
            let y = inc(&v);
            prop_assume!(v.iter().any(|x| (x - v[0]).abs() > 1e-3 * v[0]));
            prop_assert!(spec(g).ee(&y).unwrap() < y.mean());
        }

        #[test]
        fn round_trip(g in gamma_strategy(), y in 0.01f64..100.0) {
            prop_assume!((g - 1.0).abs() >= 0.01 || (g - 1.0).abs() < LOG_SNAP_TOLERANCE);
            let s = spec(g);
            let back = s.f_inv(s.f_eval(y).unwrap()).unwrap();
            prop_assert!((back - y).abs() <= 1e-12 * y, "{} vs {}", back, y);
        }

        #[test]
        fn mixture_monotone_in_delta(
            g in gamma_strategy(),
            a in 0.1f64..50.0,
            b in 0.1f64..50.0,
            d1 in 0.0f64..1.0,
            d2 in 0.0f64..1.0,
        ) {
            prop_assume!((a - b).abs() > 1e-3 && (d1 - d2).abs() > 1e-6);
            let s = spec(g);
            let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            let m_lo = s.ee_mixture(a, b, lo).unwrap();
            let m_hi = s.ee_mixture(a, b, hi).unwrap();
            if b > a {
                prop_assert!(m_lo < m_hi);
            } else {
                prop_assert!(m_lo > m_hi);
            }
        }
    }
}
