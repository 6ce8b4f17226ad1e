//! Deterministic inputs for the benchmarks.

use eetreat::{
    BinaryOutcomeSpec, BinaryProblem, EeBounds, SiteParams, StatePair, StateSet, WelfareSpec,
};

/// A state set of `n` pairs spread over a hull where neither arm dominates.
pub fn state_set(n: usize) -> StateSet {
    let states = (0..n)
        .map(|i| {
            let t = i as f64 / n.max(2).saturating_sub(1) as f64;
            StatePair::new(format!("s{i}"), 2.0 + 3.0 * t, 6.0 - 3.5 * t).expect("valid state")
        })
        .collect();
    StateSet::new(states).expect("non-empty")
}

pub fn bounds_rows(gamma: f64) -> Vec<EeBounds> {
    [
        ("hm", (4.1, 9.0), (3.8, 8.6)),
        ("lee", (6.6, 6.6), (6.5, 7.7)),
        ("cf", (6.6, 6.6), (6.8, 7.7)),
    ]
    .into_iter()
    .map(|(s, a, b)| EeBounds::new(s, gamma, a, b).expect("valid bounds"))
    .collect()
}

pub fn binary_problem(gamma: f64) -> BinaryProblem {
    let outcome = BinaryOutcomeSpec::new(0.25, 1.0, WelfareSpec::new(gamma).expect("gamma"))
        .expect("outcome");
    BinaryProblem::new(outcome, 0.5, vec![0.0, 0.5, 1.0]).expect("problem")
}

/// `n` posterior-like draws around a fixed centre.
pub fn draws(n: usize) -> Vec<SiteParams> {
    (0..n)
        .map(|i| {
            let u = (i as f64 + 0.5) / n as f64 - 0.5;
            SiteParams::new(4.0 + u, 0.05 + 0.1 * u, 1.0 + 0.2 * u, 0.1 * u).expect("draw")
        })
        .collect()
}
