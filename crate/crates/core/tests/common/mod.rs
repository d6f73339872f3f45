#![allow(dead_code)]

use std::sync::Arc;

use nctorus::phases::{LatticePoint, ThetaData};
use nctorus::sampling::{random_element, random_mixed_theta};
use nctorus::Element;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random mixed rational/irrational configuration with `n ≤ n_max`.
pub fn theta(n_max: usize) -> impl Strategy<Value = Arc<ThetaData>> {
    any::<u64>().prop_map(move |s| Arc::new(random_mixed_theta(&mut rng(s), n_max)))
}

pub fn point(n: usize, radius: i64) -> impl Strategy<Value = LatticePoint> {
    prop::collection::vec(-radius..=radius, n).prop_map(LatticePoint)
}

/// A configuration together with `count` points of matching dimension.
pub fn theta_with_points(
    n_max: usize,
    count: usize,
    radius: i64,
) -> impl Strategy<Value = (Arc<ThetaData>, Vec<LatticePoint>)> {
    theta(n_max).prop_flat_map(move |t| {
        let n = t.n();
        (Just(t), prop::collection::vec(point(n, radius), count))
    })
}

/// A configuration together with `count` random elements on it.
pub fn theta_with_elements(
    n_max: usize,
    count: usize,
    support: usize,
    radius: i64,
) -> impl Strategy<Value = (Arc<ThetaData>, Vec<Element>)> {
    (theta(n_max), any::<u64>()).prop_map(move |(t, s)| {
        let mut r = rng(s);
        let elements = (0..count).map(|_| random_element(&mut r, &t, support, radius)).collect();
        (t, elements)
    })
}

/// `max |a − b|` scaled by the larger `ℓ¹` norm, floored at 1.
pub fn rel_diff(a: &Element, b: &Element) -> f64 {
    a.max_abs_diff(b) / a.l1_norm().max(b.l1_norm()).max(1.0)
}

/// Proptest settings without regression files, which need a `src/` layout.
pub fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}
