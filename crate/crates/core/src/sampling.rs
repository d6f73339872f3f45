//! Seeded random configurations, lattice points and elements.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::Element;
use crate::phases::{IrrationalBasis, LatticePoint, Rational, ThetaData, UnitPhase};

/// Irrational angles available to random configurations.
pub const IRRATIONALS: [f64; 4] = [
    std::f64::consts::SQRT_2,
    1.732_050_807_568_877_2,
    0.618_033_988_749_894_8,
    std::f64::consts::PI - 3.0,
];

pub fn random_point<R: Rng>(rng: &mut R, n: usize, radius: i64) -> LatticePoint {
    LatticePoint((0..n).map(|_| rng.random_range(-radius..=radius)).collect())
}

fn random_rational<R: Rng>(rng: &mut R, max_num: i128, max_den: i128) -> Rational {
    Rational::new(rng.random_range(-max_num..=max_num), rng.random_range(1..=max_den))
}

/// Dimension in `1..=n_max`, rational parts with denominators up to 12 and,
/// on roughly half of the entries, small rational multiples of up to two
/// irrationals.
pub fn random_mixed_theta<R: Rng>(rng: &mut R, n_max: usize) -> ThetaData {
    let n = rng.random_range(1..=n_max);
    let basis_len = rng.random_range(0..=2);
    let basis = IrrationalBasis::new(IRRATIONALS[..basis_len].to_vec());
    let mut entries = Vec::new();
    for k in 2..=n {
        for j in 1..k {
            let r0 = random_rational(rng, 12, 12);
            let mut irr = std::collections::BTreeMap::new();
            for t in 0..basis_len {
                if rng.random_bool(0.5) {
                    let c = random_rational(rng, 3, 3);
                    if c != Rational::from_integer(0) {
                        irr.insert(t, c);
                    }
                }
            }
            let phase = UnitPhase::from_parts(r0, irr).expect("small coefficients cannot overflow");
            entries.push((k, j, phase));
        }
    }
    ThetaData::new(n, basis, entries).expect("entries are strictly lower and in range")
}

/// Exact configuration with one common denominator `d ≤ max_den` for the
/// rational parts and sparse irrational coefficients in `{−1, 0, 1}`.
///
/// Returns the configuration and `d`.
pub fn random_exact_theta<R: Rng>(
    rng: &mut R,
    n_max: usize,
    max_den: i128,
    max_irrationals: usize,
) -> (ThetaData, i128) {
    let n = rng.random_range(1..=n_max);
    let d = rng.random_range(1..=max_den);
    let basis_len = rng.random_range(0..=max_irrationals);
    let basis = IrrationalBasis::new(IRRATIONALS[..basis_len].to_vec());
    let mut entries = Vec::new();
    for k in 2..=n {
        for j in 1..k {
            let r0 = Rational::new(rng.random_range(0..d), d);
            let mut irr = std::collections::BTreeMap::new();
            for t in 0..basis_len {
                if rng.random_bool(0.35) {
                    let sign = if rng.random_bool(0.5) { 1 } else { -1 };
                    irr.insert(t, Rational::from_integer(sign));
                }
            }
            let phase = UnitPhase::from_parts(r0, irr).expect("small coefficients cannot overflow");
            entries.push((k, j, phase));
        }
    }
    let theta = ThetaData::new(n, basis, entries).expect("entries are strictly lower and in range");
    (theta, d)
}

pub fn random_coefficient<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Up to `max_support` terms with coordinates in `[−radius, radius]`.
pub fn random_element<R: Rng>(
    rng: &mut R,
    theta: &Arc<ThetaData>,
    max_support: usize,
    radius: i64,
) -> Element {
    let len = rng.random_range(1..=max_support);
    let terms: Vec<_> = (0..len)
        .map(|_| (random_point(rng, theta.n(), radius), random_coefficient(rng)))
        .collect();
    // repeated points are summed, never rejected
    terms.into_iter().fold(Element::zero(theta.clone()), |acc, (x, c)| {
        acc.add(&Element::from_terms(theta.clone(), [(x, c)]).expect("dimensions match"))
            .expect("same theta")
    })
}
