mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::{rel_diff, theta_with_elements, theta_with_points};
use nctorus::phases::{LatticePoint, ThetaData};
use nctorus::sampling::random_element;
use nctorus::weights::Weight;
use nctorus::Element;
use num_complex::Complex64;
use proptest::prelude::*;

fn weights() -> Vec<Weight> {
    vec![
        Weight::one(),
        Weight::polynomial(1.5),
        Weight::subexponential(0.7, 0.5),
        Weight::exponential(0.3),
        Weight::product(vec![Weight::polynomial(1.0), Weight::exponential(0.1)]),
    ]
}

/// Plain convolution on `Z^n`, independent of the library.
fn direct_convolution(f: &Element, g: &Element) -> BTreeMap<Vec<i64>, Complex64> {
    let mut out: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
    for (y, a) in f.iter() {
        for (z, b) in g.iter() {
            let x: Vec<i64> = y.0.iter().zip(&z.0).map(|(p, q)| p + q).collect();
            *out.entry(x).or_default() += a * b;
        }
    }
    out
}

proptest! {
    #![proptest_config(common::cases(300))]

    #[test]
    fn associativity((_, e) in theta_with_elements(4, 3, 8, 4)) {
        let lhs = e[0].convolve(&e[1]).unwrap().convolve(&e[2]).unwrap();
        let rhs = e[0].convolve(&e[1].convolve(&e[2]).unwrap()).unwrap();
        prop_assert!(rel_diff(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn involution_reverses_products((_, e) in theta_with_elements(4, 2, 8, 4)) {
        let lhs = e[0].convolve(&e[1]).unwrap().involution().unwrap();
        let rhs = e[1].involution().unwrap().convolve(&e[0].involution().unwrap()).unwrap();
        prop_assert!(rel_diff(&lhs, &rhs) <= 1e-12);
        prop_assert!(rel_diff(&e[0].involution().unwrap().involution().unwrap(), &e[0]) <= 1e-14);
    }

    #[test]
    fn involution_is_conjugate_linear_and_isometric(
        (_, e) in theta_with_elements(4, 2, 8, 4),
        re in -2.0f64..2.0,
        im in -2.0f64..2.0,
    ) {
        let c = Complex64::new(re, im);
        let lhs = e[0].scale(c).add(&e[1]).unwrap().involution().unwrap();
        let rhs = e[0].involution().unwrap().scale(c.conj()).add(&e[1].involution().unwrap()).unwrap();
        prop_assert!(rel_diff(&lhs, &rhs) <= 1e-14);
        let star = e[0].involution().unwrap();
        for v in weights() {
            let (a, b) = (star.weighted_norm(&v), e[0].weighted_norm(&v));
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }
    }

    #[test]
    fn weighted_norm_is_submultiplicative((_, e) in theta_with_elements(3, 2, 8, 5)) {
        let fg = e[0].convolve(&e[1]).unwrap();
        for v in weights() {
            let bound = e[0].weighted_norm(&v) * e[1].weighted_norm(&v);
            prop_assert!(fg.weighted_norm(&v) <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn shifts_are_unitary((theta, pts) in theta_with_points(5, 1, 30)) {
        let d = Element::delta(theta.clone(), pts[0].clone()).unwrap();
        let one = Element::unit(theta);
        let s = d.involution().unwrap();
        prop_assert!(d.convolve(&s).unwrap().max_abs_diff(&one) <= 1e-15);
        prop_assert!(s.convolve(&d).unwrap().max_abs_diff(&one) <= 1e-15);
    }

    #[test]
    fn untwisted_convolution_is_plain(seed in any::<u64>(), n in 1usize..=4) {
        let theta = Arc::new(ThetaData::commutative(n));
        let mut r = common::rng(seed);
        let f = random_element(&mut r, &theta, 10, 4);
        let g = random_element(&mut r, &theta, 10, 4);
        let expected = direct_convolution(&f, &g);
        let got = f.convolve(&g).unwrap();
        for (x, c) in &expected {
            prop_assert!((got.get(&LatticePoint(x.clone())) - c).norm() <= 1e-12);
        }
        for (x, _) in got.iter() {
            prop_assert!(expected.contains_key(&x.0));
        }
    }

    #[test]
    fn l1_norm_is_submultiplicative((_, e) in theta_with_elements(4, 2, 10, 4)) {
        let fg = e[0].convolve(&e[1]).unwrap();
        prop_assert!(fg.l1_norm() <= e[0].l1_norm() * e[1].l1_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn powers_agree_with_repeated_products((_, e) in theta_with_elements(3, 1, 4, 2), k in 0u32..6) {
        let mut expected = Element::unit(e[0].theta().clone());
        for _ in 0..k {
            expected = expected.convolve(&e[0]).unwrap();
        }
        prop_assert!(rel_diff(&e[0].power(k).unwrap(), &expected) <= 1e-11);
    }
}

#[test]
fn element_files_round_trip() {
    let theta = Arc::new(ThetaData::rational(2, &[(2, 1, 1, 4)]).unwrap());
    let f = random_element(&mut common::rng(5), &theta, 12, 3);
    let text = serde_json::to_string(&f).unwrap();
    assert_eq!(Element::from_json(theta.clone(), &text).unwrap(), f);
    assert!(Element::from_json(theta.clone(), r#"[{"x":[0],"re":1,"im":0}]"#).is_err());
    assert!(Element::from_json(
        theta,
        r#"[{"x":[0,0],"re":1,"im":0},{"x":[0,0],"re":2,"im":0}]"#
    )
    .is_err());
}
