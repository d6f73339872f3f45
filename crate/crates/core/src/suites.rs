//! Randomized identity suites run by `nctorus check`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::Element;
use crate::error::Result;
use crate::extension_group::GFunction;
use crate::phases::ThetaData;
use crate::sampling::{random_element, random_point};
use crate::weights::{check_axioms, Weight};

const POINT_RADIUS: i64 = 50;
const ELEMENT_RADIUS: i64 = 3;
const ELEMENT_SUPPORT: usize = 6;
/// Relative tolerance for floating-point identities.
const FLOAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub first_counterexample: Option<Value>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            trials: 0,
            failures: 0,
            first_counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.first_counterexample.is_none() {
                self.first_counterexample = Some(witness());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

fn close(a: &Element, b: &Element) -> bool {
    let scale = a.l1_norm().max(b.l1_norm()).max(1.0);
    a.max_abs_diff(b) <= FLOAT_TOL * scale
}

pub fn cocycle_suite(theta: &ThetaData, trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("phases/cocycle-identity");
    let n = theta.n();
    for _ in 0..trials {
        let (l, m, p) = (
            random_point(&mut rng, n, POINT_RADIUS),
            random_point(&mut rng, n, POINT_RADIUS),
            random_point(&mut rng, n, POINT_RADIUS),
        );
        let lhs = theta.sigma(&l, &m)?.checked_mul(&theta.sigma(&l.checked_add(&m)?, &p)?)?;
        let rhs = theta.sigma(&l, &m.checked_add(&p)?)?.checked_mul(&theta.sigma(&m, &p)?)?;
        report.record(lhs == rhs, || json!({"l": l, "m": m, "p": p, "lhs": lhs, "rhs": rhs}));
    }
    Ok(report)
}

/// `σ` is a bicharacter: `σ(−l, m) = conj σ(l, m)` and `σ(l, m)·conj σ(l, m) = 1`.
pub fn conjugation_suite(theta: &ThetaData, trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("phases/conjugation");
    let n = theta.n();
    for _ in 0..trials {
        let (l, m) = (
            random_point(&mut rng, n, POINT_RADIUS),
            random_point(&mut rng, n, POINT_RADIUS),
        );
        let s = theta.sigma(&l, &m)?;
        let conj = s.checked_conj()?;
        let ok = theta.sigma(&l.neg(), &m)? == conj && s.checked_mul(&conj)?.is_one();
        report.record(ok, || json!({"l": l, "m": m}));
    }
    Ok(report)
}

pub fn associativity_suite(theta: &Arc<ThetaData>, trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("algebra/associativity");
    for _ in 0..trials {
        let f = random_element(&mut rng, theta, ELEMENT_SUPPORT, ELEMENT_RADIUS);
        let g = random_element(&mut rng, theta, ELEMENT_SUPPORT, ELEMENT_RADIUS);
        let h = random_element(&mut rng, theta, ELEMENT_SUPPORT, ELEMENT_RADIUS);
        let lhs = f.convolve(&g)?.convolve(&h)?;
        let rhs = f.convolve(&g.convolve(&h)?)?;
        report.record(close(&lhs, &rhs), || json!({"f": f, "g": g, "h": h}));
    }
    Ok(report)
}

/// `(f♮g)* = g*♮f*`, `f** = f` and `‖f*‖₁ = ‖f‖₁`.
pub fn involution_suite(theta: &Arc<ThetaData>, trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("algebra/involution");
    for _ in 0..trials {
        let f = random_element(&mut rng, theta, ELEMENT_SUPPORT, ELEMENT_RADIUS);
        let g = random_element(&mut rng, theta, ELEMENT_SUPPORT, ELEMENT_RADIUS);
        let fs = f.involution()?;
        let anti = close(&f.convolve(&g)?.involution()?, &g.involution()?.convolve(&fs)?);
        let twice = close(&fs.involution()?, &f);
        let isometric = (fs.l1_norm() - f.l1_norm()).abs() <= FLOAT_TOL * f.l1_norm().max(1.0);
        report.record(anti && twice && isometric, || json!({"f": f, "g": g}));
    }
    Ok(report)
}

/// `δ_y ♮ δ_y* = δ_0` and `δ_x^{♮k} = c δ_{kx}` with `|c| = 1`.
pub fn unitarity_suite(theta: &Arc<ThetaData>, trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("algebra/unitarity");
    let n = theta.n();
    let unit = Element::unit(theta.clone());
    for _ in 0..trials {
        let y = random_point(&mut rng, n, POINT_RADIUS);
        let dy = Element::delta(theta.clone(), y.clone())?;
        let ok_unit = dy.convolve(&dy.involution()?)?.max_abs_diff(&unit) <= 1e-15;
        let k = rand::Rng::random_range(&mut rng, 1..=20u32);
        let pk = dy.power(k)?;
        let kx = y.checked_scale(k as i64)?;
        let c = pk.get(&kx);
        let ok_power = pk.support_len() == 1 && (c.norm() - 1.0).abs() <= FLOAT_TOL;
        report.record(ok_unit && ok_power, || json!({"y": y, "k": k}));
    }
    Ok(report)
}

pub fn weight_suite(v: &Weight, dim: usize, trials: usize, seed: u64) -> SuiteReport {
    let axioms = check_axioms(v, dim, trials, 20, seed);
    SuiteReport {
        name: "weights/axioms",
        trials: axioms.trials,
        failures: axioms.violation_count,
        first_counterexample: axioms
            .violations
            .first()
            .map(|w| serde_json::to_value(w).unwrap_or(Value::Null)),
    }
}

/// `circ` is an isometric `*`-homomorphism into `L¹(G)`.
pub fn embedding_suite(theta: &Arc<ThetaData>, trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("extension_group/circ-homomorphism");
    for _ in 0..trials {
        let f = random_element(&mut rng, theta, ELEMENT_SUPPORT, ELEMENT_RADIUS);
        let g = random_element(&mut rng, theta, ELEMENT_SUPPORT, ELEMENT_RADIUS);
        let cf = GFunction::circ(&f);
        let isometric = cf.norm(1)? == f.l1_norm();
        let product = GFunction::circ(&f.convolve(&g)?);
        let lifted = cf.convolve(&GFunction::circ(&g))?;
        let hom = gfunction_diff(&product, &lifted) <= FLOAT_TOL;
        let star = gfunction_diff(&GFunction::circ(&f.involution()?), &cf.involution()?) <= 1e-14;
        report.record(isometric && hom && star, || json!({"f": f, "g": g}));
    }
    Ok(report)
}

/// Largest coefficient difference over the union of supports.
pub fn gfunction_diff(a: &GFunction, b: &GFunction) -> f64 {
    let mut worst: f64 = 0.0;
    for ((x, k), c) in a.components() {
        worst = worst.max((c - b.component(x, *k)).norm());
    }
    for ((x, k), c) in b.components() {
        worst = worst.max((c - a.component(x, *k)).norm());
    }
    worst
}

/// Every suite with the trial count used by `nctorus check`.
pub fn run_all(theta: Arc<ThetaData>, v: &Weight, seed: u64, trials: usize) -> Result<CheckReport> {
    let small = (trials / 10).max(1);
    let suites = vec![
        cocycle_suite(&theta, trials, seed)?,
        conjugation_suite(&theta, trials, seed.wrapping_add(1))?,
        associativity_suite(&theta, small, seed.wrapping_add(2))?,
        involution_suite(&theta, small, seed.wrapping_add(3))?,
        unitarity_suite(&theta, small, seed.wrapping_add(4))?,
        weight_suite(v, theta.n(), trials, seed.wrapping_add(5)),
        embedding_suite(&theta, small, seed.wrapping_add(6))?,
    ];
    Ok(CheckReport {
        seed,
        passed: suites.iter().all(SuiteReport::passed),
        suites,
    })
}
