//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nctorus::algebra::Monomial;
use nctorus::extension_group::GFunction;
use nctorus::phases::{IrrationalBasis, LatticePoint, Rational, ThetaData, UnitPhase};
use nctorus::sampling::{random_element, random_exact_theta, random_mixed_theta, random_point};
use nctorus::spectral::{
    build_truncation, cstar_inverse_norm, decay_fit, neumann_invert, opnorm_estimate,
    spectral_radius_l1v, DecayModel,
};
use nctorus::structure::{
    average_error, average_error_bound, centralizer_membership, degeneracy, is_central,
    project_centralizer,
};
use nctorus::suites::gfunction_diff;
use nctorus::weights::Weight;
use nctorus::Element;
use num_complex::Complex64;
use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sqrt2_theta() -> Arc<ThetaData> {
    Arc::new(
        ThetaData::new(
            2,
            IrrationalBasis::new(vec![std::f64::consts::SQRT_2]),
            vec![(2, 1, UnitPhase::irrational(0, Rational::from_integer(1)))],
        )
        .unwrap(),
    )
}

/// `σ(l, m)` recomputed from the lower angles as a sum of rationals,
/// with the rational part reduced to `[0, 1)`.
fn sigma_oracle(theta: &ThetaData, l: &LatticePoint, m: &LatticePoint) -> (Rational, BTreeMap<usize, Rational>) {
    let zero = Rational::from_integer(0);
    let mut r0 = zero;
    let mut irr: BTreeMap<usize, Rational> = BTreeMap::new();
    for k in 1..theta.n() {
        for j in 0..k {
            let w = Rational::from_integer(l.0[k] as i128 * m.0[j] as i128);
            let a = theta.angle(k + 1, j + 1).unwrap();
            r0 += *a.r0() * w;
            for (t, c) in a.irr() {
                *irr.entry(*t).or_insert(zero) += *c * w;
            }
        }
    }
    irr.retain(|_, c| *c != zero);
    (r0 - r0.floor(), irr)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut configs = Vec::new();
    while configs.len() < 24 {
        let theta = random_mixed_theta(&mut rng, 5);
        if theta.n() >= 2 {
            configs.push(theta);
        }
    }
    let with_irrational = configs.iter().filter(|t| !t.basis().is_empty()).count();
    let mut failures = 0usize;
    let mut oracle_failures = 0usize;
    let trials = 10_000;
    for theta in &configs {
        let n = theta.n();
        for i in 0..trials {
            let l = random_point(&mut rng, n, 50);
            let m = random_point(&mut rng, n, 50);
            let p = random_point(&mut rng, n, 50);
            let s = |a: &LatticePoint, b: &LatticePoint| theta.sigma(a, b).unwrap();
            let lhs = s(&l, &m).checked_mul(&s(&l.checked_add(&m).unwrap(), &p)).unwrap();
            let rhs = s(&l, &m.checked_add(&p).unwrap()).checked_mul(&s(&m, &p)).unwrap();
            if lhs != rhs {
                failures += 1;
            }
            if i % 10 == 0 {
                let lib = s(&l, &m);
                let (r0, irr) = sigma_oracle(theta, &l, &m);
                if *lib.r0() != r0 || *lib.irr() != irr {
                    oracle_failures += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0
            && oracle_failures == 0
            && with_irrational > 0
            && with_irrational < configs.len()
            && elapsed < Duration::from_secs(5),
        format!(
            "{} configs ({with_irrational} with irrational angles) x {trials} triples, {failures} identity failures, {oracle_failures} oracle mismatches, {:.2}s",
            configs.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut iso, mut hom_worst, mut star_worst) = (0usize, 0f64, 0f64);
    let pairs = 1000;
    let mut theta = Arc::new(random_mixed_theta(&mut rng, 4));
    for i in 0..pairs {
        if i % 50 == 0 {
            theta = Arc::new(random_mixed_theta(&mut rng, 4));
        }
        let f = random_element(&mut rng, &theta, 8, 4);
        let g = random_element(&mut rng, &theta, 8, 4);
        let cf = GFunction::circ(&f);
        if cf.norm(1).unwrap() != f.l1_norm() {
            iso += 1;
        }
        let lhs = GFunction::circ(&f.convolve(&g).unwrap());
        let rhs = cf.convolve(&GFunction::circ(&g)).unwrap();
        hom_worst = hom_worst.max(gfunction_diff(&lhs, &rhs));
        let star = gfunction_diff(&GFunction::circ(&f.involution().unwrap()), &cf.involution().unwrap());
        star_worst = star_worst.max(star);
    }
    let elapsed = start.elapsed();
    outcome(
        iso == 0 && hom_worst <= 1e-12 && star_worst <= 1e-14 && elapsed < Duration::from_secs(10),
        format!(
            "{pairs} pairs, {iso} norm mismatches, homomorphism err {hom_worst:.2e}, involution err {star_worst:.2e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut exact_fail, mut unit_worst, mut mod_worst, mut phase_worst) = (0usize, 0f64, 0f64, 0f64);
    let mut support_fail = 0usize;
    let mut theta = Arc::new(random_mixed_theta(&mut rng, 4));
    for i in 0..1000 {
        if i % 50 == 0 {
            theta = Arc::new(random_mixed_theta(&mut rng, 4));
        }
        let n = theta.n();
        let y = random_point(&mut rng, n, 20);
        let my = Monomial::delta(y.clone());
        let prod = my.mul(&my.adjoint(&theta).unwrap(), &theta).unwrap();
        if !prod.phase.is_one() || !prod.point.is_zero() {
            exact_fail += 1;
        }
        let dy = Element::delta(theta.clone(), y.clone()).unwrap();
        let rendered = dy.convolve(&dy.involution().unwrap()).unwrap();
        unit_worst = unit_worst.max(rendered.max_abs_diff(&Element::unit(theta.clone())));

        let x = random_point(&mut rng, n, 20);
        let k = rand::Rng::random_range(&mut rng, 1..=50u32);
        let pk = Element::delta(theta.clone(), x.clone()).unwrap().power(k).unwrap();
        let kx = x.checked_scale(k as i64).unwrap();
        if pk.support_len() != 1 {
            support_fail += 1;
        }
        let c = pk.get(&kx);
        // δ_x^k = σ(x, x)^{k(k−1)/2} δ_{kx}
        let exact = theta.sigma(&x, &x).unwrap().checked_pow(k as i64 * (k as i64 - 1) / 2).unwrap();
        let expected = theta.render(&exact);
        // both sides render angles whose irrational coefficients reach ~1e5,
        // so compare within a rounding budget proportional to the angle size
        let magnitude: f64 = exact
            .irr()
            .iter()
            .map(|(t, q)| (*q.numer() as f64 / *q.denom() as f64).abs() * theta.basis().values[*t])
            .sum();
        let budget = 1e-12 + 64.0 * f64::EPSILON * magnitude;
        mod_worst = mod_worst.max((c.norm() - 1.0).abs());
        phase_worst = phase_worst.max((c - expected).norm() / budget);
    }
    outcome(
        exact_fail == 0 && support_fail == 0 && unit_worst <= 1e-15 && mod_worst <= 1e-12 && phase_worst <= 1.0,
        format!(
            "1000 trials, {exact_fail} inexact unit products, rendering err {unit_worst:.1e}, ||c_k|-1| <= {mod_worst:.1e}, phase err {phase_worst:.2} of rounding budget"
        ),
    )
}

fn norm2(x: &LatticePoint) -> f64 {
    x.0.iter().map(|c| (*c as f64).powi(2)).sum::<f64>().sqrt()
}

fn criterion_4() -> Outcome {
    let theta = sqrt2_theta();
    // (weight, closed form of v(kx)^{1/k} given |kx| and k)
    type Law = Box<dyn Fn(f64, f64) -> f64>;
    let weights: Vec<(Weight, Law)> = vec![
        (Weight::one(), Box::new(|_, _| 1.0)),
        (Weight::polynomial(2.0), Box::new(|r, k| (1.0 + r).powf(2.0 / k))),
        (Weight::subexponential(1.0, 0.5), Box::new(|r, k| (r.powf(0.5) / k).exp())),
        (Weight::exponential(1.0), Box::new(|r, k| (r / k).exp())),
        (
            Weight::product(vec![Weight::polynomial(1.0), Weight::subexponential(0.5, 0.3)]),
            Box::new(|r, k| ((1.0 + r).ln() / k + 0.5 * r.powf(0.3) / k).exp()),
        ),
    ];
    let points = [[1, 0], [2, -1], [0, 3], [-1, -1]];
    let mut worst: f64 = 0.0;
    let mut exp_worst: f64 = 0.0;
    for (v, law) in &weights {
        for p in points {
            let x = LatticePoint(p.to_vec());
            let r = spectral_radius_l1v(theta.clone(), v, &x, 50).unwrap();
            for (i, s) in r.sequence.iter().enumerate() {
                let k = (i + 1) as f64;
                worst = worst.max((s - law(k * norm2(&x), k)).abs());
                if matches!(v.kind, nctorus::weights::WeightKind::Exponential { .. }) {
                    exp_worst = exp_worst.max((s - norm2(&x).exp()).abs());
                }
            }
        }
    }
    let mut cstar_worst: f64 = 0.0;
    for p in points {
        let x = LatticePoint(p.to_vec());
        for extra in [2, 4] {
            let n = x.max_abs() as i64 + extra;
            let t = build_truncation(&Element::delta(theta.clone(), x.clone()).unwrap(), n).unwrap();
            let est = opnorm_estimate(&t, 1e-12).unwrap();
            cstar_worst = cstar_worst.max((est.lower_bound - 1.0).abs());
        }
    }
    outcome(
        worst <= 1e-12 && exp_worst <= 1e-12 && cstar_worst <= 1e-9,
        format!(
            "5 weights x 4 points x 50 powers, max err {worst:.1e}, exponential plateau err {exp_worst:.1e}, C*-norm err {cstar_worst:.1e}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let theta = sqrt2_theta();
    let e1 = LatticePoint::unit(2, 1);
    let f = Element::from_terms(
        theta.clone(),
        [(LatticePoint::zero(2), Complex64::new(1.5, 0.0)), (e1, Complex64::new(-1.0, 0.0))],
    )
    .unwrap();
    let plain = neumann_invert(&f, 1e-10, 200, &Weight::one()).unwrap();
    let a_ok = plain.residual_l1 <= 1e-10 && plain.terms_used <= 200;

    let mut b_worst: f64 = 0.0;
    for n in [4, 8, 12, 16] {
        b_worst = b_worst.max(cstar_inverse_norm(&f, n).unwrap().inverse_norm);
    }
    let b_ok = b_worst <= 2.0 + 1e-6;

    let weighted = neumann_invert(&f, 1e-10, 200, &Weight::exponential(1.0)).unwrap();
    let e = std::f64::consts::E;
    let mut term_worst: f64 = 0.0;
    for (k, t) in weighted.term_weighted_norms.iter().enumerate() {
        let expected = 1.5f64.powi(-(k as i32 + 1)) * e.powi(k as i32);
        term_worst = term_worst.max((t - expected).abs() / expected);
    }
    let mut partial_worst: f64 = 0.0;
    let mut closed = 0.0;
    for (k, s) in weighted.partial_sum_weighted_norms.iter().enumerate() {
        closed += 1.5f64.powi(-(k as i32 + 1)) * e.powi(k as i32);
        partial_worst = partial_worst.max((s - closed).abs() / closed);
    }
    let c_ok = term_worst <= 1e-9
        && partial_worst <= 1e-9
        && weighted.diverged_weighted
        && weighted.term_weighted_norms.len() == 200
        && weighted.l1_converged_at.is_some_and(|k| k <= 200);
    let elapsed = start.elapsed();
    outcome(
        a_ok && b_ok && c_ok && elapsed < Duration::from_secs(5),
        format!(
            "(a) l1 residual {:.1e} after {} terms; (b) max truncated inverse norm {b_worst:.9}; (c) term err {term_worst:.1e}, partial-sum err {partial_worst:.1e}, divergence flag {}; {:.2}s",
            plain.residual_l1,
            plain.terms_used,
            weighted.diverged_weighted,
            elapsed.as_secs_f64()
        ),
    )
}

fn lcm_of_denominators(theta: &ThetaData) -> i64 {
    let mut q: i128 = 1;
    for k in 2..=theta.n() {
        for j in 1..k {
            let a = theta.angle(k, j).unwrap();
            q = q.lcm(a.r0().denom());
            for c in a.irr().values() {
                q = q.lcm(c.denom());
            }
        }
    }
    q as i64
}

/// First nonzero `m` in `[−b, b]^n` with `σ(m, e_j) = σ(e_j, m)` for all `j`.
fn brute_force_central(theta: &ThetaData, b: i64) -> Option<LatticePoint> {
    let n = theta.n();
    let gens: Vec<LatticePoint> = (1..=n).map(|j| LatticePoint::unit(n, j)).collect();
    let mut m = vec![-b; n];
    loop {
        let p = LatticePoint(m.clone());
        if !p.is_zero()
            && gens
                .iter()
                .all(|e| theta.sigma(&p, e).unwrap() == theta.sigma(e, &p).unwrap())
        {
            return Some(p);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if m[i] < b {
                m[i] += 1;
                break;
            }
            m[i] = -b;
        }
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut agree, mut witness_ok, mut witnesses, mut degenerate) = (0, 0, 0, 0);
    let total = 100;
    for _ in 0..total {
        let (theta, _) = random_exact_theta(&mut rng, 4, 6, 2);
        let verdict = degeneracy(&theta).unwrap();
        let oracle = brute_force_central(&theta, 2 * lcm_of_denominators(&theta));
        if verdict.degenerate == oracle.is_some() {
            agree += 1;
        }
        if verdict.degenerate {
            degenerate += 1;
        }
        if let Some(w) = &verdict.witness {
            witnesses += 1;
            if !w.is_zero() && is_central(&theta, w).unwrap() && verdict.self_check == Some(true) {
                witness_ok += 1;
            }
        }
    }
    outcome(
        agree == total && witness_ok == witnesses && witnesses == degenerate,
        format!(
            "{agree}/{total} verdicts agree with the brute-force search ({degenerate} degenerate), {witness_ok}/{witnesses} witnesses central"
        ),
    )
}

fn criterion_7() -> Outcome {
    let theta = sqrt2_theta();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut collapse_fail, mut bound_fail, mut member_fail) = (0, 0, 0);
    let mut checks = 0;
    let origin = LatticePoint::zero(2);
    for _ in 0..200 {
        let f = random_element(&mut rng, &theta, 10, 4);
        let projected = project_centralizer(&project_centralizer(&f, 1).unwrap(), 2).unwrap();
        let expected = Element::from_terms(theta.clone(), [(origin.clone(), f.get(&origin))]).unwrap();
        if projected != expected {
            collapse_fail += 1;
        }
        for (x, _) in f.iter() {
            // C_j contains exactly the multiples of e_j here
            for j in 1..=2 {
                let member = centralizer_membership(&theta, x, j).unwrap().member;
                let off = if j == 1 { x.0[1] } else { x.0[0] };
                if member != (off == 0) {
                    member_fail += 1;
                }
            }
        }
        for j in 1..=2 {
            for m in [10, 100, 1000] {
                checks += 1;
                if average_error(&f, j, m).unwrap() > average_error_bound(&f, j, m).unwrap() {
                    bound_fail += 1;
                }
            }
        }
    }
    outcome(
        collapse_fail == 0 && bound_fail == 0 && member_fail == 0,
        format!(
            "200 elements, {collapse_fail} failed collapses to f(0)δ_0, {member_fail} centralizer mismatches, {bound_fail}/{checks} averaging bounds violated"
        ),
    )
}

fn synthetic(law: impl Fn(f64) -> f64, dim: usize, range: i64) -> Element {
    let theta = Arc::new(ThetaData::commutative(dim));
    let side = 2 * range + 1;
    let terms: Vec<_> = (0..side.pow(dim as u32))
        .map(|mut idx| {
            let mut c = vec![0; dim];
            for v in c.iter_mut() {
                *v = idx % side - range;
                idx /= side;
            }
            let x = LatticePoint(c);
            let r = norm2(&x);
            (x, Complex64::new(law(r), 0.0))
        })
        .collect();
    Element::from_terms(theta, terms).unwrap()
}

fn criterion_8() -> Outcome {
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let mut lines = Vec::new();
    let mut ok = true;
    for (dim, range) in [(1, 100), (2, 20)] {
        let poly = decay_fit(&synthetic(|r| (1.0 + r).powi(-3), dim, range)).unwrap();
        let sub = decay_fit(&synthetic(|r| (-0.5 * r.sqrt()).exp(), dim, range)).unwrap();
        let exp = decay_fit(&synthetic(|r| (-r).exp(), dim, range)).unwrap();
        let (p, s, e) = (poly.best.unwrap(), sub.best.unwrap(), exp.best.unwrap());
        let b = s.exponent.unwrap_or(f64::NAN);
        ok &= p.model == DecayModel::Polynomial && rel(p.rate, 3.0) <= 0.05;
        ok &= s.model == DecayModel::Subexponential && rel(s.rate, 0.5) <= 0.05 && rel(b, 0.5) <= 0.05;
        ok &= e.model == DecayModel::Exponential && rel(e.rate, 1.0) <= 0.05;
        lines.push(format!(
            "dim {dim}: {:?} s={:.4}, {:?} a={:.4} b={b:.4}, {:?} a={:.4}",
            p.model, p.rate, s.model, s.rate, e.model, e.rate
        ));
    }
    outcome(ok, lines.join("; "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("cocycle identity", criterion_1),
        ("circ is an isometric *-homomorphism", criterion_2),
        ("unitarity and power law", criterion_3),
        ("spectral-radius dichotomy", criterion_4),
        ("inverse-closedness demonstration", criterion_5),
        ("degeneracy oracle equivalence", criterion_6),
        ("simplicity mechanics", criterion_7),
        ("decay classification", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} ({name}): {} | {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
