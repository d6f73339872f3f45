//! Central elements, cocycle degeneracy and the simplicity criterion.
//!
//! `δ_m` is central iff `Σ_j m_j ϑ_{jk} ∈ Z` for every `k`. Writing
//! `ϑ_{jk} = a_{jk} + Σ_t b^{(t)}_{jk} α_t`, the irrational parts must vanish
//! identically, which cuts out an integer lattice `L`; any nonzero `w ∈ L`
//! becomes central after scaling by the denominators of `a·w`. So the cocycle
//! is degenerate exactly when `L ≠ {0}`, and this is decided exactly.

pub mod lattice;

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::{Element, Monomial};
use crate::error::{Error, Result};
use crate::phases::{LatticePoint, Rational, ThetaData, UnitPhase};

/// Box radius for the float-mode heuristic search when none is given.
pub const DEFAULT_HEURISTIC_BOX: i64 = 6;
/// Numeric tolerance for float-mode centrality.
pub const FLOAT_CENTRAL_TOL: f64 = 1e-9;

/// `Σ_j m_j ϑ_{jk}` for each `k`, as exact phases.
fn column_phases(theta: &ThetaData, m: &LatticePoint) -> Result<Vec<UnitPhase>> {
    Error::check_dim(theta.n(), m.dim())?;
    (1..=theta.n())
        .map(|k| {
            m.coords().iter().enumerate().try_fold(UnitPhase::one(), |acc, (j, &mj)| {
                acc.checked_mul(&theta.angle(j + 1, k)?.checked_pow(mj)?)
            })
        })
        .collect()
}

/// Exact test of `∏_j θ_{jk}^{m_j} = 1` for all `k`.
pub fn is_central(theta: &ThetaData, m: &LatticePoint) -> Result<bool> {
    Ok(column_phases(theta, m)?.iter().all(UnitPhase::is_one))
}

/// Numeric version of [`is_central`] for float-mode angles.
pub fn is_central_numeric(theta: &ThetaData, m: &LatticePoint, tol: f64) -> Result<bool> {
    Ok(column_phases(theta, m)?
        .iter()
        .all(|p| (theta.render(p) - Complex64::new(1.0, 0.0)).norm() <= tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionMode {
    Exact,
    UndecidableInFloat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyVerdict {
    /// In float mode this is only the outcome of the heuristic search.
    pub degenerate: bool,
    pub witness: Option<LatticePoint>,
    pub mode: DecisionMode,
    pub method: String,
    /// `is_central` rerun on the witness.
    pub self_check: Option<bool>,
    /// Rank of the integer lattice cut out by the irrational parts.
    pub kernel_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a BigRational>) -> BigInt {
    values.fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

fn to_big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Rows `(t, k)` of the linear map `m ↦ Σ_j m_j b^{(t)}_{jk}`, with
/// denominators cleared.
fn irrational_constraints(theta: &ThetaData) -> Result<Vec<Vec<BigInt>>> {
    let n = theta.n();
    let mut rows = Vec::new();
    for t in 0..theta.basis().len() {
        for k in 1..=n {
            let row: Vec<BigRational> = (1..=n)
                .map(|j| {
                    Ok(theta
                        .angle(j, k)?
                        .irr()
                        .get(&t)
                        .map(to_big)
                        .unwrap_or_else(BigRational::zero))
                })
                .collect::<Result<_>>()?;
            if row.iter().all(Zero::is_zero) {
                continue;
            }
            let scale = BigRational::from_integer(lcm_of_denominators(row.iter()));
            rows.push(row.iter().map(|c| (c * &scale).to_integer()).collect());
        }
    }
    Ok(rows)
}

/// Decides degeneracy of the cocycle. Float-mode configurations fall back to
/// a labeled heuristic search on `[−b, b]^n` with [`DEFAULT_HEURISTIC_BOX`].
pub fn degeneracy(theta: &ThetaData) -> Result<DegeneracyVerdict> {
    degeneracy_with_box(theta, DEFAULT_HEURISTIC_BOX)
}

pub fn degeneracy_with_box(theta: &ThetaData, heuristic_box: i64) -> Result<DegeneracyVerdict> {
    if !theta.is_exact() {
        let witness = brute_force_search(theta, heuristic_box, |m| {
            is_central_numeric(theta, m, FLOAT_CENTRAL_TOL)
        })?;
        return Ok(DegeneracyVerdict {
            degenerate: witness.is_some(),
            witness,
            mode: DecisionMode::UndecidableInFloat,
            method: format!(
                "heuristic search over |m|_inf <= {heuristic_box} with tolerance {FLOAT_CENTRAL_TOL}"
            ),
            self_check: None,
            kernel_rank: None,
            warning: Some(
                "floating-point angles cannot certify nondegeneracy; verdict is heuristic".into(),
            ),
        });
    }

    let n = theta.n();
    let rows = irrational_constraints(theta)?;
    let kernel = lattice::integer_kernel(&rows, n);
    let rank = kernel.len();
    let Some(w) = kernel
        .into_iter()
        .min_by_key(|v| v.iter().map(|c| c.abs()).max().unwrap_or_default())
    else {
        return Ok(DegeneracyVerdict {
            degenerate: false,
            witness: None,
            mode: DecisionMode::Exact,
            method: format!(
                "integer kernel of {} irrational constraint rows is trivial",
                rows.len()
            ),
            self_check: None,
            kernel_rank: Some(0),
            warning: None,
        });
    };

    // rational parts of Σ_j w_j ϑ_{jk}; scale by their denominators
    let mut sums = Vec::with_capacity(n);
    for k in 1..=n {
        let mut s = BigRational::zero();
        for (j, wj) in w.iter().enumerate() {
            s += to_big(theta.angle(j + 1, k)?.r0()) * BigRational::from_integer(wj.clone());
        }
        sums.push(s);
    }
    let q = lcm_of_denominators(sums.iter());
    let witness = w
        .iter()
        .map(|c| (c * &q).to_i64().ok_or(Error::Overflow("witness coordinates")))
        .collect::<Result<Vec<_>>>()
        .map(LatticePoint)?;
    let self_check = is_central(theta, &witness)?;
    Ok(DegeneracyVerdict {
        degenerate: true,
        witness: Some(witness),
        mode: DecisionMode::Exact,
        method: format!(
            "integer kernel of rank {rank} via column Hermite reduction; kernel vector scaled by {q}"
        ),
        self_check: Some(self_check),
        kernel_rank: Some(rank),
        warning: None,
    })
}

/// All points of `[−r, r]^n` in lexicographic order.
pub fn box_points(n: usize, radius: i64) -> impl Iterator<Item = LatticePoint> {
    let side = (2 * radius + 1) as u64;
    let total = side.pow(n as u32);
    (0..total).map(move |mut idx| {
        let mut coords = vec![0i64; n];
        for c in coords.iter_mut().rev() {
            *c = (idx % side) as i64 - radius;
            idx /= side;
        }
        LatticePoint(coords)
    })
}

/// Nonzero point of smallest `|m|_∞` (then lexicographic) satisfying `pred`.
pub fn brute_force_search<F>(theta: &ThetaData, radius: i64, pred: F) -> Result<Option<LatticePoint>>
where
    F: Fn(&LatticePoint) -> Result<bool>,
{
    let mut best: Option<LatticePoint> = None;
    for m in box_points(theta.n(), radius) {
        if m.is_zero() {
            continue;
        }
        if best.as_ref().is_some_and(|b| b.max_abs() <= m.max_abs()) {
            continue;
        }
        if pred(&m)? {
            best = Some(m);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Centralizer {
    pub member: bool,
    /// `β_x` with `δ_{e_j}* ♮ δ_x ♮ δ_{e_j} = β_x δ_x`.
    pub beta: UnitPhase,
}

fn check_generator(theta: &ThetaData, j: usize) -> Result<()> {
    if j == 0 || j > theta.n() {
        return Err(Error::InvalidInput(format!(
            "generator index {j} outside 1..={}",
            theta.n()
        )));
    }
    Ok(())
}

/// Conjugates `δ_x` by `δ_{e_j}` with exact phases.
pub fn centralizer_membership(theta: &ThetaData, x: &LatticePoint, j: usize) -> Result<Centralizer> {
    check_generator(theta, j)?;
    Error::check_dim(theta.n(), x.dim())?;
    let e = Monomial::delta(LatticePoint::unit(theta.n(), j));
    let prod = e
        .adjoint(theta)?
        .mul(&Monomial::delta(x.clone()), theta)?
        .mul(&e, theta)?;
    debug_assert_eq!(prod.point, *x);
    Ok(Centralizer {
        member: prod.phase.is_one(),
        beta: prod.phase,
    })
}

/// `(1/m) Σ_{k=1}^m β^k` in closed form.
fn cesaro_mean(theta: &ThetaData, beta: &UnitPhase, m: u64) -> Result<Complex64> {
    if beta.is_one() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let b = theta.render(beta);
    let exponent = i64::try_from(m).map_err(|_| Error::Overflow("averaging length"))?;
    let bm = theta.render(&beta.checked_pow(exponent)?);
    let one = Complex64::new(1.0, 0.0);
    Ok(b * (one - bm) / ((one - b) * m as f64))
}

/// `J_m(f) = (1/m) Σ_{k=1}^m (δ_{e_j}*)^k ♮ f ♮ δ_{e_j}^k`.
pub fn average_j(f: &Element, j: usize, m: u64) -> Result<Element> {
    let theta: &ThetaData = f.theta();
    check_generator(theta, j)?;
    if m == 0 {
        return Err(Error::InvalidInput("averaging length must be positive".into()));
    }
    let terms = f
        .iter()
        .map(|(x, a)| {
            let c = centralizer_membership(theta, x, j)?;
            Ok((x.clone(), a * cesaro_mean(theta, &c.beta, m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Element::from_terms(f.theta().clone(), terms)
}

/// `f·χ_{C_j}`.
pub fn project_centralizer(f: &Element, j: usize) -> Result<Element> {
    let theta: &ThetaData = f.theta();
    check_generator(theta, j)?;
    let mut kept = Vec::new();
    for (x, a) in f.iter() {
        if centralizer_membership(theta, x, j)?.member {
            kept.push((x.clone(), *a));
        }
    }
    Element::from_terms(f.theta().clone(), kept)
}

/// `f·χ_{C_1 ∩ … ∩ C_n}`.
pub fn project_all(f: &Element) -> Result<Element> {
    (1..=f.theta().n()).try_fold(f.clone(), |g, j| project_centralizer(&g, j))
}

/// `‖J_m(f) − f χ_{C_j}‖₁`.
pub fn average_error(f: &Element, j: usize, m: u64) -> Result<f64> {
    Ok(average_j(f, j, m)?.sub(&project_centralizer(f, j)?)?.l1_norm())
}

/// `2‖f‖₁ · max_{x ∉ C_j} 1/(m|1 − β_x|)`, which dominates [`average_error`].
pub fn average_error_bound(f: &Element, j: usize, m: u64) -> Result<f64> {
    let theta: &ThetaData = f.theta();
    let mut worst: f64 = 0.0;
    for (x, _) in f.iter() {
        let c = centralizer_membership(theta, x, j)?;
        if !c.member {
            let gap = (Complex64::new(1.0, 0.0) - theta.render(&c.beta)).norm();
            worst = worst.max(1.0 / (m as f64 * gap));
        }
    }
    Ok(2.0 * f.l1_norm() * worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplicityVerdict {
    /// `None` when the degeneracy question is undecidable (float mode).
    pub simple: Option<bool>,
    pub degeneracy: DegeneracyVerdict,
    pub weight_independent: bool,
    pub note: &'static str,
}

const SIMPLICITY_NOTE: &str = "l1_v(Z^n, theta) is simple iff the cocycle is nondegenerate, \
for every submultiplicative weight v; the verdict does not depend on v";

pub fn simplicity(theta: &ThetaData) -> Result<SimplicityVerdict> {
    simplicity_with_box(theta, DEFAULT_HEURISTIC_BOX)
}

pub fn simplicity_with_box(theta: &ThetaData, heuristic_box: i64) -> Result<SimplicityVerdict> {
    let degeneracy = degeneracy_with_box(theta, heuristic_box)?;
    Ok(SimplicityVerdict {
        simple: match degeneracy.mode {
            DecisionMode::Exact => Some(!degeneracy.degenerate),
            DecisionMode::UndecidableInFloat => None,
        },
        degeneracy,
        weight_independent: true,
        note: SIMPLICITY_NOTE,
    })
}

/// The central element `δ_m` of a degenerate configuration, if any.
pub fn central_element(theta: Arc<ThetaData>) -> Result<Option<Element>> {
    match degeneracy(&theta)?.witness {
        Some(m) => Ok(Some(Element::delta(theta, m)?)),
        None => Ok(None),
    }
}
