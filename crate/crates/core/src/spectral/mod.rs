//! The regular representation `λ(f)g = f ♮ g` on `ℓ²(Z^n)`, truncated to
//! finite boxes, together with the inversion experiments that contrast
//! `ℓ¹_v` with the C*-completion.

mod decay;
mod neumann;

pub use decay::{decay_fit, decay_fit_with_norm, DecayFit, DecayModel, ModelFit, MIN_FIT_SUPPORT};
pub use neumann::{neumann_invert, InversionReport, DIVERGENCE_BLOCK, DIVERGENCE_RUN};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::phases::{LatticePoint, ThetaData};
use crate::weights::{grs_profile, GrsVerdict, Weight};

/// Hard cap on the number of box points `(2N+1)^n`.
pub const ROW_CAP: usize = 1 << 18;
pub const DEFAULT_MAX_ITERATIONS: usize = 200_000;

/// Compression of `λ(f)` to `ℓ²([−N, N]^n)`.
///
/// Entry `(x, z)` is `f(x − z) σ(x − z, z)`. Rows and columns follow the
/// lexicographic order of the box points. Only nonzero entries are stored,
/// column by column.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    radius: i64,
    dim: usize,
    columns: Vec<Vec<(usize, Complex64)>>,
    source: Element,
}

impl TruncatedOperator {
    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn source(&self) -> &Element {
        &self.source
    }

    /// Number of box points, i.e. rows (and columns).
    pub fn size(&self) -> usize {
        self.columns.len()
    }

    fn side(&self) -> i64 {
        2 * self.radius + 1
    }

    pub fn index_of(&self, x: &LatticePoint) -> Option<usize> {
        box_index(x, self.radius)
    }

    pub fn point(&self, index: usize) -> LatticePoint {
        let side = self.side() as usize;
        let mut rest = index;
        let mut coords = vec![0i64; self.dim];
        for c in coords.iter_mut().rev() {
            *c = (rest % side) as i64 - self.radius;
            rest /= side;
        }
        LatticePoint(coords)
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.columns[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map(|(_, v)| *v)
            .unwrap_or_default()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col {
                m[(*r, c)] = *v;
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// `T v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.size()];
        for (c, col) in self.columns.iter().enumerate() {
            let vc = v[c];
            if vc.re == 0.0 && vc.im == 0.0 {
                continue;
            }
            for (r, a) in col {
                out[*r] += a * vc;
            }
        }
        out
    }

    /// `T* w`.
    pub fn apply_adjoint(&self, w: &[Complex64]) -> Vec<Complex64> {
        self.columns
            .iter()
            .map(|col| col.iter().map(|(r, a)| a.conj() * w[*r]).sum())
            .collect()
    }
}

fn box_index(x: &LatticePoint, radius: i64) -> Option<usize> {
    let side = 2 * radius + 1;
    let mut idx: i64 = 0;
    for &c in x.coords() {
        if c < -radius || c > radius {
            return None;
        }
        idx = idx * side + (c + radius);
    }
    Some(idx as usize)
}

fn box_size(dim: usize, radius: i64) -> Option<usize> {
    let side = usize::try_from(2 * radius + 1).ok()?;
    side.checked_pow(u32::try_from(dim).ok()?)
}

pub fn build_truncation(f: &Element, radius: i64) -> Result<TruncatedOperator> {
    build_truncation_capped(f, radius, ROW_CAP)
}

pub fn build_truncation_capped(f: &Element, radius: i64, cap: usize) -> Result<TruncatedOperator> {
    if radius <= 0 {
        return Err(Error::InvalidInput(format!("box radius must be positive, got {radius}")));
    }
    let dim = f.theta().n();
    let rows = box_size(dim, radius).unwrap_or(usize::MAX);
    if rows > cap {
        return Err(Error::MemoryCap { rows, cap });
    }
    let theta: &ThetaData = f.theta();
    let mut op = TruncatedOperator {
        radius,
        dim,
        columns: Vec::with_capacity(rows),
        source: f.clone(),
    };
    for c in 0..rows {
        let z = op.point(c);
        let mut col = Vec::with_capacity(f.support_len());
        for (y, a) in f.iter() {
            let x = y.checked_add(&z)?;
            if let Some(r) = box_index(&x, radius) {
                col.push((r, a * theta.render(&theta.sigma(y, &z)?)));
            }
        }
        col.sort_by_key(|(r, _)| *r);
        op.columns.push(col);
    }
    Ok(op)
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn start_vector(size: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_7a11);
    let v: Vec<Complex64> = (0..size)
        .map(|_| Complex64::new(rng.random_range(0.5..1.5), rng.random_range(-0.5..0.5)))
        .collect();
    let n = vec_norm(&v);
    v.into_iter().map(|c| c / n).collect()
}

/// Power iteration for the largest singular value of a linear map given by
/// `forward` and `adjoint`. Returns `(estimate, iterations)`.
fn largest_singular_value<F, G>(
    size: usize,
    forward: F,
    adjoint: G,
    tol: f64,
    max_iterations: usize,
) -> Result<(f64, usize)>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
    G: Fn(&[Complex64]) -> Vec<Complex64>,
{
    if size == 0 {
        return Ok((0.0, 0));
    }
    let mut v = start_vector(size);
    let mut prev = f64::NAN;
    for it in 1..=max_iterations {
        let w = forward(&v);
        // ‖Tv‖ with ‖v‖ = 1 never exceeds the largest singular value
        let s = vec_norm(&w);
        let u = adjoint(&w);
        let nu = vec_norm(&u);
        if nu == 0.0 {
            return Ok((s, it));
        }
        if (s - prev).abs() <= tol * s {
            return Ok((s, it));
        }
        prev = s;
        v = u.into_iter().map(|c| c / nu).collect();
    }
    Err(Error::NonConvergence {
        iterations: max_iterations,
        last_estimate: prev,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpNormReport {
    pub radius: i64,
    /// Largest singular value of the compression: a lower bound on `‖λ(f)‖`.
    pub lower_bound: f64,
    /// `‖f‖₁`, the a-priori upper bound.
    pub upper_bound: f64,
    pub iterations: usize,
}

pub fn opnorm_estimate(t: &TruncatedOperator, tol: f64) -> Result<OpNormReport> {
    opnorm_estimate_capped(t, tol, DEFAULT_MAX_ITERATIONS)
}

pub fn opnorm_estimate_capped(
    t: &TruncatedOperator,
    tol: f64,
    max_iterations: usize,
) -> Result<OpNormReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let (lower_bound, iterations) = if t.is_zero() {
        (0.0, 0)
    } else {
        largest_singular_value(
            t.size(),
            |v| t.apply(v),
            |w| t.apply_adjoint(w),
            tol,
            max_iterations,
        )?
    };
    let upper_bound = t.source.l1_norm();
    Ok(OpNormReport {
        radius: t.radius,
        // rounding can push the estimate a few ulps past ‖f‖₁
        lower_bound: lower_bound.min(upper_bound),
        upper_bound,
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseNormReport {
    pub radius: i64,
    /// Smallest singular value of the compression.
    pub s_min: f64,
    /// `1 / s_min`, the norm of the truncated inverse.
    pub inverse_norm: f64,
    /// `1 / (|λ| − 1)` when `f = λδ_0 − c δ_x` with `|c| = 1 < |λ|`.
    pub unitary_bound: Option<f64>,
    pub caveat: &'static str,
}

const INVERSE_CAVEAT: &str =
    "compressions can misjudge invertibility; only the unitary bound case is certified";

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Relative residual at which the normal-equation solves stop.
const SOLVE_TOL: f64 = 1e-14;

/// Solves `T*T x = b` by conjugate gradients.
fn normal_solve(t: &TruncatedOperator, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let gram = |v: &[Complex64]| t.apply_adjoint(&t.apply(v));
    let b_norm = vec_norm(b);
    let mut x = vec![Complex64::new(0.0, 0.0); b.len()];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    let max_iterations = 10 * b.len() + 100;
    for _ in 0..max_iterations {
        if rr.sqrt() <= SOLVE_TOL * b_norm {
            return Ok(x);
        }
        let ap = gram(&p);
        let pap = dot(&p, &ap).re;
        if !(pap > 0.0) {
            return Err(Error::Singular);
        }
        let alpha = rr / pap;
        for ((xi, ri), (pi, api)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&ap)) {
            *xi += alpha * pi;
            *ri -= alpha * api;
        }
        let rr_next = dot(&r, &r).re;
        let beta = rr_next / rr;
        rr = rr_next;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iterations,
        last_estimate: rr.sqrt() / b_norm,
    })
}

/// Norm of the inverse of the compression of `λ(f)` to the box of radius `N`.
///
/// Power iteration on `(T*T)^{-1}`, applied through conjugate-gradient
/// solves; the Rayleigh quotient approaches `1/s_min²` from below.
pub fn cstar_inverse_norm(f: &Element, radius: i64) -> Result<InverseNormReport> {
    let t = build_truncation(f, radius)?;
    if t.is_zero() {
        return Err(Error::Singular);
    }
    let mut v = start_vector(t.size());
    let mut prev = f64::NAN;
    let mut lambda = f64::NAN;
    let mut converged = false;
    for _ in 0..DEFAULT_MAX_ITERATIONS {
        let w = normal_solve(&t, &v)?;
        lambda = dot(&v, &w).re;
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::Singular);
        }
        if (lambda - prev).abs() <= 1e-13 * lambda {
            converged = true;
            break;
        }
        prev = lambda;
        let nw = vec_norm(&w);
        v = w.into_iter().map(|c| c / nw).collect();
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: DEFAULT_MAX_ITERATIONS,
            last_estimate: lambda.sqrt(),
        });
    }
    let inverse_norm = lambda.sqrt();
    Ok(InverseNormReport {
        radius,
        s_min: 1.0 / inverse_norm,
        inverse_norm,
        unitary_bound: unitary_bound(f),
        caveat: INVERSE_CAVEAT,
    })
}

fn unitary_bound(f: &Element) -> Option<f64> {
    let n = f.theta().n();
    let lambda = f.get(&LatticePoint::zero(n)).norm();
    let others: Vec<_> = f.iter().filter(|(x, _)| !x.is_zero()).collect();
    match others.as_slice() {
        [(_, c)] if (c.norm() - 1.0).abs() < 1e-15 && lambda > 1.0 => Some(1.0 / (lambda - 1.0)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralRadiusReport {
    pub weight: String,
    pub x: LatticePoint,
    /// `‖δ_x^{♮k}‖_{ℓ¹_v}^{1/k}` for `k = 1..=n_max`.
    pub sequence: Vec<f64>,
    /// `v(kx)^{1/k}` from the GRS profile.
    pub weight_sequence: Vec<f64>,
    pub max_deviation: f64,
    pub verdict: GrsVerdict,
}

/// Spectral radius of `δ_x` in `ℓ¹_v(Z^n, θ)` through its powers.
pub fn spectral_radius_l1v(
    theta: std::sync::Arc<ThetaData>,
    v: &Weight,
    x: &LatticePoint,
    n_max: usize,
) -> Result<SpectralRadiusReport> {
    let profile = grs_profile(v, x, n_max)?;
    let delta = Element::delta(theta.clone(), x.clone())?;
    let mut power = Element::unit(theta);
    let mut sequence = Vec::with_capacity(n_max);
    for k in 1..=n_max {
        power = power.convolve(&delta)?;
        sequence.push((power.log_weighted_norm(v) / k as f64).exp());
    }
    let max_deviation = sequence
        .iter()
        .zip(&profile.sequence)
        .map(|(a, b)| (a - b).abs() / b)
        .fold(0.0, f64::max);
    Ok(SpectralRadiusReport {
        weight: profile.weight,
        x: x.clone(),
        sequence,
        weight_sequence: profile.sequence,
        max_deviation,
        verdict: profile.verdict,
    })
}
