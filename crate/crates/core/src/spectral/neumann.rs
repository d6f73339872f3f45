//! Neumann-series inversion of `f = c·δ_0 − h`:
//! `f^{-1} = c^{-1} Σ_k (h/c)^{♮k}`, tracked in `ℓ¹` and in `ℓ¹_v`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::decay::{decay_fit_with_norm, DecayFit, MIN_FIT_SUPPORT};
use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::phases::LatticePoint;
use crate::weights::Weight;

/// Terms per block in the divergence test.
pub const DIVERGENCE_BLOCK: usize = 10;
/// Consecutive growing blocks that raise the divergence flag.
pub const DIVERGENCE_RUN: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct InversionReport {
    /// The partial sum at termination.
    pub inverse: Element,
    /// `‖f ♮ g − δ_0‖₁`, recomputed from the final partial sum.
    pub residual_l1: f64,
    /// `‖f ♮ g − δ_0‖_{ℓ¹_v}`.
    pub residual_weighted: f64,
    pub terms_used: usize,
    pub tolerance: f64,
    /// Number of terms after which the `ℓ¹` residual first met the tolerance.
    pub l1_converged_at: Option<usize>,
    pub weighted_converged_at: Option<usize>,
    pub diverged_l1: bool,
    /// Set when the `ℓ¹_v` mass added per block kept growing.
    pub diverged_weighted: bool,
    pub weight: String,
    /// `‖g‖₁` under `"l1"` and `‖g‖_{ℓ¹_v}` under the weight's name.
    pub weighted_norms: BTreeMap<String, f64>,
    /// `‖c^{-1}(h/c)^{♮k}‖₁` for each term `k`.
    pub term_l1_norms: Vec<f64>,
    /// `‖c^{-1}(h/c)^{♮k}‖_{ℓ¹_v}` for each term `k`.
    pub term_weighted_norms: Vec<f64>,
    /// `‖Σ_{j≤k} c^{-1}(h/c)^{♮j}‖_{ℓ¹_v}` after each term.
    pub partial_sum_weighted_norms: Vec<f64>,
    pub decay_fit: Option<DecayFit>,
}

/// Length of the trailing run of strictly growing block sums.
fn trailing_growth_run(terms: &[f64]) -> usize {
    let blocks: Vec<f64> = terms
        .chunks_exact(DIVERGENCE_BLOCK)
        .map(|b| b.iter().sum())
        .collect();
    blocks
        .windows(2)
        .rev()
        .take_while(|w| w[1] > w[0])
        .count()
}

/// Runs the series until the `ℓ¹_v` residual (which dominates the `ℓ¹`
/// residual) drops below `tol`, or `max_terms` terms have been summed.
pub fn neumann_invert(f: &Element, tol: f64, max_terms: usize, v: &Weight) -> Result<InversionReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if max_terms == 0 {
        return Err(Error::InvalidInput("max_terms must be at least 1".into()));
    }
    let theta = f.theta().clone();
    let origin = LatticePoint::zero(theta.n());
    let c = f.get(&origin);
    if c.norm() == 0.0 {
        return Err(Error::NotDiagonallyDominant);
    }
    let c_inv = Complex64::new(1.0, 0.0) / c;
    // u = h/c = δ_0 − f/c
    let u = Element::unit(theta.clone()).sub(&f.scale(c_inv))?;

    let mut term = Element::unit(theta.clone()).scale(c_inv);
    let mut sum = term.clone();
    let mut term_l1_norms = vec![term.l1_norm()];
    let mut term_weighted_norms = vec![term.log_weighted_norm(v).exp()];
    let mut partial_sum_weighted_norms = vec![sum.log_weighted_norm(v).exp()];
    let mut l1_converged_at = None;
    let mut weighted_converged_at = None;
    let c_abs = c.norm();

    loop {
        let next = term.convolve(&u)?;
        // δ_0 − f ♮ S_K = u^{K+1} = c·t_{K+1}
        let res_l1 = c_abs * next.l1_norm();
        let res_w = c_abs * next.log_weighted_norm(v).exp();
        let used = term_l1_norms.len();
        if res_l1 <= tol && l1_converged_at.is_none() {
            l1_converged_at = Some(used);
        }
        if res_w <= tol {
            weighted_converged_at = Some(used);
            break;
        }
        if used >= max_terms {
            break;
        }
        sum = sum.add(&next)?;
        term_l1_norms.push(next.l1_norm());
        term_weighted_norms.push(next.log_weighted_norm(v).exp());
        partial_sum_weighted_norms.push(sum.log_weighted_norm(v).exp());
        term = next;
    }

    let residual = f.convolve(&sum)?.sub(&Element::unit(theta))?;
    let diverged_l1 = l1_converged_at.is_none() && trailing_growth_run(&term_l1_norms) >= DIVERGENCE_RUN;
    let diverged_weighted =
        weighted_converged_at.is_none() && trailing_growth_run(&term_weighted_norms) >= DIVERGENCE_RUN;
    let mut weighted_norms = BTreeMap::new();
    weighted_norms.insert("l1".to_string(), sum.l1_norm());
    weighted_norms.insert(v.name(), sum.log_weighted_norm(v).exp());
    let decay_fit = if sum.support_len() >= MIN_FIT_SUPPORT {
        Some(decay_fit_with_norm(&sum, v.norm)?)
    } else {
        None
    };
    Ok(InversionReport {
        residual_l1: residual.l1_norm(),
        residual_weighted: residual.log_weighted_norm(v).exp(),
        terms_used: term_l1_norms.len(),
        tolerance: tol,
        l1_converged_at,
        weighted_converged_at,
        diverged_l1,
        diverged_weighted,
        weight: v.name(),
        weighted_norms,
        term_l1_norms,
        term_weighted_norms,
        partial_sum_weighted_norms,
        decay_fit,
        inverse: sum,
    })
}
