//! Least-squares classification of coefficient decay: polynomial
//! `(1+|x|)^{-s}`, subexponential `e^{-a|x|^b}` or exponential `e^{-a|x|}`.

use serde::Serialize;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::weights::LatticeNorm;

pub const MIN_FIT_SUPPORT: usize = 8;

const B_MIN: f64 = 0.01;
const B_MAX: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayModel {
    Polynomial,
    Subexponential,
    Exponential,
}

/// `log|f(x)| ≈ intercept − rate·φ(|x|)` with `φ` fixed by the model.
///
/// `rate` is `s` for the polynomial model and `a` otherwise; `exponent` is the
/// fitted `b` of the subexponential model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelFit {
    pub model: DecayModel,
    pub intercept: f64,
    pub rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    /// `None` when the data show no decay.
    pub best: Option<ModelFit>,
    pub fits: Vec<ModelFit>,
    pub no_decay: bool,
    pub points: usize,
}

impl DecayFit {
    pub fn model(&self) -> Option<DecayModel> {
        self.best.as_ref().map(|f| f.model)
    }
}

/// Returns `(intercept, rate, rss)` for `y ≈ c − rate·φ`.
fn linear_fit(phi: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = phi.len() as f64;
    let mp = phi.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = phi.iter().map(|p| (p - mp) * (p - mp)).sum();
    if sxx <= f64::EPSILON * phi.iter().map(|p| p * p).sum::<f64>().max(1.0) {
        return None;
    }
    let sxy: f64 = phi.iter().zip(y).map(|(p, v)| (p - mp) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mp;
    let rss = phi
        .iter()
        .zip(y)
        .map(|(p, v)| (v - intercept - slope * p).powi(2))
        .sum();
    Some((intercept, -slope, rss))
}

fn fit_with_exponent(r: &[f64], y: &[f64], b: f64) -> Option<(f64, f64, f64)> {
    let phi: Vec<f64> = r.iter().map(|x| x.powf(b)).collect();
    linear_fit(&phi, y)
}

fn fit_subexponential(r: &[f64], y: &[f64]) -> Option<(f64, f64, f64, f64)> {
    let rss_at = |b: f64| fit_with_exponent(r, y, b).map_or(f64::INFINITY, |f| f.2);
    let steps = 98;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| B_MIN + (B_MAX - B_MIN) * i as f64 / steps as f64)
        .collect();
    let best = grid
        .iter()
        .copied()
        .min_by(|a, b| rss_at(*a).total_cmp(&rss_at(*b)))?;
    let h = (B_MAX - B_MIN) / steps as f64;
    let (mut lo, mut hi) = ((best - h).max(B_MIN), (best + h).min(B_MAX));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fc, mut fd) = (rss_at(c), rss_at(d));
    while hi - lo > 1e-12 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = rss_at(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = rss_at(d);
        }
    }
    let b = (lo + hi) / 2.0;
    let (intercept, rate, rss) = fit_with_exponent(r, y, b)?;
    Some((intercept, rate, b, rss))
}

pub fn decay_fit(f: &Element) -> Result<DecayFit> {
    decay_fit_with_norm(f, LatticeNorm::default())
}

/// Fits all three decay laws to `log|f(x)|` against `|x|` and picks the best.
///
/// The subexponential law has one extra parameter, so it is preferred only
/// when it at least halves the residual of both two-parameter laws and its
/// exponent stays away from the ends of `(0, 1)`.
pub fn decay_fit_with_norm(f: &Element, norm: LatticeNorm) -> Result<DecayFit> {
    if f.support_len() < MIN_FIT_SUPPORT {
        return Err(Error::InsufficientSupport {
            found: f.support_len(),
            required: MIN_FIT_SUPPORT,
        });
    }
    let (r, y): (Vec<f64>, Vec<f64>) = f.iter().map(|(x, c)| (norm.eval(x), c.norm().ln())).unzip();
    let points = r.len();
    let rms = |rss: f64| (rss / points as f64).sqrt();

    let mut fits = Vec::new();
    let log1p: Vec<f64> = r.iter().map(|x| x.ln_1p()).collect();
    if let Some((intercept, rate, rss)) = linear_fit(&log1p, &y) {
        fits.push(ModelFit {
            model: DecayModel::Polynomial,
            intercept,
            rate,
            exponent: None,
            residual: rms(rss),
        });
    }
    if let Some((intercept, rate, b, rss)) = fit_subexponential(&r, &y) {
        fits.push(ModelFit {
            model: DecayModel::Subexponential,
            intercept,
            rate,
            exponent: Some(b),
            residual: rms(rss),
        });
    }
    if let Some((intercept, rate, rss)) = linear_fit(&r, &y) {
        fits.push(ModelFit {
            model: DecayModel::Exponential,
            intercept,
            rate,
            exponent: None,
            residual: rms(rss),
        });
    }

    let y_span = y.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - y.iter().copied().fold(f64::INFINITY, f64::min);
    let two_param = fits
        .iter()
        .filter(|m| m.model != DecayModel::Subexponential)
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .cloned();
    let sub = fits.iter().find(|m| m.model == DecayModel::Subexponential).cloned();
    let best = match (two_param, sub) {
        (Some(t), Some(s)) => {
            let exact = t.residual <= 1e-10 * y_span.max(1.0);
            let b = s.exponent.unwrap_or(0.5);
            let interior = b > B_MIN + 0.01 && b < B_MAX - 0.01;
            if !exact && interior && s.residual < 0.5 * t.residual {
                Some(s)
            } else {
                Some(t)
            }
        }
        (t, s) => t.or(s),
    };
    let no_decay = y_span <= 1e-12 * y.iter().map(|v| v.abs()).fold(1.0, f64::max)
        || best.as_ref().is_none_or(|m| m.rate <= 0.0);
    Ok(DecayFit {
        best: if no_decay { None } else { best },
        fits,
        no_decay,
        points,
    })
}
