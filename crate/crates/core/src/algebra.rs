//! Finitely supported elements of the twisted convolution algebra
//! `ℓ¹_v(Z^n, θ)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phases::{LatticePoint, ThetaData, UnitPhase};
use crate::weights::Weight;

/// A finitely supported function `Z^n → C` multiplied by twisted convolution.
///
/// Coefficients that are exactly zero are never stored.
#[derive(Debug, Clone)]
pub struct Element {
    theta: Arc<ThetaData>,
    coeffs: BTreeMap<LatticePoint, Complex64>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        same_theta(&self.theta, &other.theta) && self.coeffs == other.coeffs
    }
}

fn same_theta(a: &Arc<ThetaData>, b: &Arc<ThetaData>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Element {
    pub fn zero(theta: Arc<ThetaData>) -> Self {
        Element {
            theta,
            coeffs: BTreeMap::new(),
        }
    }

    /// The Dirac function `δ_y`.
    pub fn delta(theta: Arc<ThetaData>, y: LatticePoint) -> Result<Self> {
        Error::check_dim(theta.n(), y.dim())?;
        let mut coeffs = BTreeMap::new();
        coeffs.insert(y, Complex64::new(1.0, 0.0));
        Ok(Element { theta, coeffs })
    }

    /// The unit `δ_0`.
    pub fn unit(theta: Arc<ThetaData>) -> Self {
        let n = theta.n();
        Self::delta(theta, LatticePoint::zero(n)).expect("dimension matches")
    }

    /// Sums coefficients at repeated points.
    pub fn from_terms<I>(theta: Arc<ThetaData>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (LatticePoint, Complex64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (x, c) in terms {
            Error::check_dim(theta.n(), x.dim())?;
            *coeffs.entry(x).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let mut out = Element { theta, coeffs };
        out.drop_exact_zeros();
        Ok(out)
    }

    fn drop_exact_zeros(&mut self) {
        self.coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
    }

    pub fn theta(&self) -> &Arc<ThetaData> {
        &self.theta
    }

    pub fn get(&self, x: &LatticePoint) -> Complex64 {
        self.coeffs.get(x).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LatticePoint, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|x|_∞` over the support.
    pub fn support_radius(&self) -> u64 {
        self.coeffs.keys().map(LatticePoint::max_abs).max().unwrap_or(0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        Error::check_dim(self.theta.n(), other.theta.n())?;
        if !same_theta(&self.theta, &other.theta) {
            return Err(Error::InvalidInput(
                "elements belong to different twisted algebras".into(),
            ));
        }
        Ok(())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Element {
            theta: self.theta.clone(),
            coeffs: self.coeffs.iter().map(|(x, a)| (x.clone(), a * c)).collect(),
        };
        out.drop_exact_zeros();
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut coeffs = self.coeffs.clone();
        for (x, c) in &other.coeffs {
            *coeffs.entry(x.clone()).or_default() += c;
        }
        let mut out = Element {
            theta: self.theta.clone(),
            coeffs,
        };
        out.drop_exact_zeros();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Twisted convolution `(f ♮ g)(x) = Σ_y f(y) g(x−y) σ(y, x−y)`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut coeffs: BTreeMap<LatticePoint, Complex64> = BTreeMap::new();
        for (y, a) in &self.coeffs {
            for (z, b) in &other.coeffs {
                let phase = self.theta.render(&self.theta.sigma(y, z)?);
                *coeffs.entry(y.checked_add(z)?).or_default() += a * b * phase;
            }
        }
        let mut out = Element {
            theta: self.theta.clone(),
            coeffs,
        };
        out.drop_exact_zeros();
        Ok(out)
    }

    /// `f*(x) = conj(σ(x, −x) f(−x))`.
    pub fn involution(&self) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(y, a)| {
                let x = y.neg();
                let phase = self.theta.render(&self.theta.sigma(&x, y)?);
                Ok((x, (phase * a).conj()))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Element {
            theta: self.theta.clone(),
            coeffs,
        })
    }

    /// `k`-fold twisted product; `power(0)` is `δ_0`.
    pub fn power(&self, k: u32) -> Result<Self> {
        let mut acc = Element::unit(self.theta.clone());
        for _ in 0..k {
            acc = acc.convolve(self)?;
        }
        Ok(acc)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// `Σ_x |f(x)| v(x)`.
    pub fn weighted_norm(&self, v: &Weight) -> f64 {
        self.coeffs.iter().map(|(x, c)| c.norm() * v.evaluate(x)).sum()
    }

    /// `log ‖f‖_{ℓ¹_v}`, evaluated without overflow for fast-growing weights.
    pub fn log_weighted_norm(&self, v: &Weight) -> f64 {
        let logs: Vec<f64> = self
            .coeffs
            .iter()
            .map(|(x, c)| c.norm().ln() + v.log_value(x))
            .collect();
        log_sum_exp(&logs)
    }

    /// Drops coefficients with modulus at most `eps`.
    pub fn prune(&self, eps: f64) -> Self {
        Element {
            theta: self.theta.clone(),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| c.norm() > eps)
                .map(|(x, c)| (x.clone(), *c))
                .collect(),
        }
    }

    /// Largest coefficientwise difference `max_x |f(x) − g(x)|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (x, a) in &self.coeffs {
            worst = worst.max((a - other.get(x)).norm());
        }
        for (x, b) in &other.coeffs {
            if !self.coeffs.contains_key(x) {
                worst = worst.max(b.norm());
            }
        }
        worst
    }

    pub fn to_entries(&self) -> Vec<ElementEntry> {
        self.coeffs
            .iter()
            .map(|(x, c)| ElementEntry {
                x: x.0.clone(),
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    /// Parses the element file format; duplicate points are rejected.
    pub fn from_entries(theta: Arc<ThetaData>, entries: Vec<ElementEntry>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for e in entries {
            let x = LatticePoint(e.x);
            Error::check_dim(theta.n(), x.dim())?;
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::Config(format!("non-finite coefficient at {x}")));
            }
            if coeffs.insert(x.clone(), Complex64::new(e.re, e.im)).is_some() {
                return Err(Error::Config(format!("duplicate point {x} in element file")));
            }
        }
        let mut out = Element { theta, coeffs };
        out.drop_exact_zeros();
        Ok(out)
    }

    pub fn from_json(theta: Arc<ThetaData>, text: &str) -> Result<Self> {
        let entries: Vec<ElementEntry> =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_entries(theta, entries)
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_entries().serialize(s)
    }
}

/// One `{"x":[...], "re":..., "im":...}` record of an element file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementEntry {
    pub x: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

pub(crate) fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
}

/// A Dirac function with an exact phase: `phase · δ_point`.
///
/// Products of monomials never leave this form, so conjugation phases can be
/// compared exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub phase: UnitPhase,
    pub point: LatticePoint,
}

impl Monomial {
    pub fn delta(point: LatticePoint) -> Self {
        Monomial {
            phase: UnitPhase::one(),
            point,
        }
    }

    pub fn mul(&self, other: &Self, theta: &ThetaData) -> Result<Self> {
        let sigma = theta.sigma(&self.point, &other.point)?;
        Ok(Monomial {
            phase: self.phase.checked_mul(&other.phase)?.checked_mul(&sigma)?,
            point: self.point.checked_add(&other.point)?,
        })
    }

    /// `(c δ_y)* = conj(c) conj(σ(−y, y)) δ_{−y}`.
    pub fn adjoint(&self, theta: &ThetaData) -> Result<Self> {
        let minus = self.point.neg();
        let sigma = theta.sigma(&minus, &self.point)?;
        Ok(Monomial {
            phase: self.phase.checked_mul(&sigma)?.checked_conj()?,
            point: minus,
        })
    }

    pub fn to_element(&self, theta: Arc<ThetaData>) -> Result<Element> {
        let c = theta.render(&self.phase);
        Ok(Element::delta(theta, self.point.clone())?.scale(c))
    }
}
