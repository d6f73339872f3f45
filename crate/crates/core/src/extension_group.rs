//! The central extension `G = Z^n × T` and the embedding `f ↦ f°` of the
//! twisted algebra into `L¹(G)`.
//!
//! Functions on `G` are stored by their Fourier components in the circle
//! variable, `F(x, ξ) = Σ_k F_k(x) ξ^k`. Integrating over the circle then
//! reduces to matching frequencies, so convolution and involution are exact
//! up to the rendering of phases.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::phases::{LatticePoint, ThetaData, UnitPhase};
use crate::weights::Weight;

/// A point `(x, ξ)` of `G` with an exact circle coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPoint {
    pub x: LatticePoint,
    pub xi: UnitPhase,
}

impl GPoint {
    pub fn identity(n: usize) -> Self {
        GPoint {
            x: LatticePoint::zero(n),
            xi: UnitPhase::one(),
        }
    }

    /// `(x, ξ)(y, η) = (x + y, σ(x, y) ξ η)`.
    pub fn mul(&self, other: &Self, theta: &ThetaData) -> Result<Self> {
        Ok(GPoint {
            x: self.x.checked_add(&other.x)?,
            xi: theta
                .sigma(&self.x, &other.x)?
                .checked_mul(&self.xi)?
                .checked_mul(&other.xi)?,
        })
    }

    /// `(x, ξ)^{-1} = (−x, conj(σ(x, −x) ξ))`.
    pub fn inverse(&self, theta: &ThetaData) -> Result<Self> {
        let minus = self.x.neg();
        Ok(GPoint {
            xi: theta.sigma(&self.x, &minus)?.checked_mul(&self.xi)?.checked_conj()?,
            x: minus,
        })
    }
}

/// A function on `G` with finitely many circle frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct GFunction {
    theta: Arc<ThetaData>,
    comps: BTreeMap<(LatticePoint, i64), Complex64>,
}

impl GFunction {
    pub fn zero(theta: Arc<ThetaData>) -> Self {
        GFunction {
            theta,
            comps: BTreeMap::new(),
        }
    }

    pub fn from_components<I>(theta: Arc<ThetaData>, comps: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((LatticePoint, i64), Complex64)>,
    {
        let mut out = BTreeMap::new();
        for ((x, k), c) in comps {
            Error::check_dim(theta.n(), x.dim())?;
            *out.entry((x, k)).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        out.retain(|_, c: &mut Complex64| c.re != 0.0 || c.im != 0.0);
        Ok(GFunction { theta, comps: out })
    }

    /// `f°(x, ξ) = f(x) conj(ξ)`: a single component at frequency −1.
    pub fn circ(f: &Element) -> Self {
        GFunction {
            theta: f.theta().clone(),
            comps: f.iter().map(|(x, c)| ((x.clone(), -1), *c)).collect(),
        }
    }

    pub fn theta(&self) -> &Arc<ThetaData> {
        &self.theta
    }

    pub fn component(&self, x: &LatticePoint, k: i64) -> Complex64 {
        self.comps.get(&(x.clone(), k)).copied().unwrap_or_default()
    }

    pub fn components(&self) -> impl Iterator<Item = (&(LatticePoint, i64), &Complex64)> {
        self.comps.iter()
    }

    pub fn frequencies(&self) -> Vec<i64> {
        let mut ks: Vec<i64> = self.comps.keys().map(|(_, k)| *k).collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    pub fn max_abs_frequency(&self) -> u64 {
        self.comps.keys().map(|(_, k)| k.unsigned_abs()).max().unwrap_or(0)
    }

    /// Group convolution on `G`, computed frequency by frequency:
    /// `(F ⋆ H)_k(x) = Σ_y F_k(y) H_k(x − y) σ(y, x − y)^{−k}`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.theta.n(), other.theta.n())?;
        if *self.theta != *other.theta {
            return Err(Error::InvalidInput("functions live on different groups".into()));
        }
        let mut by_freq: BTreeMap<i64, Vec<(&LatticePoint, &Complex64)>> = BTreeMap::new();
        for ((z, k), c) in &other.comps {
            by_freq.entry(*k).or_default().push((z, c));
        }
        let mut comps: BTreeMap<(LatticePoint, i64), Complex64> = BTreeMap::new();
        for ((y, k), a) in &self.comps {
            let Some(partners) = by_freq.get(k) else { continue };
            for (z, b) in partners {
                let twist = self.theta.sigma(y, z)?.checked_pow(-k)?;
                *comps.entry((y.checked_add(z)?, *k)).or_default() +=
                    a * *b * self.theta.render(&twist);
            }
        }
        comps.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Ok(GFunction {
            theta: self.theta.clone(),
            comps,
        })
    }

    /// `F*(a) = conj(F(a^{-1}))`, i.e. `(F*)_k(x) = conj(F_k(−x)) σ(x, −x)^k`.
    pub fn involution(&self) -> Result<Self> {
        let comps = self
            .comps
            .iter()
            .map(|((y, k), a)| {
                let x = y.neg();
                let phase = self.theta.sigma(&x, y)?.checked_pow(*k)?;
                Ok(((x, *k), a.conj() * self.theta.render(&phase)))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(GFunction {
            theta: self.theta.clone(),
            comps,
        })
    }

    /// `‖F‖_{L¹(G)}`. Exact when only one frequency occurs, otherwise the
    /// circle integral per `x` uses the periodic trapezoid rule.
    pub fn norm(&self, quad_points: usize) -> Result<f64> {
        self.weighted_norm(&ExtendedWeight::new(Weight::one()), quad_points)
    }

    pub fn weighted_norm(&self, omega: &ExtendedWeight, quad_points: usize) -> Result<f64> {
        let freqs = self.frequencies();
        if freqs.len() <= 1 {
            return Ok(self
                .comps
                .iter()
                .map(|((x, _), c)| c.norm() * omega.evaluate(x))
                .sum());
        }
        let needed = 2 * self.max_abs_frequency() as usize + 1;
        if quad_points < needed {
            return Err(Error::InvalidInput(format!(
                "{quad_points} quadrature points, need at least {needed}"
            )));
        }
        let mut per_x: BTreeMap<&LatticePoint, Vec<(i64, Complex64)>> = BTreeMap::new();
        for ((x, k), c) in &self.comps {
            per_x.entry(x).or_default().push((*k, *c));
        }
        let nodes: Vec<f64> = (0..quad_points)
            .map(|q| std::f64::consts::TAU * q as f64 / quad_points as f64)
            .collect();
        let mut total = 0.0;
        for (x, terms) in per_x {
            let mean = nodes
                .iter()
                .map(|t| {
                    terms
                        .iter()
                        .map(|(k, c)| c * Complex64::from_polar(1.0, *k as f64 * t))
                        .sum::<Complex64>()
                        .norm()
                })
                .sum::<f64>()
                / quad_points as f64;
            total += mean * omega.evaluate(x);
        }
        Ok(total)
    }
}

/// A weight `ω(x, ξ) = v(x)` on `G` extended from `Z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedWeight {
    pub base: Weight,
}

impl ExtendedWeight {
    pub fn new(base: Weight) -> Self {
        ExtendedWeight { base }
    }

    pub fn evaluate(&self, x: &LatticePoint) -> f64 {
        self.base.evaluate(x)
    }
}

/// `ω(x, ξ) = v(x)`.
pub fn extend_weight(v: &Weight) -> ExtendedWeight {
    ExtendedWeight::new(v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> LatticePoint {
        LatticePoint(v.to_vec())
    }

    fn half() -> Arc<ThetaData> {
        Arc::new(ThetaData::rational(2, &[(2, 1, 1, 3)]).unwrap())
    }

    fn sample(theta: &Arc<ThetaData>) -> Element {
        Element::from_terms(
            theta.clone(),
            [
                (p(&[0, 0]), Complex64::new(1.0, 0.5)),
                (p(&[1, -2]), Complex64::new(-0.25, 2.0)),
                (p(&[3, 1]), Complex64::new(0.0, -1.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn circ_of_unit() {
        let theta = half();
        let c = GFunction::circ(&Element::unit(theta));
        assert_eq!(c.components().count(), 1);
        assert_eq!(c.component(&p(&[0, 0]), -1), Complex64::new(1.0, 0.0));
        assert_eq!(c.involution().unwrap(), c);
    }

    #[test]
    fn circ_is_isometric_and_multiplicative() {
        let theta = half();
        let f = sample(&theta);
        let g = f.involution().unwrap().scale(Complex64::new(0.5, 0.5));
        assert_eq!(GFunction::circ(&f).norm(8).unwrap(), f.l1_norm());
        let lhs = GFunction::circ(&f.convolve(&g).unwrap());
        let rhs = GFunction::circ(&f).convolve(&GFunction::circ(&g)).unwrap();
        for ((x, k), c) in lhs.components() {
            assert!((c - rhs.component(x, *k)).norm() < 1e-12);
        }
        assert_eq!(lhs.components().count(), rhs.components().count());
    }

    #[test]
    fn unit_is_neutral() {
        let theta = half();
        let f = GFunction::circ(&sample(&theta));
        let e = GFunction::circ(&Element::unit(theta));
        assert_eq!(f.convolve(&e).unwrap(), f);
    }

    #[test]
    fn involution_twice_is_identity() {
        let theta = half();
        let f = GFunction::from_components(
            theta,
            [
                ((p(&[1, 1]), 2), Complex64::new(0.3, 0.1)),
                ((p(&[-2, 1]), -3), Complex64::new(1.0, -1.0)),
            ],
        )
        .unwrap();
        let back = f.involution().unwrap().involution().unwrap();
        for ((x, k), c) in f.components() {
            assert!((c - back.component(x, *k)).norm() < 1e-14);
        }
    }

    #[test]
    fn norm_of_zero_and_quadrature_guard() {
        let theta = half();
        assert_eq!(GFunction::zero(theta.clone()).norm(1).unwrap(), 0.0);
        let f = GFunction::from_components(
            theta,
            [
                ((p(&[0, 0]), 0), Complex64::new(1.0, 0.0)),
                ((p(&[0, 0]), 1), Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert!(f.norm(2).is_err());
        let v = f.norm(4096).unwrap();
        assert!((v - 4.0 / std::f64::consts::PI).abs() < 1e-6, "{v}");
    }

    #[test]
    fn extended_weight_norms() {
        let theta = half();
        let f = sample(&theta);
        let v = Weight::polynomial(2.0);
        let omega = extend_weight(&v);
        assert_eq!(GFunction::circ(&f).weighted_norm(&omega, 8).unwrap(), f.weighted_norm(&v));
        let y = p(&[2, -5]);
        let d = GFunction::circ(&Element::delta(theta, y.clone()).unwrap());
        assert_eq!(d.weighted_norm(&omega, 8).unwrap(), v.evaluate(&y));
        assert_eq!(
            d.weighted_norm(&extend_weight(&Weight::one()), 8).unwrap(),
            d.norm(8).unwrap()
        );
    }

    #[test]
    fn group_inverse_and_identity() {
        let theta = half();
        let a = GPoint {
            x: p(&[2, -1]),
            xi: UnitPhase::rational(1, 5).unwrap(),
        };
        let e = GPoint::identity(2);
        assert_eq!(a.mul(&e, &theta).unwrap(), a);
        assert_eq!(e.mul(&a, &theta).unwrap(), a);
        assert_eq!(a.mul(&a.inverse(&theta).unwrap(), &theta).unwrap(), e);
        assert_eq!(a.inverse(&theta).unwrap().mul(&a, &theta).unwrap(), e);
    }
}
