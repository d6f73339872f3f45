//! Exact unit-circle phases and the bicharacter cocycle on `Z^n`.
//!
//! A phase `e^{2πi·angle}` is stored by its angle in the Q-module
//! `Q ⊕ Q·α_1 ⊕ … ⊕ Q·α_T`, where the `α_t` are declared irrational and
//! rationally independent together with 1. Only the rational part is reduced
//! mod 1, so equality of phases is exact equality of these coordinates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rational numbers with checked 128-bit numerators and denominators.
pub type Rational = Ratio<i128>;

/// A point of the integer lattice `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn zero(n: usize) -> Self {
        LatticePoint(vec![0; n])
    }

    /// The standard basis vector `e_j`, with `j` counted from 1.
    pub fn unit(n: usize, j: usize) -> Self {
        assert!(j >= 1 && j <= n, "generator index {j} out of range 1..={n}");
        let mut v = vec![0; n];
        v[j - 1] = 1;
        LatticePoint(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.dim(), other.dim())?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| i64::checked_add(*a, *b).ok_or(Error::Overflow("lattice addition")))
            .collect::<Result<Vec<_>>>()
            .map(LatticePoint)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.dim(), other.dim())?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| i64::checked_sub(*a, *b).ok_or(Error::Overflow("lattice subtraction")))
            .collect::<Result<Vec<_>>>()
            .map(LatticePoint)
    }

    pub fn checked_scale(&self, k: i64) -> Result<Self> {
        self.0
            .iter()
            .map(|a| i64::checked_mul(*a, k).ok_or(Error::Overflow("lattice scaling")))
            .collect::<Result<Vec<_>>>()
            .map(LatticePoint)
    }

    pub fn neg(&self) -> Self {
        LatticePoint(self.0.iter().map(|a| -a).collect())
    }

    /// Largest coordinate magnitude.
    pub fn max_abs(&self) -> u64 {
        self.0.iter().map(|a| a.unsigned_abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

/// Decimal approximations of the declared irrationals `α_1, …, α_T`.
///
/// The values are only used to render phases as complex numbers. Rational
/// independence of `{1, α_1, …, α_T}` is assumed, never checked.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IrrationalBasis {
    pub values: Vec<f64>,
}

impl IrrationalBasis {
    pub fn new(values: Vec<f64>) -> Self {
        IrrationalBasis { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn rat(num: i128, den: i128) -> Result<Rational> {
    if den == 0 {
        return Err(Error::InvalidInput("zero denominator".into()));
    }
    Ok(Rational::new(num, den))
}

fn frac(r: &Rational) -> Result<Rational> {
    r.checked_sub(&r.floor()).ok_or(Error::Overflow("mod-1 reduction"))
}

fn scale_rat(r: &Rational, k: i128) -> Result<Rational> {
    r.checked_mul(&Rational::from_integer(k))
        .ok_or(Error::Overflow("phase exponent"))
}

/// A point `e^{2πi·angle}` of the unit circle with an exact angle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitPhase {
    r0: Rational,
    irr: BTreeMap<usize, Rational>,
}

impl Default for UnitPhase {
    fn default() -> Self {
        UnitPhase::one()
    }
}

impl UnitPhase {
    /// The phase 1 (angle 0).
    pub fn one() -> Self {
        UnitPhase {
            r0: Rational::zero(),
            irr: BTreeMap::new(),
        }
    }

    pub fn rational(num: i128, den: i128) -> Result<Self> {
        Self::from_parts(rat(num, den)?, BTreeMap::new())
    }

    /// `coeff · α_index`, with no rational part.
    pub fn irrational(index: usize, coeff: Rational) -> Self {
        let mut irr = BTreeMap::new();
        if !coeff.is_zero() {
            irr.insert(index, coeff);
        }
        UnitPhase {
            r0: Rational::zero(),
            irr,
        }
    }

    pub fn from_parts(r0: Rational, irr: BTreeMap<usize, Rational>) -> Result<Self> {
        Ok(UnitPhase {
            r0: frac(&r0)?,
            irr: irr.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    /// Rational part of the angle, in `[0, 1)`.
    pub fn r0(&self) -> &Rational {
        &self.r0
    }

    /// Nonzero irrational coefficients, keyed by basis index.
    pub fn irr(&self) -> &BTreeMap<usize, Rational> {
        &self.irr
    }

    pub fn is_one(&self) -> bool {
        self.r0.is_zero() && self.irr.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_empty()
    }

    /// Group law on the circle: angles add.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let r0 = self
            .r0
            .checked_add(&other.r0)
            .ok_or(Error::Overflow("phase product"))?;
        let mut irr = self.irr.clone();
        for (t, c) in &other.irr {
            let entry = irr.entry(*t).or_insert_with(Rational::zero);
            *entry = entry
                .checked_add(c)
                .ok_or(Error::Overflow("phase product"))?;
        }
        Self::from_parts(r0, irr)
    }

    pub fn checked_pow(&self, k: i64) -> Result<Self> {
        self.checked_pow_i128(k as i128)
    }

    pub(crate) fn checked_pow_i128(&self, k: i128) -> Result<Self> {
        if k == 0 {
            return Ok(Self::one());
        }
        let r0 = scale_rat(&self.r0, k)?;
        let irr = self
            .irr
            .iter()
            .map(|(t, c)| Ok((*t, scale_rat(c, k)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Self::from_parts(r0, irr)
    }

    /// Complex conjugate, i.e. the inverse on the circle.
    pub fn checked_conj(&self) -> Result<Self> {
        self.checked_pow(-1)
    }

    /// The angle in `[0, 1)` as a double.
    pub fn angle(&self, basis: &IrrationalBasis) -> f64 {
        let mut a = self.r0.to_f64().unwrap_or(0.0);
        for (t, c) in &self.irr {
            let alpha = basis.values.get(*t).copied().unwrap_or(0.0);
            let num = c.numer().to_f64().unwrap_or(0.0);
            let den = c.denom().to_f64().unwrap_or(1.0);
            let term = num * alpha / den;
            a += term - term.floor();
        }
        a - a.floor()
    }

    /// `e^{2πi·angle}`; exact for multiples of a quarter turn.
    pub fn to_complex(&self, basis: &IrrationalBasis) -> Complex64 {
        if self.irr.is_empty() {
            let quarter = self.r0 * Rational::from_integer(4);
            if quarter.is_integer() {
                return match quarter.to_integer() {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                };
            }
        }
        let (s, c) = (std::f64::consts::TAU * self.angle(basis)).sin_cos();
        Complex64::new(c, s)
    }
}

impl fmt::Display for UnitPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.r0)?;
        for (t, c) in &self.irr {
            if c.is_negative() {
                write!(f, " - {}·α{}", -c, t)?;
            } else {
                write!(f, " + {}·α{}", c, t)?;
            }
        }
        Ok(())
    }
}

/// `[num, den]` pair used for rationals in every JSON format.
pub type RatPair = (i128, i128);

fn to_pair(r: &Rational) -> RatPair {
    (*r.numer(), *r.denom())
}

#[derive(Serialize, Deserialize)]
struct PhaseRepr {
    r0: RatPair,
    #[serde(default)]
    irr: BTreeMap<usize, RatPair>,
}

impl Serialize for UnitPhase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PhaseRepr {
            r0: to_pair(&self.r0),
            irr: self.irr.iter().map(|(t, c)| (*t, to_pair(c))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitPhase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PhaseRepr::deserialize(d)?;
        let r0 = rat(repr.r0.0, repr.r0.1).map_err(D::Error::custom)?;
        let irr = repr
            .irr
            .into_iter()
            .map(|(t, (n, d))| rat(n, d).map(|c| (t, c)))
            .collect::<Result<_>>()
            .map_err(D::Error::custom)?;
        UnitPhase::from_parts(r0, irr).map_err(D::Error::custom)
    }
}

/// The angle matrix defining `θ_{kj} = e^{2πiϑ_{kj}}`.
///
/// Only strictly lower entries `ϑ_{kj}` (`k > j`) are stored; the upper
/// triangle is `ϑ_{jk} = −ϑ_{kj}` and the diagonal is 0. Generator indices
/// are counted from 1 in every public method.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaData {
    n: usize,
    lower: Vec<Vec<UnitPhase>>,
    basis: IrrationalBasis,
    float_basis: BTreeSet<usize>,
    active: Vec<(usize, usize, UnitPhase)>,
}

impl ThetaData {
    /// All angles zero: the commutative algebra `ℓ¹(Z^n)`.
    pub fn commutative(n: usize) -> Self {
        Self::new(n, IrrationalBasis::default(), Vec::new()).expect("valid empty config")
    }

    /// Builds from `(k, j, ϑ_{kj})` triples with `1 ≤ j < k ≤ n`.
    pub fn new(
        n: usize,
        basis: IrrationalBasis,
        entries: Vec<(usize, usize, UnitPhase)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("dimension n must be positive".into()));
        }
        let mut lower: Vec<Vec<UnitPhase>> = (0..n).map(|k| vec![UnitPhase::one(); k]).collect();
        let mut seen = BTreeSet::new();
        for (k, j, phase) in entries {
            if !(1 <= j && j < k && k <= n) {
                return Err(Error::Config(format!(
                    "entry (k={k}, j={j}) is not strictly lower triangular for n={n}"
                )));
            }
            if !seen.insert((k, j)) {
                return Err(Error::Config(format!("duplicate entry (k={k}, j={j})")));
            }
            if let Some(t) = phase.irr.keys().find(|t| **t >= basis.len()) {
                return Err(Error::Config(format!(
                    "irrational index {t} outside basis of size {}",
                    basis.len()
                )));
            }
            lower[k - 1][j - 1] = phase;
        }
        let active = lower
            .iter()
            .enumerate()
            .flat_map(|(k, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_one())
                    .map(move |(j, p)| (k, j, p.clone()))
            })
            .collect();
        Ok(ThetaData {
            n,
            lower,
            basis,
            float_basis: BTreeSet::new(),
            active,
        })
    }

    /// Purely rational angles from `(k, j, num, den)` quadruples.
    pub fn rational(n: usize, entries: &[(usize, usize, i128, i128)]) -> Result<Self> {
        let entries = entries
            .iter()
            .map(|&(k, j, num, den)| Ok((k, j, UnitPhase::rational(num, den)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, IrrationalBasis::default(), entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &IrrationalBasis {
        &self.basis
    }

    /// Basis indices that came from floating-point angles rather than
    /// declared irrationals.
    pub fn float_basis(&self) -> &BTreeSet<usize> {
        &self.float_basis
    }

    /// True when every angle is given exactly (no float-mode entries).
    pub fn is_exact(&self) -> bool {
        self.float_basis.is_empty()
    }

    /// `ϑ_{jk}` for any `1 ≤ j, k ≤ n`.
    pub fn angle(&self, j: usize, k: usize) -> Result<UnitPhase> {
        if !(1..=self.n).contains(&j) || !(1..=self.n).contains(&k) {
            return Err(Error::InvalidInput(format!(
                "index ({j},{k}) out of range for n={}",
                self.n
            )));
        }
        match j.cmp(&k) {
            std::cmp::Ordering::Equal => Ok(UnitPhase::one()),
            std::cmp::Ordering::Greater => Ok(self.lower[j - 1][k - 1].clone()),
            std::cmp::Ordering::Less => self.lower[k - 1][j - 1].checked_conj(),
        }
    }

    pub fn render(&self, phase: &UnitPhase) -> Complex64 {
        phase.to_complex(&self.basis)
    }

    /// The cocycle `σ(l, m) = ∏_{j<k} θ_{kj}^{l_k m_j}`.
    pub fn sigma(&self, l: &LatticePoint, m: &LatticePoint) -> Result<UnitPhase> {
        Error::check_dim(self.n, l.dim())?;
        Error::check_dim(self.n, m.dim())?;
        let mut acc = UnitPhase::one();
        for (k, j, phase) in &self.active {
            let c = l.0[*k] as i128 * m.0[*j] as i128;
            if c != 0 {
                acc = acc.checked_mul(&phase.checked_pow_i128(c)?)?;
            }
        }
        Ok(acc)
    }

    pub fn to_spec(&self) -> ThetaSpec {
        let vartheta = self
            .active
            .iter()
            .map(|(k, j, p)| AngleEntry {
                k: k + 1,
                j: j + 1,
                r0: Some(to_pair(&p.r0)),
                irr: p.irr.iter().map(|(t, c)| (*t, to_pair(c))).collect(),
                float: None,
            })
            .collect();
        ThetaSpec {
            n: self.n,
            alphas: self.basis.values.clone(),
            vartheta,
            float_alphas: self.float_basis.iter().copied().collect(),
        }
    }
}

/// One `(k, j)` angle in a theta config.
///
/// Either `r0`/`irr` (exact) or `float` (float mode) is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleEntry {
    pub k: usize,
    pub j: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<RatPair>,
    #[serde(default)]
    pub irr: BTreeMap<usize, RatPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub float: Option<f64>,
}

/// JSON form of [`ThetaData`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSpec {
    pub n: usize,
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub vartheta: Vec<AngleEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub float_alphas: Vec<usize>,
}

impl TryFrom<ThetaSpec> for ThetaData {
    type Error = Error;

    fn try_from(raw: ThetaSpec) -> Result<Self> {
        let mut alphas = raw.alphas.clone();
        let mut float_basis: BTreeSet<usize> = raw.float_alphas.iter().copied().collect();
        let mut entries = Vec::with_capacity(raw.vartheta.len());
        for e in &raw.vartheta {
            let phase = match e.float {
                Some(x) => {
                    if e.r0.is_some() || !e.irr.is_empty() {
                        return Err(Error::Config(format!(
                            "entry (k={}, j={}) mixes float and exact parts",
                            e.k, e.j
                        )));
                    }
                    if !x.is_finite() {
                        return Err(Error::Config("non-finite float angle".into()));
                    }
                    // each float angle is an opaque symbol on its own basis slot
                    let t = alphas.len();
                    alphas.push(x);
                    float_basis.insert(t);
                    UnitPhase::irrational(t, Rational::from_integer(1))
                }
                None => {
                    let (n, d) = e.r0.unwrap_or((0, 1));
                    let irr = e
                        .irr
                        .iter()
                        .map(|(t, (n, d))| {
                            rat(*n, *d)
                                .map(|c| (*t, c))
                                .map_err(|err| Error::Config(err.to_string()))
                        })
                        .collect::<Result<_>>()?;
                    UnitPhase::from_parts(
                        rat(n, d).map_err(|err| Error::Config(err.to_string()))?,
                        irr,
                    )?
                }
            };
            entries.push((e.k, e.j, phase));
        }
        if let Some(t) = float_basis.iter().find(|t| **t >= alphas.len()) {
            return Err(Error::Config(format!("float_alphas index {t} out of range")));
        }
        let mut theta = ThetaData::new(raw.n, IrrationalBasis::new(alphas), entries)?;
        theta.float_basis = float_basis;
        Ok(theta)
    }
}

impl ThetaData {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ThetaSpec =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.try_into()
    }
}
