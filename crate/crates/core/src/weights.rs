//! Submultiplicative symmetric weights on `Z^n` and the GRS condition.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phases::LatticePoint;

/// Choice of norm `|·|` on `Z^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeNorm {
    L1,
    #[default]
    L2,
    Linf,
}

impl LatticeNorm {
    pub fn eval(self, x: &LatticePoint) -> f64 {
        let c = x.coords().iter().map(|&a| a as f64);
        match self {
            LatticeNorm::L1 => c.map(f64::abs).sum(),
            LatticeNorm::L2 => c.map(|a| a * a).sum::<f64>().sqrt(),
            LatticeNorm::Linf => c.map(f64::abs).fold(0.0, f64::max),
        }
    }

    fn label(self) -> &'static str {
        match self {
            LatticeNorm::L1 => "l1",
            LatticeNorm::L2 => "l2",
            LatticeNorm::Linf => "linf",
        }
    }
}

/// One row of a custom weight table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub x: Vec<i64>,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightKind {
    One,
    /// `(1 + |x|)^s`
    Polynomial { s: f64 },
    /// `e^{a|x|^b}`
    Subexponential { a: f64, b: f64 },
    /// `e^{a|x|}`
    Exponential { a: f64 },
    Product { factors: Vec<Weight> },
    /// Tabulated values with a formula fallback off the table.
    Custom {
        table: Vec<TableEntry>,
        fallback: Box<Weight>,
    },
}

/// A weight function `v: Z^n → (0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    #[serde(flatten)]
    pub kind: WeightKind,
    #[serde(default)]
    pub norm: LatticeNorm,
}

impl Weight {
    pub fn new(kind: WeightKind) -> Self {
        Weight {
            kind,
            norm: LatticeNorm::default(),
        }
    }

    pub fn one() -> Self {
        Self::new(WeightKind::One)
    }

    pub fn polynomial(s: f64) -> Self {
        Self::new(WeightKind::Polynomial { s })
    }

    pub fn subexponential(a: f64, b: f64) -> Self {
        Self::new(WeightKind::Subexponential { a, b })
    }

    pub fn exponential(a: f64) -> Self {
        Self::new(WeightKind::Exponential { a })
    }

    pub fn product(factors: Vec<Weight>) -> Self {
        Self::new(WeightKind::Product { factors })
    }

    pub fn with_norm(mut self, norm: LatticeNorm) -> Self {
        self.norm = norm;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let w: Weight = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        w.validate()?;
        Ok(w)
    }

    /// Checks the family parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match &self.kind {
            WeightKind::One => Ok(()),
            WeightKind::Polynomial { s } if !(s.is_finite() && *s >= 0.0) => {
                bad(format!("polynomial weight needs s >= 0, got {s}"))
            }
            WeightKind::Subexponential { a, b }
                if !(a.is_finite() && *a > 0.0 && *b > 0.0 && *b < 1.0) =>
            {
                bad(format!("subexponential weight needs a > 0, 0 < b < 1, got a={a}, b={b}"))
            }
            WeightKind::Exponential { a } if !(a.is_finite() && *a > 0.0) => {
                bad(format!("exponential weight needs a > 0, got {a}"))
            }
            WeightKind::Product { factors } => factors.iter().try_for_each(Weight::validate),
            WeightKind::Custom { table, fallback } => {
                if let Some(e) = table.iter().find(|e| !(e.v.is_finite() && e.v > 0.0)) {
                    return bad(format!("custom weight value {} is not positive", e.v));
                }
                fallback.validate()
            }
            _ => Ok(()),
        }
    }

    /// `v(x)`.
    pub fn evaluate(&self, x: &LatticePoint) -> f64 {
        let r = self.norm.eval(x);
        match &self.kind {
            WeightKind::One => 1.0,
            WeightKind::Polynomial { s } => (1.0 + r).powf(*s),
            WeightKind::Subexponential { a, b } => (a * r.powf(*b)).exp(),
            WeightKind::Exponential { a } => (a * r).exp(),
            WeightKind::Product { factors } => factors.iter().map(|w| w.evaluate(x)).product(),
            WeightKind::Custom { table, fallback } => lookup(table, x)
                .unwrap_or_else(|| fallback.evaluate(x)),
        }
    }

    /// `log v(x)`.
    pub fn log_value(&self, x: &LatticePoint) -> f64 {
        self.log_value_scaled(x, 1)
    }

    /// `log v(k·x)` for `k ≥ 1`, without forming `k·x` for formula families.
    pub fn log_value_scaled(&self, x: &LatticePoint, k: u64) -> f64 {
        let r = self.norm.eval(x) * k as f64;
        match &self.kind {
            WeightKind::One => 0.0,
            WeightKind::Polynomial { s } => s * r.ln_1p(),
            WeightKind::Subexponential { a, b } => a * r.powf(*b),
            WeightKind::Exponential { a } => a * r,
            WeightKind::Product { factors } => {
                factors.iter().map(|w| w.log_value_scaled(x, k)).sum()
            }
            WeightKind::Custom { table, fallback } => {
                let scaled = i64::try_from(k).ok().and_then(|k| x.checked_scale(k).ok());
                match scaled.as_ref().and_then(|kx| lookup(table, kx)) {
                    Some(v) => v.ln(),
                    None => fallback.log_value_scaled(x, k),
                }
            }
        }
    }

    /// The analytic GRS verdict, `lim_k v(kx)^{1/k}`.
    pub fn grs_verdict(&self, x: &LatticePoint) -> GrsVerdict {
        match self.log_grs_limit(x) {
            None => GrsVerdict::NoAnalyticVerdict,
            Some(0.0) => GrsVerdict::Holds { limit: 1.0 },
            Some(l) => GrsVerdict::Fails { limit: l.exp() },
        }
    }

    fn log_grs_limit(&self, x: &LatticePoint) -> Option<f64> {
        match &self.kind {
            WeightKind::One | WeightKind::Polynomial { .. } | WeightKind::Subexponential { .. } => {
                Some(0.0)
            }
            WeightKind::Exponential { a } => Some(a * self.norm.eval(x)),
            WeightKind::Product { factors } => factors
                .iter()
                .map(|w| w.log_grs_limit(x))
                .sum::<Option<f64>>(),
            WeightKind::Custom { .. } => None,
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

fn lookup(table: &[TableEntry], x: &LatticePoint) -> Option<f64> {
    table.iter().find(|e| e.x == x.coords()).map(|e| e.v)
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let norm = self.norm.label();
        match &self.kind {
            WeightKind::One => write!(f, "one"),
            WeightKind::Polynomial { s } => write!(f, "polynomial(s={s},{norm})"),
            WeightKind::Subexponential { a, b } => write!(f, "subexponential(a={a},b={b},{norm})"),
            WeightKind::Exponential { a } => write!(f, "exponential(a={a},{norm})"),
            WeightKind::Product { factors } => {
                write!(f, "product(")?;
                for (i, w) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{w}")?;
                }
                write!(f, ")")
            }
            WeightKind::Custom { table, fallback } => {
                write!(f, "custom({} entries, fallback {fallback})", table.len())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum GrsVerdict {
    Holds { limit: f64 },
    Fails { limit: f64 },
    NoAnalyticVerdict,
}

impl GrsVerdict {
    pub fn holds(&self) -> Option<bool> {
        match self {
            GrsVerdict::Holds { .. } => Some(true),
            GrsVerdict::Fails { .. } => Some(false),
            GrsVerdict::NoAnalyticVerdict => None,
        }
    }

    pub fn limit(&self) -> Option<f64> {
        match self {
            GrsVerdict::Holds { limit } | GrsVerdict::Fails { limit } => Some(*limit),
            GrsVerdict::NoAnalyticVerdict => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrsProfile {
    pub weight: String,
    pub x: LatticePoint,
    /// `v(kx)^{1/k}` for `k = 1..=n_max`.
    pub sequence: Vec<f64>,
    pub verdict: GrsVerdict,
}

/// Numeric profile `v(kx)^{1/k}` plus the symbolic verdict.
pub fn grs_profile(v: &Weight, x: &LatticePoint, n_max: usize) -> Result<GrsProfile> {
    if x.is_zero() {
        return Err(Error::InvalidInput("GRS profile needs x != 0".into()));
    }
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let sequence = (1..=n_max as u64)
        .map(|k| (v.log_value_scaled(x, k) / k as f64).exp())
        .collect();
    Ok(GrsProfile {
        weight: v.name(),
        x: x.clone(),
        sequence,
        verdict: v.grs_verdict(x),
    })
}

const AXIOM_SLACK: f64 = 1e-12;
const MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "axiom", rename_all = "kebab-case")]
pub enum AxiomViolation {
    Submultiplicative {
        x: LatticePoint,
        y: LatticePoint,
        v_sum: f64,
        v_product: f64,
    },
    Symmetric {
        x: LatticePoint,
        v_x: f64,
        v_minus_x: f64,
    },
    OriginAtLeastOne { v_origin: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub weight: String,
    pub trials: usize,
    pub violation_count: usize,
    /// The first few violations found, as witnesses.
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    fn record(&mut self, v: AxiomViolation) {
        self.violation_count += 1;
        if self.violations.len() < MAX_WITNESSES {
            self.violations.push(v);
        }
    }
}

fn check_pair(v: &Weight, x: &LatticePoint, y: &LatticePoint, report: &mut AxiomReport) {
    let Ok(s) = x.checked_add(y) else { return };
    let (v_sum, v_product) = (v.evaluate(&s), v.evaluate(x) * v.evaluate(y));
    if v_sum > v_product * (1.0 + AXIOM_SLACK) {
        report.record(AxiomViolation::Submultiplicative {
            x: x.clone(),
            y: y.clone(),
            v_sum,
            v_product,
        });
    }
}

fn check_symmetry(v: &Weight, x: &LatticePoint, report: &mut AxiomReport) {
    let (v_x, v_minus_x) = (v.evaluate(x), v.evaluate(&x.neg()));
    if (v_x - v_minus_x).abs() > AXIOM_SLACK * v_x.max(v_minus_x) {
        report.record(AxiomViolation::Symmetric {
            x: x.clone(),
            v_x,
            v_minus_x,
        });
    }
}

/// Randomized check of `v(x+y) ≤ v(x)v(y)`, `v(−x) = v(x)` and `v(0) ≥ 1`
/// on `[−box, box]^dim`. Custom tables are additionally checked on every
/// pair of tabulated points.
pub fn check_axioms(v: &Weight, dim: usize, trials: usize, box_radius: i64, seed: u64) -> AxiomReport {
    let mut report = AxiomReport {
        weight: v.name(),
        trials,
        violation_count: 0,
        violations: Vec::new(),
    };
    let v0 = v.evaluate(&LatticePoint::zero(dim));
    if v0 < 1.0 - AXIOM_SLACK {
        report.record(AxiomViolation::OriginAtLeastOne { v_origin: v0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| {
        LatticePoint((0..dim).map(|_| rng.random_range(-box_radius..=box_radius)).collect())
    };
    for _ in 0..trials {
        let x = sample(&mut rng);
        let y = sample(&mut rng);
        check_pair(v, &x, &y, &mut report);
        check_symmetry(v, &x, &mut report);
    }
    let mut tabulated = BTreeMap::new();
    collect_table_points(v, &mut tabulated);
    let points: Vec<LatticePoint> = tabulated
        .into_keys()
        .filter(|x: &LatticePoint| x.dim() == dim)
        .flat_map(|x| [x.neg(), x])
        .collect();
    for x in &points {
        check_symmetry(v, x, &mut report);
        for y in &points {
            check_pair(v, x, y, &mut report);
        }
    }
    report
}

fn collect_table_points(v: &Weight, out: &mut BTreeMap<LatticePoint, ()>) {
    match &v.kind {
        WeightKind::Custom { table, fallback } => {
            for e in table {
                out.insert(LatticePoint(e.x.clone()), ());
            }
            collect_table_points(fallback, out);
        }
        WeightKind::Product { factors } => {
            factors.iter().for_each(|w| collect_table_points(w, out))
        }
        _ => {}
    }
}
