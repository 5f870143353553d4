//! Truncated sequence-space foundation.
//!
//! An element of the ℓ²-probability simplex is an infinite sequence of
//! strictly positive weights summing to one. Every type here keeps the first
//! `N` entries only; [`tail_mass`] quantifies what the truncation of a cost
//! sequence throws away.
//!
//! Interior points ([`SimplexPoint`]) and points of the closure
//! ([`ClosedSimplexPoint`]) are distinct types: the Fisher–Rao metric
//! degenerates on the boundary, while linear-program optima live there.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed deviation of a weight sum from 1 (or of a tangent sum from 0).
    pub tol_sum: f64,
    /// Allowed residual in metric and tangency identities.
    pub tol_metric: f64,
    /// Allowed residual for ODE-level comparisons.
    pub tol_ode: f64,
    /// Step used for central finite differences.
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_sum: 1e-12,
            tol_metric: 1e-9,
            tol_ode: 1e-6,
            fd_step: 1e-5,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [self.tol_sum, self.tol_metric, self.tol_ode, self.fd_step];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidTolerance)
        }
    }
}

/// Interior point of the truncated simplex: `N ≥ 2` strictly positive weights
/// summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexPoint {
    weights: Vec<f64>,
}

impl SimplexPoint {
    /// Validates `weights` as-is, without renormalizing.
    ///
    /// Use [`make_simplex`] to normalize arbitrary positive input.
    pub fn new(weights: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        check_len(&weights)?;
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if w <= 0.0 {
                return Err(Error::NonPositiveEntry { index });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol.tol_sum {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { weights })
    }

    /// The uniform distribution on `n` entries.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension { n });
        }
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
        })
    }

    /// Normalizes positive weights that are already known to be valid.
    pub(crate) fn from_positive_unchecked(mut weights: Vec<f64>) -> Result<Self> {
        for (index, &w) in weights.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::PositivityLost { index });
            }
        }
        let sum: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= sum);
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    pub fn to_closed(&self) -> ClosedSimplexPoint {
        ClosedSimplexPoint {
            weights: self.weights.clone(),
        }
    }

    /// ℓ¹ distance to another point of the same dimension.
    pub fn l1_distance(&self, other: &SimplexPoint) -> Result<f64> {
        check_same_len(self.n(), other.n())?;
        Ok(l1(&self.weights, &other.weights))
    }
}

impl<'de> Deserialize<'de> for SimplexPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            weights: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        make_simplex(&raw.weights, &Tolerances::default()).map_err(serde::de::Error::custom)
    }
}

/// Point of the closed simplex: non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedSimplexPoint {
    weights: Vec<f64>,
}

impl ClosedSimplexPoint {
    pub fn new(weights: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if w < 0.0 {
                return Err(Error::NegativeEntry { index });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol.tol_sum {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { weights })
    }

    /// The corner `e_k` of the closed simplex.
    pub fn corner(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, n });
        }
        let mut weights = vec![0.0; n];
        weights[k] = 1.0;
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// Promotes to an interior point if every weight is positive.
    pub fn to_interior(&self, tol: &Tolerances) -> Result<SimplexPoint> {
        SimplexPoint::new(self.weights.clone(), tol)
    }

    pub fn l1_distance(&self, other: &[f64]) -> Result<f64> {
        check_same_len(self.n(), other.len())?;
        Ok(l1(&self.weights, other))
    }
}

/// Tangent vector at an interior point: components summing to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVec {
    components: Vec<f64>,
    base: SimplexPoint,
}

impl TangentVec {
    /// Wraps components that are already sum-zero (within `tol_sum`).
    pub fn new(base: &SimplexPoint, components: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        check_same_len(base.n(), components.len())?;
        let sum: f64 = components.iter().sum();
        let scale = components.iter().map(|c| c.abs()).fold(1.0, f64::max);
        if sum.abs() > tol.tol_sum * scale {
            return Err(Error::NotTangent { residual: sum });
        }
        Ok(Self {
            components,
            base: base.clone(),
        })
    }

    pub(crate) fn from_parts(base: &SimplexPoint, components: Vec<f64>) -> Self {
        debug_assert_eq!(base.n(), components.len());
        Self {
            components,
            base: base.clone(),
        }
    }

    pub fn zero(base: &SimplexPoint) -> Self {
        Self::from_parts(base, vec![0.0; base.n()])
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn base(&self) -> &SimplexPoint {
        &self.base
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_parts(
            &self.base,
            self.components.iter().map(|c| c * factor).collect(),
        )
    }

    pub(crate) fn check_base(&self, p: &SimplexPoint) -> Result<()> {
        check_same_len(p.n(), self.components.len())?;
        if self.base != *p {
            return Err(Error::BaseMismatch);
        }
        Ok(())
    }
}

/// Declarative generator for a truncated cost sequence `(c_n)`.
///
/// JSON forms: `{"kind":"geometric","ratio":0.5,"n":16}`,
/// `{"kind":"power","exponent":1.0,"n":16}`, `{"kind":"explicit","values":[..]}`
/// and `{"kind":"shifted","base":{..},"shift":1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CostSpec {
    /// `c_n = ratio^n` with `ratio ∈ (0, 1)`.
    Geometric {
        ratio: f64,
        n: usize,
    },
    /// `c_n = (n + 1)^(-exponent)` with `exponent > 1/2`.
    Power {
        exponent: f64,
        n: usize,
    },
    Explicit {
        values: Vec<f64>,
    },
    /// `base` plus a constant.
    Shifted {
        base: Box<CostSpec>,
        shift: f64,
    },
}

impl CostSpec {
    pub fn n(&self) -> usize {
        match self {
            CostSpec::Geometric { n, .. } | CostSpec::Power { n, .. } => *n,
            CostSpec::Explicit { values } => values.len(),
            CostSpec::Shifted { base, .. } => base.n(),
        }
    }

    fn kind_name(&self) -> &'static str {
        match self {
            CostSpec::Geometric { .. } => "geometric",
            CostSpec::Power { .. } => "power",
            CostSpec::Explicit { .. } => "explicit",
            CostSpec::Shifted { .. } => "shifted",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CostSpec::Geometric { ratio, n } => {
                if !(*ratio > 0.0 && *ratio < 1.0) {
                    return Err(Error::InvalidSpec(format!("ratio {ratio} not in (0, 1)")));
                }
                check_spec_len(*n)
            }
            CostSpec::Power { exponent, n } => {
                if !(exponent.is_finite() && *exponent > 0.5) {
                    return Err(Error::InvalidSpec(format!(
                        "exponent {exponent} must exceed 1/2 for a square-summable sequence"
                    )));
                }
                check_spec_len(*n)
            }
            CostSpec::Explicit { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidSpec("explicit cost has no values".into()));
                }
                if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::InvalidSpec(format!("value {i} is not finite")));
                }
                Ok(())
            }
            CostSpec::Shifted { base, shift } => {
                if !shift.is_finite() {
                    return Err(Error::InvalidSpec("shift is not finite".into()));
                }
                base.validate()
            }
        }
    }
}

fn check_spec_len(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidSpec(
            "truncation size must be positive".into(),
        ))
    } else {
        Ok(())
    }
}

/// Builds a simplex point by normalizing strictly positive raw weights.
pub fn make_simplex(raw: &[f64], tol: &Tolerances) -> Result<SimplexPoint> {
    tol.validate()?;
    if raw.is_empty() {
        return Err(Error::EmptyVector);
    }
    for (index, &w) in raw.iter().enumerate() {
        if !w.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if w <= 0.0 {
            return Err(Error::NonPositiveEntry { index });
        }
    }
    check_len(raw)?;
    let sum: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / sum).collect();
    SimplexPoint::new(weights, tol)
}

/// Projects `raw` onto the sum-zero hyperplane and attaches it to `base`.
pub fn make_tangent(base: &SimplexPoint, raw: &[f64]) -> Result<TangentVec> {
    check_same_len(base.n(), raw.len())?;
    Ok(TangentVec::from_parts(base, project_sum_zero(raw)))
}

pub(crate) fn project_sum_zero(raw: &[f64]) -> Vec<f64> {
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    raw.iter().map(|r| r - mean).collect()
}

/// Realizes the truncated cost vector described by `spec`.
pub fn realize_cost(spec: &CostSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    Ok(match spec {
        CostSpec::Geometric { ratio, n } => (0..*n).map(|k| ratio.powi(k as i32)).collect(),
        CostSpec::Power { exponent, n } => {
            (0..*n).map(|k| ((k + 1) as f64).powf(-exponent)).collect()
        }
        CostSpec::Explicit { values } => values.clone(),
        CostSpec::Shifted { base, shift } => {
            realize_cost(base)?.into_iter().map(|c| c + shift).collect()
        }
    })
}

/// Deterministic random interior point.
///
/// Weights are `E_k^(1/concentration)` for i.i.d. unit exponentials `E_k`,
/// normalized; large concentrations push towards the uniform point. The
/// generator is ChaCha8 seeded from `seed`, so output is stable across
/// platforms.
pub fn random_simplex(n: usize, seed: u64, concentration: f64) -> Result<SimplexPoint> {
    let mut rng = seeded_rng(seed);
    random_simplex_with(&mut rng, n, concentration)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_simplex_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    concentration: f64,
) -> Result<SimplexPoint> {
    if n < 2 {
        return Err(Error::InvalidDimension { n });
    }
    if !(concentration.is_finite() && concentration > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "concentration {concentration} must be positive"
        )));
    }
    // log-space so that tiny concentrations do not overflow
    let logs: Vec<f64> = (0..n)
        .map(|_| {
            let e: f64 = rng.sample(Exp1);
            e.max(f64::MIN_POSITIVE).ln() / concentration
        })
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs
        .iter()
        .map(|l| (l - max).exp().max(f64::MIN_POSITIVE))
        .collect();
    SimplexPoint::from_positive_unchecked(weights)
}

/// Random tangent vector `v_n = √p_n g_n − p_n Σ_k √p_k g_k` for standard
/// normal `g`.
///
/// This is the Fisher–Rao orthogonal projection of `√p ⊙ g`, so `v / √p`
/// stays of order one even where `p` is tiny.
pub fn random_tangent_with<R: Rng + ?Sized>(rng: &mut R, base: &SimplexPoint) -> TangentVec {
    let scaled: Vec<f64> = base
        .weights()
        .iter()
        .map(|p| p.sqrt() * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let total: f64 = scaled.iter().sum();
    let comps = scaled
        .iter()
        .zip(base.weights())
        .map(|(s, p)| s - p * total)
        .collect();
    TangentVec::from_parts(base, comps)
}

/// `Σ_{k ≥ n} c_k²` for the untruncated sequence behind `spec`.
///
/// Closed form for geometric costs. For power costs the first terms up to
/// index 20 are summed directly and the remainder uses an Euler–Maclaurin
/// expansion, which stays inside the bracket of [`tail_mass_bounds`].
pub fn tail_mass(spec: &CostSpec, n: usize) -> Result<f64> {
    spec.validate()?;
    match spec {
        CostSpec::Geometric { ratio, .. } => {
            let r2 = ratio * ratio;
            Ok(r2.powi(n as i32) / (1.0 - r2))
        }
        CostSpec::Power { exponent, .. } => {
            let a = 2.0 * exponent;
            // terms are j^(-a) for j = n + 1, n + 2, ...
            let mut m = n as f64 + 1.0;
            let mut direct = 0.0;
            while m < 20.0 {
                direct += m.powf(-a);
                m += 1.0;
            }
            let integral = m.powf(1.0 - a) / (a - 1.0);
            let em = integral + 0.5 * m.powf(-a) + a * m.powf(-a - 1.0) / 12.0
                - a * (a + 1.0) * (a + 2.0) * m.powf(-a - 3.0) / 720.0
                + a * (a + 1.0) * (a + 2.0) * (a + 3.0) * (a + 4.0) * m.powf(-a - 5.0) / 30240.0;
            Ok(direct + em)
        }
        other => Err(Error::UnsupportedKind(other.kind_name())),
    }
}

/// Integral bracket `[lower, upper]` around [`tail_mass`] for power costs.
pub fn tail_mass_bounds(spec: &CostSpec, n: usize) -> Result<(f64, f64)> {
    spec.validate()?;
    match spec {
        CostSpec::Power { exponent, .. } => {
            let a = 2.0 * exponent;
            let m = n as f64 + 1.0;
            let lower = m.powf(1.0 - a) / (a - 1.0);
            let upper = if m >= 2.0 {
                (m - 1.0).powf(1.0 - a) / (a - 1.0)
            } else {
                1.0 + 1.0 / (a - 1.0)
            };
            Ok((lower, upper))
        }
        CostSpec::Geometric { .. } => {
            let v = tail_mass(spec, n)?;
            Ok((v, v))
        }
        other => Err(Error::UnsupportedKind(other.kind_name())),
    }
}

pub(crate) fn check_len(v: &[f64]) -> Result<()> {
    match v.len() {
        0 => Err(Error::EmptyVector),
        1 => Err(Error::InvalidDimension { n: 1 }),
        _ => Ok(()),
    }
}

pub(crate) fn check_same_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
