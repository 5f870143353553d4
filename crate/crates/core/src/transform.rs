//! The q-root transform `p ↦ (p_n^{1/q})` from the simplex onto the positive
//! part of the unit ℓq sphere, its inverse, and its differential.
//!
//! The differential carries the chain-rule factor `1/q`:
//! `d(p^{1/q}) = (1/q) p^{1/q - 1} dp`.

use crate::error::{Error, Result};
use crate::simplex::{check_same_len, SimplexPoint, TangentVec, Tolerances};

/// Smallest weight accepted by the root transforms.
pub const MIN_WEIGHT: f64 = 1e-300;

/// Point with strictly positive coordinates on the unit ℓq sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQPoint {
    coords: Vec<f64>,
    q: f64,
}

impl SphereQPoint {
    pub fn new(coords: Vec<f64>, q: f64, tol: &Tolerances) -> Result<Self> {
        check_q(q)?;
        crate::simplex::check_len(&coords)?;
        for (index, &x) in coords.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if x <= 0.0 {
                return Err(Error::NonPositiveEntry { index });
            }
        }
        let sum: f64 = coords.iter().map(|x| x.powf(q)).sum();
        if (sum - 1.0).abs() > tol.tol_sum {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { coords, q })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }
}

/// Tangent vector to the ℓq sphere at a [`SphereQPoint`]:
/// `Σ x_n^{q-1} w_n = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereTangent {
    components: Vec<f64>,
    base: SphereQPoint,
}

impl SphereTangent {
    pub fn new(base: &SphereQPoint, components: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        check_same_len(base.n(), components.len())?;
        let residual = tangency_residual(base, &components);
        if residual.abs() > tol.tol_metric {
            return Err(Error::NotTangent { residual });
        }
        Ok(Self {
            components,
            base: base.clone(),
        })
    }

    pub(crate) fn from_parts(base: &SphereQPoint, components: Vec<f64>) -> Self {
        Self {
            components,
            base: base.clone(),
        }
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn base(&self) -> &SphereQPoint {
        &self.base
    }

    /// `Σ x_n^{q-1} w_n`, zero for tangent vectors.
    pub fn tangency_residual(&self) -> f64 {
        tangency_residual(&self.base, &self.components)
    }
}

fn tangency_residual(base: &SphereQPoint, w: &[f64]) -> f64 {
    let q = base.q;
    base.coords
        .iter()
        .zip(w)
        .map(|(x, w)| x.powf(q - 1.0) * w)
        .sum()
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidQ(q))
    }
}

/// `(Σ |x_n|^q)^{1/q}`.
pub fn lq_norm(x: &[f64], q: f64) -> f64 {
    x.iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
}

/// `p^{e}` through `exp(e·ln p)`, refusing weights below [`MIN_WEIGHT`].
fn guarded_pow(p: &[f64], exponent: f64) -> Result<Vec<f64>> {
    p.iter()
        .enumerate()
        .map(|(index, &w)| {
            if w < MIN_WEIGHT {
                Err(Error::Underflow { index })
            } else {
                Ok((exponent * w.ln()).exp())
            }
        })
        .collect()
}

/// `p ↦ (p_n^{1/q})`.
pub fn q_root(p: &SimplexPoint, q: f64) -> Result<SphereQPoint> {
    check_q(q)?;
    let coords = guarded_pow(p.weights(), 1.0 / q)?;
    Ok(SphereQPoint { coords, q })
}

/// `x ↦ (x_n^q)`.
pub fn q_root_inverse(x: &SphereQPoint) -> Result<SimplexPoint> {
    let weights: Vec<f64> = x.coords.iter().map(|c| c.powf(x.q)).collect();
    SimplexPoint::from_positive_unchecked(weights)
}

/// Differential of the q-root transform: `w_n = (1/q) v_n p_n^{1/q - 1}`.
pub fn pushforward(p: &SimplexPoint, v: &TangentVec, q: f64) -> Result<SphereTangent> {
    check_q(q)?;
    v.check_base(p)?;
    let base = q_root(p, q)?;
    let components = v
        .components()
        .iter()
        .zip(base.coords.iter().zip(p.weights()))
        .map(|(vn, (xn, pn))| vn * xn / pn / q)
        .collect();
    Ok(SphereTangent { components, base })
}

/// Inverse differential: `v_n = q w_n x_n^{q-1}`.
pub fn pullback(x: &SphereQPoint, w: &SphereTangent) -> Result<TangentVec> {
    check_same_len(x.n(), w.components.len())?;
    if w.base != *x {
        return Err(Error::BaseMismatch);
    }
    let q = x.q;
    let base = q_root_inverse(x)?;
    let components = w
        .components
        .iter()
        .zip(&x.coords)
        .map(|(wn, xn)| q * wn * xn.powf(q - 1.0))
        .collect();
    Ok(TangentVec::from_parts(&base, components))
}
