//! Fisher–Rao structures on the truncated simplex.
//!
//! * the ℓ²-Fisher–Rao inner product `(1/4) Σ v_n w_n / p_n`,
//! * the ℓq-Fisher–Rao Finsler norm `(Σ |v_n/p_n|^q p_n)^{1/q}`,
//! * the Fisher–Rao distance and its geodesics, obtained by pulling back
//!   great circles through the square-root map,
//! * a discrete path energy used as an independent check of the above.
//!
//! Under the q-root transform the ℓq norm of a pushed-forward tangent vector
//! equals `(1/q)` times the Finsler norm; at `q = 2` this is exactly the
//! square root of the 1/4-normalized inner product.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::simplex::{
    check_same_len, project_sum_zero, ClosedSimplexPoint, SimplexPoint, TangentVec,
};
use crate::transform::check_q;

/// `(1/4) Σ v_n w_n / p_n`.
pub fn fisher_rao_inner(p: &SimplexPoint, v: &TangentVec, w: &TangentVec) -> Result<f64> {
    v.check_base(p)?;
    w.check_base(p)?;
    Ok(inner_raw(p.weights(), v.components(), w.components()))
}

fn inner_raw(p: &[f64], v: &[f64], w: &[f64]) -> f64 {
    0.25 * p
        .iter()
        .zip(v.iter().zip(w))
        .map(|(pn, (vn, wn))| vn * wn / pn)
        .sum::<f64>()
}

/// `(Σ |v_n / p_n|^q p_n)^{1/q}`.
pub fn finsler_norm_q(p: &SimplexPoint, v: &TangentVec, q: f64) -> Result<f64> {
    check_q(q)?;
    v.check_base(p)?;
    let s: f64 = p
        .weights()
        .iter()
        .zip(v.components())
        .map(|(pn, vn)| (vn / pn).abs().powf(q) * pn)
        .sum();
    Ok(s.powf(1.0 / q))
}

/// Fisher–Rao distance, the great-circle angle between `√p` and `√r`.
///
/// Evaluated as `2·asin(‖√p − √r‖/2)`, which equals `arccos Σ √(p_n r_n)`
/// but keeps full relative accuracy for nearby points.
pub fn fr_distance(p: &SimplexPoint, r: &SimplexPoint) -> Result<f64> {
    check_same_len(p.n(), r.n())?;
    Ok(angle_between_roots(p.weights(), r.weights()))
}

/// [`fr_distance`] for points of the closed simplex.
pub fn fr_distance_closed(p: &ClosedSimplexPoint, r: &ClosedSimplexPoint) -> Result<f64> {
    check_same_len(p.n(), r.n())?;
    Ok(angle_between_roots(p.weights(), r.weights()))
}

fn angle_between_roots(p: &[f64], r: &[f64]) -> f64 {
    let chord2: f64 = p
        .iter()
        .zip(r)
        .map(|(a, b)| {
            let d = a.sqrt() - b.sqrt();
            d * d
        })
        .sum();
    2.0 * (0.5 * chord2.sqrt()).min(1.0).asin()
}

/// `arccos(clamp(Σ √(p_n r_n), -1, 1))`: the Bhattacharyya angle in its
/// textbook form.
pub fn bhattacharyya_angle(p: &SimplexPoint, r: &SimplexPoint) -> Result<f64> {
    check_same_len(p.n(), r.n())?;
    let bc: f64 = p
        .weights()
        .iter()
        .zip(r.weights())
        .map(|(a, b)| (a * b).sqrt())
        .sum();
    Ok(bc.clamp(-1.0, 1.0).acos())
}

/// Great-circle arc between two points of the non-negative unit ℓ² sphere.
#[derive(Debug, Clone)]
struct GreatArc {
    x0: Vec<f64>,
    x1: Vec<f64>,
    angle: f64,
}

impl GreatArc {
    fn new(p: &[f64], r: &[f64]) -> Result<Self> {
        let angle = angle_between_roots(p, r);
        if angle == 0.0 || p == r {
            return Err(Error::IdenticalEndpoints);
        }
        Ok(Self {
            x0: p.iter().map(|v| v.sqrt()).collect(),
            x1: r.iter().map(|v| v.sqrt()).collect(),
            angle,
        })
    }

    /// Squared coordinates of the arc point at parameter `t`, renormalized.
    fn squared_at(&self, t: f64) -> Vec<f64> {
        let s = self.angle.sin();
        let a = ((1.0 - t) * self.angle).sin() / s;
        let b = (t * self.angle).sin() / s;
        let mut p: Vec<f64> = self
            .x0
            .iter()
            .zip(&self.x1)
            .map(|(u, v)| {
                let x = a * u + b * v;
                x * x
            })
            .collect();
        let sum: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= sum);
        p
    }
}

/// Length-minimizing Fisher–Rao geodesic between two interior points.
#[derive(Debug, Clone)]
pub struct GeodesicSegment {
    start: SimplexPoint,
    end: SimplexPoint,
    arc: GreatArc,
}

impl GeodesicSegment {
    pub fn endpoints(&self) -> (&SimplexPoint, &SimplexPoint) {
        (&self.start, &self.end)
    }

    /// Arc angle on the unit sphere, equal to the Fisher–Rao distance.
    pub fn angle(&self) -> f64 {
        self.arc.angle
    }

    /// Point at parameter `t ∈ [0, 1]`, travelled at constant speed.
    pub fn sample(&self, t: f64) -> Result<SimplexPoint> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
        }
        SimplexPoint::from_positive_unchecked(self.arc.squared_at(t))
    }

    /// `segments + 1` equally spaced samples including both endpoints.
    pub fn sample_uniform(&self, segments: usize) -> Result<Vec<SimplexPoint>> {
        if segments == 0 {
            return Err(Error::TooFewPoints);
        }
        (0..=segments)
            .map(|i| self.sample(i as f64 / segments as f64))
            .collect()
    }
}

/// Geodesic between `p` and `r` through the square-root map.
pub fn geodesic(p: &SimplexPoint, r: &SimplexPoint) -> Result<GeodesicSegment> {
    check_same_len(p.n(), r.n())?;
    Ok(GeodesicSegment {
        arc: GreatArc::new(p.weights(), r.weights())?,
        start: p.clone(),
        end: r.clone(),
    })
}

/// Geodesic between points of the closed simplex.
///
/// Interior samples are only guaranteed to be non-negative: a coordinate
/// that vanishes at both endpoints vanishes along the whole arc.
#[derive(Debug, Clone)]
pub struct ClosedGeodesic {
    arc: GreatArc,
}

impl ClosedGeodesic {
    pub fn angle(&self) -> f64 {
        self.arc.angle
    }

    pub fn sample(&self, t: f64) -> Result<ClosedSimplexPoint> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
        }
        ClosedSimplexPoint::new(self.arc.squared_at(t), &Default::default())
    }
}

pub fn geodesic_closed(p: &ClosedSimplexPoint, r: &ClosedSimplexPoint) -> Result<ClosedGeodesic> {
    check_same_len(p.n(), r.n())?;
    Ok(ClosedGeodesic {
        arc: GreatArc::new(p.weights(), r.weights())?,
    })
}

/// Discrete Fisher–Rao energy `Σ G(ṗ, ṗ) dt` of a path sampled every `dt`.
///
/// Each increment is projected to the sum-zero hyperplane and measured at
/// the segment midpoint, which makes the sum second-order accurate.
pub fn path_energy(path: &[SimplexPoint], dt: f64) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt = {dt} must be positive"
        )));
    }
    let n = path[0].n();
    let mut energy = 0.0;
    for pair in path.windows(2) {
        check_same_len(n, pair[1].n())?;
        let (a, b) = (pair[0].weights(), pair[1].weights());
        let rate: Vec<f64> = a.iter().zip(b).map(|(x, y)| (y - x) / dt).collect();
        let rate = project_sum_zero(&rate);
        let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        energy += inner_raw(&mid, &rate, &rate) * dt;
    }
    Ok(energy)
}

/// CSV rows `t,p_0,...,p_{N-1}` for a sampled geodesic.
#[derive(Debug, Clone, Serialize)]
pub struct GeodesicSample {
    pub t: f64,
    pub weights: Vec<f64>,
}

pub fn geodesic_samples(seg: &GeodesicSegment, segments: usize) -> Result<Vec<GeodesicSample>> {
    (0..=segments.max(1))
        .map(|i| {
            let t = i as f64 / segments.max(1) as f64;
            Ok(GeodesicSample {
                t,
                weights: seg.sample(t)?.into_weights(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{
        make_simplex, make_tangent, random_simplex, random_tangent_with, seeded_rng, Tolerances,
    };
    use crate::transform::{lq_norm, pushforward};

    fn pt(raw: &[f64]) -> SimplexPoint {
        make_simplex(raw, &Tolerances::default()).unwrap()
    }

    #[test]
    fn inner_product_examples() {
        let p = pt(&[0.5, 0.5]);
        let v = make_tangent(&p, &[1.0, -1.0]).unwrap();
        assert!((fisher_rao_inner(&p, &v, &v).unwrap() - 1.0).abs() < 1e-15);
        let z = TangentVec::zero(&p);
        assert_eq!(fisher_rao_inner(&p, &z, &v).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_is_pulled_back_sphere_metric() {
        let mut rng = seeded_rng(5);
        for seed in 0..200 {
            let p = random_simplex(8, seed, 1.0).unwrap();
            let v = random_tangent_with(&mut rng, &p);
            let w = random_tangent_with(&mut rng, &p);
            let dv = pushforward(&p, &v, 2.0).unwrap();
            let dw = pushforward(&p, &w, 2.0).unwrap();
            let euclid: f64 = dv
                .components()
                .iter()
                .zip(dw.components())
                .map(|(a, b)| a * b)
                .sum();
            let g = fisher_rao_inner(&p, &v, &w).unwrap();
            assert!((g - euclid).abs() <= 1e-10 * (1.0 + g.abs()));
            assert_eq!(g, fisher_rao_inner(&p, &w, &v).unwrap());
        }
    }

    #[test]
    fn finsler_examples() {
        let p = pt(&[0.5, 0.5]);
        let v = make_tangent(&p, &[0.5, -0.5]).unwrap();
        assert!((finsler_norm_q(&p, &v, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(finsler_norm_q(&p, &TangentVec::zero(&p), 3.0).unwrap(), 0.0);
        assert!(matches!(
            finsler_norm_q(&p, &v, 0.5),
            Err(Error::InvalidQ(_))
        ));
    }

    #[test]
    fn finsler_norm_calibration() {
        let mut rng = seeded_rng(8);
        for seed in 0..100 {
            let p = random_simplex(6, seed, 1.0).unwrap();
            let v = random_tangent_with(&mut rng, &p);
            for &q in &[1.5, 2.0, 3.0] {
                let lhs = lq_norm(pushforward(&p, &v, q).unwrap().components(), q);
                let rhs = finsler_norm_q(&p, &v, q).unwrap() / q;
                assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
                let lam = -2.5;
                let scaled = finsler_norm_q(&p, &v.scaled(lam), q).unwrap();
                assert!((scaled - lam.abs() * q * rhs).abs() <= 1e-12 * scaled);
            }
        }
    }

    #[test]
    fn distance_examples() {
        let p = pt(&[0.5, 0.5]);
        let r = pt(&[0.9, 0.1]);
        assert_eq!(fr_distance(&p, &p).unwrap(), 0.0);
        let d = fr_distance(&p, &r).unwrap();
        assert!((d - 0.463_647_609_000_806_1).abs() < 1e-12);
        assert!((d - bhattacharyya_angle(&p, &r).unwrap()).abs() < 1e-12);
        let eps = 1e-12;
        let a = pt(&[1.0 - eps, eps]);
        let b = pt(&[eps, 1.0 - eps]);
        assert!((fr_distance(&a, &b).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-5);
    }

    /// Minimizes the discrete path energy between (0.5, 0.5) and (0.9, 0.1)
    /// by Gauss–Seidel golden-section sweeps over the interior nodes; the
    /// minimal length is √energy at unit time.
    #[test]
    fn distance_matches_energy_minimization() {
        let (a, b) = (0.5f64, 0.9f64);
        let m = 41;
        let dt = 1.0 / (m - 1) as f64;
        // start from a deliberately poor path
        let mut path: Vec<f64> = (0..m)
            .map(|i| {
                let t = i as f64 * dt;
                a + (b - a) * t * t
            })
            .collect();
        let seg = |x: f64, y: f64| {
            let mid = 0.5 * (x + y);
            let d = (y - x) / dt;
            0.25 * d * d * (1.0 / mid + 1.0 / (1.0 - mid)) * dt
        };
        let gr = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..400 {
            for i in 1..m - 1 {
                let (l, r) = (path[i - 1], path[i + 1]);
                let local = |x: f64| seg(l, x) + seg(x, r);
                let (mut lo, mut hi) = (l.min(r), l.max(r));
                for _ in 0..60 {
                    let c = hi - gr * (hi - lo);
                    let d = lo + gr * (hi - lo);
                    if local(c) < local(d) {
                        hi = d;
                    } else {
                        lo = c;
                    }
                }
                path[i] = 0.5 * (lo + hi);
            }
        }
        let energy: f64 = path.windows(2).map(|w| seg(w[0], w[1])).sum();
        let d = fr_distance(&pt(&[0.5, 0.5]), &pt(&[0.9, 0.1])).unwrap();
        assert!((energy.sqrt() - d).abs() < 1e-3, "{} vs {d}", energy.sqrt());
    }

    #[test]
    fn geodesic_endpoints_and_midpoint() {
        let p = pt(&[0.9, 0.1]);
        let r = pt(&[0.1, 0.9]);
        let g = geodesic(&p, &r).unwrap();
        let mid = g.sample(0.5).unwrap();
        assert!((mid.weights()[0] - 0.5).abs() < 1e-15);
        assert!(g.sample(0.0).unwrap().l1_distance(&p).unwrap() < 1e-10);
        assert!(g.sample(1.0).unwrap().l1_distance(&r).unwrap() < 1e-10);
        assert!(matches!(geodesic(&p, &p), Err(Error::IdenticalEndpoints)));
        assert!(g.sample(1.5).is_err());
    }

    #[test]
    fn closed_geodesic_keeps_shared_zero() {
        let tol = Tolerances::default();
        let p = ClosedSimplexPoint::new(vec![1.0, 0.0, 0.0], &tol).unwrap();
        let r = ClosedSimplexPoint::new(vec![0.0, 1.0, 0.0], &tol).unwrap();
        let g = geodesic_closed(&p, &r).unwrap();
        assert!((g.angle() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let mid = g.sample(0.5).unwrap();
        assert!((mid.weights()[0] - 0.5).abs() < 1e-15);
        assert_eq!(mid.weights()[2], 0.0);
    }

    #[test]
    fn constant_path_has_zero_energy() {
        let p = random_simplex(4, 1, 1.0).unwrap();
        assert_eq!(path_energy(&[p.clone(), p.clone(), p], 0.1).unwrap(), 0.0);
        assert!(matches!(path_energy(&[], 0.1), Err(Error::TooFewPoints)));
    }

    #[test]
    fn geodesic_energy_is_squared_angle() {
        let p = random_simplex(5, 21, 1.0).unwrap();
        let r = random_simplex(5, 22, 1.0).unwrap();
        let g = geodesic(&p, &r).unwrap();
        let path = g.sample_uniform(999).unwrap();
        let e = path_energy(&path, 1.0 / 999.0).unwrap();
        let theta = g.angle();
        assert!(((e - theta * theta) / (theta * theta)).abs() < 1e-4);
    }
}
