//! Fisher–Rao gradient flow of the linear objective `F(p) = ⟨c, p⟩`.
//!
//! The flow is the replicator equation `ṗ_n = p_n (c_n − ⟨p, c⟩)`, with the
//! explicit solution
//!
//! ```text
//! p_n(t) = p_n(0) e^{c_n t} / Σ_k p_k(0) e^{c_k t}
//! ```
//!
//! For a strictly decreasing cost the flow runs into the corner `e_0`, which
//! solves the linear program `max ⟨c, p⟩` over the closed simplex.
//!
//! The gradient taken with respect to the 1/4-normalized Fisher–Rao metric is
//! `4·W_c`; this module follows `W_c` throughout, so its clock runs four times
//! slower than the metric gradient flow and than the sphere flow in
//! [`crate::hamiltonian::sphere_gradient_flow_to_lp`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::integrate_positive;
use crate::simplex::{
    check_same_len, dot, ClosedSimplexPoint, SimplexPoint, TangentVec, Tolerances,
};
use crate::transform::{SphereQPoint, SphereTangent};

fn check_cost(n: usize, c: &[f64]) -> Result<()> {
    check_same_len(n, c.len())?;
    match c.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn max_of(c: &[f64]) -> f64 {
    c.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// `⟨c, p⟩`.
pub fn objective(p: &SimplexPoint, c: &[f64]) -> Result<f64> {
    check_cost(p.n(), c)?;
    Ok(dot(p.weights(), c))
}

/// `max_n c_n − ⟨c, p⟩`, evaluated as `Σ (max c − c_n) p_n` so that it stays
/// accurate when the gap is far below machine epsilon relative to `max c`.
pub fn optimality_gap(p: &[f64], c: &[f64]) -> f64 {
    let top = max_of(c);
    p.iter().zip(c).map(|(pn, cn)| (top - cn) * pn).sum()
}

/// `Var_p(c) = Σ c_n² p_n − ⟨c, p⟩²`, the rate of change of the objective
/// along the flow.
pub fn cost_variance(p: &SimplexPoint, c: &[f64]) -> Result<f64> {
    let mean = objective(p, c)?;
    Ok(p.weights()
        .iter()
        .zip(c)
        .map(|(pn, cn)| pn * (cn - mean) * (cn - mean))
        .sum())
}

fn replicator(p: &[f64], c: &[f64]) -> Vec<f64> {
    let mean = dot(p, c);
    p.iter().zip(c).map(|(pn, cn)| pn * (cn - mean)).collect()
}

/// The replicator field `W_c(p)_n = p_n c_n − ⟨p, c⟩ p_n`.
pub fn gradient_field(p: &SimplexPoint, c: &[f64]) -> Result<TangentVec> {
    check_cost(p.n(), c)?;
    Ok(TangentVec::from_parts(p, replicator(p.weights(), c)))
}

fn sphere_field(x: &[f64], c: &[f64]) -> Vec<f64> {
    let g: Vec<f64> = x.iter().zip(c).map(|(xn, cn)| 2.0 * xn * cn).collect();
    let radial = dot(&g, x);
    g.iter().zip(x).map(|(gn, xn)| gn - radial * xn).collect()
}

/// Riemannian gradient of `x ↦ ⟨c, x²⟩` on the unit ℓ² sphere:
/// `P_x(2 x ⊙ c)` with `P_x(v) = v − ⟨v, x⟩ x`.
pub fn sphere_gradient(x: &SphereQPoint, c: &[f64]) -> Result<SphereTangent> {
    if x.q() != 2.0 {
        return Err(Error::InvalidQ(x.q()));
    }
    check_cost(x.n(), c)?;
    Ok(SphereTangent::from_parts(x, sphere_field(x.coords(), c)))
}

pub(crate) fn sphere_flow_field(x: &[f64], c: &[f64]) -> Vec<f64> {
    sphere_field(x, c)
}

/// Weights of the closed-form flow; entries may underflow to zero.
fn closed_form_weights(p0: &[f64], c: &[f64], t: f64) -> Vec<f64> {
    let shift = c.iter().map(|cn| cn * t).fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = p0
        .iter()
        .zip(c)
        .map(|(pn, cn)| pn * (cn * t - shift).exp())
        .collect();
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

/// Explicit flow line `p(t)` through `p0`, valid for any real `t`.
///
/// Exponentials are shifted by `max_n c_n t` before normalizing. Fails with
/// [`Error::PositivityLost`] once some weight underflows to zero.
pub fn flow_closed_form(p0: &SimplexPoint, c: &[f64], t: f64) -> Result<SimplexPoint> {
    check_cost(p0.n(), c)?;
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t = {t} is not finite")));
    }
    if t == 0.0 {
        return Ok(p0.clone());
    }
    SimplexPoint::from_positive_unchecked(closed_form_weights(p0.weights(), c, t))
}

/// Sampled flow line with objective and optimality-gap columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<SimplexPoint>,
    pub objective: Vec<f64>,
    pub gap: Vec<f64>,
}

impl FlowTrajectory {
    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            objective: Vec::with_capacity(n),
            gap: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, p: SimplexPoint, c: &[f64]) {
        self.objective.push(dot(p.weights(), c));
        self.gap.push(optimality_gap(p.weights(), c));
        self.times.push(t);
        self.states.push(p);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.states.first().map_or(0, SimplexPoint::n)
    }

    /// Checks the trajectory invariants: increasing times, non-decreasing
    /// objective and a non-negative, non-increasing gap (all up to `tol_ode`).
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let n = self.len();
        if self.states.len() != n || self.objective.len() != n || self.gap.len() != n {
            return Err(Error::InvalidArgument(
                "trajectory columns differ in length".into(),
            ));
        }
        for i in 1..n {
            if !(self.times[i] > self.times[i - 1]) {
                return Err(Error::InvalidArgument(format!(
                    "times not increasing at row {i}"
                )));
            }
            if self.objective[i] < self.objective[i - 1] - tol.tol_ode {
                return Err(Error::InvalidArgument(format!(
                    "objective decreases at row {i}"
                )));
            }
            if self.gap[i] > self.gap[i - 1] + tol.tol_ode {
                return Err(Error::InvalidArgument(format!("gap increases at row {i}")));
            }
        }
        if let Some(i) = self.gap.iter().position(|g| *g < -tol.tol_ode) {
            return Err(Error::InvalidArgument(format!("negative gap at row {i}")));
        }
        Ok(())
    }
}

/// Closed-form flow evaluated on a grid of times.
pub fn closed_form_trajectory(
    p0: &SimplexPoint,
    c: &[f64],
    times: &[f64],
) -> Result<FlowTrajectory> {
    check_cost(p0.n(), c)?;
    let mut traj = FlowTrajectory::with_capacity(times.len());
    for &t in times {
        traj.push(t, flow_closed_form(p0, c, t)?, c);
    }
    Ok(traj)
}

/// RK4 integration of `ṗ = W_c(p)` with per-step renormalization of the sum.
///
/// Every accepted step is recorded. Steps that would leave the interior are
/// halved (at most 40 times) before giving up with [`Error::StepTooLarge`].
pub fn flow_ode(p0: &SimplexPoint, c: &[f64], t_end: f64, step: f64) -> Result<FlowTrajectory> {
    check_cost(p0.n(), c)?;
    let mut traj = FlowTrajectory::with_capacity((t_end / step).ceil().max(0.0) as usize + 1);
    integrate_positive(
        p0.weights().to_vec(),
        t_end,
        step,
        |p: &[f64]| replicator(p, c),
        |p: &mut [f64]| {
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|v| *v /= s);
        },
        |t, p| {
            traj.push(t, SimplexPoint::from_positive_unchecked(p.to_vec())?, c);
            Ok(())
        },
    )?;
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Converged,
    /// `t_max` was reached before the gap fell below tolerance; the solution
    /// holds the best iterate found.
    HorizonExceeded,
}

/// Result of [`solve_lp`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    /// The flow point rounded onto the optimal face: its mass restricted to
    /// `argmax c` and renormalized.
    pub maximizer: ClosedSimplexPoint,
    /// The last flow iterate itself.
    pub flow_point: ClosedSimplexPoint,
    /// `⟨c, flow_point⟩`.
    pub value: f64,
    /// `max c − value`.
    pub certificate_gap: f64,
    pub horizon: f64,
    pub iterations: usize,
    pub unique_argmax: bool,
    pub status: LpStatus,
}

impl LpSolution {
    pub(crate) fn from_flow_point(
        weights: Vec<f64>,
        c: &[f64],
        horizon: f64,
        iterations: usize,
        status: LpStatus,
    ) -> Result<Self> {
        let tol = Tolerances::default();
        let top = max_of(c);
        let face: Vec<bool> = c.iter().map(|cn| *cn == top).collect();
        let face_mass: f64 = weights
            .iter()
            .zip(&face)
            .filter(|(_, f)| **f)
            .map(|(w, _)| w)
            .sum();
        let rounded: Vec<f64> = if face_mass > 0.0 {
            weights
                .iter()
                .zip(&face)
                .map(|(w, f)| if *f { w / face_mass } else { 0.0 })
                .collect()
        } else {
            weights.clone()
        };
        Ok(Self {
            maximizer: ClosedSimplexPoint::new(rounded, &tol)?,
            value: dot(&weights, c),
            certificate_gap: optimality_gap(&weights, c),
            flow_point: ClosedSimplexPoint::new(weights, &tol)?,
            horizon,
            iterations,
            unique_argmax: face.iter().filter(|f| **f).count() == 1,
            status,
        })
    }
}

/// Solves `max ⟨c, p⟩` over the closed simplex by following the flow from `p0`.
///
/// The closed form is evaluated at horizons `0, 1, 2, 4, …` (capped at
/// `t_max`) until the gap drops to `gap_tol`.
pub fn solve_lp(p0: &SimplexPoint, c: &[f64], gap_tol: f64, t_max: f64) -> Result<LpSolution> {
    check_cost(p0.n(), c)?;
    if !(gap_tol.is_finite() && gap_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gap_tol {gap_tol} must be positive"
        )));
    }
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_max {t_max} must be non-negative"
        )));
    }
    let mut horizon = 0.0;
    let mut iterations = 0;
    loop {
        let w = if horizon == 0.0 {
            p0.weights().to_vec()
        } else {
            closed_form_weights(p0.weights(), c, horizon)
        };
        iterations += 1;
        let gap = optimality_gap(&w, c);
        if gap <= gap_tol {
            return LpSolution::from_flow_point(w, c, horizon, iterations, LpStatus::Converged);
        }
        if horizon >= t_max {
            return LpSolution::from_flow_point(
                w,
                c,
                horizon,
                iterations,
                LpStatus::HorizonExceeded,
            );
        }
        horizon = if horizon == 0.0 { 1.0 } else { 2.0 * horizon }.min(t_max);
    }
}

/// Least-squares slope of `ln gap(t)` over the trailing half of a trajectory.
///
/// For a cost with a unique maximizer the gap decays like
/// `K e^{−(c_(1) − c_(2)) t}`, so the slope estimates minus the spectral gap
/// between the two largest costs.
pub fn convergence_rate(trajectory: &FlowTrajectory, c: &[f64]) -> Result<f64> {
    check_cost(trajectory.dimension(), c)?;
    let top = max_of(c);
    if c.iter().filter(|cn| **cn == top).count() != 1 {
        return Err(Error::DegenerateWindow("maximum of the cost is not unique"));
    }
    let start = trajectory.len() / 2;
    let window: Vec<(f64, f64)> = trajectory.times[start..]
        .iter()
        .zip(&trajectory.gap[start..])
        .map(|(t, g)| (*t, *g))
        .collect();
    if window.len() < 2 {
        return Err(Error::DegenerateWindow(
            "fewer than two points in the window",
        ));
    }
    if window.iter().any(|(_, g)| !(*g > 0.0)) {
        return Err(Error::DegenerateWindow("gap vanishes inside the window"));
    }
    let m = window.len() as f64;
    let mean_t = window.iter().map(|(t, _)| t).sum::<f64>() / m;
    let mean_y = window.iter().map(|(_, g)| g.ln()).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, g) in &window {
        sxy += (t - mean_t) * (g.ln() - mean_y);
        sxx += (t - mean_t) * (t - mean_t);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateWindow("window spans zero time"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{make_simplex, random_simplex, realize_cost, CostSpec};
    use crate::transform::q_root;

    fn pt(raw: &[f64]) -> SimplexPoint {
        make_simplex(raw, &Tolerances::default()).unwrap()
    }

    #[test]
    fn objective_examples() {
        let u = SimplexPoint::uniform(4).unwrap();
        assert_eq!(objective(&u, &[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.25);
        assert!((objective(&u, &[3.0; 4]).unwrap() - 3.0).abs() < 1e-15);
        let p = pt(&[0.731059, 0.268941]);
        assert!((objective(&p, &[1.0, 0.0]).unwrap() - 0.731059).abs() < 1e-15);
        assert!(matches!(
            objective(&u, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn replicator_field_examples() {
        let p = pt(&[1.0, 1.0]);
        let w = gradient_field(&p, &[1.0, 0.0]).unwrap();
        assert_eq!(w.components(), &[0.25, -0.25]);
        let w = gradient_field(&p, &[2.5, 2.5]).unwrap();
        assert!(w.components().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn replicator_field_ignores_norm_shift() {
        for seed in 0..50 {
            let p = random_simplex(7, seed, 1.0).unwrap();
            let c = realize_cost(&CostSpec::Power {
                exponent: 0.8,
                n: 7,
            })
            .unwrap();
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            let shifted: Vec<f64> = c.iter().map(|v| v - norm).collect();
            let a = gradient_field(&p, &c).unwrap();
            let b = gradient_field(&p, &shifted).unwrap();
            for (x, y) in a.components().iter().zip(b.components()) {
                assert!((x - y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sphere_gradient_example() {
        // independent arithmetic: g = 2 x ⊙ c = (√2, 0), ⟨g, x⟩ = 1,
        // g − x = (√2 − √0.5, −√0.5)
        let h = 0.5f64.sqrt();
        let want = [2f64.sqrt() - h, -h];
        let x = q_root(&pt(&[1.0, 1.0]), 2.0).unwrap();
        let g = sphere_gradient(&x, &[1.0, 0.0]).unwrap();
        for (got, want) in g.components().iter().zip(want) {
            assert!((got - want).abs() < 1e-15);
        }
        let g = sphere_gradient(&x, &[4.0, 4.0]).unwrap();
        assert!(g.components().iter().all(|v| v.abs() < 1e-15));
        let x3 = q_root(&pt(&[1.0, 1.0]), 3.0).unwrap();
        assert!(matches!(
            sphere_gradient(&x3, &[1.0, 0.0]),
            Err(Error::InvalidQ(_))
        ));
    }

    #[test]
    fn sphere_gradient_pushes_forward_to_four_w() {
        let c = realize_cost(&CostSpec::Geometric { ratio: 0.6, n: 6 }).unwrap();
        for seed in 0..50 {
            let p = random_simplex(6, seed, 1.0).unwrap();
            let x = q_root(&p, 2.0).unwrap();
            let g = sphere_gradient(&x, &c).unwrap();
            assert!(g.tangency_residual().abs() < 1e-14);
            let w = gradient_field(&p, &c).unwrap();
            for i in 0..6 {
                let d = 2.0 * x.coords()[i] * g.components()[i];
                assert!((d - 4.0 * w.components()[i]).abs() < 1e-10);
            }
        }
    }

    /// Independent RK4 oracle for the two-state replicator with c = (1, 0).
    fn rk4_oracle(p: f64, t: f64, steps: usize) -> f64 {
        let f = |p: f64| p * (1.0 - p);
        let h = t / steps as f64;
        let mut y = p;
        for _ in 0..steps {
            let k1 = f(y);
            let k2 = f(y + 0.5 * h * k1);
            let k3 = f(y + 0.5 * h * k2);
            let k4 = f(y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        y
    }

    #[test]
    fn closed_form_examples() {
        let p0 = pt(&[1.0, 1.0]);
        let p1 = flow_closed_form(&p0, &[1.0, 0.0], 1.0).unwrap();
        let e = std::f64::consts::E;
        assert!((p1.weights()[0] - e / (e + 1.0)).abs() < 1e-15);
        assert!((p1.weights()[0] - rk4_oracle(0.5, 1.0, 1000)).abs() < 1e-8);
        assert_eq!(flow_closed_form(&p0, &[1.0, 0.0], 0.0).unwrap(), p0);
        let q = random_simplex(5, 2, 1.0).unwrap();
        let same = flow_closed_form(&q, &[0.3; 5], 17.0).unwrap();
        assert!(same.l1_distance(&q).unwrap() < 1e-15);
    }

    #[test]
    fn closed_form_survives_large_times() {
        let p0 = SimplexPoint::uniform(3).unwrap();
        let p = flow_closed_form(&p0, &[1.0, 0.99, 0.98], 1000.0).unwrap();
        assert!(p.weights().iter().all(|w| w.is_finite() && *w > 0.0));
        assert!(matches!(
            flow_closed_form(&p0, &[1.0, 0.0, 0.0], 1e4),
            Err(Error::PositivityLost { index: 1 })
        ));
    }

    #[test]
    fn ode_tracks_closed_form() {
        let c = realize_cost(&CostSpec::Geometric { ratio: 0.5, n: 8 }).unwrap();
        let p0 = random_simplex(8, 4, 1.0).unwrap();
        let traj = flow_ode(&p0, &c, 2.0, 1e-2).unwrap();
        traj.validate(&Tolerances::default()).unwrap();
        for (t, p) in traj.times.iter().zip(&traj.states) {
            let exact = flow_closed_form(&p0, &c, *t).unwrap();
            assert!(p.l1_distance(&exact).unwrap() < 1e-8);
        }
        let flat = flow_ode(&p0, &[0.0; 8], 1.0, 0.1).unwrap();
        assert!(flat
            .states
            .iter()
            .all(|p| p.l1_distance(&p0).unwrap() < 1e-15));
    }

    #[test]
    fn lp_limits() {
        let c = realize_cost(&CostSpec::Geometric { ratio: 0.5, n: 8 }).unwrap();
        let sol = solve_lp(&SimplexPoint::uniform(8).unwrap(), &c, 1e-6, 1e3).unwrap();
        assert_eq!(sol.status, LpStatus::Converged);
        assert!(sol.unique_argmax);
        assert!(sol.certificate_gap <= 1e-6);
        assert!((sol.value + sol.certificate_gap - 1.0).abs() < 1e-12);
        assert!(
            sol.flow_point
                .l1_distance(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
                .unwrap()
                < 1e-6
        );

        let flat = solve_lp(&SimplexPoint::uniform(3).unwrap(), &[2.0; 3], 1e-9, 10.0).unwrap();
        assert_eq!(flat.horizon, 0.0);
        assert_eq!(flat.certificate_gap, 0.0);
    }

    #[test]
    fn tied_maximum_splits_by_initial_mass() {
        // closed form with c = (1, 1, 0): p(t) = (e^t, e^t, 1) / (2 e^t + 1) → (1/2, 1/2, 0)
        let p0 = SimplexPoint::uniform(3).unwrap();
        let sol = solve_lp(&p0, &[1.0, 1.0, 0.0], 1e-10, 1e3).unwrap();
        assert!(!sol.unique_argmax);
        let w = sol.maximizer.weights();
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15 && w[2] == 0.0);
        let t = 30.0;
        let p = flow_closed_form(&p0, &[1.0, 1.0, 0.0], t).unwrap();
        let want = t.exp() / (2.0 * t.exp() + 1.0);
        assert!((p.weights()[0] - want).abs() < 1e-15);

        let skew = pt(&[3.0, 1.0, 1.0]);
        let sol = solve_lp(&skew, &[1.0, 1.0, 0.0], 1e-10, 1e3).unwrap();
        assert!((sol.maximizer.weights()[0] - 0.75).abs() < 1e-14);
    }

    #[test]
    fn horizon_exceeded_is_flagged() {
        let c = realize_cost(&CostSpec::Geometric { ratio: 0.5, n: 4 }).unwrap();
        let sol = solve_lp(&SimplexPoint::uniform(4).unwrap(), &c, 1e-12, 4.0).unwrap();
        assert_eq!(sol.status, LpStatus::HorizonExceeded);
        assert_eq!(sol.horizon, 4.0);
    }

    #[test]
    fn rate_matches_spectral_gap() {
        let c = realize_cost(&CostSpec::Geometric { ratio: 0.5, n: 8 }).unwrap();
        let p0 = SimplexPoint::uniform(8).unwrap();
        let times: Vec<f64> = (0..=400).map(|i| i as f64 * 0.1).collect();
        let traj = closed_form_trajectory(&p0, &c, &times).unwrap();
        let rate = convergence_rate(&traj, &c).unwrap();
        assert!((rate + 0.5).abs() < 0.025, "{rate}");

        let doubled: Vec<f64> = c.iter().map(|v| 2.0 * v).collect();
        let traj2 = closed_form_trajectory(&p0, &doubled, &times).unwrap();
        let rate2 = convergence_rate(&traj2, &doubled).unwrap();
        assert!((rate2 / rate - 2.0).abs() < 0.1);

        let flat = closed_form_trajectory(&p0, &[1.0; 8], &times).unwrap();
        assert!(matches!(
            convergence_rate(&flat, &[1.0; 8]),
            Err(Error::DegenerateWindow(_))
        ));
    }
}
