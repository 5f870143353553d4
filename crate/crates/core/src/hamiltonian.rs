//! The truncated Hamiltonian system on complex projective space.
//!
//! States are unit vectors `z ∈ ℂ^N`; projective points are their classes
//! modulo a global phase. The Hamiltonian `H_c(z) = Σ c_n |z_n|²` splits into
//! the commuting pieces `H_n(z) = c_n |z_n|²`, each of which generates a phase
//! rotation of the `n`-th coordinate only.
//!
//! Conventions: the canonical symplectic form is
//! `ω = (i/2) Σ dz_j ∧ dz̄_j = Σ dx_j ∧ dy_j`, the Hamiltonian vector field is
//! fixed by `ω(X_H, ·) = dH`, and the bracket is
//! `{f, g} = 2i Σ_j (∂f/∂z̄_j ∂g/∂z_j − ∂f/∂z_j ∂g/∂z̄_j)`. Under these
//! conventions the flow of `H_c` is `z_n(t) = e^{iκ c_n t} z_n(0)` with
//! `κ = PHASE_SPEED = −2`.
//!
//! Momentum maps are `i`-valued; [`MomentumValue`] stores the real
//! coefficients of `i`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{optimality_gap, sphere_flow_field, FlowTrajectory, LpSolution, LpStatus};
use crate::ode::integrate_positive;
use crate::simplex::{check_same_len, seeded_rng, ClosedSimplexPoint, SimplexPoint, Tolerances};

/// Phase speed `κ` of the Hamiltonian flow: `z_n(t) = e^{iκ c_n t} z_n(0)`.
pub const PHASE_SPEED: f64 = -2.0;

/// Bracket residual threshold used by [`integrability_report`].
pub const BRACKET_THRESHOLD: f64 = 1e-8;
/// Conservation drift threshold used by [`integrability_report`].
pub const DRIFT_THRESHOLD: f64 = 1e-12;

/// Unit vector of `ℂ^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexState {
    amplitudes: Vec<Complex64>,
}

impl ComplexState {
    pub fn new(amplitudes: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(index) = amplitudes.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let sum = norm_sqr(&amplitudes);
        if (sum - 1.0).abs() > tol.tol_sum {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { amplitudes })
    }

    /// Scales a nonzero vector onto the unit sphere.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(index) = amplitudes.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let norm = norm_sqr(&amplitudes).sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument(
                "cannot normalize the zero vector".into(),
            ));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    /// The basis vector `e_k`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, n });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    /// Multiplies every amplitude by `e^{iφ}`.
    pub fn with_global_phase(&self, phi: f64) -> Self {
        let u = Complex64::from_polar(1.0, phi);
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * u).collect(),
        }
    }

    /// `|z_n|²` for every `n`.
    pub fn moduli_sqr(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

fn norm_sqr(z: &[Complex64]) -> f64 {
    z.iter().map(|v| v.norm_sqr()).sum()
}

/// Point of the truncated `ℂP^{N-1}`, held as a representative in canonical
/// gauge: the first coordinate of largest modulus is real and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjPoint {
    representative: ComplexState,
}

impl ProjPoint {
    pub fn representative(&self) -> &ComplexState {
        &self.representative
    }
}

/// Hopf projection onto the canonical-gauge representative.
///
/// Moduli within a relative `1e-12` of the maximum count as tied, and ties go
/// to the lowest index, so a global phase change cannot flip the gauge
/// coordinate through roundoff.
pub fn project(s: &ComplexState) -> ProjPoint {
    let moduli: Vec<f64> = s.amplitudes.iter().map(|z| z.norm()).collect();
    let max = moduli.iter().cloned().fold(0.0, f64::max);
    let k = moduli
        .iter()
        .position(|m| *m >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    let z = s.amplitudes[k];
    let gauge = z.conj() / z.norm();
    let mut amplitudes: Vec<Complex64> = s.amplitudes.iter().map(|v| v * gauge).collect();
    amplitudes[k] = Complex64::new(z.norm(), 0.0);
    ProjPoint {
        representative: ComplexState { amplitudes },
    }
}

/// Real coefficients of an `i`-valued momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumValue {
    /// Coefficient of `i` in each component.
    pub coefficients: Vec<f64>,
}

impl MomentumValue {
    /// `2 × coefficients`, which lies in the closed simplex for the torus
    /// momentum of a unit state.
    pub fn doubled_as_simplex(&self, tol: &Tolerances) -> Result<ClosedSimplexPoint> {
        ClosedSimplexPoint::new(self.coefficients.iter().map(|c| 2.0 * c).collect(), tol)
    }
}

/// `H_c(z) = Σ c_n |z_n|²`.
pub fn hamiltonian_value(s: &ComplexState, c: &[f64]) -> Result<f64> {
    check_same_len(s.n(), c.len())?;
    Ok(hc_raw(&s.amplitudes, c))
}

fn hc_raw(z: &[Complex64], c: &[f64]) -> f64 {
    z.iter().zip(c).map(|(z, c)| c * z.norm_sqr()).sum()
}

/// `H_n(z) = c_n |z_n|²`.
pub fn conserved_quantity(s: &ComplexState, c: &[f64], n: usize) -> Result<f64> {
    check_same_len(s.n(), c.len())?;
    if n >= s.n() {
        return Err(Error::IndexOutOfRange { index: n, n: s.n() });
    }
    Ok(c[n] * s.amplitudes[n].norm_sqr())
}

/// Exact flow of `H_c`: `z_n(t) = e^{iκ c_n t} z_n(0)`.
pub fn hamiltonian_flow(s0: &ComplexState, c: &[f64], t: f64) -> Result<ComplexState> {
    check_same_len(s0.n(), c.len())?;
    Ok(ComplexState {
        amplitudes: s0
            .amplitudes
            .iter()
            .zip(c)
            .map(|(z, cn)| z * Complex64::from_polar(1.0, PHASE_SPEED * cn * t))
            .collect(),
    })
}

/// Generator of [`hamiltonian_flow`]: `X_H(z)_n = iκ c_n z_n`.
pub fn hamiltonian_vector_field(s: &ComplexState, c: &[f64]) -> Result<Vec<Complex64>> {
    check_same_len(s.n(), c.len())?;
    Ok(s.amplitudes
        .iter()
        .zip(c)
        .map(|(z, cn)| Complex64::new(0.0, PHASE_SPEED * cn) * z)
        .collect())
}

/// Canonical symplectic form `ω(u, v) = Σ (Re u_j Im v_j − Im u_j Re v_j)`.
pub fn canonical_form(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| a.re * b.im - a.im * b.re)
        .sum()
}

/// Wirtinger derivatives `(∂f/∂z_j, ∂f/∂z̄_j)` from central differences.
#[derive(Debug, Clone)]
struct WirtingerGrad {
    dz: Vec<Complex64>,
    dzbar: Vec<Complex64>,
}

impl WirtingerGrad {
    fn estimate<F: Fn(&[Complex64]) -> f64 + ?Sized>(f: &F, z: &[Complex64], h: f64) -> Self {
        let mut work = z.to_vec();
        let mut dz = Vec::with_capacity(z.len());
        let mut dzbar = Vec::with_capacity(z.len());
        for j in 0..z.len() {
            let base = work[j];
            work[j] = base + Complex64::new(h, 0.0);
            let fp = f(&work);
            work[j] = base - Complex64::new(h, 0.0);
            let fm = f(&work);
            let dx = (fp - fm) / (2.0 * h);
            work[j] = base + Complex64::new(0.0, h);
            let fp = f(&work);
            work[j] = base - Complex64::new(0.0, h);
            let fm = f(&work);
            let dy = (fp - fm) / (2.0 * h);
            work[j] = base;
            dz.push(Complex64::new(dx, -dy) * 0.5);
            dzbar.push(Complex64::new(dx, dy) * 0.5);
        }
        Self { dz, dzbar }
    }

    fn bracket(&self, other: &WirtingerGrad) -> f64 {
        let s: Complex64 = (0..self.dz.len())
            .map(|j| self.dzbar[j] * other.dz[j] - self.dz[j] * other.dzbar[j])
            .sum();
        (Complex64::new(0.0, 2.0) * s).re
    }
}

/// Pair of gradient estimates at step `h` and `h/2`, for the consistency test.
struct RefinedGrad {
    coarse: WirtingerGrad,
    fine: WirtingerGrad,
}

impl RefinedGrad {
    fn estimate<F: Fn(&[Complex64]) -> f64 + ?Sized>(f: &F, z: &[Complex64], h: f64) -> Self {
        Self {
            coarse: WirtingerGrad::estimate(f, z, h),
            fine: WirtingerGrad::estimate(f, z, 0.5 * h),
        }
    }

    fn bracket(&self, other: &RefinedGrad) -> Result<f64> {
        let coarse = self.coarse.bracket(&other.coarse);
        let fine = self.fine.bracket(&other.fine);
        if (coarse - fine).abs() > 1e-6 * (1.0 + coarse.abs()) {
            return Err(Error::NumericalBreakdown { coarse, fine });
        }
        Ok(coarse)
    }
}

/// `{f, g}` at `z ∈ ℂ^N` (not necessarily of unit norm), with Wirtinger
/// derivatives from central differences of step `fd_step`.
///
/// The bracket is recomputed with step `fd_step/2`; disagreement beyond a
/// relative `1e-6` is reported as [`Error::NumericalBreakdown`].
pub fn poisson_bracket<F, G>(f: &F, g: &G, z: &[Complex64], fd_step: f64) -> Result<f64>
where
    F: Fn(&[Complex64]) -> f64 + ?Sized,
    G: Fn(&[Complex64]) -> f64 + ?Sized,
{
    if !(fd_step.is_finite() && fd_step > 0.0) {
        return Err(Error::InvalidTolerance);
    }
    let gf = RefinedGrad::estimate(f, z, fd_step);
    let gg = RefinedGrad::estimate(g, z, fd_step);
    gf.bracket(&gg)
}

/// `μ_{S¹}(z) = i ⟨z, z⟩`; the single stored coefficient is `Σ |z_n|²`.
pub fn momentum_s1(z: &[Complex64]) -> MomentumValue {
    MomentumValue {
        coefficients: vec![norm_sqr(z)],
    }
}

/// `μ_T([z]) = (i/2)(|z_n|²)`.
pub fn momentum_torus(p: &ProjPoint) -> MomentumValue {
    psi(&p.representative)
}

/// `Ψ(z) = (i/2)(|z_n|²)` on the unit sphere, before projecting.
pub fn psi(s: &ComplexState) -> MomentumValue {
    MomentumValue {
        coefficients: s.amplitudes.iter().map(|z| 0.5 * z.norm_sqr()).collect(),
    }
}

/// Real, positive embedding `p ↦ (√p_n)` of the simplex into the unit sphere.
pub fn embed_simplex(p: &SimplexPoint) -> ComplexState {
    ComplexState {
        amplitudes: p
            .weights()
            .iter()
            .map(|w| Complex64::new(w.sqrt(), 0.0))
            .collect(),
    }
}

/// Gaussian random unit state.
pub fn random_state_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<ComplexState> {
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    let raw = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    ComplexState::normalized(raw)
}

pub fn random_state(n: usize, seed: u64) -> Result<ComplexState> {
    random_state_with(&mut seeded_rng(seed), n)
}

/// Brackets `{H_k, H_m}` (`k < m`) and `{H_n, H_c}` at one state.
#[derive(Debug, Clone, Serialize)]
pub struct BracketTable {
    /// `pairwise[k][m] = {H_k, H_m}`.
    pub pairwise: Vec<Vec<f64>>,
    /// `with_hc[n] = {H_n, H_c}`.
    pub with_hc: Vec<f64>,
}

pub fn bracket_table(s: &ComplexState, c: &[f64], fd_step: f64) -> Result<BracketTable> {
    check_same_len(s.n(), c.len())?;
    let z = s.amplitudes();
    let n = s.n();
    let parts: Vec<RefinedGrad> = (0..n)
        .map(|k| {
            let ck = c[k];
            RefinedGrad::estimate(&move |w: &[Complex64]| ck * w[k].norm_sqr(), z, fd_step)
        })
        .collect();
    let total = RefinedGrad::estimate(&|w: &[Complex64]| hc_raw(w, c), z, fd_step);
    let mut pairwise = vec![vec![0.0; n]; n];
    for k in 0..n {
        for m in 0..n {
            if k != m {
                pairwise[k][m] = parts[k].bracket(&parts[m])?;
            }
        }
    }
    let with_hc = parts
        .iter()
        .map(|p| p.bracket(&total))
        .collect::<Result<Vec<_>>>()?;
    Ok(BracketTable { pairwise, with_hc })
}

/// Numerical evidence for complete integrability of `H_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub max_pairwise_bracket: f64,
    #[serde(rename = "max_bracket_with_Hc")]
    pub max_bracket_with_hc: f64,
    pub max_conservation_drift: f64,
    /// Largest `|{|z_0|², Re z_0 z̄_1}|` seen; should be far from zero.
    pub negative_control_bracket: f64,
    pub bracket_threshold: f64,
    pub drift_threshold: f64,
    pub samples: usize,
    pub seed: u64,
}

impl IntegrabilityReport {
    pub fn passed(&self) -> bool {
        self.max_pairwise_bracket <= self.bracket_threshold
            && self.max_bracket_with_hc <= self.bracket_threshold
            && self.max_conservation_drift <= self.drift_threshold
    }
}

/// Maximum drift of every `|z_n|²`, `H_n` and `H_c` along the flow, sampled
/// on `steps + 1` equally spaced times in `[0, t_end]`.
pub fn conservation_drift(s: &ComplexState, c: &[f64], t_end: f64, steps: usize) -> Result<f64> {
    check_same_len(s.n(), c.len())?;
    let m0 = s.moduli_sqr();
    let h0 = hc_raw(&s.amplitudes, c);
    let mut drift: f64 = 0.0;
    for i in 0..=steps {
        let t = t_end * i as f64 / steps.max(1) as f64;
        let st = hamiltonian_flow(s, c, t)?;
        for (n, m) in st.moduli_sqr().iter().enumerate() {
            drift = drift.max((m - m0[n]).abs());
            drift = drift.max((c[n] * m - c[n] * m0[n]).abs());
        }
        drift = drift.max((hc_raw(&st.amplitudes, c) - h0).abs());
    }
    Ok(drift)
}

/// Brackets, conservation drift over `t ∈ [0, 100]` and a non-commuting
/// control at `samples` seeded random states.
pub fn integrability_report(c: &[f64], samples: usize, seed: u64) -> Result<IntegrabilityReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let n = c.len();
    if n < 2 {
        return Err(Error::InvalidDimension { n });
    }
    let fd_step = Tolerances::default().fd_step;
    let mut rng = seeded_rng(seed);
    let mut report = IntegrabilityReport {
        max_pairwise_bracket: 0.0,
        max_bracket_with_hc: 0.0,
        max_conservation_drift: 0.0,
        negative_control_bracket: 0.0,
        bracket_threshold: BRACKET_THRESHOLD,
        drift_threshold: DRIFT_THRESHOLD,
        samples,
        seed,
    };
    let f = |w: &[Complex64]| w[0].norm_sqr();
    let g = |w: &[Complex64]| (w[0] * w[1].conj()).re;
    for _ in 0..samples {
        let s = random_state_with(&mut rng, n)?;
        let table = bracket_table(&s, c, fd_step)?;
        for row in &table.pairwise {
            for b in row {
                report.max_pairwise_bracket = report.max_pairwise_bracket.max(b.abs());
            }
        }
        for b in &table.with_hc {
            report.max_bracket_with_hc = report.max_bracket_with_hc.max(b.abs());
        }
        report.max_conservation_drift = report
            .max_conservation_drift
            .max(conservation_drift(&s, c, 100.0, 200)?);
        let control = poisson_bracket(&f, &g, s.amplitudes(), fd_step)?;
        report.negative_control_bracket = report.negative_control_bracket.max(control.abs());
    }
    Ok(report)
}

/// Gradient flow of `x ↦ ⟨c, x²⟩` on the unit sphere started at `√p0`,
/// reported through `x ↦ x²` as a trajectory on the simplex.
///
/// RK4 with renormalization onto the sphere after every step. Because the
/// sphere gradient pushes forward to `4·W_c`, the state at time `t` equals
/// the replicator flow at time `4t`.
pub fn sphere_gradient_trajectory(
    p0: &SimplexPoint,
    c: &[f64],
    t_end: f64,
    step: f64,
) -> Result<FlowTrajectory> {
    check_same_len(p0.n(), c.len())?;
    let x0: Vec<f64> = p0.weights().iter().map(|w| w.sqrt()).collect();
    let mut traj = FlowTrajectory {
        times: Vec::new(),
        states: Vec::new(),
        objective: Vec::new(),
        gap: Vec::new(),
    };
    integrate_positive(
        x0,
        t_end,
        step,
        |x: &[f64]| sphere_flow_field(x, c),
        |x: &mut [f64]| {
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        },
        |t, x| {
            let p = SimplexPoint::from_positive_unchecked(x.iter().map(|v| v * v).collect())?;
            traj.objective.push(hc_raw_real(x, c));
            traj.gap.push(optimality_gap(p.weights(), c));
            traj.times.push(t);
            traj.states.push(p);
            Ok(())
        },
    )?;
    Ok(traj)
}

fn hc_raw_real(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(x, c)| c * x * x).sum()
}

/// Solves the linear program through the sphere gradient flow; the status is
/// `Converged` when the final gap is within `tol_ode`.
pub fn sphere_gradient_flow_to_lp(
    p0: &SimplexPoint,
    c: &[f64],
    t_end: f64,
    step: f64,
) -> Result<LpSolution> {
    let traj = sphere_gradient_trajectory(p0, c, t_end, step)?;
    let last = traj
        .states
        .last()
        .expect("trajectory holds the initial state");
    let gap = *traj.gap.last().expect("trajectory holds the initial state");
    let status = if gap <= Tolerances::default().tol_ode {
        LpStatus::Converged
    } else {
        LpStatus::HorizonExceeded
    };
    LpSolution::from_flow_point(last.weights().to_vec(), c, t_end, traj.len() - 1, status)
}
