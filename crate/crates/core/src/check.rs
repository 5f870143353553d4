//! Deterministic invariant suites.
//!
//! Every suite draws its samples from a ChaCha8 stream seeded by the caller,
//! so a given `(suite, n, seed)` always produces the same report.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{
    closed_form_trajectory, convergence_rate, cost_variance, flow_closed_form, flow_ode,
    gradient_field, objective, solve_lp,
};
use crate::hamiltonian::{
    bracket_table, conservation_drift, embed_simplex, hamiltonian_flow, momentum_s1,
    momentum_torus, poisson_bracket, project, psi, random_state_with, sphere_gradient_trajectory,
    BRACKET_THRESHOLD, DRIFT_THRESHOLD,
};
use crate::metric::{finsler_norm_q, fisher_rao_inner, fr_distance, geodesic};
use crate::simplex::{
    l1, make_simplex, make_tangent, random_simplex, random_simplex_with, random_tangent_with,
    realize_cost, seeded_rng, tail_mass, ClosedSimplexPoint, CostSpec, SimplexPoint, Tolerances,
};
use crate::transform::{lq_norm, pullback, pushforward, q_root, q_root_inverse};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const SAMPLES: usize = 64;
const Q_VALUES: [f64; 4] = [1.5, 2.0, 3.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Simplex,
    Transform,
    Metric,
    Flow,
    Hamiltonian,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Simplex => "simplex",
            Suite::Transform => "transform",
            Suite::Metric => "metric",
            Suite::Flow => "flow",
            Suite::Hamiltonian => "hamiltonian",
            Suite::All => "all",
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Simplex,
                Suite::Transform,
                Suite::Metric,
                Suite::Flow,
                Suite::Hamiltonian,
            ],
            s => vec![s],
        }
    }
}

/// How a measured value is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: Suite,
    pub n: usize,
    pub seed: u64,
    pub items: Vec<CheckItem>,
    pub passed: bool,
}

impl CheckReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|i| !i.passed)
    }
}

struct Recorder {
    suite: &'static str,
    items: Vec<CheckItem>,
}

impl Recorder {
    fn push(&mut self, name: &str, value: f64, bound: Bound, threshold: f64) {
        let passed = match bound {
            Bound::AtMost => value <= threshold,
            Bound::AtLeast => value >= threshold,
        };
        self.items.push(CheckItem {
            suite: self.suite.to_string(),
            name: name.to_string(),
            value,
            bound,
            threshold,
            passed,
        });
    }

    fn at_most(&mut self, name: &str, value: f64, threshold: f64) {
        self.push(name, value, Bound::AtMost, threshold);
    }
}

/// Runs `suite` at truncation `n` with samples drawn from `seed`.
pub fn run_checks(suite: Suite, n: usize, seed: u64) -> Result<CheckReport> {
    if n < 2 {
        return Err(Error::InvalidDimension { n });
    }
    let mut items = Vec::new();
    for member in suite.members() {
        let mut rec = Recorder {
            suite: member.name(),
            items: Vec::new(),
        };
        // one independent stream per suite, so suites can run alone
        let mut rng = seeded_rng(seed ^ (member as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        match member {
            Suite::Simplex => simplex_suite(&mut rec, &mut rng, n, seed)?,
            Suite::Transform => transform_suite(&mut rec, &mut rng, n)?,
            Suite::Metric => metric_suite(&mut rec, &mut rng, n)?,
            Suite::Flow => flow_suite(&mut rec, &mut rng, n)?,
            Suite::Hamiltonian => hamiltonian_suite(&mut rec, &mut rng, n)?,
            Suite::All => unreachable!("expanded by members()"),
        }
        items.extend(rec.items);
    }
    let passed = items.iter().all(|i| i.passed);
    Ok(CheckReport {
        suite,
        n,
        seed,
        items,
        passed,
    })
}

fn concentration(i: usize) -> f64 {
    [0.5, 1.0, 4.0][i % 3]
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn cost_families(n: usize) -> Vec<CostSpec> {
    vec![
        CostSpec::Geometric { ratio: 0.5, n },
        CostSpec::Geometric { ratio: 0.9, n },
        CostSpec::Power { exponent: 1.0, n },
        CostSpec::Power { exponent: 0.75, n },
    ]
}

fn simplex_suite(rec: &mut Recorder, rng: &mut ChaCha8Rng, n: usize, seed: u64) -> Result<()> {
    let tol = Tolerances::default();

    let mut sum_err: f64 = 0.0;
    for i in 0..SAMPLES {
        let p = random_simplex_with(rng, n, concentration(i))?;
        if p.weights().iter().any(|w| !(*w > 0.0)) {
            sum_err = f64::INFINITY;
        }
        sum_err = sum_err.max((p.weights().iter().sum::<f64>() - 1.0).abs());
    }
    rec.at_most("random_points_valid", sum_err, tol.tol_sum);

    let mut normalize_err: f64 = 0.0;
    for _ in 0..SAMPLES {
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(1e-6..10.0)).collect();
        let p = make_simplex(&raw, &tol)?;
        normalize_err = normalize_err.max((p.weights().iter().sum::<f64>() - 1.0).abs());
    }
    rec.at_most("make_simplex_normalizes", normalize_err, tol.tol_sum);

    let (mut sum_zero, mut idempotent): (f64, f64) = (0.0, 0.0);
    for _ in 0..SAMPLES {
        let p = random_simplex_with(rng, n, 1.0)?;
        let v = make_tangent(&p, &normals(rng, n))?;
        sum_zero = sum_zero.max(v.components().iter().sum::<f64>().abs());
        let again = make_tangent(&p, v.components())?;
        idempotent = idempotent.max(l1(again.components(), v.components()));
    }
    rec.at_most("tangent_sum_zero", sum_zero, 1e-12);
    rec.at_most("tangent_projection_idempotent", idempotent, 1e-12);

    let (mut increases, mut tail_err) = (0.0, 0.0f64);
    for spec in cost_families(n) {
        let c = realize_cost(&spec)?;
        increases += c.windows(2).filter(|w| !(w[1] < w[0])).count() as f64;
        // Σ_{k<n} c_k² + tail(n) = tail(0)
        let head: f64 = c.iter().map(|x| x * x).sum();
        let whole = tail_mass(&spec, 0)?;
        tail_err = tail_err.max((head + tail_mass(&spec, n)? - whole).abs() / whole);
    }
    rec.at_most("costs_strictly_decreasing", increases, 0.0);
    rec.at_most("tail_mass_consistent", tail_err, 1e-12);

    let a = random_simplex(n, seed, 1.0)?;
    let b = random_simplex(n, seed, 1.0)?;
    rec.at_most(
        "random_simplex_deterministic",
        l1(a.weights(), b.weights()),
        0.0,
    );
    Ok(())
}

fn transform_suite(rec: &mut Recorder, rng: &mut ChaCha8Rng, n: usize) -> Result<()> {
    let tol = Tolerances::default();
    let (mut on_sphere, mut round_trip, mut tangency, mut inverse, mut fd): (
        f64,
        f64,
        f64,
        f64,
        f64,
    ) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let h = tol.fd_step;
    for i in 0..SAMPLES {
        let p = random_simplex_with(rng, n, concentration(i))?;
        let v = random_tangent_with(rng, &p);
        for &q in &Q_VALUES {
            let x = q_root(&p, q)?;
            on_sphere =
                on_sphere.max((x.coords().iter().map(|c| c.powf(q)).sum::<f64>() - 1.0).abs());
            round_trip = round_trip.max(l1(q_root_inverse(&x)?.weights(), p.weights()));
            let w = pushforward(&p, &v, q)?;
            tangency = tangency.max(w.tangency_residual().abs());
            inverse = inverse.max(l1(pullback(&x, &w)?.components(), v.components()));
        }
        // finite differences along a chord that stays inside the simplex
        let reach = p
            .weights()
            .iter()
            .zip(v.components())
            .map(|(pn, vn)| pn / vn.abs())
            .fold(f64::INFINITY, f64::min);
        let v = v.scaled(0.5 * reach.min(1.0));
        for &q in &Q_VALUES {
            let at = |t: f64| -> Result<Vec<f64>> {
                let raw: Vec<f64> = p
                    .weights()
                    .iter()
                    .zip(v.components())
                    .map(|(a, b)| a + t * b)
                    .collect();
                Ok(q_root(&make_simplex(&raw, &tol)?, q)?.coords().to_vec())
            };
            let (plus, minus) = (at(h)?, at(-h)?);
            let w = pushforward(&p, &v, q)?;
            for k in 0..n {
                fd = fd.max(((plus[k] - minus[k]) / (2.0 * h) - w.components()[k]).abs());
            }
        }
    }
    rec.at_most("q_root_on_unit_sphere", on_sphere, 1e-12);
    rec.at_most("q_root_round_trip", round_trip, 1e-12);
    rec.at_most("pushforward_is_tangent", tangency, 1e-12);
    rec.at_most("pullback_inverts_pushforward", inverse, 1e-12);
    rec.at_most("pushforward_matches_finite_difference", fd, tol.tol_ode);
    Ok(())
}

fn metric_suite(rec: &mut Recorder, rng: &mut ChaCha8Rng, n: usize) -> Result<()> {
    let (mut iso2, mut isoq, mut homog): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..SAMPLES {
        let p = random_simplex_with(rng, n, concentration(i))?;
        let v = random_tangent_with(rng, &p);
        let w = random_tangent_with(rng, &p);
        let dv = pushforward(&p, &v, 2.0)?;
        let dw = pushforward(&p, &w, 2.0)?;
        let euclid: f64 = dv
            .components()
            .iter()
            .zip(dw.components())
            .map(|(a, b)| a * b)
            .sum();
        iso2 = iso2.max((euclid - fisher_rao_inner(&p, &v, &w)?).abs());
        for &q in &[1.5, 2.0, 3.0] {
            let lhs = lq_norm(pushforward(&p, &v, q)?.components(), q);
            let f = finsler_norm_q(&p, &v, q)?;
            isoq = isoq.max((lhs - f / q).abs());
            let f3 = finsler_norm_q(&p, &v.scaled(-3.0), q)?;
            homog = homog.max((f3 - 3.0 * f).abs() / f.max(f64::MIN_POSITIVE));
        }
    }
    rec.at_most("isometry_q2", iso2, 1e-10);
    rec.at_most("calibrated_isometry", isoq, 1e-10);
    rec.at_most("finsler_homogeneity", homog, 1e-12);

    let (mut identity, mut symmetry, mut triangle, mut length): (f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0);
    let mut outside = 0.0;
    for i in 0..SAMPLES {
        let a = random_simplex_with(rng, n, concentration(i))?;
        let b = random_simplex_with(rng, n, concentration(i + 1))?;
        let c = random_simplex_with(rng, n, concentration(i + 2))?;
        identity = identity.max(fr_distance(&a, &a)?);
        let dab = fr_distance(&a, &b)?;
        symmetry = symmetry.max((dab - fr_distance(&b, &a)?).abs());
        triangle = triangle.max(fr_distance(&a, &c)? - dab - fr_distance(&b, &c)?);
        let seg = geodesic(&a, &b)?;
        let mut total = 0.0;
        let mut prev = a.clone();
        for k in 1..=256 {
            match seg.sample(k as f64 / 256.0) {
                Ok(pt) => {
                    total += fr_distance(&prev, &pt)?;
                    prev = pt;
                }
                Err(_) => outside += 1.0,
            }
        }
        length = length.max((total - dab).abs());
    }
    rec.at_most("distance_identity", identity, 1e-12);
    rec.at_most("distance_symmetry", symmetry, 1e-12);
    rec.at_most("triangle_inequality_excess", triangle.max(0.0), 1e-12);
    rec.at_most("geodesic_length_additive", length, 1e-9);
    rec.at_most("geodesic_stays_interior", outside, 0.0);
    Ok(())
}

fn flow_suite(rec: &mut Recorder, rng: &mut ChaCha8Rng, n: usize) -> Result<()> {
    let tol = Tolerances::default();
    let c = realize_cost(&CostSpec::Geometric { ratio: 0.5, n })?;
    let h = tol.fd_step;
    let (mut ivp, mut mono, mut shift, mut semi): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..SAMPLES {
        let p0 = random_simplex_with(rng, n, concentration(i))?;
        let t: f64 = rng.random_range(0.0..5.0);
        let s: f64 = rng.random_range(0.0..5.0);
        let pt = flow_closed_form(&p0, &c, t)?;
        let plus = flow_closed_form(&p0, &c, t + h)?;
        let minus = flow_closed_form(&p0, &c, t - h)?;
        let field = gradient_field(&pt, &c)?;
        for k in 0..n {
            let d = (plus.weights()[k] - minus.weights()[k]) / (2.0 * h);
            ivp = ivp.max((d - field.components()[k]).abs());
        }
        let d_obj = (objective(&plus, &c)? - objective(&minus, &c)?) / (2.0 * h);
        mono = mono.max((d_obj - cost_variance(&pt, &c)?).abs());
        for a in [-3.0, 0.7, 10.0] {
            let shifted: Vec<f64> = c.iter().map(|x| x + a).collect();
            shift = shift.max(l1(
                flow_closed_form(&p0, &shifted, t)?.weights(),
                pt.weights(),
            ));
        }
        let two_step = flow_closed_form(&pt, &c, s)?;
        semi = semi.max(l1(
            two_step.weights(),
            flow_closed_form(&p0, &c, t + s)?.weights(),
        ));
    }
    rec.at_most("closed_form_solves_ivp", ivp, tol.tol_ode);
    rec.at_most("objective_rate_is_variance", mono, tol.tol_ode);
    rec.at_most("cost_shift_invariance", shift, 1e-12);
    rec.at_most("semigroup", semi, 1e-12);

    let p0 = random_simplex_with(rng, n, 1.0)?;
    let ode = flow_ode(&p0, &c, 5.0, 1e-3)?;
    let mut conservation: f64 = 0.0;
    for st in &ode.states {
        if st.weights().iter().any(|w| !(*w > 0.0)) {
            conservation = f64::INFINITY;
        }
        conservation = conservation.max((st.weights().iter().sum::<f64>() - 1.0).abs());
    }
    rec.at_most("ode_conserves_simplex", conservation, tol.tol_sum);
    let exact = closed_form_trajectory(&p0, &c, &ode.times)?;
    let ode_err = ode
        .states
        .iter()
        .zip(&exact.states)
        .map(|(a, b)| l1(a.weights(), b.weights()))
        .fold(0.0, f64::max);
    rec.at_most("ode_matches_closed_form", ode_err, tol.tol_ode);

    let sol = solve_lp(&p0, &c, 1e-9, 1e4)?;
    rec.at_most("lp_certificate_gap", sol.certificate_gap, tol.tol_ode);
    let corner = ClosedSimplexPoint::corner(n, 0)?;
    rec.at_most(
        "lp_maximizer_is_corner",
        corner.l1_distance(sol.maximizer.weights())?,
        tol.tol_ode,
    );

    let traj = flow_ode(&p0, &c, 40.0, 0.1)?;
    let rate = convergence_rate(&traj, &c)?;
    let expected = -(c[0] - c[1]);
    rec.at_most(
        "convergence_rate_relative_error",
        ((rate - expected) / expected).abs(),
        0.05,
    );
    Ok(())
}

fn hamiltonian_suite(rec: &mut Recorder, rng: &mut ChaCha8Rng, n: usize) -> Result<()> {
    let tol = Tolerances::default();
    let c = realize_cost(&CostSpec::Geometric { ratio: 0.5, n })?;

    let (mut gauge, mut drift, mut s1, mut diagram): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let mut outside = 0.0;
    for _ in 0..SAMPLES {
        let s = random_state_with(rng, n)?;
        let phi: f64 = rng.random_range(-10.0..10.0);
        let rotated = s.with_global_phase(phi);
        let (a, b) = (project(&s), project(&rotated));
        for (x, y) in a
            .representative()
            .amplitudes()
            .iter()
            .zip(b.representative().amplitudes())
        {
            gauge = gauge.max((x - y).norm());
        }
        let (ma, mb) = (momentum_torus(&a), momentum_torus(&b));
        gauge = gauge.max(l1(&ma.coefficients, &mb.coefficients));
        drift = drift.max(conservation_drift(&s, &c, 100.0, 200)?);
        s1 = s1.max((momentum_s1(s.amplitudes()).coefficients[0] - 1.0).abs());
        if ma.doubled_as_simplex(&tol).is_err() {
            outside += 1.0;
        }
        // momentum is invariant along the flow and factors through the projection
        let later = momentum_torus(&project(&hamiltonian_flow(&s, &c, phi.abs())?));
        diagram = diagram.max(l1(&later.coefficients, &ma.coefficients));
        diagram = diagram.max(l1(&psi(&s).coefficients, &ma.coefficients));
    }
    rec.at_most("projection_gauge_invariance", gauge, 1e-12);
    rec.at_most("conservation_drift", drift, DRIFT_THRESHOLD);
    rec.at_most("s1_momentum_is_norm", s1, 1e-12);
    rec.at_most("torus_momentum_in_simplex", outside, 0.0);
    rec.at_most("momentum_diagram_commutes", diagram, 1e-12);

    let mut embed: f64 = 0.0;
    for i in 0..SAMPLES {
        let p: SimplexPoint = random_simplex_with(rng, n, concentration(i))?;
        let doubled = momentum_torus(&project(&embed_simplex(&p))).doubled_as_simplex(&tol)?;
        embed = embed.max(l1(doubled.weights(), p.weights()));
        let root = q_root(&p, 2.0)?;
        for (z, x) in embed_simplex(&p).amplitudes().iter().zip(root.coords()) {
            embed = embed.max((z - Complex64::new(*x, 0.0)).norm());
        }
    }
    rec.at_most("embedding_pullback_consistency", embed, 1e-12);

    let (mut pairwise, mut with_hc, mut antisym, mut control): (f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0);
    let mut control_matches = true;
    let f = |w: &[Complex64]| w[0].norm_sqr();
    let g = |w: &[Complex64]| (w[0] * w[1].conj()).re;
    for _ in 0..8 {
        let s = random_state_with(rng, n)?;
        let table = bracket_table(&s, &c, tol.fd_step)?;
        for k in 0..n {
            for m in 0..n {
                pairwise = pairwise.max(table.pairwise[k][m].abs());
                antisym = antisym.max((table.pairwise[k][m] + table.pairwise[m][k]).abs());
            }
        }
        with_hc = table
            .with_hc
            .iter()
            .fold(with_hc, |acc, b| acc.max(b.abs()));
        let z = s.amplitudes();
        let expected = 2.0 * (z[0].re * z[1].im - z[0].im * z[1].re);
        let measured = poisson_bracket(&f, &g, z, tol.fd_step)?;
        control_matches &= (measured - expected).abs() <= 1e-6;
        control = control.max(measured.abs());
    }
    // a control that disagrees with 2(x0 y1 − y0 x1) proves nothing
    if !control_matches {
        control = 0.0;
    }
    rec.at_most("pairwise_brackets", pairwise, BRACKET_THRESHOLD);
    rec.at_most("brackets_with_hamiltonian", with_hc, BRACKET_THRESHOLD);
    rec.at_most("bracket_antisymmetry", antisym, 1e-12);
    rec.push("negative_control_bracket", control, Bound::AtLeast, 1e-3);

    let p0 = random_simplex_with(rng, n, 1.0)?;
    let sphere = sphere_gradient_trajectory(&p0, &c, 2.0, 1e-3)?;
    let last = sphere
        .states
        .last()
        .expect("trajectory holds the initial state");
    let rescaled = flow_closed_form(&p0, &c, 4.0 * 2.0)?;
    rec.at_most(
        "sphere_flow_time_rescaling",
        l1(last.weights(), rescaled.weights()),
        tol.tol_ode,
    );
    Ok(())
}
