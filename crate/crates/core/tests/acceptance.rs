//! Acceptance gate. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line each and exits non-zero if any fails.

use std::process::Command;

use fisherflow::flow::{
    closed_form_trajectory, convergence_rate, cost_variance, flow_closed_form, flow_ode,
    gradient_field, objective, solve_lp,
};
use fisherflow::hamiltonian::{
    conservation_drift, embed_simplex, hamiltonian_value, integrability_report, momentum_torus,
    project, psi, random_state_with, sphere_gradient_trajectory,
};
use fisherflow::metric::{
    bhattacharyya_angle, finsler_norm_q, fisher_rao_inner, geodesic, path_energy,
};
use fisherflow::simplex::{
    make_simplex, random_simplex_with, random_tangent_with, realize_cost, seeded_rng,
    ClosedSimplexPoint, CostSpec, SimplexPoint, Tolerances,
};
use fisherflow::transform::{lq_norm, pushforward};
use rand::Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;

fn within(label: &str, value: f64, bound: f64) -> Outcome {
    let line = format!("{label} = {value:.3e} (bound {bound:.0e})");
    if value <= bound {
        Ok(line)
    } else {
        Err(line)
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let ok = parts.iter().all(|p| p.is_ok());
    let text = parts
        .into_iter()
        .map(|p| p.unwrap_or_else(|e| format!("{e} <-- violated")))
        .collect::<Vec<_>>()
        .join("; ");
    if ok {
        Ok(text)
    } else {
        Err(text)
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn isometry_q2() -> Outcome {
    let mut rng = seeded_rng(1);
    let mut worst: f64 = 0.0;
    for &n in &[2, 8, 64] {
        for i in 0..10_000 {
            let conc = [0.5, 1.0, 4.0][i % 3];
            let p = random_simplex_with(&mut rng, n, conc).unwrap();
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
            worst = worst.max((fisher_rao_inner(&p, &v, &w).unwrap() - euclid).abs());
        }
    }
    within("max |g(v,w) - <dv,dw>|", worst, 1e-10)
}

fn isometry_general_q() -> Outcome {
    let mut rng = seeded_rng(2);
    let mut worst: f64 = 0.0;
    for &q in &[1.5, 2.0, 3.0] {
        for i in 0..1_000 {
            let n = [2, 8, 64][i % 3];
            let p = random_simplex_with(&mut rng, n, 1.0).unwrap();
            let v = random_tangent_with(&mut rng, &p);
            let lhs = lq_norm(pushforward(&p, &v, q).unwrap().components(), q);
            let rhs = finsler_norm_q(&p, &v, q).unwrap() / q;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    within("max | |dv|_q - F(v)/q |", worst, 1e-10)
}

fn flow_correctness() -> Outcome {
    let tol = Tolerances::default();
    let h = tol.fd_step;
    let mut rng = seeded_rng(3);
    let mut residual: f64 = 0.0;
    for _ in 0..1_000 {
        let n = rng.random_range(2..12);
        let c = realize_cost(&CostSpec::Geometric { ratio: 0.5, n }).unwrap();
        let p0 = random_simplex_with(&mut rng, n, 1.0).unwrap();
        let t: f64 = rng.random_range(0.0..10.0);
        let plus = flow_closed_form(&p0, &c, t + h).unwrap();
        let minus = flow_closed_form(&p0, &c, t - h).unwrap();
        let field = gradient_field(&flow_closed_form(&p0, &c, t).unwrap(), &c).unwrap();
        for k in 0..n {
            let d = (plus.weights()[k] - minus.weights()[k]) / (2.0 * h);
            residual = residual.max((d - field.components()[k]).abs());
        }
    }
    let c = realize_cost(&CostSpec::Geometric { ratio: 0.5, n: 8 }).unwrap();
    let p0 = random_simplex_with(&mut rng, 8, 1.0).unwrap();
    let ode = flow_ode(&p0, &c, 10.0, 1e-3).unwrap();
    let exact = closed_form_trajectory(&p0, &c, &ode.times).unwrap();
    let drift = ode
        .states
        .iter()
        .zip(&exact.states)
        .map(|(a, b)| l1(a.weights(), b.weights()))
        .fold(0.0, f64::max);
    all(vec![
        within("IVP residual", residual, 1e-6),
        within(
            &format!("RK4 vs closed form over {} steps", ode.len() - 1),
            drift,
            1e-6,
        ),
    ])
}

fn lp_convergence() -> Outcome {
    let c = realize_cost(&CostSpec::Geometric { ratio: 0.5, n: 8 }).unwrap();
    let p0 = SimplexPoint::uniform(8).unwrap();
    let sol = solve_lp(&p0, &c, 1e-6, 1e4).unwrap();
    let corner = ClosedSimplexPoint::corner(8, 0).unwrap();
    all(vec![
        within("gap", sol.certificate_gap, 1e-6),
        within(
            "|maximizer - e0|_1",
            corner.l1_distance(sol.maximizer.weights()).unwrap(),
            1e-6,
        ),
        within(
            "|flow point - e0|_1",
            corner.l1_distance(sol.flow_point.weights()).unwrap(),
            1e-6,
        ),
    ])
}

fn exponential_rate() -> Outcome {
    let families = [
        (
            "geometric(0.5)",
            CostSpec::Geometric { ratio: 0.5, n: 8 },
            40.0,
        ),
        (
            "power(1)",
            CostSpec::Power {
                exponent: 1.0,
                n: 8,
            },
            40.0,
        ),
        (
            "geometric(0.8)+2",
            CostSpec::Shifted {
                base: Box::new(CostSpec::Geometric { ratio: 0.8, n: 8 }),
                shift: 2.0,
            },
            100.0,
        ),
    ];
    let mut rng = seeded_rng(5);
    let parts = families
        .iter()
        .map(|(name, spec, t_end)| {
            let c = realize_cost(spec).unwrap();
            let p0 = random_simplex_with(&mut rng, 8, 1.0).unwrap();
            let traj = flow_ode(&p0, &c, *t_end, 0.1).unwrap();
            let rate = convergence_rate(&traj, &c).unwrap();
            let expected = -(c[0] - c[1]);
            within(
                &format!("{name} relative slope error"),
                ((rate - expected) / expected).abs(),
                0.05,
            )
        })
        .collect();
    all(parts)
}

fn monotonicity_identity() -> Outcome {
    let h = Tolerances::default().fd_step;
    let mut rng = seeded_rng(6);
    let mut worst: f64 = 0.0;
    for _ in 0..1_000 {
        let n = rng.random_range(2..16);
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let p0 = random_simplex_with(&mut rng, n, 1.0).unwrap();
        let t: f64 = rng.random_range(0.0..5.0);
        let f = |s: f64| objective(&flow_closed_form(&p0, &c, s).unwrap(), &c).unwrap();
        let d = (f(t + h) - f(t - h)) / (2.0 * h);
        let var = cost_variance(&flow_closed_form(&p0, &c, t).unwrap(), &c).unwrap();
        worst = worst.max((d - var).abs());
    }
    within("max |d<c,p>/dt - Var_p(c)|", worst, 1e-6)
}

/// `Σ sqrt(G_mid(Δp, Δp))`, the Fisher–Rao length of a polygonal path.
fn riemann_length(path: &[SimplexPoint]) -> f64 {
    path.windows(2)
        .map(|w| {
            let (a, b) = (w[0].weights(), w[1].weights());
            let sq: f64 = a
                .iter()
                .zip(b)
                .map(|(x, y)| (y - x) * (y - x) / (0.5 * (x + y)))
                .sum();
            0.5 * sq.sqrt()
        })
        .sum()
}

fn geodesics() -> Outcome {
    let mut rng = seeded_rng(7);
    let tol = Tolerances::default();
    let mut length_err: f64 = 0.0;
    let mut violations = 0;
    let mut margin = f64::INFINITY;
    for _ in 0..5 {
        let n = rng.random_range(2..10);
        let p = random_simplex_with(&mut rng, n, 1.0).unwrap();
        let r = random_simplex_with(&mut rng, n, 1.0).unwrap();
        let seg = geodesic(&p, &r).unwrap();
        let fine = seg.sample_uniform(10_000).unwrap();
        let target = bhattacharyya_angle(&p, &r).unwrap();
        length_err = length_err.max((riemann_length(&fine) - target).abs());

        let m = 200;
        let dt = 1.0 / m as f64;
        let path = seg.sample_uniform(m).unwrap();
        let base = path_energy(&path, dt).unwrap();
        for _ in 0..100 {
            let eps: f64 = rng.random_range(0.05..0.3);
            let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let bumped: Vec<SimplexPoint> = path
                .iter()
                .enumerate()
                .map(|(i, pt)| {
                    let bump = (std::f64::consts::PI * i as f64 * dt).sin();
                    let raw: Vec<f64> = pt
                        .weights()
                        .iter()
                        .zip(&g)
                        .map(|(w, gk)| w * (eps * bump * gk).exp())
                        .collect();
                    make_simplex(&raw, &tol).unwrap()
                })
                .collect();
            let energy = path_energy(&bumped, dt).unwrap();
            margin = margin.min(energy - base);
            if energy < base {
                violations += 1;
            }
        }
    }
    let energy = if violations == 0 {
        Ok(format!(
            "geodesic energy below 500 perturbed paths (min excess {margin:.3e})"
        ))
    } else {
        Err(format!("{violations} perturbed paths beat the geodesic"))
    };
    all(vec![
        within("|length - arccos sum sqrt(p r)|", length_err, 1e-6),
        energy,
    ])
}

fn hamiltonian_conservation() -> Outcome {
    let c = realize_cost(&CostSpec::Geometric { ratio: 0.5, n: 8 }).unwrap();
    let mut rng = seeded_rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = random_state_with(&mut rng, 8).unwrap();
        worst = worst.max(conservation_drift(&s, &c, 100.0, 1_000).unwrap());
    }
    within("max drift over t in [0,100]", worst, 1e-12)
}

fn integrability() -> Outcome {
    let c = realize_cost(&CostSpec::Geometric { ratio: 0.5, n: 6 }).unwrap();
    let r = integrability_report(&c, 100, 9).unwrap();
    let control = if r.negative_control_bracket >= 1e-3 {
        Ok(format!(
            "negative control = {:.3e} (at least 1e-3)",
            r.negative_control_bracket
        ))
    } else {
        Err(format!(
            "negative control = {:.3e} below 1e-3",
            r.negative_control_bracket
        ))
    };
    all(vec![
        within("max |{H_k,H_m}|", r.max_pairwise_bracket, 1e-8),
        within("max |{H_n,H_c}|", r.max_bracket_with_hc, 1e-8),
        control,
    ])
}

fn diagram_and_pullback() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = seeded_rng(10);
    let (mut diagram, mut pull): (f64, f64) = (0.0, 0.0);
    let mut invalid = 0;
    for _ in 0..1_000 {
        let n = rng.random_range(2..12);
        let s = random_state_with(&mut rng, n).unwrap();
        let torus = momentum_torus(&project(&s));
        diagram = diagram.max(l1(&torus.coefficients, &psi(&s).coefficients));
        if torus.doubled_as_simplex(&tol).is_err() {
            invalid += 1;
        }
        let p = random_simplex_with(&mut rng, n, 1.0).unwrap();
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let h = hamiltonian_value(&embed_simplex(&p), &c).unwrap();
        pull = pull.max((h - objective(&p, &c).unwrap()).abs());
    }
    let image = if invalid == 0 {
        Ok("2 x torus momentum always in the closed simplex".to_string())
    } else {
        Err(format!(
            "{invalid} momentum values outside the closed simplex"
        ))
    };
    all(vec![
        within("|mu_T o project - Psi|", diagram, 1e-12),
        within("|H_c o embed - <c,p>|", pull, 1e-12),
        image,
    ])
}

fn sphere_vs_simplex() -> Outcome {
    let mut rng = seeded_rng(11);
    let mut worst: f64 = 0.0;
    for &n in &[2, 8, 20] {
        let c = realize_cost(&CostSpec::Power { exponent: 1.0, n }).unwrap();
        let p0 = random_simplex_with(&mut rng, n, 1.0).unwrap();
        let traj = sphere_gradient_trajectory(&p0, &c, 3.0, 1e-3).unwrap();
        for (t, state) in traj.times.iter().zip(&traj.states).step_by(100) {
            let exact = flow_closed_form(&p0, &c, 4.0 * t).unwrap();
            worst = worst.max(l1(state.weights(), exact.weights()));
        }
    }
    within("max |sphere(t) - simplex(4t)|_1", worst, 1e-6)
}

fn cli_determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_fisherflow"))
            .args(["check", "--suite", "all", "--n", "8", "--seed", "7"])
            .env_remove("FISHERFLOW_SEED")
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let ok =
        a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    let line = format!(
        "exit codes {:?}/{:?}, {} bytes, identical = {}",
        a.status.code(),
        b.status.code(),
        a.stdout.len(),
        a.stdout == b.stdout
    );
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("isometry at q = 2", isometry_q2),
        ("calibrated isometry for general q", isometry_general_q),
        ("flow correctness", flow_correctness),
        ("LP convergence", lp_convergence),
        ("exponential rate", exponential_rate),
        ("monotonicity identity", monotonicity_identity),
        ("geodesics", geodesics),
        ("Hamiltonian conservation", hamiltonian_conservation),
        ("integrability residuals", integrability),
        ("diagram and pullback", diagram_and_pullback),
        ("sphere vs simplex flow", sphere_vs_simplex),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("AC{:02} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("AC{:02} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
