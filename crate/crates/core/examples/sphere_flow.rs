//! Gradient flow of ⟨c, x²⟩ on the round sphere, seen through x ↦ x².
//! It traces the simplex flow four times as fast.

use fisherflow::flow::{flow_closed_form, sphere_gradient};
use fisherflow::hamiltonian::{sphere_gradient_flow_to_lp, sphere_gradient_trajectory};
use fisherflow::simplex::{random_simplex, realize_cost, CostSpec};
use fisherflow::transform::q_root;

fn main() -> fisherflow::error::Result<()> {
    let c = realize_cost(&CostSpec::Geometric { ratio: 0.7, n: 5 })?;
    let p0 = random_simplex(5, 11, 1.0)?;
    let x0 = q_root(&p0, 2.0)?;
    println!(
        "sphere gradient at √p0  {:?}",
        sphere_gradient(&x0, &c)?.components()
    );

    let traj = sphere_gradient_trajectory(&p0, &c, 2.0, 1e-3)?;
    for (t, state) in traj.times.iter().zip(&traj.states).step_by(500) {
        let simplex = flow_closed_form(&p0, &c, 4.0 * t)?;
        let diff: f64 = state
            .weights()
            .iter()
            .zip(simplex.weights())
            .map(|(a, b)| (a - b).abs())
            .sum();
        println!("t = {t:<4} |sphere(t) - simplex(4t)|_1 = {diff:.3e}");
    }

    let sol = sphere_gradient_flow_to_lp(&p0, &c, 20.0, 1e-2)?;
    println!("{:?}: maximizer {:?}", sol.status, sol.maximizer.weights());
    Ok(())
}
