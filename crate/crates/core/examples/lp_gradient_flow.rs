//! Solves max ⟨c, p⟩ over the simplex by following the Fisher–Rao gradient
//! flow, and measures the exponential convergence rate.

use fisherflow::flow::{convergence_rate, flow_ode, solve_lp};
use fisherflow::io::trajectory_csv;
use fisherflow::simplex::{realize_cost, tail_mass, CostSpec, SimplexPoint};

fn main() -> fisherflow::error::Result<()> {
    let spec = CostSpec::Geometric { ratio: 0.5, n: 8 };
    let c = realize_cost(&spec)?;
    println!("cost          {c:?}");
    println!("tail beyond N {:.3e}", tail_mass(&spec, 8)?);

    let p0 = SimplexPoint::uniform(8)?;
    let sol = solve_lp(&p0, &c, 1e-9, 1e4)?;
    println!(
        "status        {:?} after horizon {}",
        sol.status, sol.horizon
    );
    println!("maximizer     {:?}", sol.maximizer.weights());
    println!(
        "value         {:.12}  gap {:.3e}",
        sol.value, sol.certificate_gap
    );

    let traj = flow_ode(&p0, &c, 40.0, 0.1)?;
    let rate = convergence_rate(&traj, &c)?;
    println!("log-gap slope {rate:.6}  (expected {})", -(c[0] - c[1]));

    let coarse = flow_ode(&p0, &c, 2.0, 0.5)?;
    print!("{}", trajectory_csv(&coarse)?);
    Ok(())
}
