//! The Hamiltonian H_c = Σ c_n |z_n|² on projective space: its exact flow,
//! the vanishing Poisson brackets of its pieces, and a non-commuting control.

use fisherflow::hamiltonian::{
    bracket_table, conservation_drift, hamiltonian_flow, integrability_report, random_state,
    PHASE_SPEED,
};
use fisherflow::simplex::{realize_cost, CostSpec, Tolerances};

fn main() -> fisherflow::error::Result<()> {
    let c = realize_cost(&CostSpec::Power {
        exponent: 1.0,
        n: 6,
    })?;
    let s = random_state(6, 42)?;
    println!("phase speed     {PHASE_SPEED}");
    println!("|z|² at t = 0   {:?}", s.moduli_sqr());
    println!(
        "|z|² at t = 50  {:?}",
        hamiltonian_flow(&s, &c, 50.0)?.moduli_sqr()
    );
    println!(
        "drift on [0,100] {:.3e}",
        conservation_drift(&s, &c, 100.0, 500)?
    );

    let table = bracket_table(&s, &c, Tolerances::default().fd_step)?;
    println!("{{H_n, H_c}}     {:?}", table.with_hc);

    let report = integrability_report(&c, 50, 7)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    println!("passed          {}", report.passed());
    Ok(())
}
