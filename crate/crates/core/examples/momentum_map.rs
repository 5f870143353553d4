//! The torus momentum map sends projective space onto half the simplex; the
//! square-root embedding makes the simplex a slice of it.

use fisherflow::flow::objective;
use fisherflow::hamiltonian::{
    embed_simplex, hamiltonian_value, momentum_s1, momentum_torus, project, psi, random_state,
};
use fisherflow::simplex::{make_simplex, Tolerances};

fn main() -> fisherflow::error::Result<()> {
    let tol = Tolerances::default();
    let s = random_state(4, 3)?;
    let rotated = s.with_global_phase(1.234);

    let a = momentum_torus(&project(&s));
    let b = momentum_torus(&project(&rotated));
    println!(
        "S¹ momentum          {:?}",
        momentum_s1(s.amplitudes()).coefficients
    );
    println!("torus momentum       {:?}", a.coefficients);
    println!("after phase change   {:?}", b.coefficients);
    println!("Ψ before projecting  {:?}", psi(&s).coefficients);
    println!(
        "doubled, in simplex  {:?}",
        a.doubled_as_simplex(&tol)?.weights()
    );

    let p = make_simplex(&[0.5, 0.25, 0.125, 0.125], &tol)?;
    let c = [3.0, 1.0, -1.0, 0.5];
    let z = embed_simplex(&p);
    println!("H_c(√p) = {:.15}", hamiltonian_value(&z, &c)?);
    println!("⟨c, p⟩  = {:.15}", objective(&p, &c)?);
    println!(
        "2μ(√p)  = {:?}",
        momentum_torus(&project(&z))
            .doubled_as_simplex(&tol)?
            .weights()
    );
    Ok(())
}
