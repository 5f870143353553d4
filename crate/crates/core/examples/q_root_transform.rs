//! Maps a point of the simplex onto the ℓq sphere and checks that the
//! differential turns the ℓq Fisher–Rao norm into the flat ℓq norm.

use fisherflow::metric::{finsler_norm_q, fisher_rao_inner};
use fisherflow::simplex::{make_simplex, make_tangent, Tolerances};
use fisherflow::transform::{lq_norm, pushforward, q_root, q_root_inverse};

fn main() -> fisherflow::error::Result<()> {
    let tol = Tolerances::default();
    let p = make_simplex(&[0.1, 0.2, 0.3, 0.4], &tol)?;
    let v = make_tangent(&p, &[1.0, -0.5, 0.25, -0.75])?;

    for q in [1.5, 2.0, 3.0] {
        let x = q_root(&p, q)?;
        let w = pushforward(&p, &v, q)?;
        println!("q = {q}");
        println!("  x            = {:?}", x.coords());
        println!("  |x|_q        = {:.15}", lq_norm(x.coords(), q));
        println!("  back         = {:?}", q_root_inverse(&x)?.weights());
        println!("  |dx|_q       = {:.15}", lq_norm(w.components(), q));
        println!("  F_q(v) / q   = {:.15}", finsler_norm_q(&p, &v, q)? / q);
    }

    // at q = 2 the norm comes from the Fisher–Rao inner product
    let g = fisher_rao_inner(&p, &v, &v)?;
    println!("sqrt g(v, v)   = {:.15}", g.sqrt());
    Ok(())
}
