//! Fisher–Rao distance and geodesic between two distributions, with a
//! comparison against a perturbed path of the same endpoints.

use fisherflow::metric::{bhattacharyya_angle, fr_distance, geodesic, path_energy};
use fisherflow::simplex::{make_simplex, SimplexPoint, Tolerances};

fn main() -> fisherflow::error::Result<()> {
    let tol = Tolerances::default();
    let p = make_simplex(&[0.7, 0.2, 0.1], &tol)?;
    let r = make_simplex(&[0.1, 0.3, 0.6], &tol)?;

    let d = fr_distance(&p, &r)?;
    println!("distance           {d:.15}");
    println!("arccos form        {:.15}", bhattacharyya_angle(&p, &r)?);

    let seg = geodesic(&p, &r)?;
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!("t = {t:<4}  {:?}", seg.sample(t)?.weights());
    }

    // constant speed means energy = distance²
    let m = 400;
    let dt = 1.0 / m as f64;
    let path = seg.sample_uniform(m)?;
    println!(
        "geodesic energy    {:.9}  (d² = {:.9})",
        path_energy(&path, dt)?,
        d * d
    );

    let wobbly: Vec<SimplexPoint> = path
        .iter()
        .enumerate()
        .map(|(i, pt)| {
            let bump = 0.2 * (std::f64::consts::PI * i as f64 * dt).sin();
            let raw: Vec<f64> = pt
                .weights()
                .iter()
                .enumerate()
                .map(|(k, w)| w * (bump * (k as f64 - 1.0)).exp())
                .collect();
            make_simplex(&raw, &tol)
        })
        .collect::<Result<_, _>>()?;
    println!("perturbed energy   {:.9}", path_energy(&wobbly, dt)?);
    Ok(())
}
