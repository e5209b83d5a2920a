use obtuse::model::{strainer_constants, theta_n};

fn main() -> obtuse::Result<()> {
    let c = strainer_constants(2, 1.0, 0.5, 0.1)?;
    println!("c1 = {:.9} (cosh 1 - cosh 1/4 = {:.9})", c.c1, 1f64.cosh() - 0.25f64.cosh());
    println!("eps = {:.9}, theta_2(eps) = {:.9}", c.eps, theta_n(2, c.eps)?);
    for v1 in [0.05, 0.1, 0.5, 1.0, 2.0] {
        println!("v1 {v1:<4} eps {:.6}", strainer_constants(2, 1.0, 0.5, v1)?.eps);
    }
    Ok(())
}
