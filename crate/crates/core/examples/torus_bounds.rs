//! Certified intervals for the complex operator norm on growing grids.
//!
//! `cargo run --example torus_bounds`

use littlewood::{complex_norm_bounds, r_m, random_form, witness_a0, Distribution, Field};

fn main() -> littlewood::Result<()> {
    let a0 = witness_a0(Field::Complex);
    println!("A0 (true norm 2 sqrt 2 = {:.12})", 2.0 * std::f64::consts::SQRT_2);
    for m in [3, 4, 6, 8, 16, 64] {
        let plain = complex_norm_bounds(&a0, m, false)?;
        let refined = complex_norm_bounds(&a0, m, true)?;
        println!(
            "  M = {m:>2}  R_M = {:.6}  [{:.12}, {:.12}]  refined lower {:.12}",
            r_m(m)?,
            plain.lower,
            plain.upper,
            refined.lower
        );
    }

    let f = random_form(Field::Complex, 3, 4, Distribution::Gaussian, 5)?;
    let b = complex_norm_bounds(&f, 16, true)?;
    println!("gaussian 3x4: norm in [{:.9}, {:.9}], width {:.2e}", b.lower, b.upper, b.width());
    Ok(())
}
