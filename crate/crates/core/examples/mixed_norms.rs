//! Mixed `l_b(l_a)` norms of the witness `A0` and of a random form.
//!
//! `cargo run --example mixed_norms`

use littlewood::{mixed_norm, random_form, witness_a0, Distribution, ExponentPair, Field};

fn main() -> littlewood::Result<()> {
    let a0 = witness_a0(Field::Real);
    let g = random_form(Field::Complex, 3, 5, Distribution::Gaussian, 42)?;
    for (a, b) in [(1.0, 1.0), (4.0 / 3.0, 4.0 / 3.0), (2.0, 2.0), (1.0, 2.0), (2.0, 1.0), (f64::INFINITY, 1.0)] {
        let pair = ExponentPair::from_values(a, b)?;
        println!(
            "(a, b) = ({a:.4}, {b:.4})  A0: {:.12}  gaussian 3x5: {:.12}",
            mixed_norm(&a0, pair).value,
            mixed_norm(&g, pair).value
        );
    }
    println!("{}", g.to_json()?);
    Ok(())
}
