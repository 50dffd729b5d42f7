//! Optimal constants across the four regions, real and complex.
//!
//! `cargo run --example constants`

use littlewood::exponents::constant;
use littlewood::{classify_region, ExponentPair, Field};

fn main() -> littlewood::Result<()> {
    let pairs = [(4.0 / 3.0, 4.0 / 3.0), (2.0, 2.0), (1.0, 2.0), (1.0, 3.0), (1.5, 1.2), (f64::INFINITY, 1.0)];
    println!("{:>10} {:>10} {:>6} {:>20} {:>28}", "a", "b", "region", "real", "complex");
    for (a, b) in pairs {
        let pair = ExponentPair::from_values(a, b)?;
        let real = constant(pair, Field::Real)?;
        let complex = constant(pair, Field::Complex)?;
        let complex = match complex.exact {
            Some(c) => format!("{c:.12}"),
            None => format!("[{:.6}, {:.6}]", complex.lower, complex.upper),
        };
        println!("{a:>10.6} {b:>10.6} {:>6} {:>20.12} {complex:>28}", classify_region(pair).as_str(), real.upper);
    }

    // outside the admissible set there is no constant
    let bad = ExponentPair::from_values(1.0, 1.0)?;
    println!("(1, 1): {}", constant(bad, Field::Real).unwrap_err());
    Ok(())
}
