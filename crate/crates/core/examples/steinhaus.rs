//! The Steinhaus expectation by three methods.
//!
//! `cargo run --release --example steinhaus`

use littlewood::exponents::FOUR_OVER_PI;
use littlewood::khinchin::{em_convergence, steinhaus_expectation, SteinhausMethod};
use littlewood::CoefficientVector;

fn main() -> littlewood::Result<()> {
    let ones = CoefficientVector::from_real(&[1.0, 1.0])?;
    let methods = [
        SteinhausMethod::Quadrature { nodes: 256 },
        SteinhausMethod::EmLimit { schedule: vec![64, 128, 256, 512] },
        SteinhausMethod::BesselTransform,
    ];
    println!("(1, 1), exact 4/pi = {FOUR_OVER_PI:.15}");
    for method in &methods {
        let r = steinhaus_expectation(&ones, method)?;
        println!("  {:<50} {:.15}  (error est. {:?})", format!("{method:?}"), r.value, r.error_bound);
    }

    let conv = em_convergence(&ones, &[4, 8, 16, 32, 64, 128], FOUR_OVER_PI)?;
    for (m, gap) in &conv.gaps {
        println!("  E_{m:<3} gap {gap:.3e}");
    }

    let c = CoefficientVector::from_real(&[1.0, 0.8, 0.5, 0.2])?;
    let q = steinhaus_expectation(&c, &methods[0])?.value;
    let b = steinhaus_expectation(&c, &methods[2])?.value;
    println!("(1, 0.8, 0.5, 0.2): quadrature {q:.12}, bessel {b:.12}");
    Ok(())
}
