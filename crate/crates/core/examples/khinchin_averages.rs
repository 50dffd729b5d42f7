//! Rademacher and roots-of-unity averages and the Khinchin ratio.
//!
//! `cargo run --example khinchin_averages`

use littlewood::khinchin::{blei_bound_check, e_m_average, khinchin_ratio, rademacher_average, rademacher_ceiling};
use littlewood::{CoefficientVector, ExtExponent};
use num_complex::Complex64;

fn main() -> littlewood::Result<()> {
    let ones = CoefficientVector::from_real(&[1.0, 1.0])?;
    println!("E|e1 + e2| = {}", rademacher_average(&ones)?.value);
    for r in [2.0, 3.0, f64::INFINITY] {
        let r = ExtExponent::new(r)?;
        println!(
            "r = {:>3}: ratio {:.12}, ceiling 2^(1/r) = {:.12}",
            r.value(),
            khinchin_ratio(&ones, r)?,
            rademacher_ceiling(r)
        );
    }

    for m in [2, 3, 4, 8, 16] {
        let report = blei_bound_check(&ones, m, ExtExponent::TWO)?;
        println!(
            "E_{m:<2} (1, 1): average {:.12}, ratio {:.9} <= {:.9}",
            e_m_average(&ones, m)?.value,
            report.ratio,
            report.ceiling
        );
    }

    let c = CoefficientVector::from_complex(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5), Complex64::new(-0.3, 0.3)])?;
    println!("E_6 of (1, i/2, -0.3 + 0.3i) = {:.12}", e_m_average(&c, 6)?.value);
    Ok(())
}
