//! Runs the acceptance checks and prints one line per check.
//!
//! `cargo run --release --example verify_suite -- [fast|full] [seed]`

use std::time::Instant;

use littlewood::verify::{run_check, Suite, VerifyConfig, CHECK_NAMES};

fn main() -> littlewood::Result<()> {
    let mut args = std::env::args().skip(1);
    let suite: Suite = args.next().as_deref().unwrap_or("fast").parse()?;
    let seed = args.next().map_or(Ok(1), |s| s.parse()).expect("seed is an integer");
    let cfg = VerifyConfig::new(suite, seed);
    for id in 1..=CHECK_NAMES.len() as u32 {
        let start = Instant::now();
        let out = run_check(id, &cfg)?;
        println!(
            "{:>2} {:<26} {} margin {:+.3e} ({} samples, {:.1} s)",
            out.id,
            out.name,
            if out.passed { "PASS" } else { "FAIL" },
            out.margin,
            out.samples,
            start.elapsed().as_secs_f64()
        );
        for note in &out.notes {
            println!("     {note}");
        }
    }
    Ok(())
}
