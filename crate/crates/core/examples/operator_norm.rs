//! Exact real operator norms by sign enumeration, and the ratio they give.
//!
//! `cargo run --example operator_norm`

use littlewood::opnorm::real_sup_norm_capped;
use littlewood::{mixed_norm, random_form, witness_a0, Distribution, ExponentPair, Field};

fn main() -> littlewood::Result<()> {
    let pair = ExponentPair::from_values(4.0 / 3.0, 4.0 / 3.0)?;
    let a0 = witness_a0(Field::Real);
    let (norm, signs) = real_sup_norm_capped(&a0, 24)?;
    println!("A0: ||A|| = {norm}, attained at y = {:?}", signs.0);
    println!("    ratio = {:.15}", mixed_norm(&a0, pair).value / norm);

    for seed in 0..5 {
        let f = random_form(Field::Real, 6, 12, Distribution::Sign, seed)?;
        let (norm, _) = real_sup_norm_capped(&f, 24)?;
        println!("sign 6x12 #{seed}: ||A|| = {norm:>6}  ratio = {:.6}", mixed_norm(&f, pair).value / norm);
    }
    Ok(())
}
