//! Hill-climbing for extremal ratios: the real 4/3 case, a complex case and
//! a Steinhaus Khinchin ratio.
//!
//! `cargo run --release --example extremal_search`

use littlewood::khinchin::SteinhausMethod;
use littlewood::search::{maximize_khinchin_ratio, maximize_ratio, KhinchinModel, SearchConfig};
use littlewood::{ExponentPair, ExtExponent, Field};

fn main() -> littlewood::Result<()> {
    let cfg = SearchConfig { restarts: 20, steps: 200, seed: 1, dims: (2, 2), ..SearchConfig::default() };
    let res = maximize_ratio(Field::Real, ExponentPair::from_values(4.0 / 3.0, 4.0 / 3.0)?, &cfg)?;
    println!("real (4/3, 4/3) 2x2: best {:.15} vs ceiling {:.15}", res.best_ratio, res.ceiling);
    println!("{}", res.to_json()?);

    let cfg = SearchConfig { restarts: 4, steps: 80, dims: (2, 3), ..cfg };
    let res = maximize_ratio(Field::Complex, ExponentPair::from_values(1.0, 2.0)?, &cfg)?;
    println!(
        "complex (1, 2) 2x3: best {:.9} (pessimistic {:.9}) vs ceiling {:.9}",
        res.best_ratio,
        res.pessimistic_ratio.unwrap_or(f64::NAN),
        res.ceiling
    );

    let model = KhinchinModel::Steinhaus { method: SteinhausMethod::BesselTransform };
    let res = maximize_khinchin_ratio(model, ExtExponent::TWO, 4, &SearchConfig { restarts: 3, steps: 60, ..cfg })?;
    println!("steinhaus r = 2, N = 4: best {:.9} vs ceiling {:.9}", res.best_ratio, res.ceiling);
    Ok(())
}
