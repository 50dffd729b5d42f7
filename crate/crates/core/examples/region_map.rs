//! Writes the region map as CSV and SVG.
//!
//! `cargo run --example region_map -- [resolution] [out_dir]`

use std::path::PathBuf;

use littlewood::region_map::write_region_map;
use littlewood::RegionLabel;

fn main() -> littlewood::Result<()> {
    let mut args = std::env::args().skip(1);
    let resolution = args.next().map_or(101, |s| s.parse().expect("resolution is an integer"));
    let dir = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    let (csv, svg) = (dir.join("region_map.csv"), dir.join("region_map.svg"));
    let rows = write_region_map(resolution, &csv, &svg)?;
    for label in [RegionLabel::RI, RegionLabel::RII, RegionLabel::RIII, RegionLabel::RIV, RegionLabel::R0] {
        println!("{:>4}: {} points", label.as_str(), rows.iter().filter(|r| r.region == label).count());
    }
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}
