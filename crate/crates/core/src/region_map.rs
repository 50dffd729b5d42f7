//! The `(a, b)` plane sampled on a grid in reciprocal coordinates, as CSV
//! rows and as a static SVG figure.

use std::f64::consts::SQRT_2;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exponents::{classify_region, complex_constant_bounds, real_constant, ExponentPair, ExtExponent, RegionLabel};
use crate::json::fmt17;

pub const CSV_HEADER: &str =
    "a,b,inv_a,inv_b,region,real_constant,complex_lower,complex_upper,complex_exact";

/// One grid point. Constant fields are `None` outside the admissible set.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionMapRow {
    pub a: ExtExponent,
    pub b: ExtExponent,
    pub inv_a: f64,
    pub inv_b: f64,
    pub region: RegionLabel,
    pub real_constant: Option<f64>,
    pub complex_lower: Option<f64>,
    pub complex_upper: Option<f64>,
    pub complex_exact: Option<f64>,
}

impl RegionMapRow {
    pub fn for_pair(pair: ExponentPair) -> Result<Self> {
        let region = classify_region(pair);
        let mut row = RegionMapRow {
            a: pair.a,
            b: pair.b,
            inv_a: pair.a.reciprocal(),
            inv_b: pair.b.reciprocal(),
            region,
            real_constant: None,
            complex_lower: None,
            complex_upper: None,
            complex_exact: None,
        };
        if region != RegionLabel::R0 {
            let complex = complex_constant_bounds(pair)?;
            row.real_constant = Some(real_constant(pair)?.upper);
            row.complex_lower = Some(complex.lower);
            row.complex_upper = Some(complex.upper);
            row.complex_exact = complex.exact;
        }
        Ok(row)
    }

    pub fn pair(&self) -> ExponentPair {
        ExponentPair::new(self.a, self.b)
    }

    fn to_csv_line(&self) -> String {
        let exp = |p: ExtExponent| {
            if p.is_infinite() {
                "inf".to_string()
            } else {
                fmt17(p.value())
            }
        };
        let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            exp(self.a),
            exp(self.b),
            fmt17(self.inv_a),
            fmt17(self.inv_b),
            self.region,
            opt(self.real_constant),
            opt(self.complex_lower),
            opt(self.complex_upper),
            opt(self.complex_exact),
        )
    }

    fn parse_csv_line(line: &str, lineno: usize) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::parse(
                format!("line {lineno}"),
                format!("expected 9 fields, found {}", fields.len()),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|_| Error::parse(column(i), format!("line {lineno}: not a number: `{}`", fields[i])))
        };
        let opt = |i: usize| -> Result<Option<f64>> {
            if fields[i].is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        Ok(RegionMapRow {
            a: fields[0].parse()?,
            b: fields[1].parse()?,
            inv_a: num(2)?,
            inv_b: num(3)?,
            region: fields[4].parse()?,
            real_constant: opt(5)?,
            complex_lower: opt(6)?,
            complex_upper: opt(7)?,
            complex_exact: opt(8)?,
        })
    }
}

fn column(i: usize) -> String {
    CSV_HEADER.split(',').nth(i).unwrap_or("?").to_string()
}

/// `resolution^2` rows over `(1/a, 1/b) = (i, j) / (resolution - 1)`, with
/// `1/a` as the slow index.
pub fn region_map(resolution: usize) -> Result<Vec<RegionMapRow>> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!("resolution must be >= 2, got {resolution}")));
    }
    let step = (resolution - 1) as f64;
    let mut rows = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let a = ExtExponent::from_reciprocal(i as f64 / step)?;
        for j in 0..resolution {
            let b = ExtExponent::from_reciprocal(j as f64 / step)?;
            rows.push(RegionMapRow::for_pair(ExponentPair::new(a, b))?);
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[RegionMapRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 120);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<RegionMapRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err(Error::parse("header", format!("expected `{CSV_HEADER}`"))),
    }
    lines
        .enumerate()
        .map(|(k, line)| RegionMapRow::parse_csv_line(line, k + 2))
        .collect()
}

const SIZE: f64 = 480.0;
const MARGIN: f64 = 60.0;
const LEGEND: f64 = 110.0;

fn px(inv_a: f64) -> f64 {
    MARGIN + inv_a * SIZE
}

fn py(inv_b: f64) -> f64 {
    MARGIN + (1.0 - inv_b) * SIZE
}

/// Light to dark blue as the constant goes from 1 to its maximum sqrt(2).
fn color(constant: Option<f64>) -> String {
    let Some(c) = constant else {
        return "#d9d9d9".to_string();
    };
    let t = ((c - 1.0) / (SQRT_2 - 1.0)).clamp(0.0, 1.0);
    let mix = |lo: f64, hi: f64| (lo + (hi - lo) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(239.0, 8.0), mix(243.0, 48.0), mix(255.0, 107.0))
}

/// Cells are centred on the grid points and merged along each row of
/// constant `1/b` when their colors agree.
pub fn to_svg(rows: &[RegionMapRow], resolution: usize) -> Result<String> {
    if resolution < 2 || rows.len() != resolution * resolution {
        return Err(Error::Shape(format!(
            "{} rows do not form a {resolution} x {resolution} grid",
            rows.len()
        )));
    }
    let cell = SIZE / (resolution - 1) as f64;
    let width = SIZE + 2.0 * MARGIN + LEGEND;
    let height = SIZE + 2.0 * MARGIN;
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<clipPath id="plot"><rect x="{MARGIN:.0}" y="{MARGIN:.0}" width="{SIZE:.0}" height="{SIZE:.0}"/></clipPath>"#
    );
    let _ = writeln!(w, r#"<g clip-path="url(#plot)" shape-rendering="crispEdges">"#);
    for j in 0..resolution {
        let mut i = 0;
        while i < resolution {
            let fill = color(rows[i * resolution + j].real_constant);
            let start = i;
            while i < resolution && color(rows[i * resolution + j].real_constant) == fill {
                i += 1;
            }
            let inv_b = rows[start * resolution + j].inv_b;
            let x = px(rows[start * resolution + j].inv_a) - cell / 2.0;
            let y = py(inv_b) - cell / 2.0;
            let _ = writeln!(
                w,
                r#"<rect x="{x:.3}" y="{y:.3}" width="{:.3}" height="{cell:.3}" fill="{fill}"/>"#,
                cell * (i - start) as f64
            );
        }
    }
    let _ = writeln!(w, "</g>");

    let line = |w: &mut String, x0: f64, y0: f64, x1: f64, y1: f64, style: &str| {
        let _ = writeln!(
            w,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" {style}/>"#,
            px(x0),
            py(y0),
            px(x1),
            py(y1)
        );
    };
    let boundary = r#"stroke="black" stroke-width="1.5""#;
    line(w, 0.0, 1.0, 1.0, 0.0, boundary);
    line(w, 0.5, 0.5, 0.5, 1.0, boundary);
    line(w, 0.5, 0.5, 1.0, 0.5, boundary);
    // b = 2a / (3a - 2) for a in [1, 2], a straight line in these coordinates
    let points: Vec<String> = (0..=32)
        .map(|k| {
            let a = 1.0 + k as f64 / 32.0;
            let b = 2.0 * a / (3.0 * a - 2.0);
            format!("{:.3},{:.3}", px(1.0 / a), py(1.0 / b))
        })
        .collect();
    let _ = writeln!(
        w,
        r##"<polyline points="{}" fill="none" stroke="#b2182b" stroke-width="2"/>"##,
        points.join(" ")
    );
    let _ = writeln!(
        w,
        r#"<rect x="{MARGIN:.0}" y="{MARGIN:.0}" width="{SIZE:.0}" height="{SIZE:.0}" fill="none" stroke="black"/>"#
    );

    let label = |w: &mut String, inv_a: f64, inv_b: f64, text: &str| {
        let _ = writeln!(
            w,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{text}</text>"#,
            px(inv_a),
            py(inv_b)
        );
    };
    label(w, 0.25, 0.25, "II");
    label(w, 0.25, 0.85, "III");
    label(w, 0.85, 0.25, "IV");
    label(w, 0.62, 0.62, "I");
    label(w, 0.9, 0.9, "0");

    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let _ = writeln!(
            w,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{t:.2}</text>"#,
            px(t),
            py(0.0) + 20.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{t:.2}</text>"#,
            px(0.0) - 8.0,
            py(t) + 4.0
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">1/a</text>"#,
        px(0.5),
        py(0.0) + 42.0
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" transform="rotate(-90 {:.3} {:.3})">1/b</text>"#,
        px(0.0) - 42.0,
        py(0.5),
        px(0.0) - 42.0,
        py(0.5)
    );

    let lx = MARGIN + SIZE + 30.0;
    let steps = 50;
    let bar = SIZE * 0.6;
    for k in 0..steps {
        let c = SQRT_2 - (SQRT_2 - 1.0) * k as f64 / steps as f64;
        let _ = writeln!(
            w,
            r#"<rect x="{lx:.3}" y="{:.3}" width="20" height="{:.3}" fill="{}"/>"#,
            MARGIN + bar * k as f64 / steps as f64,
            bar / steps as f64 + 0.5,
            color(Some(c))
        );
    }
    let _ = writeln!(w, r#"<text x="{:.3}" y="{:.3}">2^(1/2)</text>"#, lx + 26.0, MARGIN + 10.0);
    let _ = writeln!(w, r#"<text x="{:.3}" y="{:.3}">1</text>"#, lx + 26.0, MARGIN + bar);
    let _ = writeln!(
        w,
        r#"<text x="{lx:.3}" y="{:.3}">real constant</text>"#,
        MARGIN - 12.0
    );
    let _ = writeln!(
        w,
        r#"<rect x="{lx:.3}" y="{:.3}" width="20" height="12" fill="{}"/>"#,
        MARGIN + bar + 24.0,
        color(None)
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.3}" y="{:.3}">no bound</text>"#,
        lx + 26.0,
        MARGIN + bar + 34.0
    );
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

/// Computes the map and writes both files.
pub fn write_region_map(resolution: usize, csv: &Path, svg: &Path) -> Result<Vec<RegionMapRow>> {
    let rows = region_map(resolution)?;
    let svg_text = to_svg(&rows, resolution)?;
    crate::json::write_atomic(csv, &to_csv(&rows))?;
    crate::json::write_atomic(svg, &svg_text)?;
    Ok(rows)
}
