//! Exponent arithmetic on `[1, inf]`, the admissible range of the anisotropic
//! Littlewood inequality, its region taxonomy and the closed-form constants.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::Field;

/// `2 / sqrt(pi)`, the complex constant at `(1, 2)` and `(2, 1)`.
pub const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// `4 / pi`, the base of the complex ceilings.
pub const FOUR_OVER_PI: f64 = 4.0 * std::f64::consts::FRAC_1_PI;

/// An exponent in `[1, inf]`.
///
/// Infinity is stored as `f64::INFINITY`, so `reciprocal` yields exactly `0`
/// and every `inf` level of a mixed norm can be detected without tolerance.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct ExtExponent(f64);

impl ExtExponent {
    pub const ONE: ExtExponent = ExtExponent(1.0);
    pub const TWO: ExtExponent = ExtExponent(2.0);
    pub const INFINITY: ExtExponent = ExtExponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(format!("{p}")));
        }
        Ok(ExtExponent(p))
    }

    /// Builds the exponent whose reciprocal is `inv`, with `inv = 0` meaning infinity.
    pub fn from_reciprocal(inv: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&inv) {
            return Err(Error::InvalidExponent(format!("1/{inv}")));
        }
        if inv == 0.0 {
            Ok(Self::INFINITY)
        } else {
            Ok(ExtExponent(1.0 / inv))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// The conjugate index `p*` with `1/p + 1/p* = 1`.
    pub fn conjugate(self) -> ExtExponent {
        if self.0 == 1.0 {
            Self::INFINITY
        } else if self.is_infinite() {
            Self::ONE
        } else {
            ExtExponent(self.0 / (self.0 - 1.0))
        }
    }
}

/// Free-function form of [`ExtExponent::conjugate`].
pub fn conjugate(p: ExtExponent) -> ExtExponent {
    p.conjugate()
}

impl fmt::Display for ExtExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Accepts integers, decimals, fractions `p/q` and `inf`.
impl FromStr for ExtExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::parse("exponent", format!("cannot parse `{s}`"));
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(Self::INFINITY),
            _ => {}
        }
        let value = match t.split_once('/') {
            Some((num, den)) => {
                let num: f64 = num.trim().parse().map_err(|_| bad())?;
                let den: f64 = den.trim().parse().map_err(|_| bad())?;
                if den == 0.0 {
                    return Err(bad());
                }
                num / den
            }
            None => t.parse::<f64>().map_err(|_| bad())?,
        };
        ExtExponent::new(value)
    }
}

impl Serialize for ExtExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExponentVisitor;

        impl Visitor<'_> for ExponentVisitor {
            type Value = ExtExponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number >= 1 or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtExponent, E> {
                ExtExponent::new(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtExponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtExponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtExponent, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExponentVisitor)
    }
}

/// The pair `(a, b)`: `a` is the inner exponent (within a row), `b` the outer one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub a: ExtExponent,
    pub b: ExtExponent,
}

impl ExponentPair {
    pub fn new(a: ExtExponent, b: ExtExponent) -> Self {
        ExponentPair { a, b }
    }

    pub fn from_values(a: f64, b: f64) -> Result<Self> {
        Ok(ExponentPair::new(ExtExponent::new(a)?, ExtExponent::new(b)?))
    }

    pub fn swapped(self) -> Self {
        ExponentPair::new(self.b, self.a)
    }

    /// `1/a + 1/b - 1`, in `[-1, 1]`.
    pub fn deficiency(self) -> f64 {
        self.a.reciprocal() + self.b.reciprocal() - 1.0
    }

    pub fn is_admissible(self) -> bool {
        admissible(self)
    }

    fn require_admissible(self) -> Result<()> {
        if admissible(self) {
            Ok(())
        } else {
            Err(Error::Inadmissible {
                a: self.a.to_string(),
                b: self.b.to_string(),
            })
        }
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// `1/a + 1/b <= 3/2`, closed, compared exactly on the reciprocals.
pub fn admissible(pair: ExponentPair) -> bool {
    pair.a.reciprocal() + pair.b.reciprocal() <= 1.5
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    R0,
    RI,
    RII,
    RIII,
    RIV,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::R0 => "R0",
            RegionLabel::RI => "RI",
            RegionLabel::RII => "RII",
            RegionLabel::RIII => "RIII",
            RegionLabel::RIV => "RIV",
        }
    }

    /// Value of the real constant formula on this region's branch: `1` on RII,
    /// `2^(1/a + 1/b - 1)` on RI, RIII and RIV. `None` for R0.
    pub fn real_branch_value(self, pair: ExponentPair) -> Option<f64> {
        match self {
            RegionLabel::R0 => None,
            RegionLabel::RII => Some(1.0),
            _ => Some(pair.deficiency().exp2()),
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "R0" => RegionLabel::R0,
            "RI" => RegionLabel::RI,
            "RII" => RegionLabel::RII,
            "RIII" => RegionLabel::RIII,
            "RIV" => RegionLabel::RIV,
            _ => return Err(Error::parse("region", format!("unknown label `{s}`"))),
        })
    }
}

/// Region of `(a, b)`. Shared boundaries resolve with priority RII > RIII > RIV > RI.
///
/// * RII:  `b in [a*, inf]`
/// * RIII: `a in [2, inf]`, `b in [1, a*]`
/// * RIV:  `a in [1, 2]`, `b in [2, a*]`
/// * RI:   `a, b in [1, 2]`
pub fn classify_region(pair: ExponentPair) -> RegionLabel {
    if !admissible(pair) {
        return RegionLabel::R0;
    }
    let inv_a = pair.a.reciprocal();
    let inv_b = pair.b.reciprocal();
    if inv_b <= 1.0 - inv_a {
        RegionLabel::RII
    } else if inv_a <= 0.5 {
        RegionLabel::RIII
    } else if inv_b <= 0.5 {
        RegionLabel::RIV
    } else {
        RegionLabel::RI
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub field: Field,
    pub exact: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub provenance: String,
}

impl ConstantReport {
    fn exact(field: Field, value: f64, provenance: impl Into<String>) -> Self {
        ConstantReport {
            field,
            exact: Some(value),
            lower: value,
            upper: value,
            provenance: provenance.into(),
        }
    }
}

/// The optimal real constant `2^max(0, 1/a + 1/b - 1)`.
pub fn real_constant(pair: ExponentPair) -> Result<ConstantReport> {
    pair.require_admissible()?;
    let d = pair.deficiency();
    let provenance = if d <= 0.0 {
        "optimal real constant is 1 when 1/a + 1/b <= 1 (rank-one witness attains it)"
    } else {
        "optimal real constant 2^(1/a + 1/b - 1), attained by A0 = [[1, 1], [1, -1]]"
    };
    Ok(ConstantReport::exact(Field::Real, d.max(0.0).exp2(), provenance))
}

/// Complex constant: exact where known, otherwise `[1, (4/pi)^max(0, 1/a + 1/b - 1)]`.
pub fn complex_constant_bounds(pair: ExponentPair) -> Result<ConstantReport> {
    pair.require_admissible()?;
    let d = pair.deficiency();
    let is = |a: f64, b: f64| pair.a.value() == a && pair.b.value() == b;
    if d <= 0.0 {
        return Ok(ConstantReport::exact(
            Field::Complex,
            1.0,
            "complex constant is 1 when 1/a + 1/b <= 1",
        ));
    }
    if is(1.0, 2.0) || is(2.0, 1.0) {
        return Ok(ConstantReport::exact(
            Field::Complex,
            TWO_OVER_SQRT_PI,
            "known optimal value 2/sqrt(pi) at (1, 2) and (2, 1)",
        ));
    }
    Ok(ConstantReport {
        field: Field::Complex,
        exact: None,
        lower: 1.0,
        upper: FOUR_OVER_PI.powf(d),
        provenance: "optimal complex constant unknown; bracketed by [1, (4/pi)^(1/a + 1/b - 1)]"
            .to_string(),
    })
}

/// Dispatches to [`real_constant`] or [`complex_constant_bounds`].
pub fn constant(pair: ExponentPair, field: Field) -> Result<ConstantReport> {
    match field {
        Field::Real => real_constant(pair),
        Field::Complex => complex_constant_bounds(pair),
    }
}
