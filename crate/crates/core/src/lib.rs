//! Sharp constants for the anisotropic Littlewood 4/3 inequality.
//!
//! The crate evaluates every quantity that enters the inequality
//!
//! ```text
//! ( sum_k ( sum_j |A(e_k, e_j)|^a )^(b/a) )^(1/b)  <=  C_{a,b} ||A||
//! ```
//!
//! for finite bilinear forms, and checks the closed-form constants against
//! exact enumeration, quadrature and stochastic extremal search:
//!
//! * [`exponents`]: exponent arithmetic, admissibility, regions and constants.
//! * [`forms`]: bilinear forms as matrices, mixed `l_b(l_a)` norms, the witness `A0`.
//! * [`opnorm`]: exact real operator norms and certified complex norm intervals.
//! * [`khinchin`]: Rademacher, roots-of-unity and Steinhaus averages.
//! * [`search`]: hill-climbing searches for extremal ratios, with checkpoints.
//! * [`verify`]: the certification suite behind `littlewood verify`.
//! * [`cli`]: the command-line front end.
//!
//! See the `examples/` directory of this crate for one runnable program per capability.

pub mod cli;
pub mod error;
pub mod exponents;
pub mod forms;
pub mod json;
pub mod khinchin;
pub mod opnorm;
pub mod region_map;
pub mod search;
pub mod verify;

mod sum;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use exponents::{
    admissible, classify_region, complex_constant_bounds, real_constant, ConstantReport,
    ExponentPair, ExtExponent, RegionLabel,
};
pub use forms::{mixed_norm, random_form, witness_a0, BilinearForm, Distribution};
pub use khinchin::CoefficientVector;
pub use opnorm::{complex_norm_bounds, complex_norm_discrete, r_m, real_sup_norm, TorusNormBounds};

/// Scalar field of a form or coefficient vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            _ => Err(Error::parse("field", format!("expected `real` or `complex`, got `{s}`"))),
        }
    }
}
