//! Formal inverses of `F = z - H` through a fixed total degree.
//!
//! Every method returns `G` with `F(G) = G(F) = z` through degree `D`. The
//! methods only read `H` through degree `D`, which is all the inverse
//! depends on at that precision.

mod bform;
mod cross;
mod graded;
mod residue;

pub use bform::{b_form_apply, invert_homogeneous, BForm};
pub use cross::{cross_check, CrossCheck, MethodRun};
pub use graded::{
    invert_abhyankar_gurjar, invert_bcw, invert_fixed_point, invert_recurrent, GradedInverse,
};
pub use residue::{
    invert_jacobi, invert_lagrange, jacobi_coefficient, jacobi_coefficients, lagrange_coefficient,
    lagrange_coefficients,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::series::{divide_by_coordinates, MapF, PolyMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    FixedPoint,
    Recurrent,
    Homogeneous,
    AbhyankarGurjar,
    Bcw,
    Jacobi,
    Lagrange,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::FixedPoint,
        Method::Recurrent,
        Method::Homogeneous,
        Method::AbhyankarGurjar,
        Method::Bcw,
        Method::Jacobi,
        Method::Lagrange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::FixedPoint => "fixed",
            Method::Recurrent => "recurrent",
            Method::Homogeneous => "homog",
            Method::AbhyankarGurjar => "ag",
            Method::Bcw => "bcw",
            Method::Jacobi => "jacobi",
            Method::Lagrange => "lagrange",
        }
    }

    /// `Ok` if the method's precondition holds for `f`; otherwise the reason.
    pub fn applicable(self, f: &MapF) -> Result<()> {
        match self {
            Method::Homogeneous => match f.homogeneous_degree() {
                Some(d) if d >= 2 => Ok(()),
                Some(d) => Err(Error::DegreeTooSmall(d)),
                None => Err(Error::NotHomogeneous(None)),
            },
            Method::Lagrange => divide_by_coordinates(f.h()).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// The inverse of `f` through degree `d`.
    pub fn invert(self, f: &MapF, d: u32) -> Result<PolyMap> {
        match self {
            Method::FixedPoint => invert_fixed_point(f, d),
            Method::Recurrent => Ok(invert_recurrent(f, d)?.inverse()),
            Method::Homogeneous => {
                self.applicable(f)?;
                f.h_polynomial(d, d)?;
                let deg = f.homogeneous_degree().expect("checked above");
                let layers = d.saturating_sub(1) / (deg - 1);
                Ok(invert_homogeneous(f, layers)?.inverse().truncate(d))
            }
            Method::AbhyankarGurjar => invert_abhyankar_gurjar(f, d),
            Method::Bcw => invert_bcw(f, d),
            Method::Jacobi => invert_jacobi(f, d),
            Method::Lagrange => invert_lagrange(f, d),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown method '{s}'")))
    }
}
