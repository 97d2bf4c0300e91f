//! Local and global heights in the max-norm metrization.
//!
//! At every place the defining form of the boundary divisor is measured
//! against the largest coordinate, so all finite-place heights are exact
//! powers of p and the global height of a primitive point is an integer.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{self, PrimitivePoint, Rational};
use crate::error::{Error, Result};
use crate::orbifold::OrbifoldModel;

/// A place of the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Place {
    Finite(u64),
    Archimedean,
}

impl std::str::FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Place::Archimedean),
            _ => {
                let p = s
                    .parse::<u64>()
                    .map_err(|_| Error::UnknownModel(format!("bad place {s:?}")))?;
                if arith::is_prime(p) {
                    Ok(Place::Finite(p))
                } else {
                    Err(Error::NotPrime(p))
                }
            }
        }
    }
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Archimedean => write!(f, "inf"),
        }
    }
}

fn boundary_value<'a>(
    model: &OrbifoldModel,
    point: &'a PrimitivePoint,
    divisor_label: &str,
) -> Result<&'a BigInt> {
    model
        .divisors()
        .iter()
        .position(|d| d.label() == divisor_label)
        .ok_or_else(|| Error::UnknownDivisor {
            model: model.name().to_string(),
            label: divisor_label.to_string(),
        })?;
    assert_eq!(
        point.coords().len(),
        model.coordinate_count(),
        "point dimension does not match model {}",
        model.name()
    );
    let a = &point.coords()[0];
    if a.is_zero() {
        return Err(Error::BoundaryPoint(point.to_string()));
    }
    Ok(a)
}

fn sup_norm(point: &PrimitivePoint) -> BigInt {
    point
        .coords()
        .iter()
        .map(|c| c.abs())
        .max()
        .expect("points are nonempty")
}

/// The metrized size of the boundary divisor's defining form at one place:
/// `|a|_v / max_i |x_i|_v` on any coordinates; exact on primitive ones.
///
/// At a finite place the primitive coordinates have unit max, so the value
/// is `p^(-k)` with `k` the intersection multiplicity at p; at the
/// archimedean place it is `|a| / max|x_i|`.
pub fn local_height(
    model: &OrbifoldModel,
    point: &PrimitivePoint,
    divisor_label: &str,
    place: Place,
) -> Result<Rational> {
    let a = boundary_value(model, point, divisor_label)?;
    match place {
        Place::Finite(p) => {
            if !arith::is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            let v = arith::padic_valuation(&Rational::from_integer(a.clone()), p)
                .expect("nonzero integer");
            debug_assert!(v >= 0);
            Ok(Rational::new(1.into(), BigInt::from(p).pow(v as u32)))
        }
        Place::Archimedean => Ok(Rational::new(a.abs(), sup_norm(point))),
    }
}

/// The global height against `lambda` times the hyperplane class: the
/// product of inverse local heights, which on primitive coordinates
/// collapses to `(max_i |x_i|)^lambda`, a positive integer.
pub fn height(model: &OrbifoldModel, point: &PrimitivePoint, lambda: u32) -> Result<Rational> {
    boundary_value(model, point, model.divisor().label())?;
    Ok(Rational::from_integer(sup_norm(point).pow(lambda)))
}

/// `height` as a double, for zeta partial sums and fits.
pub fn height_f64(model: &OrbifoldModel, point: &PrimitivePoint, lambda: u32) -> Result<f64> {
    Ok(height(model, point, lambda)?
        .to_f64()
        .expect("height fits f64"))
}
