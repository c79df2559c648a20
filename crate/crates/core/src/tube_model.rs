//! Geometry of a Margulis tube with metric `cosh^2 r dt^2 + dr^2 + sinh^2 r dθ^2`.
//!
//! Radial weights for the reduced eigenproblems, orbit lengths, the
//! boundary area relation between core length and radius, and filling slopes.

use num_integer::Integer;
use thiserror::Error;

use crate::quadrature::composite_gauss4;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TubeError {
    #[error("radius must be non-negative, got {0}")]
    NegativeRadius(f64),
    #[error("weight has a pole at r = 0")]
    PoleAtZero,
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("slope ({p}, {q}) is not primitive")]
    NonCoprimeSlope { p: i64, q: i64 },
}

/// Dehn filling slope: a primitive pair `(p, q)` or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FillingSlope {
    Finite { p: i64, q: i64 },
    Infinity,
}

impl FillingSlope {
    pub fn new(p: i64, q: i64) -> Result<Self, TubeError> {
        if (p == 0 && q == 0) || p.gcd(&q) != 1 {
            return Err(TubeError::NonCoprimeSlope { p, q });
        }
        Ok(FillingSlope::Finite { p, q })
    }

    /// Coefficients `(x, y)` with `p x + q y = 1`, if finite.
    pub fn bezout(&self) -> Option<(i64, i64)> {
        match *self {
            FillingSlope::Finite { p, q } => {
                let eg = p.extended_gcd(&q);
                // gcd may come back as -1 for negative inputs
                if eg.gcd == 1 {
                    Some((eg.x, eg.y))
                } else {
                    Some((-eg.x, -eg.y))
                }
            }
            FillingSlope::Infinity => None,
        }
    }
}

/// A tube of radius `radius` around a closed geodesic of length `core_length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tube<T> {
    radius: T,
    core_length: T,
    slope: FillingSlope,
}

impl<T: Real> Tube<T> {
    pub fn new(radius: T, core_length: T, slope: FillingSlope) -> Result<Self, TubeError> {
        if !(radius > T::zero()) {
            return Err(TubeError::NonPositive { name: "radius", value: radius.to_f64().unwrap_or(f64::NAN) });
        }
        if !(core_length > T::zero()) {
            return Err(TubeError::NonPositive {
                name: "core_length",
                value: core_length.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { radius, core_length, slope })
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn core_length(&self) -> T {
        self.core_length
    }

    pub fn slope(&self) -> FillingSlope {
        self.slope
    }

    /// Area of the boundary torus at `r = R`: `2π l cosh R sinh R`.
    pub fn boundary_area(&self) -> T {
        T::TAU() * self.core_length * weight_volume_unchecked(self.radius)
    }
}

fn check_radius<T: Real>(r: T) -> Result<(), TubeError> {
    if r < T::zero() || r.is_nan() {
        return Err(TubeError::NegativeRadius(r.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// `tanh r`, the weight of the `dt` component.
pub fn weight_t<T: Real>(r: T) -> Result<T, TubeError> {
    check_radius(r)?;
    Ok(r.tanh())
}

/// `coth r`, the weight of the `dθ` component. Undefined at the core.
pub fn weight_theta<T: Real>(r: T) -> Result<T, TubeError> {
    check_radius(r)?;
    if r == T::zero() {
        return Err(TubeError::PoleAtZero);
    }
    Ok(r.tanh().recip())
}

/// Volume density `cosh r sinh r`.
pub fn weight_volume<T: Real>(r: T) -> Result<T, TubeError> {
    check_radius(r)?;
    Ok(weight_volume_unchecked(r))
}

pub(crate) fn weight_volume_unchecked<T: Real>(r: T) -> T {
    r.cosh() * r.sinh()
}

/// Width of the near-core piece integrated with the substitution `u = r^(1/3)`.
const SINGULAR_SPLIT: f64 = 1e-2;

/// `I(R) = ∫_0^R tanh(r)^(-2/3) dr`.
///
/// The integrand behaves like `r^(-2/3)` at 0. On `[0, ε]` the substitution
/// `r = u^3` turns it into the smooth `3 (u^3 / tanh u^3)^(2/3)`; the rest is
/// composite Gauss–Legendre on panels doubling in width up to `r = 1`.
pub fn substitution_integral<T: Real>(radius: T) -> Result<T, TubeError> {
    if !(radius > T::zero()) {
        return Err(TubeError::NonPositive { name: "R", value: radius.to_f64().unwrap_or(f64::NAN) });
    }
    let two_thirds = T::lit(2.0 / 3.0);
    let eps = T::lit(SINGULAR_SPLIT).min(radius);
    let near = composite_gauss4(
        |u: T| {
            let r = u * u * u;
            if r == T::zero() {
                T::lit(3.0)
            } else {
                T::lit(3.0) * (r / r.tanh()).powf(two_thirds)
            }
        },
        T::zero(),
        eps.cbrt(),
        8,
    );
    if radius <= eps {
        return Ok(near);
    }
    // r^(-2/3) is still steep just past ε: geometric panels up to r = 1
    let mut far = T::zero();
    let mut a = eps;
    while a < radius {
        let b = if a < T::one() { (a + a).min(T::one()).min(radius) } else { radius };
        let panels = if a < T::one() { 12 } else { ((b - a).to_f64().unwrap_or(1.0) * 16.0).ceil().max(4.0) as usize };
        far = far + composite_gauss4(|r: T| r.tanh().powf(-two_thirds), a, b, panels);
        a = b;
    }
    Ok(near + far)
}

/// Longest circle orbit on the tube: `max(l cosh R, 2π sinh R)`.
///
/// Both orbit lengths grow with `r`, so the supremum sits at the boundary.
pub fn orbit_length_bound<T: Real>(tube: &Tube<T>) -> T {
    orbit_length_at(tube.radius, tube.core_length)
}

/// Same as [`orbit_length_bound`] for raw `(R, l)`, allowing the degenerate `R = 0`.
pub fn orbit_length_at<T: Real>(radius: T, core_length: T) -> T {
    (core_length * radius.cosh()).max(T::TAU() * radius.sinh())
}

/// Eigenvalues below `(2π / L)^2` have circle-invariant eigenforms.
pub fn invariance_threshold<T: Real>(orbit_length: T) -> Result<T, TubeError> {
    if !(orbit_length > T::zero()) {
        return Err(TubeError::NonPositive { name: "L", value: orbit_length.to_f64().unwrap_or(f64::NAN) });
    }
    let x = T::TAU() / orbit_length;
    Ok(x * x)
}

/// Invert `A = 2π l cosh R sinh R` for the core length `l`.
pub fn core_length_from_boundary_area<T: Real>(radius: T, area: T) -> Result<T, TubeError> {
    if !(radius > T::zero()) {
        return Err(TubeError::NonPositive { name: "R", value: radius.to_f64().unwrap_or(f64::NAN) });
    }
    if !(area > T::zero()) {
        return Err(TubeError::NonPositive { name: "A", value: area.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(area / (T::TAU() * weight_volume_unchecked(radius)))
}
