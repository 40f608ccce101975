use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point element type of the comparator network.
///
/// Beyond `num_traits::Float` the network needs `erf` for the exact GELU and
/// a lossless path through `f64` for the weight file.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Default + Debug + Display + Sum + Send + Sync + 'static
{
    fn erf(self) -> Self;

    /// Widens to `f64` exactly.
    fn to_f64_exact(self) -> f64;

    /// Narrows from `f64`; exact for values produced by `to_f64_exact`.
    fn from_f64_exact(v: f64) -> Self;

    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64_exact(v)
    }
}

impl Scalar for f64 {
    #[inline]
    fn erf(self) -> Self {
        libm::erf(self)
    }

    #[inline]
    fn to_f64_exact(self) -> f64 {
        self
    }

    #[inline]
    fn from_f64_exact(v: f64) -> Self {
        v
    }
}

impl Scalar for f32 {
    #[inline]
    fn erf(self) -> Self {
        libm::erff(self)
    }

    #[inline]
    fn to_f64_exact(self) -> f64 {
        self as f64
    }

    #[inline]
    fn from_f64_exact(v: f64) -> Self {
        v as f32
    }
}

/// Exact GELU, `x Φ(x)`.
#[inline]
pub fn gelu<T: Scalar>(x: T) -> T {
    let half = T::lit(0.5);
    half * x * (T::one() + (x * T::lit(std::f64::consts::FRAC_1_SQRT_2)).erf())
}

/// `d/dx GELU(x) = Φ(x) + x φ(x)`.
#[inline]
pub fn gelu_grad<T: Scalar>(x: T) -> T {
    let half = T::lit(0.5);
    let cdf = half * (T::one() + (x * T::lit(std::f64::consts::FRAC_1_SQRT_2)).erf());
    let pdf = (-(half * x * x)).exp() * T::lit(0.398_942_280_401_432_7);
    cdf + x * pdf
}
