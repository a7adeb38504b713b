//! Scalar abstraction shared by the floating-point and exact-rational code paths.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, Num, One, Signed, ToPrimitive, Zero};

/// Real field used as the component type of complex amplitudes.
///
/// Implemented for `f32`, `f64` and [`BigRational`]. Operations that need
/// irrational numbers return `None` when the value is not representable.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn of_f64(v: f64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn as_f64(&self) -> f64;

    /// Square root, `None` when it is not representable (exact types only).
    fn sqrt_exact(&self) -> Option<Self>;

    /// `cos(pi / n)`, `None` when it is not representable.
    fn cos_pi_over(n: u32) -> Option<Self>;

    /// Absolute threshold below which a value counts as zero.
    fn zero_tol() -> Self;

    fn from_usize(v: usize) -> Self {
        Self::from_ratio(v as i64, 1)
    }
}

/// Floating-point scalars: everything transcendental is available.
pub trait Real: Scalar + Float + FloatConst + Copy {}

impl Real for f32 {}
impl Real for f64 {}

macro_rules! float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn of_f64(v: f64) -> Self {
                v as $t
            }

            fn from_ratio(num: i64, den: i64) -> Self {
                (num as f64 / den as f64) as $t
            }

            fn as_f64(&self) -> f64 {
                *self as f64
            }

            fn sqrt_exact(&self) -> Option<Self> {
                if *self < 0.0 {
                    None
                } else {
                    Some(self.sqrt())
                }
            }

            fn cos_pi_over(n: u32) -> Option<Self> {
                Some((std::f64::consts::PI / n as f64).cos() as $t)
            }

            fn zero_tol() -> Self {
                $tol
            }
        }
    };
}

float_scalar!(f32, 1e-6);
float_scalar!(f64, 1e-12);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn of_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn as_f64(&self) -> f64 {
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        if n.is_finite() && d.is_finite() {
            n / d
        } else {
            // Large numerators/denominators: scale down before dividing.
            let shift = self.numer().bits().max(self.denom().bits()).saturating_sub(1000);
            let n = (self.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (self.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &n * &n == *self.numer() && &d * &d == *self.denom() {
            Some(BigRational::new(n, d))
        } else {
            None
        }
    }

    fn cos_pi_over(n: u32) -> Option<Self> {
        match n {
            1 => Some(-BigRational::one()),
            2 => Some(BigRational::zero()),
            3 => Some(Self::from_ratio(1, 2)),
            _ => None,
        }
    }

    fn zero_tol() -> Self {
        BigRational::zero()
    }
}

/// Exact-zero test for exact types, tolerance test otherwise.
pub fn is_negligible<T: Scalar>(v: &T) -> bool {
    v.abs() <= T::zero_tol()
}
