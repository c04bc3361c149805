//! Scalar abstraction: everything in the library is generic over a real
//! floating-point type that rustfft can transform.

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar usable for grids, symbols, and transforms: f32 or f64.
pub trait Real: rustfft::FftNum + Float + FloatConst + FromPrimitive {
    /// Shorthand for lossy conversion from f64 literals.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 conversion")
    }
}

impl<T> Real for T where T: rustfft::FftNum + Float + FloatConst + FromPrimitive {}

/// Neumaier compensated sum; keeps N=128^3 accumulations stable.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}
