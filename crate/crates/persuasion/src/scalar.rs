use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating point type the closed forms are written over.
///
/// Only the model formulas and the root finders are generic. The solvers
/// work in `f64`.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lift an `f64` constant.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}
