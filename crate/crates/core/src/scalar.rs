//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the generic numerics are written against (f32 or f64).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Copy + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Copy + Send + Sync + 'static
{
}

/// Concrete scalar used throughout the simulator, spectra and engine.
pub type Real = f64;
