use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for weights, norms and similarity scores.
///
/// Implemented for `f32` and `f64`. Corpus files always carry `f64`
/// weights; an index built over a narrower scalar converts them once at
/// build time.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from a corpus weight.
    fn from_weight(w: f64) -> Self {
        Self::from_f64(w).unwrap_or_else(Self::zero)
    }

    fn to_weight(self) -> f64 {
        self.to_f64().unwrap_or(0.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
