use crate::error::{check_dim, invalid, Result};
use crate::scalar::{sq_dist, Scalar};

/// Gaussian radial unit.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfUnit<T> {
    pub center: Vec<T>,
    pub width: T,
}

impl<T: Scalar> RbfUnit<T> {
    pub fn new(center: Vec<T>, width: T) -> Result<Self> {
        if !(width.is_finite() && width > T::zero()) {
            return invalid(format!("RBF width must be positive, got {width}"));
        }
        Ok(Self { center, width })
    }

    #[inline]
    pub(crate) fn response(&self, x: &[T]) -> T {
        (-sq_dist(x, &self.center) / (T::of(2.0) * self.width * self.width)).exp()
    }
}

/// `exp(-|x - center|^2 / (2 width^2))`.
pub fn rbf_activation<T: Scalar>(unit: &RbfUnit<T>, x: &[T]) -> Result<T> {
    check_dim(unit.center.len(), x.len())?;
    Ok(unit.response(x))
}

/// One hidden layer of Gaussian units sharing an input space.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfLayer<T> {
    pub units: Vec<RbfUnit<T>>,
}

impl<T: Scalar> RbfLayer<T> {
    pub fn input_dim(&self) -> usize {
        self.units.first().map_or(0, |u| u.center.len())
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn activations(&self, x: &[T]) -> Vec<T> {
        self.units.iter().map(|u| u.response(x)).collect()
    }
}
