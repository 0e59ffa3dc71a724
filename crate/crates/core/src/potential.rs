//! One-dimensional local potentials shared by the quantum and path modules.

use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub enum Potential {
    /// `V = 0`.
    Free,
    /// `V = stiffness * x^2 / 2`.
    Harmonic { stiffness: f64 },
    /// `V = depth * (x^2 - 1)^2`, wells at `x = +-1`.
    DoubleWell { depth: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Potential {
    pub fn harmonic(stiffness: f64) -> Self {
        Potential::Harmonic { stiffness }
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Potential::Custom(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Harmonic { stiffness } => 0.5 * stiffness * x * x,
            Potential::DoubleWell { depth } => depth * (x * x - 1.0).powi(2),
            Potential::Custom(f) => f(x),
        }
    }

    /// Whether `V(-x) == V(x)` is guaranteed by construction.
    pub fn is_even(&self) -> bool {
        !matches!(self, Potential::Custom(_))
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Free => write!(f, "Free"),
            Potential::Harmonic { stiffness } => write!(f, "Harmonic({stiffness})"),
            Potential::DoubleWell { depth } => write!(f, "DoubleWell({depth})"),
            Potential::Custom(_) => write!(f, "Custom"),
        }
    }
}
