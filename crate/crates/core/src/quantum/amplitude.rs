use std::ops::{Add, Mul, Neg, Sub};

use rustfft::num_complex::Complex64;
use serde::Serialize;

/// A probability amplitude `psi = re + i im`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ComplexAmplitude {
    pub re: f64,
    pub im: f64,
}

impl ComplexAmplitude {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn from_polar(r: f64, phase: f64) -> Self {
        Self::new(r * phase.cos(), r * phase.sin())
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// `|psi|^2`.
    pub fn probability(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }
}

impl Add for ComplexAmplitude {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for ComplexAmplitude {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for ComplexAmplitude {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Neg for ComplexAmplitude {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl From<Complex64> for ComplexAmplitude {
    fn from(c: Complex64) -> Self {
        Self::new(c.re, c.im)
    }
}

impl From<ComplexAmplitude> for Complex64 {
    fn from(a: ComplexAmplitude) -> Self {
        Complex64::new(a.re, a.im)
    }
}

/// Quantum versus classical combination of two alternatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Superposition {
    pub amplitude: ComplexAmplitude,
    /// `|a + b|^2`.
    pub p_quantum: f64,
    /// `|a|^2 + |b|^2`.
    pub p_classical: f64,
    /// `2 Re(a* b)`.
    pub interference: f64,
}

/// Add amplitudes, not probabilities.
///
/// `p_quantum` is assembled as `p_classical + interference`, so the
/// decomposition identity holds bit-exactly; it agrees with a direct
/// `|a + b|^2` to rounding.
pub fn superpose(a: ComplexAmplitude, b: ComplexAmplitude) -> Superposition {
    let p_classical = a.probability() + b.probability();
    let interference = 2.0 * (a.re * b.re + a.im * b.im);
    Superposition {
        amplitude: a + b,
        p_quantum: p_classical + interference,
        p_classical,
        interference,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn destructive_pair() {
        let s = superpose(ComplexAmplitude::new(0.5, 0.0), ComplexAmplitude::new(-0.5, 0.0));
        assert_eq!(s.p_quantum, 0.0);
        assert_eq!(s.p_classical, 0.5);
        assert_eq!(s.interference, -0.5);
    }

    #[test]
    fn constructive_pair() {
        let a = ComplexAmplitude::new(0.5, 0.0);
        let s = superpose(a, a);
        assert_eq!(s.p_quantum, 1.0);
        assert_eq!(s.p_classical, 0.5);
    }

    #[test]
    fn orthogonal_phases() {
        let s = superpose(ComplexAmplitude::new(0.0, 0.6), ComplexAmplitude::new(0.8, 0.0));
        assert_eq!(s.interference, 0.0);
        assert!((s.p_quantum - 1.0).abs() < 1e-15);
        assert!((s.p_classical - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn decomposition_and_cauchy_schwarz(
            ar in -10.0f64..10.0, ai in -10.0f64..10.0,
            br in -10.0f64..10.0, bi in -10.0f64..10.0,
        ) {
            let a = ComplexAmplitude::new(ar, ai);
            let b = ComplexAmplitude::new(br, bi);
            let s = superpose(a, b);
            prop_assert_eq!(s.p_quantum, s.p_classical + s.interference);
            let direct = s.amplitude.probability();
            prop_assert!((s.p_quantum - direct).abs() <= 1e-12 * (1.0 + direct + s.p_classical));
            let bound = 2.0 * (a.probability() * b.probability()).sqrt();
            prop_assert!(s.interference.abs() <= bound * (1.0 + 1e-12) + 1e-300);
        }
    }
}
