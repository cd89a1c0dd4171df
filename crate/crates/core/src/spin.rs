//! Two-qubit spin states, gates and pure-state concurrence.
//!
//! Basis order is fixed to `(↑↑, ↑↓, ↓↑, ↓↓)` with particle A (the right-mover)
//! as the first tensor factor.

use std::fmt;
use std::ops::Mul;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Norm drift tolerated by [`apply_gate`] before the input is rejected.
pub const NORM_REJECT_TOL: f64 = 1e-9;

/// Index of each basis state in the amplitude vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    UpUp = 0,
    UpDown = 1,
    DownUp = 2,
    DownDown = 3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinState {
    amps: Vector4<Complex64>,
}

impl SpinState {
    pub fn new(amps: [Complex64; 4]) -> Self {
        Self {
            amps: Vector4::from(amps),
        }
    }

    pub fn basis(b: Basis) -> Self {
        let mut amps = Vector4::zeros();
        amps[b as usize] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// Scales the amplitudes to unit norm. Fails on the zero vector.
    pub fn normalized(self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::NotNormalized { norm_sqr: 0.0 });
        }
        Ok(Self {
            amps: self.amps.unscale(n),
        })
    }

    pub fn amplitude(&self, b: Basis) -> Complex64 {
        self.amps[b as usize]
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        [self.amps[0], self.amps[1], self.amps[2], self.amps[3]]
    }

    pub fn as_vector(&self) -> &Vector4<Complex64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn with_global_phase(&self, theta: f64) -> Self {
        Self {
            amps: self.amps * Complex64::from_polar(1.0, theta),
        }
    }

    /// Max elementwise distance to `other`.
    pub fn max_abs_diff(&self, other: &SpinState) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A 4×4 complex matrix acting on the spin basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitGate {
    matrix: Matrix4<Complex64>,
}

impl TwoQubitGate {
    pub fn from_matrix(matrix: Matrix4<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn identity() -> Self {
        Self {
            matrix: Matrix4::identity(),
        }
    }

    /// `U_A ⊗ U_B`.
    pub fn local(u_a: &Matrix2<Complex64>, u_b: &Matrix2<Complex64>) -> Self {
        Self {
            matrix: u_a.kronecker(u_b),
        }
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, row: Basis, col: Basis) -> Complex64 {
        self.matrix[(row as usize, col as usize)]
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            matrix: self.matrix * s,
        }
    }

    /// Largest elementwise deviation of `G†G` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.matrix.adjoint() * self.matrix - Matrix4::<Complex64>::identity();
        p.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &TwoQubitGate) -> f64 {
        (self.matrix - other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for TwoQubitGate {
    type Output = TwoQubitGate;

    fn mul(self, rhs: TwoQubitGate) -> TwoQubitGate {
        TwoQubitGate {
            matrix: self.matrix * rhs.matrix,
        }
    }
}

impl fmt::Display for TwoQubitGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..4 {
            for c in 0..4 {
                let z = self.matrix[(r, c)];
                if c > 0 {
                    write!(f, "  ")?;
                }
                write!(f, "{:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The SWAP (particle-exchange) operator on the internal states.
pub fn swap_operator() -> TwoQubitGate {
    let one = Complex64::new(1.0, 0.0);
    let mut m = Matrix4::zeros();
    m[(0, 0)] = one;
    m[(1, 2)] = one;
    m[(2, 1)] = one;
    m[(3, 3)] = one;
    TwoQubitGate { matrix: m }
}

/// Applies `g` to `s`. The input must be normalized to within
/// [`NORM_REJECT_TOL`].
pub fn apply_gate(g: &TwoQubitGate, s: &SpinState) -> Result<SpinState> {
    let norm_sqr = s.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORM_REJECT_TOL {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(SpinState {
        amps: g.matrix * s.amps,
    })
}

/// Pure-state concurrence `2|ad − bc|`.
pub fn concurrence(s: &SpinState) -> f64 {
    let [a, b, c, d] = s.amplitudes();
    2.0 * (a * d - b * c).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn swap_permutes_middle_components() {
        let sw = swap_operator();
        let out = apply_gate(&sw, &SpinState::basis(Basis::UpDown)).unwrap();
        assert_eq!(out, SpinState::basis(Basis::DownUp));
        let out = apply_gate(&sw, &SpinState::basis(Basis::UpUp)).unwrap();
        assert_eq!(out, SpinState::basis(Basis::UpUp));
        assert_eq!((sw * sw).max_abs_diff(&TwoQubitGate::identity()), 0.0);
    }

    #[test]
    fn swap_on_superposition() {
        let s = SpinState::new([c(0., 0.), c(FRAC_1_SQRT_2, 0.), c(0., FRAC_1_SQRT_2), c(0., 0.)]);
        let out = apply_gate(&swap_operator(), &s).unwrap();
        let want = SpinState::new([c(0., 0.), c(0., FRAC_1_SQRT_2), c(FRAC_1_SQRT_2, 0.), c(0., 0.)]);
        assert_eq!(out, want);
    }

    #[test]
    fn identity_is_noop() {
        let s = SpinState::new([c(0.5, 0.), c(0., 0.5), c(-0.5, 0.), c(0., -0.5)]);
        assert_eq!(apply_gate(&TwoQubitGate::identity(), &s).unwrap(), s);
    }

    #[test]
    fn rejects_unnormalized_input() {
        let s = SpinState::new([c(1.0, 0.), c(1e-4, 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(
            apply_gate(&TwoQubitGate::identity(), &s),
            Err(Error::NotNormalized { .. })
        ));
        // drift below the threshold passes
        let s = SpinState::new([c(1.0 + 1e-11, 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        assert!(apply_gate(&TwoQubitGate::identity(), &s).is_ok());
    }

    #[test]
    fn concurrence_examples() {
        assert_eq!(concurrence(&SpinState::basis(Basis::UpDown)), 0.0);
        let bell = SpinState::new([c(0., 0.), c(FRAC_1_SQRT_2, 0.), c(0., -FRAC_1_SQRT_2), c(0., 0.)]);
        assert_abs_diff_eq!(concurrence(&bell), 1.0, epsilon = 1e-15);
        let s = SpinState::new([c(0., 0.), c(0.8f64.sqrt(), 0.), c(0.2f64.sqrt(), 0.), c(0., 0.)]);
        assert_abs_diff_eq!(concurrence(&s), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn zero_vector_cannot_be_normalized() {
        let z = SpinState::new([c(0., 0.); 4]);
        assert!(z.normalized().is_err());
    }
}
