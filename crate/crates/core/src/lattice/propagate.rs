//! `e^{−iHt}` for real symmetric `H`.
//!
//! Small sectors are diagonalized once and reused for any `t`. Larger ones use
//! the Chebyshev expansion
//! `e^{−iHt} = e^{−iat} Σ_k (2 − δ_k0) (−i)^k J_k(bt) T_k((H − a)/b)`
//! over Gershgorin bounds `[a − b, a + b]`, split into steps with `b·dt` at
//! most [`MAX_STEP_PHASE`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::hamiltonian::SparseHamiltonian;
use crate::error::{Error, Result};

/// Sector dimension up to which [`Method::Auto`] diagonalizes.
pub const DENSE_MAX_DIM: usize = 400;
/// Truncation threshold on the Bessel coefficients of one Chebyshev step.
pub const STEP_TOL: f64 = 1e-12;
/// Largest `b·dt` handled in one Chebyshev step.
pub const MAX_STEP_PHASE: f64 = 40.0;
/// Norm drift that triggers a tolerance breach.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    #[default]
    Auto,
    Dense,
    Chebyshev,
}

/// Bessel functions `J_0(x) … J_kmax(x)`, `x >= 0`, by Miller's backward
/// recurrence normalized with `J_0 + 2 Σ J_2k = 1`.
pub fn bessel_j_sequence(x: f64, kmax: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; kmax + 1];
        v[0] = 1.0;
        return v;
    }
    let start = {
        let m = kmax.max(x.ceil() as usize) + 20 + (40.0 * x.max(1.0)).sqrt() as usize;
        m + (m % 2)
    };
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    let mut sum = 0.0;
    for k in (1..=start).rev() {
        let v = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        vals[k - 1] = v;
        if v.abs() > 1e250 {
            for w in vals.iter_mut().skip(k - 1) {
                *w *= 1e-250;
            }
            sum *= 1e-250;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            sum += 2.0 * vals[k - 1];
        }
    }
    sum += vals[0];
    vals.truncate(kmax + 1);
    for v in vals.iter_mut() {
        *v /= sum;
    }
    vals
}

fn chebyshev_step(h: &SparseHamiltonian, psi: &[Complex64], dt: f64, a: f64, b: f64) -> Vec<Complex64> {
    let x = b * dt;
    let kmax = (x.ceil() as usize) + 30 + (10.0 * x.cbrt()) as usize;
    let coeffs = bessel_j_sequence(x, kmax);
    let last = coeffs
        .iter()
        .rposition(|c| c.abs() > STEP_TOL * 1e-3)
        .unwrap_or(0)
        .max(1);
    let dim = psi.len();
    let inv_b = 1.0 / b;
    let mut prev = psi.to_vec();
    let mut cur = vec![Complex64::default(); dim];
    h.apply_shifted(&prev, a, inv_b, &mut cur);
    let mut next = vec![Complex64::default(); dim];
    let mut out: Vec<Complex64> = prev.iter().map(|p| p * coeffs[0]).collect();
    let minus_i = Complex64::new(0.0, -1.0);
    let mut phase = minus_i;
    for (k, &ck) in coeffs.iter().enumerate().take(last + 1).skip(1) {
        let w = phase * (2.0 * ck);
        for (o, c) in out.iter_mut().zip(&cur) {
            *o += w * c;
        }
        if k == last {
            break;
        }
        h.apply_shifted(&cur, a, 2.0 * inv_b, &mut next);
        for (n, p) in next.iter_mut().zip(&prev) {
            *n -= p;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        phase *= minus_i;
    }
    let global = Complex64::from_polar(1.0, -a * dt);
    for o in out.iter_mut() {
        *o *= global;
    }
    out
}

/// Reusable propagator for one Hamiltonian.
pub struct Evolver {
    h: SparseHamiltonian,
    kind: Kind,
}

enum Kind {
    Dense {
        energies: DVector<f64>,
        vectors: DMatrix<f64>,
    },
    Chebyshev {
        center: f64,
        half_width: f64,
    },
}

impl Evolver {
    pub fn new(h: SparseHamiltonian, method: Method) -> Result<Self> {
        let dense = match method {
            Method::Auto => h.dim() <= DENSE_MAX_DIM,
            Method::Dense => true,
            Method::Chebyshev => false,
        };
        let kind = if dense {
            let eig = SymmetricEigen::try_new(h.to_dense(), f64::EPSILON, 0).ok_or(Error::NoConvergence {
                op: "evolve",
                msg: "symmetric eigendecomposition failed".into(),
            })?;
            Kind::Dense {
                energies: eig.eigenvalues,
                vectors: eig.eigenvectors,
            }
        } else {
            let (lo, hi) = h.spectral_bounds();
            Kind::Chebyshev {
                center: 0.5 * (lo + hi),
                // a touch wider so the scaled spectrum stays inside [−1, 1]
                half_width: (0.5 * (hi - lo)).max(1e-12) * (1.0 + 1e-9),
            }
        };
        Ok(Self { h, kind })
    }

    pub fn hamiltonian(&self) -> &SparseHamiltonian {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// `e^{−iHt} psi`; fails if the norm drifts by more than [`NORM_TOL`].
    pub fn evolve(&self, psi: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        if psi.len() != self.dim() {
            return Err(Error::invalid(
                "evolve",
                format!("state length {} != sector dimension {}", psi.len(), self.dim()),
            ));
        }
        if !t.is_finite() {
            return Err(Error::invalid("evolve", "non-finite time"));
        }
        let norm_in: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let out = match &self.kind {
            Kind::Dense { energies, vectors } => {
                let n = self.dim();
                let mut coef = vec![Complex64::default(); n];
                for k in 0..n {
                    let mut acc = Complex64::default();
                    for r in 0..n {
                        acc += psi[r] * vectors[(r, k)];
                    }
                    coef[k] = acc * Complex64::from_polar(1.0, -energies[k] * t);
                }
                (0..n)
                    .map(|r| {
                        let mut acc = Complex64::default();
                        for k in 0..n {
                            acc += coef[k] * vectors[(r, k)];
                        }
                        acc
                    })
                    .collect()
            }
            Kind::Chebyshev { center, half_width } => {
                let total = t.abs();
                let steps = ((half_width * total) / MAX_STEP_PHASE).ceil().max(1.0) as usize;
                let dt = t / steps as f64;
                let mut cur = psi.to_vec();
                for _ in 0..steps {
                    // H is real: e^{+iH|dt|} ψ = conj(e^{−iH|dt|} conj ψ)
                    cur = if dt >= 0.0 {
                        chebyshev_step(&self.h, &cur, dt, *center, *half_width)
                    } else {
                        let conj: Vec<Complex64> = cur.iter().map(|z| z.conj()).collect();
                        chebyshev_step(&self.h, &conj, -dt, *center, *half_width)
                            .into_iter()
                            .map(|z| z.conj())
                            .collect()
                    };
                }
                cur
            }
        };
        let norm_out: f64 = out.iter().map(|z: &Complex64| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm_out - norm_in).abs() > NORM_TOL * norm_in.max(1.0) {
            return Err(Error::ToleranceBreach {
                op: "evolve",
                msg: format!("norm {norm_in} -> {norm_out}"),
            });
        }
        Ok(out)
    }
}
