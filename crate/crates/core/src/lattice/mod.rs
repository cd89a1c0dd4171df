//! Two-particle Bose-Hubbard chain
//! `H = Σ_j (J_j/2)(a†_j a_{j+1} + h.c.) + Σ_j Σ_{αβ} (U^{αβ}/2) n_{jα} n_{jβ}`
//! with `U^{↑↑} = U^{↓↓} = 0`.
//!
//! Hopping enters with a `+` sign, so the single-particle dispersion is
//! `E(p) = J cos p` and a packet with `p = −π/2` moves right. Magnitudes and
//! amplitude ratios are independent of this choice (the gauge
//! `a_j → (−1)^j a_j` flips the hopping sign).
//!
//! Two sectors are supported: one `↑` and one `↓` particle on the full
//! `N × N` grid (particle A's site is the row), and two particles with the
//! same spin on the symmetrized pair basis.

mod gate;
mod hamiltonian;
mod propagate;
mod transfer;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use gate::{
    boundary_concurrence, boundary_concurrence_at, collision_ratio, concurrence_model, extract_u_opt,
    extract_u_opt_with, joint_amplitudes, lattice_smatrix, model_fit_residual, sweep_concurrence,
    CollisionSetup, JointAmplitudes, SweepRow, TransferResult, UOptSettings,
};
pub use hamiltonian::{build_hamiltonian, pair_basis, pair_index, sector_dim, Chain, SparseHamiltonian};
pub use propagate::{bessel_j_sequence, Evolver, Method, DENSE_MAX_DIM};
pub use transfer::{
    fit_lorentzian, momentum_distribution, optimize_boundary_coupling, optimize_boundary_coupling_with, transfer_at,
    ChainSpectrum, LorentzianFit, OptimizerSettings, TransferOptimum,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sector {
    /// One `↑` and one `↓` particle.
    Distinguishable,
    /// Two particles in the same internal state.
    SymmetricIdentical,
}

/// Chain parameters. Energies are in units where `ħ = 1`; times come out in
/// units of `1/J` when `j = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec {
    pub n: usize,
    pub j: f64,
    pub j0_left: f64,
    pub j0_right: f64,
    /// `U^{↑↓} = U^{↓↑}` (energy); same-spin interactions are zero.
    pub u_updown: f64,
}

impl LatticeSpec {
    pub fn new(n: usize, j: f64, j0: f64, u_updown: f64) -> Result<Self> {
        Self::with_end_couplings(n, j, j0, j0, u_updown)
    }

    pub fn with_end_couplings(n: usize, j: f64, j0_left: f64, j0_right: f64, u_updown: f64) -> Result<Self> {
        let s = Self {
            n,
            j,
            j0_left,
            j0_right,
            u_updown,
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds the spec from the dimensionless interaction `U = U^{↑↓}/(2J)`.
    pub fn from_dimensionless(n: usize, j: f64, j0: f64, u: f64) -> Result<Self> {
        Self::new(n, j, j0, 2.0 * j * u)
    }

    pub fn validate(&self) -> Result<()> {
        const OP: &str = "LatticeSpec";
        if self.n < 3 {
            return Err(Error::invalid(OP, format!("N = {} < 3", self.n)));
        }
        if !(self.j > 0.0) || !self.j.is_finite() {
            return Err(Error::invalid(OP, format!("J = {} must be > 0", self.j)));
        }
        for j0 in [self.j0_left, self.j0_right] {
            if !(j0 > 0.0 && j0 <= self.j) {
                return Err(Error::invalid(OP, format!("J0 = {j0} outside (0, J]")));
            }
        }
        if !(self.u_updown >= 0.0) || !self.u_updown.is_finite() {
            return Err(Error::invalid(OP, format!("U = {} must be >= 0", self.u_updown)));
        }
        Ok(())
    }

    pub fn chain(&self) -> Result<Chain> {
        Chain::with_end_bonds(self.n, self.j, self.j0_left, self.j0_right)
    }

    /// `U^{αβ}` in the order `[[↑↑, ↑↓], [↓↑, ↓↓]]`.
    pub fn u_table(&self) -> [[f64; 2]; 2] {
        [[0.0, self.u_updown], [self.u_updown, 0.0]]
    }

    /// `U = U^{↑↓}/(2J)`.
    pub fn dimensionless_u(&self) -> f64 {
        self.u_updown / (2.0 * self.j)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoParticleState {
    pub sector: Sector,
    pub n: usize,
    pub amplitudes: Vec<Complex64>,
}

impl TwoParticleState {
    /// Particle A on `site_a`, B on `site_b` (0-based).
    pub fn localized(sector: Sector, n: usize, site_a: usize, site_b: usize) -> Result<Self> {
        if site_a >= n || site_b >= n {
            return Err(Error::invalid("TwoParticleState", "site out of range"));
        }
        let mut amplitudes = vec![Complex64::default(); sector_dim(n, sector)];
        let idx = match sector {
            Sector::Distinguishable => site_a * n + site_b,
            Sector::SymmetricIdentical => pair_index(n, site_a, site_b),
        };
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self {
            sector,
            n,
            amplitudes,
        })
    }

    /// A on site 1, B on site N.
    pub fn ends(sector: Sector, n: usize) -> Result<Self> {
        Self::localized(sector, n, 0, n - 1)
    }

    /// Product `φ_A(i) φ_B(j)` in the distinguishable sector.
    pub fn product(phi_a: &[Complex64], phi_b: &[Complex64]) -> Result<Self> {
        let n = phi_a.len();
        if phi_b.len() != n {
            return Err(Error::invalid("TwoParticleState", "orbital lengths differ"));
        }
        let mut amplitudes = Vec::with_capacity(n * n);
        for a in phi_a {
            for b in phi_b {
                amplitudes.push(a * b);
            }
        }
        Ok(Self {
            sector: Sector::Distinguishable,
            n,
            amplitudes,
        })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Amplitude with A on `i` and B on `j`; for the identical sector this
    /// is the symmetrized basis amplitude of the pair.
    pub fn amplitude(&self, i: usize, j: usize) -> Complex64 {
        match self.sector {
            Sector::Distinguishable => self.amplitudes[i * self.n + j],
            Sector::SymmetricIdentical => self.amplitudes[pair_index(self.n, i, j)],
        }
    }

    pub fn energy(&self, spec: &LatticeSpec) -> Result<f64> {
        let h = build_hamiltonian(spec, self.sector)?;
        Ok(h.expectation(&self.amplitudes))
    }
}

/// `e^{−iHt}` applied to `state`.
pub fn evolve(state: &TwoParticleState, spec: &LatticeSpec, t: f64) -> Result<TwoParticleState> {
    if state.n != spec.n {
        return Err(Error::invalid("evolve", "state and spec disagree on N"));
    }
    let norm_sqr: f64 = state.amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm_sqr });
    }
    let ev = Evolver::new(build_hamiltonian(spec, state.sector)?, Method::Auto)?;
    Ok(TwoParticleState {
        sector: state.sector,
        n: state.n,
        amplitudes: ev.evolve(&state.amplitudes, t)?,
    })
}
