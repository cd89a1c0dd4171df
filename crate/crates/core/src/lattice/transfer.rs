//! End-to-end single-particle transfer through a chain with weakened end
//! bonds `J0`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;

use super::hamiltonian::Chain;
use crate::error::{Error, Result};

/// Eigendecomposition of a single-particle chain Hamiltonian.
#[derive(Clone, Debug)]
pub struct ChainSpectrum {
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl ChainSpectrum {
    pub fn new(chain: &Chain) -> Result<Self> {
        let eig = SymmetricEigen::try_new(chain.hamiltonian(), f64::EPSILON, 0).ok_or(Error::NoConvergence {
            op: "ChainSpectrum",
            msg: "symmetric eigendecomposition failed".into(),
        })?;
        Ok(Self {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn sites(&self) -> usize {
        self.energies.len()
    }

    /// `⟨to|e^{−iht}|from⟩`.
    pub fn amplitude(&self, from: usize, to: usize, t: f64) -> Complex64 {
        let mut acc = Complex64::default();
        for k in 0..self.sites() {
            let w = self.vectors[(to, k)] * self.vectors[(from, k)];
            acc += Complex64::from_polar(w, -self.energies[k] * t);
        }
        acc
    }

    /// `e^{−iht}|from⟩` on every site.
    pub fn evolve_site(&self, from: usize, t: f64) -> Vec<Complex64> {
        (0..self.sites()).map(|to| self.amplitude(from, to, t)).collect()
    }

    /// `e^{−iht} psi`.
    pub fn evolve(&self, psi: &[Complex64], t: f64) -> Vec<Complex64> {
        let n = self.sites();
        let coef: Vec<Complex64> = (0..n)
            .map(|k| {
                let acc: Complex64 = psi
                    .iter()
                    .enumerate()
                    .map(|(r, p)| p * self.vectors[(r, k)])
                    .sum();
                acc * Complex64::from_polar(1.0, -self.energies[k] * t)
            })
            .collect();
        (0..n)
            .map(|r| (0..n).map(|k| coef[k] * self.vectors[(r, k)]).sum())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerSettings {
    /// Coarse `J0/J` grid spacing before golden-section refinement.
    pub j0_step: f64,
    /// Tolerance of the golden-section search on `J0/J`.
    pub j0_tol: f64,
    /// Replace the golden-section search by a dense scan of spacing `j0_tol`.
    pub full_grid: bool,
    /// Time window in units of `N/J`.
    pub t_window: (f64, f64),
    /// Time scan resolution in units of `1/J`.
    pub coarse_dt: f64,
    /// Final time resolution in units of `1/J`.
    pub fine_dt: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            j0_step: 0.02,
            j0_tol: 1e-5,
            full_grid: false,
            t_window: (0.5, 2.5),
            coarse_dt: 0.01,
            fine_dt: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferOptimum {
    pub n: usize,
    pub j: f64,
    pub j0: f64,
    pub t_transfer: f64,
    /// `|⟨N|e^{−iHt̃}|1⟩|`.
    pub f_1n: f64,
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            let x = 0.5 * (a + b);
            return Ok((x, f(x)));
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    Err(Error::NoConvergence {
        op: "optimize_boundary_coupling",
        msg: format!("golden section stalled on [{a}, {b}]"),
    })
}

/// Best transfer time for a fixed chain: scan, then refine.
fn best_time(spec: &ChainSpectrum, j: f64, settings: &OptimizerSettings) -> Result<(f64, f64)> {
    let n = spec.sites();
    let t_lo = settings.t_window.0 * n as f64 / j;
    let t_hi = settings.t_window.1 * n as f64 / j;
    let dt = settings.coarse_dt / j;
    let steps = ((t_hi - t_lo) / dt).round() as usize;
    let mut best = (t_lo, -1.0);
    for s in 0..=steps {
        let t = t_lo + s as f64 * dt;
        let a = spec.amplitude(0, n - 1, t).norm();
        if a > best.1 {
            best = (t, a);
        }
    }
    let lo = (best.0 - dt).max(t_lo);
    let hi = (best.0 + dt).min(t_hi);
    let (t, f) = golden_max(|t| spec.amplitude(0, n - 1, t).norm(), lo, hi, settings.fine_dt / j)?;
    Ok(if f >= best.1 { (t, f) } else { best })
}

/// Transfer figure and time for one boundary coupling.
pub fn transfer_at(n: usize, j: f64, j0: f64, settings: &OptimizerSettings) -> Result<TransferOptimum> {
    let spec = ChainSpectrum::new(&Chain::with_end_bonds(n, j, j0, j0)?)?;
    let (t_transfer, f_1n) = best_time(&spec, j, settings)?;
    Ok(TransferOptimum {
        n,
        j,
        j0,
        t_transfer,
        f_1n,
    })
}

pub fn optimize_boundary_coupling(n: usize, j: f64) -> Result<TransferOptimum> {
    optimize_boundary_coupling_with(n, j, &OptimizerSettings::default())
}

/// Maximizes `|⟨N|e^{−iHt}|1⟩|` over `J0/J ∈ (0, 1]` and the time window.
pub fn optimize_boundary_coupling_with(n: usize, j: f64, settings: &OptimizerSettings) -> Result<TransferOptimum> {
    const OP: &str = "optimize_boundary_coupling";
    if n < 3 {
        return Err(Error::invalid(OP, format!("N = {n} < 3")));
    }
    if !(j > 0.0) || !j.is_finite() {
        return Err(Error::invalid(OP, format!("J = {j} must be > 0")));
    }
    let score = |ratio: f64| transfer_at(n, j, ratio * j, settings).map(|o| o.f_1n).unwrap_or(f64::NAN);

    let coarse_steps = (1.0 / settings.j0_step).round() as usize;
    let mut best = (0.0, -1.0);
    for s in 1..=coarse_steps {
        let ratio = s as f64 / coarse_steps as f64;
        let f = score(ratio);
        if !f.is_finite() {
            return Err(Error::NoConvergence {
                op: OP,
                msg: format!("transfer figure not finite at J0/J = {ratio}"),
            });
        }
        if f > best.1 {
            best = (ratio, f);
        }
    }
    let lo = (best.0 - settings.j0_step).max(settings.j0_tol);
    let hi = (best.0 + settings.j0_step).min(1.0);
    let ratio = if settings.full_grid {
        let steps = ((hi - lo) / settings.j0_tol).ceil() as usize;
        let mut fine = best;
        for s in 0..=steps {
            let r = (lo + s as f64 * settings.j0_tol).min(hi);
            let f = score(r);
            if f > fine.1 {
                fine = (r, f);
            }
        }
        fine.0
    } else {
        let (r, f) = golden_max(score, lo, hi, settings.j0_tol)?;
        if f >= best.1 {
            r
        } else {
            best.0
        }
    };
    transfer_at(n, j, ratio * j, settings)
}

/// Momentum density `|Σ_x ψ_x e^{−ipx}|²/2π` of the state that started on
/// site 1, sampled at `points` momenta in `(−π, π]`.
pub fn momentum_distribution(chain: &Chain, t: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    if points < 8 {
        return Err(Error::invalid("momentum_distribution", "need at least 8 points"));
    }
    let spec = ChainSpectrum::new(chain)?;
    let psi = spec.evolve_site(0, t);
    Ok((0..points)
        .map(|k| {
            let p = -PI + 2.0 * PI * (k + 1) as f64 / points as f64;
            let phi: Complex64 = psi
                .iter()
                .enumerate()
                .map(|(x, a)| a * Complex64::from_polar(1.0, -p * x as f64))
                .sum();
            (p, phi.norm_sqr() / (2.0 * PI))
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzianFit {
    pub center: f64,
    pub half_width: f64,
    pub peak: f64,
}

/// Fits `A/((p − p0)² + γ²)` to the main peak of a sampled distribution
/// using the points above half maximum; `1/w` is then an exact quadratic.
pub fn fit_lorentzian(samples: &[(f64, f64)]) -> Result<LorentzianFit> {
    const OP: &str = "fit_lorentzian";
    let (imax, &(_, wmax)) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .ok_or_else(|| Error::invalid(OP, "no samples"))?;
    if !(wmax > 0.0) {
        return Err(Error::invalid(OP, "distribution has no peak"));
    }
    let mut lo = imax;
    while lo > 0 && samples[lo - 1].1 >= 0.5 * wmax {
        lo -= 1;
    }
    let mut hi = imax;
    while hi + 1 < samples.len() && samples[hi + 1].1 >= 0.5 * wmax {
        hi += 1;
    }
    // need enough points for a meaningful quadratic
    while hi - lo < 4 {
        lo = lo.saturating_sub(1);
        if hi + 1 < samples.len() {
            hi += 1;
        }
        if lo == 0 && hi + 1 == samples.len() {
            break;
        }
    }
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    let p_ref = samples[imax].0;
    for &(p, w) in &samples[lo..=hi] {
        let x = p - p_ref;
        let row = Vector3::new(x * x, x, 1.0);
        ata += row * row.transpose();
        atb += row * (1.0 / w);
    }
    let sol = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::NoConvergence {
            op: OP,
            msg: "singular normal equations".into(),
        })?;
    let (a, b, c) = (sol[0], sol[1], sol[2]);
    if !(a > 0.0) {
        return Err(Error::NoConvergence {
            op: OP,
            msg: "peak is not Lorentzian-shaped".into(),
        });
    }
    let x0 = -b / (2.0 * a);
    let gamma2 = c / a - x0 * x0;
    Ok(LorentzianFit {
        center: p_ref + x0,
        half_width: gamma2.max(0.0).sqrt(),
        peak: 1.0 / (c - b * b / (4.0 * a)),
    })
}
