//! Gate readout from the end-to-end protocol: particle A starts on site 1,
//! B on site N, and the joint amplitudes are read at the single-particle
//! transfer time `t̃`.
//!
//! `A_N1` (A arrived at N) is the transmitted amplitude and `A_1N` the
//! exchanged one, so `A_1N/A_N1 ≈ −iU/U_opt` and
//! `C_1N = 2|A_1N A_N1*| ≈ f⁴·2(U/U_opt)/((U/U_opt)² + 1)`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;

use super::hamiltonian::{build_hamiltonian, Chain};
use super::propagate::{Evolver, Method};
use super::transfer::{optimize_boundary_coupling, ChainSpectrum, TransferOptimum};
use super::{LatticeSpec, Sector, TwoParticleState};
use crate::error::{Error, Result};
use crate::smatrix::{gate_from_relative, Statistics};
use crate::spin::TwoQubitGate;

#[derive(Clone, Debug, PartialEq)]
pub struct JointAmplitudes {
    pub sector: Sector,
    pub n: usize,
    pub t: f64,
    pub a_11: Complex64,
    pub a_1n: Complex64,
    pub a_n1: Complex64,
    pub a_nn: Complex64,
    /// Row-major `N × N`; `grid[i*N + j]` has A on `i`, B on `j`. For the
    /// identical sector both `(i, j)` and `(j, i)` hold the pair amplitude.
    pub grid: Vec<Complex64>,
}

impl JointAmplitudes {
    pub fn concurrence(&self) -> f64 {
        2.0 * (self.a_1n * self.a_n1.conj()).norm()
    }
}

fn read_out(state: &TwoParticleState, t: f64) -> JointAmplitudes {
    let n = state.n;
    let mut grid = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            grid.push(state.amplitude(i, j));
        }
    }
    JointAmplitudes {
        sector: state.sector,
        n,
        t,
        a_11: state.amplitude(0, 0),
        a_1n: state.amplitude(0, n - 1),
        a_n1: state.amplitude(n - 1, 0),
        a_nn: state.amplitude(n - 1, n - 1),
        grid,
    }
}

/// Evolves the end-to-end initial state for time `t` and reads the joint
/// amplitudes.
pub fn joint_amplitudes(spec: &LatticeSpec, sector: Sector, t: f64) -> Result<JointAmplitudes> {
    let ev = Evolver::new(build_hamiltonian(spec, sector)?, Method::Auto)?;
    let init = TwoParticleState::ends(sector, spec.n)?;
    let amplitudes = ev.evolve(&init.amplitudes, t)?;
    let state = TwoParticleState {
        sector,
        n: spec.n,
        amplitudes,
    };
    Ok(read_out(&state, t))
}

/// `2|A_1N A_N1*|` for the distinguishable sector at time `t`.
pub fn boundary_concurrence_at(spec: &LatticeSpec, t: f64) -> Result<f64> {
    Ok(joint_amplitudes(spec, Sector::Distinguishable, t)?.concurrence())
}

/// `C_1N` at the optimized boundary coupling and transfer time (`J = 1`),
/// for dimensionless `U = U^{↑↓}/(2J)`.
pub fn boundary_concurrence(n: usize, u: f64) -> Result<f64> {
    let opt = optimize_boundary_coupling(n, 1.0)?;
    let spec = LatticeSpec::from_dimensionless(n, 1.0, opt.j0, u)?;
    boundary_concurrence_at(&spec, opt.t_transfer)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    /// `U^{↑↓}/(2J)`.
    pub u: f64,
    pub a_1n: Complex64,
    pub a_n1: Complex64,
    pub a_11: Complex64,
    pub c_1n: f64,
}

impl SweepRow {
    /// `A_1N / A_N1`.
    pub fn ratio(&self) -> Complex64 {
        self.a_1n / self.a_n1
    }
}

/// `C_1N(U)` at a fixed protocol point. Points run in parallel on the current
/// rayon pool; the output keeps the input order.
pub fn sweep_concurrence(opt: &TransferOptimum, u_grid: &[f64]) -> Result<Vec<SweepRow>> {
    u_grid
        .par_iter()
        .map(|&u| {
            let spec = LatticeSpec::from_dimensionless(opt.n, opt.j, opt.j0, u)?;
            let amps = joint_amplitudes(&spec, Sector::Distinguishable, opt.t_transfer)?;
            Ok(SweepRow {
                u,
                a_1n: amps.a_1n,
                a_n1: amps.a_n1,
                a_11: amps.a_11,
                c_1n: amps.concurrence(),
            })
        })
        .collect()
}

/// `f⁴·2x/(x² + 1)` with `x = U/U_opt`.
pub fn concurrence_model(u: f64, u_opt: f64, f: f64) -> f64 {
    let x = u / u_opt;
    f.powi(4) * 2.0 * x / (x * x + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UOptSettings {
    pub coarse: (f64, f64, f64),
    pub fine_step: f64,
    /// Small-U points for the slope estimate of `|A_1N/A_N1|`.
    pub slope_points: [f64; 3],
    /// Allowed disagreement between the argmax and slope estimates.
    pub agreement_tol: f64,
}

impl Default for UOptSettings {
    fn default() -> Self {
        Self {
            coarse: (0.3, 1.7, 0.05),
            fine_step: 0.005,
            slope_points: [0.01, 0.02, 0.03],
            agreement_tol: 0.03,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferResult {
    pub n: usize,
    pub j0: f64,
    pub t_transfer: f64,
    pub f_1n: f64,
    /// `U_opt` from the maximum of `C_1N(U)`.
    pub u_opt: f64,
    /// `U_opt` from the small-`U` slope of `|A_1N/A_N1|`.
    pub u_opt_slope: f64,
    pub a_1n: Complex64,
    pub a_n1: Complex64,
    pub a_11: Complex64,
    /// `2|A_1N A_N1*|` at `u_opt`.
    pub c_1n: f64,
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

pub fn extract_u_opt(n: usize) -> Result<TransferResult> {
    let opt = optimize_boundary_coupling(n, 1.0)?;
    extract_u_opt_with(&opt, &UOptSettings::default())
}

/// Locates the maximum of `C_1N(U)` on a coarse then fine grid with a final
/// parabolic step, and cross-checks it against the slope of `|A_1N/A_N1|`.
pub fn extract_u_opt_with(opt: &TransferOptimum, settings: &UOptSettings) -> Result<TransferResult> {
    const OP: &str = "extract_u_opt";
    let argmax = |rows: &[SweepRow]| {
        rows.iter()
            .enumerate()
            .max_by(|a, b| a.1.c_1n.total_cmp(&b.1.c_1n))
            .map(|(k, _)| k)
            .expect("non-empty grid")
    };
    let (lo, hi, step) = settings.coarse;
    let coarse = sweep_concurrence(opt, &grid(lo, hi, step))?;
    let k = argmax(&coarse);
    if k == 0 || k + 1 == coarse.len() {
        return Err(Error::NoConvergence {
            op: OP,
            msg: format!("C_1N maximum at the edge of the U window (U = {})", coarse[k].u),
        });
    }
    let centre = coarse[k].u;
    let fine = sweep_concurrence(opt, &grid(centre - step, centre + step, settings.fine_step))?;
    let k = argmax(&fine);
    let mut u_opt = fine[k].u;
    if k > 0 && k + 1 < fine.len() {
        let (y0, y1, y2) = (fine[k - 1].c_1n, fine[k].c_1n, fine[k + 1].c_1n);
        let denom = y0 - 2.0 * y1 + y2;
        if denom < 0.0 {
            u_opt += 0.5 * settings.fine_step * (y0 - y2) / denom;
        }
    }
    let at_opt = sweep_concurrence(opt, &[u_opt])?[0];

    let slope_rows = sweep_concurrence(opt, &settings.slope_points)?;
    // least squares through the origin: |ratio| = U / U_opt
    let (sxy, sxx) = slope_rows
        .iter()
        .fold((0.0, 0.0), |(sxy, sxx), r| (sxy + r.u * r.ratio().norm(), sxx + r.u * r.u));
    let u_opt_slope = sxx / sxy;
    if (u_opt - u_opt_slope).abs() > settings.agreement_tol {
        return Err(Error::ToleranceBreach {
            op: OP,
            msg: format!("argmax U_opt = {u_opt:.4} vs slope U_opt = {u_opt_slope:.4}"),
        });
    }
    Ok(TransferResult {
        n: opt.n,
        j0: opt.j0,
        t_transfer: opt.t_transfer,
        f_1n: opt.f_1n,
        u_opt,
        u_opt_slope,
        a_1n: at_opt.a_1n,
        a_n1: at_opt.a_n1,
        a_11: at_opt.a_11,
        c_1n: at_opt.c_1n,
    })
}

/// Largest `|C_1N(U) − C_max·2x/(x²+1)|` over `x = U/U_opt ∈ [0.2, 2]`
/// sampled at `points` values; `f⁴` is identified with `C_max`.
pub fn model_fit_residual(opt: &TransferOptimum, u_opt: f64, c_max: f64, points: usize) -> Result<f64> {
    let xs: Vec<f64> = (0..points)
        .map(|k| 0.2 + 1.8 * k as f64 / (points.max(2) - 1) as f64)
        .collect();
    let us: Vec<f64> = xs.iter().map(|x| x * u_opt).collect();
    let rows = sweep_concurrence(opt, &us)?;
    let f = c_max.powf(0.25);
    Ok(rows
        .iter()
        .map(|r| (r.c_1n - concurrence_model(r.u, u_opt, f)).abs())
        .fold(0.0, f64::max))
}

/// Continuum gate with `p_j → sin p_j` and `c → U^{↑↓}/J`.
pub fn lattice_smatrix(p1: f64, p2: f64, u_ratio: f64, statistics: Statistics) -> Result<TwoQubitGate> {
    const OP: &str = "lattice_smatrix";
    if !(u_ratio >= 0.0) || !u_ratio.is_finite() {
        return Err(Error::invalid(OP, format!("U/J = {u_ratio} must be >= 0")));
    }
    let rel = p2.sin() - p1.sin();
    if !(rel > 0.0) {
        return Err(Error::invalid(OP, format!("sin p2 - sin p1 = {rel} must be > 0")));
    }
    Ok(gate_from_relative(statistics, rel, u_ratio))
}

/// Two Gaussian packets launched towards each other on a uniform chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionSetup {
    pub n: usize,
    pub j: f64,
    /// `U^{↑↓}/(2J)`.
    pub u: f64,
    /// Position standard deviation of each packet, in sites.
    pub sigma: f64,
}

impl Default for CollisionSetup {
    fn default() -> Self {
        Self {
            n: 101,
            j: 1.0,
            u: 0.5,
            sigma: 5.0,
        }
    }
}

fn gaussian_packet(n: usize, centre: f64, sigma: f64, p: f64) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|x| {
            let d = x as f64 - centre;
            Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), p * x as f64)
        })
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
    v
}

/// Exchange/transmission ratio `r/t` after a head-on collision at
/// `|p| = π/2`.
///
/// Packets start at a quarter and three quarters of the chain and are read
/// out once each has covered half of it. `t` is the overlap with the free
/// (product) evolution on the A-right-of-B half, `r` the overlap with the
/// spin-swapped free evolution on the other half.
pub fn collision_ratio(setup: &CollisionSetup) -> Result<Complex64> {
    const OP: &str = "collision_ratio";
    let n = setup.n;
    if n < 20 || setup.sigma <= 0.0 || 8.0 * setup.sigma > (n as f64) / 2.0 {
        return Err(Error::invalid(OP, "chain too short for the packet width"));
    }
    let quarter = (n - 1) as f64 / 4.0;
    // E = J cos p, so p = −π/2 moves right
    let phi_a = gaussian_packet(n, quarter, setup.sigma, -FRAC_PI_2);
    let phi_b = gaussian_packet(n, 3.0 * quarter, setup.sigma, FRAC_PI_2);
    let t = 2.0 * quarter / setup.j;

    let spec = LatticeSpec::from_dimensionless(n, setup.j, setup.j, setup.u)?;
    let ev = Evolver::new(build_hamiltonian(&spec, Sector::Distinguishable)?, Method::Chebyshev)?;
    let init = TwoParticleState::product(&phi_a, &phi_b)?;
    let psi = ev.evolve(&init.amplitudes, t)?;

    let free = ChainSpectrum::new(&Chain::with_end_bonds(n, setup.j, setup.j, setup.j)?)?;
    let fa = free.evolve(&phi_a, t);
    let fb = free.evolve(&phi_b, t);

    let mut trans = Complex64::default();
    let mut exch = Complex64::default();
    for i in 0..n {
        for j in 0..n {
            let amp = psi[i * n + j];
            if i > j {
                trans += (fa[i] * fb[j]).conj() * amp;
            } else if i < j {
                exch += (fa[j] * fb[i]).conj() * amp;
            }
        }
    }
    if trans.norm() < 1e-6 {
        return Err(Error::NoConvergence {
            op: OP,
            msg: "no transmitted weight".into(),
        });
    }
    Ok(exch / trans)
}
