//! Physical-unit parameter design: 3D scattering data to the 1D coupling `c`,
//! the confinement-induced shift of the optimal momentum, optical-lattice
//! `U`/`J`, and launch-spread estimates.
//!
//! Everything is SI. Each operation has an `_in` variant taking the constants
//! explicitly so outputs can be audited under a change of units.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const PLANCK_H: f64 = 6.626_070_15e-34;
pub const RB87_MASS: f64 = 1.443_16e-25;
/// Constant in the confinement-induced resonance denominator.
pub const C_OLSHANII: f64 = 1.4603;
/// `ζ(3/2)`.
pub const ZETA_3_2: f64 = 2.612_375;
/// Smallest allowed `1 − C·a/a_⊥` before the coupling is declared resonant.
pub const RESONANCE_MIN: f64 = 0.1;
/// Depth bracket for [`design_lattice_depth`], in units of `E_R`.
pub const DEPTH_BRACKET: (f64, f64) = (1.0, 20.0);

/// `ħ` and `h` in whatever unit system the inputs use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub h: f64,
}

impl Constants {
    pub const SI: Constants = Constants { hbar: HBAR, h: PLANCK_H };

    /// Constants after `m → m·length`, `s → s·time`, `kg → kg·mass`.
    pub fn rescaled(&self, length: f64, time: f64, mass: f64) -> Self {
        let f = mass * length * length / time;
        Self {
            hbar: self.hbar * f,
            h: self.h * f,
        }
    }
}

/// How a quoted transverse trap frequency is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FrequencyConvention {
    /// The number is `ω_⊥` in rad/s.
    #[default]
    Angular,
    /// The number is `ν_⊥` in Hz and `ω_⊥ = 2πν_⊥`.
    Cyclic,
}

impl FrequencyConvention {
    pub fn to_angular(self, value: f64) -> f64 {
        match self {
            Self::Angular => value,
            Self::Cyclic => 2.0 * PI * value,
        }
    }
}

impl FromStr for FrequencyConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "angular" => Ok(Self::Angular),
            "cyclic" => Ok(Self::Cyclic),
            other => Err(Error::invalid(
                "FrequencyConvention",
                format!("unknown convention {other:?} (expected angular or cyclic)"),
            )),
        }
    }
}

/// Species data: mass, 3D scattering length and 1D couplings
/// `(g_↑↑, g_↑↓, g_↓↓)` in J·m.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Species {
    pub mass: f64,
    pub a3d: f64,
    pub g: [f64; 3],
}

impl Species {
    pub fn rb87() -> Self {
        Self {
            mass: RB87_MASS,
            a3d: 50e-10,
            g: [1.14e-37, 1.12e-37, 1.09e-37],
        }
    }

    /// Parses a flat `key = value` file with keys `mass_kg`, `a3d_m`,
    /// `g_uu_Jm`, `g_ud_Jm`, `g_dd_Jm`. Blank lines and `#` comments are
    /// skipped; every key is required and unknown keys are rejected.
    pub fn parse_preset(text: &str) -> Result<Self> {
        const OP: &str = "species preset";
        const KEYS: [&str; 5] = ["mass_kg", "a3d_m", "g_uu_Jm", "g_ud_Jm", "g_dd_Jm"];
        let mut vals = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(OP, format!("line {}: expected key = value", lineno + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::invalid(OP, format!("line {}: unknown key {k:?}", lineno + 1)));
            }
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::invalid(OP, format!("line {}: bad number {:?}", lineno + 1, v.trim())))?;
            if vals.insert(k, v).is_some() {
                return Err(Error::invalid(OP, format!("line {}: duplicate key {k:?}", lineno + 1)));
            }
        }
        let get = |k: &str| vals.get(k).copied().ok_or_else(|| Error::invalid(OP, format!("missing key {k:?}")));
        let s = Self {
            mass: get("mass_kg")?,
            a3d: get("a3d_m")?,
            g: [get("g_uu_Jm")?, get("g_ud_Jm")?, get("g_dd_Jm")?],
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        positive("Species", "mass", self.mass)?;
        positive("Species", "a3d", self.a3d)?;
        for g in self.g {
            positive("Species", "g", g)?;
        }
        Ok(())
    }
}

fn positive(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(op, format!("{name} = {v} must be positive")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomParams {
    /// Mass `μ` entering the kinetic energy (kg).
    pub mass: f64,
    pub a3d: f64,
    /// Transverse trap angular frequency (rad/s).
    pub omega_perp: f64,
    pub omega_z: Option<f64>,
    /// Lattice laser wavelength (m).
    pub lambda: Option<f64>,
    /// `(g_↑↑, g_↑↓, g_↓↓)` in J·m.
    pub g: [f64; 3],
    pub v0_over_er: Option<f64>,
}

impl AtomParams {
    pub fn new(species: &Species, omega_perp: f64) -> Result<Self> {
        let p = Self {
            mass: species.mass,
            a3d: species.a3d,
            omega_perp,
            omega_z: None,
            lambda: None,
            g: species.g,
            v0_over_er: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Rb-87 in a `100 kHz` transverse trap read as `ω_⊥ = 10⁵ rad/s`.
    pub fn rb87() -> Self {
        Self::new(&Species::rb87(), 1e5).expect("preset is valid")
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_depth(mut self, v0_over_er: f64) -> Self {
        self.v0_over_er = Some(v0_over_er);
        self
    }

    pub fn with_omega_z(mut self, omega_z: f64) -> Self {
        self.omega_z = Some(omega_z);
        self
    }

    pub fn validate(&self) -> Result<()> {
        const OP: &str = "AtomParams";
        positive(OP, "mass", self.mass)?;
        positive(OP, "a3d", self.a3d)?;
        positive(OP, "omega_perp", self.omega_perp)?;
        for g in self.g {
            positive(OP, "g", g)?;
        }
        if let Some(wz) = self.omega_z {
            positive(OP, "omega_z", wz)?;
            if wz >= self.omega_perp {
                return Err(Error::invalid(OP, "omega_z must be below omega_perp"));
            }
        }
        if let Some(l) = self.lambda {
            positive(OP, "lambda", l)?;
        }
        if let Some(v) = self.v0_over_er {
            positive(OP, "V0/E_R", v)?;
        }
        Ok(())
    }

    /// `a_⊥ = √(ħ/(μω_⊥))`.
    pub fn a_perp_in(&self, k: &Constants) -> f64 {
        (k.hbar / (self.mass * self.omega_perp)).sqrt()
    }

    pub fn a_perp(&self) -> f64 {
        self.a_perp_in(&Constants::SI)
    }

    fn lambda_required(&self, op: &'static str) -> Result<f64> {
        self.lambda.ok_or_else(|| Error::invalid(op, "lattice wavelength not supplied"))
    }
}

/// `c = μ g_1D/ħ² = 2a/(a_⊥²(1 − C a/a_⊥))`.
pub fn coupling_from_3d(params: &AtomParams) -> Result<f64> {
    coupling_from_3d_in(params, &Constants::SI)
}

pub fn coupling_from_3d_in(params: &AtomParams, k: &Constants) -> Result<f64> {
    const OP: &str = "coupling_from_3d";
    params.validate()?;
    let a_perp = params.a_perp_in(k);
    let denominator = 1.0 - C_OLSHANII * params.a3d / a_perp;
    if denominator < RESONANCE_MIN {
        return Err(Error::Resonance { op: OP, denominator });
    }
    Ok(2.0 * params.a3d / (a_perp * a_perp * denominator))
}

/// Solves `p = c − κ(cp/4)²` (with `κ = ζ(3/2)a_⊥³`) by damped iteration from
/// `p = c`.
pub fn cic_fixed_point(c: f64, kappa: f64) -> Result<f64> {
    const OP: &str = "cic_corrected_momentum";
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid(OP, format!("c = {c} must be positive")));
    }
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::invalid(OP, format!("prefactor {kappa} must be >= 0")));
    }
    let shift = |p: f64| kappa * (c * p / 4.0).powi(2);
    if shift(c) >= 0.5 * c {
        return Err(Error::OutOfRange { op: OP, value: shift(c) / c });
    }
    let mut p = c;
    for _ in 0..10_000 {
        let next = 0.5 * p + 0.5 * (c - shift(p));
        let done = (next - p).abs() <= 1e-13 * next.abs();
        p = next;
        if done {
            return Ok(p);
        }
    }
    Err(Error::NoConvergence {
        op: OP,
        msg: "fixed-point iteration did not settle".into(),
    })
}

/// Optimal `p_{A+B}` after the confinement-induced correction to `c`.
pub fn cic_corrected_momentum(c: f64, params: &AtomParams) -> Result<f64> {
    cic_corrected_momentum_in(c, params, &Constants::SI)
}

pub fn cic_corrected_momentum_in(c: f64, params: &AtomParams, k: &Constants) -> Result<f64> {
    params.validate()?;
    cic_fixed_point(c, ZETA_3_2 * params.a_perp_in(k).powi(3))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeParams {
    /// `U^{αβ}` (J) in the order `[[↑↑, ↑↓], [↓↑, ↓↓]]`.
    pub u: [[f64; 2]; 2],
    pub j: f64,
    pub e_r: f64,
}

impl LatticeParams {
    pub fn u_updown(&self) -> f64 {
        self.u[0][1]
    }

    /// `U^{↑↓}/(2J)`.
    pub fn dimensionless_u(&self) -> f64 {
        self.u_updown() / (2.0 * self.j)
    }
}

fn lattice_at(params: &AtomParams, lambda: f64, v: f64, k: &Constants) -> LatticeParams {
    let kl = 2.0 * PI / lambda;
    let e_r = k.hbar * k.hbar * kl * kl / (2.0 * params.mass);
    let u = |g: f64| (2.0 * PI).sqrt() * (g / lambda) * v.powf(0.25);
    let [uu, ud, dd] = params.g.map(u);
    let j = 4.0 / PI.sqrt() * e_r * v.powf(0.75) * (-2.0 * v.sqrt()).exp();
    LatticeParams {
        u: [[uu, ud], [ud, dd]],
        j,
        e_r,
    }
}

/// `E_R = ħ²k²/(2μ)`, `U^{αβ} = √(2π)(g_{αβ}/λ)(V₀/E_R)^{1/4}`,
/// `J = (4/√π)E_R(V₀/E_R)^{3/4}e^{−2√(V₀/E_R)}`. The closed forms assume a
/// deep lattice; depths below one recoil are accepted but unreliable.
pub fn lattice_params(params: &AtomParams) -> Result<LatticeParams> {
    lattice_params_in(params, &Constants::SI)
}

pub fn lattice_params_in(params: &AtomParams, k: &Constants) -> Result<LatticeParams> {
    const OP: &str = "lattice_params";
    params.validate()?;
    let lambda = params.lambda_required(OP)?;
    let v = params
        .v0_over_er
        .ok_or_else(|| Error::invalid(OP, "lattice depth V0/E_R not supplied"))?;
    Ok(lattice_at(params, lambda, v, k))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepthDesign {
    pub v0_over_er: f64,
    /// Hopping energy (J).
    pub j: f64,
    pub e_r: f64,
}

impl DepthDesign {
    pub fn j_over_h(&self) -> f64 {
        self.j / PLANCK_H
    }
}

/// Depth where `U^{↑↓}/(2J) = 1`, by bisection over [`DEPTH_BRACKET`].
pub fn design_lattice_depth(params: &AtomParams) -> Result<DepthDesign> {
    design_lattice_depth_in(params, &Constants::SI)
}

pub fn design_lattice_depth_in(params: &AtomParams, k: &Constants) -> Result<DepthDesign> {
    const OP: &str = "design_lattice_depth";
    params.validate()?;
    let lambda = params.lambda_required(OP)?;
    let f = |v: f64| lattice_at(params, lambda, v, k).dimensionless_u() - 1.0;
    let (mut lo, mut hi) = DEPTH_BRACKET;
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::NoRoot { op: OP, lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v = 0.5 * (lo + hi);
    let lp = lattice_at(params, lambda, v, k);
    Ok(DepthDesign {
        v0_over_er: v,
        j: lp.j,
        e_r: lp.e_r,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaunchSpec {
    /// Trap offset, `x_B = −x_A = x0` (m).
    pub x0: f64,
    /// Position uncertainty (m).
    pub dx0: f64,
}

impl LaunchSpec {
    pub fn new(x0: f64, dx0: f64) -> Result<Self> {
        positive("LaunchSpec", "x0", x0)?;
        if !(dx0 >= 0.0) || !dx0.is_finite() {
            return Err(Error::invalid("LaunchSpec", format!("dx0 = {dx0} must be >= 0")));
        }
        Ok(Self { x0, dx0 })
    }
}

/// `η ≈ Δx₀/x₀`.
pub fn launch_spread(launch: &LaunchSpec) -> f64 {
    launch.dx0 / launch.x0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rb87_coupling_order_of_magnitude() {
        let c = coupling_from_3d(&AtomParams::rb87()).unwrap();
        assert!((2e5..=5e6).contains(&c), "{c}");
    }

    #[test]
    fn resonance_detected() {
        let mut p = AtomParams::rb87();
        p.a3d = 0.95 * p.a_perp() / C_OLSHANII;
        assert!(matches!(coupling_from_3d(&p), Err(Error::Resonance { .. })));
    }

    #[test]
    fn hopping_at_reference_depth() {
        let p = AtomParams::rb87().with_lambda(1064e-9).with_depth(2.2);
        let lp = lattice_params(&p).unwrap();
        let expected = 4.0 / PI.sqrt() * 2.2f64.powf(0.75) * (-2.0 * 2.2f64.sqrt()).exp();
        assert!((lp.j / lp.e_r - expected).abs() < 1e-15);
        assert!((lp.j / lp.e_r - 0.2099).abs() < 5e-4);
    }

    #[test]
    fn design_requires_lambda() {
        assert!(design_lattice_depth(&AtomParams::rb87()).is_err());
    }

    #[test]
    fn preset_round_trip() {
        let text = "# Rb-87\nmass_kg = 1.44316e-25\na3d_m = 5e-9\ng_uu_Jm = 1.14e-37\n\
                    g_ud_Jm = 1.12e-37  # inter-species\ng_dd_Jm = 1.09e-37\n";
        assert_eq!(Species::parse_preset(text).unwrap(), Species::rb87());
        assert!(Species::parse_preset("mass_kg = 1\n").is_err());
        assert!(Species::parse_preset(&format!("{text}colour = 3\n")).is_err());
        assert!(Species::parse_preset(&format!("{text}a3d_m = 1e-9\n")).is_err());
        assert!(Species::parse_preset(&text.replace("5e-9", "-5e-9")).is_err());
    }

    #[test]
    fn frequency_conventions() {
        assert_eq!(FrequencyConvention::Angular.to_angular(1e5), 1e5);
        assert!((FrequencyConvention::Cyclic.to_angular(1.0) - 2.0 * PI).abs() < 1e-15);
        assert_eq!("cyclic".parse::<FrequencyConvention>().unwrap(), FrequencyConvention::Cyclic);
        assert!("hz".parse::<FrequencyConvention>().is_err());
    }

    #[test]
    fn omega_z_must_be_smaller() {
        assert!(AtomParams::rb87().with_omega_z(2e5).validate().is_err());
        assert!(AtomParams::rb87().with_omega_z(2e3).validate().is_ok());
    }
}
