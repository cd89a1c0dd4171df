//! Continuum two-body S-matrices of the delta-interaction gas and the spin
//! gate they induce.
//!
//! For relative momentum `p = p_A + p_B` and coupling `c`, the gate acts as
//! a phase `e^{iφ}` on `↑↑`, `↓↓` and mixes `↑↓`, `↓↑` with transmission
//! `t = p/(p+ic)` and exchange `r = ∓ic/(p+ic)` (− bosons, + fermions).
//! Everything depends only on the angle `θ = atan2(c, p)`:
//! `t = cos θ e^{−iθ}`, `r = ∓i sin θ e^{−iθ}`, `e^{iφ_B} = e^{−2iθ}`.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{apply_gate, concurrence, Basis, SpinState, TwoQubitGate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Statistics {
    Boson,
    Fermion,
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "boson" | "b" => Ok(Statistics::Boson),
            "fermion" | "f" => Ok(Statistics::Fermion),
            other => Err(Error::invalid("statistics", format!("unknown statistics '{other}'"))),
        }
    }
}

impl std::fmt::Display for Statistics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        })
    }
}

/// Two particles approaching each other: A moves right with `p_a`, B moves
/// left with `p_b` (both magnitudes), so `p₂ = p_a` and `p₁ = −p_b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringContext {
    pub statistics: Statistics,
    pub p_a: f64,
    pub p_b: f64,
    pub c: f64,
}

impl ScatteringContext {
    pub fn new(statistics: Statistics, p_a: f64, p_b: f64, c: f64) -> Result<Self> {
        let ctx = Self {
            statistics,
            p_a,
            p_b,
            c,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        const OP: &str = "ScatteringContext";
        if !(self.p_a.is_finite() && self.p_b.is_finite() && self.c.is_finite()) {
            return Err(Error::invalid(OP, "non-finite parameter"));
        }
        if self.p_a < 0.0 || self.p_b < 0.0 {
            return Err(Error::invalid(OP, "momentum magnitudes must be >= 0"));
        }
        if self.c < 0.0 {
            return Err(Error::invalid(OP, format!("c = {} < 0", self.c)));
        }
        if self.p_a + self.p_b == 0.0 && self.c == 0.0 {
            return Err(Error::invalid(OP, "p_A + p_B = 0 and c = 0: gate undefined"));
        }
        Ok(())
    }

    /// `p₂ − p₁ = p_A + p_B`.
    pub fn relative_momentum(&self) -> f64 {
        self.p_a + self.p_b
    }

    pub fn p2(&self) -> f64 {
        self.p_a
    }

    pub fn p1(&self) -> f64 {
        -self.p_b
    }
}

/// `S(p₂, p₁) = (p₂ − p₁ − ic)/(p₂ − p₁ + ic)` for `p₂ > p₁`.
pub fn scattering_phase(p2: f64, p1: f64, c: f64) -> Result<Complex64> {
    const OP: &str = "scattering_phase";
    if !(p2 > p1) {
        return Err(Error::invalid(OP, format!("ordering violated: p2 = {p2} <= p1 = {p1}")));
    }
    if c < 0.0 || !c.is_finite() {
        return Err(Error::invalid(OP, format!("c = {c} must be finite and >= 0")));
    }
    let d = p2 - p1;
    Ok(Complex64::new(d, -c) / Complex64::new(d, c))
}

/// Gate for relative momentum `p_sum` and coupling `c`; shared by the
/// continuum and lattice paths.
pub(crate) fn gate_from_relative(statistics: Statistics, p_sum: f64, c: f64) -> TwoQubitGate {
    let theta = c.atan2(p_sum);
    let (s, co) = theta.sin_cos();
    let rot = Complex64::from_polar(1.0, -theta);
    let t = rot * co;
    let i = Complex64::new(0.0, 1.0);
    let (r, diag) = match statistics {
        Statistics::Boson => (-i * rot * s, rot * rot),
        Statistics::Fermion => (i * rot * s, Complex64::new(1.0, 0.0)),
    };
    let mut m = Matrix4::zeros();
    m[(0, 0)] = diag;
    m[(3, 3)] = diag;
    m[(1, 1)] = t;
    m[(2, 2)] = t;
    m[(2, 1)] = r;
    m[(1, 2)] = r;
    TwoQubitGate::from_matrix(m)
}

pub fn build_gate(ctx: &ScatteringContext) -> Result<TwoQubitGate> {
    ctx.validate()?;
    Ok(gate_from_relative(ctx.statistics, ctx.relative_momentum(), ctx.c))
}

/// Concurrence of the gate output for the `|↑↓⟩` input.
pub fn output_concurrence(ctx: &ScatteringContext) -> Result<f64> {
    let g = build_gate(ctx)?;
    let out = apply_gate(&g, &SpinState::basis(Basis::UpDown))?;
    Ok(concurrence(&out))
}

/// Closed form `2pc/(p² + c²)` of [`output_concurrence`].
pub fn output_concurrence_closed_form(p_sum: f64, c: f64) -> f64 {
    2.0 * p_sum * c / (p_sum * p_sum + c * c)
}

/// Relative momentum `p_A + p_B` that maximizes the output concurrence.
pub fn optimal_momentum(c: f64) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid("optimal_momentum", format!("c = {c} must be > 0")));
    }
    Ok(c)
}
