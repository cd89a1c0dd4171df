//! Gate concurrence for a Gaussian spread of the relative momentum.
//!
//! The relative momentum `p_A + p_B` is drawn from a Gaussian with mean
//! `c(1+δ)` and **standard deviation** `ηc`. With
//! `z = (1 − i(1+δ))/(√2 η)` the concurrence of the spin state after tracing
//! out momentum is `C = 2 Re[z] Im[f(z)]`, `f(z) = √π e^{z²} erfc(z)`.
//! [`numeric_concurrence`] evaluates the same quantity by direct quadrature
//! and fixes the width convention: reading `ηc` as a variance does not
//! reproduce the closed form.

mod erfc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;

pub use erfc::scaled_erfc;

/// Below this width the analytic formula is replaced by its `η → 0` limit.
pub const ETA_LIMIT: f64 = 1e-8;
/// Tolerated excursion of a concurrence outside `[0, 1]` before it is an error.
pub const RANGE_TOL: f64 = 1e-9;
/// Smallest `|z|` accepted by [`asymptotic_concurrence`].
pub const ASYMPTOTIC_MIN_Z: f64 = 3.0;
/// Absolute tolerance of the quadrature oracle.
pub const QUAD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WavepacketSpec {
    pub delta: f64,
    pub eta: f64,
    pub c: f64,
}

impl WavepacketSpec {
    pub fn new(delta: f64, eta: f64) -> Result<Self> {
        Self::with_coupling(delta, eta, 1.0)
    }

    pub fn with_coupling(delta: f64, eta: f64, c: f64) -> Result<Self> {
        let s = Self { delta, eta, c };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        const OP: &str = "WavepacketSpec";
        if !self.delta.is_finite() {
            return Err(Error::invalid(OP, "delta must be finite"));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::invalid(OP, format!("eta = {} must be > 0", self.eta)));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::invalid(OP, format!("c = {} must be > 0", self.c)));
        }
        Ok(())
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(1.0, -(1.0 + self.delta)) / (std::f64::consts::SQRT_2 * self.eta)
    }

    pub fn mean_momentum(&self) -> f64 {
        self.c * (1.0 + self.delta)
    }

    pub fn width(&self) -> f64 {
        self.eta * self.c
    }
}

fn check_range(op: &'static str, value: f64) -> Result<f64> {
    if !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(&value) || value.is_nan() {
        return Err(Error::OutOfRange { op, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// `C = 2 Re[z] Im[f(z)]`, or `2x/(x²+1)` with `x = 1+δ` once `η <= ETA_LIMIT`.
pub fn analytic_concurrence(spec: &WavepacketSpec) -> Result<f64> {
    spec.validate()?;
    let value = if spec.eta <= ETA_LIMIT {
        let x = 1.0 + spec.delta;
        2.0 * x / (x * x + 1.0)
    } else {
        let z = spec.z();
        2.0 * z.re * scaled_erfc(z)?.im
    };
    check_range("analytic_concurrence", value)
}

/// Same as [`analytic_concurrence`] with `f(z) ≈ (1 − z⁻²/2)/z`.
pub fn asymptotic_concurrence(spec: &WavepacketSpec) -> Result<f64> {
    spec.validate()?;
    let z = spec.z();
    if z.norm() < ASYMPTOTIC_MIN_Z {
        return Err(Error::invalid(
            "asymptotic_concurrence",
            format!("|z| = {} < {ASYMPTOTIC_MIN_Z}", z.norm()),
        ));
    }
    let f = (Complex64::new(1.0, 0.0) - z.powi(-2) * 0.5) / z;
    Ok(2.0 * z.re * f.im)
}

/// `2|∫ w(p) t(p) r̄(p) dp|` over the Gaussian probability density `w` of the
/// relative momentum, with the bosonic amplitudes `t = p/(p+ic)` and
/// `r = −ic/(p+ic)`.
pub fn numeric_concurrence(mean: f64, width: f64, c: f64) -> Result<f64> {
    const OP: &str = "numeric_concurrence";
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::invalid(OP, format!("width = {width} must be > 0")));
    }
    if !(c > 0.0) || !c.is_finite() || !mean.is_finite() {
        return Err(Error::invalid(OP, "c must be > 0 and mean finite"));
    }
    // integrate in units of the width, u = (p − mean)/width
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let ic = Complex64::new(0.0, c);
    let integrand = |u: f64| {
        let p = mean + width * u;
        let den = p + ic;
        let t = p / den;
        let r = -ic / den;
        t * r.conj() * (norm * (-0.5 * u * u).exp())
    };
    const CUT: f64 = 14.0;
    let res = quad::integrate(integrand, -CUT, CUT, QUAD_TOL, 4000).map_err(|e| match e {
        Error::NoConvergence { msg, .. } => Error::NoConvergence { op: OP, msg },
        other => other,
    })?;
    check_range(OP, 2.0 * res.value.norm())
}

/// Oracle counterpart of [`analytic_concurrence`].
pub fn numeric_concurrence_for(spec: &WavepacketSpec) -> Result<f64> {
    numeric_concurrence(spec.mean_momentum(), spec.width(), spec.c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_width_limit() {
        let s = WavepacketSpec::new(0.0, 1e-8).unwrap();
        assert_abs_diff_eq!(analytic_concurrence(&s).unwrap(), 1.0, epsilon = 1e-6);
        // just above the cutoff the full formula still gives 1
        let s = WavepacketSpec::new(0.0, 2e-8).unwrap();
        assert_abs_diff_eq!(analytic_concurrence(&s).unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn decays_with_width() {
        let at = |eta| analytic_concurrence(&WavepacketSpec::new(0.0, eta).unwrap()).unwrap();
        assert!(at(0.1) > at(0.3));
        assert!(at(0.3) > at(0.5));
    }

    #[test]
    fn value_at_eta_0_2_pinned_by_oracle() {
        // frozen from a 30-digit quadrature of the Gaussian average
        let s = WavepacketSpec::new(0.0, 0.2).unwrap();
        let oracle = numeric_concurrence(1.0, 0.2, 1.0).unwrap();
        assert_abs_diff_eq!(oracle, 0.978_933_314_585_525, epsilon = 1e-9);
        assert_abs_diff_eq!(analytic_concurrence(&s).unwrap(), oracle, epsilon = 1e-9);
    }

    #[test]
    fn numeric_narrow_limits() {
        assert_abs_diff_eq!(numeric_concurrence(1.0, 1e-6, 1.0).unwrap(), 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(numeric_concurrence(2.0, 2e-6, 2.0).unwrap(), 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(numeric_concurrence(2.0, 1e-6, 1.0).unwrap(), 0.8, epsilon = 1e-5);
    }

    #[test]
    fn variance_reading_does_not_match() {
        // width = sqrt(ηc) instead of ηc
        let s = WavepacketSpec::new(0.0, 0.2).unwrap();
        let wrong = numeric_concurrence(1.0, 0.2f64.sqrt(), 1.0).unwrap();
        assert!((analytic_concurrence(&s).unwrap() - wrong).abs() > 1e-2);
    }

    #[test]
    fn asymptotic_branch() {
        let s = WavepacketSpec::new(0.0, 0.1).unwrap();
        let a = asymptotic_concurrence(&s).unwrap();
        assert!((a - analytic_concurrence(&s).unwrap()).abs() < 1e-3);
        let lo = asymptotic_concurrence(&WavepacketSpec::new(-0.5, 0.2).unwrap()).unwrap();
        let hi = asymptotic_concurrence(&WavepacketSpec::new(0.5, 0.2).unwrap()).unwrap();
        assert!(hi > lo);
        // leading order: 1 − O(η²)
        for eta in [0.02, 0.04, 0.08] {
            let s = WavepacketSpec::new(0.0, eta).unwrap();
            let deficit = 1.0 - asymptotic_concurrence(&s).unwrap();
            assert!(deficit > 0.0 && deficit < 2.0 * eta * eta, "eta {eta}: {deficit}");
        }
        assert!(asymptotic_concurrence(&WavepacketSpec::new(0.0, 0.5).unwrap()).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(WavepacketSpec::new(0.0, 0.0).is_err());
        assert!(WavepacketSpec::new(0.0, -1.0).is_err());
        assert!(WavepacketSpec::with_coupling(0.0, 0.1, 0.0).is_err());
        assert!(numeric_concurrence(1.0, 0.0, 1.0).is_err());
        assert!(numeric_concurrence(1.0, 0.1, -1.0).is_err());
    }
}
