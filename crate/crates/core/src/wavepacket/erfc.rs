//! `f(z) = √π e^{z²} erfc(z)` on the right half-plane.
//!
//! Two branches:
//! * Maclaurin series of `erf` for `|z| < 2`, and for `Re z < 1, |z| < 6`
//!   where the terms grow like `e^{|z|²}` but `|erfc(z)|` grows with them;
//! * the Laplace continued fraction `1/(z + ½/(z + 1/(z + 3/2/(z + …))))`
//!   elsewhere, evaluated with the modified Lentz algorithm.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;
const SERIES_RADIUS: f64 = 2.0;
const STRIP_RE: f64 = 1.0;
const STRIP_RADIUS: f64 = 6.0;
const CF_MAX_TERMS: usize = 20_000;

/// Scaled complementary error function for `Re z >= 0`.
pub fn scaled_erfc(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("scaled_erfc", "non-finite argument"));
    }
    if z.re < 0.0 {
        return Err(Error::invalid(
            "scaled_erfc",
            format!("Re z = {} < 0 is outside the validated domain", z.re),
        ));
    }
    let r = z.norm();
    if r < SERIES_RADIUS || (z.re < STRIP_RE && r < STRIP_RADIUS) {
        Ok(series(z))
    } else {
        continued_fraction(z)
    }
}

fn series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    // erf(z) = 2/√π Σ (−1)^n z^{2n+1} / (n! (2n+1))
    let mut term = z; // (−1)^n z^{2n+1} / n!
    let mut sum = z;
    let mut n = 0usize;
    loop {
        n += 1;
        term = -term * z2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() && n > 4 {
            break;
        }
    }
    let erf = sum * (2.0 / PI.sqrt());
    (Complex64::new(1.0, 0.0) - erf) * z2.exp() * SQRT_PI
}

fn continued_fraction(z: Complex64) -> Result<Complex64> {
    // g = z + a1/(z + a2/(z + ...)), a_n = n/2; f = 1/g
    let tiny = Complex64::new(1e-300, 0.0);
    let mut g = if z.norm() == 0.0 { tiny } else { z };
    let mut c = g;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..CF_MAX_TERMS {
        let a = n as f64 * 0.5;
        d = z + d * a;
        if d.norm() == 0.0 {
            d = tiny;
        }
        c = z + c.inv() * a;
        if c.norm() == 0.0 {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        g *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            return Ok(g.inv());
        }
    }
    Err(Error::NoConvergence {
        op: "scaled_erfc",
        msg: format!("continued fraction at z = {z}"),
    })
}
