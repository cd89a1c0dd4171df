use proptest::prelude::*;
use scatgate::atomphys::{
    cic_corrected_momentum, cic_fixed_point, coupling_from_3d, coupling_from_3d_in, design_lattice_depth,
    design_lattice_depth_in, lattice_params, lattice_params_in, launch_spread, AtomParams, Constants, LaunchSpec,
    Species, PLANCK_H, ZETA_3_2,
};
use scatgate::wavepacket::{analytic_concurrence, WavepacketSpec};
use scatgate::Error;

/// Same physical system with numbers expressed in rescaled units.
fn rescale(p: &AtomParams, l: f64, t: f64, m: f64) -> AtomParams {
    let energy = m * l * l / (t * t);
    AtomParams {
        mass: p.mass * m,
        a3d: p.a3d * l,
        omega_perp: p.omega_perp / t,
        omega_z: p.omega_z.map(|w| w / t),
        lambda: p.lambda.map(|x| x * l),
        g: p.g.map(|g| g * energy * l),
        v0_over_er: p.v0_over_er,
    }
}

#[test]
fn rb87_coupling_is_order_one_per_micron() {
    let c = coupling_from_3d(&AtomParams::rb87()).unwrap();
    assert!((2e5..=5e6).contains(&c), "c = {c}");
}

#[test]
fn born_limit() {
    let mut p = AtomParams::rb87();
    p.a3d = 1e-15;
    let a_perp = p.a_perp();
    let c = coupling_from_3d(&p).unwrap();
    assert!((c * a_perp * a_perp / (2.0 * p.a3d) - 1.0).abs() < 1e-6);
}

#[test]
fn coupling_is_linear_for_small_scattering_length() {
    let mut p = AtomParams::rb87();
    p.a3d = 1e-14;
    let c1 = coupling_from_3d(&p).unwrap();
    p.a3d = 2e-14;
    let c2 = coupling_from_3d(&p).unwrap();
    assert!((c2 / c1 - 2.0).abs() < 1e-6);
}

#[test]
fn resonance_is_reported() {
    let mut p = AtomParams::rb87();
    p.a3d = 0.65 * p.a_perp();
    assert!(matches!(coupling_from_3d(&p), Err(Error::Resonance { .. })));
}

#[test]
fn unit_audit_is_exact_for_binary_rescaling() {
    let p = AtomParams::rb87().with_lambda(1064e-9).with_depth(3.0);
    let (l, t, m) = (2f64.powi(20), 2f64.powi(-7), 2f64.powi(80));
    let q = rescale(&p, l, t, m);
    let k = Constants::SI.rescaled(l, t, m);
    let energy = m * l * l / (t * t);

    assert_eq!(coupling_from_3d_in(&q, &k).unwrap(), coupling_from_3d(&p).unwrap() / l);
    let a = lattice_params(&p).unwrap();
    let b = lattice_params_in(&q, &k).unwrap();
    assert_eq!(b.j, a.j * energy);
    assert_eq!(b.e_r, a.e_r * energy);
    assert_eq!(b.u_updown(), a.u_updown() * energy);
    let da = design_lattice_depth(&p).unwrap();
    let db = design_lattice_depth_in(&q, &k).unwrap();
    assert_eq!(db.v0_over_er, da.v0_over_er);
    assert_eq!(db.j, da.j * energy);
}

proptest! {
    #[test]
    fn unit_audit_is_covariant(l in 1e-3f64..1e3, t in 1e-3f64..1e3, m in 1e-3f64..1e30) {
        let p = AtomParams::rb87().with_lambda(830e-9).with_depth(2.2);
        let q = rescale(&p, l, t, m);
        let k = Constants::SI.rescaled(l, t, m);
        let energy = m * l * l / (t * t);
        let c = coupling_from_3d_in(&q, &k).unwrap() * l;
        prop_assert!((c / coupling_from_3d(&p).unwrap() - 1.0).abs() < 1e-13);
        let a = lattice_params(&p).unwrap();
        let b = lattice_params_in(&q, &k).unwrap();
        prop_assert!((b.j / (a.j * energy) - 1.0).abs() < 1e-13);
        prop_assert!((b.u_updown() / (a.u_updown() * energy) - 1.0).abs() < 1e-13);
        let v = design_lattice_depth_in(&q, &k).unwrap().v0_over_er;
        prop_assert!((v - design_lattice_depth(&p).unwrap().v0_over_er).abs() < 1e-12);
    }

    #[test]
    fn cic_fixed_point_matches_quadratic(c in 1.0f64..1e3, frac in 0.0f64..0.45) {
        // κ chosen so the shift at p = c is frac·c
        let kappa = frac * 16.0 / (c * c * c);
        let k = kappa * c * c / 16.0;
        let exact = if k == 0.0 { c } else { (-1.0 + (1.0 + 4.0 * k * c).sqrt()) / (2.0 * k) };
        let p = cic_fixed_point(c, kappa).unwrap();
        prop_assert!((p - exact).abs() <= 1e-10 * exact);
    }
}

#[test]
fn cic_without_correction_is_identity() {
    assert_eq!(cic_fixed_point(1.5e6, 0.0).unwrap(), 1.5e6);
}

#[test]
fn cic_reduces_rb87_momentum() {
    let p = AtomParams::rb87();
    let c = coupling_from_3d(&p).unwrap();
    let p_star = cic_corrected_momentum(c, &p).unwrap();
    assert!(p_star < c && p_star > 0.5 * c);
    let k = ZETA_3_2 * p.a_perp().powi(3) * c * c / 16.0;
    let exact = (-1.0 + (1.0 + 4.0 * k * c).sqrt()) / (2.0 * k);
    assert!((p_star / exact - 1.0).abs() < 1e-10);
}

#[test]
fn cic_rejects_strong_correction() {
    let c = 10.0;
    assert!(matches!(cic_fixed_point(c, 0.6 * 16.0 / c.powi(3)), Err(Error::OutOfRange { .. })));
    assert!(cic_fixed_point(-1.0, 0.0).is_err());
}

#[test]
fn hopping_at_reference_depth() {
    let lp = lattice_params(&AtomParams::rb87().with_lambda(1064e-9).with_depth(2.2)).unwrap();
    assert!((lp.j / lp.e_r - 0.2099).abs() < 1e-4);
    assert_eq!(lp.u[0][1], lp.u[1][0]);
}

#[test]
fn interaction_is_linear_in_g() {
    let p = AtomParams::rb87().with_lambda(1064e-9).with_depth(3.0);
    let mut q = p;
    q.g = p.g.map(|g| 2.0 * g);
    let (a, b) = (lattice_params(&p).unwrap(), lattice_params(&q).unwrap());
    assert_eq!(b.u, a.u.map(|row| row.map(|u| 2.0 * u)));
    assert_eq!(a.j, b.j);
    assert!(lattice_params(&AtomParams::rb87().with_lambda(1064e-9)).is_err());
    let mut bad = p;
    bad.v0_over_er = Some(0.0);
    assert!(lattice_params(&bad).is_err());
}

#[test]
fn design_depth_in_band() {
    for lambda in [830e-9, 1064e-9] {
        let p = AtomParams::rb87().with_lambda(lambda);
        let d = design_lattice_depth(&p).unwrap();
        assert!((1.5..=6.0).contains(&d.v0_over_er), "{lambda}: V = {}", d.v0_over_er);
        assert!((100.0..=800.0).contains(&d.j_over_h()), "{lambda}: J/h = {}", d.j_over_h());
        let check = lattice_params(&p.with_depth(d.v0_over_er)).unwrap();
        assert!((check.dimensionless_u() - 1.0).abs() < 1e-8);
        assert!((check.j / PLANCK_H - d.j_over_h()).abs() < 1e-9 * d.j_over_h());
    }
}

#[test]
fn design_ratio_is_monotone() {
    let p = AtomParams::rb87().with_lambda(1064e-9);
    let mut last = 0.0;
    for k in 0..=190 {
        let v = 1.0 + 0.1 * k as f64;
        let r = lattice_params(&p.with_depth(v)).unwrap().dimensionless_u();
        assert!(r > last);
        last = r;
    }
}

#[test]
fn stronger_coupling_needs_shallower_lattice() {
    let p = AtomParams::rb87().with_lambda(1064e-9);
    let mut q = p;
    q.g[1] *= 2.0;
    assert!(design_lattice_depth(&q).unwrap().v0_over_er < design_lattice_depth(&p).unwrap().v0_over_er);
}

#[test]
fn design_without_root_fails() {
    let mut p = AtomParams::rb87().with_lambda(1064e-9);
    p.g[1] *= 1e-6;
    assert!(matches!(design_lattice_depth(&p), Err(Error::NoRoot { .. })));
}

#[test]
fn launch_spread_feeds_wavepacket() {
    assert_eq!(launch_spread(&LaunchSpec::new(1e-5, 0.0).unwrap()), 0.0);
    let eta = launch_spread(&LaunchSpec::new(2e-5, 1e-6).unwrap());
    assert!((eta - 0.05).abs() < 1e-15);
    let c = analytic_concurrence(&WavepacketSpec::new(0.0, eta).unwrap()).unwrap();
    assert!(c >= 0.99);
    assert!(LaunchSpec::new(0.0, 1e-6).is_err());
    assert!(LaunchSpec::new(1e-5, -1e-6).is_err());
}

#[test]
fn species_preset_defaults() {
    let s = Species::rb87();
    assert_eq!(s.g, [1.14e-37, 1.12e-37, 1.09e-37]);
    assert_eq!(AtomParams::new(&s, 1e5).unwrap(), AtomParams::rb87());
    assert!(AtomParams::new(&s, -1.0).is_err());
}
