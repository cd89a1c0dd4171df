//! Single-scenario runners. Each validates its whole parameter block before
//! computing and writes its files only once everything has succeeded.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use scatgate::atomphys::{
    cic_corrected_momentum, coupling_from_3d, design_lattice_depth, launch_spread, AtomParams, FrequencyConvention,
    LaunchSpec, Species, PLANCK_H,
};
use scatgate::lattice::{
    optimize_boundary_coupling_with, sweep_concurrence, transfer_at, ChainSpectrum, Chain, LatticeSpec,
    OptimizerSettings, TransferOptimum,
};
use scatgate::smatrix::{build_gate, output_concurrence, ScatteringContext, Statistics};
use scatgate::spin::Basis;
use scatgate::wavepacket::{analytic_concurrence, numeric_concurrence_for, WavepacketSpec};

use crate::config::{parse_frequency, parse_grid, parse_length, parse_sizes};
use crate::output::{check_writable, emit_plot_data, fmt_num, write_atomic, Cell, ConfigEcho, Table};
use crate::{At, CliError, DesignArgs, GateArgs, SweepArgs, TransferArgs, WavepacketArgs};

fn check_outputs(paths: &[&Option<PathBuf>]) -> Result<(), CliError> {
    for p in paths.iter().copied().flatten() {
        check_writable(p)?;
    }
    Ok(())
}

/// Writes the CSV to `out` (or stdout) together with any extra files.
fn finish(out: &Option<PathBuf>, csv: String, mut extra: Vec<(PathBuf, String)>) -> Result<(), CliError> {
    match out {
        Some(p) => {
            extra.insert(0, (p.clone(), csv));
            write_atomic(&extra)
        }
        None => {
            write_atomic(&extra)?;
            print!("{csv}");
            Ok(())
        }
    }
}

fn complex_cells(z: Complex64) -> [Cell; 2] {
    [z.re.into(), z.im.into()]
}

pub fn gate(a: &GateArgs) -> Result<(), CliError> {
    let statistics: Statistics = a.stats.parse()?;
    let ctx = ScatteringContext::new(statistics, a.p_a, a.p_b, a.c)?;
    check_outputs(&[&a.out])?;

    let point = || format!("pA={} pB={} c={}", a.p_a, a.p_b, a.c);
    let g = build_gate(&ctx).at(point)?;
    let conc = output_concurrence(&ctx).at(point)?;
    println!("gate ({statistics}, pA = {}, pB = {}, c = {}):", fmt_num(a.p_a), fmt_num(a.p_b), fmt_num(a.c));
    println!("{g}");
    println!("output concurrence for |updown>: {}", fmt_num(conc));

    if let Some(out) = &a.out {
        let mut echo = ConfigEcho::new();
        echo.num("pA", a.p_a).num("pB", a.p_b).num("c", a.c).set("stats", statistics);
        let mut t = Table::new(
            "gate/1",
            &["pA", "pB", "c", "theta", "concurrence", "t_re", "t_im", "r_re", "r_im", "diag_re", "diag_im"],
        );
        let mut row: Vec<Cell> = vec![a.p_a.into(), a.p_b.into(), a.c.into(), a.c.atan2(a.p_a + a.p_b).into(), conc.into()];
        row.extend(complex_cells(g.entry(Basis::UpDown, Basis::UpDown)));
        row.extend(complex_cells(g.entry(Basis::DownUp, Basis::UpDown)));
        row.extend(complex_cells(g.entry(Basis::UpUp, Basis::UpUp)));
        t.push(row);
        write_atomic(&[(out.clone(), t.to_csv(&echo, a.common.reproducible))])?;
    }
    Ok(())
}

pub fn wavepacket(a: &WavepacketArgs) -> Result<(), CliError> {
    let deltas = parse_grid(&a.delta)?;
    let etas = parse_grid(&a.eta)?;
    let mut specs = Vec::with_capacity(deltas.len() * etas.len());
    for &d in &deltas {
        for &e in &etas {
            specs.push(WavepacketSpec::with_coupling(d, e, a.c)?);
        }
    }
    check_outputs(&[&a.out, &a.dat])?;

    let rows: Vec<(f64, Option<f64>)> = specs
        .par_iter()
        .map(|s| {
            let point = || format!("delta={} eta={}", s.delta, s.eta);
            let c = analytic_concurrence(s).at(point)?;
            let q = if a.check { Some(numeric_concurrence_for(s).at(point)?) } else { None };
            Ok((c, q))
        })
        .collect::<Result<_, CliError>>()?;

    let mut echo = ConfigEcho::new();
    echo.set("delta", &a.delta).set("eta", &a.eta).num("c", a.c).set("check", a.check);
    let mut cols = vec!["delta", "eta", "z_re", "z_im", "concurrence"];
    if a.check {
        cols.extend(["quadrature", "abs_diff"]);
    }
    let mut t = Table::new("wavepacket/1", &cols);
    for (s, (c, q)) in specs.iter().zip(&rows) {
        let z = s.z();
        let mut row: Vec<Cell> = vec![s.delta.into(), s.eta.into(), z.re.into(), z.im.into(), (*c).into()];
        if let Some(q) = q {
            row.extend([(*q).into(), (c - q).abs().into()]);
        }
        t.push(row);
    }
    if specs.len() == 1 {
        eprintln!("C = {}", fmt_num(rows[0].0));
    }
    let mut extra = Vec::new();
    if let Some(dat) = &a.dat {
        let first: Vec<Vec<f64>> = specs
            .iter()
            .zip(&rows)
            .filter(|(s, _)| s.delta == deltas[0])
            .map(|(s, (c, _))| vec![s.eta, *c])
            .collect();
        extra.push((dat.clone(), emit_plot_data(&["eta", "concurrence"], &first)?));
    }
    finish(&a.out, t.to_csv(&echo, a.common.reproducible), extra)
}

fn validate_chain(n: usize, j: f64, j0: Option<f64>) -> Result<(), CliError> {
    LatticeSpec::new(n, j, j0.unwrap_or(j), 0.0)?;
    Ok(())
}

pub fn lattice_transfer(a: &TransferArgs) -> Result<(), CliError> {
    let sizes = parse_sizes(&a.n)?;
    if sizes.is_empty() {
        return Err(CliError::Config("no chain lengths".into()));
    }
    for &n in &sizes {
        validate_chain(n, a.j, None)?;
    }
    check_outputs(&[&a.out])?;
    let settings = OptimizerSettings {
        full_grid: a.full_grid,
        ..OptimizerSettings::default()
    };
    let results: Vec<TransferOptimum> = sizes
        .par_iter()
        .map(|&n| optimize_boundary_coupling_with(n, a.j, &settings).at(|| format!("N={n}")))
        .collect::<Result<_, _>>()?;

    let mut echo = ConfigEcho::new();
    echo.set("N", sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","))
        .num("J", a.j)
        .set("full-grid", a.full_grid)
        .num("j0_step", settings.j0_step)
        .num("j0_tol", settings.j0_tol)
        .num("fine_dt", settings.fine_dt);
    let mut t = Table::new("lattice-transfer/1", &["N", "J", "J0", "J0_over_J", "t_transfer", "Jt_over_N", "f_1N", "f_1N_pow4"]);
    for r in &results {
        t.push(vec![
            r.n.into(),
            r.j.into(),
            r.j0.into(),
            (r.j0 / r.j).into(),
            r.t_transfer.into(),
            (r.j * r.t_transfer / r.n as f64).into(),
            r.f_1n.into(),
            r.f_1n.powi(4).into(),
        ]);
        eprintln!("N = {}: J0 = {}, t = {}, f_1N = {}", r.n, fmt_num(r.j0), fmt_num(r.t_transfer), fmt_num(r.f_1n));
    }
    finish(&a.out, t.to_csv(&echo, a.common.reproducible), Vec::new())
}

pub fn lattice_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let grid = parse_grid(&a.u_grid)?;
    validate_chain(a.n, a.j, a.j0)?;
    for &u in &grid {
        LatticeSpec::from_dimensionless(a.n, a.j, a.j0.unwrap_or(a.j), u)?;
    }
    if let Some(t) = a.t {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(CliError::Config(format!("readout time {t} must be >= 0")));
        }
    }
    check_outputs(&[&a.out, &a.dat])?;

    let settings = OptimizerSettings::default();
    let point = || format!("N={}", a.n);
    let opt = match (a.j0, a.t) {
        (None, _) => optimize_boundary_coupling_with(a.n, a.j, &settings).at(point)?,
        (Some(j0), None) => transfer_at(a.n, a.j, j0, &settings).at(point)?,
        (Some(j0), Some(_)) => TransferOptimum {
            n: a.n,
            j: a.j,
            j0,
            t_transfer: 0.0,
            f_1n: 0.0,
        },
    };
    let opt = match a.t {
        Some(t) => {
            let chain = Chain::with_end_bonds(a.n, a.j, opt.j0, opt.j0)?;
            let f = ChainSpectrum::new(&chain).at(point)?.amplitude(0, a.n - 1, t).norm();
            TransferOptimum { t_transfer: t, f_1n: f, ..opt }
        }
        None => opt,
    };
    let rows = sweep_concurrence(&opt, &grid).at(point)?;

    let mut echo = ConfigEcho::new();
    echo.set("N", a.n)
        .set("U-grid", &a.u_grid)
        .num("J", a.j)
        .num("J0", opt.j0)
        .num("t", opt.t_transfer)
        .num("f_1N", opt.f_1n);
    let mut t = Table::new(
        "lattice-sweep/1",
        &["U", "C_1N", "A_1N_re", "A_1N_im", "A_N1_re", "A_N1_im", "ratio_re", "ratio_im", "abs_A_11"],
    );
    for r in &rows {
        let mut row: Vec<Cell> = vec![r.u.into(), r.c_1n.into()];
        row.extend(complex_cells(r.a_1n));
        row.extend(complex_cells(r.a_n1));
        row.extend(complex_cells(r.ratio()));
        row.push(r.a_11.norm().into());
        t.push(row);
    }
    let best = rows
        .iter()
        .max_by(|x, y| x.c_1n.total_cmp(&y.c_1n))
        .expect("grid is non-empty");
    eprintln!(
        "N = {}: J0 = {}, t = {}, f_1N^4 = {}; max C_1N = {} at U = {}",
        a.n,
        fmt_num(opt.j0),
        fmt_num(opt.t_transfer),
        fmt_num(opt.f_1n.powi(4)),
        fmt_num(best.c_1n),
        fmt_num(best.u)
    );
    let mut extra = Vec::new();
    if let Some(dat) = &a.dat {
        let pts: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.u, r.c_1n]).collect();
        extra.push((dat.clone(), emit_plot_data(&["U", "C_1N"], &pts)?));
    }
    finish(&a.out, t.to_csv(&echo, a.common.reproducible), extra)
}

fn load_species(path: &Option<PathBuf>) -> Result<Species, CliError> {
    match path {
        None => Ok(Species::rb87()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Config(format!("species {}: {e}", p.display())))?;
            Ok(Species::parse_preset(&text)?)
        }
    }
}

fn species_label(path: &Option<PathBuf>) -> String {
    path.as_deref().map(Path::display).map(|d| d.to_string()).unwrap_or_else(|| "rb87".into())
}

pub fn design(a: &DesignArgs) -> Result<(), CliError> {
    let mut species = load_species(&a.species)?;
    if let Some(s) = &a.a3d {
        species.a3d = parse_length(s)?;
    }
    let convention: FrequencyConvention = a.omega_convention.parse()?;
    let omega_perp = parse_frequency(&a.omega_perp, convention)?;
    let mut params = AtomParams::new(&species, omega_perp)?;
    if let Some(wz) = &a.omega_z {
        params = params.with_omega_z(parse_frequency(wz, convention)?);
    }
    let mut lambdas = a
        .lambda
        .split(',')
        .map(parse_length)
        .collect::<Result<Vec<_>, _>>()?;
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    for &l in &lambdas {
        params.with_lambda(l).validate()?;
    }
    let launch = match (&a.x0, &a.dx0) {
        (Some(x0), Some(dx0)) => Some(LaunchSpec::new(parse_length(x0)?, parse_length(dx0)?)?),
        (None, None) => None,
        _ => return Err(CliError::Config("--x0 and --dx0 go together".into())),
    };
    params.validate()?;
    check_outputs(&[&a.out])?;

    let c = coupling_from_3d(&params).at(|| "coupling_from_3d".into())?;
    let p_star = cic_corrected_momentum(c, &params).at(|| format!("c={c}"))?;
    let eta = launch.as_ref().map(launch_spread);
    let c_eta = match eta {
        Some(e) if e > 0.0 => Some(analytic_concurrence(&WavepacketSpec::new(0.0, e)?)?),
        Some(_) => Some(1.0),
        None => None,
    };
    let designs = lambdas
        .iter()
        .map(|&l| design_lattice_depth(&params.with_lambda(l)).at(|| format!("lambda={l}")))
        .collect::<Result<Vec<_>, _>>()?;

    eprintln!("c = {} 1/m, corrected p_A+B = {} 1/m, a_perp = {} m", fmt_num(c), fmt_num(p_star), fmt_num(params.a_perp()));
    if let (Some(e), Some(ce)) = (eta, c_eta) {
        eprintln!("launch spread eta = {}, C(delta = 0) = {}", fmt_num(e), fmt_num(ce));
    }

    let mut echo = ConfigEcho::new();
    echo.set("species", species_label(&a.species))
        .num("mass_kg", species.mass)
        .num("a3d_m", species.a3d)
        .num("g_uu_Jm", species.g[0])
        .num("g_ud_Jm", species.g[1])
        .num("g_dd_Jm", species.g[2])
        .set("omega-perp", &a.omega_perp)
        .set("omega-convention", &a.omega_convention)
        .num("omega_perp_rad_s", omega_perp)
        .set("omega-z", a.omega_z.as_deref().unwrap_or("none"))
        .set("lambda", &a.lambda)
        .set("x0", a.x0.as_deref().unwrap_or("none"))
        .set("dx0", a.dx0.as_deref().unwrap_or("none"));
    let mut cols = vec!["lambda_m", "V0_over_ER", "J_over_h_Hz", "ER_over_h_Hz", "c_per_m", "p_star_per_m", "a_perp_m"];
    if eta.is_some() {
        cols.extend(["eta", "C_eta"]);
    }
    let mut t = Table::new("design/1", &cols);
    for (l, d) in lambdas.iter().zip(&designs) {
        let mut row: Vec<Cell> = vec![
            (*l).into(),
            d.v0_over_er.into(),
            d.j_over_h().into(),
            (d.e_r / PLANCK_H).into(),
            c.into(),
            p_star.into(),
            params.a_perp().into(),
        ];
        if let (Some(e), Some(ce)) = (eta, c_eta) {
            row.extend([e.into(), ce.into()]);
        }
        t.push(row);
    }
    finish(&a.out, t.to_csv(&echo, a.common.reproducible), Vec::new())
}
