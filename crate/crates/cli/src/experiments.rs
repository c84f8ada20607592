use macrobell_core::epr::epr_sweep;
use macrobell_core::fock_oracle::{ch_statistic_exact, convergence_report};
use macrobell_core::quad_bell::{noise_threshold, optimize_angles, NoiseModel, QuadBasis, QuadEngine};
use macrobell_core::{AngleQuad, Error};
use rayon::prelude::*;

use crate::config::{Experiment, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

pub fn run_experiment(config: &RunConfig) -> Result<Table, CliError> {
    match config.experiment {
        Experiment::BellScan => bell_scan(config),
        Experiment::NoiseThreshold => threshold_table(config),
        Experiment::AngleOpt => angle_opt(config),
        Experiment::OracleCompare => oracle_compare(config),
        Experiment::EprSweep => epr_table(config),
    }
}

/// `S` and its ingredients over the `sigma0` scan. With `noise.sigma0_b` set,
/// B keeps that noise while A is scanned.
fn bell_scan(config: &RunConfig) -> Result<Table, CliError> {
    let state = config.build_state()?;
    let grid = config.grid_for(&state)?;
    let basis = QuadBasis::new(state.n_max, &grid)?;
    let angles = AngleQuad::from(config.angles);
    let points = config.scan.sigma0.points();
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&s0| {
            let noise = NoiseModel::asymmetric(s0, config.noise.sigma0_b.unwrap_or(s0));
            let r = QuadEngine::with_basis(&state, &basis, noise)?.ch_statistic(&angles)?;
            let mut row: Vec<Cell> = vec![s0.into(), r.s.into()];
            row.extend(r.joint.iter().map(|j| Cell::from(j.p_plus_plus)));
            row.extend([Cell::from(r.single_a), Cell::from(r.single_b), Cell::from(r.violates())]);
            Ok(row)
        })
        .collect::<Result<_, Error>>()?;
    let mut table = Table::new(vec![
        "sigma0", "s", "p_pp_theta_phi", "p_pp_theta_phiprime", "p_pp_thetaprime_phi",
        "p_pp_thetaprime_phiprime", "p_plus_a", "p_plus_b", "violates",
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Largest noise, per local-oscillator amplitude, that still leaves `S > 1`.
pub fn thresholds(config: &RunConfig, energies: &[f64]) -> Result<Vec<(f64, f64, f64, f64)>, CliError> {
    let state = config.build_state()?;
    let grid = config.grid_for(&state)?;
    let angles = AngleQuad::from(config.angles);
    let rows = energies
        .par_iter()
        .map(|&e| match noise_threshold(&state, &angles, e, &grid) {
            Ok(t) => Ok((e, t.s_at_zero, t.sigma0_max, t.sigma_photon_max)),
            Err(Error::NoViolation { s0 }) => Ok((e, s0, 0.0, 0.0)),
            Err(err) => Err(err),
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(rows)
}

fn threshold_table(config: &RunConfig) -> Result<Table, CliError> {
    let mut table = Table::new(vec!["energy", "s_at_zero", "sigma0_max", "sigma_photon_max", "violates_at_zero"]);
    for (e, s0, sigma0, photon) in thresholds(config, &config.scan.energies)? {
        table.push(vec![e.into(), s0.into(), sigma0.into(), photon.into(), (s0 > 1.0).into()]);
    }
    Ok(table)
}

fn angle_opt(config: &RunConfig) -> Result<Table, CliError> {
    let state = config.build_state()?;
    let grid = config.grid_for(&state)?;
    let noise = config.noise.model();
    let reference = QuadEngine::new(&state, &grid, noise)?
        .ch_statistic(&AngleQuad::from(config.angles))?
        .s;
    let best = optimize_angles(&state, noise, &grid)?;
    let a = best.angles;
    let mut table = Table::new(vec![
        "sigma0_a", "sigma0_b", "s_reference", "s_optimal", "theta", "phi", "theta_prime", "phi_prime",
    ]);
    table.push(vec![
        noise.sigma0_a.into(),
        noise.sigma0_b.into(),
        reference.into(),
        best.s.into(),
        a.theta.into(),
        a.phi.into(),
        a.theta_prime.into(),
        a.phi_prime.into(),
    ]);
    Ok(table)
}

/// Exact finite-amplitude `S` per alpha against the quadrature limit, with
/// photon-number noise `alpha * sigma0` so both engines see the same `sigma0`.
pub fn oracle_points(config: &RunConfig, alphas: &[f64]) -> Result<(f64, Vec<(f64, f64, f64)>), CliError> {
    if config.noise.sigma0_b.is_some_and(|b| b != config.noise.sigma0) {
        return Err(CliError::Config(
            "the exact engine takes the same noise at both sides; drop noise.sigma0_b".into(),
        ));
    }
    let state = config.build_state()?;
    let grid = config.grid_for(&state)?;
    let angles = AngleQuad::from(config.angles);
    let sigma0 = config.noise.sigma0;
    let limit = QuadEngine::new(&state, &grid, NoiseModel::symmetric(sigma0))?
        .ch_statistic(&angles)?
        .s;
    let t = config.numerics.truncations;
    let rows = alphas
        .par_iter()
        .map(|&alpha| {
            let exact = ch_statistic_exact(&state, alpha, alpha, &angles, alpha * sigma0, &t)?.s;
            let distance = convergence_report(&state, angles.theta, angles.phi, &[alpha], &t)?.rows[0].distance;
            Ok((alpha, exact, distance))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok((limit, rows))
}

fn oracle_compare(config: &RunConfig) -> Result<Table, CliError> {
    let (limit, rows) = oracle_points(config, &config.scan.alphas)?;
    let mut table = Table::new(vec!["alpha", "s_exact", "s_limit", "abs_diff", "kolmogorov_distance"]);
    for (alpha, exact, distance) in rows {
        table.push(vec![
            alpha.into(),
            exact.into(),
            limit.into(),
            (exact - limit).abs().into(),
            distance.into(),
        ]);
    }
    Ok(table)
}

/// EPR criterion for two-mode squeezed light over the `(squeezing, energies)`
/// grid; the configured state is not used.
fn epr_table(config: &RunConfig) -> Result<Table, CliError> {
    let rows = epr_sweep(&config.scan.squeezing, &config.scan.energies, config.scan.macroscopic_threshold)?;
    let mut table = Table::new(vec![
        "r", "energy", "delta1", "delta2", "delta_x", "delta_y", "product", "bound", "satisfied", "m1", "m2",
        "macroscopic",
    ]);
    for row in rows {
        let rep = row.report;
        table.push(vec![
            row.r.into(),
            rep.energy.into(),
            rep.delta1.into(),
            rep.delta2.into(),
            rep.delta_x.into(),
            rep.delta_y.into(),
            rep.product.into(),
            rep.bound.into(),
            rep.satisfied.into(),
            row.margins.m1.into(),
            row.margins.m2.into(),
            row.margins.both_macroscopic().into(),
        ]);
    }
    Ok(table)
}
