//! The four verbs. Each returns the bytes to write so that output handling
//! stays in one place.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use snhopf::cluster::{
    alpha_roots_for_psi, find_roots_of, sync_frequency, sync_stability, AlphaPolynomials, RootSet,
};
use snhopf::integrator::{
    compare, default_step, integrate_full, integrate_phase, torus_state, write_full_csv,
    write_phase_csv, ComparisonReport,
};
use snhopf::reduction::{build_coupling, canonical_xi_chi, reduction_constants, CanonicalHarmonic};
use snhopf::{PhaseCouplingSet, ReductionConstants};

use crate::config::{ClusterScanSection, RunConfig, DEFAULT_T_END};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Full,
    Phase,
}

/// Named output documents; the first is the primary output.
pub type Documents = Vec<(&'static str, Vec<u8>)>;

#[derive(Debug, Serialize)]
struct DeriveReport {
    constants: ReductionConstants,
    sync_frequency: f64,
    coupling: PhaseCouplingSet,
    canonical: Vec<CanonicalHarmonic>,
}

#[derive(Debug, Serialize)]
struct CompareReport {
    seed: u64,
    dt: f64,
    report: ComparisonReport,
}

fn to_toml<T: Serialize>(value: &T) -> Vec<u8> {
    toml::to_string(value)
        .expect("report is representable as TOML")
        .into_bytes()
}

fn coupling_of(cfg: &RunConfig) -> Result<PhaseCouplingSet> {
    Ok(build_coupling(&cfg.params(), cfg.system.delta)?)
}

pub fn derive(cfg: &RunConfig) -> Result<Documents> {
    let params = cfg.params();
    let constants = reduction_constants(&params, cfg.system.delta)?;
    let coupling = coupling_of(cfg)?;
    let report = DeriveReport {
        constants,
        sync_frequency: sync_frequency(&coupling, &params.coeffs, cfg.system.delta, params.lambda),
        canonical: canonical_xi_chi(&coupling),
        coupling,
    };
    Ok(vec![("report", to_toml(&report))])
}

fn step_and_horizon(cfg: &RunConfig, coupling: &PhaseCouplingSet) -> (f64, f64) {
    let dt = cfg
        .run
        .dt
        .unwrap_or_else(|| default_step(coupling.omega_cap, cfg.system.lambda));
    (dt, cfg.run.t_end.unwrap_or(DEFAULT_T_END))
}

fn header(cfg: &RunConfig, model: &str, dt: f64, t_end: f64) -> Vec<String> {
    vec![
        format!("seed={}", cfg.seed()),
        format!(
            "model={model} n_osc={} dt={dt} t_end={t_end}",
            cfg.system.n_osc
        ),
    ]
}

pub fn simulate(cfg: &RunConfig, model: Model) -> Result<Documents> {
    let coupling = coupling_of(cfg)?;
    let (dt, t_end) = step_and_horizon(cfg, &coupling);
    let stride = cfg.run.stride.unwrap_or(1);
    let phi0 = cfg.initial_phases();
    let r_star = coupling.r_star_sq.sqrt();
    let mut buf = Vec::new();
    let io = |e| CliError::io("<buffer>", e);
    match model {
        Model::Full => {
            let traj = integrate_full(
                &cfg.params(),
                &torus_state(r_star, &phi0),
                dt,
                t_end,
                stride,
            )?;
            write_full_csv(&mut buf, &traj, &header(cfg, "full", dt, t_end)).map_err(io)?;
        }
        Model::Phase => {
            let traj = integrate_phase(&coupling, &phi0, dt, t_end, stride)?;
            write_phase_csv(
                &mut buf,
                &traj,
                Some(r_star),
                &header(cfg, "phase", dt, t_end),
            )
            .map_err(io)?;
        }
    }
    Ok(vec![("trajectory", buf)])
}

/// Both models from the same torus point, sampled on the same grid.
pub fn compare_models(cfg: &RunConfig) -> Result<Documents> {
    let coupling = coupling_of(cfg)?;
    let (dt, t_end) = step_and_horizon(cfg, &coupling);
    let stride = cfg.run.stride.unwrap_or(1);
    let phi0 = cfg.initial_phases();
    let z0 = torus_state(coupling.r_star_sq.sqrt(), &phi0);
    let (full, phase) = rayon::join(
        || integrate_full(&cfg.params(), &z0, dt, t_end, stride),
        || integrate_phase(&coupling, &phi0, dt, t_end, stride),
    );
    let report = compare(&full?, &phase?)?;
    Ok(vec![(
        "report",
        to_toml(&CompareReport {
            seed: cfg.seed(),
            dt,
            report,
        }),
    )])
}

fn fmt_alpha_row(
    out: &mut String,
    alpha: f64,
    roots: &RootSet<snhopf::cluster::PsiRoot>,
    stability: &str,
) {
    match roots {
        RootSet::IdenticallyZero => {
            let _ = writeln!(out, "{alpha:.16e},identically_zero,{stability},");
        }
        RootSet::Roots(r) if r.is_empty() => {
            let _ = writeln!(out, "{alpha:.16e},none,{stability},");
        }
        RootSet::Roots(r) => {
            for root in r {
                let _ = writeln!(
                    out,
                    "{alpha:.16e},{:.16e},{stability},{}",
                    root.psi, root.tangential
                );
            }
        }
    }
}

fn polynomials(cfg: &RunConfig, scan: &ClusterScanSection) -> Result<AlphaPolynomials> {
    Ok(match scan.synthetic {
        Some(s) => s.into(),
        None => AlphaPolynomials::from_coupling(&coupling_of(cfg)?),
    })
}

/// Roots of `G` and stability of synchrony across cluster splits, plus the
/// optional `psi -> alpha` map.
pub fn cluster_scan(cfg: &RunConfig) -> Result<Documents> {
    let scan = cfg.cluster_scan.clone().unwrap_or_default();
    let poly = polynomials(cfg, &scan)?;
    let alphas: Vec<f64> = (0..scan.alpha_grid)
        .map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / scan.alpha_grid as f64)
        .collect();
    let rows = alphas
        .par_iter()
        .map(|&alpha| {
            let cc = poly.at(alpha);
            let roots = find_roots_of(&cc, scan.psi_grid)?;
            let stability = if roots.is_identically_zero() {
                "degenerate".to_string()
            } else {
                format!("{:?}", sync_stability(&cc)).to_lowercase()
            };
            let mut row = String::new();
            fmt_alpha_row(&mut row, alpha, &roots, &stability);
            Ok(row)
        })
        .collect::<Result<Vec<String>>>()?;
    let mut table = String::from("alpha,psi_root,stability_of_sync,tangential_flag\n");
    rows.iter().for_each(|r| table.push_str(r));
    let mut docs = vec![("scan", table.into_bytes())];

    if scan.alpha_roots {
        let psis: Vec<f64> = (1..scan.psi_grid)
            .map(|i| TAU * i as f64 / scan.psi_grid as f64)
            .collect();
        let rows: Vec<String> = psis
            .par_iter()
            .map(|&psi| match alpha_roots_for_psi(psi, &poly) {
                RootSet::IdenticallyZero => format!("{psi:.16e},identically_zero\n"),
                RootSet::Roots(r) => {
                    let list: Vec<String> = r.iter().map(|a| format!("{a:.16e}")).collect();
                    format!("{psi:.16e},{}\n", list.join(";"))
                }
            })
            .collect();
        let mut table = String::from("psi,alpha_roots\n");
        rows.iter().for_each(|r| table.push_str(r));
        docs.push(("alpha_roots", table.into_bytes()));
    }
    Ok(docs)
}
