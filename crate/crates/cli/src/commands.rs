//! The four subcommands. Each writes its main artifact to `out` and any
//! side files (summary, wavefunction dump, dispersion scan) to the paths
//! named in the config.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use fluxopt_core::oracle::{self, FullCircuitModel, OracleReport};
use fluxopt_core::spectrum;
use fluxopt_core::sweep::{self, SweepOptions, SweepResult};
use fluxopt_core::{params, CoherenceRecord};

use crate::config::{Format, RunConfig};
use crate::CliError;

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e-3, 1e7)`; `inf` for infinities. Never locale dependent.
pub fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if x == 0.0 || (1e-3..1e7).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(fmt_num(x))
    }
}

fn write_json(out: &mut dyn Write, value: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn grid(cfg: &RunConfig) -> Result<spectrum::PhaseGrid, CliError> {
    cfg.grid().map_err(|m| {
        CliError::Config(crate::config::ConfigError {
            line: None,
            key: Some("solver".into()),
            message: m,
        })
    })
}

pub fn cmd_derive(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = &cfg.qubit;
    let scales = params::derive_shared_scales(spec);
    let rows = cfg
        .derive_n_values
        .iter()
        .map(|&n| params::array_params(&scales, spec, n))
        .collect::<Result<Vec<_>, _>>()?;
    let (band_low, band_high) = sweep::rule_of_thumb_band(&scales, spec);
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(
            out,
            &json!({
                "e_cb_GHz": num(scales.e_cb),
                "script_E_Ca_GHz": num(scales.script_e_ca),
                "band_low": num(band_low),
                "band_high": num(band_high),
                "array": rows.iter().map(|r| json!({
                    "N": r.n,
                    "EJa_GHz": num(r.e_ja),
                    "ECa_GHz": num(r.e_ca),
                    "EJa_over_ECa": num(r.ratio),
                })).collect::<Vec<_>>(),
            }),
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "N",
                "e_cb_GHz",
                "script_E_Ca_GHz",
                "EJa_GHz",
                "ECa_GHz",
                "EJa_over_ECa",
            ])?;
            for r in &rows {
                w.write_record([
                    r.n.to_string(),
                    fmt_num(scales.e_cb),
                    fmt_num(scales.script_e_ca),
                    fmt_num(r.e_ja),
                    fmt_num(r.e_ca),
                    fmt_num(r.ratio),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn cmd_spectrum(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let sol = spectrum::solve_fluxonium(&cfg.qubit, &grid(cfg)?, 2)?;
    let n01 = spectrum::charge_matrix_element(&sol);
    let g = sol.grid();
    if let Some(path) = &cfg.dump_path {
        let mut f = create(path)?;
        spectrum::write_wavefunctions(&sol, &mut f, cfg.dump_points)?;
        f.flush()?;
    }
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(
            out,
            &json!({
                "E0_GHz": num(sol.energies()[0]),
                "E1_GHz": num(sol.energies()[1]),
                "f01_GHz": num(sol.f01()),
                "n01": num(n01),
                "theta_max": num(g.theta_max()),
                "steps_per_period": g.steps_per_period(),
                "points": g.points(),
            }),
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "E0_GHz",
                "E1_GHz",
                "f01_GHz",
                "n01",
                "theta_max",
                "steps_per_period",
                "points",
            ])?;
            w.write_record([
                fmt_num(sol.energies()[0]),
                fmt_num(sol.energies()[1]),
                fmt_num(sol.f01()),
                fmt_num(n01),
                fmt_num(g.theta_max()),
                g.steps_per_period().to_string(),
                g.points().to_string(),
            ])?;
            w.flush()?;
            Ok(())
        }
    }
}

pub const SWEEP_COLUMNS: [&str; 8] = [
    "N",
    "T_phi_us",
    "T1_us",
    "T2_us",
    "f01_GHz",
    "EJa_over_ECa",
    "eps0_GHz",
    "eps1_GHz",
];

fn sweep_row(r: &CoherenceRecord) -> [String; 8] {
    [
        r.n.to_string(),
        fmt_num(r.t_phi),
        fmt_num(r.t_one),
        fmt_num(r.t_two),
        fmt_num(r.f01),
        fmt_num(r.ratio_ja_ca),
        fmt_num(r.eps0),
        fmt_num(r.eps1),
    ]
}

fn sweep_summary(r: &SweepResult) -> Value {
    json!({
        "n_opt": r.n_opt,
        "t2_opt": num(r.t2_opt),
        "band_low": num(r.band_low),
        "band_high": num(r.band_high),
    })
}

/// Run the sweep configured in `cfg` without writing anything.
pub fn run_sweep(cfg: &RunConfig, jobs: Option<usize>) -> Result<SweepResult, CliError> {
    let scales = params::derive_shared_scales(&cfg.qubit);
    let (lo, hi) = sweep::default_range(&scales, &cfg.qubit);
    let n_min = cfg.n_min.unwrap_or(lo);
    let n_max = cfg.n_max.unwrap_or(hi.max(n_min));
    let options = SweepOptions {
        grid: Some(grid(cfg)?),
        jobs,
    };
    Ok(sweep::sweep_t2_with(
        &cfg.qubit, &cfg.noise, n_min, n_max, &options,
    )?)
}

pub fn cmd_sweep(
    cfg: &RunConfig,
    jobs: Option<usize>,
    out: &mut dyn Write,
) -> Result<SweepResult, CliError> {
    let result = run_sweep(cfg, jobs)?;
    if let Some(path) = &cfg.summary_path {
        let mut f = create(path)?;
        write_json(&mut f, &sweep_summary(&result))?;
        f.flush()?;
    }
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(SWEEP_COLUMNS)?;
            for r in &result.records {
                w.write_record(sweep_row(r))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut summary = sweep_summary(&result);
            summary["records"] = result
                .records
                .iter()
                .map(|r| {
                    let mut obj = serde_json::Map::new();
                    obj.insert("N".into(), json!(r.n));
                    let values = [
                        r.t_phi,
                        r.t_one,
                        r.t_two,
                        r.f01,
                        r.ratio_ja_ca,
                        r.eps0,
                        r.eps1,
                    ];
                    for (k, v) in SWEEP_COLUMNS[1..].iter().zip(values) {
                        obj.insert((*k).into(), num(v));
                    }
                    Value::Object(obj)
                })
                .collect();
            write_json(out, &summary)?;
        }
    }
    Ok(result)
}

/// Exact-versus-effective reports for every configured junction count.
pub fn run_oracle(cfg: &RunConfig) -> Result<Vec<OracleReport>, CliError> {
    let spec = &cfg.qubit;
    let scales = params::derive_shared_scales(spec);
    cfg.oracle
        .n_values
        .iter()
        .map(|&n| {
            let c_a = 1.0 / params::array_params(&scales, spec, n)?.e_ca;
            let model = FullCircuitModel::from_spec(spec, n, cfg.oracle.n_max)?
                .with_ground_capacitances(
                    cfg.oracle.cd_a_over_ca * c_a,
                    cfg.oracle.cd_b_over_ca * c_a,
                )?;
            Ok(oracle::compare(spec, &model, cfg.oracle.scan_points)?)
        })
        .collect()
}

fn write_scan(reports: &[OracleReport], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "Q_e", "E0_GHz", "E1_GHz"])?;
    for r in reports {
        for p in &r.scan {
            w.write_record([r.n.to_string(), fmt_num(p.q), fmt_num(p.e0), fmt_num(p.e1)])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn report_json(r: &OracleReport) -> Value {
    json!({
        "N": r.n,
        "n_max": r.n_max,
        "EJa_over_ECa": num(r.ratio_ja_ca),
        "f01_exact_GHz": num(r.f01_exact),
        "f01_effective_GHz": num(r.f01_effective),
        "f01_rel_diff": num(r.f01_rel_diff),
        "eps_exact_GHz": [num(r.eps_exact[0]), num(r.eps_exact[1])],
        "eps_effective_GHz": [num(r.eps_effective[0]), num(r.eps_effective[1])],
        "eps_exact_over_effective": [
            num(r.eps_exact[0] / r.eps_effective[0]),
            num(r.eps_exact[1] / r.eps_effective[1]),
        ],
        "cosine_fit_r2": [num(r.cosine_r2[0]), num(r.cosine_r2[1])],
        "periodicity_rel": num(r.periodicity_rel),
        "truncation_rel": num(r.truncation_rel),
    })
}

pub fn cmd_oracle(cfg: &RunConfig, out: &mut dyn Write) -> Result<Vec<OracleReport>, CliError> {
    let reports = run_oracle(cfg)?;
    if let Some(path) = &cfg.oracle.scan_path {
        let mut f = create(path)?;
        write_scan(&reports, &mut f)?;
        f.flush()?;
    }
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(
            out,
            &json!({ "reports": reports.iter().map(report_json).collect::<Vec<_>>() }),
        )?,
        Format::Csv => write_scan(&reports, out)?,
    }
    Ok(reports)
}
