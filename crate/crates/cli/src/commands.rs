use std::path::Path;

use serde::{Deserialize, Serialize};
use snf_core::isoperimetry::{
    boundary_csv, conjecture_scan, iso_stability, ConjectureRow, ScanMode, CONJECTURE_CSV_HEADER,
};
use snf_core::projection::{
    coefficient_matrix_with, tau_matrix, verify_identities, EpsilonKind, EpsilonOptions, IdentityReport,
    DEFAULT_EPSILON_SAMPLES,
};
use snf_core::recovery::{
    recover as run_recover, stability_experiment, NoiseSpec, RecoveryParams, StabilityRow, STABILITY_CSV_HEADER,
};
use snf_core::{BooleanFamily, Error, Line, Result};

use crate::output::{csv_preamble, emit, io_error, json, meta, read_input};
use crate::{Common, Format, Mode};

fn load_family(path: &Path) -> Result<(BooleanFamily, Vec<u8>)> {
    let bytes = read_input(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::InvalidFamily(format!("{}: {e}", path.display())))?;
    Ok((BooleanFamily::from_json(text)?, bytes))
}

fn recovery_params(common: &Common, p_max: f64) -> RecoveryParams {
    let defaults = RecoveryParams::default();
    RecoveryParams {
        large_threshold: common.large_threshold,
        tau_threshold: common.tau_threshold,
        p_max,
        samples: common.samples.unwrap_or(defaults.samples),
        seed: common.seed,
    }
}

#[derive(Serialize)]
struct AnalyzeReport {
    n: usize,
    size: u64,
    c: f64,
    eta: f64,
    epsilon: f64,
    epsilon_kind: EpsilonKind,
    a: Vec<Vec<f64>>,
    tau: Vec<Vec<f64>>,
    identities: Option<IdentityReport>,
}

pub fn analyze(common: &Common, path: &Path) -> Result<()> {
    let (family, bytes) = load_family(path)?;
    let m = coefficient_matrix_with(
        &family,
        EpsilonOptions {
            samples: common.samples.unwrap_or(DEFAULT_EPSILON_SAMPLES),
            seed: common.seed,
        },
    )?;
    let tau = tau_matrix(&family);
    let meta = meta("analyze", common, Some(&bytes), &());
    let text = match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let n = family.n();
            let report = AnalyzeReport {
                n,
                size: family.size(),
                c: m.c,
                eta: family.eta(),
                epsilon: m.epsilon,
                epsilon_kind: m.epsilon_kind,
                a: m.a.chunks(n).map(<[f64]>::to_vec).collect(),
                tau: tau.tau.chunks(n).map(<[f64]>::to_vec).collect(),
                identities: verify_identities(&m).ok(),
            };
            json(&meta, &report)?
        }
        Format::Csv => format!("{}# snf-analyze v1\n{}", csv_preamble(&meta), m.to_csv()),
    };
    emit(common, &text)
}

pub fn recover(common: &Common, path: &Path, p_max: f64) -> Result<()> {
    let (family, bytes) = load_family(path)?;
    let params = recovery_params(common, p_max);
    let res = run_recover(&family, &params)?;
    let meta = meta("recover", common, Some(&bytes), &p_max);
    let text = match common.format.unwrap_or(Format::Json) {
        Format::Json => json(&meta, &res)?,
        Format::Csv => {
            let members: Vec<String> = res.members().iter().map(|k| (k + 1).to_string()).collect();
            format!(
                "{}# snf-recover v1\nline,members,d,symdiff,symdiff_fraction,epsilon\n{},{},{},{},{},{}\n",
                csv_preamble(&meta),
                res.strong_line.line,
                members.join(" "),
                snf_core::numeric::fmt17(res.d),
                res.symdiff,
                snf_core::numeric::fmt17(res.symdiff_fraction),
                snf_core::numeric::fmt17(res.epsilon),
            )
        }
    };
    emit(common, &text)
}

pub fn iso(common: &Common, path: &Path) -> Result<()> {
    let (family, bytes) = load_family(path)?;
    let params = recovery_params(common, RecoveryParams::default().p_max);
    let s = iso_stability(&family, &params)?;
    let meta = meta("iso", common, Some(&bytes), &());
    let text = match common.format.unwrap_or(Format::Json) {
        Format::Json => json(&meta, &s)?,
        Format::Csv => format!("{}{}", csv_preamble(&meta), boundary_csv(&s.report)),
    };
    emit(common, &text)
}

#[derive(Serialize)]
pub struct ConjectureArgs {
    pub n: usize,
    pub mode: Mode,
    pub sizes: Vec<u64>,
    pub restarts: usize,
    pub max_iters: usize,
}

pub fn conjecture(common: &Common, args: ConjectureArgs, witness_dir: Option<&Path>) -> Result<()> {
    let mode = match args.mode {
        Mode::Exhaustive => ScanMode::Exhaustive,
        Mode::Local => ScanMode::LocalSearch {
            restarts: args.restarts,
            seed: common.seed,
            max_iters: args.max_iters,
        },
    };
    let rows = conjecture_scan(args.n, &args.sizes, mode)?;
    let mut names = Vec::with_capacity(rows.len());
    for r in &rows {
        match (r.improved, witness_dir) {
            (true, Some(dir)) => {
                let name = format!("witness_n{}_k{}.json", args.n, r.k);
                let f = BooleanFamily::from_ranks(args.n, r.witness.iter().copied())?;
                let path = dir.join(&name);
                std::fs::write(&path, f.to_json() + "\n").map_err(|e| io_error(&path, e))?;
                names.push(name);
            }
            _ => names.push(String::new()),
        }
    }
    let meta = meta("conjecture", common, None, &args);
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = csv_preamble(&meta);
            s.push_str(CONJECTURE_CSV_HEADER);
            s.push('\n');
            for (r, name) in rows.iter().zip(&names) {
                s.push_str(&r.csv(name));
                s.push('\n');
            }
            if rows.iter().all(|r| !r.improved) {
                s.push_str("# no improvement found\n");
            }
            s
        }
        Format::Json => json(&meta, &rows.iter().collect::<Vec<&ConjectureRow>>())?,
    };
    emit(common, &text)
}

/// Sweep description, one-based like the family format.
#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SweepPlan {
    n: usize,
    #[serde(default)]
    row: Option<usize>,
    #[serde(default)]
    columns: Option<Vec<usize>>,
    #[serde(default)]
    column: Option<usize>,
    #[serde(default)]
    rows: Option<Vec<usize>>,
    deltas: Vec<f64>,
    trials: u64,
}

impl SweepPlan {
    fn line_and_members(&self) -> Result<(Line, Vec<usize>)> {
        let invalid = |msg: String| Error::InvalidParameter {
            name: "plan",
            reason: msg,
        };
        let (line, members, field) = match (self.row, self.column) {
            (Some(i), None) => (i, &self.columns, "columns"),
            (None, Some(j)) => (j, &self.rows, "rows"),
            _ => {
                return Err(invalid(
                    "exactly one of the fields `row` and `column` is required".into(),
                ))
            }
        };
        let members = members
            .as_ref()
            .ok_or_else(|| invalid(format!("field `{field}` is required")))?;
        if line == 0 || line > self.n {
            return Err(invalid(format!("line index {line} out of range 1..={}", self.n)));
        }
        if let Some(&m) = members.iter().find(|&&m| m == 0 || m > self.n) {
            return Err(invalid(format!("field `{field}`: {m} out of range 1..={}", self.n)));
        }
        let line = if field == "columns" {
            Line::row(line - 1)
        } else {
            Line::column(line - 1)
        };
        Ok((line, members.iter().map(|m| m - 1).collect()))
    }
}

pub fn sweep(common: &Common, path: &Path) -> Result<()> {
    let bytes = read_input(path)?;
    let plan: SweepPlan = serde_json::from_slice(&bytes).map_err(|e| Error::InvalidParameter {
        name: "plan",
        reason: format!("{}: {e}", path.display()),
    })?;
    let (line, members) = plan.line_and_members()?;
    let params = recovery_params(common, RecoveryParams::default().p_max);
    let mut rows: Vec<StabilityRow> = Vec::new();
    for &delta in &plan.deltas {
        let noise = NoiseSpec {
            n: plan.n,
            line,
            members: members.clone(),
            delta,
            seed: common.seed,
        };
        rows.extend(stability_experiment(&noise, plan.trials, &params)?);
    }
    let meta = meta("sweep", common, Some(&bytes), &());
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = csv_preamble(&meta);
            s.push_str(STABILITY_CSV_HEADER);
            s.push('\n');
            for r in &rows {
                s.push_str(&r.csv());
                s.push('\n');
            }
            s
        }
        Format::Json => json(&meta, &rows)?,
    };
    emit(common, &text)
}
