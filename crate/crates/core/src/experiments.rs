//! Random-instance sweeps and their CSV outputs.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Result, VqpmError};
use crate::par;
use crate::qubo::{brute_force_solve, generate_random, scale_problem, Bitstring, QuboInstance, MAX_ENUMERATION_QUBITS};
use crate::spectrum::{build_oracle, eigengap};
use crate::state::StateVector;
use crate::vqpm::{run, IterationRecord, Mode, VqpmConfig};

pub const INSTANCE_COLUMNS: [&str; 9] = [
    "n",
    "seed",
    "iterations",
    "exact",
    "scaled_abs_error",
    "raw_abs_error",
    "hamming",
    "eigengap",
    "final_success_prob",
];

pub const AGGREGATE_COLUMNS: [&str; 6] = [
    "n",
    "mean_iterations",
    "mean_eigengap",
    "exact_count",
    "mean_abs_error_nonexact",
    "mean_hamming_nonexact",
];

pub const TRACE_COLUMNS: [&str; 4] = ["iteration", "P0", "success_prob", "frozen_count"];

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub instances_per_n: usize,
    pub base_seed: u64,
    pub vqpm: VqpmConfig,
    pub output_dir: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(n_min: usize, n_max: usize, instances_per_n: usize, base_seed: u64) -> Self {
        SweepConfig {
            n_min,
            n_max,
            instances_per_n,
            base_seed,
            vqpm: VqpmConfig::default(),
            output_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min < 1 || self.n_min > self.n_max {
            return Err(VqpmError::Argument(format!(
                "need 1 <= n_min <= n_max, got {}..{}",
                self.n_min, self.n_max
            )));
        }
        if self.instances_per_n < 1 {
            return Err(VqpmError::Argument("instances_per_n must be at least 1".into()));
        }
        if self.n_max > MAX_ENUMERATION_QUBITS {
            return Err(VqpmError::Capacity {
                n: self.n_max,
                limit: MAX_ENUMERATION_QUBITS,
            });
        }
        self.vqpm.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceRecord {
    pub n: usize,
    pub seed: u64,
    pub iterations: usize,
    pub exact: bool,
    pub scaled_abs_error: f64,
    pub raw_abs_error: f64,
    pub hamming: usize,
    pub eigengap: f64,
    pub final_success_prob: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRecord {
    pub n: usize,
    pub mean_iterations: f64,
    pub mean_eigengap: f64,
    pub exact_count: usize,
    /// Mean scaled error over non-exact runs; `None` when every run was exact.
    pub mean_abs_error_nonexact: Option<f64>,
    pub mean_hamming_nonexact: Option<f64>,
}

/// Full outcome of one instance, including the optimum and the VQPM trace.
#[derive(Clone, Debug)]
pub struct InstanceOutcome {
    pub record: InstanceRecord,
    pub optimum: Bitstring,
    pub found: Bitstring,
    pub trace: Vec<IterationRecord>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of instance `index` at size `n`: `splitmix64(base ^ splitmix64(n << 32 | index))`.
pub fn instance_seed(base_seed: u64, n: usize, index: usize) -> u64 {
    splitmix64(base_seed ^ splitmix64(((n as u64) << 32) | index as u64))
}

pub fn hamming_distance(a: &Bitstring, b: &Bitstring) -> Result<usize> {
    VqpmError::check_dim(a.len(), b.len())?;
    Ok(a.bits().iter().zip(b.bits()).filter(|(x, y)| x != y).count())
}

pub fn success_probability(v: &StateVector, x: &Bitstring) -> Result<f64> {
    VqpmError::check_dim(v.n(), x.len())?;
    Ok(v.probability(x.index()))
}

/// Solves `p` exhaustively, runs VQPM with the optimum as reference, and
/// compares the two. Variational mode is forced.
pub fn evaluate_instance(p: &QuboInstance, seed: u64, cfg: &VqpmConfig) -> Result<InstanceOutcome> {
    let cfg = VqpmConfig {
        mode: Mode::Variational,
        ..cfg.clone()
    };
    let scaled = scale_problem(p)?;
    let oracle = build_oracle(&scaled)?;
    let (optimum, opt_value) = brute_force_solve(p)?;
    let result = run(&scaled, &cfg, Some(&optimum))?;
    let found = result.found;
    let hamming = hamming_distance(&found, &optimum)?;
    let record = InstanceRecord {
        n: p.n(),
        seed,
        iterations: result.iterations,
        exact: found == optimum,
        scaled_abs_error: (oracle.phase(&found) - oracle.phase(&optimum)).abs(),
        raw_abs_error: (result.found_objective - opt_value).abs(),
        hamming,
        eigengap: eigengap(&oracle),
        final_success_prob: success_probability(&result.final_state, &optimum)?,
    };
    Ok(InstanceOutcome {
        record,
        optimum,
        found,
        trace: result.trace,
    })
}

pub fn run_instance(n: usize, seed: u64, cfg: &VqpmConfig) -> Result<InstanceRecord> {
    let p = generate_random(n, seed)?;
    Ok(evaluate_instance(&p, seed, cfg)?.record)
}

/// Runs every `(n, index)` pair, in parallel when enabled. Records come back
/// ordered by `(n, index)`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<InstanceRecord>> {
    cfg.validate()?;
    let jobs: Vec<(usize, u64)> = (cfg.n_min..=cfg.n_max)
        .flat_map(|n| (0..cfg.instances_per_n).map(move |i| (n, instance_seed(cfg.base_seed, n, i))))
        .collect();
    par::map_items(&jobs, |&(n, seed)| run_instance(n, seed, &cfg.vqpm))
        .into_iter()
        .collect()
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

pub fn aggregate(records: &[InstanceRecord]) -> Result<Vec<AggregateRecord>> {
    if records.is_empty() {
        return Err(VqpmError::Argument("cannot aggregate an empty record list".into()));
    }
    let mut groups: BTreeMap<usize, Vec<&InstanceRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.n).or_default().push(r);
    }
    Ok(groups
        .into_iter()
        .map(|(n, group)| {
            let nonexact: Vec<_> = group.iter().filter(|r| !r.exact).collect();
            AggregateRecord {
                n,
                mean_iterations: mean(group.iter().map(|r| r.iterations as f64)).unwrap_or(0.0),
                mean_eigengap: mean(group.iter().map(|r| r.eigengap)).unwrap_or(0.0),
                exact_count: group.len() - nonexact.len(),
                mean_abs_error_nonexact: mean(nonexact.iter().map(|r| r.scaled_abs_error)),
                mean_hamming_nonexact: mean(nonexact.iter().map(|r| r.hamming as f64)),
            }
        })
        .collect())
}

/// Formats with six significant digits in plain decimal notation.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_nan() { "NaN".into() } else if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).clamp(0, 30) as usize;
    format!("{v:.decimals$}")
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(format_sig6).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> VqpmError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => VqpmError::Io {
            path: PathBuf::new(),
            source: io,
        },
        other => VqpmError::Parse(format!("{other:?}")),
    }
}

pub fn write_instances<W: Write>(out: W, records: &[InstanceRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(INSTANCE_COLUMNS).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.seed.to_string(),
            r.iterations.to_string(),
            r.exact.to_string(),
            format_sig6(r.scaled_abs_error),
            format_sig6(r.raw_abs_error),
            r.hamming.to_string(),
            format_sig6(r.eigengap),
            format_sig6(r.final_success_prob),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| VqpmError::io("", e))
}

pub fn write_aggregates<W: Write>(out: W, aggregates: &[AggregateRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_COLUMNS).map_err(csv_err)?;
    for a in aggregates {
        w.write_record([
            a.n.to_string(),
            format_sig6(a.mean_iterations),
            format_sig6(a.mean_eigengap),
            a.exact_count.to_string(),
            opt_cell(a.mean_abs_error_nonexact),
            opt_cell(a.mean_hamming_nonexact),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| VqpmError::io("", e))
}

pub fn write_trace<W: Write>(out: W, trace: &[IterationRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_COLUMNS).map_err(csv_err)?;
    for t in trace {
        w.write_record([
            t.iteration.to_string(),
            format_sig6(t.p0),
            opt_cell(t.success_prob),
            t.frozen.iter().filter(|&&f| f).count().to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| VqpmError::io("", e))
}

fn emit_with(path: &Path, write: impl FnOnce(BufWriter<File>) -> Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| VqpmError::io(path, e))?;
    write(BufWriter::new(file)).map_err(|e| match e {
        VqpmError::Io { source, .. } => VqpmError::io(path, source),
        other => other,
    })
}

pub fn emit_instances_csv(records: &[InstanceRecord], path: &Path) -> Result<()> {
    emit_with(path, |w| write_instances(w, records))
}

pub fn emit_aggregates_csv(aggregates: &[AggregateRecord], path: &Path) -> Result<()> {
    emit_with(path, |w| write_aggregates(w, aggregates))
}

pub fn emit_trace_csv(trace: &[IterationRecord], path: &Path) -> Result<()> {
    emit_with(path, |w| write_trace(w, trace))
}

fn read_rows(text: &str, columns: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(columns.iter().copied()) {
        return Err(VqpmError::Parse(format!("unexpected header {header:?}")));
    }
    r.records().map(|rec| rec.map_err(csv_err)).collect()
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| VqpmError::Parse(format!("bad {name} field {:?}", rec.get(i))))
}

fn opt_field(rec: &csv::StringRecord, i: usize, name: &str) -> Result<Option<f64>> {
    match rec.get(i) {
        Some("") => Ok(None),
        _ => field(rec, i, name).map(Some),
    }
}

pub fn parse_instances_csv(text: &str) -> Result<Vec<InstanceRecord>> {
    read_rows(text, &INSTANCE_COLUMNS)?
        .iter()
        .map(|rec| {
            Ok(InstanceRecord {
                n: field(rec, 0, "n")?,
                seed: field(rec, 1, "seed")?,
                iterations: field(rec, 2, "iterations")?,
                exact: field(rec, 3, "exact")?,
                scaled_abs_error: field(rec, 4, "scaled_abs_error")?,
                raw_abs_error: field(rec, 5, "raw_abs_error")?,
                hamming: field(rec, 6, "hamming")?,
                eigengap: field(rec, 7, "eigengap")?,
                final_success_prob: field(rec, 8, "final_success_prob")?,
            })
        })
        .collect()
}

pub fn parse_aggregates_csv(text: &str) -> Result<Vec<AggregateRecord>> {
    read_rows(text, &AGGREGATE_COLUMNS)?
        .iter()
        .map(|rec| {
            Ok(AggregateRecord {
                n: field(rec, 0, "n")?,
                mean_iterations: field(rec, 1, "mean_iterations")?,
                mean_eigengap: field(rec, 2, "mean_eigengap")?,
                exact_count: field(rec, 3, "exact_count")?,
                mean_abs_error_nonexact: opt_field(rec, 4, "mean_abs_error_nonexact")?,
                mean_hamming_nonexact: opt_field(rec, 5, "mean_hamming_nonexact")?,
            })
        })
        .collect()
}
