//! Batch command-line front end: `transform`, `verify`, `bench`, `gen`,
//! `dist`.
//!
//! Exit codes are a stable contract for scripting: 0 success, 1 usage,
//! 2 input error, 3 verification failure.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::arch::{self, ArchGraph, DistanceTables};
use crate::circuit::Circuit;
use crate::generators;
use crate::mapping::{self, Mapping, SaParams};
use crate::qasm;
use crate::router::{route, CostParams, RouteReport};
use crate::verify;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "qroute",
    about = "Qubit mapping and routing for connectivity-constrained QPUs",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Transform a logical circuit into one respecting an architecture.
    Transform(TransformOpts),
    /// Check a routed circuit against its source with the tableau oracle.
    Verify(VerifyOpts),
    /// Route every circuit in a directory and tabulate the results.
    Bench(BenchOpts),
    /// Generate fixture circuits (qft, ising, random).
    Gen(GenOpts),
    /// Dump an architecture's distance matrices as CSV.
    Dist(DistOpts),
}

#[derive(Args, Debug, Clone)]
pub struct SaOpts {
    /// Skip simulated annealing; use the naive identity-prefix mapping.
    #[arg(long)]
    pub no_sa: bool,
    /// SA starting temperature.
    #[arg(long, default_value_t = 100.0)]
    pub sa_tmax: f64,
    /// SA minimum temperature.
    #[arg(long, default_value_t = 1.0)]
    pub sa_tmin: f64,
    /// SA temperature decline coefficient per epoch.
    #[arg(long, default_value_t = 0.98)]
    pub sa_delta: f64,
    /// SA iterations per temperature epoch.
    #[arg(long, default_value_t = 100)]
    pub sa_r: u32,
    /// Gates of the circuit prefix scored by SA (C*).
    #[arg(long, default_value_t = 1000)]
    pub sa_cap: usize,
    /// Independent SA runs with derived seeds; the best mapping wins.
    #[arg(long, default_value_t = 1)]
    pub sa_restarts: u32,
    /// Write the SA cost trace (iteration, accepted_cost, best_cost) as CSV.
    #[arg(long)]
    pub sa_trace: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RouterOpts {
    /// Look-ahead layer count; picks a default weight vector.
    #[arg(long)]
    pub layers: Option<usize>,
    /// Comma-separated weights w0,..,wl,ws (layer weights then tail weight).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Stagnation rounds before the remote-CNOT fallback fires
    /// (default: max(1, ceil(diameter / 2))).
    #[arg(long)]
    pub fallback_k: Option<u32>,
    /// Selection look-ahead depth: 0 best child, 1 best grandchild, 2 deeper.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(0..=2))]
    pub depth: u32,
    /// Disable the search-space pruning rule.
    #[arg(long)]
    pub no_prune: bool,
}

impl RouterOpts {
    pub fn cost_params(&self) -> Result<CostParams, CliError> {
        let mut params = CostParams::default();
        if let Some(ws) = &self.weights {
            if ws.len() < 2 {
                return Err(CliError::Usage(
                    "--weights needs at least w0 and ws".into(),
                ));
            }
            params.layer_weights = ws[..ws.len() - 1].to_vec();
            params.tail_weight = ws[ws.len() - 1];
        }
        if let Some(l) = self.layers {
            if self.weights.is_some() {
                if params.layer_weights.len() != l + 1 {
                    return Err(CliError::Usage(format!(
                        "--layers {l} expects {} layer weights, got {}",
                        l + 1,
                        params.layer_weights.len()
                    )));
                }
            } else {
                let table = [1.0, 1.0, 0.8, 0.6, 0.5, 0.45, 0.4];
                if l + 1 > table.len() {
                    return Err(CliError::Usage(format!(
                        "--layers supports up to {} without --weights",
                        table.len() - 1
                    )));
                }
                params.layer_weights = table[..=l].to_vec();
                params.tail_weight = (0.4f64).min(params.layer_weights[l]);
            }
        }
        params.fallback_threshold = self.fallback_k;
        params.lookahead_depth = self.depth;
        params.prune = !self.no_prune;
        params
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(params)
    }
}

#[derive(Args, Debug)]
pub struct TransformOpts {
    /// Input OpenQASM 2.0 file.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Output OpenQASM 2.0 file (stdout when omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Built-in architecture name or JSON description file.
    #[arg(long)]
    pub arch: String,
    /// Write the routing report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Master seed; generated and recorded in the report when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Re-verify the routed circuit and fail (exit 3) on mismatch.
    #[arg(long)]
    pub self_check: bool,
    /// Report wall_time_ms as 0 for byte-reproducible output.
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub sa: SaOpts,
    #[command(flatten)]
    pub router: RouterOpts,
}

#[derive(Args, Debug)]
pub struct VerifyOpts {
    /// The logical (source) circuit.
    #[arg(long)]
    pub logical: PathBuf,
    /// The routed physical circuit.
    #[arg(long)]
    pub physical: PathBuf,
    /// Routing report carrying tau_ini and final_sigma.
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchOpts {
    /// Directory of .qasm files.
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long)]
    pub arch: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Parallel worker slots (0 = rayon default).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write the summary table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV `name,added` of a compared algorithm; adds improvement ratios.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// Verify every routed circuit.
    #[arg(long)]
    pub self_check: bool,
    #[command(flatten)]
    pub sa: SaOpts,
    #[command(flatten)]
    pub router: RouterOpts,
}

#[derive(Args, Debug)]
pub struct GenOpts {
    #[command(subcommand)]
    pub kind: GenKind,
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// QFT skeleton with decomposed controlled-phase gates.
    Qft {
        #[arg(long)]
        qubits: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Trotterized 1-D Ising evolution (path interaction graph).
    Ising {
        #[arg(long)]
        qubits: usize,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Seeded random CNOT circuit.
    Random {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        cnots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fraction of CNOTs preceded by a random single-qubit gate.
        #[arg(long, default_value_t = 0.0)]
        singles: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MatrixKind {
    /// Undirected hop counts.
    U,
    /// CNOT distances.
    Cnot,
}

#[derive(Args, Debug)]
pub struct DistOpts {
    #[arg(long)]
    pub arch: String,
    #[arg(long, value_enum, default_value_t = MatrixKind::Cnot)]
    pub matrix: MatrixKind,
    /// Output CSV path (stdout when omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Transform(opts) => run_transform(&opts).map(|_| ()),
        Command::Verify(opts) => run_verify(&opts),
        Command::Bench(opts) => run_bench(&opts).map(|_| ()),
        Command::Gen(opts) => run_gen(&opts),
        Command::Dist(opts) => run_dist(&opts),
    }
}

fn load_inputs(path: &Path, arch_name: &str) -> Result<(qasm::Parsed, ArchGraph), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let parsed = qasm::parse_qasm(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let ag = arch::load_arch(arch_name).map_err(input_err)?;
    Ok((parsed, ag))
}

fn is_permutation(values: &[usize]) -> bool {
    let mut seen = vec![false; values.len()];
    values.iter().all(|&v| {
        if v >= seen.len() || seen[v] {
            false
        } else {
            seen[v] = true;
            true
        }
    })
}

/// Derive a per-item seed from the master seed and a name (FNV-1a, stable
/// across platforms and processes).
pub fn derive_seed(master: u64, name: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64 ^ master.wrapping_mul(0x9e3779b97f4a7c15);
    for b in name.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

struct InitialMapping {
    mapping: Mapping,
    sa_cost: Option<u64>,
    sa_start_cost: Option<u64>,
    trace: Vec<mapping::TracePoint>,
}

/// Pick the initial mapping: identity prefix, or best-of-`sa_restarts`
/// simulated annealing runs (stopping early on a zero-cost mapping).
fn initial_mapping(
    circuit: &Circuit,
    ag: &ArchGraph,
    tables: &DistanceTables,
    sa: &SaOpts,
    seed: u64,
) -> Result<InitialMapping, CliError> {
    let core = circuit.cnot_core();
    if sa.no_sa || core.is_empty() {
        return Ok(InitialMapping {
            mapping: Mapping::identity_prefix(circuit.num_qubits, ag.num_nodes),
            sa_cost: None,
            sa_start_cost: None,
            trace: Vec::new(),
        });
    }
    let cstar = mapping::select_cstar(&core, sa.sa_cap).map_err(|e| CliError::Usage(e.to_string()))?;
    let restarts = sa.sa_restarts.max(1);
    let mut best: Option<mapping::SaResult> = None;
    for attempt in 0..restarts {
        let params = SaParams {
            t_max: sa.sa_tmax,
            t_min: sa.sa_tmin,
            delta: sa.sa_delta,
            r: sa.sa_r,
            seed: seed.wrapping_add(attempt as u64),
            subset_cap: sa.sa_cap,
        };
        let res = mapping::sa_initial_mapping(cstar, ag, tables, circuit.num_qubits, &params, None)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let better = best.as_ref().is_none_or(|b| res.cost < b.cost);
        if better {
            best = Some(res);
        }
        if best.as_ref().is_some_and(|b| b.cost == 0) {
            break;
        }
    }
    let best = best.expect("at least one SA run");
    Ok(InitialMapping {
        mapping: best.mapping,
        sa_cost: Some(best.cost),
        sa_start_cost: Some(best.start_cost),
        trace: best.trace,
    })
}

/// Full transform pipeline; returns the report for reuse by `bench`.
pub fn run_transform(opts: &TransformOpts) -> Result<RouteReport, CliError> {
    let (parsed, ag) = load_inputs(&opts.input, &opts.arch)?;
    for w in &parsed.plan.warnings {
        eprintln!("warning: {w}");
    }
    if parsed.circuit.num_qubits > ag.num_nodes {
        return Err(CliError::Input(format!(
            "circuit needs {} qubits but {} has only {}",
            parsed.circuit.num_qubits, ag.name, ag.num_nodes
        )));
    }
    let tables = DistanceTables::build(&ag);
    let params = opts.router.cost_params()?;
    validate_sa(&opts.sa)?;

    let seed = opts.seed.unwrap_or_else(|| {
        use std::time::{SystemTime, UNIX_EPOCH};
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0)
    });

    let initial = initial_mapping(&parsed.circuit, &ag, &tables, &opts.sa, seed)?;
    if let Some(path) = &opts.sa.sa_trace {
        std::fs::write(path, mapping::trace_csv(&initial.trace)).map_err(input_err)?;
    }

    let (routed, mut report) =
        route(&parsed.circuit, &ag, &tables, initial.mapping, params).map_err(input_err)?;
    report.seed = Some(seed);
    report.sa_cost = initial.sa_cost;
    report.sa_start_cost = initial.sa_start_cost;
    report.flattening = parsed.plan.flattening.clone();
    if opts.no_timing {
        report.wall_time_ms = 0;
    }

    if opts.self_check {
        let logical_core: Vec<verify::CliffGate> = parsed
            .circuit
            .cnot_core()
            .iter()
            .map(|g| verify::CliffGate::Cnot {
                control: g.control,
                target: g.target,
            })
            .collect();
        let verdict = verify::check_equivalence(
            &logical_core,
            &routed.clifford_gates(),
            &routed.tau_ini,
            &routed.sigma,
            routed.num_nodes,
        )
        .map_err(input_err)?;
        if !verdict.passed() {
            return Err(CliError::Verification(format!(
                "{} on {}",
                opts.input.display(),
                ag.name
            )));
        }
    }

    let text = qasm::emit_routed(&routed, &parsed.plan);
    match &opts.output {
        Some(path) => std::fs::write(path, text).map_err(input_err)?,
        None => print!("{text}"),
    }
    if let Some(path) = &opts.report {
        let json = serde_json::to_string_pretty(&report).map_err(input_err)?;
        std::fs::write(path, json + "\n").map_err(input_err)?;
    }
    Ok(report)
}

fn validate_sa(sa: &SaOpts) -> Result<(), CliError> {
    let params = SaParams {
        t_max: sa.sa_tmax,
        t_min: sa.sa_tmin,
        delta: sa.sa_delta,
        r: sa.sa_r,
        seed: 0,
        subset_cap: sa.sa_cap,
    };
    params.validate().map_err(|e| CliError::Usage(e.to_string()))
}

pub fn run_verify(opts: &VerifyOpts) -> Result<(), CliError> {
    let logical_text = std::fs::read_to_string(&opts.logical).map_err(input_err)?;
    let physical_text = std::fs::read_to_string(&opts.physical).map_err(input_err)?;
    let report_text = std::fs::read_to_string(&opts.report).map_err(input_err)?;
    let logical = qasm::parse_qasm(&logical_text).map_err(input_err)?;
    let physical = qasm::parse_qasm(&physical_text).map_err(input_err)?;
    let report: RouteReport = serde_json::from_str(&report_text)
        .map_err(|e| CliError::Input(format!("bad report JSON: {e}")))?;

    let tau_ini = Mapping::from_assignment(report.tau_ini.clone(), report.num_physical)
        .map_err(|e| CliError::Input(format!("bad report tau_ini: {e}")))?;
    if report.final_sigma.len() != report.num_physical
        || !is_permutation(&report.final_sigma)
    {
        return Err(CliError::Input(
            "bad report final_sigma: not a permutation of the physical wires".into(),
        ));
    }
    // Both cores are the cx+h gate lists; passthrough Hadamards appear on
    // both sides at matching wires, so exact tableau equality must hold.
    let verdict = verify::check_equivalence(
        &verify::clifford_core(&logical.circuit),
        &verify::clifford_core(&physical.circuit),
        &tau_ini,
        &report.final_sigma,
        report.num_physical,
    )
    .map_err(input_err)?;
    if verdict.passed() {
        println!(
            "PASS: {} == {} under the reported mapping",
            opts.physical.display(),
            opts.logical.display()
        );
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} != {}",
            opts.physical.display(),
            opts.logical.display()
        )))
    }
}

/// One row of the bench table.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub name: String,
    pub original: usize,
    pub output: usize,
    pub added: usize,
    pub time_s: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct BenchSummary {
    pub rows: Vec<BenchRow>,
    /// (n_comp - n_ours) / n_comp per circuit, when a baseline is given.
    pub improvements: Vec<(String, f64)>,
}

impl BenchSummary {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,original,output,added,time_s,status\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.3},{}\n",
                r.name,
                r.original,
                r.output,
                r.added,
                r.time_s,
                r.error.as_deref().unwrap_or("ok")
            ));
        }
        out
    }
}

pub fn run_bench(opts: &BenchOpts) -> Result<BenchSummary, CliError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(&opts.dir)
        .map_err(|e| CliError::Input(format!("{}: {e}", opts.dir.display())))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "qasm"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Input(format!(
            "no .qasm files in {}",
            opts.dir.display()
        )));
    }
    let ag = arch::load_arch(&opts.arch).map_err(input_err)?;
    let tables = DistanceTables::build(&ag);
    let params = opts.router.cost_params()?;
    validate_sa(&opts.sa)?;

    let worker = |path: &PathBuf| -> BenchRow {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let started = Instant::now();
        let run = || -> Result<(usize, usize), CliError> {
            let text = std::fs::read_to_string(path).map_err(input_err)?;
            let parsed = qasm::parse_qasm(&text).map_err(input_err)?;
            if parsed.circuit.num_qubits > ag.num_nodes {
                return Err(CliError::Input("too many qubits".into()));
            }
            let seed = derive_seed(opts.seed, &name);
            let initial = initial_mapping(&parsed.circuit, &ag, &tables, &opts.sa, seed)?;
            let (routed, report) =
                route(&parsed.circuit, &ag, &tables, initial.mapping, params.clone())
                    .map_err(input_err)?;
            if opts.self_check {
                let logical_core: Vec<verify::CliffGate> = parsed
                    .circuit
                    .cnot_core()
                    .iter()
                    .map(|g| verify::CliffGate::Cnot {
                        control: g.control,
                        target: g.target,
                    })
                    .collect();
                let ok = verify::check_equivalence(
                    &logical_core,
                    &routed.clifford_gates(),
                    &routed.tau_ini,
                    &routed.sigma,
                    routed.num_nodes,
                )
                .map_err(input_err)?
                .passed();
                if !ok {
                    return Err(CliError::Verification(name.clone()));
                }
            }
            Ok((report.original_size, report.output_size))
        };
        match run() {
            Ok((original, output)) => BenchRow {
                name,
                original,
                output,
                added: output - original,
                time_s: started.elapsed().as_secs_f64(),
                error: None,
            },
            Err(e) => BenchRow {
                name,
                original: 0,
                output: 0,
                added: 0,
                time_s: started.elapsed().as_secs_f64(),
                error: Some(e.to_string()),
            },
        }
    };

    let rows: Vec<BenchRow> = if opts.jobs == 1 {
        files.iter().map(worker).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(input_err)?;
        pool.install(|| files.par_iter().map(worker).collect())
    };

    let mut summary = BenchSummary {
        rows,
        improvements: Vec::new(),
    };
    if let Some(base) = &opts.baseline {
        let text = std::fs::read_to_string(base).map_err(input_err)?;
        for line in text.lines().skip(1) {
            let mut parts = line.split(',');
            let (Some(name), Some(added)) = (parts.next(), parts.next()) else {
                continue;
            };
            let Ok(n_comp) = added.trim().parse::<f64>() else {
                continue;
            };
            if let Some(row) = summary.rows.iter().find(|r| r.name == name.trim()) {
                if row.error.is_none() && n_comp > 0.0 {
                    let ratio = (n_comp - row.added as f64) / n_comp;
                    summary.improvements.push((row.name.clone(), ratio));
                }
            }
        }
    }

    // Human-readable table.
    println!(
        "{:<24} {:>9} {:>9} {:>7} {:>8}  status",
        "circuit", "original", "output", "added", "time(s)"
    );
    for r in &summary.rows {
        println!(
            "{:<24} {:>9} {:>9} {:>7} {:>8.3}  {}",
            r.name,
            r.original,
            r.output,
            r.added,
            r.time_s,
            r.error.as_deref().unwrap_or("ok")
        );
    }
    for (name, ratio) in &summary.improvements {
        println!("improvement {:<24} {:>6.2}%", name, ratio * 100.0);
    }
    if let Some(out) = &opts.out {
        std::fs::write(out, summary.to_csv()).map_err(input_err)?;
    }
    Ok(summary)
}

pub fn run_gen(opts: &GenOpts) -> Result<(), CliError> {
    let (circuit, path) = match &opts.kind {
        GenKind::Qft { qubits, output } => {
            if *qubits < 2 {
                return Err(CliError::Usage("qft needs at least 2 qubits".into()));
            }
            (generators::qft(*qubits), output)
        }
        GenKind::Ising {
            qubits,
            steps,
            output,
        } => {
            if *qubits < 2 || *steps == 0 {
                return Err(CliError::Usage(
                    "ising needs at least 2 qubits and 1 step".into(),
                ));
            }
            (generators::ising_model(*qubits, *steps), output)
        }
        GenKind::Random {
            qubits,
            cnots,
            seed,
            singles,
            output,
        } => {
            if *qubits < 2 {
                return Err(CliError::Usage("random needs at least 2 qubits".into()));
            }
            if !(0.0..=1.0).contains(singles) {
                return Err(CliError::Usage("--singles must be in [0, 1]".into()));
            }
            (
                generators::random_circuit(*qubits, *cnots, *seed, *singles),
                output,
            )
        }
    };
    std::fs::write(path, qasm::emit_plain(&circuit)).map_err(input_err)?;
    Ok(())
}

pub fn run_dist(opts: &DistOpts) -> Result<(), CliError> {
    let ag = arch::load_arch(&opts.arch).map_err(input_err)?;
    let tables = DistanceTables::build(&ag);
    let n = ag.num_nodes;
    let mut out = String::new();
    let header: Vec<String> = (0..n).map(|v| format!("v{v}")).collect();
    out.push_str(&format!("node,{}\n", header.join(",")));
    for v in 0..n {
        let row: Vec<String> = (0..n)
            .map(|w| match opts.matrix {
                MatrixKind::U => tables.dist_u(v, w).to_string(),
                MatrixKind::Cnot => tables.cnot_distance_unchecked(v, w).to_string(),
            })
            .collect();
        out.push_str(&format!("v{v},{}\n", row.join(",")));
    }
    match &opts.output {
        Some(path) => std::fs::write(path, out).map_err(input_err)?,
        None => print!("{out}"),
    }
    Ok(())
}
