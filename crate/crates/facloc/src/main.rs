use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use facloc::bench;
use facloc::events::{EventSink, JsonLinesSink, NullSink};
use facloc::instance::{self, add_recourse, emit_native, FileFormat, Instance, Variant};
use facloc::kernel::{kernel_search, KernelConfig};
use facloc::master::{self, MasterModel, SolveStatus, SolverConfig};
use facloc::oracle::{audit_cuts, brute_force, OracleError, AUDIT_TOL};
use facloc::report::{status_name, Algo, ConfigSnapshot, RunRecord};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_NO_INCUMBENT: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "facloc",
    version,
    about = "Facility location solvers: branch-and-cut, kernel search, brute force"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and write it in the native format.
    Generate(GenerateArgs),
    /// Solve an instance and print a run record.
    Solve(SolveArgs),
    /// Run a benchmark manifest and print a CSV table.
    Bench(BenchArgs),
    /// Cross-check the solver against brute force and audit its cuts.
    Check(CheckArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::Uflp)]
    variant: VariantArg,
    /// Total capacity / total demand (CFLP only, > 1).
    #[arg(long)]
    ratio: Option<f64>,
    /// Append a recourse facility: "auto" or an explicit penalty.
    #[arg(long)]
    recourse: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Uflp,
    Cflp,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Uflp => Variant::Uflp,
            VariantArg::Cflp => Variant::Cflp,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Benders,
    Kernel,
    Brute,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Orlib,
    Native,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CutModeArg {
    Split,
    Full,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance path (.cap ORLIB, .fl native).
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgoArg::Benders)]
    algo: AlgoArg,
    /// Override the format detected from the extension.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Relative optimality gap tolerance.
    #[arg(long)]
    gap: Option<f64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long, value_enum, default_value_t = CutModeArg::Split)]
    cut_mode: CutModeArg,
    /// Recorded in the run record; generation happens in `generate`.
    #[arg(long)]
    seed: Option<u64>,
    /// Emit the run record as JSON (the default).
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit the run record as CSV instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Write the event log here instead of stderr.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Suppress the event log.
    #[arg(long)]
    quiet: bool,
    #[arg(long)]
    bucket_size: Option<usize>,
    #[arg(long)]
    bucket_passes: Option<usize>,
    /// Disable kernel variable removal.
    #[arg(long)]
    no_removal: bool,
    /// Run the kernel fixing refinement pass.
    #[arg(long)]
    fixing: bool,
    /// Wall-clock budget per restricted kernel MILP.
    #[arg(long)]
    kernel_time_limit: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Concurrent manifest rows; output bytes do not depend on this.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Report measured wall times (breaks byte-reproducibility).
    #[arg(long)]
    wall_times: bool,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Corrupt one cut before auditing (self-test of the checker).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Generate(args) => cmd_generate(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Check(args) => cmd_check(&args),
    };
    ExitCode::from(code)
}

fn fail(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_INPUT
}

fn cmd_generate(args: &GenerateArgs) -> u8 {
    let variant: Variant = args.variant.into();
    let inst = match instance::generate(args.seed, args.n, args.m, variant, args.ratio) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let inst = match &args.recourse {
        None => inst,
        Some(spec) => {
            let penalty = if spec == "auto" {
                inst.recommended_recourse_penalty()
            } else {
                match spec.parse::<f64>() {
                    Ok(p) => p,
                    Err(_) => {
                        return fail(format!(
                            "--recourse expects a number or \"auto\", got {spec:?}"
                        ))
                    }
                }
            };
            match add_recourse(&inst, penalty) {
                Ok(i) => i,
                Err(e) => return fail(e),
            }
        }
    };
    let text = emit_native(&inst);
    match &args.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                return fail(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    EXIT_OK
}

fn load_instance(path: &std::path::Path, format: Option<FormatArg>) -> Result<Instance, String> {
    let format = format.map(|f| match f {
        FormatArg::Orlib => FileFormat::Orlib,
        FormatArg::Native => FileFormat::Native,
    });
    instance::read_file(path, format).map_err(|e| e.to_string())
}

/// Capacitated instances need the recourse column; augment on the fly with a
/// note so solve "just works" on raw ORLIB files.
fn ensure_recourse(inst: Instance) -> Instance {
    if inst.variant() == Variant::Cflp && !inst.has_recourse() {
        let penalty = inst.recommended_recourse_penalty();
        eprintln!(
            "note: adding recourse facility with penalty {penalty:.6} (capacitated instance without one)"
        );
        add_recourse(&inst, penalty).expect("recommended penalty exceeds every assignment cost")
    } else {
        inst
    }
}

fn cmd_solve(args: &SolveArgs) -> u8 {
    let inst = match load_instance(&args.input, args.format) {
        Ok(i) => ensure_recourse(i),
        Err(e) => return fail(e),
    };

    let mut scfg = SolverConfig::default();
    if let Some(g) = args.gap {
        scfg.gap_tol = g;
    }
    scfg.time_limit = args.time_limit;
    scfg.node_limit = args.node_limit;
    scfg.cut_mode = match args.cut_mode {
        CutModeArg::Split => master::CutMode::Split,
        CutModeArg::Full => master::CutMode::Full,
    };

    let kcfg = KernelConfig {
        bucket_size: args.bucket_size,
        max_bucket_passes: args.bucket_passes.unwrap_or(1),
        allow_removal: !args.no_removal,
        fixing_variant: args.fixing,
        milp_time_limit: args.kernel_time_limit,
        ..KernelConfig::default()
    };

    let mut log_file;
    let mut stderr_sink;
    let mut null_sink = NullSink;
    let sink: &mut dyn EventSink = if args.quiet {
        &mut null_sink
    } else if let Some(path) = &args.log {
        match std::fs::File::create(path) {
            Ok(f) => {
                log_file = JsonLinesSink::new(std::io::BufWriter::new(f));
                &mut log_file
            }
            Err(e) => return fail(format!("cannot create {}: {e}", path.display())),
        }
    } else {
        stderr_sink = JsonLinesSink::new(std::io::stderr());
        &mut stderr_sink
    };

    let instance_name = args
        .input
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| args.input.display().to_string());

    let record = match args.algo {
        AlgoArg::Benders => {
            let res = match master::solve(&inst, &scfg, sink) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            RunRecord::from_solve(
                instance_name,
                Algo::Benders,
                ConfigSnapshot {
                    solver: scfg.clone(),
                    kernel: None,
                },
                &res,
                args.seed,
            )
        }
        AlgoArg::Kernel => {
            let res = match kernel_search(&inst, &kcfg, &scfg, sink) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            RunRecord::from_solve(
                instance_name,
                Algo::Kernel,
                ConfigSnapshot {
                    solver: scfg.clone(),
                    kernel: Some(kcfg.clone()),
                },
                &res,
                args.seed,
            )
        }
        AlgoArg::Brute => {
            let start = std::time::Instant::now();
            let opt = match brute_force(&inst) {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            RunRecord {
                instance: instance_name,
                algorithm: Algo::Brute,
                config: ConfigSnapshot {
                    solver: scfg.clone(),
                    kernel: None,
                },
                status: "optimal".into(),
                cost: Some(opt.cost),
                lower_bound: Some(opt.cost),
                gap: Some(0.0),
                n_nodes: opt.evaluated,
                n_cuts: 0,
                wall_time_s: start.elapsed().as_secs_f64(),
                open_facilities: Some((0..opt.y.len()).filter(|&i| opt.y[i]).collect()),
                version: env!("CARGO_PKG_VERSION").into(),
                seed: args.seed,
            }
        }
    };

    if args.csv {
        println!("{}", bench::CSV_HEADER);
        let f = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        let g = |v: Option<f64>| v.map(|x| format!("{x:.3e}")).unwrap_or_default();
        println!(
            "{},{},{},{},{},{},{},{},{:.3}",
            record.instance,
            record.algorithm,
            record.status,
            f(record.cost),
            f(record.lower_bound),
            g(record.gap),
            record.n_nodes,
            record.n_cuts,
            record.wall_time_s
        );
    } else {
        match serde_json::to_string(&record) {
            Ok(line) => println!("{line}"),
            Err(e) => return fail(e),
        }
    }

    if record.has_incumbent() {
        EXIT_OK
    } else {
        EXIT_NO_INCUMBENT
    }
}

fn cmd_bench(args: &BenchArgs) -> u8 {
    let man = match bench::load_manifest(&args.manifest) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let base_dir = args
        .manifest
        .parent()
        .map(std::path::Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let csv = bench::run_manifest(&man, &base_dir, args.jobs, args.wall_times);
    match &args.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, csv) {
                return fail(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => {
            let mut out = std::io::stdout();
            let _ = out.write_all(csv.as_bytes());
        }
    }
    EXIT_OK
}

fn cmd_check(args: &CheckArgs) -> u8 {
    let inst = match load_instance(&args.input, args.format) {
        Ok(i) => ensure_recourse(i),
        Err(e) => return fail(e),
    };
    if inst.n_real_facilities() > 12 {
        return fail(format!(
            "check enumerates every selection and refuses n > 12 (instance has {})",
            inst.n_real_facilities()
        ));
    }

    let scfg = SolverConfig::default();
    let mut model = match MasterModel::new(&inst) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let solve = match model.solve(&scfg, &mut NullSink) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let opt = match brute_force(&inst) {
        Ok(o) => o,
        Err(OracleError::TooLarge { n, max }) => {
            return fail(format!("instance too large for enumeration: {n} > {max}"))
        }
        Err(e) => return fail(e),
    };

    let mut pool = model.pool().to_vec();
    if args.inject_fault && !pool.is_empty() {
        pool[0].intercept += 1.0;
        pool[0].origin_phi += 1.0;
        eprintln!("note: injected a corrupted cut for self-testing");
    }
    let audit = match audit_cuts(&inst, &pool) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };

    let cost_tol = 1e-6 * f64::max(1.0, opt.cost.abs());
    let cost_diff = (solve.upper_bound - opt.cost).abs();
    let statuses_ok = solve.status == SolveStatus::Optimal;
    let costs_ok = cost_diff <= cost_tol;

    println!("instance        : {}", args.input.display());
    println!(
        "solver          : status {} cost {:.9} bound {:.9}",
        status_name(solve.status),
        solve.upper_bound,
        solve.lower_bound
    );
    println!(
        "brute force     : cost {:.9} over {} selections",
        opt.cost, opt.evaluated
    );
    println!("cost difference : {cost_diff:.3e} (tolerance {cost_tol:.3e})");
    println!(
        "cut audit       : {} cuts, {} points, worst violation {:.3e}, max origin residual {:.3e} (tolerance {AUDIT_TOL:.1e})",
        audit.n_cuts, audit.n_points, audit.worst_violation, audit.max_tightness_residual
    );

    if statuses_ok && costs_ok && audit.pass {
        println!("check           : PASS");
        EXIT_OK
    } else {
        let worst = audit
            .worst_violation
            .max(cost_diff)
            .max(audit.max_tightness_residual);
        println!("check           : FAIL (worst residual {worst:.3e})");
        EXIT_CHECK_FAILED
    }
}
