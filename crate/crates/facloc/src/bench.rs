//! Benchmark manifests: run a list of (instance, algorithm) pairs and emit a
//! fixed-column CSV.
//!
//! Output is byte-deterministic for a given manifest under any job count:
//! rows are buffered and written in manifest order, and the `time_s` column
//! stays `0.000` unless wall times are explicitly requested.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Deserialize;
use thiserror::Error;

use crate::events::NullSink;
use crate::instance::{self, add_recourse, generate, Instance, Variant};
use crate::kernel::{kernel_search, KernelConfig};
use crate::master::{self, SolverConfig};
use crate::oracle::{brute_force, OracleError};
use crate::report::{status_name, Algo};

pub const CSV_HEADER: &str = "instance,algo,status,cost,bound,gap,nodes,cuts,time_s";

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BenchDefaults {
    pub gap: Option<f64>,
    pub time_limit: Option<f64>,
    pub node_limit: Option<u64>,
    pub bucket_size: Option<usize>,
}

/// One manifest row: either `path` or generator fields (`seed`, `n`, `m`,
/// `variant`, optional `ratio`), plus the algorithm and overrides.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub path: Option<String>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub variant: Option<Variant>,
    pub ratio: Option<f64>,
    pub algo: Algo,
    pub gap: Option<f64>,
    pub time_limit: Option<f64>,
    pub node_limit: Option<u64>,
    pub bucket_size: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub defaults: BenchDefaults,
    #[serde(rename = "run")]
    pub runs: Vec<RunSpec>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("manifest {path}: {source}")]
    Toml {
        path: String,
        source: toml::de::Error,
    },
}

pub fn load_manifest(path: &Path) -> Result<Manifest, BenchError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: display.clone(),
        source,
    })?;
    toml::from_str(&text).map_err(|source| BenchError::Toml {
        path: display,
        source,
    })
}

fn instance_id(spec: &RunSpec) -> String {
    if let Some(p) = &spec.path {
        return Path::new(p)
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| p.clone());
    }
    let variant = spec.variant.unwrap_or(Variant::Uflp);
    let mut id = format!(
        "gen-s{}-n{}-m{}-{}",
        spec.seed.unwrap_or(0),
        spec.n.unwrap_or(0),
        spec.m.unwrap_or(0),
        variant
    );
    if let Some(r) = spec.ratio {
        id.push_str(&format!("-r{r}"));
    }
    id
}

fn load_spec_instance(spec: &RunSpec, base_dir: &Path) -> Result<Instance, String> {
    if let Some(p) = &spec.path {
        let path = base_dir.join(p);
        return instance::read_file(&path, None).map_err(|e| e.to_string());
    }
    let (Some(n), Some(m)) = (spec.n, spec.m) else {
        return Err("generator rows need n and m".into());
    };
    let variant = spec.variant.unwrap_or(Variant::Uflp);
    let inst =
        generate(spec.seed.unwrap_or(0), n, m, variant, spec.ratio).map_err(|e| e.to_string())?;
    if variant == Variant::Cflp {
        let penalty = inst.recommended_recourse_penalty();
        return add_recourse(&inst, penalty).map_err(|e| e.to_string());
    }
    Ok(inst)
}

fn solver_config(man: &Manifest, spec: &RunSpec) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if let Some(g) = spec.gap.or(man.defaults.gap) {
        cfg.gap_tol = g;
    }
    cfg.time_limit = spec.time_limit.or(man.defaults.time_limit);
    cfg.node_limit = spec.node_limit.or(man.defaults.node_limit);
    cfg
}

struct Row {
    instance: String,
    algo: Algo,
    status: String,
    cost: Option<f64>,
    bound: Option<f64>,
    gap: Option<f64>,
    nodes: Option<u64>,
    cuts: Option<u64>,
    time_s: f64,
}

impl Row {
    fn to_csv(&self, wall_times: bool) -> String {
        let opt_f = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        let opt_g = |v: Option<f64>| v.map(|x| format!("{x:.3e}")).unwrap_or_default();
        let opt_u = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{:.3}",
            self.instance,
            self.algo,
            self.status,
            opt_f(self.cost),
            opt_f(self.bound),
            opt_g(self.gap),
            opt_u(self.nodes),
            opt_u(self.cuts),
            if wall_times { self.time_s } else { 0.0 },
        )
    }
}

fn run_row(man: &Manifest, spec: &RunSpec, base_dir: &Path) -> Row {
    let id = instance_id(spec);
    let mut row = Row {
        instance: id,
        algo: spec.algo,
        status: String::new(),
        cost: None,
        bound: None,
        gap: None,
        nodes: None,
        cuts: None,
        time_s: 0.0,
    };
    let inst = match load_spec_instance(spec, base_dir) {
        Ok(i) => i,
        Err(e) => {
            row.status = format!("error: {}", e.replace(',', ";"));
            return row;
        }
    };
    let cfg = solver_config(man, spec);
    let start = std::time::Instant::now();
    match spec.algo {
        Algo::Benders => match master::solve(&inst, &cfg, &mut NullSink) {
            Ok(res) => {
                row.status = status_name(res.status).into();
                row.cost = res.upper_bound.is_finite().then_some(res.upper_bound);
                row.bound = res.lower_bound.is_finite().then_some(res.lower_bound);
                row.gap = res.gap.is_finite().then_some(res.gap);
                row.nodes = Some(res.n_nodes);
                row.cuts = Some(res.n_cuts);
            }
            Err(e) => row.status = format!("error: {e}").replace(',', ";"),
        },
        Algo::Kernel => {
            let kcfg = KernelConfig {
                bucket_size: spec.bucket_size.or(man.defaults.bucket_size),
                ..KernelConfig::default()
            };
            match kernel_search(&inst, &kcfg, &cfg, &mut NullSink) {
                Ok(res) => {
                    row.status = status_name(res.status).into();
                    row.cost = res.upper_bound.is_finite().then_some(res.upper_bound);
                    row.bound = res.lower_bound.is_finite().then_some(res.lower_bound);
                    row.gap = res.gap.is_finite().then_some(res.gap);
                    row.nodes = Some(res.n_nodes);
                    row.cuts = Some(res.n_cuts);
                }
                Err(e) => row.status = format!("error: {e}").replace(',', ";"),
            }
        }
        Algo::Brute => match brute_force(&inst) {
            Ok(opt) => {
                row.status = "optimal".into();
                row.cost = Some(opt.cost);
                row.bound = Some(opt.cost);
                row.gap = Some(0.0);
                row.nodes = Some(opt.evaluated);
                row.cuts = Some(0);
            }
            Err(OracleError::TooLarge { .. }) => row.status = "too-large".into(),
            Err(e) => row.status = format!("error: {e}").replace(',', ";"),
        },
    }
    row.time_s = start.elapsed().as_secs_f64();
    row
}

/// Run every manifest row and return the CSV text. `jobs > 1` runs rows
/// concurrently; output order and bytes do not depend on the job count.
pub fn run_manifest(man: &Manifest, base_dir: &Path, jobs: usize, wall_times: bool) -> String {
    let n = man.runs.len();
    let rows: Mutex<Vec<Option<Row>>> = Mutex::new((0..n).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = jobs.max(1).min(n.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let row = run_row(man, &man.runs[i], base_dir);
                rows.lock().unwrap()[i] = Some(row);
            });
        }
    });
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows.into_inner().unwrap() {
        out.push_str(&row.expect("all rows filled").to_csv(wall_times));
        out.push('\n');
    }
    out
}
