//! Kernel search matheuristic over the location variables.
//!
//! The root LP relaxation ranks facilities; the most promising form the
//! kernel, the rest are split into buckets. A first restricted MILP runs on
//! the kernel alone, then each bucket is scanned: the restricted problem
//! frees kernel plus bucket, demands strict improvement over the incumbent,
//! and requires at least one bucket variable to open. Improving bucket
//! variables join the kernel; members idle for too long may be dropped; an
//! optional final pass fixes variables open in every improving solution.
//!
//! All restricted MILPs run through one shared [`MasterModel`], so cuts
//! generated anywhere keep strengthening later solves (restrictions only add
//! constraints, cut validity is unaffected).

use serde::{Deserialize, Serialize};

use crate::events::{EventSink, PhaseSink};
use crate::instance::Instance;
use crate::master::{
    MasterModel, Restriction, SideRow, SolveError, SolveResult, SolveStatus, SolverConfig,
};
use crate::simplex::Relation;
use crate::slave::evaluate_binary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// `None` picks `max(2, ceil(n/10))` over the real facilities.
    pub bucket_size: Option<usize>,
    pub max_bucket_passes: usize,
    pub allow_removal: bool,
    /// Consecutive restricted solutions a kernel member may sit at zero
    /// before removal.
    pub removal_patience: u32,
    /// Run the final variable-fixing refinement pass.
    pub fixing_variant: bool,
    /// Wall-clock budget per restricted MILP.
    pub milp_time_limit: Option<f64>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            bucket_size: None,
            max_bucket_passes: 1,
            allow_removal: true,
            removal_patience: 2,
            fixing_variant: false,
            milp_time_limit: None,
        }
    }
}

impl KernelConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if self.bucket_size == Some(0) {
            return Err(SolveError::BadConfig("bucket_size must be >= 1".into()));
        }
        if self.removal_patience == 0 {
            return Err(SolveError::BadConfig(
                "removal_patience must be >= 1".into(),
            ));
        }
        if self.max_bucket_passes == 0 {
            return Err(SolveError::BadConfig(
                "max_bucket_passes must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn effective_bucket_size(&self, n_real: usize) -> usize {
        self.bucket_size
            .unwrap_or_else(|| (n_real.div_ceil(10)).max(2))
    }
}

/// Kernel state: the promising set, the bucket queue, the incumbent, and
/// per-member inactivity counters.
#[derive(Debug, Clone)]
pub struct KernelState {
    pub kernel: Vec<usize>,
    pub buckets: Vec<Vec<usize>>,
    pub incumbent: Option<(Vec<bool>, f64)>,
    pub iteration: usize,
    pub inactivity: Vec<u32>,
    /// Lower bound of the unrestricted root LP.
    pub root_bound: f64,
}

/// Rank facilities by LP value descending (ties: reduced cost ascending, then
/// index), take the fractional-support as kernel (at least the top one), and
/// chunk the rest into buckets.
pub fn partition_kernel(
    y: &[f64],
    reduced_costs: &[f64],
    dummy: Option<usize>,
    integer_tol: f64,
    bucket_size: usize,
) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut order: Vec<usize> = (0..y.len()).filter(|&i| Some(i) != dummy).collect();
    order.sort_by(|&a, &b| {
        y[b].total_cmp(&y[a])
            .then(reduced_costs[a].total_cmp(&reduced_costs[b]))
            .then(a.cmp(&b))
    });
    let mut kernel: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| y[i] > integer_tol)
        .collect();
    if kernel.is_empty() {
        kernel.push(order[0]);
    }
    let rest: Vec<usize> = order
        .iter()
        .copied()
        .filter(|i| !kernel.contains(i))
        .collect();
    let buckets = rest.chunks(bucket_size).map(<[usize]>::to_vec).collect();
    (kernel, buckets)
}

/// Build the initial kernel state from the root LP relaxation, returning the
/// master model (with its warm cut pool) for the search to reuse.
pub fn initial_kernel<'a>(
    inst: &'a Instance,
    kcfg: &KernelConfig,
    scfg: &SolverConfig,
    sink: &mut dyn EventSink,
) -> Result<(KernelState, MasterModel<'a>), SolveError> {
    kcfg.validate()?;
    let mut model = MasterModel::new(inst)?;
    let mut root_sink = PhaseSink::new(sink, "kernel:root");
    let root = model.solve_root(scfg, &mut root_sink)?;
    let bucket_size = kcfg.effective_bucket_size(inst.n_real_facilities());
    let (kernel, buckets) = partition_kernel(
        &root.y,
        &root.reduced_costs,
        inst.dummy_index(),
        scfg.integer_tol,
        bucket_size,
    );
    let inactivity = vec![0; kernel.len()];
    Ok((
        KernelState {
            kernel,
            buckets,
            incumbent: None,
            iteration: 0,
            inactivity,
            root_bound: root.bound,
        },
        model,
    ))
}

/// One restricted MILP: free variables in `free` plus `pin1` (pinned open),
/// everything else pinned closed; optional inclusive cutoff and a covering
/// row over `bucket_cover`.
pub fn restricted_milp(
    model: &mut MasterModel<'_>,
    free: &[usize],
    pin1: &[usize],
    cutoff: Option<f64>,
    bucket_cover: Option<&[usize]>,
    scfg: &SolverConfig,
    sink: &mut dyn EventSink,
) -> Result<SolveResult, SolveError> {
    let inst = model.instance();
    let n = inst.n_facilities();
    let mut rest = Restriction {
        y_lower: vec![0.0; n],
        y_upper: vec![0.0; n],
        extra_rows: Vec::new(),
        cutoff,
    };
    for &i in free {
        rest.y_upper[i] = 1.0;
    }
    for &i in pin1 {
        rest.pin_one(i);
    }
    if let Some(d) = inst.dummy_index() {
        rest.pin_one(d);
    }
    if let Some(cover) = bucket_cover {
        let mut coeffs = vec![0.0; n];
        for &i in cover {
            coeffs[i] = 1.0;
        }
        rest.extra_rows.push(SideRow {
            coeffs,
            relation: Relation::Ge,
            rhs: 1.0,
        });
    }
    model.solve_restricted(scfg, &rest, sink)
}

/// Run the kernel search from scratch.
pub fn kernel_search(
    inst: &Instance,
    kcfg: &KernelConfig,
    scfg: &SolverConfig,
    sink: &mut dyn EventSink,
) -> Result<SolveResult, SolveError> {
    let (state, mut model) = initial_kernel(inst, kcfg, scfg, sink)?;
    let mut result = kernel_search_from(&mut model, state, kcfg, scfg, sink)?;
    // Count the root loop's cuts too: the model started with an empty pool.
    result.n_cuts = model.pool().len() as u64;
    Ok(result)
}

/// Run the search from an explicit state (tests use this to seed the kernel
/// with every variable, which makes the heuristic exact).
pub fn kernel_search_from(
    model: &mut MasterModel<'_>,
    mut state: KernelState,
    kcfg: &KernelConfig,
    scfg: &SolverConfig,
    sink: &mut dyn EventSink,
) -> Result<SolveResult, SolveError> {
    kcfg.validate()?;
    let start = std::time::Instant::now();
    let inst = model.instance();
    let n = inst.n_facilities();
    let dummy = inst.dummy_index();
    let mut milp_cfg = scfg.clone();
    if kcfg.milp_time_limit.is_some() {
        milp_cfg.time_limit = kcfg.milp_time_limit;
    }
    let mut total_nodes = 0u64;
    let mut total_cuts = 0u64;
    let mut improving: Vec<Vec<bool>> = Vec::new();

    // Membership spell counters travel with `state.kernel` by position.
    let absorb = |state: &mut KernelState,
                      improving: &mut Vec<Vec<bool>>,
                      sol: &SolveResult,
                      bucket: &[usize]| {
        let y = sol.best_y.as_ref().expect("improving solve has a solution");
        state.incumbent = Some((y.clone(), sol.upper_bound));
        improving.push(y.clone());
        for &i in bucket {
            if y[i] && !state.kernel.contains(&i) {
                state.kernel.push(i);
                state.inactivity.push(0);
            }
        }
        for (pos, &i) in state.kernel.iter().enumerate() {
            if y[i] {
                state.inactivity[pos] = 0;
            } else {
                state.inactivity[pos] += 1;
            }
        }
    };
    let drop_idle = |state: &mut KernelState, kcfg: &KernelConfig| {
        if !kcfg.allow_removal {
            return;
        }
        let support: Vec<usize> = state
            .incumbent
            .as_ref()
            .map(|(y, _)| (0..y.len()).filter(|&i| y[i]).collect())
            .unwrap_or_default();
        let mut keep = Vec::with_capacity(state.kernel.len());
        let mut counters = Vec::with_capacity(state.kernel.len());
        for (pos, &i) in state.kernel.iter().enumerate() {
            if state.inactivity[pos] < kcfg.removal_patience || support.contains(&i) {
                keep.push(i);
                counters.push(state.inactivity[pos]);
            }
        }
        state.kernel = keep;
        state.inactivity = counters;
    };

    // Phase 1: the kernel alone.
    {
        let mut phase_sink = PhaseSink::new(sink, "kernel:init");
        let kernel = state.kernel.clone();
        let sol = restricted_milp(model, &kernel, &[], None, None, &milp_cfg, &mut phase_sink)?;
        total_nodes += sol.n_nodes;
        total_cuts += sol.n_cuts;
        state.iteration += 1;
        if sol.best_y.is_some() {
            absorb(&mut state, &mut improving, &sol, &[]);
            drop_idle(&mut state, kcfg);
        }
    }

    // Phase 2: bucket scans.
    'passes: for pass in 0..kcfg.max_bucket_passes {
        let mut improved_this_pass = false;
        for b in 0..state.buckets.len() {
            let bucket = state.buckets[b].clone();
            if bucket.iter().all(|i| state.kernel.contains(i)) {
                continue;
            }
            let cutoff = state.incumbent.as_ref().map(|(_, c)| c - 1e-9);
            let mut free = state.kernel.clone();
            for &i in &bucket {
                if !free.contains(&i) {
                    free.push(i);
                }
            }
            let phase = format!("kernel:pass{}:bucket{}", pass + 1, b + 1);
            let mut phase_sink = PhaseSink::new(sink, phase);
            let sol = restricted_milp(
                model,
                &free,
                &[],
                cutoff,
                Some(&bucket),
                &milp_cfg,
                &mut phase_sink,
            )?;
            total_nodes += sol.n_nodes;
            total_cuts += sol.n_cuts;
            state.iteration += 1;
            let improved = sol.best_y.is_some()
                && state
                    .incumbent
                    .as_ref()
                    .is_none_or(|(_, c)| sol.upper_bound < *c);
            if improved {
                improved_this_pass = true;
                absorb(&mut state, &mut improving, &sol, &bucket);
                drop_idle(&mut state, kcfg);
            }
            if scfg
                .time_limit
                .is_some_and(|tl| start.elapsed().as_secs_f64() >= tl)
            {
                break 'passes;
            }
        }
        if !improved_this_pass {
            break;
        }
    }

    // Phase 3: optional fixing refinement over the union of improving
    // supports, pinning variables open in all of them.
    if kcfg.fixing_variant && !improving.is_empty() {
        let mut always = vec![true; n];
        let mut ever = vec![false; n];
        for y in &improving {
            for i in 0..n {
                always[i] &= y[i];
                ever[i] |= y[i];
            }
        }
        let pin1: Vec<usize> = (0..n)
            .filter(|&i| always[i] && Some(i) != dummy)
            .collect();
        let free: Vec<usize> = (0..n)
            .filter(|&i| {
                Some(i) != dummy && !pin1.contains(&i) && (ever[i] || state.kernel.contains(&i))
            })
            .collect();
        let cutoff = state.incumbent.as_ref().map(|(_, c)| c - 1e-9);
        let mut phase_sink = PhaseSink::new(sink, "kernel:fixing");
        let sol = restricted_milp(
            model,
            &free,
            &pin1,
            cutoff,
            None,
            &milp_cfg,
            &mut phase_sink,
        )?;
        total_nodes += sol.n_nodes;
        total_cuts += sol.n_cuts;
        state.iteration += 1;
        if sol.best_y.is_some()
            && state
                .incumbent
                .as_ref()
                .is_none_or(|(_, c)| sol.upper_bound < *c)
        {
            absorb(&mut state, &mut improving, &sol, &[]);
        }
    }

    // Fall back to the recourse-only selection when nothing was feasible.
    if state.incumbent.is_none() && inst.has_recourse() {
        let mut y = vec![false; n];
        y[dummy.unwrap()] = true;
        let cost = evaluate_binary(inst, &y)?;
        state.incumbent = Some((y, cost));
    }

    let lb = state.root_bound;
    let (best_y, ub) = match state.incumbent {
        Some((y, c)) => (Some(y), c),
        None => (None, f64::INFINITY),
    };
    let gap = if ub.is_finite() {
        ((ub - lb) / f64::max(1.0, ub.abs())).max(0.0)
    } else {
        f64::INFINITY
    };
    let status = if best_y.is_none() {
        SolveStatus::Infeasible
    } else if gap <= scfg.gap_tol {
        SolveStatus::Optimal
    } else {
        SolveStatus::GapLimit
    };
    Ok(SolveResult {
        status,
        best_y,
        upper_bound: ub,
        lower_bound: lb,
        gap,
        n_nodes: total_nodes,
        n_cuts: total_cuts,
        wall_time: start.elapsed().as_secs_f64(),
    })
}
