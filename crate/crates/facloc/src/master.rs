//! LP-based branch-and-cut over the location variables.
//!
//! The master problem keeps an epigraph variable `w` under-approximated by a
//! growing pool of supporting hyperplanes from [`crate::slave`]. The root runs
//! a cutting-plane loop, then best-bound branch-and-bound takes over:
//! fractional points may separate further cuts, and every integer candidate
//! passes a mandatory lazy check — its exact subproblem value is computed and
//! the candidate is accepted as incumbent only once the master's `w` matches
//! it, which is what keeps fathoming sound. Cuts are globally valid (the value
//! function is convex), so one pool serves every node and every restricted
//! solve sharing the model.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::{Action, Event, EventSink};
use crate::instance::{Instance, Variant};
use crate::simplex::{
    solve_lp, LPModel, LinearConstraint, LpError, LpStatus, Relation, SimplexConfig,
};
use crate::slave::{evaluate_binary, make_cut, solve_slave, BendersCut, SlaveError};

/// Relative violation required before a cut enters the pool.
const SEPARATION_TOL: f64 = 1e-7;
/// Relative tolerance for accepting an integer candidate's `w`.
const ACCEPT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutMode {
    /// Fixed costs stay linear in the master; `w` prices assignment only.
    Split,
    /// `w` covers fixed plus assignment cost (the literal epigraph form).
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchRule {
    MostFractional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeSelection {
    BestBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub gap_tol: f64,
    pub time_limit: Option<f64>,
    pub node_limit: Option<u64>,
    pub root_cut_rounds: usize,
    /// Relative root bound improvement below which the cut loop stops.
    pub root_stall_tol: f64,
    pub node_cut_rounds: usize,
    pub integer_tol: f64,
    pub cut_mode: CutMode,
    pub branching: BranchRule,
    pub node_selection: NodeSelection,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gap_tol: 1e-6,
            time_limit: None,
            node_limit: None,
            root_cut_rounds: 50,
            root_stall_tol: 1e-7,
            node_cut_rounds: 1,
            integer_tol: 1e-6,
            cut_mode: CutMode::Split,
            branching: BranchRule::MostFractional,
            node_selection: NodeSelection::BestBound,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        for (name, v) in [
            ("gap_tol", self.gap_tol),
            ("root_stall_tol", self.root_stall_tol),
            ("integer_tol", self.integer_tol),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(SolveError::BadConfig(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    GapLimit,
    TimeLimit,
    Infeasible,
}

/// Outcome of a solve. `gap = (ub - lb) / max(1, |ub|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub best_y: Option<Vec<bool>>,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub gap: f64,
    pub n_nodes: u64,
    pub n_cuts: u64,
    pub wall_time: f64,
}

impl SolveResult {
    /// Equality ignoring wall time, for determinism checks.
    pub fn same_outcome(&self, other: &SolveResult) -> bool {
        self.status == other.status
            && self.best_y == other.best_y
            && self.upper_bound == other.upper_bound
            && self.lower_bound == other.lower_bound
            && self.n_nodes == other.n_nodes
            && self.n_cuts == other.n_cuts
    }
}

fn relative_gap(lb: f64, ub: f64) -> f64 {
    if !ub.is_finite() {
        return f64::INFINITY;
    }
    ((ub - lb) / f64::max(1.0, ub.abs())).max(0.0)
}

/// A side constraint over the location variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SideRow {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Per-call restriction of the master: variable bounds over y, extra rows,
/// and an inclusive objective cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    pub y_lower: Vec<f64>,
    pub y_upper: Vec<f64>,
    pub extra_rows: Vec<SideRow>,
    pub cutoff: Option<f64>,
}

impl Restriction {
    pub fn free(inst: &Instance) -> Self {
        let n = inst.n_facilities();
        Restriction {
            y_lower: vec![0.0; n],
            y_upper: vec![1.0; n],
            extra_rows: Vec::new(),
            cutoff: None,
        }
    }

    pub fn pin_zero(&mut self, facility: usize) {
        self.y_lower[facility] = 0.0;
        self.y_upper[facility] = 0.0;
    }

    pub fn pin_one(&mut self, facility: usize) {
        self.y_lower[facility] = 1.0;
        self.y_upper[facility] = 1.0;
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("capacitated instances must carry a recourse facility before solving")]
    RecourseRequired,
    #[error(transparent)]
    Slave(#[from] SlaveError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("invalid solver configuration: {0}")]
    BadConfig(String),
    #[error("node processing did not converge: {0}")]
    NodeLoop(String),
}

/// Root cutting-plane outcome.
#[derive(Debug, Clone)]
pub struct RootResult {
    /// Valid global lower bound from the final master LP.
    pub bound: f64,
    /// The (possibly fractional) LP point.
    pub y: Vec<f64>,
    /// Reduced costs of the location variables in the final master LP.
    pub reduced_costs: Vec<f64>,
    pub rounds: usize,
}

/// Most-fractional branching variable, ties to the lowest index; `None` when
/// every component is within `integer_tol` of binary.
pub fn most_fractional(y: &[f64], integer_tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in y.iter().enumerate() {
        let frac = v.min(1.0 - v);
        if frac <= integer_tol {
            continue;
        }
        match best {
            Some((_, bf)) if bf >= frac => {}
            _ => best = Some((i, frac)),
        }
    }
    best.map(|(i, _)| i)
}

struct Node {
    id: u64,
    depth: u32,
    bound: f64,
    y_lower: Vec<f64>,
    y_upper: Vec<f64>,
}

struct NodeOrd {
    bound: f64,
    depth: u32,
    id: u64,
}

impl PartialEq for NodeOrd {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for NodeOrd {}
impl PartialOrd for NodeOrd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for NodeOrd {
    // BinaryHeap is a max-heap; order so that pop() yields the smallest
    // bound, deepest first on ties, then lowest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.id.cmp(&self.id))
    }
}

/// The master problem: instance, optional side constraints over y, and the
/// global cut pool shared by every solve driven through this model.
pub struct MasterModel<'a> {
    instance: &'a Instance,
    side_rows: Vec<SideRow>,
    pool: Vec<BendersCut>,
    lp_cfg: SimplexConfig,
}

impl<'a> MasterModel<'a> {
    /// Capacitated instances must carry a recourse column so the subproblem
    /// is feasible at every selection the tree can visit.
    pub fn new(instance: &'a Instance) -> Result<Self, SolveError> {
        if instance.variant() == Variant::Cflp && !instance.has_recourse() {
            return Err(SolveError::RecourseRequired);
        }
        Ok(MasterModel {
            instance,
            side_rows: Vec::new(),
            pool: Vec::new(),
            lp_cfg: SimplexConfig::default(),
        })
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn add_side_row(&mut self, row: SideRow) {
        assert_eq!(row.coeffs.len(), self.instance.n_facilities());
        self.side_rows.push(row);
    }

    pub fn pool(&self) -> &[BendersCut] {
        &self.pool
    }

    /// Solve over the full binary box.
    pub fn solve(
        &mut self,
        cfg: &SolverConfig,
        sink: &mut dyn EventSink,
    ) -> Result<SolveResult, SolveError> {
        let rest = Restriction::free(self.instance);
        self.solve_restricted(cfg, &rest, sink)
    }

    /// Run only the root cutting-plane loop and report the bound and LP point.
    pub fn solve_root(
        &mut self,
        cfg: &SolverConfig,
        sink: &mut dyn EventSink,
    ) -> Result<RootResult, SolveError> {
        cfg.validate()?;
        let rest = Restriction::free(self.instance);
        let start = Instant::now();
        match self.root_loop(cfg, &rest, sink, start)? {
            RootOutcome::Converged(root) | RootOutcome::OutOfTime(root) => Ok(root),
            RootOutcome::Infeasible => Err(SolveError::Lp(LpError::NumericalBreakdown(
                "root LP infeasible on an unrestricted box".into(),
            ))),
        }
    }

    fn y_dim(&self) -> usize {
        self.instance.n_facilities()
    }

    /// Assemble the master LP for the given node bounds.
    fn assemble(&self, rest: &Restriction, y_lower: &[f64], y_upper: &[f64], cfg: &SolverConfig) -> LPModel {
        let n = self.y_dim();
        let inst = self.instance;
        let n_vars = n + 1; // y then w
        let fixed = inst.fixed_costs();

        let mut objective = vec![0.0; n_vars];
        if cfg.cut_mode == CutMode::Split {
            objective[..n].copy_from_slice(fixed);
        }
        objective[n] = 1.0;

        let mut bounds: Vec<(f64, f64)> = y_lower
            .iter()
            .zip(y_upper)
            .map(|(&lo, &hi)| (lo, hi))
            .collect();
        if let Some(d) = inst.dummy_index() {
            bounds[d] = (1.0, 1.0);
        }
        // Assignment cost is nonnegative, so w >= 0 is always valid.
        bounds.push((0.0, f64::INFINITY));

        let mut constraints = Vec::with_capacity(self.pool.len() + self.side_rows.len() + 2);
        for cut in &self.pool {
            let mut coeffs = vec![0.0; n_vars];
            for i in 0..n {
                let shift = if cfg.cut_mode == CutMode::Full {
                    fixed[i]
                } else {
                    0.0
                };
                coeffs[i] = -(cut.coeff[i] + shift);
            }
            coeffs[n] = 1.0;
            constraints.push(LinearConstraint {
                coeffs,
                relation: Relation::Ge,
                rhs: cut.intercept,
            });
        }
        for row in self.side_rows.iter().chain(&rest.extra_rows) {
            let mut coeffs = row.coeffs.clone();
            coeffs.push(0.0);
            constraints.push(LinearConstraint {
                coeffs,
                relation: row.relation,
                rhs: row.rhs,
            });
        }
        // Without a recourse column at least one facility must open; the
        // covering row keeps every LP point inside the subproblem's domain.
        if !inst.has_recourse() {
            let mut coeffs = vec![1.0; n];
            coeffs.push(0.0);
            constraints.push(LinearConstraint {
                coeffs,
                relation: Relation::Ge,
                rhs: 1.0,
            });
        }
        if let Some(cutoff) = rest.cutoff {
            let mut coeffs = vec![0.0; n_vars];
            if cfg.cut_mode == CutMode::Split {
                coeffs[..n].copy_from_slice(fixed);
            }
            coeffs[n] = 1.0;
            constraints.push(LinearConstraint {
                coeffs,
                relation: Relation::Le,
                rhs: cutoff,
            });
        }
        LPModel {
            objective,
            constraints,
            bounds,
        }
    }

    /// The `w` value an integer or fractional point must reach to be
    /// cut-free, given the subproblem value `phi` there.
    fn needed_w(&self, phi: f64, y: &[f64], cfg: &SolverConfig) -> f64 {
        match cfg.cut_mode {
            CutMode::Split => phi,
            CutMode::Full => {
                phi + self
                    .instance
                    .fixed_costs()
                    .iter()
                    .zip(y)
                    .map(|(f, v)| f * v)
                    .sum::<f64>()
            }
        }
    }

    fn add_cut(&mut self, cut: BendersCut) {
        self.pool.push(cut);
    }

    fn root_loop(
        &mut self,
        cfg: &SolverConfig,
        rest: &Restriction,
        sink: &mut dyn EventSink,
        start: Instant,
    ) -> Result<RootOutcome, SolveError> {
        let inst = self.instance;
        let n = self.y_dim();

        if self.pool.is_empty() {
            // Seed so the first LP is bounded and already carries a
            // supporting hyperplane at the cheapest-assignment point.
            let ones = vec![1.0; n];
            let sr = solve_slave(inst, &ones)?;
            self.add_cut(make_cut(&sr, &ones));
        }

        let mut bound = f64::NEG_INFINITY;
        let mut rounds = 0usize;
        loop {
            let lp = self.assemble(rest, &rest.y_lower, &rest.y_upper, cfg);
            let sol = solve_lp(&lp, &self.lp_cfg)?;
            match sol.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => return Ok(RootOutcome::Infeasible),
                LpStatus::Unbounded => {
                    return Err(SolveError::Lp(LpError::NumericalBreakdown(
                        "master LP unbounded despite seed cut".into(),
                    )))
                }
            }
            let prev = bound;
            bound = bound.max(sol.objective);
            let y = sol.primal[..n].to_vec();
            let w = sol.primal[n];
            let rc = sol.reduced_costs[..n].to_vec();
            rounds += 1;

            let sr = solve_slave(inst, &y)?;
            let needed = self.needed_w(sr.phi_assign, &y, cfg);
            let violated = w < needed - SEPARATION_TOL * f64::max(1.0, needed.abs());
            if violated {
                self.add_cut(make_cut(&sr, &y));
                sink.emit(&Event {
                    time: start.elapsed().as_secs_f64(),
                    node: 0,
                    lb: bound,
                    ub: None,
                    action: Action::Cut,
                    phase: "root".into(),
                });
            }

            let out_of_rounds = rounds >= cfg.root_cut_rounds;
            let stalled =
                rounds > 1 && (bound - prev) <= cfg.root_stall_tol * f64::max(1.0, bound.abs());
            let out_of_time = cfg
                .time_limit
                .is_some_and(|tl| start.elapsed().as_secs_f64() >= tl);
            if !violated || out_of_rounds || stalled || out_of_time {
                let root = RootResult {
                    bound,
                    y,
                    reduced_costs: rc,
                    rounds,
                };
                return Ok(if out_of_time {
                    RootOutcome::OutOfTime(root)
                } else {
                    RootOutcome::Converged(root)
                });
            }
        }
    }

    /// Branch-and-cut over a restricted box. Infeasible is a normal outcome
    /// when the restriction (or its cutoff) excludes every selection.
    pub fn solve_restricted(
        &mut self,
        cfg: &SolverConfig,
        rest: &Restriction,
        sink: &mut dyn EventSink,
    ) -> Result<SolveResult, SolveError> {
        cfg.validate()?;
        let start = Instant::now();
        let inst = self.instance;
        let n = self.y_dim();
        let cuts_before = self.pool.len() as u64;

        let mut ub = f64::INFINITY;
        let mut best_y: Option<Vec<bool>> = None;
        let mut lb = f64::NEG_INFINITY;
        let mut n_nodes: u64 = 0;

        macro_rules! finalize {
            ($status:expr) => {{
                let status = $status;
                let (lb_out, ub_out, gap) = match status {
                    SolveStatus::Infeasible => (f64::INFINITY, f64::INFINITY, 0.0),
                    _ => (lb, ub, relative_gap(lb, ub)),
                };
                return Ok(SolveResult {
                    status,
                    best_y: best_y.clone(),
                    upper_bound: ub_out,
                    lower_bound: lb_out,
                    gap,
                    n_nodes,
                    n_cuts: self.pool.len() as u64 - cuts_before,
                    wall_time: start.elapsed().as_secs_f64(),
                });
            }};
        }

        let root = match self.root_loop(cfg, rest, sink, start)? {
            RootOutcome::Converged(r) => r,
            RootOutcome::OutOfTime(r) => {
                lb = r.bound;
                finalize!(SolveStatus::TimeLimit);
            }
            RootOutcome::Infeasible => finalize!(SolveStatus::Infeasible),
        };
        lb = root.bound;

        // Cheap rounding incumbent so fathoming has teeth from the start.
        {
            let mut y_round: Vec<bool> = root.y.iter().map(|&v| v > 0.5).collect();
            if let Some(d) = inst.dummy_index() {
                y_round[d] = true;
            }
            if !inst.has_recourse() && y_round.iter().all(|&b| !b) {
                let arg = (0..n)
                    .max_by(|&a, &b| root.y[a].total_cmp(&root.y[b]).then(b.cmp(&a)))
                    .unwrap();
                y_round[arg] = true;
            }
            if let Ok(cost) = evaluate_binary(inst, &y_round) {
                if rest.cutoff.is_none_or(|c| cost <= c) {
                    ub = cost;
                    best_y = Some(y_round);
                    sink.emit(&Event {
                        time: start.elapsed().as_secs_f64(),
                        node: 0,
                        lb,
                        ub: Some(ub),
                        action: Action::Incumbent,
                        phase: "root".into(),
                    });
                }
            }
        }

        let mut heap: BinaryHeap<NodeOrd> = BinaryHeap::new();
        let mut nodes: Vec<Option<Node>> = Vec::new();
        let mut next_id: u64 = 0;
        let push_node = |heap: &mut BinaryHeap<NodeOrd>,
                             nodes: &mut Vec<Option<Node>>,
                             next_id: &mut u64,
                             depth: u32,
                             bound: f64,
                             y_lower: Vec<f64>,
                             y_upper: Vec<f64>| {
            let id = *next_id;
            *next_id += 1;
            nodes.push(Some(Node {
                id,
                depth,
                bound,
                y_lower,
                y_upper,
            }));
            heap.push(NodeOrd { bound, depth, id });
        };
        push_node(
            &mut heap,
            &mut nodes,
            &mut next_id,
            0,
            root.bound,
            rest.y_lower.clone(),
            rest.y_upper.clone(),
        );

        while let Some(top) = heap.pop() {
            let node = nodes[top.id as usize].take().expect("node queued twice");
            n_nodes += 1;

            // Best-bound order makes the popped bound the global one.
            lb = lb.max(node.bound).min(ub);
            if relative_gap(lb, ub) <= cfg.gap_tol && best_y.is_some() {
                finalize!(SolveStatus::Optimal);
            }
            if cfg
                .time_limit
                .is_some_and(|tl| start.elapsed().as_secs_f64() >= tl)
            {
                finalize!(SolveStatus::TimeLimit);
            }
            if cfg.node_limit.is_some_and(|nl| n_nodes > nl) {
                finalize!(SolveStatus::GapLimit);
            }

            let fathom_margin = |ub: f64| {
                if ub.is_finite() {
                    0.1 * cfg.gap_tol * f64::max(1.0, ub.abs())
                } else {
                    0.0
                }
            };

            let mut node = node;
            let mut cut_rounds = 0usize;
            let mut inner = 0usize;
            loop {
                inner += 1;
                if inner > 10_000 {
                    return Err(SolveError::NodeLoop(format!(
                        "node {} exceeded the lazy-check iteration cap",
                        node.id
                    )));
                }
                let lp = self.assemble(rest, &node.y_lower, &node.y_upper, cfg);
                let sol = solve_lp(&lp, &self.lp_cfg)?;
                match sol.status {
                    LpStatus::Optimal => {}
                    LpStatus::Infeasible => {
                        sink.emit(&Event {
                            time: start.elapsed().as_secs_f64(),
                            node: node.id,
                            lb,
                            ub: ub.is_finite().then_some(ub),
                            action: Action::Fathom,
                            phase: "tree".into(),
                        });
                        break;
                    }
                    LpStatus::Unbounded => {
                        return Err(SolveError::Lp(LpError::NumericalBreakdown(
                            "node LP unbounded".into(),
                        )))
                    }
                }
                node.bound = node.bound.max(sol.objective);
                if node.bound >= ub - fathom_margin(ub) {
                    sink.emit(&Event {
                        time: start.elapsed().as_secs_f64(),
                        node: node.id,
                        lb,
                        ub: ub.is_finite().then_some(ub),
                        action: Action::Fathom,
                        phase: "tree".into(),
                    });
                    break;
                }
                let y = &sol.primal[..n];
                let w = sol.primal[n];

                match most_fractional(y, cfg.integer_tol) {
                    None => {
                        // Integer candidate: mandatory lazy check.
                        let mut y_bin: Vec<bool> = y.iter().map(|&v| v > 0.5).collect();
                        if let Some(d) = inst.dummy_index() {
                            y_bin[d] = true;
                        }
                        let y_exact: Vec<f64> =
                            y_bin.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
                        let sr = solve_slave(inst, &y_exact)?;
                        let needed = self.needed_w(sr.phi_assign, &y_exact, cfg);
                        if w >= needed - ACCEPT_TOL * f64::max(1.0, needed.abs()) {
                            let cost = evaluate_binary(inst, &y_bin)?;
                            let acceptable = rest.cutoff.is_none_or(|c| cost <= c);
                            if acceptable && cost < ub {
                                ub = cost;
                                best_y = Some(y_bin);
                                sink.emit(&Event {
                                    time: start.elapsed().as_secs_f64(),
                                    node: node.id,
                                    lb,
                                    ub: Some(ub),
                                    action: Action::Incumbent,
                                    phase: "tree".into(),
                                });
                            }
                            sink.emit(&Event {
                                time: start.elapsed().as_secs_f64(),
                                node: node.id,
                                lb,
                                ub: ub.is_finite().then_some(ub),
                                action: Action::Fathom,
                                phase: "tree".into(),
                            });
                            break;
                        }
                        self.add_cut(make_cut(&sr, &y_exact));
                        sink.emit(&Event {
                            time: start.elapsed().as_secs_f64(),
                            node: node.id,
                            lb,
                            ub: ub.is_finite().then_some(ub),
                            action: Action::Cut,
                            phase: "tree".into(),
                        });
                        continue;
                    }
                    Some(branch_var) => {
                        if cut_rounds < cfg.node_cut_rounds {
                            cut_rounds += 1;
                            let sr = solve_slave(inst, y)?;
                            let needed = self.needed_w(sr.phi_assign, y, cfg);
                            if w < needed - SEPARATION_TOL * f64::max(1.0, needed.abs()) {
                                self.add_cut(make_cut(&sr, y));
                                sink.emit(&Event {
                                    time: start.elapsed().as_secs_f64(),
                                    node: node.id,
                                    lb,
                                    ub: ub.is_finite().then_some(ub),
                                    action: Action::Cut,
                                    phase: "tree".into(),
                                });
                                continue;
                            }
                        }
                        let mut upper0 = node.y_upper.clone();
                        upper0[branch_var] = 0.0;
                        push_node(
                            &mut heap,
                            &mut nodes,
                            &mut next_id,
                            node.depth + 1,
                            node.bound,
                            node.y_lower.clone(),
                            upper0,
                        );
                        let mut lower1 = node.y_lower.clone();
                        lower1[branch_var] = 1.0;
                        push_node(
                            &mut heap,
                            &mut nodes,
                            &mut next_id,
                            node.depth + 1,
                            node.bound,
                            lower1,
                            node.y_upper.clone(),
                        );
                        sink.emit(&Event {
                            time: start.elapsed().as_secs_f64(),
                            node: node.id,
                            lb,
                            ub: ub.is_finite().then_some(ub),
                            action: Action::Branch,
                            phase: "tree".into(),
                        });
                        break;
                    }
                }
            }
        }

        if best_y.is_some() {
            // Tree exhausted: the incumbent is proven optimal.
            lb = ub;
            finalize!(SolveStatus::Optimal);
        }
        finalize!(SolveStatus::Infeasible);
    }
}

enum RootOutcome {
    Converged(RootResult),
    OutOfTime(RootResult),
    Infeasible,
}

/// Convenience: solve an instance with a fresh model.
pub fn solve(
    inst: &Instance,
    cfg: &SolverConfig,
    sink: &mut dyn EventSink,
) -> Result<SolveResult, SolveError> {
    MasterModel::new(inst)?.solve(cfg, sink)
}

/// Convenience: root bound of an instance with a fresh model.
pub fn solve_root(
    inst: &Instance,
    cfg: &SolverConfig,
    sink: &mut dyn EventSink,
) -> Result<RootResult, SolveError> {
    MasterModel::new(inst)?.solve_root(cfg, sink)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::NullSink;
    use crate::instance::add_recourse;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn branch_rule_most_fractional_and_ties() {
        assert_eq!(most_fractional(&[0.5, 0.9], 1e-6), Some(0));
        assert_eq!(most_fractional(&[0.5, 0.5], 1e-6), Some(0));
        assert_eq!(most_fractional(&[1.0, 0.0], 1e-6), None);
        assert_eq!(most_fractional(&[0.25, 0.75], 1e-6), Some(0));
        assert_eq!(most_fractional(&[0.2, 0.6], 1e-6), Some(1));
    }

    #[test]
    fn root_single_facility_reaches_optimum() {
        let inst = Instance::uflp(vec![4.0], vec![vec![7.0]]).unwrap();
        let root = solve_root(&inst, &cfg(), &mut NullSink).unwrap();
        assert!((root.bound - 11.0).abs() < 1e-9);
    }

    #[test]
    fn root_zero_fixed_costs_reaches_assignment_sum() {
        let inst = Instance::uflp(
            vec![0.0, 0.0, 0.0],
            vec![vec![2.0, 9.0], vec![6.0, 3.0], vec![4.0, 4.0]],
        )
        .unwrap();
        let root = solve_root(&inst, &cfg(), &mut NullSink).unwrap();
        assert!((root.bound - 5.0).abs() < 1e-6);
    }

    #[test]
    fn solve_two_facility_example() {
        let inst = Instance::uflp(vec![4.0, 5.0], vec![vec![2.0, 6.0], vec![6.0, 2.0]]).unwrap();
        let res = solve(&inst, &cfg(), &mut NullSink).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert!((res.upper_bound - 12.0).abs() < 1e-9);
        assert_eq!(res.best_y, Some(vec![true, false]));
        assert!((res.lower_bound - res.upper_bound).abs() < 1e-9);
    }

    #[test]
    fn solve_single_facility_with_recourse() {
        let base = Instance::uflp(vec![4.0], vec![vec![7.0]]).unwrap();
        let inst = add_recourse(&base, 100.0).unwrap();
        let res = solve(&inst, &cfg(), &mut NullSink).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert!((res.upper_bound - 11.0).abs() < 1e-9);
    }

    #[test]
    fn cflp_without_recourse_is_rejected() {
        let inst = Instance::cflp(
            vec![1.0, 1.0],
            vec![vec![3.0], vec![7.0]],
            vec![6.0, 6.0],
            vec![10.0],
        )
        .unwrap();
        assert!(matches!(
            MasterModel::new(&inst),
            Err(SolveError::RecourseRequired)
        ));
    }

    #[test]
    fn cflp_with_recourse_solves_to_known_optimum() {
        let base = Instance::cflp(
            vec![1.0, 1.0],
            vec![vec![3.0], vec![7.0]],
            vec![6.0, 6.0],
            vec![10.0],
        )
        .unwrap();
        let inst = add_recourse(&base, 100.0).unwrap();
        let res = solve(&inst, &cfg(), &mut NullSink).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert!((res.upper_bound - 6.6).abs() < 1e-6);
        assert_eq!(res.best_y, Some(vec![true, true, true]));
    }

    #[test]
    fn split_and_full_cut_modes_agree() {
        let inst = crate::instance::generate(11, 6, 12, Variant::Uflp, None).unwrap();
        let split = solve(&inst, &cfg(), &mut NullSink).unwrap();
        let full = solve(
            &inst,
            &SolverConfig {
                cut_mode: CutMode::Full,
                ..cfg()
            },
            &mut NullSink,
        )
        .unwrap();
        assert_eq!(split.status, SolveStatus::Optimal);
        assert_eq!(full.status, SolveStatus::Optimal);
        assert!((split.upper_bound - full.upper_bound).abs() <= 1e-6);
    }

    #[test]
    fn deterministic_repeat() {
        let inst = crate::instance::generate(5, 7, 12, Variant::Uflp, None).unwrap();
        let a = solve(&inst, &cfg(), &mut NullSink).unwrap();
        let b = solve(&inst, &cfg(), &mut NullSink).unwrap();
        assert!(a.same_outcome(&b));
    }

    #[test]
    fn cutoff_below_optimum_is_infeasible() {
        let inst = Instance::uflp(vec![4.0, 5.0], vec![vec![2.0, 6.0], vec![6.0, 2.0]]).unwrap();
        let mut model = MasterModel::new(&inst).unwrap();
        let mut rest = Restriction::free(&inst);
        rest.cutoff = Some(11.9);
        let res = model
            .solve_restricted(&cfg(), &rest, &mut NullSink)
            .unwrap();
        assert_eq!(res.status, SolveStatus::Infeasible);
        assert!(res.best_y.is_none());
    }

    #[test]
    fn side_cardinality_row_is_honored() {
        // Force exactly two open facilities.
        let inst = Instance::uflp(vec![4.0, 5.0], vec![vec![2.0, 6.0], vec![6.0, 2.0]]).unwrap();
        let mut model = MasterModel::new(&inst).unwrap();
        model.add_side_row(SideRow {
            coeffs: vec![1.0, 1.0],
            relation: Relation::Eq,
            rhs: 2.0,
        });
        let res = model.solve(&cfg(), &mut NullSink).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert!((res.upper_bound - 13.0).abs() < 1e-9);
        assert_eq!(res.best_y, Some(vec![true, true]));
    }
}
