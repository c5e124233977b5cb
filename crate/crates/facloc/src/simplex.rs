//! Bounded-variable revised primal simplex.
//!
//! Dense two-phase implementation returning primal values, row duals, and
//! reduced costs. Sign conventions under minimization: duals of `<=` rows are
//! `<= 0`, duals of `>=` rows are `>= 0`. Variables fixed by equal lower and
//! upper bounds are kept nonbasic at their bound and never priced in, so their
//! reduced costs are always well-defined — the property the cut generation in
//! [`crate::slave`] relies on.
//!
//! Pivoting is deterministic: Dantzig pricing with ties broken by lowest
//! variable index, switching to Bland's rule after a stall, and ratio-test
//! ties resolved by largest pivot magnitude then lowest variable index.

// Dense matrix kernels index in lockstep across several arrays; iterator
// forms obscure them.
#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Row relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// One linear constraint over the structural variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A bounded-variable linear program, minimized.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LPModel {
    pub objective: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
    /// Per-variable `(lower, upper)`; either side may be infinite.
    pub bounds: Vec<(f64, f64)>,
}

impl LPModel {
    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.constraints.len()
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.n_vars();
        if self.bounds.len() != n {
            return Err(LpError::InvalidModel(format!(
                "bounds length {} != variable count {n}",
                self.bounds.len()
            )));
        }
        for (j, &c) in self.objective.iter().enumerate() {
            if c.is_nan() {
                return Err(LpError::InvalidModel(format!("objective[{j}] is NaN")));
            }
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(LpError::InvalidModel(format!(
                    "bounds[{j}] = ({lo}, {hi}) invalid"
                )));
            }
        }
        for (r, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(LpError::InvalidModel(format!(
                    "row {r} length {} != variable count {n}",
                    row.coeffs.len()
                )));
            }
            if row.rhs.is_nan() || row.coeffs.iter().any(|c| c.is_nan()) {
                return Err(LpError::InvalidModel(format!("row {r} contains NaN")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Status of a variable in the final basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    Free,
}

/// Primal/dual/reduced-cost certificate.
///
/// For `Optimal`: primal and dual feasibility hold within `tol_feas`, the
/// primal and dual objectives agree within `tol_gap`, reduced costs of basic
/// variables vanish within `tol_feas`, and complementary slackness holds.
/// For other statuses the vectors are empty.
#[derive(Debug, Clone, PartialEq)]
pub struct LPSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub basis: Vec<VarStatus>,
}

impl LPSolution {
    fn non_optimal(status: LpStatus) -> Self {
        let objective = match status {
            LpStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::NAN,
        };
        LPSolution {
            status,
            objective,
            primal: Vec::new(),
            duals: Vec::new(),
            reduced_costs: Vec::new(),
            basis: Vec::new(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
}

/// Solver tolerances; defaults are standard double-precision practice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexConfig {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub pivot_tol: f64,
    pub max_iters: usize,
    pub refactor_every: usize,
    /// Degenerate pivots before switching to Bland's rule.
    pub stall_limit: usize,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        SimplexConfig {
            tol_feas: 1e-7,
            tol_gap: 1e-6,
            pivot_tol: 1e-9,
            max_iters: 500_000,
            refactor_every: 100,
            stall_limit: 2_000,
        }
    }
}

/// Solve a bounded-variable LP. Deterministic for identical input.
pub fn solve_lp(model: &LPModel, cfg: &SimplexConfig) -> Result<LPSolution, LpError> {
    model.validate()?;
    let mut engine = Engine::new(model, cfg);
    engine.solve()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum State {
    Basic(usize),
    AtLower,
    AtUpper,
    FreeAtZero,
}

struct Engine<'a> {
    model: &'a LPModel,
    cfg: &'a SimplexConfig,
    n_struct: usize,
    n_rows: usize,
    n_art: usize,
    /// Row index and sign of each artificial column.
    art_row: Vec<usize>,
    art_sign: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    x_basic: Vec<f64>,
    /// Dense row-major basis inverse.
    binv: Vec<f64>,
    rhs: Vec<f64>,
    pivots_since_refactor: usize,
    bland: bool,
    feas_tol: f64,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl<'a> Engine<'a> {
    fn new(model: &'a LPModel, cfg: &'a SimplexConfig) -> Self {
        let n_struct = model.n_vars();
        let n_rows = model.n_rows();
        let rhs: Vec<f64> = model.constraints.iter().map(|c| c.rhs).collect();
        let scale = rhs.iter().fold(1.0_f64, |a, &b| a.max(b.abs()));
        let mut lb = Vec::with_capacity(n_struct + n_rows);
        let mut ub = Vec::with_capacity(n_struct + n_rows);
        for &(lo, hi) in &model.bounds {
            lb.push(lo);
            ub.push(hi);
        }
        for c in &model.constraints {
            let (lo, hi) = match c.relation {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            lb.push(lo);
            ub.push(hi);
        }
        Engine {
            model,
            cfg,
            n_struct,
            n_rows,
            n_art: 0,
            art_row: Vec::new(),
            art_sign: Vec::new(),
            lb,
            ub,
            state: Vec::new(),
            basis: Vec::new(),
            x_basic: Vec::new(),
            binv: Vec::new(),
            rhs,
            pivots_since_refactor: 0,
            bland: false,
            feas_tol: cfg.tol_feas * scale,
        }
    }

    fn n_total(&self) -> usize {
        self.n_struct + self.n_rows + self.n_art
    }

    fn is_slack(&self, j: usize) -> bool {
        j >= self.n_struct && j < self.n_struct + self.n_rows
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n_struct + self.n_rows
    }

    fn slack_row(&self, j: usize) -> usize {
        j - self.n_struct
    }

    /// Value of a nonbasic variable in its current state.
    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            State::AtLower => self.lb[j],
            State::AtUpper => self.ub[j],
            State::FreeAtZero => 0.0,
            State::Basic(_) => unreachable!("nonbasic_value on basic variable"),
        }
    }

    /// y . A_j for column j.
    fn dual_dot_col(&self, y: &[f64], j: usize) -> f64 {
        if j < self.n_struct {
            let mut acc = 0.0;
            for (r, row) in self.model.constraints.iter().enumerate() {
                acc += y[r] * row.coeffs[j];
            }
            acc
        } else if self.is_slack(j) {
            y[self.slack_row(j)]
        } else {
            let k = j - self.n_struct - self.n_rows;
            self.art_sign[k] * y[self.art_row[k]]
        }
    }

    /// w = B^-1 A_j.
    fn ftran(&self, j: usize, out: &mut Vec<f64>) {
        let m = self.n_rows;
        out.clear();
        out.resize(m, 0.0);
        if j < self.n_struct {
            for r in 0..m {
                let mut acc = 0.0;
                let binv_row = &self.binv[r * m..(r + 1) * m];
                for (k, row) in self.model.constraints.iter().enumerate() {
                    let a = row.coeffs[j];
                    if a != 0.0 {
                        acc += binv_row[k] * a;
                    }
                }
                out[r] = acc;
            }
        } else {
            let (col_row, sign) = if self.is_slack(j) {
                (self.slack_row(j), 1.0)
            } else {
                let k = j - self.n_struct - self.n_rows;
                (self.art_row[k], self.art_sign[k])
            };
            for r in 0..m {
                out[r] = sign * self.binv[r * m + col_row];
            }
        }
    }

    /// Initial point: structurals at a finite bound (lower preferred) or free
    /// at zero; slacks basic where the residual fits their range, otherwise an
    /// artificial column carries the residual.
    fn initialize(&mut self) {
        let m = self.n_rows;
        self.state = Vec::with_capacity(self.n_total());
        for j in 0..self.n_struct {
            let st = if self.lb[j].is_finite() {
                State::AtLower
            } else if self.ub[j].is_finite() {
                State::AtUpper
            } else {
                State::FreeAtZero
            };
            self.state.push(st);
        }
        // Residual of each row given the structural nonbasic values.
        let mut resid = self.rhs.clone();
        for j in 0..self.n_struct {
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                for (r, row) in self.model.constraints.iter().enumerate() {
                    resid[r] -= row.coeffs[j] * v;
                }
            }
        }
        self.basis = vec![usize::MAX; m];
        self.x_basic = vec![0.0; m];
        self.binv = vec![0.0; m * m];
        let mut slack_states = Vec::with_capacity(m);
        for r in 0..m {
            let s = self.n_struct + r;
            let v = resid[r];
            if v >= self.lb[s] - self.feas_tol && v <= self.ub[s] + self.feas_tol {
                slack_states.push(State::Basic(r));
                self.basis[r] = s;
                self.x_basic[r] = v;
                self.binv[r * m + r] = 1.0;
            } else {
                // Slack parks at the bound nearest the residual.
                let (bound_val, st) = if v > self.ub[s] {
                    (self.ub[s], State::AtUpper)
                } else {
                    (self.lb[s], State::AtLower)
                };
                slack_states.push(st);
                let short = v - bound_val;
                let k = self.n_art;
                let a = self.n_struct + m + k;
                self.art_row.push(r);
                self.art_sign.push(short.signum());
                self.lb.push(0.0);
                self.ub.push(f64::INFINITY);
                self.n_art += 1;
                self.basis[r] = a;
                self.x_basic[r] = short.abs();
                self.binv[r * m + r] = self.art_sign[k];
                debug_assert_eq!(a + 1, self.n_struct + m + self.n_art);
            }
        }
        self.state.extend(slack_states);
        for k in 0..self.n_art {
            self.state.push(State::Basic(self.art_row[k]));
        }
    }

    /// Rebuild B^-1 from scratch by Gauss-Jordan elimination and recompute the
    /// basic values.
    fn refactorize(&mut self) -> Result<(), LpError> {
        let m = self.n_rows;
        if m == 0 {
            return Ok(());
        }
        // Assemble B column by column.
        let mut mat = vec![0.0; m * m]; // row-major augmented basis matrix
        for (c, &j) in self.basis.iter().enumerate() {
            if j < self.n_struct {
                for (r, row) in self.model.constraints.iter().enumerate() {
                    mat[r * m + c] = row.coeffs[j];
                }
            } else if self.is_slack(j) {
                mat[self.slack_row(j) * m + c] = 1.0;
            } else {
                let k = j - self.n_struct - m;
                mat[self.art_row[k] * m + c] = self.art_sign[k];
            }
        }
        let mut inv = vec![0.0; m * m];
        for r in 0..m {
            inv[r * m + r] = 1.0;
        }
        // Gauss-Jordan with partial pivoting.
        for col in 0..m {
            let mut piv_row = col;
            let mut piv_val = mat[col * m + col].abs();
            for r in col + 1..m {
                let v = mat[r * m + col].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val < self.cfg.pivot_tol {
                return Err(LpError::NumericalBreakdown(format!(
                    "singular basis at column {col} (pivot {piv_val:.3e})"
                )));
            }
            if piv_row != col {
                for c in 0..m {
                    mat.swap(piv_row * m + c, col * m + c);
                    inv.swap(piv_row * m + c, col * m + c);
                }
            }
            let p = mat[col * m + col];
            for c in 0..m {
                mat[col * m + c] /= p;
                inv[col * m + c] /= p;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = mat[r * m + col];
                if f != 0.0 {
                    for c in 0..m {
                        mat[r * m + c] -= f * mat[col * m + c];
                        inv[r * m + c] -= f * inv[col * m + c];
                    }
                }
            }
        }
        // inv now holds (P B)^{-1} pieces composed; because we applied the
        // same row ops to both, inv = B^{-1}.
        self.binv = inv;
        self.recompute_basics();
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn recompute_basics(&mut self) {
        let m = self.n_rows;
        let mut resid = self.rhs.clone();
        for j in 0..self.n_total() {
            if let State::Basic(_) = self.state[j] {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v == 0.0 {
                continue;
            }
            if j < self.n_struct {
                for (r, row) in self.model.constraints.iter().enumerate() {
                    resid[r] -= row.coeffs[j] * v;
                }
            } else if self.is_slack(j) {
                resid[self.slack_row(j)] -= v;
            } else {
                let k = j - self.n_struct - m;
                resid[self.art_row[k]] -= self.art_sign[k] * v;
            }
        }
        for r in 0..m {
            let mut acc = 0.0;
            let binv_row = &self.binv[r * m..(r + 1) * m];
            for k in 0..m {
                acc += binv_row[k] * resid[k];
            }
            self.x_basic[r] = acc;
        }
    }

    fn duals(&self, costs: &[f64]) -> Vec<f64> {
        let m = self.n_rows;
        let mut y = vec![0.0; m];
        for (r, &j) in self.basis.iter().enumerate() {
            let c = costs[j];
            if c != 0.0 {
                let binv_row = &self.binv[r * m..(r + 1) * m];
                for k in 0..m {
                    y[k] += c * binv_row[k];
                }
            }
        }
        y
    }

    /// One simplex iteration on the given cost vector.
    fn iterate(&mut self, costs: &[f64], work: &mut Vec<f64>) -> Result<Step, LpError> {
        let d_tol = self.cfg.tol_feas;
        let y = self.duals(costs);

        // Pricing.
        let mut enter: Option<(usize, f64, f64)> = None; // (var, score, direction)
        for j in 0..self.n_total() {
            if matches!(self.state[j], State::Basic(_)) || self.lb[j] == self.ub[j] {
                continue;
            }
            let d = costs[j] - self.dual_dot_col(&y, j);
            let (eligible, score, dir) = match self.state[j] {
                State::AtLower => (d < -d_tol, -d, 1.0),
                State::AtUpper => (d > d_tol, d, -1.0),
                State::FreeAtZero => (d.abs() > d_tol, d.abs(), if d > 0.0 { -1.0 } else { 1.0 }),
                State::Basic(_) => unreachable!(),
            };
            if !eligible {
                continue;
            }
            if self.bland {
                enter = Some((j, score, dir));
                break;
            }
            match enter {
                Some((_, best, _)) if best >= score => {}
                _ => enter = Some((j, score, dir)),
            }
        }
        let Some((q, _, dir)) = enter else {
            return Ok(Step::Optimal);
        };

        self.ftran(q, work);

        // Ratio test.
        let own_range = if self.lb[q].is_finite() && self.ub[q].is_finite() {
            self.ub[q] - self.lb[q]
        } else {
            f64::INFINITY
        };
        let mut best_delta = f64::INFINITY;
        let mut leave: Option<(usize, f64)> = None; // (row, alpha)
        for r in 0..self.n_rows {
            let alpha = dir * work[r];
            let limit = if alpha > self.cfg.pivot_tol {
                let lo = self.lb[self.basis[r]];
                if lo.is_finite() {
                    (self.x_basic[r] - lo) / alpha
                } else {
                    continue;
                }
            } else if alpha < -self.cfg.pivot_tol {
                let hi = self.ub[self.basis[r]];
                if hi.is_finite() {
                    (self.x_basic[r] - hi) / alpha
                } else {
                    continue;
                }
            } else {
                continue;
            };
            let limit = limit.max(0.0);
            if limit < best_delta - 1e-12 {
                best_delta = limit;
                leave = Some((r, alpha));
            } else if limit <= best_delta + 1e-12 {
                if let Some((r0, a0)) = leave {
                    let better = if self.bland {
                        self.basis[r] < self.basis[r0]
                    } else {
                        alpha.abs() > a0.abs() + 1e-12
                            || (alpha.abs() >= a0.abs() - 1e-12 && self.basis[r] < self.basis[r0])
                    };
                    if better {
                        best_delta = best_delta.min(limit);
                        leave = Some((r, alpha));
                    }
                } else {
                    best_delta = limit;
                    leave = Some((r, alpha));
                }
            }
        }

        if best_delta.is_infinite() && own_range.is_infinite() {
            return Ok(Step::Unbounded);
        }

        // Prefer a basis change on ties; flipping only when strictly cheaper.
        if own_range < best_delta {
            let delta = own_range;
            for r in 0..self.n_rows {
                self.x_basic[r] -= dir * work[r] * delta;
            }
            self.state[q] = match self.state[q] {
                State::AtLower => State::AtUpper,
                State::AtUpper => State::AtLower,
                other => other,
            };
            return Ok(Step::Pivoted);
        }

        let (r_leave, _) = leave.expect("bounded step without leaving row");
        let pivot = work[r_leave];
        if pivot.abs() < self.cfg.pivot_tol {
            return Err(LpError::NumericalBreakdown(format!(
                "pivot {pivot:.3e} below tolerance"
            )));
        }
        let delta = best_delta;
        let entering_value = match self.state[q] {
            State::AtLower => self.lb[q] + delta,
            State::AtUpper => self.ub[q] - delta,
            State::FreeAtZero => dir * delta,
            State::Basic(_) => unreachable!(),
        };
        for r in 0..self.n_rows {
            self.x_basic[r] -= dir * work[r] * delta;
        }
        let leaving = self.basis[r_leave];
        let alpha = dir * pivot;
        self.state[leaving] = if alpha > 0.0 {
            State::AtLower
        } else {
            State::AtUpper
        };
        self.basis[r_leave] = q;
        self.state[q] = State::Basic(r_leave);
        self.x_basic[r_leave] = entering_value;

        // Product-form update of B^-1.
        let m = self.n_rows;
        let piv_row: Vec<f64> = self.binv[r_leave * m..(r_leave + 1) * m].to_vec();
        for r in 0..m {
            if r == r_leave {
                continue;
            }
            let f = work[r] / pivot;
            if f != 0.0 {
                let row = &mut self.binv[r * m..(r + 1) * m];
                for k in 0..m {
                    row[k] -= f * piv_row[k];
                }
            }
        }
        let row = &mut self.binv[r_leave * m..(r_leave + 1) * m];
        for k in 0..m {
            row[k] /= pivot;
        }
        self.pivots_since_refactor += 1;
        Ok(Step::Pivoted)
    }

    fn objective_of(&self, costs: &[f64]) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.n_total() {
            let v = match self.state[j] {
                State::Basic(r) => self.x_basic[r],
                _ => self.nonbasic_value(j),
            };
            if v != 0.0 {
                acc += costs[j] * v;
            }
        }
        acc
    }

    /// Run one phase to optimality. `early_stop` allows phase 1 to bail as
    /// soon as total infeasibility reaches zero.
    fn run_phase(&mut self, costs: &[f64], early_stop: Option<f64>) -> Result<Step, LpError> {
        let mut work = Vec::new();
        let mut stall = 0usize;
        let mut last_obj = f64::INFINITY;
        for _ in 0..self.cfg.max_iters {
            if self.pivots_since_refactor >= self.cfg.refactor_every {
                self.refactorize()?;
            }
            if let Some(target) = early_stop {
                if self.objective_of(costs) <= target {
                    return Ok(Step::Optimal);
                }
            }
            let step = match self.iterate(costs, &mut work) {
                Ok(Step::Unbounded) if self.pivots_since_refactor > 0 => {
                    // Could be an artifact of accumulated error; confirm on a
                    // fresh factorization.
                    self.refactorize()?;
                    self.iterate(costs, &mut work)?
                }
                Ok(s) => s,
                Err(LpError::NumericalBreakdown(_)) if self.pivots_since_refactor > 0 => {
                    self.refactorize()?;
                    self.iterate(costs, &mut work)?
                }
                Err(e) => return Err(e),
            };
            match step {
                Step::Optimal | Step::Unbounded => return Ok(step),
                Step::Pivoted => {}
            }
            let obj = self.objective_of(costs);
            if obj < last_obj - 1e-12 {
                stall = 0;
                last_obj = obj;
            } else {
                stall += 1;
                if stall > self.cfg.stall_limit {
                    self.bland = true;
                }
            }
        }
        Err(LpError::NumericalBreakdown("iteration limit".into()))
    }

    fn phase1_costs(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.n_total()];
        for k in 0..self.n_art {
            c[self.n_struct + self.n_rows + k] = 1.0;
        }
        c
    }

    fn phase2_costs(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.n_total()];
        c[..self.n_struct].copy_from_slice(&self.model.objective);
        c
    }

    /// Pin artificials to zero and try to pivot basic ones out (degenerate
    /// pivots); rows that admit none are linearly dependent and keep their
    /// artificial basic at zero.
    fn retire_artificials(&mut self) -> Result<(), LpError> {
        let m = self.n_rows;
        for k in 0..self.n_art {
            let a = self.n_struct + m + k;
            self.lb[a] = 0.0;
            self.ub[a] = 0.0;
        }
        let mut work = Vec::new();
        for r in 0..m {
            let j_basic = self.basis[r];
            if !self.is_artificial(j_basic) {
                continue;
            }
            let mut replacement = None;
            for j in 0..self.n_struct + m {
                if matches!(self.state[j], State::Basic(_)) {
                    continue;
                }
                self.ftran(j, &mut work);
                if work[r].abs() > self.cfg.pivot_tol * 10.0 {
                    replacement = Some((j, work.clone()));
                    break;
                }
            }
            if let Some((j, w)) = replacement {
                let pivot = w[r];
                let entering_value = match self.state[j] {
                    State::FreeAtZero => 0.0,
                    _ => self.nonbasic_value(j),
                };
                self.state[j_basic] = State::AtLower;
                self.basis[r] = j;
                self.state[j] = State::Basic(r);
                self.x_basic[r] = entering_value;
                let piv_row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
                for rr in 0..m {
                    if rr == r {
                        continue;
                    }
                    let f = w[rr] / pivot;
                    if f != 0.0 {
                        let row = &mut self.binv[rr * m..(rr + 1) * m];
                        for c in 0..m {
                            row[c] -= f * piv_row[c];
                        }
                    }
                }
                let row = &mut self.binv[r * m..(r + 1) * m];
                for c in 0..m {
                    row[c] /= pivot;
                }
                self.pivots_since_refactor += 1;
            }
        }
        self.refactorize()
    }

    fn solve(&mut self) -> Result<LPSolution, LpError> {
        // Infeasible box: caught by validate (lb > ub rejected), nothing here.
        self.initialize();

        if self.n_art > 0 {
            let c1 = self.phase1_costs();
            if let Step::Unbounded = self.run_phase(&c1, Some(1e-11 * (1.0 + self.feas_tol)))? {
                return Err(LpError::NumericalBreakdown(
                    "phase 1 reported unbounded".into(),
                ));
            }
            let infeas = self.objective_of(&c1);
            if infeas > self.feas_tol {
                return Ok(LPSolution::non_optimal(LpStatus::Infeasible));
            }
            self.retire_artificials()?;
        } else if self.n_rows > 0 {
            self.refactorize()?;
        }

        let c2 = self.phase2_costs();
        if let Step::Unbounded = self.run_phase(&c2, None)? {
            return Ok(LPSolution::non_optimal(LpStatus::Unbounded));
        }

        // Clean certificate from a fresh factorization.
        if self.n_rows > 0 {
            self.refactorize()?;
        }
        let y = self.duals(&c2);
        let mut primal = vec![0.0; self.n_struct];
        for (j, value) in primal.iter_mut().enumerate() {
            *value = match self.state[j] {
                State::Basic(r) => self.x_basic[r],
                _ => self.nonbasic_value(j),
            };
        }
        let mut reduced = vec![0.0; self.n_struct];
        for j in 0..self.n_struct {
            reduced[j] = self.model.objective[j] - self.dual_dot_col(&y, j);
        }
        let basis = (0..self.n_struct)
            .map(|j| match self.state[j] {
                State::Basic(_) => VarStatus::Basic,
                State::AtLower => VarStatus::AtLower,
                State::AtUpper => VarStatus::AtUpper,
                State::FreeAtZero => VarStatus::Free,
            })
            .collect();
        let objective = self
            .model
            .objective
            .iter()
            .zip(&primal)
            .map(|(c, x)| c * x)
            .sum();
        Ok(LPSolution {
            status: LpStatus::Optimal,
            objective,
            primal,
            duals: y,
            reduced_costs: reduced,
            basis,
        })
    }
}
