//! Assignment subproblem: build and solve it at a query point `y*`, read the
//! reduced costs of the cloned location variables, and assemble the resulting
//! optimality cut.
//!
//! The subproblem clones each location variable into a continuous `q[i]`
//! fixed to `y*[i]` through equal lower and upper bounds. Because `y` enters
//! the subproblem only through those bounds, the reduced-cost vector of the
//! `q` clones is a subgradient of the assignment value function, and
//! `w >= phi(y*) + r . (y - y*)` is a valid supporting hyperplane — no
//! problem-specific dual algebra needed.
//!
//! Costs are split: fixed opening costs stay linear in the master, the
//! subproblem prices assignment cost only.

use thiserror::Error;

use crate::instance::{Instance, Variant};
use crate::simplex::{
    solve_lp, LPModel, LinearConstraint, LpError, LpStatus, Relation, SimplexConfig,
};

/// Solution of the assignment subproblem at a point `y*`.
///
/// `reduced_costs[i]` is the subgradient component for facility `i`; it is
/// never positive (more open capacity cannot increase assignment cost).
/// Duals are stored as nonnegative multipliers: `assignment_duals[j]` prices
/// customer `j`'s demand, `link_duals[i][j]` and `capacity_duals[i]` are the
/// magnitudes of the (nonpositive) linking/capacity row duals.
#[derive(Debug, Clone)]
pub struct SlaveResult {
    pub phi_assign: f64,
    /// Row-major `n x m` fractional assignment.
    pub x_star: Vec<Vec<f64>>,
    pub assignment_duals: Vec<f64>,
    pub link_duals: Vec<Vec<f64>>,
    /// Per-facility capacity row duals; empty for UFLP.
    pub capacity_duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub feasible_without_recourse: bool,
}

/// A supporting hyperplane of the assignment value function:
/// `w >= intercept + coeff . y`, tight at `origin_y` where it equals
/// `origin_phi`.
#[derive(Debug, Clone)]
pub struct BendersCut {
    pub intercept: f64,
    pub coeff: Vec<f64>,
    pub origin_y: Vec<f64>,
    pub origin_phi: f64,
}

impl BendersCut {
    pub fn value_at(&self, y: &[f64]) -> f64 {
        self.intercept + dot(&self.coeff, y)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Error, PartialEq)]
pub enum SlaveError {
    #[error("total opening {total:.6} < 1 and no recourse facility")]
    InsufficientOpening { total: f64 },
    #[error("selection cannot serve all demand and no recourse facility")]
    InfeasibleSelection,
    #[error("subproblem infeasible (no recourse facility)")]
    SlaveInfeasible,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Build the subproblem LP at `y*`: variables `x[i][j]` (row-major) then the
/// clones `q[i]`; assignment equalities, linking rows `x[i][j] - q[i] <= 0`,
/// and for CFLP additionally `sum_j d[j] x[i][j] - s[i] q[i] <= 0`. The `q`
/// bounds are `[y*[i], y*[i]]`; `x` is nonnegative (its unit upper bound is
/// implied by the assignment equality).
pub fn build_slave(inst: &Instance, y: &[f64]) -> LPModel {
    let n = inst.n_facilities();
    let m = inst.n_customers();
    assert_eq!(y.len(), n, "y length must match facility count");
    let n_vars = n * m + n;
    let x = |i: usize, j: usize| i * m + j;
    let q = |i: usize| n * m + i;

    let mut objective = vec![0.0; n_vars];
    for i in 0..n {
        objective[x(i, 0)..x(i, 0) + m].copy_from_slice(inst.assign_row(i));
    }

    let mut constraints = Vec::with_capacity(m + n * m + n);
    // sum_i x[i][j] = 1 for every customer.
    for j in 0..m {
        let mut row = vec![0.0; n_vars];
        for i in 0..n {
            row[x(i, j)] = 1.0;
        }
        constraints.push(LinearConstraint {
            coeffs: row,
            relation: Relation::Eq,
            rhs: 1.0,
        });
    }
    if inst.variant() == Variant::Cflp {
        let caps = inst.capacities().unwrap();
        let dems = inst.demands().unwrap();
        for i in 0..n {
            let mut row = vec![0.0; n_vars];
            for (j, &d) in dems.iter().enumerate() {
                row[x(i, j)] = d;
            }
            row[q(i)] = -caps[i];
            constraints.push(LinearConstraint {
                coeffs: row,
                relation: Relation::Le,
                rhs: 0.0,
            });
        }
    }
    // Disaggregate linking.
    for i in 0..n {
        for j in 0..m {
            let mut row = vec![0.0; n_vars];
            row[x(i, j)] = 1.0;
            row[q(i)] = -1.0;
            constraints.push(LinearConstraint {
                coeffs: row,
                relation: Relation::Le,
                rhs: 0.0,
            });
        }
    }

    let mut bounds = vec![(0.0, f64::INFINITY); n * m];
    bounds.extend(y.iter().map(|&v| (v, v)));

    LPModel {
        objective,
        constraints,
        bounds,
    }
}

/// Closed-form UFLP subproblem: per customer, fill fractions greedily from the
/// cheapest facilities until one unit is served. The marginal facility prices
/// the customer (`v[j]`), `u[i][j] = max(0, v[j] - c[i][j])`, and
/// `r[i] = -sum_j u[i][j]`.
pub fn closed_form_uflp(inst: &Instance, y: &[f64]) -> Result<SlaveResult, SlaveError> {
    assert_eq!(inst.variant(), Variant::Uflp, "closed form is UFLP-only");
    let n = inst.n_facilities();
    let m = inst.n_customers();
    assert_eq!(y.len(), n);
    let total: f64 = y.iter().sum();
    if total < 1.0 - 1e-9 {
        return Err(SlaveError::InsufficientOpening { total });
    }

    let mut x = vec![vec![0.0; m]; n];
    let mut v = vec![0.0; m];
    let mut u = vec![vec![0.0; m]; n];
    let mut phi = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    for j in 0..m {
        order.sort_by(|&a, &b| {
            inst.assign_cost(a, j)
                .total_cmp(&inst.assign_cost(b, j))
                .then(a.cmp(&b))
        });
        let mut remaining = 1.0;
        let mut marginal_cost = 0.0;
        for &i in &order {
            if remaining <= 0.0 {
                break;
            }
            let take = y[i].min(remaining);
            if take > 0.0 {
                x[i][j] = take;
                remaining -= take;
                marginal_cost = inst.assign_cost(i, j);
                phi += take * marginal_cost;
            }
        }
        v[j] = marginal_cost;
        for (i, row) in u.iter_mut().enumerate() {
            row[j] = (v[j] - inst.assign_cost(i, j)).max(0.0);
        }
    }
    let reduced: Vec<f64> = (0..n).map(|i| -u[i].iter().sum::<f64>()).collect();
    let feasible_without_recourse = match inst.dummy_index() {
        Some(d) => x[d].iter().all(|&f| f <= 1e-9),
        None => true,
    };
    Ok(SlaveResult {
        phi_assign: phi,
        x_star: x,
        assignment_duals: v,
        link_duals: u,
        capacity_duals: Vec::new(),
        reduced_costs: reduced,
        feasible_without_recourse,
    })
}

/// Solve the subproblem via the LP path and extract duals/reduced costs.
pub fn solve_slave_lp(inst: &Instance, y: &[f64]) -> Result<SlaveResult, SlaveError> {
    let model = build_slave(inst, y);
    let sol = solve_lp(&model, &SimplexConfig::default())?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(SlaveError::SlaveInfeasible),
        LpStatus::Unbounded => {
            return Err(SlaveError::Lp(LpError::NumericalBreakdown(
                "subproblem unbounded".into(),
            )))
        }
    }
    let n = inst.n_facilities();
    let m = inst.n_customers();
    let x: Vec<Vec<f64>> = (0..n)
        .map(|i| sol.primal[i * m..(i + 1) * m].to_vec())
        .collect();
    let assignment_duals = sol.duals[..m].to_vec();
    let (capacity_duals, link_offset) = if inst.variant() == Variant::Cflp {
        ((0..n).map(|i| -sol.duals[m + i]).collect(), m + n)
    } else {
        (Vec::new(), m)
    };
    let link_duals: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..m)
                .map(|j| -sol.duals[link_offset + i * m + j])
                .collect()
        })
        .collect();
    let reduced = sol.reduced_costs[n * m..].to_vec();
    let feasible_without_recourse = match inst.dummy_index() {
        Some(d) => x[d].iter().all(|&f| f <= 1e-7),
        None => true,
    };
    Ok(SlaveResult {
        phi_assign: sol.objective,
        x_star: x,
        assignment_duals,
        link_duals,
        capacity_duals,
        reduced_costs: reduced,
        feasible_without_recourse,
    })
}

/// Solve the subproblem at `y*`: closed form for UFLP, LP otherwise.
pub fn solve_slave(inst: &Instance, y: &[f64]) -> Result<SlaveResult, SlaveError> {
    match inst.variant() {
        Variant::Uflp => closed_form_uflp(inst, y),
        Variant::Cflp => solve_slave_lp(inst, y),
    }
}

/// Assemble the optimality cut from a subproblem solution at `y*`.
pub fn make_cut(result: &SlaveResult, y: &[f64]) -> BendersCut {
    let coeff = result.reduced_costs.clone();
    let intercept = result.phi_assign - dot(&coeff, y);
    BendersCut {
        intercept,
        coeff,
        origin_y: y.to_vec(),
        origin_phi: result.phi_assign,
    }
}

/// Exact total cost of a binary selection: fixed opening cost plus the
/// assignment optimum. UFLP uses the direct cheapest-open-facility formula;
/// CFLP solves a transportation LP reduced to the open facilities.
pub fn evaluate_binary(inst: &Instance, y: &[bool]) -> Result<f64, SlaveError> {
    Ok(opening_cost(inst, y) + evaluate_binary_assign(inst, y)?)
}

/// Fixed cost of a selection, with the dummy (free) column always open.
pub fn opening_cost(inst: &Instance, y: &[bool]) -> f64 {
    (0..inst.n_facilities())
        .filter(|&i| y[i] || inst.dummy_index() == Some(i))
        .map(|i| inst.fixed_costs()[i])
        .sum()
}

/// Assignment part of the binary evaluation (no fixed costs).
pub fn evaluate_binary_assign(inst: &Instance, y: &[bool]) -> Result<f64, SlaveError> {
    let n = inst.n_facilities();
    let m = inst.n_customers();
    assert_eq!(y.len(), n);
    let mut open: Vec<usize> = (0..n).filter(|&i| y[i]).collect();
    if let Some(d) = inst.dummy_index() {
        if !y[d] {
            open.push(d);
        }
    }
    if open.is_empty() {
        return Err(SlaveError::InfeasibleSelection);
    }

    match inst.variant() {
        Variant::Uflp => {
            let mut best = vec![f64::INFINITY; m];
            for &i in &open {
                for (b, &c) in best.iter_mut().zip(inst.assign_row(i)) {
                    if c < *b {
                        *b = c;
                    }
                }
            }
            Ok(best.iter().sum::<f64>())
        }
        Variant::Cflp => {
            let caps = inst.capacities().unwrap();
            let dems = inst.demands().unwrap();
            let total_cap: f64 = open.iter().map(|&i| caps[i]).sum();
            if total_cap < inst.total_demand() - 1e-9 {
                return Err(SlaveError::InfeasibleSelection);
            }
            // Transportation LP over open facilities only; at binary y the
            // disaggregate linking rows are implied by the equalities.
            let k = open.len();
            let n_vars = k * m;
            let mut objective = vec![0.0; n_vars];
            for (a, &i) in open.iter().enumerate() {
                objective[a * m..(a + 1) * m].copy_from_slice(inst.assign_row(i));
            }
            let mut constraints = Vec::with_capacity(m + k);
            for j in 0..m {
                let mut row = vec![0.0; n_vars];
                for a in 0..k {
                    row[a * m + j] = 1.0;
                }
                constraints.push(LinearConstraint {
                    coeffs: row,
                    relation: Relation::Eq,
                    rhs: 1.0,
                });
            }
            for (a, &i) in open.iter().enumerate() {
                let mut row = vec![0.0; n_vars];
                row[a * m..(a + 1) * m].copy_from_slice(dems);
                constraints.push(LinearConstraint {
                    coeffs: row,
                    relation: Relation::Le,
                    rhs: caps[i],
                });
            }
            let model = LPModel {
                objective,
                constraints,
                bounds: vec![(0.0, f64::INFINITY); n_vars],
            };
            let sol = solve_lp(&model, &SimplexConfig::default())?;
            match sol.status {
                LpStatus::Optimal => Ok(sol.objective),
                LpStatus::Infeasible => Err(SlaveError::InfeasibleSelection),
                LpStatus::Unbounded => Err(SlaveError::Lp(LpError::NumericalBreakdown(
                    "transportation LP unbounded".into(),
                ))),
            }
        }
    }
}
