//! Independent ground truth: full enumeration of binary selections and an
//! auditor that replays cut pools against it.

use thiserror::Error;

use crate::instance::Instance;
use crate::slave::{evaluate_binary, evaluate_binary_assign, BendersCut, SlaveError};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance too large for enumeration: {n} real facilities > {max}")]
    TooLarge { n: usize, max: usize },
    #[error(transparent)]
    Slave(#[from] SlaveError),
}

const BRUTE_FORCE_MAX: usize = 22;
const AUDIT_MAX: usize = 12;

/// Result of a brute-force enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub cost: f64,
    pub y: Vec<bool>,
    /// Feasible selections evaluated.
    pub evaluated: u64,
}

fn lex_less(a: &[bool], b: &[bool]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return !x;
        }
    }
    false
}

/// Enumerate every binary selection (dummy pinned open) and return the
/// minimum; exact ties resolve to the lexicographically smallest vector.
pub fn brute_force(inst: &Instance) -> Result<OptResult, OracleError> {
    let n = inst.n_facilities();
    let n_real = inst.n_real_facilities();
    if n_real > BRUTE_FORCE_MAX {
        return Err(OracleError::TooLarge {
            n: n_real,
            max: BRUTE_FORCE_MAX,
        });
    }
    let mut best: Option<(f64, Vec<bool>)> = None;
    let mut evaluated = 0u64;
    let mut y = vec![false; n];
    if let Some(d) = inst.dummy_index() {
        y[d] = true;
    }
    for mask in 0u64..(1u64 << n_real) {
        for (i, flag) in y.iter_mut().take(n_real).enumerate() {
            *flag = (mask >> i) & 1 == 1;
        }
        let cost = match evaluate_binary(inst, &y) {
            Ok(c) => c,
            Err(SlaveError::InfeasibleSelection) => continue,
            Err(e) => return Err(e.into()),
        };
        evaluated += 1;
        let replace = match &best {
            None => true,
            Some((bc, by)) => cost < *bc || (cost == *bc && lex_less(&y, by)),
        };
        if replace {
            best = Some((cost, y.clone()));
        }
    }
    let (cost, y) = best.ok_or(SlaveError::InfeasibleSelection).map_err(OracleError::Slave)?;
    Ok(OptResult { cost, y, evaluated })
}

/// Outcome of replaying a cut pool against full enumeration.
#[derive(Debug, Clone)]
pub struct CutAudit {
    pub n_cuts: usize,
    /// Feasible binary points checked.
    pub n_points: u64,
    /// Largest `cut(y) - phi_assign(y)` observed (negative when all cuts
    /// under-estimate everywhere).
    pub worst_violation: f64,
    pub worst_cut: Option<usize>,
    pub worst_y: Option<Vec<bool>>,
    /// Largest `|cut(origin) - origin_phi|` across the pool.
    pub max_tightness_residual: f64,
    pub pass: bool,
}

/// Audit tolerance on both the under-estimation inequality and the
/// supporting-point residual.
pub const AUDIT_TOL: f64 = 1e-8;

/// Verify that every cut under-estimates the assignment value at every binary
/// selection and touches its generation point.
pub fn audit_cuts(inst: &Instance, cuts: &[BendersCut]) -> Result<CutAudit, OracleError> {
    let n = inst.n_facilities();
    let n_real = inst.n_real_facilities();
    if n_real > AUDIT_MAX {
        return Err(OracleError::TooLarge {
            n: n_real,
            max: AUDIT_MAX,
        });
    }
    let mut audit = CutAudit {
        n_cuts: cuts.len(),
        n_points: 0,
        worst_violation: f64::NEG_INFINITY,
        worst_cut: None,
        worst_y: None,
        max_tightness_residual: 0.0,
        pass: true,
    };
    for cut in cuts {
        let residual = (cut.value_at(&cut.origin_y) - cut.origin_phi).abs();
        if residual > audit.max_tightness_residual {
            audit.max_tightness_residual = residual;
        }
    }

    let mut y = vec![false; n];
    if let Some(d) = inst.dummy_index() {
        y[d] = true;
    }
    let mut y_f = vec![0.0f64; n];
    for mask in 0u64..(1u64 << n_real) {
        for (i, flag) in y.iter_mut().take(n_real).enumerate() {
            *flag = (mask >> i) & 1 == 1;
        }
        let phi = match evaluate_binary_assign(inst, &y) {
            Ok(p) => p,
            Err(SlaveError::InfeasibleSelection) => continue,
            Err(e) => return Err(e.into()),
        };
        audit.n_points += 1;
        for (i, &b) in y.iter().enumerate() {
            y_f[i] = if b { 1.0 } else { 0.0 };
        }
        for (k, cut) in cuts.iter().enumerate() {
            let violation = cut.value_at(&y_f) - phi;
            if violation > audit.worst_violation {
                audit.worst_violation = violation;
                audit.worst_cut = Some(k);
                audit.worst_y = Some(y.clone());
            }
        }
    }
    if cuts.is_empty() || audit.n_points == 0 {
        audit.worst_violation = 0.0;
        audit.worst_cut = None;
        audit.worst_y = None;
    }
    audit.pass =
        audit.worst_violation <= AUDIT_TOL && audit.max_tightness_residual <= AUDIT_TOL;
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::NullSink;
    use crate::instance::{add_recourse, generate, Variant};
    use crate::master::{MasterModel, SolverConfig};

    #[test]
    fn single_facility() {
        let inst = Instance::uflp(vec![4.0], vec![vec![7.0]]).unwrap();
        let opt = brute_force(&inst).unwrap();
        assert_eq!(opt.cost, 11.0);
        assert_eq!(opt.y, vec![true]);
        assert_eq!(opt.evaluated, 1); // the empty selection is infeasible
    }

    #[test]
    fn two_facility_hand_enumeration() {
        let inst = Instance::uflp(vec![4.0, 5.0], vec![vec![2.0, 6.0], vec![6.0, 2.0]]).unwrap();
        let opt = brute_force(&inst).unwrap();
        assert_eq!(opt.cost, 12.0);
        assert_eq!(opt.y, vec![true, false]);
    }

    #[test]
    fn cflp_with_recourse_prefers_split_service() {
        let base = Instance::cflp(
            vec![1.0, 1.0],
            vec![vec![3.0], vec![7.0]],
            vec![6.0, 6.0],
            vec![10.0],
        )
        .unwrap();
        let inst = add_recourse(&base, 100.0).unwrap();
        let opt = brute_force(&inst).unwrap();
        assert_eq!(opt.y, vec![true, true, true]);
        assert!((opt.cost - 6.6).abs() < 1e-9);
        // Hand-checked selections along the way.
        assert!(
            (evaluate_binary(&inst, &[true, false, true]).unwrap() - 42.8).abs() < 1e-9
        );
        assert!(
            (evaluate_binary(&inst, &[false, true, true]).unwrap() - 45.2).abs() < 1e-9
        );
    }

    #[test]
    fn enumeration_guard() {
        let inst = generate(3, 23, 4, Variant::Uflp, None).unwrap();
        assert!(matches!(
            brute_force(&inst),
            Err(OracleError::TooLarge { n: 23, max: 22 })
        ));
    }

    #[test]
    fn empty_pool_passes_vacuously() {
        let inst = Instance::uflp(vec![4.0], vec![vec![7.0]]).unwrap();
        let audit = audit_cuts(&inst, &[]).unwrap();
        assert!(audit.pass);
        assert_eq!(audit.n_cuts, 0);
    }

    #[test]
    fn solver_pool_audits_clean_and_corruption_is_caught() {
        let inst = generate(17, 6, 9, Variant::Uflp, None).unwrap();
        let mut model = MasterModel::new(&inst).unwrap();
        let res = model.solve(&SolverConfig::default(), &mut NullSink).unwrap();
        assert_eq!(res.status, crate::master::SolveStatus::Optimal);
        let audit = audit_cuts(&inst, model.pool()).unwrap();
        assert!(audit.pass, "violation {:e}", audit.worst_violation);

        let mut corrupted = model.pool().to_vec();
        corrupted[0].intercept += 1.0;
        corrupted[0].origin_phi += 1.0; // keep the tightness residual silent
        let audit = audit_cuts(&inst, &corrupted).unwrap();
        assert!(!audit.pass);
        assert!(audit.worst_violation > 0.9);
        assert_eq!(audit.worst_cut, Some(0));
    }
}
