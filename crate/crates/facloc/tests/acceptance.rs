//! Acceptance suite. Each test enforces one criterion at its stated
//! tolerance and prints a single PASS line (visible with `--nocapture`).

mod common;

use std::time::Instant;

use common::{enumerate_lp_min, random_bounded_lp, random_instance, seeded_rng};
use facloc::events::{Action, CollectSink, NullSink};
use facloc::instance::{generate, Variant};
use facloc::kernel::{initial_kernel, kernel_search, kernel_search_from, KernelConfig, KernelState};
use facloc::master::{solve, MasterModel, SolveStatus, SolverConfig};
use facloc::oracle::{audit_cuts, brute_force};
use facloc::simplex::{solve_lp, LpStatus, Relation, SimplexConfig, VarStatus};
use facloc::slave::{closed_form_uflp, make_cut, solve_slave_lp};
use rand::Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / f64::max(1.0, b.abs())
}

/// Criterion 1: exact agreement with brute force on 200 seeded instances,
/// UFLP and CFLP, n in [3,8], m in [5,20], within 1e-6 relative, under five
/// minutes single-threaded.
#[test]
fn acceptance_1_exactness_against_brute_force() {
    let start = Instant::now();
    let mut rng = seeded_rng(1001);
    let cfg = SolverConfig::default();
    for trial in 0..200u64 {
        let n = rng.random_range(3..=8);
        let m = rng.random_range(5..=20);
        let variant = if trial % 2 == 0 {
            Variant::Uflp
        } else {
            Variant::Cflp
        };
        let inst = random_instance(trial, n, m, variant);
        let res = solve(&inst, &cfg, &mut NullSink).unwrap();
        assert_eq!(
            res.status,
            SolveStatus::Optimal,
            "trial {trial} ({variant:?} n={n} m={m}) not optimal"
        );
        let opt = brute_force(&inst).unwrap();
        assert!(
            rel(res.upper_bound, opt.cost) <= 1e-6,
            "trial {trial} ({variant:?} n={n} m={m}): solver {} vs brute {}",
            res.upper_bound,
            opt.cost
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 300.0,
        "exactness suite took {elapsed:.1}s (budget 300s)"
    );
    println!(
        "ACCEPTANCE 1 exactness: PASS (200 instances agree within 1e-6, {elapsed:.1}s)"
    );
}

/// Criterion 2: cut pools from 50 completed solves (n <= 10) audit clean at
/// 1e-8 for both under-estimation and origin tightness.
#[test]
fn acceptance_2_cut_soundness() {
    let mut rng = seeded_rng(2002);
    let mut audited_cuts = 0usize;
    for trial in 0..50u64 {
        let n = rng.random_range(3..=10);
        let m = rng.random_range(5..=15);
        let variant = if trial % 3 == 0 {
            Variant::Cflp
        } else {
            Variant::Uflp
        };
        let inst = random_instance(5000 + trial, n, m, variant);
        let mut model = MasterModel::new(&inst).unwrap();
        let res = model.solve(&SolverConfig::default(), &mut NullSink).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal, "trial {trial}");
        let audit = audit_cuts(&inst, model.pool()).unwrap();
        assert!(
            audit.worst_violation <= 1e-8,
            "trial {trial}: under-estimation violated by {:e} (cut {:?} at {:?})",
            audit.worst_violation,
            audit.worst_cut,
            audit.worst_y
        );
        assert!(
            audit.max_tightness_residual <= 1e-8,
            "trial {trial}: origin residual {:e}",
            audit.max_tightness_residual
        );
        audited_cuts += audit.n_cuts;
    }
    println!(
        "ACCEPTANCE 2 cut soundness: PASS (50 solves, {audited_cuts} cuts, zero violations at 1e-8)"
    );
}

/// Criterion 3: on 500 random (UFLP instance, fractional y*) pairs the closed
/// form matches the LP path within 1e-6 and both resulting cuts audit clean.
#[test]
fn acceptance_3_reduced_cost_equivalence() {
    let mut rng = seeded_rng(3003);
    for trial in 0..500u64 {
        let n = rng.random_range(2..=7);
        let m = rng.random_range(3..=10);
        let inst = generate(9000 + trial, n, m, Variant::Uflp, None).unwrap();
        let mut y: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
        if y.iter().sum::<f64>() < 1.05 {
            y[0] = 1.0;
        }
        let cf = closed_form_uflp(&inst, &y).unwrap();
        let lp = solve_slave_lp(&inst, &y).unwrap();
        assert!(
            rel(cf.phi_assign, lp.phi_assign) <= 1e-6,
            "trial {trial}: closed form {} vs LP {}",
            cf.phi_assign,
            lp.phi_assign
        );
        let cuts = [make_cut(&cf, &y), make_cut(&lp, &y)];
        let audit = audit_cuts(&inst, &cuts).unwrap();
        assert!(
            audit.pass,
            "trial {trial}: violation {:e}, residual {:e}",
            audit.worst_violation,
            audit.max_tightness_residual
        );
    }
    println!("ACCEPTANCE 3 reduced-cost equivalence: PASS (500 pairs within 1e-6, cuts audit clean)");
}

/// Criterion 4: certificates on 1000 random bounded LPs (<= 12 vars): strong
/// duality within 1e-6, complementary slackness within 1e-7, and agreement
/// with basic-solution enumeration on the small subset within 1e-7.
#[test]
fn acceptance_4_simplex_certificates() {
    let mut rng = seeded_rng(4004);
    let cfg = SimplexConfig::default();
    let mut enumerated = 0usize;
    let mut optimal = 0usize;
    for trial in 0..1000u64 {
        let model = random_bounded_lp(&mut rng, 12, 8);
        let sol = solve_lp(&model, &cfg).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal, "trial {trial}: anchored LPs are feasible and bounded");
        optimal += 1;

        // Strong duality: primal objective equals the bound-aware dual value.
        let mut dual_obj = 0.0;
        for (r, row) in model.constraints.iter().enumerate() {
            dual_obj += sol.duals[r] * row.rhs;
        }
        for (j, &d) in sol.reduced_costs.iter().enumerate() {
            let (lo, hi) = model.bounds[j];
            dual_obj += if d > 0.0 { d * lo } else { d * hi };
        }
        let gap = (sol.objective - dual_obj).abs();
        assert!(
            gap <= 1e-6 * f64::max(1.0, sol.objective.abs()),
            "trial {trial}: duality gap {gap:e}"
        );

        // Primal feasibility, complementary slackness, and dual signs.
        for (j, &x) in sol.primal.iter().enumerate() {
            let (lo, hi) = model.bounds[j];
            assert!(
                x >= lo - 1e-7 && x <= hi + 1e-7,
                "trial {trial} var {j}: {x} outside [{lo}, {hi}]"
            );
        }
        for (r, row) in model.constraints.iter().enumerate() {
            let activity: f64 = row
                .coeffs
                .iter()
                .zip(&sol.primal)
                .map(|(c, x)| c * x)
                .sum();
            let slack = row.rhs - activity;
            let row_tol = 1e-7 * f64::max(1.0, row.rhs.abs());
            match row.relation {
                Relation::Le => assert!(slack >= -row_tol, "trial {trial} row {r} violated"),
                Relation::Ge => assert!(slack <= row_tol, "trial {trial} row {r} violated"),
                Relation::Eq => assert!(slack.abs() <= row_tol, "trial {trial} row {r} violated"),
            }
            assert!(
                (sol.duals[r] * slack).abs() <= 1e-7 * f64::max(1.0, sol.objective.abs()),
                "trial {trial} row {r}: CS product {:e}",
                sol.duals[r] * slack
            );
            match row.relation {
                Relation::Le => assert!(sol.duals[r] <= 1e-7, "trial {trial} row {r}"),
                Relation::Ge => assert!(sol.duals[r] >= -1e-7, "trial {trial} row {r}"),
                Relation::Eq => {}
            }
        }
        // Reduced-cost signs at bounds; basic reduced costs vanish.
        for (j, &status) in sol.basis.iter().enumerate() {
            let d = sol.reduced_costs[j];
            match status {
                VarStatus::Basic => assert!(d.abs() <= 1e-7, "trial {trial} var {j}: basic rc {d:e}"),
                VarStatus::AtLower => assert!(d >= -1e-7, "trial {trial} var {j}"),
                VarStatus::AtUpper => assert!(d <= 1e-7, "trial {trial} var {j}"),
                VarStatus::Free => assert!(d.abs() <= 1e-7, "trial {trial} var {j}"),
            }
        }

        // Independent enumeration on the small subset.
        if model.n_vars() <= 6 && model.n_rows() <= 6 {
            enumerated += 1;
            let best = enumerate_lp_min(&model).expect("feasible by construction");
            assert!(
                (sol.objective - best).abs() <= 1e-7 * f64::max(1.0, best.abs()),
                "trial {trial}: simplex {} vs enumeration {}",
                sol.objective,
                best
            );
        }
    }
    assert!(enumerated >= 50, "need a meaningful enumerated subset, got {enumerated}");
    println!(
        "ACCEPTANCE 4 simplex certificates: PASS ({optimal} optimal LPs, {enumerated} cross-checked by enumeration)"
    );
}

/// Criterion 5: kernel search sandwich on 100 instances with n in [10,20]:
/// root bound <= kernel cost, never below the brute-force optimum, incumbents
/// monotone, and the all-variables kernel reproduces the exact optimum.
#[test]
fn acceptance_5_kernel_sandwich() {
    let mut rng = seeded_rng(5005);
    let scfg = SolverConfig::default();
    let kcfg = KernelConfig::default();
    for trial in 0..100u64 {
        let n = rng.random_range(10..=20);
        let m = rng.random_range(10..=25);
        let inst = random_instance(20_000 + trial, n, m, Variant::Uflp);
        let opt = brute_force(&inst).unwrap();

        let mut sink = CollectSink::default();
        let res = kernel_search(&inst, &kcfg, &scfg, &mut sink).unwrap();
        let ub = res.upper_bound;
        assert!(
            res.lower_bound <= ub + 1e-9,
            "trial {trial}: root bound {} above kernel cost {ub}",
            res.lower_bound
        );
        assert!(
            ub >= opt.cost - 1e-6 * (1.0 + opt.cost.abs()),
            "trial {trial}: kernel {} beat the oracle {}",
            ub,
            opt.cost
        );
        let mut last = f64::INFINITY;
        for ev in sink.events.iter().filter(|e| e.action == Action::Incumbent) {
            let v = ev.ub.unwrap();
            assert!(v <= last + 1e-9, "trial {trial}: incumbent rose");
            last = last.min(v);
        }

        // Kernel covering every variable is exact.
        let (_, mut model) = initial_kernel(&inst, &kcfg, &scfg, &mut NullSink).unwrap();
        let all: Vec<usize> = (0..inst.n_real_facilities()).collect();
        let state = KernelState {
            inactivity: vec![0; all.len()],
            kernel: all,
            buckets: Vec::new(),
            incumbent: None,
            iteration: 0,
            root_bound: res.lower_bound,
        };
        let exact = kernel_search_from(&mut model, state, &kcfg, &scfg, &mut NullSink).unwrap();
        assert!(
            rel(exact.upper_bound, opt.cost) <= 1e-6,
            "trial {trial}: full kernel {} vs optimum {}",
            exact.upper_bound,
            opt.cost
        );
    }
    println!("ACCEPTANCE 5 kernel sandwich: PASS (100 instances, bounds ordered, full kernel exact)");
}

/// Criterion 6: repeated single-threaded bench runs on the fixture manifest
/// produce byte-identical CSV.
#[test]
fn acceptance_6_bench_determinism() {
    let exe = env!("CARGO_BIN_EXE_facloc");
    let manifest = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/bench.toml");
    let run = || {
        let out = std::process::Command::new(exe)
            .args(["bench", "--manifest", manifest, "--jobs", "1"])
            .output()
            .expect("bench runs");
        assert!(out.status.success(), "bench failed: {:?}", out);
        out.stdout
    };
    let a = run();
    let b = run();
    assert!(!a.is_empty());
    assert_eq!(a, b, "bench CSV differs between runs");
    println!(
        "ACCEPTANCE 6 determinism: PASS (byte-identical CSV over {} rows)",
        String::from_utf8_lossy(&a).lines().count() - 1
    );
}

/// Criterion 7: engineering target — a generated UFLP with n=100, m=200
/// reaches a relative gap of 0.5% within 60 seconds single-threaded.
#[test]
fn acceptance_7_large_uflp_gap_under_time_budget() {
    let inst = generate(777, 100, 200, Variant::Uflp, None).unwrap();
    let cfg = SolverConfig {
        gap_tol: 0.005,
        time_limit: Some(60.0),
        ..SolverConfig::default()
    };
    let start = Instant::now();
    let res = solve(&inst, &cfg, &mut NullSink).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed <= 60.0,
        "solver ignored its time budget: {elapsed:.1}s"
    );
    assert!(
        res.gap <= 0.005,
        "gap {:.4}% above the 0.5% target after {elapsed:.1}s ({} nodes, {} cuts)",
        res.gap * 100.0,
        res.n_nodes,
        res.n_cuts
    );
    println!(
        "ACCEPTANCE 7 performance: PASS (n=100 m=200 gap {:.3}% in {elapsed:.1}s, {} nodes, {} cuts)",
        res.gap * 100.0,
        res.n_nodes,
        res.n_cuts
    );
}
