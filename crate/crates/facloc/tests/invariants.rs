//! Cross-module property tests: format round trips, recourse preservation,
//! event-log monotonicity, pool soundness, and determinism.

mod common;

use common::{random_instance, seeded_rng};
use facloc::events::{Action, CollectSink, NullSink};
use facloc::instance::{
    add_recourse, emit_native, generate, parse_native, Instance, Variant,
};
use facloc::kernel::{kernel_search, KernelConfig};
use facloc::master::{solve, solve_root, MasterModel, SolveStatus, SolverConfig};
use facloc::oracle::{audit_cuts, brute_force};
use facloc::slave::evaluate_binary;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// parse(emit(x)) == x on random generated instances, with and without a
    /// recourse column.
    #[test]
    fn native_round_trip(seed in 0u64..10_000, n in 1usize..7, m in 1usize..7,
                         cflp in proptest::bool::ANY, recourse in proptest::bool::ANY) {
        let variant = if cflp { Variant::Cflp } else { Variant::Uflp };
        let ratio = cflp.then_some(1.5);
        let mut inst = generate(seed, n, m, variant, ratio).unwrap();
        if recourse {
            let p = inst.recommended_recourse_penalty();
            inst = add_recourse(&inst, p).unwrap();
        }
        let text = emit_native(&inst);
        let back = parse_native(&text).unwrap();
        prop_assert_eq!(&inst, &back);
        // Emission is canonical: emitting the parse gives identical bytes.
        prop_assert_eq!(text, emit_native(&back));
    }
}

#[test]
fn generate_same_seed_same_bytes() {
    for seed in 0..20 {
        let a = generate(seed, 6, 9, Variant::Cflp, Some(1.4)).unwrap();
        let b = generate(seed, 6, 9, Variant::Cflp, Some(1.4)).unwrap();
        assert_eq!(emit_native(&a), emit_native(&b));
    }
}

/// Shortest positive capacity shortfall over all selections; the recourse
/// penalty that provably preserves the optimum scales with its inverse.
fn min_positive_shortfall(inst: &Instance) -> f64 {
    let caps = inst.capacities().unwrap();
    let total_demand = inst.total_demand();
    let n = inst.n_facilities();
    let mut best = total_demand;
    for mask in 0u64..(1u64 << n) {
        let cap: f64 = (0..n).filter(|i| (mask >> i) & 1 == 1).map(|i| caps[i]).sum();
        let short = total_demand - cap;
        if short > 1e-9 && short < best {
            best = short;
        }
    }
    best
}

#[test]
fn add_recourse_preserves_feasible_optimum() {
    for seed in 0..40u64 {
        let variant = if seed % 2 == 0 {
            Variant::Uflp
        } else {
            Variant::Cflp
        };
        let ratio = (variant == Variant::Cflp).then_some(1.3);
        let n = 3 + (seed % 4) as usize; // up to 6
        let inst = generate(seed, n, 6, variant, ratio).unwrap();
        let orig = brute_force(&inst).unwrap();

        // A penalty provably large enough that no selection can buy its way
        // out of a facility through the dummy column.
        let ub = orig.cost;
        let penalty = match variant {
            Variant::Uflp => inst.max_real_assign_cost().max(ub) + 1.0,
            Variant::Cflp => {
                let d_max = inst
                    .demands()
                    .unwrap()
                    .iter()
                    .fold(0.0_f64, |a, &b| a.max(b));
                let delta = min_positive_shortfall(&inst);
                (ub * d_max / delta + 1.0).max(inst.max_real_assign_cost() + 1.0)
            }
        };
        let aug = add_recourse(&inst, penalty).unwrap();
        let aug_opt = brute_force(&aug).unwrap();
        assert!(
            (aug_opt.cost - orig.cost).abs() <= 1e-6 * (1.0 + orig.cost.abs()),
            "seed {seed}: {} vs {} (penalty {penalty})",
            aug_opt.cost,
            orig.cost
        );
    }
}

#[test]
fn event_log_bounds_are_monotone_and_incumbents_reevaluate() {
    for seed in 200..215u64 {
        let variant = if seed % 3 == 0 {
            Variant::Cflp
        } else {
            Variant::Uflp
        };
        let inst = random_instance(seed, 6, 10, variant);
        let mut sink = CollectSink::default();
        let res = solve(&inst, &SolverConfig::default(), &mut sink).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);

        let mut last_lb = f64::NEG_INFINITY;
        let mut last_ub = f64::INFINITY;
        for ev in &sink.events {
            assert!(
                ev.lb >= last_lb - 1e-9,
                "seed {seed}: lb regressed {} -> {}",
                last_lb,
                ev.lb
            );
            last_lb = last_lb.max(ev.lb);
            if let Some(ub) = ev.ub {
                assert!(
                    ub <= last_ub + 1e-9,
                    "seed {seed}: ub rose {last_ub} -> {ub}"
                );
                last_ub = last_ub.min(ub);
            }
        }
        // Bounds sandwich the brute-force optimum throughout.
        let opt = brute_force(&inst).unwrap();
        for ev in &sink.events {
            assert!(ev.lb <= opt.cost + 1e-6 * (1.0 + opt.cost.abs()));
            if let Some(ub) = ev.ub {
                assert!(ub >= opt.cost - 1e-6 * (1.0 + opt.cost.abs()));
            }
        }
        // The final incumbent re-evaluates to the reported upper bound.
        let y = res.best_y.unwrap();
        let cost = evaluate_binary(&inst, &y).unwrap();
        assert!((cost - res.upper_bound).abs() <= 1e-6 * (1.0 + cost.abs()));
        assert!(sink.events.iter().any(|e| e.action == Action::Incumbent));
    }
}

#[test]
fn pool_cuts_never_overestimate() {
    for seed in 300..312u64 {
        let variant = if seed % 4 == 0 {
            Variant::Cflp
        } else {
            Variant::Uflp
        };
        let inst = random_instance(seed, 7, 9, variant);
        let mut model = MasterModel::new(&inst).unwrap();
        model.solve(&SolverConfig::default(), &mut NullSink).unwrap();
        let audit = audit_cuts(&inst, model.pool()).unwrap();
        assert!(
            audit.pass,
            "seed {seed}: violation {:e}, residual {:e}",
            audit.worst_violation, audit.max_tightness_residual
        );
    }
}

#[test]
fn solve_is_deterministic_including_node_count() {
    for seed in 400..410u64 {
        let inst = random_instance(seed, 8, 14, Variant::Uflp);
        let a = solve(&inst, &SolverConfig::default(), &mut NullSink).unwrap();
        let b = solve(&inst, &SolverConfig::default(), &mut NullSink).unwrap();
        assert!(a.same_outcome(&b), "seed {seed}");
        assert_eq!(a.n_nodes, b.n_nodes);
        assert_eq!(a.n_cuts, b.n_cuts);
    }
}

#[test]
fn root_bound_never_exceeds_optimum() {
    let mut rng = seeded_rng(77);
    for trial in 0..100u64 {
        let n = rng.random_range(3..=8);
        let m = rng.random_range(5..=12);
        let variant = if trial % 3 == 0 {
            Variant::Cflp
        } else {
            Variant::Uflp
        };
        let inst = random_instance(trial, n, m, variant);
        let root = solve_root(&inst, &SolverConfig::default(), &mut NullSink).unwrap();
        let opt = brute_force(&inst).unwrap();
        assert!(
            root.bound <= opt.cost + 1e-6 * (1.0 + opt.cost.abs()),
            "trial {trial}: root {} > opt {}",
            root.bound,
            opt.cost
        );
    }
}

#[test]
fn kernel_incumbents_monotone_and_growth_without_removal() {
    for seed in 500..510u64 {
        let inst = random_instance(seed, 10, 12, Variant::Uflp);
        let mut sink = CollectSink::default();
        let kcfg = KernelConfig {
            allow_removal: false,
            ..KernelConfig::default()
        };
        let res = kernel_search(&inst, &kcfg, &SolverConfig::default(), &mut sink).unwrap();
        // Monotone incumbents across the whole search.
        let mut last = f64::INFINITY;
        for ev in sink.events.iter().filter(|e| e.action == Action::Incumbent) {
            let ub = ev.ub.unwrap();
            assert!(ub <= last + 1e-9, "seed {seed}");
            last = last.min(ub);
        }
        let y = res.best_y.unwrap();
        let cost = evaluate_binary(&inst, &y).unwrap();
        assert!((cost - res.upper_bound).abs() <= 1e-6 * (1.0 + cost.abs()));
        assert!(res.lower_bound <= res.upper_bound + 1e-9);
    }
}
