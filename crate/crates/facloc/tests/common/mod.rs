//! Shared test oracles and generators. The LP enumeration here is an
//! independent check of the simplex: it never touches the solver's pivoting
//! path, only dense Gaussian solves over candidate bases.

// Each integration test binary compiles this module; not all use every item.
#![allow(dead_code)]

use facloc::instance::{add_recourse, generate, Instance, Variant};
use facloc::simplex::{LPModel, LinearConstraint, Relation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum objective over all basic solutions of a *bounded-box* LP, or
/// `None` when no feasible basic solution exists. Correct only when every
/// variable has finite bounds (then some vertex is optimal).
pub fn enumerate_lp_min(model: &LPModel) -> Option<f64> {
    let n = model.n_vars();
    let m = model.n_rows();
    // Full variable space: structurals then one slack per row.
    let total = n + m;
    let col = |j: usize, r: usize| -> f64 {
        if j < n {
            model.constraints[r].coeffs[j]
        } else if j - n == r {
            1.0
        } else {
            0.0
        }
    };
    let bounds = |j: usize| -> (f64, f64) {
        if j < n {
            model.bounds[j]
        } else {
            match model.constraints[j - n].relation {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => (0.0, 0.0),
            }
        }
    };

    let mut best: Option<f64> = None;
    let mut basis = Vec::with_capacity(m);
    let mut combo = vec![0usize; m];

    // Iterate all C(total, m) bases.
    fn next_combination(combo: &mut [usize], total: usize) -> bool {
        let k = combo.len();
        if k == 0 {
            return false;
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if combo[i] < total - (k - i) {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    for (i, c) in combo.iter_mut().enumerate() {
        *c = i;
    }
    if m > total {
        return None;
    }

    loop {
        basis.clear();
        basis.extend_from_slice(&combo);
        let nonbasic: Vec<usize> = (0..total).filter(|j| !basis.contains(j)).collect();

        // Nonbasic bound choices: each at lower or upper (finite only).
        let k = nonbasic.len();
        'choices: for mask in 0u64..(1u64 << k) {
            let mut x = vec![0.0; total];
            for (b, &j) in nonbasic.iter().enumerate() {
                let (lo, hi) = bounds(j);
                let v = if (mask >> b) & 1 == 0 { lo } else { hi };
                if !v.is_finite() {
                    continue 'choices;
                }
                x[j] = v;
            }
            // Solve B x_B = rhs - N x_N.
            let mut rhs: Vec<f64> = (0..m).map(|r| model.constraints[r].rhs).collect();
            for &j in &nonbasic {
                if x[j] != 0.0 {
                    for (r, rv) in rhs.iter_mut().enumerate() {
                        *rv -= col(j, r) * x[j];
                    }
                }
            }
            let mut mat = vec![0.0; m * m];
            for (c, &j) in basis.iter().enumerate() {
                for r in 0..m {
                    mat[r * m + c] = col(j, r);
                }
            }
            if !gauss_solve(&mut mat, &mut rhs, m) {
                continue;
            }
            let mut feasible = true;
            for (c, &j) in basis.iter().enumerate() {
                let (lo, hi) = bounds(j);
                if rhs[c] < lo - 1e-9 || rhs[c] > hi + 1e-9 {
                    feasible = false;
                    break;
                }
                x[j] = rhs[c];
            }
            if !feasible {
                continue;
            }
            let obj: f64 = model.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            best = Some(best.map_or(obj, |b: f64| b.min(obj)));
        }

        if !next_combination(&mut combo, total) {
            break;
        }
    }
    // Degenerate case: no rows at all — the box optimum sits at the bounds.
    if m == 0 {
        let mut obj = 0.0;
        for (j, &c) in model.objective.iter().enumerate() {
            let (lo, hi) = model.bounds[j];
            obj += if c >= 0.0 { c * lo } else { c * hi };
        }
        return Some(obj);
    }
    best
}

fn gauss_solve(mat: &mut [f64], rhs: &mut [f64], m: usize) -> bool {
    for col in 0..m {
        let mut piv = col;
        let mut best = mat[col * m + col].abs();
        for r in col + 1..m {
            let v = mat[r * m + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-10 {
            return false;
        }
        if piv != col {
            for c in 0..m {
                mat.swap(piv * m + c, col * m + c);
            }
            rhs.swap(piv, col);
        }
        let p = mat[col * m + col];
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = mat[r * m + col] / p;
            if f != 0.0 {
                for c in col..m {
                    mat[r * m + c] -= f * mat[col * m + c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    for col in 0..m {
        rhs[col] /= mat[col * m + col];
    }
    true
}

/// Random feasible-by-construction bounded LP: every row is anchored at a
/// random interior point of the box, so the feasible set is nonempty and the
/// optimum finite.
pub fn random_bounded_lp(rng: &mut ChaCha8Rng, max_vars: usize, max_rows: usize) -> LPModel {
    let n = rng.random_range(1..=max_vars);
    let m = rng.random_range(1..=max_rows);
    let mut bounds = Vec::with_capacity(n);
    for _ in 0..n {
        let lo = rng.random_range(-5.0..0.0);
        let hi = lo + rng.random_range(0.5..8.0);
        bounds.push((lo, hi));
    }
    let anchor: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| rng.random_range(lo..hi))
        .collect();
    let objective: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    let mut constraints = Vec::with_capacity(m);
    for _ in 0..m {
        let coeffs: Vec<f64> = (0..n)
            .map(|_| f64::from(rng.random_range(-5..6_i32)))
            .collect();
        let at_anchor: f64 = coeffs.iter().zip(&anchor).map(|(c, x)| c * x).sum();
        let (relation, rhs) = match rng.random_range(0..3) {
            0 => (Relation::Le, at_anchor + rng.random_range(0.0..4.0)),
            1 => (Relation::Ge, at_anchor - rng.random_range(0.0..4.0)),
            _ => (Relation::Eq, at_anchor),
        };
        constraints.push(LinearConstraint {
            coeffs,
            relation,
            rhs,
        });
    }
    LPModel {
        objective,
        constraints,
        bounds,
    }
}

/// Seeded random instance; CFLP gets a recourse column sized by the
/// recommended penalty.
pub fn random_instance(seed: u64, n: usize, m: usize, variant: Variant) -> Instance {
    let ratio = match variant {
        Variant::Cflp => Some(1.2 + (seed % 9) as f64 * 0.1),
        Variant::Uflp => None,
    };
    let inst = generate(seed, n, m, variant, ratio).unwrap();
    match variant {
        Variant::Cflp => {
            let penalty = inst.recommended_recourse_penalty();
            add_recourse(&inst, penalty).unwrap()
        }
        Variant::Uflp => inst,
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
