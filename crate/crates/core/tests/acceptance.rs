//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL ...` line (written directly to stdout so it shows
//! without `--nocapture`).

use std::io::Write;
use std::time::Instant;

use descartes_core::condition::{
    global_cond_bracket, local_cond, separation_lower_bound, DEFAULT_MAX_GRID, DEFAULT_REL_TOL,
};
use descartes_core::experiments::{
    default_t_grid, run_cond_tail, run_instance_bound, run_rho_check, run_steps_scaling,
    trial_polynomial, DEFAULT_INSTANCE_CONSTANT,
};
use descartes_core::oracle::{numeric_roots, DEFAULT_TOL};
use descartes_core::regions::{
    count_roots_in_omega, obreshkoff_discs, rho_upper_bound, separation_in_eps, Membership,
    MEMBERSHIP_MARGIN,
};
use descartes_core::{isolate_unit, Dyadic, DyadicInterval, IntPolynomial, RandomModel};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

fn report(n: u32, pass: bool, detail: &str, started: Instant) {
    let line = format!(
        "criterion {n:>2}: {} {detail} [{:.1}s]\n",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(pass, "criterion {n} failed: {detail}");
}

fn p(c: &[i64]) -> IntPolynomial {
    IntPolynomial::from_i64s(c)
}

/// Imaginary-part threshold separating real oracle roots from complex ones.
const IMAG_TOL: f64 = 1e-10;

/// The 1000-polynomial uniform suite: 250 each at d = 8, 16, 32, 64, τ = 32.
fn uniform_suite() -> Vec<IntPolynomial> {
    let mut out = Vec::new();
    for (k, d) in [8usize, 16, 32, 64].into_iter().enumerate() {
        let m = RandomModel::uniform(d, 32).unwrap();
        out.extend((0..250).map(|i| trial_polynomial(&m, SEED + k as u64, i)));
    }
    out
}

#[test]
fn criterion_01_isolation_matches_oracle() {
    let t0 = Instant::now();
    let mut mismatches = Vec::new();
    let mut total_roots = 0;
    for (idx, f) in uniform_suite().iter().enumerate() {
        let res = isolate_unit(f).unwrap();
        let oracle = numeric_roots(f, DEFAULT_TOL).unwrap();
        let real: Vec<f64> = oracle
            .real_roots(IMAG_TOL)
            .into_iter()
            .filter(|x| x.abs() < 1.0)
            .collect();
        // intervals and exact roots in increasing order, as closed bounds
        let mut items: Vec<(f64, f64)> = res
            .intervals
            .iter()
            .map(|j| (j.lo.to_f64(), j.hi.to_f64()))
            .chain(
                res.exact_roots
                    .iter()
                    .map(|r| (r.value.to_f64(), r.value.to_f64())),
            )
            .collect();
        items.sort_by(|a, b| a.0.total_cmp(&b.0));
        total_roots += real.len();
        let ok = items.len() == real.len()
            && items
                .iter()
                .zip(&real)
                .all(|(&(lo, hi), &x)| x >= lo - DEFAULT_TOL && x <= hi + DEFAULT_TOL);
        if !ok {
            mismatches.push(idx);
        }
    }
    let pass = mismatches.is_empty() && t0.elapsed().as_secs() < 120;
    report(
        1,
        pass,
        &format!("1000 uniform polynomials, {total_roots} real roots in (-1,1), mismatches {mismatches:?}"),
        t0,
    );
}

/// Positive real roots with multiplicity: the gcd chain `g, gcd(g, g'), …`
/// contains each root of multiplicity `m` exactly `m` times.
fn positive_roots_with_multiplicity(f: &IntPolynomial) -> usize {
    let mut g = f.clone();
    let mut count = 0;
    while g.degree() >= 1 {
        let roots = numeric_roots(&g, DEFAULT_TOL).unwrap();
        count += roots
            .roots
            .iter()
            .filter(|z| z.im.abs() <= 1e-7 && z.re > 0.0)
            .count();
        g = g.gcd(&g.derivative());
    }
    count
}

#[test]
fn criterion_02_descartes_parity_and_bound() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let mut failures = 0;
    let mut with_multiplicity = 0;
    let mut n = 0;
    while n < 500 {
        let f = if n % 2 == 0 {
            let d = rng.gen_range(1..=8);
            p(&(0..=d).map(|_| rng.gen_range(-5..=5)).collect::<Vec<i64>>())
        } else {
            // products of linear factors (b X - a) and quadratics, with repeats
            let mut f =
                IntPolynomial::constant(rng.gen_range(1..=3) * if rng.gen() { 1 } else { -1 });
            while f.degree() < 8 {
                let factor = if rng.gen_bool(0.7) {
                    p(&[-rng.gen_range(-6..=6), rng.gen_range(1..=4)])
                } else {
                    p(&[
                        rng.gen_range(1..=5),
                        rng.gen_range(-4..=4),
                        rng.gen_range(1..=3),
                    ])
                };
                if f.degree() + factor.degree() > 8 {
                    break;
                }
                let reps = rng.gen_range(1..=3).min((8 - f.degree()) / factor.degree());
                for _ in 0..reps {
                    f = f.mul(&factor);
                }
                if rng.gen_bool(0.3) {
                    break;
                }
            }
            f
        };
        if f.degree() < 1 {
            continue;
        }
        // X^k factors change neither the sign sequence nor the positive roots
        let k = f.coeffs().iter().take_while(|c| **c == 0.into()).count();
        let g = IntPolynomial::new(f.coeffs()[k..].to_vec());
        if g.degree() < 1 {
            continue;
        }
        n += 1;
        let var = f.var_count();
        let pos = positive_roots_with_multiplicity(&g);
        if !g.is_square_free() {
            with_multiplicity += 1;
        }
        if var < pos || (var - pos) % 2 != 0 {
            failures += 1;
        }
    }
    let pass = failures == 0 && t0.elapsed().as_secs() < 10;
    report(2, pass, &format!("500 polynomials of degree <= 8 ({with_multiplicity} with multiple roots), failures {failures}"), t0);
}

#[test]
fn criterion_03_subadditivity_on_traces() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let mut internal = 0;
    let mut violations = 0;
    for run in 0..100 {
        let f = if run < 50 {
            let d = rng.gen_range(8..=64);
            trial_polynomial(&RandomModel::uniform(d, 32).unwrap(), SEED ^ 3, run)
        } else {
            // clustered rational roots inside (-1, 1)
            let mut f = IntPolynomial::constant(1);
            let k = rng.gen_range(3..=12);
            let mut used = std::collections::BTreeSet::new();
            while used.len() < k {
                let b = rng.gen_range(2i64..=64);
                let a = rng.gen_range(-b + 1..b);
                if used.insert((a * 64 / b, a, b)) {
                    f = f.mul(&p(&[-a, b]));
                }
            }
            f
        };
        let trace = isolate_unit(&f).unwrap().trace;
        for (i, kids) in trace.children().iter().enumerate() {
            if kids.is_empty() {
                continue;
            }
            internal += 1;
            let sum: usize = kids.iter().map(|&c| trace.var_per_node[c].var).sum();
            if sum > trace.var_per_node[i].var {
                violations += 1;
            }
        }
    }
    report(
        3,
        violations == 0,
        &format!("100 traced runs, {internal} internal nodes, violations {violations}"),
        t0,
    );
}

#[test]
fn criterion_04_lipschitz() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let scale = 1i64 << 30;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..10_000u64 {
        let d = rng.gen_range(1..=32);
        let f = RandomModel::uniform(d, 16).unwrap().sample(SEED ^ 4, i);
        if f.is_zero() {
            continue;
        }
        let deg = f.degree().max(1) as f64;
        let x = rng.gen_range(-scale..=scale);
        let y = if i % 2 == 0 {
            rng.gen_range(-scale..=scale)
        } else {
            let step = 1i64 << rng.gen_range(0..28);
            (x + rng.gen_range(-step..=step)).clamp(-scale, scale)
        };
        let (dx, dy) = (Dyadic::new(x, 30), Dyadic::new(y, 30));
        let hx = 1.0 / local_cond(&f, &dx).unwrap();
        let hy = 1.0 / local_cond(&f, &dy).unwrap();
        let gap = (hx - hy).abs() - (deg * (dx.to_f64() - dy.to_f64()).abs() + 1e-9);
        worst = worst.max(gap);
    }
    report(
        4,
        worst <= 0.0,
        &format!("10^4 triples, max(|h(x)-h(y)| - d|x-y| - 1e-9) = {worst:.3e}"),
        t0,
    );
}

#[test]
fn criterion_05_separation_bound() {
    let t0 = Instant::now();
    let (mut checked, mut skipped, mut failures) = (0, 0, 0);
    let mut min_ratio = f64::INFINITY;
    for f in uniform_suite() {
        if !f.is_square_free() {
            skipped += 1;
            continue;
        }
        let bracket = global_cond_bracket(&f, DEFAULT_REL_TOL, DEFAULT_MAX_GRID).unwrap();
        let Ok(sep) = separation_lower_bound(f.degree(), &bracket) else {
            skipped += 1;
            continue;
        };
        let roots = numeric_roots(&f, DEFAULT_TOL).unwrap();
        let delta = separation_in_eps(&roots, sep.eps);
        checked += 1;
        min_ratio = min_ratio.min(delta / sep.bound);
        if sep.bound > delta {
            failures += 1;
        }
    }
    report(
        5,
        failures == 0,
        &format!("{checked} square-free polynomials with finite bracket ({skipped} skipped), min separation/bound {min_ratio:.3}, failures {failures}"),
        t0,
    );
}

#[test]
fn criterion_06_rho_bound() {
    let t0 = Instant::now();
    let mut failures = 0;
    let mut min_slack = f64::INFINITY;
    let mut max_count = 0;
    for i in 0..500u64 {
        let d = 2 + (i as usize * 7919) % 63;
        let m = match i % 4 {
            0 | 1 => RandomModel::uniform(d, 32).unwrap(),
            2 => RandomModel::exact_bits(d, 16).unwrap(),
            _ => RandomModel::signs(
                d,
                8,
                (0..=d)
                    .map(|k| if (k * 5 + i as usize) % 3 == 0 { -1 } else { 1 })
                    .collect(),
            )
            .unwrap(),
        };
        let f = trial_polynomial(&m, SEED ^ 6, i);
        let bound = rho_upper_bound(&f).unwrap();
        let count = count_roots_in_omega(&f).unwrap();
        max_count = max_count.max(count.max);
        min_slack = min_slack.min(bound - count.max as f64);
        if bound < count.max as f64 {
            failures += 1;
        }
    }
    report(6, failures == 0, &format!("500 polynomials d <= 64, max rho {max_count}, min(bound - rho) {min_slack:.2}, failures {failures}"), t0);
}

#[test]
fn criterion_07_obreshkoff_sandwich() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let (mut accepted, mut skipped, mut failures) = (0, 0, 0);
    let mut i = 0u64;
    while accepted < 300 {
        i += 1;
        let d = rng.gen_range(2..=24);
        let f = trial_polynomial(&RandomModel::uniform(d, 12).unwrap(), SEED ^ 7, i);
        if !f.is_square_free() {
            skipped += 1;
            continue;
        }
        // random dyadic subinterval of (-1, 1) at depth 0..10
        let depth = rng.gen_range(0..=10u64);
        let k = rng.gen_range(0..(1i64 << depth));
        let lo = Dyadic::new(2 * k - (1i64 << depth), depth);
        let hi = Dyadic::new(2 * k + 2 - (1i64 << depth), depth);
        let j = DyadicInterval::new(lo, hi).unwrap();
        let pair = obreshkoff_discs(&j, f.degree());
        let roots = numeric_roots(&f, DEFAULT_TOL).unwrap().roots;
        let classify =
            |m: fn(&descartes_core::regions::ObreshkoffPair, Complex64, f64) -> Membership| {
                let ms: Vec<Membership> = roots
                    .iter()
                    .map(|&z| m(&pair, z, MEMBERSHIP_MARGIN))
                    .collect();
                if ms.contains(&Membership::Ambiguous) {
                    None
                } else {
                    Some(ms.iter().filter(|&&x| x == Membership::Inside).count())
                }
            };
        let (Some(lens), Some(area)) = (
            classify(descartes_core::regions::ObreshkoffPair::lens_membership),
            classify(descartes_core::regions::ObreshkoffPair::area_membership),
        ) else {
            skipped += 1;
            continue;
        };
        accepted += 1;
        let var = f.var_in_interval(&j);
        if !(lens <= var && var <= area) {
            failures += 1;
        }
    }
    report(
        7,
        failures == 0,
        &format!("300 (f, J) pairs ({skipped} skipped as degenerate), failures {failures}"),
        t0,
    );
}

#[test]
fn criterion_08_tail_bounds() {
    let t0 = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for d in [16usize, 32] {
        let m = RandomModel::uniform(d, 64).unwrap();
        let t1 = Instant::now();
        let cond = run_cond_tail(&m, d, 2000, &default_t_grid(64), SEED ^ 8, false).unwrap();
        let cond_secs = t1.elapsed().as_secs_f64();
        let t2 = Instant::now();
        let rho = run_rho_check(&m, d, 2000, SEED ^ 8, false).unwrap();
        let rho_secs = t2.elapsed().as_secs_f64();
        let cond_bad = cond.tail.iter().filter(|p| !p.pass).count();
        let rho_bad = rho.tail.iter().filter(|p| !p.pass).count();
        pass &= cond_bad == 0 && rho_bad == 0 && cond_secs < 300.0 && rho_secs < 300.0;
        parts.push(format!(
            "d={d}: cond {}/{} points below curve ({cond_secs:.0}s), rho {}/{} ({rho_secs:.0}s, mean {:.2})",
            cond.tail.len() - cond_bad,
            cond.tail.len(),
            rho.tail.len() - rho_bad,
            rho.tail.len(),
            rho.extras["rho_mean"],
        ));
    }
    report(8, pass, &parts.join("; "), t0);
}

#[test]
fn criterion_09_steps_scaling() {
    let t0 = Instant::now();
    let m = RandomModel::uniform(16, 32).unwrap();
    let rep = run_steps_scaling(&m, &[16, 64, 256], 200, SEED ^ 9, false).unwrap();
    let means: Vec<f64> = [16, 64, 256]
        .iter()
        .map(|&d| rep.aggregate(d, "node_count").unwrap().mean)
        .collect();
    let ratio = means[2] / means[0];
    let violations: f64 = [16, 64, 256]
        .iter()
        .map(|d| rep.extras[&format!("depth_violations[{d}]")])
        .sum();
    let unbounded: f64 = [16, 64, 256]
        .iter()
        .map(|d| rep.extras[&format!("unbounded_brackets[{d}]")])
        .sum();
    let pass = ratio < 4.0 && violations == 0.0 && unbounded == 0.0 && t0.elapsed().as_secs() < 600;
    report(
        9,
        pass,
        &format!(
            "mean nodes {:.2}/{:.2}/{:.2} at d=16/64/256, ratio {ratio:.3}, depth violations {violations}, unbounded brackets {unbounded}",
            means[0], means[1], means[2]
        ),
        t0,
    );
}

#[test]
fn criterion_10_instance_bound() {
    let t0 = Instant::now();
    let m = RandomModel::uniform(64, 32).unwrap();
    let rep = run_instance_bound(&m, 64, 500, SEED ^ 10, DEFAULT_INSTANCE_CONSTANT, false).unwrap();
    let p99 = rep.extras["ratio_p99"];
    report(
        10,
        rep.pass == Some(true),
        &format!("500 trials at d=64, p99 ratio {p99:.4} (constant {DEFAULT_INSTANCE_CONSTANT})"),
        t0,
    );
}
