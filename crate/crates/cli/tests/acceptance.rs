//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use dmic_core::random::{random_aux_input, random_cond, random_dist, random_weak_zic};
use dmic_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = std::result::Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run_cli(args: &[&str]) -> std::result::Result<(Value, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_dmic"))
        .args(args)
        .env_remove("DMIC_SEED")
        .output()
        .map_err(|e| format!("spawn failed: {e}"))?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!(
            "dmic {} exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let v = serde_json::from_slice(&out.stdout).map_err(|e| format!("bad JSON: {e}"))?;
    Ok((v, elapsed))
}

fn cap(eps: f64) -> f64 {
    1.0 - binary_entropy(eps).unwrap()
}

fn criterion_1() -> Outcome {
    let (v, t) = run_cli(&["sumrate", "--builtin", "example5", "--json"])?;
    let s = v["sum_rate"].as_f64().ok_or("missing sum_rate")?;
    check(
        (s - 0.531).abs() <= 0.002 && t < Duration::from_secs(10),
        format!(
            "example5 sum rate {s:.6} (want 0.531 +- 0.002) in {:.2} s (limit 10 s)",
            t.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut worst_sum: f64 = 0.0;
    let mut worst_axis: f64 = 0.0;
    for eps in [0.05, 0.1, 0.25] {
        let c = builtin::example2(eps).map_err(|e| e.to_string())?;
        let s = sumrate_weak_zic(&c, &cfg).map_err(|e| e.to_string())?;
        worst_sum = worst_sum.max((s.value - cap(eps)).abs());
        let r = achievable_region_zic(&c, &cfg, 64).map_err(|e| e.to_string())?;
        for p in [
            RatePoint {
                r1: cap(eps),
                r2: 0.0,
            },
            RatePoint {
                r1: 0.0,
                r2: cap(eps),
            },
        ] {
            worst_axis = worst_axis.max(r.distance_to(p));
        }
    }
    check(
        worst_sum <= 1e-4 && worst_axis <= 1e-4,
        format!("example2 eps in {{0.05, 0.1, 0.25}}: max |C_sum - (1 - h2)| = {worst_sum:.2e}, max axis-point distance {worst_axis:.2e} (tol 1e-4)"),
    )
}

fn criterion_3() -> Outcome {
    let cfg = OptimizerConfig::default();
    let c = builtin::example6();
    let s = sumrate_mixed(&c, &cfg).map_err(|e| e.to_string())?;
    let r = achievable_region_mixed(&c, &cfg, 1024).map_err(|e| e.to_string())?;
    let max_sum = r.max_sum();
    check(
        (s.value - 1.0).abs() <= 1e-6 && max_sum <= 1.0 + 1e-9,
        format!("example6 sum rate {:.9} (want 1 +- 1e-6); largest R1+R2 over achievable points {max_sum:.9}", s.value),
    )
}

fn criterion_4() -> Outcome {
    let (v, _) = run_cli(&["counterexample", "--step", "0.001", "--json"])?;
    let entry = v["offending"]["value"]
        .as_f64()
        .ok_or("missing offending value")?;
    let feasible = v["feasible"].as_bool().ok_or("missing feasible")?;
    let gap = v["weak_alt_min_gap"].as_f64().ok_or("missing min gap")?;
    let step = v["surface_step"].as_f64().ok_or("missing step")?;
    check(
        (entry + 0.0625).abs() <= 1e-12 && !feasible && gap >= -1e-9 && (step - 0.001).abs() < 1e-15,
        format!("offending entry {entry} (want -0.0625 +- 1e-12), feasible = {feasible}, weak-alt min gap {gap:.3e} at step {step}"),
    )
}

fn criterion_5() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for name in builtin::NAMES {
        let c = builtin::builtin_channel(name).map_err(|e| e.to_string())?;
        if !c.is_binary() {
            continue;
        }
        n += 1;
        let pairs = [
            (
                maximize_product_input(weak_zic_objective(&c), &[2, 2], &cfg),
                grid_oracle(weak_zic_objective(&c), &[2, 2], 0.001),
            ),
            (
                maximize_product_input(mixed_objective(&c), &[2, 2], &cfg),
                grid_oracle(mixed_objective(&c), &[2, 2], 0.001),
            ),
        ];
        for (a, b) in pairs {
            let (a, b) = (a.map_err(|e| e.to_string())?, b.map_err(|e| e.to_string())?);
            worst = worst.max((a.value - b.value).abs());
        }
    }
    check(
        worst <= 1e-3,
        format!("{n} binary channels x 2 objectives: max |optimizer - grid(0.001)| = {worst:.2e} (tol 1e-3)"),
    )
}

fn criterion_6() -> Outcome {
    let cfg = OptimizerConfig::default();
    let c = builtin::example5();
    let e = |e: Error| e.to_string();
    let ach = achievable_region_zic(&c, &cfg, 256).map_err(e)?;
    let bc = bc_outer_bound(&c, &builtin::example5_y2_map(), &cfg).map_err(e)?;
    let simple = simple_outer_bound(&c, &cfg).map_err(e)?;
    let in_bc = ach
        .vertices()
        .iter()
        .map(|&p| bc.distance_to(p))
        .fold(0.0, f64::max);
    let in_simple = ach
        .vertices()
        .iter()
        .map(|&p| simple.distance_to(p))
        .fold(0.0, f64::max);
    let r2 = 0.9 * bc.max_r2();
    let b = bc.max_r1_at(r2).ok_or("R2 outside the bc bound")?;
    let s = simple.max_r1_at(r2).ok_or("R2 outside the simple bound")?;
    check(
        in_bc <= 1e-6 && in_simple <= 1e-6 && b < s,
        format!("example5: achievable vertices outside bc by {in_bc:.1e}, outside simple by {in_simple:.1e} (tol 1e-6); at R2 = {r2:.6}: bc R1 {b:.6} < simple R1 {s:.6}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let (nx1, nx2, ny1, ny2) = (
            rng.random_range(2..=3),
            rng.random_range(2..=3),
            rng.random_range(2..=3),
            rng.random_range(2..=3),
        );
        let c = random_weak_zic(&mut rng, nx1, nx2, ny1, ny2).map_err(|e| e.to_string())?;
        let nu = rng.random_range(1..=nx2 + 3);
        let aux = random_aux_input(&mut rng, nu, nx2, nx1).map_err(|e| e.to_string())?;
        let j = aux.joint(&c).map_err(|e| e.to_string())?;
        // axes X1, U, X2, Y1, Y2
        let gap = j.cmi(&[1], &[4], &[]).unwrap() - j.cmi(&[1], &[3], &[0]).unwrap();
        worst = worst.min(gap);
    }
    check(
        worst >= -1e-9,
        format!("1000 random weak channels and laws: min I(U;Y2) - I(U;Y1|X1) = {worst:.3e} (tol -1e-9)"),
    )
}

fn joint4(rng: &mut ChaCha8Rng, contraction: bool) -> JointDist {
    let n: [usize; 4] = std::array::from_fn(|_| rng.random_range(2..=3));
    let pxy = random_dist(rng, n[0] * n[1]).unwrap();
    let mut t = Vec::new();
    if contraction {
        // p(x,y) p(z|y) p(w|y,z)
        let pz = random_cond(rng, n[1], n[2]).unwrap();
        let pw = random_cond(rng, n[1] * n[2], n[3]).unwrap();
        for x in 0..n[0] {
            for y in 0..n[1] {
                for z in 0..n[2] {
                    for w in 0..n[3] {
                        t.push(pxy.values()[x * n[1] + y] * pz.get(y, z) * pw.get(y * n[2] + z, w));
                    }
                }
            }
        }
    } else {
        // p(x,y) p(z,w|y)
        let pzw = random_cond(rng, n[1], n[2] * n[3]).unwrap();
        for x in 0..n[0] {
            for y in 0..n[1] {
                for zw in 0..n[2] * n[3] {
                    t.push(pxy.values()[x * n[1] + y] * pzw.get(y, zw));
                }
            }
        }
    }
    JointDist::new(&n, t).unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut dec, mut wu, mut con): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..1000 {
        let j = joint4(&mut rng, false);
        dec = dec.max(
            is_markov_chain(&j.marginal(&[0, 1, 2]).unwrap(), 1e-9)
                .unwrap()
                .max_violation,
        );
        wu = wu.max(
            prob::is_markov_chain_groups(&j, &[0], &[1, 3], &[2], 1e-9)
                .unwrap()
                .max_violation,
        );
        let j = joint4(&mut rng, true);
        con = con.max(
            prob::is_markov_chain_groups(&j, &[0], &[1], &[2, 3], 1e-9)
                .unwrap()
                .max_violation,
        );
    }
    check(
        dec <= 1e-9 && wu <= 1e-9 && con <= 1e-9,
        format!("1000 joints each: max violation decomposition {dec:.1e}, weak union {wu:.1e}, contraction {con:.1e} (tol 1e-9)"),
    )
}

fn criterion_9() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut bad = Vec::new();
    for name in builtin::NAMES {
        let c = builtin::builtin_channel(name).map_err(|e| e.to_string())?;
        let r = classify(&c, &cfg, 1e-9).map_err(|e| e.to_string())?;
        let ok = match name {
            "example6" => r.mixed() && r.degraded && r.holds(Condition::MixedMi) && !r.one_sided,
            "appendix" => r.one_sided && r.holds(Condition::WeakAlt) && !r.degraded,
            _ => r.one_sided && r.weak_one_sided(),
        };
        if !ok {
            bad.push(format!("{name}: {:?}", r.labels()));
        }
    }
    check(
        bad.is_empty(),
        if bad.is_empty() {
            "example1-5 weak one-sided; example6 mixed and not one-sided; appendix one-sided, weak-alt, not degraded".into()
        } else {
            format!("deviations: {}", bad.join("; "))
        },
    )
}

fn criterion_10() -> Outcome {
    let e = |e: Error| e.to_string();
    let (p1, p2) = (2.0, 3.0);
    let v = gaussian_reference(p1, p2, 0.0, 0.0, GaussianKind::OneSidedWeak).map_err(e)?;
    let free = 0.5 * (1.0f64 + p1).log2() + 0.5 * (1.0f64 + p2).log2();
    let (u, w) = gaussian_mixed_branches(1.5, 1.5, 1.0, 1.0).map_err(e)?;
    check(
        (v - free).abs() <= 1e-12 && (u - w).abs() <= 1e-12,
        format!(
            "a = 0 deviation {:.1e}; mixed a = b = 1, P1 = P2 branch difference {:.1e} (tol 1e-12)",
            (v - free).abs(),
            (u - w).abs()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("example5 sum rate via CLI", criterion_1),
        ("example2 family", criterion_2),
        ("example6 mixed sum rate", criterion_3),
        ("appendix counterexample via CLI", criterion_4),
        ("optimizer vs grid oracle", criterion_5),
        ("example5 region sandwich", criterion_6),
        ("weak-channel inequality suite", criterion_7),
        ("Markov property suite", criterion_8),
        ("classification table", criterion_9),
        ("Gaussian references", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS criterion {:>2} {name}: {d} [{secs:.2} s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {d} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
