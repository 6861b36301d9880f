//! Acceptance checks, one PASS/FAIL line per criterion.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

use corrterm::alexander::{torsion_coefficient, torus_knot};
use corrterm::brcover::{valid_parameters, KpModel};
use corrterm::cfk::{
    equal_up_to_acyclic, split_summands, split_summands_observed, staircase, tensor, Move,
};
use corrterm::lens::{central_label, conjugate_label, d_lens, SpincLabel};
use corrterm::metabolizer::{
    enumerate_metabolizers, enumerate_via_split, LinkingGroup, DEFAULT_ENUMERATION_BOUND,
};
use corrterm::obstruction::{
    check_predicate, cover_summands, normalize, witness, LinearCombination,
};
use corrterm::Rational;

const P_RANGE: [u64; 23] = [
    3, 5, 6, 8, 9, 11, 14, 15, 18, 20, 21, 23, 26, 29, 30, 33, 35, 36, 39, 41, 44, 48, 50,
];

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corrterm(args: &[&str]) -> (Option<i32>, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_corrterm"))
        .args(args)
        .env_remove("CORRTERM_CACHE")
        .output()
        .expect("binary runs");
    (o.status.code(), String::from_utf8(o.stdout).unwrap())
}

/// `i_k mod (2p+1)^2` from the closed form, independent of the library's label code.
fn i_k(p: u64, k: u64) -> SpincLabel {
    let n = ((2 * p + 1) * (2 * p + 1)) as i64;
    let (p, k) = (p as i64, k as i64);
    SpincLabel::reduce(-2 * p * p - p - 1 + k * (2 * p + 1), n as u64)
}

fn sigma_tables() -> Check {
    let mut elapsed = Duration::ZERO;
    for p in P_RANGE {
        let start = Instant::now();
        let (code, out) = corrterm(&[
            "sigma",
            "--p",
            &p.to_string(),
            "--table",
            "--format",
            "json",
        ]);
        elapsed += start.elapsed();
        ensure(code == Some(0), || format!("sigma --p {p} exited {code:?}"))?;
        let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        let rows = v["rows"].as_array().ok_or("no rows")?;
        ensure(rows.len() as u64 == 2 * p + 1, || {
            format!("p={p}: {} rows", rows.len())
        })?;
        for r in rows {
            let k = r["k"].as_u64().ok_or("k")?;
            let want = if k == p || k == p + 1 { "-2" } else { "0" };
            ensure(r["d"] == want, || format!("p={p}, k={k}: d = {}", r["d"]))?;
        }
    }
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{} values of p, CLI time {elapsed:.2?}",
        P_RANGE.len()
    ))
}

fn ribbon_vanishing() -> Check {
    let mut count = 0;
    for p in P_RANGE {
        let n = (2 * p + 1) * (2 * p + 1);
        let lib = KpModel::new(p)
            .map_err(|e| e.to_string())?
            .metabolizer_labels();
        for k in 0..=2 * p {
            let l = i_k(p, k);
            ensure(lib[k as usize].label == l, || {
                format!("p={p}, k={k}: label mismatch")
            })?;
            let d = d_lens(n, 2 * p as i64, l).map_err(|e| e.to_string())?;
            ensure(d.is_zero(), || format!("d(L({n},{}), {l}) = {d}", 2 * p))?;
            count += 1;
        }
    }
    Ok(format!("{count} labels, all d = 0"))
}

fn spin_consistency() -> Check {
    for p in P_RANGE {
        let n = (2 * p + 1) * (2 * p + 1);
        let q = 2 * p as i64;
        let c = central_label(n, q).map_err(|e| e.to_string())?;
        ensure(c == i_k(p, 0), || {
            format!("p={p}: central {c} != i_0 {}", i_k(p, 0))
        })?;
        let conj = conjugate_label(n, q, i_k(p, p)).map_err(|e| e.to_string())?;
        ensure(conj == i_k(p, p + 1), || {
            format!("p={p}: conj(i_p) = {conj}")
        })?;
    }
    Ok(format!("{} values of p", P_RANGE.len()))
}

fn witnesses() -> Check {
    let start = Instant::now();
    for (combo, alex) in [
        ("1*K3", false),
        ("2*K3 - 1*K5", false),
        ("1*K3 + 1*K5 + 1*K8", false),
        ("1*K3", true),
    ] {
        let mut args = vec!["obstruct", "--combo", combo, "--format", "json"];
        if alex {
            args.push("--alexander-one");
        }
        let (code, out) = corrterm(&args);
        ensure(code == Some(0), || format!("{combo}: exit {code:?}"))?;
        let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        ensure(v["obstructed"] == true && v["d_witness"] == "-2", || {
            format!("{combo}: {}", v["d_witness"])
        })?;
    }
    let mut agreed = 0;
    for p in valid_parameters(3, 9) {
        for n in [1, -1, 2, -2] {
            let c = LinearCombination::new([(p, n)], false).map_err(|e| e.to_string())?;
            let report = witness(&c).map_err(|e| e.to_string())?;
            let j = normalize(&c).ok_or("empty")?.combination;
            let summands = cover_summands(&j).map_err(|e| e.to_string())?;
            let outcome =
                check_predicate(&summands, DEFAULT_ENUMERATION_BOUND).map_err(|e| e.to_string())?;
            ensure(report.obstructed == !outcome.holds, || {
                format!("{c}: witness and predicate disagree")
            })?;
            ensure(report.d_witness == Some(Rational::from(-2)), || {
                format!("{c}: d_witness")
            })?;
            agreed += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "4 certificates, {agreed} single-knot agreements, {elapsed:.2?}"
    ))
}

fn staircase_identity() -> Check {
    let s1 = staircase(1).map_err(|e| e.to_string())?;
    let s2 = staircase(2).map_err(|e| e.to_string())?;
    let t = tensor(&s1, &s1);
    ensure(
        equal_up_to_acyclic(&t, &s2).map_err(|e| e.to_string())?,
        || "not equal up to acyclic".into(),
    )?;
    let split = split_summands(&t);
    let acyclic: Vec<_> = split.components.iter().filter(|c| c.is_acyclic()).collect();
    ensure(acyclic.len() == 1 && acyclic[0].len() == 4, || {
        format!("{} acyclic summands", acyclic.len())
    })?;
    ensure(split.recombine().map_err(|e| e.to_string())? == t, || {
        "recombination differs".into()
    })?;
    let (code, out) = corrterm(&[
        "cfk",
        "tensor",
        "--a",
        "staircase:1",
        "--b",
        "staircase:1",
        "--split",
        "--compare",
        "staircase:2",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(
        code == Some(0) && v["compare"]["equal_up_to_acyclic"] == true,
        || "CLI compare failed".into(),
    )?;
    ensure(v["split"]["recombines"] == true, || {
        "CLI recombination failed".into()
    })?;
    Ok(format!(
        "{} moves, summands of sizes {:?}",
        split.basis_change.moves.len(),
        split.components.iter().map(|c| c.len()).collect::<Vec<_>>()
    ))
}

fn random_group(rng: &mut StdRng) -> LinkingGroup {
    const ORDERS: [u64; 13] = [2, 3, 4, 5, 7, 8, 9, 11, 16, 25, 27, 49, 121];
    loop {
        let rank = rng.gen_range(1..=4);
        let orders: Vec<u64> = (0..rank)
            .map(|_| ORDERS[rng.gen_range(0..ORDERS.len())])
            .collect();
        let total: u64 = orders.iter().product();
        if total > 10_000 || (total as f64).sqrt().fract() != 0.0 {
            continue;
        }
        let mut form = vec![vec![Rational::zero(); rank]; rank];
        for a in 0..rank {
            for b in a..rank {
                let g = num_integer::gcd(orders[a], orders[b]);
                let v = Rational::new(rng.gen_range(0..g), g).unwrap();
                form[a][b] = v.clone();
                form[b][a] = v;
            }
        }
        return LinkingGroup::new(orders, form).unwrap();
    }
}

fn property_suites() -> Check {
    let mut lens_checks = 0;
    for p in 1..=200u64 {
        for q in 1..p.max(2) {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            let scale = Rational::from_integer(4 * p * q);
            for i in 0..p {
                let l = SpincLabel::new(i, p).unwrap();
                let d = d_lens(p, q as i64, l).map_err(|e| e.to_string())?;
                let c = conjugate_label(p, q as i64, l).map_err(|e| e.to_string())?;
                ensure(d == d_lens(p, q as i64, c).unwrap(), || {
                    format!("conjugation fails at L({p},{q}), {i}")
                })?;
                ensure((d * scale.clone()).is_integer(), || {
                    format!("4pq d not integral at L({p},{q}), {i}")
                })?;
                lens_checks += 1;
            }
        }
    }

    let mut rng = StdRng::seed_from_u64(20_241_014);
    let mut groups = 0;
    for _ in 0..300 {
        let g = random_group(&mut rng);
        let direct = enumerate_metabolizers(&g, 10_000).map_err(|e| e.to_string())?;
        let split = enumerate_via_split(&g, 10_000).map_err(|e| e.to_string())?;
        ensure(direct == split, || {
            format!("metabolizers differ on {}", g.factor_string())
        })?;
        groups += 1;
    }

    for n in 1..=10i64 {
        let k = torus_knot(2, 2 * n + 1).map_err(|e| e.to_string())?;
        let a = |e: i64| {
            if e.abs() <= n {
                if (n - e) % 2 == 0 {
                    1
                } else {
                    -1
                }
            } else {
                0
            }
        };
        for i in -(n + 1)..=(n + 1) {
            let brute: i64 = (1..=2 * n + 2).map(|j| j * a(i.abs() + j)).sum();
            ensure(torsion_coefficient(&k, i) == BigInt::from(brute), || {
                format!("t_{i}(T(2,{}))", 2 * n + 1)
            })?;
        }
    }

    let mut moves = 0;
    for n in 1..=4 {
        for m in 1..=4 {
            let t = tensor(&staircase(n).unwrap(), &staircase(m).unwrap());
            let mut scrambled = t.clone();
            let mut applied = Vec::new();
            while applied.len() < 12 {
                let mv = Move {
                    x: rng.gen_range(0..t.len()),
                    y: rng.gen_range(0..t.len()),
                };
                if scrambled.move_is_valid(mv) {
                    scrambled.apply_move(mv).unwrap();
                    scrambled
                        .validate()
                        .map_err(|e| format!("scramble of {n},{m}: {e}"))?;
                    applied.push(mv);
                }
            }
            let mut failure = None;
            let split = split_summands_observed(&scrambled, &mut |c, _| {
                moves += 1;
                if let Err(e) = c.validate() {
                    failure.get_or_insert(e.to_string());
                }
            });
            ensure(failure.is_none(), || {
                format!("{n},{m}: {}", failure.clone().unwrap())
            })?;
            let rank: usize = split.components.iter().map(|c| c.homology_rank()).sum();
            ensure(rank == 1, || format!("{n},{m}: homology rank {rank}"))?;
            let mut back = split.recombine().map_err(|e| e.to_string())?;
            ensure(back == scrambled, || {
                format!("{n},{m}: recombination differs")
            })?;
            for mv in applied.iter().rev() {
                back.apply_move(*mv).unwrap();
            }
            ensure(back == t, || format!("{n},{m}: unscrambling differs"))?;
        }
    }
    Ok(format!(
        "{lens_checks} lens labels, {groups} groups, 10 torus knots, {moves} checked basis changes"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("1 branched cover tables", sigma_tables),
        ("2 ribbon cover vanishing", ribbon_vanishing),
        ("3 central and conjugate labels", spin_consistency),
        ("4 obstruction witnesses", witnesses),
        ("5 staircase tensor identity", staircase_identity),
        ("6 property suites", property_suites),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{elapsed:.2?}]");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
