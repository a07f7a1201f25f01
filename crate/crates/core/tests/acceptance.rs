//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any line fails.

use std::time::{Duration, Instant};

use degen_atlas::chamber::{lift_fan, verify_fig5};
use degen_atlas::lattice::{enumerate_short, GramForm};
use degen_atlas::oracle::corroborate_relations;
use degen_atlas::relations::verify_table2;
use degen_atlas::roots::{script_l, verify_table1};
use degen_atlas::surface::{catalogue, Component, ModelId, SurfaceModel};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LATTICE_BUDGET: Duration = Duration::from_secs(60);
const RELATION_BUDGET: Duration = Duration::from_secs(5);
const FAN_BUDGET: Duration = Duration::from_secs(5);
const ORACLE_BUDGET: Duration = Duration::from_secs(30);
const ORACLE_TRIALS: usize = 100;
const ORACLE_SEED: u64 = 2024;
const RANDOM_FORMS: usize = 50;
const MAX_RANK: usize = 6;
const NORM_BOUND: u64 = 4;

type Outcome = Result<String, String>;

fn timed<T>(budget: Duration, f: impl FnOnce() -> Result<T, String>) -> Result<(T, Duration), String> {
    let start = Instant::now();
    let v = f()?;
    let t = start.elapsed();
    if t > budget {
        return Err(format!("took {t:.2?}, budget {budget:?}"));
    }
    Ok((v, t))
}

fn normalise(t: &str) -> Vec<String> {
    let mut parts: Vec<String> = t.split('+').map(str::to_string).collect();
    parts.sort();
    parts
}

const EXPECTED_TYPES: [(ModelId, &str); 9] = [
    (ModelId::A15, "A1+A1+A15"),
    (ModelId::A11E6, "A11+E6"),
    (ModelId::D12D5, "D12+D5"),
    (ModelId::D8D8, "D8+D8+<-4>"),
    (ModelId::D16, "D16+<-4>"),
    (ModelId::D17, "D17"),
    (ModelId::E8D9, "E8+D9"),
    (ModelId::E7E7A3, "E7+E7+A3"),
    (ModelId::E8E8, "E8+E8+<-4>"),
];

fn lattice_types() -> Outcome {
    let (report, t) = timed(LATTICE_BUDGET, || Ok(verify_table1()))?;
    for (row, (id, want)) in report.rows.iter().zip(EXPECTED_TYPES) {
        if row.model != id || normalise(&row.found) != normalise(want) {
            return Err(format!("{id}: found {} want {want}", row.found));
        }
    }
    Ok(format!("9/9 types in {t:.2?}"))
}

/// Number of roots of a simply-laced component.
fn classical(component: &str) -> usize {
    let n: usize = component[1..].parse().unwrap();
    match (&component[..1], n) {
        ("A", n) => n * (n + 1),
        ("D", n) => 2 * n * (n - 1),
        ("E", 6) => 72,
        ("E", 7) => 126,
        ("E", 8) => 240,
        _ => panic!("not a root system: {component}"),
    }
}

fn root_counts() -> Outcome {
    let report = verify_table1();
    let mut shown = Vec::new();
    for (row, (id, want)) in report.rows.iter().zip(EXPECTED_TYPES) {
        let expect: usize = want.split('+').filter(|c| *c != "<-4>").map(classical).sum();
        if row.roots2_count != expect {
            return Err(format!("{id}: {} roots of norm -2, want {expect}", row.roots2_count));
        }
        shown.push(format!("{id}={expect}"));
    }
    Ok(shown.join(" "))
}

fn relations() -> Outcome {
    let (rows, t) = timed(RELATION_BUDGET, || verify_table2().map_err(|e| e.to_string()))?;
    if rows.len() != 11 {
        return Err(format!("{} rows", rows.len()));
    }
    for r in &rows {
        let cert = r.derivation.certificate().ok_or(format!("row {} not certified", r.row))?;
        if !r.passed() || Some(cert.expand(&r.system)) != r.system.target {
            return Err(format!("row {} does not re-expand", r.row));
        }
    }
    Ok(format!("11/11 certified in {t:.2?}"))
}

const EXPECTED_FANS: [(ModelId, usize, &[&str], [&str; 2]); 9] = [
    (ModelId::A15, 2, &["h"], ["2h+ξ", "2h-ξ"]),
    (ModelId::A11E6, 2, &["h"], ["3h+ξ", "h-ξ"]),
    (ModelId::D12D5, 1, &[], ["h", "h-ξ"]),
    (ModelId::D8D8, 1, &[], ["h", "h-ξ"]),
    (ModelId::D16, 1, &[], ["h", "2h-ξ"]),
    (ModelId::D17, 1, &[], ["h", "3h-2ξ"]),
    (ModelId::E8D9, 1, &[], ["h", "h-2ξ"]),
    (ModelId::E7E7A3, 2, &["h-ξ"], ["h", "h-2ξ"]),
    (ModelId::E8E8, 3, &["h-ξ", "h-2ξ"], ["h", "h-3ξ"]),
];

fn fans() -> Outcome {
    let (results, t) = timed(FAN_BUDGET, || verify_fig5().map_err(|e| e.to_string()))?;
    for (r, (id, count, walls, boundary)) in results.iter().zip(EXPECTED_FANS) {
        let got_walls: Vec<String> = r.fan.walls.iter().map(ToString::to_string).collect();
        let got_boundary = r.fan.boundary.map(|b| b.to_string());
        if r.model != id || r.fan.chambers.len() != count || got_walls != walls || got_boundary != boundary {
            return Err(format!(
                "{id}: {} chambers, walls {got_walls:?}, boundary {got_boundary:?}",
                r.fan.chambers.len()
            ));
        }
        if !r.passed() {
            return Err(format!("{id}: {}", r.diffs.join("; ")));
        }
    }
    Ok(format!("9/9 fans in {t:.2?}"))
}

fn invariant_failure(m: &SurfaceModel) -> Option<String> {
    let h = m.h().ok()?;
    let xi = m.xi();
    let e0 = m.anticanonical(Component::V0);
    let e1 = m.anticanonical(Component::V1);
    let sq = |v| m.intersect(v, v);
    let zero = BigInt::from(0);
    if sq(h) != BigInt::from(4) || m.intersect(h, xi) != zero || sq(xi) != zero || sq(&e0) + sq(&e1) != zero {
        return Some(format!("{}: intersection numbers", m.id));
    }
    match script_l(m) {
        Ok(l) if l.rank() == 17 && l.gram().is_negative_definite() => None,
        Ok(l) => Some(format!("{}: ℒ has rank {}", m.id, l.rank())),
        Err(e) => Some(e.to_string()),
    }
}

fn invariants() -> Outcome {
    let mut states = 0;
    for m in catalogue() {
        let fan = lift_fan(&m).map_err(|e| e.to_string())?;
        let mut pending: Vec<SurfaceModel> = vec![m.clone()];
        for ch in fan.chambers {
            let exc: Vec<usize> = (0..ch.state.rank()).filter(|&i| ch.state.basis()[i].is_exceptional()).collect();
            for e in exc {
                pending.push(ch.state.flop_all(&[e]).map_err(|e| e.to_string())?);
            }
            pending.push(ch.state);
        }
        for s in &pending {
            if let Some(why) = invariant_failure(s) {
                return Err(why);
            }
        }
        states += pending.len();
    }
    Ok(format!("{states} states"))
}

fn oracle() -> Outcome {
    let (rows, t) =
        timed(ORACLE_BUDGET, || corroborate_relations(ORACLE_TRIALS, ORACLE_SEED).map_err(|e| e.to_string()))?;
    if rows.len() != 33 {
        return Err(format!("{} row/curve pairs", rows.len()));
    }
    if let Some(bad) = rows.iter().find(|r| !r.passed()) {
        return Err(format!("row {} on p = {}", bad.row, bad.curve_p));
    }
    Ok(format!("33/33 supported, 33/33 perturbations refuted in {t:.2?}"))
}

/// Exhaustive search over the box |x_i| ≤ ⌈√(bound·(Q⁻¹)_ii)⌉ for positive definite integer Q.
fn box_search(q: &[Vec<i64>], bound: i64) -> Vec<Vec<i64>> {
    let n = q.len();
    let mut a: Vec<Vec<f64>> = q.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for c in 0..n {
        let p = a[c][c];
        for j in 0..n {
            a[c][j] /= p;
            inv[c][j] /= p;
        }
        for r in (0..n).filter(|&r| r != c) {
            let f = a[r][c];
            for j in 0..n {
                a[r][j] -= f * a[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    let radii: Vec<i64> = (0..n).map(|i| (bound as f64 * inv[i][i]).sqrt().ceil() as i64 + 1).collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = radii.iter().map(|r| -r).collect();
    'outer: loop {
        let norm: i64 = (0..n).map(|i| (0..n).map(|j| x[i] * q[i][j] * x[j]).sum::<i64>()).sum();
        if norm > 0 && norm <= bound && x.iter().find(|&&c| c != 0).is_some_and(|&f| f > 0) {
            out.push(x.clone());
        }
        for i in 0..n {
            x[i] += 1;
            if x[i] <= radii[i] {
                continue 'outer;
            }
            x[i] = -radii[i];
        }
        out.sort();
        return out;
    }
}

/// Q = AᵀA + D with small random A and positive diagonal D.
fn random_positive_form(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let n = rng.gen_range(1..=MAX_RANK);
    let a: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1..=1)).collect()).collect();
    let d: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[k][i] * a[k][j]).sum::<i64>() + if i == j { d[i] } else { 0 }).collect())
        .collect()
}

fn brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut vectors = 0;
    for k in 0..RANDOM_FORMS {
        let q = random_positive_form(&mut rng);
        let g = GramForm::from_rows(q.iter().map(|r| r.iter().map(|x| -x).collect()).collect())
            .map_err(|e| e.to_string())?;
        let mut got: Vec<Vec<i64>> = enumerate_short(&g, NORM_BOUND)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|v| v.to_i64s().unwrap())
            .collect();
        got.sort();
        let want = box_search(&q, NORM_BOUND as i64);
        if got != want {
            return Err(format!("form {k} {q:?}: {} vectors, box search {}", got.len(), want.len()));
        }
        vectors += want.len();
    }
    Ok(format!("{RANDOM_FORMS} forms, {vectors} vectors"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("lattice types of the nine models", lattice_types),
        ("norm -2 counts equal classical root counts", root_counts),
        ("relation certificates", relations),
        ("chamber fans", fans),
        ("structural invariants on all reachable states", invariants),
        ("elliptic curve corroboration", oracle),
        ("short vectors against box search", brute_force),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
