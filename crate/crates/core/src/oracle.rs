//! Numerical corroboration of point relations on an elliptic curve over a prime field.
//!
//! Points are sampled in discrete-log coordinates against a fixed generator, so relations
//! become linear congruences mod the generator's order; the curve's group law is only used
//! to re-check the sampled configuration.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{snf, IntMatrix};
use crate::relations::{FormalDivisor, PointSymbol, RelationSystem, RELATION_ROWS};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("singular curve: 4a³ + 27b² ≡ 0 mod {p}")]
    Singular { p: u64 },
    #[error("relation {0} has nonzero degree")]
    NonzeroDegree(String),
    #[error("sampled configuration violates {relation}")]
    Violated { relation: String },
    #[error("bad curve fixture: {0}")]
    Fixture(String),
    #[error(transparent)]
    Relation(#[from] crate::relations::RelationError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Infinity,
    Affine(u64, u64),
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Square root mod an odd prime by Tonelli–Shanks; `None` for non-residues.
fn sqrt_mod(n: u64, p: u64) -> Option<u64> {
    let n = n % p;
    if n == 0 {
        return Some(0);
    }
    if pow_mod(n, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let (mut m, mut c, mut t, mut r) = (s, pow_mod(z, q, p), pow_mod(n, q, p), pow_mod(n, q.div_ceil(2), p));
    while t != 1 {
        let mut i = 1;
        let mut t2 = mul_mod(t, t, p);
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// y² = x³ + ax + b over F_p, with a generator of maximal order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    pub order: u64,
    pub generator: Point,
    pub generator_order: u64,
}

impl Curve {
    fn rhs(&self, x: u64) -> u64 {
        let p = self.p;
        (mul_mod(mul_mod(x, x, p), x, p) + mul_mod(self.a, x, p) + self.b) % p
    }

    pub fn contains(&self, pt: Point) -> bool {
        match pt {
            Point::Infinity => true,
            Point::Affine(x, y) => x < self.p && y < self.p && mul_mod(y, y, self.p) == self.rhs(x),
        }
    }

    pub fn neg(&self, pt: Point) -> Point {
        match pt {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x, (self.p - y) % self.p),
        }
    }

    pub fn add(&self, a: Point, b: Point) -> Point {
        let p = self.p;
        let (x1, y1, x2, y2) = match (a, b) {
            (Point::Infinity, q) | (q, Point::Infinity) => return q,
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2) % p == 0 {
                return Point::Infinity;
            }
            let num = (3 * mul_mod(x1, x1, p) + self.a) % p;
            mul_mod(num, inv_mod(2 * y1 % p, p), p)
        } else {
            mul_mod((y2 + p - y1) % p, inv_mod((x2 + p - x1) % p, p), p)
        };
        let x3 = (mul_mod(lambda, lambda, p) + 2 * p - x1 - x2) % p;
        let y3 = (mul_mod(lambda, (x1 + p - x3) % p, p) + p - y1) % p;
        Point::Affine(x3, y3)
    }

    /// Double-and-add; negative multipliers use −P.
    pub fn mul(&self, k: i64, pt: Point) -> Point {
        let (mut e, mut base) = (k.unsigned_abs(), if k < 0 { self.neg(pt) } else { pt });
        let mut acc = Point::Infinity;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn point_order(&self, pt: Point) -> u64 {
        let mut n = self.order;
        for f in prime_factors(self.order) {
            while n.is_multiple_of(f) && self.mul((n / f) as i64, pt) == Point::Infinity {
                n /= f;
            }
        }
        n
    }

    /// Every point, in order of x then y (identity first).
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        std::iter::once(Point::Infinity).chain((0..self.p).flat_map(move |x| {
            let ys: Vec<u64> = match sqrt_mod(self.rhs(x), self.p) {
                None => vec![],
                Some(0) => vec![0],
                Some(y) => {
                    let mut v = vec![y, self.p - y];
                    v.sort_unstable();
                    v
                }
            };
            ys.into_iter().map(move |y| Point::Affine(x, y))
        }))
    }
}

/// Counts points exhaustively and picks the first point of maximal order.
pub fn curve_setup(p: u64, a: u64, b: u64) -> Result<Curve, OracleError> {
    if p == 2 || !is_prime(p) {
        return Err(OracleError::NotPrime(p));
    }
    let (a, b) = (a % p, b % p);
    let disc = (4 * mul_mod(mul_mod(a, a, p), a, p) + 27 * mul_mod(b, b, p)) % p;
    if disc == 0 {
        return Err(OracleError::Singular { p });
    }
    let mut curve = Curve { p, a, b, order: 0, generator: Point::Infinity, generator_order: 1 };
    curve.order = 1 + (0..p)
        .map(|x| match curve.rhs(x) {
            0 => 1,
            r if pow_mod(r, (p - 1) / 2, p) == 1 => 2,
            _ => 0,
        })
        .sum::<u64>();
    let mut best = (1, Point::Infinity);
    for pt in curve.points().skip(1) {
        let n = curve.point_order(pt);
        if n > best.0 {
            best = (n, pt);
        }
        if n == curve.order {
            break;
        }
    }
    curve.generator = best.1;
    curve.generator_order = best.0;
    Ok(curve)
}

const FIXTURE: &str = include_str!("../fixtures/curves.json");

#[derive(Deserialize)]
struct FixtureEntry {
    p: u64,
    a: u64,
    b: u64,
    order: u64,
    generator: [u64; 2],
    generator_order: u64,
}

/// The three curves pinned in `fixtures/curves.json`, checked against the stored data.
pub fn pinned_curves() -> Result<Vec<Curve>, OracleError> {
    let entries: Vec<FixtureEntry> = serde_json::from_str(FIXTURE).map_err(|e| OracleError::Fixture(e.to_string()))?;
    entries
        .into_iter()
        .map(|e| {
            let c = Curve {
                p: e.p,
                a: e.a,
                b: e.b,
                order: e.order,
                generator: Point::Affine(e.generator[0], e.generator[1]),
                generator_order: e.generator_order,
            };
            if !c.contains(c.generator) || c.mul(e.generator_order as i64, c.generator) != Point::Infinity {
                return Err(OracleError::Fixture(format!("generator data for p = {}", e.p)));
            }
            Ok(c)
        })
        .collect()
}

/// Discrete logs of every symbol against the curve generator, and the resulting points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointAssignment {
    pub logs: BTreeMap<PointSymbol, u64>,
    pub points: BTreeMap<PointSymbol, Point>,
}

impl PointAssignment {
    /// Σ kᵢ·Pᵢ computed with the group law.
    pub fn evaluate(&self, curve: &Curve, d: &FormalDivisor) -> Point {
        d.terms().fold(Point::Infinity, |acc, (s, k)| {
            let pt = self.points.get(s).copied().unwrap_or(Point::Infinity);
            curve.add(acc, curve.mul(k, pt))
        })
    }
}

impl Serialize for PointAssignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let shown: BTreeMap<String, (u64, Point)> =
            self.logs.iter().map(|(sym, &k)| (sym.to_string(), (k, self.points[sym]))).collect();
        shown.serialize(s)
    }
}

/// Precomputed solution space of `generators ≡ 0 mod N` over the system's symbols.
pub struct Sampler<'a> {
    curve: &'a Curve,
    symbols: Vec<PointSymbol>,
    relations: Vec<FormalDivisor>,
    /// Column basis of the solution module: xᵢ = Σⱼ V[i][j]·yⱼ.
    v: IntMatrix,
    /// Step size of each y coordinate (N / gcd(dⱼ, N)); y is free when the step is 1.
    steps: Vec<u64>,
}

impl<'a> Sampler<'a> {
    pub fn new(system: &RelationSystem, curve: &'a Curve) -> Result<Self, OracleError> {
        let relations: Vec<FormalDivisor> = system.generators().into_iter().cloned().collect();
        if let Some(bad) = relations.iter().chain(system.target.as_ref()).find(|d| d.degree() != 0) {
            return Err(OracleError::NonzeroDegree(bad.to_string()));
        }
        let mut symbols: Vec<PointSymbol> =
            relations.iter().chain(system.target.as_ref()).flat_map(|d| d.symbols().cloned()).collect();
        symbols.sort();
        symbols.dedup();
        let n = curve.generator_order;
        let cols = symbols.len();
        let rows: Vec<Vec<BigInt>> = relations
            .iter()
            .map(|d| symbols.iter().map(|s| BigInt::from(d.coefficient(s))).collect())
            .collect();
        let (diag, _, v) = if rows.is_empty() {
            (IntMatrix::zeros(0, cols), IntMatrix::identity(0), IntMatrix::identity(cols))
        } else {
            snf(&IntMatrix::from_rows(rows))
        };
        let steps = (0..cols)
            .map(|j| {
                let d = if j < diag.rows() { diag.get(j, j).clone() } else { BigInt::zero() };
                let g = d.gcd(&BigInt::from(n)).to_u64().expect("gcd divides N");
                n / g
            })
            .collect();
        Ok(Sampler { curve, symbols, relations, v, steps })
    }

    /// Uniform sample from the solution set, re-checked on the curve.
    pub fn sample(&self, rng: &mut impl Rng) -> Result<PointAssignment, OracleError> {
        let n = self.curve.generator_order;
        let y: Vec<BigInt> = self.steps.iter().map(|&step| BigInt::from(rng.gen_range(0..n / step) * step)).collect();
        let modulus = BigInt::from(n);
        let mut logs = BTreeMap::new();
        let mut points = BTreeMap::new();
        for (i, s) in self.symbols.iter().enumerate() {
            let x: BigInt = self.v.row(i).iter().zip(&y).map(|(a, b)| a * b).sum();
            let k = x.mod_floor(&modulus).to_u64().expect("reduced mod N");
            logs.insert(s.clone(), k);
            points.insert(s.clone(), self.curve.mul(k as i64, self.curve.generator));
        }
        let assignment = PointAssignment { logs, points };
        for r in &self.relations {
            if assignment.evaluate(self.curve, r) != Point::Infinity {
                return Err(OracleError::Violated { relation: r.to_string() });
            }
        }
        Ok(assignment)
    }
}

pub fn sample_config(system: &RelationSystem, curve: &Curve, seed: u64) -> Result<PointAssignment, OracleError> {
    Sampler::new(system, curve)?.sample(&mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OracleVerdict {
    Supported { trials: usize },
    Refuted { trial: usize, witness: PointAssignment },
}

impl OracleVerdict {
    pub fn is_supported(&self) -> bool {
        matches!(self, OracleVerdict::Supported { .. })
    }
}

/// SUPPORTED when the target vanishes on every sampled configuration. This is evidence only:
/// a relation that holds modulo the generator's order is indistinguishable from one that holds exactly.
pub fn randomized_membership_test(
    system: &RelationSystem,
    target: &FormalDivisor,
    trials: usize,
    curve: &Curve,
    seed: u64,
) -> Result<OracleVerdict, OracleError> {
    if target.degree() != 0 {
        return Err(OracleError::NonzeroDegree(target.to_string()));
    }
    let system = system.clone().with_target(target.clone());
    let sampler = Sampler::new(&system, curve)?;
    let outcomes: Vec<Option<(usize, PointAssignment)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let a = sampler.sample(&mut rng)?;
            Ok((a.evaluate(curve, target) != Point::Infinity).then_some((t, a)))
        })
        .collect::<Result<_, OracleError>>()?;
    Ok(match outcomes.into_iter().flatten().min_by_key(|(t, _)| *t) {
        Some((trial, witness)) => OracleVerdict::Refuted { trial, witness },
        None => OracleVerdict::Supported { trials },
    })
}

/// The single-symbol perturbation used as a negative control: moves one unit from p3 to p2.
pub fn perturbed(target: &FormalDivisor) -> FormalDivisor {
    target + &FormalDivisor::parse("p2-p3").expect("literal")
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleRow {
    pub row: usize,
    pub curve_p: u64,
    pub target: OracleVerdict,
    pub perturbed: OracleVerdict,
}

impl OracleRow {
    pub fn passed(&self) -> bool {
        self.target.is_supported() && !self.perturbed.is_supported()
    }
}

/// Every row of the relation table against every pinned curve.
pub fn corroborate_relations(trials: usize, seed: u64) -> Result<Vec<OracleRow>, OracleError> {
    let curves = pinned_curves()?;
    let mut out = Vec::new();
    for row in &RELATION_ROWS {
        let (_, system) = row.system()?;
        let target = row.target();
        for c in &curves {
            out.push(OracleRow {
                row: row.row,
                curve_p: c.p,
                target: randomized_membership_test(&system, &target, trials, c, seed)?,
                perturbed: randomized_membership_test(&system, &perturbed(&target), trials, c, seed)?,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_curves() {
        assert_eq!(curve_setup(5, 0, 1).unwrap().order, 6);
        assert_eq!(curve_setup(5, 1, 0).unwrap().order, 4);
        assert_eq!(curve_setup(5, 0, 0), Err(OracleError::Singular { p: 5 }));
        assert_eq!(curve_setup(9, 1, 1), Err(OracleError::NotPrime(9)));
    }

    #[test]
    fn square_roots() {
        for p in [7u64, 13, 17, 10007] {
            for n in 1..50 {
                if let Some(r) = sqrt_mod(n, p) {
                    assert_eq!(mul_mod(r, r, p), n % p);
                }
            }
        }
    }

    #[test]
    fn generator_has_full_order_when_cyclic() {
        let c = curve_setup(5, 0, 1).unwrap();
        assert_eq!(c.generator_order, 6);
        assert_eq!(c.mul(6, c.generator), Point::Infinity);
        assert_eq!(c.points().count() as u64, c.order);
    }
}
