//! ℒ = h⊥ ⊂ ξ⊥/ℤξ, its generalized roots, and their ADE classification.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::lattice::{
    enumerate_short, kernel_basis, quotient_by_isotropic, GramForm, IntMatrix, LatticeError, LatticeVector, Quotient,
    SpanSolver, Sublattice,
};
use crate::surface::{catalogue_model, ModelError, ModelId, SurfaceModel};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("induced form on ℒ is not negative definite")]
    NotNegativeDefinite,
    #[error("root search bound must be at least 2, got {0}")]
    BoundTooSmall(u64),
    #[error("empty root set")]
    Empty,
    #[error("unclassifiable: {0}")]
    Unclassifiable(String),
}

/// ℒ with the data needed to lift its vectors back to the pair lattice.
#[derive(Clone, Debug)]
pub struct ScriptL {
    pub model: ModelId,
    quotient: Quotient,
}

impl ScriptL {
    pub fn gram(&self) -> &GramForm {
        &self.quotient.gram
    }

    pub fn rank(&self) -> usize {
        self.quotient.rank()
    }

    /// Ambient representative (defined modulo ξ).
    pub fn lift(&self, v: &LatticeVector) -> LatticeVector {
        self.quotient.lift(v)
    }

    /// ℒ-coordinates of an ambient class orthogonal to h and ξ.
    pub fn project(&self, v: &LatticeVector) -> Option<LatticeVector> {
        self.quotient.project(v)
    }

    /// Order of the discriminant group.
    pub fn discriminant(&self) -> BigInt {
        self.gram().determinant().abs()
    }
}

pub fn script_l(m: &SurfaceModel) -> Result<ScriptL, RootError> {
    let h = m.h()?;
    let xi = m.xi();
    let g = m.gram();
    let rows = vec![g.matrix().mul_vector(h), g.matrix().mul_vector(xi)];
    let s = kernel_basis(&IntMatrix::from_vectors(&rows, m.rank()));
    let sub = Sublattice { basis: s, ambient: g.clone() };
    let quotient = quotient_by_isotropic(&sub, xi)?;
    if !quotient.gram.is_negative_definite() {
        return Err(RootError::NotNegativeDefinite);
    }
    Ok(ScriptL { model: m.id, quotient })
}

#[derive(Clone, Debug)]
pub struct GeneralizedRootSet {
    pub gram: GramForm,
    /// One per ± pair.
    pub roots2: Vec<LatticeVector>,
    pub roots4: Vec<LatticeVector>,
    /// Members with v² ∉ {−2, −4}.
    pub other: Vec<LatticeVector>,
}

impl GeneralizedRootSet {
    /// Counts with both signs, as in classical root counts.
    pub fn roots2_count(&self) -> usize {
        2 * self.roots2.len()
    }

    pub fn roots4_count(&self) -> usize {
        2 * self.roots4.len()
    }

    pub fn other_count(&self) -> usize {
        2 * self.other.len()
    }

    pub fn all(&self) -> impl Iterator<Item = &LatticeVector> {
        self.roots2.iter().chain(&self.roots4).chain(&self.other)
    }
}

/// Whether R_v maps the lattice into itself: |v²| divides 2(v, w) for every basis vector w.
pub fn reflection_is_integral(gram: &GramForm, v: &LatticeVector) -> bool {
    let n = gram.norm(v).abs();
    if n.is_zero() {
        return false;
    }
    gram.matrix().mul_vector(v).coords().iter().all(|x| (x * BigInt::from(2)).is_multiple_of(&n))
}

pub fn generalized_roots(l: &ScriptL, bound: u64) -> Result<GeneralizedRootSet, RootError> {
    roots_of_form(l.gram(), bound)
}

pub fn roots_of_form(gram: &GramForm, bound: u64) -> Result<GeneralizedRootSet, RootError> {
    if bound < 2 {
        return Err(RootError::BoundTooSmall(bound));
    }
    let mut set = GeneralizedRootSet { gram: gram.clone(), roots2: Vec::new(), roots4: Vec::new(), other: Vec::new() };
    for v in enumerate_short(gram, bound)? {
        if !v.is_primitive() || !reflection_is_integral(gram, &v) {
            continue;
        }
        match i64::try_from(-gram.norm(&v)).unwrap_or(0) {
            2 => set.roots2.push(v),
            4 => set.roots4.push(v),
            _ => set.other.push(v),
        }
    }
    Ok(set)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Ade {
    A(usize),
    D(usize),
    E(usize),
}

impl Ade {
    pub fn rank(self) -> usize {
        match self {
            Ade::A(n) | Ade::D(n) | Ade::E(n) => n,
        }
    }

    /// Number of roots, counting both signs.
    pub fn root_count(self) -> usize {
        match self {
            Ade::A(n) => n * (n + 1),
            Ade::D(n) => 2 * n * (n - 1),
            Ade::E(6) => 72,
            Ade::E(7) => 126,
            Ade::E(8) => 240,
            Ade::E(n) => unreachable!("E{n} is not a finite root system"),
        }
    }

    fn order_key(self) -> (u8, std::cmp::Reverse<usize>) {
        match self {
            Ade::E(n) => (0, std::cmp::Reverse(n)),
            Ade::D(n) => (1, std::cmp::Reverse(n)),
            Ade::A(n) => (2, std::cmp::Reverse(n)),
        }
    }
}

impl fmt::Display for Ade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ade::A(n) => write!(f, "A{n}"),
            Ade::D(n) => write!(f, "D{n}"),
            Ade::E(n) => write!(f, "E{n}"),
        }
    }
}

/// Isomorphism type of Span Φ: ADE summands plus ⟨−4⟩ summands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LatticeType {
    pub ade_components: Vec<Ade>,
    pub minus4_count: usize,
}

impl LatticeType {
    pub fn new(mut ade_components: Vec<Ade>, minus4_count: usize) -> Self {
        ade_components.sort_by_key(|a| a.order_key());
        LatticeType { ade_components, minus4_count }
    }

    pub fn rank(&self) -> usize {
        self.ade_components.iter().map(|a| a.rank()).sum::<usize>() + self.minus4_count
    }

    pub fn root_count(&self) -> usize {
        self.ade_components.iter().map(|a| a.root_count()).sum()
    }

    /// Parses labels like `E8+E8+<-4>` or `A15+A1+A1`.
    pub fn parse(s: &str) -> Option<LatticeType> {
        let mut ade = Vec::new();
        let mut m4 = 0;
        for part in s.split('+').map(str::trim) {
            if part == "<-4>" {
                m4 += 1;
                continue;
            }
            let (head, n) = part.split_at(1);
            let n: usize = n.parse().ok()?;
            ade.push(match head {
                "A" if n >= 1 => Ade::A(n),
                "D" if n >= 4 => Ade::D(n),
                "E" if (6..=8).contains(&n) => Ade::E(n),
                _ => return None,
            });
        }
        Some(LatticeType::new(ade, m4))
    }
}

impl fmt::Display for LatticeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.ade_components.iter().map(ToString::to_string).collect();
        parts.extend(std::iter::repeat_n("<-4>".to_string(), self.minus4_count));
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join("+"))
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub lattice_type: LatticeType,
    /// Simple roots grouped by Dynkin component, in the order of `lattice_type.ade_components`.
    pub simple_roots: Vec<Vec<LatticeVector>>,
    /// Mutually orthogonal −4 generators certifying the ⟨−4⟩ summands.
    pub minus4_generators: Vec<LatticeVector>,
}

pub const DEFAULT_CLASSIFY_SEED: u64 = 0x5eed;

pub fn classify(roots: &GeneralizedRootSet) -> Result<Classification, RootError> {
    classify_with_seed(roots, DEFAULT_CLASSIFY_SEED)
}

fn dot(f: &[i64], v: &LatticeVector) -> BigInt {
    f.iter().zip(v.coords()).map(|(a, b)| b * a).sum()
}

pub fn classify_with_seed(roots: &GeneralizedRootSet, seed: u64) -> Result<Classification, RootError> {
    if roots.roots2.is_empty() && roots.roots4.is_empty() && roots.other.is_empty() {
        return Err(RootError::Empty);
    }
    let gram = &roots.gram;
    let n = gram.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let functional = loop {
        let f: Vec<i64> = (0..n).map(|_| rng.gen_range(-1_000_000..=1_000_000)).collect();
        if roots.all().all(|v| !dot(&f, v).is_zero()) {
            break f;
        }
    };

    let positives: Vec<LatticeVector> =
        roots.roots2.iter().map(|v| if dot(&functional, v).is_positive() { v.clone() } else { -v }).collect();
    let lookup: HashMap<&LatticeVector, usize> = positives.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut decomposable = vec![false; positives.len()];
    for i in 0..positives.len() {
        for j in i + 1..positives.len() {
            if let Some(&k) = lookup.get(&(&positives[i] + &positives[j])) {
                decomposable[k] = true;
            }
        }
    }
    let simple: Vec<LatticeVector> =
        positives.iter().zip(&decomposable).filter(|(_, &d)| !d).map(|(v, _)| v.clone()).collect();

    let k = simple.len();
    let mut adj = vec![Vec::new(); k];
    for i in 0..k {
        for j in i + 1..k {
            let p = gram.pairing(&simple[i], &simple[j]);
            if p.is_zero() {
                continue;
            }
            if p != BigInt::from(1) {
                return Err(RootError::Unclassifiable(format!(
                    "simple roots {} and {} pair to {p}; not simply laced",
                    simple[i], simple[j]
                )));
            }
            adj[i].push(j);
            adj[j].push(i);
        }
    }

    let mut seen = vec![false; k];
    let mut components: Vec<(Ade, Vec<LatticeVector>)> = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < comp.len() {
            for &nb in &adj[comp[head]] {
                if !seen[nb] {
                    seen[nb] = true;
                    comp.push(nb);
                }
            }
            head += 1;
        }
        let label = dynkin_label(&comp, &adj)?;
        components.push((label, order_chain(&comp, &adj).into_iter().map(|i| simple[i].clone()).collect()));
    }
    components.sort_by_key(|(a, _)| a.order_key());

    let minus4 = certify_minus4(roots, &simple)?;
    let ade: Vec<Ade> = components.iter().map(|(a, _)| *a).collect();
    Ok(Classification {
        lattice_type: LatticeType::new(ade, minus4.len()),
        simple_roots: components.into_iter().map(|(_, s)| s).collect(),
        minus4_generators: minus4,
    })
}

/// Orders a component by breadth-first search from a leaf, for readable output.
fn order_chain(comp: &[usize], adj: &[Vec<usize>]) -> Vec<usize> {
    let start = comp.iter().copied().find(|&v| adj[v].len() <= 1).unwrap_or(comp[0]);
    let mut out = vec![start];
    let mut head = 0;
    while head < out.len() {
        let mut next: Vec<usize> = adj[out[head]].iter().copied().filter(|v| !out.contains(v)).collect();
        next.sort_by_key(|&v| adj[v].len());
        out.extend(next);
        head += 1;
    }
    out
}

fn dynkin_label(comp: &[usize], adj: &[Vec<usize>]) -> Result<Ade, RootError> {
    let size = comp.len();
    let edges: usize = comp.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
    if edges + 1 != size {
        return Err(RootError::Unclassifiable(format!("Dynkin component of size {size} has a cycle")));
    }
    let branch: Vec<usize> = comp.iter().copied().filter(|&v| adj[v].len() > 2).collect();
    match branch.as_slice() {
        [] => Ok(Ade::A(size)),
        [b] if adj[*b].len() == 3 => {
            let mut arms: Vec<usize> = adj[*b].iter().map(|&nb| arm_length(*b, nb, adj)).collect();
            arms.sort_unstable();
            match arms.as_slice() {
                [1, 1, k] => Ok(Ade::D(k + 3)),
                [1, 2, 2] => Ok(Ade::E(6)),
                [1, 2, 3] => Ok(Ade::E(7)),
                [1, 2, 4] => Ok(Ade::E(8)),
                other => Err(RootError::Unclassifiable(format!("tree with arms {other:?}"))),
            }
        }
        _ => Err(RootError::Unclassifiable(format!("Dynkin tree of size {size} has several branch nodes"))),
    }
}

fn arm_length(from: usize, first: usize, adj: &[Vec<usize>]) -> usize {
    let (mut prev, mut cur, mut len) = (from, first, 1);
    while let Some(&next) = adj[cur].iter().find(|&&x| x != prev) {
        if adj[cur].len() > 2 {
            break;
        }
        prev = cur;
        cur = next;
        len += 1;
    }
    len
}

fn certify_minus4(roots: &GeneralizedRootSet, simple: &[LatticeVector]) -> Result<Vec<LatticeVector>, RootError> {
    let gram = &roots.gram;
    let mut chosen: Vec<LatticeVector> = Vec::new();
    for v in roots.roots4.iter().chain(&roots.other) {
        let orthogonal = simple.iter().chain(&chosen).all(|s| gram.pairing(s, v).is_zero());
        if orthogonal {
            chosen.push(v.clone());
        }
    }
    let mut gens = simple.to_vec();
    gens.extend(chosen.iter().cloned());
    let solver = SpanSolver::new(&gens);
    if solver.rank() != gens.len() {
        return Err(RootError::Unclassifiable("simple roots and -4 generators are dependent".into()));
    }
    for v in roots.all() {
        if solver.solve(v).is_none() {
            return Err(RootError::Unclassifiable(format!(
                "generalized root {v} (square {}) is not in the span of simple roots and orthogonal -4 generators",
                gram.norm(v)
            )));
        }
    }
    Ok(chosen)
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeRow {
    pub model: ModelId,
    pub expected: String,
    pub found: String,
    pub pass: bool,
    pub roots2_count: usize,
    pub roots4_count: usize,
    pub other_count: usize,
    pub classical_root_count: usize,
    pub simple_roots: Vec<Vec<String>>,
    pub minus4_generators: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    pub rows: Vec<LatticeRow>,
    pub all_pass: bool,
}

/// Expected lattice type of each catalogue model.
pub fn expected_type(id: ModelId) -> Option<LatticeType> {
    let s = match id {
        ModelId::A15 => "A15+A1+A1",
        ModelId::A11E6 => "E6+A11",
        ModelId::D12D5 => "D12+D5",
        ModelId::D8D8 => "D8+D8+<-4>",
        ModelId::D16 => "D16+<-4>",
        ModelId::D17 => "D17",
        ModelId::E8D9 => "E8+D9",
        ModelId::E7E7A3 => "E7+E7+A3",
        ModelId::E8E8 => "E8+E8+<-4>",
        ModelId::Custom => return None,
    };
    LatticeType::parse(s)
}

/// Runs the full pipeline on one model.
pub fn analyse(m: &SurfaceModel, bound: u64) -> Result<(ScriptL, GeneralizedRootSet, Classification), RootError> {
    let l = script_l(m)?;
    let roots = generalized_roots(&l, bound)?;
    let class = classify(&roots)?;
    Ok((l, roots, class))
}

pub fn lattice_row(m: &SurfaceModel, bound: u64) -> LatticeRow {
    let expected = expected_type(m.id).map(|t| t.to_string()).unwrap_or_default();
    match analyse(m, bound) {
        Ok((l, roots, class)) => {
            let fmt = |v: &LatticeVector| m.format_vector(&l.lift(v));
            let found = class.lattice_type.to_string();
            let counts_agree = roots.roots2_count() == class.lattice_type.root_count();
            LatticeRow {
                model: m.id,
                pass: found == expected && counts_agree && roots.other.is_empty(),
                expected,
                found,
                roots2_count: roots.roots2_count(),
                roots4_count: roots.roots4_count(),
                other_count: roots.other_count(),
                classical_root_count: class.lattice_type.root_count(),
                simple_roots: class.simple_roots.iter().map(|c| c.iter().map(fmt).collect()).collect(),
                minus4_generators: class.minus4_generators.iter().map(fmt).collect(),
                error: None,
            }
        }
        Err(e) => LatticeRow {
            model: m.id,
            expected,
            found: String::new(),
            pass: false,
            roots2_count: 0,
            roots4_count: 0,
            other_count: 0,
            classical_root_count: 0,
            simple_roots: Vec::new(),
            minus4_generators: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

pub fn verify_table1() -> LatticeReport {
    let rows: Vec<LatticeRow> = ModelId::CATALOGUE
        .par_iter()
        .map(|&id| match catalogue_model(id) {
            Ok(m) => lattice_row(&m, 4),
            Err(e) => LatticeRow {
                model: id,
                expected: String::new(),
                found: String::new(),
                pass: false,
                roots2_count: 0,
                roots4_count: 0,
                other_count: 0,
                classical_root_count: 0,
                simple_roots: Vec::new(),
                minus4_generators: Vec::new(),
                error: Some(e.to_string()),
            },
        })
        .collect();
    let all_pass = rows.iter().all(|r| r.pass);
    LatticeReport { rows, all_pass }
}

/// Histogram of squares among the returned vectors, for diagnostics.
pub fn norm_histogram(roots: &GeneralizedRootSet) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for v in roots.all() {
        let n = i64::try_from(roots.gram.norm(v)).unwrap_or(i64::MIN);
        *out.entry(n).or_insert(0) += 2;
    }
    out
}
