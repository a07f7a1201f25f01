use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::surface::Component;

/// A point on the double curve.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PointSymbol {
    /// q on V0, q' on V1.
    Identity(Component),
    /// p_i on V0, p'_i on V1 (1-based).
    Point(Component, u32),
    /// Model-specific auxiliary point such as p_f.
    Aux(String),
}

impl PointSymbol {
    fn sort_key(&self) -> (u8, u8, u32, &str) {
        match self {
            PointSymbol::Identity(c) => (0, c.index() as u8, 0, ""),
            PointSymbol::Point(c, i) => (0, c.index() as u8, *i, ""),
            PointSymbol::Aux(name) => (1, 0, 0, name.as_str()),
        }
    }

    /// Exchanges the roles of the two components.
    pub fn swapped(&self) -> PointSymbol {
        match self {
            PointSymbol::Identity(c) => PointSymbol::Identity(c.other()),
            PointSymbol::Point(c, i) => PointSymbol::Point(c.other(), *i),
            PointSymbol::Aux(n) => PointSymbol::Aux(n.clone()),
        }
    }

    pub fn parse(s: &str) -> Option<PointSymbol> {
        let (body, comp) = match s.split_once('\'') {
            Some((a, b)) => (format!("{a}{b}"), Component::V1),
            None => (s.to_string(), Component::V0),
        };
        if body == "q" {
            return Some(PointSymbol::Identity(comp));
        }
        if let Some(rest) = body.strip_prefix("p_") {
            return (comp == Component::V0 && !rest.is_empty()).then(|| PointSymbol::Aux(rest.to_string()));
        }
        let idx = body.strip_prefix('p')?.parse::<u32>().ok()?;
        (idx > 0).then_some(PointSymbol::Point(comp, idx))
    }
}

impl Ord for PointSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for PointSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PointSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prime = |c: &Component| if *c == Component::V1 { "'" } else { "" };
        match self {
            PointSymbol::Identity(c) => write!(f, "q{}", prime(c)),
            PointSymbol::Point(c, i) => write!(f, "p{}{i}", prime(c)),
            PointSymbol::Aux(n) => write!(f, "p_{n}"),
        }
    }
}

/// Integer combination of point symbols; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FormalDivisor(BTreeMap<PointSymbol, i64>);

impl FormalDivisor {
    pub fn zero() -> Self {
        FormalDivisor(BTreeMap::new())
    }

    pub fn symbol(s: PointSymbol) -> Self {
        Self::term(1, s)
    }

    pub fn term(k: i64, s: PointSymbol) -> Self {
        let mut d = Self::zero();
        d.add_term(k, s);
        d
    }

    pub fn add_term(&mut self, k: i64, s: PointSymbol) {
        if k == 0 {
            return;
        }
        let e = self.0.entry(s.clone()).or_insert(0);
        *e += k;
        if *e == 0 {
            self.0.remove(&s);
        }
    }

    pub fn coefficient(&self, s: &PointSymbol) -> i64 {
        self.0.get(s).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.0.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PointSymbol, i64)> {
        self.0.iter().map(|(s, &k)| (s, k))
    }

    pub fn symbols(&self) -> impl Iterator<Item = &PointSymbol> {
        self.0.keys()
    }

    pub fn map_symbols(&self, f: impl Fn(&PointSymbol) -> PointSymbol) -> FormalDivisor {
        let mut out = FormalDivisor::zero();
        for (s, k) in self.terms() {
            out.add_term(k, f(s));
        }
        out
    }

    pub fn swapped(&self) -> FormalDivisor {
        self.map_symbols(PointSymbol::swapped)
    }

    /// Parses sums like `27q-3p1-2p9-p'9` or `4p_f-4q'`.
    pub fn parse(s: &str) -> Option<FormalDivisor> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" {
            return Some(FormalDivisor::zero());
        }
        let mut out = FormalDivisor::zero();
        for (sign, tok) in split_signed(&s)? {
            let digits: String = tok.chars().take_while(char::is_ascii_digit).collect();
            let k: i64 = if digits.is_empty() { 1 } else { digits.parse().ok()? };
            let sym = PointSymbol::parse(&tok[digits.len()..])?;
            out.add_term(sign * k, sym);
        }
        Some(out)
    }
}

/// Splits `a-b+c` into signed tokens; `None` on empty tokens.
pub(crate) fn split_signed(s: &str) -> Option<Vec<(i64, &str)>> {
    let mut out = Vec::new();
    let mut sign = 1;
    let mut start = 0;
    let bytes = s.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'+' || b == b'-' {
            if i > start {
                out.push((sign, &s[start..i]));
            } else if i > 0 {
                return None;
            }
            sign = if b == b'-' { -1 } else { 1 };
            start = i + 1;
        }
    }
    if start >= s.len() {
        return None;
    }
    out.push((sign, &s[start..]));
    Some(out)
}

impl fmt::Display for FormalDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (s, k)) in self.terms().enumerate() {
            let sign = if k < 0 { "-" } else if i > 0 { "+" } else { "" };
            let mag = k.abs();
            if mag == 1 {
                write!(f, "{sign}{s}")?;
            } else {
                write!(f, "{sign}{mag}{s}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for FormalDivisor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (sym, k) in self.terms() {
            map.serialize_entry(&sym.to_string(), &k)?;
        }
        map.end()
    }
}

impl Add for &FormalDivisor {
    type Output = FormalDivisor;
    fn add(self, rhs: &FormalDivisor) -> FormalDivisor {
        let mut out = self.clone();
        for (s, k) in rhs.terms() {
            out.add_term(k, s.clone());
        }
        out
    }
}

impl Sub for &FormalDivisor {
    type Output = FormalDivisor;
    fn sub(self, rhs: &FormalDivisor) -> FormalDivisor {
        self + &(-rhs)
    }
}

impl Add for FormalDivisor {
    type Output = FormalDivisor;
    fn add(self, rhs: FormalDivisor) -> FormalDivisor {
        &self + &rhs
    }
}

impl Sub for FormalDivisor {
    type Output = FormalDivisor;
    fn sub(self, rhs: FormalDivisor) -> FormalDivisor {
        &self - &rhs
    }
}

impl Neg for &FormalDivisor {
    type Output = FormalDivisor;
    fn neg(self) -> FormalDivisor {
        FormalDivisor(self.0.iter().map(|(s, k)| (s.clone(), -k)).collect())
    }
}

impl Neg for FormalDivisor {
    type Output = FormalDivisor;
    fn neg(self) -> FormalDivisor {
        -&self
    }
}

impl Mul<&FormalDivisor> for i64 {
    type Output = FormalDivisor;
    fn mul(self, rhs: &FormalDivisor) -> FormalDivisor {
        if self == 0 {
            return FormalDivisor::zero();
        }
        FormalDivisor(rhs.0.iter().map(|(s, k)| (s.clone(), self * k)).collect())
    }
}

impl std::iter::Sum for FormalDivisor {
    fn sum<I: Iterator<Item = FormalDivisor>>(iter: I) -> FormalDivisor {
        iter.fold(FormalDivisor::zero(), |a, b| a + b)
    }
}
