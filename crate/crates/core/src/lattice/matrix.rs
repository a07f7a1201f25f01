use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use super::LatticeError;

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds from rows of anything convertible to `BigInt`. All rows must have equal length.
    pub fn from_rows<T, R>(rows: R) -> Self
    where
        T: Into<BigInt>,
        R: IntoIterator,
        R::Item: IntoIterator<Item = T>,
    {
        let mut data = Vec::new();
        let mut n_rows = 0;
        let mut cols = None;
        for row in rows {
            let before = data.len();
            data.extend(row.into_iter().map(Into::into));
            let width = data.len() - before;
            match cols {
                None => cols = Some(width),
                Some(c) => assert_eq!(c, width, "ragged rows"),
            }
            n_rows += 1;
        }
        IntMatrix { rows: n_rows, cols: cols.unwrap_or(0), data }
    }

    pub fn from_vectors(vectors: &[LatticeVector], cols: usize) -> Self {
        let mut m = Self::zeros(vectors.len(), cols);
        for (i, v) in vectors.iter().enumerate() {
            assert_eq!(v.dim(), cols);
            m.row_mut(i).clone_from_slice(v.coords());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: impl Into<BigInt>) {
        self.data[i * self.cols + j] = v.into();
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [BigInt] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vector(&self, i: usize) -> LatticeVector {
        LatticeVector(self.row(i).to_vec())
    }

    pub fn row_vectors(&self) -> Vec<LatticeVector> {
        (0..self.rows).map(|i| self.row_vector(i)).collect()
    }

    pub fn column_vector(&self, j: usize) -> LatticeVector {
        LatticeVector((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn select_rows(&self, range: impl IntoIterator<Item = usize>) -> Self {
        let rows: Vec<Vec<BigInt>> = range.into_iter().map(|i| self.row(i).to_vec()).collect();
        let mut m = Self::from_rows(rows);
        m.cols = self.cols;
        m
    }

    pub fn mul_vector(&self, v: &LatticeVector) -> LatticeVector {
        assert_eq!(self.cols, v.dim());
        LatticeVector((0..self.rows).map(|i| dot(self.row(i), v.coords())).collect())
    }

    /// `vᵀ·self`, i.e. the combination of rows with coefficients `v`.
    pub fn combine_rows(&self, v: &[BigInt]) -> LatticeVector {
        assert_eq!(self.rows, v.len());
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.row(i)) {
                *o += c * x;
            }
        }
        LatticeVector(out)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += k * row[src]
    pub(crate) fn add_row_multiple(&mut self, target: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = k * &self.data[src * self.cols + j];
            self.data[target * self.cols + j] += v;
        }
    }

    /// col[target] += k * col[src]
    pub(crate) fn add_col_multiple(&mut self, target: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = k * &self.data[i * self.cols + src];
            self.data[i * self.cols + target] += v;
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for x in self.row_mut(i) {
            *x = -&*x;
        }
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> Result<BigInt, LatticeError> {
        if !self.is_square() {
            return Err(LatticeError::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        Ok(sign * a.get(n - 1, n - 1))
    }

    /// Leading principal minors d_1, …, d_n.
    pub fn leading_minors(&self) -> Vec<BigInt> {
        (1..=self.rows.min(self.cols))
            .map(|k| {
                let sub = IntMatrix::from_rows((0..k).map(|i| self.row(i)[..k].to_vec()));
                sub.determinant().expect("square")
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        let (h, _) = super::hnf(self);
        (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", LatticeVector(self.row(i).to_vec()))?;
        }
        write!(f, "]")
    }
}

/// Integers that fit in i64 serialize as JSON numbers, larger ones as strings.
pub(crate) fn serialize_int<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    use num_traits::ToPrimitive;
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

struct Int<'a>(&'a BigInt);

impl Serialize for Int<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_int(self.0, s)
    }
}

impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for x in &self.0 {
            seq.serialize_element(&Int(x))?;
        }
        seq.end()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(&self.row_vector(i))?;
        }
        seq.end()
    }
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Integer coordinates in some declared basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub Vec<BigInt>);

impl LatticeVector {
    pub fn zeros(dim: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); dim])
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = BigInt::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// gcd of the coordinates; zero for the zero vector.
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn primitive_part(&self) -> LatticeVector {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        LatticeVector(self.0.iter().map(|x| x / &g).collect())
    }

    /// Representative of {v, −v} whose first nonzero coordinate is positive.
    pub fn canonical_sign(self) -> LatticeVector {
        match self.0.iter().find(|x| !x.is_zero()) {
            Some(x) if x.is_negative() => -self,
            _ => self,
        }
    }

    pub fn scale(&self, k: &BigInt) -> LatticeVector {
        LatticeVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        assert_eq!(self.dim(), rhs.dim());
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        assert_eq!(self.dim(), rhs.dim());
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: LatticeVector) -> LatticeVector {
        &self + &rhs
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: LatticeVector) -> LatticeVector {
        &self - &rhs
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.into_iter().map(|x| -x).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        -self.clone()
    }
}

impl Mul<&LatticeVector> for i64 {
    type Output = LatticeVector;
    fn mul(self, rhs: &LatticeVector) -> LatticeVector {
        rhs.scale(&BigInt::from(self))
    }
}

/// Symmetric bilinear form on ℤⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct GramForm(IntMatrix);

impl GramForm {
    pub fn new(gram: IntMatrix) -> Result<Self, LatticeError> {
        if !gram.is_symmetric() {
            return Err(LatticeError::NotSymmetric);
        }
        Ok(GramForm(gram))
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        GramForm::new(IntMatrix::from_rows(rows))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn pairing(&self, v: &LatticeVector, w: &LatticeVector) -> BigInt {
        assert_eq!(v.dim(), self.dim());
        assert_eq!(w.dim(), self.dim());
        let mut acc = BigInt::zero();
        for (i, vi) in v.coords().iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            acc += vi * dot(self.0.row(i), w.coords());
        }
        acc
    }

    pub fn norm(&self, v: &LatticeVector) -> BigInt {
        self.pairing(v, v)
    }

    pub fn negated(&self) -> GramForm {
        GramForm(IntMatrix { rows: self.0.rows, cols: self.0.cols, data: self.0.data.iter().map(|x| -x).collect() })
    }

    /// Leading principal minors of −g all positive.
    pub fn is_negative_definite(&self) -> bool {
        self.negated().0.leading_minors().iter().all(Signed::is_positive)
    }

    /// Gram matrix of the given vectors under this form.
    pub fn restrict(&self, basis: &[LatticeVector]) -> GramForm {
        let n = basis.len();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let p = self.pairing(&basis[i], &basis[j]);
                m.set(j, i, p.clone());
                m.set(i, j, p);
            }
        }
        GramForm(m)
    }

    pub fn determinant(&self) -> BigInt {
        self.0.determinant().expect("square")
    }
}
