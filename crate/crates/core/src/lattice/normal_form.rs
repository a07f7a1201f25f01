use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{IntMatrix, LatticeVector};

/// Row Hermite normal form: returns `(H, U)` with `H = U·m`, `U` unimodular.
///
/// Pivots are positive and strictly move right; entries above a pivot lie in `[0, pivot)`;
/// zero rows sit at the bottom.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut r = 0;
    for col in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        loop {
            let pivot = (r..h.rows())
                .filter(|&i| !h.get(i, col).is_zero())
                .min_by(|&a, &b| h.get(a, col).abs().cmp(&h.get(b, col).abs()));
            let Some(p) = pivot else { break };
            h.swap_rows(p, r);
            u.swap_rows(p, r);
            let mut clean = true;
            for i in r + 1..h.rows() {
                if h.get(i, col).is_zero() {
                    continue;
                }
                let q = -h.get(i, col).div_floor(h.get(r, col));
                h.add_row_multiple(i, r, &q);
                u.add_row_multiple(i, r, &q);
                if !h.get(i, col).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h.get(r, col).is_zero() {
            continue;
        }
        if h.get(r, col).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h.get(i, col).div_floor(h.get(r, col));
            h.add_row_multiple(i, r, &q);
            u.add_row_multiple(i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(D, U, V)` with `D = U·m·V` diagonal, `d₁ | d₂ | …`, entries ≥ 0.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = d.get(i, j);
                    if !x.is_zero() && best.is_none_or(|(a, b)| x.abs() < d.get(a, b).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { return (d, u, v) };
            d.swap_rows(pi, t);
            u.swap_rows(pi, t);
            d.swap_cols(pj, t);
            v.swap_cols(pj, t);

            let mut clean = true;
            for i in t + 1..rows {
                let q = -d.get(i, t).div_floor(d.get(t, t));
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                let q = -d.get(t, j).div_floor(d.get(t, t));
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !d.get(i, j).is_multiple_of(d.get(t, t))));
            match offender {
                Some(i) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    (d, u, v)
}

/// Diagonal entries of the Smith form.
pub fn elementary_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let (d, _, _) = snf(m);
    (0..d.rows().min(d.cols())).map(|i| d.get(i, i).clone()).collect()
}

/// Basis of the saturated kernel `{v ∈ ℤⁿ : m·v = 0}`, in Hermite normal form.
pub fn kernel_basis(m: &IntMatrix) -> Vec<LatticeVector> {
    let (h, u) = hnf(&m.transpose());
    let rank = (0..h.rows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
    if rank == u.rows() {
        return Vec::new();
    }
    let (kh, _) = hnf(&u.select_rows(rank..u.rows()));
    kh.row_vectors().into_iter().filter(|v| !v.is_zero()).collect()
}

/// Outcome of a span membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Integer coefficients reproducing the target.
    Integral(Vec<BigInt>),
    /// In the ℚ-span but not the ℤ-span.
    RationalOnly,
    Outside,
}

pub fn span_membership(target: &LatticeVector, generators: &[LatticeVector]) -> Membership {
    if let Some(c) = in_span(target, generators) {
        return Membership::Integral(c);
    }
    let n = target.dim();
    let gens = IntMatrix::from_vectors(generators, n);
    let mut with_target = generators.to_vec();
    with_target.push(target.clone());
    if IntMatrix::from_vectors(&with_target, n).rank() == gens.rank() {
        Membership::RationalOnly
    } else {
        Membership::Outside
    }
}

/// Integer coefficients `c` with `Σ cᵢ·genᵢ = target`, if the target lies in the ℤ-span.
pub fn in_span(target: &LatticeVector, generators: &[LatticeVector]) -> Option<Vec<BigInt>> {
    if generators.is_empty() {
        return target.is_zero().then(Vec::new);
    }
    SpanSolver::new(generators).solve(target)
}

/// Hermite form of a generating set, reusable across many membership queries.
#[derive(Clone, Debug)]
pub struct SpanSolver {
    h: IntMatrix,
    u: IntMatrix,
    pivots: Vec<usize>,
}

impl SpanSolver {
    pub fn new(generators: &[LatticeVector]) -> Self {
        let n = generators.first().map_or(0, LatticeVector::dim);
        let (h, u) = hnf(&IntMatrix::from_vectors(generators, n));
        let pivots = (0..h.rows()).map_while(|i| (0..h.cols()).find(|&j| !h.get(i, j).is_zero())).collect();
        SpanSolver { h, u, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, target: &LatticeVector) -> Option<Vec<BigInt>> {
        let n = self.h.cols();
        assert_eq!(target.dim(), n, "dimension mismatch in span query");
        let mut rest = target.coords().to_vec();
        let mut y = vec![BigInt::zero(); self.h.rows()];
        for (i, &p) in self.pivots.iter().enumerate() {
            if rest[p].is_zero() {
                continue;
            }
            let (q, r) = rest[p].div_rem(self.h.get(i, p));
            if !r.is_zero() {
                return None;
            }
            for j in p..n {
                rest[j] -= &q * self.h.get(i, j);
            }
            y[i] = q;
        }
        if rest.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(self.u.combine_rows(&y).0)
    }
}

/// Inverse of a unimodular matrix; `None` if `m` is not unimodular.
pub fn inverse_unimodular(m: &IntMatrix) -> Option<IntMatrix> {
    if !m.is_square() {
        return None;
    }
    let (h, w) = hnf(m);
    (h == IntMatrix::identity(m.rows())).then_some(w)
}
