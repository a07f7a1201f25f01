use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{GramForm, IntMatrix, LatticeError, LatticeVector};

/// Every `v` with `−bound ≤ vᵀgv < 0`, one per `±` pair, first nonzero coordinate positive,
/// sorted by norm and then lexicographically.
pub fn enumerate_short(g: &GramForm, bound: u64) -> Result<Vec<LatticeVector>, LatticeError> {
    let q = g.negated();
    let minors = q.matrix().leading_minors();
    if minors.iter().any(|d| d <= &BigInt::zero()) {
        let shown: Vec<String> = minors.iter().map(ToString::to_string).collect();
        return Err(LatticeError::NotNegativeDefinite { minors: shown.join(", ") });
    }
    let n = g.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (reduced, t) = lll_reduce(q.matrix());
    let tree = Tree::new(&reduced, bound);
    let found = match IntTree::from_rational(&tree) {
        Some(fast) => fast.run(),
        None => tree.run(),
    };

    let tt = t.transpose();
    let mut vectors: Vec<(BigInt, LatticeVector)> = found
        .into_iter()
        .map(|x| {
            let v = tt.mul_vector(&LatticeVector::from_i64s(&x)).canonical_sign();
            (q.norm(&v), v)
        })
        .collect();
    vectors.sort();
    vectors.dedup();
    Ok(vectors.into_iter().map(|(_, v)| v).collect())
}

/// Exact integral LLL (δ = 99/100) on a positive definite Gram matrix.
/// Returns the reduced Gram `T·q·Tᵀ` and the unimodular `T`.
fn lll_reduce(q: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let n = q.rows();
    let (num, den) = (BigInt::from(99), BigInt::from(100));
    let mut h = IntMatrix::identity(n);
    let dotq = |h: &IntMatrix, a: usize, b: usize| -> BigInt {
        let qa = q.mul_vector(&h.row_vector(b));
        h.row(a).iter().zip(qa.coords()).map(|(x, y)| x * y).sum()
    };
    // 1-based as in the classical presentation: d[0] = 1, lambda[k][j] for j < k.
    let mut d = vec![BigInt::one(); n + 1];
    let mut lambda = vec![vec![BigInt::zero(); n + 1]; n + 1];
    if n <= 1 {
        return (q.clone(), h);
    }
    d[1] = dotq(&h, 0, 0);
    let (mut k, mut kmax) = (2usize, 1usize);

    let red = |h: &mut IntMatrix, lambda: &mut Vec<Vec<BigInt>>, d: &[BigInt], k: usize, l: usize| {
        if (&lambda[k][l] * 2i32).magnitude() <= d[l].magnitude() {
            return;
        }
        let r = round_div(&lambda[k][l], &d[l]);
        h.add_row_multiple(k - 1, l - 1, &-&r);
        lambda[k][l] -= &r * &d[l];
        for i in 1..l {
            let v = &r * &lambda[l][i];
            lambda[k][i] -= v;
        }
    };

    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dotq(&h, k - 1, j - 1);
                for i in 1..j {
                    u = (&d[i] * &u - &lambda[k][i] * &lambda[j][i]) / &d[i - 1];
                }
                if j < k {
                    lambda[k][j] = u;
                } else {
                    d[k] = u;
                }
            }
        }
        loop {
            red(&mut h, &mut lambda, &d, k, k - 1);
            let lhs = &den * &d[k] * &d[k - 2];
            let rhs = &num * &d[k - 1] * &d[k - 1] - &den * &lambda[k][k - 1] * &lambda[k][k - 1];
            if lhs >= rhs {
                break;
            }
            h.swap_rows(k - 1, k - 2);
            for j in 1..k - 1 {
                let tmp = std::mem::take(&mut lambda[k][j]);
                lambda[k][j] = std::mem::replace(&mut lambda[k - 1][j], tmp);
            }
            let lam = lambda[k][k - 1].clone();
            let b = (&d[k - 2] * &d[k] + &lam * &lam) / &d[k - 1];
            for i in k + 1..=kmax {
                let t = lambda[i][k].clone();
                lambda[i][k] = (&d[k] * &lambda[i][k - 1] - &lam * &t) / &d[k - 1];
                lambda[i][k - 1] = (&b * &t + &lam * &lambda[i][k]) / &d[k];
            }
            d[k - 1] = b;
            if k > 2 {
                k -= 1;
            }
        }
        for l in (1..k - 1).rev() {
            red(&mut h, &mut lambda, &d, k, l);
        }
        k += 1;
    }
    let g = &(&h * q) * &h.transpose();
    (g, h)
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let r = BigRational::new(a.clone(), b.clone());
    r.round().to_integer()
}

struct Tree {
    n: usize,
    /// Diagonal of the square-completion.
    diag: Vec<BigRational>,
    /// mu[i][j] for j > i.
    mu: Vec<Vec<BigRational>>,
    bound: BigRational,
}

impl Tree {
    /// Nonzero solutions with last nonzero coordinate positive.
    fn run(&self) -> Vec<Vec<i64>> {
        let top = self.n - 1;
        let roots = self.candidates(top, &BigRational::zero(), &self.bound);
        let mut found: Vec<Vec<i64>> = roots
            .into_par_iter()
            .filter(|&x| x >= 0)
            .flat_map_iter(|x| {
                let mut xs = vec![0i64; self.n];
                xs[top] = x;
                let mut out = Vec::new();
                let rest = &self.bound - self.term(top, x, &BigRational::zero());
                self.descend(top, &mut xs, rest, x == 0, &mut out);
                out
            })
            .collect();
        found.retain(|x| x.iter().any(|&c| c != 0));
        found
    }

    fn new(q: &IntMatrix, bound: u64) -> Self {
        let n = q.rows();
        let qr = |i: usize, j: usize| BigRational::from_integer(q.get(i, j).clone());
        let mut diag = vec![BigRational::zero(); n];
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            let mut d = qr(i, i);
            for k in 0..i {
                d -= &diag[k] * &mu[k][i] * &mu[k][i];
            }
            for j in i + 1..n {
                let mut s = qr(i, j);
                for k in 0..i {
                    s -= &diag[k] * &mu[k][i] * &mu[k][j];
                }
                mu[i][j] = s / &d;
            }
            diag[i] = d;
        }
        Tree { n, diag, mu, bound: BigRational::from_integer(bound.into()) }
    }

    /// `Σ_{j>i} μ_ij x_j`
    fn shift(&self, i: usize, xs: &[i64]) -> BigRational {
        let mut s = BigRational::zero();
        for j in i + 1..self.n {
            if xs[j] != 0 {
                s += &self.mu[i][j] * BigInt::from(xs[j]);
            }
        }
        s
    }

    fn term(&self, i: usize, x: i64, shift: &BigRational) -> BigRational {
        let y = BigRational::from_integer(x.into()) + shift;
        &self.diag[i] * &y * &y
    }

    /// All integers x with diag[i]·(x + shift)² ≤ remaining.
    fn candidates(&self, i: usize, shift: &BigRational, remaining: &BigRational) -> Vec<i64> {
        let c = -shift.to_f64().unwrap_or(0.0);
        let r = (remaining / &self.diag[i]).to_f64().unwrap_or(0.0).max(0.0).sqrt();
        let lo = (c - r).floor() as i64 - 1;
        let hi = (c + r).ceil() as i64 + 1;
        (lo..=hi).filter(|&x| &self.term(i, x, shift) <= remaining).collect()
    }

    fn descend(&self, level: usize, xs: &mut Vec<i64>, remaining: BigRational, all_zero: bool, out: &mut Vec<Vec<i64>>) {
        if level == 0 {
            out.push(xs.clone());
            return;
        }
        let i = level - 1;
        let shift = self.shift(i, xs);
        for x in self.candidates(i, &shift, &remaining) {
            if all_zero && x < 0 {
                continue;
            }
            xs[i] = x;
            let rest = &remaining - self.term(i, x, &shift);
            self.descend(i, xs, rest, all_zero && x == 0, out);
        }
        xs[i] = 0;
    }
}

/// The same search with every quantity scaled to a common denominator.
///
/// With d_k the leading minors, level i contributes (t_i·x_i + S_i)²·w_i to the scaled norm, where
/// t_i = d_{i+1}, S_i = Σ_{j>i} m_ij·x_j and w_i = D/(d_i·d_{i+1}).
struct IntTree {
    n: usize,
    t: Vec<i128>,
    w: Vec<i128>,
    m: Vec<Vec<i128>>,
    budget: i128,
}

impl IntTree {
    fn from_rational(tree: &Tree) -> Option<IntTree> {
        let n = tree.n;
        // d_{i+1} = d_i · diag_i
        let mut minors = vec![BigRational::one()];
        for i in 0..n {
            let next = &minors[i] * &tree.diag[i];
            minors.push(next);
        }
        let minors: Vec<BigInt> = minors.iter().map(|r| r.is_integer().then(|| r.to_integer())).collect::<Option<_>>()?;
        let denom = (0..n).fold(BigInt::one(), |acc, i| acc.lcm(&(&minors[i] * &minors[i + 1])));
        let small = |x: BigInt| x.to_i128();
        let t: Vec<i128> = (0..n).map(|i| small(minors[i + 1].clone())).collect::<Option<_>>()?;
        let w: Vec<i128> = (0..n).map(|i| small(&denom / (&minors[i] * &minors[i + 1]))).collect::<Option<_>>()?;
        let mut m = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let scaled = &tree.mu[i][j] * BigRational::from_integer(minors[i + 1].clone());
                if !scaled.is_integer() {
                    return None;
                }
                m[i][j] = small(scaled.to_integer())?;
            }
        }
        let budget = small(tree.bound.to_integer() * &denom)?;
        // Headroom for S_i sums and a² products compared against the budget.
        budget.checked_mul(1 << 20)?;
        Some(IntTree { n, t, w, m, budget })
    }

    fn run(&self) -> Vec<Vec<i64>> {
        let top = self.n - 1;
        let mut found: Vec<Vec<i64>> = self
            .range(top, 0, self.budget)
            .into_par_iter()
            .filter(|&x| x >= 0)
            .flat_map_iter(|x| {
                let mut xs = vec![0i64; self.n];
                xs[top] = x;
                let mut out = Vec::new();
                let a = self.t[top] * x as i128;
                self.descend(top, &mut xs, self.budget - a * a * self.w[top], x == 0, &mut out);
                out
            })
            .collect();
        found.retain(|x| x.iter().any(|&c| c != 0));
        found
    }

    /// All x with (t_i·x + s)²·w_i ≤ remaining.
    fn range(&self, i: usize, s: i128, remaining: i128) -> std::ops::RangeInclusive<i64> {
        let r = isqrt(remaining / self.w[i]) as i128;
        let t = self.t[i];
        let lo = Integer::div_ceil(&(-r - s), &t);
        let hi = Integer::div_floor(&(r - s), &t);
        (lo as i64)..=(hi as i64)
    }

    fn descend(&self, level: usize, xs: &mut Vec<i64>, remaining: i128, all_zero: bool, out: &mut Vec<Vec<i64>>) {
        if level == 0 {
            out.push(xs.clone());
            return;
        }
        let i = level - 1;
        let s: i128 = (i + 1..self.n).map(|j| self.m[i][j] * xs[j] as i128).sum();
        for x in self.range(i, s, remaining) {
            if all_zero && x < 0 {
                continue;
            }
            xs[i] = x;
            let a = self.t[i] * x as i128 + s;
            self.descend(i, xs, remaining - a * a * self.w[i], all_zero && x == 0, out);
        }
        xs[i] = 0;
    }
}

fn isqrt(v: i128) -> u128 {
    if v <= 0 {
        return 0;
    }
    let v = v as u128;
    let mut r = (v as f64).sqrt() as u128;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}
