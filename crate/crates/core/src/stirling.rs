//! Classical and probabilistic Stirling numbers of the second kind, Lah
//! numbers, and partial exponential Bell polynomials.
//!
//! The probabilistic numbers `S_Y(n,k)` are computed as partial Bell
//! polynomials evaluated at the moment sequence `(E Y, E Y^2, ...)`. Two
//! independent routes, the alternating sum over `E S_j^n` and the coefficient
//! extraction from `(E e^{tY} - 1)^k / k!`, are exposed for cross-checking.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{usage, Result};
use crate::exactnum::{binomial, binomial_row, factorial, Rational, TruncEGF};
use crate::moments::DistSpec;

/// Lower-triangular table `v[n][k]`, `0 ≤ k ≤ n ≤ max_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriTable {
    rows: Vec<Vec<Rational>>,
}

impl TriTable {
    fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        debug_assert!(rows.iter().enumerate().all(|(n, r)| r.len() == n + 1));
        Self { rows }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// Entry `(n, k)`; zero for `k > n`. Panics if `n > max_n`.
    pub fn get(&self, n: usize, k: usize) -> Rational {
        self.rows[n].get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn row(&self, n: usize) -> &[Rational] {
        &self.rows[n]
    }

    /// `(n, k, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(n, r)| r.iter().enumerate().map(move |(k, v)| (n, k, v)))
    }

    /// Classical `S(n,k)` table.
    pub fn stirling(max_n: usize) -> Self {
        let ints = stirling2_rows(max_n);
        Self::from_rows(
            ints.into_iter()
                .map(|r| r.into_iter().map(Rational::from_integer).collect())
                .collect(),
        )
    }

    pub fn lah(max_n: usize) -> Self {
        Self::from_rows(
            (0..=max_n)
                .map(|n| (0..=n).map(|k| Rational::from_integer(lah(n, k))).collect())
                .collect(),
        )
    }

    /// Partial Bell polynomials `B_{n,k}(x_1, x_2, ...)` for `n ≤ max_n`.
    /// `x[0]` is `x_1`; missing entries are treated as zero.
    pub fn bell_partial(x: &[Rational], max_n: usize) -> Self {
        let xj = |j: usize| x.get(j - 1).cloned().unwrap_or_else(Rational::zero);
        let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(max_n + 1);
        rows.push(vec![Rational::one()]);
        for n in 1..=max_n {
            let binom = binomial_row(n - 1);
            let mut row = vec![Rational::zero(); n + 1];
            for k in 1..=n {
                let mut acc = Rational::zero();
                for j in 1..=n - k + 1 {
                    let prev = &rows[n - j];
                    if k > prev.len() || prev[k - 1].is_zero() {
                        continue;
                    }
                    let w = xj(j);
                    if w.is_zero() {
                        continue;
                    }
                    acc += Rational::from_integer(binom[j - 1].clone()) * w * &prev[k - 1];
                }
                row[k] = acc;
            }
            rows.push(row);
        }
        Self::from_rows(rows)
    }

    /// Probabilistic `S_Y(n,k)` table via partial Bell polynomials.
    pub fn prob_stirling(dist: &DistSpec, max_n: usize) -> Self {
        let m = dist.moments(max_n);
        Self::bell_partial(&m[1..], max_n)
    }
}

fn stirling2_rows(max_n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for n in 1..=max_n {
        let prev = &rows[n - 1];
        let mut row = vec![BigInt::zero(); n + 1];
        for k in 1..=n {
            let stay = if k < n { &prev[k] * k } else { BigInt::zero() };
            row[k] = stay + &prev[k - 1];
        }
        rows.push(row);
    }
    rows
}

/// `S(n,k)` from `S(n,k) = k S(n-1,k) + S(n-1,k-1)`; zero for `k > n`.
pub fn stirling2(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    // One row at a time, keeping only columns up to k.
    let mut row = vec![BigInt::zero(); k + 1];
    row[0] = BigInt::one();
    for m in 1..=n {
        for j in (1..=k.min(m)).rev() {
            row[j] = &row[j] * j + &row[j - 1];
        }
        row[0] = BigInt::zero();
    }
    row[k].clone()
}

/// Unsigned Lah number `L(n,k) = C(n-1,k-1)·n!/k!`.
pub fn lah(n: usize, k: usize) -> BigInt {
    match (n, k) {
        (0, 0) => BigInt::one(),
        (_, 0) => BigInt::zero(),
        _ if k > n => BigInt::zero(),
        _ => binomial(n - 1, k - 1) * factorial(n) / factorial(k),
    }
}

/// `B_{n,k}(x_1, ..., x_{n-k+1})` by the recurrence
/// `B_{n,k} = Σ_{j≥1} C(n-1,j-1) x_j B_{n-j,k-1}`. `x[0]` is `x_1`.
pub fn bell_partial(x: &[Rational], n: usize, k: usize) -> Result<Rational> {
    if k > n {
        return Ok(Rational::zero());
    }
    let need = if k == 0 { 0 } else { n - k + 1 };
    if x.len() < need {
        return usage(format!(
            "B_{{{n},{k}}} needs {need} arguments, got {}",
            x.len()
        ));
    }
    // Entries with n' - k' ≤ n - k only read x_1..x_{n-k+1}.
    Ok(TriTable::bell_partial(&x[..need], n).get(n, k))
}

/// `S_Y(n,k)` through the partial Bell polynomial at the moment sequence.
pub fn prob_stirling(dist: &DistSpec, n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let m = dist.moments(n);
    bell_partial(&m[1..], n, k).expect("n moments available")
}

/// `[S_Y(n,0), ..., S_Y(n,n)]`.
pub fn prob_stirling_row(dist: &DistSpec, n: usize) -> Vec<Rational> {
    TriTable::prob_stirling(dist, n).row(n).to_vec()
}

/// `S_Y(n,k) = (1/k!) Σ_j (-1)^{k-j} C(k,j) E S_j^n`.
pub fn prob_stirling_alternating(dist: &DistSpec, n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut acc = Rational::zero();
    for (j, col) in dist.sum_moments(n).take(k + 1).enumerate() {
        let term = Rational::from_integer(binomial(k, j)) * &col[n];
        if (k - j).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc / Rational::from_integer(factorial(k))
}

/// `S_Y(n,k)` as `n![t^n]` of `(E e^{tY} - 1)^k / k!`.
pub fn prob_stirling_egf(dist: &DistSpec, n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let m = dist.mgf_series(n);
    let base = m.sub(&TruncEGF::identity(n)).expect("equal orders");
    base.pow(k).coeffs()[n].clone() / Rational::from_integer(factorial(k))
}
