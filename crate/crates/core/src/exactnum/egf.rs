use num_traits::{One, Zero};

use super::{binomial_row, Rational};
use crate::error::{usage, Error, Result};

/// Truncated exponential generating function `Σ_{n≤N} c_n t^n / n!`.
///
/// Coefficients are stored in EGF normalisation, so `c_n = n!·[t^n]`. A moment
/// sequence is therefore directly the coefficient vector of its MGF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncEGF {
    coeffs: Vec<Rational>,
}

impl TruncEGF {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return usage("a truncated series needs at least one coefficient");
        }
        Ok(Self { coeffs })
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Rational) -> Self {
        Self {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    /// The multiplicative identity `1`.
    pub fn identity(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        Self::from_fn(order, |n| if n == 0 { c.clone() } else { Rational::zero() })
    }

    /// `e^{ct}`, whose EGF coefficients are `c^n`.
    pub fn exp(c: &Rational, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut acc = Rational::one();
        for _ in 0..=order {
            coeffs.push(acc.clone());
            acc *= c;
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// `n!·[t^n]`, i.e. the stored coefficient `c_n`.
    pub fn coeff(&self, n: usize) -> Result<&Rational> {
        self.coeffs.get(n).ok_or_else(|| {
            Error::Usage(format!(
                "coefficient {n} requested from a series of order {}",
                self.order()
            ))
        })
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return usage(format!(
                "series order mismatch: {} vs {}",
                self.order(),
                other.order()
            ));
        }
        Ok(())
    }

    /// Binomial (Cauchy) product: `c_n = Σ_k C(n,k) a_k b_{n-k}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let coeffs = (0..=self.order())
            .map(|n| {
                let row = binomial_row(n);
                let mut acc = Rational::zero();
                for (k, c) in row.into_iter().enumerate() {
                    let (a, b) = (&self.coeffs[k], &other.coeffs[n - k]);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc += Rational::from_integer(c) * a * b;
                }
                acc
            })
            .collect();
        Self { coeffs }
    }

    /// Multiplicative inverse by forward substitution; needs `c_0 ≠ 0`.
    pub fn inv(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::NonInvertible);
        }
        let inv_a0 = a0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(self.coeffs.len());
        out.push(inv_a0.clone());
        for n in 1..=self.order() {
            let row = binomial_row(n);
            let mut acc = Rational::zero();
            for k in 1..=n {
                let a = &self.coeffs[k];
                if a.is_zero() {
                    continue;
                }
                acc += Rational::from_integer(row[k].clone()) * a * &out[n - k];
            }
            out.push(-acc * &inv_a0);
        }
        Ok(Self { coeffs: out })
    }

    /// `k`-th derivative in `t`: a left shift by `k`, lowering the order by `k`.
    pub fn derive(&self, k: usize) -> Result<Self> {
        if k > self.order() {
            return usage(format!(
                "cannot differentiate {k} times a series of order {}",
                self.order()
            ));
        }
        Ok(Self {
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Substitution `t -> c·t`, which maps `c_n` to `c^n·c_n`.
    pub fn dilate(&self, c: &Rational) -> Self {
        let mut acc = Rational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let v = a * &acc;
                acc *= c;
                v
            })
            .collect();
        Self { coeffs }
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return usage(format!(
                "cannot extend a series of order {} to order {order}",
                self.order()
            ));
        }
        Ok(Self {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    /// `j`-fold product of the series with itself (`a^0` is the identity).
    pub fn pow(&self, j: usize) -> Self {
        let mut result = Self::identity(self.order());
        let mut base = self.clone();
        let mut e = j;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// Evaluates `Σ c_n t^n/n!` exactly at a rational point.
    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut tn_over_fact = Rational::one();
        for (n, c) in self.coeffs.iter().enumerate() {
            if n > 0 {
                tn_over_fact = tn_over_fact * t / super::int(n as i64);
            }
            acc += c * &tn_over_fact;
        }
        acc
    }

    /// `t^k` as a truncated series (`k!` at index `k`).
    pub fn monomial(k: usize, order: usize) -> Self {
        let kf = Rational::from_integer(super::factorial(k));
        Self::from_fn(
            order,
            |n| if n == k { kf.clone() } else { Rational::zero() },
        )
    }
}
