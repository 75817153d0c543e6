//! Probabilistic Bell and Fubini polynomials.
//!
//! `W_n^Y(x) = Σ_k S_Y(n,k) k! x^k` is the primary definition. Independent
//! routes are provided for cross-checking: the generating function
//! `1/(1 - x(E e^{tY} - 1))`, the convolution recurrence in the moments, a
//! lower-Hessenberg determinant, and a sum over integer partitions.

use num_traits::{One, Zero};

use crate::error::{usage, Result};
use crate::exactnum::{
    binomial, binomial_row, determinant, factorial, int, pow, rising, RatPoly, Rational, TruncEGF,
};
use crate::moments::DistSpec;
use crate::par::Execution;
use crate::stirling::{stirling2, TriTable};

fn binom_q(n: usize, k: usize) -> Rational {
    Rational::from_integer(binomial(n, k))
}

fn fact_q(n: usize) -> Rational {
    Rational::from_integer(factorial(n))
}

/// Classical `W_n(x) = Σ_k k! S(n,k) x^k`.
pub fn classical_fubini_poly(n: usize) -> RatPoly {
    RatPoly::new(
        (0..=n)
            .map(|k| Rational::from_integer(factorial(k) * stirling2(n, k)))
            .collect(),
    )
}

/// `B_n^Y(x) = Σ_k S_Y(n,k) x^k`.
pub fn prob_bell_poly(dist: &DistSpec, n: usize) -> RatPoly {
    RatPoly::new(TriTable::prob_stirling(dist, n).row(n).to_vec())
}

/// `W_n^Y(x) = Σ_k S_Y(n,k) k! x^k`.
pub fn prob_fubini_poly(dist: &DistSpec, n: usize) -> RatPoly {
    fubini_from_row(TriTable::prob_stirling(dist, n).row(n))
}

fn fubini_from_row(row: &[Rational]) -> RatPoly {
    RatPoly::new(row.iter().enumerate().map(|(k, s)| s * fact_q(k)).collect())
}

/// `W_n^Y = W_n^Y(1)`.
pub fn prob_fubini_number(dist: &DistSpec, n: usize) -> Rational {
    prob_fubini_poly(dist, n).eval(&Rational::one())
}

/// `α`-th order polynomial `Σ_i C(α+i-1, i) i! x^i S_Y(n,i)`, for any
/// rational `α`. The weight `C(α+i-1, i)·i!` is the rising factorial `α^(i)`.
pub fn prob_fubini_higher(dist: &DistSpec, n: usize, alpha: &Rational) -> RatPoly {
    let table = TriTable::prob_stirling(dist, n);
    RatPoly::new(
        table
            .row(n)
            .iter()
            .enumerate()
            .map(|(i, s)| rising(alpha, i) * s)
            .collect(),
    )
}

/// `[W_0^Y(x0), ..., W_N^Y(x0)]` read off `1/(1 - x0(M(t) - 1))`.
pub fn fubini_values_via_egf(dist: &DistSpec, max_n: usize, x0: &Rational) -> Vec<Rational> {
    fubini_egf(dist, max_n, x0)
        .inv()
        .expect("constant term is 1")
        .into_coeffs()
}

fn fubini_egf(dist: &DistSpec, order: usize, x0: &Rational) -> TruncEGF {
    let one = TruncEGF::identity(order);
    let shifted = dist.mgf_series(order).sub(&one).expect("equal orders");
    one.sub(&shifted.scale(x0)).expect("equal orders")
}

/// `W_n^Y(x)` reconstructed from the generating function at `n + 1` points.
pub fn fubini_poly_via_egf(dist: &DistSpec, n: usize) -> RatPoly {
    let points: Vec<(Rational, Rational)> = (0..=n)
        .map(|i| {
            let x = int(i as i64);
            let v = fubini_values_via_egf(dist, n, &x).pop().unwrap();
            (x, v)
        })
        .collect();
    RatPoly::interpolate(&points).expect("distinct points")
}

/// `W_n^Y(x; α)` for integer `α` from `(1 - x(M(t) - 1))^{-α}` at `n + 1`
/// points.
pub fn fubini_higher_via_egf(dist: &DistSpec, n: usize, alpha: usize) -> RatPoly {
    let points: Vec<(Rational, Rational)> = (0..=n)
        .map(|i| {
            let x = int(i as i64);
            let f = fubini_egf(dist, n, &x).inv().expect("constant term is 1");
            (x, f.pow(alpha).coeffs()[n].clone())
        })
        .collect();
    RatPoly::interpolate(&points).expect("distinct points")
}

/// One step of `W_n^Y(x) = x Σ_{k=1}^n C(n,k) E Y^k W_{n-k}^Y(x)`.
/// `lower` must hold `W_0^Y, ..., W_{n-1}^Y`.
pub fn recurrence_rec1(dist: &DistSpec, n: usize, lower: &[RatPoly]) -> Result<RatPoly> {
    if n == 0 {
        return usage("the recurrence starts at n = 1");
    }
    if lower.len() < n {
        return usage(format!(
            "recurrence for n = {n} needs {n} lower polynomials, got {}",
            lower.len()
        ));
    }
    let m = dist.moments(n);
    Ok(rec1_step(&m, n, lower))
}

fn rec1_step(m: &[Rational], n: usize, lower: &[RatPoly]) -> RatPoly {
    let row = binomial_row(n);
    let mut acc = RatPoly::zero();
    for k in 1..=n {
        let w = Rational::from_integer(row[k].clone()) * &m[k];
        acc = &acc + &lower[n - k].scale(&w);
    }
    &acc * &RatPoly::x()
}

/// `W_0^Y, ..., W_N^Y` built only from the recurrence.
pub fn fubini_polys_by_recurrence(dist: &DistSpec, max_n: usize) -> Vec<RatPoly> {
    let m = dist.moments(max_n);
    let mut polys = vec![RatPoly::one()];
    for n in 1..=max_n {
        let next = rec1_step(&m, n, &polys);
        polys.push(next);
    }
    polys
}

fn fubini_values_at(dist: &DistSpec, max_n: usize, x0: &Rational) -> Vec<Rational> {
    let table = TriTable::prob_stirling(dist, max_n);
    (0..=max_n)
        .map(|n| fubini_from_row(table.row(n)).eval(x0))
        .collect()
}

/// `Σ_{i≤k} C(k,i) W_i W_{k-i}`, the EGF coefficients of the squared
/// generating function.
fn squared_coeff(w: &[Rational], k: usize) -> Rational {
    binomial_row(k)
        .into_iter()
        .enumerate()
        .map(|(i, c)| Rational::from_integer(c) * &w[i] * &w[k - i])
        .sum()
}

/// Checks `W_{n+1}^Y(x0) = x0 Σ_k C(n,k) E Y^{n-k+1} Σ_i C(k,i) W_i^Y W_{k-i}^Y`.
pub fn check_thm9(dist: &DistSpec, n: usize, x0: &Rational) -> bool {
    let w = fubini_values_at(dist, n + 1, x0);
    let m = dist.moments(n + 1);
    let rhs: Rational = (0..=n)
        .map(|k| binom_q(n, k) * &m[n - k + 1] * squared_coeff(&w, k))
        .sum::<Rational>()
        * x0;
    w[n + 1] == rhs
}

/// Checks the derivative recurrence
/// `d/dx W_n^Y(x0) = Σ_k C(n,k)[E Y^{n-k} Σ_i C(k,i) W_i W_{k-i} - W_k W_{n-k}]`.
pub fn check_thm_deriv(dist: &DistSpec, n: usize, x0: &Rational) -> bool {
    let lhs = prob_fubini_poly(dist, n).derivative().eval(x0);
    let w = fubini_values_at(dist, n, x0);
    let m = dist.moments(n);
    let rhs: Rational = (0..=n)
        .map(|k| binom_q(n, k) * (&m[n - k] * squared_coeff(&w, k) - &w[k] * &w[n - k]))
        .sum();
    lhs == rhs
}

/// `E_V[B_n^Y(xV)]` for standard exponential `V`, evaluated termwise with
/// `E V^k = k!`, compared with `W_n^Y(x)` as polynomials.
pub fn integral_representation_check(dist: &DistSpec, n: usize) -> bool {
    let bell = prob_bell_poly(dist, n);
    let gamma = DistSpec::StdExponential;
    let mixed = RatPoly::new(
        bell.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c * gamma.moment(k))
            .collect(),
    );
    mixed == fubini_poly_via_egf(dist, n) && mixed == prob_fubini_poly(dist, n)
}

/// The `n × n` lower-Hessenberg matrix with `(-1)^{i-j} x E Y^{i-j+1}/(i-j+1)!`
/// on and below the diagonal and ones on the superdiagonal.
pub fn fubini_hessenberg(dist: &DistSpec, n: usize, x: &Rational) -> Vec<Vec<Rational>> {
    let m = dist.moments(n);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j == i + 1 {
                        Rational::one()
                    } else if j <= i {
                        let d = i - j + 1;
                        let v = x * &m[d] / fact_q(d);
                        if (i - j) % 2 == 0 {
                            v
                        } else {
                            -v
                        }
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// `W_n^Y = n!·det H_n`. The empty determinant gives `W_0^Y = 1`.
pub fn fubini_det(dist: &DistSpec, n: usize) -> Rational {
    fubini_det_at(dist, n, &Rational::one())
}

/// `W_n^Y(x)` through the Hessenberg determinant with entries scaled by `x`.
pub fn fubini_det_at(dist: &DistSpec, n: usize, x: &Rational) -> Rational {
    let h = fubini_hessenberg(dist, n, x);
    determinant(&h).expect("square matrix") * fact_q(n)
}

/// `W_n^Y = n! Σ multinomial(l_1+...+l_n; l_1..l_n) Π (E Y^j/j!)^{l_j}`,
/// summed over `l_1 + 2 l_2 + ... + n l_n = n`.
pub fn fubini_trudi(dist: &DistSpec, n: usize) -> Rational {
    fubini_trudi_at(dist, n, &Rational::one())
}

/// Partition sum with every part weighted by `x`.
pub fn fubini_trudi_at(dist: &DistSpec, n: usize, x: &Rational) -> Rational {
    let m = dist.moments(n);
    let weights: Vec<Rational> = (0..=n)
        .map(|j| {
            if j == 0 {
                Rational::zero()
            } else {
                x * &m[j] / fact_q(j)
            }
        })
        .collect();
    let mut total = Rational::zero();
    for_each_partition(n, |mult| {
        let parts: usize = mult.iter().sum();
        let mut coeff = factorial(parts);
        let mut term = Rational::one();
        for (j, &l) in mult.iter().enumerate() {
            if l == 0 {
                continue;
            }
            coeff /= factorial(l);
            term *= pow(&weights[j + 1], l);
        }
        total += Rational::from_integer(coeff) * term;
    });
    total * fact_q(n)
}

/// Calls `f` with the multiplicity vector `[l_1, ..., l_n]` of every integer
/// partition of `n`. `n = 0` yields the empty partition once.
pub fn for_each_partition(n: usize, mut f: impl FnMut(&[usize])) {
    fn go(rem: usize, max_part: usize, mult: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if rem == 0 {
            f(mult);
            return;
        }
        for part in (1..=max_part.min(rem)).rev() {
            mult[part - 1] += 1;
            go(rem - part, part, mult, f);
            mult[part - 1] -= 1;
        }
    }
    let mut mult = vec![0usize; n];
    go(n, n, &mut mult, &mut f);
}

/// Ways to compute `W_n^Y(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    Definition,
    Recurrence,
    Determinant,
    Trudi,
}

impl Route {
    pub const ALL: [Route; 4] = [
        Route::Definition,
        Route::Recurrence,
        Route::Determinant,
        Route::Trudi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Route::Definition => "def",
            Route::Recurrence => "rec",
            Route::Determinant => "det",
            Route::Trudi => "trudi",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Route::ALL.into_iter().find(|r| r.name() == s)
    }

    /// `W_n^Y(x)` by this route.
    pub fn eval(self, dist: &DistSpec, n: usize, x: &Rational) -> Rational {
        match self {
            Route::Definition => prob_fubini_poly(dist, n).eval(x),
            Route::Recurrence => fubini_polys_by_recurrence(dist, n)[n].eval(x),
            Route::Determinant => fubini_det_at(dist, n, x),
            Route::Trudi => fubini_trudi_at(dist, n, x),
        }
    }
}

/// `W_n^Y(x)` and `W_n^Y` for `n ≤ max_n`, for one distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FubiniFamily {
    dist: DistSpec,
    polys: Vec<RatPoly>,
    numbers: Vec<Rational>,
}

impl FubiniFamily {
    pub fn build(dist: DistSpec, max_n: usize) -> Self {
        let table = TriTable::prob_stirling(&dist, max_n);
        let polys: Vec<RatPoly> = (0..=max_n).map(|n| fubini_from_row(table.row(n))).collect();
        let numbers = polys.iter().map(|p| p.eval(&Rational::one())).collect();
        Self {
            dist,
            polys,
            numbers,
        }
    }

    /// Builds one family per distribution; families are independent.
    pub fn build_many(dists: &[DistSpec], max_n: usize, exec: Execution) -> Vec<Self> {
        exec.map(dists, |d| Self::build(d.clone(), max_n))
    }

    pub fn dist(&self) -> &DistSpec {
        &self.dist
    }

    pub fn max_n(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn poly(&self, n: usize) -> &RatPoly {
        &self.polys[n]
    }

    pub fn polys(&self) -> &[RatPoly] {
        &self.polys
    }

    pub fn number(&self, n: usize) -> &Rational {
        &self.numbers[n]
    }

    pub fn numbers(&self) -> &[Rational] {
        &self.numbers
    }
}

/// Values of `W_n^Y` by each route for one `(dist, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteAgreement {
    pub dist: DistSpec,
    pub n: usize,
    pub values: Vec<(Route, Rational)>,
}

impl RouteAgreement {
    pub fn agrees(&self) -> bool {
        self.values.windows(2).all(|w| w[0].1 == w[1].1)
    }
}

/// Evaluates every route for each `(dist, n ≤ max_n)` pair at `x`.
pub fn route_agreement(
    dists: &[DistSpec],
    max_n: usize,
    x: &Rational,
    exec: Execution,
) -> Vec<RouteAgreement> {
    let work: Vec<(DistSpec, usize)> = dists
        .iter()
        .flat_map(|d| (0..=max_n).map(move |n| (d.clone(), n)))
        .collect();
    exec.map(&work, |(d, n)| RouteAgreement {
        dist: d.clone(),
        n: *n,
        values: Route::ALL.iter().map(|r| (*r, r.eval(d, *n, x))).collect(),
    })
}
