//! Series transformations, truncated checks of infinite-sum representations,
//! polylogarithm and Apostol-Euler connections, and the Monte Carlo verifier.
//!
//! Truncated checks compute every term exactly, float it once and accumulate
//! with compensated summation. The closed form is computed exactly and floated
//! once, apart from the transcendental prefactors `e^x` and `(1-x)^{-r}`.

pub mod montecarlo;
pub mod polylog;

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{domain, usage, Error, Result};
use crate::exactnum::{
    factorial, falling, format_rational, int, parse_rational, pow, rising, to_f64, CompensatedSum,
    RatPoly, Rational, TruncEGF,
};
use crate::fubini::{prob_bell_poly, prob_fubini_higher, prob_fubini_poly};
use crate::moments::DistSpec;
use crate::stirling::TriTable;

pub use montecarlo::{mc_fubini, mc_fubini_with, Estimate, McConfig};
pub use polylog::{li_neg_numerators, polylog_conv, polylog_neg, polylog_neg_row};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_TRUNC: usize = 200;

/// The analytic outer functions `e^x`, `1/(1-x)` and `1/(1-x)^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GSpec {
    Exp,
    Geom,
    NegBin(Rational),
}

impl GSpec {
    pub fn validated(self) -> Result<Self> {
        if let GSpec::NegBin(r) = &self {
            if !r.is_positive() {
                return domain(format!("negbin order must be positive, got {r}"));
            }
        }
        Ok(self)
    }

    fn check_point(&self, x0: &Rational) -> Result<()> {
        match self {
            GSpec::Exp => Ok(()),
            _ if x0.abs() < Rational::one() => Ok(()),
            _ => domain(format!("{self} needs |x| < 1, got x = {x0}")),
        }
    }

    /// `g^{(i)}(0) / i!`.
    pub fn taylor_coeff(&self, i: usize) -> Rational {
        match self {
            GSpec::Exp => Rational::new(1.into(), factorial(i)),
            GSpec::Geom => Rational::one(),
            GSpec::NegBin(r) => rising(r, i) / Rational::from_integer(factorial(i)),
        }
    }

    /// `g^{(k)}(x)` split as `prefactor(x) · rational_part(k, x)`.
    fn derivative_rational_part(&self, k: usize, x0: &Rational) -> Rational {
        let base = Rational::one() - x0;
        match self {
            GSpec::Exp => Rational::one(),
            GSpec::Geom => Rational::from_integer(factorial(k)) / pow(&base, k + 1),
            GSpec::NegBin(r) => rising(r, k) / pow(&base, k),
        }
    }

    fn prefactor(&self, x0: &Rational) -> f64 {
        match self {
            GSpec::Exp => to_f64(x0).exp(),
            GSpec::Geom => 1.0,
            GSpec::NegBin(r) => (1.0 - to_f64(x0)).powf(-to_f64(r)),
        }
    }

    /// `g^{(k)}(x)` as a float.
    pub fn derivative_at(&self, k: usize, x0: &Rational) -> f64 {
        self.prefactor(x0) * to_f64(&self.derivative_rational_part(k, x0))
    }
}

impl fmt::Display for GSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GSpec::Exp => f.write_str("exp"),
            GSpec::Geom => f.write_str("geom"),
            GSpec::NegBin(r) => write!(f, "negbin:{}", format_rational(r)),
        }
    }
}

impl FromStr for GSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let g = match s.split_once(':') {
            None if s == "exp" => GSpec::Exp,
            None if s == "geom" => GSpec::Geom,
            Some(("negbin", r)) => GSpec::NegBin(parse_rational(r)?),
            _ => {
                return Err(Error::Parse(format!(
                    "unknown g function {s:?}; expected exp | geom | negbin:<r>"
                )))
            }
        };
        g.validated().map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Outcome of comparing a truncated infinite sum with its closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailReport {
    pub partial_sum: f64,
    pub exact: f64,
    pub terms_used: usize,
    pub last_term_magnitude: f64,
    pub converged: bool,
}

impl TailReport {
    pub fn gap(&self) -> f64 {
        (self.partial_sum - self.exact).abs()
    }
}

/// Accumulates floated exact terms and decides convergence.
struct Tail {
    sum: CompensatedSum,
    mags: Vec<f64>,
}

impl Tail {
    fn new() -> Self {
        Self {
            sum: CompensatedSum::new(),
            mags: Vec::new(),
        }
    }

    fn push(&mut self, term: &Rational) {
        let v = to_f64(term);
        self.sum.add(v);
        self.mags.push(v.abs());
    }

    /// Terms whose magnitude has not shrunk over the last tenth of the
    /// window (at least five terms) and still exceeds `tol`.
    fn diverging(&self, tol: f64) -> bool {
        let len = self.mags.len();
        if len < 20 {
            return false;
        }
        let w = (len / 10).max(5);
        let last = self.mags[len - 1];
        let earlier = self.mags[len - 1 - w];
        last > tol && last.is_finite() && earlier > 0.0 && last >= earlier || !last.is_finite()
    }

    fn finish(self, exact: f64, tol: f64, ratio_test: bool) -> Result<TailReport> {
        if ratio_test && self.diverging(tol) {
            return domain(format!(
                "terms are not decaying after {} terms (last magnitude {:e})",
                self.mags.len(),
                self.mags.last().copied().unwrap_or(0.0)
            ));
        }
        let partial_sum = self.sum.value();
        let last = self.mags.last().copied().unwrap_or(0.0);
        Ok(TailReport {
            partial_sum,
            exact,
            terms_used: self.mags.len(),
            last_term_magnitude: last,
            converged: (partial_sum - exact).abs() <= tol && last < tol,
        })
    }
}

fn check_trunc(trunc: usize) -> Result<()> {
    if trunc == 0 {
        return usage("truncation must be at least 1");
    }
    Ok(())
}

/// `Σ_{i≤trunc} g^{(i)}(0) E f(S_i) x^i / i!` against
/// `Σ_n f^{(n)}(0)/n! Σ_k S_Y(n,k) g^{(k)}(x) x^k` for polynomial `f`.
pub fn series_transform_check(
    f: &RatPoly,
    g: &GSpec,
    dist: &DistSpec,
    x0: &Rational,
    trunc_i: usize,
    tol: f64,
) -> Result<TailReport> {
    check_trunc(trunc_i)?;
    let g = g.clone().validated()?;
    g.check_point(x0)?;
    let deg = f.degree();

    let mut tail = Tail::new();
    let mut x_pow = Rational::one();
    for (i, moments) in dist.sum_moments(deg).take(trunc_i + 1).enumerate() {
        let ef: Rational = f.coeffs().iter().zip(&moments).map(|(c, m)| c * m).sum();
        tail.push(&(g.taylor_coeff(i) * ef * &x_pow));
        x_pow *= x0;
    }

    let table = TriTable::prob_stirling(dist, deg);
    let mut rhs = Rational::zero();
    for (n, fc) in f.coeffs().iter().enumerate() {
        if fc.is_zero() {
            continue;
        }
        for k in 0..=n {
            rhs += fc * table.get(n, k) * g.derivative_rational_part(k, x0) * pow(x0, k);
        }
    }
    let exact = g.prefactor(x0) * to_f64(&rhs);
    tail.finish(exact, tol, g != GSpec::Exp)
}

fn check_disc(x0: &Rational) -> Result<()> {
    if x0.abs() >= Rational::one() {
        return domain(format!("series needs |x| < 1, got x = {x0}"));
    }
    Ok(())
}

/// `Σ_{i≤trunc} E S_i^n x^i` against `W_n^Y(x/(1-x)) / (1-x)`.
pub fn power_sum_identity(
    dist: &DistSpec,
    n: usize,
    x0: &Rational,
    trunc_i: usize,
    tol: f64,
) -> Result<TailReport> {
    check_trunc(trunc_i)?;
    check_disc(x0)?;
    let mut tail = Tail::new();
    let mut x_pow = Rational::one();
    for moments in dist.sum_moments(n).take(trunc_i + 1) {
        tail.push(&(&moments[n] * &x_pow));
        x_pow *= x0;
    }
    let base = Rational::one() - x0;
    let exact = prob_fubini_poly(dist, n).eval(&(x0 / &base)) / base;
    tail.finish(to_f64(&exact), tol, true)
}

/// `(1/2) Σ_{i≤trunc} E S_i^n / 2^i` against `W_n^Y(1)`.
pub fn fubini_number_series_check(
    dist: &DistSpec,
    n: usize,
    trunc_i: usize,
    tol: f64,
) -> Result<TailReport> {
    check_trunc(trunc_i)?;
    let half = Rational::new(1.into(), 2.into());
    let mut tail = Tail::new();
    let mut weight = half.clone();
    for moments in dist.sum_moments(n).take(trunc_i + 1) {
        tail.push(&(&moments[n] * &weight));
        weight *= &half;
    }
    let exact = prob_fubini_poly(dist, n).eval(&Rational::one());
    tail.finish(to_f64(&exact), tol, true)
}

/// `Σ_{i≤trunc} C(-r,i) E S_i^n x^i` against
/// `(1+x)^{-r} W_n^Y(-x/(1+x); r)`.
pub fn negbin_transform_check(
    dist: &DistSpec,
    n: usize,
    r: &Rational,
    x0: &Rational,
    trunc_i: usize,
    tol: f64,
) -> Result<TailReport> {
    check_trunc(trunc_i)?;
    check_disc(x0)?;
    if !r.is_positive() {
        return domain(format!("negbin order must be positive, got {r}"));
    }
    let mut tail = Tail::new();
    // C(-r, i) x^i = rising(r, i) (-x)^i / i!
    let minus_x = -x0;
    let mut weight = Rational::one();
    for (i, moments) in dist.sum_moments(n).take(trunc_i + 1).enumerate() {
        tail.push(&(&moments[n] * &weight));
        weight = weight * (r + int(i as i64)) * &minus_x / int(i as i64 + 1);
    }
    let one_plus = Rational::one() + x0;
    let inner = prob_fubini_higher(dist, n, r).eval(&(&minus_x / &one_plus));
    let prefactor = if r.is_integer() {
        let e = r.to_integer().try_into().unwrap_or(usize::MAX);
        to_f64(&(Rational::one() / pow(&one_plus, e)))
    } else {
        to_f64(&one_plus).powf(-to_f64(r))
    };
    tail.finish(prefactor * to_f64(&inner), tol, true)
}

/// `Σ_{k≤trunc} E S_k^n e^{-x} x^k / k!` against `B_n^Y(x)`.
pub fn dobinski_check(
    dist: &DistSpec,
    n: usize,
    x0: &Rational,
    trunc_k: usize,
    tol: f64,
) -> Result<TailReport> {
    check_trunc(trunc_k)?;
    if x0.is_negative() {
        return domain(format!("Poisson weights need x >= 0, got x = {x0}"));
    }
    let mut tail = Tail::new();
    let e_minus_x = (-to_f64(x0)).exp();
    let mut weight = Rational::one();
    let mut sum = CompensatedSum::new();
    let mut mags = Vec::with_capacity(trunc_k + 1);
    for (k, moments) in dist.sum_moments(n).take(trunc_k + 1).enumerate() {
        let v = e_minus_x * to_f64(&(&moments[n] * &weight));
        sum.add(v);
        mags.push(v.abs());
        weight = weight * x0 / int(k as i64 + 1);
    }
    tail.sum = sum;
    tail.mags = mags;
    let exact = prob_bell_poly(dist, n).eval(x0);
    tail.finish(to_f64(&exact), tol, false)
}

/// `Σ_{i≤trunc} E S_i^n P{G = i+1}` with `G` geometric of success
/// probability `1/(1+x)`, against `W_n^Y(x)`.
pub fn geometric_mixture_check(
    dist: &DistSpec,
    n: usize,
    x0: &Rational,
    trunc_i: usize,
    tol: f64,
) -> Result<TailReport> {
    check_trunc(trunc_i)?;
    if x0.is_negative() {
        return domain(format!("the geometric mixture needs x >= 0, got x = {x0}"));
    }
    let one_plus = Rational::one() + x0;
    let q = x0 / &one_plus;
    let mut weight = one_plus.recip();
    let mut tail = Tail::new();
    for moments in dist.sum_moments(n).take(trunc_i + 1) {
        tail.push(&(&moments[n] * &weight));
        weight *= &q;
    }
    let exact = prob_fubini_poly(dist, n).eval(x0);
    tail.finish(to_f64(&exact), tol, false)
}

fn polylog_series(
    r: &Rational,
    n: usize,
    x0: &Rational,
    trunc: usize,
    tol: f64,
    with_stop_mass: bool,
) -> Result<TailReport> {
    check_trunc(trunc)?;
    if !(r.is_positive() && r < &Rational::one()) {
        return domain(format!("polylog connection needs 0 < r < 1, got r = {r}"));
    }
    if x0.is_negative() {
        return domain(format!("polylog connection needs x >= 0, got x = {x0}"));
    }
    let s = Rational::one() - r;
    let one_plus = Rational::one() + x0;
    let q = x0 / &one_plus;
    let ratio = r / &s;
    let mut weight = if with_stop_mass {
        one_plus.recip()
    } else {
        Rational::one()
    };
    let step = &q * &ratio;
    let mut tail = Tail::new();
    for conv in polylog::polylog_conv_powers(n, &s)?.take(trunc + 1) {
        tail.push(&(&conv[n] * &weight));
        weight *= &step;
    }
    let w = prob_fubini_poly(&DistSpec::GeometricOnSupport1(r.clone()), n).eval(x0);
    let exact = if with_stop_mass { w } else { w * one_plus };
    tail.finish(to_f64(&exact), tol, true)
}

/// `Σ_{k≤trunc} p q^k (r/s)^k Li^{*k}_{-n}(s)` with `s = 1 - r`,
/// `p = 1/(1+x)`, `q = x/(1+x)`, against `W_n^Y(x)` for `Y` geometric with
/// parameter `r`.
pub fn polylog_limit_check(
    r: &Rational,
    n: usize,
    x0: &Rational,
    trunc: usize,
    tol: f64,
) -> Result<TailReport> {
    polylog_series(r, n, x0, trunc, tol, true)
}

/// `Σ_{k≤trunc} q^k (r/s)^k Li^{*k}_{-n}(s)` against `(1+x) W_n^Y(x)`.
pub fn polylog_limit_variant_check(
    r: &Rational,
    n: usize,
    x0: &Rational,
    trunc: usize,
    tol: f64,
) -> Result<TailReport> {
    polylog_series(r, n, x0, trunc, tol, false)
}

/// Apostol-Euler polynomial `E_n(a; x)` from `e^{xt} / (1 + a(e^t - 1))`,
/// interpolated from `n + 1` integer sample points.
pub fn apostol_euler_poly(a: &Rational, n: usize, order: usize) -> Result<RatPoly> {
    if order < n {
        return usage(format!("series order {order} is below n = {n}"));
    }
    let denom = TruncEGF::exp(&Rational::one(), order)
        .sub(&TruncEGF::identity(order))?
        .scale(a)
        .add(&TruncEGF::identity(order))?;
    let inv = denom.inv()?;
    let points = (0..=n)
        .map(|j| {
            let x = int(j as i64);
            let series = TruncEGF::exp(&x, order).mul(&inv)?;
            Ok((x, series.coeffs()[n].clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    RatPoly::interpolate(&points)
}

/// Checks `E_n(-cp; x) = Σ_k C(n,k) W_k^Y(c) x^{n-k}` for `Y ~ Bernoulli(p)`
/// as an exact polynomial identity, together with its value at `x = 0`.
pub fn apostol_euler_check(p: &Rational, c: &Rational, n: usize, order: usize) -> Result<bool> {
    if !(p.is_positive() && p <= &Rational::one()) {
        return domain(format!("Bernoulli parameter must lie in (0, 1], got {p}"));
    }
    if c.is_positive() {
        return domain(format!("c must be <= 0, got {c}"));
    }
    let cp = c * p;
    if cp < -Rational::one() {
        return domain(format!("c·p must be >= -1, got {cp}"));
    }
    let lhs = apostol_euler_poly(&-&cp, n, order)?;
    let dist = DistSpec::Bernoulli(p.clone());
    let mut rhs = RatPoly::zero();
    for k in 0..=n {
        let w = prob_fubini_poly(&dist, k).eval(c);
        let coeff = Rational::from_integer(crate::exactnum::binomial(n, k)) * w;
        rhs = &rhs + &RatPoly::monomial(coeff, n - k);
    }
    let at_zero = lhs.eval(&Rational::zero()) == prob_fubini_poly(&dist, n).eval(c);
    Ok(lhs == rhs && at_zero)
}

/// `1 / (1 - x M(w))` as a truncated series in `w`.
fn mixture_series(dist: &DistSpec, x0: &Rational, order: usize) -> Result<TruncEGF> {
    if x0 == &Rational::one() {
        return domain("1 - x·M(w) has zero constant term at x = 1");
    }
    TruncEGF::identity(order)
        .sub(&dist.mgf_series(order).scale(x0))?
        .inv()
}

fn pad(series: &TruncEGF, order: usize) -> TruncEGF {
    let mut c = series.coeffs().to_vec();
    c.resize(order + 1, Rational::zero());
    TruncEGF::new(c).expect("non-empty")
}

/// Compares, coefficient by coefficient in `u` up to `order`,
/// `(1/(1-x)) Σ_{m≥k} C(m,k) u^m/m! v^{m-k} W_m^Y(x/(1-x))` with
/// `(u^k/k!) D_w^k [1/(1 - x M(w))]` at `w = uv`.
pub fn prop31_check(
    dist: &DistSpec,
    k: usize,
    x0: &Rational,
    v0: &Rational,
    order: usize,
) -> Result<bool> {
    if order < k {
        return usage(format!("series order {order} is below k = {k}"));
    }
    let f = mixture_series(dist, x0, order)?;
    let base = Rational::one() - x0;
    let y = x0 / &base;

    let lhs: Vec<Rational> = (0..=order)
        .map(|m| {
            if m < k {
                return Rational::zero();
            }
            Rational::from_integer(crate::exactnum::binomial(m, k))
                * pow(v0, m - k)
                * prob_fubini_poly(dist, m).eval(&y)
                / &base
        })
        .collect();

    let derived = pad(&f.derive(k)?.dilate(v0), order);
    let lead = TruncEGF::monomial(k, order).scale(&Rational::new(1.into(), factorial(k)));
    let rhs = lead.mul(&derived)?;
    Ok(rhs.coeffs() == lhs.as_slice())
}

/// Compares the `y`-series `(1/(1-x)) Σ_m E S_m^k (y^m/m!) W_m^Y(x/(1-x))`
/// with `Σ_{j≤trunc} x^j Σ_i S_Y(k,i) y^i D_y^i M(y)^j`, coefficient by
/// coefficient up to `order`. The `m = 0` term is included, which only
/// matters for `k = 0`. The report describes the worst coefficient.
pub fn prop32_check(
    dist: &DistSpec,
    k: usize,
    x0: &Rational,
    trunc_j: usize,
    order: usize,
    tol: f64,
) -> Result<TailReport> {
    check_trunc(trunc_j)?;
    check_disc(x0)?;
    let base = Rational::one() - x0;
    let y = x0 / &base;
    let exact: Vec<f64> = dist
        .sum_moments(k)
        .take(order + 1)
        .enumerate()
        .map(|(m, mom)| to_f64(&(&mom[k] * prob_fubini_poly(dist, m).eval(&y) / &base)))
        .collect();

    let stirling = TriTable::prob_stirling(dist, k);
    let lifts: Vec<TruncEGF> = (0..=k.min(order))
        .map(|i| TruncEGF::monomial(i, order))
        .collect();
    let mgf = dist.mgf_series(order);
    let mut power = TruncEGF::identity(order);
    let mut x_pow = Rational::one();
    let mut sums = vec![CompensatedSum::new(); order + 1];
    let mut mags: Vec<Vec<f64>> = vec![Vec::with_capacity(trunc_j + 1); order + 1];
    for _ in 0..=trunc_j {
        let mut term = TruncEGF::constant(Rational::zero(), order);
        for (i, lift) in lifts.iter().enumerate() {
            let s = stirling.get(k, i);
            if s.is_zero() {
                continue;
            }
            let d = pad(&power.derive(i)?, order);
            term = term.add(&lift.mul(&d)?.scale(&s))?;
        }
        for (m, c) in term.coeffs().iter().enumerate() {
            let v = to_f64(&(c * &x_pow));
            sums[m].add(v);
            mags[m].push(v.abs());
        }
        power = power.mul(&mgf)?;
        x_pow *= x0;
    }

    let mut worst: Option<TailReport> = None;
    for (m, (sum, mag)) in sums.into_iter().zip(mags).enumerate() {
        let tail = Tail { sum, mags: mag };
        let report = tail.finish(exact[m], tol, true)?;
        let replace = match &worst {
            None => true,
            Some(w) => !report.converged && w.converged || report.gap() > w.gap(),
        };
        if replace {
            worst = Some(report);
        }
    }
    let mut report = worst.expect("order + 1 >= 1 coefficients");
    report.converged = report.converged && report.last_term_magnitude < tol;
    Ok(report)
}

/// `E[S_j^n] = Σ_k S_Y(n,k) (j)_k`, checked exactly.
pub fn moment_identity_check(dist: &DistSpec, j: usize, n: usize) -> bool {
    let table = TriTable::prob_stirling(dist, n);
    let via: Rational = (0..=n)
        .map(|k| table.get(n, k) * falling(&int(j as i64), k))
        .sum();
    via == dist.sum_moment(j, n)
}
