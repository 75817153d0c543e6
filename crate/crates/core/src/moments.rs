//! Exact raw moments `E[Y^n]` for the supported distribution catalog, and
//! moments `E[S_j^n]` of sums of `j` independent copies.

use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use num_traits::{One, Signed, Zero};
use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use rand_distr::{Exp1, Geometric, Poisson};

use crate::error::{Error, Result};
use crate::exactnum::{self, factorial, falling, int, pow, to_f64, Rational, TruncEGF};
use crate::identities::polylog::li_neg_numerators;
use crate::stirling::stirling2;

/// A random variable from the supported catalog.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DistSpec {
    /// Point mass at `c`.
    Degenerate(Rational),
    /// `P(Y = 1) = p`, `0 < p ≤ 1`.
    Bernoulli(Rational),
    /// Poisson with mean `λ > 0`.
    Poisson(Rational),
    /// `P(Y = k) = r·(1-r)^{k-1}` for `k ≥ 1`, `0 < r ≤ 1`.
    GeometricOnSupport1(Rational),
    /// Exponential with mean 1.
    StdExponential,
}

pub const DIST_GRAMMAR: &str =
    "degenerate:<c> | bernoulli:<p> | poisson:<lambda> | geometric:<r> | exponential \
     (rationals written as num/den or integers)";

impl DistSpec {
    pub fn degenerate(c: Rational) -> Self {
        DistSpec::Degenerate(c)
    }

    pub fn bernoulli(p: Rational) -> Result<Self> {
        Self::Bernoulli(p).validated()
    }

    pub fn poisson(lambda: Rational) -> Result<Self> {
        Self::Poisson(lambda).validated()
    }

    pub fn geometric(r: Rational) -> Result<Self> {
        Self::GeometricOnSupport1(r).validated()
    }

    pub fn validated(self) -> Result<Self> {
        let unit = |p: &Rational| p.is_positive() && *p <= Rational::one();
        let ok = match &self {
            DistSpec::Degenerate(_) | DistSpec::StdExponential => true,
            DistSpec::Bernoulli(p) => unit(p),
            DistSpec::GeometricOnSupport1(r) => unit(r),
            DistSpec::Poisson(l) => l.is_positive(),
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::Domain(format!("parameter out of range for {self}")))
        }
    }

    /// Exact `E[Y^n]`.
    pub fn moment(&self, n: usize) -> Rational {
        if n == 0 {
            return Rational::one();
        }
        match self {
            DistSpec::Degenerate(c) => pow(c, n),
            DistSpec::Bernoulli(p) => p.clone(),
            DistSpec::Poisson(l) => touchard(l, n),
            DistSpec::StdExponential => Rational::from_integer(factorial(n)),
            DistSpec::GeometricOnSupport1(r) => geometric_moments(r, n).pop().unwrap(),
        }
    }

    /// `[E Y^0, E Y^1, ..., E Y^n]`.
    pub fn moments(&self, n: usize) -> Vec<Rational> {
        match self {
            DistSpec::GeometricOnSupport1(r) => geometric_moments(r, n),
            _ => (0..=n).map(|k| self.moment(k)).collect(),
        }
    }

    /// Truncated MGF `E e^{tY}` whose EGF coefficients are the raw moments.
    pub fn mgf_series(&self, order: usize) -> TruncEGF {
        TruncEGF::new(self.moments(order)).expect("order + 1 coefficients")
    }

    /// The MGF assembled from its closed form with series operations, as an
    /// independent route to [`DistSpec::mgf_series`].
    pub fn mgf_closed_form(&self, order: usize) -> Result<TruncEGF> {
        let one = TruncEGF::identity(order);
        let et = TruncEGF::exp(&Rational::one(), order);
        match self {
            DistSpec::Degenerate(c) => Ok(TruncEGF::exp(c, order)),
            // 1 + p(e^t - 1)
            DistSpec::Bernoulli(p) => one.add(&et.sub(&one)?.scale(p)),
            // exp(λ(e^t - 1)) = Σ_k λ^k (e^t - 1)^k / k!
            DistSpec::Poisson(l) => {
                let base = et.sub(&one)?;
                let mut acc = TruncEGF::constant(Rational::zero(), order);
                let mut term = one.clone();
                for k in 0..=order {
                    if k > 0 {
                        term = term.mul(&base)?.scale(&(l / int(k as i64)));
                    }
                    acc = acc.add(&term)?;
                }
                Ok(acc)
            }
            // r e^t / (1 - s e^t)
            DistSpec::GeometricOnSupport1(r) => {
                let s = Rational::one() - r;
                let denom = one.sub(&et.scale(&s))?;
                Ok(et.scale(r).mul(&denom.inv()?)?)
            }
            // 1 / (1 - t)
            DistSpec::StdExponential => one.sub(&TruncEGF::monomial(1, order))?.inv(),
        }
    }

    /// `E[S_j^n]` for `S_j = Y_1 + ... + Y_j`, with `S_0 = 0`.
    pub fn sum_moment(&self, j: usize, n: usize) -> Rational {
        self.mgf_series(n).pow(j).coeffs()[n].clone()
    }

    /// Iterator over `i = 0, 1, 2, ...` yielding `[E S_i^0, ..., E S_i^n]`.
    pub fn sum_moments(&self, n: usize) -> SumMoments {
        SumMoments {
            mgf: self.mgf_series(n),
            current: TruncEGF::identity(n),
        }
    }

    /// A prepared sampler for this distribution.
    pub fn sampler(&self) -> Sampler {
        let kind = match self {
            DistSpec::Degenerate(c) => SamplerKind::Constant(to_f64(c)),
            DistSpec::Bernoulli(p) => SamplerKind::Bernoulli(
                Bernoulli::new(to_f64(p).clamp(0.0, 1.0)).expect("p in [0, 1]"),
            ),
            DistSpec::Poisson(l) => {
                SamplerKind::Poisson(Poisson::new(to_f64(l)).expect("positive mean"))
            }
            DistSpec::GeometricOnSupport1(r) => SamplerKind::Geometric(
                Geometric::new(to_f64(r).clamp(0.0, 1.0)).expect("r in [0, 1]"),
            ),
            DistSpec::StdExponential => SamplerKind::Exponential,
        };
        Sampler { kind }
    }

    /// Draws one variate. For repeated draws prefer [`DistSpec::sampler`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

/// Touchard form `Σ_k S(n,k) λ^k`.
fn touchard(lambda: &Rational, n: usize) -> Rational {
    (0..=n)
        .map(|k| Rational::from_integer(stirling2(n, k)) * pow(lambda, k))
        .sum()
}

/// Moments of the geometric law on `{1, 2, ...}`.
///
/// `E Y^n = (r/s) Li_{-n}(s)` with `Li_{-n}(s) = P_n(s)/(1-s)^{n+1}`; since
/// `s | P_n` this is `(P_n/s)(s) / r^n`, which also covers `r = 1`.
fn geometric_moments(r: &Rational, n: usize) -> Vec<Rational> {
    let s = Rational::one() - r;
    li_neg_numerators(n)
        .into_iter()
        .enumerate()
        .map(|(k, p)| {
            let q = p.div_x().expect("Li numerators vanish at 0");
            q.eval(&s) / pow(r, k)
        })
        .collect()
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSpec::Degenerate(c) => write!(f, "degenerate:{c}"),
            DistSpec::Bernoulli(p) => write!(f, "bernoulli:{p}"),
            DistSpec::Poisson(l) => write!(f, "poisson:{l}"),
            DistSpec::GeometricOnSupport1(r) => write!(f, "geometric:{r}"),
            DistSpec::StdExponential => write!(f, "exponential"),
        }
    }
}

impl FromStr for DistSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "invalid distribution `{s}`; expected {DIST_GRAMMAR}"
            ))
        };
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s, None),
        };
        let param = || -> Result<Rational> {
            exactnum::parse_rational(arg.ok_or_else(bad)?).map_err(|_| bad())
        };
        let dist = match name.to_ascii_lowercase().as_str() {
            "degenerate" => DistSpec::Degenerate(param()?),
            "bernoulli" => DistSpec::Bernoulli(param()?),
            "poisson" => DistSpec::Poisson(param()?),
            "geometric" => DistSpec::GeometricOnSupport1(param()?),
            "exponential" if arg.is_none() => DistSpec::StdExponential,
            _ => return Err(bad()),
        };
        dist.validated()
            .map_err(|e| Error::Parse(format!("{e}; expected {DIST_GRAMMAR}")))
    }
}

/// Yields the moment vectors of `S_0, S_1, S_2, ...` by repeated
/// multiplication with the MGF.
#[derive(Debug, Clone)]
pub struct SumMoments {
    mgf: TruncEGF,
    current: TruncEGF,
}

impl Iterator for SumMoments {
    type Item = Vec<Rational>;

    fn next(&mut self) -> Option<Self::Item> {
        let next = self.current.mul(&self.mgf).expect("equal orders");
        let out = std::mem::replace(&mut self.current, next);
        Some(out.into_coeffs())
    }
}

/// Lazily extended, publish-once cache of `E[Y^n]`.
#[derive(Debug)]
pub struct MomentSeq {
    dist: DistSpec,
    values: RwLock<Vec<Rational>>,
}

impl MomentSeq {
    pub fn new(dist: DistSpec) -> Self {
        Self {
            dist,
            values: RwLock::new(vec![Rational::one()]),
        }
    }

    pub fn dist(&self) -> &DistSpec {
        &self.dist
    }

    pub fn get(&self, n: usize) -> Rational {
        self.prefix(n).pop().unwrap()
    }

    /// `[m_0, ..., m_n]`.
    pub fn prefix(&self, n: usize) -> Vec<Rational> {
        {
            let v = self.values.read().unwrap();
            if v.len() > n {
                return v[..=n].to_vec();
            }
        }
        let fresh = self.dist.moments(n);
        let mut v = self.values.write().unwrap();
        // Entries already published are never rewritten.
        if v.len() <= n {
            let start = v.len();
            v.extend_from_slice(&fresh[start..]);
        }
        v[..=n].to_vec()
    }

    pub fn cached_len(&self) -> usize {
        self.values.read().unwrap().len()
    }
}

/// `Σ_{k ≤ n∧j} S_Y(n,k)·(j)_k`, the moment of `S_j` rebuilt from the
/// probabilistic Stirling numbers.
pub fn sum_moment_via_stirling(dist: &DistSpec, j: usize, n: usize) -> Rational {
    let row = crate::stirling::prob_stirling_row(dist, n);
    let jq = int(j as i64);
    (0..=n.min(j)).map(|k| &row[k] * falling(&jq, k)).sum()
}

#[derive(Debug, Clone)]
pub struct Sampler {
    kind: SamplerKind,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Constant(f64),
    Bernoulli(Bernoulli),
    Poisson(Poisson<f64>),
    Geometric(Geometric),
    Exponential,
}

impl Distribution<f64> for Sampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            SamplerKind::Constant(c) => *c,
            SamplerKind::Bernoulli(b) => {
                if b.sample(rng) {
                    1.0
                } else {
                    0.0
                }
            }
            SamplerKind::Poisson(p) => p.sample(rng),
            // Geometric counts failures before the first success.
            SamplerKind::Geometric(g) => 1.0 + g.sample(rng) as f64,
            SamplerKind::Exponential => Exp1.sample(rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn catalog() -> Vec<DistSpec> {
        vec![
            DistSpec::Degenerate(int(1)),
            DistSpec::Degenerate(ratio(-3, 2)),
            DistSpec::Bernoulli(ratio(1, 2)),
            DistSpec::Bernoulli(int(1)),
            DistSpec::Poisson(int(1)),
            DistSpec::Poisson(ratio(2, 3)),
            DistSpec::GeometricOnSupport1(ratio(1, 2)),
            DistSpec::GeometricOnSupport1(ratio(1, 3)),
            DistSpec::GeometricOnSupport1(int(1)),
            DistSpec::StdExponential,
        ]
    }

    #[test]
    fn moment_examples() {
        assert_eq!(DistSpec::Poisson(int(1)).moment(3), int(5));
        assert_eq!(DistSpec::StdExponential.moment(4), int(24));
        assert_eq!(DistSpec::GeometricOnSupport1(ratio(1, 2)).moment(2), int(6));
        // (2 - r)/r^2 at r = 1/3
        assert_eq!(
            DistSpec::GeometricOnSupport1(ratio(1, 3)).moment(2),
            int(15)
        );
        assert_eq!(DistSpec::GeometricOnSupport1(int(1)).moment(5), int(1));
        assert_eq!(DistSpec::Bernoulli(ratio(1, 3)).moment(7), ratio(1, 3));
    }

    #[test]
    fn geometric_moments_match_direct_tail_sum() {
        // E Y^n = Σ_k k^n r s^{k-1}, summed far enough that the tail is negligible
        let r = 0.5f64;
        for n in 0..6 {
            let direct: f64 = (1..400)
                .map(|k| (k as f64).powi(n as i32) * r * (1.0 - r).powi(k - 1))
                .sum();
            let exact = to_f64(&DistSpec::GeometricOnSupport1(ratio(1, 2)).moment(n));
            assert!((direct - exact).abs() < 1e-9 * exact.max(1.0), "n={n}");
        }
    }

    #[test]
    fn mgf_examples() {
        let c = |v: &[Rational]| v.to_vec();
        assert_eq!(
            DistSpec::Degenerate(int(1)).mgf_series(3).coeffs(),
            vec![int(1); 4]
        );
        assert_eq!(
            DistSpec::Bernoulli(ratio(1, 2)).mgf_series(2).coeffs(),
            c(&[int(1), ratio(1, 2), ratio(1, 2)])
        );
        assert_eq!(
            DistSpec::StdExponential.mgf_series(3).coeffs(),
            c(&[int(1), int(1), int(2), int(6)])
        );
    }

    #[test]
    fn mgf_routes_agree() {
        for d in catalog() {
            assert_eq!(d.mgf_closed_form(10).unwrap(), d.mgf_series(10), "{d}");
        }
    }

    #[test]
    fn sum_moment_examples() {
        for d in catalog() {
            assert_eq!(d.sum_moment(0, 3), int(0));
            assert_eq!(d.sum_moment(0, 0), int(1));
        }
        assert_eq!(DistSpec::StdExponential.sum_moment(2, 2), int(6));
        let p = ratio(2, 7);
        let expected = int(2) * &p + int(2) * &p * &p;
        assert_eq!(DistSpec::Bernoulli(p).sum_moment(2, 2), expected);
    }

    #[test]
    fn sum_moment_properties() {
        for d in catalog() {
            let m = d.moments(8);
            let rows: Vec<Vec<Rational>> = d.sum_moments(8).take(7).collect();
            for n in 0..=8 {
                assert_eq!(d.sum_moment(1, n), m[n]);
                for j in 0..6 {
                    // binomial convolution E S_{j+1}^n = Σ C(n,k) E S_j^k E Y^{n-k}
                    let conv: Rational = (0..=n)
                        .map(|k| {
                            Rational::from_integer(exactnum::binomial(n, k))
                                * &rows[j][k]
                                * &m[n - k]
                        })
                        .sum();
                    assert_eq!(rows[j + 1][n], conv, "{d} j={j} n={n}");
                    assert_eq!(rows[j][n], d.sum_moment(j, n));
                }
            }
        }
    }

    #[test]
    fn parse_catalog() {
        assert_eq!(
            "degenerate:1".parse::<DistSpec>().unwrap(),
            DistSpec::Degenerate(int(1))
        );
        assert_eq!(
            "bernoulli:1/2".parse::<DistSpec>().unwrap(),
            DistSpec::Bernoulli(ratio(1, 2))
        );
        assert_eq!(
            "poisson:3".parse::<DistSpec>().unwrap(),
            DistSpec::Poisson(int(3))
        );
        assert_eq!(
            "geometric:2/4".parse::<DistSpec>().unwrap(),
            DistSpec::GeometricOnSupport1(ratio(1, 2))
        );
        assert_eq!(
            "exponential".parse::<DistSpec>().unwrap(),
            DistSpec::StdExponential
        );
        for bad in [
            "",
            "bernoulli",
            "bernoulli:3/2",
            "poisson:0",
            "geometric:0",
            "normal:1",
            "exponential:2",
            "degenerate:x",
        ] {
            let err = bad.parse::<DistSpec>().unwrap_err();
            assert!(err.to_string().contains("degenerate:<c>"), "{bad}: {err}");
        }
        for d in catalog() {
            assert_eq!(d.to_string().parse::<DistSpec>().unwrap(), d);
        }
    }

    #[test]
    fn moment_cache_is_stable() {
        let seq = MomentSeq::new(DistSpec::Poisson(int(1)));
        assert_eq!(seq.get(0), int(1));
        assert_eq!(seq.get(4), int(15));
        assert_eq!(seq.cached_len(), 5);
        assert_eq!(seq.prefix(2), vec![int(1), int(1), int(2)]);
        assert_eq!(seq.get(4), int(15));
        std::thread::scope(|s| {
            for _ in 0..4 {
                s.spawn(|| assert_eq!(seq.get(6), int(203)));
            }
        });
        assert_eq!(seq.cached_len(), 7);
    }

    #[test]
    fn sampling_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let one = DistSpec::Degenerate(int(1)).sampler();
        let sure = DistSpec::Bernoulli(int(1)).sampler();
        for _ in 0..100 {
            assert_eq!(one.sample(&mut rng), 1.0);
            assert_eq!(sure.sample(&mut rng), 1.0);
        }
        let geo = DistSpec::GeometricOnSupport1(ratio(1, 2)).sampler();
        assert!((0..1000).all(|_| geo.sample(&mut rng) >= 1.0));
    }

    #[test]
    fn bernoulli_sample_mean_within_clt_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let b = DistSpec::Bernoulli(ratio(1, 2));
        let n = 100_000;
        let mean = (0..n).map(|_| b.sample(&mut rng)).sum::<f64>() / n as f64;
        let sigma = (0.25f64 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 5.0 * sigma, "mean {mean}");
    }
}
