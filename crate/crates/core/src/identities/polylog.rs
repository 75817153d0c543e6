//! Negative-order polylogarithms `Li_{-n}(s) = Σ_{i≥1} i^n s^i` as exact
//! rational functions, and their multinomial convolution powers.

use num_traits::{One, Signed, Zero};

use crate::error::{domain, Result};
use crate::exactnum::{factorial, int, RatPoly, Rational, TruncEGF};

/// Numerators `P_0, ..., P_n` with `Li_{-m}(s) = P_m(s) / (1 - s)^{m+1}`,
/// from `n` applications of `s·d/ds` to `s/(1 - s)`.
pub fn li_neg_numerators(n: usize) -> Vec<RatPoly> {
    let s = RatPoly::x();
    let one_minus_s = RatPoly::new(vec![Rational::one(), -Rational::one()]);
    let mut out = vec![s.clone()];
    for m in 0..n {
        let p = &out[m];
        // s·d/ds [P/(1-s)^{m+1}] = s[P'(1-s) + (m+1)P] / (1-s)^{m+2}
        let inner = &(&p.derivative() * &one_minus_s) + &p.scale(&int(m as i64 + 1));
        out.push(&s * &inner);
    }
    out
}

fn check_disc(s: &Rational) -> Result<()> {
    if s.abs() >= Rational::one() {
        return domain(format!("Li_{{-n}}(s) needs |s| < 1, got s = {s}"));
    }
    Ok(())
}

/// Exact `Li_{-n}(s)` for `|s| < 1`.
pub fn polylog_neg(n: usize, s: &Rational) -> Result<Rational> {
    check_disc(s)?;
    let p = li_neg_numerators(n).pop().unwrap();
    let denom = num_traits::pow(Rational::one() - s, n + 1);
    Ok(p.eval(s) / denom)
}

/// `[Li_0(s), Li_{-1}(s), ..., Li_{-n}(s)]`.
pub fn polylog_neg_row(n: usize, s: &Rational) -> Result<Vec<Rational>> {
    check_disc(s)?;
    let base = Rational::one() - s;
    Ok(li_neg_numerators(n)
        .into_iter()
        .enumerate()
        .map(|(m, p)| p.eval(s) / num_traits::pow(base.clone(), m + 1))
        .collect())
}

/// `Li^{*k}_{-n}(s) = Σ_{n_1+...+n_k=n} n!/(n_1!...n_k!) Π Li_{-n_i}(s)`,
/// enumerated over weak compositions of `n` into `k` parts. `Li^{*0}_{-n}` is
/// 1 for `n = 0` and 0 otherwise.
pub fn polylog_conv(n: usize, k: usize, s: &Rational) -> Result<Rational> {
    let li = polylog_neg_row(n, s)?;
    if k == 0 {
        return Ok(if n == 0 {
            Rational::one()
        } else {
            Rational::zero()
        });
    }
    // scaled[m] = Li_{-m}(s) / m!
    let scaled: Vec<Rational> = li
        .iter()
        .enumerate()
        .map(|(m, v)| v / Rational::from_integer(factorial(m)))
        .collect();

    fn go(parts_left: usize, rem: usize, acc: Rational, scaled: &[Rational], out: &mut Rational) {
        if parts_left == 1 {
            *out += acc * &scaled[rem];
            return;
        }
        for first in 0..=rem {
            go(
                parts_left - 1,
                rem - first,
                &acc * &scaled[first],
                scaled,
                out,
            );
        }
    }
    let mut total = Rational::zero();
    go(k, n, Rational::one(), &scaled, &mut total);
    Ok(total * Rational::from_integer(factorial(n)))
}

/// Iterator over `k = 0, 1, ...` of `[Li^{*k}_{0}(s), ..., Li^{*k}_{-n}(s)]`,
/// built by repeated binomial convolution.
pub(crate) fn polylog_conv_powers(
    n: usize,
    s: &Rational,
) -> Result<impl Iterator<Item = Vec<Rational>>> {
    let li = TruncEGF::new(polylog_neg_row(n, s)?)?;
    let mut current = TruncEGF::identity(n);
    Ok(std::iter::from_fn(move || {
        let next = current.mul(&li).expect("equal orders");
        Some(std::mem::replace(&mut current, next).into_coeffs())
    }))
}
