use num_traits::{One, Zero};

use super::Rational;
use crate::error::{usage, Result};

/// Determinant of a square rational matrix by Gaussian elimination with exact
/// pivots. The empty matrix has determinant 1.
pub fn determinant(rows: &[Vec<Rational>]) -> Result<Rational> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return usage("determinant needs a square matrix");
    }
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ok(Rational::zero());
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        let inv = p.recip();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            let (top, bottom) = a.split_at_mut(r);
            let src = &top[col];
            for (dst, s) in bottom[0].iter_mut().zip(src).skip(col) {
                *dst -= &factor * s;
            }
        }
    }
    Ok(det)
}
