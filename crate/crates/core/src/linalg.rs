//! Dense Gaussian elimination over any [`Scalar`].

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `a · x = b` by Gaussian elimination with partial pivoting.
///
/// `a` is row-major and square. Pivots are chosen by largest magnitude,
/// which for exact scalars simply picks some non-zero entry.
#[allow(clippy::needless_range_loop)]
pub fn solve<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Result<Vec<S>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col][col].abs();
        for row in col + 1..n {
            let cand = a[row][col].abs();
            if cand > best {
                best = cand;
                pivot = row;
            }
        }
        if best.is_zero() {
            return Err(Error::Singular);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (head, tail) = a.split_at_mut(col + 1);
        let pivot_row = &head[col];
        for (offset, row) in tail.iter_mut().enumerate() {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone() / pivot_row[col].clone();
            for k in col..n {
                let delta = factor.clone() * pivot_row[k].clone();
                row[k] = row[k].clone() - delta;
            }
            let delta = factor * b[col].clone();
            b[col + 1 + offset] = b[col + 1 + offset].clone() - delta;
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - a[row][k].clone() * x[k].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Ok(x)
}
