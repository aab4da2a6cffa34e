//! Exact rational simplex for `max c·x` subject to `A x <= b`, `x >= 0`,
//! with `b >= 0` so the slack basis is feasible. Bland's rule, so it always
//! terminates.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub value: Rational,
}

/// Returns `Ok(None)` when the objective is unbounded.
pub fn maximize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> Result<Option<LpSolution>> {
    let n = c.len();
    let m = a.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::input(
            "constraint matrix has inconsistent dimensions",
        ));
    }
    if b.iter().any(|v| v.is_negative()) {
        return Err(Error::input("right-hand sides must be nonnegative"));
    }
    // Columns 0..n are x, n..n+m are slacks. Row m is the objective row
    // holding reduced costs; its last entry is the negated objective value.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
    for (i, row) in a.iter().enumerate() {
        let mut r = vec![Rational::zero(); width];
        r[..n].clone_from_slice(row);
        r[n + i] = Rational::from_integer(1.into());
        r[width - 1] = b[i].clone();
        t.push(r);
    }
    let mut obj = vec![Rational::zero(); width];
    obj[..n].clone_from_slice(c);
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..n + m).find(|&j| t[m][j].is_positive()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return Ok(None);
        };
        let pivot = t[row][enter].clone();
        for v in t[row].iter_mut() {
            *v /= &pivot;
        }
        let pivot_row = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i == row || r[enter].is_zero() {
                continue;
            }
            let factor = r[enter].clone();
            for (v, p) in r.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        basis[row] = enter;
    }

    let mut x = vec![Rational::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = t[i][width - 1].clone();
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(Some(LpSolution { x, value }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let c = vec![int(3), int(5)];
        let a = vec![
            vec![int(1), int(0)],
            vec![int(0), int(2)],
            vec![int(3), int(2)],
        ];
        let b = vec![int(4), int(12), int(18)];
        let s = maximize(&c, &a, &b).unwrap().unwrap();
        assert_eq!(s.x, vec![int(2), int(6)]);
        assert_eq!(s.value, int(36));
    }

    #[test]
    fn fractional_optimum() {
        // max x + y, 2x + y <= 1, x + 2y <= 1 -> 2/3
        let c = vec![int(1), int(1)];
        let a = vec![vec![int(2), int(1)], vec![int(1), int(2)]];
        let s = maximize(&c, &a, &[int(1), int(1)]).unwrap().unwrap();
        assert_eq!(s.value, frac(2, 3));
    }

    #[test]
    fn unbounded_and_degenerate() {
        let c = vec![int(1), int(0)];
        let a = vec![vec![int(0), int(1)]];
        assert_eq!(maximize(&c, &a, &[int(1)]).unwrap(), None);
        let zero = maximize(&[int(1)], &[vec![int(1)]], &[int(0)])
            .unwrap()
            .unwrap();
        assert_eq!(zero.value, int(0));
        assert!(maximize(&[int(1)], &[vec![int(1)]], &[int(-1)]).is_err());
    }
}
