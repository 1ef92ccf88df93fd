//! Exact Gaussian elimination over the rationals.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::series::Rational;

/// Solves `rows * c + rhs = 0` where each row is `(coefficients, constant)`.
/// Every unknown must be determined and every equation satisfied.
pub fn solve(rows: &[(Vec<Rational>, Rational)], unknowns: usize) -> Result<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|(r, c)| {
            let mut v = r.clone();
            v.resize(unknowns, Rational::zero());
            v.push(-c.clone());
            v
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..unknowns {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        let pivot = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i != row && !r[col].is_zero() {
                let f = r[col].clone();
                for (x, y) in r.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[unknowns].is_zero()) {
        return Err(Error::Inconsistent(format!("{} equations, rank {}", m.len(), row)));
    }
    if row < unknowns {
        return Err(Error::Underdetermined(format!("{unknowns} unknowns, rank {row}")));
    }
    let mut sol = vec![Rational::zero(); unknowns];
    for (r, &c) in pivot_cols.iter().enumerate() {
        sol[c] = m[r][unknowns].clone();
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::qi;

    #[test]
    fn two_by_two() {
        // x + y - 3 = 0, x - y - 1 = 0
        let rows = vec![(vec![qi(1), qi(1)], qi(-3)), (vec![qi(1), qi(-1)], qi(-1))];
        assert_eq!(solve(&rows, 2).unwrap(), vec![qi(2), qi(1)]);
    }

    #[test]
    fn failures() {
        let rows = vec![(vec![qi(1), qi(1)], qi(-3))];
        assert!(matches!(solve(&rows, 2), Err(Error::Underdetermined(_))));
        let rows = vec![(vec![qi(1)], qi(-3)), (vec![qi(2)], qi(-3))];
        assert!(matches!(solve(&rows, 1), Err(Error::Inconsistent(_))));
    }
}
