//! Exact Gaussian elimination over the rationals.

use crate::rational::Rational;
use num_traits::Zero;

/// Rank of the matrix whose rows are given.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut basis = RowBasis::default();
    rows.iter()
        .filter(|r| basis.insert(r.to_vec()) == Insert::Added)
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insert {
    Added,
    Dependent,
}

/// An incrementally built row-echelon basis.
#[derive(Debug, Default, Clone)]
pub struct RowBasis {
    /// (pivot column, normalized row with 1 at the pivot)
    rows: Vec<(usize, Vec<Rational>)>,
}

impl RowBasis {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `row` against the basis; returns the residual.
    pub fn reduce(&self, mut row: Vec<Rational>) -> Vec<Rational> {
        for (p, b) in &self.rows {
            if row[*p].is_zero() {
                continue;
            }
            let f = row[*p].clone();
            for (x, y) in row.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        row
    }

    pub fn insert(&mut self, row: Vec<Rational>) -> Insert {
        let mut r = self.reduce(row);
        let Some(p) = r.iter().position(|v| !v.is_zero()) else {
            return Insert::Dependent;
        };
        let inv = r[p].recip();
        for v in r.iter_mut() {
            *v *= &inv;
        }
        // keep existing rows reduced at the new pivot
        for (_, b) in self.rows.iter_mut() {
            if !b[p].is_zero() {
                let f = b[p].clone();
                for (x, y) in b.iter_mut().zip(&r) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        self.rows.push((p, r));
        Insert::Added
    }

    pub fn contains(&self, row: &[Rational]) -> bool {
        self.reduce(row.to_vec()).iter().all(|v| v.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect()
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&m(&[&[1, 0], &[0, 1], &[1, 1]])), 2);
        assert_eq!(rank(&m(&[&[0, 0]])), 0);
        assert_eq!(rank(&m(&[&[2, 4, 6], &[1, 2, 3]])), 1);
        assert_eq!(rank(&m(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]])), 3);
    }

    #[test]
    fn span_membership() {
        let mut b = RowBasis::default();
        b.insert(m(&[&[1, 1, 0]]).remove(0));
        b.insert(m(&[&[0, 1, 1]]).remove(0));
        assert!(b.contains(&m(&[&[1, 2, 1]])[0]));
        assert!(!b.contains(&m(&[&[1, 0, 0]])[0]));
    }
}
