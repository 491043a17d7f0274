//! Dense two-phase primal simplex over exact rationals.
//!
//! Entering columns follow Bland's rule on a lexicographic objective
//! `(c, x_1, x_2, ..., x_n)`: among all cost-optimal points the returned vertex
//! minimises `x_1`, then `x_2`, and so on, which makes it unique.

use super::{BasicSolution, LinearConstraint, LpStats, RationalVector, Sense};
use crate::error::{Error, Result};
use crate::lp::linalg;
use crate::rational::{int, Rational};
use crate::EdgeId;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;

struct Tableau {
    /// Constraint rows; the last entry is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Objective rows of reduced costs; the last entry is minus the value.
    objectives: Vec<Vec<Rational>>,
    allowed: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.allowed.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let eliminate = |row: &mut Vec<Rational>| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        for row in self.objectives.iter_mut() {
            eliminate(row);
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    fn lex_sign(&self, c: usize) -> Ordering {
        for obj in &self.objectives {
            match obj[c].cmp(&Rational::zero()) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }

    /// Runs simplex iterations until optimal. Returns `Err(Unbounded)` when a
    /// lexicographically improving column has no bounding row.
    fn optimize(&mut self) -> Result<()> {
        let n = self.ncols();
        loop {
            let entering = (0..n).find(|&j| self.allowed[j] && self.lex_sign(j) == Ordering::Less);
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[n] / &row[c];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(Error::Unbounded),
            }
        }
    }
}

/// Solves `min c·x` subject to `constraints` and `x ≥ 0`, where the variables
/// are the keys of `objective`. Returns the lexicographically smallest optimal
/// vertex.
pub fn solve_vertex_lp(
    constraints: &[LinearConstraint],
    objective: &RationalVector,
) -> Result<BasicSolution> {
    let vars: Vec<EdgeId> = objective.keys().collect();
    let index: BTreeMap<EdgeId, usize> = vars.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let n = vars.len();
    let m = constraints.len();

    // Column layout: structurals, then one slack/surplus per inequality, then
    // one artificial per row that needs it.
    let mut dense: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut flipped = vec![false; m];
    let mut ge = vec![false; m];
    for (i, c) in constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); n];
        for (e, v) in &c.coefficients {
            let j = *index.get(e).ok_or_else(|| {
                Error::Precondition(format!(
                    "constraint uses edge {e} absent from the objective"
                ))
            })?;
            row[j] += v;
        }
        let mut rhs = c.rhs.clone();
        if rhs.is_negative() {
            flipped[i] = true;
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            rhs = -rhs;
        }
        ge[i] = c.sense == Sense::Le && flipped[i];
        row.push(rhs);
        dense.push(row);
    }
    let n_slack = constraints.iter().filter(|c| c.sense == Sense::Le).count();
    let needs_art: Vec<bool> = (0..m)
        .map(|i| constraints[i].sense == Sense::Eq || ge[i])
        .collect();
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let ncols = n + n_slack + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut identity_col = vec![0usize; m];
    let mut is_art = vec![false; ncols];
    let (mut slack, mut art) = (n, n + n_slack);
    for i in 0..m {
        let rhs = dense[i].pop().unwrap();
        let mut row = std::mem::take(&mut dense[i]);
        row.resize(ncols + 1, Rational::zero());
        if constraints[i].sense == Sense::Le {
            row[slack] = if ge[i] {
                -Rational::one()
            } else {
                Rational::one()
            };
            if !ge[i] {
                identity_col[i] = slack;
                basis.push(slack);
            }
            slack += 1;
        }
        if needs_art[i] {
            row[art] = Rational::one();
            is_art[art] = true;
            identity_col[i] = art;
            basis.push(art);
            art += 1;
        }
        row[ncols] = rhs;
        rows.push(row);
    }

    let mut phase1 = vec![Rational::zero(); ncols + 1];
    for (j, a) in is_art.iter().enumerate() {
        if *a {
            phase1[j] = Rational::one();
        }
    }
    let mut t = Tableau {
        rows,
        basis,
        objectives: vec![phase1],
        allowed: vec![true; ncols],
        pivots: 0,
    };
    for r in 0..m {
        if is_art[t.basis[r]] {
            let row = t.rows[r].clone();
            for (x, y) in t.objectives[0].iter_mut().zip(&row) {
                *x -= y;
            }
        }
    }
    t.optimize()?;
    let infeasibility = -t.objectives[0][ncols].clone();
    if infeasibility.is_positive() {
        // Farkas multipliers from the phase-one duals, in the orientation of
        // the input rows.
        let certificate = (0..m)
            .map(|i| {
                let col = identity_col[i];
                let cost = if is_art[col] { int(1) } else { int(0) };
                let y = cost - &t.objectives[0][col];
                if flipped[i] {
                    y
                } else {
                    -y
                }
            })
            .collect();
        return Err(Error::Infeasible {
            reason: "linear system has no feasible point".into(),
            certificate: Some(certificate),
        });
    }

    // Drive artificials out of the basis; rows where that is impossible are
    // redundant.
    let mut r = 0;
    while r < t.rows.len() {
        if is_art[t.basis[r]] {
            if let Some(c) = (0..ncols).find(|&j| !is_art[j] && !t.rows[r][j].is_zero()) {
                t.pivot(r, c);
            } else {
                t.rows.remove(r);
                t.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }
    for (j, a) in is_art.iter().enumerate() {
        if *a {
            t.allowed[j] = false;
        }
    }

    let mut objectives = Vec::with_capacity(n + 1);
    let mut cost_row = vec![Rational::zero(); ncols + 1];
    for (j, &e) in vars.iter().enumerate() {
        cost_row[j] = objective.get(e);
    }
    objectives.push(cost_row);
    for j in 0..n {
        let mut row = vec![Rational::zero(); ncols + 1];
        row[j] = Rational::one();
        objectives.push(row);
    }
    for (r, &b) in t.basis.iter().enumerate() {
        for obj in objectives.iter_mut() {
            if obj[b].is_zero() {
                continue;
            }
            let f = obj[b].clone();
            for (x, y) in obj.iter_mut().zip(&t.rows[r]) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
    }
    t.objectives = objectives;
    t.optimize()?;

    let mut x = RationalVector::zeros(vars.iter().copied());
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            x.set(vars[b], t.rows[r][ncols].clone());
        }
    }
    let objective_value = x.dot(objective);
    let mut sol = certify(x, objective_value, constraints);
    sol.stats.pivots = t.pivots;
    Ok(sol)
}

/// Collects the constraints tight at `x` and checks that they determine `x`
/// on its support.
pub(crate) fn certify(
    x: RationalVector,
    objective: Rational,
    constraints: &[LinearConstraint],
) -> BasicSolution {
    let tight: Vec<LinearConstraint> = constraints
        .iter()
        .filter(|c| c.is_tight(&x))
        .cloned()
        .collect();
    let support: Vec<EdgeId> = x.support().collect();
    let rows: Vec<Vec<Rational>> = tight
        .iter()
        .map(|c| support.iter().map(|&e| c.coefficient(e)).collect())
        .collect();
    let vertex_certificate = linalg::rank(&rows) == support.len();
    BasicSolution {
        x,
        objective,
        tight,
        vertex_certificate,
        stats: LpStats::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::ConstraintTag;
    use crate::rational::ratio;

    fn vec_of(vals: &[(u32, i64)]) -> RationalVector {
        RationalVector::from_iter(vals.iter().map(|&(e, v)| (EdgeId(e), int(v))))
    }

    fn row(coeffs: &[(u32, i64)], sense: Sense, rhs: i64, tag: ConstraintTag) -> LinearConstraint {
        LinearConstraint {
            coefficients: coeffs.iter().map(|&(e, v)| (EdgeId(e), int(v))).collect(),
            sense,
            rhs: int(rhs),
            tag,
        }
    }

    fn bounds(ids: &[u32]) -> Vec<LinearConstraint> {
        ids.iter()
            .map(|&e| row(&[(e, 1)], Sense::Le, 1, ConstraintTag::Bound(EdgeId(e))))
            .collect()
    }

    #[test]
    fn forced_vertex() {
        let mut cons = bounds(&[1, 2]);
        cons.push(row(
            &[(1, 1), (2, 1)],
            Sense::Eq,
            1,
            ConstraintTag::CardinalityEquality,
        ));
        let sol = solve_vertex_lp(&cons, &vec_of(&[(1, 1), (2, 0)])).unwrap();
        assert_eq!(sol.x.get(EdgeId(1)), int(0));
        assert_eq!(sol.x.get(EdgeId(2)), int(1));
        assert_eq!(sol.objective, int(0));
        assert!(sol.vertex_certificate);
    }

    #[test]
    fn empty_problem() {
        let cons = vec![row(&[], Sense::Eq, 0, ConstraintTag::CardinalityEquality)];
        let sol = solve_vertex_lp(&cons, &RationalVector::default()).unwrap();
        assert_eq!(sol.objective, int(0));
        assert!(sol.x.is_empty());
        assert!(sol.vertex_certificate);
    }

    #[test]
    fn lexicographic_tie_break_is_deterministic() {
        // all three edges cost the same; any two of them is optimal
        let mut cons = bounds(&[0, 1, 2]);
        cons.push(row(
            &[(0, 1), (1, 1), (2, 1)],
            Sense::Eq,
            2,
            ConstraintTag::CardinalityEquality,
        ));
        let obj = vec_of(&[(0, 1), (1, 1), (2, 1)]);
        let sol = solve_vertex_lp(&cons, &obj).unwrap();
        // minimise x0 first, then x1
        assert_eq!(sol.x.get(EdgeId(0)), int(0));
        assert_eq!(sol.x.get(EdgeId(1)), int(1));
        assert_eq!(sol.x.get(EdgeId(2)), int(1));
        let again = solve_vertex_lp(&cons, &obj).unwrap();
        assert_eq!(sol.x, again.x);
    }

    #[test]
    fn fractional_vertex() {
        // x0 + x1 <= 1, x1 + x2 <= 1, x0 + x2 <= 1, maximise sum
        let cons = vec![
            row(
                &[(0, 1), (1, 1)],
                Sense::Le,
                1,
                ConstraintTag::Bound(EdgeId(0)),
            ),
            row(
                &[(1, 1), (2, 1)],
                Sense::Le,
                1,
                ConstraintTag::Bound(EdgeId(1)),
            ),
            row(
                &[(0, 1), (2, 1)],
                Sense::Le,
                1,
                ConstraintTag::Bound(EdgeId(2)),
            ),
        ];
        let sol = solve_vertex_lp(&cons, &vec_of(&[(0, -1), (1, -1), (2, -1)])).unwrap();
        assert_eq!(sol.objective, ratio(-3, 2));
        for e in 0..3 {
            assert_eq!(sol.x.get(EdgeId(e)), ratio(1, 2));
        }
        assert!(sol.vertex_certificate);
    }

    #[test]
    fn infeasible_with_farkas_certificate() {
        let cons = vec![
            row(
                &[(0, 1), (1, 1)],
                Sense::Eq,
                3,
                ConstraintTag::CardinalityEquality,
            ),
            row(&[(0, 1)], Sense::Le, 1, ConstraintTag::Bound(EdgeId(0))),
            row(&[(1, 1)], Sense::Le, 1, ConstraintTag::Bound(EdgeId(1))),
        ];
        let err = solve_vertex_lp(&cons, &vec_of(&[(0, 1), (1, 1)])).unwrap_err();
        let Error::Infeasible {
            certificate: Some(u),
            ..
        } = err
        else {
            panic!("expected infeasible, got {err:?}");
        };
        check_farkas(&cons, &u, &[EdgeId(0), EdgeId(1)]);
    }

    #[test]
    fn infeasible_negative_rhs() {
        // x0 <= -1 with x0 >= 0
        let cons = vec![row(
            &[(0, 1)],
            Sense::Le,
            -1,
            ConstraintTag::Bound(EdgeId(0)),
        )];
        let err = solve_vertex_lp(&cons, &vec_of(&[(0, 1)])).unwrap_err();
        let Error::Infeasible {
            certificate: Some(u),
            ..
        } = err
        else {
            panic!("expected infeasible");
        };
        check_farkas(&cons, &u, &[EdgeId(0)]);
    }

    fn check_farkas(cons: &[LinearConstraint], u: &[Rational], vars: &[EdgeId]) {
        assert_eq!(u.len(), cons.len());
        for (c, ui) in cons.iter().zip(u) {
            if c.sense == Sense::Le {
                assert!(!ui.is_negative(), "multiplier of an inequality is negative");
            }
        }
        for &e in vars {
            let s: Rational = cons
                .iter()
                .zip(u)
                .map(|(c, ui)| c.coefficient(e) * ui)
                .fold(Rational::zero(), |a, b| a + b);
            assert!(!s.is_negative());
        }
        let rhs: Rational = cons
            .iter()
            .zip(u)
            .map(|(c, ui)| &c.rhs * ui)
            .fold(Rational::zero(), |a, b| a + b);
        assert!(rhs.is_negative());
    }

    #[test]
    fn unbounded() {
        let cons = vec![row(
            &[(0, 1), (1, -1)],
            Sense::Le,
            1,
            ConstraintTag::Bound(EdgeId(0)),
        )];
        let err = solve_vertex_lp(&cons, &vec_of(&[(0, 0), (1, -1)])).unwrap_err();
        assert!(matches!(err, Error::Unbounded));
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut cons = bounds(&[0, 1]);
        cons.push(row(
            &[(0, 1), (1, 1)],
            Sense::Eq,
            1,
            ConstraintTag::CardinalityEquality,
        ));
        cons.push(row(
            &[(0, 2), (1, 2)],
            Sense::Eq,
            2,
            ConstraintTag::CardinalityEquality,
        ));
        let sol = solve_vertex_lp(&cons, &vec_of(&[(0, 2), (1, 1)])).unwrap();
        assert_eq!(sol.x.get(EdgeId(1)), int(1));
        assert_eq!(sol.x.get(EdgeId(0)), int(0));
    }
}
