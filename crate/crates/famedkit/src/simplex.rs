//! Exact two-phase simplex over rationals.
//!
//! Decides nonemptiness of the angle polytope without floating point, which
//! keeps FAMED condition (1) an exact verdict. Bland's rule, so no cycling.

use crate::exact::Rat;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

/// Maximize `c·x` subject to `rows·x = rhs`, `x ≥ 0`.
pub fn maximize(rows: &[Vec<Rat>], rhs: &[Rat], c: &[Rat]) -> LpOutcome {
    let m = rows.len();
    let n = c.len();
    assert!(rows.iter().all(|r| r.len() == n));
    assert_eq!(rhs.len(), m);

    // tableau with artificial identity block: columns [x | artificial | rhs]
    let width = n + m + 1;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::with_capacity(width);
        let flip = rhs[i].is_negative();
        for j in 0..n {
            row.push(if flip {
                -rows[i][j].clone()
            } else {
                rows[i][j].clone()
            });
        }
        for j in 0..m {
            row.push(if i == j { Rat::one() } else { Rat::zero() });
        }
        row.push(if flip { -rhs[i].clone() } else { rhs[i].clone() });
        t.push(row);
    }
    let mut basis: Vec<usize> = (0..m).map(|i| n + i).collect();

    // phase 1: maximize -(sum of artificials); reduced costs = column sums
    let mut obj: Vec<Rat> = (0..width)
        .map(|j| {
            if j >= n && j < n + m {
                Rat::zero()
            } else {
                t.iter().map(|row| row[j].clone()).sum()
            }
        })
        .collect();
    run_simplex(&mut t, &mut obj, &mut basis, n + m);
    if !obj[width - 1].is_zero() {
        return LpOutcome::Infeasible;
    }
    // drive remaining artificials out of the basis
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut obj, &mut basis, i, j);
            }
        }
    }

    // phase 2 on the original objective
    let mut obj2: Vec<Rat> = vec![Rat::zero(); width];
    for (j, cj) in c.iter().enumerate() {
        obj2[j] = cj.clone();
    }
    for i in 0..m {
        if basis[i] < n && !c[basis[i]].is_zero() {
            let cb = c[basis[i]].clone();
            for j in 0..width {
                let v = &obj2[j] - &cb * &t[i][j];
                obj2[j] = v;
            }
        }
    }
    // artificial columns are no longer eligible
    for j in n..n + m {
        obj2[j] = -Rat::one();
    }
    if !run_simplex(&mut t, &mut obj2, &mut basis, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { x, value }
}

/// Bland-rule simplex loop; only columns `< limit` may enter. Returns false
/// on unboundedness.
fn run_simplex(
    t: &mut [Vec<Rat>],
    obj: &mut [Rat],
    basis: &mut [usize],
    limit: usize,
) -> bool {
    let width = obj.len();
    loop {
        let Some(e) = (0..limit).find(|&j| obj[j].is_positive()) else {
            return true;
        };
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..t.len() {
            if t[i][e].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return false;
        };
        pivot(t, obj, basis, r, e);
    }
}

fn pivot(t: &mut [Vec<Rat>], obj: &mut [Rat], basis: &mut [usize], r: usize, e: usize) {
    let width = obj.len();
    let p = t[r][e].clone();
    for v in t[r].iter_mut() {
        *v = &*v / &p;
    }
    for i in 0..t.len() {
        if i == r || t[i][e].is_zero() {
            continue;
        }
        let f = t[i][e].clone();
        for j in 0..width {
            let v = &t[i][j] - &f * &t[r][j];
            t[i][j] = v;
        }
    }
    if !obj[e].is_zero() {
        let f = obj[e].clone();
        for j in 0..width {
            let v = &obj[j] - &f * &t[r][j];
            obj[j] = v;
        }
    }
    basis[r] = e;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    #[test]
    fn solves_tiny_lp() {
        // max x + y st x + 2y = 4, x,y >= 0  -> x = 4
        let rows = vec![vec![rat_int(1), rat_int(2)]];
        let rhs = vec![rat_int(4)];
        let c = vec![rat_int(1), rat_int(1)];
        match maximize(&rows, &rhs, &c) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, rat_int(4));
                assert_eq!(x[0], rat_int(4));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_infeasible() {
        // x = -1 with x >= 0
        let rows = vec![vec![rat_int(1)]];
        let rhs = vec![rat_int(-1)];
        let c = vec![rat_int(0)];
        assert_eq!(maximize(&rows, &rhs, &c), LpOutcome::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        // max x st x - y = 1
        let rows = vec![vec![rat_int(1), rat_int(-1)]];
        let rhs = vec![rat_int(1)];
        let c = vec![rat_int(1), rat_int(0)];
        assert_eq!(maximize(&rows, &rhs, &c), LpOutcome::Unbounded);
    }

    #[test]
    fn fractional_optimum_is_exact() {
        // max y st 3y = 1
        let rows = vec![vec![rat_int(3)]];
        let rhs = vec![rat_int(1)];
        let c = vec![rat_int(1)];
        match maximize(&rows, &rhs, &c) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(1, 3)),
            other => panic!("{other:?}"),
        }
    }
}
