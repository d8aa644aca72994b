//! Exact rational linear algebra: Gaussian elimination and a small dense
//! two-phase simplex with Bland's rule. All pivoting is over `BigRational`,
//! so feasibility answers are exact.

use crate::angle::Rat;
use num_traits::{One, Signed, Zero};

/// Dense rational matrix as rows of equal length.
pub type Mat = Vec<Vec<Rat>>;

/// Reduces `rows` to reduced row echelon form in place; returns the pivot
/// column of each pivot row.
pub fn rref(rows: &mut Mat) -> Vec<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return vec![];
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x / &inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let sub = &f * &rows[r][j];
                    rows[i][j] = &rows[i][j] - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the nullspace of `a` (list of vectors x with a·x = 0).
pub fn nullspace(a: &Mat) -> Vec<Vec<Rat>> {
    if a.is_empty() {
        return vec![];
    }
    let ncols = a[0].len();
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Rat::zero(); ncols];
        v[f] = Rat::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[row][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves a·x = b; returns any solution or None if inconsistent.
pub fn solve(a: &Mat, b: &[Rat]) -> Option<Vec<Rat>> {
    if a.is_empty() {
        return if b.iter().all(|x| x.is_zero()) {
            Some(vec![])
        } else {
            None
        };
    }
    let ncols = a[0].len();
    let mut aug: Mat = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    // A pivot in the augmented column means the system is inconsistent.
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![Rat::zero(); ncols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][ncols].clone();
    }
    Some(x)
}

/// Result of [`simplex_max`].
#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    /// Optimal value and an optimal point.
    Optimal { value: Rat, point: Vec<Rat> },
    Infeasible,
    Unbounded,
}

/// Maximizes c·x subject to A·x = b, x >= 0, via the two-phase dense
/// simplex with Bland's rule. `b` entries may be negative (rows are flipped
/// internally).
pub fn simplex_max(a: &Mat, b: &[Rat], c: &[Rat]) -> LpResult {
    let m = a.len();
    let n = if m > 0 { a[0].len() } else { c.len() };
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);

    // Tableau with one artificial variable per row.
    // Columns: n structural, m artificial, then RHS.
    let total = n + m;
    let mut t: Mat = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Rat> = a[i].clone();
        row.resize(total + 1, Rat::zero());
        row[total] = b[i].clone();
        if row[total].is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        row[n + i] = Rat::one();
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: minimize the sum of artificials.
    let mut obj = vec![Rat::zero(); total + 1];
    for i in 0..m {
        for j in 0..=total {
            let add = t[i][j].clone();
            obj[j] = &obj[j] + add;
        }
    }
    // obj now holds sum of rows; zero out the artificial columns so the
    // row expresses w + sum(obj[j]*x_j) = obj[rhs] with w the artificial
    // sum and the basic (artificial) columns reduced. Artificials never
    // re-enter: the entering scan is limited to the structural columns.
    for j in n..total {
        obj[j] = Rat::zero();
    }
    if !pivot_until_done(&mut t, &mut basis, &mut obj, n, true) {
        return LpResult::Infeasible; // cannot happen in phase 1
    }
    if !obj[total].is_zero() {
        return LpResult::Infeasible;
    }
    // Drive remaining artificials out of the basis where possible.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                do_pivot(&mut t, &mut basis, &mut obj, i, j, total);
            }
            // A row whose structural part is all zero is redundant; its
            // artificial stays basic at value zero, which is harmless.
        }
    }

    // Phase 2: maximize c·x, i.e. minimize -c·x. The objective row keeps
    // the invariant z + sum(obj2[j]*x_j) = obj2[rhs] with z the minimized
    // objective, so entering a column with positive entry decreases z.
    let mut obj2 = vec![Rat::zero(); total + 1];
    for j in 0..n {
        obj2[j] = c[j].clone();
    }
    for i in 0..m {
        let bi = basis[i];
        if bi < n && !obj2[bi].is_zero() {
            let f = obj2[bi].clone();
            for j in 0..=total {
                let sub = &f * &t[i][j];
                obj2[j] = &obj2[j] - sub;
            }
        }
    }
    // Forbid artificial columns from re-entering.
    if !pivot_until_done(&mut t, &mut basis, &mut obj2, n, true) {
        return LpResult::Unbounded;
    }

    let mut x = vec![Rat::zero(); n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][total].clone();
        }
    }
    let value = c
        .iter()
        .zip(&x)
        .fold(Rat::zero(), |acc, (ci, xi)| acc + ci * xi);
    LpResult::Optimal { value, point: x }
}

/// Bland's-rule pivot loop. Entering columns are restricted to `< limit`.
/// Returns false when the objective is unbounded.
fn pivot_until_done(
    t: &mut Mat,
    basis: &mut Vec<usize>,
    obj: &mut Vec<Rat>,
    limit: usize,
    _minimize: bool,
) -> bool {
    let total = t.first().map(|r| r.len() - 1).unwrap_or(0);
    loop {
        // Bland: first column with positive reduced value (we keep the
        // convention that a positive obj entry improves the objective).
        let Some(enter) = (0..limit).find(|&j| obj[j].is_positive()) else {
            return true;
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for i in 0..t.len() {
            if t[i][enter].is_positive() {
                let ratio = &t[i][total] / &t[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => &ratio < b || (&ratio == b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return false;
        };
        do_pivot(t, basis, obj, leave, enter, total);
    }
}

fn do_pivot(
    t: &mut Mat,
    basis: &mut [usize],
    obj: &mut [Rat],
    row: usize,
    col: usize,
    total: usize,
) {
    let inv = t[row][col].clone();
    for x in t[row].iter_mut() {
        *x = &*x / &inv;
    }
    for i in 0..t.len() {
        if i != row && !t[i][col].is_zero() {
            let f = t[i][col].clone();
            for j in 0..=total {
                let sub = &f * &t[row][j];
                t[i][j] = &t[i][j] - sub;
            }
        }
    }
    if !obj[col].is_zero() {
        let f = obj[col].clone();
        for j in 0..=total {
            let sub = &f * &t[row][j];
            obj[j] = &obj[j] - sub;
        }
    }
    basis[row] = col;
}
