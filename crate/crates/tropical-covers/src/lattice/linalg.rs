//! Exact rational linear algebra on small dense matrices.

use num::{BigInt, BigRational, Zero};

pub type Rat = BigRational;
pub type QMat = Vec<Vec<Rat>>;

pub fn rat(v: i64) -> Rat {
    Rat::from(BigInt::from(v))
}

pub fn rat_vec_int(v: &[BigInt]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from(x.clone())).collect()
}

/// Reduced row echelon form in place; returns pivot column per row.
pub fn rref(a: &mut QMat) -> Vec<usize> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].clone();
        for x in a[r].iter_mut() {
            *x = &*x / &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &a[r][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &QMat) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

pub fn rank_int(a: &[Vec<BigInt>]) -> usize {
    let m: QMat = a.iter().map(|row| rat_vec_int(row)).collect();
    rank(&m)
}

/// Solves `A x = b` exactly; `A` given by columns.  Returns `None` when
/// inconsistent.  When the columns are dependent, some solution is
/// returned with free variables set to zero.
pub fn solve_columns(cols: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let nrows = b.len();
    let ncols = cols.len();
    let mut aug: QMat = (0..nrows)
        .map(|i| {
            let mut row: Vec<Rat> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    // inconsistency: pivot in the augmented column
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![Rat::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][ncols].clone();
    }
    Some(x)
}

/// Basis of the kernel of `A` (rows are the functionals).
pub fn kernel_basis(a: &QMat, nvars: usize) -> Vec<Vec<Rat>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..nvars {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); nvars];
        v[free] = rat(1);
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Determinant of a square rational matrix.
pub fn det(a: &QMat) -> Rat {
    let n = a.len();
    let mut m = a.clone();
    let mut d = rat(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return Rat::zero() };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c].clone();
        let inv = m[c][c].clone();
        for j in c..n {
            let t = &m[c][j] / &inv;
            m[c][j] = t;
        }
        for i in (c + 1)..n {
            if !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..n {
                    let t = &m[c][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
    }
    d
}

/// Clears denominators: returns the integer vector `lambda * v` with the
/// smallest positive `lambda` making every entry integral.
pub fn clear_denominators(v: &[Rat]) -> Vec<BigInt> {
    let mut l = BigInt::from(1);
    for x in v {
        l = num::Integer::lcm(&l, x.denom());
    }
    v.iter()
        .map(|x| {
            let scaled = x * Rat::from(l.clone());
            debug_assert!(scaled.is_integer());
            scaled.to_integer()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_unique() {
        let cols = vec![vec![rat(1), rat(0)], vec![rat(1), rat(2)]];
        let x = solve_columns(&cols, &[rat(3), rat(4)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(2)]);
    }

    #[test]
    fn solve_inconsistent() {
        let cols = vec![vec![rat(1), rat(2)]];
        assert!(solve_columns(&cols, &[rat(1), rat(3)]).is_none());
    }

    #[test]
    fn kernel_of_sum_functional() {
        let a = vec![vec![rat(1), rat(1), rat(1)]];
        let k = kernel_basis(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: Rat = v.iter().cloned().sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn det_small() {
        let a = vec![vec![rat(2), rat(1)], vec![rat(1), rat(1)]];
        assert_eq!(det(&a), rat(1));
    }
}
