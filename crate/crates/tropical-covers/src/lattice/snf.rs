//! Integer normal-form reduction with unimodular row transforms.
//!
//! `row_reduce` brings an integer matrix to row echelon form by Euclidean
//! row operations, tracking the transform `U` and its inverse.  The last
//! `rows - rank` rows of `U` give a surjection onto the quotient of the
//! ambient lattice by the saturation of the column span; this is the
//! normal-form computation behind primitivity and lineality quotients.

use num::BigInt;
use num::Signed;
use num::Zero;

pub type IMat = Vec<Vec<BigInt>>;

pub fn identity(k: usize) -> IMat {
    (0..k)
        .map(|i| (0..k).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

pub fn mat_vec(m: &IMat, x: &[BigInt]) -> Vec<BigInt> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub struct RowReduction {
    pub rank: usize,
    /// Unimodular `rows x rows` transform: `u * m` is in echelon form with
    /// the nonzero rows on top.
    pub u: IMat,
    /// Inverse of `u`.
    pub u_inv: IMat,
    /// The echelon form `u * m`.
    pub echelon: IMat,
}

/// Euclidean row reduction over the integers.
pub fn row_reduce(m: &IMat) -> RowReduction {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a = m.clone();
    let mut u = identity(rows);
    let mut u_inv = identity(rows);

    // row op: r_i += q * r_j  on a and u; inverse op on columns of u_inv
    let row_add = |a: &mut IMat, u: &mut IMat, u_inv: &mut IMat, i: usize, j: usize, q: &BigInt| {
        for col in 0..cols {
            let t = &a[j][col] * q;
            a[i][col] += t;
        }
        for col in 0..rows {
            let t = &u[j][col] * q;
            u[i][col] += t;
        }
        // (E_{ij}(q))^{-1} = E_{ij}(-q); right-multiplying u_inv by it
        // subtracts q * column_i from column_j
        for row in 0..rows {
            let t = &u_inv[row][i] * q;
            u_inv[row][j] -= t;
        }
    };
    let swap_rows = |a: &mut IMat, u: &mut IMat, u_inv: &mut IMat, i: usize, j: usize| {
        a.swap(i, j);
        u.swap(i, j);
        for row in u_inv.iter_mut() {
            row.swap(i, j);
        }
    };

    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        // Euclidean elimination in this column below pivot_row
        loop {
            // find row with smallest nonzero |entry|
            let mut best: Option<usize> = None;
            for r in pivot_row..rows {
                if !a[r][col].is_zero()
                    && best.map_or(true, |b| a[r][col].abs() < a[b][col].abs())
                {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            if b != pivot_row {
                swap_rows(&mut a, &mut u, &mut u_inv, pivot_row, b);
            }
            let mut done = true;
            for r in (pivot_row + 1)..rows {
                if !a[r][col].is_zero() {
                    let q = -(&a[r][col] / &a[pivot_row][col]);
                    row_add(&mut a, &mut u, &mut u_inv, r, pivot_row, &q);
                    if !a[r][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if !a[pivot_row][col].is_zero() {
            // normalize pivot sign
            if a[pivot_row][col].is_negative() {
                for c in 0..cols {
                    let v = -a[pivot_row][c].clone();
                    a[pivot_row][c] = v;
                }
                for c in 0..rows {
                    let v = -u[pivot_row][c].clone();
                    u[pivot_row][c] = v;
                    let w = -u_inv[c][pivot_row].clone();
                    u_inv[c][pivot_row] = w;
                }
            }
            pivot_row += 1;
        }
    }

    RowReduction { rank: pivot_row, u, u_inv, echelon: a }
}

/// Quotient of `Z^dim` by the saturation of the lattice generated by
/// `gens`.  `project` maps onto `Z^(dim - rank)` with kernel exactly the
/// saturation; `lift` is a right inverse.
pub struct LatticeQuotient {
    pub rank: usize,
    pub dim: usize,
    project: IMat,
    lift: IMat,
}

impl LatticeQuotient {
    pub fn new(dim: usize, gens: &[Vec<BigInt>]) -> Self {
        // columns are the generators
        let m: IMat = (0..dim)
            .map(|i| gens.iter().map(|g| g[i].clone()).collect())
            .collect();
        let red = row_reduce(&m);
        let project: IMat = red.u[red.rank..].to_vec();
        let lift: IMat = (0..dim)
            .map(|i| red.u_inv[i][red.rank..].to_vec())
            .collect();
        LatticeQuotient { rank: red.rank, dim, project, lift }
    }

    pub fn quotient_dim(&self) -> usize {
        self.dim - self.rank
    }

    pub fn project(&self, x: &[BigInt]) -> Vec<BigInt> {
        mat_vec(&self.project, x)
    }

    pub fn lift(&self, y: &[BigInt]) -> Vec<BigInt> {
        mat_vec(&self.lift, y)
    }
}

pub fn gcd_of(v: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for x in v {
        g = num::Integer::gcd(&g, x);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn reduction_transform_consistency() {
        let m = vec![
            vec![bi(2), bi(4)],
            vec![bi(6), bi(8)],
            vec![bi(10), bi(12)],
        ];
        let red = row_reduce(&m);
        // u * u_inv = I
        let rows = m.len();
        for i in 0..rows {
            for j in 0..rows {
                let s: BigInt = (0..rows).map(|k| &red.u[i][k] * &red.u_inv[k][j]).sum();
                assert_eq!(s, bi((i == j) as i64));
            }
        }
        // echelon = u * m
        for i in 0..rows {
            for j in 0..2 {
                let s: BigInt = (0..rows).map(|k| &red.u[i][k] * &m[k][j]).sum();
                assert_eq!(s, red.echelon[i][j]);
            }
        }
        assert_eq!(red.rank, 2);
        assert!(red.echelon[2].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn quotient_kills_saturation() {
        // sublattice spanned by (2,0,0) and (0,3,0); saturation is the
        // xy-plane lattice
        let gens = vec![vec![bi(2), bi(0), bi(0)], vec![bi(0), bi(3), bi(0)]];
        let q = LatticeQuotient::new(3, &gens);
        assert_eq!(q.quotient_dim(), 1);
        assert!(q.project(&[bi(1), bi(0), bi(0)]).iter().all(|x| x.is_zero()));
        assert!(q.project(&[bi(0), bi(1), bi(0)]).iter().all(|x| x.is_zero()));
        let z = q.project(&[bi(0), bi(0), bi(1)]);
        assert_eq!(gcd_of(&z), bi(1));
        // lift is a section
        let y = vec![bi(5)];
        assert_eq!(q.project(&q.lift(&y)), y);
    }
}
