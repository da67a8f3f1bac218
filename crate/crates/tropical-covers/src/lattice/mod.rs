//! Exact integer/rational linear algebra for the distance-map ambient
//! lattice, cones, fans, weighted stellar subdivision, and balancing.
//!
//! Ambient coordinates are indexed by unordered pairs `(i,j)`, `i < j`, of
//! leaf labels in lexicographic order.  Classes live in the quotient of
//! `Z^(n choose 2)` by the saturation of the lineality lattice spanned by
//! the vectors `L_i` (1 at every pair containing `i`).  The quotient map
//! is computed once per `n` by integer normal-form reduction and cached in
//! a [`QuotientLattice`].

pub mod fan;
pub mod fm;
pub mod linalg;
pub mod snf;

use crate::error::{Error, Result};
use crate::trees::Split;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;

pub use fan::{Cone, Fan};
pub use linalg::Rat;

/// Integer vector in pair coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct AmbientVector {
    pub n: usize,
    pub coords: Vec<BigInt>,
}

impl AmbientVector {
    pub fn zero(n: usize) -> Self {
        AmbientVector { n, coords: vec![BigInt::zero(); n * (n - 1) / 2] }
    }

    pub fn from_i64(n: usize, coords: Vec<i64>) -> Self {
        AmbientVector { n, coords: coords.into_iter().map(BigInt::from).collect() }
    }

    /// Index of pair `(i,j)` with `1 <= i < j <= n` in lexicographic order.
    pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
        assert!(i >= 1 && i < j && j <= n);
        // pairs (1,2),(1,3),...,(1,n),(2,3),...
        (i - 1) * n - (i - 1) * i / 2 + (j - i) - 1
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.coords[Self::pair_index(self.n, i, j)]
    }

    pub fn add(&self, other: &AmbientVector) -> AmbientVector {
        assert_eq!(self.n, other.n);
        AmbientVector {
            n: self.n,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> AmbientVector {
        AmbientVector { n: self.n, coords: self.coords.iter().map(|a| a * k).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }
}

impl fmt::Debug for AmbientVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// The ray `v_I`: coordinate 1 at every pair separated by the split.
pub fn split_ray(split: &Split, n: usize) -> Result<AmbientVector> {
    if split.n() != n {
        return Err(Error::InvalidInput(format!(
            "split over {} labels used with n={n}",
            split.n()
        )));
    }
    let mut v = AmbientVector::zero(n);
    for i in 1..=n {
        for j in (i + 1)..=n {
            if split.separates(i, j) {
                v.coords[AmbientVector::pair_index(n, i, j)] = BigInt::one();
            }
        }
    }
    Ok(v)
}

/// `L_1..L_n`: `L_i` has coordinate 1 at every pair containing `i`.
pub fn lineality_basis(n: usize) -> Vec<AmbientVector> {
    (1..=n)
        .map(|i| {
            let mut v = AmbientVector::zero(n);
            for j in 1..=n {
                if j != i {
                    let (a, b) = if i < j { (i, j) } else { (j, i) };
                    v.coords[AmbientVector::pair_index(n, a, b)] = BigInt::one();
                }
            }
            v
        })
        .collect()
}

/// Cached quotient of the pair lattice by the lineality span.
///
/// Class equality is decided in the saturated quotient.  Integrality and
/// primitivity, however, are decided in the moduli lattice: the sublattice
/// generated by the split rays, which is the image of the integer-length
/// metric trees.  In the saturated quotient every `v_I` is divisible by 2
/// (`v_I = sum_{i in I} L_i - 2 chi_I`); the split-ray lattice is the
/// convention that makes the `v_I` primitive and the tree fan balanced
/// with unit weights.
pub struct QuotientLattice {
    n: usize,
    quotient: snf::LatticeQuotient,
    /// Basis of the split-ray lattice, in saturated-quotient coordinates.
    basis: Vec<Vec<BigInt>>,
    /// Inverse of the basis column matrix, for rational coordinates.
    basis_inv: Vec<Vec<Rat>>,
    /// Ambient representatives of the basis classes.
    basis_reps: Vec<AmbientVector>,
}

impl QuotientLattice {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidInput(format!(
                "quotient lattice needs n >= 4, got {n}"
            )));
        }
        let ambient_dim = n * (n - 1) / 2;
        let gens: Vec<Vec<BigInt>> = lineality_basis(n).into_iter().map(|v| v.coords).collect();
        let quotient = snf::LatticeQuotient::new(ambient_dim, &gens);
        debug_assert_eq!(quotient.rank, n);
        let dim = quotient.quotient_dim();

        // split-ray lattice basis via integer row reduction
        let splits = Split::all(n);
        let rows: Vec<Vec<BigInt>> = splits
            .iter()
            .map(|s| {
                let v = split_ray(s, n).expect("valid split");
                quotient.project(&v.coords)
            })
            .collect();
        let red = snf::row_reduce(&rows);
        if red.rank != dim {
            return Err(Error::Internal(format!(
                "split rays span rank {} inside quotient dimension {dim}",
                red.rank
            )));
        }
        let basis: Vec<Vec<BigInt>> = red.echelon[..dim].to_vec();
        let basis_reps: Vec<AmbientVector> = (0..dim)
            .map(|i| {
                let mut rep = AmbientVector::zero(n);
                for (j, s) in splits.iter().enumerate() {
                    if !red.u[i][j].is_zero() {
                        let v = split_ray(s, n).expect("valid split");
                        rep = rep.add(&v.scale(&red.u[i][j]));
                    }
                }
                rep
            })
            .collect();
        // rational inverse of the column matrix of the basis
        let cols: Vec<Vec<Rat>> = basis.iter().map(|b| linalg::rat_vec_int(b)).collect();
        let mut basis_inv = Vec::with_capacity(dim);
        for i in 0..dim {
            let e: Vec<Rat> = (0..dim)
                .map(|j| if i == j { linalg::rat(1) } else { Rat::zero() })
                .collect();
            let col = linalg::solve_columns(&cols, &e)
                .ok_or_else(|| Error::Internal("split-ray basis is singular".into()))?;
            basis_inv.push(col);
        }
        // basis_inv currently holds, per quotient coordinate i, the basis
        // coordinates of the i-th unit vector; transpose into row form
        let basis_inv: Vec<Vec<Rat>> = (0..dim)
            .map(|r| (0..dim).map(|c| basis_inv[c][r].clone()).collect())
            .collect();
        Ok(QuotientLattice { n, quotient, basis, basis_inv, basis_reps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the quotient: `C(n,2) - n`.
    pub fn dim(&self) -> usize {
        self.quotient.quotient_dim()
    }

    /// Saturated-quotient coordinates; exact class identity.
    pub fn project(&self, v: &AmbientVector) -> Vec<BigInt> {
        assert_eq!(v.n, self.n);
        self.quotient.project(&v.coords)
    }

    /// Integral ambient representative of saturated class coordinates.
    pub fn lift(&self, class: &[BigInt]) -> AmbientVector {
        AmbientVector { n: self.n, coords: self.quotient.lift(class) }
    }

    /// Rational coordinates in the split-ray lattice basis.
    pub fn lattice_coords(&self, v: &AmbientVector) -> Vec<Rat> {
        let sat = linalg::rat_vec_int(&self.project(v));
        self.basis_inv
            .iter()
            .map(|row| row.iter().zip(&sat).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Integer coordinates in the split-ray lattice, when the class lies
    /// in it.
    pub fn lattice_coords_int(&self, v: &AmbientVector) -> Result<Vec<BigInt>> {
        let c = self.lattice_coords(v);
        c.iter()
            .map(|x| {
                if x.is_integer() {
                    Ok(x.to_integer())
                } else {
                    Err(Error::Internal(
                        "class lies outside the split-ray lattice".into(),
                    ))
                }
            })
            .collect()
    }

    /// Ambient representative of integer split-ray-lattice coordinates.
    pub fn rep_from_lattice_coords(&self, c: &[BigInt]) -> AmbientVector {
        let mut rep = AmbientVector::zero(self.n);
        for (ci, b) in c.iter().zip(&self.basis_reps) {
            if !ci.is_zero() {
                rep = rep.add(&b.scale(ci));
            }
        }
        rep
    }

    pub fn class(&self, v: &AmbientVector) -> QuotientVector {
        QuotientVector { rep: v.clone(), phi: self.project(v) }
    }
}

/// A class in the quotient lattice, carrying an integral ambient
/// representative and its projected coordinates.
#[derive(Clone)]
pub struct QuotientVector {
    rep: AmbientVector,
    phi: Vec<BigInt>,
}

impl QuotientVector {
    pub fn n(&self) -> usize {
        self.rep.n
    }

    pub fn representative(&self) -> &AmbientVector {
        &self.rep
    }

    pub fn class_coords(&self) -> &[BigInt] {
        &self.phi
    }

    pub fn is_zero_class(&self) -> bool {
        self.phi.iter().all(|x| x.is_zero())
    }

    /// Primitive key: class coordinates divided by their gcd.  Two classes
    /// share a key iff they agree up to positive rational scaling modulo
    /// lineality.
    pub fn primitive_key(&self) -> Vec<BigInt> {
        let g = snf::gcd_of(&self.phi);
        if g.is_zero() {
            return self.phi.clone();
        }
        // keep orientation: gcd is positive, so signs survive
        self.phi.iter().map(|x| x / &g).collect()
    }
}

impl fmt::Debug for QuotientVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QVec{:?}", self.rep)
    }
}

/// Exact equality of classes modulo the lineality span.
pub fn eq_mod_lineality(ctx: &QuotientLattice, a: &QuotientVector, b: &QuotientVector) -> Result<bool> {
    if a.n() != b.n() || a.n() != ctx.n() {
        return Err(Error::InvalidInput("mismatched label counts".into()));
    }
    Ok(a.phi == b.phi)
}

/// Scales the class of `v` by the smallest positive rational making it an
/// integral class of the split-ray lattice, and returns that primitive
/// class.
pub fn primitive(ctx: &QuotientLattice, v: &AmbientVector) -> Result<QuotientVector> {
    let c = ctx.lattice_coords(v);
    if c.iter().all(|x| x.is_zero()) {
        return Err(Error::ZeroClass(
            "vector lies in the lineality span".into(),
        ));
    }
    let ints = linalg::clear_denominators(&c);
    let g = snf::gcd_of(&ints);
    let reduced: Vec<BigInt> = ints.iter().map(|x| x / &g).collect();
    let rep = ctx.rep_from_lattice_coords(&reduced);
    let phi = ctx.project(&rep);
    Ok(QuotientVector { rep, phi })
}

/// Decides `v in cone(rays)` by an exact rational solve; the cone must be
/// simplicial.
pub fn cone_contains(ctx: &QuotientLattice, cone: &Cone, v: &QuotientVector) -> Result<bool> {
    if !cone.is_simplicial(ctx)? {
        return Err(Error::Unsupported("containment needs a simplicial cone".into()));
    }
    let cols: Vec<Vec<Rat>> = cone
        .rays()
        .iter()
        .map(|r| linalg::rat_vec_int(r.class_coords()))
        .collect();
    let b = linalg::rat_vec_int(v.class_coords());
    match linalg::solve_columns(&cols, &b) {
        None => Ok(false),
        Some(lambda) => Ok(lambda.iter().all(|x| !x.is_negative())),
    }
}

/// Rational class coordinates scaled to a primitive integer vector; used
/// for keys of rational directions.
pub fn primitive_int_direction(v: &[Rat]) -> Vec<BigInt> {
    let ints = linalg::clear_denominators(v);
    let g = snf::gcd_of(&ints);
    if g.is_zero() {
        ints
    } else {
        ints.iter().map(|x| x / &g).collect()
    }
}

pub fn rat_from_bigint(x: &BigInt) -> BigRational {
    BigRational::from(x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::Split;

    #[test]
    fn pair_indexing_is_lex() {
        assert_eq!(AmbientVector::pair_index(4, 1, 2), 0);
        assert_eq!(AmbientVector::pair_index(4, 1, 3), 1);
        assert_eq!(AmbientVector::pair_index(4, 1, 4), 2);
        assert_eq!(AmbientVector::pair_index(4, 2, 3), 3);
        assert_eq!(AmbientVector::pair_index(4, 2, 4), 4);
        assert_eq!(AmbientVector::pair_index(4, 3, 4), 5);
    }

    #[test]
    fn split_ray_n4() {
        let s = Split::new(4, &[1, 2]).unwrap();
        let v = split_ray(&s, 4).unwrap();
        // 1 at (1,3),(1,4),(2,3),(2,4); 0 at (1,2),(3,4)
        assert_eq!(
            v.coords.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            vec!["0", "1", "1", "1", "1", "0"]
        );
    }

    #[test]
    fn split_ray_n6_pair_count() {
        let s = Split::new(6, &[5, 6]).unwrap();
        let v = split_ray(&s, 6).unwrap();
        let ones: usize = v.coords.iter().filter(|x| **x == BigInt::one()).count();
        assert_eq!(ones, 8);
        for i in 1..=6 {
            for j in (i + 1)..=6 {
                let sep = (i >= 5) != (j >= 5);
                assert_eq!(*v.get(i, j) == BigInt::one(), sep);
            }
        }
    }

    #[test]
    fn split_ray_addition_identity_n4() {
        // v_{12} + v_{34} = all-ones - ... verified entrywise by addition
        let a = split_ray(&Split::new(4, &[1, 2]).unwrap(), 4).unwrap();
        let b = split_ray(&Split::new(4, &[3, 4]).unwrap(), 4).unwrap();
        let sum = a.add(&b);
        // both splits separate the same pairs, so the sum doubles them
        assert_eq!(
            sum.coords.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            vec!["0", "2", "2", "2", "2", "0"]
        );
    }

    #[test]
    fn lineality_basis_shape() {
        let basis = lineality_basis(4);
        let l1 = &basis[0];
        assert_eq!(
            l1.coords.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            vec!["1", "1", "1", "0", "0", "0"]
        );
        // sum of all L_i is twice the all-ones vector
        let mut sum = AmbientVector::zero(4);
        for l in &basis {
            sum = sum.add(l);
        }
        assert!(sum.coords.iter().all(|x| *x == BigInt::from(2)));
    }

    #[test]
    fn lineality_rank_is_n() {
        for n in 4..=6 {
            let gens: Vec<Vec<BigInt>> =
                lineality_basis(n).into_iter().map(|v| v.coords).collect();
            assert_eq!(linalg::rank_int(&gens), n);
        }
    }

    #[test]
    fn quotient_distinguishes_splits() {
        let ctx = QuotientLattice::new(6).unwrap();
        let a = ctx.class(&split_ray(&Split::new(6, &[1, 4]).unwrap(), 6).unwrap());
        let b = ctx.class(&split_ray(&Split::new(6, &[1, 3, 4]).unwrap(), 6).unwrap());
        assert!(!eq_mod_lineality(&ctx, &a, &b).unwrap());
        assert!(eq_mod_lineality(&ctx, &a, &a).unwrap());
    }

    #[test]
    fn lineality_translation_invisible() {
        let ctx = QuotientLattice::new(5).unwrap();
        let v = split_ray(&Split::new(5, &[1, 2]).unwrap(), 5).unwrap();
        let l1 = &lineality_basis(5)[0];
        let a = ctx.class(&v);
        let b = ctx.class(&v.add(l1));
        assert!(eq_mod_lineality(&ctx, &a, &b).unwrap());
    }

    #[test]
    fn split_rays_are_primitive_for_n5() {
        let ctx = QuotientLattice::new(5).unwrap();
        for s in Split::all(5) {
            let v = split_ray(&s, 5).unwrap();
            let p = primitive(&ctx, &v).unwrap();
            assert!(eq_mod_lineality(&ctx, &p, &ctx.class(&v)).unwrap(), "split {s:?}");
        }
    }

    #[test]
    fn primitive_strips_scaling() {
        let ctx = QuotientLattice::new(4).unwrap();
        let v = split_ray(&Split::new(4, &[1, 2]).unwrap(), 4).unwrap();
        let p3 = primitive(&ctx, &v.scale(&BigInt::from(3))).unwrap();
        assert!(eq_mod_lineality(&ctx, &p3, &ctx.class(&v)).unwrap());
    }

    #[test]
    fn primitive_rejects_lineality_span() {
        let ctx = QuotientLattice::new(4).unwrap();
        let l1 = &lineality_basis(4)[0];
        assert!(matches!(primitive(&ctx, l1), Err(Error::ZeroClass(_))));
    }

    #[test]
    fn m04_rays_sum_to_lineality() {
        let ctx = QuotientLattice::new(4).unwrap();
        let mut sum = AmbientVector::zero(4);
        for labels in [[1usize, 2], [1, 3], [1, 4]] {
            sum = sum.add(&split_ray(&Split::new(4, &labels).unwrap(), 4).unwrap());
        }
        assert!(ctx.class(&sum).is_zero_class());
    }
}
