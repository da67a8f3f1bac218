//! Simplicial cones and fans in the quotient lattice, with weighted
//! stellar subdivision, exact subdivision certificates and balancing.

use super::fm::{feasible, Constraint};
use super::linalg::{self, Rat};
use super::snf::{self, LatticeQuotient};
use super::{primitive, QuotientLattice, QuotientVector};
use crate::error::{Error, Result};
use num::{BigInt, Signed, Zero};
use std::collections::BTreeMap;

/// A polyhedral cone given by ray generators (classes mod lineality).
#[derive(Clone, Debug)]
pub struct Cone {
    rays: Vec<QuotientVector>,
}

impl Cone {
    pub fn new(rays: Vec<QuotientVector>) -> Self {
        Cone { rays }
    }

    pub fn rays(&self) -> &[QuotientVector] {
        &self.rays
    }

    pub fn dim_bound(&self) -> usize {
        self.rays.len()
    }

    /// Rays linearly independent modulo lineality.
    pub fn is_simplicial(&self, _ctx: &QuotientLattice) -> Result<bool> {
        let m: Vec<Vec<BigInt>> = self.rays.iter().map(|r| r.class_coords().to_vec()).collect();
        Ok(linalg::rank_int(&m) == self.rays.len())
    }
}

/// A fan stored as deduplicated primitive rays plus maximal cones (sorted
/// ray-index lists).  Weights, when present, are aligned with the maximal
/// cones.
#[derive(Clone, Debug)]
pub struct Fan {
    n: usize,
    rays: Vec<QuotientVector>,
    keys: Vec<Vec<BigInt>>,
    cones: Vec<Vec<usize>>,
    weights: Option<Vec<u64>>,
}

impl Fan {
    pub fn new(n: usize) -> Self {
        Fan { n, rays: Vec::new(), keys: Vec::new(), cones: Vec::new(), weights: None }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rays(&self) -> &[QuotientVector] {
        &self.rays
    }

    pub fn maximal_cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn weights(&self) -> Option<&[u64]> {
        self.weights.as_deref()
    }

    pub fn weight_of(&self, cone_idx: usize) -> u64 {
        self.weights.as_ref().map_or(1, |w| w[cone_idx])
    }

    pub fn set_unit_weights(&mut self) {
        self.weights = Some(vec![1; self.cones.len()]);
    }

    pub fn cone(&self, idx: usize) -> Cone {
        Cone::new(self.cones[idx].iter().map(|&i| self.rays[i].clone()).collect())
    }

    /// Interns a ray (made primitive) and returns its index.
    pub fn add_ray(&mut self, ctx: &QuotientLattice, ray: &QuotientVector) -> Result<usize> {
        let prim = primitive(ctx, ray.representative())?;
        let key = prim.class_coords().to_vec();
        if let Some(i) = self.keys.iter().position(|k| *k == key) {
            return Ok(i);
        }
        self.rays.push(prim);
        self.keys.push(key);
        Ok(self.rays.len() - 1)
    }

    pub fn find_ray(&self, ctx: &QuotientLattice, ray: &QuotientVector) -> Result<Option<usize>> {
        let prim = primitive(ctx, ray.representative())?;
        let key = prim.class_coords().to_vec();
        Ok(self.keys.iter().position(|k| *k == key))
    }

    /// Adds a maximal cone; rays are interned, simpliciality is enforced.
    pub fn add_cone(
        &mut self,
        ctx: &QuotientLattice,
        rays: &[QuotientVector],
        weight: Option<u64>,
    ) -> Result<usize> {
        let mut idx: Vec<usize> = rays
            .iter()
            .map(|r| self.add_ray(ctx, r))
            .collect::<Result<_>>()?;
        idx.sort_unstable();
        idx.dedup();
        if idx.len() != rays.len() {
            return Err(Error::InvalidInput(
                "cone has parallel ray generators".into(),
            ));
        }
        let m: Vec<Vec<BigInt>> = idx.iter().map(|&i| self.keys[i].clone()).collect();
        if linalg::rank_int(&m) != idx.len() {
            return Err(Error::InvalidInput(
                "cone generators are dependent modulo lineality".into(),
            ));
        }
        self.cones.push(idx);
        if let Some(w) = weight {
            if w == 0 {
                return Err(Error::InvalidWeight("zero weight".into()));
            }
            self.weights.get_or_insert_with(Vec::new).push(w);
        } else if let Some(ws) = self.weights.as_mut() {
            ws.push(1);
        }
        Ok(self.cones.len() - 1)
    }

    pub fn is_pure(&self) -> bool {
        match self.cones.first() {
            None => true,
            Some(first) => self.cones.iter().all(|c| c.len() == first.len()),
        }
    }

    /// Codimension-1 faces of the maximal cones, each with the list of
    /// maximal cones containing it.
    pub fn codim1_faces(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, cone) in self.cones.iter().enumerate() {
            for omit in 0..cone.len() {
                let face: Vec<usize> = cone
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != omit)
                    .map(|(_, &r)| r)
                    .collect();
                map.entry(face).or_default().push(ci);
            }
        }
        map.into_iter().collect()
    }
}

/// The new ray of a weighted stellar subdivision at `face`, as an
/// ambient-vector class: the weighted sum of the primitive face rays.
pub fn weighted_ray(
    ctx: &QuotientLattice,
    face: &[QuotientVector],
    weights: &[i64],
) -> Result<QuotientVector> {
    if face.len() != weights.len() || face.is_empty() {
        return Err(Error::InvalidWeight(format!(
            "{} weights for a {}-ray face",
            weights.len(),
            face.len()
        )));
    }
    if weights.iter().any(|&w| w <= 0) {
        return Err(Error::InvalidWeight("weights must be positive".into()));
    }
    let mut sum = super::AmbientVector::zero(ctx.n());
    for (r, &w) in face.iter().zip(weights) {
        let prim = primitive(ctx, r.representative())?;
        sum = sum.add(&prim.representative().scale(&BigInt::from(w)));
    }
    Ok(ctx.class(&sum))
}

/// Weighted stellar subdivision of a fan at a simplicial face.
///
/// Every cone containing the face is replaced by the cones generated by
/// subsets of `{v_w} + generators` that do not contain the whole face;
/// cones not containing the face are unchanged.  Subdivided cones inherit
/// their parent's weight.
pub fn stellar_subdivide(
    ctx: &QuotientLattice,
    fan: &Fan,
    face: &[QuotientVector],
    weights: &[i64],
) -> Result<Fan> {
    let face_idx: Vec<usize> = face
        .iter()
        .map(|r| {
            fan.find_ray(ctx, r)?
                .ok_or_else(|| Error::InvalidFace("face ray not in fan".into()))
        })
        .collect::<Result<_>>()?;
    let touches = fan
        .cones
        .iter()
        .any(|c| face_idx.iter().all(|i| c.contains(i)));
    if !touches {
        return Err(Error::InvalidFace(
            "face is not a face of any cone of the fan".into(),
        ));
    }
    let v_w = weighted_ray(ctx, face, weights)?;

    let mut out = Fan::new(fan.n);
    if fan.weights.is_some() {
        out.weights = Some(Vec::new());
    }
    for (ci, cone) in fan.cones.iter().enumerate() {
        let w = fan.weights.as_ref().map(|ws| ws[ci]);
        if face_idx.iter().all(|i| cone.contains(i)) {
            for &omit in &face_idx {
                let mut rays: Vec<QuotientVector> = cone
                    .iter()
                    .filter(|&&r| r != omit)
                    .map(|&r| fan.rays[r].clone())
                    .collect();
                rays.push(v_w.clone());
                out.add_cone(ctx, &rays, w)?;
            }
        } else {
            let rays: Vec<QuotientVector> =
                cone.iter().map(|&r| fan.rays[r].clone()).collect();
            out.add_cone(ctx, &rays, w)?;
        }
    }
    Ok(out)
}

/// Coordinates of the fine-cone rays in the coarse-ray basis, or `None`
/// when a ray leaves the span.
fn coarse_coordinates(
    coarse: &[QuotientVector],
    fine: &[QuotientVector],
) -> Option<Vec<Vec<Rat>>> {
    let cols: Vec<Vec<Rat>> = coarse
        .iter()
        .map(|r| linalg::rat_vec_int(r.class_coords()))
        .collect();
    fine.iter()
        .map(|r| linalg::solve_columns(&cols, &linalg::rat_vec_int(r.class_coords())))
        .collect()
}

/// Strict interior intersection test for two full-dimensional simplicial
/// cones given by ray coordinates in a common d-dimensional basis.
fn interiors_meet(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Result<bool> {
    let d = a.len();
    // x in int(cone) iff the solve for barycentric coords is > 0; express
    // x = A u with u > 0 and x = B v with v > 0, i.e. A u - B v = 0.
    // Variables (u, v) in R^{2d}, strict positivity, homogeneous equality.
    // Substitute the equalities away by eliminating x: treat u free and
    // solve v from B v = A u row by row is not direct; use FM on (u,v).
    let mut constraints = Vec::new();
    for i in 0..2 * d {
        let mut c = vec![Rat::zero(); 2 * d];
        c[i] = linalg::rat(1);
        constraints.push(Constraint::gt(c, Rat::zero()));
    }
    // equalities A u = B v as pairs of inequalities
    for row in 0..a[0].len() {
        let mut c = vec![Rat::zero(); 2 * d];
        for j in 0..d {
            c[j] = a[j][row].clone();
            c[d + j] = -b[j][row].clone();
        }
        constraints.push(Constraint::ge(c.clone(), Rat::zero()));
        let neg: Vec<Rat> = c.iter().map(|x| -x.clone()).collect();
        constraints.push(Constraint::ge(neg, Rat::zero()));
    }
    Ok(feasible(constraints, 2 * d))
}

/// Normalized simplex volume of a simplicial cone with ray coordinates
/// `coords` (all nonnegative, in the coarse basis).
fn simplex_volume(coords: &[Vec<Rat>]) -> Result<Rat> {
    let d = coords.len();
    let mut verts = Vec::with_capacity(d);
    for c in coords {
        let s: Rat = c.iter().cloned().sum();
        if !s.is_positive() {
            return Err(Error::Internal("zero ray in volume computation".into()));
        }
        let v: Vec<Rat> = c.iter().map(|x| x / &s).collect();
        verts.push(v);
    }
    if d == 1 {
        return Ok(linalg::rat(1));
    }
    // drop the last coordinate (affine chart of the simplex)
    let mat: Vec<Vec<Rat>> = (1..d)
        .map(|i| {
            (0..d - 1)
                .map(|j| &verts[i][j] - &verts[0][j])
                .collect()
        })
        .collect();
    Ok(linalg::det(&mat).abs())
}

/// Exact subdivision certificate: every maximal cone of `fine` lies in
/// `coarse`, interiors are pairwise disjoint, and the union covers
/// `coarse`.
pub fn is_subdivision(ctx: &QuotientLattice, fine: &Fan, coarse: &Cone) -> Result<bool> {
    if !coarse.is_simplicial(ctx)? {
        return Err(Error::Unsupported("coarse cone must be simplicial".into()));
    }
    let d = coarse.rays().len();
    if fine.maximal_cones().is_empty() {
        return Ok(false);
    }
    let mut all_coords = Vec::new();
    for cone in fine.maximal_cones() {
        if cone.len() != d {
            return Ok(false);
        }
        let rays: Vec<QuotientVector> = cone.iter().map(|&i| fine.rays()[i].clone()).collect();
        match coarse_coordinates(coarse.rays(), &rays) {
            None => return Ok(false),
            Some(coords) => {
                if coords.iter().any(|c| c.iter().any(|x| x.is_negative())) {
                    return Ok(false);
                }
                all_coords.push(coords);
            }
        }
    }
    // pairwise disjoint interiors
    for i in 0..all_coords.len() {
        for j in (i + 1)..all_coords.len() {
            if interiors_meet(&all_coords[i], &all_coords[j])? {
                return Ok(false);
            }
        }
    }
    // covering by exact volume bookkeeping
    let total: Rat = {
        let identity: Vec<Vec<Rat>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { linalg::rat(1) } else { Rat::zero() })
                    .collect()
            })
            .collect();
        simplex_volume(&identity)?
    };
    let mut sum = Rat::zero();
    for coords in &all_coords {
        sum += simplex_volume(coords)?;
    }
    Ok(sum == total)
}

/// Whether two maximal cones of a fan meet in a common face, decided by
/// searching for an exact separating functional.
fn cones_meet_in_common_face(
    fan: &Fan,
    a: &[usize],
    b: &[usize],
) -> Result<bool> {
    let common: Vec<usize> = a.iter().copied().filter(|i| b.contains(i)).collect();
    let a_only: Vec<usize> = a.iter().copied().filter(|i| !common.contains(i)).collect();
    let b_only: Vec<usize> = b.iter().copied().filter(|i| !common.contains(i)).collect();
    if a_only.is_empty() || b_only.is_empty() {
        // one maximal cone inside another: not a valid fan listing
        return Ok(false);
    }
    // fast path: spans meet only at the origin
    if common.is_empty() {
        let m: Vec<Vec<BigInt>> = a
            .iter()
            .chain(b.iter())
            .map(|&i| fan.rays()[i].class_coords().to_vec())
            .collect();
        if linalg::rank_int(&m) == a.len() + b.len() {
            return Ok(true);
        }
    }
    // coordinates of all involved rays in a basis of the joint span
    let involved: Vec<usize> = common.iter().chain(&a_only).chain(&b_only).copied().collect();
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    for &i in &involved {
        let cand = linalg::rat_vec_int(fan.rays()[i].class_coords());
        let mut test = basis.clone();
        test.push(cand.clone());
        if linalg::rank(&test) == test.len() {
            basis.push(cand);
            chosen.push(i);
        }
    }
    let m = basis.len();
    let coords_of = |i: usize| -> Vec<Rat> {
        let cols: Vec<Vec<Rat>> = basis.clone();
        linalg::solve_columns(&cols, &linalg::rat_vec_int(fan.rays()[i].class_coords()))
            .expect("ray lies in joint span")
    };
    // functional h in the dual of the joint span, vanishing on the common
    // rays: parametrize by the kernel of the common-ray rows
    let common_rows: Vec<Vec<Rat>> = common.iter().map(|&i| coords_of(i)).collect();
    let kernel = if common_rows.is_empty() {
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { linalg::rat(1) } else { Rat::zero() })
                    .collect()
            })
            .collect::<Vec<_>>()
    } else {
        linalg::kernel_basis(&common_rows, m)
    };
    if kernel.is_empty() {
        return Ok(false);
    }
    let k = kernel.len();
    let mut constraints = Vec::new();
    for &i in &a_only {
        let c = coords_of(i);
        let row: Vec<Rat> = kernel
            .iter()
            .map(|kv| kv.iter().zip(&c).map(|(x, y)| x * y).sum())
            .collect();
        constraints.push(Constraint::ge(row, linalg::rat(1)));
    }
    for &i in &b_only {
        let c = coords_of(i);
        let row: Vec<Rat> = kernel
            .iter()
            .map(|kv| -kv.iter().zip(&c).map(|(x, y)| x * y).sum::<Rat>())
            .collect();
        constraints.push(Constraint::ge(row, linalg::rat(1)));
    }
    Ok(feasible(constraints, k))
}

/// Verifies the fan property: pairwise intersections of maximal cones are
/// faces of each.
pub fn verify_fan(_ctx: &QuotientLattice, fan: &Fan) -> Result<()> {
    let cones = fan.maximal_cones();
    for i in 0..cones.len() {
        for j in (i + 1)..cones.len() {
            if cones[i] == cones[j] {
                return Err(Error::Internal(format!(
                    "duplicate maximal cone at indices {i},{j}"
                )));
            }
            if !cones_meet_in_common_face(fan, &cones[i], &cones[j])? {
                return Err(Error::Internal(format!(
                    "cones {i} and {j} do not meet in a common face"
                )));
            }
        }
    }
    Ok(())
}

/// Balancing at a codimension-1 face `tau` (given by ray indices): the
/// weighted sum of primitive normal directions of the adjacent maximal
/// cones must lie in the span of `tau` modulo lineality.
pub fn balancing_check(ctx: &QuotientLattice, fan: &Fan, tau: &[usize]) -> Result<bool> {
    if !fan.is_pure() {
        return Err(Error::InvalidInput("balancing needs a pure fan".into()));
    }
    let d = fan.maximal_cones().first().map_or(0, |c| c.len());
    let mut tau_sorted = tau.to_vec();
    tau_sorted.sort_unstable();
    if tau_sorted.len() + 1 != d {
        return Err(Error::InvalidInput(format!(
            "face has {} rays; expected {}",
            tau_sorted.len(),
            d.saturating_sub(1)
        )));
    }
    let incident: Vec<usize> = fan
        .maximal_cones()
        .iter()
        .enumerate()
        .filter(|(_, c)| tau_sorted.iter().all(|r| c.contains(r)))
        .map(|(i, _)| i)
        .collect();
    if incident.is_empty() {
        return Err(Error::InvalidInput("face is not a face of the fan".into()));
    }
    // work in split-ray-lattice coordinates so that primitivity is taken
    // with respect to the moduli lattice
    let gens: Vec<Vec<BigInt>> = tau_sorted
        .iter()
        .map(|&r| ctx.lattice_coords_int(fan.rays()[r].representative()))
        .collect::<Result<_>>()?;
    let quotient = LatticeQuotient::new(ctx.dim(), &gens);
    let mut total = vec![BigInt::zero(); quotient.quotient_dim()];
    for ci in incident {
        let extra = fan.maximal_cones()[ci]
            .iter()
            .copied()
            .find(|r| !tau_sorted.contains(r))
            .expect("codim-1 face leaves one ray");
        let coords = ctx.lattice_coords_int(fan.rays()[extra].representative())?;
        let img = quotient.project(&coords);
        let g = snf::gcd_of(&img);
        if g.is_zero() {
            return Err(Error::Internal(
                "adjacent cone collapses onto the face".into(),
            ));
        }
        let w = BigInt::from(fan.weight_of(ci));
        for (t, x) in total.iter_mut().zip(&img) {
            *t += &w * &(x / &g);
        }
    }
    Ok(total.iter().all(|x| x.is_zero()))
}

/// Runs the balancing check at every codimension-1 face.
pub fn balanced_everywhere(ctx: &QuotientLattice, fan: &Fan) -> Result<bool> {
    for (face, _) in fan.codim1_faces() {
        if !balancing_check(ctx, fan, &face)? {
            return Ok(false);
        }
    }
    Ok(true)
}
