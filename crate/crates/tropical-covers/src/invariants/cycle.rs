//! Tropical Hurwitz cycles: weighted polyhedral complexes in the quotient
//! coordinates of the tree fan, with balancing and connectivity checks.
//!
//! A cell is the image of the metrization polyhedron of one combinatorial
//! type under the distance map, after imposing the point conditions.  Its
//! weight is the psi-class factor times the lattice index of the
//! evaluation map on the type's coordinate lattice; the k = 0 degeneration
//! against the Hurwitz number and the balancing test arbitrate that
//! convention.

use crate::error::{Error, Result};
use crate::lattice::linalg::{self, Rat};
use crate::lattice::snf::{self, LatticeQuotient};
use crate::lattice::{AmbientVector, QuotientLattice};
use crate::relmaps::RamificationData;
use num::{BigInt, One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// A polyhedral cell in quotient coordinates: convex hull of `vertices`
/// plus the cone over `rays`.
#[derive(Clone, Debug)]
pub struct Cell {
    pub vertices: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Rat>>,
    pub weight: BigInt,
    /// Split sets of the stabilized source trees that produced the cell.
    pub provenance: Vec<String>,
    facets: Vec<FaceKey>,
}

type FaceKey = (Vec<Vec<Rat>>, Vec<Vec<BigInt>>);

impl Cell {
    pub fn dim(&self) -> usize {
        cell_dim(&self.vertices, &self.rays)
    }

    pub fn facet_keys(&self) -> &[FaceKey] {
        &self.facets
    }
}

fn cell_dim(vertices: &[Vec<Rat>], rays: &[Vec<Rat>]) -> usize {
    if vertices.is_empty() {
        return 0;
    }
    let v0 = &vertices[0];
    let mut dirs: Vec<Vec<Rat>> = vertices[1..]
        .iter()
        .map(|v| v.iter().zip(v0).map(|(a, b)| a - b).collect())
        .collect();
    dirs.extend(rays.iter().cloned());
    if dirs.is_empty() {
        0
    } else {
        linalg::rank(&dirs)
    }
}

#[derive(Clone, Debug)]
pub struct HurwitzCycle {
    pub n: usize,
    pub k: usize,
    pub points: Vec<Rat>,
    pub cells: Vec<Cell>,
}

impl HurwitzCycle {
    /// Degree of a 0-dimensional cycle: the sum of the point weights.
    pub fn degree(&self) -> Result<BigInt> {
        if self.k != 0 {
            return Err(Error::InvalidInput("degree is defined for k = 0".into()));
        }
        Ok(self.cells.iter().map(|c| c.weight.clone()).sum())
    }

    /// Balancing at every codimension-1 face.
    pub fn is_balanced(&self, ctx: &QuotientLattice) -> Result<bool> {
        if self.k == 0 {
            return Ok(true); // points have no codimension-1 faces
        }
        let mut groups: BTreeMap<&FaceKey, Vec<usize>> = BTreeMap::new();
        for (ci, cell) in self.cells.iter().enumerate() {
            for f in cell.facet_keys() {
                groups.entry(f).or_default().push(ci);
            }
        }
        for (face, members) in groups {
            if !self.balanced_at(ctx, face, &members)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn balanced_at(&self, ctx: &QuotientLattice, face: &FaceKey, members: &[usize]) -> Result<bool> {
        let (fverts, frays) = face;
        if fverts.is_empty() {
            return Err(Error::Internal("facet without vertices".into()));
        }
        let f0 = &fverts[0];
        let mut gens: Vec<Vec<BigInt>> = fverts[1..]
            .iter()
            .map(|v| {
                let d: Vec<Rat> = v.iter().zip(f0).map(|(a, b)| a - b).collect();
                crate::lattice::primitive_int_direction(&d)
            })
            .collect();
        gens.extend(frays.iter().cloned());
        let quotient = LatticeQuotient::new(ctx.dim(), &gens);
        let mut total = vec![BigInt::zero(); quotient.quotient_dim()];
        for &ci in members {
            let cell = &self.cells[ci];
            // relative-interior point of the cell, displaced from the face
            let count = Rat::from(BigInt::from(cell.vertices.len() as i64));
            let mut p = vec![Rat::zero(); f0.len()];
            for v in &cell.vertices {
                for (pi, vi) in p.iter_mut().zip(v) {
                    *pi += vi;
                }
            }
            for pi in p.iter_mut() {
                *pi = &*pi / &count;
            }
            for r in &cell.rays {
                for (pi, ri) in p.iter_mut().zip(r) {
                    *pi += ri;
                }
            }
            let delta: Vec<Rat> = p.iter().zip(f0).map(|(a, b)| a - b).collect();
            let dir = crate::lattice::primitive_int_direction(&delta);
            let img = quotient.project(&dir);
            let g = snf::gcd_of(&img);
            if g.is_zero() {
                return Err(Error::Internal(
                    "cell direction degenerates onto its facet".into(),
                ));
            }
            for (t, x) in total.iter_mut().zip(&img) {
                *t += &cell.weight * &(x / &g);
            }
        }
        Ok(total.iter().all(|x| x.is_zero()))
    }
}

/// True iff the dual graph of cells glued along shared codimension-1
/// faces is connected.
pub fn connected_through_codim1(cycle: &HurwitzCycle) -> bool {
    let m = cycle.cells.len();
    if m <= 1 {
        return true;
    }
    let mut groups: BTreeMap<&FaceKey, Vec<usize>> = BTreeMap::new();
    for (ci, cell) in cycle.cells.iter().enumerate() {
        for f in cell.facet_keys() {
            groups.entry(f).or_default().push(ci);
        }
    }
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut Vec<usize>, v: usize) -> usize {
        if parent[v] != v {
            let r = find(parent, parent[v]);
            parent[v] = r;
        }
        parent[v]
    }
    for members in groups.values() {
        for w in members.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let root = find(&mut parent, 0);
    (1..m).all(|v| find(&mut parent, v) == root)
}

struct TypeGeometry {
    /// Vertex parameter polyhedron in V-representation.
    verts: Vec<Vec<Rat>>,
    rays: Vec<Vec<Rat>>,
    /// Affine constraint list: (coeffs, constant), meaning `c . theta + b >= 0`.
    constraints: Vec<(Vec<Rat>, Rat)>,
}

/// Computes the tropical Hurwitz cycle for `k` and `r - k` point
/// conditions.
pub fn hurwitz_cycle(
    x: &RamificationData,
    k: usize,
    points: &[Rat],
) -> Result<HurwitzCycle> {
    let n = x.n();
    if n < 4 || n > 7 {
        return Err(Error::Resource(format!("hurwitz cycle guarded to 4 <= n <= 7, got {n}")));
    }
    let r = x.branch_count();
    if k > r {
        return Err(Error::InvalidInput(format!("k = {k} exceeds r = {r}")));
    }
    if points.len() != r - k {
        return Err(Error::InvalidInput(format!(
            "{} points supplied; r - k = {}",
            points.len(),
            r - k
        )));
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("coincident point conditions".into()));
    }
    let ctx = QuotientLattice::new(n)?;
    let v = n - 2;
    let expected_dim = if r - k >= 1 { k } else { n - 3 };

    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut merged: BTreeMap<FaceKey, Cell> = BTreeMap::new();

    for edges in super::slot_trees(v) {
        let mut degree = vec![0usize; v];
        for &(a, b) in &edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        if degree.iter().any(|&d| d > 3) {
            continue;
        }
        let counts: Vec<usize> = degree.iter().map(|&d| 3 - d).collect();
        debug_assert_eq!(counts.iter().sum::<usize>(), n);
        for leaves in super::partitions_with_counts(n, &counts) {
            for ends in super::assignments(r, v) {
                let key = full_tree_key(n, r, v, &edges, &leaves, &ends);
                if !seen.insert(key) {
                    continue;
                }
                process_type(
                    &ctx, x, k, points, v, &edges, &leaves, &ends, expected_dim, &mut merged,
                )?;
            }
        }
    }
    let cells: Vec<Cell> = merged.into_values().collect();
    for c in &cells {
        if c.dim() != expected_dim {
            return Err(Error::Internal("impure cycle dimension".into()));
        }
    }
    Ok(HurwitzCycle { n, k, points: points.to_vec(), cells })
}

/// Canonical key of the full tree on `n + r` leaves: sorted canonical side
/// masks of all edges.
fn full_tree_key(
    n: usize,
    r: usize,
    v: usize,
    edges: &[(usize, usize)],
    leaves: &[Vec<usize>],
    ends: &[usize],
) -> Vec<u32> {
    let total = n + r;
    let top = 1u32 << (total - 1);
    let mut key: Vec<u32> = edges
        .iter()
        .enumerate()
        .map(|(ei, &(_, b))| {
            let side = slot_side(edges, ei, b, v);
            let mut mask = 0u32;
            for s in 0..v {
                if side[s] {
                    for &l in &leaves[s] {
                        mask |= 1 << (l - 1);
                    }
                    for (j, &slot) in ends.iter().enumerate() {
                        if slot == s {
                            mask |= 1 << (n + j);
                        }
                    }
                }
            }
            if mask & top != 0 {
                mask = ((1u64 << total) - 1) as u32 & !mask;
            }
            mask
        })
        .collect();
    key.sort_unstable();
    key
}

/// Slots in the component of `side` when `edges[skip]` is removed.
fn slot_side(edges: &[(usize, usize)], skip: usize, side: usize, v: usize) -> Vec<bool> {
    let mut inside = vec![false; v];
    inside[side] = true;
    let mut stack = vec![side];
    while let Some(u) = stack.pop() {
        for (ej, &(p, q)) in edges.iter().enumerate() {
            if ej == skip {
                continue;
            }
            for (s, t) in [(p, q), (q, p)] {
                if s == u && !inside[t] {
                    inside[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    inside
}

#[allow(clippy::too_many_arguments)]
fn process_type(
    ctx: &QuotientLattice,
    x: &RamificationData,
    k: usize,
    points: &[Rat],
    v: usize,
    edges: &[(usize, usize)],
    leaves: &[Vec<usize>],
    ends: &[usize],
    expected_dim: usize,
    merged: &mut BTreeMap<FaceKey, Cell>,
) -> Result<()> {
    let r = x.branch_count();
    let e_count = edges.len();
    // flux toward the second endpoint, per edge
    let mut flux = Vec::with_capacity(e_count);
    for ei in 0..e_count {
        let side = slot_side(edges, ei, edges[ei].1, v);
        let f: i64 = (0..v)
            .filter(|&s| side[s])
            .flat_map(|s| leaves[s].iter())
            .map(|&l| x.entry(l))
            .sum();
        flux.push(f);
    }
    // classes: slots merged along weight-0 edges
    let mut parent: Vec<usize> = (0..v).collect();
    fn find(parent: &mut Vec<usize>, a: usize) -> usize {
        if parent[a] != a {
            let r = find(parent, parent[a]);
            parent[a] = r;
        }
        parent[a]
    }
    for (ei, &(a, b)) in edges.iter().enumerate() {
        if flux[ei] == 0 {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut roots: Vec<usize> = (0..v).map(|s| find(&mut parent, s)).collect();
    let mut uniq = roots.clone();
    uniq.sort_unstable();
    uniq.dedup();
    let class_of: Vec<usize> = roots
        .iter_mut()
        .map(|r| uniq.binary_search(r).unwrap())
        .collect();
    let n_classes = uniq.len();

    // pins from the conditioned ends
    let mut pin: Vec<Option<Rat>> = vec![None; n_classes];
    for (j, &slot) in ends.iter().enumerate().take(r - k) {
        let c = class_of[slot];
        match &pin[c] {
            None => pin[c] = Some(points[j].clone()),
            Some(p) if *p == points[j] => {}
            Some(_) => return Ok(()), // conflicting pins: empty cell
        }
    }
    if pin.iter().all(|p| p.is_none()) {
        pin[0] = Some(Rat::zero()); // translation gauge for the no-condition case
    }

    // parameters: unpinned class positions, then contracted edge lengths
    let mut param_of_class: Vec<Option<usize>> = vec![None; n_classes];
    let mut m = 0usize;
    for c in 0..n_classes {
        if pin[c].is_none() {
            param_of_class[c] = Some(m);
            m += 1;
        }
    }
    let contracted: Vec<usize> = (0..e_count).filter(|&ei| flux[ei] == 0).collect();
    let mut param_of_contracted: BTreeMap<usize, usize> = BTreeMap::new();
    for &ei in &contracted {
        param_of_contracted.insert(ei, m);
        m += 1;
    }

    // position of a class as an affine functional (coeffs, constant)
    let pos_of_class = |c: usize| -> (Vec<Rat>, Rat) {
        let mut coeffs = vec![Rat::zero(); m];
        let mut cst = Rat::zero();
        match (&pin[c], param_of_class[c]) {
            (Some(p), _) => cst = p.clone(),
            (None, Some(idx)) => coeffs[idx] = linalg::rat(1),
            _ => unreachable!(),
        }
        (coeffs, cst)
    };

    // edge-length functionals and constraints
    let mut lengths: Vec<(Vec<Rat>, Rat)> = Vec::with_capacity(e_count);
    for (ei, &(a, b)) in edges.iter().enumerate() {
        if flux[ei] == 0 {
            let mut coeffs = vec![Rat::zero(); m];
            coeffs[param_of_contracted[&ei]] = linalg::rat(1);
            lengths.push((coeffs, Rat::zero()));
        } else {
            let (later, earlier) = if flux[ei] > 0 { (b, a) } else { (a, b) };
            let w = Rat::from(BigInt::from(flux[ei].abs()));
            let (lc, lb) = pos_of_class(class_of[later]);
            let (ec, eb) = pos_of_class(class_of[earlier]);
            let coeffs: Vec<Rat> = lc
                .iter()
                .zip(&ec)
                .map(|(p, q)| (p - q) / &w)
                .collect();
            let cst = (&lb - &eb) / &w;
            lengths.push((coeffs, cst));
        }
    }
    let geometry = TypeGeometry {
        verts: Vec::new(),
        rays: Vec::new(),
        constraints: lengths.clone(),
    };
    let Some(geometry) = vertex_representation(geometry, m) else {
        return Ok(()); // empty cell
    };
    if cell_dim(&geometry.verts, &geometry.rays) != expected_dim {
        return Ok(());
    }

    // image under the distance map, in split-ray-lattice coordinates
    let mut phis: Vec<Vec<BigInt>> = Vec::with_capacity(e_count);
    for ei in 0..e_count {
        let side = slot_side(edges, ei, edges[ei].1, v);
        let mut sep = AmbientVector::zero(ctx.n());
        let in_side = |l: usize| -> bool { (0..v).any(|s| side[s] && leaves[s].contains(&l)) };
        for i in 1..=ctx.n() {
            for j in (i + 1)..=ctx.n() {
                if in_side(i) != in_side(j) {
                    sep.coords[AmbientVector::pair_index(ctx.n(), i, j)] = BigInt::one();
                }
            }
        }
        phis.push(ctx.lattice_coords_int(&sep)?);
    }
    let eval_len = |theta: &[Rat], ei: usize| -> Rat {
        let (coeffs, cst) = &lengths[ei];
        coeffs.iter().zip(theta).map(|(c, t)| c * t).sum::<Rat>() + cst.clone()
    };
    let image_point = |theta: &[Rat]| -> Vec<Rat> {
        let mut out = vec![Rat::zero(); ctx.dim()];
        for ei in 0..e_count {
            let l = eval_len(theta, ei);
            for (o, p) in out.iter_mut().zip(&phis[ei]) {
                *o += &l * &Rat::from(p.clone());
            }
        }
        out
    };
    let image_dir = |d: &[Rat]| -> Vec<Rat> {
        let mut out = vec![Rat::zero(); ctx.dim()];
        for ei in 0..e_count {
            let (coeffs, _) = &lengths[ei];
            let l: Rat = coeffs.iter().zip(d).map(|(c, t)| c * t).sum();
            for (o, p) in out.iter_mut().zip(&phis[ei]) {
                *o += &l * &Rat::from(p.clone());
            }
        }
        out
    };
    let mut img_verts: Vec<Vec<Rat>> = geometry.verts.iter().map(|t| image_point(t)).collect();
    img_verts.sort();
    img_verts.dedup();
    let mut img_rays: Vec<Vec<BigInt>> = geometry
        .rays
        .iter()
        .map(|d| crate::lattice::primitive_int_direction(&image_dir(d)))
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    img_rays.sort();
    img_rays.dedup();
    let img_rays_rat: Vec<Vec<Rat>> = img_rays.iter().map(|r| linalg::rat_vec_int(r)).collect();
    if cell_dim(&img_verts, &img_rays_rat) != expected_dim {
        return Ok(()); // the distance map collapses this type
    }

    // weight: psi factor times the evaluation lattice index
    let mut psi = BigInt::one();
    for s in 0..v {
        let ends_here = ends.iter().filter(|&&slot| slot == s).count() as u64;
        psi *= BigInt::from(super::factorial(ends_here));
    }
    let index = evaluation_index(x, edges, &flux, ends, r - k, v)?;
    let weight = psi * index;

    // facets: images of the parameter facets
    let mut facets: Vec<FaceKey> = Vec::new();
    if expected_dim > 0 {
        for (ci, _) in geometry.constraints.iter().enumerate() {
            let on_face_v: Vec<Vec<Rat>> = geometry
                .verts
                .iter()
                .filter(|t| eval_len(t, ci).is_zero())
                .cloned()
                .collect();
            if on_face_v.is_empty() {
                continue;
            }
            let on_face_r: Vec<Vec<Rat>> = geometry
                .rays
                .iter()
                .filter(|d| {
                    let (coeffs, _) = &lengths[ci];
                    coeffs
                        .iter()
                        .zip(d.iter())
                        .map(|(c, t)| c * t)
                        .sum::<Rat>()
                        .is_zero()
                })
                .cloned()
                .collect();
            let mut fv: Vec<Vec<Rat>> = on_face_v.iter().map(|t| image_point(t)).collect();
            fv.sort();
            fv.dedup();
            let mut fr: Vec<Vec<BigInt>> = on_face_r
                .iter()
                .map(|d| crate::lattice::primitive_int_direction(&image_dir(d)))
                .filter(|r| r.iter().any(|x| !x.is_zero()))
                .collect();
            fr.sort();
            fr.dedup();
            let fr_rat: Vec<Vec<Rat>> = fr.iter().map(|r| linalg::rat_vec_int(r)).collect();
            if cell_dim(&fv, &fr_rat) + 1 != expected_dim {
                continue;
            }
            facets.push((fv, fr));
        }
        facets.sort();
        facets.dedup();
    }

    // support tripwire: the cell lies in the cone of its stabilized tree
    verify_support(ctx, edges, leaves, v, &img_verts, &img_rays_rat)?;

    let provenance = describe_type(edges, leaves, ends);
    let key: FaceKey = (img_verts.clone(), img_rays.clone());
    match merged.get_mut(&key) {
        Some(cell) => {
            cell.weight += weight;
            cell.provenance.push(provenance);
            for f in facets {
                if !cell.facets.contains(&f) {
                    cell.facets.push(f);
                }
            }
        }
        None => {
            merged.insert(
                key,
                Cell {
                    vertices: img_verts,
                    rays: img_rays_rat,
                    weight,
                    provenance: vec![provenance],
                    facets,
                },
            );
        }
    }
    Ok(())
}

/// Vertices and extreme rays of `{theta : c . theta + b >= 0}` by basic
/// solution enumeration; the polyhedron is pointed by construction.
fn vertex_representation(mut g: TypeGeometry, m: usize) -> Option<TypeGeometry> {
    let cs = g.constraints.clone();
    let feasible_at = |t: &[Rat]| -> bool {
        cs.iter().all(|(c, b)| {
            let v: Rat = c.iter().zip(t).map(|(a, x)| a * x).sum::<Rat>() + b.clone();
            !v.is_negative()
        })
    };
    if m == 0 {
        if feasible_at(&[]) {
            g.verts.push(Vec::new());
            return Some(g);
        }
        return None;
    }
    // vertices: solutions of m active constraints
    let idx: Vec<usize> = (0..cs.len()).collect();
    for subset in subsets(&idx, m) {
        let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| cs[i].0.clone()).collect();
        let rhs: Vec<Rat> = subset.iter().map(|&i| -cs[i].1.clone()).collect();
        if linalg::rank(&rows) != m {
            continue;
        }
        let cols: Vec<Vec<Rat>> = (0..m)
            .map(|j| rows.iter().map(|r| r[j].clone()).collect())
            .collect();
        if let Some(t) = linalg::solve_columns(&cols, &rhs) {
            if feasible_at(&t) && !g.verts.contains(&t) {
                g.verts.push(t);
            }
        }
    }
    if g.verts.is_empty() {
        return None;
    }
    g.verts.sort();
    // extreme rays: 1-dimensional kernels of (m-1)-subsets, feasible for
    // the homogeneous system
    let hom_feasible = |d: &[Rat]| -> bool {
        cs.iter().all(|(c, _)| {
            let v: Rat = c.iter().zip(d).map(|(a, x)| a * x).sum();
            !v.is_negative()
        })
    };
    for subset in subsets(&idx, m.saturating_sub(1)) {
        let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| cs[i].0.clone()).collect();
        let kernel = if rows.is_empty() {
            (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| if i == j { linalg::rat(1) } else { Rat::zero() })
                        .collect::<Vec<Rat>>()
                })
                .collect()
        } else {
            linalg::kernel_basis(&rows, m)
        };
        if kernel.len() != 1 {
            continue;
        }
        for sign in [1i64, -1] {
            let d: Vec<Rat> = kernel[0].iter().map(|x| x * linalg::rat(sign)).collect();
            if d.iter().all(|x| x.is_zero()) {
                continue;
            }
            if hom_feasible(&d) {
                let prim = crate::lattice::primitive_int_direction(&d);
                let dr: Vec<Rat> = linalg::rat_vec_int(&prim);
                if !g.rays.contains(&dr) {
                    g.rays.push(dr);
                }
            }
        }
    }
    g.rays.sort();
    Some(g)
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(items: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, size, 0, &mut cur, &mut out);
    out
}

/// Index of the evaluation map on the lattice of translations and source
/// edge lengths: the gcd of its maximal minors.
fn evaluation_index(
    _x: &RamificationData,
    edges: &[(usize, usize)],
    flux: &[i64],
    ends: &[usize],
    conditioned: usize,
    v: usize,
) -> Result<BigInt> {
    if conditioned == 0 {
        return Ok(BigInt::one());
    }
    // position of each slot in coordinates (a, l_1..l_E), from slot 0
    let e_count = edges.len();
    let mut pos: Vec<Option<Vec<i64>>> = vec![None; v];
    pos[0] = Some(vec![0; e_count]);
    let mut stack = vec![0usize];
    while let Some(u) = stack.pop() {
        for (ei, &(a, b)) in edges.iter().enumerate() {
            for (s, t) in [(a, b), (b, a)] {
                if s == u && pos[t].is_none() {
                    let mut p = pos[u].clone().unwrap();
                    // traversing from s to t: length contributes with the
                    // sign of the flux seen toward t
                    let toward_t = if t == b { flux[ei] } else { -flux[ei] };
                    p[ei] += toward_t;
                    pos[t] = Some(p);
                    stack.push(t);
                }
            }
        }
    }
    let rows: Vec<Vec<BigInt>> = ends
        .iter()
        .take(conditioned)
        .map(|&slot| {
            let p = pos[slot].as_ref().unwrap();
            let mut row = Vec::with_capacity(1 + e_count);
            row.push(BigInt::one()); // translation coordinate
            row.extend(p.iter().map(|&c| BigInt::from(c)));
            row
        })
        .collect();
    let g = max_minor_gcd(&rows, conditioned);
    if g.is_zero() {
        return Err(Error::Internal("rank-deficient evaluation map on a rigid cell".into()));
    }
    Ok(g)
}

fn max_minor_gcd(rows: &[Vec<BigInt>], size: usize) -> BigInt {
    let cols = rows.first().map_or(0, |r| r.len());
    if size > cols || size > rows.len() {
        return BigInt::zero();
    }
    let col_idx: Vec<usize> = (0..cols).collect();
    let mut g = BigInt::zero();
    for cset in subsets(&col_idx, size) {
        let sub: Vec<Vec<Rat>> = rows
            .iter()
            .map(|r| cset.iter().map(|&c| Rat::from(r[c].clone())).collect())
            .collect();
        let d = linalg::det(&sub);
        debug_assert!(d.is_integer());
        g = num::Integer::gcd(&g, &d.to_integer());
    }
    g
}

fn verify_support(
    ctx: &QuotientLattice,
    edges: &[(usize, usize)],
    leaves: &[Vec<usize>],
    v: usize,
    img_verts: &[Vec<Rat>],
    img_rays: &[Vec<Rat>],
) -> Result<()> {
    // cone spanned by the separation classes of the slot-tree edges
    let mut cols: Vec<Vec<Rat>> = Vec::new();
    for ei in 0..edges.len() {
        let side = slot_side(edges, ei, edges[ei].1, v);
        let mut sep = AmbientVector::zero(ctx.n());
        let in_side = |l: usize| (0..v).any(|s| side[s] && leaves[s].contains(&l));
        for i in 1..=ctx.n() {
            for j in (i + 1)..=ctx.n() {
                if in_side(i) != in_side(j) {
                    sep.coords[AmbientVector::pair_index(ctx.n(), i, j)] = BigInt::one();
                }
            }
        }
        let phi = ctx.lattice_coords_int(&sep)?;
        if phi.iter().any(|x| !x.is_zero()) {
            cols.push(linalg::rat_vec_int(&phi));
        }
    }
    for pt in img_verts.iter().chain(img_rays.iter()) {
        if pt.iter().all(|x| x.is_zero()) {
            continue;
        }
        match linalg::solve_columns(&cols, pt) {
            Some(lambda) if lambda.iter().all(|l| !l.is_negative()) => {}
            _ => {
                return Err(Error::Internal(
                    "cycle cell leaves the cone of its tree".into(),
                ))
            }
        }
    }
    Ok(())
}

fn describe_type(edges: &[(usize, usize)], leaves: &[Vec<usize>], ends: &[usize]) -> String {
    let leaf_strs: Vec<String> = leaves
        .iter()
        .map(|ls| {
            let s: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
            s.join(",")
        })
        .collect();
    format!("edges={edges:?} leaves=[{}] ends={ends:?}", leaf_strs.join(" | "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::hurwitz_number;
    use crate::lattice::QuotientLattice;

    fn qr(v: i64) -> Rat {
        Rat::from(BigInt::from(v))
    }

    #[test]
    fn degree_of_h0_recovers_hurwitz_number() {
        for entries in [vec![2i64, 1, -2, -1], vec![1, 1, -1, -1], vec![3, -1, -1, -1]] {
            let x = RamificationData::new(entries.clone()).unwrap();
            let r = x.branch_count();
            let points: Vec<Rat> = (0..r as i64).map(|i| qr(3 * i + 1)).collect();
            let cycle = hurwitz_cycle(&x, 0, &points).unwrap();
            assert_eq!(
                cycle.degree().unwrap(),
                hurwitz_number(&x).unwrap(),
                "degree mismatch for {entries:?}"
            );
        }
    }

    #[test]
    fn one_dimensional_cycle_balances() {
        let x = RamificationData::new(vec![1, 1, -1, -1]).unwrap();
        let cycle = hurwitz_cycle(&x, 1, &[qr(0)]).unwrap();
        let ctx = QuotientLattice::new(4).unwrap();
        assert_eq!(cycle.k, 1);
        assert!(!cycle.cells.is_empty());
        assert!(cycle.is_balanced(&ctx).unwrap());
        assert!(connected_through_codim1(&cycle));
    }

    #[test]
    fn full_k_support_covers_tree_cones() {
        let x = RamificationData::new(vec![2, 1, -2, -1]).unwrap();
        let cycle = hurwitz_cycle(&x, x.branch_count(), &[]).unwrap();
        // support is the whole 1-dimensional fan: one cell per ray of
        // Delta_4
        assert_eq!(cycle.cells.len(), 3);
        for c in &cycle.cells {
            assert_eq!(c.dim(), 1);
        }
    }

    #[test]
    fn input_validation() {
        let x = RamificationData::new(vec![1, 1, -1, -1]).unwrap();
        assert!(hurwitz_cycle(&x, 5, &[]).is_err());
        assert!(hurwitz_cycle(&x, 0, &[qr(1), qr(1)]).is_err());
        assert!(hurwitz_cycle(&x, 1, &[]).is_err());
    }

    #[test]
    fn handmade_disconnected_complex_detected() {
        // two point cells never share a codim-1 face
        let cell = |x: i64| Cell {
            vertices: vec![vec![qr(x), qr(0)]],
            rays: vec![],
            weight: BigInt::one(),
            provenance: vec![],
            facets: vec![],
        };
        let cycle = HurwitzCycle { n: 4, k: 0, points: vec![], cells: vec![cell(0), cell(1)] };
        assert!(!connected_through_codim1(&cycle));
        let single = HurwitzCycle { n: 4, k: 0, points: vec![], cells: vec![cell(0)] };
        assert!(connected_through_codim1(&single));
    }
}
