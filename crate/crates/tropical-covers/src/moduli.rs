//! Assembly of the global fans: the fan of leaf-labeled trees in distance
//! coordinates, and its refinement by combinatorial types of rubber maps.

use crate::error::{Error, Result};
use crate::lattice::{
    fan, primitive, split_ray, Cone, Fan, QuotientLattice, QuotientVector,
};
use crate::relmaps::{
    cone_of_order, expansion_factor, linear_extensions, vertex_partial_order, RamificationData,
};
use crate::trees::{enumerate_trees, MarkedTree, VertexId};
use num::BigInt;

/// Where a maximal cone came from: the tree and the linear extension of
/// its vertex order, recorded as blocks of vertex ids.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub tree: MarkedTree,
    pub order: Vec<Vec<VertexId>>,
}

/// A fan together with per-cone provenance.
pub struct ModuliFan {
    pub n: usize,
    pub x: Option<RamificationData>,
    pub fan: Fan,
    /// One entry per maximal cone.
    pub provenance: Vec<Provenance>,
}

/// The cone of a tree: spanned by the split rays of its internal edges.
pub fn tree_cone(ctx: &QuotientLattice, t: &MarkedTree) -> Result<Cone> {
    let rays = t
        .splits()
        .iter()
        .map(|s| primitive(ctx, &split_ray(s, ctx.n())?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Cone::new(rays))
}

/// The fan of stable trees: one maximal cone per trivalent tree, all
/// weights 1.
pub fn build_delta_n(n: usize) -> Result<ModuliFan> {
    if !(4..=8).contains(&n) {
        return Err(Error::Resource(format!(
            "full fan construction guarded to 4 <= n <= 8, got {n}"
        )));
    }
    let ctx = QuotientLattice::new(n)?;
    let mut fan = Fan::new(n);
    let mut provenance = Vec::new();
    for t in enumerate_trees(n, true)? {
        let cone = tree_cone(&ctx, &t)?;
        fan.add_cone(&ctx, cone.rays(), Some(1))?;
        let order = vec![(0..t.num_vertices()).collect::<Vec<_>>()];
        provenance.push(Provenance { tree: t, order });
    }
    Ok(ModuliFan { n, x: None, fan, provenance })
}

/// The subdivision of one tree cone by the linear extensions of the
/// tree's vertex order, as a standalone fan.
pub fn subdivide_tree_cone(
    ctx: &QuotientLattice,
    t: &MarkedTree,
    x: &RamificationData,
) -> Result<(Fan, Vec<Provenance>)> {
    let order = vertex_partial_order(t, x)?;
    let mut fan = Fan::new(ctx.n());
    let mut provenance = Vec::new();
    for ext in linear_extensions(&order) {
        let cone = cone_of_order(ctx, t, x, &ext)?;
        fan.add_cone(ctx, cone.rays(), Some(1))?;
        let blocks: Vec<Vec<VertexId>> =
            ext.iter().map(|&c| order.classes[c].clone()).collect();
        provenance.push(Provenance { tree: t.clone(), order: blocks });
    }
    Ok((fan, provenance))
}

/// The fan of rubber relative stable maps: every trivalent tree cone is
/// replaced by the cones of the linear extensions of its vertex order.
/// Shared-face consistency between adjacent subdivided cones is checked,
/// not assumed.
pub fn build_delta_rub(x: &RamificationData) -> Result<ModuliFan> {
    let n = x.n();
    if !(4..=7).contains(&n) {
        return Err(Error::Resource(format!(
            "rubber fan construction guarded to 4 <= n <= 7, got {n}"
        )));
    }
    let ctx = QuotientLattice::new(n)?;
    let mut fan = Fan::new(n);
    let mut provenance = Vec::new();
    let mut expected_cones = 0usize;
    for t in enumerate_trees(n, true)? {
        let order = vertex_partial_order(&t, x)?;
        let exts = linear_extensions(&order);
        expected_cones += exts.len();
        for ext in exts {
            let cone = cone_of_order(&ctx, &t, x, &ext)?;
            fan.add_cone(&ctx, cone.rays(), Some(1))?;
            let blocks: Vec<Vec<VertexId>> =
                ext.iter().map(|&c| order.classes[c].clone()).collect();
            provenance.push(Provenance { tree: t.clone(), order: blocks });
        }
    }
    if fan.maximal_cones().len() != expected_cones {
        return Err(Error::Internal(
            "extension subdivision produced colliding cones".into(),
        ));
    }
    Ok(ModuliFan { n, x: Some(x.clone()), fan, provenance })
}

/// One weighted stellar subdivision step: the face (as fan rays) and the
/// positive weights.
#[derive(Clone, Debug)]
pub struct StellarStep {
    pub face: Vec<QuotientVector>,
    pub weights: Vec<i64>,
}

/// Searches for an iterated weighted stellar subdivision of the tree cone
/// reproducing the linear-extension subdivision.  The insertion order of
/// the new rays is found by backtracking: each step requires the next ray
/// to lie in the relative interior of a face of the current fan, which
/// forces the weights.
pub fn verify_stellar_factorization(
    ctx: &QuotientLattice,
    x: &RamificationData,
    t: &MarkedTree,
) -> Result<Vec<StellarStep>> {
    if !t.is_trivalent() {
        return Err(Error::InvalidInput("stellar factorization needs a trivalent tree".into()));
    }
    let (target, _) = subdivide_tree_cone(ctx, t, x)?;
    let target_keys = cone_key_set(&target);

    let base = tree_cone(ctx, t)?;
    let mut start = Fan::new(ctx.n());
    start.add_cone(ctx, base.rays(), None)?;

    // rays to insert: target rays not among the base cone rays
    let base_keys: Vec<Vec<BigInt>> = base
        .rays()
        .iter()
        .map(|r| primitive(ctx, r.representative()).map(|p| p.primitive_key()))
        .collect::<Result<_>>()?;
    let new_rays: Vec<QuotientVector> = target
        .rays()
        .iter()
        .filter(|r| !base_keys.contains(&r.primitive_key()))
        .cloned()
        .collect();

    let mut steps = Vec::new();
    if search(ctx, &start, &new_rays, &target_keys, &mut steps)? {
        Ok(steps)
    } else {
        Err(Error::SearchFailure(format!(
            "no iterated weighted stellar subdivision found for tree {:?}",
            t.splits()
        )))
    }
}

fn cone_key_set(fan: &Fan) -> Vec<Vec<Vec<BigInt>>> {
    let mut keys: Vec<Vec<Vec<BigInt>>> = fan
        .maximal_cones()
        .iter()
        .map(|cone| {
            let mut rays: Vec<Vec<BigInt>> = cone
                .iter()
                .map(|&i| fan.rays()[i].primitive_key())
                .collect();
            rays.sort();
            rays
        })
        .collect();
    keys.sort();
    keys
}

/// The unique face of the fan containing `ray` in its relative interior,
/// with the positive integer weights expressing the ray, if any.
fn carrier_face(
    _ctx: &QuotientLattice,
    fan: &Fan,
    ray: &QuotientVector,
) -> Result<Option<(Vec<QuotientVector>, Vec<i64>)>> {
    use crate::lattice::linalg::{self, Rat};
    use num::Signed;
    let b = linalg::rat_vec_int(ray.class_coords());
    for cone in fan.maximal_cones() {
        let cols: Vec<Vec<Rat>> = cone
            .iter()
            .map(|&i| linalg::rat_vec_int(fan.rays()[i].class_coords()))
            .collect();
        let Some(lambda) = linalg::solve_columns(&cols, &b) else { continue };
        if lambda.iter().any(|l| l.is_negative()) {
            continue;
        }
        // carrier face: the rays with strictly positive coefficient
        let support: Vec<usize> = lambda
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_positive())
            .map(|(i, _)| i)
            .collect();
        if support.is_empty() {
            continue;
        }
        let face: Vec<QuotientVector> = support
            .iter()
            .map(|&i| fan.rays()[cone[i]].clone())
            .collect();
        let coeffs: Vec<Rat> = support.iter().map(|&i| lambda[i].clone()).collect();
        let ints = linalg::clear_denominators(&coeffs);
        let g = crate::lattice::snf::gcd_of(&ints);
        let weights: Vec<i64> = ints
            .iter()
            .map(|v| {
                let w = v / &g;
                i64::try_from(w).map_err(|_| Error::Internal("weight overflow".into()))
            })
            .collect::<Result<_>>()?;
        return Ok(Some((face, weights)));
    }
    Ok(None)
}

fn search(
    ctx: &QuotientLattice,
    current: &Fan,
    remaining: &[QuotientVector],
    target_keys: &[Vec<Vec<BigInt>>],
    steps: &mut Vec<StellarStep>,
) -> Result<bool> {
    if remaining.is_empty() {
        return Ok(cone_key_set(current) == target_keys);
    }
    for (i, ray) in remaining.iter().enumerate() {
        let Some((face, weights)) = carrier_face(ctx, current, ray)? else { continue };
        if face.len() < 2 {
            // the ray already is a ray of the fan; nothing to insert
            continue;
        }
        let next = fan::stellar_subdivide(ctx, current, &face, &weights)?;
        let rest: Vec<QuotientVector> = remaining
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| r.clone())
            .collect();
        steps.push(StellarStep { face, weights });
        if search(ctx, &next, &rest, target_keys, steps)? {
            return Ok(true);
        }
        steps.pop();
    }
    Ok(false)
}

/// Replays a stellar sequence on the cone of `t` and compares the
/// resulting cone set with the extension subdivision.
pub fn replay_stellar_sequence(
    ctx: &QuotientLattice,
    x: &RamificationData,
    t: &MarkedTree,
    steps: &[StellarStep],
) -> Result<bool> {
    let base = tree_cone(ctx, t)?;
    let mut fan = Fan::new(ctx.n());
    fan.add_cone(ctx, base.rays(), None)?;
    for step in steps {
        fan = fan::stellar_subdivide(ctx, &fan, &step.face, &step.weights)?;
    }
    let (target, _) = subdivide_tree_cone(ctx, t, x)?;
    Ok(cone_key_set(&fan) == cone_key_set(&target))
}

/// Counting identity: maximal cones of the rubber fan match the total
/// number of linear extensions over all trivalent trees.
pub fn extension_count(x: &RamificationData) -> Result<usize> {
    let mut total = 0;
    for t in enumerate_trees(x.n(), true)? {
        total += linear_extensions(&vertex_partial_order(&t, x)?).len();
    }
    Ok(total)
}

/// Per-tree weight check used by the Hurwitz count: true when every
/// internal edge has a positive expansion factor.
pub fn all_edges_positive(t: &MarkedTree, x: &RamificationData) -> Result<bool> {
    for ei in 0..t.edges().len() {
        if expansion_factor(t, ei, x)? == 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::fan::{balanced_everywhere, is_subdivision, verify_fan};
    use crate::trees::tests::tree_alpha;
    use crate::trees::{MarkedTree, Split};

    fn x_example() -> RamificationData {
        RamificationData::new(vec![-4, -4, 5, 1, 1, 1]).unwrap()
    }

    #[test]
    fn delta4_shape() {
        let m = build_delta_n(4).unwrap();
        assert_eq!(m.fan.rays().len(), 3);
        assert_eq!(m.fan.maximal_cones().len(), 3);
        assert!(m.fan.maximal_cones().iter().all(|c| c.len() == 1));
    }

    #[test]
    fn delta5_shape() {
        let m = build_delta_n(5).unwrap();
        assert_eq!(m.fan.rays().len(), 10);
        assert_eq!(m.fan.maximal_cones().len(), 15);
        assert!(m.fan.maximal_cones().iter().all(|c| c.len() == 2));
    }

    #[test]
    fn delta6_shape() {
        let m = build_delta_n(6).unwrap();
        assert_eq!(m.fan.rays().len(), 25);
        assert_eq!(m.fan.maximal_cones().len(), 105);
    }

    #[test]
    fn delta_n_guard() {
        assert!(build_delta_n(3).is_err());
        assert!(build_delta_n(9).is_err());
    }

    #[test]
    fn delta5_is_fan_and_balanced() {
        let m = build_delta_n(5).unwrap();
        let ctx = QuotientLattice::new(5).unwrap();
        verify_fan(&ctx, &m.fan).unwrap();
        assert!(balanced_everywhere(&ctx, &m.fan).unwrap());
    }

    #[test]
    fn alpha_cone_subdivides_into_five() {
        let ctx = QuotientLattice::new(6).unwrap();
        let t = tree_alpha();
        let x = x_example();
        let (fan, _) = subdivide_tree_cone(&ctx, &t, &x).unwrap();
        assert_eq!(fan.maximal_cones().len(), 5);
        // three new rays beyond the tree cone's
        assert_eq!(fan.rays().len(), 6);
        let coarse = tree_cone(&ctx, &t).unwrap();
        assert!(is_subdivision(&ctx, &fan, &coarse).unwrap());
    }

    #[test]
    fn neighbor_cone_subdivides_into_three() {
        let ctx = QuotientLattice::new(6).unwrap();
        let t = MarkedTree::new(6, 4, vec![(0, 1), (1, 2), (2, 3)], vec![1, 2, 0, 0, 3, 3])
            .unwrap();
        let x = x_example();
        let (fan, _) = subdivide_tree_cone(&ctx, &t, &x).unwrap();
        assert_eq!(fan.maximal_cones().len(), 3);
        let coarse = tree_cone(&ctx, &t).unwrap();
        assert!(is_subdivision(&ctx, &fan, &coarse).unwrap());
    }

    #[test]
    fn rubber_fan_counting_identity_n4() {
        let x = RamificationData::new(vec![2, 1, -2, -1]).unwrap();
        let m = build_delta_rub(&x).unwrap();
        assert_eq!(m.fan.maximal_cones().len(), extension_count(&x).unwrap());
        // n = 4: every tree cone is a ray; the fan is Delta_4 itself
        assert_eq!(m.fan.maximal_cones().len(), 3);
        assert_eq!(m.provenance.len(), 3);
    }

    #[test]
    fn stellar_factorization_of_alpha() {
        let ctx = QuotientLattice::new(6).unwrap();
        let t = tree_alpha();
        let x = x_example();
        let steps = verify_stellar_factorization(&ctx, &x, &t).unwrap();
        assert_eq!(steps.len(), 3);
        assert!(replay_stellar_sequence(&ctx, &x, &t, &steps).unwrap());
    }

    #[test]
    fn stellar_factorization_total_order_is_empty() {
        // x = (2,1,-2,-1), tree {1,2}: the order is already total
        let ctx = QuotientLattice::new(4).unwrap();
        let x = RamificationData::new(vec![2, 1, -2, -1]).unwrap();
        let t = crate::trees::tree_from_splits(4, &[Split::new(4, &[1, 2]).unwrap()]).unwrap();
        let steps = verify_stellar_factorization(&ctx, &x, &t).unwrap();
        assert!(steps.is_empty());
    }

    #[test]
    fn stellar_factorization_of_neighbor_is_two_steps() {
        let ctx = QuotientLattice::new(6).unwrap();
        let t = MarkedTree::new(6, 4, vec![(0, 1), (1, 2), (2, 3)], vec![1, 2, 0, 0, 3, 3])
            .unwrap();
        let x = x_example();
        let steps = verify_stellar_factorization(&ctx, &x, &t).unwrap();
        assert_eq!(steps.len(), 2);
        assert!(replay_stellar_sequence(&ctx, &x, &t, &steps).unwrap());
    }
}
