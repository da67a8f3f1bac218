//! Enumerative output: descendant invariants of the tropical line, double
//! Hurwitz numbers, psi-class loci, and weighted Hurwitz cycles.

pub mod cycle;

pub use cycle::{connected_through_codim1, hurwitz_cycle, Cell, HurwitzCycle};

use crate::error::{Error, Result};
use crate::moduli::all_edges_positive;
use crate::relmaps::{
    expansion_factor, linear_extensions, vertex_partial_order, MapType, RamificationData,
};
use crate::trees::enumerate_trees;
use num::{BigInt, BigRational, One, Zero};
use std::collections::BTreeSet;

pub type Rat = BigRational;

/// A descendant insertion: psi-power `k` paired with a point condition or
/// the identity class.
#[derive(Clone, Debug, PartialEq)]
pub struct Insertion {
    pub k: u32,
    pub condition: Condition,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Condition {
    Point(Rat),
    One,
}

impl Insertion {
    pub fn point(k: u32, value: Rat) -> Self {
        Insertion { k, condition: Condition::Point(value) }
    }
    pub fn one(k: u32) -> Self {
        Insertion { k, condition: Condition::One }
    }
    pub fn is_point(&self) -> bool {
        matches!(self.condition, Condition::Point(_))
    }
}

/// Whether the vertex carrying marked end `i` has stabilized valence at
/// least 4 (the closed psi locus).
pub fn psi_locus_member(mt: &MapType, marking: usize) -> Result<bool> {
    Ok(psi_valence(mt, marking)? >= 4)
}

/// Exact-valence variant: stabilized valence exactly 4.
pub fn psi_locus_member_exact(mt: &MapType, marking: usize) -> Result<bool> {
    Ok(psi_valence(mt, marking)? == 4)
}

fn psi_valence(mt: &MapType, marking: usize) -> Result<usize> {
    if marking == 0 || marking > mt.source().n() {
        return Err(Error::InvalidInput(format!(
            "marking {marking} outside 1..={}",
            mt.source().n()
        )));
    }
    let stab = mt.source().stabilize();
    Ok(stab.valence(stab.leaf_vertex(marking)))
}

/// One contributing combinatorial type of a descendant computation.
#[derive(Clone, Debug)]
pub struct DescendantType {
    /// Edges of the vertex tree (slots ordered by image position).
    pub edges: Vec<(usize, usize)>,
    /// Relative leaves at each slot.
    pub leaves: Vec<Vec<usize>>,
    /// Insertion indices (into the query) at each slot.
    pub insertions: Vec<Vec<usize>>,
    pub multiplicity: Rat,
}

#[derive(Clone, Debug)]
pub struct DescendantResult {
    pub value: BigInt,
    pub types: Vec<DescendantType>,
}

/// Counts rigid tropical maps with the given insertions, weighted by
/// `prod 1/k_i! * prod_V (sum of k at V)!`.
///
/// The rigid sector requires the number of point insertions to equal the
/// vertex count `n + r - 2 - sum k`; every vertex carries exactly one
/// point insertion, identity insertions are assigned freely, each vertex
/// has valence `3 + sum of its k`, all internal edges have positive
/// expansion factor, and edge orientations match the ordering of the point
/// values.
pub fn descendant(x: &RamificationData, insertions: &[Insertion]) -> Result<DescendantResult> {
    let n = x.n();
    let r = insertions.len();
    let ksum: i64 = insertions.iter().map(|i| i.k as i64).sum();
    let vstar = n as i64 + r as i64 - 2 - ksum;
    let point_idx: Vec<usize> = (0..r).filter(|&i| insertions[i].is_point()).collect();
    let s = point_idx.len();
    if vstar < 1 || s as i64 != vstar {
        return Err(Error::InvalidInput(format!(
            "non-rigid sector: {s} point insertions vs required vertex count {vstar}"
        )));
    }
    let v = vstar as usize;
    if v > 8 {
        return Err(Error::Resource(format!("vertex count {v} exceeds guard 8")));
    }
    // genericity: point values pairwise distinct
    let mut values: Vec<&Rat> = point_idx
        .iter()
        .map(|&i| match &insertions[i].condition {
            Condition::Point(p) => p,
            Condition::One => unreachable!(),
        })
        .collect();
    values.sort();
    if values.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("coincident point values".into()));
    }
    // slot j carries the point insertion with the j-th smallest value
    let mut slots_by_value: Vec<usize> = point_idx.clone();
    slots_by_value.sort_by(|&a, &b| {
        let (Condition::Point(pa), Condition::Point(pb)) =
            (&insertions[a].condition, &insertions[b].condition)
        else {
            unreachable!()
        };
        pa.cmp(pb)
    });
    let one_idx: Vec<usize> = (0..r).filter(|&i| !insertions[i].is_point()).collect();

    let mut total = Rat::zero();
    let mut types = Vec::new();
    for edges in slot_trees(v) {
        let mut degree = vec![0usize; v];
        for &(a, b) in &edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        for one_assign in assignments(one_idx.len(), v) {
            // insertions at each slot: its point insertion plus assigned ones
            let mut ins_at: Vec<Vec<usize>> = (0..v).map(|j| vec![slots_by_value[j]]).collect();
            for (oi, &slot) in one_assign.iter().enumerate() {
                ins_at[slot].push(one_idx[oi]);
            }
            // required relative-leaf count per slot from the valence rule
            let mut leaf_count = vec![0i64; v];
            let mut ok = true;
            for j in 0..v {
                let kv: i64 = ins_at[j].iter().map(|&i| insertions[i].k as i64).sum();
                let c = 3 + kv - degree[j] as i64 - ins_at[j].len() as i64;
                if c < 0 {
                    ok = false;
                    break;
                }
                leaf_count[j] = c;
            }
            if !ok || leaf_count.iter().sum::<i64>() != n as i64 {
                continue;
            }
            let counts: Vec<usize> = leaf_count.iter().map(|&c| c as usize).collect();
            for leaves in partitions_with_counts(n, &counts) {
                if !orientation_consistent(x, &edges, &leaves, v) {
                    continue;
                }
                let mult = type_multiplicity(insertions, &ins_at);
                total += &mult;
                types.push(DescendantType {
                    edges: edges.clone(),
                    leaves: leaves.clone(),
                    insertions: ins_at.clone(),
                    multiplicity: mult,
                });
            }
        }
    }
    if !total.is_integer() {
        return Err(Error::Internal(format!("non-integral descendant total {total}")));
    }
    Ok(DescendantResult { value: total.to_integer(), types })
}

/// `prod_V (sum of k at V)! / prod_i k_i!`
fn type_multiplicity(insertions: &[Insertion], ins_at: &[Vec<usize>]) -> Rat {
    let mut m = Rat::one();
    for at in ins_at {
        let kv: u64 = at.iter().map(|&i| insertions[i].k as u64).sum();
        m *= Rat::from(BigInt::from(factorial(kv)));
        for &i in at {
            m /= Rat::from(BigInt::from(factorial(insertions[i].k as u64)));
        }
    }
    m
}

pub(crate) fn factorial(k: u64) -> u64 {
    (1..=k).product::<u64>().max(1)
}

/// Every edge must have positive flux pointing from the earlier slot to
/// the later slot (slots are ordered by image position).
fn orientation_consistent(
    x: &RamificationData,
    edges: &[(usize, usize)],
    leaves: &[Vec<usize>],
    v: usize,
) -> bool {
    // leaf side sums via component search on the slot tree minus the edge
    for (ei, &(a, b)) in edges.iter().enumerate() {
        let mut side = vec![false; v];
        // component of b in tree minus edge ei
        let mut stack = vec![b];
        side[b] = true;
        while let Some(u) = stack.pop() {
            for (ej, &(p, q)) in edges.iter().enumerate() {
                if ej == ei {
                    continue;
                }
                for (s, t) in [(p, q), (q, p)] {
                    if s == u && !side[t] {
                        side[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        let flux: i64 = (0..v)
            .filter(|&j| side[j])
            .flat_map(|j| leaves[j].iter())
            .map(|&l| x.entry(l))
            .sum();
        // slot index order is image order: b later than a iff b > a
        let want_positive = b > a;
        if flux == 0 || (flux > 0) != want_positive {
            return false;
        }
    }
    true
}

/// Labeled trees on `v` slots via Pruefer sequences, edges normalized.
pub(crate) fn slot_trees(v: usize) -> Vec<Vec<(usize, usize)>> {
    if v == 1 {
        return vec![vec![]];
    }
    if v == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out = Vec::new();
    let mut seq = vec![0usize; v - 2];
    loop {
        out.push(pruefer_to_edges(&seq, v));
        // increment
        let mut i = 0;
        loop {
            if i == seq.len() {
                out.sort();
                out.dedup();
                return out;
            }
            seq[i] += 1;
            if seq[i] < v {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

fn pruefer_to_edges(seq: &[usize], v: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; v];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(v - 1);
    let mut deg = degree.clone();
    let mut used = vec![false; v];
    for &s in seq {
        let leaf = (0..v).find(|&j| deg[j] == 1 && !used[j]).unwrap();
        used[leaf] = true;
        deg[s] -= 1;
        edges.push((leaf.min(s), leaf.max(s)));
    }
    let rest: Vec<usize> = (0..v).filter(|&j| !used[j] && deg[j] == 1).collect();
    edges.push((rest[0].min(rest[1]), rest[0].max(rest[1])));
    edges.sort();
    edges
}

/// All maps from `count` items to `v` slots, lexicographic.
pub(crate) fn assignments(count: usize, v: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; count];
    loop {
        out.push(cur.clone());
        let mut i = 0;
        loop {
            if i == count {
                return out;
            }
            cur[i] += 1;
            if cur[i] < v {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// All ways to distribute labels `1..=n` over slots with prescribed
/// counts, each slot's labels ascending; deterministic order.
pub(crate) fn partitions_with_counts(n: usize, counts: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = counts.iter().map(|&c| Vec::with_capacity(c)).collect();
    fn rec(
        label: usize,
        n: usize,
        counts: &[usize],
        current: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if label > n {
            out.push(current.clone());
            return;
        }
        for j in 0..counts.len() {
            if current[j].len() < counts[j] {
                current[j].push(label);
                rec(label + 1, n, counts, current, out);
                current[j].pop();
            }
        }
    }
    rec(1, n, counts, &mut current, &mut out);
    out
}

/// The tropical double Hurwitz number: the sum over trivalent trees with
/// all edge weights positive and over linear extensions of their vertex
/// order, of the product of the internal expansion factors.
pub fn hurwitz_number(x: &RamificationData) -> Result<BigInt> {
    let mut total = BigInt::zero();
    for t in enumerate_trees(x.n(), true)? {
        if !all_edges_positive(&t, x)? {
            continue;
        }
        let mut product = BigInt::one();
        for ei in 0..t.edges().len() {
            product *= BigInt::from(expansion_factor(&t, ei, x)?);
        }
        let order = vertex_partial_order(&t, x)?;
        let exts = linear_extensions(&order).len();
        total += product * BigInt::from(exts as u64);
    }
    Ok(total)
}

/// Canonical tuples (positives descending, then negatives descending by
/// absolute value) for all ramification data with degree at most
/// `max_degree` and at most `max_n` entries.
pub fn ramification_sweep(max_degree: i64, max_n: usize) -> Vec<RamificationData> {
    fn partitions(d: i64) -> Vec<Vec<i64>> {
        fn rec(rest: i64, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if rest == 0 {
                out.push(cur.clone());
                return;
            }
            let mut p = max.min(rest);
            while p >= 1 {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
                p -= 1;
            }
        }
        let mut out = Vec::new();
        rec(d, d, &mut Vec::new(), &mut out);
        out
    }
    let mut sweep = Vec::new();
    let mut seen = BTreeSet::new();
    for d in 1..=max_degree {
        for pos in partitions(d) {
            for neg in partitions(d) {
                let n = pos.len() + neg.len();
                if n < 3 || n > max_n {
                    continue;
                }
                let mut x: Vec<i64> = pos.clone();
                x.extend(neg.iter().map(|&v| -v));
                if seen.insert(x.clone()) {
                    sweep.push(RamificationData::new(x).expect("valid sweep tuple"));
                }
            }
        }
    }
    sweep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relmaps::MapType;
    use crate::trees::MarkedTree;

    fn qr(v: i64) -> Rat {
        Rat::from(BigInt::from(v))
    }

    #[test]
    fn golden_descendant_value_is_12() {
        let x = RamificationData::new(vec![-6, 3, 2, 1]).unwrap();
        let ins = vec![
            Insertion::one(2),
            Insertion::point(1, qr(0)),
            Insertion::point(0, qr(1)),
        ];
        let res = descendant(&x, &ins).unwrap();
        assert_eq!(res.value, BigInt::from(12));
        assert_eq!(res.types.len(), 6);
        let mut mults: Vec<Rat> = res.types.iter().map(|t| t.multiplicity.clone()).collect();
        mults.sort();
        assert_eq!(mults, vec![qr(1), qr(1), qr(1), qr(3), qr(3), qr(3)]);
    }

    #[test]
    fn descendant_insertion_relabeling_invariance() {
        let x = RamificationData::new(vec![-6, 3, 2, 1]).unwrap();
        let a = descendant(
            &x,
            &[Insertion::one(2), Insertion::point(1, qr(0)), Insertion::point(0, qr(1))],
        )
        .unwrap();
        let b = descendant(
            &x,
            &[Insertion::point(0, qr(1)), Insertion::point(1, qr(0)), Insertion::one(2)],
        )
        .unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn descendant_generic_point_invariance_same_order() {
        let x = RamificationData::new(vec![-6, 3, 2, 1]).unwrap();
        let a = descendant(
            &x,
            &[Insertion::one(2), Insertion::point(1, qr(0)), Insertion::point(0, qr(1))],
        )
        .unwrap();
        let b = descendant(
            &x,
            &[
                Insertion::one(2),
                Insertion::point(1, Rat::new(BigInt::from(-7), BigInt::from(2))),
                Insertion::point(0, Rat::new(BigInt::from(11), BigInt::from(3))),
            ],
        )
        .unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn descendant_rejects_non_rigid_and_coincident() {
        let x = RamificationData::new(vec![-6, 3, 2, 1]).unwrap();
        // wrong sector: all identity insertions
        assert!(descendant(&x, &[Insertion::one(2), Insertion::one(1), Insertion::one(0)]).is_err());
        // coincident points
        assert!(descendant(
            &x,
            &[Insertion::one(2), Insertion::point(1, qr(0)), Insertion::point(0, qr(0))]
        )
        .is_err());
    }

    #[test]
    fn all_tau1_descendant_counts_types_without_weights() {
        // with the printed multiplicity rule the all-tau_1 descendant counts
        // contributing types (weights enter the Hurwitz cycle instead)
        let x = RamificationData::new(vec![2, 1, -2, -1]).unwrap();
        let res = descendant(&x, &[Insertion::point(1, qr(0)), Insertion::point(1, qr(1))])
            .unwrap();
        assert_eq!(res.value, BigInt::from(2));
        assert_eq!(res.types.len(), 2);
    }

    #[test]
    fn hurwitz_number_2_1() {
        let x = RamificationData::new(vec![2, 1, -2, -1]).unwrap();
        assert_eq!(hurwitz_number(&x).unwrap(), BigInt::from(4));
    }

    #[test]
    fn hurwitz_number_1_1() {
        let x = RamificationData::new(vec![1, 1, -1, -1]).unwrap();
        assert_eq!(hurwitz_number(&x).unwrap(), BigInt::from(2));
    }

    #[test]
    fn hurwitz_number_negation_symmetry() {
        for x in ramification_sweep(4, 6) {
            let a = hurwitz_number(&x).unwrap();
            let b = hurwitz_number(&x.negated()).unwrap();
            assert_eq!(a, b, "x = {:?}", x.entries());
        }
    }

    #[test]
    fn psi_locus_on_types() {
        let x = RamificationData::new(vec![2, 1, -2, -1]).unwrap();
        // trivalent type: no marking lies in the psi locus
        let t = MarkedTree::new(4, 2, vec![(0, 1)], vec![0, 0, 1, 1]).unwrap();
        let mt = MapType::from_extension(&t, &x, &[0, 1]).unwrap();
        for i in 1..=4 {
            assert!(!psi_locus_member(&mt, i).unwrap());
        }
        // star tree: every vertex is 4-valent
        let star = MarkedTree::star(4).unwrap();
        let mt = MapType::from_extension(&star, &x, &[0]).unwrap();
        assert!(psi_locus_member(&mt, 1).unwrap());
        assert!(psi_locus_member_exact(&mt, 1).unwrap());
        assert!(psi_locus_member(&mt, 5).is_err());
    }

    #[test]
    fn sweep_is_nonempty_and_valid() {
        let sweep = ramification_sweep(5, 6);
        assert!(sweep.len() > 10);
        for x in &sweep {
            assert!(x.degree() <= 5);
            assert!(x.n() <= 6);
        }
    }
}
