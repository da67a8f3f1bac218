//! Leaf-labeled tree combinatorics: representation, enumeration, splits,
//! stabilization.
//!
//! A [`MarkedTree`] is the combinatorial type of a point of the tropical
//! moduli space of rational curves: a tree whose leaves carry the labels
//! `1..=n` and whose internal vertices are anonymous.  Two trees are equal
//! when they induce the same multiset of splits; vertex ids carry no
//! meaning beyond indexing.

use crate::error::{Error, Result};
use std::collections::VecDeque;
use std::fmt;

pub type VertexId = usize;

/// A bipartition of the leaf labels `{1..n}` induced by cutting an
/// internal edge, stored in canonical form: the side not containing `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Split {
    n: usize,
    mask: u32,
}

impl Split {
    /// Canonicalizes an arbitrary side of a bipartition.  Both sides must
    /// have at least two labels.
    pub fn new(n: usize, labels: &[usize]) -> Result<Self> {
        if n > 32 {
            return Err(Error::Resource(format!("leaf count {n} exceeds 32")));
        }
        let mut mask = 0u32;
        for &l in labels {
            if l == 0 || l > n {
                return Err(Error::InvalidInput(format!("leaf label {l} out of 1..={n}")));
            }
            mask |= 1 << (l - 1);
        }
        if mask.count_ones() as usize != labels.len() {
            return Err(Error::InvalidInput("repeated leaf label in split".into()));
        }
        let full = Self::full_mask(n);
        if mask & (1 << (n - 1)) != 0 {
            mask = full & !mask;
        }
        let size = mask.count_ones() as usize;
        if size < 2 || size > n - 2 {
            return Err(Error::InvalidInput(format!(
                "split side size {size} outside 2..={}",
                n - 2
            )));
        }
        Ok(Split { n, mask })
    }

    fn full_mask(n: usize) -> u32 {
        if n == 32 {
            u32::MAX
        } else {
            (1u32 << n) - 1
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Labels on the canonical side, ascending.
    pub fn labels(&self) -> Vec<usize> {
        (1..=self.n).filter(|&l| self.contains(l)).collect()
    }

    pub fn complement_labels(&self) -> Vec<usize> {
        (1..=self.n).filter(|&l| !self.contains(l)).collect()
    }

    pub fn contains(&self, label: usize) -> bool {
        label >= 1 && label <= self.n && self.mask & (1 << (label - 1)) != 0
    }

    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// True iff exactly one of the two labels lies on the canonical side.
    pub fn separates(&self, a: usize, b: usize) -> bool {
        self.contains(a) != self.contains(b)
    }

    /// All canonical splits for `n` labels, ordered.
    pub fn all(n: usize) -> Vec<Split> {
        let mut out = Vec::new();
        let full = Self::full_mask(n);
        for mask in 1..full {
            if mask & (1 << (n - 1)) != 0 {
                continue;
            }
            let size = mask.count_ones() as usize;
            if size >= 2 && size <= n - 2 {
                out.push(Split { n, mask });
            }
        }
        out.sort();
        out
    }
}

impl PartialOrd for Split {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Split {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.labels().cmp(&other.labels())
    }
}

impl fmt::Debug for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.labels().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels().iter().map(|l| l.to_string()).collect();
        write!(f, "{}", labels.join(","))
    }
}

/// A tree with `n` labeled leaves attached to anonymous internal vertices.
#[derive(Clone)]
pub struct MarkedTree {
    n: usize,
    num_vertices: usize,
    edges: Vec<(VertexId, VertexId)>,
    leaf_at: Vec<VertexId>,
}

impl MarkedTree {
    /// Builds and validates a tree.  `leaf_at[i]` is the vertex carrying
    /// leaf label `i+1`.  The graph on internal vertices must be connected
    /// and acyclic.
    pub fn new(
        n: usize,
        num_vertices: usize,
        edges: Vec<(VertexId, VertexId)>,
        leaf_at: Vec<VertexId>,
    ) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(format!("leaf count {n} < 3")));
        }
        if leaf_at.len() != n {
            return Err(Error::InvalidInput("leaf_at length mismatch".into()));
        }
        if num_vertices == 0 {
            return Err(Error::InvalidInput("tree needs at least one vertex".into()));
        }
        if edges.len() + 1 != num_vertices {
            return Err(Error::InvalidInput(format!(
                "{} edges on {} vertices cannot form a tree",
                edges.len(),
                num_vertices
            )));
        }
        for &(u, v) in &edges {
            if u >= num_vertices || v >= num_vertices || u == v {
                return Err(Error::InvalidEdge(format!("bad edge ({u},{v})")));
            }
        }
        for &v in &leaf_at {
            if v >= num_vertices {
                return Err(Error::InvalidInput(format!("leaf attached to missing vertex {v}")));
            }
        }
        let t = MarkedTree { n, num_vertices, edges, leaf_at };
        if !t.is_connected() {
            return Err(Error::InvalidInput("tree graph is disconnected or cyclic".into()));
        }
        Ok(t)
    }

    /// The n-leaf star: one vertex carrying every leaf.
    pub fn star(n: usize) -> Result<Self> {
        Self::new(n, 1, vec![], vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn leaf_vertex(&self, label: usize) -> VertexId {
        self.leaf_at[label - 1]
    }

    pub fn leaves_at(&self, v: VertexId) -> Vec<usize> {
        (1..=self.n).filter(|&l| self.leaf_at[l - 1] == v).collect()
    }

    fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.num_vertices];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(w, _) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.num_vertices
    }

    /// Adjacency over internal edges: `adj[v] = [(neighbor, edge index)]`.
    pub fn adjacency(&self) -> Vec<Vec<(VertexId, usize)>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            adj[u].push((v, i));
            adj[v].push((u, i));
        }
        adj
    }

    /// Total valence: attached leaves plus incident internal edges.
    pub fn valence(&self, v: VertexId) -> usize {
        let leaves = self.leaf_at.iter().filter(|&&w| w == v).count();
        let edges = self.edges.iter().filter(|&&(a, b)| a == v || b == v).count();
        leaves + edges
    }

    pub fn is_stable(&self) -> bool {
        (0..self.num_vertices).all(|v| self.valence(v) >= 3)
    }

    pub fn is_trivalent(&self) -> bool {
        (0..self.num_vertices).all(|v| self.valence(v) == 3)
    }

    /// Leaf labels in the component of `t - e` containing `side`.
    pub fn side_leaves(&self, edge_idx: usize, side: VertexId) -> Result<Vec<usize>> {
        let &(u, v) = self
            .edges
            .get(edge_idx)
            .ok_or_else(|| Error::InvalidEdge(format!("edge index {edge_idx} out of range")))?;
        if side != u && side != v {
            return Err(Error::InvalidEdge(format!(
                "vertex {side} is not an endpoint of edge {edge_idx}"
            )));
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.num_vertices];
        seen[side] = true;
        let mut queue = VecDeque::from([side]);
        while let Some(w) = queue.pop_front() {
            for &(x, ei) in &adj[w] {
                if ei != edge_idx && !seen[x] {
                    seen[x] = true;
                    queue.push_back(x);
                }
            }
        }
        Ok((1..=self.n).filter(|&l| seen[self.leaf_at[l - 1]]).collect())
    }

    /// Canonical bipartition of the leaf labels induced by deleting the
    /// internal edge.
    pub fn edge_split(&self, edge_idx: usize) -> Result<Split> {
        let &(u, _) = self
            .edges
            .get(edge_idx)
            .ok_or_else(|| Error::InvalidEdge(format!("edge index {edge_idx} out of range")))?;
        let side = self.side_leaves(edge_idx, u)?;
        Split::new(self.n, &side)
    }

    /// Splits of all internal edges, sorted; duplicates are kept so the
    /// key also distinguishes unstabilized trees.
    pub fn splits(&self) -> Vec<Split> {
        let mut out: Vec<Split> = (0..self.edges.len())
            .map(|i| self.edge_split(i).expect("internal edge"))
            .collect();
        out.sort();
        out
    }

    /// Trees are compared by their sorted split multisets.
    pub fn canonical_key(&self) -> Vec<Split> {
        self.splits()
    }

    /// Removes 2-valent vertices, merging their incident edges.
    /// Idempotent; the result is stable or a single-vertex tree.
    pub fn stabilize(&self) -> MarkedTree {
        let mut n_v = self.num_vertices;
        let mut edges = self.edges.clone();
        let mut leaf_at = self.leaf_at.clone();
        loop {
            let valence = |v: usize, edges: &[(usize, usize)], leaf_at: &[usize]| {
                leaf_at.iter().filter(|&&w| w == v).count()
                    + edges.iter().filter(|&&(a, b)| a == v || b == v).count()
            };
            let candidate = (0..n_v).find(|&v| n_v > 1 && valence(v, &edges, &leaf_at) == 2);
            let Some(v) = candidate else { break };
            let incident: Vec<usize> = edges
                .iter()
                .enumerate()
                .filter(|&(_, &(a, b))| a == v || b == v)
                .map(|(i, _)| i)
                .collect();
            let leaves: Vec<usize> = (1..=self.n).filter(|&l| leaf_at[l - 1] == v).collect();
            match (incident.len(), leaves.len()) {
                (2, 0) => {
                    // merge the two edges across v
                    let (a1, b1) = edges[incident[0]];
                    let (a2, b2) = edges[incident[1]];
                    let u = if a1 == v { b1 } else { a1 };
                    let w = if a2 == v { b2 } else { a2 };
                    let (i, j) = (incident[0].max(incident[1]), incident[0].min(incident[1]));
                    edges.remove(i);
                    edges.remove(j);
                    edges.push((u, w));
                }
                (1, 1) => {
                    // leaf edge extends across v to the neighbor
                    let (a, b) = edges[incident[0]];
                    let u = if a == v { b } else { a };
                    leaf_at[leaves[0] - 1] = u;
                    edges.remove(incident[0]);
                }
                _ => break, // 2 leaves on a 2-valent vertex: nothing to merge into
            }
            // drop vertex v, compacting ids
            for e in edges.iter_mut() {
                if e.0 > v {
                    e.0 -= 1;
                }
                if e.1 > v {
                    e.1 -= 1;
                }
            }
            for w in leaf_at.iter_mut() {
                if *w > v {
                    *w -= 1;
                }
            }
            n_v -= 1;
        }
        MarkedTree { n: self.n, num_vertices: n_v, edges, leaf_at }
    }
}

impl PartialEq for MarkedTree {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.canonical_key() == other.canonical_key()
    }
}

impl Eq for MarkedTree {}

impl fmt::Debug for MarkedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MarkedTree(n={}, splits=[", self.n)?;
        for (i, s) in self.splits().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s:?}")?;
        }
        write!(f, "])")
    }
}

/// Enumerates every isomorphism class of stable leaf-labeled tree exactly
/// once, in deterministic order (lexicographic by sorted split sets).
/// With `trivalent_only`, only trees whose every vertex is 3-valent.
pub fn enumerate_trees(n: usize, trivalent_only: bool) -> Result<Vec<MarkedTree>> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("leaf count {n} < 3")));
    }
    let mut trees = vec![MarkedTree::star(3)?];
    for m in 4..=n {
        let mut next = Vec::new();
        for t in &trees {
            // insert leaf m into an internal edge
            for (ei, &(u, v)) in t.edges.iter().enumerate() {
                let mut edges = t.edges.clone();
                let w = t.num_vertices;
                edges[ei] = (u, w);
                edges.push((w, v));
                let mut leaf_at = t.leaf_at.clone();
                leaf_at.push(w);
                next.push(MarkedTree { n: m, num_vertices: w + 1, edges, leaf_at });
            }
            // insert leaf m into a leaf edge
            for l in 1..=t.n {
                let old = t.leaf_at[l - 1];
                let w = t.num_vertices;
                let mut edges = t.edges.clone();
                edges.push((old, w));
                let mut leaf_at = t.leaf_at.clone();
                leaf_at[l - 1] = w;
                leaf_at.push(w);
                next.push(MarkedTree { n: m, num_vertices: w + 1, edges, leaf_at });
            }
            // attach leaf m to an existing vertex (valence grows past 3)
            if !trivalent_only {
                for v in 0..t.num_vertices {
                    let mut leaf_at = t.leaf_at.clone();
                    leaf_at.push(v);
                    next.push(MarkedTree {
                        n: m,
                        num_vertices: t.num_vertices,
                        edges: t.edges.clone(),
                        leaf_at,
                    });
                }
            }
        }
        trees = next;
    }
    trees.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
    Ok(trees)
}

/// Reconstructs the unique stable tree with the given compatible split
/// set by splitting one vertex per split.
pub fn tree_from_splits(n: usize, splits: &[Split]) -> Result<MarkedTree> {
    let mut t = MarkedTree::star(n)?;
    for split in splits {
        if split.n() != n {
            return Err(Error::InvalidInput("split label count mismatch".into()));
        }
        t = split_vertex(&t, split)?;
    }
    let mut want: Vec<Split> = splits.to_vec();
    want.sort();
    if t.splits() != want {
        return Err(Error::InvalidInput("splits are not pairwise compatible".into()));
    }
    Ok(t)
}

/// Splits the unique vertex of `t` whose incident branches are separated
/// by the given bipartition, inserting one new internal edge.
fn split_vertex(t: &MarkedTree, split: &Split) -> Result<MarkedTree> {
    let adj = t.adjacency();
    'vertex: for v in 0..t.num_vertices() {
        // each incident branch: a neighbor subtree's leaf set, or a leaf
        let mut in_side: Vec<(Branch, bool)> = Vec::new();
        for &(w, ei) in &adj[v] {
            let leaves = t.side_leaves(ei, w).expect("internal edge");
            let inside = leaves.iter().all(|&l| split.contains(l));
            let outside = leaves.iter().all(|&l| !split.contains(l));
            if !inside && !outside {
                continue 'vertex;
            }
            in_side.push((Branch::Edge(ei, w), inside));
        }
        for l in t.leaves_at(v) {
            in_side.push((Branch::Leaf(l), split.contains(l)));
        }
        if in_side.iter().all(|&(_, s)| s) || in_side.iter().all(|&(_, s)| !s) {
            continue 'vertex;
        }
        // split v into v (I side) and a new vertex (complement side)
        let new_v = t.num_vertices();
        let mut edges = t.edges().to_vec();
        let mut leaf_at = t.leaf_at.clone();
        for (branch, inside) in in_side {
            if inside {
                continue;
            }
            match branch {
                Branch::Edge(ei, w) => {
                    edges[ei] = (w, new_v);
                }
                Branch::Leaf(l) => leaf_at[l - 1] = new_v,
            }
        }
        edges.push((v, new_v));
        return MarkedTree::new(t.n, new_v + 1, edges, leaf_at);
    }
    Err(Error::InvalidInput(format!(
        "split {split:?} is incompatible with the current tree"
    )))
}

enum Branch {
    Edge(usize, VertexId),
    Leaf(usize),
}

/// Graphviz DOT rendering: leaf labels boxed, internal vertices as dots.
pub fn to_dot(t: &MarkedTree) -> String {
    let mut out = String::from("graph tree {\n  node [shape=point];\n");
    for l in 1..=t.n() {
        out.push_str(&format!("  leaf{l} [shape=box, label=\"{l}\"];\n"));
    }
    for &(u, v) in t.edges() {
        out.push_str(&format!("  v{u} -- v{v};\n"));
    }
    for l in 1..=t.n() {
        out.push_str(&format!("  v{} -- leaf{l};\n", t.leaf_vertex(l)));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Caterpillar A(1,4) - C(3) - B(2) - D(5,6); the running 6-leaf
    /// example tree.
    pub(crate) fn tree_alpha() -> MarkedTree {
        // vertices: 0 = A, 1 = C, 2 = B, 3 = D
        MarkedTree::new(
            6,
            4,
            vec![(0, 1), (1, 2), (2, 3)],
            vec![0, 2, 1, 0, 3, 3],
        )
        .unwrap()
    }

    #[test]
    fn star_is_single_tree_for_n3() {
        let trees = enumerate_trees(3, false).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].num_vertices(), 1);
        assert!(trees[0].edges().is_empty());
    }

    #[test]
    fn four_leaf_trivalent_topologies() {
        let trees = enumerate_trees(4, true).unwrap();
        assert_eq!(trees.len(), 3);
        let splits: Vec<Vec<usize>> = trees
            .iter()
            .map(|t| t.splits()[0].labels())
            .collect();
        assert_eq!(splits, vec![vec![1, 2], vec![1, 3], vec![1, 4]]);
    }

    #[test]
    fn rejects_tiny_leaf_count() {
        assert!(enumerate_trees(2, false).is_err());
    }

    #[test]
    fn trivalent_counts_match_insertion_recursion() {
        // independent oracle: t(n) = t(n-1) * (2n-5)
        let mut expected = 1usize;
        for n in 4..=8 {
            expected *= 2 * n - 5;
            if n <= 7 {
                let got = enumerate_trees(n, true).unwrap().len();
                assert_eq!(got, expected, "trivalent count at n={n}");
            }
        }
    }

    #[test]
    fn six_leaf_trivalent_count_is_105() {
        assert_eq!(enumerate_trees(6, true).unwrap().len(), 105);
    }

    #[test]
    fn stable_counts_small_n() {
        // 3 trivalent + star for n=4; classical phylogenetic-tree counts
        assert_eq!(enumerate_trees(4, false).unwrap().len(), 4);
        assert_eq!(enumerate_trees(5, false).unwrap().len(), 26);
        assert_eq!(enumerate_trees(6, false).unwrap().len(), 236);
    }

    #[test]
    fn split_sets_are_unique_per_tree() {
        for n in 4..=6 {
            let trees = enumerate_trees(n, false).unwrap();
            let mut keys: Vec<_> = trees.iter().map(|t| t.canonical_key()).collect();
            keys.sort();
            keys.dedup();
            assert_eq!(keys.len(), trees.len(), "duplicate split sets at n={n}");
        }
    }

    #[test]
    fn trivalent_split_counts() {
        for n in 4..=6 {
            for t in enumerate_trees(n, true).unwrap() {
                let splits = t.splits();
                assert_eq!(splits.len(), n - 3);
                let mut uniq = splits.clone();
                uniq.dedup();
                assert_eq!(uniq.len(), splits.len());
                for s in &splits {
                    assert!(s.size() >= 2 && s.size() <= n - 2);
                }
            }
        }
    }

    #[test]
    fn caterpillar_edge_split() {
        let t = MarkedTree::new(4, 2, vec![(0, 1)], vec![0, 0, 1, 1]).unwrap();
        assert_eq!(t.edge_split(0).unwrap().labels(), vec![1, 2]);
    }

    #[test]
    fn tree_alpha_edge_splits() {
        let t = tree_alpha();
        // edge A-C
        assert_eq!(t.edge_split(0).unwrap().labels(), vec![1, 4]);
        // edge C-B separates {1,3,4}
        assert_eq!(t.edge_split(1).unwrap().labels(), vec![1, 3, 4]);
        // edge B-D separates {5,6}
        assert_eq!(t.edge_split(2).unwrap().labels(), vec![5, 6]);
        assert!(t.edge_split(3).is_err());
    }

    #[test]
    fn stabilize_is_identity_on_stable_trees() {
        for t in enumerate_trees(5, false).unwrap() {
            let s = t.stabilize();
            assert_eq!(s, t);
            assert_eq!(s.stabilize(), s);
        }
    }

    #[test]
    fn stabilize_suppresses_two_valent_path() {
        // path u - m - v with leaves 1,2 at u and 3,4 at v; m is 2-valent
        let t = MarkedTree::new(4, 3, vec![(0, 2), (2, 1)], vec![0, 0, 1, 1]).unwrap();
        let s = t.stabilize();
        assert_eq!(s.num_vertices(), 2);
        assert_eq!(s.edges().len(), 1);
        assert_eq!(s.splits()[0].labels(), vec![1, 2]);
    }

    #[test]
    fn stabilize_alpha_prime_gives_alpha() {
        // type alpha' from the 6-leaf example: subdivide each internal
        // edge of alpha with preimage vertices and hang the leaves lower
        let alpha = tree_alpha();
        // vertices 0..3 as in alpha, 4..8 subdividing: A-4-C, C-5-B, B-6-D,
        // plus 2-valent vertices 7 (on leaf 1 edge) and 8 (on leaf 3 edge)
        let t = MarkedTree::new(
            6,
            9,
            vec![(0, 4), (4, 1), (1, 5), (5, 2), (2, 6), (6, 3), (0, 7), (1, 8)],
            vec![7, 2, 8, 0, 3, 3],
        )
        .unwrap();
        assert!(!t.is_stable());
        let s = t.stabilize();
        assert!(s.is_stable());
        assert_eq!(s, alpha);
    }

    #[test]
    fn tree_from_splits_roundtrip() {
        let alpha = tree_alpha();
        let t = tree_from_splits(6, &alpha.splits()).unwrap();
        assert_eq!(t, alpha);
    }
}
