//! Independent brute-force verification of double Hurwitz numbers via
//! transposition factorizations in the symmetric group.
//!
//! Conventions: the cycles of the permutations over both special fibers
//! are labeled bijectively by the entries of the ramification tuple
//! (respecting cycle lengths), the generated group must act transitively,
//! and the raw tuple count is divided by `d!`.

use crate::error::{Error, Result};
use crate::invariants::hurwitz_number;
use crate::relmaps::RamificationData;
use num::{BigInt, BigRational, One, Zero};
use std::collections::BTreeMap;

/// Discrete data of a factorization count: degree and transposition count
/// are determined by the tuple.
#[derive(Clone, Debug)]
pub struct FactorizationQuery {
    pub x: RamificationData,
    pub d: i64,
    pub r: usize,
}

impl FactorizationQuery {
    pub fn new(x: RamificationData) -> Self {
        let d = x.degree();
        let r = x.branch_count();
        FactorizationQuery { x, d, r }
    }
}

type Perm = Vec<usize>;

fn compose(a: &Perm, b: &Perm) -> Perm {
    // (a * b)(i) = a(b(i))
    b.iter().map(|&i| a[i]).collect()
}

fn cycles_of(p: &Perm) -> Vec<Vec<usize>> {
    let d = p.len();
    let mut seen = vec![false; d];
    let mut cycles = Vec::new();
    for start in 0..d {
        if seen[start] {
            continue;
        }
        let mut c = vec![start];
        seen[start] = true;
        let mut i = p[start];
        while i != start {
            seen[i] = true;
            c.push(i);
            i = p[i];
        }
        cycles.push(c);
    }
    cycles
}

fn cycle_lengths(p: &Perm) -> Vec<usize> {
    let mut lens: Vec<usize> = cycles_of(p).iter().map(|c| c.len()).collect();
    lens.sort_unstable();
    lens
}

/// Number of bijective labelings of the cycles by the given part multiset
/// (same lengths): the product over lengths of (multiplicity)!.
fn labelings(lens: &[usize]) -> u64 {
    let mut mult: BTreeMap<usize, u64> = BTreeMap::new();
    for &l in lens {
        *mult.entry(l).or_default() += 1;
    }
    mult.values().map(|&m| (1..=m).product::<u64>().max(1)).product()
}

fn transitive(d: usize, generators: &[&Perm]) -> bool {
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut Vec<usize>, v: usize) -> usize {
        if parent[v] != v {
            let r = find(parent, parent[v]);
            parent[v] = r;
        }
        parent[v]
    }
    for g in generators {
        for i in 0..d {
            let (a, b) = (find(&mut parent, i), find(&mut parent, g[i]));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let root = find(&mut parent, 0);
    (1..d).all(|i| find(&mut parent, i) == root)
}

fn transpositions(d: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            let mut p: Perm = (0..d).collect();
            p.swap(i, j);
            out.push(p);
        }
    }
    out
}

/// One permutation with cycles of the given lengths laid out in order.
fn canonical_of_type(lens: &[i64], d: usize) -> Perm {
    let mut p: Perm = (0..d).collect();
    let mut start = 0usize;
    for &l in lens {
        let l = l as usize;
        for i in 0..l {
            p[start + i] = start + (i + 1) % l;
        }
        start += l;
    }
    p
}

fn count_tuples_for(sigma0: &Perm, x: &RamificationData, d: usize, r: usize) -> BigInt {
    let neg_lens: Vec<usize> = {
        let mut lens: Vec<usize> = x.negative_part().iter().map(|&v| (-v) as usize).collect();
        lens.sort_unstable();
        lens
    };
    let taus = transpositions(d);
    let mut count = BigInt::zero();
    // depth-first over transposition tuples, composing incrementally
    fn rec(
        depth: usize,
        r: usize,
        product: &Perm,
        taus: &[Perm],
        chosen: &mut Vec<usize>,
        sigma0: &Perm,
        neg_lens: &[usize],
        d: usize,
        count: &mut BigInt,
    ) {
        if depth == r {
            let inv_lens = cycle_lengths(product);
            if inv_lens != neg_lens {
                return;
            }
            let mut gens: Vec<&Perm> = vec![sigma0];
            for &c in chosen.iter() {
                gens.push(&taus[c]);
            }
            if !transitive(d, &gens) {
                return;
            }
            // Riemann-Hurwitz tripwire: matching profiles with r = n - 2
            // transpositions force genus 0, i.e. the cycle counts over the
            // two special fibers sum to r + 2
            debug_assert_eq!(cycle_lengths(sigma0).len() + inv_lens.len(), r + 2);
            let _ = d;
            *count += BigInt::from(labelings(&inv_lens));
            return;
        }
        for (ti, tau) in taus.iter().enumerate() {
            let next = compose(product, tau);
            chosen.push(ti);
            rec(depth + 1, r, &next, taus, chosen, sigma0, neg_lens, d, count);
            chosen.pop();
        }
    }
    rec(0, r, sigma0, &taus, &mut Vec::new(), sigma0, &neg_lens, d, &mut count);
    count
}

/// The double Hurwitz number by conjugacy-pruned enumeration: one labeled
/// representative for the source permutation, scaled by its labeled class
/// size, divided by `d!`.
pub fn oracle_hurwitz(x: &RamificationData) -> Result<BigRational> {
    let q = FactorizationQuery::new(x.clone());
    if q.d > 8 {
        return Err(Error::Resource(format!("degree {} exceeds oracle guard 8", q.d)));
    }
    let d = q.d as usize;
    let pos = x.positive_part();
    let sigma0 = canonical_of_type(&pos, d);
    let count = count_tuples_for(&sigma0, x, d, q.r);
    // labeled class size of sigma0 is d!/prod(x+); dividing the total by
    // d! leaves count / prod(x+)
    let denom: BigInt = pos.iter().map(|&v| BigInt::from(v)).product();
    Ok(BigRational::new(count, denom))
}

/// Unpruned reference count: every labeled source permutation enumerated
/// explicitly, divided by `d!`.  Used to validate the pruning at small
/// degree.
pub fn oracle_hurwitz_naive(x: &RamificationData) -> Result<BigRational> {
    let q = FactorizationQuery::new(x.clone());
    if q.d > 4 {
        return Err(Error::Resource(format!(
            "degree {} exceeds naive oracle guard 4",
            q.d
        )));
    }
    let d = q.d as usize;
    let mut pos_lens: Vec<usize> = x.positive_part().iter().map(|&v| v as usize).collect();
    pos_lens.sort_unstable();
    let mut total = BigInt::zero();
    let mut perm: Perm = (0..d).collect();
    loop {
        if cycle_lengths(&perm) == pos_lens {
            let l0 = BigInt::from(labelings(&pos_lens));
            total += l0 * count_tuples_for(&perm, x, d, q.r);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let mut dfact = BigInt::one();
    for i in 1..=d {
        dfact *= BigInt::from(i as u64);
    }
    Ok(BigRational::new(total, dfact))
}

fn next_permutation(p: &mut Perm) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[derive(Clone, Debug)]
pub struct ReportRow {
    pub x: Vec<i64>,
    pub d: i64,
    pub r: usize,
    pub oracle: BigRational,
    pub tropical: BigInt,
    pub equal: bool,
}

/// Per-tuple comparison of the oracle count against the tropical Hurwitz
/// number.
pub fn oracle_vs_tropical_report(xs: &[RamificationData]) -> Result<Vec<ReportRow>> {
    use rayon::prelude::*;
    xs.par_iter()
        .map(|x| {
            let oracle = oracle_hurwitz(x)?;
            let tropical = hurwitz_number(x)?;
            let equal = oracle == BigRational::from(tropical.clone());
            Ok(ReportRow {
                x: x.entries().to_vec(),
                d: x.degree(),
                r: x.branch_count(),
                oracle,
                tropical,
                equal,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn qr(v: i64) -> BigRational {
        BigRational::from(BigInt::from(v))
    }

    #[test]
    fn oracle_2_1_is_4() {
        let x = RamificationData::new(vec![2, 1, -2, -1]).unwrap();
        assert_eq!(oracle_hurwitz(&x).unwrap(), qr(4));
    }

    #[test]
    fn oracle_1_1_is_2() {
        let x = RamificationData::new(vec![1, 1, -1, -1]).unwrap();
        assert_eq!(oracle_hurwitz(&x).unwrap(), qr(2));
    }

    #[test]
    fn oracle_symmetries() {
        let x = RamificationData::new(vec![2, 1, -2, -1]).unwrap();
        assert_eq!(
            oracle_hurwitz(&x).unwrap(),
            oracle_hurwitz(&x.negated()).unwrap()
        );
        // permutation within the positive part
        let y = RamificationData::new(vec![1, 2, -2, -1]).unwrap();
        assert_eq!(oracle_hurwitz(&x).unwrap(), oracle_hurwitz(&y).unwrap());
    }

    #[test]
    fn pruned_matches_naive_at_small_degree() {
        use crate::invariants::ramification_sweep;
        for x in ramification_sweep(4, 6) {
            let pruned = oracle_hurwitz(&x).unwrap();
            let naive = oracle_hurwitz_naive(&x).unwrap();
            assert_eq!(pruned, naive, "x = {:?}", x.entries());
        }
    }

    #[test]
    fn report_rows() {
        let x = RamificationData::new(vec![2, 1, -2, -1]).unwrap();
        let rows = oracle_vs_tropical_report(&[x]).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].equal);
        assert!(oracle_vs_tropical_report(&[]).unwrap().is_empty());
    }
}
