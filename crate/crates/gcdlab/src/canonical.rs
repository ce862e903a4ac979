//! The combinatorial canonical reduction: j-maximal closure (Part 1) and
//! j-chain compactification (Part 2), producing a kappa(t)-canonical set of
//! the same cardinality whose sum under the doubled weights eta(t) is no
//! smaller.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gcdcore::IndexSet;
use crate::multiindex::MultiIndex;
use crate::weights::WeightSequence;

/// Whether B is kappa-canonical: beta in B and e_j <= beta for some j with
/// kappa < j <= N imply beta - e_j in B.
pub fn is_kappa_canonical(b: &IndexSet, kappa: usize) -> bool {
    let n = b.len();
    let set: BTreeSet<&MultiIndex> = b.members().iter().collect();
    for beta in b.members() {
        for j in beta.support() {
            let j_us = j as usize;
            if j_us > kappa && j_us <= n {
                let down = beta.sub_unit(j).expect("j is in the support");
                if !set.contains(&down) {
                    return false;
                }
            }
        }
    }
    true
}

fn support_union(set: &BTreeSet<MultiIndex>) -> BTreeSet<u32> {
    let mut union = BTreeSet::new();
    for m in set {
        union.extend(m.support());
    }
    union
}

/// One round of maximal-closure replacements in coordinate j. Walks the
/// occupied levels downward; at each level, every j-maximal member whose
/// e_j-predecessor is missing is replaced by that predecessor, all in one
/// pass. Stops as soon as the closure property holds at the top level.
fn reduce_coordinate(set: &mut BTreeSet<MultiIndex>, j: u32) -> bool {
    let mut changed = false;
    loop {
        let nu = set.iter().map(|m| m.exponent(j)).max().unwrap_or(0);
        if nu == 0 {
            return changed;
        }
        let violators: Vec<MultiIndex> = set
            .iter()
            .filter(|m| m.exponent(j) == nu)
            .filter(|m| {
                let down = m.sub_unit(j).expect("exponent is positive");
                !set.contains(&down)
            })
            .cloned()
            .collect();
        if violators.is_empty() {
            return changed;
        }
        let before = set.len();
        for v in violators {
            let down = v.sub_unit(j).expect("exponent is positive");
            set.remove(&v);
            // beta - e_j not in B is the replacement trigger, so no collision
            let inserted = set.insert(down);
            debug_assert!(inserted, "replacement collided with an existing member");
        }
        debug_assert_eq!(set.len(), before, "cardinality must be preserved");
        changed = true;
    }
}

/// Part 1 of the reduction: returns a set of the same cardinality in which
/// every j-maximal member has its e_j-predecessor present, for every j, and
/// whose sum S(t, .) is no smaller for any decreasing positive t. As a
/// consequence the union of supports has at most N-1 elements.
pub fn part1_reduce(b: &IndexSet) -> IndexSet {
    let mut set: BTreeSet<MultiIndex> = b.members().iter().cloned().collect();
    // Coordinates are processed in ascending order; a replacement in a later
    // coordinate can re-open an earlier one, so iterate to a fixed point.
    loop {
        let mut changed = false;
        for j in support_union(&set) {
            changed |= reduce_coordinate(&mut set, j);
        }
        if !changed {
            break;
        }
    }
    debug_assert!(closure_property_holds(&set));
    IndexSet::new(set.into_iter().collect()).expect("cardinality preserved")
}

fn closure_property_holds(set: &BTreeSet<MultiIndex>) -> bool {
    for j in support_union(set) {
        let nu = set.iter().map(|m| m.exponent(j)).max().unwrap_or(0);
        for m in set.iter().filter(|m| m.exponent(j) == nu) {
            let down = m.sub_unit(j).expect("nu > 0 on the support");
            if !set.contains(&down) {
                return false;
            }
        }
    }
    true
}

/// Part 2: for every coordinate j > kappa in the union of supports, the set
/// is partitioned into j-chains (members differing only in coordinate j) and
/// each chain of size s is replaced by its base mu together with
/// mu + e_j, ..., mu + (s-1) e_j.
pub fn part2_compactify(b: &IndexSet, kappa: usize) -> Result<IndexSet> {
    let n = b.len();
    if kappa >= n {
        return Err(Error::KappaNotBelowN { kappa, n });
    }
    let mut set: BTreeSet<MultiIndex> = b.members().iter().cloned().collect();
    let coords: Vec<u32> = support_union(&set)
        .into_iter()
        .filter(|&j| j as usize > kappa)
        .collect();
    for j in coords {
        let mut chains: std::collections::BTreeMap<MultiIndex, usize> = Default::default();
        for m in &set {
            *chains.entry(m.without_coordinate(j)).or_insert(0) += 1;
        }
        let mut next = BTreeSet::new();
        for (base, size) in chains {
            for a in 0..size {
                let inserted = next.insert(base.add_units(j, a as u32));
                debug_assert!(inserted);
            }
        }
        debug_assert_eq!(next.len(), set.len());
        set = next;
    }
    IndexSet::new(set.into_iter().collect())
}

/// Full reduction of Lemma-3.2 type: Part 1 followed by Part 2 at
/// kappa = kappa(t), returning the reduced set together with eta(t).
///
/// Postconditions (exercised by the property suite): the output has N
/// members, is kappa(t)-canonical, its supports unite to at most N-1
/// positions, and S(eta(t), B') >= S(t, B).
pub fn canonical_reduce(b: &IndexSet, t: &WeightSequence) -> Result<(IndexSet, WeightSequence)> {
    let kappa = t.kappa();
    if kappa >= b.len() {
        return Err(Error::KappaNotBelowN { kappa, n: b.len() });
    }
    let closed = part1_reduce(b);
    let compact = part2_compactify(&closed, kappa)?;
    Ok((compact, t.eta()))
}
