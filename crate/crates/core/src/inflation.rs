//! The inflation complex of the domain boundary and the predicted children
//! of a tile crossing a given cell.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::raag::{diagonal_elements, ideal_facets, DefiningGraph, SignedSet};
use crate::rule::SubdivisionRule;
use crate::tiling::Tiling;

/// Facets of the inflated boundary and the ridges between them.
#[derive(Clone, Debug, Serialize)]
pub struct InflationComplex {
    /// One facet per non-ideal cell, then one per ideal facet.
    pub facets: Vec<SignedSet>,
    pub ideal: Vec<bool>,
    /// Pairs `(i, j)` where cell `j` is a codimension-one face of cell `i`.
    pub ridges: Vec<(usize, usize)>,
}

impl InflationComplex {
    pub fn new(graph: &DefiningGraph) -> Self {
        let mut facets = diagonal_elements(graph);
        let mut ideal = vec![false; facets.len()];
        for f in ideal_facets(graph) {
            facets.push(f);
            ideal.push(true);
        }
        let mut ridges = Vec::new();
        for (i, &a) in facets.iter().enumerate() {
            for (j, &b) in facets.iter().enumerate() {
                if b.len() == a.len() + 1 && a.is_sub_of(b) {
                    ridges.push((i, j));
                }
            }
        }
        Self { facets, ideal, ridges }
    }

    pub fn non_ideal_count(&self) -> usize {
        self.ideal.iter().filter(|&&i| !i).count()
    }
}

/// Predicted children of a tile whose domain was reached across `sigma`,
/// as cells of the new domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Descriptor {
    pub sigma: SignedSet,
    /// Non-ideal cells missing both the gluing facets and their non-ideal closure.
    pub candidates: Vec<SignedSet>,
    /// Candidates whose crossing leaves the first ball.
    pub surviving: Vec<SignedSet>,
    /// Candidates absorbed in the same round.
    pub collapse_liable: Vec<SignedSet>,
}

/// Whether `t_sigma · t_s` lies outside `{1} ∪ diagonals`, decided on the
/// exponent vector `sigma + s`.
fn leaves_first_ball(graph: &DefiningGraph, sigma: SignedSet, s: SignedSet) -> bool {
    let mut support = 0u32;
    for x in 0..graph.rank() {
        let e = sigma.sign(x) + s.sign(x);
        if e.abs() > 1 {
            return true;
        }
        if e != 0 {
            support |= 1 << x;
        }
    }
    !graph.is_clique(support)
}

pub fn child_descriptor(graph: &DefiningGraph, sigma: SignedSet) -> Result<Descriptor> {
    if sigma.is_empty() || !graph.is_clique(sigma.support()) {
        return Err(Error::IdealCell(graph.fmt_signed(sigma)));
    }
    let mut candidates = Vec::new();
    for w in diagonal_elements(graph) {
        let touches_gluing = sigma.entries().any(|(x, s)| w.sign(x) == -s);
        if touches_gluing {
            continue;
        }
        let meets = w.support() & sigma.support() != 0;
        let detached = sigma.entries().all(|(x, s)| w.sign(x) == s || !graph.is_clique(w.support() | 1 << x));
        if meets || detached {
            candidates.push(w);
        }
    }
    let (surviving, collapse_liable) =
        candidates.iter().partition(|&&w| w.subsets().skip(1).all(|s| leaves_first_ball(graph, sigma, s)));
    Ok(Descriptor { sigma, candidates, surviving, collapse_liable })
}

/// Result of comparing descriptors against the built children.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    /// Tiles compared.
    pub checked: usize,
    /// Tiles whose children's crossed cells differ from the descriptor.
    pub mismatches: usize,
    /// Mismatch counts keyed by type name.
    pub by_type: BTreeMap<String, usize>,
    /// Up to a few `(owner, expected, found)` examples, as text.
    pub examples: Vec<String>,
}

/// Compares every non-ideal tile with children against its descriptor.
pub fn cross_check(ball: &Ball, tilings: &[Tiling], rule: Option<&SubdivisionRule>) -> CrossCheck {
    let graph = ball.graph();
    let mut out = CrossCheck::default();
    let mut cache: BTreeMap<SignedSet, Vec<SignedSet>> = BTreeMap::new();
    for pair in tilings.windows(2) {
        let (cur, next) = (&pair[0], &pair[1]);
        let children = cur.children_in(next);
        for tile in cur.non_ideal() {
            let expected = cache.entry(tile.covered).or_insert_with(|| {
                let mut s = child_descriptor(graph, tile.covered).map(|d| d.surviving).unwrap_or_default();
                s.sort();
                s
            });
            let mut found: Vec<SignedSet> =
                children[tile.id].iter().map(|&c| next.tiles[c].covered).collect();
            found.sort();
            out.checked += 1;
            if found != *expected {
                out.mismatches += 1;
                let name = rule
                    .zip(tile.type_id)
                    .map(|(r, t)| r.types[t].name.clone())
                    .unwrap_or_else(|| "?".into());
                *out.by_type.entry(name).or_default() += 1;
                if out.examples.len() < 5 {
                    let fmt = |v: &[SignedSet]| {
                        v.iter().map(|&s| graph.fmt_signed(s)).collect::<Vec<_>>().join(" ")
                    };
                    out.examples.push(format!(
                        "{}: expected [{}] found [{}]",
                        tile.owner.to_literal(graph),
                        fmt(expected),
                        fmt(&found)
                    ));
                }
            }
        }
    }
    out
}
