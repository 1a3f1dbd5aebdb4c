//! Empirical subdivision rules: tile types found by refining an initial
//! partition until each class determines its children.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::raag::DefiningGraph;
use crate::tiling::{EdgeKind, Tiling};

/// One tile type of an extracted rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TileType {
    pub name: String,
    pub ideal: bool,
    /// Support of the crossed cell for a representative tile.
    pub clique: u32,
    /// Region shape of a representative tile.
    pub shape: Vec<u8>,
    /// Child type index to multiplicity.
    pub children: BTreeMap<usize, usize>,
    /// Adjacency among the children of one tile, as sorted type pairs.
    pub child_adjacency: Vec<(usize, usize, EdgeKind)>,
}

impl TileType {
    pub fn child_count(&self) -> usize {
        self.children.values().sum()
    }
}

/// Tile types, their children and per-level counts.
#[derive(Clone, Debug, Serialize)]
pub struct SubdivisionRule {
    pub types: Vec<TileType>,
    /// True when the partition stopped splitting within the observed levels
    /// and every type has child data.
    pub stable: bool,
    /// Refinement rounds needed.
    pub depth: usize,
    pub coalesced: bool,
    /// Level-0 non-ideal classes keyed by exact clique and shape.
    pub raw_initial_classes: usize,
    /// Level-0 non-ideal classes keyed by clique orbit and shape.
    pub coalesced_initial_classes: usize,
    /// Tiles of the deepest levels that could not be matched to one type.
    pub untyped_tiles: usize,
    /// Representatives whose children disagreed with their type's children.
    pub inconsistent_tiles: usize,
    /// Non-ideal tiles per level and type.
    pub counts: Vec<Vec<usize>>,
}

fn type_name(i: usize) -> String {
    if i < 26 {
        ((b'A' + i as u8) as char).to_string()
    } else {
        format!("T{i}")
    }
}

fn orbit_key(mask: u32, autos: &[Vec<usize>]) -> u32 {
    autos
        .iter()
        .map(|p| {
            let mut out = 0u32;
            let mut m = mask;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                out |= 1 << p[i];
            }
            out
        })
        .min()
        .unwrap_or(mask)
}

type ClassKey = (u32, Vec<u32>, Vec<(u32, u32, EdgeKind)>);

/// Partitions the tiles of `tilings` into types and writes `type_id` on
/// every tile that can be typed. Needs at least three levels.
pub fn extract_rule(
    graph: &DefiningGraph,
    tilings: &mut [Tiling],
    coalesce: bool,
) -> Result<SubdivisionRule> {
    let levels = tilings.len();
    if levels < 3 {
        return Err(Error::TooFewLevels { needed: 3, got: levels });
    }
    let autos = graph.automorphisms();
    let identity = vec![(0..graph.rank()).collect::<Vec<_>>()];

    let initial = |autos: &[Vec<usize>]| -> Vec<Vec<u32>> {
        let mut intern: HashMap<(bool, u32, Vec<u8>), u32> = HashMap::new();
        tilings
            .iter()
            .map(|t| {
                t.tiles
                    .iter()
                    .map(|tile| {
                        let key = (tile.ideal, orbit_key(tile.covered.support(), autos), tile.shape());
                        let next = intern.len() as u32;
                        *intern.entry(key).or_insert(next)
                    })
                    .collect()
            })
            .collect()
    };
    let raw = initial(&identity);
    let coalesced_classes = initial(&autos);
    let count_classes = |c: &[Vec<u32>], upto: usize| {
        let mut s: Vec<u32> = c[..=upto].iter().flatten().copied().collect();
        s.sort_unstable();
        s.dedup();
        s.len()
    };
    let level0_classes = |c: &[Vec<u32>]| {
        let mut s: Vec<u32> = tilings[0].non_ideal().map(|t| c[0][t.id]).collect();
        s.sort_unstable();
        s.dedup();
        s.len()
    };
    let raw_initial_classes = level0_classes(&raw);
    let coalesced_initial_classes = level0_classes(&coalesced_classes);

    let children: Vec<Vec<Vec<usize>>> =
        (0..levels - 1).map(|l| tilings[l].children_in(&tilings[l + 1])).collect();
    let sibling_edges: Vec<Vec<Vec<(usize, usize, EdgeKind)>>> = (0..levels - 1)
        .map(|l| {
            let next = &tilings[l + 1];
            let mut per = vec![Vec::new(); tilings[l].tiles.len()];
            for &(a, b, k) in &next.edges {
                if let (Some(p), Some(q)) = (next.tiles[a].parent, next.tiles[b].parent) {
                    if p == q {
                        per[p].push((a, b, k));
                    }
                }
            }
            per
        })
        .collect();

    // history[k][l][i] is defined for levels l <= levels - 1 - k.
    let mut history: Vec<Vec<Vec<u32>>> = vec![if coalesce { coalesced_classes } else { raw }];
    let mut stable_at: Option<usize> = None;
    for k in 1..levels {
        let prev = &history[k - 1];
        let top = levels - 1 - k;
        let mut intern: HashMap<ClassKey, u32> = HashMap::new();
        let mut next: Vec<Vec<u32>> = Vec::with_capacity(top + 1);
        for l in 0..=top {
            let row = (0..tilings[l].tiles.len())
                .map(|i| {
                    let mut ch: Vec<u32> = children[l][i].iter().map(|&c| prev[l + 1][c]).collect();
                    ch.sort_unstable();
                    let mut adj: Vec<(u32, u32, EdgeKind)> = sibling_edges[l][i]
                        .iter()
                        .map(|&(a, b, kind)| {
                            let (x, y) = (prev[l + 1][a], prev[l + 1][b]);
                            (x.min(y), x.max(y), kind)
                        })
                        .collect();
                    adj.sort_unstable();
                    let key = (prev[l][i], ch, adj);
                    let id = intern.len() as u32;
                    *intern.entry(key).or_insert(id)
                })
                .collect();
            next.push(row);
        }
        let before = count_classes(prev, top);
        let after = intern.len();
        history.push(next);
        if before == after {
            stable_at = Some(k - 1);
            break;
        }
    }

    let (type_depth, mut stable) = match stable_at {
        Some(d) => (d, true),
        None => (levels - 2, false),
    };
    let classes = &history[type_depth];
    let typed_top = levels - 1 - type_depth;

    // Name non-ideal classes first, then ideal ones, by first appearance.
    let mut order: Vec<(bool, u32)> = Vec::new();
    for l in 0..=typed_top {
        for (i, tile) in tilings[l].tiles.iter().enumerate() {
            let key = (tile.ideal, classes[l][i]);
            if !order.contains(&key) {
                order.push(key);
            }
        }
    }
    order.sort_by_key(|&(ideal, _)| ideal);
    let type_of_class: HashMap<u32, usize> = order.iter().enumerate().map(|(t, &(_, c))| (c, t)).collect();

    for l in 0..=typed_top {
        for (i, tile) in tilings[l].tiles.iter_mut().enumerate() {
            tile.type_id = Some(type_of_class[&classes[l][i]]);
        }
    }
    // Deeper tiles carry coarser classes; match them when unambiguous.
    let mut untyped_tiles = 0;
    for l in typed_top + 1..levels {
        let j = levels - 1 - l;
        let mut coarse: HashMap<u32, Option<usize>> = HashMap::new();
        for ll in 0..=typed_top {
            for (i, tile) in tilings[ll].tiles.iter().enumerate() {
                let t = tile.type_id.expect("typed above");
                coarse
                    .entry(history[j][ll][i])
                    .and_modify(|e| {
                        if *e != Some(t) {
                            *e = None;
                        }
                    })
                    .or_insert(Some(t));
            }
        }
        for (i, tile) in tilings[l].tiles.iter_mut().enumerate() {
            tile.type_id = coarse.get(&history[j][l][i]).copied().flatten();
            if tile.type_id.is_none() {
                untyped_tiles += 1;
            }
        }
    }

    let mut types: Vec<TileType> = order
        .iter()
        .enumerate()
        .map(|(t, &(ideal, _))| TileType {
            name: type_name(t),
            ideal,
            clique: 0,
            shape: Vec::new(),
            children: BTreeMap::new(),
            child_adjacency: Vec::new(),
        })
        .collect();
    let mut seen = vec![false; types.len()];
    let mut has_children = vec![false; types.len()];
    let mut inconsistent_tiles = 0;
    for l in 0..levels {
        for (i, tile) in tilings[l].tiles.iter().enumerate() {
            let Some(t) = tile.type_id else { continue };
            if !seen[t] {
                seen[t] = true;
                types[t].clique = tile.covered.support();
                types[t].shape = tile.shape();
            }
            if tile.ideal || l + 1 >= levels {
                continue;
            }
            let kids = &children[l][i];
            let child_types: Option<Vec<usize>> =
                kids.iter().map(|&c| tilings[l + 1].tiles[c].type_id).collect();
            let Some(child_types) = child_types else { continue };
            let mut multiset = BTreeMap::new();
            for &c in &child_types {
                *multiset.entry(c).or_insert(0) += 1;
            }
            let mut adj: Vec<(usize, usize, EdgeKind)> = sibling_edges[l][i]
                .iter()
                .filter_map(|&(a, b, k)| {
                    let x = tilings[l + 1].tiles[a].type_id?;
                    let y = tilings[l + 1].tiles[b].type_id?;
                    Some((x.min(y), x.max(y), k))
                })
                .collect();
            adj.sort_unstable();
            if !has_children[t] {
                has_children[t] = true;
                types[t].children = multiset;
                types[t].child_adjacency = adj;
            } else if types[t].children != multiset {
                inconsistent_tiles += 1;
            }
        }
    }
    if types.iter().zip(&has_children).any(|(ty, &h)| !ty.ideal && !h) || inconsistent_tiles > 0 {
        stable = false;
    }

    let counts = tilings
        .iter()
        .map(|t| {
            let mut c = vec![0; types.len()];
            for tile in t.non_ideal() {
                if let Some(ty) = tile.type_id {
                    c[ty] += 1;
                }
            }
            c
        })
        .collect();

    Ok(SubdivisionRule {
        types,
        stable,
        depth: type_depth,
        coalesced: coalesce,
        raw_initial_classes,
        coalesced_initial_classes,
        untyped_tiles,
        inconsistent_tiles,
        counts,
    })
}

impl SubdivisionRule {
    /// Fails unless the refinement stabilized.
    pub fn require_stable(&self) -> Result<()> {
        if self.stable {
            Ok(())
        } else {
            Err(Error::RuleUnstable { levels: self.counts.len() })
        }
    }

    pub fn non_ideal_types(&self) -> usize {
        self.types.iter().filter(|t| !t.ideal).count()
    }

    /// Type counts of levels `0..levels` obtained by applying the child
    /// multisets to the level-0 counts.
    pub fn replay(&self, levels: usize) -> Vec<Vec<BigUint>> {
        let mut cur: Vec<BigUint> = self.counts[0].iter().map(|&c| BigUint::from(c)).collect();
        let mut out = Vec::with_capacity(levels);
        for _ in 0..levels {
            let mut next = vec![BigUint::zero(); self.types.len()];
            for (t, n) in cur.iter().enumerate() {
                if n.is_zero() {
                    continue;
                }
                for (&c, &m) in &self.types[t].children {
                    next[c] += n * BigUint::from(m);
                }
            }
            out.push(std::mem::replace(&mut cur, next));
        }
        out
    }

    /// Total non-ideal tile counts predicted for levels `0..levels`.
    pub fn replay_totals(&self, levels: usize) -> Vec<BigUint> {
        self.replay(levels).into_iter().map(|v| v.into_iter().sum()).collect()
    }

    /// True when replaying reproduces every observed level count.
    pub fn replay_matches(&self) -> bool {
        let replayed = self.replay(self.counts.len());
        self.untyped_tiles == 0
            && replayed
                .iter()
                .zip(&self.counts)
                .all(|(r, c)| r.iter().zip(c).all(|(a, &b)| *a == BigUint::from(b)))
    }

    /// `A -> {A, A, B}` style lines.
    pub fn describe(&self) -> Vec<String> {
        self.types
            .iter()
            .filter(|t| !t.ideal)
            .map(|t| {
                let kids: Vec<String> = t
                    .children
                    .iter()
                    .map(|(&c, &m)| {
                        if m == 1 {
                            self.types[c].name.clone()
                        } else {
                            format!("{m}{}", self.types[c].name)
                        }
                    })
                    .collect();
                format!("{} -> {{{}}}", t.name, kids.join(", "))
            })
            .collect()
    }
}
