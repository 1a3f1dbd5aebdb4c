//! Tilings of the spheres: one tile per visible-region component of each
//! outermost domain, plus the persistent ideal tiles.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::ball::{components, Ball, BoundaryCell};
use crate::error::{Error, Result};
use crate::raag::SignedSet;
use crate::word::Element;

/// Label of a horizontal edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EdgeKind {
    /// Tiles over cells of equal codimension meeting along a flat ridge.
    FlatRidge,
    /// Tiles over cells whose codimensions differ by one.
    Containment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tile {
    /// Index inside its tiling.
    pub id: usize,
    pub level: usize,
    /// Owning domain; for an ideal tile, the canonical domain of its cell.
    pub owner: Element,
    /// Component index inside the owner's visible region.
    pub component: usize,
    /// Cells of the visible-region component, or the single ideal cell.
    pub region: Vec<SignedSet>,
    /// Cell `v` of the parent domain crossed to reach the owner.
    pub covered: SignedSet,
    pub ideal: bool,
    pub parent: Option<usize>,
    /// Type index assigned by rule extraction.
    pub type_id: Option<usize>,
}

impl Tile {
    /// Support sizes of the region cells, sorted.
    pub fn shape(&self) -> Vec<u8> {
        let mut s: Vec<u8> = self.region.iter().map(|c| c.len() as u8).collect();
        s.sort_unstable();
        s
    }
}

/// One level of the tiling sequence.
#[derive(Clone, Debug)]
pub struct Tiling {
    pub level: usize,
    pub tiles: Vec<Tile>,
    /// Horizontal edges `(a, b, kind)` with `a < b`, sorted.
    pub edges: Vec<(usize, usize, EdgeKind)>,
    /// Non-ideal tiles by owner, in component order.
    by_owner: HashMap<Element, Vec<usize>>,
    /// Level-`n+1` elements whose parent cell was not convex.
    pub parent_fallbacks: usize,
}

impl Tiling {
    /// Assembles a tiling from tiles and sorted edges.
    pub fn from_parts(level: usize, tiles: Vec<Tile>, edges: Vec<(usize, usize, EdgeKind)>) -> Self {
        let mut by_owner: HashMap<Element, Vec<usize>> = HashMap::new();
        for t in tiles.iter().filter(|t| !t.ideal) {
            by_owner.entry(t.owner.clone()).or_default().push(t.id);
        }
        Self { level, tiles, edges, by_owner, parent_fallbacks: 0 }
    }

    pub fn non_ideal(&self) -> impl Iterator<Item = &Tile> {
        self.tiles.iter().filter(|t| !t.ideal)
    }

    pub fn non_ideal_count(&self) -> usize {
        self.non_ideal().count()
    }

    pub fn ideal_count(&self) -> usize {
        self.tiles.len() - self.non_ideal_count()
    }

    pub fn tiles_of(&self, owner: &Element) -> &[usize] {
        self.by_owner.get(owner).map_or(&[], Vec::as_slice)
    }

    /// Neighbor lists indexed by tile id.
    pub fn adjacency(&self) -> Vec<Vec<(usize, EdgeKind)>> {
        let mut adj = vec![Vec::new(); self.tiles.len()];
        for &(a, b, k) in &self.edges {
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        adj
    }

    /// Children of every tile of `self` among the tiles of `next`.
    pub fn children_in(&self, next: &Tiling) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.tiles.len()];
        for t in &next.tiles {
            if let Some(p) = t.parent {
                ch[p].push(t.id);
            }
        }
        ch
    }

    /// Components of the horizontal graph restricted to non-ideal tiles,
    /// as a component index per tile (`None` for ideal tiles).
    pub fn horizontal_components(&self) -> (usize, Vec<Option<usize>>) {
        let adj = self.adjacency();
        let mut comp = vec![None; self.tiles.len()];
        let mut count = 0;
        for start in 0..self.tiles.len() {
            if self.tiles[start].ideal || comp[start].is_some() {
                continue;
            }
            comp[start] = Some(count);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &(w, _) in &adj[v] {
                    if comp[w].is_none() && !self.tiles[w].ideal {
                        comp[w] = Some(count);
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }
}

/// Builds the tiling of level `n`, owned by the elements of level `n + 1`.
pub fn build_tiling(ball: &Ball, n: usize) -> Result<Tiling> {
    if ball.depth() < n + 2 {
        return Err(Error::BallTooShallow { built: ball.depth(), needed: n + 2 });
    }
    let graph = ball.graph();
    let outer = n + 1;
    let mut tiles = Vec::new();
    let mut by_owner: HashMap<Element, Vec<usize>> = HashMap::new();
    for g in ball.level(outer) {
        let (_, covered) = ball.predecessor(g).expect("level >= 1 has a predecessor");
        let regions = components(&ball.convex_cells_of(g, outer));
        for (c, region) in regions.into_iter().enumerate() {
            let id = tiles.len();
            by_owner.entry(g.clone()).or_default().push(id);
            tiles.push(Tile {
                id,
                level: n,
                owner: g.clone(),
                component: c,
                region,
                covered,
                ideal: false,
                parent: None,
                type_id: None,
            });
        }
    }

    let mut edges = BTreeSet::new();
    for t in &tiles {
        let g = &t.owner;
        for x in 0..graph.rank() {
            for s in [1i8, -1] {
                let step = SignedSet::single(x, s);
                let h = g.mul_diagonal(graph, step);
                if ball.level_of(&h) != Some(outer) || h <= *g {
                    continue;
                }
                let mut rest = graph.neighbors(x);
                while rest != 0 {
                    let y = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    for r in [1i8, -1] {
                        let side = SignedSet::single(y, r);
                        if ball.within(&g.mul_diagonal(graph, side), outer)
                            || ball.within(&h.mul_diagonal(graph, side), outer)
                        {
                            continue;
                        }
                        let (Some(a), Some(b)) = (
                            tile_holding(&tiles, &by_owner, g, side),
                            tile_holding(&tiles, &by_owner, &h, side),
                        ) else {
                            continue;
                        };
                        let kind = if tiles[a].covered.len() == tiles[b].covered.len() {
                            EdgeKind::FlatRidge
                        } else {
                            EdgeKind::Containment
                        };
                        edges.insert((a.min(b), a.max(b), kind));
                    }
                }
            }
        }
    }

    let mut ideal_cells = BTreeSet::new();
    let facets = crate::raag::ideal_facets(graph);
    for m in 0..=outer {
        for g in ball.level(m) {
            for &f in &facets {
                let c = BoundaryCell { owner: g.clone(), cell: f }.canonical(ball);
                ideal_cells.insert(c);
            }
        }
    }
    for c in ideal_cells {
        let id = tiles.len();
        tiles.push(Tile {
            id,
            level: n,
            owner: c.owner,
            component: 0,
            region: vec![c.cell],
            covered: c.cell,
            ideal: true,
            parent: None,
            type_id: None,
        });
    }

    Ok(Tiling { level: n, tiles, edges: edges.into_iter().collect(), by_owner, parent_fallbacks: 0 })
}

fn tile_holding(
    tiles: &[Tile],
    by_owner: &HashMap<Element, Vec<usize>>,
    owner: &Element,
    cell: SignedSet,
) -> Option<usize> {
    by_owner.get(owner)?.iter().copied().find(|&i| tiles[i].region.contains(&cell))
}

/// Builds tilings `0..count` and links parents.
pub fn build_tilings(ball: &Ball, count: usize) -> Result<Vec<Tiling>> {
    let mut out: Vec<Tiling> = Vec::with_capacity(count);
    for n in 0..count {
        let mut t = build_tiling(ball, n)?;
        if let Some(prev) = out.last() {
            link_parents(ball, prev, &mut t);
        }
        out.push(t);
    }
    Ok(out)
}

/// Parent of a tile over `g` is the tile over `pred(g)` whose region holds
/// the crossed cell.
fn link_parents(ball: &Ball, prev: &Tiling, next: &mut Tiling) {
    let mut fallbacks = 0;
    for t in next.tiles.iter_mut().filter(|t| !t.ideal) {
        let (p, v) = ball.predecessor(&t.owner).expect("tile owners have predecessors");
        let candidates = prev.tiles_of(p);
        let hit = candidates.iter().copied().find(|&i| prev.tiles[i].region.contains(&v));
        t.parent = match hit {
            Some(i) => Some(i),
            None => {
                fallbacks += 1;
                candidates.first().copied()
            }
        };
    }
    next.parent_fallbacks = fallbacks;
}

/// All tilings stacked with vertical parent edges.
#[derive(Clone, Debug)]
pub struct HistoryGraph {
    /// `(level, tile id)` of every non-ideal tile.
    pub vertices: Vec<(usize, usize)>,
    /// Horizontal edges between vertex indices.
    pub horizontal: Vec<(usize, usize, EdgeKind)>,
    /// Vertical `(parent, child)` edges between vertex indices.
    pub vertical: Vec<(usize, usize)>,
}

impl HistoryGraph {
    pub fn new(tilings: &[Tiling]) -> Self {
        let mut vertices = Vec::new();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        for (n, t) in tilings.iter().enumerate() {
            for tile in t.non_ideal() {
                index.insert((n, tile.id), vertices.len());
                vertices.push((n, tile.id));
            }
        }
        let mut horizontal = Vec::new();
        let mut vertical = Vec::new();
        for (n, t) in tilings.iter().enumerate() {
            for &(a, b, k) in &t.edges {
                if let (Some(&i), Some(&j)) = (index.get(&(n, a)), index.get(&(n, b))) {
                    horizontal.push((i, j, k));
                }
            }
            if n == 0 {
                continue;
            }
            for tile in t.non_ideal() {
                if let Some(p) = tile.parent {
                    vertical.push((index[&(n - 1, p)], index[&(n, tile.id)]));
                }
            }
        }
        Self { vertices, horizontal, vertical }
    }
}
