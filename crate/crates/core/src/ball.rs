//! Breadth-first balls over the diagonal generating set and membership
//! tests on boundary cells.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::raag::{diagonal_elements, DefiningGraph, SignedSet};
use crate::word::Element;

/// Default element cap.
pub const DEFAULT_CAP: usize = 1_000_000;

/// Bookkeeping about predecessor choices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BallStats {
    /// Elements covering more than one convex cell owned by distinct elements.
    pub cover_ties: usize,
    /// Elements covering no convex cell; the least lower neighbor was used.
    pub cover_fallbacks: usize,
    /// Elements whose normal-form predecessor is not one level lower.
    pub predecessor_level_mismatches: usize,
}

#[derive(Clone, Debug)]
struct Pred {
    parent: u32,
    /// Sign vector `v` with `element = parent · t_v`.
    cell: SignedSet,
}

/// Levels `0..=depth` of the Cayley graph for the diagonal generators.
#[derive(Clone, Debug)]
pub struct Ball {
    graph: DefiningGraph,
    diagonals: Vec<SignedSet>,
    levels: Vec<Vec<Element>>,
    index: HashMap<Element, (u32, u32)>,
    preds: Vec<Vec<Pred>>,
    stats: BallStats,
    cap: usize,
}

impl Ball {
    /// Builds levels `0..=depth`.
    pub fn build(graph: &DefiningGraph, depth: usize, cap: usize) -> Result<Self> {
        let mut ball = Self::empty(graph, cap);
        ball.extend_to(depth)?;
        Ok(ball)
    }

    fn empty(graph: &DefiningGraph, cap: usize) -> Self {
        let mut index = HashMap::new();
        index.insert(Element::identity(), (0, 0));
        Self {
            graph: graph.clone(),
            diagonals: diagonal_elements(graph),
            levels: vec![vec![Element::identity()]],
            index,
            preds: vec![Vec::new()],
            stats: BallStats::default(),
            cap,
        }
    }

    /// Adds levels until `depth` is reached.
    pub fn extend_to(&mut self, depth: usize) -> Result<()> {
        while self.depth() < depth {
            let next: BTreeSet<Element> = {
                let last = self.levels.last().expect("level 0 exists");
                let mut next = BTreeSet::new();
                for g in last {
                    for &t in &self.diagonals {
                        let h = g.mul_diagonal(&self.graph, t);
                        if !self.index.contains_key(&h) {
                            next.insert(h);
                        }
                    }
                    if self.index.len() + next.len() > self.cap {
                        return Err(Error::CapExceeded { limit: self.cap });
                    }
                }
                next
            };
            self.push_level(next.into_iter().collect());
        }
        Ok(())
    }

    fn push_level(&mut self, elements: Vec<Element>) {
        let n = self.levels.len() as u32;
        for (i, e) in elements.iter().enumerate() {
            self.index.insert(e.clone(), (n, i as u32));
        }
        self.levels.push(elements);
        let preds =
            (0..self.levels[n as usize].len()).map(|i| self.choose_predecessor(n as usize, i)).collect();
        self.preds.push(preds);
    }

    /// Among lower neighbors `h` with `g = h · t_v`, prefers those whose cell
    /// `(h, v)` is convex in the previous ball, then the least `h`.
    fn choose_predecessor(&mut self, n: usize, i: usize) -> Pred {
        let g = self.levels[n][i].clone();
        let mut convex: Vec<(u32, SignedSet)> = Vec::new();
        let mut any: Option<(u32, SignedSet)> = None;
        for &t in &self.diagonals {
            let h = g.mul_diagonal(&self.graph, t.inverse());
            let Some(&(lh, ih)) = self.index.get(&h) else { continue };
            if lh as usize != n - 1 {
                continue;
            }
            if any.is_none_or(|(j, _)| ih < j) {
                any = Some((ih, t));
            }
            let is_convex = t
                .subsets()
                .skip(1)
                .filter(|s| *s != t)
                .all(|s| !self.within(&h.mul_diagonal(&self.graph, s), n - 1));
            if is_convex {
                convex.push((ih, t));
            }
        }
        convex.sort();
        let distinct: BTreeSet<u32> = convex.iter().map(|&(j, _)| j).collect();
        if distinct.len() > 1 {
            self.stats.cover_ties += 1;
        }
        let (parent, cell) = match convex.first() {
            Some(&c) => c,
            None => {
                self.stats.cover_fallbacks += 1;
                any.expect("every element past level 0 has a lower neighbor")
            }
        };
        let nf = g.normal_form(&self.graph);
        if let Ok(p) = nf.predecessor(&self.graph) {
            if self.level_of(&p.to_element(&self.graph)) != Some(n - 1) {
                self.stats.predecessor_level_mismatches += 1;
            }
        }
        Pred { parent, cell }
    }

    pub fn graph(&self) -> &DefiningGraph {
        &self.graph
    }

    pub fn diagonals(&self) -> &[SignedSet] {
        &self.diagonals
    }

    /// Deepest level built.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn stats(&self) -> &BallStats {
        &self.stats
    }

    /// Elements of level `n`, in shortlex order.
    pub fn level(&self, n: usize) -> &[Element] {
        &self.levels[n]
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Level of `g`, if it lies in the built ball.
    pub fn level_of(&self, g: &Element) -> Option<usize> {
        self.index.get(g).map(|&(l, _)| l as usize)
    }

    /// Position of `g` inside its level.
    pub fn position(&self, g: &Element) -> Option<(usize, usize)> {
        self.index.get(g).map(|&(l, i)| (l as usize, i as usize))
    }

    /// True iff `g` lies in `B(n)`.
    pub fn within(&self, g: &Element, n: usize) -> bool {
        self.level_of(g).is_some_and(|l| l <= n)
    }

    /// The chosen predecessor and the cell `v` it is crossed through.
    pub fn predecessor(&self, g: &Element) -> Option<(&Element, SignedSet)> {
        let (l, i) = self.position(g)?;
        if l == 0 {
            return None;
        }
        let p = &self.preds[l][i];
        Some((&self.levels[l - 1][p.parent as usize], p.cell))
    }

    /// Every lower neighbor `h` of `g` with `g = h · t_v` whose cell `(h, v)`
    /// is convex in `B(level(g) - 1)`.
    pub fn convex_covers(&self, g: &Element) -> Vec<(Element, SignedSet)> {
        let Some(n) = self.level_of(g) else { return Vec::new() };
        if n == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for &t in &self.diagonals {
            let h = g.mul_diagonal(&self.graph, t.inverse());
            if self.level_of(&h) != Some(n - 1) {
                continue;
            }
            let cell = BoundaryCell { owner: h.clone(), cell: t };
            if cell.count_within(self, n - 1) == 1 {
                out.push((h, t));
            }
        }
        out.sort();
        out
    }

    /// Non-ideal cells of level-`n` elements with no other domain in `B(n)`.
    pub fn convex_cells(&self, n: usize) -> Vec<BoundaryCell> {
        let mut out = Vec::new();
        for g in &self.levels[n] {
            for v in self.convex_cells_of(g, n) {
                out.push(BoundaryCell { owner: g.clone(), cell: v });
            }
        }
        out
    }

    /// Convex cells of the domain `g` in `B(n)`.
    pub fn convex_cells_of(&self, g: &Element, n: usize) -> Vec<SignedSet> {
        self.diagonals
            .iter()
            .copied()
            .filter(|&v| v.subsets().skip(1).all(|s| !self.within(&g.mul_diagonal(&self.graph, s), n)))
            .collect()
    }

    /// Convex cells of `g` in `B(n)`, grouped into components of cells that meet.
    pub fn visible_region(&self, n: usize, g: &Element) -> Vec<Vec<SignedSet>> {
        let cells = self.convex_cells_of(g, n);
        components(&cells)
    }

    /// Writes one cache file per level into `dir`.
    pub fn save_cache(&self, dir: &Path) -> Result<()> {
        for n in 0..=self.depth() {
            let mut text = String::new();
            for e in &self.levels[n] {
                text.push_str(&e.to_literal(&self.graph));
                text.push('\n');
            }
            write_atomic(&cache_path(dir, &self.graph, n), text.as_bytes())?;
        }
        Ok(())
    }

    /// Loads whatever consecutive levels are cached in `dir`, then builds the
    /// rest up to `depth`.
    pub fn load_or_build(graph: &DefiningGraph, dir: &Path, depth: usize, cap: usize) -> Result<Self> {
        let mut ball = Self::empty(graph, cap);
        let mut n = 1;
        while n <= depth {
            let path = cache_path(dir, graph, n);
            let Ok(text) = fs::read_to_string(&path) else { break };
            let elements = parse_level_file(graph, &text)?;
            ball.check_cached_level(&elements, n)?;
            if ball.len() + elements.len() > cap {
                return Err(Error::CapExceeded { limit: cap });
            }
            ball.push_level(elements);
            n += 1;
        }
        ball.extend_to(depth)?;
        Ok(ball)
    }

    fn check_cached_level(&self, elements: &[Element], n: usize) -> Result<()> {
        for e in elements {
            if self.index.contains_key(e) {
                return Err(Error::Parse(format!("cached level {n} repeats an earlier element")));
            }
            let has_lower = self
                .diagonals
                .iter()
                .any(|&t| self.level_of(&e.mul_diagonal(&self.graph, t.inverse())) == Some(n - 1));
            if !has_lower {
                return Err(Error::Parse(format!(
                    "cached element {} has no neighbor at level {}",
                    e.to_literal(&self.graph),
                    n - 1
                )));
            }
        }
        let fresh: HashSet<&Element> = elements.iter().collect();
        for g in &self.levels[n - 1] {
            for &t in &self.diagonals {
                let h = g.mul_diagonal(&self.graph, t);
                if !self.index.contains_key(&h) && !fresh.contains(&h) {
                    return Err(Error::Parse(format!(
                        "cached level {n} is missing {}",
                        h.to_literal(&self.graph)
                    )));
                }
            }
        }
        Ok(())
    }
}

fn cache_path(dir: &Path, graph: &DefiningGraph, n: usize) -> PathBuf {
    dir.join(format!("{}-L{n}.txt", graph.hash_hex()))
}

/// Parses a level cache file: one element literal per line, strictly
/// increasing in shortlex order.
pub fn parse_level_file(graph: &DefiningGraph, text: &str) -> Result<Vec<Element>> {
    let mut out: Vec<Element> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let e = Element::parse(graph, line)?;
        if out.last().is_some_and(|p| *p >= e) {
            return Err(Error::Parse(format!("cache line {} out of order", i + 1)));
        }
        out.push(e);
    }
    Ok(out)
}

/// Connected components of cells under closed-cell intersection, in input order.
pub fn components(cells: &[SignedSet]) -> Vec<Vec<SignedSet>> {
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            if !cells[i].conflicts(cells[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<SignedSet>)> = Vec::new();
    for (i, &c) in cells.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(c),
            None => groups.push((r, vec![c])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Membership class of a boundary cell in a ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CellClass {
    /// Partially covered cell of codimension at least 3.
    Interior,
    Convex,
    Flat,
    Concave,
    Covered,
    Ideal {
        count: usize,
    },
}

/// A cell of the boundary of the domain `owner`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryCell {
    pub owner: Element,
    pub cell: SignedSet,
}

impl BoundaryCell {
    /// Domains containing the cell, each paired with the cell's sign vector
    /// as seen from that domain. For an ideal cell only moves along cliques
    /// of its support are taken.
    pub fn domain_set(&self, graph: &DefiningGraph) -> Vec<(Element, SignedSet)> {
        self.cell
            .subsets()
            .filter(|s| graph.is_clique(s.support()))
            .map(|s| (self.owner.mul_diagonal(graph, s), self.cell.flip(s.support())))
            .collect()
    }

    /// Number of domains of the cell lying in `B(n)`.
    pub fn count_within(&self, ball: &Ball, n: usize) -> usize {
        self.domain_set(ball.graph()).iter().filter(|(h, _)| ball.within(h, n)).count()
    }

    /// Representative over the least domain by (level, element); domains
    /// outside the ball rank last.
    pub fn canonical(&self, ball: &Ball) -> BoundaryCell {
        self.domain_set(ball.graph())
            .into_iter()
            .min_by(|(a, _), (b, _)| {
                let la = ball.level_of(a).unwrap_or(usize::MAX);
                let lb = ball.level_of(b).unwrap_or(usize::MAX);
                la.cmp(&lb).then_with(|| a.cmp(b))
            })
            .map(|(owner, cell)| BoundaryCell { owner, cell })
            .expect("domain set contains the owner")
    }

    pub fn classify(&self, ball: &Ball, n: usize) -> CellClass {
        let count = self.count_within(ball, n);
        let graph = ball.graph();
        if !graph.is_clique(self.cell.support()) {
            return CellClass::Ideal { count };
        }
        let k = self.cell.len();
        let full = 1usize << k;
        match (k, count) {
            (_, 1) => CellClass::Convex,
            (_, c) if c == full => CellClass::Covered,
            (2, 2) => CellClass::Flat,
            (2, 3) => CellClass::Concave,
            _ => CellClass::Interior,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> DefiningGraph {
        DefiningGraph::new(vec!["a", "b", "z"], &[(0, 2), (1, 2)]).unwrap()
    }

    fn el(g: &DefiningGraph, s: &str) -> Element {
        Element::parse(g, s).unwrap()
    }

    #[test]
    fn level_sizes() {
        let z3 = Ball::build(&DefiningGraph::complete(3), 3, DEFAULT_CAP).unwrap();
        assert_eq!(z3.level_sizes(), [1, 26, 98, 218]);
        let f3 = Ball::build(&DefiningGraph::edgeless(3), 3, DEFAULT_CAP).unwrap();
        assert_eq!(f3.level_sizes(), [1, 6, 30, 150]);
        let p = Ball::build(&path(), 2, DEFAULT_CAP).unwrap();
        // max(|w|, |k|) metric on F2 x Z: 17 * 5 - 15 = 70 at level 2.
        assert_eq!(p.level_sizes(), [1, 14, 70]);
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(
            Ball::build(&DefiningGraph::edgeless(3), 5, 100).unwrap_err(),
            Error::CapExceeded { limit: 100 }
        );
    }

    #[test]
    fn classification_examples() {
        let g = path();
        let ball = Ball::build(&g, 3, DEFAULT_CAP).unwrap();
        let cell = BoundaryCell { owner: el(&g, "a"), cell: SignedSet::from_signs(&[(0, 1), (2, 1)]) };
        assert_eq!(cell.classify(&ball, 1), CellClass::Flat);
        let z3g = DefiningGraph::complete(3);
        let z3 = Ball::build(&z3g, 2, DEFAULT_CAP).unwrap();
        let ridge =
            BoundaryCell { owner: Element::identity(), cell: SignedSet::from_signs(&[(0, 1), (1, 1)]) };
        assert_eq!(ridge.classify(&z3, 0), CellClass::Convex);
        assert_eq!(ridge.classify(&z3, 1), CellClass::Covered);
        let ideal =
            BoundaryCell { owner: Element::identity(), cell: SignedSet::from_signs(&[(0, 1), (1, 1)]) };
        assert_eq!(ideal.classify(&ball, 0), CellClass::Ideal { count: 1 });
    }

    #[test]
    fn convex_cell_counts() {
        let z3 = Ball::build(&DefiningGraph::complete(3), 2, DEFAULT_CAP).unwrap();
        assert_eq!(z3.convex_cells(0).len(), 26);
        assert_eq!(z3.convex_cells(1).len(), 98);
        let f3 = Ball::build(&DefiningGraph::edgeless(3), 1, DEFAULT_CAP).unwrap();
        assert_eq!(f3.convex_cells(0).len(), 6);
    }

    #[test]
    fn visible_regions() {
        let g = path();
        let ball = Ball::build(&g, 2, DEFAULT_CAP).unwrap();
        let z = ball.visible_region(1, &el(&g, "z"));
        assert_eq!(z, vec![vec![SignedSet::single(2, 1)]]);
        let az = ball.visible_region(1, &el(&g, "a z"));
        assert_eq!(az.len(), 1);
        let mut sizes: Vec<usize> = az[0].iter().map(|c| c.len()).collect();
        sizes.sort();
        assert_eq!(sizes, [1, 1, 1, 1, 2, 2, 2]);
        let tg = DefiningGraph::complete(3);
        let z3 = Ball::build(&tg, 2, DEFAULT_CAP).unwrap();
        let corner = z3.visible_region(1, &el(&tg, "a b c"));
        let mut sizes: Vec<usize> = corner[0].iter().map(|c| c.len()).collect();
        sizes.sort();
        assert_eq!(sizes, [1, 1, 1, 2, 2, 2, 3]);
    }

    #[test]
    fn predecessors_are_one_level_down() {
        let g = path();
        let ball = Ball::build(&g, 3, DEFAULT_CAP).unwrap();
        for n in 1..=3 {
            for e in ball.level(n) {
                let (p, v) = ball.predecessor(e).unwrap();
                assert_eq!(ball.level_of(p), Some(n - 1));
                assert_eq!(&p.mul_diagonal(&g, v), e);
            }
        }
        let tg = DefiningGraph::complete(3);
        let z3 = Ball::build(&tg, 2, DEFAULT_CAP).unwrap();
        let (p, _) = z3.predecessor(&el(&tg, "a^2 b")).unwrap();
        assert_eq!(p, &el(&tg, "a b"));
    }

    #[test]
    fn canonical_cells_share_domain_sets() {
        let g = path();
        let ball = Ball::build(&g, 2, DEFAULT_CAP).unwrap();
        let c = BoundaryCell { owner: el(&g, "a z"), cell: SignedSet::from_signs(&[(0, -1), (2, -1)]) };
        let r = c.canonical(&ball);
        assert_eq!(r.owner, Element::identity());
        assert_eq!(r.cell, SignedSet::from_signs(&[(0, 1), (2, 1)]));
        let mut a: Vec<Element> = c.domain_set(&g).into_iter().map(|x| x.0).collect();
        let mut b: Vec<Element> = r.domain_set(&g).into_iter().map(|x| x.0).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = path();
        let ball = Ball::build(&g, 2, DEFAULT_CAP).unwrap();
        ball.save_cache(dir.path()).unwrap();
        let again = Ball::load_or_build(&g, dir.path(), 3, DEFAULT_CAP).unwrap();
        let fresh = Ball::build(&g, 3, DEFAULT_CAP).unwrap();
        assert_eq!(again.level_sizes(), fresh.level_sizes());
        for n in 0..=3 {
            assert_eq!(again.level(n), fresh.level(n));
        }
        assert!(parse_level_file(&g, "b\na\n").is_err());
    }
}
