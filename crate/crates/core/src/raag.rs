//! Defining graphs, signed generator sets and the sign-vector model of the
//! boundary cells of the fundamental domain.
//!
//! A cell of the boundary of the cube `[-1, 1]^d` is named by a sign vector:
//! coordinate `i` is pinned to `+1` or `-1`, or left free. A cell is ideal
//! when its pinned generators do not pairwise commute.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Largest supported generator count (signed sets are stored as bitmasks).
pub const MAX_GENERATORS: usize = 32;

/// Generators plus commuting pairs of a right-angled Artin group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DefiningGraph {
    names: Vec<String>,
    adj: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    generators: Vec<String>,
    edges: Vec<[String; 2]>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl DefiningGraph {
    /// Builds a graph from generator names and commuting pairs given by index.
    pub fn new<S: Into<String>>(names: Vec<S>, edges: &[(usize, usize)]) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Parse("a defining graph needs at least one generator".into()));
        }
        if names.len() > MAX_GENERATORS {
            return Err(Error::Parse(format!(
                "{} generators given, at most {MAX_GENERATORS} supported",
                names.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !valid_name(n) {
                return Err(Error::Parse(format!("invalid generator name `{n}`")));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::Parse(format!("duplicate generator `{n}`")));
            }
        }
        let mut adj = vec![0u32; names.len()];
        for &(i, j) in edges {
            if i >= names.len() || j >= names.len() {
                return Err(Error::Parse(format!("edge ({i}, {j}) out of range")));
            }
            if i == j {
                return Err(Error::Parse(format!("self-loop on `{}`", names[i])));
            }
            if adj[i] >> j & 1 == 1 {
                return Err(Error::Parse(format!("duplicate edge {}-{}", names[i], names[j])));
            }
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        Ok(Self { names, adj })
    }

    /// Complete graph on `d` generators named `a, b, c, ...` (free abelian group).
    pub fn complete(d: usize) -> Self {
        let edges: Vec<_> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
        Self::new(default_names(d), &edges).expect("valid complete graph")
    }

    /// Edgeless graph on `d` generators (free group).
    pub fn edgeless(d: usize) -> Self {
        Self::new(default_names(d), &[]).expect("valid edgeless graph")
    }

    /// Parses the JSON input format `{"generators": [...], "edges": [[u, v], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        let index: BTreeMap<&str, usize> =
            file.generators.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut edges = Vec::with_capacity(file.edges.len());
        for [u, v] in &file.edges {
            let i = *index.get(u.as_str()).ok_or_else(|| Error::UnknownGenerator(u.clone()))?;
            let j = *index.get(v.as_str()).ok_or_else(|| Error::UnknownGenerator(v.clone()))?;
            edges.push((i, j));
        }
        Self::new(file.generators, &edges)
    }

    /// Canonical JSON rendering (edges sorted by generator order).
    pub fn to_json(&self) -> String {
        let edges =
            self.edges().into_iter().map(|(i, j)| [self.names[i].clone(), self.names[j].clone()]).collect();
        serde_json::to_string(&GraphFile { generators: self.names.clone(), edges }).expect("graph serializes")
    }

    /// Short stable hash of the canonical JSON, used to key cache files.
    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Mask of all generators.
    pub fn all_mask(&self) -> u32 {
        if self.rank() == 32 {
            u32::MAX
        } else {
            (1u32 << self.rank()) - 1
        }
    }

    /// Neighbors of generator `i` as a bitmask.
    pub fn neighbors(&self, i: usize) -> u32 {
        self.adj[i]
    }

    /// True when distinct generators `i` and `j` commute.
    #[inline]
    pub fn commute(&self, i: usize, j: usize) -> bool {
        self.adj[i] >> j & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.rank())
            .flat_map(|i| (i + 1..self.rank()).filter(move |&j| self.commute(i, j)).map(move |j| (i, j)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    /// True iff the generators in `mask` pairwise commute. The empty set counts as a clique.
    pub fn is_clique(&self, mask: u32) -> bool {
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if rest & !self.adj[i] != 0 {
                return false;
            }
        }
        true
    }

    /// Number of connected components of the graph.
    pub fn component_count(&self) -> usize {
        let mut seen = 0u32;
        let mut count = 0;
        for start in 0..self.rank() {
            if seen >> start & 1 == 1 {
                continue;
            }
            count += 1;
            let mut frontier = 1u32 << start;
            while frontier != 0 {
                seen |= frontier;
                let mut next = 0;
                let mut f = frontier;
                while f != 0 {
                    let i = f.trailing_zeros() as usize;
                    f &= f - 1;
                    next |= self.adj[i];
                }
                frontier = next & !seen;
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Induced subgraph on `mask`, keeping generator order.
    pub fn induced(&self, mask: u32) -> Self {
        let keep: Vec<usize> = (0..self.rank()).filter(|i| mask >> i & 1 == 1).collect();
        let names: Vec<String> = keep.iter().map(|&i| self.names[i].clone()).collect();
        let mut edges = Vec::new();
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate().skip(a + 1) {
                if self.commute(i, j) {
                    edges.push((a, b));
                }
            }
        }
        Self::new(names, &edges).expect("induced subgraph is valid")
    }

    /// All generator permutations preserving adjacency. Only computed for
    /// `rank <= 8`; larger graphs report the identity alone.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let d = self.rank();
        let identity: Vec<usize> = (0..d).collect();
        if d > 8 {
            return vec![identity];
        }
        let mut out = Vec::new();
        let mut perm = Vec::with_capacity(d);
        let mut used = vec![false; d];
        self.extend_automorphism(&mut perm, &mut used, &mut out);
        out
    }

    fn extend_automorphism(&self, perm: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let d = self.rank();
        let i = perm.len();
        if i == d {
            out.push(perm.clone());
            return;
        }
        for img in 0..d {
            if used[img] || self.adj[i].count_ones() != self.adj[img].count_ones() {
                continue;
            }
            if (0..i).any(|j| self.commute(i, j) != self.commute(img, perm[j])) {
                continue;
            }
            used[img] = true;
            perm.push(img);
            self.extend_automorphism(perm, used, out);
            perm.pop();
            used[img] = false;
        }
    }

    /// Renders a signed set with generator names, e.g. `(a:+, b:-)`.
    pub fn fmt_signed(&self, s: SignedSet) -> String {
        let parts: Vec<String> = s
            .entries()
            .map(|(g, sign)| format!("{}:{}", self.names[g], if sign > 0 { '+' } else { '-' }))
            .collect();
        format!("({})", parts.join(", "))
    }

    /// Renders a generator mask, e.g. `{a,z}`.
    pub fn fmt_mask(&self, mask: u32) -> String {
        let parts: Vec<&str> =
            (0..self.rank()).filter(|i| mask >> i & 1 == 1).map(|i| self.names[i].as_str()).collect();
        format!("{{{}}}", parts.join(","))
    }
}

fn default_names(d: usize) -> Vec<String> {
    (0..d).map(|i| if i < 26 { ((b'a' + i as u8) as char).to_string() } else { format!("g{i}") }).collect()
}

/// Assignment of a sign in `{-1, 0, +1}` to every generator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedSet {
    pos: u32,
    neg: u32,
}

impl SignedSet {
    pub const EMPTY: SignedSet = SignedSet { pos: 0, neg: 0 };

    /// Builds from positive and negative generator masks; they must be disjoint.
    pub fn new(pos: u32, neg: u32) -> Self {
        assert_eq!(pos & neg, 0, "a generator cannot carry both signs");
        Self { pos, neg }
    }

    /// Builds from `(generator, sign)` pairs with `sign = ±1`.
    pub fn from_signs(entries: &[(usize, i8)]) -> Self {
        let mut s = Self::EMPTY;
        for &(g, sign) in entries {
            s = s.with(g, sign);
        }
        s
    }

    pub fn single(g: usize, sign: i8) -> Self {
        Self::EMPTY.with(g, sign)
    }

    /// Copy with generator `g` set to `sign` (0 clears it).
    pub fn with(self, g: usize, sign: i8) -> Self {
        let bit = 1u32 << g;
        let (mut pos, mut neg) = (self.pos & !bit, self.neg & !bit);
        match sign.signum() {
            1 => pos |= bit,
            -1 => neg |= bit,
            _ => {}
        }
        Self { pos, neg }
    }

    pub fn pos_mask(self) -> u32 {
        self.pos
    }

    pub fn neg_mask(self) -> u32 {
        self.neg
    }

    pub fn support(self) -> u32 {
        self.pos | self.neg
    }

    pub fn len(self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.support() == 0
    }

    pub fn sign(self, g: usize) -> i8 {
        if self.pos >> g & 1 == 1 {
            1
        } else if self.neg >> g & 1 == 1 {
            -1
        } else {
            0
        }
    }

    /// `(generator, sign)` pairs in generator order.
    pub fn entries(self) -> impl Iterator<Item = (usize, i8)> {
        let mut rest = self.support();
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let g = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some((g, self.sign(g)))
        })
    }

    /// Every generator with the opposite sign.
    pub fn inverse(self) -> Self {
        Self { pos: self.neg, neg: self.pos }
    }

    /// Flips the signs of the generators in `mask`.
    pub fn flip(self, mask: u32) -> Self {
        let m = mask & self.support();
        Self { pos: (self.pos & !m) | (self.neg & m), neg: (self.neg & !m) | (self.pos & m) }
    }

    /// Restriction to the generators in `mask`.
    pub fn restrict(self, mask: u32) -> Self {
        Self { pos: self.pos & mask, neg: self.neg & mask }
    }

    /// True when `self` agrees with `other` wherever `self` is nonzero.
    pub fn is_sub_of(self, other: SignedSet) -> bool {
        self.pos & !other.pos == 0 && self.neg & !other.neg == 0
    }

    /// True when some generator has opposite nonzero signs in the two sets.
    pub fn conflicts(self, other: SignedSet) -> bool {
        (self.pos & other.neg) | (self.neg & other.pos) != 0
    }

    /// Union of two non-conflicting sets.
    pub fn merge(self, other: SignedSet) -> Self {
        debug_assert!(!self.conflicts(other));
        Self { pos: self.pos | other.pos, neg: self.neg | other.neg }
    }

    /// All sub-signed-sets, the empty set first.
    pub fn subsets(self) -> impl Iterator<Item = SignedSet> {
        let support = self.support();
        let mut sub = 0u32;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = self.restrict(sub);
            sub = sub.wrapping_sub(support) & support;
            if sub == 0 {
                done = true;
            }
            Some(out)
        })
    }

    /// Sub-signed-sets of `self` whose support lies in `mask`.
    pub fn subsets_within(self, mask: u32) -> impl Iterator<Item = SignedSet> {
        self.restrict(mask).subsets()
    }

    /// Applies a generator permutation.
    pub fn permute(self, perm: &[usize]) -> Self {
        let mut out = Self::EMPTY;
        for (g, s) in self.entries() {
            out = out.with(perm[g], s);
        }
        out
    }
}

impl fmt::Display for SignedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.entries().map(|(g, s)| format!("{}{}", g, if s > 0 { '+' } else { '-' })).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A cell of the cube boundary, named by its pinned coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubeCell(SignedSet);

impl CubeCell {
    /// Fails on the empty sign vector, which names the cube interior.
    pub fn new(v: SignedSet) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Parse("a boundary cell needs a nonempty support".into()));
        }
        Ok(Self(v))
    }

    pub fn signs(self) -> SignedSet {
        self.0
    }

    pub fn codimension(self) -> usize {
        self.0.len()
    }
}

/// All nonempty cliques in (size, lexicographic) order.
pub fn enumerate_cliques(g: &DefiningGraph) -> Vec<u32> {
    let mut out = Vec::new();
    let mut stack: Vec<(u32, usize)> = (0..g.rank()).map(|i| (1u32 << i, i)).collect();
    while let Some((mask, last)) = stack.pop() {
        out.push(mask);
        let mut ext = g.neighbors(last) & !((2u32 << last) - 1);
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            ext &= g.neighbors(i);
        }
        while ext != 0 {
            let j = ext.trailing_zeros() as usize;
            ext &= ext - 1;
            stack.push((mask | 1 << j, j));
        }
    }
    out.sort_by_key(|&m| (m.count_ones(), lex_key(m)));
    out
}

fn lex_key(mask: u32) -> Vec<u32> {
    let mut v = Vec::new();
    let mut m = mask;
    while m != 0 {
        v.push(m.trailing_zeros());
        m &= m - 1;
    }
    v
}

/// All spherical signed sets with nonempty support: the diagonal generating set.
pub fn diagonal_elements(g: &DefiningGraph) -> Vec<SignedSet> {
    let mut out = Vec::new();
    for clique in enumerate_cliques(g) {
        let mut neg = 0u32;
        loop {
            out.push(SignedSet::new(clique & !neg, neg));
            neg = neg.wrapping_sub(clique) & clique;
            if neg == 0 {
                break;
            }
        }
    }
    out
}

/// Ideal cells are those whose pinned generators do not pairwise commute.
pub fn cell_is_ideal(g: &DefiningGraph, v: CubeCell) -> bool {
    !g.is_clique(v.signs().support())
}

/// Closed cells meet iff no coordinate is pinned to opposite signs.
pub fn cells_intersect(v: CubeCell, w: CubeCell) -> bool {
    !v.signs().conflicts(w.signs())
}

/// Ideal cells with a minimal non-clique support; these are expanded into
/// ideal facets by truncation.
pub fn ideal_facets(g: &DefiningGraph) -> Vec<SignedSet> {
    let d = g.rank();
    let mut out = Vec::new();
    for mask in 1u32..=g.all_mask() {
        if g.is_clique(mask) {
            continue;
        }
        let minimal = (0..d).filter(|i| mask >> i & 1 == 1).all(|i| g.is_clique(mask & !(1 << i)));
        if !minimal {
            continue;
        }
        let mut neg = 0u32;
        loop {
            out.push(SignedSet::new(mask & !neg, neg));
            neg = neg.wrapping_sub(mask) & mask;
            if neg == 0 {
                break;
            }
        }
        if mask == u32::MAX {
            break;
        }
    }
    out.sort_by_key(|s| (s.len(), lex_key(s.support()), s.neg_mask()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> DefiningGraph {
        DefiningGraph::from_json(r#"{"generators":["a","b","z"],"edges":[["a","z"],["b","z"]]}"#).unwrap()
    }

    #[test]
    fn clique_enumeration() {
        let tri = DefiningGraph::complete(3);
        assert_eq!(enumerate_cliques(&tri).len(), 7);
        let p = path();
        let names: Vec<String> = enumerate_cliques(&p).iter().map(|&m| p.fmt_mask(m)).collect();
        assert_eq!(names, ["{a}", "{b}", "{z}", "{a,z}", "{b,z}"]);
        assert_eq!(enumerate_cliques(&DefiningGraph::edgeless(3)), vec![1, 2, 4]);
    }

    #[test]
    fn diagonal_counts() {
        assert_eq!(diagonal_elements(&DefiningGraph::complete(3)).len(), 26);
        assert_eq!(diagonal_elements(&path()).len(), 14);
        assert_eq!(diagonal_elements(&DefiningGraph::edgeless(3)).len(), 6);
        for d in 1..=5 {
            assert_eq!(diagonal_elements(&DefiningGraph::complete(d)).len(), 3usize.pow(d as u32) - 1);
            assert_eq!(diagonal_elements(&DefiningGraph::edgeless(d)).len(), 2 * d);
        }
    }

    #[test]
    fn ideal_predicate() {
        let p = path();
        let (a, b, z) = (0, 1, 2);
        let cell = |e: &[(usize, i8)]| CubeCell::new(SignedSet::from_signs(e)).unwrap();
        assert!(cell_is_ideal(&p, cell(&[(a, 1), (b, 1)])));
        assert!(!cell_is_ideal(&p, cell(&[(a, 1), (z, -1)])));
        let tri = DefiningGraph::complete(3);
        assert!(!cell_is_ideal(&tri, cell(&[(0, 1), (1, 1), (2, 1)])));
    }

    #[test]
    fn intersections() {
        let cell = |e: &[(usize, i8)]| CubeCell::new(SignedSet::from_signs(e)).unwrap();
        assert!(cells_intersect(cell(&[(0, 1)]), cell(&[(0, 1), (1, 1)])));
        assert!(!cells_intersect(cell(&[(0, 1)]), cell(&[(0, -1)])));
        assert!(cells_intersect(cell(&[(0, 1), (1, 1)]), cell(&[(1, 1), (2, -1)])));
    }

    /// Brute force on the vertices of the cube: two closed faces meet iff they share a vertex.
    #[test]
    fn intersection_matches_vertex_enumeration() {
        for d in 1..=4usize {
            let g = DefiningGraph::complete(d);
            let cells = diagonal_elements(&g);
            let vertices: Vec<Vec<i8>> = (0..1u32 << d)
                .map(|m| (0..d).map(|i| if m >> i & 1 == 1 { 1 } else { -1 }).collect())
                .collect();
            let contains = |c: SignedSet, v: &[i8]| c.entries().all(|(i, s)| v[i] == s);
            for &v in &cells {
                for &w in &cells {
                    let brute = vertices.iter().any(|x| contains(v, x) && contains(w, x));
                    assert_eq!(cells_intersect(CubeCell(v), CubeCell(w)), brute, "{v} vs {w}");
                }
            }
        }
    }

    #[test]
    fn parse_rejections() {
        assert!(matches!(
            DefiningGraph::from_json(r#"{"generators":["a"],"edges":[["a","q"]]}"#),
            Err(Error::UnknownGenerator(_))
        ));
        assert!(
            DefiningGraph::from_json(r#"{"generators":["a","b"],"edges":[["a","b"],["b","a"]]}"#).is_err()
        );
        assert!(DefiningGraph::from_json(r#"{"generators":["a","a"],"edges":[]}"#).is_err());
        assert!(DefiningGraph::from_json(r#"{"generators":["a"],"edges":[["a","a"]]}"#).is_err());
        assert!(DefiningGraph::from_json(r#"{"generators":[],"edges":[]}"#).is_err());
    }

    #[test]
    fn subsets_and_automorphisms() {
        let s = SignedSet::from_signs(&[(0, 1), (2, -1)]);
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 4);
        assert!(subs.iter().all(|x| x.is_sub_of(s)));
        assert_eq!(DefiningGraph::complete(3).automorphisms().len(), 6);
        assert_eq!(path().automorphisms().len(), 2);
        assert_eq!(path().component_count(), 1);
        assert_eq!(DefiningGraph::edgeless(3).component_count(), 3);
        assert_eq!(ideal_facets(&path()).len(), 4);
        assert_eq!(ideal_facets(&DefiningGraph::edgeless(3)).len(), 12);
    }

    #[test]
    fn json_round_trip() {
        let p = path();
        assert_eq!(DefiningGraph::from_json(&p.to_json()).unwrap(), p);
        assert_eq!(p.hash_hex().len(), 16);
    }
}
