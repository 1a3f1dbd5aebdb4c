//! Pruning tilings to a special cube complex mapping into the Salvetti complex.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::raag::DefiningGraph;
use crate::rule::{extract_rule, SubdivisionRule};
use crate::tiling::Tiling;
use crate::word::{letter, letter_gen, Element, Letter};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    pub label: String,
    #[serde(default = "plus")]
    pub sign: i8,
}

fn plus() -> i8 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexFile {
    #[serde(default)]
    graph: Option<serde_json::Value>,
    vertices: Vec<String>,
    edges: Vec<EdgeSpec>,
    #[serde(default)]
    squares: Vec<[usize; 4]>,
}

/// One end of an edge seen from a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Germ {
    edge: usize,
    /// True for the `from` end.
    tail: bool,
}

/// A square complex with generator-labelled edges.
#[derive(Clone, Debug)]
pub struct CubeComplexSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    pub squares: Vec<[usize; 4]>,
    /// Defining graph embedded in the file, if any.
    pub embedded_graph: Option<DefiningGraph>,
    ends: Vec<(usize, usize, i8)>,
}

impl CubeComplexSpec {
    /// Parses the JSON input format. Labels are resolved later against a graph.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ComplexFile = serde_json::from_str(text)?;
        let embedded_graph = match file.graph {
            Some(v) => Some(DefiningGraph::from_json(&v.to_string())?),
            None => None,
        };
        if file.vertices.is_empty() {
            return Err(Error::MalformedComplex("no vertices".into()));
        }
        let mut index = HashMap::new();
        for (i, v) in file.vertices.iter().enumerate() {
            if index.insert(v.as_str(), i).is_some() {
                return Err(Error::MalformedComplex(format!("duplicate vertex `{v}`")));
            }
        }
        let mut ends = Vec::new();
        for (i, e) in file.edges.iter().enumerate() {
            let f = *index
                .get(e.from.as_str())
                .ok_or_else(|| Error::MalformedComplex(format!("edge {i}: unknown vertex `{}`", e.from)))?;
            let t = *index
                .get(e.to.as_str())
                .ok_or_else(|| Error::MalformedComplex(format!("edge {i}: unknown vertex `{}`", e.to)))?;
            if e.sign != 1 && e.sign != -1 {
                return Err(Error::MalformedComplex(format!("edge {i}: sign must be 1 or -1")));
            }
            ends.push((f, t, e.sign));
        }
        for (i, sq) in file.squares.iter().enumerate() {
            if sq.iter().any(|&e| e >= file.edges.len()) {
                return Err(Error::MalformedComplex(format!("square {i}: edge index out of range")));
            }
        }
        Ok(Self { vertices: file.vertices, edges: file.edges, squares: file.squares, embedded_graph, ends })
    }

    /// One vertex with a loop per generator and a square per commuting pair.
    pub fn salvetti(graph: &DefiningGraph) -> Self {
        let edges: Vec<EdgeSpec> = graph
            .names()
            .iter()
            .map(|n| EdgeSpec { from: "v".into(), to: "v".into(), label: n.clone(), sign: 1 })
            .collect();
        let squares = graph.edges().into_iter().map(|(i, j)| [i, j, i, j]).collect();
        let ends = vec![(0, 0, 1); edges.len()];
        Self { vertices: vec!["v".into()], edges, squares, embedded_graph: None, ends }
    }

    /// Letters read along each edge, after resolving labels in `graph`.
    fn resolve(&self, graph: &DefiningGraph) -> Result<Vec<(usize, usize, Letter)>> {
        self.edges
            .iter()
            .zip(&self.ends)
            .map(|(e, &(f, t, s))| {
                let g = graph.index_of(&e.label).ok_or_else(|| Error::UnknownGenerator(e.label.clone()))?;
                Ok((f, t, letter(g, s)))
            })
            .collect()
    }
}

/// Letter read when leaving a vertex through `germ`.
fn germ_letter(edges: &[(usize, usize, Letter)], germ: Germ) -> Letter {
    let l = edges[germ.edge].2;
    if germ.tail {
        l
    } else {
        l ^ 1
    }
}

fn germ_vertex(edges: &[(usize, usize, Letter)], germ: Germ) -> usize {
    if germ.tail {
        edges[germ.edge].0
    } else {
        edges[germ.edge].1
    }
}

fn germ_far(edges: &[(usize, usize, Letter)], germ: Germ) -> usize {
    if germ.tail {
        edges[germ.edge].1
    } else {
        edges[germ.edge].0
    }
}

/// Corners `(vertex, germ pair)` of a square whose boundary reads a commutator.
fn square_corners(
    graph: &DefiningGraph,
    edges: &[(usize, usize, Letter)],
    sq: [usize; 4],
) -> Option<Vec<(usize, Germ, Germ)>> {
    for dirs in 0..16u32 {
        let steps: Vec<Germ> = (0..4).map(|i| Germ { edge: sq[i], tail: dirs >> i & 1 == 0 }).collect();
        let closed = (0..4).all(|i| germ_far(edges, steps[i]) == germ_vertex(edges, steps[(i + 1) % 4]));
        if !closed {
            continue;
        }
        let w: Vec<Letter> = steps.iter().map(|&g| germ_letter(edges, g)).collect();
        let (x, y) = (letter_gen(w[0]), letter_gen(w[1]));
        if w[2] != w[0] ^ 1 || w[3] != w[1] ^ 1 || x == y || !graph.commute(x, y) {
            continue;
        }
        let arrive = |g: Germ| Germ { edge: g.edge, tail: !g.tail };
        let corners = (0..4)
            .map(|i| {
                let dep = steps[i];
                let arr = arrive(steps[(i + 3) % 4]);
                (germ_vertex(edges, dep), dep.min(arr), dep.max(arr))
            })
            .collect();
        return Some(corners);
    }
    None
}

/// Checks that the labelled complex maps locally isometrically to the
/// Salvetti complex: injective links, squares on commuting labels, and a
/// square at every corner spanned by commuting germs.
pub fn check_local_isometry(spec: &CubeComplexSpec, graph: &DefiningGraph) -> Result<()> {
    let edges = spec.resolve(graph)?;
    let mut corners: HashSet<(usize, Germ, Germ)> = HashSet::new();
    for (i, &sq) in spec.squares.iter().enumerate() {
        let c = square_corners(graph, &edges, sq).ok_or_else(|| {
            Error::MalformedComplex(format!("square {i} does not bound a commuting square"))
        })?;
        corners.extend(c);
    }
    let mut germs: Vec<Vec<Germ>> = vec![Vec::new(); spec.vertices.len()];
    for e in 0..edges.len() {
        for tail in [true, false] {
            let g = Germ { edge: e, tail };
            germs[germ_vertex(&edges, g)].push(g);
        }
    }
    for (v, gs) in germs.iter().enumerate() {
        let mut seen: HashMap<Letter, Germ> = HashMap::new();
        for &g in gs {
            let l = germ_letter(&edges, g);
            if seen.insert(l, g).is_some() {
                return Err(Error::MalformedComplex(format!(
                    "vertex `{}`: two edge ends read the letter {}{}",
                    spec.vertices[v],
                    graph.name(letter_gen(l)),
                    if l & 1 == 1 { "^-1" } else { "" }
                )));
            }
        }
        for (i, &g) in gs.iter().enumerate() {
            for &h in &gs[i + 1..] {
                let (x, y) = (letter_gen(germ_letter(&edges, g)), letter_gen(germ_letter(&edges, h)));
                if x != y && graph.commute(x, y) && !corners.contains(&(v, g.min(h), g.max(h))) {
                    return Err(Error::MalformedComplex(format!(
                        "vertex `{}`: edges {} and {} carry commuting labels {} and {} but span no square",
                        spec.vertices[v],
                        g.edge,
                        h.edge,
                        graph.name(x),
                        graph.name(y)
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Elements `g` with `g · b0` in the lifted complex, by level.
#[derive(Clone, Debug)]
pub struct LiftSet {
    pub levels: Vec<Vec<Element>>,
    /// A vertex of the complex over each lifted element.
    pub witness: HashMap<Element, usize>,
    /// Lifted elements whose chosen predecessor was not lifted but another
    /// convex-cover neighbour was.
    pub reparented: usize,
    parents: HashMap<Element, (Element, crate::raag::SignedSet)>,
}

impl LiftSet {
    pub fn contains(&self, g: &Element) -> bool {
        self.witness.contains_key(g)
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// Predecessor of a lifted element inside the lift set.
    pub fn parent(&self, g: &Element) -> Option<&(Element, crate::raag::SignedSet)> {
        self.parents.get(g)
    }
}

/// Lifts the basepoint (first vertex) along labelled edges inside the ball,
/// then checks that every lifted element has a lifted predecessor.
pub fn lift_basepoints(spec: &CubeComplexSpec, graph: &DefiningGraph, ball: &Ball) -> Result<LiftSet> {
    let edges = spec.resolve(graph)?;
    let mut out_germs: Vec<Vec<(Letter, usize)>> = vec![Vec::new(); spec.vertices.len()];
    for &(f, t, l) in &edges {
        out_germs[f].push((l, t));
        out_germs[t].push((l ^ 1, f));
    }
    let mut seen: HashSet<(usize, Element)> = HashSet::new();
    let mut witness: HashMap<Element, usize> = HashMap::new();
    let start = (0usize, Element::identity());
    seen.insert(start.clone());
    witness.insert(Element::identity(), 0);
    let mut queue = VecDeque::from([start]);
    let cap = ball.cap();
    while let Some((v, g)) = queue.pop_front() {
        for &(l, w) in &out_germs[v] {
            let h = g.mul_letters(graph, &[l]);
            if ball.level_of(&h).is_none() {
                continue;
            }
            let state = (w, h.clone());
            if seen.insert(state.clone()) {
                if seen.len() > cap {
                    return Err(Error::CapExceeded { limit: cap });
                }
                witness.entry(h).or_insert(w);
                queue.push_back(state);
            }
        }
    }
    let mut levels = vec![Vec::new(); ball.depth() + 1];
    for g in witness.keys() {
        levels[ball.level_of(g).expect("inside ball")].push(g.clone());
    }
    for l in &mut levels {
        l.sort();
    }
    let mut parents = HashMap::new();
    let mut reparented = 0;
    for g in levels.iter().skip(1).flatten() {
        let (p, v) = ball.predecessor(g).expect("level >= 1");
        if witness.contains_key(p) {
            parents.insert(g.clone(), (p.clone(), v));
            continue;
        }
        match ball.convex_covers(g).into_iter().find(|(h, _)| witness.contains_key(h)) {
            Some(pv) => {
                reparented += 1;
                parents.insert(g.clone(), pv);
            }
            None => {
                return Err(Error::StarConvexity(format!(
                    "{} is lifted but its predecessor {} is not",
                    g.to_literal(graph),
                    p.to_literal(graph)
                )))
            }
        }
    }
    Ok(LiftSet { levels, witness, reparented, parents })
}

/// How the pruned types sit inside the ambient types.
#[derive(Clone, Debug, Serialize)]
pub struct Containment {
    /// Pruned type name to the ambient type names its tiles carried.
    pub ambient_of: BTreeMap<String, Vec<String>>,
    /// Every pruned type lies in one ambient type and its children form a
    /// sub-multiset of that type's children.
    pub embeds: bool,
}

/// Pruned tilings, their rule and the containment report.
#[derive(Clone, Debug)]
pub struct Pruned {
    pub tilings: Vec<Tiling>,
    pub rule: SubdivisionRule,
    pub containment: Containment,
}

/// Re-flags tiles over non-lifted elements as ideal and re-extracts the rule.
/// `ambient` must already carry the ambient rule's type ids.
pub fn prune_history(
    graph: &DefiningGraph,
    ambient: &[Tiling],
    ambient_rule: &SubdivisionRule,
    lifts: &LiftSet,
    coalesce: bool,
) -> Result<Pruned> {
    let mut tilings: Vec<Tiling> = ambient.to_vec();
    let ambient_types: Vec<Vec<Option<usize>>> =
        ambient.iter().map(|t| t.tiles.iter().map(|x| x.type_id).collect()).collect();
    for n in 0..tilings.len() {
        let (before, rest) = tilings.split_at_mut(n);
        let cur = &mut rest[0];
        for i in 0..cur.tiles.len() {
            if cur.tiles[i].ideal {
                continue;
            }
            if !lifts.contains(&cur.tiles[i].owner) {
                cur.tiles[i].ideal = true;
                cur.tiles[i].parent = None;
                continue;
            }
            if n == 0 {
                continue;
            }
            let prev = &before[n - 1];
            let (p, v) =
                lifts.parent(&cur.tiles[i].owner).expect("lifted elements past level 0 have parents");
            let ids = prev.tiles_of(p);
            cur.tiles[i].parent =
                ids.iter().copied().find(|&j| prev.tiles[j].region.contains(v)).or(ids.first().copied());
        }
        let ideal: Vec<bool> = cur.tiles.iter().map(|t| t.ideal).collect();
        cur.edges.retain(|&(a, b, _)| !ideal[a] && !ideal[b]);
        for t in &mut cur.tiles {
            t.type_id = None;
        }
    }
    let rule = extract_rule(graph, &mut tilings, coalesce)?;

    let mut ambient_of: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (n, t) in tilings.iter().enumerate() {
        for tile in t.non_ideal() {
            if let (Some(p), Some(a)) = (tile.type_id, ambient_types[n][tile.id]) {
                ambient_of.entry(p).or_default().insert(a);
            }
        }
    }
    let mut embeds = true;
    for (p, amb) in &ambient_of {
        if amb.len() != 1 {
            embeds = false;
            continue;
        }
        let a = *amb.iter().next().expect("one");
        let mut mapped: BTreeMap<usize, usize> = BTreeMap::new();
        for (&c, &m) in &rule.types[*p].children {
            let Some(ac) = ambient_of.get(&c).filter(|s| s.len() == 1) else {
                embeds = false;
                continue;
            };
            *mapped.entry(*ac.iter().next().expect("one")).or_default() += m;
        }
        let amb_children = &ambient_rule.types[a].children;
        if mapped.iter().any(|(c, &m)| amb_children.get(c).copied().unwrap_or(0) < m) {
            embeds = false;
        }
    }
    let containment = Containment {
        ambient_of: ambient_of
            .iter()
            .map(|(p, a)| {
                (rule.types[*p].name.clone(), a.iter().map(|&x| ambient_rule.types[x].name.clone()).collect())
            })
            .collect(),
        embeds,
    };
    Ok(Pruned { tilings, rule, containment })
}

/// Bounded-depth cone-type classes of the history graph.
#[derive(Clone, Debug, Serialize)]
pub struct ConeTypes {
    pub depth: usize,
    /// Distinct classes among classified tiles of each level (level 0 first).
    pub per_level: Vec<usize>,
    /// Distinct classes overall, including the root.
    pub total: usize,
    /// Classes are computed from finite neighbourhoods only.
    pub approximate: bool,
}

/// Classifies non-ideal tiles (plus a root above level 0) by the rooted
/// shape of their depth-`k` descendant tree, each node labelled with its
/// horizontal degree.
pub fn cone_types(tilings: &[Tiling], k: usize) -> Result<ConeTypes> {
    let levels = tilings.len();
    if levels < k + 1 {
        return Err(Error::TooFewLevels { needed: k + 1, got: levels });
    }
    let degree: Vec<Vec<usize>> = tilings
        .iter()
        .map(|t| {
            let mut d = vec![0; t.tiles.len()];
            for &(a, b, _) in &t.edges {
                if !t.tiles[a].ideal && !t.tiles[b].ideal {
                    d[a] += 1;
                    d[b] += 1;
                }
            }
            d
        })
        .collect();
    let children: Vec<Vec<Vec<usize>>> =
        (0..levels - 1).map(|l| tilings[l].children_in(&tilings[l + 1])).collect();
    let mut intern: HashMap<(usize, Vec<u32>), u32> = HashMap::new();
    let mut code: Vec<Vec<u32>> = tilings
        .iter()
        .enumerate()
        .map(|(l, t)| {
            t.tiles
                .iter()
                .map(|x| {
                    let id = intern.len() as u32;
                    *intern.entry((degree[l][x.id], Vec::new())).or_insert(id)
                })
                .collect()
        })
        .collect();
    let mut prev_code = code.clone();
    for _ in 0..k {
        let mut next = code.clone();
        for l in 0..levels - 1 {
            for (i, tile) in tilings[l].tiles.iter().enumerate() {
                let mut ch: Vec<u32> = children[l][i].iter().map(|&c| code[l + 1][c]).collect();
                ch.sort_unstable();
                let id = intern.len() as u32;
                next[l][i] = *intern.entry((degree[l][tile.id], ch)).or_insert(id);
            }
        }
        prev_code = std::mem::replace(&mut code, next);
    }
    let classified_top = levels - 1 - k;
    let mut all = BTreeSet::new();
    let mut per_level = Vec::new();
    for l in 0..=classified_top {
        let s: BTreeSet<u32> = tilings[l].non_ideal().map(|t| code[l][t.id]).collect();
        per_level.push(s.len());
        all.extend(s);
    }
    // The root: one synthetic vertex whose children are the level-0 tiles.
    let root = if k == 0 {
        let id = intern.len() as u32;
        *intern.entry((usize::MAX, Vec::new())).or_insert(id)
    } else {
        let mut ch: Vec<u32> = tilings[0].non_ideal().map(|t| prev_code[0][t.id]).collect();
        ch.sort_unstable();
        let id = intern.len() as u32;
        *intern.entry((usize::MAX, ch)).or_insert(id)
    };
    all.insert(root);
    Ok(ConeTypes { depth: k, per_level, total: all.len(), approximate: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::DEFAULT_CAP;
    use crate::rule::extract_rule;
    use crate::tiling::build_tilings;

    fn square() -> DefiningGraph {
        DefiningGraph::new(vec!["a", "b"], &[(0, 1)]).unwrap()
    }

    const LOOP_A: &str =
        r#"{"vertices":["v"],"edges":[{"from":"v","to":"v","label":"a","sign":1}],"squares":[]}"#;

    #[test]
    fn local_isometry_examples() {
        let g = square();
        let spec = CubeComplexSpec::from_json(LOOP_A).unwrap();
        check_local_isometry(&spec, &g).unwrap();
        let two = r#"{"vertices":["v"],"edges":[{"from":"v","to":"v","label":"a"},{"from":"v","to":"v","label":"b"}]}"#;
        let spec = CubeComplexSpec::from_json(two).unwrap();
        assert!(matches!(check_local_isometry(&spec, &g), Err(Error::MalformedComplex(_))));
        check_local_isometry(&CubeComplexSpec::salvetti(&g), &g).unwrap();
        let p = DefiningGraph::new(vec!["a", "b", "z"], &[(0, 2), (1, 2)]).unwrap();
        check_local_isometry(&CubeComplexSpec::salvetti(&p), &p).unwrap();
    }

    #[test]
    fn malformed_specs() {
        assert!(CubeComplexSpec::from_json(r#"{"vertices":[],"edges":[]}"#).is_err());
        assert!(CubeComplexSpec::from_json(
            r#"{"vertices":["v"],"edges":[{"from":"v","to":"w","label":"a"}]}"#
        )
        .is_err());
        assert!(CubeComplexSpec::from_json(r#"{"vertices":["v"],"edges":[],"squares":[[0,0,0,0]]}"#).is_err());
        let bad_label =
            CubeComplexSpec::from_json(r#"{"vertices":["v"],"edges":[{"from":"v","to":"v","label":"q"}]}"#)
                .unwrap();
        assert!(matches!(check_local_isometry(&bad_label, &square()), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn loop_lifts_a_line() {
        let g = square();
        let ball = Ball::build(&g, 3, DEFAULT_CAP).unwrap();
        let spec = CubeComplexSpec::from_json(LOOP_A).unwrap();
        let lifts = lift_basepoints(&spec, &g, &ball).unwrap();
        assert_eq!(lifts.level_sizes(), [1, 2, 2, 2]);
    }

    #[test]
    fn pruning_a_line_out_of_the_plane() {
        let g = square();
        let ball = Ball::build(&g, 5, DEFAULT_CAP).unwrap();
        let mut ts = build_tilings(&ball, 4).unwrap();
        let rule = extract_rule(&g, &mut ts, true).unwrap();
        let spec = CubeComplexSpec::from_json(LOOP_A).unwrap();
        let lifts = lift_basepoints(&spec, &g, &ball).unwrap();
        let pruned = prune_history(&g, &ts, &rule, &lifts, true).unwrap();
        let counts: Vec<usize> = pruned.tilings.iter().map(Tiling::non_ideal_count).collect();
        assert_eq!(counts, [2, 2, 2, 2]);
        assert!(pruned.containment.embeds);
        assert_eq!(cone_types(&pruned.tilings, 1).unwrap().total, 2);
    }

    #[test]
    fn full_salvetti_prunes_nothing() {
        let g = square();
        let ball = Ball::build(&g, 5, DEFAULT_CAP).unwrap();
        let mut ts = build_tilings(&ball, 4).unwrap();
        let rule = extract_rule(&g, &mut ts, true).unwrap();
        let lifts = lift_basepoints(&CubeComplexSpec::salvetti(&g), &g, &ball).unwrap();
        assert_eq!(lifts.level_sizes(), ball.level_sizes());
        let pruned = prune_history(&g, &ts, &rule, &lifts, true).unwrap();
        assert_eq!(pruned.rule.describe(), rule.describe());
        assert_eq!(pruned.rule.counts, rule.counts);
    }

    #[test]
    fn free_group_cone_types() {
        let g = DefiningGraph::edgeless(3);
        let ball = Ball::build(&g, 4, DEFAULT_CAP).unwrap();
        let ts = build_tilings(&ball, 3).unwrap();
        assert_eq!(cone_types(&ts, 1).unwrap().total, 2);
    }
}
