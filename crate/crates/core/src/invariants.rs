//! Growth, ends, mesh and divergence read off a tiling sequence.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rule::SubdivisionRule;
use crate::tiling::{EdgeKind, Tiling};

/// Terms replayed from a rule.
const EXTENDED_TERMS: usize = 60;
/// Terms generated from a fitted recurrence before classifying.
const RECURRENCE_TERMS: usize = 2000;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum GrowthClass {
    Polynomial { degree: usize },
    Exponential { ratio: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    /// Non-ideal tiles per level (equal to the sphere one level further out).
    pub counts: Vec<String>,
    /// Counts by type, when a rule is available.
    pub by_type: Vec<Vec<usize>>,
    /// Child-count matrix `C[i][j]`: children of type `j` in a tile of type `i`.
    pub matrix: Vec<Vec<usize>>,
    /// Coefficients `c_1..c_r` of `a(n) = c_1 a(n-1) + ... + c_r a(n-r)`.
    pub recurrence: Option<Vec<String>>,
    /// Where the classification came from: `rule` or `recurrence`.
    pub source: String,
    pub classification: GrowthClass,
}

/// Smallest exact linear recurrence satisfied by `seq`, confirmed on at
/// least one term beyond those used to solve for it.
pub fn fit_recurrence(seq: &[BigInt]) -> Result<Vec<BigRational>> {
    let n = seq.len();
    if seq.iter().all(Zero::is_zero) {
        return Ok(Vec::new());
    }
    let mut order = 1;
    while 2 * order < n {
        if let Some(c) = solve_order(seq, order) {
            let ok = (2 * order..n).all(|i| {
                let pred: BigRational =
                    (0..order).map(|j| &c[j] * BigRational::from_integer(seq[i - 1 - j].clone())).sum();
                pred == BigRational::from_integer(seq[i].clone())
            });
            if ok {
                return Ok(c);
            }
        }
        order += 1;
    }
    Err(Error::FitUnderdetermined(format!(
        "no recurrence of order < {} verified on {n} terms",
        n.div_ceil(2)
    )))
}

/// Solves `seq[i] = Σ c_j seq[i-1-j]` for `i = r..2r`.
fn solve_order(seq: &[BigInt], r: usize) -> Option<Vec<BigRational>> {
    let q = |x: &BigInt| BigRational::from_integer(x.clone());
    let mut m: Vec<Vec<BigRational>> = (r..2 * r)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..r).map(|j| q(&seq[i - 1 - j])).collect();
            row.push(q(&seq[i]));
            row
        })
        .collect();
    for col in 0..r {
        let pivot = (col..r).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &p;
        }
        for i in 0..r {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[r].clone()).collect())
}

/// Extends `seq` to `len` terms with the recurrence `c`.
pub fn extend_with(seq: &[BigInt], c: &[BigRational], len: usize) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = seq.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    while out.len() < len {
        let i = out.len();
        let next = (0..c.len()).map(|j| &c[j] * &out[i - 1 - j]).sum();
        out.push(next);
    }
    out
}

fn ratio_f64(a: &BigRational, b: &BigRational) -> f64 {
    if b.is_zero() {
        return f64::INFINITY;
    }
    (a / b).to_f64().unwrap_or(f64::INFINITY)
}

/// Classifies a long exact sequence by comparing `a(2m)` with `a(m)`.
fn classify_sequence(seq: &[BigRational]) -> GrowthClass {
    let n = seq.len() - 1;
    let m = n / 2;
    let (big, small) = (seq[2 * m].abs(), seq[m].abs());
    let r = ratio_f64(&big, &small);
    let per_step = r.powf(1.0 / m as f64);
    if per_step > 1.01 {
        GrowthClass::Exponential { ratio: ratio_f64(&seq[n].abs(), &seq[n - 1].abs()) }
    } else {
        GrowthClass::Polynomial { degree: r.log2().round().max(0.0) as usize }
    }
}

/// Growth from the rule when it replays the observed counts, otherwise from
/// an exact recurrence fitted to `counts`.
pub fn growth(counts: &[usize], rule: Option<&SubdivisionRule>) -> Result<GrowthReport> {
    let usable = rule.filter(|r| r.stable && r.replay_matches());
    if let Some(rule) = usable {
        let k = rule.types.len();
        let matrix: Vec<Vec<usize>> = rule
            .types
            .iter()
            .map(|t| (0..k).map(|j| t.children.get(&j).copied().unwrap_or(0)).collect())
            .collect();
        let totals: Vec<BigInt> = rule.replay_totals(EXTENDED_TERMS).into_iter().map(BigInt::from).collect();
        let recurrence = fit_recurrence(&totals).ok().map(|c| c.iter().map(|x| x.to_string()).collect());
        let start: Vec<bool> = rule.counts[0].iter().map(|&c| c > 0).collect();
        let classification = classify_matrix(&matrix, &start, &totals);
        return Ok(GrowthReport {
            counts: counts.iter().map(|c| c.to_string()).collect(),
            by_type: rule.counts.clone(),
            matrix,
            recurrence,
            source: "rule".into(),
            classification,
        });
    }
    if counts.len() < 4 {
        return Err(Error::FitUnderdetermined(format!("{} levels given, at least 4 needed", counts.len())));
    }
    let seq: Vec<BigInt> = counts.iter().map(|&c| BigInt::from(c)).collect();
    let c = fit_recurrence(&seq)?;
    let ext = extend_with(&seq, &c, RECURRENCE_TERMS.max(seq.len()));
    Ok(GrowthReport {
        counts: counts.iter().map(|c| c.to_string()).collect(),
        by_type: Vec::new(),
        matrix: Vec::new(),
        recurrence: Some(c.iter().map(|x| x.to_string()).collect()),
        source: "recurrence".into(),
        classification: classify_sequence(&ext),
    })
}

/// Exponential iff some strongly connected component reachable from the
/// start types has an internal row sum above one; otherwise the degree is
/// one less than the longest chain of cyclic components.
fn classify_matrix(matrix: &[Vec<usize>], start: &[bool], totals: &[BigInt]) -> GrowthClass {
    let k = matrix.len();
    let reach = {
        let mut seen = start.to_vec();
        let mut stack: Vec<usize> = (0..k).filter(|&i| start[i]).collect();
        while let Some(v) = stack.pop() {
            for w in 0..k {
                if matrix[v][w] > 0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };
    let comp = scc(matrix);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut cyclic = vec![false; ncomp];
    let mut expanding = false;
    for v in (0..k).filter(|&v| reach[v]) {
        let inner: usize = (0..k).filter(|&w| comp[w] == comp[v]).map(|w| matrix[v][w]).sum();
        if inner >= 1 {
            cyclic[comp[v]] = true;
        }
        if inner >= 2 {
            expanding = true;
        }
    }
    if expanding {
        let n = totals.len() - 1;
        let r = ratio_f64(
            &BigRational::from_integer(totals[n].clone()),
            &BigRational::from_integer(totals[n - 1].clone()),
        );
        return GrowthClass::Exponential { ratio: r };
    }
    // Longest chain of cyclic components in the condensation.
    let mut memo: HashMap<usize, usize> = HashMap::new();
    fn chain(
        c: usize,
        matrix: &[Vec<usize>],
        comp: &[usize],
        cyclic: &[bool],
        memo: &mut HashMap<usize, usize>,
    ) -> usize {
        if let Some(&v) = memo.get(&c) {
            return v;
        }
        let k = matrix.len();
        let mut best = 0;
        for v in (0..k).filter(|&v| comp[v] == c) {
            for w in (0..k).filter(|&w| matrix[v][w] > 0 && comp[w] != c) {
                best = best.max(chain(comp[w], matrix, comp, cyclic, memo));
            }
        }
        let r = best + usize::from(cyclic[c]);
        memo.insert(c, r);
        r
    }
    let longest = (0..k)
        .filter(|&v| start[v])
        .map(|v| chain(comp[v], matrix, &comp, &cyclic, &mut memo))
        .max()
        .unwrap_or(0);
    GrowthClass::Polynomial { degree: longest.saturating_sub(1) }
}

/// Strongly connected components (Kosaraju), as a component id per vertex.
fn scc(matrix: &[Vec<usize>]) -> Vec<usize> {
    let k = matrix.len();
    let mut order = Vec::with_capacity(k);
    let mut seen = vec![false; k];
    for s in 0..k {
        if seen[s] {
            continue;
        }
        let mut stack = vec![(s, 0usize)];
        seen[s] = true;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(w) = (*next..k).find(|&w| matrix[v][w] > 0 && !seen[w]) {
                *next = w + 1;
                seen[w] = true;
                stack.push((w, 0));
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; k];
    let mut c = 0;
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = c;
        while let Some(v) = stack.pop() {
            for w in 0..k {
                if matrix[w][v] > 0 && comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        c += 1;
    }
    comp
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EndsVerdict {
    Count { ends: usize },
    Unbounded { at_least: usize },
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct EndsReport {
    pub components: Vec<usize>,
    /// For each level after the first, the parent component of each component.
    pub parent_map: Vec<Vec<usize>>,
    pub window: usize,
    pub verdict: EndsVerdict,
}

pub fn ends(tilings: &[Tiling], window: usize) -> Result<EndsReport> {
    if tilings.len() < 3 {
        return Err(Error::TooFewLevels { needed: 3, got: tilings.len() });
    }
    let window = window.clamp(2, tilings.len());
    let comps: Vec<(usize, Vec<Option<usize>>)> = tilings.iter().map(Tiling::horizontal_components).collect();
    let mut parent_map = Vec::new();
    let mut bijective = Vec::new();
    for l in 1..tilings.len() {
        let (count, ref of) = comps[l];
        let mut map = vec![usize::MAX; count];
        let mut consistent = true;
        for tile in tilings[l].non_ideal() {
            let c = of[tile.id].expect("non-ideal");
            let pc = tile.parent.and_then(|p| comps[l - 1].1[p]).unwrap_or(usize::MAX);
            if map[c] == usize::MAX {
                map[c] = pc;
            } else if map[c] != pc {
                consistent = false;
            }
        }
        let images: BTreeSet<usize> = map.iter().copied().collect();
        bijective.push(
            consistent && images.len() == count && count == comps[l - 1].0 && !images.contains(&usize::MAX),
        );
        parent_map.push(map);
    }
    let counts: Vec<usize> = comps.iter().map(|c| c.0).collect();
    let tail = &counts[counts.len() - window..];
    let tail_bij = &bijective[bijective.len() - (window - 1)..];
    let verdict = if tail.windows(2).all(|w| w[0] == w[1]) && tail_bij.iter().all(|&b| b) {
        EndsVerdict::Count { ends: tail[0] }
    } else if tail.windows(2).all(|w| w[0] < w[1]) {
        EndsVerdict::Unbounded { at_least: *tail.last().expect("nonempty") }
    } else {
        EndsVerdict::Undetermined
    };
    Ok(EndsReport { components: counts, parent_map, window, verdict })
}

/// Node of the persistence digraph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Persistent {
    /// A tile with exactly one non-ideal child.
    Single(String),
    /// Two adjacent tiles.
    Pair(String, String, EdgeKind),
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MeshReport {
    Certified,
    Counterexample { orbit: Vec<Persistent> },
}

/// Looks for a tile or adjacent tile pair that keeps an unsubdivided copy
/// of itself forever.
pub fn mesh_certificate(rule: &SubdivisionRule, tilings: &[Tiling]) -> Result<MeshReport> {
    rule.require_stable()?;
    let name = |t: usize| rule.types[t].name.clone();
    let pair = |a: usize, b: usize, k: EdgeKind| {
        let (x, y) = (name(a).min(name(b)), name(a).max(name(b)));
        Persistent::Pair(x, y, k)
    };
    let mut edges: BTreeMap<Persistent, BTreeSet<Persistent>> = BTreeMap::new();
    for ty in rule.types.iter().filter(|t| !t.ideal) {
        if ty.child_count() == 1 {
            let (&c, _) = ty.children.iter().next().expect("one child");
            edges.entry(Persistent::Single(ty.name.clone())).or_default().insert(Persistent::Single(name(c)));
        }
    }
    for w in tilings.windows(2) {
        let (cur, next) = (&w[0], &w[1]);
        let children = cur.children_in(next);
        let next_adj: BTreeSet<(usize, usize)> = next.edges.iter().map(|&(a, b, _)| (a, b)).collect();
        let next_kind: HashMap<(usize, usize), EdgeKind> =
            next.edges.iter().map(|&(a, b, k)| ((a, b), k)).collect();
        for &(a, b, k) in &cur.edges {
            let (Some(ta), Some(tb)) = (cur.tiles[a].type_id, cur.tiles[b].type_id) else { continue };
            for &ca in &children[a] {
                for &cb in &children[b] {
                    let key = (ca.min(cb), ca.max(cb));
                    if !next_adj.contains(&key) {
                        continue;
                    }
                    let (Some(tca), Some(tcb)) = (next.tiles[ca].type_id, next.tiles[cb].type_id) else {
                        continue;
                    };
                    edges.entry(pair(ta, tb, k)).or_default().insert(pair(tca, tcb, next_kind[&key]));
                }
            }
        }
    }
    match find_cycle(&edges) {
        Some(orbit) => Ok(MeshReport::Counterexample { orbit }),
        None => Ok(MeshReport::Certified),
    }
}

fn find_cycle(edges: &BTreeMap<Persistent, BTreeSet<Persistent>>) -> Option<Vec<Persistent>> {
    let mut state: HashMap<&Persistent, u8> = HashMap::new();
    for start in edges.keys() {
        if state.contains_key(start) {
            continue;
        }
        let mut path: Vec<&Persistent> = vec![start];
        let mut iters: Vec<std::collections::btree_set::Iter<Persistent>> = Vec::new();
        state.insert(start, 1);
        iters.push(edges.get(start).map(|s| s.iter()).unwrap_or_default());
        while let Some(it) = iters.last_mut() {
            match it.next() {
                Some(w) => match state.get(w) {
                    Some(1) => {
                        let i = path.iter().position(|p| *p == w).expect("on path");
                        return Some(path[i..].iter().map(|p| (*p).clone()).collect());
                    }
                    Some(_) => {}
                    None => {
                        state.insert(w, 1);
                        path.push(w);
                        iters.push(edges.get(w).map(|s| s.iter()).unwrap_or_default());
                    }
                },
                None => {
                    let v = path.pop().expect("path tracks iters");
                    state.insert(v, 2);
                    iters.pop();
                }
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiameterMode {
    /// Breadth-first search from every tile.
    Exact,
    /// Two sweeps; a lower bound.
    DoubleSweep,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelDiameter {
    pub level: usize,
    /// `None` when the dual graph is disconnected.
    pub diameter: Option<usize>,
    pub bound_only: bool,
    /// Tile ids realising the diameter, joined by a shortest path.
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum DivergenceClass {
    Linear { slope: f64, intercept: f64 },
    Exponential { rate: f64 },
    Infinite,
    Insufficient,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceReport {
    pub levels: Vec<LevelDiameter>,
    pub linear_residual: Option<f64>,
    pub exponential_residual: Option<f64>,
    pub class: DivergenceClass,
}

/// Distances and BFS-tree parents from `s`.
fn bfs(adj: &[Vec<usize>], s: usize) -> (Vec<usize>, Vec<usize>) {
    let mut prev = vec![usize::MAX; adj.len()];
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                prev[w] = v;
                q.push_back(w);
            }
        }
    }
    (dist, prev)
}

fn path_to(prev: &[usize], s: usize, t: usize) -> Vec<usize> {
    let mut path = vec![t];
    let mut v = t;
    while v != s {
        v = prev[v];
        path.push(v);
    }
    path.reverse();
    path
}

/// Diameter of one level's non-ideal dual graph.
pub fn level_diameter(tiling: &Tiling, mode: DiameterMode) -> LevelDiameter {
    let ids: Vec<usize> = tiling.non_ideal().map(|t| t.id).collect();
    let local: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut adj = vec![Vec::new(); ids.len()];
    for &(a, b, _) in &tiling.edges {
        if let (Some(&x), Some(&y)) = (local.get(&a), local.get(&b)) {
            adj[x].push(y);
            adj[y].push(x);
        }
    }
    let level = tiling.level;
    if ids.is_empty() {
        return LevelDiameter { level, diameter: Some(0), bound_only: false, witness: None };
    }
    let sweep = |s: usize| -> (Vec<usize>, Option<(usize, usize)>) {
        let (dist, prev) = bfs(&adj, s);
        if dist.contains(&usize::MAX) {
            return (prev, None);
        }
        let far = (0..ids.len()).max_by_key(|&t| (dist[t], std::cmp::Reverse(t))).expect("nonempty");
        (prev, Some((far, dist[far])))
    };
    let sources: Vec<usize> = match mode {
        DiameterMode::Exact => (0..ids.len()).collect(),
        DiameterMode::DoubleSweep => {
            let (_, first) = sweep(0);
            match first {
                Some((far, _)) => vec![far],
                None => vec![0],
            }
        }
    };
    let mut best: Option<(usize, usize, usize, Vec<usize>)> = None;
    for s in sources {
        let (prev, far) = sweep(s);
        let Some((t, d)) = far else {
            return LevelDiameter { level, diameter: None, bound_only: false, witness: None };
        };
        if best.as_ref().is_none_or(|b| d > b.2) {
            best = Some((s, t, d, prev));
        }
    }
    let (s, t, d, prev) = best.expect("at least one source");
    let witness = path_to(&prev, s, t).into_iter().map(|i| ids[i]).collect();
    LevelDiameter {
        level,
        diameter: Some(d),
        bound_only: mode == DiameterMode::DoubleSweep,
        witness: Some(witness),
    }
}

/// Checks that `path` is a walk along horizontal edges of the given length.
pub fn verify_witness(tiling: &Tiling, path: &[usize], length: usize) -> bool {
    let edges: BTreeSet<(usize, usize)> = tiling.edges.iter().map(|&(a, b, _)| (a, b)).collect();
    path.len() == length + 1 && path.windows(2).all(|w| edges.contains(&(w[0].min(w[1]), w[0].max(w[1]))))
}

pub fn divergence(tilings: &[Tiling], mode: DiameterMode) -> Result<DivergenceReport> {
    if tilings.len() < 3 {
        return Err(Error::TooFewLevels { needed: 3, got: tilings.len() });
    }
    let levels: Vec<LevelDiameter> = tilings.iter().map(|t| level_diameter(t, mode)).collect();
    let points: Vec<(f64, f64)> =
        levels.iter().filter_map(|l| l.diameter.map(|d| (l.level as f64, d as f64))).collect();
    let any_infinite = levels.iter().skip(1).any(|l| l.diameter.is_none());
    if any_infinite {
        return Ok(DivergenceReport {
            levels,
            linear_residual: None,
            exponential_residual: None,
            class: DivergenceClass::Infinite,
        });
    }
    if points.len() < 3 || points.iter().any(|p| p.1 <= 0.0) {
        return Ok(DivergenceReport {
            levels,
            linear_residual: None,
            exponential_residual: None,
            class: DivergenceClass::Insufficient,
        });
    }
    let (b, a) = least_squares(&points);
    let lin: f64 = points.iter().map(|&(x, y)| (y - (a + b * x)).powi(2)).sum();
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x, y.ln())).collect();
    let (beta, alpha) = least_squares(&logs);
    let exp: f64 = points.iter().map(|&(x, y)| (y - (alpha + beta * x).exp()).powi(2)).sum();
    let class = if lin <= 0.1 * exp + 1e-9 {
        DivergenceClass::Linear { slope: b, intercept: a }
    } else {
        DivergenceClass::Exponential { rate: beta.exp() }
    };
    Ok(DivergenceReport { levels, linear_residual: Some(lin), exponential_residual: Some(exp), class })
}

/// Slope and intercept of the least-squares line.
fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = if denom == 0.0 { 0.0 } else { (n * sxy - sx * sy) / denom };
    (slope, (sy - slope * sx) / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{Ball, DEFAULT_CAP};
    use crate::raag::DefiningGraph;
    use crate::rule::extract_rule;
    use crate::tiling::build_tilings;

    fn setup(g: &DefiningGraph, levels: usize) -> (Vec<Tiling>, SubdivisionRule) {
        let ball = Ball::build(g, levels + 1, DEFAULT_CAP).unwrap();
        let mut ts = build_tilings(&ball, levels).unwrap();
        let r = extract_rule(g, &mut ts, true).unwrap();
        (ts, r)
    }

    #[test]
    fn recurrences() {
        let seq: Vec<BigInt> = (1..10).map(|n| BigInt::from(24 * n * n + 2)).collect();
        let c = fit_recurrence(&seq).unwrap();
        let c: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        assert_eq!(c, ["3", "-3", "1"]);
        let seq: Vec<BigInt> = (0..6).map(|n| BigInt::from(6 * 5i64.pow(n))).collect();
        assert_eq!(fit_recurrence(&seq).unwrap().len(), 1);
        let short: Vec<BigInt> = [1, 2, 4].iter().map(|&x| BigInt::from(x)).collect();
        assert!(fit_recurrence(&short).is_err() || fit_recurrence(&short).unwrap().len() == 1);
    }

    #[test]
    fn growth_classes() {
        let (_, r) = setup(&DefiningGraph::complete(3), 4);
        let g = growth(&[26, 98, 218, 386], Some(&r)).unwrap();
        assert_eq!(g.classification, GrowthClass::Polynomial { degree: 2 });
        let (_, r) = setup(&DefiningGraph::edgeless(3), 3);
        let g = growth(&[6, 30, 150], Some(&r)).unwrap();
        match g.classification {
            GrowthClass::Exponential { ratio } => assert!((ratio - 5.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        let (_, r) = setup(&DefiningGraph::complete(1), 3);
        let g = growth(&[2, 2, 2], Some(&r)).unwrap();
        assert_eq!(g.classification, GrowthClass::Polynomial { degree: 0 });
        let g = growth(&[26, 98, 218, 386, 602, 866, 1178], None).unwrap();
        assert_eq!(g.classification, GrowthClass::Polynomial { degree: 2 });
    }

    #[test]
    fn ends_verdicts() {
        let (ts, _) = setup(&DefiningGraph::complete(3), 3);
        assert_eq!(ends(&ts, 3).unwrap().verdict, EndsVerdict::Count { ends: 1 });
        let (ts, _) = setup(&DefiningGraph::edgeless(3), 3);
        assert_eq!(ends(&ts, 3).unwrap().verdict, EndsVerdict::Unbounded { at_least: 150 });
        let (ts, _) = setup(&DefiningGraph::complete(1), 3);
        assert_eq!(ends(&ts, 3).unwrap().verdict, EndsVerdict::Count { ends: 2 });
    }

    #[test]
    fn mesh_verdicts() {
        let (ts, r) = setup(&DefiningGraph::edgeless(3), 3);
        assert!(matches!(mesh_certificate(&r, &ts).unwrap(), MeshReport::Certified));
        let (ts, r) = setup(&DefiningGraph::complete(3), 3);
        assert!(matches!(mesh_certificate(&r, &ts).unwrap(), MeshReport::Counterexample { .. }));
        let (ts, r) = setup(&DefiningGraph::complete(1), 3);
        assert!(matches!(mesh_certificate(&r, &ts).unwrap(), MeshReport::Counterexample { .. }));
    }

    #[test]
    fn diameters() {
        let (ts, _) = setup(&DefiningGraph::complete(3), 4);
        let d = divergence(&ts, DiameterMode::Exact).unwrap();
        for l in &d.levels {
            let w = l.witness.as_ref().unwrap();
            assert!(verify_witness(&ts[l.level], w, l.diameter.unwrap()));
        }
        match d.class {
            DivergenceClass::Linear { slope, .. } => assert!((1.0..=8.0).contains(&slope)),
            other => panic!("{other:?}"),
        }
        let (ts, _) = setup(&DefiningGraph::edgeless(3), 3);
        let d = divergence(&ts, DiameterMode::Exact).unwrap();
        assert!(d.levels.iter().all(|l| l.diameter.is_none()));
        assert_eq!(d.class, DivergenceClass::Infinite);
        let (ts, _) = setup(&DefiningGraph::complete(3), 3);
        let exact = level_diameter(&ts[2], DiameterMode::Exact).diameter.unwrap();
        let bound = level_diameter(&ts[2], DiameterMode::DoubleSweep);
        assert!(bound.bound_only && bound.diameter.unwrap() <= exact);
    }
}
