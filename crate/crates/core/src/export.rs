//! Tiling JSON (with re-import), DOT and SVG renderings, CSV tables.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raag::{DefiningGraph, SignedSet};
use crate::rule::SubdivisionRule;
use crate::tiling::{EdgeKind, Tile, Tiling};
use crate::word::Element;

/// Renders a signed set as `a+ z-`.
pub fn signed_literal(graph: &DefiningGraph, s: SignedSet) -> String {
    s.entries()
        .map(|(g, sign)| format!("{}{}", graph.name(g), if sign > 0 { '+' } else { '-' }))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses the `a+ z-` form.
pub fn parse_signed(graph: &DefiningGraph, text: &str) -> Result<SignedSet> {
    let mut out = SignedSet::EMPTY;
    for token in text.split_whitespace() {
        let (name, sign) = match token.char_indices().last() {
            Some((i, '+')) => (&token[..i], 1),
            Some((i, '-')) => (&token[..i], -1),
            _ => return Err(Error::Parse(format!("missing sign in `{token}`"))),
        };
        let g = graph.index_of(name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        if out.sign(g) != 0 {
            return Err(Error::Parse(format!("generator `{name}` repeated")));
        }
        out = out.with(g, sign);
    }
    Ok(out)
}

fn kind_name(k: EdgeKind) -> &'static str {
    match k {
        EdgeKind::FlatRidge => "flat_ridge",
        EdgeKind::Containment => "containment",
    }
}

fn parse_kind(s: &str) -> Result<EdgeKind> {
    match s {
        "flat_ridge" => Ok(EdgeKind::FlatRidge),
        "containment" => Ok(EdgeKind::Containment),
        other => Err(Error::Parse(format!("unknown edge kind `{other}`"))),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TileRecord {
    id: usize,
    level: usize,
    #[serde(rename = "type")]
    type_name: Option<String>,
    type_id: Option<usize>,
    owner: String,
    normal_form: String,
    component: usize,
    covered: String,
    region: Vec<String>,
    ideal: bool,
    adjacent: Vec<(usize, String)>,
    parent: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelRecord {
    level: usize,
    tiles: Vec<TileRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TilingsFile {
    graph: serde_json::Value,
    levels: Vec<LevelRecord>,
}

/// JSON document holding the graph and every level.
pub fn tilings_to_json(graph: &DefiningGraph, tilings: &[Tiling], rule: Option<&SubdivisionRule>) -> String {
    let levels = tilings
        .iter()
        .map(|t| {
            let adj = t.adjacency();
            LevelRecord {
                level: t.level,
                tiles: t
                    .tiles
                    .iter()
                    .map(|tile| TileRecord {
                        id: tile.id,
                        level: tile.level,
                        type_name: rule.zip(tile.type_id).map(|(r, i)| r.types[i].name.clone()),
                        type_id: tile.type_id,
                        owner: tile.owner.to_literal(graph),
                        normal_form: tile.owner.normal_form(graph).to_literal(graph),
                        component: tile.component,
                        covered: signed_literal(graph, tile.covered),
                        region: tile.region.iter().map(|&c| signed_literal(graph, c)).collect(),
                        ideal: tile.ideal,
                        adjacent: adj[tile.id].iter().map(|&(n, k)| (n, kind_name(k).to_string())).collect(),
                        parent: tile.parent,
                    })
                    .collect(),
            }
        })
        .collect();
    let file =
        TilingsFile { graph: serde_json::from_str(&graph.to_json()).expect("graph JSON is valid"), levels };
    serde_json::to_string_pretty(&file).expect("tilings serialize")
}

/// Reads a document written by [`tilings_to_json`].
pub fn tilings_from_json(text: &str) -> Result<(DefiningGraph, Vec<Tiling>)> {
    let file: TilingsFile = serde_json::from_str(text)?;
    let graph = DefiningGraph::from_json(&file.graph.to_string())?;
    let mut out = Vec::with_capacity(file.levels.len());
    for (n, lvl) in file.levels.into_iter().enumerate() {
        if lvl.level != n {
            return Err(Error::Parse(format!("level {} listed in position {n}", lvl.level)));
        }
        let count = lvl.tiles.len();
        let mut tiles = Vec::with_capacity(count);
        let mut edges = BTreeSet::new();
        for (i, r) in lvl.tiles.into_iter().enumerate() {
            if r.id != i || r.level != n {
                return Err(Error::Parse(format!("tile {i} of level {n} has id {} level {}", r.id, r.level)));
            }
            let owner = Element::parse(&graph, &r.owner)?;
            if owner.normal_form(&graph).to_literal(&graph) != r.normal_form {
                return Err(Error::Parse(format!("tile {i}: normal form does not match owner")));
            }
            let covered = parse_signed(&graph, &r.covered)?;
            let region = r.region.iter().map(|c| parse_signed(&graph, c)).collect::<Result<Vec<_>>>()?;
            for (j, k) in &r.adjacent {
                if *j >= count || *j == i {
                    return Err(Error::Parse(format!("tile {i}: bad neighbour {j}")));
                }
                edges.insert((i.min(*j), i.max(*j), parse_kind(k)?));
            }
            tiles.push(Tile {
                id: i,
                level: n,
                owner,
                component: r.component,
                region,
                covered,
                ideal: r.ideal,
                parent: r.parent,
                type_id: r.type_id,
            });
        }
        let tiling = Tiling::from_parts(n, tiles, edges.into_iter().collect());
        let adj = tiling.adjacency();
        let listed: usize = adj.iter().map(Vec::len).sum();
        if listed != 2 * tiling.edges.len() {
            return Err(Error::Parse(format!("level {n}: adjacency lists are not symmetric")));
        }
        out.push(tiling);
    }
    for n in 1..out.len() {
        let prev = out[n - 1].tiles.len();
        if out[n].tiles.iter().any(|t| t.parent.is_some_and(|p| p >= prev)) {
            return Err(Error::Parse(format!("level {n}: parent id out of range")));
        }
    }
    Ok((graph, out))
}

fn dot_id(level: usize, id: usize) -> String {
    format!("L{level}_{id}")
}

fn type_label(rule: Option<&SubdivisionRule>, tile: &Tile) -> String {
    match rule.zip(tile.type_id) {
        Some((r, t)) => r.types[t].name.clone(),
        None => "?".into(),
    }
}

/// DOT source of one level's dual graph.
pub fn level_dot(tiling: &Tiling, rule: Option<&SubdivisionRule>) -> String {
    let mut s = format!("graph level_{} {{\n", tiling.level);
    for t in &tiling.tiles {
        let style = if t.ideal { ", style=dashed" } else { "" };
        let _ = writeln!(s, "  {} [label=\"{}\"{style}];", dot_id(t.level, t.id), type_label(rule, t));
    }
    for &(a, b, k) in &tiling.edges {
        let style = match k {
            EdgeKind::FlatRidge => "solid",
            EdgeKind::Containment => "dotted",
        };
        let _ = writeln!(s, "  {} -- {} [style={style}];", dot_id(tiling.level, a), dot_id(tiling.level, b));
    }
    s.push_str("}\n");
    s
}

/// DOT source of the history graph: horizontal edges undirected in style,
/// vertical edges from parent to child.
pub fn history_dot(tilings: &[Tiling], rule: Option<&SubdivisionRule>) -> String {
    let mut s = String::from("digraph history {\n");
    for t in tilings {
        let _ = writeln!(s, "  subgraph cluster_{} {{\n    label=\"level {}\";", t.level, t.level);
        for tile in t.non_ideal() {
            let _ = writeln!(s, "    {} [label=\"{}\"];", dot_id(t.level, tile.id), type_label(rule, tile));
        }
        s.push_str("  }\n");
        for &(a, b, k) in &t.edges {
            if t.tiles[a].ideal || t.tiles[b].ideal {
                continue;
            }
            let style = match k {
                EdgeKind::FlatRidge => "solid",
                EdgeKind::Containment => "dotted",
            };
            let _ =
                writeln!(s, "  {} -> {} [dir=none, style={style}];", dot_id(t.level, a), dot_id(t.level, b));
        }
        if t.level > 0 {
            for tile in t.non_ideal() {
                if let Some(p) = tile.parent {
                    let _ = writeln!(s, "  {} -> {};", dot_id(t.level - 1, p), dot_id(t.level, tile.id));
                }
            }
        }
    }
    s.push_str("}\n");
    s
}

const PALETTE: [&str; 8] =
    ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f"];

/// Schematic force-directed drawing of one level's dual graph.
pub fn level_svg(tiling: &Tiling, rule: Option<&SubdivisionRule>, seed: u64) -> String {
    let n = tiling.tiles.len();
    let size = 800.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<(f64, f64)> =
        (0..n).map(|_| (rng.gen_range(0.0..size), rng.gen_range(0.0..size))).collect();
    if n > 0 {
        let k = (size * size / n as f64).sqrt();
        let iterations = (20_000_000 / (n * n).max(1)).clamp(5, 200);
        let mut temp = size / 10.0;
        for _ in 0..iterations {
            let mut disp = vec![(0.0f64, 0.0f64); n];
            for i in 0..n {
                for j in i + 1..n {
                    let (dx, dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                    let d = (dx * dx + dy * dy).sqrt().max(0.01);
                    let f = k * k / d;
                    disp[i].0 += dx / d * f;
                    disp[i].1 += dy / d * f;
                    disp[j].0 -= dx / d * f;
                    disp[j].1 -= dy / d * f;
                }
            }
            for &(a, b, _) in &tiling.edges {
                let (dx, dy) = (pos[a].0 - pos[b].0, pos[a].1 - pos[b].1);
                let d = (dx * dx + dy * dy).sqrt().max(0.01);
                let f = d * d / k;
                disp[a].0 -= dx / d * f;
                disp[a].1 -= dy / d * f;
                disp[b].0 += dx / d * f;
                disp[b].1 += dy / d * f;
            }
            for i in 0..n {
                let (dx, dy) = disp[i];
                let d = (dx * dx + dy * dy).sqrt().max(0.01);
                pos[i].0 = (pos[i].0 + dx / d * d.min(temp)).clamp(10.0, size - 10.0);
                pos[i].1 = (pos[i].1 + dy / d * d.min(temp)).clamp(10.0, size - 10.0);
            }
            temp *= 0.95;
        }
    }
    let types: BTreeSet<String> = tiling.non_ideal().map(|t| type_label(rule, t)).collect();
    let color = |name: &str| {
        let i = types.iter().position(|t| t == name).unwrap_or(0);
        PALETTE[i % PALETTE.len()]
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = size as u32 + 160,
        h = size as u32
    );
    let _ = writeln!(
        s,
        "<metadata>{{\"level\":{},\"seed\":{seed},\"layout\":\"force-directed, schematic, no metric meaning\"}}</metadata>",
        tiling.level
    );
    for &(a, b, k) in &tiling.edges {
        let dash = match k {
            EdgeKind::FlatRidge => "",
            EdgeKind::Containment => " stroke-dasharray=\"2,3\"",
        };
        let _ = writeln!(
            s,
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#555\"{dash}/>",
            pos[a].0, pos[a].1, pos[b].0, pos[b].1
        );
    }
    for t in &tiling.tiles {
        let (x, y) = pos[t.id];
        if t.ideal {
            let _ = writeln!(
                s,
                "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"4\" fill=\"none\" stroke=\"#999\" stroke-dasharray=\"2,2\"/>"
            );
        } else {
            let name = type_label(rule, t);
            let _ = writeln!(
                s,
                "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"6\" fill=\"{}\"><title>{name}</title></circle>",
                color(&name)
            );
        }
    }
    for (i, name) in types.iter().enumerate() {
        let y = 20 + 20 * i;
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{y}\" r=\"6\" fill=\"{}\"/><text x=\"{}\" y=\"{}\" font-size=\"14\">{name}</text>",
            size as u32 + 20,
            color(name),
            size as u32 + 35,
            y + 5
        );
    }
    s.push_str("</svg>\n");
    s
}

/// CSV of non-ideal tile counts: `level,total,<type>...`.
pub fn counts_csv(tilings: &[Tiling], rule: Option<&SubdivisionRule>) -> String {
    let mut s = String::from("level,total");
    let names: Vec<String> = rule
        .map(|r| r.types.iter().filter(|t| !t.ideal).map(|t| t.name.clone()).collect())
        .unwrap_or_default();
    for n in &names {
        let _ = write!(s, ",{n}");
    }
    s.push('\n');
    for (l, t) in tilings.iter().enumerate() {
        let _ = write!(s, "{l},{}", t.non_ideal_count());
        if let Some(r) = rule {
            for (i, ty) in r.types.iter().enumerate() {
                if !ty.ideal {
                    let _ = write!(s, ",{}", r.counts[l][i]);
                }
            }
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{Ball, DEFAULT_CAP};
    use crate::rule::extract_rule;
    use crate::tiling::build_tilings;

    fn cube() -> (DefiningGraph, Vec<Tiling>, SubdivisionRule) {
        let g = DefiningGraph::complete(3);
        let ball = Ball::build(&g, 4, DEFAULT_CAP).unwrap();
        let mut ts = build_tilings(&ball, 3).unwrap();
        let r = extract_rule(&g, &mut ts, true).unwrap();
        (g, ts, r)
    }

    #[test]
    fn signed_literals() {
        let g = DefiningGraph::complete(3);
        let s = SignedSet::from_signs(&[(0, 1), (2, -1)]);
        assert_eq!(signed_literal(&g, s), "a+ c-");
        assert_eq!(parse_signed(&g, "a+ c-").unwrap(), s);
        assert!(parse_signed(&g, "a").is_err());
        assert!(parse_signed(&g, "a+ a-").is_err());
    }

    #[test]
    fn tiling_round_trip() {
        let (g, ts, r) = cube();
        let text = tilings_to_json(&g, &ts, Some(&r));
        let (g2, back) = tilings_from_json(&text).unwrap();
        assert_eq!(g2, g);
        assert_eq!(back.len(), ts.len());
        for (a, b) in ts.iter().zip(&back) {
            assert_eq!(a.tiles, b.tiles);
            assert_eq!(a.edges, b.edges);
        }
        assert_eq!(tilings_to_json(&g2, &back, Some(&r)), text);
    }

    #[test]
    fn renderings() {
        let (_, ts, r) = cube();
        let svg = level_svg(&ts[0], Some(&r), 7);
        assert_eq!(svg.matches("<circle").count(), 26 + 3);
        assert_eq!(svg, level_svg(&ts[0], Some(&r), 7));
        let empty = Tiling::from_parts(0, Vec::new(), Vec::new());
        assert!(level_svg(&empty, None, 1).ends_with("</svg>\n"));
        let dot = level_dot(&ts[0], Some(&r));
        assert_eq!(dot.matches(" -- ").count(), 48);
        assert!(history_dot(&ts, Some(&r)).contains("->"));
        let csv = counts_csv(&ts, Some(&r));
        assert_eq!(csv.lines().nth(1), Some("0,26,6,12,8"));
    }
}
