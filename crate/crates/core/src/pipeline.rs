//! End-to-end runs: ball, tilings, rule, invariants, report and exports.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::ball::{Ball, BallStats, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::export;
use crate::fsutil::write_atomic;
use crate::inflation::{cross_check, CrossCheck};
use crate::invariants::{
    divergence, ends, growth, mesh_certificate, DiameterMode, DivergenceReport, EndsReport, GrowthReport,
    MeshReport,
};
use crate::raag::DefiningGraph;
use crate::rule::{extract_rule, SubdivisionRule};
use crate::special::{
    check_local_isometry, cone_types, lift_basepoints, prune_history, ConeTypes, Containment, CubeComplexSpec,
};
use crate::tiling::{build_tilings, Tiling};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExportFormat {
    Json,
    Csv,
    Dot,
    Svg,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Number of tilings `T_0 .. T_{N-1}`.
    pub levels: usize,
    pub coalesce: bool,
    pub cap: usize,
    pub ends_window: usize,
    pub diameter: DiameterMode,
    pub cone_depth: usize,
    pub cache_dir: Option<PathBuf>,
    pub svg_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            levels: 4,
            coalesce: false,
            cap: DEFAULT_CAP,
            ends_window: 3,
            diameter: DiameterMode::Exact,
            cone_depth: 2,
            cache_dir: None,
            svg_seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleSummary {
    pub types: Vec<String>,
    pub stable: bool,
    pub refinement_depth: usize,
    pub coalesced: bool,
    pub raw_initial_classes: usize,
    pub coalesced_initial_classes: usize,
    pub replay_matches: bool,
}

/// Counters for places where the construction had to guess or disagreed
/// with a prediction.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Discrepancies {
    pub predecessor_level_mismatches: usize,
    pub cover_ties: usize,
    pub cover_fallbacks: usize,
    pub parent_fallbacks: usize,
    pub descriptor_checked: usize,
    pub descriptor_mismatches: usize,
    pub refinement_unstable: bool,
    pub untyped_tiles: usize,
    pub inconsistent_tiles: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecialSummary {
    pub lift_sizes: Vec<usize>,
    pub reparented: usize,
    pub containment: Containment,
    pub cone_types: Option<ConeTypes>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: String,
    pub mode: String,
    pub graph: serde_json::Value,
    pub graph_hash: String,
    pub levels: usize,
    pub sphere_sizes: Vec<usize>,
    pub tile_counts: Vec<usize>,
    pub rule: Option<RuleSummary>,
    pub growth: Option<GrowthReport>,
    pub ends: Option<EndsReport>,
    pub mesh: Option<MeshReport>,
    pub divergence: Option<DivergenceReport>,
    pub cross_check: CrossCheck,
    pub discrepancies: Discrepancies,
    pub special: Option<SpecialSummary>,
    pub warnings: Vec<String>,
}

/// Everything a run produced.
#[derive(Debug)]
pub struct Analysis {
    pub graph: DefiningGraph,
    pub ball: Ball,
    /// Tilings the invariants were computed on (pruned in special mode).
    pub tilings: Vec<Tiling>,
    pub rule: Option<SubdivisionRule>,
    pub report: Report,
}

impl Analysis {
    pub fn rule_unstable(&self) -> bool {
        self.rule.as_ref().is_none_or(|r| !r.stable)
    }
}

fn note<T>(warnings: &mut Vec<String>, what: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            warnings.push(format!("{what}: {e}"));
            None
        }
    }
}

fn build_ball(graph: &DefiningGraph, cfg: &RunConfig) -> Result<Ball> {
    let depth = cfg.levels + 1;
    match &cfg.cache_dir {
        Some(dir) => {
            let ball = Ball::load_or_build(graph, dir, depth, cfg.cap)?;
            ball.save_cache(dir)?;
            Ok(ball)
        }
        None => Ball::build(graph, depth, cfg.cap),
    }
}

fn summarize(rule: &SubdivisionRule) -> RuleSummary {
    RuleSummary {
        types: rule.describe(),
        stable: rule.stable,
        refinement_depth: rule.depth,
        coalesced: rule.coalesced,
        raw_initial_classes: rule.raw_initial_classes,
        coalesced_initial_classes: rule.coalesced_initial_classes,
        replay_matches: rule.replay_matches(),
    }
}

fn discrepancies(
    stats: &BallStats,
    tilings: &[Tiling],
    rule: Option<&SubdivisionRule>,
    cc: &CrossCheck,
) -> Discrepancies {
    Discrepancies {
        predecessor_level_mismatches: stats.predecessor_level_mismatches,
        cover_ties: stats.cover_ties,
        cover_fallbacks: stats.cover_fallbacks,
        parent_fallbacks: tilings.iter().map(|t| t.parent_fallbacks).sum(),
        descriptor_checked: cc.checked,
        descriptor_mismatches: cc.mismatches,
        refinement_unstable: rule.is_none_or(|r| !r.stable),
        untyped_tiles: rule.map_or(0, |r| r.untyped_tiles),
        inconsistent_tiles: rule.map_or(0, |r| r.inconsistent_tiles),
    }
}

fn invariants(
    tilings: &[Tiling],
    rule: Option<&SubdivisionRule>,
    cfg: &RunConfig,
    warnings: &mut Vec<String>,
) -> (Option<GrowthReport>, Option<EndsReport>, Option<MeshReport>, Option<DivergenceReport>) {
    let counts: Vec<usize> = tilings.iter().map(Tiling::non_ideal_count).collect();
    let g = note(warnings, "growth", growth(&counts, rule));
    let e = note(warnings, "ends", ends(tilings, cfg.ends_window));
    let m = match rule {
        Some(r) => note(warnings, "mesh", mesh_certificate(r, tilings)),
        None => None,
    };
    let d = note(warnings, "divergence", divergence(tilings, cfg.diameter));
    (g, e, m, d)
}

fn graph_value(graph: &DefiningGraph) -> serde_json::Value {
    serde_json::from_str(&graph.to_json()).expect("graph JSON is valid")
}

fn check_levels(cfg: &RunConfig) -> Result<()> {
    if cfg.levels == 0 {
        return Err(Error::TooFewLevels { needed: 1, got: 0 });
    }
    Ok(())
}

/// History graph and invariants of the RAAG itself.
pub fn analyze_raag(graph: &DefiningGraph, cfg: &RunConfig) -> Result<Analysis> {
    check_levels(cfg)?;
    let ball = build_ball(graph, cfg)?;
    let mut tilings = build_tilings(&ball, cfg.levels)?;
    let mut warnings = Vec::new();
    let rule = note(&mut warnings, "rule", extract_rule(graph, &mut tilings, cfg.coalesce));
    if let Some(r) = &rule {
        if !r.stable {
            warnings.push(format!("rule: refinement did not stabilise within {} levels", cfg.levels));
        }
    }
    let cc = cross_check(&ball, &tilings, rule.as_ref());
    let (g, e, m, d) = invariants(&tilings, rule.as_ref(), cfg, &mut warnings);
    let report = Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        mode: "raag".into(),
        graph: graph_value(graph),
        graph_hash: graph.hash_hex(),
        levels: cfg.levels,
        sphere_sizes: ball.level_sizes(),
        tile_counts: tilings.iter().map(Tiling::non_ideal_count).collect(),
        rule: rule.as_ref().map(summarize),
        growth: g,
        ends: e,
        mesh: m,
        divergence: d,
        discrepancies: discrepancies(ball.stats(), &tilings, rule.as_ref(), &cc),
        cross_check: cc,
        special: None,
        warnings,
    };
    Ok(Analysis { graph: graph.clone(), ball, tilings, rule, report })
}

/// Pruned history graph of a special cube complex mapped into the Salvetti
/// complex of `graph`.
pub fn analyze_special(graph: &DefiningGraph, spec: &CubeComplexSpec, cfg: &RunConfig) -> Result<Analysis> {
    check_levels(cfg)?;
    check_local_isometry(spec, graph)?;
    let ball = build_ball(graph, cfg)?;
    let mut ambient = build_tilings(&ball, cfg.levels)?;
    let ambient_rule = extract_rule(graph, &mut ambient, cfg.coalesce)?;
    let lifts = lift_basepoints(spec, graph, &ball)?;
    let pruned = prune_history(graph, &ambient, &ambient_rule, &lifts, cfg.coalesce)?;
    let mut warnings = Vec::new();
    if !pruned.rule.stable {
        warnings.push(format!("rule: refinement did not stabilise within {} levels", cfg.levels));
    }
    let depth = cfg.cone_depth.min(cfg.levels.saturating_sub(1));
    let cones = note(&mut warnings, "cone types", cone_types(&pruned.tilings, depth));
    let cc = cross_check(&ball, &ambient, Some(&ambient_rule));
    let (g, e, m, d) = invariants(&pruned.tilings, Some(&pruned.rule), cfg, &mut warnings);
    let report = Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        mode: "special".into(),
        graph: graph_value(graph),
        graph_hash: graph.hash_hex(),
        levels: cfg.levels,
        sphere_sizes: ball.level_sizes(),
        tile_counts: pruned.tilings.iter().map(Tiling::non_ideal_count).collect(),
        rule: Some(summarize(&pruned.rule)),
        growth: g,
        ends: e,
        mesh: m,
        divergence: d,
        discrepancies: discrepancies(ball.stats(), &pruned.tilings, Some(&pruned.rule), &cc),
        cross_check: cc,
        special: Some(SpecialSummary {
            lift_sizes: lifts.level_sizes(),
            reparented: lifts.reparented,
            containment: pruned.containment,
            cone_types: cones,
        }),
        warnings,
    };
    Ok(Analysis { graph: graph.clone(), ball, tilings: pruned.tilings, rule: Some(pruned.rule), report })
}

pub fn report_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

/// Writes `report.json` and the requested exports into `dir`; returns the
/// paths written.
pub fn write_outputs(
    analysis: &Analysis,
    dir: &Path,
    formats: &BTreeSet<ExportFormat>,
    svg_seed: u64,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let rule = analysis.rule.as_ref();
    let mut files: Vec<(String, String)> = vec![("report.json".into(), report_json(&analysis.report))];
    for f in formats {
        match f {
            ExportFormat::Json => files.push((
                "tilings.json".into(),
                export::tilings_to_json(&analysis.graph, &analysis.tilings, rule),
            )),
            ExportFormat::Csv => {
                files.push(("counts.csv".into(), export::counts_csv(&analysis.tilings, rule)))
            }
            ExportFormat::Dot => {
                files.push(("history.dot".into(), export::history_dot(&analysis.tilings, rule)));
                for t in &analysis.tilings {
                    files.push((format!("level-{}.dot", t.level), export::level_dot(t, rule)));
                }
            }
            ExportFormat::Svg => {
                for t in &analysis.tilings {
                    files.push((format!("level-{}.svg", t.level), export::level_svg(t, rule, svg_seed)));
                }
            }
        }
    }
    let mut written = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = dir.join(name);
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
