use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use subdivlab::ball::{Ball, DEFAULT_CAP};
use subdivlab::invariants::DiameterMode;
use subdivlab::oracle;
use subdivlab::pipeline::{analyze_raag, analyze_special, write_outputs, ExportFormat, RunConfig};
use subdivlab::special::CubeComplexSpec;
use subdivlab::{DefiningGraph, Error};

#[derive(Parser)]
#[command(name = "subdivlab", version, about = "Subdivision-rule tilings of right-angled Artin groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Raag,
    Special,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Export {
    Tilings,
    Dot,
    Svg,
    Reports,
}

#[derive(Clone, Copy, ValueEnum)]
enum Diameter {
    Exact,
    DoubleSweep,
}

#[derive(Subcommand)]
enum Command {
    /// Build the history graph and compute its invariants.
    Run {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "raag")]
        mode: Mode,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        levels: u32,
        /// Merge tile types related by sign flips and graph automorphisms.
        #[arg(long)]
        coalesce: bool,
        #[arg(long, value_enum, value_delimiter = ',')]
        export: Vec<Export>,
        /// Element limit for the ball.
        #[arg(long, default_value_t = DEFAULT_CAP, value_parser = parse_cap)]
        cap: usize,
        #[arg(long, default_value_t = 3)]
        ends_window: usize,
        #[arg(long, value_enum, default_value = "exact")]
        diameter: Diameter,
        #[arg(long, default_value_t = 2)]
        cone_depth: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Defining graph for special mode when the complex does not embed one.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Directory for cached ball levels.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sphere sizes from the brute-force enumeration, next to the ball builder's.
    Oracle {
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long, default_value_t = DEFAULT_CAP, value_parser = parse_cap)]
        cap: usize,
    },
}

fn parse_cap(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("cap must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::UnknownGenerator(_)
        | Error::NotSpherical(_)
        | Error::MalformedComplex(_) => 2,
        Error::CapExceeded { .. } => 3,
        Error::StarConvexity(_) => 4,
        _ => 1,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            input,
            mode,
            levels,
            coalesce,
            export,
            cap,
            ends_window,
            diameter,
            cone_depth,
            out,
            graph,
            cache,
            seed,
        } => {
            let cfg = RunConfig {
                levels: levels as usize,
                coalesce,
                cap,
                ends_window,
                diameter: match diameter {
                    Diameter::Exact => DiameterMode::Exact,
                    Diameter::DoubleSweep => DiameterMode::DoubleSweep,
                },
                cone_depth,
                cache_dir: cache,
                svg_seed: seed,
            };
            let text = read(&input)?;
            let analysis = match mode {
                Mode::Raag => analyze_raag(&DefiningGraph::from_json(&text)?, &cfg)?,
                Mode::Special => {
                    let spec = CubeComplexSpec::from_json(&text)?;
                    let g = match (&graph, &spec.embedded_graph) {
                        (Some(p), _) => DefiningGraph::from_json(&read(p)?)?,
                        (None, Some(g)) => g.clone(),
                        (None, None) => {
                            return Err(Error::Parse(
                                "special mode needs --graph or an embedded graph".into(),
                            ))
                        }
                    };
                    analyze_special(&g, &spec, &cfg)?
                }
            };
            let formats: BTreeSet<ExportFormat> = export
                .iter()
                .map(|e| match e {
                    Export::Tilings => ExportFormat::Json,
                    Export::Dot => ExportFormat::Dot,
                    Export::Svg => ExportFormat::Svg,
                    Export::Reports => ExportFormat::Csv,
                })
                .collect();
            let written = write_outputs(&analysis, &out, &formats, seed)?;
            let r = &analysis.report;
            println!("tiles per level: {:?}", r.tile_counts);
            if let Some(rule) = &r.rule {
                for line in &rule.types {
                    println!("  {line}");
                }
            }
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            if analysis.rule_unstable() {
                eprintln!("warning: subdivision rule is not stable; see report.json");
            }
            for p in written {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Oracle { input, levels, cap } => {
            let graph = DefiningGraph::from_json(&read(&input)?)?;
            let sizes = oracle::sphere_sizes(&graph, levels, cap).ok_or(Error::CapExceeded { limit: cap })?;
            let ball = Ball::build(&graph, levels, cap)?;
            println!("level\toracle\tball");
            for (n, (o, b)) in sizes.iter().zip(ball.level_sizes()).enumerate() {
                println!("{n}\t{o}\t{b}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
