//! `railnet` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 bad input data, 3 analysis failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use railnet::export::{flows_csv_multi, nri_csv, nri_pair_csv};
use railnet::format::group_fixed;
use railnet::report::redundancy_json;
use railnet::scenario::{parse_scenarios, render_comparison_table};
use railnet::*;

#[derive(Parser)]
#[command(name = "railnet", version, about = "Railway network resilience workbench")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Edge weight used for shortest paths.
    #[arg(long, global = true, value_enum, default_value_t = Weight::Both)]
    weight: Weight,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Ignore unknown keys in input documents.
    #[arg(long, global = true)]
    lenient: bool,
    /// Contract pass-through joints before analysis.
    #[arg(long, global = true)]
    contract: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Weight {
    Time,
    Distance,
    Both,
}

impl Weight {
    fn kinds(self) -> Vec<WeightKind> {
        match self {
            Weight::Time => vec![WeightKind::Time],
            Weight::Distance => vec![WeightKind::Distance],
            Weight::Both => WeightKind::ALL.to_vec(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a network document and print its counts.
    Validate {
        network: PathBuf,
        /// Also write the expanded graph in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Shortest path between two stations.
    Route {
        network: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Sections to close first.
        #[arg(long, value_delimiter = ',')]
        remove: Vec<String>,
    },
    /// Per-section flow counts as CSV.
    Flows {
        network: PathBuf,
        #[arg(long, value_delimiter = ',')]
        remove: Vec<String>,
    },
    /// Network Robustness Index of single sections or section pairs.
    Nri {
        network: PathBuf,
        /// Sections to evaluate (all when omitted).
        #[arg(long, value_delimiter = ',')]
        section: Vec<String>,
        /// Section pairs as `u,v`; may be repeated.
        #[arg(long)]
        pair: Vec<String>,
    },
    /// Redundancy indices of target sections.
    Redundancy {
        network: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<String>,
        /// Sum over every pair instead of pairs whose path avoids the target.
        #[arg(long)]
        unrestricted: bool,
        /// Print the contribution of every second deletion.
        #[arg(long)]
        per_v: bool,
    },
    /// Compare network variants against the base network.
    Compare {
        network: PathBuf,
        /// Scenario documents (one object or an array each).
        #[arg(long, required = true)]
        scenario: Vec<PathBuf>,
        /// Section whose share is tracked; the busiest one when omitted.
        #[arg(long)]
        busiest: Option<String>,
    },
    /// Run a report configuration and write its output directory.
    Report { config: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn mode(g: &Global) -> ParseMode {
    if g.lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    }
}

fn load(path: &Path, g: &Global) -> Result<RawNetwork> {
    let net = parse_network_with(&read(path)?, mode(g))?;
    Ok(if g.contract { contract_joint_nodes(&net) } else { net })
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable output");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<String> {
    let g = &cli.global;
    let kinds = g.weight.kinds();
    match &cli.command {
        Command::Validate { network, dot } => {
            let net = load(network, g)?;
            if let Some(path) = dot {
                write(path, &expand(&net, kinds[0]).to_dot())?;
            }
            let report = validate(&net);
            Ok(if g.json { json(&report) } else { report.to_string() })
        }
        Command::Route {
            network,
            from,
            to,
            remove,
        } => {
            let net = load(network, g)?;
            let mut out = String::new();
            let mut rows = Vec::new();
            for &kind in &kinds {
                let graph = expand(&net, kind);
                let r = shortest_path(&graph.remove_sections(remove)?, from, to)?;
                match r.cost {
                    Some(c) => {
                        let _ = writeln!(
                            out,
                            "{kind}: {} {} via {} ({} reversal{})",
                            group_fixed(c, 2),
                            kind.unit(),
                            r.sections.join(" "),
                            r.reversals,
                            if r.reversals == 1 { "" } else { "s" }
                        );
                    }
                    None => {
                        let _ = writeln!(out, "{kind}: unreachable");
                    }
                }
                rows.push(serde_json::json!({
                    "weight": kind,
                    "from": from,
                    "to": to,
                    "cost": r.cost,
                    "sections": r.sections,
                    "reversals": r.reversals,
                }));
            }
            Ok(if g.json { json(&rows) } else { out })
        }
        Command::Flows { network, remove } => {
            let net = load(network, g)?;
            let usages = kinds
                .iter()
                .map(|&k| {
                    let graph = expand(&net, k);
                    Ok(section_flows(&all_pairs(&graph.remove_sections(remove)?)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(if g.json {
                json(&usages)
            } else {
                flows_csv_multi(&usages)
            })
        }
        Command::Nri { network, section, pair } => {
            let net = load(network, g)?;
            let pairs = pair
                .iter()
                .map(|p| match p.split_once(',') {
                    Some((u, v)) => Ok((u.trim().to_string(), v.trim().to_string())),
                    None => Err(Error::Config(format!("--pair expects u,v, got {p:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let mut singles = Vec::new();
            let mut doubles = Vec::new();
            for &kind in &kinds {
                let graph = expand(&net, kind);
                let an = Analyzer::new(&graph);
                if section.is_empty() && pairs.is_empty() {
                    singles.extend(an.nri_all()?);
                } else {
                    for s in section {
                        singles.push(an.nri(s)?);
                    }
                }
                for (u, v) in &pairs {
                    doubles.push(an.nri_pair(u, v)?);
                }
            }
            if g.json {
                return Ok(json(&serde_json::json!({ "sections": singles, "pairs": doubles })));
            }
            let mut out = String::new();
            if !singles.is_empty() {
                out.push_str(&nri_csv(&singles));
            }
            if !doubles.is_empty() {
                if !out.is_empty() {
                    out.push('\n');
                }
                out.push_str(&nri_pair_csv(&doubles));
            }
            Ok(out)
        }
        Command::Redundancy {
            network,
            targets,
            unrestricted,
            per_v,
        } => {
            let net = load(network, g)?;
            let restriction = if *unrestricted {
                Restriction::Unrestricted
            } else {
                Restriction::BaselineAvoidsTarget
            };
            let mut results = Vec::new();
            for &kind in &kinds {
                let graph = expand(&net, kind);
                results.extend(Analyzer::new(&graph).redundancy_sweep(targets, restriction)?);
            }
            if g.json {
                return Ok(redundancy_json(&results));
            }
            let mut out = String::from("weight,section,r_plain,r_reciprocal,r_u_prime\n");
            for r in &results {
                let _ = writeln!(
                    out,
                    "{},{},{},{:.9},{:.9}",
                    r.weight_kind, r.section, r.r_plain, r.r_reciprocal, r.r_u_prime
                );
            }
            if *per_v {
                out.push_str("\nweight,section,second_section,plain,reciprocal\n");
                for r in &results {
                    for pv in &r.per_v {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{:.9}",
                            r.weight_kind, r.section, pv.section, pv.plain, pv.reciprocal
                        );
                    }
                }
            }
            Ok(out)
        }
        Command::Compare {
            network,
            scenario,
            busiest,
        } => {
            let net = load(network, g)?;
            let mut specs = Vec::new();
            for path in scenario {
                specs.extend(parse_scenarios(&read(path)?, mode(g))?);
            }
            let busiest = busiest.as_deref().filter(|b| *b != "auto");
            let report = compare_scenarios(&net, &specs, busiest, &kinds)?;
            Ok(if g.json {
                json(&report)
            } else {
                render_comparison_table(&report)
            })
        }
        Command::Report { config } => {
            let outcome = run_report(config)?;
            if g.json {
                return Ok(json(&outcome));
            }
            let mut out = String::new();
            for f in &outcome.files {
                let _ = writeln!(out, "{}", outcome.output_dir.join(f).display());
            }
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match with_threads(cli.global.threads, || run(&cli)) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() { 2 } else { 3 })
        }
    }
}
