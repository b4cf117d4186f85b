//! Batch reports driven by a JSON config: runs the requested analyses and
//! writes CSV/JSON/GeoJSON/DOT files plus a plain-text summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::export::{flows_csv_multi, flows_geojson, nri_csv, nri_pair_csv};
use crate::flow::{redistribution_from, render_redistribution_block, section_flows, SectionUsage};
use crate::format::group_fixed;
use crate::graph::{expand, WeightKind};
use crate::network::{contract_joint_nodes, parse_network_with, validate, ParseMode, RawNetwork};
use crate::resilience::{Analyzer, Restriction};
use crate::scenario::{compare_scenarios, render_comparison_table, ScenarioSpec};

pub const ANALYSES: &[&str] = &[
    "validate",
    "flows",
    "nri",
    "redundancy",
    "redistribution",
    "compare",
    "geojson",
    "dot",
];

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NriOptions {
    /// Sections to evaluate; all sections when absent.
    #[serde(default)]
    pub sections: Option<Vec<String>>,
    #[serde(default)]
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedundancyOptions {
    pub targets: Vec<String>,
    #[serde(default)]
    pub unrestricted: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedistributionOptions {
    pub disrupted: Vec<String>,
    pub watched: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScenarioEntry {
    File(String),
    Inline(Value),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WeightSelection {
    One(String),
    Many(Vec<String>),
}

fn default_weights() -> WeightSelection {
    WeightSelection::One("both".into())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    /// Network document, relative to the config file.
    pub network: String,
    pub output_dir: String,
    pub analyses: Vec<String>,
    #[serde(default = "default_weights")]
    pub weights: WeightSelection,
    #[serde(default)]
    pub lenient: bool,
    /// Contract joints before analysis.
    #[serde(default)]
    pub contract: bool,
    #[serde(default)]
    pub scenarios: Vec<ScenarioEntry>,
    /// Busiest section for comparisons; `"auto"` or absent picks the maximum.
    #[serde(default)]
    pub busiest: Option<String>,
    #[serde(default)]
    pub nri: Option<NriOptions>,
    #[serde(default)]
    pub redundancy: Option<RedundancyOptions>,
    #[serde(default)]
    pub redistribution: Option<RedistributionOptions>,
}

pub fn parse_weight_selection(s: &str) -> Result<Vec<WeightKind>> {
    match s {
        "both" => Ok(WeightKind::ALL.to_vec()),
        other => Ok(vec![other.parse()?]),
    }
}

impl ReportConfig {
    pub fn parse(doc: &str) -> Result<Self> {
        let value = crate::network::parse_json(doc)?;
        let cfg: ReportConfig = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn weight_kinds(&self) -> Result<Vec<WeightKind>> {
        let mut kinds = Vec::new();
        let names: Vec<&str> = match &self.weights {
            WeightSelection::One(s) => vec![s.as_str()],
            WeightSelection::Many(v) => v.iter().map(String::as_str).collect(),
        };
        for n in names {
            for k in parse_weight_selection(n)? {
                if !kinds.contains(&k) {
                    kinds.push(k);
                }
            }
        }
        if kinds.is_empty() {
            return Err(Error::Config("no weight kind selected".into()));
        }
        Ok(kinds)
    }

    fn wants(&self, analysis: &str) -> bool {
        self.analyses.iter().any(|a| a == analysis)
    }

    /// Rejects unknown analyses and missing options before any work is done.
    pub fn check(&self) -> Result<()> {
        if let Some(bad) = self.analyses.iter().find(|a| !ANALYSES.contains(&a.as_str())) {
            return Err(Error::Config(format!(
                "unknown analysis {bad:?} (expected one of {})",
                ANALYSES.join(", ")
            )));
        }
        self.weight_kinds()?;
        if self.wants("redundancy") && self.redundancy.as_ref().is_none_or(|r| r.targets.is_empty()) {
            return Err(Error::Config("redundancy needs explicit \"targets\"".into()));
        }
        if self.wants("redistribution") {
            match &self.redistribution {
                Some(r) if !r.disrupted.is_empty() && !r.watched.is_empty() => {}
                _ => {
                    return Err(Error::Config(
                        "redistribution needs \"disrupted\" and \"watched\"".into(),
                    ))
                }
            }
        }
        if self.wants("compare") && self.scenarios.is_empty() {
            return Err(Error::Config("compare needs at least one scenario".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportOutcome {
    pub output_dir: PathBuf,
    /// Written files, relative to the output directory, in write order.
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

struct Writer {
    dir: PathBuf,
    files: Vec<String>,
}

impl Writer {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(path.display().to_string(), e))?;
        self.files.push(name.to_string());
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Loads the config at `path` and runs it. Relative paths inside the config
/// are resolved against the config's directory.
pub fn run_report(path: &Path) -> Result<ReportOutcome> {
    let cfg = ReportConfig::parse(&read(path)?)?;
    let base = path.parent().unwrap_or(Path::new("."));
    run_report_config(&cfg, base)
}

pub fn run_report_config(cfg: &ReportConfig, base_dir: &Path) -> Result<ReportOutcome> {
    cfg.check()?;
    let mode = if cfg.lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    };
    let mut net = parse_network_with(&read(&base_dir.join(&cfg.network))?, mode)?;
    if cfg.contract {
        net = contract_joint_nodes(&net);
    }
    let scenarios = load_scenarios(cfg, base_dir, mode)?;

    let dir = base_dir.join(&cfg.output_dir);
    fs::create_dir_all(&dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let mut w = Writer {
        dir: dir.clone(),
        files: Vec::new(),
    };
    let mut warnings = Vec::new();
    match run_analyses(cfg, &net, &scenarios, &mut w, &mut warnings) {
        Ok(()) => Ok(ReportOutcome {
            output_dir: dir,
            files: w.files,
            warnings,
        }),
        Err(err) => {
            let manifest = serde_json::json!({
                "status": "error",
                "error": err.to_string(),
                "files": w.files,
            });
            let _ = fs::write(
                dir.join("manifest.json"),
                serde_json::to_string_pretty(&manifest).unwrap_or_default(),
            );
            Err(err)
        }
    }
}

fn load_scenarios(cfg: &ReportConfig, base_dir: &Path, mode: ParseMode) -> Result<Vec<ScenarioSpec>> {
    let mut out = Vec::new();
    for entry in &cfg.scenarios {
        match entry {
            ScenarioEntry::File(f) => {
                out.extend(crate::scenario::parse_scenarios(&read(&base_dir.join(f))?, mode)?);
            }
            ScenarioEntry::Inline(v) => out.push(ScenarioSpec::from_value(v.clone(), mode)?),
        }
    }
    Ok(out)
}

fn run_analyses(
    cfg: &ReportConfig,
    net: &RawNetwork,
    scenarios: &[ScenarioSpec],
    w: &mut Writer,
    warnings: &mut Vec<String>,
) -> Result<()> {
    let kinds = cfg.weight_kinds()?;
    let mut summary = String::new();
    let validation = validate(net);
    let _ = writeln!(summary, "Network");
    let _ = write!(summary, "{validation}");
    if cfg.wants("validate") {
        w.write("validation.json", &to_json(&validation))?;
    }

    let graphs: Vec<_> = kinds.iter().map(|&k| expand(net, k)).collect();
    let analyzers: Vec<Analyzer<'_>> = graphs.iter().map(Analyzer::new).collect();
    let flows: Vec<SectionUsage> = analyzers.iter().map(|a| section_flows(a.baseline())).collect();

    let _ = writeln!(summary, "\nTotals");
    for (a, g) in analyzers.iter().zip(&graphs) {
        let kind = g.weight_kind();
        let label = match kind {
            WeightKind::Distance => "total network trip length",
            WeightKind::Time => "total network travel time",
        };
        match a.total() {
            Some(c) => {
                let _ = writeln!(summary, "{label}: {} {}", group_fixed(c, 1), kind.unit());
            }
            None => {
                let _ = writeln!(summary, "{label}: disconnected");
            }
        }
        let _ = writeln!(
            summary,
            "graph ({kind}): {} nodes, {} arcs, {} station pairs",
            g.nodes().len(),
            g.arcs().len(),
            a.baseline().pair_count()
        );
    }

    if cfg.wants("flows") {
        w.write("flows.csv", &flows_csv_multi(&flows))?;
        let _ = writeln!(summary, "\nBusiest sections");
        for f in &flows {
            if let Some(b) = f.busiest() {
                let _ = writeln!(
                    summary,
                    "{}: {} ({:.2}% of {} pairs)",
                    f.weight_kind,
                    f.section_ids[b],
                    f.share_percent(b),
                    f.pair_count
                );
            }
        }
    }

    if cfg.wants("nri") {
        let opts = cfg.nri.clone().unwrap_or_default();
        let mut rows = Vec::new();
        let mut pair_rows = Vec::new();
        for a in &analyzers {
            match &opts.sections {
                Some(list) => {
                    for s in list {
                        rows.push(a.nri(s)?);
                    }
                }
                None => rows.extend(a.nri_all()?),
            }
            for (u, v) in &opts.pairs {
                pair_rows.push(a.nri_pair(u, v)?);
            }
        }
        w.write("nri.csv", &nri_csv(&rows))?;
        if !pair_rows.is_empty() {
            w.write("nri_pairs.csv", &nri_pair_csv(&pair_rows))?;
        }
    }

    if cfg.wants("redundancy") {
        let opts = cfg.redundancy.as_ref().expect("checked");
        let restriction = if opts.unrestricted {
            Restriction::Unrestricted
        } else {
            Restriction::BaselineAvoidsTarget
        };
        let mut results = Vec::new();
        for a in &analyzers {
            results.extend(a.redundancy_sweep(&opts.targets, restriction)?);
        }
        w.write("redundancy.json", &to_json(&results))?;
        let _ = writeln!(summary, "\nRedundancy (normalised reciprocal, this network only)");
        for r in &results {
            let _ = writeln!(summary, "{} {}: {:.6}", r.weight_kind, r.section, r.r_u_prime);
        }
    }

    if cfg.wants("redistribution") {
        let opts = cfg.redistribution.as_ref().expect("checked");
        let mut text = String::new();
        let mut all = Vec::new();
        for (g, base) in graphs.iter().zip(&flows) {
            let origins = g.eligible_stations();
            let tables = opts
                .disrupted
                .iter()
                .map(|d| redistribution_from(&g.view(), &origins, base, d, &opts.watched))
                .collect::<Result<Vec<_>>>()?;
            let title = match g.weight_kind() {
                WeightKind::Distance => "Minimal distance: change in the number of paths per watched section",
                WeightKind::Time => "Minimal time: change in the number of paths per watched section",
            };
            if !text.is_empty() {
                text.push('\n');
            }
            text.push_str(&render_redistribution_block(title, &tables));
            all.extend(tables);
        }
        w.write("redistribution.txt", &text)?;
        w.write("redistribution.json", &to_json(&all))?;
        let _ = writeln!(summary, "\n{text}");
    }

    let mut comparison = None;
    if cfg.wants("compare") {
        let busiest = cfg.busiest.as_deref().filter(|b| *b != "auto");
        let report = compare_scenarios(net, scenarios, busiest, &kinds)?;
        let table = render_comparison_table(&report);
        w.write("comparison.txt", &table)?;
        w.write("comparison.json", &to_json(&report))?;
        let mut csv = String::from("weight,scenario,section_id,base_count,alt_count,delta_count,delta_share\n");
        for s in &report.scenarios {
            for m in &s.metrics {
                for d in &m.flow_deltas {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{:.6}",
                        m.weight_kind, s.name, d.section, d.base_count, d.alt_count, d.delta_count, d.delta_share
                    );
                }
            }
        }
        w.write("flow_deltas.csv", &csv)?;
        let _ = writeln!(summary, "\nScenario comparison\n{table}");
        for s in &report.scenarios {
            for m in &s.metrics {
                if m.status != crate::scenario::ScenarioStatus::Ok {
                    warnings.push(format!(
                        "scenario {:?} ({}) leaves station pairs disconnected",
                        s.name, m.weight_kind
                    ));
                }
            }
        }
        comparison = Some(report);
    }

    if cfg.wants("geojson") {
        if net.stations.iter().all(|s| s.coord.is_some()) {
            for f in &flows {
                if let Some(text) = flows_geojson(net, f, None) {
                    w.write(&format!("flows_{}.geojson", f.weight_kind), &text)?;
                }
            }
            if let Some(report) = &comparison {
                for (spec, s) in scenarios.iter().zip(&report.scenarios) {
                    let variant = crate::scenario::apply_scenario(net, spec)?;
                    if !variant.stations.iter().all(|st| st.coord.is_some()) {
                        warnings.push(format!(
                            "scenario {:?} has stations without coordinates; map skipped",
                            s.name
                        ));
                        continue;
                    }
                    for m in &s.metrics {
                        let g = expand(&variant, m.weight_kind);
                        let origins = net
                            .eligible_stations()
                            .iter()
                            .map(|id| g.station_position(id))
                            .collect::<Result<Vec<_>>>()?;
                        let usage = section_flows(&crate::routing::all_pairs_among(&g.view(), &origins));
                        if let Some(text) = flows_geojson(&variant, &usage, Some(&m.flow_deltas)) {
                            w.write(&format!("compare_{}_{}.geojson", s.name, m.weight_kind), &text)?;
                        }
                    }
                }
            }
        } else {
            warnings.push("stations without \"coord\"; GeoJSON export skipped".to_string());
        }
    }

    if cfg.wants("dot") {
        for g in &graphs {
            w.write(&format!("graph_{}.dot", g.weight_kind()), &g.to_dot())?;
        }
    }

    if !warnings.is_empty() {
        let _ = writeln!(summary, "\nWarnings");
        for warn in warnings.iter() {
            let _ = writeln!(summary, "- {warn}");
        }
    }
    w.write("summary.txt", &summary)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialise");
    s.push('\n');
    s
}

/// Serialises redundancy results the way the report writes them.
pub fn redundancy_json(results: &[crate::resilience::RedundancyResult]) -> String {
    to_json(&results)
}
