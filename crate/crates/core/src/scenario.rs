//! What-if variants of a network (new lines, closed sections) and their
//! comparison against the undisrupted base network.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::flow::{flow_delta, section_flows, FlowDelta, SectionUsage};
use crate::graph::{expand, WeightKind};
use crate::network::{
    check_section_object_keys, check_station_keys, parse_json, ParseMode, RawNetwork, SectionSpec, StationSpec,
};
use crate::routing::{all_pairs_among, sum_costs};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default)]
    pub add_stations: Vec<StationSpec>,
    #[serde(default)]
    pub add_sections: Vec<SectionSpec>,
    #[serde(default)]
    pub remove_sections: Vec<String>,
}

const SCENARIO_KEYS: &[&str] = &["name", "add_stations", "add_sections", "remove_sections"];

impl ScenarioSpec {
    pub fn named(name: impl Into<String>) -> Self {
        ScenarioSpec {
            name: name.into(),
            ..Default::default()
        }
    }

    pub(crate) fn from_value(value: Value, mode: ParseMode) -> Result<Self> {
        if mode == ParseMode::Strict {
            if let Value::Object(map) = &value {
                if let Some(k) = map.keys().find(|k| !SCENARIO_KEYS.contains(&k.as_str())) {
                    return Err(Error::UnknownKey {
                        context: "scenario".into(),
                        key: k.clone(),
                    });
                }
            }
            if let Some(Value::Array(st)) = value.get("add_stations") {
                for (i, s) in st.iter().enumerate() {
                    check_station_keys(s, &format!("add_stations[{i}]"))?;
                }
            }
            if let Some(Value::Array(sec)) = value.get("add_sections") {
                for (i, s) in sec.iter().enumerate() {
                    check_section_object_keys(s, &format!("add_sections[{i}]"))?;
                }
            }
        }
        serde_json::from_value(value).map_err(|e| Error::Schema(format!("scenario: {e}")))
    }
}

/// Parses a scenario document holding one scenario object or an array of them.
pub fn parse_scenarios(doc: &str, mode: ParseMode) -> Result<Vec<ScenarioSpec>> {
    match parse_json(doc)? {
        Value::Array(items) => items.into_iter().map(|v| ScenarioSpec::from_value(v, mode)).collect(),
        v @ Value::Object(_) => Ok(vec![ScenarioSpec::from_value(v, mode)?]),
        _ => Err(Error::Schema("scenario document must be an object or an array".into())),
    }
}

/// Applies removals first, then station and section additions. Joints are
/// not contracted again.
pub fn apply_scenario(net: &RawNetwork, s: &ScenarioSpec) -> Result<RawNetwork> {
    let mut out = net.clone();
    for id in &s.remove_sections {
        let pos = out
            .sections
            .iter()
            .position(|x| &x.id == id)
            .ok_or_else(|| Error::UnknownSection(id.clone()))?;
        out.sections.remove(pos);
    }
    out.stations.extend(s.add_stations.iter().cloned());
    out.sections.extend(s.add_sections.iter().cloned());
    out.check()?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioStatus {
    Ok,
    /// Some base station pair cannot be connected in the variant.
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioMetrics {
    pub weight_kind: WeightKind,
    pub status: ScenarioStatus,
    pub base_total: f64,
    pub total: Option<f64>,
    /// `100 × (c_base − c_scenario) / c_base`.
    pub total_decrease_percent: Option<f64>,
    pub busiest_section: String,
    pub busiest_share_before: f64,
    pub busiest_share_after: f64,
    /// Drop of the busiest section's share, in percentage points.
    pub busiest_pp_delta: f64,
    /// Same drop relative to its baseline share, in percent.
    pub busiest_relative_delta: f64,
    pub flow_deltas: Vec<FlowDelta>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub name: String,
    pub metrics: Vec<ScenarioMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub weight_kinds: Vec<WeightKind>,
    pub baseline_flows: Vec<SectionUsage>,
    pub scenarios: Vec<ScenarioResult>,
}

/// Compares each scenario to `base` for every requested weight kind.
///
/// Pairs are always taken over the eligible stations of `base`, so stations
/// added by a scenario act as junctions only and totals stay comparable.
/// `busiest = None` picks the base section with the highest flow count.
pub fn compare_scenarios(
    base: &RawNetwork,
    scenarios: &[ScenarioSpec],
    busiest: Option<&str>,
    kinds: &[WeightKind],
) -> Result<ScenarioReport> {
    let mut names = HashSet::new();
    for s in scenarios {
        if !names.insert(s.name.as_str()) {
            return Err(Error::Config(format!("duplicate scenario name {:?}", s.name)));
        }
    }
    let variants: Vec<RawNetwork> = scenarios
        .iter()
        .map(|s| apply_scenario(base, s))
        .collect::<Result<_>>()?;
    let eligible = base.eligible_stations();

    let mut baseline_flows = Vec::new();
    let mut per_kind: Vec<Vec<ScenarioMetrics>> = Vec::new();
    for &kind in kinds {
        let g = expand(base, kind);
        let origins: Vec<usize> = eligible
            .iter()
            .map(|id| g.station_position(id))
            .collect::<Result<_>>()?;
        let m = all_pairs_among(&g.view(), &origins);
        let base_total = sum_costs(&m.costs)
            .ok_or_else(|| Error::DisconnectedNetwork("base network has unreachable station pairs".into()))?;
        let flows = section_flows(&m);
        let busy = match busiest {
            Some(id) => flows.position(id)?,
            None => flows
                .busiest()
                .ok_or_else(|| Error::Config("base network has no sections".into()))?,
        };
        let share_before = flows.share_percent(busy);

        let mut metrics = Vec::new();
        for (spec, variant) in scenarios.iter().zip(&variants) {
            let vg = expand(variant, kind);
            let vorigins: Vec<usize> = eligible
                .iter()
                .map(|id| vg.station_position(id))
                .collect::<Result<_>>()?;
            let vm = all_pairs_among(&vg.view(), &vorigins);
            if spec.remove_sections.is_empty() {
                if let Some(p) = (0..vm.costs.len()).find(|&p| vm.costs[p] > m.costs[p]) {
                    let (a, b) = vm.pair_label(p);
                    return Err(Error::Invariant(format!(
                        "scenario {:?} lengthened {a}-{b} although it only adds sections",
                        spec.name
                    )));
                }
            }
            let vflows = section_flows(&vm);
            let total = sum_costs(&vm.costs);
            let share_after = vflows
                .position(&flows.section_ids[busy])
                .map_or(0.0, |i| vflows.share_percent(i));
            let pp = share_before - share_after;
            metrics.push(ScenarioMetrics {
                weight_kind: kind,
                status: if total.is_some() {
                    ScenarioStatus::Ok
                } else {
                    ScenarioStatus::Disconnected
                },
                base_total,
                total,
                // No pairs at all (fewer than two eligible stations) means no change.
                total_decrease_percent: total.map(|t| {
                    if base_total > 0.0 {
                        100.0 * (base_total - t) / base_total
                    } else {
                        0.0
                    }
                }),
                busiest_section: flows.section_ids[busy].clone(),
                busiest_share_before: share_before,
                busiest_share_after: share_after,
                busiest_pp_delta: pp,
                busiest_relative_delta: if share_before > 0.0 {
                    100.0 * pp / share_before
                } else {
                    0.0
                },
                flow_deltas: flow_delta(&flows, &vflows)?,
            });
        }
        baseline_flows.push(flows);
        per_kind.push(metrics);
    }

    let scenarios = scenarios
        .iter()
        .enumerate()
        .map(|(i, s)| ScenarioResult {
            name: s.name.clone(),
            metrics: per_kind.iter().map(|m| m[i].clone()).collect(),
        })
        .collect();
    Ok(ScenarioReport {
        weight_kinds: kinds.to_vec(),
        baseline_flows,
        scenarios,
    })
}

fn pad_row(out: &mut String, label: &str, cells: &[String], label_width: usize, cell_width: usize) {
    let mut line = format!("{label:<label_width$}");
    for c in cells {
        let _ = write!(line, "  {c:>cell_width$}");
    }
    let _ = writeln!(out, "{}", line.trim_end());
}

/// Scenario-by-metric summary: decrease of the total network cost and of
/// the busiest section's share (percentage points), two decimals each.
pub fn render_comparison_table(report: &ScenarioReport) -> String {
    let mut out = String::new();
    let names: Vec<String> = report.scenarios.iter().map(|s| s.name.clone()).collect();
    let cell_width = names.iter().map(|n| n.chars().count()).max().unwrap_or(0).max(8);
    for (k, kind) in report.weight_kinds.iter().enumerate() {
        let (total_label, noun) = match kind {
            WeightKind::Distance => ("The decrease in total network trip length (%)", "trip lengths"),
            WeightKind::Time => ("The decrease in total network travel time (%)", "travel times"),
        };
        let busiest = report
            .scenarios
            .first()
            .map(|s| s.metrics[k].busiest_section.clone())
            .unwrap_or_default();
        let share_label = format!("The decrease in the share of paths through {busiest} (pp)");
        let label_width = total_label.len().max(share_label.len());
        let _ = writeln!(out, "Shortest {noun}");
        pad_row(&mut out, "", &names, label_width, cell_width);
        let totals: Vec<String> = report
            .scenarios
            .iter()
            .map(|s| match s.metrics[k].total_decrease_percent {
                Some(p) => format!("{p:.2}"),
                None => "disconn.".to_string(),
            })
            .collect();
        pad_row(&mut out, total_label, &totals, label_width, cell_width);
        let shares: Vec<String> = report
            .scenarios
            .iter()
            .map(|s| format!("{:.2}", s.metrics[k].busiest_pp_delta))
            .collect();
        pad_row(&mut out, &share_label, &shares, label_width, cell_width);
        if k + 1 < report.weight_kinds.len() {
            out.push('\n');
        }
    }
    out
}
