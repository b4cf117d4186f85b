//! Artificial flow: how many station pairs route their shortest path over
//! each line section, and how that changes between network states.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{group_int, signed_count, signed_percent};
use crate::graph::{GraphView, WeightKind};
use crate::routing::{all_pairs_among, PathMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionUsage {
    pub weight_kind: WeightKind,
    pub pair_count: usize,
    pub section_ids: Vec<String>,
    pub counts: Vec<u64>,
}

impl SectionUsage {
    pub fn share_percent(&self, section: usize) -> f64 {
        if self.pair_count == 0 {
            0.0
        } else {
            100.0 * self.counts[section] as f64 / self.pair_count as f64
        }
    }

    pub fn count_of(&self, id: &str) -> Result<u64> {
        self.position(id).map(|i| self.counts[i])
    }

    pub fn position(&self, id: &str) -> Result<usize> {
        self.section_ids
            .iter()
            .position(|s| s == id)
            .ok_or_else(|| Error::UnknownSection(id.to_string()))
    }

    /// Section with the highest count, ties going to the smallest id.
    pub fn busiest(&self) -> Option<usize> {
        (0..self.counts.len()).min_by(|&a, &b| {
            self.counts[b]
                .cmp(&self.counts[a])
                .then_with(|| self.section_ids[a].cmp(&self.section_ids[b]))
        })
    }

    /// `section_id,count,share_percent` with six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section_id,count,share_percent\n");
        for (i, id) in self.section_ids.iter().enumerate() {
            let _ = writeln!(out, "{},{},{:.6}", id, self.counts[i], self.share_percent(i));
        }
        out
    }
}

/// Counts, per section, the pairs whose chosen path uses it.
pub fn section_flows(m: &PathMatrix) -> SectionUsage {
    let mut counts = vec![0u64; m.section_ids.len()];
    for used in &m.usage {
        for &s in used {
            counts[s as usize] += 1;
        }
    }
    SectionUsage {
        weight_kind: m.weight_kind,
        pair_count: m.pair_count(),
        section_ids: m.section_ids.clone(),
        counts,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowDelta {
    pub section: String,
    pub base_count: u64,
    pub alt_count: u64,
    pub delta_count: i64,
    /// Change of share in percentage points.
    pub delta_share: f64,
}

/// Per-section change from `base` to `alt`. Sections only present in one
/// state count as 0 in the other; `alt`-only sections follow the base ones.
pub fn flow_delta(base: &SectionUsage, alt: &SectionUsage) -> Result<Vec<FlowDelta>> {
    if base.pair_count != alt.pair_count {
        return Err(Error::MismatchedUniverse(format!(
            "{} pairs versus {} pairs",
            base.pair_count, alt.pair_count
        )));
    }
    let alt_index: HashMap<&str, usize> = alt
        .section_ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let base_ids: HashMap<&str, usize> = base
        .section_ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut out = Vec::new();
    let mut push = |section: &str, b: Option<usize>, a: Option<usize>| {
        let base_count = b.map_or(0, |i| base.counts[i]);
        let alt_count = a.map_or(0, |i| alt.counts[i]);
        let share = |u: &SectionUsage, i: Option<usize>| i.map_or(0.0, |i| u.share_percent(i));
        out.push(FlowDelta {
            section: section.to_string(),
            base_count,
            alt_count,
            delta_count: alt_count as i64 - base_count as i64,
            delta_share: share(alt, a) - share(base, b),
        });
    };
    for (i, id) in base.section_ids.iter().enumerate() {
        push(id, Some(i), alt_index.get(id.as_str()).copied());
    }
    for (i, id) in alt.section_ids.iter().enumerate() {
        if !base_ids.contains_key(id.as_str()) {
            push(id, None, Some(i));
        }
    }
    Ok(out)
}

pub fn flow_delta_csv(deltas: &[FlowDelta]) -> String {
    let mut out = String::from("section_id,base_count,alt_count,delta_count,delta_share\n");
    for d in deltas {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6}",
            d.section, d.base_count, d.alt_count, d.delta_count, d.delta_share
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedistributionEntry {
    pub section: String,
    pub baseline_count: u64,
    pub delta_count: i64,
    /// Relative to the section's own baseline; `None` when that baseline is 0.
    pub delta_percent: Option<f64>,
}

impl RedistributionEntry {
    /// `-15,603 (-100.0%)`, or `+2 (n/a, base 0)` for a zero baseline.
    pub fn cell(&self) -> String {
        match self.delta_percent {
            Some(p) => format!("{} ({})", signed_count(self.delta_count), signed_percent(p)),
            None => format!("{} (n/a, base 0)", signed_count(self.delta_count)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedistributionTable {
    pub weight_kind: WeightKind,
    pub disrupted: String,
    pub entries: Vec<RedistributionEntry>,
}

/// Flow change on `watched` sections when `disrupted` is removed.
///
/// `base` must be the undisrupted flow of `view`'s graph over `origins`.
pub fn redistribution_from(
    view: &GraphView<'_>,
    origins: &[usize],
    base: &SectionUsage,
    disrupted: &str,
    watched: &[String],
) -> Result<RedistributionTable> {
    let g = view.graph();
    g.section_position(disrupted)?;
    for w in watched {
        g.section_position(w)?;
    }
    let after = section_flows(&all_pairs_among(&view.without(&[disrupted])?, origins));
    let entries = watched
        .iter()
        .map(|w| {
            let i = base.position(w)?;
            let before = base.counts[i];
            let delta = after.counts[i] as i64 - before as i64;
            Ok(RedistributionEntry {
                section: w.clone(),
                baseline_count: before,
                delta_count: delta,
                delta_percent: (before > 0).then(|| 100.0 * delta as f64 / before as f64),
            })
        })
        .collect::<Result<_>>()?;
    Ok(RedistributionTable {
        weight_kind: g.weight_kind(),
        disrupted: disrupted.to_string(),
        entries,
    })
}

/// Convenience form computing the baseline itself.
pub fn redistribution(view: &GraphView<'_>, disrupted: &str, watched: &[String]) -> Result<RedistributionTable> {
    if watched.is_empty() {
        return Err(Error::Config(
            "redistribution needs at least one watched section".into(),
        ));
    }
    let origins = view.graph().eligible_stations();
    let base = section_flows(&all_pairs_among(view, &origins));
    redistribution_from(view, &origins, &base, disrupted, watched)
}

/// Disruption-by-watched grid in the layout of a redistribution table:
/// one row per disrupted section, one column per watched section, plus the
/// baseline counts so large relative changes can be read in context.
pub fn render_redistribution_block(title: &str, tables: &[RedistributionTable]) -> String {
    let mut out = String::new();
    let Some(first) = tables.first() else {
        return out;
    };
    let watched: Vec<&str> = first.entries.iter().map(|e| e.section.as_str()).collect();
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["disrupted \\ watched".to_string()];
    header.extend(watched.iter().map(|s| s.to_string()));
    rows.push(header);
    let mut base_row = vec!["baseline count".to_string()];
    base_row.extend(first.entries.iter().map(|e| group_int(e.baseline_count as i64)));
    rows.push(base_row);
    for t in tables {
        let mut row = vec![t.disrupted.clone()];
        row.extend(t.entries.iter().map(|e| e.cell()));
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let _ = writeln!(out, "{title}");
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                if c == 0 {
                    format!("{:<w$}", cell, w = widths[c])
                } else {
                    format!("{:>w$}", cell, w = widths[c])
                }
            })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::expand;
    use crate::routing::all_pairs;

    fn flows(kind: WeightKind, removed: &[&str]) -> SectionUsage {
        let g = expand(&fixtures::triangle(), kind);
        section_flows(&all_pairs(&g.remove_sections(removed).unwrap()))
    }

    #[test]
    fn triangle_counts_and_shares() {
        for kind in WeightKind::ALL {
            let u = flows(kind, &[]);
            assert_eq!(u.counts, [2, 2, 0]);
            assert_eq!(format!("{:.2}", u.share_percent(0)), "66.67");
            assert_eq!(u.share_percent(2), 0.0);
        }
    }

    #[test]
    fn csv_has_six_decimals() {
        let csv = flows(WeightKind::Time, &[]).to_csv();
        assert_eq!(
            csv,
            "section_id,count,share_percent\ns1,2,66.666667\ns2,2,66.666667\ns3,0,0.000000\n"
        );
    }

    #[test]
    fn delta_after_removing_s1() {
        let base = flows(WeightKind::Distance, &[]);
        let alt = flows(WeightKind::Distance, &["s1"]);
        let d: Vec<i64> = flow_delta(&base, &alt).unwrap().iter().map(|d| d.delta_count).collect();
        assert_eq!(d, [-2, 0, 2]);
        assert!(flow_delta(&base, &base)
            .unwrap()
            .iter()
            .all(|d| d.delta_count == 0 && d.delta_share == 0.0));
    }

    #[test]
    fn delta_reports_added_sections() {
        let base = flows(WeightKind::Distance, &[]);
        let mut alt = base.clone();
        alt.section_ids.push("new".into());
        alt.counts.push(1);
        let d = flow_delta(&base, &alt).unwrap();
        assert_eq!(d.last().unwrap().section, "new");
        assert_eq!(d.last().unwrap().delta_count, 1);
    }

    #[test]
    fn redistribution_on_triangle() {
        let g = expand(&fixtures::triangle(), WeightKind::Distance);
        let watched: Vec<String> = ["s1", "s2", "s3"].map(String::from).to_vec();
        let t = redistribution(&g.view(), "s1", &watched).unwrap();
        let rows: Vec<_> = t.entries.iter().map(|e| (e.delta_count, e.delta_percent)).collect();
        assert_eq!(rows, [(-2, Some(-100.0)), (0, Some(0.0)), (2, None)]);
        assert_eq!(t.entries[0].cell(), "-2 (-100.0%)");
        assert_eq!(t.entries[1].cell(), "0 (0.0%)");
        assert_eq!(t.entries[2].cell(), "+2 (n/a, base 0)");

        let zero = redistribution(&g.view(), "s3", &watched).unwrap();
        assert_eq!(zero.entries[2].delta_count, 0);
        assert_eq!(zero.entries[2].delta_percent, None);
        assert!(redistribution(&g.view(), "s9", &watched).is_err());
        assert!(redistribution(&g.view(), "s1", &[]).is_err());
    }
}
