//! File exports: CSV tables and GeoJSON line features for map styling.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::flow::{FlowDelta, SectionUsage};
use crate::network::RawNetwork;
use crate::resilience::{NriResult, PairNriResult};

/// Per-section flows with a leading weight column, for several weight kinds.
pub fn flows_csv_multi(usages: &[SectionUsage]) -> String {
    let mut out = String::from("weight,section_id,count,share_percent\n");
    for u in usages {
        for (i, id) in u.section_ids.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{:.6}",
                u.weight_kind,
                id,
                u.counts[i],
                u.share_percent(i)
            );
        }
    }
    out
}

fn measure_cell(q: crate::resilience::Measure) -> String {
    match q.value() {
        Some(v) => format!("{v:.6}"),
        None => "inf".to_string(),
    }
}

pub fn nri_csv(rows: &[NriResult]) -> String {
    let mut out = String::from("weight,section,q,finite\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.weight_kind,
            r.section,
            measure_cell(r.q),
            r.finite
        );
    }
    out
}

pub fn nri_pair_csv(rows: &[PairNriResult]) -> String {
    let mut out = String::from("weight,section_u,section_v,q,finite\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.weight_kind,
            r.sections.0,
            r.sections.1,
            measure_cell(r.q),
            r.finite
        );
    }
    out
}

/// GeoJSON of every section of `net` that has coordinates at both ends.
///
/// Returns `None` when any station lacks a coordinate; map export is then
/// skipped rather than producing a partial map.
pub fn flows_geojson(net: &RawNetwork, usage: &SectionUsage, deltas: Option<&[FlowDelta]>) -> Option<String> {
    let coords: HashMap<&str, [f64; 2]> = net
        .stations
        .iter()
        .map(|s| s.coord.map(|c| (s.id.as_str(), c)))
        .collect::<Option<_>>()?;
    let delta_of: HashMap<&str, &FlowDelta> = deltas.unwrap_or(&[]).iter().map(|d| (d.section.as_str(), d)).collect();
    let features: Vec<Value> = net
        .sections
        .iter()
        .map(|s| {
            let (count, share) = match usage.position(&s.id) {
                Ok(i) => (usage.counts[i], usage.share_percent(i)),
                Err(_) => (0, 0.0),
            };
            let (dc, ds) = delta_of
                .get(s.id.as_str())
                .map_or((0, 0.0), |d| (d.delta_count, d.delta_share));
            json!({
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [coords[s.end_a.station.as_str()], coords[s.end_b.station.as_str()]],
                },
                "properties": {
                    "section": s.id,
                    "weight": usage.weight_kind.as_str(),
                    "count": count,
                    "share_percent": share,
                    "delta_count": dc,
                    "delta_share": ds,
                },
            })
        })
        .collect();
    let doc = json!({ "type": "FeatureCollection", "features": features });
    Some(serde_json::to_string_pretty(&doc).expect("geojson serialises"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::flow::section_flows;
    use crate::graph::{expand, WeightKind};
    use crate::routing::all_pairs;

    #[test]
    fn geojson_requires_coordinates() {
        let mut net = fixtures::triangle();
        let g = expand(&net, WeightKind::Time);
        let usage = section_flows(&all_pairs(&g.view()));
        assert!(flows_geojson(&net, &usage, None).is_none());
        for (i, s) in net.stations.iter_mut().enumerate() {
            s.coord = Some([19.0 + i as f64, 47.0]);
        }
        let text = flows_geojson(&net, &usage, None).unwrap();
        let doc: Value = serde_json::from_str(&text).unwrap();
        let features = doc["features"].as_array().unwrap();
        assert_eq!(features.len(), 3);
        assert_eq!(features[0]["properties"]["count"], 2);
        assert_eq!(features[0]["geometry"]["coordinates"][1][0], 20.0);
    }
}
