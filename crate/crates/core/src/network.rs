//! Domain-level network model: stations, line sections and their side
//! attachments, prior to port expansion.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Reversal penalty applied when a document does not specify one, in minutes.
pub const DEFAULT_REVERSAL_PENALTY_MIN: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::L => "L",
            Side::R => "R",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StationKind {
    /// Ordinary station or terminus: reversal possible, origin/destination.
    #[default]
    Station,
    /// Quasi-station bypassing a station; trains cannot reverse here.
    Wye,
    /// Routing-only node, never an origin or destination.
    Auxiliary,
}

impl StationKind {
    pub fn can_reverse(self) -> bool {
        self != StationKind::Wye
    }

    pub fn is_eligible(self) -> bool {
        self == StationKind::Station
    }
}

fn default_penalty() -> f64 {
    DEFAULT_REVERSAL_PENALTY_MIN
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub kind: StationKind,
    #[serde(rename = "reversal_penalty_min", default = "default_penalty")]
    pub reversal_penalty: f64,
    #[serde(rename = "keep", default, skip_serializing_if = "is_false")]
    pub keep_in_contraction: bool,
    /// Optional `[lon, lat]`, only used for map export.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coord: Option<[f64; 2]>,
}

impl StationSpec {
    pub fn new(id: impl Into<String>) -> Self {
        StationSpec {
            id: id.into(),
            name: None,
            kind: StationKind::Station,
            reversal_penalty: DEFAULT_REVERSAL_PENALTY_MIN,
            keep_in_contraction: false,
            coord: None,
        }
    }

    pub fn with_kind(mut self, kind: StationKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_penalty(mut self, minutes: f64) -> Self {
        self.reversal_penalty = minutes;
        self
    }

    pub fn kept(mut self) -> Self {
        self.keep_in_contraction = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Endpoint {
    pub station: String,
    pub side: Side,
}

impl Endpoint {
    pub fn new(station: impl Into<String>, side: Side) -> Self {
        Endpoint {
            station: station.into(),
            side,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionSpec {
    pub id: String,
    #[serde(rename = "a")]
    pub end_a: Endpoint,
    #[serde(rename = "b")]
    pub end_b: Endpoint,
    pub length_km: f64,
    #[serde(rename = "speed_kmh")]
    pub line_speed_kmh: f64,
}

impl SectionSpec {
    pub fn new(id: impl Into<String>, a: Endpoint, b: Endpoint, length_km: f64, speed_kmh: f64) -> Self {
        SectionSpec {
            id: id.into(),
            end_a: a,
            end_b: b,
            length_km,
            line_speed_kmh: speed_kmh,
        }
    }

    /// The endpoint at `station`, if the section touches it.
    pub fn end_at(&self, station: &str) -> Option<&Endpoint> {
        if self.end_a.station == station {
            Some(&self.end_a)
        } else if self.end_b.station == station {
            Some(&self.end_b)
        } else {
            None
        }
    }

    /// The endpoint opposite to `station`.
    pub fn far_end(&self, station: &str) -> Option<&Endpoint> {
        if self.end_a.station == station {
            Some(&self.end_b)
        } else if self.end_b.station == station {
            Some(&self.end_a)
        } else {
            None
        }
    }
}

/// Travel time over a section at line speed, in minutes.
pub fn travel_time_minutes(s: &SectionSpec) -> f64 {
    s.length_km / s.line_speed_kmh * 60.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RawNetwork {
    pub stations: Vec<StationSpec>,
    pub sections: Vec<SectionSpec>,
}

const TOP_KEYS: &[&str] = &["stations", "sections"];
const STATION_KEYS: &[&str] = &["id", "name", "kind", "reversal_penalty_min", "keep", "coord"];
const SECTION_KEYS: &[&str] = &["id", "a", "b", "length_km", "speed_kmh"];
const ENDPOINT_KEYS: &[&str] = &["station", "side"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

pub(crate) fn parse_json(doc: &str) -> Result<Value> {
    serde_json::from_str(doc).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn check_keys(value: &Value, allowed: &[&str], context: &str) -> Result<()> {
    if let Value::Object(map) = value {
        if let Some(key) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::UnknownKey {
                context: context.to_string(),
                key: key.clone(),
            });
        }
    }
    Ok(())
}

fn check_section_keys(section: &Value, index: usize) -> Result<()> {
    check_section_object_keys(section, &format!("sections[{index}]"))
}

pub(crate) fn check_station_keys(station: &Value, context: &str) -> Result<()> {
    check_keys(station, STATION_KEYS, context)
}

pub(crate) fn check_section_object_keys(section: &Value, context: &str) -> Result<()> {
    check_keys(section, SECTION_KEYS, context)?;
    for end in ["a", "b"] {
        if let Some(v) = section.get(end) {
            check_keys(v, ENDPOINT_KEYS, &format!("{context}.{end}"))?;
        }
    }
    Ok(())
}

/// Parses a network document in strict mode.
pub fn parse_network(doc: &str) -> Result<RawNetwork> {
    parse_network_with(doc, ParseMode::Strict)
}

pub fn parse_network_with(doc: &str, mode: ParseMode) -> Result<RawNetwork> {
    let value = parse_json(doc)?;
    if !value.is_object() {
        return Err(Error::Schema("top level must be an object".into()));
    }
    if mode == ParseMode::Strict {
        check_keys(&value, TOP_KEYS, "document")?;
        if let Some(Value::Array(stations)) = value.get("stations") {
            for (i, s) in stations.iter().enumerate() {
                check_keys(s, STATION_KEYS, &format!("stations[{i}]"))?;
            }
        }
        if let Some(Value::Array(sections)) = value.get("sections") {
            for (i, s) in sections.iter().enumerate() {
                check_section_keys(s, i)?;
            }
        }
    }
    for key in TOP_KEYS {
        if value.get(key).is_none() {
            return Err(Error::Schema(format!("missing top-level key {key:?}")));
        }
    }
    let net: RawNetwork = serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
    net.check()?;
    Ok(net)
}

/// Renders the network as a pretty-printed document accepted by [`parse_network`].
pub fn render_network(net: &RawNetwork) -> String {
    serde_json::to_string_pretty(net).expect("network serialization is infallible")
}

impl RawNetwork {
    pub fn new(stations: Vec<StationSpec>, sections: Vec<SectionSpec>) -> Self {
        RawNetwork { stations, sections }
    }

    /// Checks the structural invariants of the network.
    pub fn check(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for st in &self.stations {
            if !ids.insert(st.id.as_str()) {
                return Err(Error::DuplicateStation(st.id.clone()));
            }
            if !(st.reversal_penalty.is_finite() && st.reversal_penalty >= 0.0) {
                return Err(Error::NegativePenalty {
                    station: st.id.clone(),
                    value: st.reversal_penalty,
                });
            }
        }
        let mut section_ids = HashSet::new();
        for s in &self.sections {
            if !section_ids.insert(s.id.as_str()) {
                return Err(Error::DuplicateSection(s.id.clone()));
            }
            for end in [&s.end_a, &s.end_b] {
                if !ids.contains(end.station.as_str()) {
                    return Err(Error::DanglingEndpoint {
                        section: s.id.clone(),
                        station: end.station.clone(),
                    });
                }
            }
            if s.end_a.station == s.end_b.station {
                return Err(Error::SelfLoop(s.id.clone()));
            }
            for (field, value) in [("length_km", s.length_km), ("speed_kmh", s.line_speed_kmh)] {
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::NonPositive {
                        section: s.id.clone(),
                        field,
                        value,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn station(&self, id: &str) -> Option<&StationSpec> {
        self.stations.iter().find(|s| s.id == id)
    }

    pub fn section(&self, id: &str) -> Option<&SectionSpec> {
        self.sections.iter().find(|s| s.id == id)
    }

    /// Section indices incident to each station, keyed by station id.
    fn incidence(&self) -> HashMap<&str, Vec<usize>> {
        let mut inc: HashMap<&str, Vec<usize>> = self.stations.iter().map(|s| (s.id.as_str(), Vec::new())).collect();
        for (i, s) in self.sections.iter().enumerate() {
            for end in [&s.end_a, &s.end_b] {
                if let Some(v) = inc.get_mut(end.station.as_str()) {
                    v.push(i);
                }
            }
        }
        inc
    }

    /// Whether `station` may be merged away by [`contract_joint_nodes`].
    fn is_contractible(&self, station: &StationSpec, incident: &[usize]) -> bool {
        if station.kind != StationKind::Station || station.keep_in_contraction || incident.len() != 2 {
            return false;
        }
        let (s1, s2) = (&self.sections[incident[0]], &self.sections[incident[1]]);
        let (j1, j2) = (s1.end_at(&station.id).unwrap(), s2.end_at(&station.id).unwrap());
        if j1.side == j2.side {
            return false;
        }
        let (f1, f2) = (s1.far_end(&station.id).unwrap(), s2.far_end(&station.id).unwrap());
        if f1.station == f2.station {
            return false;
        }
        // Turning back at the joint must never beat turning back at the
        // neighbour, or removing the joint would lengthen some paths.
        [(f1, s1), (f2, s2)].into_iter().all(|(far, sec)| {
            let neighbour = self.station(&far.station).unwrap();
            neighbour.kind.can_reverse()
                && neighbour.reversal_penalty <= 2.0 * travel_time_minutes(sec) + station.reversal_penalty
        })
    }

    /// Ids of stations that are contractible joints in the current network.
    pub fn contractible_joints(&self) -> Vec<String> {
        let inc = self.incidence();
        self.stations
            .iter()
            .filter(|st| self.is_contractible(st, &inc[st.id.as_str()]))
            .map(|st| st.id.clone())
            .collect()
    }

    /// Station ids that take part in origin/destination enumeration.
    pub fn eligible_stations(&self) -> Vec<String> {
        self.stations
            .iter()
            .filter(|s| s.kind.is_eligible())
            .map(|s| s.id.clone())
            .collect()
    }
}

/// Removes degree-two joints iteratively until none is left.
///
/// A station is a joint when it is an ordinary station not flagged `keep`,
/// has exactly two incident sections attached on opposite sides, and those
/// lead to two different neighbours. The merged section keeps the outer
/// side attachments, the summed length and the summed travel time (its
/// speed is synthesised to reproduce that time).
pub fn contract_joint_nodes(net: &RawNetwork) -> RawNetwork {
    let mut net = net.clone();
    loop {
        let inc = net.incidence();
        let joint = net
            .stations
            .iter()
            .position(|st| net.is_contractible(st, &inc[st.id.as_str()]));
        let Some(pos) = joint else { break };
        let joint_id = net.stations[pos].id.clone();
        let (i1, i2) = {
            let v = &inc[joint_id.as_str()];
            (v[0].min(v[1]), v[0].max(v[1]))
        };
        let (s1, s2) = (&net.sections[i1], &net.sections[i2]);
        let length = s1.length_km + s2.length_km;
        let time = travel_time_minutes(s1) + travel_time_minutes(s2);
        let mut id = format!("{}+{}", s1.id, s2.id);
        let mut n = 2;
        while net.sections.iter().any(|s| s.id == id) {
            id = format!("{}+{}#{n}", s1.id, s2.id);
            n += 1;
        }
        let merged = SectionSpec {
            id,
            end_a: s1.far_end(&joint_id).unwrap().clone(),
            end_b: s2.far_end(&joint_id).unwrap().clone(),
            length_km: length,
            line_speed_kmh: length / time * 60.0,
        };
        net.sections[i1] = merged;
        net.sections.remove(i2);
        net.stations.remove(pos);
    }
    net
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub stations: usize,
    pub eligible_stations: usize,
    pub auxiliary_stations: usize,
    pub wyes: usize,
    pub sections: usize,
    pub components: usize,
    /// Number of stations per incident-section count.
    pub degree_histogram: BTreeMap<usize, usize>,
    pub contractible_joints: Vec<String>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} + {} stations (plus {} wyes) and {} line sections",
            crate::format::group_int(self.eligible_stations as i64),
            crate::format::group_int(self.auxiliary_stations as i64),
            crate::format::group_int(self.wyes as i64),
            crate::format::group_int(self.sections as i64),
        )?;
        writeln!(
            f,
            "{} stations in total, {} connected component(s)",
            self.stations, self.components
        )?;
        write!(f, "degree histogram:")?;
        for (deg, count) in &self.degree_histogram {
            write!(f, " {deg}:{count}")?;
        }
        writeln!(f)?;
        if self.contractible_joints.is_empty() {
            writeln!(f, "contractible joints: none")
        } else {
            writeln!(f, "contractible joints: {}", self.contractible_joints.join(", "))
        }
    }
}

/// Counts, connectivity and contraction candidates; never rejects.
pub fn validate(net: &RawNetwork) -> ValidationReport {
    let index: HashMap<&str, usize> = net
        .stations
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.as_str(), i))
        .collect();
    let mut parent: Vec<usize> = (0..net.stations.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut degree = vec![0usize; net.stations.len()];
    for s in &net.sections {
        let (Some(&a), Some(&b)) = (index.get(s.end_a.station.as_str()), index.get(s.end_b.station.as_str())) else {
            continue;
        };
        degree[a] += 1;
        degree[b] += 1;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let components = (0..net.stations.len()).filter(|&i| find(&mut parent, i) == i).count();
    let mut degree_histogram = BTreeMap::new();
    for d in degree {
        *degree_histogram.entry(d).or_insert(0) += 1;
    }
    let count = |k: StationKind| net.stations.iter().filter(|s| s.kind == k).count();
    ValidationReport {
        stations: net.stations.len(),
        eligible_stations: count(StationKind::Station),
        auxiliary_stations: count(StationKind::Auxiliary),
        wyes: count(StationKind::Wye),
        sections: net.sections.len(),
        components,
        degree_histogram,
        contractible_joints: net.contractible_joints(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parses_triangle_fixture() {
        let net = parse_network(fixtures::TRIANGLE_JSON).unwrap();
        assert_eq!(net.stations.len(), 3);
        assert_eq!(net.sections.len(), 3);
        assert_eq!(net, fixtures::triangle());
    }

    #[test]
    fn missing_penalty_defaults_to_fifteen() {
        let net = parse_network(fixtures::TRIANGLE_JSON).unwrap();
        assert!(net.stations.iter().all(|s| s.reversal_penalty == 15.0));
        assert!(net
            .stations
            .iter()
            .all(|s| s.kind == StationKind::Station && !s.keep_in_contraction));
    }

    #[test]
    fn dangling_endpoint_names_station() {
        let doc = r#"{"stations":[{"id":"A"},{"id":"B"}],
            "sections":[{"id":"s1","a":{"station":"A","side":"R"},"b":{"station":"Q","side":"L"},"length_km":1,"speed_kmh":60}]}"#;
        match parse_network(doc) {
            Err(Error::DanglingEndpoint { station, .. }) => assert_eq!(station, "Q"),
            other => panic!("expected dangling endpoint, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_network("{\n  \"stations\": [,]\n}").unwrap_err();
        match err {
            Error::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_values() {
        let base = |len: &str, speed: &str| {
            format!(
                r#"{{"stations":[{{"id":"A"}},{{"id":"B"}}],
                "sections":[{{"id":"s1","a":{{"station":"A","side":"R"}},"b":{{"station":"B","side":"L"}},"length_km":{len},"speed_kmh":{speed}}}]}}"#
            )
        };
        assert!(matches!(
            parse_network(&base("0", "60")),
            Err(Error::NonPositive { field: "length_km", .. })
        ));
        assert!(matches!(
            parse_network(&base("5", "-1")),
            Err(Error::NonPositive { field: "speed_kmh", .. })
        ));
        assert!(parse_network(&base("5", "60")).is_ok());

        let dup = r#"{"stations":[{"id":"A"},{"id":"A"}],"sections":[]}"#;
        assert!(matches!(parse_network(dup), Err(Error::DuplicateStation(id)) if id == "A"));

        let self_loop = r#"{"stations":[{"id":"A"}],"sections":[{"id":"s","a":{"station":"A","side":"R"},"b":{"station":"A","side":"L"},"length_km":1,"speed_kmh":1}]}"#;
        assert!(matches!(parse_network(self_loop), Err(Error::SelfLoop(_))));
    }

    #[test]
    fn strict_mode_rejects_unknown_keys() {
        let doc = r#"{"stations":[{"id":"A","colour":"red"}],"sections":[]}"#;
        assert!(matches!(parse_network(doc), Err(Error::UnknownKey { key, .. }) if key == "colour"));
        let net = parse_network_with(doc, ParseMode::Lenient).unwrap();
        assert_eq!(net.stations.len(), 1);
    }

    #[test]
    fn travel_time_examples() {
        let mk = |len, speed| {
            SectionSpec::new(
                "s",
                Endpoint::new("A", Side::R),
                Endpoint::new("B", Side::L),
                len,
                speed,
            )
        };
        assert_eq!(travel_time_minutes(&mk(10.0, 60.0)), 10.0);
        assert_eq!(travel_time_minutes(&mk(40.0, 60.0)), 40.0);
        assert!((travel_time_minutes(&mk(7.5, 90.0)) - 5.0).abs() < 1e-12);
    }

    fn chain(keep_joint: bool, joint_sides: (Side, Side)) -> RawNetwork {
        let mut j = StationSpec::new("J");
        j.keep_in_contraction = keep_joint;
        RawNetwork::new(
            vec![StationSpec::new("P"), j, StationSpec::new("Q")],
            vec![
                SectionSpec::new(
                    "pj",
                    Endpoint::new("P", Side::R),
                    Endpoint::new("J", joint_sides.0),
                    5.0,
                    60.0,
                ),
                SectionSpec::new(
                    "jq",
                    Endpoint::new("J", joint_sides.1),
                    Endpoint::new("Q", Side::L),
                    7.0,
                    60.0,
                ),
            ],
        )
    }

    #[test]
    fn contracts_simple_chain() {
        let out = contract_joint_nodes(&chain(false, (Side::L, Side::R)));
        assert_eq!(out.stations.len(), 2);
        assert_eq!(out.sections.len(), 1);
        let s = &out.sections[0];
        assert_eq!(s.end_a, Endpoint::new("P", Side::R));
        assert_eq!(s.end_b, Endpoint::new("Q", Side::L));
        assert_eq!(s.length_km, 12.0);
        assert!((travel_time_minutes(s) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn kept_or_same_side_joints_survive() {
        let kept = chain(true, (Side::L, Side::R));
        assert_eq!(contract_joint_nodes(&kept), kept);
        let same_side = chain(false, (Side::L, Side::L));
        assert_eq!(contract_joint_nodes(&same_side), same_side);
    }

    #[test]
    fn joint_next_to_wye_survives() {
        // Turning back at J is the only way to reverse next to the wye P.
        let mut net = chain(false, (Side::L, Side::R));
        net.stations[0].kind = StationKind::Wye;
        assert!(net.contractible_joints().is_empty());
        assert_eq!(contract_joint_nodes(&net), net);
    }

    #[test]
    fn merged_section_uses_summed_time() {
        let mut net = chain(false, (Side::L, Side::R));
        net.sections[1].line_speed_kmh = 140.0;
        let t = travel_time_minutes(&net.sections[0]) + travel_time_minutes(&net.sections[1]);
        let out = contract_joint_nodes(&net);
        assert!((travel_time_minutes(&out.sections[0]) - t).abs() < 1e-12);
        assert_eq!(out.sections[0].id, "pj+jq");
    }

    #[test]
    fn validate_counts_components() {
        let report = validate(&fixtures::triangle());
        assert_eq!((report.components, report.stations, report.sections), (1, 3, 3));

        let mut net = fixtures::triangle();
        net.sections.retain(|s| s.id != "s3");
        net.stations.push(StationSpec::new("Z"));
        assert_eq!(validate(&net).components, 2);
    }

    #[test]
    fn validation_summary_format() {
        let text = validate(&fixtures::triangle()).to_string();
        assert!(
            text.starts_with("3 + 0 stations (plus 0 wyes) and 3 line sections"),
            "{text}"
        );
    }
}
