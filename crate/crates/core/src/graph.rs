//! Four-port expansion of a station network into a directed weighted graph.
//!
//! Every station (and wye) becomes four port nodes: an arrival and a
//! departure node on each of its two sides. Trains enter through an arrival
//! port and leave through a departure port. Crossing to the opposite side
//! is free; leaving on the side one arrived at is a reversal and costs the
//! station's penalty in time mode (and nothing in distance mode). Wyes have
//! no reversal arcs at all. Each line section contributes one arc per
//! direction, from a departure port to the arrival port at the far end.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{travel_time_minutes, RawNetwork, Side, StationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Distance,
    Time,
}

impl WeightKind {
    pub const ALL: [WeightKind; 2] = [WeightKind::Distance, WeightKind::Time];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightKind::Distance => "distance",
            WeightKind::Time => "time",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            WeightKind::Distance => "km",
            WeightKind::Time => "min",
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" | "length" => Ok(WeightKind::Distance),
            "time" => Ok(WeightKind::Time),
            other => Err(Error::Config(format!("unknown weight kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Role {
    Arrival,
    Departure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PortNode {
    /// Position of the station in [`ExpandedGraph::stations`].
    pub station: usize,
    pub side: Side,
    pub role: Role,
    pub index: usize,
}

/// Dense index of a station port.
pub fn port_index(station: usize, side: Side, role: Role) -> usize {
    4 * station
        + match side {
            Side::L => 0,
            Side::R => 2,
        }
        + match role {
            Role::Arrival => 0,
            Role::Departure => 1,
        }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArcOrigin {
    /// Index into [`ExpandedGraph::section_ids`].
    Section(usize),
    /// Arrival→departure arc inside a station.
    Internal { reversal: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
    pub origin: ArcOrigin,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationInfo {
    pub id: String,
    pub kind: StationKind,
}

#[derive(Debug, Clone)]
pub struct ExpandedGraph {
    weight_kind: WeightKind,
    stations: Vec<StationInfo>,
    station_index: HashMap<String, usize>,
    section_ids: Vec<String>,
    section_index: HashMap<String, usize>,
    /// Rank of each section id in lexicographic order, for tie-breaking.
    section_rank: Vec<u32>,
    nodes: Vec<PortNode>,
    arcs: Vec<Arc>,
    /// Both directed arcs of every section.
    section_arcs: Vec<[usize; 2]>,
    out_offsets: Vec<usize>,
    out_arcs: Vec<usize>,
}

/// Builds the expanded graph. The network must satisfy [`RawNetwork::check`].
pub fn expand(net: &RawNetwork, weight_kind: WeightKind) -> ExpandedGraph {
    let stations: Vec<StationInfo> = net
        .stations
        .iter()
        .map(|s| StationInfo {
            id: s.id.clone(),
            kind: s.kind,
        })
        .collect();
    let station_index: HashMap<String, usize> = stations.iter().enumerate().map(|(i, s)| (s.id.clone(), i)).collect();

    let mut nodes = Vec::with_capacity(4 * stations.len());
    for station in 0..stations.len() {
        for side in [Side::L, Side::R] {
            for role in [Role::Arrival, Role::Departure] {
                let index = port_index(station, side, role);
                debug_assert_eq!(index, nodes.len());
                nodes.push(PortNode {
                    station,
                    side,
                    role,
                    index,
                });
            }
        }
    }

    let mut arcs = Vec::new();
    let mut section_arcs = Vec::with_capacity(net.sections.len());
    for (i, s) in net.sections.iter().enumerate() {
        let weight = match weight_kind {
            WeightKind::Distance => s.length_km,
            WeightKind::Time => travel_time_minutes(s),
        };
        let a = station_index[&s.end_a.station];
        let b = station_index[&s.end_b.station];
        let forward = arcs.len();
        arcs.push(Arc {
            from: port_index(a, s.end_a.side, Role::Departure),
            to: port_index(b, s.end_b.side, Role::Arrival),
            weight,
            origin: ArcOrigin::Section(i),
        });
        arcs.push(Arc {
            from: port_index(b, s.end_b.side, Role::Departure),
            to: port_index(a, s.end_a.side, Role::Arrival),
            weight,
            origin: ArcOrigin::Section(i),
        });
        section_arcs.push([forward, forward + 1]);
    }

    for (station, spec) in net.stations.iter().enumerate() {
        for side in [Side::L, Side::R] {
            let arrival = port_index(station, side, Role::Arrival);
            arcs.push(Arc {
                from: arrival,
                to: port_index(station, side.opposite(), Role::Departure),
                weight: 0.0,
                origin: ArcOrigin::Internal { reversal: false },
            });
            if spec.kind.can_reverse() {
                let penalty = match weight_kind {
                    WeightKind::Distance => 0.0,
                    WeightKind::Time => spec.reversal_penalty,
                };
                arcs.push(Arc {
                    from: arrival,
                    to: port_index(station, side, Role::Departure),
                    weight: penalty,
                    origin: ArcOrigin::Internal { reversal: true },
                });
            }
        }
    }

    let section_ids: Vec<String> = net.sections.iter().map(|s| s.id.clone()).collect();
    let section_index = section_ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
    let mut order: Vec<usize> = (0..section_ids.len()).collect();
    order.sort_by(|&x, &y| section_ids[x].cmp(&section_ids[y]));
    let mut section_rank = vec![0u32; section_ids.len()];
    for (rank, &i) in order.iter().enumerate() {
        section_rank[i] = rank as u32;
    }

    // CSR adjacency in arc-index order.
    let mut out_offsets = vec![0usize; nodes.len() + 1];
    for arc in &arcs {
        out_offsets[arc.from + 1] += 1;
    }
    for i in 0..nodes.len() {
        out_offsets[i + 1] += out_offsets[i];
    }
    let mut fill = out_offsets.clone();
    let mut out_arcs = vec![0usize; arcs.len()];
    for (i, arc) in arcs.iter().enumerate() {
        out_arcs[fill[arc.from]] = i;
        fill[arc.from] += 1;
    }

    ExpandedGraph {
        weight_kind,
        stations,
        station_index,
        section_ids,
        section_index,
        section_rank,
        nodes,
        arcs,
        section_arcs,
        out_offsets,
        out_arcs,
    }
}

impl ExpandedGraph {
    pub fn weight_kind(&self) -> WeightKind {
        self.weight_kind
    }

    pub fn nodes(&self) -> &[PortNode] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn stations(&self) -> &[StationInfo] {
        &self.stations
    }

    pub fn section_ids(&self) -> &[String] {
        &self.section_ids
    }

    pub fn section_count(&self) -> usize {
        self.section_ids.len()
    }

    pub fn station_position(&self, id: &str) -> Result<usize> {
        self.station_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownStation(id.to_string()))
    }

    pub fn section_position(&self, id: &str) -> Result<usize> {
        self.section_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownSection(id.to_string()))
    }

    /// The four ports of a station, in (L arr, L dep, R arr, R dep) order.
    pub fn ports(&self, station_id: &str) -> Result<[PortNode; 4]> {
        let s = self.station_position(station_id)?;
        Ok([0, 1, 2, 3].map(|k| self.nodes[4 * s + k]))
    }

    pub fn section_arcs(&self, section: usize) -> [usize; 2] {
        self.section_arcs[section]
    }

    pub(crate) fn section_rank(&self, section: usize) -> u32 {
        self.section_rank[section]
    }

    pub(crate) fn out_arcs(&self, node: usize) -> &[usize] {
        &self.out_arcs[self.out_offsets[node]..self.out_offsets[node + 1]]
    }

    /// Stations that act as origins and destinations, in input order.
    pub fn eligible_stations(&self) -> Vec<usize> {
        (0..self.stations.len())
            .filter(|&i| self.stations[i].kind.is_eligible())
            .collect()
    }

    /// The undisrupted graph as a view.
    pub fn view(&self) -> GraphView<'_> {
        GraphView {
            graph: self,
            dead: vec![false; self.section_ids.len()],
        }
    }

    /// A view with both arcs of every listed section removed.
    pub fn remove_sections<S: AsRef<str>>(&self, dead: &[S]) -> Result<GraphView<'_>> {
        self.view().without(dead)
    }

    /// DOT rendering for debugging; arcs are labelled with weight and origin.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph expanded {{");
        let _ = writeln!(out, "  // weight: {}", self.weight_kind);
        for n in &self.nodes {
            let role = match n.role {
                Role::Arrival => "arr",
                Role::Departure => "dep",
            };
            let _ = writeln!(
                out,
                "  n{} [label=\"{}/{}/{}\"];",
                n.index, self.stations[n.station].id, n.side, role
            );
        }
        for arc in &self.arcs {
            let origin = match arc.origin {
                ArcOrigin::Section(s) => self.section_ids[s].clone(),
                ArcOrigin::Internal { reversal: true } => "reversal".to_string(),
                ArcOrigin::Internal { reversal: false } => "internal".to_string(),
            };
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"{} {}\"];",
                arc.from, arc.to, arc.weight, origin
            );
        }
        out.push_str("}\n");
        out
    }
}

/// An [`ExpandedGraph`] with a mask of disrupted sections.
///
/// Disruption never copies the graph; routing simply skips masked arcs.
#[derive(Debug, Clone)]
pub struct GraphView<'g> {
    graph: &'g ExpandedGraph,
    dead: Vec<bool>,
}

impl<'g> GraphView<'g> {
    pub fn graph(&self) -> &'g ExpandedGraph {
        self.graph
    }

    /// Further removes the given sections.
    pub fn without<S: AsRef<str>>(&self, ids: &[S]) -> Result<GraphView<'g>> {
        let mut dead = self.dead.clone();
        for id in ids {
            dead[self.graph.section_position(id.as_ref())?] = true;
        }
        Ok(GraphView {
            graph: self.graph,
            dead,
        })
    }

    /// Removal by section index; panics on out-of-range indices.
    pub fn without_indices(&self, sections: &[usize]) -> GraphView<'g> {
        let mut dead = self.dead.clone();
        for &s in sections {
            dead[s] = true;
        }
        GraphView {
            graph: self.graph,
            dead,
        }
    }

    pub fn is_removed(&self, section: usize) -> bool {
        self.dead[section]
    }

    pub fn removed_sections(&self) -> Vec<&'g str> {
        (0..self.dead.len())
            .filter(|&s| self.dead[s])
            .map(|s| self.graph.section_ids[s].as_str())
            .collect()
    }

    pub fn is_live(&self, arc: &Arc) -> bool {
        match arc.origin {
            ArcOrigin::Section(s) => !self.dead[s],
            ArcOrigin::Internal { .. } => true,
        }
    }

    /// Surviving arcs in arc-index order.
    pub fn live_arcs(&self) -> impl Iterator<Item = &'g Arc> + '_ {
        self.graph.arcs.iter().filter(move |a| self.is_live(a))
    }
}
