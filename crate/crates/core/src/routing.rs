//! Shortest paths over the expanded graph.
//!
//! A path from station `a` to station `b` starts at either departure port
//! of `a` (no initial reversal) and ends at either arrival port of `b`.
//! Among equal-cost paths the one whose section-id sequence is
//! lexicographically smallest is kept, decided at each node when two
//! predecessors tie, which makes path membership reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{port_index, ArcOrigin, ExpandedGraph, GraphView, Role, WeightKind};
use crate::network::Side;

const NO_ARC: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathResult {
    /// `None` when the destination cannot be reached.
    pub cost: Option<f64>,
    pub sections: Vec<String>,
    /// Number of same-side reversal arcs used.
    pub reversals: usize,
}

#[derive(Clone, Copy)]
struct HeapEntry {
    dist: f64,
    // Arrival ports pop before departure ports at equal distance, which
    // keeps the pop order topological over zero-weight internal arcs.
    role: u8,
    node: u32,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap.
        other
            .dist
            .total_cmp(&self.dist)
            .then(other.role.cmp(&self.role))
            .then(other.node.cmp(&self.node))
    }
}

/// Reusable single-source search state.
pub(crate) struct SingleSource {
    dist: Vec<f64>,
    pred: Vec<u32>,
    settled: Vec<bool>,
    order: Vec<u32>,
    heap: BinaryHeap<HeapEntry>,
    scratch_a: Vec<u32>,
    scratch_b: Vec<u32>,
}

fn role_rank(node: usize) -> u8 {
    // Port layout: even = arrival, odd = departure.
    (node % 2) as u8
}

impl SingleSource {
    pub(crate) fn new(nodes: usize) -> Self {
        SingleSource {
            dist: vec![f64::INFINITY; nodes],
            pred: vec![NO_ARC; nodes],
            settled: vec![false; nodes],
            order: Vec::with_capacity(nodes),
            heap: BinaryHeap::new(),
            scratch_a: Vec::new(),
            scratch_b: Vec::new(),
        }
    }

    /// Runs from both departure ports of `origin`. With `tie_break` the
    /// predecessor tree follows the lexicographic rule; without it only the
    /// distances are meaningful.
    pub(crate) fn run(&mut self, view: &GraphView<'_>, origin: usize, tie_break: bool) {
        let g = view.graph();
        self.dist.fill(f64::INFINITY);
        self.pred.fill(NO_ARC);
        self.settled.fill(false);
        self.order.clear();
        self.heap.clear();
        for side in [Side::L, Side::R] {
            let p = port_index(origin, side, Role::Departure);
            self.dist[p] = 0.0;
            self.heap.push(HeapEntry {
                dist: 0.0,
                role: role_rank(p),
                node: p as u32,
            });
        }
        while let Some(HeapEntry { dist, node, .. }) = self.heap.pop() {
            let u = node as usize;
            if self.settled[u] || dist > self.dist[u] {
                continue;
            }
            self.settled[u] = true;
            self.order.push(node);
            for &ai in g.out_arcs(u) {
                let arc = &g.arcs()[ai];
                if !view.is_live(arc) {
                    continue;
                }
                let v = arc.to;
                let nd = dist + arc.weight;
                if nd < self.dist[v] {
                    self.dist[v] = nd;
                    self.pred[v] = ai as u32;
                    self.heap.push(HeapEntry {
                        dist: nd,
                        role: role_rank(v),
                        node: v as u32,
                    });
                } else if tie_break
                    && nd == self.dist[v]
                    && !self.settled[v]
                    && self.pred[v] != ai as u32
                    && self.compare_via(g, ai, self.pred[v] as usize) == Ordering::Less
                {
                    self.pred[v] = ai as u32;
                }
            }
        }
    }

    /// Section ranks along the predecessor chain ending at `node`, plus the
    /// label of `last_arc` when given.
    fn sequence_into(&self, g: &ExpandedGraph, last_arc: Option<usize>, node: usize, out: &mut Vec<u32>) {
        out.clear();
        if let Some(ai) = last_arc {
            if let ArcOrigin::Section(s) = g.arcs()[ai].origin {
                out.push(g.section_rank(s));
            }
        }
        let mut cur = node;
        while self.pred[cur] != NO_ARC {
            let arc = &g.arcs()[self.pred[cur] as usize];
            if let ArcOrigin::Section(s) = arc.origin {
                out.push(g.section_rank(s));
            }
            cur = arc.from;
        }
        out.reverse();
    }

    /// Compares the sequences of reaching a node through arc `x` versus arc `y`.
    fn compare_via(&mut self, g: &ExpandedGraph, x: usize, y: usize) -> Ordering {
        let mut a = std::mem::take(&mut self.scratch_a);
        let mut b = std::mem::take(&mut self.scratch_b);
        self.sequence_into(g, Some(x), g.arcs()[x].from, &mut a);
        self.sequence_into(g, Some(y), g.arcs()[y].from, &mut b);
        let ord = a.cmp(&b);
        self.scratch_a = a;
        self.scratch_b = b;
        ord
    }

    /// Best arrival port of `station`, or `None` when unreachable.
    pub(crate) fn best_arrival(&mut self, g: &ExpandedGraph, station: usize, tie_break: bool) -> Option<usize> {
        let l = port_index(station, Side::L, Role::Arrival);
        let r = port_index(station, Side::R, Role::Arrival);
        let (dl, dr) = (self.dist[l], self.dist[r]);
        if dl.is_infinite() && dr.is_infinite() {
            return None;
        }
        Some(match dl.total_cmp(&dr) {
            Ordering::Less => l,
            Ordering::Greater => r,
            Ordering::Equal if !tie_break => l,
            Ordering::Equal => {
                let mut a = std::mem::take(&mut self.scratch_a);
                let mut b = std::mem::take(&mut self.scratch_b);
                self.sequence_into(g, None, l, &mut a);
                self.sequence_into(g, None, r, &mut b);
                let pick = if b < a { r } else { l };
                self.scratch_a = a;
                self.scratch_b = b;
                pick
            }
        })
    }

    pub(crate) fn cost_to(&self, station: usize) -> f64 {
        let l = self.dist[port_index(station, Side::L, Role::Arrival)];
        let r = self.dist[port_index(station, Side::R, Role::Arrival)];
        l.min(r)
    }

    /// Sections (in travel order) and reversal count of the path ending at `port`.
    pub(crate) fn walk_back(&self, g: &ExpandedGraph, port: usize) -> (Vec<usize>, usize) {
        let mut sections = Vec::new();
        let mut reversals = 0;
        let mut cur = port;
        while self.pred[cur] != NO_ARC {
            let arc = &g.arcs()[self.pred[cur] as usize];
            match arc.origin {
                ArcOrigin::Section(s) => sections.push(s),
                ArcOrigin::Internal { reversal: true } => reversals += 1,
                ArcOrigin::Internal { reversal: false } => {}
            }
            cur = arc.from;
        }
        sections.reverse();
        (sections, reversals)
    }

    pub(crate) fn dist(&self, node: usize) -> f64 {
        self.dist[node]
    }

    /// Costs from `origins[i]` to every later origin.
    pub(crate) fn row_costs(&mut self, view: &GraphView<'_>, origins: &[usize], i: usize) -> Vec<f64> {
        self.run(view, origins[i], false);
        origins[i + 1..].iter().map(|&d| self.cost_to(d)).collect()
    }

    /// Like [`SingleSource::row_costs`], keeping the tree behind the costs.
    pub(crate) fn row_tree(&mut self, view: &GraphView<'_>, origins: &[usize], i: usize) -> RowTree {
        let g = view.graph();
        self.run(view, origins[i], false);
        let mut costs = Vec::with_capacity(origins.len() - i - 1);
        let mut ends = Vec::with_capacity(origins.len() - i - 1);
        for &d in &origins[i + 1..] {
            match self.best_arrival(g, d, false) {
                Some(port) => {
                    costs.push(self.dist[port]);
                    ends.push(port as u32);
                }
                None => {
                    costs.push(f64::INFINITY);
                    ends.push(NO_ARC);
                }
            }
        }
        RowTree {
            costs,
            ends,
            pred: self.pred.clone(),
            order: self.order.clone(),
        }
    }
}

/// One origin's costs to later origins and the shortest-path tree they
/// came from. If no wanted destination is reached through a section,
/// deleting that section leaves those costs bit-for-bit unchanged.
#[derive(Debug, Clone)]
pub(crate) struct RowTree {
    pub(crate) costs: Vec<f64>,
    ends: Vec<u32>,
    pred: Vec<u32>,
    order: Vec<u32>,
}

impl RowTree {
    /// Whether the tree path to any destination flagged in `wanted` uses
    /// `section`. `scratch` is reused between calls.
    pub(crate) fn routes_through(
        &self,
        g: &ExpandedGraph,
        section: usize,
        wanted: &[bool],
        scratch: &mut Vec<bool>,
    ) -> bool {
        let [x, y] = g.section_arcs(section);
        scratch.clear();
        scratch.resize(self.pred.len(), false);
        // Settle order visits every tree parent before its children.
        for &n in &self.order {
            let p = self.pred[n as usize];
            if p != NO_ARC {
                let p = p as usize;
                scratch[n as usize] = p == x || p == y || scratch[g.arcs()[p].from];
            }
        }
        self.ends
            .iter()
            .zip(wanted)
            .any(|(&e, &w)| w && e != NO_ARC && scratch[e as usize])
    }
}

fn eligible_position(g: &ExpandedGraph, id: &str) -> Result<usize> {
    let pos = g.station_position(id)?;
    if !g.stations()[pos].kind.is_eligible() {
        return Err(Error::IneligibleStation(id.to_string()));
    }
    Ok(pos)
}

/// Shortest path between two eligible stations.
pub fn shortest_path(view: &GraphView<'_>, a: &str, b: &str) -> Result<PathResult> {
    let g = view.graph();
    let from = eligible_position(g, a)?;
    let to = eligible_position(g, b)?;
    if from == to {
        return Err(Error::SameStation(a.to_string()));
    }
    let mut search = SingleSource::new(g.nodes().len());
    search.run(view, from, true);
    Ok(match search.best_arrival(g, to, true) {
        None => PathResult {
            cost: None,
            sections: Vec::new(),
            reversals: 0,
        },
        Some(port) => {
            let (sections, reversals) = search.walk_back(g, port);
            PathResult {
                cost: Some(search.dist(port)),
                sections: sections.into_iter().map(|s| g.section_ids()[s].clone()).collect(),
                reversals,
            }
        }
    })
}

/// All-pairs costs and path membership over unordered station pairs.
///
/// Pairs are stored in condensed upper-triangular order: (0,1), (0,2), …,
/// (1,2), … over [`PathMatrix::origins`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathMatrix {
    pub weight_kind: WeightKind,
    pub origins: Vec<String>,
    pub section_ids: Vec<String>,
    /// `f64::INFINITY` marks an unreachable pair.
    pub costs: Vec<f64>,
    /// Sorted, de-duplicated section indices on each pair's chosen path.
    pub usage: Vec<Vec<u32>>,
}

/// Index of pair `(i, j)`, `i < j`, among `n` origins.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl PathMatrix {
    pub fn pair_count(&self) -> usize {
        self.costs.len()
    }

    /// Iterates `(origin i, origin j, pair index)` in storage order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.origins.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, pair_index(n, i, j))))
    }

    pub fn cost(&self, a: &str, b: &str) -> Result<Option<f64>> {
        let find = |id: &str| {
            self.origins
                .iter()
                .position(|o| o == id)
                .ok_or_else(|| Error::UnknownStation(id.to_string()))
        };
        let (i, j) = (find(a)?, find(b)?);
        if i == j {
            return Err(Error::SameStation(a.to_string()));
        }
        let c = self.costs[pair_index(self.origins.len(), i.min(j), i.max(j))];
        Ok(c.is_finite().then_some(c))
    }

    pub fn pair_label(&self, pair: usize) -> (String, String) {
        let (i, j, _) = self.pairs().nth(pair).expect("pair index in range");
        (self.origins[i].clone(), self.origins[j].clone())
    }
}

fn compute(view: &GraphView<'_>, origins: &[usize], track_paths: bool) -> (Vec<f64>, Vec<Vec<u32>>) {
    let g = view.graph();
    let n = origins.len();
    if n < 2 {
        return (Vec::new(), Vec::new());
    }
    let rows: Vec<(Vec<f64>, Vec<Vec<u32>>)> = (0..n - 1)
        .into_par_iter()
        .map_init(
            || SingleSource::new(g.nodes().len()),
            |search, i| {
                search.run(view, origins[i], track_paths);
                let mut costs = Vec::with_capacity(n - i - 1);
                let mut usage = Vec::new();
                for &dest in &origins[i + 1..] {
                    if track_paths {
                        match search.best_arrival(g, dest, true) {
                            Some(port) => {
                                costs.push(search.dist(port));
                                let (mut secs, _) = search.walk_back(g, port);
                                secs.sort_unstable();
                                secs.dedup();
                                usage.push(secs.into_iter().map(|s| s as u32).collect());
                            }
                            None => {
                                costs.push(f64::INFINITY);
                                usage.push(Vec::new());
                            }
                        }
                    } else {
                        costs.push(search.cost_to(dest));
                    }
                }
                (costs, usage)
            },
        )
        .collect();
    let mut costs = Vec::with_capacity(pair_count(n));
    let mut usage = Vec::with_capacity(if track_paths { pair_count(n) } else { 0 });
    for (c, u) in rows {
        costs.extend(c);
        usage.extend(u);
    }
    (costs, usage)
}

/// All-pairs matrix over the graph's eligible stations.
pub fn all_pairs(view: &GraphView<'_>) -> PathMatrix {
    let origins = view.graph().eligible_stations();
    all_pairs_among(view, &origins)
}

/// All-pairs matrix over an explicit list of station positions.
pub fn all_pairs_among(view: &GraphView<'_>, origins: &[usize]) -> PathMatrix {
    let g = view.graph();
    let (costs, usage) = compute(view, origins, true);
    PathMatrix {
        weight_kind: g.weight_kind(),
        origins: origins.iter().map(|&o| g.stations()[o].id.clone()).collect(),
        section_ids: g.section_ids().to_vec(),
        costs,
        usage,
    }
}

/// Pair costs only, in the same order as [`PathMatrix::costs`]. Skips path
/// bookkeeping, so it is the variant used for disruption sweeps.
pub fn all_pair_costs(view: &GraphView<'_>, origins: &[usize]) -> Vec<f64> {
    compute(view, origins, false).0
}

/// Sum of pair costs; fails when any pair is unreachable.
pub fn total_cost(m: &PathMatrix) -> Result<f64> {
    match sum_costs(&m.costs) {
        Some(total) => Ok(total),
        None => {
            let pair = m.costs.iter().position(|c| c.is_infinite()).unwrap();
            let (a, b) = m.pair_label(pair);
            Err(Error::DisconnectedNetwork(format!("{a} cannot reach {b}")))
        }
    }
}

/// Sum of reciprocal pair costs, unreachable pairs contributing 0.
pub fn reciprocal_total(m: &PathMatrix) -> Result<f64> {
    if let Some(pair) = m.costs.iter().position(|&c| c == 0.0) {
        let (a, b) = m.pair_label(pair);
        return Err(Error::ZeroCostPair { a, b });
    }
    Ok(sum_reciprocals(&m.costs))
}

/// Sum in storage order, `None` if any entry is infinite.
pub fn sum_costs(costs: &[f64]) -> Option<f64> {
    let mut total = 0.0;
    for &c in costs {
        if c.is_infinite() {
            return None;
        }
        total += c;
    }
    Some(total)
}

pub fn sum_reciprocals(costs: &[f64]) -> f64 {
    costs.iter().map(|&c| reciprocal(c)).sum()
}

/// `1/c`, with an unreachable pair mapped to 0.
pub fn reciprocal(c: f64) -> f64 {
    if c.is_finite() {
        1.0 / c
    } else {
        0.0
    }
}
