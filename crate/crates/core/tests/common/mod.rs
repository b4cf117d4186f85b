//! Test-only oracle and random network generators.
//!
//! The oracle rebuilds the port graph straight from the raw network and
//! enumerates port-walks depth-first without reusing an arc, so it shares
//! no code with the library's expansion or search.

#![allow(dead_code)]

use std::collections::HashSet;

use railnet::{Endpoint, RawNetwork, SectionSpec, Side, StationKind, StationSpec, WeightKind};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
struct OracleArc {
    from: usize,
    to: usize,
    weight: f64,
}

fn port(station: usize, side: Side, departure: bool) -> usize {
    station * 4 + if side == Side::L { 0 } else { 2 } + usize::from(departure)
}

/// All-pairs costs over eligible stations (condensed order), `INFINITY`
/// for unreachable pairs. Sections listed in `removed` are skipped.
pub fn oracle_costs(net: &RawNetwork, kind: WeightKind, removed: &[&str]) -> Vec<f64> {
    let removed: HashSet<&str> = removed.iter().copied().collect();
    let pos = |id: &str| net.stations.iter().position(|s| s.id == id).unwrap();
    let mut arcs = Vec::new();
    for s in &net.sections {
        if removed.contains(s.id.as_str()) {
            continue;
        }
        let w = match kind {
            WeightKind::Distance => s.length_km,
            WeightKind::Time => s.length_km / s.line_speed_kmh * 60.0,
        };
        let (a, b) = (pos(&s.end_a.station), pos(&s.end_b.station));
        arcs.push(OracleArc {
            from: port(a, s.end_a.side, true),
            to: port(b, s.end_b.side, false),
            weight: w,
        });
        arcs.push(OracleArc {
            from: port(b, s.end_b.side, true),
            to: port(a, s.end_a.side, false),
            weight: w,
        });
    }
    for (i, st) in net.stations.iter().enumerate() {
        for side in [Side::L, Side::R] {
            let other = if side == Side::L { Side::R } else { Side::L };
            arcs.push(OracleArc {
                from: port(i, side, false),
                to: port(i, other, true),
                weight: 0.0,
            });
            if st.kind != StationKind::Wye {
                let w = if kind == WeightKind::Time {
                    st.reversal_penalty
                } else {
                    0.0
                };
                arcs.push(OracleArc {
                    from: port(i, side, false),
                    to: port(i, side, true),
                    weight: w,
                });
            }
        }
    }
    let nodes = net.stations.len() * 4;
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (i, a) in arcs.iter().enumerate() {
        out[a.from].push(i);
    }
    let eligible: Vec<usize> = (0..net.stations.len())
        .filter(|&i| net.stations[i].kind == StationKind::Station)
        .collect();
    let mut costs = Vec::new();
    for (k, &a) in eligible.iter().enumerate() {
        let best = walks_from(a, &arcs, &out, nodes);
        for &b in &eligible[k + 1..] {
            costs.push(best[port(b, Side::L, false)].min(best[port(b, Side::R, false)]));
        }
    }
    costs
}

/// Minimum walk cost to every port, enumerating walks without repeated arcs.
/// A branch stops once it cannot improve on the best cost already seen at
/// its current port.
fn walks_from(origin: usize, arcs: &[OracleArc], out: &[Vec<usize>], nodes: usize) -> Vec<f64> {
    let mut best = vec![f64::INFINITY; nodes];
    let mut used = vec![false; arcs.len()];
    fn dfs(node: usize, cost: f64, arcs: &[OracleArc], out: &[Vec<usize>], used: &mut [bool], best: &mut [f64]) {
        if cost > best[node] {
            return;
        }
        best[node] = cost;
        for &ai in &out[node] {
            if used[ai] {
                continue;
            }
            let next = cost + arcs[ai].weight;
            if next >= best[arcs[ai].to] && best[arcs[ai].to].is_finite() {
                continue;
            }
            used[ai] = true;
            dfs(arcs[ai].to, next, arcs, out, used, best);
            used[ai] = false;
        }
    }
    for side in [Side::L, Side::R] {
        dfs(port(origin, side, true), 0.0, arcs, out, &mut used, &mut best);
    }
    best
}

pub fn oracle_total(costs: &[f64]) -> Option<f64> {
    if costs.iter().any(|c| c.is_infinite()) {
        None
    } else {
        Some(costs.iter().sum())
    }
}

pub fn oracle_reciprocal(costs: &[f64]) -> f64 {
    costs.iter().map(|&c| if c.is_finite() { 1.0 / c } else { 0.0 }).sum()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

pub fn costs_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(&x, &y)| (x.is_infinite() && y.is_infinite()) || rel_close(x, y, tol))
}

#[derive(Clone, Copy, Debug)]
pub struct GenOptions {
    pub max_stations: usize,
    pub max_sections: usize,
    /// Integer lengths and speeds from {30, 60, 120} so every cost is exact.
    pub integer_weights: bool,
    pub allow_wyes: bool,
    pub allow_auxiliary: bool,
    pub connected: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            max_stations: 12,
            max_sections: 20,
            integer_weights: true,
            allow_wyes: true,
            allow_auxiliary: true,
            connected: false,
        }
    }
}

fn random_side(rng: &mut ChaCha8Rng) -> Side {
    if rng.random_bool(0.5) {
        Side::L
    } else {
        Side::R
    }
}

fn random_weights(rng: &mut ChaCha8Rng, integer: bool) -> (f64, f64) {
    if integer {
        let len = rng.random_range(1..=30) as f64;
        let speed = *[30.0, 60.0, 120.0].choose(rng).unwrap();
        (len, speed)
    } else {
        (rng.random_range(0.5..40.0), rng.random_range(20.0..160.0))
    }
}

pub fn random_network(seed: u64, opts: GenOptions) -> RawNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=opts.max_stations);
    let mut stations = Vec::with_capacity(n);
    for i in 0..n {
        let mut st = StationSpec::new(format!("st{i:02}"));
        st.reversal_penalty = if rng.random_bool(0.5) { 15.0 } else { 0.0 };
        let roll: f64 = rng.random();
        if opts.allow_wyes && roll < 0.12 {
            st.kind = StationKind::Wye;
        } else if opts.allow_auxiliary && roll < 0.2 {
            st.kind = StationKind::Auxiliary;
        }
        stations.push(st);
    }
    let m = rng.random_range(1..=opts.max_sections.max(n - 1));
    let mut sections = Vec::with_capacity(m);
    let add = |rng: &mut ChaCha8Rng, a: usize, b: usize, sections: &mut Vec<SectionSpec>| {
        let (len, speed) = random_weights(rng, opts.integer_weights);
        let id = format!("e{:02}", sections.len());
        sections.push(SectionSpec::new(
            id,
            Endpoint::new(format!("st{a:02}"), random_side(rng)),
            Endpoint::new(format!("st{b:02}"), random_side(rng)),
            len,
            speed,
        ));
    };
    if opts.connected {
        for b in 1..n {
            let a = rng.random_range(0..b);
            add(&mut rng, a, b, &mut sections);
        }
    }
    while sections.len() < m.max(if opts.connected { n - 1 } else { 0 }) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            add(&mut rng, a, b, &mut sections);
        }
    }
    sections.truncate(opts.max_sections.max(n - 1));
    let net = RawNetwork::new(stations, sections);
    net.check().expect("generator produces valid networks");
    net
}

/// A network built around chains of joints so contraction has work to do.
pub fn random_contractible_network(seed: u64) -> RawNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let hubs = rng.random_range(2..=4);
    let mut stations: Vec<StationSpec> = (0..hubs)
        .map(|i| {
            let mut s = StationSpec::new(format!("h{i}"));
            s.reversal_penalty = if rng.random_bool(0.5) { 15.0 } else { 0.0 };
            if rng.random_bool(0.15) {
                s.kind = StationKind::Wye;
            }
            s
        })
        .collect();
    let mut sections = Vec::new();
    let chains = rng.random_range(hubs - 1..=hubs + 2);
    for c in 0..chains {
        let a = if c < hubs - 1 { c } else { rng.random_range(0..hubs) };
        let mut b = if c < hubs - 1 { c + 1 } else { rng.random_range(0..hubs) };
        if a == b {
            b = (a + 1) % hubs;
        }
        let joints = rng.random_range(1..=3);
        let mut prev = Endpoint::new(format!("h{a}"), random_side(&mut rng));
        for j in 0..joints {
            let id = format!("j{c}_{j}");
            let mut s = StationSpec::new(&id);
            s.reversal_penalty = if rng.random_bool(0.5) { 15.0 } else { 0.0 };
            s.keep_in_contraction = rng.random_bool(0.1);
            stations.push(s);
            let entry = random_side(&mut rng);
            // Mostly pass-through joints, sometimes a same-side one.
            let exit = if rng.random_bool(0.85) { entry.opposite() } else { entry };
            let (len, speed) = random_weights(&mut rng, false);
            sections.push(SectionSpec::new(
                format!("c{c}_{j}"),
                prev.clone(),
                Endpoint::new(&id, entry),
                len,
                speed,
            ));
            prev = Endpoint::new(&id, exit);
        }
        let (len, speed) = random_weights(&mut rng, false);
        sections.push(SectionSpec::new(
            format!("c{c}_end"),
            prev,
            Endpoint::new(format!("h{b}"), random_side(&mut rng)),
            len,
            speed,
        ));
    }
    let net = RawNetwork::new(stations, sections);
    net.check().expect("valid contractible network");
    net
}

/// Synthetic network of roughly the size of a national railway: a grid-ish
/// backbone with extra chords; every `wye_every`-th station is a wye.
pub fn large_network(stations: usize, sections: usize, wye_every: usize, seed: u64) -> RawNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let st: Vec<StationSpec> = (0..stations)
        .map(|i| {
            let s = StationSpec::new(format!("S{i:03}"));
            if i % wye_every == wye_every - 1 {
                s.with_kind(StationKind::Wye)
            } else {
                s
            }
        })
        .collect();
    let mut secs = Vec::with_capacity(sections);
    let add = |rng: &mut ChaCha8Rng, a: usize, b: usize, secs: &mut Vec<SectionSpec>| {
        let id = format!("L{:03}", secs.len());
        secs.push(SectionSpec::new(
            id,
            Endpoint::new(format!("S{a:03}"), random_side(rng)),
            Endpoint::new(format!("S{b:03}"), random_side(rng)),
            rng.random_range(3.0..40.0),
            rng.random_range(40.0..160.0),
        ));
    };
    for b in 1..stations {
        // Attach to a recent station so the tree is long and thin like a rail map.
        let lo = b.saturating_sub(8);
        let a = rng.random_range(lo..b);
        add(&mut rng, a, b, &mut secs);
    }
    while secs.len() < sections {
        let a = rng.random_range(0..stations);
        let b = rng.random_range(0..stations);
        if a != b && a.abs_diff(b) < 40 {
            add(&mut rng, a, b, &mut secs);
        }
    }
    RawNetwork::new(st, secs)
}

/// Weakly-connected component count over stations, ignoring removed sections.
pub fn eligible_components_split(net: &RawNetwork, removed: &[&str]) -> bool {
    let n = net.stations.len();
    let pos = |id: &str| net.stations.iter().position(|s| s.id == id).unwrap();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for s in &net.sections {
        if removed.contains(&s.id.as_str()) {
            continue;
        }
        let (a, b) = (
            find(&mut parent, pos(&s.end_a.station)),
            find(&mut parent, pos(&s.end_b.station)),
        );
        parent[a] = b;
    }
    let roots: HashSet<usize> = (0..n)
        .filter(|&i| net.stations[i].kind == StationKind::Station)
        .map(|i| find(&mut parent, i))
        .collect();
    roots.len() > 1
}
