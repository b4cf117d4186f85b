//! Network Robustness Index and redundancy indices.
//!
//! With `c` the total cost over all station pairs, `c^u` the total after
//! removing section `u` and `c^{uv}` after removing both `u` and `v`:
//!
//! * NRI: `q^u = c^u - c`, `q^{uv} = c^{uv} - c`.
//! * Plain redundancy of `u` for `v`: `r^{uv} = c^{uv} - c^v`, summed over
//!   the pairs whose undisrupted path avoids `u`; `r^u = Σ_v r^{uv}`.
//! * Reciprocal redundancy: the same sums over `1/cost` with the difference
//!   taken the other way round (unreachable pairs contribute 0), normalised
//!   by the reciprocal total of the undisrupted network. Unlike the plain
//!   form it stays finite when a deletion cuts the network apart.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{ExpandedGraph, WeightKind};
use crate::routing::{
    all_pair_costs, all_pairs_among, pair_index, reciprocal, sum_costs, sum_reciprocals, PathMatrix, RowTree,
    SingleSource,
};

/// A cost difference that may be unbounded because a deletion disconnected
/// some pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    Finite(f64),
    Infinite,
}

impl Measure {
    pub fn is_finite(self) -> bool {
        matches!(self, Measure::Finite(_))
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Measure::Finite(v) => Some(v),
            Measure::Infinite => None,
        }
    }

    fn from_total(total: Option<f64>) -> Measure {
        total.map_or(Measure::Infinite, Measure::Finite)
    }
}

impl std::ops::Add for Measure {
    type Output = Measure;

    fn add(self, rhs: Measure) -> Measure {
        match (self, rhs) {
            (Measure::Finite(a), Measure::Finite(b)) => Measure::Finite(a + b),
            _ => Measure::Infinite,
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Measure::Finite(v) => write!(f, "{v}"),
            Measure::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Measure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Measure::Finite(v) => s.serialize_f64(*v),
            Measure::Infinite => s.serialize_none(),
        }
    }
}

/// Which station pairs enter the redundancy sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Restriction {
    /// Only pairs whose undisrupted path does not use the target section.
    #[default]
    BaselineAvoidsTarget,
    /// Every pair, as in the bare difference of totals.
    Unrestricted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NriResult {
    pub section: String,
    pub weight_kind: WeightKind,
    pub q: Measure,
    pub finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairNriResult {
    pub sections: (String, String),
    pub weight_kind: WeightKind,
    pub q: Measure,
    pub finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerVContribution {
    pub section: String,
    /// `r^{uv}` in cost units.
    pub plain: Measure,
    /// `r^{uv'}`, never negative.
    pub reciprocal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedundancyResult {
    pub section: String,
    pub weight_kind: WeightKind,
    pub restriction: Restriction,
    /// `r^u`.
    pub r_plain: Measure,
    pub finite: bool,
    /// `Σ_v r^{uv'}` before normalisation.
    pub r_reciprocal: f64,
    /// `r^{u'}`: reciprocal sum divided by the undisrupted reciprocal total.
    pub r_u_prime: f64,
    pub per_v: Vec<PerVContribution>,
}

/// Shares one undisrupted baseline between all NRI and redundancy queries
/// on a graph.
pub struct Analyzer<'g> {
    graph: &'g ExpandedGraph,
    origins: Vec<usize>,
    baseline: PathMatrix,
    trees: Vec<RowTree>,
    total: Option<f64>,
    reciprocal_total: f64,
}

impl<'g> Analyzer<'g> {
    /// Baseline over the graph's eligible stations.
    pub fn new(graph: &'g ExpandedGraph) -> Self {
        Self::with_origins(graph, graph.eligible_stations())
    }

    pub fn with_origins(graph: &'g ExpandedGraph, origins: Vec<usize>) -> Self {
        let baseline = all_pairs_among(&graph.view(), &origins);
        let total = sum_costs(&baseline.costs);
        let reciprocal_total = sum_reciprocals(&baseline.costs);
        let view = graph.view();
        let trees = (0..origins.len().saturating_sub(1))
            .into_par_iter()
            .map_init(
                || SingleSource::new(graph.nodes().len()),
                |search, i| search.row_tree(&view, &origins, i),
            )
            .collect();
        Analyzer {
            graph,
            origins,
            baseline,
            trees,
            total,
            reciprocal_total,
        }
    }

    pub fn graph(&self) -> &'g ExpandedGraph {
        self.graph
    }

    pub fn baseline(&self) -> &PathMatrix {
        &self.baseline
    }

    /// `c`, or `None` when the undisrupted network is already disconnected.
    pub fn total(&self) -> Option<f64> {
        self.total
    }

    /// `c'`.
    pub fn reciprocal_total(&self) -> f64 {
        self.reciprocal_total
    }

    fn costs_without(&self, sections: &[usize]) -> Vec<f64> {
        all_pair_costs(&self.graph.view().without_indices(sections), &self.origins)
    }

    fn connected_total(&self) -> Result<f64> {
        self.total
            .ok_or_else(|| Error::DisconnectedNetwork("undisrupted network has unreachable pairs".into()))
    }

    fn q_without(&self, sections: &[usize]) -> Result<Measure> {
        let c = self.connected_total()?;
        Ok(match sum_costs(&self.costs_without(sections)) {
            Some(cu) => Measure::Finite(cu - c),
            None => Measure::Infinite,
        })
    }

    pub fn nri(&self, u: &str) -> Result<NriResult> {
        let ui = self.graph.section_position(u)?;
        let q = self.q_without(&[ui])?;
        Ok(NriResult {
            section: u.to_string(),
            weight_kind: self.graph.weight_kind(),
            q,
            finite: q.is_finite(),
        })
    }

    /// NRI of every section, in section order.
    pub fn nri_all(&self) -> Result<Vec<NriResult>> {
        let c = self.connected_total()?;
        let ids = self.graph.section_ids();
        Ok((0..ids.len())
            .into_par_iter()
            .map(|u| {
                let q = match sum_costs(&self.costs_without(&[u])) {
                    Some(cu) => Measure::Finite(cu - c),
                    None => Measure::Infinite,
                };
                NriResult {
                    section: ids[u].clone(),
                    weight_kind: self.graph.weight_kind(),
                    q,
                    finite: q.is_finite(),
                }
            })
            .collect())
    }

    pub fn nri_pair(&self, u: &str, v: &str) -> Result<PairNriResult> {
        if u == v {
            return Err(Error::SameSection(u.to_string()));
        }
        let ui = self.graph.section_position(u)?;
        let vi = self.graph.section_position(v)?;
        let q = self.q_without(&[ui, vi])?;
        Ok(PairNriResult {
            sections: (u.to_string(), v.to_string()),
            weight_kind: self.graph.weight_kind(),
            q,
            finite: q.is_finite(),
        })
    }

    fn considered_pairs(&self, u: usize, restriction: Restriction) -> Vec<bool> {
        match restriction {
            Restriction::Unrestricted => vec![true; self.baseline.pair_count()],
            Restriction::BaselineAvoidsTarget => self
                .baseline
                .usage
                .iter()
                .map(|used| used.binary_search(&(u as u32)).is_err())
                .collect(),
        }
    }

    pub fn redundancy(&self, u: &str, restriction: Restriction) -> Result<RedundancyResult> {
        Ok(self.redundancy_sweep(&[u], restriction)?.remove(0))
    }

    /// Redundancy of several targets. Every single-deletion variant is
    /// computed once and shared by all targets; variants run in parallel
    /// and are reduced in section order, so results do not depend on the
    /// thread count or on the order of `targets`.
    pub fn redundancy_sweep<S: AsRef<str>>(
        &self,
        targets: &[S],
        restriction: Restriction,
    ) -> Result<Vec<RedundancyResult>> {
        if targets.is_empty() {
            return Err(Error::Config("redundancy sweep needs at least one target".into()));
        }
        let target_idx: Vec<usize> = targets
            .iter()
            .map(|t| self.graph.section_position(t.as_ref()))
            .collect::<Result<_>>()?;
        let considered: Vec<Vec<bool>> = target_idx
            .iter()
            .map(|&u| self.considered_pairs(u, restriction))
            .collect();
        let sections = self.graph.section_count();

        let rows = self.trees.len();
        let all = vec![true; self.baseline.pair_count()];
        let row_start: Vec<usize> = (0..rows).map(|i| pair_index(self.origins.len(), i, i + 1)).collect();
        let g = self.graph;

        // contributions[v][t] = (plain, reciprocal) of target t for deleted v.
        // Only origins whose tree routes a relevant pair through a deleted
        // section are searched again; every other row is reused as is.
        let contributions: Vec<Vec<Option<(Measure, f64)>>> = (0..sections)
            .into_par_iter()
            .map_init(
                || (SingleSource::new(g.nodes().len()), Vec::new()),
                |(search, scratch), v| {
                    if target_idx.iter().all(|&u| u == v) {
                        return vec![None; target_idx.len()];
                    }
                    let view_v = g.view().without_indices(&[v]);
                    let trees_v: Vec<RowTree> = (0..rows)
                        .map(|i| {
                            let wanted = &all[row_start[i]..row_start[i] + self.trees[i].costs.len()];
                            if self.trees[i].routes_through(g, v, wanted, scratch) {
                                search.row_tree(&view_v, &self.origins, i)
                            } else {
                                self.trees[i].clone()
                            }
                        })
                        .collect();
                    let cv: Vec<f64> = trees_v.iter().flat_map(|t| t.costs.iter().copied()).collect();
                    target_idx
                        .iter()
                        .zip(&considered)
                        .map(|(&u, mask)| {
                            (u != v).then(|| {
                                let view_uv = g.view().without_indices(&[u, v]);
                                let mut cuv = Vec::with_capacity(cv.len());
                                for (i, t) in trees_v.iter().enumerate() {
                                    let wanted = &mask[row_start[i]..row_start[i] + t.costs.len()];
                                    if t.routes_through(g, u, wanted, scratch) {
                                        cuv.extend(search.row_costs(&view_uv, &self.origins, i));
                                    } else {
                                        // Pairs outside the mask may be stale here; they are never read.
                                        cuv.extend_from_slice(&t.costs);
                                    }
                                }
                                pair_contribution(&cv, &cuv, mask)
                            })
                        })
                        .collect()
                },
            )
            .collect();

        let ids = self.graph.section_ids();
        Ok(target_idx
            .iter()
            .enumerate()
            .map(|(t, &u)| {
                let mut r_plain = Measure::Finite(0.0);
                let mut r_reciprocal = 0.0;
                let mut per_v = Vec::with_capacity(sections.saturating_sub(1));
                for (v, row) in contributions.iter().enumerate() {
                    if let Some((plain, recip)) = row[t] {
                        r_plain = r_plain + plain;
                        r_reciprocal += recip;
                        per_v.push(PerVContribution {
                            section: ids[v].clone(),
                            plain,
                            reciprocal: recip,
                        });
                    }
                }
                let r_u_prime = if self.reciprocal_total > 0.0 {
                    r_reciprocal / self.reciprocal_total
                } else {
                    0.0
                };
                RedundancyResult {
                    section: ids[u].clone(),
                    weight_kind: self.graph.weight_kind(),
                    restriction,
                    r_plain,
                    finite: r_plain.is_finite(),
                    r_reciprocal,
                    r_u_prime,
                    per_v,
                }
            })
            .collect())
    }
}

/// Plain and reciprocal contribution of one `(u, v)` combination, summed
/// over the considered pairs in storage order.
fn pair_contribution(cv: &[f64], cuv: &[f64], considered: &[bool]) -> (Measure, f64) {
    let mut plain = Measure::Finite(0.0);
    let mut recip = 0.0;
    for ((&a, &b), &keep) in cv.iter().zip(cuv).zip(considered) {
        if !keep {
            continue;
        }
        // A pair already cut off without v cannot get any worse.
        if a.is_finite() {
            plain = plain + Measure::from_total(b.is_finite().then_some(b - a));
        }
        recip += reciprocal(a) - reciprocal(b);
    }
    (plain, recip)
}
