//! Excess, hyperaction segmentation/classification and drift statistics.
//!
//! A hyperaction is the group of actions between two consecutive snapshots
//! (states of minimum degree at least 3); it always opens with a max-edge
//! removal. Classification matches each group against the structural
//! templates of the good hyperaction types, using the snapshot that precedes
//! it. Anything matching no template is `OtherBad`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{integrity, Result};
use crate::multigraph::{MultiGraph, VertexId};
use crate::reduce::{apply, Action, ContractionRecord, ReduceTrace};

/// ex_ℓ(G) = Σ_v max(d(v) − ℓ, 0), recomputed from scratch.
pub fn excess(g: &MultiGraph, threshold: usize) -> u64 {
    g.live_vertices().map(|v| g.degree(v).saturating_sub(threshold) as u64).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HyperactionType {
    One,
    Two,
    ThreeA,
    ThreeB,
    ThreeC,
    Four,
    Five,
    ThirtyThree,
    ThirtyFour,
    OtherBad,
}

impl HyperactionType {
    pub const ALL: [HyperactionType; 10] = [
        HyperactionType::One,
        HyperactionType::Two,
        HyperactionType::ThreeA,
        HyperactionType::ThreeB,
        HyperactionType::ThreeC,
        HyperactionType::Four,
        HyperactionType::Five,
        HyperactionType::ThirtyThree,
        HyperactionType::ThirtyFour,
        HyperactionType::OtherBad,
    ];

    pub fn is_good(self) -> bool {
        !matches!(self, HyperactionType::ThreeC | HyperactionType::OtherBad)
    }

    pub fn label(self) -> &'static str {
        match self {
            HyperactionType::One => "1",
            HyperactionType::Two => "2",
            HyperactionType::ThreeA => "3a",
            HyperactionType::ThreeB => "3b",
            HyperactionType::ThreeC => "3c",
            HyperactionType::Four => "4",
            HyperactionType::Five => "5",
            HyperactionType::ThirtyThree => "33",
            HyperactionType::ThirtyFour => "34",
            HyperactionType::OtherBad => "other-bad",
        }
    }
}

impl fmt::Display for HyperactionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One hyperaction: the actions taking snapshot `start_snapshot` to `end_snapshot`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperactionRecord {
    pub start_snapshot: usize,
    pub end_snapshot: usize,
    /// Index range into the trace's action list.
    pub actions: Range<usize>,
    pub delta_ex4: i64,
    pub delta_n: i64,
    pub delta_e: i64,
}

impl HyperactionRecord {
    pub fn actions<'t>(&self, trace: &'t ReduceTrace) -> &'t [Action] {
        &trace.actions[self.actions.clone()]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    /// Clean-up actions applied to the input before its first snapshot.
    pub preamble: Option<Range<usize>>,
    pub records: Vec<HyperactionRecord>,
}

pub fn segment(trace: &ReduceTrace) -> Result<Segmentation> {
    let snaps = &trace.snapshots;
    let Some(first) = snaps.first() else {
        if trace.actions.is_empty() {
            return Ok(Segmentation { preamble: None, records: Vec::new() });
        }
        return Err(integrity("trace has actions but no snapshots"));
    };
    let preamble = (first.action_index > 0).then_some(0..first.action_index);
    if let Some(r) = &preamble {
        if trace.actions[r.clone()].iter().any(Action::is_max_edge_removal) {
            return Err(integrity("max-edge removal before the first snapshot"));
        }
    }
    let mut records = Vec::with_capacity(snaps.len().saturating_sub(1));
    for (i, pair) in snaps.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        if b.action_index <= a.action_index || b.action_index > trace.actions.len() {
            return Err(integrity(format!("snapshot {} does not advance", i + 1)));
        }
        let range = a.action_index..b.action_index;
        let acts = &trace.actions[range.clone()];
        if !acts[0].is_max_edge_removal() || acts[1..].iter().any(Action::is_max_edge_removal) {
            return Err(integrity(format!("hyperaction {i} is not a single max-edge-led group")));
        }
        records.push(HyperactionRecord {
            start_snapshot: i,
            end_snapshot: i + 1,
            actions: range,
            delta_ex4: b.ex4 as i64 - a.ex4 as i64,
            delta_n: b.vertices as i64 - a.vertices as i64,
            delta_e: b.edges as i64 - a.edges as i64,
        });
    }
    if snaps.last().map(|s| s.action_index) != Some(trace.actions.len()) {
        return Err(integrity("actions recorded after the last snapshot"));
    }
    Ok(Segmentation { preamble, records })
}

/// Classifies a hyperaction from its actions and the snapshot preceding it.
///
/// Templates are tried in the order 2, 4, 34, 5, 33, 3x, 1.
pub fn classify(actions: &[Action], pre: &MultiGraph) -> HyperactionType {
    let Some(&Action::MaxEdgeRemoval { max_vertex: v, other: u, .. }) = actions.first() else {
        return HyperactionType::OtherBad;
    };
    let rest = &actions[1..];
    if let [Action::AutoCorrection(_)] = rest {
        return HyperactionType::Two;
    }
    let contractions: Option<Vec<&ContractionRecord>> = rest
        .iter()
        .map(|a| match a {
            Action::Contraction(c) if !c.is_bad => Some(c),
            _ => None,
        })
        .collect();
    let Some(cs) = contractions else {
        return HyperactionType::OtherBad;
    };
    let ctx = Context { g: pre, v, u };
    match cs.len() {
        0 => HyperactionType::One,
        1 => three_subtype(cs[0]),
        2 if ctx.is_four(&cs) => HyperactionType::Four,
        3 if ctx.is_thirty_four(&cs) => HyperactionType::ThirtyFour,
        2 if ctx.is_five(&cs) => HyperactionType::Five,
        2 if ctx.is_thirty_three(&cs) => HyperactionType::ThirtyThree,
        _ => HyperactionType::OtherBad,
    }
}

/// η = (d(a) + d(b) − 2 − d(v_c)) / 2 from the recorded degrees.
fn three_subtype(c: &ContractionRecord) -> HyperactionType {
    if c.members.len() != 3 {
        return HyperactionType::OtherBad;
    }
    let da = c.member_degrees[1] as i64;
    let db = c.member_degrees[2] as i64;
    let dc = c.external_map.len() as i64;
    match (da + db - 2 - dc) / 2 {
        0 => HyperactionType::ThreeA,
        1 => HyperactionType::ThreeB,
        _ => HyperactionType::ThreeC,
    }
}

fn same_set(members: &[VertexId], expected: &[VertexId]) -> bool {
    members.len() == expected.len() && expected.iter().all(|x| members.contains(x))
}

fn all_distinct(xs: &[VertexId]) -> bool {
    xs.iter().enumerate().all(|(i, x)| !xs[..i].contains(x))
}

struct Context<'a> {
    g: &'a MultiGraph,
    /// The max-degree endpoint of the removed edge.
    v: VertexId,
    u: VertexId,
}

/// Vertices of a Type-4 style triangle hanging off `u`.
struct TriangleArm {
    x1: VertexId,
    x2: VertexId,
    w1: VertexId,
    w2: VertexId,
}

impl Context<'_> {
    fn deg(&self, x: VertexId) -> usize {
        self.g.degree(x)
    }

    /// Neighbours of `x` other than `skip`, when `x` is a simple degree-3 vertex.
    fn other_two(&self, x: VertexId, skip: VertexId) -> Option<(VertexId, VertexId)> {
        let n = self.g.neighbors(x);
        if self.deg(x) != 3 || n.len() != 3 || !n.contains(&skip) {
            return None;
        }
        let mut it = n.into_iter().filter(|&y| y != skip);
        Some((it.next()?, it.next()?))
    }

    /// N(u) = {v, x1, x2}, N(x1) = {u, x2, w1}, N(x2) = {u, x1, w2}, all degree 3.
    fn triangle_arm(&self, u: VertexId, v: VertexId) -> Option<TriangleArm> {
        let (x1, x2) = self.other_two(u, v)?;
        let (a, b) = self.other_two(x1, u)?;
        let w1 = if a == x2 { b } else if b == x2 { a } else { return None };
        let (a, b) = self.other_two(x2, u)?;
        let w2 = if a == x1 { b } else if b == x1 { a } else { return None };
        all_distinct(&[v, u, x1, x2, w1, w2]).then_some(TriangleArm { x1, x2, w1, w2 })
    }

    /// `first` contracts {u, x1, x2} around `u`, `second` contracts the result with {w1, w2}.
    fn is_arm_chain(&self, arm: &TriangleArm, first: &ContractionRecord, second: &ContractionRecord) -> bool {
        first.center == self.u
            && same_set(&first.members, &[self.u, arm.x1, arm.x2])
            && second.center == first.new_vertex
            && same_set(&second.members, &[first.new_vertex, arm.w1, arm.w2])
    }

    fn is_four(&self, cs: &[&ContractionRecord]) -> bool {
        if self.deg(self.v) < 4 {
            return false;
        }
        match self.triangle_arm(self.u, self.v) {
            Some(arm) => self.is_arm_chain(&arm, cs[0], cs[1]),
            None => false,
        }
    }

    fn is_thirty_four(&self, cs: &[&ContractionRecord]) -> bool {
        let Some((v1, v2)) = self.other_two(self.v, self.u) else {
            return false;
        };
        let Some(arm) = self.triangle_arm(self.u, self.v) else {
            return false;
        };
        if !all_distinct(&[self.v, v1, v2, self.u, arm.x1, arm.x2, arm.w1, arm.w2]) {
            return false;
        }
        let Some(k) = cs.iter().position(|c| c.center == self.v) else {
            return false;
        };
        if !same_set(&cs[k].members, &[self.v, v1, v2]) {
            return false;
        }
        let chain: Vec<&ContractionRecord> =
            cs.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, c)| *c).collect();
        self.is_arm_chain(&arm, chain[0], chain[1])
    }

    fn is_five(&self, cs: &[&ContractionRecord]) -> bool {
        let (Some((a1, a2)), Some((b1, b2))) = (self.other_two(self.v, self.u), self.other_two(self.u, self.v))
        else {
            return false;
        };
        // x1 is the common neighbour; x2 hangs off v and z off u.
        let (x1, x2, z) = if a1 == b1 {
            (a1, a2, b2)
        } else if a1 == b2 {
            (a1, a2, b1)
        } else if a2 == b1 {
            (a2, a1, b2)
        } else if a2 == b2 {
            (a2, a1, b1)
        } else {
            return false;
        };
        let set = [self.u, self.v, x1, x2, z];
        if !all_distinct(&set) || set.iter().any(|&y| self.deg(y) != 3) {
            return false;
        }
        let mut outside: Vec<VertexId> = Vec::new();
        for y in [x1, x2, z] {
            for w in self.g.neighbors(y) {
                if !set.contains(&w) && !outside.contains(&w) {
                    outside.push(w);
                }
            }
        }
        if outside.len() < 3 {
            return false;
        }
        let (first, second) = (cs[0], cs[1]);
        if !second.members.contains(&first.new_vertex) {
            return false;
        }
        let mut absorbed: Vec<VertexId> = first.members.to_vec();
        absorbed.extend(second.members.iter().copied().filter(|&m| m != first.new_vertex));
        same_set(&absorbed, &set)
    }

    fn is_thirty_three(&self, cs: &[&ContractionRecord]) -> bool {
        let (Some((v1, v2)), Some((u1, u2))) = (self.other_two(self.v, self.u), self.other_two(self.u, self.v))
        else {
            return false;
        };
        if !all_distinct(&[self.v, v1, v2, self.u, u1, u2]) {
            return false;
        }
        let side = |c: &ContractionRecord, center: VertexId, a: VertexId, b: VertexId| {
            c.center == center && same_set(&c.members, &[center, a, b])
        };
        let (c0, c1) = (cs[0], cs[1]);
        (side(c0, self.v, v1, v2) && side(c1, self.u, u1, u2))
            || (side(c0, self.u, u1, u2) && side(c1, self.v, v1, v2))
    }
}

/// Segmentation plus per-record classification of a whole trace.
#[derive(Clone, Debug)]
pub struct TraceAnalysis {
    pub segmentation: Segmentation,
    pub types: Vec<HyperactionType>,
    /// Snapshots whose incremental ex₄ was compared against a recount.
    pub excess_checks: usize,
}

impl TraceAnalysis {
    pub fn classified(&self) -> impl Iterator<Item = (&HyperactionRecord, HyperactionType)> {
        self.segmentation.records.iter().zip(self.types.iter().copied())
    }

    /// Largest |Δex₄| among records classified good, `None` without any.
    pub fn max_abs_delta_good(&self) -> Option<u64> {
        self.classified()
            .filter(|(_, t)| t.is_good())
            .map(|(r, _)| r.delta_ex4.unsigned_abs())
            .max()
    }

    pub fn histogram(&self) -> Vec<HistogramRow> {
        let mut acc: BTreeMap<HyperactionType, (usize, i64, i64)> = BTreeMap::new();
        for (r, t) in self.classified() {
            let e = acc.entry(t).or_default();
            e.0 += 1;
            e.1 += r.delta_ex4;
            e.2 += r.delta_n;
        }
        acc.into_iter().map(|(t, (c, x, n))| HistogramRow::new(t, c, x, n)).collect()
    }
}

/// Replays `trace` from `g0`, classifying every hyperaction against its
/// preceding snapshot. Every `check_every`-th snapshot also has its ex₄
/// recomputed from scratch (0 disables the check).
pub fn analyze(g0: &MultiGraph, trace: &ReduceTrace, check_every: usize) -> Result<TraceAnalysis> {
    let segmentation = segment(trace)?;
    let mut g = g0.clone();
    let mut pos = 0usize;
    let mut types = Vec::with_capacity(segmentation.records.len());
    let mut excess_checks = 0;
    let advance = |g: &mut MultiGraph, to: usize, pos: &mut usize| -> Result<()> {
        while *pos < to {
            let prev = pos.checked_sub(1).map(|p| &trace.actions[p]);
            apply(g, &trace.actions[*pos], prev)?;
            *pos += 1;
        }
        Ok(())
    };
    for rec in &segmentation.records {
        advance(&mut g, rec.actions.start, &mut pos)?;
        if check_every > 0 && rec.start_snapshot % check_every == 0 {
            let snap = trace.snapshots[rec.start_snapshot];
            if excess(&g, 4) != snap.ex4 || g.excess4() != snap.ex4 {
                return Err(integrity(format!("ex4 mismatch at snapshot {}", rec.start_snapshot)));
            }
            excess_checks += 1;
        }
        types.push(classify(rec.actions(trace), &g));
    }
    Ok(TraceAnalysis { segmentation, types, excess_checks })
}

/// Excess series over the snapshots and the drift conditioned on ex₄ > 0.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DriftStats {
    pub series: Vec<u64>,
    /// Snapshot transitions that started from ex₄ > 0.
    pub conditional_count: usize,
    pub conditional_sum: i64,
    pub conditional_mean: Option<f64>,
    /// Largest |Δex₄| between consecutive snapshots.
    pub max_abs_delta: u64,
}

pub fn drift(trace: &ReduceTrace) -> DriftStats {
    let series: Vec<u64> = trace.snapshots.iter().map(|s| s.ex4).collect();
    let mut stats = DriftStats::default();
    for w in series.windows(2) {
        let d = w[1] as i64 - w[0] as i64;
        stats.max_abs_delta = stats.max_abs_delta.max(d.unsigned_abs());
        if w[0] > 0 {
            stats.conditional_count += 1;
            stats.conditional_sum += d;
        }
    }
    if stats.conditional_count > 0 {
        stats.conditional_mean = Some(stats.conditional_sum as f64 / stats.conditional_count as f64);
    }
    stats.series = series;
    stats
}

/// One histogram line: type, count, mean Δex₄, mean Δn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub kind: HyperactionType,
    pub count: usize,
    pub sum_delta_ex4: i64,
    pub sum_delta_n: i64,
}

impl HistogramRow {
    fn new(kind: HyperactionType, count: usize, sum_delta_ex4: i64, sum_delta_n: i64) -> Self {
        HistogramRow { kind, count, sum_delta_ex4, sum_delta_n }
    }

    pub fn mean_delta_ex4(&self) -> f64 {
        self.sum_delta_ex4 as f64 / self.count.max(1) as f64
    }

    pub fn mean_delta_n(&self) -> f64 {
        self.sum_delta_n as f64 / self.count.max(1) as f64
    }
}

/// Merges histograms from several trials.
pub fn merge_histograms<'a>(rows: impl IntoIterator<Item = &'a HistogramRow>) -> Vec<HistogramRow> {
    let mut acc: BTreeMap<HyperactionType, (usize, i64, i64)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry(r.kind).or_default();
        e.0 += r.count;
        e.1 += r.sum_delta_ex4;
        e.2 += r.sum_delta_n;
    }
    acc.into_iter().map(|(t, (c, x, n))| HistogramRow::new(t, c, x, n)).collect()
}

pub fn histogram_csv(rows: &[HistogramRow]) -> String {
    let mut out = String::from("type,count,mean_delta_ex4,mean_delta_n\n");
    for r in rows {
        out.push_str(&format!("{},{},{:.6},{:.6}\n", r.kind, r.count, r.mean_delta_ex4(), r.mean_delta_n()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configmodel::{sample_no_loops, DegreeSequence, DEFAULT_MAX_RETRIES};
    use crate::multigraph::EdgeId;
    use crate::reduce::{run, step, StopReason, StopRule};
    use crate::rng::{from_seed, trial_rng};

    fn random_graph(n: usize, p4: f64, seed: u64) -> MultiGraph {
        let (d, _) = DegreeSequence::with_deg4_fraction(n, p4).unwrap();
        sample_no_loops(&d, &mut from_seed(seed), DEFAULT_MAX_RETRIES).unwrap().into_graph(n).unwrap()
    }

    fn k4() -> MultiGraph {
        MultiGraph::build(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn excess_examples() {
        assert_eq!(excess(&k4(), 4), 0);
        // degrees (3, 3, 4, 4): two 4-bonds... build 0-1,0-2,0-3 / 1-2,1-3 / 2-3,2-3 / 3-? keep it simple:
        let g = MultiGraph::build(4, &[(0, 2), (0, 3), (0, 1), (1, 2), (1, 3), (2, 3), (2, 3)]).unwrap();
        let mut d: Vec<usize> = g.live_vertices().map(|v| g.degree(v)).collect();
        d.sort();
        assert_eq!(d, vec![3, 3, 4, 4]);
        assert_eq!(excess(&g, 3), 2);
        // one degree-6 vertex among degree-3 vertices
        let mut pairs = vec![];
        for i in 1..=6 {
            pairs.push((0, i));
        }
        // make 1..=6 degree 3 with a 6-cycle plus chords 1-4, 2-5, 3-6
        for i in 1..=6 {
            pairs.push((i, i % 6 + 1));
        }
        let g = MultiGraph::build(7, &pairs).unwrap();
        assert_eq!(g.degree(VertexId(0)), 6);
        assert_eq!(excess(&g, 4), 2);
        assert_eq!(g.excess4(), 2);
    }

    #[test]
    fn k4_hand_simulation() {
        // M{0,1}; contract the triangle around a degree-2 endpoint, which leaves
        // a parallel pair; bad contraction; isolated vertex removed.
        let g0 = k4();
        let mut g = g0.clone();
        let t = run(&mut g, &mut from_seed(1), StopRule::RunToEmpty).unwrap();
        assert_eq!(t.actions.len(), 4);
        assert!(t.actions[0].is_max_edge_removal());
        assert!(matches!(&t.actions[1], Action::Contraction(c) if !c.is_bad && c.members.len() == 3));
        assert!(t.actions[2].is_bad_contraction());
        assert!(matches!(t.actions[3], Action::Vertex0Removal { .. }));
        let s = segment(&t).unwrap();
        assert_eq!(s.preamble, None);
        assert_eq!(s.records.len(), 1);
        assert_eq!(s.records[0].actions, 0..4);
        let a = analyze(&g0, &t, 1).unwrap();
        assert_eq!(a.types, vec![HyperactionType::OtherBad]);
    }

    #[test]
    fn empty_trace_segments_to_nothing() {
        let t = ReduceTrace { actions: vec![], snapshots: vec![], stop: StopReason::Empty };
        let s = segment(&t).unwrap();
        assert!(s.records.is_empty() && s.preamble.is_none());
    }

    #[test]
    fn two_max_edge_removals_make_two_records() {
        // Two disjoint 4-bonds: δ = 4 everywhere; each removal leaves degree 3.
        let g0 = MultiGraph::build(4, &[(0, 1), (0, 1), (0, 1), (0, 1), (2, 3), (2, 3), (2, 3), (2, 3)]).unwrap();
        let mut g = g0.clone();
        let mut trace = ReduceTrace {
            actions: vec![],
            snapshots: vec![crate::reduce::Snapshot { action_index: 0, vertices: 4, edges: 8, ex4: 0 }],
            stop: StopReason::Empty,
        };
        let mut rng = from_seed(0);
        for _ in 0..2 {
            let out = step(&mut g, &mut rng).unwrap();
            assert!(out.action.is_max_edge_removal());
            assert!(out.auto_correction.is_none());
            trace.actions.push(out.action);
            trace.snapshots.push(crate::reduce::Snapshot {
                action_index: trace.actions.len(),
                vertices: g.vertex_count(),
                edges: g.edge_count(),
                ex4: g.excess4(),
            });
        }
        let s = segment(&trace).unwrap();
        assert_eq!(s.records.len(), 2);
        let a = analyze(&g0, &trace, 1).unwrap();
        assert_eq!(a.types, vec![HyperactionType::One, HyperactionType::One]);
    }

    #[test]
    fn type_one_between_degree_four_vertices() {
        let g = MultiGraph::build(2, &[(0, 1), (0, 1), (0, 1), (0, 1)]).unwrap();
        let acts = [Action::MaxEdgeRemoval { edge: EdgeId(0), max_vertex: VertexId(0), other: VertexId(1) }];
        assert_eq!(classify(&acts, &g), HyperactionType::One);
    }

    #[test]
    fn triple_bond_sequence_is_bad() {
        let g0 = MultiGraph::build(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let mut g = g0.clone();
        let t = run(&mut g, &mut from_seed(0), StopRule::RunToEmpty).unwrap();
        let a = analyze(&g0, &t, 1).unwrap();
        assert_eq!(a.types, vec![HyperactionType::OtherBad]);
    }

    /// Cubic graph where the removed edge's endpoints are far apart: two disjoint
    /// copies of a 10-vertex cubic "arm" joined by the edge {0, 10}.
    fn two_far_halves() -> MultiGraph {
        // Petersen graph minus edge {0, 1}, twice, with the freed stubs joined across.
        let mut pairs = Vec::new();
        for off in [0usize, 10] {
            for i in 0..5 {
                if i != 0 {
                    pairs.push((off + i, off + (i + 1) % 5));
                }
                pairs.push((off + i, off + i + 5));
                pairs.push((off + 5 + i, off + 5 + (i + 2) % 5));
            }
        }
        pairs.push((0, 10));
        pairs.push((1, 11));
        MultiGraph::build(20, &pairs).unwrap()
    }

    #[test]
    fn far_apart_cubic_removal_is_thirty_three() {
        let g0 = two_far_halves();
        assert_eq!(g0.min_degree(), Some(3));
        assert_eq!(g0.max_degree(), Some(3));
        let acts_prefix = Action::MaxEdgeRemoval { edge: EdgeId(28), max_vertex: VertexId(0), other: VertexId(10) };
        let mut g = g0.clone();
        // Apply the removal, then contract the two degree-2 vertices.
        g.remove_edge(EdgeId(28)).unwrap();
        let mut acts = vec![acts_prefix];
        let mut rng = from_seed(4);
        while !g.is_min_degree_at_least_3() {
            let out = step(&mut g, &mut rng).unwrap();
            acts.push(out.action);
        }
        assert_eq!(acts.len(), 3);
        assert_eq!(classify(&acts, &g0), HyperactionType::ThirtyThree);
    }

    #[test]
    fn good_records_respect_bounds() {
        for seed in 0..20u64 {
            let g0 = random_graph(3000, 0.5, seed);
            let mut g = g0.clone();
            let t = run(&mut g, &mut trial_rng(9, seed), StopRule::RunToEmpty).unwrap();
            let a = analyze(&g0, &t, 7).unwrap();
            assert!(a.excess_checks > 0);
            for (r, ty) in a.classified() {
                if ty.is_good() {
                    assert!(r.delta_ex4.abs() <= 2, "{ty}: {}", r.delta_ex4);
                    assert!(r.delta_n >= -8);
                }
                match ty {
                    HyperactionType::ThirtyThree | HyperactionType::ThirtyFour => assert_eq!(r.delta_ex4, 0),
                    HyperactionType::Five => assert!((0..=1).contains(&r.delta_ex4)),
                    _ => {}
                }
            }
            // deterministic
            let again = analyze(&g0, &t, 0).unwrap();
            assert_eq!(again.types, a.types);
        }
    }

    #[test]
    fn cubic_drift_has_no_conditioned_samples_when_ex4_stays_zero() {
        let g0 = k4();
        let mut g = g0.clone();
        let t = run(&mut g, &mut from_seed(0), StopRule::RunToEmpty).unwrap();
        let d = drift(&t);
        assert_eq!(d.series.len(), t.snapshots.len());
        assert_eq!(d.conditional_count, 0);
        assert_eq!(d.conditional_mean, None);
    }

    #[test]
    fn histogram_csv_has_header_and_rows() {
        let g0 = random_graph(2000, 0.5, 5);
        let mut g = g0.clone();
        let t = run(&mut g, &mut from_seed(5), StopRule::RunToEmpty).unwrap();
        let a = analyze(&g0, &t, 0).unwrap();
        let rows = a.histogram();
        let total: usize = rows.iter().map(|r| r.count).sum();
        assert_eq!(total, a.segmentation.records.len());
        let csv = histogram_csv(&merge_histograms(rows.iter().chain(rows.iter())));
        assert!(csv.starts_with("type,count,mean_delta_ex4,mean_delta_n\n"));
        assert_eq!(csv.lines().count(), rows.len() + 1);
    }
}
