//! The REDUCE engine.
//!
//! Each iteration applies the first applicable rule in the order
//! vertex-0 removal, vertex-1 removal, contraction, max-edge removal. A
//! max-edge removal that leaves an endpoint of degree 2 hanging off a single
//! third vertex by a parallel pair is immediately followed by an
//! auto-correction contraction of the three vertices.
//!
//! Every action records the identifiers it touched, so a trace can be
//! replayed against the input graph (checking each recorded action against a
//! re-execution) and unwound by [`crate::construct`] without re-simulating.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{integrity, invalid, Error, Result};
use crate::multigraph::{
    DegreeClass, EdgeId, ExternalEdges, IncidentList, MemberDegrees, Members, MultiGraph, PurgedEdges, VertexId,
};

/// A degree-2 contraction of `{center} ∪ N(center)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionRecord {
    pub center: VertexId,
    /// The contracted set, `center` first, then its distinct neighbours.
    pub members: Members,
    /// Degrees of `members` just before the contraction.
    pub member_degrees: MemberDegrees,
    pub new_vertex: VertexId,
    /// Internal edges with their pre-contraction endpoints.
    pub internal_purged: PurgedEdges,
    /// Edges re-attached to `new_vertex`, with the member they used to end at.
    pub external_map: ExternalEdges,
    /// Set when only two vertices were involved.
    pub is_bad: bool,
}

/// Auto-correction contraction of `{u, v, w}` after the max-edge removal of `{u, v}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutoCorrectionRecord {
    /// The degree-2 endpoint of the removed edge.
    pub u: VertexId,
    /// The other endpoint of the removed edge.
    pub v: VertexId,
    /// The vertex joined to `u` by a parallel pair.
    pub w: VertexId,
    pub new_vertex: VertexId,
    pub removed_edge: EdgeId,
    pub double_edge: (EdgeId, EdgeId),
    /// Degrees of `[u, v, w]` just before the contraction.
    pub member_degrees: MemberDegrees,
    pub internal_purged: PurgedEdges,
    pub external_map: ExternalEdges,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Vertex0Removal { v: VertexId },
    Vertex1Removal { v: VertexId, w: VertexId, matched_edge: EdgeId, other_removed: IncidentList },
    Contraction(ContractionRecord),
    /// `max_vertex` was drawn among the vertices of maximum degree, `edge`
    /// uniformly among its incident edges; `other` is the far endpoint.
    MaxEdgeRemoval { edge: EdgeId, max_vertex: VertexId, other: VertexId },
    AutoCorrection(AutoCorrectionRecord),
}

impl Action {
    pub fn is_max_edge_removal(&self) -> bool {
        matches!(self, Action::MaxEdgeRemoval { .. })
    }

    pub fn is_bad_contraction(&self) -> bool {
        matches!(self, Action::Contraction(c) if c.is_bad)
    }

    /// Change in the live vertex count caused by this action (always ≤ 0).
    pub fn vertex_delta(&self) -> isize {
        match self {
            Action::Vertex0Removal { .. } => -1,
            Action::Vertex1Removal { .. } => -2,
            Action::Contraction(c) => 1 - c.members.len() as isize,
            Action::MaxEdgeRemoval { .. } => 0,
            Action::AutoCorrection(_) => -2,
        }
    }
}

/// Summary of a snapshot state Γ_i (minimum degree ≥ 3, or empty).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Snapshot {
    /// Number of actions applied before this state was reached.
    pub action_index: usize,
    pub vertices: usize,
    pub edges: usize,
    pub ex4: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    RunToEmpty,
    /// Stop at the first snapshot with ex₄ = 0 and ω ≤ |V| ≤ 2ω. If a
    /// snapshot with |V| < ω comes first, stop there and flag the anomaly.
    SnapshotWindow { omega: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Empty,
    SnapshotFound { snapshot: usize },
    SafetyFloor { snapshot: usize },
}

impl StopReason {
    pub fn is_anomaly(self) -> bool {
        matches!(self, StopReason::SafetyFloor { .. })
    }
}

/// Ordered action log plus the snapshot sequence Γ_0, Γ_1, ….
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReduceTrace {
    pub actions: Vec<Action>,
    pub snapshots: Vec<Snapshot>,
    pub stop: StopReason,
}

impl ReduceTrace {
    /// Level index of the final state (the `j` handed to CONSTRUCT).
    pub fn stop_level(&self) -> usize {
        self.actions.len()
    }

    /// Vertex-0 removals among the first `level` actions.
    pub fn r0(&self, level: usize) -> usize {
        self.actions[..level].iter().filter(|a| matches!(a, Action::Vertex0Removal { .. })).count()
    }

    /// Bad contractions among the first `level` actions.
    pub fn r2b(&self, level: usize) -> usize {
        self.actions[..level].iter().filter(|a| a.is_bad_contraction()).count()
    }

    pub fn max_edge_removals(&self) -> usize {
        self.actions.iter().filter(|a| a.is_max_edge_removal()).count()
    }
}

/// What one REDUCE iteration did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub action: Action,
    pub auto_correction: Option<Action>,
}

/// One REDUCE iteration on a non-empty graph.
pub fn step<R: Rng + ?Sized>(g: &mut MultiGraph, rng: &mut R) -> Result<StepOutcome> {
    if g.is_empty() {
        return Err(crate::error::usage("step on the empty graph"));
    }
    let action = if !g.bucket(0).is_empty() {
        let v = g.pick_uniform(DegreeClass::Exactly(0), rng)?;
        exec_vertex0(g, v)?
    } else if !g.bucket(1).is_empty() {
        let v = g.pick_uniform(DegreeClass::Exactly(1), rng)?;
        exec_vertex1(g, v)?
    } else if !g.bucket(2).is_empty() {
        let v = g.pick_uniform(DegreeClass::Exactly(2), rng)?;
        exec_contraction(g, v)?
    } else {
        let v = g.pick_uniform(DegreeClass::Max, rng)?;
        let e = g.pick_incident_edge_uniform(v, rng)?;
        exec_max_edge(g, v, e)?
    };
    let auto_correction = match action {
        Action::MaxEdgeRemoval { edge, max_vertex, other } => {
            match auto_correction_target(g, other, max_vertex) {
                Some((u, v, w)) => Some(exec_auto_correction(g, u, v, w, edge)?),
                None => None,
            }
        }
        _ => None,
    };
    Ok(StepOutcome { action, auto_correction })
}

/// Runs REDUCE on `g` until the stop rule fires. `g` is left in the final state.
pub fn run<R: Rng + ?Sized>(g: &mut MultiGraph, rng: &mut R, stop: StopRule) -> Result<ReduceTrace> {
    if let StopRule::SnapshotWindow { omega } = stop {
        if omega == 0 {
            return Err(invalid("snapshot window needs ω ≥ 1"));
        }
    }
    let budget = g.vertex_count() + g.edge_count();
    let mut trace = ReduceTrace { actions: Vec::new(), snapshots: Vec::new(), stop: StopReason::Empty };

    if g.is_min_degree_at_least_3() {
        if let Some(reason) = take_snapshot(g, &mut trace, stop) {
            trace.stop = reason;
            return Ok(trace);
        }
    }
    while !g.is_empty() {
        let out = step(g, rng)?;
        trace.actions.push(out.action);
        if let Some(a) = out.auto_correction {
            trace.actions.push(a);
        }
        if trace.actions.len() > budget {
            return Err(integrity(format!(
                "action count {} exceeded n + e = {budget}",
                trace.actions.len()
            )));
        }
        if g.is_min_degree_at_least_3() {
            if let Some(reason) = take_snapshot(g, &mut trace, stop) {
                trace.stop = reason;
                return Ok(trace);
            }
        }
    }
    trace.stop = StopReason::Empty;
    Ok(trace)
}

fn take_snapshot(g: &MultiGraph, trace: &mut ReduceTrace, stop: StopRule) -> Option<StopReason> {
    let snap = Snapshot {
        action_index: trace.actions.len(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        ex4: g.excess4(),
    };
    trace.snapshots.push(snap);
    let idx = trace.snapshots.len() - 1;
    match stop {
        StopRule::RunToEmpty => None,
        StopRule::SnapshotWindow { omega } => {
            if snap.ex4 == 0 && snap.vertices >= omega && snap.vertices <= 2 * omega {
                Some(StopReason::SnapshotFound { snapshot: idx })
            } else if snap.vertices < omega {
                Some(StopReason::SafetyFloor { snapshot: idx })
            } else {
                None
            }
        }
    }
}

/// Reproduces the final state of a run from its input graph.
pub fn replay(g0: &MultiGraph, trace: &ReduceTrace) -> Result<MultiGraph> {
    let mut g = g0.clone();
    replay_prefix(&mut g, trace, trace.actions.len())?;
    Ok(g)
}

/// Applies the first `level` actions of `trace` to `g` (which must be the
/// run's input state), checking priorities, recorded data and snapshots.
pub fn replay_prefix(g: &mut MultiGraph, trace: &ReduceTrace, level: usize) -> Result<()> {
    if level > trace.actions.len() {
        return Err(integrity(format!("level {level} beyond trace length {}", trace.actions.len())));
    }
    let mut snaps = trace.snapshots.iter().peekable();
    check_snapshot(g, 0, &mut snaps)?;
    for (i, action) in trace.actions[..level].iter().enumerate() {
        let prev = if i > 0 { Some(&trace.actions[i - 1]) } else { None };
        apply(g, action, prev)?;
        if let Action::MaxEdgeRemoval { edge, max_vertex, other } = action {
            let pending = auto_correction_target(g, *other, *max_vertex).is_some();
            let next_is_fix = matches!(trace.actions.get(i + 1), Some(Action::AutoCorrection(_)));
            if pending != next_is_fix {
                return Err(integrity(format!("auto-correction after edge {edge} missing or spurious")));
            }
        }
        check_snapshot(g, i + 1, &mut snaps)?;
    }
    Ok(())
}

fn check_snapshot<'a, I>(g: &MultiGraph, index: usize, snaps: &mut std::iter::Peekable<I>) -> Result<()>
where
    I: Iterator<Item = &'a Snapshot>,
{
    let at_boundary = g.is_min_degree_at_least_3();
    match snaps.peek() {
        Some(s) if s.action_index == index => {
            if !at_boundary {
                return Err(integrity(format!("snapshot recorded at {index} but δ < 3 there")));
            }
            if (s.vertices, s.edges, s.ex4) != (g.vertex_count(), g.edge_count(), g.excess4()) {
                return Err(integrity(format!("snapshot at {index} does not match replayed state")));
            }
            snaps.next();
        }
        Some(s) if s.action_index < index => {
            return Err(integrity("snapshot indices out of order"));
        }
        _ => {
            // A run may stop early; boundaries past the trace prefix are fine,
            // but within the recorded range every boundary must be logged.
            if at_boundary && snaps.peek().is_some() {
                return Err(integrity(format!("state {index} has δ ≥ 3 but no snapshot")));
            }
        }
    }
    Ok(())
}

/// Re-executes one recorded action on `g` and checks that the re-execution
/// produces exactly the recorded data.
pub fn apply(g: &mut MultiGraph, action: &Action, prev: Option<&Action>) -> Result<()> {
    let lowest = g.min_degree().ok_or_else(|| integrity("action recorded on the empty graph"))?;
    let redo = match action {
        Action::Vertex0Removal { v } => {
            expect_degree(g, *v, 0)?;
            exec_vertex0(g, *v)?
        }
        Action::Vertex1Removal { v, .. } => {
            expect_priority(lowest, 1)?;
            expect_degree(g, *v, 1)?;
            exec_vertex1(g, *v)?
        }
        Action::Contraction(c) => {
            expect_priority(lowest, 2)?;
            expect_degree(g, c.center, 2)?;
            exec_contraction(g, c.center)?
        }
        Action::MaxEdgeRemoval { edge, max_vertex, .. } => {
            if lowest < 3 {
                return Err(integrity("max-edge removal recorded while δ < 3"));
            }
            expect_degree(g, *max_vertex, g.max_degree().unwrap_or(0))?;
            if !g.is_edge_live(*edge) {
                return Err(integrity(format!("edge {edge} is not live")));
            }
            let (a, b) = g.endpoints(*edge);
            if a != *max_vertex && b != *max_vertex {
                return Err(integrity(format!("edge {edge} not incident with {max_vertex}")));
            }
            exec_max_edge(g, *max_vertex, *edge)?
        }
        Action::AutoCorrection(r) => {
            let Some(Action::MaxEdgeRemoval { edge, max_vertex, other }) = prev else {
                return Err(integrity("auto-correction not preceded by a max-edge removal"));
            };
            if *edge != r.removed_edge {
                return Err(integrity("auto-correction refers to a different removed edge"));
            }
            match auto_correction_target(g, *other, *max_vertex) {
                Some((u, v, w)) if (u, v, w) == (r.u, r.v, r.w) => {
                    exec_auto_correction(g, u, v, w, *edge)?
                }
                _ => return Err(integrity("auto-correction trigger does not hold")),
            }
        }
    };
    if &redo != action {
        return Err(integrity(format!("replayed action differs from record: {redo:?} vs {action:?}")));
    }
    Ok(())
}

fn expect_priority(lowest: usize, class: usize) -> Result<()> {
    if lowest < class {
        return Err(integrity(format!(
            "degree-{class} rule recorded while a degree-{lowest} vertex exists"
        )));
    }
    Ok(())
}

fn expect_degree(g: &MultiGraph, v: VertexId, d: usize) -> Result<()> {
    if !g.is_vertex_live(v) || g.degree(v) != d {
        return Err(integrity(format!("vertex {v} is not a live degree-{d} vertex")));
    }
    Ok(())
}

fn exec_vertex0(g: &mut MultiGraph, v: VertexId) -> Result<Action> {
    g.remove_vertex(v)?;
    Ok(Action::Vertex0Removal { v })
}

fn exec_vertex1(g: &mut MultiGraph, v: VertexId) -> Result<Action> {
    let matched_edge = g.incident_edges(v)[0];
    let w = g.opposite(matched_edge, v);
    g.remove_vertex(v)?;
    let other_removed = g.remove_vertex(w)?;
    Ok(Action::Vertex1Removal { v, w, matched_edge, other_removed })
}

fn exec_contraction(g: &mut MultiGraph, center: VertexId) -> Result<Action> {
    let mut members = Members::new();
    members.push(center);
    for &e in g.incident_edges(center) {
        let x = g.opposite(e, center);
        if !members.contains(&x) {
            members.push(x);
        }
    }
    let is_bad = members.len() == 2;
    let c = g.contract(&members)?;
    Ok(Action::Contraction(ContractionRecord {
        center,
        members,
        member_degrees: c.member_degrees,
        new_vertex: c.new_vertex,
        internal_purged: c.purged,
        external_map: c.external,
        is_bad,
    }))
}

fn exec_max_edge(g: &mut MultiGraph, max_vertex: VertexId, edge: EdgeId) -> Result<Action> {
    let other = g.opposite(edge, max_vertex);
    g.remove_edge(edge)?;
    Ok(Action::MaxEdgeRemoval { edge, max_vertex, other })
}

/// After removing `edge` = {a, b}: the endpoint (checked `a` first) that now
/// has degree 2 with both edges going to one third vertex `w`.
fn auto_correction_target(
    g: &MultiGraph,
    a: VertexId,
    b: VertexId,
) -> Option<(VertexId, VertexId, VertexId)> {
    [(a, b), (b, a)].into_iter().find_map(|(u, v)| {
        if !g.is_vertex_live(u) || g.degree(u) != 2 {
            return None;
        }
        let list = g.incident_edges(u);
        let w1 = g.opposite(list[0], u);
        let w2 = g.opposite(list[1], u);
        (w1 == w2 && w1 != v).then_some((u, v, w1))
    })
}

fn exec_auto_correction(
    g: &mut MultiGraph,
    u: VertexId,
    v: VertexId,
    w: VertexId,
    removed_edge: EdgeId,
) -> Result<Action> {
    if !g.is_vertex_live(v) {
        return Err(integrity(format!("auto-correction partner {v} was consumed")));
    }
    let list = g.incident_edges(u);
    let double_edge = (list[0], list[1]);
    let c = g.contract(&[u, v, w])?;
    Ok(Action::AutoCorrection(AutoCorrectionRecord {
        u,
        v,
        w,
        new_vertex: c.new_vertex,
        removed_edge,
        double_edge,
        member_degrees: c.member_degrees,
        internal_purged: c.purged,
        external_map: c.external,
    }))
}

// ---------------------------------------------------------------------------
// Line-oriented trace serialization.

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    if items.is_empty() {
        "-".to_string()
    } else {
        items.iter().map(f).collect::<Vec<_>>().join(",")
    }
}

fn split_list<T, C: FromIterator<T> + Default>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<C> {
    if s == "-" {
        return Ok(C::default());
    }
    s.split(',').map(f).collect()
}

fn num(s: &str) -> Result<u32> {
    s.parse().map_err(|_| invalid(format!("expected an integer, got {s:?}")))
}

fn vid(s: &str) -> Result<VertexId> {
    num(s).map(VertexId)
}

fn eid(s: &str) -> Result<EdgeId> {
    num(s).map(EdgeId)
}

fn purged_item(s: &str) -> Result<(EdgeId, VertexId, VertexId)> {
    let p: Vec<&str> = s.split(':').collect();
    match p.as_slice() {
        [e, a, b] => Ok((eid(e)?, vid(a)?, vid(b)?)),
        _ => Err(invalid(format!("bad purged entry {s:?}"))),
    }
}

fn external_item(s: &str) -> Result<(EdgeId, VertexId)> {
    match s.split_once(':') {
        Some((e, m)) => Ok((eid(e)?, vid(m)?)),
        None => Err(invalid(format!("bad external entry {s:?}"))),
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let purged = |p: &[(EdgeId, VertexId, VertexId)]| join(p, |(e, a, b)| format!("{e}:{a}:{b}"));
        let external = |x: &[(EdgeId, VertexId)]| join(x, |(e, m)| format!("{e}:{m}"));
        match self {
            Action::Vertex0Removal { v } => write!(f, "V0 {v}"),
            Action::Vertex1Removal { v, w, matched_edge, other_removed } => {
                write!(f, "V1 {v} {w} {matched_edge} {}", join(other_removed, |e| e.to_string()))
            }
            Action::Contraction(c) => write!(
                f,
                "C {} {} {} {} {} {} {}",
                c.center,
                c.new_vertex,
                u8::from(c.is_bad),
                join(&c.members, |m| m.to_string()),
                join(&c.member_degrees, |d| d.to_string()),
                purged(&c.internal_purged),
                external(&c.external_map)
            ),
            Action::MaxEdgeRemoval { edge, max_vertex, other } => {
                write!(f, "M {edge} {max_vertex} {other}")
            }
            Action::AutoCorrection(r) => write!(
                f,
                "A {} {} {} {} {} {},{} {} {} {}",
                r.u,
                r.v,
                r.w,
                r.new_vertex,
                r.removed_edge,
                r.double_edge.0,
                r.double_edge.1,
                join(&r.member_degrees, |d| d.to_string()),
                purged(&r.internal_purged),
                external(&r.external_map)
            ),
        }
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let t: Vec<&str> = line.split_whitespace().collect();
        let bad = || invalid(format!("malformed action line {line:?}"));
        match t.as_slice() {
            ["V0", v] => Ok(Action::Vertex0Removal { v: vid(v)? }),
            ["V1", v, w, e, others] => Ok(Action::Vertex1Removal {
                v: vid(v)?,
                w: vid(w)?,
                matched_edge: eid(e)?,
                other_removed: split_list(others, eid)?,
            }),
            ["C", center, new, is_bad, members, degrees, purged, external] => {
                Ok(Action::Contraction(ContractionRecord {
                    center: vid(center)?,
                    new_vertex: vid(new)?,
                    is_bad: match *is_bad {
                        "0" => false,
                        "1" => true,
                        _ => return Err(bad()),
                    },
                    members: split_list(members, vid)?,
                    member_degrees: split_list(degrees, num)?,
                    internal_purged: split_list(purged, purged_item)?,
                    external_map: split_list(external, external_item)?,
                }))
            }
            ["M", e, v, u] => Ok(Action::MaxEdgeRemoval { edge: eid(e)?, max_vertex: vid(v)?, other: vid(u)? }),
            ["A", u, v, w, new, removed, double, degrees, purged, external] => {
                let d: Vec<EdgeId> = split_list(double, eid)?;
                if d.len() != 2 {
                    return Err(bad());
                }
                Ok(Action::AutoCorrection(AutoCorrectionRecord {
                    u: vid(u)?,
                    v: vid(v)?,
                    w: vid(w)?,
                    new_vertex: vid(new)?,
                    removed_edge: eid(removed)?,
                    double_edge: (d[0], d[1]),
                    member_degrees: split_list(degrees, num)?,
                    internal_purged: split_list(purged, purged_item)?,
                    external_map: split_list(external, external_item)?,
                }))
            }
            _ => Err(bad()),
        }
    }
}

impl ReduceTrace {
    /// One record per line: actions, then snapshots (`S`), then the stop reason.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in &self.actions {
            out.push_str(&a.to_string());
            out.push('\n');
        }
        for s in &self.snapshots {
            out.push_str(&format!("S {} {} {} {}\n", s.action_index, s.vertices, s.edges, s.ex4));
        }
        out.push_str(&match self.stop {
            StopReason::Empty => "STOP empty\n".to_string(),
            StopReason::SnapshotFound { snapshot } => format!("STOP found {snapshot}\n"),
            StopReason::SafetyFloor { snapshot } => format!("STOP floor {snapshot}\n"),
        });
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut trace = ReduceTrace { actions: Vec::new(), snapshots: Vec::new(), stop: StopReason::Empty };
        let mut stopped = false;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let t: Vec<&str> = line.split_whitespace().collect();
            match t.as_slice() {
                ["S", i, n, e, x] => trace.snapshots.push(Snapshot {
                    action_index: num(i)? as usize,
                    vertices: num(n)? as usize,
                    edges: num(e)? as usize,
                    ex4: num(x)? as u64,
                }),
                ["STOP", "empty"] => {
                    trace.stop = StopReason::Empty;
                    stopped = true;
                }
                ["STOP", "found", s] => {
                    trace.stop = StopReason::SnapshotFound { snapshot: num(s)? as usize };
                    stopped = true;
                }
                ["STOP", "floor", s] => {
                    trace.stop = StopReason::SafetyFloor { snapshot: num(s)? as usize };
                    stopped = true;
                }
                _ => trace.actions.push(line.parse()?),
            }
        }
        if !stopped {
            return Err(invalid("trace text has no STOP line"));
        }
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configmodel::{sample_no_loops, DegreeSequence, DEFAULT_MAX_RETRIES};
    use crate::rng::{from_seed, trial_rng};

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn k4() -> MultiGraph {
        MultiGraph::build(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn random_graph(n: usize, p4: f64, seed: u64) -> MultiGraph {
        let (d, _) = DegreeSequence::with_deg4_fraction(n, p4).unwrap();
        let mut rng = from_seed(seed);
        sample_no_loops(&d, &mut rng, DEFAULT_MAX_RETRIES).unwrap().into_graph(n).unwrap()
    }

    #[test]
    fn isolated_vertex_step() {
        let mut g = MultiGraph::build(1, &[]).unwrap();
        let out = step(&mut g, &mut from_seed(0)).unwrap();
        assert_eq!(out.action, Action::Vertex0Removal { v: v(0) });
        assert!(g.is_empty());
    }

    #[test]
    fn single_edge_step() {
        let mut g = MultiGraph::build(2, &[(0, 1)]).unwrap();
        let out = step(&mut g, &mut from_seed(0)).unwrap();
        match out.action {
            Action::Vertex1Removal { matched_edge, ref other_removed, .. } => {
                assert_eq!(matched_edge, EdgeId(0));
                assert!(other_removed.is_empty());
            }
            ref a => panic!("unexpected {a:?}"),
        }
        assert!(g.is_empty());
    }

    #[test]
    fn two_vertex_contraction_is_bad() {
        // u=0 double-bonded to w=1; w also has edges to 2 and 3; 2-3 bonded.
        let mut g = MultiGraph::build(4, &[(0, 1), (0, 1), (1, 2), (1, 3), (2, 3), (2, 3), (2, 3)])
            .unwrap();
        // δ = 2 only at u.
        assert_eq!(g.bucket(2), &[v(0)]);
        let out = step(&mut g, &mut from_seed(0)).unwrap();
        match out.action {
            Action::Contraction(c) => {
                assert!(c.is_bad);
                assert_eq!(c.members[..], [v(0), v(1)]);
            }
            a => panic!("unexpected {a:?}"),
        }
    }

    #[test]
    fn k4_starts_with_max_edge_and_empties() {
        for seed in 0..20 {
            let g0 = k4();
            let mut g = g0.clone();
            let t = run(&mut g, &mut from_seed(seed), StopRule::RunToEmpty).unwrap();
            assert!(t.actions[0].is_max_edge_removal());
            assert!(g.is_empty());
            assert_eq!(t.stop, StopReason::Empty);
            assert_eq!(t.snapshots[0].action_index, 0);
            assert_eq!(t.snapshots.last().unwrap().vertices, 0);
            assert_eq!(replay(&g0, &t).unwrap(), g);
        }
    }

    #[test]
    fn triple_bond_forced_sequence() {
        let g0 = MultiGraph::build(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        for seed in 0..10 {
            let mut g = g0.clone();
            let t = run(&mut g, &mut from_seed(seed), StopRule::RunToEmpty).unwrap();
            assert_eq!(t.actions.len(), 3, "{:?}", t.actions);
            assert!(t.actions[0].is_max_edge_removal());
            assert!(t.actions[1].is_bad_contraction());
            assert!(matches!(t.actions[2], Action::Vertex0Removal { .. }));
            assert_eq!(t.r0(3), 1);
            assert_eq!(t.r2b(3), 1);
        }
    }

    #[test]
    fn auto_correction_fires() {
        // v = 0 has degree 4; u = 1 has edges to v and a double edge to w = 2.
        // Everything else makes δ ≥ 3.
        let pairs = [
            (0, 1),
            (1, 2),
            (1, 2),
            (0, 3),
            (0, 4),
            (0, 5),
            (2, 3),
            (2, 4),
            (3, 4),
            (3, 5),
            (4, 5),
        ];
        let g0 = MultiGraph::build(6, &pairs).unwrap();
        assert_eq!(g0.max_degree(), Some(4));
        // Find a seed whose max-edge removal takes edge 0 = {0, 1}.
        let mut fired = false;
        for seed in 0..200 {
            let mut g = g0.clone();
            let out = step(&mut g, &mut from_seed(seed)).unwrap();
            if let Action::MaxEdgeRemoval { edge: EdgeId(0), .. } = out.action {
                let Some(Action::AutoCorrection(r)) = out.auto_correction else {
                    panic!("auto-correction expected");
                };
                assert_eq!((r.u, r.v, r.w), (v(1), v(0), v(2)));
                assert_eq!(r.member_degrees[..], [2, 3, 4]);
                g.check_invariants().unwrap();
                fired = true;
                break;
            }
        }
        assert!(fired);
    }

    #[test]
    fn snapshot_window_stops_in_range() {
        let n = 10_000;
        let omega = (n as f64).powf(2.0 / 3.0).ceil() as usize;
        assert_eq!(omega, 465); // 10^4^(2/3) = 464.16
        let mut hits = 0;
        let trials = 100;
        for t in 0..trials {
            let mut g = random_graph(n, 0.0, 100 + t);
            let tr = run(&mut g, &mut trial_rng(5, t), StopRule::SnapshotWindow { omega }).unwrap();
            if let StopReason::SnapshotFound { snapshot } = tr.stop {
                let s = tr.snapshots[snapshot];
                assert!(s.vertices >= omega && s.vertices <= 2 * omega);
                assert_eq!(s.ex4, 0);
                assert_eq!(s.vertices, g.vertex_count());
                hits += 1;
            }
        }
        assert!(hits * 10 >= trials * 9, "{hits}/{trials}");
    }

    #[test]
    fn replay_reproduces_state() {
        for seed in 0..200u64 {
            let g0 = random_graph(40 + (seed as usize % 7) * 2, 0.3, seed);
            let mut g = g0.clone();
            let t = run(&mut g, &mut trial_rng(1, seed), StopRule::RunToEmpty).unwrap();
            g.check_invariants().unwrap();
            assert_eq!(replay(&g0, &t).unwrap(), g);
            assert!(t.actions.len() <= 3 * g0.vertex_count());
        }
    }

    #[test]
    fn replay_partial_state_matches() {
        let g0 = random_graph(600, 0.5, 3);
        let mut g = g0.clone();
        let t = run(&mut g, &mut from_seed(3), StopRule::SnapshotWindow { omega: 72 }).unwrap();
        assert_eq!(replay(&g0, &t).unwrap(), g);
    }

    #[test]
    fn empty_trace_leaves_graph() {
        let g0 = k4();
        let t = ReduceTrace { actions: vec![], snapshots: vec![], stop: StopReason::Empty };
        assert_eq!(replay(&g0, &t).unwrap(), g0);
    }

    #[test]
    fn foreign_trace_is_rejected() {
        let g0 = random_graph(50, 0.0, 1);
        let other = random_graph(50, 0.0, 2);
        let mut g = g0.clone();
        let t = run(&mut g, &mut from_seed(0), StopRule::RunToEmpty).unwrap();
        assert!(matches!(replay(&other, &t), Err(Error::Integrity(_))));
    }

    #[test]
    fn priority_holds_on_every_action() {
        for seed in 0..30u64 {
            let g0 = random_graph(200, 0.5, seed);
            let mut g = g0.clone();
            let t = run(&mut g, &mut from_seed(seed), StopRule::RunToEmpty).unwrap();
            let mut h = g0.clone();
            for (i, a) in t.actions.iter().enumerate() {
                let lowest = h.min_degree().unwrap();
                match a {
                    Action::Vertex0Removal { .. } => assert_eq!(lowest, 0),
                    Action::Vertex1Removal { .. } => assert_eq!(lowest, 1),
                    Action::Contraction(c) => {
                        assert_eq!(lowest, 2);
                        assert_eq!(c.is_bad, c.members.len() == 2);
                    }
                    Action::MaxEdgeRemoval { .. } => assert!(lowest >= 3),
                    Action::AutoCorrection(_) => assert!(t.actions[i - 1].is_max_edge_removal()),
                }
                apply(&mut h, a, i.checked_sub(1).map(|j| &t.actions[j])).unwrap();
                h.check_invariants().unwrap();
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let g0 = random_graph(300, 0.5, 8);
        let mut g = g0.clone();
        let t = run(&mut g, &mut from_seed(8), StopRule::RunToEmpty).unwrap();
        let back = ReduceTrace::from_text(&t.to_text()).unwrap();
        assert_eq!(back, t);
        assert_eq!(replay(&g0, &back).unwrap(), g);
        assert!(ReduceTrace::from_text("V0 1\n").is_err());
        assert!("X 1 2".parse::<Action>().is_err());
    }
}
