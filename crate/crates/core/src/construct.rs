//! CONSTRUCT: unwinding a REDUCE trace into a matching of the input graph.
//!
//! Unwinding walks the trace backwards from level `j`. Removals and max-edge
//! deletions leave the matching alone, vertex-1 removals add their recorded
//! edge, and contractions are expanded using the recorded pre-contraction
//! endpoint of every re-attached edge. At each level the uncovered-vertex count
//! is checked against `R0 + R2b + κ_j`.

use serde::{Deserialize, Serialize};

use crate::error::{integrity, Result};
use crate::multigraph::{EdgeId, MultiGraph, VertexId};
use crate::reduce::{Action, AutoCorrectionRecord, ContractionRecord, ReduceTrace};

/// A set of edge identifiers, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    edges: Vec<EdgeId>,
}

impl Matching {
    pub fn new(mut edges: Vec<EdgeId>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Matching { edges }
    }

    pub fn empty() -> Self {
        Matching::default()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// Checks that every edge is live in `g` and no two edges share an endpoint.
    pub fn validate(&self, g: &MultiGraph) -> Result<()> {
        let mut covered = vec![false; g.vertex_capacity()];
        for &e in &self.edges {
            if !g.is_edge_live(e) {
                return Err(integrity(format!("matching edge {e} is not live")));
            }
            let (a, b) = g.endpoints(e);
            for x in [a, b] {
                if std::mem::replace(&mut covered[x.index()], true) {
                    return Err(integrity(format!("vertex {x} covered twice")));
                }
            }
        }
        Ok(())
    }
}

/// κ(G, M): vertices of `g` not covered by `m`.
pub fn kappa(g: &MultiGraph, m: &Matching) -> Result<usize> {
    m.validate(g)?;
    Ok(g.vertex_count() - 2 * m.len())
}

/// Counters from one unwinding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeficiencyLedger {
    /// Vertex-0 removals before level `j`.
    pub r0: usize,
    /// Bad contractions before level `j`.
    pub r2b: usize,
    /// κ(G_j, M_j).
    pub kappa_j: usize,
    /// κ(G_0, M_0).
    pub kappa_0: usize,
    /// κ(G_i, M_i) for every level `i = 0..=j`.
    pub kappa_by_level: Vec<usize>,
}

/// Which center edge to add when a good contraction's vertex is left uncovered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UncoveredChoice {
    /// First center-incident edge in the recorded purge order.
    #[default]
    First,
    /// Last center-incident edge, i.e. the other neighbour.
    Last,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct UnwindOptions {
    pub uncovered_choice: UncoveredChoice,
}

/// Unwinds `trace` from level `j` (state `state_j`, matching `mj`) to level 0.
pub fn unwind(
    trace: &ReduceTrace,
    j: usize,
    state_j: &MultiGraph,
    mj: &Matching,
) -> Result<(Matching, DeficiencyLedger)> {
    unwind_with(trace, j, state_j, mj, UnwindOptions::default())
}

pub fn unwind_with(
    trace: &ReduceTrace,
    j: usize,
    state_j: &MultiGraph,
    mj: &Matching,
    opts: UnwindOptions,
) -> Result<(Matching, DeficiencyLedger)> {
    if j > trace.actions.len() {
        return Err(integrity(format!("level {j} beyond trace length {}", trace.actions.len())));
    }
    let kappa_j = kappa(state_j, mj)?;
    let mut u = Unwinder {
        mate: vec![None; state_j.vertex_capacity()],
        ends: vec![[VertexId(u32::MAX); 2]; state_j.edge_capacity()],
        size: 0,
    };
    for &e in mj.edges() {
        let (a, b) = state_j.endpoints(e);
        u.add(e, a, b)?;
    }

    let mut vertices = state_j.vertex_count() as isize;
    let (mut r0, mut r2b) = (0usize, 0usize);
    let mut kappa_by_level = vec![0usize; j + 1];
    kappa_by_level[j] = kappa_j;
    for level in (0..j).rev() {
        let action = &trace.actions[level];
        vertices -= action.vertex_delta();
        match action {
            Action::Vertex0Removal { .. } => r0 += 1,
            Action::MaxEdgeRemoval { .. } => {}
            Action::Vertex1Removal { v, w, matched_edge, .. } => u.add(*matched_edge, *v, *w)?,
            Action::Contraction(c) if c.is_bad => {
                r2b += 1;
                u.expand_bad(c)?;
            }
            Action::Contraction(c) => u.expand_good(c, opts.uncovered_choice)?,
            Action::AutoCorrection(r) => u.expand_auto_correction(r)?,
        }
        let k = vertices - 2 * u.size as isize;
        if k < 0 || k as usize != r0 + r2b + kappa_j {
            return Err(integrity(format!(
                "deficiency identity broken at level {level}: κ = {k}, R0 + R2b + κ_j = {}",
                r0 + r2b + kappa_j
            )));
        }
        kappa_by_level[level] = k as usize;
    }

    let mut edges = Vec::with_capacity(u.size);
    for (i, m) in u.mate.iter().enumerate() {
        if let Some(e) = *m {
            let [a, b] = u.ends[e.index()];
            if a.index() == i {
                let (oa, ob) = state_j.original_endpoints(e);
                if (a, b) != (oa, ob) && (b, a) != (oa, ob) {
                    return Err(integrity(format!("edge {e} did not unwind to its input endpoints")));
                }
                edges.push(e);
            }
        }
    }
    let m0 = Matching::new(edges);
    let ledger = DeficiencyLedger { r0, r2b, kappa_j, kappa_0: kappa_by_level[0], kappa_by_level };
    Ok((m0, ledger))
}

struct Unwinder {
    mate: Vec<Option<EdgeId>>,
    ends: Vec<[VertexId; 2]>,
    size: usize,
}

impl Unwinder {
    fn add(&mut self, e: EdgeId, a: VertexId, b: VertexId) -> Result<()> {
        for x in [a, b] {
            if self.mate[x.index()].is_some() {
                return Err(integrity(format!("vertex {x} already covered when adding edge {e}")));
            }
        }
        self.mate[a.index()] = Some(e);
        self.mate[b.index()] = Some(e);
        self.ends[e.index()] = [a, b];
        self.size += 1;
        Ok(())
    }

    /// Moves the end of `e` at `from` to `to`.
    fn reattach(&mut self, e: EdgeId, from: VertexId, to: VertexId) -> Result<()> {
        if self.mate[to.index()].is_some() {
            return Err(integrity(format!("vertex {to} already covered")));
        }
        let ends = &mut self.ends[e.index()];
        let side = ends.iter().position(|&x| x == from).ok_or_else(|| integrity("stale matched edge"))?;
        ends[side] = to;
        self.mate[from.index()] = None;
        self.mate[to.index()] = Some(e);
        Ok(())
    }

    /// If the contracted vertex is covered, moves its matched edge back to the
    /// member it was attached to and returns that member.
    fn restore_attachment(
        &mut self,
        new_vertex: VertexId,
        external_map: &[(EdgeId, VertexId)],
    ) -> Result<Option<VertexId>> {
        let Some(e) = self.mate[new_vertex.index()] else {
            return Ok(None);
        };
        let member = external_map
            .iter()
            .find(|(x, _)| *x == e)
            .map(|&(_, m)| m)
            .ok_or_else(|| integrity(format!("edge {e} at {new_vertex} has no recorded attachment")))?;
        self.reattach(e, new_vertex, member)?;
        Ok(Some(member))
    }

    fn expand_bad(&mut self, c: &ContractionRecord) -> Result<()> {
        if let Some(m) = self.restore_attachment(c.new_vertex, &c.external_map)? {
            if m == c.center {
                return Err(integrity("bad contraction center carried an external edge"));
            }
        }
        Ok(())
    }

    fn expand_good(&mut self, c: &ContractionRecord, choice: UncoveredChoice) -> Result<()> {
        let center_edges: Vec<(EdgeId, VertexId)> = c
            .internal_purged
            .iter()
            .filter_map(|&(e, a, b)| {
                if a == c.center {
                    Some((e, b))
                } else if b == c.center {
                    Some((e, a))
                } else {
                    None
                }
            })
            .collect();
        match self.restore_attachment(c.new_vertex, &c.external_map)? {
            None => {
                let pick = match choice {
                    UncoveredChoice::First => center_edges.first(),
                    UncoveredChoice::Last => center_edges.last(),
                };
                let &(e, nb) = pick.ok_or_else(|| integrity("contraction center has no edges"))?;
                self.add(e, c.center, nb)
            }
            Some(att) => {
                if att == c.center {
                    return Err(integrity("contraction center carried an external edge"));
                }
                let &(e, nb) = center_edges
                    .iter()
                    .find(|&&(_, nb)| nb != att)
                    .ok_or_else(|| integrity("no center edge avoids the covered member"))?;
                self.add(e, c.center, nb)
            }
        }
    }

    fn expand_auto_correction(&mut self, r: &AutoCorrectionRecord) -> Result<()> {
        match self.restore_attachment(r.new_vertex, &r.external_map)? {
            None => self.add(r.double_edge.0, r.u, r.w),
            Some(att) if att == r.v => self.add(r.double_edge.0, r.u, r.w),
            Some(att) if att == r.w => self.add(r.removed_edge, r.u, r.v),
            Some(_) => Err(integrity("auto-correction degree-2 vertex carried an external edge")),
        }
    }
}

/// Maps a matching to pairs of input-graph vertices.
pub fn resolve_to_original(m0: &Matching, g: &MultiGraph) -> Result<Vec<(VertexId, VertexId)>> {
    let mut covered = vec![false; g.original_vertex_count()];
    let mut out = Vec::with_capacity(m0.len());
    for &e in m0.edges() {
        if e.index() >= g.edge_capacity() {
            return Err(integrity(format!("edge {e} has no provenance in this graph")));
        }
        let (a, b) = g.original_endpoints(e);
        for x in [a, b] {
            if std::mem::replace(&mut covered[x.index()], true) {
                return Err(integrity(format!("input vertex {x} covered twice")));
            }
        }
        out.push((a, b));
    }
    Ok(out)
}
