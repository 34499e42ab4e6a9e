//! Dynamic loopless multigraph.
//!
//! Vertices and edges carry stable identifiers. Every edge keeps the pair of
//! endpoints it had when the graph was built, so a matching computed on a
//! heavily contracted state can always be mapped back to the input graph.
//!
//! Vertices are kept in per-degree buckets (swap-remove arrays), which gives
//! O(1) degree-class membership updates and O(1) uniform picks inside a class.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{integrity, invalid, usage, Result};

/// Stable vertex identifier. Original vertices are `0..n`; contracted vertices
/// get fresh identifiers above every id handed out so far.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

/// Stable edge identifier, one per configuration pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Degree class used by [`MultiGraph::pick_uniform`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeClass {
    Exactly(usize),
    Max,
    Min,
}

/// Incident edges of one vertex; degrees stay small, so the list lives inline.
pub type IncidentList = SmallVec<[EdgeId; 4]>;
/// A contraction set; degree-2 contractions involve at most three vertices.
pub type Members = SmallVec<[VertexId; 3]>;
pub type MemberDegrees = SmallVec<[u32; 3]>;
/// Internal edges with their endpoints just before a contraction.
pub type PurgedEdges = SmallVec<[(EdgeId, VertexId, VertexId); 2]>;
/// Re-attached edges with the member they used to end at.
pub type ExternalEdges = SmallVec<[(EdgeId, VertexId); 4]>;

/// Result of [`MultiGraph::contract`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contracted {
    pub new_vertex: VertexId,
    /// Edges with both endpoints inside the contracted set, with their
    /// endpoints just before the contraction.
    pub purged: PurgedEdges,
    /// Edges that now end at `new_vertex`, paired with the member they were
    /// attached to before the contraction.
    pub external: ExternalEdges,
    /// Degrees of the members (same order as the input set) before contracting.
    pub member_degrees: MemberDegrees,
}

/// A loopless multigraph with persistent edge identities and degree buckets.
///
/// Equality is structural over the whole internal state, including incident
/// list order, so two graphs compare equal only if they were produced by the
/// same operation sequence from the same input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    original_n: usize,
    original: Vec<[VertexId; 2]>,
    links: Vec<Link>,
    edge_alive: Vec<bool>,
    verts: Vec<VertexSlot>,
    vertex_alive: Vec<bool>,
    buckets: Vec<Vec<VertexId>>,
    live_vertices: usize,
    live_edges: usize,
    max_hint: usize,
    excess4: u64,
}

/// Current endpoints of an edge and its position in each endpoint's list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Link {
    ends: [VertexId; 2],
    slots: [u32; 2],
}

/// Incident list plus the vertex's position in its degree bucket, kept
/// together so that touching a vertex costs one cache line.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct VertexSlot {
    edges: IncidentList,
    bucket_pos: u32,
}

const EXCESS_THRESHOLD: usize = 4;

#[inline]
fn excess_term(d: usize) -> u64 {
    d.saturating_sub(EXCESS_THRESHOLD) as u64
}

impl MultiGraph {
    /// Builds the graph on vertices `0..n` with one edge per pair.
    pub fn build(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n > u32::MAX as usize / 2 || pairs.len() > u32::MAX as usize {
            return Err(invalid("graph too large for 32-bit identifiers"));
        }
        let mut original = Vec::with_capacity(pairs.len());
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if a >= n || b >= n {
                return Err(invalid(format!(
                    "pair {i} = ({a}, {b}) has an endpoint outside 0..{n}"
                )));
            }
            if a == b {
                return Err(invalid(format!("pair {i} is a loop at vertex {a}")));
            }
            original.push([VertexId(a as u32), VertexId(b as u32)]);
        }

        let mut verts: Vec<VertexSlot> = vec![VertexSlot::default(); n];
        let mut links = Vec::with_capacity(original.len());
        for (i, &[a, b]) in original.iter().enumerate() {
            let e = EdgeId(i as u32);
            let sa = verts[a.index()].edges.len() as u32;
            verts[a.index()].edges.push(e);
            let sb = verts[b.index()].edges.len() as u32;
            verts[b.index()].edges.push(e);
            links.push(Link { ends: [a, b], slots: [sa, sb] });
        }

        let mut g = MultiGraph {
            original_n: n,
            original,
            links,
            edge_alive: vec![true; pairs.len()],
            verts,
            vertex_alive: vec![true; n],
            buckets: Vec::new(),
            live_vertices: n,
            live_edges: pairs.len(),
            max_hint: 0,
            excess4: 0,
        };
        for v in 0..n {
            let d = g.verts[v].edges.len();
            g.bucket_insert(VertexId(v as u32), d);
        }
        Ok(g)
    }

    /// Number of vertices of the input graph.
    pub fn original_vertex_count(&self) -> usize {
        self.original_n
    }

    /// Total number of edge identifiers ever issued (live or dead).
    pub fn edge_capacity(&self) -> usize {
        self.original.len()
    }

    /// One past the largest vertex identifier issued so far.
    pub fn vertex_capacity(&self) -> usize {
        self.verts.len()
    }

    /// n(G)
    pub fn vertex_count(&self) -> usize {
        self.live_vertices
    }

    /// e(G)
    pub fn edge_count(&self) -> usize {
        self.live_edges
    }

    pub fn is_empty(&self) -> bool {
        self.live_vertices == 0
    }

    pub fn is_vertex_live(&self, v: VertexId) -> bool {
        self.vertex_alive.get(v.index()).copied().unwrap_or(false)
    }

    pub fn is_edge_live(&self, e: EdgeId) -> bool {
        self.edge_alive.get(e.index()).copied().unwrap_or(false)
    }

    /// Degree of a live vertex; parallel edges count separately.
    pub fn degree(&self, v: VertexId) -> usize {
        self.verts[v.index()].edges.len()
    }

    pub fn incident_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.verts[v.index()].edges
    }

    /// Current endpoints of a live edge.
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let [a, b] = self.links[e.index()].ends;
        (a, b)
    }

    /// Endpoints of `e` in the input graph. Never changes.
    pub fn original_endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let [a, b] = self.original[e.index()];
        (a, b)
    }

    /// The endpoint of `e` that is not `v`.
    pub fn opposite(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [a, b] = self.links[e.index()].ends;
        if a == v {
            b
        } else {
            a
        }
    }

    /// Distinct neighbours of `v`, in first-seen order of the incident list.
    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = Vec::with_capacity(self.degree(v));
        for &e in &self.verts[v.index()].edges {
            let w = self.opposite(e, v);
            if !out.contains(&w) {
                out.push(w);
            }
        }
        out
    }

    /// Number of parallel edges joining `a` and `b`.
    pub fn multiplicity(&self, a: VertexId, b: VertexId) -> usize {
        let (small, other) = if self.degree(a) <= self.degree(b) { (a, b) } else { (b, a) };
        self.verts[small.index()].edges
            .iter()
            .filter(|&&e| self.opposite(e, small) == other)
            .count()
    }

    pub fn live_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertex_alive
            .iter()
            .enumerate()
            .filter(|(_, &alive)| alive)
            .map(|(i, _)| VertexId(i as u32))
    }

    pub fn live_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edge_alive
            .iter()
            .enumerate()
            .filter(|(_, &alive)| alive)
            .map(|(i, _)| EdgeId(i as u32))
    }

    /// Vertices currently of degree `d`.
    pub fn bucket(&self, d: usize) -> &[VertexId] {
        self.buckets.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of vertices of degree `d`, i.e. n_d(G).
    pub fn count_with_degree(&self, d: usize) -> usize {
        self.bucket(d).len()
    }

    /// Minimum degree δ(G), `None` on the empty graph.
    pub fn min_degree(&self) -> Option<usize> {
        self.buckets.iter().position(|b| !b.is_empty())
    }

    /// Maximum degree Δ(G), `None` on the empty graph.
    pub fn max_degree(&self) -> Option<usize> {
        if self.live_vertices == 0 {
            return None;
        }
        Some(self.max_hint)
    }

    /// True when the graph is empty or has minimum degree at least 3.
    pub fn is_min_degree_at_least_3(&self) -> bool {
        (0..3).all(|d| self.bucket(d).is_empty())
    }

    /// ex_4(G), maintained incrementally.
    pub fn excess4(&self) -> u64 {
        self.excess4
    }

    /// Uniformly random vertex from a degree class.
    pub fn pick_uniform<R: Rng + ?Sized>(&self, class: DegreeClass, rng: &mut R) -> Result<VertexId> {
        let d = match class {
            DegreeClass::Exactly(d) => d,
            DegreeClass::Max => self.max_degree().ok_or_else(|| usage("max class of empty graph"))?,
            DegreeClass::Min => self.min_degree().ok_or_else(|| usage("min class of empty graph"))?,
        };
        let bucket = self.bucket(d);
        if bucket.is_empty() {
            return Err(usage(format!("no vertex of degree {d}")));
        }
        Ok(bucket[rng.gen_range(0..bucket.len())])
    }

    /// Uniformly random incident edge of `v`, parallel edges counted with multiplicity.
    pub fn pick_incident_edge_uniform<R: Rng + ?Sized>(&self, v: VertexId, rng: &mut R) -> Result<EdgeId> {
        self.check_vertex(v)?;
        let list = &self.verts[v.index()].edges;
        if list.is_empty() {
            return Err(usage(format!("vertex {v} has no incident edges")));
        }
        Ok(list[rng.gen_range(0..list.len())])
    }

    /// Deletes a live edge.
    pub fn remove_edge(&mut self, e: EdgeId) -> Result<()> {
        if !self.is_edge_live(e) {
            return Err(usage(format!("edge {e} is not live")));
        }
        self.detach(e, 0);
        self.detach(e, 1);
        self.edge_alive[e.index()] = false;
        self.live_edges -= 1;
        Ok(())
    }

    /// Deletes a live vertex together with its incident edges, returned in incident-list order.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<IncidentList> {
        self.check_vertex(v)?;
        let d = self.degree(v);
        self.bucket_remove(v, d);
        let list = std::mem::take(&mut self.verts[v.index()].edges);
        for &e in &list {
            let side = self.side_of(e, v);
            self.detach(e, 1 - side);
            self.edge_alive[e.index()] = false;
        }
        self.live_edges -= list.len();
        self.vertex_alive[v.index()] = false;
        self.live_vertices -= 1;
        Ok(list)
    }

    /// Replaces the vertex set `members` by one fresh vertex.
    ///
    /// Edges internal to the set are purged, every other edge incident to the
    /// set is re-attached to the new vertex under its existing id.
    pub fn contract(&mut self, members: &[VertexId]) -> Result<Contracted> {
        if members.len() < 2 {
            return Err(usage("contraction needs at least two vertices"));
        }
        for (i, &m) in members.iter().enumerate() {
            self.check_vertex(m)?;
            if members[..i].contains(&m) {
                return Err(usage(format!("vertex {m} repeated in contraction set")));
            }
        }
        let large: Option<std::collections::HashSet<VertexId>> =
            (members.len() > 16).then(|| members.iter().copied().collect());
        let in_set = |x: VertexId| match &large {
            Some(s) => s.contains(&x),
            None => members.contains(&x),
        };

        let member_degrees: MemberDegrees = members.iter().map(|&m| self.degree(m) as u32).collect();
        let total: usize = member_degrees.iter().map(|&d| d as usize).sum();
        let new_vertex = VertexId(self.verts.len() as u32);
        self.verts.push(VertexSlot { edges: IncidentList::with_capacity(total), bucket_pos: 0 });
        self.vertex_alive.push(true);

        let mut purged = PurgedEdges::with_capacity(total / 2);
        let mut external = ExternalEdges::with_capacity(total);
        for &m in members {
            let d = self.degree(m);
            self.bucket_remove(m, d);
            let list = std::mem::take(&mut self.verts[m.index()].edges);
            for e in list {
                if !self.edge_alive[e.index()] {
                    continue;
                }
                let side = self.side_of(e, m);
                let other = self.links[e.index()].ends[1 - side];
                if in_set(other) {
                    let [a, b] = self.links[e.index()].ends;
                    purged.push((e, a, b));
                    self.edge_alive[e.index()] = false;
                } else {
                    self.links[e.index()].ends[side] = new_vertex;
                    self.links[e.index()].slots[side] = self.verts[new_vertex.index()].edges.len() as u32;
                    self.verts[new_vertex.index()].edges.push(e);
                    external.push((e, m));
                }
            }
            self.vertex_alive[m.index()] = false;
        }
        self.live_edges -= purged.len();
        self.live_vertices -= members.len() - 1;
        let d = self.degree(new_vertex);
        self.bucket_insert(new_vertex, d);
        Ok(Contracted { new_vertex, purged, external, member_degrees })
    }

    /// Recomputes every derived structure from the incident lists and reports
    /// the first inconsistency.
    pub fn check_invariants(&self) -> Result<()> {
        let mut degree_sum = 0usize;
        let mut live_v = 0usize;
        let mut excess = 0u64;
        for (i, slot) in self.verts.iter().enumerate() {
            let list = &slot.edges;
            let v = VertexId(i as u32);
            if !self.vertex_alive[i] {
                if !list.is_empty() {
                    return Err(integrity(format!("dead vertex {v} has incident edges")));
                }
                continue;
            }
            live_v += 1;
            degree_sum += list.len();
            excess += excess_term(list.len());
            let pos = self.verts[i].bucket_pos as usize;
            if self.bucket(list.len()).get(pos) != Some(&v) {
                return Err(integrity(format!("vertex {v} missing from bucket {}", list.len())));
            }
            for (slot, &e) in list.iter().enumerate() {
                if !self.edge_alive[e.index()] {
                    return Err(integrity(format!("vertex {v} lists dead edge {e}")));
                }
                let side = self.side_of(e, v);
                if self.links[e.index()].ends[side] != v || self.links[e.index()].slots[side] as usize != slot {
                    return Err(integrity(format!("edge {e} slot mismatch at vertex {v}")));
                }
            }
        }
        let bucket_total: usize = self.buckets.iter().map(Vec::len).sum();
        if bucket_total != live_v || live_v != self.live_vertices {
            return Err(integrity("bucket population does not match live vertex count"));
        }
        let mut live_e = 0;
        for (i, &Link { ends: [a, b], .. }) in self.links.iter().enumerate() {
            if !self.edge_alive[i] {
                continue;
            }
            live_e += 1;
            if a == b {
                return Err(integrity(format!("edge {i} is a loop")));
            }
            if !self.vertex_alive[a.index()] || !self.vertex_alive[b.index()] {
                return Err(integrity(format!("edge {i} has a dead endpoint")));
            }
        }
        if live_e != self.live_edges || degree_sum != 2 * live_e {
            return Err(integrity("degree sum differs from twice the edge count"));
        }
        if excess != self.excess4 {
            return Err(integrity("incremental ex4 differs from recount"));
        }
        Ok(())
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.is_vertex_live(v) {
            Ok(())
        } else {
            Err(usage(format!("vertex {v} is not live")))
        }
    }

    #[inline]
    fn side_of(&self, e: EdgeId, v: VertexId) -> usize {
        if self.links[e.index()].ends[0] == v {
            0
        } else {
            1
        }
    }

    /// Unlinks `e` from the incident list of its endpoint on `side`.
    fn detach(&mut self, e: EdgeId, side: usize) {
        let v = self.links[e.index()].ends[side];
        let pos = self.links[e.index()].slots[side] as usize;
        let old_degree = self.verts[v.index()].edges.len();
        let list = &mut self.verts[v.index()].edges;
        list.swap_remove(pos);
        if pos < list.len() {
            let moved = list[pos];
            let moved_side = if self.links[moved.index()].ends[0] == v { 0 } else { 1 };
            self.links[moved.index()].slots[moved_side] = pos as u32;
        }
        self.bucket_move(v, old_degree, old_degree - 1);
    }

    fn bucket_insert(&mut self, v: VertexId, d: usize) {
        if self.buckets.len() <= d {
            self.buckets.resize_with(d + 1, Vec::new);
        }
        self.verts[v.index()].bucket_pos = self.buckets[d].len() as u32;
        self.buckets[d].push(v);
        self.max_hint = self.max_hint.max(d);
        self.excess4 += excess_term(d);
    }

    fn bucket_remove(&mut self, v: VertexId, d: usize) {
        let pos = self.verts[v.index()].bucket_pos as usize;
        let bucket = &mut self.buckets[d];
        bucket.swap_remove(pos);
        if pos < bucket.len() {
            let moved = bucket[pos];
            self.verts[moved.index()].bucket_pos = pos as u32;
        }
        self.excess4 -= excess_term(d);
        if d == self.max_hint {
            while self.max_hint > 0 && self.buckets[self.max_hint].is_empty() {
                self.max_hint -= 1;
            }
        }
    }

    fn bucket_move(&mut self, v: VertexId, from: usize, to: usize) {
        self.bucket_remove(v, from);
        self.bucket_insert(v, to);
    }
}
