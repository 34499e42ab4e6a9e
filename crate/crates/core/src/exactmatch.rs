//! Exact maximum-cardinality matching and the small-graph oracles used to check it.
//!
//! Parallel edges are collapsed before matching: a matching never uses two
//! copies of the same pair, so ν is unaffected.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::construct::Matching;
use crate::error::{Error, Result};
use crate::multigraph::{EdgeId, MultiGraph, VertexId};

/// Largest graph accepted by [`max_matching_bruteforce`].
pub const BRUTEFORCE_CAP: usize = 14;
/// Largest graph accepted by [`tutte_berge_deficiency`].
pub const TUTTE_BERGE_CAP: usize = 16;

const NONE: usize = usize::MAX;

/// Live vertices relabelled to `0..n`, with simple adjacency lists and one
/// representative edge id per adjacent pair.
struct Compact {
    ids: Vec<VertexId>,
    adj: Vec<Vec<usize>>,
    edge_of: HashMap<(usize, usize), EdgeId>,
}

impl Compact {
    fn new(g: &MultiGraph) -> Self {
        let ids: Vec<VertexId> = g.live_vertices().collect();
        let mut index = vec![NONE; g.vertex_capacity()];
        for (i, v) in ids.iter().enumerate() {
            index[v.index()] = i;
        }
        let mut adj = vec![Vec::new(); ids.len()];
        let mut edge_of = HashMap::new();
        for e in g.live_edges() {
            let (a, b) = g.endpoints(e);
            let (a, b) = (index[a.index()], index[b.index()]);
            let key = (a.min(b), a.max(b));
            if let std::collections::hash_map::Entry::Vacant(slot) = edge_of.entry(key) {
                slot.insert(e);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        Compact { ids, adj, edge_of }
    }

    fn to_matching(&self, mate: &[usize]) -> Matching {
        let edges = mate
            .iter()
            .enumerate()
            .filter(|&(v, &m)| m != NONE && v < m)
            .map(|(v, &m)| self.edge_of[&(v, m)])
            .collect();
        Matching::new(edges)
    }
}

/// Maximum-cardinality matching by augmenting paths with blossom shrinking.
pub fn max_matching(g: &MultiGraph) -> Matching {
    let c = Compact::new(g);
    let mate = Blossom::new(&c.adj).solve();
    c.to_matching(&mate)
}

/// Size of a maximum matching, ν(G).
pub fn matching_number(g: &MultiGraph) -> usize {
    max_matching(g).len()
}

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl<'a> Blossom<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        Blossom {
            adj,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn solve(mut self) -> Vec<usize> {
        let n = self.adj.len();
        // Greedy start, lowest-degree vertices first.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| self.adj[v].len());
        for &v in &order {
            if self.mate[v] == NONE {
                if let Some(&u) = self.adj[v].iter().find(|&&u| self.mate[u] == NONE) {
                    self.mate[v] = u;
                    self.mate[u] = v;
                }
            }
        }
        for root in 0..n {
            if self.mate[root] != NONE {
                continue;
            }
            let end = self.find_path(root);
            let mut v = end;
            while v != NONE {
                let pv = self.parent[v];
                let next = self.mate[pv];
                self.mate[v] = pv;
                self.mate[pv] = v;
                v = next;
            }
        }
        self.mate
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// BFS for an augmenting path from `root`; returns its free endpoint or `NONE`.
    fn find_path(&mut self, root: usize) -> usize {
        let n = self.adj.len();
        self.used.fill(false);
        self.parent.fill(NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for k in 0..self.adj[v].len() {
                let to = self.adj[v][k];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.fill(false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return to;
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        NONE
    }
}

/// Exhaustive maximum matching for graphs with at most [`BRUTEFORCE_CAP`] vertices.
pub fn max_matching_bruteforce(g: &MultiGraph) -> Result<Matching> {
    let c = Compact::new(g);
    let n = c.ids.len();
    if n > BRUTEFORCE_CAP {
        return Err(Error::SizeCap { n, cap: BRUTEFORCE_CAP });
    }
    let full = (1u32 << n) - 1;
    // best[mask] = maximum matching size on the vertices outside `mask`.
    let mut best = vec![u8::MAX; 1 << n];
    fn solve(mask: u32, full: u32, adj: &[Vec<usize>], best: &mut [u8]) -> u8 {
        if mask == full {
            return 0;
        }
        if best[mask as usize] != u8::MAX {
            return best[mask as usize];
        }
        let v = (!mask).trailing_zeros() as usize;
        let with_v = mask | (1 << v);
        let mut r = solve(with_v, full, adj, best);
        for &u in &adj[v] {
            if with_v & (1 << u) == 0 {
                r = r.max(1 + solve(with_v | (1 << u), full, adj, best));
            }
        }
        best[mask as usize] = r;
        r
    }
    let mut mate = vec![NONE; n];
    let mut mask = 0u32;
    while mask != full {
        let target = solve(mask, full, &c.adj, &mut best);
        let v = (!mask).trailing_zeros() as usize;
        let with_v = mask | (1 << v);
        let pick = c.adj[v].iter().copied().find(|&u| {
            with_v & (1 << u) == 0 && 1 + solve(with_v | (1 << u), full, &c.adj, &mut best) == target
        });
        match pick {
            Some(u) => {
                mate[v] = u;
                mate[u] = v;
                mask = with_v | (1 << u);
            }
            None => mask = with_v,
        }
    }
    Ok(c.to_matching(&mate))
}

/// q(V ∖ W): odd-order components of `g − W`.
pub fn odd_components(g: &MultiGraph, w: &[VertexId]) -> usize {
    let mut removed = vec![false; g.vertex_capacity()];
    for &x in w {
        removed[x.index()] = true;
    }
    let mut seen = removed;
    let mut odd = 0;
    let mut stack = Vec::new();
    for s in g.live_vertices() {
        if seen[s.index()] {
            continue;
        }
        seen[s.index()] = true;
        stack.push(s);
        let mut size = 0usize;
        while let Some(x) = stack.pop() {
            size += 1;
            for &e in g.incident_edges(x) {
                let y = g.opposite(e, x);
                if !seen[y.index()] {
                    seen[y.index()] = true;
                    stack.push(y);
                }
            }
        }
        odd += size % 2;
    }
    odd
}

/// A Tutte–Berge minimiser: ν(G) = ½(|V| + |W| − q(V ∖ W)).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeficiencyCertificate {
    pub witness: Vec<VertexId>,
    pub odd_components: usize,
    pub value: usize,
}

/// Minimises the Tutte–Berge bound over every subset W (graphs up to [`TUTTE_BERGE_CAP`] vertices).
pub fn tutte_berge_deficiency(g: &MultiGraph) -> Result<DeficiencyCertificate> {
    let c = Compact::new(g);
    let n = c.ids.len();
    if n > TUTTE_BERGE_CAP {
        return Err(Error::SizeCap { n, cap: TUTTE_BERGE_CAP });
    }
    let nbr: Vec<u32> = c.adj.iter().map(|l| l.iter().fold(0u32, |m, &u| m | (1 << u))).collect();
    let full: u32 = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    let mut best: Option<(usize, u32, usize)> = None;
    for w in 0..=full {
        let mut rest = full & !w;
        let mut q = 0;
        while rest != 0 {
            let mut comp = rest & rest.wrapping_neg();
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = nbr[v] & rest & !comp;
                comp |= fresh;
                frontier |= fresh;
            }
            q += (comp.count_ones() % 2) as usize;
            rest &= !comp;
        }
        let value = (n + w.count_ones() as usize - q) / 2;
        if best.is_none_or(|(b, _, _)| value < b) {
            best = Some((value, w, q));
        }
        if w == full {
            break;
        }
    }
    let (value, w, q) = best.expect("at least the empty witness is evaluated");
    let witness = (0..n).filter(|&i| w & (1 << i) != 0).map(|i| c.ids[i]).collect();
    Ok(DeficiencyCertificate { witness, odd_components: q, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configmodel::{sample_no_loops, DegreeSequence, DEFAULT_MAX_RETRIES};
    use crate::rng::from_seed;
    use rand::Rng;

    fn petersen() -> MultiGraph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        MultiGraph::build(10, &e).unwrap()
    }

    fn star(k: usize) -> MultiGraph {
        MultiGraph::build(k + 1, &(1..=k).map(|i| (0, i)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn small_cases() {
        let k4 = MultiGraph::build(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(matching_number(&k4), 2);
        let p3 = MultiGraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(matching_number(&p3), 1);
        let tri = MultiGraph::build(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(max_matching_bruteforce(&tri).unwrap().len(), 1);
        let bond = MultiGraph::build(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        assert_eq!(max_matching_bruteforce(&bond).unwrap().len(), 1);
        assert_eq!(matching_number(&bond), 1);
    }

    #[test]
    fn petersen_has_perfect_matching() {
        let p = petersen();
        let bf = max_matching_bruteforce(&p).unwrap();
        bf.validate(&p).unwrap();
        assert_eq!(bf.len(), 5);
        let m = max_matching(&p);
        m.validate(&p).unwrap();
        assert_eq!(m.len(), 5);
        assert_eq!(odd_components(&p, &[VertexId(0)]), 1);
    }

    #[test]
    fn odd_component_examples() {
        let k4 = MultiGraph::build(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(odd_components(&k4, &[]), 0);
        assert_eq!(odd_components(&star(3), &[VertexId(0)]), 3);
    }

    #[test]
    fn tutte_berge_examples() {
        let k4 = MultiGraph::build(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let c = tutte_berge_deficiency(&k4).unwrap();
        assert_eq!(c.value, 2);
        assert!(c.witness.is_empty());
        let c = tutte_berge_deficiency(&star(3)).unwrap();
        assert_eq!(c.value, 1);
        assert_eq!(c.witness, vec![VertexId(0)]);
        assert_eq!(c.odd_components, 3);
    }

    #[test]
    fn caps_are_enforced() {
        let big = MultiGraph::build(20, &[]).unwrap();
        assert!(matches!(max_matching_bruteforce(&big), Err(Error::SizeCap { .. })));
        assert!(matches!(tutte_berge_deficiency(&big), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn blossom_agrees_with_bruteforce_on_random_graphs() {
        let mut rng = from_seed(99);
        for _ in 0..300 {
            let n = rng.gen_range(1..=12);
            let m = rng.gen_range(0..=2 * n);
            let pairs: Vec<(usize, usize)> = (0..m)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .filter(|(a, b)| a != b)
                .collect();
            let g = MultiGraph::build(n, &pairs).unwrap();
            let fast = max_matching(&g);
            fast.validate(&g).unwrap();
            assert_eq!(fast.len(), max_matching_bruteforce(&g).unwrap().len());
            assert_eq!(fast.len(), tutte_berge_deficiency(&g).unwrap().value);
        }
    }

    #[test]
    fn random_configuration_graphs_have_perfect_matchings() {
        let mut perfect = 0;
        for seed in 0..100u64 {
            let n = 50 + 2 * (seed as usize % 50);
            let (d, _) = DegreeSequence::with_deg4_fraction(n, 0.5).unwrap();
            let g = sample_no_loops(&d, &mut from_seed(seed), DEFAULT_MAX_RETRIES).unwrap().into_graph(n).unwrap();
            let m = max_matching(&g);
            m.validate(&g).unwrap();
            perfect += usize::from(m.len() == n / 2);
        }
        assert!(perfect >= 95, "{perfect}/100");
    }
}
