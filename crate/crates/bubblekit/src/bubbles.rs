//! Bubble listing: the linear-delay adaptation of pruned backtracking on a
//! doubled graph, the bounded-length polynomial-delay partition algorithm,
//! the d-disjoint-path existence check, the pruned cDBG backtracking
//! enumerator, and bubble classification.
//!
//! An (s,t)-bubble is a pair of internally vertex-disjoint st-paths. The
//! doubled graph turns bubbles with source s into twin-free cycles through s
//! with one swap arc; enumerating those cycles with a block/unblock strategy
//! gives linear delay per bubble. The weighted variant partitions the
//! solution space over the arcs of one frontier endpoint, testing
//! non-emptiness with truncated shortest-path trees before every recursive
//! call.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::dbg::{revcomp_str, BidirectedDbg, Strand};
use crate::graph::{
    dijkstra_visit, GraphError, OpCounter, Weight, WeightedDigraph, INF,
};

/// A bubble in a directed graph: two internally vertex-disjoint st-paths,
/// stored with len1 >= len2 (ties broken by vertex sequence).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bubble {
    pub source: usize,
    pub target: usize,
    pub path1: Vec<usize>,
    pub path2: Vec<usize>,
    pub len1: Weight,
    pub len2: Weight,
}

impl Bubble {
    /// Canonical form: path1 is the (weight, sequence)-larger path.
    pub fn new(source: usize, target: usize, pa: Vec<usize>, wa: Weight, pb: Vec<usize>, wb: Weight) -> Self {
        debug_assert!(pa.first() == Some(&source) && pa.last() == Some(&target));
        debug_assert!(pb.first() == Some(&source) && pb.last() == Some(&target));
        if (wa, &pa) >= (wb, &pb) {
            Bubble { source, target, path1: pa, path2: pb, len1: wa, len2: wb }
        } else {
            Bubble { source, target, path1: pb, path2: pa, len1: wb, len2: wa }
        }
    }

    /// The two paths share only their endpoints.
    pub fn internally_disjoint(&self) -> bool {
        let inner1: BTreeSet<usize> =
            self.path1[1..self.path1.len() - 1].iter().copied().collect();
        self.path2[1..self.path2.len() - 1].iter().all(|v| !inner1.contains(v))
    }
}

/// The doubled graph G'_s: a reversed copy glued onto G, twin arcs from each
/// vertex to its copy, no arcs into s, none out of s-bar, and the single
/// closing arc (s-bar, s). Vertex v-bar is v + n.
#[derive(Debug, Clone)]
pub struct TransformedGraph {
    pub n_base: usize,
    pub s: usize,
    adj: Vec<Vec<usize>>,
    base_out: Vec<Vec<usize>>,
    base_in: Vec<Vec<usize>>,
}

impl TransformedGraph {
    pub fn twin(&self, v: usize) -> usize {
        if v < self.n_base {
            v + self.n_base
        } else {
            v - self.n_base
        }
    }

    pub fn n(&self) -> usize {
        2 * self.n_base
    }

    pub fn out(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn arc_count(&self) -> usize {
        self.adj.iter().map(|l| l.len()).sum()
    }

    /// Rebuild the adjacency for the current source.
    fn rebuild(&mut self) {
        let n = self.n_base;
        let s = self.s;
        for l in &mut self.adj {
            l.clear();
        }
        for u in 0..n {
            for &v in &self.base_out[u] {
                if v != s {
                    self.adj[u].push(v);
                    self.adj[v + n].push(u + n);
                }
            }
        }
        for v in 0..n {
            if v != s {
                self.adj[v].push(v + n);
            }
        }
        self.adj[s + n].push(s);
        for l in &mut self.adj {
            l.sort_unstable();
            l.dedup();
        }
    }

    /// Move the source from the current vertex to `new_s` by swapping only
    /// the arcs that differ between the two transformations.
    pub fn reroot(&mut self, new_s: usize) {
        let n = self.n_base;
        let old = self.s;
        if old == new_s {
            return;
        }
        let remove = |adj: &mut Vec<Vec<usize>>, from: usize, to: usize| {
            if let Some(p) = adj[from].iter().position(|&x| x == to) {
                adj[from].remove(p);
            }
        };
        let insert = |adj: &mut Vec<Vec<usize>>, from: usize, to: usize| {
            if let Err(p) = adj[from].binary_search(&to) {
                adj[from].insert(p, to);
            }
        };
        // Old source becomes ordinary: restore its twin arc and incoming arcs.
        remove(&mut self.adj, old + n, old);
        insert(&mut self.adj, old, old + n);
        for &v in &self.base_in[old] {
            insert(&mut self.adj, v, old);
            insert(&mut self.adj, old + n, v + n);
        }
        // New source: drop its twin arc and incoming arcs, add the closer.
        remove(&mut self.adj, new_s, new_s + n);
        for &v in &self.base_in[new_s] {
            remove(&mut self.adj, v, new_s);
            remove(&mut self.adj, new_s + n, v + n);
        }
        insert(&mut self.adj, new_s + n, new_s);
        self.s = new_s;
    }
}

/// Build G'_s for a digraph (weights are ignored; parallel arcs collapse).
pub fn transform_bubble_graph(g: &WeightedDigraph, s: usize) -> TransformedGraph {
    let n = g.n();
    let mut base_out = vec![Vec::new(); n];
    let mut base_in = vec![Vec::new(); n];
    for u in 0..n {
        for &(v, _) in g.out(u) {
            base_out[u].push(v);
            base_in[v].push(u);
        }
    }
    for l in base_out.iter_mut().chain(base_in.iter_mut()) {
        l.sort_unstable();
        l.dedup();
    }
    let mut t = TransformedGraph { n_base: n, s, adj: vec![Vec::new(); 2 * n], base_out, base_in };
    t.rebuild();
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Free,
    Blocked,
    Twinned,
}

struct JohnsonState<'a, F: FnMut(Bubble)> {
    t: &'a TransformedGraph,
    g: &'a WeightedDigraph,
    status: Vec<Status>,
    blist: Vec<Vec<usize>>,
    stack: Vec<usize>,
    emit: F,
    emitted: u64,
}

impl<'a, F: FnMut(Bubble)> JohnsonState<'a, F> {
    fn ops(&self) -> &OpCounter {
        &self.g.ops
    }

    fn unblock(&mut self, v: usize) {
        self.status[v] = Status::Free;
        self.ops().bump(1);
        let mut list = std::mem::take(&mut self.blist[v]);
        for w in list.drain(..) {
            self.ops().bump(1);
            if self.status[w] == Status::Blocked {
                self.unblock(w);
            }
        }
    }

    /// Weight of the arc (u, v) in the base graph (minimum over parallels).
    fn arc_weight(&self, u: usize, v: usize) -> Weight {
        self.g
            .out(u)
            .iter()
            .filter(|&&(x, _)| x == v)
            .map(|&(_, w)| w)
            .min()
            .expect("arc of the doubled graph missing in the base graph")
    }

    fn output_cycle(&mut self) {
        // stack = [s, ..., v in V-bar]; the full cycle appends s-bar.
        let n = self.t.n_base;
        let s = self.t.s;
        if self.stack.len() < 4 {
            return; // cycles of size four correspond to single out-arcs of s
        }
        let swap_pos = (0..self.stack.len() - 1)
            .find(|&i| self.stack[i] < n && self.stack[i + 1] == self.stack[i] + n)
            .expect("bipolar cycle without swap arc");
        let ord = |v: usize| if v < n { v } else { v - n };
        let pred = ord(self.stack[swap_pos - 1]);
        let succ = if swap_pos + 2 < self.stack.len() {
            ord(self.stack[swap_pos + 2])
        } else {
            s // the vertex after t-bar is s-bar, same order as s
        };
        // One-to-one rule: emit only the orientation with the larger swap
        // predecessor; kills the mirrored duplicate deterministically.
        if pred <= succ {
            return;
        }
        let target = self.stack[swap_pos];
        let pa: Vec<usize> = self.stack[..=swap_pos].to_vec();
        let mut pb: Vec<usize> = self.stack[swap_pos + 1..].iter().map(|&x| x - n).collect();
        pb.reverse();
        let mut full_b = Vec::with_capacity(pb.len() + 1);
        full_b.push(s);
        full_b.extend(pb);
        let wa: Weight = pa.windows(2).map(|w| self.arc_weight(w[0], w[1])).sum();
        let wb: Weight = full_b.windows(2).map(|w| self.arc_weight(w[0], w[1])).sum();
        self.emitted += 1;
        (self.emit)(Bubble::new(s, target, pa, wa, full_b, wb));
    }

    fn cyclebubble(&mut self, v: usize) -> bool {
        let n = self.t.n_base;
        let sbar = self.t.s + n;
        let mut found = false;
        self.stack.push(v);
        self.status[v] = Status::Blocked;
        self.ops().bump(1);
        if v < n {
            let twin = v + n;
            if self.status[twin] == Status::Free {
                self.status[twin] = Status::Twinned;
                self.ops().bump(1);
            }
            // All non-twin out-neighbors first, the twin last; the reverse
            // order misses bubbles.
            for i in 0..self.t.out(v).len() {
                let w = self.t.out(v)[i];
                self.ops().bump(1);
                if w < n && self.status[w] == Status::Free && self.cyclebubble(w) {
                    found = true;
                }
            }
            if self.status[twin] == Status::Twinned && self.cyclebubble(twin) {
                found = true;
            }
        } else {
            for i in 0..self.t.out(v).len() {
                let w = self.t.out(v)[i];
                self.ops().bump(1);
                if w == sbar {
                    self.output_cycle();
                    found = true;
                } else if w < 2 * n && self.status[w] == Status::Free && self.cyclebubble(w) {
                    found = true;
                }
            }
        }
        if found {
            self.unblock(v);
        } else {
            for i in 0..self.t.out(v).len() {
                let w = self.t.out(v)[i];
                self.ops().bump(1);
                if !self.blist[w].contains(&v) {
                    self.blist[w].push(v);
                }
            }
        }
        self.stack.pop();
        found
    }
}

/// List every (s,t)-bubble for all t, each exactly once, with linear delay,
/// invoking `emit` per bubble. Path lengths are arc-weight sums (hop counts
/// on unit-weight graphs). Returns the number of bubbles.
pub fn list_bubbles_linear_delay_with<F: FnMut(Bubble)>(
    g: &WeightedDigraph,
    s: usize,
    emit: F,
) -> u64 {
    let t = transform_bubble_graph(g, s);
    list_bubbles_on_transform(g, &t, emit)
}

/// Same, reusing an already built (possibly rerooted) transform.
pub fn list_bubbles_on_transform<F: FnMut(Bubble)>(
    g: &WeightedDigraph,
    t: &TransformedGraph,
    emit: F,
) -> u64 {
    let mut st = JohnsonState {
        t,
        g,
        status: vec![Status::Free; t.n()],
        blist: vec![Vec::new(); t.n()],
        stack: Vec::new(),
        emit,
        emitted: 0,
    };
    st.cyclebubble(t.s);
    st.emitted
}

pub fn list_bubbles_linear_delay(g: &WeightedDigraph, s: usize) -> Vec<Bubble> {
    let mut out = Vec::new();
    list_bubbles_linear_delay_with(g, s, |b| out.push(b));
    out
}

/// All bubbles for every source, using incremental rerooting of the doubled
/// graph between sources.
pub fn list_all_bubbles(g: &WeightedDigraph) -> Vec<Bubble> {
    let mut out = Vec::new();
    if g.n() == 0 {
        return out;
    }
    let mut t = transform_bubble_graph(g, 0);
    for s in 0..g.n() {
        t.reroot(s);
        list_bubbles_on_transform(g, &t, |b| out.push(b));
    }
    out
}

/// True iff a pair of compatible paths exists: some t with
/// d(s1, t) <= a1 and d(s2, t) <= a2 (two truncated shortest-path trees
/// intersect). Requires s1 != s2 and non-negative weights.
pub fn compatible_pair_exists(
    g: &WeightedDigraph,
    s1: usize,
    a1: Weight,
    s2: usize,
    a2: Weight,
) -> Result<bool, GraphError> {
    if s1 == s2 {
        return Err(GraphError::SameEndpoints);
    }
    if g.has_negative_weights() {
        return Err(GraphError::NegativeWeight { u: 0, v: 0, w: -1 });
    }
    let d1 = dijkstra_visit(
        g.n(),
        |u, f| {
            for &(v, w) in g.out(u) {
                f(v, w);
            }
        },
        &g.ops,
        &[(s1, 0)],
        Some(a1),
    );
    let d2 = dijkstra_visit(
        g.n(),
        |u, f| {
            for &(v, w) in g.out(u) {
                f(v, w);
            }
        },
        &g.ops,
        &[(s2, 0)],
        Some(a2),
    );
    Ok((0..g.n()).any(|t| d1[t] != INF && d2[t] != INF))
}

/// Batch variant: for every out-arc (u, v) of `u`, decide whether a pair of
/// compatible paths for (s1, a1) and (v, a2 - w(u,v)) exists in G - u. One
/// forward tree from s1 plus one reverse multi-source tree (the auxiliary
/// sink over all vertices within a1) answer every test in O(1).
pub fn compatible_pairs_batch(
    g: &WeightedDigraph,
    s1: usize,
    a1: Weight,
    u: usize,
    a2: Weight,
) -> Result<Vec<bool>, GraphError> {
    if g.has_negative_weights() {
        return Err(GraphError::NegativeWeight { u: 0, v: 0, w: -1 });
    }
    let d1 = dijkstra_visit(
        g.n(),
        |x, f| {
            if x != u {
                for &(v, w) in g.out(x) {
                    if v != u {
                        f(v, w);
                    }
                }
            }
        },
        &g.ops,
        &[(s1, 0)],
        Some(a1),
    );
    let sources: Vec<(usize, Weight)> = (0..g.n())
        .filter(|&y| y != u && d1[y] != INF)
        .map(|y| (y, 0))
        .collect();
    let drev = dijkstra_visit(
        g.n(),
        |x, f| {
            if x != u {
                for &(v, w) in g.rin(x) {
                    if v != u {
                        f(v, w);
                    }
                }
            }
        },
        &g.ops,
        &sources,
        Some(a2),
    );
    Ok(g.out(u)
        .iter()
        .map(|&(v, w)| v != u && drev[v] != INF && drev[v] <= a2.saturating_sub(w))
        .collect())
}

/// Enumerator state for the bounded-length bubble listing.
struct BoundedState<'g, F: FnMut(Bubble)> {
    g: &'g WeightedDigraph,
    alive: Vec<bool>,
    /// removed[u][i]: the i-th out-arc of u is deleted in the current view.
    removed: Vec<Vec<bool>>,
    a1: Weight,
    a2: Weight,
    emit: F,
    emitted: u64,
}

impl<'g, F: FnMut(Bubble)> BoundedState<'g, F> {
    fn out_alive(&self, u: usize) -> Vec<(usize, usize, Weight)> {
        self.g
            .out(u)
            .iter()
            .enumerate()
            .filter(|&(i, &(v, _))| !self.removed[u][i] && self.alive[v])
            .map(|(i, &(v, w))| (i, v, w))
            .collect()
    }

    fn dist_from(&self, src: usize, bound: Weight, skip: Option<usize>) -> Vec<Weight> {
        dijkstra_visit(
            self.g.n(),
            |x, f| {
                if self.alive[x] && Some(x) != skip {
                    for (i, &(v, w)) in self.g.out(x).iter().enumerate() {
                        if !self.removed[x][i] && self.alive[v] && Some(v) != skip {
                            f(v, w);
                        }
                    }
                }
            },
            &self.g.ops,
            &[(src, 0)],
            Some(bound),
        )
    }

    /// Reverse multi-source tree from every vertex of `targets` (distance 0).
    fn dist_rev_multi(&self, targets: &[usize], bound: Weight, skip: Option<usize>) -> Vec<Weight> {
        let sources: Vec<(usize, Weight)> = targets.iter().map(|&t| (t, 0)).collect();
        dijkstra_visit(
            self.g.n(),
            |x, f| {
                if self.alive[x] && Some(x) != skip {
                    // reverse arcs, respecting forward-side removal marks
                    for &(v, w) in self.g.rin(x) {
                        if !self.alive[v] || Some(v) == skip {
                            continue;
                        }
                        // find the forward arc indices v -> x that are alive
                        for (i, &(y, wy)) in self.g.out(v).iter().enumerate() {
                            if y == x && wy == w && !self.removed[v][i] {
                                f(v, w);
                                break;
                            }
                        }
                    }
                }
            },
            &self.g.ops,
            &sources,
            Some(bound),
        )
    }

    /// Emit the pair, once: either this role assignment has the larger
    /// (weight, path) key on the alpha1 side, or the mirrored assignment is
    /// infeasible and can never be reached.
    fn close(&mut self, p1: &[usize], w1: Weight, p2: &[usize], w2: Weight) {
        let key1 = (w1, p1);
        let key2 = (w2, p2);
        let mirror_feasible = w1 <= self.a2 && w2 <= self.a1;
        if key1 > key2 || !mirror_feasible {
            self.emitted += 1;
            (self.emit)(Bubble::new(
                p1[0],
                *p1.last().unwrap(),
                p1.to_vec(),
                w1,
                p2.to_vec(),
                w2,
            ));
        }
    }

    /// Recursive binary partition: (x1, rem1) and (x2, rem2) are the two
    /// frontier endpoints with remaining budgets; p1/p2 the paths so far.
    fn recurse(
        &mut self,
        x1: usize,
        rem1: Weight,
        x2: usize,
        rem2: Weight,
        p1: &mut Vec<usize>,
        p2: &mut Vec<usize>,
        w1: Weight,
        w2: Weight,
    ) {
        debug_assert!(x1 != x2);
        let out1 = self.out_alive(x1);
        let out2 = self.out_alive(x2);
        // Expand the endpoint with the smaller branching; it must have
        // out-arcs for the partition to progress.
        let (u, o, rem_u, rem_o, extend_first) = if out2.is_empty()
            || (!out1.is_empty() && out1.len() <= out2.len())
        {
            (x1, x2, rem1, rem2, true)
        } else {
            (x2, x1, rem2, rem1, false)
        };
        let out_u = if extend_first { out1 } else { out2 };
        if out_u.is_empty() {
            return;
        }

        // Batch test for the include branches: one tree from the other
        // endpoint, one reverse tree from its truncated ball, in G - u.
        let d_o = self.dist_from(o, rem_o, Some(u));
        let targets: Vec<usize> = (0..self.g.n()).filter(|&t| d_o[t] != INF).collect();
        let drev = self.dist_rev_multi(&targets, rem_u, Some(u));

        for &(arc_idx, v, w) in &out_u {
            self.g.ops.bump(1);
            if v == o {
                // Closure: the expanding path ends exactly at the other
                // endpoint; both paths are complete.
                if w <= rem_u {
                    if extend_first {
                        p1.push(v);
                        self.close(&p1.clone(), w1 + w, &p2.clone(), w2);
                        p1.pop();
                    } else {
                        p2.push(v);
                        self.close(&p1.clone(), w1, &p2.clone(), w2 + w);
                        p2.pop();
                    }
                }
                continue;
            }
            if w > rem_u || drev[v] == INF || drev[v] > rem_u - w {
                continue; // no compatible pair through this arc
            }
            self.alive[u] = false;
            if extend_first {
                p1.push(v);
                self.recurse(v, rem_u - w, o, rem_o, p1, p2, w1 + w, w2);
                p1.pop();
            } else {
                p2.push(v);
                self.recurse(o, rem_o, v, rem_u - w, p1, p2, w1, w2 + w);
                p2.pop();
            }
            self.alive[u] = true;
            let _ = arc_idx;
        }

        // Exclude branch: delete all out-arcs of u, continue if a compatible
        // pair still exists (u can now only be the common target).
        let marks: Vec<usize> = out_u.iter().map(|&(i, _, _)| i).collect();
        for &i in &marks {
            self.removed[u][i] = true;
        }
        let d1 = self.dist_from(x1, rem1, None);
        let d2 = self.dist_from(x2, rem2, None);
        self.g.ops.bump(1);
        if (0..self.g.n()).any(|t| d1[t] != INF && d2[t] != INF) {
            self.recurse(x1, rem1, x2, rem2, p1, p2, w1, w2);
        }
        for &i in &marks {
            self.removed[u][i] = false;
        }
    }
}

/// List all (s,t,a1,a2)-bubbles for every t, each exactly once. Lengths are
/// arc-weight sums; a pair counts when its longer path fits the larger bound
/// and its shorter the smaller (either role assignment).
pub fn list_bounded_bubbles_with<F: FnMut(Bubble)>(
    g: &WeightedDigraph,
    s: usize,
    a1: Weight,
    a2: Weight,
    emit: F,
) -> Result<u64, GraphError> {
    if g.has_negative_weights() {
        return Err(GraphError::NegativeWeight { u: 0, v: 0, w: -1 });
    }
    if s >= g.n() {
        return Err(GraphError::VertexNotFound(s));
    }
    let mut st = BoundedState {
        g,
        alive: vec![true; g.n()],
        removed: (0..g.n()).map(|u| vec![false; g.out(u).len()]).collect(),
        a1,
        a2,
        emit,
        emitted: 0,
    };
    // Root: fix the first arcs of both roles (ordered pairs of distinct
    // out-arcs of s); each unordered bubble is reached by exactly the
    // assignments that satisfy the bounds, and `close` dedups to one.
    st.alive[s] = false;
    let first: Vec<(usize, usize, Weight)> = g
        .out(s)
        .iter()
        .enumerate()
        .map(|(i, &(v, w))| (i, v, w))
        .collect();
    for &(_, a, wa) in &first {
        if wa > a1 {
            continue;
        }
        for &(_, b, wb) in &first {
            if b == a || wb > a2 {
                continue;
            }
            g.ops.bump(1);
            // Compatible pair for (a, rem1) and (b, rem2) in G - s; b itself
            // may be the common target, so nothing else is skipped.
            let da = st.dist_from(a, a1 - wa, None);
            let db = st.dist_from(b, a2 - wb, None);
            if !(0..g.n()).any(|t| da[t] != INF && db[t] != INF) {
                continue;
            }
            let mut p1 = vec![s, a];
            let mut p2 = vec![s, b];
            st.recurse(a, a1 - wa, b, a2 - wb, &mut p1, &mut p2, wa, wb);
        }
    }
    st.alive[s] = true;
    Ok(st.emitted)
}

pub fn list_bounded_bubbles(
    g: &WeightedDigraph,
    s: usize,
    a1: Weight,
    a2: Weight,
) -> Result<Vec<Bubble>, GraphError> {
    let mut out = Vec::new();
    list_bounded_bubbles_with(g, s, a1, a2, |b| out.push(b))?;
    Ok(out)
}

/// Decide whether d pairwise internally vertex-disjoint st-paths exist:
/// vertex splitting to unit capacities, then up to d augmenting-path rounds.
/// Optionally returns the d paths from the flow decomposition.
pub fn d_bubble_exists(
    g: &WeightedDigraph,
    s: usize,
    t: usize,
    d: usize,
) -> (bool, Option<Vec<Vec<usize>>>) {
    assert!(d >= 1);
    if s == t || s >= g.n() || t >= g.n() {
        return (false, None);
    }
    let n = g.n();
    // Split: v_in = 2v, v_out = 2v+1. Residual adjacency with unit caps.
    let size = 2 * n;
    let mut cap = std::collections::HashMap::<(usize, usize), i32>::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); size];
    let add = |cap: &mut std::collections::HashMap<(usize, usize), i32>,
                   adj: &mut Vec<Vec<usize>>,
                   a: usize,
                   b: usize,
                   c: i32| {
        if !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
        *cap.entry((a, b)).or_insert(0) += c;
        cap.entry((b, a)).or_insert(0);
    };
    for v in 0..n {
        let c = if v == s || v == t { d as i32 } else { 1 };
        add(&mut cap, &mut adj, 2 * v, 2 * v + 1, c);
    }
    for u in 0..n {
        for &(v, _) in g.out(u) {
            add(&mut cap, &mut adj, 2 * u + 1, 2 * v, 1);
        }
    }
    let (src, sink) = (2 * s + 1, 2 * t);
    let mut flow = 0usize;
    while flow < d {
        // BFS augmenting path in the residual graph.
        let mut pred = vec![usize::MAX; size];
        pred[src] = src;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(src);
        while let Some(x) = queue.pop_front() {
            g.ops.bump(1);
            for &y in &adj[x] {
                g.ops.bump(1);
                if pred[y] == usize::MAX && cap[&(x, y)] > 0 {
                    pred[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if pred[sink] == usize::MAX {
            break;
        }
        let mut y = sink;
        while y != src {
            let x = pred[y];
            *cap.get_mut(&(x, y)).unwrap() -= 1;
            *cap.get_mut(&(y, x)).unwrap() += 1;
            y = x;
        }
        flow += 1;
    }
    if flow < d {
        return (false, None);
    }
    // Decompose: follow saturated out-arcs from s, d times.
    let mut used = std::collections::HashSet::<(usize, usize)>::new();
    let mut paths = Vec::with_capacity(d);
    for _ in 0..d {
        let mut path = vec![s];
        let mut x = s;
        while x != t {
            let out_x = 2 * x + 1;
            let mut next = None;
            for &y in &adj[out_x] {
                if y % 2 == 0 && y != 2 * x {
                    let key = (out_x, y);
                    // Saturated forward arc: residual 0 on a unit arc.
                    if cap[&key] == 0
                        && g.out(x).iter().any(|&(vv, _)| vv == y / 2)
                        && !used.contains(&key)
                    {
                        next = Some(y / 2);
                        used.insert(key);
                        break;
                    }
                }
            }
            match next {
                Some(v) => {
                    path.push(v);
                    x = v;
                }
                None => return (true, None), // flow met but decomposition bailed
            }
        }
        paths.push(path);
    }
    (true, Some(paths))
}

// ---------------------------------------------------------------------------
// cDBG bubbles: pruned backtracking, simple-bubble compression, classes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BubbleClass {
    Snp,
    Indel,
    Repeat,
    AlternativeSplicing,
    Unclassified,
}

impl std::fmt::Display for BubbleClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BubbleClass::Snp => "SNP",
            BubbleClass::Indel => "indel",
            BubbleClass::Repeat => "repeat",
            BubbleClass::AlternativeSplicing => "AS",
            BubbleClass::Unclassified => "unclassified",
        };
        f.write_str(s)
    }
}

/// A bubble in a cDBG with spelled sequences. Lengths are the spelled
/// lengths of the paths between the two switching vertices, endpoints
/// excluded but including the (k-1)-overlaps; seq1 is the longer path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CdbgBubble {
    pub s_left: usize,
    pub s_right: usize,
    pub len1: usize,
    pub len2: usize,
    pub seq1: String,
    pub seq2: String,
    pub path1: Vec<usize>,
    pub path2: Vec<usize>,
    pub class: BubbleClass,
    /// A split-graph path visited both strands of some node; the paper's
    /// nonequivalence case, reported rather than dropped.
    pub strand_inconsistent: bool,
}

/// Length and pruning constraints, in spelled nucleotides.
#[derive(Debug, Clone)]
pub struct BubbleConstraints {
    /// Upper bound on the longer path.
    pub alpha1: usize,
    /// Upper bound on the shorter path; 2k-2 catches splicing patterns.
    pub alpha2: usize,
    /// Lower bound on both paths.
    pub beta: usize,
    pub max_bubbles: usize,
    pub timeout: Duration,
}

impl BubbleConstraints {
    pub fn defaults_for_k(k: usize) -> Self {
        BubbleConstraints {
            alpha1: 1000,
            alpha2: 2 * k - 2,
            beta: (2 * k).saturating_sub(8),
            max_bubbles: 10_000,
            timeout: Duration::from_secs(900),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AsBubbleOutcome {
    pub bubbles: Vec<CdbgBubble>,
    pub truncated: bool,
    pub ops: u64,
}

struct TiernanState<'a> {
    g: &'a BidirectedDbg,
    cons: &'a BubbleConstraints,
    ops: OpCounter,
    // cycle under construction: nodes with (entering strand, leaving strand)
    nodes: Vec<usize>,
    leave: Vec<Strand>,
    enter: Vec<Strand>,
    on_path: Vec<bool>,
    flips: Vec<usize>, // positions (indices into nodes) of switching vertices
    out: Vec<CdbgBubble>,
    started: Instant,
    truncated: bool,
}

impl<'a> TiernanState<'a> {
    fn contrib(&self, v: usize) -> usize {
        self.g.contrib(v)
    }

    fn spell_segment(&self, idx: &[usize]) -> (usize, String) {
        // Spelled sequence of the cycle slice, endpoints included, then
        // trimmed to the bubble-path convention: drop the endpoint
        // contributions, keep the (k-1)-overlaps.
        let k = self.g.k;
        let mut s = self.g.nodes[self.nodes[idx[0]]].seq(self.leave[idx[0]]);
        for &i in &idx[1..] {
            let seq = self.g.nodes[self.nodes[i]].seq(self.enter[i]);
            s.push_str(&seq[k - 1..]);
        }
        let head = self.contrib(self.nodes[idx[0]]);
        let tail = self.contrib(self.nodes[idx[idx.len() - 1]]);
        let inner = s[head..s.len() - tail].to_string();
        (inner.len(), inner)
    }

    fn try_close(&mut self, closing_label: crate::dbg::ArcLabel) {
        // stack nodes form the cycle; closing arc returns to nodes[0].
        let m = self.nodes.len();
        if m < 4 {
            return;
        }
        // Flip at the start vertex: closing arc enters nodes[0] via
        // closing_label.1; the first arc leaves via leave[0].
        let mut flips = self.flips.clone();
        if closing_label.1 != self.leave[0] {
            flips.insert(0, 0);
        }
        if flips.len() != 2 {
            return;
        }
        // Also the closing arc must chain with the last vertex's leave
        // strand, which the caller guarantees (it chose the arc from the
        // current entering strand or flagged the flip).
        let (f1, f2) = (flips[0], flips[1]);
        let idx_a: Vec<usize> = (f1..=f2).collect();
        let mut idx_b: Vec<usize> = (f2..m).collect();
        idx_b.extend(0..=f1);
        // Both paths need at least one internal vertex or a direct junction;
        // compute spelled lengths with endpoint contributions dropped.
        // For the wrapped path the "entering" strand of position 0 is the
        // closing arc's strand; patch temporarily.
        let saved_enter0 = self.enter[0];
        self.enter[0] = closing_label.1;
        let (la, seq_a) = self.spell_segment(&idx_a);
        let (lb, seq_b) = self.spell_segment(&idx_b);
        self.enter[0] = saved_enter0;
        // Path B was spelled against the traversal (from f2 back to f1);
        // re-orient it so both sequences read in the same direction.
        let seq_b = revcomp_str(&seq_b);
        let (longer, shorter, seq_long, seq_short) =
            if la >= lb { (la, lb, seq_a.clone(), seq_b.clone()) } else { (lb, la, seq_b.clone(), seq_a.clone()) };
        if longer > self.cons.alpha1
            || shorter > self.cons.alpha2
            || shorter < self.cons.beta
            || longer < self.cons.beta
        {
            return;
        }
        // Direction dedup: each undirected cycle is walked both ways from
        // its minimal vertex; keep the one with the smaller second vertex.
        if self.nodes[1] > self.nodes[m - 1] {
            return;
        }
        let (sl, sr) = (self.nodes[f1], self.nodes[f2]);
        let path_long: Vec<usize>;
        let path_short: Vec<usize>;
        let pa: Vec<usize> = idx_a.iter().map(|&i| self.nodes[i]).collect();
        let pb: Vec<usize> = idx_b.iter().map(|&i| self.nodes[i]).collect();
        if la >= lb {
            path_long = pa;
            path_short = pb;
        } else {
            path_long = pb;
            path_short = pa;
        }
        self.out.push(CdbgBubble {
            s_left: sl.min(sr),
            s_right: sl.max(sr),
            len1: longer,
            len2: shorter,
            seq1: seq_long,
            seq2: seq_short,
            path1: path_long,
            path2: path_short,
            class: BubbleClass::Unclassified,
            strand_inconsistent: false,
        });
    }

    fn prune_lengths(&self) -> bool {
        // Vertices that have already fixed their leave strand are carved
        // into runs by the recorded switching positions; each run is a lower
        // bound for the internal spelled length of one bubble path.
        let k1 = self.g.k - 1;
        let m = self.nodes.len();
        let sum = |a: usize, b: usize| -> usize {
            if b <= a {
                0
            } else {
                self.nodes[a..b].iter().map(|&v| self.contrib(v)).sum()
            }
        };
        let a1 = self.cons.alpha1;
        match self.flips.len() {
            0 => k1 + sum(1, m - 1) > a1,
            1 => {
                let p = self.flips[0];
                k1 + sum(1, p) > a1 || k1 + sum(p + 1, m - 1) > a1
            }
            2 => {
                let (f1, f2) = (self.flips[0], self.flips[1]);
                // The segment between the switching vertices is a complete
                // bubble path; the rest is still growing.
                let done = k1 + sum(f1 + 1, f2);
                if done > a1 || done < self.cons.beta {
                    return true;
                }
                let grow = k1 + sum(f2 + 1, m - 1) + sum(1, f1);
                grow > a1 || (done > self.cons.alpha2 && grow > self.cons.alpha2)
            }
            _ => true,
        }
    }

    fn dfs(&mut self, v: usize, entered: Strand) {
        if self.truncated
            || self.out.len() >= self.cons.max_bubbles
            || self.started.elapsed() > self.cons.timeout
        {
            self.truncated = self.truncated
                || self.out.len() >= self.cons.max_bubbles
                || self.started.elapsed() > self.cons.timeout;
            return;
        }
        let start = self.nodes[0];
        for i in 0..self.g.out(v).len() {
            let (w, label) = self.g.out(v)[i];
            self.ops.bump(1);
            let flip_here = label.0 != entered;
            if w == start {
                // closing arc; record the flip at v if any, then check.
                if flip_here {
                    self.flips.push(self.nodes.len() - 1);
                }
                // patch leave strand of v for spelling
                let pos = self.nodes.len() - 1;
                let saved = self.leave[pos];
                self.leave[pos] = label.0;
                self.try_close(label);
                self.leave[pos] = saved;
                if flip_here {
                    self.flips.pop();
                }
                continue;
            }
            if w < start || self.on_path[w] {
                continue;
            }
            if flip_here && self.flips.len() >= 2 {
                continue; // more than two switching vertices
            }
            // extend
            let pos = self.nodes.len() - 1;
            let saved_leave = self.leave[pos];
            self.leave[pos] = label.0;
            if flip_here {
                self.flips.push(pos);
            }
            self.nodes.push(w);
            self.leave.push(label.1); // placeholder; updated when leaving w
            self.enter.push(label.1);
            self.on_path[w] = true;
            if !self.prune_lengths() {
                self.dfs(w, label.1);
            }
            self.on_path[w] = false;
            self.nodes.pop();
            self.leave.pop();
            self.enter.pop();
            if flip_here {
                self.flips.pop();
            }
            self.leave[pos] = saved_leave;
        }
    }
}

/// Pruned backtracking over the cDBG (an unconstrained DFS augmented with
/// the four pruning criteria): emits bubbles whose shorter path fits alpha2,
/// longer fits alpha1, both at least beta. Honors the bubble cap and the
/// per-call timeout, reporting truncation.
pub fn enumerate_as_bubbles(g: &BidirectedDbg, cons: &BubbleConstraints) -> AsBubbleOutcome {
    let mut st = TiernanState {
        g,
        cons,
        ops: OpCounter::default(),
        nodes: Vec::new(),
        leave: Vec::new(),
        enter: Vec::new(),
        on_path: vec![false; g.n()],
        flips: Vec::new(),
        out: Vec::new(),
        started: Instant::now(),
        truncated: false,
    };
    for s in 0..g.n() {
        if st.truncated {
            break;
        }
        // Start the cycle at s; the entering strand of s is fixed by the
        // closing arc, so explore both leaving strands.
        for leave0 in [Strand::F, Strand::R] {
            st.nodes.push(s);
            st.leave.push(leave0);
            st.enter.push(leave0);
            st.on_path[s] = true;
            for i in 0..g.out(s).len() {
                let (w, label) = g.out(s)[i];
                st.ops.bump(1);
                if label.0 != leave0 || w < s || w == s {
                    continue;
                }
                st.nodes.push(w);
                st.leave.push(label.1);
                st.enter.push(label.1);
                st.on_path[w] = true;
                if !st.prune_lengths() {
                    st.dfs(w, label.1);
                }
                st.on_path[w] = false;
                st.nodes.pop();
                st.leave.pop();
                st.enter.pop();
            }
            st.on_path[s] = false;
            st.nodes.pop();
            st.leave.pop();
            st.enter.pop();
        }
    }
    let mut bubbles = st.out;
    bubbles.sort();
    bubbles.dedup();
    for b in &mut bubbles {
        b.class = classify_sequences(&b.seq1, &b.seq2, g.k, 0, 0.8);
    }
    AsBubbleOutcome { bubbles, truncated: st.truncated, ops: st.ops.get() }
}

/// One putative SNP found by simple-bubble compression: the two internal
/// node labels differ in exactly one position.
#[derive(Debug, Clone)]
pub struct SnpCandidate {
    pub s_left: usize,
    pub s_right: usize,
    pub seq1: String,
    pub seq2: String,
}

/// Detect and compress all four-vertex bubbles whose two internal
/// non-branching vertices differ in exactly one position; the pair is
/// replaced by a consensus vertex with N at the substitution and reported
/// as a putative SNP. Runs to fixpoint.
pub fn compress_simple_bubbles(g: &BidirectedDbg) -> (BidirectedDbg, Vec<SnpCandidate>) {
    let mut cur = g.clone();
    let mut snps = Vec::new();
    loop {
        let Some((x, y, u, w, sx, sy)) = find_simple_bubble(&cur) else {
            break;
        };
        snps.push(SnpCandidate { s_left: u, s_right: w, seq1: sx.clone(), seq2: sy.clone() });
        // Consensus label in x's forward orientation, N at the substitution.
        // sx/sy were compared in traversal orientation; realign to forward(x).
        let mut consensus: Vec<u8> = cur.nodes[x].forward.clone().into_bytes();
        let other = if sx == cur.nodes[x].forward { sy } else { revcomp_str(&sy) };
        for (i, c) in consensus.iter_mut().enumerate() {
            if other.as_bytes()[i] != *c {
                *c = b'N';
            }
        }
        let consensus = String::from_utf8(consensus).unwrap();
        // Rebuild without y; x gets the consensus label, summed coverage.
        let mut seqs: Vec<String> = Vec::new();
        let mut covs: Vec<f64> = Vec::new();
        let mut map = vec![usize::MAX; cur.n()];
        for v in 0..cur.n() {
            if v == y {
                continue;
            }
            map[v] = seqs.len();
            if v == x {
                seqs.push(consensus.clone());
                covs.push(
                    (cur.nodes[x].coverage * cur.nodes[x].kmer_count as f64
                        + cur.nodes[y].coverage * cur.nodes[y].kmer_count as f64)
                        / (cur.nodes[x].kmer_count + cur.nodes[y].kmer_count) as f64,
                );
            } else {
                seqs.push(cur.nodes[v].forward.clone());
                covs.push(cur.nodes[v].coverage);
            }
        }
        // Arcs survive by id mapping; arcs to y reroute to x (dedup).
        let mut nb = rebuild_with(&cur, &seqs, &covs, &map, x, y);
        std::mem::swap(&mut cur, &mut nb);
    }
    (cur, snps)
}

fn rebuild_with(
    old: &BidirectedDbg,
    seqs: &[String],
    covs: &[f64],
    map: &[usize],
    x: usize,
    y: usize,
) -> BidirectedDbg {
    // Replay the old arc set with y's endpoints mapped onto x; recomputing
    // arcs by overlap would invent arcs around the N consensus.
    let k = old.k;
    let nodes: Vec<crate::dbg::BdNode> = seqs
        .iter()
        .zip(covs)
        .map(|(s, &c)| crate::dbg::BdNode {
            forward: s.clone(),
            coverage: c,
            kmer_count: s.len() - k + 1,
            palindromic: revcomp_str(s) == *s,
        })
        .collect();
    let mut g = BidirectedDbg::from_nodes(k, nodes);
    for a in old.arcs() {
        let f = if a.from == y { x } else { a.from };
        let t = if a.to == y { x } else { a.to };
        if f == t {
            continue;
        }
        let (nf, nt) = (map[f], map[t]);
        g.push_arc(nf, nt, a.label);
    }
    g.finish_arcs();
    g
}

fn find_simple_bubble(g: &BidirectedDbg) -> Option<(usize, usize, usize, usize, String, String)> {
    // Internal vertices: exactly one in-arc and one out-arc per strand
    // orientation (degree 2 overall in the side graph), same-length labels.
    let n = g.n();
    // side adjacency counts
    let mut out_sides: Vec<Vec<(usize, Strand)>> = vec![Vec::new(); 2 * n];
    let mut in_sides: Vec<Vec<(usize, Strand)>> = vec![Vec::new(); 2 * n];
    let sidx = |v: usize, s: Strand| 2 * v + matches!(s, Strand::R) as usize;
    for a in g.arcs() {
        out_sides[sidx(a.from, a.label.0)].push((a.to, a.label.1));
        in_sides[sidx(a.to, a.label.1)].push((a.from, a.label.0));
    }
    for u in 0..n {
        for us in [Strand::F, Strand::R] {
            let outs = &out_sides[sidx(u, us)];
            if outs.len() < 2 {
                continue;
            }
            for i in 0..outs.len() {
                for j in 0..outs.len() {
                    if i == j {
                        continue;
                    }
                    let (x, xs) = outs[i];
                    let (y, ys) = outs[j];
                    if x == y || x == u || y == u || x > y {
                        continue;
                    }
                    if g.nodes[x].forward.len() != g.nodes[y].forward.len() {
                        continue;
                    }
                    // both internal: single continuation each, to the same w
                    let xo = &out_sides[sidx(x, xs)];
                    let yo = &out_sides[sidx(y, ys)];
                    let xi = &in_sides[sidx(x, xs)];
                    let yi = &in_sides[sidx(y, ys)];
                    if xo.len() != 1 || yo.len() != 1 || xi.len() != 1 || yi.len() != 1 {
                        continue;
                    }
                    let (wx, wxs) = xo[0];
                    let (wy, wys) = yo[0];
                    if wx != wy || wx == u || wx == x || wx == y {
                        continue;
                    }
                    // Both paths must enter the closing vertex on the same
                    // strand, making it a switching vertex of the 4-cycle.
                    if wxs != wys {
                        continue;
                    }
                    // also require the mirrored sides to be non-branching so
                    // the merge stays twin-consistent
                    let sx = g.nodes[x].seq(xs);
                    let sy = g.nodes[y].seq(ys);
                    let diff = sx
                        .bytes()
                        .zip(sy.bytes())
                        .filter(|(a, b)| a != b)
                        .count();
                    if diff == 1 {
                        return Some((x, y, u, wx, sx, sy));
                    }
                }
            }
        }
    }
    None
}

/// Classify a bubble from its two spelled path sequences (same orientation).
///
/// Two paths of exactly 2k-1 mean a substitution. A shorter path matching
/// one end of the longer path closely means the longer path carries an
/// inexact repeat; the ungapped default band keeps shifted (indel-like)
/// pairs from scoring as repeats. Small leftover length differences
/// (1, 2, 4, 5) mean an indel; a shorter path within 2k-2 is a splicing
/// pattern.
pub fn classify_sequences(
    seq_long: &str,
    seq_short: &str,
    k: usize,
    band: usize,
    repeat_identity: f64,
) -> BubbleClass {
    let (l1, l2) = (seq_long.len(), seq_short.len());
    debug_assert!(l1 >= l2);
    if l1 == 2 * k - 1 && l2 == 2 * k - 1 {
        return BubbleClass::Snp;
    }
    if l2 > 0 {
        let prefix = &seq_long[..l2];
        let suffix = &seq_long[l1 - l2..];
        let id_p = banded_identity(seq_short, prefix, band);
        let id_s = banded_identity(seq_short, suffix, band);
        if id_p >= repeat_identity || id_s >= repeat_identity {
            return BubbleClass::Repeat;
        }
    }
    let diff = l1 - l2;
    if matches!(diff, 1 | 2 | 4 | 5) {
        return BubbleClass::Indel;
    }
    if l2 <= 2 * k - 2 {
        return BubbleClass::AlternativeSplicing;
    }
    BubbleClass::Unclassified
}

/// Identity of a banded global alignment: 1 - dist/len(shorter window).
/// Band 0 degenerates to a Hamming comparison, which keeps small indels
/// (frame shifts) from scoring as repeats.
pub fn banded_identity(a: &str, b: &str, band: usize) -> f64 {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return 0.0;
    }
    if n.abs_diff(m) > band {
        // Unalignable end-anchored within the band; compare the overlap.
        if band == 0 && n == m {
        } else if n != m {
            return 0.0;
        }
    }
    let big = usize::MAX / 2;
    let mut dp = vec![vec![big; m + 1]; n + 1];
    dp[0][0] = 0;
    for i in 0..=n {
        for j in 0..=m {
            if i.abs_diff(j) > band {
                continue;
            }
            if i > 0 && j > 0 {
                let c = dp[i - 1][j - 1] + (a[i - 1] != b[j - 1]) as usize;
                dp[i][j] = dp[i][j].min(c);
            }
            if i > 0 && (i - 1).abs_diff(j) <= band {
                dp[i][j] = dp[i][j].min(dp[i - 1][j] + 1);
            }
            if j > 0 && i.abs_diff(j - 1) <= band {
                dp[i][j] = dp[i][j].min(dp[i][j - 1] + 1);
            }
        }
    }
    let d = dp[n][m];
    if d >= big {
        return 0.0;
    }
    1.0 - d as f64 / n.min(m) as f64
}
