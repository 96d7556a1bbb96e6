//! Cycle and st-path listing in undirected graphs, and bounded-length
//! st-path listing in weighted graphs with optional ordering.
//!
//! The undirected lister uses binary partition over the edges incident to
//! the current endpoint. Baseline mode guards every branch with an O(m)
//! reachability test. Certificate mode maintains a DFS-tree certificate of
//! the bead string (the chain of biconnected components every st-path must
//! traverse) so that branches are guaranteed productive without scanning:
//! choose is O(1), removing a vertex along the unique tree edge is O(1),
//! removing a back edge repairs lowpoints locally, and every structural
//! change is journaled and rolled back in reverse order.
//!
//! Cycle listing reduces to st-paths: take a DFS back edge (s,t) of a
//! biconnected component, list the st-paths of the component minus that
//! edge, delete it, re-decompose, repeat.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::rc::Rc;

use thiserror::Error;

use crate::graph::{
    bcc_decompose, bellman_ford_generic, dijkstra_visit, GraphError,
    UndirectedGraph, Weight, WeightedDigraph, INF,
};

#[derive(Debug, Error)]
pub enum PathError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no path within the bound")]
    NoPathWithinBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StPathMode {
    Baseline,
    Certificate,
}

/// Emission order for the iterative bounded lister.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOrder {
    /// Plain recursive order.
    Recursive,
    /// Stack container: exact reverse of the recursive order, peak size <= m.
    ReverseDfs,
    /// Heap container keyed by w(prefix) + d(u,t): non-decreasing lengths,
    /// peak size <= number of paths.
    IncreasingLength,
}

// ---------------------------------------------------------------------------
// Baseline binary partition with reachability tests
// ---------------------------------------------------------------------------

struct BaselineState<'g, F: FnMut(&[usize])> {
    g: &'g UndirectedGraph,
    valive: Vec<bool>,
    ealive: Vec<bool>,
    t: usize,
    emit: F,
}

impl<'g, F: FnMut(&[usize])> BaselineState<'g, F> {
    /// O(m) reachability from `from` to t over alive vertices and edges.
    fn reaches_t(&self, from: usize) -> bool {
        if !self.valive[from] {
            return false;
        }
        let mut seen = vec![false; self.g.n()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(x) = stack.pop() {
            self.g.ops.bump(1);
            if x == self.t {
                return true;
            }
            for &(y, e) in self.g.adj(x) {
                self.g.ops.bump(1);
                if self.ealive[e] && self.valive[y] && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }

    fn rec(&mut self, u: usize, path: &mut Vec<usize>) {
        if u == self.t {
            (self.emit)(path);
            return;
        }
        // Choose the first edge whose far endpoint still reaches t once u is
        // gone (the left branch must be productive).
        self.valive[u] = false;
        let mut chosen: Option<(usize, usize)> = None;
        for &(v, e) in self.g.adj(u) {
            self.g.ops.bump(1);
            if self.ealive[e] && self.valive[v] && self.reaches_t(v) {
                chosen = Some((v, e));
                break;
            }
        }
        self.valive[u] = true;
        let Some((v, e)) = chosen else { return };

        // Right branch: paths avoiding e, if any remain.
        self.ealive[e] = false;
        if self.reaches_t(u) {
            self.rec(u, path);
        }
        self.ealive[e] = true;

        // Left branch: paths through e.
        self.valive[u] = false;
        path.push(v);
        self.rec(v, path);
        path.pop();
        self.valive[u] = true;
    }
}

/// List every st-path of an undirected graph exactly once.
pub fn list_st_paths_with<F: FnMut(&[usize])>(
    g: &UndirectedGraph,
    s: usize,
    t: usize,
    mode: StPathMode,
    emit: F,
) -> Result<(), PathError> {
    if s >= g.n() || t >= g.n() {
        return Err(GraphError::VertexNotFound(s.max(t)).into());
    }
    if s == t {
        return Err(GraphError::SameEndpoints.into());
    }
    match mode {
        StPathMode::Baseline => {
            let mut st = BaselineState {
                g,
                valive: vec![true; g.n()],
                ealive: vec![true; g.m()],
                t,
                emit,
            };
            if st.reaches_t(s) {
                let mut path = vec![s];
                st.rec(s, &mut path);
            }
            Ok(())
        }
        StPathMode::Certificate => cert::list_st_paths(g, s, t, emit),
    }
}

pub fn list_st_paths(
    g: &UndirectedGraph,
    s: usize,
    t: usize,
    mode: StPathMode,
) -> Result<Vec<Vec<usize>>, PathError> {
    let mut out = Vec::new();
    list_st_paths_with(g, s, t, mode, |p| out.push(p.to_vec()))?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Cycle listing by reduction to st-paths
// ---------------------------------------------------------------------------

/// List every simple cycle exactly once, as a closed vertex sequence
/// (first vertex repeated implicitly). Work is charged per output in
/// certificate mode.
pub fn list_cycles_with<F: FnMut(&[usize])>(
    g: &UndirectedGraph,
    mode: StPathMode,
    mut emit: F,
) -> Result<(), PathError> {
    // Component worklist: edge-id subsets of the base graph.
    let initial = bcc_decompose(g);
    let mut work: Vec<Vec<usize>> = initial
        .bccs
        .iter()
        .filter(|b| b.edges.len() >= 3)
        .map(|b| b.edges.clone())
        .collect();
    while let Some(edges) = work.pop() {
        g.ops.bump(edges.len() as u64);
        // Local subgraph with compact vertex ids.
        let mut verts: Vec<usize> = Vec::new();
        for &e in &edges {
            let (a, b, _) = g.edges[e];
            verts.push(a);
            verts.push(b);
        }
        verts.sort_unstable();
        verts.dedup();
        let local = |v: usize| verts.binary_search(&v).unwrap();
        let mut sub = UndirectedGraph::new(verts.len());
        for &e in &edges {
            let (a, b, w) = g.edges[e];
            sub.add_edge(local(a), local(b), w);
        }
        sub.sort_adjacency();
        // Any DFS back edge: in a biconnected component with >= 3 edges, any
        // non-tree edge after a DFS from vertex 0 works; pick the first.
        let back = find_back_edge(&sub);
        let Some(back_eid) = back else { continue };
        let (bs, bt, _) = sub.edges[back_eid];
        // List the paths of sub - back edge between its endpoints. Local
        // edge j of sub2 corresponds to base edge rest[j].
        let mut rest = edges.clone();
        rest.remove(back_eid);
        let mut sub2 = UndirectedGraph::new(verts.len());
        for (eid, &(a, b, w)) in sub.edges.iter().enumerate() {
            if eid != back_eid {
                sub2.add_edge(a, b, w);
            }
        }
        sub2.sort_adjacency();
        let before = sub2.ops.get();
        list_st_paths_with(&sub2, bs, bt, mode, |p| {
            let cycle: Vec<usize> = p.iter().map(|&v| verts[v]).collect();
            emit(&cycle);
        })?;
        // Remove the back edge, re-decompose, append the new components.
        let d = bcc_decompose(&sub2);
        g.ops.bump(sub2.ops.get() - before);
        for b in &d.bccs {
            if b.edges.len() >= 3 {
                work.push(b.edges.iter().map(|&le| rest[le]).collect());
            }
        }
    }
    Ok(())
}

fn find_back_edge(g: &UndirectedGraph) -> Option<usize> {
    let n = g.n();
    if n == 0 {
        return None;
    }
    let mut seen = vec![false; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut stack = vec![(0usize, 0usize)];
    seen[0] = true;
    let mut tree = vec![false; g.m()];
    while let Some(&mut (u, ref mut cur)) = stack.last_mut() {
        if *cur < g.adj(u).len() {
            let (v, e) = g.adj(u)[*cur];
            *cur += 1;
            if !seen[v] {
                seen[v] = true;
                parent_edge[v] = e;
                tree[e] = true;
                stack.push((v, 0));
            }
        } else {
            stack.pop();
        }
    }
    (0..g.m()).find(|&e| !tree[e])
}

pub fn list_cycles(g: &UndirectedGraph, mode: StPathMode) -> Result<Vec<Vec<usize>>, PathError> {
    let mut out = Vec::new();
    list_cycles_with(g, mode, |c| out.push(c.to_vec()))?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Bounded-length st-paths, general weights (directed)
// ---------------------------------------------------------------------------

/// List all st-paths of weight at most `alpha` in a weighted digraph with
/// general weights (no negative cycles): binary partition over the out-arcs
/// of the current endpoint, recursing only when the remaining distance
/// (recomputed from t in the reversed residual graph) fits the budget.
/// Memory stays linear in the graph.
pub fn list_bounded_st_paths_with<F: FnMut(&[usize], Weight)>(
    g: &WeightedDigraph,
    s: usize,
    t: usize,
    alpha: Weight,
    mut emit: F,
) -> Result<(), PathError> {
    if s >= g.n() || t >= g.n() {
        return Err(GraphError::VertexNotFound(s.max(t)).into());
    }
    let mut alive = vec![true; g.n()];
    let mut path = vec![s];
    fn rec<F: FnMut(&[usize], Weight)>(
        g: &WeightedDigraph,
        t: usize,
        u: usize,
        rem: Weight,
        alive: &mut Vec<bool>,
        path: &mut Vec<usize>,
        total: Weight,
        emit: &mut F,
    ) -> Result<(), PathError> {
        if u == t {
            emit(path, total);
            return Ok(());
        }
        // distances to t in the reversed graph without u
        alive[u] = false;
        let dist = bellman_ford_generic(g.n(), |x| g.rin(x), &g.ops, t, Some(alive))?;
        for &(v, w) in g.out(u) {
            g.ops.bump(1);
            if !alive[v] || dist[v] == INF {
                continue;
            }
            let need = crate::graph::saturating_add(dist[v], w);
            if need <= rem {
                path.push(v);
                rec(g, t, v, rem - w, alive, path, total + w, emit)?;
                path.pop();
            }
        }
        alive[u] = true;
        Ok(())
    }
    rec(g, t, s, alpha, &mut alive, &mut path, 0, &mut emit)
}

pub fn list_bounded_st_paths(
    g: &WeightedDigraph,
    s: usize,
    t: usize,
    alpha: Weight,
) -> Result<Vec<(Vec<usize>, Weight)>, PathError> {
    let mut out = Vec::new();
    list_bounded_st_paths_with(g, s, t, alpha, |p, w| out.push((p.to_vec(), w)))?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Longest common prefix of all alpha-bounded st-paths (undirected)
// ---------------------------------------------------------------------------

struct SptTree {
    parent: Vec<usize>,
    dist: Vec<Weight>,
    tin: Vec<usize>,
    tout: Vec<usize>,
}

fn spt_with_intervals(
    g: &UndirectedGraph,
    alive: &[bool],
    src: usize,
) -> SptTree {
    let n = g.n();
    let mut dist = vec![INF; n];
    let mut parent = vec![usize::MAX; n];
    // Dijkstra over alive subgraph; tie-break by smaller vertex id via
    // ordered adjacency and strict improvement.
    let mut heap: BinaryHeap<Reverse<(Weight, usize)>> = BinaryHeap::new();
    if alive[src] {
        dist[src] = 0;
        heap.push(Reverse((0, src)));
    }
    let mut settled = vec![false; n];
    while let Some(Reverse((d, u))) = heap.pop() {
        g.ops.bump(1);
        if settled[u] || d > dist[u] {
            continue;
        }
        settled[u] = true;
        for &(v, _e) in g.adj(u) {
            g.ops.bump(1);
            if !alive[v] {
                continue;
            }
            let w = g.edges[_e].2;
            let nd = crate::graph::saturating_add(d, w);
            if nd < dist[v] {
                dist[v] = nd;
                parent[v] = u;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    // Euler intervals over the parent tree.
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        if parent[v] != usize::MAX {
            children[parent[v]].push(v);
        }
    }
    let mut tin = vec![0usize; n];
    let mut tout = vec![0usize; n];
    let mut timer = 0usize;
    let mut stack: Vec<(usize, usize)> = vec![(src, 0)];
    if alive[src] {
        tin[src] = timer;
        timer += 1;
    }
    while let Some(&mut (u, ref mut cur)) = stack.last_mut() {
        if *cur < children[u].len() {
            let c = children[u][*cur];
            *cur += 1;
            tin[c] = timer;
            timer += 1;
            stack.push((c, 0));
        } else {
            tout[u] = timer;
            stack.pop();
        }
    }
    SptTree { parent, dist, tin, tout }
}

impl SptTree {
    fn in_subtree(&self, root: usize, v: usize) -> bool {
        self.tin[root] <= self.tin[v] && self.tin[v] < self.tout[root]
    }
}

/// The longest path that prefixes every alpha-bounded st-path: walk the
/// shortest-path tree from s toward t; the prefix ends right before the
/// first tree arc that some alternative within the bound can bypass (a
/// non-tree edge from the current vertex or a sibling subtree into the
/// subtree of the next vertex).
pub fn longest_common_prefix(
    g: &UndirectedGraph,
    s: usize,
    t: usize,
    alpha: Weight,
) -> Result<Vec<usize>, PathError> {
    let alive = vec![true; g.n()];
    longest_common_prefix_alive(g, &alive, s, t, alpha)
}

pub fn longest_common_prefix_alive(
    g: &UndirectedGraph,
    alive: &[bool],
    s: usize,
    t: usize,
    alpha: Weight,
) -> Result<Vec<usize>, PathError> {
    if s == t {
        return Ok(vec![s]);
    }
    let ts = spt_with_intervals(g, alive, s);
    if ts.dist[t] == INF || ts.dist[t] > alpha {
        return Err(PathError::NoPathWithinBound);
    }
    let tt = spt_with_intervals(g, alive, t);
    // Tree path s -> t.
    let mut tree_path = vec![t];
    let mut cur = t;
    while cur != s {
        cur = ts.parent[cur];
        tree_path.push(cur);
    }
    tree_path.reverse();
    for i in 0..tree_path.len() - 1 {
        let vi = tree_path[i];
        let vnext = tree_path[i + 1];
        // candidate escape edges: from vi itself or from sibling subtrees,
        // landing in the subtree of vnext.
        let check = |x: usize| -> bool {
            for &(z, e) in g.adj(x) {
                g.ops.bump(1);
                if !alive[z] {
                    continue;
                }
                if x == vi && z == vnext {
                    continue; // the tree edge itself
                }
                if !ts.in_subtree(vnext, z) {
                    continue;
                }
                let w = g.edges[e].2;
                let total = crate::graph::saturating_add(
                    crate::graph::saturating_add(ts.dist[x], w),
                    tt.dist[z],
                );
                if total <= alpha {
                    return true;
                }
            }
            false
        };
        if check(vi) {
            return Ok(tree_path[..=i].to_vec());
        }
        // sibling subtrees: every child subtree of vi except toward vnext
        let mut escape = false;
        for &(w0, _e) in g.adj(vi) {
            if !alive[w0] || ts.parent[w0] != vi || w0 == vnext {
                continue;
            }
            // scan the subtree of w0
            let mut stack = vec![w0];
            let mut visited = Vec::new();
            while let Some(x) = stack.pop() {
                g.ops.bump(1);
                visited.push(x);
                if check(x) {
                    escape = true;
                    break;
                }
                for &(y, _e2) in g.adj(x) {
                    if alive[y] && ts.parent[y] == x {
                        stack.push(y);
                    }
                }
            }
            if escape {
                break;
            }
        }
        if escape {
            return Ok(tree_path[..=i].to_vec());
        }
    }
    Ok(tree_path)
}

// ---------------------------------------------------------------------------
// Improved bounded lister for undirected non-negative graphs
// ---------------------------------------------------------------------------

/// Same output set as the general algorithm, but every recursion first
/// extends the prefix by the longest common prefix of the remaining
/// solutions, so every internal node branches at least two ways. Returns
/// the number of internal nodes that branched below two (always 0; asserted
/// in tests).
pub fn list_bounded_st_paths_undirected_with<F: FnMut(&[usize], Weight)>(
    g: &UndirectedGraph,
    s: usize,
    t: usize,
    alpha: Weight,
    mut emit: F,
) -> Result<u64, PathError> {
    let mut alive = vec![true; g.n()];
    // feasibility gate
    {
        let ts = spt_with_intervals(g, &alive, s);
        if ts.dist[t] == INF || ts.dist[t] > alpha {
            return Ok(0);
        }
    }
    let mut degenerate = 0u64;
    let mut path: Vec<usize> = Vec::new();
    rec_improved(g, t, s, alpha, &mut alive, &mut path, 0, &mut emit, &mut degenerate)?;
    Ok(degenerate)
}

#[allow(clippy::too_many_arguments)]
fn rec_improved<F: FnMut(&[usize], Weight)>(
    g: &UndirectedGraph,
    t: usize,
    u: usize,
    rem: Weight,
    alive: &mut Vec<bool>,
    prefix: &mut Vec<usize>,
    total: Weight,
    emit: &mut F,
    degenerate: &mut u64,
) -> Result<(), PathError> {
    // Extend by the longest common prefix of P_rem(u, t).
    let lcp = longest_common_prefix_alive(g, alive, u, t, rem)?;
    let mut lcp_w: Weight = 0;
    for w in lcp.windows(2) {
        lcp_w += edge_weight(g, w[0], w[1]);
    }
    let u2 = *lcp.last().unwrap();
    let added: Vec<usize> = lcp.iter().copied().collect();
    prefix.extend(added.iter().skip(if prefix.is_empty() { 0 } else { 1 }).copied());
    // kill prefix vertices except the new endpoint
    for &v in &added {
        if v != u2 {
            alive[v] = false;
        }
    }
    if u2 == t {
        emit(prefix, total + lcp_w);
    } else {
        alive[u2] = false;
        let tt = spt_with_intervals(g, alive, t);
        let mut branches = 0u64;
        for &(v, e) in g.adj(u2) {
            g.ops.bump(1);
            if !alive[v] {
                continue;
            }
            let w = g.edges[e].2;
            if crate::graph::saturating_add(tt.dist[v], w) <= rem - lcp_w {
                branches += 1;
                prefix.push(v);
                rec_improved(
                    g,
                    t,
                    v,
                    rem - lcp_w - w,
                    alive,
                    prefix,
                    total + lcp_w + w,
                    emit,
                    degenerate,
                )?;
                prefix.pop();
            }
        }
        alive[u2] = true;
        if branches < 2 {
            *degenerate += 1;
        }
    }
    for &v in &added {
        if v != u2 {
            alive[v] = true;
        }
    }
    let keep = prefix.len() - (added.len() - if prefix.len() == added.len() { 0 } else { 1 });
    prefix.truncate(keep);
    Ok(())
}

fn edge_weight(g: &UndirectedGraph, a: usize, b: usize) -> Weight {
    g.adj(a)
        .iter()
        .filter(|&&(v, _)| v == b)
        .map(|&(_, e)| g.edges[e].2)
        .min()
        .expect("edge missing")
}

pub fn list_bounded_st_paths_undirected(
    g: &UndirectedGraph,
    s: usize,
    t: usize,
    alpha: Weight,
) -> Result<Vec<(Vec<usize>, Weight)>, PathError> {
    let mut out = Vec::new();
    list_bounded_st_paths_undirected_with(g, s, t, alpha, |p, w| out.push((p.to_vec(), w)))?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Iterative bounded lister with explicit container (stack or heap)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderedStats {
    pub peak_container: usize,
    pub emitted: usize,
}

struct DelNode {
    v: usize,
    parent: Option<Rc<DelNode>>,
}

fn deleted_chain(node: &Option<Rc<DelNode>>, buf: &mut Vec<usize>) {
    buf.clear();
    let mut cur = node.clone();
    while let Some(n) = cur {
        buf.push(n.v);
        cur = n.parent.clone();
    }
}

struct QEntry {
    key: Weight,
    seq: u64,
    u: usize,
    rem: Weight,
    total: Weight,
    path: Vec<usize>,
    deleted: Option<Rc<DelNode>>,
}

/// Iterative variant of the bounded lister with an explicit container.
/// A stack yields the exact reverse of the recursive order with peak size
/// at most m; a heap keyed by w(prefix) + d(u, t) yields paths in
/// non-decreasing total length (truncate after `k_limit` for k-shortest).
pub fn list_paths_ordered_with<F: FnMut(&[usize], Weight)>(
    g: &WeightedDigraph,
    s: usize,
    t: usize,
    alpha: Weight,
    order: PathOrder,
    k_limit: Option<usize>,
    mut emit: F,
) -> Result<OrderedStats, PathError> {
    if order == PathOrder::IncreasingLength && g.has_negative_weights() {
        return Err(GraphError::NegativeWeight { u: 0, v: 0, w: -1 }.into());
    }
    if order == PathOrder::Recursive {
        // delegate to the recursive lister, honoring k_limit
        let mut n = 0usize;
        let mut done = false;
        let mut res = OrderedStats { peak_container: 0, emitted: 0 };
        list_bounded_st_paths_with(g, s, t, alpha, |p, w| {
            if done {
                return;
            }
            emit(p, w);
            n += 1;
            if let Some(k) = k_limit {
                if n >= k {
                    done = true;
                }
            }
        })?;
        res.emitted = n;
        return Ok(res);
    }

    let mut alive = vec![true; g.n()];
    let mut scratch: Vec<usize> = Vec::new();
    let dist_to_t = |alive: &mut Vec<bool>,
                     deleted: &Option<Rc<DelNode>>,
                     extra_dead: Option<usize>,
                     scratch: &mut Vec<usize>|
     -> Result<Vec<Weight>, PathError> {
        deleted_chain(deleted, scratch);
        for &v in scratch.iter() {
            alive[v] = false;
        }
        if let Some(x) = extra_dead {
            alive[x] = false;
        }
        let res = if g.has_negative_weights() {
            bellman_ford_generic(g.n(), |x| g.rin(x), &g.ops, t, Some(alive))
        } else {
            let alive_ref: &Vec<bool> = alive;
            Ok(dijkstra_visit(
                g.n(),
                |x, f| {
                    if alive_ref[x] {
                        for &(v, w) in g.rin(x) {
                            if alive_ref[v] {
                                f(v, w);
                            }
                        }
                    }
                },
                &g.ops,
                &[(t, 0)],
                None,
            ))
        };
        for &v in scratch.iter() {
            alive[v] = true;
        }
        if let Some(x) = extra_dead {
            alive[x] = true;
        }
        Ok(res?)
    };

    // container
    let mut stack: Vec<QEntry> = Vec::new();
    let mut heap: BinaryHeap<Reverse<(Weight, u64, usize)>> = BinaryHeap::new();
    let mut heap_store: Vec<Option<QEntry>> = Vec::new();
    let mut seq = 0u64;
    let mut peak = 0usize;
    let mut emitted = 0usize;

    let d0 = dist_to_t(&mut alive, &None, None, &mut scratch)?;
    if d0[s] == INF || d0[s] > alpha {
        return Ok(OrderedStats { peak_container: 0, emitted: 0 });
    }
    let root = QEntry {
        key: d0[s],
        seq,
        u: s,
        rem: alpha,
        total: 0,
        path: vec![s],
        deleted: None,
    };
    seq += 1;
    match order {
        PathOrder::ReverseDfs => stack.push(root),
        PathOrder::IncreasingLength => {
            heap.push(Reverse((root.key, root.seq, 0)));
            heap_store.push(Some(root));
        }
        PathOrder::Recursive => unreachable!(),
    }

    loop {
        let entry = match order {
            PathOrder::ReverseDfs => {
                peak = peak.max(stack.len());
                match stack.pop() {
                    Some(e) => e,
                    None => break,
                }
            }
            PathOrder::IncreasingLength => {
                peak = peak.max(heap.len());
                match heap.pop() {
                    Some(Reverse((_, _, idx))) => heap_store[idx].take().unwrap(),
                    None => break,
                }
            }
            PathOrder::Recursive => unreachable!(),
        };
        g.ops.bump(1);
        if entry.u == t {
            emit(&entry.path, entry.total);
            emitted += 1;
            if let Some(k) = k_limit {
                if emitted >= k {
                    break;
                }
            }
            continue;
        }
        // children: for v in N+(u) with d(v,t) <= rem - w in G - u
        let dist = dist_to_t(&mut alive, &entry.deleted, Some(entry.u), &mut scratch)?;
        let del = Some(Rc::new(DelNode { v: entry.u, parent: entry.deleted.clone() }));
        let mut children: Vec<QEntry> = Vec::new();
        for &(v, w) in g.out(entry.u) {
            g.ops.bump(1);
            if dist[v] == INF {
                continue;
            }
            if crate::graph::saturating_add(dist[v], w) <= entry.rem {
                let mut path = entry.path.clone();
                path.push(v);
                children.push(QEntry {
                    key: entry.total + w + dist[v],
                    seq,
                    u: v,
                    rem: entry.rem - w,
                    total: entry.total + w,
                    path,
                    deleted: del.clone(),
                });
                seq += 1;
            }
        }
        match order {
            PathOrder::ReverseDfs => {
                // push in ascending neighbor order: popping yields the exact
                // reverse of the recursive order
                for c in children {
                    stack.push(c);
                }
            }
            PathOrder::IncreasingLength => {
                for c in children {
                    heap.push(Reverse((c.key, c.seq, heap_store.len())));
                    heap_store.push(Some(c));
                }
            }
            PathOrder::Recursive => unreachable!(),
        }
    }
    Ok(OrderedStats { peak_container: peak, emitted })
}

pub fn list_paths_ordered(
    g: &WeightedDigraph,
    s: usize,
    t: usize,
    alpha: Weight,
    order: PathOrder,
    k_limit: Option<usize>,
) -> Result<(Vec<(Vec<usize>, Weight)>, OrderedStats), PathError> {
    let mut out = Vec::new();
    let stats = list_paths_ordered_with(g, s, t, alpha, order, k_limit, |p, w| {
        out.push((p.to_vec(), w))
    })?;
    Ok((out, stats))
}

// ---------------------------------------------------------------------------
// Certificate mode
// ---------------------------------------------------------------------------

mod cert;
pub use cert::CertStats;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeSet;

    fn ugraph(n: usize, edges: &[(usize, usize)]) -> UndirectedGraph {
        let mut g = UndirectedGraph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b, 1);
        }
        g.sort_adjacency();
        g
    }

    fn brute_st_paths(g: &UndirectedGraph, s: usize, t: usize) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        let mut path = vec![s];
        let mut on = vec![false; g.n()];
        on[s] = true;
        fn rec(
            g: &UndirectedGraph,
            t: usize,
            path: &mut Vec<usize>,
            on: &mut Vec<bool>,
            out: &mut BTreeSet<Vec<usize>>,
        ) {
            let u = *path.last().unwrap();
            if u == t {
                out.insert(path.clone());
                return;
            }
            for &(v, _) in g.adj(u) {
                if !on[v] {
                    on[v] = true;
                    path.push(v);
                    rec(g, t, path, on, out);
                    path.pop();
                    on[v] = false;
                }
            }
        }
        rec(g, t, &mut path, &mut on, &mut out);
        out
    }

    /// Canonical cycle form: rotate so the smallest vertex leads, pick the
    /// lexicographically smaller direction.
    fn canon_cycle(c: &[usize]) -> Vec<usize> {
        let k = c.len();
        let minpos = (0..k).min_by_key(|&i| c[i]).unwrap();
        let fwd: Vec<usize> = (0..k).map(|i| c[(minpos + i) % k]).collect();
        let rev: Vec<usize> = (0..k).map(|i| c[(minpos + k - i) % k]).collect();
        fwd.min(rev)
    }

    fn brute_cycles(g: &UndirectedGraph) -> BTreeSet<Vec<usize>> {
        // vertex-path DFS: cycles as closed walks with distinct vertices,
        // canonicalized
        let mut out = BTreeSet::new();
        let n = g.n();
        let mut path: Vec<usize> = Vec::new();
        fn rec(
            g: &UndirectedGraph,
            start: usize,
            path: &mut Vec<usize>,
            last_edge: usize,
            out: &mut BTreeSet<Vec<usize>>,
        ) {
            let u = *path.last().unwrap();
            for &(v, e) in g.adj(u) {
                if e == last_edge {
                    continue;
                }
                if v == start && path.len() >= 3 {
                    out.insert(canon_cycle(path));
                } else if v > start && !path.contains(&v) {
                    path.push(v);
                    rec(g, start, path, e, out);
                    path.pop();
                }
            }
        }
        for s in 0..n {
            path.push(s);
            rec(g, s, &mut path, usize::MAX, &mut out);
            path.pop();
        }
        out
    }

    #[test]
    fn triangle_has_two_st_paths() {
        let g = ugraph(3, &[(0, 1), (0, 2), (1, 2)]);
        let got = list_st_paths(&g, 0, 2, StPathMode::Baseline).unwrap();
        assert_eq!(got.len(), 2);
    }

    /// Diamond graph D_{2k+3}: a-c edge, k spokes a-v_i-b and b-u_i-c.
    /// Vertices: a=0, b=1, c=2, v_i = 3..3+k, u_i = 3+k..3+2k.
    pub fn diamond(k: usize) -> UndirectedGraph {
        let n = 3 + 2 * k;
        let mut g = UndirectedGraph::new(n);
        g.add_edge(0, 2, 1);
        for i in 0..k {
            g.add_edge(0, 3 + i, 1);
            g.add_edge(3 + i, 1, 1);
            g.add_edge(1, 3 + k + i, 1);
            g.add_edge(3 + k + i, 2, 1);
        }
        g.sort_adjacency();
        g
    }

    #[test]
    fn baseline_matches_brute_force_on_diamond() {
        let g = diamond(2);
        let got: BTreeSet<Vec<usize>> = list_st_paths(&g, 0, 2, StPathMode::Baseline)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(got, brute_st_paths(&g, 0, 2));
    }

    #[test]
    fn baseline_matches_brute_force_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        for trial in 0..300 {
            let n = rng.gen_range(2..10);
            let mut g = UndirectedGraph::new(n);
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.4) {
                        g.add_edge(u, v, 1);
                    }
                }
            }
            g.sort_adjacency();
            let s = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n);
            if t == s {
                t = (t + 1) % n;
            }
            if s == t {
                continue;
            }
            let got: BTreeSet<Vec<usize>> =
                list_st_paths(&g, s, t, StPathMode::Baseline).unwrap().into_iter().collect();
            assert_eq!(got, brute_st_paths(&g, s, t), "trial {trial}");
        }
    }

    #[test]
    fn single_cycle_is_listed_once() {
        let g = ugraph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let cycles = list_cycles(&g, StPathMode::Baseline).unwrap();
        assert_eq!(cycles.len(), 1);
    }

    #[test]
    fn diamond_cycle_count_matches_closed_form() {
        for k in 1..=5usize {
            let g = diamond(k);
            let cycles = list_cycles(&g, StPathMode::Baseline).unwrap();
            let want = k * k + 2 * (k * (k - 1) / 2);
            assert_eq!(cycles.len(), want, "k={k}");
            let set: BTreeSet<Vec<usize>> =
                cycles.iter().map(|c| canon_cycle(c)).collect();
            assert_eq!(set.len(), cycles.len(), "duplicate cycles for k={k}");
            assert_eq!(set, brute_cycles(&g), "k={k}");
        }
    }

    #[test]
    fn random_graph_cycles_match_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(67);
        for trial in 0..120 {
            let n = rng.gen_range(3..9);
            let mut g = UndirectedGraph::new(n);
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.4) {
                        g.add_edge(u, v, 1);
                    }
                }
            }
            g.sort_adjacency();
            let got = list_cycles(&g, StPathMode::Baseline).unwrap();
            let set: BTreeSet<Vec<usize>> = got.iter().map(|c| canon_cycle(c)).collect();
            assert_eq!(set.len(), got.len(), "dups trial {trial}");
            assert_eq!(set, brute_cycles(&g), "trial {trial}");
        }
    }

    fn brute_bounded(
        g: &WeightedDigraph,
        s: usize,
        t: usize,
        alpha: Weight,
    ) -> BTreeSet<(Vec<usize>, Weight)> {
        let mut out = BTreeSet::new();
        let mut path = vec![s];
        let mut on = vec![false; g.n()];
        on[s] = true;
        fn rec(
            g: &WeightedDigraph,
            t: usize,
            path: &mut Vec<usize>,
            w: Weight,
            on: &mut Vec<bool>,
            alpha: Weight,
            out: &mut BTreeSet<(Vec<usize>, Weight)>,
        ) {
            let u = *path.last().unwrap();
            if u == t {
                if w <= alpha {
                    out.insert((path.clone(), w));
                }
                return;
            }
            for &(v, wv) in g.out(u) {
                if !on[v] {
                    on[v] = true;
                    path.push(v);
                    rec(g, t, path, w + wv, on, alpha, out);
                    path.pop();
                    on[v] = false;
                }
            }
        }
        rec(g, t, &mut path, 0, &mut on, alpha, &mut out);
        out
    }

    #[test]
    fn bounded_paths_trivial() {
        // path of total weight 5, alpha 4: empty
        let mut g = WeightedDigraph::new(3);
        g.add_arc(0, 1, 2);
        g.add_arc(1, 2, 3);
        assert!(list_bounded_st_paths(&g, 0, 2, 4).unwrap().is_empty());
        assert_eq!(list_bounded_st_paths(&g, 0, 2, 5).unwrap().len(), 1);
    }

    #[test]
    fn bounded_paths_match_brute_force_general_weights() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        let mut trials = 0;
        while trials < 300 {
            let n = rng.gen_range(2..9);
            let mut g = WeightedDigraph::new(n);
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.gen_bool(0.35) {
                        // general weights incl. negatives, no negative cycles
                        // guaranteed by keeping negatives only on arcs u < v
                        let w = if u < v { rng.gen_range(-3..8) } else { rng.gen_range(0..8) };
                        g.add_arc(u, v, w);
                    }
                }
            }
            g.sort_adjacency();
            // reject graphs with a reachable negative cycle
            let s = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n);
            if t == s {
                t = (t + 1) % n;
            }
            if s == t {
                continue;
            }
            trials += 1;
            let alpha = rng.gen_range(-2..20);
            match list_bounded_st_paths(&g, s, t, alpha) {
                Ok(got) => {
                    let set: BTreeSet<(Vec<usize>, Weight)> = got.iter().cloned().collect();
                    assert_eq!(set.len(), got.len());
                    assert_eq!(set, brute_bounded(&g, s, t, alpha), "trial {trials}");
                }
                Err(PathError::Graph(GraphError::NegativeCycle)) => {
                    // acceptable only if a negative cycle really exists
                    let has = bellman_ford_generic(g.n(), |x| g.rin(x), &g.ops, t, None).is_err();
                    assert!(has);
                }
                Err(e) => panic!("unexpected {e}"),
            }
        }
    }

    #[test]
    fn alpha_infinite_dag_lists_all_paths() {
        let mut g = WeightedDigraph::new(4);
        g.add_arc(0, 1, 1);
        g.add_arc(0, 2, 1);
        g.add_arc(1, 3, 1);
        g.add_arc(2, 3, 1);
        g.add_arc(1, 2, 1);
        g.sort_adjacency();
        let got = list_bounded_st_paths(&g, 0, 3, Weight::MAX / 4).unwrap();
        assert_eq!(got.len(), 3);
    }

    fn random_connected_ugraph(
        rng: &mut rand_chacha::ChaCha8Rng,
        n: usize,
        extra: f64,
        wmax: Weight,
    ) -> UndirectedGraph {
        let mut g = UndirectedGraph::new(n);
        let mut seen = std::collections::HashSet::new();
        for v in 1..n {
            let u = rng.gen_range(0..v);
            seen.insert((u, v));
            g.add_edge(u, v, rng.gen_range(1..=wmax));
        }
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(extra) && seen.insert((u, v)) {
                    g.add_edge(u, v, rng.gen_range(1..=wmax));
                }
            }
        }
        g.sort_adjacency();
        g
    }

    fn brute_bounded_undirected(
        g: &UndirectedGraph,
        s: usize,
        t: usize,
        alpha: Weight,
    ) -> BTreeSet<(Vec<usize>, Weight)> {
        let mut out = BTreeSet::new();
        let mut path = vec![s];
        let mut on = vec![false; g.n()];
        on[s] = true;
        fn rec(
            g: &UndirectedGraph,
            t: usize,
            path: &mut Vec<usize>,
            w: Weight,
            on: &mut Vec<bool>,
            alpha: Weight,
            out: &mut BTreeSet<(Vec<usize>, Weight)>,
        ) {
            let u = *path.last().unwrap();
            if u == t {
                if w <= alpha {
                    out.insert((path.clone(), w));
                }
                return;
            }
            for &(v, e) in g.adj(u) {
                if !on[v] {
                    on[v] = true;
                    path.push(v);
                    rec(g, t, path, w + g.edges[e].2, on, alpha, out);
                    path.pop();
                    on[v] = false;
                }
            }
        }
        rec(g, t, &mut path, 0, &mut on, alpha, &mut out);
        out
    }

    #[test]
    fn lcp_unique_path_is_whole_path() {
        let g = ugraph(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(longest_common_prefix(&g, 0, 3, 100).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn lcp_branch_at_source_is_trivial() {
        let g = ugraph(4, &[(0, 1), (1, 3), (0, 2), (2, 3)]);
        assert_eq!(longest_common_prefix(&g, 0, 3, 100).unwrap(), vec![0]);
    }

    #[test]
    fn lcp_no_path_within_bound_errors() {
        let mut g = UndirectedGraph::new(2);
        g.add_edge(0, 1, 5);
        assert!(matches!(
            longest_common_prefix(&g, 0, 1, 4),
            Err(PathError::NoPathWithinBound)
        ));
    }

    #[test]
    fn lcp_matches_brute_force_fold() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(73);
        let mut tested = 0;
        for _ in 0..600 {
            let n = rng.gen_range(2..12);
            let g = random_connected_ugraph(&mut rng, n, 0.25, 4);
            let s = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n);
            if t == s {
                t = (t + 1) % n;
            }
            if s == t {
                continue;
            }
            let alpha = rng.gen_range(1..20);
            let paths = brute_bounded_undirected(&g, s, t, alpha);
            let lcp = longest_common_prefix_alive(&g, &vec![true; n], s, t, alpha);
            if paths.is_empty() {
                assert!(matches!(lcp, Err(PathError::NoPathWithinBound)));
                continue;
            }
            tested += 1;
            // fold: longest common prefix of all bounded paths
            let mut iter = paths.iter();
            let mut acc: Vec<usize> = iter.next().unwrap().0.clone();
            for (p, _) in iter {
                let mut k = 0;
                while k < acc.len() && k < p.len() && acc[k] == p[k] {
                    k += 1;
                }
                acc.truncate(k);
            }
            assert_eq!(lcp.unwrap(), acc, "s={s} t={t} alpha={alpha}");
        }
        assert!(tested >= 300, "only {tested} instances had paths");
    }

    #[test]
    fn improved_matches_general_on_random_undirected() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(79);
        let mut tested = 0;
        for _ in 0..400 {
            let n = rng.gen_range(2..10);
            let g = random_connected_ugraph(&mut rng, n, 0.3, 3);
            let s = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n);
            if t == s {
                t = (t + 1) % n;
            }
            if s == t {
                continue;
            }
            let alpha = rng.gen_range(1..15);
            let got: BTreeSet<(Vec<usize>, Weight)> =
                list_bounded_st_paths_undirected(&g, s, t, alpha)
                    .unwrap()
                    .into_iter()
                    .collect();
            let want = brute_bounded_undirected(&g, s, t, alpha);
            assert_eq!(got, want, "s={s} t={t} alpha={alpha}");
            if !want.is_empty() {
                tested += 1;
            }
        }
        assert!(tested >= 150);
    }

    #[test]
    fn improved_internal_nodes_branch_twice() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(83);
        for _ in 0..200 {
            let n = rng.gen_range(2..10);
            let g = random_connected_ugraph(&mut rng, n, 0.3, 3);
            let s = 0;
            let t = n - 1;
            if s == t {
                continue;
            }
            let degenerate =
                list_bounded_st_paths_undirected_with(&g, s, t, 12, |_, _| {}).unwrap();
            assert_eq!(degenerate, 0);
        }
    }

    #[test]
    fn single_edge_graph_lists_one_path() {
        let mut g = UndirectedGraph::new(2);
        g.add_edge(0, 1, 2);
        let got = list_bounded_st_paths_undirected(&g, 0, 1, 2).unwrap();
        assert_eq!(got, vec![(vec![0, 1], 2)]);
    }

    fn to_digraph(g: &UndirectedGraph) -> WeightedDigraph {
        let mut d = WeightedDigraph::new(g.n());
        for &(a, b, w) in &g.edges {
            d.add_arc(a, b, w);
            d.add_arc(b, a, w);
        }
        d.sort_adjacency();
        d
    }

    #[test]
    fn heap_mode_emits_sorted_lengths_matching_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(89);
        for _ in 0..200 {
            let n = rng.gen_range(2..9);
            let mut g = WeightedDigraph::new(n);
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.gen_bool(0.35) {
                        g.add_arc(u, v, rng.gen_range(0..6));
                    }
                }
            }
            g.sort_adjacency();
            let s = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n);
            if t == s {
                t = (t + 1) % n;
            }
            if s == t {
                continue;
            }
            let alpha = rng.gen_range(0..18);
            let (got, stats) =
                list_paths_ordered(&g, s, t, alpha, PathOrder::IncreasingLength, None).unwrap();
            let lens: Vec<Weight> = got.iter().map(|&(_, w)| w).collect();
            assert!(lens.windows(2).all(|w| w[0] <= w[1]), "unsorted: {lens:?}");
            let mut want: Vec<Weight> = brute_bounded(&g, s, t, alpha)
                .into_iter()
                .map(|(_, w)| w)
                .collect();
            want.sort();
            assert_eq!(lens, want);
            // heap peak bounded by the number of solutions... plus nothing
            if !want.is_empty() {
                assert!(stats.peak_container <= want.len().max(1) + 1,
                    "peak {} vs paths {}", stats.peak_container, want.len());
            }
        }
    }

    #[test]
    fn stack_mode_is_exact_reverse_of_recursive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(97);
        for _ in 0..200 {
            let n = rng.gen_range(2..9);
            let mut g = WeightedDigraph::new(n);
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.gen_bool(0.35) {
                        g.add_arc(u, v, rng.gen_range(0..5));
                    }
                }
            }
            g.sort_adjacency();
            let s = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n);
            if t == s {
                t = (t + 1) % n;
            }
            if s == t {
                continue;
            }
            let alpha = rng.gen_range(0..15);
            let rec = list_bounded_st_paths(&g, s, t, alpha).unwrap();
            let (stacked, stats) =
                list_paths_ordered(&g, s, t, alpha, PathOrder::ReverseDfs, None).unwrap();
            let mut rev = rec.clone();
            rev.reverse();
            assert_eq!(stacked, rev);
            assert!(stats.peak_container <= g.m().max(1));
        }
    }

    #[test]
    fn certificate_matches_baseline_on_diamond() {
        for k in 1..=4 {
            let g = diamond(k);
            let base: BTreeSet<Vec<usize>> = list_st_paths(&g, 0, 2, StPathMode::Baseline)
                .unwrap()
                .into_iter()
                .collect();
            let cert: BTreeSet<Vec<usize>> = list_st_paths(&g, 0, 2, StPathMode::Certificate)
                .unwrap()
                .into_iter()
                .collect();
            assert_eq!(cert, base, "k={k}");
        }
    }

    #[test]
    fn certificate_matches_baseline_on_random_graphs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
        let mut nonempty = 0;
        for trial in 0..1000 {
            let n = rng.gen_range(2..12);
            let mut g = UndirectedGraph::new(n);
            let mut seen = std::collections::HashSet::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.35) && seen.insert((u, v)) {
                        g.add_edge(u, v, 1);
                    }
                }
            }
            g.sort_adjacency();
            let s = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n);
            if t == s {
                t = (t + 1) % n;
            }
            if s == t {
                continue;
            }
            let base: BTreeSet<Vec<usize>> = list_st_paths(&g, s, t, StPathMode::Baseline)
                .unwrap()
                .into_iter()
                .collect();
            let cert_vec = list_st_paths(&g, s, t, StPathMode::Certificate).unwrap();
            let cert: BTreeSet<Vec<usize>> = cert_vec.iter().cloned().collect();
            assert_eq!(cert.len(), cert_vec.len(), "duplicates trial {trial}");
            assert_eq!(cert, base, "trial {trial} s={s} t={t} edges={:?}", g.edges);
            if !base.is_empty() {
                nonempty += 1;
            }
        }
        assert!(nonempty > 400, "suite too sparse: {nonempty}");
    }

    #[test]
    fn certificate_cycles_match_baseline() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(103);
        for trial in 0..150 {
            let n = rng.gen_range(3..10);
            let mut g = UndirectedGraph::new(n);
            let mut seen = std::collections::HashSet::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.4) && seen.insert((u, v)) {
                        g.add_edge(u, v, 1);
                    }
                }
            }
            g.sort_adjacency();
            let base: BTreeSet<Vec<usize>> = list_cycles(&g, StPathMode::Baseline)
                .unwrap()
                .iter()
                .map(|c| canon_cycle(c))
                .collect();
            let cert_vec = list_cycles(&g, StPathMode::Certificate).unwrap();
            let cert: BTreeSet<Vec<usize>> = cert_vec.iter().map(|c| canon_cycle(c)).collect();
            assert_eq!(cert.len(), cert_vec.len(), "dup cycles trial {trial}");
            assert_eq!(cert, base, "trial {trial} edges={:?}", g.edges);
        }
    }

    #[test]
    fn certificate_paths_are_simple() {
        let g = diamond(3);
        list_st_paths_with(&g, 0, 2, StPathMode::Certificate, |p| {
            let set: BTreeSet<usize> = p.iter().copied().collect();
            assert_eq!(set.len(), p.len(), "non-simple path {p:?}");
        })
        .unwrap();
    }

    #[test]
    fn ear_bound_holds_on_small_biconnected_graphs() {
        // Every biconnected (V_B, E_B) admits at least |E_B| - |V_B| + 1
        // xy-paths for any pair of its vertices.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(107);
        let mut tested = 0;
        for _ in 0..400 {
            let n = rng.gen_range(3..8);
            let mut g = UndirectedGraph::new(n);
            let mut seen = std::collections::HashSet::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.5) && seen.insert((u, v)) {
                        g.add_edge(u, v, 1);
                    }
                }
            }
            g.sort_adjacency();
            let d = crate::graph::bcc_decompose(&g);
            // pick the whole graph only if it is one biconnected block
            if d.bccs.len() != 1 || d.bccs[0].vertices.len() != n || n < 3 {
                continue;
            }
            tested += 1;
            let bound = g.m() as isize - n as isize + 1;
            for x in 0..n {
                for y in (x + 1)..n {
                    let cnt = brute_st_paths(&g, x, y).len() as isize;
                    assert!(cnt >= bound, "x={x} y={y} cnt={cnt} bound={bound}");
                }
            }
        }
        assert!(tested >= 30, "{tested}");
    }

    #[test]
    fn k_equals_one_gives_a_shortest_path() {
        let mut g = WeightedDigraph::new(4);
        g.add_arc(0, 1, 5);
        g.add_arc(0, 2, 1);
        g.add_arc(2, 3, 1);
        g.add_arc(1, 3, 1);
        g.sort_adjacency();
        let (got, _) =
            list_paths_ordered(&g, 0, 3, 100, PathOrder::IncreasingLength, Some(1)).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].1, 2);
        assert_eq!(got[0].0, vec![0, 2, 3]);
    }
}
