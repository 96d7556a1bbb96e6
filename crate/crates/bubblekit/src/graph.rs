//! Instrumented graph primitives shared by the enumeration modules.
//!
//! Both graph types carry a monotone elementary-operation counter (arc
//! touches, queue operations) bumped by every algorithm in this crate; all
//! delay and total-work claims are measured against it rather than against
//! wall time. Graphs are immutable during queries and the counter is atomic,
//! so independent queries may run concurrently.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::{self, BufRead, Write};
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

pub type Weight = i64;

/// Saturating "unreachable" distance.
pub const INF: Weight = Weight::MAX;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("negative arc weight {w} on arc ({u}, {v})")]
    NegativeWeight { u: usize, v: usize, w: Weight },
    #[error("negative cycle reachable in the graph")]
    NegativeCycle,
    #[error("vertex {0} out of range")]
    VertexNotFound(usize),
    #[error("source and target must differ")]
    SameEndpoints,
    #[error("bad edge-list input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Shared monotone operation counter.
#[derive(Debug, Default)]
pub struct OpCounter(AtomicU64);

impl OpCounter {
    #[inline]
    pub fn bump(&self, n: u64) {
        self.0.fetch_add(n, Ordering::Relaxed);
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

impl Clone for OpCounter {
    fn clone(&self) -> Self {
        OpCounter(AtomicU64::new(self.get()))
    }
}

/// Directed graph with integer arc weights, forward and reverse adjacency.
#[derive(Debug, Clone, Default)]
pub struct WeightedDigraph {
    adj: Vec<Vec<(usize, Weight)>>,
    radj: Vec<Vec<(usize, Weight)>>,
    m: usize,
    has_negative: bool,
    pub ops: OpCounter,
}

impl WeightedDigraph {
    pub fn new(n: usize) -> Self {
        WeightedDigraph {
            adj: vec![Vec::new(); n],
            radj: vec![Vec::new(); n],
            m: 0,
            has_negative: false,
            ops: OpCounter::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn has_negative_weights(&self) -> bool {
        self.has_negative
    }

    /// Self-loops are rejected; parallel arcs are allowed.
    pub fn add_arc(&mut self, u: usize, v: usize, w: Weight) {
        assert!(u != v, "self-loops are not supported");
        assert!(u < self.n() && v < self.n());
        self.adj[u].push((v, w));
        self.radj[v].push((u, w));
        if w < 0 {
            self.has_negative = true;
        }
        self.m += 1;
    }

    pub fn out(&self, u: usize) -> &[(usize, Weight)] {
        &self.adj[u]
    }

    pub fn rin(&self, v: usize) -> &[(usize, Weight)] {
        &self.radj[v]
    }

    /// Sort adjacency lists by (neighbor, weight) for deterministic iteration.
    pub fn sort_adjacency(&mut self) {
        for l in &mut self.adj {
            l.sort_unstable();
        }
        for l in &mut self.radj {
            l.sort_unstable();
        }
    }
}

/// Undirected graph with explicit edge identities (the BCC decomposition
/// partitions edges, so edges need names).
#[derive(Debug, Clone, Default)]
pub struct UndirectedGraph {
    pub edges: Vec<(usize, usize, Weight)>,
    adj: Vec<Vec<(usize, usize)>>, // (neighbor, edge id)
    pub ops: OpCounter,
}

impl UndirectedGraph {
    pub fn new(n: usize) -> Self {
        UndirectedGraph { edges: Vec::new(), adj: vec![Vec::new(); n], ops: OpCounter::default() }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: Weight) -> usize {
        assert!(u != v, "self-loops are not supported");
        assert!(u < self.n() && v < self.n());
        let id = self.edges.len();
        self.edges.push((u, v, w));
        self.adj[u].push((v, id));
        self.adj[v].push((u, id));
        id
    }

    pub fn adj(&self, u: usize) -> &[(usize, usize)] {
        &self.adj[u]
    }

    pub fn sort_adjacency(&mut self) {
        for l in &mut self.adj {
            l.sort_unstable();
        }
    }

    pub fn other_endpoint(&self, edge: usize, u: usize) -> usize {
        let (a, b, _) = self.edges[edge];
        if a == u {
            b
        } else {
            a
        }
    }
}

#[derive(Debug, Clone)]
pub struct EdgeList {
    pub n: usize,
    pub directed: bool,
    pub weighted: bool,
    pub edges: Vec<(usize, usize, Weight)>,
}

/// Text edge-list format: header `n m directed|undirected weighted|unit`,
/// then `u v [w]` lines with 0-based vertex ids.
pub fn parse_edge_list<R: BufRead>(rd: R) -> Result<EdgeList, GraphError> {
    let mut lines = rd.lines();
    let header = loop {
        match lines.next() {
            Some(l) => {
                let l = l?;
                let t = l.trim().to_string();
                if !t.is_empty() && !t.starts_with('#') {
                    break t;
                }
            }
            None => return Err(GraphError::Parse("empty input".into())),
        }
    };
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 {
        return Err(GraphError::Parse(format!("bad header: {header:?}")));
    }
    let n: usize =
        parts[0].parse().map_err(|_| GraphError::Parse("bad vertex count".into()))?;
    let m: usize =
        parts[1].parse().map_err(|_| GraphError::Parse("bad edge count".into()))?;
    let directed = match parts[2] {
        "directed" => true,
        "undirected" => false,
        other => return Err(GraphError::Parse(format!("bad orientation {other:?}"))),
    };
    let weighted = match parts[3] {
        "weighted" => true,
        "unit" => false,
        other => return Err(GraphError::Parse(format!("bad weight mode {other:?}"))),
    };
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        if f.len() != 2 + weighted as usize {
            return Err(GraphError::Parse(format!("bad edge line: {t:?}")));
        }
        let u: usize = f[0].parse().map_err(|_| GraphError::Parse(format!("bad id in {t:?}")))?;
        let v: usize = f[1].parse().map_err(|_| GraphError::Parse(format!("bad id in {t:?}")))?;
        let w: Weight = if weighted {
            f[2].parse().map_err(|_| GraphError::Parse(format!("bad weight in {t:?}")))?
        } else {
            1
        };
        if u >= n || v >= n {
            return Err(GraphError::VertexNotFound(u.max(v)));
        }
        edges.push((u, v, w));
    }
    if edges.len() != m {
        return Err(GraphError::Parse(format!("expected {m} edges, got {}", edges.len())));
    }
    Ok(EdgeList { n, directed, weighted, edges })
}

impl EdgeList {
    pub fn to_digraph(&self) -> WeightedDigraph {
        let mut g = WeightedDigraph::new(self.n);
        for &(u, v, w) in &self.edges {
            g.add_arc(u, v, w);
            if !self.directed {
                g.add_arc(v, u, w);
            }
        }
        g.sort_adjacency();
        g
    }

    pub fn to_undirected(&self) -> UndirectedGraph {
        let mut g = UndirectedGraph::new(self.n);
        for &(u, v, w) in &self.edges {
            g.add_edge(u, v, w);
        }
        g.sort_adjacency();
        g
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<(), GraphError> {
        writeln!(
            w,
            "{} {} {} {}",
            self.n,
            self.edges.len(),
            if self.directed { "directed" } else { "undirected" },
            if self.weighted { "weighted" } else { "unit" }
        )?;
        for &(u, v, wt) in &self.edges {
            if self.weighted {
                writeln!(w, "{u} {v} {wt}")?;
            } else {
                writeln!(w, "{u} {v}")?;
            }
        }
        Ok(())
    }
}

/// One biconnected component: its edges and incident vertices.
#[derive(Debug, Clone)]
pub struct Bcc {
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
}

/// Tarjan lowpoint decomposition output. Nothing is filtered; discarding
/// small components is the caller's job.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub bccs: Vec<Bcc>,
    pub is_articulation: Vec<bool>,
    /// For every BCC, (shared articulation vertex, adjacent BCC) pairs.
    pub block_adjacency: Vec<Vec<(usize, usize)>>,
    pub bcc_of_edge: Vec<usize>,
}

impl BlockDecomposition {
    pub fn articulation_points(&self) -> Vec<usize> {
        self.is_articulation
            .iter()
            .enumerate()
            .filter_map(|(v, &a)| a.then_some(v))
            .collect()
    }
}

/// Single-DFS biconnected component decomposition (iterative Tarjan
/// lowpoint). Every edge lands in exactly one component.
pub fn bcc_decompose(g: &UndirectedGraph) -> BlockDecomposition {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut is_articulation = vec![false; n];
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut bccs: Vec<Bcc> = Vec::new();
    let mut bcc_of_edge = vec![usize::MAX; g.m()];
    let mut timer = 0usize;

    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, 0));
        let mut root_children = 0usize;
        while let Some(&mut (u, ref mut cursor)) = stack.last_mut() {
            if *cursor < g.adj(u).len() {
                let (v, eid) = g.adj(u)[*cursor];
                *cursor += 1;
                g.ops.bump(1);
                if eid == parent_edge[u] {
                    continue;
                }
                if disc[v] == usize::MAX {
                    parent_edge[v] = eid;
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    edge_stack.push(eid);
                    if u == root {
                        root_children += 1;
                    }
                    stack.push((v, 0));
                } else if disc[v] < disc[u] {
                    // back edge
                    edge_stack.push(eid);
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] >= disc[p] {
                        // p separates u's subtree: pop one component.
                        let mut edges = Vec::new();
                        while let Some(&top) = edge_stack.last() {
                            edge_stack.pop();
                            edges.push(top);
                            if top == parent_edge[u] {
                                break;
                            }
                        }
                        if !edges.is_empty() {
                            let id = bccs.len();
                            let mut vs = Vec::new();
                            for &e in &edges {
                                bcc_of_edge[e] = id;
                                let (a, b, _) = g.edges[e];
                                vs.push(a);
                                vs.push(b);
                            }
                            vs.sort_unstable();
                            vs.dedup();
                            edges.sort_unstable();
                            bccs.push(Bcc { edges, vertices: vs });
                        }
                        if p != root {
                            is_articulation[p] = true;
                        }
                    }
                }
            }
        }
        if root_children >= 2 {
            is_articulation[root] = true;
        }
    }

    // Block tree adjacency through shared articulation points.
    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (id, bcc) in bccs.iter().enumerate() {
        for &v in &bcc.vertices {
            by_vertex[v].push(id);
        }
    }
    let mut block_adjacency = vec![Vec::new(); bccs.len()];
    for v in 0..n {
        if by_vertex[v].len() > 1 {
            debug_assert!(is_articulation[v]);
            for &a in &by_vertex[v] {
                for &b in &by_vertex[v] {
                    if a != b {
                        block_adjacency[a].push((v, b));
                    }
                }
            }
        }
    }
    BlockDecomposition { bccs, is_articulation, block_adjacency, bcc_of_edge }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeapVariant {
    /// Indexed binary heap with decrease-key.
    Binary,
    /// Binary heap without decrease-key (lazy deletion); the default.
    BinaryNoDecreaseKey,
}

impl Default for HeapVariant {
    fn default() -> Self {
        HeapVariant::BinaryNoDecreaseKey
    }
}

/// Single-source shortest path tree, optionally truncated at distance
/// `bound`: vertices farther than the bound keep distance INF.
#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    pub source: usize,
    pub dist: Vec<Weight>,
    pub parent: Vec<usize>,
    pub bound: Option<Weight>,
}

impl ShortestPathTree {
    pub fn reaches(&self, v: usize) -> bool {
        self.dist[v] != INF
    }
}

pub fn saturating_add(a: Weight, b: Weight) -> Weight {
    if a == INF || b == INF {
        INF
    } else {
        a.saturating_add(b)
    }
}

/// Dijkstra with pluggable adjacency (run on the reverse graph or a filtered
/// view by passing a different closure) and multiple sources with initial
/// offsets. Distances beyond `bound` are reported as INF.
pub fn dijkstra_generic<'a, F>(
    n: usize,
    adj: F,
    ops: &OpCounter,
    sources: &[(usize, Weight)],
    bound: Option<Weight>,
    variant: HeapVariant,
) -> (Vec<Weight>, Vec<usize>)
where
    F: Fn(usize) -> &'a [(usize, Weight)],
{
    let mut dist = vec![INF; n];
    let mut parent = vec![usize::MAX; n];
    match variant {
        HeapVariant::BinaryNoDecreaseKey => {
            let mut heap: BinaryHeap<Reverse<(Weight, usize)>> = BinaryHeap::new();
            let mut settled = vec![false; n];
            for &(s, d0) in sources {
                if d0 < dist[s] {
                    dist[s] = d0;
                    heap.push(Reverse((d0, s)));
                    ops.bump(1);
                }
            }
            while let Some(Reverse((d, u))) = heap.pop() {
                ops.bump(1);
                if settled[u] || d > dist[u] {
                    continue;
                }
                settled[u] = true;
                for &(v, w) in adj(u) {
                    ops.bump(1);
                    let nd = saturating_add(d, w);
                    if nd < dist[v] {
                        if let Some(b) = bound {
                            if nd > b {
                                continue;
                            }
                        }
                        dist[v] = nd;
                        parent[v] = u;
                        heap.push(Reverse((nd, v)));
                        ops.bump(1);
                    }
                }
            }
        }
        HeapVariant::Binary => {
            let mut heap_pos = vec![usize::MAX; n];
            let mut heap: Vec<(Weight, usize)> = Vec::new();
            fn sift_up(
                heap: &mut Vec<(Weight, usize)>,
                pos: &mut [usize],
                mut i: usize,
                ops: &OpCounter,
            ) {
                while i > 0 {
                    let p = (i - 1) / 2;
                    if heap[p].0 <= heap[i].0 {
                        break;
                    }
                    heap.swap(i, p);
                    pos[heap[i].1] = i;
                    pos[heap[p].1] = p;
                    i = p;
                    ops.bump(1);
                }
            }
            fn sift_down(
                heap: &mut Vec<(Weight, usize)>,
                pos: &mut [usize],
                mut i: usize,
                ops: &OpCounter,
            ) {
                loop {
                    let l = 2 * i + 1;
                    let r = 2 * i + 2;
                    let mut best = i;
                    if l < heap.len() && heap[l].0 < heap[best].0 {
                        best = l;
                    }
                    if r < heap.len() && heap[r].0 < heap[best].0 {
                        best = r;
                    }
                    if best == i {
                        break;
                    }
                    heap.swap(i, best);
                    pos[heap[i].1] = i;
                    pos[heap[best].1] = best;
                    i = best;
                    ops.bump(1);
                }
            }
            for &(s, d0) in sources {
                if d0 < dist[s] {
                    dist[s] = d0;
                    if heap_pos[s] == usize::MAX {
                        heap_pos[s] = heap.len();
                        heap.push((d0, s));
                    } else {
                        let i = heap_pos[s];
                        heap[i].0 = d0;
                    }
                    let i = heap_pos[s];
                    sift_up(&mut heap, &mut heap_pos, i, ops);
                }
            }
            while !heap.is_empty() {
                let (d, u) = heap[0];
                ops.bump(1);
                let last = heap.len() - 1;
                heap.swap(0, last);
                heap_pos[heap[0].1] = 0;
                heap.pop();
                heap_pos[u] = usize::MAX;
                if !heap.is_empty() {
                    sift_down(&mut heap, &mut heap_pos, 0, ops);
                }
                for &(v, w) in adj(u) {
                    ops.bump(1);
                    let nd = saturating_add(d, w);
                    if nd < dist[v] {
                        if let Some(b) = bound {
                            if nd > b {
                                continue;
                            }
                        }
                        dist[v] = nd;
                        parent[v] = u;
                        if heap_pos[v] == usize::MAX {
                            heap_pos[v] = heap.len();
                            heap.push((nd, v));
                            let i = heap.len() - 1;
                            sift_up(&mut heap, &mut heap_pos, i, ops);
                        } else {
                            let i = heap_pos[v];
                            heap[i].0 = nd;
                            sift_up(&mut heap, &mut heap_pos, i, ops);
                        }
                        ops.bump(1);
                    }
                }
            }
        }
    }
    (dist, parent)
}

/// Exact single-source distances with non-negative weights, truncated at
/// `bound` when given.
pub fn shortest_path_tree(
    g: &WeightedDigraph,
    source: usize,
    bound: Option<Weight>,
    variant: HeapVariant,
) -> Result<ShortestPathTree, GraphError> {
    if source >= g.n() {
        return Err(GraphError::VertexNotFound(source));
    }
    reject_negative(g)?;
    let (dist, parent) =
        dijkstra_generic(g.n(), |u| g.out(u), &g.ops, &[(source, 0)], bound, variant);
    Ok(ShortestPathTree { source, dist, parent, bound })
}

/// Shortest-path tree on the reverse graph: distances from every vertex TO
/// `target`.
pub fn shortest_path_tree_to(
    g: &WeightedDigraph,
    target: usize,
    bound: Option<Weight>,
    variant: HeapVariant,
) -> Result<ShortestPathTree, GraphError> {
    if target >= g.n() {
        return Err(GraphError::VertexNotFound(target));
    }
    reject_negative(g)?;
    let (dist, parent) =
        dijkstra_generic(g.n(), |u| g.rin(u), &g.ops, &[(target, 0)], bound, variant);
    Ok(ShortestPathTree { source: target, dist, parent, bound })
}

fn reject_negative(g: &WeightedDigraph) -> Result<(), GraphError> {
    if g.has_negative_weights() {
        for u in 0..g.n() {
            for &(v, w) in g.out(u) {
                if w < 0 {
                    return Err(GraphError::NegativeWeight { u, v, w });
                }
            }
        }
    }
    Ok(())
}

/// Dijkstra over an arc-visitor closure, for filtered graph views (deleted
/// vertices or arcs) without materializing them. Multi-source with initial
/// offsets; distances beyond `bound` are left at INF.
pub fn dijkstra_visit<F>(
    n: usize,
    mut for_each_arc: F,
    ops: &OpCounter,
    sources: &[(usize, Weight)],
    bound: Option<Weight>,
) -> Vec<Weight>
where
    F: FnMut(usize, &mut dyn FnMut(usize, Weight)),
{
    let mut dist = vec![INF; n];
    let mut settled = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(Weight, usize)>> = BinaryHeap::new();
    for &(s, d0) in sources {
        if d0 < dist[s] && bound.map_or(true, |b| d0 <= b) {
            dist[s] = d0;
            heap.push(Reverse((d0, s)));
            ops.bump(1);
        }
    }
    while let Some(Reverse((d, u))) = heap.pop() {
        ops.bump(1);
        if settled[u] || d > dist[u] {
            continue;
        }
        settled[u] = true;
        for_each_arc(u, &mut |v, w| {
            ops.bump(1);
            let nd = saturating_add(d, w);
            if nd < dist[v] && bound.map_or(true, |b| nd <= b) {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
                ops.bump(1);
            }
        });
    }
    dist
}

/// Label-correcting (SPFA-style Bellman-Ford) distances from `source`, for
/// graphs with general weights. `alive` masks deleted vertices. Errors on a
/// reachable negative cycle.
pub fn bellman_ford_generic<'a, F>(
    n: usize,
    adj: F,
    ops: &OpCounter,
    source: usize,
    alive: Option<&[bool]>,
) -> Result<Vec<Weight>, GraphError>
where
    F: Fn(usize) -> &'a [(usize, Weight)],
{
    let is_alive = |v: usize| alive.map_or(true, |a| a[v]);
    let mut dist = vec![INF; n];
    if !is_alive(source) {
        return Ok(dist);
    }
    dist[source] = 0;
    let mut in_queue = vec![false; n];
    let mut relax_count = vec![0usize; n];
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(source);
    in_queue[source] = true;
    while let Some(u) = queue.pop_front() {
        ops.bump(1);
        in_queue[u] = false;
        let du = dist[u];
        for &(v, w) in adj(u) {
            ops.bump(1);
            if !is_alive(v) {
                continue;
            }
            let nd = saturating_add(du, w);
            if nd < dist[v] {
                dist[v] = nd;
                if !in_queue[v] {
                    relax_count[v] += 1;
                    if relax_count[v] > n {
                        return Err(GraphError::NegativeCycle);
                    }
                    queue.push_back(v);
                    in_queue[v] = true;
                }
            }
        }
    }
    Ok(dist)
}
