//! Certificate-maintained st-path listing.
//!
//! The certificate is a DFS tree of the current bead string (the chain of
//! biconnected components between the recursion endpoint and t), rooted at
//! the endpoint with t on the leftmost path. Each vertex carries an order
//! number (its depth), a lowpoint over its subtree's back edges, a list of
//! back edges from descendants (postorder) and one to ancestors (preorder).
//!
//! The four operations follow the binary-partition contract:
//!  * choose: last back edge into the root, else the unique tree edge; O(1).
//!  * update_right: delete the chosen back edge, repair lowpoints on the
//!    walk toward the root, and prune subtrees that fall off the bead
//!    string.
//!  * update_left: on a unary root this is an O(1) re-root; on a branching
//!    root it deletes the root and rebuilds the certificate over the bead
//!    chain of the new root, reusing one biconnected-component
//!    decomposition per spine (all left branches of a spine see the same
//!    graph, since the removed edges are incident to the deleted root).
//!  * restore: rolls the journal back in reverse order.
//!
//! Every structural edit is journaled as its inverse; rebuilds snapshot the
//! region they overwrite.

use std::rc::Rc;

use super::PathError;
use crate::graph::{GraphError, UndirectedGraph};


#[derive(Debug, Clone, Default)]
pub struct CertStats {
    pub rebuilds: u64,
    pub spine_bccs: u64,
}

#[derive(Debug, Clone)]
struct VertexSave {
    v: usize,
    parent: usize,
    parent_edge: usize,
    first_child: usize,
    next_sib: usize,
    prev_sib: usize,
    gamma: u64,
    low: u64,
    support: u32,
    lb: Vec<usize>,
    ab: Vec<usize>,
    leftmost: bool,
}

enum UndoOp {
    LbPush { v: usize, e: usize },          // undo of lb pop
    LbInsert { v: usize, idx: usize, e: usize }, // undo of lb remove-at
    AbInsert { v: usize, idx: usize, e: usize }, // undo of ab remove-at
    SetLow { v: usize, old: u64 },
    SetSupport { v: usize, old: u32 },
    ReattachChild { child: usize, parent: usize, prev: usize, next: usize },
    ReattachTail { v: usize, second: usize },
    ReviveVertex { v: usize },
    ReviveEdge { e: usize },
    Region { saves: Vec<VertexSave> },
    SetRoot { old: usize },

    RelinkHalf { h: usize, prev: usize, next: usize },
}

/// Per-spine shared data: the block structure of the alive graph with the
/// spine's root excluded. Valid for every left branch of the spine.
struct SpineBcc {
    /// block id per alive vertex (articulation points appear in several
    /// blocks; membership lists are kept per block instead)
    blocks: Vec<Vec<usize>>,
    block_edges: Vec<Vec<usize>>,
    /// for each block, (parent block toward t's block, shared articulation)
    block_parent: Vec<usize>,
    block_depth: Vec<usize>,
    /// blocks containing each vertex
    of_vertex: Vec<Vec<usize>>,
}

struct SpineCtx {
    bcc: Option<Rc<SpineBcc>>,
    exit: usize,
}

const NONE: usize = usize::MAX;

pub(super) struct CertEnumerator<'g, F: FnMut(&[usize])> {
    g: &'g UndirectedGraph,
    t: usize,
    valive: Vec<bool>,
    ealive: Vec<bool>,
    // certificate fields
    root: usize,
    parent: Vec<usize>,
    parent_edge: Vec<usize>,
    // children as doubly-linked sibling lists: detach and reattach are O(1)
    first_child: Vec<usize>,
    next_sib: Vec<usize>,
    prev_sib: Vec<usize>,
    gamma: Vec<u64>,
    low: Vec<u64>,
    /// number of lowpoint witnesses: children and alive ancestor back edges
    /// attaining the current lowpoint
    support: Vec<u32>,
    lb: Vec<Vec<usize>>,
    ab: Vec<Vec<usize>>,
    leftmost: Vec<bool>,
    // linked alive adjacency: half-edge h = 2*e + side lives in the list
    // of its source endpoint; killed edges are spliced out so scans touch
    // only alive incident edges
    half_next: Vec<usize>,
    half_prev: Vec<usize>,
    adj_head: Vec<usize>,
    // scratch
    mark: Vec<u64>,
    mark_cur: u64,
    emit: F,
    pub stats: CertStats,
}

#[inline]
fn half_src(g: &UndirectedGraph, h: usize) -> usize {
    let (a, b, _) = g.edges[h / 2];
    if h % 2 == 0 {
        a
    } else {
        b
    }
}

#[inline]
fn half_dst(g: &UndirectedGraph, h: usize) -> usize {
    let (a, b, _) = g.edges[h / 2];
    if h % 2 == 0 {
        b
    } else {
        a
    }
}

const INF_LOW: u64 = u64::MAX;

impl<'g, F: FnMut(&[usize])> CertEnumerator<'g, F> {
    fn new(g: &'g UndirectedGraph, t: usize, emit: F) -> Self {
        let n = g.n();
        let mut half_next = vec![NONE; 2 * g.m()];
        let mut half_prev = vec![NONE; 2 * g.m()];
        let mut adj_head = vec![NONE; n];
        let mut tail = vec![NONE; n];
        for (v, l) in (0..n).map(|v| (v, g.adj(v))) {
            for &(_, e) in l {
                let (a, _b, _) = g.edges[e];
                let h = 2 * e + usize::from(a != v);
                if adj_head[v] == NONE {
                    adj_head[v] = h;
                } else {
                    half_next[tail[v]] = h;
                    half_prev[h] = tail[v];
                }
                tail[v] = h;
            }
        }
        CertEnumerator {
            g,
            t,
            valive: vec![true; n],
            ealive: vec![true; g.m()],
            half_next,
            half_prev,
            adj_head,
            root: NONE,
            parent: vec![NONE; n],
            parent_edge: vec![NONE; n],
            first_child: vec![NONE; n],
            next_sib: vec![NONE; n],
            prev_sib: vec![NONE; n],
            gamma: vec![0; n],
            low: vec![INF_LOW; n],
            support: vec![0; n],
            lb: vec![Vec::new(); n],
            ab: vec![Vec::new(); n],
            leftmost: vec![false; n],
            mark: vec![0; n],
            mark_cur: 0,
            emit,
            stats: CertStats::default(),
        }
    }

    fn other(&self, e: usize, v: usize) -> usize {
        self.g.other_endpoint(e, v)
    }

    fn edge_alive(&self, e: usize) -> bool {
        let (a, b, _) = self.g.edges[e];
        self.ealive[e] && self.valive[a] && self.valive[b]
    }

    /// Splice a half-edge out of its endpoint's list, journaled.
    fn unlink_half(&mut self, frame: &mut Vec<UndoOp>, h: usize) {
        let (prev, next) = (self.half_prev[h], self.half_next[h]);
        frame.push(UndoOp::RelinkHalf { h, prev, next });
        if prev == NONE {
            self.adj_head[half_src(self.g, h)] = next;
        } else {
            self.half_next[prev] = next;
        }
        if next != NONE {
            self.half_prev[next] = prev;
        }
    }

    /// Remove the edge from both adjacency lists and mark it dead.
    fn kill_edge(&mut self, frame: &mut Vec<UndoOp>, e: usize) {
        debug_assert!(self.ealive[e]);
        self.ealive[e] = false;
        frame.push(UndoOp::ReviveEdge { e });
        self.unlink_half(frame, 2 * e);
        self.unlink_half(frame, 2 * e + 1);
    }

    /// Mark the vertex dead; scans skip edges with a dead endpoint, so no
    /// list surgery is needed and the kill is constant time.
    fn kill_vertex(&mut self, frame: &mut Vec<UndoOp>, v: usize) {
        debug_assert!(self.valive[v]);
        self.valive[v] = false;
        frame.push(UndoOp::ReviveVertex { v });
    }

    fn for_each_child<G: FnMut(usize)>(&self, v: usize, mut f: G) {
        let mut c = self.first_child[v];
        while c != NONE {
            f(c);
            c = self.next_sib[c];
        }
    }

    fn children_count_at_least(&self, v: usize, k: usize) -> bool {
        let mut c = self.first_child[v];
        let mut n = 0;
        while c != NONE && n < k {
            n += 1;
            c = self.next_sib[c];
        }
        n >= k
    }

    /// Splice a child out of its parent's sibling list, journaled.
    fn detach_child(&mut self, frame: &mut Vec<UndoOp>, w: usize) {
        let p = self.parent[w];
        let (prev, next) = (self.prev_sib[w], self.next_sib[w]);
        frame.push(UndoOp::ReattachChild { child: w, parent: p, prev, next });
        if prev == NONE {
            self.first_child[p] = next;
        } else {
            self.next_sib[prev] = next;
        }
        if next != NONE {
            self.prev_sib[next] = prev;
        }
        self.next_sib[w] = NONE;
        self.prev_sib[w] = NONE;
    }

    /// Unjournaled push-front used by the rebuild (the region snapshot
    /// already covers these vertices).
    fn attach_front(&mut self, p: usize, w: usize) {
        let old = self.first_child[p];
        self.next_sib[w] = old;
        self.prev_sib[w] = NONE;
        if old != NONE {
            self.prev_sib[old] = w;
        }
        self.first_child[p] = w;
        self.parent[w] = p;
    }

    /// Unjournaled splice-out used by the rebuild's rotation.
    fn splice_out(&mut self, w: usize) {
        let p = self.parent[w];
        let (prev, next) = (self.prev_sib[w], self.next_sib[w]);
        if prev == NONE {
            self.first_child[p] = next;
        } else {
            self.next_sib[prev] = next;
        }
        if next != NONE {
            self.prev_sib[next] = prev;
        }
        self.next_sib[w] = NONE;
        self.prev_sib[w] = NONE;
    }

    /// Biconnected components of the alive graph, optionally restricted to
    /// a vertex set and excluding one vertex, arranged as a tree rooted at
    /// the blocks of `target`.
    fn compute_spine_bcc(
        &mut self,
        within: Option<&[usize]>,
        exclude: Option<usize>,
        target: usize,
        count_ops: bool,
    ) -> SpineBcc {
        let n = self.g.n();
        let stamp = if let Some(set) = within {
            self.mark_cur += 1;
            for &v in set {
                self.mark[v] = self.mark_cur;
            }
            Some(self.mark_cur)
        } else {
            None
        };
        let mark = &self.mark;
        let alive = |v: usize| {
            self.valive[v]
                && Some(v) != exclude
                && stamp.map_or(true, |s| mark[v] == s)
        };
        // iterative Tarjan restricted to alive vertices/edges
        let mut disc = vec![NONE; n];
        let mut low = vec![0usize; n];
        let mut pedge = vec![NONE; n];
        let mut timer = 0usize;
        let mut estack: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_edges: Vec<Vec<usize>> = Vec::new();
        let mut of_vertex: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let roots: Vec<usize> = match within {
            Some(set) => set.to_vec(),
            None => (0..n).collect(),
        };
        for r in roots {
            if !alive(r) || disc[r] != NONE {
                continue;
            }
            disc[r] = timer;
            low[r] = timer;
            timer += 1;
            stack.push((r, self.adj_head[r]));
            while let Some(&mut (u, ref mut cur)) = stack.last_mut() {
                if *cur != NONE {
                    let h = *cur;
                    let e = h / 2;
                    let v = half_dst(self.g, h);
                    *cur = self.half_next[h];
                    if count_ops {
                        self.g.ops.bump(1);
                    }
                    if !self.ealive[e] || !alive(v) || e == pedge[u] {
                        continue;
                    }
                    if disc[v] == NONE {
                        pedge[v] = e;
                        disc[v] = timer;
                        low[v] = timer;
                        timer += 1;
                        estack.push(e);
                        stack.push((v, self.adj_head[v]));
                    } else if disc[v] < disc[u] {
                        estack.push(e);
                        low[u] = low[u].min(disc[v]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        low[p] = low[p].min(low[u]);
                        if low[u] >= disc[p] {
                            let mut verts = Vec::new();
                            let mut bedges = Vec::new();
                            while let Some(&top) = estack.last() {
                                estack.pop();
                                let (a, b, _) = self.g.edges[top];
                                verts.push(a);
                                verts.push(b);
                                bedges.push(top);
                                if top == pedge[u] {
                                    break;
                                }
                            }
                            if !verts.is_empty() {
                                verts.sort_unstable();
                                verts.dedup();
                                let id = blocks.len();
                                for &v in &verts {
                                    of_vertex[v].push(id);
                                }
                                blocks.push(verts);
                                block_edges.push(bedges);
                            }
                        }
                    }
                }
            }
        }
        // Tree over blocks rooted at a block containing t: BFS through
        // shared articulation vertices.
        let b = blocks.len();
        let mut block_parent = vec![NONE; b];
        let mut block_depth = vec![usize::MAX; b];
        let mut queue = std::collections::VecDeque::new();
        if alive(target) {
            for &tb in &of_vertex[target] {
                block_parent[tb] = tb;
                block_depth[tb] = 0;
                queue.push_back(tb);
            }
        }
        while let Some(bk) = queue.pop_front() {
            if count_ops {
                self.g.ops.bump(1);
            }
            for &v in &blocks[bk] {
                if of_vertex[v].len() > 1 {
                    for &nb in &of_vertex[v] {
                        if block_depth[nb] == usize::MAX {
                            block_depth[nb] = block_depth[bk] + 1;
                            block_parent[nb] = bk;
                            queue.push_back(nb);
                        }
                    }
                }
            }
        }
        SpineBcc { blocks, block_edges, block_parent, block_depth, of_vertex }
    }

    /// Vertices and edges of the bead chain from `from` to the target of
    /// the given block structure (union over the block-tree path).
    fn chain_vertices(
        &mut self,
        bcc: &SpineBcc,
        from: usize,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut best: Option<usize> = None;
        for &bk in &bcc.of_vertex[from] {
            if bcc.block_depth[bk] != usize::MAX
                && best.map_or(true, |b| bcc.block_depth[bk] < bcc.block_depth[b])
            {
                best = Some(bk);
            }
        }
        let mut bk = best?;
        let mut verts: Vec<usize> = Vec::new();
        let mut edges: Vec<usize> = Vec::new();
        loop {
            self.g.ops.bump(bcc.blocks[bk].len() as u64);
            verts.extend(bcc.blocks[bk].iter().copied());
            edges.extend(bcc.block_edges[bk].iter().copied());
            if bcc.block_parent[bk] == bk {
                break;
            }
            bk = bcc.block_parent[bk];
        }
        verts.sort_unstable();
        verts.dedup();
        Some((verts, edges))
    }

    /// Rebuild the certificate tree from `new_root` over exactly the given
    /// vertex set and candidate edge set (which must contain new_root and
    /// t). Saves overwritten state into `frame`. Scanning is confined to
    /// the supplied edges, never to full adjacency lists.
    fn rebuild(
        &mut self,
        frame: &mut Vec<UndoOp>,
        new_root: usize,
        region: &[usize],
        region_edges: &[usize],
    ) {
        self.stats.rebuilds += 1;
        // snapshot
        let mut saves = Vec::with_capacity(region.len() + 1);
        for &v in region {
            saves.push(VertexSave {
                v,
                parent: self.parent[v],
                parent_edge: self.parent_edge[v],
                first_child: self.first_child[v],
                next_sib: self.next_sib[v],
                prev_sib: self.prev_sib[v],
                gamma: self.gamma[v],
                low: self.low[v],
                support: self.support[v],
                lb: std::mem::take(&mut self.lb[v]),
                ab: std::mem::take(&mut self.ab[v]),
                leftmost: self.leftmost[v],
            });
            self.parent[v] = NONE;
            self.parent_edge[v] = NONE;
            self.first_child[v] = NONE;
            self.next_sib[v] = NONE;
            self.prev_sib[v] = NONE;
            self.low[v] = INF_LOW;
            self.leftmost[v] = false;
        }
        frame.push(UndoOp::Region { saves });
        frame.push(UndoOp::SetRoot { old: self.root });
        self.root = new_root;

        // marker for the region
        self.mark_cur += 1;
        let cur = self.mark_cur;
        for &v in region {
            self.mark[v] = cur;
        }

        // DFS from new_root within the region; gamma = depth.
        self.mark_dfs(new_root, cur, region, region_edges);

        // Put t on the leftmost path: rotate t's root path to the front of
        // each ancestor's child list, then flag it.
        let mut x = self.t;
        self.leftmost[self.t] = true;
        while x != new_root {
            let p = self.parent[x];
            debug_assert!(p != NONE, "target outside rebuilt region");
            self.splice_out(x);
            self.attach_front(p, x);
            self.leftmost[p] = true;
            x = p;
        }

        // Trim subtrees that do not belong to the bead string of the new
        // root: a non-leftmost subtree that cannot reach strictly above its
        // parent hangs off an articulation point and lies on no path to t.
        // Children are examined before parents; a kept parent never owes its
        // lowpoint to a cut child (the child's lowpoint is too deep).
        let mut order = vec![new_root];
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            self.for_each_child(v, |c| order.push(c));
        }
        for &v in order.iter().rev() {
            let p = self.parent[v];
            if p == NONE || self.leftmost[v] || !self.valive[v] {
                continue;
            }
            if self.low[v] >= self.gamma[p] {
                self.prune_subtree(frame, v);
            }
        }

        // Witness counts for the repair walks (children and alive ancestor
        // back edges attaining each surviving vertex's lowpoint), children
        // before parents so recomputed lowpoints propagate.
        for &v in order.iter().rev() {
            if self.valive[v] {
                let (nl, ns) = self.scan_low(v);
                self.low[v] = nl;
                self.support[v] = ns;
            }
        }
    }

    /// Iterative DFS over marked alive vertices computing the certificate
    /// fields. Children are appended in adjacency order; lb lists come out
    /// in postorder of the descendant endpoint, ab lists sorted by ancestor
    /// depth.
    fn mark_dfs(&mut self, root: usize, cur: u64, region: &[usize], region_edges: &[usize]) {
        // Local adjacency over the candidate edges only.
        let local = |v: usize| region.binary_search(&v).unwrap();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); region.len()];
        for &e in region_edges {
            self.g.ops.bump(1);
            if !self.edge_alive(e) {
                continue;
            }
            let (a, b, _) = self.g.edges[e];
            if self.mark[a] != cur || self.mark[b] != cur {
                continue;
            }
            adj[local(a)].push((b, e));
            adj[local(b)].push((a, e));
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        #[derive(Clone, Copy)]
        struct St {
            v: usize,
            cursor: usize,
        }
        let mut onstack = std::collections::HashSet::new();
        let mut visited = std::collections::HashSet::new();
        let mut stack = vec![St { v: root, cursor: 0 }];
        self.gamma[root] = 0;
        self.low[root] = INF_LOW;
        onstack.insert(root);
        visited.insert(root);
        while let Some(top) = stack.last().copied() {
            let u = top.v;
            let lu = local(u);
            if top.cursor < adj[lu].len() {
                let (v, e) = adj[lu][top.cursor];
                stack.last_mut().unwrap().cursor += 1;
                self.g.ops.bump(1);
                if e == self.parent_edge[u] {
                    continue;
                }
                if !visited.contains(&v) {
                    visited.insert(v);
                    onstack.insert(v);
                    self.parent[v] = u;
                    self.parent_edge[v] = e;
                    self.gamma[v] = self.gamma[u] + 1;
                    self.low[v] = INF_LOW;
                    self.attach_front(u, v);
                    stack.push(St { v, cursor: 0 });
                } else if onstack.contains(&v) && self.gamma[v] < self.gamma[u] {
                    // back edge u -> ancestor v
                    self.ab[u].push(e);
                    self.low[u] = self.low[u].min(self.gamma[v]);
                }
            } else {
                // postorder moment for u: register its ancestor back edges
                // into the ancestors' lb lists, propagate lowpoint.
                let mut abu = std::mem::take(&mut self.ab[u]);
                abu.sort_by_key(|&e| self.gamma[self.other(e, u)]);
                self.ab[u] = abu;
                for i in 0..self.ab[u].len() {
                    let e = self.ab[u][i];
                    let anc = self.other(e, u);
                    self.lb[anc].push(e);
                }
                stack.pop();
                onstack.remove(&u);
                if let Some(pp) = stack.last() {
                    let p = pp.v;
                    let low_u = self.low[u];
                    if low_u < self.low[p] {
                        self.low[p] = low_u;
                    }
                    let _ = p;
                }
            }
        }
    }

    fn begin(&mut self) -> Vec<UndoOp> {
        Vec::new()
    }

    fn restore(&mut self, mut frame: Vec<UndoOp>) {
        while let Some(op) = frame.pop() {
            self.g.ops.bump(1);
            match op {
                UndoOp::LbPush { v, e } => self.lb[v].push(e),
                UndoOp::LbInsert { v, idx, e } => self.lb[v].insert(idx, e),
                UndoOp::AbInsert { v, idx, e } => self.ab[v].insert(idx, e),
                UndoOp::SetLow { v, old } => self.low[v] = old,
                UndoOp::SetSupport { v, old } => self.support[v] = old,
                UndoOp::ReattachChild { child, parent, prev, next } => {
                    self.parent[child] = parent;
                    self.prev_sib[child] = prev;
                    self.next_sib[child] = next;
                    if prev == NONE {
                        self.first_child[parent] = child;
                    } else {
                        self.next_sib[prev] = child;
                    }
                    if next != NONE {
                        self.prev_sib[next] = child;
                    }
                }
                UndoOp::ReattachTail { v, second } => {
                    let first = self.first_child[v];
                    self.next_sib[first] = second;
                    self.prev_sib[second] = first;
                }
                UndoOp::ReviveVertex { v } => self.valive[v] = true,
                UndoOp::ReviveEdge { e } => self.ealive[e] = true,
                UndoOp::Region { saves } => {
                    for s in saves {
                        let v = s.v;
                        self.parent[v] = s.parent;
                        self.parent_edge[v] = s.parent_edge;
                        self.first_child[v] = s.first_child;
                        self.next_sib[v] = s.next_sib;
                        self.prev_sib[v] = s.prev_sib;
                        self.gamma[v] = s.gamma;
                        self.low[v] = s.low;
                        self.support[v] = s.support;
                        self.lb[v] = s.lb;
                        self.ab[v] = s.ab;
                        self.leftmost[v] = s.leftmost;
                    }
                }
                UndoOp::SetRoot { old } => self.root = old,
                UndoOp::RelinkHalf { h, prev, next } => {
                    self.half_prev[h] = prev;
                    self.half_next[h] = next;
                    if prev == NONE {
                        self.adj_head[half_src(self.g, h)] = h;
                    } else {
                        self.half_next[prev] = h;
                    }
                    if next != NONE {
                        self.half_prev[next] = h;
                    }
                }
            }
        }
    }

    /// Recompute a vertex's lowpoint and its witness count from alive
    /// ancestor back edges and children.
    fn scan_low(&self, v: usize) -> (u64, u32) {
        let mut low = INF_LOW;
        let mut cnt: u32 = 1; // INF witnesses itself
        for &e in &self.ab[v] {
            self.g.ops.bump(1);
            if self.edge_alive(e) {
                let g = self.gamma[self.other(e, v)];
                if g < low {
                    low = g;
                    cnt = 1;
                } else if g == low {
                    cnt += 1;
                }
            }
        }
        let mut c = self.first_child[v];
        while c != NONE {
            self.g.ops.bump(1);
            let l = self.low[c];
            if l < low {
                low = l;
                cnt = 1;
            } else if l == low {
                cnt += 1;
            }
            c = self.next_sib[c];
        }
        (low, cnt)
    }

    /// Remove the back edge (z, root), repair lowpoints walking z -> root,
    /// and prune subtrees that no longer reach strictly above their parent.
    fn update_right(&mut self, frame: &mut Vec<UndoOp>, e: usize, z: usize) {
        // remove from lb(root): it is the last entry
        debug_assert_eq!(self.lb[self.root].last(), Some(&e));
        self.lb[self.root].pop();
        frame.push(UndoOp::LbPush { v: self.root, e });
        // remove from ab(z)
        let idx = self.ab[z].iter().position(|&x| x == e).unwrap();
        self.ab[z].remove(idx);
        frame.push(UndoOp::AbInsert { v: z, idx, e });
        self.g.ops.bump(idx as u64 + 1);
        self.kill_edge(frame, e);
        // Repair walk: a vertex's lowpoint only changes when it loses its
        // last witness; then a rescan finds the new value and the walk
        // climbs. The removed edge targeted the root, so the first trigger
        // fires iff gamma(root) was z's lowpoint.
        let mut w = z;
        let mut lost = self.gamma[self.root] == self.low[z];
        while w != self.root && lost {
            self.g.ops.bump(1);
            if self.support[w] > 1 {
                frame.push(UndoOp::SetSupport { v: w, old: self.support[w] });
                self.support[w] -= 1;
                break;
            }
            let old = self.low[w];
            let (nl, ns) = self.scan_low(w);
            if nl == old {
                // another witness at the same level; fix the count
                frame.push(UndoOp::SetSupport { v: w, old: self.support[w] });
                self.support[w] = ns;
                break;
            }
            frame.push(UndoOp::SetLow { v: w, old });
            frame.push(UndoOp::SetSupport { v: w, old: self.support[w] });
            self.low[w] = nl;
            self.support[w] = ns;
            let p = self.parent[w];
            if p == NONE {
                break;
            }
            if !self.leftmost[w] && self.low[w] >= self.gamma[p] {
                self.prune_subtree(frame, w);
            }
            lost = old == self.low[p];
            w = p;
        }
    }

    /// Detach `w` from its parent, kill its subtree in the alive graph, and
    /// drop the subtree's back edges from the parent's lb list (the only
    /// certificate vertex such edges can reach, by the prune condition).
    fn prune_subtree(&mut self, frame: &mut Vec<UndoOp>, w: usize) {
        let p = self.parent[w];
        self.detach_child(frame, w);
        self.g.ops.bump(1);
        // collect subtree
        let mut sub = vec![w];
        let mut i = 0;
        while i < sub.len() {
            let x = sub[i];
            i += 1;
            self.for_each_child(x, |c| sub.push(c));
        }
        for &x in &sub {
            self.g.ops.bump(1);
            if self.valive[x] {
                self.kill_vertex(frame, x);
            }
            // remove this vertex's ancestor back edges that leave the
            // subtree (they can only reach p) from lb(p)
            for &e in &self.ab[x].clone() {
                let anc = self.other(e, x);
                if anc == p {
                    if let Some(pos) = self.lb[p].iter().position(|&y| y == e) {
                        self.lb[p].remove(pos);
                        frame.push(UndoOp::LbInsert { v: p, idx: pos, e });
                        self.g.ops.bump(pos as u64 + 1);
                    }
                }
            }
        }
    }

    /// O(1) re-root along the unique tree edge of a unary root. The root
    /// has no back edges, so it has degree one in the alive graph and its
    /// removal cannot split anything.
    fn update_left_unary(&mut self, frame: &mut Vec<UndoOp>) -> usize {
        let u = self.root;
        let v = self.first_child[u];
        self.kill_vertex(frame, u);
        frame.push(UndoOp::SetRoot { old: u });
        self.root = v;
        // Cut children of v beyond the leftmost: with the root gone they
        // cannot reach above v. The pruning discipline keeps this empty,
        // so the cut is a no-op in practice.
        let first = self.first_child[v];
        if first != NONE {
            let second = self.next_sib[first];
            if second != NONE {
                self.next_sib[first] = NONE;
                self.prev_sib[second] = NONE;
                frame.push(UndoOp::ReattachTail { v, second });
            }
        }
        v
    }

    /// Walk the leftmost path from the root collecting the head: the block
    /// of the root's first tree edge. A path vertex is kept while the next
    /// one's subtree reaches strictly above it; hanging subtrees of kept
    /// vertices always belong to the head. Returns (head vertices, exit):
    /// the exit is the articulation toward t, or t itself.
    fn head_and_exit(&mut self) -> (Vec<usize>, usize) {
        let mut head = vec![self.root];
        let collect_hangers = |slf: &Self, x: usize, head: &mut Vec<usize>| {
            let mut h = if slf.first_child[x] == NONE {
                NONE
            } else {
                slf.next_sib[slf.first_child[x]]
            };
            while h != NONE {
                let mut stack = vec![h];
                while let Some(y) = stack.pop() {
                    slf.g.ops.bump(1);
                    head.push(y);
                    slf.for_each_child(y, |c| stack.push(c));
                }
                h = slf.next_sib[h];
            }
        };
        let mut x = self.root;
        let mut first = true;
        let exit = loop {
            self.g.ops.bump(1);
            if x == self.t {
                // the leftmost path ends here: every subtree of t hangs
                // into the head
                let mut stack = Vec::new();
                self.for_each_child(x, |c| stack.push(c));
                while let Some(y) = stack.pop() {
                    self.g.ops.bump(1);
                    head.push(y);
                    self.for_each_child(y, |c| stack.push(c));
                }
                break x;
            }
            let c = self.first_child[x];
            // The first tree edge always belongs to the head; after it, a
            // path vertex joins while its subtree reaches strictly above
            // the previous one.
            if !first && self.low[c] >= self.gamma[x] {
                break x;
            }
            head.push(c);
            collect_hangers(self, c, &mut head);
            first = false;
            x = c;
        };
        head.sort_unstable();
        head.dedup();
        (head, exit)
    }

    /// Left branch along a back edge (root, z): delete the root and rebuild
    /// the certificate over the bead chain of z taken from the spine's
    /// block structure, plus the untouched tail hanging below the exit.
    fn update_left_binary(
        &mut self,
        frame: &mut Vec<UndoOp>,
        spine: &mut SpineCtx,
        z: usize,
    ) {
        let u = self.root;
        let bcc = spine
            .bcc
            .as_ref()
            .expect("spine block structure missing at a left branch")
            .clone();
        self.kill_vertex(frame, u);
        let (mut region, mut region_edges) = self
            .chain_vertices(&bcc, z)
            .expect("left branch without a bead chain");
        if spine.exit != self.t {
            // Append the tail: the subtree of the exit's leftmost child
            // (the exit's other children are head hangers, already covered
            // by the chain blocks). The certificate's tree and back edges
            // over the tail are exactly its bead-string edges.
            let mut stack: Vec<usize> = vec![self.first_child[spine.exit]];
            while let Some(y) = stack.pop() {
                self.g.ops.bump(1);
                region.push(y);
                region_edges.push(self.parent_edge[y]);
                region_edges.extend(self.ab[y].iter().copied());
                self.for_each_child(y, |c| stack.push(c));
            }
        }
        region.sort_unstable();
        region.dedup();
        region_edges.sort_unstable();
        region_edges.dedup();
        self.rebuild(frame, z, &region, &region_edges);
    }

    fn emit_path(&mut self, path: &[usize]) {
        (self.emit)(path);
    }

    fn rec(&mut self, path: &mut Vec<usize>, spine: &mut SpineCtx) {
        let u = self.root;
        if u == self.t {
            self.emit_path(path);
            return;
        }
        self.g.ops.bump(1);
        // The spine's block structure is computed once, at spine entry,
        // before any of its edge removals or prunes: every left branch of
        // the spine sees a subgraph of this state, so the bead chains read
        // from it are supersets that the rebuild's lowpoint cuts trim back.
        // It covers only the head (the first bead of the current string);
        // the tail below the head's exit is untouched by spine operations.
        if spine.bcc.is_none() && !self.lb[u].is_empty() {
            self.stats.spine_bccs += 1;
            let (head, exit) = self.head_and_exit();
            spine.exit = exit;
            spine.bcc =
                Some(Rc::new(self.compute_spine_bcc(Some(&head), Some(u), exit, true)));
        }
        if let Some(&e) = self.lb[u].last() {
            // back edge: right branch (avoid e), then left branch (use e)
            let z = self.other(e, u);
            let mut frame = self.begin();
            self.update_right(&mut frame, e, z);
            self.rec(path, spine);
            self.restore(frame);

            let mut frame = self.begin();
            self.update_left_binary(&mut frame, spine, z);
            #[cfg(debug_assertions)]
            self.debug_check_head_density();
            path.push(z);
            let mut inner = SpineCtx { bcc: None, exit: NONE };
            self.rec(path, &mut inner);
            path.pop();
            self.restore(frame);
        } else {
            // unary: single tree edge, left branch only
            debug_assert!(self.first_child[u] != NONE, "stuck certificate");
            let mut frame = self.begin();
            let v = self.update_left_unary(&mut frame);
            path.push(v);
            let mut inner = SpineCtx { bcc: None, exit: NONE };
            self.rec(path, &mut inner);
            path.pop();
            self.restore(frame);
        }
    }

    /// Compacted-head density check: whenever the head (the block of the
    /// root in the current bead string) compacts to more than 3 vertices,
    /// |E_X| / |V_X| >= 11/10.
    #[cfg(debug_assertions)]
    fn debug_check_head_density(&mut self) {
        let u = self.root;
        // head = block of u over alive graph
        let bcc = self.compute_spine_bcc(None, None, self.t, false);
        let Some(&hb) = bcc.of_vertex[u].iter().min_by_key(|&&b| bcc.block_depth[b]) else {
            return;
        };
        let verts = &bcc.blocks[hb];
        if verts.len() <= 2 {
            return;
        }
        // degree within the head
        let vset: std::collections::HashSet<usize> = verts.iter().copied().collect();
        let mut deg = std::collections::HashMap::new();
        let mut edges = 0usize;
        for &v in verts {
            for &(w, e) in self.g.adj(v) {
                if self.edge_alive(e) && vset.contains(&w) {
                    *deg.entry(v).or_insert(0usize) += 1;
                    if v < w {
                        edges += 1;
                    }
                }
            }
        }
        // the exit: t if it lies in the head, else the articulation shared
        // with the parent block on the chain toward t
        let exit = if vset.contains(&self.t) {
            self.t
        } else {
            let pb = bcc.block_parent[hb];
            *bcc.blocks[pb]
                .iter()
                .find(|v| vset.contains(v))
                .unwrap_or(&self.t)
        };
        // DFS-tree leaves of the head (certificate vertices with no child
        // inside the head) stay uncontracted, as do the root and the exit.
        let mut vx = 0usize;
        let mut dropped = 0usize;
        for &v in verts {
            let d = deg.get(&v).copied().unwrap_or(0);
            let mut is_leaf = true;
            self.for_each_child(v, |c| {
                if vset.contains(&c) {
                    is_leaf = false;
                }
            });
            if d == 2 && v != u && v != exit && !is_leaf {
                dropped += 1;
            } else {
                vx += 1;
            }
        }
        let ex = edges - dropped; // each contracted vertex removes one edge
        if vx > 3 {
            debug_assert!(
                10 * ex >= 11 * vx,
                "compacted head density {ex}/{vx} below 11/10"
            );
        }
    }
}

/// Certificate-mode st-path listing.
pub(super) fn list_st_paths<F: FnMut(&[usize])>(
    g: &UndirectedGraph,
    s: usize,
    t: usize,
    emit: F,
) -> Result<(), PathError> {
    if s >= g.n() || t >= g.n() {
        return Err(GraphError::VertexNotFound(s.max(t)).into());
    }
    if s == t {
        return Err(GraphError::SameEndpoints.into());
    }
    let mut en = CertEnumerator::new(g, t, emit);
    // initial bead string from s
    let bcc = en.compute_spine_bcc(None, None, t, true);
    let Some((region, region_edges)) = en.chain_vertices(&bcc, s) else {
        return Ok(()); // t unreachable
    };
    if !region.contains(&s) || !region.contains(&t) {
        return Ok(());
    }
    // connectivity check: s must reach t
    {
        let mut seen = vec![false; g.n()];
        let mut stack = vec![s];
        seen[s] = true;
        let mut ok = false;
        while let Some(x) = stack.pop() {
            if x == t {
                ok = true;
                break;
            }
            for &(y, e) in g.adj(x) {
                if en.edge_alive(e) && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if !ok {
            return Ok(());
        }
    }
    let mut frame = en.begin();
    en.rebuild(&mut frame, s, &region, &region_edges);
    let mut path = vec![s];
    let mut spine = SpineCtx { bcc: None, exit: NONE };
    en.rec(&mut path, &mut spine);
    Ok(())
}
