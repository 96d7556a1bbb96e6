//! Bidirected de Bruijn graphs, compression, and the split into a plain
//! weighted digraph.
//!
//! Every node carries a forward sequence F(v); the reverse sequence R(v) is
//! its reverse complement, implicit. Arcs are labeled FF/FR/RF/RR: the first
//! letter names the strand of the source whose (k-1)-suffix overlaps, the
//! second the strand of the target whose (k-1)-prefix it matches. Every arc
//! has a twin in the opposite direction with both letters complemented and
//! swapped, so the arc count is even.
//!
//! Compression merges maximal non-branching valid paths into single nodes
//! whose labels keep one copy of each (k-1)-overlap; the k-mer multiset
//! spelled by all labels is unchanged.

use std::collections::HashMap;
use std::io::Write;

use thiserror::Error;

use crate::graph::{Weight, WeightedDigraph};
use crate::kmer::{Kmer, SolidSet};

#[derive(Debug, Error)]
pub enum DbgError {
    #[error("inconsistent k: expected {expected}, got {got}")]
    InconsistentK { expected: usize, got: usize },
    #[error("arc sequence is not a path: arc {index} does not start at the previous target")]
    NotAPath { index: usize },
    #[error("unknown arc ({from}, {to}, {label})")]
    UnknownArc { from: usize, to: usize, label: ArcLabel },
}

/// Strand letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strand {
    F,
    R,
}

impl Strand {
    pub fn flip(self) -> Strand {
        match self {
            Strand::F => Strand::R,
            Strand::R => Strand::F,
        }
    }
}

/// Arc label: (leaving strand of source, entering strand of target).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcLabel(pub Strand, pub Strand);

impl ArcLabel {
    /// Twin label: letters complemented and swapped; an involution.
    pub fn twin(self) -> ArcLabel {
        ArcLabel(self.1.flip(), self.0.flip())
    }
}

impl std::fmt::Display for ArcLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = |s: Strand| match s {
            Strand::F => 'F',
            Strand::R => 'R',
        };
        write!(f, "{}{}", c(self.0), c(self.1))
    }
}

pub const FF: ArcLabel = ArcLabel(Strand::F, Strand::F);
pub const FR: ArcLabel = ArcLabel(Strand::F, Strand::R);
pub const RF: ArcLabel = ArcLabel(Strand::R, Strand::F);
pub const RR: ArcLabel = ArcLabel(Strand::R, Strand::R);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledArc {
    pub from: usize,
    pub to: usize,
    pub label: ArcLabel,
}

impl LabeledArc {
    pub fn twin(&self) -> LabeledArc {
        LabeledArc { from: self.to, to: self.from, label: self.label.twin() }
    }
}

pub fn revcomp_str(s: &str) -> String {
    s.bytes()
        .rev()
        .map(|b| match b {
            b'A' => 'T',
            b'C' => 'G',
            b'G' => 'C',
            b'T' => 'A',
            other => other as char, // N in consensus labels stays N
        })
        .collect()
}

/// A node: forward label, mean k-mer coverage, and the number of k-mers the
/// label spells.
#[derive(Debug, Clone)]
pub struct BdNode {
    pub forward: String,
    pub coverage: f64,
    pub kmer_count: usize,
    /// F(v) equals R(v); possible for even k. Such nodes are excluded from
    /// twin-symmetry assertions.
    pub palindromic: bool,
}

impl BdNode {
    pub fn reverse(&self) -> String {
        revcomp_str(&self.forward)
    }

    pub fn seq(&self, s: Strand) -> String {
        match s {
            Strand::F => self.forward.clone(),
            Strand::R => self.reverse(),
        }
    }
}

/// Bidirected de Bruijn graph; doubles as the compressed graph (labels
/// longer than k appear after compression).
#[derive(Debug, Clone)]
pub struct BidirectedDbg {
    pub k: usize,
    pub nodes: Vec<BdNode>,
    out: Vec<Vec<(usize, ArcLabel)>>,
}

impl BidirectedDbg {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|l| l.len()).sum()
    }

    pub fn out(&self, u: usize) -> &[(usize, ArcLabel)] {
        &self.out[u]
    }

    pub fn arcs(&self) -> impl Iterator<Item = LabeledArc> + '_ {
        self.out.iter().enumerate().flat_map(|(u, l)| {
            l.iter().map(move |&(v, label)| LabeledArc { from: u, to: v, label })
        })
    }

    pub fn has_arc(&self, a: &LabeledArc) -> bool {
        self.out[a.from].iter().any(|&(v, l)| v == a.to && l == a.label)
    }

    /// New nucleotides a node contributes along a path:
    /// label length - (k-1); 1 for plain k-mer nodes.
    pub fn contrib(&self, v: usize) -> usize {
        self.nodes[v].forward.len() - (self.k - 1)
    }

    fn add_arc(&mut self, from: usize, to: usize, label: ArcLabel) {
        if !self.out[from].iter().any(|&(v, l)| v == to && l == label) {
            self.out[from].push((to, label));
        }
    }

    fn sort_arcs(&mut self) {
        for l in &mut self.out {
            l.sort_unstable();
        }
    }

    /// Node-only construction; the caller wires arcs explicitly.
    pub(crate) fn from_nodes(k: usize, nodes: Vec<BdNode>) -> Self {
        let n = nodes.len();
        BidirectedDbg { k, nodes, out: vec![Vec::new(); n] }
    }

    pub(crate) fn push_arc(&mut self, from: usize, to: usize, label: ArcLabel) {
        self.add_arc(from, to, label);
    }

    pub(crate) fn finish_arcs(&mut self) {
        self.sort_arcs();
    }

    /// Build from explicit forward sequences; arcs derived from (k-1)
    /// suffix-prefix overlaps across all strand combinations. Self-loops are
    /// skipped.
    pub fn from_forward_seqs(k: usize, seqs: &[&str], coverages: &[f64]) -> Self {
        let nodes: Vec<BdNode> = seqs
            .iter()
            .zip(coverages)
            .map(|(s, &c)| BdNode {
                forward: s.to_string(),
                coverage: c,
                kmer_count: s.len() - k + 1,
                palindromic: revcomp_str(s) == **s,
            })
            .collect();
        let mut g = BidirectedDbg { k, out: vec![Vec::new(); nodes.len()], nodes };
        g.connect_by_overlap(None);
        g.sort_arcs();
        g
    }

    /// Build the plain graph over the solid set: one node per canonical
    /// k-mer. When `kplus1` is given, an arc is kept only if its spelled
    /// (k+1)-mer is present (canonically) in that set.
    pub fn build(solid: &SolidSet, kplus1: Option<&SolidSet>) -> Result<Self, DbgError> {
        if let Some(s1) = kplus1 {
            if s1.k != solid.k + 1 {
                return Err(DbgError::InconsistentK { expected: solid.k + 1, got: s1.k });
            }
        }
        let k = solid.k;
        let nodes: Vec<BdNode> = solid
            .iter()
            .map(|r| {
                let f = r.kmer.decode();
                BdNode {
                    palindromic: revcomp_str(&f) == f,
                    forward: f,
                    coverage: r.count as f64,
                    kmer_count: 1,
                }
            })
            .collect();
        let mut g = BidirectedDbg { k, out: vec![Vec::new(); nodes.len()], nodes };
        g.connect_by_overlap(kplus1);
        g.sort_arcs();
        Ok(g)
    }

    /// Build using a cascading Bloom filter for neighbor membership: the
    /// node list supplies identities, the cascade answers extension queries.
    pub fn build_from_cascade(
        cascade: &crate::bloom::CascadingBloom,
        node_kmers: &[Kmer],
    ) -> Result<Self, DbgError> {
        let k = cascade.k;
        for km in node_kmers {
            if km.k() != k {
                return Err(DbgError::InconsistentK { expected: k, got: km.k() });
            }
        }
        let nodes: Vec<BdNode> = node_kmers
            .iter()
            .map(|km| {
                let f = km.decode();
                BdNode {
                    palindromic: revcomp_str(&f) == f,
                    forward: f,
                    coverage: 1.0,
                    kmer_count: 1,
                }
            })
            .collect();
        let index: HashMap<u128, usize> =
            node_kmers.iter().enumerate().map(|(i, km)| (km.packed(), i)).collect();
        let mut g = BidirectedDbg { k, out: vec![Vec::new(); nodes.len()], nodes };
        for u in 0..g.nodes.len() {
            for strand in [Strand::F, Strand::R] {
                let seq = g.nodes[u].seq(strand);
                for b in ['A', 'C', 'G', 'T'] {
                    let mut w = seq[1..].to_string();
                    w.push(b);
                    let km = Kmer::encode(w.as_bytes()).unwrap().canonical();
                    if !cascade.contains(&km) {
                        continue;
                    }
                    let Some(&v) = index.get(&km.packed()) else { continue };
                    if v == u {
                        continue;
                    }
                    let entering = if g.nodes[v].forward == w { Strand::F } else { Strand::R };
                    let arc = LabeledArc { from: u, to: v, label: ArcLabel(strand, entering) };
                    let twin = arc.twin();
                    g.add_arc(arc.from, arc.to, arc.label);
                    g.add_arc(twin.from, twin.to, twin.label);
                }
            }
        }
        g.sort_arcs();
        Ok(g)
    }

    fn connect_by_overlap(&mut self, kplus1: Option<&SolidSet>) {
        let k = self.k;
        let mut by_prefix: HashMap<String, Vec<(usize, Strand)>> = HashMap::new();
        for (v, node) in self.nodes.iter().enumerate() {
            for strand in [Strand::F, Strand::R] {
                let seq = node.seq(strand);
                by_prefix.entry(seq[..k - 1].to_string()).or_default().push((v, strand));
            }
        }
        let mut new_arcs: Vec<LabeledArc> = Vec::new();
        for (u, node) in self.nodes.iter().enumerate() {
            for leaving in [Strand::F, Strand::R] {
                let seq = node.seq(leaving);
                let suffix = &seq[seq.len() - (k - 1)..];
                if let Some(cands) = by_prefix.get(suffix) {
                    for &(v, entering) in cands {
                        if v == u {
                            continue;
                        }
                        if let Some(s1) = kplus1 {
                            // Spelled (k+1)-mer across the junction.
                            let mut spelled = seq[seq.len() - k..].to_string();
                            let vseq = self.nodes[v].seq(entering);
                            spelled.push(vseq.as_bytes()[k - 1] as char);
                            let km = Kmer::encode(spelled.as_bytes()).unwrap().canonical();
                            if !s1.contains(&km) {
                                continue;
                            }
                        }
                        new_arcs.push(LabeledArc {
                            from: u,
                            to: v,
                            label: ArcLabel(leaving, entering),
                        });
                    }
                }
            }
        }
        for a in new_arcs {
            self.add_arc(a.from, a.to, a.label);
        }
    }

    /// Twin symmetry check; palindromic nodes are exempt.
    pub fn check_twin_symmetry(&self) -> bool {
        for a in self.arcs() {
            if self.nodes[a.from].palindromic || self.nodes[a.to].palindromic {
                continue;
            }
            if !self.has_arc(&a.twin()) {
                return false;
            }
        }
        true
    }

    /// Sorted multiset of canonical k-mers spelled by all node labels.
    /// Labels containing N (post simple-bubble compression) contribute only
    /// their clean windows.
    pub fn spelled_kmers(&self) -> Vec<u128> {
        let mut out = Vec::new();
        for node in &self.nodes {
            for km in crate::kmer::canonical_kmers(node.forward.as_bytes(), self.k) {
                out.push(km.packed());
            }
        }
        out.sort_unstable();
        out
    }

    /// Node table `id<TAB>label_sequence<TAB>coverage`, then arcs as
    /// `head_id<TAB>tail_id<TAB>label<TAB>weight`.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, n) in self.nodes.iter().enumerate() {
            writeln!(w, "{}\t{}\t{:.3}", i, n.forward, n.coverage)?;
        }
        writeln!(w, "#arcs")?;
        for a in self.arcs() {
            writeln!(w, "{}\t{}\t{}\t{}", a.from, a.to, a.label, self.contrib(a.from))?;
        }
        Ok(())
    }
}

/// True iff consecutive arcs chain their strand letters (the entering strand
/// of one arc is the leaving strand of the next). Empty and single-arc paths
/// are valid. Errors when the arcs do not exist or do not form a path.
pub fn is_valid_path(g: &BidirectedDbg, path: &[LabeledArc]) -> Result<bool, DbgError> {
    for (i, a) in path.iter().enumerate() {
        if !g.has_arc(a) {
            return Err(DbgError::UnknownArc { from: a.from, to: a.to, label: a.label });
        }
        if i > 0 && path[i - 1].to != a.from {
            return Err(DbgError::NotAPath { index: i });
        }
    }
    Ok(path.windows(2).all(|w| w[0].label.1 == w[1].label.0))
}

/// Split-graph side handle: node id and strand.
pub type Side = (usize, Strand);

pub fn side_index(side: Side) -> usize {
    side.0 * 2 + matches!(side.1, Strand::R) as usize
}

pub fn side_of_index(i: usize) -> Side {
    (i / 2, if i % 2 == 0 { Strand::F } else { Strand::R })
}

fn flip_side(s: Side) -> Side {
    (s.0, s.1.flip())
}

/// Merge maximal non-branching valid paths. A merged path of i plain
/// vertices becomes one node with a label of length k + (i-1).
pub fn compress(g: &BidirectedDbg) -> BidirectedDbg {
    let n = g.n();
    // Side-level adjacency: arc (u,v,L1L2) connects side (u,L1) to (v,L2).
    let mut out: Vec<Vec<Side>> = vec![Vec::new(); 2 * n];
    let mut inc: Vec<Vec<Side>> = vec![Vec::new(); 2 * n];
    for a in g.arcs() {
        out[side_index((a.from, a.label.0))].push((a.to, a.label.1));
        inc[side_index((a.to, a.label.1))].push((a.from, a.label.0));
    }

    let unique_next = |side: Side| -> Option<Side> {
        let l = &out[side_index(side)];
        if l.len() != 1 {
            return None;
        }
        let nxt = l[0];
        (inc[side_index(nxt)].len() == 1 && nxt.0 != side.0).then_some(nxt)
    };
    // A side begins a maximal chain iff no predecessor links to it uniquely.
    let is_start = |side: Side| -> bool {
        if inc[side_index(side)].len() != 1 {
            return true;
        }
        let pred = inc[side_index(side)][0];
        !(out[side_index(pred)].len() == 1 && pred.0 != side.0)
    };

    let mut chain_of_side: Vec<usize> = vec![usize::MAX; 2 * n];
    let mut chains: Vec<Vec<Side>> = Vec::new();

    fn claim_chain(
        start: Side,
        unique_next: &dyn Fn(Side) -> Option<Side>,
        chain_of_side: &[usize],
    ) -> Vec<Side> {
        let mut chain = vec![start];
        let mut used_nodes = std::collections::HashSet::new();
        used_nodes.insert(start.0);
        let mut cur = start;
        while let Some(nxt) = unique_next(cur) {
            // Stop on node revisits (either strand) and on claimed sides.
            if !used_nodes.insert(nxt.0) || chain_of_side[side_index(nxt)] != usize::MAX {
                break;
            }
            chain.push(nxt);
            cur = nxt;
        }
        chain
    }

    let mut order: Vec<Side> = Vec::new();
    for v in 0..n {
        order.push((v, Strand::F));
        order.push((v, Strand::R));
    }

    // Claim maximal chains from genuine starts together with their mirrors.
    for &side in &order {
        if chain_of_side[side_index(side)] != usize::MAX || !is_start(side) {
            continue;
        }
        let chain = claim_chain(side, &unique_next, &chain_of_side);
        let mirror: Vec<Side> = chain.iter().rev().map(|&s| flip_side(s)).collect();
        let mirror_fresh = mirror
            .iter()
            .all(|&s| chain_of_side[side_index(s)] == usize::MAX);
        let overlaps_own_mirror = chain.iter().any(|&s| mirror.contains(&s));
        if !mirror_fresh || overlaps_own_mirror {
            // Palindromic interference: keep these sides as singletons.
            for &s in &chain {
                if chain_of_side[side_index(s)] == usize::MAX {
                    let cid = chains.len();
                    chain_of_side[side_index(s)] = cid;
                    chains.push(vec![s]);
                    let ms = flip_side(s);
                    if chain_of_side[side_index(ms)] == usize::MAX {
                        let mid = chains.len();
                        chain_of_side[side_index(ms)] = mid;
                        chains.push(vec![ms]);
                    }
                }
            }
            continue;
        }
        let cid = chains.len();
        for &s in &chain {
            chain_of_side[side_index(s)] = cid;
        }
        chains.push(chain);
        let mid = chains.len();
        for &s in &mirror {
            chain_of_side[side_index(s)] = mid;
        }
        chains.push(mirror);
    }
    // Remaining sides belong to pure non-branching cycles; claim greedily.
    for &side in &order {
        if chain_of_side[side_index(side)] == usize::MAX {
            let chain = claim_chain(side, &unique_next, &chain_of_side);
            let cid = chains.len();
            for &s in &chain {
                chain_of_side[side_index(s)] = cid;
            }
            chains.push(chain);
        }
    }

    // Emit one node per chain/mirror pair; the smaller spelling is forward.
    let spell = |chain: &[Side]| -> String {
        let mut s = g.nodes[chain[0].0].seq(chain[0].1);
        for &(v, st) in &chain[1..] {
            let seq = g.nodes[v].seq(st);
            s.push_str(&seq[g.k - 1..]);
        }
        s
    };
    let mut orient_of_chain: Vec<Option<(usize, Strand)>> = vec![None; chains.len()];
    let mut new_nodes: Vec<BdNode> = Vec::new();
    for (cid, chain) in chains.iter().enumerate() {
        if orient_of_chain[cid].is_some() {
            continue;
        }
        let mirror_first = flip_side(chain[chain.len() - 1]);
        let mirror_cid = chain_of_side[side_index(mirror_first)];
        let fwd = spell(chain);
        let rc = revcomp_str(&fwd);
        let take_fwd = fwd <= rc;
        let label = if take_fwd { fwd } else { rc };
        let id = new_nodes.len();
        let kmers: usize = chain.iter().map(|&(v, _)| g.nodes[v].kmer_count).sum();
        let cov_sum: f64 = chain
            .iter()
            .map(|&(v, _)| g.nodes[v].coverage * g.nodes[v].kmer_count as f64)
            .sum();
        new_nodes.push(BdNode {
            palindromic: revcomp_str(&label) == label,
            forward: label,
            coverage: cov_sum / kmers as f64,
            kmer_count: kmers,
        });
        let fwd_strand = if take_fwd { Strand::F } else { Strand::R };
        orient_of_chain[cid] = Some((id, fwd_strand));
        if mirror_cid != cid && orient_of_chain[mirror_cid].is_none() {
            orient_of_chain[mirror_cid] = Some((id, fwd_strand.flip()));
        }
    }

    // Boundary arcs: original arcs that are not internal chain links.
    let mut out_new: Vec<Vec<(usize, ArcLabel)>> = vec![Vec::new(); new_nodes.len()];
    for a in g.arcs() {
        let from_side = (a.from, a.label.0);
        let to_side = (a.to, a.label.1);
        let c_from = chain_of_side[side_index(from_side)];
        let c_to = chain_of_side[side_index(to_side)];
        if c_from == c_to {
            let chain = &chains[c_from];
            let pos_from = chain.iter().position(|&s| s == from_side).unwrap();
            if pos_from + 1 < chain.len() && chain[pos_from + 1] == to_side {
                continue; // internal link
            }
        }
        let (from_new, from_orient) = orient_of_chain[c_from].unwrap();
        let (to_new, to_orient) = orient_of_chain[c_to].unwrap();
        let arc = (to_new, ArcLabel(from_orient, to_orient));
        if !out_new[from_new].contains(&arc) {
            out_new[from_new].push(arc);
        }
    }
    let mut compressed = BidirectedDbg { k: g.k, nodes: new_nodes, out: out_new };
    compressed.sort_arcs();
    compressed
}

/// Split every node into a forward and a reverse vertex (ids 2v and 2v+1)
/// and map arcs through their labels. Arc weight = new nucleotides of the
/// source node.
pub fn split_bidirected(g: &BidirectedDbg) -> WeightedDigraph {
    let mut d = WeightedDigraph::new(2 * g.n());
    let mut seen = std::collections::HashSet::new();
    for a in g.arcs() {
        let from = side_index((a.from, a.label.0));
        let to = side_index((a.to, a.label.1));
        if from == to || !seen.insert((from, to)) {
            continue;
        }
        d.add_arc(from, to, g.contrib(a.from) as Weight);
    }
    d.sort_adjacency();
    d
}

/// Weight of a split-graph path in new nucleotides: the sum of every node's
/// contribution. The spelled label length is this weight plus (k-1).
pub fn split_path_weight(g: &BidirectedDbg, path: &[usize]) -> Weight {
    path.iter().map(|&v| g.contrib(v / 2) as Weight).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmer::count_kmers_naive;

    fn build_plain(reads: &[&str], k: usize) -> BidirectedDbg {
        let solid = count_kmers_naive(reads, k, 1);
        BidirectedDbg::build(&solid, None).unwrap()
    }

    #[test]
    fn figure_read_set_builds_seven_node_graph() {
        let g = build_plain(&["ACTGG", "TCTGGG", "CTGGGTGGG"], 4);
        assert_eq!(g.n(), 7);
        assert!(g.check_twin_symmetry());
        assert_eq!(g.arc_count() % 2, 0);
        // Arcs verified by brute force over all strand pairs.
        let mut expected = 0;
        for u in 0..g.n() {
            for v in 0..g.n() {
                if u == v {
                    continue;
                }
                for lu in [Strand::F, Strand::R] {
                    for lv in [Strand::F, Strand::R] {
                        let su = g.nodes[u].seq(lu);
                        let sv = g.nodes[v].seq(lv);
                        if su[su.len() - 3..] == sv[..3] {
                            expected += 1;
                            assert!(g.has_arc(&LabeledArc {
                                from: u,
                                to: v,
                                label: ArcLabel(lu, lv)
                            }));
                        }
                    }
                }
            }
        }
        assert_eq!(g.arc_count(), expected);
    }

    #[test]
    fn single_read_of_length_k() {
        let g = build_plain(&["ACGGT"], 5);
        assert_eq!(g.n(), 1);
        assert_eq!(g.arc_count(), 0);
    }

    #[test]
    fn twin_label_involution() {
        for l in [FF, FR, RF, RR] {
            assert_eq!(l.twin().twin(), l);
        }
        assert_eq!(FF.twin(), RR);
        assert_eq!(RR.twin(), FF);
        assert_eq!(FR.twin(), FR);
        assert_eq!(RF.twin(), RF);
    }

    /// Forward sequences chosen so CTGG -> TGGG -> CCCC -> GGGA -> GGAT is a
    /// valid chain with labels (FF, FR, RF, FF), plus a sixth node reachable
    /// only by leaving the final node in the reverse direction.
    fn arc_label_example() -> BidirectedDbg {
        BidirectedDbg::from_forward_seqs(
            4,
            &["CTGG", "TGGG", "CCCC", "GGGA", "GGAT", "TCCT"],
            &[1.0; 6],
        )
    }

    #[test]
    fn valid_path_with_mixed_labels() {
        let g = arc_label_example();
        let path = [
            LabeledArc { from: 0, to: 1, label: FF },
            LabeledArc { from: 1, to: 2, label: FR },
            LabeledArc { from: 2, to: 3, label: RF },
            LabeledArc { from: 3, to: 4, label: FF },
        ];
        for a in &path {
            assert!(g.has_arc(a), "{a:?} missing");
        }
        assert!(is_valid_path(&g, &path).unwrap());
        assert!(is_valid_path(&g, &[]).unwrap());
        assert!(is_valid_path(&g, &path[..1]).unwrap());
    }

    #[test]
    fn invalid_path_when_no_arc_leaves_the_entered_strand() {
        let g = arc_label_example();
        // Every arc from node 4 to node 5 leaves in the reverse direction,
        // but the chain enters node 4 forward.
        let arcs45: Vec<ArcLabel> =
            g.out(4).iter().filter(|&&(v, _)| v == 5).map(|&(_, l)| l).collect();
        assert!(!arcs45.is_empty());
        assert!(arcs45.iter().all(|l| l.0 == Strand::R));
        let path = [
            LabeledArc { from: 3, to: 4, label: FF },
            LabeledArc { from: 4, to: 5, label: arcs45[0] },
        ];
        assert!(!is_valid_path(&g, &path).unwrap());
    }

    #[test]
    fn not_a_path_is_rejected() {
        let g = arc_label_example();
        let arcs = [
            LabeledArc { from: 0, to: 1, label: FF },
            LabeledArc { from: 2, to: 3, label: RF },
        ];
        assert!(matches!(is_valid_path(&g, &arcs), Err(DbgError::NotAPath { index: 1 })));
    }

    #[test]
    fn compress_five_vertex_path() {
        // 8-base read, k=4: five k-mers in a non-branching path merge into a
        // single node with label length k + 4 = 8.
        let g = build_plain(&["ACTGGTCA"], 4);
        assert_eq!(g.n(), 5);
        let c = compress(&g);
        assert_eq!(c.n(), 1);
        assert_eq!(c.nodes[0].forward.len(), 8);
        assert_eq!(c.arc_count(), 0);
    }

    #[test]
    fn compress_keeps_branching_structure() {
        let g = build_plain(&["AACTGA", "AACTGC"], 4);
        let c = compress(&g);
        let c2 = compress(&c);
        assert_eq!(c.n(), c2.n());
        assert_eq!(c.arc_count(), c2.arc_count());
        assert!(c.check_twin_symmetry());
    }

    #[test]
    fn compression_is_lossless_on_random_reads() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let bases = ['A', 'C', 'G', 'T'];
        let mut tested = 0;
        for trial in 0..1000 {
            let reads: Vec<String> = (0..rng.gen_range(1..6))
                .map(|_| {
                    let len = rng.gen_range(6..40);
                    (0..len).map(|_| bases[rng.gen_range(0..4)]).collect()
                })
                .collect();
            let refs: Vec<&str> = reads.iter().map(|s| s.as_str()).collect();
            let k = rng.gen_range(4..8);
            let g = build_plain(&refs, k);
            if g.n() == 0 {
                continue;
            }
            tested += 1;
            let c = compress(&g);
            assert_eq!(
                g.spelled_kmers(),
                c.spelled_kmers(),
                "trial {trial} k {k} reads {reads:?}"
            );
            assert!(c.n() <= g.n());
        }
        assert!(tested >= 900);
    }

    #[test]
    fn split_doubles_vertices_and_preserves_valid_paths() {
        let g = build_plain(&["ACTGG", "TCTGGG", "CTGGGTGGG"], 4);
        let d = split_bidirected(&g);
        assert_eq!(d.n(), 2 * g.n());
        // Every valid 2-arc path maps to a directed 2-arc path.
        for a in g.arcs() {
            for b in g.arcs() {
                if a.to == b.from && a.label.1 == b.label.0 {
                    let mid = side_index((a.to, a.label.1));
                    assert!(d
                        .out(side_index((a.from, a.label.0)))
                        .iter()
                        .any(|&(v, _)| v == mid));
                    assert!(d
                        .out(mid)
                        .iter()
                        .any(|&(v, _)| v == side_index((b.to, b.label.1))));
                }
            }
        }
    }

    #[test]
    fn exhaustive_valid_paths_map_to_split_paths() {
        // On small graphs, enumerate all valid bidirected paths up to length
        // 4 and check each maps to a directed path in the split graph.
        let g = build_plain(&["ACTGG", "TCTGGG", "CTGGGTGGG"], 4);
        let d = split_bidirected(&g);
        let all: Vec<LabeledArc> = g.arcs().collect();
        let mut stack: Vec<Vec<LabeledArc>> = all.iter().map(|&a| vec![a]).collect();
        while let Some(path) = stack.pop() {
            if is_valid_path(&g, &path).unwrap() {
                // map to split vertices
                let mut verts = vec![side_index((path[0].from, path[0].label.0))];
                for a in &path {
                    verts.push(side_index((a.to, a.label.1)));
                }
                for w in verts.windows(2) {
                    assert!(d.out(w[0]).iter().any(|&(v, _)| v == w[1]));
                }
                if path.len() < 4 {
                    for &nxt in &all {
                        if nxt.from == path.last().unwrap().to {
                            let mut p2 = path.clone();
                            p2.push(nxt);
                            stack.push(p2);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn split_weights_track_spelled_length() {
        // Non-branching path of 5 plain nodes: spelled length 8 = weight + 3.
        let g = build_plain(&["ACTGGTCA"], 4);
        let d = split_bidirected(&g);
        let mut indeg = vec![0usize; d.n()];
        for u in 0..d.n() {
            for &(v, _) in d.out(u) {
                indeg[v] += 1;
            }
        }
        let start = (0..d.n()).find(|&u| indeg[u] == 0 && !d.out(u).is_empty()).unwrap();
        let mut path = vec![start];
        let mut cur = start;
        while let Some(&(v, _)) = d.out(cur).first() {
            path.push(v);
            cur = v;
        }
        assert_eq!(path.len(), 5);
        let w = split_path_weight(&g, &path);
        assert_eq!(w, 5);
        assert_eq!(w + (g.k as Weight - 1), 8);
        assert_eq!(split_path_weight(&g, &path[..1]), 1);
    }

    #[test]
    fn palindromic_nodes_are_flagged() {
        let g = build_plain(&["ACGT"], 4); // its own reverse complement
        assert_eq!(g.n(), 1);
        assert!(g.nodes[0].palindromic);
    }

    #[test]
    fn cascade_built_graph_matches_exact_graph() {
        use crate::bloom::{build_cascade, plan_sizing, SizingMode};
        let solid = count_kmers_naive(&["ACTGGACCA", "TCTGGGAAC", "CTGGGTGGG"], 4, 1);
        let dir = tempfile::tempdir().unwrap();
        let plan = plan_sizing(4, 4, SizingMode::SingleR).unwrap();
        let cascade = build_cascade(&solid, &plan, (1, 2), dir.path()).unwrap();
        let kmers: Vec<Kmer> = solid.iter().map(|r| r.kmer).collect();
        let via_cascade = BidirectedDbg::build_from_cascade(&cascade, &kmers).unwrap();
        let exact = BidirectedDbg::build(&solid, None).unwrap();
        let a: Vec<LabeledArc> = via_cascade.arcs().collect();
        let b: Vec<LabeledArc> = exact.arcs().collect();
        assert_eq!(a, b);
    }
}
