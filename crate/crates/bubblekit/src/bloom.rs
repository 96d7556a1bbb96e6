//! Cascading Bloom filters over canonical k-mer sets.
//!
//! A single Bloom filter answers membership with one-sided error. The cascade
//! stores the solid set T0 exactly, under the query discipline that only T0
//! members and their one-base extensions are queried: B1 is built over T0,
//! T1 is the set of critical false positives (extensions accepted by B1 that
//! are not in T0), B2 is built over T1, T2 holds members of T0 accepted by B2,
//! and so on, alternating. The final set Tt is kept explicitly as a sorted
//! array searched by binary search.
//!
//! Sizing follows the bits-per-k-mer model with false positive rate c^r,
//! c = 0.6185, and the refined estimate |T1| = 6 N c^r: a filter of ratio r
//! over the previous set plus 2k bits per element of the final table. The
//! untruncated cascade costs (1 + 6 c^r) r / (1 - c^r) bits per k-mer,
//! minimized at r = 5.464 (8.45 bits); truncated plans are optimized
//! numerically by golden-section search.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::kmer::{Kmer, KmerError, SolidSet};

/// False positive rate base: minimum of (1 - e^{-p/r})^p over p at p = r ln 2.
pub const FP_BASE: f64 = 0.6185;

#[derive(Debug, Error)]
pub enum BloomError {
    #[error("unsupported cascade depth t = {0} (expected 1, 2, 4 or 6)")]
    UnsupportedT(usize),
    #[error("sizing plan has {got} ratios but t = {t}")]
    RatioCount { t: usize, got: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Kmer(#[from] KmerError),
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

#[inline]
fn hash_packed(packed: u128, seed: u64) -> u64 {
    let lo = splitmix64(packed as u64 ^ seed);
    let hi = splitmix64((packed >> 64) as u64 ^ seed.rotate_left(32) ^ lo);
    lo ^ hi.rotate_left(17)
}

/// Plain Bloom filter with double hashing h1 + i*h2 mod m.
#[derive(Debug, Clone)]
pub struct BloomFilter {
    bits: Vec<u64>,
    m: u64,
    p: u32,
    seeds: (u64, u64),
    inserted: u64,
}

impl BloomFilter {
    /// Allocate for `n` expected items at `r` bits per item. An empty set
    /// yields a filter that rejects everything.
    pub fn with_ratio(n: usize, r: f64, seeds: (u64, u64)) -> Self {
        let m = ((n as f64 * r).ceil() as u64).max(1);
        let p = (r * std::f64::consts::LN_2).round().max(1.0) as u32;
        BloomFilter {
            bits: vec![0u64; m.div_ceil(64) as usize],
            m,
            p,
            seeds,
            inserted: 0,
        }
    }

    pub fn bit_len(&self) -> u64 {
        self.m
    }

    pub fn hash_count(&self) -> u32 {
        self.p
    }

    pub fn inserted(&self) -> u64 {
        self.inserted
    }

    #[inline]
    fn probe(&self, key: u128) -> (u64, u64) {
        let h1 = hash_packed(key, self.seeds.0);
        let mut h2 = hash_packed(key, self.seeds.1);
        if h2 == 0 {
            h2 = 0x9e3779b97f4a7c15;
        }
        (h1, h2)
    }

    pub fn insert(&mut self, kmer: &Kmer) {
        self.insert_packed(kmer.packed());
    }

    pub fn insert_packed(&mut self, key: u128) {
        let (h1, h2) = self.probe(key);
        for i in 0..self.p as u64 {
            let idx = (h1.wrapping_add(i.wrapping_mul(h2)) % self.m) as usize;
            self.bits[idx / 64] |= 1u64 << (idx % 64);
        }
        self.inserted += 1;
    }

    pub fn contains(&self, kmer: &Kmer) -> bool {
        self.contains_packed(kmer.packed())
    }

    pub fn contains_packed(&self, key: u128) -> bool {
        let (h1, h2) = self.probe(key);
        for i in 0..self.p as u64 {
            let idx = (h1.wrapping_add(i.wrapping_mul(h2)) % self.m) as usize;
            if self.bits[idx / 64] & (1u64 << (idx % 64)) == 0 {
                return false;
            }
        }
        true
    }

    /// Predicted false positive rate (1 - e^{-p/r})^p for ratio r = m/n.
    pub fn predicted_fp_rate(&self) -> f64 {
        if self.inserted == 0 {
            return 0.0;
        }
        let r = self.m as f64 / self.inserted as f64;
        predicted_fp(r, self.p)
    }
}

pub fn predicted_fp(r: f64, p: u32) -> f64 {
    (1.0 - (-(p as f64) / r).exp()).powi(p as i32)
}

/// Build a filter over a set of items.
pub fn bloom_build<'a, I: IntoIterator<Item = &'a Kmer>>(
    items: I,
    n: usize,
    r: f64,
    seeds: (u64, u64),
) -> BloomFilter {
    let mut f = BloomFilter::with_ratio(n, r, seeds);
    for item in items {
        f.insert(item);
    }
    f
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizingMode {
    SingleR,
    PerFilterR,
}

/// Result of the bits-per-k-mer minimization.
#[derive(Debug, Clone)]
pub struct SizingPlan {
    pub t: usize,
    pub k: usize,
    /// One ratio in single-r mode, t ratios in per-filter mode.
    pub ratios: Vec<f64>,
    pub predicted_bits_per_kmer: f64,
}

impl SizingPlan {
    pub fn ratio_for_level(&self, level: usize) -> f64 {
        if self.ratios.len() == 1 {
            self.ratios[0]
        } else {
            self.ratios[level]
        }
    }

    /// A fixed single-r plan with the predicted cost evaluated, for running
    /// at a pinned ratio rather than the optimum.
    pub fn with_single_r(t: usize, k: usize, r: f64) -> Result<Self, BloomError> {
        check_t(t)?;
        Ok(SizingPlan {
            t,
            k,
            ratios: vec![r],
            predicted_bits_per_kmer: truncated_cost_single(r, t, k),
        })
    }
}

fn check_t(t: usize) -> Result<(), BloomError> {
    match t {
        1 | 2 | 4 | 6 => Ok(()),
        other => Err(BloomError::UnsupportedT(other)),
    }
}

/// Predicted |T_i| / N for the single-r model: 1, 6c^r, c^r, 6c^{2r}, ...
pub fn predicted_level_fraction(i: usize, r: f64) -> f64 {
    if i == 0 {
        1.0
    } else if i % 2 == 1 {
        6.0 * FP_BASE.powf(((i + 1) / 2) as f64 * r)
    } else {
        FP_BASE.powf((i / 2) as f64 * r)
    }
}

/// Bits per k-mer for a cascade truncated at t with one ratio r:
/// sum of r * |T_{i-1}|/N over filters plus 2k * |T_t|/N for the table.
pub fn truncated_cost_single(r: f64, t: usize, k: usize) -> f64 {
    let mut bits = 0.0;
    for i in 1..=t {
        bits += r * predicted_level_fraction(i - 1, r);
    }
    bits + 2.0 * k as f64 * predicted_level_fraction(t, r)
}

/// Untruncated limit (1 + 6 c^r) r / (1 - c^r).
pub fn untruncated_cost(r: f64) -> f64 {
    let cr = FP_BASE.powf(r);
    (1.0 + 6.0 * cr) * r / (1.0 - cr)
}

/// Per-filter model: fraction of N at each level given ratios r_1..r_t.
/// Odd-index sets carry the factor 6 and decay with odd-position ratios,
/// even-index sets decay with even-position ratios.
fn level_fractions_multi(ratios: &[f64], t: usize) -> Vec<f64> {
    let mut fracs = vec![1.0; t + 1];
    let mut odd_exp = 0.0; // sum of r_1, r_3, ...
    let mut even_exp = 0.0; // sum of r_2, r_4, ...
    for i in 1..=t {
        if i % 2 == 1 {
            odd_exp += ratios[i - 1];
            fracs[i] = 6.0 * FP_BASE.powf(odd_exp);
        } else {
            even_exp += ratios[i - 1];
            fracs[i] = FP_BASE.powf(even_exp);
        }
    }
    fracs
}

pub fn truncated_cost_multi(ratios: &[f64], t: usize, k: usize) -> f64 {
    let fracs = level_fractions_multi(ratios, t);
    let mut bits = 0.0;
    for i in 1..=t {
        bits += ratios[i - 1] * fracs[i - 1];
    }
    bits + 2.0 * k as f64 * fracs[t]
}

const GOLDEN_TOL: f64 = 1e-4;
const R_LO: f64 = 1.0;
const R_HI: f64 = 20.0;

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > GOLDEN_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Minimize the truncated bits-per-k-mer expression for a cascade of depth
/// t in {1, 2, 4, 6} storing k-mers of size k.
pub fn plan_sizing(t: usize, k: usize, mode: SizingMode) -> Result<SizingPlan, BloomError> {
    check_t(t)?;
    match mode {
        SizingMode::SingleR => {
            let r = golden_section(|r| truncated_cost_single(r, t, k), R_LO, R_HI);
            Ok(SizingPlan {
                t,
                k,
                ratios: vec![r],
                predicted_bits_per_kmer: truncated_cost_single(r, t, k),
            })
        }
        SizingMode::PerFilterR => {
            // Coordinate descent with golden-section line searches.
            let init = golden_section(|r| truncated_cost_single(r, t, k), R_LO, R_HI);
            let mut ratios = vec![init; t];
            let mut best = truncated_cost_multi(&ratios, t, k);
            loop {
                for i in 0..t {
                    let r_i = golden_section(
                        |r| {
                            let mut rs = ratios.clone();
                            rs[i] = r;
                            truncated_cost_multi(&rs, t, k)
                        },
                        0.5,
                        R_HI,
                    );
                    ratios[i] = r_i;
                }
                let cost = truncated_cost_multi(&ratios, t, k);
                if best - cost > GOLDEN_TOL / 10.0 {
                    best = cost;
                } else {
                    best = best.min(cost);
                    break;
                }
            }
            Ok(SizingPlan { t, k, ratios, predicted_bits_per_kmer: best })
        }
    }
}

/// The cascade: filters B1..Bt plus the explicit sorted final table Tt.
#[derive(Debug, Clone)]
pub struct CascadingBloom {
    pub k: usize,
    pub filters: Vec<BloomFilter>,
    pub final_table: Vec<u128>,
    pub ratios: Vec<f64>,
    pub seeds: (u64, u64),
    /// |T0|, the represented set size.
    pub n: u64,
    /// |T_i| observed during construction, i = 0..=t.
    pub level_sizes: Vec<u64>,
}

impl CascadingBloom {
    pub fn t(&self) -> usize {
        self.filters.len()
    }

    /// Total structure size in bits: bitmaps plus 2k bits per table entry.
    pub fn size_bits(&self) -> u64 {
        let bitmap: u64 = self.filters.iter().map(|f| f.bit_len()).sum();
        bitmap + (2 * self.k as u64) * self.final_table.len() as u64
    }

    pub fn bits_per_kmer(&self) -> f64 {
        self.size_bits() as f64 / self.n as f64
    }

    /// Membership under the traversal discipline. Probes B1, B2, ... until
    /// the first rejection at index i+1 and answers "in T0" iff i is odd;
    /// if every filter accepts, falls back to binary search in the table.
    pub fn contains(&self, kmer: &Kmer) -> bool {
        self.resolve(kmer).0
    }

    /// Membership plus the 0-based level that resolved the query
    /// (t means the final table did).
    pub fn resolve(&self, kmer: &Kmer) -> (bool, usize) {
        let key = kmer.packed();
        for (i, f) in self.filters.iter().enumerate() {
            if !f.contains_packed(key) {
                // first rejection at filter i+1: i accepting filters before it
                return (i % 2 == 1, i);
            }
        }
        // Accepted everywhere: the key is in T_{t-1} or T_t. For even t the
        // table holds members of T0, for odd t it holds critical false
        // positives, so the answer flips with the parity of t.
        let t = self.filters.len();
        let in_table = self.final_table.binary_search(&key).is_ok();
        (in_table == (t % 2 == 0), t)
    }
}

/// Spill sorted chunks to `scratch` and merge them into one sorted,
/// deduplicated vector, so no intermediate set is fully resident twice.
fn spill_sorted_unique(
    scratch: &Path,
    name: &str,
    mut chunks: Vec<Vec<u128>>,
) -> Result<Vec<u128>, BloomError> {
    let mut files = Vec::new();
    for (i, mut c) in chunks.drain(..).enumerate() {
        c.sort_unstable();
        c.dedup();
        let path = scratch.join(format!("{name}_{i:04}.bin"));
        let mut w = BufWriter::new(File::create(&path)?);
        for v in &c {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        files.push(path);
    }
    let mut readers: Vec<(BufReader<File>, Option<u128>)> = Vec::new();
    for p in &files {
        let mut rd = BufReader::new(File::open(p)?);
        let head = read_u128(&mut rd)?;
        readers.push((rd, head));
    }
    let mut out = Vec::new();
    loop {
        let mut min: Option<u128> = None;
        for (_, head) in &readers {
            if let Some(v) = head {
                min = Some(match min {
                    Some(m) => m.min(*v),
                    None => *v,
                });
            }
        }
        let Some(m) = min else { break };
        if out.last() != Some(&m) {
            out.push(m);
        }
        for (rd, head) in &mut readers {
            if *head == Some(m) {
                *head = read_u128(rd)?;
            }
        }
    }
    for p in &files {
        let _ = std::fs::remove_file(p);
    }
    Ok(out)
}

fn read_u128(rd: &mut BufReader<File>) -> Result<Option<u128>, BloomError> {
    let mut b = [0u8; 16];
    match rd.read_exact(&mut b) {
        Ok(()) => Ok(Some(u128::from_le_bytes(b))),
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Ok(None),
        Err(e) => Err(e.into()),
    }
}

const EXTENSION_CHUNK: usize = 1 << 20;

/// Build the cascade over a sorted solid set.
///
/// B1 is built over T0. T1 is computed by querying the eight canonical
/// one-base extensions of every member against B1 and subtracting T0.
/// Then alternately: B_i over T_{i-1}, and T_i = members of T_{i-2}
/// accepted by B_i. Filters are sized from the observed previous level.
pub fn build_cascade(
    solid: &SolidSet,
    plan: &SizingPlan,
    seeds: (u64, u64),
    scratch_dir: &Path,
) -> Result<CascadingBloom, BloomError> {
    if plan.ratios.len() != 1 && plan.ratios.len() != plan.t {
        return Err(BloomError::RatioCount { t: plan.t, got: plan.ratios.len() });
    }
    std::fs::create_dir_all(scratch_dir)?;
    let t = plan.t;
    let k = solid.k;
    let n0 = solid.len();

    let mut filters: Vec<BloomFilter> = Vec::with_capacity(t);
    let mut level_sizes = vec![n0 as u64];

    // B1 over T0.
    let mut b1 = BloomFilter::with_ratio(n0, plan.ratio_for_level(0), seeds);
    for rec in solid.iter() {
        b1.insert(&rec.kmer);
    }

    // T1: accepted extensions minus T0, spilled in chunks.
    let mut chunks: Vec<Vec<u128>> = Vec::new();
    let mut cur: Vec<u128> = Vec::new();
    for rec in solid.iter() {
        for ext in rec.kmer.extensions_canonical() {
            if b1.contains(&ext) {
                cur.push(ext.packed());
                if cur.len() >= EXTENSION_CHUNK {
                    chunks.push(std::mem::take(&mut cur));
                }
            }
        }
    }
    if !cur.is_empty() {
        chunks.push(cur);
    }
    filters.push(b1);
    let accepted = spill_sorted_unique(scratch_dir, "ext", chunks)?;
    // Set difference accepted \ T0 by sorted merge.
    let mut t1: Vec<u128> = Vec::new();
    {
        let mut it = solid.iter().map(|r| r.kmer.packed()).peekable();
        for v in accepted {
            while it.peek().map_or(false, |&s| s < v) {
                it.next();
            }
            if it.peek() != Some(&v) {
                t1.push(v);
            }
        }
    }
    // T0 and T1 are disjoint by construction of the set difference.
    level_sizes.push(t1.len() as u64);

    // prev holds T_{i-1} (inserted into B_i), prev2 holds T_{i-2} (filtered
    // to produce T_i). Each level is a filtered copy of the level two below,
    // so T_{2j} stays inside T0 and T_{2j+1} inside T1.
    let mut prev2: Vec<u128> = solid.iter().map(|r| r.kmer.packed()).collect();
    let mut prev: Vec<u128> = t1;

    for level in 1..t {
        let b = {
            let mut f = BloomFilter::with_ratio(prev.len(), plan.ratio_for_level(level), seeds);
            for &v in &prev {
                f.insert_packed(v);
            }
            f
        };
        let next: Vec<u128> =
            prev2.iter().copied().filter(|&v| b.contains_packed(v)).collect();
        debug_assert!(next.windows(2).all(|w| w[0] < w[1]));
        filters.push(b);
        level_sizes.push(next.len() as u64);
        prev2 = prev;
        prev = next;
    }

    // prev now holds T_t, already sorted.
    let final_table = prev;
    Ok(CascadingBloom {
        k,
        filters,
        final_table,
        ratios: plan.ratios.clone(),
        seeds,
        n: n0 as u64,
        level_sizes,
    })
}

/// Per-level resolution counts for a traversal-style query mix.
#[derive(Debug, Clone, Default)]
pub struct QueryStats {
    /// resolved[i]: queries answered by filter i+1; the last slot is the
    /// final table.
    pub resolved: Vec<u64>,
    pub total: u64,
}

impl QueryStats {
    pub fn fractions(&self) -> Vec<f64> {
        self.resolved.iter().map(|&c| c as f64 / self.total as f64).collect()
    }
}

/// Query all eight extensions of every member of `solid`, the traversal mix,
/// and histogram which level resolves each query.
pub fn traversal_query_stats(cascade: &CascadingBloom, solid: &SolidSet) -> QueryStats {
    let mut stats = QueryStats { resolved: vec![0; cascade.t() + 1], total: 0 };
    for rec in solid.iter() {
        for ext in rec.kmer.extensions_canonical() {
            let (_, level) = cascade.resolve(&ext);
            stats.resolved[level] += 1;
            stats.total += 1;
        }
    }
    stats
}

const CASCADE_MAGIC: &[u8; 4] = b"CBF1";

/// On-disk format: magic "CBF1", k, t, N, ratio count + ratios, seeds,
/// then each bitmap length-prefixed, then the final table.
pub fn write_cascade(c: &CascadingBloom, path: &Path) -> Result<(), BloomError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(CASCADE_MAGIC)?;
    w.write_all(&(c.k as u32).to_le_bytes())?;
    w.write_all(&(c.t() as u32).to_le_bytes())?;
    w.write_all(&c.n.to_le_bytes())?;
    w.write_all(&(c.ratios.len() as u32).to_le_bytes())?;
    for r in &c.ratios {
        w.write_all(&r.to_le_bytes())?;
    }
    w.write_all(&c.seeds.0.to_le_bytes())?;
    w.write_all(&c.seeds.1.to_le_bytes())?;
    for f in &c.filters {
        w.write_all(&f.m.to_le_bytes())?;
        w.write_all(&f.p.to_le_bytes())?;
        w.write_all(&f.inserted.to_le_bytes())?;
        for word in &f.bits {
            w.write_all(&word.to_le_bytes())?;
        }
    }
    w.write_all(&(c.final_table.len() as u64).to_le_bytes())?;
    for v in &c.final_table {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_cascade(path: &Path) -> Result<CascadingBloom, BloomError> {
    let mut rd = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    rd.read_exact(&mut magic)?;
    if &magic != CASCADE_MAGIC {
        return Err(BloomError::Io(io::Error::new(
            io::ErrorKind::InvalidData,
            "bad magic, expected CBF1",
        )));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    rd.read_exact(&mut b4)?;
    let k = u32::from_le_bytes(b4) as usize;
    rd.read_exact(&mut b4)?;
    let t = u32::from_le_bytes(b4) as usize;
    rd.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8);
    rd.read_exact(&mut b4)?;
    let rc = u32::from_le_bytes(b4) as usize;
    let mut ratios = Vec::with_capacity(rc);
    for _ in 0..rc {
        rd.read_exact(&mut b8)?;
        ratios.push(f64::from_le_bytes(b8));
    }
    rd.read_exact(&mut b8)?;
    let seed0 = u64::from_le_bytes(b8);
    rd.read_exact(&mut b8)?;
    let seed1 = u64::from_le_bytes(b8);
    let mut filters = Vec::with_capacity(t);
    for _ in 0..t {
        rd.read_exact(&mut b8)?;
        let m = u64::from_le_bytes(b8);
        rd.read_exact(&mut b4)?;
        let p = u32::from_le_bytes(b4);
        rd.read_exact(&mut b8)?;
        let inserted = u64::from_le_bytes(b8);
        let words = m.div_ceil(64) as usize;
        let mut bits = Vec::with_capacity(words);
        for _ in 0..words {
            rd.read_exact(&mut b8)?;
            bits.push(u64::from_le_bytes(b8));
        }
        filters.push(BloomFilter { bits, m, p, seeds: (seed0, seed1), inserted });
    }
    rd.read_exact(&mut b8)?;
    let tn = u64::from_le_bytes(b8) as usize;
    let mut final_table = Vec::with_capacity(tn);
    let mut b16 = [0u8; 16];
    for _ in 0..tn {
        rd.read_exact(&mut b16)?;
        final_table.push(u128::from_le_bytes(b16));
    }
    Ok(CascadingBloom {
        k,
        filters,
        final_table,
        ratios,
        seeds: (seed0, seed1),
        n,
        level_sizes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmer::KmerRecord;
    use rand::{Rng, SeedableRng};

    fn random_solid(n: usize, k: usize, seed: u64) -> SolidSet {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mask = if k == 64 { u128::MAX } else { (1u128 << (2 * k)) - 1 };
        let mut recs = Vec::with_capacity(n);
        while recs.len() < n {
            let raw: u128 = ((rng.gen::<u64>() as u128) << 64 | rng.gen::<u64>() as u128) & mask;
            let km = Kmer::from_packed(raw, k).unwrap().canonical();
            recs.push(KmerRecord { kmer: km, count: 1 });
        }
        SolidSet::from_records(k, 1, recs)
    }

    #[test]
    fn no_false_negatives() {
        let solid = random_solid(2000, 21, 1);
        let f = bloom_build(solid.iter().map(|r| &r.kmer), solid.len(), 8.0, (1, 2));
        for rec in solid.iter() {
            assert!(f.contains(&rec.kmer));
        }
    }

    #[test]
    fn fp_rate_close_to_prediction() {
        // r = 5.464 -> p = 4, predicted (1 - e^{-4/5.464})^4 ~ 0.0726
        let p = (5.464f64 * std::f64::consts::LN_2).round() as u32;
        assert_eq!(p, 4);
        let predicted = predicted_fp(5.464, 4);
        assert!((predicted - 0.0726).abs() < 5e-4, "predicted = {predicted}");

        let solid = random_solid(20000, 31, 2);
        let f = bloom_build(solid.iter().map(|r| &r.kmer), solid.len(), 5.464, (3, 4));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut fp = 0usize;
        let trials = 200_000usize;
        for _ in 0..trials {
            let raw: u128 =
                ((rng.gen::<u64>() as u128) << 64 | rng.gen::<u64>() as u128) & ((1u128 << 62) - 1);
            let km = Kmer::from_packed(raw, 31).unwrap();
            if !solid.contains(&km) && f.contains(&km) {
                fp += 1;
            }
        }
        let measured = fp as f64 / trials as f64;
        assert!(
            (measured - predicted).abs() < 0.01,
            "measured {measured} vs predicted {predicted}"
        );
    }

    #[test]
    fn empty_set_rejects_everything() {
        let f = bloom_build([].into_iter(), 0, 8.0, (1, 2));
        assert!(!f.contains(&Kmer::encode(b"ACGT").unwrap()));
    }

    #[test]
    fn untruncated_optimum_is_8_45_bits() {
        let r = golden_section(untruncated_cost, R_LO, R_HI);
        assert!((r - 5.464).abs() < 5e-3, "r = {r}");
        assert!((untruncated_cost(r) - 8.45).abs() < 5e-3);
    }

    #[test]
    fn table_one_single_r_optima() {
        // (k, expected r, expected bits/kmer) for t = 4
        for &(k, er, ebits) in
            &[(16usize, 5.777, 8.556), (32, 6.049, 8.664), (64, 6.399, 8.824)]
        {
            let plan = plan_sizing(4, k, SizingMode::SingleR).unwrap();
            assert!((plan.ratios[0] - er).abs() < 2e-3, "k={k}: r={}", plan.ratios[0]);
            assert!(
                (plan.predicted_bits_per_kmer - ebits).abs() < 2e-3,
                "k={k}: bits={}",
                plan.predicted_bits_per_kmer
            );
        }
        // t = 6 rows
        for &(k, er, ebits) in &[(16usize, 5.506, 8.459), (32, 5.556, 8.47)] {
            let plan = plan_sizing(6, k, SizingMode::SingleR).unwrap();
            assert!((plan.ratios[0] - er).abs() < 2e-3, "k={k}: r={}", plan.ratios[0]);
            assert!((plan.predicted_bits_per_kmer - ebits).abs() < 6e-3, "k={k}");
        }
    }

    #[test]
    fn per_filter_ratios_beat_single() {
        let plan = plan_sizing(4, 16, SizingMode::PerFilterR).unwrap();
        let expected = [5.254, 3.541, 4.981, 8.653];
        assert!((plan.predicted_bits_per_kmer - 8.336).abs() < 2e-3, "{plan:?}");
        for (got, want) in plan.ratios.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 0.05, "{:?}", plan.ratios);
        }
        let single = plan_sizing(4, 16, SizingMode::SingleR).unwrap();
        assert!(plan.predicted_bits_per_kmer < single.predicted_bits_per_kmer);
    }

    #[test]
    fn unsupported_t_rejected() {
        assert!(matches!(
            plan_sizing(3, 16, SizingMode::SingleR),
            Err(BloomError::UnsupportedT(3))
        ));
    }

    #[test]
    fn cascade_exact_on_discipline() {
        let dir = tempfile::tempdir().unwrap();
        for seed in 0..3u64 {
            let solid = random_solid(3000, 25, 40 + seed);
            let plan = plan_sizing(4, 25, SizingMode::SingleR).unwrap();
            let cascade = build_cascade(&solid, &plan, (11, 12), dir.path()).unwrap();
            // Every member answers true.
            for rec in solid.iter() {
                assert!(cascade.contains(&rec.kmer));
            }
            // Every extension answers exactly its true membership.
            for rec in solid.iter() {
                for ext in rec.kmer.extensions_canonical() {
                    assert_eq!(cascade.contains(&ext), solid.contains(&ext));
                }
            }
        }
    }

    #[test]
    fn degenerate_single_filter_cascade() {
        let dir = tempfile::tempdir().unwrap();
        let solid = random_solid(1000, 21, 5);
        let plan = plan_sizing(1, 21, SizingMode::SingleR).unwrap();
        let cascade = build_cascade(&solid, &plan, (7, 8), dir.path()).unwrap();
        assert_eq!(cascade.t(), 1);
        for rec in solid.iter() {
            for ext in rec.kmer.extensions_canonical() {
                assert_eq!(cascade.contains(&ext), solid.contains(&ext));
            }
        }
    }

    #[test]
    fn t1_size_tracks_prediction() {
        // |T1| on iid random solid sets is near 8 N c^r: all eight extensions
        // are potential false positives there. The 6 N c^r refinement assumes
        // two true neighbors per node, which holds for sequence-derived sets.
        let dir = tempfile::tempdir().unwrap();
        let r = 6.0;
        let mut ratio_sum = 0.0;
        let seeds = 10;
        for seed in 0..seeds {
            let solid = random_solid(4000, 31, 100 + seed);
            let plan = SizingPlan::with_single_r(1, 31, r).unwrap();
            let cascade = build_cascade(&solid, &plan, (seed, seed + 1), dir.path()).unwrap();
            let t1 = cascade.level_sizes[1] as f64;
            ratio_sum += t1 / (solid.len() as f64 * FP_BASE.powf(r));
        }
        let mean = ratio_sum / seeds as f64;
        assert!((mean - 8.0).abs() < 0.8, "mean multiplier {mean}");
    }

    #[test]
    fn sequence_derived_t1_tracks_six_n_c_r() {
        // On a solid set built from one long random sequence, most nodes have
        // two true neighbors, matching the 6 N c^r refinement.
        let dir = tempfile::tempdir().unwrap();
        let r = 6.0;
        let k = 31;
        let mut ratio_sum = 0.0;
        let seeds = 10;
        for seed in 0..seeds {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(500 + seed);
            let bases = [b'A', b'C', b'G', b'T'];
            let seq: Vec<u8> =
                (0..6000).map(|_| bases[rng.gen_range(0..4)]).collect();
            let recs: Vec<KmerRecord> = crate::kmer::canonical_kmers(&seq, k)
                .into_iter()
                .map(|kmer| KmerRecord { kmer, count: 1 })
                .collect();
            let solid = SolidSet::from_records(k, 1, recs);
            let plan = SizingPlan::with_single_r(1, k, r).unwrap();
            let cascade =
                build_cascade(&solid, &plan, (seed, seed + 7), dir.path()).unwrap();
            let t1 = cascade.level_sizes[1] as f64;
            ratio_sum += t1 / (solid.len() as f64 * FP_BASE.powf(r));
        }
        let mean = ratio_sum / seeds as f64;
        assert!((mean - 6.0).abs() < 0.7, "mean multiplier {mean}");
    }

    #[test]
    fn nesting_invariants_hold() {
        let dir = tempfile::tempdir().unwrap();
        let solid = random_solid(2000, 21, 77);
        let plan = plan_sizing(4, 21, SizingMode::SingleR).unwrap();
        let cascade = build_cascade(&solid, &plan, (21, 22), dir.path()).unwrap();
        assert_eq!(cascade.level_sizes.len(), 5);
        // Alternation shrinks levels: |T2| <= |T0|, |T3| <= |T1|, |T4| <= |T2|.
        assert!(cascade.level_sizes[2] <= cascade.level_sizes[0]);
        assert!(cascade.level_sizes[3] <= cascade.level_sizes[1]);
        assert!(cascade.level_sizes[4] <= cascade.level_sizes[2]);
    }

    #[test]
    fn disk_roundtrip_preserves_answers() {
        let dir = tempfile::tempdir().unwrap();
        let solid = random_solid(1500, 21, 99);
        let plan = plan_sizing(2, 21, SizingMode::SingleR).unwrap();
        let cascade = build_cascade(&solid, &plan, (5, 6), dir.path()).unwrap();
        let path = dir.path().join("c.cbf");
        write_cascade(&cascade, &path).unwrap();
        let back = read_cascade(&path).unwrap();
        for rec in solid.iter().take(200) {
            for ext in rec.kmer.extensions_canonical() {
                assert_eq!(cascade.contains(&ext), back.contains(&ext));
            }
        }
    }
}
