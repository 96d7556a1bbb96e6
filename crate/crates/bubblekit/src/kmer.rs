//! 2-bit packed k-mers, canonical forms and external-memory counting.
//!
//! A k-mer is stored in a `u128`, two bits per base (A=00, C=01, G=10, T=11),
//! first base in the highest used position so that numeric order of packed
//! words equals lexicographic order of the strings. The canonical form of a
//! k-mer is the lexicographic minimum of the word and its reverse complement.
//!
//! [`count_kmers`] produces the solid set (canonical k-mers occurring at
//! least `min_abundance` times) with bounded working memory: sorted runs are
//! spilled to disk and merged with a fixed fan-in, as in an external
//! merge-sort.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

pub const MAX_K: usize = 64;

/// Merge fan-in for the external sort.
const MERGE_FAN_IN: usize = 64;
/// Smallest admissible run, in k-mer entries.
const MIN_RUN_ENTRIES: usize = 1024;
/// Bytes per buffered entry during run building.
const ENTRY_BYTES: usize = 16;

#[derive(Debug, Error)]
pub enum KmerError {
    #[error("invalid base {base:?} at position {pos}")]
    InvalidBase { base: char, pos: usize },
    #[error("length mismatch: expected k = {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("k = {0} out of range (1..={MAX_K})")]
    KOutOfRange(usize),
    #[error("memory budget {budget} bytes below one minimal run ({min} bytes)")]
    BudgetTooSmall { budget: usize, min: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A fixed-length DNA word packed two bits per base.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Kmer {
    k: u8,
    packed: u128,
}

#[inline]
fn base_code(b: u8) -> Option<u128> {
    match b {
        b'A' | b'a' => Some(0),
        b'C' | b'c' => Some(1),
        b'G' | b'g' => Some(2),
        b'T' | b't' => Some(3),
        _ => None,
    }
}

const BASES: [u8; 4] = [b'A', b'C', b'G', b'T'];

impl Kmer {
    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn packed(&self) -> u128 {
        self.packed
    }

    /// Rebuild from a packed word; the caller asserts the top bits are zero.
    pub fn from_packed(packed: u128, k: usize) -> Result<Self, KmerError> {
        if k == 0 || k > MAX_K {
            return Err(KmerError::KOutOfRange(k));
        }
        debug_assert!(k == 64 || packed >> (2 * k) == 0);
        Ok(Kmer { k: k as u8, packed })
    }

    pub fn encode(seq: &[u8]) -> Result<Self, KmerError> {
        let k = seq.len();
        if k == 0 || k > MAX_K {
            return Err(KmerError::KOutOfRange(k));
        }
        let mut packed: u128 = 0;
        for (pos, &b) in seq.iter().enumerate() {
            match base_code(b) {
                Some(code) => packed = (packed << 2) | code,
                None => {
                    return Err(KmerError::InvalidBase { base: b as char, pos });
                }
            }
        }
        Ok(Kmer { k: k as u8, packed })
    }

    /// Encode checking the length against an expected k.
    pub fn encode_k(seq: &[u8], k: usize) -> Result<Self, KmerError> {
        if seq.len() != k {
            return Err(KmerError::LengthMismatch { expected: k, got: seq.len() });
        }
        Self::encode(seq)
    }

    pub fn decode(&self) -> String {
        let k = self.k as usize;
        let mut out = Vec::with_capacity(k);
        for i in (0..k).rev() {
            let code = ((self.packed >> (2 * i)) & 3) as usize;
            out.push(BASES[code]);
        }
        String::from_utf8(out).unwrap()
    }

    pub fn reverse_complement(&self) -> Self {
        let k = self.k as usize;
        let mut src = self.packed;
        let mut out: u128 = 0;
        for _ in 0..k {
            out = (out << 2) | ((src & 3) ^ 3);
            src >>= 2;
        }
        Kmer { k: self.k, packed: out }
    }

    /// Lexicographic minimum of the k-mer and its reverse complement.
    pub fn canonical(&self) -> Self {
        let rc = self.reverse_complement();
        if rc.packed < self.packed {
            rc
        } else {
            *self
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.packed <= self.reverse_complement().packed
    }

    /// The eight one-base shifts of this k-mer, canonicalized: four right
    /// extensions (drop first base, append b) and four left extensions
    /// (prepend b, drop last base).
    pub fn extensions_canonical(&self) -> [Kmer; 8] {
        let k = self.k as usize;
        let mask: u128 = if k == 64 { u128::MAX } else { (1u128 << (2 * k)) - 1 };
        let mut out = [*self; 8];
        for b in 0..4u128 {
            let right = ((self.packed << 2) | b) & mask;
            out[b as usize] = Kmer { k: self.k, packed: right }.canonical();
            let left = (self.packed >> 2) | (b << (2 * (k - 1)));
            out[4 + b as usize] = Kmer { k: self.k, packed: left }.canonical();
        }
        out
    }
}

impl std::fmt::Debug for Kmer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Kmer({})", self.decode())
    }
}

impl std::fmt::Display for Kmer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.decode())
    }
}

/// A canonical k-mer with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KmerRecord {
    pub kmer: Kmer,
    pub count: u32,
}

/// The solid k-mer set: canonical k-mers occurring at least `min_abundance`
/// times, sorted strictly ascending by packed value.
#[derive(Debug, Clone)]
pub struct SolidSet {
    pub k: usize,
    pub min_abundance: u32,
    pub records: Vec<KmerRecord>,
}

impl SolidSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn contains(&self, kmer: &Kmer) -> bool {
        self.records
            .binary_search_by(|r| r.kmer.packed().cmp(&kmer.packed()))
            .is_ok()
    }

    pub fn count_of(&self, kmer: &Kmer) -> Option<u32> {
        self.records
            .binary_search_by(|r| r.kmer.packed().cmp(&kmer.packed()))
            .ok()
            .map(|i| self.records[i].count)
    }

    pub fn iter(&self) -> impl Iterator<Item = &KmerRecord> {
        self.records.iter()
    }

    /// Build directly from records; sorts, merges duplicates, applies the
    /// abundance filter. Convenient for tests and synthetic sets.
    pub fn from_records(k: usize, min_abundance: u32, mut recs: Vec<KmerRecord>) -> Self {
        recs.sort_by_key(|r| r.kmer.packed());
        let mut merged: Vec<KmerRecord> = Vec::with_capacity(recs.len());
        for r in recs {
            match merged.last_mut() {
                Some(last) if last.kmer == r.kmer => last.count += r.count,
                _ => merged.push(r),
            }
        }
        merged.retain(|r| r.count >= min_abundance);
        SolidSet { k, min_abundance, records: merged }
    }

    /// Binary record file: magic "KMC1", k, d, N, then N x (16-byte packed
    /// little-endian, 4-byte count little-endian).
    pub fn write_binary(&self, path: &Path) -> Result<(), KmerError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(b"KMC1")?;
        w.write_all(&(self.k as u32).to_le_bytes())?;
        w.write_all(&self.min_abundance.to_le_bytes())?;
        w.write_all(&(self.records.len() as u64).to_le_bytes())?;
        for r in &self.records {
            w.write_all(&r.kmer.packed().to_le_bytes())?;
            w.write_all(&r.count.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self, KmerError> {
        let mut rd = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        rd.read_exact(&mut magic)?;
        if &magic != b"KMC1" {
            return Err(KmerError::Io(io::Error::new(
                io::ErrorKind::InvalidData,
                "bad magic, expected KMC1",
            )));
        }
        let mut b4 = [0u8; 4];
        rd.read_exact(&mut b4)?;
        let k = u32::from_le_bytes(b4) as usize;
        rd.read_exact(&mut b4)?;
        let d = u32::from_le_bytes(b4);
        let mut b8 = [0u8; 8];
        rd.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        let mut records = Vec::with_capacity(n);
        let mut b16 = [0u8; 16];
        for _ in 0..n {
            rd.read_exact(&mut b16)?;
            let packed = u128::from_le_bytes(b16);
            rd.read_exact(&mut b4)?;
            let count = u32::from_le_bytes(b4);
            records.push(KmerRecord { kmer: Kmer::from_packed(packed, k)?, count });
        }
        Ok(SolidSet { k, min_abundance: d, records })
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<(), KmerError> {
        for r in &self.records {
            writeln!(w, "{}\t{}", r.kmer.decode(), r.count)?;
        }
        Ok(())
    }
}

/// Streams sequences out of FASTA or FASTQ, plain or gzip.
pub struct SequenceReader {
    inner: Box<dyn BufRead>,
    fastq: bool,
    raw: bool,
    pending: Option<String>,
    started: bool,
}

impl SequenceReader {
    pub fn open(path: &Path) -> Result<Self, KmerError> {
        let file = File::open(path)?;
        let gz = path.extension().map(|e| e == "gz").unwrap_or(false);
        let raw: Box<dyn BufRead> = if gz {
            Box::new(BufReader::new(flate2::read::GzDecoder::new(file)))
        } else {
            Box::new(BufReader::new(file))
        };
        Ok(Self::from_bufread(raw))
    }

    pub fn from_bufread(inner: Box<dyn BufRead>) -> Self {
        SequenceReader { inner, fastq: false, raw: false, pending: None, started: false }
    }

    /// Next sequence, or None at end of input.
    pub fn next_sequence(&mut self) -> Result<Option<String>, KmerError> {
        let mut line = String::new();
        if !self.started {
            // Sniff the first non-empty line for the format.
            loop {
                line.clear();
                if self.inner.read_line(&mut line)? == 0 {
                    return Ok(None);
                }
                let t = line.trim_end();
                if t.is_empty() {
                    continue;
                }
                self.started = true;
                match t.as_bytes()[0] {
                    b'@' => self.fastq = true,
                    b'>' => self.fastq = false,
                    _ => {
                        // Raw input: one sequence per line.
                        self.raw = true;
                        return Ok(Some(t.to_string()));
                    }
                }
                break;
            }
        }
        if self.raw {
            loop {
                line.clear();
                if self.inner.read_line(&mut line)? == 0 {
                    return Ok(None);
                }
                let t = line.trim_end();
                if !t.is_empty() {
                    return Ok(Some(t.to_string()));
                }
            }
        }
        if self.fastq {
            // Header already consumed (either at sniff time or by the
            // previous record's trailing read).
            line.clear();
            if self.inner.read_line(&mut line)? == 0 {
                return Ok(None);
            }
            let seq = line.trim_end().to_string();
            // plus line, quality line, next header
            line.clear();
            self.inner.read_line(&mut line)?;
            line.clear();
            self.inner.read_line(&mut line)?;
            line.clear();
            self.inner.read_line(&mut line)?;
            Ok(Some(seq))
        } else {
            // FASTA: accumulate until the next header.
            let mut seq = match self.pending.take() {
                Some(_head) => String::new(),
                None => String::new(),
            };
            loop {
                line.clear();
                if self.inner.read_line(&mut line)? == 0 {
                    if seq.is_empty() {
                        return Ok(None);
                    }
                    return Ok(Some(seq));
                }
                let t = line.trim_end();
                if t.is_empty() {
                    continue;
                }
                if t.starts_with('>') {
                    if seq.is_empty() {
                        continue; // header of the record we are about to read
                    }
                    self.pending = Some(t.to_string());
                    return Ok(Some(seq));
                }
                seq.push_str(t);
            }
        }
    }
}

/// Canonical k-mers of one sequence; windows containing a non-ACGT letter
/// are skipped.
pub fn canonical_kmers(seq: &[u8], k: usize) -> Vec<Kmer> {
    let mut out = Vec::new();
    if seq.len() < k {
        return out;
    }
    let mask: u128 = if k == 64 { u128::MAX } else { (1u128 << (2 * k)) - 1 };
    let mut packed: u128 = 0;
    let mut valid = 0usize; // length of the current clean window
    for &b in seq {
        match base_code(b) {
            Some(code) => {
                packed = ((packed << 2) | code) & mask;
                valid += 1;
                if valid >= k {
                    let kmer = Kmer { k: k as u8, packed };
                    out.push(kmer.canonical());
                }
            }
            None => {
                valid = 0;
                packed = 0;
            }
        }
    }
    out
}

struct RunReader {
    rd: BufReader<File>,
    head: Option<(u128, u32)>,
}

impl RunReader {
    fn open(path: &Path) -> Result<Self, KmerError> {
        let mut r = RunReader { rd: BufReader::new(File::open(path)?), head: None };
        r.advance()?;
        Ok(r)
    }

    fn advance(&mut self) -> Result<(), KmerError> {
        let mut b16 = [0u8; 16];
        match self.rd.read_exact(&mut b16) {
            Ok(()) => {
                let mut b4 = [0u8; 4];
                self.rd.read_exact(&mut b4)?;
                self.head = Some((u128::from_le_bytes(b16), u32::from_le_bytes(b4)));
                Ok(())
            }
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => {
                self.head = None;
                Ok(())
            }
            Err(e) => Err(e.into()),
        }
    }
}

struct HeapItem(u128, usize);

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0 && self.1 == other.1
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap on (packed, reader index)
        other.0.cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

fn write_run(dir: &Path, id: usize, buf: &mut Vec<u128>) -> Result<PathBuf, KmerError> {
    buf.sort_unstable();
    let path = dir.join(format!("run_{id:06}.bin"));
    let mut w = BufWriter::new(File::create(&path)?);
    let mut i = 0;
    while i < buf.len() {
        let v = buf[i];
        let mut c: u32 = 0;
        while i < buf.len() && buf[i] == v {
            c += 1;
            i += 1;
        }
        w.write_all(&v.to_le_bytes())?;
        w.write_all(&c.to_le_bytes())?;
    }
    w.flush()?;
    buf.clear();
    Ok(path)
}

/// Merge up to MERGE_FAN_IN sorted runs into one, summing counts.
fn merge_runs(dir: &Path, id: usize, inputs: &[PathBuf]) -> Result<PathBuf, KmerError> {
    let path = dir.join(format!("merge_{id:06}.bin"));
    let mut out = BufWriter::new(File::create(&path)?);
    let mut readers = Vec::with_capacity(inputs.len());
    for p in inputs {
        readers.push(RunReader::open(p)?);
    }
    let mut heap = BinaryHeap::new();
    for (i, r) in readers.iter().enumerate() {
        if let Some((v, _)) = r.head {
            heap.push(HeapItem(v, i));
        }
    }
    let mut cur: Option<(u128, u64)> = None;
    while let Some(HeapItem(v, i)) = heap.pop() {
        let (_, c) = readers[i].head.unwrap();
        match &mut cur {
            Some((cv, cc)) if *cv == v => *cc += c as u64,
            _ => {
                if let Some((cv, cc)) = cur.take() {
                    out.write_all(&cv.to_le_bytes())?;
                    out.write_all(&(cc.min(u32::MAX as u64) as u32).to_le_bytes())?;
                }
                cur = Some((v, c as u64));
            }
        }
        readers[i].advance()?;
        if let Some((nv, _)) = readers[i].head {
            heap.push(HeapItem(nv, i));
        }
    }
    if let Some((cv, cc)) = cur {
        out.write_all(&cv.to_le_bytes())?;
        out.write_all(&(cc.min(u32::MAX as u64) as u32).to_le_bytes())?;
    }
    out.flush()?;
    for p in inputs {
        let _ = std::fs::remove_file(p);
    }
    Ok(path)
}

/// Count canonical k-mers across sequence files and keep the ones with
/// multiplicity at least `min_abundance`.
///
/// Working memory is bounded by `memory_budget` bytes: k-mers are buffered,
/// sorted, and spilled as runs under `scratch_dir`, then merged with fan-in
/// 64. The output is independent of read order and run partitioning.
pub fn count_kmers(
    inputs: &[PathBuf],
    k: usize,
    min_abundance: u32,
    memory_budget: usize,
    scratch_dir: &Path,
) -> Result<SolidSet, KmerError> {
    let readers: Result<Vec<_>, _> = inputs.iter().map(|p| SequenceReader::open(p)).collect();
    count_kmers_from(readers?, k, min_abundance, memory_budget, scratch_dir)
}

pub fn count_kmers_from(
    mut readers: Vec<SequenceReader>,
    k: usize,
    min_abundance: u32,
    memory_budget: usize,
    scratch_dir: &Path,
) -> Result<SolidSet, KmerError> {
    if k == 0 || k > MAX_K {
        return Err(KmerError::KOutOfRange(k));
    }
    let min_bytes = MIN_RUN_ENTRIES * ENTRY_BYTES;
    if memory_budget < min_bytes {
        return Err(KmerError::BudgetTooSmall { budget: memory_budget, min: min_bytes });
    }
    let run_entries = memory_budget / ENTRY_BYTES;
    std::fs::create_dir_all(scratch_dir)?;

    let mut buf: Vec<u128> = Vec::with_capacity(run_entries.min(1 << 20));
    let mut runs: Vec<PathBuf> = Vec::new();
    let mut run_id = 0usize;
    for reader in &mut readers {
        while let Some(seq) = reader.next_sequence()? {
            for kmer in canonical_kmers(seq.as_bytes(), k) {
                buf.push(kmer.packed());
                if buf.len() >= run_entries {
                    runs.push(write_run(scratch_dir, run_id, &mut buf)?);
                    run_id += 1;
                }
            }
        }
    }
    if !buf.is_empty() {
        runs.push(write_run(scratch_dir, run_id, &mut buf)?);
        run_id += 1;
    }

    while runs.len() > MERGE_FAN_IN {
        let mut next: Vec<PathBuf> = Vec::new();
        for chunk in runs.chunks(MERGE_FAN_IN) {
            next.push(merge_runs(scratch_dir, run_id, chunk)?);
            run_id += 1;
        }
        runs = next;
    }

    // Final merge straight into records, applying the abundance filter.
    let mut records = Vec::new();
    if !runs.is_empty() {
        let final_run = if runs.len() == 1 {
            runs.pop().unwrap()
        } else {
            merge_runs(scratch_dir, run_id, &runs)?
        };
        let mut rd = RunReader::open(&final_run)?;
        while let Some((v, c)) = rd.head {
            if c >= min_abundance {
                records.push(KmerRecord { kmer: Kmer::from_packed(v, k)?, count: c });
            }
            rd.advance()?;
        }
        let _ = std::fs::remove_file(final_run);
    }
    Ok(SolidSet { k, min_abundance, records })
}

/// In-memory counting for small inputs and for oracle checks.
pub fn count_kmers_naive(reads: &[&str], k: usize, min_abundance: u32) -> SolidSet {
    let mut map = std::collections::HashMap::<u128, u32>::new();
    for r in reads {
        for kmer in canonical_kmers(r.as_bytes(), k) {
            *map.entry(kmer.packed()).or_insert(0) += 1;
        }
    }
    let mut records: Vec<KmerRecord> = map
        .into_iter()
        .filter(|&(_, c)| c >= min_abundance)
        .map(|(p, c)| KmerRecord { kmer: Kmer::from_packed(p, k).unwrap(), count: c })
        .collect();
    records.sort_by_key(|r| r.kmer.packed());
    SolidSet { k, min_abundance, records }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn encode_all_a_is_zero() {
        let k = Kmer::encode(b"AAAA").unwrap();
        assert_eq!(k.packed(), 0);
        assert_eq!(k.decode(), "AAAA");
    }

    #[test]
    fn revcomp_of_actg() {
        let k = Kmer::encode(b"ACTG").unwrap();
        assert_eq!(k.reverse_complement().decode(), "CAGT");
        assert_eq!(k.reverse_complement().reverse_complement(), k);
    }

    #[test]
    fn canonical_picks_lexicographic_min() {
        let k = Kmer::encode(b"TTTT").unwrap();
        assert_eq!(k.canonical().decode(), "AAAA");
        let k2 = Kmer::encode(b"AAAA").unwrap();
        assert_eq!(k2.canonical().decode(), "AAAA");
    }

    #[test]
    fn encode_rejects_n_and_bad_length() {
        assert!(matches!(
            Kmer::encode(b"ACNT"),
            Err(KmerError::InvalidBase { base: 'N', pos: 2 })
        ));
        assert!(matches!(
            Kmer::encode_k(b"ACT", 4),
            Err(KmerError::LengthMismatch { expected: 4, got: 3 })
        ));
        assert!(Kmer::encode(&[b'A'; 65]).is_err());
    }

    #[test]
    fn packed_order_is_lexicographic() {
        let words = ["AAAC", "AACA", "ACGT", "CAAA", "GTTT", "TTTG"];
        for w in words.windows(2) {
            let a = Kmer::encode(w[0].as_bytes()).unwrap();
            let b = Kmer::encode(w[1].as_bytes()).unwrap();
            assert!(a.packed() < b.packed(), "{} !< {}", w[0], w[1]);
        }
    }

    #[test]
    fn small_count_example() {
        // reads={"ACTGG"}, k=4, d=1 -> {ACTG(1), CTGG->CCAG(1)}
        let s = count_kmers_naive(&["ACTGG"], 4, 1);
        let got: Vec<(String, u32)> =
            s.iter().map(|r| (r.kmer.decode(), r.count)).collect();
        assert_eq!(got, vec![("ACTG".into(), 1), ("CCAG".into(), 1)]);
    }

    #[test]
    fn revcomp_reads_collapse() {
        // reads={"AAAA","TTTT"}, k=4, d=2 -> {AAAA(2)}
        let s = count_kmers_naive(&["AAAA", "TTTT"], 4, 2);
        assert_eq!(s.len(), 1);
        assert_eq!(s.records[0].kmer.decode(), "AAAA");
        assert_eq!(s.records[0].count, 2);
    }

    #[test]
    fn figure_read_set_canonical_kmers() {
        // Brute-force enumeration for the three-read set used throughout:
        // 7 distinct canonical 4-mers.
        let s = count_kmers_naive(&["ACTGG", "TCTGGG", "CTGGGTGGG"], 4, 1);
        let got: Vec<String> = s.iter().map(|r| r.kmer.decode()).collect();
        assert_eq!(
            got,
            vec!["ACCC", "ACTG", "CACC", "CAGA", "CCAC", "CCAG", "CCCA"]
        );
        // TGGG occurs 3 times (once in read 2, twice in read 3).
        assert_eq!(s.count_of(&Kmer::encode(b"TGGG").unwrap().canonical()), Some(3));
    }

    #[test]
    fn windows_with_n_are_dropped() {
        let ks = canonical_kmers(b"ACGTNACGT", 4);
        assert_eq!(ks.len(), 2); // ACGT twice, none spanning the N
    }

    fn random_dna<R: Rng>(rng: &mut R, len: usize) -> String {
        (0..len).map(|_| BASES[rng.gen_range(0..4)] as char).collect()
    }

    #[test]
    fn external_count_matches_naive_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let dir = tempfile::tempdir().unwrap();
        for trial in 0..5 {
            let reads: Vec<String> = (0..40)
                .map(|_| {
                    let len = rng.gen_range(10..80);
                    random_dna(&mut rng, len)
                })
                .collect();
            let read_refs: Vec<&str> = reads.iter().map(|s| s.as_str()).collect();
            let k = 5 + trial;
            let d = 1 + (trial as u32 % 3);
            let naive = count_kmers_naive(&read_refs, k, d);
            let text = reads.join("\n");
            let reader = SequenceReader::from_bufread(Box::new(io::Cursor::new(text)));
            // Tiny budget to force many runs and a real merge.
            let ext = count_kmers_from(
                vec![reader],
                k,
                d,
                MIN_RUN_ENTRIES * ENTRY_BYTES,
                dir.path(),
            )
            .unwrap();
            assert_eq!(naive.records, ext.records, "k={k} d={d}");
        }
    }

    #[test]
    fn strand_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let reads: Vec<String> = (0..20).map(|_| random_dna(&mut rng, 50)).collect();
        let rc: Vec<String> = reads
            .iter()
            .map(|r| {
                r.bytes()
                    .rev()
                    .map(|b| match b {
                        b'A' => 'T',
                        b'C' => 'G',
                        b'G' => 'C',
                        _ => 'A',
                    })
                    .collect()
            })
            .collect();
        let fwd: Vec<&str> = reads.iter().map(|s| s.as_str()).collect();
        let rev: Vec<&str> = rc.iter().map(|s| s.as_str()).collect();
        assert_eq!(
            count_kmers_naive(&fwd, 7, 1).records,
            count_kmers_naive(&rev, 7, 1).records
        );
    }

    #[test]
    fn budget_too_small_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let reader = SequenceReader::from_bufread(Box::new(io::Cursor::new("ACGT")));
        assert!(matches!(
            count_kmers_from(vec![reader], 4, 1, 64, dir.path()),
            Err(KmerError::BudgetTooSmall { .. })
        ));
    }

    #[test]
    fn binary_roundtrip() {
        let s = count_kmers_naive(&["ACTGGACGTACGT", "TTTTTTTT"], 6, 1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.kmc");
        s.write_binary(&path).unwrap();
        let back = SolidSet::read_binary(&path).unwrap();
        assert_eq!(s.k, back.k);
        assert_eq!(s.min_abundance, back.min_abundance);
        assert_eq!(s.records, back.records);
    }

    #[test]
    fn fasta_and_fastq_parsing() {
        let fasta = ">r1\nACGT\nACGT\n>r2\nTTTT\n";
        let mut r = SequenceReader::from_bufread(Box::new(io::Cursor::new(fasta)));
        assert_eq!(r.next_sequence().unwrap().unwrap(), "ACGTACGT");
        assert_eq!(r.next_sequence().unwrap().unwrap(), "TTTT");
        assert!(r.next_sequence().unwrap().is_none());

        let fastq = "@r1\nACGT\n+\nIIII\n@r2\nGGGG\n+\nIIII\n";
        let mut r = SequenceReader::from_bufread(Box::new(io::Cursor::new(fastq)));
        assert_eq!(r.next_sequence().unwrap().unwrap(), "ACGT");
        assert_eq!(r.next_sequence().unwrap().unwrap(), "GGGG");
        assert!(r.next_sequence().unwrap().is_none());
    }

    proptest! {
        #[test]
        fn roundtrip_random_strings(s in "[ACGT]{1,64}") {
            let k = Kmer::encode(s.as_bytes()).unwrap();
            prop_assert_eq!(k.decode(), s);
        }

        #[test]
        fn revcomp_involution(s in "[ACGT]{1,64}") {
            let k = Kmer::encode(s.as_bytes()).unwrap();
            prop_assert_eq!(k.reverse_complement().reverse_complement(), k);
            prop_assert_eq!(k.canonical(), k.reverse_complement().canonical());
        }
    }
}
