//! d-uniform hypergraphs over a vertex universe `[0, n)`, together with the
//! brute-force counting routines every estimator in this crate is measured
//! against.
//!
//! Counting conventions, for sets `A_1..A_d` over the universe:
//!
//! * **colorful** — edges with exactly one vertex in each `A_i`; the `A_i`
//!   must be pairwise disjoint.
//! * **meeting** — edges with at least one vertex in each `A_i`; overlap is
//!   allowed.
//! * **ordered** — ordered tuples `(x_1..x_d)` of distinct vertices forming
//!   an edge with `x_i ∈ A_i`; overlap is allowed. With `A_i = U` for all
//!   `i` this equals `d! * m`.
//!
//! All routines are exact and run in `O(m * poly(d))`; they exist to answer
//! queries on instances we hold in memory and to serve as ground truth in
//! tests. Nothing here is sublinear and nothing here is randomized.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write as IoWrite};
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MIN_ARITY: usize = 2;
pub const MAX_ARITY: usize = 6;
pub const MIN_VERTICES: u32 = 4;

/// Dense bitset over the vertex universe `[0, n)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: u32,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: u32) -> Self {
        VertexSet {
            n,
            words: vec![0; Self::word_count(n)],
        }
    }

    pub fn full(n: u32) -> Self {
        let mut words = vec![u64::MAX; Self::word_count(n)];
        let tail = (n % 64) as u64;
        if tail != 0 {
            *words.last_mut().expect("n > 0 implies at least one word") = (1u64 << tail) - 1;
        }
        if n == 0 {
            words.clear();
        }
        VertexSet { n, words }
    }

    pub fn from_members(n: u32, members: &[u32]) -> Result<Self> {
        let mut set = Self::empty(n);
        for &v in members {
            if v >= n {
                return Err(Error::VertexRange { vertex: v, n });
            }
            set.insert(v);
        }
        Ok(set)
    }

    fn word_count(n: u32) -> usize {
        (n as usize).div_ceil(64)
    }

    pub fn universe(&self) -> u32 {
        self.n
    }

    pub fn insert(&mut self, v: u32) {
        debug_assert!(v < self.n);
        self.words[(v / 64) as usize] |= 1u64 << (v % 64);
    }

    pub fn remove(&mut self, v: u32) {
        debug_assert!(v < self.n);
        self.words[(v / 64) as usize] &= !(1u64 << (v % 64));
    }

    pub fn contains(&self, v: u32) -> bool {
        v < self.n && self.words[(v / 64) as usize] & (1u64 << (v % 64)) != 0
    }

    pub fn len(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersect(&self, other: &VertexSet) -> VertexSet {
        debug_assert_eq!(self.n, other.n);
        VertexSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        debug_assert_eq!(self.n, other.n);
        VertexSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        debug_assert_eq!(self.n, other.n);
        VertexSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let base = (wi as u32) * 64;
            BitIter { word: w, base }
        })
    }

    pub fn members(&self) -> Vec<u32> {
        self.iter().collect()
    }
}

struct BitIter {
    word: u64,
    base: u32,
}

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros();
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A tuple of pairwise-disjoint vertex sets with multiplicities summing to
/// the query arity: `(A_1^{[a_1]}, .., A_s^{[a_s]})`.
///
/// Multiplicity `a_i` means the set occupies `a_i` of the `d` slots. The
/// slot order is the declaration order with each part's slots adjacent.
#[derive(Clone, Debug, PartialEq)]
pub struct PartedTuple {
    parts: Vec<(VertexSet, u32)>,
}

impl PartedTuple {
    /// Builds a tuple, checking multiplicities and pairwise disjointness.
    pub fn new(parts: Vec<(VertexSet, u32)>) -> Result<Self> {
        if parts.iter().any(|(_, a)| *a == 0) {
            return Err(Error::Parameter {
                name: "multiplicity",
                reason: "zero multiplicity part".into(),
            });
        }
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if !parts[i].0.is_disjoint(&parts[j].0) {
                    return Err(Error::OverlappingSets { i, j });
                }
            }
        }
        Ok(PartedTuple { parts })
    }

    /// The whole-universe tuple `(U^{[d]})`.
    pub fn uniform(n: u32, d: usize) -> Self {
        PartedTuple {
            parts: vec![(VertexSet::full(n), d as u32)],
        }
    }

    /// One part per slot, multiplicity 1 each. Sets must be pairwise disjoint.
    pub fn from_disjoint_slots(slots: Vec<VertexSet>) -> Result<Self> {
        Self::new(slots.into_iter().map(|s| (s, 1)).collect())
    }

    pub fn parts(&self) -> &[(VertexSet, u32)] {
        &self.parts
    }

    pub fn arity(&self) -> u32 {
        self.parts.iter().map(|(_, a)| a).sum()
    }

    /// Expands the parts into one set reference per slot.
    pub fn slots(&self) -> Vec<&VertexSet> {
        let mut out = Vec::with_capacity(self.arity() as usize);
        for (set, a) in &self.parts {
            for _ in 0..*a {
                out.push(set);
            }
        }
        out
    }

    /// Union of all parts.
    pub fn support(&self) -> VertexSet {
        let mut acc = VertexSet::empty(self.parts[0].0.universe());
        for (set, _) in &self.parts {
            acc = acc.union(set);
        }
        acc
    }

    /// Product of the factorials of the multiplicities. Converts between the
    /// unordered per-part count and the ordered count.
    pub fn ordering_factor(&self) -> u64 {
        self.parts
            .iter()
            .map(|(_, a)| factorial(*a as u64))
            .product()
    }
}

pub fn factorial(k: u64) -> u64 {
    (1..=k).product::<u64>().max(1)
}

/// Bucket sizes along a prefix chain of the degree decomposition.
///
/// `levels[i]` maps a dyadic index `q` to the number of vertices whose
/// continuation count after `prefix[..i]` lies in `[2^q, 2^{q+1})`. Vertices
/// with continuation count zero belong to no bucket.
#[derive(Clone, Debug)]
pub struct BucketProfile {
    pub levels: Vec<BTreeMap<u32, u64>>,
}

impl BucketProfile {
    /// Members of bucket `q` at `level` (1-based), or zero when absent.
    pub fn size(&self, level: usize, q: u32) -> u64 {
        self.levels
            .get(level - 1)
            .and_then(|m| m.get(&q).copied())
            .unwrap_or(0)
    }
}

/// A d-uniform hypergraph with canonical (sorted, deduplicated) edges and a
/// per-vertex incidence index.
#[derive(Clone)]
pub struct Hypergraph {
    d: usize,
    n: u32,
    edges: Vec<Box<[u32]>>,
    incidence: Vec<Vec<u32>>,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Hypergraph {}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hypergraph(d={}, n={}, m={})", self.d, self.n, self.m())
    }
}

impl Hypergraph {
    /// Builds a hypergraph from edge vertex lists.
    ///
    /// Each edge must consist of `d` distinct in-range vertices; vertex order
    /// within an edge does not matter. Repeated edges are rejected.
    pub fn new<I, E>(d: usize, n: u32, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[u32]>,
    {
        if !(MIN_ARITY..=MAX_ARITY).contains(&d) {
            return Err(Error::ArityRange(d));
        }
        if n < MIN_VERTICES {
            return Err(Error::UniverseTooSmall(n));
        }
        let mut canon: Vec<Box<[u32]>> = Vec::new();
        let mut seen = HashSet::new();
        for edge in edges {
            let mut e = edge.as_ref().to_vec();
            if e.len() != d {
                return Err(Error::Parameter {
                    name: "edge",
                    reason: format!("edge {:?} has {} vertices, expected {}", e, e.len(), d),
                });
            }
            e.sort_unstable();
            for w in e.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::Parameter {
                        name: "edge",
                        reason: format!("edge {:?} repeats vertex {}", e, w[0]),
                    });
                }
            }
            if let Some(&v) = e.iter().find(|&&v| v >= n) {
                return Err(Error::VertexRange { vertex: v, n });
            }
            if !seen.insert(e.clone()) {
                return Err(Error::DuplicateEdge { edge: e });
            }
            canon.push(e.into_boxed_slice());
        }
        canon.sort();
        let mut incidence = vec![Vec::new(); n as usize];
        for (idx, e) in canon.iter().enumerate() {
            for &v in e.iter() {
                incidence[v as usize].push(idx as u32);
            }
        }
        Ok(Hypergraph {
            d,
            n,
            edges: canon,
            incidence,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.edges.len() as u64
    }

    /// Ordered edge count of the whole instance: `d! * m`.
    pub fn m_ordered(&self) -> u64 {
        factorial(self.d as u64) * self.m()
    }

    pub fn edges(&self) -> impl Iterator<Item = &[u32]> {
        self.edges.iter().map(|e| e.as_ref())
    }

    pub fn degree(&self, v: u32) -> u64 {
        self.incidence[v as usize].len() as u64
    }

    fn check_slots(&self, sets: &[VertexSet]) -> Result<()> {
        if sets.len() != self.d {
            return Err(Error::SetCount {
                expected: self.d,
                got: sets.len(),
            });
        }
        Ok(())
    }

    fn check_disjoint(sets: &[VertexSet]) -> Result<()> {
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if !sets[i].is_disjoint(&sets[j]) {
                    return Err(Error::OverlappingSets { i, j });
                }
            }
        }
        Ok(())
    }

    /// Edges with exactly one vertex in each of `d` pairwise-disjoint sets.
    pub fn count_colorful(&self, sets: &[VertexSet]) -> Result<u64> {
        self.check_slots(sets)?;
        Self::check_disjoint(sets)?;
        let mut count = 0;
        'edges: for e in &self.edges {
            let mut hits = [0u8; MAX_ARITY];
            for &v in e.iter() {
                let mut owner = None;
                for (i, s) in sets.iter().enumerate() {
                    if s.contains(v) {
                        owner = Some(i);
                        break; // disjoint sets: at most one owner
                    }
                }
                match owner {
                    Some(i) => hits[i] += 1,
                    None => continue 'edges,
                }
            }
            if hits[..self.d].iter().all(|&h| h == 1) {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Edges meeting every one of `d` sets (overlap allowed).
    pub fn count_meeting(&self, sets: &[VertexSet]) -> Result<u64> {
        self.check_slots(sets)?;
        let mut count = 0;
        for e in &self.edges {
            if sets.iter().all(|s| e.iter().any(|&v| s.contains(v))) {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Ordered tuples `(x_1..x_d)` of distinct vertices forming an edge with
    /// `x_i ∈ slots[i]`. Overlapping slots are allowed.
    pub fn count_ordered(&self, slots: &[VertexSet]) -> Result<u64> {
        self.check_slots(slots)?;
        let refs: Vec<&VertexSet> = slots.iter().collect();
        Ok(self
            .edges
            .iter()
            .map(|e| count_slot_assignments(e, &refs))
            .sum())
    }

    /// Ordered count of a parted tuple (parts expanded to slots in order).
    pub fn count_ordered_tuple(&self, tuple: &PartedTuple) -> Result<u64> {
        Ok(self.count_parted(tuple)? * tuple.ordering_factor())
    }

    /// Edges with exactly `a_i` vertices in part `i`, for every part.
    pub fn count_parted(&self, tuple: &PartedTuple) -> Result<u64> {
        if tuple.arity() as usize != self.d {
            return Err(Error::BadMultiplicity {
                expected: self.d as u32,
                got: tuple.arity(),
            });
        }
        let mut count = 0;
        for e in &self.edges {
            if edge_matches_parts(e, tuple.parts()) {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Fast existence check for `count_parted(..) > 0`.
    ///
    /// Scans only edges incident to the smallest part, so negative answers on
    /// thin queries do not pay for the whole edge list.
    pub fn exists_parted(&self, tuple: &PartedTuple) -> Result<bool> {
        if tuple.arity() as usize != self.d {
            return Err(Error::BadMultiplicity {
                expected: self.d as u32,
                got: tuple.arity(),
            });
        }
        for (set, a) in tuple.parts() {
            if set.len() < *a {
                return Ok(false);
            }
        }
        let probe = tuple
            .parts()
            .iter()
            .min_by_key(|(set, _)| set.len())
            .expect("tuple has at least one part");
        for v in probe.0.iter() {
            for &ei in &self.incidence[v as usize] {
                if edge_matches_parts(&self.edges[ei as usize], tuple.parts()) {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Fast existence check for `count_ordered(..) > 0`.
    pub fn exists_ordered(&self, slots: &[VertexSet]) -> Result<bool> {
        self.check_slots(slots)?;
        if slots.iter().any(|s| s.is_empty()) {
            return Ok(false);
        }
        let refs: Vec<&VertexSet> = slots.iter().collect();
        let probe = refs
            .iter()
            .enumerate()
            .min_by_key(|(_, s)| s.len())
            .map(|(i, _)| i)
            .expect("d >= 2");
        for v in refs[probe].iter() {
            for &ei in &self.incidence[v as usize] {
                if count_slot_assignments(&self.edges[ei as usize], &refs) > 0 {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Fast existence check for `count_meeting(..) > 0`.
    pub fn exists_meeting(&self, sets: &[VertexSet]) -> Result<bool> {
        self.check_slots(sets)?;
        if sets.iter().any(|s| s.is_empty()) {
            return Ok(false);
        }
        let probe = sets
            .iter()
            .enumerate()
            .min_by_key(|(_, s)| s.len())
            .map(|(i, _)| i)
            .expect("d >= 2");
        for v in sets[probe].iter() {
            for &ei in &self.incidence[v as usize] {
                let e = &self.edges[ei as usize];
                if sets.iter().all(|s| e.iter().any(|&u| s.contains(u))) {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Dyadic bucket sizes for continuation counts along a prefix chain.
    ///
    /// With an empty prefix this buckets every vertex `v` by the number of
    /// ordered edges having `v` first. A prefix `[(q_1, a_1), ..]` fixes the
    /// leading vertices and buckets continuations at the next level; each
    /// prefix vertex is checked against its claimed bucket.
    ///
    /// The result carries one map per level `1..=prefix.len() + 1`.
    ///
    /// # Errors
    ///
    /// Fails when the prefix is longer than `d - 1`, repeats a vertex, or
    /// claims a bucket the vertex does not lie in.
    pub fn bucket_profile(&self, prefix: &[(u32, u32)]) -> Result<BucketProfile> {
        if prefix.len() >= self.d {
            return Err(Error::Parameter {
                name: "prefix",
                reason: format!(
                    "length {} leaves no level to profile at arity {}",
                    prefix.len(),
                    self.d
                ),
            });
        }
        let mut fixed: Vec<u32> = Vec::with_capacity(prefix.len());
        let mut levels = Vec::with_capacity(prefix.len() + 1);
        for (idx, &(q, a)) in prefix.iter().enumerate() {
            let counts = self.continuation_counts(&fixed);
            levels.push(bucket_sizes(&counts));
            if a >= self.n || fixed.contains(&a) {
                return Err(Error::Parameter {
                    name: "prefix",
                    reason: format!("vertex {} repeated or out of range", a),
                });
            }
            let c = counts[a as usize];
            if c == 0 || dyadic_bucket(c) != q {
                return Err(Error::PrefixBucketMismatch {
                    index: idx,
                    vertex: a,
                    q,
                });
            }
            fixed.push(a);
        }
        let counts = self.continuation_counts(&fixed);
        levels.push(bucket_sizes(&counts));
        Ok(BucketProfile { levels })
    }

    /// For each vertex `v`, the number of ordered edges whose first
    /// `prefix.len()` slots hold the prefix vertices and whose next slot
    /// holds `v` (remaining slots free over the universe).
    fn continuation_counts(&self, prefix: &[u32]) -> Vec<u64> {
        let tail = factorial((self.d - prefix.len() - 1) as u64);
        let mut counts = vec![0u64; self.n as usize];
        let candidates: Box<dyn Iterator<Item = u32>> = match prefix.first() {
            None => Box::new(0..self.m() as u32),
            Some(&v0) => Box::new(self.incidence[v0 as usize].iter().copied()),
        };
        for ei in candidates {
            let e = &self.edges[ei as usize];
            if !prefix.iter().all(|p| e.contains(p)) {
                continue;
            }
            for &v in e.iter() {
                if !prefix.contains(&v) {
                    counts[v as usize] += tail;
                }
            }
        }
        counts
    }

    /// Writes the text format: a `d n m` header, then one line of `d`
    /// whitespace-separated vertex ids per edge.
    pub fn to_writer<W: IoWrite>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.d, self.n, self.m())?;
        for e in &self.edges {
            let line: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn store<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        self.to_writer(&mut file)
    }

    /// Parses the text format, canonicalizing vertex order within edges.
    ///
    /// # Errors
    ///
    /// Reports the 1-based line number for malformed headers, wrong vertex
    /// counts, out-of-range ids, in-edge repeats, and duplicate edges.
    pub fn from_reader<R: Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "empty input, expected `d n m` header".into(),
        })?;
        let header = header?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: 1,
                reason: format!("expected `d n m` header, got {:?}", header),
            });
        }
        let d: usize = parse_field(fields[0], 1, "d")?;
        let n: u32 = parse_field(fields[1], 1, "n")?;
        let m: usize = parse_field(fields[2], 1, "m")?;
        let mut edges: Vec<Vec<u32>> = Vec::with_capacity(m);
        let mut seen: HashSet<Vec<u32>> = HashSet::with_capacity(m);
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line?;
            if line.trim().is_empty() {
                return Err(Error::Parse {
                    line: lineno,
                    reason: "blank line inside edge list".into(),
                });
            }
            if edges.len() == m {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("more than the declared {} edges", m),
                });
            }
            let mut edge = Vec::with_capacity(d);
            for tok in line.split_whitespace() {
                edge.push(parse_field::<u32>(tok, lineno, "vertex id")?);
            }
            if edge.len() != d {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("{} vertex ids, expected {}", edge.len(), d),
                });
            }
            edge.sort_unstable();
            if edge.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parse {
                    line: lineno,
                    reason: "repeated vertex within edge".into(),
                });
            }
            if let Some(&v) = edge.iter().find(|&&v| v >= n) {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("vertex {} out of range for n={}", v, n),
                });
            }
            if !seen.insert(edge.clone()) {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("duplicate edge {:?}", edge),
                });
            }
            edges.push(edge);
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: edges.len() + 1,
                reason: format!("declared {} edges but found {}", m, edges.len()),
            });
        }
        Hypergraph::new(d, n, edges)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(file)
    }
}

fn parse_field<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        reason: format!("cannot parse {} from {:?}", what, tok),
    })
}

fn dyadic_bucket(count: u64) -> u32 {
    debug_assert!(count > 0);
    63 - count.leading_zeros()
}

fn bucket_sizes(counts: &[u64]) -> BTreeMap<u32, u64> {
    let mut sizes = BTreeMap::new();
    for &c in counts {
        if c > 0 {
            *sizes.entry(dyadic_bucket(c)).or_insert(0) += 1;
        }
    }
    sizes
}

/// Number of ways to assign the edge's vertices bijectively to the slots so
/// each vertex lands in its slot's set: the permanent of the membership
/// matrix, by subset DP.
fn count_slot_assignments(edge: &[u32], slots: &[&VertexSet]) -> u64 {
    let d = slots.len();
    debug_assert_eq!(edge.len(), d);
    let full = (1usize << d) - 1;
    // dp[mask] = assignments of the first popcount(mask) vertices to `mask`
    let mut dp = vec![0u64; full + 1];
    dp[0] = 1;
    for (t, &v) in edge.iter().enumerate() {
        for mask in (0..=full).rev() {
            let ways = dp[mask];
            if ways == 0 || mask.count_ones() as usize != t {
                continue;
            }
            for (i, slot) in slots.iter().enumerate() {
                if mask & (1 << i) == 0 && slot.contains(v) {
                    dp[mask | (1 << i)] += ways;
                }
            }
            dp[mask] = 0;
        }
    }
    dp[full]
}

fn edge_matches_parts(edge: &[u32], parts: &[(VertexSet, u32)]) -> bool {
    let mut hits = [0u32; MAX_ARITY];
    for &v in edge.iter() {
        let mut owner = None;
        for (i, (set, _)) in parts.iter().enumerate() {
            if set.contains(v) {
                owner = Some(i);
                break; // parts are pairwise disjoint
            }
        }
        match owner {
            Some(i) => hits[i] += 1,
            None => return false,
        }
    }
    parts.iter().enumerate().all(|(i, (_, a))| hits[i] == *a)
}

/// Uniformly random distinct edges, reproducible from the seed.
///
/// When the universe admits few enough edges, all of them are enumerated and
/// a seeded partial shuffle picks `m`; this keeps dense requests (including
/// complete instances) exact and fast. Sparse requests use rejection.
pub fn generate_random(n: u32, d: usize, m: u64, seed: u64) -> Result<Hypergraph> {
    generate_with(n, d, m, seed, None)
}

/// Degree-skewed random instance: vertex `v` is drawn with weight
/// `(v + 1)^{-skew}`, so low-numbered vertices concentrate incidence. A skew
/// of zero matches `generate_random`'s distribution only in spirit; sampling
/// differs, so seeds are not interchangeable between the two.
pub fn generate_skewed(n: u32, d: usize, m: u64, skew: f64, seed: u64) -> Result<Hypergraph> {
    if !skew.is_finite() || skew < 0.0 {
        return Err(Error::Parameter {
            name: "skew",
            reason: format!("must be finite and non-negative, got {}", skew),
        });
    }
    generate_with(n, d, m, seed, Some(skew))
}

fn generate_with(n: u32, d: usize, m: u64, seed: u64, skew: Option<f64>) -> Result<Hypergraph> {
    if !(MIN_ARITY..=MAX_ARITY).contains(&d) {
        return Err(Error::ArityRange(d));
    }
    if n < MIN_VERTICES {
        return Err(Error::UniverseTooSmall(n));
    }
    let max = binomial(n as u128, d as u32);
    if (m as u128) > max {
        return Err(Error::TooManyEdges { m, max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Dense uniform case: enumerate and shuffle a prefix.
    const ENUMERATION_CAP: u128 = 1 << 20;
    if skew.is_none() && max <= ENUMERATION_CAP {
        let mut all: Vec<Vec<u32>> = Vec::with_capacity(max as usize);
        enumerate_subsets(n, d, &mut all);
        for i in 0..m as usize {
            let j = rng.gen_range(i..all.len());
            all.swap(i, j);
        }
        all.truncate(m as usize);
        return Hypergraph::new(d, n, all);
    }

    let cumulative: Option<Vec<f64>> = skew.map(|s| {
        let mut acc = 0.0;
        (0..n)
            .map(|v| {
                acc += ((v + 1) as f64).powf(-s);
                acc
            })
            .collect()
    });

    let mut seen: HashSet<Vec<u32>> = HashSet::with_capacity(m as usize);
    let mut edges: Vec<Vec<u32>> = Vec::with_capacity(m as usize);
    let mut attempts: u64 = 0;
    let cap = 1_000 + 400 * m.max(1) * (1 + d as u64);
    while (edges.len() as u64) < m {
        attempts += 1;
        if attempts > cap {
            return Err(Error::GeneratorStalled { attempts });
        }
        let mut edge: Vec<u32> = Vec::with_capacity(d);
        while edge.len() < d {
            let v = match &cumulative {
                None => rng.gen_range(0..n),
                Some(cum) => {
                    let total = *cum.last().expect("n >= 4");
                    let x: f64 = rng.gen::<f64>() * total;
                    cum.partition_point(|&c| c < x).min(n as usize - 1) as u32
                }
            };
            if !edge.contains(&v) {
                edge.push(v);
            }
        }
        edge.sort_unstable();
        if seen.insert(edge.clone()) {
            edges.push(edge);
        }
    }
    Hypergraph::new(d, n, edges)
}

fn enumerate_subsets(n: u32, d: usize, out: &mut Vec<Vec<u32>>) {
    let mut cur: Vec<u32> = (0..d as u32).collect();
    loop {
        out.push(cur.clone());
        // next combination in lexicographic order
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur[i] < n - (d as u32 - i as u32) {
                cur[i] += 1;
                for j in i + 1..d {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn binomial(n: u128, k: u32) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc.saturating_mul(n.saturating_sub(i)) / (i + 1);
    }
    acc
}
