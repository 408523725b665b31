//! Exhaustive scans over comparison patterns.
//!
//! Patterns on n vertices are identified with the 2^(n(n-1)/2) subsets of the
//! upper-triangular positions and scanned in ascending id order. The log
//! least squares scan looks for patterns whose exact coefficients contradict
//! a preference; a float pre-screen flags candidates (any edge gap below
//! 1e-6) and exact rational arithmetic confirms them, so results carry no
//! rounding risk. The eigenvector scan looks for patterns whose completion
//! weights rank alternatives differently at different preference
//! intensities.
//!
//! The id space is split into fixed chunks; workers scan chunks in parallel
//! and a single writer appends finished work to a journal (`done <start>
//! <end>` lines) plus a JSON-lines hit file, so interrupted scans resume
//! without repeating completed chunks. Hit lists are merged by ascending id,
//! making output independent of scheduling.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write as _};
use std::path::Path;
use std::sync::mpsc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{mask_is_connected, pair_bit, DagPattern, PairTable};
use crate::lop::compare_rankings;
use crate::llsm::llsm_exact;
use crate::em::em_weights;
use crate::pcm::realize;

/// Weighting method driving a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Llsm,
    Em,
}

/// Scan description.
#[derive(Debug, Clone)]
pub struct SearchTask {
    pub n: usize,
    pub method: Method,
    /// Inclusive (min, max) bounds on the number of known comparisons.
    pub edge_range: Option<(usize, usize)>,
    /// Intensities scanned by the eigenvector method (at least two).
    pub b_values: Vec<f64>,
    /// Skip patterns whose comparison graph is disconnected (the weight
    /// vectors would not be unique there).
    pub require_connected: bool,
    /// Count only ranking flips on compared pairs.
    pub edges_only: bool,
}

impl SearchTask {
    pub fn llsm(n: usize) -> Self {
        SearchTask {
            n,
            method: Method::Llsm,
            edge_range: None,
            b_values: Vec::new(),
            require_connected: true,
            edges_only: false,
        }
    }

    /// Default intensity grid for eigenvector scans: the integers 2..9.
    pub fn default_b_grid() -> Vec<f64> {
        (2..=9).map(|b| b as f64).collect()
    }

    pub fn em(n: usize, b_values: Vec<f64>) -> Self {
        SearchTask {
            n,
            method: Method::Em,
            edge_range: None,
            b_values,
            require_connected: true,
            edges_only: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::TooFewAlternatives { n: self.n });
        }
        DagPattern::from_id(self.n, 0)?;
        if self.method == Method::Em {
            if self.b_values.len() < 2 {
                return Err(Error::InvalidTask {
                    msg: "eigenvector scans need at least two b values".into(),
                });
            }
            if let Some(&b) = self.b_values.iter().find(|&&b| !(b > 1.0)) {
                return Err(Error::InvalidIntensity { b });
            }
        }
        Ok(())
    }
}

/// A ranking difference between two intensities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmReversal {
    pub b_low: f64,
    pub b_high: f64,
    /// Pairs (i, j), i < j, ordered differently at the two intensities.
    pub flipped: Vec<(usize, usize)>,
}

/// One pattern that witnesses the scanned phenomenon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub schema: u32,
    pub method: Method,
    /// Canonical bit encoding of the pattern.
    pub pattern_id: u64,
    pub n: usize,
    pub edge_count: usize,
    /// Edges whose preference the exact coefficients contradict (log least
    /// squares scans).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<(usize, usize)>,
    /// Exact rational log-weight coefficients, in units of log b.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<String>>,
    /// Weights per scanned intensity (eigenvector scans).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights_by_b: Vec<(f64, Vec<f64>)>,
    /// Ranking differences between intensities (eigenvector scans).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reversals: Vec<EmReversal>,
}

pub const HIT_SCHEMA: u32 = 1;

/// Tallies of one scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    /// Ids matching the edge-count filter.
    pub scanned: u64,
    /// Of those, patterns with a connected comparison graph.
    pub connected: u64,
    pub hits: usize,
    /// Smallest edge count among hits.
    pub min_edge_count: Option<usize>,
}

#[derive(Debug)]
pub struct SearchOutput {
    pub hits: Vec<SearchHit>,
    pub summary: SearchSummary,
}

/// Float pre-screen threshold on the minimum edge gap, in log-b units. Exact
/// coefficients are ratios of integer minors whose denominators stay far
/// above this, so no true violation can escape the screen.
const PRESCREEN_GAP: f64 = 1e-6;

const MAX_N: usize = 11;

/// Mean-zero float log coefficients of a pattern given as a bit mask.
/// Returns false when the reduced system is singular (disconnected graph).
fn float_coeffs(n: usize, bits: u64, table: &PairTable, out: &mut [f64; MAX_N]) -> bool {
    let mut deg = [0i32; MAX_N];
    let mut net = [0i32; MAX_N];
    let mut adj = [[0i32; MAX_N]; MAX_N];
    let mut rest = bits;
    while rest != 0 {
        let bit = rest.trailing_zeros() as usize;
        let (i, j) = table.pair(bit);
        deg[i - 1] += 1;
        deg[j - 1] += 1;
        adj[i - 1][j - 1] = 1;
        adj[j - 1][i - 1] = 1;
        net[i - 1] += 1;
        net[j - 1] -= 1;
        rest &= rest - 1;
    }
    // Reduced system with the zero-sum constraint substituted for the last
    // coefficient: A[r][c] = L[r][c] - L[r][n-1].
    let dim = n - 1;
    let mut a = [[0f64; MAX_N]; MAX_N];
    let mut rhs = [0f64; MAX_N];
    for r in 0..dim {
        let l_last = if r == n - 1 { deg[r] } else { -adj[r][n - 1] };
        for c in 0..dim {
            let l = if r == c { deg[r] } else { -adj[r][c] };
            a[r][c] = (l - l_last) as f64;
        }
        rhs[r] = net[r] as f64;
    }
    // In-place Gaussian elimination with partial pivoting.
    for col in 0..dim {
        let mut pivot = col;
        for row in col + 1..dim {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col] == 0.0 {
            return false;
        }
        if pivot != col {
            a.swap(col, pivot);
            rhs.swap(col, pivot);
        }
        for row in col + 1..dim {
            if a[row][col] == 0.0 {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            for k in col..dim {
                a[row][k] -= factor * a[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    for row in (0..dim).rev() {
        let mut acc = rhs[row];
        for k in row + 1..dim {
            acc -= a[row][k] * out[k];
        }
        out[row] = acc / a[row][row];
    }
    out[n - 1] = -out[..dim].iter().sum::<f64>();
    true
}

/// Smallest float coefficient gap over the edges of the pattern.
fn min_edge_gap(n: usize, bits: u64, table: &PairTable, coeffs: &[f64; MAX_N]) -> f64 {
    let mut min = f64::INFINITY;
    let mut rest = bits;
    while rest != 0 {
        let bit = rest.trailing_zeros() as usize;
        let (i, j) = table.pair(bit);
        min = min.min(coeffs[i - 1] - coeffs[j - 1]);
        rest &= rest - 1;
    }
    let _ = n;
    min
}

fn llsm_scan_one(pattern: DagPattern, table: &PairTable, coeffs: &mut [f64; MAX_N]) -> Option<SearchHit> {
    if !float_coeffs(pattern.n(), pattern.id(), table, coeffs) {
        return None;
    }
    if min_edge_gap(pattern.n(), pattern.id(), table, coeffs) >= PRESCREEN_GAP {
        return None;
    }
    // Confirm in exact arithmetic: strict coefficient reversals only.
    let exact = llsm_exact(&pattern).ok()?;
    let violations: Vec<(usize, usize)> = pattern
        .edges()
        .into_iter()
        .filter(|&(i, j)| exact.coeff(i) < exact.coeff(j))
        .collect();
    if violations.is_empty() {
        return None;
    }
    Some(SearchHit {
        schema: HIT_SCHEMA,
        method: Method::Llsm,
        pattern_id: pattern.id(),
        n: pattern.n(),
        edge_count: pattern.edge_count(),
        violations,
        coeffs: Some(exact.coeffs().iter().map(|c| c.to_string()).collect()),
        weights_by_b: Vec::new(),
        reversals: Vec::new(),
    })
}

fn em_scan_one(pattern: DagPattern, task: &SearchTask) -> Result<Option<SearchHit>> {
    let mut weights = Vec::with_capacity(task.b_values.len());
    for &b in &task.b_values {
        weights.push((b, em_weights(&realize(&pattern, b)?)?));
    }
    let mut reversals = Vec::new();
    for x in 0..weights.len() {
        for y in x + 1..weights.len() {
            let mut flipped = compare_rankings(&weights[x].1, &weights[y].1);
            if task.edges_only {
                flipped.retain(|&(i, j)| pattern.has_edge(i, j));
            }
            if !flipped.is_empty() {
                reversals.push(EmReversal {
                    b_low: weights[x].0,
                    b_high: weights[y].0,
                    flipped,
                });
            }
        }
    }
    if reversals.is_empty() {
        return Ok(None);
    }
    Ok(Some(SearchHit {
        schema: HIT_SCHEMA,
        method: Method::Em,
        pattern_id: pattern.id(),
        n: pattern.n(),
        edge_count: pattern.edge_count(),
        violations: Vec::new(),
        coeffs: None,
        weights_by_b: weights
            .into_iter()
            .map(|(b, w)| (b, w.as_slice().to_vec()))
            .collect(),
        reversals,
    }))
}

struct ChunkResult {
    start: u64,
    end: u64,
    scanned: u64,
    connected: u64,
    hits: Vec<SearchHit>,
}

fn scan_chunk(task: &SearchTask, table: &PairTable, start: u64, end: u64) -> Result<ChunkResult> {
    let n = task.n;
    let mut result = ChunkResult { start, end, scanned: 0, connected: 0, hits: Vec::new() };
    let mut coeffs = [0f64; MAX_N];
    for id in start..end {
        let edges = id.count_ones() as usize;
        if let Some((lo, hi)) = task.edge_range {
            if edges < lo || edges > hi {
                continue;
            }
        }
        result.scanned += 1;
        let connected = mask_is_connected(n, id, table);
        if connected {
            result.connected += 1;
        }
        if task.require_connected && !connected {
            continue;
        }
        let pattern = DagPattern::from_id(n, id).expect("id in range");
        match task.method {
            Method::Llsm => {
                if let Some(hit) = llsm_scan_one(pattern, table, &mut coeffs) {
                    result.hits.push(hit);
                }
            }
            Method::Em => {
                if let Some(hit) = em_scan_one(pattern, task)? {
                    result.hits.push(hit);
                }
            }
        }
    }
    Ok(result)
}

fn chunk_size_bits(total_bits: usize) -> usize {
    // Around 256 chunks for large scans, one chunk for tiny ones.
    total_bits.saturating_sub(8).max(12).min(total_bits)
}

fn load_journal(path: &Path) -> Result<HashSet<(u64, u64)>> {
    let mut done = HashSet::new();
    if !path.exists() {
        return Ok(done);
    }
    let reader = BufReader::new(File::open(path)?);
    for line in reader.lines() {
        let line = line?;
        let mut fields = line.split_whitespace();
        if fields.next() != Some("done") {
            continue;
        }
        if let (Some(s), Some(e)) = (fields.next(), fields.next()) {
            if let (Ok(s), Ok(e)) = (s.parse(), e.parse()) {
                done.insert((s, e));
            }
        }
    }
    Ok(done)
}

fn load_hits(path: &Path, done: &HashSet<(u64, u64)>, chunk: u64) -> Result<Vec<SearchHit>> {
    let mut hits = Vec::new();
    if !path.exists() {
        return Ok(hits);
    }
    let reader = BufReader::new(File::open(path)?);
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if let Ok(hit) = serde_json::from_str::<SearchHit>(&line) {
            let start = (hit.pattern_id / chunk) * chunk;
            if done.iter().any(|&(s, e)| s <= hit.pattern_id && hit.pattern_id < e) {
                hits.push(hit);
            } else {
                let _ = start;
            }
        }
    }
    Ok(hits)
}

/// Runs a scan, optionally streaming hits to a JSON-lines file and journaling
/// completed id ranges so an interrupted run resumes where it stopped.
///
/// The final hit list (and rewritten hit file) is sorted by pattern id and is
/// identical whether the scan ran in one go, in parallel, or resumed.
pub fn run_search(task: &SearchTask, out: Option<&Path>, journal: Option<&Path>) -> Result<SearchOutput> {
    task.validate()?;
    let n = task.n;
    let total_bits = crate::graph::pair_count(n);
    let total: u64 = 1u64 << total_bits;
    let chunk: u64 = 1u64 << chunk_size_bits(total_bits);
    let table = PairTable::new(n);

    let done = match journal {
        Some(path) => load_journal(path)?,
        None => HashSet::new(),
    };
    let mut prior_hits = match (out, journal) {
        (Some(path), Some(_)) if !done.is_empty() => load_hits(path, &done, chunk)?,
        _ => Vec::new(),
    };
    prior_hits.retain(|h| h.n == n && h.method == task.method);

    let mut pending = Vec::new();
    let mut starts = Vec::new();
    let mut s = 0u64;
    while s < total {
        let e = (s + chunk).min(total);
        if done.contains(&(s, e)) {
            starts.push((s, e));
        } else {
            pending.push((s, e));
        }
        s = e;
    }

    // Recount filter tallies for chunks completed in a previous run; their
    // hits come from the hit file, so no solving is repeated.
    let (mut scanned, mut connected) = (0u64, 0u64);
    for &(s, e) in &starts {
        for id in s..e {
            let edges = id.count_ones() as usize;
            if let Some((lo, hi)) = task.edge_range {
                if edges < lo || edges > hi {
                    continue;
                }
            }
            scanned += 1;
            if mask_is_connected(n, id, &table) {
                connected += 1;
            }
        }
    }

    let (sender, receiver) = mpsc::channel::<ChunkResult>();
    let journal_path = journal.map(Path::to_path_buf);
    let out_path = out.map(Path::to_path_buf);
    let writer = std::thread::spawn(move || -> Result<(Vec<SearchHit>, u64, u64)> {
        let mut journal_file = match &journal_path {
            Some(p) => Some(BufWriter::new(
                OpenOptions::new().create(true).append(true).open(p)?,
            )),
            None => None,
        };
        let mut out_file = match &out_path {
            Some(p) => Some(BufWriter::new(
                OpenOptions::new().create(true).append(true).open(p)?,
            )),
            None => None,
        };
        let mut hits = Vec::new();
        let (mut scanned, mut connected) = (0u64, 0u64);
        for chunk in receiver {
            if let Some(f) = out_file.as_mut() {
                for hit in &chunk.hits {
                    serde_json::to_writer(&mut *f, hit).map_err(std::io::Error::other)?;
                    f.write_all(b"\n")?;
                }
                f.flush()?;
            }
            if let Some(f) = journal_file.as_mut() {
                writeln!(f, "done {} {}", chunk.start, chunk.end)?;
                f.flush()?;
            }
            scanned += chunk.scanned;
            connected += chunk.connected;
            hits.extend(chunk.hits);
        }
        Ok((hits, scanned, connected))
    });

    let scan_error: std::sync::Mutex<Option<Error>> = std::sync::Mutex::new(None);
    pending.par_iter().for_each_with(sender, |tx, &(s, e)| {
        if scan_error.lock().unwrap().is_some() {
            return;
        }
        match scan_chunk(task, &table, s, e) {
            Ok(result) => {
                let _ = tx.send(result);
            }
            Err(err) => {
                scan_error.lock().unwrap().get_or_insert(err);
            }
        }
    });
    let (new_hits, new_scanned, new_connected) =
        writer.join().expect("writer thread does not panic")?;
    if let Some(err) = scan_error.into_inner().unwrap() {
        return Err(err);
    }

    scanned += new_scanned;
    connected += new_connected;
    let mut hits = prior_hits;
    hits.extend(new_hits);
    hits.sort_by_key(|h| h.pattern_id);
    hits.dedup_by_key(|h| h.pattern_id);

    // Rewrite the hit file in canonical ascending order.
    if let Some(path) = out {
        let mut f = BufWriter::new(File::create(path)?);
        for hit in &hits {
            serde_json::to_writer(&mut f, hit).map_err(std::io::Error::other)?;
            f.write_all(b"\n")?;
        }
        f.flush()?;
    }

    let summary = SearchSummary {
        scanned,
        connected,
        hits: hits.len(),
        min_edge_count: hits.iter().map(|h| h.edge_count).min(),
    };
    Ok(SearchOutput { hits, summary })
}

/// All connected patterns of size `task.n` whose exact log least squares
/// coefficients contradict at least one preference.
pub fn search_llsm_violations(task: &SearchTask) -> Result<SearchOutput> {
    if task.method != Method::Llsm {
        return Err(Error::InvalidTask { msg: "task method must be llsm".into() });
    }
    run_search(task, None, None)
}

/// All connected patterns whose eigenvector-method rankings differ between
/// two scanned intensities.
pub fn search_em_reversals(task: &SearchTask) -> Result<SearchOutput> {
    if task.method != Method::Em {
        return Err(Error::InvalidTask { msg: "task method must be em".into() });
    }
    run_search(task, None, None)
}

/// Number of isomorphism classes among hits, where two patterns are
/// isomorphic when some relabeling that keeps all edges above the diagonal
/// maps one onto the other. Each hit's class representative is the smallest
/// reachable id.
pub fn isomorphism_classes(hits: &[SearchHit]) -> usize {
    let mut reps = HashSet::new();
    for hit in hits {
        let pattern = DagPattern::from_id(hit.n, hit.pattern_id).expect("stored id is valid");
        reps.insert(canonical_form(&pattern));
    }
    reps.len()
}

/// Smallest id over all relabelings of the pattern that keep every edge
/// above the diagonal.
pub fn canonical_form(pattern: &DagPattern) -> u64 {
    let n = pattern.n();
    let edges = pattern.edges();
    let mut perm: Vec<usize> = (1..=n).collect();
    let mut best = u64::MAX;
    permute(&mut perm, 0, &mut |perm| {
        let mut bits = 0u64;
        for &(u, v) in &edges {
            let (a, b) = (perm[u - 1], perm[v - 1]);
            if a >= b {
                return;
            }
            bits |= 1 << pair_bit(n, a, b);
        }
        best = best.min(bits);
    });
    best
}

fn permute(perm: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == perm.len() {
        visit(perm);
        return;
    }
    for i in at..perm.len() {
        perm.swap(at, i);
        permute(perm, at + 1, visit);
        perm.swap(at, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_scans_are_empty() {
        for n in 2..=4 {
            let out = search_llsm_violations(&SearchTask::llsm(n)).unwrap();
            assert_eq!(out.hits.len(), 0, "n = {n}");
            assert_eq!(out.summary.scanned, 1u64 << crate::graph::pair_count(n));
        }
    }

    #[test]
    fn float_coeffs_match_exact_solver() {
        use num_traits::ToPrimitive;
        let table = PairTable::new(5);
        let mut coeffs = [0f64; MAX_N];
        for pattern in crate::graph::enumerate_patterns(5, None, true).unwrap().take(200) {
            assert!(float_coeffs(5, pattern.id(), &table, &mut coeffs));
            let exact = llsm_exact(&pattern).unwrap();
            for i in 1..=5 {
                let want = exact.coeff(i).to_f64().unwrap();
                assert!(
                    (coeffs[i - 1] - want).abs() < 1e-10,
                    "id {} coeff {i}: {} vs {}",
                    pattern.id(),
                    coeffs[i - 1],
                    want
                );
            }
        }
    }

    #[test]
    fn connectivity_tally_matches_union_find_oracle() {
        // Independent union-find check of the connectivity filter at n = 4.
        fn uf_connected(n: usize, pattern: &DagPattern) -> bool {
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(parent: &mut Vec<usize>, x: usize) -> usize {
                if parent[x] != x {
                    let root = find(parent, parent[x]);
                    parent[x] = root;
                }
                parent[x]
            }
            for (i, j) in pattern.edges() {
                let (a, b) = (find(&mut parent, i - 1), find(&mut parent, j - 1));
                parent[a] = b;
            }
            let root = find(&mut parent, 0);
            (1..n).all(|v| find(&mut parent, v) == root)
        }
        let mut expected = 0u64;
        for pattern in crate::graph::enumerate_patterns(4, None, false).unwrap() {
            if uf_connected(4, &pattern) {
                expected += 1;
            }
        }
        let out = search_llsm_violations(&SearchTask::llsm(4)).unwrap();
        assert_eq!(out.summary.connected, expected);
    }

    #[test]
    fn canonical_form_identifies_relabelings() {
        // Chains 1->2->3 and the same chain relabeled are one class.
        let a = DagPattern::new(3, &[(1, 2), (2, 3)]).unwrap();
        let b = DagPattern::new(3, &[(1, 3), (3, 2)]);
        assert!(b.is_err()); // reversed labels are not a valid pattern
        let c = DagPattern::new(3, &[(1, 3), (2, 3)]).unwrap();
        assert_ne!(canonical_form(&a), canonical_form(&c));
        let d = DagPattern::new(3, &[(1, 2), (1, 3)]).unwrap();
        assert_ne!(canonical_form(&c), canonical_form(&d));
    }

    #[test]
    fn em_scan_validates_grid() {
        assert!(search_em_reversals(&SearchTask::em(3, vec![2.0])).is_err());
        assert!(search_em_reversals(&SearchTask::em(3, vec![2.0, 0.5])).is_err());
    }
}
