//! Directed acyclic comparison patterns in canonical topological labeling.
//!
//! A pattern records which pairs of alternatives have been compared. Vertices
//! are labeled 1..n so that every edge (i, j) has i < j, i.e. the labeling is
//! already a topological order and acyclicity is structural. The set of known
//! positions is encoded as a bit vector over the n(n-1)/2 upper-triangular
//! pairs in row-major order (1,2), (1,3), ..., (1,n), (2,3), ...; the integer
//! value of that bit vector is the canonical pattern id used in reports.

use crate::error::{Error, Result};

/// Number of upper-triangular vertex pairs of an `n`-vertex pattern.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Bit position of the pair `(i, j)`, `1 <= i < j <= n`, in canonical order.
pub fn pair_bit(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= n);
    (i - 1) * n - i * (i - 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_bit`]: the 1-indexed pair stored at `bit`.
pub fn pair_at(n: usize, bit: usize) -> (usize, usize) {
    debug_assert!(bit < pair_count(n));
    let mut row = 1;
    let mut offset = bit;
    while offset >= n - row {
        offset -= n - row;
        row += 1;
    }
    (row, row + 1 + offset)
}

/// Lookup table from bit position to 1-indexed pair, for hot loops.
#[derive(Debug, Clone)]
pub struct PairTable {
    n: usize,
    pairs: Vec<(u8, u8)>,
}

impl PairTable {
    pub fn new(n: usize) -> Self {
        let pairs = (0..pair_count(n))
            .map(|b| {
                let (i, j) = pair_at(n, b);
                (i as u8, j as u8)
            })
            .collect();
        PairTable { n, pairs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn pair(&self, bit: usize) -> (usize, usize) {
        let (i, j) = self.pairs[bit];
        (i as usize, j as usize)
    }
}

/// Set of compared pairs on `n` vertices in topological labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DagPattern {
    n: usize,
    bits: u64,
}

impl DagPattern {
    /// Builds a pattern from 1-indexed edges `(i, j)` with `i < j`, read as
    /// "i is preferred to j". Duplicates collapse; self-loops and reversed
    /// pairs are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::check_size(n)?;
        let mut bits = 0u64;
        for &(i, j) in edges {
            if !(1 <= i && i < j && j <= n) {
                return Err(Error::InvalidEdge { i, j, n });
            }
            bits |= 1 << pair_bit(n, i, j);
        }
        Ok(DagPattern { n, bits })
    }

    /// Builds the pattern with canonical id `id`.
    pub fn from_id(n: usize, id: u64) -> Result<Self> {
        Self::check_size(n)?;
        let bits = pair_count(n);
        if bits < 64 && id >= (1u64 << bits) {
            return Err(Error::PatternIdOutOfRange { id, n, bits });
        }
        Ok(DagPattern { n, bits: id })
    }

    fn check_size(n: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::TooFewAlternatives { n });
        }
        let bits = pair_count(n);
        if bits > 63 {
            return Err(Error::PatternTooLarge { n, bits });
        }
        Ok(())
    }

    /// Canonical id: the bit-vector value of the known positions.
    pub fn id(&self) -> u64 {
        self.bits
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// True when the pair `(i, j)`, `i < j`, has been compared.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        debug_assert!(1 <= i && i < j && j <= self.n);
        self.bits & (1 << pair_bit(self.n, i, j)) != 0
    }

    /// Edges as 1-indexed pairs in canonical order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        let mut rest = self.bits;
        while rest != 0 {
            let bit = rest.trailing_zeros() as usize;
            out.push(pair_at(self.n, bit));
            rest &= rest - 1;
        }
        out
    }

    /// True when the undirected comparison graph is connected.
    pub fn is_weakly_connected(&self) -> bool {
        mask_is_connected(self.n, self.bits, &PairTable::new(self.n))
    }

    /// Parses the pattern text format: first line `n`, then one `i j` edge
    /// pair per line (1-indexed). Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match n {
                None => {
                    if fields.len() != 1 {
                        return Err(Error::BadPatternLine {
                            line: lineno + 1,
                            msg: "first line must be the vertex count".into(),
                        });
                    }
                    let v = fields[0].parse::<usize>().map_err(|_| Error::BadPatternLine {
                        line: lineno + 1,
                        msg: format!("cannot parse vertex count '{}'", fields[0]),
                    })?;
                    Self::check_size(v)?;
                    n = Some(v);
                }
                Some(v) => {
                    if fields.len() != 2 {
                        return Err(Error::BadPatternLine {
                            line: lineno + 1,
                            msg: "edge lines must be 'i j'".into(),
                        });
                    }
                    let parse = |s: &str| {
                        s.parse::<usize>().map_err(|_| Error::BadPatternLine {
                            line: lineno + 1,
                            msg: format!("cannot parse vertex '{s}'"),
                        })
                    };
                    let (i, j) = (parse(fields[0])?, parse(fields[1])?);
                    if !(1 <= i && i < j && j <= v) {
                        return Err(Error::InvalidEdge { i, j, n: v });
                    }
                    edges.push((i, j));
                }
            }
        }
        match n {
            Some(v) => Self::new(v, &edges),
            None => Err(Error::BadPatternLine {
                line: 0,
                msg: "empty pattern file".into(),
            }),
        }
    }

    /// Renders the pattern text format parsed by [`DagPattern::parse`].
    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (i, j) in self.edges() {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    /// Deterministic DOT export: nodes 1..n, one `i -> j` line per edge in
    /// canonical order.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph pattern {\n");
        for v in 1..=self.n {
            out.push_str(&format!("  {v};\n"));
        }
        for (i, j) in self.edges() {
            out.push_str(&format!("  {i} -> {j};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Connectivity of the undirected comparison graph encoded by `bits`.
///
/// Shared by [`DagPattern::is_weakly_connected`] and the enumeration hot path,
/// which reuses a [`PairTable`] across millions of ids.
pub fn mask_is_connected(n: usize, bits: u64, table: &PairTable) -> bool {
    debug_assert_eq!(table.n(), n);
    if n <= 1 {
        return true;
    }
    // Adjacency masks over at most 16 vertices.
    let mut adj = [0u16; 16];
    let mut rest = bits;
    while rest != 0 {
        let bit = rest.trailing_zeros() as usize;
        let (i, j) = table.pair(bit);
        adj[i - 1] |= 1 << (j - 1);
        adj[j - 1] |= 1 << (i - 1);
        rest &= rest - 1;
    }
    let all: u16 = if n == 16 { u16::MAX } else { (1 << n) - 1 };
    let mut visited: u16 = 1;
    let mut frontier: u16 = 1;
    while frontier != 0 {
        let mut next: u16 = 0;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            next |= adj[v];
            f &= f - 1;
        }
        frontier = next & !visited;
        visited |= next;
        if visited == all {
            return true;
        }
    }
    visited == all
}

/// Streams every pattern on `n` vertices in ascending id order, optionally
/// filtered by edge count and weak connectedness. The unfiltered stream has
/// exactly 2^(n(n-1)/2) elements.
pub fn enumerate_patterns(
    n: usize,
    edge_range: Option<(usize, usize)>,
    require_connected: bool,
) -> Result<impl Iterator<Item = DagPattern>> {
    DagPattern::check_size(n)?;
    let bits = pair_count(n);
    let total: u64 = 1u64 << bits;
    let table = PairTable::new(n);
    Ok((0..total).filter_map(move |id| {
        let count = id.count_ones() as usize;
        if let Some((lo, hi)) = edge_range {
            if count < lo || count > hi {
                return None;
            }
        }
        if require_connected && !mask_is_connected(n, id, &table) {
            return None;
        }
        Some(DagPattern { n, bits: id })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_indexing_round_trips() {
        for n in 2..=9 {
            for bit in 0..pair_count(n) {
                let (i, j) = pair_at(n, bit);
                assert!(i < j && j <= n);
                assert_eq!(pair_bit(n, i, j), bit);
            }
        }
    }

    #[test]
    fn canonical_order_is_row_major() {
        // (1,2), (1,3), ..., (1,n), (2,3), ...
        assert_eq!(pair_at(6, 0), (1, 2));
        assert_eq!(pair_at(6, 4), (1, 6));
        assert_eq!(pair_at(6, 5), (2, 3));
        assert_eq!(pair_at(6, 14), (5, 6));
    }

    #[test]
    fn rejects_bad_edges_and_sizes() {
        assert!(DagPattern::new(1, &[]).is_err());
        assert!(DagPattern::new(4, &[(2, 2)]).is_err());
        assert!(DagPattern::new(4, &[(3, 2)]).is_err());
        assert!(DagPattern::new(4, &[(1, 5)]).is_err());
        assert!(DagPattern::new(12, &[]).is_err()); // 66 bits
        assert!(DagPattern::new(11, &[]).is_ok()); // 55 bits
    }

    #[test]
    fn connectivity_matches_simple_cases() {
        let single = DagPattern::new(2, &[(1, 2)]).unwrap();
        assert!(single.is_weakly_connected());
        let isolated = DagPattern::new(4, &[(1, 2)]).unwrap();
        assert!(!isolated.is_weakly_connected());
        let chain = DagPattern::new(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        assert!(chain.is_weakly_connected());
        let empty = DagPattern::new(3, &[]).unwrap();
        assert!(!empty.is_weakly_connected());
    }

    #[test]
    fn enumeration_counts() {
        // 2 patterns at n = 2; connectivity keeps only the single edge.
        assert_eq!(enumerate_patterns(2, None, false).unwrap().count(), 2);
        assert_eq!(enumerate_patterns(2, None, true).unwrap().count(), 1);
        assert_eq!(enumerate_patterns(4, None, false).unwrap().count(), 64);
        let ids: Vec<u64> = enumerate_patterns(3, None, false).unwrap().map(|p| p.id()).collect();
        assert_eq!(ids, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn pattern_text_round_trip() {
        let p = DagPattern::new(4, &[(1, 2), (2, 4), (1, 4)]).unwrap();
        let q = DagPattern::parse(&p.render()).unwrap();
        assert_eq!(p, q);
        assert!(DagPattern::parse("3\n1 1\n").is_err());
        assert!(DagPattern::parse("").is_err());
    }

    #[test]
    fn dot_output_shape() {
        let p = DagPattern::new(3, &[(1, 2), (1, 3)]).unwrap();
        let dot = p.to_dot();
        assert!(dot.contains("1 -> 2;"));
        assert!(dot.contains("1 -> 3;"));
        assert_eq!(dot.matches("->").count(), 2);
    }
}
