//! Incomplete pairwise comparison matrices.
//!
//! A matrix is determined by its known upper-triangular entries: the diagonal
//! is fixed to 1 and the entry below the diagonal is always the exact
//! reciprocal of the one above it. Entries are stored as exact rationals so
//! reciprocity and text round-trips hold without rounding; solvers take the
//! `f64` view.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{mask_is_connected, pair_bit, DagPattern, PairTable};

/// Incomplete positive reciprocal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralPcm {
    n: usize,
    upper: BTreeMap<(usize, usize), BigRational>,
}

impl GeneralPcm {
    /// Empty matrix (all off-diagonal comparisons missing).
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewAlternatives { n });
        }
        Ok(GeneralPcm { n, upper: BTreeMap::new() })
    }

    /// Sets the comparison of the 1-indexed pair `{i, j}`. The value is the
    /// ratio for the (min, max) orientation; the reciprocal entry is implied.
    pub fn set(&mut self, i: usize, j: usize, value: BigRational) -> Result<()> {
        if i == j || i < 1 || j < 1 || i > self.n || j > self.n {
            return Err(Error::InvalidEdge { i, j, n: self.n });
        }
        if !value.is_positive() {
            return Err(Error::NonPositiveEntry { i, j });
        }
        if i < j {
            self.upper.insert((i, j), value);
        } else {
            self.upper.insert((j, i), value.recip());
        }
        Ok(())
    }

    pub fn set_f64(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let v = BigRational::from_float(value).ok_or(Error::NonPositiveEntry { i, j })?;
        self.set(i, j, v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Exact entry at 1-indexed `(i, j)`: 1 on the diagonal, the stored value
    /// or its reciprocal off it, `None` when the comparison is missing.
    pub fn entry(&self, i: usize, j: usize) -> Option<BigRational> {
        assert!(1 <= i && i <= self.n && 1 <= j && j <= self.n);
        if i == j {
            return Some(BigRational::one());
        }
        if i < j {
            self.upper.get(&(i, j)).cloned()
        } else {
            self.upper.get(&(j, i)).map(|v| v.recip())
        }
    }

    pub fn entry_f64(&self, i: usize, j: usize) -> Option<f64> {
        self.entry(i, j).map(|v| v.to_f64().expect("entry representable as f64"))
    }

    pub fn is_known(&self, i: usize, j: usize) -> bool {
        i == j || self.upper.contains_key(&(i.min(j), i.max(j)))
    }

    /// Known off-diagonal pairs `(i, j)` with `i < j`, ascending.
    pub fn known_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.upper.keys().copied()
    }

    pub fn known_pair_count(&self) -> usize {
        self.upper.len()
    }

    pub fn is_complete(&self) -> bool {
        self.upper.len() == self.n * (self.n - 1) / 2
    }

    /// Missing off-diagonal pairs `(i, j)` with `i < j`, ascending.
    pub fn missing_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                if !self.upper.contains_key(&(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Number of known comparisons involving alternative `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.upper.keys().filter(|&&(a, b)| a == i || b == i).count()
    }

    /// True when the undirected graph of known comparisons is connected.
    pub fn is_weakly_connected(&self) -> bool {
        let table = PairTable::new(self.n);
        let mut bits = 0u64;
        for &(i, j) in self.upper.keys() {
            bits |= 1 << pair_bit(self.n, i, j);
        }
        mask_is_connected(self.n, bits, &table)
    }

    /// Complete matrix as a dense row-major `f64` buffer.
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        if !self.is_complete() {
            return Err(Error::IncompleteMatrix);
        }
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 1..=n {
            for j in 1..=n {
                a[(i - 1) * n + (j - 1)] = self.entry_f64(i, j).unwrap();
            }
        }
        Ok(a)
    }

    /// Replaces every known entry by its `h`-th power (`h > 0`). Missing
    /// positions stay missing; reciprocity is preserved exactly because only
    /// the upper entry is powered and the lower one stays derived.
    pub fn elementwise_power(&self, h: f64) -> Result<GeneralPcm> {
        if !(h > 0.0) {
            return Err(Error::NonPositiveExponent { h });
        }
        if h == 1.0 {
            return Ok(self.clone());
        }
        let mut out = GeneralPcm::new(self.n)?;
        for (&(i, j), v) in &self.upper {
            let powered = v.to_f64().expect("entry representable").powf(h);
            out.set_f64(i, j, powered)?;
        }
        Ok(out)
    }

    /// The preference digraph for intensity `b`: an edge `i -> j` (in original
    /// labels, any orientation) wherever `a_ij = b`. Errors when some known
    /// entry is not in `{b, 1/b}`.
    pub fn ordinal_edges(&self, b: f64) -> Result<Vec<(usize, usize)>> {
        if !(b > 1.0) {
            return Err(Error::InvalidIntensity { b });
        }
        let mut edges = Vec::with_capacity(self.upper.len());
        for (&(i, j), v) in &self.upper {
            let value = v.to_f64().expect("entry representable");
            if (value / b - 1.0).abs() <= 1e-12 {
                edges.push((i, j));
            } else if (value * b - 1.0).abs() <= 1e-12 {
                edges.push((j, i));
            } else {
                return Err(Error::NotOrdinal { i, j, value, b });
            }
        }
        Ok(edges)
    }

    /// A permutation making every known above-diagonal entry equal to `b`, if
    /// one exists: `sigma[p]` is the original label placed at sorted position
    /// `p + 1`. Equivalent to a topological sort of the preference digraph;
    /// returns `None` when the digraph has a cycle. Identity comes out first
    /// whenever the matrix is already sorted.
    pub fn linear_order_permutation(&self, b: f64) -> Result<Option<Vec<usize>>> {
        let edges = self.ordinal_edges(b)?;
        let n = self.n;
        let mut indegree = vec![0usize; n + 1];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for &(from, to) in &edges {
            succ[from].push(to);
            indegree[to] += 1;
        }
        // Kahn's algorithm, always taking the smallest available label.
        let mut ready: Vec<usize> = (1..=n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&v) = ready.iter().min() {
            ready.retain(|&u| u != v);
            order.push(v);
            for &w in &succ[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.push(w);
                }
            }
        }
        Ok(if order.len() == n { Some(order) } else { None })
    }

    /// Parses the matrix text format: one row per line, entries separated by
    /// whitespace; an entry is a decimal, an exact fraction `p/q`, or `*` for
    /// a missing comparison. The diagonal must be 1 and given entries must be
    /// reciprocal within 1e-9; the stored matrix is made exactly reciprocal
    /// by recomputing the lower triangle.
    pub fn parse(text: &str) -> Result<GeneralPcm> {
        #[derive(Clone, PartialEq)]
        enum Cell {
            Missing,
            Value(BigRational),
        }
        let mut rows: Vec<Vec<Cell>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut row = Vec::new();
            for token in line.split_whitespace() {
                if token == "*" {
                    row.push(Cell::Missing);
                } else {
                    let v = parse_positive_rational(token).ok_or_else(|| Error::BadEntry {
                        line: lineno + 1,
                        token: token.to_string(),
                    })?;
                    if !v.is_positive() {
                        return Err(Error::NonPositiveEntry { i: rows.len() + 1, j: row.len() + 1 });
                    }
                    row.push(Cell::Value(v));
                }
            }
            rows.push(row);
        }
        let n = rows.len();
        if n < 2 {
            return Err(Error::TooFewAlternatives { n });
        }
        for (idx, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::RaggedRow { row: idx + 1, expected: n, found: row.len() });
            }
        }
        let mut pcm = GeneralPcm::new(n)?;
        for i in 1..=n {
            match &rows[i - 1][i - 1] {
                Cell::Value(v) if v.is_one() => {}
                _ => return Err(Error::NonUnitDiagonal { i }),
            }
        }
        for i in 1..=n {
            for j in i + 1..=n {
                match (&rows[i - 1][j - 1], &rows[j - 1][i - 1]) {
                    (Cell::Missing, Cell::Missing) => {}
                    (Cell::Missing, Cell::Value(_)) => {
                        return Err(Error::AsymmetricMissing { i, j })
                    }
                    (Cell::Value(_), Cell::Missing) => {
                        return Err(Error::AsymmetricMissing { i: j, j: i })
                    }
                    (Cell::Value(a), Cell::Value(b)) => {
                        let product = (a * b).to_f64().expect("entry representable");
                        if (product - 1.0).abs() > 1e-9 {
                            return Err(Error::NonReciprocal {
                                i,
                                j,
                                a: a.to_f64().unwrap_or(f64::NAN),
                                b: b.to_f64().unwrap_or(f64::NAN),
                            });
                        }
                        // Keep the above-diagonal value; the reciprocal below
                        // the diagonal is recomputed exactly on access.
                        pcm.set(i, j, a.clone())?;
                    }
                }
            }
        }
        Ok(pcm)
    }

    /// Renders the canonical text form parsed by [`GeneralPcm::parse`]:
    /// single-space separated entries, fractions in lowest terms, `*` for
    /// missing, one trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for i in 1..=self.n {
            let mut cells = Vec::with_capacity(self.n);
            for j in 1..=self.n {
                cells.push(match self.entry(i, j) {
                    None => "*".to_string(),
                    Some(v) => render_rational(&v),
                });
            }
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

fn render_rational(v: &BigRational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parses an integer, a fraction `p/q`, or a plain decimal as an exact
/// positive rational. Returns `None` on malformed or non-positive input.
fn parse_positive_rational(token: &str) -> Option<BigRational> {
    let value = if let Some((num, den)) = token.split_once('/') {
        let p: BigInt = num.parse().ok()?;
        let q: BigInt = den.parse().ok()?;
        if q.is_zero() {
            return None;
        }
        BigRational::new(p, q)
    } else if let Some((int_part, frac_part)) = token.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        BigRational::new(digits, scale)
    } else {
        let p: BigInt = token.parse().ok()?;
        BigRational::from(p)
    };
    value.is_positive().then_some(value)
}

/// Ordinal matrix: a comparison pattern plus one preference intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct OrdinalPcm {
    pattern: DagPattern,
    b: f64,
}

impl OrdinalPcm {
    pub fn new(pattern: DagPattern, b: f64) -> Result<Self> {
        if !(b > 1.0) {
            return Err(Error::InvalidIntensity { b });
        }
        Ok(OrdinalPcm { pattern, b })
    }

    pub fn pattern(&self) -> &DagPattern {
        &self.pattern
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// The matrix with `a_ij = b` on edges, `1/b` mirrored, 1 on the diagonal
    /// and every uncompared pair missing.
    pub fn realize(&self) -> GeneralPcm {
        let mut pcm = GeneralPcm::new(self.pattern.n()).expect("pattern has n >= 2");
        let b = BigRational::from_float(self.b).expect("b is finite");
        for (i, j) in self.pattern.edges() {
            pcm.set(i, j, b.clone()).expect("edge indices are valid");
        }
        pcm
    }
}

/// Convenience wrapper: realize a pattern at intensity `b`.
pub fn realize(pattern: &DagPattern, b: f64) -> Result<GeneralPcm> {
    Ok(OrdinalPcm::new(*pattern, b)?.realize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn realize_two_by_two() {
        let p = DagPattern::new(2, &[(1, 2)]).unwrap();
        let a = realize(&p, 3.0).unwrap();
        assert_eq!(a.entry_f64(1, 2), Some(3.0));
        assert_eq!(a.entry_f64(2, 1), Some(1.0 / 3.0));
        assert_eq!(a.entry_f64(1, 1), Some(1.0));
        assert!(a.is_complete());
    }

    #[test]
    fn realize_empty_pattern_has_no_entries() {
        let p = DagPattern::new(3, &[]).unwrap();
        let a = realize(&p, 5.0).unwrap();
        assert_eq!(a.known_pair_count(), 0);
        assert_eq!(a.entry(1, 2), None);
        assert!(!a.is_weakly_connected());
    }

    #[test]
    fn rejects_b_not_above_one() {
        let p = DagPattern::new(2, &[(1, 2)]).unwrap();
        assert!(OrdinalPcm::new(p, 1.0).is_err());
        assert!(OrdinalPcm::new(p, 0.5).is_err());
    }

    #[test]
    fn power_round_trip_and_identity() {
        let p = DagPattern::new(3, &[(1, 2), (2, 3)]).unwrap();
        let a = realize(&p, 2.0).unwrap();
        for h in [0.5, 2.0, 3.0] {
            let round = a.elementwise_power(h).unwrap().elementwise_power(1.0 / h).unwrap();
            for i in 1..=3 {
                for j in 1..=3 {
                    match (a.entry_f64(i, j), round.entry_f64(i, j)) {
                        (None, None) => {}
                        (Some(x), Some(y)) => assert!((x - y).abs() < 1e-12),
                        other => panic!("pattern changed under powering: {other:?}"),
                    }
                }
            }
        }
        let same = a.elementwise_power(1.0).unwrap();
        assert_eq!(a, same);
        let squared = a.elementwise_power(2.0).unwrap();
        assert_eq!(squared.entry_f64(1, 2), Some(4.0));
        assert!(a.elementwise_power(0.0).is_err());
        assert!(a.elementwise_power(-1.0).is_err());
    }

    #[test]
    fn parse_render_round_trip() {
        let text = "1 3 *\n1/3 1 2\n* 1/2 1\n";
        let a = GeneralPcm::parse(text).unwrap();
        assert_eq!(a.render(), text);
        assert_eq!(a.entry_f64(2, 3), Some(2.0));
        assert_eq!(a.entry(1, 3), None);
    }

    #[test]
    fn parse_decimal_entries_exactly() {
        let a = GeneralPcm::parse("1 0.25\n4 1\n").unwrap();
        assert_eq!(a.entry(1, 2).unwrap(), BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn parse_rejects_bad_matrices() {
        // reciprocity violation
        assert!(matches!(
            GeneralPcm::parse("1 2\n3 1\n"),
            Err(Error::NonReciprocal { .. })
        ));
        // non-unit diagonal
        assert!(matches!(
            GeneralPcm::parse("2 1\n1 1\n"),
            Err(Error::NonUnitDiagonal { .. })
        ));
        // ragged row
        assert!(matches!(
            GeneralPcm::parse("1 2 3\n1/2 1\n* * 1\n"),
            Err(Error::RaggedRow { .. })
        ));
        // non-positive entry
        assert!(GeneralPcm::parse("1 -2\n-1/2 1\n").is_err());
        // asymmetric missing
        assert!(matches!(
            GeneralPcm::parse("1 *\n3 1\n"),
            Err(Error::AsymmetricMissing { .. })
        ));
        // a 1x1 matrix is rejected
        assert!(GeneralPcm::parse("1\n").is_err());
    }

    #[test]
    fn reciprocity_is_exact_after_parse() {
        let a = GeneralPcm::parse("1 0.3333333333\n3.0000000003 1\n").unwrap();
        let product = a.entry(1, 2).unwrap() * a.entry(2, 1).unwrap();
        assert!(product.is_one());
    }

    #[test]
    fn weak_connectivity_of_matrices() {
        let mut a = GeneralPcm::new(4).unwrap();
        a.set_f64(1, 2, 2.0).unwrap();
        assert!(!a.is_weakly_connected());
        a.set_f64(2, 3, 2.0).unwrap();
        a.set_f64(3, 4, 2.0).unwrap();
        assert!(a.is_weakly_connected());
    }

    #[test]
    fn linear_order_permutation_cases() {
        // Already sorted: identity.
        let p = DagPattern::new(3, &[(1, 2), (2, 3)]).unwrap();
        let a = realize(&p, 2.0).unwrap();
        assert_eq!(a.linear_order_permutation(2.0).unwrap(), Some(vec![1, 2, 3]));

        // Reversed chain: worst vertex first in the original labels.
        let mut rev = GeneralPcm::new(3).unwrap();
        rev.set_f64(2, 1, 2.0).unwrap(); // 2 preferred to 1
        rev.set_f64(3, 2, 2.0).unwrap(); // 3 preferred to 2
        assert_eq!(rev.linear_order_permutation(2.0).unwrap(), Some(vec![3, 2, 1]));

        // Directed 3-cycle: no linear order.
        let mut cyc = GeneralPcm::new(3).unwrap();
        cyc.set_f64(1, 2, 2.0).unwrap();
        cyc.set_f64(2, 3, 2.0).unwrap();
        cyc.set_f64(3, 1, 2.0).unwrap();
        assert_eq!(cyc.linear_order_permutation(2.0).unwrap(), None);

        // Entry outside {b, 1/b}.
        let mut bad = GeneralPcm::new(2).unwrap();
        bad.set_f64(1, 2, 3.0).unwrap();
        assert!(matches!(
            bad.linear_order_permutation(2.0),
            Err(Error::NotOrdinal { .. })
        ));
    }

    #[test]
    fn set_via_lower_index_stores_reciprocal() {
        let mut a = GeneralPcm::new(3).unwrap();
        a.set_f64(3, 1, 4.0).unwrap();
        assert_eq!(a.entry_f64(1, 3), Some(0.25));
        assert_eq!(a.entry_f64(3, 1), Some(4.0));
    }
}
