//! Dense matrices over a [`GaloisField`]: rank, span membership, linear
//! solves, parity-check derivation and circuit enumeration of the column
//! matroid.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{FieldElement, GaloisField};

#[derive(Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
    field: GaloisField,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {}", self.rows, self.cols, self.field.spec())?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl FieldMatrix {
    pub fn new(
        field: GaloisField,
        rows: usize,
        cols: usize,
        entries: Vec<FieldElement>,
    ) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        for &e in &entries {
            field.element(e as u64)?;
        }
        Ok(FieldMatrix {
            rows,
            cols,
            entries,
            field,
        })
    }

    pub fn zeros(field: GaloisField, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
            field,
        }
    }

    pub fn identity(field: GaloisField, n: usize) -> Self {
        let mut m = FieldMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: GaloisField, rows: &[Vec<FieldElement>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        FieldMatrix::new(field, rows.len(), cols, rows.concat())
    }

    /// Builds a matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(
        field: GaloisField,
        rows: usize,
        columns: &[Vec<FieldElement>],
    ) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Dimension(
                "column length differs from row count".into(),
            ));
        }
        let mut m = FieldMatrix::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m.field.element(v as u64)?;
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// The submatrix formed by the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> FieldMatrix {
        let mut out = FieldMatrix::zeros(self.field.clone(), self.rows, cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for r in 0..self.rows {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    /// Appends a column (used by the replication path).
    pub fn push_column(&mut self, col: &[FieldElement]) -> Result<()> {
        if col.len() != self.rows {
            return Err(Error::Dimension(
                "column length differs from row count".into(),
            ));
        }
        let mut entries = Vec::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            entries.extend_from_slice(self.row(r));
            entries.push(col[r]);
        }
        self.entries = entries;
        self.cols += 1;
        Ok(())
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut out = FieldMatrix::zeros(self.field.clone(), self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn mul(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = &self.field;
        let mut out = FieldMatrix::zeros(f.clone(), self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0;
                for t in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(i, t), rhs.get(t, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: the codeword of `message` when `self` is a generator.
    pub fn left_mul(&self, message: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if message.len() != self.rows {
            return Err(Error::Dimension(format!(
                "message of length {} for {} rows",
                message.len(),
                self.rows
            )));
        }
        let f = &self.field;
        let mut out = vec![0; self.cols];
        for (r, &m) in message.iter().enumerate() {
            if m == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.row(r)) {
                *o = f.add(*o, f.mul(m, g));
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.row_reduce().len()
    }

    /// Rank of the submatrix on the listed columns.
    pub fn column_rank(&self, cols: &[usize]) -> usize {
        let mut ech = Echelon::new(self.field.clone());
        cols.iter().filter(|&&c| ech.insert(self.column(c))).count()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..self.cols {
            if lead == self.rows {
                break;
            }
            let Some(p) = (lead..self.rows).find(|&r| self.get(r, c) != 0) else {
                continue;
            };
            if p != lead {
                for j in 0..self.cols {
                    self.entries.swap(p * self.cols + j, lead * self.cols + j);
                }
            }
            let inv = f.inv(self.get(lead, c)).expect("pivot is nonzero");
            for j in 0..self.cols {
                let v = self.get(lead, j);
                self.set(lead, j, f.mul(v, inv));
            }
            for r in 0..self.rows {
                let factor = self.get(r, c);
                if r == lead || factor == 0 {
                    continue;
                }
                for j in 0..self.cols {
                    let v = f.sub(self.get(r, j), f.mul(factor, self.get(lead, j)));
                    self.set(r, j, v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        pivots
    }
}

/// An incrementally built echelon basis of a set of vectors.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: GaloisField,
    rows: Vec<(usize, Vec<FieldElement>)>,
}

impl Echelon {
    pub fn new(field: GaloisField) -> Self {
        Echelon {
            field,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residual of `v` after eliminating against the basis; zero iff `v` is in the span.
    pub fn reduce(&self, mut v: Vec<FieldElement>) -> Vec<FieldElement> {
        let f = &self.field;
        for (pivot, row) in &self.rows {
            let factor = v[*pivot];
            if factor == 0 {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(row) {
                *x = f.sub(*x, f.mul(factor, y));
            }
        }
        v
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        self.reduce(v.to_vec()).iter().all(|&x| x == 0)
    }

    /// Adds `v` to the basis; returns false (and leaves the basis unchanged)
    /// when `v` is already in the span.
    pub fn insert(&mut self, v: Vec<FieldElement>) -> bool {
        let mut res = self.reduce(v);
        let Some(pivot) = res.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inv(res[pivot]).expect("pivot is nonzero");
        for x in res.iter_mut() {
            *x = self.field.mul(*x, inv);
        }
        self.rows.push((pivot, res));
        true
    }
}

/// True iff `v` lies in the span of `set`. The empty set spans `{0}`.
pub fn in_span(field: &GaloisField, v: &[FieldElement], set: &[Vec<FieldElement>]) -> Result<bool> {
    if set.iter().any(|s| s.len() != v.len()) {
        return Err(Error::Dimension("span vectors differ in length".into()));
    }
    let mut ech = Echelon::new(field.clone());
    for s in set {
        ech.insert(s.clone());
    }
    Ok(ech.contains(v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<FieldElement>),
    /// Solvable with `free` free variables; `particular` sets them to zero.
    Multiple {
        particular: Vec<FieldElement>,
        free: usize,
    },
    Inconsistent,
}

/// Solves `a * x = b`.
pub fn solve(a: &FieldMatrix, b: &[FieldElement]) -> Result<Solution> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            a.rows()
        )));
    }
    let f = a.field().clone();
    let n = a.cols();
    let mut aug = FieldMatrix::zeros(f, a.rows(), n + 1);
    for r in 0..a.rows() {
        for c in 0..n {
            aug.set(r, c, a.get(r, c));
        }
        aug.set(r, n, b[r]);
    }
    let pivots = aug.row_reduce();
    if pivots.last() == Some(&n) {
        return Ok(Solution::Inconsistent);
    }
    let mut x = vec![0; n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug.get(r, n);
    }
    let free = n - pivots.len();
    Ok(if free == 0 {
        Solution::Unique(x)
    } else {
        Solution::Multiple {
            particular: x,
            free,
        }
    })
}

/// Returns `H` with `G * H^T = 0` and `rank(H) = n - k`.
pub fn parity_check(g: &FieldMatrix) -> Result<FieldMatrix> {
    let (k, n) = (g.rows(), g.cols());
    let mut rref = g.clone();
    let pivots = rref.row_reduce();
    if pivots.len() != k {
        return Err(Error::RankDeficient {
            rank: pivots.len(),
            rows: k,
        });
    }
    let f = g.field().clone();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut h = FieldMatrix::zeros(f.clone(), n - k, n);
    for (row, &fc) in free.iter().enumerate() {
        h.set(row, fc, 1);
        for (i, &pc) in pivots.iter().enumerate() {
            h.set(row, pc, f.neg(rref.get(i, fc)));
        }
    }
    Ok(h)
}

/// A minimal dependent set of columns, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Circuit(Vec<usize>);

impl Circuit {
    pub fn from_mask(mask: u64) -> Self {
        Circuit((0..64).filter(|&i| mask >> i & 1 == 1).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, &i| m | 1 << i)
    }
}

/// All circuits of size at most `size_cap`, ordered by size and then
/// lexicographically.
pub fn circuits(g: &FieldMatrix, size_cap: usize) -> Result<Vec<Circuit>> {
    circuits_within(g, size_cap, u128::MAX)
}

/// As [`circuits`], failing once more than `budget` column subsets would be tested.
///
/// Subsets are grown one column at a time in increasing index order. Each
/// surviving subset is independent and keeps its echelon basis, so testing
/// an extension costs one reduction. A subset that contains an earlier
/// circuit is dropped, so every dependent subset reached has all proper
/// subsets independent, i.e. is a circuit.
pub fn circuits_within(g: &FieldMatrix, size_cap: usize, budget: u128) -> Result<Vec<Circuit>> {
    let n = g.cols();
    if n > 63 {
        return Err(Error::Dimension(
            "circuit search supports at most 63 columns".into(),
        ));
    }
    let cap = size_cap.min(n);
    let needed: u128 = (1..=cap).map(|s| binomial(n, s)).sum();
    if needed > budget {
        return Err(Error::BudgetExceeded {
            what: "circuit enumeration",
            needed,
            budget,
        });
    }
    let columns: Vec<Vec<FieldElement>> = (0..n).map(|c| g.column(c)).collect();
    let mut found: Vec<u64> = Vec::new();
    let mut level: HashMap<u64, Echelon> = HashMap::new();
    level.insert(0, Echelon::new(g.field().clone()));
    for _size in 1..=cap {
        let mut next = HashMap::new();
        let mut masks: Vec<u64> = level.keys().copied().collect();
        masks.sort_unstable();
        let mut new_found = Vec::new();
        for mask in masks {
            let ech = &level[&mask];
            let start = if mask == 0 {
                0
            } else {
                64 - mask.leading_zeros() as usize
            };
            for c in start..n {
                let grown = mask | 1 << c;
                if found.iter().any(|&f| f & !grown == 0) {
                    continue;
                }
                let residual = ech.reduce(columns[c].clone());
                if residual.iter().all(|&x| x == 0) {
                    new_found.push(grown);
                } else {
                    let mut e = ech.clone();
                    e.insert(residual);
                    next.insert(grown, e);
                }
            }
        }
        new_found.sort_unstable_by_key(|&m| Circuit::from_mask(m));
        found.extend(new_found);
        level = next;
        if level.is_empty() {
            break;
        }
    }
    let mut out: Vec<Circuit> = found.into_iter().map(Circuit::from_mask).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(q: u64) -> GaloisField {
        GaloisField::with_order(q).unwrap()
    }

    #[test]
    fn rank_examples() {
        let f = gf(7);
        assert_eq!(FieldMatrix::identity(f.clone(), 4).rank(), 4);
        let m = FieldMatrix::from_rows(f.clone(), &[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(FieldMatrix::zeros(f, 3, 3).rank(), 0);
    }

    #[test]
    fn span_examples() {
        let f = gf(5);
        assert!(in_span(&f, &[0, 0], &[]).unwrap());
        assert!(!in_span(&f, &[1, 0], &[vec![0, 1]]).unwrap());
        assert!(in_span(&f, &[1, 1], &[vec![1, 0], vec![0, 1]]).unwrap());
        assert!(in_span(&f, &[1, 1], &[vec![1]]).is_err());
    }

    #[test]
    fn parity_check_standard_form() {
        let f = gf(5);
        // G = [I_2 | P]
        let g = FieldMatrix::from_rows(f.clone(), &[vec![1, 0, 2, 3], vec![0, 1, 4, 1]]).unwrap();
        let h = parity_check(&g).unwrap();
        let expected =
            FieldMatrix::from_rows(f.clone(), &[vec![3, 1, 1, 0], vec![2, 4, 0, 1]]).unwrap();
        assert_eq!(h, expected);
        assert!(g.mul(&h.transpose()).unwrap().is_zero());
    }

    #[test]
    fn parity_check_degenerate_and_deficient() {
        let f = gf(3);
        let h = parity_check(&FieldMatrix::identity(f.clone(), 3)).unwrap();
        assert_eq!((h.rows(), h.cols()), (0, 3));
        let bad = FieldMatrix::from_rows(f, &[vec![1, 1], vec![2, 2]]).unwrap();
        assert!(matches!(
            parity_check(&bad),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn circuit_examples() {
        let f = gf(3);
        let g = FieldMatrix::from_rows(f.clone(), &[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        assert_eq!(circuits(&g, 3).unwrap(), vec![Circuit(vec![0, 1, 2])]);
        let dup = FieldMatrix::from_rows(f, &[vec![1, 1], vec![2, 2]]).unwrap();
        assert_eq!(circuits(&dup, 2).unwrap(), vec![Circuit(vec![0, 1])]);
    }

    #[test]
    fn solve_cases() {
        let f = gf(7);
        let a = FieldMatrix::from_rows(f.clone(), &[vec![1, 2], vec![3, 4]]).unwrap();
        let Solution::Unique(x) = solve(&a, &[5, 6]).unwrap() else {
            panic!("expected unique solution");
        };
        assert_eq!(
            a.mul(&FieldMatrix::from_columns(f.clone(), 2, &[x]).unwrap())
                .unwrap()
                .column(0),
            vec![5, 6]
        );
        let singular = FieldMatrix::from_rows(f, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(solve(&singular, &[1, 1]).unwrap(), Solution::Inconsistent);
        assert!(matches!(
            solve(&singular, &[1, 2]).unwrap(),
            Solution::Multiple { free: 1, .. }
        ));
    }

    fn arb_matrix(q: u64) -> impl Strategy<Value = FieldMatrix> {
        (1usize..4, 2usize..8).prop_flat_map(move |(k, n)| {
            proptest::collection::vec(0..q as u32, k * n)
                .prop_map(move |e| FieldMatrix::new(gf(q), k, n, e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn circuits_are_minimal_and_antichain(g in arb_matrix(3)) {
            let cs = circuits(&g, g.cols()).unwrap();
            for c in &cs {
                prop_assert_eq!(g.column_rank(c.indices()), c.len() - 1);
                for skip in 0..c.len() {
                    let sub: Vec<usize> = c.indices().iter().enumerate()
                        .filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                    prop_assert_eq!(g.column_rank(&sub), sub.len());
                }
            }
            for a in &cs {
                for b in &cs {
                    prop_assert!(a == b || a.mask() & !b.mask() != 0);
                }
            }
        }

        #[test]
        fn rank_plus_one_columns_hold_a_circuit(g in arb_matrix(2)) {
            let rank = g.rank();
            let cs = circuits(&g, g.cols()).unwrap();
            if rank < g.cols() {
                let window: u64 = (1u64 << (rank + 1)) - 1;
                prop_assert!(cs.iter().any(|c| c.mask() & !window == 0));
            }
        }

        #[test]
        fn parity_check_annihilates(g in arb_matrix(5)) {
            if g.rank() == g.rows() {
                let h = parity_check(&g).unwrap();
                prop_assert_eq!(h.rank(), g.cols() - g.rows());
                prop_assert!(g.mul(&h.transpose()).unwrap().is_zero());
            }
        }
    }
}
