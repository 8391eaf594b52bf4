//! Operator-matrix codes over F4.
//!
//! A `k x n` grid of unary maps `F_{l,j}: F4 -> F4` encodes a message `x` as
//! `y_j = F_{1,j}(x_1) + .. + F_{k,j}(x_k)`. With the non-additive `beta`
//! family of operators the resulting code need not be linear.
//!
//! F4 elements are the bit pairs `00, 01, 10, 11` (`x^2 + x + 1` presentation),
//! with addition as XOR.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze_codebook, d_opt, functional_repair_sets, Budget, CodeReport};
use crate::codebook::Codebook;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum F4Operator {
    Zero,
    One,
    Alpha,
    Alpha2,
    Beta,
    Beta2,
    Beta3,
}

impl F4Operator {
    pub const ALL: [F4Operator; 7] = [
        F4Operator::Zero,
        F4Operator::One,
        F4Operator::Alpha,
        F4Operator::Alpha2,
        F4Operator::Beta,
        F4Operator::Beta2,
        F4Operator::Beta3,
    ];

    /// Images of `00, 01, 10, 11`.
    pub const fn table(self) -> [u8; 4] {
        match self {
            F4Operator::Zero => [0b00, 0b00, 0b00, 0b00],
            F4Operator::One => [0b00, 0b01, 0b10, 0b11],
            F4Operator::Alpha => [0b00, 0b10, 0b11, 0b01],
            F4Operator::Alpha2 => [0b00, 0b11, 0b01, 0b10],
            F4Operator::Beta => [0b01, 0b10, 0b11, 0b00],
            F4Operator::Beta2 => [0b10, 0b11, 0b00, 0b01],
            F4Operator::Beta3 => [0b11, 0b00, 0b01, 0b10],
        }
    }

    #[inline]
    pub fn apply(self, x: u8) -> u8 {
        self.table()[(x & 0b11) as usize]
    }

    pub fn name(self) -> &'static str {
        match self {
            F4Operator::Zero => "zero",
            F4Operator::One => "one",
            F4Operator::Alpha => "alpha",
            F4Operator::Alpha2 => "alpha2",
            F4Operator::Beta => "beta",
            F4Operator::Beta2 => "beta2",
            F4Operator::Beta3 => "beta3",
        }
    }

    /// `op(x + y) = op(x) + op(y)` for all `x, y`.
    pub fn is_additive(self) -> bool {
        (0..4).all(|x| (0..4).all(|y| self.apply(x ^ y) == self.apply(x) ^ self.apply(y)))
    }
}

impl fmt::Display for F4Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for F4Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        F4Operator::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::UnknownOperator(s.to_string()))
    }
}

/// Prints an F4 element as its bit pair, e.g. `"10"`.
pub fn format_f4(x: u8) -> String {
    format!("{:02b}", x & 0b11)
}

fn compose(outer: F4Operator, inner: F4Operator) -> [u8; 4] {
    [0, 1, 2, 3].map(|x| outer.apply(inner.apply(x)))
}

/// Checks the composition identities that tie the tables together:
/// `alpha2 = alpha.alpha`, `beta2 = beta.beta`, `beta3 = beta.beta.beta`.
pub fn tables_consistent() -> bool {
    use F4Operator::*;
    let beta3 = [0, 1, 2, 3].map(|x| Beta.apply(Beta.apply(Beta.apply(x))));
    compose(Alpha, Alpha) == Alpha2.table()
        && compose(Beta, Beta) == Beta2.table()
        && beta3 == Beta3.table()
}

fn ensure_tables() {
    static CHECKED: OnceLock<()> = OnceLock::new();
    CHECKED.get_or_init(|| assert!(tables_consistent(), "F4 operator tables are inconsistent"));
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "f1-33")]
    F1_33,
    #[serde(rename = "f2-33")]
    F2_33,
    #[serde(rename = "f1-34")]
    F1_34,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::F1_33, Family::F2_33, Family::F1_34];

    pub fn tag(self) -> &'static str {
        match self {
            Family::F1_33 => "f1-33",
            Family::F2_33 => "f2-33",
            Family::F1_34 => "f1-34",
        }
    }

    /// `(rows, cols)` of the matrix at block index `i`.
    pub fn shape(self, i: usize) -> (usize, usize) {
        match self {
            Family::F1_33 => (3 * i + 1, 4 * i + 3),
            Family::F2_33 => (3 * i + 2, 4 * i + 4),
            Family::F1_34 => (3 * i + 1, 4 * i + 4),
        }
    }

    /// Parameters the family is published with, read as `(n, k, d, r)`.
    pub fn claimed(self, i: usize) -> ClaimedParams {
        let (k, n) = self.shape(i);
        let (d, r) = match self {
            Family::F1_33 | Family::F2_33 => (3, 3),
            Family::F1_34 => (3, 4),
        };
        ClaimedParams { n, k, d, r }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.tag() == norm)
            .ok_or_else(|| Error::InvalidParams(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimedParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub r: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMatrix {
    k: usize,
    n: usize,
    ops: Vec<F4Operator>,
    origin: Option<(Family, usize)>,
}

use F4Operator::{
    Alpha as A1, Alpha2 as A2, Beta as B1, Beta2 as B2, Beta3 as B3, One as I, Zero as O,
};

const BLOCK_A: [[F4Operator; 4]; 3] = [[I, O, O, I], [O, I, O, I], [O, O, I, I]];
const BLOCK_B: [[F4Operator; 3]; 3] = [[O, I, I], [O, A1, A1], [O, A2, A2]];
const BLOCK_D: [[F4Operator; 4]; 3] = [[O, O, I, I], [O, O, A1, A1], [O, O, A2, A2]];

impl OperatorMatrix {
    pub fn custom(grid: Vec<Vec<F4Operator>>) -> Result<Self> {
        let k = grid.len();
        let n = grid.first().map_or(0, Vec::len);
        if k == 0 || n == 0 || grid.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(
                "operator grid must be a nonempty rectangle".into(),
            ));
        }
        Ok(OperatorMatrix {
            k,
            n,
            ops: grid.concat(),
            origin: None,
        })
    }

    /// Assembles a family matrix: `i` diagonal `A` blocks, the right block
    /// column (`B`, `D` or `A` per family) beside each, and the final rows.
    /// Everything else is the zero operator.
    pub fn family(family: Family, i: usize) -> Result<Self> {
        if i < 1 {
            return Err(Error::InvalidParams(
                "block index i must be at least 1".into(),
            ));
        }
        ensure_tables();
        let (k, n) = family.shape(i);
        let mut ops = vec![O; k * n];
        let right = 4 * i;
        let mut put = |row: usize, col: usize, op| ops[row * n + col] = op;
        for block in 0..i {
            for t in 0..3 {
                let row = 3 * block + t;
                for c in 0..4 {
                    put(row, 4 * block + c, BLOCK_A[t][c]);
                }
                match family {
                    Family::F1_33 => (0..3).for_each(|c| put(row, right + c, BLOCK_B[t][c])),
                    Family::F2_33 => (0..4).for_each(|c| put(row, right + c, BLOCK_D[t][c])),
                    Family::F1_34 => (0..4).for_each(|c| put(row, right + c, BLOCK_A[t][c])),
                }
            }
        }
        let last = 3 * i;
        let tail: &[&[F4Operator]] = match family {
            Family::F1_33 => &[&[I, A1, A2]],
            Family::F2_33 => &[&[I, O, B1, B2], &[O, I, B2, B1]],
            Family::F1_34 => &[&[I, B1, B2, B3]],
        };
        for (dr, row) in tail.iter().enumerate() {
            for (c, &op) in row.iter().enumerate() {
                put(last + dr, right + c, op);
            }
        }
        Ok(OperatorMatrix {
            k,
            n,
            ops,
            origin: Some((family, i)),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> Option<(Family, usize)> {
        self.origin
    }

    pub fn get(&self, row: usize, col: usize) -> F4Operator {
        self.ops[row * self.n + col]
    }

    pub fn grid(&self) -> Vec<Vec<F4Operator>> {
        self.ops
            .chunks(self.n)
            .map(<[F4Operator]>::to_vec)
            .collect()
    }

    pub fn encode(&self, x: &[u8]) -> Result<Vec<u8>> {
        if x.len() != self.k {
            return Err(Error::Dimension(format!(
                "message of length {} for k = {}",
                x.len(),
                self.k
            )));
        }
        if x.iter().any(|&v| v > 3) {
            return Err(Error::ElementOutOfRange {
                value: *x.iter().max().unwrap() as u64,
                order: 4,
            });
        }
        Ok((0..self.n)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .fold(0, |acc, (l, &xl)| acc ^ self.get(l, j).apply(xl))
            })
            .collect())
    }

    /// Coordinates `(message index, codeword index)` that copy a message
    /// symbol verbatim. For the families these are the first three columns
    /// of each `A` block, plus the leading `one` entries of the final rows
    /// when the column above them is otherwise zero.
    pub fn systematic_positions(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .filter_map(|j| {
                let nonzero: Vec<usize> = (0..self.k).filter(|&l| self.get(l, j) != O).collect();
                match nonzero.as_slice() {
                    [l] if self.get(*l, j) == I => Some((*l, j)),
                    _ => None,
                }
            })
            .collect()
    }

    /// All `4^k` codewords, in message order (message digit `l` is bits
    /// `2l..2l+2` of the message index).
    pub fn codebook(&self, budget: &Budget) -> Result<Codebook> {
        ensure_tables();
        let messages = 1u128 << (2 * self.k);
        if self.k > 31 || messages > budget.enumeration {
            return Err(Error::BudgetExceeded {
                what: "codebook enumeration",
                needed: messages,
                budget: budget.enumeration,
            });
        }
        if self.n > 32 {
            return Err(Error::Dimension("codewords longer than 32 symbols".into()));
        }
        // contribution[l][v]: packed image of row l applied to v
        let contribution: Vec<[u64; 4]> = (0..self.k)
            .map(|l| {
                [0u8, 1, 2, 3].map(|v| {
                    (0..self.n).fold(0u64, |w, j| w | (self.get(l, j).apply(v) as u64) << (2 * j))
                })
            })
            .collect();
        let words: Vec<u64> = (0..messages as u64)
            .into_par_iter()
            .map(|m| {
                contribution
                    .iter()
                    .enumerate()
                    .fold(0, |w, (l, c)| w ^ c[((m >> (2 * l)) & 3) as usize])
            })
            .collect();
        Codebook::new(self.n, 2, words)
    }
}

/// An operator matrix together with one repair set per coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorCode {
    pub matrix: OperatorMatrix,
    /// Locality the code is declared with.
    pub r: usize,
    pub repair_sets: Vec<Option<Vec<usize>>>,
}

impl OperatorCode {
    /// Discovers repair sets of size at most `k` over the full codebook.
    /// The declared locality is the family's published one, or the largest
    /// discovered set for custom grids.
    pub fn new(matrix: OperatorMatrix, budget: &Budget) -> Result<Self> {
        let codebook = matrix.codebook(budget)?;
        let repair_sets = functional_repair_sets(&codebook, matrix.k());
        let r = match matrix.origin() {
            Some((family, i)) => family.claimed(i).r,
            None => repair_sets
                .iter()
                .map(|s| s.as_ref().map_or(matrix.k() + 1, Vec::len))
                .max()
                .unwrap_or(0),
        };
        Ok(OperatorCode {
            matrix,
            r,
            repair_sets,
        })
    }

    pub fn with_repair_sets(
        matrix: OperatorMatrix,
        r: usize,
        repair_sets: Vec<Option<Vec<usize>>>,
    ) -> Result<Self> {
        let n = matrix.n();
        if repair_sets.len() != n {
            return Err(Error::Format(format!(
                "{} repair sets for {n} coordinates",
                repair_sets.len()
            )));
        }
        for (j, set) in repair_sets.iter().enumerate() {
            if let Some(set) = set {
                if set.iter().any(|&c| c >= n || c == j) {
                    return Err(Error::Format(format!("bad repair set for coordinate {j}")));
                }
            }
        }
        Ok(OperatorCode {
            matrix,
            r,
            repair_sets,
        })
    }
}

/// Verification of one family member against its published parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: Family,
    pub i: usize,
    pub claimed: ClaimedParams,
    pub measured: CodeReport,
    /// Bound evaluated at the claimed locality.
    pub d_opt_claimed: usize,
    pub matches_claim: bool,
}

pub fn verify_family(family: Family, i: usize, budget: &Budget) -> Result<FamilyReport> {
    let matrix = OperatorMatrix::family(family, i)?;
    let codebook = matrix.codebook(budget)?;
    let measured = analyze_codebook(&codebook, matrix.k(), budget)?;
    let claimed = family.claimed(i);
    let matches_claim = (measured.n, measured.k, measured.d, measured.r)
        == (claimed.n, claimed.k, claimed.d, claimed.r);
    Ok(FamilyReport {
        family,
        i,
        claimed,
        measured,
        d_opt_claimed: d_opt(claimed.n, claimed.k, claimed.r),
        matches_claim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_spot_values() {
        assert_eq!(F4Operator::Alpha.apply(0b01), 0b10);
        assert_eq!(F4Operator::Alpha.apply(0b11), 0b01);
        assert_eq!(F4Operator::Beta.apply(0b00), 0b01);
        assert_eq!(F4Operator::Beta3.apply(0b01), 0b00);
        assert_eq!(F4Operator::Beta3.apply(0b11), 0b10);
        for x in 0..4 {
            assert_eq!(F4Operator::One.apply(x), x);
            assert_eq!(F4Operator::Zero.apply(x), 0);
        }
        assert!(tables_consistent());
    }

    #[test]
    fn additivity_split() {
        use F4Operator::*;
        for op in [Zero, One, Alpha, Alpha2] {
            assert!(op.is_additive(), "{op}");
        }
        for op in [Beta, Beta2, Beta3] {
            assert!(!op.is_additive(), "{op}");
            let mut image = op.table();
            image.sort_unstable();
            assert_eq!(image, [0, 1, 2, 3], "{op} is a bijection");
        }
    }

    #[test]
    fn names_round_trip() {
        for op in F4Operator::ALL {
            assert_eq!(op.name().parse::<F4Operator>().unwrap(), op);
        }
        assert!("gamma".parse::<F4Operator>().is_err());
        assert_eq!("F1_33".parse::<Family>().unwrap(), Family::F1_33);
        assert_eq!(format_f4(2), "10");
    }

    #[test]
    fn family_shapes_and_rows() {
        use F4Operator::*;
        let m = OperatorMatrix::family(Family::F1_33, 1).unwrap();
        assert_eq!((m.k(), m.n()), (4, 7));
        assert_eq!(
            m.grid()[3],
            vec![Zero, Zero, Zero, Zero, One, Alpha, Alpha2]
        );
        assert_eq!(m.grid()[1], vec![Zero, One, Zero, One, Zero, Alpha, Alpha]);

        let m = OperatorMatrix::family(Family::F2_33, 1).unwrap();
        assert_eq!((m.k(), m.n()), (5, 8));
        assert_eq!(m.grid()[3][4..], [One, Zero, Beta, Beta2]);
        assert_eq!(m.grid()[4][4..], [Zero, One, Beta2, Beta]);
        assert_eq!(m.grid()[2][4..], [Zero, Zero, Alpha2, Alpha2]);

        let m = OperatorMatrix::family(Family::F1_34, 2).unwrap();
        assert_eq!((m.k(), m.n()), (7, 12));
        assert_eq!(m.grid()[6][8..], [One, Beta, Beta2, Beta3]);
        assert_eq!(m.grid()[4][4..8], BLOCK_A[1]);
        assert_eq!(m.grid()[4][8..], BLOCK_A[1]);
        assert_eq!(m.grid()[4][..4], [Zero; 4]);

        assert!(OperatorMatrix::family(Family::F1_33, 0).is_err());
    }

    #[test]
    fn encode_examples() {
        let m = OperatorMatrix::family(Family::F1_33, 1).unwrap();
        assert_eq!(m.encode(&[0; 4]).unwrap(), vec![0; 7]);
        let y = m.encode(&[1, 2, 3, 2]).unwrap();
        assert_eq!((y[0], y[1], y[2], y[4]), (1, 2, 3, 2));
        assert!(m.encode(&[0; 3]).is_err());

        let m = OperatorMatrix::family(Family::F1_34, 1).unwrap();
        let y = m.encode(&[0; 4]).unwrap();
        assert_eq!(y, vec![0, 0, 0, 0, 0, 0b01, 0b10, 0b11]);
    }

    #[test]
    fn codebook_matches_encoder() {
        let m = OperatorMatrix::family(Family::F2_33, 1).unwrap();
        let cb = m.codebook(&Budget::default()).unwrap();
        assert_eq!(cb.size(), 1024);
        for idx in [0usize, 1, 77, 1023] {
            let x: Vec<u8> = (0..5).map(|l| (idx >> (2 * l) & 3) as u8).collect();
            assert_eq!(cb.unpack(cb.words()[idx]), m.encode(&x).unwrap());
        }
    }

    #[test]
    fn single_column_custom() {
        let m = OperatorMatrix::custom(vec![vec![F4Operator::One]]).unwrap();
        let cb = m.codebook(&Budget::default()).unwrap();
        assert_eq!(cb.size(), 4);
        assert_eq!(cb.distinct_count(), 4);
        assert!(OperatorMatrix::custom(vec![]).is_err());
    }

    #[test]
    fn discovered_repair_set_uses_block_parity() {
        let m = OperatorMatrix::family(Family::F1_33, 1).unwrap();
        let code = OperatorCode::new(m, &Budget::default()).unwrap();
        assert_eq!(code.r, 3);
        assert_eq!(code.repair_sets[5], Some(vec![4, 6]));
        assert_eq!(code.repair_sets[0].as_ref().map(Vec::len), Some(3));
    }

    #[test]
    fn systematic_coordinates() {
        let m = OperatorMatrix::family(Family::F1_33, 2).unwrap();
        assert_eq!(
            m.systematic_positions(),
            vec![(0, 0), (1, 1), (2, 2), (3, 4), (4, 5), (5, 6), (6, 8)]
        );
    }
}
