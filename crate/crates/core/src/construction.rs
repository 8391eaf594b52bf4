//! Generator-matrix construction of linear LRCs with all-symbol locality.
//!
//! Columns come in repair groups `S_1, .., S_A`. A full group holds `r`
//! chosen vectors followed by their sum; when `n = a(r+1) + b` with `b != 0`
//! the last group holds `b - 1` chosen vectors and their sum. Each chosen
//! vector is drawn so that it, and the running sum it produces, stay out of
//! the span of every admissible `(k-1)`-selection of earlier columns (at
//! most `r` per finished group, at most `j` from the partial group
//! `{g_1, .., g_j, s_j}`). That keeps every admissible selection of at most
//! `k` columns linearly independent.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{prime_power, FieldElement, GaloisField};
use crate::linalg::{binomial, solve, Echelon, FieldMatrix, Solution};

/// `(n, k, r)` plus the field order `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub q: u64,
}

impl CodeParams {
    pub fn new(n: usize, k: usize, r: usize, q: u64) -> Result<Self> {
        check_triple(n, k, r)?;
        if prime_power(q).is_none() {
            return Err(Error::NotPrimePower(q));
        }
        Ok(CodeParams { n, k, r, q })
    }

    /// Number of full groups, `floor(n / (r+1))`.
    pub fn full_groups(&self) -> usize {
        self.n / (self.r + 1)
    }

    /// Size of the trailing partial group, `n mod (r+1)`.
    pub fn remainder(&self) -> usize {
        self.n % (self.r + 1)
    }

    /// Total number of groups, `ceil(n / (r+1))`.
    pub fn group_count(&self) -> usize {
        self.n.div_ceil(self.r + 1)
    }
}

fn check_triple(n: usize, k: usize, r: usize) -> Result<()> {
    if r == 0 || k == 0 {
        return Err(Error::InvalidParams(format!(
            "need r >= 1 and k >= 1, got k = {k}, r = {r}"
        )));
    }
    if r > k {
        return Err(Error::InvalidParams(format!(
            "locality r = {r} exceeds dimension k = {k}"
        )));
    }
    if k >= n {
        return Err(Error::InvalidParams(format!(
            "dimension k = {k} must be below length n = {n}"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Existence {
    /// `d_opt = 0`: no code with these parameters exists.
    Impossible,
    /// `d_opt = 1`: existence is an open case.
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityMode {
    Direct,
    Replicate,
    Infeasible(Existence),
}

impl fmt::Display for FeasibilityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeasibilityMode::Direct => "direct",
            FeasibilityMode::Replicate => "replicate",
            FeasibilityMode::Infeasible(_) => "infeasible",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub mode: FeasibilityMode,
    pub reason: String,
}

/// Classifies `(n, k, r)` for the construction.
pub fn feasibility(n: usize, k: usize, r: usize) -> Result<FeasibilityVerdict> {
    check_triple(n, k, r)?;
    let groups = n.div_ceil(r + 1);
    let b = n % (r + 1);
    if n - groups >= k {
        if b != 1 {
            return Ok(FeasibilityVerdict {
                mode: FeasibilityMode::Direct,
                reason: format!(
                    "n - ceil(n/(r+1)) = {} >= k and n mod (r+1) = {b}",
                    n - groups
                ),
            });
        }
        // n - 1 = a(r+1), and n - 1 - a = n - ceil(n/(r+1)) >= k.
        return Ok(FeasibilityVerdict {
            mode: FeasibilityMode::Replicate,
            reason: format!(
                "n mod (r+1) = 1; ({}, {k}, {r}) is directly constructible and one column is replicated",
                n - 1
            ),
        });
    }
    let bound = crate::analysis::d_opt(n, k, r);
    let (existence, why) = if bound == 0 {
        (Existence::Impossible, "d_opt = 0: no code exists")
    } else {
        (Existence::Unknown, "d_opt = 1: existence unknown")
    };
    Ok(FeasibilityVerdict {
        mode: FeasibilityMode::Infeasible(existence),
        reason: format!("n - ceil(n/(r+1)) + 1 = {} <= k; {why}", n - groups + 1),
    })
}

/// Smallest prime power `q > 2 * C(n, k-1)`.
pub fn minimum_guaranteed_q(n: usize, k: usize) -> u64 {
    let bound = 2 * binomial(n, k.saturating_sub(1));
    let bound = u64::try_from(bound).expect("binomial fits in u64 at supported sizes");
    (bound + 1..)
        .find(|&q| prime_power(q).is_some())
        .expect("prime powers are unbounded")
}

/// Records the column duplicated by the replication path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replication {
    pub source: usize,
    pub copy: usize,
}

/// `y_target = sum(coeffs[i] * y_sources[i])` for every codeword.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairRule {
    pub target: usize,
    pub sources: Vec<usize>,
    pub coeffs: Vec<FieldElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearLrcCode {
    pub params: CodeParams,
    pub generator: FieldMatrix,
    pub groups: Vec<Vec<usize>>,
    pub replication: Option<Replication>,
}

impl LinearLrcCode {
    /// Assembles a code from stored parts, checking shapes only.
    pub fn from_parts(
        params: CodeParams,
        generator: FieldMatrix,
        groups: Vec<Vec<usize>>,
        replication: Option<Replication>,
    ) -> Result<Self> {
        if generator.rows() != params.k || generator.cols() != params.n {
            return Err(Error::Dimension(format!(
                "generator is {}x{}, params say {}x{}",
                generator.rows(),
                generator.cols(),
                params.k,
                params.n
            )));
        }
        if generator.field().order() as u64 != params.q {
            return Err(Error::FieldMismatch);
        }
        let mut seen = vec![false; params.n];
        for &c in groups.iter().flatten() {
            if c >= params.n || std::mem::replace(&mut seen[c], true) {
                return Err(Error::Format(format!(
                    "groups do not partition 0..{}",
                    params.n
                )));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Format(format!(
                "groups do not partition 0..{}",
                params.n
            )));
        }
        if let Some(rep) = replication {
            if rep.source >= params.n || rep.copy >= params.n || rep.source == rep.copy {
                return Err(Error::Format("replication indices out of range".into()));
            }
        }
        Ok(LinearLrcCode {
            params,
            generator,
            groups,
            replication,
        })
    }

    pub fn field(&self) -> &GaloisField {
        self.generator.field()
    }

    pub fn encode(&self, message: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.generator.left_mul(message)
    }

    pub fn group_of(&self, column: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&column))
    }

    /// For each column, the smallest set of fellow group members whose span
    /// contains it, with the combining coefficients. `None` when the group
    /// does not determine the column.
    pub fn repair_rules(&self) -> Vec<Option<RepairRule>> {
        (0..self.params.n)
            .map(|target| {
                let group = &self.groups[self.group_of(target)?];
                let others: Vec<usize> = group.iter().copied().filter(|&c| c != target).collect();
                let col = self.generator.column(target);
                for size in 1..=others.len() {
                    for sources in itertools::Itertools::combinations(others.iter().copied(), size)
                    {
                        let sub = self.generator.select_columns(&sources);
                        let coeffs = match solve(&sub, &col).ok()? {
                            Solution::Unique(x) => x,
                            Solution::Multiple { particular, .. } => particular,
                            Solution::Inconsistent => continue,
                        };
                        return Some(RepairRule {
                            target,
                            sources,
                            coeffs,
                        });
                    }
                }
                None
            })
            .collect()
    }
}

/// Per-vector attempt count used when `max_attempts` is not given.
pub fn default_max_attempts(n: usize) -> usize {
    64 * n
}

/// Builds a code on the direct path.
pub fn build(params: CodeParams, seed: u64, max_attempts: Option<usize>) -> Result<LinearLrcCode> {
    let verdict = feasibility(params.n, params.k, params.r)?;
    if verdict.mode != FeasibilityMode::Direct {
        return Err(Error::WrongPath {
            n: params.n,
            k: params.k,
            r: params.r,
            expected: "direct",
            reason: verdict.reason,
        });
    }
    let field = GaloisField::with_order(params.q)?;
    let mut builder = Builder {
        field: field.clone(),
        params,
        columns: Vec::with_capacity(params.n),
        groups: Vec::with_capacity(params.group_count()),
        rng: ChaCha8Rng::seed_from_u64(seed),
        max_attempts: max_attempts.unwrap_or_else(|| default_max_attempts(params.n)),
    };
    for _ in 0..params.full_groups() {
        builder.add_group(params.r)?;
    }
    if params.remainder() != 0 {
        builder.add_group(params.remainder() - 1)?;
    }
    let generator = FieldMatrix::from_columns(field, params.k, &builder.columns)?;
    let rank = generator.rank();
    if rank != params.k {
        return Err(Error::RankDeficient {
            rank,
            rows: params.k,
        });
    }
    Ok(LinearLrcCode {
        params,
        generator,
        groups: builder.groups,
        replication: None,
    })
}

/// Builds the `(n-1, k, r)` code and duplicates its first column, which
/// joins the first repair group.
pub fn build_with_replication(
    n: usize,
    k: usize,
    r: usize,
    q: u64,
    seed: u64,
) -> Result<LinearLrcCode> {
    let verdict = feasibility(n, k, r)?;
    if verdict.mode != FeasibilityMode::Replicate {
        return Err(Error::WrongPath {
            n,
            k,
            r,
            expected: "replicate",
            reason: verdict.reason,
        });
    }
    let mut code = build(CodeParams::new(n - 1, k, r, q)?, seed, None)?;
    let source = 0;
    let col = code.generator.column(source);
    code.generator.push_column(&col)?;
    code.groups[0].push(n - 1);
    code.params.n = n;
    code.replication = Some(Replication {
        source,
        copy: n - 1,
    });
    Ok(code)
}

/// Builds whichever path `feasibility` selects.
pub fn construct(n: usize, k: usize, r: usize, q: u64, seed: u64) -> Result<LinearLrcCode> {
    match feasibility(n, k, r)?.mode {
        FeasibilityMode::Direct => build(CodeParams::new(n, k, r, q)?, seed, None),
        FeasibilityMode::Replicate => build_with_replication(n, k, r, q, seed),
        FeasibilityMode::Infeasible(_) => Err(Error::WrongPath {
            n,
            k,
            r,
            expected: "direct or replicate",
            reason: feasibility(n, k, r)?.reason,
        }),
    }
}

struct Builder {
    field: GaloisField,
    params: CodeParams,
    columns: Vec<Vec<FieldElement>>,
    groups: Vec<Vec<usize>>,
    rng: ChaCha8Rng,
    max_attempts: usize,
}

impl Builder {
    /// Draws `chosen` vectors for a new group and appends their sum.
    fn add_group(&mut self, chosen: usize) -> Result<()> {
        let k = self.params.k;
        let start = self.columns.len();
        let mut partial: Vec<Vec<FieldElement>> = Vec::with_capacity(chosen);
        let mut sum = vec![0; k];
        for j in 0..chosen {
            let spans = self.admissible_spans(&partial, &sum, j);
            let g = self.draw(&spans, &sum)?;
            sum = add_vec(&self.field, &sum, &g);
            partial.push(g);
        }
        self.columns.extend(partial);
        self.columns.push(sum);
        self.groups.push((start..self.columns.len()).collect());
        Ok(())
    }

    /// Echelon bases of every maximal admissible selection of at most `k-1`
    /// vectors: at most `r` per finished group and at most `j` from
    /// `{g_1, .., g_j, s_j}`.
    fn admissible_spans(
        &self,
        partial: &[Vec<FieldElement>],
        sum: &[FieldElement],
        j: usize,
    ) -> Vec<Echelon> {
        let mut vectors: Vec<&[FieldElement]> = self.columns.iter().map(Vec::as_slice).collect();
        let mut pools: Vec<(Vec<usize>, usize)> = self
            .groups
            .iter()
            .map(|g| (g.clone(), self.params.r.min(g.len())))
            .collect();
        if j > 0 {
            let base = vectors.len();
            vectors.extend(partial.iter().map(Vec::as_slice));
            vectors.push(sum);
            pools.push(((base..=base + j).collect(), j));
        }
        let total: usize = pools.iter().map(|p| p.1).sum();
        let size = (self.params.k - 1).min(total);
        let mut spans = Vec::new();
        for_each_selection(&pools, size, &mut |sel| {
            let mut ech = Echelon::new(self.field.clone());
            for &i in sel {
                ech.insert(vectors[i].to_vec());
            }
            spans.push(ech);
            true
        });
        spans
    }

    fn acceptable(&self, spans: &[Echelon], g: &[FieldElement], sum: &[FieldElement]) -> bool {
        let s = add_vec(&self.field, sum, g);
        spans.iter().all(|e| !e.contains(g) && !e.contains(&s))
    }

    fn draw(&mut self, spans: &[Echelon], sum: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let q = self.field.order();
        let k = self.params.k;
        for _ in 0..self.max_attempts {
            let g: Vec<FieldElement> = (0..k).map(|_| self.rng.gen_range(0..q)).collect();
            if self.acceptable(spans, &g, sum) {
                return Ok(g);
            }
        }
        // Deterministic fallback: lexicographic scan of F_q^k.
        let mut g = vec![0; k];
        loop {
            let mut pos = k;
            loop {
                if pos == 0 {
                    return Err(Error::AttemptsExhausted {
                        q: q as u64,
                        guaranteed_q: minimum_guaranteed_q(self.params.n, k),
                    });
                }
                pos -= 1;
                g[pos] += 1;
                if g[pos] < q {
                    break;
                }
                g[pos] = 0;
            }
            if self.acceptable(spans, &g, sum) {
                return Ok(g);
            }
        }
    }
}

fn add_vec(field: &GaloisField, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect()
}

/// Calls `visit` with every selection of exactly `size` items taking at most
/// `cap` items from each `(items, cap)` pool. Stops early when `visit`
/// returns false; returns false in that case.
pub(crate) fn for_each_selection(
    pools: &[(Vec<usize>, usize)],
    size: usize,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    fn rec(
        pools: &[(Vec<usize>, usize)],
        remaining: usize,
        room_after: &[usize],
        current: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let Some(((items, cap), rest)) = pools.split_first() else {
            return remaining > 0 || visit(current);
        };
        let lo = remaining.saturating_sub(room_after[0]);
        let hi = (*cap).min(items.len()).min(remaining);
        for take in lo..=hi {
            for combo in itertools::Itertools::combinations(items.iter().copied(), take) {
                let len = current.len();
                current.extend(combo);
                let cont = rec(rest, remaining - take, &room_after[1..], current, visit);
                current.truncate(len);
                if !cont {
                    return false;
                }
            }
        }
        true
    }
    // room_after[i] = capacity of pools after index i.
    let caps: Vec<usize> = pools
        .iter()
        .map(|(items, cap)| (*cap).min(items.len()))
        .collect();
    let mut room_after = vec![0; pools.len() + 1];
    for i in (0..pools.len()).rev() {
        room_after[i] = room_after[i + 1] + caps[i];
    }
    if room_after[0] < size {
        return true;
    }
    rec(
        pools,
        size,
        &room_after[1..],
        &mut Vec::with_capacity(size),
        visit,
    )
}

/// Checks that every selection of at most `k` columns, taking at most
/// `min(r, |S| - 1)` from each group `S`, is linearly independent.
pub fn verify_selection_property(code: &LinearLrcCode) -> bool {
    let r = code.params.r;
    let pools: Vec<(Vec<usize>, usize)> = code
        .groups
        .iter()
        .map(|g| (g.clone(), r.min(g.len().saturating_sub(1))))
        .collect();
    let total: usize = pools.iter().map(|p| p.1).sum();
    let size = code.params.k.min(total);
    let columns: Vec<Vec<FieldElement>> = (0..code.params.n)
        .map(|c| code.generator.column(c))
        .collect();
    for_each_selection(&pools, size, &mut |sel| {
        let mut ech = Echelon::new(code.field().clone());
        sel.iter().all(|&c| ech.insert(columns[c].clone()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasibility_examples() {
        assert_eq!(feasibility(8, 4, 3).unwrap().mode, FeasibilityMode::Direct);
        assert_eq!(
            feasibility(7, 4, 2).unwrap().mode,
            FeasibilityMode::Replicate
        );
        assert_eq!(
            feasibility(8, 7, 3).unwrap().mode,
            FeasibilityMode::Infeasible(Existence::Impossible)
        );
        // 7 - 2 + 1 = 6 <= 6 with 4 not dividing 7: d_opt = 7 - 6 - 2 + 2 = 1.
        assert_eq!(
            feasibility(7, 6, 3).unwrap().mode,
            FeasibilityMode::Infeasible(Existence::Unknown)
        );
        assert!(feasibility(8, 3, 4).is_err());
        assert!(feasibility(4, 4, 2).is_err());
        assert_eq!(
            feasibility(5, 2, 1).unwrap().mode,
            FeasibilityMode::Replicate
        );
    }

    #[test]
    fn guaranteed_field_sizes() {
        assert_eq!(minimum_guaranteed_q(8, 4), 113);
        assert_eq!(minimum_guaranteed_q(10, 4), 241);
        assert_eq!(minimum_guaranteed_q(9, 1), 3);
        assert_eq!(minimum_guaranteed_q(9, 5), 256);
        assert_eq!(minimum_guaranteed_q(9, 4), 169);
    }

    #[test]
    fn selection_enumeration_counts() {
        // Two pools of 3 with cap 2, choose 3: 3*3 + 3*3 = 18.
        let pools = vec![(vec![0, 1, 2], 2), (vec![3, 4, 5], 2)];
        let mut count = 0;
        for_each_selection(&pools, 3, &mut |_| {
            count += 1;
            true
        });
        assert_eq!(count, 18);
        let mut none = 0;
        for_each_selection(&pools, 5, &mut |_| {
            none += 1;
            true
        });
        assert_eq!(none, 0);
    }

    #[test]
    fn build_divisible_case() {
        let code = build(CodeParams::new(8, 4, 3, 113).unwrap(), 1, None).unwrap();
        assert_eq!(code.groups, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
        assert_eq!(code.generator.rank(), 4);
        let f = code.field();
        for g in &code.groups {
            let (last, rest) = g.split_last().unwrap();
            for row in 0..4 {
                let s = rest
                    .iter()
                    .fold(0, |acc, &c| f.add(acc, code.generator.get(row, c)));
                assert_eq!(s, code.generator.get(row, *last));
            }
        }
        assert!(verify_selection_property(&code));
    }

    #[test]
    fn build_is_deterministic() {
        let p = CodeParams::new(8, 4, 2, 241).unwrap();
        let a = build(p, 42, None).unwrap();
        let b = build(p, 42, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.groups, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7]]);
        assert_eq!(a.generator.column(6), a.generator.column(7));
        assert!(verify_selection_property(&a));
    }

    #[test]
    fn build_rejects_replicate_path() {
        let err = build(CodeParams::new(5, 2, 1, 5).unwrap(), 0, None).unwrap_err();
        assert!(matches!(
            err,
            Error::WrongPath {
                expected: "direct",
                ..
            }
        ));
    }

    #[test]
    fn replication_appends_source_copy() {
        let code = build_with_replication(7, 4, 2, 241, 3).unwrap();
        assert_eq!(code.params.n, 7);
        assert_eq!(code.generator.column(0), code.generator.column(6));
        assert_eq!(code.groups[0], vec![0, 1, 2, 6]);
        assert!(!verify_selection_property(&code));
    }

    #[test]
    fn small_field_reports_guarantee_when_exhausted() {
        // Over GF(2) the (8,4,3) conditions cannot all be met.
        let err = build(CodeParams::new(8, 4, 3, 2).unwrap(), 0, Some(4)).unwrap_err();
        match err {
            Error::AttemptsExhausted { q, guaranteed_q } => {
                assert_eq!((q, guaranteed_q), (2, 113));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn selection_property_negative_and_k1() {
        let f = GaloisField::with_order(5).unwrap();
        // Repeated column inside one group with cap 2.
        let g = FieldMatrix::from_rows(f.clone(), &[vec![1, 1, 2], vec![2, 2, 4]]).unwrap();
        let params = CodeParams {
            n: 3,
            k: 2,
            r: 2,
            q: 5,
        };
        let code = LinearLrcCode::from_parts(params, g, vec![vec![0, 1, 2]], None).unwrap();
        assert!(!verify_selection_property(&code));

        let params = CodeParams {
            n: 2,
            k: 1,
            r: 1,
            q: 5,
        };
        let ok = FieldMatrix::from_rows(f.clone(), &[vec![3, 3]]).unwrap();
        let code = LinearLrcCode::from_parts(params, ok, vec![vec![0, 1]], None).unwrap();
        assert!(verify_selection_property(&code));
        let zero = FieldMatrix::from_rows(f, &[vec![0, 3]]).unwrap();
        let code = LinearLrcCode::from_parts(params, zero, vec![vec![0, 1]], None).unwrap();
        assert!(!verify_selection_property(&code));
    }

    #[test]
    fn repair_rules_follow_groups() {
        let code = build(CodeParams::new(8, 4, 2, 241).unwrap(), 5, None).unwrap();
        let rules = code.repair_rules();
        for (j, rule) in rules.iter().enumerate() {
            let rule = rule.as_ref().expect("every column is repairable");
            assert_eq!(rule.target, j);
            let expected = if j >= 6 { 1 } else { 2 };
            assert_eq!(rule.sources.len(), expected);
        }
    }
}
