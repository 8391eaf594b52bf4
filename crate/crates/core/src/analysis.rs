//! Distance bounds, distance and locality oracles, and predicted-distance
//! rules for the construction.

use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codebook::Codebook;
use crate::construction::{
    construct, feasibility, minimum_guaranteed_q, FeasibilityMode, LinearLrcCode,
};
use crate::error::{Error, Result};
use crate::gf::GaloisField;
use crate::linalg::{binomial, circuits_within, parity_check, Echelon, FieldMatrix};

/// Operation limits for the exhaustive oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Codewords enumerated from messages (`q^k`).
    pub enumeration: u128,
    /// Codeword pair comparisons.
    pub pairwise: u128,
    /// Column subsets tested during circuit enumeration, and union-search nodes.
    pub circuits: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            enumeration: 1 << 28,
            pairwise: 1 << 30,
            circuits: 1 << 26,
        }
    }
}

/// `max(n - k - ceil(k/r) + 2, 0)`.
pub fn d_opt(n: usize, k: usize, r: usize) -> usize {
    let v = n as i64 - k as i64 - k.div_ceil(r) as i64 + 2;
    v.max(0) as usize
}

fn frac(x: Ratio<i64>) -> Ratio<i64> {
    x - x.floor()
}

/// `n - k - floor(k/r - n/(r+1)) - floor(n/(r+1))`, in exact arithmetic.
pub fn group_union_lower_bound(n: usize, k: usize, r: usize) -> i64 {
    let (n, k, r) = (n as i64, k as i64, r as i64);
    let diff = Ratio::new(k, r) - Ratio::new(n, r + 1);
    n - k - diff.floor().to_integer() - n.div_euclid(r + 1)
}

/// `{k/r} < {n/(r+1)}` and `r` does not divide `k`.
pub fn fractional_condition(n: usize, k: usize, r: usize) -> bool {
    let (n, k, r) = (n as i64, k as i64, r as i64);
    k % r != 0 && frac(Ratio::new(k, r)) < frac(Ratio::new(n, r + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictionRule {
    /// `(r+1) | n` on the direct path: distance equals `d_opt`.
    Divisible,
    /// `{k/r} < {n/(r+1)}`, `r` not dividing `k`: distance equals `d_opt`.
    Fractional,
    /// Direct path with a trailing group of size at least two: `d_opt - 1`
    /// tightened by the group-union lower bound.
    GroupUnion,
    /// Replication path: within one of `d_opt`.
    Replicated,
    /// Outside the construction; `d_opt <= 1`.
    Infeasible,
}

impl fmt::Display for PredictionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PredictionRule::Divisible => "divisible",
            PredictionRule::Fractional => "fractional",
            PredictionRule::GroupUnion => "group-union",
            PredictionRule::Replicated => "replicated",
            PredictionRule::Infeasible => "infeasible",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRange {
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    pub rule: PredictionRule,
}

impl PredictionRange {
    pub fn contains(&self, d: usize) -> bool {
        (self.lower..=self.upper).contains(&d)
    }
}

/// Distance the construction is guaranteed to reach for `(n, k, r)` over a
/// field above the guaranteed size.
pub fn predicted_distance(n: usize, k: usize, r: usize) -> Result<PredictionRange> {
    let mode = feasibility(n, k, r)?.mode;
    let upper = d_opt(n, k, r);
    let exact = |rule| PredictionRange {
        lower: upper,
        upper,
        exact: true,
        rule,
    };
    if n.is_multiple_of(r + 1) && mode == FeasibilityMode::Direct {
        return Ok(exact(PredictionRule::Divisible));
    }
    if fractional_condition(n, k, r) {
        return Ok(exact(PredictionRule::Fractional));
    }
    let almost = upper.saturating_sub(1);
    let (lower, rule) = match mode {
        FeasibilityMode::Direct => {
            let bound = group_union_lower_bound(n, k, r).max(0) as usize;
            (almost.max(bound), PredictionRule::GroupUnion)
        }
        FeasibilityMode::Replicate => (almost, PredictionRule::Replicated),
        FeasibilityMode::Infeasible(_) => (almost, PredictionRule::Infeasible),
    };
    Ok(PredictionRange {
        lower,
        upper,
        exact: lower == upper,
        rule,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistancePath {
    /// Minimum weight over all messages, one per projective point.
    Messages,
    /// Smallest dependent column set of the parity-check matrix.
    ParityCheck,
}

fn message_cost(q: u128, k: usize, n: usize) -> Option<u128> {
    let total = q.checked_pow(k as u32)?;
    Some(total / (q - 1).max(1) * n as u128)
}

fn parity_cost(n: usize, k: usize) -> u128 {
    let redundancy = (n - k) as u128;
    (1..=n - k + 1)
        .map(|s| binomial(n, s) * s as u128 * redundancy.max(1) * redundancy.max(1))
        .sum()
}

/// Picks the cheaper exhaustive path that fits the budget.
pub fn choose_distance_path(g: &FieldMatrix, budget: &Budget) -> Result<DistancePath> {
    let (k, n) = (g.rows(), g.cols());
    let q = g.field().order() as u128;
    let messages = q
        .checked_pow(k as u32)
        .filter(|&total| total <= budget.enumeration)
        .and_then(|_| message_cost(q, k, n));
    let parity = Some(parity_cost(n, k)).filter(|&c| c <= budget.enumeration);
    match (messages, parity) {
        (Some(m), Some(p)) if p < m => Ok(DistancePath::ParityCheck),
        (Some(_), _) => Ok(DistancePath::Messages),
        (None, Some(_)) => Ok(DistancePath::ParityCheck),
        (None, None) => Err(Error::BudgetExceeded {
            what: "minimum distance",
            needed: q.saturating_pow(k as u32).min(parity_cost(n, k)),
            budget: budget.enumeration,
        }),
    }
}

/// Minimum distance of the code generated by `g` (rank `k` assumed), by the
/// cheaper exhaustive path.
pub fn min_distance_bruteforce(g: &FieldMatrix, budget: &Budget) -> Result<usize> {
    match choose_distance_path(g, budget)? {
        DistancePath::Messages => Ok(min_distance_messages(g)),
        DistancePath::ParityCheck => min_distance_parity(g),
    }
}

/// Minimum Hamming weight over all nonzero messages. Scalar multiples share
/// a weight, so only messages whose leading nonzero entry is 1 are visited.
pub fn min_distance_messages(g: &FieldMatrix) -> usize {
    let (k, n) = (g.rows(), g.cols());
    let field = g.field();
    let q = field.order();
    let rows: Vec<&[u32]> = (0..k).map(|r| g.row(r)).collect();
    // One job per (leading position, value of the next coordinate).
    let mut jobs = Vec::new();
    for lead in 0..k {
        if lead + 1 < k {
            jobs.extend((0..q).map(|v| (lead, Some(v))));
        } else {
            jobs.push((lead, None));
        }
    }
    jobs.par_iter()
        .map(|&(lead, second)| {
            let mut base = rows[lead].to_vec();
            let mut first_free = lead + 1;
            if let Some(v) = second {
                add_scaled(field, &mut base, rows[lead + 1], v);
                first_free += 1;
            }
            let free = k - first_free;
            let mut digits = vec![0u32; free];
            let mut word = base.clone();
            let mut best = weight(&word);
            loop {
                // odometer over the free coordinates
                let mut pos = free;
                loop {
                    if pos == 0 {
                        return best;
                    }
                    pos -= 1;
                    let old = digits[pos];
                    let new = if old + 1 == q { 0 } else { old + 1 };
                    digits[pos] = new;
                    let delta = field.sub(new, old);
                    add_scaled(field, &mut word, rows[first_free + pos], delta);
                    if new != 0 {
                        break;
                    }
                }
                best = best.min(weight(&word));
            }
        })
        .min()
        .unwrap_or(n)
}

fn add_scaled(field: &GaloisField, acc: &mut [u32], row: &[u32], scale: u32) {
    if scale == 0 {
        return;
    }
    for (a, &x) in acc.iter_mut().zip(row) {
        *a = field.add(*a, field.mul(scale, x));
    }
}

fn weight(word: &[u32]) -> usize {
    word.iter().filter(|&&x| x != 0).count()
}

/// Smallest number of linearly dependent columns of the parity-check matrix.
pub fn min_distance_parity(g: &FieldMatrix) -> Result<usize> {
    let n = g.cols();
    let h = parity_check(g)?;
    if h.rows() == 0 {
        return Ok(1);
    }
    let columns: Vec<Vec<u32>> = (0..n).map(|c| h.column(c)).collect();
    for s in 1..=h.rows() + 1 {
        let subsets: Vec<Vec<usize>> = itertools::Itertools::combinations(0..n, s).collect();
        let dependent = subsets.par_iter().any(|set| {
            let mut ech = Echelon::new(h.field().clone());
            !set.iter().all(|&c| ech.insert(columns[c].clone()))
        });
        if dependent {
            return Ok(s);
        }
    }
    unreachable!("any n-k+1 columns of an (n-k)-row matrix are dependent")
}

/// Distance from the circuit structure: `n - k - mu + 2`, where `mu` is the
/// least positive `m` such that every nontrivial union of `m` circuits has
/// at least `m + k` columns.
///
/// A nontrivial union containing a circuit of size `k + 1` already has at
/// least `k + m` columns (each other circuit contributes a private column),
/// so only circuits of size at most `k` are enumerated.
pub fn min_distance_circuits(g: &FieldMatrix, budget: &Budget) -> Result<usize> {
    let (k, n) = (g.rows(), g.cols());
    let small: Vec<u64> = circuits_within(g, k, budget.circuits)?
        .iter()
        .map(|c| c.mask())
        .collect();
    let mut nodes = 0u128;
    let mut mu = 1;
    while mu <= small.len() {
        if !small_union_exists(&small, mu, k, &mut nodes, budget.circuits)? {
            break;
        }
        mu += 1;
    }
    Ok(n + 2 - k - mu)
}

/// Whether some nontrivial union of `m` circuits covers fewer than `m + k` columns.
fn small_union_exists(
    circuits: &[u64],
    m: usize,
    k: usize,
    nodes: &mut u128,
    budget: u128,
) -> Result<bool> {
    fn dfs(
        circuits: &[u64],
        start: usize,
        chosen: &mut Vec<u64>,
        union: u64,
        m: usize,
        k: usize,
        nodes: &mut u128,
        budget: u128,
    ) -> Result<bool> {
        if chosen.len() == m {
            return Ok(true);
        }
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::BudgetExceeded {
                what: "circuit union search",
                needed: *nodes,
                budget,
            });
        }
        for i in start..circuits.len() {
            let c = circuits[i];
            let grown = union | c;
            // each remaining circuit adds at least one private column
            let remaining = (m - chosen.len() - 1) as u32;
            if grown.count_ones() + remaining >= (m + k) as u32 {
                continue;
            }
            if c & !union == 0 {
                continue;
            }
            let keeps_private = chosen.iter().enumerate().all(|(j, &cj)| {
                let others = chosen
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != j)
                    .fold(c, |acc, (_, &x)| acc | x);
                cj & !others != 0
            });
            if !keeps_private {
                continue;
            }
            chosen.push(c);
            let found = dfs(circuits, i + 1, chosen, grown, m, k, nodes, budget)?;
            chosen.pop();
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }
    dfs(
        circuits,
        0,
        &mut Vec::with_capacity(m),
        0,
        m,
        k,
        nodes,
        budget,
    )
}

/// Largest, over columns, of the fewest other columns spanning it; the
/// sentinel `r_target + 1` when some column needs more than `r_target`.
pub fn locality_linear(g: &FieldMatrix, r_target: usize) -> usize {
    let n = g.cols();
    let columns: Vec<Vec<u32>> = (0..n).map(|c| g.column(c)).collect();
    (0..n)
        .into_par_iter()
        .map(|j| {
            let others: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            (1..=r_target.min(others.len()))
                .find(|&s| {
                    itertools::Itertools::combinations(others.iter(), s).any(|set| {
                        let mut ech = Echelon::new(g.field().clone());
                        for &c in set {
                            ech.insert(columns[c].clone());
                        }
                        ech.contains(&columns[j])
                    })
                })
                .unwrap_or(r_target + 1)
        })
        .max()
        .unwrap_or(0)
}

/// For each coordinate, the first smallest set of at most `r_target` other
/// coordinates that functionally determines it across the codebook.
pub fn functional_repair_sets(codebook: &Codebook, r_target: usize) -> Vec<Option<Vec<usize>>> {
    let n = codebook.len();
    (0..n)
        .into_par_iter()
        .map(|j| {
            let others: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            (1..=r_target.min(others.len())).find_map(|s| {
                itertools::Itertools::combinations(others.iter().copied(), s)
                    .find(|set| codebook.determines(set, j))
            })
        })
        .collect()
}

/// Functional all-symbol locality, or `r_target + 1` when some coordinate
/// has no repair set within `r_target`.
pub fn locality_functional(codebook: &Codebook, r_target: usize) -> usize {
    functional_repair_sets(codebook, r_target)
        .iter()
        .map(|s| s.as_ref().map_or(r_target + 1, Vec::len))
        .max()
        .unwrap_or(0)
}

/// Minimum pairwise distance of a codebook after checking that it has no
/// repeated codewords.
pub fn min_distance_codebook(codebook: &Codebook, messages: u64, budget: &Budget) -> Result<usize> {
    let distinct = codebook.distinct_count() as u64;
    if distinct != messages {
        return Err(Error::NotInjective { distinct, messages });
    }
    let size = codebook.size() as u128;
    let pairs = size * size.saturating_sub(1) / 2;
    let d = if pairs <= budget.pairwise {
        codebook.min_distance_pairwise()
    } else {
        // Projection search, one deletion size at a time while the
        // cumulative cost stays within budget.
        let limit = budget.pairwise.saturating_mul(4);
        let mut found = None;
        for t in 0..=codebook.len() {
            let cost = codebook.projection_cost(t);
            if cost > limit {
                return Err(Error::BudgetExceeded {
                    what: "codebook distance",
                    needed: cost,
                    budget: limit,
                });
            }
            if codebook.collides_without(t) {
                found = Some(t);
                break;
            }
        }
        found
    };
    Ok(d.unwrap_or(codebook.len()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Optimal,
    AlmostOptimal,
    Below,
    Invalid,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Optimal => "optimal",
            Verdict::AlmostOptimal => "almost-optimal",
            Verdict::Below => "below",
            Verdict::Invalid => "invalid",
        })
    }
}

/// Measured parameters of a code against the locality bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeReport {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// Measured all-symbol locality; `k + 1` means some symbol has none within `k`.
    pub r: usize,
    /// Bound at the measured locality.
    pub d_opt: usize,
    pub verdict: Verdict,
    /// Whether the circuit-based distance was computed and agreed.
    pub cross_checked: bool,
}

impl CodeReport {
    fn classify(n: usize, k: usize, d: usize, r: usize, cross_checked: bool) -> Result<Self> {
        if r > k {
            return Ok(CodeReport {
                n,
                k,
                d,
                r,
                d_opt: d_opt(n, k, k),
                verdict: Verdict::Invalid,
                cross_checked,
            });
        }
        let bound = d_opt(n, k, r);
        if d > bound {
            return Err(Error::BoundViolation { d, d_opt: bound });
        }
        let verdict = if d == bound {
            Verdict::Optimal
        } else if d + 1 == bound {
            Verdict::AlmostOptimal
        } else {
            Verdict::Below
        };
        Ok(CodeReport {
            n,
            k,
            d,
            r,
            d_opt: bound,
            verdict,
            cross_checked,
        })
    }

    pub fn gap(&self) -> usize {
        self.d_opt.saturating_sub(self.d)
    }
}

impl fmt::Display for CodeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(n, k, d, r) = ({}, {}, {}, {}), d_opt = {}, verdict {}",
            self.n, self.k, self.d, self.r, self.d_opt, self.verdict
        )
    }
}

/// Measures a linear code. Both distance oracles must agree; when the
/// circuit oracle is over budget the report says so in `cross_checked`.
pub fn analyze_linear(code: &LinearLrcCode, budget: &Budget) -> Result<CodeReport> {
    let g = &code.generator;
    let (k, n) = (g.rows(), g.cols());
    let rank = g.rank();
    if rank != k {
        return Err(Error::RankDeficient { rank, rows: k });
    }
    let d = min_distance_bruteforce(g, budget)?;
    let cross_checked = match min_distance_circuits(g, budget) {
        Ok(dc) if dc == d => true,
        Ok(dc) => {
            return Err(Error::OracleDisagreement {
                bruteforce: d,
                circuits: dc,
            })
        }
        Err(Error::BudgetExceeded { .. }) => false,
        Err(e) => return Err(e),
    };
    let r = locality_linear(g, k);
    CodeReport::classify(n, k, d, r, cross_checked)
}

/// Measures a code given as its full codebook of `q^k` words.
pub fn analyze_codebook(codebook: &Codebook, k: usize, budget: &Budget) -> Result<CodeReport> {
    let messages = 1u64 << (codebook.bits() as usize * k);
    let d = min_distance_codebook(codebook, messages, budget)?;
    let r = locality_functional(codebook, k);
    CodeReport::classify(codebook.len(), k, d, r, false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldPolicy {
    /// Smallest prime power above `2 * C(n, k-1)`.
    Guaranteed,
    Fixed(u64),
}

/// One line of the sweep report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub q: u64,
    pub mode: String,
    pub d_opt: usize,
    pub pred_lo: usize,
    pub pred_hi: usize,
    pub rule: PredictionRule,
    pub d_measured: Option<usize>,
    pub r_measured: Option<usize>,
    pub verdict: Option<Verdict>,
    pub seed: u64,
    pub in_range: bool,
    pub cross_checked: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Constructs and measures every valid triple with `r <= k < n <= n_max`.
/// Failures are recorded per row.
pub fn sweep(n_max: usize, policy: FieldPolicy, seed: u64, budget: &Budget) -> Vec<SweepRow> {
    let triples: Vec<(usize, usize, usize)> = (2..=n_max)
        .flat_map(|n| (1..n).flat_map(move |k| (1..=k).map(move |r| (n, k, r))))
        .collect();
    triples
        .par_iter()
        .map(|&(n, k, r)| sweep_row(n, k, r, policy, seed, budget))
        .collect()
}

fn sweep_row(
    n: usize,
    k: usize,
    r: usize,
    policy: FieldPolicy,
    seed: u64,
    budget: &Budget,
) -> SweepRow {
    let q = match policy {
        FieldPolicy::Guaranteed => minimum_guaranteed_q(n, k),
        FieldPolicy::Fixed(q) => q,
    };
    let verdict = feasibility(n, k, r).expect("sweep only visits valid triples");
    let pred = predicted_distance(n, k, r).expect("valid triple");
    let mut row = SweepRow {
        n,
        k,
        r,
        q,
        mode: verdict.mode.to_string(),
        d_opt: d_opt(n, k, r),
        pred_lo: pred.lower,
        pred_hi: pred.upper,
        rule: pred.rule,
        d_measured: None,
        r_measured: None,
        verdict: None,
        seed,
        in_range: true,
        cross_checked: false,
        error: None,
    };
    if let FeasibilityMode::Infeasible(_) = verdict.mode {
        return row;
    }
    match construct(n, k, r, q, seed).and_then(|code| analyze_linear(&code, budget)) {
        Ok(report) => {
            row.d_measured = Some(report.d);
            row.r_measured = Some(report.r);
            row.verdict = Some(report.verdict);
            row.cross_checked = report.cross_checked;
            row.in_range = pred.contains(report.d) && report.r <= r;
        }
        Err(e) => {
            row.in_range = false;
            row.error = Some(e.to_string());
        }
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build, CodeParams};

    #[test]
    fn bound_examples() {
        assert_eq!(d_opt(7, 4, 3), 3);
        assert_eq!(d_opt(10, 4, 3), 6);
        assert_eq!(d_opt(9, 5, 5), 9 - 5 + 1);
        assert_eq!(d_opt(8, 7, 3), 0);
        assert_eq!(group_union_lower_bound(8, 4, 2), 3);
    }

    #[test]
    fn d_opt_non_increasing_in_k() {
        for n in 2..=12 {
            for r in 1..n {
                for k in r..n - 1 {
                    assert!(d_opt(n, k + 1, r) <= d_opt(n, k, r));
                }
            }
        }
    }

    #[test]
    fn prediction_examples() {
        let p = predicted_distance(8, 4, 3).unwrap();
        assert_eq!(
            (p.lower, p.upper, p.exact, p.rule),
            (4, 4, true, PredictionRule::Divisible)
        );
        let p = predicted_distance(10, 4, 3).unwrap();
        assert_eq!(
            (p.lower, p.upper, p.exact, p.rule),
            (6, 6, true, PredictionRule::Fractional)
        );
        let p = predicted_distance(8, 4, 2).unwrap();
        assert_eq!(
            (p.lower, p.upper, p.exact, p.rule),
            (3, 4, false, PredictionRule::GroupUnion)
        );
        let p = predicted_distance(7, 4, 2).unwrap();
        assert_eq!(
            (p.lower, p.upper, p.rule),
            (2, 3, PredictionRule::Replicated)
        );
    }

    #[test]
    fn fractional_condition_is_exact() {
        // {4/3} = 1/3 < {10/4} = 1/2
        assert!(fractional_condition(10, 4, 3));
        // {2/2} = 0 but r | k
        assert!(!fractional_condition(7, 2, 2));
        // {4/3} = 1/3 < {11/4} = 3/4, but {9/4} = 1/4 < 1/3
        assert!(fractional_condition(11, 4, 3));
        assert!(!fractional_condition(9, 4, 3));
    }

    #[test]
    fn repetition_code_distance() {
        let f = GaloisField::with_order(5).unwrap();
        let g = FieldMatrix::from_rows(f, &[vec![1, 2, 3, 4, 1]]).unwrap();
        assert_eq!(min_distance_messages(&g), 5);
        assert_eq!(min_distance_parity(&g).unwrap(), 5);
        assert_eq!(min_distance_circuits(&g, &Budget::default()).unwrap(), 5);
    }

    #[test]
    fn both_paths_agree_on_constructed_code() {
        let code = build(CodeParams::new(8, 4, 3, 113).unwrap(), 7, None).unwrap();
        let g = &code.generator;
        assert_eq!(min_distance_messages(g), 4);
        assert_eq!(min_distance_parity(g).unwrap(), 4);
        assert_eq!(min_distance_circuits(g, &Budget::default()).unwrap(), 4);
        let report = analyze_linear(&code, &Budget::default()).unwrap();
        assert_eq!((report.d, report.r, report.d_opt), (4, 3, 4));
        assert_eq!(report.verdict, Verdict::Optimal);
        assert!(report.cross_checked);
    }

    #[test]
    fn locality_examples() {
        let f = GaloisField::with_order(7).unwrap();
        assert_eq!(locality_linear(&FieldMatrix::identity(f.clone(), 3), 3), 4);
        let dup = FieldMatrix::from_rows(f, &[vec![1, 1, 0, 0], vec![0, 0, 1, 1]]).unwrap();
        assert_eq!(locality_linear(&dup, 2), 1);
    }

    #[test]
    fn functional_locality_of_repetition() {
        let words = (0..4u8).map(|a| Codebook::pack(2, &[a, a])).collect();
        let cb = Codebook::new(2, 2, words).unwrap();
        assert_eq!(locality_functional(&cb, 1), 1);
        assert_eq!(
            functional_repair_sets(&cb, 1),
            vec![Some(vec![1]), Some(vec![0])]
        );
    }

    #[test]
    fn over_budget_is_reported() {
        let code = build(CodeParams::new(8, 4, 3, 113).unwrap(), 7, None).unwrap();
        let tiny = Budget {
            enumeration: 10,
            pairwise: 10,
            circuits: 10,
        };
        assert!(matches!(
            min_distance_bruteforce(&code.generator, &tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
