//! Erasure simulation with local (repair-set) and global repair.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::Budget;
use crate::codebook::Codebook;
use crate::codefile::AnyCode;
use crate::construction::RepairRule;
use crate::error::{Error, Result};
use crate::gf::FieldElement;
use crate::linalg::{solve, Solution};

/// A codeword with some coordinates erased.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasedWord {
    symbols: Vec<Option<FieldElement>>,
}

impl ErasedWord {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, j: usize) -> Option<FieldElement> {
        self.symbols[j]
    }

    pub fn symbols(&self) -> &[Option<FieldElement>] {
        &self.symbols
    }

    pub fn known_count(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_some()).count()
    }

    pub fn erased(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.symbols[j].is_none())
            .collect()
    }
}

/// Marks `positions` of `y` as erased. Erasing everything is allowed here;
/// repair then fails with [`Error::NothingKnown`].
pub fn erase(y: &[FieldElement], positions: &[usize]) -> Result<ErasedWord> {
    let mut symbols: Vec<Option<FieldElement>> = y.iter().copied().map(Some).collect();
    for &p in positions {
        *symbols.get_mut(p).ok_or_else(|| {
            Error::Dimension(format!("erasure position {p} outside 0..{}", y.len()))
        })? = None;
    }
    Ok(ErasedWord { symbols })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Known,
    Local,
    Global,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairOutcome {
    pub word: Vec<Option<FieldElement>>,
    pub methods: Vec<Method>,
    /// Symbols read to recover each coordinate; 0 for known ones.
    pub reads: Vec<usize>,
}

impl RepairOutcome {
    pub fn is_complete(&self) -> bool {
        self.word.iter().all(Option::is_some)
    }

    pub fn codeword(&self) -> Option<Vec<FieldElement>> {
        self.word.iter().copied().collect()
    }

    pub fn count(&self, method: Method) -> usize {
        self.methods.iter().filter(|&&m| m == method).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlobalDecode {
    Unique(Vec<FieldElement>),
    /// At least two codewords match the known symbols.
    Ambiguous {
        consistent: u128,
    },
}

enum Prepared {
    Linear {
        rules: Vec<Option<RepairRule>>,
    },
    Operator {
        codebook: Codebook,
        tables: Vec<Option<(Vec<usize>, HashMap<u64, u8>)>>,
    },
}

/// A code prepared for repeated repair: linear repair rules from the group
/// structure, or lookup tables for the cached functional repair sets.
pub struct RepairContext<'a> {
    code: &'a AnyCode,
    prepared: Prepared,
}

impl<'a> RepairContext<'a> {
    pub fn new(code: &'a AnyCode, budget: &Budget) -> Result<Self> {
        let prepared = match code {
            AnyCode::Linear(c) => Prepared::Linear {
                rules: c.repair_rules(),
            },
            AnyCode::Operator(c) => {
                let codebook = c.matrix.codebook(budget)?;
                let tables = c
                    .repair_sets
                    .iter()
                    .enumerate()
                    .map(|(j, set)| {
                        set.as_ref()
                            .map(|set| {
                                codebook
                                    .repair_table(set, j)
                                    .map(|t| (set.clone(), t))
                                    .ok_or_else(|| {
                                        Error::Format(format!(
                                            "repair set {set:?} does not determine coordinate {j}"
                                        ))
                                    })
                            })
                            .transpose()
                    })
                    .collect::<Result<_>>()?;
                Prepared::Operator { codebook, tables }
            }
        };
        Ok(RepairContext { code, prepared })
    }

    pub fn code(&self) -> &AnyCode {
        self.code
    }

    /// Coordinates read when repairing `j` locally, if it has a repair set.
    pub fn repair_set(&self, j: usize) -> Option<&[usize]> {
        match &self.prepared {
            Prepared::Linear { rules } => rules[j].as_ref().map(|r| r.sources.as_slice()),
            Prepared::Operator { tables, .. } => tables[j].as_ref().map(|t| t.0.as_slice()),
        }
    }

    fn local_value(&self, j: usize, word: &[Option<FieldElement>]) -> Option<FieldElement> {
        match &self.prepared {
            Prepared::Linear { rules } => {
                let rule = rules[j].as_ref()?;
                let AnyCode::Linear(code) = self.code else {
                    unreachable!()
                };
                let f = code.field();
                rule.sources
                    .iter()
                    .zip(&rule.coeffs)
                    .try_fold(0, |acc, (&s, &c)| Some(f.add(acc, f.mul(c, word[s]?))))
            }
            Prepared::Operator { codebook, tables } => {
                let (set, table) = tables[j].as_ref()?;
                let mut key = 0u64;
                for &s in set {
                    key |= (word[s]? as u64) << (codebook.bits() as usize * s);
                }
                table.get(&key).map(|&v| v as FieldElement)
            }
        }
    }

    /// Repairs erased coordinates whose repair set is fully known, repeating
    /// until nothing changes. Unrepaired coordinates are marked failed.
    pub fn repair_local(&self, w: &ErasedWord) -> Result<RepairOutcome> {
        if w.known_count() == 0 {
            return Err(Error::NothingKnown);
        }
        let mut word = w.symbols.clone();
        let mut methods: Vec<Method> = word
            .iter()
            .map(|s| {
                if s.is_some() {
                    Method::Known
                } else {
                    Method::Failed
                }
            })
            .collect();
        let mut reads = vec![0; word.len()];
        loop {
            let mut changed = false;
            for j in 0..word.len() {
                if word[j].is_some() {
                    continue;
                }
                if let Some(v) = self.local_value(j, &word) {
                    word[j] = Some(v);
                    methods[j] = Method::Local;
                    reads[j] = self.repair_set(j).map_or(0, <[usize]>::len);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(RepairOutcome {
            word,
            methods,
            reads,
        })
    }

    /// Recovers the whole codeword from the known coordinates alone, or
    /// reports how many codewords are consistent with them.
    pub fn decode_global(&self, w: &ErasedWord) -> Result<GlobalDecode> {
        let known: Vec<usize> = (0..w.len()).filter(|&j| w.symbols[j].is_some()).collect();
        if known.is_empty() {
            return Err(Error::NothingKnown);
        }
        let inconsistent = || Error::InvalidParams("known symbols match no codeword".into());
        match (&self.prepared, self.code) {
            (Prepared::Linear { .. }, AnyCode::Linear(code)) => {
                let a = code.generator.select_columns(&known).transpose();
                let b: Vec<FieldElement> = known.iter().map(|&j| w.symbols[j].unwrap()).collect();
                match solve(&a, &b)? {
                    Solution::Unique(x) => Ok(GlobalDecode::Unique(code.encode(&x)?)),
                    Solution::Multiple { free, .. } => Ok(GlobalDecode::Ambiguous {
                        consistent: (code.params.q as u128).saturating_pow(free as u32),
                    }),
                    Solution::Inconsistent => Err(inconsistent()),
                }
            }
            (Prepared::Operator { codebook, .. }, _) => {
                let mask = codebook.coordinate_mask(known.iter().copied());
                let target = known.iter().fold(0u64, |acc, &j| {
                    acc | (w.symbols[j].unwrap() as u64) << (codebook.bits() as usize * j)
                });
                let mut matches = codebook.words().iter().filter(|&&c| c & mask == target);
                let first = *matches.next().ok_or_else(inconsistent)?;
                let rest = matches.count() as u128;
                if rest == 0 {
                    Ok(GlobalDecode::Unique(
                        codebook
                            .unpack(first)
                            .into_iter()
                            .map(FieldElement::from)
                            .collect(),
                    ))
                } else {
                    Ok(GlobalDecode::Ambiguous {
                        consistent: rest + 1,
                    })
                }
            }
            _ => unreachable!("prepared state follows the code kind"),
        }
    }

    /// Local repair, then a global decode when symbols remain erased.
    pub fn repair(&self, w: &ErasedWord) -> Result<RepairOutcome> {
        let mut outcome = self.repair_local(w)?;
        if outcome.is_complete() {
            return Ok(outcome);
        }
        let partial = ErasedWord {
            symbols: outcome.word.clone(),
        };
        if let GlobalDecode::Unique(y) = self.decode_global(&partial)? {
            let used = partial.known_count();
            for j in 0..y.len() {
                if outcome.word[j].is_none() {
                    outcome.word[j] = Some(y[j]);
                    outcome.methods[j] = Method::Global;
                    outcome.reads[j] = used;
                }
            }
        }
        Ok(outcome)
    }

    pub fn random_codeword<R: Rng>(&self, rng: &mut R) -> Result<Vec<FieldElement>> {
        match (&self.prepared, self.code) {
            (Prepared::Operator { codebook, .. }, _) => {
                let w = codebook.words()[rng.gen_range(0..codebook.size())];
                Ok(codebook
                    .unpack(w)
                    .into_iter()
                    .map(FieldElement::from)
                    .collect())
            }
            (_, AnyCode::Linear(code)) => {
                let q = code.field().order();
                let x: Vec<FieldElement> =
                    (0..code.params.k).map(|_| rng.gen_range(0..q)).collect();
                code.encode(&x)
            }
            _ => unreachable!("prepared state follows the code kind"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trials: usize,
    pub erasures: usize,
    /// Fraction of trials where local repair alone restored every erasure.
    pub local_rate: f64,
    /// Fraction of trials where the known symbols determine the codeword.
    pub global_rate: f64,
    /// Mean symbols read per locally repaired coordinate.
    pub mean_reads: f64,
    pub seed: u64,
}

/// Runs `trials` independent trials, each erasing `erasures` random
/// positions of a random codeword. Trial `t` draws from stream `t` of the
/// seeded generator, so results do not depend on scheduling.
pub fn simulate(
    code: &AnyCode,
    trials: usize,
    erasures: usize,
    seed: u64,
    budget: &Budget,
) -> Result<SimulationReport> {
    let n = code.n();
    if erasures >= n {
        return Err(Error::InvalidParams(format!(
            "erasure count {erasures} must be below n = {n}"
        )));
    }
    let ctx = RepairContext::new(code, budget)?;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let y = ctx.random_codeword(&mut rng)?;
            let positions = sample(&mut rng, n, erasures).into_vec();
            let w = erase(&y, &positions)?;
            let local = ctx.repair_local(&w)?;
            let local_ok = local.codeword().as_ref() == Some(&y);
            let reads: usize = (0..n)
                .filter(|&j| local.methods[j] == Method::Local)
                .map(|j| local.reads[j])
                .sum();
            let global_ok =
                matches!(ctx.decode_global(&w)?, GlobalDecode::Unique(ref z) if *z == y);
            Ok((local_ok, global_ok, reads, local.count(Method::Local)))
        })
        .collect::<Result<Vec<_>>>()?;
    let rate = |hits: usize| {
        if trials == 0 {
            0.0
        } else {
            hits as f64 / trials as f64
        }
    };
    let local_hits = per_trial.iter().filter(|t| t.0).count();
    let global_hits = per_trial.iter().filter(|t| t.1).count();
    let reads: usize = per_trial.iter().map(|t| t.2).sum();
    let repaired: usize = per_trial.iter().map(|t| t.3).sum();
    Ok(SimulationReport {
        trials,
        erasures,
        local_rate: rate(local_hits),
        global_rate: rate(global_hits),
        mean_reads: if repaired == 0 {
            0.0
        } else {
            reads as f64 / repaired as f64
        },
        seed,
    })
}
