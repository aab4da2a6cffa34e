//! Boolean CSP instances given by explicit satisfying patterns, plus the
//! transforms applied before the FGLSS step: gap amplification by AND-ing
//! sampled clauses, and clause duplication.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::caps::{ensure, Caps};
use crate::error::{Error, Result};
use crate::seed;

pub const MAX_ARITY: usize = 64;

/// A clause over an ordered tuple of distinct variables. Pattern bit `k`
/// holds the value of `vars[k]`; `satisfying` is sorted and duplicate free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ClauseJson", into = "ClauseJson")]
pub struct Clause {
    vars: Vec<usize>,
    satisfying: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ClauseJson {
    vars: Vec<usize>,
    satisfying: Vec<String>,
}

impl TryFrom<ClauseJson> for Clause {
    type Error = Error;

    fn try_from(json: ClauseJson) -> Result<Self> {
        let arity = json.vars.len();
        let patterns = json
            .satisfying
            .iter()
            .map(|text| parse_pattern(text, arity))
            .collect::<Result<Vec<_>>>()?;
        Clause::new(json.vars, patterns)
    }
}

impl From<Clause> for ClauseJson {
    fn from(clause: Clause) -> Self {
        let arity = clause.arity();
        ClauseJson {
            satisfying: clause
                .satisfying
                .iter()
                .map(|&p| format_pattern(p, arity))
                .collect(),
            vars: clause.vars,
        }
    }
}

/// `"010"`: character `k` is the value of the clause's `k`-th variable.
pub fn parse_pattern(text: &str, arity: usize) -> Result<u64> {
    if text.len() != arity {
        return Err(Error::input(format!(
            "pattern `{text}` has length {} but the clause has arity {arity}",
            text.len()
        )));
    }
    text.bytes()
        .enumerate()
        .try_fold(0u64, |acc, (k, b)| match b {
            b'0' => Ok(acc),
            b'1' => Ok(acc | 1 << k),
            _ => Err(Error::input(format!(
                "pattern `{text}` is not a bit string"
            ))),
        })
}

pub fn format_pattern(pattern: u64, arity: usize) -> String {
    (0..arity)
        .map(|k| if pattern >> k & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl Clause {
    pub fn new(vars: Vec<usize>, mut satisfying: Vec<u64>) -> Result<Clause> {
        let arity = vars.len();
        if arity == 0 {
            return Err(Error::input("clause has no variables"));
        }
        if arity > MAX_ARITY {
            return Err(Error::input(format!(
                "clause arity {arity} exceeds {MAX_ARITY}"
            )));
        }
        let mut seen = vars.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != arity {
            return Err(Error::input("clause repeats a variable"));
        }
        if arity < 64 && satisfying.iter().any(|&p| p >> arity != 0) {
            return Err(Error::input("pattern wider than the clause arity"));
        }
        satisfying.sort_unstable();
        let before = satisfying.len();
        satisfying.dedup();
        if satisfying.len() != before {
            return Err(Error::input("clause lists a satisfying pattern twice"));
        }
        Ok(Clause { vars, satisfying })
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn satisfying(&self) -> &[u64] {
        &self.satisfying
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    /// The clause's variables read from `bits`, packed as a pattern.
    pub fn project(&self, bits: &[bool]) -> u64 {
        self.vars
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &v)| acc | u64::from(bits[v]) << k)
    }

    pub fn accepts(&self, pattern: u64) -> bool {
        self.satisfying.binary_search(&pattern).is_ok()
    }

    /// Value the pattern gives to the clause's `k`-th variable.
    pub fn bit(pattern: u64, k: usize) -> bool {
        pattern >> k & 1 == 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CspJson", into = "CspJson")]
pub struct CspInstance {
    num_vars: usize,
    clauses: Vec<Clause>,
}

#[derive(Serialize, Deserialize)]
struct CspJson {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl TryFrom<CspJson> for CspInstance {
    type Error = Error;

    fn try_from(json: CspJson) -> Result<Self> {
        CspInstance::new(json.num_vars, json.clauses)
    }
}

impl From<CspInstance> for CspJson {
    fn from(csp: CspInstance) -> Self {
        CspJson {
            num_vars: csp.num_vars,
            clauses: csp.clauses,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub bits: Vec<bool>,
}

impl Assignment {
    /// Bit `i` of `mask` becomes variable `i`.
    pub fn from_mask(num_vars: usize, mask: u64) -> Assignment {
        Assignment {
            bits: (0..num_vars).map(|i| mask >> i & 1 == 1).collect(),
        }
    }
}

impl CspInstance {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<CspInstance> {
        if num_vars == 0 {
            return Err(Error::input("a CSP needs at least one variable"));
        }
        for (j, clause) in clauses.iter().enumerate() {
            if let Some(&v) = clause.vars.iter().find(|&&v| v >= num_vars) {
                return Err(Error::input(format!(
                    "clause {j} uses variable {v} but there are {num_vars}"
                )));
            }
        }
        Ok(CspInstance { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Σ over clauses of the number of satisfying patterns.
    pub fn pattern_total(&self) -> usize {
        self.clauses.iter().map(|c| c.satisfying.len()).sum()
    }

    /// Number of clauses satisfied by `assignment`.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<usize> {
        if assignment.bits.len() != self.num_vars {
            return Err(Error::input(format!(
                "assignment has {} bits but the CSP has {} variables",
                assignment.bits.len(),
                self.num_vars
            )));
        }
        Ok(self
            .clauses
            .iter()
            .filter(|c| c.accepts(c.project(&assignment.bits)))
            .count())
    }

    /// Maximum number of simultaneously satisfiable clauses, with the
    /// numerically smallest maximizing assignment (bit `i` = variable `i`).
    pub fn max_sat_bruteforce(&self, caps: &Caps) -> Result<(usize, Assignment)> {
        ensure(
            "variable count for max-sat",
            self.num_vars as u64,
            caps.maxsat_vars.min(32) as u64,
        )?;
        let mut best = (0usize, 0u64);
        let mut found = false;
        for mask in 0u64..1u64 << self.num_vars {
            let count = self
                .clauses
                .iter()
                .filter(|c| {
                    let p = c
                        .vars
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (k, &v)| acc | (mask >> v & 1) << k);
                    c.accepts(p)
                })
                .count();
            if !found || count > best.0 {
                best = (count, mask);
                found = true;
            }
        }
        Ok((best.0, Assignment::from_mask(self.num_vars, best.1)))
    }

    /// `m_out` clauses, each the AND of `t` clauses sampled uniformly with
    /// replacement. Output clause `j` draws from the stream seeded with
    /// `seed ^ j`, so clauses can be built independently.
    pub fn gap_amplify(&self, t: usize, m_out: usize, seed: u64) -> Result<CspInstance> {
        if self.clauses.is_empty() {
            return Err(Error::input("cannot amplify a CSP without clauses"));
        }
        if t == 0 {
            return Err(Error::input("t must be at least 1"));
        }
        let clauses = (0..m_out)
            .map(|j| {
                let mut rng = seed::rng(seed ^ j as u64);
                let picked: Vec<&Clause> = (0..t)
                    .map(|_| &self.clauses[rng.gen_range(0..self.clauses.len())])
                    .collect();
                and_clauses(&picked)
            })
            .collect::<Result<Vec<_>>>()?;
        CspInstance::new(self.num_vars, clauses)
    }

    /// Every clause repeated `copies` times in place.
    pub fn duplicate_clauses(&self, copies: usize) -> Result<CspInstance> {
        if copies == 0 {
            return Err(Error::input("copies must be at least 1"));
        }
        let clauses = self
            .clauses
            .iter()
            .flat_map(|c| std::iter::repeat_n(c.clone(), copies))
            .collect();
        CspInstance::new(self.num_vars, clauses)
    }

    /// Random CSP: arity uniform in `1..=max_arity`, each pattern satisfying
    /// with probability 1/2 (the satisfying set may be empty).
    pub fn random(
        num_vars: usize,
        num_clauses: usize,
        max_arity: usize,
        seed: u64,
    ) -> Result<CspInstance> {
        let max_arity = max_arity.min(num_vars);
        if max_arity == 0 {
            return Err(Error::input("arity must be at least 1"));
        }
        let mut rng = seed::rng(seed);
        let clauses = (0..num_clauses)
            .map(|_| {
                let arity = rng.gen_range(1..=max_arity);
                let vars = sample(&mut rng, num_vars, arity).into_vec();
                let satisfying = (0..1u64 << arity).filter(|_| rng.gen_bool(0.5)).collect();
                Clause::new(vars, satisfying)
            })
            .collect::<Result<Vec<_>>>()?;
        CspInstance::new(num_vars, clauses)
    }

    /// Random CSP whose satisfying sets are nonempty and closed under
    /// complement, so every participating variable is 0 in exactly as many
    /// satisfying patterns as it is 1.
    pub fn random_balanced(
        num_vars: usize,
        num_clauses: usize,
        arity: usize,
        seed: u64,
    ) -> Result<CspInstance> {
        if arity == 0 || arity > num_vars || arity > 16 {
            return Err(Error::input(
                "balanced arity must be in 1..=min(num_vars, 16)",
            ));
        }
        let mut rng = seed::rng(seed);
        let full = (1u64 << arity) - 1;
        let clauses = (0..num_clauses)
            .map(|_| {
                let vars = sample(&mut rng, num_vars, arity).into_vec();
                let half = 1u64 << (arity - 1);
                let mut low: Vec<u64> = (0..half).filter(|_| rng.gen_bool(0.5)).collect();
                if low.is_empty() {
                    low.push(rng.gen_range(0..half));
                }
                let satisfying = low.iter().flat_map(|&p| [p, p ^ full]).collect();
                Clause::new(vars, satisfying)
            })
            .collect::<Result<Vec<_>>>()?;
        CspInstance::new(num_vars, clauses)
    }

    /// True iff every clause has, for each of its variables, as many
    /// satisfying patterns with the variable at 0 as at 1.
    pub fn is_balanced(&self) -> bool {
        self.clauses.iter().all(|c| {
            (0..c.arity()).all(|k| {
                let ones = c.satisfying.iter().filter(|&&p| Clause::bit(p, k)).count();
                2 * ones == c.satisfying.len()
            })
        })
    }
}

/// AND of several clauses: variables merged in first-occurrence order, and
/// the satisfying set is every merged pattern whose projections satisfy all
/// constituents.
pub fn and_clauses(parts: &[&Clause]) -> Result<Clause> {
    let mut vars: Vec<usize> = Vec::new();
    let mut position: HashMap<usize, usize> = HashMap::new();
    let mut patterns: Vec<u64> = vec![0];
    for part in parts {
        let known = vars.len();
        for &v in &part.vars {
            if let std::collections::hash_map::Entry::Vacant(e) = position.entry(v) {
                e.insert(vars.len());
                vars.push(v);
            }
        }
        if vars.len() > MAX_ARITY {
            return Err(Error::input(format!(
                "AND of clauses has arity {} > {MAX_ARITY}",
                vars.len()
            )));
        }
        let mut next = Vec::new();
        for &p in &patterns {
            'pattern: for &q in &part.satisfying {
                let mut merged = p;
                for (k, v) in part.vars.iter().enumerate() {
                    let pos = position[v];
                    let value = Clause::bit(q, k);
                    if pos < known {
                        if Clause::bit(p, pos) != value {
                            continue 'pattern;
                        }
                    } else if value {
                        merged |= 1 << pos;
                    }
                }
                next.push(merged);
            }
        }
        next.sort_unstable();
        next.dedup();
        patterns = next;
    }
    Clause::new(vars, patterns)
}
