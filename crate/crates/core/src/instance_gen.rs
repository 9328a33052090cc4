//! Negative instances with their scripted adversarial runs, and seeded
//! random submodular instances.
//!
//! Row-substitute instances lay items out as a matrix `e_{i,j}`: items of a
//! row are substitutes, rows add up. Item ids put the last row first so
//! that the designated agent's canonical tie-break between equally valued
//! rows lands on the last row.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{run_game, GameConfig, GameError, Strategy, TieBreakPolicy, Transcript};
use crate::items::{Item, ItemSet};
use crate::model::{Agent, AgentId, Instance};
use crate::rational::{self, Rational};
use crate::shares::verify_mms_partition;
use crate::strategies::{
    default_rho, make_altruistic_proportional_mms, make_proportional_aps, make_scripted,
    ColumnSniper, ConstantBidder, Scripted,
};
use crate::valuation::{
    AdditiveValuation, CoverageValuation, RowSubstitutesValuation, SubstituteRow, Valuation,
    ValuationOracle, XosValuation,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("sequence overflows 64 bits")]
    Overflow,
}

/// Largest `k` accepted by [`sylvester`].
pub const SYLVESTER_MAX_K: usize = 6;

/// `[q_1, …, q_{k+1}]` with `q_1 = 2` and `q_j = 1 + ∏_{i<j} q_i`.
pub fn sylvester(k: usize) -> Result<Vec<u64>, GenError> {
    if k == 0 {
        return Err(GenError::Range("k must be at least 1".into()));
    }
    if k > SYLVESTER_MAX_K {
        return Err(GenError::Overflow);
    }
    let mut q = vec![2u64];
    let mut product = 2u64;
    while q.len() < k + 1 {
        let next = product.checked_add(1).ok_or(GenError::Overflow)?;
        product = product.checked_mul(next).ok_or(GenError::Overflow)?;
        q.push(next);
    }
    Ok(q)
}

/// `n_k = ∏_{i ≤ k} q_i`.
pub fn agents_for(k: usize) -> Result<u64, GenError> {
    Ok(sylvester(k)?[..k].iter().product())
}

/// How the designated agent plays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlayerSpec {
    ProportionalAps { rho: Rational, share: Rational },
    AltruisticMms { share: Rational },
}

#[derive(Debug, Clone)]
pub enum OpponentSpec {
    Scripted(Scripted),
    Constant(Rational),
    ColumnSniper { rounds: u32, column_of: Arc<BTreeMap<Item, u32>> },
}

/// What executing the run must produce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    ValueEquals(Rational),
    ValueAtMost(Rational),
}

/// An instance, the strategies of every agent, and the expected outcome.
#[derive(Debug, Clone)]
pub struct ScriptedRun {
    pub name: String,
    pub instance: Instance,
    pub p: AgentId,
    pub player: PlayerSpec,
    pub opponents: BTreeMap<AgentId, OpponentSpec>,
    pub config: GameConfig,
    /// `MMS_p`, certified by `mms_partition` together with `v_p(M)`.
    pub mms: Rational,
    pub mms_partition: Vec<ItemSet>,
    pub expected: Expectation,
    /// `expected value / MMS_p`.
    pub expected_ratio: Rational,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub transcript: Transcript,
    pub p_value: Rational,
    pub ratio: Rational,
    pub as_expected: bool,
}

impl ScriptedRun {
    pub fn strategies(&self) -> BTreeMap<AgentId, Box<dyn Strategy>> {
        let agent = self.instance.agent(self.p).expect("p is an agent");
        let v = agent.valuation.clone();
        let b = agent.entitlement.clone();
        let mut out: BTreeMap<AgentId, Box<dyn Strategy>> = BTreeMap::new();
        let player: Box<dyn Strategy> = match &self.player {
            PlayerSpec::ProportionalAps { rho, share } => {
                Box::new(make_proportional_aps(v, b, rho.clone(), share.clone()))
            }
            PlayerSpec::AltruisticMms { share } => {
                Box::new(make_altruistic_proportional_mms(v, b, share.clone()))
            }
        };
        out.insert(self.p, player);
        for (&id, spec) in &self.opponents {
            let s: Box<dyn Strategy> = match spec {
                OpponentSpec::Scripted(s) => Box::new(s.clone()),
                OpponentSpec::Constant(amount) => Box::new(ConstantBidder {
                    amount: amount.clone(),
                }),
                OpponentSpec::ColumnSniper { rounds, column_of } => Box::new(ColumnSniper {
                    target: self.p,
                    rounds: *rounds,
                    column_of: column_of.clone(),
                }),
            };
            out.insert(id, s);
        }
        out
    }

    pub fn execute(&self) -> Result<RunOutcome, GameError> {
        let mut strategies = self.strategies();
        let transcript = run_game(&self.instance, &mut strategies, &self.config)?;
        let p_value = transcript
            .allocation
            .value_of(&self.instance, self.p)
            .expect("p is an agent");
        let ratio = if self.mms.is_positive() {
            &p_value / &self.mms
        } else {
            Rational::zero()
        };
        let as_expected = match &self.expected {
            Expectation::ValueEquals(v) => p_value == *v && ratio == self.expected_ratio,
            Expectation::ValueAtMost(v) => p_value <= *v && ratio <= self.expected_ratio,
        };
        Ok(RunOutcome {
            transcript,
            p_value,
            ratio,
            as_expected,
        })
    }

    /// Checks the MMS certificate: every partition bundle is worth `mms` and
    /// `v_p(M) = mms` bounds every bundle from above.
    pub fn mms_certified(&self) -> bool {
        let agent = self.instance.agent(self.p).expect("p is an agent");
        let v = &*agent.valuation;
        verify_mms_partition(
            &self.mms_partition,
            v,
            &self.mms,
            self.instance.item_set(),
            self.instance.n(),
        ) && v.value(self.instance.item_set()) == self.mms
    }
}

/// Row-substitute matrix with `rows[i]` of `columns` items each. Ids are
/// assigned to the last row first.
struct Matrix {
    rows: Vec<Vec<Item>>,
}

impl Matrix {
    fn new(num_rows: usize, columns: usize) -> Self {
        let mut rows = vec![Vec::new(); num_rows];
        let mut next = 0u32;
        for row in rows.iter_mut().rev() {
            for _ in 0..columns {
                row.push(Item(next));
                next += 1;
            }
        }
        Self { rows }
    }

    fn items(&self) -> Vec<Item> {
        let mut all: Vec<Item> = self.rows.iter().flatten().copied().collect();
        all.sort();
        all
    }

    fn columns(&self) -> Vec<ItemSet> {
        let width = self.rows[0].len();
        (0..width)
            .map(|j| self.rows.iter().map(|r| r[j]).collect())
            .collect()
    }

    fn valuation(&self, weights: &[Rational]) -> RowSubstitutesValuation {
        let rows = self
            .rows
            .iter()
            .zip(weights)
            .map(|(items, w)| SubstituteRow {
                weight: w.clone(),
                items: items.iter().copied().collect(),
            })
            .collect();
        RowSubstitutesValuation::new(rows).expect("rows are disjoint")
    }
}

fn equal_instance(items: Vec<Item>, n: usize, v: Valuation) -> Instance {
    let b = rational::rat(1, n as i64);
    let agents = (0..n as u32)
        .map(|i| Agent::new(i, b.clone(), v.clone()))
        .collect();
    Instance::new(items, agents).expect("generated instance is valid")
}

/// Opponent schedule for clearing rows: group `i` has `n/q_i` agents, each
/// winning `q_i` consecutive rounds of row `i` at the same bid.
struct RowClearing {
    scripts: BTreeMap<AgentId, (BTreeMap<u32, Rational>, BTreeMap<u32, Vec<Item>>)>,
    next_round: u32,
}

impl RowClearing {
    fn new(first_round: u32) -> Self {
        Self {
            scripts: BTreeMap::new(),
            next_round: first_round,
        }
    }

    fn clear_row(&mut self, row: &[Item], first_agent: u32, q: u64, bid: &Rational) -> u32 {
        let group = row.len() as u64 / q;
        let mut items = row.iter();
        for g in 0..group {
            let id = AgentId(first_agent + g as u32);
            let entry = self.scripts.entry(id).or_default();
            for _ in 0..q {
                entry.0.insert(self.next_round, bid.clone());
                entry
                    .1
                    .insert(self.next_round, vec![*items.next().expect("q divides n")]);
                self.next_round += 1;
            }
        }
        first_agent + group as u32
    }

    fn into_specs(self) -> BTreeMap<AgentId, OpponentSpec> {
        self.scripts
            .into_iter()
            .map(|(id, (bids, picks))| (id, OpponentSpec::Scripted(make_scripted(bids, picks))))
            .collect()
    }
}

fn check_k(k: usize, max: usize) -> Result<Vec<u64>, GenError> {
    if k == 0 || k > max {
        return Err(GenError::Range(format!("k = {k} outside 1..={max}")));
    }
    sylvester(k)
}

/// `ρ_k = 1/(1 + Σ_{i≤k} 1/(q_i − 1))`.
pub fn altruistic_rho(k: usize) -> Result<Rational, GenError> {
    let q = sylvester(k)?;
    let sum = q[..k]
        .iter()
        .fold(rational::one(), |acc, &qi| acc + rational::rat(1, qi as i64 - 1));
    Ok(rational::one() / sum)
}

/// `ρ_k = 1/(3 − 2/(q_{k+1} − 1))`.
pub fn original_rho(k: usize) -> Result<Rational, GenError> {
    let q = sylvester(k)?;
    Ok(rational::one() / (rational::int(3) - rational::rat(2, q[k] as i64 - 1)))
}

/// Largest `k` for the row-substitute generators.
pub const MAX_NEGATIVE_K: usize = 4;

/// Substitute rows valued `1/(q_i − 1)` for `i ≤ k` plus a row valued 1, in
/// the `ρ_k`-altruistic game. `p` wins a last-row item in round 1 and the
/// opponents clear rows `1..k`.
pub fn gen_altruistic_negative(k: usize) -> Result<ScriptedRun, GenError> {
    let q = check_k(k, MAX_NEGATIVE_K)?;
    let n = agents_for(k)? as usize;
    let matrix = Matrix::new(k + 1, n);
    let mut weights: Vec<Rational> = q[..k].iter().map(|&qi| rational::rat(1, qi as i64 - 1)).collect();
    weights.push(rational::one());
    let v: Valuation = matrix.valuation(&weights).into();
    let mms = weights.iter().fold(Rational::zero(), |a, w| a + w);
    let rho = rational::one() / &mms;
    let b = rational::rat(1, n as i64);
    let scale = &b / &mms;

    let mut clearing = RowClearing::new(2);
    let mut next_agent = 1;
    for i in 0..k {
        let bid = &scale * &weights[i];
        next_agent = clearing.clear_row(&matrix.rows[i], next_agent, q[i], &bid);
    }
    debug_assert_eq!(next_agent as usize, n);

    Ok(ScriptedRun {
        name: format!("altruistic-negative-k{k}"),
        instance: equal_instance(matrix.items(), n, v),
        p: AgentId(0),
        player: PlayerSpec::AltruisticMms { share: mms.clone() },
        opponents: clearing.into_specs(),
        config: GameConfig::altruistic(rho.clone())
            .with_tie_breaker(TieBreakPolicy::AdversarialAgainst(AgentId(0))),
        mms_partition: matrix.columns(),
        mms,
        expected: Expectation::ValueEquals(rational::one()),
        expected_ratio: rho,
    })
}

/// Substitute rows valued `2/q_i` for `i ≤ k` plus a row valued 1, in the
/// standard game with `p` playing proportional(ρ_k).
pub fn gen_original_negative(k: usize) -> Result<ScriptedRun, GenError> {
    let q = check_k(k, MAX_NEGATIVE_K)?;
    let n = agents_for(k)? as usize;
    let matrix = Matrix::new(k + 1, n);
    let mut weights: Vec<Rational> = q[..k].iter().map(|&qi| rational::rat(2, qi as i64)).collect();
    weights.push(rational::one());
    let v: Valuation = matrix.valuation(&weights).into();
    let mms = weights.iter().fold(Rational::zero(), |a, w| a + w);
    let rho = original_rho(k)?;
    debug_assert_eq!(rho, rational::one() / &mms);
    let b = rational::rat(1, n as i64);
    // p bids (1/2ρ)(b/MMS)·marginal = (b/2)·marginal.
    let scale = &b / rational::int(2);

    let mut clearing = RowClearing::new(2);
    let mut next_agent = 1;
    for i in 0..k {
        let bid = &scale * &weights[i];
        next_agent = clearing.clear_row(&matrix.rows[i], next_agent, q[i], &bid);
    }
    debug_assert_eq!(next_agent as usize, n);

    Ok(ScriptedRun {
        name: format!("original-negative-k{k}"),
        instance: equal_instance(matrix.items(), n, v),
        p: AgentId(0),
        player: PlayerSpec::ProportionalAps {
            rho: rho.clone(),
            share: mms.clone(),
        },
        opponents: clearing.into_specs(),
        config: GameConfig::standard()
            .with_tie_breaker(TieBreakPolicy::AdversarialAgainst(AgentId(0))),
        mms_partition: matrix.columns(),
        mms,
        expected: Expectation::ValueEquals(rational::one()),
        expected_ratio: rho,
    })
}

/// The altruistic instance with the value-1 row replaced by `q_k − 1` rows
/// valued `1/(q_k − 1)`. Opponents clear rows `1..k` from round 1; `p`
/// collects one item of each extra row.
pub fn gen_modified_negative(k: usize) -> Result<ScriptedRun, GenError> {
    let q = check_k(k, MAX_NEGATIVE_K)?;
    let n = agents_for(k)? as usize;
    let extra = q[k - 1] as usize - 1;
    let matrix = Matrix::new(k + extra, n);
    let mut weights: Vec<Rational> = q[..k].iter().map(|&qi| rational::rat(1, qi as i64 - 1)).collect();
    weights.extend(std::iter::repeat_n(rational::rat(1, extra as i64), extra));
    let v: Valuation = matrix.valuation(&weights).into();
    let mms = weights.iter().fold(Rational::zero(), |a, w| a + w);
    let rho = rational::one() / &mms;
    let b = rational::rat(1, n as i64);
    let scale = &b / &mms;

    let mut clearing = RowClearing::new(1);
    let mut next_agent = 1;
    for i in 0..k {
        let bid = &scale * &weights[i];
        next_agent = clearing.clear_row(&matrix.rows[i], next_agent, q[i], &bid);
    }
    debug_assert_eq!(next_agent as usize, n);

    Ok(ScriptedRun {
        name: format!("modified-negative-k{k}"),
        instance: equal_instance(matrix.items(), n, v),
        p: AgentId(0),
        player: PlayerSpec::AltruisticMms { share: mms.clone() },
        opponents: clearing.into_specs(),
        config: GameConfig::altruistic(rho.clone())
            .with_tie_breaker(TieBreakPolicy::AdversarialAgainst(AgentId(0))),
        mms_partition: matrix.columns(),
        mms,
        expected: Expectation::ValueEquals(rational::one()),
        expected_ratio: rho,
    })
}

/// Column indicator XOS valuation on a `k × n` matrix; item `e_{i,j}` has
/// id `j·k + i`.
pub fn column_xos(n: usize, k: usize) -> (XosValuation, Vec<ItemSet>) {
    let columns: Vec<ItemSet> = (0..n)
        .map(|j| (0..k).map(|i| Item((j * k + i) as u32)).collect())
        .collect();
    let clauses = columns
        .iter()
        .map(|col| {
            AdditiveValuation::new(col.iter().map(|e| (e, rational::one())).collect())
                .expect("nonnegative")
        })
        .collect();
    (XosValuation::new(clauses).expect("at least one clause"), columns)
}

/// The XOS instance `I(n, k)`: `n/2` agents bid half their per-item budget
/// share, `n/2 − 1` agents snipe the rest of any column `p` enters.
/// Budgets are the entitlements `1/n`; bids are those of the budget-`k`
/// description scaled by `1/(nk)`.
pub fn gen_xos_hard(n: usize, k: usize) -> Result<ScriptedRun, GenError> {
    if k == 0 || n < 4 * k * k {
        return Err(GenError::Range(format!("need k ≥ 1 and n ≥ 4k², got n = {n}, k = {k}")));
    }
    if n % 2 != 0 {
        return Err(GenError::Range(format!("n = {n} must be even")));
    }
    let (xos, columns) = column_xos(n, k);
    let v: Valuation = xos.into();
    let items: Vec<Item> = (0..(n * k) as u32).map(Item).collect();
    let mms = rational::int(k as i64);
    let b = rational::rat(1, n as i64);
    let type1_bid = rational::rat(1, (2 * n * k) as i64);
    let column_of: Arc<BTreeMap<Item, u32>> = Arc::new(
        columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |e| (e, j as u32)))
            .collect(),
    );
    let mut opponents = BTreeMap::new();
    for id in 1..=(n / 2) as u32 {
        opponents.insert(AgentId(id), OpponentSpec::Constant(type1_bid.clone()));
    }
    for id in (n / 2 + 1) as u32..n as u32 {
        opponents.insert(
            AgentId(id),
            OpponentSpec::ColumnSniper {
                rounds: k as u32 - 1,
                column_of: column_of.clone(),
            },
        );
    }
    Ok(ScriptedRun {
        name: format!("xos-hard-n{n}-k{k}"),
        instance: equal_instance(items, n, v),
        p: AgentId(0),
        player: PlayerSpec::ProportionalAps {
            rho: default_rho(&b),
            share: mms.clone(),
        },
        opponents,
        config: GameConfig::standard()
            .with_tie_breaker(TieBreakPolicy::AdversarialAgainst(AgentId(0))),
        mms_partition: columns,
        expected: Expectation::ValueAtMost(rational::one()),
        expected_ratio: rational::rat(1, k as i64),
        mms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntitlementKind {
    Equal,
    /// Integer weights in `1..=6`, normalised.
    Random,
}

/// Weighted-coverage agents over a universe of `universe` elements with
/// weights in `{1/4, …, 12/4}`; each item covers a random nonempty subset.
pub fn gen_random_submodular(
    seed: u64,
    n: usize,
    m: usize,
    universe: usize,
    entitlements: EntitlementKind,
) -> Result<Instance, GenError> {
    if n == 0 || universe == 0 {
        return Err(GenError::Range("need n ≥ 1 and a nonempty universe".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items: Vec<Item> = (0..m as u32).map(Item).collect();
    let raw: Vec<i64> = match entitlements {
        EntitlementKind::Equal => vec![1; n],
        EntitlementKind::Random => (0..n).map(|_| rng.gen_range(1..=6)).collect(),
    };
    let total: i64 = raw.iter().sum();
    let mut agents = Vec::with_capacity(n);
    for (i, w) in raw.iter().enumerate() {
        let weights: Vec<Rational> = (0..universe)
            .map(|_| rational::rat(rng.gen_range(1..=12), 4))
            .collect();
        let covers: BTreeMap<Item, Vec<usize>> = items
            .iter()
            .map(|&e| {
                let mut set: Vec<usize> =
                    (0..universe).filter(|_| rng.gen_bool(0.35)).collect();
                if set.is_empty() {
                    set.push(rng.gen_range(0..universe));
                }
                (e, set)
            })
            .collect();
        let v = CoverageValuation::new(weights, covers).expect("valid coverage");
        agents.push(Agent::new(i as u32, rational::rat(*w, total), v));
    }
    Instance::new(items, agents).map_err(|e| GenError::Range(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::verify_transcript;
    use crate::rational::{int, rat};
    use crate::shares::mms_exact;
    use crate::valuation::{is_submodular, SizeGuard};

    #[test]
    fn sylvester_values() {
        assert_eq!(sylvester(1).unwrap(), vec![2, 3]);
        assert_eq!(sylvester(3).unwrap(), vec![2, 3, 7, 43]);
        for k in 1..=5 {
            let q = sylvester(k).unwrap();
            assert_eq!(q[..k].iter().product::<u64>(), q[k] - 1);
        }
        assert!(sylvester(0).is_err());
        assert_eq!(sylvester(7), Err(GenError::Overflow));
        assert_eq!(agents_for(2).unwrap(), 6);
        assert_eq!(agents_for(3).unwrap(), 42);
    }

    #[test]
    fn rho_sequences() {
        assert_eq!(altruistic_rho(1).unwrap(), rat(1, 2));
        assert_eq!(altruistic_rho(2).unwrap(), rat(2, 5));
        assert_eq!(altruistic_rho(3).unwrap(), rat(3, 8));
        assert_eq!(original_rho(1).unwrap(), rat(1, 2));
        assert_eq!(original_rho(2).unwrap(), rat(3, 8));
        let mut prev = original_rho(1).unwrap();
        for k in 2..=4 {
            let next = original_rho(k).unwrap();
            assert!(next < prev && next > rat(1, 3));
            prev = next;
        }
    }

    #[test]
    fn altruistic_k1_matches_brute_force() {
        let run = gen_altruistic_negative(1).unwrap();
        assert!(run.mms_certified());
        let v = &*run.instance.agents()[0].valuation;
        let mms = mms_exact(v, 2, run.instance.item_set(), SizeGuard::default()).unwrap();
        assert_eq!(mms.value, int(2));
        assert!(is_submodular(v, run.instance.item_set(), SizeGuard::default()).unwrap());
        let out = run.execute().unwrap();
        assert!(out.as_expected);
        assert!(verify_transcript(&out.transcript, &run.instance, &run.config).is_ok());
    }

    #[test]
    fn negative_runs_reproduce() {
        for run in [
            gen_altruistic_negative(2).unwrap(),
            gen_original_negative(1).unwrap(),
            gen_original_negative(2).unwrap(),
            gen_modified_negative(1).unwrap(),
            gen_modified_negative(2).unwrap(),
        ] {
            assert!(run.mms_certified(), "{}", run.name);
            let out = run.execute().unwrap();
            assert_eq!(out.p_value, int(1), "{}", run.name);
            assert!(out.as_expected, "{}", run.name);
            assert!(out.transcript.violations.is_empty(), "{}", run.name);
        }
    }

    #[test]
    fn opponents_clearing_rows_number_n_minus_one() {
        let run = gen_altruistic_negative(2).unwrap();
        assert_eq!(run.opponents.len(), run.instance.n() - 1);
    }

    #[test]
    fn modified_rows_have_equal_values() {
        let run = gen_modified_negative(2).unwrap();
        let v = &*run.instance.agents()[0].valuation;
        // Row 2 (value 1/2) and both extra rows.
        let Valuation::RowSubstitutes(rs) = v else { panic!() };
        assert_eq!(rs.rows()[1].weight, rat(1, 2));
        assert!(rs.rows()[2..].iter().all(|r| r.weight == rat(1, 2)));
        let small = gen_modified_negative(1).unwrap();
        let v = &*small.instance.agents()[0].valuation;
        assert!(is_submodular(v, small.instance.item_set(), SizeGuard::default()).unwrap());
    }

    #[test]
    fn xos_small_scale_mms_and_class() {
        let (v, columns) = column_xos(4, 2);
        let all: ItemSet = (0..8).map(Item).collect();
        let mms = mms_exact(&v, 4, &all, SizeGuard::default()).unwrap();
        assert_eq!(mms.value, int(2));
        assert!(columns.iter().all(|c| v.value(c) == int(2)));
        let (v2, _) = column_xos(2, 2);
        let four: ItemSet = (0..4).map(Item).collect();
        assert!(!is_submodular(&v2, &four, SizeGuard::default()).unwrap());
    }

    #[test]
    fn xos_hard_run() {
        let run = gen_xos_hard(16, 2).unwrap();
        assert!(run.mms_certified());
        let out = run.execute().unwrap();
        assert!(out.p_value <= int(1));
        assert!(out.as_expected);
        assert_eq!(out.transcript.rounds[0].winner, AgentId(0));
        assert_eq!(out.transcript.rounds[0].bids[&AgentId(0)], rat(23, 512));
        assert!(gen_xos_hard(15, 2).is_err());
        assert!(gen_xos_hard(4, 1).is_ok());
    }

    #[test]
    fn random_instances_are_deterministic() {
        let a = gen_random_submodular(7, 3, 6, 5, EntitlementKind::Random).unwrap();
        let b = gen_random_submodular(7, 3, 6, 5, EntitlementKind::Random).unwrap();
        assert_eq!(a, b);
        for agent in a.agents() {
            assert!(is_submodular(&*agent.valuation, a.item_set(), SizeGuard::default()).unwrap());
        }
    }
}
