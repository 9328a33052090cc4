//! Conditional and unconditional allocation by guess refinement.
//!
//! The conditional allocator runs the bidding game with every agent playing
//! her proportional strategy against a guessed share `t_i`. The
//! unconditional allocator starts from `t_i = v_i(M)` and shrinks the guess
//! of an under-served agent by `(1 − ε)` until every agent is served or her
//! guess drops below `v_i(M)/K`.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::engine::{run_game, GameConfig, GameError, Strategy, TieBreakPolicy, Transcript};
use crate::model::{AgentId, Allocation, Instance};
use crate::rational::{self, Rational};
use crate::strategies::{default_rho, make_altruistic_proportional_mms, make_proportional_aps};
use crate::valuation::{Oracle, ValuationOracle};

/// Share notion targeted by the allocators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShareMode {
    /// Standard game, proportional strategy with `ρ_i = 1/(3 − 2b_i)`.
    Aps,
    /// `10/27`-altruistic game, altruistic proportional strategy. Equal
    /// entitlements only.
    Mms,
}

impl ShareMode {
    /// The fraction `ρ_i` the conditional allocator promises to agent `i`.
    pub fn rho(&self, b: &Rational) -> Rational {
        match self {
            ShareMode::Aps => default_rho(b),
            ShareMode::Mms => mms_rho(),
        }
    }

    /// `ε = 2/(3m)` for APS and `1/(3n)` for MMS.
    pub fn default_epsilon(&self, instance: &Instance) -> Rational {
        match self {
            ShareMode::Aps => rational::rat(2, 3 * instance.m().max(1) as i64),
            ShareMode::Mms => rational::rat(1, 3 * instance.n() as i64),
        }
    }
}

pub fn mms_rho() -> Rational {
    rational::rat(10, 27)
}

pub type GuessVector = BTreeMap<AgentId, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("MMS mode needs equal entitlements")]
    UnequalEntitlements,
    #[error("epsilon must lie in (0, 1)")]
    Epsilon,
    #[error("K must be at least 1")]
    BadK,
    #[error("guess for agent {0} is missing or negative")]
    BadGuess(AgentId),
    #[error("the conditional allocator broke its contract after {calls} calls")]
    ContractViolation { calls: usize, transcript: Box<Transcript> },
}

fn oracle_of(instance: &Instance, id: AgentId) -> Oracle {
    let agent = instance.agent(id).expect("agent of the instance");
    agent.valuation.clone()
}

/// Runs the game with proportional strategies parameterised by `guesses`.
pub fn conditional_allocate(
    instance: &Instance,
    guesses: &GuessVector,
    mode: ShareMode,
    tie_breaker: TieBreakPolicy,
) -> Result<(Allocation, Transcript), PolyError> {
    if mode == ShareMode::Mms && !instance.has_equal_entitlements() {
        return Err(PolyError::UnequalEntitlements);
    }
    let mut strategies: BTreeMap<AgentId, Box<dyn Strategy>> = BTreeMap::new();
    for agent in instance.agents() {
        let t = guesses
            .get(&agent.id)
            .filter(|t| !t.is_negative())
            .ok_or(PolyError::BadGuess(agent.id))?
            .clone();
        let v = oracle_of(instance, agent.id);
        let b = agent.entitlement.clone();
        let strategy: Box<dyn Strategy> = match mode {
            ShareMode::Aps => Box::new(make_proportional_aps(v, b.clone(), default_rho(&b), t)),
            ShareMode::Mms => Box::new(make_altruistic_proportional_mms(v, b, t)),
        };
        strategies.insert(agent.id, strategy);
    }
    let config = match mode {
        ShareMode::Aps => GameConfig::standard(),
        ShareMode::Mms => GameConfig::altruistic(mms_rho()),
    }
    .with_tie_breaker(tie_breaker);
    let transcript = run_game(instance, &mut strategies, &config)?;
    Ok((transcript.allocation.clone(), transcript))
}

/// `max_i max_{e: v_i(e) > 0} v_i(M)/v_i(e)`, or 1 when no item has value.
pub fn compute_k(instance: &Instance) -> Rational {
    let mut k = rational::one();
    for agent in instance.agents() {
        let total = agent.valuation.value(instance.item_set());
        for &e in instance.items() {
            let single = agent.valuation.value(&crate::items::ItemSet::singleton(e));
            if single.is_positive() {
                let ratio = &total / single;
                if ratio > k {
                    k = ratio;
                }
            }
        }
    }
    k
}

/// Largest `d` with `(1 − ε)^d ≥ 1/K`.
pub fn max_decrements(epsilon: &Rational, k: &Rational) -> u64 {
    let factor = rational::one() - epsilon;
    let floor = rational::one() / k;
    let mut power = rational::one();
    let mut d = 0;
    loop {
        power *= &factor;
        if power < floor {
            return d;
        }
        d += 1;
    }
}

/// Hard cap on conditional calls: every agent is decremented at most
/// `max_decrements + 1` times, plus the final successful call.
pub fn call_bound(n: usize, epsilon: &Rational, k: &Rational) -> usize {
    n * (max_decrements(epsilon, k) as usize + 1) + 1
}

#[derive(Debug, Clone)]
pub struct UnconditionalOutcome {
    pub allocation: Allocation,
    pub transcript: Transcript,
    /// Guesses used by each conditional call, in order.
    pub guesses: Vec<GuessVector>,
    pub k: Rational,
    pub epsilon: Rational,
}

impl UnconditionalOutcome {
    pub fn calls(&self) -> usize {
        self.guesses.len()
    }
}

/// Guess refinement around [`conditional_allocate`]. `k = None` computes K
/// from singleton values, which is valid for submodular valuations.
pub fn unconditional_allocate(
    instance: &Instance,
    epsilon: &Rational,
    k: Option<Rational>,
    mode: ShareMode,
    tie_breaker: TieBreakPolicy,
) -> Result<UnconditionalOutcome, PolyError> {
    if !epsilon.is_positive() || *epsilon >= rational::one() {
        return Err(PolyError::Epsilon);
    }
    let k = k.unwrap_or_else(|| compute_k(instance));
    if k < rational::one() {
        return Err(PolyError::BadK);
    }
    let totals: BTreeMap<AgentId, Rational> = instance
        .agents()
        .iter()
        .map(|a| (a.id, a.valuation.value(instance.item_set())))
        .collect();
    let mut guesses: GuessVector = totals.clone();
    let bound = call_bound(instance.n(), epsilon, &k);
    let shrink = rational::one() - epsilon;
    let mut trace = Vec::new();
    loop {
        trace.push(guesses.clone());
        let (allocation, transcript) =
            conditional_allocate(instance, &guesses, mode, tie_breaker.clone())?;
        let under_served = instance.agents().iter().find(|a| {
            let t = &guesses[&a.id];
            let got = allocation.value_of(instance, a.id).expect("agent exists");
            got < mode.rho(&a.entitlement) * t && *t >= &totals[&a.id] / &k
        });
        match under_served {
            None => {
                return Ok(UnconditionalOutcome {
                    allocation,
                    transcript,
                    guesses: trace,
                    k,
                    epsilon: epsilon.clone(),
                })
            }
            Some(agent) => {
                if trace.len() >= bound {
                    return Err(PolyError::ContractViolation {
                        calls: trace.len(),
                        transcript: Box::new(transcript),
                    });
                }
                let t = guesses.get_mut(&agent.id).expect("guess exists");
                *t = &*t * &shrink;
            }
        }
    }
}

/// Zero guesses for every agent.
pub fn zero_guesses(instance: &Instance) -> GuessVector {
    instance.agent_ids().map(|id| (id, Rational::zero())).collect()
}
