//! The bidding game: state, rules, strategies' public view, transcripts and
//! offline transcript verification.
//!
//! Each round every active agent submits a sealed bid, the highest bid wins
//! (ties resolved by the configured policy, even at a zero bid), and the
//! winner pays her bid for the item she picks. The game ends when no items
//! remain or no agent is active; leftover items stay unallocated.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::items::{Item, ItemSet};
use crate::model::{AgentId, Allocation, Instance};
use crate::rational::{self, Rational};

/// When the ρ-altruistic spend limit deactivates an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AltruisticTrigger {
    /// Inactive once spend `> ρ·b`.
    #[default]
    Exceeds,
    /// Inactive once spend `≥ ρ·b`.
    Reaches,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameMode {
    Standard,
    Altruistic {
        rho: Rational,
        trigger: AltruisticTrigger,
    },
    /// The winner takes `k ≥ 1` items and pays `k` times her bid.
    MultiPick,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TieBreakPolicy {
    /// Lowest agent id.
    Lexicographic,
    /// Per-round preference lists (index 0 is round 1); the first listed
    /// candidate wins, otherwise the lowest id.
    Scripted(Vec<Vec<AgentId>>),
    /// Uniform among the tied agents, from a generator seeded by the config.
    SeededRandom,
    /// Lowest-id candidate other than the given agent, if there is one.
    AdversarialAgainst(AgentId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameConfig {
    pub mode: GameMode,
    pub tie_breaker: TieBreakPolicy,
    pub seed: u64,
}

impl GameConfig {
    pub fn standard() -> Self {
        Self {
            mode: GameMode::Standard,
            tie_breaker: TieBreakPolicy::Lexicographic,
            seed: 0,
        }
    }

    pub fn altruistic(rho: Rational) -> Self {
        Self {
            mode: GameMode::Altruistic {
                rho,
                trigger: AltruisticTrigger::default(),
            },
            ..Self::standard()
        }
    }

    pub fn multi_pick() -> Self {
        Self {
            mode: GameMode::MultiPick,
            ..Self::standard()
        }
    }

    pub fn with_tie_breaker(mut self, tie_breaker: TieBreakPolicy) -> Self {
        self.tie_breaker = tie_breaker;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trigger(mut self, trigger: AltruisticTrigger) -> Self {
        if let GameMode::Altruistic { trigger: t, .. } = &mut self.mode {
            *t = trigger;
        }
        self
    }

    /// Checks `ρ ∈ (0, 1]` in altruistic mode.
    pub fn validate(&self) -> Result<(), GameError> {
        if let GameMode::Altruistic { rho, .. } = &self.mode {
            if !rho.is_positive() || *rho > rational::one() {
                return Err(GameError::InvalidConfig(format!(
                    "altruistic rho {} is outside (0, 1]",
                    rational::Q(rho)
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentState {
    pub id: AgentId,
    pub entitlement: Rational,
    pub budget: Rational,
    pub spent: Rational,
    pub bundle: ItemSet,
    pub active: bool,
}

/// State at a round boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    rounds_played: u32,
    remaining: ItemSet,
    agents: BTreeMap<AgentId, AgentState>,
}

impl GameState {
    pub fn new(instance: &Instance) -> Self {
        let agents = instance
            .agents()
            .iter()
            .map(|a| {
                (
                    a.id,
                    AgentState {
                        id: a.id,
                        entitlement: a.entitlement.clone(),
                        budget: a.entitlement.clone(),
                        spent: Rational::zero(),
                        bundle: ItemSet::new(),
                        active: a.entitlement.is_positive(),
                    },
                )
            })
            .collect();
        Self {
            rounds_played: 0,
            remaining: instance.item_set().clone(),
            agents,
        }
    }

    pub fn rounds_played(&self) -> u32 {
        self.rounds_played
    }

    pub fn remaining(&self) -> &ItemSet {
        &self.remaining
    }

    pub fn agents(&self) -> impl Iterator<Item = &AgentState> {
        self.agents.values()
    }

    /// # Panics
    /// If `id` is not part of the game.
    pub fn agent(&self, id: AgentId) -> &AgentState {
        &self.agents[&id]
    }

    pub fn active_ids(&self) -> Vec<AgentId> {
        self.agents
            .values()
            .filter(|a| a.active)
            .map(|a| a.id)
            .collect()
    }

    pub fn is_over(&self) -> bool {
        self.remaining.is_empty() || self.agents.values().all(|a| !a.active)
    }

    /// Total remaining budget of active agents.
    pub fn active_budget(&self) -> Rational {
        self.agents
            .values()
            .filter(|a| a.active)
            .fold(Rational::zero(), |acc, a| acc + &a.budget)
    }

    fn still_active(agent: &AgentState, mode: &GameMode) -> bool {
        if !agent.budget.is_positive() {
            return false;
        }
        match mode {
            GameMode::Altruistic { rho, trigger } => {
                let limit = rho * &agent.entitlement;
                match trigger {
                    AltruisticTrigger::Exceeds => agent.spent <= limit,
                    AltruisticTrigger::Reaches => agent.spent < limit,
                }
            }
            GameMode::Standard | GameMode::MultiPick => true,
        }
    }

    fn apply(&mut self, winner: AgentId, items: &[Item], payment: &Rational, mode: &GameMode) {
        self.rounds_played += 1;
        let agent = self.agents.get_mut(&winner).expect("winner exists");
        agent.budget -= payment;
        agent.spent += payment;
        for &item in items {
            agent.bundle.insert(item);
            self.remaining.remove(item);
        }
        agent.active = Self::still_active(agent, mode);
    }

    pub fn allocation(&self) -> Allocation {
        Allocation::new(
            self.agents
                .values()
                .map(|a| (a.id, a.bundle.clone()))
                .collect(),
        )
        .expect("bundles are disjoint by construction")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    /// 1-based.
    pub round: u32,
    /// Bids of the agents active at the start of the round, after clamping.
    pub bids: BTreeMap<AgentId, Rational>,
    pub winner: AgentId,
    pub items: Vec<Item>,
    pub payment: Rational,
}

impl RoundRecord {
    pub fn winning_bid(&self) -> &Rational {
        &self.bids[&self.winner]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    NegativeBid,
    BidAboveBudget,
}

/// A bid the engine had to clamp; `requested` is what the strategy asked for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub round: u32,
    pub agent: AgentId,
    pub kind: ViolationKind,
    pub requested: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub config: GameConfig,
    pub rounds: Vec<RoundRecord>,
    pub allocation: Allocation,
    pub unallocated: ItemSet,
    pub violations: Vec<Violation>,
}

impl Transcript {
    /// `(round, bid)` for every round in which `agent` bid.
    pub fn bids_of(&self, agent: AgentId) -> Vec<(u32, Rational)> {
        self.rounds
            .iter()
            .filter_map(|r| r.bids.get(&agent).map(|b| (r.round, b.clone())))
            .collect()
    }

    pub fn payments_of(&self, agent: AgentId) -> Rational {
        self.rounds
            .iter()
            .filter(|r| r.winner == agent)
            .fold(Rational::zero(), |acc, r| acc + &r.payment)
    }
}

/// What a strategy may see: budgets, bundles, remaining items and all
/// earlier bids.
#[derive(Debug, Clone, Copy)]
pub struct PublicView<'a> {
    pub me: AgentId,
    pub state: &'a GameState,
    pub history: &'a [RoundRecord],
    pub config: &'a GameConfig,
}

impl<'a> PublicView<'a> {
    pub fn own(&self) -> &'a AgentState {
        self.state.agent(self.me)
    }

    /// The same view from another agent's seat.
    pub fn as_agent(&self, other: AgentId) -> PublicView<'a> {
        PublicView { me: other, ..*self }
    }

    /// 1-based number of the round being played.
    pub fn round(&self) -> u32 {
        self.state.rounds_played() + 1
    }
}

/// A bidding strategy. One instance plays one game.
pub trait Strategy: Send {
    /// The bid for the current round; the engine clamps it to
    /// `[0, remaining budget]` and records any clamp.
    fn bid(&mut self, view: &PublicView<'_>) -> Rational;

    /// Items taken after winning with `bid`. Exactly one item outside
    /// multi-pick mode.
    fn pick(&mut self, view: &PublicView<'_>, bid: &Rational) -> Vec<Item>;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("no strategy for agent {0}")]
    MissingStrategy(AgentId),
    #[error("round {round}: agent {agent} made an invalid pick: {reason}")]
    InvalidPick {
        round: u32,
        agent: AgentId,
        reason: String,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

struct TieBreaker {
    policy: TieBreakPolicy,
    rng: ChaCha8Rng,
}

impl TieBreaker {
    fn new(config: &GameConfig) -> Self {
        Self {
            policy: config.tie_breaker.clone(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        }
    }

    /// `candidates` is nonempty and sorted by id.
    fn choose(&mut self, round: u32, candidates: &[AgentId]) -> AgentId {
        match &self.policy {
            TieBreakPolicy::Lexicographic => candidates[0],
            TieBreakPolicy::Scripted(prefs) => prefs
                .get(round as usize - 1)
                .and_then(|list| list.iter().find(|a| candidates.contains(a)))
                .copied()
                .unwrap_or(candidates[0]),
            TieBreakPolicy::SeededRandom => {
                if candidates.len() == 1 {
                    candidates[0]
                } else {
                    candidates[self.rng.gen_range(0..candidates.len())]
                }
            }
            TieBreakPolicy::AdversarialAgainst(p) => candidates
                .iter()
                .find(|a| *a != p)
                .copied()
                .unwrap_or(candidates[0]),
        }
    }
}

fn max_bidders(bids: &BTreeMap<AgentId, Rational>) -> Vec<AgentId> {
    let top = bids.values().max().expect("at least one bid");
    bids.iter()
        .filter(|(_, b)| *b == top)
        .map(|(&a, _)| a)
        .collect()
}

/// Checks a pick against the rules; returns the payment.
fn check_pick(
    state: &GameState,
    mode: &GameMode,
    winner: AgentId,
    bid: &Rational,
    items: &[Item],
) -> Result<Rational, String> {
    if items.is_empty() {
        return Err("no item picked".into());
    }
    let distinct: BTreeSet<_> = items.iter().collect();
    if distinct.len() != items.len() {
        return Err("duplicate items".into());
    }
    if let Some(item) = items.iter().find(|i| !state.remaining().contains(**i)) {
        return Err(format!("{item} is not available"));
    }
    match mode {
        GameMode::MultiPick => {
            let payment = bid * Rational::from_integer(items.len().into());
            if payment > state.agent(winner).budget {
                return Err(format!(
                    "{} items at bid {} exceed the remaining budget",
                    items.len(),
                    rational::Q(bid)
                ));
            }
            Ok(payment)
        }
        GameMode::Standard | GameMode::Altruistic { .. } => {
            if items.len() != 1 {
                return Err(format!("{} items picked, exactly one allowed", items.len()));
            }
            Ok(bid.clone())
        }
    }
}

/// Plays the game to completion.
pub fn run_game(
    instance: &Instance,
    strategies: &mut BTreeMap<AgentId, Box<dyn Strategy>>,
    config: &GameConfig,
) -> Result<Transcript, GameError> {
    config.validate()?;
    if let Some(id) = instance.agent_ids().find(|id| !strategies.contains_key(id)) {
        return Err(GameError::MissingStrategy(id));
    }
    let mut state = GameState::new(instance);
    let mut rounds: Vec<RoundRecord> = Vec::new();
    let mut violations = Vec::new();
    let mut ties = TieBreaker::new(config);

    while !state.is_over() {
        let round = state.rounds_played() + 1;
        let mut bids = BTreeMap::new();
        for id in state.active_ids() {
            let view = PublicView {
                me: id,
                state: &state,
                history: &rounds,
                config,
            };
            let requested = strategies.get_mut(&id).expect("checked").bid(&view);
            let budget = &state.agent(id).budget;
            let bid = if requested.is_negative() {
                violations.push(Violation {
                    round,
                    agent: id,
                    kind: ViolationKind::NegativeBid,
                    requested,
                });
                Rational::zero()
            } else if &requested > budget {
                violations.push(Violation {
                    round,
                    agent: id,
                    kind: ViolationKind::BidAboveBudget,
                    requested,
                });
                budget.clone()
            } else {
                requested
            };
            bids.insert(id, bid);
        }
        let winner = ties.choose(round, &max_bidders(&bids));
        let bid = bids[&winner].clone();
        let view = PublicView {
            me: winner,
            state: &state,
            history: &rounds,
            config,
        };
        let items = strategies.get_mut(&winner).expect("checked").pick(&view, &bid);
        let payment = check_pick(&state, &config.mode, winner, &bid, &items).map_err(|reason| {
            GameError::InvalidPick {
                round,
                agent: winner,
                reason,
            }
        })?;
        state.apply(winner, &items, &payment, &config.mode);
        rounds.push(RoundRecord {
            round,
            bids,
            winner,
            items,
            payment,
        });
    }

    Ok(Transcript {
        config: config.clone(),
        allocation: state.allocation(),
        unallocated: state.remaining().clone(),
        rounds,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("transcript was produced under a different configuration")]
    ConfigMismatch,
    #[error("round {0}: {1}")]
    Round(u32, String),
    #[error("transcript ends while the game is still running")]
    Incomplete,
    #[error("final allocation does not match the recorded picks")]
    AllocationMismatch,
    #[error("unallocated items do not match the recorded picks")]
    LeftoverMismatch,
}

/// States at each round boundary: index `r` is the state after `r` rounds.
/// Fails at the first round that breaks the rules.
pub fn replay_states(
    instance: &Instance,
    transcript: &Transcript,
) -> Result<Vec<GameState>, VerifyError> {
    let config = &transcript.config;
    let mut state = GameState::new(instance);
    let mut ties = TieBreaker::new(config);
    let mut states = vec![state.clone()];
    for (index, record) in transcript.rounds.iter().enumerate() {
        let round = index as u32 + 1;
        let fail = |msg: String| VerifyError::Round(round, msg);
        if record.round != round {
            return Err(fail(format!("recorded as round {}", record.round)));
        }
        if state.is_over() {
            return Err(fail("played after the game ended".into()));
        }
        let active = state.active_ids();
        let bidders: Vec<AgentId> = record.bids.keys().copied().collect();
        if bidders != active {
            return Err(fail(format!(
                "bidders {bidders:?} differ from active agents {active:?}"
            )));
        }
        for (agent, bid) in &record.bids {
            if bid.is_negative() || bid > &state.agent(*agent).budget {
                return Err(fail(format!("bid of {agent} is outside [0, budget]")));
            }
        }
        let expected = ties.choose(round, &max_bidders(&record.bids));
        if expected != record.winner {
            return Err(fail(format!(
                "winner {} but the tie-break policy selects {expected}",
                record.winner
            )));
        }
        let payment = check_pick(
            &state,
            &config.mode,
            record.winner,
            record.winning_bid(),
            &record.items,
        )
        .map_err(fail)?;
        if payment != record.payment {
            return Err(fail(format!(
                "payment {} but the rules require {}",
                rational::Q(&record.payment),
                rational::Q(&payment)
            )));
        }
        state.apply(record.winner, &record.items, &payment, &config.mode);
        states.push(state.clone());
    }
    Ok(states)
}

/// Replays `transcript` from `instance` under `config` and checks every rule.
pub fn verify_transcript(
    transcript: &Transcript,
    instance: &Instance,
    config: &GameConfig,
) -> Result<(), VerifyError> {
    if transcript.config != *config {
        return Err(VerifyError::ConfigMismatch);
    }
    config
        .validate()
        .map_err(|e| VerifyError::Round(0, e.to_string()))?;
    let states = replay_states(instance, transcript)?;
    let last = states.last().expect("initial state");
    if !last.is_over() {
        return Err(VerifyError::Incomplete);
    }
    if last.allocation() != transcript.allocation {
        return Err(VerifyError::AllocationMismatch);
    }
    if *last.remaining() != transcript.unallocated {
        return Err(VerifyError::LeftoverMismatch);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::valuation::AdditiveValuation;

    /// Bids a fixed fraction of the remaining budget and takes the first item.
    struct Fraction(Rational);

    impl Strategy for Fraction {
        fn bid(&mut self, view: &PublicView<'_>) -> Rational {
            &view.own().budget * &self.0
        }
        fn pick(&mut self, view: &PublicView<'_>, _: &Rational) -> Vec<Item> {
            vec![view.state.remaining().first().unwrap()]
        }
    }

    struct Constant(Rational);

    impl Strategy for Constant {
        fn bid(&mut self, _: &PublicView<'_>) -> Rational {
            self.0.clone()
        }
        fn pick(&mut self, view: &PublicView<'_>, _: &Rational) -> Vec<Item> {
            vec![view.state.remaining().first().unwrap()]
        }
    }

    fn instance(n: i64, m: u32) -> Instance {
        let v: crate::valuation::Valuation =
            AdditiveValuation::from_values(&vec![int(1); m as usize])
                .unwrap()
                .into();
        Instance::equal_entitlements(m, vec![v; n as usize]).unwrap()
    }

    fn boxed(s: impl Strategy + 'static) -> Box<dyn Strategy> {
        Box::new(s)
    }

    #[test]
    fn single_full_budget_agent_wins_once_then_stops() {
        let inst = instance(1, 3);
        let mut strategies = BTreeMap::from([(AgentId(0), boxed(Fraction(int(1))))]);
        let t = run_game(&inst, &mut strategies, &GameConfig::standard()).unwrap();
        assert_eq!(t.rounds.len(), 1);
        assert_eq!(t.allocation.bundle(AgentId(0)).len(), 1);
        assert_eq!(t.unallocated.len(), 2);
        assert!(verify_transcript(&t, &inst, &GameConfig::standard()).is_ok());
    }

    #[test]
    fn zero_bids_still_allocate() {
        let inst = instance(2, 3);
        let mut strategies = BTreeMap::from([
            (AgentId(0), boxed(Constant(int(0)))),
            (AgentId(1), boxed(Constant(int(0)))),
        ]);
        let t = run_game(&inst, &mut strategies, &GameConfig::standard()).unwrap();
        assert_eq!(t.rounds.len(), 3);
        assert!(t.rounds.iter().all(|r| r.winner == AgentId(0)));
        let adversarial =
            GameConfig::standard().with_tie_breaker(TieBreakPolicy::AdversarialAgainst(AgentId(0)));
        let mut strategies = BTreeMap::from([
            (AgentId(0), boxed(Constant(int(0)))),
            (AgentId(1), boxed(Constant(int(0)))),
        ]);
        let t = run_game(&inst, &mut strategies, &adversarial).unwrap();
        assert!(t.rounds.iter().all(|r| r.winner == AgentId(1)));
        assert!(verify_transcript(&t, &inst, &adversarial).is_ok());
    }

    #[test]
    fn clamps_are_recorded() {
        let inst = instance(2, 2);
        let mut strategies = BTreeMap::from([
            (AgentId(0), boxed(Constant(int(5)))),
            (AgentId(1), boxed(Constant(int(-1)))),
        ]);
        let t = run_game(&inst, &mut strategies, &GameConfig::standard()).unwrap();
        assert_eq!(t.violations[0].kind, ViolationKind::BidAboveBudget);
        assert_eq!(t.violations[1].kind, ViolationKind::NegativeBid);
        assert_eq!(t.rounds[0].payment, rat(1, 2));
        assert!(verify_transcript(&t, &inst, &GameConfig::standard()).is_ok());
    }

    #[test]
    fn tampered_payment_is_rejected() {
        let inst = instance(2, 4);
        let mut strategies = BTreeMap::from([
            (AgentId(0), boxed(Fraction(rat(1, 2)))),
            (AgentId(1), boxed(Fraction(rat(1, 3)))),
        ]);
        let config = GameConfig::standard();
        let mut t = run_game(&inst, &mut strategies, &config).unwrap();
        assert!(verify_transcript(&t, &inst, &config).is_ok());
        t.rounds[0].payment = rat(1, 100);
        assert!(matches!(
            verify_transcript(&t, &inst, &config),
            Err(VerifyError::Round(1, _))
        ));
    }

    #[test]
    fn altruistic_deactivation() {
        let inst = instance(2, 6);
        let config = GameConfig::altruistic(rat(1, 2));
        let mut strategies = BTreeMap::from([
            (AgentId(0), boxed(Constant(rat(1, 8)))),
            (AgentId(1), boxed(Constant(rat(1, 10)))),
        ]);
        let t = run_game(&inst, &mut strategies, &config).unwrap();
        // Agent 0 stays active at spend exactly 1/4 = ρ·b and leaves at 3/8.
        let wins0 = t.rounds.iter().filter(|r| r.winner == AgentId(0)).count();
        assert_eq!(wins0, 3);
        assert!(verify_transcript(&t, &inst, &config).is_ok());

        let reaches = config.clone().with_trigger(AltruisticTrigger::Reaches);
        let mut strategies = BTreeMap::from([
            (AgentId(0), boxed(Constant(rat(1, 8)))),
            (AgentId(1), boxed(Constant(rat(1, 10)))),
        ]);
        let t2 = run_game(&inst, &mut strategies, &reaches).unwrap();
        assert_eq!(t2.rounds.iter().filter(|r| r.winner == AgentId(0)).count(), 2);

        // A bid recorded after deactivation breaks replay.
        let mut forged = t.clone();
        let last = forged.rounds.len() - 1;
        forged.rounds[last].bids.insert(AgentId(0), int(0));
        assert!(verify_transcript(&forged, &inst, &config).is_err());
    }

    #[test]
    fn multi_pick_charges_per_item() {
        struct TakeTwo;
        impl Strategy for TakeTwo {
            fn bid(&mut self, _: &PublicView<'_>) -> Rational {
                rat(1, 4)
            }
            fn pick(&mut self, view: &PublicView<'_>, _: &Rational) -> Vec<Item> {
                view.state.remaining().iter().take(2).collect()
            }
        }
        let inst = instance(1, 5);
        let config = GameConfig::multi_pick();
        let mut strategies = BTreeMap::from([(AgentId(0), boxed(TakeTwo))]);
        let t = run_game(&inst, &mut strategies, &config).unwrap();
        assert_eq!(t.rounds.len(), 2);
        assert_eq!(t.rounds[0].payment, rat(1, 2));
        assert_eq!(t.unallocated.len(), 1);
        assert!(verify_transcript(&t, &inst, &config).is_ok());

        let mut strategies = BTreeMap::from([(AgentId(0), boxed(TakeTwo))]);
        let err = run_game(&inst, &mut strategies, &GameConfig::standard()).unwrap_err();
        assert!(matches!(err, GameError::InvalidPick { .. }));
    }

    #[test]
    fn seeded_random_is_reproducible() {
        let inst = instance(3, 6);
        let run = |seed| {
            let config = GameConfig::standard()
                .with_tie_breaker(TieBreakPolicy::SeededRandom)
                .with_seed(seed);
            let mut strategies: BTreeMap<_, _> = (0..3)
                .map(|i| (AgentId(i), boxed(Constant(rat(1, 30)))))
                .collect();
            let t = run_game(&inst, &mut strategies, &config).unwrap();
            assert!(verify_transcript(&t, &inst, &config).is_ok());
            t.rounds.iter().map(|r| r.winner).collect::<Vec<_>>()
        };
        assert_eq!(run(7), run(7));
    }

    #[test]
    fn scripted_ties() {
        let inst = instance(2, 2);
        let config = GameConfig::standard().with_tie_breaker(TieBreakPolicy::Scripted(vec![
            vec![AgentId(1)],
            vec![],
        ]));
        let mut strategies = BTreeMap::from([
            (AgentId(0), boxed(Constant(int(0)))),
            (AgentId(1), boxed(Constant(int(0)))),
        ]);
        let t = run_game(&inst, &mut strategies, &config).unwrap();
        assert_eq!(t.rounds[0].winner, AgentId(1));
        assert_eq!(t.rounds[1].winner, AgentId(0));
    }
}
