//! Bidding strategies: the proportional APS strategy, the altruistic
//! proportional MMS strategy, the unit-demand full-budget strategy, scripted
//! replays, and a family of opponents used to stress the guarantees.
//!
//! Strategies see valuations only through [`ValuationOracle`] value queries.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{PublicView, Strategy};
use crate::items::{Item, ItemSet};
use crate::model::AgentId;
use crate::rational::{self, Rational};
use crate::valuation::{Oracle, Scaled, Truncated, ValuationOracle};

/// `(item, v(e | C))` maximising the marginal over `items`, lowest id on ties.
pub fn best_marginal<V: ValuationOracle + ?Sized>(
    v: &V,
    bundle: &ItemSet,
    items: &ItemSet,
) -> Option<(Item, Rational)> {
    let base = v.value(bundle);
    let mut best: Option<(Item, Rational)> = None;
    for e in items.iter() {
        let gain = v.value(&bundle.with(e)) - &base;
        if best.as_ref().is_none_or(|(_, g)| gain > *g) {
            best = Some((e, gain));
        }
    }
    best
}

/// `(item, v({e}))` maximising the stand-alone value, lowest id on ties.
pub fn best_single<V: ValuationOracle + ?Sized>(v: &V, items: &ItemSet) -> Option<(Item, Rational)> {
    best_marginal(v, &ItemSet::new(), items)
}

/// The default proportional parameter `1/(3 − 2b)`.
pub fn default_rho(b: &Rational) -> Rational {
    rational::one() / (rational::int(3) - rational::int(2) * b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Phase {
    /// Some remaining item is worth more than `2ρ·share`.
    LargeItems,
    /// Proportional bidding on the residual instance rescaled by `gamma`.
    Proportional { since_round: u32, gamma: Rational },
}

/// The proportional(ρ) strategy for an APS target.
///
/// The valuation is truncated at `share`. While a large item remains the
/// agent bids her whole budget; afterwards she bids
/// `(1/2ρ)·(b/share)·max_e v(e | C)`, capped by her remaining budget.
#[derive(Debug, Clone)]
pub struct ProportionalAps {
    v: Truncated<Oracle>,
    b: Rational,
    rho: Rational,
    share: Rational,
    phase: Phase,
}

/// # Panics
/// If `rho ≤ 0`.
pub fn make_proportional_aps(v: Oracle, b: Rational, rho: Rational, share: Rational) -> ProportionalAps {
    assert!(rho.is_positive(), "rho must be positive");
    ProportionalAps {
        v: Truncated::new(v, share.clone()),
        b,
        rho,
        share,
        phase: Phase::LargeItems,
    }
}

impl ProportionalAps {
    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    pub fn share(&self) -> &Rational {
        &self.share
    }

    pub fn entitlement(&self) -> &Rational {
        &self.b
    }

    pub fn phase(&self) -> &Phase {
        &self.phase
    }

    /// The truncated valuation the strategy bids with.
    pub fn valuation(&self) -> &Truncated<Oracle> {
        &self.v
    }

    pub fn large_threshold(&self) -> Rational {
        rational::int(2) * &self.rho * &self.share
    }

    pub fn has_large_item(&self, remaining: &ItemSet) -> bool {
        let threshold = self.large_threshold();
        remaining
            .iter()
            .any(|e| self.v.value(&ItemSet::singleton(e)) > threshold)
    }

    /// `(1/2ρ)·(b/share)·max_e v(e | C)` before the budget cap.
    pub fn formula_bid(&self, bundle: &ItemSet, remaining: &ItemSet) -> Rational {
        let top = best_marginal(&self.v, bundle, remaining)
            .map(|(_, g)| g)
            .unwrap_or_else(Rational::zero);
        &self.b / (rational::int(2) * &self.rho * &self.share) * top
    }
}

impl Strategy for ProportionalAps {
    fn bid(&mut self, view: &PublicView<'_>) -> Rational {
        if !self.share.is_positive() {
            return Rational::zero();
        }
        let me = view.own();
        let remaining = view.state.remaining();
        if self.phase == Phase::LargeItems {
            if self.has_large_item(remaining) {
                return me.budget.clone();
            }
            self.phase = Phase::Proportional {
                since_round: view.round(),
                gamma: view.state.active_budget(),
            };
        }
        let Phase::Proportional { gamma, .. } = &self.phase else {
            unreachable!()
        };
        // Simulate the residual instance: entitlement b/γ there, bids scaled
        // back by γ here.
        let b_hat = &self.b / gamma;
        let top = best_marginal(&self.v, &me.bundle, remaining)
            .map(|(_, g)| g)
            .unwrap_or_else(Rational::zero);
        let intended = b_hat / (rational::int(2) * &self.rho * &self.share) * top;
        rational::min(&(gamma * intended), &me.budget)
    }

    fn pick(&mut self, view: &PublicView<'_>, _bid: &Rational) -> Vec<Item> {
        let me = view.own();
        let remaining = view.state.remaining();
        let choice = if self.share.is_positive() && self.has_large_item(remaining) {
            best_single(&self.v, remaining)
        } else {
            best_marginal(&self.v, &me.bundle, remaining)
        };
        vec![choice.expect("the game never asks for a pick with no items").0]
    }
}

/// The altruistic proportional strategy for an MMS target: the valuation is
/// scaled so the share equals `b`, truncated at `b`, and the agent bids
/// `max_e v(e | C)` capped by her remaining budget.
#[derive(Debug, Clone)]
pub struct AltruisticMms {
    v: Truncated<Scaled<Oracle>>,
    share: Rational,
}

pub fn make_altruistic_proportional_mms(v: Oracle, b: Rational, share: Rational) -> AltruisticMms {
    let factor = if share.is_positive() {
        &b / &share
    } else {
        Rational::zero()
    };
    AltruisticMms {
        v: Truncated::new(Scaled::new(v, factor), b),
        share,
    }
}

impl AltruisticMms {
    pub fn valuation(&self) -> &Truncated<Scaled<Oracle>> {
        &self.v
    }
}

impl Strategy for AltruisticMms {
    fn bid(&mut self, view: &PublicView<'_>) -> Rational {
        if !self.share.is_positive() {
            return Rational::zero();
        }
        let me = view.own();
        let top = best_marginal(&self.v, &me.bundle, view.state.remaining())
            .map(|(_, g)| g)
            .unwrap_or_else(Rational::zero);
        rational::min(&top, &me.budget)
    }

    fn pick(&mut self, view: &PublicView<'_>, _bid: &Rational) -> Vec<Item> {
        let choice = best_marginal(&self.v, &view.own().bundle, view.state.remaining());
        vec![choice.expect("items remain").0]
    }
}

/// Bids the whole budget until the first win, takes the most valuable
/// remaining item, then bids 0.
#[derive(Debug, Clone)]
pub struct UnitDemandFullBudget {
    v: Oracle,
}

pub fn make_unit_demand_full_budget(v: Oracle) -> UnitDemandFullBudget {
    UnitDemandFullBudget { v }
}

impl Strategy for UnitDemandFullBudget {
    fn bid(&mut self, view: &PublicView<'_>) -> Rational {
        let me = view.own();
        if me.bundle.is_empty() {
            me.budget.clone()
        } else {
            Rational::zero()
        }
    }

    fn pick(&mut self, view: &PublicView<'_>, _bid: &Rational) -> Vec<Item> {
        let remaining = view.state.remaining();
        let choice = if view.own().bundle.is_empty() {
            best_single(&self.v, remaining)
        } else {
            remaining.first().map(|e| (e, Rational::zero()))
        };
        vec![choice.expect("items remain").0]
    }
}

/// Replays fixed bids (index 0 is round 1, missing rounds bid 0) and picks
/// keyed by round; an unscripted win takes the lowest-id remaining item.
#[derive(Debug, Clone, Default)]
pub struct Scripted {
    bids: BTreeMap<u32, Rational>,
    picks: BTreeMap<u32, Vec<Item>>,
}

pub fn make_scripted(bids: BTreeMap<u32, Rational>, picks: BTreeMap<u32, Vec<Item>>) -> Scripted {
    Scripted { bids, picks }
}

impl Scripted {
    pub fn bids(&self) -> &BTreeMap<u32, Rational> {
        &self.bids
    }

    pub fn picks(&self) -> &BTreeMap<u32, Vec<Item>> {
        &self.picks
    }
}

impl Strategy for Scripted {
    fn bid(&mut self, view: &PublicView<'_>) -> Rational {
        let wanted = self
            .bids
            .get(&view.round())
            .cloned()
            .unwrap_or_else(Rational::zero);
        rational::min(&wanted, &view.own().budget)
    }

    fn pick(&mut self, view: &PublicView<'_>, _bid: &Rational) -> Vec<Item> {
        self.picks
            .get(&view.round())
            .cloned()
            .unwrap_or_else(|| view.state.remaining().first().into_iter().collect())
    }
}

/// Always bids a fixed fraction of its remaining budget and takes the
/// lowest-id item. Bidding 0 models a passive agent.
#[derive(Debug, Clone)]
pub struct FractionBidder {
    pub fraction: Rational,
}

impl Strategy for FractionBidder {
    fn bid(&mut self, view: &PublicView<'_>) -> Rational {
        &view.own().budget * &self.fraction
    }

    fn pick(&mut self, view: &PublicView<'_>, _bid: &Rational) -> Vec<Item> {
        view.state.remaining().first().into_iter().collect()
    }
}

/// Bids a random fraction `k/denominator` of its remaining budget and takes
/// a random remaining item.
#[derive(Debug, Clone)]
pub struct RandomBidder {
    rng: ChaCha8Rng,
    denominator: u32,
}

impl RandomBidder {
    pub fn new(seed: u64, denominator: u32) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            denominator: denominator.max(1),
        }
    }
}

impl Strategy for RandomBidder {
    fn bid(&mut self, view: &PublicView<'_>) -> Rational {
        let k = self.rng.gen_range(0..=self.denominator);
        &view.own().budget * rational::rat(k.into(), self.denominator.into())
    }

    fn pick(&mut self, view: &PublicView<'_>, _bid: &Rational) -> Vec<Item> {
        let items = view.state.remaining().to_vec();
        vec![items[self.rng.gen_range(0..items.len())]]
    }
}

/// Bids `scale` times its own best marginal (capped by budget) and takes its
/// own best marginal item.
#[derive(Debug, Clone)]
pub struct GreedyBidder {
    pub v: Oracle,
    pub scale: Rational,
}

impl Strategy for GreedyBidder {
    fn bid(&mut self, view: &PublicView<'_>) -> Rational {
        let me = view.own();
        let top = best_marginal(&*self.v, &me.bundle, view.state.remaining())
            .map(|(_, g)| g)
            .unwrap_or_else(Rational::zero);
        rational::min(&(top * &self.scale), &me.budget)
    }

    fn pick(&mut self, view: &PublicView<'_>, _bid: &Rational) -> Vec<Item> {
        let me = view.own();
        vec![best_marginal(&*self.v, &me.bundle, view.state.remaining())
            .expect("items remain")
            .0]
    }
}

/// Simulates the target's strategy from the target's seat, bids exactly
/// what the target would (so ties go against the target under adversarial
/// tie-breaking) and takes the item the target wants most.
#[derive(Debug, Clone)]
pub struct ShadowAdversary<S> {
    pub target: AgentId,
    pub mirror: S,
}

impl<S: Strategy> Strategy for ShadowAdversary<S> {
    fn bid(&mut self, view: &PublicView<'_>) -> Rational {
        let seat = view.as_agent(self.target);
        if seat.own().active {
            self.mirror.bid(&seat)
        } else {
            Rational::zero()
        }
    }

    fn pick(&mut self, view: &PublicView<'_>, bid: &Rational) -> Vec<Item> {
        self.mirror.pick(&view.as_agent(self.target), bid)
    }
}

/// Bids its whole budget whenever the target's best marginal item is worth
/// at least `threshold` to the target, and takes that item.
#[derive(Debug, Clone)]
pub struct Sniper {
    pub target_valuation: Oracle,
    pub target: AgentId,
    pub threshold: Rational,
}

impl Strategy for Sniper {
    fn bid(&mut self, view: &PublicView<'_>) -> Rational {
        let bundle = &view.state.agent(self.target).bundle;
        match best_marginal(&*self.target_valuation, bundle, view.state.remaining()) {
            Some((_, g)) if g >= self.threshold && g.is_positive() => view.own().budget.clone(),
            _ => Rational::zero(),
        }
    }

    fn pick(&mut self, view: &PublicView<'_>, _bid: &Rational) -> Vec<Item> {
        let bundle = &view.state.agent(self.target).bundle;
        vec![best_marginal(&*self.target_valuation, bundle, view.state.remaining())
            .expect("items remain")
            .0]
    }
}

/// After the target wins an item, bids its whole budget for the next
/// `rounds` rounds and takes items from the target's column; otherwise bids
/// 0 and takes the lowest-id item.
#[derive(Debug, Clone)]
pub struct ColumnSniper {
    pub target: AgentId,
    pub rounds: u32,
    /// Column index of every item.
    pub column_of: Arc<BTreeMap<Item, u32>>,
}

impl ColumnSniper {
    fn hot_column(&self, view: &PublicView<'_>) -> Option<u32> {
        let now = view.round();
        view.history
            .iter()
            .rev()
            .filter(|r| r.winner == self.target && r.round + self.rounds >= now)
            .find_map(|r| r.items.first().and_then(|e| self.column_of.get(e).copied()))
    }
}

impl Strategy for ColumnSniper {
    fn bid(&mut self, view: &PublicView<'_>) -> Rational {
        if self.hot_column(view).is_some() {
            view.own().budget.clone()
        } else {
            Rational::zero()
        }
    }

    fn pick(&mut self, view: &PublicView<'_>, _bid: &Rational) -> Vec<Item> {
        let remaining = view.state.remaining();
        let in_column = self.hot_column(view).and_then(|c| {
            remaining
                .iter()
                .find(|e| self.column_of.get(e) == Some(&c))
        });
        in_column
            .or_else(|| remaining.first())
            .into_iter()
            .collect()
    }
}

/// Always bids a fixed amount (capped by budget) and takes the lowest-id
/// item.
#[derive(Debug, Clone)]
pub struct ConstantBidder {
    pub amount: Rational,
}

impl Strategy for ConstantBidder {
    fn bid(&mut self, view: &PublicView<'_>) -> Rational {
        rational::min(&self.amount, &view.own().budget)
    }

    fn pick(&mut self, view: &PublicView<'_>, _bid: &Rational) -> Vec<Item> {
        view.state.remaining().first().into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_game, GameConfig, TieBreakPolicy};
    use crate::model::{Agent, Instance};
    use crate::rational::{int, rat};
    use crate::valuation::{AdditiveValuation, UnitDemandValuation, Valuation};

    fn oracle(v: impl Into<Valuation>) -> Oracle {
        Arc::new(v.into())
    }

    #[test]
    fn default_rho_values() {
        assert_eq!(default_rho(&rat(1, 2)), rat(1, 2));
        assert_eq!(default_rho(&rat(1, 4)), rat(4, 10));
        assert_eq!(default_rho(&int(1)), int(1));
    }

    #[test]
    fn single_agent_takes_everything_of_value() {
        let v = AdditiveValuation::from_values(&[int(2), int(1), int(0)]).unwrap();
        let inst = Instance::new(
            (0..3).map(Item).collect(),
            vec![Agent::new(0, int(1), v.clone())],
        )
        .unwrap();
        let s = make_proportional_aps(oracle(v), int(1), int(1), int(3));
        let mut strategies: BTreeMap<AgentId, Box<dyn Strategy>> =
            BTreeMap::from([(AgentId(0), Box::new(s) as Box<dyn Strategy>)]);
        let t = run_game(&inst, &mut strategies, &GameConfig::standard()).unwrap();
        assert_eq!(t.allocation.value_of(&inst, AgentId(0)).unwrap(), int(3));
    }

    #[test]
    fn unit_demand_full_budget_secures_aps() {
        let values = [int(5), int(4), int(3), int(2)];
        let v = UnitDemandValuation::from_values(&values).unwrap();
        let agents = (0..3)
            .map(|i| Agent::new(i, rat(1, 3), v.clone()))
            .collect();
        let inst = Instance::new((0..4).map(Item).collect(), agents).unwrap();
        let mut strategies: BTreeMap<AgentId, Box<dyn Strategy>> = BTreeMap::new();
        strategies.insert(AgentId(0), Box::new(make_unit_demand_full_budget(oracle(v.clone()))));
        for i in 1..3 {
            strategies.insert(AgentId(i), Box::new(FractionBidder { fraction: int(1) }));
        }
        let config =
            GameConfig::standard().with_tie_breaker(TieBreakPolicy::AdversarialAgainst(AgentId(0)));
        let t = run_game(&inst, &mut strategies, &config).unwrap();
        let won = t.rounds.iter().position(|r| r.winner == AgentId(0)).unwrap();
        assert!(won < 3);
        assert!(t.allocation.value_of(&inst, AgentId(0)).unwrap() >= int(3));
    }

    #[test]
    fn large_item_phase_bids_everything() {
        let v = AdditiveValuation::from_values(&[int(10), int(1), int(1)]).unwrap();
        let s = make_proportional_aps(oracle(v), rat(1, 2), rat(1, 2), int(2));
        // Truncated at 2, the large threshold is 2ρ·share = 2: no item exceeds it.
        assert!(!s.has_large_item(&ItemSet::from_iter((0..3).map(Item))));
        let v = AdditiveValuation::from_values(&[int(10), int(1), int(1)]).unwrap();
        let s = make_proportional_aps(oracle(v), rat(1, 2), rat(1, 3), int(2));
        assert!(s.has_large_item(&ItemSet::from_iter((0..3).map(Item))));
    }

    #[test]
    fn altruistic_single_item() {
        let v = AdditiveValuation::from_values(&[int(5)]).unwrap();
        let inst = Instance::new(vec![Item(0)], vec![Agent::new(0, int(1), v.clone())]).unwrap();
        let s = make_altruistic_proportional_mms(oracle(v), int(1), int(5));
        let mut strategies: BTreeMap<AgentId, Box<dyn Strategy>> =
            BTreeMap::from([(AgentId(0), Box::new(s) as Box<dyn Strategy>)]);
        let t = run_game(&inst, &mut strategies, &GameConfig::altruistic(rat(10, 27))).unwrap();
        assert_eq!(t.rounds[0].bids[&AgentId(0)], int(1));
        assert_eq!(t.allocation.value_of(&inst, AgentId(0)).unwrap(), int(5));
    }

    #[test]
    fn scripted_replays_and_clamps() {
        let v = AdditiveValuation::from_values(&[int(1), int(1)]).unwrap();
        let inst = Instance::equal_entitlements(2, vec![v.clone().into(), v.into()]).unwrap();
        let a = make_scripted(
            BTreeMap::from([(1, int(7)), (2, int(0))]),
            BTreeMap::from([(1, vec![Item(1)])]),
        );
        let mut strategies: BTreeMap<AgentId, Box<dyn Strategy>> = BTreeMap::from([
            (AgentId(0), Box::new(a) as Box<dyn Strategy>),
            (AgentId(1), Box::new(ConstantBidder { amount: rat(1, 10) }) as Box<dyn Strategy>),
        ]);
        let t = run_game(&inst, &mut strategies, &GameConfig::standard()).unwrap();
        assert_eq!(t.rounds[0].winner, AgentId(0));
        assert_eq!(t.rounds[0].items, vec![Item(1)]);
        assert_eq!(t.rounds[0].payment, rat(1, 2));
        assert!(t.violations.is_empty());
    }
}
