//! Instances, allocations and the instance transformations used by the
//! strategies and their analysis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::engine::GameState;
use crate::items::{Item, ItemSet};
use crate::rational::{self, Rational};
use crate::valuation::{Truncated, Valuation, ValuationOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub id: AgentId,
    pub entitlement: Rational,
    pub valuation: Arc<Valuation>,
}

impl Agent {
    pub fn new(id: u32, entitlement: Rational, valuation: impl Into<Valuation>) -> Self {
        Self {
            id: AgentId(id),
            entitlement,
            valuation: Arc::new(valuation.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("duplicate item {0}")]
    DuplicateItem(Item),
    #[error("duplicate agent {0}")]
    DuplicateAgent(AgentId),
    #[error("instance has no agents")]
    NoAgents,
    #[error("entitlement {value} of {agent} is outside (0, 1]")]
    EntitlementRange { agent: AgentId, value: String },
    #[error("entitlements sum to {0}, not 1")]
    EntitlementSum(String),
    #[error("valuation of {0} is not normalized (v(∅) ≠ 0)")]
    NotNormalized(AgentId),
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("unknown item {0}")]
    UnknownItem(Item),
    #[error("item {item} is in the bundles of both {first} and {second}")]
    Overlap {
        item: Item,
        first: AgentId,
        second: AgentId,
    },
    #[error("agent {0} has entitlement 1; removing it leaves nobody to rescale")]
    WholeEntitlement(AgentId),
    #[error("no active agents: remaining budget is zero")]
    NoRemainingBudget,
}

/// An allocation instance: items and agents with entitlements summing to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    items: Vec<Item>,
    item_set: ItemSet,
    agents: Vec<Agent>,
}

impl Instance {
    /// Validates ids, entitlement ranges and the exact unit sum. Agents are
    /// stored sorted by id, items in canonical order.
    pub fn new(items: Vec<Item>, mut agents: Vec<Agent>) -> Result<Self, ModelError> {
        let mut sorted = items.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateItem(w[0]));
        }
        if agents.is_empty() {
            return Err(ModelError::NoAgents);
        }
        agents.sort_by_key(|a| a.id);
        if let Some(w) = agents.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(ModelError::DuplicateAgent(w[0].id));
        }
        let mut total = Rational::zero();
        for agent in &agents {
            if !agent.entitlement.is_positive() || agent.entitlement > Rational::one() {
                return Err(ModelError::EntitlementRange {
                    agent: agent.id,
                    value: rational::format_rational(&agent.entitlement),
                });
            }
            if !agent.valuation.value(&ItemSet::new()).is_zero() {
                return Err(ModelError::NotNormalized(agent.id));
            }
            total += &agent.entitlement;
        }
        if !total.is_one() {
            return Err(ModelError::EntitlementSum(rational::format_rational(&total)));
        }
        let item_set = sorted.iter().copied().collect();
        Ok(Self {
            items: sorted,
            item_set,
            agents,
        })
    }

    /// `n` agents with entitlement `1/n`, items `0..m`.
    pub fn equal_entitlements(m: u32, valuations: Vec<Valuation>) -> Result<Self, ModelError> {
        let n = valuations.len() as i64;
        let agents = valuations
            .into_iter()
            .enumerate()
            .map(|(i, v)| Agent::new(i as u32, rational::rat(1, n), v))
            .collect();
        Self::new((0..m).map(Item).collect(), agents)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item_set(&self) -> &ItemSet {
        &self.item_set
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.agents.iter().map(|a| a.id)
    }

    pub fn agent(&self, id: AgentId) -> Result<&Agent, ModelError> {
        self.agents
            .binary_search_by_key(&id, |a| a.id)
            .map(|i| &self.agents[i])
            .map_err(|_| ModelError::UnknownAgent(id))
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn m(&self) -> usize {
        self.items.len()
    }

    pub fn has_equal_entitlements(&self) -> bool {
        self.agents
            .iter()
            .all(|a| a.entitlement == self.agents[0].entitlement)
    }
}

/// Bundles per agent; pairwise disjoint by construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Allocation {
    bundles: BTreeMap<AgentId, ItemSet>,
}

impl Allocation {
    pub fn new(bundles: BTreeMap<AgentId, ItemSet>) -> Result<Self, ModelError> {
        let mut owner: BTreeMap<Item, AgentId> = BTreeMap::new();
        for (&agent, bundle) in &bundles {
            for item in bundle.iter() {
                if let Some(&first) = owner.get(&item) {
                    return Err(ModelError::Overlap {
                        item,
                        first,
                        second: agent,
                    });
                }
                owner.insert(item, agent);
            }
        }
        Ok(Self { bundles })
    }

    pub fn bundle(&self, agent: AgentId) -> ItemSet {
        self.bundles.get(&agent).cloned().unwrap_or_default()
    }

    pub fn bundles(&self) -> &BTreeMap<AgentId, ItemSet> {
        &self.bundles
    }

    pub fn allocated(&self) -> ItemSet {
        self.bundles
            .values()
            .fold(ItemSet::new(), |acc, b| acc.union(b))
    }

    /// Every allocated item exists and every bundle owner is an agent.
    pub fn check_against(&self, instance: &Instance) -> Result<(), ModelError> {
        for (&agent, bundle) in &self.bundles {
            instance.agent(agent)?;
            if let Some(item) = bundle.iter().find(|i| !instance.item_set().contains(*i)) {
                return Err(ModelError::UnknownItem(item));
            }
        }
        Ok(())
    }

    pub fn value_of(&self, instance: &Instance, agent: AgentId) -> Result<Rational, ModelError> {
        Ok(instance.agent(agent)?.valuation.value(&self.bundle(agent)))
    }
}

/// Weights `λ_T` over bundles; the APS witness.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FractionalPartition {
    pub entries: Vec<(ItemSet, Rational)>,
}

impl FractionalPartition {
    pub fn total_weight(&self) -> Rational {
        self.entries
            .iter()
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    }

    /// `Σ_{T∋e} λ_T`.
    pub fn coverage(&self, item: Item) -> Rational {
        self.entries
            .iter()
            .filter(|(t, _)| t.contains(item))
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    }

    pub fn support(&self) -> impl Iterator<Item = &(ItemSet, Rational)> {
        self.entries.iter().filter(|(_, w)| w.is_positive())
    }

    pub fn items(&self) -> ItemSet {
        self.entries
            .iter()
            .fold(ItemSet::new(), |acc, (t, _)| acc.union(t))
    }
}

/// Drops `removed_agent` and `removed_item`, scaling the other entitlements
/// by `1/(1 − b_i)`.
pub fn reduce_instance(
    instance: &Instance,
    removed_agent: AgentId,
    removed_item: Item,
) -> Result<Instance, ModelError> {
    let b_i = &instance.agent(removed_agent)?.entitlement;
    if b_i.is_one() {
        return Err(ModelError::WholeEntitlement(removed_agent));
    }
    if !instance.item_set().contains(removed_item) {
        return Err(ModelError::UnknownItem(removed_item));
    }
    let scale = (Rational::one() - b_i).recip();
    let agents = instance
        .agents()
        .iter()
        .filter(|a| a.id != removed_agent)
        .map(|a| Agent {
            id: a.id,
            entitlement: &a.entitlement * &scale,
            valuation: Arc::clone(&a.valuation),
        })
        .collect();
    let items = instance
        .items()
        .iter()
        .copied()
        .filter(|&e| e != removed_item)
        .collect();
    Instance::new(items, agents)
}

/// `min(v(S), t)`.
pub fn truncate_valuation<V: ValuationOracle>(v: V, t: Rational) -> Truncated<V> {
    debug_assert!(!t.is_negative(), "truncation level must be nonnegative");
    Truncated::new(v, t)
}

/// The residual instance at a round boundary: active agents with entitlement
/// `budget/γ` and the unallocated items, where `γ` is the total remaining
/// budget of active agents. With `truncate = Some((p, t))`, agent `p`'s
/// valuation is replaced by its truncation at `t`.
pub fn residual_instance(
    state: &GameState,
    base: &Instance,
    truncate: Option<(AgentId, Rational)>,
) -> Result<(Instance, Rational), ModelError> {
    let active: Vec<_> = state.agents().filter(|s| s.active).collect();
    let gamma = active
        .iter()
        .fold(Rational::zero(), |acc, s| acc + &s.budget);
    if !gamma.is_positive() {
        return Err(ModelError::NoRemainingBudget);
    }
    let mut agents = Vec::with_capacity(active.len());
    for s in active {
        // Zero-budget agents are never active, so every entitlement is positive.
        let source = base.agent(s.id)?;
        let valuation = match &truncate {
            Some((p, t)) if *p == s.id => {
                Arc::new(source.valuation.as_ref().clone().truncated(t.clone()))
            }
            _ => Arc::clone(&source.valuation),
        };
        agents.push(Agent {
            id: s.id,
            entitlement: &s.budget / &gamma,
            valuation,
        });
    }
    let items = state.remaining().to_vec();
    Ok((Instance::new(items, agents)?, gamma))
}

/// Ids of agents whose entitlement is at most `bound`.
pub fn agents_at_most(instance: &Instance, bound: &Rational) -> BTreeSet<AgentId> {
    instance
        .agents()
        .iter()
        .filter(|a| &a.entitlement <= bound)
        .map(|a| a.id)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::items;
    use crate::rational::{int, rat};
    use crate::valuation::AdditiveValuation;

    fn additive(values: &[i64]) -> Valuation {
        AdditiveValuation::from_values(&values.iter().map(|&v| int(v)).collect::<Vec<_>>())
            .unwrap()
            .into()
    }

    #[test]
    fn instance_validation() {
        let v = additive(&[1, 1]);
        let ok = Instance::new(
            vec![Item(0), Item(1)],
            vec![Agent::new(0, rat(1, 2), v.clone()), Agent::new(1, rat(1, 2), v.clone())],
        );
        assert!(ok.is_ok());
        let bad_sum = Instance::new(
            vec![Item(0)],
            vec![Agent::new(0, rat(1, 2), v.clone()), Agent::new(1, rat(1, 3), v.clone())],
        );
        assert_eq!(bad_sum.unwrap_err(), ModelError::EntitlementSum("5/6".into()));
        let zero = Instance::new(vec![Item(0)], vec![Agent::new(0, int(0), v.clone())]);
        assert!(matches!(zero, Err(ModelError::EntitlementRange { .. })));
        let dup = Instance::new(vec![Item(0), Item(0)], vec![Agent::new(0, int(1), v)]);
        assert_eq!(dup.unwrap_err(), ModelError::DuplicateItem(Item(0)));
    }

    #[test]
    fn reduce_equal_entitlements() {
        let inst = Instance::equal_entitlements(3, vec![additive(&[1, 1, 1]); 3]).unwrap();
        let reduced = reduce_instance(&inst, AgentId(1), Item(1)).unwrap();
        assert_eq!(reduced.n(), 2);
        assert_eq!(reduced.items(), &[Item(0), Item(2)]);
        assert!(reduced.agents().iter().all(|a| a.entitlement == rat(1, 2)));
    }

    #[test]
    fn reduce_unequal_entitlements() {
        let v = additive(&[1, 1]);
        let inst = Instance::new(
            vec![Item(0), Item(1)],
            vec![
                Agent::new(0, rat(1, 2), v.clone()),
                Agent::new(1, rat(1, 4), v.clone()),
                Agent::new(2, rat(1, 4), v),
            ],
        )
        .unwrap();
        let reduced = reduce_instance(&inst, AgentId(0), Item(0)).unwrap();
        assert!(reduced.agents().iter().all(|a| a.entitlement == rat(1, 2)));
        let single = Instance::new(vec![Item(0)], vec![Agent::new(0, int(1), additive(&[1]))]).unwrap();
        assert_eq!(
            reduce_instance(&single, AgentId(0), Item(0)).unwrap_err(),
            ModelError::WholeEntitlement(AgentId(0))
        );
        assert_eq!(
            reduce_instance(&inst, AgentId(7), Item(0)).unwrap_err(),
            ModelError::UnknownAgent(AgentId(7))
        );
    }

    #[test]
    fn allocation_rejects_overlap() {
        let bundles = [(AgentId(0), items![0, 1]), (AgentId(1), items![1])]
            .into_iter()
            .collect();
        assert!(matches!(
            Allocation::new(bundles),
            Err(ModelError::Overlap { item: Item(1), .. })
        ));
    }

    #[test]
    fn truncation_examples() {
        let v = additive(&[3, 2]);
        let t = truncate_valuation(&v, int(4));
        assert_eq!(t.value(&items![0, 1]), int(4));
        let zero = truncate_valuation(&v, int(0));
        assert_eq!(zero.value(&items![0]), int(0));
    }
}
