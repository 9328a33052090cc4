#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bidfair::engine::Strategy;
use bidfair::instance_gen::{gen_random_submodular, EntitlementKind};
use bidfair::rational::{int, rat, Rational};
use bidfair::strategies::{
    ConstantBidder, FractionBidder, GreedyBidder, RandomBidder, ShadowAdversary, Sniper,
};
use bidfair::valuation::ValuationOracle;
use bidfair::{AgentId, Instance, Oracle, TieBreakPolicy};

pub const UNIVERSE: usize = 6;

/// `(n, m)` for corpus seed `seed`: n ∈ {2,3,4}, m ∈ 1..=8.
pub fn corpus_shape(seed: u64) -> (usize, usize) {
    (2 + (seed % 3) as usize, 1 + ((seed / 3) % 8) as usize)
}

pub fn corpus_instance(seed: u64, kind: EntitlementKind) -> Instance {
    let (n, m) = corpus_shape(seed);
    gen_random_submodular(seed, n, m, UNIVERSE, kind).expect("valid corpus parameters")
}

pub fn oracle(instance: &Instance, id: AgentId) -> Oracle {
    instance.agent(id).expect("agent").valuation.clone()
}

pub struct Profile {
    pub name: String,
    pub tie_breaker: TieBreakPolicy,
    pub opponents: BTreeMap<AgentId, Box<dyn Strategy>>,
}

pub const FAMILIES: [&str; 7] = [
    "passive", "all-in", "random", "greedy", "shadow", "sniper", "mixed",
];

pub fn tie_policies(instance: &Instance, p: AgentId, seed: u64) -> Vec<(&'static str, TieBreakPolicy)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let ids: Vec<AgentId> = instance.agent_ids().collect();
    let script = (0..instance.m())
        .map(|_| {
            let mut order: Vec<AgentId> = ids.iter().copied().filter(|&a| a != p).collect();
            order.shuffle(&mut rng);
            order.push(p);
            order
        })
        .collect();
    vec![
        ("lexicographic", TieBreakPolicy::Lexicographic),
        ("seeded", TieBreakPolicy::SeededRandom),
        ("against-p", TieBreakPolicy::AdversarialAgainst(p)),
        ("scripted", TieBreakPolicy::Scripted(script)),
    ]
}

/// One opponent of `family` in seat `me`. `mirror` is p's own strategy, used
/// by the shadow adversary; `p_scale` turns p's marginal values into her
/// bids.
fn opponent<S: Strategy + Clone + 'static>(
    family: usize,
    instance: &Instance,
    me: AgentId,
    p: AgentId,
    mirror: &S,
    p_scale: &Rational,
    rng: &mut ChaCha8Rng,
) -> Box<dyn Strategy> {
    match family {
        0 => Box::new(FractionBidder { fraction: int(0) }),
        1 => Box::new(FractionBidder { fraction: int(1) }),
        2 => Box::new(RandomBidder::new(rng.gen(), 4)),
        3 => {
            let v = oracle(instance, me);
            let total = v.value(instance.item_set());
            let scale = if total > int(0) {
                rat(rng.gen_range(1..=4), 2) / total
            } else {
                int(0)
            };
            Box::new(GreedyBidder { v, scale })
        }
        4 => Box::new(ShadowAdversary {
            target: p,
            mirror: mirror.clone(),
        }),
        5 => {
            if rng.gen_bool(0.5) {
                Box::new(GreedyBidder {
                    v: oracle(instance, p),
                    scale: p_scale.clone(),
                })
            } else {
                Box::new(Sniper {
                    target_valuation: oracle(instance, p),
                    target: p,
                    threshold: int(0),
                })
            }
        }
        _ => {
            let pick = rng.gen_range(0..7);
            if pick == 6 {
                Box::new(ConstantBidder { amount: rat(1, 8) })
            } else {
                opponent(pick, instance, me, p, mirror, p_scale, rng)
            }
        }
    }
}

/// `FAMILIES × tie policies` opponent profiles against `p`.
pub fn profiles<S: Strategy + Clone + 'static>(
    instance: &Instance,
    p: AgentId,
    mirror: &S,
    p_scale: &Rational,
    seed: u64,
) -> Vec<Profile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (family, family_name) in FAMILIES.iter().enumerate() {
        for (tie_name, tie_breaker) in tie_policies(instance, p, seed) {
            let opponents = instance
                .agent_ids()
                .filter(|&a| a != p)
                .map(|a| (a, opponent(family, instance, a, p, mirror, p_scale, &mut rng)))
                .collect();
            out.push(Profile {
                name: format!("{family_name}/{tie_name}"),
                tie_breaker,
                opponents,
            });
        }
    }
    out
}
