//! Exact maximin and anyprice shares with verifiable witnesses.
//!
//! Both computations are exhaustive over subsets of the item set and are
//! guarded by a [`SizeGuard`]. Valuations are assumed monotone.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::items::{Item, ItemSet};
use crate::lp::{self, Constraint, LinearProgram, LpOutcome, Relation};
use crate::model::{AgentId, FractionalPartition, Instance, ModelError};
use crate::rational::Rational;
use crate::valuation::{subset_values, SizeGuard, ValuationError, ValuationOracle};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShareError {
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("number of bundles must be at least 1")]
    NoBundles,
    #[error("entitlement must lie in (0, 1]")]
    Entitlement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShareWitness {
    /// Exactly `n` bundles, possibly empty.
    Partition(Vec<ItemSet>),
    Fractional(FractionalPartition),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareResult {
    pub value: Rational,
    pub witness: ShareWitness,
}

/// Replaces each value by its rank among the distinct values; order is all
/// the partition search needs.
fn ranks(table: &[Rational]) -> (Vec<u32>, Vec<Rational>) {
    let mut distinct: Vec<Rational> = table.to_vec();
    distinct.sort();
    distinct.dedup();
    let rank = table
        .iter()
        .map(|v| distinct.binary_search(v).expect("value present") as u32)
        .collect();
    (rank, distinct)
}

struct PartitionSearch<'a> {
    rank: &'a [u32],
    n: usize,
    m: usize,
    blocks: Vec<u64>,
    best: Option<u32>,
    best_blocks: Vec<u64>,
}

impl PartitionSearch<'_> {
    fn forced_empty(&self, pos: usize) -> bool {
        self.blocks.len() + (self.m - pos) < self.n
    }

    /// Optimistic value of any completion: every block may still receive
    /// all unassigned items.
    fn bound(&self, pos: usize) -> u32 {
        let rest = ((1u64 << self.m) - 1) & !((1u64 << pos) - 1);
        let mut bound = self
            .blocks
            .iter()
            .map(|&b| self.rank[(b | rest) as usize])
            .min()
            .unwrap_or(u32::MAX);
        if self.forced_empty(pos) {
            bound = bound.min(self.rank[0]);
        }
        bound
    }

    fn run(&mut self, pos: usize) {
        if self.best.is_some_and(|best| self.bound(pos) <= best) {
            return;
        }
        if pos == self.m {
            let value = self.bound(pos);
            self.best = Some(value);
            self.best_blocks = self.blocks.clone();
            return;
        }
        let bit = 1u64 << pos;
        for i in 0..self.blocks.len() {
            self.blocks[i] |= bit;
            self.run(pos + 1);
            self.blocks[i] &= !bit;
        }
        if self.blocks.len() < self.n {
            self.blocks.push(bit);
            self.run(pos + 1);
            self.blocks.pop();
        }
    }
}

/// Maximum over partitions of `items` into `n` (possibly empty) bundles of
/// the minimum bundle value.
pub fn mms_exact<V: ValuationOracle + ?Sized>(
    v: &V,
    n: usize,
    items: &ItemSet,
    guard: SizeGuard,
) -> Result<ShareResult, ShareError> {
    if n == 0 {
        return Err(ShareError::NoBundles);
    }
    let universe = items.to_vec();
    let table = subset_values(v, &universe, guard)?;
    let (rank, distinct) = ranks(&table);
    let mut search = PartitionSearch {
        rank: &rank,
        n,
        m: universe.len(),
        blocks: Vec::with_capacity(n),
        best: None,
        best_blocks: Vec::new(),
    };
    search.run(0);
    let best = search.best.expect("at least one partition exists");
    let mut bundles: Vec<ItemSet> = search
        .best_blocks
        .iter()
        .map(|&mask| ItemSet::from_mask(&universe, mask))
        .collect();
    bundles.resize(n, ItemSet::new());
    Ok(ShareResult {
        value: distinct[best as usize].clone(),
        witness: ShareWitness::Partition(bundles),
    })
}

fn check_entitlement(b: &Rational) -> Result<(), ShareError> {
    if b.is_positive() && *b <= Rational::one() {
        Ok(())
    } else {
        Err(ShareError::Entitlement)
    }
}

/// Masks `T` with `v(T) ≥ z` such that no single-item removal keeps
/// `v ≥ z`; under monotonicity these are the inclusion-minimal ones.
fn minimal_qualifying(table: &[Rational], z: &Rational) -> Vec<u64> {
    (0..table.len() as u64)
        .filter(|&mask| {
            &table[mask as usize] >= z
                && (0..64)
                    .filter(|e| mask >> e & 1 == 1)
                    .all(|e| &table[(mask & !(1u64 << e)) as usize] < z)
        })
        .collect()
}

/// Weights over `columns` with unit total and per-item coverage at most `b`,
/// if they exist.
fn cover_feasible(columns: &[u64], m: usize, b: &Rational) -> Option<Vec<Rational>> {
    let k = columns.len();
    let mut program = LinearProgram::new(k);
    program.push(Constraint::new(
        vec![Rational::one(); k],
        Relation::Eq,
        Rational::one(),
    ));
    for e in 0..m {
        let coeffs = columns
            .iter()
            .map(|&mask| {
                if mask >> e & 1 == 1 {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        program.push(Constraint::new(coeffs, Relation::Le, b.clone()));
    }
    match lp::find_feasible(&program) {
        LpOutcome::Optimal(sol) => Some(sol.x),
        _ => None,
    }
}

/// Anyprice share in its fractional-cover form: the largest bundle value
/// `z` admitting weights `λ_T ≥ 0` with `Σλ_T = 1`, support values `≥ z`,
/// and every item covered at most `b`.
pub fn aps_exact<V: ValuationOracle + ?Sized>(
    v: &V,
    b: &Rational,
    items: &ItemSet,
    guard: SizeGuard,
) -> Result<ShareResult, ShareError> {
    check_entitlement(b)?;
    let universe = items.to_vec();
    let table = subset_values(v, &universe, guard)?;
    let mut distinct = table.clone();
    distinct.sort();
    distinct.dedup();
    let m = universe.len();

    // Invariant: distinct[lo] is feasible; everything above hi is not.
    let (mut lo, mut hi) = (0usize, distinct.len() - 1);
    let mut witness = {
        let columns = minimal_qualifying(&table, &distinct[0]);
        let x = cover_feasible(&columns, m, b).expect("the lowest value is always feasible");
        (columns, x)
    };
    while lo < hi {
        let mid = lo + (hi - lo + 1) / 2;
        let columns = minimal_qualifying(&table, &distinct[mid]);
        match cover_feasible(&columns, m, b) {
            Some(x) => {
                lo = mid;
                witness = (columns, x);
            }
            None => hi = mid - 1,
        }
    }
    let (columns, x) = witness;
    let entries = columns
        .iter()
        .zip(x)
        .filter(|(_, w)| w.is_positive())
        .map(|(&mask, w)| (ItemSet::from_mask(&universe, mask), w))
        .collect();
    Ok(ShareResult {
        value: distinct[lo].clone(),
        witness: ShareWitness::Fractional(FractionalPartition { entries }),
    })
}

/// The `⌈1/b⌉`-th largest value, or 0 if there are fewer values.
pub fn aps_unit_demand(values: &[Rational], b: &Rational) -> Rational {
    let mut sorted = values.to_vec();
    sorted.sort_by(|x, y| y.cmp(x));
    let rank = b.recip().ceil().to_integer();
    usize::try_from(rank)
        .ok()
        .filter(|&k| k >= 1 && k <= sorted.len())
        .map(|k| sorted[k - 1].clone())
        .unwrap_or_default()
}

pub fn verify_fractional_partition<V: ValuationOracle + ?Sized>(
    lambda: &FractionalPartition,
    v: &V,
    b: &Rational,
    z: &Rational,
) -> bool {
    lambda.entries.iter().all(|(_, w)| !w.is_negative())
        && lambda.total_weight().is_one()
        && lambda.support().all(|(t, _)| &v.value(t) >= z)
        && lambda.items().iter().all(|e| &lambda.coverage(e) <= b)
}

/// `partition` has exactly `n` pairwise disjoint bundles covering `items`,
/// each worth at least `z`.
pub fn verify_mms_partition<V: ValuationOracle + ?Sized>(
    partition: &[ItemSet],
    v: &V,
    z: &Rational,
    items: &ItemSet,
    n: usize,
) -> bool {
    if partition.len() != n {
        return false;
    }
    let mut seen = ItemSet::new();
    for bundle in partition {
        if !seen.is_disjoint(bundle) {
            return false;
        }
        seen = seen.union(bundle);
    }
    seen == *items && partition.iter().all(|bundle| &v.value(bundle) >= z)
}

/// The most valuable bundle whose total price is at most `b`. Any price
/// vector summing to 1 gives an upper bound on the anyprice share.
pub fn best_affordable<V: ValuationOracle + ?Sized>(
    v: &V,
    prices: &BTreeMap<Item, Rational>,
    b: &Rational,
    items: &ItemSet,
    guard: SizeGuard,
) -> Result<(Rational, ItemSet), ShareError> {
    let universe = items.to_vec();
    guard.check(universe.len())?;
    let price: Vec<Rational> = universe
        .iter()
        .map(|e| prices.get(e).cloned().unwrap_or_default())
        .collect();
    let mut best = (v.value(&ItemSet::new()), ItemSet::new());
    for mask in 1..1u64 << universe.len() {
        let cost = (0..universe.len())
            .filter(|i| mask >> i & 1 == 1)
            .fold(Rational::zero(), |acc, i| acc + &price[i]);
        if &cost > b {
            continue;
        }
        let bundle = ItemSet::from_mask(&universe, mask);
        let value = v.value(&bundle);
        if value > best.0 {
            best = (value, bundle);
        }
    }
    Ok(best)
}

pub fn mms_of(instance: &Instance, agent: AgentId, guard: SizeGuard) -> Result<ShareResult, ShareError> {
    let a = instance.agent(agent)?;
    mms_exact(a.valuation.as_ref(), instance.n(), instance.item_set(), guard)
}

pub fn aps_of(instance: &Instance, agent: AgentId, guard: SizeGuard) -> Result<ShareResult, ShareError> {
    let a = instance.agent(agent)?;
    aps_exact(a.valuation.as_ref(), &a.entitlement, instance.item_set(), guard)
}
