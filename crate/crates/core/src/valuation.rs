//! Value-query oracles and the structured valuation classes.
//!
//! Strategies only ever see `dyn ValuationOracle`; the structured types are
//! for building instances and for serialization.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::items::{Item, ItemSet};
use crate::rational::{self, Rational};

/// A monotone, normalized set function answering value queries.
pub trait ValuationOracle: Send + Sync + Debug {
    fn value(&self, set: &ItemSet) -> Rational;
}

pub type Oracle = Arc<dyn ValuationOracle>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValuationError {
    #[error("item {0} is already in the set")]
    ItemInSet(Item),
    #[error("negative value {value} for item {item}")]
    NegativeValue { item: Item, value: String },
    #[error("valuation needs at least one clause")]
    NoClauses,
    #[error("{items} items exceed the exhaustive-check size guard of {guard}")]
    SizeGuard { items: usize, guard: usize },
    #[error("coverage item {item} references element {element} outside a universe of {universe}")]
    UnknownElement {
        item: Item,
        element: usize,
        universe: usize,
    },
    #[error("item {0} appears in more than one row")]
    DuplicateRowItem(Item),
    #[error("{0}")]
    Invalid(String),
}

fn check_nonnegative(values: &BTreeMap<Item, Rational>) -> Result<(), ValuationError> {
    match values.iter().find(|(_, v)| v.is_negative()) {
        Some((&item, value)) => Err(ValuationError::NegativeValue {
            item,
            value: rational::format_rational(value),
        }),
        None => Ok(()),
    }
}

/// `v(S) = Σ_{e∈S} v(e)`; items without an entry are worth zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveValuation {
    values: BTreeMap<Item, Rational>,
}

impl AdditiveValuation {
    pub fn new(values: BTreeMap<Item, Rational>) -> Result<Self, ValuationError> {
        check_nonnegative(&values)?;
        Ok(Self { values })
    }

    /// Values for items `0..values.len()`.
    pub fn from_values(values: &[Rational]) -> Result<Self, ValuationError> {
        Self::new(
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (Item(i as u32), v.clone()))
                .collect(),
        )
    }

    pub fn values(&self) -> &BTreeMap<Item, Rational> {
        &self.values
    }

    pub fn item_value(&self, item: Item) -> Rational {
        self.values.get(&item).cloned().unwrap_or_default()
    }
}

impl ValuationOracle for AdditiveValuation {
    fn value(&self, set: &ItemSet) -> Rational {
        set.iter()
            .filter_map(|e| self.values.get(&e))
            .fold(Rational::zero(), |acc, v| acc + v)
    }
}

/// `v(S) = max_{e∈S} v(e)`, `v(∅) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitDemandValuation {
    values: BTreeMap<Item, Rational>,
}

impl UnitDemandValuation {
    pub fn new(values: BTreeMap<Item, Rational>) -> Result<Self, ValuationError> {
        check_nonnegative(&values)?;
        Ok(Self { values })
    }

    pub fn from_values(values: &[Rational]) -> Result<Self, ValuationError> {
        Self::new(
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (Item(i as u32), v.clone()))
                .collect(),
        )
    }

    pub fn values(&self) -> &BTreeMap<Item, Rational> {
        &self.values
    }
}

impl ValuationOracle for UnitDemandValuation {
    fn value(&self, set: &ItemSet) -> Rational {
        set.iter()
            .filter_map(|e| self.values.get(&e))
            .max()
            .cloned()
            .unwrap_or_default()
    }
}

/// Pointwise maximum of additive clauses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XosValuation {
    clauses: Vec<AdditiveValuation>,
}

impl XosValuation {
    pub fn new(clauses: Vec<AdditiveValuation>) -> Result<Self, ValuationError> {
        if clauses.is_empty() {
            return Err(ValuationError::NoClauses);
        }
        Ok(Self { clauses })
    }

    pub fn clauses(&self) -> &[AdditiveValuation] {
        &self.clauses
    }
}

impl ValuationOracle for XosValuation {
    fn value(&self, set: &ItemSet) -> Rational {
        self.clauses
            .iter()
            .map(|c| c.value(set))
            .max()
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstituteRow {
    pub weight: Rational,
    pub items: Vec<Item>,
}

/// Rows of mutually substitutable items: a set earns a row's weight once if
/// it holds any item of that row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSubstitutesValuation {
    rows: Vec<SubstituteRow>,
    row_of: BTreeMap<Item, usize>,
}

impl RowSubstitutesValuation {
    pub fn new(rows: Vec<SubstituteRow>) -> Result<Self, ValuationError> {
        let mut row_of = BTreeMap::new();
        for (index, row) in rows.iter().enumerate() {
            if row.weight.is_negative() {
                return Err(ValuationError::Invalid(format!(
                    "row {index} has negative weight"
                )));
            }
            for &item in &row.items {
                if row_of.insert(item, index).is_some() {
                    return Err(ValuationError::DuplicateRowItem(item));
                }
            }
        }
        Ok(Self { rows, row_of })
    }

    pub fn rows(&self) -> &[SubstituteRow] {
        &self.rows
    }

    pub fn row_of(&self, item: Item) -> Option<usize> {
        self.row_of.get(&item).copied()
    }
}

impl ValuationOracle for RowSubstitutesValuation {
    fn value(&self, set: &ItemSet) -> Rational {
        let mut hit = vec![false; self.rows.len()];
        for item in set.iter() {
            if let Some(&row) = self.row_of.get(&item) {
                hit[row] = true;
            }
        }
        hit.iter()
            .zip(&self.rows)
            .filter(|(h, _)| **h)
            .fold(Rational::zero(), |acc, (_, row)| acc + &row.weight)
    }
}

/// Weighted coverage: each item covers a subset of a weighted ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageValuation {
    weights: Vec<Rational>,
    covers: BTreeMap<Item, Vec<usize>>,
}

impl CoverageValuation {
    pub fn new(
        weights: Vec<Rational>,
        covers: BTreeMap<Item, Vec<usize>>,
    ) -> Result<Self, ValuationError> {
        if weights.iter().any(|w| w.is_negative()) {
            return Err(ValuationError::Invalid(
                "coverage weights must be nonnegative".into(),
            ));
        }
        for (&item, elements) in &covers {
            if let Some(&element) = elements.iter().find(|&&e| e >= weights.len()) {
                return Err(ValuationError::UnknownElement {
                    item,
                    element,
                    universe: weights.len(),
                });
            }
        }
        Ok(Self { weights, covers })
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn covers(&self) -> &BTreeMap<Item, Vec<usize>> {
        &self.covers
    }
}

impl ValuationOracle for CoverageValuation {
    fn value(&self, set: &ItemSet) -> Rational {
        let mut covered = vec![false; self.weights.len()];
        for item in set.iter() {
            for &element in self.covers.get(&item).map(Vec::as_slice).unwrap_or(&[]) {
                covered[element] = true;
            }
        }
        covered
            .iter()
            .zip(&self.weights)
            .filter(|(c, _)| **c)
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    }
}

/// Explicit set-function table for tiny fixtures. Sets without an entry are
/// worth zero; nothing about monotonicity is enforced here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableValuation {
    entries: BTreeMap<ItemSet, Rational>,
}

impl TableValuation {
    pub fn new(entries: BTreeMap<ItemSet, Rational>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &BTreeMap<ItemSet, Rational> {
        &self.entries
    }
}

impl ValuationOracle for TableValuation {
    fn value(&self, set: &ItemSet) -> Rational {
        self.entries.get(set).cloned().unwrap_or_default()
    }
}

/// `v^t(S) = min(v(S), t)`.
#[derive(Debug, Clone)]
pub struct Truncated<V> {
    inner: V,
    cap: Rational,
}

impl<V: ValuationOracle> Truncated<V> {
    pub fn new(inner: V, cap: Rational) -> Self {
        Self { inner, cap }
    }

    pub fn cap(&self) -> &Rational {
        &self.cap
    }
}

impl<V: ValuationOracle> ValuationOracle for Truncated<V> {
    fn value(&self, set: &ItemSet) -> Rational {
        rational::min(&self.inner.value(set), &self.cap)
    }
}

/// `c · v(S)`.
#[derive(Debug, Clone)]
pub struct Scaled<V> {
    inner: V,
    factor: Rational,
}

impl<V: ValuationOracle> Scaled<V> {
    pub fn new(inner: V, factor: Rational) -> Self {
        Self { inner, factor }
    }
}

impl<V: ValuationOracle> ValuationOracle for Scaled<V> {
    fn value(&self, set: &ItemSet) -> Rational {
        self.inner.value(set) * &self.factor
    }
}

impl<V: ValuationOracle + ?Sized> ValuationOracle for Arc<V> {
    fn value(&self, set: &ItemSet) -> Rational {
        (**self).value(set)
    }
}

impl<V: ValuationOracle + ?Sized> ValuationOracle for &V {
    fn value(&self, set: &ItemSet) -> Rational {
        (**self).value(set)
    }
}

/// Wraps an oracle and counts the value queries it answers. Safe to share
/// between threads.
#[derive(Debug)]
pub struct CountingOracle<V> {
    inner: V,
    queries: AtomicU64,
}

impl<V: ValuationOracle> CountingOracle<V> {
    pub fn new(inner: V) -> Self {
        Self {
            inner,
            queries: AtomicU64::new(0),
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }
}

impl<V: ValuationOracle> ValuationOracle for CountingOracle<V> {
    fn value(&self, set: &ItemSet) -> Rational {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.inner.value(set)
    }
}

/// A structured valuation, as carried inside instance files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Valuation {
    Additive(AdditiveValuation),
    UnitDemand(UnitDemandValuation),
    Xos(XosValuation),
    RowSubstitutes(RowSubstitutesValuation),
    Coverage(CoverageValuation),
    Table(TableValuation),
    Truncated { inner: Box<Valuation>, cap: Rational },
    Scaled { inner: Box<Valuation>, factor: Rational },
}

impl Valuation {
    pub fn truncated(self, cap: Rational) -> Self {
        Valuation::Truncated {
            inner: Box::new(self),
            cap,
        }
    }

    pub fn scaled(self, factor: Rational) -> Self {
        Valuation::Scaled {
            inner: Box::new(self),
            factor,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Valuation::Additive(_) => "additive",
            Valuation::UnitDemand(_) => "unit_demand",
            Valuation::Xos(_) => "xos",
            Valuation::RowSubstitutes(_) => "row_substitutes",
            Valuation::Coverage(_) => "coverage",
            Valuation::Table(_) => "table",
            Valuation::Truncated { .. } => "truncated",
            Valuation::Scaled { .. } => "scaled",
        }
    }
}

impl ValuationOracle for Valuation {
    fn value(&self, set: &ItemSet) -> Rational {
        match self {
            Valuation::Additive(v) => v.value(set),
            Valuation::UnitDemand(v) => v.value(set),
            Valuation::Xos(v) => v.value(set),
            Valuation::RowSubstitutes(v) => v.value(set),
            Valuation::Coverage(v) => v.value(set),
            Valuation::Table(v) => v.value(set),
            Valuation::Truncated { inner, cap } => rational::min(&inner.value(set), cap),
            Valuation::Scaled { inner, factor } => inner.value(set) * factor,
        }
    }
}

impl From<AdditiveValuation> for Valuation {
    fn from(v: AdditiveValuation) -> Self {
        Valuation::Additive(v)
    }
}

impl From<UnitDemandValuation> for Valuation {
    fn from(v: UnitDemandValuation) -> Self {
        Valuation::UnitDemand(v)
    }
}

impl From<XosValuation> for Valuation {
    fn from(v: XosValuation) -> Self {
        Valuation::Xos(v)
    }
}

impl From<RowSubstitutesValuation> for Valuation {
    fn from(v: RowSubstitutesValuation) -> Self {
        Valuation::RowSubstitutes(v)
    }
}

impl From<CoverageValuation> for Valuation {
    fn from(v: CoverageValuation) -> Self {
        Valuation::Coverage(v)
    }
}

impl From<TableValuation> for Valuation {
    fn from(v: TableValuation) -> Self {
        Valuation::Table(v)
    }
}

/// `v(S ∪ {e}) − v(S)`.
pub fn marginal<V: ValuationOracle + ?Sized>(
    v: &V,
    item: Item,
    set: &ItemSet,
) -> Result<Rational, ValuationError> {
    if set.contains(item) {
        return Err(ValuationError::ItemInSet(item));
    }
    Ok(v.value(&set.with(item)) - v.value(set))
}

/// Default bound on the number of items for any exhaustive computation.
pub const DEFAULT_MAX_ITEMS: usize = 12;

/// Environment variable overriding [`DEFAULT_MAX_ITEMS`].
pub const MAX_ITEMS_ENV: &str = "BIDFAIR_MAX_ITEMS";

/// Size bound for brute-force computations (membership checks, shares).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeGuard {
    pub max_items: usize,
}

impl Default for SizeGuard {
    fn default() -> Self {
        Self {
            max_items: DEFAULT_MAX_ITEMS,
        }
    }
}

impl SizeGuard {
    pub fn new(max_items: usize) -> Self {
        Self { max_items }
    }

    pub fn from_env() -> Self {
        std::env::var(MAX_ITEMS_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .map(Self::new)
            .unwrap_or_default()
    }

    pub fn check(&self, items: usize) -> Result<(), ValuationError> {
        // 2^m tables are indexed by u64 masks.
        if items > self.max_items || items > 30 {
            return Err(ValuationError::SizeGuard {
                items,
                guard: self.max_items.min(30),
            });
        }
        Ok(())
    }
}

/// Values of every subset of `universe`, indexed by bitmask (bit `i` stands
/// for `universe[i]`).
pub fn subset_values<V: ValuationOracle + ?Sized>(
    v: &V,
    universe: &[Item],
    guard: SizeGuard,
) -> Result<Vec<Rational>, ValuationError> {
    guard.check(universe.len())?;
    Ok((0..1u64 << universe.len())
        .map(|mask| v.value(&ItemSet::from_mask(universe, mask)))
        .collect())
}

/// Exhaustive submodularity check over all subsets of `items`.
///
/// Uses the local form `v(S+e) + v(S+f) ≥ v(S+e+f) + v(S)` for all `S` and
/// distinct `e, f ∉ S`, which is equivalent to diminishing marginals.
pub fn is_submodular<V: ValuationOracle + ?Sized>(
    v: &V,
    items: &ItemSet,
    guard: SizeGuard,
) -> Result<bool, ValuationError> {
    let universe = items.to_vec();
    let table = subset_values(v, &universe, guard)?;
    let m = universe.len();
    for mask in 0..table.len() {
        for e in 0..m {
            if mask >> e & 1 == 1 {
                continue;
            }
            for f in e + 1..m {
                if mask >> f & 1 == 1 {
                    continue;
                }
                let with_e = mask | 1 << e;
                let with_f = mask | 1 << f;
                if &table[with_e] + &table[with_f] < &table[with_e | 1 << f] + &table[mask] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Exhaustive check of `v(∅) = 0` and monotonicity over subsets of `items`.
pub fn is_monotone_normalized<V: ValuationOracle + ?Sized>(
    v: &V,
    items: &ItemSet,
    guard: SizeGuard,
) -> Result<bool, ValuationError> {
    let universe = items.to_vec();
    let table = subset_values(v, &universe, guard)?;
    if !table[0].is_zero() {
        return Ok(false);
    }
    for mask in 0..table.len() {
        for e in 0..universe.len() {
            if mask >> e & 1 == 0 && table[mask | 1 << e] < table[mask] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::items;
    use crate::rational::{int, rat};

    fn ints(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|&v| int(v)).collect()
    }

    fn row_substitutes_2x2() -> RowSubstitutesValuation {
        RowSubstitutesValuation::new(vec![
            SubstituteRow {
                weight: int(1),
                items: vec![Item(0), Item(1)],
            },
            SubstituteRow {
                weight: int(1),
                items: vec![Item(2), Item(3)],
            },
        ])
        .unwrap()
    }

    #[test]
    fn marginals() {
        let add = AdditiveValuation::from_values(&ints(&[5, 2])).unwrap();
        assert_eq!(marginal(&add, Item(1), &items![0]).unwrap(), int(2));
        let ud = UnitDemandValuation::from_values(&ints(&[5, 2])).unwrap();
        assert_eq!(marginal(&ud, Item(1), &items![0]).unwrap(), int(0));
        let rows = row_substitutes_2x2();
        assert_eq!(marginal(&rows, Item(1), &items![0]).unwrap(), int(0));
        assert_eq!(marginal(&rows, Item(2), &items![0]).unwrap(), int(1));
        assert_eq!(
            marginal(&add, Item(0), &items![0]),
            Err(ValuationError::ItemInSet(Item(0)))
        );
    }

    #[test]
    fn truncation_and_scaling() {
        let add = AdditiveValuation::from_values(&ints(&[3, 2])).unwrap();
        let t = Truncated::new(&add, int(4));
        assert_eq!(t.value(&items![0, 1]), int(4));
        assert_eq!(t.value(&items![1]), int(2));
        let zero = Truncated::new(&add, int(0));
        assert_eq!(zero.value(&items![0, 1]), int(0));
        let s = Scaled::new(&add, rat(1, 2));
        assert_eq!(s.value(&items![0, 1]), rat(5, 2));
        let spec = Valuation::from(add.clone()).truncated(int(4)).scaled(int(2));
        assert_eq!(spec.value(&items![0, 1]), int(8));
    }

    #[test]
    fn structured_classes_are_submodular() {
        let guard = SizeGuard::default();
        let all = items![0, 1, 2, 3];
        let add = AdditiveValuation::from_values(&ints(&[1, 4, 0, 2])).unwrap();
        assert!(is_submodular(&add, &all, guard).unwrap());
        let ud = UnitDemandValuation::from_values(&ints(&[1, 4, 0, 2])).unwrap();
        assert!(is_submodular(&ud, &all, guard).unwrap());
        assert!(is_submodular(&row_substitutes_2x2(), &all, guard).unwrap());
        let cov = CoverageValuation::new(
            ints(&[1, 2, 3]),
            [(Item(0), vec![0, 1]), (Item(1), vec![1, 2]), (Item(3), vec![2])]
                .into_iter()
                .collect(),
        )
        .unwrap();
        assert!(is_submodular(&cov, &all, guard).unwrap());
        assert!(is_monotone_normalized(&cov, &all, guard).unwrap());
    }

    #[test]
    fn column_xos_is_not_submodular() {
        // 2x2 matrix, clause j values column j.
        let clause = |a: u32, b: u32| {
            AdditiveValuation::new([(Item(a), int(1)), (Item(b), int(1))].into_iter().collect())
                .unwrap()
        };
        let xos = XosValuation::new(vec![clause(0, 2), clause(1, 3)]).unwrap();
        let all = items![0, 1, 2, 3];
        assert!(!is_submodular(&xos, &all, SizeGuard::default()).unwrap());
        assert!(is_monotone_normalized(&xos, &all, SizeGuard::default()).unwrap());
    }

    #[test]
    fn table_membership_failures() {
        let all = items![0, 1];
        let guard = SizeGuard::default();
        let not_normalized = TableValuation::new([(ItemSet::new(), int(1))].into_iter().collect());
        assert!(!is_monotone_normalized(&not_normalized, &all, guard).unwrap());
        let not_monotone = TableValuation::new(
            [(items![0], int(2)), (items![1], int(0)), (items![0, 1], int(1))]
                .into_iter()
                .collect(),
        );
        assert!(!is_monotone_normalized(&not_monotone, &all, guard).unwrap());
    }

    #[test]
    fn size_guard_rejects_large_sets() {
        let add = AdditiveValuation::from_values(&ints(&[1; 14])).unwrap();
        let all: ItemSet = (0..14).map(Item).collect();
        assert_eq!(
            is_submodular(&add, &all, SizeGuard::default()),
            Err(ValuationError::SizeGuard {
                items: 14,
                guard: 12
            })
        );
        assert!(is_submodular(&add, &all, SizeGuard::new(14)).unwrap());
    }

    #[test]
    fn counting_oracle_counts() {
        let add = AdditiveValuation::from_values(&ints(&[1, 2, 3])).unwrap();
        let counted = CountingOracle::new(add);
        let _ = subset_values(&counted, &[Item(0), Item(1), Item(2)], SizeGuard::default());
        assert_eq!(counted.queries(), 8);
    }

    #[test]
    fn negative_values_rejected() {
        assert!(AdditiveValuation::from_values(&[int(-1)]).is_err());
        assert!(XosValuation::new(vec![]).is_err());
    }
}
