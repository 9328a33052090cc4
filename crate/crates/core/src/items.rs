//! Items and compact item sets.
//!
//! Items are ordered by id; that order is the canonical order used
//! wherever a strategy has to break ties between items.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item(pub u32);

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A set of items stored as a bitset over item ids.
///
/// Trailing zero words are always trimmed, so equal sets compare equal.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemSet {
    words: Vec<u64>,
}

impl ItemSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(item: Item) -> Self {
        let mut set = Self::new();
        set.insert(item);
        set
    }

    fn split(item: Item) -> (usize, u64) {
        ((item.0 / 64) as usize, 1u64 << (item.0 % 64))
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    /// Returns true if the item was not present.
    pub fn insert(&mut self, item: Item) -> bool {
        let (word, bit) = Self::split(item);
        if self.words.len() <= word {
            self.words.resize(word + 1, 0);
        }
        let fresh = self.words[word] & bit == 0;
        self.words[word] |= bit;
        fresh
    }

    /// Returns true if the item was present.
    pub fn remove(&mut self, item: Item) -> bool {
        let (word, bit) = Self::split(item);
        match self.words.get_mut(word) {
            Some(w) if *w & bit != 0 => {
                *w &= !bit;
                self.trim();
                true
            }
            _ => false,
        }
    }

    pub fn contains(&self, item: Item) -> bool {
        let (word, bit) = Self::split(item);
        self.words.get(word).is_some_and(|w| w & bit != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Items in ascending (canonical) order.
    pub fn iter(&self) -> impl Iterator<Item = Item> + '_ {
        self.words.iter().enumerate().flat_map(|(index, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros();
                rest &= rest - 1;
                Some(Item(index as u32 * 64 + bit))
            })
        })
    }

    pub fn first(&self) -> Option<Item> {
        self.iter().next()
    }

    pub fn with(&self, item: Item) -> Self {
        let mut set = self.clone();
        set.insert(item);
        set
    }

    pub fn without(&self, item: Item) -> Self {
        let mut set = self.clone();
        set.remove(item);
        set
    }

    pub fn union(&self, other: &Self) -> Self {
        let len = self.words.len().max(other.words.len());
        let words = (0..len)
            .map(|i| self.words.get(i).unwrap_or(&0) | other.words.get(i).unwrap_or(&0))
            .collect();
        Self { words }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut set = Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        };
        set.trim();
        set
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut set = Self {
            words: self
                .words
                .iter()
                .enumerate()
                .map(|(i, a)| a & !other.words.get(i).unwrap_or(&0))
                .collect(),
        };
        set.trim();
        set
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, a)| a & !other.words.get(i).unwrap_or(&0) == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn to_vec(&self) -> Vec<Item> {
        self.iter().collect()
    }

    /// The subset of `universe` selected by the low bits of `mask`, where bit
    /// `i` stands for `universe[i]`.
    pub fn from_mask(universe: &[Item], mask: u64) -> Self {
        universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &item)| item)
            .collect()
    }
}

impl FromIterator<Item> for ItemSet {
    fn from_iter<I: IntoIterator<Item = Item>>(iter: I) -> Self {
        let mut set = Self::new();
        for item in iter {
            set.insert(item);
        }
        set
    }
}

impl Extend<Item> for ItemSet {
    fn extend<I: IntoIterator<Item = Item>>(&mut self, iter: I) {
        for item in iter {
            self.insert(item);
        }
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|i| i.0)).finish()
    }
}

/// Shorthand for tests and fixtures: `items![0, 1, 2]`.
#[macro_export]
macro_rules! items {
    ($($id:expr),* $(,)?) => {
        [$($crate::items::Item($id)),*].into_iter().collect::<$crate::items::ItemSet>()
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let mut set = ItemSet::new();
        assert!(set.insert(Item(3)));
        assert!(!set.insert(Item(3)));
        assert!(set.insert(Item(70)));
        assert_eq!(set.len(), 2);
        assert_eq!(set.to_vec(), vec![Item(3), Item(70)]);
        assert!(set.remove(Item(70)));
        assert_eq!(set, ItemSet::singleton(Item(3)));
        assert!(!set.contains(Item(70)));
    }

    #[test]
    fn from_mask_selects_low_bits() {
        let universe = [Item(5), Item(9), Item(2)];
        assert_eq!(ItemSet::from_mask(&universe, 0b101), items![5, 2]);
        assert_eq!(ItemSet::from_mask(&universe, 0), ItemSet::new());
    }

    proptest! {
        #[test]
        fn set_algebra_matches_btreeset(
            a in proptest::collection::btree_set(0u32..200, 0..20),
            b in proptest::collection::btree_set(0u32..200, 0..20),
        ) {
            let sa: ItemSet = a.iter().map(|&i| Item(i)).collect();
            let sb: ItemSet = b.iter().map(|&i| Item(i)).collect();
            let lift = |s: std::collections::BTreeSet<u32>| s.into_iter().map(Item).collect::<ItemSet>();
            prop_assert_eq!(sa.union(&sb), lift(a.union(&b).copied().collect()));
            prop_assert_eq!(sa.intersection(&sb), lift(a.intersection(&b).copied().collect()));
            prop_assert_eq!(sa.difference(&sb), lift(a.difference(&b).copied().collect()));
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
            prop_assert_eq!(sa.is_disjoint(&sb), a.is_disjoint(&b));
            prop_assert_eq!(sa.len(), a.len());
        }
    }
}
