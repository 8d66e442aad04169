use serde::{Deserialize, Deserializer, Serialize, Serializer};

const WORD: usize = 64;

/// Bit-per-integer membership table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bitset {
    len: usize,
    words: Vec<u64>,
}

impl Bitset {
    pub fn with_len(len: usize) -> Self {
        Bitset {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Extends the table to `len` bits; new bits are clear.
    pub fn grow(&mut self, len: usize) {
        if len > self.len {
            self.len = len;
            self.words.resize(len.div_ceil(WORD), 0);
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && self.words[i / WORD] & (1 << (i % WORD)) != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} outside table of {}", self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Strictly increasing nonnegative integers with constant-time membership.
#[derive(Clone, Debug, Default)]
pub struct IntSet {
    elements: Vec<u64>,
    bits: Bitset,
}

// the bitset may carry spare capacity, so only the elements decide equality
impl PartialEq for IntSet {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for IntSet {}

impl IntSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted<I: IntoIterator<Item = u64>>(values: I) -> Self {
        let mut elements: Vec<u64> = values.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        Self::from_sorted(elements)
    }

    /// `elements` must be strictly increasing.
    pub fn from_sorted(elements: Vec<u64>) -> Self {
        assert!(
            elements.windows(2).all(|w| w[0] < w[1]),
            "IntSet elements must be strictly increasing"
        );
        let bound = elements.last().map_or(0, |&m| m as usize + 1);
        let mut bits = Bitset::with_len(bound);
        for &e in &elements {
            bits.set(e as usize);
        }
        IntSet { elements, bits }
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        self.bits.get(x as usize)
    }

    #[inline]
    pub fn contains_signed(&self, x: i64) -> bool {
        x >= 0 && self.contains(x as u64)
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn min(&self) -> Option<u64> {
        self.elements.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.elements.last().copied()
    }

    pub fn iter(&self) -> std::iter::Copied<std::slice::Iter<'_, u64>> {
        self.elements.iter().copied()
    }

    /// Elements strictly below `x`.
    pub fn below(&self, x: u64) -> &[u64] {
        let end = self.elements.partition_point(|&e| e < x);
        &self.elements[..end]
    }

    /// Elements in `[lo, hi]`.
    pub fn range(&self, lo: u64, hi: u64) -> &[u64] {
        let start = self.elements.partition_point(|&e| e < lo);
        let end = self.elements.partition_point(|&e| e <= hi);
        &self.elements[start..end.max(start)]
    }

    /// The subset `self ∩ [0, bound)`.
    pub fn prefix(&self, bound: u64) -> IntSet {
        IntSet::from_sorted(self.below(bound).to_vec())
    }

    pub fn is_subset(&self, other: &IntSet) -> bool {
        self.iter().all(|e| other.contains(e))
    }

    pub fn with(&self, y: u64) -> IntSet {
        IntSet::from_unsorted(self.iter().chain(std::iter::once(y)))
    }

    pub fn without(&self, y: u64) -> IntSet {
        IntSet::from_sorted(self.iter().filter(|&e| e != y).collect())
    }

    /// Appends a value larger than every element.
    pub(crate) fn push_max(&mut self, x: u64) {
        if let Some(&m) = self.elements.last() {
            assert!(x > m, "push_max({x}) below current max {m}");
        }
        self.bits.grow(x as usize + 1);
        self.bits.set(x as usize);
        self.elements.push(x);
    }

    /// Pre-sizes the membership table so pushes up to `bound` do not reallocate.
    pub(crate) fn reserve_bound(&mut self, bound: u64) {
        self.bits.grow(bound as usize);
    }
}

impl FromIterator<u64> for IntSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        IntSet::from_unsorted(iter)
    }
}

impl Serialize for IntSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.elements.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let elements = Vec::<u64>::deserialize(d)?;
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(serde::de::Error::custom("set elements must be strictly increasing"));
        }
        Ok(IntSet::from_sorted(elements))
    }
}
