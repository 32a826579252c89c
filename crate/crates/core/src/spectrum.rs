//! Frequency-slot unit algebra.
//!
//! A [`Cu`] is a closed interval of unit indices `[lo, hi]`. A
//! [`SpectrumSet`] is an arbitrary set of units stored as an increasing list
//! of maximal, pairwise non-adjacent runs, so the maximal contiguous blocks of
//! a set are its representation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Index of one frequency slot unit.
pub type UnitIndex = u32;

/// Contiguous units `[lo, hi]`, both ends inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cu {
    lo: UnitIndex,
    hi: UnitIndex,
}

impl Cu {
    /// Panics if `lo > hi`.
    pub fn new(lo: UnitIndex, hi: UnitIndex) -> Self {
        assert!(lo <= hi, "invalid CU [{lo},{hi}]");
        Cu { lo, hi }
    }

    pub fn try_new(lo: UnitIndex, hi: UnitIndex) -> Option<Self> {
        (lo <= hi).then_some(Cu { lo, hi })
    }

    /// The CU of `size` units starting at `lo`.
    pub fn with_size(lo: UnitIndex, size: u32) -> Self {
        assert!(size >= 1, "a CU holds at least one unit");
        Cu::new(lo, lo + size - 1)
    }

    pub fn lo(&self) -> UnitIndex {
        self.lo
    }

    pub fn hi(&self) -> UnitIndex {
        self.hi
    }

    pub fn size(&self) -> u32 {
        self.hi - self.lo + 1
    }

    /// True iff `inner` is a subset of `self`.
    pub fn includes(&self, inner: &Cu) -> bool {
        self.lo <= inner.lo && inner.hi <= self.hi
    }

    /// Neither CU includes the other.
    pub fn incomparable(&self, other: &Cu) -> bool {
        !self.includes(other) && !other.includes(self)
    }

    pub fn intersect(&self, other: &Cu) -> Option<Cu> {
        Cu::try_new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn contains_unit(&self, unit: UnitIndex) -> bool {
        self.lo <= unit && unit <= self.hi
    }
}

/// Free-function form of [`Cu::includes`].
pub fn cu_includes(outer: &Cu, inner: &Cu) -> bool {
    outer.includes(inner)
}

impl fmt::Display for Cu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

impl Serialize for Cu {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Cu {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[UnitIndex; 2]>::deserialize(deserializer)?;
        Cu::try_new(lo, hi).ok_or_else(|| serde::de::Error::custom(format!("invalid CU [{lo},{hi}]")))
    }
}

/// A set of units kept as maximal runs in increasing order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SpectrumSet {
    runs: Vec<Cu>,
}

impl SpectrumSet {
    pub fn empty() -> Self {
        SpectrumSet { runs: Vec::new() }
    }

    /// All `omega` units, `[0, omega-1]`. Empty when `omega == 0`.
    pub fn full(omega: u32) -> Self {
        if omega == 0 {
            return SpectrumSet::empty();
        }
        SpectrumSet { runs: vec![Cu::new(0, omega - 1)] }
    }

    pub fn from_cu(cu: Cu) -> Self {
        SpectrumSet { runs: vec![cu] }
    }

    /// Builds a set from CUs in any order; overlapping and adjacent CUs merge.
    pub fn from_cus<I: IntoIterator<Item = Cu>>(cus: I) -> Self {
        let mut all: Vec<Cu> = cus.into_iter().collect();
        all.sort_unstable();
        let mut runs: Vec<Cu> = Vec::with_capacity(all.len());
        for cu in all {
            match runs.last_mut() {
                Some(last) if cu.lo <= last.hi.saturating_add(1) => last.hi = last.hi.max(cu.hi),
                _ => runs.push(cu),
            }
        }
        SpectrumSet { runs }
    }

    pub fn from_units<I: IntoIterator<Item = UnitIndex>>(units: I) -> Self {
        SpectrumSet::from_cus(units.into_iter().map(|u| Cu::new(u, u)))
    }

    /// The maximal runs, in increasing order.
    pub fn runs(&self) -> &[Cu] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn unit_count(&self) -> u64 {
        self.runs.iter().map(|r| u64::from(r.size())).sum()
    }

    pub fn largest_run(&self) -> u32 {
        self.runs.iter().map(Cu::size).max().unwrap_or(0)
    }

    pub fn contains_unit(&self, unit: UnitIndex) -> bool {
        self.run_containing(unit).is_some()
    }

    /// True iff every unit of `cu` is in the set.
    pub fn contains_cu(&self, cu: &Cu) -> bool {
        self.run_containing(cu.lo).is_some_and(|i| self.runs[i].includes(cu))
    }

    fn run_containing(&self, unit: UnitIndex) -> Option<usize> {
        let i = self.runs.partition_point(|r| r.hi < unit);
        (i < self.runs.len() && self.runs[i].lo <= unit).then_some(i)
    }

    pub fn is_disjoint_from_cu(&self, cu: &Cu) -> bool {
        let i = self.runs.partition_point(|r| r.hi < cu.lo);
        i == self.runs.len() || self.runs[i].lo > cu.hi
    }

    pub fn intersect(&self, other: &SpectrumSet) -> SpectrumSet {
        let (a, b) = (&self.runs, &other.runs);
        let mut runs = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if let Some(cu) = a[i].intersect(&b[j]) {
                runs.push(cu);
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces of distinct maximal runs are separated by a gap in at least
        // one operand, so they stay non-adjacent.
        SpectrumSet { runs }
    }

    /// The maximal runs of `self ∩ cu`.
    pub fn clip(&self, cu: &Cu) -> impl Iterator<Item = Cu> + '_ {
        let start = self.runs.partition_point(|r| r.hi < cu.lo);
        let cu = *cu;
        self.runs[start..]
            .iter()
            .take_while(move |r| r.lo <= cu.hi)
            .filter_map(move |r| r.intersect(&cu))
    }

    /// Lowest-indexed CU of `k` units inside the set.
    pub fn first_fit(&self, k: u32) -> Option<Cu> {
        assert!(k >= 1, "first_fit needs k >= 1");
        self.runs.iter().find(|r| r.size() >= k).map(|r| Cu::with_size(r.lo, k))
    }

    /// Removes `cu`, which must be wholly contained in the set.
    pub fn subtract(&self, cu: &Cu) -> Result<SpectrumSet> {
        let mut out = self.clone();
        out.remove(cu)?;
        Ok(out)
    }

    /// Restores `cu`, which must be disjoint from the set.
    pub fn add(&self, cu: &Cu) -> Result<SpectrumSet> {
        let mut out = self.clone();
        out.insert(cu)?;
        Ok(out)
    }

    /// In-place [`SpectrumSet::subtract`].
    pub fn remove(&mut self, cu: &Cu) -> Result<()> {
        let i = self
            .run_containing(cu.lo)
            .filter(|&i| self.runs[i].includes(cu))
            .ok_or_else(|| Error::Spectrum(format!("{cu} is not available in {self}")))?;
        let run = self.runs[i];
        let left = (run.lo < cu.lo).then(|| Cu::new(run.lo, cu.lo - 1));
        let right = (cu.hi < run.hi).then(|| Cu::new(cu.hi + 1, run.hi));
        self.runs.splice(i..=i, left.into_iter().chain(right));
        Ok(())
    }

    /// In-place [`SpectrumSet::add`].
    pub fn insert(&mut self, cu: &Cu) -> Result<()> {
        if !self.is_disjoint_from_cu(cu) {
            return Err(Error::Spectrum(format!("{cu} overlaps {self}")));
        }
        let i = self.runs.partition_point(|r| r.hi < cu.lo);
        let mut merged = *cu;
        let mut from = i;
        let mut to = i;
        if i > 0 && self.runs[i - 1].hi + 1 == cu.lo {
            from = i - 1;
            merged.lo = self.runs[i - 1].lo;
        }
        if i < self.runs.len() && cu.hi + 1 == self.runs[i].lo {
            merged.hi = self.runs[i].hi;
            to = i + 1;
        }
        self.runs.splice(from..to, std::iter::once(merged));
        Ok(())
    }

    /// Checks the maximal-run invariant.
    pub fn is_well_formed(&self) -> bool {
        self.runs.windows(2).all(|w| w[0].hi + 1 < w[1].lo)
    }

    pub fn units(&self) -> impl Iterator<Item = UnitIndex> + '_ {
        self.runs.iter().flat_map(|r| r.lo..=r.hi)
    }
}

/// Free-function form of [`SpectrumSet::intersect`].
pub fn intersect(a: &SpectrumSet, b: &SpectrumSet) -> SpectrumSet {
    a.intersect(b)
}

/// The CUs that relaxation enumerates: the set's maximal runs.
pub fn maximal_runs(s: &SpectrumSet) -> Vec<Cu> {
    s.runs().to_vec()
}

/// Free-function form of [`SpectrumSet::first_fit`].
pub fn first_fit(s: &SpectrumSet, k: u32) -> Option<Cu> {
    s.first_fit(k)
}

impl fmt::Display for SpectrumSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for SpectrumSet {
    type Err = Error;

    /// Parses `"0-1,3-5"`; a bare `"7"` is the single unit 7 and `""` is empty.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(SpectrumSet::empty());
        }
        let bad = |part: &str| Error::Parse(format!("bad spectrum run {part:?} in {s:?}"));
        let mut cus = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let (lo, hi) = match part.split_once('-') {
                Some((lo, hi)) => (lo.trim(), hi.trim()),
                None => (part, part),
            };
            let lo: UnitIndex = lo.parse().map_err(|_| bad(part))?;
            let hi: UnitIndex = hi.parse().map_err(|_| bad(part))?;
            cus.push(Cu::try_new(lo, hi).ok_or_else(|| bad(part))?);
        }
        Ok(SpectrumSet::from_cus(cus))
    }
}

impl Serialize for SpectrumSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.runs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpectrumSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let cus = Vec::<Cu>::deserialize(deserializer)?;
        Ok(SpectrumSet::from_cus(cus))
    }
}
