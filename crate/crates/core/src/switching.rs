//! Switching sequences: which antenna is activated in which time slot.
//!
//! Slots are the canonical representation; `delta_t` converts a slot index to
//! seconds only when activation instants are requested. A sequence that
//! carries a [`Partition`] is a hybrid sequence: subset `i` of the partition
//! owns a contiguous block of slots, and blocks follow partition list order.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Default slot period in seconds.
pub const DEFAULT_SLOT_PERIOD_S: f64 = 13e-6;

/// Disjoint contiguous antenna-index ranges covering `0..M`.
///
/// List order is the inter-subset activation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    subsets: Vec<Range<usize>>,
    total: usize,
}

impl Partition {
    pub fn new(subsets: Vec<Range<usize>>) -> Result<Self> {
        if subsets.is_empty() {
            return Err(Error::InvalidPartition("no subsets".into()));
        }
        if let Some(r) = subsets.iter().find(|r| r.is_empty()) {
            return Err(Error::InvalidPartition(format!("empty subset {r:?}")));
        }
        let mut sorted = subsets.clone();
        sorted.sort_by_key(|r| r.start);
        let mut next = 0;
        for r in &sorted {
            if r.start != next {
                return Err(Error::InvalidPartition(format!(
                    "subsets must be disjoint and cover 0..M without gaps (at index {next})"
                )));
            }
            next = r.end;
        }
        Ok(Self {
            subsets,
            total: next,
        })
    }

    /// `count` consecutive subsets of `size` antennas each.
    pub fn uniform(count: usize, size: usize) -> Result<Self> {
        Self::new((0..count).map(|i| i * size..(i + 1) * size).collect())
    }

    /// From explicit index lists; each list must be an ascending run of
    /// consecutive indices.
    pub fn from_index_lists(lists: &[Vec<usize>]) -> Result<Self> {
        let ranges = lists
            .iter()
            .map(|l| {
                let first = *l
                    .first()
                    .ok_or_else(|| Error::InvalidPartition("empty subset".into()))?;
                if l.iter().enumerate().any(|(i, &m)| m != first + i) {
                    return Err(Error::InvalidPartition(format!(
                        "subset starting at {first} is not a contiguous ascending range"
                    )));
                }
                Ok(first..first + l.len())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ranges)
    }

    pub fn to_index_lists(&self) -> Vec<Vec<usize>> {
        self.subsets.iter().map(|r| r.clone().collect()).collect()
    }

    pub fn subsets(&self) -> &[Range<usize>] {
        &self.subsets
    }

    /// Number of antennas covered.
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Slot block owned by each subset, in list order.
    pub fn slot_ranges(&self) -> Vec<Range<usize>> {
        let mut offset = 0;
        self.subsets
            .iter()
            .map(|r| {
                let block = offset..offset + r.len();
                offset += r.len();
                block
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingSequence {
    order: Vec<usize>,
    slot: Vec<usize>,
    delta_t: f64,
    snapshots: usize,
    partition: Option<Partition>,
}

impl SwitchingSequence {
    /// `order[k]` is the antenna activated in slot `k`.
    pub fn new(
        order: Vec<usize>,
        delta_t: f64,
        snapshots: usize,
        partition: Option<Partition>,
    ) -> Result<Self> {
        if order.is_empty() {
            return Err(Error::InvalidSequence("empty order".into()));
        }
        if !(delta_t > 0.0) || !delta_t.is_finite() {
            return Err(Error::InvalidSequence(format!(
                "slot period must be positive, got {delta_t}"
            )));
        }
        if snapshots == 0 {
            return Err(Error::InvalidSequence("need at least one snapshot".into()));
        }
        let m = order.len();
        let mut slot = vec![usize::MAX; m];
        for (k, &a) in order.iter().enumerate() {
            if a >= m || slot[a] != usize::MAX {
                return Err(Error::InvalidSequence(format!(
                    "order is not a permutation of 0..{m} (antenna {a} at slot {k})"
                )));
            }
            slot[a] = k;
        }
        if let Some(p) = &partition {
            if p.len() != m {
                return Err(Error::InvalidPartition(format!(
                    "partition covers {} antennas, sequence has {m}",
                    p.len()
                )));
            }
            for (subset, block) in p.subsets().iter().zip(p.slot_ranges()) {
                if let Some(a) = subset.clone().find(|&a| !block.contains(&slot[a])) {
                    return Err(Error::InvalidSequence(format!(
                        "antenna {a} in slot {} lies outside its subset's slots {block:?}",
                        slot[a]
                    )));
                }
            }
        }
        Ok(Self {
            order,
            slot,
            delta_t,
            snapshots,
            partition,
        })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Slot of each antenna (inverse permutation).
    pub fn slots(&self) -> &[usize] {
        &self.slot
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn snapshots(&self) -> usize {
        self.snapshots
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Same activation order with the partition attached (checked) or removed.
    pub fn with_partition(&self, partition: Option<Partition>) -> Result<Self> {
        Self::new(self.order.clone(), self.delta_t, self.snapshots, partition)
    }

    fn swapped(&self, a: usize, b: usize) -> Self {
        let mut next = self.clone();
        next.order.swap(a, b);
        next.slot[next.order[a]] = a;
        next.slot[next.order[b]] = b;
        next
    }

    /// Activation instants in seconds, one per antenna and snapshot, indexed
    /// `m + t * M`. Snapshot `t` starts at `t * M * delta_t`. With `centered`
    /// the mean instant is subtracted.
    pub fn eta_vector(&self, centered: bool) -> Vec<f64> {
        let m = self.len();
        let center = if centered {
            (m * self.snapshots) as f64 / 2.0 - 0.5
        } else {
            0.0
        };
        (0..self.snapshots)
            .flat_map(|t| self.slot.iter().map(move |&s| ((s + t * m) as f64 - center) * self.delta_t))
            .collect()
    }

    /// Activation instants of the given antennas only (all snapshots),
    /// optionally centered within that restriction.
    pub fn eta_subset(&self, antennas: &[usize], centered: bool) -> Vec<f64> {
        let m = self.len();
        let mut eta: Vec<f64> = (0..self.snapshots)
            .flat_map(|t| antennas.iter().map(move |&a| (self.slot[a] + t * m) as f64 * self.delta_t))
            .collect();
        if centered && !eta.is_empty() {
            let mean = eta.iter().sum::<f64>() / eta.len() as f64;
            eta.iter_mut().for_each(|e| *e -= mean);
        }
        eta
    }

    /// Swaps two distinct uniformly chosen slots.
    pub fn swap_random<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Self> {
        if self.partition.is_some() {
            return Err(Error::InvalidSequence(
                "unconstrained swap on a partitioned sequence; use swap_hybrid".into(),
            ));
        }
        let (a, b) = distinct_pair(0..self.len(), rng)?;
        Ok(self.swapped(a, b))
    }

    /// Swaps two distinct slots inside the slot block of subset
    /// `iteration mod subsets`.
    pub fn swap_hybrid<R: Rng + ?Sized>(&self, iteration: usize, rng: &mut R) -> Result<Self> {
        let partition = self
            .partition
            .as_ref()
            .ok_or_else(|| Error::InvalidPartition("hybrid swap needs a partition".into()))?;
        let blocks = partition.slot_ranges();
        if let Some(b) = blocks.iter().find(|b| b.len() < 2) {
            return Err(Error::InvalidPartition(format!(
                "hybrid swap needs subsets of at least 2 antennas, slot block {b:?} is smaller"
            )));
        }
        let block = blocks[iteration % blocks.len()].clone();
        let (a, b) = distinct_pair(block, rng)?;
        Ok(self.swapped(a, b))
    }
}

fn distinct_pair<R: Rng + ?Sized>(range: Range<usize>, rng: &mut R) -> Result<(usize, usize)> {
    let n = range.len();
    if n < 2 {
        return Err(Error::InvalidSequence(format!(
            "a swap needs at least 2 slots, got {n}"
        )));
    }
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    Ok((range.start + a, range.start + b))
}

/// Identity order.
pub fn sequential(count: usize, delta_t: f64, snapshots: usize) -> Result<SwitchingSequence> {
    SwitchingSequence::new((0..count).collect(), delta_t, snapshots, None)
}

/// Uniformly random order.
pub fn random_init<R: Rng + ?Sized>(
    count: usize,
    delta_t: f64,
    snapshots: usize,
    rng: &mut R,
) -> Result<SwitchingSequence> {
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(rng);
    SwitchingSequence::new(order, delta_t, snapshots, None)
}

/// Random within each subset, sequential across subsets in partition order.
pub fn hybrid_init<R: Rng + ?Sized>(
    partition: &Partition,
    delta_t: f64,
    snapshots: usize,
    rng: &mut R,
) -> Result<SwitchingSequence> {
    let mut order = Vec::with_capacity(partition.len());
    for subset in partition.subsets() {
        let start = order.len();
        order.extend(subset.clone());
        order[start..].shuffle(rng);
    }
    SwitchingSequence::new(order, delta_t, snapshots, Some(partition.clone()))
}
