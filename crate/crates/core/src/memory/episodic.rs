use std::collections::VecDeque;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use super::buffer::DEFAULT_BUFFER_CAPACITY;
use super::{check_unit_box, BiasState, Couplet};
use crate::error::{Error, Result};

/// Default number of sequences the long-term store holds.
pub const DEFAULT_EC_CAPACITY: usize = 500;

/// What happens when a store arrives at a full memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Retention {
    /// Once full, the memory never changes again.
    Fixed,
    /// The oldest sequence makes room for the new one.
    Fifo,
}

impl fmt::Display for Retention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Retention::Fixed => "fixed",
            Retention::Fifo => "fifo",
        })
    }
}

impl FromStr for Retention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fixed" => Ok(Retention::Fixed),
            "fifo" => Ok(Retention::Fifo),
            other => Err(format!("unknown retention policy '{other}' (expected fixed or fifo)")),
        }
    }
}

/// A rewarded run of couplets, stored as one unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    couplets: Vec<Couplet>,
    reward: f64,
    insertion_index: u64,
}

impl Sequence {
    pub fn couplets(&self) -> &[Couplet] {
        &self.couplets
    }

    pub fn len(&self) -> usize {
        self.couplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.couplets.is_empty()
    }

    pub fn reward(&self) -> f64 {
        self.reward
    }

    pub fn insertion_index(&self) -> u64 {
        self.insertion_index
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreOutcome {
    Stored,
    /// Fifo mode made room by dropping the sequence with this insertion index.
    StoredAfterEviction { evicted: u64 },
    /// Fixed mode and already full.
    Discarded,
}

/// Borrowed description of one stored couplet in flat order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupletView<'a> {
    pub flat_index: usize,
    pub couplet: &'a Couplet,
    pub seq_id: u64,
    pub position: usize,
    pub seq_length: usize,
    pub seq_reward: f64,
}

/// Column-wise flat addressing of every stored couplet, ordered by
/// (sequence insertion order, position). Feature rows are contiguous so the
/// similarity scan walks one slice.
///
/// Any mutation of the memory bumps `generation`; indices taken from an older
/// generation are stale.
#[derive(Debug, Clone, Default)]
pub struct CoupletIndex {
    generation: u64,
    dim: usize,
    features: Vec<f64>,
    actions: Vec<usize>,
    seq_ids: Vec<u64>,
    positions: Vec<usize>,
    seq_lengths: Vec<usize>,
    rewards: Vec<f64>,
    // flat indices ordered by first feature, for range pruning
    by_first: Vec<u32>,
}

impl CoupletIndex {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Feature dimension, zero until the first store.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All feature rows back to back, `len() * dim()` values.
    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn action(&self, i: usize) -> usize {
        self.actions[i]
    }

    pub fn seq_id(&self, i: usize) -> u64 {
        self.seq_ids[i]
    }

    pub fn position(&self, i: usize) -> usize {
        self.positions[i]
    }

    pub fn seq_length(&self, i: usize) -> usize {
        self.seq_lengths[i]
    }

    pub fn reward(&self, i: usize) -> f64 {
        self.rewards[i]
    }

    /// Flat index of the next couplet in the same sequence, if any.
    pub fn successor(&self, i: usize) -> Option<usize> {
        (self.positions[i] + 1 < self.seq_lengths[i]).then_some(i + 1)
    }

    fn append(&mut self, seq: &Sequence) {
        let len = seq.len();
        for (position, c) in seq.couplets.iter().enumerate() {
            self.features.extend_from_slice(&c.state);
            self.actions.push(c.action);
            self.seq_ids.push(seq.insertion_index);
            self.positions.push(position);
            self.seq_lengths.push(len);
            self.rewards.push(seq.reward);
        }
    }

    /// Flat indices whose first feature lies within `radius` of `x`, in
    /// first-feature order.
    pub(crate) fn near_first(&self, x: f64, radius: f64) -> &[u32] {
        let first = |&i: &u32| self.features[i as usize * self.dim];
        let lo = self.by_first.partition_point(|i| first(i) < x - radius);
        let hi = self.by_first.partition_point(|i| first(i) <= x + radius);
        &self.by_first[lo..hi.max(lo)]
    }

    fn sort_by_first(&mut self) {
        let n = u32::try_from(self.len()).expect("couplet count fits in u32");
        self.by_first = (0..n).collect();
        let (features, dim) = (&self.features, self.dim);
        self.by_first.sort_by(|&a, &b| features[a as usize * dim].total_cmp(&features[b as usize * dim]).then(a.cmp(&b)));
    }

    fn drop_front(&mut self, n: usize) {
        self.features.drain(..n * self.dim);
        self.actions.drain(..n);
        self.seq_ids.drain(..n);
        self.positions.drain(..n);
        self.seq_lengths.drain(..n);
        self.rewards.drain(..n);
    }
}

/// Bounded long-term store of rewarded sequences.
#[derive(Debug, Clone)]
pub struct EpisodicMemory {
    capacity: usize,
    retention: Retention,
    max_sequence_len: usize,
    sequences: VecDeque<Sequence>,
    next_insertion: u64,
    index: CoupletIndex,
}

impl EpisodicMemory {
    pub fn new(capacity: usize, retention: Retention) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidConfig("episodic memory capacity must be positive".into()));
        }
        Ok(Self {
            capacity,
            retention,
            max_sequence_len: DEFAULT_BUFFER_CAPACITY,
            sequences: VecDeque::new(),
            next_insertion: 0,
            index: CoupletIndex::default(),
        })
    }

    /// Upper bound on stored sequence length; matches the short-term buffer.
    pub fn with_max_sequence_len(mut self, len: usize) -> Self {
        self.max_sequence_len = len.max(1);
        self
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn retention(&self) -> Retention {
        self.retention
    }

    /// Number of stored sequences.
    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.sequences.len() >= self.capacity
    }

    pub fn couplet_count(&self) -> usize {
        self.index.len()
    }

    pub fn sequences(&self) -> impl Iterator<Item = &Sequence> {
        self.sequences.iter()
    }

    pub fn index(&self) -> &CoupletIndex {
        &self.index
    }

    pub fn generation(&self) -> u64 {
        self.index.generation
    }

    /// Fresh bias state aligned with the current contents (all ones).
    pub fn fresh_bias(&self) -> BiasState {
        let mut bias = BiasState::default();
        bias.extend_fresh(self.index.len());
        bias.set_generation(self.index.generation);
        bias
    }

    /// Stores a rewarded sequence, keeping `bias` aligned with the flat index.
    pub fn store(&mut self, bias: &mut BiasState, couplets: Vec<Couplet>, reward: f64) -> Result<StoreOutcome> {
        if couplets.is_empty() {
            return Err(Error::EmptySequence);
        }
        if !(reward > 0.0) || !reward.is_finite() {
            return Err(Error::NonPositiveReward(reward));
        }
        if couplets.len() > self.max_sequence_len {
            return Err(Error::SequenceTooLong { length: couplets.len(), capacity: self.max_sequence_len });
        }
        let dim = if self.index.is_empty() && self.index.dim == 0 { couplets[0].state.len() } else { self.index.dim };
        for c in &couplets {
            if c.state.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: c.state.len() });
            }
            check_unit_box(&c.state)?;
        }
        self.check_aligned(bias)?;

        let mut outcome = StoreOutcome::Stored;
        if self.is_full() {
            match self.retention {
                Retention::Fixed => return Ok(StoreOutcome::Discarded),
                Retention::Fifo => {
                    let oldest = self.sequences.pop_front().expect("full memory is non-empty");
                    self.index.drop_front(oldest.len());
                    bias.drop_front(oldest.len());
                    outcome = StoreOutcome::StoredAfterEviction { evicted: oldest.insertion_index };
                }
            }
        }

        let seq = Sequence { couplets, reward, insertion_index: self.next_insertion };
        self.next_insertion += 1;
        self.index.dim = dim;
        self.index.append(&seq);
        bias.extend_fresh(seq.len());
        self.sequences.push_back(seq);

        self.index.sort_by_first();
        self.index.generation += 1;
        bias.set_generation(self.index.generation);
        Ok(outcome)
    }

    pub(crate) fn check_aligned(&self, bias: &BiasState) -> Result<()> {
        if bias.generation() != self.index.generation {
            return Err(Error::StaleView { view: bias.generation(), current: self.index.generation });
        }
        if bias.len() != self.index.len() {
            return Err(Error::DimensionMismatch { expected: self.index.len(), found: bias.len() });
        }
        Ok(())
    }

    /// One view per stored couplet, in flat order.
    pub fn couplet_view(&self) -> Vec<CoupletView<'_>> {
        let mut flat_index = 0;
        let mut out = Vec::with_capacity(self.index.len());
        for seq in &self.sequences {
            for (position, couplet) in seq.couplets.iter().enumerate() {
                out.push(CoupletView {
                    flat_index,
                    couplet,
                    seq_id: seq.insertion_index,
                    position,
                    seq_length: seq.len(),
                    seq_reward: seq.reward,
                });
                flat_index += 1;
            }
        }
        out
    }

    /// Line-oriented text dump: a `>` record header per sequence
    /// (`> insertion_index reward length`), then one CSV line per couplet with
    /// the state components followed by the action.
    pub fn write_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "# episodic memory: {} sequences, capacity {}, retention {}, dim {}",
            self.len(),
            self.capacity,
            self.retention,
            self.index.dim
        )?;
        for seq in &self.sequences {
            writeln!(w, "> {} {} {}", seq.insertion_index, seq.reward, seq.len())?;
            for c in &seq.couplets {
                for v in &c.state {
                    write!(w, "{v},")?;
                }
                writeln!(w, "{}", c.action)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(tag: usize, len: usize) -> Vec<Couplet> {
        (0..len).map(|p| Couplet { state: vec![tag as f64 / 10.0, p as f64 / 100.0], action: p % 4 }).collect()
    }

    fn first_states(mem: &EpisodicMemory) -> Vec<f64> {
        mem.sequences().map(|s| s.couplets()[0].state[0]).collect()
    }

    #[test]
    fn fixed_mode_ignores_stores_once_full() {
        let mut mem = EpisodicMemory::new(2, Retention::Fixed).unwrap();
        let mut bias = mem.fresh_bias();
        mem.store(&mut bias, seq(1, 3), 1.0).unwrap();
        mem.store(&mut bias, seq(2, 3), 1.0).unwrap();
        let before: Vec<Sequence> = mem.sequences().cloned().collect();
        let generation = mem.generation();
        assert_eq!(mem.store(&mut bias, seq(3, 3), 2.0).unwrap(), StoreOutcome::Discarded);
        assert_eq!(mem.sequences().cloned().collect::<Vec<_>>(), before);
        assert_eq!(mem.generation(), generation);
    }

    #[test]
    fn fifo_mode_evicts_the_oldest() {
        let mut mem = EpisodicMemory::new(2, Retention::Fifo).unwrap();
        let mut bias = mem.fresh_bias();
        mem.store(&mut bias, seq(1, 3), 1.0).unwrap();
        mem.store(&mut bias, seq(2, 2), 1.0).unwrap();
        let out = mem.store(&mut bias, seq(3, 4), 1.0).unwrap();
        assert_eq!(out, StoreOutcome::StoredAfterEviction { evicted: 0 });
        assert_eq!(first_states(&mem), vec![0.2, 0.3]);
        assert_eq!(bias.len(), 6);
    }

    #[test]
    fn first_store_has_unit_bias() {
        let mut mem = EpisodicMemory::new(10, Retention::Fixed).unwrap();
        let mut bias = mem.fresh_bias();
        mem.store(&mut bias, seq(1, 5), 2.5).unwrap();
        assert_eq!(mem.len(), 1);
        assert_eq!(bias.values(), &[1.0; 5]);
    }

    #[test]
    fn view_positions_follow_sequence_order() {
        let mut mem = EpisodicMemory::new(10, Retention::Fixed).unwrap();
        assert!(mem.couplet_view().is_empty());
        let mut bias = mem.fresh_bias();
        mem.store(&mut bias, seq(1, 3), 1.0).unwrap();
        mem.store(&mut bias, seq(2, 2), 1.0).unwrap();
        let view = mem.couplet_view();
        assert_eq!(view.iter().map(|v| v.position).collect::<Vec<_>>(), vec![0, 1, 2, 0, 1]);
        assert_eq!(view.iter().map(|v| v.flat_index).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn view_is_rebuilt_after_eviction() {
        let mut mem = EpisodicMemory::new(2, Retention::Fifo).unwrap();
        let mut bias = mem.fresh_bias();
        mem.store(&mut bias, seq(1, 3), 1.0).unwrap();
        mem.store(&mut bias, seq(2, 2), 1.5).unwrap();
        mem.store(&mut bias, seq(3, 4), 2.0).unwrap();
        let view = mem.couplet_view();
        assert_eq!(view.len(), 6);
        assert_eq!(view.iter().map(|v| v.flat_index).collect::<Vec<_>>(), (0..6).collect::<Vec<_>>());
        assert_eq!(view.iter().map(|v| v.position).collect::<Vec<_>>(), vec![0, 1, 0, 1, 2, 3]);
        assert_eq!(view.iter().map(|v| v.seq_id).collect::<Vec<_>>(), vec![1, 1, 2, 2, 2, 2]);
        let index = mem.index();
        for v in &view {
            assert_eq!(index.state(v.flat_index), v.couplet.state.as_slice());
            assert_eq!(index.action(v.flat_index), v.couplet.action);
            assert_eq!(index.reward(v.flat_index), v.seq_reward);
        }
    }

    #[test]
    fn rejects_bad_stores() {
        let mut mem = EpisodicMemory::new(2, Retention::Fixed).unwrap();
        let mut bias = mem.fresh_bias();
        assert_eq!(mem.store(&mut bias, vec![], 1.0), Err(Error::EmptySequence));
        assert_eq!(mem.store(&mut bias, seq(1, 2), 0.0), Err(Error::NonPositiveReward(0.0)));
        assert!(matches!(mem.store(&mut bias, seq(1, 2), -1.0), Err(Error::NonPositiveReward(_))));
        assert!(matches!(mem.store(&mut bias, seq(1, 51), 1.0), Err(Error::SequenceTooLong { .. })));
        assert!(EpisodicMemory::new(0, Retention::Fifo).is_err());
    }

    #[test]
    fn stale_bias_is_rejected() {
        let mut mem = EpisodicMemory::new(4, Retention::Fixed).unwrap();
        let mut stale = mem.fresh_bias();
        let mut bias = mem.fresh_bias();
        mem.store(&mut bias, seq(1, 2), 1.0).unwrap();
        assert!(matches!(mem.store(&mut stale, seq(2, 2), 1.0), Err(Error::StaleView { .. })));
    }

    #[test]
    fn insertion_index_is_monotone() {
        let mut mem = EpisodicMemory::new(2, Retention::Fifo).unwrap();
        let mut bias = mem.fresh_bias();
        for i in 0..6 {
            mem.store(&mut bias, seq(i, 1), 1.0).unwrap();
        }
        let ids: Vec<u64> = mem.sequences().map(Sequence::insertion_index).collect();
        assert_eq!(ids, vec![4, 5]);
    }

    #[test]
    fn dump_lists_every_couplet() {
        let mut mem = EpisodicMemory::new(2, Retention::Fixed).unwrap();
        let mut bias = mem.fresh_bias();
        mem.store(&mut bias, seq(1, 2), 2.5).unwrap();
        let mut out = Vec::new();
        mem.write_dump(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "> 0 2.5 2");
        assert_eq!(lines[2], "0.1,0,0");
        assert_eq!(lines[3], "0.1,0.01,1");
    }
}
