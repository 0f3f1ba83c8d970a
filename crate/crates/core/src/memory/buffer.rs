use std::collections::VecDeque;

use super::Couplet;

/// Default length of the short-term buffer.
pub const DEFAULT_BUFFER_CAPACITY: usize = 50;

/// Fixed-length FIFO holding the most recent couplets of the current episode.
#[derive(Debug, Clone)]
pub struct ShortTermBuffer {
    capacity: usize,
    entries: VecDeque<Couplet>,
}

impl ShortTermBuffer {
    /// # Panics
    /// If `capacity` is zero.
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "short-term buffer capacity must be positive");
        Self { capacity, entries: VecDeque::with_capacity(capacity) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends `couplet`, evicting the oldest entry when full.
    pub fn push(&mut self, couplet: Couplet) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(couplet);
    }

    /// Takes the contents out in insertion order, leaving the buffer empty.
    pub fn drain(&mut self) -> Vec<Couplet> {
        self.entries.drain(..).collect()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn iter(&self) -> impl Iterator<Item = &Couplet> {
        self.entries.iter()
    }
}

impl Default for ShortTermBuffer {
    fn default() -> Self {
        Self::new(DEFAULT_BUFFER_CAPACITY)
    }
}
