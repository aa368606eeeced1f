use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Binary `n × n` toggle matrix: entry `(r, i)` is set when bulb `i` is
/// toggled at stage `r`.
///
/// Stages are numbered `1..=n` and bulbs `0..n`. Each stage is stored as a
/// bitset of `⌈n/64⌉` words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ToggleMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl ToggleMatrix {
    /// The all-zero matrix; not a configuration.
    pub fn zeros(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self { n, words, bits: vec![0; n * words] }
    }

    /// Builds a matrix from the toggled bulbs of each stage, stage 1 first.
    pub fn from_stage_sets(n: usize, stages: &[&[usize]]) -> Result<Self> {
        if stages.len() != n {
            return Err(Error::InvalidConfiguration { reason: "need one bulb set per stage" });
        }
        let mut m = Self::zeros(n);
        for (r, set) in stages.iter().enumerate() {
            for &i in *set {
                if i >= n {
                    return Err(Error::InvalidConfiguration { reason: "bulb index out of range" });
                }
                m.set(r + 1, i, true);
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn row(&self, stage: usize) -> &[u64] {
        let start = (stage - 1) * self.words;
        &self.bits[start..start + self.words]
    }

    pub(crate) fn row_mut(&mut self, stage: usize) -> &mut [u64] {
        let start = (stage - 1) * self.words;
        &mut self.bits[start..start + self.words]
    }

    pub fn get(&self, stage: usize, bulb: usize) -> bool {
        self.row(stage)[bulb / 64] >> (bulb % 64) & 1 == 1
    }

    pub fn set(&mut self, stage: usize, bulb: usize, value: bool) {
        let word = &mut self.row_mut(stage)[bulb / 64];
        let mask = 1u64 << (bulb % 64);
        if value {
            *word |= mask;
        } else {
            *word &= !mask;
        }
    }

    /// Number of bulbs toggled at `stage`.
    pub fn row_count(&self, stage: usize) -> usize {
        self.row(stage).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Interchanges entries `(stage, i)` and `(stage, j)` in place.
    pub fn swap(&mut self, stage: usize, i: usize, j: usize) {
        let (a, b) = (self.get(stage, i), self.get(stage, j));
        if a != b {
            self.set(stage, i, b);
            self.set(stage, j, a);
        }
    }

    /// Copy with entries `(stage, i)` and `(stage, j)` interchanged.
    pub fn swapped(&self, stage: usize, i: usize, j: usize) -> Self {
        let mut m = self.clone();
        m.swap(stage, i, j);
        m
    }

    /// Whether stage `r` toggles exactly `r` bulbs for every `r`.
    pub fn is_configuration(&self) -> bool {
        (1..=self.n).all(|r| self.row_count(r) == r)
    }

    /// Final on/off states as a bitset: the XOR of all stages.
    pub fn final_state_bits(&self) -> Vec<u64> {
        let mut acc = vec![0u64; self.words];
        for r in 1..=self.n {
            for (a, w) in acc.iter_mut().zip(self.row(r)) {
                *a ^= w;
            }
        }
        acc
    }

    /// Final state of every bulb and the number `Y` of bulbs left on.
    pub fn final_states(&self) -> (Vec<bool>, usize) {
        let bits = self.final_state_bits();
        let states: Vec<bool> = (0..self.n).map(|i| bits[i / 64] >> (i % 64) & 1 == 1).collect();
        let y = bits.iter().map(|w| w.count_ones() as usize).sum();
        (states, y)
    }

    pub fn final_state(&self, bulb: usize) -> bool {
        (1..=self.n).fold(false, |acc, r| acc ^ self.get(r, bulb))
    }

    /// Number of bulbs at `stage` whose toggle equals `value`, leaving out
    /// `excluded`.
    pub(crate) fn count_with(&self, stage: usize, value: bool, excluded: Option<usize>) -> usize {
        let ones = self.row_count(stage);
        let base = if value { ones } else { self.n - ones };
        match excluded {
            Some(e) if self.get(stage, e) == value => base - 1,
            _ => base,
        }
    }

    /// The `t`-th bulb (0-based, ascending) at `stage` whose toggle equals
    /// `value`, skipping `excluded`.
    pub(crate) fn nth_with(&self, stage: usize, value: bool, excluded: Option<usize>, mut t: usize) -> usize {
        for (w_idx, &word) in self.row(stage).iter().enumerate() {
            let mut word = if value { word } else { !word };
            let base = w_idx * 64;
            if base + 64 > self.n {
                word &= (1u64 << (self.n - base)) - 1;
            }
            if let Some(e) = excluded {
                if e / 64 == w_idx {
                    word &= !(1u64 << (e % 64));
                }
            }
            let c = word.count_ones() as usize;
            if t < c {
                for _ in 0..t {
                    word &= word - 1;
                }
                return base + word.trailing_zeros() as usize;
            }
            t -= c;
        }
        unreachable!("index beyond candidate count")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn staircase() -> ToggleMatrix {
        ToggleMatrix::from_stage_sets(4, &[&[0], &[0, 1], &[0, 1, 2], &[0, 1, 2, 3]]).unwrap()
    }

    #[test]
    fn staircase_final_states() {
        let m = staircase();
        assert!(m.is_configuration());
        let (states, y) = m.final_states();
        assert_eq!(states, [false, true, false, true]);
        assert_eq!(y, 2);
        assert!(m.final_state(3) && !m.final_state(0));
    }

    #[test]
    fn single_bulb() {
        let m = ToggleMatrix::from_stage_sets(1, &[&[0]]).unwrap();
        assert!(m.is_configuration());
        assert_eq!(m.final_states().1, 1);
    }

    #[test]
    fn swap_is_involution_and_keeps_rows() {
        let m = staircase();
        let s = m.swapped(2, 1, 3);
        assert_ne!(s, m);
        assert!(s.is_configuration());
        assert_eq!(s.swapped(2, 1, 3), m);
        assert_eq!(m.swapped(2, 1, 1), m);
    }

    #[test]
    fn candidate_selection() {
        let m = staircase();
        // Stage 2 zeros are bulbs 2 and 3.
        assert_eq!(m.count_with(2, false, None), 2);
        assert_eq!(m.count_with(2, false, Some(3)), 1);
        assert_eq!(m.nth_with(2, false, None, 1), 3);
        assert_eq!(m.nth_with(2, false, Some(2), 0), 3);
        assert_eq!(m.nth_with(3, true, Some(0), 1), 2);
    }

    #[test]
    fn wide_matrix_words() {
        let mut m = ToggleMatrix::zeros(130);
        m.set(5, 129, true);
        m.set(5, 64, true);
        assert_eq!(m.row_count(5), 2);
        assert_eq!(m.count_with(5, false, None), 128);
        assert_eq!(m.nth_with(5, true, None, 1), 129);
        assert_eq!(m.nth_with(5, false, None, 127), 128);
        m.swap(5, 129, 0);
        assert!(m.get(5, 0) && !m.get(5, 129));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ToggleMatrix::from_stage_sets(2, &[&[0]]).is_err());
        assert!(ToggleMatrix::from_stage_sets(1, &[&[3]]).is_err());
        let m = ToggleMatrix::from_stage_sets(2, &[&[0, 1], &[0]]).unwrap();
        assert!(!m.is_configuration());
    }
}
