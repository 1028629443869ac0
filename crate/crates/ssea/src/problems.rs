//! Bit-string genotypes and the bit-counting fitness families (unimodal and
//! multimodal), plus optimality predicates and Hamming distance.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProblemError {
    #[error("genotype length {got} does not match expected length {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("substring length must be even and positive, got {0}")]
    BadSubstringLength(usize),
    #[error("invalid problem dimensions: {0}")]
    InvalidSpec(String),
    #[error("invalid genotype text at position {0}: expected '0' or '1'")]
    BadText(usize),
}

/// Fixed-length bit string stored as packed 64-bit words.
///
/// Bit `i` lives in word `i / 64` at position `i % 64`. Bits past `len` in
/// the last word are always zero, so `Eq` and `Hash` work on the raw words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Genotype {
    words: Vec<u64>,
    len: usize,
}

impl Genotype {
    pub fn zeros(len: usize) -> Self {
        Genotype {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut g = Genotype {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        g.mask_tail();
        g
    }

    /// Each bit drawn independently uniform from {0, 1}.
    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut g = Genotype {
            words: (0..len.div_ceil(64)).map(|_| rng.gen::<u64>()).collect(),
            len,
        };
        g.mask_tail();
        g
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Count of 1-bits in the half-open bit range `[start, end)`.
    pub fn count_ones_in_range(&self, start: usize, end: usize) -> u32 {
        assert!(start <= end && end <= self.len);
        if start == end {
            return 0;
        }
        let (ws, we) = (start / 64, (end - 1) / 64);
        let lo_mask = u64::MAX << (start % 64);
        let hi_mask = u64::MAX >> (63 - (end - 1) % 64);
        if ws == we {
            return (self.words[ws] & lo_mask & hi_mask).count_ones();
        }
        let mut total = (self.words[ws] & lo_mask).count_ones();
        for w in &self.words[ws + 1..we] {
            total += w.count_ones();
        }
        total + (self.words[we] & hi_mask).count_ones()
    }

    pub fn complement(&self) -> Self {
        let mut g = Genotype {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        g.mask_tail();
        g
    }

    /// Copy another genotype of the same length into this one, reusing the
    /// existing allocation.
    pub fn copy_from(&mut self, other: &Genotype) {
        debug_assert_eq!(self.len, other.len);
        self.words.copy_from_slice(&other.words);
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genotype(\"{self}\")")
    }
}

impl FromStr for Genotype {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut g = Genotype::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => g.set(i, true),
                _ => return Err(ProblemError::BadText(i)),
            }
        }
        Ok(g)
    }
}

/// Count of positions where the two genotypes differ.
pub fn hamming_distance(a: &Genotype, b: &Genotype) -> Result<u32, ProblemError> {
    if a.len != b.len {
        return Err(ProblemError::DimensionMismatch {
            expected: a.len,
            got: b.len,
        });
    }
    Ok(a.words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    OneMax,
    NMax,
}

/// Identifies the fitness function and its dimensions: substring length `b`
/// and substring count `l` (1 for the unimodal case).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProblemSpec {
    kind: ProblemKind,
    b: usize,
    l: usize,
}

impl ProblemSpec {
    pub fn onemax(b: usize) -> Result<Self, ProblemError> {
        if b < 1 {
            return Err(ProblemError::InvalidSpec("b must be >= 1".into()));
        }
        Ok(ProblemSpec {
            kind: ProblemKind::OneMax,
            b,
            l: 1,
        })
    }

    pub fn nmax(b: usize, l: usize) -> Result<Self, ProblemError> {
        if b < 1 || !b.is_multiple_of(2) {
            return Err(ProblemError::BadSubstringLength(b));
        }
        if l < 1 {
            return Err(ProblemError::InvalidSpec("l must be >= 1".into()));
        }
        Ok(ProblemSpec {
            kind: ProblemKind::NMax,
            b,
            l,
        })
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn genotype_len(&self) -> usize {
        self.b * self.l
    }

    pub fn max_fitness(&self) -> u32 {
        match self.kind {
            ProblemKind::OneMax => self.b as u32,
            ProblemKind::NMax => (self.l * self.b / 2) as u32,
        }
    }

    /// Number of distinct globally optimal genotypes: 1, or 2^l for the
    /// concatenated bimodal blocks.
    pub fn optima_count(&self) -> u128 {
        match self.kind {
            ProblemKind::OneMax => 1,
            ProblemKind::NMax => 1u128 << self.l,
        }
    }

    pub fn fitness(&self, g: &Genotype) -> Result<u32, ProblemError> {
        if g.len() != self.genotype_len() {
            return Err(ProblemError::DimensionMismatch {
                expected: self.genotype_len(),
                got: g.len(),
            });
        }
        Ok(match self.kind {
            ProblemKind::OneMax => g.count_ones(),
            ProblemKind::NMax => (0..self.l)
                .map(|i| twomax_block(g, i * self.b, self.b))
                .sum(),
        })
    }

    pub fn is_optimal(&self, g: &Genotype) -> Result<bool, ProblemError> {
        Ok(self.fitness(g)? == self.max_fitness())
    }
}

/// Count of 1-bits of the whole genotype.
pub fn onemax(g: &Genotype) -> u32 {
    g.count_ones()
}

/// |b/2 - ones| over the whole genotype, treated as a single substring of
/// even length b. Maximal (b/2) exactly at the 0-string and the 1-string.
pub fn twomax(g: &Genotype) -> Result<u32, ProblemError> {
    if g.len() < 2 || !g.len().is_multiple_of(2) {
        return Err(ProblemError::BadSubstringLength(g.len()));
    }
    Ok(twomax_block(g, 0, g.len()))
}

/// Sum of the bimodal block scores over the l consecutive disjoint
/// substrings of length b.
pub fn nmax(g: &Genotype, spec: &ProblemSpec) -> Result<u32, ProblemError> {
    if g.len() != spec.genotype_len() {
        return Err(ProblemError::DimensionMismatch {
            expected: spec.genotype_len(),
            got: g.len(),
        });
    }
    Ok((0..spec.l())
        .map(|i| twomax_block(g, i * spec.b(), spec.b()))
        .sum())
}

#[inline]
fn twomax_block(g: &Genotype, start: usize, b: usize) -> u32 {
    let ones = g.count_ones_in_range(start, start + b) as i64;
    (b as i64 / 2 - ones).unsigned_abs() as u32
}
