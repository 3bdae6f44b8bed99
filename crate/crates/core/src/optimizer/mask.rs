use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Binary feature selector: bit `d` set means feature `d` is used.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureMask {
    bits: Vec<bool>,
}

impl FeatureMask {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn all(dim: usize) -> Self {
        Self {
            bits: vec![true; dim],
        }
    }

    pub fn none(dim: usize) -> Self {
        Self {
            bits: vec![false; dim],
        }
    }

    /// Parses a string of `0`/`1` characters.
    pub fn from_bitstring(s: &str) -> Option<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<bool>>>()
            .map(Self::from_bits)
    }

    pub fn to_bitstring(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn has_any(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }

    pub fn selected(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&i| self.bits[i]).collect()
    }

    /// Sets one uniformly chosen bit if none is set; returns the index set.
    pub fn repair<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<usize> {
        if self.has_any() || self.bits.is_empty() {
            return None;
        }
        let i = rng.gen_range(0..self.bits.len());
        self.bits[i] = true;
        Some(i)
    }

    /// Exchanges the bits at `i` and `j`.
    pub fn swap_at(&mut self, i: usize, j: usize) {
        self.bits.swap(i, j);
    }

    /// Flips every bit in the inclusive span `[i, j]`.
    pub fn revert_span(&mut self, i: usize, j: usize) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        for b in &mut self.bits[lo..=hi] {
            *b = !*b;
        }
    }

    /// Writes the mask into a continuous position: set bits go to the upper
    /// bound, cleared bits to the lower bound.
    pub fn write_back(&self, position: &mut [f64], bounds: &[(f64, f64)]) {
        for ((x, &bit), &(lb, ub)) in position.iter_mut().zip(&self.bits).zip(bounds) {
            *x = if bit { ub } else { lb };
        }
    }
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

impl Serialize for FeatureMask {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bitstring())
    }
}

impl<'de> Deserialize<'de> for FeatureMask {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FeatureMask::from_bitstring(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid mask bitstring {s:?}")))
    }
}

/// Threshold binarization at the midpoint of each dimension's bounds
/// (0.5 for the unit cube), inclusive. An all-zero result is repaired.
pub fn binarize<R: Rng + ?Sized>(
    position: &[f64],
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> FeatureMask {
    let bits = position
        .iter()
        .zip(bounds)
        .map(|(&x, &(lb, ub))| x >= 0.5 * (lb + ub))
        .collect();
    let mut mask = FeatureMask::from_bits(bits);
    mask.repair(rng);
    mask
}

/// Exchanges two distinct uniformly chosen bits.
pub fn swap_mutation<R: Rng + ?Sized>(mask: &FeatureMask, rng: &mut R) -> FeatureMask {
    let mut out = mask.clone();
    let n = mask.len();
    if n < 2 {
        return out;
    }
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    out.swap_at(i, j);
    out
}

/// Flips every bit between two distinct uniformly chosen indices (inclusive).
/// A one-bit mask has its only bit flipped.
pub fn reversion_mutation<R: Rng + ?Sized>(mask: &FeatureMask, rng: &mut R) -> FeatureMask {
    let mut out = mask.clone();
    let n = mask.len();
    match n {
        0 => {}
        1 => out.revert_span(0, 0),
        _ => {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            out.revert_span(i, j);
        }
    }
    out
}
