//! Fixed-length bit vector marking the selected feature subset.

use bitvec::vec::BitVec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Selected-feature indicator over the original feature dimension.
///
/// Bit `i` set means column `i` of the dataset is part of the subset.
/// The length is fixed at construction and always equals the feature
/// count of the dataset the mask is used with.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "MaskRepr", into = "MaskRepr")]
pub struct FeatureMask {
    bits: BitVec,
}

/// Serialized form: total length plus the sorted set-bit indices.
#[derive(Serialize, Deserialize)]
struct MaskRepr {
    len: usize,
    ones: Vec<usize>,
}

impl FeatureMask {
    /// All-zero mask of the given length.
    pub fn zeros(len: usize) -> Self {
        Self {
            bits: BitVec::repeat(false, len),
        }
    }

    /// All-ones mask of the given length.
    pub fn ones(len: usize) -> Self {
        Self {
            bits: BitVec::repeat(true, len),
        }
    }

    /// Mask with exactly the given indices set.
    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self> {
        let mut mask = Self::zeros(len);
        for &i in indices {
            if i >= len {
                return Err(Error::FeatureIndex {
                    index: i,
                    n_features: len,
                });
            }
            mask.bits.set(i, true);
        }
        Ok(mask)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of selected features.
    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn get(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn set(&mut self, index: usize, value: bool) {
        self.bits.set(index, value);
    }

    /// Indices of set bits in ascending order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    /// Indices of unset bits in ascending order.
    pub fn iter_zeros(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_zeros()
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }
}

impl TryFrom<MaskRepr> for FeatureMask {
    type Error = Error;

    fn try_from(repr: MaskRepr) -> Result<Self> {
        FeatureMask::from_indices(repr.len, &repr.ones)
    }
}

impl From<FeatureMask> for MaskRepr {
    fn from(mask: FeatureMask) -> Self {
        MaskRepr {
            len: mask.len(),
            ones: mask.to_indices(),
        }
    }
}

impl std::fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for bit in self.bits.iter() {
            f.write_str(if *bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}
