//! Dense tensor component blocks in a fixed 4-dimensional chart.

use crate::jet::DIM;

/// Co- or contravariant slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Contra,
    Co,
}

/// Dense component array with 4^rank entries, row-major in the index tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorComponents {
    variance: Vec<Variance>,
    values: Vec<f64>,
}

impl TensorComponents {
    pub fn zeros(variance: &[Variance]) -> Self {
        TensorComponents {
            variance: variance.to_vec(),
            values: vec![0.0; DIM.pow(variance.len() as u32)],
        }
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < DIM);
            acc * DIM + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.values[o] = v;
    }

    pub fn add_to(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.values[o] += v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    /// Iterate all index tuples of this rank.
    pub fn indices(rank: usize) -> impl Iterator<Item = Vec<usize>> {
        let n = DIM.pow(rank as u32);
        (0..n).map(move |mut flat| {
            let mut idx = vec![0usize; rank];
            for slot in (0..rank).rev() {
                idx[slot] = flat % DIM;
                flat /= DIM;
            }
            idx
        })
    }

    /// Max deviation from total antisymmetry over all slot pairs.
    pub fn antisymmetry_defect(&self) -> f64 {
        let rank = self.rank();
        let mut worst = 0.0f64;
        for idx in Self::indices(rank) {
            for s in 0..rank {
                for t in (s + 1)..rank {
                    let mut swapped = idx.clone();
                    swapped.swap(s, t);
                    worst = worst.max((self.get(&idx) + self.get(&swapped)).abs());
                }
            }
        }
        worst
    }

    /// Max deviation from symmetry in the first two slots.
    pub fn symmetry_defect(&self) -> f64 {
        let rank = self.rank();
        debug_assert!(rank >= 2);
        let mut worst = 0.0f64;
        for idx in Self::indices(rank) {
            let mut swapped = idx.clone();
            swapped.swap(0, 1);
            worst = worst.max((self.get(&idx) - self.get(&swapped)).abs());
        }
        worst
    }
}

/// h-slot (0, 1) or v-slot (2, 3) classification of a chart index.
pub fn is_h(i: usize) -> bool {
    i < 2
}

pub fn is_v(i: usize) -> bool {
    i >= 2
}
