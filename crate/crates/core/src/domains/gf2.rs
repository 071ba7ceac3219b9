use std::fmt;

use super::lights_out::{Board, LightsOut};
use crate::strips::Plan;

/// A bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        F2Vector {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.flip(i);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &F2Vector) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Effect vectors as columns: column `k` has support `N[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Matrix {
    pub columns: Vec<F2Vector>,
}

impl F2Matrix {
    pub fn rank(&self) -> usize {
        let mut rows: Vec<F2Vector> = self.columns.clone();
        let width = rows.first().map_or(0, F2Vector::len);
        let mut rank = 0;
        for bit in 0..width {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(bit)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(bit) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
        }
        rank
    }
}

pub fn effect_matrix(board: Board) -> F2Matrix {
    let n = board.cells();
    F2Matrix {
        columns: (0..n)
            .map(|v| {
                let mut u = F2Vector::zeros(n);
                for w in board.neighborhood(v) {
                    u.flip(w);
                }
                u
            })
            .collect(),
    }
}

/// Total effect of a press sequence: the XOR of the pressed cells' effect
/// vectors.
pub fn ghom(board: Board, presses: &[usize]) -> F2Vector {
    let m = effect_matrix(board);
    let mut acc = F2Vector::zeros(board.cells());
    for &p in presses {
        acc.xor_assign(&m.columns[p]);
    }
    acc
}

/// A press sequence turns every light off iff its total effect equals the
/// initial on-vector.
pub fn parity_verdict(board: Board, init_lit: &[bool], presses: &[usize]) -> bool {
    ghom(board, presses) == F2Vector::from_bools(init_lit)
}

/// The pressed cells of a Lights Out plan, for either variant.
pub fn presses_of_plan(lo: &LightsOut, plan: &Plan) -> Vec<usize> {
    plan.actions.iter().map(|a| lo.cell_of(a.schema).0).collect()
}
