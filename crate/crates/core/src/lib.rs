pub mod error;
pub mod experiments;
pub mod gf2;
pub mod moments;
pub mod rng;
pub mod stats;
pub mod circuits;
pub mod cli;
pub mod ensembles;
pub mod statevec;

pub use error::{Error, Result};

/// All size-k subsets of 0..m in lexicographic order.
pub(crate) fn k_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < m - k + i) else { return out };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
