//! Refresh times: the synchronous reference grid built from two asynchronous
//! observation grids.
//!
//! T₀ = 0 and T_k is the first time at which both components have been
//! observed again strictly after T_{k−1} (the non-strict reading of the
//! next-tick map would stall the recursion at 0). Every interval
//! (T_{k−1}, T_k] therefore contains at least one observation of each
//! component, and at T_k at least one component is observed exactly.

use crate::error::{Error, Result};
use crate::sampling::TimeGrid;

/// The refresh-time grid plus per-interval interpolation bookkeeping.
///
/// For interval k = 1..=M (from T_{k−1} to T_k) and component l ∈ {0, 1}:
/// `prev_idx[l][k−1]` is m₋⁽ˡ⁾(T_{k−1}) and `next_idx[l][k−1]` is m₊⁽ˡ⁾(T_k),
/// so the previous/next-tick gaps Δ_k^{−,l}, Δ_k^{+,l} read off directly.
#[derive(Debug, Clone)]
pub struct RefreshGrid {
    times: Vec<f64>,
    prev_idx: [Vec<usize>; 2],
    next_idx: [Vec<Option<usize>>; 2],
    delta_minus: [Vec<f64>; 2],
    delta_plus: [Vec<Option<f64>>; 2],
}

impl RefreshGrid {
    /// Refresh times T₀..T_M.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of refresh intervals M (= Mⁿ(1) over the covered span).
    pub fn count(&self) -> usize {
        self.times.len() - 1
    }

    /// Number of refresh times ≤ t.
    pub fn count_up_to(&self, t: f64) -> usize {
        self.times[1..].partition_point(|&x| x <= t)
    }

    /// Refresh increment Δ_k = T_k − T_{k−1}, for k in 1..=M.
    pub fn delta(&self, k: usize) -> f64 {
        self.times[k] - self.times[k - 1]
    }

    /// Previous-tick gap Δ_k^{−,l} = T_{k−1} − τ₋⁽ˡ⁾(T_{k−1}).
    pub fn delta_minus(&self, l: usize, k: usize) -> f64 {
        self.delta_minus[l][k - 1]
    }

    /// Next-tick gap Δ_k^{+,l} = τ₊⁽ˡ⁾(T_k) − T_k; None when component l has
    /// no observation at or after T_k (possible only for the final interval).
    pub fn delta_plus(&self, l: usize, k: usize) -> Option<f64> {
        self.delta_plus[l][k - 1]
    }

    /// m₋⁽ˡ⁾(T_{k−1}).
    pub fn prev_index(&self, l: usize, k: usize) -> usize {
        self.prev_idx[l][k - 1]
    }

    /// m₊⁽ˡ⁾(T_k).
    pub fn next_index(&self, l: usize, k: usize) -> Option<usize> {
        self.next_idx[l][k - 1]
    }
}

/// Builds the refresh grid of two observation grids in one forward sweep.
pub fn refresh_grid(g1: &TimeGrid, g2: &TimeGrid) -> Result<RefreshGrid> {
    if g1.first() != 0.0 || g2.first() != 0.0 {
        return Err(Error::DegenerateGrid("refresh grids must start at 0".into()));
    }
    let grids = [g1.times(), g2.times()];
    let mut times = vec![0.0];
    let mut prev_idx = [Vec::new(), Vec::new()];
    let mut next_idx: [Vec<Option<usize>>; 2] = [Vec::new(), Vec::new()];
    let mut dminus = [Vec::new(), Vec::new()];
    let mut dplus: [Vec<Option<f64>>; 2] = [Vec::new(), Vec::new()];

    // strict[l]: index of the first tick of grid l strictly after the current
    // refresh time.
    let mut strict = [1usize, 1usize];
    loop {
        let t_prev = *times.last().unwrap();
        if strict[0] >= grids[0].len() || strict[1] >= grids[1].len() {
            break;
        }
        let t_next = grids[0][strict[0]].max(grids[1][strict[1]]);
        for l in 0..2 {
            // last tick ≤ t_prev sits right before the strict pointer
            prev_idx[l].push(strict[l] - 1);
            dminus[l].push(t_prev - grids[l][strict[l] - 1]);
        }
        times.push(t_next);
        for l in 0..2 {
            while strict[l] < grids[l].len() && grids[l][strict[l]] <= t_next {
                strict[l] += 1;
            }
            // non-strict next tick at t_next: the tick at strict[l]-1 if it
            // equals t_next, otherwise the strict successor
            let ni = if grids[l][strict[l] - 1] == t_next {
                Some(strict[l] - 1)
            } else if strict[l] < grids[l].len() {
                Some(strict[l])
            } else {
                None
            };
            next_idx[l].push(ni);
            dplus[l].push(ni.map(|i| grids[l][i] - t_next));
        }
    }

    Ok(RefreshGrid {
        times,
        prev_idx,
        next_idx,
        delta_minus: dminus,
        delta_plus: dplus,
    })
}
