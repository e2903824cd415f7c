//! Mass-feasibility table for de novo pruning.
//!
//! `feasible[k]` answers: does any multiset of residue masses sum to
//! `k * resolution` within one resolution unit? Built once per run by
//! dynamic programming, then shared read-only by every beam search, where
//! it prunes extensions whose remaining mass no suffix can realize.
//!
//! To make the bin predicate exact (no float boundary drift), masses are
//! quantized to a fine 10 microdalton grid — the bundled residue table is
//! exact on that grid — reachable sums are computed by an integer unbounded
//! knapsack over fine units, and each reachable sum is projected onto the
//! coarse bins it lies within one resolution of. All boundary comparisons
//! happen in integer microdaltons.

use crate::error::{Error, Result};

/// Fine quantization grid for residue masses, Da.
pub const FINE_GRID: f64 = 1e-5;

/// Ceiling on buildable tables; a 50-residue peptide of the heaviest
/// residue stays far below this.
pub const MAX_TABLE_MASS: f64 = 10_000.0;

/// Immutable mass-reachability table at a fixed bin resolution.
#[derive(Debug)]
pub struct KnapsackTable {
    resolution_da: f64,
    max_mass: f64,
    bins: Vec<u64>,
    n_bins: usize,
}

impl KnapsackTable {
    pub fn resolution(&self) -> f64 {
        self.resolution_da
    }

    pub fn max_mass(&self) -> f64 {
        self.max_mass
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    /// Feasibility of bin `k` (mass `k * resolution`).
    pub fn is_feasible_bin(&self, k: usize) -> bool {
        k < self.n_bins && (self.bins[k / 64] >> (k % 64)) & 1 == 1
    }

    /// Feasibility of the bin nearest to `mass`.
    pub fn is_feasible_mass(&self, mass: f64) -> bool {
        if mass < 0.0 {
            return false;
        }
        let k = (mass / self.resolution_da).round() as usize;
        self.is_feasible_bin(k)
    }

    /// Is any bin within `half_width` of `mass` feasible? Used for
    /// remaining-mass pruning: the scan is widened by one bin on each side
    /// so a true suffix sum can never be pruned by rounding.
    pub fn feasible_in_band(&self, mass: f64, half_width: f64) -> bool {
        if mass + half_width < -self.resolution_da {
            return false;
        }
        let lo = (((mass - half_width) / self.resolution_da).floor() as i64 - 1).max(0) as usize;
        let hi = ((mass + half_width) / self.resolution_da).ceil() as i64 + 1;
        if hi < 0 {
            return false;
        }
        let hi = (hi as usize).min(self.n_bins.saturating_sub(1));
        (lo..=hi).any(|k| self.is_feasible_bin(k))
    }
}

/// Build the feasibility table for the given residue masses.
pub fn build_knapsack(residue_masses: &[f64], max_mass: f64, resolution: f64) -> Result<KnapsackTable> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidInput(format!("knapsack resolution must be > 0, got {resolution}")));
    }
    let resolution_uda = (resolution * 1e6).round() as i64;
    if resolution_uda < 1 {
        return Err(Error::InvalidInput("knapsack resolution below 1 microdalton".into()));
    }
    if !(max_mass > 0.0) || max_mass > MAX_TABLE_MASS {
        return Err(Error::InvalidInput(format!(
            "knapsack max mass must be in (0, {MAX_TABLE_MASS}], got {max_mass}"
        )));
    }
    if residue_masses.is_empty() {
        return Err(Error::InvalidInput("knapsack needs at least one residue mass".into()));
    }

    let mut units: Vec<usize> = Vec::with_capacity(residue_masses.len());
    for &m in residue_masses {
        let u = (m / FINE_GRID).round() as i64;
        if u < 1 {
            return Err(Error::InvalidInput(format!("residue mass {m} too small for the mass grid")));
        }
        units.push(u as usize);
    }
    units.sort_unstable();
    units.dedup();

    // Reachable sums in fine units, up to max_mass + resolution (anything
    // beyond cannot project into a bin <= max_mass).
    let n_fine = ((max_mass + resolution) / FINE_GRID).ceil() as usize + 1;
    let reach = reachable_sums(&units, n_fine);

    // Project each reachable sum onto the coarse bins within one resolution
    // unit of it, in exact integer microdaltons.
    let n_bins = (max_mass / resolution).round() as usize + 1;
    let mut bins = vec![0u64; n_bins / 64 + 1];
    let fine_per_uda = (FINE_GRID * 1e6).round() as i64; // 10
    let mut next_unmarked: i64 = 0;
    for (w, &word) in reach.iter().enumerate() {
        if word == 0 {
            continue;
        }
        let mut bitset = word;
        while bitset != 0 {
            let b = bitset.trailing_zeros() as usize;
            bitset &= bitset - 1;
            let u = (w * 64 + b) as i64;
            let m_uda = u * fine_per_uda;
            // |m - k*res| <= res  <=>  k in [ceil(m/res)-1, floor(m/res)+1]
            let k_lo = (m_uda + resolution_uda - 1) / resolution_uda - 1;
            let k_hi = m_uda / resolution_uda + 1;
            let start = k_lo.max(next_unmarked).max(0);
            for k in start..=k_hi.min(n_bins as i64 - 1) {
                bins[k as usize / 64] |= 1 << (k as usize % 64);
            }
            // Sums are visited ascending, so every bin up to k_hi is final.
            next_unmarked = next_unmarked.max(k_hi + 1);
        }
    }

    Ok(KnapsackTable { resolution_da: resolution, max_mass, bins, n_bins })
}

/// Unbounded-knapsack reachability over fine integer units: bit `u` is set
/// iff some multiset of the units sums to exactly `u`.
fn reachable_sums(units: &[usize], n_fine: usize) -> Vec<u64> {
    let n_words = n_fine / 64 + 1;
    let mut reach = vec![0u64; n_words];
    reach[0] = 1; // empty multiset

    // Residue units are millions of fine grid steps, far wider than a word,
    // so each word depends only on fully finalized earlier words and one
    // ascending pass suffices. Tiny units would break that assumption;
    // fall back to the scalar recurrence for them.
    if units.iter().any(|&u| u < 64) {
        for u in 1..n_fine {
            for &unit in units {
                if u >= unit && (reach[(u - unit) / 64] >> ((u - unit) % 64)) & 1 == 1 {
                    reach[u / 64] |= 1 << (u % 64);
                    break;
                }
            }
        }
        return reach;
    }

    for w in 0..n_words {
        let mut acc = reach[w];
        for &unit in units {
            let s = (w as i64) * 64 - unit as i64;
            let window = if s >= 0 {
                let idx = (s / 64) as usize;
                let sh = (s % 64) as u32;
                if sh == 0 {
                    reach[idx]
                } else {
                    (reach[idx] >> sh) | (reach[idx + 1] << (64 - sh))
                }
            } else if s > -64 {
                reach[0] << (-s) as u32
            } else {
                continue;
            };
            acc |= window;
        }
        reach[w] = acc;
    }
    reach
}
