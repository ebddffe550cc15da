//! The frozen calibration grid.
//!
//! The residual bounds carry implied constants no text pins down, so the
//! artifact measures them once over a fixed grid — every preset crossed
//! with N ∈ {10³, 10⁴}, h ∈ {5, 10, 20, 40}, Q ∈ {5, 20, 50}, in exact
//! arithmetic — and freezes the observed maxima below. The regression
//! suite recomputes the grid and asserts no ratio ever exceeds its frozen
//! constant.

use rayon::prelude::*;

use crate::arith::{make_g, sieve_for_experiment, Preset};
use crate::correlations::CorrelationTable;
use crate::error::Result;
use crate::scalar::{rat_i64, Rat};
use crate::verify::{check_lemma1_with, check_lemma2_with, check_theorem_i_rep_with};

pub const CAL_NS: [u64; 2] = [1_000, 10_000];
pub const CAL_HS: [u64; 4] = [5, 10, 20, 40];
pub const CAL_QS: [u64; 3] = [5, 20, 50];
/// Seed and bound of the random_bounded preset on the calibration grid.
pub const CAL_SEED: u64 = 7;
pub const CAL_BOUND: i64 = 2;

/// Frozen maxima of |residual| / normalizer over the grid, rounded up in
/// the last digit at calibration time (observed: 0.06, 0.02593, 5.1362).
pub const C_CAL_L1: f64 = 0.061;
pub const C_CAL_L2: f64 = 0.026;
pub const C_CAL_THM: f64 = 5.137;

/// One grid cell and its three residual ratios.
#[derive(Clone, Debug)]
pub struct CellOutcome {
    pub preset: Preset,
    pub n: u64,
    pub h: u64,
    pub q: u64,
    pub l1_ratio: f64,
    pub l2_ratio: f64,
    pub thm_ratio: f64,
    /// True when lhs − rhs_main vanished exactly for all three checks.
    pub all_residuals_zero: bool,
}

/// The (preset, N, h, Q) cells in a fixed order.
pub fn calibration_cells() -> Vec<(Preset, u64, u64, u64)> {
    let mut cells = Vec::new();
    for preset in Preset::ALL {
        for &n in &CAL_NS {
            for &h in &CAL_HS {
                for &q in &CAL_QS {
                    cells.push((preset, n, h, q));
                }
            }
        }
    }
    cells
}

/// Run one cell in exact arithmetic.
pub fn run_calibration_cell(preset: Preset, n: u64, h: u64, q: u64) -> Result<CellOutcome> {
    let g = make_g(preset, q, Some(CAL_SEED), Some(rat_i64(CAL_BOUND)))?;
    let f = sieve_for_experiment::<Rat>(&g, n, h)?;
    let corr = CorrelationTable::build(&f, n, 3 * h)?;
    let l1 = check_lemma1_with(&f, &corr, n, h)?;
    let l2 = check_lemma2_with(&f, &corr, n, h)?;
    let thm = check_theorem_i_rep_with(&f, &corr, n, h)?;
    let zero = Rat::from_integer(0.into());
    Ok(CellOutcome {
        preset,
        n,
        h,
        q,
        l1_ratio: l1.ratio,
        l2_ratio: l2.ratio,
        thm_ratio: thm.ratio,
        all_residuals_zero: l1.residual == zero && l2.residual == zero && thm.residual == zero,
    })
}

/// Run the whole grid. Cells sharing (preset, N, Q) reuse one sieve table
/// and one correlation table sized for the largest h.
pub fn run_calibration_grid() -> Result<Vec<CellOutcome>> {
    let h_max = *CAL_HS.iter().max().expect("non-empty");
    let mut groups = Vec::new();
    for preset in Preset::ALL {
        for &n in &CAL_NS {
            for &q in &CAL_QS {
                groups.push((preset, n, q));
            }
        }
    }
    let per_group: Vec<Result<Vec<CellOutcome>>> = groups
        .par_iter()
        .map(|&(preset, n, q)| {
            let g = make_g(preset, q, Some(CAL_SEED), Some(rat_i64(CAL_BOUND)))?;
            let f = sieve_for_experiment::<Rat>(&g, n, h_max)?;
            let corr = CorrelationTable::build(&f, n, 3 * h_max)?;
            let zero = Rat::from_integer(0.into());
            CAL_HS
                .iter()
                .map(|&h| {
                    let l1 = check_lemma1_with(&f, &corr, n, h)?;
                    let l2 = check_lemma2_with(&f, &corr, n, h)?;
                    let thm = check_theorem_i_rep_with(&f, &corr, n, h)?;
                    Ok(CellOutcome {
                        preset,
                        n,
                        h,
                        q,
                        l1_ratio: l1.ratio,
                        l2_ratio: l2.ratio,
                        thm_ratio: thm.ratio,
                        all_residuals_zero: l1.residual == zero
                            && l2.residual == zero
                            && thm.residual == zero,
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for group in per_group {
        out.extend(group?);
    }
    // fixed reporting order: (preset, N, h, Q)
    out.sort_by_key(|c| {
        (
            Preset::ALL.iter().position(|&p| p == c.preset),
            c.n,
            c.h,
            c.q,
        )
    });
    Ok(out)
}

/// Maxima of the three ratio columns over a set of outcomes.
pub fn max_ratios(cells: &[CellOutcome]) -> (f64, f64, f64) {
    let fold = |pick: fn(&CellOutcome) -> f64| {
        cells
            .iter()
            .map(pick)
            .fold(0.0f64, |acc, x| if x > acc { x } else { acc })
    };
    (
        fold(|c| c.l1_ratio),
        fold(|c| c.l2_ratio),
        fold(|c| c.thm_ratio),
    )
}
