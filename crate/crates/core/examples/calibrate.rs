//! Recompute the calibration grid and print the observed ratio maxima.
//!
//! Run with `cargo run --release -p sievelab --example calibrate`. The
//! printed maxima are the source of the frozen `C_CAL_*` constants in
//! `verify::calibration`; they only need re-freezing if the grid or the
//! checks themselves change.

use sievelab::verify::calibration::{max_ratios, run_calibration_grid};

fn main() {
    let cells = run_calibration_grid().expect("grid runs");
    println!("preset,N,h,Q,l1_ratio,l2_ratio,thm_ratio,all_residuals_zero");
    for c in &cells {
        println!(
            "{},{},{},{},{},{},{},{}",
            c.preset, c.n, c.h, c.q, c.l1_ratio, c.l2_ratio, c.thm_ratio, c.all_residuals_zero
        );
    }
    let (l1, l2, thm) = max_ratios(&cells);
    println!("max L1  ratio: {l1}");
    println!("max L2  ratio: {l2}");
    println!("max THM ratio: {thm}");
}
