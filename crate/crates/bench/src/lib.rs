//! Shared inputs for the criterion benches.

use dpart::eval::adult::{adult_bounds, adult_reconstruction};
use dpart::{Bounds, Table};

/// Training-sized slice of the reconstructed Adult table with its bounds.
pub fn adult(rows: usize) -> (Table, Bounds) {
    (adult_reconstruction(rows, 0), adult_bounds())
}
