//! Reference Betti tables of the two rational quintics and of 28 general
//! points on each, stored row by row with columns `i = 0..=3`.

pub const X_CURVE: [[usize; 4]; 4] = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 4, 6, 2]];

pub const X_POINTS: [[usize; 4]; 7] =
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 4, 6, 2], [0, 0, 0, 0], [0, 3, 4, 1], [0, 0, 2, 2]];

pub const Y_CURVE: [[usize; 4]; 4] = [[1, 0, 0, 0], [0, 0, 0, 0], [0, 4, 3, 0], [0, 1, 2, 1]];

pub const Y_POINTS: [[usize; 4]; 7] =
    [[1, 0, 0, 0], [0, 0, 0, 0], [0, 4, 3, 0], [0, 1, 2, 1], [0, 0, 0, 0], [0, 3, 4, 0], [0, 0, 1, 2]];

/// Number of points in the reference point tables.
pub const GAMMA: usize = 28;

pub fn as_rows(table: &[[usize; 4]]) -> Vec<Vec<usize>> {
    table.iter().map(|r| r.to_vec()).collect()
}
