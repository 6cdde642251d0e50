//! Importance ordering of coefficient-array cells and chromosome filling.
//!
//! Cells of a multi-dimensional array are visited in non-decreasing order of
//! their coordinate sum. The cells sharing a coordinate sum form a simplex
//! (in 2D, a secondary diagonal). Within each simplex, cells are taken
//! nearest-first to the array's corner points, cycling through the corners so
//! that the simplex fills from its edges towards its center.
//!
//! Corner points are the cells with exactly one non-zero coordinate, at the
//! far extent of their axis. They are cycled in descending order of that
//! axis extent; equal extents fall back to axis order, so for square arrays
//! the first-listed dimension leads. Distance ties inside a simplex go to
//! the lexicographically smallest coordinate tuple.
//!
//! Filling an array from a chromosome writes coefficient `j` into the cell
//! at position `j` of this order and zeroes every later cell, which is what
//! makes a genome prefix a band-limited version of the full genome.

use crate::dct::RealArrayND;
use crate::error::{Error, Result};

/// Coordinates of one array cell.
pub type CellIndex = Vec<usize>;

/// Total order over every cell of an array of the given extents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportanceOrder {
    dims: Vec<usize>,
    sequence: Vec<CellIndex>,
    flat: Vec<usize>,
}

impl ImportanceOrder {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Ordered cell coordinates; a permutation of all cells.
    pub fn sequence(&self) -> &[CellIndex] {
        &self.sequence
    }

    /// Row-major flat offsets in sequence order.
    pub fn flat_indices(&self) -> &[usize] {
        &self.flat
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Array holding `chromosome[j]` at the cell in position `j`, zero in
    /// every later cell. Errors if the chromosome has more coefficients than
    /// the array has cells.
    pub fn fill(&self, chromosome: &[f64]) -> Result<RealArrayND> {
        if chromosome.len() > self.flat.len() {
            return Err(Error::ChromosomeOverflow {
                len: chromosome.len(),
                capacity: self.flat.len(),
            });
        }
        let mut array = RealArrayND::zeros(&self.dims)?;
        let data = array.data_mut();
        for (value, &idx) in chromosome.iter().zip(&self.flat) {
            data[idx] = *value;
        }
        Ok(array)
    }
}

/// Builds the importance order for the given extents.
pub fn simplex_order(dims: &[usize]) -> Result<ImportanceOrder> {
    // Reuse the array constructor's validation (rank 1..=4, no zero extent).
    RealArrayND::zeros(dims)?;

    let corners = corner_cells(dims);
    let mut sequence = Vec::with_capacity(dims.iter().product());
    for mut simplex in cells_by_coordinate_sum(dims) {
        if corners.is_empty() {
            // Every extent is 1: the single cell per simplex is the origin.
            sequence.append(&mut simplex);
            continue;
        }
        let mut corner = 0;
        while !simplex.is_empty() {
            let target = &corners[corner % corners.len()];
            let nearest = simplex
                .iter()
                .enumerate()
                .min_by_key(|(_, cell)| (squared_distance(cell, target), (*cell).clone()))
                .map(|(i, _)| i)
                .expect("non-empty simplex");
            sequence.push(simplex.remove(nearest));
            corner += 1;
        }
    }

    let probe = RealArrayND::zeros(dims)?;
    let flat = sequence.iter().map(|c| probe.flat_index(c)).collect();
    Ok(ImportanceOrder {
        dims: dims.to_vec(),
        sequence,
        flat,
    })
}

/// Convenience wrapper building the order and filling in one step.
pub fn fill_array(dims: &[usize], chromosome: &[f64]) -> Result<RealArrayND> {
    simplex_order(dims)?.fill(chromosome)
}

/// Cells grouped by coordinate sum, in increasing sum; each group is listed
/// in lexicographic coordinate order.
fn cells_by_coordinate_sum(dims: &[usize]) -> Vec<Vec<CellIndex>> {
    let max_sum: usize = dims.iter().map(|d| d - 1).sum();
    let mut groups = vec![Vec::new(); max_sum + 1];
    let mut coords = vec![0usize; dims.len()];
    loop {
        let sum: usize = coords.iter().sum();
        groups[sum].push(coords.clone());
        // Row-major increment enumerates cells in lexicographic order.
        let mut axis = dims.len();
        loop {
            if axis == 0 {
                return groups;
            }
            axis -= 1;
            coords[axis] += 1;
            if coords[axis] < dims[axis] {
                break;
            }
            coords[axis] = 0;
        }
    }
}

/// Corner cells (exactly one non-zero coordinate, at its axis extreme),
/// sorted descending by their axis extent, then by axis order. Axes of
/// extent 1 yield no distinct corner.
fn corner_cells(dims: &[usize]) -> Vec<CellIndex> {
    let mut with_size: Vec<(usize, usize)> = dims
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 1)
        .map(|(axis, &d)| (axis, d))
        .collect();
    with_size.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    with_size
        .into_iter()
        .map(|(axis, d)| {
            let mut cell = vec![0usize; dims.len()];
            cell[axis] = d - 1;
            cell
        })
        .collect()
}

fn squared_distance(a: &[usize], b: &[usize]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(dims: &[usize]) -> Vec<CellIndex> {
        simplex_order(dims).unwrap().sequence().to_vec()
    }

    #[test]
    fn single_cell_order() {
        assert_eq!(seq(&[1]), vec![vec![0]]);
    }

    #[test]
    fn one_dimensional_order_is_index_order() {
        assert_eq!(seq(&[4]), vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn two_by_two_order() {
        assert_eq!(
            seq(&[2, 2]),
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]
        );
    }

    #[test]
    fn three_by_three_alternates_from_first_axis_corner() {
        // Square array: the row corner (2,0) leads every diagonal.
        assert_eq!(
            seq(&[3, 3]),
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![0, 2],
                vec![1, 1],
                vec![2, 1],
                vec![1, 2],
                vec![2, 2],
            ]
        );
    }

    #[test]
    fn wide_matrix_starts_diagonals_on_long_side() {
        // dims (2, 3): the column corner (0,2) has the larger extent and
        // leads, so each diagonal starts at its smallest-row end.
        assert_eq!(
            seq(&[2, 3]),
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![1, 0],
                vec![0, 2],
                vec![1, 1],
                vec![1, 2],
            ]
        );
    }

    #[test]
    fn cube_order_matches_hand_trace() {
        assert_eq!(
            seq(&[2, 2, 2]),
            vec![
                vec![0, 0, 0],
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![1, 0, 1],
                vec![0, 1, 1],
                vec![1, 1, 0],
                vec![1, 1, 1],
            ]
        );
    }

    #[test]
    fn coordinate_sums_never_decrease() {
        for dims in [vec![5], vec![3, 7], vec![2, 3, 4], vec![2, 2, 3, 2]] {
            let order = simplex_order(&dims).unwrap();
            let sums: Vec<usize> = order.sequence().iter().map(|c| c.iter().sum()).collect();
            assert!(sums.windows(2).all(|w| w[0] <= w[1]), "dims {dims:?}");
        }
    }

    #[test]
    fn order_is_a_permutation() {
        for dims in [vec![6], vec![4, 4], vec![3, 2, 5], vec![2, 3, 2, 2]] {
            let order = simplex_order(&dims).unwrap();
            let total: usize = dims.iter().product();
            assert_eq!(order.len(), total);
            let mut seen = vec![false; total];
            for &idx in order.flat_indices() {
                assert!(!seen[idx], "cell visited twice in dims {dims:?}");
                seen[idx] = true;
            }
        }
    }

    #[test]
    fn zero_extent_is_an_error() {
        assert!(matches!(simplex_order(&[3, 0]), Err(Error::ZeroExtent(_))));
    }

    #[test]
    fn fill_simple_prefix() {
        let arr = fill_array(&[4], &[7.0, -2.0]).unwrap();
        assert_eq!(arr.data(), &[7.0, -2.0, 0.0, 0.0]);
    }

    #[test]
    fn fill_two_by_two_placement() {
        let arr = fill_array(&[2, 2], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(arr.get(&[0, 0]), 1.0);
        assert_eq!(arr.get(&[1, 0]), 2.0);
        assert_eq!(arr.get(&[0, 1]), 3.0);
        assert_eq!(arr.get(&[1, 1]), 4.0);
    }

    #[test]
    fn fill_empty_chromosome_gives_zero_array() {
        let arr = fill_array(&[3, 3], &[]).unwrap();
        assert!(arr.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fill_overflow_is_an_error() {
        let err = fill_array(&[2], &[1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(err, Error::ChromosomeOverflow { len: 3, capacity: 2 }));
    }

    #[test]
    fn prefix_fill_agrees_with_full_fill() {
        let order = simplex_order(&[3, 4]).unwrap();
        let full: Vec<f64> = (1..=12).map(|v| v as f64).collect();
        let all = order.fill(&full).unwrap();
        let some = order.fill(&full[..5]).unwrap();
        for (pos, &idx) in order.flat_indices().iter().enumerate() {
            if pos < 5 {
                assert_eq!(some.data()[idx], all.data()[idx]);
            } else {
                assert_eq!(some.data()[idx], 0.0);
            }
        }
    }
}
