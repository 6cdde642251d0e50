//! Network architectures, weight containers, and the mapping schemes that
//! place decoded coefficient-array cells into weight-matrix slots.
//!
//! Observation and action index conventions shared with the arm simulator:
//!
//! * observation `8q + v` for `q < p` holds state variable `v` of
//!   compartment `q` (dorsal x, y, vx, vy, then ventral x, y, vx, vy);
//!   observations `8p` and `8p+1` are the base angle and angular velocity.
//! * raw action `3q + m` for `q < p` drives muscle `m` of compartment `q`
//!   (0 dorsal, 1 transverse, 2 ventral); actions `3p` and `3p+1` rotate the
//!   base counterclockwise and clockwise.
//!
//! The built-in schemes:
//!
//! * `Psi1`: one `n x (i + n + 1)` matrix per network, column blocks
//!   `[input | recurrent | bias]`, every cell used.
//! * `Psi2` (meta networks): a 3D `n x (p+1) x 8` input array (neuron,
//!   compartment, state variable) with the two base observations in the
//!   extra compartment slice, an `n x n` recurrent matrix, and a length-`n`
//!   bias vector.
//! * `Psi3` (raw networks): neurons sit on a `3 x (p+1)` grid (muscle,
//!   compartment), the two rotation neurons in the extra compartment column
//!   and one grid slot empty. Input weights form an
//!   `8 x (p+1) x 3 x (p+1)` array (state variable, source compartment,
//!   muscle, target compartment), recurrent weights a
//!   `3 x (p+1) x 3 x (p+1)` array, biases a `3 x (p+1)` array.
//!
//! Cells whose source or target falls on a non-existent input or grid slot
//! are unused: they still take coefficients and participate in the
//! transform, but their decoded values are discarded.

use crate::error::{Error, Result};
use crate::ordering::{simplex_order, ImportanceOrder};
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Whether a network emits the eight aggregated meta-actions or one
/// activation per raw muscle/rotation control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionMode {
    Meta,
    Raw,
}

impl fmt::Display for ActionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionMode::Meta => write!(f, "meta"),
            ActionMode::Raw => write!(f, "raw"),
        }
    }
}

/// Fully-connected recurrent network shape: `neurons` units reading
/// `inputs` observations, with one output per neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkArchitecture {
    pub neurons: usize,
    pub inputs: usize,
    pub action_mode: ActionMode,
}

impl NetworkArchitecture {
    /// Meta-action controller for a `p`-compartment arm: 8 neurons, `8p+2`
    /// inputs.
    pub fn meta(p: usize) -> Self {
        Self {
            neurons: 8,
            inputs: 8 * p + 2,
            action_mode: ActionMode::Meta,
        }
    }

    /// Raw-action controller for a `p`-compartment arm: one neuron per
    /// control, `3p+2` neurons and `8p+2` inputs.
    pub fn raw(p: usize) -> Self {
        Self {
            neurons: 3 * p + 2,
            inputs: 8 * p + 2,
            action_mode: ActionMode::Raw,
        }
    }

    pub fn for_mode(mode: ActionMode, p: usize) -> Self {
        match mode {
            ActionMode::Meta => Self::meta(p),
            ActionMode::Raw => Self::raw(p),
        }
    }

    /// Total weight count `n*i + n*n + n`.
    pub fn weight_total(&self) -> usize {
        self.neurons * self.inputs + self.neurons * self.neurons + self.neurons
    }
}

/// Decoded weights of one network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkWeights {
    pub input: Array2<f64>,
    pub recurrent: Array2<f64>,
    pub bias: Array1<f64>,
}

impl NetworkWeights {
    pub fn zeros(arch: &NetworkArchitecture) -> Self {
        Self {
            input: Array2::zeros((arch.neurons, arch.inputs)),
            recurrent: Array2::zeros((arch.neurons, arch.neurons)),
            bias: Array1::zeros(arch.neurons),
        }
    }

    pub fn neurons(&self) -> usize {
        self.input.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.input.ncols()
    }

    pub fn is_finite(&self) -> bool {
        self.input.iter().all(|v| v.is_finite())
            && self.recurrent.iter().all(|v| v.is_finite())
            && self.bias.iter().all(|v| v.is_finite())
    }

    /// Weights flattened as `[input row-major, recurrent row-major, bias]`;
    /// the layout used by direct-encoded genomes.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(
            self.input.len() + self.recurrent.len() + self.bias.len(),
        );
        flat.extend(self.input.iter());
        flat.extend(self.recurrent.iter());
        flat.extend(self.bias.iter());
        flat
    }

    /// Inverse of [`to_flat`].
    pub fn from_flat(arch: &NetworkArchitecture, flat: &[f64]) -> Result<Self> {
        if flat.len() != arch.weight_total() {
            return Err(Error::LayoutMismatch(format!(
                "flat weight vector has {} values, architecture needs {}",
                flat.len(),
                arch.weight_total()
            )));
        }
        let (n, i) = (arch.neurons, arch.inputs);
        let input = Array2::from_shape_vec((n, i), flat[..n * i].to_vec()).expect("shape");
        let recurrent =
            Array2::from_shape_vec((n, n), flat[n * i..n * i + n * n].to_vec()).expect("shape");
        let bias = Array1::from_vec(flat[n * i + n * n..].to_vec());
        Ok(Self {
            input,
            recurrent,
            bias,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d1 = self
            .input
            .iter()
            .zip(other.input.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let d2 = self
            .recurrent
            .iter()
            .zip(other.recurrent.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let d3 = self
            .bias
            .iter()
            .zip(other.bias.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        d1.max(d2).max(d3)
    }
}

/// Destination of one decoded array cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightSlot {
    Input(usize, usize),
    Recurrent(usize, usize),
    Bias(usize),
}

/// One chromosome's coefficient array: extents, cell order, and the map
/// from flat cell offsets to weight slots (`None` for unused cells).
#[derive(Debug, Clone)]
pub struct ChromosomeLayout {
    dims: Vec<usize>,
    order: ImportanceOrder,
    placement: Vec<Option<WeightSlot>>,
}

impl ChromosomeLayout {
    fn new(dims: Vec<usize>, placement: Vec<Option<WeightSlot>>) -> Result<Self> {
        let order = simplex_order(&dims)?;
        debug_assert_eq!(placement.len(), order.len());
        Ok(Self {
            dims,
            order,
            placement,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> &ImportanceOrder {
        &self.order
    }

    pub fn placement(&self) -> &[Option<WeightSlot>] {
        &self.placement
    }

    /// Number of cells in the array; the chromosome's coefficient capacity.
    pub fn capacity(&self) -> usize {
        self.placement.len()
    }

    pub fn used_cells(&self) -> usize {
        self.placement.iter().filter(|s| s.is_some()).count()
    }

    pub fn unused_cells(&self) -> usize {
        self.capacity() - self.used_cells()
    }
}

/// Built-in mapping scheme names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Psi1,
    Psi2,
    Psi3,
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeName::Psi1 => write!(f, "psi1"),
            SchemeName::Psi2 => write!(f, "psi2"),
            SchemeName::Psi3 => write!(f, "psi3"),
        }
    }
}

impl std::str::FromStr for SchemeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "psi1" => Ok(SchemeName::Psi1),
            "psi2" => Ok(SchemeName::Psi2),
            "psi3" => Ok(SchemeName::Psi3),
            other => Err(Error::Config(format!("unknown scheme name `{other}`"))),
        }
    }
}

/// A concrete mapping from chromosomes to the weight matrices of one
/// architecture at one compartment count. Immutable once built.
#[derive(Debug, Clone)]
pub struct MappingScheme {
    name: SchemeName,
    arch: NetworkArchitecture,
    compartments: usize,
    chromosomes: Vec<ChromosomeLayout>,
}

impl MappingScheme {
    /// Builds a scheme for the given architecture and compartment count.
    ///
    /// `Psi2` targets meta networks only and `Psi3` raw networks only;
    /// `Psi1` targets either. The architecture must be the canonical one for
    /// its action mode at `p`.
    pub fn build(name: SchemeName, arch: NetworkArchitecture, p: usize) -> Result<Self> {
        if p < 1 {
            return Err(Error::NoCompartments);
        }
        let canonical = NetworkArchitecture::for_mode(arch.action_mode, p);
        if arch != canonical {
            return Err(Error::LayoutMismatch(format!(
                "architecture {}x{} is not the canonical {} network for p={}",
                arch.neurons, arch.inputs, arch.action_mode, p
            )));
        }
        let compatible = match name {
            SchemeName::Psi1 => true,
            SchemeName::Psi2 => arch.action_mode == ActionMode::Meta,
            SchemeName::Psi3 => arch.action_mode == ActionMode::Raw,
        };
        if !compatible {
            return Err(Error::IncompatibleScheme {
                scheme: name.to_string(),
                arch: arch.action_mode.to_string(),
            });
        }
        let chromosomes = match name {
            SchemeName::Psi1 => build_psi1(&arch)?,
            SchemeName::Psi2 => build_psi2(&arch, p)?,
            SchemeName::Psi3 => build_psi3(&arch, p)?,
        };
        let scheme = Self {
            name,
            arch,
            compartments: p,
            chromosomes,
        };
        scheme.check_coverage()?;
        Ok(scheme)
    }

    /// Convenience: canonical architecture for `mode` at `p`.
    pub fn build_for_mode(name: SchemeName, mode: ActionMode, p: usize) -> Result<Self> {
        Self::build(name, NetworkArchitecture::for_mode(mode, p), p)
    }

    pub fn name(&self) -> SchemeName {
        self.name
    }

    pub fn architecture(&self) -> &NetworkArchitecture {
        &self.arch
    }

    pub fn compartments(&self) -> usize {
        self.compartments
    }

    pub fn chromosomes(&self) -> &[ChromosomeLayout] {
        &self.chromosomes
    }

    pub fn chromosome_count(&self) -> usize {
        self.chromosomes.len()
    }

    /// Total cell count over all chromosome arrays: the genome capacity.
    pub fn total_cells(&self) -> usize {
        self.chromosomes.iter().map(|c| c.capacity()).sum()
    }

    pub fn placed_cells(&self) -> usize {
        self.chromosomes.iter().map(|c| c.used_cells()).sum()
    }

    pub fn unused_cells(&self) -> usize {
        self.total_cells() - self.placed_cells()
    }

    /// Same scheme rebuilt for a different compartment count.
    pub fn at_compartments(&self, p: usize) -> Result<Self> {
        Self::build_for_mode(self.name, self.arch.action_mode, p)
    }

    /// Every weight slot must be written exactly once across chromosomes.
    fn check_coverage(&self) -> Result<()> {
        let n = self.arch.neurons;
        let i = self.arch.inputs;
        let mut seen = vec![false; self.arch.weight_total()];
        for chromosome in &self.chromosomes {
            for slot in chromosome.placement().iter().flatten() {
                let idx = match *slot {
                    WeightSlot::Input(r, c) => {
                        debug_assert!(r < n && c < i);
                        r * i + c
                    }
                    WeightSlot::Recurrent(r, c) => {
                        debug_assert!(r < n && c < n);
                        n * i + r * n + c
                    }
                    WeightSlot::Bias(r) => {
                        debug_assert!(r < n);
                        n * i + n * n + r
                    }
                };
                if seen[idx] {
                    return Err(Error::LayoutMismatch(format!(
                        "weight slot {slot:?} placed twice"
                    )));
                }
                seen[idx] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::LayoutMismatch(format!(
                "weight slot at flat offset {missing} not covered"
            )));
        }
        Ok(())
    }
}

fn build_psi1(arch: &NetworkArchitecture) -> Result<Vec<ChromosomeLayout>> {
    let (n, i) = (arch.neurons, arch.inputs);
    let cols = i + n + 1;
    let mut placement = Vec::with_capacity(n * cols);
    for r in 0..n {
        for c in 0..cols {
            let slot = if c < i {
                WeightSlot::Input(r, c)
            } else if c < i + n {
                WeightSlot::Recurrent(r, c - i)
            } else {
                WeightSlot::Bias(r)
            };
            placement.push(Some(slot));
        }
    }
    Ok(vec![ChromosomeLayout::new(vec![n, cols], placement)?])
}

/// Observation index for a source slice `(v, s)` of a `(p+1)`-slice layout:
/// slice `s < p` holds the 8 per-compartment state variables, the extra
/// slice holds the two base observations at `v = 0, 1`.
fn source_input(v: usize, s: usize, p: usize) -> Option<usize> {
    if s < p {
        Some(8 * s + v)
    } else {
        match v {
            0 => Some(8 * p),
            1 => Some(8 * p + 1),
            _ => None,
        }
    }
}

fn build_psi2(arch: &NetworkArchitecture, p: usize) -> Result<Vec<ChromosomeLayout>> {
    let n = arch.neurons;

    let input_dims = vec![n, p + 1, 8];
    let mut input_placement = Vec::with_capacity(n * (p + 1) * 8);
    for r in 0..n {
        for s in 0..=p {
            for v in 0..8 {
                input_placement.push(source_input(v, s, p).map(|col| WeightSlot::Input(r, col)));
            }
        }
    }

    let mut recurrent_placement = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            recurrent_placement.push(Some(WeightSlot::Recurrent(r, c)));
        }
    }

    let bias_placement = (0..n).map(|r| Some(WeightSlot::Bias(r))).collect();

    Ok(vec![
        ChromosomeLayout::new(input_dims, input_placement)?,
        ChromosomeLayout::new(vec![n, n], recurrent_placement)?,
        ChromosomeLayout::new(vec![n], bias_placement)?,
    ])
}

/// Neuron index for grid slot `(m, t)` on the raw controller's
/// `3 x (p+1)` grid: compartment columns hold the muscle neurons, the extra
/// column holds the two rotation neurons, and its third slot is empty.
fn grid_neuron(m: usize, t: usize, p: usize) -> Option<usize> {
    if t < p {
        Some(3 * t + m)
    } else {
        match m {
            0 => Some(3 * p),
            1 => Some(3 * p + 1),
            _ => None,
        }
    }
}

fn build_psi3(arch: &NetworkArchitecture, p: usize) -> Result<Vec<ChromosomeLayout>> {
    debug_assert_eq!(arch.neurons, 3 * p + 2);
    let input_dims = vec![8, p + 1, 3, p + 1];
    let mut input_placement = Vec::with_capacity(8 * (p + 1) * 3 * (p + 1));
    for v in 0..8 {
        for s in 0..=p {
            for m in 0..3 {
                for t in 0..=p {
                    let slot = match (source_input(v, s, p), grid_neuron(m, t, p)) {
                        (Some(col), Some(row)) => Some(WeightSlot::Input(row, col)),
                        _ => None,
                    };
                    input_placement.push(slot);
                }
            }
        }
    }

    let recurrent_dims = vec![3, p + 1, 3, p + 1];
    let mut recurrent_placement = Vec::with_capacity(3 * (p + 1) * 3 * (p + 1));
    for m1 in 0..3 {
        for t1 in 0..=p {
            for m2 in 0..3 {
                for t2 in 0..=p {
                    let slot = match (grid_neuron(m1, t1, p), grid_neuron(m2, t2, p)) {
                        (Some(row), Some(col)) => Some(WeightSlot::Recurrent(row, col)),
                        _ => None,
                    };
                    recurrent_placement.push(slot);
                }
            }
        }
    }

    let bias_dims = vec![3, p + 1];
    let mut bias_placement = Vec::with_capacity(3 * (p + 1));
    for m in 0..3 {
        for t in 0..=p {
            bias_placement.push(grid_neuron(m, t, p).map(WeightSlot::Bias));
        }
    }

    Ok(vec![
        ChromosomeLayout::new(input_dims, input_placement)?,
        ChromosomeLayout::new(recurrent_dims, recurrent_placement)?,
        ChromosomeLayout::new(bias_dims, bias_placement)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_totals_match_published_architectures() {
        assert_eq!(NetworkArchitecture::meta(10).weight_total(), 728);
        assert_eq!(NetworkArchitecture::raw(10).weight_total(), 3680);
    }

    #[test]
    fn psi1_meta_at_ten_compartments() {
        let scheme = MappingScheme::build_for_mode(SchemeName::Psi1, ActionMode::Meta, 10).unwrap();
        assert_eq!(scheme.chromosome_count(), 1);
        assert_eq!(scheme.chromosomes()[0].dims(), &[8, 91]);
        assert_eq!(scheme.placed_cells(), 728);
        assert_eq!(scheme.unused_cells(), 0);
    }

    #[test]
    fn psi2_meta_at_ten_compartments() {
        let scheme = MappingScheme::build_for_mode(SchemeName::Psi2, ActionMode::Meta, 10).unwrap();
        assert_eq!(scheme.chromosome_count(), 3);
        let input = &scheme.chromosomes()[0];
        assert_eq!(input.dims(), &[8, 11, 8]);
        assert_eq!(input.capacity(), 704);
        assert_eq!(input.used_cells(), 656);
        assert_eq!(input.unused_cells(), 48);
        assert_eq!(scheme.chromosomes()[1].dims(), &[8, 8]);
        assert_eq!(scheme.chromosomes()[2].dims(), &[8]);
    }

    #[test]
    fn psi3_raw_at_ten_compartments() {
        let scheme = MappingScheme::build_for_mode(SchemeName::Psi3, ActionMode::Raw, 10).unwrap();
        assert_eq!(scheme.chromosome_count(), 3);
        assert_eq!(scheme.chromosomes()[0].dims(), &[8, 11, 3, 11]);
        assert_eq!(scheme.chromosomes()[1].dims(), &[3, 11, 3, 11]);
        let bias = &scheme.chromosomes()[2];
        assert_eq!(bias.dims(), &[3, 11]);
        assert_eq!(bias.capacity(), 33);
        assert_eq!(bias.used_cells(), 32);
        assert_eq!(bias.unused_cells(), 1);
    }

    #[test]
    fn incompatible_scheme_and_mode_is_an_error() {
        assert!(matches!(
            MappingScheme::build_for_mode(SchemeName::Psi2, ActionMode::Raw, 10),
            Err(Error::IncompatibleScheme { .. })
        ));
        assert!(matches!(
            MappingScheme::build_for_mode(SchemeName::Psi3, ActionMode::Meta, 10),
            Err(Error::IncompatibleScheme { .. })
        ));
    }

    #[test]
    fn non_canonical_architecture_is_rejected() {
        let arch = NetworkArchitecture {
            neurons: 8,
            inputs: 40,
            action_mode: ActionMode::Meta,
        };
        assert!(MappingScheme::build(SchemeName::Psi1, arch, 10).is_err());
    }

    #[test]
    fn every_scheme_covers_all_weight_slots() {
        // Coverage is asserted inside build(); this exercises the sweep.
        for p in 3..=20 {
            MappingScheme::build_for_mode(SchemeName::Psi1, ActionMode::Meta, p).unwrap();
            MappingScheme::build_for_mode(SchemeName::Psi1, ActionMode::Raw, p).unwrap();
            MappingScheme::build_for_mode(SchemeName::Psi2, ActionMode::Meta, p).unwrap();
            MappingScheme::build_for_mode(SchemeName::Psi3, ActionMode::Raw, p).unwrap();
        }
    }

    #[test]
    fn flat_weight_layout_round_trips() {
        let arch = NetworkArchitecture::meta(3);
        let mut w = NetworkWeights::zeros(&arch);
        w.input[[2, 5]] = 1.5;
        w.recurrent[[7, 0]] = -2.0;
        w.bias[4] = 0.25;
        let back = NetworkWeights::from_flat(&arch, &w.to_flat()).unwrap();
        assert_eq!(w, back);
    }
}
