//! Genomes of frequency coefficients and their translation to and from
//! network weights.
//!
//! Decoding runs in three steps per chromosome: fill the chromosome's
//! coefficient array in importance order (zero-padding the tail), apply the
//! inverse DCT, then copy each used cell into its weight slot. Encoding is
//! the reverse: place weights into the arrays (unused cells zero), apply the
//! forward DCT and read the coefficients back in importance order.
//!
//! Because cell placement depends only on the scheme's shape formulas, a
//! genome can be decoded against the same scheme rebuilt at a different
//! compartment count: coefficients are zero-padded or truncated to the new
//! array capacities. That is what [`resize`] does.

pub mod io;
mod scheme;

pub use scheme::{
    ActionMode, ChromosomeLayout, MappingScheme, NetworkArchitecture, NetworkWeights, SchemeName,
    WeightSlot,
};

use crate::dct::{dct2_nd, dct3_nd, RealArrayND};
use crate::error::{Error, Result};

/// A flat coefficient vector plus its split into chromosomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    coefficients: Vec<f64>,
    chromosome_lengths: Vec<usize>,
}

impl Genome {
    pub fn new(coefficients: Vec<f64>, chromosome_lengths: Vec<usize>) -> Result<Self> {
        let total: usize = chromosome_lengths.iter().sum();
        if total != coefficients.len() {
            return Err(Error::LayoutMismatch(format!(
                "chromosome lengths sum to {total}, genome has {} coefficients",
                coefficients.len()
            )));
        }
        Ok(Self {
            coefficients,
            chromosome_lengths,
        })
    }

    /// All-zero genome of `total` coefficients distributed evenly over the
    /// scheme's chromosomes: coefficients are dealt one at a time, cycling
    /// chromosome 0, 1, ..., k-1, skipping chromosomes already at their
    /// array capacity.
    pub fn distribute(total: usize, scheme: &MappingScheme) -> Result<Self> {
        let capacities: Vec<usize> = scheme.chromosomes().iter().map(|c| c.capacity()).collect();
        if total > capacities.iter().sum() {
            return Err(Error::GenomeAtCapacity);
        }
        let k = capacities.len();
        let mut lengths = vec![0usize; k];
        let mut cursor = 0;
        for _ in 0..total {
            while lengths[cursor % k] >= capacities[cursor % k] {
                cursor += 1;
            }
            lengths[cursor % k] += 1;
            cursor += 1;
        }
        Ok(Self {
            coefficients: vec![0.0; total],
            chromosome_lengths: lengths,
        })
    }

    /// Genome with the same layout but new coefficient values.
    pub fn with_coefficients(&self, coefficients: Vec<f64>) -> Result<Self> {
        Self::new(coefficients, self.chromosome_lengths.clone())
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn chromosome_lengths(&self) -> &[usize] {
        &self.chromosome_lengths
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Splits the genome into per-chromosome coefficient slices, checking the
/// layout against the scheme.
pub fn split_genome<'g>(genome: &'g Genome, scheme: &MappingScheme) -> Result<Vec<&'g [f64]>> {
    if genome.chromosome_lengths.len() != scheme.chromosome_count() {
        return Err(Error::LayoutMismatch(format!(
            "genome has {} chromosomes, scheme expects {}",
            genome.chromosome_lengths.len(),
            scheme.chromosome_count()
        )));
    }
    for (m, (&len, layout)) in genome
        .chromosome_lengths
        .iter()
        .zip(scheme.chromosomes())
        .enumerate()
    {
        if len > layout.capacity() {
            return Err(Error::LayoutMismatch(format!(
                "chromosome {m} has {len} coefficients, array capacity is {}",
                layout.capacity()
            )));
        }
    }
    let mut slices = Vec::with_capacity(genome.chromosome_lengths.len());
    let mut offset = 0;
    for &len in &genome.chromosome_lengths {
        slices.push(&genome.coefficients[offset..offset + len]);
        offset += len;
    }
    Ok(slices)
}

/// Decodes a genome into network weights under the given scheme.
pub fn decode(genome: &Genome, scheme: &MappingScheme) -> Result<NetworkWeights> {
    let chromosomes = split_genome(genome, scheme)?;
    let mut weights = NetworkWeights::zeros(scheme.architecture());
    for (coeffs, layout) in chromosomes.iter().zip(scheme.chromosomes()) {
        let array = layout.order().fill(coeffs)?;
        let values = dct3_nd(&array);
        scatter(&values, layout, &mut weights);
    }
    Ok(weights)
}

fn scatter(values: &RealArrayND, layout: &ChromosomeLayout, weights: &mut NetworkWeights) {
    for (value, slot) in values.data().iter().zip(layout.placement()) {
        match slot {
            Some(WeightSlot::Input(r, c)) => weights.input[[*r, *c]] = *value,
            Some(WeightSlot::Recurrent(r, c)) => weights.recurrent[[*r, *c]] = *value,
            Some(WeightSlot::Bias(r)) => weights.bias[*r] = *value,
            None => {}
        }
    }
}

/// Encodes network weights into a full-rank genome: every chromosome carries
/// as many coefficients as its array has cells, so decoding the result
/// reproduces the weights exactly (up to round-off). Unused cells enter the
/// forward transform as zeros.
pub fn encode(weights: &NetworkWeights, scheme: &MappingScheme) -> Result<Genome> {
    let mut coefficients = Vec::with_capacity(scheme.total_cells());
    let mut lengths = Vec::with_capacity(scheme.chromosome_count());
    for layout in scheme.chromosomes() {
        let mut array = RealArrayND::zeros(layout.dims())?;
        {
            let data = array.data_mut();
            for (cell, slot) in data.iter_mut().zip(layout.placement()) {
                *cell = match slot {
                    Some(WeightSlot::Input(r, c)) => weights.input[[*r, *c]],
                    Some(WeightSlot::Recurrent(r, c)) => weights.recurrent[[*r, *c]],
                    Some(WeightSlot::Bias(r)) => weights.bias[*r],
                    None => 0.0,
                };
            }
        }
        let freq = dct2_nd(&array);
        coefficients.extend(layout.order().flat_indices().iter().map(|&i| freq.data()[i]));
        lengths.push(layout.capacity());
    }
    Genome::new(coefficients, lengths)
}

/// Encodes and then truncates each chromosome to the lengths an evenly
/// distributed genome of `total` coefficients would have.
pub fn encode_truncated(
    weights: &NetworkWeights,
    scheme: &MappingScheme,
    total: usize,
) -> Result<Genome> {
    let full = encode(weights, scheme)?;
    let target = Genome::distribute(total, scheme)?;
    let full_split = split_genome(&full, scheme)?;
    let mut coefficients = Vec::with_capacity(total);
    for (slice, &len) in full_split.iter().zip(target.chromosome_lengths()) {
        coefficients.extend_from_slice(&slice[..len]);
    }
    Genome::new(coefficients, target.chromosome_lengths().to_vec())
}

/// Decodes a genome against the scheme rebuilt for `new_p` compartments.
///
/// Arrays that grow are zero-padded beyond the chromosome; arrays that
/// shrink below the chromosome length silently drop the overflow
/// coefficients (the highest frequencies of that chromosome).
pub fn resize(genome: &Genome, scheme: &MappingScheme, new_p: usize) -> Result<NetworkWeights> {
    let resized = scheme.at_compartments(new_p)?;
    let chromosomes = split_genome_lenient(genome, &resized)?;
    let mut weights = NetworkWeights::zeros(resized.architecture());
    for (coeffs, layout) in chromosomes.iter().zip(resized.chromosomes()) {
        let take = coeffs.len().min(layout.capacity());
        let array = layout.order().fill(&coeffs[..take])?;
        let values = dct3_nd(&array);
        scatter(&values, layout, &mut weights);
    }
    Ok(weights)
}

/// Split without the capacity check; used by [`resize`] where overflow is
/// handled by truncation instead of an error.
fn split_genome_lenient<'g>(
    genome: &'g Genome,
    scheme: &MappingScheme,
) -> Result<Vec<&'g [f64]>> {
    if genome.chromosome_lengths.len() != scheme.chromosome_count() {
        return Err(Error::LayoutMismatch(format!(
            "genome has {} chromosomes, scheme expects {}",
            genome.chromosome_lengths.len(),
            scheme.chromosome_count()
        )));
    }
    let mut slices = Vec::with_capacity(genome.chromosome_lengths.len());
    let mut offset = 0;
    for &len in &genome.chromosome_lengths {
        slices.push(&genome.coefficients[offset..offset + len]);
        offset += len;
    }
    Ok(slices)
}

/// Appends `count` zero coefficients, one at a time, cycling through the
/// chromosomes starting at the first shortest one. Chromosomes already at
/// their array capacity are skipped; if every chromosome is saturated the
/// genome cannot grow and an error is returned.
pub fn add_coefficients(genome: &Genome, scheme: &MappingScheme, count: usize) -> Result<Genome> {
    split_genome(genome, scheme)?;
    let capacities: Vec<usize> = scheme.chromosomes().iter().map(|c| c.capacity()).collect();
    let mut lengths = genome.chromosome_lengths.clone();
    let k = lengths.len();

    let start = lengths
        .iter()
        .enumerate()
        .min_by_key(|(i, &len)| (len, *i))
        .map(|(i, _)| i)
        .expect("scheme has at least one chromosome");

    let mut added = vec![0usize; k];
    let mut cursor = start;
    for _ in 0..count {
        let mut skipped = 0;
        while lengths[cursor % k] >= capacities[cursor % k] {
            cursor += 1;
            skipped += 1;
            if skipped == k {
                return Err(Error::GenomeAtCapacity);
            }
        }
        lengths[cursor % k] += 1;
        added[cursor % k] += 1;
        cursor += 1;
    }

    let mut coefficients = Vec::with_capacity(genome.len() + count);
    let mut offset = 0;
    for (m, &old_len) in genome.chromosome_lengths.iter().enumerate() {
        coefficients.extend_from_slice(&genome.coefficients[offset..offset + old_len]);
        coefficients.extend(std::iter::repeat(0.0).take(added[m]));
        offset += old_len;
    }
    Genome::new(coefficients, lengths)
}
