//! The behavior-performance map.
//!
//! An [`ArchiveGrid`] discretizes an N-dimensional behavior space into a
//! regular grid and keeps at most one [`Elite`] per cell: the best-performing
//! controller whose descriptor falls into that cell. Only occupied cells are
//! stored, keyed by their flattened (row-major, last dimension fastest) index.

mod io;

pub use io::{read_archive, write_archive, ArchiveMeta, ARCHIVE_HEADER};

use indexmap::IndexMap;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bounds and bin counts of a discretized behavior space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
    bins: Vec<usize>,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, bins: Vec<usize>) -> Result<Self> {
        let dims = bins.len();
        if dims == 0 {
            return Err(Error::InvalidGrid("at least one dimension is required".into()));
        }
        if lower.len() != dims || upper.len() != dims {
            return Err(Error::InvalidGrid(format!("{} lower / {} upper bounds for {} dimensions", lower.len(), upper.len(), dims)));
        }
        for d in 0..dims {
            if !(lower[d].is_finite() && upper[d].is_finite() && lower[d] < upper[d]) {
                return Err(Error::InvalidGrid(format!("dimension {d}: need finite lower < upper, got [{}, {}]", lower[d], upper[d])));
            }
            if bins[d] == 0 {
                return Err(Error::InvalidGrid(format!("dimension {d} has zero bins")));
            }
        }
        let total = bins
            .iter()
            .try_fold(1u64, |acc, &b| acc.checked_mul(b as u64))
            .ok_or_else(|| Error::InvalidGrid("cell count overflows u64".into()))?;
        if total == 0 {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        Ok(Self { lower, upper, bins })
    }

    /// The arm workspace: x in [-0.7, 0.7] m, y in [0, 0.7] m, 200 x 100 cells of 7 mm.
    pub fn arm() -> Self {
        Self::new(vec![-0.7, 0.0], vec![0.7, 0.7], vec![200, 100]).expect("valid arm grid")
    }

    /// `dims` unit-interval dimensions discretized to the five values
    /// {0, 0.25, 0.5, 0.75, 1}: bins are centred on those values, so the
    /// bounds are widened by half a bin on each side.
    pub fn unit_five_levels(dims: usize) -> Self {
        Self::new(vec![-0.125; dims], vec![1.125; dims], vec![5; dims]).expect("valid grid")
    }

    /// `dims` unit-interval dimensions with `bins` equal-width bins each.
    pub fn unit(dims: usize, bins: usize) -> Result<Self> {
        Self::new(vec![0.0; dims], vec![1.0; dims], vec![bins; dims])
    }

    pub fn dims(&self) -> usize {
        self.bins.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn bins(&self) -> &[usize] {
        &self.bins
    }

    pub fn cell_count(&self) -> u64 {
        self.bins.iter().map(|&b| b as u64).product()
    }

    /// Per-dimension bin of `descriptor`. Values below the lower bound go to
    /// bin 0, values at or above the upper bound go to the last bin.
    pub fn cell_index(&self, descriptor: &[f64]) -> Result<Vec<usize>> {
        if descriptor.len() != self.dims() {
            return Err(Error::DimensionMismatch { expected: self.dims(), actual: descriptor.len() });
        }
        descriptor
            .iter()
            .enumerate()
            .map(|(d, &v)| {
                if !v.is_finite() {
                    return Err(Error::InvalidGrid(format!("non-finite descriptor value {v} in dimension {d}")));
                }
                Ok(self.bin_of(d, v))
            })
            .collect()
    }

    fn bin_of(&self, d: usize, v: f64) -> usize {
        let width = (self.upper[d] - self.lower[d]) / self.bins[d] as f64;
        let raw = ((v - self.lower[d]) / width).floor();
        if raw <= 0.0 {
            0
        } else {
            (raw as usize).min(self.bins[d] - 1)
        }
    }

    pub fn flatten(&self, index: &[usize]) -> u64 {
        index.iter().zip(&self.bins).fold(0u64, |acc, (&i, &b)| acc * b as u64 + i as u64)
    }

    pub fn unflatten(&self, mut flat: u64) -> Vec<usize> {
        let mut index = vec![0; self.dims()];
        for d in (0..self.dims()).rev() {
            let b = self.bins[d] as u64;
            index[d] = (flat % b) as usize;
            flat /= b;
        }
        index
    }

    pub fn flat_index(&self, descriptor: &[f64]) -> Result<u64> {
        Ok(self.flatten(&self.cell_index(descriptor)?))
    }

    /// Centre of a cell in behavior coordinates.
    pub fn cell_center(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .enumerate()
            .map(|(d, &i)| {
                let width = (self.upper[d] - self.lower[d]) / self.bins[d] as f64;
                self.lower[d] + (i as f64 + 0.5) * width
            })
            .collect()
    }
}

/// Controller parameters, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome(Vec<f64>);

impl Genome {
    pub fn new(params: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = params.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidGenome(format!("component {i} = {v} outside [0, 1]")));
        }
        Ok(Self(params))
    }

    pub fn params(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Genome {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A stored controller with its actual (not discretized) descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Elite {
    pub genome: Genome,
    pub descriptor: Vec<f64>,
    pub performance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    InsertedNew,
    Replaced,
    Rejected,
}

impl InsertOutcome {
    pub fn accepted(self) -> bool {
        !matches!(self, InsertOutcome::Rejected)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchiveStats {
    pub filled: usize,
    pub mean_performance: Option<f64>,
    pub max_performance: Option<f64>,
}

/// Sparse grid of elites.
///
/// Cells keep the order in which they were first filled, which makes
/// [`ArchiveGrid::random_elite`] reproducible for a given RNG stream.
#[derive(Debug, Clone)]
pub struct ArchiveGrid {
    spec: GridSpec,
    cells: IndexMap<u64, Elite>,
}

impl ArchiveGrid {
    pub fn new(spec: GridSpec) -> Self {
        Self { spec, cells: IndexMap::new() }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, flat: u64) -> Option<&Elite> {
        self.cells.get(&flat)
    }

    /// Occupied cells in first-fill order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (u64, &Elite)> + '_ {
        self.cells.iter().map(|(&k, v)| (k, v))
    }

    pub fn elites(&self) -> impl ExactSizeIterator<Item = &Elite> + '_ {
        self.cells.values()
    }

    /// Occupied cells sorted by flattened index.
    pub fn sorted(&self) -> Vec<(u64, &Elite)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable_by_key(|(k, _)| *k);
        v
    }

    /// Keeps `elite` if its cell is empty or it strictly beats the occupant.
    pub fn try_insert(&mut self, elite: Elite) -> Result<InsertOutcome> {
        let key = self.spec.flat_index(&elite.descriptor)?;
        Ok(match self.cells.get_mut(&key) {
            None => {
                self.cells.insert(key, elite);
                InsertOutcome::InsertedNew
            }
            Some(current) if current.performance < elite.performance => {
                *current = elite;
                InsertOutcome::Replaced
            }
            Some(_) => InsertOutcome::Rejected,
        })
    }

    /// Uniformly random occupied cell.
    pub fn random_elite<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<&Elite> {
        if self.cells.is_empty() {
            return Err(Error::EmptyArchive);
        }
        let i = rng.random_range(0..self.cells.len());
        Ok(&self.cells[i])
    }

    pub fn stats(&self) -> ArchiveStats {
        if self.cells.is_empty() {
            return ArchiveStats { filled: 0, mean_performance: None, max_performance: None };
        }
        let n = self.cells.len();
        let sum: f64 = self.cells.values().map(|e| e.performance).sum();
        let max = self.cells.values().map(|e| e.performance).fold(f64::NEG_INFINITY, f64::max);
        ArchiveStats { filled: n, mean_performance: Some(sum / n as f64), max_performance: Some(max) }
    }
}
