//! Synthetic data, dewarping and dataset files.

mod io;
mod resample;
mod walk;

pub use io::{load_dataset, save_dataset, Format};
pub use resample::arc_length_resample;
pub use walk::{generate_walk, WalkParams};

use std::collections::HashSet;

use crate::error::{check_dim, Error, Result};
use crate::series::TimeSeries;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEntry<T> {
    pub id: String,
    pub label: Option<String>,
    pub series: TimeSeries<T>,
}

/// Ordered collection of labeled series sharing one dimension. Ids are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    entries: Vec<DatasetEntry<T>>,
    ids: HashSet<String>,
}

impl<T> Default for Dataset<T> {
    fn default() -> Self {
        Self {
            entries: Vec::new(),
            ids: HashSet::new(),
        }
    }
}

impl<T: Scalar> Dataset<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: DatasetEntry<T>) -> Result<()> {
        if let Some(dim) = self.dim() {
            check_dim(dim, entry.series.dim())?;
        }
        if !self.ids.insert(entry.id.clone()) {
            return Err(Error::DuplicateId(entry.id));
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn push_series(&mut self, id: impl Into<String>, label: Option<String>, series: TimeSeries<T>) -> Result<()> {
        self.push(DatasetEntry {
            id: id.into(),
            label,
            series,
        })
    }

    /// Point dimension shared by all entries; `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.entries.first().map(|e| e.series.dim())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[DatasetEntry<T>] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &DatasetEntry<T>> {
        self.entries.iter()
    }

    pub fn into_entries(self) -> Vec<DatasetEntry<T>> {
        self.entries
    }
}

impl<T: Scalar> TryFrom<Vec<DatasetEntry<T>>> for Dataset<T> {
    type Error = Error;

    fn try_from(entries: Vec<DatasetEntry<T>>) -> Result<Self> {
        let mut ds = Dataset::new();
        for e in entries {
            ds.push(e)?;
        }
        Ok(ds)
    }
}
