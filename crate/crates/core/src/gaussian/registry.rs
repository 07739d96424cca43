use crate::error::{Error, Result};

/// Two labels closer than this are the same mode.
pub const LABEL_TOLERANCE: f64 = 1e-9;

/// Ordered set of modes, each identified by a signed dimensionless momentum
/// along the laser-difference axis.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeRegistry {
    labels: Vec<f64>,
}

impl ModeRegistry {
    pub fn new(labels: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Registry("a registry needs at least one mode".into()));
        }
        for (i, &l) in labels.iter().enumerate() {
            if !l.is_finite() {
                return Err(Error::Registry(format!("label {l} is not finite")));
            }
            if labels[..i].iter().any(|&m| (m - l).abs() < LABEL_TOLERANCE) {
                return Err(Error::Registry(format!("duplicate label {l}")));
            }
        }
        Ok(ModeRegistry { labels })
    }

    /// Registry of `count` anonymous modes labelled 1, 2, ..., count.
    pub fn anonymous(count: usize) -> Result<Self> {
        Self::new((1..=count).map(|i| i as f64).collect())
    }

    /// `{+q, −q}` for every q in `magnitudes`, in that interleaved order.
    pub fn symmetric(magnitudes: &[f64]) -> Result<Self> {
        Self::new(magnitudes.iter().flat_map(|&q| [q, -q]).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> Result<f64> {
        self.labels
            .get(index)
            .copied()
            .ok_or_else(|| Error::UnknownMode(format!("index {index}")))
    }

    pub fn find(&self, label: f64) -> Option<usize> {
        self.labels
            .iter()
            .position(|&l| (l - label).abs() < LABEL_TOLERANCE)
    }

    pub fn index_of(&self, label: f64) -> Result<usize> {
        self.find(label)
            .ok_or_else(|| Error::UnknownMode(format!("label {label}")))
    }

    /// Index of the mode with the opposite momentum.
    pub fn partner(&self, index: usize) -> Option<usize> {
        let l = *self.labels.get(index)?;
        self.find(-l)
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownMode(format!("index {index}")))
        }
    }

    /// Labels whose negation is not registered.
    pub fn unpaired(&self) -> Vec<f64> {
        (0..self.len())
            .filter(|&i| self.partner(i).is_none())
            .map(|i| self.labels[i])
            .collect()
    }
}
