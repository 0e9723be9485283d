use serde::Serialize;

use crate::error::{LabError, Result};
use crate::numeric::{lit, Real};

/// How the nodes of a [`RadialGrid`] were laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    Graded,
}

/// Strictly increasing radial nodes starting at the pole, with at least 16 intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid<T> {
    nodes: Vec<T>,
    spacing: Spacing,
}

pub const MIN_INTERVALS: usize = 16;

impl<T: Real> RadialGrid<T> {
    pub fn from_nodes(nodes: Vec<T>, spacing: Spacing) -> Result<Self> {
        if nodes.len() < MIN_INTERVALS + 1 {
            return Err(LabError::InvalidGrid(format!(
                "need at least {} intervals, got {}",
                MIN_INTERVALS,
                nodes.len().saturating_sub(1)
            )));
        }
        if nodes[0] != T::zero() {
            return Err(LabError::InvalidGrid("first node must be the pole r = 0".into()));
        }
        if let Some(i) = nodes.windows(2).position(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(LabError::InvalidGrid(format!("nodes not strictly increasing at index {}", i + 1)));
        }
        Ok(Self { nodes, spacing })
    }

    /// `n` equal intervals on `[0, r_max]`.
    pub fn uniform(r_max: T, n: usize) -> Result<Self> {
        if !(r_max > T::zero()) {
            return Err(LabError::InvalidGrid("r_max must be positive".into()));
        }
        let step = r_max / T::from_usize_lossy(n);
        let mut nodes: Vec<T> = (0..=n).map(|i| step * T::from_usize_lossy(i)).collect();
        if let Some(last) = nodes.last_mut() {
            *last = r_max;
        }
        Self::from_nodes(nodes, Spacing::Uniform)
    }

    /// Nodes with spacing growing geometrically from `first_step` by `ratio`,
    /// capped at `max_step`, up to `r_max`.
    pub fn graded(r_max: T, first_step: T, ratio: T, max_step: T) -> Result<Self> {
        if !(first_step > T::zero() && ratio >= T::one() && max_step >= first_step) {
            return Err(LabError::InvalidGrid("invalid grading parameters".into()));
        }
        let mut nodes = vec![T::zero()];
        let mut step = first_step;
        let mut r = T::zero();
        while r + step * lit(1.0001) < r_max {
            r += step;
            nodes.push(r);
            step = (step * ratio).min(max_step);
        }
        nodes.push(r_max);
        Self::from_nodes(nodes, Spacing::Graded)
    }

    /// Insert the midpoint of every interval (halves the spacing).
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push((w[0] + w[1]) * lit(0.5));
        }
        nodes.push(self.r_max());
        Self {
            nodes,
            spacing: self.spacing,
        }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> T {
        *self.nodes.last().expect("grid is nonempty")
    }

    /// Index of the last node not exceeding `r` (clamped to valid intervals).
    pub fn interval_of(&self, r: T) -> usize {
        match self.nodes.partition_point(|&x| x <= r) {
            0 => 0,
            k => (k - 1).min(self.nodes.len() - 2),
        }
    }

    /// Index of a node equal to `r` up to a relative tolerance, if any.
    pub fn find_node(&self, r: T) -> Option<usize> {
        let tol = lit::<T>(1e-12) * (T::one() + r.abs());
        let i = self.interval_of(r);
        [i, i + 1]
            .into_iter()
            .find(|&j| j < self.nodes.len() && (self.nodes[j] - r).abs() <= tol)
    }
}
