//! Finite-volume partitions of the truncated volume domain.
//!
//! A mesh divides ]domain_min, domain_max] into I cells. Cell a occupies the
//! half-open interval ]edges[a], edges[a+1]]: a volume landing exactly on an
//! interior edge belongs to the lower-indexed cell, and the last edge is
//! inclusive. Midpoints are the cell stand-ins used by the scheme wherever a
//! single representative volume per cell is needed.

use crate::error::Error;
use crate::Result;

/// Immutable cell partition. Safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    edges: Vec<f64>,
    midpoints: Vec<f64>,
    widths: Vec<f64>,
    h_max: f64,
}

impl Mesh {
    /// Equal-width partition of [domain_min, domain_max] into `cells` cells.
    pub fn uniform(domain_min: f64, domain_max: f64, cells: usize) -> Result<Self> {
        check_domain(domain_min, domain_max, cells)?;
        let span = domain_max - domain_min;
        let mut edges = Vec::with_capacity(cells + 1);
        for k in 0..=cells {
            edges.push(domain_min + span * k as f64 / cells as f64);
        }
        // Pin the last edge so the domain is covered exactly.
        edges[cells] = domain_max;
        Self::from_edges(edges)
    }

    /// Partition whose widths grow by `ratio` per cell, spanning the domain
    /// exactly. `ratio` = 1 reproduces [`Mesh::uniform`]; ratios in (0, 1)
    /// shrink the widths instead.
    pub fn geometric(domain_min: f64, domain_max: f64, cells: usize, ratio: f64) -> Result<Self> {
        check_domain(domain_min, domain_max, cells)?;
        if !ratio.is_finite() || ratio <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "mesh ratio must be positive and finite, got {ratio}"
            )));
        }
        if ratio == 1.0 {
            return Self::uniform(domain_min, domain_max, cells);
        }
        let span = domain_max - domain_min;
        // First width of a geometric series summing to the span.
        let grow = ratio.powi(cells as i32);
        if !grow.is_finite() || grow == 1.0 {
            return Err(Error::InvalidArgument(format!(
                "ratio {ratio} with {cells} cells overflows the width progression"
            )));
        }
        let first = span * (ratio - 1.0) / (grow - 1.0);
        if !first.is_finite() || first <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "ratio {ratio} with {cells} cells yields a vanishing first cell"
            )));
        }
        let mut edges = Vec::with_capacity(cells + 1);
        let mut e = domain_min;
        let mut w = first;
        edges.push(e);
        for _ in 0..cells {
            e += w;
            edges.push(e);
            w *= ratio;
        }
        edges[cells] = domain_max;
        Self::from_edges(edges)
    }

    fn from_edges(edges: Vec<f64>) -> Result<Self> {
        let mut midpoints = Vec::with_capacity(edges.len() - 1);
        let mut widths = Vec::with_capacity(edges.len() - 1);
        let mut h_max = 0.0f64;
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if !(hi > lo) {
                return Err(Error::InvalidArgument(format!(
                    "edges not strictly increasing near {lo}"
                )));
            }
            let w = hi - lo;
            midpoints.push(0.5 * (lo + hi));
            widths.push(w);
            h_max = h_max.max(w);
        }
        Ok(Self {
            edges,
            midpoints,
            widths,
            h_max,
        })
    }

    /// Number of cells I.
    pub fn cells(&self) -> usize {
        self.widths.len()
    }

    /// Cell boundaries, length I+1.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Cell midpoints, length I.
    pub fn midpoints(&self) -> &[f64] {
        &self.midpoints
    }

    /// Cell widths, length I.
    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Largest cell width.
    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Lower domain bound (exclusive for membership).
    pub fn domain_min(&self) -> f64 {
        self.edges[0]
    }

    /// Upper domain bound (inclusive).
    pub fn domain_max(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    /// Index of the cell containing `m` under the half-open convention
    /// ]edges[a], edges[a+1]]. Errors when m lies outside ]min, max].
    pub fn locate_cell(&self, m: f64) -> Result<usize> {
        if !m.is_finite() || m <= self.domain_min() || m > self.domain_max() {
            return Err(Error::OutOfDomain {
                m,
                lo: self.domain_min(),
                hi: self.domain_max(),
            });
        }
        // First interior edge not below m; ties go to the lower cell.
        Ok(self.edges[1..].partition_point(|&e| e < m))
    }
}

fn check_domain(domain_min: f64, domain_max: f64, cells: usize) -> Result<()> {
    if !domain_min.is_finite() || !domain_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "domain bounds must be finite, got [{domain_min}, {domain_max}]"
        )));
    }
    if domain_min < 0.0 || domain_min >= domain_max {
        return Err(Error::InvalidArgument(format!(
            "domain must satisfy 0 <= min < max, got [{domain_min}, {domain_max}]"
        )));
    }
    if cells == 0 {
        return Err(Error::InvalidArgument("cell count must be positive".into()));
    }
    Ok(())
}
