//! Planar geometry on square grids.
//!
//! A [`GridSpec`] discretizes a rectangle of the plane into square cells;
//! a [`GridMask`] is a packed bit raster over such a grid and stands for hulls,
//! clusters and domains. All neighbourhood notions in this module are
//! 4-connected.

mod boundary;
mod boxcount;
mod harmonic;
mod hull;
mod io;
mod raster;

pub use boundary::{outer_boundary, OuterBoundary};
pub use boxcount::{box_counting_dimension, BoxDimension};
pub use harmonic::{arc_harmonic_measure, harmonic_measure_estimate, outer_layer, HarmonicEstimate};
pub use hull::{component_count, fill_hull, frontier, largest_component};
pub use io::{read_mask, write_mask};
pub use raster::rasterize_path;

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexPoint = Complex64;

/// Upper bound on `cols * rows` for any grid.
pub const MAX_CELLS: u64 = 1 << 30;

pub(crate) fn ensure_finite(z: ComplexPoint) -> Result<ComplexPoint> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Domain {
            what: "complex point",
            value: if z.re.is_finite() { z.im } else { z.re },
        })
    }
}

/// Cell `(col, row)` covers `origin + h·[col, col+1) × [row, row+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: ComplexPoint,
    pub spacing: f64,
    pub cols: usize,
    pub rows: usize,
}

impl GridSpec {
    pub fn new(origin: ComplexPoint, spacing: f64, cols: usize, rows: usize) -> Result<Self> {
        ensure_finite(origin)?;
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::param("spacing", "must be positive and finite"));
        }
        if cols == 0 || rows == 0 {
            return Err(Error::param("cols/rows", "must be at least 1"));
        }
        let cells = cols as u64 * rows as u64;
        if cells > MAX_CELLS {
            return Err(Error::GridTooLarge {
                cells,
                cap: MAX_CELLS,
            });
        }
        Ok(Self {
            origin,
            spacing,
            cols,
            rows,
        })
    }

    /// Smallest grid with the given spacing whose rectangle contains `[lo, hi]`.
    pub fn covering(lo: ComplexPoint, hi: ComplexPoint, spacing: f64) -> Result<Self> {
        let cols = (((hi.re - lo.re) / spacing).floor() as usize + 1).max(1);
        let rows = (((hi.im - lo.im) / spacing).floor() as usize + 1).max(1);
        Self::new(lo, spacing, cols, rows)
    }

    /// Grid of `2m × 2m` cells covering `[-m·h, m·h]²`, centred on the origin.
    pub fn centered(half_cells: usize, spacing: f64) -> Result<Self> {
        let half = half_cells as f64 * spacing;
        Self::new(
            ComplexPoint::new(-half, -half),
            spacing,
            2 * half_cells,
            2 * half_cells,
        )
    }

    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.cols + col
    }

    pub fn center(&self, col: usize, row: usize) -> ComplexPoint {
        self.origin
            + ComplexPoint::new(
                (col as f64 + 0.5) * self.spacing,
                (row as f64 + 0.5) * self.spacing,
            )
    }

    /// Continuous cell coordinates of `z` (cell `(c, r)` spans `[c, c+1) × [r, r+1)`).
    pub fn to_cell_coords(&self, z: ComplexPoint) -> (f64, f64) {
        let d = (z - self.origin) / self.spacing;
        (d.re, d.im)
    }

    pub fn cell_of(&self, z: ComplexPoint) -> Option<(usize, usize)> {
        let (x, y) = self.to_cell_coords(z);
        if x >= 0.0 && y >= 0.0 {
            let (c, r) = (x.floor() as usize, y.floor() as usize);
            if c < self.cols && r < self.rows {
                return Some((c, r));
            }
        }
        None
    }

    pub fn contains(&self, z: ComplexPoint) -> bool {
        self.cell_of(z).is_some()
    }
}

/// Row-major bit raster over a [`GridSpec`].
#[derive(Clone, PartialEq)]
pub struct GridMask {
    spec: GridSpec,
    words: Vec<u64>,
}

impl std::fmt::Debug for GridMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridMask")
            .field("spec", &self.spec)
            .field("count", &self.count())
            .finish()
    }
}

impl GridMask {
    pub fn empty(spec: GridSpec) -> Self {
        Self {
            spec,
            words: vec![0; spec.len().div_ceil(64)],
        }
    }

    pub fn full(spec: GridSpec) -> Self {
        let mut m = Self::empty(spec);
        for i in 0..spec.len() {
            m.set_index(i, true);
        }
        m
    }

    /// Mask from a predicate on `(col, row)`.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::empty(spec);
        for r in 0..spec.rows {
            for c in 0..spec.cols {
                if f(c, r) {
                    m.set(c, r, true);
                }
            }
        }
        m
    }

    /// Cells whose centres lie within `radius` of `center`.
    pub fn disc(spec: GridSpec, center: ComplexPoint, radius: f64) -> Self {
        Self::from_fn(spec, |c, r| (spec.center(c, r) - center).norm() <= radius)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn cols(&self) -> usize {
        self.spec.cols
    }

    pub fn rows(&self) -> usize {
        self.spec.rows
    }

    #[inline]
    pub fn get_index(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set_index(&mut self, i: usize, v: bool) {
        let bit = 1u64 << (i & 63);
        if v {
            self.words[i >> 6] |= bit;
        } else {
            self.words[i >> 6] &= !bit;
        }
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> bool {
        self.get_index(self.spec.index(col, row))
    }

    /// Like [`get`](Self::get) but `false` outside the grid.
    #[inline]
    pub fn get_signed(&self, col: i64, row: i64) -> bool {
        col >= 0
            && row >= 0
            && (col as usize) < self.spec.cols
            && (row as usize) < self.spec.rows
            && self.get(col as usize, row as usize)
    }

    #[inline]
    pub fn set(&mut self, col: usize, row: usize, v: bool) {
        let i = self.spec.index(col, row);
        self.set_index(i, v);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Row-major indices of set cells.
    pub fn iter_set(&self) -> impl Iterator<Item = usize> + '_ {
        let len = self.spec.len();
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
            .filter(move |&i| i < len)
        })
    }

    /// `(col, row)` of set cells in row-major order.
    pub fn iter_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.spec.cols;
        self.iter_set().map(move |i| (i % cols, i / cols))
    }

    pub fn union_with(&mut self, other: &GridMask) {
        assert_eq!(self.spec, other.spec, "union of masks on different grids");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersects(&self, other: &GridMask) -> bool {
        assert_eq!(self.spec, other.spec, "intersection of masks on different grids");
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// True when every set cell of `self` is set in `other`.
    pub fn is_subset_of(&self, other: &GridMask) -> bool {
        assert_eq!(self.spec, other.spec);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn from_words(spec: GridSpec, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), spec.len().div_ceil(64));
        Self { spec, words }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    LatticeWalk,
    DiffusionSample,
    Interface,
}

/// Nonempty sequence of plane points with step metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarPath {
    points: Vec<ComplexPoint>,
    kind: PathKind,
    time_step: f64,
}

impl PlanarPath {
    pub fn new(points: Vec<ComplexPoint>, kind: PathKind, time_step: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("points", "path must be nonempty"));
        }
        for &z in &points {
            ensure_finite(z)?;
        }
        if !(time_step >= 0.0) {
            return Err(Error::param("time_step", "must be nonnegative"));
        }
        if kind == PathKind::LatticeWalk {
            for w in points.windows(2) {
                if ((w[1] - w[0]).norm() - 1.0).abs() > 1e-9 {
                    return Err(Error::param("points", "lattice walk steps must have unit length"));
                }
            }
        }
        Ok(Self {
            points,
            kind,
            time_step,
        })
    }

    pub(crate) fn from_parts_unchecked(points: Vec<ComplexPoint>, kind: PathKind, time_step: f64) -> Self {
        debug_assert!(!points.is_empty());
        Self {
            points,
            kind,
            time_step,
        }
    }

    /// Lattice walk from integer sites.
    pub fn lattice(sites: &[(i64, i64)]) -> Result<Self> {
        let pts = sites
            .iter()
            .map(|&(x, y)| ComplexPoint::new(x as f64, y as f64))
            .collect();
        Self::new(pts, PathKind::LatticeWalk, 0.0)
    }

    pub fn points(&self) -> &[ComplexPoint] {
        &self.points
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn time_step(&self) -> f64 {
        self.time_step
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> ComplexPoint {
        self.points[0]
    }

    pub fn last(&self) -> ComplexPoint {
        *self.points.last().unwrap()
    }

    /// Integer sites of a lattice walk.
    pub fn sites(&self) -> Vec<(i64, i64)> {
        self.points
            .iter()
            .map(|z| (z.re.round() as i64, z.im.round() as i64))
            .collect()
    }

    /// Same points with every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> PlanarPath {
        PlanarPath {
            points: self.points.iter().map(|z| z * factor).collect(),
            kind: if factor == 1.0 { self.kind } else { PathKind::DiffusionSample },
            time_step: self.time_step * factor * factor,
        }
    }

    /// Lower-left and upper-right corners of the bounding box.
    pub fn bounding_box(&self) -> (ComplexPoint, ComplexPoint) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for z in &self.points {
            lo.re = lo.re.min(z.re);
            lo.im = lo.im.min(z.im);
            hi.re = hi.re.max(z.re);
            hi.im = hi.im.max(z.im);
        }
        (lo, hi)
    }

    /// CSV with columns `index,re,im`.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "index,re,im")?;
        for (i, z) in self.points.iter().enumerate() {
            writeln!(out, "{i},{},{}", z.re, z.im)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid(n: usize) -> GridSpec {
        GridSpec::new(ComplexPoint::new(0.0, 0.0), 1.0, n, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(ComplexPoint::new(0.0, 0.0), 0.0, 2, 2).is_err());
        assert!(GridSpec::new(ComplexPoint::new(0.0, 0.0), 1.0, 0, 2).is_err());
        assert!(matches!(
            GridSpec::new(ComplexPoint::new(0.0, 0.0), 1.0, 1 << 16, 1 << 16),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn cell_lookup_is_half_open() {
        let g = unit_grid(4);
        assert_eq!(g.cell_of(ComplexPoint::new(0.0, 0.0)), Some((0, 0)));
        assert_eq!(g.cell_of(ComplexPoint::new(3.999, 1.5)), Some((3, 1)));
        assert_eq!(g.cell_of(ComplexPoint::new(4.0, 1.5)), None);
        assert_eq!(g.cell_of(ComplexPoint::new(-0.001, 1.5)), None);
        assert_eq!(g.center(1, 2), ComplexPoint::new(1.5, 2.5));
    }

    #[test]
    fn mask_bit_ops() {
        let g = unit_grid(10);
        let mut m = GridMask::empty(g);
        m.set(3, 4, true);
        m.set(9, 9, true);
        assert!(m.get(3, 4));
        assert_eq!(m.count(), 2);
        assert_eq!(m.iter_cells().collect::<Vec<_>>(), vec![(3, 4), (9, 9)]);
        m.set(3, 4, false);
        assert_eq!(m.count(), 1);
        assert_eq!(GridMask::full(g).count(), 100);
        assert!(!m.get_signed(-1, 0));
    }

    #[test]
    fn lattice_path_requires_unit_steps() {
        assert!(PlanarPath::lattice(&[(0, 0), (1, 0), (1, 1)]).is_ok());
        assert!(PlanarPath::lattice(&[(0, 0), (2, 0)]).is_err());
        assert!(PlanarPath::new(vec![], PathKind::Interface, 0.0).is_err());
    }
}
