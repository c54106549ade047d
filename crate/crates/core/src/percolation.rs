//! Bond percolation on finite pieces of the square lattice.
//!
//! A configuration on a `cols × rows` block of vertices stores one bit per
//! horizontal edge `(x, y)–(x+1, y)` and per vertical edge `(x, y)–(x, y+1)`.
//! Edges are opened by comparing a 32-bit uniform with `round(p·2³²)`, always
//! in the same order, so configurations at different `p` drawn from the same
//! stream are coupled monotonically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{fill_hull, outer_boundary, ComplexPoint, GridMask, GridSpec};
use crate::par;
use crate::rng::{Rng, RngStream};
use crate::stats::BinomialEstimate;

/// Open/closed state of every edge of a rectangular block of vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BondConfig {
    pub cols: usize,
    pub rows: usize,
    /// `(cols − 1) × rows`, row-major.
    pub h_open: Vec<bool>,
    /// `cols × (rows − 1)`, row-major.
    pub v_open: Vec<bool>,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Crossing {
    LeftRight,
    TopBottom,
}

fn threshold(p: f64) -> u64 {
    (p * 4_294_967_296.0).round() as u64
}

impl BondConfig {
    /// All edges closed.
    pub fn closed(cols: usize, rows: usize) -> Result<Self> {
        if cols == 0 || rows == 0 {
            return Err(Error::param("cols/rows", "need at least one vertex"));
        }
        Ok(Self {
            cols,
            rows,
            h_open: vec![false; (cols - 1) * rows],
            v_open: vec![false; cols * (rows - 1)],
            p: 0.0,
        })
    }

    /// All edges open.
    pub fn open(cols: usize, rows: usize) -> Result<Self> {
        let mut c = Self::closed(cols, rows)?;
        c.h_open.fill(true);
        c.v_open.fill(true);
        c.p = 1.0;
        Ok(c)
    }

    #[inline]
    pub fn h(&self, x: usize, y: usize) -> bool {
        self.h_open[y * (self.cols - 1) + x]
    }

    #[inline]
    pub fn v(&self, x: usize, y: usize) -> bool {
        self.v_open[y * self.cols + x]
    }

    pub fn set_h(&mut self, x: usize, y: usize, open: bool) {
        self.h_open[y * (self.cols - 1) + x] = open;
    }

    pub fn set_v(&mut self, x: usize, y: usize, open: bool) {
        self.v_open[y * self.cols + x] = open;
    }

    pub fn edge_count(&self) -> usize {
        self.h_open.len() + self.v_open.len()
    }

    pub fn open_count(&self) -> usize {
        self.h_open.iter().chain(&self.v_open).filter(|&&b| b).count()
    }

    /// Whether the edge from vertex `(x, y)` in direction `d` (0 E, 1 N, 2 W,
    /// 3 S) exists and is open.
    pub fn open_towards(&self, x: i64, y: i64, d: u8) -> bool {
        let (c, r) = (self.cols as i64, self.rows as i64);
        if x < 0 || y < 0 || x >= c || y >= r {
            return false;
        }
        match d {
            0 => x + 1 < c && self.h(x as usize, y as usize),
            1 => y + 1 < r && self.v(x as usize, y as usize),
            2 => x > 0 && self.h(x as usize - 1, y as usize),
            _ => y > 0 && self.v(x as usize, y as usize - 1),
        }
    }

    /// The dual configuration. For a primal block of `cols × rows` vertices the
    /// dual block has `(cols + 1) × (rows − 1)` vertices at the face centres
    /// (extended by one column on each side); a dual edge is open iff the
    /// primal edge it crosses is closed. Dual vertical edges in the two outer
    /// columns cross no primal edge and are left closed.
    ///
    /// A top-bottom open crossing of the primal block exists iff no
    /// left-right open crossing of the dual exists.
    pub fn dual(&self) -> Result<BondConfig> {
        if self.rows < 2 {
            return Err(Error::param("rows", "need at least two rows for a dual"));
        }
        let (dc, dr) = (self.cols + 1, self.rows - 1);
        let mut d = BondConfig::closed(dc, dr)?;
        d.p = 1.0 - self.p;
        // Dual (X, Y) sits at (X − ½, Y + ½).
        for y in 0..dr {
            for x in 0..self.cols {
                d.set_h(x, y, !self.v(x, y));
            }
        }
        for y in 0..dr.saturating_sub(1) {
            for x in 1..self.cols {
                d.set_v(x, y, !self.h(x - 1, y + 1));
            }
        }
        Ok(d)
    }
}

/// I.i.d. Bernoulli(p) edges: horizontal edges row by row, then vertical ones.
pub fn sample_bonds(cols: usize, rows: usize, p: f64, rng: &mut Rng) -> Result<BondConfig> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain { what: "p", value: p });
    }
    let mut c = BondConfig::closed(cols, rows)?;
    fill_bonds(&mut c, p, rng);
    Ok(c)
}

fn fill_bonds(c: &mut BondConfig, p: f64, rng: &mut Rng) {
    use rand::RngCore;
    let t = threshold(p);
    for e in c.h_open.iter_mut().chain(c.v_open.iter_mut()) {
        *e = (rng.next_u32() as u64) < t;
    }
    c.p = p;
}

/// Disjoint sets over `0..n` with path halving and union by size.
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    #[inline]
    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let g = self.parent[self.parent[x] as usize];
            self.parent[x] = g;
            x = g as usize;
        }
        x
    }

    #[inline]
    pub fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u32;
        self.size[a] += self.size[b];
    }

    pub fn size_of(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }
}

fn cluster_sets(c: &BondConfig, extra: usize) -> UnionFind {
    let mut uf = UnionFind::new(c.cols * c.rows + extra);
    for y in 0..c.rows {
        for x in 0..c.cols - 1 {
            if c.h(x, y) {
                uf.union(y * c.cols + x, y * c.cols + x + 1);
            }
        }
    }
    for y in 0..c.rows - 1 {
        for x in 0..c.cols {
            if c.v(x, y) {
                uf.union(y * c.cols + x, (y + 1) * c.cols + x);
            }
        }
    }
    uf
}

/// Whether an open path joins the two chosen sides of the block; decided by
/// union-find with one virtual terminal per side.
pub fn crossing_exists(c: &BondConfig, dir: Crossing) -> bool {
    let n = c.cols * c.rows;
    let (s, t) = (n, n + 1);
    let mut uf = cluster_sets(c, 2);
    match dir {
        Crossing::LeftRight => {
            for y in 0..c.rows {
                uf.union(s, y * c.cols);
                uf.union(t, y * c.cols + c.cols - 1);
            }
        }
        Crossing::TopBottom => {
            for x in 0..c.cols {
                uf.union(s, x);
                uf.union(t, (c.rows - 1) * c.cols + x);
            }
        }
    }
    uf.find(s) == uf.find(t)
}

/// Aspect of a rectangle, `width × height` in units of the scale `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectangleShape {
    pub width: f64,
    pub height: f64,
}

/// Left-right crossing probability of `[0, ⌊width·n⌋] × [0, ⌊height·n⌋]`.
pub fn crossing_probability_mc(shape: RectangleShape, n: usize, p: f64, trials: u64, rng: RngStream) -> Result<BinomialEstimate> {
    let a = (shape.width * n as f64).floor();
    let b = (shape.height * n as f64).floor();
    if !(a >= 1.0 && b >= 1.0) {
        return Err(Error::param("shape", "rectangle must be at least one edge wide and tall"));
    }
    block_crossing_mc(a as usize + 1, b as usize + 1, Crossing::LeftRight, p, trials, rng)
}

/// Crossing probability of a `cols × rows` vertex block; trial `k` uses
/// `rng.derive(k)`.
pub fn block_crossing_mc(cols: usize, rows: usize, dir: Crossing, p: f64, trials: u64, rng: RngStream) -> Result<BinomialEstimate> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    BondConfig::closed(cols, rows)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain { what: "p", value: p });
    }
    let hits = par::count_trials(trials as usize, |k| {
        let c = sample_bonds(cols, rows, p, &mut rng.derive(k as u64).rng()).expect("validated");
        crossing_by_search(&c, dir)
    });
    Ok(BinomialEstimate::new(hits, trials))
}

/// Same answer as [`crossing_exists`], by depth-first search from the first
/// side that stops as soon as the second side is reached. Near criticality
/// it touches only the clusters of the first side, which makes it the faster
/// choice for Monte Carlo.
pub fn crossing_by_search(c: &BondConfig, dir: Crossing) -> bool {
    let (cols, rows) = (c.cols, c.rows);
    let mut seen = vec![false; cols * rows];
    let mut stack: Vec<u32> = Vec::with_capacity(cols + rows);
    let starts: Box<dyn Iterator<Item = usize>> = match dir {
        Crossing::LeftRight => Box::new((0..rows).map(|y| y * cols)),
        Crossing::TopBottom => Box::new(0..cols),
    };
    for i in starts {
        seen[i] = true;
        stack.push(i as u32);
    }
    while let Some(i) = stack.pop() {
        let i = i as usize;
        let (x, y) = (i % cols, i / cols);
        let done = match dir {
            Crossing::LeftRight => x + 1 == cols,
            Crossing::TopBottom => y + 1 == rows,
        };
        if done {
            return true;
        }
        let mut visit = |j: usize, open: bool| {
            if open && !seen[j] {
                seen[j] = true;
                stack.push(j as u32);
            }
        };
        if x + 1 < cols {
            visit(i + 1, c.h(x, y));
        }
        if x > 0 {
            visit(i - 1, c.h(x - 1, y));
        }
        if y + 1 < rows {
            visit(i + cols, c.v(x, y));
        }
        if y > 0 {
            visit(i - cols, c.v(x, y - 1));
        }
    }
    false
}

/// Largest open cluster (by bounding-box diagonal) and its hull boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterBoundary {
    /// Filled hull of the cluster on the doubled raster.
    pub mask: GridMask,
    /// Edges of the hull's outer boundary on the doubled raster.
    pub perimeter: usize,
    pub vertices: usize,
}

/// Finds the open cluster with the largest bounding-box diagonal (ties: more
/// vertices, then smaller root index) and measures its hull boundary.
///
/// The cluster is drawn on a doubled raster: vertex `(x, y)` is cell
/// `(2x, 2y)` and an open edge is the cell between its endpoints. A closed
/// edge between two cluster vertices stays an empty cell, so fjords that the
/// dual lattice can enter remain open to the outside.
pub fn largest_cluster_boundary(c: &BondConfig) -> Result<ClusterBoundary> {
    if c.open_count() == 0 {
        return Err(Error::EmptyConfiguration);
    }
    let n = c.cols * c.rows;
    let mut uf = cluster_sets(c, 0);
    // (min x, max x, min y, max y) per root.
    let mut bbox = vec![(usize::MAX, 0usize, usize::MAX, 0usize); n];
    for i in 0..n {
        let r = uf.find(i);
        let (x, y) = (i % c.cols, i / c.cols);
        let b = &mut bbox[r];
        *b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
    }
    let mut best: Option<(usize, usize, usize)> = None; // (diag², size, root)
    for (r, &b) in bbox.iter().enumerate() {
        if uf.find(r) != r || uf.size_of(r) < 2 {
            continue;
        }
        let (dx, dy) = (b.1 - b.0, b.3 - b.2);
        let key = (dx * dx + dy * dy, uf.size_of(r), r);
        let better = match best {
            None => true,
            Some(k) => (key.0, key.1) > (k.0, k.1),
        };
        if better {
            best = Some(key);
        }
    }
    let (_, size, root) = best.expect("an open edge makes a cluster of two");
    let spec = GridSpec::new(ComplexPoint::new(-0.25, -0.25), 0.5, 2 * c.cols - 1, 2 * c.rows - 1)?;
    let mut mask = GridMask::empty(spec);
    for i in 0..n {
        if uf.find(i) == root {
            let (x, y) = (i % c.cols, i / c.cols);
            mask.set(2 * x, 2 * y, true);
            if x + 1 < c.cols && c.h(x, y) {
                mask.set(2 * x + 1, 2 * y, true);
            }
            if y + 1 < c.rows && c.v(x, y) {
                mask.set(2 * x, 2 * y + 1, true);
            }
        }
    }
    let hull = fill_hull(&mask);
    let perimeter = outer_boundary(&hull).perimeter;
    Ok(ClusterBoundary {
        mask: hull,
        perimeter,
        vertices: size,
    })
}

/// Turn taken at each step of an exploration path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Turn {
    Left,
    Right,
    Straight,
}

/// How an exploration ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplorationExit {
    /// Reached the top row of the slab at this abscissa (lattice units).
    Top(f64),
    /// Reached the left or right column of the slab.
    Side(f64),
    MaxSteps,
}

/// Interface path between the open cluster of the negative half-line and the
/// dual cluster of the positive half-line.
///
/// Vertices lie on the quarter-offset lattice `v + (±¼, ±¼)` around primal
/// vertices `v`, stored in units of ¼ (so every coordinate is odd) relative
/// to the origin vertex. Consecutive vertices are `2` apart (half a lattice
/// spacing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationPath {
    pub vertices: Vec<(i64, i64)>,
    /// Turn at each primal vertex; a U-turn at a dead end counts as two left turns.
    pub turns: Vec<Turn>,
    pub exit: ExplorationExit,
    /// Primal vertices visited, with the direction of arrival.
    pub primal: Vec<((i64, i64), u8)>,
}

impl ExplorationPath {
    /// Vertices in lattice units.
    pub fn points(&self) -> Vec<ComplexPoint> {
        self.vertices
            .iter()
            .map(|&(x, y)| ComplexPoint::new(x as f64 / 4.0, y as f64 / 4.0))
            .collect()
    }
}

const DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Half-plane slab: vertices `x ∈ [−half_width, half_width]`, `y ∈ [0, height]`
/// with i.i.d. Bernoulli(p) edges, except that the boundary edges `[x, x+1]`
/// on the bottom row are open for `x < 0` and closed for `x ≥ 0`.
pub fn half_plane_config(half_width: usize, height: usize, p: f64, rng: &mut Rng) -> Result<BondConfig> {
    if half_width == 0 || height == 0 {
        return Err(Error::param("half_width/height", "must be positive"));
    }
    let mut c = sample_bonds(2 * half_width + 1, height + 1, p, rng)?;
    force_half_plane_boundary(&mut c, half_width);
    Ok(c)
}

/// Applies the mixed boundary condition to the bottom row of a slab whose
/// origin is column `origin_col`.
pub fn force_half_plane_boundary(c: &mut BondConfig, origin_col: usize) {
    for x in 0..c.cols - 1 {
        c.set_h(x, 0, x < origin_col);
    }
}

/// Left-most exploration of a slab configuration from the origin vertex
/// (column `origin_col` of the bottom row).
///
/// The path keeps the open cluster of the negative half-line on its left at
/// distance ¼. At each primal vertex the walker, arriving with heading `h`,
/// leaves along the first open edge among: right turn, straight, left turn,
/// back. It starts at the origin as if it had arrived heading north, with
/// first vertex `(¼, −¼)`. It stops when it reaches a vertex of the top row
/// or of the outer columns, or after `max_steps` path steps.
pub fn exploration_process(c: &BondConfig, origin_col: usize, max_steps: usize) -> Result<ExplorationPath> {
    if max_steps == 0 {
        return Err(Error::param("max_steps", "must be at least 1"));
    }
    if origin_col == 0 || origin_col + 1 >= c.cols || c.rows < 2 {
        return Err(Error::param("origin_col", "origin must be an interior column of a slab"));
    }
    let ox = origin_col as i64;
    let right = |h: u8| (h + 3) % 4;
    let left = |h: u8| (h + 1) % 4;
    let corner = |v: (i64, i64), a: u8, b: u8| {
        let (a, b) = (DIRS[a as usize], DIRS[b as usize]);
        (4 * v.0 + a.0 + b.0, 4 * v.1 + a.1 + b.1)
    };
    let mut v = (0i64, 0i64);
    let mut h = 1u8;
    let mut vertices = vec![corner(v, 3, 0)];
    let mut turns = Vec::new();
    let mut primal = vec![(v, h)];
    let top = c.rows as i64 - 1;
    let (xmin, xmax) = (-ox, c.cols as i64 - 1 - ox);
    loop {
        let choices = [right(h), h, left(h), (h + 2) % 4];
        let d = *choices
            .iter()
            .find(|&&d| c.open_towards(v.0 + ox, v.1, d))
            .ok_or_else(|| Error::param("config", "origin vertex is isolated"))?;
        // Corners passed while going around v from the arrival side to the departure side.
        let back = (h + 2) % 4;
        let around: &[(u8, u8)] = match (d + 4 - h) % 4 {
            3 => &[],
            0 => &[(h, right(h))],
            1 => &[(h, right(h)), (h, left(h))],
            _ => &[(h, right(h)), (h, left(h)), (back, left(h))],
        };
        vertices.extend(around.iter().map(|&(a, b)| corner(v, a, b)));
        match (d + 4 - h) % 4 {
            3 => turns.push(Turn::Right),
            0 => turns.push(Turn::Straight),
            1 => turns.push(Turn::Left),
            _ => turns.extend([Turn::Left, Turn::Left]),
        }
        let w = (v.0 + DIRS[d as usize].0, v.1 + DIRS[d as usize].1);
        let end = (4 * w.0 - DIRS[d as usize].0 + DIRS[right(d) as usize].0, 4 * w.1 - DIRS[d as usize].1 + DIRS[right(d) as usize].1);
        vertices.push(end);
        v = w;
        h = d;
        primal.push((v, h));
        let exit = if v.1 == top {
            Some(ExplorationExit::Top(v.0 as f64))
        } else if v.0 == xmin || v.0 == xmax {
            Some(ExplorationExit::Side(v.0 as f64))
        } else if vertices.len() > max_steps {
            Some(ExplorationExit::MaxSteps)
        } else {
            None
        };
        if let Some(exit) = exit {
            return Ok(ExplorationPath {
                vertices,
                turns,
                exit,
                primal,
            });
        }
    }
}

/// Vertices of a square-lattice approximation of the equilateral triangle
/// with `A = 0`, `B = side·e^{2πi/3}`, `C = side·e^{πi/3}`.
#[derive(Debug, Clone)]
pub struct TriangleRegion {
    pub side: usize,
    /// Number of rows `Y + 1`, with `Y = ⌊side·√3/2⌋`.
    pub rows: usize,
    /// Vertices of row `y` are `x ∈ [−half[y], half[y]]`, `half[y] = ⌊y/√3⌋`.
    pub half: Vec<i64>,
}

impl TriangleRegion {
    pub fn new(side: usize) -> Result<Self> {
        if side < 8 {
            return Err(Error::param("side", "must be at least 8"));
        }
        let top = (side as f64 * 3f64.sqrt() / 2.0).floor() as usize;
        let half = (0..=top).map(|y| (y as f64 / 3f64.sqrt()).floor() as i64).collect();
        Ok(Self { side, rows: top + 1, half })
    }

    fn width(&self) -> usize {
        2 * self.half[self.rows - 1] as usize + 1
    }
}

/// Normalized position along `[B, C]` (0 at `B`) of the left-most vertex of the
/// top row connected to the right side `[A, C]`, for one configuration.
///
/// Edges are sampled on the bounding block of the region and those with an
/// endpoint outside it are ignored. The right side is the set of right-most
/// vertices of each row; it contains the top-right vertex, so every
/// configuration has an endpoint.
pub fn triangle_endpoint(region: &TriangleRegion, p: f64, rng: &mut Rng) -> Result<f64> {
    let w = region.width();
    let hw = region.half[region.rows - 1];
    let mut c = sample_bonds(w, region.rows, p, rng)?;
    let inside = |x: usize, y: usize| ((x as i64) - hw).abs() <= region.half[y];
    for y in 0..region.rows {
        for x in 0..w {
            if !inside(x, y) {
                if x + 1 < w {
                    c.set_h(x, y, false);
                }
                if x > 0 {
                    c.set_h(x - 1, y, false);
                }
                if y + 1 < region.rows {
                    c.set_v(x, y, false);
                }
                if y > 0 {
                    c.set_v(x, y - 1, false);
                }
            }
        }
    }
    let n = w * region.rows;
    let mut uf = cluster_sets(&c, 1);
    for y in 0..region.rows {
        uf.union(n, y * w + (hw + region.half[y]) as usize);
    }
    let top = region.rows - 1;
    let target = uf.find(n);
    let x = (0..w)
        .find(|&x| uf.find(top * w + x) == target)
        .expect("top-right vertex is on both sides");
    Ok(x as f64 / (w - 1) as f64)
}

/// Endpoint positions of `trials` independent configurations, sorted
/// (the empirical CDF's jump points).
pub fn triangle_endpoint_mc(side: usize, p: f64, trials: u64, rng: RngStream) -> Result<Vec<f64>> {
    let region = TriangleRegion::new(side)?;
    let mut xs = par::map_trials(trials as usize, |k| triangle_endpoint(&region, p, &mut rng.derive(k as u64).rng()))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}
