use super::{ComplexPoint, GridMask, GridSpec, PlanarPath};
use crate::error::{Error, Result};

/// Rasterizes a path as the 4-connected chain of cells met by its segments.
///
/// Each segment is walked cell by cell (grid traversal in the style of
/// Amanatides and Woo). When a segment passes exactly through a cell corner the
/// horizontal neighbour is visited first, so consecutive cells always share an
/// edge. Every cell whose centre lies within `spacing / 2` of the path is met.
pub fn rasterize_path(path: &PlanarPath, spec: GridSpec) -> Result<GridMask> {
    for &z in path.points() {
        if !spec.contains(z) {
            return Err(Error::OutOfBounds { re: z.re, im: z.im });
        }
    }
    let mut mask = GridMask::empty(spec);
    draw_polyline(&mut mask, path.points());
    Ok(mask)
}

/// Draws the polyline into `mask`; every point must lie in the grid.
pub(crate) fn draw_polyline(mask: &mut GridMask, points: &[ComplexPoint]) {
    let spec = *mask.spec();
    let mut prev = spec.to_cell_coords(points[0]);
    set_cell(mask, prev);
    for &z in &points[1..] {
        let next = spec.to_cell_coords(z);
        draw_segment(mask, prev, next);
        prev = next;
    }
}

fn set_cell(mask: &mut GridMask, p: (f64, f64)) {
    let c = (p.0.floor() as usize).min(mask.cols() - 1);
    let r = (p.1.floor() as usize).min(mask.rows() - 1);
    mask.set(c, r, true);
}

fn draw_segment(mask: &mut GridMask, a: (f64, f64), b: (f64, f64)) {
    let (cols, rows) = (mask.cols() as i64, mask.rows() as i64);
    let mut cx = (a.0.floor() as i64).min(cols - 1);
    let mut cy = (a.1.floor() as i64).min(rows - 1);
    let ex = (b.0.floor() as i64).min(cols - 1);
    let ey = (b.1.floor() as i64).min(rows - 1);
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;
    let step_x: i64 = if ex > cx { 1 } else { -1 };
    let step_y: i64 = if ey > cy { 1 } else { -1 };
    // Parameter along the segment at which the next vertical / horizontal
    // cell boundary is crossed.
    let mut t_max_x = if dx == 0.0 || ex == cx {
        f64::INFINITY
    } else {
        let boundary = if step_x > 0 { (cx + 1) as f64 } else { cx as f64 };
        (boundary - a.0) / dx
    };
    let mut t_max_y = if dy == 0.0 || ey == cy {
        f64::INFINITY
    } else {
        let boundary = if step_y > 0 { (cy + 1) as f64 } else { cy as f64 };
        (boundary - a.1) / dy
    };
    let t_delta_x = if dx == 0.0 { f64::INFINITY } else { (1.0 / dx).abs() };
    let t_delta_y = if dy == 0.0 { f64::INFINITY } else { (1.0 / dy).abs() };

    let mut remaining_x = (ex - cx).abs();
    let mut remaining_y = (ey - cy).abs();
    mask.set(cx as usize, cy as usize, true);
    while remaining_x > 0 || remaining_y > 0 {
        let take_x = remaining_y == 0 || (remaining_x > 0 && t_max_x <= t_max_y);
        if take_x {
            cx += step_x;
            t_max_x += t_delta_x;
            remaining_x -= 1;
        } else {
            cy += step_y;
            t_max_y += t_delta_y;
            remaining_y -= 1;
        }
        mask.set(cx as usize, cy as usize, true);
    }
}
