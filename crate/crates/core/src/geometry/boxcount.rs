use super::GridMask;
use crate::error::{Error, Result};
use crate::stats::linear_fit;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxDimension {
    /// Least-squares slope of `ln N(s)` against `ln(1/s)`.
    pub slope: f64,
    pub stderr: f64,
    /// `(box size in cells, occupied boxes)` for every usable scale.
    pub counts: Vec<(usize, usize)>,
}

/// Box-counting dimension estimate of the set cells.
///
/// Scales are box side lengths in cells. A scale is usable when at least four
/// boxes fit along each side of the grid. An empty mask returns slope 0.
pub fn box_counting_dimension(mask: &GridMask, scales: &[usize]) -> Result<BoxDimension> {
    let (cols, rows) = (mask.cols(), mask.rows());
    let mut usable: Vec<usize> = scales
        .iter()
        .copied()
        .filter(|&s| s >= 1 && cols / s >= 4 && rows / s >= 4)
        .collect();
    usable.sort_unstable();
    usable.dedup();
    if usable.len() < 3 {
        return Err(Error::TooFewScales {
            usable: usable.len(),
        });
    }
    if mask.is_empty() {
        return Ok(BoxDimension {
            slope: 0.0,
            stderr: 0.0,
            counts: usable.iter().map(|&s| (s, 0)).collect(),
        });
    }
    let set: Vec<(usize, usize)> = mask.iter_cells().collect();
    let counts: Vec<(usize, usize)> = usable
        .iter()
        .map(|&s| {
            let bc = cols.div_ceil(s);
            let mut seen = vec![false; bc * rows.div_ceil(s)];
            let mut n = 0;
            for &(c, r) in &set {
                let k = (r / s) * bc + c / s;
                if !seen[k] {
                    seen[k] = true;
                    n += 1;
                }
            }
            (s, n)
        })
        .collect();
    let xs: Vec<f64> = counts.iter().map(|&(s, _)| -(s as f64).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&(_, n)| (n as f64).ln()).collect();
    let fit = linear_fit(&xs, &ys, None);
    Ok(BoxDimension {
        slope: fit.slope,
        stderr: fit.slope_stderr,
        counts,
    })
}
