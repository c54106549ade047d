use super::GridMask;

/// Mask of unset cells reachable from the grid border through unset cells.
pub(crate) fn exterior(mask: &GridMask) -> GridMask {
    let spec = *mask.spec();
    let (cols, rows) = (spec.cols, spec.rows);
    let mut outside = GridMask::empty(spec);
    let mut stack: Vec<usize> = Vec::new();
    let push = |i: usize, outside: &mut GridMask, stack: &mut Vec<usize>| {
        if !mask.get_index(i) && !outside.get_index(i) {
            outside.set_index(i, true);
            stack.push(i);
        }
    };
    for c in 0..cols {
        push(spec.index(c, 0), &mut outside, &mut stack);
        push(spec.index(c, rows - 1), &mut outside, &mut stack);
    }
    for r in 0..rows {
        push(spec.index(0, r), &mut outside, &mut stack);
        push(spec.index(cols - 1, r), &mut outside, &mut stack);
    }
    while let Some(i) = stack.pop() {
        let (c, r) = (i % cols, i / cols);
        if c > 0 {
            push(i - 1, &mut outside, &mut stack);
        }
        if c + 1 < cols {
            push(i + 1, &mut outside, &mut stack);
        }
        if r > 0 {
            push(i - cols, &mut outside, &mut stack);
        }
        if r + 1 < rows {
            push(i + cols, &mut outside, &mut stack);
        }
    }
    outside
}

/// Complement of the unset region connected to the grid border.
///
/// Returns the input together with every cell that cannot reach the border by
/// 4-connected moves through unset cells. Idempotent and monotone.
pub fn fill_hull(mask: &GridMask) -> GridMask {
    let outside = exterior(mask);
    let words = outside.words().iter().map(|w| !w).collect();
    let mut hull = GridMask::from_words(*mask.spec(), words);
    // Clear the padding bits past the last cell.
    let len = mask.spec().len();
    for i in len..len.div_ceil(64) * 64 {
        hull.set_index(i, false);
    }
    hull
}

/// Labels of 4-connected components of set cells (0 = unset), and their sizes
/// indexed by `label - 1`.
pub(crate) fn label_components(mask: &GridMask) -> (Vec<u32>, Vec<usize>) {
    let spec = mask.spec();
    let cols = spec.cols;
    let mut labels = vec![0u32; spec.len()];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in mask.iter_set() {
        if labels[start] != 0 {
            continue;
        }
        let label = sizes.len() as u32 + 1;
        let mut size = 0usize;
        labels[start] = label;
        stack.push(start);
        while let Some(i) = stack.pop() {
            size += 1;
            let (c, r) = (i % cols, i / cols);
            let mut visit = |j: usize| {
                if mask.get_index(j) && labels[j] == 0 {
                    labels[j] = label;
                    stack.push(j);
                }
            };
            if c > 0 {
                visit(i - 1);
            }
            if c + 1 < cols {
                visit(i + 1);
            }
            if r > 0 {
                visit(i - cols);
            }
            if r + 1 < spec.rows {
                visit(i + cols);
            }
        }
        sizes.push(size);
    }
    (labels, sizes)
}

/// Number of 4-connected components of set cells.
pub fn component_count(mask: &GridMask) -> usize {
    label_components(mask).1.len()
}

/// The 4-connected component of largest area (ties: lowest first cell in
/// row-major order), and the total component count.
pub fn largest_component(mask: &GridMask) -> (GridMask, usize) {
    let (labels, sizes) = label_components(mask);
    let mut out = GridMask::empty(*mask.spec());
    if sizes.is_empty() {
        return (out, 0);
    }
    let mut best = 0;
    for (k, &s) in sizes.iter().enumerate() {
        if s > sizes[best] {
            best = k;
        }
    }
    let target = best as u32 + 1;
    for (i, &l) in labels.iter().enumerate() {
        if l == target {
            out.set_index(i, true);
        }
    }
    (out, sizes.len())
}

/// Set cells having a 4-neighbour outside the set (or outside the grid).
pub fn frontier(mask: &GridMask) -> GridMask {
    let spec = *mask.spec();
    let mut out = GridMask::empty(spec);
    for (c, r) in mask.iter_cells() {
        let (ci, ri) = (c as i64, r as i64);
        let edge = !mask.get_signed(ci - 1, ri)
            || !mask.get_signed(ci + 1, ri)
            || !mask.get_signed(ci, ri - 1)
            || !mask.get_signed(ci, ri + 1);
        if edge {
            out.set(c, r, true);
        }
    }
    out
}
