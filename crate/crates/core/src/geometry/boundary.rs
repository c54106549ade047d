use super::{fill_hull, largest_component, ComplexPoint, GridMask, PathKind, PlanarPath};

/// Outer contour of the largest component of a mask.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterBoundary {
    /// Midpoints of the contour's cell edges, counterclockwise, not repeated
    /// at the end. Empty for an empty mask.
    pub circuit: Vec<ComplexPoint>,
    /// Number of cell edges on the contour.
    pub perimeter: usize,
    /// 4-connected components found in the input.
    pub components: usize,
}

impl OuterBoundary {
    pub fn to_path(&self) -> Option<PlanarPath> {
        if self.circuit.is_empty() {
            None
        } else {
            Some(PlanarPath::from_parts_unchecked(
                self.circuit.clone(),
                PathKind::Interface,
                0.0,
            ))
        }
    }
}

const DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Traces the outer contour of `mask` counterclockwise along cell edges.
///
/// A disconnected mask is reduced to its largest component first, and any
/// holes are filled, so the contour is the boundary of the unbounded
/// complementary region.
pub fn outer_boundary(mask: &GridMask) -> OuterBoundary {
    let (component, components) = largest_component(mask);
    if components == 0 {
        return OuterBoundary {
            circuit: Vec::new(),
            perimeter: 0,
            components: 0,
        };
    }
    let hull = fill_hull(&component);
    let spec = *mask.spec();
    let (c0, r0) = hull.iter_cells().next().expect("nonempty hull");
    let inside = |c: i64, r: i64| hull.get_signed(c, r);

    // Vertex (x, y) is the lower-left corner of cell (x, y). Start on the
    // bottom edge of the lowest-leftmost cell, heading east with the hull on
    // the left.
    let start = (c0 as i64, r0 as i64);
    let mut v = start;
    let mut dir = 0usize;
    let mut circuit = Vec::new();
    let h = spec.spacing;
    loop {
        let (dx, dy) = DIRS[dir];
        let mid = ComplexPoint::new(v.0 as f64 + 0.5 * dx as f64, v.1 as f64 + 0.5 * dy as f64);
        circuit.push(spec.origin + mid * h);
        v = (v.0 + dx, v.1 + dy);
        if v == start && dir == 3 {
            break;
        }
        let (front_left, front_right) = front_cells(v, dir);
        dir = if !inside(front_left.0, front_left.1) {
            (dir + 1) % 4
        } else if !inside(front_right.0, front_right.1) {
            dir
        } else {
            (dir + 3) % 4
        };
        if v == start && dir == 0 {
            break;
        }
    }
    OuterBoundary {
        perimeter: circuit.len(),
        circuit,
        components,
    }
}

/// Cells ahead-left and ahead-right of vertex `v` when heading `dir`.
fn front_cells(v: (i64, i64), dir: usize) -> ((i64, i64), (i64, i64)) {
    let (x, y) = v;
    match dir {
        0 => ((x, y), (x, y - 1)),
        1 => ((x - 1, y), (x, y)),
        2 => ((x - 1, y - 1), (x - 1, y)),
        _ => ((x, y - 1), (x - 1, y - 1)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::GridSpec;
    use super::*;
    use proptest::prelude::*;

    fn mask_from(rows: &[&str]) -> GridMask {
        let spec = GridSpec::new(ComplexPoint::new(0.0, 0.0), 1.0, rows[0].len(), rows.len()).unwrap();
        GridMask::from_fn(spec, |c, r| rows[rows.len() - 1 - r].as_bytes()[c] == b'#')
    }

    #[test]
    fn single_cell_has_four_edges() {
        let b = outer_boundary(&mask_from(&["...", ".#.", "..."]));
        assert_eq!(b.perimeter, 4);
        assert_eq!(b.components, 1);
        assert_eq!(
            b.circuit,
            vec![
                ComplexPoint::new(1.5, 1.0),
                ComplexPoint::new(2.0, 1.5),
                ComplexPoint::new(1.5, 2.0),
                ComplexPoint::new(1.0, 1.5),
            ]
        );
    }

    #[test]
    fn block_and_tromino() {
        assert_eq!(outer_boundary(&mask_from(&["##", "##"])).perimeter, 8);
        // L-tromino: hand trace gives 2 + 1 + 1 + 1 + 1 + 2 = 8 edges.
        assert_eq!(outer_boundary(&mask_from(&["#.", "##"])).perimeter, 8);
    }

    #[test]
    fn ring_counts_outer_contour_only() {
        let b = outer_boundary(&mask_from(&["###", "#.#", "###"]));
        assert_eq!(b.perimeter, 12);
    }

    #[test]
    fn disconnected_mask_traces_largest() {
        let b = outer_boundary(&mask_from(&["##...", "##..#", "....."]));
        assert_eq!(b.components, 2);
        assert_eq!(b.perimeter, 8);
    }

    #[test]
    fn empty_mask_gives_empty_circuit() {
        let b = outer_boundary(&mask_from(&["..", ".."]));
        assert_eq!(b.perimeter, 0);
        assert!(b.to_path().is_none());
    }

    #[test]
    fn circuit_is_counterclockwise() {
        let b = outer_boundary(&mask_from(&["###.", "##..", "####"]));
        let pts = &b.circuit;
        let area2: f64 = (0..pts.len())
            .map(|i| {
                let (p, q) = (pts[i], pts[(i + 1) % pts.len()]);
                p.re * q.im - q.re * p.im
            })
            .sum();
        assert!(area2 > 0.0);
    }

    proptest! {
        #[test]
        fn rectangle_perimeter(a in 1usize..9, b in 1usize..9) {
            let spec = GridSpec::new(ComplexPoint::new(0.0, 0.0), 1.0, a + 2, b + 2).unwrap();
            let m = GridMask::from_fn(spec, |c, r| (1..=a).contains(&c) && (1..=b).contains(&r));
            prop_assert_eq!(outer_boundary(&m).perimeter, 2 * (a + b));
        }

        #[test]
        fn enclosing_a_cell_never_shrinks_perimeter(bits in proptest::collection::vec(any::<bool>(), 36)) {
            let spec = GridSpec::new(ComplexPoint::new(0.0, 0.0), 1.0, 6, 6).unwrap();
            let m = GridMask::from_fn(spec, |c, r| bits[r * 6 + c]);
            let hull = fill_hull(&m);
            let before = outer_boundary(&hull).perimeter;
            // Grow by one cell enclosed by the hull; the contour is unchanged.
            let mut grown = m.clone();
            let enclosed = hull.iter_cells().find(|&(c, r)| !m.get(c, r));
            if let Some((c, r)) = enclosed {
                grown.set(c, r, true);
                prop_assert!(outer_boundary(&fill_hull(&grown)).perimeter >= before);
            }
        }

        #[test]
        fn circuit_steps_are_half_edges(bits in proptest::collection::vec(any::<bool>(), 49)) {
            let spec = GridSpec::new(ComplexPoint::new(0.0, 0.0), 1.0, 7, 7).unwrap();
            let m = GridMask::from_fn(spec, |c, r| bits[r * 7 + c]);
            let b = outer_boundary(&m);
            let n = b.circuit.len();
            for i in 0..n {
                let d = (b.circuit[(i + 1) % n] - b.circuit[i]).norm();
                prop_assert!((d - 1.0).abs() < 1e-12 || (d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            }
        }
    }
}
