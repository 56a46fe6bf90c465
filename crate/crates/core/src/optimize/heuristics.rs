//! Non-optimizing placements: the busiest eRRH, the density hotspot and a
//! uniform random location, all restricted to the evaluation window.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{DensityField, Point2D, Region};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicPlacements {
    pub busiest_index: usize,
    pub busiest: Point2D,
    pub hotspot: Point2D,
    pub random: Point2D,
}

/// The most loaded eRRH inside `window` (lowest index on ties); when no eRRH
/// lies in the window, the most loaded overall, clamped onto it.
pub fn busiest_errh(errhs: &[Point2D], loads: &[usize], window: &Region) -> Result<(usize, Point2D)> {
    if errhs.is_empty() || errhs.len() != loads.len() {
        return Err(invalid("busiest eRRH needs matching non-empty locations and loads"));
    }
    let pick = |inside_only: bool| {
        let mut best: Option<usize> = None;
        for (i, e) in errhs.iter().enumerate() {
            if inside_only && !window.contains(e) {
                continue;
            }
            if best.is_none_or(|b| loads[i] > loads[b]) {
                best = Some(i);
            }
        }
        best
    };
    let i = pick(true).or_else(|| pick(false)).expect("non-empty");
    Ok((i, window.clamp(errhs[i])))
}

/// Peak cell centre of `density` inside `window`.
pub fn hotspot(density: &DensityField, window: &Region) -> Point2D {
    match density.argmax_within(window) {
        Some((p, _)) => p,
        None => window.clamp(density.grid.center_of(density.argmax())),
    }
}

pub fn heuristic_placements<R: Rng + ?Sized>(
    errhs: &[Point2D],
    loads: &[usize],
    density_estimate: &DensityField,
    window: &Region,
    rng: &mut R,
) -> Result<HeuristicPlacements> {
    let (busiest_index, busiest) = busiest_errh(errhs, loads, window)?;
    Ok(HeuristicPlacements {
        busiest_index,
        busiest,
        hotspot: hotspot(density_estimate, window),
        random: window.sample_uniform(rng),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridSpec;
    use crate::rng::seeded;

    fn window() -> Region {
        Region::new(1.0, 4.0, 1.0, 4.0).unwrap()
    }

    #[test]
    fn busiest_is_argmax_load() {
        let errhs = [Point2D::new(1.5, 1.5), Point2D::new(2.5, 2.5), Point2D::new(3.5, 3.5)];
        assert_eq!(busiest_errh(&errhs, &[3, 9, 1], &window()).unwrap().0, 1);
        assert_eq!(busiest_errh(&errhs, &[9, 9, 1], &window()).unwrap().0, 0);
        // The heavier eRRH outside the window is skipped.
        let errhs = [Point2D::new(0.2, 0.2), Point2D::new(2.5, 2.5)];
        assert_eq!(busiest_errh(&errhs, &[50, 9], &window()).unwrap().0, 1);
        let errhs = [Point2D::new(0.2, 0.2), Point2D::new(4.8, 2.5)];
        let (i, p) = busiest_errh(&errhs, &[50, 9], &window()).unwrap();
        assert_eq!((i, p), (0, Point2D::new(1.0, 1.0)));
        assert!(busiest_errh(&errhs, &[1], &window()).is_err());
    }

    #[test]
    fn hotspot_and_random() {
        let g = GridSpec::new(Region::square(5.0).unwrap(), 50, 50).unwrap();
        let head = Point2D::new(3.12, 1.87);
        let d = DensityField::from_fn(g, |p| (-p.distance_sq(&head) / 0.4).exp());
        let h = hotspot(&d, &window());
        assert!((h.x - head.x).abs() <= g.dx() && (h.y - head.y).abs() <= g.dy());
        let a = heuristic_placements(&[head], &[1], &d, &window(), &mut seeded(4)).unwrap();
        let b = heuristic_placements(&[head], &[1], &d, &window(), &mut seeded(4)).unwrap();
        assert_eq!(a, b);
        assert!(window().contains(&a.random));
    }
}
