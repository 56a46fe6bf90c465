//! Planar primitives: points, rectangular regions, cell-centred grids and the
//! gridded density fields built on them.

use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A location in kilometres.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn distance_sq(&self, other: &Point2D) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn distance(&self, other: &Point2D) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn scaled(&self, k: f64) -> Point2D {
        Point2D::new(self.x * k, self.y * k)
    }
}

/// Axis-aligned rectangle `[x_min, x_max] × [y_min, y_max]` in km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRegion")]
pub struct Region {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

#[derive(Deserialize)]
struct RawRegion {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl TryFrom<RawRegion> for Region {
    type Error = crate::Error;

    fn try_from(r: RawRegion) -> Result<Self> {
        Region::new(r.x_min, r.x_max, r.y_min, r.y_max)
    }
}

impl Region {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_max <= x_min || y_max <= y_min {
            return Err(invalid(format!(
                "region [{x_min}, {x_max}] x [{y_min}, {y_max}] is empty or not finite"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max })
    }

    /// `[0, side] × [0, side]`.
    pub fn square(side: f64) -> Result<Self> {
        Self::new(0.0, side, 0.0, side)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn y_min(&self) -> f64 {
        self.y_min
    }
    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point2D {
        Point2D::new(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn contains_region(&self, other: &Region) -> bool {
        other.x_min >= self.x_min
            && other.x_max <= self.x_max
            && other.y_min >= self.y_min
            && other.y_max <= self.y_max
    }

    pub fn clamp(&self, p: Point2D) -> Point2D {
        Point2D::new(p.x.clamp(self.x_min, self.x_max), p.y.clamp(self.y_min, self.y_max))
    }

    /// Uniform draw on the rectangle.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2D {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        Point2D::new(self.x_min + u * self.width(), self.y_min + v * self.height())
    }

    /// The region shrunk by `margin` km on every side.
    pub fn shrink(&self, margin: f64) -> Result<Region> {
        Region::new(
            self.x_min + margin,
            self.x_max - margin,
            self.y_min + margin,
            self.y_max - margin,
        )
    }
}

/// A regular `nx × ny` grid over a region, addressed by cell centres.
/// Flat indices run with `ix` fastest: `iy * nx + ix`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub region: Region,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(region: Region, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(invalid(format!("grid dimensions {nx}x{ny} must be positive")));
        }
        Ok(Self { region, nx, ny })
    }

    /// Grid with at least `per_km` cells per kilometre along each axis.
    pub fn with_resolution(region: Region, per_km: f64) -> Result<Self> {
        if !(per_km > 0.0) || !per_km.is_finite() {
            return Err(invalid(format!("resolution {per_km} cells/km must be positive")));
        }
        let nx = (region.width() * per_km - 1e-9).ceil().max(1.0) as usize;
        let ny = (region.height() * per_km - 1e-9).ceil().max(1.0) as usize;
        Self::new(region, nx, ny)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.region.width() / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.region.height() / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    #[inline]
    pub fn center(&self, ix: usize, iy: usize) -> Point2D {
        Point2D::new(
            self.region.x_min() + (ix as f64 + 0.5) * self.dx(),
            self.region.y_min() + (iy as f64 + 0.5) * self.dy(),
        )
    }

    #[inline]
    pub fn center_of(&self, index: usize) -> Point2D {
        self.center(index % self.nx, index / self.nx)
    }

    pub fn centers(&self) -> impl Iterator<Item = Point2D> + '_ {
        (0..self.len()).map(move |i| self.center_of(i))
    }

    /// Cell containing `p`, clamped onto the grid.
    pub fn cell_of(&self, p: &Point2D) -> (usize, usize) {
        let fx = ((p.x - self.region.x_min()) / self.dx()).floor();
        let fy = ((p.y - self.region.y_min()) / self.dy()).floor();
        let ix = (fx.max(0.0) as usize).min(self.nx - 1);
        let iy = (fy.max(0.0) as usize).min(self.ny - 1);
        (ix, iy)
    }
}

/// A scalar field sampled at the cell centres of a grid (users per km²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FieldRow {
    x: f64,
    y: f64,
    value: f64,
}

impl DensityField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "field has {} values for a {}x{} grid",
                values.len(),
                grid.nx,
                grid.ny
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("field contains non-finite values"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(Point2D) -> f64) -> Self {
        let values = grid.centers().map(f).collect();
        Self { grid, values }
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        Self { grid, values: vec![value; grid.len()] }
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.nx + ix]
    }

    /// Midpoint-rule integral over the grid's region.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Flat index of the largest value (first on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best
    }

    /// Largest value whose cell centre lies inside `window`, with its centre.
    pub fn argmax_within(&self, window: &Region) -> Option<(Point2D, f64)> {
        let mut best: Option<(Point2D, f64)> = None;
        for (i, v) in self.values.iter().enumerate() {
            let c = self.grid.center_of(i);
            if window.contains(&c) && best.is_none_or(|(_, b)| *v > b) {
                best = Some((c, *v));
            }
        }
        best
    }

    pub fn scaled(&self, k: f64) -> DensityField {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * k).collect() }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| *v >= 0.0 && v.is_finite())
    }

    /// CSV rows `x,y,value`, one per cell centre.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for (i, value) in self.values.iter().enumerate() {
            let c = self.grid.center_of(i);
            w.serialize(FieldRow { x: c.x, y: c.y, value: *value })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a CSV written by [`DensityField::write_csv`] back onto `grid`.
    pub fn read_csv<R: Read>(grid: GridSpec, reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut values = Vec::with_capacity(grid.len());
        for (i, row) in r.deserialize::<FieldRow>().enumerate() {
            let row = row?;
            let c = grid.center_of(i.min(grid.len().saturating_sub(1)));
            let tol = 1e-9 * (1.0 + c.x.abs() + c.y.abs());
            if i >= grid.len() || (row.x - c.x).abs() > tol || (row.y - c.y).abs() > tol {
                return Err(invalid(format!("csv row {i} does not match the grid")));
            }
            values.push(row.value);
        }
        Self::new(grid, values)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: DensityField = serde_json::from_str(s)?;
        Self::new(raw.grid, raw.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_rejects_empty() {
        assert!(Region::new(1.0, 1.0, 0.0, 2.0).is_err());
        assert!(Region::new(0.0, 1.0, 3.0, 2.0).is_err());
        assert!(Region::new(0.0, f64::NAN, 0.0, 1.0).is_err());
        assert_eq!(Region::square(5.0).unwrap().area(), 25.0);
    }

    #[test]
    fn region_json_is_validated() {
        let bad = r#"{"x_min":0,"x_max":-1,"y_min":0,"y_max":1}"#;
        assert!(serde_json::from_str::<Region>(bad).is_err());
    }

    #[test]
    fn grid_cells_cover_region() {
        let g = GridSpec::with_resolution(Region::square(5.0).unwrap(), 100.0).unwrap();
        assert_eq!((g.nx, g.ny), (500, 500));
        assert!((g.cell_area() * g.len() as f64 - 25.0).abs() < 1e-9);
        assert_eq!(g.cell_of(&Point2D::new(5.0, 5.0)), (499, 499));
        assert_eq!(g.cell_of(&Point2D::new(0.0, 0.012)), (0, 1));
    }

    #[test]
    fn field_csv_round_trip() {
        let g = GridSpec::new(Region::new(1.0, 2.0, 0.0, 3.0).unwrap(), 4, 3).unwrap();
        let f = DensityField::from_fn(g, |p| p.x * 10.0 + p.y);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,y,value\n"));
        let back = DensityField::read_csv(g, buf.as_slice()).unwrap();
        assert_eq!(back, f);
        let json = f.to_json().unwrap();
        assert_eq!(DensityField::from_json(&json).unwrap(), f);
    }

    #[test]
    fn argmax_within_window() {
        let g = GridSpec::new(Region::square(4.0).unwrap(), 4, 4).unwrap();
        let f = DensityField::from_fn(g, |p| p.x + p.y);
        assert_eq!(f.argmax(), 15);
        let w = Region::new(0.0, 2.0, 0.0, 2.0).unwrap();
        let (c, v) = f.argmax_within(&w).unwrap();
        assert_eq!(c, Point2D::new(1.5, 1.5));
        assert_eq!(v, 3.0);
    }
}
