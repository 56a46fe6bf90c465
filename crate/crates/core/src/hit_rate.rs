//! Expected number of users covered by the SH: the midpoint-rule integral of
//! the coverage factor `Π_r 1/(1 + γ̄ (d_S/d_r)^α)` against a density field.
//!
//! [`CoverageObjective`] precomputes, for every occupied quadrature cell, the
//! interferer terms `d_r^(-α)` sorted in decreasing order. Each factor of the
//! product lies in `(0, 1]`, so once the running denominator passes
//! [`DENOMINATOR_CUTOFF`] the remaining terms can change the cell's
//! contribution by less than `mass / DENOMINATOR_CUTOFF` and are skipped.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ChannelParams;
use crate::error::{invalid, Result};
use crate::geometry::{DensityField, GridSpec, Point2D, Region};

pub const DENOMINATOR_CUTOFF: f64 = 1e15;

#[derive(Debug, Clone, Copy)]
enum PathLossPower {
    Cube,
    Square,
    Quartic,
    General(f64),
}

impl PathLossPower {
    fn new(alpha: f64) -> Self {
        match alpha {
            3.0 => Self::Cube,
            2.0 => Self::Square,
            4.0 => Self::Quartic,
            a => Self::General(0.5 * a),
        }
    }

    /// `d^α` from `d²`.
    #[inline]
    fn pow_from_sq(self, d2: f64) -> f64 {
        match self {
            Self::Cube => d2 * d2.sqrt(),
            Self::Square => d2,
            Self::Quartic => d2 * d2,
            Self::General(half) => d2.powf(half),
        }
    }
}

/// The SH placement objective over one density field and eRRH layout.
#[derive(Debug, Clone)]
pub struct CoverageObjective {
    region: Region,
    cells: Vec<Point2D>,
    masses: Vec<f64>,
    /// `d_r^(-α)` per occupied cell, `stride` entries each, descending.
    inv_pow: Vec<f64>,
    stride: usize,
    gamma_bar: f64,
    power: PathLossPower,
    p_c: f64,
    total_mass: f64,
}

impl CoverageObjective {
    /// `density` must be finite and non-negative. Interferers follow the
    /// policy in `params`.
    pub fn new(density: &DensityField, errhs: &[Point2D], params: &ChannelParams) -> Result<Self> {
        params.validate()?;
        if !density.is_nonnegative() {
            return Err(invalid("coverage needs a normalized (finite, non-negative) density"));
        }
        let interferers = params.select_interferers(errhs)?;
        let power = PathLossPower::new(params.alpha);
        let cell_area = density.grid.cell_area();
        let stride = interferers.len();

        let mut cells = Vec::new();
        let mut masses = Vec::new();
        let mut inv_pow = Vec::new();
        let mut row = Vec::with_capacity(stride);
        for (i, v) in density.values.iter().enumerate() {
            if *v <= 0.0 {
                continue;
            }
            let c = density.grid.center_of(i);
            row.clear();
            row.extend(interferers.iter().map(|r| 1.0 / power.pow_from_sq(r.distance_sq(&c))));
            row.sort_unstable_by(|a, b| b.partial_cmp(a).expect("no NaN distances"));
            inv_pow.extend_from_slice(&row);
            cells.push(c);
            masses.push(v * cell_area);
        }
        let total_mass = density.integral();
        Ok(Self {
            region: density.grid.region,
            cells,
            masses,
            inv_pow,
            stride,
            gamma_bar: params.gamma_bar,
            power,
            p_c: params.p_c,
            total_mass,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Integral of the density: the hit-rate upper bound.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Expected covered users with the SH at `sh`. Quadrature nodes at the
    /// SH count fully; nodes on an eRRH contribute nothing.
    pub fn hit_rate(&self, sh: Point2D) -> f64 {
        let mut sum = 0.0;
        for (k, (c, mass)) in self.cells.iter().zip(&self.masses).enumerate() {
            let d2 = sh.distance_sq(c);
            if d2 == 0.0 {
                sum += mass;
                continue;
            }
            let t = self.gamma_bar * self.power.pow_from_sq(d2);
            let mut den = 1.0;
            for q in &self.inv_pow[k * self.stride..(k + 1) * self.stride] {
                den *= 1.0 + t * q;
                if den > DENOMINATOR_CUTOFF {
                    break;
                }
            }
            sum += mass / den;
        }
        sum
    }

    /// [`hit_rate`](Self::hit_rate) after checking that `sh` lies in the region.
    pub fn try_hit_rate(&self, sh: Point2D) -> Result<f64> {
        if !sh.is_finite() || !self.region.contains(&sh) {
            return Err(invalid(format!("SH location ({}, {}) is outside the region", sh.x, sh.y)));
        }
        Ok(self.hit_rate(sh))
    }

    /// Hit rate scaled by the cache-hit success probability.
    pub fn cached_hit_rate(&self, sh: Point2D) -> f64 {
        self.hit_rate(sh) * self.p_c
    }
}

/// One-shot hit rate of an SH at `sh`.
pub fn hit_rate_at(
    sh: Point2D,
    density: &DensityField,
    errhs: &[Point2D],
    params: &ChannelParams,
) -> Result<f64> {
    CoverageObjective::new(density, errhs, params)?.try_hit_rate(sh)
}

/// One-shot hit rate scaled by `p_c`.
pub fn cached_hit_rate(
    sh: Point2D,
    density: &DensityField,
    errhs: &[Point2D],
    params: &ChannelParams,
) -> Result<f64> {
    Ok(hit_rate_at(sh, density, errhs, params)? * params.p_c)
}

/// Hit rate with the SH at every cell centre of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HitRateSurface {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

#[derive(Serialize)]
struct SurfaceRow {
    x: f64,
    y: f64,
    hit_rate: f64,
}

impl HitRateSurface {
    pub fn max(&self) -> (Point2D, f64) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        (self.grid.center_of(best), self.values[best])
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for (i, v) in self.values.iter().enumerate() {
            let c = self.grid.center_of(i);
            w.serialize(SurfaceRow { x: c.x, y: c.y, hit_rate: *v })?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn hit_rate_surface(objective: &CoverageObjective, grid: &GridSpec) -> Result<HitRateSurface> {
    if !objective.region().contains_region(&grid.region) {
        return Err(invalid("surface grid extends beyond the density region"));
    }
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| objective.hit_rate(grid.center_of(i)))
        .collect();
    Ok(HitRateSurface { grid: *grid, values })
}
