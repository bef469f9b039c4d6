//! Grid scans for zeros of analytic functions in a complex rectangle.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Axis-aligned rectangle `[re_min, re_max] x [im_min, im_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Self {
        Self {
            re_min: re.0,
            re_max: re.1,
            im_min: im.0,
            im_max: im.1,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn point(&self, ix: usize, iy: usize, nx: usize, ny: usize) -> Complex64 {
        let x = self.re_min + (self.re_max - self.re_min) * ix as f64 / (nx - 1) as f64;
        let y = self.im_min + (self.im_max - self.im_min) * iy as f64 / (ny - 1) as f64;
        Complex64::new(x, y)
    }
}

/// Grid nodes where `|f|` is a strict local minimum over its eight neighbours
/// and below `threshold`, sorted by real part. Boundary nodes are skipped.
pub fn oracle_root_scan<F>(f: F, region: Rect, grid: (usize, usize), threshold: f64) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let (nx, ny) = (grid.0.max(3), grid.1.max(3));
    let values: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| f(region.point(idx % nx, idx / nx, nx, ny)).norm())
        .collect();
    let at = |ix: usize, iy: usize| values[iy * nx + ix];
    let mut seeds = Vec::new();
    for iy in 1..ny - 1 {
        for ix in 1..nx - 1 {
            let v = at(ix, iy);
            if v.is_nan() || v >= threshold {
                continue;
            }
            let is_min = (0..3).all(|dy| (0..3).all(|dx| (dx == 1 && dy == 1) || v < at(ix + dx - 1, iy + dy - 1)));
            if is_min {
                seeds.push(region.point(ix, iy, nx, ny));
            }
        }
    }
    seeds.sort_by(|a, b| a.re.total_cmp(&b.re));
    seeds
}

/// Number of zeros minus poles of `f` inside `region` by the argument
/// principle, with `per_side` samples on each edge. Returns `None` when `f`
/// nearly vanishes on the contour or the phase steps too far between samples.
pub fn winding_number<F>(f: F, region: Rect, per_side: usize) -> Option<i64>
where
    F: Fn(Complex64) -> Complex64,
{
    let corners = [
        Complex64::new(region.re_min, region.im_min),
        Complex64::new(region.re_max, region.im_min),
        Complex64::new(region.re_max, region.im_max),
        Complex64::new(region.re_min, region.im_max),
    ];
    let mut total = 0.0;
    let mut prev = f(corners[0]);
    for side in 0..4 {
        let (a, b) = (corners[side], corners[(side + 1) % 4]);
        for s in 1..=per_side {
            let z = a + (b - a) * (s as f64 / per_side as f64);
            let v = f(z);
            if v.norm() == 0.0 || !v.is_finite() {
                return None;
            }
            let step = (v / prev).arg();
            if step.abs() > 0.5 * PI {
                return None;
            }
            total += step;
            prev = v;
        }
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    ((turns - rounded).abs() < 1e-3).then_some(rounded as i64)
}
