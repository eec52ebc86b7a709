//! Empirical and binned measures on `[0, ∞)²`, used for the Lévy measures
//! of the ladder process, of the right inverse and of thinned variants.
//!
//! Bins are log-spaced on both axes. Each axis carries an extra atom cell at
//! `0` and an overflow cell above the last edge, so masses of the form
//! `Λ(ds, {0})` are kept apart from the continuous part.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Point masses `(s, y)` of equal weight.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmpiricalMeasure {
    pub points: Vec<(f64, f64)>,
    /// Mass of each point (typically one over the total local time).
    pub weight: f64,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<(f64, f64)>, weight: f64) -> Self {
        EmpiricalMeasure { points, weight }
    }

    pub fn total_mass(&self) -> f64 {
        self.points.len() as f64 * self.weight
    }

    /// `∫ f dΛ` over the points.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        self.points.iter().map(|&(s, y)| f(s, y)).sum::<f64>() * self.weight
    }

    /// Mass of `[s_lo, s_hi) × [y_lo, y_hi)`.
    pub fn mass_in(&self, s_lo: f64, s_hi: f64, y_lo: f64, y_hi: f64) -> f64 {
        self.points
            .iter()
            .filter(|(s, y)| *s >= s_lo && *s < s_hi && *y >= y_lo && *y < y_hi)
            .count() as f64
            * self.weight
    }

    pub fn binned(&self, bins_per_decade: usize) -> BinnedMeasure {
        BinnedMeasure::from_points(&self.points, self.weight, bins_per_decade)
    }
}

/// One axis: atom at 0, log bins `[e_k, e_{k+1})` and an overflow cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub edges: Vec<f64>,
}

impl Axis {
    fn log_spaced(values: impl Iterator<Item = f64> + Clone, per_decade: usize) -> Self {
        let pos = values.filter(|v| *v > 0.0);
        let lo = pos.clone().fold(f64::INFINITY, f64::min);
        let hi = pos.fold(0.0, f64::max);
        if !lo.is_finite() {
            return Axis { edges: alloc::vec![1.0] };
        }
        let d = per_decade.max(1) as f64;
        let k0 = math::floor(libm::log10(lo) * d);
        let k1 = math::floor(libm::log10(hi) * d) + 1.0;
        let edges = (k0 as i64..=k1 as i64)
            .map(|k| libm::pow(10.0, k as f64 / d))
            .collect();
        Axis { edges }
    }

    /// Number of cells: atom + bins + overflow.
    pub fn cells(&self) -> usize {
        self.edges.len() + 1
    }

    pub fn cell_of(&self, v: f64) -> usize {
        if v <= 0.0 {
            return 0;
        }
        let k = self.edges.partition_point(|e| *e <= v);
        if k == 0 {
            // below the first edge: fold into the first bin
            1
        } else {
            k.min(self.edges.len())
        }
    }

    /// `(lo, hi)` of a cell; the atom is `(0, 0)` and overflow has `hi = ∞`.
    pub fn bounds(&self, c: usize) -> (f64, f64) {
        if c == 0 {
            (0.0, 0.0)
        } else if c < self.edges.len() {
            (self.edges[c - 1], self.edges[c])
        } else {
            (self.edges[self.edges.len() - 1], f64::INFINITY)
        }
    }
}

/// Binned measure with per-cell masses and mass centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedMeasure {
    pub s_axis: Axis,
    pub y_axis: Axis,
    /// Row-major `[s_cell][y_cell]`.
    pub mass: Vec<f64>,
    centroid: Vec<(f64, f64)>,
}

/// One cell of a binned measure, for serialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub s_lo: f64,
    pub s_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub mass: f64,
}

impl BinnedMeasure {
    pub fn from_points(points: &[(f64, f64)], weight: f64, per_decade: usize) -> Self {
        let s_axis = Axis::log_spaced(points.iter().map(|p| p.0), per_decade);
        let y_axis = Axis::log_spaced(points.iter().map(|p| p.1), per_decade);
        let (ns, ny) = (s_axis.cells(), y_axis.cells());
        let mut mass = alloc::vec![0.0; ns * ny];
        let mut sums = alloc::vec![(0.0, 0.0); ns * ny];
        for &(s, y) in points {
            let c = s_axis.cell_of(s) * ny + y_axis.cell_of(y);
            mass[c] += weight;
            sums[c].0 += s * weight;
            sums[c].1 += y * weight;
        }
        let centroid = mass
            .iter()
            .zip(&sums)
            .map(|(m, (a, b))| if *m > 0.0 { (a / m, b / m) } else { (0.0, 0.0) })
            .collect();
        BinnedMeasure {
            s_axis,
            y_axis,
            mass,
            centroid,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Evaluation point of a cell: the geometric midpoint of a bounded bin,
    /// exactly 0 for atom coordinates, and the mass centroid for overflow.
    fn point(&self, i: usize, j: usize) -> (f64, f64) {
        let ny = self.y_axis.cells();
        let c = self.centroid[i * ny + j];
        let coord = |axis: &Axis, k: usize, fallback: f64| {
            let (lo, hi) = axis.bounds(k);
            if k == 0 {
                0.0
            } else if hi.is_infinite() {
                fallback
            } else {
                math::sqrt(lo * hi)
            }
        };
        (coord(&self.s_axis, i, c.0), coord(&self.y_axis, j, c.1))
    }

    /// Midpoint rule `Σ f(s_c, y_c) Λ(cell)`.
    pub fn integrate<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        let ny = self.y_axis.cells();
        let mut total = 0.0;
        for i in 0..self.s_axis.cells() {
            for j in 0..ny {
                let m = self.mass[i * ny + j];
                if m > 0.0 {
                    let (s, y) = self.point(i, j);
                    total += f(s, y) * m;
                }
            }
        }
        total
    }

    /// Midpoint integral of `f(s) g(y)` with `g` evaluated once per y-cell.
    pub fn integrate_separable<F: FnMut(f64) -> f64, G: FnMut(f64) -> Result<f64>>(
        &self,
        mut f: F,
        mut g: G,
    ) -> Result<f64> {
        let ny = self.y_axis.cells();
        let mut total = 0.0;
        for j in 0..ny {
            let mut col = 0.0;
            let mut any = false;
            let mut yj = 0.0;
            for i in 0..self.s_axis.cells() {
                let m = self.mass[i * ny + j];
                if m > 0.0 {
                    let (s, y) = self.point(i, j);
                    yj = y;
                    col += f(s) * m;
                    any = true;
                }
            }
            if any {
                total += col * g(yj)?;
            }
        }
        Ok(total)
    }

    pub fn cells(&self) -> Vec<Cell> {
        let ny = self.y_axis.cells();
        let mut out = Vec::new();
        for i in 0..self.s_axis.cells() {
            for j in 0..ny {
                let m = self.mass[i * ny + j];
                if m > 0.0 {
                    let (s_lo, s_hi) = self.s_axis.bounds(i);
                    let (y_lo, y_hi) = self.y_axis.bounds(j);
                    out.push(Cell {
                        s_lo,
                        s_hi,
                        y_lo,
                        y_hi,
                        mass: m,
                    });
                }
            }
        }
        out
    }
}

/// Evaluates `I(d)` for binned integrals at `d, 2d, 4d, …` bins per decade
/// until two successive values agree to `rel_tol` (relative to `scale`).
/// Returns the last value and the last change.
pub fn refine_until_stable<F: FnMut(usize) -> Result<f64>>(
    mut integral: F,
    start: usize,
    rel_tol: f64,
    scale: f64,
    max_rounds: usize,
) -> Result<(f64, f64)> {
    let mut d = start.max(1);
    let mut prev = integral(d)?;
    for _ in 0..max_rounds {
        d *= 2;
        let next = integral(d)?;
        let change = (next - prev).abs();
        if change <= rel_tol * scale.abs().max(f64::MIN_POSITIVE) {
            return Ok((next, change));
        }
        prev = next;
    }
    Err(Error::Quadrature {
        tolerance: rel_tol,
        estimate: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn atoms_are_separate_cells() {
        let pts = vec![(0.0, 0.5), (0.3, 0.0), (0.3, 0.0), (2.0, 1.0)];
        let b = BinnedMeasure::from_points(&pts, 0.5, 4);
        assert!((b.total_mass() - 2.0).abs() < 1e-15);
        let cells = b.cells();
        let atom_y: f64 = cells.iter().filter(|c| c.y_hi == 0.0).map(|c| c.mass).sum();
        let atom_s: f64 = cells.iter().filter(|c| c.s_hi == 0.0).map(|c| c.mass).sum();
        assert_eq!(atom_y, 1.0);
        assert_eq!(atom_s, 0.5);
    }

    #[test]
    fn midpoint_rule_converges() {
        // points spread log-uniformly on [1e-3, 1]; integrate s
        let pts: Vec<(f64, f64)> = (0..3000)
            .map(|k| (libm::pow(10.0, -3.0 + 3.0 * (k as f64 + 0.5) / 3000.0), 0.0))
            .collect();
        let e = EmpiricalMeasure::new(pts, 1e-3);
        let exact = e.integrate(|s, _| s);
        let (v, _) = refine_until_stable(|d| Ok(e.binned(d).integrate(|s, _| s)), 4, 1e-4, exact, 8)
            .unwrap();
        assert!((v - exact).abs() / exact < 1e-3);
    }
}
