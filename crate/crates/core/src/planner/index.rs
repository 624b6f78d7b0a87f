//! Uniform planar grid over tree nodes.
//!
//! The lifted distance is never smaller than the planar distance, so planar
//! cell rings bound the search for both nearest and radius queries.

use crate::dubins::Configuration;
use crate::geometry::Domain;

use super::lifted_distance;

const TARGET_CELL: f64 = 0.025;
const MAX_CELLS_PER_AXIS: usize = 400;

#[derive(Debug, Clone)]
pub(crate) struct GridIndex {
    xmin: f64,
    ymin: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<usize>>,
}

impl GridIndex {
    pub(crate) fn new(domain: &Domain) -> Self {
        let longest = domain.width().max(domain.height());
        let cell = TARGET_CELL.max(longest / MAX_CELLS_PER_AXIS as f64);
        let nx = ((domain.width() / cell).ceil() as usize).max(1);
        let ny = ((domain.height() / cell).ceil() as usize).max(1);
        Self {
            xmin: domain.xmin,
            ymin: domain.ymin,
            cell,
            nx,
            ny,
            cells: vec![Vec::new(); nx * ny],
        }
    }

    fn axis_cell(v: f64, min: f64, cell: f64, n: usize) -> usize {
        let k = ((v - min) / cell).floor();
        if k.is_nan() || k < 0.0 {
            0
        } else {
            (k as usize).min(n - 1)
        }
    }

    fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        (
            Self::axis_cell(x, self.xmin, self.cell, self.nx),
            Self::axis_cell(y, self.ymin, self.cell, self.ny),
        )
    }

    pub(crate) fn insert(&mut self, idx: usize, config: &Configuration) {
        let (i, j) = self.cell_of(config.x, config.y);
        self.cells[j * self.nx + i].push(idx);
    }

    /// Visit every node index in cells at Chebyshev ring `k` around `(ci, cj)`.
    fn visit_ring(&self, ci: usize, cj: usize, k: usize, mut f: impl FnMut(usize)) {
        let (ci, cj, k) = (ci as isize, cj as isize, k as isize);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        for j in (cj - k)..=(cj + k) {
            if j < 0 || j >= ny {
                continue;
            }
            let edge_row = j == cj - k || j == cj + k;
            let mut i = ci - k;
            while i <= ci + k {
                if i >= 0 && i < nx {
                    for &idx in &self.cells[(j * nx + i) as usize] {
                        f(idx);
                    }
                }
                // interior rows only touch the two side cells
                i += if edge_row || k == 0 { 1 } else { 2 * k };
            }
        }
    }

    /// Index of the node closest to `q` in the lifted metric; ties go to the
    /// lowest index. `configs` must be non-empty.
    pub(crate) fn nearest(&self, configs: &[Configuration], q: &Configuration, heading_weight: f64) -> usize {
        let (ci, cj) = self.cell_of(q.x, q.y);
        let max_ring = self.nx.max(self.ny);
        let mut best = (f64::INFINITY, usize::MAX);
        for k in 0..=max_ring {
            self.visit_ring(ci, cj, k, |idx| {
                let d = lifted_distance(&configs[idx], q, heading_weight);
                if d < best.0 || (d == best.0 && idx < best.1) {
                    best = (d, idx);
                }
            });
            // anything in ring k+1 is at least k cells away
            if best.1 != usize::MAX && best.0 < k as f64 * self.cell {
                break;
            }
        }
        best.1
    }

    /// All node indices within lifted distance `radius` of `q`, ascending.
    pub(crate) fn within(
        &self,
        configs: &[Configuration],
        q: &Configuration,
        heading_weight: f64,
        radius: f64,
    ) -> Vec<usize> {
        let (i0, j0) = self.cell_of(q.x - radius, q.y - radius);
        let (i1, j1) = self.cell_of(q.x + radius, q.y + radius);
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                for &idx in &self.cells[j * self.nx + i] {
                    if lifted_distance(&configs[idx], q, heading_weight) <= radius {
                        out.push(idx);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}
