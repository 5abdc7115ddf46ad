//! Kinetic fields sampled on a periodic grid.

use std::io::{self, Write};

use crate::error::{Result, VlbmError};
use crate::io::write_row;
use crate::lattice::{ModelKind, VelocitySet};
use crate::models::ConservationLaw;
use crate::solver::grid::Grid;

/// Stacked kinetic vectors `F_k` on every cell.
///
/// Storage is one contiguous array per `(k, c)` pair: `data[k * m + c][cell]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticField {
    grid: Grid,
    n_v: usize,
    m: usize,
    data: Vec<Vec<f64>>,
}

impl KineticField {
    pub fn zeros(grid: &Grid, vs: &VelocitySet) -> Result<Self> {
        if grid.dim() != vs.dim() {
            return Err(VlbmError::DimensionMismatch {
                expected: vs.dim(),
                got: grid.dim(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            n_v: vs.n_velocities(),
            m: vs.m(),
            data: vec![vec![0.0; grid.n_cells()]; vs.len()],
        })
    }

    /// Field at equilibrium with conserved state `w(x)` on every cell.
    pub fn from_equilibrium<F>(
        grid: &Grid,
        vs: &VelocitySet,
        law: &ConservationLaw,
        w: F,
    ) -> Result<Self>
    where
        F: Fn([f64; 2]) -> Vec<f64>,
    {
        vs.check_law(law)?;
        let mut field = Self::zeros(grid, vs)?;
        let mut feq = vec![0.0; vs.len()];
        for cell in 0..grid.n_cells() {
            let wc = w(grid.coords(cell));
            crate::error::check_len(vs.m(), wc.len())?;
            vs.equilibrium_into(law, &wc, &mut feq)?;
            field.set_cell(cell, &feq);
        }
        Ok(field)
    }

    /// Field built from moments `Y(x)` through the inverse change of variables.
    pub fn from_moments<F>(
        grid: &Grid,
        vs: &VelocitySet,
        law: &ConservationLaw,
        y: F,
    ) -> Result<Self>
    where
        F: Fn([f64; 2]) -> Vec<f64>,
    {
        let mut field = Self::zeros(grid, vs)?;
        for cell in 0..grid.n_cells() {
            let f = vs.y_to_f(law, &y(grid.coords(cell)))?;
            field.set_cell(cell, &f);
        }
        Ok(field)
    }

    /// Field with explicit kinetic values `F(x)` (stacked, length `m n_v`).
    pub fn from_kinetic<F>(grid: &Grid, vs: &VelocitySet, f: F) -> Result<Self>
    where
        F: Fn([f64; 2]) -> Vec<f64>,
    {
        let mut field = Self::zeros(grid, vs)?;
        for cell in 0..grid.n_cells() {
            let fc = f(grid.coords(cell));
            crate::error::check_len(vs.len(), fc.len())?;
            field.set_cell(cell, &fc);
        }
        Ok(field)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_velocities(&self) -> usize {
        self.n_v
    }

    /// Values of component `c` of `F_k` on all cells.
    pub fn component(&self, k: usize, c: usize) -> &[f64] {
        &self.data[k * self.m + c]
    }

    pub(crate) fn arrays_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.data
    }

    pub fn cell(&self, cell: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.data.len()];
        self.cell_into(cell, &mut out);
        out
    }

    pub(crate) fn cell_into(&self, cell: usize, out: &mut [f64]) {
        for (o, arr) in out.iter_mut().zip(&self.data) {
            *o = arr[cell];
        }
    }

    pub fn set_cell(&mut self, cell: usize, values: &[f64]) {
        for (arr, v) in self.data.iter_mut().zip(values) {
            arr[cell] = *v;
        }
    }

    /// Conserved component `W_c = sum_k F_k[c]` on every cell.
    pub fn conserved(&self, c: usize) -> Vec<f64> {
        (0..self.grid.n_cells())
            .map(|cell| (0..self.n_v).map(|k| self.data[k * self.m + c][cell]).sum())
            .collect()
    }

    /// Moment vectors `Y` on every cell, indexed `[row * m + c][cell]`.
    pub fn moments(&self, vs: &VelocitySet, law: &ConservationLaw) -> Result<Vec<Vec<f64>>> {
        vs.check_law(law)?;
        let n = self.grid.n_cells();
        let mut out = vec![vec![0.0; n]; self.data.len()];
        let mut f = vec![0.0; self.data.len()];
        let mut y = vec![0.0; self.data.len()];
        for cell in 0..n {
            self.cell_into(cell, &mut f);
            vs.f_to_y_into(law, &f, &mut y)?;
            for (arr, v) in out.iter_mut().zip(&y) {
                arr[cell] = *v;
            }
        }
        Ok(out)
    }

    /// `sum_cells sum_k F_k`, one entry per conserved component.
    pub fn total_mass(&self) -> Vec<f64> {
        (0..self.m)
            .map(|c| self.conserved(c).iter().sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .flatten()
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Max norm of conserved component `c`.
    pub fn max_abs_conserved(&self, c: usize) -> f64 {
        self.conserved(c)
            .iter()
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().flatten().all(|v| v.is_finite())
    }

    /// Largest absolute difference with another field on the same grid.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid || self.data.len() != other.data.len() {
            return Err(VlbmError::InvalidParameter(
                "fields live on different grids".into(),
            ));
        }
        Ok(self
            .data
            .iter()
            .flatten()
            .zip(other.data.iter().flatten())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs())))
    }

    /// Writes one CSV row per cell: coordinates then the moment vector `Y`.
    ///
    /// Header: `x[,y],w[,y1,y2,z3]`. For systems (`m > 1`) each moment
    /// name gets a component suffix, e.g. `w_0,w_1,y1_0,y1_1`.
    pub fn write_csv<W: Write>(
        &self,
        out: &mut W,
        vs: &VelocitySet,
        law: &ConservationLaw,
    ) -> io::Result<()> {
        let y = self
            .moments(vs, law)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        writeln!(out, "{}", csv_header(vs))?;
        let mut row = Vec::with_capacity(2 + y.len());
        for cell in 0..self.grid.n_cells() {
            row.clear();
            let xy = self.grid.coords(cell);
            row.extend_from_slice(&xy[..self.grid.dim()]);
            row.extend(y.iter().map(|arr| arr[cell]));
            write_row(out, &row)?;
        }
        Ok(())
    }
}

fn csv_header(vs: &VelocitySet) -> String {
    let mut names: Vec<String> = vec!["x".into()];
    if vs.dim() == 2 {
        names.push("y".into());
    }
    let mut rows = vec!["w".to_string()];
    rows.extend((1..=vs.dim()).map(|i| format!("y{i}")));
    if vs.kind() == ModelKind::D2Q4 {
        rows.push("z3".into());
    }
    for r in rows {
        if vs.m() == 1 {
            names.push(r);
        } else {
            names.extend((0..vs.m()).map(|c| format!("{r}_{c}")));
        }
    }
    names.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_field_reproduces_conserved_values() {
        let grid = Grid::unit(1, 8).unwrap();
        let vs = VelocitySet::new(ModelKind::D1Q2, 1.0, 1).unwrap();
        let law = ConservationLaw::transport_1d(0.5).unwrap();
        let field = KineticField::from_equilibrium(&grid, &vs, &law, |x| vec![1.0 + x[0]]).unwrap();
        let w = field.conserved(0);
        for (cell, wc) in w.iter().enumerate() {
            assert!((wc - (1.0 + grid.coords(cell)[0])).abs() < 1e-15);
        }
        let y = field.moments(&vs, &law).unwrap();
        assert!(y[1].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn csv_headers() {
        let d4 = VelocitySet::new(ModelKind::D2Q4, 1.0, 1).unwrap();
        assert_eq!(csv_header(&d4), "x,y,w,y1,y2,z3");
        let d1 = VelocitySet::new(ModelKind::D1Q2, 1.0, 2).unwrap();
        assert_eq!(csv_header(&d1), "x,w_0,w_1,y1_0,y1_1");
        let d3 = VelocitySet::new(ModelKind::D2Q3, 1.0, 1).unwrap();
        assert_eq!(csv_header(&d3), "x,y,w,y1,y2");
    }

    #[test]
    fn csv_rows_have_full_precision() {
        let grid = Grid::unit(1, 4).unwrap();
        let vs = VelocitySet::new(ModelKind::D1Q2, 1.0, 1).unwrap();
        let law = ConservationLaw::transport_1d(0.0).unwrap();
        let field = KineticField::from_equilibrium(&grid, &vs, &law, |_| vec![1.0 / 3.0]).unwrap();
        let mut buf = Vec::new();
        field.write_csv(&mut buf, &vs, &law).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        let w: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(w, field.conserved(0)[1]);
    }
}
