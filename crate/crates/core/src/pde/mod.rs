//! Laguerre diffusion, its Hopf–Cole and log-potential transforms, and
//! Fisher travelling waves.

mod fisher;
mod heat;
mod hopf_cole;

use crate::error::{Error, Result};
use crate::residual::{format_value, Grid};

pub use fisher::{
    fisher_front_speed, fisher_literal_residual, fisher_pairing_residual, fisher_residual,
    fisher_wave, fisher_wave_literal, Branch, FisherParams,
};
pub use heat::{
    laguerre_heat_exact, laguerre_heat_fd, laguerre_heat_fd_with, laguerre_heat_poly,
    operator_power, HeatOptions, HeatRun, PolyInitialData,
};
pub use hopf_cole::{hopf_cole_u, laguerre_burgers_residual, log_potential_residual};

/// Boundary treatment attached to a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// No condition imposed (exact or sampled data).
    Free,
    /// Zero flux of `x F_x`, automatic where the coefficient vanishes.
    Natural,
    /// `F_x = 0`.
    Neumann,
}

/// One time slice of a field on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub time: f64,
    pub left: Boundary,
    pub right: Boundary,
}

impl Field1D {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "field value {v} at x = {}",
                grid.points()[i]
            )));
        }
        Ok(Field1D {
            grid,
            values,
            time,
            left: Boundary::Free,
            right: Boundary::Free,
        })
    }

    /// Samples `f(x)` on the grid.
    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.iter().map(f).collect();
        Field1D::new(grid, values, time)
    }

    pub fn with_boundaries(mut self, left: Boundary, right: Boundary) -> Self {
        self.left = left;
        self.right = right;
        self
    }

    /// The part of the field with `lo ≤ x ≤ hi`.
    pub fn window(&self, lo: f64, hi: f64) -> Result<Field1D> {
        let keep: Vec<usize> = (0..self.grid.len())
            .filter(|&i| {
                let x = self.grid.points()[i];
                x >= lo && x <= hi
            })
            .collect();
        if keep.len() < 3 {
            return Err(Error::InvalidGrid(format!(
                "window [{lo}, {hi}] holds fewer than 3 points"
            )));
        }
        let (first, last) = (keep[0], keep[keep.len() - 1]);
        let grid = match self.grid.step() {
            Some(_) => Grid::uniform(
                self.grid.points()[first],
                self.grid.points()[last],
                keep.len(),
            )?,
            None => Grid::from_points(self.grid.points()[first..=last].to_vec())?,
        };
        Ok(Field1D {
            grid,
            values: self.values[first..=last].to_vec(),
            time: self.time,
            left: if first == 0 {
                self.left
            } else {
                Boundary::Free
            },
            right: if last + 1 == self.grid.len() {
                self.right
            } else {
                Boundary::Free
            },
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// CSV of a time stack, columns `t,x,value`.
pub fn stack_to_csv(stack: &[Field1D]) -> String {
    let mut out = String::from("t,x,value\n");
    for slice in stack {
        for (x, v) in slice.grid.iter().zip(&slice.values) {
            out.push_str(&format!(
                "{},{},{}\n",
                format_value(slice.time),
                format_value(x),
                format_value(*v)
            ));
        }
    }
    out
}
