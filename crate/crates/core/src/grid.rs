use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum spatial dimension handled by the toolkit.
pub const MAX_DIM: usize = 3;

/// Uniform periodic grid on the box `[-L, L)^N`.
///
/// Points along each axis sit at `x_j = -L + j h` with `h = 2L / n`, so the
/// origin is a grid point and `+L` is identified with `-L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points_per_axis: usize,
    half_width: f64,
}

impl Grid {
    pub fn new(dim: usize, points_per_axis: usize, half_width: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dim must be in 1..={MAX_DIM}, got {dim}"
            )));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be a power of two >= 8, got {points_per_axis}"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "half_width must be positive and finite, got {half_width}"
            )));
        }
        Ok(Self {
            dim,
            points_per_axis,
            half_width,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Grid spacing `h = 2L / n`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// Total number of grid points `n^N`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume element `h^N` of the box quadrature.
    pub fn volume_element(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Coordinate of index `j` along one axis: `-L + j h`.
    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Fourier wavenumber of axis index `m`: `(pi/L) * m'` with `m'` the
    /// signed frequency in `[-n/2, n/2)`.
    pub fn wavenumber(&self, m: usize) -> f64 {
        let n = self.points_per_axis;
        let signed = if m < n / 2 {
            m as f64
        } else {
            m as f64 - n as f64
        };
        std::f64::consts::PI / self.half_width * signed
    }

    /// Decompose a flat row-major index into per-axis indices.
    /// Unused trailing axes are zero.
    pub fn multi_index(&self, flat: usize) -> [usize; MAX_DIM] {
        let n = self.points_per_axis;
        let mut out = [0usize; MAX_DIM];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rest % n;
            rest /= n;
        }
        out
    }

    /// Physical position of a flat index.
    pub fn position(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let mut out = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            out[axis] = self.coord(idx[axis]);
        }
        out
    }

    /// Squared Euclidean distance of a flat index from the origin.
    pub fn radius_squared(&self, flat: usize) -> f64 {
        let pos = self.position(flat);
        pos[..self.dim].iter().map(|x| x * x).sum()
    }

    /// `|k|^2` for every flat spectral index, row-major like the data.
    pub fn k_squared_table(&self) -> Vec<f64> {
        let n = self.points_per_axis;
        let axis: Vec<f64> = (0..n)
            .map(|m| {
                let k = self.wavenumber(m);
                k * k
            })
            .collect();
        let mut out = vec![0.0; self.len()];
        for (flat, slot) in out.iter_mut().enumerate() {
            let idx = self.multi_index(flat);
            *slot = (0..self.dim).map(|a| axis[idx[a]]).sum();
        }
        out
    }

    /// True if the flat index lies in the outer shell of the box,
    /// `|x|_inf >= frac * L` on some axis.
    pub fn in_boundary_shell(&self, flat: usize, frac: f64) -> bool {
        let pos = self.position(flat);
        pos[..self.dim]
            .iter()
            .any(|x| x.abs() >= frac * self.half_width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_arguments() {
        assert!(Grid::new(0, 64, 8.0).is_err());
        assert!(Grid::new(4, 64, 8.0).is_err());
        assert!(Grid::new(1, 48, 8.0).is_err());
        assert!(Grid::new(1, 4, 8.0).is_err());
        assert!(Grid::new(1, 64, -1.0).is_err());
        assert!(Grid::new(2, 64, 8.0).is_ok());
    }

    #[test]
    fn spacing_times_points_is_box_width() {
        let g = Grid::new(1, 1024, 16.0).unwrap();
        assert!((g.spacing() * g.points_per_axis() as f64 - 2.0 * g.half_width()).abs() < 1e-12);
    }

    #[test]
    fn origin_is_a_grid_point() {
        let g = Grid::new(1, 64, 8.0).unwrap();
        assert_eq!(g.coord(32), 0.0);
    }

    #[test]
    fn wavenumbers_wrap_to_negative_frequencies() {
        let g = Grid::new(1, 8, 4.0).unwrap();
        let k1 = g.wavenumber(1);
        assert!((k1 - std::f64::consts::PI / 4.0).abs() < 1e-15);
        assert!((g.wavenumber(7) + k1).abs() < 1e-15);
    }

    #[test]
    fn multi_index_round_trip() {
        let g = Grid::new(3, 8, 4.0).unwrap();
        let flat = (3 * 8 + 5) * 8 + 7;
        assert_eq!(g.multi_index(flat)[..3], [3, 5, 7]);
    }
}
