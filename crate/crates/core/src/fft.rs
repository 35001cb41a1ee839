//! Multidimensional FFT over row-major data, one rustfft plan per axis length.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLAN_CACHE: Lazy<Mutex<HashMap<usize, Arc<Plans>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plans(n: usize) -> Arc<Plans> {
    let mut cache = PLAN_CACHE.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn transform_axes(grid: &Grid, data: &mut [Complex64], forward: bool) {
    let n = grid.points_per_axis();
    let dim = grid.dim();
    debug_assert_eq!(data.len(), grid.len());
    let plans = plans(n);
    let fft = if forward {
        &plans.forward
    } else {
        &plans.inverse
    };
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::default(); n];

    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(n) {
                fft.process_with_scratch(chunk, &mut scratch);
            }
        } else {
            // lines along `axis`: blocks of n*stride, `stride` lines per block
            let block = n * stride;
            for base in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + offset + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[base + offset + j * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Unnormalized forward DFT along every axis.
pub(crate) fn forward(grid: &Grid, data: &mut [Complex64]) {
    transform_axes(grid, data, true);
}

/// Inverse DFT along every axis, normalized by `n^N` so that
/// `inverse(forward(f)) = f`.
pub(crate) fn inverse(grid: &Grid, data: &mut [Complex64]) {
    transform_axes(grid, data, false);
    let norm = 1.0 / grid.len() as f64;
    for v in data.iter_mut() {
        *v *= norm;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        for (dim, n) in [(1usize, 32usize), (2, 16), (3, 8)] {
            let grid = Grid::new(dim, n, 4.0).unwrap();
            let orig: Vec<Complex64> = (0..grid.len())
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
                .collect();
            let mut data = orig.clone();
            forward(&grid, &mut data);
            inverse(&grid, &mut data);
            let err: f64 = data
                .iter()
                .zip(&orig)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-13, "dim {dim}: round trip error {err}");
        }
    }

    #[test]
    fn single_mode_lands_on_one_bin() {
        let grid = Grid::new(1, 32, 4.0).unwrap();
        let k = grid.wavenumber(3);
        let mut data: Vec<Complex64> = (0..32)
            .map(|j| (Complex64::i() * k * grid.coord(j)).exp())
            .collect();
        forward(&grid, &mut data);
        // e^{ik x_j} with x_j = -L + jh picks up a constant phase from -L
        assert!((data[3].norm() - 32.0).abs() < 1e-10);
        for (m, v) in data.iter().enumerate() {
            if m != 3 {
                assert!(v.norm() < 1e-10, "leak into bin {m}: {v}");
            }
        }
    }
}
