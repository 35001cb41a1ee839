//! Discretized complex fields on periodic boxes: quadrature, spectral
//! differentiation, conformal rescaling, rearrangement and translation.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{Grid, MAX_DIM};

/// Relative amplitude above which content near the box boundary makes a
/// conformal rescaling unreliable.
const RESCALE_ESCAPE_TOL: f64 = 1e-6;

/// Fraction of the half-width that counts as the boundary shell.
const BOUNDARY_SHELL_FRAC: f64 = 0.9;

/// A complex-valued function sampled on a periodic box, row-major over axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Field {
    /// Wraps raw values. Panics if the length does not match the grid or a
    /// value is non-finite.
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), grid.len(), "value count must match grid");
        assert!(
            values.iter().all(|v| v.re.is_finite() && v.im.is_finite()),
            "field values must be finite"
        );
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::default(); grid.len()],
        }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let pos = grid.position(i);
                f(&pos[..grid.dim()])
            })
            .collect();
        Self::new(grid, values)
    }

    /// Centered real Gaussian `exp(-|x - c|^2 / (2 w^2))`.
    pub fn gaussian(grid: Grid, center: &[f64], width: f64) -> Self {
        let dim = grid.dim();
        Self::from_fn(grid, |x| {
            let r2: f64 = (0..dim).map(|a| (x[a] - center[a]).powi(2)).sum();
            Complex64::new((-r2 / (2.0 * width * width)).exp(), 0.0)
        })
    }

    /// Random smooth field: complex Gaussian spectrum restricted to
    /// `|k| <= mode_frac * k_max`, localized by a centered Gaussian envelope
    /// so that it decays before the box boundary.
    pub fn random_localized(grid: Grid, mode_frac: f64, rng: &mut impl Rng) -> Self {
        let kmax = std::f64::consts::PI / grid.spacing();
        let cut = (mode_frac * kmax).powi(2);
        let table = grid.k_squared_table();
        let mut spec = vec![Complex64::default(); grid.len()];
        for (s, &k2) in spec.iter_mut().zip(&table) {
            if k2 <= cut {
                *s = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        fft::inverse(&grid, &mut spec);
        let w = grid.half_width() / 8.0;
        let mut out = Self::new(grid, spec);
        for (i, v) in out.values.iter_mut().enumerate() {
            let r2 = grid.radius_squared(i);
            *v *= (-r2 / (2.0 * w * w)).exp();
        }
        out
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete `L^2` mass `h^N sum |f|^2`.
    pub fn mass(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        self.grid.volume_element() * sum
    }

    /// `int |f|^p` by box quadrature.
    pub fn lp_integral(&self, p: f64) -> f64 {
        let sum: f64 = self.values.iter().map(|v| pow_abs(v.norm(), p)).sum();
        self.grid.volume_element() * sum
    }

    /// Spectral kinetic energy `int |grad f|^2 = (h^N / n^N) sum |k|^2 |fhat|^2`.
    pub fn kinetic(&self) -> f64 {
        let spec = self.spectrum();
        let table = self.grid.k_squared_table();
        let sum: f64 = spec
            .iter()
            .zip(&table)
            .map(|(v, &k2)| k2 * v.norm_sqr())
            .sum();
        self.grid.volume_element() / self.grid.len() as f64 * sum
    }

    /// `int f conj(g)` by box quadrature.
    pub fn inner(&self, other: &Field) -> Complex64 {
        assert_eq!(self.grid, other.grid, "fields must share a grid");
        let sum: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        self.grid.volume_element() * sum
    }

    /// `int f conj(g) + int grad f . conj(grad g)` evaluated spectrally.
    pub fn h1_inner(&self, other: &Field) -> Complex64 {
        assert_eq!(self.grid, other.grid, "fields must share a grid");
        let fa = self.spectrum();
        let fb = other.spectrum();
        let table = self.grid.k_squared_table();
        let sum: Complex64 = fa
            .iter()
            .zip(&fb)
            .zip(&table)
            .map(|((a, b), &k2)| (1.0 + k2) * a * b.conj())
            .sum();
        self.grid.volume_element() / self.grid.len() as f64 * sum
    }

    pub fn h1_norm_sq(&self) -> f64 {
        self.mass() + self.kinetic()
    }

    /// Unnormalized DFT of the values.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut spec = self.values.clone();
        fft::forward(&self.grid, &mut spec);
        spec
    }

    pub fn from_spectrum(grid: Grid, mut spec: Vec<Complex64>) -> Self {
        assert_eq!(spec.len(), grid.len());
        fft::inverse(&grid, &mut spec);
        Self::new(grid, spec)
    }

    /// Spectral Laplacian: inverse transform of `-|k|^2 fhat`.
    pub fn laplacian(&self) -> Field {
        let mut spec = self.spectrum();
        let table = self.grid.k_squared_table();
        for (s, &k2) in spec.iter_mut().zip(&table) {
            *s *= -k2;
        }
        Self::from_spectrum(self.grid, spec)
    }

    pub fn scaled(&self, c: Complex64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise product.
    pub fn pointwise_mul(&self, other: &Field) -> Field {
        assert_eq!(self.grid, other.grid, "fields must share a grid");
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: Complex64, other: &Field) -> Field {
        assert_eq!(self.grid, other.grid, "fields must share a grid");
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    /// Periodic translation `f(. - shift)` through Fourier phase multipliers;
    /// exact for band-limited fields, `shift` need not be a lattice vector.
    pub fn translate(&self, shift: &[f64]) -> Field {
        assert_eq!(shift.len(), self.grid.dim());
        let n = self.grid.points_per_axis();
        let mut spec = self.spectrum();
        let rows: Vec<Vec<Complex64>> = shift
            .iter()
            .map(|s| {
                (0..n)
                    .map(|m| (-Complex64::i() * self.grid.wavenumber(m) * s).exp())
                    .collect()
            })
            .collect();
        for (flat, v) in spec.iter_mut().enumerate() {
            let idx = self.grid.multi_index(flat);
            for (axis, row) in rows.iter().enumerate() {
                *v *= row[idx[axis]];
            }
        }
        Self::from_spectrum(self.grid, spec)
    }

    /// Largest `|f|` over the boundary shell, relative to the global maximum.
    /// Zero field reports 0.
    pub fn boundary_amplitude_fraction(&self) -> f64 {
        let max = self.max_abs();
        if max == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for (i, v) in self.values.iter().enumerate() {
            if self.grid.in_boundary_shell(i, BOUNDARY_SHELL_FRAC) {
                worst = worst.max(v.norm());
            }
        }
        worst / max
    }

    /// Fraction of the total mass carried by the boundary shell.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let mut shell = 0.0;
        let mut total = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let m = v.norm_sqr();
            total += m;
            if self.grid.in_boundary_shell(i, BOUNDARY_SHELL_FRAC) {
                shell += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            shell / total
        }
    }

    /// Conformal rescaling `t^{N/2} f(t x)` by band-limited interpolation.
    ///
    /// Mass is preserved up to interpolation error. Fails with `DomainEscape`
    /// when the field carries amplitude near the boundary (the rescaled
    /// profile would alias around the box) or, for `t > 1`, when the result
    /// is no longer spectrally resolved.
    pub fn rescale_conformal(&self, t: f64) -> Result<Field> {
        assert!(t > 0.0 && t.is_finite(), "rescale factor must be positive");
        if t == 1.0 {
            return Ok(self.clone());
        }
        let boundary = self.boundary_amplitude_fraction();
        if boundary > RESCALE_ESCAPE_TOL {
            return Err(Error::DomainEscape(format!(
                "boundary amplitude fraction {boundary:.3e} exceeds {RESCALE_ESCAPE_TOL:.0e}"
            )));
        }

        let n = self.grid.points_per_axis();
        let dim = self.grid.dim();
        let mut data = self.spectrum();

        // Per-axis evaluation matrix of the trigonometric interpolant at the
        // stretched points: E[j, m] = e^{i k_m (t x_j + L)} / n. The +L offset
        // carries the (-1)^{m'} phase between DFT bins and physical modes; at
        // t = 1 the matrix reduces to the inverse DFT. Stretched points that
        // leave the box read the zero extension of f, not its periodic wrap;
        // the boundary check above bounds what that truncates.
        let half_width = self.grid.half_width();
        let matrix: Vec<Complex64> = {
            let mut e = Vec::with_capacity(n * n);
            for j in 0..n {
                let x = t * self.grid.coord(j);
                if !(-half_width..half_width).contains(&x) {
                    e.extend(std::iter::repeat(Complex64::default()).take(n));
                    continue;
                }
                for m in 0..n {
                    let k = self.grid.wavenumber(m);
                    e.push((Complex64::i() * k * (x + half_width)).exp() / n as f64);
                }
            }
            e
        };

        let mut line_in = vec![Complex64::default(); n];
        let mut line_out = vec![Complex64::default(); n];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            let block = n * stride;
            for base in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    for (j, v) in line_in.iter_mut().enumerate() {
                        *v = data[base + offset + j * stride];
                    }
                    for (j, out) in line_out.iter_mut().enumerate() {
                        let row = &matrix[j * n..(j + 1) * n];
                        let mut acc = Complex64::default();
                        for (e, v) in row.iter().zip(&line_in) {
                            acc += e * v;
                        }
                        *out = acc;
                    }
                    for (j, v) in line_out.iter().enumerate() {
                        data[base + offset + j * stride] = *v;
                    }
                }
            }
        }

        let amp = t.powf(dim as f64 / 2.0);
        for v in data.iter_mut() {
            *v *= amp;
        }
        let out = Field::new(self.grid, data);

        let out_boundary = out.boundary_amplitude_fraction();
        if out_boundary > RESCALE_ESCAPE_TOL {
            return Err(Error::DomainEscape(format!(
                "rescaled field reaches the boundary (amplitude fraction {out_boundary:.3e})"
            )));
        }
        if t > 1.0 {
            let tail = out.spectral_tail_fraction(0.75);
            if tail > RESCALE_ESCAPE_TOL {
                return Err(Error::DomainEscape(format!(
                    "rescaled field is under-resolved (spectral tail fraction {tail:.3e})"
                )));
            }
        }
        Ok(out)
    }

    /// Fraction of spectral energy above `frac * k_max` per axis.
    pub fn spectral_tail_fraction(&self, frac: f64) -> f64 {
        let spec = self.spectrum();
        let kmax = std::f64::consts::PI / self.grid.spacing();
        let cut = (frac * kmax).powi(2);
        let table = self.grid.k_squared_table();
        let mut tail = 0.0;
        let mut total = 0.0;
        for (v, &k2) in spec.iter().zip(&table) {
            let e = v.norm_sqr();
            total += e;
            if k2 > cut {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    /// Symmetric-decreasing rearrangement: the moduli of `f`, sorted
    /// descending, assigned to grid points by increasing distance from the
    /// origin (ties broken by index order). Preserves every `L^p` quadrature
    /// sum exactly.
    pub fn symmetric_decreasing_rearrangement(&self) -> Field {
        let mut moduli: Vec<f64> = self.values.iter().map(|v| v.norm()).collect();
        moduli.sort_unstable_by(|a, b| b.total_cmp(a));

        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_unstable_by(|&a, &b| {
            self.grid
                .radius_squared(a)
                .total_cmp(&self.grid.radius_squared(b))
                .then(a.cmp(&b))
        });

        let mut values = vec![Complex64::default(); self.values.len()];
        for (rank, &site) in order.iter().enumerate() {
            values[site] = Complex64::new(moduli[rank], 0.0);
        }
        Field {
            grid: self.grid,
            values,
        }
    }

    /// Writes the field in the `.fld` format: one JSON header line followed
    /// by little-endian interleaved (re, im) f64 pairs. Bit-exact round trip.
    pub fn write_fld(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        let header = FldHeader {
            dim: self.grid.dim(),
            points_per_axis: self.grid.points_per_axis(),
            half_width: self.grid.half_width(),
        };
        serde_json::to_writer(&mut w, &header).map_err(|e| Error::Format(e.to_string()))?;
        w.write_all(b"\n")?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_fld(path: &Path) -> Result<Field> {
        let file = std::fs::File::open(path)?;
        let mut r = BufReader::new(file);
        let mut header_line = String::new();
        r.read_line(&mut header_line)?;
        let header: FldHeader = serde_json::from_str(header_line.trim_end())
            .map_err(|e| Error::Format(format!("bad .fld header: {e}")))?;
        let grid = Grid::new(header.dim, header.points_per_axis, header.half_width)?;
        let mut buf = vec![0u8; grid.len() * 16];
        r.read_exact(&mut buf)?;
        let values = buf
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[0..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..16].try_into().unwrap()),
                )
            })
            .collect();
        Ok(Field::new(grid, values))
    }
}

#[derive(Serialize, Deserialize)]
struct FldHeader {
    dim: usize,
    points_per_axis: usize,
    half_width: f64,
}

/// `|x|^p` with fast paths for the exponents that dominate the energy loops.
pub(crate) fn pow_abs(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if p == 2.0 {
        x * x
    } else if p == 1.5 {
        x * x.sqrt()
    } else if p == 3.0 {
        x * x * x
    } else if p == 4.0 {
        let s = x * x;
        s * s
    } else if p == 6.0 {
        let s = x * x;
        s * s * s
    } else {
        x.powf(p)
    }
}

/// Best translation aligning `g` onto `f`: the `y` maximizing
/// `|<f, g(. - y)>|` over lattice shifts, refined to sub-grid precision by a
/// quadratic fit of the correlation peak along each axis.
pub fn best_translation_alignment(f: &Field, g: &Field) -> Vec<f64> {
    assert_eq!(f.grid(), g.grid(), "fields must share a grid");
    let grid = f.grid();
    let n = grid.points_per_axis();
    let fa = f.spectrum();
    let fb = g.spectrum();
    let mut prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(a, b)| a * b.conj()).collect();
    fft::inverse(&grid, &mut prod);
    // prod[j] is proportional to <f, g(. - x_j)> up to the quadrature weight

    let corr: Vec<f64> = prod.iter().map(|v| v.norm()).collect();
    let (best, _) = corr
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, &c)| if c > acc.1 { (i, c) } else { acc });

    let idx = grid.multi_index(best);
    let mut shift = Vec::with_capacity(grid.dim());
    for axis in 0..grid.dim() {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        let here = idx[axis];
        let plus = best - here * stride + ((here + 1) % n) * stride;
        let minus = best - here * stride + ((here + n - 1) % n) * stride;
        let c0 = corr[best];
        let cp = corr[plus];
        let cm = corr[minus];
        let denom = cm - 2.0 * c0 + cp;
        let delta = if denom.abs() > 1e-300 {
            (0.5 * (cm - cp) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        // x_j is the lattice shift; grid coordinate of index `here`
        shift.push(grid.coord(here) + grid.half_width() + delta * grid.spacing());
    }
    // coord() maps j to -L + j h but the correlation index is the shift itself,
    // so undo the -L offset and wrap into [-L, L)
    for s in shift.iter_mut() {
        if *s >= grid.half_width() {
            *s -= 2.0 * grid.half_width();
        }
    }
    shift
}

/// A pair of fields on one shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    first: Field,
    second: Field,
}

impl FieldPair {
    pub fn new(first: Field, second: Field) -> Self {
        assert_eq!(
            first.grid(),
            second.grid(),
            "pair components must share a grid"
        );
        Self { first, second }
    }

    pub fn grid(&self) -> Grid {
        self.first.grid()
    }

    pub fn first(&self) -> &Field {
        &self.first
    }

    pub fn second(&self) -> &Field {
        &self.second
    }

    pub fn components(&self) -> [&Field; 2] {
        [&self.first, &self.second]
    }

    pub fn into_components(self) -> (Field, Field) {
        (self.first, self.second)
    }

    pub fn masses(&self) -> (f64, f64) {
        (self.first.mass(), self.second.mass())
    }

    pub fn kinetic_total(&self) -> f64 {
        self.first.kinetic() + self.second.kinetic()
    }

    pub fn map(&self, f: impl Fn(&Field) -> Field) -> FieldPair {
        FieldPair::new(f(&self.first), f(&self.second))
    }

    /// Applies the conformal rescaling to both components.
    pub fn rescale_conformal(&self, t: f64) -> Result<FieldPair> {
        Ok(FieldPair::new(
            self.first.rescale_conformal(t)?,
            self.second.rescale_conformal(t)?,
        ))
    }

    pub fn h1_norm_sq(&self) -> f64 {
        self.first.h1_norm_sq() + self.second.h1_norm_sq()
    }
}

const _: () = assert!(MAX_DIM == 3);

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SQRT_PI: f64 = 1.772_453_850_905_515_9;

    fn grid_1d() -> Grid {
        Grid::new(1, 1024, 16.0).unwrap()
    }

    fn gaussian_1d() -> Field {
        Field::gaussian(grid_1d(), &[0.0], 1.0)
    }

    #[test]
    fn mass_of_zero_field_is_zero() {
        assert_eq!(Field::zeros(grid_1d()).mass(), 0.0);
    }

    #[test]
    fn mass_of_constant_is_exact() {
        let grid = Grid::new(2, 32, 4.0).unwrap();
        let c = Complex64::new(0.3, -0.4);
        let f = Field::from_fn(grid, |_| c);
        let expected = c.norm_sqr() * (2.0 * grid.half_width()).powi(2);
        assert!((f.mass() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn gaussian_mass_matches_closed_form() {
        // int e^{-x^2} = sqrt(pi)
        let f = gaussian_1d();
        assert!((f.mass() - SQRT_PI).abs() < 1e-12);
    }

    #[test]
    fn kinetic_of_constant_is_zero() {
        let grid = grid_1d();
        let f = Field::from_fn(grid, |_| Complex64::new(1.0, 0.0));
        assert!(f.kinetic().abs() < 1e-12);
    }

    #[test]
    fn kinetic_of_single_mode_matches_parseval() {
        let grid = grid_1d();
        let l = grid.half_width();
        let f = Field::from_fn(grid, |x| {
            Complex64::new((std::f64::consts::PI * x[0] / l).sin(), 0.0)
        });
        let expected = (std::f64::consts::PI / l).powi(2) * f.mass();
        assert!((f.kinetic() - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn gaussian_kinetic_matches_closed_form() {
        // int |d/dx e^{-x^2/2}|^2 = int x^2 e^{-x^2} = sqrt(pi)/2
        let f = gaussian_1d();
        assert!((f.kinetic() - SQRT_PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn parseval_holds_for_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in 1..=2usize {
            let grid = Grid::new(dim, 64, 8.0).unwrap();
            let f = Field::random_localized(grid, 0.5, &mut rng);
            let spec = f.spectrum();
            let spectral_mass = grid.volume_element() / grid.len() as f64
                * spec.iter().map(|v| v.norm_sqr()).sum::<f64>();
            let mass = f.mass();
            assert!((mass - spectral_mass).abs() < 1e-12 * mass.max(1e-300));
        }
    }

    #[test]
    fn rescale_identity_at_t_one() {
        let f = gaussian_1d();
        let g = f.rescale_conformal(1.0).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn rescale_preserves_mass() {
        let f = gaussian_1d();
        for t in [0.5, 2.0] {
            let g = f.rescale_conformal(t).unwrap();
            assert!(
                (g.mass() - f.mass()).abs() < 1e-8 * f.mass(),
                "t = {t}: {} vs {}",
                g.mass(),
                f.mass()
            );
        }
    }

    #[test]
    fn rescale_scales_kinetic_quadratically() {
        let f = gaussian_1d();
        let k0 = f.kinetic();
        for t in [0.5, 2.0] {
            let g = f.rescale_conformal(t).unwrap();
            let expected = t * t * k0;
            assert!(
                (g.kinetic() - expected).abs() < 1e-6 * expected,
                "t = {t}: {} vs {expected}",
                g.kinetic()
            );
        }
    }

    #[test]
    fn rescale_round_trip_on_band_limited_field() {
        let grid = Grid::new(1, 256, 8.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // narrow enough that the t = 0.5 leg still decays inside the box
        let f = Field::random_localized(grid, 0.2, &mut rng)
            .pointwise_mul(&Field::gaussian(grid, &[0.0], grid.half_width() / 16.0));
        for t in [0.5, 0.8, 1.3, 2.0] {
            let g = f
                .rescale_conformal(t)
                .and_then(|g| g.rescale_conformal(1.0 / t))
                .unwrap();
            let num: f64 = g
                .values()
                .iter()
                .zip(f.values())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            let den: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
            assert!(
                (num / den).sqrt() < 1e-7,
                "t = {t}: relative error {}",
                (num / den).sqrt()
            );
        }
    }

    #[test]
    fn rescale_rejects_boundary_heavy_fields() {
        let grid = Grid::new(1, 128, 4.0).unwrap();
        // wide Gaussian: visible amplitude at |x| = 4
        let f = Field::gaussian(grid, &[0.0], 3.0);
        assert!(matches!(
            f.rescale_conformal(0.5),
            Err(Error::DomainEscape(_))
        ));
    }

    #[test]
    fn rearrangement_fixes_centered_profiles() {
        let f = gaussian_1d();
        let g = f.symmetric_decreasing_rearrangement();
        let err: f64 = g
            .values()
            .iter()
            .zip(f.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-14, "rearranged centered gaussian moved: {err}");
    }

    #[test]
    fn rearrangement_preserves_mass_exactly_and_is_idempotent() {
        let grid = Grid::new(2, 32, 6.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Field::random_localized(grid, 0.4, &mut rng);
        let g = f.symmetric_decreasing_rearrangement();
        // same multiset of moduli, bit for bit
        let mut mf: Vec<u64> = f.values().iter().map(|v| v.norm().to_bits()).collect();
        let mut mg: Vec<u64> = g.values().iter().map(|v| v.norm().to_bits()).collect();
        mf.sort_unstable();
        mg.sort_unstable();
        assert_eq!(mf, mg);
        assert_eq!(g, g.symmetric_decreasing_rearrangement());
    }

    #[test]
    fn rearrangement_does_not_increase_kinetic_energy() {
        let f = Field::gaussian(grid_1d(), &[3.5], 1.0);
        let g = f.symmetric_decreasing_rearrangement();
        assert!(g.kinetic() <= f.kinetic() * (1.0 + 1e-12));
    }

    #[test]
    fn translate_by_zero_is_identity() {
        let f = gaussian_1d();
        let g = f.translate(&[0.0]);
        let err: f64 = g
            .values()
            .iter()
            .zip(f.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-13);
    }

    #[test]
    fn translate_preserves_mass() {
        let f = gaussian_1d();
        let g = f.translate(&[2.3]);
        assert!((g.mass() - f.mass()).abs() < 1e-12 * f.mass());
    }

    #[test]
    fn alignment_recovers_the_shift() {
        let f = gaussian_1d();
        let shifted = f.translate(&[1.234_567]);
        let y = best_translation_alignment(&shifted, &f);
        assert!(
            (y[0] - 1.234_567).abs() < grid_1d().spacing() / 2.0,
            "recovered {y:?}"
        );
    }

    #[test]
    fn alignment_works_in_two_dimensions() {
        let grid = Grid::new(2, 64, 8.0).unwrap();
        let f = Field::gaussian(grid, &[0.0, 0.0], 1.0);
        let shifted = f.translate(&[1.5, -2.25]);
        let y = best_translation_alignment(&shifted, &f);
        assert!((y[0] - 1.5).abs() < grid.spacing() / 2.0);
        assert!((y[1] + 2.25).abs() < grid.spacing() / 2.0);
    }

    #[test]
    fn fld_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.fld");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = Field::random_localized(Grid::new(1, 64, 3.5).unwrap(), 0.5, &mut rng);
        f.write_fld(&path).unwrap();
        let g = Field::read_fld(&path).unwrap();
        assert_eq!(f.grid(), g.grid());
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}
