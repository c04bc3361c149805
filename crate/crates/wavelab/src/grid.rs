//! Origin-centered periodic sampling grids and sampled complex fields.
//!
//! Shift convention (the one place it is documented): along every axis the
//! storage index `i in 0..N` corresponds to the centered integer coordinate
//! `k = i - N/2`, so grid points are `x_k = k*h` with `h = L/N` and the
//! frequency lattice is `xi_m = m/L`, both covering `[-N/2, N/2)`. The DC
//! mode therefore sits at storage index `N/2` along each axis, and the
//! transforms in [`crate::fft`] move it to/from index 0 with an explicit
//! half-rotation.

use crate::error::{Error, Result};
use crate::real::{compensated_sum, Real};
use num_complex::Complex;
use rayon::prelude::*;

/// Sampling grid for a torus of side `length` in dimension `n` (2 or 3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<T> {
    n: usize,
    points: usize,
    length: T,
}

impl<T: Real> GridSpec<T> {
    pub fn new(n: usize, points: usize, length: T) -> Result<Self> {
        if n < 2 || n > 3 {
            return Err(Error::InvalidGrid(format!("dimension must be 2 or 3, got {n}")));
        }
        if points < 8 || points % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {points}"
            )));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidGrid("side length must be positive and finite".into()));
        }
        Ok(Self { n, points, length })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Points per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    /// Physical side length L.
    pub fn length(&self) -> T {
        self.length
    }

    /// Grid spacing h = L/N.
    pub fn spacing(&self) -> T {
        self.length / T::of(self.points as f64)
    }

    /// Frequency lattice spacing 1/L.
    pub fn freq_spacing(&self) -> T {
        T::one() / self.length
    }

    /// Largest resolvable frequency radius N/(2L) along an axis.
    pub fn nyquist(&self) -> T {
        T::of(self.points as f64) / (T::of(2.0) * self.length)
    }

    /// Total number of samples N^n.
    pub fn size(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    /// Cell volume h^n.
    pub fn cell_volume(&self) -> T {
        self.spacing().powi(self.n as i32)
    }

    /// Frequency cell volume (1/L)^n.
    pub fn freq_cell_volume(&self) -> T {
        self.freq_spacing().powi(self.n as i32)
    }

    /// Decompose a flat row-major index into per-axis storage indices.
    #[inline]
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let npts = self.points;
        match self.n {
            2 => [flat / npts, flat % npts, 0],
            _ => [flat / (npts * npts), (flat / npts) % npts, flat % npts],
        }
    }

    #[inline]
    pub fn ravel(&self, idx: [usize; 3]) -> usize {
        let npts = self.points;
        match self.n {
            2 => idx[0] * npts + idx[1],
            _ => (idx[0] * npts + idx[1]) * npts + idx[2],
        }
    }

    /// Spatial point for a flat index; unused trailing components are zero.
    #[inline]
    pub fn point(&self, flat: usize) -> [T; 3] {
        let idx = self.unravel(flat);
        let h = self.spacing();
        let half = (self.points / 2) as i64;
        let mut x = [T::zero(); 3];
        for a in 0..self.n {
            x[a] = T::of((idx[a] as i64 - half) as f64) * h;
        }
        x
    }

    /// Frequency lattice point for a flat index.
    #[inline]
    pub fn freq(&self, flat: usize) -> [T; 3] {
        let idx = self.unravel(flat);
        let df = self.freq_spacing();
        let half = (self.points / 2) as i64;
        let mut xi = [T::zero(); 3];
        for a in 0..self.n {
            xi[a] = T::of((idx[a] as i64 - half) as f64) * df;
        }
        xi
    }

    /// Flat index of the spatial origin / DC frequency.
    pub fn origin_index(&self) -> usize {
        let half = self.points / 2;
        self.ravel([half, half, if self.n == 3 { half } else { 0 }])
    }

    /// Flat index of the grid point nearest to `x` (components snapped per axis).
    pub fn nearest_index(&self, x: [T; 3]) -> usize {
        let h = self.spacing();
        let half = (self.points / 2) as i64;
        let mut idx = [0usize; 3];
        for a in 0..self.n {
            let k = (x[a] / h).round().to_f64().unwrap() as i64;
            let k = k.clamp(-half, half - 1);
            idx[a] = (k + half) as usize;
        }
        self.ravel(idx)
    }

    /// Snap a point to the exact coordinates of its nearest grid point.
    pub fn snap(&self, x: [T; 3]) -> [T; 3] {
        self.point(self.nearest_index(x))
    }
}

pub fn norm3<T: Real>(v: [T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Complex-valued sampled function on a [`GridSpec`].
#[derive(Clone, Debug)]
pub struct Field<T> {
    grid: GridSpec<T>,
    values: Vec<Complex<T>>,
}

/// Coefficients on the dual frequency lattice, same storage layout.
#[derive(Clone, Debug)]
pub struct SpectralField<T> {
    grid: GridSpec<T>,
    coefficients: Vec<Complex<T>>,
}

impl<T: Real> Field<T> {
    pub fn new(grid: GridSpec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.size() {
            return Err(Error::SizeMismatch { got: values.len(), expected: grid.size() });
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec<T>) -> Self {
        Self { grid, values: vec![Complex::new(T::zero(), T::zero()); grid.size()] }
    }

    /// Sample a function of the spatial point.
    pub fn from_fn(grid: GridSpec<T>, f: impl Fn([T; 3]) -> Complex<T> + Sync) -> Self {
        let values = (0..grid.size())
            .into_par_iter()
            .map(|i| f(grid.point(i)))
            .collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: GridSpec<T>, f: impl Fn([T; 3]) -> T + Sync) -> Self {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    /// Pointwise linear combination; grids must match.
    pub fn axpy(&self, alpha: Complex<T>, other: &Field<T>) -> Result<Field<T>> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(a, b)| *a + alpha * *b)
            .collect();
        Ok(Field { grid: self.grid, values })
    }

    pub fn scale(&self, c: Complex<T>) -> Field<T> {
        Field { grid: self.grid, values: self.values.par_iter().map(|v| c * *v).collect() }
    }

    /// h^n * sum of values (trapezoid-free Riemann quadrature of the integral).
    pub fn integral(&self) -> Complex<T> {
        let re = compensated_sum(self.values.iter().map(|v| v.re));
        let im = compensated_sum(self.values.iter().map(|v| v.im));
        Complex::new(re, im) * self.grid.cell_volume()
    }

    pub fn sup_norm(&self) -> T {
        self.values
            .par_iter()
            .map(|v| v.norm())
            .reduce(|| T::zero(), |a, b| if a > b { a } else { b })
    }

    /// L^p quadrature norm: (h^n sum |f|^p)^{1/p}, or the max for p = inf.
    pub fn lp_norm(&self, p: T) -> Result<T> {
        if p < T::one() {
            return Err(Error::InvalidParameter(format!(
                "lp_norm requires p >= 1, got {:?}",
                p.to_f64()
            )));
        }
        if p.is_infinite() {
            return Ok(self.sup_norm());
        }
        let sum = compensated_sum(self.values.iter().map(|v| v.norm().powf(p)));
        Ok((sum * self.grid.cell_volume()).powf(T::one() / p))
    }

    /// Same quadrature restricted to the radial annulus r_lo <= |x| < r_hi
    /// (centered coordinates, so |x| is the minimal-image distance to the
    /// origin). Returns the norm and whether the region was empty.
    pub fn lp_norm_region(&self, p: T, r_lo: T, r_hi: T) -> Result<(T, bool)> {
        if p < T::one() {
            return Err(Error::InvalidParameter("lp_norm_region requires p >= 1".into()));
        }
        if r_lo < T::zero() || r_hi < r_lo {
            return Err(Error::InvalidParameter("annulus needs 0 <= r_lo <= r_hi".into()));
        }
        let grid = self.grid;
        let in_region = |i: usize| {
            let r = norm3(grid.point(i));
            r >= r_lo && r < r_hi
        };
        let count: usize = (0..grid.size()).into_par_iter().filter(|&i| in_region(i)).count();
        if count == 0 {
            return Ok((T::zero(), true));
        }
        if p.is_infinite() {
            let m = (0..grid.size())
                .into_par_iter()
                .filter(|&i| in_region(i))
                .map(|i| self.values[i].norm())
                .reduce(|| T::zero(), |a, b| if a > b { a } else { b });
            return Ok((m, false));
        }
        let sum = compensated_sum(
            (0..grid.size())
                .filter(|&i| in_region(i))
                .map(|i| self.values[i].norm().powf(p)),
        );
        Ok(((sum * grid.cell_volume()).powf(T::one() / p), false))
    }

    /// Mass of |f| outside the axis-aligned cube of side `side` centered at `center`.
    pub fn mass_outside_cube(&self, center: [T; 3], side: T) -> T {
        let grid = self.grid;
        let half = side / T::of(2.0);
        let tol = grid.spacing() * T::of(1e-9);
        let sum = compensated_sum((0..grid.size()).filter_map(|i| {
            let x = grid.point(i);
            let inside = (0..grid.dim()).all(|a| (x[a] - center[a]).abs() <= half + tol);
            if inside {
                None
            } else {
                Some(self.values[i].norm())
            }
        }));
        sum * grid.cell_volume()
    }

    pub fn max_difference(&self, other: &Field<T>) -> Result<T> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(a, b)| (*a - *b).norm())
            .reduce(|| T::zero(), |x, y| if x > y { x } else { y }))
    }
}

impl<T: Real> SpectralField<T> {
    pub fn new(grid: GridSpec<T>, coefficients: Vec<Complex<T>>) -> Result<Self> {
        if coefficients.len() != grid.size() {
            return Err(Error::SizeMismatch { got: coefficients.len(), expected: grid.size() });
        }
        Ok(Self { grid, coefficients })
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Complex<T>> {
        self.coefficients
    }

    /// Multiply each coefficient by a function of the frequency point.
    /// Errors if the multiplier produces a non-finite value.
    pub fn multiply(&self, m: impl Fn([T; 3]) -> Complex<T> + Sync) -> Result<SpectralField<T>> {
        let grid = self.grid;
        let coefficients: Vec<Complex<T>> = self
            .coefficients
            .par_iter()
            .enumerate()
            .map(|(i, c)| *c * m(grid.freq(i)))
            .collect();
        if let Some(i) =
            coefficients.iter().position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            let xi = grid.freq(i);
            return Err(Error::NonFiniteSymbol {
                xi: [
                    xi[0].to_f64().unwrap_or(f64::NAN),
                    xi[1].to_f64().unwrap_or(f64::NAN),
                    xi[2].to_f64().unwrap_or(f64::NAN),
                ],
            });
        }
        Ok(SpectralField { grid, coefficients })
    }

    /// l2-quadrature norm on the frequency lattice: ((1/L)^n sum |F|^2)^{1/2}.
    pub fn l2_norm(&self) -> T {
        let sum = compensated_sum(self.coefficients.iter().map(|c| c.norm_sqr()));
        (sum * self.grid.freq_cell_volume()).sqrt()
    }
}
