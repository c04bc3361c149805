//! Centered discrete Fourier transforms between [`Field`] and [`SpectralField`].
//!
//! Forward: F(xi_m) = h^n sum_k f(x_k) e^{-2 pi i xi_m . x_k} with both
//! lattices centered on zero. For even N the centered transform equals a
//! half-rotation of storage along every axis, followed by the standard FFT,
//! followed by the same half-rotation; the inverse applies the conjugate
//! transform scaled by 1/L^n, so dft -> idft is an exact round trip.

use crate::grid::{Field, GridSpec, SpectralField};
use crate::real::Real;
use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Rotate storage by N/2 along every axis in place (self-inverse for even N).
fn half_rotate<T: Real>(grid: &GridSpec<T>, data: &mut [Complex<T>]) {
    let npts = grid.points();
    let half = npts / 2;
    let rotated: Vec<Complex<T>> = (0..data.len())
        .into_par_iter()
        .map(|flat| {
            let mut idx = grid.unravel(flat);
            for a in 0..grid.dim() {
                idx[a] = (idx[a] + half) % npts;
            }
            data[grid.ravel(idx)]
        })
        .collect();
    data.copy_from_slice(&rotated);
}

/// Move the leading axis to the back: out[i1,..,i_{n-1},i0] = in[i0,..,i_{n-1}].
fn rotate_axes_forward<T: Real>(grid: &GridSpec<T>, data: &mut [Complex<T>]) {
    let npts = grid.points();
    let rotated: Vec<Complex<T>> = if grid.dim() == 2 {
        (0..data.len())
            .into_par_iter()
            .map(|flat| {
                let (i1, i0) = (flat / npts, flat % npts);
                data[i0 * npts + i1]
            })
            .collect()
    } else {
        (0..data.len())
            .into_par_iter()
            .map(|flat| {
                let i0 = flat % npts;
                let i2 = (flat / npts) % npts;
                let i1 = flat / (npts * npts);
                data[(i0 * npts + i1) * npts + i2]
            })
            .collect()
    };
    data.copy_from_slice(&rotated);
}

/// Apply a 1-d transform along the last (contiguous) axis of every line.
fn transform_rows<T: Real>(npts: usize, data: &mut [Complex<T>], fft: &Arc<dyn Fft<T>>) {
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(npts).for_each_init(
        || vec![Complex::new(T::zero(), T::zero()); scratch_len],
        |scratch, row| fft.process_with_scratch(row, scratch),
    );
}

fn transform_all_axes<T: Real>(grid: &GridSpec<T>, data: &mut [Complex<T>], forward: bool) {
    let mut planner = FftPlanner::<T>::new();
    let fft = if forward {
        planner.plan_fft_forward(grid.points())
    } else {
        planner.plan_fft_inverse(grid.points())
    };
    for _ in 0..grid.dim() {
        transform_rows(grid.points(), data, &fft);
        rotate_axes_forward(grid, data);
    }
}

/// Forward centered transform, scaled by the cell volume h^n.
pub fn dft<T: Real>(f: &Field<T>) -> SpectralField<T> {
    let grid = *f.grid();
    let mut data = f.values().to_vec();
    half_rotate(&grid, &mut data);
    transform_all_axes(&grid, &mut data, true);
    half_rotate(&grid, &mut data);
    let scale = grid.cell_volume();
    data.par_iter_mut().for_each(|v| *v = *v * scale);
    SpectralField::new(grid, data).expect("same size")
}

/// Inverse centered transform, scaled by 1/L^n.
pub fn idft<T: Real>(s: &SpectralField<T>) -> Field<T> {
    let grid = *s.grid();
    let mut data = s.coefficients().to_vec();
    half_rotate(&grid, &mut data);
    transform_all_axes(&grid, &mut data, false);
    half_rotate(&grid, &mut data);
    let scale = T::one() / grid.length().powi(grid.dim() as i32);
    data.par_iter_mut().for_each(|v| *v = *v * scale);
    Field::new(grid, data).expect("same size")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::norm3;
    use crate::real::compensated_sum;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    /// Brute-force O(M^2) centered DFT used as the transform oracle.
    fn dft_oracle(f: &Field<f64>) -> Vec<Complex<f64>> {
        let g = *f.grid();
        let hn = g.cell_volume();
        (0..g.size())
            .map(|m| {
                let xi = g.freq(m);
                let mut acc = Complex::new(0.0, 0.0);
                for k in 0..g.size() {
                    let x = g.point(k);
                    let phase =
                        -2.0 * std::f64::consts::PI * (xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2]);
                    acc += f.values()[k] * Complex::new(phase.cos(), phase.sin());
                }
                acc * hn
            })
            .collect()
    }

    fn random_field(g: GridSpec<f64>, seed: u64) -> Field<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let values = (0..g.size())
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Field::new(g, values).unwrap()
    }

    #[test]
    fn matches_brute_force_oracle_2d() {
        let g = GridSpec::new(2, 16, 4.0).unwrap();
        let f = random_field(g, 7);
        let fast = dft(&f);
        let slow = dft_oracle(&f);
        let err = fast
            .coefficients()
            .iter()
            .zip(&slow)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "err = {err}");
    }

    #[test]
    fn matches_brute_force_oracle_3d() {
        let g = GridSpec::new(3, 8, 2.0).unwrap();
        let f = random_field(g, 11);
        let fast = dft(&f);
        let slow = dft_oracle(&f);
        let err = fast
            .coefficients()
            .iter()
            .zip(&slow)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-13, "err = {err}");
    }

    #[test]
    fn pure_mode_lands_on_single_coefficient() {
        // f(x) = e^{2 pi i (2 x_0 - x_1)/L}: coefficient h^n * N^n = L^n at
        // xi = (2/L, -1/L), zero elsewhere.
        let g = GridSpec::new(2, 32, 8.0).unwrap();
        let l = g.length();
        let f = Field::from_fn(g, |x| {
            let phase = 2.0 * std::f64::consts::PI * (2.0 * x[0] - x[1]) / l;
            Complex::new(phase.cos(), phase.sin())
        });
        let s = dft(&f);
        for i in 0..g.size() {
            let xi = g.freq(i);
            let expected = if (xi[0] - 2.0 / l).abs() < 1e-12 && (xi[1] + 1.0 / l).abs() < 1e-12 {
                l * l
            } else {
                0.0
            };
            assert!(
                (s.coefficients()[i] - Complex::new(expected, 0.0)).norm() < 1e-9,
                "xi = {xi:?}"
            );
        }
    }

    #[test]
    fn gaussian_transform_is_gaussian() {
        // e^{-pi |x|^2} is its own Fourier transform in this convention.
        let g = GridSpec::new(2, 128, 16.0).unwrap();
        let f = Field::from_real_fn(g, |x| (-std::f64::consts::PI * (x[0] * x[0] + x[1] * x[1])).exp());
        let s = dft(&f);
        let err = (0..g.size())
            .map(|i| {
                let xi = g.freq(i);
                let expected = (-std::f64::consts::PI * norm3(xi).powi(2)).exp();
                (s.coefficients()[i] - Complex::new(expected, 0.0)).norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "err = {err}");
    }

    #[test]
    fn roundtrip_and_plancherel() {
        let g = GridSpec::new(2, 64, 4.0).unwrap();
        for seed in 0..5 {
            let f = random_field(g, seed);
            let s = dft(&f);
            let back = idft(&s);
            assert!(f.max_difference(&back).unwrap() < 1e-13);
            let space = compensated_sum(f.values().iter().map(|v| v.norm_sqr())) * g.cell_volume();
            let freq = s.l2_norm().powi(2);
            assert!((space - freq).abs() < 1e-12 * space);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn dft_is_linear(seed_a in 0u64..1000, seed_b in 1000u64..2000,
                         re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let g = GridSpec::new(2, 16, 2.0).unwrap();
            let fa = random_field(g, seed_a);
            let fb = random_field(g, seed_b);
            let c = Complex::new(re, im);
            let lhs = dft(&fa.axpy(c, &fb).unwrap());
            let sa = dft(&fa);
            let sb = dft(&fb);
            let err = lhs.coefficients().iter()
                .zip(sa.coefficients().iter().zip(sb.coefficients()))
                .map(|(l, (a, b))| (l - (a + c * b)).norm())
                .fold(0.0, f64::max);
            prop_assert!(err < 1e-12);
        }
    }
}
