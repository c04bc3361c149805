//! Dyadic frequency decomposition: annulus bumps, kernel pieces, projectors,
//! and the kernel norm-growth scan.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::real::Real;
use crate::report::{fit_slope, SlopeReport};
use crate::symbols::{eval_phi_j, eval_tilde_symbol, tabulate_kernel, SymbolSpec};
use rayon::prelude::*;

pub use crate::symbols::{eval_big_phi, eval_phi};

/// A dyadic index is resolvable when its annulus sits safely inside the
/// frequency lattice: 2^{j+1} <= 0.9 * Nyquist radius.
pub fn resolvable<T: Real>(grid: &GridSpec<T>, j: i32) -> bool {
    T::of(2.0f64.powi(j + 1)) <= T::of(0.9) * grid.nyquist()
}

fn require_resolvable<T: Real>(grid: &GridSpec<T>, j: i32) -> Result<()> {
    if resolvable(grid, j) {
        Ok(())
    } else {
        Err(Error::UnresolvableDyadicIndex { j })
    }
}

/// One dyadic piece of the tilde symbol: m_b(xi) * phi_j(xi).
pub fn lp_piece_symbol<T: Real>(xi: [T; 3], j: i32, b: T) -> num_complex::Complex<T> {
    eval_tilde_symbol(xi, b) * eval_phi_j(xi, j)
}

/// Discrete kernel of the j-th piece.
pub fn lp_kernel<T: Real>(j: i32, b: T, grid: GridSpec<T>) -> Result<Field<T>> {
    require_resolvable(&grid, j)?;
    tabulate_kernel(&SymbolSpec::LpPiece { j, b }, grid)
}

/// Band-pass projector with symbol phi_{j-1} + phi_j + phi_{j+1}; reproduces
/// anything whose spectrum lies in the support of phi_j.
pub fn tilde_projector<T: Real>(f: &Field<T>, j: i32) -> Result<Field<T>> {
    let s = crate::fft::dft(f);
    let out = s.multiply(|xi| {
        let v = eval_phi_j(xi, j - 1) + eval_phi_j(xi, j) + eval_phi_j(xi, j + 1);
        num_complex::Complex::new(v, T::zero())
    })?;
    Ok(crate::fft::idft(&out))
}

/// One row of a kernel norm scan.
#[derive(Clone, Debug)]
pub struct KernelNormRow {
    pub j: i32,
    pub q: f64,
    pub b: f64,
    pub alpha: [u32; 3],
    pub norm: f64,
    pub log2_norm: f64,
}

/// Measure ||d^alpha K_b^j||_q across j and fit the growth rate in log2 scale.
/// The derivative is taken spectrally via the factor (2 pi i xi)^alpha.
pub fn kernel_norm_scan<T: Real>(
    grid: GridSpec<T>,
    j_range: std::ops::RangeInclusive<i32>,
    q: T,
    b: T,
    alpha: [u32; 3],
) -> Result<(Vec<KernelNormRow>, SlopeReport)> {
    let js: Vec<i32> = j_range.collect();
    if js.len() < 3 {
        return Err(Error::DegenerateFit(js.len()));
    }
    for &j in &js {
        require_resolvable(&grid, j)?;
    }
    let norms: Vec<T> = js
        .par_iter()
        .map(|&j| {
            let spec = [
                SymbolSpec::LpPiece { j, b },
                SymbolSpec::DerivativeMonomial { alpha },
            ];
            let s = crate::symbols::tabulate_symbol(&spec[0], grid)?;
            let s = s.multiply(|xi| spec[1].eval(xi))?;
            crate::fft::idft(&s).lp_norm(q)
        })
        .collect::<Result<Vec<T>>>()?;
    let order = alpha.iter().sum::<u32>() as f64;
    let n = grid.dim() as f64;
    let qf = q.to_f64().unwrap();
    let bf = b.to_f64().unwrap();
    let inv_q = if qf.is_infinite() { 0.0 } else { 1.0 / qf };
    let target = (n + 1.0) / 2.0 - inv_q - bf + order;
    let points: Vec<(f64, f64)> = js
        .iter()
        .zip(&norms)
        .map(|(&j, &nm)| (2.0f64.powi(j), nm.to_f64().unwrap()))
        .collect();
    // ln-based fit of y vs x = 2^j gives the same exponent as log2 vs j
    let report = fit_slope(&points, target)?;
    let rows = js
        .iter()
        .zip(&norms)
        .map(|(&j, &nm)| {
            let v = nm.to_f64().unwrap();
            KernelNormRow { j, q: qf, b: bf, alpha, norm: v, log2_norm: v.log2() }
        })
        .collect();
    Ok((rows, report))
}

/// Max lattice deviation of sum_j phi_j from 1 over nonzero frequencies that
/// the summation range covers.
pub fn partition_of_unity_deviation<T: Real>(grid: &GridSpec<T>, j_min: i32, j_max: i32) -> T {
    (0..grid.size())
        .into_par_iter()
        .map(|i| {
            let xi = grid.freq(i);
            let r = crate::grid::norm3(xi);
            let lo = T::of(2.0f64.powi(j_min));
            let hi = T::of(2.0f64.powi(j_max));
            if r <= lo || r >= hi {
                return T::zero();
            }
            let mut sum = T::zero();
            for j in j_min..=j_max {
                sum = sum + eval_phi_j(xi, j);
            }
            (sum - T::one()).abs()
        })
        .reduce(|| T::zero(), |a, b| if a > b { a } else { b })
}
