//! Wave propagators, Cauchy solutions, and fixed-time decay scans.

use crate::error::{Error, Result};
use crate::fft::dft;
use crate::grid::{norm3, Field};
use crate::real::Real;
use crate::report::{band_ratio, fit_slope, SlopeReport};
use crate::symbols::{apply_symbol, SymbolSpec};
use num_complex::Complex;
use rayon::prelude::*;

/// Position and velocity data for the Cauchy problem, on one grid.
#[derive(Clone, Debug)]
pub struct CauchyData<T> {
    pub f: Field<T>,
    pub g: Field<T>,
}

impl<T: Real> CauchyData<T> {
    pub fn new(f: Field<T>, g: Field<T>) -> Result<Self> {
        if f.grid() != g.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { f, g })
    }
}

/// u(., t) = cos(2 pi t |xi|) f^ + sin(2 pi t |xi|)/(2 pi |xi|) g^.
pub fn wave_solution<T: Real>(data: &CauchyData<T>, t: T) -> Result<Field<T>> {
    if t < T::zero() {
        return Err(Error::InvalidParameter("wave_solution requires t >= 0".into()));
    }
    if t == T::zero() {
        return Ok(data.f.clone());
    }
    let from_f = apply_symbol(&data.f, &SymbolSpec::WaveCos { t })?;
    let from_g = apply_symbol(&data.g, &SymbolSpec::WaveSinc { t })?;
    from_f.axpy(Complex::new(T::one(), T::zero()), &from_g)
}

/// Time derivative of the solution: -2 pi |xi| sin(2 pi t |xi|) f^ + cos g^.
pub fn wave_time_derivative<T: Real>(data: &CauchyData<T>, t: T) -> Result<Field<T>> {
    let grid = *data.f.grid();
    let sf = dft(&data.f);
    let sg = dft(&data.g);
    let tp = T::of(2.0) * T::PI();
    let coeffs: Vec<Complex<T>> = (0..grid.size())
        .into_par_iter()
        .map(|i| {
            let omega = tp * norm3(grid.freq(i));
            let phase = t * omega;
            sg.coefficients()[i] * phase.cos() - sf.coefficients()[i] * (omega * phase.sin())
        })
        .collect();
    Ok(crate::fft::idft(&crate::grid::SpectralField::new(grid, coeffs)?))
}

/// ||u_t||_2^2 + ||grad u||_2^2 at time t, evaluated spectrally; constant in
/// t because every mode evolves by a rotation.
pub fn wave_energy<T: Real>(data: &CauchyData<T>, t: T) -> Result<T> {
    let grid = *data.f.grid();
    let sf = dft(&data.f);
    let sg = dft(&data.g);
    let tp = T::of(2.0) * T::PI();
    let sum = crate::real::compensated_sum((0..grid.size()).map(|i| {
        let omega = tp * norm3(grid.freq(i));
        let phase = t * omega;
        let (sin, cos) = (phase.sin(), phase.cos());
        let fhat = sf.coefficients()[i];
        let ghat = sg.coefficients()[i];
        // u^ = cos f^ + sin/omega g^;  u_t^ = -omega sin f^ + cos g^
        let ut = ghat * cos - fhat * (omega * sin);
        let grad = if omega == T::zero() {
            // |grad u|^ at DC is zero; the sinc limit contributes nothing
            Complex::new(T::zero(), T::zero())
        } else {
            (fhat * cos + ghat * (sin / omega)) * omega
        };
        ut.norm_sqr() + grad.norm_sqr()
    }));
    Ok(sum * grid.freq_cell_volume())
}

/// Fraction of |u|'s mass outside the centered ball of radius `r`.
pub fn mass_fraction_outside<T: Real>(u: &Field<T>, r: T) -> Result<T> {
    let total = u.lp_norm(T::one())?;
    if total == T::zero() {
        return Ok(T::zero());
    }
    let (outside, empty) = u.lp_norm_region(T::one(), r, T::infinity())?;
    if empty {
        return Ok(T::zero());
    }
    Ok(outside / total)
}

/// ||T_b^t a||_p across t with the -n/p' decay target. Each t must keep the
/// light cone inside the box: data radius + t + 4h within L/2.
pub fn dilated_multiplier_scan<T: Real>(
    atom: &crate::heat::AtomSpec<T>,
    b: T,
    p: T,
    t_values: &[T],
) -> Result<(Vec<(f64, f64)>, SlopeReport)> {
    let grid = *atom.field.grid();
    let data_radius = atom.ell / T::of(2.0);
    let margin = T::of(4.0) * grid.spacing();
    for &t in t_values {
        if data_radius + t + margin > grid.length() / T::of(2.0) {
            return Err(Error::InvalidParameter(format!(
                "light cone escapes the box at t = {:?}",
                t.to_f64()
            )));
        }
    }
    let rows: Vec<(f64, f64)> = t_values
        .par_iter()
        .map(|&t| {
            let out = apply_symbol(&atom.field, &SymbolSpec::DilatedTb { b, t })?;
            Ok((t.to_f64().unwrap(), out.lp_norm(p)?.to_f64().unwrap()))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = grid.dim() as f64;
    let pf = p.to_f64().unwrap();
    // -n/p' with the p = 1 branch (p' = infinity) taken exactly
    let target = if pf == 1.0 { 0.0 } else { -n * (1.0 - 1.0 / pf) };
    let report = fit_slope(&rows, target)?;
    Ok((rows, report))
}

/// Data preparation for the decay scan: f (and/or g) defined as the inverse
/// Bessel-symbol image of an atom at the reference time, so that the
/// hypothesis "(I - t^2 Lap)^{b_p/2} f is an atom" holds by construction.
pub fn prepare_bessel_data<T: Real>(
    atom_f: Option<&crate::heat::AtomSpec<T>>,
    atom_g: Option<&crate::heat::AtomSpec<T>>,
    bp: T,
    t_ref: T,
) -> Result<CauchyData<T>> {
    let grid = match (atom_f, atom_g) {
        (Some(a), _) => *a.field.grid(),
        (_, Some(a)) => *a.field.grid(),
        (None, None) => return Err(Error::InvalidParameter("no data supplied".into())),
    };
    let inverse_bessel = |field: &Field<T>, order: T, scale: T| -> Result<Field<T>> {
        let s = dft(field);
        let tp = T::of(2.0) * T::PI();
        let out = s.multiply(|xi| {
            let w = (T::one() + (tp * t_ref * norm3(xi)).powi(2)).powf(-order / T::of(2.0));
            Complex::new(scale * w, T::zero())
        })?;
        Ok(crate::fft::idft(&out))
    };
    let f = match atom_f {
        Some(a) => inverse_bessel(&a.field, bp, T::one())?,
        None => Field::zeros(grid),
    };
    let g = match atom_g {
        // g = t^{-1} (I - t^2 Lap)^{-(b_p - 1)/2} a
        Some(a) => inverse_bessel(&a.field, bp - T::one(), t_ref.recip())?,
        None => Field::zeros(grid),
    };
    CauchyData::new(f, g)
}

/// One decay-scan row: t, ||u||_p, and the compensated value t^{n/p'} ||u||_p.
#[derive(Clone, Debug)]
pub struct DecayRow {
    pub t: f64,
    pub norm_p: f64,
    pub scaled: f64,
}

pub struct CauchyDecayScan {
    pub rows: Vec<DecayRow>,
    pub band_ratio: f64,
    /// Fit of log ||u||_p vs log t (target -n/p'; +1 in the n=3, f=0, p=1
    /// special case where the L1 norm grows linearly).
    pub fit: SlopeReport,
}

pub fn cauchy_decay_scan<T: Real>(
    data: &CauchyData<T>,
    p: T,
    t_values: &[T],
    l1_growth_case: bool,
) -> Result<CauchyDecayScan> {
    let grid = *data.f.grid();
    let n = grid.dim() as f64;
    let pf = p.to_f64().unwrap();
    let decay = if pf == 1.0 { 0.0 } else { n * (1.0 - 1.0 / pf) };
    let rows: Vec<DecayRow> = t_values
        .par_iter()
        .map(|&t| {
            let u = wave_solution(data, t)?;
            let norm_p = u.lp_norm(p)?.to_f64().unwrap();
            let tf = t.to_f64().unwrap();
            Ok(DecayRow { t: tf, norm_p, scaled: tf.powf(decay) * norm_p })
        })
        .collect::<Result<Vec<_>>>()?;
    let scaled: Vec<f64> = rows.iter().map(|r| r.scaled).collect();
    let target = if l1_growth_case { 1.0 } else { -decay };
    let fit = fit_slope(&rows.iter().map(|r| (r.t, r.norm_p)).collect::<Vec<_>>(), target)?;
    Ok(CauchyDecayScan { band_ratio: band_ratio(&scaled)?, rows, fit })
}
