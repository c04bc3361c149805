//! Discrete sharp maximal function, its truncations, the measurable
//! linearization U_ell, and the BMO boundedness probe.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::real::Real;
use crate::report::band_ratio;
use crate::symbols::{apply_symbol, SymbolSpec};
use num_complex::Complex;
use rayon::prelude::*;

/// Grid-representable ball radii for the truncation level `ell`:
/// multiples of h inside [1/ell, ell], capped at L/4.
#[derive(Clone, Debug)]
pub struct RadiusLadder<T> {
    pub ell: T,
    pub radii: Vec<T>,
}

impl<T: Real> RadiusLadder<T> {
    pub fn new(grid: &GridSpec<T>, ell: T) -> Result<Self> {
        if ell < T::of(2.0) {
            return Err(Error::InvalidParameter("truncation level must be >= 2".into()));
        }
        let h = grid.spacing();
        let lo = if ell.recip() > h { ell.recip() } else { h };
        let cap = grid.length() / T::of(4.0);
        let hi = if ell < cap { ell } else { cap };
        let radii = Self::multiples(h, lo, hi);
        if radii.is_empty() {
            return Err(Error::InvalidParameter("radius ladder is empty".into()));
        }
        Ok(Self { ell, radii })
    }

    /// The maximal ladder: every representable radius up to L/4.
    pub fn saturated(grid: &GridSpec<T>) -> Result<Self> {
        let h = grid.spacing();
        let cap = grid.length() / T::of(4.0);
        let radii = Self::multiples(h, h, cap);
        if radii.is_empty() {
            return Err(Error::InvalidParameter("radius ladder is empty".into()));
        }
        Ok(Self { ell: T::infinity(), radii })
    }

    fn multiples(h: T, lo: T, hi: T) -> Vec<T> {
        let mut radii = Vec::new();
        let mut k = (lo / h).ceil().to_f64().unwrap().max(1.0) as usize;
        loop {
            let r = h * T::of(k as f64);
            if r > hi * (T::one() + T::of(1e-12)) {
                break;
            }
            radii.push(r);
            k += 1;
        }
        radii
    }
}

/// Precomputed ball geometry: lattice offsets sorted by distance, with the
/// number of points inside each ladder radius (boundary ties included).
struct BallGeometry {
    /// per-axis offsets, sorted by distance from the center
    offsets: Vec<[i32; 3]>,
    /// for each ladder radius, how many leading offsets fall inside
    counts: Vec<usize>,
}

fn ball_geometry<T: Real>(grid: &GridSpec<T>, radii: &[T]) -> BallGeometry {
    let h = grid.spacing().to_f64().unwrap();
    let r_max = radii.last().unwrap().to_f64().unwrap();
    let reach = (r_max / h).floor() as i32;
    let tol = 1.0 + 1e-12;
    let mut with_dist: Vec<(f64, [i32; 3])> = Vec::new();
    let k_range = || -reach..=reach;
    if grid.dim() == 2 {
        for i in k_range() {
            for j in k_range() {
                let d = h * ((i * i + j * j) as f64).sqrt();
                if d <= r_max * tol {
                    with_dist.push((d, [i, j, 0]));
                }
            }
        }
    } else {
        for i in k_range() {
            for j in k_range() {
                for k in k_range() {
                    let d = h * ((i * i + j * j + k * k) as f64).sqrt();
                    if d <= r_max * tol {
                        with_dist.push((d, [i, j, k]));
                    }
                }
            }
        }
    }
    with_dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let counts = radii
        .iter()
        .map(|&r| {
            let rf = r.to_f64().unwrap() * tol;
            with_dist.partition_point(|(d, _)| *d <= rf)
        })
        .collect();
    BallGeometry { offsets: with_dist.into_iter().map(|(_, o)| o).collect(), counts }
}

fn gather<T: Real>(
    grid: &GridSpec<T>,
    values: &[Complex<T>],
    center: [usize; 3],
    geometry: &BallGeometry,
    out: &mut Vec<Complex<T>>,
) {
    let npts = grid.points() as i32;
    out.clear();
    for o in &geometry.offsets {
        let mut idx = [0usize; 3];
        for a in 0..grid.dim() {
            idx[a] = ((center[a] as i32 + o[a]).rem_euclid(npts)) as usize;
        }
        out.push(values[grid.ravel(idx)]);
    }
}

/// Mean of f over the grid points within min-image distance r of the point
/// with flat index `center` (boundary ties included). Requires r >= h.
pub fn ball_average<T: Real>(f: &Field<T>, center: usize, r: T) -> Result<Complex<T>> {
    let grid = *f.grid();
    if r < grid.spacing() {
        return Err(Error::InvalidParameter("ball radius below grid spacing".into()));
    }
    if r > grid.length() / T::of(2.0) {
        return Err(Error::InvalidParameter("ball radius exceeds half the box".into()));
    }
    let geometry = ball_geometry(&grid, &[r]);
    let mut vals = Vec::new();
    gather(&grid, f.values(), grid.unravel(center), &geometry, &mut vals);
    let m = T::of(vals.len() as f64);
    let sum = vals.iter().fold(Complex::new(T::zero(), T::zero()), |a, v| a + *v);
    Ok(sum / m)
}

/// Mean deviations of the gathered values for every ladder radius:
/// dev_i = mean over the i-th ball of |f - (ball mean)|.
fn mean_deviations<T: Real>(vals: &[Complex<T>], counts: &[usize], out: &mut Vec<T>) {
    out.clear();
    let mut prefix = Complex::new(T::zero(), T::zero());
    let mut taken = 0usize;
    let mut prefix_at = Vec::with_capacity(counts.len());
    for &m in counts {
        while taken < m {
            prefix = prefix + vals[taken];
            taken += 1;
        }
        prefix_at.push(prefix);
    }
    for (i, &m) in counts.iter().enumerate() {
        let c = prefix_at[i] / T::of(m as f64);
        let mut acc = T::zero();
        for v in &vals[..m] {
            acc = acc + (*v - c).norm();
        }
        out.push(acc / T::of(m as f64));
    }
}

/// Discrete truncated sharp maximal function: at each x the max over ladder
/// radii of the mean deviation from the ball average.
pub fn sharp_maximal<T: Real>(f: &Field<T>, ladder: &RadiusLadder<T>) -> Field<T> {
    let grid = *f.grid();
    let geometry = ball_geometry(&grid, &ladder.radii);
    let values: Vec<Complex<T>> = (0..grid.size())
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(vals, devs), i| {
                gather(&grid, f.values(), grid.unravel(i), &geometry, vals);
                mean_deviations(vals, &geometry.counts, devs);
                let m = devs.iter().fold(T::zero(), |a, &b| if a > b { a } else { b });
                Complex::new(m, T::zero())
            },
        )
        .collect();
    Field::new(grid, values).expect("same size")
}

/// Measurable linearization: at each x pick the first ladder radius whose
/// mean deviation of g exceeds (1 - 1/ell) of the truncated sharp maximal,
/// then pair f against the unimodular sign eta of g's deviation on that
/// ball. For f = g this recovers at least (1 - 1/ell) of the maximal.
pub fn u_ell_linearization<T: Real>(
    g: &Field<T>,
    f: &Field<T>,
    ladder: &RadiusLadder<T>,
) -> Result<Field<T>> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    if !(ladder.ell >= T::of(2.0)) {
        return Err(Error::InvalidParameter("linearization needs ell >= 2".into()));
    }
    let grid = *f.grid();
    let geometry = ball_geometry(&grid, &ladder.radii);
    let fraction = T::one() - ladder.ell.recip();
    let values: Vec<Complex<T>> = (0..grid.size())
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new(), Vec::new()),
            |(gvals, fvals, devs), i| {
                let center = grid.unravel(i);
                gather(&grid, g.values(), center, &geometry, gvals);
                mean_deviations(gvals, &geometry.counts, devs);
                let m_sharp = devs.iter().fold(T::zero(), |a, &b| if a > b { a } else { b });
                let pick = devs
                    .iter()
                    .position(|&d| d > fraction * m_sharp)
                    .unwrap_or(0);
                let m = geometry.counts[pick];
                gather(&grid, f.values(), center, &geometry, fvals);
                let mt = T::of(m as f64);
                let avg_g =
                    gvals[..m].iter().fold(Complex::new(T::zero(), T::zero()), |a, v| a + *v) / mt;
                let avg_f =
                    fvals[..m].iter().fold(Complex::new(T::zero(), T::zero()), |a, v| a + *v) / mt;
                let mut acc = Complex::new(T::zero(), T::zero());
                for (gv, fv) in gvals[..m].iter().zip(&fvals[..m]) {
                    let w = *gv - avg_g;
                    let norm = w.norm();
                    if norm > T::zero() {
                        let eta = w.conj() / norm;
                        acc = acc + eta * (*fv - avg_f);
                    }
                }
                acc / mt
            },
        )
        .collect();
    Field::new(grid, values)
}

/// BMO boundedness probe: sup of the sharp maximal of T~_b applied to
/// dipole atoms across an ell sweep; returns (ell, probe) rows and the
/// max/min band ratio.
pub fn bmo_probe<T: Real>(
    grid: GridSpec<T>,
    ells: &[T],
    b: T,
) -> Result<(Vec<(f64, f64)>, f64)> {
    let ladder = RadiusLadder::saturated(&grid)?;
    let n = T::of(grid.dim() as f64);
    let mut rows = Vec::with_capacity(ells.len());
    for &ell in ells {
        let eps_min = grid.spacing() * T::of(1.000001);
        let eps = if ell / T::of(8.0) > eps_min { ell / T::of(8.0) } else { eps_min };
        let atom = crate::heat::make_dipole_atom(grid, ell, n, eps)?;
        let image = apply_symbol(&atom.field, &SymbolSpec::TildeTb { b })?;
        let probe = sharp_maximal(&image, &ladder).sup_norm();
        rows.push((ell.to_f64().unwrap(), probe.to_f64().unwrap()));
    }
    let ratio = band_ratio(&rows.iter().map(|r| r.1).collect::<Vec<_>>())?;
    Ok((rows, ratio))
}
