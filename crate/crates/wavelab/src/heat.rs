//! Heat extensions, atom construction and validation, mollification, and
//! heat-norm scaling scans.

use crate::error::{Error, Result};
use crate::fft::{dft, idft};
use crate::grid::{norm3, Field, GridSpec};
use crate::real::Real;
use crate::report::{fit_slope, SlopeReport};
use crate::symbols::{apply_symbol, smooth_step, SymbolSpec};
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Gaussian smoothing: spectral application of e^{-4 pi^2 t |xi|^2}.
pub fn heat_extension<T: Real>(f: &Field<T>, t: T) -> Result<Field<T>> {
    if !(t > T::zero()) {
        return Err(Error::InvalidParameter("heat_extension requires t > 0".into()));
    }
    apply_symbol(f, &SymbolSpec::HeatPt { t })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomFamily {
    Dipole,
    Shell,
    Custom,
}

/// A candidate atom: a grid density supported in the cube Q of side `ell`
/// centered at `center`, with its target dimension parameter `beta`.
#[derive(Clone, Debug)]
pub struct AtomSpec<T> {
    pub field: Field<T>,
    pub family: AtomFamily,
    pub center: [T; 3],
    pub ell: T,
    pub beta: T,
    pub eps: T,
    /// Normalization constant applied to the raw density.
    pub c: T,
}

/// Serializable description of an atom (without the field samples).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomMetadata {
    pub family: AtomFamily,
    pub center: [f64; 3],
    pub ell: f64,
    pub beta: f64,
    pub eps: f64,
    pub c: f64,
}

impl<T: Real> AtomSpec<T> {
    pub fn metadata(&self) -> AtomMetadata {
        let f = |v: T| v.to_f64().unwrap();
        AtomMetadata {
            family: self.family,
            center: [f(self.center[0]), f(self.center[1]), f(self.center[2])],
            ell: f(self.ell),
            beta: f(self.beta),
            eps: f(self.eps),
            c: f(self.c),
        }
    }
}

/// Measurements against the four atom conditions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomValidation {
    /// Mass of |a| outside the cube Q.
    pub leakage: f64,
    /// |integral of a|.
    pub cancel_residual: f64,
    /// Max over the t samples of t^{(n-beta)/2} ||p_t * a||_inf.
    pub heat_sup: f64,
    /// The bound the above must respect: 1/ell^beta.
    pub heat_bound: f64,
    /// ||a||_1.
    pub tv_mass: f64,
    pub pass: bool,
}

const VALIDATION_TOL: f64 = 1e-6;

/// Default 64-point log grid over [ell^2/100, 100*max(ell,1)^2] bracketing
/// the maximizer t ~ ell^2 by two decades on each side.
pub fn default_t_samples<T: Real>(ell: T) -> Vec<T> {
    let lo = (ell * ell / T::of(100.0)).to_f64().unwrap();
    let cap = if ell > T::one() { ell } else { T::one() };
    let hi = (T::of(100.0) * cap * cap).to_f64().unwrap();
    log_spaced(lo, hi, 64).into_iter().map(T::of).collect()
}

/// `count` log-spaced values spanning [lo, hi] inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|k| lo * (step * k as f64).exp()).collect()
}

/// Max over t samples of t^{(n-beta)/2} ||p_t * a||_inf, computed off a
/// single forward transform.
pub fn heat_sup_measure<T: Real>(field: &Field<T>, beta: T, t_samples: &[T]) -> T {
    let g = *field.grid();
    let spectrum = dft(field);
    let exponent = (T::of(g.dim() as f64) - beta) / T::of(2.0);
    t_samples
        .par_iter()
        .map(|&t| {
            let smoothed = spectrum
                .multiply(|xi| {
                    let tp = T::of(2.0) * T::PI();
                    Complex::new((-(tp * norm3(xi)).powi(2) * t).exp(), T::zero())
                })
                .expect("heat symbol finite");
            t.powf(exponent) * idft(&smoothed).sup_norm()
        })
        .reduce(|| T::zero(), |a, b| if a > b { a } else { b })
}

/// Measure the four atom conditions; always returns a report.
pub fn validate_atom<T: Real>(atom: &AtomSpec<T>, t_samples: &[T]) -> AtomValidation {
    let leakage = atom.field.mass_outside_cube(atom.center, atom.ell).to_f64().unwrap();
    let cancel_residual = atom.field.integral().norm().to_f64().unwrap();
    let heat_sup = heat_sup_measure(&atom.field, atom.beta, t_samples).to_f64().unwrap();
    let heat_bound = atom.ell.to_f64().unwrap().powf(-atom.beta.to_f64().unwrap());
    let tv_mass = atom.field.lp_norm(T::one()).unwrap().to_f64().unwrap();
    let pass = leakage < 1e-8
        && cancel_residual < 1e-10
        && heat_sup <= (1.0 + VALIDATION_TOL) * heat_bound
        && tv_mass <= 1.0 + VALIDATION_TOL;
    AtomValidation { leakage, cancel_residual, heat_sup, heat_bound, tv_mass, pass }
}

/// Radial bump profile: 1 on [0, 1/2], 0 beyond 1, smooth in between.
fn bump_profile<T: Real>(r: T) -> T {
    smooth_step(T::of(2.0) - T::of(2.0) * r)
}

/// Unit-mass mollifier of radius eps sampled on the grid.
fn mollifier<T: Real>(grid: GridSpec<T>, eps: T) -> Result<Field<T>> {
    if eps < grid.spacing() {
        return Err(Error::AtomConstruction(format!(
            "mollifier radius {:?} below grid spacing {:?}",
            eps.to_f64(),
            grid.spacing().to_f64()
        )));
    }
    let raw = Field::from_real_fn(grid, |x| bump_profile(norm3(x) / eps));
    let mass = raw.integral().re;
    if !(mass > T::zero()) {
        return Err(Error::AtomConstruction("mollifier has no mass on the grid".into()));
    }
    Ok(raw.scale(Complex::new(mass.recip(), T::zero())))
}

fn check_atom_geometry<T: Real>(grid: &GridSpec<T>, ell: T, eps: T) -> Result<()> {
    if !(eps > T::zero()) || eps >= ell / T::of(4.0) {
        return Err(Error::AtomConstruction("need 0 < eps < ell/4".into()));
    }
    if ell > grid.length() / T::of(4.0) {
        return Err(Error::AtomConstruction("need ell <= L/4".into()));
    }
    Ok(())
}

/// Scale a raw mean-zero density by the largest c > 0 satisfying the total
/// variation and heat-supremum constraints. Both constraints are linear in
/// c, so c = min(1/||a||_1, ell^{-beta}/heat_sup) is exact.
fn normalize_atom<T: Real>(
    raw: Field<T>,
    family: AtomFamily,
    center: [T; 3],
    ell: T,
    beta: T,
    eps: T,
) -> Result<AtomSpec<T>> {
    let tv = raw.lp_norm(T::one())?;
    let heat_sup = heat_sup_measure(&raw, beta, &default_t_samples(ell));
    if !(tv > T::zero()) || !(heat_sup > T::zero()) {
        return Err(Error::AtomConstruction("raw atom density vanishes".into()));
    }
    let c_tv = tv.recip();
    let c_heat = ell.powf(-beta) / heat_sup;
    let c = if c_tv < c_heat { c_tv } else { c_heat };
    let field = raw.scale(Complex::new(c, T::zero()));
    Ok(AtomSpec { field, family, center, ell, beta, eps, c })
}

/// Two opposite mollified point masses at +-ell/4 along the first axis,
/// snapped to grid points so the cancellation is exact sample-wise.
pub fn make_dipole_atom<T: Real>(grid: GridSpec<T>, ell: T, beta: T, eps: T) -> Result<AtomSpec<T>> {
    check_atom_geometry(&grid, ell, eps)?;
    let bump = mollifier(grid, eps)?;
    let quarter = ell / T::of(4.0);
    let x1 = grid.snap([quarter, T::zero(), T::zero()]);
    let x2 = grid.snap([-quarter, T::zero(), T::zero()]);
    if x1 == x2 {
        return Err(Error::AtomConstruction("ell below grid resolution: poles coincide".into()));
    }
    let raw = Field::from_fn(grid, |x| {
        let d1 = [x[0] - x1[0], x[1] - x1[1], x[2] - x1[2]];
        let d2 = [x[0] - x2[0], x[1] - x2[1], x[2] - x2[2]];
        Complex::new(bump_profile(norm3(d1) / eps) - bump_profile(norm3(d2) / eps), T::zero())
    });
    // renormalize against the sampled bump mass so each pole has unit mass
    let pole_mass = bump.integral().re.recip();
    let raw = raw.scale(Complex::new(pole_mass, T::zero()));
    normalize_atom(raw, AtomFamily::Dipole, [T::zero(); 3], ell, beta, eps)
}

/// A mollified uniform density on the sphere of radius ell/4 minus a
/// mollified ball density of equal mass.
pub fn make_shell_atom<T: Real>(grid: GridSpec<T>, ell: T, beta: T, eps: T) -> Result<AtomSpec<T>> {
    check_atom_geometry(&grid, ell, eps)?;
    let radius = ell / T::of(4.0);
    let ring = Field::from_real_fn(grid, |x| bump_profile((norm3(x) - radius).abs() / eps));
    let ring_mass = ring.integral().re;
    let ball = Field::from_real_fn(grid, |x| bump_profile(norm3(x) / radius));
    let ball_mass = ball.integral().re;
    if !(ring_mass > T::zero()) || !(ball_mass > T::zero()) {
        return Err(Error::AtomConstruction("shell atom unresolved on the grid".into()));
    }
    let raw = ring
        .scale(Complex::new(ring_mass.recip(), T::zero()))
        .axpy(Complex::new(-ball_mass.recip(), T::zero()), &ball)?;
    normalize_atom(raw, AtomFamily::Shell, [T::zero(); 3], ell, beta, eps)
}

/// Convolve the atom with a unit-mass mollifier of radius eps; the cube
/// doubles to 2Q and the heat bound correspondingly relaxes.
pub fn mollify<T: Real>(atom: &AtomSpec<T>, eps: T) -> Result<AtomSpec<T>> {
    if !(eps > T::zero()) || eps >= atom.ell {
        return Err(Error::InvalidParameter("mollify requires 0 < eps < ell".into()));
    }
    let grid = *atom.field.grid();
    let rho = mollifier(grid, eps)?;
    let product = dft(&atom.field)
        .multiply({
            let rho_hat = dft(&rho);
            let coeffs: Vec<Complex<T>> = rho_hat.coefficients().to_vec();
            let g = grid;
            move |xi| {
                // mollifier spectrum looked up by lattice index
                let df = g.freq_spacing();
                let half = (g.points() / 2) as i64;
                let mut idx = [0usize; 3];
                for a in 0..g.dim() {
                    let m = (xi[a] / df).round().to_f64().unwrap() as i64;
                    idx[a] = (m + half) as usize;
                }
                coeffs[g.ravel(idx)]
            }
        })?;
    Ok(AtomSpec {
        field: idft(&product),
        family: atom.family,
        center: atom.center,
        ell: T::of(2.0) * atom.ell,
        beta: atom.beta,
        eps: atom.eps,
        c: atom.c,
    })
}

/// One heat-norm scan row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeatNormRow {
    pub t: f64,
    pub sup_norm: f64,
    pub l1_norm: f64,
}

/// Sup- and L1-norm decay of p_t * a across t, with slope fits on the
/// t < ell^2 and t > ell^2 segments.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeatNormScan {
    pub rows: Vec<HeatNormRow>,
    /// sup-norm fit for t < ell^2; target -(n-beta)/2.
    pub sup_small_t: Option<SlopeReport>,
    /// sup-norm fit for t > ell^2; target -n/2 (mass spreading bound).
    pub sup_large_t: Option<SlopeReport>,
    /// L1 fit for t < ell^2; target 0.
    pub l1_small_t: Option<SlopeReport>,
    /// L1 fit for t > ell^2; target -1/2 (separation over sqrt t).
    pub l1_large_t: Option<SlopeReport>,
}

pub fn heat_norm_scan<T: Real>(atom: &AtomSpec<T>, t_values: &[T]) -> Result<HeatNormScan> {
    let g = *atom.field.grid();
    let spectrum = dft(&atom.field);
    let rows: Vec<HeatNormRow> = t_values
        .par_iter()
        .map(|&t| {
            let smoothed = spectrum
                .multiply(|xi| {
                    let tp = T::of(2.0) * T::PI();
                    Complex::new((-(tp * norm3(xi)).powi(2) * t).exp(), T::zero())
                })
                .expect("heat symbol finite");
            let u = idft(&smoothed);
            HeatNormRow {
                t: t.to_f64().unwrap(),
                sup_norm: u.sup_norm().to_f64().unwrap(),
                l1_norm: u.lp_norm(T::one()).unwrap().to_f64().unwrap(),
            }
        })
        .collect();
    let ell2 = (atom.ell * atom.ell).to_f64().unwrap();
    let n = g.dim() as f64;
    let beta = atom.beta.to_f64().unwrap();
    let fit = |pred: &dyn Fn(&HeatNormRow) -> bool, pick: &dyn Fn(&HeatNormRow) -> f64, target: f64| {
        let pts: Vec<(f64, f64)> =
            rows.iter().filter(|r| pred(r)).map(|r| (r.t, pick(r))).collect();
        if pts.len() >= 3 {
            fit_slope(&pts, target).ok()
        } else {
            None
        }
    };
    Ok(HeatNormScan {
        sup_small_t: fit(&|r| r.t < ell2, &|r| r.sup_norm, -(n - beta) / 2.0),
        sup_large_t: fit(&|r| r.t > ell2, &|r| r.sup_norm, -n / 2.0),
        l1_small_t: fit(&|r| r.t < ell2, &|r| r.l1_norm, 0.0),
        l1_large_t: fit(&|r| r.t > ell2, &|r| r.l1_norm, -0.5),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spike(grid: GridSpec<f64>) -> Field<f64> {
        let mut f = Field::zeros(grid);
        let i = grid.origin_index();
        f.values_mut()[i] = Complex::new(1.0 / grid.cell_volume(), 0.0);
        f
    }

    #[test]
    fn rejects_nonpositive_time() {
        let g = GridSpec::new(2, 16, 4.0f64).unwrap();
        assert!(heat_extension(&Field::zeros(g), 0.0).is_err());
        assert!(heat_extension(&Field::zeros(g), -1.0).is_err());
    }

    #[test]
    fn spike_heats_to_gaussian_peak() {
        let g = GridSpec::new(2, 256, 16.0f64).unwrap();
        let t = 0.1;
        let u = heat_extension(&spike(g), t).unwrap();
        let expected = 1.0 / (4.0 * std::f64::consts::PI * t);
        assert!((u.sup_norm() - expected).abs() < 1e-8);
    }

    #[test]
    fn semigroup_and_mass_conservation() {
        let g = GridSpec::new(2, 64, 8.0f64).unwrap();
        let f = Field::from_real_fn(g, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp());
        let two_step = heat_extension(&heat_extension(&f, 0.3).unwrap(), 0.5).unwrap();
        let one_step = heat_extension(&f, 0.8).unwrap();
        assert!(two_step.max_difference(&one_step).unwrap() < 1e-12);
        // DC mode preserved
        let before = f.integral();
        let after = one_step.integral();
        assert!((before - after).norm() < 1e-12);
        // maximum principle for nonnegative data
        let min = one_step.values().iter().map(|v| v.re).fold(f64::MAX, f64::min);
        assert!(min >= -1e-12);
        assert!(one_step.lp_norm(1.0).unwrap() <= f.lp_norm(1.0).unwrap() + 1e-12);
    }

    #[test]
    fn zero_atom_passes_vacuously() {
        let g = GridSpec::new(2, 32, 8.0f64).unwrap();
        let atom = AtomSpec {
            field: Field::zeros(g),
            family: AtomFamily::Custom,
            center: [0.0; 3],
            ell: 1.0,
            beta: 2.0,
            eps: 0.25,
            c: 1.0,
        };
        let v = validate_atom(&atom, &default_t_samples(1.0));
        assert!(v.pass);
        assert_eq!(v.heat_sup, 0.0);
    }

    #[test]
    fn unbalanced_density_fails_cancellation() {
        let g = GridSpec::new(2, 64, 8.0f64).unwrap();
        let bump = mollifier(g, 0.25).unwrap();
        let atom = AtomSpec {
            field: bump,
            family: AtomFamily::Custom,
            center: [0.0; 3],
            ell: 2.0,
            beta: 2.0,
            eps: 0.25,
            c: 1.0,
        };
        let v = validate_atom(&atom, &default_t_samples(2.0));
        assert!(v.cancel_residual > 1e-3);
        assert!(!v.pass);
    }

    #[test]
    fn dipole_atom_validates_at_beta_n() {
        let g = GridSpec::new(2, 128, 8.0f64).unwrap();
        let ell = 1.0;
        let atom = make_dipole_atom(g, ell, 2.0, ell / 8.0).unwrap();
        let v = validate_atom(&atom, &default_t_samples(ell));
        assert!(v.pass, "validation: {v:?}");
        assert!(v.cancel_residual < 1e-12);
        // normalization saturates one constraint
        let heat_frac = v.heat_sup / v.heat_bound;
        assert!(
            (heat_frac - 1.0).abs() < 1e-9 || (v.tv_mass - 1.0).abs() < 1e-9,
            "no constraint binding: heat {heat_frac}, tv {}",
            v.tv_mass
        );
        assert!(heat_frac >= 0.5 && heat_frac <= 1.0 + 1e-9);
    }

    #[test]
    fn shell_atom_validates_and_cancels() {
        let g = GridSpec::new(2, 128, 8.0f64).unwrap();
        let ell = 2.0;
        let atom = make_shell_atom(g, ell, 2.0, ell / 16.0).unwrap();
        let v = validate_atom(&atom, &default_t_samples(ell));
        assert!(v.pass, "validation: {v:?}");
        assert!(v.cancel_residual < 1e-10);
        assert!(v.tv_mass <= 1.0 + 1e-6);
    }

    #[test]
    fn atom_geometry_rejected() {
        let g = GridSpec::new(2, 64, 8.0f64).unwrap();
        assert!(make_dipole_atom(g, 1.0, 2.0, 0.5).is_err()); // eps >= ell/4
        assert!(make_dipole_atom(g, 4.0, 2.0, 0.25).is_err()); // ell > L/4
    }

    #[test]
    fn mollify_preserves_cancellation_and_contracts() {
        let g = GridSpec::new(2, 128, 8.0f64).unwrap();
        let atom = make_dipole_atom(g, 1.0, 2.0, 1.0 / 8.0).unwrap();
        let smoothed = mollify(&atom, 0.2).unwrap();
        assert!(smoothed.field.integral().norm() < 1e-12);
        assert!(
            smoothed.field.lp_norm(1.0).unwrap() <= atom.field.lp_norm(1.0).unwrap() * (1.0 + 1e-12)
        );
        let ts = default_t_samples(atom.ell);
        let hs_before = heat_sup_measure(&atom.field, atom.beta, &ts);
        let hs_after = heat_sup_measure(&smoothed.field, atom.beta, &ts);
        assert!(hs_after <= hs_before * (1.0 + 1e-6));
        assert_eq!(smoothed.ell, 2.0 * atom.ell);
    }

    #[test]
    fn dipole_family_is_self_similar() {
        // the atom at scale ell on a proportionally scaled grid is a pointwise
        // rescaling of the ell = 1 atom
        let g1 = GridSpec::new(2, 64, 8.0f64).unwrap();
        let g2 = GridSpec::new(2, 64, 4.0f64).unwrap();
        let a1 = make_dipole_atom(g1, 1.0, 2.0, 1.0 / 8.0).unwrap();
        let a2 = make_dipole_atom(g2, 0.5, 2.0, 1.0 / 16.0).unwrap();
        // sample layouts coincide index-by-index; the ratio of values must be
        // a single constant wherever either is nonzero
        let mut ratio = None;
        for (v1, v2) in a1.field.values().iter().zip(a2.field.values()) {
            if v1.norm() > 1e-12 * a1.field.sup_norm() {
                let r = v2.re / v1.re;
                match ratio {
                    None => ratio = Some(r),
                    Some(r0) => assert!((r - r0).abs() < 1e-10 * r0.abs(), "{r} vs {r0}"),
                }
            } else {
                assert!(v2.norm() < 1e-10 * a2.field.sup_norm());
            }
        }
        assert!(ratio.is_some());
    }

    #[test]
    fn heat_scan_large_t_l1_slope() {
        let g = GridSpec::new(2, 256, 32.0f64).unwrap();
        let ell = 1.0;
        let atom = make_dipole_atom(g, ell, 2.0, ell / 8.0).unwrap();
        let ts: Vec<f64> = log_spaced(0.05, 16.0, 16);
        let scan = heat_norm_scan(&atom, &ts).unwrap();
        let l1 = scan.l1_large_t.expect("enough large-t points");
        assert!(
            (l1.slope - (-0.5)).abs() < 0.1,
            "L1 large-t slope {} (target -1/2)",
            l1.slope
        );
    }
}
