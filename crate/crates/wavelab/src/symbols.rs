//! Multiplier symbols and their spectral application to fields.

use crate::error::{Error, Result};
use crate::fft::{dft, idft};
use crate::grid::{norm3, Field, GridSpec, SpectralField};
use crate::real::Real;
use num_complex::Complex;

/// Smooth step: 0 for s <= 0, 1 for s >= 1, C-infinity monotone in between,
/// built from the bump B(s) = e^{-1/s}.
pub fn smooth_step<T: Real>(s: T) -> T {
    let bump = |u: T| if u > T::zero() { (-u.recip()).exp() } else { T::zero() };
    let a = bump(s);
    let b = bump(T::one() - s);
    if a == T::zero() {
        T::zero()
    } else if b == T::zero() {
        T::one()
    } else {
        a / (a + b)
    }
}

/// High-pass cutoff: 0 on B(0,1), 1 outside B(0,2), radial and smooth.
pub fn eval_psi<T: Real>(xi: [T; 3]) -> T {
    smooth_step(norm3(xi) - T::one())
}

/// Low-pass bump: 1 on B(0,1), 0 outside B(0,2); the complement of psi.
pub fn eval_big_phi<T: Real>(xi: [T; 3]) -> T {
    T::one() - eval_psi(xi)
}

/// Annulus bump phi(xi) = Phi(xi) - Phi(2 xi), supported in 1/2 <= |xi| <= 2.
pub fn eval_phi<T: Real>(xi: [T; 3]) -> T {
    let two = T::of(2.0);
    eval_big_phi(xi) - eval_big_phi([two * xi[0], two * xi[1], two * xi[2]])
}

/// Dyadic piece phi_j(xi) = phi(2^{-j} xi), supported in 2^{j-1} <= |xi| <= 2^{j+1}.
pub fn eval_phi_j<T: Real>(xi: [T; 3], j: i32) -> T {
    let s = T::of(2.0f64.powi(-j));
    eval_phi([s * xi[0], s * xi[1], s * xi[2]])
}

/// e^{i|eta|} where eta = 2 pi xi is the angular frequency paired with the
/// weights (1 + 4 pi^2 |xi|^2) and (2 pi |xi|)^{-b}: in the cycles
/// convention used on the lattice the phase is e^{2 pi i |xi|}, which puts
/// the kernel's light cone at |x| = 1.
fn unit_phase<T: Real>(r: T) -> Complex<T> {
    let arg = T::of(2.0) * T::PI() * r;
    Complex::new(arg.cos(), arg.sin())
}

/// The critical order (n+1)/2 - 1/p, with the p = infinity limit taken exactly.
pub fn b_p<T: Real>(n: usize, p: T) -> T {
    let base = T::of((n as f64 + 1.0) / 2.0);
    if p.is_infinite() {
        base
    } else {
        base - p.recip()
    }
}

/// Full symbol (1+4pi^2|xi|^2)^{-b/2} e^{i|xi|}.
pub fn eval_full_symbol<T: Real>(xi: [T; 3], b: T) -> Complex<T> {
    let r = norm3(xi);
    let tp = T::of(2.0) * T::PI();
    let amp = (T::one() + (tp * r).powi(2)).powf(-b / T::of(2.0));
    unit_phase(r) * amp
}

/// Truncated pure-power symbol psi(xi) (2pi|xi|)^{-b} e^{i|xi|}; 0 at xi = 0.
pub fn eval_tilde_symbol<T: Real>(xi: [T; 3], b: T) -> Complex<T> {
    let r = norm3(xi);
    let cut = eval_psi(xi);
    if cut == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let tp = T::of(2.0) * T::PI();
    unit_phase(r) * (cut * (tp * r).powf(-b))
}

/// Low-frequency remainder (1-psi)(1+4pi^2|xi|^2)^{-b/2} e^{i|xi|}, chosen so
/// that full = remainder + nu * tilde holds as an exact pointwise identity.
pub fn eval_remainder_symbol<T: Real>(xi: [T; 3], b: T) -> Complex<T> {
    let cut = T::one() - eval_psi(xi);
    if cut == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    eval_full_symbol(xi, b) * cut
}

/// Literal-transcription variant (1-psi)(2pi|xi|)^{-b} e^{i|xi|}, with xi = 0
/// mapped to 0. Kept only for comparison: it does not close the decomposition
/// identity and is singular at the origin.
pub fn eval_remainder_symbol_literal<T: Real>(xi: [T; 3], b: T) -> Complex<T> {
    let r = norm3(xi);
    if r == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let cut = T::one() - eval_psi(xi);
    if cut == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let tp = T::of(2.0) * T::PI();
    unit_phase(r) * (cut * (tp * r).powf(-b))
}

/// Bridge density (2pi|xi|)^b / (1+4pi^2|xi|^2)^{b/2}, in [0,1); requires b >= 0.
pub fn eval_nu_symbol<T: Real>(xi: [T; 3], b: T) -> Result<T> {
    if b < T::zero() {
        return Err(Error::InvalidParameter("nu symbol requires b >= 0".into()));
    }
    if b == T::zero() {
        return Ok(T::one());
    }
    let r = norm3(xi);
    if r == T::zero() {
        return Ok(T::zero());
    }
    let tpr = T::of(2.0) * T::PI() * r;
    Ok(tpr.powf(b) / (T::one() + tpr * tpr).powf(b / T::of(2.0)))
}

/// Time-dilated symbol (1+4pi^2|t xi|^2)^{-b/2} e^{i t |xi|}; requires t > 0.
pub fn eval_dilated_symbol<T: Real>(xi: [T; 3], b: T, t: T) -> Result<Complex<T>> {
    if !(t > T::zero()) {
        return Err(Error::InvalidParameter("dilated symbol requires t > 0".into()));
    }
    let r = norm3(xi);
    let tp = T::of(2.0) * T::PI();
    let amp = (T::one() + (tp * t * r).powi(2)).powf(-b / T::of(2.0));
    Ok(unit_phase(t * r) * amp)
}

/// Interpolation family (1+|xi|^2)^{-(n+z)/4} e^{i|xi|}; requires 0 <= Re z <= 1.
/// Note the base is 1+|xi|^2, without the 4pi^2 factor.
pub fn eval_analytic_family<T: Real>(xi: [T; 3], n: usize, z: Complex<T>) -> Result<Complex<T>> {
    if z.re < T::zero() || z.re > T::one() {
        return Err(Error::InvalidParameter("analytic family requires 0 <= Re z <= 1".into()));
    }
    let r = norm3(xi);
    let base = T::one() + r * r;
    // base^w for real base > 0 and complex w: e^{w ln base}
    let w = -(Complex::new(T::of(n as f64), T::zero()) + z) / Complex::new(T::of(4.0), T::zero());
    let pow = (w * base.ln()).exp();
    Ok(unit_phase(r) * pow)
}

/// Symbol families; every variant is evaluable at any lattice frequency with
/// an explicit convention at xi = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SymbolSpec<T> {
    Identity,
    FullTb { b: T },
    TildeTb { b: T },
    Remainder { b: T },
    RemainderLiteral { b: T },
    NuB { b: T },
    DilatedTb { b: T, t: T },
    AnalyticFamily { n: usize, z: Complex<T> },
    HeatPt { t: T },
    WaveCos { t: T },
    WaveSinc { t: T },
    RieszIAlpha { alpha: T },
    LpPhiJ { j: i32 },
    /// m_b(xi) * phi_j(xi): one dyadic piece of the tilde symbol.
    LpPiece { j: i32, b: T },
    /// Spectral derivative factor (2 pi i xi)^alpha.
    DerivativeMonomial { alpha: [u32; 3] },
}

impl<T: Real> SymbolSpec<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SymbolSpec::NuB { b } if b < T::zero() => {
                Err(Error::InvalidParameter("nu symbol requires b >= 0".into()))
            }
            SymbolSpec::DilatedTb { t, .. } if !(t > T::zero()) => {
                Err(Error::InvalidParameter("dilated symbol requires t > 0".into()))
            }
            SymbolSpec::HeatPt { t } if !(t > T::zero()) => {
                Err(Error::InvalidParameter("heat symbol requires t > 0".into()))
            }
            SymbolSpec::AnalyticFamily { z, .. } if z.re < T::zero() || z.re > T::one() => {
                Err(Error::InvalidParameter("analytic family requires 0 <= Re z <= 1".into()))
            }
            SymbolSpec::RieszIAlpha { alpha } if !(alpha > T::zero()) => {
                Err(Error::InvalidParameter("Riesz order must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, xi: [T; 3]) -> Complex<T> {
        let re = |v: T| Complex::new(v, T::zero());
        match *self {
            SymbolSpec::Identity => re(T::one()),
            SymbolSpec::FullTb { b } => eval_full_symbol(xi, b),
            SymbolSpec::TildeTb { b } => eval_tilde_symbol(xi, b),
            SymbolSpec::Remainder { b } => eval_remainder_symbol(xi, b),
            SymbolSpec::RemainderLiteral { b } => eval_remainder_symbol_literal(xi, b),
            SymbolSpec::NuB { b } => re(eval_nu_symbol(xi, b).expect("validated")),
            SymbolSpec::DilatedTb { b, t } => eval_dilated_symbol(xi, b, t).expect("validated"),
            SymbolSpec::AnalyticFamily { n, z } => {
                eval_analytic_family(xi, n, z).expect("validated")
            }
            SymbolSpec::HeatPt { t } => {
                let r = norm3(xi);
                let tp = T::of(2.0) * T::PI();
                re((-(tp * r).powi(2) * t).exp())
            }
            SymbolSpec::WaveCos { t } => {
                re((T::of(2.0) * T::PI() * t * norm3(xi)).cos())
            }
            SymbolSpec::WaveSinc { t } => {
                // sin(2 pi t |xi|) / (2 pi |xi|), continued by t at xi = 0
                let tpr = T::of(2.0) * T::PI() * norm3(xi);
                if tpr == T::zero() {
                    re(t)
                } else {
                    re((t * tpr).sin() / tpr)
                }
            }
            SymbolSpec::RieszIAlpha { alpha } => {
                // mean-zero convention: the DC mode is annihilated
                let r = norm3(xi);
                if r == T::zero() {
                    re(T::zero())
                } else {
                    re((T::of(2.0) * T::PI() * r).powf(-alpha))
                }
            }
            SymbolSpec::LpPhiJ { j } => re(eval_phi_j(xi, j)),
            SymbolSpec::LpPiece { j, b } => {
                eval_tilde_symbol(xi, b) * eval_phi_j(xi, j)
            }
            SymbolSpec::DerivativeMonomial { alpha } => {
                let mut acc = Complex::new(T::one(), T::zero());
                for a in 0..3 {
                    let factor = Complex::new(T::zero(), T::of(2.0) * T::PI() * xi[a]);
                    for _ in 0..alpha[a] {
                        acc = acc * factor;
                    }
                }
                acc
            }
        }
    }

    /// Largest modulus of the symbol over a grid's frequency lattice.
    pub fn sup_modulus(&self, grid: &GridSpec<T>) -> T {
        (0..grid.size())
            .map(|i| self.eval(grid.freq(i)).norm())
            .fold(T::zero(), |a, b| if a > b { a } else { b })
    }
}

/// Multiply dft(f) pointwise by the symbol and transform back.
pub fn apply_symbol<T: Real>(f: &Field<T>, spec: &SymbolSpec<T>) -> Result<Field<T>> {
    spec.validate()?;
    let s = dft(f);
    let out = s.multiply(|xi| spec.eval(xi))?;
    Ok(idft(&out))
}

/// Apply several symbols in one spectral pass (their pointwise product).
pub fn apply_symbols<T: Real>(f: &Field<T>, specs: &[SymbolSpec<T>]) -> Result<Field<T>> {
    for spec in specs {
        spec.validate()?;
    }
    let s = dft(f);
    let out = s.multiply(|xi| {
        specs
            .iter()
            .fold(Complex::new(T::one(), T::zero()), |acc, spec| acc * spec.eval(xi))
    })?;
    Ok(idft(&out))
}

/// Tabulate the symbol on the frequency lattice without transforming.
pub fn tabulate_symbol<T: Real>(spec: &SymbolSpec<T>, grid: GridSpec<T>) -> Result<SpectralField<T>> {
    spec.validate()?;
    let coefficients: Vec<Complex<T>> = (0..grid.size()).map(|i| spec.eval(grid.freq(i))).collect();
    if let Some(i) = coefficients.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        let xi = grid.freq(i);
        return Err(Error::NonFiniteSymbol {
            xi: [
                xi[0].to_f64().unwrap_or(f64::NAN),
                xi[1].to_f64().unwrap_or(f64::NAN),
                xi[2].to_f64().unwrap_or(f64::NAN),
            ],
        });
    }
    SpectralField::new(grid, coefficients)
}

/// Discrete convolution kernel of the symbol: idft of its tabulation.
pub fn tabulate_kernel<T: Real>(spec: &SymbolSpec<T>, grid: GridSpec<T>) -> Result<Field<T>> {
    Ok(idft(&tabulate_symbol(spec, grid)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    #[test]
    fn psi_support_and_radiality() {
        assert_eq!(eval_psi([0.3f64, 0.4, 0.0]), 0.0); // |xi| = 0.5
        assert_eq!(eval_psi([3.0, 0.0, 0.0]), 1.0);
        let v1 = eval_psi([1.5f64, 0.0, 0.0]);
        let v2 = eval_psi([0.9, 1.2, 0.0]); // also radius 1.5
        assert!(v1 > 0.0 && v1 < 1.0);
        assert!((v1 - v2).abs() < 1e-15);
    }

    #[test]
    fn full_symbol_closed_form() {
        let one: Complex<f64> = eval_full_symbol([0.0, 0.0, 0.0], 1.7);
        assert!((one - Complex::new(1.0, 0.0)).norm() < 1e-15);
        // hand oracle: xi = (1/(2pi), 0), b = 2 -> modulus 0.5, phase 2 pi |xi| = 1
        let v = eval_full_symbol([1.0 / TAU, 0.0, 0.0], 2.0);
        let expect = Complex::from_polar(0.5, 1.0);
        assert!((v - expect).norm() < 1e-14);
        // b = 0 is unimodular
        let m = eval_full_symbol([0.7f64, -1.3, 0.2], 0.0).norm();
        assert!((m - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tilde_symbol_support_and_tail() {
        assert_eq!(eval_tilde_symbol([0.5, 0.0, 0.0], 1.0), Complex::new(0.0, 0.0));
        let xi = [2.5, 0.0, 0.0];
        let v = eval_tilde_symbol(xi, 1.0);
        let expect = Complex::from_polar(1.0 / (TAU * 2.5), TAU * 2.5);
        assert!((v - expect).norm() < 1e-14);
        // modulus decreasing past radius 2 for b > 0
        let m3 = eval_tilde_symbol([3.0, 0.0, 0.0], 1.5).norm();
        let m5 = eval_tilde_symbol([5.0, 0.0, 0.0], 1.5).norm();
        assert!(m3 > m5);
    }

    #[test]
    fn nu_symbol_values() {
        assert_eq!(eval_nu_symbol([1.0, 2.0, 0.0], 0.0).unwrap(), 1.0);
        assert!(eval_nu_symbol([1.0, 0.0, 0.0], -0.5).is_err());
        // 2 pi |xi| = 1, b = 1 -> 1/sqrt(2)
        let v = eval_nu_symbol([1.0 / TAU, 0.0, 0.0], 1.0).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        // large-frequency limit approaches 1 from below
        let far = eval_nu_symbol([1e6, 0.0, 0.0], 1.0).unwrap();
        assert!(far < 1.0 && far > 1.0 - 1e-10);
    }

    #[test]
    fn decomposition_identity_exact() {
        let g = GridSpec::new(2, 64, 8.0).unwrap();
        for &b in &[0.5, 1.0, 1.5, 2.0] {
            let worst = (0..g.size())
                .map(|i| {
                    let xi = g.freq(i);
                    let full = eval_full_symbol(xi, b);
                    let rem = eval_remainder_symbol(xi, b);
                    let nu = eval_nu_symbol(xi, b).unwrap();
                    let tilde = eval_tilde_symbol(xi, b);
                    (full - (rem + tilde * nu)).norm()
                })
                .fold(0.0, f64::max);
            assert!(worst < 1e-12, "b = {b}: residual {worst}");
        }
    }

    #[test]
    fn literal_remainder_breaks_identity() {
        let b = 1.0;
        let xi = [0.1f64, 0.0, 0.0];
        let full = eval_full_symbol(xi, b);
        let rem = eval_remainder_symbol_literal(xi, b);
        let nu = eval_nu_symbol(xi, b).unwrap();
        let tilde = eval_tilde_symbol(xi, b);
        assert!((full - (rem + tilde * nu)).norm() > 0.1);
    }

    #[test]
    fn dilated_matches_full_at_unit_time() {
        let xi = [0.4f64, -0.9, 0.0];
        let b = 1.25;
        let a = eval_dilated_symbol(xi, b, 1.0).unwrap();
        assert!((a - eval_full_symbol(xi, b)).norm() < 1e-15);
        assert!(eval_dilated_symbol(xi, b, 0.0).is_err());
        // modulus at (t, xi) equals full-symbol modulus at t*xi
        let t = 2.7;
        let m = eval_dilated_symbol(xi, b, t).unwrap().norm();
        let m2 = eval_full_symbol([t * xi[0], t * xi[1], 0.0], b).norm();
        assert!((m - m2).abs() < 1e-14);
    }

    #[test]
    fn analytic_family_modulus_independent_of_imag_part() {
        let xi = [1.3f64, 0.5, 0.0];
        let m0 = eval_analytic_family(xi, 2, Complex::new(0.0, 0.0)).unwrap().norm();
        let mt = eval_analytic_family(xi, 2, Complex::new(0.0, 5.0)).unwrap().norm();
        assert!((m0 - mt).abs() < 1e-13);
        let at0 = eval_analytic_family([0.0; 3], 2, Complex::new(1.0, 0.0)).unwrap();
        assert!((at0 - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!(eval_analytic_family(xi, 2, Complex::new(1.5, 0.0)).is_err());
    }

    #[test]
    fn identity_symbol_returns_field_exactly() {
        let g = GridSpec::new(2, 32, 4.0f64).unwrap();
        let f = Field::from_real_fn(g, |x| (x[0] * 2.0).cos() + x[1]);
        let out = apply_symbol(&f, &SymbolSpec::Identity).unwrap();
        assert!(f.max_difference(&out).unwrap() < 1e-13);
    }

    #[test]
    fn full_plus_minus_composes_to_double_phase() {
        // full_T_b followed by full_T_{-b} has symbol e^{4 pi i |xi|}
        let g = GridSpec::new(2, 32, 4.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = Field::new(
            g,
            (0..g.size())
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let b = 1.3;
        let once = apply_symbol(&f, &SymbolSpec::FullTb { b }).unwrap();
        let twice = apply_symbol(&once, &SymbolSpec::FullTb { b: -b }).unwrap();
        let sf = dft(&f);
        let st = dft(&twice);
        let err = (0..g.size())
            .map(|i| {
                let r = norm3(g.freq(i));
                let expect = sf.coefficients()[i] * Complex::from_polar(1.0, 2.0 * TAU * r);
                (st.coefficients()[i] - expect).norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-11, "err = {err}");
    }

    #[test]
    fn plancherel_contraction() {
        let g = GridSpec::new(2, 64, 8.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let f = Field::new(
            g,
            (0..g.size())
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        for spec in [
            SymbolSpec::FullTb { b: 1.0 },
            SymbolSpec::TildeTb { b: 0.5 },
            SymbolSpec::HeatPt { t: 0.2 },
            SymbolSpec::NuB { b: 1.5 },
        ] {
            let out = apply_symbol(&f, &spec).unwrap();
            let bound = spec.sup_modulus(&g) * f.lp_norm(2.0).unwrap();
            assert!(out.lp_norm(2.0).unwrap() <= bound + 1e-10);
        }
    }

    #[test]
    fn heat_kernel_matches_gaussian() {
        let g = GridSpec::new(2, 256, 16.0).unwrap();
        let t = 0.1;
        let k = tabulate_kernel(&SymbolSpec::HeatPt { t }, g).unwrap();
        let err = (0..g.size())
            .map(|i| {
                let x = g.point(i);
                let expect =
                    (4.0 * std::f64::consts::PI * t).powi(-1) * (-(x[0] * x[0] + x[1] * x[1]) / (4.0 * t)).exp();
                (k.values()[i] - Complex::new(expect, 0.0)).norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "err = {err}");
    }

    #[test]
    fn identity_kernel_is_unit_mass_spike() {
        let g = GridSpec::new(2, 32, 4.0f64).unwrap();
        let k = tabulate_kernel(&SymbolSpec::Identity, g).unwrap();
        let origin = g.origin_index();
        let spike = k.values()[origin];
        // unit mass: h^n * spike = 1 since spike = N^n / L^n
        assert!((spike.re * g.cell_volume() - 1.0).abs() < 1e-12);
        let off = (0..g.size())
            .filter(|&i| i != origin)
            .map(|i| k.values()[i].norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-10 * spike.norm());
    }

    #[test]
    fn tilde_kernel_focuses_on_unit_sphere() {
        let g = GridSpec::new(2, 512, 16.0).unwrap();
        let k = tabulate_kernel(&SymbolSpec::TildeTb { b: 1.0 }, g).unwrap();
        let (near, _) = k.lp_norm_region(f64::INFINITY, 0.5, 1.5).unwrap();
        let (far, _) = k.lp_norm_region(f64::INFINITY, 2.0, 4.0).unwrap();
        assert!(near >= 10.0 * far, "near = {near}, far = {far}");
    }

    #[test]
    fn riesz_symbol_kills_dc_and_b_p_values() {
        let v: Complex<f64> = SymbolSpec::RieszIAlpha { alpha: 1.0 }.eval([0.0; 3]);
        assert_eq!(v, Complex::new(0.0, 0.0));
        assert!((b_p(3, 1.0f64) - 1.0).abs() < 1e-15);
        assert!((b_p(3, 2.0f64) - 1.5).abs() < 1e-15);
        assert!((b_p(2, 2.0f64) - 1.0).abs() < 1e-15);
        assert!((b_p(2, f64::INFINITY) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn wave_sinc_continuous_at_zero() {
        let t = 0.7;
        let v: Complex<f64> = SymbolSpec::WaveSinc { t }.eval([0.0; 3]);
        assert!((v.re - t).abs() < 1e-15);
        let near: Complex<f64> = SymbolSpec::WaveSinc { t }.eval([1e-9, 0.0, 0.0]);
        assert!((near.re - t).abs() < 1e-8);
    }
}
