//! Acceptance suite: the eleven release gates, each printed as one
//! pass/fail line with its pinned tolerances. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use wavelab::config::ExperimentConfig;
use wavelab::experiments;
use wavelab::fft::{dft, idft};
use wavelab::grid::{norm3, Field, GridSpec};
use wavelab::wave::{wave_energy, wave_solution, CauchyData};

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate { failures: Vec::new() }
    }

    fn check(&mut self, criterion: &str, pass: bool, detail: String) {
        println!(
            "criterion {:<38} {}  ({detail})",
            criterion,
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            self.failures.push(format!("{criterion}: {detail}"));
        }
    }
}

fn preset(name: &str) -> ExperimentConfig {
    ExperimentConfig::preset(name).expect("preset exists")
}

fn random_field(grid: GridSpec<f64>, seed: u64) -> Field<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.size())
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Field::new(grid, values).unwrap()
}

/// 1. Transform layer: Plancherel, inversion, translation law, Gaussian
/// self-duality, each to 1e-10 relative.
fn criterion_1(gate: &mut Gate) {
    let grid = GridSpec::new(2, 256, 16.0f64).unwrap();
    let npts = grid.points();
    let shift = [5usize, 253, 0]; // lattice translation (5, -3)
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let f = random_field(grid, seed);
        let spectrum = dft(&f);
        // Plancherel
        let physical: f64 =
            f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_volume();
        let spectral: f64 = spectrum.l2_norm().powi(2);
        worst = worst.max((physical - spectral).abs() / physical);
        // inversion
        let back = idft(&spectrum);
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (a, b) in back.values().iter().zip(f.values()) {
            diff = diff.max((a - b).norm());
            scale = scale.max(b.norm());
        }
        worst = worst.max(diff / scale);
        // translation law: g(x) = f(x - v h) <=> g^ = e^{-2 pi i xi . v h} f^
        let mut translated = vec![Complex::new(0.0, 0.0); grid.size()];
        for i in 0..grid.size() {
            let idx = grid.unravel(i);
            let src = [
                (idx[0] + npts - shift[0] % npts) % npts,
                (idx[1] + npts - shift[1] % npts) % npts,
                0,
            ];
            translated[i] = f.values()[grid.ravel(src)];
        }
        let g = Field::new(grid, translated).unwrap();
        let gs = dft(&g);
        let h = grid.spacing();
        let v = [shift[0] as f64 * h, (shift[1] as f64 - npts as f64) * h];
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..grid.size() {
            let xi = grid.freq(i);
            let phase = Complex::from_polar(
                1.0,
                -2.0 * std::f64::consts::PI * (xi[0] * v[0] + xi[1] * v[1]),
            );
            diff = diff.max((gs.coefficients()[i] - phase * spectrum.coefficients()[i]).norm());
            scale = scale.max(spectrum.coefficients()[i].norm());
        }
        worst = worst.max(diff / scale);
    }
    // Gaussian self-duality: e^{-pi |x|^2} is its own transform
    let gauss = Field::from_real_fn(grid, |x| (-std::f64::consts::PI * (x[0] * x[0] + x[1] * x[1])).exp());
    let spectrum = dft(&gauss);
    let mut gdiff: f64 = 0.0;
    for i in 0..grid.size() {
        let xi = grid.freq(i);
        let expect = (-std::f64::consts::PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp();
        gdiff = gdiff.max((spectrum.coefficients()[i] - Complex::new(expect, 0.0)).norm());
    }
    worst = worst.max(gdiff);
    gate.check(
        "1 transform-layer (tol 1e-10)",
        worst < 1e-10,
        format!("worst relative error {worst:.3e} over 20 seeds + Gaussian"),
    );
}

/// 2. Partition of unity below 1e-10 away from xi = 0.
fn criterion_2(gate: &mut Gate) {
    let s = experiments::run(&preset("partition-check")).unwrap();
    gate.check(
        "2 partition-of-unity (tol 1e-10)",
        s.pass,
        format!("deviation {}", s.metrics["deviation"]),
    );
}

/// 3. Decomposition identity residual < 1e-12; literal remainder's residual
/// reported (expected nonzero).
fn criterion_3(gate: &mut Gate) {
    let s = experiments::run(&preset("decomposition-check")).unwrap();
    let rows = s.metrics["rows"].as_array().unwrap();
    let worst_exact = rows
        .iter()
        .map(|r| r["exact_residual"].as_f64().unwrap())
        .fold(0.0, f64::max);
    let min_literal = rows
        .iter()
        .map(|r| r["literal_residual"].as_f64().unwrap())
        .fold(f64::INFINITY, f64::min);
    gate.check(
        "3 decomposition-identity (tol 1e-12)",
        s.pass && min_literal > 1e-3,
        format!("exact residual {worst_exact:.3e}; literal residual {min_literal:.3e} (documents the transcription gap)"),
    );
}

/// 4. Dyadic kernel-piece norm slopes within 0.15 of (n+1)/2 - 1/q - b + |alpha|.
fn criterion_4(gate: &mut Gate) {
    let s = experiments::run(&preset("lp-kernel-scan")).unwrap();
    let worst = s.metrics["fits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["slope_error"].as_f64().unwrap())
        .fold(0.0, f64::max);
    gate.check(
        "4 lp-kernel-slopes (tol 0.15)",
        s.pass,
        format!("worst slope error {worst:.3e} over 4 (q,b,alpha) tuples, j in [2,7]"),
    );
}

/// 5. Cone kernel profile: near-cone decay at least as fast as the
/// -1/2 bound, pinned to the frozen continuum-oracle slope -0.73; far field
/// (median profile over [3,6]) slope <= -4.
fn criterion_5(gate: &mut Gate) {
    let s = experiments::run(&preset("kernel-profile")).unwrap();
    let near = s.metrics["near_slope"].as_f64().unwrap();
    let far = s.metrics["far_slope"].as_f64().unwrap();
    // independent continuum quadrature of the radial kernel over the same
    // window gives -0.726 (inside branch); the lattice must reproduce it
    let oracle = -0.73;
    let pinned = (near - oracle).abs() <= 0.1;
    gate.check(
        "5 cone-kernel-profile",
        s.pass && pinned,
        format!("near slope {near:.3} (bound -0.5, one-sided +0.2; continuum oracle {oracle} +-0.1), far slope {far:.2} <= -4"),
    );
}

/// 6. Atom machinery: dipoles validate at beta = n; heat large-t L1 slope
/// within 0.1 of -1/2; mollify monotonicity to 1e-6.
fn criterion_6(gate: &mut Gate) {
    let atoms = experiments::run(&preset("atom-validate")).unwrap();
    let heat = experiments::run(&preset("heat-norm-scan")).unwrap();
    let slope = heat.metrics["l1_large_t_slope"].as_f64().unwrap();
    gate.check(
        "6 atom-machinery",
        atoms.pass && heat.pass,
        format!(
            "validations + mollify monotone: {}; heat large-t L1 slope {slope:.3} (target -0.5 +-0.1)",
            atoms.pass
        ),
    );
}

/// 7. Riesz-potential scaling: (n=3, beta=3) p in {1,2} slope within 0.15 of
/// 1/2 - 1/p; n=2 variant p=3/2 slope -1/6; two-route agreement 1e-3.
fn criterion_7(gate: &mut Gate) {
    let mut pass = true;
    let mut details = Vec::new();
    for (n, points, p, beta) in [(3usize, 96usize, 1.0, 3.0), (3, 96, 2.0, 3.0), (2, 128, 1.5, 2.0)] {
        let mut cfg = preset("riesz-scan");
        cfg.n = n;
        cfg.points = points;
        cfg.p = Some(p);
        cfg.beta = Some(beta);
        let s = experiments::run(&cfg).unwrap();
        pass &= s.pass;
        details.push(format!(
            "n={n} p={p}: slope {:.3} (target {:.3}), two-route {:.1e}",
            s.metrics["slope"].as_f64().unwrap(),
            s.metrics["target"].as_f64().unwrap(),
            s.metrics["two_route_gap"].as_f64().unwrap(),
        ));
    }
    gate.check("7 riesz-scaling (tol 0.15 / 1e-3)", pass, details.join("; "));
}

/// Kirchhoff spherical-means oracle for radial 3-D data: with f = 0 and
/// radial velocity G, u(r,t) = (1/2r) int_{|r-t|}^{r+t} rho G(rho) drho.
fn kirchhoff_check() -> f64 {
    let grid = GridSpec::new(3, 96, 16.0f64).unwrap();
    let width = 1.5;
    let profile = |r: f64| {
        if r >= width {
            0.0
        } else {
            let s = r / width;
            (1.0 - s * s).powi(4)
        }
    };
    let g = Field::from_real_fn(grid, |x| profile(norm3(x)));
    let data = CauchyData::new(Field::zeros(grid), g).unwrap();
    let t = 2.0;
    let u = wave_solution(&data, t).unwrap();
    // radial oracle tabulated at dr = h/8, integrand at dr/4 resolution
    let h = grid.spacing();
    let dr = h / 8.0;
    let r_max = norm3([grid.length() / 2.0; 3]) + t + 1.0;
    let n_tab = (r_max / dr).ceil() as usize + 2;
    let quad = |a: f64, b: f64| -> f64 {
        let steps = (((b - a) / (dr / 4.0)).ceil() as usize).max(2);
        let dq = (b - a) / steps as f64;
        (0..steps)
            .map(|k| {
                let rho = a + (k as f64 + 0.5) * dq;
                rho * profile(rho) * dq
            })
            .sum()
    };
    let table: Vec<f64> = (0..n_tab)
        .map(|k| {
            let r = k as f64 * dr;
            if r < 1e-12 {
                t * profile(t)
            } else {
                quad((r - t).abs(), r + t) / (2.0 * r)
            }
        })
        .collect();
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 0..grid.size() {
        let r = norm3(grid.point(i));
        let k = ((r / dr).floor() as usize).min(n_tab - 2);
        let w = r / dr - k as f64;
        let oracle = table[k] * (1.0 - w) + table[k + 1] * w;
        num += (u.values()[i].re - oracle).powi(2);
        den += oracle * oracle;
    }
    (num / den).sqrt()
}

/// 8. Wave layer: energy conservation 1e-10; Kirchhoff radial oracle 1e-3;
/// dilated decay slopes for (2,2) and (3,2); L1 growth slope +1 for
/// (n,p) = (3,1) with f = 0.
fn criterion_8(gate: &mut Gate) {
    // spectral energy conservation on random data
    let grid = GridSpec::new(2, 64, 8.0f64).unwrap();
    let data = CauchyData::new(random_field(grid, 11), random_field(grid, 12)).unwrap();
    let e0 = wave_energy(&data, 0.0).unwrap();
    let drift = [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&t| (wave_energy(&data, t).unwrap() - e0).abs() / e0)
        .fold(0.0, f64::max);
    let oracle_gap = kirchhoff_check();
    let d22 = experiments::run(&preset("dilated-scan")).unwrap();
    let mut cfg = preset("dilated-scan");
    cfg.n = 3;
    cfg.points = 96;
    cfg.length = 24.0;
    cfg.ell_sweep = vec![2.0];
    cfg.t_sweep = wavelab::heat::log_spaced(1.0, 8.0, 7);
    let d32 = experiments::run(&cfg).unwrap();
    let growth = experiments::run(&preset("wave-decay")).unwrap();
    let pass = drift < 1e-10 && oracle_gap < 1e-3 && d22.pass && d32.pass && growth.pass;
    gate.check(
        "8 wave-layer",
        pass,
        format!(
            "energy drift {drift:.1e}; oracle gap {oracle_gap:.2e}; slopes (2,2) {:.3}, (3,2) {:.3}, growth {:.3}",
            d22.metrics["slope"].as_f64().unwrap(),
            d32.metrics["slope"].as_f64().unwrap(),
            growth.metrics["slope"].as_f64().unwrap(),
        ),
    );
}

/// 9. Uniform boundedness: band ratio <= 10 over the ell sweep for the four
/// in-hypothesis triples; the below-critical probe is recorded, non-gating.
fn criterion_9(gate: &mut Gate) {
    let mut pass = true;
    let mut details = Vec::new();
    for (n, points, length, p, beta, lo, hi) in [
        (3usize, 128usize, 16.0, 1.0, 3.0, 0.6, 3.4),
        (3, 128, 16.0, 2.0, 3.0, 0.6, 3.4),
        (2, 1024, 16.0, 1.5, 2.0, 0.1, 0.57),
        (2, 1024, 16.0, 2.0, 2.0, 0.1, 0.57),
    ] {
        let mut cfg = preset("uniform-bound");
        cfg.n = n;
        cfg.points = points;
        cfg.length = length;
        cfg.p = Some(p);
        cfg.beta = Some(beta);
        cfg.ell_sweep = wavelab::heat::log_spaced(lo, hi, 6);
        let s = experiments::run(&cfg).unwrap();
        pass &= s.pass;
        details.push(format!(
            "({n},{p},{beta}): band {:.2}",
            s.metrics["band_ratio"].as_f64().unwrap()
        ));
    }
    // exploratory below-critical probe (recorded, non-gating)
    let mut cfg = preset("uniform-bound");
    cfg.n = 2;
    cfg.points = 1024;
    cfg.length = 16.0;
    cfg.p = Some(2.0);
    cfg.beta = Some(2.0);
    cfg.b = Some(wavelab::symbols::b_p(2, 2.0) - 0.3);
    cfg.ell_sweep = wavelab::heat::log_spaced(0.1, 0.57, 6);
    let probe = experiments::run(&cfg).unwrap();
    details.push(format!(
        "exploratory b_p-0.3: band {:.2}, small-ell growth {:.2} (non-gating)",
        probe.metrics["band_ratio"].as_f64().unwrap(),
        probe.metrics["small_ell_growth"].as_f64().unwrap()
    ));
    gate.check("9 uniform-atom-bound (band <= 10)", pass, details.join("; "));
}

/// 10. Region and dyadic structure: J1..J4 band-bounded with exact
/// additivity and the near-cone profile slope; dyadic-split triangle check
/// and the large-cube slope for (3,2,3) within 0.3 of -1 (band-bounded at
/// p = 1).
fn criterion_10(gate: &mut Gate) {
    let regions = experiments::run(&preset("region-norms")).unwrap();
    let split2 = experiments::run(&preset("dyadic-split")).unwrap();
    let mut cfg = preset("dyadic-split");
    cfg.p = Some(1.0);
    let split1 = experiments::run(&cfg).unwrap();
    let pass = regions.pass && split2.pass && split1.pass;
    gate.check(
        "10 region/dyadic-structure",
        pass,
        format!(
            "region bands {:?} (additive {}), profile slope {:.2}; (3,2,3) slope {:.3} (target -1 +-0.3); (3,1,3) band {:.2}",
            regions.metrics["region_band_ratios"],
            regions.metrics["additivity_exact"],
            regions.metrics["profile_slope"].as_f64().unwrap(),
            split2.metrics["scaling"]["slope"].as_f64().unwrap_or(f64::NAN),
            split1.metrics["scaling"]["band_ratio"].as_f64().unwrap_or(f64::NAN),
        ),
    );
}

/// 11. Maximal machinery: domination, selection gap, ladder saturation all
/// exact; BMO probe band <= 10.
fn criterion_11(gate: &mut Gate) {
    let sharp = experiments::run(&preset("sharp-maximal-convergence")).unwrap();
    let probe = experiments::run(&preset("bmo-probe")).unwrap();
    gate.check(
        "11 maximal-machinery",
        sharp.pass && probe.pass,
        format!(
            "saturation gap {}; bmo band {:.2} (<= 10), smoothing monotone {}",
            sharp.metrics["saturation_gap"],
            probe.metrics["band_ratio"].as_f64().unwrap(),
            probe.metrics["smoothing_monotone"],
        ),
    );
}

#[test]
fn acceptance() {
    let mut gate = Gate::new();
    criterion_1(&mut gate);
    criterion_2(&mut gate);
    criterion_3(&mut gate);
    criterion_4(&mut gate);
    criterion_5(&mut gate);
    criterion_6(&mut gate);
    criterion_7(&mut gate);
    criterion_8(&mut gate);
    criterion_9(&mut gate);
    criterion_10(&mut gate);
    criterion_11(&mut gate);
    assert!(
        gate.failures.is_empty(),
        "acceptance failures:\n{}",
        gate.failures.join("\n")
    );
}
