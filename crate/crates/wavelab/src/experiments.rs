//! Named experiments behind the CLI subcommands: each runner consumes an
//! `ExperimentConfig`, writes CSV/JSON reports when an output directory is
//! set, and returns a `Summary` whose `pass` field is the acceptance gate.

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::fft::{dft, idft};
use crate::grid::{norm3, Field, GridSpec};
use crate::heat::{
    default_t_samples, heat_norm_scan, heat_sup_measure, make_dipole_atom, make_shell_atom,
    mollify, validate_atom, AtomFamily, AtomSpec,
};
use crate::lp::{kernel_norm_scan, partition_of_unity_deviation, resolvable};
use crate::maximal::{bmo_probe, sharp_maximal, u_ell_linearization, RadiusLadder};
use crate::report::{band_ratio, fit_slope, write_csv_rows, Summary};
use crate::riesz::{atom_riesz_scan, build_atom, riesz_heat, riesz_spectral, HeatQuadrature};
use crate::symbols::{
    b_p, eval_big_phi, eval_full_symbol, eval_remainder_symbol, eval_remainder_symbol_literal,
    eval_tilde_symbol, tabulate_kernel, SymbolSpec,
};
use crate::wave::{cauchy_decay_scan, dilated_multiplier_scan, prepare_bessel_data, wave_energy};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use serde_json::json;

/// Dispatch a configured experiment to its runner.
pub fn run(cfg: &ExperimentConfig) -> Result<Summary> {
    cfg.validate()?;
    match cfg.experiment.as_str() {
        "partition-check" => run_partition_check(cfg),
        "decomposition-check" => run_decomposition_check(cfg),
        "lp-kernel-scan" => run_lp_kernel_scan(cfg),
        "kernel-profile" => run_kernel_profile(cfg),
        "atom-validate" => run_atom_validate(cfg),
        "heat-norm-scan" => run_heat_norm_scan(cfg),
        "riesz-scan" => run_riesz_scan(cfg),
        "wave-decay" => run_wave_decay(cfg),
        "dilated-scan" => run_dilated_scan(cfg),
        "region-norms" => run_region_norms(cfg),
        "dyadic-split" => run_dyadic_split(cfg),
        "uniform-bound" => run_uniform_bound(cfg),
        "bmo-probe" => run_bmo_probe(cfg),
        "sharp-maximal-convergence" => run_sharp_maximal_convergence(cfg),
        other => Err(Error::Config(format!("unknown experiment '{other}'"))),
    }
}

/// Execute a whole suite; returns the summaries and whether every gate
/// passed. An empty suite passes vacuously.
pub fn run_all(configs: &[ExperimentConfig]) -> Result<(Vec<Summary>, bool)> {
    let mut summaries = Vec::with_capacity(configs.len());
    let mut all_pass = true;
    for cfg in configs {
        let summary = run(cfg)?;
        all_pass &= summary.pass;
        summaries.push(summary);
    }
    Ok((summaries, all_pass))
}

/// Distinguishing file stem for a run: experiment name plus the parameters
/// that vary inside the default suite.
fn slug(cfg: &ExperimentConfig) -> String {
    let mut s = format!("{}-n{}", cfg.experiment, cfg.n);
    if let Some(p) = cfg.p {
        s.push_str(&format!("-p{p}"));
    }
    if let Some(b) = cfg.b {
        s.push_str(&format!("-b{b}"));
    }
    s
}

fn emit(cfg: &ExperimentConfig, summary: &Summary, schema: &str, rows: &[Vec<f64>]) -> Result<()> {
    let Some(dir) = &cfg.out else { return Ok(()) };
    std::fs::create_dir_all(dir)?;
    let stem = slug(cfg);
    write_csv_rows(&dir.join(format!("{stem}.csv")), schema, schema, rows)?;
    summary.write_json(&dir.join(format!("{stem}.json")))?;
    Ok(())
}

fn seeded_field(grid: GridSpec<f64>, seed: u64) -> Field<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.size())
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Field::new(grid, values).expect("matching size")
}

/// Atom constructor shared by the sweep runners: mollification radius ell/8,
/// floored at the grid spacing so the mollifier stays resolved.
fn sweep_atom(
    family: AtomFamily,
    grid: GridSpec<f64>,
    ell: f64,
    beta: f64,
) -> Result<AtomSpec<f64>> {
    let eps = (ell / 8.0).max(grid.spacing());
    match family {
        AtomFamily::Dipole => make_dipole_atom(grid, ell, beta, eps),
        AtomFamily::Shell => make_shell_atom(grid, ell, beta, eps),
        AtomFamily::Custom => {
            Err(Error::InvalidParameter("no constructor for custom atoms".into()))
        }
    }
}

/// Envelope of a point cloud in log-spaced bins: per nonempty bin the
/// geometric midpoint and the max ordinate.
fn log_bin_envelope(points: &[(f64, f64)], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64)> {
    let step = (hi / lo).ln() / bins as f64;
    let mut best = vec![f64::NEG_INFINITY; bins];
    for &(x, y) in points {
        if x <= lo || x >= hi {
            continue;
        }
        let k = ((x / lo).ln() / step).floor() as usize;
        let k = k.min(bins - 1);
        if y > best[k] {
            best[k] = y;
        }
    }
    (0..bins)
        .filter(|&k| best[k].is_finite() && best[k] > 0.0)
        .map(|k| (lo * ((k as f64 + 0.5) * step).exp(), best[k]))
        .collect()
}

/// Robust radial profile: per log-spaced bin the geometric midpoint and the
/// median ordinate, which ignores the anisotropic lattice-truncation
/// ringing concentrated along the axes.
fn log_bin_median(points: &[(f64, f64)], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64)> {
    let step = (hi / lo).ln() / bins as f64;
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); bins];
    for &(x, y) in points {
        if x <= lo || x >= hi {
            continue;
        }
        let k = (((x / lo).ln() / step).floor() as usize).min(bins - 1);
        buckets[k].push(y);
    }
    (0..bins)
        .filter_map(|k| {
            let b = &mut buckets[k];
            if b.is_empty() {
                return None;
            }
            b.sort_by(|a, c| a.partial_cmp(c).unwrap());
            let med = b[b.len() / 2];
            (med > 0.0).then(|| (lo * ((k as f64 + 0.5) * step).exp(), med))
        })
        .collect()
}

pub fn run_partition_check(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let nyq = grid.nyquist() * (grid.dim() as f64).sqrt();
    let j_min = cfg.j_min.unwrap_or(-40);
    let j_max = cfg.j_max.unwrap_or(nyq.log2().ceil() as i32 + 2);
    let deviation = partition_of_unity_deviation(&grid, j_min, j_max);
    let pass = deviation < 1e-10;
    let summary = Summary::new(
        "partition-check",
        "partition-of-unity",
        pass,
        json!({"deviation": deviation, "j_min": j_min, "j_max": j_max}),
    );
    emit(cfg, &summary, "j_min,j_max,deviation", &[vec![j_min as f64, j_max as f64, deviation]])?;
    Ok(summary)
}

pub fn run_decomposition_check(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let bs: Vec<f64> = match cfg.b {
        Some(b) => vec![b],
        None => vec![0.5, 1.0, 1.5, 2.0],
    };
    let mut rows = Vec::new();
    let mut pass = true;
    for &b in &bs {
        let (mut exact, mut literal) = (0.0f64, 0.0f64);
        for i in 0..grid.size() {
            let xi = grid.freq(i);
            let full = eval_full_symbol(xi, b);
            let tilde = eval_tilde_symbol(xi, b);
            // exact identity: full = remainder + nu * tilde
            let nu = crate::symbols::eval_nu_symbol(xi, b)?;
            let re = (eval_remainder_symbol(xi, b) + tilde * nu - full).norm();
            // literal transcription: full =? remainder_literal + tilde
            let rl = (eval_remainder_symbol_literal(xi, b) + tilde - full).norm();
            exact = exact.max(re);
            literal = literal.max(rl);
        }
        pass &= exact < 1e-12;
        rows.push(vec![b, exact, literal]);
    }
    let summary = Summary::new(
        "decomposition-check",
        "symbol-decomposition-identity",
        pass,
        json!({
            "rows": rows.iter().map(|r| json!({"b": r[0], "exact_residual": r[1], "literal_residual": r[2]})).collect::<Vec<_>>(),
        }),
    );
    emit(cfg, &summary, "b,exact_residual,literal_residual", &rows)?;
    Ok(summary)
}

pub fn run_lp_kernel_scan(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let j_min = cfg.j_min.unwrap_or(2);
    let j_max = cfg.j_max.unwrap_or(7);
    let tuples: Vec<(f64, f64, [u32; 3])> = match cfg.q {
        Some(q) => vec![(q, cfg.b.unwrap_or(0.0), cfg.alpha.unwrap_or([0; 3]))],
        None => vec![
            (1.0, 0.0, [0, 0, 0]),
            (2.0, 0.0, [0, 0, 0]),
            (f64::INFINITY, 1.0, [0, 0, 0]),
            (2.0, 0.0, [1, 0, 0]),
        ],
    };
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut pass = true;
    for &(q, b, alpha) in &tuples {
        let (scan_rows, report) = kernel_norm_scan(grid, j_min..=j_max, q, b, alpha)?;
        pass &= report.slope_error() <= 0.15;
        for r in &scan_rows {
            rows.push(vec![q, b, alpha.iter().sum::<u32>() as f64, r.j as f64, r.norm]);
        }
        fits.push(json!({
            "q": q, "b": b, "alpha": alpha,
            "slope": report.slope, "target": report.target,
            "slope_error": report.slope_error(), "residual": report.residual,
        }));
    }
    let summary = Summary::new(
        "lp-kernel-scan",
        "dyadic-kernel-norm-growth",
        pass,
        json!({"fits": fits, "tolerance": 0.15}),
    );
    emit(cfg, &summary, "q,b,order,j,norm", &rows)?;
    Ok(summary)
}

pub fn run_kernel_profile(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let b = cfg.effective_b()?;
    let n = grid.dim() as f64;
    let kernel = tabulate_kernel(&SymbolSpec::TildeTb { b }, grid)?;
    let h = grid.spacing();
    let mut near = Vec::new();
    let mut far = Vec::new();
    for i in 0..grid.size() {
        let r = norm3(grid.point(i));
        let v = kernel.values()[i].norm();
        near.push(((1.0 - r).abs(), v));
        far.push((r, v));
    }
    let near_bins = log_bin_envelope(&near, 4.0 * h, 0.3, 12);
    let far_bins = log_bin_median(&far, 3.0, grid.length() / 2.0, 8);
    let near_target = b - (n + 1.0) / 2.0;
    let near_fit = fit_slope(&near_bins, near_target)?;
    let far_fit = fit_slope(&far_bins, -4.0)?;
    // the kernel estimate is an upper bound, so the profile must decay at
    // least as fast as the target (one-sided tolerance); on desk-scale
    // windows the measured slope overshoots the asymptotic exponent
    let pass = near_fit.slope <= near_target + 0.2 && far_fit.slope <= -4.0;
    let mut rows: Vec<Vec<f64>> =
        near_bins.iter().map(|&(x, y)| vec![0.0, x, y]).collect();
    rows.extend(far_bins.iter().map(|&(x, y)| vec![1.0, x, y]));
    let summary = Summary::new(
        "kernel-profile",
        "cone-kernel-profile",
        pass,
        json!({
            "near_slope": near_fit.slope, "near_target": near_target,
            "near_tolerance": 0.2, "far_slope": far_fit.slope, "far_ceiling": -4.0,
        }),
    );
    emit(cfg, &summary, "window,abscissa,envelope", &rows)?;
    Ok(summary)
}

pub fn run_atom_validate(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let beta = cfg.effective_beta();
    let family = cfg.effective_family();
    let mut rows = Vec::new();
    let mut pass = true;
    let mut first_atom = None;
    for &ell in &cfg.ell_sweep {
        let atom = sweep_atom(family, grid, ell, beta)?;
        let v = validate_atom(&atom, &default_t_samples(ell));
        pass &= v.pass;
        rows.push(vec![ell, v.leakage, v.cancel_residual, v.heat_sup, v.heat_bound, v.tv_mass]);
        first_atom.get_or_insert(atom);
    }
    // mollification monotonicity: smoothing must not create mass,
    // cancellation, or heat-supremum growth
    let atom = first_atom.ok_or_else(|| Error::Config("empty ell sweep".into()))?;
    let smoothed = mollify(&atom, atom.ell / 2.0)?;
    let samples = default_t_samples(atom.ell);
    let tv_before = atom.field.lp_norm(1.0)?;
    let tv_after = smoothed.field.lp_norm(1.0)?;
    let heat_before = heat_sup_measure(&atom.field, beta, &samples);
    let heat_after = heat_sup_measure(&smoothed.field, beta, &samples);
    let cancel_after = smoothed.field.integral().norm();
    let mono = tv_after <= tv_before * (1.0 + 1e-6)
        && heat_after <= heat_before * (1.0 + 1e-6)
        && cancel_after < 1e-10;
    pass &= mono;
    let summary = Summary::new(
        "atom-validate",
        "atom-conditions",
        pass,
        json!({
            "atoms": rows.len(), "mollify_monotone": mono,
            "tv_before": tv_before, "tv_after": tv_after,
            "heat_before": heat_before, "heat_after": heat_after,
        }),
    );
    emit(cfg, &summary, "ell,leakage,cancel_residual,heat_sup,heat_bound,tv_mass", &rows)?;
    Ok(summary)
}

pub fn run_heat_norm_scan(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let beta = cfg.effective_beta();
    let ell = *cfg.ell_sweep.first().ok_or_else(|| Error::Config("empty ell sweep".into()))?;
    let atom = sweep_atom(cfg.effective_family(), grid, ell, beta)?;
    let scan = heat_norm_scan(&atom, &cfg.t_sweep)?;
    let l1_large = scan
        .l1_large_t
        .as_ref()
        .ok_or_else(|| Error::Config("t sweep has no large-t segment".into()))?;
    let pass = l1_large.slope_error() <= 0.1;
    let rows: Vec<Vec<f64>> =
        scan.rows.iter().map(|r| vec![r.t, r.sup_norm, r.l1_norm]).collect();
    let seg = |s: &Option<crate::report::SlopeReport>| {
        s.as_ref().map(|r| json!({"slope": r.slope, "target": r.target}))
    };
    let summary = Summary::new(
        "heat-norm-scan",
        "heat-extension-decay",
        pass,
        json!({
            "l1_large_t_slope": l1_large.slope, "target": l1_large.target, "tolerance": 0.1,
            "sup_small_t": seg(&scan.sup_small_t), "sup_large_t": seg(&scan.sup_large_t),
            "l1_small_t": seg(&scan.l1_small_t),
        }),
    );
    emit(cfg, &summary, "t,sup_norm,l1_norm", &rows)?;
    Ok(summary)
}

pub fn run_riesz_scan(cfg: &ExperimentConfig) -> Result<Summary> {
    let p = cfg.require_p()?;
    let beta = cfg.effective_beta();
    let family = cfg.effective_family();
    let ells = &cfg.ell_sweep;
    let (rows, report) = atom_riesz_scan(family, ells, p, beta, cfg.n, cfg.points)?;
    // two-route agreement on the mid-sweep atom
    let ell = ells[ells.len() / 2];
    let grid = GridSpec::new(cfg.n, cfg.points, 8.0 * ell)?;
    let atom = build_atom(family, grid, ell, beta)?;
    let alpha = b_p(cfg.n, p);
    let spectral = riesz_spectral(&atom.field, alpha)?;
    let quad = HeatQuadrature::for_atom(&grid, ell)?;
    let heat_route = riesz_heat(&atom.field, alpha, &quad)?;
    let diff = spectral.axpy(Complex::new(-1.0, 0.0), &heat_route)?;
    let two_route = diff.lp_norm(2.0)? / spectral.lp_norm(2.0)?;
    let pass = report.slope_error() <= 0.15 && two_route <= 1e-3;
    let csv: Vec<Vec<f64>> = rows.iter().map(|&(l, v)| vec![l, v]).collect();
    let summary = Summary::new(
        "riesz-scan",
        "riesz-potential-atom-scaling",
        pass,
        json!({
            "slope": report.slope, "target": report.target, "tolerance": 0.15,
            "residual": report.residual, "two_route_gap": two_route, "p": p, "beta": beta,
        }),
    );
    emit(cfg, &summary, "ell,riesz_l2_norm", &csv)?;
    Ok(summary)
}

pub fn run_wave_decay(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let p = cfg.require_p()?;
    let beta = cfg.effective_beta();
    let ell = *cfg.ell_sweep.first().ok_or_else(|| Error::Config("empty ell sweep".into()))?;
    let atom = sweep_atom(cfg.effective_family(), grid, ell, beta)?;
    let bp = b_p(cfg.n, p);
    let t_ref = 1.0;
    // n=3, f=0, p=1 is the linear-growth regime; otherwise data enters
    // through f and the dispersive decay target applies
    let growth_case = cfg.n == 3 && p == 1.0;
    let data = if growth_case {
        prepare_bessel_data(None, Some(&atom), bp, t_ref)?
    } else {
        prepare_bessel_data(Some(&atom), None, bp, t_ref)?
    };
    let scan = cauchy_decay_scan(&data, p, &cfg.t_sweep, growth_case)?;
    // discrete energy must be exactly conserved along the sweep
    let e0 = wave_energy(&data, 0.0)?;
    let mut drift = 0.0f64;
    for &t in &cfg.t_sweep {
        drift = drift.max((wave_energy(&data, t)? - e0).abs() / e0);
    }
    let pass = scan.fit.slope_error() <= 0.15 && drift <= 1e-10;
    let rows: Vec<Vec<f64>> = scan.rows.iter().map(|r| vec![r.t, r.norm_p, r.scaled]).collect();
    let summary = Summary::new(
        "wave-decay",
        "cauchy-evolution-norms",
        pass,
        json!({
            "slope": scan.fit.slope, "target": scan.fit.target, "tolerance": 0.15,
            "band_ratio": scan.band_ratio, "energy_drift": drift, "growth_case": growth_case,
        }),
    );
    emit(cfg, &summary, "t,norm_p,scaled", &rows)?;
    Ok(summary)
}

pub fn run_dilated_scan(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let p = cfg.require_p()?;
    let b = cfg.effective_b()?;
    let ell = *cfg.ell_sweep.first().ok_or_else(|| Error::Config("empty ell sweep".into()))?;
    let atom = sweep_atom(cfg.effective_family(), grid, ell, cfg.effective_beta())?;
    let (rows, report) = dilated_multiplier_scan(&atom, b, p, &cfg.t_sweep)?;
    let pass = report.slope_error() <= 0.15;
    let csv: Vec<Vec<f64>> = rows.iter().map(|&(t, v)| vec![t, v]).collect();
    let summary = Summary::new(
        "dilated-scan",
        "dilated-multiplier-decay",
        pass,
        json!({
            "slope": report.slope, "target": report.target, "tolerance": 0.15,
            "residual": report.residual, "b": b, "p": p,
        }),
    );
    emit(cfg, &summary, "t,norm_p", &csv)?;
    Ok(summary)
}

pub fn run_region_norms(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let p = cfg.require_p()?;
    if !p.is_finite() {
        return Err(Error::Config("region norms need finite p".into()));
    }
    let beta = cfg.effective_beta();
    let b = cfg.effective_b()?;
    let n = cfg.n as f64;
    let sqrt_n = n.sqrt();
    for &ell in &cfg.ell_sweep {
        if ell >= 1.0 / (3.0 * sqrt_n) {
            return Err(Error::InvalidParameter(format!(
                "region norms need ell < 1/(3 sqrt n); got {ell}"
            )));
        }
    }
    let mut rows = Vec::new();
    let mut per_region: [Vec<f64>; 4] = Default::default();
    let mut additive = true;
    let mut profile_fit = None;
    let largest = cfg.ell_sweep.iter().cloned().fold(f64::MIN, f64::max);
    for &ell in &cfg.ell_sweep {
        let atom = sweep_atom(cfg.effective_family(), grid, ell, beta)?;
        let image = crate::symbols::apply_symbol(&atom.field, &SymbolSpec::TildeTb { b })?;
        let r1 = 1.0 - 2.0 * sqrt_n * ell;
        let r2 = 1.0 + 2.0 * sqrt_n * ell;
        let r3 = 2.0 * sqrt_n;
        let bounds = [(0.0, r1), (r1, r2), (r2, r3), (r3, f64::INFINITY)];
        let mut js = [0.0f64; 4];
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            let (norm, _) = image.lp_norm_region(p, lo, hi)?;
            js[i] = norm.powf(p);
            per_region[i].push(js[i]);
        }
        let total = image.lp_norm(p)?.powf(p);
        additive &= (js.iter().sum::<f64>() - total).abs() <= 1e-12 * total;
        rows.push(vec![ell, js[0], js[1], js[2], js[3], total]);
        if ell == largest {
            // gradient-kernel profile in A1 and A3: envelope of |T~ a|
            // against |1 - |x||, expected slope -(1/p + 1)
            let mut pts = Vec::new();
            for i in 0..grid.size() {
                let r = norm3(grid.point(i));
                if r < r1 || (r >= r2 && r < r3) {
                    pts.push(((1.0 - r).abs(), image.values()[i].norm()));
                }
            }
            let bins = log_bin_envelope(&pts, 2.0 * sqrt_n * ell * 1.05, r3 - 1.0, 10);
            profile_fit = Some(fit_slope(&bins, -(1.0 / p + 1.0))?);
        }
    }
    let bands: Vec<f64> = per_region
        .iter()
        .map(|v| band_ratio(v))
        .collect::<Result<Vec<_>>>()?;
    let profile = profile_fit.ok_or_else(|| Error::Config("empty ell sweep".into()))?;
    let bands_ok = bands.iter().all(|&r| r <= cfg.band_threshold);
    // the profile target is an upper bound on the kernel envelope, so the
    // gate is one-sided: decaying faster than -(1/p + 1) is consistent
    let profile_ok = profile.slope <= profile.target + 0.3;
    let pass = bands_ok && additive && profile_ok;
    let summary = Summary::new(
        "region-norms",
        "small-cube-region-split",
        pass,
        json!({
            "region_band_ratios": bands, "band_threshold": cfg.band_threshold,
            "additivity_exact": additive,
            "profile_slope": profile.slope, "profile_target": profile.target,
            "profile_tolerance": 0.3,
        }),
    );
    emit(cfg, &summary, "ell,j1,j2,j3,j4,total_p", &rows)?;
    Ok(summary)
}

pub fn run_dyadic_split(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let p = cfg.require_p()?;
    let beta = cfg.effective_beta();
    let n = cfg.n as f64;
    if !(beta > n - 1.0 && beta <= n) {
        return Err(Error::InvalidParameter("dyadic split needs beta in (n-1, n]".into()));
    }
    let b = cfg.effective_b()?;
    // target exponent (1-n)/(p' - (n-beta)); the p = 1 branch (p' infinite)
    // is exactly 0 and is gated by band-boundedness instead of a slope
    let exponent = if p == 1.0 { 0.0 } else { (1.0 - n) / (p / (p - 1.0) - (n - beta)) };
    let j_lo = -1;
    let mut j_hi = j_lo;
    while resolvable(&grid, j_hi + 1) {
        j_hi += 1;
    }
    if j_hi <= j_lo {
        return Err(Error::UnresolvableDyadicIndex { j: j_lo + 1 });
    }
    let mut rows = Vec::new();
    let mut totals = Vec::new();
    let mut triangle = true;
    let mut clamped = false;
    for &ell in &cfg.ell_sweep {
        let atom = sweep_atom(cfg.effective_family(), grid, ell, beta)?;
        let spectrum = dft(&atom.field);
        let total = crate::symbols::apply_symbol(&atom.field, &SymbolSpec::TildeTb { b })?
            .lp_norm(p)?;
        // cutoff 2^k ~ ell^(exponent - 1), clamped into the resolvable range
        let k_raw = ((exponent - 1.0) * ell.log2()).round() as i32;
        let k = k_raw.clamp(j_lo, j_hi);
        clamped |= k != k_raw;
        let mut low_sum = 0.0;
        let mut high_sum = 0.0;
        for j in j_lo..=j_hi {
            let piece = idft(&spectrum.multiply(|xi| SymbolSpec::LpPiece { j, b }.eval(xi))?)
                .lp_norm(p)?;
            if j <= k {
                low_sum += piece;
            } else {
                high_sum += piece;
            }
        }
        // spectral tail above the last resolvable annulus completes the
        // identity exactly on the lattice
        let scale = 2.0f64.powi(-j_hi);
        let tail = idft(&spectrum.multiply(|xi: [f64; 3]| {
            let damped = eval_tilde_symbol(xi, b);
            let cut = 1.0 - eval_big_phi([xi[0] * scale, xi[1] * scale, xi[2] * scale]);
            damped * cut
        })?)
        .lp_norm(p)?;
        high_sum += tail;
        triangle &= total <= low_sum + high_sum + 1e-10 * total.max(1.0);
        totals.push((ell, total));
        rows.push(vec![ell, total, low_sum, high_sum, k as f64]);
    }
    let (slope_json, scaling_ok) = if exponent == 0.0 {
        let band = band_ratio(&totals.iter().map(|t| t.1).collect::<Vec<_>>())?;
        (json!({"band_ratio": band, "band_threshold": cfg.band_threshold}),
         band <= cfg.band_threshold)
    } else {
        let fit = fit_slope(&totals, exponent)?;
        (json!({"slope": fit.slope, "target": exponent, "tolerance": 0.3}),
         fit.slope_error() <= 0.3)
    };
    let pass = triangle && scaling_ok;
    let summary = Summary::new(
        "dyadic-split",
        "dyadic-frequency-split",
        pass,
        json!({
            "triangle_ok": triangle, "scaling": slope_json, "cutoff_clamped": clamped,
            "j_range": [j_lo, j_hi],
        }),
    );
    emit(cfg, &summary, "ell,total,low_sum,high_sum,k", &rows)?;
    Ok(summary)
}

pub fn run_uniform_bound(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let p = cfg.require_p()?;
    let beta = cfg.effective_beta();
    let b = cfg.effective_b()?;
    // a b override below b_p leaves the theorem's hypotheses: exploratory,
    // recorded but never gating
    let exploratory = (b - b_p(cfg.n, p)).abs() > 1e-12;
    let mut rows = Vec::new();
    for &ell in &cfg.ell_sweep {
        let atom = sweep_atom(cfg.effective_family(), grid, ell, beta)?;
        // full operator through the decomposition: damped oscillatory part
        // plus the smooth remainder
        let damped = crate::symbols::apply_symbol(&atom.field, &SymbolSpec::TildeTb { b })?;
        let rest = crate::symbols::apply_symbol(&atom.field, &SymbolSpec::Remainder { b })?;
        let norm = damped.axpy(Complex::new(1.0, 0.0), &rest)?.lp_norm(p)?;
        rows.push(vec![ell, norm]);
    }
    let norms: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let band = band_ratio(&norms)?;
    // trend across the sweep (ell ascending): growing toward small ell
    // means the first entry dominates the last
    let small_ell_growth = norms.first().unwrap_or(&0.0) / norms.last().unwrap_or(&1.0);
    let pass = exploratory || band <= cfg.band_threshold;
    let summary = Summary::new(
        "uniform-bound",
        "uniform-atom-operator-bound",
        pass,
        json!({
            "band_ratio": band, "band_threshold": cfg.band_threshold,
            "exploratory": exploratory, "b": b, "p": p, "beta": beta,
            "small_ell_growth": small_ell_growth,
        }),
    );
    emit(cfg, &summary, "ell,norm_p", &rows)?;
    Ok(summary)
}

pub fn run_bmo_probe(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let b = cfg.b.unwrap_or((cfg.n as f64 + 1.0) / 2.0);
    let (rows, ratio) = bmo_probe(grid, &cfg.ell_sweep, b)?;
    // smoothing: one extra order of damping must shrink the probe
    let (smoother, _) = bmo_probe(grid, &cfg.ell_sweep, b + 1.0)?;
    let smoothing_monotone = rows.iter().zip(&smoother).all(|(a, s)| s.1 < a.1);
    let pass = ratio <= cfg.band_threshold;
    let csv: Vec<Vec<f64>> = rows
        .iter()
        .zip(&smoother)
        .map(|(&(l, v), &(_, w))| vec![l, v, w])
        .collect();
    let summary = Summary::new(
        "bmo-probe",
        "sharp-maximal-bmo-probe",
        pass,
        json!({
            "band_ratio": ratio, "band_threshold": cfg.band_threshold, "b": b,
            "smoothing_monotone": smoothing_monotone,
        }),
    );
    emit(cfg, &summary, "ell_q,probe,probe_smoother", &csv)?;
    Ok(summary)
}

pub fn run_sharp_maximal_convergence(cfg: &ExperimentConfig) -> Result<Summary> {
    let grid = cfg.grid()?;
    let g = seeded_field(grid, cfg.seed);
    let full = RadiusLadder::saturated(&grid)?;
    let m_full = sharp_maximal(&g, &full);
    let sup_full = m_full.sup_norm();
    let mut rows = Vec::new();
    let mut pass = true;
    let mut prev: Option<Field<f64>> = None;
    for ell in [2.0, 4.0, 8.0] {
        let ladder = RadiusLadder::new(&grid, ell)?;
        let m_trunc = sharp_maximal(&g, &ladder);
        let u = u_ell_linearization(&g, &g, &ladder)?;
        let mut max_gap = 0.0f64;
        let mut dominated = true;
        let mut monotone = true;
        for i in 0..grid.size() {
            let (uv, mt, mf) = (u.values()[i].norm(), m_trunc.values()[i].re, m_full.values()[i].re);
            dominated &= uv <= mt + 1e-13 && mt <= mf + 1e-13;
            if let Some(prev) = &prev {
                monotone &= prev.values()[i].re <= mt + 1e-13;
            }
            max_gap = max_gap.max(mt - u.values()[i].re);
        }
        let bound = m_trunc.sup_norm() / ell;
        pass &= dominated && monotone && max_gap <= bound + 1e-13;
        rows.push(vec![ell, max_gap, bound]);
        prev = Some(m_trunc);
    }
    // saturation: a truncation whose ladder covers every radius reproduces
    // the full sharp maximal exactly
    let wide = RadiusLadder::new(&grid, grid.length())?;
    let saturation_gap = sharp_maximal(&g, &wide).max_difference(&m_full)?;
    pass &= saturation_gap == 0.0;
    let summary = Summary::new(
        "sharp-maximal-convergence",
        "sharp-maximal-linearization",
        pass,
        json!({
            "saturation_gap": saturation_gap, "sup_sharp_maximal": sup_full, "seed": cfg.seed,
        }),
    );
    emit(cfg, &summary, "ell,selection_gap,gap_bound", &rows)?;
    Ok(summary)
}
