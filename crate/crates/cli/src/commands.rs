//! Subcommand implementations.

use crate::config::{parse_grid, parse_moduli, parse_shifts};
use crate::report::{fmt, write_summary, DataTable, Exponents, OutFormat, Summary};
use serde::Serialize;
use shiftsieve_core::bessel::{
    k_square_residue_error, kernel_shifted_sum, mellin_identity_check, weighted_square_integral,
    BesselEvaluator, SmoothBump,
};
use shiftsieve_core::dirichlet::{progression_eta_sum, smoothed_dyadic_sum};
use shiftsieve_core::eulerprod::{
    admissible_pair_scan, fourth_moment_bound, gamma_correction, main_term_factor,
    partial_sym_power, sym_power_bound_check, theta_factor_with_gamma, ZETA2,
};
use shiftsieve_core::hecke::EigenvalueTable;
use shiftsieve_core::primes::{self, FactorTable};
use shiftsieve_core::shiftsums::{
    decay_table, partition_sums_with, shifted_sum, Calibration, EtaFunction,
};
use shiftsieve_core::sieveweights::{
    coupled_sieve_bound, linear_sieve_weights, make_context, DensityFunction,
};
use std::collections::BTreeMap;
use std::path::PathBuf;

pub enum CliError {
    Config(String),
    Core(shiftsieve_core::Error),
    Io(std::io::Error),
}

impl From<shiftsieve_core::Error> for CliError {
    fn from(e: shiftsieve_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<String> for CliError {
    fn from(msg: String) -> Self {
        CliError::Config(msg)
    }
}

pub struct Env {
    pub out_dir: PathBuf,
    pub format: OutFormat,
    pub source: String,
    pub table_path: Option<PathBuf>,
    pub inputs: BTreeMap<String, String>,
}

impl Env {
    fn load_table(&self, limit: u64) -> Result<EigenvalueTable, CliError> {
        match self.source.as_str() {
            "delta" => Ok(EigenvalueTable::delta(limit)?),
            "file" => {
                let path = self.table_path.as_ref().expect("checked in main");
                Ok(EigenvalueTable::load(path, limit)?)
            }
            _ => unreachable!(),
        }
    }

    fn summary<T: Serialize>(
        &self,
        command: &str,
        table: &EigenvalueTable,
        calib: Calibration,
        inputs: BTreeMap<String, String>,
        results: T,
    ) -> Summary<T> {
        let mut all = self.inputs.clone();
        all.extend(inputs);
        Summary {
            command: command.to_string(),
            source: table.source().to_string(),
            table_limit: table.limit(),
            calibration: calib.into(),
            exponents: Exponents::default(),
            inputs: all,
            results,
        }
    }
}

fn z_for(x: f64, c: f64) -> f64 {
    (x.ln() / (c * x.ln().ln())).exp()
}

// ---------------------------------------------------------------- eigen

#[derive(Serialize)]
struct EigenResults {
    bound_mode: String,
    dumped: u64,
    lambda_2: f64,
    lambda_3: f64,
}

pub fn eigen(env: Env, n: u64, dump_limit: u64) -> Result<(), CliError> {
    let table = env.load_table(n)?;
    let calib = Calibration::new(&table)?;
    let dump = dump_limit.min(n);
    let mut data = DataTable::new("eigen", vec!["n", "lambda"]);
    for i in 1..=dump {
        data.push(vec![i.to_string(), fmt(table.lambda(i))]);
    }
    data.write(&env.out_dir, env.format)?;

    let results = EigenResults {
        bound_mode: format!("{:?}", table.bound_mode()),
        dumped: dump,
        lambda_2: if n >= 2 { table.lambda(2) } else { f64::NAN },
        lambda_3: if n >= 3 { table.lambda(3) } else { f64::NAN },
    };
    let mut inputs = BTreeMap::new();
    inputs.insert("n".into(), n.to_string());
    inputs.insert("dump_limit".into(), dump_limit.to_string());
    let summary = env.summary("eigen", &table, calib, inputs, results);
    write_summary(&env.out_dir, "eigen", &summary)?;
    Ok(())
}

// ----------------------------------------------------------------- sums

#[derive(Serialize)]
struct SumsResults {
    rows: usize,
    max_x: f64,
}

pub fn sums(
    env: Env,
    ell_raw: &str,
    x_raw: &str,
    z_fixed: Option<f64>,
    c: f64,
    cutoff_exp: f64,
) -> Result<(), CliError> {
    let shifts = parse_shifts(ell_raw)?;
    let grid = parse_grid(x_raw)?;
    let max_x = *grid.last().unwrap();
    let pad = shifts.iter().map(|&l| l.max(0)).max().unwrap() as u64;
    let table = env.load_table(max_x.ceil() as u64 + pad)?;
    let calib = Calibration::new(&table)?;
    let factors = FactorTable::new(table.limit());

    let mut data = DataTable::new(
        "sums",
        vec![
            "ell",
            "x",
            "z",
            "S",
            "S_large_a",
            "S_large_a_shift",
            "S_star",
        ],
    );
    for &shift in &shifts {
        let mut decay = DataTable::new(
            format!("decay_ell{shift}"),
            vec!["x", "S", "S_over_x", "S_norm_1_7"],
        );
        for row in decay_table(&table, shift, &grid)? {
            decay.push(vec![
                fmt(row.x),
                fmt(row.sum),
                fmt(row.per_x),
                fmt(row.normalized),
            ]);
        }
        decay.write(&env.out_dir, env.format)?;

        for &x in &grid {
            let z = z_fixed.unwrap_or_else(|| z_for(x, c));
            let p = partition_sums_with(&table, &factors, shift, x, z, cutoff_exp)?;
            data.push(vec![
                shift.to_string(),
                fmt(x),
                fmt(z),
                fmt(p.total),
                fmt(p.large_a),
                fmt(p.large_a_shift),
                fmt(p.star),
            ]);
        }
    }
    let rows = data.rows.len();
    data.write(&env.out_dir, env.format)?;

    let mut inputs = BTreeMap::new();
    inputs.insert("ell".into(), ell_raw.to_string());
    inputs.insert("x".into(), x_raw.to_string());
    if let Some(z) = z_fixed {
        inputs.insert("z".into(), fmt(z));
    } else {
        inputs.insert("c".into(), fmt(c));
    }
    inputs.insert("cutoff_exp".into(), fmt(cutoff_exp));
    let summary = env.summary("sums", &table, calib, inputs, SumsResults { rows, max_x });
    write_summary(&env.out_dir, "sums", &summary)?;
    Ok(())
}

// ---------------------------------------------------------------- sieve

#[derive(Serialize)]
struct SieveResults {
    support_size: usize,
    residual_min: i64,
    residual_audit_max: u64,
    moebius_exact: bool,
    coupled_c: f64,
    coupled_v1: f64,
    coupled_v2: f64,
    coupled_product: f64,
}

pub fn sieve(
    env: Env,
    z: f64,
    level: f64,
    ell: i64,
    exclude: u64,
    audit_max: u64,
) -> Result<(), CliError> {
    if ell == 0 {
        return Err(CliError::Config("ell must be non-zero".into()));
    }
    let ctx = make_context(z, exclude);
    let weights = linear_sieve_weights(&ctx, level)?;

    let mut data = DataTable::new("sieve", vec!["d", "xi"]);
    for &(d, xi) in weights.support() {
        data.push(vec![d.to_string(), xi.to_string()]);
    }
    data.write(&env.out_dir, env.format)?;

    let mut residual_min = i64::MAX;
    for n in 1..=audit_max {
        residual_min = residual_min.min(weights.upper_bound_residual(n));
    }
    if residual_min < 0 {
        return Err(CliError::Core(shiftsieve_core::Error::Consistency(
            format!("upper-bound residual {residual_min} is negative"),
        )));
    }
    let moebius_exact = weights.is_full_moebius();

    // coupled bound with the pipeline densities at unit cofactors
    let table = env.load_table((z as u64).max(1000))?;
    let calib = Calibration::new(&table)?;
    let pipeline_ctx = make_context(z, 6 * ell.unsigned_abs());
    let g1 = DensityFunction::main_density(&table, &pipeline_ctx, 1);
    let g2 = DensityFunction::shifted_density(&table, &pipeline_ctx, 1, 1);
    let bound = coupled_sieve_bound(&pipeline_ctx, &g1, &g2, level, level)?;

    let results = SieveResults {
        support_size: weights.support().len(),
        residual_min,
        residual_audit_max: audit_max,
        moebius_exact,
        coupled_c: bound.c,
        coupled_v1: bound.v1,
        coupled_v2: bound.v2,
        coupled_product: bound.product,
    };
    let mut inputs = BTreeMap::new();
    inputs.insert("z".into(), fmt(z));
    inputs.insert("level".into(), fmt(level));
    inputs.insert("ell".into(), ell.to_string());
    inputs.insert("exclude".into(), exclude.to_string());
    inputs.insert("audit_max".into(), audit_max.to_string());
    let summary = env.summary("sieve", &table, calib, inputs, results);
    write_summary(&env.out_dir, "sieve", &summary)?;
    Ok(())
}

// ---------------------------------------------------------------- euler

#[derive(Serialize)]
struct EulerResults {
    m_factor: f64,
    m_factor_z: f64,
    sym_bound: f64,
    min_prime_margin: f64,
    gamma: f64,
    gamma_tail_estimate: f64,
    fourth_moment_sum: f64,
    fourth_moment_bound: f64,
    fourth_moment_ratio: f64,
    best_admissible_saving: f64,
}

pub fn euler(env: Env, z: f64, x: f64, c: f64, ab_scan: bool) -> Result<(), CliError> {
    let limit = (z as u64).max(100_000);
    let table = env.load_table(limit)?;
    let calib = Calibration::new(&table)?;

    let mut data = DataTable::new("euler", vec!["m", "z", "value", "log_value"]);
    for m in 1..=8u8 {
        let p = partial_sym_power(&table, m, z)?;
        data.push(vec![
            m.to_string(),
            fmt(z),
            fmt(p.value),
            fmt(p.log_value),
        ]);
    }
    data.write(&env.out_dir, env.format)?;

    let rows = if ab_scan {
        admissible_pair_scan()
    } else {
        admissible_pair_scan().into_iter().take(1).collect()
    };
    let mut scan = DataTable::new(
        "euler_scan",
        vec!["a", "b", "min_margin", "admissible", "saving"],
    );
    let mut best = f64::NEG_INFINITY;
    for r in &rows {
        if r.admissible {
            best = best.max(r.saving);
        }
        scan.push(vec![
            fmt(r.a),
            fmt(r.b),
            fmt(r.min_margin),
            r.admissible.to_string(),
            fmt(r.saving),
        ]);
    }
    scan.write(&env.out_dir, env.format)?;

    // trend of the main-term factor against its symmetric-power bound
    // and the asymptotic (log z)^{-1/6} shape (reported, not asserted)
    let mut trend = DataTable::new(
        "euler_mtrend",
        vec!["z", "m_factor", "sym_bound", "log_z_pow"],
    );
    for zt in [100.0f64, 1000.0, 10_000.0, 100_000.0] {
        if zt > z.max(10_000.0) || zt > table.limit() as f64 {
            break;
        }
        let rep = sym_power_bound_check(&table, zt)?;
        trend.push(vec![
            fmt(zt),
            fmt(rep.m),
            fmt(rep.bound),
            fmt(zt.ln().powf(-1.0 / 6.0)),
        ]);
    }
    trend.write(&env.out_dir, env.format)?;

    let mf = main_term_factor(&table, x, c)?;
    let check = sym_power_bound_check(&table, z)?;
    let gamma = gamma_correction(&table, 10_000.min(table.limit()))?;
    let m4 = fourth_moment_bound(&table, 100_000.0f64.min(table.limit() as f64))?;

    let results = EulerResults {
        m_factor: mf.m,
        m_factor_z: mf.z,
        sym_bound: check.bound,
        min_prime_margin: check.min_prime_margin,
        gamma: gamma.value,
        gamma_tail_estimate: gamma.tail_estimate,
        fourth_moment_sum: m4.sum,
        fourth_moment_bound: m4.bound,
        fourth_moment_ratio: m4.ratio,
        best_admissible_saving: best,
    };
    let mut inputs = BTreeMap::new();
    inputs.insert("z".into(), fmt(z));
    inputs.insert("x".into(), fmt(x));
    inputs.insert("c".into(), fmt(c));
    inputs.insert("ab_scan".into(), ab_scan.to_string());
    let summary = env.summary("euler", &table, calib, inputs, results);
    write_summary(&env.out_dir, "euler", &summary)?;
    Ok(())
}

// ------------------------------------------------------------ dirichlet

#[derive(Serialize)]
struct DirichletResults {
    max_reconstruction_error: f64,
    spreads: BTreeMap<String, f64>,
    /// Least-squares slope of log|direct - main| against log x per
    /// modulus; reported only, since the implied constants of the error
    /// term are unknown.
    error_exponent_fits: BTreeMap<String, f64>,
    smoothed_sharp: f64,
    smoothed_majorant: f64,
    smoothed_minorant: f64,
    smoothed_main: f64,
    smoothed_error_bound: f64,
}

pub fn dirichlet(env: Env, q_raw: &str, x: f64) -> Result<(), CliError> {
    let moduli = parse_moduli(q_raw)?;
    let table = env.load_table(x.ceil() as u64 + 1)?;
    let calib = Calibration::new(&table)?;
    let eta = EtaFunction::new(&table);

    let mut data = DataTable::new("dirichlet", vec!["q", "m", "direct", "via_orthogonality", "main"]);
    let mut max_err = 0.0f64;
    let mut spreads = BTreeMap::new();
    for &q in &moduli {
        let mut unit_sums = Vec::new();
        for m in 0..q.max(1) {
            if primes::gcd(m, q) != 1 {
                continue;
            }
            let p = progression_eta_sum(&eta, &calib, m, q, x)?;
            max_err = max_err.max((p.direct - p.via_orthogonality).abs() / (1.0 + p.direct));
            unit_sums.push(p.direct);
            data.push(vec![
                q.to_string(),
                m.to_string(),
                fmt(p.direct),
                fmt(p.via_orthogonality),
                fmt(p.main),
            ]);
        }
        let mean = unit_sums.iter().sum::<f64>() / unit_sums.len() as f64;
        let spread = unit_sums
            .iter()
            .map(|v| (v - mean).abs())
            .fold(0.0f64, f64::max)
            / mean;
        spreads.insert(q.to_string(), spread);
    }
    data.write(&env.out_dir, env.format)?;

    // empirical error exponent: fit log|direct - main| against log x on
    // a sub-grid, first unit residue of each modulus
    let mut error_exponent_fits = BTreeMap::new();
    for &q in &moduli {
        let m = (1..=q).find(|&m| primes::gcd(m, q) == 1).unwrap_or(1);
        let mut us = Vec::new();
        let mut vs = Vec::new();
        let mut xt = x;
        while xt >= 1_000.0 && us.len() < 4 {
            let p = progression_eta_sum(&eta, &calib, m, q, xt)?;
            let err = (p.direct - p.main).abs();
            if err > 0.0 {
                us.push(xt.ln());
                vs.push(err.ln());
            }
            xt /= 10.0;
        }
        if us.len() >= 2 {
            let n = us.len() as f64;
            let mu = us.iter().sum::<f64>() / n;
            let mv = vs.iter().sum::<f64>() / n;
            let denom: f64 = us.iter().map(|u| (u - mu) * (u - mu)).sum();
            let slope = us
                .iter()
                .zip(&vs)
                .map(|(u, v)| (u - mu) * (v - mv))
                .sum::<f64>()
                / denom;
            error_exponent_fits.insert(q.to_string(), slope);
        }
    }

    // smoothed dyadic sandwich for the eta coefficients on [X, 2X]
    let big_x = x / 4.0;
    let y = big_x.powf(0.75).max(1.0).min(big_x);
    let residue = theta_factor_with_gamma(&table, 1, calib.gamma)? / ZETA2 * calib.l_hat;
    let sm = smoothed_dyadic_sum(|n| eta.value(n), big_x, y, residue, 1.0)?;

    let results = DirichletResults {
        max_reconstruction_error: max_err,
        spreads,
        error_exponent_fits,
        smoothed_sharp: sm.sharp,
        smoothed_majorant: sm.majorant,
        smoothed_minorant: sm.minorant,
        smoothed_main: sm.main,
        smoothed_error_bound: sm.error_bound,
    };
    let mut inputs = BTreeMap::new();
    inputs.insert("q".into(), q_raw.to_string());
    inputs.insert("x".into(), fmt(x));
    let summary = env.summary("dirichlet", &table, calib, inputs, results);
    write_summary(&env.out_dir, "dirichlet", &summary)?;
    Ok(())
}

// --------------------------------------------------------------- bessel

#[derive(Serialize)]
struct BesselResults {
    mellin_max_rel_err: f64,
    asymptotic_max_constant: f64,
    normalized_grid_max: f64,
    normalized_grid_min: f64,
    residue_error_r3: f64,
    residue_error_r10: f64,
    kernel_value: f64,
}

pub fn bessel(env: Env) -> Result<(), CliError> {
    let mut mellin = DataTable::new(
        "bessel_mellin",
        vec!["mu", "nu", "s", "numeric", "closed_form", "rel_err"],
    );
    let mut max_rel = 0.0f64;
    for (mu, nu, s) in [
        (0.0, 0.0, 1.0),
        (1.0, 1.0, 1.0),
        (0.5, 1.5, 1.2),
        (2.0, 1.0, 0.8),
        (1.0, 0.0, 1.5),
        (3.0, 2.0, 1.0),
    ] {
        let m = mellin_identity_check(mu, nu, s)?;
        max_rel = max_rel.max(m.rel_err);
        mellin.push(vec![
            fmt(mu),
            fmt(nu),
            fmt(s),
            fmt(m.numeric),
            fmt(m.closed_form),
            fmt(m.rel_err),
        ]);
    }
    mellin.write(&env.out_dir, env.format)?;

    let eval = BesselEvaluator::new(1e-12)?;
    let mut asym = DataTable::new("bessel_asym", vec!["r", "y", "constant"]);
    let mut max_c = 0.0f64;
    for r in [0.0f64, 1.0, 2.0, 3.0] {
        for mult in [1.0f64, 2.0, 5.0, 10.0] {
            let y = mult * (1.0 + r * r);
            let k = eval.eval(r, y)?;
            let lead = (std::f64::consts::PI / (2.0 * y)).sqrt() * (-y).exp();
            let c = (k - lead).abs() / lead * y / (1.0 + r * r);
            max_c = max_c.max(c);
            asym.push(vec![fmt(r), fmt(y), fmt(c)]);
        }
    }
    asym.write(&env.out_dir, env.format)?;

    let g = SmoothBump::new(1.0, 2.0)?;
    let mut b5 = DataTable::new("bessel_b5", vec!["r", "w", "integral", "normalized"]);
    let mut max_norm = 0.0f64;
    let mut min_norm = f64::MAX;
    for r in 1..=12u32 {
        for w in [0.1f64, 1.0, 10.0] {
            let (integral, normalized) = weighted_square_integral(&g, w, r as f64)?;
            max_norm = max_norm.max(normalized);
            min_norm = min_norm.min(normalized);
            b5.push(vec![
                r.to_string(),
                fmt(w),
                fmt(integral),
                fmt(normalized),
            ]);
        }
    }
    b5.write(&env.out_dir, env.format)?;

    // r^{1-sigma} e^{pi r}-normalized square Mellin integrals: the decay
    // trend in the order for sigma in (0, 3/2]
    let mut sym = DataTable::new(
        "bessel_sym_decay",
        vec!["sigma", "r", "integral", "normalized"],
    );
    for sigma in [0.5f64, 1.0, 1.5] {
        for r in [2.0f64, 4.0, 8.0, 12.0] {
            let m = mellin_identity_check(r, r, sigma)?;
            let normalized =
                (m.numeric.ln() + (1.0 - sigma) * r.ln() + std::f64::consts::PI * r).exp();
            sym.push(vec![fmt(sigma), fmt(r), fmt(m.numeric), fmt(normalized)]);
        }
    }
    sym.write(&env.out_dir, env.format)?;

    let stand_in = env.load_table(600)?;
    let calib = Calibration::new(&stand_in)?;
    let h = SmoothBump::new(0.5, 1.5)?;
    let gk = SmoothBump::new(0.02, 0.2)?;
    let kernel_value = kernel_shifted_sum(&stand_in, 5.0, 10.0, 1, &h, &gk, |_| 1.0)?;

    let results = BesselResults {
        mellin_max_rel_err: max_rel,
        asymptotic_max_constant: max_c,
        normalized_grid_max: max_norm,
        normalized_grid_min: min_norm,
        residue_error_r3: k_square_residue_error(&g, 3.0)?,
        residue_error_r10: k_square_residue_error(&g, 10.0)?,
        kernel_value,
    };
    let summary = env.summary("bessel", &stand_in, calib, BTreeMap::new(), results);
    write_summary(&env.out_dir, "bessel", &summary)?;
    Ok(())
}

// ----------------------------------------------------------- experiment

#[derive(Serialize)]
struct ExperimentResults {
    slopes: BTreeMap<String, f64>,
    strictly_decreasing: bool,
    ratio_band_max: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn experiment_theorem1(
    env: Env,
    ell_raw: &str,
    x_raw: &str,
    z_fixed: Option<f64>,
    c: f64,
    cutoff_exp: f64,
    level_exp: f64,
) -> Result<(), CliError> {
    let shifts = parse_shifts(ell_raw)?;
    let grid = parse_grid(x_raw)?;
    let max_x = *grid.last().unwrap();
    let pad = shifts.iter().map(|&l| l.max(0)).max().unwrap() as u64;
    let table = env.load_table(max_x.ceil() as u64 + pad)?;
    let calib = Calibration::new(&table)?;
    let factors = FactorTable::new(table.limit());

    let mut data = DataTable::new(
        "experiment",
        vec![
            "ell",
            "x",
            "z",
            "S",
            "S_over_x",
            "S_norm_1_7",
            "S_large_a",
            "S_large_a_shift",
            "S_star",
            "m_factor",
            "main_term_ratio",
            "sieve_c",
            "sieve_v1",
            "sieve_v2",
            "sieve_cvv",
        ],
    );
    let mut slopes = BTreeMap::new();
    let mut decreasing = true;
    let mut ratio_hi = f64::MIN;
    let mut ratio_lo = f64::MAX;

    for &shift in &shifts {
        let mut decay = DataTable::new(
            format!("decay_ell{shift}"),
            vec!["x", "S", "S_over_x", "S_norm_1_7"],
        );
        let rows = decay_table(&table, shift, &grid)?;
        for w in rows.windows(2) {
            if w[1].per_x >= w[0].per_x {
                decreasing = false;
            }
        }
        for row in &rows {
            decay.push(vec![
                fmt(row.x),
                fmt(row.sum),
                fmt(row.per_x),
                fmt(row.normalized),
            ]);
        }
        decay.write(&env.out_dir, env.format)?;

        // least-squares slope of log(S/x) against log log x
        let us: Vec<f64> = grid.iter().map(|&x| x.ln().ln()).collect();
        let vs: Vec<f64> = rows.iter().map(|r| r.per_x.ln()).collect();
        let n = us.len() as f64;
        let mu = us.iter().sum::<f64>() / n;
        let mv = vs.iter().sum::<f64>() / n;
        let denom: f64 = us.iter().map(|u| (u - mu) * (u - mu)).sum();
        let slope = if denom > 0.0 {
            us.iter()
                .zip(&vs)
                .map(|(u, v)| (u - mu) * (v - mv))
                .sum::<f64>()
                / denom
        } else {
            0.0
        };
        slopes.insert(format!("ell_{shift}"), slope);

        for (row, &x) in rows.iter().zip(&grid) {
            let z = z_fixed.unwrap_or_else(|| z_for(x, c));
            let p = partition_sums_with(&table, &factors, shift, x, z, cutoff_exp)?;
            let (m_factor, ratio) = if x >= 16.0 {
                let mf = main_term_factor(&table, x, c)?;
                let r = shifted_sum(&table, shift, x)? / (x * calib.l_hat * mf.m);
                ratio_hi = ratio_hi.max(r);
                ratio_lo = ratio_lo.min(r);
                (mf.m, r)
            } else {
                (f64::NAN, f64::NAN)
            };
            let ctx = make_context(z, 6 * shift.unsigned_abs());
            let level = x.powf(level_exp).max(1.0000001);
            let g1 = DensityFunction::main_density(&table, &ctx, 1);
            let g2 = DensityFunction::shifted_density(&table, &ctx, 1, 1);
            let bound = coupled_sieve_bound(&ctx, &g1, &g2, level, level)?;
            data.push(vec![
                shift.to_string(),
                fmt(row.x),
                fmt(z),
                fmt(row.sum),
                fmt(row.per_x),
                fmt(row.normalized),
                fmt(p.large_a),
                fmt(p.large_a_shift),
                fmt(p.star),
                fmt(m_factor),
                fmt(ratio),
                fmt(bound.c),
                fmt(bound.v1),
                fmt(bound.v2),
                fmt(bound.product),
            ]);
        }
    }
    data.write(&env.out_dir, env.format)?;

    let results = ExperimentResults {
        slopes,
        strictly_decreasing: decreasing,
        ratio_band_max: if ratio_lo > 0.0 { ratio_hi / ratio_lo } else { f64::NAN },
    };
    let mut inputs = BTreeMap::new();
    inputs.insert("ell".into(), ell_raw.to_string());
    inputs.insert("x".into(), x_raw.to_string());
    if let Some(z) = z_fixed {
        inputs.insert("z".into(), fmt(z));
    } else {
        inputs.insert("c".into(), fmt(c));
    }
    inputs.insert("cutoff_exp".into(), fmt(cutoff_exp));
    inputs.insert("level_exp".into(), fmt(level_exp));
    let summary = env.summary("experiment_theorem1", &table, calib, inputs, results);
    write_summary(&env.out_dir, "experiment", &summary)?;
    Ok(())
}
