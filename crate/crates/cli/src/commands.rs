//! Subcommand arguments and handlers.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Subcommand};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sievelab::arith::{
    make_g, mean_value, sieve_f, sieve_for_experiment, GFunction, Preset, ScaleParams,
};
use sievelab::correlations::CorrelationTable;
use sievelab::integrals::{selberg_integral, symmetry_integral};
use sievelab::kernels::{
    cos_sum, cos_sum_direct, fejer_s, fejer_s_direct, fourier_w, fourier_w_direct,
    fourier_w_scaled, fourier_w_scaled_direct, s_value, sin_sum, sin_sum_direct,
    sum_w_over_multiples, w_value,
};
use sievelab::scalar::{Rat, Scalar};
use sievelab::verify::grid::{count_inversions, csv_string, read_csv};
use sievelab::verify::{
    check_lemma1, check_lemma2, check_theorem_i_rep, run_grid, GridConfig, Mode, ResidualReport,
};

use crate::config::ConfigFile;
use crate::plot::{csv_reference, png_name, render_plot_script};
use crate::CliError;

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Sieve f = g ∗ 1 over [lo, hi] and print the table
    Sieve(SieveArgs),
    /// Run the kernel identity self-checks (closed forms vs direct sums)
    #[command(name = "kernels-selfcheck")]
    KernelsSelfcheck(SelfcheckArgs),
    /// Compute the Selberg and symmetry integrals exactly
    Integrals(IntegralsArgs),
    /// Correlation table with its main-term/remainder decomposition
    Correlate(CorrelateArgs),
    /// Residual reports: integrals vs weighted correlation sums
    Verify(VerifyArgs),
    /// Run a scaling grid, write CSV and optionally a plot script
    Experiment(ExperimentArgs),
    /// Re-read an experiment CSV: summary, decay trend, round-trip check
    Report(ReportArgs),
}

fn parse_preset(s: &str) -> Result<Preset, CliError> {
    Preset::from_str(s).map_err(CliError::from)
}

fn parse_mode(s: Option<String>) -> Result<Mode, CliError> {
    match s {
        None => Ok(Mode::Exact),
        Some(s) => Mode::from_str(&s).map_err(CliError::from),
    }
}

fn parse_bound(s: Option<String>) -> Result<Option<Rat>, CliError> {
    match s {
        None => Ok(None),
        Some(raw) => Rat::from_str(&raw)
            .map(Some)
            .map_err(|e| CliError::Validation(format!("bad bound `{raw}`: {e}"))),
    }
}

fn build_g(
    preset: Preset,
    q: u64,
    seed: Option<u64>,
    bound: Option<Rat>,
) -> Result<GFunction, CliError> {
    make_g(preset, q, seed, bound).map_err(CliError::from)
}

#[derive(Args, Debug)]
pub struct SieveArgs {
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    lo: Option<u64>,
    #[arg(long)]
    hi: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bound: Option<String>,
}

pub fn run_sieve(args: SieveArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let preset = parse_preset(&cfg.require(args.preset, "preset")?)?;
    let q = cfg.require(args.q, "q")?;
    let lo = cfg.require(args.lo, "lo")?;
    let hi = cfg.require(args.hi, "hi")?;
    let seed = cfg.resolve(args.seed, "seed")?;
    let bound = parse_bound(cfg.resolve(args.bound, "bound")?)?;

    let g = build_g(preset, q, seed, bound)?;
    let table = sieve_f::<Rat>(&g, lo, hi)?;
    println!("# f = g*1 with preset {preset}, Q = {q}, range [{lo}, {hi}]");
    println!("n,f");
    for n in lo..=hi {
        println!("{n},{}", table.value(n));
    }
    println!("# sup_norm = {}", table.sup_norm());
    Ok(())
}

#[derive(Args, Debug)]
pub struct SelfcheckArgs {
    /// Largest kernel half-width to test
    #[arg(long, default_value_t = 50)]
    h_max: u64,
    /// Largest modulus for the multiple-sum identity
    #[arg(long, default_value_t = 50)]
    q_max: u64,
    /// Random frequencies per h
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Relative tolerance for closed form vs direct sum
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

pub fn run_selfcheck(args: SelfcheckArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let SelfcheckArgs {
        h_max,
        q_max,
        samples,
        seed,
        tol,
    } = args;
    let mut failures = 0u64;

    for h in 1..=h_max {
        for q in 1..=q_max {
            let mut direct = w_value(h, 0);
            let mut a = q as i64;
            while a <= 2 * h as i64 {
                direct += 2 * w_value(h, a);
                a += q as i64;
            }
            if sum_w_over_multiples(h, q) != direct {
                failures += 1;
            }
        }
    }
    println!("multiples identity 2q||h/q||: h <= {h_max}, q <= {q_max}: {}",
        if failures == 0 { "ok" } else { "FAILED" });

    for h in 1..=h_max.max(100) {
        let (mut ws, mut ss) = (0i64, 0i64);
        for a in -(2 * h as i64)..=2 * h as i64 {
            ws += w_value(h, a);
            ss += s_value(h, a);
        }
        if ws != 0 || ss != (4 * h * h) as i64 {
            failures += 1;
        }
    }
    println!("mass identities sum W = 0, sum S = 4h^2: {}",
        if failures == 0 { "ok" } else { "FAILED" });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = ["fourier_W", "fourier_W_scaled", "fejer_S", "cos_sum", "sin_sum"];
    let mut worst = [0.0f64; 5];
    for h in 1..=h_max {
        for _ in 0..samples {
            let beta: f64 = rng.random();
            let ell = rng.random_range(1..=2 * h);
            let q = rng.random_range(1..=q_max);
            let j = rng.random_range(-(2 * q as i64)..=2 * q as i64);
            let x = rng.random_range(1..=2 * h + 50);
            let pairs = [
                (fourier_w(h, beta), fourier_w_direct(h, beta)),
                (fourier_w_scaled(h, ell, beta), fourier_w_scaled_direct(h, ell, beta)),
                (fejer_s(h, j, q), fejer_s_direct(h, j, q)),
                (cos_sum(x, beta), cos_sum_direct(x, beta)),
                (sin_sum(x, beta), sin_sum_direct(x, beta)),
            ];
            for (i, (closed, direct)) in pairs.iter().enumerate() {
                let dev = (closed - direct).abs() / (1.0 + direct.abs());
                worst[i] = worst[i].max(dev);
                if dev > tol {
                    failures += 1;
                }
            }
        }
    }
    for (name, dev) in names.iter().zip(worst) {
        println!(
            "{name}: {samples} samples/h, worst relative deviation {dev:.3e}: {}",
            if dev <= tol { "ok" } else { "FAILED" }
        );
    }
    println!(
        "kernels selfcheck: {} ({} failures, {:.2}s)",
        if failures == 0 { "all ok" } else { "FAILED" },
        failures,
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        return Err(CliError::Internal(anyhow::anyhow!(
            "{failures} kernel identity checks failed"
        )));
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct IntegralsArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    h: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bound: Option<String>,
    /// exact (default) or float
    #[arg(long)]
    mode: Option<String>,
    /// Override the window mean M (rational p/q); defaults to M_f(2h)
    #[arg(long)]
    mean: Option<String>,
}

pub fn run_integrals(args: IntegralsArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let n = cfg.require(args.n, "n")?;
    let h = cfg.require(args.h, "h")?;
    let q = cfg.resolve(args.q, "q")?.unwrap_or(1);
    let preset = parse_preset(&cfg.require(args.preset, "preset")?)?;
    let seed = cfg.resolve(args.seed, "seed")?;
    let bound = parse_bound(cfg.resolve(args.bound, "bound")?)?;
    let mode = parse_mode(cfg.resolve(args.mode, "mode")?)?;
    let mean_override = match cfg.resolve(args.mean, "mean")? {
        None => None,
        Some(raw) => Some(
            Rat::from_str(&raw)
                .map_err(|e| CliError::Validation(format!("bad mean `{raw}`: {e}")))?,
        ),
    };

    ScaleParams::new(n, h, q)?;
    if q > n {
        println!("# note: Q = {q} > N = {n}: outside the window-mean heuristic's regime; computed anyway");
    }
    let g = build_g(preset, q, seed, bound)?;
    let mean = match mean_override {
        Some(m) => m,
        None => mean_value(&g, h)?,
    };

    println!("# preset {preset}, N = {n}, h = {h}, Q = {q}, mode {mode}");
    match mode {
        Mode::Exact => {
            let f = sieve_for_experiment::<Rat>(&g, n, h)?;
            let j = selberg_integral(&f, n, h, mean.clone())?;
            let i = symmetry_integral(&f, n, h)?;
            println!("M = {mean} (~{})", Scalar::to_f64(&mean));
            println!("J = {} (~{})", j.value, Scalar::to_f64(&j.value));
            println!("I = {} (~{})", i.value, Scalar::to_f64(&i.value));
        }
        Mode::Float => {
            let f = sieve_for_experiment::<f64>(&g, n, h)?;
            let m = Scalar::to_f64(&mean);
            let j = selberg_integral(&f, n, h, m)?;
            let i = symmetry_integral(&f, n, h)?;
            println!("M = {m}");
            println!("J = {}", j.value);
            println!("I = {}", i.value);
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct CorrelateArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    preset: Option<String>,
    /// Largest lag |a|; defaults to 3h when --h is given
    #[arg(long)]
    a_max: Option<u64>,
    #[arg(long)]
    h: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bound: Option<String>,
}

pub fn run_correlate(args: CorrelateArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let n = cfg.require(args.n, "n")?;
    let q = cfg.require(args.q, "q")?;
    let preset = parse_preset(&cfg.require(args.preset, "preset")?)?;
    let h = cfg.resolve(args.h, "h")?;
    let a_max = match cfg.resolve(args.a_max, "a_max")? {
        Some(a) => a,
        None => match h {
            Some(h) => 3 * h,
            None => {
                return Err(CliError::Usage(
                    "missing required key `a_max` (or give --h to default to 3h)".into(),
                ))
            }
        },
    };
    let seed = cfg.resolve(args.seed, "seed")?;
    let bound = parse_bound(cfg.resolve(args.bound, "bound")?)?;

    let g = build_g(preset, q, seed, bound)?;
    let f = sieve_f::<Rat>(&g, 1, 2 * n + a_max)?;
    let table = CorrelationTable::build_with_decomposition(&f, n, a_max)?;
    println!("# correlations of preset {preset}, Q = {q}, over ({n}, {}], lags |a| <= {a_max}", 2 * n);
    println!("a,direct,main,remainder");
    for a in -(a_max as i64)..=a_max as i64 {
        if a == 0 {
            println!("0,{},,", table.direct(0)?);
        } else {
            println!(
                "{a},{},{},{}",
                table.direct(a)?,
                table.main_term(a)?,
                table.remainder(a)?
            );
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Which identity: lemma1, lemma2, theorem or all
    target: String,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    h: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bound: Option<String>,
}

fn print_report(r: &ResidualReport<Rat>) {
    println!("{}:", r.lemma);
    println!("  lhs        = {} (~{})", r.lhs, Scalar::to_f64(&r.lhs));
    println!("  rhs_main   = {} (~{})", r.rhs_main, Scalar::to_f64(&r.rhs_main));
    println!("  residual   = {} (~{})", r.residual, Scalar::to_f64(&r.residual));
    println!("  normalizer = {} (~{})", r.normalizer, Scalar::to_f64(&r.normalizer));
    println!("  ratio      = {}", r.ratio);
}

pub fn run_verify(args: VerifyArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let n = cfg.require(args.n, "n")?;
    let h = cfg.require(args.h, "h")?;
    let q = cfg.resolve(args.q, "q")?.unwrap_or(1);
    let preset = parse_preset(&cfg.require(args.preset, "preset")?)?;
    let seed = cfg.resolve(args.seed, "seed")?;
    let bound = parse_bound(cfg.resolve(args.bound, "bound")?)?;

    ScaleParams::new(n, h, q)?;
    let g = build_g(preset, q, seed, bound)?;
    let f = sieve_for_experiment::<Rat>(&g, n, h)?;
    println!("# preset {preset}, N = {n}, h = {h}, Q = {q}");
    match args.target.as_str() {
        "lemma1" => print_report(&check_lemma1(&f, n, h)?),
        "lemma2" => print_report(&check_lemma2(&f, n, h)?),
        "theorem" => print_report(&check_theorem_i_rep(&f, n, h)?),
        "all" => {
            print_report(&check_lemma1(&f, n, h)?);
            print_report(&check_lemma2(&f, n, h)?);
            print_report(&check_theorem_i_rep(&f, n, h)?);
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown verify target `{other}` (expected lemma1, lemma2, theorem or all)"
            )))
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    preset: Option<String>,
    /// Comma-separated ascending N values, e.g. 16384,32768,65536
    #[arg(long)]
    n_list: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bound: Option<String>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script here
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn parse_n_list(raw: &str) -> Result<Vec<u64>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Validation(format!("bad N value `{s}` in n_list")))
        })
        .collect()
}

pub fn run_experiment(args: ExperimentArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let theta = cfg.require(args.theta, "theta")?;
    let lambda = cfg.require(args.lambda, "lambda")?;
    let preset = parse_preset(&cfg.require(args.preset, "preset")?)?;
    let n_list = parse_n_list(&cfg.require(args.n_list, "n_list")?)?;
    let mode = parse_mode(cfg.resolve(args.mode, "mode")?)?;
    let seed = cfg.resolve(args.seed, "seed")?;
    let bound = parse_bound(cfg.resolve(args.bound, "bound")?)?;
    let out: PathBuf = cfg.require(args.out, "out")?;
    let plot: Option<PathBuf> = cfg.resolve(args.plot, "plot")?;

    let workers = read_worker_cap()?;
    let config = GridConfig {
        theta,
        lambda,
        preset,
        seed,
        bound,
        n_list,
        mode,
        workers,
    };
    let records = run_grid(&config)?;
    let csv = csv_string(&records);
    fs::write(&out, &csv).map_err(|e| {
        CliError::Internal(anyhow::anyhow!("cannot write {}: {e}", out.display()))
    })?;
    println!("wrote {} records to {}", records.len(), out.display());

    if let Some(plot_path) = plot {
        let script = render_plot_script(
            &records,
            &csv_reference(&out, &plot_path),
            &png_name(&plot_path),
        )?;
        let mut fh = fs::File::create(&plot_path).map_err(|e| {
            CliError::Internal(anyhow::anyhow!("cannot write {}: {e}", plot_path.display()))
        })?;
        fh.write_all(script.as_bytes())
            .map_err(|e| CliError::Internal(e.into()))?;
        println!("wrote plot script to {}", plot_path.display());
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// CSV file written by `experiment`
    #[arg(long)]
    csv: Option<PathBuf>,
}

pub fn run_report(args: ReportArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let path: PathBuf = cfg
        .resolve(args.csv, "out")?
        .ok_or_else(|| CliError::Usage("missing required key `out` (flag --csv)".into()))?;
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let records = read_csv(text.as_bytes())?;
    if records.is_empty() {
        return Err(CliError::Validation("CSV contains no records".into()));
    }

    let roundtrip = csv_string(&records) == text;
    println!(
        "{}: {} records, preset {}, N from {} to {}",
        path.display(),
        records.len(),
        records[0].preset,
        records[0].n,
        records[records.len() - 1].n
    );
    println!(
        "round-trip: {}",
        if roundtrip {
            "byte-identical (zero loss)"
        } else {
            "re-serialization differs (file not written by this tool?)"
        }
    );
    println!("N,h,Q,ratio_J,ratio_I,resid_L1,resid_L2,resid_THM");
    for r in &records {
        println!(
            "{},{},{},{},{},{},{},{}",
            r.n, r.h, r.q, r.ratio_j, r.ratio_i, r.resid_l1, r.resid_l2, r.resid_thm
        );
    }
    let ratio_j: Vec<f64> = records.iter().map(|r| r.ratio_j).collect();
    let ratio_i: Vec<f64> = records.iter().map(|r| r.ratio_i).collect();
    println!(
        "decay trend: ratio_J {} inversions, ratio_I {} inversions over {} steps",
        count_inversions(&ratio_j),
        count_inversions(&ratio_i),
        records.len().saturating_sub(1)
    );
    if records.iter().any(|r| r.exact.is_some()) {
        println!("exact sidecar columns present");
    }
    Ok(())
}

/// SIEVELAB_THREADS caps the worker count; unset means the default pool.
pub fn read_worker_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("SIEVELAB_THREADS") {
        Err(_) => Ok(None),
        Ok(raw) => {
            let n: usize = raw.parse().map_err(|_| {
                CliError::Validation(format!("SIEVELAB_THREADS must be a positive integer, got `{raw}`"))
            })?;
            if n == 0 {
                return Err(CliError::Validation(
                    "SIEVELAB_THREADS must be a positive integer".into(),
                ));
            }
            Ok(Some(n))
        }
    }
}
