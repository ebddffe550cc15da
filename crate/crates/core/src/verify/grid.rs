//! Scaling-grid experiments and their CSV persistence.
//!
//! One [`ExperimentRecord`] per N: h = ⌊N^θ + 1/2⌋ and Q = ⌊N^λ + 1/2⌋ are
//! rounded to integers and the *effective* exponents are re-derived from
//! the rounded values — the CSV records truth, not intent. The schema is a
//! stable contract:
//!
//! ```text
//! N,h,Q,theta_eff,lambda_eff,preset,seed,J,I,rep_L2,rep_L1,
//! resid_L1,resid_L2,resid_THM,bound_main,ratio_J,ratio_I
//! ```
//!
//! In exact mode the rational-valued columns J, I, rep_L2, rep_L1 also get
//! `p/q` sidecar columns (suffix `_exact`), so a written file reads back
//! with zero loss; floats round-trip through the shortest-representation
//! formatting.

use std::io::{self, BufRead, Write};
use std::str::FromStr;

use crate::arith::{make_g, sieve_for_experiment, GFunction, Preset, ScaleParams, SieveTable};
use crate::correlations::CorrelationTable;
use crate::error::{Error, Result};
use crate::parallel;
use crate::scalar::{Rat, Scalar};
use crate::verify::{check_lemma1_with, check_lemma2_with, check_theorem_i_rep_with};

/// Arithmetic mode of a grid run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::InvalidParam(format!(
                "mode must be `exact` or `float`, got `{other}`"
            ))),
        }
    }
}

/// Configuration of one grid run.
#[derive(Clone, Debug)]
pub struct GridConfig {
    pub theta: f64,
    pub lambda: f64,
    pub preset: Preset,
    pub seed: Option<u64>,
    pub bound: Option<Rat>,
    /// Ascending list of N values, one record each.
    pub n_list: Vec<u64>,
    pub mode: Mode,
    /// Worker cap; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl GridConfig {
    /// Rejects θ ≥ 1, λ ≥ 1, any cell with h ≥ N/4, and malformed N lists.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.theta) {
            return Err(Error::InvalidConfig(format!(
                "theta = {} outside [0, 1)",
                self.theta
            )));
        }
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(Error::InvalidConfig(format!(
                "lambda = {} outside [0, 1)",
                self.lambda
            )));
        }
        if self.n_list.is_empty() {
            return Err(Error::InvalidConfig("empty N list".into()));
        }
        if !self.n_list.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("N list must be strictly ascending".into()));
        }
        for &n in &self.n_list {
            if n < 2 {
                return Err(Error::InvalidConfig("every N must be >= 2".into()));
            }
            let h = round_pow(n, self.theta);
            if 4 * h >= n {
                return Err(Error::InvalidConfig(format!(
                    "h = {h} >= N/4 at N = {n} (theta = {})",
                    self.theta
                )));
            }
        }
        if self.preset == Preset::RandomBounded && self.seed.is_none() {
            return Err(Error::InvalidConfig(
                "preset random_bounded requires a seed".into(),
            ));
        }
        Ok(())
    }
}

fn round_pow(n: u64, exponent: f64) -> u64 {
    (((n as f64).powf(exponent) + 0.5).floor() as u64).max(1)
}

/// Exact-mode values carried alongside the float columns.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactValues {
    pub j: Rat,
    pub i: Rat,
    pub rep_l2: Rat,
    pub rep_l1: Rat,
}

/// One grid cell: the integrals, their representations, residual ratios
/// and the Theorem's bound material.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub n: u64,
    pub h: u64,
    pub q: u64,
    pub theta_eff: f64,
    pub lambda_eff: f64,
    pub preset: Preset,
    pub seed: Option<u64>,
    pub j: f64,
    pub i: f64,
    pub rep_l2: f64,
    pub rep_l1: f64,
    /// Residual ratios |lhs − rhs| / normalizer of the three checks.
    pub resid_l1: f64,
    pub resid_l2: f64,
    pub resid_thm: f64,
    /// Nh + h³ + Q²h + Qh².
    pub bound_main: u128,
    /// J / (Nh²).
    pub ratio_j: f64,
    /// I / (Nh²).
    pub ratio_i: f64,
    pub exact: Option<ExactValues>,
}

/// Run every cell of the grid; records come back in N order regardless of
/// completion order.
pub fn run_grid(config: &GridConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let cfg = config.clone();
    parallel::with_workers(config.workers, move || {
        let results: Vec<Result<ExperimentRecord>> =
            parallel::ordered_map(&cfg.n_list, |&n| run_cell_dispatch(&cfg, n));
        results.into_iter().collect()
    })?
}

fn run_cell_dispatch(config: &GridConfig, n: u64) -> Result<ExperimentRecord> {
    let params = ScaleParams::new(
        n,
        round_pow(n, config.theta),
        round_pow(n, config.lambda),
    )?;
    let g = make_g(config.preset, params.q, config.seed, config.bound.clone())?;
    match config.mode {
        Mode::Exact => run_cell::<Rat>(config, &g, params),
        Mode::Float => run_cell::<f64>(config, &g, params),
    }
}

fn run_cell<T: Scalar>(
    config: &GridConfig,
    g: &GFunction,
    params: ScaleParams,
) -> Result<ExperimentRecord> {
    let (n, h, q) = (params.n, params.h, params.q);
    let f: SieveTable<T> = sieve_for_experiment(g, n, h)?;
    let corr = CorrelationTable::build(&f, n, 3 * h)?;

    let l1 = check_lemma1_with(&f, &corr, n, h)?; // lhs = I, rhs = rep_L1
    let l2 = check_lemma2_with(&f, &corr, n, h)?; // lhs = J, rhs = rep_L2
    let thm = check_theorem_i_rep_with(&f, &corr, n, h)?;
    let i = l1.lhs.clone();
    let j = l2.lhs.clone();
    let rep_l1 = l1.rhs_main.clone();
    let rep_l2 = l2.rhs_main.clone();

    let nh2 = n as f64 * (h as f64) * (h as f64);
    let bound_main = (n as u128) * (h as u128)
        + (h as u128).pow(3)
        + (q as u128) * (q as u128) * (h as u128)
        + (q as u128) * (h as u128) * (h as u128);

    let exact = if T::EXACT {
        Some(ExactValues {
            j: to_rat_exact(&j),
            i: to_rat_exact(&i),
            rep_l2: to_rat_exact(&rep_l2),
            rep_l1: to_rat_exact(&rep_l1),
        })
    } else {
        None
    };

    Ok(ExperimentRecord {
        n,
        h,
        q,
        theta_eff: params.theta,
        lambda_eff: params.lambda,
        preset: config.preset,
        seed: config.seed,
        j: j.to_f64(),
        i: i.to_f64(),
        rep_l2: rep_l2.to_f64(),
        rep_l1: rep_l1.to_f64(),
        resid_l1: l1.ratio,
        resid_l2: l2.ratio,
        resid_thm: thm.ratio,
        bound_main,
        ratio_j: j.to_f64() / nh2,
        ratio_i: i.to_f64() / nh2,
        exact,
    })
}

// Only called when T::EXACT; the Display form of a Rat parses back to Rat.
fn to_rat_exact<T: Scalar>(v: &T) -> Rat {
    Rat::from_str(&v.to_string()).expect("exact scalar displays as p/q")
}

/// The 17 mandatory CSV columns, in contract order.
pub const CSV_COLUMNS: [&str; 17] = [
    "N",
    "h",
    "Q",
    "theta_eff",
    "lambda_eff",
    "preset",
    "seed",
    "J",
    "I",
    "rep_L2",
    "rep_L1",
    "resid_L1",
    "resid_L2",
    "resid_THM",
    "bound_main",
    "ratio_J",
    "ratio_I",
];

/// Sidecar columns written in exact mode.
pub const CSV_EXACT_COLUMNS: [&str; 4] = ["J_exact", "I_exact", "rep_L2_exact", "rep_L1_exact"];

/// Write records as CSV (header mandatory, `.` decimal point, UTF-8).
pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: &mut W) -> io::Result<()> {
    let with_exact = records.iter().any(|r| r.exact.is_some());
    let mut header = CSV_COLUMNS.join(",");
    if with_exact {
        header.push(',');
        header.push_str(&CSV_EXACT_COLUMNS.join(","));
    }
    writeln!(out, "{header}")?;
    for r in records {
        let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.h,
            r.q,
            r.theta_eff,
            r.lambda_eff,
            r.preset,
            seed,
            r.j,
            r.i,
            r.rep_l2,
            r.rep_l1,
            r.resid_l1,
            r.resid_l2,
            r.resid_thm,
            r.bound_main,
            r.ratio_j,
            r.ratio_i
        )?;
        if with_exact {
            match &r.exact {
                Some(e) => write!(out, ",{},{},{},{}", e.j, e.i, e.rep_l2, e.rep_l1)?,
                None => write!(out, ",,,,")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Convenience: the CSV as a string.
pub fn csv_string(records: &[ExperimentRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv is utf-8")
}

fn parse_field<T: FromStr>(fields: &[&str], idx: usize, name: &str) -> Result<T> {
    let raw = fields
        .get(idx)
        .ok_or_else(|| Error::CsvParse(format!("missing column {name}")))?;
    raw.parse()
        .map_err(|_| Error::CsvParse(format!("bad value `{raw}` in column {name}")))
}

/// Read a CSV written by [`write_csv`] back into records, exact sidecars
/// included.
pub fn read_csv<R: BufRead>(reader: R) -> Result<Vec<ExperimentRecord>> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::CsvParse("empty file".into()))?
        .map_err(|e| Error::CsvParse(e.to_string()))?;
    let cols: Vec<&str> = header.trim_end().split(',').collect();
    if cols.len() < CSV_COLUMNS.len() || cols[..CSV_COLUMNS.len()] != CSV_COLUMNS {
        return Err(Error::CsvParse(format!(
            "unexpected header `{header}`; this file was not written by the grid runner"
        )));
    }
    let with_exact = cols.len() == CSV_COLUMNS.len() + CSV_EXACT_COLUMNS.len()
        && cols[CSV_COLUMNS.len()..] == CSV_EXACT_COLUMNS;
    if !with_exact && cols.len() != CSV_COLUMNS.len() {
        return Err(Error::CsvParse("unrecognized trailing columns".into()));
    }

    let mut records = Vec::new();
    for line in lines {
        let line = line.map_err(|e| Error::CsvParse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::CsvParse(format!(
                "row has {} fields, header has {}",
                fields.len(),
                cols.len()
            )));
        }
        let seed_raw = fields[6];
        let seed = if seed_raw.is_empty() {
            None
        } else {
            Some(
                seed_raw
                    .parse()
                    .map_err(|_| Error::CsvParse(format!("bad seed `{seed_raw}`")))?,
            )
        };
        let exact = if with_exact {
            let base = CSV_COLUMNS.len();
            Some(ExactValues {
                j: parse_field(&fields, base, "J_exact")?,
                i: parse_field(&fields, base + 1, "I_exact")?,
                rep_l2: parse_field(&fields, base + 2, "rep_L2_exact")?,
                rep_l1: parse_field(&fields, base + 3, "rep_L1_exact")?,
            })
        } else {
            None
        };
        records.push(ExperimentRecord {
            n: parse_field(&fields, 0, "N")?,
            h: parse_field(&fields, 1, "h")?,
            q: parse_field(&fields, 2, "Q")?,
            theta_eff: parse_field(&fields, 3, "theta_eff")?,
            lambda_eff: parse_field(&fields, 4, "lambda_eff")?,
            preset: parse_field(&fields, 5, "preset")?,
            seed,
            j: parse_field(&fields, 7, "J")?,
            i: parse_field(&fields, 8, "I")?,
            rep_l2: parse_field(&fields, 9, "rep_L2")?,
            rep_l1: parse_field(&fields, 10, "rep_L1")?,
            resid_l1: parse_field(&fields, 11, "resid_L1")?,
            resid_l2: parse_field(&fields, 12, "resid_L2")?,
            resid_thm: parse_field(&fields, 13, "resid_THM")?,
            bound_main: parse_field(&fields, 14, "bound_main")?,
            ratio_j: parse_field(&fields, 15, "ratio_J")?,
            ratio_i: parse_field(&fields, 16, "ratio_I")?,
            exact,
        });
    }
    Ok(records)
}

/// Count strict increases (inversions of the expected decay) in a ratio
/// column; the Corollary trend check tolerates at most one.
pub fn count_inversions(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] > w[0]).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(mode: Mode) -> GridConfig {
        GridConfig {
            theta: 0.4,
            lambda: 0.5,
            preset: Preset::Ones,
            seed: None,
            bound: None,
            n_list: vec![64, 128, 256],
            mode,
            workers: None,
        }
    }

    #[test]
    fn config_rejections() {
        let mut c = small_config(Mode::Exact);
        c.lambda = 1.2;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));

        let mut c = small_config(Mode::Exact);
        c.theta = 1.0;
        assert!(c.validate().is_err());

        let mut c = small_config(Mode::Exact);
        c.theta = 0.99; // h = round(64^0.99) = 61 >= 16 = N/4
        assert!(c.validate().is_err());

        let mut c = small_config(Mode::Exact);
        c.n_list = vec![128, 64];
        assert!(c.validate().is_err());

        let mut c = small_config(Mode::Exact);
        c.preset = Preset::RandomBounded;
        assert!(c.validate().is_err(), "seed required");
    }

    #[test]
    fn delta1_grid_ratio_j_is_zero() {
        let config = GridConfig {
            preset: Preset::Delta1,
            ..small_config(Mode::Exact)
        };
        let records = run_grid(&config).unwrap();
        assert_eq!(records.len(), 3);
        for r in &records {
            assert_eq!(r.ratio_j, 0.0);
            assert_eq!(r.ratio_i, 0.0);
            assert_eq!(r.resid_l1, 0.0);
        }
    }

    #[test]
    fn csv_roundtrip_exact_and_float() {
        for mode in [Mode::Exact, Mode::Float] {
            let mut config = small_config(mode);
            config.preset = Preset::RandomBounded;
            config.seed = Some(99);
            let records = run_grid(&config).unwrap();
            let text = csv_string(&records);
            let back = read_csv(text.as_bytes()).unwrap();
            assert_eq!(records, back, "{mode}");
            // and the re-serialization is byte-identical
            assert_eq!(text, csv_string(&back), "{mode}");
        }
    }

    #[test]
    fn exact_mode_has_sidecars() {
        let records = run_grid(&small_config(Mode::Exact)).unwrap();
        assert!(records.iter().all(|r| r.exact.is_some()));
        let text = csv_string(&records);
        assert!(text.lines().next().unwrap().ends_with("rep_L1_exact"));

        let records = run_grid(&small_config(Mode::Float)).unwrap();
        assert!(records.iter().all(|r| r.exact.is_none()));
        let text = csv_string(&records);
        assert!(text.lines().next().unwrap().ends_with("ratio_I"));
    }

    #[test]
    fn grid_deterministic_under_fixed_seed() {
        let mut config = small_config(Mode::Float);
        config.preset = Preset::RandomBounded;
        config.seed = Some(4);
        let a = run_grid(&config).unwrap();
        let b = run_grid(&config).unwrap();
        assert_eq!(csv_string(&a), csv_string(&b));
    }

    #[test]
    fn inversion_counter() {
        assert_eq!(count_inversions(&[3.0, 2.0, 1.0]), 0);
        assert_eq!(count_inversions(&[3.0, 3.5, 1.0]), 1);
        assert_eq!(count_inversions(&[1.0, 2.0, 3.0]), 2);
    }
}
