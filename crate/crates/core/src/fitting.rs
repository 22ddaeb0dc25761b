//! Least-squares fits of complexity classes and empirical bound selection.
//!
//! Each candidate class `f` is fitted as `y ≈ a + b·f(n)` by ordinary least
//! squares (or `y ≈ b·f(n)` in through-origin mode). The class with the
//! highest R² is selected; classes within [`TIE_TOLERANCE`] of the best are
//! considered tied and the slowest-growing one wins.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::samplers::DistributionSpec;

pub const TIE_TOLERANCE: f64 = 1e-9;

/// Below this total sum of squares the data counts as constant.
pub const CONSTANT_SS_TOT: f64 = 1e-30;

/// Candidate growth classes, ordered slowest to fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComplexityClass {
    Constant,
    Log,
    Linear,
    NLogN,
    NPow1_5,
    NSquared,
}

impl ComplexityClass {
    pub const ALL: [Self; 6] = [
        Self::Constant,
        Self::Log,
        Self::Linear,
        Self::NLogN,
        Self::NPow1_5,
        Self::NSquared,
    ];

    /// The pair compared in the reference study.
    pub const REFERENCE_PAIR: [Self; 2] = [Self::NLogN, Self::NSquared];

    /// Model value at `n`, natural logarithm.
    pub fn evaluate(self, n: f64) -> f64 {
        self.evaluate_base(n, std::f64::consts::E)
    }

    /// Model value at `n` with logarithms taken in `base`.
    pub fn evaluate_base(self, n: f64, base: f64) -> f64 {
        match self {
            Self::Constant => 1.0,
            Self::Log => n.ln() / base.ln(),
            Self::Linear => n,
            Self::NLogN => n * n.ln() / base.ln(),
            Self::NPow1_5 => n * n.sqrt(),
            Self::NSquared => n * n,
        }
    }

    /// Identifier used on the command line and in file names.
    pub fn slug(self) -> &'static str {
        match self {
            Self::Constant => "const",
            Self::Log => "logn",
            Self::Linear => "n",
            Self::NLogN => "nlogn",
            Self::NPow1_5 => "n1.5",
            Self::NSquared => "n2",
        }
    }

    /// Conventional rendering inside `O(...)`.
    pub fn pretty(self) -> &'static str {
        match self {
            Self::Constant => "1",
            Self::Log => "log n",
            Self::Linear => "n",
            Self::NLogN => "n log n",
            Self::NPow1_5 => "n^1.5",
            Self::NSquared => "n^2",
        }
    }
}

impl fmt::Display for ComplexityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.pretty())
    }
}

impl FromStr for ComplexityClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '^' && *c != '*')
            .flat_map(char::to_lowercase)
            .collect();
        Ok(match key.as_str() {
            "const" | "constant" | "1" => Self::Constant,
            "logn" | "log" => Self::Log,
            "n" | "linear" => Self::Linear,
            "nlogn" => Self::NLogN,
            "n1.5" | "n15" | "n3/2" => Self::NPow1_5,
            "n2" | "n²" | "nsquared" => Self::NSquared,
            _ => return Err(Error::UnknownClass(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitMode {
    /// `y ≈ a + b·f(n)`.
    #[default]
    Intercept,
    /// `y ≈ b·f(n)`.
    Origin,
}

impl FromStr for FitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "intercept" => Ok(Self::Intercept),
            "origin" => Ok(Self::Origin),
            other => Err(Error::InvalidPlan(format!("unknown fit mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub mode: FitMode,
    pub log_base: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            mode: FitMode::Intercept,
            log_base: std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub class: ComplexityClass,
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl FitResult {
    pub fn ss_res(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }
}

fn check_inputs(ns: &[usize], ys: &[f64]) -> Result<()> {
    if ns.len() != ys.len() {
        return Err(Error::LengthMismatch {
            ns: ns.len(),
            ys: ys.len(),
        });
    }
    if ns.len() < 3 {
        return Err(Error::TooFewPoints(ns.len()));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::UnsortedSizes);
    }
    Ok(())
}

fn r_squared(ys: &[f64], residuals: &[f64]) -> f64 {
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    if ss_tot < CONSTANT_SS_TOT {
        return 1.0;
    }
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

pub fn fit(ns: &[usize], ys: &[f64], class: ComplexityClass) -> Result<FitResult> {
    fit_with(ns, ys, class, &FitOptions::default())
}

pub fn fit_with(
    ns: &[usize],
    ys: &[f64],
    class: ComplexityClass,
    opts: &FitOptions,
) -> Result<FitResult> {
    check_inputs(ns, ys)?;
    let xs: Vec<f64> = ns
        .iter()
        .map(|&n| class.evaluate_base(n as f64, opts.log_base))
        .collect();
    let count = xs.len() as f64;
    let degenerate = || Error::DegenerateDesign {
        class: class.pretty().to_string(),
    };

    let (intercept, slope) = match (opts.mode, class) {
        (FitMode::Intercept, ComplexityClass::Constant) => (ys.iter().sum::<f64>() / count, 0.0),
        (FitMode::Intercept, _) => {
            let x_mean = xs.iter().sum::<f64>() / count;
            let y_mean = ys.iter().sum::<f64>() / count;
            let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
            let sxy: f64 = xs
                .iter()
                .zip(ys)
                .map(|(x, y)| (x - x_mean) * (y - y_mean))
                .sum();
            let scale: f64 = xs.iter().map(|x| x * x).sum();
            if sxx.is_nan() || sxx <= f64::EPSILON * scale {
                return Err(degenerate());
            }
            let slope = sxy / sxx;
            (y_mean - slope * x_mean, slope)
        }
        (FitMode::Origin, _) => {
            let sxx: f64 = xs.iter().map(|x| x * x).sum();
            if sxx.is_nan() || sxx <= 0.0 {
                return Err(degenerate());
            }
            let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
            (0.0, sxy / sxx)
        }
    };

    let fitted: Vec<f64> = xs.iter().map(|x| intercept + slope * x).collect();
    let residuals: Vec<f64> = ys.iter().zip(&fitted).map(|(y, f)| y - f).collect();
    Ok(FitResult {
        class,
        intercept,
        slope,
        r_squared: r_squared(ys, &residuals),
        fitted,
        residuals,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalVerdict {
    pub selected: ComplexityClass,
    /// One fit per candidate, slowest class first.
    pub per_class: Vec<FitResult>,
    pub notation: String,
}

impl EmpiricalVerdict {
    pub fn fit_for(&self, class: ComplexityClass) -> Option<&FitResult> {
        self.per_class.iter().find(|f| f.class == class)
    }
}

pub fn notation(class: ComplexityClass) -> String {
    format!("y_avg(n) = O_emp({})", class.pretty())
}

pub fn select_bound(
    ns: &[usize],
    ys: &[f64],
    candidates: &[ComplexityClass],
) -> Result<EmpiricalVerdict> {
    select_bound_with(ns, ys, candidates, &FitOptions::default())
}

pub fn select_bound_with(
    ns: &[usize],
    ys: &[f64],
    candidates: &[ComplexityClass],
    opts: &FitOptions,
) -> Result<EmpiricalVerdict> {
    let mut classes = candidates.to_vec();
    classes.sort();
    classes.dedup();
    if classes.is_empty() {
        return Err(Error::NoCandidates);
    }
    let per_class = classes
        .iter()
        .map(|&c| fit_with(ns, ys, c, opts))
        .collect::<Result<Vec<_>>>()?;
    let best = per_class
        .iter()
        .map(|f| f.r_squared)
        .fold(f64::NEG_INFINITY, f64::max);
    // per_class is ordered slowest first
    let selected = per_class
        .iter()
        .find(|f| f.r_squared >= best - TIE_TOLERANCE)
        .map(|f| f.class)
        .expect("best is attained by some candidate");
    Ok(EmpiricalVerdict {
        selected,
        per_class,
        notation: notation(selected),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotPoint {
    pub n: usize,
    pub observed: f64,
    pub fitted: f64,
}

/// Observed against fitted values for one candidate class.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotPanel {
    pub class: ComplexityClass,
    pub points: Vec<PlotPoint>,
}

impl PlotPanel {
    pub fn ss_res(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.observed - p.fitted).powi(2))
            .sum()
    }
}

/// One panel per fitted candidate.
pub fn fit_report(verdict: &EmpiricalVerdict, ns: &[usize], ys: &[f64]) -> Vec<PlotPanel> {
    verdict
        .per_class
        .iter()
        .map(|fit| PlotPanel {
            class: fit.class,
            points: ns
                .iter()
                .zip(ys)
                .zip(&fit.fitted)
                .map(|((&n, &observed), &fitted)| PlotPoint {
                    n,
                    observed,
                    fitted,
                })
                .collect(),
        })
        .collect()
}

/// Writes `<dist>_<class>.csv` for every panel and returns the paths.
pub fn write_plot_bundle(
    dir: &Path,
    spec: &DistributionSpec,
    panels: &[PlotPanel],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    panels
        .iter()
        .map(|panel| {
            let path = dir.join(format!("{}_{}.csv", spec.slug(), panel.class.slug()));
            let mut out = String::from("n,observed,fitted\n");
            for p in &panel.points {
                out.push_str(&format!("{},{},{}\n", p.n, p.observed, p.fitted));
            }
            fs::write(&path, out)?;
            Ok(path)
        })
        .collect()
}

/// One line of `verdicts.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerdictRecord {
    pub distribution: String,
    pub selected: ComplexityClass,
    pub r2_nlogn: f64,
    pub r2_n2: f64,
}

pub const VERDICT_HEADER: [&str; 4] = ["distribution", "selected_class", "r2_nlogn", "r2_n2"];

impl VerdictRecord {
    /// Builds the record, fitting `n log n` and `n²` separately when they
    /// were not among the candidates.
    pub fn new(
        spec: &DistributionSpec,
        verdict: &EmpiricalVerdict,
        ns: &[usize],
        ys: &[f64],
        opts: &FitOptions,
    ) -> Result<Self> {
        let r2 = |class| -> Result<f64> {
            match verdict.fit_for(class) {
                Some(f) => Ok(f.r_squared),
                None => Ok(fit_with(ns, ys, class, opts)?.r_squared),
            }
        };
        Ok(Self {
            distribution: spec.to_string(),
            selected: verdict.selected,
            r2_nlogn: r2(ComplexityClass::NLogN)?,
            r2_n2: r2(ComplexityClass::NSquared)?,
        })
    }
}

pub fn write_verdicts<W: Write>(records: &[VerdictRecord], out: W) -> Result<()> {
    let to_err = |e: csv::Error| Error::Csv {
        line: e.position().map_or(0, |p| p.line()),
        reason: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(VERDICT_HEADER).map_err(to_err)?;
    for r in records {
        w.write_record([
            r.distribution.clone(),
            r.selected.slug().to_string(),
            r.r2_nlogn.to_string(),
            r.r2_n2.to_string(),
        ])
        .map_err(to_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_verdicts(text: &str) -> Result<Vec<VerdictRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Csv {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fail = |reason: String| Error::Csv { line, reason };
        let real = |i: usize| -> Result<f64> {
            record[i]
                .parse()
                .map_err(|_| fail(format!("bad R² `{}`", &record[i])))
        };
        if record.len() != VERDICT_HEADER.len() {
            return Err(fail(format!("expected {} fields", VERDICT_HEADER.len())));
        }
        out.push(VerdictRecord {
            distribution: record[0].to_string(),
            selected: record[1].parse().map_err(|e: Error| fail(e.to_string()))?,
            r2_nlogn: real(2)?,
            r2_n2: real(3)?,
        });
    }
    Ok(out)
}
