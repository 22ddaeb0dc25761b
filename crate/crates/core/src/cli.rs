//! `empo` command line: run experiments, refit the reference table, or fit
//! a user-supplied measurement CSV.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration or input error.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiment::{
    load_fixture_table1, run_experiment, verify_fixture, write_csv, write_wide_csv, ExperimentPlan,
    MeasurementTable, Metric, Statistic,
};
use crate::fitting::{
    fit_report, select_bound_with, write_plot_bundle, write_verdicts, ComplexityClass,
    EmpiricalVerdict, FitMode, FitOptions, VerdictRecord,
};
use crate::samplers::DistributionSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "empo",
    version,
    about = "Empirical complexity bounds for quicksort"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate inputs, sort them, tabulate and fit.
    Run(RunArgs),
    /// Refit the embedded reference timing table.
    RefitFixture(FitArgs),
    /// Fit a measurement CSV produced by `run` (or written by hand).
    Fit {
        /// Long-form measurement CSV (`metric,n,distribution,mean,sd,trials`).
        csv: PathBuf,
        #[command(flatten)]
        fit: FitArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Candidate classes, comma separated: const, logn, n, nlogn, n1.5, n2.
    #[arg(long, value_delimiter = ',', default_values_t = ComplexityClass::REFERENCE_PAIR.map(Slug))]
    pub classes: Vec<Slug>,

    /// Regression form: `intercept` (y = a + b f(n)) or `origin` (y = b f(n)).
    #[arg(long, default_value = "intercept")]
    pub fit_mode: FitMode,

    #[arg(long, default_value = "empo-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Distribution spec, e.g. `poisson:lambda=1`. Repeatable; defaults to
    /// the six reference columns.
    #[arg(long = "dist")]
    pub dists: Vec<DistributionSpec>,

    #[arg(long, default_value_t = 5000)]
    pub n_min: usize,

    #[arg(long, default_value_t = 50000)]
    pub n_max: usize,

    #[arg(long, default_value_t = 5000)]
    pub n_step: usize,

    #[arg(long, default_value_t = 10)]
    pub trials: usize,

    #[arg(long, default_value_t = ExperimentPlan::DEFAULT_SEED)]
    pub seed: u64,

    /// `time` (seconds) or `comparisons` (key comparisons).
    #[arg(long, default_value = "time")]
    pub metric: Metric,

    /// Discarded runs per cell; defaults to 1 for time, 0 for comparisons.
    #[arg(long)]
    pub warmup: Option<usize>,

    #[command(flatten)]
    pub fit: FitArgs,
}

/// Clap wrapper so class lists print back as slugs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slug(pub ComplexityClass);

impl std::fmt::Display for Slug {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.0.slug())
    }
}

impl std::str::FromStr for Slug {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(Slug)
    }
}

impl FitArgs {
    pub fn classes(&self) -> Vec<ComplexityClass> {
        self.classes.iter().map(|s| s.0).collect()
    }

    pub fn options(&self) -> FitOptions {
        FitOptions {
            mode: self.fit_mode,
            ..FitOptions::default()
        }
    }
}

impl RunArgs {
    pub fn plan(&self) -> Result<ExperimentPlan> {
        if self.n_step == 0 {
            return Err(Error::InvalidPlan("--n-step must be positive".into()));
        }
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::InvalidPlan(format!(
                "need 1 <= --n-min <= --n-max, got {}..{}",
                self.n_min, self.n_max
            )));
        }
        let n_grid: Vec<usize> = (self.n_min..=self.n_max).step_by(self.n_step).collect();
        if n_grid.len() < 3 {
            return Err(Error::InvalidPlan(format!(
                "the size grid has {} points; fitting needs at least 3",
                n_grid.len()
            )));
        }
        let distributions = if self.dists.is_empty() {
            DistributionSpec::table_columns().to_vec()
        } else {
            self.dists.clone()
        };
        let plan = ExperimentPlan {
            n_grid,
            trials: self.trials,
            seed: self.seed,
            metric: self.metric,
            distributions,
            warmup: self.warmup,
        };
        plan.validate()?;
        Ok(plan)
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_)
        | Error::SpecParse { .. }
        | Error::InvalidPlan(_)
        | Error::TooFewPoints(_)
        | Error::LengthMismatch { .. }
        | Error::UnsortedSizes
        | Error::NoCandidates
        | Error::UnknownClass(_)
        | Error::Csv { .. } => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn report(err: &Error) -> i32 {
    eprintln!("error: {err}");
    exit_code(err)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Fits every distribution in `table`, writes `verdicts.csv` and the plot
/// panels into `out_dir`, and prints one verdict line per distribution.
pub fn fit_and_write(
    table: &MeasurementTable,
    fit: &FitArgs,
    out_dir: &Path,
) -> Result<Vec<(DistributionSpec, EmpiricalVerdict)>> {
    fs::create_dir_all(out_dir)?;
    let classes = fit.classes();
    let opts = fit.options();
    let mut records = Vec::new();
    let mut verdicts = Vec::new();
    for spec in table.specs() {
        let (ns, ys) = table.series(&spec);
        if ns.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPlan(format!("duplicate sizes for {spec}")));
        }
        let verdict = select_bound_with(&ns, &ys, &classes, &opts)?;
        write_plot_bundle(out_dir, &spec, &fit_report(&verdict, &ns, &ys))?;
        let record = VerdictRecord::new(&spec, &verdict, &ns, &ys, &opts)?;
        println!(
            "{:<24} {:<28} R2(n log n) = {:.6}  R2(n^2) = {:.6}",
            spec.to_string(),
            verdict.notation,
            record.r2_nlogn,
            record.r2_n2
        );
        records.push(record);
        verdicts.push((spec, verdict));
    }
    write_verdicts(&records, create(&out_dir.join("verdicts.csv"))?)?;
    Ok(verdicts)
}

fn print_table(table: &MeasurementTable) {
    let specs = table.specs();
    let unit = match table.metric {
        Metric::Time => "mean seconds",
        Metric::Comparisons => "mean comparisons",
    };
    println!("{unit} per cell");
    print!("{:>8}", "n");
    for spec in &specs {
        print!(" {:>14}", spec.family());
    }
    println!();
    for n in table.sizes() {
        print!("{n:>8}");
        for spec in &specs {
            match (table.row(n, spec), table.metric) {
                (Some(r), Metric::Time) => print!(" {:>14.4}", r.mean),
                (Some(r), Metric::Comparisons) => print!(" {:>14.1}", r.mean),
                (None, _) => print!(" {:>14}", "-"),
            }
        }
        println!();
    }
}

fn run_inner(args: &RunArgs) -> Result<()> {
    let plan = args.plan()?;
    let table = run_experiment(&plan)?;
    let dir = &args.fit.out_dir;
    fs::create_dir_all(dir)?;
    write_csv(&table, create(&dir.join("means.csv"))?)?;
    write_wide_csv(
        &table,
        Statistic::Mean,
        create(&dir.join("means_wide.csv"))?,
    )?;
    write_wide_csv(&table, Statistic::Sd, create(&dir.join("sds.csv"))?)?;
    print_table(&table);
    fit_and_write(&table, &args.fit, dir)?;
    Ok(())
}

pub fn cmd_run(args: &RunArgs) -> i32 {
    match run_inner(args) {
        Ok(()) => EXIT_OK,
        Err(e) => report(&e),
    }
}

pub fn cmd_refit_fixture(fit: &FitArgs) -> i32 {
    if let Err(e) = verify_fixture() {
        eprintln!("error: {e}");
        return EXIT_RUNTIME;
    }
    let table = load_fixture_table1();
    match fit_and_write(&table, fit, &fit.out_dir) {
        Ok(_) => EXIT_OK,
        Err(e) => report(&e),
    }
}

pub fn cmd_fit(csv_path: &Path, fit: &FitArgs) -> i32 {
    let text = match fs::read_to_string(csv_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", csv_path.display());
            return EXIT_CONFIG;
        }
    };
    let result = crate::experiment::read_csv(&text)
        .and_then(|table| fit_and_write(&table, fit, &fit.out_dir));
    match result {
        Ok(_) => EXIT_OK,
        Err(e) => report(&e),
    }
}

/// Parses `args` (including the program name) and dispatches.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::RefitFixture(fit) => cmd_refit_fixture(fit),
        Command::Fit { csv, fit } => cmd_fit(csv, fit),
    }
}
