//! Designed sorting experiments: sweep `n`, repeat trials, aggregate.
//!
//! A cell is one `(n, distribution)` pair. Every trial of a cell draws a
//! fresh sample from its own derived seed, sorts it once and records either
//! the elapsed seconds or the comparison count. Cells are independent of
//! each other and of evaluation order.
//!
//! With the `parallel` feature, comparison-count trials are spread over the
//! rayon pool. Timed trials always run one at a time on the calling thread.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};
use crate::quicksort::{sort_counted, timed_sort, Clock, MonotonicClock};
use crate::rng::{mix64, Rng};
use crate::samplers::{DistributionSpec, Keys};

pub const CSV_HEADER: [&str; 6] = ["metric", "n", "distribution", "mean", "sd", "trials"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Wall-clock seconds of the sort call.
    Time,
    /// Key comparisons performed by the sort.
    Comparisons,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Time => "time",
            Self::Comparisons => "comparisons",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "time" => Ok(Self::Time),
            "comparisons" => Ok(Self::Comparisons),
            other => Err(Error::InvalidPlan(format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub metric: Metric,
    pub distributions: Vec<DistributionSpec>,
    /// Discarded runs per cell before measuring. `None` picks the metric's
    /// default: one for time, none for comparisons.
    pub warmup: Option<usize>,
}

impl ExperimentPlan {
    pub const DEFAULT_SEED: u64 = 20_090_101;

    /// n = 5000, 10000, ..., 50000; ten trials; the six table columns.
    pub fn reference(metric: Metric) -> Self {
        Self {
            n_grid: (1..=10).map(|i| i * 5000).collect(),
            trials: 10,
            seed: Self::DEFAULT_SEED,
            metric,
            distributions: DistributionSpec::table_columns().to_vec(),
            warmup: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::InvalidPlan("n grid is empty".into()));
        }
        if self.n_grid[0] < 1 {
            return Err(Error::InvalidPlan("sizes must be at least 1".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPlan(
                "n grid must be strictly ascending".into(),
            ));
        }
        if self.trials < 1 {
            return Err(Error::InvalidPlan("trials must be at least 1".into()));
        }
        if self.distributions.is_empty() {
            return Err(Error::InvalidPlan("no distributions given".into()));
        }
        self.distributions.iter().try_for_each(|d| d.validate())
    }

    pub fn warmup_runs(&self) -> usize {
        self.warmup.unwrap_or(match self.metric {
            Metric::Time => 1,
            Metric::Comparisons => 0,
        })
    }

    /// Cells in output order: grid-major, distributions in plan order.
    pub fn cells(&self) -> Vec<(usize, DistributionSpec)> {
        self.n_grid
            .iter()
            .flat_map(|&n| self.distributions.iter().map(move |&spec| (n, spec)))
            .collect()
    }
}

/// Seed for trial `t` of cell `(n, spec)`.
///
/// Each component passes through the SplitMix64 bijection before being
/// folded in, so neighbouring `(n, t)` pairs land on unrelated streams.
pub fn trial_seed(seed: u64, spec: &DistributionSpec, n: usize, t: u64) -> u64 {
    let mut h = mix64(seed);
    h = mix64(h ^ spec.stable_hash());
    h = mix64(h ^ n as u64);
    mix64(h ^ t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub spec: DistributionSpec,
    pub mean: f64,
    pub sd: f64,
    pub trials: usize,
    /// Raw per-trial values; empty when loaded from CSV or a fixture.
    pub trial_values: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub clock_resolution: Option<f64>,
    pub timestamp: Option<u64>,
    pub host: Option<String>,
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementTable {
    pub metric: Metric,
    pub rows: Vec<Row>,
    pub metadata: Metadata,
}

impl MeasurementTable {
    /// Distinct specs in first-appearance order.
    pub fn specs(&self) -> Vec<DistributionSpec> {
        let mut out: Vec<DistributionSpec> = Vec::new();
        for row in &self.rows {
            if !out.contains(&row.spec) {
                out.push(row.spec);
            }
        }
        out
    }

    /// `(n, mean)` points for one spec, sorted by `n`.
    pub fn series(&self, spec: &DistributionSpec) -> (Vec<usize>, Vec<f64>) {
        let mut points: Vec<(usize, f64)> = self
            .rows
            .iter()
            .filter(|r| r.spec == *spec)
            .map(|r| (r.n, r.mean))
            .collect();
        points.sort_by_key(|p| p.0);
        points.into_iter().unzip()
    }

    pub fn row(&self, n: usize, spec: &DistributionSpec) -> Option<&Row> {
        self.rows.iter().find(|r| r.n == n && r.spec == *spec)
    }

    /// Sizes in first-appearance order.
    pub fn sizes(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for row in &self.rows {
            if !out.contains(&row.n) {
                out.push(row.n);
            }
        }
        out
    }
}

/// Arithmetic mean and sample standard deviation (divisor `len - 1`).
pub fn aggregate(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyAggregate);
    }
    // a rounded sum could put the mean of equal values off the value itself
    if values.iter().all(|&v| v == values[0]) {
        return Ok((values[0], 0.0));
    }
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    Ok((mean, (ss / (count - 1.0)).sqrt()))
}

fn counted_trial(spec: &DistributionSpec, n: usize, seed: u64) -> Result<f64> {
    let sample = spec.sample(n, &mut Rng::new(seed))?;
    let run = match sample.keys {
        Keys::Integer(mut keys) => sort_counted(&mut keys),
        Keys::Real(mut keys) => sort_counted(&mut keys),
    };
    Ok(run.comparisons as f64)
}

fn timed_trial<C: Clock + ?Sized>(
    spec: &DistributionSpec,
    n: usize,
    seed: u64,
    clock: &C,
) -> Result<f64> {
    let sample = spec.sample(n, &mut Rng::new(seed))?;
    let run = match sample.keys {
        Keys::Integer(keys) => timed_sort(keys, clock).run,
        Keys::Real(keys) => timed_sort(keys, clock).run,
    };
    Ok(run.elapsed)
}

fn host_descriptor() -> String {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!(
        "{}-{} ({threads} hw threads)",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

fn assemble(
    plan: &ExperimentPlan,
    cells: &[(usize, DistributionSpec)],
    values: Vec<f64>,
    metadata: Metadata,
) -> Result<MeasurementTable> {
    let rows = cells
        .iter()
        .zip(values.chunks(plan.trials))
        .map(|(&(n, spec), vals)| {
            let (mean, sd) = aggregate(vals)?;
            Ok(Row {
                n,
                spec,
                mean,
                sd,
                trials: vals.len(),
                trial_values: vals.to_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurementTable {
        metric: plan.metric,
        rows,
        metadata,
    })
}

fn comparison_jobs(plan: &ExperimentPlan) -> Vec<(usize, DistributionSpec, u64)> {
    plan.cells()
        .into_iter()
        .flat_map(|(n, spec)| {
            (0..plan.trials as u64).map(move |t| (n, spec, trial_seed(plan.seed, &spec, n, t)))
        })
        .collect()
}

fn run_timed(plan: &ExperimentPlan, clock: &MonotonicClock) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(plan.cells().len() * plan.trials);
    for (n, spec) in plan.cells() {
        for w in 0..plan.warmup_runs() as u64 {
            timed_trial(
                &spec,
                n,
                trial_seed(plan.seed, &spec, n, u64::MAX - w),
                clock,
            )?;
        }
        for t in 0..plan.trials as u64 {
            values.push(timed_trial(
                &spec,
                n,
                trial_seed(plan.seed, &spec, n, t),
                clock,
            )?);
        }
    }
    Ok(values)
}

fn metadata_for(plan: &ExperimentPlan, clock: Option<&MonotonicClock>) -> Metadata {
    match clock {
        // counts carry no host or time stamp so repeated runs are byte-identical
        None => Metadata {
            seed: Some(plan.seed),
            ..Metadata::default()
        },
        Some(clock) => Metadata {
            seed: Some(plan.seed),
            clock_resolution: Some(clock.resolution()),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .ok()
                .map(|d| d.as_secs()),
            host: Some(host_descriptor()),
            source: None,
        },
    }
}

fn run_with(plan: &ExperimentPlan, parallel: bool) -> Result<MeasurementTable> {
    plan.validate()?;
    let cells = plan.cells();
    match plan.metric {
        Metric::Comparisons => {
            let jobs = comparison_jobs(plan);
            let values = if parallel {
                counted_jobs_parallel(&jobs)?
            } else {
                jobs.iter()
                    .map(|(n, spec, seed)| counted_trial(spec, *n, *seed))
                    .collect::<Result<Vec<_>>>()?
            };
            assemble(plan, &cells, values, metadata_for(plan, None))
        }
        Metric::Time => {
            let clock = MonotonicClock::new();
            let values = run_timed(plan, &clock)?;
            assemble(plan, &cells, values, metadata_for(plan, Some(&clock)))
        }
    }
}

#[cfg(feature = "parallel")]
fn counted_jobs_parallel(jobs: &[(usize, DistributionSpec, u64)]) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    jobs.par_iter()
        .map(|(n, spec, seed)| counted_trial(spec, *n, *seed))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn counted_jobs_parallel(jobs: &[(usize, DistributionSpec, u64)]) -> Result<Vec<f64>> {
    jobs.iter()
        .map(|(n, spec, seed)| counted_trial(spec, *n, *seed))
        .collect()
}

/// Runs every cell of the plan. Comparison trials use the rayon pool when
/// the `parallel` feature is enabled.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<MeasurementTable> {
    run_with(plan, true)
}

/// Same as [`run_experiment`] but never leaves the calling thread.
pub fn run_experiment_sequential(plan: &ExperimentPlan) -> Result<MeasurementTable> {
    run_with(plan, false)
}

/// The `n · log10 n` column of the reference timing table, verbatim.
pub const FIXTURE_NLOGN: [f64; 10] = [
    18494.85, 40000.00, 62641.37, 86020.60, 109948.50, 134313.64, 159042.38, 184082.40, 209394.56,
    234948.50,
];

/// Mean sorting seconds over ten trials; rows n = 5000..=50000, columns in
/// [`DistributionSpec::table_columns`] order.
const FIXTURE_MEANS: [[f64; 6]; 10] = [
    [0.0047, 0.0047, 0.0015, 0.0016, 0.0016, 0.0031],
    [0.0095, 0.0172, 0.0031, 0.0031, 0.0047, 0.0063],
    [0.0091, 0.0422, 0.0062, 0.0062, 0.0078, 0.0062],
    [0.0156, 0.0719, 0.0062, 0.0062, 0.0109, 0.0110],
    [0.0266, 0.1140, 0.0093, 0.0093, 0.0110, 0.0109],
    [0.0345, 0.1609, 0.0156, 0.0157, 0.0156, 0.0140],
    [0.0421, 0.2188, 0.0203, 0.0156, 0.0156, 0.0154],
    [0.0579, 0.2812, 0.0218, 0.0157, 0.0171, 0.0189],
    [0.0735, 0.3625, 0.0282, 0.0204, 0.0202, 0.0219],
    [0.0844, 0.4453, 0.0391, 0.0235, 0.0219, 0.0233],
];

/// Standard deviations matching [`FIXTURE_MEANS`] cell for cell.
const FIXTURE_SDS: [[f64; 6]; 10] = [
    [0.007573, 0.007573, 0.004743, 0.005060, 0.005060, 0.006540],
    [0.008182, 0.005224, 0.006540, 0.006540, 0.007573, 0.008138],
    [0.007838, 0.007052, 0.008011, 0.008011, 0.008230, 0.008011],
    [0.000516, 0.008103, 0.008011, 0.008011, 0.007534, 0.007601],
    [0.007560, 0.007601, 0.008015, 0.008015, 0.007601, 0.007534],
    [0.006604, 0.007666, 0.000516, 0.000483, 0.000516, 0.004944],
    [0.007445, 0.007315, 0.007861, 0.000516, 0.000516, 0.000516],
    [0.007534, 0.000422, 0.008364, 0.000483, 0.005259, 0.006919],
    [0.007487, 0.006604, 0.006443, 0.007792, 0.007927, 0.008062],
    [0.008058, 0.019833, 0.008333, 0.008127, 0.008062, 0.008125],
];

pub const FIXTURE_SOURCE: &str = "reference timing table (Pentium 4, 10 trials)";

/// The published mean/sd timing grid as a measurement table.
pub fn load_fixture_table1() -> MeasurementTable {
    let specs = DistributionSpec::table_columns();
    let rows = FIXTURE_MEANS
        .iter()
        .zip(FIXTURE_SDS.iter())
        .enumerate()
        .flat_map(|(i, (means, sds))| {
            let n = (i + 1) * 5000;
            specs.iter().enumerate().map(move |(j, &spec)| Row {
                n,
                spec,
                mean: means[j],
                sd: sds[j],
                trials: 10,
                trial_values: Vec::new(),
            })
        })
        .collect();
    MeasurementTable {
        metric: Metric::Time,
        rows,
        metadata: Metadata {
            source: Some(FIXTURE_SOURCE.into()),
            ..Metadata::default()
        },
    }
}

/// Checks the embedded fixture: the `n log n` column is `n · log10 n` at two
/// decimals, the grid has 60 cells and the CSV round trip is exact.
pub fn verify_fixture() -> Result<()> {
    for (i, &value) in FIXTURE_NLOGN.iter().enumerate() {
        let n = ((i + 1) * 5000) as f64;
        let expected = format!("{:.2}", n * n.log10());
        if format!("{value:.2}") != expected {
            return Err(Error::Fixture(format!(
                "n log n column at n={n}: {value:.2} != {expected}"
            )));
        }
    }
    let table = load_fixture_table1();
    if table.rows.len() != 60 {
        return Err(Error::Fixture(format!(
            "expected 60 cells, found {}",
            table.rows.len()
        )));
    }
    let mut buf = Vec::new();
    write_csv(&table, &mut buf)?;
    let back = read_csv(&String::from_utf8_lossy(&buf))?;
    if back != table {
        return Err(Error::Fixture("CSV round trip changed the table".into()));
    }
    Ok(())
}

/// Six significant digits, shortest rendering.
pub fn format_sig6(x: f64) -> String {
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    format!("{rounded}")
}

/// Renders a measured value: counts exactly, seconds to six significant
/// digits.
pub fn format_value(metric: Metric, x: f64) -> String {
    match metric {
        Metric::Comparisons => format!("{x}"),
        Metric::Time => format_sig6(x),
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Csv {
        line,
        reason: e.to_string(),
    }
}

fn write_metadata<W: Write>(metric: Metric, meta: &Metadata, out: &mut W) -> Result<()> {
    writeln!(out, "# metric: {metric}")?;
    if let Some(seed) = meta.seed {
        writeln!(out, "# seed: {seed}")?;
    }
    if let Some(res) = meta.clock_resolution {
        writeln!(out, "# clock_resolution_s: {res:e}")?;
    }
    if let Some(ts) = meta.timestamp {
        writeln!(out, "# timestamp_unix: {ts}")?;
    }
    if let Some(host) = &meta.host {
        writeln!(out, "# host: {host}")?;
    }
    if let Some(source) = &meta.source {
        writeln!(out, "# source: {source}")?;
    }
    Ok(())
}

/// Long-form CSV: metadata comments, then one row per cell.
pub fn write_csv<W: Write>(table: &MeasurementTable, mut out: W) -> Result<()> {
    write_metadata(table.metric, &table.metadata, &mut out)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for row in &table.rows {
        w.write_record([
            table.metric.to_string(),
            row.n.to_string(),
            row.spec.to_string(),
            format_value(table.metric, row.mean),
            format_value(table.metric, row.sd),
            row.trials.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Which statistic a wide table shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    Mean,
    Sd,
}

/// Grid-shaped CSV: one row per `n`, one column per distribution.
pub fn write_wide_csv<W: Write>(
    table: &MeasurementTable,
    statistic: Statistic,
    mut out: W,
) -> Result<()> {
    write_metadata(table.metric, &table.metadata, &mut out)?;
    let specs = table.specs();
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = std::iter::once("n".to_string())
        .chain(specs.iter().map(|s| s.to_string()))
        .collect();
    w.write_record(&header).map_err(csv_error)?;
    for n in table.sizes() {
        let mut record = vec![n.to_string()];
        for spec in &specs {
            record.push(table.row(n, spec).map_or_else(String::new, |r| {
                let v = match statistic {
                    Statistic::Mean => r.mean,
                    Statistic::Sd => r.sd,
                };
                format_value(table.metric, v)
            }));
        }
        w.write_record(&record).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_metadata(text: &str) -> Result<Metadata> {
    let mut meta = Metadata::default();
    for (idx, line) in text.lines().enumerate() {
        let Some(comment) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        let Some((key, value)) = comment.split_once(':') else {
            continue;
        };
        let value = value.trim();
        let bad = |what: &str| Error::Csv {
            line: idx as u64 + 1,
            reason: format!("bad {what} `{value}`"),
        };
        match key.trim() {
            "seed" => meta.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "clock_resolution_s" => {
                meta.clock_resolution = Some(value.parse().map_err(|_| bad("clock resolution"))?)
            }
            "timestamp_unix" => meta.timestamp = Some(value.parse().map_err(|_| bad("timestamp"))?),
            "host" => meta.host = Some(value.to_string()),
            "source" => meta.source = Some(value.to_string()),
            _ => {}
        }
    }
    Ok(meta)
}

/// Parses the long-form CSV written by [`write_csv`].
pub fn read_csv(text: &str) -> Result<MeasurementTable> {
    let metadata = parse_metadata(text)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header = reader.headers().map_err(csv_error)?.clone();
    let header_line = text
        .lines()
        .position(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map_or(1, |i| i as u64 + 1);
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Csv {
            line: header_line,
            reason: format!("expected header `{}`", CSV_HEADER.join(",")),
        });
    }

    let mut metric: Option<Metric> = None;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let fail = |reason: String| Error::Csv { line, reason };
        let field = |i: usize| record.get(i).unwrap_or_default();

        let row_metric: Metric = field(0).parse().map_err(|e: Error| fail(e.to_string()))?;
        match metric {
            None => metric = Some(row_metric),
            Some(m) if m != row_metric => {
                return Err(fail(format!("mixed metrics `{m}` and `{row_metric}`")))
            }
            _ => {}
        }
        let n: usize = field(1)
            .parse()
            .map_err(|_| fail(format!("bad size `{}`", field(1))))?;
        let spec: DistributionSpec = field(2).parse().map_err(|e: Error| fail(e.to_string()))?;
        let real = |i: usize, what: &str| -> Result<f64> {
            field(i)
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| fail(format!("bad {what} `{}`", field(i))))
        };
        let mean = real(3, "mean")?;
        let sd = real(4, "sd")?;
        if sd < 0.0 {
            return Err(fail(format!("negative sd `{}`", field(4))));
        }
        let trials: usize = field(5)
            .parse()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| fail(format!("bad trial count `{}`", field(5))))?;
        rows.push(Row {
            n,
            spec,
            mean,
            sd,
            trials,
            trial_values: Vec::new(),
        });
    }

    let metric = metric.ok_or(Error::Csv {
        line: header_line,
        reason: "no data rows".into(),
    })?;
    Ok(MeasurementTable {
        metric,
        rows,
        metadata,
    })
}
