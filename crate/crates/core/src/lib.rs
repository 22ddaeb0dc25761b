//! Empirical complexity bounds for quicksort.
//!
//! Inputs are drawn from six standard distributions, sorted by an
//! instrumented first-element-pivot quicksort, and the measured means are
//! fitted against candidate complexity classes to select an empirical bound.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod fitting;
pub mod quicksort;
pub mod rng;
pub mod samplers;

pub use error::{Error, Result};
pub use experiment::{
    aggregate, load_fixture_table1, run_experiment, run_experiment_sequential, ExperimentPlan,
    MeasurementTable, Metric, Row,
};
pub use fitting::{fit, fit_report, select_bound, ComplexityClass, EmpiricalVerdict, FitResult};
pub use quicksort::{partition, quicksort, timed_sort, InstrumentedRun, SortOutcome};
pub use rng::Rng;
pub use samplers::{DistributionSpec, Keys, Sample};
