// Negated float comparisons are deliberate: they treat NaN as a failed check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod bounds;
pub mod error;
pub mod iterated;
pub mod prime_engine;
pub mod ratio_sets;
pub mod record;
pub mod series;

pub use asymptotics::{FitResult, RatioTrace, TrendSummary};
pub use error::{Error, Result};
pub use iterated::{Cell, CountSample, CountingDifference, IteratedPrimes, SetFamily, TailRelation};
pub use prime_engine::{PrimeIndex, PrimeTable, TableConfig};
pub use ratio_sets::{IsolationCertificate, RatioWitness};
pub use record::Record;
pub use series::{ExponentEstimate, SeriesAccount};
