//! Classification by chaotic compression.
//!
//! A binary sequence is coded as an interval of initial conditions of a
//! piecewise-linear chaotic map; the narrower the interval, the more bits
//! it costs. Each class gets its own four-branch map whose branch widths are
//! the class's pair frequencies, and a new instance goes to the class that
//! codes it in the fewest bits.
//!
//! * [`maps`]: the skew tent map and the second-return map.
//! * [`coding`]: back-iteration, codelengths and the skew sweep.
//! * [`model`]: per-class training and the JSON model format.
//! * [`classify`]: minimum-codelength prediction.
//! * [`pipeline`]: datasets, scaling, splits, metrics and threshold search.

pub mod classify;
pub mod coding;
pub mod error;
pub mod maps;
pub mod model;
pub mod pipeline;

pub use classify::{predict, predict_one, predict_raw, PredictionRecord, Predictions};
pub use coding::{Codelength, FirstPairSeed, Interval, OddLengthPolicy, PairCoding};
pub use error::{Error, Result};
pub use maps::{Pair, PairProbabilities, SecondReturnMap, SkewTentMap, SymbolicSequence};
pub use model::{train, ClassModel, ClassModelSet, TrainingConfig};
