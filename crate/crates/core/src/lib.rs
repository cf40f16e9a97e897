pub mod entropy;
pub mod error;
pub mod interval;
pub mod measure;
pub mod partition;
pub mod structures;
pub mod symbolic;

pub use error::{Error, Result};
pub use measure::{ConditionalMeasure, MeasureKind, ShiftMeasure};
pub use partition::{
    make_cylinder_partition, make_smoothed_partition, validate_members, JoinIndex,
    PartitionOfUnity, ValidationReport, DEFAULT_BUDGET,
};
pub use symbolic::{word_distance, LocallyConstantFunction, SubshiftSystem, Symbol, Word, WordTable};
pub use entropy::{
    box_simplex_maximize, conditional_static_entropy, conditional_static_topological, fekete,
    static_metric_entropy, static_topological_entropy, BoxSimplexSolution, ConditionalLevels,
    Engine, LimitEstimate, LimsupEstimate, Potential, ProductCheck, SubadditiveTrace, TailMatrix,
};
pub use structures::{
    certify_convergence, check_superenvelope, is_almost_decreasing, is_almost_increasing,
    tail_variational_check, transfinite_sequence, weakly_dominates, weakly_equivalent, Candidate,
    ConvergingSequence, StructureInput, SuperenvelopeVerdict, TailVariationalReport,
    TopologicalFamily, TransfiniteTrace, Verdict,
};
pub use interval::{
    approx_static_entropies, approx_trace, hat_partition, ApproxOptions, ContinuousTrace, Estimate,
    IntervalMapKind, IntervalSystem, SampledFunction, StaticEntropies, DEFAULT_GRID,
};
