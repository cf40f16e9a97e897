//! Static and limit entropies, pressures and conditional quantities.

mod engine;
mod fekete;
mod kernel;
mod lp;
mod statics;

pub use engine::{ConditionalLevels, Engine, Potential, ProductCheck, TailMatrix};
pub use fekete::{
    fekete, LimitEstimate, LimsupEstimate, SubadditiveTrace, CONVERGENCE_TOLERANCE,
    SUBADDITIVITY_TOLERANCE,
};
pub use lp::{box_simplex_maximize, BoxSimplexSolution};
pub use statics::{
    conditional_static_entropy, conditional_static_topological, eta, static_metric_entropy,
    static_topological_entropy, t_log_t,
};
