//! Projection-free convex optimization over sets accessed through linear
//! minimization oracles.
//!
//! The crate provides the Frank-Wolfe algorithm, its boosted variant driven
//! by gradient pursuit, away-step Frank-Wolfe, and decomposition-invariant
//! pairwise methods (plain and boosted), together with the feasible regions
//! and objective families they are typically run on.
//!
//! ```
//! use boostfw::prelude::*;
//!
//! let region = ScaledSimplex::probability(3).unwrap();
//! let f = GenericQuadratic::half_squared_distance(DenseVector::new(vec![0.2, 0.3, 0.5]).unwrap())
//!     .unwrap();
//! let cfg = SolverConfig::new(Algorithm::BoostFw, StepRule::short(1.0)).with_budget(50);
//! let trace = solve(&f, &region, &cfg).unwrap();
//! assert!(trace.last().f_value < 1e-10);
//! ```

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numerics;
pub mod objective;
pub mod objectives;
pub mod pursuit;
pub mod regions;
pub mod solvers;
pub mod vector;

pub use error::{Error, Result};
pub use objective::Objective;
pub use pursuit::{align, gradient_pursuit, PursuitConfig, PursuitOutcome};
pub use regions::{Region, Vertex, VertexKey};
pub use solvers::{solve, Algorithm, RunTrace, SolverConfig, StepRule, StepType, TraceRow};
pub use vector::{inner, DenseVector};

pub mod prelude {
    pub use crate::numerics::{check_gradient, estimate_smoothness, SmoothnessEstimate};
    pub use crate::objective::Objective;
    pub use crate::objectives::{
        Beckmann, GenericQuadratic, HuberCompletion, LeastSquares, Lifted, Logistic,
    };
    pub use crate::pursuit::{align, gradient_pursuit, PursuitConfig, PursuitOutcome};
    pub use crate::regions::{
        DagFlowRegion, DagNetwork, L1Ball, NuclearBall, Region, ScaledSimplex, VertexPolytope,
    };
    pub use crate::solvers::{
        duality_gap, solve, Algorithm, RunTrace, SolverConfig, Status, StepRule, StepType,
    };
    pub use crate::vector::DenseVector;
    pub use crate::{Error, Result};
}
