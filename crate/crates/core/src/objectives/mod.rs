//! Objective families and synthetic instance generators.

mod beckmann;
pub mod generate;
mod huber;
mod least_squares;
mod lifted;
pub mod loaders;
mod logistic;
mod quadratic;

pub use beckmann::{bpr_travel_time, Beckmann, NEGATIVE_FLOW_TOL};
pub use huber::{huber, huber_derivative, HuberCompletion};
pub use least_squares::LeastSquares;
pub use lifted::Lifted;
pub use logistic::Logistic;
pub use quadratic::GenericQuadratic;
