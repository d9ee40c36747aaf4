pub mod agents;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod metrics;
pub mod planner;
pub mod preference;
pub mod runner;
