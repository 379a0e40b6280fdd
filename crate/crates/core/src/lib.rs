pub mod bounds;
pub mod cli;
pub mod continuum;
pub mod dof;
pub mod error;
pub mod estimate;
pub mod experiments;
pub mod fieldmodel;
pub mod integrate;
pub mod kl_outage;
pub mod kernels;
pub mod matrix;
pub mod montecarlo;
pub mod specialfn;
