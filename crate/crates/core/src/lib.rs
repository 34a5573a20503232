pub mod graph;
pub mod scalar;
pub mod percolation;
pub mod dual;
pub mod mcmc;
pub mod contact;
pub mod seed;
pub mod verify;
