pub mod asymptote;
pub mod attractor;
pub mod census;
pub mod dilog;
pub mod numeric;
pub mod polygen;
pub mod solver;
