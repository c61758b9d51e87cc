pub mod cli;
pub mod gapstrings;
pub mod hardgen;
pub mod reduction;
pub mod solvers;
pub mod stoppers;
pub mod strings;
