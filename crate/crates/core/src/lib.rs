//! Multi-sorted nominal abstract binding trees.

pub mod algebra;
pub mod cli;
pub mod contexts;
pub mod name;
pub mod sequents;
pub mod sheafcheck;
pub mod signature;
pub mod syntax;
pub mod term;
