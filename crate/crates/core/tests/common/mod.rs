#![allow(dead_code)]

pub mod invariants;
pub mod oracle;
pub mod random_lp;
pub mod simplex;
