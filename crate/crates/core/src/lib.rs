#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::should_implement_trait)]

pub mod cai;
pub mod cli;
pub mod hbeta;
pub mod lemmas;
pub mod linalg;
pub mod report;
