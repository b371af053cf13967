#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod budget;
pub mod constants;
pub mod error;
pub mod expr;
pub mod interval;
pub mod parser;
pub mod series;
