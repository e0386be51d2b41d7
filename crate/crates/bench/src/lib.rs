//! Instances shared by the criterion benches.

use qplan_core::{gen_blocks, gen_rooms, parse_domain, ProblemInstance};

pub fn rooms(n: usize) -> ProblemInstance {
    parse_domain(&gen_rooms(n).expect("valid room count")).expect("generated rooms parse")
}

pub fn blocks(n: usize) -> ProblemInstance {
    parse_domain(&gen_blocks(n).expect("valid block count")).expect("generated blocks parse")
}
