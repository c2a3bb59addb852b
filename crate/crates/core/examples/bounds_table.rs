//! Lower and upper bounds on hidden units for every k, n ≤ 4.
//!
//! cargo run --example bounds_table

use skn::harness::{tightness_csv, tightness_table};

fn main() {
    let table = tightness_table();
    print!("{}", tightness_csv(&table));
    let tight: Vec<_> = table.iter().filter(|r| r.free_tight).map(|r| (r.k, r.n)).collect();
    eprintln!("both layers free, bounds meet at {tight:?}");
}
