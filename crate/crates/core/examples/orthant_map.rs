//! The integer map whose sign pattern reports the highest active hidden
//! unit.
//!
//! cargo run --example orthant_map

use skn::construct::orthant_weights;
use skn::model::{highest_set_index, orthant_index};

fn main() -> skn::Result<()> {
    let map = orthant_weights(3)?;
    println!("W =");
    for row in &map.weights {
        println!("  {row:?}");
    }
    println!("b = {:?}", map.bias);
    for z in [0usize, 1, 2, 5, 12, 127] {
        let s = map.apply(z);
        let as_f64: Vec<f64> = s.iter().map(|&v| v as f64).collect();
        println!(
            "z = {z:07b}: Wz + b = {s:?}, orthant {}, highest unit {}",
            orthant_index(&as_f64)?,
            highest_set_index(z)
        );
    }
    Ok(())
}
