//! Prints the bound table for every property at q = 3, n = 1..=8.

use orthofree::bounds::{bounds_table, table_text};
use orthofree::Property;

fn main() -> orthofree::Result<()> {
    for p in [
        Property::RightAngle,
        Property::KRightCorner(3),
        Property::AllRightTriangle,
        Property::SelfOrthDiff,
        Property::DivisibleHamming,
    ] {
        println!("== {p}");
        print!("{}", table_text(&bounds_table(p, 1..=8, &[3])?));
    }
    Ok(())
}
