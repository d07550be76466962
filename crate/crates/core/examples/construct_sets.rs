//! Builds every named construction at one size and prints its size and
//! provenance. Usage: `cargo run --example construct_sets -- [n] [q]`.

use orthofree::constructions::{construct_by_name, CONSTRUCTION_NAMES};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let q: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    for name in CONSTRUCTION_NAMES {
        let k = (*name == "corner-free").then_some(2);
        match construct_by_name(name, n, Some(q), k) {
            Ok(ps) => println!("{name:<20} {:>6} vectors  {}", ps.len(), ps.provenance_json()["params"]),
            Err(e) => println!("{name:<20} skipped: {e}"),
        }
    }
}
