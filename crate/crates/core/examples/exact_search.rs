//! Exact values by branch and bound. The R row is computed data, not a
//! published value.

use std::time::Instant;

use orthofree::search::{exact_r, exact_s, exact_t, SearchOptions};

fn main() -> orthofree::Result<()> {
    let opts = SearchOptions::default();
    type Solver = fn(usize, u32, SearchOptions) -> orthofree::Result<orthofree::search::SearchResult>;
    let runs: [(usize, Solver); 5] = [(2, exact_s), (5, exact_s), (4, exact_t), (6, exact_t), (3, exact_r)];
    for (n, f) in runs {
        let t = Instant::now();
        let r = f(n, 3, opts)?;
        println!(
            "{}: {} ({}, {} nodes, {:.1?})",
            r.label,
            r.optimum,
            r.status.as_str(),
            r.nodes_expanded,
            t.elapsed()
        );
    }
    let r = exact_s(5, 3, opts)?;
    print!("{}", r.witness.to_vector_file().render());
    Ok(())
}
