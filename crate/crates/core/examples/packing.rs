//! Greedy packings against their guaranteed floor, and the corner-free set
//! read off one of them.

use orthofree::constructions::corner_free_set;
use orthofree::setfamily::{greedy_packing, greedy_packing_ordered, Cap, PackingOrder};

fn main() -> orthofree::Result<()> {
    for (n, t, l) in [(7, 3, 2), (8, 2, 1), (10, 3, 2), (20, 3, 2), (15, 4, 2)] {
        let lex = greedy_packing(n, t, Cap::from_integer(l))?;
        let shuffled = greedy_packing_ordered(n, t, Cap::from_integer(l), PackingOrder::Shuffled(1))?;
        println!(
            "n={n:>2} t={t} |F∩G|<{l}: lex {:>3}, shuffled {:>3}, floor {}",
            lex.len(),
            shuffled.len(),
            lex.floor_guarantee()
        );
    }
    print!("{}", greedy_packing(7, 3, Cap::from_integer(2))?);

    let ps = corner_free_set(10, 5, 2)?;
    println!("corner-free(10, 5, 2): {} vectors, clean: {}", ps.len(), ps.scan(None)?.is_ok());
    Ok(())
}
