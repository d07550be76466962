//! Runs the acceptance grid in-process and writes the outputs to a
//! directory. Usage: `cargo run --release --example reproduce -- [dir]`.

use orthofree::reproduce::{reproduce, Config};

fn main() -> orthofree::Result<()> {
    let rep = reproduce(&Config::default())?;
    print!("{}", rep.report_text());
    for r in &rep.reports {
        eprintln!("criterion {}: {:.2?}", r.criterion.id, r.elapsed);
    }
    if let Some(dir) = std::env::args().nth(1) {
        rep.write_to(dir.as_ref())?;
        println!("wrote {dir}");
    }
    std::process::exit(if rep.all_passed() { 0 } else { 1 });
}
