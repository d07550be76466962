//! Scans a clean construction and a deliberately broken copy of it, then
//! replays the reported witness.

use orthofree::certify::plant_self_orth_conflict;
use orthofree::constructions::s3_exact;
use orthofree::predicates::ScanOutcome;

fn main() -> orthofree::Result<()> {
    let ps = s3_exact(8)?;
    println!("s3_exact(8): {} vectors, scan: {:?}", ps.len(), ps.scan(None)?);

    let broken = plant_self_orth_conflict(&ps).expect("n >= 3");
    match broken.scan(None)? {
        ScanOutcome::Violation(v) => {
            println!("planted copy: {}", serde_json::to_string(&v.to_json())?);
            println!("replay holds: {}", v.replay()?);
        }
        other => println!("unexpected: {other:?}"),
    }

    // budgets bound the number of examined tuples
    println!("budget 10: {:?}", ps.scan(Some(10))?);
    Ok(())
}
