//! Evaluation-matrix certificates: identity on clean sets, rank loss once
//! a conflict is planted into a set already at the dimension bound.

use orthofree::bounds::s_upper;
use orthofree::certify::{p_matrix_certificate, plant_hamming_conflict, plant_self_orth_conflict, t_code_certificate};
use orthofree::constructions::{s3_exact, t_lower_augmented, Alphabet};

fn main() -> orthofree::Result<()> {
    let s3 = s3_exact(5)?;
    let c = p_matrix_certificate(&s3)?;
    println!("s3_exact(5): size {} rank {} identity {} (s_upper {})", c.size, c.rank, c.is_identity(), s_upper(5, 3)?);
    let planted = plant_self_orth_conflict(&s3).expect("n >= 3");
    let c = p_matrix_certificate(&planted)?;
    println!("  + planted: size {} rank {} identity {}", c.size, c.rank, c.is_identity());

    let pm = Alphabet::plus_minus_one(3);
    let code = t_lower_augmented(5, 3, pm)?;
    let c = t_code_certificate(&code)?;
    println!("t_lower_augmented(5,3): size {} rank {} digest {}", c.size, c.rank, c.matrix.digest());
    let planted = plant_hamming_conflict(&code, pm.a, pm.b).expect("n >= q");
    let c = t_code_certificate(&planted)?;
    println!("  + planted: size {} rank {} identity {}", c.size, c.rank, c.is_identity());
    Ok(())
}
