//! Generating normal forms and auditing the catalog's printed claims.
//!
//! Run with `cargo run --example catalog`.

use planar_lie::catalog::{audit, generate, normal_form, CanonicalFamily};
use planar_lie::scalar::GaussianRational;

fn main() {
    let q = GaussianRational::from_int;
    let families = [
        CanonicalFamily::NilpotentNonAbelian { n: 3 },
        CanonicalFamily::NonAbelianDerivedLine { k: 2, a: GaussianRational::ratio(1, 2) },
        CanonicalFamily::Rank2Abelian { subtype: 2, lambda: None },
        CanonicalFamily::spectral(1, &[(q(2), 1)]),
        CanonicalFamily::spectral(3, &[(q(0), 2)]),
        CanonicalFamily::spectral(6, &[(q(1), 2)]),
        CanonicalFamily::NonAbelianDerivedLine { k: 1, a: q(1) },
    ];
    for fam in families {
        println!("== {}", serde_json::to_string(&fam).unwrap());
        match generate(&fam) {
            Err(e) => {
                println!("   {e}");
                continue;
            }
            Ok(g) => println!("   basis {:?}", g.basis()),
        }
        let nf = normal_form(&fam).unwrap();
        if nf != fam {
            println!("   normal form {}", serde_json::to_string(&nf).unwrap());
        }
        for d in audit(&fam).unwrap() {
            println!("   audit {:?}: {}", d.kind, d.message);
        }
    }
}
