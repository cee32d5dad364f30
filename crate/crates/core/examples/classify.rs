//! Classification into normal-form families, with a verified witness chain.
//!
//! Run with `cargo run --example classify`.

use planar_lie::algebra::AlgebraSpan;
use planar_lie::classify::{canonicalize_triangular, classify};
use planar_lie::expr::parse_algebra_file;
use planar_lie::transform::pushforward_algebra;

fn main() {
    let inputs = [
        "(x + y^2)*Dx + Dy\nDx\n",
        "y*Dx + Dy\nDx\n",
        "Dy\nexp(2*y)*Dx\n",
        "2*x*Dx + y*Dy\nDx\nDy\ny*Dx\n",
        "x*Dx + y*Dy\nDx\nDy\ny*Dx\n",
        "x*Dx\nDx\ny*Dx\n",
        "y*Dx\nx*Dy\nx*Dx - y*Dy\n",
    ];
    for text in inputs {
        let g = AlgebraSpan::make_span(&parse_algebra_file(text).unwrap()).unwrap();
        println!("== {:?}", g.basis());
        // Prefer the constructive path, which also returns a witness chain.
        match canonicalize_triangular(&g).or_else(|_| classify(&g)) {
            Err(e) => println!("   error (exit {}): {e}", e.exit_code()),
            Ok(rec) => {
                println!("   family {}", serde_json::to_string(&rec.family).unwrap());
                if let (Some(chain), Some(basis)) = (&rec.witness, &rec.canonical_basis) {
                    println!("   witness {}", serde_json::to_string(chain).unwrap());
                    let image = pushforward_algebra(chain, &g).unwrap();
                    let target = AlgebraSpan::span_of(basis);
                    println!("   image {:?} matches canonical basis: {}", image.basis(), image.same_span(&target));
                }
            }
        }
    }
}
