//! Series, center and rank of a span of fields, after checking closure.
//!
//! Run with `cargo run --example invariants`.

use planar_lie::algebra::AlgebraSpan;
use planar_lie::classify::fingerprint;
use planar_lie::expr::parse_algebra_file;

fn show(title: &str, text: &str) {
    let fields = parse_algebra_file(text).unwrap();
    println!("== {title}");
    let g = AlgebraSpan::make_span(&fields).unwrap();
    match g.verify_closure() {
        Err(e) => println!("   {e}"),
        Ok(_) => {
            let derived: Vec<_> = g.derived_series().iter().map(|s| s.dim()).collect();
            println!("   dim {} rank {} derived series {:?}", g.dim(), g.rank(), derived);
            println!("   derived algebra {:?}", g.derived().basis());
            println!("   center {:?}", g.center().unwrap().basis());
            let fp = fingerprint(&g).unwrap();
            println!("   nilpotent {} solvable {}", fp.is_nilpotent, fp.is_solvable);
        }
    }
}

fn main() {
    show("nilpotent, N=2", "Dy\nDx\ny*Dx\ny^2*Dx\n");
    show("affine line", "x*Dx\nDx\n");
    show("x Dy and y Dx", "x*Dy\ny*Dx\n");
    show("sl2", "y*Dx\nx*Dy\nx*Dx - y*Dy\n");
}
