//! Adjoint matrices of a distinguished operator and their exact spectra.
//!
//! Run with `cargo run --example spectral`.

use planar_lie::algebra::AlgebraSpan;
use planar_lie::expr::{parse_algebra_file, parse_field};
use planar_lie::linalg::Matrix;
use planar_lie::spectral::{ad_matrix, decompose_matrix, eigenfunction_form, spectral_decompose, OperatorKind};

fn main() {
    let cases = [
        ("Dy", "Dx\ny*Dx\ny^2*Dx\nexp(2*y)*Dx\n", OperatorKind::Dy),
        ("Dy", "exp(i*y)*Dx\nexp(-i*y)*Dx\n", OperatorKind::Dy),
        ("x*Dx + Dy", "exp(y)*Dx\ny*exp(y)*Dx\nDx\n", OperatorKind::XDxPlusDy),
    ];
    for (op, ideal, kind) in cases {
        let x = parse_field(op).unwrap();
        let h = AlgebraSpan::make_span(&parse_algebra_file(ideal).unwrap()).unwrap();
        let ad = ad_matrix(&x, &h).unwrap();
        let data = spectral_decompose(&ad).unwrap();
        println!("ad({op}) on {:?}", h.basis());
        for (lambda, n) in data.spectrum() {
            println!("   eigenvalue {lambda} with multiplicity {n}");
        }
        let forms = eigenfunction_form(&data, &h, kind).unwrap();
        println!("   eigenfunction exponents {forms:?}");
    }

    // The companion matrix of t^2 - 2 has no eigenvalues in Q(i).
    let m = Matrix::from_i64(&[&[0, 2], &[1, 0]]);
    match decompose_matrix(&m) {
        Ok(d) => println!("unexpected spectrum {:?}", d.spectrum()),
        Err(e) => println!("companion of t^2 - 2: {e}"),
    }
}
