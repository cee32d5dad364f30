//! Vector fields over the exponential-polynomial ring and their Lie bracket.
//!
//! Run with `cargo run --example brackets`.

use planar_lie::coeffring::ExpPoly;
use planar_lie::expr::parse_field;
use planar_lie::fields::VectorField;
use planar_lie::scalar::GaussianRational;

fn main() {
    let dy = VectorField::dy();
    let cubic = VectorField::along_x(ExpPoly::y_pow(3));
    println!("[{dy}, {cubic}] = {}", dy.bracket(&cubic));

    let exp2 = VectorField::along_x(ExpPoly::y_pow_exp(0, GaussianRational::from_int(2)));
    println!("[{dy}, {exp2}] = {}", dy.bracket(&exp2));

    let euler = parse_field("x*Dx + y*Dy").unwrap();
    let w = parse_field("(3*x + 2/5*y^3)*Dx + i*y*Dy").unwrap();
    println!("[{euler}, {w}] = {}", euler.bracket(&w));

    // Triangular fields project onto their Dy-part, and the projection
    // respects brackets.
    let v = parse_field("(x + exp(y))*Dx + y*Dy").unwrap();
    let u = parse_field("y^2*Dx + Dy").unwrap();
    let lhs = v.bracket(&u).project_y().unwrap();
    let rhs = planar_lie::fields::bracket_1d(&v.project_y().unwrap(), &u.project_y().unwrap());
    println!("Π[v,u] = {lhs}, [Πv,Πu] = {rhs}");
    assert_eq!(lhs, rhs);

    let rot = parse_field("y*Dx - x*Dy").unwrap();
    println!("{rot} triangular: {}", rot.is_triangular());
}
