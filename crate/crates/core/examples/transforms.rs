//! Point transformations, their composition and JSON form.
//!
//! Run with `cargo run --example transforms`.

use planar_lie::catalog::{generate, CanonicalFamily};
use planar_lie::classify::classify;
use planar_lie::expr::{parse_field, parse_function};
use planar_lie::scalar::GaussianRational;
use planar_lie::transform::{pushforward_algebra, solve_antiderivative, PointTransform, TransformChain};

fn main() {
    let f = parse_function("y^2 + exp(-y)").unwrap();
    let chain = TransformChain::identity()
        .then(PointTransform::shear(f))
        .then(PointTransform::scale_y(GaussianRational::ratio(1, 3)))
        .then(PointTransform::ShearX { alpha: GaussianRational::from_int(2), f: parse_function("y").unwrap() });
    let json = serde_json::to_string(&chain).unwrap();
    println!("chain {json}");

    let v = parse_field("x*Dx + Dy").unwrap();
    let w = chain.pushforward(&v).unwrap();
    println!("{v}  ->  {w}");
    println!("and back  ->  {}", chain.inverse().pushforward(&w).unwrap());

    // Classification does not see the change of coordinates.
    let g = generate(&CanonicalFamily::spectral(2, &[(GaussianRational::one(), 2)])).unwrap();
    let moved = pushforward_algebra(&chain, &g).unwrap();
    println!("moved basis {:?}", moved.basis());
    let before = classify(&g).unwrap().family;
    let after = classify(&moved).unwrap().family;
    println!("same family after transform: {}", before == after);

    println!("antiderivative of y*exp(y): {}", solve_antiderivative(&parse_function("y*exp(y)").unwrap()).unwrap());
}
