//! The text format for fields and algebra files.
//!
//! Run with `cargo run --example parse_print`.

use planar_lie::expr::{parse_algebra_file, parse_field, parse_tree, print_field};

fn main() {
    for text in ["(x + y^2)*Dx + Dy", "exp(2*y)*Dx", "3*y^2*Dx", "(1/2 + 3/4*i)*exp(i*y)*y*Dx - Dy", "-x*Dx"] {
        let v = parse_field(text).unwrap();
        println!("{text:40} -> {}", print_field(&v));
        assert_eq!(parse_field(&print_field(&v)).unwrap(), v);
    }
    println!("syntax tree of x*Dx + Dy: {:?}", parse_tree("x*Dx + Dy").unwrap());

    for bad in ["exp(x*y)*Dx", "y^*Dx", "x + "] {
        let e = parse_field(bad).unwrap_err();
        println!("{bad:20} error: {e}");
    }

    let file = "# Heisenberg\nDy\nDx\ny*Dx\n\n";
    println!("file -> {:?}", parse_algebra_file(file).unwrap());
}
