//! Truncated power series over a finite field: units, Teichmüller lifts,
//! Hensel lifting and ramified base change.

use nonarch::dvr::{hensel_lift_root, root_of_unity, DvrElement};
use nonarch::field::Field;

fn main() -> nonarch::error::Result<()> {
    let f = Field::prime(7)?;
    let prec = 12;
    let a = DvrElement::parse(&f, "3 + pi + 5*pi^4", prec)?;
    let inv = a.invert_unit()?;
    println!("a       = {}", a.format("pi"));
    println!("1/a     = {}", inv.format("pi"));
    println!("a * 1/a = {}", a.mul(&inv).format("pi"));

    // teichmüller lift of the residue of a
    let t = a.teichmuller()?;
    println!("[3]     = {}  (t^6 = {})", t.format("pi"), t.pow(6).format("pi"));

    // a square root of 2 + pi lifted from the residual root 3
    let poly = vec![DvrElement::parse(&f, "-2 - pi", prec)?, DvrElement::zero(&f, prec), DvrElement::one(&f, prec)];
    let r = hensel_lift_root(&poly, &DvrElement::from_int(&f, 3, prec))?;
    println!("sqrt(2 + pi) = {}", r.format("pi"));

    let z = root_of_unity(&f, 3, prec)?;
    println!("primitive cube root of unity: {}", z.format("pi"));

    // pi = varpi^3 in k[[varpi]]
    let b = a.base_change_ramified(3);
    println!("a over k[[varpi]] = {}", b.format("varpi"));
    println!("descends back: {}", b.descend_ramified(3)?.agrees(&a));
    Ok(())
}
