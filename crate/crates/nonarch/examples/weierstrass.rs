//! Weierstrass preparation f = P(X)·u on an annulus, checked by expanding the
//! product back out.

use nonarch::annulus::{AnnulusType, LaurentFunction};
use nonarch::field::Field;
use nonarch::linearize::agreement_level;

fn main() -> nonarch::error::Result<()> {
    let f = Field::prime(7)?;
    for (kind, text) in [
        (AnnulusType::Closed, "3*pi^2 + X + pi*X^2 + 2*pi^3*Y"),
        (AnnulusType::Open, "2*pi^2 + 3*pi*X + X^2 + pi^5*Y"),
        (AnnulusType::SemiOpen, "1 + pi*Y + X^3"),
    ] {
        let g = LaurentFunction::parse(&f, 4, kind, 24, 48, text)?;
        let prep = g.weierstrass_prepare()?;
        let (lhs, rhs) = prep.identity_sides(&g);
        println!("{kind}: f = {}", g.format("pi"));
        println!("  P = {}", prep.format_p());
        println!("  alpha = {}, eta = {}, degree {}", prep.alpha, prep.eta, prep.degree());
        println!("  identity holds to order {}", agreement_level(&lhs, &rhs));
    }
    Ok(())
}
