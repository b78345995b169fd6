//! Isomorphism classes of fractional annuli and the number of forms split by
//! a quadratic extension.

use nonarch::annulus::AnnulusType;
use nonarch::moduli::{count_forms, descended_radii, normal_form, FractionalAnnulus};
use nonarch::presentation::fmt_ratio;
use num_rational::Rational64;

fn main() -> nonarch::error::Result<()> {
    let q = Rational64::new;
    for (a, b, k) in [(q(0, 1), q(1, 1), AnnulusType::Closed), (q(-1, 2), q(1, 2), AnnulusType::Closed), (q(1, 3), q(1, 1), AnnulusType::SemiOpen), (q(1, 4), q(2, 1), AnnulusType::Open)] {
        let v = FractionalAnnulus::new(a, b, k)?;
        let c = normal_form(&v);
        println!("{:<40} modulus {:>4}, class {}", v.describe(), fmt_ratio(c.modulus), fmt_ratio(c.alpha_class));
    }
    let v = descended_radii(4, 3, 1, 0, AnnulusType::Closed)?;
    println!("descended from XY = varpi^4 by characters (1, 0): {}", v.describe());
    println!("forms split by a quadratic extension:");
    for kind in [AnnulusType::Closed, AnnulusType::Open, AnnulusType::SemiOpen] {
        for rho in [1, 2] {
            let row: Vec<String> = (1..=4).map(|e| count_forms(kind, rho, e).map(|n| n.to_string())).collect::<Result<_, _>>()?;
            println!("  {kind:<9} rho = {rho}: e = 1..4 -> {}", row.join(" "));
        }
    }
    Ok(())
}
