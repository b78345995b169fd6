//! Hides a linear automorphism of an annulus behind a change of coordinates,
//! then recovers a linear coordinate and checks the certificate.

use nonarch::annulus::{AnnulusType, LaurentFunction};
use nonarch::dvr::DvrElement;
use nonarch::field::Field;
use nonarch::linearize::{linearize, AnnulusAutomorphism};

fn main() -> nonarch::error::Result<()> {
    let f = Field::prime(13)?;
    let x = LaurentFunction::parse(&f, 3, AnnulusType::Closed, 12, 40, "X")?;
    let zeta = f.from_int(3);
    let lin = AnnulusAutomorphism::linear(&x, 3, &zeta, 0, &f.from_int(9))?;
    let c = DvrElement::parse(&f, "2*pi^6 + pi^7", 40)?;
    let s = lin.conjugate_translation(&c)?.mirrored()?.conjugate_translation(&c)?.mirrored()?;
    println!("sigma(X) = {}", s.sigma_x.format("pi"));
    println!("sigma(Y) = {}", s.sigma_y.format("pi"));
    let cert = linearize(&s, 30)?;
    println!("{:?}: X' = {}", cert.branch, cert.new_x.format("pi"));
    println!("sigma(X') = {} X', verified to order {}", cert.u.format("pi"), cert.verified_to_precision);

    let sw = AnnulusAutomorphism::swap(&x.with_kind(AnnulusType::Closed), &f.one(), 0, &f.from_int(5))?;
    let cert = linearize(&sw.conjugate_translation(&c)?, 30)?;
    println!("{:?}: X'Y' = ({}) pi^3, verified to order {}", cert.branch, cert.u.format("pi"), cert.verified_to_precision);
    Ok(())
}
