//! Newton polygon of a Laurent function on a closed annulus and the number of
//! zeros on each circle.

use nonarch::annulus::{AnnulusType, LaurentFunction};
use nonarch::field::Field;
use nonarch::presentation::fmt_ratio;

fn main() -> nonarch::error::Result<()> {
    let f = Field::prime(5)?;
    let g = LaurentFunction::parse(&f, 6, AnnulusType::Closed, 16, 24, "pi^5 + pi^2*X + X^3 + pi*Y + 2*pi^4*Y^2")?;
    println!("f = {} on |pi|^6 <= |X| <= 1", g.format("pi"));
    let bd = g.boundary_valuations()?;
    println!("{bd:?}");
    for b in g.newton_polygon()?.breakpoints {
        println!(
            "r = {:>4}: eta_r = {:>4}, slope {} -> {}, {} zeros",
            fmt_ratio(b.r),
            fmt_ratio(b.value),
            b.left_slope,
            b.right_slope,
            g.count_zeros(b.r, b.r)?
        );
    }
    println!("total zeros: {}", g.total_zeros()?);
    Ok(())
}
