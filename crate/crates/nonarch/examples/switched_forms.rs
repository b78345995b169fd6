//! Forms of an annulus on which the Galois group exchanges the two ends: the
//! descended ring is a quadric in two variables.

use nonarch::cli::report_text;
use nonarch::descent::{descend_switched, MonomialAction, VarImage};
use nonarch::dvr::ExtensionSpec;
use nonarch::field::Field;
use nonarch::presentation::{Presentation, VarKind, VariableDecl};

fn main() -> nonarch::error::Result<()> {
    let f = Field::prime(7)?;
    let vars = || vec![VariableDecl::new("X", VarKind::Restricted), VariableDecl::new("Y", VarKind::Restricted)];
    let swap = |ext: &ExtensionSpec| {
        MonomialAction::for_extension(
            ext,
            vec![VarImage { target: 1, character: 0, unit: f.one() }, VarImage { target: 0, character: 0, unit: f.one() }],
        )
    };

    let ram = ExtensionSpec::ramified(&f, 2)?;
    let model = Presentation::over_ramified(&f, 2, 64, vars()).with_relations(&["X*Y - varpi^4"])?;
    println!("ramified quadratic:");
    print!("{}", report_text(&descend_switched(&model, &ram, &swap(&ram))?));

    let unr = ExtensionSpec::unramified(&f, 2)?;
    let model = Presentation::new(&unr.residue, 64, vars()).with_relations(&["X*Y - pi^3"])?;
    println!("\nunramified quadratic:");
    print!("{}", report_text(&descend_switched(&model, &unr, &swap(&unr))?));
    Ok(())
}
