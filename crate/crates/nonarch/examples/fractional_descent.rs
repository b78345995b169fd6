//! Descends the annulus XY = varpi^4 along a tame totally ramified extension of
//! degree 3 under a diagonal action and reads off the fractional annulus.

use nonarch::cli::report_text;
use nonarch::descent::{descend, MonomialAction, VarImage};
use nonarch::dvr::ExtensionSpec;
use nonarch::field::Field;
use nonarch::presentation::{Presentation, VarKind, VariableDecl};

fn main() -> nonarch::error::Result<()> {
    let f = Field::prime(7)?;
    let ext = ExtensionSpec::ramified(&f, 3)?;
    let model = Presentation::over_ramified(&f, 3, 40, vec![VariableDecl::new("X", VarKind::Restricted), VariableDecl::new("Y", VarKind::Restricted)])
        .with_relations(&["X*Y - varpi^4"])?;
    for (cx, cy) in [(1, 0), (0, 1), (2, 2)] {
        let act = MonomialAction::for_extension(
            &ext,
            vec![VarImage { target: 0, character: cx, unit: f.one() }, VarImage { target: 1, character: cy, unit: f.one() }],
        );
        println!("characters ({cx}, {cy}):");
        print!("{}", report_text(&descend(&model, &ext, &act)?));
        println!();
    }
    Ok(())
}
