//! Descent followed by base change recovers the original presentation.

use nonarch::descent::{descend, verify_base_change, MonomialAction};
use nonarch::dvr::ExtensionSpec;
use nonarch::field::Field;
use nonarch::presentation::{Presentation, VarKind, VariableDecl};

fn main() -> nonarch::error::Result<()> {
    let f = Field::prime(5)?;
    let ext = ExtensionSpec::unramified(&f, 3)?;
    let vars = vec![VariableDecl::new("A", VarKind::Restricted), VariableDecl::new("B", VarKind::Formal)];
    let pres = Presentation::new(&f, 12, vars).with_relations(&["A^2 + pi*B - 1", "A*B - pi^2"])?;
    let bc = pres.base_change(&ext)?;
    println!("over R':  {bc}");
    let report = descend(&bc, &ext, &MonomialAction::trivial(&ext.residue, 2, 3))?;
    println!("descended: {}", report.surviving);
    println!("base change agrees: {}", verify_base_change(&report.surviving, &ext, &bc, 10)?);
    Ok(())
}
