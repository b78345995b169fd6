//! Weil restriction of the unit disc along Q(sqrt 7)/Q given by a basis table,
//! and the dilated restriction of an annulus along a ramified extension.

use nonarch::dvr::{DvrElement, ExtensionSpec};
use nonarch::field::Field;
use nonarch::presentation::{dilated_weil_restrict, weil_restrict, BasisData, Presentation, VarKind, VariableDecl};

fn main() -> nonarch::error::Result<()> {
    let q = Field::rationals();
    let prec = 16;
    let c = |n: i64| DvrElement::from_int(&q, n, prec);
    // s^2 = 7
    let table = vec![vec![vec![c(1), c(0)], vec![c(0), c(1)]], vec![vec![c(0), c(1)], vec![c(7), c(0)]]];
    let basis = BasisData::table(&q, vec!["1".into(), "s".into()], table, vec![false, false], None, prec)?;
    let disc = Presentation::new(&q, prec, vec![VariableDecl::new("X", VarKind::Restricted)]);
    let res = weil_restrict(&disc, &basis)?;
    let names = ["x_0".to_string(), "x_1".to_string()];
    println!("{} -> {}", disc, res.presentation);
    for (i, p) in res.charpoly.iter().enumerate() {
        println!("  charpoly c_{i} = {}", p.format(&names, "pi"));
    }

    let f = Field::prime(7)?;
    let ext = ExtensionSpec::ramified(&f, 2)?;
    let ann = Presentation::over_ramified(&f, 2, 32, vec![VariableDecl::new("X", VarKind::Restricted), VariableDecl::new("Y", VarKind::Restricted)])
        .with_relations(&["X*Y - varpi^5"])?;
    let res = dilated_weil_restrict(&ann, &ext)?;
    println!("{} -> {}", ann, res.presentation);
    Ok(())
}
