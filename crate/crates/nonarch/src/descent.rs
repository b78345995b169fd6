//! Monomial Galois actions on presentations, coinvariants, and descent of
//! annulus models along tame extensions.

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::dvr::{DvrElement, ExtensionSpec};
use crate::error::{bail, Error, Result};
use crate::field::{Fe, Field};
use crate::moduli::FractionalAnnulus;
use crate::poly::MPoly;
use crate::presentation::{dilated_weil_restrict, fmt_ratio, remove_pi_torsion, BasisKind, Presentation, VarKind, VariableDecl};
use crate::annulus::AnnulusType;

/// `σ(T_j) = unit · ζ^character · T_target`.
#[derive(Clone, Debug, PartialEq)]
pub struct VarImage {
    pub target: usize,
    pub character: i64,
    pub unit: Fe,
}

/// A monomial (or permuting) action of a cyclic group generated by `σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialAction {
    pub field: Field,
    pub order: u32,
    /// Primitive root of unity the characters refer to.
    pub zeta: Fe,
    /// Its order (1 when there are no characters).
    pub zeta_order: u32,
    pub images: Vec<VarImage>,
}

impl MonomialAction {
    pub fn trivial(field: &Field, nvars: usize, order: u32) -> Self {
        MonomialAction {
            field: field.clone(),
            order,
            zeta: field.one(),
            zeta_order: 1,
            images: (0..nvars).map(|j| VarImage { target: j, character: 0, unit: field.one() }).collect(),
        }
    }

    /// Action for the Galois group of `ext`: `zeta` is the extension's root of unity.
    pub fn for_extension(ext: &ExtensionSpec, images: Vec<VarImage>) -> Self {
        let field = if ext.rho > 1 && ext.r > 1 { ext.residue.clone() } else { ext.base.clone() };
        MonomialAction { field, order: ext.degree(), zeta: ext.zeta.clone(), zeta_order: ext.rho, images }
    }

    /// Total scalar `unit · ζ^character`.
    pub fn factor(&self, j: usize) -> Fe {
        let im = &self.images[j];
        let z = self.field.pow(&self.zeta, im.character.rem_euclid(self.zeta_order.max(1) as i64));
        self.field.mul(&im.unit, &z)
    }

    /// Checks that `σ^order` is the identity on every variable.
    pub fn check_order(&self) -> Result<()> {
        let n = self.images.len();
        for j in 0..n {
            let mut cur = j;
            let mut scal = self.field.one();
            for _ in 0..self.order {
                scal = self.field.mul(&scal, &self.factor(cur));
                cur = self.images[cur].target;
            }
            if cur != j || !self.field.is_one(&scal) {
                bail!(Domain, "action does not have order {} on variable {j}", self.order);
            }
        }
        Ok(())
    }

    pub fn describe(&self, names: &[String]) -> Vec<String> {
        self.images
            .iter()
            .enumerate()
            .map(|(j, im)| {
                let mut coef = Vec::new();
                if !self.field.is_one(&im.unit) {
                    coef.push(self.field.format(&im.unit));
                }
                let c = im.character.rem_euclid(self.zeta_order.max(1) as i64);
                if c != 0 {
                    coef.push(if c == 1 { "zeta".into() } else { format!("zeta^{c}") });
                }
                coef.push(names[im.target].clone());
                format!("sigma({}) = {}", names[j], coef.join("*"))
            })
            .collect()
    }

    pub fn from_json(j: &ActionJson, pres: &Presentation, ext: &ExtensionSpec) -> Result<Self> {
        let field = if ext.rho > 1 && ext.r > 1 { ext.residue.clone() } else { pres.field.clone() };
        let mut images: Vec<Option<VarImage>> = vec![None; pres.nvars()];
        for im in &j.images {
            let Some(src) = pres.var_index(&im.var) else { bail!(Parse, "unknown variable `{}` in action", im.var) };
            let target = match &im.target {
                Some(t) => match pres.var_index(t) {
                    Some(i) => i,
                    None => bail!(Parse, "unknown target `{t}` in action"),
                },
                None => src,
            };
            let unit = match &im.unit {
                Some(u) => field.parse(u)?,
                None => field.one(),
            };
            if field.is_zero(&unit) {
                bail!(Parse, "unit factor for `{}` is zero", im.var);
            }
            images[src] = Some(VarImage { target, character: im.character.unwrap_or(0), unit });
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, im)| im.unwrap_or(VarImage { target: i, character: 0, unit: field.one() }))
            .collect();
        let mut a = MonomialAction::for_extension(ext, images);
        a.field = field;
        if let Some(o) = j.order {
            a.order = o;
        }
        Ok(a)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ImageJson {
    pub var: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

/// `{"images":[{"var":"X","character":1},{"var":"Y","character":2}]}`; a swap is
/// `{"var":"X","target":"Y","unit":"3"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    pub images: Vec<ImageJson>,
}

/// Transports an action on the variables of an `R'`-presentation to the
/// variables of its (dilated) restriction.
pub fn induce_action(restriction: &crate::presentation::RestrictionResult, action: &MonomialAction) -> Result<MonomialAction> {
    let mut cur = action.clone();
    for stage in &restriction.stages {
        let m = stage.degree();
        let mut images = Vec::with_capacity(cur.images.len() * m);
        match &stage.kind {
            BasisKind::Ramified { t, .. } => {
                for im in &cur.images {
                    for i in 0..m {
                        images.push(VarImage { target: im.target * m + i, character: im.character - (*t as i64) * i as i64, unit: im.unit.clone() });
                    }
                }
            }
            BasisKind::Normal { .. } => {
                let base = &stage.field;
                for j in 0..cur.images.len() {
                    let lam = cur.factor(j);
                    if !cur.field.in_prime_field(&lam) {
                        bail!(Unsupported, "unit factor {} is not in the base field; normalize it first", cur.field.format(&lam));
                    }
                    let lam = base.from_int(lam.fin() as i64);
                    for i in 0..m {
                        images.push(VarImage { target: cur.images[j].target * m + (i + 1) % m, character: 0, unit: lam.clone() });
                    }
                }
                cur.field = base.clone();
                cur.zeta = base.one();
                cur.zeta_order = 1;
            }
            _ => bail!(Unsupported, "induced actions need a power basis (ramified) or a normal basis (unramified)"),
        }
        cur.images = images;
    }
    Ok(cur)
}

/// Coinvariants with bookkeeping.
#[derive(Clone, Debug)]
pub struct Coinvariants {
    pub presentation: Presentation,
    pub eliminated: Vec<String>,
    /// `(variable, representative)` pairs identified by the action.
    pub identified: Vec<(String, String)>,
}

/// Quotient by `T − σ(T)`: variables with a nontrivial scalar vanish, permutation
/// cycles collapse onto one representative.
pub fn coinvariants_detailed(pres: &Presentation, action: &MonomialAction) -> Result<Coinvariants> {
    let n = pres.nvars();
    if action.images.len() != n {
        bail!(Domain, "action has {} images for {n} variables", action.images.len());
    }
    let p = pres.field.characteristic();
    if p != 0 && action.zeta_order > 1 && action.zeta_order % p == 0 {
        bail!(Unsupported, "wild action: order divisible by the characteristic");
    }
    let f = &action.field;
    // value[j] = Some((rep, scalar)) means T_j = scalar · T_rep; None means T_j = 0
    let mut value: Vec<Option<(usize, Fe)>> = vec![None; n];
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        let mut cur = action.images[start].target;
        while cur != start {
            if cycle.contains(&cur) || cycle.len() > n {
                bail!(Unsupported, "action is not a permutation of the variables");
            }
            cycle.push(cur);
            cur = action.images[cur].target;
        }
        for &c in &cycle {
            seen[c] = true;
        }
        // T_{π(j)} = λ_j^{-1} T_j along the cycle
        let mut scal = f.one();
        let mut scalars = Vec::new();
        for &c in &cycle {
            scalars.push(scal.clone());
            scal = f.div(&scal, &action.factor(c));
        }
        let survives = f.is_one(&scal);
        for (k, &c) in cycle.iter().enumerate() {
            value[c] = survives.then(|| (start, scalars[k].clone()));
        }
    }
    let reps: Vec<usize> = (0..n).filter(|&j| matches!(&value[j], Some((r, _)) if *r == j)).collect();
    let new_index: BTreeMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let nn = reps.len();
    let base = &pres.field;
    let images: Vec<MPoly> = (0..n)
        .map(|j| match &value[j] {
            None => MPoly::zero(base, nn, pres.prec),
            Some((r, s)) => {
                let s = if base == f { s.clone() } else { base.from_int(s.fin() as i64) };
                MPoly::var(base, nn, new_index[r], pres.prec).scale(&DvrElement::constant(base, &s, pres.prec))
            }
        })
        .collect();
    let mut out = pres.clone();
    out.vars = reps.iter().map(|&r| pres.vars[r].clone()).collect();
    out.relations = pres.relations.iter().map(|r| r.substitute(&images)).collect::<Result<Vec<_>>>()?;
    out.relations.retain(|r| !r.is_zero());
    out.canonicalize();
    let names = pres.names();
    Ok(Coinvariants {
        presentation: out,
        eliminated: (0..n).filter(|&j| value[j].is_none()).map(|j| names[j].clone()).collect(),
        identified: (0..n).filter_map(|j| value[j].as_ref().filter(|(r, _)| *r != j).map(|(r, _)| (names[j].clone(), names[*r].clone()))).collect(),
    })
}

pub fn coinvariants(pres: &Presentation, action: &MonomialAction) -> Result<Presentation> {
    Ok(coinvariants_detailed(pres, action)?.presentation)
}

/// Recognized shape of a descended presentation.
#[derive(Clone, Debug, PartialEq)]
pub enum NormalForm {
    /// `X Y − π^b` with weighted variables; `b = −1` is kept as `π X Y − 1`.
    FractionalAnnulus { x: String, y: String, b: i64, annulus: FractionalAnnulus },
    /// `X_0² − a X_1² − u π^k`.
    Quadric { a: DvrElement, u: DvrElement, exponent: usize },
}

impl NormalForm {
    pub fn describe(&self) -> String {
        match self {
            NormalForm::FractionalAnnulus { annulus, .. } => format!(
                "fractional annulus |pi|^{{{}}} <= |x| <= |pi|^{{{}}} of modulus {}",
                fmt_ratio(annulus.beta),
                fmt_ratio(annulus.alpha),
                fmt_ratio(annulus.modulus())
            ),
            NormalForm::Quadric { a, u, exponent } => {
                format!("quadric X_0^2 - ({})*X_1^2 - ({})*pi^{exponent}", a.format("pi"), u.format("pi"))
            }
        }
    }
}

/// Audit trail of a descent.
#[derive(Clone, Debug)]
pub struct DescentReport {
    pub input: Presentation,
    pub restricted: Presentation,
    pub induced: Vec<String>,
    pub eliminated: Vec<String>,
    pub identified: Vec<(String, String)>,
    pub surviving: Presentation,
    pub flat: bool,
    pub normal_form: Option<NormalForm>,
    /// `Some(true/false)` after a base-change check, `None` when outside the verifiable class.
    pub verified: Option<bool>,
}

/// Reads `X Y − c π^b` (two variables, unit `c`).
pub fn recognize_fractional(pres: &Presentation, kind: AnnulusType) -> Option<NormalForm> {
    if pres.nvars() != 2 || pres.relations.len() != 1 || pres.ram != 1 {
        return None;
    }
    let r = &pres.relations[0];
    if r.len() != 2 {
        return None;
    }
    let xy = r.coeff(&[1, 1]);
    let c = r.coeff(&[0, 0]);
    if xy.terms().len() != 1 || c.terms().len() != 1 {
        return None;
    }
    let b = c.ord()? as i64 - xy.ord()? as i64;
    let (wx, wy) = (pres.vars[0].weight, pres.vars[1].weight);
    let bq = Rational64::from_integer(b);
    Some(NormalForm::FractionalAnnulus {
        x: pres.vars[0].name.clone(),
        y: pres.vars[1].name.clone(),
        b,
        annulus: FractionalAnnulus::new(-wx, bq + wy, kind).ok()?,
    })
}

fn annulus_kind(pres: &Presentation) -> AnnulusType {
    let formal = pres.vars.iter().filter(|v| v.kind == VarKind::Formal).count();
    match formal {
        0 => AnnulusType::Closed,
        f if f == pres.nvars() => AnnulusType::Open,
        _ => AnnulusType::SemiOpen,
    }
}

/// Dilated restriction → induced action → coinvariants → π-torsion removal.
/// The model must live over the ring of integers of the extension.
fn check_model_field(model: &Presentation, ext: &ExtensionSpec) -> Result<()> {
    let want = if ext.r > 1 { &ext.residue } else { &ext.base };
    if model.field.spec() != want.spec() {
        bail!(FieldMismatch, "presentation is over {}, the extension has residue field {}", model.field, want);
    }
    Ok(())
}

pub fn descend(model: &Presentation, ext: &ExtensionSpec, action: &MonomialAction) -> Result<DescentReport> {
    check_model_field(model, ext)?;
    if ext.rho > 1 && ext.r > 1 && num_integer::gcd(ext.rho, ext.r) != 1 {
        bail!(Unsupported, "Galois group of this mixed extension is not generated by one element; descend along a tower");
    }
    action.check_order()?;
    let restriction = dilated_weil_restrict(model, ext)?;
    let induced = induce_action(&restriction, action)?;
    let co = coinvariants_detailed(&restriction.presentation, &induced)?;
    let (flat_pres, flat) = remove_pi_torsion(&co.presentation);
    let kind = annulus_kind(model);
    let normal_form = recognize_fractional(&flat_pres, kind);
    let mut report = DescentReport {
        input: model.clone(),
        restricted: restriction.presentation.clone(),
        induced: induced.describe(&restriction.presentation.names()),
        eliminated: co.eliminated,
        identified: co.identified,
        surviving: flat_pres,
        flat,
        normal_form,
        verified: None,
    };
    report.verified = match verify_base_change(&report.surviving, ext, model, model.prec / 2) {
        Ok(v) => Some(v),
        Err(Error::Unverifiable(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(report)
}

/// Parses an annulus model `X Y − u ϖ^e` over `R'`: returns `(e, u)`.
fn read_annulus_model(model: &Presentation) -> Result<(usize, DvrElement)> {
    if model.nvars() != 2 || model.relations.len() != 1 {
        bail!(Domain, "expected an annulus model with two variables and one relation");
    }
    let r = &model.relations[0];
    let xy = r.coeff(&[1, 1]);
    let c = r.coeff(&[0, 0]);
    if r.len() != 2 || !xy.is_unit() || c.is_zero() {
        bail!(Domain, "relation is not of the form XY - u*pi^e");
    }
    let e = c.ord().expect("nonzero");
    let u = c.div_pi(e)?.div_unit(&xy)?.neg();
    let f = model.field.clone();
    if u.terms().len() != 1 {
        bail!(Unsupported, "only constant units in the annulus relation are supported");
    }
    Ok((e, DvrElement::constant(&f, &u.residue(), model.prec)))
}

/// Square root of a non-square `a0 ∈ k` inside the quadratic residue extension.
fn sqrt_in(kp: &Field, a0: &Fe) -> Result<Fe> {
    for x in kp.elements()? {
        if kp.mul(&x, &x) == *a0 {
            return Ok(x);
        }
    }
    bail!(Domain, "no square root found")
}

/// Descent of an annulus along a quadratic extension by an involution that
/// swaps the branches: `X_0² − a X_1² − u π^{e/ρ}`.
pub fn descend_switched(model: &Presentation, ext: &ExtensionSpec, action: &MonomialAction) -> Result<DescentReport> {
    if ext.degree() != 2 {
        bail!(Domain, "switched descent needs a quadratic extension");
    }
    check_model_field(model, ext)?;
    let base = &ext.base;
    if base.characteristic() == 2 {
        bail!(Unsupported, "residue characteristic 2");
    }
    let kind = annulus_kind(model);
    if kind == AnnulusType::SemiOpen {
        bail!(Domain, "the branches of a semi-open annulus cannot be exchanged by an automorphism");
    }
    let rho = ext.rho as usize;
    let (e, u) = read_annulus_model(model)?;
    if e % rho != 0 {
        bail!(Domain, "e = {e} is odd: no switched form over a ramified quadratic extension");
    }
    let (x, y) = (0usize, 1usize);
    if action.images.len() != 2 || action.images[x].target != y || action.images[y].target != x {
        bail!(Domain, "action does not swap the two variables");
    }
    let kf = &model.field;
    let c = action.field.mul(&action.images[x].unit, &action.field.pow(&action.zeta, action.images[x].character));
    let c_inv_check = action.field.mul(&action.images[y].unit, &action.field.pow(&action.zeta, action.images[y].character));
    if !action.field.is_one(&action.field.mul(&c, &c_inv_check)) {
        bail!(Domain, "swap is not an involution: sigma^2(X) != X");
    }
    if !kf.in_prime_field(&c) && ext.r > 1 {
        bail!(Unsupported, "swap factor must lie in the base field");
    }
    if !u.is_unit() || (ext.r > 1 && !kf.in_prime_field(&u.residue())) {
        bail!(Domain, "relation unit must be a unit of R fixed by the Galois action");
    }
    let prec = model.prec.div_ceil(rho);
    let to_base = |a: &Fe| -> Fe { if base == kf { a.clone() } else { base.from_int(a.fin() as i64) } };
    let uu = DvrElement::constant(base, &base.mul(&to_base(&c), &to_base(&u.residue())), prec);
    let k = e / rho;
    let (a, weight1) = if rho == 2 {
        (DvrElement::pi_power(base, 1, prec), Rational64::new(1, 2))
    } else {
        let a0 = base.elements()?.into_iter().find(|z| !base.is_zero(z) && !base.is_square(z)).expect("non-square exists");
        (DvrElement::constant(base, &a0, prec), Rational64::from_integer(0))
    };
    let vk = if kind == AnnulusType::Open { VarKind::Formal } else { VarKind::Restricted };
    let vars = vec![VariableDecl::new("X_0", vk), VariableDecl::weighted("X_1", vk, weight1)];
    let mut out = Presentation::new(base, prec, vars);
    let rel = MPoly::from_terms(
        base,
        2,
        prec,
        [
            (vec![2, 0], DvrElement::one(base, prec)),
            (vec![0, 2], a.neg()),
            (vec![0, 0], uu.mul(&DvrElement::pi_power(base, k, prec)).neg()),
        ],
    );
    out.relations.push(rel);
    let names = model.names();
    let mut report = DescentReport {
        input: model.clone(),
        restricted: out.clone(),
        induced: action.describe(&names),
        eliminated: Vec::new(),
        identified: Vec::new(),
        surviving: out.clone(),
        flat: true,
        normal_form: Some(NormalForm::Quadric { a, u: uu, exponent: k }),
        verified: None,
    };
    report.verified = Some(verify_base_change(&out, ext, model, model.prec / 2)?);
    Ok(report)
}

/// Coefficientwise equality, demanding that every coefficient is known to `n` digits.
fn relation_terms_agree(s: &MPoly, d: &MPoly, n: usize) -> Result<bool> {
    let known = s.terms().chain(d.terms()).map(|(_, c)| c.prec()).min().unwrap_or(usize::MAX);
    if known < n {
        bail!(Precision, "relations are only known to {known} digits, {n} requested");
    }
    Ok(s.agrees(d))
}

/// Checks `descended ⊗ R' ≅ original` through the explicit coordinate changes
/// for fractional annuli, switched quadrics and renamed base changes, to
/// precision `n` (in digits of `R'`).
pub fn verify_base_change(descended: &Presentation, ext: &ExtensionSpec, original: &Presentation, n: usize) -> Result<bool> {
    let rho = ext.rho as usize;
    let bc = descended.base_change(ext)?;
    let kp = &bc.field;
    let prec = bc.prec;
    // switched quadric
    let model = read_annulus_model(original).ok();
    let is_quadric = |p: &Presentation| {
        p.nvars() == 2
            && p.relations.len() == 1
            && p.relations[0].coeff(&[2, 0]).is_unit()
            && p.relations[0].terms().all(|(m, _)| matches!(m.as_slice(), [2, 0] | [0, 2] | [0, 0]))
    };
    if let (Some((e, u)), true) = (&model, is_quadric(descended)) {
        let (e, u) = (*e, u.clone());
        let d = &bc.relations[0];
        let cst = d.coeff(&[0, 0]);
        let Some(k) = cst.ord() else { return Ok(false) };
        if k != e {
            return Ok(false);
        }
        let w = cst.div_pi(k)?.neg();
        let a = d.coeff(&[0, 2]).neg();
        let s = if rho == 2 {
            DvrElement::pi_power(kp, 1, prec)
        } else {
            let a0 = a.residue();
            DvrElement::constant(kp, &sqrt_in(kp, &a0)?, prec)
        };
        if !s.mul(&s).agrees(&a) {
            bail!(Unverifiable, "square root of the quadric coefficient is not in R'");
        }
        let lam = u.with_prec(prec).div_unit(&w.with_prec(prec))?;
        let x0 = MPoly::var(kp, 2, 0, prec);
        let x1 = MPoly::var(kp, 2, 1, prec);
        let img_x = x0.add(&x1.scale(&s));
        let img_y = x0.sub(&x1.scale(&s)).scale(&lam);
        let orig = &original.relations[0];
        let orig = orig.map_coeffs(|c| DvrElement::from_terms(kp, &c.terms(), c.prec()));
        let sub = orig.substitute(&[img_x, img_y])?;
        return relation_terms_agree(&sub, &d.scale(&lam), n);
    }
    // fractional annulus
    if let (Some((e, u)), Some(NormalForm::FractionalAnnulus { b, .. })) = (&model, recognize_fractional(descended, annulus_kind(descended))) {
        let (e, u) = (*e, u.clone());
        let wx = descended.vars[0].weight * Rational64::from_integer(rho as i64);
        let wy = descended.vars[1].weight * Rational64::from_integer(rho as i64);
        if !wx.is_integer() || !wy.is_integer() {
            bail!(Unverifiable, "weights are not compatible with the extension");
        }
        let (ax, ay) = (wx.to_integer() as usize, wy.to_integer() as usize);
        if (ax + ay) as i64 + rho as i64 * b != e as i64 {
            return Ok(false);
        }
        let d = &bc.relations[0];
        let (dxy, dc) = (d.coeff(&[1, 1]), d.coeff(&[0, 0]));
        let (Some(oxy), Some(oc)) = (dxy.ord(), dc.ord()) else { return Ok(false) };
        // the relation is π^s (d X Y − c π^b); the common power is dropped
        let unit_d = dxy.div_pi(oxy)?;
        let unit_c = dc.div_pi(oc)?.neg();
        let d = &d.map_coeffs(|c| c.div_pi_unchecked(oxy.min(oc)));
        // X ↦ ϖ^{a_x} X_α, Y ↦ (u d / c) ϖ^{a_y} Y_β
        let scale_y = u.with_prec(prec).mul(&unit_d).div_unit(&unit_c)?;
        let img_x = MPoly::var(kp, 2, 0, prec).scale(&DvrElement::pi_power(kp, ax, prec));
        let img_y = MPoly::var(kp, 2, 1, prec).scale(&DvrElement::pi_power(kp, ay, prec).mul(&scale_y));
        let orig = original.relations[0].map_coeffs(|c| DvrElement::from_terms(kp, &c.terms(), c.prec()));
        let sub = orig.substitute(&[img_x, img_y])?;
        let factor = DvrElement::pi_power(kp, e - rho * b.max(0) as usize, prec).mul(&u.with_prec(prec)).div_unit(&unit_c)?;
        return relation_terms_agree(&sub, &d.scale(&factor), n);
    }
    // renamed base change
    if descended.nvars() == original.nvars() && descended.vars.iter().zip(&original.vars).all(|(a, b)| a.kind == b.kind && *a.weight.numer() == 0) {
        let mut lhs = bc.renamed(&original.names());
        let mut rhs = original.clone();
        lhs.canonicalize();
        rhs.canonicalize();
        if lhs.relations.len() == rhs.relations.len() && lhs.relations.iter().zip(&rhs.relations).all(|(a, b)| a.agrees(b)) {
            return Ok(true);
        }
        bail!(Unverifiable, "relations differ by more than a renaming");
    }
    bail!(Unverifiable, "presentation outside the library of explicit coordinate changes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus_model(f: &Field, rho: usize, e: usize, kind: VarKind) -> Presentation {
        Presentation::over_ramified(f, rho, 40, vec![VariableDecl::new("X", kind), VariableDecl::new("Y", kind)])
            .with_relations(&[&format!("X*Y - varpi^{e}")])
            .unwrap()
    }

    #[test]
    fn fractional_descent_relation() {
        let f = Field::prime(7).unwrap();
        let ext = ExtensionSpec::ramified(&f, 3).unwrap();
        // e = 4 = 1 + 3: α = 1, β = 0 gives X_1 Y_0 - π
        let model = annulus_model(&f, 3, 4, VarKind::Restricted);
        let act = MonomialAction::for_extension(
            &ext,
            vec![VarImage { target: 0, character: 1, unit: f.one() }, VarImage { target: 1, character: 0, unit: f.one() }],
        );
        let rep = descend(&model, &ext, &act).unwrap();
        assert_eq!(rep.surviving.names(), vec!["X_1", "Y_0"]);
        assert_eq!(rep.surviving.format_poly(&rep.surviving.relations[0]), "X_1*Y_0 + 6*pi");
        assert_eq!(rep.verified, Some(true));
        // α = 2, β = 2: α+β = 4 = 3 + 1, relation π X_2 Y_2 − π flattens to X_2 Y_2 − 1
        let act = MonomialAction::for_extension(
            &ext,
            vec![VarImage { target: 0, character: 2, unit: f.one() }, VarImage { target: 1, character: 2, unit: f.one() }],
        );
        let rep = descend(&model, &ext, &act).unwrap();
        assert!(rep.flat);
        assert_eq!(rep.surviving.format_poly(&rep.surviving.relations[0]), "X_2*Y_2 + 6");
    }

    #[test]
    fn base_change_roundtrip_unramified() {
        let f = Field::prime(5).unwrap();
        let vars = vec![VariableDecl::new("A", VarKind::Restricted), VariableDecl::new("B", VarKind::Formal)];
        let pres = Presentation::new(&f, 12, vars).with_relations(&["A^2 + pi*B - 1"]).unwrap();
        let ext = ExtensionSpec::unramified(&f, 3).unwrap();
        let bc = pres.base_change(&ext).unwrap();
        let act = MonomialAction::trivial(&ext.residue, 2, 3);
        let rep = descend(&bc, &ext, &act).unwrap();
        assert_eq!(rep.surviving.nvars(), 2);
        assert_eq!(rep.verified, Some(true));
    }

    #[test]
    fn switched_quadrics() {
        let f = Field::prime(7).unwrap();
        let ext = ExtensionSpec::ramified(&f, 2).unwrap();
        let model = annulus_model(&f, 2, 4, VarKind::Formal);
        let swap = MonomialAction::for_extension(
            &ext,
            vec![VarImage { target: 1, character: 0, unit: f.one() }, VarImage { target: 0, character: 0, unit: f.one() }],
        );
        let rep = descend_switched(&model, &ext, &swap).unwrap();
        assert_eq!(rep.verified, Some(true));
        assert_eq!(rep.surviving.format_poly(&rep.surviving.relations[0]), "X_0^2 + 6*pi*X_1^2 + 6*pi^2");
        let odd = annulus_model(&f, 2, 3, VarKind::Formal);
        assert!(descend_switched(&odd, &ext, &swap).is_err());

        let unr = ExtensionSpec::unramified(&f, 2).unwrap();
        let m = Presentation::new(&unr.residue, 40, vec![VariableDecl::new("X", VarKind::Restricted), VariableDecl::new("Y", VarKind::Restricted)])
            .with_relations(&["X*Y - pi^3"])
            .unwrap();
        let swap = MonomialAction::for_extension(
            &unr,
            vec![VarImage { target: 1, character: 0, unit: f.one() }, VarImage { target: 0, character: 0, unit: f.one() }],
        );
        let rep = descend_switched(&m, &unr, &swap).unwrap();
        assert_eq!(rep.verified, Some(true));
    }
}
