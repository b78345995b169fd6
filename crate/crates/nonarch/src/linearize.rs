//! Tame finite-order automorphisms of annuli and their linearization.
//!
//! An automorphism is semilinear: `σ(π) = ζπ`, `σ` acts on `k` by a power of
//! Frobenius, and `σ(X)`, `σ(Y)` are given as Laurent functions.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::annulus::{AnnulusType, LaurentFunction, LaurentJson};
use crate::dvr::{DvrElement, DvrJson};
use crate::error::{bail, Result};
use crate::field::{Fe, Field, FieldSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchBehavior {
    Fixes,
    Switches,
}

#[derive(Clone, Debug)]
pub struct AnnulusAutomorphism {
    pub sigma_x: LaurentFunction,
    pub sigma_y: LaurentFunction,
    pub order: u32,
    /// `σ(π) = ζπ`.
    pub zeta: Fe,
    /// `σ(c) = c^{p^frob}` on the residue field.
    pub frob: u32,
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// The same function with the roles of `X` and `Y` exchanged.
pub fn mirror(f: &LaurentFunction) -> LaurentFunction {
    let mut a = f.b_coeffs().to_vec();
    a[0] = f.a(0).clone();
    LaurentFunction::from_parts(f.field(), f.e(), f.kind(), a, f.a_coeffs().to_vec(), f.tail_y(), f.tail_x())
}

/// Largest `n` with `f ≡ g mod π^n` on every coefficient and on the tails.
pub fn agreement_level(f: &LaurentFunction, g: &LaurentFunction) -> usize {
    let d = f.sub(g);
    let coeffs = d.a_coeffs().iter().chain(d.b_coeffs().iter().skip(1));
    let mut level = coeffs.map(|c| c.ord_or_prec()).min().unwrap_or(usize::MAX);
    if let Some(t) = min_opt(d.tail_x(), d.tail_y()) {
        level = level.min(t);
    }
    level
}

impl AnnulusAutomorphism {
    pub fn new(sigma_x: LaurentFunction, sigma_y: LaurentFunction, order: u32, zeta: Fe, frob: u32) -> Result<Self> {
        if sigma_x.e() != sigma_y.e() || sigma_x.kind() != sigma_y.kind() || sigma_x.field() != sigma_y.field() {
            bail!(Domain, "images of X and Y live on different annuli");
        }
        if order == 0 {
            bail!(Domain, "order must be positive");
        }
        Ok(AnnulusAutomorphism { sigma_x, sigma_y, order, zeta, frob })
    }

    /// `σ(X) = cX`, `σ(Y) = ζ^e c^{-1} Y`.
    pub fn linear(like: &LaurentFunction, order: u32, zeta: &Fe, frob: u32, c: &Fe) -> Result<Self> {
        let f = like.field();
        let prec = like.working_prec();
        let Some(ci) = f.inv(c) else { bail!(Domain, "scalar must be nonzero") };
        let x = LaurentFunction::monomial(f, like.e(), like.kind(), like.trunc(), prec, 1);
        let y = LaurentFunction::monomial(f, like.e(), like.kind(), like.trunc(), prec, -1);
        let sy = f.mul(&f.pow(zeta, like.e() as i64), &ci);
        Self::new(
            x.scale(&DvrElement::constant(f, c, prec)),
            y.scale(&DvrElement::constant(f, &sy, prec)),
            order,
            zeta.clone(),
            frob,
        )
    }

    /// `σ(X) = cY`, `σ(Y) = ζ^e c^{-1} X`.
    pub fn swap(like: &LaurentFunction, zeta: &Fe, frob: u32, c: &Fe) -> Result<Self> {
        let a = Self::linear(like, 2, zeta, frob, c)?;
        let f = like.field();
        let prec = like.working_prec();
        let x = LaurentFunction::monomial(f, like.e(), like.kind(), like.trunc(), prec, 1);
        let y = LaurentFunction::monomial(f, like.e(), like.kind(), like.trunc(), prec, -1);
        Self::new(y.scale(a.sigma_x.a(1)), x.scale(a.sigma_y.b(1)), 2, zeta.clone(), frob)
    }

    pub fn field(&self) -> &Field {
        self.sigma_x.field()
    }

    /// Conjugate by the coordinate swap `X ↔ Y` (open and closed annuli).
    pub fn mirrored(&self) -> Result<Self> {
        if self.sigma_x.kind() == AnnulusType::SemiOpen {
            bail!(Domain, "a semi-open annulus has no coordinate swap");
        }
        Self::new(mirror(&self.sigma_y), mirror(&self.sigma_x), self.order, self.zeta.clone(), self.frob)
    }

    /// Conjugate `ψ σ ψ^{-1}` by the translation `ψ(X) = X + c`, `ord c > e`.
    pub fn conjugate_translation(&self, c: &DvrElement) -> Result<Self> {
        let like = &self.sigma_x;
        let (f, e, kind, d) = (like.field().clone(), like.e(), like.kind(), like.trunc().min(self.sigma_y.trunc()));
        let prec = like.working_prec();
        if c.ord().is_some_and(|o| o <= e) {
            bail!(Domain, "translation must have order > e");
        }
        let c = c.with_prec(prec);
        let cp = c.div_pi(e)?;
        let binom = |n: u64, r: u64| f.from_bigint(&num_bigint::BigInt::from(num_integer::binomial(n as u128, r as u128)));
        let series_len = |x: &DvrElement| match x.ord() {
            Some(o) if o > 0 => prec / o + 1,
            Some(_) => unreachable!("translation quotient has positive order"),
            None => 0,
        };
        let canon = |raw: &[(usize, usize, DvrElement)]| LaurentFunction::reduce_to_canonical(&f, e, kind, d, prec, raw);
        // ψ(X)^i = (X + c)^i and ψ(Y)^j = Y^j (1 + c' Y)^{-j} with c' = c / π^e
        let px: Vec<LaurentFunction> = (0..=d as u64)
            .map(|i| canon(&(0..=i).map(|r| (r as usize, 0, c.pow(i - r).scale(&binom(i, r)))).collect::<Vec<_>>()))
            .collect();
        let py: Vec<LaurentFunction> = (0..=d as u64)
            .map(|j| {
                if j == 0 {
                    return canon(&[(0, 0, DvrElement::one(&f, prec))]);
                }
                let raw: Vec<_> = (0..=series_len(&cp) as u64)
                    .map(|r| {
                        let sign = if r % 2 == 1 { f.from_int(-1) } else { f.one() };
                        (0, (j + r) as usize, cp.pow(r).scale(&f.mul(&sign, &binom(j + r - 1, r))))
                    })
                    .collect();
                canon(&raw)
            })
            .collect();
        let psi = Self::new(px[1].clone(), py[1].clone(), 1, f.one(), 0)?;
        let ap_psi = Applier::from_tables(&psi, px, py);
        let ap = Applier::new(self);
        // ψ^{-1}(X) = X − c, ψ^{-1}(Y) = Σ c'^r Y^{r+1}
        let inv_y = canon(&(0..=series_len(&cp)).map(|r| (0, r + 1, cp.pow(r as u64))).collect::<Vec<_>>());
        let sx = self.sigma_x.sub(&self.sigma_x.constant_like(&self.act_on_constant(&c)));
        let sy = ap.apply(&inv_y)?;
        Self::new(ap_psi.apply(&sx)?, ap_psi.apply(&sy)?, self.order, self.zeta.clone(), self.frob)
    }

    /// `σ` on a constant of `R`.
    pub fn act_on_constant(&self, c: &DvrElement) -> DvrElement {
        c.galois_act(self.frob, &self.zeta)
    }

    /// `σ(X) σ(Y) = ζ^e π^e` to precision `n`.
    pub fn check_relation(&self, n: usize) -> Result<()> {
        let f = self.field();
        let e = self.sigma_x.e();
        let prod = self.sigma_x.mul(&self.sigma_y);
        let c = DvrElement::pi_power(f, e, prod.working_prec()).scale(&f.pow(&self.zeta, e as i64));
        let level = agreement_level(&prod, &prod.constant_like(&c));
        if level < n {
            bail!(Domain, "sigma(X)*sigma(Y) differs from zeta^e*pi^e at order {level}");
        }
        Ok(())
    }

    /// `σ^order` fixes `X` and `Y` to precision `n`.
    pub fn check_order(&self, n: usize) -> Result<()> {
        let ap = Applier::new(self);
        let (mut x, mut y) = (self.sigma_x.clone(), self.sigma_y.clone());
        for _ in 1..self.order {
            x = ap.apply(&x)?;
            y = ap.apply(&y)?;
        }
        let like = &self.sigma_x;
        let prec = like.working_prec();
        let mx = LaurentFunction::monomial(like.field(), like.e(), like.kind(), like.trunc(), prec, 1);
        let my = LaurentFunction::monomial(like.field(), like.e(), like.kind(), like.trunc(), prec, -1);
        let level = agreement_level(&x, &mx).min(agreement_level(&y, &my));
        if level < n {
            bail!(Domain, "sigma^{} is not the identity beyond order {level}", self.order);
        }
        Ok(())
    }

    pub fn to_json(&self) -> AutomorphismJson {
        AutomorphismJson {
            field: Some(self.field().spec()),
            sigma_x: SideJson::Full(self.sigma_x.to_json()),
            sigma_y: SideJson::Full(self.sigma_y.to_json()),
            e: None,
            kind: None,
            trunc: None,
            prec: None,
            order: self.order,
            zeta: Some(self.field().format(&self.zeta)),
            frob: Some(self.frob),
        }
    }

    pub fn from_json(j: &AutomorphismJson, default_field: &Field, default_trunc: usize, default_prec: usize) -> Result<Self> {
        let field = match &j.field {
            Some(s) => Field::from_spec(s)?,
            None => default_field.clone(),
        };
        let trunc = j.trunc.unwrap_or(default_trunc);
        let prec = j.prec.unwrap_or(default_prec);
        let side = |s: &SideJson| -> Result<LaurentFunction> {
            match s {
                SideJson::Expr(t) => {
                    let (Some(e), Some(kind)) = (j.e, j.kind) else {
                        bail!(Parse, "expression images need `e` and `type`");
                    };
                    LaurentFunction::parse(&field, e, kind, trunc, prec, t)
                }
                SideJson::Full(l) => {
                    let mut l = l.clone();
                    if l.field.is_none() {
                        l.field = Some(field.spec());
                    }
                    LaurentFunction::from_json(&l, &field, trunc, prec)
                }
            }
        };
        let zeta = match &j.zeta {
            Some(z) => field.parse(z)?,
            None => field.one(),
        };
        Self::new(side(&j.sigma_x)?, side(&j.sigma_y)?, j.order, zeta, j.frob.unwrap_or(0))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SideJson {
    Expr(String),
    Full(LaurentJson),
}

/// `{"e":3,"type":"closed","order":3,"zeta":"2","sigma_x":"2*X + 2*pi*X*Y","sigma_y":"..."}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutomorphismJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<usize>,
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    pub kind: Option<AnnulusType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<usize>,
    pub sigma_x: SideJson,
    pub sigma_y: SideJson,
    pub order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frob: Option<u32>,
}

/// Substitution `X ↦ σ(X)`, `Y ↦ σ(Y)` with cached power tables.
pub struct Applier<'a> {
    aut: &'a AnnulusAutomorphism,
    px: Vec<LaurentFunction>,
    py: Vec<LaurentFunction>,
}

impl<'a> Applier<'a> {
    pub fn new(aut: &'a AnnulusAutomorphism) -> Self {
        let d = aut.sigma_x.trunc().min(aut.sigma_y.trunc());
        let like = aut.sigma_x.truncate(d);
        let one = LaurentFunction::one(like.field(), like.e(), like.kind(), d, like.working_prec());
        let table = |s: &LaurentFunction| {
            let s = s.truncate(d);
            let mut t = vec![one.clone()];
            for i in 1..=d {
                let next = t[i - 1].mul(&s);
                t.push(next);
            }
            t
        };
        Applier { aut, px: table(&aut.sigma_x), py: table(&aut.sigma_y) }
    }

    /// Uses precomputed images of the monomials `X^i` and `Y^j`.
    pub fn from_tables(aut: &'a AnnulusAutomorphism, px: Vec<LaurentFunction>, py: Vec<LaurentFunction>) -> Self {
        Applier { aut, px, py }
    }

    pub fn apply(&self, f: &LaurentFunction) -> Result<LaurentFunction> {
        let g = &self.aut.sigma_x;
        if f.e() != g.e() || f.field() != g.field() {
            bail!(Domain, "function and automorphism live on different annuli");
        }
        let d = f.trunc().min(self.px.len() - 1);
        let f = f.truncate(d);
        let work = f.working_prec();
        let mut acc = LaurentFunction::zero(f.field(), f.e(), f.kind(), d, work);
        let skip = |c: &DvrElement| c.is_zero() && c.prec() >= work;
        for i in 0..=d {
            let c = f.a(i);
            if !skip(c) {
                acc = acc.add(&self.px[i].truncate(d).scale(&self.aut.act_on_constant(c)));
            }
        }
        for j in 1..=d {
            let c = f.b(j);
            if !skip(c) {
                acc = acc.add(&self.py[j].truncate(d).scale(&self.aut.act_on_constant(c)));
            }
        }
        // dropped terms are integral multiples of π^{tail}
        if let Some(t) = min_opt(f.tail_x(), f.tail_y()) {
            acc = acc.with_prec(t);
            acc = acc.with_tails(min_opt(acc.tail_x(), Some(t)), min_opt(acc.tail_y(), Some(t)));
        }
        Ok(acc)
    }
}

pub fn apply(aut: &AnnulusAutomorphism, f: &LaurentFunction) -> Result<LaurentFunction> {
    Applier::new(aut).apply(f)
}

/// Fixes iff `σ(X)` has the boundary profile of `X`, switches iff it has the profile of `Y`.
pub fn classify_branches(aut: &AnnulusAutomorphism) -> Result<BranchBehavior> {
    let s = &aut.sigma_x;
    if s.is_zero() {
        bail!(Domain, "sigma(X) vanishes at retained precision");
    }
    let bd = s.boundary_valuations()?;
    let e = s.e() as i64;
    if bd.eta_x == 0 && bd.v_x == 1 && bd.nu_x.is_none_or(|n| n == 1) {
        return Ok(BranchBehavior::Fixes);
    }
    if bd.eta_x == e && bd.v_x == -1 && bd.nu_x.is_none_or(|n| n == -1) {
        if s.kind() == AnnulusType::SemiOpen {
            bail!(Domain, "the boundary sides of a semi-open annulus cannot be exchanged by an automorphism");
        }
        return Ok(BranchBehavior::Switches);
    }
    bail!(Domain, "sigma(X) has neither the profile of X nor of Y (eta = {}, v = {})", bd.eta_x, bd.v_x)
}

#[derive(Clone, Debug)]
pub struct LinearizationCertificate {
    pub branch: BranchBehavior,
    pub new_x: LaurentFunction,
    pub new_y: LaurentFunction,
    pub u: DvrElement,
    pub verified_to_precision: usize,
    /// Whether `u` was brought to the normal form (a root of unity, or 1).
    pub normalized: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub branch: BranchBehavior,
    pub new_x: LaurentJson,
    pub new_y: LaurentJson,
    pub u: DvrJson,
    pub verified_to_precision: usize,
    pub normalized: bool,
    pub notes: Vec<String>,
}

impl LinearizationCertificate {
    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            branch: self.branch,
            new_x: self.new_x.to_json(),
            new_y: self.new_y.to_json(),
            u: self.u.to_json(),
            verified_to_precision: self.verified_to_precision,
            normalized: self.normalized,
            notes: self.notes.clone(),
        }
    }
}

/// Recomputes the certificate identities; returns the precision they hold to.
pub fn verify_certificate(aut: &AnnulusAutomorphism, cert: &LinearizationCertificate) -> Result<usize> {
    verify_with(&Applier::new(aut), aut, cert)
}

fn verify_with(ap: &Applier, aut: &AnnulusAutomorphism, cert: &LinearizationCertificate) -> Result<usize> {
    let f = aut.field();
    let e = aut.sigma_x.e();
    let sx = ap.apply(&cert.new_x)?;
    let sy = ap.apply(&cert.new_y)?;
    // new_x / X must be a unit for the pair to be a coordinate change
    let ratio = cert.new_x.mul_monomial(-1).div_pi(e)?;
    if !ratio.is_unit() {
        bail!(Domain, "new X is not a unit multiple of X");
    }
    let level = match cert.branch {
        BranchBehavior::Fixes => {
            let zu = cert.u.invert_unit()?.scale(&f.pow(&aut.zeta, e as i64));
            agreement_level(&sx, &cert.new_x.scale(&cert.u)).min(agreement_level(&sy, &cert.new_y.scale(&zu)))
        }
        BranchBehavior::Switches => {
            let prod = cert.new_x.mul(&cert.new_y);
            let target = prod.constant_like(&cert.u.mul(&DvrElement::pi_power(f, e, prod.working_prec())));
            let su = aut.act_on_constant(&cert.u);
            let inv = su.sub(&cert.u).ord_or_prec();
            agreement_level(&sx, &cert.new_y).min(agreement_level(&sy, &cert.new_x)).min(agreement_level(&prod, &target)).min(inv)
        }
    };
    Ok(level)
}

fn residual_order(field: &Field, frob: u32) -> u32 {
    let d = field.degree();
    if frob % d == 0 {
        1
    } else {
        d / frob.gcd(&d)
    }
}

/// Linearizes a branch-fixing automorphism: a Laurent pair `(X', Y')` with
/// `σ(X') = uX'`, `σ(Y') = ζ^e u^{-1} Y'`, verified to precision `n`.
pub fn linearize_fixed(aut: &AnnulusAutomorphism, n: usize) -> Result<LinearizationCertificate> {
    let f = aut.field().clone();
    let m = aut.order;
    let p = f.characteristic();
    if p != 0 && m % p == 0 {
        bail!(Unsupported, "wild automorphism: order {m} divisible by the characteristic");
    }
    if classify_branches(aut)? != BranchBehavior::Fixes {
        bail!(Domain, "automorphism switches the branches; use the switched linearization");
    }
    if !f.is_one(&f.pow(&aut.zeta, m as i64)) {
        bail!(Domain, "zeta^{m} != 1");
    }
    let e = aut.sigma_x.e();
    let like = &aut.sigma_x;
    let prec = like.working_prec();
    let d = residual_order(&f, aut.frob);
    if m % d != 0 {
        bail!(Domain, "residual action has order {d}, not dividing {m}");
    }
    // σ(X) = X U_1 with U_1 a unit
    let u1 = like.mul_monomial(-1).div_pi(e)?;
    if !u1.is_unit() {
        bail!(Domain, "sigma(X)/X is not a unit");
    }
    let ub = u1.a(0).residue();
    let mut notes = Vec::new();
    // pick u in the fixed field with N(u) = N(ub) and u^m = 1, then c with σ(c) ub / c = u
    let (u, c) = if d == 1 {
        (ub.clone(), f.one())
    } else {
        let nrm = f.norm(&ub, aut.frob, d);
        let fixed = |x: &Fe| f.frobenius(x, aut.frob) == *x;
        let good = |x: &Fe| fixed(x) && f.pow(x, d as i64) == nrm && f.is_one(&f.pow(x, m as i64));
        let u = if good(&f.one()) {
            f.one()
        } else {
            match f.elements()?.into_iter().find(|x| !f.is_zero(x) && good(x)) {
                Some(x) => x,
                None => bail!(Unsupported, "no root of unity in the fixed field matches the residual norm"),
            }
        };
        let c = f.hilbert90(&f.div(&ub, &u), aut.frob, d)?;
        notes.push(format!("residual normalization by c = {}", f.format(&c)));
        (u, c)
    };
    let zeta_order = f.multiplicative_order(&aut.zeta).unwrap_or(0);
    let normalized = if zeta_order == m as u64 {
        true
    } else if f.is_one(&aut.zeta) {
        if !f.is_one(&u) {
            notes.push("zeta = 1 but u could not be normalized to 1: the residual action has smaller order than sigma".into());
        }
        f.is_one(&u)
    } else {
        notes.push(format!("zeta has intermediate order {zeta_order}; u left unnormalized"));
        false
    };
    let ap = Applier::new(aut);
    let x = LaurentFunction::monomial(&f, e, like.kind(), like.trunc(), prec, 1);
    let xt = x.scale(&DvrElement::constant(&f, &c, prec));
    // X' = m^{-1} Σ u^{-k} σ^k(X̃)
    let uinv = f.inv(&u).expect("unit");
    let mut cur = xt.clone();
    let mut acc = xt.clone();
    for k in 1..m {
        cur = ap.apply(&cur)?;
        acc = acc.add(&cur.scale(&DvrElement::constant(&f, &f.pow(&uinv, k as i64), prec)));
    }
    let minv = f.inv(&f.from_int(m as i64)).expect("tame order");
    let acc = acc.scale(&DvrElement::constant(&f, &minv, prec));
    let eta = acc.mul_monomial(-1).div_pi(e)?;
    if eta.a(0).residue() != c || !eta.is_unit() {
        bail!(Domain, "averaged coordinate is not a unit multiple of X");
    }
    let new_y = eta.invert_unit()?.mul_monomial(-1);
    let mut cert = LinearizationCertificate {
        branch: BranchBehavior::Fixes,
        new_x: acc,
        new_y,
        u: DvrElement::constant(&f, &u, prec),
        verified_to_precision: 0,
        normalized,
        notes,
    };
    cert.verified_to_precision = verify_with(&ap, aut, &cert)?;
    if cert.verified_to_precision < n {
        bail!(Precision, "certificate only verifies to order {} (requested {n})", cert.verified_to_precision);
    }
    Ok(cert)
}

/// `(i, k, digit)` of the nonzero digits of `f` below order `n`; `i < 0` is the `Y` side.
fn digits_below(f: &LaurentFunction, n: usize) -> Vec<(i64, usize, Fe)> {
    let mut out = Vec::new();
    for i in 0..=f.trunc() {
        for (k, c) in f.a(i).terms() {
            if k < n {
                out.push((i as i64, k, c));
            }
        }
        if i > 0 {
            for (k, c) in f.b(i).terms() {
                if k < n {
                    out.push((-(i as i64), k, c));
                }
            }
        }
    }
    out
}

fn level(i: i64, k: usize) -> usize {
    2 * k + i.unsigned_abs() as usize
}

/// Normal form of a branch-switching involution: `σ(X') = Y'`, `σ(Y') = X'`,
/// `X'Y' = uπ^e` with `σ(u) = u`, by successive approximation on the
/// filtration where `π^k X^i` has level `2k + |i|`.
pub fn linearize_switched(aut: &AnnulusAutomorphism, n: usize) -> Result<LinearizationCertificate> {
    let f = aut.field().clone();
    if aut.order != 2 {
        bail!(Domain, "branch-switching automorphisms handled here have order 2, got {}", aut.order);
    }
    if f.characteristic() == 2 {
        bail!(Unsupported, "residue characteristic 2");
    }
    let like = &aut.sigma_x;
    if like.kind() == AnnulusType::SemiOpen {
        bail!(Domain, "the boundary sides of a semi-open annulus cannot be exchanged by an automorphism");
    }
    if classify_branches(aut)? != BranchBehavior::Switches {
        bail!(Domain, "automorphism fixes the branches; use the fixed linearization");
    }
    let e = like.e();
    if !f.is_one(&f.pow(&aut.zeta, 2)) {
        bail!(Domain, "zeta must be 1 or -1 for an involution");
    }
    if !f.is_one(&f.pow(&aut.zeta, e as i64)) {
        bail!(Domain, "zeta^e != 1: the integer e must be even for zeta = -1");
    }
    let prec = like.working_prec();
    let ap = Applier::new(aut);
    // σ(X) = Y W
    let mut w = like.mul_monomial(1).div_pi(e)?;
    if !w.is_unit() {
        bail!(Domain, "sigma(X)/Y is not a unit");
    }
    let one = LaurentFunction::one(&f, e, like.kind(), like.trunc(), prec);
    let mut a = one.clone();
    let mut last = 0usize;
    let mut steps = 0usize;
    loop {
        let c = w.a(0).clone();
        let delta = w.scale(&c.invert_unit()?).sub(&one);
        let digits = digits_below(&delta, n);
        let Some(lv) = digits.iter().map(|&(i, k, _)| level(i, k)).min() else { break };
        if lv <= last && steps > 0 {
            bail!(Domain, "successive approximation stalled at level {lv}: sigma is not an involution at this precision");
        }
        last = lv;
        steps += 1;
        let raw: Vec<(usize, usize, DvrElement)> = digits
            .iter()
            .filter(|&&(i, k, _)| i > 0 && level(i, k) == lv)
            .map(|(i, k, d)| (*i as usize, 0usize, DvrElement::from_terms(&f, &[(*k, d.clone())], prec)))
            .collect();
        if raw.is_empty() {
            bail!(Domain, "defect at level {lv} is not sigma-invariant");
        }
        let fpart = LaurentFunction::reduce_to_canonical(&f, e, like.kind(), like.trunc(), prec, &raw);
        let step = one.sub(&fpart);
        let sstep = ap.apply(&step)?;
        a = a.mul(&step);
        w = w.mul(&step).mul(&sstep);
    }
    let u = w.a(0).clone();
    let x = LaurentFunction::monomial(&f, e, like.kind(), like.trunc(), prec, 1);
    let new_x = x.mul(&a);
    let new_y = ap.apply(&new_x)?;
    let mut cert = LinearizationCertificate {
        branch: BranchBehavior::Switches,
        new_x,
        new_y,
        u,
        verified_to_precision: 0,
        normalized: true,
        notes: vec![format!("{steps} approximation steps")],
    };
    cert.verified_to_precision = verify_with(&ap, aut, &cert)?;
    if cert.verified_to_precision < n {
        bail!(Precision, "certificate only verifies to order {} (requested {n})", cert.verified_to_precision);
    }
    Ok(cert)
}

/// Dispatches on the branch behaviour.
pub fn linearize(aut: &AnnulusAutomorphism, n: usize) -> Result<LinearizationCertificate> {
    match classify_branches(aut)? {
        BranchBehavior::Fixes => linearize_fixed(aut, n),
        BranchBehavior::Switches => linearize_switched(aut, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lf(f: &Field, e: usize, kind: AnnulusType, s: &str) -> LaurentFunction {
        LaurentFunction::parse(f, e, kind, 12, 40, s).unwrap()
    }

    #[test]
    fn identity_and_linear_apply() {
        let f = Field::prime(7).unwrap();
        let g = lf(&f, 3, AnnulusType::Closed, "1 + 3*X^2 + pi*Y + X*Y");
        let id = AnnulusAutomorphism::linear(&g, 1, &f.one(), 0, &f.one()).unwrap();
        assert!(apply(&id, &g).unwrap().agrees(&g));
        let zeta = f.from_int(2);
        let s = AnnulusAutomorphism::linear(&g, 3, &zeta, 0, &zeta).unwrap();
        s.check_relation(30).unwrap();
        s.check_order(30).unwrap();
        // σ(XY) = σ(π^3) = ζ^3 π^3
        let xy = lf(&f, 3, AnnulusType::Closed, "X*Y");
        let img = apply(&s, &xy).unwrap();
        assert!(img.agrees(&lf(&f, 3, AnnulusType::Closed, "pi^3")));
        // σ(π X^2) = ζ·ζ^2 π X^2
        let t = apply(&s, &lf(&f, 3, AnnulusType::Closed, "pi*X^2")).unwrap();
        assert!(t.agrees(&lf(&f, 3, AnnulusType::Closed, "pi*X^2")));
    }

    #[test]
    fn branch_profiles() {
        let f = Field::prime(7).unwrap();
        let g = lf(&f, 2, AnnulusType::Closed, "X");
        let s = AnnulusAutomorphism::linear(&g, 2, &f.one(), 0, &f.from_int(6)).unwrap();
        assert_eq!(classify_branches(&s).unwrap(), BranchBehavior::Fixes);
        let w = AnnulusAutomorphism::swap(&g, &f.one(), 0, &f.one()).unwrap();
        assert_eq!(classify_branches(&w).unwrap(), BranchBehavior::Switches);
        let so = lf(&f, 2, AnnulusType::SemiOpen, "X");
        let w = AnnulusAutomorphism::swap(&so, &f.one(), 0, &f.one()).unwrap();
        assert!(classify_branches(&w).is_err());
    }

    #[test]
    fn linear_input_is_a_fixed_point() {
        let f = Field::prime(7).unwrap();
        let zeta = f.from_int(2);
        let g = lf(&f, 3, AnnulusType::Closed, "X");
        let s = AnnulusAutomorphism::linear(&g, 3, &zeta, 0, &f.from_int(4)).unwrap();
        let cert = linearize_fixed(&s, 30).unwrap();
        assert_eq!(cert.u.residue(), f.from_int(4));
        assert!(cert.normalized);
    }

    #[test]
    fn conjugated_actions_linearize() {
        let f = Field::prime(13).unwrap();
        let zeta = f.from_int(3); // order 3
        let g = lf(&f, 3, AnnulusType::Closed, "X");
        let s0 = AnnulusAutomorphism::linear(&g, 3, &zeta, 0, &f.from_int(9)).unwrap();
        let c = DvrElement::parse(&f, "2*pi^6 + pi^7", 40).unwrap();
        let s = s0.conjugate_translation(&c).unwrap().mirrored().unwrap().conjugate_translation(&c).unwrap().mirrored().unwrap();
        s.check_relation(30).unwrap();
        s.check_order(30).unwrap();
        assert!(!s.sigma_x.agrees(&s0.sigma_x));
        let cert = linearize_fixed(&s, 30).unwrap();
        assert_eq!(cert.u.residue(), f.from_int(9));
        assert!(f.is_one(&f.pow(&cert.u.residue(), 3)));

        let sw = AnnulusAutomorphism::swap(&g, &f.one(), 0, &f.from_int(5)).unwrap();
        let s = sw.conjugate_translation(&c).unwrap();
        s.check_order(30).unwrap();
        let cert = linearize_switched(&s, 30).unwrap();
        assert!(cert.verified_to_precision >= 30);
    }

    #[test]
    fn switched_normal_form() {
        let f = Field::prime(7).unwrap();
        let g = lf(&f, 2, AnnulusType::Closed, "X");
        let w = AnnulusAutomorphism::swap(&g, &f.one(), 0, &f.one()).unwrap();
        let cert = linearize_switched(&w, 30).unwrap();
        assert!(cert.u.agrees(&DvrElement::one(&f, 40)));
        // σ(X) = (1+π)^{-1} Y, σ(Y) = (1+π) X
        let e = 2;
        let one_pi = DvrElement::parse(&f, "1 + pi", 40).unwrap();
        let y = LaurentFunction::monomial(&f, e, AnnulusType::Closed, 12, 40, -1);
        let x = LaurentFunction::monomial(&f, e, AnnulusType::Closed, 12, 40, 1);
        let s = AnnulusAutomorphism::new(y.scale(&one_pi.invert_unit().unwrap()), x.scale(&one_pi), 2, f.one(), 0).unwrap();
        s.check_order(30).unwrap();
        let cert = linearize_switched(&s, 32).unwrap();
        assert!(cert.verified_to_precision >= 32);
        let odd = lf(&f, 3, AnnulusType::Closed, "X");
        let w = AnnulusAutomorphism::swap(&odd, &f.from_int(6), 0, &f.one()).unwrap();
        assert!(linearize_switched(&w, 10).is_err());
    }
}
