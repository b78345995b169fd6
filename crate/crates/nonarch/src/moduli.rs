//! Fractional annuli `|π|^β ≤ |X| ≤ |π|^α` up to isomorphism.

use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

use crate::annulus::AnnulusType;
use crate::error::{bail, Result};
use crate::presentation::fmt_ratio;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FractionalAnnulus {
    pub alpha: Rational64,
    pub beta: Rational64,
    pub kind: AnnulusType,
}

/// `(modulus, α mod 1)` after normalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModuliClass {
    #[serde(serialize_with = "ser_ratio")]
    pub modulus: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub alpha_class: Rational64,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_ratio(*r))
}

fn frac(x: Rational64) -> Rational64 {
    x - x.floor()
}

impl FractionalAnnulus {
    pub fn new(alpha: Rational64, beta: Rational64, kind: AnnulusType) -> Result<Self> {
        if beta <= alpha {
            bail!(Domain, "radii need alpha < beta, got {} and {}", fmt_ratio(alpha), fmt_ratio(beta));
        }
        Ok(FractionalAnnulus { alpha, beta, kind })
    }

    pub fn modulus(&self) -> Rational64 {
        self.beta - self.alpha
    }

    /// Coordinate `π^{-α}X` turns the annulus into one with radii `(0, β − α)`.
    pub fn normal_form(&self) -> ModuliClass {
        normal_form(self)
    }

    /// Scales both radii by `d` (base change to `k[[π^{1/d}]]`).
    pub fn base_change(&self, d: i64) -> Self {
        let d = Rational64::from_integer(d);
        FractionalAnnulus { alpha: self.alpha * d, beta: self.beta * d, kind: self.kind }
    }

    /// The same annulus in the coordinate `π^c / X`: radii `(c − β, c − α)`.
    pub fn inverted(&self, c: i64) -> Self {
        let c = Rational64::from_integer(c);
        FractionalAnnulus { alpha: c - self.beta, beta: c - self.alpha, kind: self.kind }
    }

    pub fn describe(&self) -> String {
        format!("|pi|^{{{}}} <= |X| <= |pi|^{{{}}} ({})", fmt_ratio(self.beta), fmt_ratio(self.alpha), self.kind)
    }
}

pub fn modulus(v: &FractionalAnnulus) -> Rational64 {
    v.modulus()
}

/// Integer rescalings `X ↦ π^n X` shift `α` by integers; for open and closed
/// annuli the inversion `X ↦ π^c / X` also sends `ᾱ` to `−ᾱ − γ`. A semi-open
/// annulus has distinguishable boundary sides, so only the first applies.
pub fn normal_form(v: &FractionalAnnulus) -> ModuliClass {
    let gamma = v.modulus();
    let a = frac(v.alpha);
    let alpha_class = match v.kind {
        AnnulusType::SemiOpen => a,
        _ => a.min(frac(-a - gamma)),
    };
    ModuliClass { modulus: gamma, alpha_class }
}

pub fn isomorphic(v1: &FractionalAnnulus, v2: &FractionalAnnulus) -> bool {
    v1.kind == v2.kind && normal_form(v1) == normal_form(v2)
}

/// Number of forms of an annulus of modulus `e` split by a quadratic extension
/// with ramification index `rho`.
pub fn count_forms(kind: AnnulusType, rho: u32, e: u64) -> Result<u32> {
    if !matches!(rho, 1 | 2) {
        bail!(Domain, "rho must be 1 or 2, got {rho}");
    }
    let not_semi = kind != AnnulusType::SemiOpen;
    Ok(match (not_semi, rho, e.is_even()) {
        (true, 2, true) => 3,
        (false, 2, _) | (true, 1, _) => 2,
        _ => 1,
    })
}

/// Radii of the fractional annulus cut out by `X_α Y_β = π^{b'}` with weights
/// `α/m`, `β/m`, where `e = b m + a` and `b' = b` (if `α + β = a`) or `b − 1`.
pub fn descended_radii(e: u64, m: u64, alpha_exp: u64, beta_exp: u64, kind: AnnulusType) -> Result<FractionalAnnulus> {
    if m == 0 || alpha_exp >= m || beta_exp >= m {
        bail!(Domain, "exponents must lie in 0..{m}");
    }
    let (b, a) = e.div_rem(&m);
    let s = alpha_exp + beta_exp;
    let bp = if s == a {
        b as i64
    } else if s == m + a {
        b as i64 - 1
    } else {
        bail!(Domain, "alpha + beta = {s} is not congruent to e = {e} mod {m}");
    };
    let m = m as i64;
    FractionalAnnulus::new(Rational64::new(-(alpha_exp as i64), m), Rational64::from_integer(bp) + Rational64::new(beta_exp as i64, m), kind)
}
