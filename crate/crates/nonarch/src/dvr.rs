//! Truncated elements of `R = k[[π]]` with tracked absolute precision.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::field::{Fe, Field, FieldSpec};

#[derive(Clone, Debug, PartialEq)]
enum Digits {
    Fin(Vec<u32>),
    Rat(Vec<BigRational>),
}

/// `Σ c_n π^n + O(π^N)`; the stored digit vector has length exactly `N`.
#[derive(Clone, PartialEq)]
pub struct DvrElement {
    field: Field,
    digits: Digits,
}

impl fmt::Debug for DvrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(pi^{})", self.format("pi"), self.prec())
    }
}

impl fmt::Display for DvrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format("pi"))
    }
}

impl DvrElement {
    pub fn zero(field: &Field, prec: usize) -> Self {
        let digits = if field.is_rational() {
            Digits::Rat(vec![BigRational::zero(); prec])
        } else {
            Digits::Fin(vec![0; prec])
        };
        DvrElement { field: field.clone(), digits }
    }

    pub fn constant(field: &Field, c: &Fe, prec: usize) -> Self {
        let mut z = Self::zero(field, prec);
        if prec > 0 {
            z.set(0, c);
        }
        z
    }

    pub fn one(field: &Field, prec: usize) -> Self {
        Self::constant(field, &field.one(), prec)
    }

    pub fn from_int(field: &Field, n: i64, prec: usize) -> Self {
        Self::constant(field, &field.from_int(n), prec)
    }

    /// `π^k` at precision `prec` (zero when `k ≥ prec`).
    pub fn pi_power(field: &Field, k: usize, prec: usize) -> Self {
        let mut z = Self::zero(field, prec);
        if k < prec {
            z.set(k, &field.one());
        }
        z
    }

    pub fn from_terms(field: &Field, terms: &[(usize, Fe)], prec: usize) -> Self {
        let mut z = Self::zero(field, prec);
        for (i, c) in terms {
            if *i < prec {
                let cur = z.coeff(*i);
                z.set(*i, &field.add(&cur, c));
            }
        }
        z
    }

    pub fn from_coeffs(field: &Field, coeffs: &[Fe]) -> Self {
        let digits = if field.is_rational() {
            Digits::Rat(coeffs.iter().map(|c| c.rat().clone()).collect())
        } else {
            Digits::Fin(coeffs.iter().map(|c| c.fin()).collect())
        };
        DvrElement { field: field.clone(), digits }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn prec(&self) -> usize {
        match &self.digits {
            Digits::Fin(v) => v.len(),
            Digits::Rat(v) => v.len(),
        }
    }

    pub fn coeff(&self, i: usize) -> Fe {
        match &self.digits {
            Digits::Fin(v) => Fe::Fin(v.get(i).copied().unwrap_or(0)),
            Digits::Rat(v) => Fe::Rat(Box::new(v.get(i).cloned().unwrap_or_else(BigRational::zero))),
        }
    }

    fn set(&mut self, i: usize, c: &Fe) {
        match &mut self.digits {
            Digits::Fin(v) => v[i] = c.fin(),
            Digits::Rat(v) => v[i] = c.rat().clone(),
        }
    }

    fn digit_is_zero(&self, i: usize) -> bool {
        match &self.digits {
            Digits::Fin(v) => v[i] == 0,
            Digits::Rat(v) => v[i].is_zero(),
        }
    }

    /// Nonzero `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> Vec<(usize, Fe)> {
        (0..self.prec()).filter(|&i| !self.digit_is_zero(i)).map(|i| (i, self.coeff(i))).collect()
    }

    /// Least exponent with a nonzero coefficient; `None` if all retained digits vanish.
    pub fn ord(&self) -> Option<usize> {
        (0..self.prec()).find(|&i| !self.digit_is_zero(i))
    }

    /// `ord` with the convention that a zero element has order equal to its precision.
    pub fn ord_or_prec(&self) -> usize {
        self.ord().unwrap_or(self.prec())
    }

    pub fn is_zero(&self) -> bool {
        self.ord().is_none()
    }

    pub fn is_unit(&self) -> bool {
        self.prec() > 0 && !self.digit_is_zero(0)
    }

    pub fn residue(&self) -> Fe {
        self.coeff(0)
    }

    /// Truncates to precision `min(n, prec)`.
    pub fn with_prec(&self, n: usize) -> Self {
        let mut out = self.clone();
        match &mut out.digits {
            Digits::Fin(v) => v.truncate(n),
            Digits::Rat(v) => v.truncate(n),
        }
        out
    }

    fn check_field(&self, other: &Self) {
        assert!(self.field == other.field, "mixed coefficient fields {} and {}", self.field, other.field);
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            bail!(FieldMismatch, "{} vs {}", self.field, other.field);
        }
        Ok(self.add(other))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_field(other);
        let n = self.prec().min(other.prec());
        let digits = match (&self.digits, &other.digits) {
            (Digits::Fin(a), Digits::Fin(b)) => {
                Digits::Fin((0..n).map(|i| self.field.fadd(a[i], b[i])).collect())
            }
            (Digits::Rat(a), Digits::Rat(b)) => Digits::Rat((0..n).map(|i| &a[i] + &b[i]).collect()),
            _ => unreachable!(),
        };
        DvrElement { field: self.field.clone(), digits }
    }

    pub fn neg(&self) -> Self {
        let digits = match &self.digits {
            Digits::Fin(a) => Digits::Fin(a.iter().map(|&x| self.field.fneg(x)).collect()),
            Digits::Rat(a) => Digits::Rat(a.iter().map(|x| -x).collect()),
        };
        DvrElement { field: self.field.clone(), digits }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplication by a field constant.
    pub fn scale(&self, c: &Fe) -> Self {
        let digits = match &self.digits {
            Digits::Fin(a) => {
                let c = c.fin();
                Digits::Fin(a.iter().map(|&x| self.field.fmul(x, c)).collect())
            }
            Digits::Rat(a) => {
                let c = c.rat();
                Digits::Rat(a.iter().map(|x| x * c).collect())
            }
        };
        DvrElement { field: self.field.clone(), digits }
    }

    /// Precision of a product: `min(N_a + ord b, N_b + ord a, N_a + N_b)` capped at `max(N_a, N_b)`.
    pub fn product_prec(&self, other: &Self) -> usize {
        let (na, nb) = (self.prec(), other.prec());
        let (oa, ob) = (self.ord_or_prec(), other.ord_or_prec());
        (na + ob).min(nb + oa).min(na + nb).min(na.max(nb))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_field(other);
        let n = self.product_prec(other);
        let oa = self.ord_or_prec();
        let ob = other.ord_or_prec();
        let digits = match (&self.digits, &other.digits) {
            (Digits::Fin(a), Digits::Fin(b)) => Digits::Fin(mul_fin(&self.field, a, b, oa, ob, n)),
            (Digits::Rat(a), Digits::Rat(b)) => {
                let mut out = vec![BigRational::zero(); n];
                for i in oa..a.len().min(n) {
                    if a[i].is_zero() {
                        continue;
                    }
                    for j in ob..b.len().min(n - i) {
                        if !b[j].is_zero() {
                            out[i + j] += &a[i] * &b[j];
                        }
                    }
                }
                Digits::Rat(out)
            }
            _ => unreachable!(),
        };
        DvrElement { field: self.field.clone(), digits }
    }

    /// Multiplication by `π^k`; the precision is kept (top digits are dropped).
    pub fn mul_pi(&self, k: usize) -> Self {
        let n = self.prec();
        let mut out = Self::zero(&self.field, n);
        for i in 0..n.saturating_sub(k) {
            if !self.digit_is_zero(i) {
                out.set(i + k, &self.coeff(i));
            }
        }
        out
    }

    /// Multiplication by `π^k` that gains `k` digits of precision.
    pub fn mul_pi_exact(&self, k: usize) -> Self {
        let n = self.prec();
        let mut out = Self::zero(&self.field, n + k);
        for i in 0..n {
            if !self.digit_is_zero(i) {
                out.set(i + k, &self.coeff(i));
            }
        }
        out
    }

    /// Exact division by `π^k`, losing `k` digits of precision.
    pub fn div_pi(&self, k: usize) -> Result<Self> {
        if let Some(o) = self.ord() {
            if o < k {
                bail!(Domain, "cannot divide an element of order {o} by pi^{k}");
            }
        }
        Ok(self.div_pi_unchecked(k))
    }

    /// Division by `π^k` discarding the low digits (used when they are known to vanish).
    pub(crate) fn div_pi_unchecked(&self, k: usize) -> Self {
        let n = self.prec();
        let mut out = Self::zero(&self.field, n.saturating_sub(k));
        for i in k..n {
            if !self.digit_is_zero(i) {
                out.set(i - k, &self.coeff(i));
            }
        }
        out
    }

    pub fn invert_unit(&self) -> Result<Self> {
        if !self.is_unit() {
            bail!(Domain, "element {} is not a unit", self.format("pi"));
        }
        let n = self.prec();
        let digits = match &self.digits {
            Digits::Fin(a) => {
                let f = &self.field;
                let b0 = f.finv(a[0]).expect("unit");
                let nb0 = f.fneg(b0);
                let mut b = vec![0u32; n];
                b[0] = b0;
                for k in 1..n {
                    let mut s = 0u32;
                    for i in 1..=k {
                        if a[i] != 0 && b[k - i] != 0 {
                            s = f.fadd(s, f.fmul(a[i], b[k - i]));
                        }
                    }
                    b[k] = f.fmul(nb0, s);
                }
                Digits::Fin(b)
            }
            Digits::Rat(a) => {
                let b0 = a[0].recip();
                let mut b = vec![BigRational::zero(); n];
                b[0] = b0.clone();
                for k in 1..n {
                    let mut s = BigRational::zero();
                    for i in 1..=k {
                        if !a[i].is_zero() {
                            s += &a[i] * &b[k - i];
                        }
                    }
                    b[k] = -(&s * &b0);
                }
                Digits::Rat(b)
            }
        };
        Ok(DvrElement { field: self.field.clone(), digits })
    }

    /// `self / unit`.
    pub fn div_unit(&self, unit: &Self) -> Result<Self> {
        Ok(self.mul(&unit.invert_unit()?))
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut result = Self::one(&self.field, self.prec());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Constant lift of the residue: the multiplicative representative in `k[[π]]`.
    pub fn teichmuller(&self) -> Result<Self> {
        if !self.is_unit() {
            bail!(Domain, "teichmuller lift needs a unit");
        }
        Ok(Self::constant(&self.field, &self.residue(), self.prec()))
    }

    /// Image in `k[[ϖ]]` with `ϖ^d = π`.
    pub fn base_change_ramified(&self, d: usize) -> Self {
        assert!(d >= 1);
        let n = self.prec();
        let mut out = Self::zero(&self.field, n * d);
        for i in 0..n {
            if !self.digit_is_zero(i) {
                out.set(i * d, &self.coeff(i));
            }
        }
        out
    }

    /// Inverse of [`base_change_ramified`](Self::base_change_ramified); fails if a
    /// retained exponent is not a multiple of `d`.
    pub fn descend_ramified(&self, d: usize) -> Result<Self> {
        let n = self.prec();
        let m = n.div_ceil(d);
        let mut out = Self::zero(&self.field, m);
        for i in 0..n {
            if self.digit_is_zero(i) {
                continue;
            }
            if i % d != 0 {
                bail!(Domain, "exponent {i} is not divisible by {d}; element does not descend");
            }
            out.set(i / d, &self.coeff(i));
        }
        Ok(out)
    }

    /// The semilinear action `Σ c_n π^n ↦ Σ Frob^j(c_n) ζ^n π^n`.
    pub fn galois_act(&self, frob: u32, zeta: &Fe) -> Self {
        let f = &self.field;
        let mut out = Self::zero(f, self.prec());
        let mut zn = f.one();
        for i in 0..self.prec() {
            if !self.digit_is_zero(i) {
                out.set(i, &f.mul(&f.frobenius(&self.coeff(i), frob), &zn));
            }
            zn = f.mul(&zn, zeta);
        }
        out
    }

    /// Whether the two elements agree at their common precision.
    pub fn agrees(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// Whether they agree modulo `π^n`, requiring both to be known that far.
    pub fn agrees_to(&self, other: &Self, n: usize) -> bool {
        self.prec() >= n && other.prec() >= n && self.with_prec(n).sub(&other.with_prec(n)).is_zero()
    }

    /// Renders as `c0 + c1*pi + …` with the given uniformizer name.
    pub fn format(&self, uniformizer: &str) -> String {
        let terms = self.terms();
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (i, c)) in terms.iter().enumerate() {
            let mut cs = self.field.format(c);
            let neg = cs.starts_with('-');
            if neg {
                cs.remove(0);
            }
            if self.field.is_compound(c) {
                cs = format!("({cs})");
            }
            let sym = match i {
                0 => String::new(),
                1 => uniformizer.to_string(),
                _ => format!("{uniformizer}^{i}"),
            };
            let body = match (cs.as_str(), sym.is_empty()) {
                (_, true) => cs.clone(),
                ("1", false) => sym,
                (_, false) => format!("{cs}*{sym}"),
            };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }

    /// Parses shorthand such as `1 + 3pi - 2pi^3` (or with `varpi`).
    pub fn parse(field: &Field, text: &str, prec: usize) -> Result<Self> {
        let poly = crate::parse::parse_expr(text)?;
        let mut acc = Self::zero(field, prec);
        for (mono, coef) in poly.terms {
            let mut c = field.from_ratio(coef.numer(), coef.denom())?;
            let mut k = 0usize;
            for (name, e) in mono {
                match name.as_str() {
                    "pi" | "varpi" => k += e as usize,
                    "t" => c = field.mul(&c, &field.pow(&field.generator()?, e as i64)),
                    other => bail!(Parse, "unexpected symbol `{other}` in `{text}`"),
                }
            }
            acc = acc.add(&Self::from_terms(field, &[(k, c)], prec));
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> DvrJson {
        DvrJson {
            prec: self.prec(),
            terms: self.terms().into_iter().map(|(i, c)| (i, self.field.format(&c))).collect(),
        }
    }

    pub fn from_json(field: &Field, value: &DvrInput, default_prec: usize) -> Result<Self> {
        match value {
            DvrInput::Text(s) => Self::parse(field, s, default_prec),
            DvrInput::Int(n) => Ok(Self::from_int(field, *n, default_prec)),
            DvrInput::Full(j) => {
                let mut terms = Vec::new();
                for (i, c) in &j.terms {
                    terms.push((*i, field.parse(c)?));
                }
                Ok(Self::from_terms(field, &terms, j.prec))
            }
        }
    }
}

fn mul_fin(f: &Field, a: &[u32], b: &[u32], oa: usize, ob: usize, n: usize) -> Vec<u32> {
    let p = f.characteristic() as u64;
    if f.degree() == 1 {
        let mut acc = vec![0u64; n];
        let lazy = p < (1 << 16);
        for i in oa..a.len().min(n) {
            let x = a[i] as u64;
            if x == 0 {
                continue;
            }
            let lim = b.len().min(n - i);
            if lazy {
                for j in ob..lim {
                    acc[i + j] += x * b[j] as u64;
                }
            } else {
                for j in ob..lim {
                    acc[i + j] = (acc[i + j] + x * b[j] as u64) % p;
                }
            }
        }
        acc.into_iter().map(|x| (x % p) as u32).collect()
    } else {
        let mut out = vec![0u32; n];
        for i in oa..a.len().min(n) {
            if a[i] == 0 {
                continue;
            }
            for j in ob..b.len().min(n - i) {
                if b[j] != 0 {
                    out[i + j] = f.fadd(out[i + j], f.fmul(a[i], b[j]));
                }
            }
        }
        out
    }
}

/// Canonical JSON form `{"prec":32,"terms":[[0,"1"],[1,"3"]]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DvrJson {
    pub prec: usize,
    pub terms: Vec<(usize, String)>,
}

/// Accepted input forms for a coefficient.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DvrInput {
    Int(i64),
    Text(String),
    Full(DvrJson),
}

/// Polynomial `Σ c_i T^i` over `R` (coefficients low to high) evaluated at `x`.
pub fn poly_eval(f: &[DvrElement], x: &DvrElement) -> DvrElement {
    let mut acc = DvrElement::zero(x.field(), x.prec());
    for (k, c) in f.iter().rev().enumerate() {
        acc = if k == 0 { c.clone() } else { acc.mul(x).add(c) };
    }
    acc
}

fn poly_derivative(f: &[DvrElement]) -> Vec<DvrElement> {
    f.iter().enumerate().skip(1).map(|(i, c)| c.scale(&c.field().from_int(i as i64))).collect()
}

/// Newton iteration from a simple residual root `x0` of `f`.
pub fn hensel_lift_root(f: &[DvrElement], x0: &DvrElement) -> Result<DvrElement> {
    if f.is_empty() {
        bail!(Domain, "empty polynomial");
    }
    let field = x0.field().clone();
    let df = poly_derivative(f);
    let work = f.iter().map(|c| c.prec()).min().unwrap_or(0).max(1);
    let mut x = x0.with_prec(work);
    if x.prec() < work {
        x = DvrElement::from_coeffs(&field, &(0..work).map(|i| x0.coeff(i)).collect::<Vec<_>>());
    }
    let fx = poly_eval(f, &x);
    if !field.is_zero(&fx.residue()) {
        bail!(Domain, "x0 is not a residual root");
    }
    if df.is_empty() || !poly_eval(&df, &x).is_unit() {
        bail!(Unsupported, "residual root is not simple (singular root)");
    }
    for _ in 0..2 * (usize::BITS - work.leading_zeros()) as usize + 4 {
        let fx = poly_eval(f, &x);
        if fx.is_zero() {
            return Ok(x);
        }
        let dx = poly_eval(&df, &x);
        let step = fx.div_unit(&dx)?;
        x = x.sub(&step);
    }
    Ok(x)
}

/// A primitive `m`-th root of unity of `k` as a constant element.
pub fn root_of_unity(field: &Field, m: u64, prec: usize) -> Result<DvrElement> {
    if !field.is_rational() && m % field.characteristic() as u64 == 0 {
        bail!(Domain, "order {m} is divisible by the characteristic");
    }
    Ok(DvrElement::constant(field, &field.root_of_unity(m)?, prec))
}

/// Constant `v` with `v = u σ(v)` on residues, `σ = Frob^j` of order `m`.
pub fn hilbert90_solve(u: &DvrElement, frob: u32, m: u32) -> Result<DvrElement> {
    let f = u.field();
    let v = f.hilbert90(&u.residue(), frob, m)?;
    Ok(DvrElement::constant(f, &v, u.prec()))
}

/// Basis used for unramified restrictions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnramifiedBasis {
    /// `α, σ(α), …` with trace 1; Galois acts by cyclic permutation.
    Normal,
    /// `1, t, …, t^{r-1}` in the generator of `k'`.
    Power,
}

/// A tame extension `R'|R` with a chosen generator `σ` of its Galois group.
///
/// Totally ramified part: `R' = k[[ϖ]]`, `ϖ^ρ = π`, `σ(ϖ) = ζ^t ϖ`.
/// Unramified part: `k' = F_{p^r}` with `σ = Frob` on `k'`.
#[derive(Clone, Debug)]
pub struct ExtensionSpec {
    pub base: Field,
    pub rho: u32,
    pub r: u32,
    pub residue: Field,
    pub t: u32,
    pub zeta: Fe,
    pub basis: UnramifiedBasis,
}

impl ExtensionSpec {
    pub fn new(base: &Field, rho: u32, r: u32, residual_modulus: Option<&[u32]>, t: u32, basis: UnramifiedBasis) -> Result<Self> {
        if rho == 0 || r == 0 {
            bail!(Domain, "degrees must be positive");
        }
        let p = base.characteristic();
        if p != 0 && rho % p == 0 {
            bail!(Unsupported, "ramification index {rho} is wild in characteristic {p}");
        }
        let zeta = base.root_of_unity(rho as u64)?;
        if rho > 1 && num_integer::gcd(t, rho) != 1 {
            bail!(Domain, "exponent t={t} does not give a generator of the ramified Galois group");
        }
        let residue = if r > 1 {
            if base.is_rational() || base.degree() != 1 {
                bail!(Unsupported, "unramified extensions are supported over prime fields only");
            }
            match residual_modulus {
                Some(m) => {
                    let f = Field::extension(p, m)?;
                    if f.degree() != r {
                        bail!(Domain, "residual polynomial has degree {} but r = {r}", f.degree());
                    }
                    f
                }
                None => Field::extension_auto(p, r)?,
            }
        } else {
            base.clone()
        };
        Ok(ExtensionSpec { base: base.clone(), rho, r, residue, t: t % rho.max(1), zeta, basis })
    }

    pub fn ramified(base: &Field, rho: u32) -> Result<Self> {
        Self::new(base, rho, 1, None, 1, UnramifiedBasis::Normal)
    }

    pub fn unramified(base: &Field, r: u32) -> Result<Self> {
        Self::new(base, 1, r, None, 0, UnramifiedBasis::Normal)
    }

    /// Total degree `m = ρ r`.
    pub fn degree(&self) -> u32 {
        self.rho * self.r
    }

    pub fn spec(&self) -> ExtensionJson {
        ExtensionJson {
            field: self.base.spec(),
            ramification: self.rho,
            residual_degree: self.r,
            residual_modulus: (self.r > 1).then(|| self.residue.modulus().to_vec()),
            t: self.t,
            basis: self.basis,
        }
    }

    pub fn from_json(j: &ExtensionJson) -> Result<Self> {
        let base = Field::from_spec(&j.field)?;
        Self::new(&base, j.ramification, j.residual_degree, j.residual_modulus.as_deref(), j.t, j.basis)
    }
}

/// JSON form of an extension.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExtensionJson {
    pub field: FieldSpec,
    #[serde(default = "one_u32")]
    pub ramification: u32,
    #[serde(default = "one_u32")]
    pub residual_degree: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_modulus: Option<Vec<u32>>,
    #[serde(default = "one_u32")]
    pub t: u32,
    #[serde(default = "normal_basis")]
    pub basis: UnramifiedBasis,
}

fn one_u32() -> u32 {
    1
}
fn normal_basis() -> UnramifiedBasis {
    UnramifiedBasis::Normal
}


#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Field {
        Field::prime(7).unwrap()
    }

    #[test]
    fn product_precision_rule() {
        let f = f7();
        let a = DvrElement::parse(&f, "pi", 10).unwrap();
        let b = DvrElement::parse(&f, "pi^2", 6).unwrap();
        // min(10 + 2, 6 + 1, 16) capped at 10
        assert_eq!(a.mul(&b).prec(), 7);
        let u = DvrElement::parse(&f, "1 + pi", 8).unwrap();
        let v = DvrElement::parse(&f, "1 - pi", 5).unwrap();
        let w = u.mul(&v);
        assert_eq!(w.prec(), 5);
        assert!(w.agrees(&DvrElement::parse(&f, "1 - pi^2", 5).unwrap()));
    }

    #[test]
    fn inverse_of_geometric_series() {
        let f = f7();
        let u = DvrElement::parse(&f, "1 + pi", 12).unwrap();
        let inv = u.invert_unit().unwrap();
        for i in 0..12 {
            let expected = if i % 2 == 0 { 1 } else { 6 };
            assert_eq!(inv.coeff(i), Fe::Fin(expected));
        }
        let q = Field::rationals();
        let two = DvrElement::from_int(&q, 2, 4);
        assert_eq!(q.format(&two.invert_unit().unwrap().residue()), "1/2");
        assert!(DvrElement::parse(&f, "pi", 4).unwrap().invert_unit().is_err());
        assert!(DvrElement::zero(&f, 4).invert_unit().is_err());
    }

    #[test]
    fn hensel_square_root() {
        let f = f7();
        let n = 20;
        let poly = vec![DvrElement::parse(&f, "-1 - pi", n).unwrap(), DvrElement::zero(&f, n), DvrElement::one(&f, n)];
        let x = hensel_lift_root(&poly, &DvrElement::one(&f, n)).unwrap();
        assert!(x.mul(&x).agrees(&DvrElement::parse(&f, "1 + pi", n).unwrap()));
        let lin = vec![DvrElement::parse(&f, "-pi", n).unwrap(), DvrElement::one(&f, n)];
        assert!(hensel_lift_root(&lin, &DvrElement::zero(&f, n)).unwrap().agrees(&DvrElement::pi_power(&f, 1, n)));
        let double = vec![DvrElement::zero(&f, n), DvrElement::zero(&f, n), DvrElement::one(&f, n)];
        assert!(hensel_lift_root(&double, &DvrElement::zero(&f, n)).is_err());
    }

    #[test]
    fn base_change_and_galois() {
        let f = f7();
        let a = DvrElement::parse(&f, "1 + pi", 4).unwrap();
        let b = a.base_change_ramified(3);
        assert_eq!(b.prec(), 12);
        assert_eq!(b.terms().len(), 2);
        assert_eq!(b.terms()[1].0, 3);
        assert!(b.descend_ramified(3).unwrap().agrees(&a));
        assert!(DvrElement::parse(&f, "pi", 4).unwrap().descend_ramified(2).is_err());
        let z = f.root_of_unity(3).unwrap();
        let g = DvrElement::parse(&f, "pi", 4).unwrap().galois_act(0, &z);
        assert_eq!(g.coeff(1), z);
    }

    #[test]
    fn json_roundtrip() {
        let f = Field::extension_auto(7, 2).unwrap();
        let a = DvrElement::parse(&f, "(1+t) + 3pi^2", 6).unwrap();
        let j = a.to_json();
        let back = DvrElement::from_json(&f, &DvrInput::Full(j), 32).unwrap();
        assert_eq!(back, a);
    }
}
