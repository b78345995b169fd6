//! Bounded functions on annuli `XY = π^e` in canonical form
//! `Σ_{i≥0} a_i X^i + Σ_{j>0} b_j Y^j`, truncated at degree `D`.
//!
//! Beyond the window, `tail_x` / `tail_y` record lower bounds for the orders
//! of the dropped `a_i` / `b_j` (`None` means the tail is exactly zero).
//! Products use these bounds to cap the precision of coefficients that
//! the dropped terms could still reach, so truncation loss is reported
//! through precision instead of being silently ignored.

mod newton;
mod prep;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dvr::{DvrElement, DvrInput, DvrJson};
use crate::error::{bail, Result};
use crate::field::{Field, FieldSpec};

pub use newton::{BoundaryData, Breakpoint, NewtonPolygon};
pub use prep::{divide_zero, residual_roots, Preparation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnulusType {
    Open,
    SemiOpen,
    Closed,
}

impl AnnulusType {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "open" => Ok(AnnulusType::Open),
            "semi_open" | "semiopen" => Ok(AnnulusType::SemiOpen),
            "closed" => Ok(AnnulusType::Closed),
            other => bail!(Parse, "unknown annulus type `{other}`"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AnnulusType::Open => "open",
            AnnulusType::SemiOpen => "semi_open",
            AnnulusType::Closed => "closed",
        }
    }
}

impl fmt::Display for AnnulusType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[derive(Clone)]
pub struct LaurentFunction {
    field: Field,
    e: usize,
    kind: AnnulusType,
    trunc: usize,
    /// `a_0..=a_D`.
    a: Vec<DvrElement>,
    /// `b_0..=b_D`; `b_0` is unused and kept at zero.
    b: Vec<DvrElement>,
    tail_x: Option<usize>,
    tail_y: Option<usize>,
}

impl fmt::Debug for LaurentFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format("pi"))
    }
}

impl LaurentFunction {
    pub fn zero(field: &Field, e: usize, kind: AnnulusType, trunc: usize, prec: usize) -> Self {
        assert!(e >= 1, "modulus must be positive");
        let z = DvrElement::zero(field, prec);
        LaurentFunction {
            field: field.clone(),
            e,
            kind,
            trunc,
            a: vec![z.clone(); trunc + 1],
            b: vec![z; trunc + 1],
            tail_x: None,
            tail_y: None,
        }
    }

    /// A zero function with the same shape and precision as `self`.
    pub fn zero_like(&self) -> Self {
        Self::zero(&self.field, self.e, self.kind, self.trunc, self.working_prec())
    }

    pub fn constant_like(&self, c: &DvrElement) -> Self {
        let mut out = self.zero_like();
        out.a[0] = c.clone();
        out
    }

    pub fn constant(field: &Field, e: usize, kind: AnnulusType, trunc: usize, c: &DvrElement) -> Self {
        let mut out = Self::zero(field, e, kind, trunc, c.prec());
        out.a[0] = c.clone();
        out
    }

    pub fn one(field: &Field, e: usize, kind: AnnulusType, trunc: usize, prec: usize) -> Self {
        Self::constant(field, e, kind, trunc, &DvrElement::one(field, prec))
    }

    /// The monomial `X^k` for `k ≥ 0`, or `Y^{-k}` for `k < 0`.
    pub fn monomial(field: &Field, e: usize, kind: AnnulusType, trunc: usize, prec: usize, k: i64) -> Self {
        let mut out = Self::zero(field, e, kind, trunc, prec);
        let one = DvrElement::one(field, prec);
        let d = k.unsigned_abs() as usize;
        if d > trunc {
            if k >= 0 {
                out.tail_x = Some(0);
            } else {
                out.tail_y = Some(0);
            }
        } else if k >= 0 {
            out.a[d] = one;
        } else {
            out.b[d] = one;
        }
        out
    }

    /// Builds a function from explicit coefficient lists (`b[0]` is ignored).
    pub fn from_parts(
        field: &Field,
        e: usize,
        kind: AnnulusType,
        a: Vec<DvrElement>,
        b: Vec<DvrElement>,
        tail_x: Option<usize>,
        tail_y: Option<usize>,
    ) -> Self {
        let trunc = a.len().max(b.len()).max(1) - 1;
        let prec = a.iter().chain(b.iter()).map(|c| c.prec()).max().unwrap_or(0);
        let mut out = Self::zero(field, e, kind, trunc, prec);
        for (i, c) in a.into_iter().enumerate() {
            out.a[i] = c;
        }
        for (j, c) in b.into_iter().enumerate().skip(1) {
            out.b[j] = c;
        }
        out.tail_x = tail_x;
        out.tail_y = tail_y;
        out
    }

    /// Rewrites raw terms `c X^i Y^j` through `XY = π^e`.
    pub fn reduce_to_canonical(
        field: &Field,
        e: usize,
        kind: AnnulusType,
        trunc: usize,
        prec: usize,
        raw: &[(usize, usize, DvrElement)],
    ) -> Self {
        let mut out = Self::zero(field, e, kind, trunc, prec);
        for (i, j, c) in raw {
            let m = (*i).min(*j);
            let c = c.mul_pi_exact(e * m).with_prec(prec.max(c.prec()));
            if i >= j {
                let d = i - j;
                if d <= trunc {
                    out.a[d] = out.a[d].add(&c);
                } else if !c.is_zero() || c.prec() < prec {
                    out.tail_x = min_opt(out.tail_x, Some(c.ord_or_prec()));
                }
            } else {
                let d = j - i;
                if d <= trunc {
                    out.b[d] = out.b[d].add(&c);
                } else if !c.is_zero() || c.prec() < prec {
                    out.tail_y = min_opt(out.tail_y, Some(c.ord_or_prec()));
                }
            }
        }
        out
    }

    /// Parses a Laurent polynomial in `X`, `Y`, `pi` (and `t` for extension fields).
    pub fn parse(field: &Field, e: usize, kind: AnnulusType, trunc: usize, prec: usize, text: &str) -> Result<Self> {
        let poly = crate::parse::parse_expr(text)?;
        let mut raw = Vec::new();
        for (mono, coef) in poly.terms {
            let mut c = field.from_ratio(coef.numer(), coef.denom())?;
            let (mut i, mut j, mut k) = (0usize, 0usize, 0usize);
            for (name, p) in mono {
                let p = p as usize;
                match name.as_str() {
                    "X" => i += p,
                    "Y" => j += p,
                    "pi" | "varpi" => k += p,
                    "t" => c = field.mul(&c, &field.pow(&field.generator()?, p as i64)),
                    other => bail!(Parse, "unexpected symbol `{other}` in `{text}`"),
                }
            }
            raw.push((i, j, DvrElement::from_terms(field, &[(k, c)], prec)));
        }
        Ok(Self::reduce_to_canonical(field, e, kind, trunc, prec, &raw))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn e(&self) -> usize {
        self.e
    }
    pub fn kind(&self) -> AnnulusType {
        self.kind
    }
    pub fn trunc(&self) -> usize {
        self.trunc
    }
    pub fn a(&self, i: usize) -> &DvrElement {
        &self.a[i]
    }
    pub fn b(&self, j: usize) -> &DvrElement {
        &self.b[j]
    }
    pub fn a_coeffs(&self) -> &[DvrElement] {
        &self.a
    }
    pub fn b_coeffs(&self) -> &[DvrElement] {
        &self.b
    }
    pub fn tail_x(&self) -> Option<usize> {
        self.tail_x
    }
    pub fn tail_y(&self) -> Option<usize> {
        self.tail_y
    }

    pub fn with_kind(&self, kind: AnnulusType) -> Self {
        let mut out = self.clone();
        out.kind = kind;
        out
    }

    pub fn with_tails(&self, tail_x: Option<usize>, tail_y: Option<usize>) -> Self {
        let mut out = self.clone();
        out.tail_x = tail_x;
        out.tail_y = tail_y;
        out
    }

    /// Largest coefficient precision.
    pub fn working_prec(&self) -> usize {
        self.a.iter().chain(self.b.iter().skip(1)).map(|c| c.prec()).max().unwrap_or(0)
    }

    /// Smallest coefficient precision.
    pub fn min_prec(&self) -> usize {
        self.a.iter().chain(self.b.iter().skip(1)).map(|c| c.prec()).min().unwrap_or(0)
    }

    pub fn with_prec(&self, n: usize) -> Self {
        let mut out = self.clone();
        for c in out.a.iter_mut().chain(out.b.iter_mut()) {
            *c = c.with_prec(n);
        }
        out
    }

    /// Coefficient of `X^k` in the Laurent expansion in `X` (`c_{-j} = b_j π^{ej}`).
    pub fn x_coeff(&self, k: i64) -> DvrElement {
        if k >= 0 {
            self.a[k as usize].clone()
        } else {
            let j = (-k) as usize;
            self.b[j].mul_pi_exact(self.e * j)
        }
    }

    /// `(degree, order lower bound)` of each retained X-expansion coefficient,
    /// split into known-nonzero points and unknown (zero at precision) points.
    pub(crate) fn x_points(&self) -> (Vec<(i64, usize)>, Vec<(i64, usize)>) {
        let mut known = Vec::new();
        let mut unknown = Vec::new();
        for (i, c) in self.a.iter().enumerate() {
            match c.ord() {
                Some(o) => known.push((i as i64, o)),
                None => unknown.push((i as i64, c.prec())),
            }
        }
        for (j, c) in self.b.iter().enumerate().skip(1) {
            let shift = self.e * j;
            match c.ord() {
                Some(o) => known.push((-(j as i64), o + shift)),
                None => unknown.push((-(j as i64), c.prec() + shift)),
            }
        }
        let d = self.trunc as i64 + 1;
        if let Some(t) = self.tail_x {
            unknown.push((d, t));
        }
        if let Some(t) = self.tail_y {
            unknown.push((-d, t + self.e * (self.trunc + 1)));
        }
        (known, unknown)
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|c| c.is_zero()) && self.b.iter().all(|c| c.is_zero())
    }

    /// Unit criterion on annuli: constant term a unit, other terms small
    /// on the boundary circles that belong to the annulus.
    pub fn is_unit(&self) -> bool {
        if !self.a[0].is_unit() {
            return false;
        }
        let small = |c: &DvrElement| c.ord().is_none_or(|o| o > 0);
        let x_small = self.a.iter().skip(1).all(small) && self.tail_x.is_none_or(|t| t > 0);
        let y_small = self.b.iter().skip(1).all(small) && self.tail_y.is_none_or(|t| t > 0);
        match self.kind {
            AnnulusType::Open => true,
            AnnulusType::SemiOpen => x_small,
            AnnulusType::Closed => x_small && y_small,
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.e != other.e {
            bail!(Domain, "modulus mismatch: {} vs {}", self.e, other.e);
        }
        if self.field != other.field {
            bail!(FieldMismatch, "{} vs {}", self.field, other.field);
        }
        Ok(())
    }

    /// Reduces the truncation degree, folding dropped coefficients into the tails.
    pub fn truncate(&self, d: usize) -> Self {
        if d >= self.trunc {
            return self.clone();
        }
        let mut out = self.clone();
        for i in d + 1..=self.trunc {
            let ca = &self.a[i];
            if !ca.is_zero() || ca.prec() < self.working_prec() {
                out.tail_x = min_opt(out.tail_x, Some(ca.ord_or_prec()));
            }
            let cb = &self.b[i];
            if !cb.is_zero() || cb.prec() < self.working_prec() {
                out.tail_y = min_opt(out.tail_y, Some(cb.ord_or_prec()));
            }
        }
        out.a.truncate(d + 1);
        out.b.truncate(d + 1);
        out.trunc = d;
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other).expect("incompatible Laurent functions");
        let d = self.trunc.min(other.trunc);
        let (f, g) = (self.truncate(d), other.truncate(d));
        let mut out = f.clone();
        for i in 0..=d {
            out.a[i] = f.a[i].add(&g.a[i]);
            out.b[i] = f.b[i].add(&g.b[i]);
        }
        out.tail_x = min_opt(f.tail_x, g.tail_x);
        out.tail_y = min_opt(f.tail_y, g.tail_y);
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.a.iter_mut().chain(out.b.iter_mut()) {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplication by a constant of `R`.
    pub fn scale(&self, c: &DvrElement) -> Self {
        let mut out = self.clone();
        for x in out.a.iter_mut().chain(out.b.iter_mut()) {
            *x = x.mul(c);
        }
        let o = c.ord_or_prec();
        out.tail_x = out.tail_x.map(|t| t + o);
        out.tail_y = out.tail_y.map(|t| t + o);
        out
    }

    /// Applies a map to every coefficient (tails unchanged).
    pub fn map_coeffs(&self, f: impl Fn(&DvrElement) -> DvrElement) -> Self {
        let mut out = self.clone();
        for x in out.a.iter_mut().chain(out.b.iter_mut()) {
            *x = f(x);
        }
        out
    }

    fn ymin(&self, j0: usize) -> Option<usize> {
        let mut best: Option<usize> = None;
        for j in j0.max(1)..=self.trunc {
            best = min_opt(best, Some(self.e * j + self.b[j].ord_or_prec()));
        }
        if let Some(t) = self.tail_y {
            best = min_opt(best, Some(self.e * (self.trunc + 1) + t));
        }
        best
    }

    fn xmin(&self, i0: usize) -> Option<usize> {
        let mut best: Option<usize> = None;
        for i in i0..=self.trunc {
            best = min_opt(best, Some(self.e * i + self.a[i].ord_or_prec()));
        }
        if let Some(t) = self.tail_x {
            best = min_opt(best, Some(self.e * (self.trunc + 1) + t));
        }
        best
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul(other))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other).expect("incompatible Laurent functions");
        let d = self.trunc.min(other.trunc);
        let (f, g) = (self.truncate(d), other.truncate(d));
        let e = self.e;
        let work = f.working_prec().max(g.working_prec());
        let field = &self.field;

        let mut acc_a: Vec<Option<DvrElement>> = vec![None; d + 1];
        let mut acc_b: Vec<Option<DvrElement>> = vec![None; d + 1];
        let mut cap_a = vec![work; d + 1];
        let mut cap_b = vec![work; d + 1];
        let mut drop_x: Option<usize> = None;
        let mut drop_y: Option<usize> = None;

        // index k ≥ 0 means a_k, k < 0 means b_{-k}
        let fx: Vec<(i64, &DvrElement)> = (0..=d as i64).map(|i| (i, &f.a[i as usize])).chain((1..=d as i64).map(|j| (-j, &f.b[j as usize]))).collect();
        let gx: Vec<(i64, &DvrElement)> = (0..=d as i64).map(|i| (i, &g.a[i as usize])).chain((1..=d as i64).map(|j| (-j, &g.b[j as usize]))).collect();
        let ford: Vec<Option<usize>> = fx.iter().map(|(_, c)| c.ord()).collect();
        let gord: Vec<Option<usize>> = gx.iter().map(|(_, c)| c.ord()).collect();

        for (fi, (i, cf)) in fx.iter().enumerate() {
            for (gi, (j, cg)) in gx.iter().enumerate() {
                let (i, j) = (*i, *j);
                // shift: π^{e·min(deg_X, deg_Y)} when one factor is an X-power and the other a Y-power
                let (target, shift) = if (i >= 0) == (j >= 0) {
                    (i + j, 0usize)
                } else {
                    let (xi, yj) = if i >= 0 { (i, -j) } else { (j, -i) };
                    (xi - yj, e * xi.min(yj) as usize)
                };
                let nonzero = ford[fi].is_some() && gord[gi].is_some();
                let pprec = cf.product_prec(cg) + shift;
                if target.unsigned_abs() as usize > d {
                    let o = if nonzero { ford[fi].unwrap() + gord[gi].unwrap() + shift } else { pprec };
                    if target > 0 {
                        drop_x = min_opt(drop_x, Some(o));
                    } else {
                        drop_y = min_opt(drop_y, Some(o));
                    }
                    continue;
                }
                let (acc, cap) = if target >= 0 {
                    (&mut acc_a[target as usize], &mut cap_a[target as usize])
                } else {
                    (&mut acc_b[(-target) as usize], &mut cap_b[(-target) as usize])
                };
                if nonzero {
                    let prod = cf.mul(cg).mul_pi_exact(shift).with_prec(work);
                    *acc = Some(match acc.take() {
                        Some(s) => s.add(&prod),
                        None => prod,
                    });
                } else {
                    *cap = (*cap).min(pprec);
                }
            }
        }

        let mut out = Self::zero(field, e, self.kind, d, work);
        for k in 0..=d {
            let mut cap = cap_a[k];
            if let Some(t) = f.tail_x {
                if let Some(m) = g.ymin(d + 1 - k) {
                    cap = cap.min(t + m);
                }
            }
            if let Some(t) = g.tail_x {
                if let Some(m) = f.ymin(d + 1 - k) {
                    cap = cap.min(t + m);
                }
            }
            out.a[k] = match acc_a[k].take() {
                Some(s) => s.with_prec(cap),
                None => DvrElement::zero(field, cap),
            };
        }
        for s in 1..=d {
            let mut cap = cap_b[s];
            if let Some(t) = f.tail_y {
                if let Some(m) = g.xmin(d + 1 - s) {
                    cap = cap.min(t + m);
                }
            }
            if let Some(t) = g.tail_y {
                if let Some(m) = f.xmin(d + 1 - s) {
                    cap = cap.min(t + m);
                }
            }
            out.b[s] = match acc_b[s].take() {
                Some(x) => x.with_prec(cap),
                None => DvrElement::zero(field, cap),
            };
        }
        out.tail_x = min_opt(drop_x, min_opt(f.tail_x, g.tail_x));
        out.tail_y = min_opt(drop_y, min_opt(f.tail_y, g.tail_y));
        out
    }

    pub fn pow(&self, n: u64) -> Self {
        let mut result = Self::one(&self.field, self.e, self.kind, self.trunc, self.working_prec());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiplication by `X^k` (`k ≥ 0`) or `Y^{-k}` (`k < 0`).
    pub fn mul_monomial(&self, k: i64) -> Self {
        let m = Self::monomial(&self.field, self.e, self.kind, self.trunc, self.working_prec(), k);
        self.mul(&m)
    }

    /// Divides every coefficient by `π^k`; fails unless all known coefficients allow it.
    pub fn div_pi(&self, k: usize) -> Result<Self> {
        let mut out = self.clone();
        for c in out.a.iter_mut().chain(out.b.iter_mut()) {
            *c = c.div_pi(k)?;
        }
        out.tail_x = out.tail_x.map(|t| t.saturating_sub(k));
        out.tail_y = out.tail_y.map(|t| t.saturating_sub(k));
        Ok(out)
    }

    /// Newton iteration `g ← g(2 − fg)` starting from the inverse constant term.
    pub fn invert_unit(&self) -> Result<Self> {
        if !self.is_unit() {
            bail!(Domain, "function is not a unit on the {} annulus", self.kind);
        }
        let work = self.working_prec();
        let two = self.constant_like(&DvrElement::from_int(&self.field, 2, work));
        let one = self.constant_like(&DvrElement::one(&self.field, work));
        let mut g = self.constant_like(&self.a[0].invert_unit()?);
        for _ in 0..16 {
            let fg = self.mul(&g);
            if fg.agrees(&one) {
                return Ok(g);
            }
            g = g.mul(&two.sub(&fg));
        }
        Ok(g)
    }

    /// Evaluation on the circle `|X| = 1`: `f(a, a^{-1}π^e)` for a unit `a`.
    pub fn evaluate(&self, a: &DvrElement) -> Result<DvrElement> {
        if !a.is_unit() {
            bail!(Domain, "evaluation point must be a unit");
        }
        let work = self.working_prec();
        let ainv = a.invert_unit()?;
        let y = ainv.mul(&DvrElement::pi_power(&self.field, self.e, work.max(a.prec())));
        let mut acc = DvrElement::zero(&self.field, work);
        let mut xp = DvrElement::one(&self.field, work);
        for i in 0..=self.trunc {
            acc = acc.add(&self.a[i].mul(&xp));
            xp = xp.mul(a);
        }
        let mut yp = y.clone();
        for j in 1..=self.trunc {
            acc = acc.add(&self.b[j].mul(&yp));
            yp = yp.mul(&y);
        }
        let mut cap = acc.prec();
        if let Some(t) = self.tail_x {
            cap = cap.min(t);
        }
        if let Some(t) = self.tail_y {
            cap = cap.min(t + self.e * (self.trunc + 1));
        }
        Ok(acc.with_prec(cap))
    }

    /// Whether all coefficients agree at their common precision.
    pub fn agrees(&self, other: &Self) -> bool {
        let d = self.trunc.min(other.trunc);
        (0..=d).all(|i| self.a[i].agrees(&other.a[i]) && (i == 0 || self.b[i].agrees(&other.b[i])))
    }

    /// Agreement modulo `π^n` on every coefficient whose precision reaches `n`;
    /// returns the smallest precision at which a comparison was made.
    pub fn agreement(&self, other: &Self) -> Option<usize> {
        let d = self.trunc.min(other.trunc);
        let mut min_p = usize::MAX;
        for i in 0..=d {
            for (x, y) in [(&self.a[i], &other.a[i]), (&self.b[i], &other.b[i])] {
                if i == 0 && std::ptr::eq(x, &self.b[0]) {
                    continue;
                }
                if !x.agrees(y) {
                    return None;
                }
                min_p = min_p.min(x.prec().min(y.prec()));
            }
        }
        Some(min_p)
    }

    /// Agreement modulo `π^n` on every coefficient (both sides must be known that far).
    pub fn agrees_to(&self, other: &Self, n: usize) -> bool {
        let d = self.trunc.min(other.trunc);
        (0..=d).all(|i| self.a[i].agrees_to(&other.a[i], n) && (i == 0 || self.b[i].agrees_to(&other.b[i], n)))
    }

    /// Base change to `k[[ϖ]]`, `ϖ^d = π`: the modulus becomes `d e`.
    pub fn base_change_ramified(&self, d: usize) -> Self {
        let mut out = self.map_coeffs(|c| c.base_change_ramified(d));
        out.e = self.e * d;
        out.tail_x = self.tail_x.map(|t| t * d);
        out.tail_y = self.tail_y.map(|t| t * d);
        out
    }

    /// Inverse of [`base_change_ramified`](Self::base_change_ramified).
    pub fn descend_ramified(&self, d: usize) -> Result<Self> {
        if self.e % d != 0 {
            bail!(Domain, "modulus {} is not divisible by {d}", self.e);
        }
        let mut out = self.clone();
        for c in out.a.iter_mut().chain(out.b.iter_mut()) {
            *c = c.descend_ramified(d)?;
        }
        out.e = self.e / d;
        out.tail_x = self.tail_x.map(|t| t.div_ceil(d));
        out.tail_y = self.tail_y.map(|t| t.div_ceil(d));
        Ok(out)
    }

    /// Renders the retained window as a Laurent polynomial.
    pub fn format(&self, uniformizer: &str) -> String {
        let mut parts: Vec<String> = Vec::new();
        let render = |c: &DvrElement, mono: String| -> Option<String> {
            if c.is_zero() {
                return None;
            }
            let cs = c.format(uniformizer);
            let single = c.terms().len() == 1;
            Some(match (mono.is_empty(), cs.as_str()) {
                (true, _) => cs,
                (false, "1") => mono,
                (false, "-1") => format!("-{mono}"),
                (false, _) if single => format!("{cs}*{mono}"),
                (false, _) => format!("({cs})*{mono}"),
            })
        };
        for j in (1..=self.trunc).rev() {
            let mono = if j == 1 { "Y".to_string() } else { format!("Y^{j}") };
            parts.extend(render(&self.b[j], mono));
        }
        for i in 0..=self.trunc {
            let mono = match i {
                0 => String::new(),
                1 => "X".to_string(),
                _ => format!("X^{i}"),
            };
            parts.extend(render(&self.a[i], mono));
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        out
    }

    pub fn to_json(&self) -> LaurentJson {
        let a: Vec<(usize, DvrInput)> = (0..=self.trunc)
            .filter(|&i| !self.a[i].is_zero() || self.a[i].prec() != self.working_prec())
            .map(|i| (i, DvrInput::Full(self.a[i].to_json())))
            .collect();
        let b: Vec<(usize, DvrInput)> = (1..=self.trunc)
            .filter(|&j| !self.b[j].is_zero() || self.b[j].prec() != self.working_prec())
            .map(|j| (j, DvrInput::Full(self.b[j].to_json())))
            .collect();
        LaurentJson {
            field: Some(self.field.spec()),
            e: self.e,
            kind: self.kind,
            trunc: Some(self.trunc),
            prec: Some(self.working_prec()),
            x: a,
            y: b,
            expr: None,
            tail_x: self.tail_x,
            tail_y: self.tail_y,
        }
    }

    /// Reads the JSON form; `default_*` apply to fields the file omits.
    pub fn from_json(j: &LaurentJson, default_field: &Field, default_trunc: usize, default_prec: usize) -> Result<Self> {
        let field = match &j.field {
            Some(s) => Field::from_spec(s)?,
            None => default_field.clone(),
        };
        if j.e == 0 {
            bail!(Parse, "modulus e must be at least 1");
        }
        let trunc = j.trunc.unwrap_or(default_trunc);
        let prec = j.prec.unwrap_or(default_prec);
        let mut out = Self::zero(&field, j.e, j.kind, trunc, prec);
        if let Some(expr) = &j.expr {
            out = out.add(&Self::parse(&field, j.e, j.kind, trunc, prec, expr)?);
        }
        for (i, c) in &j.x {
            if *i > trunc {
                bail!(Parse, "X-degree {i} exceeds truncation {trunc}");
            }
            out.a[*i] = out.a[*i].add(&DvrElement::from_json(&field, c, prec)?);
        }
        for (i, c) in &j.y {
            if *i == 0 || *i > trunc {
                bail!(Parse, "Y-degree {i} outside 1..={trunc}");
            }
            out.b[*i] = out.b[*i].add(&DvrElement::from_json(&field, c, prec)?);
        }
        out.tail_x = min_opt(out.tail_x, j.tail_x);
        out.tail_y = min_opt(out.tail_y, j.tail_y);
        Ok(out)
    }
}

/// JSON form: `{"e":2,"type":"closed","trunc":24,"x":[[i,coeff]…],"y":[[i,coeff]…]}`.
/// `expr` may give the function as a Laurent polynomial in `X`, `Y`, `pi`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaurentJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    pub e: usize,
    #[serde(rename = "type")]
    pub kind: AnnulusType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<usize>,
    #[serde(default)]
    pub x: Vec<(usize, DvrInput)>,
    #[serde(default)]
    pub y: Vec<(usize, DvrInput)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_y: Option<usize>,
}

#[allow(dead_code)]
fn _assert_json(_: DvrJson) {}
