//! Division by zeros on the annulus and Weierstrass preparation
//! `Y^α f = π^η P(Y) u`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::newton::fmt_r;
use super::{AnnulusType, LaurentFunction};
use crate::dvr::{hensel_lift_root, poly_eval, DvrElement, DvrJson};
use crate::error::{bail, Result};
use crate::field::{Fe, Field};

/// Output of [`LaurentFunction::weierstrass_prepare`].
#[derive(Clone, Debug)]
pub struct Preparation {
    /// Monic polynomial in `Y`, coefficients from low to high degree.
    pub p: Vec<DvrElement>,
    pub u: LaurentFunction,
    pub alpha: i64,
    pub eta: i64,
}

#[derive(Serialize)]
pub struct PreparationJson {
    pub p: Vec<DvrJson>,
    pub u: super::LaurentJson,
    pub alpha: i64,
    pub eta: i64,
}

impl Preparation {
    pub fn degree(&self) -> usize {
        self.p.len() - 1
    }

    /// `P` as a function on the annulus of `like`.
    pub fn p_function(&self, like: &LaurentFunction) -> LaurentFunction {
        let mut out = like.zero_like();
        for (j, c) in self.p.iter().enumerate() {
            if j == 0 {
                out.a[0] = c.clone();
            } else if j <= out.trunc {
                out.b[j] = c.clone();
            } else {
                out.tail_y = Some(0);
            }
        }
        out
    }

    /// Both sides of `Y^α f = π^η P u`, cleared of negative powers.
    pub fn identity_sides(&self, f: &LaurentFunction) -> (LaurentFunction, LaurentFunction) {
        let pu = self.p_function(f).mul(&self.u);
        let field = f.field();
        let work = f.working_prec();
        if self.alpha >= 0 {
            let lhs = f.mul_monomial(-self.alpha);
            let rhs = pu.scale(&DvrElement::pi_power(field, self.eta as usize, work));
            (lhs, rhs)
        } else {
            // Y^{-a} = X^a / π^{ea}
            let a = (-self.alpha) as usize;
            let lhs = f.mul_monomial(a as i64);
            let rhs = pu.scale(&DvrElement::pi_power(field, self.eta as usize + f.e * a, work));
            (lhs, rhs)
        }
    }

    /// Checks the identity modulo `π^n` coefficientwise.
    pub fn verify(&self, f: &LaurentFunction, n: usize) -> bool {
        let (l, r) = self.identity_sides(f);
        l.agrees_to(&r, n)
    }

    pub fn to_json(&self) -> PreparationJson {
        PreparationJson { p: self.p.iter().map(|c| c.to_json()).collect(), u: self.u.to_json(), alpha: self.alpha, eta: self.eta }
    }

    pub fn format_p(&self) -> String {
        let mut parts = Vec::new();
        for (j, c) in self.p.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match j {
                0 => String::new(),
                1 => "Y".into(),
                _ => format!("Y^{j}"),
            };
            let cs = c.format("pi");
            parts.push(match (mono.is_empty(), cs.as_str()) {
                (true, _) => cs,
                (false, "1") => mono,
                (false, _) => format!("({cs})*{mono}"),
            });
        }
        parts.join(" + ")
    }
}

/// Divides out the zero `X = π^r t` (`t` a unit): returns `g` with
/// `Y f = (Y − π^{e−r} t^{−1}) g`.
pub fn divide_zero(f: &LaurentFunction, r: usize, t: &DvrElement) -> Result<LaurentFunction> {
    if r > f.e {
        bail!(Domain, "radius {r} exceeds the modulus {}", f.e);
    }
    let tinv = t.invert_unit()?;
    let work = f.working_prec();
    let x0 = t.mul_pi_exact(r).with_prec(work);
    let y0 = tinv.mul_pi_exact(f.e - r).with_prec(work);
    let d = f.trunc;
    let mut g = f.zero_like();
    // A_i = Σ_{k>i} a_k x0^{k-i} = x0 (a_{i+1} + A_{i+1})
    let mut acc = DvrElement::zero(&f.field, work);
    for i in (0..d).rev() {
        acc = x0.mul(&f.a[i + 1].add(&acc));
        g.a[i] = acc.neg();
    }
    g.a[d] = DvrElement::zero(&f.field, work);
    // B_s = Σ_{j≥s} b_j y0^{j-s} = b_s + y0 B_{s+1}
    let mut acc = DvrElement::zero(&f.field, work);
    for s in (1..=d).rev() {
        acc = f.b[s].add(&y0.mul(&acc));
        g.b[s] = acc.clone();
    }
    // dropped X-tail terms reach a'_i with order ≥ t_x + r(D+1-i); the Y-tail
    // reaches b'_s with order ≥ t_y + (e-r)(D+1-s)
    if let Some(tx) = f.tail_x {
        for i in 0..=d {
            let cap = tx + r * (d + 1 - i);
            g.a[i] = g.a[i].with_prec(g.a[i].prec().min(cap));
        }
    }
    if let Some(ty) = f.tail_y {
        for s in 1..=d {
            let cap = ty + (f.e - r) * (d + 1 - s);
            g.b[s] = g.b[s].with_prec(g.b[s].prec().min(cap));
        }
    }
    g.tail_x = f.tail_x;
    g.tail_y = f.tail_y;
    Ok(g)
}

/// Roots of `Σ h_i t^i` over the residue field with multiplicities.
/// Finite fields are searched exhaustively, `Q` by the rational root test.
pub fn residual_roots(field: &Field, h: &[Fe]) -> Result<Vec<(Fe, usize)>> {
    let mut h: Vec<Fe> = h.to_vec();
    while h.len() > 1 && field.is_zero(h.last().expect("nonempty")) {
        h.pop();
    }
    let candidates: Vec<Fe> = if field.is_rational() {
        rational_candidates(field, &h)?
    } else {
        if field.order().is_some_and(|q| q > 1 << 20) {
            bail!(Unsupported, "residue field too large for root search");
        }
        field.elements()?
    };
    let mut out = Vec::new();
    for c in candidates {
        if field.is_zero(&c) {
            continue;
        }
        let mut mult = 0;
        let mut cur = h.clone();
        loop {
            if cur.len() < 2 {
                break;
            }
            let (q, rem) = synthetic_div(field, &cur, &c);
            if !field.is_zero(&rem) {
                break;
            }
            mult += 1;
            cur = q;
        }
        if mult > 0 {
            out.push((c, mult));
        }
    }
    Ok(out)
}

fn synthetic_div(field: &Field, h: &[Fe], c: &Fe) -> (Vec<Fe>, Fe) {
    let n = h.len();
    let mut q = vec![field.zero(); n - 1];
    let mut acc = field.zero();
    for i in (0..n).rev() {
        acc = field.add(&field.mul(&acc, c), &h[i]);
        if i > 0 {
            q[i - 1] = acc.clone();
        }
    }
    (q, acc)
}

fn divisors(n: &BigInt) -> Result<Vec<u64>> {
    let Some(n) = n.abs().to_u64() else {
        bail!(Unsupported, "coefficient too large for the rational root test");
    };
    if n > 1_000_000_000_000 {
        bail!(Unsupported, "coefficient too large for the rational root test");
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    Ok(out)
}

fn rational_candidates(field: &Field, h: &[Fe]) -> Result<Vec<Fe>> {
    let coeffs: Vec<BigRational> = h.iter().map(|c| c.rat().clone()).collect();
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let Some(low) = ints.iter().find(|c| !c.is_zero()) else {
        return Ok(Vec::new());
    };
    let high = ints.last().expect("nonempty");
    let mut out = Vec::new();
    for p in divisors(low)? {
        for q in divisors(high)? {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            for s in [1i64, -1] {
                let num = BigInt::from(p) * s;
                out.push(field.from_ratio(&num, &BigInt::from(q))?);
            }
        }
    }
    Ok(out)
}

fn lcm_denoms(radii: &[Rational64]) -> i64 {
    radii.iter().fold(1i64, |acc, r| acc.lcm(r.denom()))
}

impl LaurentFunction {
    /// Division by `Y − a^{−1}π^e` at a zero `a` on the circle `|X| = 1`.
    pub fn divide_root(&self, a: &DvrElement) -> Result<LaurentFunction> {
        if !a.is_unit() {
            bail!(Domain, "division point must be a unit");
        }
        let val = self.evaluate(a)?;
        if !val.is_zero() {
            bail!(Domain, "f does not vanish at the given point (value {})", val.format("pi"));
        }
        let work = self.working_prec();
        let ainv = a.invert_unit()?;
        // rescale so the zero sits at X = 1
        let mut pa = DvrElement::one(&self.field, work);
        let mut pinv = DvrElement::one(&self.field, work);
        let mut s = self.clone();
        for i in 0..=self.trunc {
            s.a[i] = self.a[i].mul(&pa);
            if i > 0 {
                s.b[i] = self.b[i].mul(&pinv);
            }
            pa = pa.mul(a);
            pinv = pinv.mul(&ainv);
        }
        let g1 = divide_zero(&s, 0, &DvrElement::one(&self.field, work))?;
        // rescale back: X ↦ a^{-1}X, Y ↦ aY
        let mut out = g1.clone();
        let mut pa = DvrElement::one(&self.field, work);
        let mut pinv = DvrElement::one(&self.field, work);
        for i in 0..=self.trunc {
            out.a[i] = g1.a[i].mul(&pinv);
            if i > 0 {
                out.b[i] = g1.b[i].mul(&pa);
            }
            pa = pa.mul(a);
            pinv = pinv.mul(&ainv);
        }
        Ok(out)
    }

    /// `Y^α f = π^η P(Y) u` with `P` monic and `u` a unit.
    pub fn weierstrass_prepare(&self) -> Result<Preparation> {
        let bd = self.boundary_valuations()?;
        let alpha = match self.kind {
            AnnulusType::Open => bd.v_x,
            _ => bd.nu_x.expect("exposed"),
        };
        let radii = self.critical_radii()?;
        let d = lcm_denoms(&radii);
        let prep = if d == 1 {
            self.prepare_integral()?
        } else {
            let d = d as usize;
            let big = self.base_change_ramified(d).prepare_integral()?;
            let p = big.p.iter().map(|c| c.descend_ramified(d)).collect::<Result<Vec<_>>>()?;
            let u = big.u.descend_ramified(d)?;
            if big.eta % d as i64 != 0 {
                bail!(Domain, "η = {} does not descend", big.eta);
            }
            Preparation { p, u, alpha: big.alpha, eta: big.eta / d as i64 }
        };
        if prep.alpha != alpha {
            bail!(Precision, "degree bookkeeping mismatch: α = {alpha} from boundary data, {} from division", prep.alpha);
        }
        if prep.eta != bd.eta_y {
            bail!(Precision, "η = {} from division differs from η_Y = {}", prep.eta, bd.eta_y);
        }
        Ok(prep)
    }

    fn prepare_integral(&self) -> Result<Preparation> {
        let poly = self.newton_polygon()?;
        let work = self.working_prec();
        let field = self.field.clone();
        let mut g = self.clone();
        let mut p = vec![DvrElement::one(&field, work)];
        let mut n = 0i64;
        for bp in &poly.breakpoints {
            let r = bp.r.to_integer() as usize;
            let eta_r = bp.value.to_integer() as usize;
            let lifted = self.zeros_at_radius(r, eta_r, bp.right_slope, bp.left_slope)?;
            for t in lifted {
                g = divide_zero(&g, r, &t)?;
                let y0 = t.invert_unit()?.mul_pi_exact(self.e - r).with_prec(work);
                // P ← P·(Y − y0)
                let mut next = vec![DvrElement::zero(&field, work); p.len() + 1];
                for (j, c) in p.iter().enumerate() {
                    next[j + 1] = next[j + 1].add(c);
                    next[j] = next[j].sub(&c.mul(&y0));
                }
                p = next;
                n += 1;
            }
        }
        // g has a single dominant monomial on the whole annulus
        let mid = Rational64::new(self.e as i64, 2);
        let act = g.active_at(mid)?;
        if act.v != act.nu {
            bail!(Precision, "quotient still vanishes inside the annulus");
        }
        let vg = act.v;
        let eta_g = g.x_coeff(vg).ord().expect("active coefficient") as i64;
        let u = if vg >= 0 {
            g.mul_monomial(-vg).div_pi((eta_g + self.e as i64 * vg) as usize)?
        } else {
            g.mul_monomial(-vg).div_pi(eta_g as usize)?
        };
        if !u.is_unit() {
            bail!(Precision, "cofactor is not a unit at the retained precision");
        }
        Ok(Preparation { p, u, alpha: n + vg, eta: eta_g + self.e as i64 * vg })
    }

    /// Lifts the zeros `π^r t` on `|X| = |π|^r` from simple residual roots.
    fn zeros_at_radius(&self, r: usize, eta_r: usize, v: i64, nu: i64) -> Result<Vec<DvrElement>> {
        let field = &self.field;
        let d = self.trunc;
        let e = self.e;
        let resid: Vec<Fe> = (v..=nu)
            .map(|k| {
                let c = self.x_coeff(k);
                let shift = (k * r as i64) + c.ord_or_prec() as i64 - eta_r as i64;
                if shift == 0 {
                    c.coeff(c.ord_or_prec())
                } else {
                    field.zero()
                }
            })
            .collect();
        let roots = residual_roots(field, &resid)?;
        let total: usize = roots.iter().map(|(_, m)| m).sum();
        if total as i64 != nu - v {
            bail!(
                Unsupported,
                "unsupported splitting: residual polynomial at r = {r} has an irreducible factor of degree > 1 over {field}"
            );
        }
        // G(t) = Σ_k c_k π^{rk − η_r} t^{k + D}
        let mut cap = usize::MAX;
        if let Some(tx) = self.tail_x {
            cap = cap.min((tx + r * (d + 1)).saturating_sub(eta_r));
        }
        if let Some(ty) = self.tail_y {
            cap = cap.min((ty + (e - r) * (d + 1)).saturating_sub(eta_r));
        }
        let mut poly = Vec::with_capacity(2 * d + 1);
        for k in -(d as i64)..=(d as i64) {
            let c = if k >= 0 {
                self.a[k as usize].mul_pi_exact(r * k as usize)
            } else {
                self.b[(-k) as usize].mul_pi_exact((e - r) * (-k) as usize)
            };
            let c = c.div_pi_unchecked(eta_r);
            poly.push(if cap < c.prec() { c.with_prec(cap) } else { c });
        }
        if poly.iter().map(|c| c.prec()).min().unwrap_or(0) == 0 {
            bail!(Precision, "no precision left to locate zeros at r = {}", fmt_r(Rational64::from_integer(r as i64)));
        }
        let mut out = Vec::new();
        for (t, mult) in roots {
            if mult == 1 {
                out.push(hensel_lift_root(&poly, &DvrElement::constant(field, &t, 1))?);
            } else {
                let work = poly.iter().map(|c| c.prec()).min().unwrap_or(0);
                let t0 = DvrElement::constant(field, &t, work);
                for z in roots_near_zero(&taylor_shift(&poly, &t0), mult)? {
                    out.push(t0.add(&z));
                }
            }
        }
        Ok(out)
    }
}

/// `Σ_l C(l+j, j) f_{l+j} T^l`.
fn hasse_derivative(f: &[DvrElement], j: usize) -> Vec<DvrElement> {
    let field = f[0].field();
    (0..f.len().saturating_sub(j))
        .map(|l| {
            let b = num_integer::binomial(BigInt::from(l + j), BigInt::from(j));
            f[l + j].scale(&field.from_bigint(&b))
        })
        .collect()
}

/// A root of exact multiplicity `k` over the residual root `w`: a simple
/// root of the `(k−1)`-th Hasse derivative at which all lower ones vanish.
fn multiple_root(f: &[DvrElement], w: &Fe, k: usize) -> Result<Option<DvrElement>> {
    let field = f[0].field().clone();
    let p = field.characteristic() as usize;
    if p != 0 && k >= p {
        return Ok(None);
    }
    let d = hasse_derivative(f, k - 1);
    let Ok(x) = hensel_lift_root(&d, &DvrElement::constant(&field, w, 1)) else {
        return Ok(None);
    };
    let vanish = (0..k - 1).all(|j| poly_eval(&hasse_derivative(f, j), &x).is_zero());
    Ok(vanish.then_some(x))
}

/// Coefficients of `f(T + a)`.
fn taylor_shift(f: &[DvrElement], a: &DvrElement) -> Vec<DvrElement> {
    let mut c = f.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            c[j] = c[j].add(&c[j + 1].mul(a));
        }
    }
    c
}

/// The `k` roots of positive order of `h`, where `h_k` is a unit and `h_j`
/// for `j < k` are not: separates clustered roots by walking the Newton
/// polygon, recentring on each repeated residual root.
fn roots_near_zero(h: &[DvrElement], k: usize) -> Result<Vec<DvrElement>> {
    let Some(first) = h.first() else {
        bail!(Domain, "empty polynomial");
    };
    let field = first.field().clone();
    let work = h.iter().map(|c| c.prec()).min().unwrap_or(0);
    if work == 0 {
        bail!(Precision, "no precision left to separate clustered zeros");
    }
    if h.len() <= k || !h[k].is_unit() {
        bail!(Domain, "cluster size does not match the residual multiplicity");
    }
    // z = 0 to the available precision
    let m0 = (0..k).find(|&j| !h[j].is_zero()).unwrap_or(k);
    let mut out = vec![DvrElement::zero(&field, work); m0];
    let mut i = m0;
    while i < k {
        let oi = h[i].ord().expect("nonzero") as i64;
        // steepest descent from (i, o_i); ties go to the farthest point
        let mut best: Option<(usize, Rational64)> = None;
        for j in i + 1..=k {
            let Some(oj) = h[j].ord() else { continue };
            let slope = Rational64::new(oi - oj as i64, (j - i) as i64);
            if best.as_ref().is_none_or(|(_, b)| slope >= *b) {
                best = Some((j, slope));
            }
        }
        let (j, s) = best.expect("h_k is a unit");
        if !s.is_integer() {
            bail!(Unsupported, "unsupported splitting: zeros separated by a fractional distance {}; extend k or refuse", fmt_r(s));
        }
        let s = s.to_integer() as usize;
        // h(π^s w) / π^c has reduction w^i R(w)
        let c = oi as usize + s * i;
        let scaled: Vec<DvrElement> = h
            .iter()
            .enumerate()
            .map(|(l, a)| {
                let b = a.mul_pi_exact(s * l);
                if b.ord_or_prec() < c || b.prec() == c {
                    bail!(Precision, "no precision left to separate clustered zeros");
                }
                Ok(b.div_pi_unchecked(c))
            })
            .collect::<Result<_>>()?;
        let resid: Vec<Fe> = scaled[i..=j].iter().map(|a| a.coeff(0)).collect();
        let roots = residual_roots(&field, &resid)?;
        if roots.iter().map(|(_, m)| m).sum::<usize>() != j - i {
            bail!(Unsupported, "unsupported splitting: clustered zeros are not rational over {field}");
        }
        for (w, mult) in roots {
            let ws = if mult == 1 {
                vec![hensel_lift_root(&scaled, &DvrElement::constant(&field, &w, 1))?]
            } else if let Some(w) = multiple_root(&scaled, &w, mult)? {
                vec![w; mult]
            } else {
                let w0 = DvrElement::constant(&field, &w, work);
                roots_near_zero(&taylor_shift(&scaled, &w0), mult)?.into_iter().map(|d| w0.add(&d)).collect()
            };
            out.extend(ws.into_iter().map(|w| w.mul_pi_exact(s)));
        }
        i = j;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lf(e: usize, kind: AnnulusType, s: &str) -> LaurentFunction {
        LaurentFunction::parse(&Field::prime(7).unwrap(), e, kind, 10, 24, s).unwrap()
    }

    #[test]
    fn divide_exact_factor() {
        let f = lf(2, AnnulusType::Closed, "Y - pi^2");
        let one = DvrElement::one(f.field(), 24);
        let g = f.divide_root(&one).unwrap();
        assert!(g.agrees(&lf(2, AnnulusType::Closed, "Y")));
        assert!(lf(2, AnnulusType::Closed, "1").divide_root(&one).is_err());
    }

    #[test]
    fn divide_root_matches_general_division() {
        let f = lf(2, AnnulusType::Closed, "(Y - 3pi^2)*(1 + pi*X + Y)");
        let a = DvrElement::from_int(f.field(), 5, 24); // 3^{-1} mod 7
        let g1 = f.divide_root(&a).unwrap();
        let g2 = divide_zero(&f, 0, &a).unwrap();
        assert!(g1.agrees(&g2));
        let lhs = f.mul_monomial(-1);
        let rhs = lf(2, AnnulusType::Closed, "Y - 3pi^2").mul(&g1);
        assert!(lhs.agrees(&rhs));
    }

    #[test]
    fn prepares_product_of_factors() {
        let f = lf(3, AnnulusType::Closed, "(Y - pi)*(Y - pi^2)*(1 + pi*X)");
        let prep = f.weierstrass_prepare().unwrap();
        assert_eq!(prep.degree(), 2);
        let expected = lf(3, AnnulusType::Closed, "(Y - pi)*(Y - pi^2)");
        assert!(prep.p_function(&f).agrees(&expected));
        assert!(prep.u.agrees(&lf(3, AnnulusType::Closed, "1 + pi*X")));
        assert!(prep.verify(&f, 16));
    }

    #[test]
    fn prepares_fractional_radius() {
        // Y^2 - pi has its zeros at r = 1/2 once e = 1
        let f = lf(1, AnnulusType::Closed, "Y^2 - pi");
        let prep = f.weierstrass_prepare();
        // the residual roots of t^2 - 1 after base change split over F_7
        let prep = prep.unwrap();
        assert_eq!(prep.degree(), 2);
        assert!(prep.verify(&f, 16));
    }

    #[test]
    fn open_type_exact_factor() {
        let f = lf(2, AnnulusType::Open, "Y - pi^2");
        let prep = f.weierstrass_prepare().unwrap();
        assert_eq!((prep.degree(), prep.alpha, prep.eta), (0, -1, 0));
        assert!(prep.verify(&f, 16));
        let c = f.with_kind(AnnulusType::Closed).weierstrass_prepare().unwrap();
        assert_eq!((c.degree(), c.alpha, c.eta), (1, 0, 0));
    }

    #[test]
    fn irreducible_residual_factor_is_refused() {
        // t^2 + 1 is irreducible over F_7
        let f = lf(2, AnnulusType::Closed, "Y^2 + pi^2");
        assert!(matches!(f.weierstrass_prepare(), Err(crate::Error::Unsupported(_))));
    }
}
