//! Residue fields: prime fields `F_p`, their extensions `F_{p^d}`, and `Q`.
//!
//! Extension elements are packed as base-`p` integers (digit `k` is the
//! coefficient of `t^k`) and multiplied through discrete log tables.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};

/// Largest field order for which log tables are built.
const MAX_ORDER: u64 = 1 << 24;

/// A single field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Fe {
    Fin(u32),
    Rat(Box<BigRational>),
}

impl Fe {
    pub fn fin(&self) -> u32 {
        match self {
            Fe::Fin(x) => *x,
            Fe::Rat(_) => panic!("rational element used in a finite field"),
        }
    }

    pub fn rat(&self) -> &BigRational {
        match self {
            Fe::Rat(r) => r,
            Fe::Fin(_) => panic!("finite element used in the rationals"),
        }
    }
}

#[derive(Debug)]
struct FieldData {
    p: u32,
    degree: u32,
    /// Monic modulus, low to high, length `degree + 1` (empty for `Q`).
    modulus: Vec<u32>,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// A coefficient field. Cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.0.p, self.0.degree) {
            (0, _) => write!(f, "Q"),
            (p, 1) => write!(f, "F_{p}"),
            (p, d) => write!(f, "F_{}^{} = F_{}[t]/({})", p, d, p, self.modulus_string()),
        }
    }
}

/// JSON descriptor: `{"char":7}`, `{"char":0}` or
/// `{"char":7,"degree":2,"modulus":[4,0,1]}` (monic, low to high).
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldSpec {
    #[serde(rename = "char")]
    pub characteristic: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

// Dense polynomials over F_p, low to high, used for table construction and
// irreducibility tests only.
mod fp_poly {
    use super::pow_mod;

    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let inv_lead = pow_mod(m[dm], p - 2, p);
        while r.len() > dm {
            let c = r[r.len() - 1] * inv_lead % p;
            let shift = r.len() - 1 - dm;
            for (i, mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn pow_mod_poly(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut r = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = mul_mod(&r, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out = vec![0u64; n];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *o = (x + p - y) % p;
        }
        trim(&mut out);
        out
    }
}

/// Rabin's irreducibility test for a monic polynomial over `F_p`.
pub fn is_irreducible(p: u32, modulus: &[u32]) -> bool {
    let p64 = p as u64;
    let m: Vec<u64> = modulus.iter().map(|&c| c as u64 % p64).collect();
    let d = m.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let pd = (p as u128).pow(d as u32);
    let xq = fp_poly::pow_mod_poly(&x, pd, &m, p64);
    if fp_poly::sub(&xq, &x, p64) != Vec::<u64>::new() {
        return false;
    }
    for ell in prime_factors(d as u64) {
        let e = (p as u128).pow((d as u64 / ell) as u32);
        let xe = fp_poly::pow_mod_poly(&x, e, &m, p64);
        let diff = fp_poly::sub(&xe, &x, p64);
        let g = fp_poly::gcd(&m, &diff, p64);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

impl Field {
    pub fn rationals() -> Field {
        Field(Arc::new(FieldData { p: 0, degree: 1, modulus: Vec::new(), q: 0, exp: Vec::new(), log: Vec::new() }))
    }

    pub fn prime(p: u32) -> Result<Field> {
        if !is_prime(p as u64) || p >= (1 << 31) {
            bail!(Domain, "characteristic {p} is not a supported prime");
        }
        Ok(Field(Arc::new(FieldData { p, degree: 1, modulus: vec![0, 1], q: p, exp: Vec::new(), log: Vec::new() })))
    }

    /// `F_p[t]/(modulus)`; the modulus must be monic and irreducible.
    pub fn extension(p: u32, modulus: &[u32]) -> Result<Field> {
        if !is_prime(p as u64) {
            bail!(Domain, "characteristic {p} is not prime");
        }
        let mut m: Vec<u32> = modulus.iter().map(|c| c % p).collect();
        while m.last() == Some(&0) {
            m.pop();
        }
        if m.len() < 2 {
            bail!(Domain, "extension modulus must have positive degree");
        }
        if *m.last().unwrap() != 1 {
            bail!(Domain, "extension modulus must be monic");
        }
        let d = (m.len() - 1) as u32;
        if d == 1 {
            return Field::prime(p);
        }
        let q = (p as u64).checked_pow(d).filter(|&q| q <= MAX_ORDER);
        let Some(q) = q else { bail!(Unsupported, "field of order {p}^{d} is too large") };
        if !is_irreducible(p, &m) {
            bail!(Domain, "modulus {:?} is reducible over F_{p}", m);
        }
        let q = q as u32;
        let (exp, log) = build_tables(p, &m, q)?;
        Ok(Field(Arc::new(FieldData { p, degree: d, modulus: m, q, exp, log })))
    }

    /// `F_{p^d}` with the lexicographically first monic irreducible modulus.
    pub fn extension_auto(p: u32, d: u32) -> Result<Field> {
        if d == 1 {
            return Field::prime(p);
        }
        let total = (p as u64).checked_pow(d).unwrap_or(u64::MAX);
        if total > MAX_ORDER {
            bail!(Unsupported, "field of order {p}^{d} is too large");
        }
        for code in 0..total {
            let mut m = Vec::with_capacity(d as usize + 1);
            let mut c = code;
            for _ in 0..d {
                m.push((c % p as u64) as u32);
                c /= p as u64;
            }
            m.push(1);
            if m[0] != 0 && is_irreducible(p, &m) {
                return Field::extension(p, &m);
            }
        }
        bail!(Domain, "no irreducible polynomial of degree {d} over F_{p}")
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Field> {
        match (spec.characteristic, &spec.modulus, spec.degree) {
            (0, None, None | Some(1)) => Ok(Field::rationals()),
            (0, _, _) => bail!(Unsupported, "extensions of Q are not supported"),
            (p, Some(m), _) => Field::extension(p, m),
            (p, None, Some(d)) => Field::extension_auto(p, d),
            (p, None, None) => Field::prime(p),
        }
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            characteristic: self.0.p,
            degree: (self.0.degree > 1).then_some(self.0.degree),
            modulus: (self.0.degree > 1).then(|| self.0.modulus.clone()),
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }
    pub fn degree(&self) -> u32 {
        self.0.degree
    }
    pub fn is_rational(&self) -> bool {
        self.0.p == 0
    }
    /// Number of elements, `None` for `Q`.
    pub fn order(&self) -> Option<u64> {
        (self.0.p != 0).then_some(self.0.q as u64)
    }
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    fn modulus_string(&self) -> String {
        let terms: Vec<String> = (0..self.0.modulus.len())
            .rev()
            .filter(|&i| self.0.modulus[i] != 0)
            .map(|i| {
                let c = self.0.modulus[i];
                match (i, c) {
                    (0, c) => c.to_string(),
                    (1, 1) => "t".into(),
                    (1, c) => format!("{c}*t"),
                    (i, 1) => format!("t^{i}"),
                    (i, c) => format!("{c}*t^{i}"),
                }
            })
            .collect();
        terms.join("+")
    }

    // ---- raw finite-field arithmetic on packed codes ----

    #[inline]
    pub(crate) fn fadd(&self, a: u32, b: u32) -> u32 {
        let d = &*self.0;
        if d.degree == 1 {
            let s = a as u64 + b as u64;
            let p = d.p as u64;
            (if s >= p { s - p } else { s }) as u32
        } else {
            let (mut a, mut b) = (a, b);
            let mut out = 0u32;
            let mut place = 1u32;
            for _ in 0..d.degree {
                let s = (a % d.p + b % d.p) % d.p;
                out += s * place;
                place = place.wrapping_mul(d.p);
                a /= d.p;
                b /= d.p;
            }
            out
        }
    }

    #[inline]
    pub(crate) fn fneg(&self, a: u32) -> u32 {
        let d = &*self.0;
        if d.degree == 1 {
            if a == 0 {
                0
            } else {
                d.p - a
            }
        } else {
            let mut a = a;
            let mut out = 0u32;
            let mut place = 1u32;
            for _ in 0..d.degree {
                let c = a % d.p;
                out += ((d.p - c) % d.p) * place;
                place = place.wrapping_mul(d.p);
                a /= d.p;
            }
            out
        }
    }

    #[inline]
    pub(crate) fn fsub(&self, a: u32, b: u32) -> u32 {
        self.fadd(a, self.fneg(b))
    }

    #[inline]
    pub(crate) fn fmul(&self, a: u32, b: u32) -> u32 {
        let d = &*self.0;
        if d.degree == 1 {
            (a as u64 * b as u64 % d.p as u64) as u32
        } else if a == 0 || b == 0 {
            0
        } else {
            let n = d.q - 1;
            let s = d.log[a as usize] as u64 + d.log[b as usize] as u64;
            d.exp[(s % n as u64) as usize]
        }
    }

    pub(crate) fn finv(&self, a: u32) -> Option<u32> {
        let d = &*self.0;
        if a == 0 {
            return None;
        }
        if d.degree == 1 {
            Some(pow_mod(a as u64, d.p as u64 - 2, d.p as u64) as u32)
        } else {
            let n = d.q - 1;
            Some(d.exp[((n - d.log[a as usize]) % n) as usize])
        }
    }

    fn fpow(&self, a: u32, e: u64) -> u32 {
        let d = &*self.0;
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if d.degree == 1 {
            pow_mod(a as u64, e, d.p as u64) as u32
        } else {
            let n = (d.q - 1) as u64;
            d.exp[((d.log[a as usize] as u64 % n) * (e % n) % n) as usize]
        }
    }

    // ---- element-level API ----

    pub fn zero(&self) -> Fe {
        if self.is_rational() {
            Fe::Rat(Box::new(BigRational::zero()))
        } else {
            Fe::Fin(0)
        }
    }

    pub fn one(&self) -> Fe {
        if self.is_rational() {
            Fe::Rat(Box::new(BigRational::one()))
        } else {
            Fe::Fin(1)
        }
    }

    pub fn from_int(&self, n: i64) -> Fe {
        if self.is_rational() {
            Fe::Rat(Box::new(BigRational::from_integer(BigInt::from(n))))
        } else {
            Fe::Fin(n.rem_euclid(self.0.p as i64) as u32)
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Fe {
        if self.is_rational() {
            Fe::Rat(Box::new(BigRational::from_integer(n.clone())))
        } else {
            let p = BigInt::from(self.0.p);
            Fe::Fin(n.mod_floor(&p).to_u32().expect("reduced"))
        }
    }

    /// The class of `num/den`, failing when `den` vanishes in the field.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Fe> {
        let d = self.from_bigint(den);
        if self.is_zero(&d) {
            bail!(Domain, "denominator {den} vanishes in {self}");
        }
        Ok(self.div(&self.from_bigint(num), &d))
    }

    /// The class of the extension generator `t`.
    pub fn generator(&self) -> Result<Fe> {
        if self.0.degree < 2 {
            bail!(Domain, "{self} has no extension generator");
        }
        Ok(Fe::Fin(self.0.p))
    }

    pub fn is_zero(&self, a: &Fe) -> bool {
        match a {
            Fe::Fin(x) => *x == 0,
            Fe::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self, a: &Fe) -> bool {
        match a {
            Fe::Fin(x) => *x == 1,
            Fe::Rat(r) => r.is_one(),
        }
    }

    pub fn add(&self, a: &Fe, b: &Fe) -> Fe {
        match (a, b) {
            (Fe::Fin(x), Fe::Fin(y)) => Fe::Fin(self.fadd(*x, *y)),
            (Fe::Rat(x), Fe::Rat(y)) => Fe::Rat(Box::new(&**x + &**y)),
            _ => panic!("mixed field elements"),
        }
    }

    pub fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        match (a, b) {
            (Fe::Fin(x), Fe::Fin(y)) => Fe::Fin(self.fsub(*x, *y)),
            (Fe::Rat(x), Fe::Rat(y)) => Fe::Rat(Box::new(&**x - &**y)),
            _ => panic!("mixed field elements"),
        }
    }

    pub fn neg(&self, a: &Fe) -> Fe {
        match a {
            Fe::Fin(x) => Fe::Fin(self.fneg(*x)),
            Fe::Rat(x) => Fe::Rat(Box::new(-&**x)),
        }
    }

    pub fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        match (a, b) {
            (Fe::Fin(x), Fe::Fin(y)) => Fe::Fin(self.fmul(*x, *y)),
            (Fe::Rat(x), Fe::Rat(y)) => Fe::Rat(Box::new(&**x * &**y)),
            _ => panic!("mixed field elements"),
        }
    }

    pub fn inv(&self, a: &Fe) -> Option<Fe> {
        match a {
            Fe::Fin(x) => self.finv(*x).map(Fe::Fin),
            Fe::Rat(x) => (!x.is_zero()).then(|| Fe::Rat(Box::new(x.recip()))),
        }
    }

    /// Panics on division by zero; callers check first.
    pub fn div(&self, a: &Fe, b: &Fe) -> Fe {
        self.mul(a, &self.inv(b).expect("division by zero in field"))
    }

    pub fn pow(&self, a: &Fe, e: i64) -> Fe {
        let base = if e < 0 { self.inv(a).expect("negative power of zero") } else { a.clone() };
        let e = e.unsigned_abs();
        match &base {
            Fe::Fin(x) => Fe::Fin(self.fpow(*x, e)),
            Fe::Rat(x) => {
                let mut r = BigRational::one();
                for _ in 0..e {
                    r *= &**x;
                }
                Fe::Rat(Box::new(r))
            }
        }
    }

    /// `a ↦ a^{p^j}`, the identity on `Q` and on prime fields.
    pub fn frobenius(&self, a: &Fe, j: u32) -> Fe {
        let d = &*self.0;
        if d.degree == 1 || j % d.degree == 0 {
            return a.clone();
        }
        let x = a.fin();
        if x == 0 {
            return Fe::Fin(0);
        }
        let n = (d.q - 1) as u64;
        let pj = pow_mod(d.p as u64, (j % d.degree) as u64, n);
        Fe::Fin(d.exp[(d.log[x as usize] as u64 * pj % n) as usize])
    }

    /// Whether `a` lies in the prime field.
    pub fn in_prime_field(&self, a: &Fe) -> bool {
        match a {
            Fe::Fin(x) => *x < self.0.p.max(1) || self.0.degree == 1,
            Fe::Rat(_) => true,
        }
    }

    /// Coordinates of `a` over `F_p` in the power basis `1, t, …`.
    pub fn digits(&self, a: &Fe) -> Vec<u32> {
        let d = &*self.0;
        let mut x = a.fin();
        (0..d.degree)
            .map(|_| {
                let c = x % d.p;
                x /= d.p;
                c
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> Fe {
        let d = &*self.0;
        let mut out = 0u32;
        for &c in digits.iter().rev() {
            out = out * d.p + c % d.p;
        }
        Fe::Fin(out)
    }

    /// All elements of a finite field, in code order.
    pub fn elements(&self) -> Result<Vec<Fe>> {
        match self.order() {
            None => bail!(Unsupported, "cannot enumerate Q"),
            Some(q) => Ok((0..q as u32).map(Fe::Fin).collect()),
        }
    }

    /// Multiplicative order of a nonzero element (finite fields and ±1 in `Q`).
    pub fn multiplicative_order(&self, a: &Fe) -> Option<u64> {
        if self.is_zero(a) {
            return None;
        }
        match a {
            Fe::Rat(r) => {
                if r.is_one() {
                    Some(1)
                } else if (-&**r).is_one() {
                    Some(2)
                } else {
                    None
                }
            }
            Fe::Fin(x) => {
                let n = self.0.q as u64 - 1;
                let mut ord = n;
                for ell in prime_factors(n) {
                    while ord % ell == 0 && self.fpow(*x, ord / ell) == 1 {
                        ord /= ell;
                    }
                }
                Some(ord)
            }
        }
    }

    /// A primitive `m`-th root of unity, if the field has one.
    pub fn root_of_unity(&self, m: u64) -> Result<Fe> {
        if m == 0 {
            bail!(Domain, "order must be positive");
        }
        if m == 1 {
            return Ok(self.one());
        }
        if self.is_rational() {
            if m == 2 {
                return Ok(self.from_int(-1));
            }
            bail!(Domain, "Q has no primitive {m}-th root of unity; extend k");
        }
        let n = self.0.q as u64 - 1;
        if n % m != 0 {
            bail!(Domain, "{self} has no primitive {m}-th root of unity; extend k");
        }
        for x in 1..self.0.q {
            let z = self.fpow(x, n / m);
            if self.multiplicative_order(&Fe::Fin(z)) == Some(m) {
                return Ok(Fe::Fin(z));
            }
        }
        bail!(Domain, "no primitive {m}-th root of unity found")
    }

    /// `u σ(u) ⋯ σ^{m-1}(u)` for `σ = Frob^j`.
    pub fn norm(&self, u: &Fe, j: u32, m: u32) -> Fe {
        let mut acc = self.one();
        let mut cur = u.clone();
        for _ in 0..m {
            acc = self.mul(&acc, &cur);
            cur = self.frobenius(&cur, j);
        }
        acc
    }

    /// Solves `v = u σ(v)` with `σ = Frob^j` of order `m`, given `N(u) = 1`.
    ///
    /// Additive averaging: `v = Σ_i u σ(u) ⋯ σ^{i-1}(u) σ^i(c)` is nonzero
    /// for some `c` in a basis.
    pub fn hilbert90(&self, u: &Fe, j: u32, m: u32) -> Result<Fe> {
        if !self.is_one(&self.norm(u, j, m)) {
            bail!(Domain, "residue has norm different from 1; no Hilbert 90 solution");
        }
        let candidates: Vec<Fe> = if self.0.degree > 1 {
            (0..self.0.degree).map(|k| Fe::Fin(self.0.p.pow(k))).collect()
        } else {
            vec![self.one()]
        };
        for c in candidates {
            let mut acc = self.zero();
            let mut prod = self.one();
            let mut sigma_u = u.clone();
            let mut sc = c.clone();
            for _ in 0..m {
                acc = self.add(&acc, &self.mul(&prod, &sc));
                prod = self.mul(&prod, &sigma_u);
                sigma_u = self.frobenius(&sigma_u, j);
                sc = self.frobenius(&sc, j);
            }
            if !self.is_zero(&acc) {
                return Ok(acc);
            }
        }
        bail!(Domain, "Hilbert 90 averaging failed")
    }

    pub fn is_square(&self, a: &Fe) -> bool {
        if self.is_zero(a) {
            return true;
        }
        match a {
            Fe::Rat(r) => {
                let sq = |n: &BigInt| {
                    if n.is_negative() {
                        return false;
                    }
                    let s = n.sqrt();
                    &s * &s == *n
                };
                sq(r.numer()) && sq(r.denom())
            }
            Fe::Fin(x) => {
                if self.0.p == 2 {
                    return true;
                }
                self.fpow(*x, (self.0.q as u64 - 1) / 2) == 1
            }
        }
    }

    /// Renders an element; extension elements as polynomials in `t`.
    pub fn format(&self, a: &Fe) -> String {
        match a {
            Fe::Rat(r) => {
                if r.is_integer() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Fe::Fin(x) => {
                if self.0.degree == 1 {
                    return x.to_string();
                }
                let digits = self.digits(a);
                let terms: Vec<String> = (0..digits.len())
                    .rev()
                    .filter(|&i| digits[i] != 0)
                    .map(|i| match (i, digits[i]) {
                        (0, c) => c.to_string(),
                        (1, 1) => "t".into(),
                        (1, c) => format!("{c}*t"),
                        (i, 1) => format!("t^{i}"),
                        (i, c) => format!("{c}*t^{i}"),
                    })
                    .collect();
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join(" + ")
                }
            }
        }
    }

    /// Whether the element needs parentheses when used as a factor.
    pub fn is_compound(&self, a: &Fe) -> bool {
        self.0.degree > 1 && self.digits(a).iter().filter(|&&c| c != 0).count() > 1
    }

    /// Parses an element: integers, `a/b`, and polynomials in `t`.
    pub fn parse(&self, s: &str) -> Result<Fe> {
        let poly = crate::parse::parse_expr(s)?;
        let mut acc = self.zero();
        for (mono, coef) in poly.terms {
            let mut c = self.from_ratio(coef.numer(), coef.denom())?;
            for (name, e) in mono {
                if name == "t" {
                    c = self.mul(&c, &self.pow(&self.generator()?, e as i64));
                } else {
                    bail!(Parse, "unexpected symbol `{name}` in field element `{s}`");
                }
            }
            acc = self.add(&acc, &c);
        }
        Ok(acc)
    }
}

fn build_tables(p: u32, m: &[u32], q: u32) -> Result<(Vec<u32>, Vec<u32>)> {
    let p64 = p as u64;
    let d = m.len() - 1;
    let m64: Vec<u64> = m.iter().map(|&c| c as u64).collect();
    let unpack = |mut x: u32| -> Vec<u64> {
        let mut v = Vec::with_capacity(d);
        for _ in 0..d {
            v.push((x % p) as u64);
            x /= p;
        }
        fp_poly::trim(&mut v);
        v
    };
    let pack = |v: &[u64]| -> u32 {
        let mut out = 0u32;
        for &c in v.iter().rev() {
            out = out * p + c as u32;
        }
        out
    };
    let n = (q - 1) as u64;
    let factors = prime_factors(n);
    let mut gen = None;
    for cand in 2..q {
        let g = unpack(cand);
        if factors
            .iter()
            .all(|&ell| fp_poly::pow_mod_poly(&g, (n / ell) as u128, &m64, p64) != vec![1u64])
        {
            gen = Some(g);
            break;
        }
    }
    let Some(g) = gen else { bail!(Domain, "no multiplicative generator found") };
    let mut exp = vec![0u32; n as usize];
    let mut log = vec![0u32; q as usize];
    let mut cur = vec![1u64];
    for (k, slot) in exp.iter_mut().enumerate() {
        let code = pack(&cur);
        *slot = code;
        log[code as usize] = k as u32;
        cur = fp_poly::mul_mod(&cur, &g, &m64, p64);
    }
    Ok((exp, log))
}
