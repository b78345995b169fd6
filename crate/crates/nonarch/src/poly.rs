//! Sparse multivariate polynomials over a truncated DVR.

use std::collections::BTreeMap;

use crate::dvr::DvrElement;
use crate::error::{bail, Result};
use crate::field::Field;

/// `Σ c_m x^m` with exponent vectors of a fixed length.
#[derive(Clone, Debug, PartialEq)]
pub struct MPoly {
    field: Field,
    nvars: usize,
    prec: usize,
    terms: BTreeMap<Vec<u32>, DvrElement>,
}

impl MPoly {
    pub fn zero(field: &Field, nvars: usize, prec: usize) -> Self {
        MPoly { field: field.clone(), nvars, prec, terms: BTreeMap::new() }
    }

    pub fn constant(c: &DvrElement, nvars: usize) -> Self {
        let mut out = Self::zero(c.field(), nvars, c.prec());
        out.add_term(vec![0; nvars], c.clone());
        out
    }

    pub fn var(field: &Field, nvars: usize, i: usize, prec: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut out = Self::zero(field, nvars, prec);
        out.add_term(e, DvrElement::one(field, prec));
        out
    }

    pub fn from_terms(field: &Field, nvars: usize, prec: usize, terms: impl IntoIterator<Item = (Vec<u32>, DvrElement)>) -> Self {
        let mut out = Self::zero(field, nvars, prec);
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &DvrElement)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> DvrElement {
        self.terms.get(e).cloned().unwrap_or_else(|| DvrElement::zero(&self.field, self.prec))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: DvrElement) {
        assert_eq!(e.len(), self.nvars, "exponent vector length");
        let entry = match self.terms.remove(&e) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !entry.is_zero() {
            self.terms.insert(e, entry);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.prec = self.prec.max(other.prec);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &DvrElement) -> Self {
        let mut out = Self::zero(&self.field, self.nvars, self.prec);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.field, self.nvars, self.prec.max(other.prec));
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.mul(c2));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(&DvrElement::one(&self.field, self.prec), self.nvars);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Same polynomial in a larger (or permuted) variable set: variable `i` becomes `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(&self.field, nvars, self.prec);
        for (e, c) in &self.terms {
            let mut ne = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                ne[map[i]] += k;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Replaces every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&DvrElement) -> DvrElement) -> Self {
        let mut out = Self::zero(&self.field, self.nvars, self.prec);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Substitutes polynomials (over a common ring) for the variables.
    pub fn substitute(&self, images: &[MPoly]) -> Result<MPoly> {
        if images.len() != self.nvars {
            bail!(Domain, "substitution needs {} images, got {}", self.nvars, images.len());
        }
        let n = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = MPoly::zero(&self.field, n, self.prec);
        for (e, c) in &self.terms {
            let mut term = MPoly::constant(c, n);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&images[i].pow(k));
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[DvrElement]) -> DvrElement {
        let mut acc = DvrElement::zero(&self.field, self.prec);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&point[i].pow(k as u64));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Largest `c` with every coefficient divisible by `π^c`; `None` for the zero polynomial.
    pub fn content_ord(&self) -> Option<usize> {
        self.terms.values().filter_map(|c| c.ord()).min()
    }

    pub fn div_pi(&self, k: usize) -> Result<Self> {
        let mut out = Self::zero(&self.field, self.nvars, self.prec.saturating_sub(k));
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.div_pi(k)?);
        }
        Ok(out)
    }

    /// Indices of variables that occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&i| self.terms.keys().any(|e| e[i] > 0)).collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Whether the two polynomials agree coefficientwise at common precision.
    pub fn agrees(&self, other: &Self) -> bool {
        let d = self.sub(other);
        d.terms.values().all(|c| c.is_zero())
    }

    /// Leading-coefficient normalization: the sign/scalar making the largest
    /// monomial's lowest digit equal to one (used to deduplicate relations).
    pub fn normalized(&self) -> Self {
        let Some((_, c)) = self.terms.iter().next_back() else { return self.clone() };
        let Some(o) = c.ord() else { return self.clone() };
        let f = &self.field;
        let inv = f.inv(&c.coeff(o)).expect("nonzero digit");
        self.map_coeffs(|x| x.scale(&inv))
    }

    /// Renders with the given variable names and uniformizer.
    pub fn format(&self, names: &[String], uniformizer: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{k}", names[i]) })
                .collect();
            let mono = mono.join("*");
            let cs = c.format(uniformizer);
            let single = c.terms().len() == 1;
            parts.push(match (mono.is_empty(), cs.as_str()) {
                (true, _) => cs,
                (false, "1") => mono,
                (false, "-1") => format!("-{mono}"),
                (false, _) if single => format!("{cs}*{mono}"),
                (false, _) => format!("({cs})*{mono}"),
            });
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(p);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let f = Field::prime(5).unwrap();
        let x = MPoly::var(&f, 2, 0, 8);
        let y = MPoly::var(&f, 2, 1, 8);
        let s = x.add(&y).pow(2);
        assert_eq!(s.len(), 3);
        assert_eq!(s.coeff(&[1, 1]), DvrElement::from_int(&f, 2, 8));
        let names = vec!["X".to_string(), "Y".to_string()];
        assert_eq!(s.format(&names, "pi"), "X^2 + 2*X*Y + Y^2");
        let p = s.scale(&DvrElement::pi_power(&f, 2, 8));
        assert_eq!(p.content_ord(), Some(2));
        assert!(p.div_pi(2).unwrap().agrees(&s));
    }
}
