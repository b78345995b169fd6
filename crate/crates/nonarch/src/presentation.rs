//! Presentations `R{X..}[[Y..]]/I` with weighted variables, and (dilated)
//! Weil restriction along finite free extensions `R'|R`.

use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::dvr::{DvrElement, DvrInput, DvrJson, ExtensionSpec, UnramifiedBasis};
use crate::error::{bail, Result};
use crate::field::{Fe, Field, FieldSpec};
use crate::poly::MPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    /// Convergent: `R{X}`.
    Restricted,
    /// Formal: `R[[X]]`.
    Formal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub kind: VarKind,
    /// Dilation exponent `w`: the variable appears as `|π|^w X`.
    pub weight: Rational64,
}

impl VariableDecl {
    pub fn new(name: &str, kind: VarKind) -> Self {
        VariableDecl { name: name.to_string(), kind, weight: Rational64::from_integer(0) }
    }

    pub fn weighted(name: &str, kind: VarKind, weight: Rational64) -> Self {
        VariableDecl { name: name.to_string(), kind, weight }
    }
}

pub fn fmt_ratio(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_ratio(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<i64>().ok().zip(b.trim().parse::<i64>().ok()).filter(|(_, d)| *d != 0).map(|(n, d)| Rational64::new(n, d)),
        None => s.parse::<i64>().ok().map(Rational64::from_integer),
    };
    match parsed {
        Some(r) => Ok(r),
        None => bail!(Parse, "invalid rational `{s}`"),
    }
}

/// A finitely presented special algebra over `R_u = k[[u]]`, where the
/// named uniformizer `u` satisfies `u^ram = π`.
#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    pub field: Field,
    pub uniformizer: String,
    pub ram: usize,
    pub prec: usize,
    pub vars: Vec<VariableDecl>,
    pub relations: Vec<MPoly>,
}

impl Presentation {
    pub fn new(field: &Field, prec: usize, vars: Vec<VariableDecl>) -> Self {
        Presentation { field: field.clone(), uniformizer: "pi".into(), ram: 1, prec, vars, relations: Vec::new() }
    }

    /// A presentation over `k[[ϖ]]`, `ϖ^ram = π`.
    pub fn over_ramified(field: &Field, ram: usize, prec: usize, vars: Vec<VariableDecl>) -> Self {
        let mut p = Self::new(field, prec, vars);
        if ram > 1 {
            p.uniformizer = "varpi".into();
            p.ram = ram;
        }
        p
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn var(&self, name: &str) -> Result<MPoly> {
        match self.var_index(name) {
            Some(i) => Ok(MPoly::var(&self.field, self.nvars(), i, self.prec)),
            None => bail!(Domain, "unknown variable `{name}`"),
        }
    }

    /// Parses a relation; `pi` is `u^ram`, the uniformizer name is `u`, `t` generates `k`.
    pub fn parse_poly(&self, text: &str) -> Result<MPoly> {
        let sym = crate::parse::parse_expr(text)?;
        let n = self.nvars();
        let mut out = MPoly::zero(&self.field, n, self.prec);
        for (mono, coef) in sym.terms {
            let mut c = self.field.from_ratio(coef.numer(), coef.denom())?;
            let mut e = vec![0u32; n];
            let mut k = 0usize;
            for (name, p) in mono {
                if name == self.uniformizer {
                    k += p as usize;
                } else if name == "pi" {
                    k += self.ram * p as usize;
                } else if name == "t" && self.var_index("t").is_none() {
                    c = self.field.mul(&c, &self.field.pow(&self.field.generator()?, p as i64));
                } else if let Some(i) = self.var_index(&name) {
                    e[i] += p;
                } else {
                    bail!(Parse, "unknown symbol `{name}` in relation `{text}`");
                }
            }
            out.add_term(e, DvrElement::from_terms(&self.field, &[(k, c)], self.prec));
        }
        Ok(out)
    }

    pub fn add_relation(&mut self, text: &str) -> Result<()> {
        let p = self.parse_poly(text)?;
        self.relations.push(p);
        Ok(())
    }

    pub fn with_relations(mut self, rels: &[&str]) -> Result<Self> {
        for r in rels {
            self.add_relation(r)?;
        }
        Ok(self)
    }

    pub fn format_poly(&self, p: &MPoly) -> String {
        p.format(&self.names(), &self.uniformizer)
    }

    /// Sorts relations, normalizes leading digits and drops duplicates and zeros.
    pub fn canonicalize(&mut self) {
        let mut rels: Vec<MPoly> = self.relations.iter().filter(|r| !r.is_zero()).map(|r| r.normalized()).collect();
        let key = |p: &MPoly| format!("{:?}", p.terms().map(|(e, c)| (e.clone(), c.terms())).collect::<Vec<_>>());
        rels.sort_by_key(key);
        rels.dedup_by(|a, b| a.agrees(b));
        self.relations = rels;
    }

    /// Tensor with a tame extension: coefficients move to `R'`.
    pub fn base_change(&self, ext: &ExtensionSpec) -> Result<Presentation> {
        if self.ram != 1 {
            bail!(Unsupported, "base change is implemented for presentations over R");
        }
        let rho = ext.rho as usize;
        let target = &ext.residue;
        let mut out = Presentation::over_ramified(target, rho, self.prec * rho, self.vars.clone());
        out.relations = self
            .relations
            .iter()
            .map(|r| {
                let mut q = MPoly::zero(target, r.nvars(), self.prec * rho);
                for (e, c) in r.terms() {
                    let moved = DvrElement::from_terms(target, &c.terms(), c.prec());
                    q.add_term(e.clone(), moved.base_change_ramified(rho));
                }
                q
            })
            .collect();
        Ok(out)
    }

    /// Renames variables (by position).
    pub fn renamed(&self, names: &[String]) -> Self {
        let mut out = self.clone();
        for (v, n) in out.vars.iter_mut().zip(names) {
            v.name = n.clone();
        }
        out
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            field: Some(self.field.spec()),
            uniformizer: Some(self.uniformizer.clone()),
            ramification: Some(self.ram),
            prec: Some(self.prec),
            vars: self
                .vars
                .iter()
                .map(|v| VarJson { name: v.name.clone(), kind: v.kind, weight: Some(WeightJson::Text(fmt_ratio(v.weight))) })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|r| RelationJson::Sparse(r.terms().map(|(e, c)| (e.clone(), DvrInput::Full(c.to_json()))).collect()))
                .collect(),
            display: Some(self.relations.iter().map(|r| self.format_poly(r)).collect()),
        }
    }

    pub fn from_json(j: &PresentationJson, default_field: &Field, default_prec: usize) -> Result<Self> {
        let field = match &j.field {
            Some(s) => Field::from_spec(s)?,
            None => default_field.clone(),
        };
        let prec = j.prec.unwrap_or(default_prec);
        let mut vars = Vec::new();
        for v in &j.vars {
            let weight = match &v.weight {
                None => Rational64::from_integer(0),
                Some(WeightJson::Int(n)) => Rational64::from_integer(*n),
                Some(WeightJson::Text(s)) => parse_ratio(s)?,
            };
            if weight < Rational64::from_integer(0) {
                bail!(Parse, "negative weight for `{}`", v.name);
            }
            vars.push(VariableDecl { name: v.name.clone(), kind: v.kind, weight });
        }
        let mut names = std::collections::BTreeSet::new();
        for v in &vars {
            if !names.insert(v.name.clone()) {
                bail!(Parse, "duplicate variable `{}`", v.name);
            }
        }
        let ram = j.ramification.unwrap_or(1).max(1);
        let mut p = Presentation::over_ramified(&field, ram, prec, vars);
        if let Some(u) = &j.uniformizer {
            p.uniformizer = u.clone();
        }
        for r in &j.relations {
            let poly = match r {
                RelationJson::Text(s) => p.parse_poly(s)?,
                RelationJson::Sparse(terms) => {
                    let mut q = MPoly::zero(&field, p.nvars(), prec);
                    for (e, c) in terms {
                        if e.len() != p.nvars() {
                            bail!(Parse, "exponent vector {e:?} has wrong length");
                        }
                        q.add_term(e.clone(), DvrElement::from_json(&field, c, prec)?);
                    }
                    q
                }
            };
            p.relations.push(poly);
        }
        Ok(p)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |v: &VariableDecl| {
            if *v.weight.numer() == 0 {
                v.name.clone()
            } else {
                format!("|{}|^{{{}}}{}", self.uniformizer, fmt_ratio(v.weight * Rational64::from_integer(self.ram as i64)), v.name)
            }
        };
        let restricted: Vec<String> = self.vars.iter().filter(|v| v.kind == VarKind::Restricted).map(render).collect();
        let formal: Vec<String> = self.vars.iter().filter(|v| v.kind == VarKind::Formal).map(render).collect();
        let ring = if self.ram == 1 { "R".to_string() } else { "R'".to_string() };
        write!(f, "{ring}")?;
        if !restricted.is_empty() || formal.is_empty() {
            write!(f, "{{{}}}", restricted.join(", "))?;
        }
        if !formal.is_empty() {
            write!(f, "[[{}]]", formal.join(", "))?;
        }
        if !self.relations.is_empty() {
            let rels: Vec<String> = self.relations.iter().map(|r| self.format_poly(r)).collect();
            write!(f, "/({})", rels.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightJson {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VarJson {
    pub name: String,
    #[serde(default = "restricted")]
    pub kind: VarKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightJson>,
}

fn restricted() -> VarKind {
    VarKind::Restricted
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationJson {
    Text(String),
    Sparse(Vec<(Vec<u32>, DvrInput)>),
}

/// `{"vars":[{"name":"X","kind":"restricted","weight":"1/2"}],"relations":["X*Y - pi^3"]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniformizer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramification: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<usize>,
    pub vars: Vec<VarJson>,
    #[serde(default)]
    pub relations: Vec<RelationJson>,
    /// Human-readable relations (ignored on input).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display: Option<Vec<String>>,
}

/// How elements of `R'` are written in the basis.
#[derive(Clone, Debug)]
pub enum BasisKind {
    /// `e_i = ϖ^i`, `ϖ^ρ = π`; `σ(ϖ) = ζ^t ϖ`.
    Ramified { rho: usize, t: u32, zeta: Fe },
    /// Normal basis `α, σα, …` of `k'|k`; `inverse` converts digit vectors to coordinates.
    Normal { residue: Field, alpha: Fe, inverse: Vec<Vec<u32>> },
    /// `1, t, …, t^{r−1}` in the generator of `k'`.
    Power { residue: Field },
    /// Abstract table; coefficients must already lie in `R`.
    Table,
}

/// A free basis of `R'` over `R` with its multiplication table.
#[derive(Clone, Debug)]
pub struct BasisData {
    pub field: Field,
    pub kind: BasisKind,
    pub labels: Vec<String>,
    /// `table[i][j]` = coordinates of `e_i e_j`.
    pub table: Vec<Vec<Vec<DvrElement>>>,
    pub nilpotent: Vec<bool>,
    /// `galois[i]` = coordinates of `σ(e_i)`, when known.
    pub galois: Option<Vec<Vec<DvrElement>>>,
    pub prec: usize,
}

fn gauss_inverse_mod_p(m: &[Vec<u32>], p: u32) -> Option<Vec<Vec<u32>>> {
    let n = m.len();
    let p64 = p as u64;
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<u64> = row.iter().map(|&x| x as u64).collect();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    let inv = |x: u64| -> u64 {
        let mut r = 1u64;
        let (mut b, mut e) = (x % p64, p64 - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p64;
            }
            b = b * b % p64;
            e >>= 1;
        }
        r
    };
    for c in 0..n {
        let piv = (c..n).find(|&r| a[r][c] % p64 != 0)?;
        a.swap(c, piv);
        let iv = inv(a[c][c]);
        for x in a[c].iter_mut() {
            *x = *x * iv % p64;
        }
        for r in 0..n {
            if r != c && a[r][c] != 0 {
                let f = a[r][c];
                for k in 0..2 * n {
                    a[r][k] = (a[r][k] + p64 * p64 - f * a[c][k] % p64) % p64;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].iter().map(|&x| x as u32).collect()).collect())
}

impl BasisData {
    pub fn degree(&self) -> usize {
        self.labels.len()
    }

    /// Power basis `1, ϖ, …, ϖ^{ρ−1}` of `k[[ϖ]]`, `ϖ^ρ = π`, over the field `field`.
    pub fn ramified(field: &Field, rho: usize, t: u32, prec: usize) -> Result<Self> {
        let p = field.characteristic() as usize;
        if p != 0 && rho % p == 0 {
            bail!(Unsupported, "wild ramification ({rho} divisible by {p})");
        }
        let zeta = field.root_of_unity(rho as u64)?;
        let z = DvrElement::zero(field, prec);
        let one = DvrElement::one(field, prec);
        let pi = DvrElement::pi_power(field, 1, prec);
        let mut table = vec![vec![vec![z.clone(); rho]; rho]; rho];
        for (i, row) in table.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if i + j < rho {
                    cell[i + j] = one.clone();
                } else {
                    cell[i + j - rho] = pi.clone();
                }
            }
        }
        let galois = (0..rho)
            .map(|i| {
                let mut v = vec![z.clone(); rho];
                v[i] = DvrElement::constant(field, &field.pow(&zeta, (t as usize * i) as i64), prec);
                v
            })
            .collect();
        Ok(BasisData {
            field: field.clone(),
            kind: BasisKind::Ramified { rho, t, zeta },
            labels: (0..rho).map(|i| if i == 0 { "1".into() } else if i == 1 { "varpi".into() } else { format!("varpi^{i}") }).collect(),
            table,
            nilpotent: (0..rho).map(|i| i > 0).collect(),
            galois: Some(galois),
            prec,
        })
    }

    /// Basis of the unramified part of `ext` over its prime base field.
    pub fn unramified(ext: &ExtensionSpec, prec: usize) -> Result<Self> {
        let base = &ext.base;
        let kp = &ext.residue;
        let r = ext.r as usize;
        if r == 1 {
            return Self::table(base, vec!["1".into()], vec![vec![vec![DvrElement::one(base, prec)]]], vec![false], None, prec);
        }
        let p = base.characteristic();
        let to_coords_power = |a: &Fe| -> Vec<DvrElement> {
            let d = kp.digits(a);
            (0..r).map(|i| DvrElement::constant(base, &base.from_int(*d.get(i).unwrap_or(&0) as i64), prec)).collect()
        };
        match ext.basis {
            UnramifiedBasis::Power => {
                let g = kp.generator()?;
                let elems: Vec<Fe> = (0..r).map(|i| kp.pow(&g, i as i64)).collect();
                let table = (0..r).map(|i| (0..r).map(|j| to_coords_power(&kp.mul(&elems[i], &elems[j]))).collect()).collect();
                let galois = Some((0..r).map(|i| to_coords_power(&kp.frobenius(&elems[i], 1))).collect());
                Ok(BasisData {
                    field: base.clone(),
                    kind: BasisKind::Power { residue: kp.clone() },
                    labels: (0..r).map(|i| if i == 0 { "1".into() } else { format!("t^{i}") }).collect(),
                    table,
                    nilpotent: vec![false; r],
                    galois,
                    prec,
                })
            }
            UnramifiedBasis::Normal => {
                // an element of trace 1 whose conjugates are independent
                let one = kp.one();
                let mut found = None;
                for a in kp.elements()? {
                    let conj: Vec<Fe> = (0..r).map(|i| kp.frobenius(&a, i as u32)).collect();
                    let tr = conj.iter().fold(kp.zero(), |s, c| kp.add(&s, c));
                    if tr != one {
                        continue;
                    }
                    let mat: Vec<Vec<u32>> = conj.iter().map(|c| (0..r).map(|i| *kp.digits(c).get(i).unwrap_or(&0)).collect()).collect();
                    if let Some(inv) = gauss_inverse_mod_p(&mat, p) {
                        found = Some((a, conj, inv));
                        break;
                    }
                }
                let Some((alpha, conj, inverse)) = found else {
                    bail!(Domain, "no normal basis element found");
                };
                let mut basis = BasisData {
                    field: base.clone(),
                    kind: BasisKind::Normal { residue: kp.clone(), alpha, inverse },
                    labels: (0..r).map(|i| format!("sigma^{i}(alpha)")).collect(),
                    table: Vec::new(),
                    nilpotent: vec![false; r],
                    galois: None,
                    prec,
                };
                let z = DvrElement::zero(base, prec);
                let mut table = Vec::new();
                for i in 0..r {
                    let mut row = Vec::new();
                    for j in 0..r {
                        row.push(basis.residue_coords(&kp.mul(&conj[i], &conj[j])));
                    }
                    table.push(row);
                }
                basis.table = table;
                basis.galois = Some(
                    (0..r)
                        .map(|i| {
                            let mut v = vec![z.clone(); r];
                            v[(i + 1) % r] = DvrElement::one(base, prec);
                            v
                        })
                        .collect(),
                );
                Ok(basis)
            }
        }
    }

    /// A basis given by an explicit multiplication table over `R`.
    pub fn table(
        field: &Field,
        labels: Vec<String>,
        table: Vec<Vec<Vec<DvrElement>>>,
        nilpotent: Vec<bool>,
        galois: Option<Vec<Vec<DvrElement>>>,
        prec: usize,
    ) -> Result<Self> {
        let m = labels.len();
        if table.len() != m || table.iter().any(|r| r.len() != m || r.iter().any(|c| c.len() != m)) || nilpotent.len() != m {
            bail!(Domain, "inconsistent basis dimensions");
        }
        let b = BasisData { field: field.clone(), kind: BasisKind::Table, labels, table, nilpotent, galois, prec };
        b.check()?;
        Ok(b)
    }

    fn mul_coords(&self, x: &[DvrElement], y: &[DvrElement]) -> Vec<DvrElement> {
        let m = self.degree();
        let mut out = vec![DvrElement::zero(&self.field, self.prec); m];
        for i in 0..m {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..m {
                if y[j].is_zero() {
                    continue;
                }
                let c = x[i].mul(&y[j]);
                for k in 0..m {
                    if !self.table[i][j][k].is_zero() {
                        out[k] = out[k].add(&c.mul(&self.table[i][j][k]));
                    }
                }
            }
        }
        out
    }

    fn unit_vec(&self, i: usize) -> Vec<DvrElement> {
        (0..self.degree()).map(|k| if k == i { DvrElement::one(&self.field, self.prec) } else { DvrElement::zero(&self.field, self.prec) }).collect()
    }

    /// Commutativity, associativity on basis triples, and `e_0 = 1` for tables.
    pub fn check(&self) -> Result<()> {
        let m = self.degree();
        let eq = |a: &[DvrElement], b: &[DvrElement]| a.iter().zip(b).all(|(x, y)| x.agrees(y));
        for i in 0..m {
            for j in 0..m {
                if !eq(&self.table[i][j], &self.table[j][i]) {
                    bail!(Domain, "multiplication table is not commutative at ({i},{j})");
                }
                for k in 0..m {
                    let l = self.mul_coords(&self.mul_coords(&self.unit_vec(i), &self.unit_vec(j)), &self.unit_vec(k));
                    let r = self.mul_coords(&self.unit_vec(i), &self.mul_coords(&self.unit_vec(j), &self.unit_vec(k)));
                    if !eq(&l, &r) {
                        bail!(Domain, "multiplication table is not associative at ({i},{j},{k})");
                    }
                }
            }
        }
        if matches!(self.kind, BasisKind::Table) {
            for j in 0..m {
                if !eq(&self.table[0][j], &self.unit_vec(j)) {
                    bail!(Domain, "first basis element must be the identity");
                }
            }
        }
        Ok(())
    }

    fn residue_coords(&self, a: &Fe) -> Vec<DvrElement> {
        match &self.kind {
            BasisKind::Normal { residue, inverse, .. } => {
                let r = inverse.len();
                let d = residue.digits(a);
                let p = self.field.characteristic() as u64;
                (0..r)
                    .map(|i| {
                        // row vector d times inverse: coordinate i = Σ_k d_k inv[k][i]
                        let s = (0..r).fold(0u64, |s, k| (s + *d.get(k).unwrap_or(&0) as u64 * inverse[k][i] as u64) % p);
                        DvrElement::constant(&self.field, &self.field.from_int(s as i64), self.prec)
                    })
                    .collect()
            }
            _ => unreachable!("residue coordinates only for normal bases"),
        }
    }

    /// Coordinates of a coefficient of `R'` in this basis.
    pub fn coords(&self, c: &DvrElement) -> Result<Vec<DvrElement>> {
        let m = self.degree();
        match &self.kind {
            BasisKind::Ramified { rho, .. } => {
                let rho = *rho;
                let n = c.prec();
                let f = &self.field;
                Ok((0..rho)
                    .map(|i| {
                        let prec = if n > i { (n - i).div_ceil(rho) } else { 0 };
                        let terms: Vec<(usize, Fe)> = c.terms().into_iter().filter(|(k, _)| k % rho == i).map(|(k, v)| ((k - i) / rho, v)).collect();
                        DvrElement::from_terms(f, &terms, prec)
                    })
                    .collect())
            }
            BasisKind::Power { residue } | BasisKind::Normal { residue, .. } => {
                if c.field() != residue {
                    bail!(FieldMismatch, "coefficient is not over {residue}");
                }
                let mut out: Vec<Vec<(usize, Fe)>> = vec![Vec::new(); m];
                for (k, v) in c.terms() {
                    let coords: Vec<Fe> = match &self.kind {
                        BasisKind::Power { .. } => {
                            let d = residue.digits(&v);
                            (0..m).map(|i| self.field.from_int(*d.get(i).unwrap_or(&0) as i64)).collect()
                        }
                        _ => self.residue_coords(&v).iter().map(|x| x.coeff(0)).collect(),
                    };
                    for (i, x) in coords.into_iter().enumerate() {
                        if !self.field.is_zero(&x) {
                            out[i].push((k, x));
                        }
                    }
                }
                Ok(out.into_iter().map(|t| DvrElement::from_terms(&self.field, &t, c.prec())).collect())
            }
            BasisKind::Table => {
                if c.field() != &self.field {
                    bail!(FieldMismatch, "coefficient is not over {}", self.field);
                }
                let mut v = vec![DvrElement::zero(&self.field, c.prec()); m];
                v[0] = c.clone();
                Ok(v)
            }
        }
    }

    /// Matrix of multiplication by `Σ x_i e_i` with polynomial entries in `x`.
    fn multiplication_matrix(&self) -> Vec<Vec<MPoly>> {
        let m = self.degree();
        let mut mat = vec![vec![MPoly::zero(&self.field, m, self.prec); m]; m];
        for (j, row) in mat.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                for i in 0..m {
                    let c = &self.table[i][j][k];
                    if !c.is_zero() {
                        *cell = cell.add(&MPoly::var(&self.field, m, i, self.prec).scale(c));
                    }
                }
            }
        }
        mat
    }
}

fn det(mat: &[Vec<MPoly>], rows: &[usize], field: &Field, nvars: usize, prec: usize) -> MPoly {
    // Leibniz expansion over permutations of `rows`
    fn rec(mat: &[Vec<MPoly>], rows: &[usize], used: &mut Vec<bool>, depth: usize, acc: MPoly, sign: bool, out: &mut MPoly) {
        if depth == rows.len() {
            *out = if sign { out.sub(&acc) } else { out.add(&acc) };
            return;
        }
        for c in 0..rows.len() {
            if used[c] {
                continue;
            }
            let inversions = used[c + 1..].iter().filter(|&&u| u).count();
            used[c] = true;
            let next = acc.mul(&mat[rows[depth]][rows[c]]);
            if !next.is_zero() {
                rec(mat, rows, used, depth + 1, next, sign ^ (inversions % 2 == 1), out);
            }
            used[c] = false;
        }
    }
    let mut out = MPoly::zero(field, nvars, prec);
    let one = MPoly::constant(&DvrElement::one(field, prec), nvars);
    rec(mat, rows, &mut vec![false; rows.len()], 0, one, false, &mut out);
    out
}

/// Coefficients `c_0..c_{m−1}` of the characteristic polynomial of multiplication
/// by `Σ x_i e_i`, via sums of principal minors: `c_j = (−1)^{m−j} E_{m−j}`.
pub fn charpoly_coeffs(basis: &BasisData) -> Vec<MPoly> {
    let m = basis.degree();
    let mat = basis.multiplication_matrix();
    let mut e = vec![MPoly::zero(&basis.field, m, basis.prec); m + 1];
    for mask in 1u32..(1 << m) {
        let rows: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let s = rows.len();
        e[s] = e[s].add(&det(&mat, &rows, &basis.field, m, basis.prec));
    }
    (0..m).map(|j| if (m - j) % 2 == 0 { e[m - j].clone() } else { e[m - j].neg() }).collect()
}

/// Coefficient polynomials of `p` after substituting `T = Σ T_i e_i`.
/// Variable `j` of `p` becomes variables `j·m .. j·m + m − 1`.
pub fn expand_in_basis(p: &MPoly, basis: &BasisData) -> Result<Vec<MPoly>> {
    let m = basis.degree();
    let n = p.nvars();
    let nv = n * m;
    let field = &basis.field;
    let prec = basis.prec;
    type Vecp = Vec<MPoly>;
    let mul = |x: &Vecp, y: &Vecp| -> Vecp {
        let mut out = vec![MPoly::zero(field, nv, prec); m];
        for i in 0..m {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..m {
                if y[j].is_zero() {
                    continue;
                }
                let c = x[i].mul(&y[j]);
                for k in 0..m {
                    let t = &basis.table[i][j][k];
                    if !t.is_zero() {
                        out[k] = out[k].add(&c.scale(t));
                    }
                }
            }
        }
        out
    };
    let var_vec = |j: usize| -> Vecp { (0..m).map(|i| MPoly::var(field, nv, j * m + i, prec)).collect() };
    let mut total: Vecp = vec![MPoly::zero(field, nv, prec); m];
    for (e, c) in p.terms() {
        let mut term: Vecp = basis.coords(c)?.into_iter().map(|x| MPoly::constant(&x, nv)).collect();
        for (j, &k) in e.iter().enumerate() {
            let v = var_vec(j);
            for _ in 0..k {
                term = mul(&term, &v);
            }
        }
        for i in 0..m {
            total[i] = total[i].add(&term[i]);
        }
    }
    Ok(total)
}

/// Output of a (dilated) Weil restriction.
#[derive(Clone, Debug)]
pub struct RestrictionResult {
    pub presentation: Presentation,
    pub charpoly: Vec<MPoly>,
    /// `(relation index, basis index)` of each output relation.
    pub sources: Vec<(usize, usize)>,
    /// Degree of each stage: `(ρ, r)`.
    pub stages: Vec<BasisData>,
}

fn restrict_with(pres: &Presentation, basis: &BasisData, dilate: bool) -> Result<RestrictionResult> {
    let m = basis.degree();
    let mut vars = Vec::new();
    for v in &pres.vars {
        for i in 0..m {
            let kind = if dilate || v.kind == VarKind::Restricted || basis.nilpotent[i] {
                if dilate {
                    v.kind
                } else {
                    VarKind::Restricted
                }
            } else {
                VarKind::Formal
            };
            let mut weight = v.weight;
            if dilate {
                if let BasisKind::Ramified { rho, .. } = basis.kind {
                    weight += Rational64::new(i as i64, rho as i64);
                }
            }
            vars.push(VariableDecl { name: format!("{}_{i}", v.name), kind, weight });
        }
    }
    let ram = match basis.kind {
        BasisKind::Ramified { rho, .. } => pres.ram / rho.max(1),
        _ => pres.ram,
    };
    let mut out = Presentation::over_ramified(&basis.field, ram.max(1), basis.prec, vars);
    let mut sources = Vec::new();
    for (ri, r) in pres.relations.iter().enumerate() {
        for (i, c) in expand_in_basis(r, basis)?.into_iter().enumerate() {
            if !c.is_zero() {
                out.relations.push(c);
                sources.push((ri, i));
            }
        }
    }
    Ok(RestrictionResult { presentation: out, charpoly: charpoly_coeffs(basis), sources, stages: vec![basis.clone()] })
}

/// Weil restriction through the ideal of coefficients.
pub fn weil_restrict(pres: &Presentation, basis: &BasisData) -> Result<RestrictionResult> {
    if pres.vars.iter().any(|v| *v.weight.numer() != 0) {
        bail!(Domain, "Weil restriction expects unweighted variables");
    }
    restrict_with(pres, basis, false)
}

/// Dilated Weil restriction along a tame extension: unramified steps are plain
/// restrictions, ramified steps give `X_i` weight `i/ρ`; mixed extensions go
/// through the intermediate unramified ring.
pub fn dilated_weil_restrict(pres: &Presentation, ext: &ExtensionSpec) -> Result<RestrictionResult> {
    let rho = ext.rho as usize;
    let prec_r = pres.prec.div_ceil(rho);
    let mut stages = Vec::new();
    let mut cur = pres.clone();
    let mut sources: Vec<(usize, usize)> = (0..pres.relations.len()).map(|i| (i, 0)).collect();
    let mut charpoly = Vec::new();
    if rho > 1 {
        if cur.ram != rho {
            bail!(Domain, "presentation is over a ring with ramification {}, extension has {rho}", cur.ram);
        }
        let b = BasisData::ramified(&cur.field, rho, ext.t, prec_r)?;
        let res = restrict_with(&cur, &b, true)?;
        sources = res.sources.iter().map(|&(r, i)| (sources[r].0, i)).collect();
        charpoly = res.charpoly;
        stages.push(b);
        cur = res.presentation;
    }
    if ext.r > 1 {
        let b = BasisData::unramified(ext, cur.prec)?;
        let res = restrict_with(&cur, &b, true)?;
        sources = res.sources.iter().map(|&(r, i)| (sources[r].0, i)).collect();
        charpoly = res.charpoly;
        stages.push(b);
        cur = res.presentation;
    }
    Ok(RestrictionResult { presentation: cur, charpoly, sources, stages })
}

/// Divides each relation by its `π`-content. The result is flagged flat when the
/// relations involve pairwise disjoint sets of variables (each then has a unit
/// coefficient, so the quotient is `π`-torsion free). Otherwise the input is
/// returned unchanged with the flag unset.
pub fn remove_pi_torsion(pres: &Presentation) -> (Presentation, bool) {
    let mut out = pres.clone();
    out.relations.clear();
    for r in &pres.relations {
        let Some(c) = r.content_ord() else { continue };
        let q = r.div_pi(c).expect("content divides");
        out.relations.push(q);
    }
    let supports: Vec<Vec<usize>> = out.relations.iter().map(|r| r.support()).collect();
    let disjoint = supports.iter().enumerate().all(|(i, s)| supports[i + 1..].iter().all(|t| s.iter().all(|x| !t.contains(x))));
    if disjoint {
        (out, true)
    } else {
        let mut same = pres.clone();
        same.relations.retain(|r| !r.is_zero());
        (same, false)
    }
}

/// Ramified power-basis coordinates re-assembled into an element of `k[[ϖ]]`.
pub fn from_coords(basis: &BasisData, coords: &[DvrElement]) -> Result<DvrElement> {
    match &basis.kind {
        BasisKind::Ramified { rho, .. } => {
            let rho = *rho;
            let mut terms = Vec::new();
            let mut prec = usize::MAX;
            for (i, c) in coords.iter().enumerate() {
                for (k, v) in c.terms() {
                    terms.push((k * rho + i, v));
                }
                prec = prec.min(c.prec() * rho + i);
            }
            Ok(DvrElement::from_terms(&basis.field, &terms, prec))
        }
        _ => bail!(Unsupported, "reassembly implemented for ramified bases only"),
    }
}

#[allow(dead_code)]
fn _json(_: DvrJson) {}
