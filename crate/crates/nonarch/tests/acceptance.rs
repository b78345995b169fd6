//! Acceptance suite: one PASS/FAIL line per criterion, then a nonzero exit
//! status if anything failed. Expected values come from the constructions
//! themselves or from independent enumerations, never from the library.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use nonarch::annulus::{AnnulusType, LaurentFunction};
use nonarch::cli;
use nonarch::config::Config;
use nonarch::descent::{descend, descend_switched, MonomialAction, NormalForm, VarImage};
use nonarch::dvr::{DvrElement, ExtensionSpec};
use nonarch::field::{Fe, Field};
use nonarch::linearize::{agreement_level, linearize, AnnulusAutomorphism, BranchBehavior};
use nonarch::moduli::{count_forms, isomorphic, normal_form, FractionalAnnulus};
use nonarch::presentation::{fmt_ratio, remove_pi_torsion, Presentation, VarKind, VariableDecl};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const KINDS: [AnnulusType; 3] = [AnnulusType::Closed, AnnulusType::Open, AnnulusType::SemiOpen];

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn err<E: std::fmt::Display>(ctx: impl std::fmt::Display) -> impl FnOnce(E) -> String {
    move |e| format!("{ctx}: {e}")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn var_kind(kind: AnnulusType) -> [VarKind; 2] {
    match kind {
        AnnulusType::Closed => [VarKind::Restricted, VarKind::Restricted],
        AnnulusType::Open => [VarKind::Formal, VarKind::Formal],
        AnnulusType::SemiOpen => [VarKind::Restricted, VarKind::Formal],
    }
}

fn annulus_model(field: &Field, ram: usize, prec: usize, kind: AnnulusType, relation: &str) -> Presentation {
    let [kx, ky] = var_kind(kind);
    Presentation::over_ramified(field, ram, prec, vec![VariableDecl::new("X", kx), VariableDecl::new("Y", ky)])
        .with_relations(&[relation])
        .expect("model relation parses")
}

// 1. Explicit basis 1, sqrt 7 and the dilated restriction along varpi^2 = pi.
fn criterion_1() -> Outcome {
    let cfg = Config::default();
    let out = cli::cmd_weil(&cfg, &fixture("disc.json"), &fixture("sqrt7_table.json"), false).map_err(err("weil"))?;
    let mut found: Vec<&str> = out.lines().filter_map(|l| l.split_once(" = ").map(|(_, c)| c)).collect();
    found.sort();
    let mut want = vec!["-2*x_0", "x_0^2 - 7*x_1^2"];
    want.sort();
    ensure(found == want, || format!("charpoly {found:?}, expected {want:?}"))?;

    let cfg7 = Config { field: "7".into(), ..Config::default() };
    let out = cli::cmd_weil(&cfg7, &fixture("disc_ramified.json"), &fixture("ext_ram2.json"), true).map_err(err("dilated weil"))?;
    let ring = out.lines().find_map(|l| l.strip_prefix("output: ")).unwrap_or("");
    ensure(ring == "R{X_0, |pi|^{1/2}X_1}", || format!("dilated restriction is {ring}"))?;
    Ok(format!("charpoly {{{}}}, dilated {ring}", want.join(", ")))
}

// 2. Diagonal descent along totally ramified extensions of degree 2..5.
fn criterion_2() -> Outcome {
    let p = 61; // 1 mod 2, 3, 4, 5
    let f = Field::prime(p).unwrap();
    let mut cases = 0;
    for m in 2..=5usize {
        let ext = ExtensionSpec::ramified(&f, m as u32).map_err(err("extension"))?;
        for e in 1..=12usize {
            let model = annulus_model(&f, m, 48, AnnulusType::Closed, &format!("X*Y - varpi^{e}"));
            let (b, a) = (e / m, e % m);
            for alpha in 0..m {
                for beta in 0..m {
                    if (alpha + beta) % m != a {
                        continue;
                    }
                    let act = MonomialAction::for_extension(
                        &ext,
                        vec![
                            VarImage { target: 0, character: alpha as i64, unit: f.one() },
                            VarImage { target: 1, character: beta as i64, unit: f.one() },
                        ],
                    );
                    let ctx = format!("m={m} e={e} alpha={alpha} beta={beta}");
                    let rep = descend(&model, &ext, &act).map_err(err(&ctx))?;
                    let bp = if alpha + beta == a { b as i64 } else { b as i64 - 1 };
                    let mono = format!("X_{alpha}*Y_{beta}");
                    // X_a Y_b - pi^b', written with -1 = p - 1
                    let want = match bp {
                        -1 => format!("pi*{mono} + {}", p - 1),
                        0 => format!("{mono} + {}", p - 1),
                        1 => format!("{mono} + {}*pi", p - 1),
                        k => format!("{mono} + {}*pi^{k}", p - 1),
                    };
                    let s = &rep.surviving;
                    ensure(s.relations.len() == 1, || format!("{ctx}: {} relations", s.relations.len()))?;
                    let got = s.format_poly(&s.relations[0]);
                    ensure(got == want, || format!("{ctx}: relation {got}, expected {want}"))?;
                    let weights: Vec<Rational64> = s.vars.iter().map(|v| v.weight).collect();
                    let wq = vec![q(alpha as i64, m as i64), q(beta as i64, m as i64)];
                    ensure(weights == wq, || format!("{ctx}: weights {weights:?}"))?;
                    ensure(rep.verified == Some(true), || format!("{ctx}: base change check {:?}", rep.verified))?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} (m, e, alpha, beta) cases over F_{p}"))
}

fn swap_action(ext: &ExtensionSpec, f: &Field) -> MonomialAction {
    MonomialAction::for_extension(ext, vec![VarImage { target: 1, character: 0, unit: f.one() }, VarImage { target: 0, character: 0, unit: f.one() }])
}

// 3. Forms on which the Galois group exchanges the branches.
fn criterion_3() -> Outcome {
    let f = Field::prime(7).unwrap();
    let mut cases = 0;
    for rho in [1u32, 2] {
        let ext = if rho == 2 { ExtensionSpec::ramified(&f, 2) } else { ExtensionSpec::unramified(&f, 2) }.map_err(err("extension"))?;
        let kf = if rho == 2 { f.clone() } else { ext.residue.clone() };
        let (unif, ram) = if rho == 2 { ("varpi", 2) } else { ("pi", 1) };
        for kind in [AnnulusType::Closed, AnnulusType::Open] {
            for e in 1..=8usize {
                for unit in [1i64, 3] {
                    let model = annulus_model(&kf, ram, 64, kind, &format!("X*Y - {unit}*{unif}^{e}"));
                    let ctx = format!("rho={rho} {kind} e={e} u={unit}");
                    let res = descend_switched(&model, &ext, &swap_action(&ext, &kf));
                    if rho == 2 && e % 2 == 1 {
                        ensure(res.is_err(), || format!("{ctx}: odd modulus accepted"))?;
                        cases += 1;
                        continue;
                    }
                    let rep = res.map_err(err(&ctx))?;
                    let Some(NormalForm::Quadric { a, u, exponent }) = &rep.normal_form else {
                        return Err(format!("{ctx}: no quadric normal form"));
                    };
                    ensure(*exponent == e / rho as usize, || format!("{ctx}: exponent {exponent}"))?;
                    ensure(u.is_unit(), || format!("{ctx}: u is not a unit"))?;
                    if rho == 2 {
                        ensure(a.ord() == Some(1), || format!("{ctx}: a = {} is not a uniformizer", a.format("pi")))?;
                    } else {
                        // reduction X^2 - a Y^2 is irreducible iff a is a non-square mod 7
                        let ab = a.residue().fin();
                        let squares: Vec<u32> = (1..7).map(|x| x * x % 7).collect();
                        ensure(a.is_unit() && !squares.contains(&ab), || format!("{ctx}: a = {ab} is a square"))?;
                    }
                    // X_0^2 - a X_1^2 + u' pi^{e/rho} with u' = -u
                    let s = &rep.surviving;
                    let x1w = s.vars[1].weight;
                    ensure(x1w == q(rho as i64 - 1, 2), || format!("{ctx}: X_1 weight {x1w}"))?;
                    let ne = e / rho as usize;
                    let pe = if ne == 1 { "pi".to_string() } else { format!("pi^{ne}") };
                    let coeff = |c: i64| if c == 1 { String::new() } else { format!("{c}*") };
                    let ac = if rho == 2 { "6*pi*".to_string() } else { coeff(7 - a.residue().fin() as i64) };
                    let want = format!("X_0^2 + {ac}X_1^2 + {}{pe}", coeff((7 - unit) % 7));
                    let got = s.format_poly(&s.relations[0]);
                    ensure(got == want, || format!("{ctx}: relation {got}, expected {want}"))?;
                    ensure(rep.verified == Some(true), || format!("{ctx}: base change check {:?}", rep.verified))?;
                    cases += 1;
                }
            }
        }
        let semi = annulus_model(&kf, ram, 64, AnnulusType::SemiOpen, &format!("X*Y - {unif}^4"));
        ensure(descend_switched(&semi, &ext, &swap_action(&ext, &kf)).is_err(), || format!("rho={rho}: semi-open accepted"))?;
        cases += 1;
    }
    Ok(format!("{cases} cases, verified at precision 32"))
}

fn random_relation(rng: &mut ChaCha8Rng, p: u32, names: &[&str]) -> String {
    let nterms = rng.gen_range(1..=3);
    let mut terms = Vec::new();
    for t in 0..nterms {
        let c = rng.gen_range(1..p);
        let k = if t == 0 { 0 } else { rng.gen_range(0..=2) };
        let mut mono = vec![c.to_string()];
        if k > 0 {
            mono.push(format!("pi^{k}"));
        }
        for n in names {
            let d = rng.gen_range(0..=2);
            if d > 0 {
                mono.push(format!("{n}^{d}"));
            }
        }
        terms.push(mono.join("*"));
    }
    terms.push(format!("{}*pi", rng.gen_range(1..p)));
    terms.join(" + ")
}

// 4. Base change followed by descent with the trivial twist.
fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let all = ["A", "B", "C"];
    let mut counts = BTreeMap::new();
    let mut redrawn = 0;
    for trial in 0..120 {
        let p = [7u32, 13][rng.gen_range(0..2)];
        let f = Field::prime(p).unwrap();
        let m = rng.gen_range(2..=3u32);
        let ramified = rng.gen_bool(0.5);
        let ext = if ramified { ExtensionSpec::ramified(&f, m) } else { ExtensionSpec::unramified(&f, m) }.map_err(err("extension"))?;
        let n = rng.gen_range(1..=3);
        let names = &all[..n];
        let vars: Vec<VariableDecl> = names
            .iter()
            .map(|v| VariableDecl::new(v, if rng.gen_bool(0.5) { VarKind::Restricted } else { VarKind::Formal }))
            .collect();
        // redraw inputs whose relations cancel down to a multiple of pi
        let fmt = |p: &Presentation| p.relations.iter().map(|r| p.format_poly(r)).collect::<Vec<_>>();
        let mut pres = loop {
            let nrel = rng.gen_range(1..=2);
            let rels: Vec<String> = (0..nrel).map(|_| random_relation(&mut rng, p, names)).collect();
            let rel_refs: Vec<&str> = rels.iter().map(String::as_str).collect();
            let cand = Presentation::new(&f, 12, vars.clone()).with_relations(&rel_refs).map_err(err("random presentation"))?;
            let (divided, _) = remove_pi_torsion(&cand);
            if cand.relations.iter().all(|r| !r.is_zero()) && fmt(&divided) == fmt(&cand) {
                break cand;
            }
            redrawn += 1;
        };
        pres.canonicalize();
        let ctx = format!("trial {trial}: {pres} over m={m} {}", if ramified { "ramified" } else { "unramified" });
        let bc = pres.base_change(&ext).map_err(err(&ctx))?;
        // every variable fixed; the extension still acts on its own uniformizer
        let images = (0..n).map(|i| VarImage { target: i, character: 0, unit: f.one() }).collect();
        let act = MonomialAction::for_extension(&ext, images);
        let rep = descend(&bc, &ext, &act).map_err(err(&ctx))?;
        let names_in: Vec<String> = pres.names();
        let mut back = rep.surviving.renamed(&names_in);
        back.canonicalize();
        ensure(back.nvars() == n, || format!("{ctx}: {} variables survive", back.nvars()))?;
        let kinds = |p: &Presentation| p.vars.iter().map(|v| v.kind).collect::<Vec<_>>();
        ensure(kinds(&back) == kinds(&pres), || format!("{ctx}: variable kinds changed"))?;
        ensure(fmt(&back) == fmt(&pres), || format!("{ctx}: recovered {:?}", fmt(&back)))?;
        *counts.entry(if ramified { "ramified" } else { "unramified" }).or_insert(0) += 1;
    }
    Ok(format!("120 roundtrips {counts:?}, {redrawn} degenerate inputs redrawn"))
}

/// `Π (Y − c_i π^{r_i}) · unit` together with the X-radii `e − r_i` of its zeros.
struct Constructed {
    f: LaurentFunction,
    factors: Vec<LaurentFunction>,
    radii: Vec<i64>,
}

fn construct(rng: &mut ChaCha8Rng, prec: usize, trunc: usize) -> Constructed {
    let p = [7u32, 11, 13][rng.gen_range(0..3)];
    let field = Field::prime(p).unwrap();
    let e = rng.gen_range(2..=6usize);
    let kind = KINDS[rng.gen_range(0..3)];
    // zeros must sit on circles that belong to the annulus
    let (lo, hi) = match kind {
        AnnulusType::Closed => (0, e as i64),
        AnnulusType::Open => (1, e as i64 - 1),
        AnnulusType::SemiOpen => (1, e as i64),
    };
    let parse = |s: &str| LaurentFunction::parse(&field, e, kind, trunc, prec, s).expect("constructed function parses");
    let nf = rng.gen_range(1..=4);
    let mut factors = Vec::new();
    let mut radii = Vec::new();
    for _ in 0..nf {
        let r = rng.gen_range(lo..=hi);
        let c0 = rng.gen_range(1..p);
        let c1 = rng.gen_range(0..p);
        factors.push(parse(&format!("Y - {c0}*pi^{r} - {c1}*pi^{}", r + 1)));
        radii.push(e as i64 - r);
    }
    let mut unit = format!("{}", rng.gen_range(1..p));
    for _ in 0..rng.gen_range(0..=3) {
        let (i, j) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
        unit.push_str(&format!(" + {}*pi*X^{i}*Y^{j}", rng.gen_range(1..p)));
    }
    let mut f = parse(&unit);
    for fac in &factors {
        f = f.mul(fac);
    }
    Constructed { f, factors, radii }
}

/// Coefficients of `Π (Y − c_i π^{r_i})` as a polynomial in `Y`, low to high.
fn expected_p(c: &Constructed) -> Vec<DvrElement> {
    let f = c.f.field();
    let prec = c.f.working_prec();
    let mut poly = vec![DvrElement::one(f, prec)];
    for fac in &c.factors {
        let root = fac.a(0).neg(); // factor is Y - root
        let mut next = vec![DvrElement::zero(f, prec); poly.len() + 1];
        for (i, a) in poly.iter().enumerate() {
            next[i + 1] = next[i + 1].add(a);
            next[i] = next[i].sub(&a.mul(&root));
        }
        poly = next;
    }
    poly
}

// 5. Preparation of constructed products.
fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 500;
    let mut worst = usize::MAX;
    for t in 0..n {
        let c = construct(&mut rng, 64, 24);
        let fs: Vec<String> = c.factors.iter().map(|g| g.format("pi")).collect();
        let ctx = format!("function {t} ({}, e = {}, factors {fs:?}): {}", c.f.kind(), c.f.e(), c.f.format("pi"));
        let prep = c.f.weierstrass_prepare().map_err(err(&ctx))?;
        ensure(prep.degree() == c.factors.len(), || format!("{ctx}: degree {} for {} factors", prep.degree(), c.factors.len()))?;
        let (lhs, rhs) = prep.identity_sides(&c.f);
        let level = agreement_level(&lhs, &rhs);
        ensure(level >= 32, || format!("{ctx}: identity only holds to order {level}"))?;
        let want = expected_p(&c);
        for (k, (a, b)) in prep.p.iter().zip(&want).enumerate() {
            ensure(a.agrees_to(b, 32), || format!("{ctx}: coefficient {k} of P is {}, expected {}", a.format("pi"), b.format("pi")))?;
        }
        worst = worst.min(level);
    }
    Ok(format!("{n} functions, identity holds to order >= {worst}"))
}

// 6. Zero counts per circle against the factor radii.
fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 500;
    let mut circles = 0;
    for t in 0..n {
        let c = construct(&mut rng, 64, 24);
        let ctx = format!("function {t}: {}", c.f.format("pi"));
        let mut by_radius: BTreeMap<i64, i64> = BTreeMap::new();
        for r in &c.radii {
            *by_radius.entry(*r).or_insert(0) += 1;
        }
        let crit = c.f.critical_radii().map_err(err(&ctx))?;
        let want: Vec<Rational64> = by_radius.keys().map(|r| q(*r, 1)).collect();
        ensure(crit == want, || format!("{ctx}: critical radii {crit:?}, expected {want:?}"))?;
        for (r, k) in &by_radius {
            let z = c.f.count_zeros(q(*r, 1), q(*r, 1)).map_err(err(&ctx))?;
            ensure(z == *k, || format!("{ctx}: {z} zeros at radius {r}, expected {k}"))?;
            circles += 1;
        }
        // open segments between consecutive critical radii carry no zeros
        let (lo, _, hi, _) = c.f.admissible_range();
        let mut cuts = vec![lo];
        cuts.extend(want.iter().copied());
        cuts.push(hi);
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                let mid = (w[0] + w[1]) / q(2, 1);
                let z = c.f.count_zeros(mid, mid).map_err(err(&ctx))?;
                ensure(z == 0, || format!("{ctx}: {z} zeros at radius {}", fmt_ratio(mid)))?;
            }
        }
        let total = c.f.total_zeros().map_err(err(&ctx))?;
        ensure(total == c.radii.len() as i64, || format!("{ctx}: total {total}"))?;
    }
    Ok(format!("{n} functions, {circles} circles"))
}

fn random_translation(rng: &mut ChaCha8Rng, f: &Field, e: usize, prec: usize) -> DvrElement {
    let k = e + 3 + rng.gen_range(0..3);
    let terms: Vec<(usize, Fe)> = (0..2).map(|i| (k + i, random_unit(rng, f))).collect();
    DvrElement::from_terms(f, &terms, prec)
}

fn random_unit(rng: &mut ChaCha8Rng, f: &Field) -> Fe {
    loop {
        let x = f.from_digits(&(0..f.degree()).map(|_| rng.gen_range(0..f.characteristic())).collect::<Vec<_>>());
        if !f.is_zero(&x) {
            return x;
        }
    }
}

/// Hides `s` behind one to three random translations, alternating sides.
fn disguise(rng: &mut ChaCha8Rng, s: &AnnulusAutomorphism, e: usize, prec: usize) -> Result<AnnulusAutomorphism, String> {
    let mut out = s.clone();
    let f = s.field().clone();
    for _ in 0..rng.gen_range(1..=3) {
        out = out.conjugate_translation(&random_translation(rng, &f, e, prec)).map_err(err("translation"))?;
        if rng.gen_bool(0.5) {
            out = out.mirrored().map_err(err("mirror"))?;
        }
    }
    Ok(out)
}

// 7. Linearization of disguised linear actions.
fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (trunc, prec, target) = (20, 48, 32);
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    let mut done = 0;
    while done < 108 {
        let which = done % 4;
        let m = [2u32, 3, 4][rng.gen_range(0..3)];
        let e = rng.gen_range(2..=4usize) * if which >= 2 { 2 } else { 1 };
        let (s, label, zeta_one) = match which {
            // fixed branches, zeta of exact order m over F_13
            0 => {
                let f = Field::prime(13).unwrap();
                let like = LaurentFunction::monomial(&f, e, AnnulusType::Closed, trunc, prec, 1);
                let zeta = f.root_of_unity(m as u64).map_err(err("root of unity"))?;
                let c = f.pow(&zeta, rng.gen_range(0..m) as i64);
                (AnnulusAutomorphism::linear(&like, m, &zeta, 0, &c).map_err(err("linear"))?, format!("fixed m={m} zeta primitive"), false)
            }
            // fixed branches, zeta = 1: the action is Frobenius on F_{5^m}
            1 => {
                let f = Field::extension_auto(5, m).map_err(err("field"))?;
                let like = LaurentFunction::monomial(&f, e, AnnulusType::Closed, trunc, prec, 1);
                let b = random_unit(&mut rng, &f);
                let c = f.div(&b, &f.frobenius(&b, 1));
                (AnnulusAutomorphism::linear(&like, m, &f.one(), 1, &c).map_err(err("linear"))?, format!("fixed m={m} zeta=1"), true)
            }
            // switched, zeta = -1 or 1
            _ => {
                let f = Field::prime(13).unwrap();
                let like = LaurentFunction::monomial(&f, e, AnnulusType::Closed, trunc, prec, 1);
                let zeta = if which == 2 { f.from_int(-1) } else { f.one() };
                let c = random_unit(&mut rng, &f);
                let name = if which == 2 { "switched zeta=-1" } else { "switched zeta=1" };
                (AnnulusAutomorphism::swap(&like, &zeta, 0, &c).map_err(err("swap"))?, name.to_string(), false)
            }
        };
        let d = disguise(&mut rng, &s, e, prec)?;
        let ctx = format!("{label} e={e}");
        let cert = linearize(&d, target).map_err(err(&ctx))?;
        ensure(cert.verified_to_precision >= target, || format!("{ctx}: verified to {}", cert.verified_to_precision))?;
        let f = d.field().clone();
        let ub = cert.u.residue();
        if cert.branch == BranchBehavior::Fixes {
            let zo = f.multiplicative_order(&d.zeta).unwrap_or(0);
            if zo == d.order as u64 {
                ensure(f.is_one(&f.pow(&ub, d.order as i64)) && cert.u.terms().len() == 1, || format!("{ctx}: u^m != 1"))?;
            }
            if zeta_one {
                ensure(cert.u.agrees(&DvrElement::one(&f, prec)), || format!("{ctx}: u = {} for zeta = 1", cert.u.format("pi")))?;
            }
        } else {
            ensure(which >= 2, || format!("{ctx}: branches switched unexpectedly"))?;
        }
        *tally.entry(label.split(" m=").next().unwrap().to_string() + "").or_insert(0) += 1;
        done += 1;
    }
    Ok(format!("{done} certificates at precision {target}: {tally:?}"))
}

fn random_fractional(rng: &mut ChaCha8Rng) -> FractionalAnnulus {
    let d = [1, 2, 3, 4, 6][rng.gen_range(0..5)];
    let a = rng.gen_range(-2 * d..=2 * d);
    let len = rng.gen_range(1..=3 * d);
    FractionalAnnulus::new(q(a, d), q(a + len, d), KINDS[rng.gen_range(0..3)]).unwrap()
}

// 8. The table of forms and the moduli of fractional annuli.
fn criterion_8() -> Outcome {
    // the published table: 3 / 2 / 1
    let table = |semi: bool, rho: u32, even: bool| -> u32 {
        match (semi, rho, even) {
            (false, 2, true) => 3,
            (true, 2, _) | (false, 1, _) => 2,
            _ => 1,
        }
    };
    let mut cells = 0;
    for kind in KINDS {
        for rho in [1u32, 2] {
            for e in 1..=8u64 {
                let semi = kind == AnnulusType::SemiOpen;
                let got = count_forms(kind, rho, e).map_err(err("count_forms"))?;
                ensure(got == table(semi, rho, e % 2 == 0), || format!("count_forms({kind}, {rho}, {e}) = {got}"))?;
                // independent count: distinct normal forms of the fixed-branch
                // forms (radii in (1/rho)Z, modulus e/rho) plus the switched form
                let mut classes = std::collections::HashSet::new();
                for a in 0..rho as i64 {
                    let v = FractionalAnnulus::new(q(a, rho as i64), q(a, rho as i64) + q(e as i64, rho as i64), kind).unwrap();
                    classes.insert(normal_form(&v));
                }
                let switched = !semi && e % rho as u64 == 0;
                let oracle = classes.len() as u32 + switched as u32;
                ensure(got == oracle, || format!("count_forms({kind}, {rho}, {e}) = {got}, enumeration gives {oracle}"))?;
                cells += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let vs: Vec<FractionalAnnulus> = (0..1000).map(|_| random_fractional(&mut rng)).collect();
    let mut iso_pairs = 0;
    for (i, v) in vs.iter().enumerate() {
        ensure(isomorphic(v, v), || format!("{} not isomorphic to itself", v.describe()))?;
        let nf = normal_form(v);
        let rep = FractionalAnnulus::new(nf.alpha_class, nf.alpha_class + nf.modulus, v.kind).unwrap();
        ensure(normal_form(&rep) == nf, || format!("normal form of {} is not idempotent", v.describe()))?;
        ensure(isomorphic(v, &rep), || format!("{} not isomorphic to its normal form", v.describe()))?;
        // coordinate changes X -> pi^n X, and X -> pi^c / X off the semi-open type
        let n = rng.gen_range(-3..=3);
        let shifted = FractionalAnnulus::new(v.alpha + n, v.beta + n, v.kind).unwrap();
        ensure(isomorphic(v, &shifted), || format!("{} vs shift by {n}", v.describe()))?;
        if v.kind != AnnulusType::SemiOpen {
            let inv = v.inverted(rng.gen_range(-3..=3));
            ensure(isomorphic(v, &inv), || format!("{} vs its inversion", v.describe()))?;
        }
        let (w, x) = (&vs[(i * 7 + 1) % vs.len()], &vs[(i * 13 + 5) % vs.len()]);
        for (a, b) in [(v, w), (v, x), (w, x)] {
            if isomorphic(a, b) {
                iso_pairs += 1;
                ensure(isomorphic(b, a), || "not symmetric".into())?;
                ensure(a.modulus() == b.modulus(), || "isomorphic annuli with different moduli".into())?;
            }
        }
        if isomorphic(v, w) && isomorphic(w, x) {
            ensure(isomorphic(v, x), || format!("not transitive at {}", v.describe()))?;
        }
        // scaling by a common denominator keeps isomorphic annuli of equal modulus
        if isomorphic(v, w) {
            ensure(v.base_change(12).modulus() == w.base_change(12).modulus(), || "base change changed the modulus".into())?;
        }
    }
    Ok(format!("{cells} table cells, 1000 annuli, {iso_pairs} isomorphic pairs among sampled triples"))
}

fn random_function(rng: &mut ChaCha8Rng, f: &Field, e: usize, kind: AnnulusType) -> LaurentFunction {
    let p = f.characteristic();
    let mut terms = vec![format!("{}*pi^{}*X^{}", rng.gen_range(1..p), rng.gen_range(0..=3), rng.gen_range(0..=4))];
    for _ in 0..rng.gen_range(0..=4) {
        let c = rng.gen_range(1..p);
        let k = rng.gen_range(0..=4);
        let mono = if rng.gen_bool(0.5) { format!("X^{}", rng.gen_range(0..=4)) } else { format!("Y^{}", rng.gen_range(1..=4)) };
        terms.push(format!("{c}*pi^{k}*{mono}"));
    }
    // products stay below order 2 * (3 + 4 * 5) + 4 < 64
    let g = LaurentFunction::parse(f, e, kind, 24, 64, &terms.join(" + ")).unwrap();
    if g.is_zero() {
        // the terms cancelled
        return random_function(rng, f, e, kind);
    }
    g
}

// 9. Valuations are additive on products.
fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = Field::prime(11).unwrap();
    let mut radii_checked = 0;
    for t in 0..1000 {
        let e = rng.gen_range(1..=5usize);
        let kind = KINDS[rng.gen_range(0..3)];
        let (g, h) = (random_function(&mut rng, &f, e, kind), random_function(&mut rng, &f, e, kind));
        let gh = g.mul(&h);
        let ctx = format!("pair {t}: ({}) * ({})", g.format("pi"), h.format("pi"));
        let (bg, bh, bgh) = (
            g.boundary_valuations().map_err(err(&ctx))?,
            h.boundary_valuations().map_err(err(&ctx))?,
            gh.boundary_valuations().map_err(err(&ctx))?,
        );
        let sum = |a: Option<i64>, b: Option<i64>| a.zip(b).map(|(a, b)| a + b);
        let want = (bg.eta_x + bh.eta_x, bg.v_x + bh.v_x, sum(bg.nu_x, bh.nu_x), bg.eta_y + bh.eta_y, bg.v_y + bh.v_y, sum(bg.nu_y, bh.nu_y));
        let got = (bgh.eta_x, bgh.v_x, bgh.nu_x, bgh.eta_y, bgh.v_y, bgh.nu_y);
        ensure(got == want, || format!("{ctx}: boundary data {got:?}, expected {want:?}"))?;
        let (lo, _, hi, _) = g.admissible_range();
        for _ in 0..4 {
            let r = lo + (hi - lo) * q(rng.gen_range(0..=12), 12);
            let (a, b, c) = (g.eta_r(r).map_err(err(&ctx))?, h.eta_r(r).map_err(err(&ctx))?, gh.eta_r(r).map_err(err(&ctx))?);
            ensure(c == a + b, || format!("{ctx}: eta_{} is {c}, expected {}", fmt_ratio(r), a + b))?;
            radii_checked += 1;
        }
    }
    Ok(format!("1000 pairs, {radii_checked} Gauss valuations"))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 9] = [
        (1, "basis table restriction", Duration::from_secs(1), criterion_1),
        (2, "diagonal descent sweep", Duration::from_secs(10), criterion_2),
        (3, "switched quadrics", Duration::from_secs(60), criterion_3),
        (4, "base change roundtrips", Duration::from_secs(30), criterion_4),
        (5, "Weierstrass preparation", Duration::from_secs(60), criterion_5),
        (6, "zero counts", Duration::from_secs(60), criterion_6),
        (7, "linearization certificates", Duration::from_secs(60), criterion_7),
        (8, "moduli table", Duration::from_secs(1), criterion_8),
        (9, "valuation algebra", Duration::from_secs(60), criterion_9),
    ];
    let only: Vec<u32> = std::env::args().filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, budget, run) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let t0 = Instant::now();
        let res = run();
        let dt = t0.elapsed();
        let res = res.and_then(|d| if dt <= budget { Ok(d) } else { Err(format!("{d}; took {dt:.2?}, budget {budget:?}")) });
        match res {
            Ok(detail) => println!("criterion {n} PASS [{name}] {detail} ({dt:.2?})"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} FAIL [{name}] {why} ({dt:.2?})");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
