//! Command-line front end. [`run`] is the whole program minus process exit,
//! so it can be driven from tests.

use clap::{Args, Parser, Subcommand};
use num_rational::Rational64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::annulus::{AnnulusType, LaurentFunction, LaurentJson};
use crate::config::{Config, OutputFormat, PartialConfig, CONFIG_ENV};
use crate::descent::{descend, descend_switched, ActionJson, DescentReport, MonomialAction, NormalForm};
use crate::dvr::{DvrElement, DvrInput, ExtensionJson, ExtensionSpec};
use crate::error::{bail, Error, Result};
use crate::field::{Field, FieldSpec};
use crate::linearize::{agreement_level, linearize, AnnulusAutomorphism, AutomorphismJson};
use crate::moduli::{count_forms, normal_form, FractionalAnnulus};
use crate::poly::MPoly;
use crate::presentation::{
    dilated_weil_restrict, fmt_ratio, parse_ratio, weil_restrict, BasisData, Presentation, PresentationJson, RestrictionResult,
};

#[derive(Parser, Debug)]
#[command(name = "nonarch", version, about = "Computations on annuli over truncated discrete valuation rings")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// Digits of π-adic precision.
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    /// Laurent truncation degree.
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    /// Default coefficient field: 0, p or p^d.
    #[arg(long = "char", global = true)]
    pub field: Option<String>,
    /// Output format.
    #[arg(long, value_enum, global = true)]
    pub output: Option<OutputFormat>,
    /// Typeset π, ϖ and ζ in text output.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Weierstrass preparation of a Laurent function.
    Prep { file: String },
    /// Newton polygon, critical radii and zero counts.
    Newton { file: String },
    /// Weil restriction of a presentation along an extension or basis table.
    Weil {
        presentation: String,
        extension: String,
        #[arg(long)]
        dilated: bool,
    },
    /// Galois descent of a presentation.
    Descend {
        presentation: String,
        extension: String,
        action: String,
        /// The action exchanges the two variables of an annulus model.
        #[arg(long)]
        switched: bool,
    },
    /// Normal form of a tame automorphism of an annulus.
    Linearize { file: String },
    /// Normal form of a fractional annulus.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long = "type")]
        kind: String,
    },
    /// Number of forms of an annulus split by a quadratic extension.
    CountForms {
        #[arg(long = "type")]
        kind: String,
        #[arg(long)]
        rho: u32,
        #[arg(long)]
        modulus: u64,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        2
    } else {
        1
    }
}

/// Parses `args` (without the program name), layers the configuration and
/// runs the command. `config_path` stands in for `NONARCH_CONFIG`.
pub fn run(args: &[String], config_path: Option<&str>) -> Outcome {
    let argv = std::iter::once("nonarch".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli, config_path) {
        Ok(out) => Outcome { code: 0, stdout: out, stderr: String::new() },
        Err(e) => Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

/// `run` with the configuration path read from the environment.
pub fn run_from_env(args: &[String]) -> Outcome {
    let path = std::env::var(CONFIG_ENV).ok().filter(|s| !s.is_empty());
    run(args, path.as_deref())
}

fn build_config(g: &GlobalArgs, config_path: Option<&str>) -> Result<Config> {
    let mut cfg = Config::default();
    if let Some(p) = config_path {
        cfg = cfg.merge(&Config::load_file(p)?);
    }
    cfg = cfg.merge(&PartialConfig {
        precision: g.precision,
        truncation: g.truncation,
        field: g.field.clone(),
        output: g.output,
        pretty: g.pretty.then_some(true),
    });
    cfg.validate()?;
    Ok(cfg)
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

/// Typesets uniformizers and roots of unity.
pub fn prettify(s: &str) -> String {
    s.replace("varpi", "ϖ").replace("pi", "π").replace("zeta", "ζ").replace("sigma", "σ").replace(" <= ", " ≤ ")
}

fn render(cfg: &Config, text: String, value: Value) -> String {
    match cfg.output {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Text => {
            let mut s = if cfg.pretty { prettify(&text) } else { text };
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s
        }
    }
}

fn execute(cli: &Cli, config_path: Option<&str>) -> Result<String> {
    let cfg = build_config(&cli.global, config_path)?;
    match &cli.command {
        Command::Prep { file } => cmd_prep(&cfg, file),
        Command::Newton { file } => cmd_newton(&cfg, file),
        Command::Weil { presentation, extension, dilated } => cmd_weil(&cfg, presentation, extension, *dilated),
        Command::Descend { presentation, extension, action, switched } => cmd_descend(&cfg, presentation, extension, action, *switched),
        Command::Linearize { file } => cmd_linearize(&cfg, file),
        Command::Classify { alpha, beta, kind } => cmd_classify(&cfg, alpha, beta, kind),
        Command::CountForms { kind, rho, modulus } => cmd_count_forms(&cfg, kind, *rho, *modulus),
    }
}

fn load_laurent(cfg: &Config, path: &str) -> Result<LaurentFunction> {
    let j: LaurentJson = read_json(path)?;
    LaurentFunction::from_json(&j, &cfg.field()?, cfg.truncation, cfg.precision)
}

pub fn cmd_prep(cfg: &Config, path: &str) -> Result<String> {
    let f = load_laurent(cfg, path)?;
    let prep = f.weierstrass_prepare()?;
    let (lhs, rhs) = prep.identity_sides(&f);
    let residual = agreement_level(&lhs, &rhs);
    let text = format!(
        "f = {}\nP = {}\nu = {}\nalpha = {}\neta = {}\ndegree = {}\nroundtrip residual order = {}\n",
        f.format("pi"),
        prep.format_p(),
        prep.u.format("pi"),
        prep.alpha,
        prep.eta,
        prep.degree(),
        residual
    );
    let value = json!({
        "preparation": serde_json::to_value(prep.to_json()).expect("serializable"),
        "degree": prep.degree(),
        "residual_order": residual,
    });
    Ok(render(cfg, text, value))
}

pub fn cmd_newton(cfg: &Config, path: &str) -> Result<String> {
    let f = load_laurent(cfg, path)?;
    let bd = f.boundary_valuations()?;
    let poly = f.newton_polygon()?;
    let (lo, lo_in, hi, hi_in) = f.admissible_range();
    let mut text = format!("f = {}\nannulus: {} of modulus {}\n", f.format("pi"), f.kind(), f.e());
    let show = |o: Option<i64>| o.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
    text.push_str(&format!(
        "X side: eta = {}, v = {}, nu = {}\nY side: eta = {}, v = {}, nu = {}\n",
        bd.eta_x,
        bd.v_x,
        show(bd.nu_x),
        bd.eta_y,
        bd.v_y,
        show(bd.nu_y)
    ));
    let mut rows = Vec::new();
    let mut segments = Vec::new();
    let mut prev = (lo, lo_in);
    for b in &poly.breakpoints {
        let zeros = f.count_zeros(b.r, b.r)?;
        text.push_str(&format!(
            "r = {}: eta_r = {}, slopes {} -> {}, zeros {}\n",
            fmt_ratio(b.r),
            fmt_ratio(b.value),
            b.left_slope,
            b.right_slope,
            zeros
        ));
        rows.push(json!({"r": fmt_ratio(b.r), "eta": fmt_ratio(b.value), "left_slope": b.left_slope, "right_slope": b.right_slope, "zeros": zeros}));
        if b.r > prev.0 {
            segments.push((prev.0, b.r));
        }
        prev = (b.r, true);
    }
    if hi > prev.0 {
        segments.push((prev.0, hi));
    }
    text.push_str(&format!("critical radii: [{}]\n", poly.breakpoints.iter().map(|b| fmt_ratio(b.r)).collect::<Vec<_>>().join(", ")));
    let mut seg_rows = Vec::new();
    for (a, b) in segments {
        // open segment strictly between critical radii: no zeros
        let mid = (a + b) / Rational64::from_integer(2);
        let z = f.count_zeros(mid, mid)?;
        text.push_str(&format!("segment ({}, {}): zeros {}\n", fmt_ratio(a), fmt_ratio(b), z));
        seg_rows.push(json!({"from": fmt_ratio(a), "to": fmt_ratio(b), "zeros": z}));
    }
    let total = f.total_zeros()?;
    text.push_str(&format!(
        "total zeros on {}{}, {}{}: {}\n",
        if lo_in { "[" } else { "(" },
        fmt_ratio(lo),
        fmt_ratio(hi),
        if hi_in { "]" } else { ")" },
        total
    ));
    let value = json!({
        "boundary": serde_json::to_value(&bd).expect("serializable"),
        "breakpoints": rows,
        "segments": seg_rows,
        "total_zeros": total,
    });
    Ok(render(cfg, text, value))
}

fn load_presentation(cfg: &Config, path: &str) -> Result<Presentation> {
    let j: PresentationJson = read_json(path)?;
    Presentation::from_json(&j, &cfg.field()?, cfg.precision)
}

/// An explicit basis: `{"labels":["1","s"],"table":[[[1,0],[0,1]],[[0,1],[7,0]]]}`.
#[derive(Clone, Debug, Deserialize)]
pub struct TableJson {
    #[serde(default)]
    pub field: Option<FieldSpec>,
    pub labels: Vec<String>,
    pub table: Vec<Vec<Vec<DvrInput>>>,
    #[serde(default)]
    pub nilpotent: Option<Vec<bool>>,
}

enum ExtensionInput {
    Spec(ExtensionSpec),
    Table(BasisData),
}

fn load_extension(cfg: &Config, path: &str, prec: usize) -> Result<ExtensionInput> {
    let mut v: Value = serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    let default_field = cfg.field()?;
    if let Some(obj) = v.as_object_mut() {
        if !obj.contains_key("field") {
            obj.insert("field".into(), serde_json::to_value(default_field.spec()).expect("serializable"));
        }
    }
    if v.get("table").is_some() {
        let t: TableJson = serde_json::from_value(v).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
        let field = match &t.field {
            Some(s) => Field::from_spec(s)?,
            None => default_field,
        };
        let table = t
            .table
            .iter()
            .map(|row| row.iter().map(|cell| cell.iter().map(|c| DvrElement::from_json(&field, c, prec)).collect::<Result<Vec<_>>>()).collect())
            .collect::<Result<Vec<_>>>()?;
        let m = t.labels.len();
        let nil = t.nilpotent.unwrap_or_else(|| vec![false; m]);
        Ok(ExtensionInput::Table(BasisData::table(&field, t.labels, table, nil, None, prec)?))
    } else {
        let j: ExtensionJson = serde_json::from_value(v).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
        Ok(ExtensionInput::Spec(ExtensionSpec::from_json(&j)?))
    }
}

fn presentation_value(p: &Presentation) -> Value {
    let mut v = serde_json::to_value(p.to_json()).expect("serializable");
    v["ring"] = Value::String(p.to_string());
    v
}

fn charpoly_names(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("x_{i}")).collect()
}

fn format_charpoly(c: &[MPoly]) -> Vec<String> {
    let names = charpoly_names(c.first().map(|p| p.nvars()).unwrap_or(0));
    c.iter().map(|p| p.format(&names, "pi")).collect()
}

pub fn cmd_weil(cfg: &Config, pres_path: &str, ext_path: &str, dilated: bool) -> Result<String> {
    let pres = load_presentation(cfg, pres_path)?;
    let res: RestrictionResult = match (load_extension(cfg, ext_path, pres.prec)?, dilated) {
        (ExtensionInput::Spec(ext), true) => dilated_weil_restrict(&pres, &ext)?,
        (ExtensionInput::Spec(ext), false) => {
            if ext.rho > 1 && ext.r > 1 {
                bail!(Unsupported, "plain restriction along a mixed extension: restrict in two steps or use --dilated");
            }
            let basis = if ext.rho > 1 {
                BasisData::ramified(&pres.field, ext.rho as usize, ext.t, pres.prec.div_ceil(ext.rho as usize))?
            } else {
                BasisData::unramified(&ext, pres.prec)?
            };
            let mut p = pres.clone();
            if ext.rho > 1 && p.ram != ext.rho as usize {
                bail!(Domain, "presentation has ramification {}, extension {}", p.ram, ext.rho);
            }
            p.vars.iter_mut().for_each(|v| v.weight = Rational64::from_integer(0));
            weil_restrict(&p, &basis)?
        }
        (ExtensionInput::Table(_), true) => bail!(Domain, "--dilated needs a tame extension, not a basis table"),
        (ExtensionInput::Table(basis), false) => weil_restrict(&pres, &basis)?,
    };
    let cp = format_charpoly(&res.charpoly);
    let out = &res.presentation;
    let mut text = format!("input: {pres}\noutput: {out}\n");
    for (k, c) in cp.iter().enumerate() {
        text.push_str(&format!("charpoly c_{k} = {c}\n"));
    }
    let value = json!({"presentation": presentation_value(out), "charpoly": cp});
    Ok(render(cfg, text, value))
}

fn normal_form_value(nf: &Option<NormalForm>) -> Value {
    match nf {
        None => Value::Null,
        Some(NormalForm::FractionalAnnulus { x, y, b, annulus }) => {
            let c = normal_form(annulus);
            json!({
                "kind": "fractional_annulus", "x": x, "y": y, "pi_exponent": b,
                "alpha": fmt_ratio(annulus.alpha), "beta": fmt_ratio(annulus.beta),
                "modulus": fmt_ratio(c.modulus), "alpha_class": fmt_ratio(c.alpha_class),
            })
        }
        Some(NormalForm::Quadric { a, u, exponent }) => json!({
            "kind": "quadric", "a": a.format("pi"), "u": u.format("pi"), "exponent": exponent,
        }),
    }
}

pub fn report_text(r: &DescentReport) -> String {
    let mut t = String::new();
    t.push_str(&format!("input: {}\n", r.input));
    t.push_str(&format!("restriction: {}\n", r.restricted));
    for line in &r.induced {
        t.push_str(&format!("  {line}\n"));
    }
    if !r.eliminated.is_empty() {
        t.push_str(&format!("eliminated: {}\n", r.eliminated.join(", ")));
    }
    for (a, b) in &r.identified {
        t.push_str(&format!("identified: {a} ~ {b}\n"));
    }
    t.push_str(&format!("descended: {}\n", r.surviving));
    t.push_str(&format!("flat: {}\n", r.flat));
    if let Some(nf) = &r.normal_form {
        t.push_str(&format!("normal form: {}\n", nf.describe()));
    }
    t.push_str(&format!(
        "base change check: {}\n",
        match r.verified {
            Some(true) => "verified",
            Some(false) => "FAILED",
            None => "unverifiable",
        }
    ));
    t
}

pub fn report_value(r: &DescentReport) -> Value {
    json!({
        "input": presentation_value(&r.input),
        "restriction": presentation_value(&r.restricted),
        "induced_action": r.induced,
        "eliminated": r.eliminated,
        "identified": r.identified,
        "descended": presentation_value(&r.surviving),
        "flat": r.flat,
        "normal_form": normal_form_value(&r.normal_form),
        "verified": r.verified,
    })
}

pub fn cmd_descend(cfg: &Config, pres_path: &str, ext_path: &str, action_path: &str, switched: bool) -> Result<String> {
    let pres = load_presentation(cfg, pres_path)?;
    let ExtensionInput::Spec(ext) = load_extension(cfg, ext_path, pres.prec)? else {
        bail!(Domain, "descent needs a tame extension, not a basis table");
    };
    let aj: ActionJson = read_json(action_path)?;
    let action = MonomialAction::from_json(&aj, &pres, &ext)?;
    let report = if switched { descend_switched(&pres, &ext, &action)? } else { descend(&pres, &ext, &action)? };
    if report.verified == Some(false) {
        bail!(Domain, "descended presentation does not base change back to the input:\n{}", report_text(&report));
    }
    Ok(render(cfg, report_text(&report), report_value(&report)))
}

pub fn cmd_linearize(cfg: &Config, path: &str) -> Result<String> {
    let j: AutomorphismJson = read_json(path)?;
    let aut = AnnulusAutomorphism::from_json(&j, &cfg.field()?, cfg.truncation, cfg.precision)?;
    // the units live in Y/π^e, which costs e digits of the working precision
    let target = aut.sigma_x.working_prec().min(cfg.precision).saturating_sub(aut.sigma_x.e()).max(1);
    aut.check_relation(target)?;
    aut.check_order(target)?;
    let cert = linearize(&aut, target)?;
    let f = aut.field();
    let mut text = format!(
        "sigma(X) = {}\nsigma(Y) = {}\norder {}, zeta = {}\nbranches: {:?}\n",
        aut.sigma_x.format("pi"),
        aut.sigma_y.format("pi"),
        aut.order,
        f.format(&aut.zeta),
        cert.branch
    );
    text.push_str(&format!("new X = {}\nnew Y = {}\nu = {}\n", cert.new_x.format("pi"), cert.new_y.format("pi"), cert.u.format("pi")));
    text.push_str(&format!("verified to precision {}\nnormalized: {}\n", cert.verified_to_precision, cert.normalized));
    for n in &cert.notes {
        text.push_str(&format!("note: {n}\n"));
    }
    Ok(render(cfg, text, serde_json::to_value(cert.to_json()).expect("serializable")))
}

fn parse_kind(s: &str) -> Result<AnnulusType> {
    AnnulusType::parse(s).map_err(|e| Error::Parse(e.to_string()))
}

pub fn cmd_classify(cfg: &Config, alpha: &str, beta: &str, kind: &str) -> Result<String> {
    let v = FractionalAnnulus::new(parse_ratio(alpha)?, parse_ratio(beta)?, parse_kind(kind)?)?;
    let c = normal_form(&v);
    let text = format!(
        "{}\nmodulus = {}\nalpha class = {}\n",
        v.describe(),
        fmt_ratio(c.modulus),
        fmt_ratio(c.alpha_class)
    );
    Ok(render(cfg, text, json!({"alpha": fmt_ratio(v.alpha), "beta": fmt_ratio(v.beta), "type": v.kind, "normal_form": c})))
}

pub fn cmd_count_forms(cfg: &Config, kind: &str, rho: u32, modulus: u64) -> Result<String> {
    let kind = parse_kind(kind)?;
    let n = count_forms(kind, rho, modulus)?;
    Ok(render(cfg, format!("{n}\n"), json!({"type": kind, "rho": rho, "modulus": modulus, "forms": n})))
}
