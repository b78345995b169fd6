use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn nonarch_with(args: &[&str], config: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nonarch"));
    cmd.args(args).env_remove("NONARCH_CONFIG");
    if let Some(c) = config {
        cmd.env("NONARCH_CONFIG", c);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn nonarch(args: &[&str]) -> Run {
    nonarch_with(args, None)
}

fn json(r: &Run) -> serde_json::Value {
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", r.stdout))
}

fn write_config(name: &str, body: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn prep_reports_degree_and_roundtrip() {
    let r = nonarch(&["prep", &fixture("laurent.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("degree = 1"));
    assert!(r.stdout.contains("alpha = 1"));
    assert!(r.stdout.contains("eta = 2"));
}

#[test]
fn newton_counts_one_zero() {
    let r = nonarch(&["newton", &fixture("laurent.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("critical radii: [2]"), "{}", r.stdout);
    assert!(r.stdout.contains("total zeros on [0, 4]: 1"));
}

#[test]
fn weil_restriction_of_basis_table() {
    let r = nonarch(&["weil", &fixture("disc.json"), &fixture("sqrt7_table.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("output: R{X_0, X_1}"));
    assert!(r.stdout.contains("charpoly c_0 = x_0^2 - 7*x_1^2"));
    assert!(r.stdout.contains("charpoly c_1 = -2*x_0"));
}

#[test]
fn dilated_restriction_along_ramified_extension() {
    let r = nonarch(&["--char", "7", "weil", &fixture("disc_ramified.json"), &fixture("ext_ram2.json"), "--dilated"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("R{X_0, |pi|^{1/2}X_1}"), "{}", r.stdout);
}

#[test]
fn descent_to_fractional_annulus() {
    let r = nonarch(&["descend", &fixture("annulus_ram3.json"), &fixture("ext_ram3.json"), &fixture("action_ram3.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("modulus 4/3"), "{}", r.stdout);
    assert!(r.stdout.contains("base change check: verified"));
}

#[test]
fn switched_descent_gives_quadric() {
    let args = ["descend", &fixture("annulus_ram2.json"), &fixture("ext_ram2.json"), &fixture("action_swap.json"), "--switched"];
    let r = nonarch(&args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("normal form: quadric"), "{}", r.stdout);
    assert!(r.stdout.contains("flat: true"));
    let v = json(&nonarch(&[&args[..], &["--output", "json"]].concat()));
    assert!(v.is_object());
}

#[test]
fn linearize_text_and_pretty() {
    let plain = nonarch(&["linearize", &fixture("automorphism.json")]);
    assert_eq!(plain.code, 0, "{}", plain.stderr);
    assert!(plain.stdout.contains("zeta = 3"));
    let pretty = nonarch(&["linearize", &fixture("automorphism.json"), "--pretty"]);
    assert!(pretty.stdout.contains("ζ = 3") && pretty.stdout.contains("σ(X)"), "{}", pretty.stdout);
    assert!(!pretty.stdout.contains("zeta"));
}

#[test]
fn classify_and_count_forms_as_json() {
    let v = json(&nonarch(&["classify", "--alpha", "-1/3", "--beta", "1", "--type", "closed", "--output", "json"]));
    let text = v.to_string();
    assert!(text.contains("4/3"), "{text}");
    let v = json(&nonarch(&["count-forms", "--type", "closed", "--rho", "2", "--modulus", "4", "--output", "json"]));
    assert_eq!(v["forms"], 3);
    let v = json(&nonarch(&["count-forms", "--type", "semi-open", "--rho", "1", "--modulus", "3", "--output", "json"]));
    assert_eq!(v["forms"], 1);
}

#[test]
fn exit_codes() {
    // math failure
    assert_eq!(nonarch(&["classify", "--alpha", "2", "--beta", "1", "--type", "open"]).code, 1);
    assert_eq!(nonarch(&["count-forms", "--type", "open", "--rho", "3", "--modulus", "2"]).code, 1);
    // I/O and parse errors
    assert_eq!(nonarch(&["prep", "/nonexistent/f.json"]).code, 2);
    assert_eq!(nonarch(&["linearize", &fixture("laurent.json")]).code, 2);
    assert_eq!(nonarch(&["classify", "--alpha", "x", "--beta", "1", "--type", "open"]).code, 2);
    assert_eq!(nonarch(&["no-such-command"]).code, 2);
    let r = nonarch(&["prep", "/nonexistent/f.json"]);
    assert!(r.stderr.starts_with("error:"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn config_file_is_layered_under_flags() {
    let cfg = write_config("json_out.json", r#"{"output": "json", "precision": 20}"#);
    let r = nonarch_with(&["count-forms", "--type", "open", "--rho", "1", "--modulus", "5"], Some(&cfg));
    assert_eq!(json(&r)["forms"], 2);
    // a flag overrides the file
    let r = nonarch_with(&["count-forms", "--type", "open", "--rho", "1", "--modulus", "5", "--output", "text"], Some(&cfg));
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.trim(), "2");
    // file precision reaches the commands
    let r = nonarch_with(&["linearize", &fixture("automorphism.json")], Some(&cfg));
    let v = json(&r);
    assert_eq!(v["new_x"]["prec"], 20);
    assert_eq!(v["verified_to_precision"], 17);
}

#[test]
fn bad_config_is_a_parse_error() {
    let cfg = write_config("bad.json", r#"{"precison": 20}"#);
    assert_eq!(nonarch_with(&["count-forms", "--type", "open", "--rho", "1", "--modulus", "5"], Some(&cfg)).code, 2);
    assert_eq!(nonarch_with(&["count-forms", "--type", "open", "--rho", "1", "--modulus", "5"], Some("/nonexistent.json")).code, 2);
}
