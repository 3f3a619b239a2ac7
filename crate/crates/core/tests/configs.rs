use std::collections::HashSet;
use std::path::Path;

use mpnormal::config::{preset, ProblemConfig};
use serde_json::Value;

fn root() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn schema(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(root().join("schema").join(name)).unwrap()).unwrap()
}

fn required(s: &Value) -> Vec<&str> {
    s["required"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect()
}

#[test]
fn shipped_configs_match_presets() {
    let mut seen = 0;
    for entry in std::fs::read_dir(root().join("configs")).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        let cfg = ProblemConfig::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(cfg, preset(&name).unwrap(), "{name}");
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn config_schema_lists_every_field() {
    let s = schema("config.v1.schema.json");
    let cfg: Value = serde_json::from_str(&preset("diag-2x2").unwrap().to_json()).unwrap();
    let keys: HashSet<&str> = cfg.as_object().unwrap().keys().map(String::as_str).collect();
    let props: HashSet<&str> = s["properties"].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, props);
    for r in required(&s) {
        assert!(keys.contains(r));
    }
    let opts: HashSet<&str> = cfg["options"].as_object().unwrap().keys().map(String::as_str).collect();
    let opt_props: HashSet<&str> = s["properties"]["options"]["properties"].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(opts, opt_props);
}

fn report(args: &[&str]) -> Value {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mpnormal").chain(args.iter().copied());
    mpnormal::cli::run(argv, &mut out, &mut err);
    serde_json::from_slice(&out).unwrap()
}

fn assert_required(v: &Value, s: &Value) {
    for r in required(s) {
        assert!(v.get(r).is_some(), "missing {r} in {v}");
    }
    if let Some(kind) = s["properties"]["kind"].get("const") {
        assert_eq!(&v["kind"], kind);
    }
}

#[test]
fn reports_carry_schema_fields() {
    let spectrum = report(&["spectrum", "--preset", "scalar-phase"]);
    let s = schema("spectrum_report.v1.schema.json");
    assert_required(&spectrum, &s);
    let point_req = &s["properties"]["point"]["items"];
    for p in spectrum["point"].as_array().unwrap() {
        assert_required(p, point_req);
    }

    let validate = report(&["validate", "--preset", "diag-2x2"]);
    let s = schema("normality_report.v1.schema.json");
    assert_required(&validate, &s);
    assert_required(&validate["report"], &s["properties"]["report"]);
    assert_required(&validate["coefficients"], &s["properties"]["coefficients"]);

    let verify = report(&["verify", "--preset", "scalar-phase", "--suite", "green"]);
    let s = schema("verify_report.v1.schema.json");
    assert_required(&verify, &s);
    for c in verify["checks"].as_array().unwrap() {
        assert_required(c, &s["properties"]["checks"]["items"]);
    }

    let error = report(&["spectrum", "--preset", "unequal-kernels"]);
    assert_required(&error, &schema("error.v1.schema.json"));
}
