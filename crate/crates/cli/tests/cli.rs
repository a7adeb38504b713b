use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn gesq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gesq")).args(args).env_remove("GESQ_SEED").output().expect("run gesq")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gesq-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn value(out: &Output) -> f64 {
    json_of(out)["result"]["value"].as_f64().unwrap()
}

#[test]
fn construct_reports_dimensions() {
    for (args, dim) in [
        (vec!["--subspace", "S", "--N", "3", "--d", "3", "--theta", "1.5707963"], 4),
        (vec!["--subspace", "Q1", "--N", "3", "--d", "4"], 33),
        (vec!["--subspace", "ASYM", "--N", "3", "--d", "3"], 1),
    ] {
        let mut full = vec!["construct"];
        full.extend(args);
        let doc = json_of(&gesq(&full));
        assert_eq!(doc["dimension"].as_u64(), Some(dim));
        assert_eq!(doc["basis"].as_array().unwrap().len(), dim as usize);
    }
}

#[test]
fn unknown_label_is_a_usage_error() {
    let out = gesq(&["construct", "--subspace", "NOPE"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown subspace label"));
}

#[test]
fn measure_matches_table_values() {
    let v = value(&gesq(&["measure", "--method", "exact", "--target", "GGM", "--subspace", "S", "--N", "4", "--d", "5"]));
    assert!((v - 0.09549).abs() < 5e-6, "{v}");
    let v = value(&gesq(&["measure", "--method", "seesaw", "--target", "GM", "--subspace", "Q2", "--N", "4", "--d", "2"]));
    assert!((v - 0.1794).abs() < 1e-3, "{v}");
    let v = value(&gesq(&["measure", "--method", "sdp", "--target", "GM", "--subspace", "Q1", "--N", "3", "--d", "3"]));
    assert!((v - 0.19022).abs() < 1e-3, "{v}");
}

#[test]
fn seesaw_output_carries_factors_and_seed() {
    let args = ["measure", "--method", "seesaw", "--target", "GM", "--subspace", "S", "--d", "3", "--seed", "5"];
    let doc = json_of(&gesq(&args));
    assert_eq!(doc["seed"], 5);
    assert_eq!(doc["result"]["factors"].as_array().unwrap().len(), 3);
    let again = json_of(&gesq(&args));
    assert_eq!(doc["result"]["value"], again["result"]["value"]);
}

#[test]
fn incompatible_requests_exit_64() {
    for args in [
        vec!["measure", "--method", "pptmix", "--target", "GM", "--subspace", "S"],
        vec!["measure", "--method", "exact", "--target", "GM", "--subspace", "Q1"],
        vec!["measure", "--method", "seesaw", "--subspace", "S"],
        vec!["measure", "--method", "sdp", "--target", "GM", "--subspace", "S", "--fully"],
        vec!["measure", "--method", "sdp", "--target", "GM", "--subspace", "Q1", "--d", "5", "--max-D", "64"],
        vec!["noise-threshold", "--method", "pptmix", "--target", "ent", "--subspace", "S"],
        vec!["reproduce", "--table", "IX"],
        vec!["reproduce", "--table", "VI", "--methods", "magic"],
        vec!["frobnicate"],
    ] {
        assert_eq!(gesq(&args).status.code(), Some(64), "{args:?}");
    }
}

#[test]
fn dump_program_writes_lowered_form() {
    let dir = scratch("dump");
    let path = dir.join("p.json");
    let out = gesq(&[
        "measure", "--method", "sdp", "--target", "GGM", "--subspace", "S", "--d", "3", "--dump-program",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let cuts = doc.as_array().unwrap();
    assert_eq!(cuts.len(), 3);
    let p = &cuts[0]["program"];
    assert_eq!(p["m"].as_u64().unwrap() as usize, p["b"].as_array().unwrap().len());
    assert!(p["real_mode"].as_bool().unwrap());
}

#[test]
fn witness_threshold_is_exact_for_s() {
    let doc = json_of(&gesq(&["noise-threshold", "--method", "witness", "--target", "gme", "--subspace", "S"]));
    assert_eq!(doc["exact"], "9/28");
    assert!((doc["result"]["p_star"].as_f64().unwrap() - 9.0 / 28.0).abs() < 1e-15);
}

#[test]
fn exact_records_have_formula_inputs_value() {
    let doc = json_of(&gesq(&["exact", "--formula", "gm-bound-s", "--N", "3", "--d", "3"]));
    let rec = &doc.as_array().unwrap()[0];
    assert_eq!(rec["formula"], "gm-bound-s");
    assert_eq!(rec["exact"], "31/72");
    assert_eq!(rec["inputs"]["N"], 3);
}

#[test]
fn verify_passes() {
    let out = gesq(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["parameters"]["ppt_certificate"]["complement_value"], "239371/568000");
}

#[test]
fn fig1_peaks_at_one_half() {
    let dir = scratch("fig1");
    let out = gesq(&["reproduce", "--fig1", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.join("fig1.data.csv")).unwrap();
    let mut best = (0.0, f64::NEG_INFINITY);
    for row in rdr.records() {
        let row = row.unwrap();
        if &row[1] == "2" {
            let (t, v): (f64, f64) = (row[0].parse().unwrap(), row[2].parse().unwrap());
            if v > best.1 {
                best = (t, v);
            }
        }
    }
    assert!((best.1 - 0.5).abs() < 1e-12);
    assert!((best.0 - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    for f in ["fig1.csv", "fig1.reference.csv", "fig1.manifest.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
}

#[test]
fn witness_rows_of_table_vi_match() {
    let dir = scratch("vi");
    let out = gesq(&["reproduce", "--table", "VI", "--methods", "witness", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let manifest: Value = serde_json::from_slice(&std::fs::read(dir.join("table-VI.manifest.json")).unwrap()).unwrap();
    let records = manifest["records"].as_array().unwrap();
    assert_eq!(records.len(), 26);
    assert!(records.iter().all(|r| r["status"] == "ok" && r["method"] == "witness"));
    let s3 = records.iter().find(|r| r["family"] == "S" && r["d"] == 3 && r["quantity"] == "p-witness-gme").unwrap();
    assert_eq!(s3["exact"], "9/28");
}

#[test]
fn budget_marks_cells_skipped() {
    let dir = scratch("skip");
    let out = gesq(&["reproduce", "--table", "IV", "--methods", "sdp", "--max-D", "16", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = std::fs::read_to_string(dir.join("table-IV.csv")).unwrap();
    assert_eq!(text.matches(",skipped,").count(), 4, "{text}");
    assert_eq!(text.matches(",ok,").count(), 4, "{text}");
}
