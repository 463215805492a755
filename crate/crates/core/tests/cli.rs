use std::fs;
use std::process::{Command, Output};

fn geoap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoap"))
        .args(args)
        .env_remove("GEOAP_DIGITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn spectrum_rows_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let o = geoap(&["spectrum", "--max-trace", "100", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 99);
    assert_eq!(text.lines().nth(1), Some("3,1.924847300238413789991036"));

    assert_eq!(geoap(&["spectrum", "--max-trace", "2"]).status.code(), Some(2));
    let o = geoap(&["spectrum", "--max-trace", "3"]);
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn precision_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_geoap"))
        .args(["spectrum", "--max-trace", "3"])
        .env("GEOAP_DIGITS", "30")
        .output()
        .unwrap();
    assert_eq!(stdout(&o).lines().nth(1), Some("3,1.92484730023841378999103565370"));
    let o = Command::new(env!("CARGO_BIN_EXE_geoap"))
        .args(["spectrum", "--max-trace", "3"])
        .env("GEOAP_DIGITS", "12")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn orders() {
    assert_eq!(stdout(&geoap(&["order", "--gamma", "2,1,1,1", "--modulus", "6"])).trim(), "6");
    let o = geoap(&["order", "--gamma", "2,1,1,1", "--prime", "2", "--depth", "5"]);
    assert_eq!(stdout(&o).trim(), "3,3,3,6,12");
    assert_eq!(geoap(&["order", "--gamma", "1,1,0,1", "--modulus", "5"]).status.code(), Some(3));
    assert_eq!(geoap(&["order", "--gamma", "2,1,1,2", "--modulus", "5"]).status.code(), Some(2));
    assert_eq!(stdout(&geoap(&["find-modulus", "--gamma", "2,1,1,1", "--target", "18"])).trim(), "27");
    assert_eq!(geoap(&["crt", "--gamma", "2,1,1,1", "--m", "4", "--n", "6"]).status.code(), Some(3));
    assert!(stdout(&geoap(&["crt", "--gamma", "2,1,1,1", "--m", "4", "--n", "9"])).contains("equal = true"));
}

#[test]
fn witness_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let o = geoap(&["ap", "--trace", "3", "--k", "3", "--out", w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("multipliers = 6,12,18"));
    let o = geoap(&["check", w.to_str().unwrap()]);
    assert_eq!((o.status.code(), stdout(&o).trim().to_string()), (Some(0), "verified".to_string()));

    let text = fs::read_to_string(&w).unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, text.replacen("\"233\"", "\"234\"", 1)).unwrap();
    let o = geoap(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAILED"));

    let o = geoap(&["ap", "--trace", "7", "--k", "3"]);
    let line = stdout(&o).lines().find(|l| l.starts_with("multipliers")).unwrap().to_string();
    for m in line.trim_start_matches("multipliers = ").split(',') {
        assert_eq!(m.parse::<u64>().unwrap() % 2, 0);
    }

    let rec = dir.path().join("occ.json");
    let o = geoap(&["occurs", "--trace", "6", "--k", "3", "--out", rec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(geoap(&["check", rec.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn combinatorics_and_higher_rank() {
    let o = geoap(&["vdw", "--colors", "2", "--k", "3"]);
    assert_eq!(stdout(&o).lines().next(), Some("9"));
    assert_eq!(geoap(&["vdw", "--colors", "2", "--k", "3", "--n-max", "5"]).status.code(), Some(3));

    let o = geoap(&["sl3", "order", "--poly", "1,-1,-2,1", "--parabolic", "1", "--prime", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let j: u64 = stdout(&o).trim().parse().unwrap();
    let img: u64 = stdout(&geoap(&["sl3", "image-order", "--poly", "1,-1,-2,1", "--prime", "2"])).trim().parse().unwrap();
    assert_eq!(img % j, 0);

    let o = geoap(&["bianchi", "--d", "-1", "--gamma", "1:1,1,0:1,1", "--alpha", "5"]);
    assert_eq!(o.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let cover = dir.path().join("c.json");
    fs::write(&cover, r#"{"degree":2,"lift_divisor":[1,2,1,2,1,2,1,2,1],"direction":"lift"}"#).unwrap();
    let o = geoap(&["transfer", "--cover", cover.to_str().unwrap(), "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"degree":2,"lift_divisor":[3],"direction":"lift"}"#).unwrap();
    assert_eq!(geoap(&["transfer", "--cover", bad.to_str().unwrap(), "--k", "3"]).status.code(), Some(2));
}

#[test]
fn almost_ap_and_growth() {
    let o = geoap(&["almost-ap", "--source", "modular", "--max-trace", "100000", "--eps", "0.1", "--k", "6"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["outcome"], "found");
    assert!(v["deviation"].as_str().unwrap().parse::<f64>().unwrap() < 0.1);

    let o = geoap(&["growth", "--source", "log", "--max-n", "100000", "--t", "1", "--x", "10"]);
    assert!(stdout(&o).contains("limit = 0.3678794411714423215955238"));
    assert_eq!(geoap(&["growth", "--source", "csv", "--t", "1", "--x", "2"]).status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(geoap(&[]).status.code(), Some(2));
    assert_eq!(geoap(&["bogus"]).status.code(), Some(2));
    assert_eq!(geoap(&["order", "--gamma", "2,1,1,1"]).status.code(), Some(2));
    assert_eq!(geoap(&["--help"]).status.code(), Some(0));
}
