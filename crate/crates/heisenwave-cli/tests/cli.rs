use std::path::Path;
use std::process::Command;

use heisenwave::io::{decode_hwf1, encode_hwf1};
use heisenwave::{GridSpec, SampledField};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heisenwave"))
}

fn run(args: &[&str]) -> std::process::Output {
    bin().args(args).env("HEISENWAVE_THREADS", "1").output().expect("spawn")
}

fn read_field(p: &Path) -> SampledField {
    decode_hwf1(&std::fs::read(p).unwrap()).unwrap()
}

#[test]
fn verify_group_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["verify", "--suite", "group", "--json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], "hwreport/1");
    assert_eq!(v["suite"], "group");
    assert_eq!(v["pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["id"] == "group.associativity"));
    for c in checks {
        assert_eq!(c["pass"], true);
        assert!(c["residual"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
        assert!(c["anchor"].as_str().is_some());
    }
    assert_eq!(v["environment"]["threads"], 1);
    assert!(v["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn verify_report_is_deterministic() {
    let a = run(&["verify", "--suite", "group", "--json"]);
    let b = run(&["verify", "--suite", "group", "--json"]);
    let strip = |o: &std::process::Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["wall_time_s"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.hwf1");
    let o = run(&["gen", "kernel", "--closed-form", "--eps", "4", "--A", "0.1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["gen", "heat", "--s", "-1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["verify", "--suite", "group"]).env("HEISENWAVE_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_phi_integrates_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("phi.hwf1");
    let o = run(&["gen", "phi", "--grid", "48", "--extent", "6", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let f = read_field(&out);
    assert_eq!(f.grid().samples(), [48, 48, 95]);
    assert!(f.integrate().norm() <= 2e-3);
}

#[test]
fn gen_heat_integrates_to_one_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.hwf1");
    let b = dir.path().join("b.hwf1");
    for p in [&a, &b] {
        let o = run(&["gen", "heat", "--s", "1", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(&bytes[..4], b"HWF1");
    let f = read_field(&a);
    assert!((f.integrate().re - 1.0).abs() <= 2e-3);
}

#[test]
fn gen_kernel_closed_form_matches_direct_sampling() {
    use heisenwave::kernel::{GroupKernel, HeatProfile};
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.hwf1");
    let o = run(&["gen", "kernel", "--closed-form", "--eps", "0.1", "--A", "4", "--grid", "17", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let k = read_field(&out);
    let ev = heisenwave::HeatKernelEvaluator::default();
    let g = *k.grid();
    let lo = HeatProfile::psi_l1(&ev, 0.1 * 2f64.sqrt()).sample(&g).unwrap();
    let hi = HeatProfile::psi_l1(&ev, 4.0 * 2f64.sqrt()).sample(&g).unwrap();
    let expect = lo.sub(&hi).unwrap().scale(0.125);
    assert_eq!(k.values(), expect.values());
}

#[test]
fn gen_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("psi.csv");
    let o = run(&["gen", "psi", "--grid", "5", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,q,t,re,im"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 5 * 5 * 9);
    let first: Vec<f64> = rows[0].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(&first[..3], &[-6.0, -6.0, -6.0]);
}

#[test]
fn gen_moments_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let o = run(&["gen", "moments", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("monomial,value"));
    let rows: Vec<(String, f64)> = lines
        .map(|l| {
            let (m, v) = l.split_once(',').unwrap();
            (m.to_string(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 7);
    for (m, v) in &rows[..3] {
        assert!(v.abs() <= 2e-3, "{m} = {v}");
    }
}

#[test]
fn cwt_of_zero_field_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("zero.hwf1");
    let g = GridSpec::new([9, 9, 17], [6.0; 3]).unwrap();
    std::fs::write(&input, encode_hwf1(&SampledField::zeros(g))).unwrap();
    let manifest = dir.path().join("out.json");
    let o = run(&["cwt", input.to_str().unwrap(), "--scales", "3", "--eps", "0.5", "--A", "2", "--out", manifest.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("energy 0"));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(&manifest).unwrap()).unwrap();
    assert_eq!(m["schema"], "hwcwt/1");
    assert_eq!(m["energy"], 0.0);
    let slabs = m["slabs"].as_array().unwrap();
    assert_eq!(slabs.len(), 3);
    for s in slabs {
        let f = read_field(&dir.path().join(s["file"].as_str().unwrap()));
        assert_eq!(f.max_abs(), 0.0);
    }
}

#[test]
fn cwt_slabs_round_trip_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.hwf1");
    let g = GridSpec::new([13, 13, 25], [6.0; 3]).unwrap();
    let f = SampledField::from_real_fn(g, |w| (-(w.p * w.p + w.q * w.q + w.t * w.t)).exp());
    std::fs::write(&input, encode_hwf1(&f)).unwrap();
    let manifest = dir.path().join("c.json");
    let o = run(&["cwt", input.to_str().unwrap(), "--scales", "2", "--eps", "0.5", "--A", "1", "--out", manifest.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(&manifest).unwrap()).unwrap();
    assert!(m["ratio"].as_f64().unwrap() > 0.0);
    for s in m["slabs"].as_array().unwrap() {
        let path = dir.path().join(s["file"].as_str().unwrap());
        let bytes = std::fs::read(&path).unwrap();
        let back = decode_hwf1(&bytes).unwrap();
        assert_eq!(encode_hwf1(&back), bytes);
        assert!(s["measure_weight"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn cwt_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.hwf1");
    std::fs::write(&input, b"nope").unwrap();
    let o = run(&["cwt", input.to_str().unwrap(), "--out", dir.path().join("x.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
