use std::process::Command;

use hypercount::bianchi;
use hypercount::counting::{self, GroupSpec};
use hypercount::qforms::Form;
use hypercount_cli::commands::{self, AlphaOut, AsymOut, BianchiCountOut, CfOut, ClassifyOut, EquiOut, FibOut, OrbitOut, PellOut, RepsOut, ZetaOut};
use hypercount_cli::{AsymArgs, AsymKind, EngineArg, ModeArg, PellArgs, VERSION};
use serde::de::DeserializeOwned;
use serde_json::Value;

fn exe(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hypercount")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn result<T: DeserializeOwned>(args: &[&str]) -> T {
    let (code, out, err) = exe(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["version"], VERSION);
    serde_json::from_value(v["result"].clone()).unwrap()
}

#[test]
fn pell_example() {
    let r: PellOut = result(&["pell", "--D", "5"]);
    assert_eq!((r.t.as_str(), r.u.as_str()), ("3", "1"));
    assert_eq!(r.regulator, 0.9624236501192069);
    let direct = commands::pell_cmd(&PellArgs { d: "5".into(), p: None }).unwrap();
    assert_eq!(r, direct);
    let r: PellOut = result(&["pell", "--D", "409", "--p", "7"]);
    assert_eq!(r, commands::pell_cmd(&PellArgs { d: "409".into(), p: Some(7) }).unwrap());
}

#[test]
fn golden_ratio_alpha() {
    let r: AlphaOut = result(&["form", "alpha", "--form", "1,-1,-1"]);
    assert_eq!(r.alpha, "(1+sqrt(5))/2");
    let c: ClassifyOut = result(&["form", "classify", "--form", "1,-1,-1"]);
    assert_eq!(c.discriminant, "5");
    assert!(c.indefinite && c.primitive && c.irreducible);
    let cf: CfOut = result(&["irr", "cf", "--alpha", "(1+sqrt(5))/2"]);
    assert_eq!(cf.period, vec!["1"]);
    assert!(cf.palindromic);
}

#[test]
fn engines_agree() {
    let r: RepsOut = result(&["count", "reps", "--form", "1,-1,-1", "--s", "11", "--engine", "both"]);
    assert_eq!(r.count, r.oracle_count.clone().unwrap());
    let lib = counting::psi(&Form::from_i64(1, -1, -1), 11, &GroupSpec::Full).unwrap();
    assert_eq!(r.count, lib.to_string());
    let o: OrbitOut = result(&["count", "orbit", "--alpha", "(1+sqrt(5))/2", "--s", "30", "--engine", "both"]);
    assert_eq!(o.count, o.oracle_count.unwrap());
    let b: BianchiCountOut = result(&["bianchi", "count", "--D", "-4", "--s", "8", "--engine", "both"]);
    assert_eq!(b.rows[0].oracle_count.as_deref(), Some(b.count.as_str()));
}

#[test]
fn flag_errors_exit_two() {
    let (code, out, err) = exe(&["pell"]);
    assert_eq!(code, 2);
    assert!(out.is_empty() && err.contains("Usage"));
    assert_eq!(exe(&["frobnicate"]).0, 2);
    assert_eq!(exe(&["pell", "--D", "16"]).0, 2);
    assert_eq!(exe(&["bianchi", "zeta", "--D", "-15"]).0, 2);
    assert_eq!(exe(&["count", "reps", "--form", "1,-1,-1", "--s", "0"]).0, 2);
    assert_eq!(exe(&["count", "orbit", "--alpha", "(1+sqrt(5))/2", "--s", "5", "--group", "gamma:2", "--engine", "oracle"]).0, 2);
    assert_eq!(exe(&["--help"]).0, 0);
}

#[test]
fn asym_round_trip() {
    let args = AsymArgs {
        kind: AsymKind::Reps,
        form: Some("1,-1,-1".into()),
        alpha: None,
        group: "full".into(),
        mode: ModeArg::Joint,
        s_list: "geometric:10:1000:3".into(),
    };
    let direct = commands::asym_cmd(&args).unwrap();
    let r: AsymOut = result(&["asym", "--kind", "reps", "--form", "1,-1,-1", "--s-list", "geometric:10:1000:3"]);
    assert_eq!(r, direct);
    assert_eq!(r.rows.len(), 3);
    let r: AsymOut = result(&["asym", "--kind", "orbit", "--alpha", "(1+sqrt(5))/2", "--s-list", "50,100"]);
    assert!((r.predicted - 0.5850834).abs() < 1e-6);
}

#[test]
fn bianchi_round_trip() {
    let z: ZetaOut = result(&["bianchi", "zeta", "--D", "-4"]);
    assert_eq!(z.zeta, bianchi::zeta_k2(-4, 12).unwrap());
    let f: FibOut = result(&["bianchi", "fib", "--D", "-4", "--ideal", "3"]);
    assert_eq!((f.k.as_str(), f.k_prime.as_str()), ("2", "4"));
    let c: BianchiCountOut = result(&["bianchi", "count", "--D", "-3", "--ideal", "2", "--s", "10,20"]);
    assert_eq!(c, commands::bianchi_count(-3, "2", "10,20", ModeArg::Joint, EngineArg::Fast).unwrap());
    assert_eq!(c.k_a, "3");
}

#[test]
fn deterministic_across_threads() {
    let base = ["equi", "--form", "1,-1,-1", "--samples", "40000", "--bins", "8", "--seed", "7"];
    let runs: Vec<String> = ["1", "3", "8"]
        .iter()
        .map(|n| {
            let mut a = base.to_vec();
            a.extend(["--threads", n]);
            exe(&a).1
        })
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    let r: EquiOut = serde_json::from_str::<Value>(&runs[0]).map(|v| serde_json::from_value(v["result"].clone()).unwrap()).unwrap();
    assert_eq!(r.rows.len(), 64);
    let other = exe(&["equi", "--form", "1,-1,-1", "--samples", "40000", "--bins", "8", "--seed", "8"]).1;
    assert_ne!(other, runs[0]);
    let a = exe(&["bianchi", "count", "--D", "-7", "--s", "30", "--threads", "1"]).1;
    let b = exe(&["bianchi", "count", "--D", "-7", "--s", "30", "--threads", "6"]).1;
    assert_eq!(a, b);
}

#[test]
fn csv_tables() {
    let (code, out, _) = exe(&["asym", "--kind", "reps", "--form", "1,-1,-1", "--s-list", "10,100", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("s,count,ratio,predicted,rel_gap"));
    assert_eq!(lines.count(), 2);
    let (_, out, _) = exe(&["pell", "--D", "13", "--format", "csv"]);
    assert!(out.starts_with("d,t,u,regulator,negative_unit,period,divisor\n13,11,3,"));
}
