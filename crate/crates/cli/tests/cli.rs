use std::process::{Command, Output};

fn d4quad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d4quad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fundamental_pairs() {
    for (k, want) in [("2", "r=6 a=4"), ("3", "r=4 a=2"), ("6", "r=10 a=4")] {
        let o = d4quad(&["pell", "fundamental", "--k", k]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), want);
    }
}

#[test]
fn extends_4_8_24() {
    let o = d4quad(&["tuple", "extend", "--triple", "4,8,24", "--d-max", "1000000"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "840");
}

#[test]
fn bounds_line() {
    let o = d4quad(&["bounds", "--k", "2", "--family", "c1", "--type", "a"]);
    assert!(o.status.success());
    let line = stdout(&o);
    assert!(line.starts_with("p_max=111 l_max≈2.5"), "{line}");
}

#[test]
fn check_reports_failures_with_exit_one() {
    let good = d4quad(&["tuple", "check", "--elements", "4,8,24,840"]);
    assert_eq!(good.status.code(), Some(0));
    assert!(stdout(&good).starts_with("true"));
    // 4·9+4 = 40 is not a square
    let bad = d4quad(&["tuple", "check", "--elements", "4,9,24"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stdout(&bad).trim(), "false");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(d4quad(&["pell", "fundamental", "--k", "5"]).status.code(), Some(2));
    assert_eq!(d4quad(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        d4quad(&["tuple", "extend", "--triple", "4,8", "--d-max", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        d4quad(&["reduce", "--k", "2", "--p", "7", "--family", "c9+", "--type", "a"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_small_window_json() {
    let o = d4quad(&["verify", "--k", "3", "--family", "c1-", "--p-max", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "REGULAR_CONFIRMED");
    assert_eq!(v["k"], "3");
    assert!(v["records"].as_array().is_some_and(|r| !r.is_empty()));
}

#[test]
fn sweep_defaults_to_csv() {
    let o = d4quad(&[
        "oracle",
        "sweep",
        "--k",
        "2",
        "--a-max",
        "10",
        "--c-max",
        "10000",
        "--d-max",
        "100000000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("pair,triple,d,classification,runtime_us"));
    assert!(lines.any(|l| l.starts_with("\"{4,8}\",\"{4,8,24}\",840,")));
}

#[test]
fn writes_to_out_file() {
    let dir = std::env::temp_dir().join(format!("d4quad-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pair.json");
    let o = d4quad(&[
        "pell",
        "at",
        "--k",
        "2",
        "--p",
        "7",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["a"], "161564");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reduce_stays_small() {
    let o = d4quad(&[
        "reduce", "--k", "2", "--p", "7", "--family", "c1+", "--type", "a", "--format", "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for b in v["branches"].as_array().unwrap() {
        let fin: u64 = b["final_bound"].as_str().unwrap().parse().unwrap();
        assert!(fin <= 8, "{b}");
    }
}

#[test]
fn sanity_commands() {
    assert!(d4quad(&["sanity", "fib"]).status.success());
    assert!(d4quad(&["sanity", "k4", "--r-max", "10000"]).status.success());
}
