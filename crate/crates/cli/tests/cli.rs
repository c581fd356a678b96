use std::process::{Command, Output};

fn qshadow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qshadow")).args(args).env_remove("QSHADOW_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines().find_map(|l| l.strip_prefix(&format!("{key}: "))).unwrap_or_else(|| panic!("no {key} in {text}"))
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("r,"))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn sixj_trivial_tuple() {
    let o = qshadow(&["sixj", "--r", "7", "--tuple", "0,0,0,0,0,0", "--naive"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(field(&s, "value"), "1");
    assert_eq!(field(&s, "growth"), "0");
    assert_eq!(field(&s, "naive"), "1 0i");
}

#[test]
fn sixj_large_diagonal_growth_near_v8() {
    let o = qshadow(&["sixj", "--r", "2001", "--tuple", "1000,1000,1000,1000,1000,1000"]);
    assert!(o.status.success());
    let g: f64 = field(&stdout(&o), "growth").parse().unwrap();
    assert!((g - 3.6638623767088).abs() < 0.05, "{g}");
    assert_eq!(field(&stdout(&o), "hyperideal"), "true");
}

#[test]
fn inadmissible_tuple_names_face() {
    let o = qshadow(&["sixj", "--r", "7", "--tuple", "1,1,1,1,1,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("face (1,1,1) odd sum"), "{}", stderr(&o));
}

#[test]
fn lemma_sweep_exit_codes() {
    let o = qshadow(&["lemmas", "--r-range", "5:5:2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("all sweeps passed for 1 value(s) of r"));
    let o = qshadow(&["lemmas", "--r-range", "5:21:2"]);
    assert!(o.status.success());
    let o = qshadow(&["lemmas", "--r", "7", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("diagonal-sign violation"));
}

#[test]
fn odd_k_is_a_spec_error() {
    let o = qshadow(&["tv", "--k", "1", "--l", "0", "--r", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("k must be even"));
}

#[test]
fn bad_ranges_are_usage_errors() {
    for range in ["5:31:3", "6:31:2", "3:31:2", "31:5:2", "5:31"] {
        let o = qshadow(&["tv", "--k", "2", "--l", "0", "--r-range", range]);
        assert_eq!(o.status.code(), Some(2), "{range}");
    }
    let o = qshadow(&["diagonal", "--k", "2", "--l", "0", "--r", "8"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qshadow(&["tv", "--k", "2", "--l", "0", "--r", "5", "--r-range", "5:7:2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tv_series_to_file() {
    let dir = std::env::temp_dir().join(format!("qshadow-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("series.csv");
    let o = qshadow(&["tv", "--k", "2", "--l", "0", "--r-range", "5:31:2", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# "));
    assert!(csv.contains("C_r = 1"));
    assert_eq!(lines.next().unwrap(), "r,log_value,growth,target,abs_error");
    let rs = rows(&csv);
    assert_eq!(rs.len(), 14);
    assert!(rs.windows(2).all(|w| w[1][2] > w[0][2]));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn naive_tv_matches() {
    let a = rows(&stdout(&qshadow(&["tv", "--k", "2", "--l", "0", "--r", "5"])));
    let b = rows(&stdout(&qshadow(&["tv", "--k", "2", "--l", "0", "--r", "5", "--naive"])));
    assert_eq!(a.len(), 1);
    for (x, y) in a[0].iter().zip(&b[0]) {
        assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
    }
    let o = qshadow(&["tv", "--k", "2", "--l", "0", "--r", "9", "--naive"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn diagonal_targets() {
    let one = rows(&stdout(&qshadow(&["diagonal", "--k", "0", "--l", "1", "--r", "101"])));
    assert_eq!(one.len(), 1);
    assert!((one[0][3] - 14.6554495068355).abs() < 1e-12);
    let three = rows(&stdout(&qshadow(&["diagonal", "--k", "2", "--l", "1", "--r", "101"])));
    assert!((three[0][3] - 29.310899013671).abs() < 1e-11);
}

#[test]
fn diagonal_error_decreases() {
    let s = rows(&stdout(&qshadow(&["diagonal", "--k", "2", "--l", "0", "--r-range", "101:2001:100"])));
    assert_eq!(s.len(), 20);
    assert!(s.windows(2).all(|w| w[1][4] < w[0][4]));
}

#[test]
fn matching_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("qshadow-match-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spec.json");
    std::fs::write(&path, r#"{"k": 2, "l": 1, "matching": [["S0.p0", "A0.p2"], ["S1.p0", "A0.p0"], ["A0.p1", "A0.p3"]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let o = qshadow(&["shadow", "--matching", p]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert_eq!(field(&s, "loops"), "6");
    assert_eq!(field(&s, "regions"), "3");
    assert_eq!(field(&s, "total gleam"), "0");
    let o = qshadow(&["diagonal", "--matching", p, "--r", "11"]);
    assert!(o.status.success());
    let o = qshadow(&["diagonal", "--matching", p, "--k", "4", "--r", "11"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&path, r#"{"k": 2, "l": 0, "matching": [["S0.p0", "S0.p0"]]}"#).unwrap();
    let o = qshadow(&["shadow", "--matching", p]);
    assert_eq!(o.status.code(), Some(2));
    let o = qshadow(&["shadow", "--matching", "/nonexistent/spec.json"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn rt_value_and_oracle() {
    let o = qshadow(&["rt", "--k", "2", "--l", "0", "--r", "5", "--gamma", "0,0,0,0", "--naive"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let v: f64 = field(&s, "value").parse().unwrap();
    let w: f64 = field(&s, "naive").split(' ').next().unwrap().parse().unwrap();
    assert!((v - w).abs() < 1e-12 * v.abs());
    let o = qshadow(&["rt", "--k", "2", "--l", "0", "--r", "5", "--gamma", "0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qshadow(&["rt", "--k", "2", "--l", "0", "--r", "5", "--gamma", "3,0,0,0"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "sign"), "0");
}

#[test]
fn thread_env_var_is_read() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_qshadow"))
            .args(["tv", "--k", "0", "--l", "1", "--r-range", "5:11:2"])
            .env("QSHADOW_THREADS", threads)
            .output()
            .unwrap()
    };
    let zero = run("0");
    assert_eq!(zero.status.code(), Some(2));
    assert_eq!(run("1").stdout, run("3").stdout);
    let o = qshadow(&["tv", "--k", "0", "--l", "1", "--r-range", "5:11:2"]);
    assert_eq!(o.stdout, run("2").stdout);
}
