use std::process::{Command, Output};

fn bigrade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bigrade")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

#[test]
fn table_csv_layout() {
    let o = bigrade(&["table", "--I", "x^2,x*y,y^2", "--J", "x^2,y^2", "--rmax", "6", "--smax", "6", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert_eq!(lines[0], "r\\s,0,1,2,3,4,5,6");
    // λ(R/I^r J^s) = C(2(r+s)+1, 2) away from the axes
    for (r, line) in lines[1..].iter().enumerate() {
        let cells: Vec<u64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[0], r as u64);
        for s in 1..=6u64 {
            if r > 0 {
                let n = 2 * (r as u64 + s) + 1;
                assert_eq!(cells[s as usize + 1], n * (n - 1) / 2);
            }
        }
    }
}

#[test]
fn maximal_table_json() {
    let o = bigrade(&["table", "--I", "x,y", "--J", "x,y", "--rmax", "4", "--smax", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["report_version"], 1);
    assert_eq!(v["kind"], "length_table");
    for r in 0..=4u64 {
        for s in 0..=4u64 {
            let n = r + s + 1;
            assert_eq!(v["values"][r as usize][s as usize], n * (n - 1) / 2);
        }
    }
}

#[test]
fn coefficient_tuples() {
    let o = bigrade(&["coeffs", "--I", "x^2,x*y,y^2", "--J", "x^2,y^2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    let b = &v["bhattacharya"];
    let tuple: Vec<i64> = ["e20", "e11", "e02", "e10", "e01", "e00"].iter().map(|k| b[k].as_i64().unwrap()).collect();
    assert_eq!(tuple, vec![4, 4, 4, 1, 1, 0]);
    assert!(v["checks"].as_object().unwrap().values().all(|c| c == true));

    let o = bigrade(&["coeffs", "--I", "x,y", "--J", "x,y"]);
    let b = &json(&o)["bhattacharya"];
    let tuple: Vec<i64> = ["e20", "e11", "e02", "e10", "e01", "e00"].iter().map(|k| b[k].as_i64().unwrap()).collect();
    assert_eq!(tuple, vec![1, 1, 1, 0, 0, 0]);
}

#[test]
fn h2_verdicts() {
    let cases = [
        ("x^2,x*y,y^2", "x^2,y^2", "InfiniteDetected", 1),
        ("x,y", "x,y", "Finite", 0),
        ("x^4,x^3*y,x*y^3,y^4", "x,y", "Finite", 0),
    ];
    for (i, j, kind, value) in cases {
        let o = bigrade(&["h2", "--I", i, "--J", j, "--r", "0", "--s", "0", "--seed", "1"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let v = json(&o);
        assert_eq!(v["classification"]["verdict"]["kind"], kind, "{i} | {j}");
        assert_eq!(v["classification"]["verdict"]["value"], value, "{i} | {j}");
        assert_eq!(v["criterion"]["agreement"], true);
    }
}

#[test]
fn input_errors_exit_two() {
    let o = bigrade(&["table", "--I", "x^2,x*y+", "--J", "x,y"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position"), "{}", stderr(&o));

    let o = bigrade(&["table", "--I", "x*y", "--J", "x,y"]);
    assert_eq!(o.status.code(), Some(2));

    let o = bigrade(&["coeffs", "--I", "x,y", "--J", "x,y", "--prime", "15"]);
    assert_eq!(o.status.code(), Some(2));

    let o = bigrade(&["coeffs", "--I", "x,y", "--J", "x,y", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));

    let o = bigrade(&["example", "nonexistent"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unstable_fit_exits_four() {
    // the Hilbert function of (x^9, x^8 y, y^9) is not yet polynomial by the
    // enlarged 8x8 window either
    let o = bigrade(&["coeffs", "--I", "x^9,x^8*y,y^9", "--J", "x,y", "--rmax", "4", "--smax", "4"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("enlarging the window"));
}

#[test]
fn config_file_wins_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.toml");
    std::fs::write(&path, "I = \"x, y\"\nJ = \"x, y\"\nr_max = 5\ns_max = 4\n").unwrap();
    let o = bigrade(&["table", "--config", path.to_str().unwrap(), "--rmax", "7", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"));
    assert_eq!(stdout(&o).lines().count(), 7);

    std::fs::write(&path, "I = \"x, y\"\nbogus = 1\n").unwrap();
    let o = bigrade(&["table", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_files_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = bigrade(&["verify", "--I", "x^3,x*y,y^2", "--J", "x^2,y^3", "--output", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn examples_match_stored_reports() {
    for name in ["maximal", "bhatt_l2", "depth_zero"] {
        let o = bigrade(&["example", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        assert!(stderr(&o).contains("matches"));
    }
    let v = json(&bigrade(&["example", "bhatt_l2"]));
    let c = &v["coefficients"];
    let excess = c["bhattacharya"]["e01"].as_i64().unwrap() - c["hilbert"]["J"]["e1"].as_i64().unwrap();
    assert_eq!(excess, 1);
}

#[test]
fn text_rendering() {
    let o = bigrade(&["verify", "--I", "x,y", "--J", "x,y", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("finite_length_criterion (2,2)"));
    assert!(text.contains("all asserted blocks agree"));
}
