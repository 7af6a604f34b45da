use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

fn esgrisk(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_esgrisk"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TWO_ASSETS: &str = "date,ticker,ret,esg_raw
2021-03-01,A,0.01,100
2021-03-01,B,0,50
2021-03-02,A,0.02,100
2021-03-02,B,0,75
2021-03-03,A,0.03,100
2021-03-03,B,0,100
";

#[test]
fn stats_on_hand_computed_fixture() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.csv", TWO_ASSETS);
    let (code, out, err) = esgrisk(&["stats", "--input", s(&p), "--min-obs", "3"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(
        out,
        "ticker,ret_mean_ann,ret_std_ann,esg_mean_ann,esg_std_ann,corr_ret_esg\n\
         A,5.04,0.158745079,1,0,undefined\n\
         B,0,0,0.5,0.0314970394,undefined\n"
    );
    let (code, json, _) = esgrisk(&[
        "stats",
        "--input",
        s(&p),
        "--min-obs",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["assets"][1]["ret_std_ann"], 0.0);
    assert_eq!(v["assets"][0]["ret_mean_ann"], 5.04);
}

#[test]
fn ingestion_failures_exit_with_data_status() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "e.csv", "date,ticker,ret,esg_raw\n");
    let (code, _, err) = esgrisk(&["stats", "--input", s(&empty)]);
    assert_eq!(code, 2);
    assert!(err.contains("insufficient data"), "{err}");

    let bad = write(
        &dir,
        "b.csv",
        "date,ticker,ret,esg_raw\n2021-03-01,A,0.01,120\n",
    );
    let (code, _, err) = esgrisk(&["stats", "--input", s(&bad), "--min-obs", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");

    let (code, _, _) = esgrisk(&["stats", "--input", "/nonexistent/panel.csv"]);
    assert_eq!(code, 2);

    let p = write(&dir, "p.csv", TWO_ASSETS);
    let (code, _, err) = esgrisk(&["stats", "--input", s(&p)]);
    assert_eq!(code, 2, "default minimum of 30 dates applies");
    assert!(err.contains("insufficient data"), "{err}");
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.csv", TWO_ASSETS);
    let (code, _, err) = esgrisk(&[
        "rank",
        "--input",
        s(&p),
        "--min-obs",
        "3",
        "--metric",
        "var",
    ]);
    assert_eq!(code, 1);
    assert!(
        err.contains("esg_avar") && err.contains("omega"),
        "catalog listed: {err}"
    );
    assert_eq!(
        esgrisk(&[
            "rank",
            "--input",
            s(&p),
            "--metric",
            "esg_avar",
            "--lambda-grid",
            "0,2"
        ])
        .0,
        1
    );
    assert_eq!(
        esgrisk(&[
            "ratio",
            "--input",
            s(&p),
            "--min-obs",
            "3",
            "--metric",
            "esg_avar"
        ])
        .0,
        1
    );
    assert_eq!(
        esgrisk(&["axioms", "--scope", "risk_measures", "--trials", "0"]).0,
        1
    );
    assert_eq!(esgrisk(&["axioms", "--scope", "everything"]).0, 1);
    assert_eq!(esgrisk(&["frobnicate"]).0, 1);
    assert_eq!(esgrisk(&["stats"]).0, 1);
    assert_eq!(esgrisk(&["--help"]).0, 0);
}

fn order_by_lambda(csv: &str) -> Vec<(String, Vec<String>)> {
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    for line in csv.lines().skip(2) {
        let f: Vec<&str> = line.split(',').collect();
        match rows.last_mut() {
            Some((l, names)) if l == f[0] => names.push(f[2].to_string()),
            _ => rows.push((f[0].to_string(), vec![f[2].to_string()])),
        }
    }
    rows
}

#[test]
fn rank_output_shape() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.csv", TWO_ASSETS);
    let (code, out, err) = esgrisk(&[
        "rank",
        "--input",
        s(&p),
        "--min-obs",
        "3",
        "--metric",
        "esg_mean",
        "--lambda-grid",
        "0,0.5,1",
    ]);
    assert_eq!(code, 0, "{err}");
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "# metric=esg_mean params=\"esg_mean\" direction=descending-reward"
    );
    assert_eq!(lines.next().unwrap(), "lambda,rank,ticker,value");
    let rows = order_by_lambda(&out);
    assert_eq!(rows.len(), 3);
    // A earns more and has the higher ESG flow at every lambda
    for (_, names) in &rows {
        assert_eq!(names, &["A", "B"]);
    }
    let (_, out, _) = esgrisk(&[
        "rank",
        "--input",
        s(&p),
        "--min-obs",
        "3",
        "--metric",
        "esg_avar",
    ]);
    assert_eq!(order_by_lambda(&out).len(), 21);
    assert!(out.contains("direction=ascending-risk"));
}

#[test]
fn hand_ordered_mean_ranking() {
    let text = "date,ticker,ret,esg_raw
d1,A,0.00,75
d1,B,-0.01,50
d1,C,0.03,100
d2,A,0.02,75
d2,B,0.01,50
d2,C,0.00,0
";
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.csv", text);
    let (code, _, err) = esgrisk(&[
        "rank",
        "--input",
        s(&p),
        "--min-obs",
        "2",
        "--metric",
        "esg_mean",
        "--lambda-grid",
        "0.5",
    ]);
    assert_eq!(code, 2, "dates must be YYYY-MM-DD: {err}");
    let text = text.replace("d1", "2021-01-04").replace("d2", "2021-01-05");
    let p = write(&dir, "p2.csv", &text);
    let (code, out, err) = esgrisk(&[
        "rank",
        "--input",
        s(&p),
        "--min-obs",
        "2",
        "--metric",
        "esg_mean",
        "--lambda-grid",
        "0.5",
    ]);
    assert_eq!(code, 0, "{err}");
    // A = 0.5*0.01 + 0.5*(0.5/252), B = 0, C = 0.5*0.015 + 0
    let rows = order_by_lambda(&out);
    assert_eq!(rows[0].1, ["C", "A", "B"]);
    assert!(out.contains("0.5,3,B,0\n"));
}

#[test]
fn hedge_examples() {
    let dir = TempDir::new().unwrap();
    let one = write(&dir, "one.csv", "label,rf_r,rf_esg\nsa,0.01,0.03\n");
    let (code, out, err) = esgrisk(&[
        "hedge",
        "--rho",
        "0.10",
        "--kappa",
        "0.02",
        "--lambda",
        "0.5",
        "--safe-assets",
        s(&one),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(
        out,
        "safe_asset,lambda,rho,kappa,safe_asset_risk,weight,achieved_risk\nsa,0.5,0.1,0.02,-0.02,0.666666667,0.02\n"
    );

    let two = write(
        &dir,
        "two.csv",
        "label,rf_r,rf_esg\ncash,0.001,0\ngreen,0,0.004\n",
    );
    let label = |l: &str| {
        let (code, out, _) = esgrisk(&[
            "hedge",
            "--rho",
            "0.05",
            "--kappa",
            "0.01",
            "--lambda",
            l,
            "--safe-assets",
            s(&two),
            "--format",
            "json",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        v["safe_asset"].as_str().unwrap().to_string()
    };
    assert_eq!(label("0"), "cash");
    assert_eq!(label("0.5"), "green");

    let (code, _, err) = esgrisk(&[
        "hedge",
        "--rho",
        "0.05",
        "--kappa",
        "0.06",
        "--lambda",
        "0.5",
        "--safe-assets",
        s(&one),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("upper bound"), "{err}");
    let (code, _, err) = esgrisk(&[
        "hedge",
        "--rho",
        "0.05",
        "--kappa",
        "-0.03",
        "--lambda",
        "0.5",
        "--safe-assets",
        s(&one),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("lower bound"), "{err}");

    let bad = write(&dir, "bad.csv", "name,r,e\nsa,0.01,0.03\n");
    assert_eq!(
        esgrisk(&[
            "hedge",
            "--rho",
            "0.1",
            "--kappa",
            "0.02",
            "--lambda",
            "0.5",
            "--safe-assets",
            s(&bad)
        ])
        .0,
        2
    );
}

#[test]
fn duality_examples() {
    let (code, out, _) = esgrisk(&["duality", "--trials", "200"]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(2).unwrap().ends_with(",pass"));
    let (code, out, _) = esgrisk(&["duality", "--n", "1", "--trials", "50"]);
    assert_eq!(code, 0);
    assert!(out.contains(",0,0,0,pass"), "{out}");
    let (code, _, _) = esgrisk(&["duality", "--n", "10", "--tau", "0.999", "--trials", "300"]);
    assert_eq!(code, 0);
    assert_eq!(esgrisk(&["duality", "--tau", "1"]).0, 1);
}

#[test]
fn axioms_matrix_runs() {
    let (code, out, err) = esgrisk(&[
        "axioms",
        "--scope",
        "risk_measures",
        "--trials",
        "300",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 1 + 6 * 4);
    assert!(out.contains("esg_avar,SUB-M,holds,holds,"));
    assert!(out.contains("esg_variance,PH-M,fails,counterexample,"));
}

#[test]
fn output_file_and_determinism() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.csv", TWO_ASSETS);
    let out1 = dir.path().join("o1.json");
    let out2 = dir.path().join("o2.json");
    for o in [&out1, &out2] {
        let (code, stdout, _) = esgrisk(&[
            "rank",
            "--input",
            s(&p),
            "--min-obs",
            "3",
            "--metric",
            "omega",
            "--format",
            "json",
            "--out",
            s(o),
        ]);
        assert_eq!(code, 0);
        assert!(stdout.is_empty());
    }
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
}
