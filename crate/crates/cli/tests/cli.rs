use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn splitclust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitclust")).args(args).output().unwrap()
}

fn two_five_cliques(dir: &Path) -> String {
    let mut text = String::from("n 10\nfully_observed\n");
    for i in 0..10 {
        for j in (i + 1)..10 {
            if i / 5 == j / 5 {
                text += &format!("e {i} {j} 1\n");
            }
        }
    }
    let p = dir.join("g.txt");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn cluster_two_cliques_writes_both_clusters() {
    let dir = tempfile::tempdir().unwrap();
    let g = two_five_cliques(dir.path());
    let out = dir.path().join("c.txt");
    let trace = dir.path().join("trace.csv");
    let r = splitclust(&["cluster", "--in", &g, "--out", out.to_str().unwrap(), "--trace", trace.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# status=success"));
    assert!(text.contains("disagreements=0"));
    let c = splitclust::Clustering::parse(&text).unwrap();
    assert_eq!(c, splitclust::Clustering::from_sizes(&[5, 5]).unwrap());
    assert!(fs::read_to_string(&trace).unwrap().starts_with("eta,converged,valid,residual,objective\n"));

    let again = dir.path().join("c2.txt");
    splitclust(&["cluster", "--in", &g, "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn failure_exits_two_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("path.txt");
    fs::write(&g, "n 3\nfully_observed\ne 0 1 1\ne 1 2 1\n").unwrap();
    let out = dir.path().join("c.txt");
    let r = splitclust(&["cluster", "--in", g.to_str().unwrap(), "--out", out.to_str().unwrap(), "--eta", "0.99"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn oracle_on_path_of_four() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("path4.txt");
    fs::write(&g, "n 4\nfully_observed\ne 0 1 1\ne 1 2 1\ne 2 3 1\n").unwrap();
    let r = splitclust(&["oracle", "--in", g.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(String::from_utf8(r.stdout).unwrap(), "minimum 1\npartition {0,1} {2,3}\n");
}

#[test]
fn usage_and_io_errors_exit_one() {
    assert_eq!(splitclust(&["cluster", "--in", "/nonexistent/g.txt"]).status.code(), Some(1));
    assert_eq!(splitclust(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(splitclust(&["cluster"]).status.code(), Some(1));
    assert_eq!(splitclust(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("bad.txt");
    fs::write(&g, "n 3\ne 0 0 1\n").unwrap();
    assert_eq!(splitclust(&["oracle", "--in", g.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn generate_is_deterministic_and_certify_reports() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let g = dir.path().join(format!("{name}.txt"));
        let t = dir.path().join(format!("{name}.truth"));
        let r = splitclust(&[
            "generate", "--sizes", "6,6", "--tau", "0.05", "--p0", "0.9", "--seed", "4",
            "--out", g.to_str().unwrap(), "--truth", t.to_str().unwrap(),
        ]);
        assert_eq!(r.status.code(), Some(0));
        (g, t)
    };
    let (g1, t1) = run("a");
    let (g2, _) = run("b");
    assert_eq!(fs::read(&g1).unwrap(), fs::read(&g2).unwrap());

    let csv = dir.path().join("r.csv");
    let r = splitclust(&[
        "certify", "--in", g1.to_str().unwrap(), "--clustering", t1.to_str().unwrap(),
        "--mode", "golfing", "--csv", csv.to_str().unwrap(),
    ]);
    assert!(matches!(r.status.code(), Some(0) | Some(3)));
    let stdout = String::from_utf8(r.stdout).unwrap();
    assert!(stdout.contains("S3") && stdout.contains("overall"));
    let csv = fs::read_to_string(&csv).unwrap();
    assert_eq!(csv.lines().count(), 10);

    let g = two_five_cliques(dir.path());
    let c = dir.path().join("c.txt");
    fs::write(&c, "0 a\n1 a\n2 a\n3 a\n4 a\n5 b\n6 b\n7 b\n8 b\n9 b\n").unwrap();
    let r = splitclust(&["certify", "--in", &g, "--clustering", c.to_str().unwrap(), "--mode", "worstcase"]);
    assert_eq!(r.status.code(), Some(0));
    let r = splitclust(&["certify", "--in", &g, "--clustering", c.to_str().unwrap(), "--mode", "worstcase", "--eta", "0.01"]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn sweep_writes_csv_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.toml");
    fs::write(
        &spec,
        "trials = 2\nseed = 3\n[x]\nname = \"tau\"\nvalues = [0.0]\n[y]\nname = \"kmin\"\nvalues = [4, 6]\n[template]\nn = 12\n",
    )
    .unwrap();
    let out = dir.path().join("rates.csv");
    let r = splitclust(&["sweep", "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(fs::read_to_string(&out).unwrap(), "kmin\\tau,0\n4,1\n6,1\n");
    let meta = fs::read_to_string(dir.path().join("rates.csv.meta")).unwrap();
    assert!(meta.contains("master_seed = 3"));
}
