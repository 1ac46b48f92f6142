use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn negbudget(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_negbudget")).args(args).output().expect("binary runs")
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

const SMALL: [&str; 4] = ["--times", "9", "--grid-points", "61"];

#[test]
fn two_body_outputs_and_determinism() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let out = negbudget(&[&["two-body", "--out", d.path().to_str().unwrap()], &SMALL[..]].concat());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = dirs[0].path();
    assert_eq!(header(&a.join("fig1_trajectory.csv")), "t,t_over_T,N_A,N_B,N_tot,N_budget,gap,concurrence");
    assert_eq!(fs::read_to_string(a.join("fig1_trajectory.csv")).unwrap().lines().count(), 10);
    for mode in ["A", "B"] {
        for t in ["0", "0.25", "0.5"] {
            let name = format!("fig2_wigner_{mode}_t{t}.csv");
            assert!(header(&a.join(&name)).starts_with("im\\re,-5.0,"), "{name}");
        }
    }
    let names: Vec<_> = fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    for name in names.iter().filter(|n| n.to_str().unwrap().ends_with(".csv")) {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(dirs[1].path().join(name)).unwrap(), "{name:?}");
    }
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("run_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["experiment"], "two-body");
    assert_eq!(meta["config"]["times"], 9);
}

#[test]
fn chain_cv_and_damping_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().to_str().unwrap();
    let small = ["--block-grid-points", "21", "--dim", "8"];
    for cmd in ["chain", "cv-native", "damping"] {
        let out = negbudget(&[&[cmd, "--out", p], &SMALL[..], &small[..]].concat());
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let d = dir.path();
    assert_eq!(header(&d.join("fig3_summary.csv")), "t,t_over_tstar,N_tot_chain,N_budget,max_pk,max_pb2");
    assert_eq!(header(&d.join("fig3_p_heatmap.csv")), "t,site_0,site_1,site_2,site_3");
    assert_eq!(header(&d.join("fig3_block_heatmap.csv")), "t,block_0,block_1,block_2");
    assert_eq!(header(&d.join("fig4_trajectory.csv")), "t,t_over_T,N_A,N_B,N_tot,N_budget,gap");
    assert_eq!(header(&d.join("damping.csv")), "t,gamma,N_tot_ideal,N_tot_damped,epsilon");
    let rows = fs::read_to_string(d.join("damping.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 4 * 9);
}

#[test]
fn dwigner_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = negbudget(&["dwigner", "--state", "all", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let strange: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("dwigner_strange.json")).unwrap()).unwrap();
    assert_eq!(strange["d"], 3);
    assert!(strange["sum_negativity"].as_f64().unwrap() > 0.0);
    let z0: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("dwigner_z0.json")).unwrap()).unwrap();
    assert!(z0["sum_negativity"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(header(&dir.path().join("dwigner_a1b2.csv")), "q,p,W");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small run\ntimes = 5\ngrid-points = 41\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = negbudget(&[
        "two-body",
        "--config",
        cfg.to_str().unwrap(),
        "--times",
        "7",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("run_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["times"], 7);
    assert_eq!(meta["config"]["grid_points"], 41);

    fs::write(&cfg, "colour = blue\n").unwrap();
    let out = negbudget(&["two-body", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(&cfg, "times = 5\ntimes = 6\n").unwrap();
    assert_eq!(negbudget(&["two-body", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().to_str().unwrap();
    assert_eq!(negbudget(&[]).status.code(), Some(2));
    assert_eq!(negbudget(&["teleport"]).status.code(), Some(2));
    assert_eq!(negbudget(&["two-body", "--grid-g", "0", "--out", p]).status.code(), Some(2));
    assert_eq!(negbudget(&["two-body", "--g", "-1", "--out", p]).status.code(), Some(2));
    assert_eq!(negbudget(&["dwigner", "--state", "nonsense", "--out", p]).status.code(), Some(2));
    // a grid too small to hold the state breaks the trace contract
    assert_eq!(negbudget(&["two-body", "--grid-extent", "0.5", "--times", "3", "--out", p]).status.code(), Some(3));
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let nested = blocker.join("sub");
    let out = negbudget(&["dwigner", "--out", nested.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(negbudget(&["--help"]).status.code(), Some(0));
    assert_eq!(negbudget(&["--version"]).status.code(), Some(0));
}
