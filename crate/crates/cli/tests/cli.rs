use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mhpp::baselines::brute_force_oracle;
use mhpp::exploresim::EpisodeMetrics;
use mhpp::instance::io::{load_instance, InstanceFile};
use mhpp::{Instance, SolverReport};
use tempfile::TempDir;

fn maps() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/maps")
}

fn mhpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhpp")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let map = maps().join("highlands.map");
    let mut args = vec!["gen", "--map", p(&map), "--out", p(&out)];
    args.extend_from_slice(extra);
    let o = mhpp(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn report(path: &Path) -> SolverReport {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn every_subcommand_has_help() {
    for sub in ["gen", "solve", "validate", "bench", "explore"] {
        let o = mhpp(&[sub, "--help"]);
        assert_eq!(code(&o), 0, "{sub}");
        assert!(stdout(&o).contains("Usage"), "{sub}");
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(code(&mhpp(&["solve", "--frobnicate"])), 2);
}

#[test]
fn gen_preset_setting_a() {
    let dir = TempDir::new().unwrap();
    let f = gen(dir.path(), "a.json", &["--preset", "setting-a", "--seed", "1"]);
    let doc = InstanceFile::read(&f).unwrap();
    assert_eq!(doc.nodes.len(), 60);
    assert_eq!(doc.agents.iter().filter(|a| a.class == "GV").count(), 3);
    assert_eq!(doc.agents.iter().filter(|a| a.class == "AV").count(), 3);
    let inst: Instance = load_instance(&f).unwrap();
    assert_eq!(inst.num_nodes(), 60);
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = gen(dir.path(), "a.json", &["--nodes", "12", "--gv", "2", "--av", "1", "--seed", "9"]);
    let b = gen(dir.path(), "b.json", &["--nodes", "12", "--gv", "2", "--av", "1", "--seed", "9"]);
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn gen_zero_nodes_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let map = maps().join("highlands.map");
    let out = dir.path().join("x.json");
    let o = mhpp(&["gen", "--map", p(&map), "--nodes", "0", "--gv", "1", "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn oracle_prints_exact_makespan() {
    let dir = TempDir::new().unwrap();
    let f = gen(dir.path(), "s.json", &["--nodes", "6", "--gv", "1", "--av", "1", "--seed", "4"]);
    let inst: Instance = load_instance(&f).unwrap();
    let want = brute_force_oracle(&inst).unwrap().makespan;
    let out = dir.path().join("r.json");
    let o = mhpp(&["solve", "--instance", p(&f), "--algo", "oracle", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains(&format!("makespan:    {want}")), "{}", stdout(&o));
    assert_eq!(report(&out).best.unwrap().makespan, want);
}

#[test]
fn peaf_then_validate() {
    let dir = TempDir::new().unwrap();
    let f = gen(dir.path(), "s.json", &["--nodes", "7", "--gv", "1", "--av", "1", "--seed", "2"]);
    let o = mhpp(&["solve", "--instance", p(&f)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = dir.path().join("s.peaf.json");
    assert!(rep.exists());
    let v = mhpp(&["validate", "--instance", p(&f), "--report", p(&rep)]);
    assert_eq!(code(&v), 0);
    assert!(stdout(&v).starts_with("valid"));
}

#[test]
fn validate_rejects_tampered_report() {
    let dir = TempDir::new().unwrap();
    let f = gen(dir.path(), "s.json", &["--nodes", "5", "--gv", "1", "--av", "1", "--seed", "3"]);
    let rep = dir.path().join("r.json");
    assert_eq!(code(&mhpp(&["solve", "--instance", p(&f), "--algo", "b1", "--out", p(&rep)])), 0);
    let mut r = report(&rep);
    let sol = r.best.as_mut().unwrap();
    let longest = (0..sol.paths.len()).max_by_key(|&i| sol.paths[i].len()).unwrap();
    let path = &mut sol.paths[longest];
    path.remove(1);
    fs::write(&rep, r.to_json()).unwrap();
    assert_eq!(code(&mhpp(&["validate", "--instance", p(&f), "--report", p(&rep)])), 5);
}

#[test]
fn b2_never_worse_than_b1() {
    let dir = TempDir::new().unwrap();
    for seed in ["1", "2", "3"] {
        let f = gen(dir.path(), "s.json", &["--nodes", "15", "--gv", "2", "--av", "2", "--seed", seed]);
        let r1 = dir.path().join("b1.json");
        let r2 = dir.path().join("b2.json");
        assert_eq!(code(&mhpp(&["solve", "--instance", p(&f), "--algo", "b1", "--out", p(&r1)])), 0);
        assert_eq!(code(&mhpp(&["solve", "--instance", p(&f), "--algo", "b2", "--out", p(&r2)])), 0);
        assert!(report(&r2).best.unwrap().makespan <= report(&r1).best.unwrap().makespan);
    }
}

#[test]
fn oracle_refuses_large_instances() {
    let dir = TempDir::new().unwrap();
    let f = gen(dir.path(), "s.json", &["--nodes", "20", "--gv", "2", "--av", "2", "--seed", "1"]);
    assert_eq!(code(&mhpp(&["solve", "--instance", p(&f), "--algo", "oracle"])), 2);
}

#[test]
fn timeout_without_solution_exits_4() {
    let dir = TempDir::new().unwrap();
    let f = gen(dir.path(), "s.json", &["--nodes", "20", "--gv", "2", "--av", "2", "--seed", "1"]);
    let out = dir.path().join("r.json");
    let o = mhpp(&["solve", "--instance", p(&f), "--time-limit-ms", "0", "--out", p(&out)]);
    assert_eq!(code(&o), 4);
    assert!(report(&out).best.is_none());
}

#[test]
fn infeasible_exits_3() {
    // The ground robot starts west of the river; the node sits east of it.
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("r.map"), "type octile\nheight 3\nwidth 5\nmap\n..W..\n..W..\n..W..\n").unwrap();
    let doc = r#"{
      "map": "r.map",
      "classes": [{"name": "GV", "passable": ["Ground"], "priority": 1}],
      "nodes": [{"id": 0, "x": 4, "y": 1, "capable": ["GV"]}],
      "agents": [{"id": 0, "class": "GV", "start": {"x": 0, "y": 1}, "goal": {"x": 0, "y": 1}}],
      "seed": null
    }"#;
    let f = dir.path().join("i.json");
    fs::write(&f, doc).unwrap();
    for algo in ["peaf", "b1"] {
        let out = dir.path().join(format!("{algo}.json"));
        let o = mhpp(&["solve", "--instance", p(&f), "--algo", algo, "--out", p(&out)]);
        assert_eq!(code(&o), 3, "{algo}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(report(&out).best.is_none());
    }
}

fn bench(dir: &Path, name: &str, algos: &str) -> Output {
    let map = maps().join("village.map");
    let out = dir.join(name);
    mhpp(&[
        "bench", "--maps", p(&map), "--nodes", "10", "--gv", "1", "--av", "1", "--seeds", "3", "--algos", algos, "--expansions", "5000",
        "--out", p(&out),
    ])
}

fn rows_without_time(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    let t = headers.iter().position(|h| h == "time_to_best_ms").unwrap();
    r.records().map(|rec| rec.unwrap().iter().enumerate().filter(|(i, _)| *i != t).map(|(_, s)| s.to_string()).collect()).collect()
}

#[test]
fn bench_writes_one_row_per_cell_deterministically() {
    let dir = TempDir::new().unwrap();
    let o = bench(dir.path(), "a.csv", "b1,b2,peaf");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("max length"));
    let text = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "map,setting,seed,algo,makespan,total,time_to_best_ms,status");
    let a = rows_without_time(&dir.path().join("a.csv"));
    assert_eq!(a.len(), 9);
    let order: Vec<(String, String)> = a.iter().map(|r| (r[2].clone(), r[3].clone())).collect();
    let mut want = Vec::new();
    for s in 0..3 {
        for algo in ["b1", "b2", "peaf"] {
            want.push((s.to_string(), algo.to_string()));
        }
    }
    assert_eq!(order, want);
    assert_eq!(code(&bench(dir.path(), "b.csv", "b1,b2,peaf")), 0);
    assert_eq!(a, rows_without_time(&dir.path().join("b.csv")));
}

#[test]
fn bench_empty_algo_list_is_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&bench(dir.path(), "a.csv", "")), 2);
}

fn scenario(dir: &Path) -> PathBuf {
    fs::copy(maps().join("village.map"), dir.join("village.map")).unwrap();
    let f = dir.join("sc.json");
    fs::write(&f, r#"{"map": "village.map", "robots": [{"class": "GV"}, {"class": "AV"}], "params": {"tick_cap": 3000}}"#).unwrap();
    f
}

fn explore(sc: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["explore", "--scenario", p(sc), "--trials", "2", "--out", p(out)];
    args.extend_from_slice(extra);
    mhpp(&args)
}

fn summary_rows(out: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(out.join("summary.csv")).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn explore_writes_metrics_traces_and_summary() {
    let dir = TempDir::new().unwrap();
    let sc = scenario(dir.path());
    let out = dir.path().join("runs");
    let o = explore(&sc, &out, &["--alpha", "0,0.6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = summary_rows(&out);
    assert_eq!(rows.len(), 2);
    for (row, tag) in rows.iter().zip(["a000", "a060"]) {
        let mut ticks = 0.0;
        for t in 0..2 {
            let m: EpisodeMetrics = serde_json::from_str(&fs::read_to_string(out.join(format!("full_{tag}_trial{t}.json"))).unwrap()).unwrap();
            assert!(m.complete);
            ticks += m.ticks as f64;
            let trace = out.join(format!("full_{tag}_trial{t}_trace.csv"));
            let last = fs::read_to_string(trace).unwrap().lines().last().unwrap().to_string();
            assert!(last.starts_with(&format!("{},", m.ticks)), "{last}");
        }
        let mean: f64 = row[4].parse().unwrap();
        assert!((mean - ticks / 2.0).abs() < 1e-9);
    }
}

#[test]
fn alpha_zero_matches_nohe() {
    let dir = TempDir::new().unwrap();
    let sc = scenario(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(code(&explore(&sc, &a, &["--alpha", "0"])), 0);
    assert_eq!(code(&explore(&sc, &b, &["--ablate", "nohe"])), 0);
    assert_eq!(summary_rows(&a)[0][4], summary_rows(&b)[0][4]);
}

#[test]
fn explore_rejects_alpha_out_of_range() {
    let dir = TempDir::new().unwrap();
    let sc = scenario(dir.path());
    assert_eq!(code(&explore(&sc, &dir.path().join("o"), &["--alpha", "1.5"])), 2);
}
