use std::path::Path;
use std::process::Command;

use rhizome::geomtasks::{Label, Labeling};
use rhizome::grower::RootNetwork;
use rhizome_cli::{dispatch, render_svg, run, Artifact, CliError};

fn argv(args: &[&str]) -> Vec<String> {
    std::iter::once("rhizome").chain(args.iter().copied()).map(String::from).collect()
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

#[test]
fn gate_humidity_prints_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_arg(tmp.path());
    let r = run(argv(&["gate", "--layout", "humidity", "--inputs", "1,1", "--out", &out]))
        .unwrap()
        .unwrap();
    assert_eq!(r.outputs.stdout, "p=0 q=1\n");
    assert_eq!(std::fs::read_to_string(tmp.path().join("result.csv")).unwrap(), "output,value\np,0\nq,1\n");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_arg(tmp.path());
    assert_eq!(dispatch(argv(&["amplifier", "--out", &out])), 0);
    assert_eq!(dispatch(argv(&["nonsense"])), 2);
    assert_eq!(dispatch(argv(&["amplifier", "--no-such-flag", "1"])), 2);
    assert_eq!(dispatch(argv(&["amplifier", "--set", "bogus=1", "--out", &out])), 2);
    assert_eq!(dispatch(argv(&["amplifier", "--r1", "abc", "--out", &out])), 2);
    assert_eq!(dispatch(argv(&["amplifier", "--r1", "-5", "--out", &out])), 1);
    assert_eq!(dispatch(argv(&["netlist", "--netlist", "/no/such/file", "--out", &out])), 1);
}

#[test]
fn mine_total_and_manifest_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_arg(tmp.path());
    let r = run(argv(&["mine", "--material-seed", "42", "--out", &out])).unwrap().unwrap();
    assert!(r.outputs.stdout.starts_with("total=16128\n"));
    let census = std::fs::read_to_string(tmp.path().join("census.csv")).unwrap();
    let total: u64 = census.lines().skip(1).map(|l| l.split(',').nth(5).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 16128);
    let manifest = std::fs::read_to_string(tmp.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("material_seed = 42\n"));
    assert!(manifest.contains("command = mine\n"));
}

#[test]
fn voronoi_writes_labeling_agreement_and_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let seeds = tmp.path().join("seeds.csv");
    std::fs::write(&seeds, "x,y\n10,20\n50,30\n100,200\n").unwrap();
    let out = tmp.path().join("out");
    run(argv(&[
        "voronoi",
        "--seeds",
        &seeds.display().to_string(),
        "--domain",
        "256x256",
        "--seed",
        "7",
        "--out",
        &out_arg(&out),
    ]))
    .unwrap();
    for f in ["labeling.pgm", "agreement.csv", "voronoi.svg", "manifest.txt"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let agreement = std::fs::read_to_string(out.join("agreement.csv")).unwrap();
    let row: Vec<&str> = agreement.lines().nth(1).unwrap().split(',').collect();
    assert!(row[4].parse::<f64>().unwrap() >= 0.95);
    assert_eq!(row[5], "true");
}

#[test]
fn precedence_defaults_config_flags_set() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("amp.cfg");
    std::fs::write(&cfg, "# test\nv1 = -2\nv2 = -3\nr0 = 1\nr1 = 1\nr2 = 1\n").unwrap();
    let c = cfg.display().to_string();
    let out = out_arg(&tmp.path().join("o"));
    let v0 = |extra: &[&str]| {
        let mut a = vec!["amplifier", "--config", &c, "--out", &out];
        a.extend_from_slice(extra);
        run(argv(&a)).unwrap().unwrap().outputs.stdout
    };
    assert!(v0(&[]).starts_with("v0=5 "));
    assert!(v0(&["--v1", "-1"]).starts_with("v0=4 "));
    assert!(v0(&["--v1", "-1", "--set", "v1=0"]).starts_with("v0=3 "));
    std::fs::write(&cfg, "unknown_key = 1\n").unwrap();
    let e = run(argv(&["amplifier", "--config", &c, "--out", &out])).unwrap_err();
    assert!(matches!(e, CliError::Usage(_)));
}

#[test]
fn manifest_lists_every_effective_parameter() {
    let tmp = tempfile::tempdir().unwrap();
    run(argv(&["maze", "--seed", "4", "--out", &out_arg(tmp.path())])).unwrap();
    let m = std::fs::read_to_string(tmp.path().join("manifest.txt")).unwrap();
    for key in ["seed = 4", "n = 10", "budget = auto", "w_noise = 0.2", "stall_limit = 60", "diffusion = 0.25"] {
        assert!(m.contains(key), "{key} not in manifest:\n{m}");
    }
}

#[test]
fn output_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_rhizome"))
        .args(["amplifier"])
        .env("RHIZOME_OUT", tmp.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(tmp.path().join("amplifier.csv").exists());
    assert!(tmp.path().join("manifest.txt").exists());
}

#[test]
fn binary_exit_code_on_usage_error() {
    let status = Command::new(env!("CARGO_BIN_EXE_rhizome")).arg("frobnicate").status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn svg_empty_network_has_no_paths() {
    let svg = render_svg(&Artifact::Network {
        network: &RootNetwork::default(),
        terrain: None,
    });
    assert!(svg.starts_with("<?xml"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(!svg.contains("<path"));
    assert!(svg.contains("empty"));
}

#[test]
fn svg_two_seed_labeling() {
    let (w, h) = (20, 10);
    let labels = (0..w * h)
        .map(|i| match i % w {
            x if x < 9 => Label::Seed(0),
            9 => Label::Boundary,
            _ => Label::Seed(1),
        })
        .collect();
    let l = Labeling::new(w, h, labels);
    let svg = render_svg(&Artifact::Labeling(&l));
    assert_eq!(svg.matches("class=\"region\"").count(), 2);
    assert_eq!(svg.matches("class=\"boundary\"").count(), 1);
    assert_eq!(svg, render_svg(&Artifact::Labeling(&l)));
}

#[test]
fn render_subcommand_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let net = tmp.path().join("net.csv");
    std::fs::write(&net, "root_id,parent_id,vertex,x,y,state\n0,-,0,1,1,stopped\n0,-,1,5,3,stopped\n").unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        run(argv(&["render", "--input", &net.display().to_string(), "--out", &out_arg(d)])).unwrap();
    }
    let sa = std::fs::read(a.join("render.svg")).unwrap();
    assert_eq!(sa, std::fs::read(b.join("render.svg")).unwrap());
    assert!(String::from_utf8(sa).unwrap().contains("id=\"trail-0\""));
}

#[test]
fn truthtable_half_adder_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let r = run(argv(&["truthtable", "--layout", "half_adder", "--out", &out_arg(tmp.path())]))
        .unwrap()
        .unwrap();
    assert_eq!(r.outputs.stdout, "x,y,p,q,r\n0,0,0,0,0\n0,1,1,1,0\n1,0,1,1,0\n1,1,0,1,1\n");
}
