use std::io::Write;
use std::process::{Command, Output, Stdio};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use symplecta::demo::SpherePoint;
use symplecta::heisenberg::{HeisenbergElement, HeisenbergForm};
use symplecta::lagrangian::ComplexLagrangian;
use symplecta::{Mat, Matrix, OrbitType, Subspace, SymplecticSpace, TolerancePolicy, C64, Q, QI};

fn run(args: &[&str], stdin: &str) -> Output {
    run_env(args, stdin, &[])
}

fn run_env(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_symplecta"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).env_remove("SYMPLECTA_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("spawn symplecta");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

fn pol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn rational(rows: usize, cols: usize, data: &[i64]) -> Mat<Q> {
    Mat::from_vec(rows, cols, data.iter().map(|&x| Q::from_integer(x.into())).collect())
}

fn subspace_doc(n: usize, rows: usize, cols: usize, data: &[i64]) -> String {
    Subspace::new(&SymplecticSpace::standard(n), rational(rows, cols, data), &pol()).unwrap().to_json().to_string()
}

fn gaussian(re: i64, im: i64) -> QI {
    QI::new(Q::from_integer(re.into()), Q::from_integer(im.into()))
}

#[test]
fn frame_i_1_is_upper() {
    let f = ComplexLagrangian::new(Mat::from_vec(2, 1, vec![gaussian(0, 1), gaussian(1, 0)]), &pol()).unwrap();
    let o = run(&["classify"], &f.to_json().to_string());
    assert_eq!(json_out(&o), json!([0, 1, 0]));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(0,1,0)"));
}

#[test]
fn line_in_plane_is_isotropic() {
    let o = run(&["classify"], &subspace_doc(1, 2, 1, &[1, 0]));
    assert_eq!(json_out(&o), json!([1, 0, 0]));
}

#[test]
fn explain_reports_dimensions() {
    // span{e₁, e₂, f₁} in ℝ⁴
    let doc = subspace_doc(2, 4, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0]);
    let v = json_out(&run(&["classify", "--explain"], &doc));
    assert_eq!(v["type"], json!([1, 1, 0]));
    assert_eq!(v["dim"], 3);
    assert_eq!(v["dim_intersection"], 1);
    assert_eq!(v["dim_complement"], 1);
    assert_eq!(v["coisotropic"], true);
    assert_eq!(v["isotropic"], false);
}

fn random_frames(count: usize, seed: u64) -> Vec<ComplexLagrangian<QI>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        // Siegel-type frame [1; Z] with Z symmetric is always Lagrangian.
        let n = 2;
        let mut z = Mat::<QI>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x = gaussian(rng.random_range(-3..=3), rng.random_range(-3..=3));
                z[(i, j)] = x.clone();
                z[(j, i)] = x;
            }
        }
        let frame = Mat::<QI>::identity(n).vstack(&z);
        out.push(ComplexLagrangian::new(frame, &pol()).unwrap());
    }
    out
}

#[test]
fn batch_of_100_gives_100_lines_in_order() {
    let frames = random_frames(100, 7);
    let lines: Vec<String> = frames.iter().map(|f| f.to_json().to_string()).collect();
    let expected: Vec<Value> = frames.iter().map(|f| json!(f.lag_type(&pol()))).collect();
    let jsonl = lines.join("\n");
    let array = format!("[{}]", lines.join(","));
    for (input, jobs) in [(&jsonl, "1"), (&jsonl, "4"), (&array, "3")] {
        let out = stdout(&run(&["--jobs", jobs, "classify"], input));
        let got: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(got.len(), 100);
        assert_eq!(got, expected);
    }
}

#[test]
fn malformed_input_exits_2() {
    for bad in ["{\"basis\": [1, 2", "{}", "{\"frame\": {\"rows\": 2}}", ""] {
        let o = run(&["classify"], bad);
        assert_eq!(o.status.code(), Some(2), "input {bad:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(run(&["no-such-command"], "").status.code(), Some(2));
    assert_eq!(run(&["orbit-dim", "--kind", "gr", "--type", "1,2"], "").status.code(), Some(2));
}

#[test]
fn float_input_needs_float_backend() {
    let doc = Subspace::<f64>::span(&SymplecticSpace::standard(1), &Mat::from_vec(2, 1, vec![0.5, 0.25]), &pol()).unwrap().to_json().to_string();
    let o = run(&["classify"], &doc);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--backend float"));
    assert_eq!(json_out(&run(&["--backend", "float", "classify"], &doc)), json!([1, 0, 0]));
}

#[test]
fn non_lagrangian_frame_exits_3() {
    // span{e₁, f₁} is not isotropic
    let m = Matrix::Gaussian(Mat::from_vec(2, 2, vec![gaussian(1, 0), gaussian(0, 0), gaussian(0, 0), gaussian(1, 0)]));
    let o = run(&["classify"], &json!({ "frame": m.to_json() }).to_string());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn complement_round_trips() {
    let doc = subspace_doc(2, 4, 2, &[1, 0, 2, 1, 0, 0, 0, -1]);
    let w = Subspace::<Q>::from_json(&serde_json::from_str(&doc).unwrap(), &pol()).unwrap();
    let c = json_out(&run(&["complement"], &doc));
    let wc = Subspace::<Q>::from_json(&c, &pol()).unwrap();
    assert_eq!(wc.dim(), 4 - w.dim());
    let back = json_out(&run(&["complement"], &c.to_string()));
    assert!(Subspace::<Q>::from_json(&back, &pol()).unwrap().same_span(&w, &pol()));
}

#[test]
fn darboux_output_is_darboux() {
    let doc = subspace_doc(2, 4, 3, &[1, 0, 1, 2, 0, 0, 0, 1, 0, 0, 3, 1]);
    let v = json_out(&run(&["darboux"], &doc));
    let Matrix::Rational(b) = Matrix::from_json(&v["vectors"]).unwrap() else { panic!("expected rational output") };
    let omega = SymplecticSpace::standard(2).omega_q().clone();
    assert_eq!(b.transpose().mul(&omega).mul(&b), omega);
    let t: OrbitType = serde_json::from_value(v["type"].clone()).unwrap();
    let w = Subspace::<Q>::from_json(&serde_json::from_str(&doc).unwrap(), &pol()).unwrap();
    assert_eq!(t, w.subspace_type(&pol()));
}

#[test]
fn reduce_image_is_symplectic() {
    // span{e₁, e₂, f₂}: radical e₁, image a symplectic plane
    let doc = subspace_doc(2, 4, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1]);
    for extra in [&[][..], &["--with-j"][..]] {
        let mut args = vec!["reduce"];
        args.extend_from_slice(extra);
        let v = json_out(&run(&args, &doc));
        assert_eq!(v["m"], 1);
        assert_eq!(v["image_type"], json!([0, 1, 0]));
        let img = Subspace::<Q>::from_json(&v["image"], &pol()).unwrap();
        assert_eq!(img.dim(), 2);
        assert_eq!(v["j_tilde"].is_null(), extra.is_empty());
    }
}

fn is_line_i_1(v: &Value) {
    let f = ComplexLagrangian::<C64>::from_json(&v["value"], &pol()).unwrap();
    let fr = f.frame();
    let ratio = fr[(0, 0)] / fr[(1, 0)];
    assert!((ratio - C64::new(0.0, 1.0)).norm() < 1e-9, "ratio {ratio}");
}

#[test]
fn retract_beta_on_line_gives_i_1() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        // [q; 1] with Im q > 0 is type (0,1,0)
        let q = C64::new(rng.random_range(-2.0..2.0), rng.random_range(0.1..3.0));
        let f = ComplexLagrangian::new(Mat::from_vec(2, 1, vec![q, C64::new(1.0, 0.0)]), &pol()).unwrap();
        for route in ["mostow", "projection"] {
            let v = json_out(&run(&["retract", "--map", "beta", "--route", route], &f.to_json().to_string()));
            assert_eq!(v["membership"], "pass");
            assert_eq!(v["output_type"], json!([0, 1, 0]));
            is_line_i_1(&v);
        }
    }
}

#[test]
fn retract_fixes_gr_j_members() {
    // span{e₁, f₁} is J-invariant
    let doc = subspace_doc(2, 4, 2, &[1, 0, 0, 0, 0, 1, 0, 0]);
    let v = json_out(&run(&["retract", "--map", "gamma"], &doc));
    assert_eq!(v["residual"], 0.0);
    assert_eq!(v["membership"], "pass");
    let w = Subspace::<Q>::from_json(&serde_json::from_str(&doc).unwrap(), &pol()).unwrap().to_f64();
    assert!(Subspace::<f64>::from_json(&v["value"], &pol()).unwrap().same_span(&w, &pol()));
}

#[test]
fn retract_random_r4_passes_membership() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let m = Mat::from_vec(4, 2, (0..8).map(|_| rng.random_range(-1.0..1.0)).collect());
        let doc = Subspace::span(&SymplecticSpace::standard(2), &m, &pol()).unwrap().to_json().to_string();
        let v = json_out(&run(&["--backend", "float", "retract", "--map", "gamma"], &doc));
        assert_eq!(v["membership"], "pass");
        assert_eq!(v["input_type"], v["output_type"]);
        assert!(v["residual"].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn retract_reports_non_convergence_with_exit_4() {
    let m = Mat::from_vec(4, 2, vec![1.0, 0.3, 0.2, 1.0, 0.5, -0.7, 0.1, 2.0]);
    let doc = Subspace::span(&SymplecticSpace::standard(2), &m, &pol()).unwrap().to_json().to_string();
    let o = run_env(&["retract", "--map", "gamma"], &doc, &[("SYMPLECTA_TOL", "1e-300")]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("residual"));
}

#[test]
fn retract_with_explicit_j() {
    let dir = std::env::temp_dir().join(format!("symplecta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let jpath = dir.join("j.json");
    // the standard J, written out
    let j = rational(2, 2, &[0, -1, 1, 0]);
    std::fs::write(&jpath, Matrix::Rational(j).to_json().to_string()).unwrap();
    let f = ComplexLagrangian::new(Mat::from_vec(2, 1, vec![C64::new(0.4, 2.0), C64::new(1.0, 0.0)]), &pol()).unwrap();
    let v = json_out(&run(&["retract", "--map", "beta", "--j", jpath.to_str().unwrap()], &f.to_json().to_string()));
    is_line_i_1(&v);
    // J = −Ω is not compatible
    std::fs::write(&jpath, Matrix::Rational(rational(2, 2, &[0, 1, -1, 0])).to_json().to_string()).unwrap();
    let o = run(&["retract", "--map", "beta", "--j", jpath.to_str().unwrap()], &f.to_json().to_string());
    assert_eq!(o.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}

fn csv_rows(out: &str) -> Vec<SpherePoint> {
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some(SpherePoint::CSV_HEADER));
    lines.map(|l| SpherePoint::from_csv_row(l, &pol()).unwrap()).collect()
}

#[test]
fn sphere_demo_contract() {
    assert_ne!(run(&["sphere-demo", "--samples", "0"], "").status.code(), Some(0));
    let sweep = csv_rows(&stdout(&run(&["sphere-demo", "--equator-sweep", "8"], "")));
    assert_eq!(sweep.len(), 8);
    assert!(sweep.iter().all(|p| p.lag_type == OrbitType::new(1, 0, 0)));

    let a = stdout(&run(&["sphere-demo", "--samples", "1000", "--seed", "5"], ""));
    let b = stdout(&run(&["sphere-demo", "--samples", "1000", "--seed", "5"], ""));
    let c = stdout(&run(&["sphere-demo", "--samples", "1000", "--seed", "6"], ""));
    assert_eq!(a, b);
    assert_ne!(a, c);
    let pts = csv_rows(&a);
    assert_eq!(pts.len(), 1000);
    let upper = pts.iter().filter(|p| p.lag_type == OrbitType::new(0, 1, 0)).count();
    let lower = pts.iter().filter(|p| p.lag_type == OrbitType::new(0, 0, 1)).count();
    assert_eq!(upper + lower, 1000);
    assert!((400..=600).contains(&upper), "upper {upper}");
}

#[test]
fn orbit_dim_and_incidence() {
    let v = json_out(&run(&["orbit-dim", "--kind", "gr", "--type", "1,0,0"], ""));
    // lines in ℝ² form ℙ¹
    assert_eq!(v["orbit_dim"], 1);
    assert_eq!(v["group_dim"], 3);
    for (kind, ty) in [("lag", "[0,1,1]"), ("lagsplit", "(1,1,0)"), ("gr", "0,1,1")] {
        let v = json_out(&run(&["orbit-dim", "--kind", kind, "--type", ty], ""));
        assert_eq!(v["orbit_dim"].as_u64().unwrap() + v["stabilizer_dim"].as_u64().unwrap(), v["group_dim"].as_u64().unwrap());
    }
    let v = json_out(&run(&["incidence", "--kind", "lag", "--from", "0,1,1", "--to", "2,0,0"], ""));
    assert_eq!(v["in_closure"], true);
    let v = json_out(&run(&["incidence", "--kind", "lag", "--from", "2,0,0", "--to", "0,1,1"], ""));
    assert_eq!(v["in_closure"], false);
    assert_eq!(run(&["incidence", "--kind", "lagsplit", "--from", "0,1,0", "--to", "1,0,0"], "").status.code(), Some(3));
}

#[test]
fn roots_and_cayley() {
    for (cartan, n, count) in [("a", 2, 8), ("h", 2, 8), ("t", 3, 18)] {
        let v = json_out(&run(&["roots", "--n", &n.to_string(), "--cartan", cartan], ""));
        assert_eq!(v["roots"].as_array().unwrap().len(), count, "cartan {cartan}");
    }
    assert_eq!(run(&["roots", "--n", "2", "--cartan", "x"], "").status.code(), Some(2));

    let v = json_out(&run(&["cayley", "--gamma", "1", "--sigma", "1", "--n", "3"], ""));
    assert_eq!(v["basepoint_type"], json!([1, 1, 1]));
    let f = ComplexLagrangian::<C64>::from_json(&v["basepoint"], &pol()).unwrap();
    let exact = ComplexLagrangian::<QI>::from_json(&v["basepoint_exact"], &pol()).unwrap();
    assert_eq!(f.lag_type(&pol()), OrbitType::new(1, 1, 1));
    assert_eq!(exact.lag_type(&pol()), OrbitType::new(1, 1, 1));
    assert_eq!(run(&["cayley", "--gamma", "2", "--sigma", "1", "--n", "2"], "").status.code(), Some(3));
}

#[test]
fn heisenberg_round_trip() {
    let t = OrbitType::new(2, 1, 1);
    let q = |x: i64| Q::from_integer(x.into());
    let lambda = Mat::from_vec(2, 2, vec![q(1), q(-2), q(0), q(3)]);
    let mu = Mat::from_vec(2, 2, vec![q(2), q(1), q(-1), q(0)]);
    // x = −(S + λμᵗ) with S symmetric
    let sym = Mat::from_vec(2, 2, vec![q(1), q(4), q(4), q(2)]);
    let x = sym.add(&lambda.mul(&mu.transpose())).neg();
    let h = HeisenbergElement::from_ziegler(t, &lambda, &mu, &x, &pol()).unwrap();
    for (name, form) in [("darboux", HeisenbergForm::Darboux), ("triangular", HeisenbergForm::Triangular), ("ziegler", HeisenbergForm::Ziegler)] {
        let v = json_out(&run(&["heisenberg", "--form", name], &h.to_json().to_string()));
        // 2n₀n₊ + 2n₀n₋ + n₀(n₀+1)/2 at (2,1,1)
        assert_eq!(v["dim"], 4 + 4 + 3);
        assert_eq!(Matrix::from_json(&v["matrix"]).unwrap(), Matrix::Rational(h.to_matrix(form)));
        let z = |k: &str| match Matrix::from_json(&v["ziegler"][k]).unwrap() {
            Matrix::Rational(m) => m,
            _ => panic!("expected rational"),
        };
        let back = HeisenbergElement::from_ziegler(t, &z("lambda"), &z("mu"), &z("x"), &pol()).unwrap();
        assert_eq!(back, h);
    }
    let v = json_out(&run(&["heisenberg", "--type", "1,1,0"], ""));
    assert_eq!(v["dim"], 3);
    let id = HeisenbergElement::<Q>::from_json(&v["element"], &pol()).unwrap();
    assert_eq!(id, HeisenbergElement::identity(OrbitType::new(1, 1, 0)));
}

#[test]
fn output_is_deterministic() {
    let frames = random_frames(20, 99);
    let input: Vec<String> = frames.iter().map(|f| f.to_json().to_string()).collect();
    let input = input.join("\n");
    let a = stdout(&run(&["classify", "--explain"], &input));
    let b = stdout(&run(&["--jobs", "2", "classify", "--explain"], &input));
    assert_eq!(a, b);
    let doc = subspace_doc(2, 4, 2, &[1, 1, 0, 2, 3, 0, 1, 1]);
    assert_eq!(stdout(&run(&["darboux"], &doc)), stdout(&run(&["darboux"], &doc)));
}
