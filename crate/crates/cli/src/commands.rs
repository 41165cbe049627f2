//! One function per subcommand. Each writes its outputs through [`Run`] and
//! reports how it finished; hard errors are returned before anything is written.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use inflap::dirichlet::{solve_bounded, steepest_path_solve, DirichletProblem, SolverOptions};
use inflap::euclid::{convergence_study, envelope_check};
use inflap::exhaustion::{solve_exhaustion, ExhaustionOptions};
use inflap::fixtures::{by_name, BinaryTree, Fig3, HalfLine, HalfPlane};
use inflap::format::{fmt_num, parse_field, parse_graph, write_field, write_graph, GraphFile, FORMAT_VERSION};
use inflap::operator::{check_condition_ii, check_condition_iii, classify, residual_norm, slopes};
use inflap::oracle::GraphOracle;
use inflap::regularize::{regularize_with, verify_prop31, FlatRule, RegularizeOptions};
use inflap::tree::{solve_bounded_boundary, solve_single_root, sup_path_sum, RootedForest, DIVERGENCE_THRESHOLD};
use inflap::{Error, ScalarField};

use crate::manifest::{digest, RunManifest, Run};
use crate::specs::{self, BoundaryData, OracleSpec};
use crate::{
    CheckArgs, CliError, EuclidArgs, ExhaustArgs, ExportArgs, RegularizeArgs, ReplayArgs, SolveArgs, SolveMethod,
    Status, TreeArgs,
};

type Outcome = Result<Status, CliError>;

/// `x` rounded to the 12 significant digits used in every output.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(fmt_num(x).parse::<f64>().unwrap_or(x))
    } else {
        json!(x.to_string())
    }
}

fn put(run: &mut Run, name: &str, text: &str) -> Result<(), CliError> {
    let path = run.out.join(name);
    run.write(name, text).map_err(CliError::io(&path))
}

fn put_json(run: &mut Run, name: &str, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    put(run, name, &(text + "\n"))
}

fn read(run: &mut Run, path: &Path) -> Result<String, CliError> {
    run.read_input(path).map_err(CliError::io(path))
}

fn load_graph(run: &mut Run, path: &Path) -> Result<GraphFile, CliError> {
    Ok(parse_graph(&read(run, path)?)?)
}

fn usage<T>(r: Result<T, String>) -> Result<T, CliError> {
    r.map_err(CliError::Usage)
}

fn has_entries(f: &ScalarField) -> bool {
    f.iter().next().is_some()
}

pub fn solve(a: &SolveArgs, run: &mut Run) -> Outcome {
    let file = load_graph(run, &a.graph)?;
    let p = file.partition()?;
    let f = file.f_or_zero(&p)?;
    let prob = DirichletProblem::new(file.graph.clone(), p.clone(), f, file.g.clone())?;
    let report = match a.method {
        SolveMethod::Dpp => solve_bounded(&prob, &a.solver.options())?,
        SolveMethod::Peel => steepest_path_solve(&prob)?,
    };
    put(run, "solution.csv", &write_field(Some(&p), &report.solution))?;
    put_json(
        run,
        "report.json",
        &json!({
            "format": FORMAT_VERSION,
            "method": report.method,
            "iterations": report.iterations,
            "residual": num(report.residual),
            "bracket_gap": report.bracket_gap.map(num),
            "converged": report.converged,
            "final_update": num(report.final_update),
        }),
    )?;
    if !report.converged {
        return Ok(Status::Convergence(format!(
            "no convergence after {} sweeps (last update {:e})",
            report.iterations, report.final_update
        )));
    }
    Ok(Status::Success)
}

pub fn check(a: &CheckArgs, run: &mut Run) -> Outcome {
    let file = load_graph(run, &a.graph)?;
    let p = file.partition()?;
    let g = &file.graph;
    let u = parse_field(&read(run, &a.field)?, g.vertex_count())?;
    let f = has_entries(&file.f).then(|| file.f_or_zero(&p)).transpose()?;
    let report = classify(g, &p, &u, f.as_ref(), a.tol)?;
    let zero = ScalarField::constant_on(g.vertex_count(), p.interior(), 0.0)?;
    let residual = residual_norm(g, &p, &u, f.as_ref().unwrap_or(&zero))?;
    let radius = a.radius.unwrap_or(g.diameter().max(1));
    let flags = |v: Vec<(usize, bool)>| -> Vec<Value> {
        v.into_iter().map(|(x, ok)| json!({"vertex": x, "holds": ok})).collect()
    };
    let ii = check_condition_ii(g, &p, &u, a.tol)?;
    let iii = check_condition_iii(g, &p, &u, radius, a.tol)?;
    let witness = report.worst_subharmonic_violation().map(|v| {
        json!({"vertex": v.vertex, "label": g.label(v.vertex), "residual": num(v.residual)})
    });
    let classes: Vec<Value> = report
        .vertices
        .iter()
        .map(|v| json!({"vertex": v.vertex, "residual": num(v.residual), "class": v.class}))
        .collect();
    put_json(
        run,
        "check.json",
        &json!({
            "format": FORMAT_VERSION,
            "tolerance": a.tol,
            "radius": radius,
            "residual_norm": num(residual),
            "overall": report.overall(),
            "subharmonic": witness.is_none(),
            "witness": witness,
            "classification": classes,
            "condition_ii": flags(ii),
            "condition_iii": flags(iii),
        }),
    )?;
    match report.worst_subharmonic_violation() {
        Some(v) => Ok(Status::Property(format!(
            "not subharmonic at vertex {} (residual {:e})",
            v.vertex, v.residual
        ))),
        None => Ok(Status::Success),
    }
}

pub fn regularize(a: &RegularizeArgs, run: &mut Run) -> Outcome {
    let file = load_graph(run, &a.graph)?;
    let p = file.partition()?;
    let g = &file.graph;
    let u = parse_field(&read(run, &a.field)?, g.vertex_count())?;
    let rule = if a.strict_flat_set { FlatRule::Strict } else { FlatRule::AtMost };
    let opts = RegularizeOptions {
        rule,
        tol: a.tol,
        slopes: None,
    };
    let reg = regularize_with(g, &p, &u, a.eps, &opts)?;
    put(run, "regularized.csv", &write_field(Some(&p), &reg.u_eps))?;

    let lap = classify(g, &p, &reg.u_eps, None, a.tol)?;
    let mut min_slope = f64::INFINITY;
    for &x in p.interior() {
        min_slope = min_slope.min(slopes(g, &reg.u_eps, x)?.slope);
    }
    let gap = p
        .interior()
        .iter()
        .map(|&x| u.raw()[x] - reg.u_eps.raw()[x])
        .fold(0.0, f64::max);
    let violation = match rule {
        FlatRule::AtMost => match verify_prop31(g, &p, &u, &[a.eps], a.tol) {
            Ok(_) => None,
            Err(Error::PropertyViolation {
                property,
                vertex,
                detail,
            }) => Some((property, vertex, detail)),
            Err(e) => return Err(e.into()),
        },
        FlatRule::Strict => lap
            .worst_subharmonic_violation()
            .map(|v| ("subharmonic".to_string(), v.vertex, format!("Δ∞u_ε = {:e}", v.residual))),
    };
    put_json(
        run,
        "report.json",
        &json!({
            "format": FORMAT_VERSION,
            "epsilon": a.eps,
            "rule": rule,
            "flat_size": reg.flat.vertices.len(),
            "components": reg.flat.components.len(),
            "min_laplacian": num(lap.min_residual()),
            "min_slope": num(min_slope),
            "gap": num(gap),
            "violation": violation.as_ref().map(|(property, vertex, detail)| {
                json!({"property": property, "vertex": vertex, "detail": detail})
            }),
        }),
    )?;
    match violation {
        Some((property, vertex, _)) => Ok(Status::Property(format!("`{property}` fails at vertex {vertex}"))),
        None => Ok(Status::Success),
    }
}

fn exhaust_on<O: GraphOracle>(o: &O, g: impl Fn(&O::Key) -> f64, a: &ExhaustArgs, run: &mut Run) -> Outcome {
    let radii = usage(specs::list_usize(&a.radii))?;
    let opts = ExhaustionOptions {
        radii,
        window_r: a.window_r,
        tol: a.tol,
        early_stop: !a.no_early_stop,
        lower_bracket: a.lower_bracket,
        solver: SolverOptions::default().with_tol(a.solver_tol).with_mode(a.mode.into()),
        ..ExhaustionOptions::default()
    };
    let ex = solve_exhaustion(o, g, &opts)?;
    let t = &ex.truncation;
    let mut csv = String::from("# format: 1\nradius,vertex,label,depth,value\n");
    for rec in &ex.records {
        for (i, (key, v)) in ex.window.iter().zip(&rec.window).enumerate() {
            let id = t.id_of(key).unwrap_or(i);
            let _ = writeln!(csv, "{},{id},{},{},{}", rec.radius, o.label(key), t.depth[id], fmt_num(*v));
        }
    }
    put(run, "window.csv", &csv)?;
    let mut sol = String::from("# format: 1\nvertex,label,depth,value\n");
    for (v, x) in ex.solution.iter() {
        let _ = writeln!(sol, "{v},{},{},{}", o.label(&t.keys[v]), t.depth[v], fmt_num(x));
    }
    put(run, "solution.csv", &sol)?;
    let records: Vec<Value> = ex
        .records
        .iter()
        .map(|r| {
            json!({
                "radius": r.radius,
                "change": r.change.map(num),
                "iterations": r.iterations,
                "residual": num(r.residual),
                "solver_converged": r.solver_converged,
            })
        })
        .collect();
    put_json(
        run,
        "trace.json",
        &json!({
            "format": FORMAT_VERSION,
            "oracle": a.oracle,
            "window_r": a.window_r,
            "window_size": ex.window.len(),
            "converged": ex.converged,
            "g_sup": num(ex.g_sup),
            "g_inf": num(ex.g_inf),
            "bracket_gap": ex.bracket_gap().map(num),
            "records": records,
        }),
    )?;
    if !ex.converged {
        let last = ex.records.last().and_then(|r| r.change).unwrap_or(f64::INFINITY);
        return Ok(Status::Convergence(format!(
            "window did not stabilize within {:e} (last change {last:e})",
            a.tol
        )));
    }
    Ok(Status::Success)
}

pub fn exhaust(a: &ExhaustArgs, run: &mut Run) -> Outcome {
    let oracle = usage(specs::oracle(&a.oracle))?;
    let data = match &a.g {
        Some(s) => usage(specs::boundary_data(s))?,
        None if matches!(oracle, OracleSpec::HalfPlane { .. }) => BoundaryData::Alternating,
        None => BoundaryData::Constant(0.0),
    };
    let constant = match data {
        BoundaryData::Constant(c) => Some(c),
        BoundaryData::Alternating => None,
    };
    let needs_plane = || CliError::Usage("alternating data is only defined on the half-plane".into());
    match oracle {
        OracleSpec::HalfPlane { period } => {
            let o = HalfPlane::new(period)?;
            match constant {
                Some(c) => exhaust_on(&o, |_| c, a, run),
                None => exhaust_on(&o, HalfPlane::alternating, a, run),
            }
        }
        OracleSpec::HalfLine => {
            let c = constant.ok_or_else(needs_plane)?;
            exhaust_on(&HalfLine, |_| c, a, run)
        }
        OracleSpec::BinaryTree => {
            let c = constant.ok_or_else(needs_plane)?;
            exhaust_on(&BinaryTree, |_| c, a, run)
        }
        OracleSpec::Fig3 { k_max } => {
            let c = constant.ok_or_else(needs_plane)?;
            exhaust_on(&Fig3::new(k_max)?, |_| c, a, run)
        }
    }
}

pub fn tree(a: &TreeArgs, run: &mut Run) -> Outcome {
    let file = load_graph(run, &a.graph)?;
    let roots = if file.roots.is_empty() { file.boundary.clone() } else { file.roots.clone() };
    let t = RootedForest::new(file.graph.clone(), &roots)?;
    let n = t.vertex_count();
    let f = ScalarField::from_pairs(n, t.partition.interior().iter().map(|&x| (x, file.f.get(x).unwrap_or(0.0))))?;
    let deepest = t.depth.iter().copied().max().unwrap_or(0);
    let cap = a.depth_cap.unwrap_or(deepest);
    let sums = sup_path_sum(&t, &f, cap, DIVERGENCE_THRESHOLD)?;
    put(run, "F.csv", &write_field(Some(&t.partition), &sums.values))?;
    put_json(
        run,
        "divergence.json",
        &json!({
            "format": FORMAT_VERSION,
            "depth_cap": cap,
            "threshold": DIVERGENCE_THRESHOLD,
            "root_spread": t.m,
            "divergent": sums.divergent,
        }),
    )?;
    if let Some(&v) = sums.divergent.first() {
        return Ok(Status::Property(format!("sup-path-sum diverges at vertex {v}")));
    }
    let sol = if roots.len() == 1 {
        solve_single_root(&t, &f, file.g.get(roots[0]).unwrap_or(0.0), cap)?
    } else {
        let opts = SolverOptions::default().with_tol(a.tol).with_mode(a.mode.into());
        solve_bounded_boundary(&t, &f, &file.g, cap, &opts)?
    };
    put(run, "u.csv", &write_field(Some(&t.partition), &sol.u))?;
    Ok(Status::Success)
}

pub fn euclid(a: &EuclidArgs, run: &mut Run) -> Outcome {
    let domain = usage(specs::domain(&a.domain))?;
    let reference = usage(specs::profile(&a.r#ref))?;
    let g = match &a.g {
        Some(s) => usage(specs::profile(s))?,
        None => reference,
    };
    let eps = usage(specs::list_f64(&a.eps))?;
    let opts = SolverOptions::default()
        .with_tol(a.tol)
        .with_max_iter(a.max_iter)
        .with_mode(a.mode.into());
    let study = convergence_study(domain, g, reference, &eps, a.h_ratio, &opts)?;
    let mut table = String::from("# format: 1\neps,h,vertices,sup_error,iterations,residual,converged,failure\n");
    for r in &study.table.rows {
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{},{}",
            fmt_num(r.eps),
            fmt_num(r.h),
            r.vertices,
            r.sup_error.map(fmt_num).unwrap_or_default(),
            r.iterations,
            fmt_num(r.residual),
            r.converged,
            r.failure.as_deref().unwrap_or("").replace(',', ";"),
        );
    }
    put(run, "table.csv", &table)?;
    let mut envelope = Value::Null;
    if let Some(Some((eg, u))) = study.solutions.last() {
        let mut csv = String::from("# format: 1\nx,y,value\n");
        for (v, p) in eg.points.iter().enumerate() {
            if let Some(x) = u.get(v) {
                let _ = writeln!(csv, "{},{},{}", fmt_num(p[0]), fmt_num(p[1]), fmt_num(x));
            }
        }
        put(run, "solution.csv", &csv)?;
        let check = envelope_check(eg, &eg.sample(|p| reference.eval(p))?)?;
        let slack = 10.0 * eg.h;
        envelope = json!({
            "eps": eg.eps,
            "samples": check.samples,
            "upper_min": num(check.upper_min),
            "lower_max": num(check.lower_max),
            "slack": num(slack),
            "holds": check.upper_min >= -slack && check.lower_max <= slack,
        });
    }
    put_json(
        run,
        "report.json",
        &json!({
            "format": FORMAT_VERSION,
            "domain": domain,
            "g": g,
            "reference": reference,
            "strictly_decreasing": study.table.strictly_decreasing(),
            "envelope": envelope,
        }),
    )?;
    if let Some(r) = study.table.rows.iter().find(|r| !r.converged) {
        let why = r.failure.clone().unwrap_or_else(|| "iteration cap reached".into());
        return Ok(Status::Convergence(format!("ε = {}: {why}", r.eps)));
    }
    Ok(Status::Success)
}

pub fn export(a: &ExportArgs, run: &mut Run) -> Outcome {
    let fx = by_name(&a.name)?;
    let text = write_graph(&fx.graph, &fx.partition, fx.f.as_ref(), fx.g.as_ref(), fx.roots.as_deref());
    run.write_path(&a.out, &text).map_err(CliError::io(&a.out))?;
    if let Some(path) = &a.field {
        let u = fx
            .u
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("fixture `{}` has no field", a.name)))?;
        // Same dense numbering as the graph file.
        let universe = fx.partition.universe();
        let local = ScalarField::from_pairs(
            universe.len(),
            universe.iter().enumerate().filter_map(|(i, &v)| u.get(v).map(|x| (i, x))),
        )?;
        run.write_path(path, &write_field(None, &local)).map_err(CliError::io(path))?;
    }
    Ok(Status::Success)
}

fn absolute(p: &Path) -> PathBuf {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf())
}

/// Re-runs the recorded arguments with `--out` redirected and compares output digests.
pub fn replay(a: &ReplayArgs, _run: Run) -> i32 {
    let m = match RunManifest::read(&a.manifest) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("inflap replay: {e}");
            return 2;
        }
    };
    if m.subcommand == "replay" {
        eprintln!("inflap replay: cannot replay a replay");
        return 2;
    }
    let out_dir = absolute(&a.out);
    // `fixtures export` names a file; keep its name inside the new directory.
    let mut argv = m.argv.clone();
    let pos = argv.iter().position(|s| s == "--out");
    let new_out = match (&pos, m.subcommand.as_str()) {
        (Some(i), "fixtures export") => {
            let name = Path::new(&argv[i + 1]).file_name().map(PathBuf::from).unwrap_or_default();
            out_dir.join(name)
        }
        _ => out_dir.clone(),
    };
    match pos {
        Some(i) => argv[i + 1] = new_out.display().to_string(),
        None => argv.extend(["--out".to_string(), new_out.display().to_string()]),
    }
    let previous = std::env::current_dir().ok();
    if let Err(e) = std::env::set_current_dir(&m.cwd) {
        eprintln!("inflap replay: cannot enter {}: {e}", m.cwd);
        return 2;
    }
    let inputs: Vec<Value> = m
        .inputs
        .iter()
        .map(|d| {
            let now = std::fs::read(&d.path).ok().map(|b| digest(&b));
            json!({"path": d.path, "recorded": d.sha256, "current": now, "equal": now.as_deref() == Some(d.sha256.as_str())})
        })
        .collect();
    let code = crate::run(&argv);
    if let Some(dir) = previous {
        let _ = std::env::set_current_dir(dir);
    }
    let manifest_path = if m.subcommand == "fixtures export" {
        let mut name = new_out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        new_out.with_file_name(name)
    } else {
        out_dir.join("manifest.json")
    };
    let reproduced = RunManifest::read(&manifest_path).map(|r| r.outputs).unwrap_or_default();
    let outputs: Vec<Value> = m
        .outputs
        .iter()
        .map(|d| {
            let now = reproduced.iter().find(|r| r.path == d.path).map(|r| r.sha256.clone());
            json!({"path": d.path, "recorded": d.sha256, "reproduced": now, "equal": now.as_deref() == Some(d.sha256.as_str())})
        })
        .collect();
    let inputs_match = inputs.iter().all(|v| v["equal"] == json!(true));
    let outputs_match = outputs.iter().all(|v| v["equal"] == json!(true)) && reproduced.len() == m.outputs.len();
    let report = json!({
        "format": FORMAT_VERSION,
        "manifest": absolute(&a.manifest).display().to_string(),
        "recorded_exit_code": m.exit_code,
        "exit_code": code,
        "inputs_match": inputs_match,
        "outputs_match": outputs_match,
        "inputs": inputs,
        "outputs": outputs,
    });
    let text = serde_json::to_string_pretty(&report).expect("JSON values serialize") + "\n";
    if let Err(e) = std::fs::create_dir_all(&out_dir).and_then(|_| std::fs::write(out_dir.join("replay.json"), text)) {
        eprintln!("inflap replay: {e}");
        return 1;
    }
    if !inputs_match {
        eprintln!("inflap replay: inputs changed since the recorded run");
        return 2;
    }
    if !outputs_match || code != m.exit_code {
        eprintln!("inflap replay: outputs differ from the recorded run");
        return 4;
    }
    0
}
