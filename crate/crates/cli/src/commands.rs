use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lorentzian_core::cov2::{
    search_2cov_certificate, search_2cov_feasible, search_strong_certificate, search_submodular_extension,
    strong_implies_monotone_submodular, synth_2cov_indicator, synth_strong_from_parts, synth_strong_matroid,
    verify_2cov, verify_strong2cov, StrongPart,
};
use lorentzian_core::entropy::entropy_decomposition;
use lorentzian_core::io;
use lorentzian_core::lc::{
    certify_clc_homogeneous_with_cap, certify_clc_homogenization_with_cap, inertia, ulc_check, CertificationReport,
    Verdict, HOMOGENEOUS_CAP, HOMOGENIZATION_CAP,
};
use lorentzian_core::matroid::{Matroid, TableMode};
use lorentzian_core::poly::generating_poly;
use lorentzian_core::rational::int;
use lorentzian_core::setfn::{
    homogeneous_restrict, level_sequence, mobius_coverage_weights, predicates, BudgetAdditive, CoverageInstance,
    SetFunction,
};
use lorentzian_core::walk::{is_irreducible, mixing_time_exact, sample_chain, sample_chains, WalkInstance};
use lorentzian_core::{Error, Rational, Result, SetFunctionTable, Subset};
use serde_json::{json, Map, Value};

use crate::{Cli, Command, Mode, Source};

pub struct Outcome {
    pub code: u8,
    pub json: Value,
    pub text: String,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

struct Loaded {
    f: SetFunctionTable,
    matroid: Option<Matroid>,
    coverage: Option<CoverageInstance>,
    mode: Option<Mode>,
}

fn load(source: &Source, default_mode: Mode) -> Result<Loaded> {
    let given = [&source.input, &source.matroid, &source.coverage]
        .iter()
        .filter(|p| p.is_some())
        .count();
    if given != 1 {
        return Err(Error::Malformed(
            "give exactly one of --input, --matroid, --coverage".into(),
        ));
    }
    if source.mode.is_some() && source.matroid.is_none() {
        return Err(Error::Malformed("--mode applies only to --matroid".into()));
    }
    if let Some(p) = &source.input {
        return Ok(Loaded {
            f: io::parse_set_function(&read(p)?)?,
            matroid: None,
            coverage: None,
            mode: None,
        });
    }
    if let Some(p) = &source.matroid {
        let m = io::parse_matroid(&read(p)?)?;
        let mode = source.mode.unwrap_or(default_mode);
        let table = match mode {
            Mode::Rank => TableMode::Rank,
            Mode::Indicator => TableMode::Indicator,
        };
        return Ok(Loaded {
            f: m.to_setfunction(table)?,
            matroid: Some(m),
            coverage: None,
            mode: Some(mode),
        });
    }
    let p = source.coverage.as_ref().expect("one source given");
    let g = io::parse_coverage(&read(p)?)?;
    Ok(Loaded {
        f: g.materialize()?,
        matroid: None,
        coverage: Some(g),
        mode: None,
    })
}

fn r(v: &Rational) -> Value {
    io::rational_value(v)
}

fn seq(values: &[Rational]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn warn_cap(cap: Option<usize>, applies: bool) {
    match (cap, applies) {
        (Some(c), true) => eprintln!("warning: enumeration cap overridden to n <= {c}; work grows exponentially in n"),
        (Some(_), false) => eprintln!("warning: --cap has no effect on this command"),
        (None, _) => {}
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Certified | Verdict::Vacuous => 0,
        Verdict::Refuted => 1,
        Verdict::ConditionsFail => 2,
    }
}

fn report_outcome(command: &str, n: usize, d: Option<usize>, report: &CertificationReport) -> Outcome {
    let mut obj = match serde_json::to_value(report).expect("serializable") {
        Value::Object(o) => o,
        _ => unreachable!("struct serializes to an object"),
    };
    obj.insert("command".into(), json!(command));
    obj.insert("n".into(), json!(n));
    if let Some(d) = d {
        obj.insert("d".into(), json!(d));
    }
    obj.insert("note".into(), json!(report.note()));
    let verdict = obj["verdict"].as_str().unwrap_or_default().to_string();
    let mut text = format!("{command}: n = {n}");
    if let Some(d) = d {
        let _ = write!(text, ", d = {d}");
    }
    let _ = writeln!(text, "\nverdict: {verdict}\nchecks: {}", report.checks);
    if let Some(f) = &report.failure {
        let _ = writeln!(text, "failure: {f}");
    }
    let _ = writeln!(text, "note: {}", report.note());
    Outcome {
        code: verdict_code(report.verdict),
        json: Value::Object(obj),
        text,
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let cap = cli.cap;
    match cli.command {
        Command::CertifyClc { source, poly, d } => {
            warn_cap(cap, true);
            let (f, d) = match poly {
                Some(p) => {
                    if source.input.is_some() || source.matroid.is_some() || source.coverage.is_some() {
                        return Err(Error::Malformed("--poly excludes the other sources".into()));
                    }
                    let p = io::parse_polynomial(&read(&p)?)?;
                    if p.has_y() {
                        return Err(Error::Malformed("polynomial must be multiaffine in x only".into()));
                    }
                    let deg = p
                        .homogeneous_degree()
                        .ok_or_else(|| Error::Malformed("polynomial is not homogeneous".into()))?;
                    if d.is_some_and(|d| d != deg) {
                        return Err(Error::Malformed(format!(
                            "--d disagrees with the polynomial degree {deg}"
                        )));
                    }
                    let f = SetFunctionTable::from_fn(p.n(), |s| p.coefficient(0, s))?;
                    (f, deg)
                }
                None => {
                    let f = load(&source, Mode::Rank)?.f;
                    let d = d.unwrap_or_else(|| f.degree());
                    (f, d)
                }
            };
            let report = certify_clc_homogeneous_with_cap(&f, d, cap.unwrap_or(HOMOGENEOUS_CAP))?;
            Ok(report_outcome("certify-clc", f.n(), Some(d), &report))
        }
        Command::CertifyHom { source } => {
            warn_cap(cap, true);
            let f = load(&source, Mode::Rank)?.f;
            let report = certify_clc_homogenization_with_cap(&f, cap.unwrap_or(HOMOGENIZATION_CAP))?;
            let levels = level_sequence(&f);
            let ulc = ulc_check(&levels);
            let mut out = report_outcome("certify-hom", f.n(), None, &report);
            if let Value::Object(o) = &mut out.json {
                o.insert("levels".into(), levels.iter().map(r).collect());
                o.insert("ulc".into(), json!(ulc.holds));
            }
            let _ = writeln!(out.text, "levels: ({})\nulc: {}", seq(&levels), ulc.holds);
            Ok(out)
        }
        Command::Certify2Cov { source, d, cert } => {
            warn_cap(cap, false);
            let loaded = load(&source, Mode::Indicator)?;
            let f = &loaded.f;
            let (origin, result) = match (&cert, &loaded.matroid, loaded.mode) {
                (Some(p), _, _) => {
                    let c = io::parse_two_cov(&read(p)?, f.n())?;
                    let report = verify_2cov(f, d, &c)?;
                    let failure = report.violation.map(|v| (v.tau, v.detail));
                    ("verified", failure.map_or(Ok(c), Err))
                }
                (None, Some(m), Some(Mode::Indicator)) => ("synthesized", Ok(synth_2cov_indicator(m, d)?)),
                _ => ("searched", search_2cov_certificate(f, d)?),
            };
            let mut text = format!("certify-2cov: n = {}, d = {d}, certificate {origin}\n", f.n());
            let (code, json) = match result {
                Ok(c) => {
                    let _ = writeln!(text, "result: pass ({} witnesses)", c.witnesses.len());
                    (
                        0,
                        json!({"command": "certify-2cov", "d": d, "holds": true, "origin": origin,
                               "certificate": io::two_cov_json(&c)}),
                    )
                }
                Err((tau, detail)) => {
                    let _ = writeln!(text, "result: fail at tau={tau}: {detail}");
                    (
                        1,
                        json!({"command": "certify-2cov", "d": d, "holds": false, "origin": origin,
                               "failure": {"tau": tau, "detail": detail}}),
                    )
                }
            };
            Ok(Outcome { code, json, text })
        }
        Command::CertifyStrong { source, cert } => {
            warn_cap(cap, false);
            let loaded = load(&source, Mode::Rank)?;
            let f = &loaded.f;
            let (origin, result) = match (&cert, &loaded.matroid, loaded.mode, &loaded.coverage) {
                (Some(p), ..) => {
                    let c = io::parse_strong(&read(p)?)?;
                    let report = verify_strong2cov(f, &c)?;
                    (
                        "verified",
                        report.violation.map(|v| (v.tau, v.detail)).map_or(Ok(c), Err),
                    )
                }
                (None, Some(m), Some(Mode::Rank), _) => ("synthesized", Ok(synth_strong_matroid(m)?)),
                (None, _, _, Some(g)) => {
                    let part = StrongPart::Coverage {
                        instance: g,
                        coeff: int(1),
                    };
                    ("synthesized", Ok(synth_strong_from_parts(&[part])?.1))
                }
                _ => ("searched", search_strong_certificate(f)?),
            };
            let ms = strong_implies_monotone_submodular(f);
            let mut text = format!("certify-strong: n = {}, certificate {origin}\n", f.n());
            let (code, json) = match result {
                Ok(c) => {
                    let _ = writeln!(
                        text,
                        "result: pass ({} witnesses)\nmonotone and submodular: {ms}",
                        c.witnesses.len()
                    );
                    (
                        0,
                        json!({"command": "certify-strong", "holds": true, "origin": origin,
                               "monotone_submodular": ms, "certificate": io::strong_json(&c)}),
                    )
                }
                Err((tau, detail)) => {
                    let _ = writeln!(
                        text,
                        "result: fail at tau={tau}: {detail}\nmonotone and submodular: {ms}"
                    );
                    (
                        1,
                        json!({"command": "certify-strong", "holds": false, "origin": origin,
                               "monotone_submodular": ms, "failure": {"tau": tau, "detail": detail}}),
                    )
                }
            };
            Ok(Outcome { code, json, text })
        }
        Command::Mobius { source } => {
            warn_cap(cap, false);
            let f = load(&source, Mode::Rank)?.f;
            let m = mobius_coverage_weights(&f)?;
            let mut text = format!("mobius: n = {}\n", f.n());
            for (t, x) in &m.weights.weights {
                let _ = writeln!(text, "x{t} = {x}");
            }
            let _ = writeln!(text, "coverage: {}", m.is_coverage);
            let json = json!({
                "command": "mobius",
                "n": f.n(),
                "weights": io::coverage_weights_json(&m.weights),
                "is_coverage": m.is_coverage,
                "min_weight": m.min_weight.as_ref().map(r),
            });
            Ok(Outcome {
                code: if m.is_coverage { 0 } else { 1 },
                json,
                text,
            })
        }
        Command::Ulc { source } => {
            warn_cap(cap, false);
            let f = load(&source, Mode::Rank)?.f;
            let levels = level_sequence(&f);
            let u = ulc_check(&levels);
            let mut text = format!(
                "ulc: n = {}\nlevels: ({})\nultra log-concave: {}\n",
                f.n(),
                seq(&levels),
                u.holds
            );
            if let Some(k) = u.first_failure {
                let _ = writeln!(text, "first failing k: {k}");
            }
            let json = json!({
                "command": "ulc",
                "levels": levels.iter().map(r).collect::<Vec<_>>(),
                "holds": u.holds,
                "first_failure": u.first_failure,
            });
            Ok(Outcome {
                code: if u.holds { 0 } else { 1 },
                json,
                text,
            })
        }
        Command::Entropy { input } => {
            warn_cap(cap, false);
            let j = io::parse_joint(&read(&input)?)?;
            let dec = entropy_decomposition(&j)?;
            let mut text = format!("entropy: n = {}\n", dec.n);
            let mut weights = Map::new();
            for (t, x) in &dec.weights {
                let _ = writeln!(text, "x{t} = {x}");
                weights.insert(t.to_string(), json!(x));
            }
            let entropy: Map<String, Value> = (0..dec.entropy.len())
                .map(|m| (Subset(m as u32).to_string(), json!(dec.entropy[m])))
                .collect();
            let _ = writeln!(
                text,
                "max identity residual: {:e}\nmax deviation from Mobius weights: {:e}",
                dec.max_identity_residual, dec.max_mobius_deviation
            );
            if let Some((t, x)) = dec.min_weight {
                let _ = writeln!(text, "min weight: x{t} = {x}");
            }
            if let Some(note) = dec.note() {
                let _ = writeln!(text, "note: {note}");
            }
            let json = json!({
                "command": "entropy",
                "n": dec.n,
                "entropy": entropy,
                "weights": weights,
                "max_identity_residual": dec.max_identity_residual,
                "max_mobius_deviation": dec.max_mobius_deviation,
                "min_weight": dec.min_weight.map(|(t, x)| json!({"set": t, "value": x})),
                "negative_weight": dec.negative_weight,
                "note": dec.note(),
            });
            Ok(Outcome {
                code: if dec.identity_holds() { 0 } else { 1 },
                json,
                text,
            })
        }
        Command::Sample {
            source,
            d,
            steps,
            seed,
            start,
            chains,
        } => {
            warn_cap(cap, false);
            let f = load(&source, Mode::Rank)?.f;
            let w = WalkInstance::new(&f, d)?;
            let start = match start {
                Some(s) => parse_start(&s, f.n())?,
                None => w.support()[0],
            };
            let samples = if chains <= 1 {
                vec![sample_chain(&w, start, steps, seed)?]
            } else {
                sample_chains(&w, &vec![start; chains], steps, seed)?
            };
            let mut text = format!("sample: n = {}, d = {d}, steps = {steps}, seed = {seed}\n", f.n());
            let mut reports = Vec::new();
            for (k, s) in samples.iter().enumerate() {
                let tv = s.tv_to_stationary(&w);
                let _ = writeln!(
                    text,
                    "chain {k}: start {} -> final {}, empirical TV to stationary {tv:.6}",
                    s.start, s.final_state
                );
                let hist: Map<String, Value> = s.histogram.iter().map(|(t, c)| (t.to_string(), json!(c))).collect();
                reports.push(json!({
                    "start": s.start,
                    "final": s.final_state,
                    "histogram": hist,
                    "tv_to_stationary": if tv.is_nan() { Value::Null } else { json!(tv) },
                }));
            }
            let json = json!({"command": "sample", "seed": seed, "d": d, "steps": steps, "rng": "ChaCha20", "chains": reports});
            Ok(Outcome { code: 0, json, text })
        }
        Command::Mix { source, d, epsilon } => {
            warn_cap(cap, false);
            let f = load(&source, Mode::Rank)?.f;
            let w = WalkInstance::new(&f, d)?;
            let irreducible = is_irreducible(&w);
            match mixing_time_exact(&w, epsilon) {
                Ok(rep) => {
                    let text = format!(
                        "mix: n = {}, d = {d}, states = {}, epsilon = {epsilon}\nirreducible: {irreducible}\nt_mix: {}\nratio t_mix / (d ln(d/epsilon)): {:.6}\nexact steps: {}\nTV nonincreasing: {}\n",
                        f.n(),
                        w.support().len(),
                        rep.t_mix,
                        rep.ratio,
                        rep.exact_steps,
                        rep.monotone
                    );
                    let json = json!({
                        "command": "mix",
                        "d": d,
                        "epsilon": epsilon,
                        "states": w.support().len(),
                        "irreducible": irreducible,
                        "t_mix": rep.t_mix,
                        "ratio": rep.ratio,
                        "exact_steps": rep.exact_steps,
                        "monotone": rep.monotone,
                        "tv_curve": rep.tv_curve,
                    });
                    Ok(Outcome { code: 0, json, text })
                }
                Err(Error::NoConvergence(t)) => Ok(Outcome {
                    code: 1,
                    json: json!({"command": "mix", "d": d, "epsilon": epsilon, "irreducible": irreducible,
                                 "converged": false, "steps": t}),
                    text: format!("mix: no convergence within {t} steps (irreducible: {irreducible})\n"),
                }),
                Err(e) => Err(e),
            }
        }
        Command::Counterexamples => {
            warn_cap(cap, false);
            counterexamples()
        }
    }
}

fn parse_start(s: &str, n: usize) -> Result<Subset> {
    let labels = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("start element {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Subset::from_labels(&labels, n).ok_or_else(|| Error::Parse(format!("start set {s} outside 1..={n}")))
}

/// Budget-additive `min(Σ w, 2)` on 12 elements, weights six 1s, four 2s, two 0s.
pub fn counterexample_a() -> Result<SetFunctionTable> {
    let w = [1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 0, 0].map(int).to_vec();
    BudgetAdditive::new(w, int(2))?.materialize()
}

/// Pair coefficients of `3 x1 x2 + x1 x3 + x2 x3`.
pub fn counterexample_b() -> Result<SetFunctionTable> {
    SetFunctionTable::from_fn(3, |s| match s.bits() {
        0b011 => int(3),
        0b101 | 0b110 => int(1),
        _ => int(0),
    })
}

fn counterexamples() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut all = true;
    let mut record = |name: &str, ok: bool, detail: String| {
        all &= ok;
        lines.push((name.to_string(), ok, detail));
    };

    let a = counterexample_a()?;
    let pa = predicates(&a);
    record(
        "A: budget-additive f is monotone and submodular",
        pa.monotone.holds && pa.submodular.holds,
        format!("monotone = {}, submodular = {}", pa.monotone.holds, pa.submodular.holds),
    );
    let rep = certify_clc_homogeneous_with_cap(&a, 2, HOMOGENEOUS_CAP)?;
    let n_pos = rep.failure.as_ref().and_then(|f| f.n_pos);
    record(
        "A: f^(2) is not log-concave",
        rep.verdict == Verdict::Refuted && n_pos == Some(2),
        rep.failure.map_or_else(|| "no failure".into(), |f| f.to_string()),
    );

    let b = counterexample_b()?;
    let h = generating_poly(&homogeneous_restrict(&b, 2)).quadratic_hessian()?;
    let i = inertia(&h)?;
    record(
        "B: p is log-concave",
        (i.n_pos, i.n_zero, i.n_neg) == (1, 0, 2),
        format!("inertia ({},{},{})", i.n_pos, i.n_zero, i.n_neg),
    );
    let s = search_2cov_feasible(&b, 2, Subset::EMPTY)?;
    record("B: f_p is not 2-coverage", !s.is_feasible(), describe_search(&s));
    let e = search_submodular_extension(&b, 2)?;
    record(
        "B: f_p has no monotone submodular extension",
        !e.is_feasible(),
        describe_search(&e),
    );

    let mut text = String::new();
    for (name, ok, detail) in &lines {
        let _ = writeln!(text, "{} {name}: {detail}", if *ok { "PASS" } else { "FAIL" });
    }
    let _ = writeln!(text, "{}", if all { "PASS" } else { "FAIL" });
    let checks: Vec<Value> = lines
        .iter()
        .map(|(name, ok, detail)| json!({"check": name, "pass": ok, "detail": detail}))
        .collect();
    Ok(Outcome {
        code: if all { 0 } else { 1 },
        json: json!({"command": "counterexamples", "pass": all, "checks": checks}),
        text,
    })
}

fn describe_search<W>(s: &lorentzian_core::cov2::Search<W>) -> String {
    match s {
        lorentzian_core::cov2::Search::Feasible(_) => "feasible".into(),
        lorentzian_core::cov2::Search::Infeasible { detail, .. } => format!("infeasible, {detail}"),
    }
}
