use std::collections::BTreeMap;
use std::fs;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use pircon_core::coxeter::{
    full_interval_check, nof_check, spm_twisted, CoxeterSpec, CoxeterSystem, CoxeterType, DiagramAutomorphism,
    TwistedSets,
};
use pircon_core::poset::{is_isomorphic, PosetJson};
use pircon_core::quasiparabolic::{
    expression_independence, minimal_coset_representatives, parabolic_quotient, qp_bruhat, qp_lifting_check,
    spm_qp, twisted_conjugation_set, verify_quasiparabolic, w_minimal_elements, QpViolation,
};
use pircon_core::simplicial::{
    classify_ball_or_sphere, collapse_to_void, morse_matching_mu, reduced_homology, verify_acyclic, Classification,
    SimplicialComplex,
};
use pircon_core::spm::{
    certify_with, find_spms, is_pircon, is_zircon, verify_spm, CertifyMode, PirconCertificate, Spm, SpmSearch,
};
use pircon_core::transform::{convert_sequence, verify_certificate as check_certificate, ConvertCertificate};
use pircon_core::FinitePoset;

use crate::input::{build_group, check_size, coxeter_subset, read_coxeter, read_poset, source_inputs};
use crate::{
    CertifyArgs, ConvertArgs, GlobalOpts, Mode, NofArgs, PosetArg, QpArgs, Report, SourceArgs, Subset, VerifyArgs,
};

/// Twisted context of a poset built from a Coxeter group: poset index `i` is `elements[i]`.
struct Twisted<'a, 'g> {
    sets: &'a TwistedSets<'g>,
    elements: &'a [usize],
    subset: Subset,
}

fn with_source<R>(
    g: &GlobalOpts,
    a: &SourceArgs,
    f: impl FnOnce(&FinitePoset, Option<Twisted<'_, '_>>) -> Result<R>,
) -> Result<R> {
    if let Some(path) = &a.poset {
        let p = read_poset(path, g.max_elements)?;
        return f(&p, None);
    }
    let spec = read_coxeter(a.coxeter.as_deref().expect("clap requires a source"))?;
    let (group, theta) = build_group(g, &spec)?;
    let sets = TwistedSets::new(&group, &theta)?;
    let elements = coxeter_subset(&group, &sets, a.subset, a.below.as_deref())?;
    let p = group.bruhat_poset(&elements);
    check_size(&p, g.max_elements)?;
    f(
        &p,
        Some(Twisted {
            sets: &sets,
            elements: &elements,
            subset: a.subset,
        }),
    )
}

fn poset_value(p: &FinitePoset) -> Value {
    serde_json::from_str::<PosetJson>(&p.to_json())
        .map(|j| serde_json::to_value(j).expect("poset serializes"))
        .expect("poset JSON round-trips")
}

fn class_name(c: Classification) -> &'static str {
    match c {
        Classification::BallLike => "BallLike",
        Classification::SphereLike => "SphereLike",
        Classification::Neither => "Neither",
    }
}

pub fn classify_intervals(g: &GlobalOpts, a: &SourceArgs) -> Result<Report> {
    let mut report = Report::new("classify-intervals", source_inputs(a));
    with_source(g, a, |p, twisted| {
        let iota = twisted.as_ref().filter(|t| t.subset == Subset::Iota);
        let items: Vec<Value> = (0..p.len())
            .into_par_iter()
            .map(|u| {
                p.up_set(u)
                    .ones()
                    .filter(|&w| w != u)
                    .map(|w| {
                        let open = p.open_interval(u, w).expect("u < w").to_poset();
                        let k = SimplicialComplex::order_complex(&open);
                        let class = classify_ball_or_sphere(&k, None);
                        let mut item = json!({
                            "lower": p.id(u),
                            "upper": p.id(w),
                            "dim": k.dim().unwrap_or(-1),
                            "class": class_name(class),
                        });
                        if let Some(t) = iota {
                            item["full"] = json!(full_interval_check(t.sets, t.elements[u], t.elements[w]));
                        }
                        item
                    })
                    .collect::<Vec<_>>()
            })
            .flatten()
            .collect();

        let count = |name: &str| items.iter().filter(|i| i["class"] == name).count();
        let neither = count("Neither");
        let pircon = if neither > 0 {
            Some(is_pircon(p, g.max_elements)?.certified())
        } else {
            None
        };
        let full_mismatches: Vec<&Value> = items
            .iter()
            .filter(|i| i.get("full").is_some_and(|f| f.as_bool() != Some(i["class"] == "SphereLike")))
            .collect();
        report.summary = json!({
            "elements": p.len(),
            "intervals": items.len(),
            "ball_like": count("BallLike"),
            "sphere_like": count("SphereLike"),
            "neither": neither,
            "pircon": pircon,
            "sphere_iff_full_mismatches": if iota.is_some() { json!(full_mismatches.len()) } else { Value::Null },
        });
        report.ok = pircon != Some(true) && full_mismatches.is_empty();
        report.items = items;
        Ok(())
    })?;
    Ok(report)
}

fn certificate_items(cert: &PirconCertificate) -> Vec<Value> {
    let mut items: Vec<(String, Value)> = cert
        .ideals
        .iter()
        .map(|c| {
            (
                c.ideal_top.clone(),
                json!({"ideal_top": c.ideal_top, "status": "certified", "fixed_points": c.fixed_points, "reason": ""}),
            )
        })
        .chain(cert.failures.iter().map(|f| {
            (
                f.ideal_top.clone(),
                json!({"ideal_top": f.ideal_top, "status": "failed", "fixed_points": [], "reason": f.reason}),
            )
        }))
        .collect();
    items.sort_by(|a, b| a.0.cmp(&b.0));
    items.into_iter().map(|(_, v)| v).collect()
}

pub fn certify(g: &GlobalOpts, a: &CertifyArgs) -> Result<Report> {
    let mut inputs = source_inputs(&a.source);
    inputs["mode"] = json!(format!("{:?}", a.mode).to_lowercase());
    inputs["twisted"] = json!(a.twisted);
    let mut report = Report::new("certify", inputs);
    let mode = match a.mode {
        Mode::Pircon => CertifyMode::Pircon,
        Mode::Zircon => CertifyMode::Zircon,
    };
    with_source(g, &a.source, |p, twisted| {
        let cert = if a.twisted {
            let Some(t) = twisted.filter(|t| t.subset == Subset::Iota) else {
                bail!("--twisted needs --coxeter with --subset iota");
            };
            let group = t.sets.group();
            certify_with(p, mode, |y, ideal| {
                let top = t.elements[y];
                let s = (0..group.rank())
                    .find(|&s| group.has_right_descent(top, s))
                    .ok_or("no right descent")?;
                let (q, _, m) = spm_twisted(t.sets, top, s).map_err(|e| e.to_string())?;
                Spm::from_ids(ideal, &m.to_ids(&q)).map_err(|e| e.to_string())
            })
        } else {
            match mode {
                CertifyMode::Pircon => is_pircon(p, g.max_elements)?,
                CertifyMode::Zircon => is_zircon(p, g.max_elements)?,
            }
        };
        let reverified = cert.verify(p);
        report.summary = json!({
            "elements": p.len(),
            "certified": cert.certified(),
            "reverified": reverified.is_ok(),
            "reverify_error": reverified.as_ref().err(),
            "ideals_certified": cert.ideals.len(),
            "ideals_failed": cert.failures.len(),
            "certificate": cert,
        });
        report.ok = cert.certified() && reverified.is_ok();
        report.items = certificate_items(&cert);
        Ok(())
    })?;
    Ok(report)
}

pub fn convert(g: &GlobalOpts, a: &ConvertArgs) -> Result<Report> {
    let mut report = Report::new(
        "convert",
        json!({"poset": a.poset.display().to_string(), "spm": a.spm.display().to_string()}),
    );
    let p = read_poset(&a.poset, g.max_elements)?;
    let text = fs::read_to_string(&a.spm).with_context(|| format!("reading {}", a.spm.display()))?;
    let pairs: BTreeMap<String, String> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", a.spm.display()))?;
    let m = Spm::from_ids(&p, &pairs)?;
    let verdict = verify_spm(&p, &m)?;
    if !verdict.is_valid() {
        report.ok = false;
        report.summary = json!({"valid_spm": false, "violations": verdict.violations});
        return Ok(report);
    }
    match convert_sequence(&p, &m, g.max_elements) {
        Ok(cert) => {
            let audit = check_certificate(&cert);
            report.ok = audit.is_ok();
            report.items = cert
                .steps
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let mut v = serde_json::to_value(s).expect("step serializes");
                    v["step"] = json!(i + 1);
                    v
                })
                .collect();
            report.summary = json!({
                "valid_spm": true,
                "fixed_points": verdict.fixed_points,
                "zippings": cert.zippings(),
                "removals": cert.removals(),
                "audit": audit.err().unwrap_or_else(|| "passed".to_string()),
                "certificate": cert,
            });
        }
        Err(e) => {
            report.ok = false;
            report.summary = json!({"valid_spm": true, "error": e.to_string()});
        }
    }
    Ok(report)
}

pub fn verify_certificate(a: &VerifyArgs) -> Result<Report> {
    let mut report = Report::new("verify-certificate", json!({"certificate": a.certificate.display().to_string()}));
    let text = fs::read_to_string(&a.certificate).with_context(|| format!("reading {}", a.certificate.display()))?;
    let value: Value = serde_json::from_str(&text).context("parsing certificate")?;
    let inner = value.pointer("/summary/certificate").cloned().unwrap_or(value);
    let cert: ConvertCertificate = serde_json::from_value(inner).context("reading conversion certificate")?;
    let result = check_certificate(&cert);
    report.ok = result.is_ok();
    report.summary = json!({
        "valid": result.is_ok(),
        "error": result.err(),
        "steps": cert.steps.len(),
        "zippings": cert.zippings(),
        "removals": cert.removals(),
    });
    Ok(report)
}

fn check(items: &mut Vec<Value>, name: &str, expected: Value, observed: Value) {
    let pass = expected == observed;
    items.push(json!({"check": name, "expected": expected, "observed": observed, "pass": pass}));
}

pub fn counterexample_a4(g: &GlobalOpts) -> Result<Report> {
    let mut report = Report::new(
        "counterexample-a4",
        json!({"group": "A4", "theta": "s1<->s4, s2<->s3", "w": "s2s1s3s2s4s3"}),
    );
    let group = CoxeterSystem::build(CoxeterType::A(4), g.max_group_order)?;
    let flip = DiagramAutomorphism::flip(&group)?;
    let sets = TwistedSets::new(&group, &flip)?;
    let top = group.parse("s2s1s3s2s4s3")?;
    let removed = group.parse("s2s3s2")?;
    let mut items = Vec::new();

    let nof = nof_check(&group, &flip);
    check(&mut items, "nof_holds", json!(false), json!(nof.holds));
    check(
        &mut items,
        "nof_witness",
        json!({"s": "s2", "theta_s": "s3", "order": 3}),
        json!(nof.witness().map(|e| json!({"s": e.s, "theta_s": e.theta_s, "order": e.order}))),
    );
    check(&mut items, "w_is_twisted_identity", json!(true), json!(sets.is_identity(top)));

    let cube = FinitePoset::from_relation((0..8).map(|i| format!("{i:03b}")).collect(), |i, j| i & j == i)?;
    let involutions = group.bruhat_poset(&sets.involution_ideal(top));
    check(&mut items, "involution_ideal_size", json!(8), json!(involutions.len()));
    check(
        &mut items,
        "involution_ideal_is_boolean_rank_3",
        json!(true),
        json!(is_isomorphic(&involutions, &cube, g.max_elements)?.is_some()),
    );

    let ideal_elements = sets.identity_ideal(top);
    let ideal = group.bruhat_poset(&ideal_elements);
    let cube_minus = cube.without(&[cube.index_of("011").expect("rank-2 element")]);
    check(&mut items, "identity_ideal_size", json!(7), json!(ideal.len()));
    check(&mut items, "identity_ideal_misses_s2s3s2", json!(true), json!(!ideal_elements.contains(&removed)));
    check(
        &mut items,
        "identity_ideal_is_boolean_minus_rank_2_element",
        json!(true),
        json!(is_isomorphic(&ideal, &cube_minus, g.max_elements)?.is_some()),
    );

    let found = find_spms(&ideal, &SpmSearch::all(g.max_elements))?;
    check(&mut items, "spms_found", json!(0), json!(found.len()));

    let mut candidates = Vec::new();
    for s in (0..group.rank()).filter(|&s| group.has_right_descent(top, s)) {
        let outcome = match spm_twisted(&sets, top, s) {
            Ok((p, _, m)) => {
                let v = verify_spm(&p, &m)?;
                json!({"s": group.generator_name(s), "valid": v.is_valid(), "violations": v.violations})
            }
            Err(e) => json!({"s": group.generator_name(s), "valid": false, "error": e.to_string()}),
        };
        candidates.push(outcome);
    }
    let any_valid = candidates.iter().any(|c| c["valid"] == true);
    check(&mut items, "twisted_candidate_valid", json!(false), json!(any_valid));

    let cert = is_pircon(&ideal, g.max_elements)?;
    check(&mut items, "ideal_is_pircon", json!(false), json!(cert.certified()));

    report.ok = items.iter().all(|i| i["pass"] == true);
    report.summary = json!({
        "identity_ideal": poset_value(&ideal),
        "twisted_candidates": candidates,
        "failure_certificate": cert,
    });
    report.items = items;
    Ok(report)
}

pub fn collapse_demo(g: &GlobalOpts, a: &PosetArg) -> Result<Report> {
    let mut report = Report::new("collapse-demo", json!({"poset": a.poset.display().to_string()}));
    let p = read_poset(&a.poset, g.max_elements)?;
    let mu = morse_matching_mu(&p)?;
    check_size(&mu.q, g.max_elements)?;
    let complete = mu.matching.is_complete(&mu.complex);
    let acyclic = verify_acyclic(&mu.complex, &mu.matching);
    let collapses = collapse_to_void(&mu.complex, &mu.matching);
    let trivial = reduced_homology(&mu.complex).is_trivial();
    report.items = match &collapses {
        Ok(steps) => steps
            .iter()
            .enumerate()
            .map(|(i, c)| {
                json!({
                    "step": i + 1,
                    "face": mu.complex.face_ids(&c.face),
                    "coface": mu.complex.face_ids(&c.coface),
                })
            })
            .collect(),
        Err(_) => Vec::new(),
    };
    report.ok = complete && acyclic && collapses.is_ok() && trivial;
    report.summary = json!({
        "q": mu.q.ids(),
        "faces": mu.complex.num_faces(),
        "matched_pairs": mu.matching.len(),
        "complete": complete,
        "acyclic": acyclic,
        "collapsed_to_void": collapses.is_ok(),
        "collapse_error": collapses.err().map(|e| e.to_string()),
        "reduced_homology_trivial": trivial,
    });
    Ok(report)
}

fn parse_parabolic(group: &CoxeterSystem, text: &str) -> Result<Vec<usize>> {
    let mut j = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| group.generator_index(s))
        .collect::<Result<Vec<_>, _>>()?;
    j.sort_unstable();
    j.dedup();
    Ok(j)
}

pub fn qp(g: &GlobalOpts, a: &QpArgs) -> Result<Report> {
    let mut report = Report::new("qp", json!({"coxeter": a.coxeter, "j": a.j, "exhaustive": a.exhaustive}));
    let spec = read_coxeter(&a.coxeter)?;
    let (group, _) = build_group(g, &spec)?;
    let j = parse_parabolic(&group, &a.j)?;
    let x = parabolic_quotient(&group, &j)?;
    if x.len() > g.max_elements {
        bail!("quotient has {} elements, above the limit {}", x.len(), g.max_elements);
    }
    let verdict = verify_quasiparabolic(&group, &x)?;
    let minima = w_minimal_elements(&x)?;
    let br = qp_bruhat(&x, minima[0])?;

    let reps = minimal_coset_representatives(&group, &j);
    let induced = group.bruhat_poset(&reps);
    let agrees = induced.ids() == br.poset.ids()
        && (0..reps.len()).all(|u| (0..reps.len()).all(|v| induced.leq(u, v) == br.poset.leq(u, v)));

    let independence = if x.len() <= 12 || a.exhaustive {
        Some(expression_independence(&x, br.base)?)
    } else {
        None
    };
    let lifting = qp_lifting_check(&x, &br.elements, &br.poset);

    let mut matchings = BTreeMap::new();
    let cert = certify_with(&br.poset, CertifyMode::Pircon, |y, ideal| {
        let z = br.elements[y];
        let outcome = spm_qp(&x, &br, z, &br.expressions[y]);
        let result = outcome
            .map_err(|e| e.to_string())
            .and_then(|(q, _, m)| Spm::from_ids(ideal, &m.to_ids(&q)).map_err(|e| e.to_string()));
        matchings.insert(y, result.as_ref().err().cloned());
        result
    });

    let classes: Vec<Classification> = (0..br.poset.len())
        .into_par_iter()
        .map(|u| {
            br.poset
                .up_set(u)
                .ones()
                .filter(|&w| w != u)
                .map(|w| {
                    let open = br.poset.open_interval(u, w).expect("u < w").to_poset();
                    classify_ball_or_sphere(&SimplicialComplex::order_complex(&open), None)
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    let count = |c: Classification| classes.iter().filter(|&&k| k == c).count();

    report.items = br
        .elements
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let expression: Vec<String> = br.expressions[i].iter().map(|&s| group.generator_name(s)).collect();
            let matching = match matchings.get(&i) {
                None => "minimum".to_string(),
                Some(None) => "verified".to_string(),
                Some(Some(err)) => err.clone(),
            };
            json!({"element": x.label(e), "height": x.height(e), "expression": expression.join(""), "matching": matching})
        })
        .collect();
    let independent = independence.as_ref().map(|d| d.is_empty());
    report.ok = verdict.is_quasiparabolic()
        && agrees
        && independent != Some(false)
        && lifting.is_empty()
        && cert.certified()
        && count(Classification::Neither) == 0;
    report.summary = json!({
        "group": group.kind().to_string(),
        "j": j.iter().map(|&s| group.generator_name(s)).collect::<Vec<_>>(),
        "elements": x.len(),
        "quasiparabolic": verdict.is_quasiparabolic(),
        "qp_violations": verdict.violations,
        "w_minimal": minima.iter().map(|&m| x.label(m)).collect::<Vec<_>>(),
        "matches_induced_bruhat_order": agrees,
        "expression_independent": independent,
        "expression_dependences": independence,
        "lifting_violations": lifting,
        "pircon": cert.certified(),
        "ball_like": count(Classification::BallLike),
        "sphere_like": count(Classification::SphereLike),
        "neither": count(Classification::Neither),
        "bruhat_order": poset_value(&br.poset),
    });
    Ok(report)
}

fn spec(kind: &str, rank: usize, m: Option<usize>, swaps: &[(usize, usize)]) -> CoxeterSpec {
    let mut theta = BTreeMap::new();
    for &(a, b) in swaps {
        theta.insert(format!("s{a}"), format!("s{b}"));
        theta.insert(format!("s{b}"), format!("s{a}"));
    }
    CoxeterSpec {
        kind: kind.to_string(),
        rank,
        m,
        theta: Some(theta),
    }
}

fn default_nof_instances() -> Vec<CoxeterSpec> {
    let mut out: Vec<CoxeterSpec> = (2..=5)
        .map(|n| spec("A", n, None, &(1..=n / 2).map(|i| (i, n + 1 - i)).collect::<Vec<_>>()))
        .collect();
    out.push(spec("B", 2, None, &[(1, 2)]));
    out.push(spec("D", 4, None, &[(1, 2)]));
    out.extend((3..=8).map(|m| spec("I2", 2, Some(m), &[(1, 2)])));
    out
}

fn first_violation(v: &[QpViolation]) -> Value {
    v.first().map_or(Value::Null, |x| json!(x))
}

pub fn nof_experiment(g: &GlobalOpts, a: &NofArgs) -> Result<Report> {
    let instances = match &a.coxeter {
        Some(arg) => {
            let s = read_coxeter(arg)?;
            if s.theta.is_none() {
                bail!("the Coxeter JSON needs a \"theta\"");
            }
            vec![s]
        }
        None => default_nof_instances(),
    };
    let mut report = Report::new("nof-experiment", json!({"coxeter": a.coxeter, "instances": instances.len()}));
    let items = instances
        .par_iter()
        .map(|s| -> Result<Value> {
            let (group, theta) = build_group(g, s)?;
            let sets = TwistedSets::new(&group, &theta)?;
            let nof = nof_check(&group, &theta);
            let mut item = json!({
                "group": group.kind().to_string(),
                "theta": theta.to_names(&group),
                "nof": nof.holds,
                "nof_witness": nof.witness(),
                "identities": sets.identities().len(),
                "heights_valid": true,
                "quasiparabolic": Value::Null,
                "qp1_violations": Value::Null,
                "qp2_violations": Value::Null,
                "first_violation": Value::Null,
                "note": "",
            });
            match twisted_conjugation_set(&sets) {
                Ok(x) => {
                    let v = verify_quasiparabolic(&group, &x)?;
                    let qp1 = v.violations.iter().filter(|v| matches!(v, QpViolation::Qp1 { .. })).count();
                    item["quasiparabolic"] = json!(v.is_quasiparabolic());
                    item["qp1_violations"] = json!(qp1);
                    item["qp2_violations"] = json!(v.violations.len() - qp1);
                    item["first_violation"] = first_violation(&v.violations);
                }
                Err(e) => {
                    item["heights_valid"] = json!(false);
                    item["note"] = json!(e.to_string());
                }
            }
            Ok(item)
        })
        .collect::<Result<Vec<_>>>()?;
    let nof_and_qp = items.iter().filter(|i| i["nof"] == true && i["quasiparabolic"] == true).count();
    let nof_not_qp = items.iter().filter(|i| i["nof"] == true && i["quasiparabolic"] != true).count();
    report.summary = json!({
        "instances": items.len(),
        "nof_and_quasiparabolic": nof_and_qp,
        "nof_but_not_quasiparabolic": nof_not_qp,
        "note": "evidence only; nothing is asserted",
    });
    report.items = items;
    Ok(report)
}
