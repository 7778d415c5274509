//! Machine-readable reports and chamber-graph export.
//!
//! Rationals are written as `"p/q"` strings; integers as JSON numbers when
//! they fit in 64 bits and as decimal strings otherwise.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::git::{completeness_and_properness, rank_k0, secondary_fan, stacky_fan_at, GitProblem, SecondaryFan, StackyFan};
use crate::glsm::{
    build_ci_glsm, cy_classification, is_geometric, kuznetsov_chambers, projection_check, total_space_fan,
    KuznetsovData,
};
use crate::lattice::rational::{format_rational, Rational};
use crate::problem::ProblemFile;
use crate::visitor::{build_visitor_glsm, visitor_sod, VisitorBlock};
use crate::wallcross::{
    assemble_sod_with, independence_audit, Block, Side, SodLedger, SodOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Gkz,
    Kuznetsov,
    Sod(Side),
    Ci,
    Cy,
    Visitor,
    Audit,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gkz => "gkz",
            Command::Kuznetsov => "kuznetsov",
            Command::Sod(_) => "sod",
            Command::Ci => "ci",
            Command::Cy => "cy",
            Command::Visitor => "visitor",
            Command::Audit => "audit",
        }
    }
}

pub fn int(x: &BigInt) -> Value {
    x.to_i64().map_or_else(|| Value::String(x.to_string()), |v| json!(v))
}

pub fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn rat(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

pub fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

fn fmt_ints(v: &[BigInt]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn input_echo(p: &ProblemFile) -> Value {
    json!({
        "free_rank": p.free_rank,
        "torsion": ints(&p.torsion),
        "coordinates": p.coordinates.iter().map(|c| {
            let mut o = json!({"name": c.name, "weight": ints(&c.weight), "torsion": ints(&c.torsion)});
            if let Some(chi) = &c.chi {
                o["chi"] = int(chi);
            }
            o
        }).collect::<Vec<_>>(),
        "theta": p.theta.as_ref().map(|t| rats(t)),
    })
}

fn fan_summary(fan: &SecondaryFan) -> Value {
    json!({
        "chamber_count": fan.chambers().len(),
        "wall_count": fan.walls().len(),
        "chambers": fan.chambers().iter().enumerate().map(|(i, c)| json!({
            "id": i,
            "rays": c.cone.rays().iter().map(|r| ints(r)).collect::<Vec<_>>(),
            "lineality": c.cone.lineality().iter().map(|r| ints(r)).collect::<Vec<_>>(),
            "facets": c.cone.facets().iter().map(|r| ints(r)).collect::<Vec<_>>(),
            "interior_point": rats(&c.interior_point),
        })).collect::<Vec<_>>(),
        "walls": fan.walls().iter().enumerate().map(|(i, w)| json!({
            "id": i,
            "chambers": [w.chambers.0, w.chambers.1],
            "normal": ints(&w.normal),
        })).collect::<Vec<_>>(),
    })
}

pub fn stacky_fan_json(sf: &StackyFan) -> Value {
    let report = completeness_and_properness(sf);
    json!({
        "lattice_rank": sf.lattice_rank,
        "rays": sf.ray_names.iter().zip(&sf.rays).map(|(n, r)| json!({"name": n, "vector": ints(r)})).collect::<Vec<_>>(),
        "cones": sf.cones.iter().map(|c| c.iter().map(|&i| sf.ray_names[i].clone()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "multiplicities": ints(&sf.multiplicities),
        "generic_stabilizer": int(&sf.generic_stabilizer),
        "complete": report.complete,
        "simplicial": report.simplicial,
        "rank_k0": rank_k0(sf).ok().map(|r| int(&r)),
    })
}

fn kuznetsov_json(kd: &KuznetsovData) -> Value {
    json!({
        "theta_k": ints(&kd.canonical.theta_k.free),
        "theta_anti_k": ints(&kd.canonical.theta_anti_k.free),
        "geometric_chamber": kd.geometric_chamber,
        "kuznetsov_chambers": kd.k.chambers,
        "theta_k_plus_epsilon": kd.k.perturbed.iter().map(|x| rats(x)).collect::<Vec<_>>(),
        "anti_kuznetsov_chambers": kd.anti_k.chambers,
        "theta_anti_k_plus_epsilon": kd.anti_k.perturbed.iter().map(|x| rats(x)).collect::<Vec<_>>(),
    })
}

pub fn ledger_json(ledger: &SodLedger, kernel: &GitProblem) -> Value {
    let names = kernel.names();
    let plan = &ledger.plan;
    let blocks: Vec<Value> = ledger
        .blocks
        .iter()
        .map(|b| match b {
            Block::Residual(r) => json!({
                "kind": "residual",
                "label": r.label,
                "chamber": r.chamber,
                "euler_characteristic": r.euler_characteristic.as_ref().map(rat),
                "cy_labels": r.cy_labels.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
                "q": r.q.as_ref().map(rat),
            }),
            Block::Exceptional { count, wall, r, wall_rank } => json!({
                "kind": "exceptional",
                "count": int(count),
                "wall": wall,
                "r": int(r),
                "wall_rank": int(wall_rank),
            }),
            Block::StackBlock { wall, r, wall_stack, reasons } => json!({
                "kind": "stack",
                "wall": wall,
                "r": int(r),
                "wall_stack": wall_stack,
                "reasons": reasons,
            }),
        })
        .collect();
    json!({
        "side": ledger.side.as_str(),
        "ambient": ledger.ambient,
        "ambient_euler_characteristic": ledger.ambient_euler_characteristic.as_ref().map(rat),
        "path": {
            "source": plan.source,
            "target_chamber": plan.target_chamber,
            "start": rats(&plan.start),
            "target": rats(&plan.target),
            "seed": plan.seed,
            "attempt": plan.attempt,
            "crossings": plan.crossings.iter().map(|c| json!({
                "wall": c.wall, "t": rat(&c.t), "from": c.from, "to": c.to,
            })).collect::<Vec<_>>(),
        },
        "crossings": ledger.crossings.iter().map(|c| {
            let e = &c.event;
            json!({
                "wall": e.wall,
                "lambda": ints(&e.lambda),
                "l": rat(&e.l),
                "r": int(&e.r),
                "fixed": e.fixed.iter().map(|&i| names[i].clone()).collect::<Vec<_>>(),
                "wall_basis": e.wall_basis.iter().map(|b| ints(b)).collect::<Vec<_>>(),
                "theta_w": rats(&e.theta_w),
                "wall_stack": match &e.wall_stack {
                    Ok(sf) => stacky_fan_json(sf),
                    Err(msg) => json!({"error": msg}),
                },
                "wall_rank": e.wall_rank.as_ref().map(int),
                "certificates": c.certificates.as_ref().map(|cert| json!({
                    "ample_disjoint": {"passed": cert.ample_disjoint.passed, "detail": cert.ample_disjoint.detail},
                    "strongly_convex": {"passed": cert.strongly_convex.passed, "detail": cert.strongly_convex.detail},
                    "potential_vanishes": {"passed": cert.potential_vanishes.passed, "detail": cert.potential_vanishes.detail},
                })),
            })
        }).collect::<Vec<_>>(),
        "blocks": blocks,
        "total_exceptional": int(&ledger.total_exceptional),
        "lower_bound": ledger.lower_bound,
    })
}

fn ledger_summary(ledger: &SodLedger) -> Vec<String> {
    let mut out = vec![format!(
        "side {}: {} crossing(s), total exceptional {}{}",
        ledger.side.as_str(),
        ledger.plan.crossings.len(),
        ledger.total_exceptional,
        if ledger.lower_bound { " (lower bound)" } else { "" }
    )];
    for b in &ledger.blocks {
        out.push(match b {
            Block::Residual(r) => format!(
                "  residual {}{}{}",
                r.label,
                r.euler_characteristic
                    .as_ref()
                    .map_or(String::new(), |x| format!(", euler characteristic {}", format_rational(x))),
                if r.cy_labels.is_empty() {
                    String::new()
                } else {
                    format!(
                        ", {}",
                        r.cy_labels.iter().map(|l| l.as_str()).collect::<Vec<_>>().join(" ")
                    )
                }
            ),
            Block::Exceptional { count, wall, r, wall_rank } => {
                format!("  {count} exceptional object(s) from wall {wall} (r = {r}, rank {wall_rank})")
            }
            Block::StackBlock { wall, r, reasons, .. } => {
                format!("  stack block from wall {wall} (r = {r}): {}", reasons.join("; "))
            }
        });
    }
    out
}

pub struct DotAnnotations<'a> {
    pub geometric: Option<usize>,
    pub kuznetsov: &'a [usize],
    pub anti_kuznetsov: &'a [usize],
    pub theta_k: Option<&'a [BigInt]>,
}

/// Chamber adjacency graph in DOT. Wall labels give λ oriented toward the
/// second endpoint and `r = ⟨θ_K, λ⟩`; with θ_K known, edges point toward it.
pub fn export_dot(fan: &SecondaryFan, ann: &DotAnnotations) -> String {
    let mut s = String::from("graph chambers {\n");
    for i in 0..fan.chambers().len() {
        let mut tags = Vec::new();
        if ann.geometric == Some(i) {
            tags.push("geometric");
        }
        if ann.kuznetsov.contains(&i) {
            tags.push("K");
        }
        if ann.anti_kuznetsov.contains(&i) {
            tags.push("-K");
        }
        let label = if tags.is_empty() {
            format!("{i}")
        } else {
            format!("{i} [{}]", tags.join(", "))
        };
        s.push_str(&format!("  c{i} [label=\"{label}\"];\n"));
    }
    for w in fan.walls() {
        let mut lambda: Vec<BigInt> = w.normal.iter().map(|x| -x).collect();
        let (mut a, mut b) = w.chambers;
        let mut label = String::new();
        if let Some(tk) = ann.theta_k {
            let mut r: BigInt = lambda.iter().zip(tk).map(|(x, y)| x * y).sum();
            // walk toward θ_K so r is never negative
            if r.sign() == num_bigint::Sign::Minus {
                lambda.iter_mut().for_each(|x| *x = -x.clone());
                std::mem::swap(&mut a, &mut b);
                r = -r;
            }
            label = format!(", r={r}");
        }
        let label = format!("λ={}{label}", fmt_ints(&lambda));
        s.push_str(&format!("  c{a} -- c{b} [label=\"{label}\"];\n"));
    }
    s.push_str("}\n");
    s
}

/// Chamber graph for a problem file, annotated when the file describes a GLSM.
pub fn dot_for(p: &ProblemFile) -> Result<String> {
    if let Ok(glsm) = p.glsm() {
        let kd = kuznetsov_chambers(&glsm)?;
        return Ok(export_dot(
            &kd.fan,
            &DotAnnotations {
                geometric: kd.geometric_chamber,
                kuznetsov: &kd.k.chambers,
                anti_kuznetsov: &kd.anti_k.chambers,
                theta_k: Some(&kd.canonical.theta_k.free),
            },
        ));
    }
    let git = p.git_problem()?;
    let fan = secondary_fan(&git)?;
    let geometric = p.theta.as_ref().and_then(|t| fan.chamber_of(t));
    Ok(export_dot(
        &fan,
        &DotAnnotations {
            geometric,
            kuznetsov: &[],
            anti_kuznetsov: &[],
            theta_k: None,
        },
    ))
}

fn sod_options(p: &ProblemFile) -> SodOptions {
    SodOptions {
        seed: p.options.seed,
        chamber: None,
    }
}

/// Runs a command and returns the report document.
pub fn run(command: Command, p: &ProblemFile) -> Result<Value> {
    let mut summary: Vec<String> = Vec::new();
    let body = match command {
        Command::Gkz => {
            // the GLSM kernel when the file defines one, else the bare problem
            let glsm = if p.has_chi() || p.divisors.is_some() { Some(p.glsm()?) } else { None };
            let git = match &glsm {
                Some(g) => g.kernel_restriction()?.kernel,
                None => p.git_problem()?,
            };
            let fan = secondary_fan(&git)?;
            let geometric = match &glsm {
                Some(g) => kuznetsov_chambers(g)?.geometric_chamber,
                None => p.theta.as_ref().and_then(|t| fan.chamber_of(t)),
            };
            summary.push(format!("{} chamber(s), {} wall(s)", fan.chambers().len(), fan.walls().len()));
            let phase = match (&glsm, &p.theta, geometric) {
                (Some(g), _, Some(_)) => Some(stacky_fan_json(&stacky_fan_at(&git, &g.theta)?)),
                (None, Some(t), Some(_)) => Some(stacky_fan_json(&stacky_fan_at(&git, t)?)),
                _ => None,
            };
            json!({"fan": fan_summary(&fan), "geometric_chamber": geometric, "phase": phase})
        }
        Command::Kuznetsov => {
            let glsm = p.glsm()?;
            let kd = kuznetsov_chambers(&glsm)?;
            let geo = is_geometric(&glsm)?;
            summary.push(format!(
                "θ_K = {}, Kuznetsov chambers {:?}, anti-Kuznetsov chambers {:?}",
                fmt_ints(&kd.canonical.theta_k.free),
                kd.k.chambers,
                kd.anti_k.chambers
            ));
            json!({
                "fan": fan_summary(&kd.fan),
                "kuznetsov": kuznetsov_json(&kd),
                "geometric": {
                    "is_geometric": geo.is_geometric(),
                    "bundle_fibration": geo.bundle_fibration,
                    "pairing_potential": geo.pairing_potential,
                    "dilation_splitting": geo.dilation_splitting,
                    "failures": geo.failures,
                },
            })
        }
        Command::Sod(side) => {
            let glsm = p.glsm()?;
            let kd = kuznetsov_chambers(&glsm)?;
            let ledger = assemble_sod_with(&glsm, side, &sod_options(p))?;
            summary.extend(ledger_summary(&ledger));
            json!({
                "fan": {"chamber_count": kd.fan.chambers().len(), "wall_count": kd.fan.walls().len()},
                "kuznetsov": kuznetsov_json(&kd),
                "ledger": ledger_json(&ledger, &kd.kernel.kernel),
            })
        }
        Command::Ci => {
            let ci = p.ci_problem()?;
            let glsm = build_ci_glsm(&ci)?;
            let kernel = glsm.kernel_restriction()?.kernel;
            let tsf = total_space_fan(&ci)?;
            let qsf = stacky_fan_at(&kernel, &ci.theta)?;
            let iso = tsf.isomorphic_to(&qsf);
            let proj = projection_check(&ci)?;
            let euler = ci.euler_characteristic().ok();
            let kd = kuznetsov_chambers(&glsm)?;
            let k_ledger = assemble_sod_with(&glsm, Side::K, &sod_options(p));
            summary.push(format!(
                "total space fan {} the quotient fan; diagram exact {} and commutes {}",
                if iso.is_ok() { "matches" } else { "differs from" },
                proj.rows_exact,
                proj.commutes
            ));
            if let Ok(l) = &k_ledger {
                summary.extend(ledger_summary(l));
            }
            json!({
                "glsm": {
                    "coordinates": kernel.names().iter().zip(kernel.weights()).map(|(n, w)| json!({"name": n, "weight": ints(&w.free)})).collect::<Vec<_>>(),
                    "chi_weights": ints(&glsm.kernel_restriction()?.chi_weights),
                },
                "total_space_fan": stacky_fan_json(&tsf),
                "matches_quotient": iso.is_ok(),
                "mismatch": iso.err(),
                "projection": {
                    "rows_exact": proj.rows_exact,
                    "commutes": proj.commutes,
                    "bundle_classes": proj.bundle_classes.iter().map(|c| ints(&c.free)).collect::<Vec<_>>(),
                    "failures": proj.failures,
                },
                "euler_characteristic": euler.as_ref().map(rat),
                "kuznetsov": kuznetsov_json(&kd),
                "ledger_k": match &k_ledger {
                    Ok(l) => ledger_json(l, &kernel),
                    Err(e) => json!({"error": e.to_string(), "code": e.code()}),
                },
            })
        }
        Command::Cy => {
            let ci = p.ci_problem()?;
            let c = cy_classification(&ci)?;
            summary.push(format!(
                "q = {}, Cartier {}, labels [{}]",
                c.q.as_ref().map_or("none".to_string(), format_rational),
                c.cartier,
                c.labels.iter().map(|l| l.as_str()).collect::<Vec<_>>().join(", ")
            ));
            json!({
                "q": c.q.as_ref().map(rat),
                "cartier": c.cartier,
                "labels": c.labels.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
            })
        }
        Command::Visitor => {
            let input = p.visitor_input()?;
            let vg = build_visitor_glsm(&input)?;
            let h = visitor_sod(&vg)?;
            let kernel = vg.kernel()?;
            summary.push(format!(
                "{} exceptional object(s){} before D^b(Z); Fano host {}; positive triple {} ({})",
                h.total_exceptional,
                if h.lower_bound { " (lower bound)" } else { "" },
                h.fano_host.passed,
                h.positive_triple.verdict,
                h.positive_triple.method.as_str()
            ));
            json!({
                "glsm": {
                    "coordinates": kernel.names().iter().zip(kernel.weights()).map(|(n, w)| json!({"name": n, "weight": ints(&w.free)})).collect::<Vec<_>>(),
                    "lambda": ints(&vg.lambda),
                    "theta_plus": rats(&vg.theta_plus),
                    "theta_minus": rats(&vg.theta_minus),
                },
                "r": int(&h.r),
                "base": stacky_fan_json(&h.wall_stack),
                "blocks": h.blocks.iter().map(|b| match b {
                    VisitorBlock::BaseCopy { twist, exceptional } => json!({
                        "kind": "base_copy", "twist": twist, "exceptional": exceptional.as_ref().map(int),
                    }),
                    VisitorBlock::Residual { label, euler_characteristic } => json!({
                        "kind": "residual", "label": label, "euler_characteristic": euler_characteristic.as_ref().map(rat),
                    }),
                }).collect::<Vec<_>>(),
                "total_exceptional": int(&h.total_exceptional),
                "lower_bound": h.lower_bound,
                "fano_host": {
                    "passed": h.fano_host.passed,
                    "det_nef": h.fano_host.det_nef,
                    "dim_w_at_least_two": h.fano_host.dim_w_at_least_two,
                    "o_rel_ample": h.fano_host.o_rel_ample,
                    "fast_path": h.fano_host.fast_path,
                },
                "positive_triple": {
                    "verdict": h.positive_triple.verdict,
                    "method": h.positive_triple.method.as_str(),
                    "sufficient": h.positive_triple.sufficient,
                    "exact": h.positive_triple.exact,
                    "witness": h.positive_triple.witness,
                },
            })
        }
        Command::Audit => {
            let glsm = p.glsm()?;
            let seeds = [p.options.seed, p.options.seed + 1, p.options.seed + 2];
            let a = independence_audit(&glsm, &seeds)?;
            summary.push(format!(
                "{} Kuznetsov chamber(s), connected {}, {} distinct path(s), totals agree {}: {}",
                a.kuznetsov_chambers.len(),
                a.connected,
                a.distinct_paths,
                a.totals_agree,
                if a.passed() { "pass" } else { "fail" }
            ));
            json!({
                "kuznetsov_chambers": a.kuznetsov_chambers,
                "connecting_walls": a.connecting_walls.iter().map(|(w, r)| json!({"wall": w, "r": int(r)})).collect::<Vec<_>>(),
                "connected": a.connected,
                "paths": a.comparisons.iter().map(|c| json!({
                    "chamber": c.chamber, "seed": c.seed, "walls": c.walls,
                    "total": int(&c.total), "lower_bound": c.lower_bound,
                })).collect::<Vec<_>>(),
                "distinct_paths": a.distinct_paths,
                "totals_agree": a.totals_agree,
                "passed": a.passed(),
            })
        }
    };
    Ok(json!({
        "command": command.name(),
        "input": input_echo(p),
        "result": body,
        "summary": summary,
    }))
}

/// Report for a failed command.
pub fn error_report(command: &str, e: &Error) -> Value {
    json!({
        "command": command,
        "error": {"code": e.code(), "message": e.to_string()},
    })
}
