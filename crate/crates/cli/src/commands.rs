use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};

use vcframe::clustering::{check_cover_properties, com_nei_clustering, Schedule};
use vcframe::comm::{
    build_hard_instance, evaluate_hard_instance, load_split, random_instance, simulate_ssvc_protocol, KappaClass,
    SplitGraph,
};
use vcframe::config::RunConfig;
use vcframe::embedding::{kappa_via_rank, min_nncc_via_embedding, random_modular_embedding};
use vcframe::framework::{global_vc, ssvc};
use vcframe::graph::{load_graph, random_gnp, to_edge_list, validate_cut};
use vcframe::isolating::isolating_cuts;
use vcframe::matching::st_vertex_connectivity;
use vcframe::minnncc::min_nncc;
use vcframe::oracle::{
    brute_force_min_neighbor, brute_force_min_neighbor_where, brute_force_sink_cut, brute_force_vc,
    flow_global_kappa, flow_st_kappa, BRUTE_FORCE_LIMIT, MIN_NEIGHBOR_LIMIT,
};
use vcframe::{Error, Graph, Result, VertexCut};

use crate::{Cli, Command, Format, OracleKind, Outcome, Suite};

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

fn read_graph(path: &Path) -> Result<(Graph, Value)> {
    let g = load_graph(path)?;
    let summary = json!({ "path": path.display().to_string(), "n": g.n(), "m": g.m() });
    Ok((g, summary))
}

fn check_vertex(g: &Graph, v: usize, what: &str) -> Result<()> {
    if v >= g.n() {
        return invalid(format!("{what} = {v} is not a vertex (n = {})", g.n()));
    }
    Ok(())
}

fn obj(pairs: Value) -> Map<String, Value> {
    match pairs {
        Value::Object(m) => m,
        _ => unreachable!("answers are JSON objects"),
    }
}

/// Exact minimum `t`-sink cut size: exhaustive for small `n`, otherwise the
/// minimum of `κ(v, t)` over `v ∉ N[t]`.
fn reference_sink_kappa(g: &Graph, t: usize) -> Result<usize> {
    if g.n() <= BRUTE_FORCE_LIMIT {
        return Ok(brute_force_sink_cut(g, t, BRUTE_FORCE_LIMIT)?.kappa);
    }
    let mut best = g.n() - 1;
    for v in (0..g.n()).filter(|&v| v != t && !g.has_edge(v, t)) {
        best = best.min(flow_st_kappa(g, v, t)?.kappa);
    }
    Ok(best)
}

fn reference_global_kappa(g: &Graph) -> Result<usize> {
    if g.n() <= BRUTE_FORCE_LIMIT {
        Ok(brute_force_vc(g, BRUTE_FORCE_LIMIT)?.kappa)
    } else {
        Ok(flow_global_kappa(g)?.kappa)
    }
}

fn cut_checks(g: &Graph, cut: &VertexCut, expected: usize) -> bool {
    validate_cut(g, cut) == Ok(true) && cut.size == expected
}

pub fn run(cli: &Cli, cfg: &RunConfig) -> Result<Outcome> {
    // The flag has already been folded into the config.
    let verify = cfg.solver.verify;
    match &cli.command {
        Command::Solve { input, sink, boost, max_sinks } => {
            let (g, input) = read_graph(input)?;
            let mut solver = cfg.solver.clone();
            if let Some(b) = boost {
                solver.boost = *b;
            }
            if max_sinks.is_some() {
                solver.max_sinks = *max_sinks;
            }
            solver.validate()?;
            match sink {
                Some(t) => {
                    check_vertex(&g, *t, "sink")?;
                    let res = ssvc(&g, *t, &solver)?;
                    let verified = if verify { Some(cut_checks(&g, &res.cut, reference_sink_kappa(&g, *t)?)) } else { None };
                    Ok(Outcome {
                        input,
                        answer: obj(json!({ "kappa": res.cut.size, "cut": res.cut, "origin": res.origin })),
                        verified,
                        counters: json!({ "levels": res.levels.len() }),
                        raw: None,
                    })
                }
                None => {
                    if g.n() < 2 {
                        return invalid("global connectivity needs at least two vertices");
                    }
                    let res = global_vc(&g, &solver)?;
                    let verified = if verify { Some(cut_checks(&g, &res.cut, reference_global_kappa(&g)?)) } else { None };
                    Ok(Outcome {
                        input,
                        answer: obj(json!({ "kappa": res.cut.size, "cut": res.cut, "origin": res.origin })),
                        verified,
                        counters: json!({ "sinks": res.sinks.len() }),
                        raw: None,
                    })
                }
            }
        }
        Command::Stcut { input, s, t } => {
            let (g, input) = read_graph(input)?;
            check_vertex(&g, *s, "s")?;
            check_vertex(&g, *t, "t")?;
            if s == t {
                return invalid("s and t must differ");
            }
            let res = st_vertex_connectivity(&g, *s, *t)?;
            let verified = if verify {
                let reference = flow_st_kappa(&g, *s, *t)?;
                let separates = match &res.separator {
                    None => g.has_edge(*s, *t),
                    Some(sep) => {
                        let cut = VertexCut::from_separator(&g, sep, *s);
                        cut.right.contains(t) && sep.len() == res.kappa
                    }
                };
                Some(separates && res.kappa == reference.kappa)
            } else {
                None
            };
            Ok(Outcome {
                input,
                answer: obj(json!({ "kappa": res.kappa, "separator": res.separator })),
                verified,
                counters: json!({}),
                raw: None,
            })
        }
        Command::SinkCut { input, t } => {
            let (g, input) = read_graph(input)?;
            check_vertex(&g, *t, "t")?;
            let res = ssvc(&g, *t, &cfg.solver)?;
            let verified = if verify { Some(cut_checks(&g, &res.cut, reference_sink_kappa(&g, *t)?) && res.cut.right.contains(t)) } else { None };
            Ok(Outcome {
                input,
                answer: obj(json!({ "kappa": res.cut.size, "cut": res.cut, "origin": res.origin, "levels": res.levels })),
                verified,
                counters: json!({ "levels": res.levels.len() }),
                raw: None,
            })
        }
        Command::Cluster { input, ell, planted } => {
            let (g, input) = read_graph(input)?;
            let planted = planted.clone().unwrap_or_default();
            for &v in &planted {
                check_vertex(&g, v, "planted vertex")?;
            }
            let cover = com_nei_clustering(&g, *ell, &cfg.solver.clustering, cfg.solver.seed)?;
            let report = check_cover_properties(&g, &cover, &planted);
            let schedule = Schedule::resolve(g.n(), *ell, &cfg.solver.clustering);
            let verified = verify.then_some(report.disjoint_within_iteration && report.over_cap == 0);
            Ok(Outcome {
                input,
                answer: obj(json!({
                    "schedule": schedule,
                    "clusters": cover.distinct(),
                    "planted_covered": (!planted.is_empty()).then_some(report.covered),
                    "report": report,
                })),
                verified,
                counters: json!({ "recorded": cover.clusters.len() }),
                raw: None,
            })
        }
        Command::Isocut { input, cluster, terminals } => {
            let (g, input) = read_graph(input)?;
            for &v in cluster.iter().chain(terminals) {
                check_vertex(&g, v, "vertex")?;
            }
            let res = isolating_cuts(&g, cluster, terminals)?;
            let verified = if verify {
                let mut ok = true;
                let tset = terminals.clone();
                for tc in &res.per_terminal {
                    let want = brute_force_min_neighbor_where(&g, cluster, MIN_NEIGHBOR_LIMIT, |l| {
                        let inside = l.iter().filter(|v| tset.contains(v)).count();
                        inside == 1 && l.contains(&tc.terminal) && g.neighborhood(l).iter().all(|v| !tset.contains(v))
                    })?;
                    ok &= want.map(|(_, k)| k) == Some(tc.size());
                }
                Some(ok)
            } else {
                None
            };
            Ok(Outcome {
                input,
                answer: obj(json!({
                    "best": res.best_cut(),
                    "per_terminal": res.per_terminal,
                    "reduced_sizes": res.reduced_sizes,
                })),
                verified,
                counters: json!({ "set_cuts": res.set_cuts, "reduced_total": res.reduced_sizes.iter().sum::<usize>() }),
                raw: None,
            })
        }
        Command::Minnncc { input, cluster, ell, via_embedding } => {
            let (g, input) = read_graph(input)?;
            let res = min_nncc(&g, cluster, *ell, &cfg.solver.minnncc, cfg.solver.seed)?;
            let embedded = if *via_embedding {
                Some(min_nncc_via_embedding(&g, cluster, *ell, &cfg.solver.minnncc, cfg.solver.seed, cfg.embedding.field()?)?)
            } else {
                None
            };
            let verified = if verify {
                let (_, best) = brute_force_min_neighbor(&g, cluster, MIN_NEIGHBOR_LIMIT)?;
                Some(res.size == best && embedded.is_none_or(|e| e == res.objective))
            } else {
                None
            };
            Ok(Outcome {
                input,
                answer: obj(json!({
                    "size": res.size,
                    "objective": res.objective,
                    "left": res.left,
                    "source": res.source,
                    "embedding_objective": embedded,
                })),
                verified,
                counters: json!({ "sampled": res.sampled.len(), "boundary": res.boundary.c_prime.len(), "offset": res.boundary.k }),
                raw: None,
            })
        }
        Command::Embed { input, t, s } => {
            let (g, input) = read_graph(input)?;
            check_vertex(&g, *t, "t")?;
            let emb = random_modular_embedding(&g, *t, cfg.solver.seed, cfg.embedding.field()?)?;
            let sources: Vec<usize> = match s {
                Some(s) => {
                    check_vertex(&g, *s, "s")?;
                    vec![*s]
                }
                None => (0..g.n()).filter(|&v| v != *t && !g.has_edge(v, *t)).collect(),
            };
            let mut kappas = Vec::new();
            let mut ok = true;
            for &v in &sources {
                let k = kappa_via_rank(&emb, &g, v)?;
                if verify {
                    ok &= flow_st_kappa(&g, v, *t)?.kappa == k;
                }
                kappas.push(json!({ "s": v, "kappa": k }));
            }
            let affine = emb.check_affine_invariant(&g);
            Ok(Outcome {
                input,
                answer: obj(json!({
                    "prime": emb.field.modulus(),
                    "dimension": emb.dim(),
                    "affine_invariant": affine,
                    "kappas": kappas,
                })),
                verified: verify.then_some(ok && affine),
                counters: json!({ "sources": sources.len() }),
                raw: None,
            })
        }
        Command::CommSim { split, t, max_phase1_calls } => {
            let sp = load_split(split)?;
            check_vertex(&Graph::new(sp.n), *t, "t")?;
            let mut comm = cfg.comm.clone();
            if max_phase1_calls.is_some() {
                comm.max_phase1_calls = *max_phase1_calls;
            }
            let (cut, transcript) = simulate_ssvc_protocol(sp.n, &sp.alice, &sp.bob, *t, &comm)?;
            let verified = if verify {
                let g = sp.graph()?;
                Some(cut_checks(&g, &cut, reference_sink_kappa(&g, *t)?))
            } else {
                None
            };
            let input = json!({
                "path": split.display().to_string(),
                "n": sp.n,
                "alice_edges": sp.alice.len(),
                "bob_edges": sp.bob.len(),
            });
            Ok(Outcome {
                input,
                answer: obj(json!({ "kappa": cut.size, "cut": cut, "transcript": transcript })),
                verified,
                counters: json!({ "total_bits": transcript.total_bits() }),
                raw: None,
            })
        }
        Command::Gadget { sqrt_n, mode, output } => {
            let inst = random_instance(*sqrt_n, *mode, cfg.solver.seed)?;
            let g = build_hard_instance(&inst)?;
            let class = evaluate_hard_instance(&inst);
            let half = inst.n() / 2;
            let text = to_edge_list(&g);
            let mut answer = obj(json!({
                "expected": class,
                "half_n": half,
                "graph_n": g.n(),
                "graph_m": g.m(),
                "instance": inst,
            }));
            match output {
                Some(path) => {
                    std::fs::write(path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    answer.insert("output".into(), json!(path.display().to_string()));
                }
                None => {
                    answer.insert("edge_list".into(), json!(text));
                }
            }
            let verified = if verify {
                let k = flow_global_kappa(&g)?.kappa;
                answer.insert("kappa".into(), json!(k));
                Some(match class {
                    KappaClass::EqHalf => k == half,
                    KappaClass::GeHalfPlusOne => k > half,
                })
            } else {
                None
            };
            Ok(Outcome { input: json!({ "sqrt_n": sqrt_n, "mode": mode }), answer, verified, counters: json!({}), raw: None })
        }
        Command::Oracle { input, kind, s, t } => {
            let (g, input) = read_graph(input)?;
            let (answer, verified) = match kind {
                OracleKind::Vc => {
                    if g.n() < 2 {
                        return invalid("global connectivity needs at least two vertices");
                    }
                    let flow = flow_global_kappa(&g)?;
                    let verified = if verify && g.n() <= BRUTE_FORCE_LIMIT {
                        Some(brute_force_vc(&g, BRUTE_FORCE_LIMIT)?.kappa == flow.kappa)
                    } else {
                        None
                    };
                    (json!({ "kappa": flow.kappa, "cut": flow.witness }), verified)
                }
                OracleKind::Stcut => {
                    let (Some(s), Some(t)) = (s, t) else {
                        return invalid("stcut oracle needs -s and -t");
                    };
                    check_vertex(&g, *s, "s")?;
                    check_vertex(&g, *t, "t")?;
                    let flow = flow_st_kappa(&g, *s, *t)?;
                    let verified = verify.then(|| flow.paths.as_ref().is_none_or(|p| p.len() == flow.kappa));
                    (json!({ "kappa": flow.kappa, "cut": flow.witness, "paths": flow.paths }), verified)
                }
                OracleKind::SinkCut => {
                    let Some(t) = t else {
                        return invalid("sink-cut oracle needs -t");
                    };
                    check_vertex(&g, *t, "t")?;
                    let ans = brute_force_sink_cut(&g, *t, BRUTE_FORCE_LIMIT)?;
                    let verified = verify.then(|| reference_sink_kappa(&g, *t).ok() == Some(ans.kappa));
                    (json!({ "kappa": ans.kappa, "cut": ans.witness }), verified)
                }
            };
            Ok(Outcome { input, answer: obj(answer), verified, counters: json!({}), raw: None })
        }
        Command::Bench { suite, sizes, format } => bench(*suite, sizes, *format, cfg),
    }
}

fn bench(suite: Suite, sizes: &[usize], format: Format, cfg: &RunConfig) -> Result<Outcome> {
    let seed = cfg.solver.seed;
    let mut rows: Vec<Map<String, Value>> = Vec::new();
    for &size in sizes {
        let start = Instant::now();
        let mut row = match suite {
            Suite::CommScaling => {
                if size < 2 {
                    return invalid("comm-scaling sizes must be at least 2");
                }
                let g = random_gnp(size, 0.15, seed ^ size as u64);
                let sp = SplitGraph::random(&g, 0.5, seed);
                let (cut, tr) = simulate_ssvc_protocol(size, &sp.alice, &sp.bob, 0, &cfg.comm)?;
                let n = size as f64;
                let bits = tr.total_bits() as f64;
                obj(json!({
                    "n": size,
                    "bits": tr.total_bits(),
                    "bits_per_n15": bits / n.powf(1.5),
                    "bits_per_n15_log3": bits / (n.powf(1.5) * n.log2().powi(3)),
                    "kappa": cut.size,
                }))
            }
            Suite::Global => {
                if size < 2 {
                    return invalid("global sizes must be at least 2");
                }
                let g = random_gnp(size, 0.3, seed ^ size as u64);
                let res = global_vc(&g, &cfg.solver)?;
                let solve_ms = start.elapsed().as_secs_f64() * 1e3;
                let flow = flow_global_kappa(&g)?.kappa;
                obj(json!({ "n": size, "m": g.m(), "kappa": res.cut.size, "flow_kappa": flow, "solve_ms": solve_ms }))
            }
            Suite::Gadget => {
                let mut row = Map::new();
                row.insert("sqrt_n".into(), json!(size));
                for (label, mode) in [("yes", vcframe::comm::GadgetMode::Yes), ("no", vcframe::comm::GadgetMode::No)] {
                    let inst = random_instance(size, mode, seed)?;
                    let k = flow_global_kappa(&build_hard_instance(&inst)?)?.kappa;
                    row.insert(format!("{label}_kappa"), json!(k));
                }
                row.insert("half_n".into(), json!(size * size / 2));
                row
            }
        };
        row.insert("ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
        rows.push(row);
    }
    let raw = (format == Format::Csv).then(|| {
        let header: Vec<String> = rows.first().map(|r| r.keys().cloned().collect()).unwrap_or_default();
        let mut out = header.join(",") + "\n";
        for r in &rows {
            let cells: Vec<String> = header.iter().map(|k| r[k].to_string()).collect();
            out += &(cells.join(",") + "\n");
        }
        out
    });
    Ok(Outcome {
        input: json!({ "suite": format!("{suite:?}"), "sizes": sizes }),
        answer: obj(json!({ "rows": rows })),
        verified: None,
        counters: json!({}),
        raw,
    })
}
