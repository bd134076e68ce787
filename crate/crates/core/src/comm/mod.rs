//! Two-party simulation of the sketch-based sink-cut protocol with exact bit
//! accounting, the split-graph input format, and the subset-tribes gadget.
//!
//! The protocol is the streaming algorithm run over Alice's edges followed by
//! Bob's: Alice ships her memory (per-vertex sketches, degrees, sink
//! adjacency) to Bob, who finishes locally. Phase 1 is an external `s`-`t`
//! protocol that is charged through a cost model rather than run.

mod gadget;

pub use gadget::{
    build_hard_instance, evaluate_hard_instance, hard_instance_split, random_instance, GadgetMode, KappaClass,
    SubsetTribesInstance,
};

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, GraphBuilder, VertexCut};
use crate::oracle::{flow_st_kappa, flow_st_kappa_bounded};
use crate::rng;
use crate::sketch::{LinearSketch, SketchFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CallRecord {
    pub kind: String,
    pub bits: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CommTranscript {
    pub bits_alice_to_bob: u64,
    pub bits_bob_to_alice: u64,
    pub phase_breakdown: BTreeMap<String, u64>,
    pub calls: Vec<CallRecord>,
}

impl CommTranscript {
    pub fn total_bits(&self) -> u64 {
        self.bits_alice_to_bob + self.bits_bob_to_alice
    }
}

/// Every exchanged or charged bit passes through [`Channel::record`].
struct Channel {
    transcript: CommTranscript,
    phase: &'static str,
    messages_from_alice: usize,
}

impl Channel {
    fn new() -> Self {
        Channel { transcript: CommTranscript::default(), phase: "setup", messages_from_alice: 0 }
    }

    fn record(&mut self, from: Party, kind: &str, bits: u64) {
        let t = &mut self.transcript;
        match from {
            Party::Alice => t.bits_alice_to_bob += bits,
            Party::Bob => t.bits_bob_to_alice += bits,
        }
        *t.phase_breakdown.entry(self.phase.to_string()).or_default() += bits;
        t.calls.push(CallRecord { kind: kind.to_string(), bits });
    }

    /// Deliver a serialized message; the receiver gets exactly these bytes.
    /// Messages from Alice are acknowledged with one byte.
    fn send(&mut self, from: Party, kind: &str, payload: Vec<u8>) -> Vec<u8> {
        self.record(from, kind, 8 * payload.len() as u64);
        if from == Party::Alice {
            self.messages_from_alice += 1;
            self.record(Party::Bob, "ack", 8);
        }
        payload
    }

    /// Charge a modeled interactive call, split evenly between directions.
    fn charge(&mut self, kind: &str, bits: u64) {
        self.record(Party::Alice, kind, bits.div_ceil(2));
        self.record(Party::Bob, kind, bits / 2);
    }
}

fn encode_u32s(values: &[usize]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 * values.len() + 4);
    out.extend_from_slice(&(values.len() as u32).to_le_bytes());
    for &v in values {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out
}

fn decode_u32s(bytes: &[u8]) -> Result<Vec<usize>> {
    let (head, body) = bytes.split_at_checked(4).ok_or_else(|| Error::Decode("short list".into()))?;
    let len = u32::from_le_bytes(head.try_into().expect("4 bytes")) as usize;
    if body.len() != 4 * len {
        return Err(Error::Decode("list length mismatch".into()));
    }
    Ok(body.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")) as usize).collect())
}

fn encode_sketches(sketches: &[LinearSketch]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(sketches.len() as u32).to_le_bytes());
    for sk in sketches {
        let bytes = sk.to_bytes();
        out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
        out.extend_from_slice(&bytes);
    }
    out
}

fn decode_sketches(bytes: &[u8]) -> Result<Vec<LinearSketch>> {
    let short = || Error::Decode("truncated sketch batch".into());
    let mut rest = bytes;
    let mut take = |k: usize| -> Result<&[u8]> {
        let (a, b) = rest.split_at_checked(k).ok_or_else(short)?;
        rest = b;
        Ok(a)
    };
    let count = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes")) as usize;
    let mut out = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let len = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes")) as usize;
        out.push(LinearSketch::from_bytes(take(len)?)?);
    }
    if !rest.is_empty() {
        return Err(Error::Decode("trailing bytes after sketch batch".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommConfig {
    pub seed: u64,
    /// Constant `c` of the Phase-1 cost model `c · n · ⌈log₂ n⌉²` bits per call.
    pub stcut_c: f64,
    /// Phase-1 sample size is `⌈sample_mult · √n · log₂ n⌉`, capped by `|A|`.
    pub sample_mult: f64,
    pub max_phase1_calls: Option<usize>,
}

impl Default for CommConfig {
    fn default() -> Self {
        CommConfig { seed: 0, stcut_c: 8.0, sample_mult: 100.0, max_phase1_calls: None }
    }
}

fn log2_ceil(n: usize) -> u64 {
    (n.max(2) as f64).log2().ceil() as u64
}

impl CommConfig {
    pub fn stcut_bits(&self, n: usize) -> u64 {
        let l = log2_ceil(n);
        (self.stcut_c * n as f64 * (l * l) as f64).ceil() as u64
    }

    /// Bits charged for sharing the public random seed.
    pub fn public_randomness_bits(&self, n: usize) -> u64 {
        log2_ceil(n)
    }

    pub fn phase1_samples(&self, n: usize) -> usize {
        let k = (self.sample_mult * (n as f64).sqrt() * (n.max(2) as f64).log2()).ceil() as usize;
        self.max_phase1_calls.map_or(k, |c| k.min(c))
    }
}

/// Sketch sparsity `⌈√n⌉`.
pub fn protocol_sparsity(n: usize) -> usize {
    (n as f64).sqrt().ceil().max(1.0) as usize
}

fn normalize_share(n: usize, edges: &[(usize, usize)], who: &str) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::with_capacity(edges.len());
    for &(u, v) in edges {
        if u == v {
            return invalid(format!("{who}: self-loop on {u}"));
        }
        if u >= n || v >= n {
            return invalid(format!("{who}: edge ({u}, {v}) out of range for n = {n}"));
        }
        out.push((u.min(v), u.max(v)));
    }
    out.sort_unstable();
    if out.windows(2).any(|w| w[0] == w[1]) {
        return invalid(format!("{who}: duplicate edge"));
    }
    Ok(out)
}

/// The min-neighbor step of Phase 2: minimize `|N_{G'}(L)|` over
/// `u ∈ L ⊆ V'`, via a max-flow to a virtual sink attached to `V \ V'`.
fn min_neighbor_containing(gp: &Graph, u: usize, in_vp: &[bool]) -> Vec<usize> {
    let n = gp.n();
    let mut b = GraphBuilder::new(n);
    for (x, y) in gp.edges() {
        b.add_edge(x, y);
    }
    let sink = b.add_vertex();
    for w in (0..n).filter(|&w| !in_vp[w]) {
        b.add_edge(w, sink);
    }
    let h = b.build();
    let ans = flow_st_kappa(&h, u, sink).expect("u lies in V' and the sink does not");
    let mut left = ans.witness.left;
    left.retain(|&v| v < n);
    left
}

/// Run the protocol on an edge split. Returns the minimum `t`-sink cut found
/// (exact with high probability) and the transcript.
pub fn simulate_ssvc_protocol(
    n: usize,
    edges_alice: &[(usize, usize)],
    edges_bob: &[(usize, usize)],
    t: usize,
    cfg: &CommConfig,
) -> Result<(VertexCut, CommTranscript)> {
    if t >= n {
        return invalid("sink out of range");
    }
    let alice = normalize_share(n, edges_alice, "alice")?;
    let bob = normalize_share(n, edges_bob, "bob")?;
    {
        let (mut i, mut j) = (0, 0);
        while i < alice.len() && j < bob.len() {
            match alice[i].cmp(&bob[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return invalid(format!("edge {:?} held by both parties", alice[i])),
            }
        }
    }
    let g_alice = Graph::from_edges(n, alice.iter().copied())?;
    let g_bob = Graph::from_edges(n, bob.iter().copied())?;
    // Simulator's view, used only to run the parties' local computations.
    let g = Graph::from_edges(n, alice.iter().chain(&bob).copied())?;

    let mut ch = Channel::new();
    ch.record(Party::Alice, "public-randomness", cfg.public_randomness_bits(n));

    // Before Phase 1: Alice's streaming memory moves to Bob.
    let s = protocol_sparsity(n);
    let family = SketchFamily::new(n, s, rng::derive(cfg.seed, &[0x5c]))?;
    let alice_sketches: Vec<LinearSketch> =
        (0..n).map(|v| family.sketch_set(g_alice.neighbors(v))).collect::<Result<_>>()?;
    let recv = ch.send(Party::Alice, "sketches", encode_sketches(&alice_sketches));
    let mut sketches = decode_sketches(&recv)?;
    for (v, sk) in sketches.iter_mut().enumerate() {
        *sk = sk.add(&family.sketch_set(g_bob.neighbors(v))?)?;
    }
    let alice_degrees: Vec<usize> = (0..n).map(|v| g_alice.degree(v)).collect();
    let recv = ch.send(Party::Alice, "degrees", encode_u32s(&alice_degrees));
    let degree: Vec<usize> = decode_u32s(&recv)?.iter().enumerate().map(|(v, &d)| d + g_bob.degree(v)).collect();
    let recv = ch.send(Party::Alice, "sink-neighbors", encode_u32s(g_alice.neighbors(t)));
    let mut near_t = vec![false; n];
    near_t[t] = true;
    for v in decode_u32s(&recv)?.into_iter().chain(g_bob.neighbors(t).iter().copied()) {
        near_t[v] = true;
    }
    let a: Vec<usize> = (0..n).filter(|&v| !near_t[v]).collect();
    let mut best = VertexCut::degenerate_for_sink(n, t);
    if a.is_empty() {
        ch.phase = "output";
        return Ok((best, ch.transcript));
    }

    // Phase 1: large L is hit by a sample of A.
    ch.phase = "phase1";
    let mut p = a.clone();
    p.shuffle(&mut rng::rng(cfg.seed, &[0x91]));
    p.truncate(cfg.phase1_samples(n).min(a.len()));
    let both_hold_edges = !alice.is_empty() && !bob.is_empty();
    if both_hold_edges {
        let recv = ch.send(Party::Bob, "phase1-sample", encode_u32s(&p));
        p = decode_u32s(&recv)?;
    }
    let mut phase1_best: Option<VertexCut> = None;
    let mut bound = n - 1;
    for &v in &p {
        if both_hold_edges {
            ch.charge("stcut-call", cfg.stcut_bits(n));
        }
        let k = flow_st_kappa_bounded(&g, v, t, bound);
        if k < bound {
            bound = k;
            phase1_best = Some(flow_st_kappa(&g, v, t)?.witness);
        }
    }
    if let Some(cut) = phase1_best {
        if !both_hold_edges && bob.is_empty() {
            // Alice ran the calls alone; her best separator goes to Bob.
            let recv = ch.send(Party::Alice, "phase1-result", encode_u32s(&cut.separator));
            debug_assert_eq!(decode_u32s(&recv)?, cut.separator);
        }
        best = cut;
    }

    // Phase 2: Bob alone, from the summed sketches.
    ch.phase = "phase2";
    let mut phase2: Option<(usize, Vec<usize>)> = None;
    for &u in &a {
        let mut in_vp = vec![false; n];
        let mut b = GraphBuilder::new(n);
        for &v in &a {
            // More than s differences can never be recovered.
            if degree[u].abs_diff(degree[v]) > s {
                continue;
            }
            let Some(diff) = sketches[u].sub(&sketches[v])?.recover() else {
                continue;
            };
            in_vp[v] = true;
            for (x, val) in diff {
                if val > 0 {
                    b.add_edge(u, x);
                } else {
                    b.add_edge(v, x);
                }
            }
        }
        let gp = b.build();
        let left = min_neighbor_containing(&gp, u, &in_vp);
        let kappa_u = gp.neighborhood(&left).len() + degree[u] - gp.degree(u);
        if phase2.as_ref().is_none_or(|(k, _)| kappa_u < *k) {
            phase2 = Some((kappa_u, left));
        }
    }
    ch.phase = "output";
    if let Some((k, left)) = phase2 {
        if k < best.size {
            best = VertexCut::from_left(&g, &left);
        }
    }
    debug_assert!(ch.messages_from_alice > 0);
    Ok((best, ch.transcript))
}

/// Edge sets of the two parties.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SplitGraph {
    pub n: usize,
    pub alice: Vec<(usize, usize)>,
    pub bob: Vec<(usize, usize)>,
}

impl SplitGraph {
    pub fn graph(&self) -> Result<Graph> {
        Graph::from_edges(self.n, self.alice.iter().chain(&self.bob).copied())
    }

    /// Assign each edge of `g` to Alice with probability `alice_share`.
    pub fn random(g: &Graph, alice_share: f64, seed: u64) -> Self {
        use rand::Rng as _;
        let mut r = rng::rng(seed, &[0x5117]);
        let mut split = SplitGraph { n: g.n(), ..Default::default() };
        for e in g.edges() {
            if r.gen_bool(alice_share.clamp(0.0, 1.0)) {
                split.alice.push(e);
            } else {
                split.bob.push(e);
            }
        }
        split
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("p {} {}\n", self.n, self.alice.len() + self.bob.len());
        for (tag, edges) in [("A", &self.alice), ("B", &self.bob)] {
            for (u, v) in edges {
                out.push_str(&format!("{tag} {u} {v}\n"));
            }
        }
        out
    }
}

/// Parse `A u v` / `B u v` lines with an optional leading `p n m` header.
/// Blank lines and lines starting with `#` are skipped. Edges may not repeat,
/// within or across parties.
pub fn parse_split(text: &str) -> Result<SplitGraph> {
    let mut declared: Option<usize> = None;
    let mut split = SplitGraph::default();
    let mut seen = std::collections::HashSet::new();
    let mut max_id: Option<usize> = None;
    let id = |tok: &str, line: usize| {
        tok.parse::<usize>().map_err(|_| Error::Format { line, msg: format!("`{tok}` is not a vertex id") })
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens[0] == "p" {
            if declared.is_some() || !seen.is_empty() {
                return Err(Error::Format { line, msg: "header must precede all edges".into() });
            }
            if tokens.len() != 3 {
                return Err(Error::Format { line, msg: "expected `p <n> <m>`".into() });
            }
            declared = Some(id(tokens[1], line)?);
            id(tokens[2], line)?;
            continue;
        }
        if tokens.len() != 3 {
            return Err(Error::Format { line, msg: "expected `A u v` or `B u v`".into() });
        }
        let (u, v) = (id(tokens[1], line)?, id(tokens[2], line)?);
        if u == v {
            return Err(Error::SelfLoop { line, v: u });
        }
        if let Some(n) = declared {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::Range { line, id: x, n });
                }
            }
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::Format { line, msg: format!("edge ({u}, {v}) listed twice") });
        }
        max_id = Some(max_id.map_or(u.max(v), |m: usize| m.max(u).max(v)));
        match tokens[0] {
            "A" => split.alice.push((u, v)),
            "B" => split.bob.push((u, v)),
            other => return Err(Error::Format { line, msg: format!("unknown party `{other}`") }),
        }
    }
    split.n = declared.unwrap_or_else(|| max_id.map_or(0, |m| m + 1));
    Ok(split)
}

pub fn load_split(path: impl AsRef<Path>) -> Result<SplitGraph> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_split(&text)
}
