//! Dinic max-flow on the vertex-split network, used only by the oracles.

use std::collections::VecDeque;

use crate::graph::Graph;

const INF: i64 = i64::MAX / 4;

pub(crate) struct SplitNetwork {
    to: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
    pub source: usize,
    pub sink: usize,
}

#[inline]
fn v_in(v: usize) -> usize {
    2 * v
}

#[inline]
fn v_out(v: usize) -> usize {
    2 * v + 1
}

impl SplitNetwork {
    /// Unit vertex capacities except at `s` and `t`; flows from `s_out` to `t_in`.
    pub fn new(g: &Graph, s: usize, t: usize) -> Self {
        let nodes = 2 * g.n();
        let mut net = SplitNetwork {
            to: Vec::with_capacity(4 * g.m() + 2 * g.n()),
            cap: Vec::with_capacity(4 * g.m() + 2 * g.n()),
            adj: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            iter: vec![0; nodes],
            source: v_out(s),
            sink: v_in(t),
        };
        for v in 0..g.n() {
            let c = if v == s || v == t { INF } else { 1 };
            net.arc(v_in(v), v_out(v), c);
        }
        for (u, v) in g.edges() {
            net.arc(v_out(u), v_in(v), INF);
            net.arc(v_out(v), v_in(u), INF);
        }
        net
    }

    fn arc(&mut self, a: usize, b: usize, c: i64) {
        self.adj[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.adj[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    fn bfs(&mut self) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[self.source] = 0;
        let mut q = VecDeque::from([self.source]);
        while let Some(x) = q.pop_front() {
            for &e in &self.adj[x] {
                let y = self.to[e];
                if self.cap[e] > 0 && self.level[y] < 0 {
                    self.level[y] = self.level[x] + 1;
                    q.push_back(y);
                }
            }
        }
        self.level[self.sink] >= 0
    }

    fn dfs(&mut self, x: usize, pushed: i64) -> i64 {
        if x == self.sink {
            return pushed;
        }
        while self.iter[x] < self.adj[x].len() {
            let e = self.adj[x][self.iter[x]];
            let y = self.to[e];
            if self.cap[e] > 0 && self.level[y] == self.level[x] + 1 {
                let d = self.dfs(y, pushed.min(self.cap[e]));
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            self.iter[x] += 1;
        }
        0
    }

    /// Max flow, stopping early once the value reaches `limit`.
    pub fn max_flow(&mut self, limit: usize) -> usize {
        let limit = limit as i64;
        let mut flow = 0;
        while flow < limit && self.bfs() {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(self.source, limit - flow);
                if f == 0 {
                    break;
                }
                flow += f;
                if flow >= limit {
                    break;
                }
            }
        }
        flow as usize
    }

    /// Separator of a completed max flow: split vertices whose inner arc is saturated
    /// and crosses the residual-reachable frontier.
    pub fn min_separator(&self, n: usize) -> Vec<usize> {
        let mut seen = vec![false; self.adj.len()];
        seen[self.source] = true;
        let mut q = VecDeque::from([self.source]);
        while let Some(x) = q.pop_front() {
            for &e in &self.adj[x] {
                let y = self.to[e];
                if self.cap[e] > 0 && !seen[y] {
                    seen[y] = true;
                    q.push_back(y);
                }
            }
        }
        (0..n).filter(|&v| seen[v_in(v)] && !seen[v_out(v)]).collect()
    }

    /// Decompose the flow into vertex sequences from `s` to `t`.
    pub fn paths(&self, s: usize) -> Vec<Vec<usize>> {
        let mut flow_left: Vec<i64> = (0..self.to.len())
            .map(|e| if e % 2 == 0 { self.cap[e ^ 1] } else { 0 })
            .collect();
        let mut paths = Vec::new();
        loop {
            let mut x = self.source;
            let mut path = vec![s];
            while x != self.sink {
                let Some(&e) = self.adj[x].iter().find(|&&e| e % 2 == 0 && flow_left[e] > 0) else {
                    return paths;
                };
                flow_left[e] -= 1;
                x = self.to[e];
                if x.is_multiple_of(2) {
                    path.push(x / 2);
                } else if x != self.source {
                    continue;
                }
            }
            paths.push(path);
        }
    }
}
