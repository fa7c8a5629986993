use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutArc {
    pub from: usize,
    pub to: usize,
    pub cap: i64,
}

/// A capacitated digraph with distinguished source and sink.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowNetwork {
    pub nodes: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<CutArc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCut {
    pub value: i64,
    /// Nodes reachable from the source in the final residual graph (the smallest source side).
    pub source_side: Vec<bool>,
    /// Nodes that cannot reach the sink in the final residual graph (the largest source side).
    pub max_source_side: Vec<bool>,
}

struct Residual {
    to: Vec<usize>,
    cap: Vec<i64>,
    head: Vec<Vec<usize>>,
}

impl Residual {
    fn new(net: &FlowNetwork) -> Self {
        let mut r = Residual { to: Vec::new(), cap: Vec::new(), head: vec![Vec::new(); net.nodes] };
        for a in &net.arcs {
            r.head[a.from].push(r.to.len());
            r.to.push(a.to);
            r.cap.push(a.cap);
            r.head[a.to].push(r.to.len());
            r.to.push(a.from);
            r.cap.push(0);
        }
        r
    }

    fn levels(&self, s: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.head.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    }

    fn push(&mut self, u: usize, t: usize, limit: i64, level: &[usize], next: &mut [usize]) -> i64 {
        if u == t {
            return limit;
        }
        while next[u] < self.head[u].len() {
            let e = self.head[u][next[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && level[v] == level[u] + 1 {
                let pushed = self.push(v, t, limit.min(self.cap[e]), level, next);
                if pushed > 0 {
                    self.cap[e] -= pushed;
                    self.cap[e ^ 1] += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0
    }
}

/// Dinic's algorithm. Capacities must be non-negative.
pub fn dinic_min_cut(net: &FlowNetwork) -> MinCut {
    let mut r = Residual::new(net);
    let (s, t) = (net.source, net.sink);
    let mut value = 0i64;
    loop {
        let level = r.levels(s);
        if level[t] == usize::MAX {
            break;
        }
        let mut next = vec![0usize; net.nodes];
        loop {
            let f = r.push(s, t, i64::MAX, &level, &mut next);
            if f == 0 {
                break;
            }
            value += f;
        }
    }
    let source_side: Vec<bool> = r.levels(s).iter().map(|&l| l != usize::MAX).collect();

    // reverse search from the sink along arcs with residual capacity
    let mut reaches_sink = vec![false; net.nodes];
    reaches_sink[t] = true;
    let mut queue = VecDeque::from([t]);
    while let Some(v) = queue.pop_front() {
        for &e in &r.head[v] {
            // e is v → u; its partner e ^ 1 is u → v
            let u = r.to[e];
            if r.cap[e ^ 1] > 0 && !reaches_sink[u] {
                reaches_sink[u] = true;
                queue.push_back(u);
            }
        }
    }
    let max_source_side = reaches_sink.iter().map(|&b| !b).collect();
    MinCut { value, source_side, max_source_side }
}
