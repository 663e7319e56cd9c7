//! Maximum-weight matching in a general graph (Edmonds' blossom algorithm,
//! primal-dual, O(n³)) on a dense adjacency matrix.
//!
//! Vertices are 1-based internally; 0 is the null vertex. Blossoms take the
//! indices n+1..=2n. Duals are kept doubled so every quantity stays integral.
//! Buffers are reused across calls, which matters when solving millions of
//! small instances.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, Default)]
struct Edge {
    u: usize,
    v: usize,
    w: i32,
}

#[derive(Debug, Default, Clone)]
pub struct Blossom {
    n: usize,
    nx: usize,
    cap: usize,
    g: Vec<Edge>,
    lab: Vec<i32>,
    mate: Vec<usize>,
    slack: Vec<usize>,
    st: Vec<usize>,
    pa: Vec<usize>,
    flower_from: Vec<usize>,
    s: Vec<i8>,
    vis: Vec<u32>,
    stamp: u32,
    flower: Vec<Vec<usize>>,
    q: VecDeque<usize>,
    adj: Vec<Vec<usize>>,
}

impl Blossom {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    fn e(&self, u: usize, v: usize) -> Edge {
        self.g[u * self.cap + v]
    }

    #[inline]
    fn dist(&self, e: Edge) -> i32 {
        self.lab[e.u] + self.lab[e.v] - e.w * 2
    }

    #[inline]
    fn ff(&self, b: usize, x: usize) -> usize {
        self.flower_from[b * (self.n + 1) + x]
    }

    #[inline]
    fn set_ff(&mut self, b: usize, x: usize, val: usize) {
        let i = b * (self.n + 1) + x;
        self.flower_from[i] = val;
    }

    /// Solves for `n` vertices (0-based input) and positive edge weights.
    /// Returns `mate[v]` (0-based) or `None` for unmatched vertices.
    pub fn solve(&mut self, n: usize, edges: &[(usize, usize, i32)]) -> Vec<Option<usize>> {
        self.reset(n);
        let mut w_max = 0;
        for &(u, v, w) in edges {
            debug_assert!(u != v && w > 0);
            let (u, v) = (u + 1, v + 1);
            self.g[u * self.cap + v].w = w;
            self.g[v * self.cap + u].w = w;
            self.adj[u].push(v);
            self.adj[v].push(u);
            w_max = w_max.max(w);
        }
        for u in 1..=n {
            self.lab[u] = w_max;
        }
        while self.augment_phase() {}
        (1..=n)
            .map(|u| {
                let m = self.mate[u];
                (m != 0).then(|| m - 1)
            })
            .collect()
    }

    fn reset(&mut self, n: usize) {
        self.n = n;
        self.nx = n;
        self.cap = 2 * n + 1;
        let cap = self.cap;
        self.g.clear();
        self.g.resize(cap * cap, Edge::default());
        for u in 1..=n {
            for v in 1..=n {
                self.g[u * cap + v] = Edge { u, v, w: 0 };
            }
        }
        self.lab.clear();
        self.lab.resize(cap, 0);
        self.mate.clear();
        self.mate.resize(cap, 0);
        self.slack.clear();
        self.slack.resize(cap, 0);
        self.pa.clear();
        self.pa.resize(cap, 0);
        self.s.clear();
        self.s.resize(cap, -1);
        self.vis.clear();
        self.vis.resize(cap, 0);
        self.stamp = 0;
        self.st.clear();
        self.st.extend((0..cap).map(|x| if x <= n { x } else { 0 }));
        self.flower_from.clear();
        self.flower_from.resize(cap * (n + 1), 0);
        for u in 1..=n {
            self.flower_from[u * (n + 1) + u] = u;
        }
        self.flower.resize_with(cap, Vec::new);
        for f in &mut self.flower {
            f.clear();
        }
        self.q.clear();
        self.adj.resize_with(n + 1, Vec::new);
        for a in &mut self.adj {
            a.clear();
        }
    }

    fn update_slack(&mut self, u: usize, x: usize) {
        let sx = self.slack[x];
        if sx == 0 || self.dist(self.e(u, x)) < self.dist(self.e(sx, x)) {
            self.slack[x] = u;
        }
    }

    fn set_slack(&mut self, x: usize) {
        self.slack[x] = 0;
        for u in 1..=self.n {
            if self.e(u, x).w > 0 && self.st[u] != x && self.s[self.st[u]] == 0 {
                self.update_slack(u, x);
            }
        }
    }

    fn q_push(&mut self, x: usize) {
        if x <= self.n {
            self.q.push_back(x);
        } else {
            for i in 0..self.flower[x].len() {
                let y = self.flower[x][i];
                self.q_push(y);
            }
        }
    }

    fn set_st(&mut self, x: usize, b: usize) {
        self.st[x] = b;
        if x > self.n {
            for i in 0..self.flower[x].len() {
                let y = self.flower[x][i];
                self.set_st(y, b);
            }
        }
    }

    fn get_pr(&mut self, b: usize, xr: usize) -> usize {
        let f = &mut self.flower[b];
        let pr = f.iter().position(|&y| y == xr).expect("vertex in blossom");
        if pr % 2 == 1 {
            f[1..].reverse();
            f.len() - pr
        } else {
            pr
        }
    }

    fn set_match(&mut self, u: usize, v: usize) {
        let e = self.e(u, v);
        self.mate[u] = e.v;
        if u > self.n {
            let xr = self.ff(u, e.u);
            let pr = self.get_pr(u, xr);
            for i in 0..pr {
                let (a, b) = (self.flower[u][i], self.flower[u][i ^ 1]);
                self.set_match(a, b);
            }
            self.set_match(xr, v);
            self.flower[u].rotate_left(pr);
        }
    }

    fn augment(&mut self, mut u: usize, mut v: usize) {
        loop {
            let xnv = self.st[self.mate[u]];
            self.set_match(u, v);
            if xnv == 0 {
                return;
            }
            let t = self.st[self.pa[xnv]];
            self.set_match(xnv, t);
            u = t;
            v = xnv;
        }
    }

    fn get_lca(&mut self, mut u: usize, mut v: usize) -> usize {
        self.stamp += 1;
        let t = self.stamp;
        while u != 0 || v != 0 {
            if u != 0 {
                if self.vis[u] == t {
                    return u;
                }
                self.vis[u] = t;
                u = self.st[self.mate[u]];
                if u != 0 {
                    u = self.st[self.pa[u]];
                }
            }
            std::mem::swap(&mut u, &mut v);
        }
        0
    }

    fn add_blossom(&mut self, u: usize, lca: usize, v: usize) {
        let n = self.n;
        let mut b = n + 1;
        while b <= self.nx && self.st[b] != 0 {
            b += 1;
        }
        if b > self.nx {
            self.nx += 1;
        }
        self.lab[b] = 0;
        self.s[b] = 0;
        self.mate[b] = self.mate[lca];
        self.flower[b].clear();
        self.flower[b].push(lca);
        let mut x = u;
        while x != lca {
            let y = self.st[self.mate[x]];
            self.flower[b].push(x);
            self.flower[b].push(y);
            self.q_push(y);
            x = self.st[self.pa[y]];
        }
        self.flower[b][1..].reverse();
        let mut x = v;
        while x != lca {
            let y = self.st[self.mate[x]];
            self.flower[b].push(x);
            self.flower[b].push(y);
            self.q_push(y);
            x = self.st[self.pa[y]];
        }
        self.set_st(b, b);
        let cap = self.cap;
        for x in 1..=self.nx {
            self.g[b * cap + x].w = 0;
            self.g[x * cap + b].w = 0;
        }
        for x in 1..=n {
            self.set_ff(b, x, 0);
        }
        for i in 0..self.flower[b].len() {
            let xs = self.flower[b][i];
            for x in 1..=self.nx {
                let bx = self.e(b, x);
                let sx = self.e(xs, x);
                if bx.w == 0 || self.dist(sx) < self.dist(bx) {
                    self.g[b * cap + x] = sx;
                    self.g[x * cap + b] = self.e(x, xs);
                }
            }
            for x in 1..=n {
                if self.ff(xs, x) != 0 {
                    self.set_ff(b, x, xs);
                }
            }
        }
        self.set_slack(b);
    }

    fn expand_blossom(&mut self, b: usize) {
        for i in 0..self.flower[b].len() {
            let y = self.flower[b][i];
            self.set_st(y, y);
        }
        let xr = self.ff(b, self.e(b, self.pa[b]).u);
        let pr = self.get_pr(b, xr);
        let mut i = 0;
        while i < pr {
            let xs = self.flower[b][i];
            let xns = self.flower[b][i + 1];
            self.pa[xs] = self.e(xns, xs).u;
            self.s[xs] = 1;
            self.s[xns] = 0;
            self.slack[xs] = 0;
            self.set_slack(xns);
            self.q_push(xns);
            i += 2;
        }
        self.s[xr] = 1;
        self.pa[xr] = self.pa[b];
        for i in pr + 1..self.flower[b].len() {
            let xs = self.flower[b][i];
            self.s[xs] = -1;
            self.set_slack(xs);
        }
        self.st[b] = 0;
    }

    fn on_found_edge(&mut self, e: Edge) -> bool {
        let u = self.st[e.u];
        let v = self.st[e.v];
        if self.s[v] == -1 {
            self.pa[v] = e.u;
            self.s[v] = 1;
            let nu = self.st[self.mate[v]];
            self.slack[v] = 0;
            self.slack[nu] = 0;
            self.s[nu] = 0;
            self.q_push(nu);
        } else if self.s[v] == 0 {
            let lca = self.get_lca(u, v);
            if lca == 0 {
                self.augment(u, v);
                self.augment(v, u);
                return true;
            }
            self.add_blossom(u, lca, v);
        }
        false
    }

    fn augment_phase(&mut self) -> bool {
        let n = self.n;
        for x in 1..=self.nx {
            self.s[x] = -1;
            self.slack[x] = 0;
        }
        self.q.clear();
        for x in 1..=self.nx {
            if self.st[x] == x && self.mate[x] == 0 {
                self.pa[x] = 0;
                self.s[x] = 0;
                self.q_push(x);
            }
        }
        if self.q.is_empty() {
            return false;
        }
        loop {
            while let Some(u) = self.q.pop_front() {
                if self.s[self.st[u]] == 1 {
                    continue;
                }
                for i in 0..self.adj[u].len() {
                    let v = self.adj[u][i];
                    let e = self.e(u, v);
                    if e.w > 0 && self.st[u] != self.st[v] {
                        if self.dist(e) == 0 {
                            if self.on_found_edge(e) {
                                return true;
                            }
                        } else {
                            let sv = self.st[v];
                            self.update_slack(u, sv);
                        }
                    }
                }
            }
            let mut d = i32::MAX;
            for b in n + 1..=self.nx {
                if self.st[b] == b && self.s[b] == 1 {
                    d = d.min(self.lab[b] / 2);
                }
            }
            for x in 1..=self.nx {
                let sx = self.slack[x];
                if self.st[x] == x && sx != 0 {
                    let dd = self.dist(self.e(sx, x));
                    if self.s[x] == -1 {
                        d = d.min(dd);
                    } else if self.s[x] == 0 {
                        d = d.min(dd / 2);
                    }
                }
            }
            // check before mutating: `d` may still be i32::MAX here
            if (1..=n).any(|u| self.s[self.st[u]] == 0 && self.lab[u] <= d) {
                return false;
            }
            for u in 1..=n {
                match self.s[self.st[u]] {
                    0 => self.lab[u] -= d,
                    1 => self.lab[u] += d,
                    _ => {}
                }
            }
            for b in n + 1..=self.nx {
                if self.st[b] == b {
                    match self.s[b] {
                        0 => self.lab[b] += 2 * d,
                        1 => self.lab[b] -= 2 * d,
                        _ => {}
                    }
                }
            }
            self.q.clear();
            for x in 1..=self.nx {
                let sx = self.slack[x];
                if self.st[x] == x && sx != 0 && self.st[sx] != x && self.dist(self.e(sx, x)) == 0 {
                    let e = self.e(sx, x);
                    if self.on_found_edge(e) {
                        return true;
                    }
                }
            }
            for b in n + 1..=self.nx {
                if self.st[b] == b && self.s[b] == 1 && self.lab[b] == 0 {
                    self.expand_blossom(b);
                }
            }
        }
    }
}
