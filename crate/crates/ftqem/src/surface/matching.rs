//! Minimum-weight matching of defects against each other and a boundary.
//!
//! Every defect either pairs with another defect at cost `w(u,v)` or with the
//! boundary at cost `b(u)`. This equals a maximum-weight (not necessarily
//! perfect) matching with gains `b(u) + b(v) − w(u,v)`; pairs without a positive
//! gain are never needed, so the defect graph splits into independent
//! components that are solved separately.

use std::cell::RefCell;

use super::blossom::Blossom;

thread_local! {
    static SOLVER: RefCell<Blossom> = RefCell::new(Blossom::new());
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mate {
    Defect(usize),
    Boundary,
}

/// Exact minimum-weight matching. `w` must be symmetric, `b` non-negative.
pub fn min_weight_boundary_matching<W, B>(n: usize, w: W, b: B) -> Vec<Mate>
where
    W: Fn(usize, usize) -> i32,
    B: Fn(usize) -> i32,
{
    let mut mates = vec![Mate::Boundary; n];
    if n == 0 {
        return mates;
    }
    let bnd: Vec<i32> = (0..n).map(&b).collect();

    // Union-find over useful pairs.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut useful: Vec<(usize, usize, i32)> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let wuv = w(u, v);
            if wuv < bnd[u] + bnd[v] {
                useful.push((u, v, wuv));
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru] = rv;
                }
            }
        }
    }
    let mut comp_of = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for u in 0..n {
        let r = find(&mut parent, u);
        if comp_of[r] == usize::MAX {
            comp_of[r] = comps.len();
            comps.push(Vec::new());
        }
        let c = comp_of[r];
        comp_of[u] = c;
        comps[c].push(u);
    }
    let mut comp_edges: Vec<Vec<(usize, usize, i32)>> = vec![Vec::new(); comps.len()];
    for &(u, v, wuv) in &useful {
        comp_edges[comp_of[u]].push((u, v, wuv));
    }

    let mut local = vec![0usize; n];
    for (members, edges) in comps.iter().zip(comp_edges) {
        match members.len() {
            1 => {}
            2 => {
                let (u, v) = (members[0], members[1]);
                mates[u] = Mate::Defect(v);
                mates[v] = Mate::Defect(u);
            }
            k => {
                for (i, &u) in members.iter().enumerate() {
                    local[u] = i;
                }
                // Maximum-weight matching with gains b(u) + b(v) − w(u,v) > 0;
                // unmatched defects go to the boundary.
                let g: Vec<(usize, usize, i32)> = edges
                    .iter()
                    .map(|&(u, v, wuv)| (local[u], local[v], bnd[u] + bnd[v] - wuv))
                    .collect();
                let mate = SOLVER.with(|s| s.borrow_mut().solve(k, &g));
                for (i, &u) in members.iter().enumerate() {
                    mates[u] = match mate[i] {
                        Some(m) => Mate::Defect(members[m]),
                        None => Mate::Boundary,
                    };
                }
            }
        }
    }
    mates
}

pub fn matching_cost<W, B>(mates: &[Mate], w: W, b: B) -> i64
where
    W: Fn(usize, usize) -> i32,
    B: Fn(usize) -> i32,
{
    let mut cost = 0i64;
    for (u, m) in mates.iter().enumerate() {
        match *m {
            Mate::Boundary => cost += b(u) as i64,
            Mate::Defect(v) if v > u => cost += w(u, v) as i64,
            _ => {}
        }
    }
    cost
}

/// Exhaustive subset DP over all boundary-augmented pairings; O(2^n n).
pub fn exhaustive_min_cost<W, B>(n: usize, w: W, b: B) -> i64
where
    W: Fn(usize, usize) -> i32,
    B: Fn(usize) -> i32,
{
    assert!(n <= 20, "exhaustive matcher is for small instances");
    let full = (1usize << n) - 1;
    let mut f = vec![i64::MAX; full + 1];
    f[0] = 0;
    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut best = b(i) as i64 + f[rest];
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            r &= r - 1;
            let c = w(i, j) as i64 + f[rest & !(1 << j)];
            best = best.min(c);
        }
        f[mask] = best;
    }
    f[full]
}
