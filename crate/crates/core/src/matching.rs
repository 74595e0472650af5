//! Exact weighted matching on general graphs.
//!
//! `max_weight_matching` is Edmonds' blossom algorithm with dual variables,
//! O(n³), following the well-known primal-dual formulation by Galil (1986)
//! in the shape popularised by van Rantwijk. Weights are integers and are
//! doubled internally so every dual stays integral.

const NONE: usize = usize::MAX;

struct State<'a> {
    n: usize,
    edges: &'a [(usize, usize, i64)],
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<i8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl State<'_> {
    fn w(&self, k: usize) -> i64 {
        2 * self.edges[k].2
    }

    fn slack(&self, k: usize) -> i64 {
        let (i, j, _) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * self.w(k)
    }

    fn leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.n {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                self.leaves(t, out);
            }
        }
    }

    fn leaves_of(&self, b: usize) -> Vec<usize> {
        let mut v = Vec::new();
        self.leaves(b, &mut v);
        v
    }

    fn assign_label(&mut self, w: usize, t: i8, p: usize) {
        let b = self.inblossom[w];
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let mut q = std::mem::take(&mut self.queue);
            self.leaves(b, &mut q);
            self.queue = q;
        } else if t == 2 {
            let base = self.blossombase[b];
            let mb = self.mate[base];
            self.assign_label(self.endpoint[mb], 1, mb ^ 1);
        }
    }

    fn scan_blossom(&mut self, mut v: usize, mut w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slot");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        for v in self.leaves_of_path(&path) {
            if self.label[self.inblossom[v]] == 2 {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }
        let mut bestedgeto = vec![NONE; 2 * self.n];
        for &bv in &path {
            let nblists: Vec<Vec<usize>> = match self.blossombestedges[bv].take() {
                Some(l) => vec![l],
                None => self.leaves_of(bv).iter().map(|&v| self.neighbend[v].iter().map(|p| p / 2).collect()).collect(),
            };
            for nbl in nblists {
                for k in nbl {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.bestedge[bv] = NONE;
        }
        let list: Vec<usize> = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        let mut best = NONE;
        for &k in &list {
            if best == NONE || self.slack(k) < self.slack(best) {
                best = k;
            }
        }
        self.blossombestedges[b] = Some(list);
        self.bestedge[b] = best;
        self.blossomchilds[b] = path;
        self.blossomendps[b] = endps;
    }

    fn leaves_of_path(&self, path: &[usize]) -> Vec<usize> {
        let mut v = Vec::new();
        for &b in path {
            self.leaves(b, &mut v);
        }
        v
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.n {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves_of(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let len = childs.len() as isize;
            let mut j = childs.iter().position(|&c| c == entrychild).unwrap() as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 == 1 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let at = |j: isize| j.rem_euclid(len) as usize;
            let endps = self.blossomendps[b].clone();
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[p ^ 1]] = 0;
                let q = endps[at(j - endptrick as isize)] ^ endptrick ^ 1;
                self.label[self.endpoint[q]] = 0;
                self.assign_label(self.endpoint[p ^ 1], 2, p);
                self.allowedge[endps[at(j - endptrick as isize)] / 2] = true;
                j += jstep;
                p = endps[at(j - endptrick as isize)] ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = childs[at(j)];
            let e = self.endpoint[p ^ 1];
            self.label[e] = 2;
            self.label[bv] = 2;
            self.labelend[e] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[at(j)] != entrychild {
                let bv = childs[at(j)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let mut found = NONE;
                for v in self.leaves_of(bv) {
                    if self.label[v] != 0 {
                        found = v;
                        break;
                    }
                }
                if found != NONE {
                    let v = found;
                    self.label[v] = 0;
                    let mb = self.mate[self.blossombase[bv]];
                    self.label[self.endpoint[mb]] = 0;
                    let le = self.labelend[v];
                    self.assign_label(v, 2, le);
                }
                j += jstep;
            }
        }
        self.label[b] = -1;
        self.labelend[b] = NONE;
        self.blossomchilds[b] = Vec::new();
        self.blossomendps[b] = Vec::new();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.n {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len() as isize;
        let i = self.blossomchilds[b].iter().position(|&c| c == t).unwrap();
        let mut j = i as isize;
        let (jstep, endptrick): (isize, usize) = if i & 1 == 1 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        let at = |j: isize| j.rem_euclid(len) as usize;
        while j != 0 {
            j += jstep;
            let t = self.blossomchilds[b][at(j)];
            let p = self.blossomendps[b][at(j - endptrick as isize)] ^ endptrick;
            if t >= self.n {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = self.blossomchilds[b][at(j)];
            if t >= self.n {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                if bs >= self.n {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                if bt >= self.n {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }
}

/// Maximum-weight matching; with `max_cardinality` the maximum-weight one
/// among maximum-cardinality matchings. Returns each vertex's partner.
pub fn max_weight_matching(n: usize, edges: &[(usize, usize, i64)], max_cardinality: bool) -> Vec<Option<usize>> {
    if edges.is_empty() || n == 0 {
        return vec![None; n];
    }
    let st = solve(n, edges, max_cardinality);
    st.mate.iter().map(|&p| (p != NONE).then(|| st.endpoint[p])).collect()
}

fn solve(n: usize, edges: &[(usize, usize, i64)], max_cardinality: bool) -> State<'_> {
    let maxweight = edges.iter().map(|e| 2 * e.2).max().unwrap().max(0);
    let mut neighbend = vec![Vec::new(); n];
    for (k, &(i, j, _)) in edges.iter().enumerate() {
        neighbend[i].push(2 * k + 1);
        neighbend[j].push(2 * k);
    }
    let mut st = State {
        n,
        edges,
        endpoint: (0..2 * edges.len()).map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 }).collect(),
        neighbend,
        mate: vec![NONE; n],
        label: vec![0; 2 * n],
        labelend: vec![NONE; 2 * n],
        inblossom: (0..n).collect(),
        blossomparent: vec![NONE; 2 * n],
        blossomchilds: vec![Vec::new(); 2 * n],
        blossombase: (0..n).chain(std::iter::repeat_n(NONE, n)).collect(),
        blossomendps: vec![Vec::new(); 2 * n],
        bestedge: vec![NONE; 2 * n],
        blossombestedges: vec![None; 2 * n],
        unusedblossoms: (n..2 * n).collect(),
        dualvar: std::iter::repeat_n(maxweight, n).chain(std::iter::repeat_n(0, n)).collect(),
        allowedge: vec![false; edges.len()],
        queue: Vec::new(),
    };

    for _ in 0..n {
        st.label.iter_mut().for_each(|l| *l = 0);
        st.bestedge.iter_mut().for_each(|b| *b = NONE);
        for b in n..2 * n {
            st.blossombestedges[b] = None;
        }
        st.allowedge.iter_mut().for_each(|a| *a = false);
        st.queue.clear();
        for v in 0..n {
            if st.mate[v] == NONE && st.label[st.inblossom[v]] == 0 {
                st.assign_label(v, 1, NONE);
            }
        }
        let mut augmented = false;
        loop {
            while let Some(v) = st.queue.pop() {
                if augmented {
                    break;
                }
                for idx in 0..st.neighbend[v].len() {
                    let p = st.neighbend[v][idx];
                    let k = p / 2;
                    let w = st.endpoint[p];
                    if st.inblossom[v] == st.inblossom[w] {
                        continue;
                    }
                    let mut kslack = 0;
                    if !st.allowedge[k] {
                        kslack = st.slack(k);
                        if kslack <= 0 {
                            st.allowedge[k] = true;
                        }
                    }
                    if st.allowedge[k] {
                        let lw = st.label[st.inblossom[w]];
                        if lw == 0 {
                            st.assign_label(w, 2, p ^ 1);
                        } else if lw == 1 {
                            let base = st.scan_blossom(v, w);
                            if base != NONE {
                                st.add_blossom(base, k);
                            } else {
                                st.augment_matching(k);
                                augmented = true;
                                break;
                            }
                        } else if st.label[w] == 0 {
                            st.label[w] = 2;
                            st.labelend[w] = p ^ 1;
                        }
                    } else if st.label[st.inblossom[w]] == 1 {
                        let b = st.inblossom[v];
                        if st.bestedge[b] == NONE || kslack < st.slack(st.bestedge[b]) {
                            st.bestedge[b] = k;
                        }
                    } else if st.label[w] == 0 && (st.bestedge[w] == NONE || kslack < st.slack(st.bestedge[w])) {
                        st.bestedge[w] = k;
                    }
                }
            }
            if augmented {
                break;
            }
            // dual update
            let mut deltatype = -1;
            let mut delta = 0i64;
            let mut deltaedge = NONE;
            let mut deltablossom = NONE;
            if !max_cardinality {
                deltatype = 1;
                delta = *st.dualvar[..n].iter().min().unwrap();
            }
            for v in 0..n {
                if st.label[st.inblossom[v]] == 0 && st.bestedge[v] != NONE {
                    let d = st.slack(st.bestedge[v]);
                    if deltatype == -1 || d < delta {
                        delta = d;
                        deltatype = 2;
                        deltaedge = st.bestedge[v];
                    }
                }
            }
            for b in 0..2 * n {
                if st.blossomparent[b] == NONE && st.label[b] == 1 && st.bestedge[b] != NONE {
                    let d = st.slack(st.bestedge[b]) / 2;
                    if deltatype == -1 || d < delta {
                        delta = d;
                        deltatype = 3;
                        deltaedge = st.bestedge[b];
                    }
                }
            }
            for b in n..2 * n {
                if st.blossombase[b] != NONE
                    && st.blossomparent[b] == NONE
                    && st.label[b] == 2
                    && (deltatype == -1 || st.dualvar[b] < delta)
                {
                    delta = st.dualvar[b];
                    deltatype = 4;
                    deltablossom = b;
                }
            }
            if deltatype == -1 {
                deltatype = 1;
                delta = (*st.dualvar[..n].iter().min().unwrap()).max(0);
            }
            for v in 0..n {
                match st.label[st.inblossom[v]] {
                    1 => st.dualvar[v] -= delta,
                    2 => st.dualvar[v] += delta,
                    _ => {}
                }
            }
            for b in n..2 * n {
                if st.blossombase[b] != NONE && st.blossomparent[b] == NONE {
                    match st.label[b] {
                        1 => st.dualvar[b] += delta,
                        2 => st.dualvar[b] -= delta,
                        _ => {}
                    }
                }
            }
            match deltatype {
                1 => break,
                2 => {
                    st.allowedge[deltaedge] = true;
                    let (mut i, j, _) = edges[deltaedge];
                    if st.label[st.inblossom[i]] == 0 {
                        i = j;
                    }
                    st.queue.push(i);
                }
                3 => {
                    st.allowedge[deltaedge] = true;
                    st.queue.push(edges[deltaedge].0);
                }
                _ => st.expand_blossom(deltablossom, false),
            }
        }
        if !augmented {
            break;
        }
        for b in n..2 * n {
            if st.blossomparent[b] == NONE && st.blossombase[b] != NONE && st.label[b] == 1 && st.dualvar[b] == 0 {
                st.expand_blossom(b, true);
            }
        }
    }
    st
}

/// Minimum-weight perfect matching on the complete graph over `n` points
/// (n even) with integer distances `d(i, j)`. Pairs come out with i < j,
/// sorted.
///
/// The blossom solver runs on a sparse candidate graph (each point's
/// nearest neighbours). Its final duals are then checked against every
/// pair of the complete graph; violated pairs are added and the solve
/// repeated, so the result is an exact optimum of the complete graph.
pub fn min_weight_perfect_matching(n: usize, d: impl Fn(usize, usize) -> i64) -> Vec<(usize, usize)> {
    assert!(n % 2 == 0, "odd vertex count");
    if n == 0 {
        return Vec::new();
    }
    let mut dist = vec![0i64; n * n];
    let mut maxd = 0;
    for i in 0..n {
        for j in i + 1..n {
            let w = d(i, j);
            maxd = maxd.max(w);
            dist[i * n + j] = w;
            dist[j * n + i] = w;
        }
    }
    let weight = |i: usize, j: usize| maxd + 1 - dist[i * n + j];

    let mut have = vec![false; n * n];
    let mut edges = Vec::new();
    let mut add = |i: usize, j: usize, edges: &mut Vec<(usize, usize, i64)>| {
        let (i, j) = (i.min(j), i.max(j));
        if i != j && !have[i * n + j] {
            have[i * n + j] = true;
            edges.push((i, j, weight(i, j)));
        }
    };
    let mut k = 10.min(n - 1);
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut nearest = |k: usize, edges: &mut Vec<(usize, usize, i64)>, add: &mut dyn FnMut(usize, usize, &mut Vec<(usize, usize, i64)>)| {
        for i in 0..n {
            order.clear();
            order.extend((0..n).filter(|&j| j != i));
            if k < order.len() {
                order.select_nth_unstable_by_key(k - 1, |&j| (dist[i * n + j], j));
            }
            for &j in &order[..k.min(order.len())] {
                add(i, j, edges);
            }
        }
    };
    nearest(k, &mut edges, &mut add);

    loop {
        let st = solve(n, &edges, true);
        if st.mate.iter().any(|&p| p == NONE) {
            // the candidate graph has no perfect matching yet
            k = (2 * k).min(n - 1);
            nearest(k, &mut edges, &mut add);
            continue;
        }
        let violated = dual_violations(&st, n, &weight);
        if violated.is_empty() {
            let mut pairs: Vec<(usize, usize)> = (0..n)
                .filter_map(|i| {
                    let j = st.endpoint[st.mate[i]];
                    (j > i).then_some((i, j))
                })
                .collect();
            pairs.sort();
            return pairs;
        }
        drop(st);
        for (i, j) in violated {
            add(i, j, &mut edges);
        }
    }
}

/// Pairs (i, j) whose dual constraint fails in the solver's final state,
/// i.e. with negative reduced cost under the doubled integer scaling.
fn dual_violations(st: &State, n: usize, weight: &dyn Fn(usize, usize) -> i64) -> Vec<(usize, usize)> {
    // ancestor blossoms of each vertex, outermost first
    let chains: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut c = Vec::new();
            let mut b = st.blossomparent[v];
            while b != NONE {
                c.push(b);
                b = st.blossomparent[b];
            }
            c.reverse();
            c
        })
        .collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut s = st.dualvar[i] + st.dualvar[j] - 4 * weight(i, j);
            if s >= 0 {
                continue;
            }
            for (a, b) in chains[i].iter().zip(&chains[j]) {
                if a != b {
                    break;
                }
                s += 2 * st.dualvar[*a];
            }
            if s < 0 {
                out.push((i, j));
            }
        }
    }
    out
}

/// Exhaustive minimum-weight perfect matching, for cross-checks on small
/// instances. Returns the optimal total weight.
pub fn brute_force_min_matching(n: usize, d: &dyn Fn(usize, usize) -> i64) -> i64 {
    fn go(rest: &mut Vec<usize>, d: &dyn Fn(usize, usize) -> i64) -> i64 {
        if rest.is_empty() {
            return 0;
        }
        let a = rest.remove(0);
        let mut best = i64::MAX;
        for k in 0..rest.len() {
            let b = rest.remove(k);
            best = best.min(d(a, b) + go(rest, d));
            rest.insert(k, b);
        }
        rest.insert(0, a);
        best
    }
    assert!(n % 2 == 0);
    go(&mut (0..n).collect(), d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_cases() {
        assert_eq!(max_weight_matching(2, &[(0, 1, 3)], false), vec![Some(1), Some(0)]);
        // path 0-1-2-3: best picks the heavy middle edge unless cardinality is forced
        let e = [(0, 1, 2), (1, 2, 5), (2, 3, 2)];
        assert_eq!(max_weight_matching(4, &e, false), vec![None, Some(2), Some(1), None]);
        assert_eq!(max_weight_matching(4, &e, true), vec![Some(1), Some(0), Some(3), Some(2)]);
    }

    #[test]
    fn blossom_case() {
        // odd cycle with a pendant forces a blossom
        let e = [(0, 1, 8), (0, 2, 9), (1, 2, 10), (2, 3, 7)];
        assert_eq!(max_weight_matching(4, &e, false), vec![Some(1), Some(0), Some(3), Some(2)]);
        let e = [(0, 1, 9), (0, 2, 8), (1, 2, 10), (0, 3, 5), (3, 4, 4), (0, 5, 3)];
        assert_eq!(max_weight_matching(6, &e, false), vec![Some(5), Some(2), Some(1), Some(4), Some(3), Some(0)]);
    }
}
