//! Code families on tori: Kitaev's code and stacks of it, the square-octagon
//! color code, and the square-octagon subsystem color code.
//!
//! Square-octagon geometry: diamonds (the square faces) sit at integer points
//! (i, j) with vertices t, r, b, l = 0..3. Diamonds with i + j even are "A",
//! odd ones "B"; one translation cell holds an A and a B diamond and the cell
//! vectors are (1,1) and (−1,1) in diamond coordinates.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gf2::{self, to_sym, BitVec, Basis};
use crate::pauli::{Lattice, Pauli, Site, Template, X, Y, Z};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeKind {
    Stabilizer,
    Subsystem,
}

#[derive(Clone, Debug)]
pub struct CodeDef {
    pub name: String,
    pub lattice: Lattice,
    pub site_labels: Vec<String>,
    pub stabilizers: Vec<Template>,
    /// Gauge generators; empty for stabilizer codes.
    pub gauge: Vec<Template>,
    pub kind: CodeKind,
}

impl CodeDef {
    pub fn l(&self) -> usize {
        self.lattice.l
    }

    pub fn sites(&self) -> usize {
        self.lattice.sites
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    /// Same templates on an `l × l` torus.
    pub fn at(&self, l: usize) -> CodeDef {
        CodeDef { lattice: Lattice::new(l, self.sites()), ..self.clone() }
    }

    /// Instances ordered template-major, then cell `(y, x)` row-major:
    /// index = t·L² + y·L + x.
    pub fn stabilizer_instances(&self) -> Vec<Pauli> {
        instances(&self.stabilizers, self.lattice)
    }

    pub fn gauge_instances(&self) -> Vec<Pauli> {
        instances(&self.gauge, self.lattice)
    }

    /// Largest template range (the locality constant w).
    pub fn locality(&self) -> usize {
        self.stabilizers.iter().chain(&self.gauge).map(|t| t.range()).max().unwrap_or(0)
    }

    /// Number of logical qubits `N − rank(S)` (stabilizer codes) or
    /// `N − (rank G + rank S)/2` (subsystem codes).
    pub fn logical_count(&self) -> usize {
        let rs = gf2::rank(&syms(&self.stabilizer_instances()));
        match self.kind {
            CodeKind::Stabilizer => self.n() - rs,
            CodeKind::Subsystem => {
                let rg = gf2::rank(&syms(&self.gauge_instances()));
                self.n() - (rg + rs) / 2
            }
        }
    }

    /// Re-express the code on the chessboard super-cell with cell vectors
    /// (1,1) and (−1,1); old cell (x,y) becomes new cell
    /// ((x−b+y)/2, (y−x+b)/2) with block b = (x+y) mod 2 and site b·sites + s.
    pub fn block_chessboard(&self) -> CodeDef {
        let sites = self.sites();
        let conv = |t: &Template, bx: i32| {
            let terms = t
                .terms()
                .iter()
                .map(|&(s, b)| {
                    let (x, y) = (s.dx + bx, s.dy);
                    (chess_site(x, y, s.s as usize, sites), b)
                })
                .collect();
            Template::from_terms(terms, t.phase())
        };
        let blk = |ts: &[Template]| ts.iter().flat_map(|t| [conv(t, 0), conv(t, 1)]).collect::<Vec<_>>();
        let mut labels = Vec::with_capacity(2 * sites);
        for b in ["even", "odd"] {
            for l in &self.site_labels {
                labels.push(format!("{b}:{l}"));
            }
        }
        CodeDef {
            name: format!("{}@chess", self.name),
            lattice: Lattice::new(self.l(), 2 * sites),
            site_labels: labels,
            stabilizers: blk(&self.stabilizers),
            gauge: blk(&self.gauge),
            kind: self.kind,
        }
    }
}

/// Site on the chessboard super-lattice for old cell (x, y).
pub fn chess_site(x: i32, y: i32, s: usize, sites: usize) -> Site {
    let b = (x + y).rem_euclid(2);
    let u = (x - b + y).div_euclid(2);
    let v = (y - x + b).div_euclid(2);
    Site::new(u, v, b as usize * sites + s)
}

pub fn instances(ts: &[Template], lat: Lattice) -> Vec<Pauli> {
    let l = lat.l as i64;
    let mut out = Vec::with_capacity(ts.len() * lat.l * lat.l);
    for t in ts {
        for y in 0..l {
            for x in 0..l {
                out.push(t.instance(lat, x, y));
            }
        }
    }
    out
}

pub fn syms(ps: &[Pauli]) -> Vec<BitVec> {
    ps.iter().map(to_sym).collect()
}

fn check_l(l: usize) -> Result<()> {
    if l < 2 {
        return Err(Error::InvalidSize(format!("L = {l}, need L ≥ 2")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Kitaev's code: site 0 = east edge h(x,y), site 1 = north edge v(x,y).

fn ktc_templates(copy: usize) -> Vec<Template> {
    let (h, v) = (2 * copy, 2 * copy + 1);
    vec![
        // star: Z on the four edges at the vertex
        Template::of(&[(0, 0, h, 'Z'), (0, 0, v, 'Z'), (-1, 0, h, 'Z'), (0, -1, v, 'Z')]),
        // plaquette: X around the face with lower-left vertex at the origin
        Template::of(&[(0, 0, h, 'X'), (0, 0, v, 'X'), (0, 1, h, 'X'), (1, 0, v, 'X')]),
    ]
}

pub fn build_ktc(l: usize) -> Result<CodeDef> {
    check_l(l)?;
    Ok(CodeDef {
        name: "ktc".into(),
        lattice: Lattice::new(l, 2),
        site_labels: vec!["h".into(), "v".into()],
        stabilizers: ktc_templates(0),
        gauge: Vec::new(),
        kind: CodeKind::Stabilizer,
    })
}

/// `n` disjoint layers; layer c uses sites 2c (h) and 2c+1 (v).
pub fn build_ktc_stack(n: usize, l: usize) -> Result<CodeDef> {
    check_l(l)?;
    if n < 1 {
        return Err(Error::Construction("stack needs n ≥ 1".into()));
    }
    if n == 1 {
        return build_ktc(l);
    }
    let mut labels = Vec::new();
    let mut stabs = Vec::new();
    for c in 0..n {
        labels.push(format!("h{}", c + 1));
        labels.push(format!("v{}", c + 1));
        stabs.extend(ktc_templates(c));
    }
    Ok(CodeDef {
        name: format!("ktc-stack:{n}"),
        lattice: Lattice::new(l, 2 * n),
        site_labels: labels,
        stabilizers: stabs,
        gauge: Vec::new(),
        kind: CodeKind::Stabilizer,
    })
}

/// Product-state code: a single-qubit Z stabilizer on every site.
pub fn build_trivial(sites: usize, l: usize) -> Result<CodeDef> {
    check_l(l)?;
    Ok(CodeDef {
        name: format!("trivial:{sites}"),
        lattice: Lattice::new(l, sites),
        site_labels: (0..sites).map(|s| format!("q{s}")).collect(),
        stabilizers: (0..sites).map(|s| Template::single(Site::new(0, 0, s), Z)).collect(),
        gauge: Vec::new(),
        kind: CodeKind::Stabilizer,
    })
}

// ---------------------------------------------------------------------------
// Square-octagon lattice.

/// Cell offset and block (0 = A, 1 = B) of diamond (i, j).
pub fn diamond(i: i32, j: i32) -> (i32, i32, usize) {
    if (i + j).rem_euclid(2) == 0 {
        ((i + j).div_euclid(2), (j - i).div_euclid(2), 0)
    } else {
        ((i - 1 + j).div_euclid(2), (j - i + 1).div_euclid(2), 1)
    }
}

const T: usize = 0;
const R: usize = 1;
const B: usize = 2;
const L: usize = 3;

/// TCC qubit: vertex `v` of diamond (i, j).
fn vq(i: i32, j: i32, v: usize) -> Site {
    let (cx, cy, b) = diamond(i, j);
    Site::new(cx, cy, 4 * b + v)
}

/// The eight vertices of the octagon whose lower-left diamond is (i, j).
fn octagon(i: i32, j: i32) -> [(i32, i32, usize); 8] {
    [(i, j, T), (i, j, R), (i + 1, j, L), (i + 1, j, T), (i + 1, j + 1, B), (i + 1, j + 1, L), (i, j + 1, R), (i, j + 1, B)]
}

fn face(sites: &[Site], letter: u8) -> Template {
    Template::from_terms(sites.iter().map(|&s| (s, letter)).collect(), 0)
}

pub fn build_tcc_48(l: usize) -> Result<CodeDef> {
    check_l(l)?;
    let mut faces: Vec<Vec<Site>> = Vec::new();
    for (i, j) in [(0, 0), (1, 0)] {
        faces.push((0..4).map(|v| vq(i, j, v)).collect());
    }
    for (i, j) in [(0, 0), (1, 0)] {
        faces.push(octagon(i, j).iter().map(|&(a, b, v)| vq(a, b, v)).collect());
    }
    let mut stabs = Vec::new();
    for letter in [X, Z] {
        for f in &faces {
            stabs.push(face(f, letter));
        }
    }
    let mut labels = Vec::new();
    for d in ["A", "B"] {
        for v in ["t", "r", "b", "l"] {
            labels.push(format!("{d}.{v}"));
        }
    }
    Ok(CodeDef {
        name: "tcc48".into(),
        lattice: Lattice::new(l, 8),
        site_labels: labels,
        stabilizers: stabs,
        gauge: Vec::new(),
        kind: CodeKind::Stabilizer,
    })
}

/// Inflated-lattice qubit: corner `k` of the triangle replacing vertex `v` of
/// diamond (i, j). Corner 0 sits in the square's angle, corner 1 in the
/// octagon between edge (v, v+1) and the outgoing link, corner 2 in the
/// octagon between the outgoing link and edge (v, v−1).
fn tq(i: i32, j: i32, v: usize, k: usize) -> Site {
    let (cx, cy, b) = diamond(i, j);
    Site::new(cx, cy, 12 * b + 3 * v + k)
}

fn edge(a: Site, b: Site, letter: u8) -> Template {
    Template::from_terms(vec![(a, letter), (b, letter)], 0)
}

/// Gauge generators of the subsystem color code. Every original edge of the
/// square-octagon lattice becomes a rectangle: two triangle edges (σzσz,
/// solid) and two parallel links, one along each adjacent face. Links
/// alternate σxσx / σyσy around every face, so each qubit sees Z, Z, X, Y.
pub fn tscc_gauge_templates() -> Vec<Template> {
    let mut g = Vec::new();
    for (i, j) in [(0, 0), (1, 0)] {
        for v in 0..4 {
            let w = (v + 1) % 4;
            g.push(edge(tq(i, j, v, 0), tq(i, j, v, 1), Z));
            g.push(edge(tq(i, j, v, 1), tq(i, j, v, 2), Z));
            g.push(edge(tq(i, j, v, 0), tq(i, j, v, 2), Z));
            // link along the square
            g.push(edge(tq(i, j, v, 0), tq(i, j, w, 0), if v % 2 == 0 { X } else { Y }));
            // link along the octagon on the other side of edge (v, v+1)
            g.push(edge(tq(i, j, v, 1), tq(i, j, w, 2), X));
        }
        // links along the two octagons beside the vertical and horizontal
        // inter-diamond edges
        for (v, (a, b), u) in [(T, (i, j + 1), B), (R, (i + 1, j), L)] {
            g.push(edge(tq(i, j, v, 1), tq(a, b, u, 2), Y));
            g.push(edge(tq(i, j, v, 2), tq(a, b, u, 1), Y));
        }
    }
    g
}

fn tscc_labels() -> Vec<String> {
    let mut labels = Vec::new();
    for d in ["A", "B"] {
        for v in ["t", "r", "b", "l"] {
            for k in ["sq", "cw", "ccw"] {
                labels.push(format!("{d}.{v}.{k}"));
            }
        }
    }
    labels
}

/// Gauge-only definition (no stabilizer templates yet).
pub fn tscc_gauge_code(l: usize) -> Result<CodeDef> {
    check_l(l)?;
    Ok(CodeDef {
        name: "tscc48".into(),
        lattice: Lattice::new(l, 24),
        site_labels: tscc_labels(),
        stabilizers: Vec::new(),
        gauge: tscc_gauge_templates(),
        kind: CodeKind::Subsystem,
    })
}

pub fn build_tscc_48(l: usize) -> Result<CodeDef> {
    let mut code = tscc_gauge_code(l)?;
    check_gauge_letters(&code)?;
    code.stabilizers = compute_stabilizer_from_gauge(&code)?.templates;
    Ok(code)
}

/// Every qubit must touch exactly two σzσz edges, one σxσx and one σyσy.
fn check_gauge_letters(code: &CodeDef) -> Result<()> {
    let mut seen = vec![Vec::new(); code.sites()];
    for t in &code.gauge {
        for &(s, b) in t.terms() {
            seen[s.s as usize].push(b);
        }
    }
    for (s, ls) in seen.iter_mut().enumerate() {
        ls.sort();
        if ls[..] != [X, Z, Z, Y] {
            return Err(Error::Construction(format!("site {s} has gauge letters {ls:?}")));
        }
    }
    Ok(())
}

/// S′ = S·S_z: the stabilizer together with all solid (σzσz) gauge edges.
pub fn build_intermediate_sz(tscc: &CodeDef) -> Result<CodeDef> {
    if tscc.kind != CodeKind::Subsystem {
        return Err(Error::Construction(format!("{} is not a subsystem code", tscc.name)));
    }
    let solid = tscc.gauge.iter().filter(|t| t.terms().iter().all(|&(_, b)| b == Z)).cloned();
    let mut stabs = tscc.stabilizers.clone();
    stabs.extend(solid);
    Ok(CodeDef {
        name: format!("{}-sz", tscc.name),
        lattice: tscc.lattice,
        site_labels: tscc.site_labels.clone(),
        stabilizers: stabs,
        gauge: Vec::new(),
        kind: CodeKind::Stabilizer,
    })
}

/// Solid-edge templates of a subsystem code.
pub fn solid_templates(code: &CodeDef) -> Vec<Template> {
    code.gauge.iter().filter(|t| t.terms().iter().all(|&(_, b)| b == Z)).cloned().collect()
}

// ---------------------------------------------------------------------------
// Stabilizer of a subsystem code.

#[derive(Clone, Debug)]
pub struct GaugeCenter {
    pub templates: Vec<Template>,
    /// Window side (cells) at which the localized set generated Z(G) ∩ G.
    pub window: usize,
}

/// Z(G) ∩ G of the full torus: elements Σ c_i g_i with c in the kernel of the
/// gauge commutation matrix.
pub fn gauge_center(gauge: &[Pauli]) -> Vec<BitVec> {
    let v = syms(gauge);
    let n = gauge.first().map(|p| p.lattice().n()).unwrap_or(0);
    let omega: Vec<BitVec> = v
        .iter()
        .map(|a| {
            let mut row = BitVec::zeros(v.len());
            for (j, b) in v.iter().enumerate() {
                if gf2::symp(a, b, n) {
                    row.set(j, true);
                }
            }
            row
        })
        .collect();
    let mut out = Vec::new();
    let mut basis = Basis::new(2 * n);
    for c in gf2::nullspace(&omega, v.len()) {
        let mut s = BitVec::zeros(2 * n);
        for i in c.ones() {
            s.xor_with(&v[i]);
        }
        if basis.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

/// Column order with everything outside the window first, so echelon rows
/// whose pivot lies in the window are supported inside it.
fn window_order(lat: Lattice, ox: i64, oy: i64, w: usize) -> (Vec<usize>, usize) {
    let n = lat.n();
    let mut inside = vec![false; n];
    for y in 0..w as i64 {
        for x in 0..w as i64 {
            for s in 0..lat.sites {
                inside[lat.index(ox + x, oy + y, s)] = true;
            }
        }
    }
    let mut order: Vec<usize> = Vec::with_capacity(2 * n);
    for part in [false, true] {
        for q in 0..n {
            if inside[q] == part {
                order.push(q);
                order.push(n + q);
            }
        }
    }
    let outside = 2 * inside.iter().filter(|&&b| !b).count();
    (order, outside)
}

fn permute(v: &BitVec, order: &[usize]) -> BitVec {
    let mut out = BitVec::zeros(v.len());
    for (k, &c) in order.iter().enumerate() {
        if v.get(c) {
            out.set(k, true);
        }
    }
    out
}

fn unpermute(v: &BitVec, order: &[usize]) -> BitVec {
    let mut out = BitVec::zeros(v.len());
    for k in v.ones() {
        out.set(order[k], true);
    }
    out
}

/// Elements of span(gens) ∩ Z(gens) supported in the `w × w` window at the
/// origin of the torus.
fn local_center(gens: &[Pauli], lat: Lattice, w: usize) -> Vec<BitVec> {
    let (order, outside) = window_order(lat, 0, 0, w);
    let mut b = Basis::new(2 * lat.n());
    for g in gens {
        b.insert(permute(&to_sym(g), &order));
    }
    let local: Vec<BitVec> = b
        .rows()
        .iter()
        .zip(b.pivots())
        .filter(|(_, &p)| p >= outside)
        .map(|(r, _)| unpermute(r, &order))
        .collect();
    if local.is_empty() {
        return local;
    }
    let n = lat.n();
    let gsym = syms(gens);
    let rows: Vec<BitVec> = local
        .iter()
        .map(|v| {
            let mut r = BitVec::zeros(gsym.len());
            for (j, g) in gsym.iter().enumerate() {
                if gf2::symp(v, g, n) {
                    r.set(j, true);
                }
            }
            r
        })
        .collect();
    // combinations of local vectors commuting with every generator
    let mut out = Vec::new();
    let comm_t: Vec<BitVec> = transpose(&rows, gsym.len());
    for c in gf2::nullspace(&comm_t, local.len()) {
        let mut s = BitVec::zeros(2 * n);
        for i in c.ones() {
            s.xor_with(&local[i]);
        }
        if !s.is_zero() {
            out.push(s);
        }
    }
    out
}

fn pauli_weight(v: &BitVec, n: usize) -> usize {
    (0..n).filter(|&q| v.get(q) || v.get(n + q)).count()
}

/// Pairwise reduction: replace a vector by its sum with another whenever
/// that lowers the Pauli weight, until no pair improves.
pub fn sparsify(mut vs: Vec<BitVec>, n: usize) -> Vec<BitVec> {
    let mut w: Vec<usize> = vs.iter().map(|v| pauli_weight(v, n)).collect();
    loop {
        let mut improved = false;
        for i in 0..vs.len() {
            for j in 0..vs.len() {
                if i == j {
                    continue;
                }
                let mut t = vs[i].clone();
                t.xor_with(&vs[j]);
                let wt = pauli_weight(&t, n);
                if wt < w[i] {
                    vs[i] = t;
                    w[i] = wt;
                    improved = true;
                }
            }
        }
        if !improved {
            return vs;
        }
    }
}

fn transpose(rows: &[BitVec], ncols: usize) -> Vec<BitVec> {
    let mut t = vec![BitVec::zeros(rows.len()); ncols];
    for (i, r) in rows.iter().enumerate() {
        for j in r.ones() {
            t[j].set(i, true);
        }
    }
    t
}

fn span_rank(ts: &[Template], lat: Lattice) -> usize {
    gf2::rank(&syms(&instances(ts, lat)))
}

/// Translation-invariant, localized generating set of Z(G) ∩ G. The window
/// grows until the translates of the window-supported center elements
/// generate the full center on check tori of two sizes; the set is then
/// pruned greedily, lightest templates first.
pub fn compute_stabilizer_from_gauge(code: &CodeDef) -> Result<GaugeCenter> {
    if code.kind != CodeKind::Subsystem {
        return Err(Error::Construction(format!("{} is not a subsystem code", code.name)));
    }
    let sites = code.sites();
    let reach = code.gauge.iter().map(|t| t.range()).max().unwrap_or(1);
    let checks: Vec<Lattice> = [4usize, 5].iter().map(|&l| Lattice::new(l, sites)).collect();
    let targets: Vec<usize> = checks
        .iter()
        .map(|&lat| {
            let c = gauge_center(&instances(&code.gauge, lat));
            gf2::rank(&c)
        })
        .collect();
    if targets.iter().all(|&t| t == 0) {
        return Ok(GaugeCenter { templates: Vec::new(), window: 0 });
    }
    for w in 1..=6usize {
        let lat = Lattice::new(w + 2 * reach + 1, sites);
        let gauge = instances(&code.gauge, lat);
        let mut cands: BTreeSet<Template> = BTreeSet::new();
        for v in sparsify(local_center(&gauge, lat, w), lat.n()) {
            let t = gf2::from_sym(lat, &v).to_template(0, 0).normalized();
            cands.insert(t);
        }
        let mut cands: Vec<Template> = cands.into_iter().collect();
        cands.sort_by_key(|t| (t.range(), t.weight()));
        let mut chosen: Vec<Template> = Vec::new();
        let mut ranks = vec![0usize; checks.len()];
        for t in cands {
            let mut trial = chosen.clone();
            trial.push(t.clone());
            let r: Vec<usize> = checks.iter().map(|&lat| span_rank(&trial, lat)).collect();
            if r.iter().zip(&ranks).any(|(a, b)| a > b) {
                chosen = trial;
                ranks = r;
            }
            if ranks == targets {
                break;
            }
        }
        if ranks == targets {
            return Ok(GaugeCenter { templates: chosen, window: w });
        }
    }
    Err(Error::Construction("no localized generating set within window 6".into()))
}

// ---------------------------------------------------------------------------
// Local centralizer check.

#[derive(Clone, Debug)]
pub struct CentralizerReport {
    pub pass: bool,
    /// Dimension of the windowed centralizer that was enumerated.
    pub checked: usize,
    pub counterexamples: Vec<Pauli>,
}

/// Every operator supported in a `window × window` block that commutes with
/// all stabilizer instances must lie in the stabilizer group (stabilizer
/// codes) or in the gauge group (subsystem codes).
pub fn local_centralizer_check(code: &CodeDef, window: usize) -> Result<CentralizerReport> {
    let lat = code.lattice;
    if window == 0 || 2 * window > lat.l {
        return Err(Error::InvalidWindow(format!("window {window} on L = {}", lat.l)));
    }
    let n = lat.n();
    let mut cols: Vec<usize> = Vec::new();
    for y in 0..window as i64 {
        for x in 0..window as i64 {
            for s in 0..lat.sites {
                let q = lat.index(x, y, s);
                cols.push(q);
                cols.push(n + q);
            }
        }
    }
    let stabs = syms(&code.stabilizer_instances());
    // constraint row for each stabilizer restricted to window columns
    let rows: Vec<BitVec> = stabs
        .iter()
        .map(|g| {
            let mut r = BitVec::zeros(cols.len());
            for (k, &c) in cols.iter().enumerate() {
                let partner = if c < n { c + n } else { c - n };
                if g.get(partner) {
                    r.set(k, true);
                }
            }
            r
        })
        .filter(|r| !r.is_zero())
        .collect();
    let kernel = gf2::nullspace(&rows, cols.len());
    let group = match code.kind {
        CodeKind::Stabilizer => stabs,
        CodeKind::Subsystem => syms(&code.gauge_instances()),
    };
    let mut basis = Basis::new(2 * n);
    for g in group {
        basis.insert(g);
    }
    let mut bad = Vec::new();
    for k in &kernel {
        let mut v = BitVec::zeros(2 * n);
        for i in k.ones() {
            v.set(cols[i], true);
        }
        if !basis.contains(&v) {
            bad.push(gf2::from_sym(lat, &v));
        }
    }
    Ok(CentralizerReport { pass: bad.is_empty(), checked: kernel.len(), counterexamples: bad })
}

// ---------------------------------------------------------------------------
// Registry.

pub const CODE_NAMES: [&str; 6] = ["ktc", "ktc-stack:n", "tcc48", "tscc48", "tscc48-sz", "trivial:n"];

pub fn by_name(name: &str, l: usize) -> Result<CodeDef> {
    match name {
        "ktc" => build_ktc(l),
        "tcc48" => build_tcc_48(l),
        "tscc48" => build_tscc_48(l),
        "tscc48-sz" => build_intermediate_sz(&build_tscc_48(l)?),
        _ => {
            if let Some(n) = name.strip_prefix("ktc-stack:") {
                let n: usize = n.parse().map_err(|_| Error::Parse(format!("bad stack size in `{name}`")))?;
                build_ktc_stack(n, l)
            } else if let Some(n) = name.strip_prefix("trivial:") {
                let n: usize = n.parse().map_err(|_| Error::Parse(format!("bad site count in `{name}`")))?;
                build_trivial(n, l)
            } else {
                Err(Error::Parse(format!("unknown code `{name}`")))
            }
        }
    }
}
