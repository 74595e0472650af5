//! Translation-invariant local Clifford maps between codes.
//!
//! A map is an image table: for every site of the (ancilla-padded) source
//! cell, the images of X and Z as templates on the target lattice. Maps are
//! searched for by reducing both codes to a normal form with translation-
//! invariant CNOT layers and matching the two normal forms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::codes::{self, by_name, instances, syms, CodeDef, CodeKind};
use crate::error::{Error, Result};
use crate::gf2::{self, to_sym, BitVec, Basis};
use crate::pauli::{anticommutes, Bits, Lattice, Pauli, Site, Template, X, Y, Z};

#[derive(Clone, Debug, PartialEq)]
pub struct LocalCliffordMap {
    /// Source code spec (`name` or `name@chess`).
    pub source: String,
    pub target: String,
    /// Sites per cell on both (padded) sides.
    pub sites: usize,
    /// `images[s] = [U X_s U†, U Z_s U†]`, anchored at cell (0,0).
    pub images: Vec<[Template; 2]>,
    /// Single-qubit stabilizers padding the source (the trivial group T).
    pub ancilla_in: Vec<Template>,
    /// Single-qubit stabilizers padding the target (T′).
    pub ancilla_out: Vec<Template>,
}

#[derive(Clone, Debug, Default)]
pub struct MapReport {
    pub symplectic_ok: bool,
    pub group_map_ok: bool,
    pub v: usize,
    pub failures: Vec<String>,
}

impl LocalCliffordMap {
    pub fn identity(code: &str, sites: usize) -> Self {
        let images = (0..sites)
            .map(|s| [Template::single(Site::new(0, 0, s), X), Template::single(Site::new(0, 0, s), Z)])
            .collect();
        LocalCliffordMap {
            source: code.into(),
            target: code.into(),
            sites,
            images,
            ancilla_in: Vec::new(),
            ancilla_out: Vec::new(),
        }
    }

    /// Largest cell offset of any image term from its anchor.
    pub fn reach(&self) -> usize {
        self.images
            .iter()
            .flatten()
            .flat_map(|t| t.terms().iter().map(|(s, _)| s.dx.unsigned_abs().max(s.dy.unsigned_abs()) as usize))
            .max()
            .unwrap_or(0)
    }

    /// Locality: largest image range minus one.
    pub fn v(&self) -> usize {
        self.images.iter().flatten().map(|t| t.range()).max().unwrap_or(1).saturating_sub(1)
    }

    fn image(&self, site: Site, b: Bits) -> Result<Template> {
        let s = site.s as usize;
        let [ix, iz] = self
            .images
            .get(s)
            .ok_or_else(|| Error::Domain(format!("site {s} outside map with {} sites", self.sites)))?;
        let (dx, dy) = (site.dx, site.dy);
        Ok(match b {
            X => ix.shift(dx, dy),
            Z => iz.shift(dx, dy),
            Y => {
                let p = ix.mul(iz);
                let ph = p.phase() + 1;
                p.with_phase(ph).shift(dx, dy)
            }
            _ => Template::identity(),
        })
    }

    pub fn apply_template(&self, t: &Template) -> Result<Template> {
        let mut acc = Template::identity().with_phase(t.phase());
        for &(site, b) in t.terms() {
            acc = acc.mul(&self.image(site, b)?);
        }
        Ok(acc)
    }

    /// Image of a torus operator (source and target tori share L).
    pub fn apply(&self, p: &Pauli) -> Result<Pauli> {
        let lat = p.lattice();
        if lat.sites != self.sites {
            return Err(Error::Domain(format!("operator has {} sites per cell, map {}", lat.sites, self.sites)));
        }
        let mut terms: Vec<(usize, Bits)> = Vec::new();
        let mut phase = p.phase();
        for (q, b) in p.terms() {
            let c = lat.qubit(q);
            let img = self.image(Site::new(c.x as i32, c.y as i32, c.s), b)?;
            phase += img.phase();
            for &(s, bb) in img.terms() {
                terms.push((lat.index(s.dx as i64, s.dy as i64, s.s as usize), bb));
            }
        }
        // images of distinct qubits commute, so term order only matters
        // within each image, which is preserved here
        Ok(Pauli::from_terms(lat, terms, phase & 3))
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &LocalCliffordMap) -> Result<LocalCliffordMap> {
        let images = self
            .images
            .iter()
            .map(|[a, b]| Ok([then.apply_template(a)?, then.apply_template(b)?]))
            .collect::<Result<Vec<_>>>()?;
        Ok(LocalCliffordMap {
            source: self.source.clone(),
            target: then.target.clone(),
            sites: self.sites,
            images,
            ancilla_in: self.ancilla_in.clone(),
            ancilla_out: then.ancilla_out.clone(),
        })
    }

    /// Inverse map: each single-qubit operator is solved for locally over
    /// source qubits in a growing window, then the composition is checked.
    pub fn inverse(&self) -> Result<LocalCliffordMap> {
        let r = (self.v() + 1) as i64;
        let mut inv = Vec::with_capacity(self.sites);
        for s in 0..self.sites {
            let mut pair = Vec::new();
            for b in [X, Z] {
                pair.push(self.local_preimage(s, b, r)?);
            }
            inv.push([pair[0].clone(), pair[1].clone()]);
        }
        let cand = LocalCliffordMap {
            source: self.target.clone(),
            target: self.source.clone(),
            sites: self.sites,
            images: inv,
            ancilla_in: self.ancilla_out.clone(),
            ancilla_out: self.ancilla_in.clone(),
        };
        if self.then(&cand)?.is_identity() && cand.then(self)?.is_identity() {
            Ok(cand)
        } else {
            Err(Error::Construction("map is not invertible".into()))
        }
    }

    fn local_preimage(&self, s: usize, b: Bits, r: i64) -> Result<Template> {
        for rad in 1..=8i64 {
            let l = (2 * (rad + r) + 3) as usize;
            let lat = Lattice::new(l, self.sites);
            let o = (l / 2) as i64;
            let want = Pauli::single(lat, lat.index(o, o, s), b);
            let mut singles = Vec::new();
            let mut gens = Vec::new();
            for y in o - rad..=o + rad {
                for x in o - rad..=o + rad {
                    for t in 0..self.sites {
                        for c in [X, Z] {
                            let p = Pauli::single(lat, lat.index(x, y, t), c);
                            gens.push(to_sym(&self.apply(&p)?));
                            singles.push(p);
                        }
                    }
                }
            }
            if let Some(idx) = gf2::in_span(&to_sym(&want), &gens) {
                let mut pre = Pauli::identity(lat);
                for i in idx {
                    pre = pre.mul(&singles[i]);
                }
                let img = self.apply(&pre)?;
                let fix = (want.phase() + 4 - img.phase()) & 3;
                let ph = (pre.phase() + fix) & 3;
                return Ok(pre.with_phase(ph).to_template(o as usize, o as usize));
            }
        }
        Err(Error::Construction("no local preimage found".into()))
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(s, [a, b])| {
            *a == Template::single(Site::new(0, 0, s), X) && *b == Template::single(Site::new(0, 0, s), Z)
        })
    }

    // -- serialization ----------------------------------------------------

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# source {}", self.source);
        let _ = writeln!(s, "# target {}", self.target);
        let _ = writeln!(s, "# sites {}", self.sites);
        let _ = writeln!(s, "# v {}", self.v());
        for t in &self.ancilla_in {
            let _ = writeln!(s, "# ancilla-in {t}");
        }
        for t in &self.ancilla_out {
            let _ = writeln!(s, "# ancilla-out {t}");
        }
        for (i, [a, b]) in self.images.iter().enumerate() {
            let _ = writeln!(s, "{i} X -> {a}");
            let _ = writeln!(s, "{i} Z -> {b}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<LocalCliffordMap> {
        let mut source = None;
        let mut target = None;
        let mut sites = None;
        let mut anc_in = Vec::new();
        let mut anc_out = Vec::new();
        let mut imgs: BTreeMap<(usize, char), Template> = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(h) = line.strip_prefix('#') {
                let h = h.trim();
                let (key, val) = h.split_once(' ').unwrap_or((h, ""));
                match key {
                    "source" => source = Some(val.trim().to_string()),
                    "target" => target = Some(val.trim().to_string()),
                    "sites" => sites = val.trim().parse::<usize>().ok(),
                    "ancilla-in" => anc_in.push(val.parse::<Template>()?),
                    "ancilla-out" => anc_out.push(val.parse::<Template>()?),
                    _ => {}
                }
                continue;
            }
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| Error::Parse(format!("bad map line `{line}`")))?;
            let mut it = lhs.split_whitespace();
            let site: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad site in `{line}`")))?;
            let letter = it.next().and_then(|t| t.chars().next()).ok_or_else(|| Error::Parse(format!("bad letter in `{line}`")))?;
            imgs.insert((site, letter), rhs.trim().parse()?);
        }
        let sites = sites.ok_or_else(|| Error::Parse("missing `# sites`".into()))?;
        let mut images = Vec::with_capacity(sites);
        for s in 0..sites {
            let x = imgs.remove(&(s, 'X')).ok_or_else(|| Error::Parse(format!("missing X image of site {s}")))?;
            let z = imgs.remove(&(s, 'Z')).ok_or_else(|| Error::Parse(format!("missing Z image of site {s}")))?;
            images.push([x, z]);
        }
        Ok(LocalCliffordMap {
            source: source.ok_or_else(|| Error::Parse("missing `# source`".into()))?,
            target: target.ok_or_else(|| Error::Parse("missing `# target`".into()))?,
            sites,
            images,
            ancilla_in: anc_in,
            ancilla_out: anc_out,
        })
    }
}

// ---------------------------------------------------------------------------
// Codes named by spec strings, with padding.

/// Build a code from `name` or `name@chess` (chessboard blocking).
pub fn code_from_spec(spec: &str, l: usize) -> Result<CodeDef> {
    match spec.strip_suffix("@chess") {
        Some(base) => Ok(by_name(base, l)?.block_chessboard()),
        None => by_name(spec, l),
    }
}

/// Extend a code to `sites` sites per cell, adding single-qubit stabilizers.
pub fn pad(code: &CodeDef, sites: usize, ancillas: &[Template]) -> CodeDef {
    let mut c = code.clone();
    c.lattice = Lattice::new(code.l(), sites);
    for s in code.sites()..sites {
        c.site_labels.push(format!("anc{}", s - code.sites()));
    }
    c.stabilizers.extend(ancillas.iter().cloned());
    c
}

/// Source and target of a map as padded stabilizer codes on an L-torus.
pub fn padded_pair(map: &LocalCliffordMap, l: usize) -> Result<(CodeDef, CodeDef)> {
    let s = code_from_spec(&map.source, l)?;
    let t = code_from_spec(&map.target, l)?;
    Ok((pad(&s, map.sites, &map.ancilla_in), pad(&t, map.sites, &map.ancilla_out)))
}

// ---------------------------------------------------------------------------
// Verification.

/// Images must reproduce the single-qubit commutation relations out to the
/// image range, and be independent on a torus (invertibility).
pub fn verify_symplectic(map: &LocalCliffordMap) -> MapReport {
    let mut rep = MapReport { v: map.v(), ..Default::default() };
    let r = (map.v() + 1) as i32;
    for s in 0..map.sites {
        for (a, ia) in [X, Z].iter().zip(&map.images[s]) {
            for t in 0..map.sites {
                for (b, ib) in [X, Z].iter().zip(&map.images[t]) {
                    for dy in -r..=r {
                        for dx in -r..=r {
                            let src_anti = s == t && dx == 0 && dy == 0 && a != b;
                            let img_anti = !ia.commutes(&ib.shift(dx, dy));
                            if src_anti != img_anti {
                                rep.failures.push(format!(
                                    "site {s}{} vs site {t}{} at ({dx},{dy}): expected {}",
                                    crate::pauli::letter_char(*a),
                                    crate::pauli::letter_char(*b),
                                    if src_anti { "anticommuting" } else { "commuting" }
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    if rep.failures.is_empty() {
        let l = (2 * r as usize + 1).max(3);
        let lat = Lattice::new(l, map.sites);
        let mut b = Basis::new(2 * lat.n());
        for q in 0..lat.n() {
            for letter in [X, Z] {
                match map.apply(&Pauli::single(lat, q, letter)) {
                    Ok(p) => {
                        b.insert(to_sym(&p));
                    }
                    Err(e) => rep.failures.push(e.to_string()),
                }
            }
        }
        if b.rank() != 2 * lat.n() {
            rep.failures.push(format!("images have rank {} < {} on L = {l}", b.rank(), 2 * lat.n()));
        }
    }
    rep.symplectic_ok = rep.failures.is_empty();
    rep
}

/// Signed decomposition of `p` over `gens`: the indices and whether the
/// product equals +p (true) or −p (false).
pub fn signed_decompose(p: &Pauli, gens: &[Pauli], basis: &Basis) -> Option<(Vec<usize>, bool)> {
    let idx = basis.decompose(&to_sym(p))?;
    let mut prod = Pauli::identity(p.lattice());
    for &i in &idx {
        prod = prod.mul(&gens[i]);
    }
    Some((idx, prod.phase() == p.phase()))
}

/// U(S ⊗ T)U† = S′ ⊗ T′ on the L-torus, with stabilizer signs matching.
pub fn verify_code_map(map: &LocalCliffordMap, source: &CodeDef, target: &CodeDef, l: usize) -> MapReport {
    let mut rep = verify_symplectic(map);
    if !rep.symplectic_ok {
        return rep;
    }
    let src = pad(&source.at(l), map.sites, &map.ancilla_in);
    let tgt = pad(&target.at(l), map.sites, &map.ancilla_out);
    if src.sites() != map.sites || tgt.sites() != map.sites {
        rep.failures.push("site counts differ from the map".into());
        return rep;
    }
    let imgs: Vec<Pauli> = match src.stabilizer_instances().iter().map(|p| map.apply(p)).collect() {
        Ok(v) => v,
        Err(e) => {
            rep.failures.push(e.to_string());
            return rep;
        }
    };
    let tg = tgt.stabilizer_instances();
    let tsym = syms(&tg);
    let mut tb = Basis::tracking(2 * tgt.n(), tg.len());
    for v in &tsym {
        tb.insert_tracked(v.clone());
    }
    let isym = syms(&imgs);
    let ri = gf2::rank(&isym);
    if ri != tb.rank() {
        rep.failures.push(format!("rank mismatch: image {ri}, target {}", tb.rank()));
    }
    for (i, p) in imgs.iter().enumerate() {
        match signed_decompose(p, &tg, &tb) {
            None => {
                rep.failures.push(format!("image of source generator {i} not in target group"));
                break;
            }
            Some((_, false)) => {
                rep.failures.push(format!("image of source generator {i} has the wrong sign"));
                break;
            }
            _ => {}
        }
    }
    rep.group_map_ok = rep.failures.is_empty();
    rep
}

// ---------------------------------------------------------------------------
// Elementary moves.

/// CNOT layer: control site `c` in cell r, target site `t` in cell r + d.
pub fn cnot_layer(sites: usize, c: usize, t: usize, d: (i32, i32)) -> LocalCliffordMap {
    assert_ne!(c, t);
    let mut m = LocalCliffordMap::identity("", sites);
    m.images[c][0] = Template::from_terms(vec![(Site::new(0, 0, c), X), (Site::new(d.0, d.1, t), X)], 0);
    m.images[t][1] = Template::from_terms(vec![(Site::new(0, 0, t), Z), (Site::new(-d.0, -d.1, c), Z)], 0);
    m
}

/// Several commuting CNOT layers applied together. Layers must not use a
/// site both as control and target.
fn cnot_fan(sites: usize, gates: &[(usize, usize, (i32, i32))]) -> Option<LocalCliffordMap> {
    let ctrl: BTreeSet<usize> = gates.iter().map(|g| g.0).collect();
    let targ: BTreeSet<usize> = gates.iter().map(|g| g.1).collect();
    if ctrl.intersection(&targ).next().is_some() {
        return None;
    }
    let mut m = LocalCliffordMap::identity("", sites);
    for &(c, t, d) in gates {
        m.images[c][0] = m.images[c][0].mul(&Template::single(Site::new(d.0, d.1, t), X));
        m.images[t][1] = m.images[t][1].mul(&Template::single(Site::new(-d.0, -d.1, c), Z));
    }
    Some(m)
}

/// Hadamard on selected sites.
fn hadamards(sites: usize, which: &[usize]) -> LocalCliffordMap {
    let mut m = LocalCliffordMap::identity("", sites);
    for &s in which {
        m.images[s].swap(0, 1);
    }
    m
}

// ---------------------------------------------------------------------------
// Normal form.

const SHIFT: i32 = 3;

/// Spread of a template: summed L1 distance over pairs of terms. Separates
/// sheared shapes from axis-aligned ones of equal bounding box.
fn area(t: &Template) -> usize {
    let ts = t.terms();
    let mut s = 0;
    for (i, a) in ts.iter().enumerate() {
        for b in &ts[i + 1..] {
            s += (a.0.dx - b.0.dx).unsigned_abs() as usize + (a.0.dy - b.0.dy).unsigned_abs() as usize;
        }
    }
    s
}

/// Lower the total weight of a template set by multiplying templates with
/// translates of the others; drops identities and translated duplicates.
pub fn row_reduce(ts: &[Template]) -> Vec<Template> {
    let mut v: Vec<Template> = ts.iter().map(Template::normalized).collect();
    loop {
        let mut improved = false;
        for i in 0..v.len() {
            if v[i].is_identity() {
                continue;
            }
            for j in 0..v.len() {
                if i == j || v[j].is_identity() {
                    continue;
                }
                let mut best: Option<Template> = None;
                for dy in -SHIFT..=SHIFT {
                    for dx in -SHIFT..=SHIFT {
                        let p = v[i].mul(&v[j].shift(dx, dy));
                        let cur = best.as_ref().unwrap_or(&v[i]);
                        if (p.weight(), area(&p)) < (cur.weight(), area(cur)) {
                            best = Some(p);
                        }
                    }
                }
                if let Some(b) = best {
                    v[i] = b.normalized();
                    improved = true;
                }
            }
        }
        // translated duplicates (up to sign) are redundant generators
        let mut seen = BTreeSet::new();
        v.retain(|t| !t.is_identity() && seen.insert(t.clone().with_phase(0)));
        if !improved {
            v.sort_by_key(|t| (std::cmp::Reverse(t.weight()), t.clone()));
            return v;
        }
    }
}

fn score(ts: &[Template]) -> (usize, usize) {
    (ts.iter().map(Template::weight).sum(), ts.iter().map(area).sum())
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub templates: Vec<Template>,
    /// Moves applied, in order, with their inverses.
    pub moves: Vec<Move>,
}

fn collapse_moves(ts: &[Template], sites: usize) -> Vec<LocalCliffordMap> {
    let mut out = Vec::new();
    for g in ts {
        let letters: BTreeSet<Bits> = g.terms().iter().map(|t| t.1).collect();
        if g.weight() < 2 || letters.len() != 1 {
            continue;
        }
        let letter = *letters.iter().next().unwrap();
        if letter == Y {
            continue;
        }
        for (qi, &(q, _)) in g.terms().iter().enumerate() {
            let gates: Vec<(usize, usize, (i32, i32))> = g
                .terms()
                .iter()
                .enumerate()
                .filter(|(fi, _)| *fi != qi)
                .map(|(_, &(f, _))| {
                    if letter == Z {
                        (f.s as usize, q.s as usize, (q.dx - f.dx, q.dy - f.dy))
                    } else {
                        (q.s as usize, f.s as usize, (f.dx - q.dx, f.dy - q.dy))
                    }
                })
                .collect();
            if gates.iter().any(|g| g.0 == g.1) {
                continue;
            }
            if let Some(m) = cnot_fan(sites, &gates) {
                out.push(m);
            }
        }
    }
    out
}

/// CZ layer between site `a` in cell r and site `b` in cell r + d.
fn cz_layer(sites: usize, a: usize, b: usize, d: (i32, i32)) -> LocalCliffordMap {
    let mut m = LocalCliffordMap::identity("", sites);
    m.images[a][0] = Template::from_terms(vec![(Site::new(0, 0, a), X), (Site::new(d.0, d.1, b), Z)], 0);
    m.images[b][0] = Template::from_terms(vec![(Site::new(0, 0, b), X), (Site::new(-d.0, -d.1, a), Z)], 0);
    m
}

/// Phase gate on one site: X → Y, Z → Z. Not an involution; its inverse is
/// recorded alongside.
fn phase_gate(sites: usize, s: usize, inverse: bool) -> LocalCliffordMap {
    let mut m = LocalCliffordMap::identity("", sites);
    m.images[s][0] = Template::single(Site::new(0, 0, s), Y).with_phase(if inverse { 2 } else { 0 });
    m
}

/// Sites without a single-qubit stabilizer of their own.
fn active_sites(ts: &[Template], sites: usize) -> Vec<usize> {
    let fixed: BTreeSet<usize> = ts.iter().filter(|t| t.weight() == 1).map(|t| t.terms()[0].0.s as usize).collect();
    (0..sites).filter(|s| !fixed.contains(s)).collect()
}

/// Move and its inverse.
type Move = (LocalCliffordMap, LocalCliffordMap);

fn single_moves(ts: &[Template], sites: usize, reach: i32) -> Vec<Move> {
    let act = active_sites(ts, sites);
    let mut out: Vec<Move> = Vec::new();
    for &a in &act {
        let h = hadamards(sites, &[a]);
        out.push((h.clone(), h));
        out.push((phase_gate(sites, a, false), phase_gate(sites, a, true)));
        for &b in &act {
            if a == b {
                continue;
            }
            for dy in -reach..=reach {
                for dx in -reach..=reach {
                    let c = cnot_layer(sites, a, b, (dx, dy));
                    out.push((c.clone(), c));
                    if a < b {
                        let z = cz_layer(sites, a, b, (dx, dy));
                        out.push((z.clone(), z));
                    }
                }
            }
        }
    }
    out
}

fn apply_all(m: &LocalCliffordMap, ts: &[Template]) -> Vec<Template> {
    ts.iter().map(|t| m.apply_template(t).expect("site in range")).collect()
}

/// Greedy descent on (total weight, total spread) using template
/// collapses first and single CNOT layers when no collapse helps.
pub fn normal_form(stabs: &[Template], sites: usize) -> NormalForm {
    let mut cur = row_reduce(stabs);
    let mut moves = Vec::new();
    for _ in 0..200 {
        let base = score(&cur);
        let mut best: Option<(Move, Vec<Template>, (usize, usize))> = None;
        for pool in 0..2 {
            let cands: Vec<Move> = if pool == 0 {
                collapse_moves(&cur, sites).into_iter().map(|m| (m.clone(), m)).collect()
            } else {
                single_moves(&cur, sites, 1)
            };
            for m in cands {
                let next = row_reduce(&apply_all(&m.0, &cur));
                let sc = score(&next);
                if sc < base && best.as_ref().is_none_or(|b| sc < b.2) {
                    best = Some((m, next, sc));
                }
            }
            if best.is_some() {
                break;
            }
        }
        match best {
            Some((m, next, _)) => {
                moves.push(m);
                cur = next;
            }
            None => break,
        }
    }
    NormalForm { templates: cur, moves }
}

// ---------------------------------------------------------------------------
// Matching two normal forms.

#[derive(Clone, Copy, Debug, PartialEq)]
struct Assign {
    site: usize,
    off: (i32, i32),
    hadamard: bool,
}

fn swap_letter(b: Bits, h: bool) -> Bits {
    if h && b != Y {
        b ^ 3
    } else {
        b
    }
}

struct Matcher<'a> {
    src: &'a [Template],
    tgt: &'a [Template],
    sites: usize,
    used: Vec<bool>,
    sigma: Vec<Option<Assign>>,
    taken: Vec<bool>,
    budget: usize,
}

impl Matcher<'_> {
    fn run(&mut self, k: usize) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        if k == self.src.len() {
            return true;
        }
        let a = &self.src[k];
        for j in 0..self.tgt.len() {
            if self.used[j] || self.tgt[j].weight() != a.weight() {
                continue;
            }
            self.used[j] = true;
            let b = self.tgt[j].clone();
            let mut tused = vec![false; b.weight()];
            if self.terms(k, a, &b, 0, None, &mut tused) {
                return true;
            }
            self.used[j] = false;
        }
        false
    }

    /// Match the terms of `a` to those of `b` one by one; `delta` is the
    /// template shift fixed by the first term with an assigned site.
    fn terms(&mut self, k: usize, a: &Template, b: &Template, i: usize, delta: Option<(i32, i32)>, tused: &mut [bool]) -> bool {
        if i == a.weight() {
            return self.run(k + 1);
        }
        // terms whose site is already assigned first
        let order: Vec<usize> = {
            let mut o: Vec<usize> = (0..a.weight()).collect();
            o.sort_by_key(|&x| self.sigma[a.terms()[x].0.s as usize].is_none());
            o
        };
        let (p, pb) = a.terms()[order[i]];
        let s = p.s as usize;
        for j in 0..b.weight() {
            if tused[j] {
                continue;
            }
            let (q, qb) = b.terms()[j];
            match self.sigma[s] {
                Some(asg) => {
                    if asg.site != q.s as usize || swap_letter(pb, asg.hadamard) != qb {
                        continue;
                    }
                    let d = (q.dx - p.dx - asg.off.0, q.dy - p.dy - asg.off.1);
                    if delta.is_some_and(|dd| dd != d) {
                        continue;
                    }
                    tused[j] = true;
                    if self.terms(k, a, b, i + 1, Some(d), tused) {
                        return true;
                    }
                    tused[j] = false;
                }
                None => {
                    if self.taken[q.s as usize] {
                        continue;
                    }
                    for h in [false, true] {
                        if swap_letter(pb, h) != qb || (h && pb == Y) {
                            continue;
                        }
                        let d = delta.unwrap_or((0, 0));
                        let off = (q.dx - p.dx - d.0, q.dy - p.dy - d.1);
                        self.sigma[s] = Some(Assign { site: q.s as usize, off, hadamard: h });
                        self.taken[q.s as usize] = true;
                        tused[j] = true;
                        if self.terms(k, a, b, i + 1, Some(d), tused) {
                            return true;
                        }
                        tused[j] = false;
                        self.taken[q.s as usize] = false;
                        self.sigma[s] = None;
                    }
                }
            }
        }
        false
    }
}

/// Site permutation (with per-site offsets and optional Hadamards) taking
/// the source normal form onto the target normal form, if one is found.
fn match_forms(src: &[Template], tgt: &[Template], sites: usize) -> Option<LocalCliffordMap> {
    if src.len() != tgt.len() {
        return None;
    }
    let mut m = Matcher {
        src,
        tgt,
        sites,
        used: vec![false; tgt.len()],
        sigma: vec![None; sites],
        taken: vec![false; sites],
        budget: 2_000_000,
    };
    if !m.run(0) {
        return None;
    }
    // sites absent from every template go to the remaining free sites
    let mut free = (0..sites).filter(|&t| !m.taken[t]);
    let mut map = LocalCliffordMap::identity("", sites);
    for s in 0..m.sites {
        let asg = m.sigma[s].unwrap_or_else(|| Assign { site: free.next().unwrap(), off: (0, 0), hadamard: false });
        let site = Site::new(asg.off.0, asg.off.1, asg.site);
        let (bx, bz) = if asg.hadamard { (Z, X) } else { (X, Z) };
        map.images[s] = [Template::single(site, bx), Template::single(site, bz)];
    }
    Some(map)
}

fn compose_all(sites: usize, moves: &[&LocalCliffordMap]) -> LocalCliffordMap {
    let mut u = LocalCliffordMap::identity("", sites);
    for m in moves {
        u = u.then(m).expect("same site count");
    }
    u
}

/// Fix stabilizer signs with a translation-invariant Pauli frame applied
/// before the map: flips the sign of every source generator whose image
/// comes out with sign −1 relative to the target group.
fn fix_signs(map: &LocalCliffordMap, src: &CodeDef, tgt: &CodeDef, l: usize) -> Option<LocalCliffordMap> {
    let src = src.at(l);
    let tgt = tgt.at(l);
    let tg = tgt.stabilizer_instances();
    let mut tb = Basis::tracking(2 * tgt.n(), tg.len());
    for v in syms(&tg) {
        tb.insert_tracked(v);
    }
    // per source template: does its image need a sign flip?
    let mut wrong = Vec::new();
    for t in &src.stabilizers {
        let img = map.apply(&t.instance(src.lattice, 0, 0)).ok()?;
        let (_, ok) = signed_decompose(&img, &tg, &tb)?;
        wrong.push(!ok);
    }
    if wrong.iter().all(|w| !w) {
        return Some(map.clone());
    }
    // unknowns: frame letter bits (x_s, z_s); template parity = Σ anticomm
    let nv = 2 * map.sites;
    let rows: Vec<BitVec> = src
        .stabilizers
        .iter()
        .zip(&wrong)
        .map(|(t, &w)| {
            let mut r = BitVec::zeros(nv + 1);
            for &(site, b) in t.terms() {
                let s = site.s as usize;
                // frame X_s anticommutes with letters carrying Z, and vice versa
                if b & Z != 0 {
                    r.flip(2 * s);
                }
                if b & X != 0 {
                    r.flip(2 * s + 1);
                }
            }
            r.set(nv, w);
            r
        })
        .collect();
    let sol = solve_affine(&rows, nv)?;
    let mut frame = LocalCliffordMap::identity("", map.sites);
    for s in 0..map.sites {
        let f: Bits = (sol.get(2 * s) as u8) | ((sol.get(2 * s + 1) as u8) << 1);
        for (k, b) in [X, Z].into_iter().enumerate() {
            if f != 0 && anticommutes(f, b) {
                let t = frame.images[s][k].clone();
                frame.images[s][k] = t.with_phase(2);
            }
        }
    }
    let mut out = frame.then(map).ok()?;
    out.source = map.source.clone();
    out.target = map.target.clone();
    Some(out)
}

/// Solve `A x = b` where each row is `[a | b]`; returns one solution.
fn solve_affine(rows: &[BitVec], nv: usize) -> Option<BitVec> {
    let mut m: Vec<BitVec> = rows.to_vec();
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..nv {
        let Some(k) = (r..m.len()).find(|&k| m[k].get(c)) else { continue };
        m.swap(r, k);
        let p = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_with(&p);
            }
        }
        piv.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| row.get(nv)) {
        return None;
    }
    let mut x = BitVec::zeros(nv);
    for (i, &c) in piv.iter().enumerate() {
        x.set(c, m[i].get(nv));
    }
    Some(x)
}

/// Search for a map taking `source` onto `target` (already padded to equal
/// site counts). `radius` bounds the cell offset of every image term from
/// its anchor, so images have range at most 2·radius + 1.
pub fn find_map(source: &CodeDef, target: &CodeDef, radius: usize) -> Result<LocalCliffordMap> {
    let sites = source.sites();
    if target.sites() != sites {
        return Err(Error::Precondition(format!("site counts differ: {sites} vs {}", target.sites())));
    }
    if source.kind != CodeKind::Stabilizer || target.kind != CodeKind::Stabilizer {
        return Err(Error::Precondition("maps are searched between stabilizer codes".into()));
    }
    for l in [3, 4] {
        let (ks, kt) = (source.at(l).logical_count(), target.at(l).logical_count());
        if ks != kt {
            return Err(Error::NotFound(format!("logical counts differ at L = {l}: {ks} vs {kt}")));
        }
    }
    let label = |u: LocalCliffordMap| LocalCliffordMap {
        source: source.name.clone(),
        target: target.name.clone(),
        ..u
    };
    // identical template sets: the identity already works
    if row_reduce(&source.stabilizers) == row_reduce(&target.stabilizers) {
        let id = label(LocalCliffordMap::identity("", sites));
        if verify_code_map(&id, source, target, 4).group_map_ok {
            return Ok(id);
        }
    }
    let ns = normal_form(&source.stabilizers, sites);
    let nt = normal_form(&target.stabilizers, sites);
    let p = match_forms(&ns.templates, &nt.templates, sites)
        .or_else(|| {
            // the target side may need a global X/Z exchange first
            let h = hadamards(sites, &(0..sites).collect::<Vec<_>>());
            let swapped = row_reduce(&apply_all(&h, &ns.templates));
            match_forms(&swapped, &nt.templates, sites).map(|p| h.then(&p).expect("sites"))
        })
        .ok_or_else(|| Error::NotFound("normal forms do not match".into()))?;
    let mut seq: Vec<&LocalCliffordMap> = ns.moves.iter().map(|m| &m.0).collect();
    seq.push(&p);
    seq.extend(nt.moves.iter().rev().map(|m| &m.1));
    let mut u = label(compose_all(sites, &seq));
    u.ancilla_in = Vec::new();
    u.ancilla_out = Vec::new();
    let u = fix_signs(&u, source, target, 4).ok_or_else(|| Error::NotFound("no Pauli frame fixes the signs".into()))?;
    if u.reach() > radius {
        return Err(Error::NotFound(format!("map found with reach {} beyond radius {radius}", u.reach())));
    }
    Ok(u)
}

// ---------------------------------------------------------------------------
// Syndrome transport.

/// How each target generator template is written as a product of images of
/// source generator instances: `(source template, cell offset)` lists.
#[derive(Clone, Debug)]
pub struct PushRules {
    pub rules: Vec<Vec<(usize, i32, i32)>>,
}

/// Local decompositions of target generators over mapped source generators.
pub fn push_rules(map: &LocalCliffordMap, source: &CodeDef, target: &CodeDef) -> Result<PushRules> {
    let reach = (map.v() + 1 + source.locality().max(target.locality())) as i64;
    let l = (4 * reach + 3) as usize;
    let src = source.at(l);
    let lat = src.lattice;
    let l = l as i64;
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for (ti, t) in src.stabilizers.iter().enumerate() {
        for y in 0..l {
            for x in 0..l {
                images.push(map.apply(&t.instance(lat, x, y))?);
                labels.push((ti, x, y));
            }
        }
    }
    let (ox, oy) = (l / 2, l / 2);
    let mut rules = Vec::new();
    for t in &target.stabilizers {
        let want = t.instance(lat, ox, oy);
        let mut found = None;
        for rad in 1..=(l / 2) {
            let near: Vec<usize> = (0..images.len())
                .filter(|&i| {
                    let (_, x, y) = labels[i];
                    lat.delta(ox as usize, x as usize).abs() <= rad && lat.delta(oy as usize, y as usize).abs() <= rad
                })
                .collect();
            let gens: Vec<BitVec> = near.iter().map(|&i| to_sym(&images[i])).collect();
            if let Some(idx) = gf2::in_span(&to_sym(&want), &gens) {
                found = Some(
                    idx.into_iter()
                        .map(|k| {
                            let (ti, x, y) = labels[near[k]];
                            (ti, lat.delta(ox as usize, x as usize) as i32, lat.delta(oy as usize, y as usize) as i32)
                        })
                        .collect::<Vec<_>>(),
                );
                break;
            }
        }
        rules.push(found.ok_or_else(|| Error::Consistency("target generator outside the mapped source group".into()))?);
    }
    Ok(PushRules { rules })
}

/// Target syndrome (per target generator instance, template-major) from a
/// source syndrome laid out the same way.
pub fn push_syndrome(rules: &PushRules, source_syndrome: &[bool], l: usize) -> Vec<bool> {
    let l2 = l * l;
    let li = l as i32;
    let mut out = vec![false; rules.rules.len() * l2];
    for (ti, rule) in rules.rules.iter().enumerate() {
        for y in 0..li {
            for x in 0..li {
                let mut v = false;
                for &(si, dx, dy) in rule {
                    let cx = (x + dx).rem_euclid(li) as usize;
                    let cy = (y + dy).rem_euclid(li) as usize;
                    v ^= source_syndrome[si * l2 + cy * l + cx];
                }
                out[ti * l2 + y as usize * l + x as usize] = v;
            }
        }
    }
    out
}

/// Pull a target operator back through the map (given the inverse map),
/// dropping the part acting on source ancillas beyond `keep_sites`.
pub fn pull_correction(inverse: &LocalCliffordMap, p: &Pauli, keep_sites: usize) -> Result<Pauli> {
    let full = inverse.apply(p)?;
    let lat = full.lattice();
    let out = Lattice::new(lat.l, keep_sites);
    let terms = full
        .terms()
        .filter_map(|(q, b)| {
            let c = lat.qubit(q);
            (c.s < keep_sites).then(|| (out.index(c.x as i64, c.y as i64, c.s), b))
        })
        .collect();
    Ok(Pauli::from_terms(out, terms, full.phase()))
}

/// Syndrome (template-major instance order) of `p` against `gens`.
pub fn syndrome_of(gens: &[Pauli], p: &Pauli) -> Vec<bool> {
    gens.iter().map(|g| !g.commutes(p)).collect()
}

/// Prepared target for the built-in pairs: the code blocked and padded to
/// the source site count (chessboard blocking when the source cell is
/// twice as large, single-qubit Z ancillas for the rest).
pub fn prepare_target(source: &CodeDef, target: &CodeDef) -> Result<(CodeDef, Vec<Template>)> {
    let mut t = target.clone();
    if source.sites() >= 2 * t.sites() && source.l() == t.l() {
        t = t.block_chessboard();
    }
    if t.sites() > source.sites() {
        return Err(Error::Precondition(format!("target cell ({}) larger than source cell ({})", t.sites(), source.sites())));
    }
    let anc: Vec<Template> = (t.sites()..source.sites()).map(|s| Template::single(Site::new(0, 0, s), Z)).collect();
    Ok((t, anc))
}

/// Convenience: full search between registered codes with automatic
/// blocking and padding; the returned map records both specs.
pub fn find_registered(source: &str, target: &str, radius: usize) -> Result<LocalCliffordMap> {
    let s = code_from_spec(source, 4)?;
    let t0 = code_from_spec(target, 4)?;
    let (t, anc) = prepare_target(&s, &t0)?;
    let tp = pad(&t, s.sites(), &anc);
    let mut m = find_map(&s, &tp, radius)?;
    m.source = s.name.clone();
    m.target = t.name.clone();
    m.ancilla_out = anc;
    Ok(m)
}

/// Gauge instances of `code` as symplectic rows, for membership checks.
pub fn gauge_rows(code: &CodeDef) -> Vec<BitVec> {
    syms(&instances(&code.gauge, code.lattice))
}

pub use codes::solid_templates;

/// Relations among the generator instances of a code: index sets whose
/// product is the identity. Any genuine syndrome has even parity on each.
pub fn syndrome_relations(code: &CodeDef) -> Vec<Vec<usize>> {
    gf2::left_nullspace(&syms(&code.stabilizer_instances())).into_iter().map(|r| r.ones().collect()).collect()
}

pub fn check_consistent(relations: &[Vec<usize>], syndrome: &[bool]) -> Result<()> {
    for r in relations {
        if r.iter().filter(|&&i| syndrome[i]).count() % 2 == 1 {
            return Err(Error::Consistency(format!("relation over {} generators has odd parity", r.len())));
        }
    }
    Ok(())
}

/// Maps shipped with the crate, as produced by [`find_registered`] onto
/// `ktc-stack:2` (`tcc48` at radius 1, `tscc48-sz` at radius 2).
pub fn builtin_map(source: &str) -> Option<LocalCliffordMap> {
    let text = match source {
        "tcc48" => include_str!("../maps/tcc48.map"),
        "tscc48-sz" | "tscc48" => include_str!("../maps/tscc48-sz.map"),
        _ => return None,
    };
    Some(LocalCliffordMap::parse(text).expect("shipped map parses"))
}
