//! Abelian anyon data of translation-invariant codes, read off through a
//! map to a toric-code stack.

use std::fmt;

use crate::codes::{syms, CodeDef, CodeKind};
use crate::error::{Error, Result};
use crate::gf2::{to_sym, Basis, BitVec};
use crate::mapper::{self, LocalCliffordMap, PushRules};
use crate::pauli::Pauli;
use crate::toric::{GenRole, Species, ToricGeometry};

/// Charge vector (α₁, β₁, …, αₙ, βₙ) over GF(2): bit 2c is e on copy c,
/// bit 2c+1 is m on copy c.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Charge {
    pub bits: u32,
    pub n: usize,
}

impl Charge {
    pub fn vacuum(n: usize) -> Charge {
        Charge { bits: 0, n }
    }

    pub fn e(copy: usize, n: usize) -> Charge {
        Charge { bits: 1 << (2 * copy), n }
    }

    pub fn m(copy: usize, n: usize) -> Charge {
        Charge { bits: 1 << (2 * copy + 1), n }
    }

    pub fn all(n: usize) -> impl Iterator<Item = Charge> {
        (0..1u32 << (2 * n)).map(move |bits| Charge { bits, n })
    }

    pub fn fuse(self, o: Charge) -> Charge {
        Charge { bits: self.bits ^ o.bits, n: self.n }
    }

    pub fn is_vacuum(self) -> bool {
        self.bits == 0
    }

    fn alpha(self, c: usize) -> u32 {
        (self.bits >> (2 * c)) & 1
    }

    fn beta(self, c: usize) -> u32 {
        (self.bits >> (2 * c + 1)) & 1
    }

    /// θ(a) = ∏ (−1)^{αᵢβᵢ}.
    pub fn spin(self) -> i8 {
        let p: u32 = (0..self.n).map(|c| self.alpha(c) & self.beta(c)).sum();
        if p % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Braiding phase of the stack model, (−1)^{Σ αᵢβ′ᵢ + βᵢα′ᵢ}.
    pub fn braid(self, o: Charge) -> i8 {
        let p: u32 = (0..self.n).map(|c| self.alpha(c) & o.beta(c) ^ self.beta(c) & o.alpha(c)).sum();
        if p % 2 == 0 {
            1
        } else {
            -1
        }
    }

    fn letter(self, c: usize) -> char {
        match (self.alpha(c), self.beta(c)) {
            (0, 0) => '0',
            (1, 0) => 'e',
            (0, 1) => 'm',
            _ => 'f',
        }
    }

    pub fn name(self) -> String {
        if self.n == 1 {
            self.letter(0).to_string()
        } else {
            let parts: Vec<String> = (0..self.n).map(|c| self.letter(c).to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }

    /// Inverse of `name`: `e`, `f`, or `[m,f]`-style lists.
    pub fn parse(s: &str, n: usize) -> Result<Charge> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != n {
            return Err(Error::UnknownCharge(format!("`{s}` does not name a charge of {n} copies")));
        }
        let mut bits = 0;
        for (c, p) in parts.iter().enumerate() {
            let v = match *p {
                "0" | "1" => 0,
                "e" => 1,
                "m" => 2,
                "f" => 3,
                _ => return Err(Error::UnknownCharge(format!("`{p}` in `{s}`"))),
            };
            bits |= v << (2 * c);
        }
        Ok(Charge { bits, n })
    }

    pub fn vector(self) -> String {
        (0..2 * self.n).map(|i| if self.bits >> i & 1 == 1 { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Debug)]
pub struct StringOperator {
    pub charge: Charge,
    /// Fine-lattice positions visited, start to end.
    pub path: Vec<(i64, i64)>,
    pub operator: Pauli,
}

/// A code together with the geometry of the stack it maps to.
pub struct AnyonFrame {
    pub code: CodeDef,
    pub geom: ToricGeometry,
    map: Option<(LocalCliffordMap, LocalCliffordMap, PushRules)>,
    stabs: Vec<Pauli>,
}

impl AnyonFrame {
    /// A plain toric-code stack (`ktc`, `ktc-stack:n`) with no map.
    pub fn direct(code: &CodeDef) -> Result<AnyonFrame> {
        let geom = ToricGeometry::from_spec(&code.name, code.l(), code.sites(), &[])?;
        Ok(AnyonFrame { code: code.clone(), geom, stabs: code.stabilizer_instances(), map: None })
    }

    /// A stabilizer code with a verified map onto a stack.
    pub fn mapped(code: &CodeDef, map: &LocalCliffordMap) -> Result<AnyonFrame> {
        if code.kind != CodeKind::Stabilizer {
            return Err(Error::Precondition("charges are read from a stabilizer code".into()));
        }
        let geom = ToricGeometry::from_spec(&map.target, code.l(), map.sites, &map.ancilla_out)?;
        let target = geom.code()?;
        let rep = mapper::verify_code_map(map, code, &target, code.l());
        if !rep.group_map_ok {
            return Err(Error::Precondition(format!("map does not verify: {:?}", rep.failures)));
        }
        let inv = map.inverse()?;
        let rules = mapper::push_rules(map, code, &target)?;
        Ok(AnyonFrame { code: code.clone(), geom, stabs: code.stabilizer_instances(), map: Some((map.clone(), inv, rules)) })
    }

    pub fn copies(&self) -> usize {
        self.geom.copies
    }

    /// Bring a stack-frame operator back to the code's qubits.
    pub fn to_code(&self, p: &Pauli) -> Result<Pauli> {
        match &self.map {
            None => Ok(p.clone()),
            Some((_, inv, _)) => mapper::pull_correction(inv, p, self.code.sites()),
        }
    }

    /// Source syndrome pushed into the stack frame (template-major order of
    /// the stack code).
    pub fn to_stack_syndrome(&self, syn: &[bool]) -> Vec<bool> {
        match &self.map {
            None => syn.to_vec(),
            Some((_, _, rules)) => mapper::push_syndrome(rules, syn, self.geom.l),
        }
    }

    pub fn violated(&self, p: &Pauli) -> Vec<usize> {
        self.stabs.iter().enumerate().filter(|(_, s)| !s.commutes(p)).map(|(i, _)| i).collect()
    }

    fn elementary(&self, g: usize) -> Result<(usize, Species)> {
        if g >= 2 * self.copies() {
            return Err(Error::UnknownCharge(format!("generator {g} of a {}-copy stack", self.copies())));
        }
        Ok((g / 2, if g % 2 == 0 { Species::Plaquette } else { Species::Star }))
    }

    /// String creating the pair (a, a) at cells `from` and `to`, for any
    /// charge a (product of elementary strings along the same path).
    pub fn charge_string(&self, a: Charge, from: (i64, i64), to: (i64, i64)) -> Result<StringOperator> {
        let p = self.geom.cell_to_fine(from.0, from.1);
        let q = self.geom.cell_to_fine(to.0, to.1);
        let d = self.geom.displacement(p, q);
        let mut op = Pauli::identity(self.geom.lattice());
        for g in 0..2 * self.copies() {
            if a.bits >> g & 1 == 1 {
                let (copy, sp) = self.elementary(g)?;
                op = op.mul(&self.geom.string(copy, sp, p, d));
            }
        }
        let mut path = vec![p];
        let mut cur = p;
        for _ in 0..d.0.abs() {
            cur.0 += d.0.signum();
            path.push(cur);
        }
        for _ in 0..d.1.abs() {
            cur.1 += d.1.signum();
            path.push(cur);
        }
        Ok(StringOperator { charge: a, path, operator: self.to_code(&op)? })
    }

    /// String of elementary charge `g` (e₁, m₁, e₂, …).
    pub fn build_string(&self, g: usize, from: (i64, i64), to: (i64, i64)) -> Result<StringOperator> {
        self.elementary(g)?;
        self.charge_string(Charge { bits: 1 << g, n: self.copies() }, from, to)
    }

    /// Non-contractible loop of charge `a` along period `dir`, through the
    /// fine position `at`.
    pub fn loop_operator(&self, a: Charge, dir: usize, at: (i64, i64)) -> Result<Pauli> {
        let d = self.geom.periods()[dir];
        let mut op = Pauli::identity(self.geom.lattice());
        for g in 0..2 * self.copies() {
            if a.bits >> g & 1 == 1 {
                let (copy, sp) = self.elementary(g)?;
                op = op.mul(&self.geom.string(copy, sp, at, d));
            }
        }
        let op = self.to_code(&op)?;
        if !self.violated(&op).is_empty() {
            return Err(Error::Construction(format!("loop of {a} is not closed")));
        }
        Ok(op)
    }

    /// Braiding phase from crossing loops, checked on two deformed
    /// representatives.
    pub fn mutual_statistics(&self, a: Charge, b: Charge) -> Result<i8> {
        if self.geom.l < 4 {
            return Err(Error::InvalidSize(format!("L = {} < 4", self.geom.l)));
        }
        let s1 = self.loop_operator(a, 0, (0, 0))?.commute_sign(&self.loop_operator(b, 1, (0, 0))?);
        let s2 = self.loop_operator(a, 0, (1, 2))?.commute_sign(&self.loop_operator(b, 1, (-1, 3))?);
        if s1 != s2 {
            return Err(Error::Construction(format!("statistics of {a}, {b} depend on the loop representative")));
        }
        Ok(s1)
    }

    /// Total charge of the defects inside the cell rectangle
    /// `[x0, x0+w) × [y0, y0+h)` (no wrapping).
    pub fn syndrome_charge(&self, syn: &[bool], region: (i64, i64, i64, i64)) -> Result<Charge> {
        let (x0, y0, w, h) = region;
        let l = self.geom.l as i64;
        if x0 < 0 || y0 < 0 || w < 0 || h < 0 || x0 + w > l || y0 + h > l {
            return Err(Error::IllDefinedCharge(format!("region {region:?} wraps the L = {l} torus")));
        }
        let stack = self.to_stack_syndrome(syn);
        let l2 = (l * l) as usize;
        let mut c = Charge::vacuum(self.copies());
        for (k, &v) in stack.iter().enumerate() {
            if !v {
                continue;
            }
            let (t, cell) = (k / l2, (k % l2) as i64);
            let (x, y) = (cell % l, cell / l);
            if x < x0 || x >= x0 + w || y < y0 || y >= y0 + h {
                continue;
            }
            if let GenRole::Toric { copy, species, .. } = self.geom.role(t, x, y) {
                c = c.fuse(match species {
                    Species::Star => Charge::m(copy, c.n),
                    Species::Plaquette => Charge::e(copy, c.n),
                });
            }
        }
        Ok(c)
    }
}

#[derive(Clone, Debug)]
pub struct ChargeTable {
    pub n_copies: usize,
    pub charges: Vec<Charge>,
    pub statistics: Vec<Vec<i8>>,
    pub spins: Vec<i8>,
    /// Charges detected by the stabilizer group (subsystem codes only).
    pub proper: Option<Vec<Charge>>,
    /// Charges created by gauge operators (subsystem codes only).
    pub gauge: Option<Vec<Charge>>,
}

impl ChargeTable {
    pub fn index(&self, c: Charge) -> usize {
        c.bits as usize
    }

    pub fn stat(&self, a: Charge, b: Charge) -> i8 {
        self.statistics[a.bits as usize][b.bits as usize]
    }

    pub fn fermions(&self) -> Vec<Charge> {
        self.charges.iter().copied().filter(|c| c.spin() == -1).collect()
    }

    /// Bicharacter, symmetry and spin-composition checks over the table.
    pub fn consistency_failures(&self) -> Vec<String> {
        let mut f = Vec::new();
        for &a in &self.charges {
            for &b in &self.charges {
                let sab = self.stat(a, b);
                if sab != self.stat(b, a) {
                    f.push(format!("asymmetric statistics {a}, {b}"));
                }
                if self.spins[self.index(a.fuse(b))] != self.spins[self.index(a)] * self.spins[self.index(b)] * sab {
                    f.push(format!("spin composition fails for {a}, {b}"));
                }
                for &c in &self.charges {
                    if self.stat(a, b.fuse(c)) != sab * self.stat(a, c) {
                        f.push(format!("not a bicharacter at {a}, {b}, {c}"));
                    }
                }
            }
            if self.stat(Charge::vacuum(self.n_copies), a) != 1 {
                f.push(format!("vacuum braids nontrivially with {a}"));
            }
        }
        f
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, &c) in self.charges.iter().enumerate() {
            let row: String = self.statistics[i].iter().map(|&v| if v > 0 { '+' } else { '-' }).collect();
            let mut tags = Vec::new();
            if self.proper.as_ref().is_some_and(|p| p.contains(&c)) {
                tags.push("proper");
            }
            if self.gauge.as_ref().is_some_and(|g| g.contains(&c)) {
                tags.push("gauge");
            }
            s += &format!("{:<10} {} spin {:+} stats {} {}\n", c.name(), c.vector(), self.spins[i], row, tags.join(","));
        }
        s
    }
}

/// Full table over the stack frame. Statistics come from loops pulled back
/// to the code and are checked against the stack model. With `gauge`, the
/// charges are split into those created by gauge operators and those
/// whose loops commute with all gauge operators.
pub fn charge_table(frame: &AnyonFrame, gauge: Option<&CodeDef>) -> Result<ChargeTable> {
    let n = frame.copies();
    let charges: Vec<Charge> = Charge::all(n).collect();
    // two crossing representatives per charge: along each period, through
    // two different points
    let loops: Vec<[Pauli; 4]> = charges
        .iter()
        .map(|&a| {
            Ok([
                frame.loop_operator(a, 0, (0, 0))?,
                frame.loop_operator(a, 1, (0, 0))?,
                frame.loop_operator(a, 0, (1, 2))?,
                frame.loop_operator(a, 1, (-1, 3))?,
            ])
        })
        .collect::<Result<_>>()?;
    let mut statistics = vec![vec![1i8; charges.len()]; charges.len()];
    for (i, &a) in charges.iter().enumerate() {
        for (j, &b) in charges.iter().enumerate() {
            let s1 = loops[i][0].commute_sign(&loops[j][1]);
            let s2 = loops[i][2].commute_sign(&loops[j][3]);
            if s1 != s2 {
                return Err(Error::Construction(format!("statistics of {a}, {b} depend on the loop representative")));
            }
            if s1 != a.braid(b) {
                return Err(Error::Consistency(format!("pulled-back statistics of {a}, {b} disagree with the stack")));
            }
            statistics[i][j] = s1;
        }
    }
    let spins = charges.iter().map(|c| c.spin()).collect();
    let (proper, gauge_ch) = match gauge {
        None => (None, None),
        Some(g) => {
            let (p, q) = split_charges(frame, g)?;
            (Some(p), Some(q))
        }
    };
    Ok(ChargeTable { n_copies: n, charges, statistics, spins, proper, gauge: gauge_ch })
}

/// (proper, gauge) charge subgroups of a subsystem code whose intermediate
/// stabilizer code is `frame.code`. A charge is a gauge charge when its
/// loops lie in G, and proper when its loop class (modulo S′) contains a
/// representative commuting with all of G, i.e. a bare logical operator.
pub fn split_charges(frame: &AnyonFrame, gauge_code: &CodeDef) -> Result<(Vec<Charge>, Vec<Charge>)> {
    let g = gauge_code.at(frame.geom.l).gauge_instances();
    let gsym = syms(&g);
    let mut span = Basis::new(gsym[0].len());
    for v in &gsym {
        span.insert(v.clone());
    }
    // commutation pattern of an operator against every gauge generator
    let pattern = |p: &Pauli| {
        let mut v = BitVec::zeros(g.len());
        for (i, x) in g.iter().enumerate() {
            if !x.commutes(p) {
                v.set(i, true);
            }
        }
        v
    };
    // dressing stays inside the loop's class: only S′ elements are allowed
    let mut dress = Basis::new(g.len());
    for x in &frame.stabs {
        dress.insert(pattern(x));
    }
    let mut proper = Vec::new();
    let mut gauge = Vec::new();
    for a in Charge::all(frame.copies()) {
        let loops = [frame.loop_operator(a, 0, (0, 0))?, frame.loop_operator(a, 1, (0, 0))?];
        if loops.iter().all(|l| dress.contains(&pattern(l))) {
            proper.push(a);
        }
        if loops.iter().all(|l| span.contains(&to_sym(l))) {
            gauge.push(a);
        }
    }
    Ok((proper, gauge))
}

/// Group isomorphism `φ` from table `a` to table `b` preserving spins and
/// statistics, as images of the elementary charges; `constraint` may
/// further restrict the full map.
pub fn find_isomorphism(a: &ChargeTable, b: &ChargeTable, constraint: &dyn Fn(&dyn Fn(Charge) -> Charge) -> bool) -> Option<Vec<Charge>> {
    if a.n_copies != b.n_copies {
        return None;
    }
    let n = a.n_copies;
    let k = 2 * n;
    let basis: Vec<Charge> = (0..k).map(|g| Charge { bits: 1 << g, n }).collect();
    let mut img: Vec<Charge> = Vec::new();
    fn extend(img: &[Charge], c: Charge, n: usize) -> Charge {
        let mut out = Charge::vacuum(n);
        for (g, &im) in img.iter().enumerate() {
            if c.bits >> g & 1 == 1 {
                out = out.fuse(im);
            }
        }
        out
    }
    fn go(
        img: &mut Vec<Charge>,
        basis: &[Charge],
        a: &ChargeTable,
        b: &ChargeTable,
        constraint: &dyn Fn(&dyn Fn(Charge) -> Charge) -> bool,
    ) -> bool {
        let n = a.n_copies;
        let i = img.len();
        if i == basis.len() {
            let phi = |c: Charge| extend(img, c, n);
            // bijective, spins and statistics on the whole table
            let mut seen = std::collections::BTreeSet::new();
            for &c in &a.charges {
                if !seen.insert(phi(c)) || b.spins[b.index(phi(c))] != a.spins[a.index(c)] {
                    return false;
                }
                for &d in &a.charges {
                    if b.stat(phi(c), phi(d)) != a.stat(c, d) {
                        return false;
                    }
                }
            }
            return constraint(&phi);
        }
        for &cand in &b.charges {
            if cand.is_vacuum() || b.spins[b.index(cand)] != a.spins[a.index(basis[i])] {
                continue;
            }
            if (0..i).any(|j| b.stat(img[j], cand) != a.stat(basis[j], basis[i])) {
                continue;
            }
            // independence: cand outside the span of the images so far
            let span_hit = (0..1u32 << i).any(|m| {
                let mut s = Charge::vacuum(n);
                for (j, &im) in img.iter().enumerate() {
                    if m >> j & 1 == 1 {
                        s = s.fuse(im);
                    }
                }
                s == cand
            });
            if span_hit {
                continue;
            }
            img.push(cand);
            if go(img, basis, a, b, constraint) {
                return true;
            }
            img.pop();
        }
        false
    }
    go(&mut img, &basis, a, b, constraint).then_some(img)
}

/// The stack model's own table (no loops involved).
pub fn stack_table(n: usize) -> ChargeTable {
    let charges: Vec<Charge> = Charge::all(n).collect();
    let statistics = charges.iter().map(|&a| charges.iter().map(|&b| a.braid(b)).collect()).collect();
    let spins = charges.iter().map(|c| c.spin()).collect();
    ChargeTable { n_copies: n, charges, statistics, spins, proper: None, gauge: None }
}

/// Reference labels of the subsystem color code's fermions.
pub fn reference_fermions() -> [(&'static str, Charge); 3] {
    let p = |s| Charge::parse(s, 2).expect("label");
    [("f1", p("[m,f]")), ("f2", p("[e,f]")), ("f3", p("[f,0]"))]
}

/// An automorphism of the 2-copy table taking the computed proper charges
/// onto {0, [m,f], [e,f], [f,0]}, returned as the label of each proper
/// charge.
pub fn identify_fermions(table: &ChargeTable) -> Option<Vec<(Charge, &'static str)>> {
    let proper = table.proper.as_ref()?;
    let refs = reference_fermions();
    let target: std::collections::BTreeSet<Charge> =
        refs.iter().map(|r| r.1).chain(std::iter::once(Charge::vacuum(2))).collect();
    let st = stack_table(2);
    let img = find_isomorphism(&st, &st, &|phi| proper.iter().all(|&c| target.contains(&phi(c))))?;
    let phi = |c: Charge| {
        let mut out = Charge::vacuum(2);
        for (g, &im) in img.iter().enumerate() {
            if c.bits >> g & 1 == 1 {
                out = out.fuse(im);
            }
        }
        out
    };
    Some(
        proper
            .iter()
            .filter(|c| !c.is_vacuum())
            .map(|&c| (c, refs.iter().find(|r| r.1 == phi(c)).expect("image in target").0))
            .collect(),
    )
}

pub fn logical_count(code: &CodeDef, l: usize) -> usize {
    code.at(l).logical_count()
}
