//! Pauli operators on an L×L torus of unit cells, and lattice-independent
//! templates anchored at cell (0,0).
//!
//! Operators are `i^phase · ⊗σ` with σ ∈ {X, Y, Z} and Y the Hermitian Pauli.
//! Letters are stored as two bits (x = 1, z = 2), so Y = 3.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Two-bit encoding of a single-qubit Pauli: bit 0 = X part, bit 1 = Z part.
pub type Bits = u8;

pub const X: Bits = 1;
pub const Z: Bits = 2;
pub const Y: Bits = 3;

#[inline]
fn xz_exp(b: Bits) -> u8 {
    // σ(x,z) = i^{xz} X^x Z^z
    (b & 1) & (b >> 1)
}

/// Phase exponent (mod 4) picked up by σ_a σ_b = i^e σ_{a⊕b}.
#[inline]
pub fn mul_phase(a: Bits, b: Bits) -> u8 {
    let c = a ^ b;
    let swap = 2 * ((a >> 1) & (b & 1));
    (xz_exp(a) + xz_exp(b) + swap + 4 - xz_exp(c)) & 3
}

#[inline]
pub fn anticommutes(a: Bits, b: Bits) -> bool {
    (((a & 1) & (b >> 1)) ^ ((a >> 1) & (b & 1))) == 1
}

pub fn letter_char(b: Bits) -> char {
    match b {
        X => 'X',
        Y => 'Y',
        Z => 'Z',
        _ => 'I',
    }
}

pub fn letter_from_char(c: char) -> Option<Bits> {
    match c {
        'X' | 'x' => Some(X),
        'Y' | 'y' => Some(Y),
        'Z' | 'z' => Some(Z),
        _ => None,
    }
}

fn phase_str(p: u8) -> &'static str {
    ["+1", "+i", "-1", "-i"][(p & 3) as usize]
}

fn parse_phase(s: &str) -> Result<u8> {
    match s.trim() {
        "+1" | "1" | "+" => Ok(0),
        "+i" | "i" => Ok(1),
        "-1" | "-" => Ok(2),
        "-i" => Ok(3),
        other => Err(Error::Parse(format!("bad phase `{other}`"))),
    }
}

/// Multiply two sorted sparse supports; returns the product support and the
/// accumulated phase exponent.
fn merge<K: Ord + Copy>(a: &[(K, Bits)], b: &[(K, Bits)]) -> (Vec<(K, Bits)>, u8) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ph = 0u8;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let (p, q) = (a[i].1, b[j].1);
                ph += mul_phase(p, q);
                if p != q {
                    out.push((a[i].0, p ^ q));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    (out, ph & 3)
}

fn sorted_product<K: Ord + Copy>(mut terms: Vec<(K, Bits)>) -> (Vec<(K, Bits)>, u8) {
    // stable sort keeps the left-to-right multiplication order per key
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(K, Bits)> = Vec::with_capacity(terms.len());
    let mut ph = 0u8;
    for (k, b) in terms {
        if b == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.0 == k => {
                ph += mul_phase(last.1, b);
                last.1 ^= b;
                if last.1 == 0 {
                    out.pop();
                }
            }
            _ => out.push((k, b)),
        }
    }
    (out, ph & 3)
}

fn commute_count<K: Ord>(a: &[(K, Bits)], b: &[(K, Bits)]) -> bool {
    let (mut i, mut j, mut odd) = (0, 0, false);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                odd ^= anticommutes(a[i].1, b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    !odd
}

/// Torus geometry: `l × l` unit cells with `sites` qubits each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub l: usize,
    pub sites: usize,
}

impl Lattice {
    pub fn new(l: usize, sites: usize) -> Self {
        Lattice { l, sites }
    }

    pub fn n(&self) -> usize {
        self.l * self.l * self.sites
    }

    #[inline]
    pub fn wrap(&self, c: i64) -> usize {
        c.rem_euclid(self.l as i64) as usize
    }

    #[inline]
    pub fn index(&self, x: i64, y: i64, s: usize) -> usize {
        (self.wrap(y) * self.l + self.wrap(x)) * self.sites + s
    }

    #[inline]
    pub fn qubit(&self, idx: usize) -> Qubit {
        let s = idx % self.sites;
        let c = idx / self.sites;
        Qubit { x: c % self.l, y: c / self.l, s }
    }

    /// Shortest signed displacement from `a` to `b` along one torus axis.
    pub fn delta(&self, a: usize, b: usize) -> i64 {
        let l = self.l as i64;
        let d = (b as i64 - a as i64).rem_euclid(l);
        if 2 * d > l {
            d - l
        } else {
            d
        }
    }
}

/// A qubit position: cell coordinates reduced mod L plus the site in the cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Qubit {
    pub x: usize,
    pub y: usize,
    pub s: usize,
}

/// Pauli operator on a torus, sparse and canonical: support sorted by flat
/// qubit index with no identity entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pauli {
    lat: Lattice,
    terms: Vec<(u32, Bits)>,
    phase: u8,
}

impl Pauli {
    pub fn identity(lat: Lattice) -> Self {
        Pauli { lat, terms: Vec::new(), phase: 0 }
    }

    pub fn single(lat: Lattice, q: usize, b: Bits) -> Self {
        Pauli::from_terms(lat, vec![(q, b)], 0)
    }

    /// Ordered product `i^phase · ∏ σ_k`, multiplied left to right.
    pub fn from_terms(lat: Lattice, terms: Vec<(usize, Bits)>, phase: u8) -> Self {
        let n = lat.n();
        let t: Vec<(u32, Bits)> = terms
            .into_iter()
            .map(|(q, b)| {
                assert!(q < n, "qubit {q} outside torus of {n}");
                (q as u32, b)
            })
            .collect();
        let (terms, ph) = sorted_product(t);
        Pauli { lat, terms, phase: (phase + ph) & 3 }
    }

    /// Operator with the given X and Z supports (flat indices) in XZ-ordered
    /// form `i^phase_xz · X^x Z^z`, converted to the canonical phase.
    pub fn from_xz(lat: Lattice, xs: &[usize], zs: &[usize], phase_xz: u8) -> Self {
        let mut t: Vec<(usize, Bits)> = xs.iter().map(|&q| (q, X)).collect();
        t.extend(zs.iter().map(|&q| (q, Z)));
        Pauli::from_terms(lat, t, phase_xz)
    }

    pub fn lattice(&self) -> Lattice {
        self.lat
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, p: u8) -> Self {
        self.phase = p & 3;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, Bits)> + '_ {
        self.terms.iter().map(|&(q, b)| (q as usize, b))
    }

    pub fn weight(&self) -> usize {
        self.terms.len()
    }

    pub fn is_identity(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the two operators agree up to phase.
    pub fn same_support(&self, o: &Pauli) -> bool {
        self.terms == o.terms
    }

    pub fn get(&self, q: usize) -> Bits {
        match self.terms.binary_search_by_key(&(q as u32), |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    pub fn x_support(&self) -> Vec<Qubit> {
        self.terms.iter().filter(|t| t.1 & X != 0).map(|t| self.lat.qubit(t.0 as usize)).collect()
    }

    pub fn z_support(&self) -> Vec<Qubit> {
        self.terms.iter().filter(|t| t.1 & Z != 0).map(|t| self.lat.qubit(t.0 as usize)).collect()
    }

    fn check(&self, o: &Pauli) -> Result<()> {
        if self.lat != o.lat {
            return Err(Error::Dimension(format!("{:?} vs {:?}", self.lat, o.lat)));
        }
        Ok(())
    }

    /// Exact product `self · o`.
    pub fn try_mul(&self, o: &Pauli) -> Result<Pauli> {
        self.check(o)?;
        let (terms, ph) = merge(&self.terms, &o.terms);
        Ok(Pauli { lat: self.lat, terms, phase: (self.phase + o.phase + ph) & 3 })
    }

    pub fn mul(&self, o: &Pauli) -> Pauli {
        self.try_mul(o).expect("lattice mismatch")
    }

    pub fn try_commutes(&self, o: &Pauli) -> Result<bool> {
        self.check(o)?;
        Ok(commute_count(&self.terms, &o.terms))
    }

    pub fn commutes(&self, o: &Pauli) -> bool {
        self.try_commutes(o).expect("lattice mismatch")
    }

    /// +1 if the operators commute, −1 otherwise.
    pub fn commute_sign(&self, o: &Pauli) -> i8 {
        if self.commutes(o) {
            1
        } else {
            -1
        }
    }

    pub fn translate(&self, dx: i64, dy: i64) -> Pauli {
        let lat = self.lat;
        let mut terms: Vec<(u32, Bits)> = self
            .terms
            .iter()
            .map(|&(q, b)| {
                let p = lat.qubit(q as usize);
                (lat.index(p.x as i64 + dx, p.y as i64 + dy, p.s) as u32, b)
            })
            .collect();
        terms.sort_unstable_by_key(|t| t.0);
        Pauli { lat, terms, phase: self.phase }
    }

    /// Side (in cells) of the smallest axis-aligned square window holding the
    /// support, minimized over torus wrappings. Identity has range 0.
    pub fn range(&self) -> usize {
        if self.terms.is_empty() {
            return 0;
        }
        let l = self.lat.l;
        let mut xs = vec![false; l];
        let mut ys = vec![false; l];
        for &(q, _) in &self.terms {
            let p = self.lat.qubit(q as usize);
            xs[p.x] = true;
            ys[p.y] = true;
        }
        arc(&xs).max(arc(&ys))
    }

    /// Hermitian conjugate-free inverse: P⁻¹ = P† for Paulis.
    pub fn inverse(&self) -> Pauli {
        // (i^p σ)⁻¹ = i^{-p} σ
        Pauli { lat: self.lat, terms: self.terms.clone(), phase: (4 - self.phase) & 3 }
    }

    /// Sign ±1 if the operator is Hermitian (phase ±1), otherwise None.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    /// Cell-relative template view: offsets relative to `(ox, oy)`, chosen as
    /// the shortest torus displacement.
    pub fn to_template(&self, ox: usize, oy: usize) -> Template {
        let lat = self.lat;
        let terms = self
            .terms
            .iter()
            .map(|&(q, b)| {
                let p = lat.qubit(q as usize);
                (Site { dx: lat.delta(ox, p.x) as i32, dy: lat.delta(oy, p.y) as i32, s: p.s as u32 }, b)
            })
            .collect();
        Template::from_terms(terms, self.phase)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{};", phase_str(self.phase));
        for &(q, b) in &self.terms {
            let p = self.lat.qubit(q as usize);
            s.push_str(&format!(" {},{},{}:{}", p.x, p.y, p.s, letter_char(b)));
        }
        s
    }

    pub fn parse(lat: Lattice, line: &str) -> Result<Pauli> {
        let (ph, rest) = line
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("missing `;` in `{line}`")))?;
        let phase = parse_phase(ph)?;
        let mut terms = Vec::new();
        for tok in rest.split_whitespace() {
            let (pos, letter) = tok
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad token `{tok}`")))?;
            let b = letter
                .chars()
                .next()
                .and_then(letter_from_char)
                .ok_or_else(|| Error::Parse(format!("bad letter in `{tok}`")))?;
            let v: Vec<i64> = pos
                .split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad coordinate in `{tok}`"))))
                .collect::<Result<_>>()?;
            if v.len() != 3 || v[2] < 0 || v[2] as usize >= lat.sites {
                return Err(Error::Parse(format!("bad position in `{tok}`")));
            }
            terms.push((lat.index(v[0], v[1], v[2] as usize), b));
        }
        Ok(Pauli::from_terms(lat, terms, phase))
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Length of the shortest circular arc covering all marked positions.
fn arc(occ: &[bool]) -> usize {
    let l = occ.len();
    let Some(start) = occ.iter().position(|&b| b) else { return 0 };
    let mut best_gap = 0;
    let mut gap = 0;
    for k in 1..=l {
        if occ[(start + k) % l] {
            best_gap = best_gap.max(gap);
            gap = 0;
        } else {
            gap += 1;
        }
    }
    l - best_gap
}

/// Site of a template: offset from the anchor cell plus the site in the cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub dy: i32,
    pub dx: i32,
    pub s: u32,
}

impl Site {
    pub fn new(dx: i32, dy: i32, s: usize) -> Self {
        Site { dx, dy, s: s as u32 }
    }

    pub fn shift(self, dx: i32, dy: i32) -> Site {
        Site { dx: self.dx + dx, dy: self.dy + dy, s: self.s }
    }
}

/// Lattice-independent Pauli operator anchored at cell (0,0); instances are
/// obtained by translation onto a torus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Template {
    terms: Vec<(Site, Bits)>,
    phase: u8,
}

impl Template {
    pub fn identity() -> Self {
        Template { terms: Vec::new(), phase: 0 }
    }

    pub fn from_terms(terms: Vec<(Site, Bits)>, phase: u8) -> Self {
        let (terms, ph) = sorted_product(terms);
        Template { terms, phase: (phase + ph) & 3 }
    }

    /// Convenience: `(dx, dy, site, letter)` tuples with letter in "XYZ".
    pub fn of(spec: &[(i32, i32, usize, char)]) -> Self {
        let terms = spec
            .iter()
            .map(|&(dx, dy, s, c)| (Site::new(dx, dy, s), letter_from_char(c).expect("letter")))
            .collect();
        Template::from_terms(terms, 0)
    }

    pub fn single(site: Site, b: Bits) -> Self {
        Template { terms: vec![(site, b)], phase: 0 }
    }

    pub fn terms(&self) -> &[(Site, Bits)] {
        &self.terms
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, p: u8) -> Self {
        self.phase = p & 3;
        self
    }

    pub fn weight(&self) -> usize {
        self.terms.len()
    }

    pub fn is_identity(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, o: &Template) -> Template {
        let (terms, ph) = merge(&self.terms, &o.terms);
        Template { terms, phase: (self.phase + o.phase + ph) & 3 }
    }

    pub fn commutes(&self, o: &Template) -> bool {
        commute_count(&self.terms, &o.terms)
    }

    pub fn shift(&self, dx: i32, dy: i32) -> Template {
        Template { terms: self.terms.iter().map(|&(s, b)| (s.shift(dx, dy), b)).collect(), phase: self.phase }
    }

    /// Extent in cells along x and y (1 for a single cell, 0 for identity).
    pub fn extent(&self) -> (usize, usize) {
        if self.terms.is_empty() {
            return (0, 0);
        }
        let (mut x0, mut x1, mut y0, mut y1) = (i32::MAX, i32::MIN, i32::MAX, i32::MIN);
        for (s, _) in &self.terms {
            x0 = x0.min(s.dx);
            x1 = x1.max(s.dx);
            y0 = y0.min(s.dy);
            y1 = y1.max(s.dy);
        }
        ((x1 - x0 + 1) as usize, (y1 - y0 + 1) as usize)
    }

    /// Side of the smallest square window holding the support (no wrapping).
    pub fn range(&self) -> usize {
        let (a, b) = self.extent();
        a.max(b)
    }

    /// Lowest (dx, dy) corner of the bounding box.
    pub fn min_corner(&self) -> (i32, i32) {
        let x = self.terms.iter().map(|t| t.0.dx).min().unwrap_or(0);
        let y = self.terms.iter().map(|t| t.0.dy).min().unwrap_or(0);
        (x, y)
    }

    /// Translate so the bounding box starts at (0,0).
    pub fn normalized(&self) -> Template {
        let (x, y) = self.min_corner();
        self.shift(-x, -y)
    }

    pub fn max_site(&self) -> usize {
        self.terms.iter().map(|t| t.0.s as usize + 1).max().unwrap_or(0)
    }

    /// Instance anchored at cell `(cx, cy)` of the torus.
    pub fn instance(&self, lat: Lattice, cx: i64, cy: i64) -> Pauli {
        let terms = self
            .terms
            .iter()
            .map(|&(s, b)| (lat.index(cx + s.dx as i64, cy + s.dy as i64, s.s as usize), b))
            .collect();
        Pauli::from_terms(lat, terms, self.phase)
    }

    /// Same operator with X and Z exchanged on every qubit (phase recomputed
    /// so that the result is again Hermitian-real when the input was).
    pub fn swap_xz(&self) -> Template {
        let terms = self.terms.iter().map(|&(s, b)| (s, ((b & 1) << 1) | (b >> 1))).collect();
        Template { terms, phase: self.phase }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{};", phase_str(self.phase));
        for &(p, b) in &self.terms {
            s.push_str(&format!(" {},{},{}:{}", p.dx, p.dy, p.s, letter_char(b)));
        }
        s
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Template {
    type Err = Error;

    fn from_str(line: &str) -> Result<Template> {
        let (ph, rest) = line
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("missing `;` in `{line}`")))?;
        let phase = parse_phase(ph)?;
        let mut terms = Vec::new();
        for tok in rest.split_whitespace() {
            let (pos, letter) = tok
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad token `{tok}`")))?;
            let b = letter
                .chars()
                .next()
                .and_then(letter_from_char)
                .ok_or_else(|| Error::Parse(format!("bad letter in `{tok}`")))?;
            let v: Vec<i32> = pos
                .split(',')
                .map(|c| c.trim().parse::<i32>().map_err(|_| Error::Parse(format!("bad coordinate in `{tok}`"))))
                .collect::<Result<_>>()?;
            if v.len() != 3 || v[2] < 0 {
                return Err(Error::Parse(format!("bad position in `{tok}`")));
            }
            terms.push((Site::new(v[0], v[1], v[2] as usize), b));
        }
        Ok(Template::from_terms(terms, phase))
    }
}
