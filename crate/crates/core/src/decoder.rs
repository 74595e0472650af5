//! Noise sampling, syndromes and matching-based decoding.
//!
//! Every supported code is decoded in the frame of a toric-code stack: the
//! syndrome is pushed through a local Clifford map, defects of each copy and
//! species are paired by exact minimum-weight perfect matching, and the
//! connecting strings are pulled back. The subsystem code is decoded through
//! its intermediate stabilizer code S′: besides the stabilizer syndrome, the
//! solid-edge gauge outcomes (measured first, the state sits in their +1
//! eigenspace before noise) complete the S′ syndrome. When no stabilizer is
//! violated the solid defects are cleared by a gauge operator instead.

use std::sync::OnceLock;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anyons::{split_charges, AnyonFrame, Charge};
use crate::codes::{build_intermediate_sz, build_tscc_48, by_name, instances, solid_templates, CodeDef, CodeKind};
use crate::error::{Error, Result};
use crate::gf2::{from_sym, symp, to_sym, Basis, BitVec};
use crate::mapper::{self, builtin_map, LocalCliffordMap, PushRules};
use crate::matching::min_weight_perfect_matching;
use crate::pauli::{Bits, Lattice, Pauli, Template, X, Y, Z};
use crate::toric::{GenRole, Species, ToricGeometry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    BitFlip,
    Depolarizing,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::BitFlip => "bit_flip",
            ChannelKind::Depolarizing => "depolarizing",
        }
    }

    pub fn parse(s: &str) -> Result<ChannelKind> {
        match s {
            "bit_flip" => Ok(ChannelKind::BitFlip),
            "depolarizing" => Ok(ChannelKind::Depolarizing),
            _ => Err(Error::Parse(format!("unknown channel `{s}` (bit_flip, depolarizing)"))),
        }
    }
}

/// bit_flip: X with probability p; depolarizing: X, Y, Z each with p/3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseChannel {
    pub kind: ChannelKind,
    pub p: f64,
}

impl NoiseChannel {
    pub fn new(kind: ChannelKind, p: f64) -> Result<NoiseChannel> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
        }
        Ok(NoiseChannel { kind, p })
    }
}

/// Per-trial generator: the ChaCha key is built from (seed, code, L,
/// p-index) and the trial index selects the stream, so every trial is
/// reproducible on its own.
pub fn trial_rng(seed: u64, code: &str, l: usize, p_index: usize, trial: u64) -> ChaCha8Rng {
    // FNV-1a of the code name
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in code.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x100_0000_01b3);
    }
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&h.to_le_bytes());
    key[16..24].copy_from_slice(&(l as u64).to_le_bytes());
    key[24..].copy_from_slice(&(p_index as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// Sparse i.i.d. error on `n` qubits, in qubit order.
pub fn sample_terms(channel: &NoiseChannel, n: usize, rng: &mut impl RngCore) -> Vec<(usize, Bits)> {
    let mut out = Vec::new();
    if channel.p == 0.0 {
        return out;
    }
    let p = channel.p;
    for q in 0..n {
        let r = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if r < p {
            let b = match channel.kind {
                ChannelKind::BitFlip => X,
                ChannelKind::Depolarizing if r < p / 3.0 => X,
                ChannelKind::Depolarizing if r < 2.0 * p / 3.0 => Y,
                ChannelKind::Depolarizing => Z,
            };
            out.push((q, b));
        }
    }
    out
}

pub fn sample_error(channel: &NoiseChannel, code: &CodeDef, seed: u64, trial: u64) -> Pauli {
    let mut rng = trial_rng(seed, &code.name, code.l(), 0, trial);
    Pauli::from_terms(code.lattice, sample_terms(channel, code.n(), &mut rng), 0)
}

/// Violated generators (template-major instance order). Subsystem codes
/// report their stabilizer generators only.
pub fn extract_syndrome(code: &CodeDef, error: &Pauli) -> Vec<bool> {
    mapper::syndrome_of(&code.stabilizer_instances(), error)
}

// ---------------------------------------------------------------------------
// Matching on a toric-code stack.

fn roles_of(geom: &ToricGeometry, n_templates: usize) -> Vec<GenRole> {
    let l = geom.l as i64;
    let mut roles = Vec::with_capacity(n_templates * (l * l) as usize);
    for t in 0..n_templates {
        for y in 0..l {
            for x in 0..l {
                roles.push(geom.role(t, x, y));
            }
        }
    }
    roles
}

/// Pair the defects of every (copy, species) class and emit the connecting
/// strings; ancilla defects are cleared by a single flip.
fn matching_terms(geom: &ToricGeometry, roles: &[GenRole], syndrome: &[bool], out: &mut Vec<(usize, Bits)>) -> Result<()> {
    let mut classes: Vec<Vec<(i64, i64)>> = vec![Vec::new(); 2 * geom.copies];
    for (k, &v) in syndrome.iter().enumerate() {
        if !v {
            continue;
        }
        match roles[k] {
            GenRole::Toric { copy, species, pos } => classes[2 * copy + species as usize].push(pos),
            GenRole::Ancilla { qubit, flip } => out.push((qubit, flip)),
        }
    }
    for (c, defects) in classes.iter().enumerate() {
        if defects.len() % 2 == 1 {
            return Err(Error::Parity(defects.len()));
        }
        let (copy, species) = (c / 2, if c % 2 == 0 { Species::Star } else { Species::Plaquette });
        let letter = if species == Species::Star { X } else { Z };
        for (a, b) in min_weight_perfect_matching(defects.len(), |a, b| geom.distance(defects[a], defects[b])) {
            let d = geom.displacement(defects[a], defects[b]);
            out.extend(geom.string_qubits(copy, species, defects[a], d).into_iter().map(|q| (q, letter)));
        }
    }
    Ok(())
}

fn xor_terms(v: &mut BitVec, n: usize, terms: &[(usize, Bits)]) {
    for &(q, b) in terms {
        if b & X != 0 {
            v.flip(q);
        }
        if b & Z != 0 {
            v.flip(n + q);
        }
    }
}

/// MWPM correction for a syndrome of the (possibly blocked, padded) stack
/// described by `geom`, in the stack code's generator order.
pub fn mwpm_decode_ktc(geom: &ToricGeometry, syndrome: &[bool]) -> Result<Pauli> {
    let code = geom.code()?;
    let roles = roles_of(geom, code.stabilizers.len());
    if syndrome.len() != roles.len() {
        return Err(Error::Dimension(format!("syndrome has {} entries, stack has {} generators", syndrome.len(), roles.len())));
    }
    let mut terms = Vec::new();
    matching_terms(geom, &roles, syndrome, &mut terms)?;
    let n = geom.lattice().n();
    let mut v = BitVec::zeros(2 * n);
    xor_terms(&mut v, n, &terms);
    Ok(from_sym(geom.lattice(), &v))
}

/// Push a source syndrome through `map`, match on the stack, pull back.
pub fn mapped_decode(code: &CodeDef, map: &LocalCliffordMap, syndrome: &[bool]) -> Result<Pauli> {
    let geom = ToricGeometry::from_spec(&map.target, code.l(), map.sites, &map.ancilla_out)?;
    let target = geom.code()?;
    let rules = mapper::push_rules(map, code, &target)?;
    mapper::check_consistent(&mapper::syndrome_relations(code), syndrome)?;
    let pushed = mapper::push_syndrome(&rules, syndrome, code.l());
    let c = mwpm_decode_ktc(&geom, &pushed)?;
    mapper::pull_correction(&map.inverse()?, &c, code.sites())
}

// ---------------------------------------------------------------------------
// Gauge fixing for the subsystem color code.

/// Clears solid-edge (S_z) defects with link gauge operators. Links whose
/// solid syndrome stays inside one cell give a cheap local pass; the full
/// fix falls back on a torus-wide solve.
pub struct GaugeFixer {
    l: usize,
    n_solid: usize,
    /// Echelon rows over the 24 solid templates of a cell: (solid mask, link mask).
    local: Vec<(u32, u64)>,
    local_links: Vec<Template>,
    links: Vec<Template>,
    global: OnceLock<(Basis, Vec<Pauli>)>,
}

impl GaugeFixer {
    pub fn new(tscc: &CodeDef) -> Result<GaugeFixer> {
        if tscc.kind != CodeKind::Subsystem {
            return Err(Error::Precondition(format!("{} has no gauge group", tscc.name)));
        }
        let solids = solid_templates(tscc);
        if solids.len() > 32 {
            return Err(Error::Precondition("more than 32 solid templates per cell".into()));
        }
        let links: Vec<Template> = tscc.gauge.iter().filter(|t| t.terms().iter().any(|&(_, b)| b != Z)).cloned().collect();
        let mut local_links = Vec::new();
        let mut rows: Vec<(u32, u64)> = Vec::new();
        for t in &links {
            let mut mask = 0u32;
            let mut inside = true;
            for (j, s) in solids.iter().enumerate() {
                for dx in -2..=2 {
                    for dy in -2..=2 {
                        if !t.commutes(&s.shift(dx, dy)) {
                            if (dx, dy) == (0, 0) {
                                mask |= 1 << j;
                            } else {
                                inside = false;
                            }
                        }
                    }
                }
            }
            if inside && local_links.len() < 64 {
                rows.push((mask, 1 << local_links.len()));
                local_links.push(t.clone());
            }
        }
        // reduced echelon form, pivot = lowest set bit
        let mut local: Vec<(u32, u64)> = Vec::new();
        for (mut m, mut c) in rows {
            for &(pm, pc) in &local {
                if m >> pm.trailing_zeros() & 1 == 1 {
                    m ^= pm;
                    c ^= pc;
                }
            }
            if m != 0 {
                for r in local.iter_mut() {
                    if r.0 >> m.trailing_zeros() & 1 == 1 {
                        r.0 ^= m;
                        r.1 ^= c;
                    }
                }
                local.push((m, c));
            }
        }
        local.sort_by_key(|r| r.0.trailing_zeros());
        Ok(GaugeFixer { l: tscc.l(), n_solid: solids.len(), local, local_links, links, global: OnceLock::new() })
    }

    /// Reduce the defects of every cell against the cell's own links.
    /// `sigma` (solid-template-major) is updated in place; the applied
    /// gauge operator is xored into `gauge` (symplectic, `n` qubits).
    pub fn local_pass(&self, sigma: &mut [bool], gauge: &mut BitVec, lat: Lattice) {
        let l2 = self.l * self.l;
        let n = lat.n();
        for cell in 0..l2 {
            let mut m = 0u32;
            for j in 0..self.n_solid {
                if sigma[j * l2 + cell] {
                    m |= 1 << j;
                }
            }
            if m == 0 {
                continue;
            }
            let mut combo = 0u64;
            for &(pm, pc) in &self.local {
                if m >> pm.trailing_zeros() & 1 == 1 {
                    m ^= pm;
                    combo ^= pc;
                }
            }
            for j in 0..self.n_solid {
                sigma[j * l2 + cell] = m >> j & 1 == 1;
            }
            let (x, y) = ((cell % self.l) as i64, (cell / self.l) as i64);
            while combo != 0 {
                let k = combo.trailing_zeros() as usize;
                combo &= combo - 1;
                for &(s, b) in self.local_links[k].terms() {
                    let q = lat.index(x + s.dx as i64, y + s.dy as i64, s.s as usize);
                    if b & X != 0 {
                        gauge.flip(q);
                    }
                    if b & Z != 0 {
                        gauge.flip(n + q);
                    }
                }
            }
        }
    }

    /// A gauge operator clearing every solid defect.
    pub fn fix(&self, tscc: &CodeDef, sigma: &[bool]) -> Result<Pauli> {
        let lat = tscc.lattice;
        let n = lat.n();
        let mut s = sigma.to_vec();
        let mut g = BitVec::zeros(2 * n);
        self.local_pass(&mut s, &mut g, lat);
        if s.iter().any(|&b| b) {
            let (basis, ls) = self.global_basis(tscc);
            let mut v = BitVec::zeros(s.len());
            for (i, &b) in s.iter().enumerate() {
                v.set(i, b);
            }
            let idx = basis.decompose(&v).ok_or_else(|| {
                Error::Construction("solid defects cannot be paired by gauge operators".into())
            })?;
            for i in idx {
                g.xor_with(&to_sym(&ls[i]));
            }
        }
        Ok(from_sym(lat, &g))
    }

    fn global_basis(&self, tscc: &CodeDef) -> &(Basis, Vec<Pauli>) {
        self.global.get_or_init(|| {
            let lat = tscc.lattice;
            let solids = instances(&solid_templates(tscc), lat);
            let ls = instances(&self.links, lat);
            let mut basis = Basis::tracking(solids.len(), ls.len());
            for p in &ls {
                let mut v = BitVec::zeros(solids.len());
                for (i, s) in solids.iter().enumerate() {
                    if !s.commutes(p) {
                        v.set(i, true);
                    }
                }
                basis.insert_tracked(v);
            }
            (basis, ls)
        })
    }
}

/// Gauge operator clearing the solid-edge syndrome `sigma` of the subsystem
/// code (solid-template-major order).
pub fn fix_gauge_excitations(tscc: &CodeDef, sigma: &[bool]) -> Result<Pauli> {
    GaugeFixer::new(tscc)?.fix(tscc, sigma)
}

// ---------------------------------------------------------------------------
// Adjudication.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Success,
    LogicalFailure,
}

#[derive(Clone, Debug)]
pub struct DecodeOutcome {
    /// Everything applied to the error: gauge fixing and matching correction.
    pub correction: Pauli,
    pub verdict: Verdict,
    /// Charges of the residual's loops along the two periods, when known.
    pub residual_class: Option<[Charge; 2]>,
}

/// Membership oracle: the residual error·correction must lie in the
/// stabilizer group (gauge group for subsystem codes).
pub fn adjudicate(code: &CodeDef, error: &Pauli, correction: &Pauli) -> Result<DecodeOutcome> {
    let r = error.mul(correction);
    if extract_syndrome(code, &r).iter().any(|&b| b) {
        return Err(Error::Precondition("residual error has a nonzero syndrome".into()));
    }
    let gens = match code.kind {
        CodeKind::Stabilizer => code.stabilizer_instances(),
        CodeKind::Subsystem => code.gauge_instances(),
    };
    let mut span = Basis::new(2 * code.n());
    for g in &gens {
        span.insert(to_sym(g));
    }
    let verdict = if span.contains(&to_sym(&r)) { Verdict::Success } else { Verdict::LogicalFailure };
    Ok(DecodeOutcome { correction: correction.clone(), verdict, residual_class: None })
}

// ---------------------------------------------------------------------------
// Precomputed decoder.

static RULES_TCC: OnceLock<std::result::Result<(PushRules, LocalCliffordMap), String>> = OnceLock::new();
static RULES_SZ: OnceLock<std::result::Result<(PushRules, LocalCliffordMap), String>> = OnceLock::new();
static TSCC_GAUGE_CHARGES: OnceLock<std::result::Result<Vec<Charge>, String>> = OnceLock::new();

/// Push rules and inverse of a shipped map (both L-independent).
fn map_data(source: &str) -> Result<&'static (PushRules, LocalCliffordMap)> {
    let cell = if source == "tcc48" { &RULES_TCC } else { &RULES_SZ };
    cell.get_or_init(|| {
        let build = || -> Result<(PushRules, LocalCliffordMap)> {
            let map = builtin_map(source).ok_or_else(|| Error::NotFound(format!("no shipped map for {source}")))?;
            let code = by_name(source, 4)?;
            let geom = ToricGeometry::from_spec(&map.target, 4, map.sites, &map.ancilla_out)?;
            let rules = mapper::push_rules(&map, &code, &geom.code()?)?;
            Ok((rules, map.inverse()?))
        };
        build().map_err(|e| e.to_string())
    })
    .as_ref()
    .map_err(|e| Error::Construction(e.clone()))
}

/// Gauge charges of the subsystem color code, read off at L = 4.
pub fn tscc_gauge_charges() -> Result<Vec<Charge>> {
    TSCC_GAUGE_CHARGES
        .get_or_init(|| {
            let build = || -> Result<Vec<Charge>> {
                let g = build_tscc_48(4)?;
                let sz = build_intermediate_sz(&g)?;
                let map = builtin_map("tscc48-sz").ok_or_else(|| Error::NotFound("tscc48-sz map".into()))?;
                let frame = AnyonFrame::mapped(&sz, &map)?;
                Ok(split_charges(&frame, &g)?.1)
            };
            build().map_err(|e| e.to_string())
        })
        .clone()
        .map_err(Error::Construction)
}

/// A code at one torus size with everything needed to decode many trials.
pub struct Decoder {
    pub code: CodeDef,
    lat: Lattice,
    /// Length of the reported (measured) syndrome.
    measured: usize,
    /// Per qubit: generators of the decoding frame flipped by X and by Z.
    hits: Vec<[Vec<u32>; 2]>,
    frame_gens: usize,
    geom: ToricGeometry,
    roles: Vec<GenRole>,
    push: Option<Vec<Vec<u32>>>,
    /// Per stack qubit: source images of X and Z.
    pull: Option<Vec<[Vec<(u32, Bits)>; 2]>>,
    /// Source-frame loops, `loops[dir][g]` for elementary charge g.
    loops: [Vec<BitVec>; 2],
    allowed: Vec<Charge>,
    /// Subsystem code only: clears solid outcomes when no stabilizer fires.
    gauge_fix: Option<GaugeFixer>,
}

impl Decoder {
    /// Decoders exist for `ktc`, `ktc-stack:n`, `tcc48`, `tscc48` and
    /// `tscc48-sz`.
    pub fn new(name: &str, l: usize) -> Result<Decoder> {
        let code = by_name(name, l)?;
        let (frame, map_src) = match name {
            "tcc48" | "tscc48-sz" => (code.clone(), Some(name)),
            "tscc48" => (build_intermediate_sz(&code)?, Some("tscc48-sz")),
            _ if name == "ktc" || name.starts_with("ktc-stack:") => (code.clone(), None),
            _ => return Err(Error::Precondition(format!("no decoder for `{name}`"))),
        };
        let lat = code.lattice;
        let n = lat.n();
        let l2 = l * l;

        let gens = frame.stabilizer_instances();
        let mut hits = vec![[Vec::new(), Vec::new()]; n];
        for (k, g) in gens.iter().enumerate() {
            for (q, b) in g.terms() {
                if b & Z != 0 {
                    hits[q][0].push(k as u32);
                }
                if b & X != 0 {
                    hits[q][1].push(k as u32);
                }
            }
        }
        let measured = code.stabilizers.len() * l2;

        let (geom, push, pull) = match map_src {
            None => (ToricGeometry::from_spec(name, l, code.sites(), &[])?, None, None),
            Some(src) => {
                let (rules, inv) = map_data(src)?;
                let map = builtin_map(src).expect("checked in map_data");
                let geom = ToricGeometry::from_spec(&map.target, l, map.sites, &map.ancilla_out)?;
                let li = l as i64;
                let mut push = vec![Vec::new(); gens.len()];
                for (ti, rule) in rules.rules.iter().enumerate() {
                    for y in 0..li {
                        for x in 0..li {
                            let tk = (ti * l2) as i64 + y * li + x;
                            for &(si, dx, dy) in rule {
                                let cx = (x + dx as i64).rem_euclid(li);
                                let cy = (y + dy as i64).rem_euclid(li);
                                push[si * l2 + (cy * li + cx) as usize].push(tk as u32);
                            }
                        }
                    }
                }
                let tl = geom.lattice();
                let mut pull = Vec::with_capacity(tl.n());
                for q in 0..tl.n() {
                    let c = tl.qubit(q);
                    let img = |t: &Template| -> Vec<(u32, Bits)> {
                        t.instance(lat, c.x as i64, c.y as i64)
                            .terms()
                            .filter(|&(qq, _)| lat.qubit(qq).s < code.sites())
                            .map(|(qq, b)| (qq as u32, b))
                            .collect()
                    };
                    pull.push([img(&inv.images[c.s][0]), img(&inv.images[c.s][1])]);
                }
                (geom, Some(push), Some(pull))
            }
        };
        let stack = geom.code()?;
        let roles = roles_of(&geom, stack.stabilizers.len());

        // a subsystem residual may carry any gauge charge
        let allowed = if code.kind == CodeKind::Subsystem { tscc_gauge_charges()? } else { vec![Charge::vacuum(geom.copies)] };
        let gauge_fix = if code.kind == CodeKind::Subsystem { Some(GaugeFixer::new(&code)?) } else { None };

        let mut dec = Decoder {
            code,
            lat,
            measured,
            hits,
            frame_gens: gens.len(),
            geom,
            roles,
            push,
            pull,
            loops: [Vec::new(), Vec::new()],
            allowed,
            gauge_fix,
        };
        for dir in 0..2 {
            for g in 0..2 * dec.geom.copies {
                let sp = if g % 2 == 0 { Species::Plaquette } else { Species::Star };
                let letter = if sp == Species::Star { X } else { Z };
                let d = dec.geom.periods()[dir];
                let terms: Vec<(usize, Bits)> =
                    dec.geom.string_qubits(g / 2, sp, (0, 0), d).into_iter().map(|q| (q, letter)).collect();
                let v = dec.pull_terms(&terms);
                if dec.frame_syndrome(&v).iter().any(|&b| b) {
                    return Err(Error::Construction(format!("loop {g} along period {dir} is not closed")));
                }
                dec.loops[dir].push(v);
            }
        }
        Ok(dec)
    }

    pub fn l(&self) -> usize {
        self.code.l()
    }

    pub fn geometry(&self) -> &ToricGeometry {
        &self.geom
    }

    /// Stack-frame terms → source symplectic vector.
    fn pull_terms(&self, terms: &[(usize, Bits)]) -> BitVec {
        let n = self.lat.n();
        let mut v = BitVec::zeros(2 * n);
        match &self.pull {
            None => xor_terms(&mut v, n, terms),
            Some(pull) => {
                for &(q, b) in terms {
                    for (k, bit) in [(0, X), (1, Z)] {
                        if b & bit != 0 {
                            for &(qq, bb) in &pull[q][k] {
                                if bb & X != 0 {
                                    v.flip(qq as usize);
                                }
                                if bb & Z != 0 {
                                    v.flip(n + qq as usize);
                                }
                            }
                        }
                    }
                }
            }
        }
        v
    }

    /// Syndrome of a symplectic vector against the decoding frame (S′ for
    /// the subsystem code: stabilizers first, then solid edges).
    fn frame_syndrome(&self, v: &BitVec) -> Vec<bool> {
        let n = self.lat.n();
        let mut s = vec![false; self.frame_gens];
        for i in v.ones() {
            let (q, k) = if i < n { (i, 0) } else { (i - n, 1) };
            for &g in &self.hits[q][k] {
                s[g as usize] ^= true;
            }
        }
        s
    }

    fn frame_syndrome_terms(&self, terms: &[(usize, Bits)]) -> Vec<bool> {
        let mut s = vec![false; self.frame_gens];
        for &(q, b) in terms {
            for (k, bit) in [(0, X), (1, Z)] {
                if b & bit != 0 {
                    for &g in &self.hits[q][k] {
                        s[g as usize] ^= true;
                    }
                }
            }
        }
        s
    }

    /// Measured syndrome (stabilizer generators only).
    pub fn syndrome(&self, error: &Pauli) -> Vec<bool> {
        let terms: Vec<(usize, Bits)> = error.terms().collect();
        let mut s = self.frame_syndrome_terms(&terms);
        s.truncate(self.measured);
        s
    }

    /// Correction (source symplectic vector) for a full frame syndrome.
    fn correct(&self, frame_syn: &[bool]) -> Result<BitVec> {
        let target: std::borrow::Cow<[bool]> = match &self.push {
            None => frame_syn.into(),
            Some(push) => {
                let mut t = vec![false; self.roles.len()];
                for (k, &v) in frame_syn.iter().enumerate() {
                    if v {
                        for &tk in &push[k] {
                            t[tk as usize] ^= true;
                        }
                    }
                }
                t.into()
            }
        };
        let mut terms = Vec::new();
        matching_terms(&self.geom, &self.roles, &target, &mut terms)?;
        Ok(self.pull_terms(&terms))
    }

    /// Charges of a residual in the decoding frame's centralizer, along the
    /// two periods.
    fn residual_class(&self, r: &BitVec) -> [Charge; 2] {
        let n = self.lat.n();
        let copies = self.geom.copies;
        let mut out = [Charge::vacuum(copies); 2];
        for (dir, c) in out.iter_mut().enumerate() {
            for copy in 0..copies {
                // a loop along `dir` is detected by crossing loops along the other period
                if symp(r, &self.loops[1 - dir][2 * copy], n) {
                    c.bits ^= 1 << (2 * copy + 1);
                }
                if symp(r, &self.loops[1 - dir][2 * copy + 1], n) {
                    c.bits ^= 1 << (2 * copy);
                }
            }
        }
        out
    }

    /// Decode one error end to end. Returns (applied correction, residual
    /// class, success).
    fn run(&self, terms: &[(usize, Bits)]) -> Result<(BitVec, [Charge; 2], bool)> {
        let n = self.lat.n();
        let syn = self.frame_syndrome_terms(terms);
        let (proper, solid) = syn.split_at(self.measured);
        // with every stabilizer satisfied the error lies in the gauge group
        // times logicals; the likely case is a pure gauge operator
        let applied = match &self.gauge_fix {
            Some(gf) if !proper.contains(&true) && solid.contains(&true) => to_sym(&gf.fix(&self.code, solid)?),
            _ => self.correct(&syn)?,
        };
        let mut r = applied.clone();
        xor_terms(&mut r, n, terms);
        if self.frame_syndrome(&r).iter().any(|&b| b) {
            return Err(Error::Consistency("correction does not clear the syndrome".into()));
        }
        let class = self.residual_class(&r);
        let ok = class.iter().all(|c| self.allowed.contains(c));
        Ok((applied, class, ok))
    }

    pub fn decode(&self, error: &Pauli) -> Result<DecodeOutcome> {
        let terms: Vec<(usize, Bits)> = error.terms().collect();
        let (c, class, ok) = self.run(&terms)?;
        Ok(DecodeOutcome {
            correction: from_sym(self.lat, &c),
            verdict: if ok { Verdict::Success } else { Verdict::LogicalFailure },
            residual_class: Some(class),
        })
    }

    /// True when decoding the sparse error fails.
    pub fn fails(&self, terms: &[(usize, Bits)]) -> Result<bool> {
        Ok(!self.run(terms)?.2)
    }

    /// Loop-class verdict for an arbitrary residual in the frame centralizer
    /// (used to cross-check against the membership oracle).
    pub fn classify(&self, residual: &Pauli) -> Result<[Charge; 2]> {
        let r = to_sym(residual);
        if self.frame_syndrome(&r).iter().any(|&b| b) {
            return Err(Error::Precondition("residual is outside the frame centralizer".into()));
        }
        Ok(self.residual_class(&r))
    }

    pub fn allowed_classes(&self) -> &[Charge] {
        &self.allowed
    }
}
