//! Geometry of (possibly chessboard-blocked) toric-code stacks.
//!
//! Everything is expressed in fine coordinates (i, j) of the original
//! square lattice. On a plain stack the periodicity lattice is L·Z²; after
//! chessboard blocking it is spanned by L·(1,1) and L·(−1,1). Extra sites
//! beyond the stack carry single-qubit ancilla stabilizers.

use std::sync::OnceLock;

use crate::codes::{by_name, chess_site, CodeDef};
use crate::error::{Error, Result};
use crate::pauli::{Bits, Lattice, Pauli, Template, X, Z};

/// Star defects carry m charge, plaquette defects e charge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Species {
    Star,
    Plaquette,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenRole {
    /// Vertex star or plaquette of `copy` at fine position `pos`.
    Toric { copy: usize, species: Species, pos: (i64, i64) },
    /// Single-qubit ancilla stabilizer on `qubit`, cleared by `flip`.
    Ancilla { qubit: usize, flip: Bits },
}

#[derive(Clone, Debug)]
pub struct ToricGeometry {
    pub l: usize,
    pub copies: usize,
    pub blocked: bool,
    pub sites: usize,
    /// Letter of each ancilla template (indexed from the first ancilla).
    pub ancilla_letters: Vec<Bits>,
    /// Distances indexed by displacement residue mod 2L (a sublattice of
    /// the periods), filled on first use.
    dist: OnceLock<Vec<i64>>,
}

impl ToricGeometry {
    /// Geometry of a code spec `ktc`, `ktc-stack:n`, optionally `@chess`,
    /// padded to `sites` per cell with the given ancilla templates.
    pub fn from_spec(spec: &str, l: usize, sites: usize, ancillas: &[Template]) -> Result<ToricGeometry> {
        let (base, blocked) = match spec.strip_suffix("@chess") {
            Some(b) => (b, true),
            None => (spec, false),
        };
        let copies = match base {
            "ktc" => 1,
            _ => base
                .strip_prefix("ktc-stack:")
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or_else(|| Error::Precondition(format!("`{spec}` is not a toric-code stack")))?,
        };
        let stack = 2 * copies * if blocked { 2 } else { 1 };
        if sites < stack || sites - stack != ancillas.len() {
            return Err(Error::Precondition(format!("{sites} sites do not fit {spec} plus {} ancillas", ancillas.len())));
        }
        let mut letters = Vec::new();
        for (k, t) in ancillas.iter().enumerate() {
            match t.terms() {
                [(s, b)] if s.s as usize == stack + k && s.dx == 0 && s.dy == 0 => letters.push(*b),
                _ => return Err(Error::Precondition(format!("ancilla {k} is not a single-qubit template on its own site"))),
            }
        }
        Ok(ToricGeometry { l, copies, blocked, sites, ancilla_letters: letters, dist: OnceLock::new() })
    }

    pub fn plain(copies: usize, l: usize) -> ToricGeometry {
        ToricGeometry { l, copies, blocked: false, sites: 2 * copies, ancilla_letters: Vec::new(), dist: OnceLock::new() }
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.l, self.sites)
    }

    /// The matching code definition (stack, blocked, padded).
    pub fn code(&self) -> Result<CodeDef> {
        let name = if self.copies == 1 { "ktc".to_string() } else { format!("ktc-stack:{}", self.copies) };
        let mut c = by_name(&name, self.l)?;
        if self.blocked {
            c = c.block_chessboard();
        }
        let anc: Vec<Template> = self
            .ancilla_letters
            .iter()
            .enumerate()
            .map(|(k, &b)| Template::single(crate::pauli::Site::new(0, 0, self.stack_sites() + k), b))
            .collect();
        Ok(crate::mapper::pad(&c, self.sites, &anc))
    }

    fn stack_sites(&self) -> usize {
        2 * self.copies * if self.blocked { 2 } else { 1 }
    }

    /// Generators of the periodicity lattice in fine coordinates.
    pub fn periods(&self) -> [(i64, i64); 2] {
        let l = self.l as i64;
        if self.blocked {
            [(l, l), (-l, l)]
        } else {
            [(l, 0), (0, l)]
        }
    }

    /// Qubit of edge `kind` (0 = east, 1 = north) leaving vertex (i, j).
    pub fn qubit(&self, i: i64, j: i64, kind: usize, copy: usize) -> usize {
        let lat = self.lattice();
        let s = 2 * copy + kind;
        if self.blocked {
            let site = chess_site(i as i32, j as i32, s, 2 * self.copies);
            lat.index(site.dx as i64, site.dy as i64, site.s as usize)
        } else {
            lat.index(i, j, s)
        }
    }

    /// Fine position of the anchor of cell (x, y) (block 0).
    pub fn cell_to_fine(&self, x: i64, y: i64) -> (i64, i64) {
        if self.blocked {
            (x - y, x + y)
        } else {
            (x, y)
        }
    }

    /// Role of generator instance `t` (template index) at cell (x, y), for
    /// the template order of the stack code (star, plaquette per copy;
    /// blocked codes interleave the two blocks).
    pub fn role(&self, t: usize, x: i64, y: i64) -> GenRole {
        let nt = if self.blocked { 4 * self.copies } else { 2 * self.copies };
        if t >= nt {
            let k = t - nt;
            let q = self.lattice().index(x, y, self.stack_sites() + k);
            let flip = if self.ancilla_letters[k] == Z { X } else { Z };
            return GenRole::Ancilla { qubit: q, flip };
        }
        let (base, b) = if self.blocked { (t / 2, (t % 2) as i64) } else { (t, 0) };
        let (i, j) = self.cell_to_fine(x, y);
        let species = if base % 2 == 0 { Species::Star } else { Species::Plaquette };
        GenRole::Toric { copy: base / 2, species, pos: self.reduce((i + b, j)) }
    }

    /// Canonical representative of a fine position modulo the periods.
    pub fn reduce(&self, p: (i64, i64)) -> (i64, i64) {
        let l = self.l as i64;
        if self.blocked {
            // coordinates in the period basis: a = (i + j)/2L, b = (j − i)/2L
            let a = (p.0 + p.1).div_euclid(2 * l);
            let b = (p.1 - p.0).div_euclid(2 * l);
            (p.0 - a * l + b * l, p.1 - a * l - b * l)
        } else {
            (p.0.rem_euclid(l), p.1.rem_euclid(l))
        }
    }

    /// Shortest displacement from p to q (L1 norm, ties broken by the first
    /// candidate in a fixed scan order).
    pub fn displacement(&self, p: (i64, i64), q: (i64, i64)) -> (i64, i64) {
        let d0 = (q.0 - p.0, q.1 - p.1);
        let [u, v] = self.periods();
        let l = self.l as f64;
        let (a0, b0) = if self.blocked {
            ((d0.0 + d0.1) as f64 / (2.0 * l), (d0.1 - d0.0) as f64 / (2.0 * l))
        } else {
            (d0.0 as f64 / l, d0.1 as f64 / l)
        };
        let (a0, b0) = (a0.round() as i64, b0.round() as i64);
        let mut best = None;
        for da in -1..=1 {
            for db in -1..=1 {
                let (a, b) = (a0 + da, b0 + db);
                let d = (d0.0 - a * u.0 - b * v.0, d0.1 - a * u.1 - b * v.1);
                let n = d.0.abs() + d.1.abs();
                if best.is_none_or(|(bn, _)| n < bn) {
                    best = Some((n, d));
                }
            }
        }
        best.unwrap().1
    }

    pub fn distance(&self, p: (i64, i64), q: (i64, i64)) -> i64 {
        let m = 2 * self.l as i64;
        let table = self.dist.get_or_init(|| {
            (0..m * m)
                .map(|k| {
                    let d = self.displacement((0, 0), (k / m, k % m));
                    d.0.abs() + d.1.abs()
                })
                .collect()
        });
        table[((q.0 - p.0).rem_euclid(m) * m + (q.1 - p.1).rem_euclid(m)) as usize]
    }

    /// String of `species` defects on `copy` from fine position p along
    /// displacement d: horizontal leg first, then vertical. Star defects
    /// (m) are joined by X on lattice edges, plaquette defects (e) by Z on
    /// dual edges.
    pub fn string(&self, copy: usize, species: Species, p: (i64, i64), d: (i64, i64)) -> Pauli {
        let letter = if species == Species::Star { X } else { Z };
        let qs = self.string_qubits(copy, species, p, d);
        Pauli::from_terms(self.lattice(), qs.into_iter().map(|q| (q, letter)).collect(), 0)
    }

    /// Qubits of [`Self::string`], in path order.
    pub fn string_qubits(&self, copy: usize, species: Species, p: (i64, i64), d: (i64, i64)) -> Vec<usize> {
        let mut qs = Vec::with_capacity((d.0.abs() + d.1.abs()) as usize);
        let (mut i, mut j) = p;
        let sx = d.0.signum();
        for _ in 0..d.0.abs() {
            qs.push(match (species, sx > 0) {
                (Species::Star, true) => self.qubit(i, j, 0, copy),
                (Species::Star, false) => self.qubit(i - 1, j, 0, copy),
                (Species::Plaquette, true) => self.qubit(i + 1, j, 1, copy),
                (Species::Plaquette, false) => self.qubit(i, j, 1, copy),
            });
            i += sx;
        }
        let sy = d.1.signum();
        for _ in 0..d.1.abs() {
            qs.push(match (species, sy > 0) {
                (Species::Star, true) => self.qubit(i, j, 1, copy),
                (Species::Star, false) => self.qubit(i, j - 1, 1, copy),
                (Species::Plaquette, true) => self.qubit(i, j + 1, 0, copy),
                (Species::Plaquette, false) => self.qubit(i, j, 0, copy),
            });
            j += sy;
        }
        qs
    }
}
