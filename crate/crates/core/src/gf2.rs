//! GF(2) linear algebra on packed bit rows, and the binary symplectic view of
//! Pauli operators (`[x-bits | z-bits]`, X block first).

use crate::pauli::{Lattice, Pauli, X, Z};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    w: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, w: vec![0; len.div_ceil(64)] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.w[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.w[i >> 6] |= 1 << (i & 63);
        } else {
            self.w[i >> 6] &= !(1 << (i & 63));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.w[i >> 6] ^= 1 << (i & 63);
    }

    #[inline]
    pub fn xor_with(&mut self, o: &BitVec) {
        for (a, b) in self.w.iter_mut().zip(&o.w) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.w.iter().all(|&x| x == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.w.iter().map(|x| x.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.first_one_from(0)
    }

    pub fn first_one_from(&self, start: usize) -> Option<usize> {
        if start >= self.len {
            return None;
        }
        let mut k = start >> 6;
        let mut word = self.w[k] & (!0u64 << (start & 63));
        loop {
            if word != 0 {
                return Some((k << 6) + word.trailing_zeros() as usize);
            }
            k += 1;
            if k >= self.w.len() {
                return None;
            }
            word = self.w[k];
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.w.iter().enumerate().flat_map(|(k, &word)| {
            let mut v = word;
            std::iter::from_fn(move || {
                if v == 0 {
                    None
                } else {
                    let t = v.trailing_zeros() as usize;
                    v &= v - 1;
                    Some((k << 6) + t)
                }
            })
        })
    }

    /// Parity of the bitwise AND.
    pub fn dot(&self, o: &BitVec) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.w.iter().zip(&o.w) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.w
    }
}

/// Symplectic form on `[x | z]` vectors of `n` qubits: 1 iff anticommuting.
pub fn symp(a: &BitVec, b: &BitVec, n: usize) -> bool {
    debug_assert_eq!(a.len, 2 * n);
    if n % 64 == 0 {
        let h = n / 64;
        let mut acc = 0u64;
        for k in 0..h {
            acc ^= (a.w[k] & b.w[h + k]) ^ (a.w[h + k] & b.w[k]);
        }
        return acc.count_ones() & 1 == 1;
    }
    let mut odd = false;
    for i in a.ones() {
        let j = if i < n { i + n } else { i - n };
        odd ^= b.get(j);
    }
    odd
}

pub fn to_sym(p: &Pauli) -> BitVec {
    let n = p.lattice().n();
    let mut v = BitVec::zeros(2 * n);
    for (q, b) in p.terms() {
        if b & X != 0 {
            v.set(q, true);
        }
        if b & Z != 0 {
            v.set(n + q, true);
        }
    }
    v
}

/// Hermitian, phase-(+1) Pauli with the given symplectic vector.
pub fn from_sym(lat: Lattice, v: &BitVec) -> Pauli {
    let n = lat.n();
    let mut t: Vec<(usize, u8)> = Vec::new();
    for i in v.ones() {
        if i < n {
            t.push((i, X));
        } else {
            t.push((i - n, Z));
        }
    }
    // merge into letters without phase bookkeeping: Y = X|Z bits
    t.sort_by_key(|e| e.0);
    let mut merged: Vec<(usize, u8)> = Vec::with_capacity(t.len());
    for (q, b) in t {
        match merged.last_mut() {
            Some(l) if l.0 == q => l.1 |= b,
            _ => merged.push((q, b)),
        }
    }
    Pauli::from_terms(lat, merged, 0)
}

/// Incrementally built row-echelon basis. Pivots are the lowest set column,
/// so elimination order is fixed by column order alone.
#[derive(Clone, Debug)]
pub struct Basis {
    len: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    combos: Option<Vec<BitVec>>,
    inputs: usize,
    max_inputs: usize,
}

impl Basis {
    pub fn new(len: usize) -> Self {
        Basis { len, rows: Vec::new(), pivots: Vec::new(), combos: None, inputs: 0, max_inputs: 0 }
    }

    /// Basis that records which inserted vectors compose each row.
    pub fn tracking(len: usize, max_inputs: usize) -> Self {
        Basis { len, rows: Vec::new(), pivots: Vec::new(), combos: Some(Vec::new()), inputs: 0, max_inputs }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce `v` in place; returns the combination of basis rows used (as
    /// row indices) when `want` is set.
    pub fn reduce(&self, v: &mut BitVec, want: bool) -> Vec<usize> {
        let mut used = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            if v.get(self.pivots[i]) {
                v.xor_with(r);
                if want {
                    used.push(i);
                }
            }
        }
        used
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w, false);
        w.is_zero()
    }

    /// Insert a vector; returns true if it increased the rank. With tracking,
    /// a dependent vector yields its relation via `insert_tracked`.
    pub fn insert(&mut self, v: BitVec) -> bool {
        self.insert_tracked(v).is_none()
    }

    /// Insert with tracking. Returns `Some(relation)` (a set of input indices
    /// summing to zero) when the vector was dependent, `None` otherwise.
    pub fn insert_tracked(&mut self, mut v: BitVec) -> Option<BitVec> {
        assert_eq!(v.len, self.len);
        let id = self.inputs;
        self.inputs += 1;
        let used = self.reduce(&mut v, self.combos.is_some());
        let combo = self.combos.as_ref().map(|cs| {
            let mut c = BitVec::zeros(self.max_inputs);
            c.set(id, true);
            for i in used {
                c.xor_with(&cs[i]);
            }
            c
        });
        match v.first_one() {
            Some(p) => {
                self.rows.push(v);
                self.pivots.push(p);
                if let (Some(cs), Some(c)) = (self.combos.as_mut(), combo) {
                    cs.push(c);
                }
                None
            }
            None => combo,
        }
    }

    /// Express `v` over the inserted inputs: `Some(indices)` or None if `v`
    /// is outside the span. Requires tracking.
    pub fn decompose(&self, v: &BitVec) -> Option<Vec<usize>> {
        let cs = self.combos.as_ref().expect("basis built without tracking");
        let mut w = v.clone();
        let used = self.reduce(&mut w, true);
        if !w.is_zero() {
            return None;
        }
        let mut c = BitVec::zeros(self.max_inputs);
        for i in used {
            c.xor_with(&cs[i]);
        }
        Some(c.ones().collect())
    }
}

pub fn rank(rows: &[BitVec]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut b = Basis::new(first.len);
    for r in rows {
        b.insert(r.clone());
    }
    b.rank()
}

/// Decide membership of `v` in the span of `gens`; on success return the
/// indices of a subset of `gens` summing to `v`.
pub fn in_span(v: &BitVec, gens: &[BitVec]) -> Option<Vec<usize>> {
    let mut b = Basis::tracking(v.len, gens.len());
    for g in gens {
        b.insert_tracked(g.clone());
    }
    b.decompose(v)
}

/// Basis of `{c : Σ c_i rows_i = 0}` (each as a bit vector over row indices).
pub fn left_nullspace(rows: &[BitVec]) -> Vec<BitVec> {
    let Some(first) = rows.first() else { return Vec::new() };
    let mut b = Basis::tracking(first.len, rows.len());
    rows.iter().filter_map(|r| b.insert_tracked(r.clone())).collect()
}

/// Basis of `{x : rows_i · x = 0 ∀i}` over `ncols` columns.
pub fn nullspace(rows: &[BitVec], ncols: usize) -> Vec<BitVec> {
    // reduced row echelon form
    let mut m: Vec<BitVec> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..m.len()).find(|&k| m[k].get(c)) else { continue };
        m.swap(r, k);
        let pivot = m[r].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k != r && row.get(c) {
                row.xor_with(&pivot);
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for f in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut x = BitVec::zeros(ncols);
        x.set(f, true);
        for (i, &c) in pivots.iter().enumerate() {
            if m[i].get(f) {
                x.set(c, true);
            }
        }
        out.push(x);
    }
    out
}

/// Result of symplectic Gram–Schmidt on a set of `[x|z]` vectors.
#[derive(Clone, Debug)]
pub struct SymplecticSplit {
    pub pairs: Vec<(BitVec, BitVec)>,
    /// Basis of the isotropic part (the center of the span).
    pub center: Vec<BitVec>,
}

pub fn symplectic_gram_schmidt(vecs: &[BitVec], n: usize) -> SymplecticSplit {
    let mut pool: Vec<BitVec> = vecs.iter().filter(|v| !v.is_zero()).cloned().collect();
    let mut pairs = Vec::new();
    let mut iso = Vec::new();
    while let Some(v) = pool.pop() {
        let Some(j) = pool.iter().position(|u| symp(&v, u, n)) else {
            iso.push(v);
            continue;
        };
        let w = pool.swap_remove(j);
        for u in pool.iter_mut() {
            let a = symp(u, &w, n);
            let b = symp(u, &v, n);
            if a {
                u.xor_with(&v);
            }
            if b {
                u.xor_with(&w);
            }
        }
        // earlier isotropic vectors already commute with everything left
        pairs.push((v, w));
        pool.retain(|u| !u.is_zero());
    }
    let mut b = Basis::new(2 * n);
    let center = iso.into_iter().filter(|v| b.insert(v.clone())).collect();
    SymplecticSplit { pairs, center }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(bits: &[usize], len: usize) -> BitVec {
        let mut v = BitVec::zeros(len);
        for &b in bits {
            v.set(b, true);
        }
        v
    }

    #[test]
    fn small_rank_and_nullspace() {
        let rows = vec![bv(&[0], 3), bv(&[1], 3), bv(&[0, 1], 3)];
        assert_eq!(rank(&rows), 2);
        assert_eq!(left_nullspace(&rows).len(), 1);
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        assert!(ns[0].get(2) && !ns[0].get(0));
    }

    #[test]
    fn ones_iterates_across_words() {
        let v = bv(&[0, 63, 64, 130], 200);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 63, 64, 130]);
        assert_eq!(v.first_one_from(1), Some(63));
        assert_eq!(v.first_one_from(131), None);
    }
}
