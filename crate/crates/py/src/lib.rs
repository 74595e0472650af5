//! Python bindings: codes, Clifford maps, charge tables, decoding and
//! threshold points. Pauli operators cross the boundary in the text format
//! (`+1; x,y,s:P ...`).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use topomap::anyons::{charge_table, identify_fermions, AnyonFrame};
use topomap::codes::{build_intermediate_sz, by_name, instances, local_centralizer_check, CodeDef, CodeKind};
use topomap::decoder::{sample_error, ChannelKind, Decoder as CoreDecoder, NoiseChannel, Verdict};
use topomap::mapper::{builtin_map, find_registered, padded_pair, verify_code_map, verify_symplectic, LocalCliffordMap};
use topomap::matching;
use topomap::pauli::Pauli;
use topomap::threshold::run_point;

fn err(e: topomap::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn texts(ps: &[Pauli]) -> Vec<String> {
    ps.iter().map(Pauli::to_text).collect()
}

/// A code on an L × L torus.
#[pyclass]
struct Code {
    inner: CodeDef,
}

#[pymethods]
impl Code {
    #[new]
    fn new(name: &str, l: usize) -> PyResult<Self> {
        Ok(Code { inner: by_name(name, l).map_err(err)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    #[pyo3(name = "L")]
    fn l(&self) -> usize {
        self.inner.l()
    }

    #[getter]
    fn is_subsystem(&self) -> bool {
        self.inner.kind == CodeKind::Subsystem
    }

    fn logical_count(&self) -> usize {
        self.inner.logical_count()
    }

    fn stabilizers(&self) -> Vec<String> {
        texts(&self.inner.stabilizer_instances())
    }

    fn gauge(&self) -> Vec<String> {
        texts(&instances(&self.inner.gauge, self.inner.lattice))
    }

    /// Violated stabilizer instances of a Pauli given in text form.
    fn syndrome(&self, pauli: &str) -> PyResult<Vec<bool>> {
        let p = Pauli::parse(self.inner.lattice, pauli).map_err(err)?;
        Ok(self.inner.stabilizer_instances().iter().map(|g| !g.commutes(&p)).collect())
    }

    fn local_centralizer_check(&self, window: usize) -> PyResult<bool> {
        Ok(local_centralizer_check(&self.inner, window).map_err(err)?.pass)
    }
}

/// Translation-invariant local Clifford map between two codes.
#[pyclass]
struct CliffordMap {
    inner: LocalCliffordMap,
}

#[pymethods]
impl CliffordMap {
    #[staticmethod]
    #[pyo3(signature = (source, target, radius=1))]
    fn find(source: &str, target: &str, radius: usize) -> PyResult<Self> {
        Ok(CliffordMap { inner: find_registered(source, target, radius).map_err(err)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(CliffordMap { inner: LocalCliffordMap::parse(text).map_err(err)? })
    }

    /// The map shipped with the package for `source`.
    #[staticmethod]
    fn builtin(source: &str) -> PyResult<Self> {
        builtin_map(source).map(|inner| CliffordMap { inner }).ok_or_else(|| PyValueError::new_err(format!("no shipped map for {source}")))
    }

    #[getter]
    fn source(&self) -> String {
        self.inner.source.clone()
    }

    #[getter]
    fn target(&self) -> String {
        self.inner.target.clone()
    }

    #[getter]
    fn v(&self) -> usize {
        self.inner.v()
    }

    #[getter]
    fn ancillas(&self) -> (usize, usize) {
        (self.inner.ancilla_in.len(), self.inner.ancilla_out.len())
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// Symplecticity plus the stabilizer-group check on an L × L torus.
    fn verify(&self, l: usize) -> PyResult<bool> {
        let (s, t) = padded_pair(&self.inner, l).map_err(err)?;
        let r = verify_code_map(&self.inner, &s, &t, l);
        Ok(verify_symplectic(&self.inner).symplectic_ok && r.symplectic_ok && r.group_map_ok)
    }

    fn apply(&self, pauli: &str, l: usize) -> PyResult<String> {
        let lat = topomap::pauli::Lattice::new(l, self.inner.sites);
        let p = Pauli::parse(lat, pauli).map_err(err)?;
        Ok(self.inner.apply(&p).map_err(err)?.to_text())
    }
}

/// Charge table of a code as `(charges, spins, statistics)`; for the
/// subsystem color code the proper fermions are labelled in `labels`.
#[pyfunction]
#[pyo3(signature = (code, l=4))]
fn charges(py: Python<'_>, code: &str, l: usize) -> PyResult<Py<PyAny>> {
    let c = by_name(code, l).map_err(err)?;
    let shipped = |s: &str| builtin_map(s).ok_or_else(|| PyValueError::new_err(format!("no shipped map for {s}")));
    let table = match c.kind {
        CodeKind::Subsystem => {
            let sz = build_intermediate_sz(&c).map_err(err)?;
            charge_table(&AnyonFrame::mapped(&sz, &shipped(code)?).map_err(err)?, Some(&c))
        }
        _ if code == "ktc" || code.starts_with("ktc-stack:") => charge_table(&AnyonFrame::direct(&c).map_err(err)?, None),
        _ => charge_table(&AnyonFrame::mapped(&c, &shipped(code)?).map_err(err)?, None),
    }
    .map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("charges", table.charges.iter().map(|c| c.name()).collect::<Vec<_>>())?;
    d.set_item("spins", table.spins.clone())?;
    d.set_item("statistics", table.statistics.clone())?;
    if let Some(p) = &table.proper {
        d.set_item("proper", p.iter().map(|c| c.name()).collect::<Vec<_>>())?;
    }
    if let Some(ids) = identify_fermions(&table) {
        d.set_item("labels", ids.iter().map(|(c, l)| (l.to_string(), c.name())).collect::<Vec<_>>())?;
    }
    Ok(d.into_any().unbind())
}

#[pyclass]
struct Decoder {
    inner: CoreDecoder,
}

#[pymethods]
impl Decoder {
    #[new]
    fn new(code: &str, l: usize) -> PyResult<Self> {
        Ok(Decoder { inner: CoreDecoder::new(code, l).map_err(err)? })
    }

    /// `(correction, success)` for an error in text form.
    fn decode(&self, error: &str) -> PyResult<(String, bool)> {
        let e = Pauli::parse(self.inner.code.lattice, error).map_err(err)?;
        let out = self.inner.decode(&e).map_err(err)?;
        Ok((out.correction.to_text(), out.verdict == Verdict::Success))
    }

    /// The error drawn for trial `trial` of `seed`, in text form.
    fn sample(&self, channel: &str, p: f64, seed: u64, trial: u64) -> PyResult<String> {
        let ch = NoiseChannel::new(ChannelKind::parse(channel).map_err(err)?, p).map_err(err)?;
        Ok(sample_error(&ch, &self.inner.code, seed, trial).to_text())
    }
}

/// One Monte Carlo point: `(failures, trials)`.
#[pyfunction]
fn threshold_point(code: &str, channel: &str, p: f64, l: usize, trials: u64, seed: u64) -> PyResult<(u64, u64)> {
    let ch = NoiseChannel::new(ChannelKind::parse(channel).map_err(err)?, p).map_err(err)?;
    let pt = run_point(code, &ch, l, trials, seed).map_err(err)?;
    Ok((pt.failures, pt.trials))
}

/// Minimum-weight perfect matching on a dense symmetric integer matrix.
#[pyfunction]
fn min_weight_perfect_matching(weights: Vec<Vec<i64>>) -> PyResult<Vec<(usize, usize)>> {
    let n = weights.len();
    if n % 2 == 1 || weights.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("need a square matrix of even size"));
    }
    Ok(matching::min_weight_perfect_matching(n, |i, j| weights[i][j]))
}

#[pymodule]
fn topomap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Code>()?;
    m.add_class::<CliffordMap>()?;
    m.add_class::<Decoder>()?;
    m.add_function(wrap_pyfunction!(charges, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_point, m)?)?;
    m.add_function(wrap_pyfunction!(min_weight_perfect_matching, m)?)?;
    Ok(())
}
