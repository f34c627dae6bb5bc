//! Python bindings. Structured results (reports, reduction results,
//! f-structures) cross the boundary as plain dicts and lists.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

use rlfg_core::fterm::parse_fterm_untyped;
use rlfg_core::lfg::parse_fdescription_file;
use rlfg_core::reduce::trace_witness;
use rlfg_core::{canonicalize, equal, serialize_fterm, SearchConfig};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_python(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let json = PyModule::import(py, "json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

fn search_config(max_states: usize, max_depth: usize) -> PyResult<SearchConfig> {
    if max_states == 0 || max_depth == 0 {
        return Err(PyValueError::new_err("search limits must be positive"));
    }
    Ok(SearchConfig {
        max_states,
        max_depth,
    })
}

/// A canonical f-term.
#[pyclass(name = "FTerm", frozen)]
struct PyFTerm {
    inner: rlfg_core::FTerm,
}

#[pymethods]
impl PyFTerm {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let t = parse_fterm_untyped(text).map_err(value_error)?;
        Ok(PyFTerm {
            inner: canonicalize(&t),
        })
    }

    fn __str__(&self) -> String {
        serialize_fterm(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("FTerm({:?})", serialize_fterm(&self.inner))
    }

    fn __eq__(&self, other: &Self) -> bool {
        equal(&self.inner, &other.inner)
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        serialize_fterm(&self.inner).hash(&mut h);
        h.finish()
    }

    /// Number of constructors in the term.
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn is_goal(&self) -> bool {
        self.inner.is_goal()
    }
}

/// Parses and canonicalizes an f-term without type checking.
#[pyfunction]
fn parse_fterm(text: &str) -> PyResult<PyFTerm> {
    PyFTerm::new(text)
}

/// Full search result as a dict: verdict, statesExplored, witness, ...
#[pyfunction]
#[pyo3(signature = (term, max_states = 100_000, max_depth = 200))]
fn reduce(
    py: Python<'_>,
    term: &PyFTerm,
    max_states: usize,
    max_depth: usize,
) -> PyResult<Py<PyAny>> {
    let result = rlfg_core::reduce_search(&term.inner, &search_config(max_states, max_depth)?);
    to_python(py, &serde_json::to_value(&result).map_err(value_error)?)
}

/// True or False; raises RuntimeError when the limits are hit first.
#[pyfunction]
#[pyo3(signature = (term, max_states = 100_000, max_depth = 200))]
fn is_grammatical(term: &PyFTerm, max_states: usize, max_depth: usize) -> PyResult<bool> {
    rlfg_core::is_grammatical(&term.inner, &search_config(max_states, max_depth)?)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// The numbered derivation of `term` down to `t`.
#[pyfunction]
#[pyo3(signature = (term, max_states = 100_000, max_depth = 200))]
fn trace(term: &PyFTerm, max_states: usize, max_depth: usize) -> PyResult<String> {
    let result = rlfg_core::reduce_search(&term.inner, &search_config(max_states, max_depth)?);
    trace_witness(&result).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pyclass(name = "Grammar", frozen)]
struct PyGrammar {
    inner: rlfg_core::Grammar,
}

#[pymethods]
impl PyGrammar {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let inner = rlfg_core::load_grammar(text).map_err(value_error)?;
        Ok(PyGrammar { inner })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| value_error(format!("{path}: {e}")))?;
        Self::new(&text)
    }

    #[getter]
    fn mode(&self) -> String {
        self.inner.mode.to_string()
    }

    #[getter]
    fn start(&self) -> &str {
        &self.inner.start
    }

    #[getter]
    fn rule_count(&self) -> usize {
        self.inner.rules.len()
    }

    #[getter]
    fn entry_count(&self) -> usize {
        self.inner.entry_count()
    }

    /// Bracketed c-structures for a whitespace-separated sentence.
    fn parse(&self, sentence: &str) -> PyResult<Vec<String>> {
        let tokens: Vec<&str> = sentence.split_whitespace().collect();
        let trees = self.inner.parse(&tokens).map_err(value_error)?;
        Ok(trees.iter().map(ToString::to_string).collect())
    }

    /// The resource-mode f-terms of every parse.
    fn fterms(&self, sentence: &str) -> PyResult<Vec<PyFTerm>> {
        let tokens: Vec<&str> = sentence.split_whitespace().collect();
        let trees = self.inner.parse(&tokens).map_err(value_error)?;
        trees
            .iter()
            .map(|t| {
                let inner = rlfg_core::instantiate_rlfg(t).map_err(value_error)?;
                Ok(PyFTerm { inner })
            })
            .collect()
    }

    /// The check report as a dict.
    #[pyo3(signature = (sentence, max_states = 100_000, max_depth = 200))]
    fn check(
        &self,
        py: Python<'_>,
        sentence: &str,
        max_states: usize,
        max_depth: usize,
    ) -> PyResult<Py<PyAny>> {
        let tokens: Vec<&str> = sentence.split_whitespace().collect();
        let report =
            rlfg_core::check_sentence(&self.inner, &tokens, &search_config(max_states, max_depth)?)
                .map_err(value_error)?;
        to_python(py, &report.to_json())
    }

    fn __repr__(&self) -> String {
        format!(
            "Grammar(mode={}, start={}, rules={}, entries={})",
            self.inner.mode,
            self.inner.start,
            self.inner.rules.len(),
            self.inner.entry_count()
        )
    }
}

/// Minimal f-structures of an f-description, as nested dicts.
#[pyfunction]
fn solve(py: Python<'_>, fdescription: &str) -> PyResult<Py<PyAny>> {
    let d = parse_fdescription_file(fdescription).map_err(value_error)?;
    let out: Vec<serde_json::Value> = rlfg_core::solve(&d).iter().map(|s| s.to_json()).collect();
    to_python(py, &serde_json::Value::Array(out))
}

/// Candidates with functionality relaxed across annotation sites.
#[pyfunction]
fn solve_relaxed(py: Python<'_>, fdescription: &str) -> PyResult<Py<PyAny>> {
    let d = parse_fdescription_file(fdescription).map_err(value_error)?;
    let out: Vec<serde_json::Value> = rlfg_core::solve_relaxed(&d)
        .iter()
        .map(|c| {
            serde_json::json!({
                "structure": c.structure.to_json(),
                "satisfied": c.satisfied,
                "split": c.split,
            })
        })
        .collect();
    to_python(py, &serde_json::Value::Array(out))
}

#[pymodule]
fn rlfg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFTerm>()?;
    m.add_class::<PyGrammar>()?;
    m.add_function(wrap_pyfunction!(parse_fterm, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(is_grammatical, m)?)?;
    m.add_function(wrap_pyfunction!(trace, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(solve_relaxed, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fterm_equality_is_canonical() {
        let a = PyFTerm::new("SUBJ e -o t, SUBJ(NOM -o e, NOM)").unwrap();
        let b = PyFTerm::new("SUBJ(NOM, NOM -o e), SUBJ e -o t").unwrap();
        assert!(a.__eq__(&b));
        assert_eq!(a.__hash__(), b.__hash__());
        assert_eq!(a.__str__(), "SUBJ(NOM, NOM -o e), SUBJ e -o t");
    }

    #[test]
    fn trace_without_python() {
        let t = PyFTerm::new("SUBJ(NOM, NOM -o e), SUBJ e -o t").unwrap();
        assert!(is_grammatical(&t, 100, 10).unwrap());
        assert!(trace(&t, 100, 10).unwrap().ends_with("t\n"));
        assert!(search_config(0, 1).is_err());
    }
}
