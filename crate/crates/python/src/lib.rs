//! Python bindings: gold parsing and expansion, facet derivation, fact-level
//! and token-overlap scoring, and agreement.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use benchie::facets::{self, GoldKey};
use benchie::gold::{self, Severity};
use benchie::ingest::{self, ReadOptions};
use benchie::scoring::{self, reference_from_gold};
use benchie::{ExpandOptions, Extraction, Facet, GoldCorpus, Score, ScoreReport, Triple};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: benchie::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn options(cap: Option<usize>) -> PyResult<ExpandOptions> {
    match cap {
        Some(0) => Err(PyValueError::new_err("expansion cap must be positive")),
        Some(c) => Ok(ExpandOptions::with_cap(c)),
        None => Ok(ExpandOptions::default()),
    }
}

fn parse_facet(name: &str) -> PyResult<Facet> {
    name.parse().map_err(value_err)
}

#[pyclass(name = "Triple", module = "pybenchie", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTriple {
    inner: Triple,
}

#[pymethods]
impl PyTriple {
    #[new]
    fn new(subject: &str, predicate: &str, object: &str) -> PyResult<Self> {
        Ok(PyTriple {
            inner: Triple::parse(subject, predicate, object).map_err(value_err)?,
        })
    }

    #[getter]
    fn subject(&self) -> String {
        self.inner.subject.join()
    }

    #[getter]
    fn predicate(&self) -> String {
        self.inner.predicate.join()
    }

    #[getter]
    fn object(&self) -> String {
        self.inner.object.join()
    }

    /// Space-joined concatenation of the three slots.
    fn concatenated(&self) -> String {
        self.inner.concatenated().join()
    }

    fn __repr__(&self) -> String {
        format!("Triple{}", self.inner)
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        other
            .cast::<PyTriple>()
            .map(|o| o.get().inner == self.inner)
            .unwrap_or(false)
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.inner.hash(&mut h);
        h.finish()
    }
}

#[pyclass(name = "Extraction", module = "pybenchie", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyExtraction {
    inner: Extraction,
}

#[pymethods]
impl PyExtraction {
    #[new]
    #[pyo3(signature = (sentence_id, subject, predicate, object, confidence=None))]
    fn new(sentence_id: &str, subject: &str, predicate: &str, object: &str, confidence: Option<f64>) -> PyResult<Self> {
        let mut inner = Extraction::new(sentence_id, Triple::parse(subject, predicate, object).map_err(value_err)?);
        inner.confidence = confidence;
        Ok(PyExtraction { inner })
    }

    #[getter]
    fn sentence_id(&self) -> &str {
        &self.inner.sentence_id
    }

    #[getter]
    fn triple(&self) -> PyTriple {
        PyTriple {
            inner: self.inner.triple.clone(),
        }
    }

    #[getter]
    fn confidence(&self) -> Option<f64> {
        self.inner.confidence
    }

    fn __repr__(&self) -> String {
        format!("Extraction({:?}, {})", self.inner.sentence_id, self.inner.triple)
    }
}

#[pyclass(name = "Score", module = "pybenchie", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyScore {
    tp: usize,
    fp: usize,
    #[pyo3(name = "fn")]
    fn_: usize,
    precision: f64,
    recall: f64,
    f1: f64,
}

impl From<Score> for PyScore {
    fn from(s: Score) -> Self {
        PyScore {
            tp: s.tp,
            fp: s.fp,
            fn_: s.fn_,
            precision: s.precision,
            recall: s.recall,
            f1: s.f1,
        }
    }
}

#[pymethods]
impl PyScore {
    fn __repr__(&self) -> String {
        format!(
            "Score(p={:.4}, r={:.4}, f1={:.4}, tp={}, fp={}, fn={})",
            self.precision, self.recall, self.f1, self.tp, self.fp, self.fn_
        )
    }
}

#[pyclass(name = "ScoreReport", module = "pybenchie", frozen, skip_from_py_object)]
struct PyScoreReport {
    inner: ScoreReport,
}

#[pymethods]
impl PyScoreReport {
    #[getter]
    fn facet(&self) -> &'static str {
        self.inner.facet.label()
    }

    #[getter]
    fn score(&self) -> PyScore {
        self.inner.score.into()
    }

    #[getter]
    fn precision(&self) -> f64 {
        self.inner.score.precision
    }

    #[getter]
    fn recall(&self) -> f64 {
        self.inner.score.recall
    }

    #[getter]
    fn f1(&self) -> f64 {
        self.inner.score.f1
    }

    #[getter]
    fn synsets(&self) -> usize {
        self.inner.synsets
    }

    #[getter]
    fn extractions(&self) -> usize {
        self.inner.extractions
    }

    #[getter]
    fn duplicates_removed(&self) -> usize {
        self.inner.duplicates_removed
    }

    #[getter]
    fn per_sentence<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (sid, s) in &self.inner.per_sentence {
            d.set_item(sid, PyScore::from(*s))?;
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let s = &self.inner.score;
        format!(
            "ScoreReport(facet={}, p={:.4}, r={:.4}, f1={:.4})",
            self.inner.facet, s.precision, s.recall, s.f1
        )
    }
}

#[pyclass(name = "Gold", module = "pybenchie", frozen, skip_from_py_object)]
struct PyGold {
    inner: GoldCorpus,
}

#[pymethods]
impl PyGold {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyGold {
            inner: gold::parse_gold(text).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| PyOSError::new_err(format!("{}: {e}", path.display())))?;
        gold::parse_gold(&text)
            .map(|inner| PyGold { inner })
            .map_err(|e| PyValueError::new_err(format!("{}: {e}", path.display())))
    }

    /// The corpus in the gold file format.
    fn dumps(&self) -> String {
        gold::serialize_gold(&self.inner)
    }

    #[getter]
    fn sentence_ids(&self) -> Vec<String> {
        self.inner.sentence_ids().map(str::to_owned).collect()
    }

    #[getter]
    fn synset_ids(&self) -> Vec<String> {
        self.inner.synsets().iter().map(|s| s.id.clone()).collect()
    }

    fn sentence_text(&self, sentence_id: &str) -> Option<String> {
        self.inner.sentence(sentence_id).map(|s| s.tokens.join())
    }

    /// Synset id to its expanded triples, in expansion order.
    #[pyo3(signature = (cap=None))]
    fn expand(&self, cap: Option<usize>) -> PyResult<Vec<(String, Vec<PyTriple>)>> {
        let expanded = gold::expand_corpus(&self.inner, options(cap)?).map_err(value_err)?;
        Ok(expanded
            .into_iter()
            .map(|(id, set)| (id, set.into_iter().map(|inner| PyTriple { inner }).collect()))
            .collect())
    }

    /// Facet gold as `(synset_id, members)` pairs. Members are triples,
    /// except under the concatenation facet where they are utterances.
    #[pyo3(signature = (facet, cap=None))]
    fn facet<'py>(&self, py: Python<'py>, facet: &str, cap: Option<usize>) -> PyResult<Vec<(String, Vec<Bound<'py, PyAny>>)>> {
        let fg = facets::derive(&self.inner, parse_facet(facet)?, options(cap)?).map_err(value_err)?;
        fg.synsets
            .into_iter()
            .map(|s| {
                let members = s
                    .members
                    .into_iter()
                    .map(|k| match k {
                        GoldKey::Triple(inner) => Ok(Bound::new(py, PyTriple { inner })?.into_any()),
                        GoldKey::Utterance(u) => Ok(u.join().into_pyobject(py)?.into_any()),
                    })
                    .collect::<PyResult<Vec<_>>>()?;
                Ok((s.id, members))
            })
            .collect()
    }

    /// Facet gold written back in the gold file format.
    #[pyo3(signature = (facet, cap=None))]
    fn export_facet(&self, facet: &str, cap: Option<usize>) -> PyResult<String> {
        let fg = facets::derive(&self.inner, parse_facet(facet)?, options(cap)?).map_err(value_err)?;
        facets::export_facet_gold(&fg, &self.inner).map_err(value_err)
    }

    /// Issues as `(severity, sentence_id, synset_id, message)` tuples.
    #[pyo3(signature = (cap=None))]
    fn validate(&self, cap: Option<usize>) -> PyResult<Vec<(&'static str, String, Option<String>, String)>> {
        Ok(gold::validate(&self.inner, options(cap)?)
            .into_iter()
            .map(|i| {
                let sev = match i.severity {
                    Severity::Warning => "warning",
                    Severity::Error => "error",
                };
                (sev, i.sentence_id, i.synset_id, i.message)
            })
            .collect())
    }

    fn __len__(&self) -> usize {
        self.inner.synsets().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Gold({} sentences, {} synsets)",
            self.inner.sentences().len(),
            self.inner.synsets().len()
        )
    }
}

fn unwrap_extractions(extractions: &[PyRef<'_, PyExtraction>]) -> Vec<Extraction> {
    extractions.iter().map(|e| e.inner.clone()).collect()
}

/// Parses extraction TSV text.
#[pyfunction]
#[pyo3(signature = (text, nary=false, with_confidence=false))]
fn read_extractions(text: &str, nary: bool, with_confidence: bool) -> PyResult<Vec<PyExtraction>> {
    let raw = ingest::read_extractions(text, ReadOptions { with_confidence }).map_err(value_err)?;
    Ok(ingest::to_extractions(&raw, nary)
        .map_err(value_err)?
        .into_iter()
        .map(|inner| PyExtraction { inner })
        .collect())
}

/// Fact-level score of `extractions` against one facet of `gold`.
#[pyfunction]
#[pyo3(signature = (gold, extractions, facet="default", cap=None))]
fn score(gold: &PyGold, extractions: Vec<PyRef<'_, PyExtraction>>, facet: &str, cap: Option<usize>) -> PyResult<PyScoreReport> {
    let rows = unwrap_extractions(&extractions);
    facets::score_facet(&rows, &gold.inner, parse_facet(facet)?, options(cap)?)
        .map(|inner| PyScoreReport { inner })
        .map_err(value_err)
}

/// Best slot-aligned token overlap of one triple against candidates, as
/// `(precision, recall, f1)`.
#[pyfunction]
fn token_overlap(extraction: &PyTriple, gold: Vec<PyRef<'_, PyTriple>>) -> (f64, f64, f64) {
    let gold: Vec<Triple> = gold.iter().map(|t| t.inner.clone()).collect();
    let s = scoring::token_overlap(&extraction.inner, &gold);
    (s.precision, s.recall, s.f1)
}

/// Corpus token-overlap `(precision, recall, f1)` with the expanded gold as
/// reference.
#[pyfunction]
#[pyo3(signature = (gold, extractions, cap=None))]
fn token_overlap_corpus(gold: &PyGold, extractions: Vec<PyRef<'_, PyExtraction>>, cap: Option<usize>) -> PyResult<(f64, f64, f64)> {
    let reference = reference_from_gold(&gold.inner, options(cap)?).map_err(value_err)?;
    let s = scoring::token_overlap_corpus(&unwrap_extractions(&extractions), &reference);
    Ok((s.precision, s.recall, s.f1))
}

/// Agreement between two annotations of the same sentences.
#[pyfunction]
#[pyo3(signature = (a, b, cap=None))]
fn iaa(a: &PyGold, b: &PyGold, cap: Option<usize>) -> PyResult<f64> {
    scoring::iaa(&a.inner, &b.inner, options(cap)?).map_err(value_err)
}

#[pymodule]
fn pybenchie(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTriple>()?;
    m.add_class::<PyExtraction>()?;
    m.add_class::<PyScore>()?;
    m.add_class::<PyScoreReport>()?;
    m.add_class::<PyGold>()?;
    m.add_function(wrap_pyfunction!(read_extractions, m)?)?;
    m.add_function(wrap_pyfunction!(score, m)?)?;
    m.add_function(wrap_pyfunction!(token_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(token_overlap_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(iaa, m)?)?;
    m.add("FACETS", Facet::ALL.iter().map(|f| f.label()).collect::<Vec<_>>())?;
    m.add("DEFAULT_EXPANSION_CAP", benchie::DEFAULT_EXPANSION_CAP)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use pyo3::ffi::c_str;
    use pyo3::types::PyModule;

    use super::*;

    #[test]
    fn module_scores_worked_example() {
        Python::attach(|py| {
            let m = PyModule::new(py, "pybenchie").unwrap();
            pybenchie(&m).unwrap();
            let globals = PyDict::new(py);
            globals.set_item("pb", &m).unwrap();
            globals.set_item("GOLD", benchie::fixtures::MITCHELL_GOLD).unwrap();
            globals.set_item("TSV", benchie::fixtures::extractions_tsv()).unwrap();
            py.run(
                c_str!(
                    "g = pb.Gold.parse(GOLD)\n\
                     r = pb.score(g, pb.read_extractions(TSV))\n\
                     assert (r.score.tp, r.score.fp, getattr(r.score, 'fn')) == (1, 3, 3)\n\
                     assert r.f1 == 0.25\n\
                     assert [len(ts) for _, ts in g.expand()] == [4, 10, 16, 16]\n\
                     assert pb.iaa(g, g) == 1.0\n\
                     assert pb.FACETS == ['default', 'E', 'C', 'M']\n"
                ),
                Some(&globals),
                None,
            )
            .unwrap();
        });
    }
}
