//! Python bindings: frames, bpas, combination, the reduction algorithms,
//! decision metrics, and the seeded benchmark.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use evidential::approx::ApproxMethod;
use evidential::doc;
use evidential::metrics;
use evidential::report;
use evidential::testbed;
use evidential::{Bpa, EvidenceError, Frame, PignisticDist};

fn err(e: EvidenceError) -> PyErr {
    match e {
        EvidenceError::TotalConflict { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A frame of discernment: ordered, distinct element labels.
#[pyclass(frozen, name = "Frame", module = "evidential_py", skip_from_py_object)]
#[derive(Clone)]
struct PyFrame {
    inner: Frame,
}

#[pymethods]
impl PyFrame {
    #[new]
    fn new(labels: Vec<String>) -> PyResult<Self> {
        Ok(PyFrame {
            inner: Frame::new(labels).map_err(err)?,
        })
    }

    /// Frame with generated labels x1..xN.
    #[staticmethod]
    fn of_size(n: usize) -> PyResult<Self> {
        Ok(PyFrame {
            inner: Frame::of_size(n).map_err(err)?,
        })
    }

    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.size()
    }

    fn __eq__(&self, other: &PyFrame) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Frame([{}])", self.inner.labels().join(", "))
    }
}

/// A basic probability assignment over a frame.
#[pyclass(name = "Bpa", module = "evidential_py", skip_from_py_object)]
#[derive(Clone)]
struct PyBpa {
    inner: Bpa,
}

impl PyBpa {
    fn resolve(&self, elements: Vec<String>) -> PyResult<evidential::FocalSet> {
        self.inner.frame().set_of(elements).map_err(err)
    }
}

#[pymethods]
impl PyBpa {
    /// Bpa(frame, assignments): assignments are (elements, mass) pairs where
    /// elements is a list of labels. Duplicate sets accumulate.
    #[new]
    fn new(frame: &PyFrame, assignments: Vec<(Vec<String>, f64)>) -> PyResult<Self> {
        let mut resolved = Vec::with_capacity(assignments.len());
        for (labels, mass) in assignments {
            resolved.push((frame.inner.set_of(labels).map_err(err)?, mass));
        }
        Ok(PyBpa {
            inner: Bpa::new(frame.inner.clone(), resolved).map_err(err)?,
        })
    }

    /// Total ignorance: all mass on the full frame.
    #[staticmethod]
    fn vacuous(frame: &PyFrame) -> Self {
        PyBpa {
            inner: Bpa::vacuous(frame.inner.clone()),
        }
    }

    /// Parses the text document format (`frame:` line plus `mass ... set ...`
    /// lines).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        match doc::parse_bpa(text) {
            Ok(inner) => Ok(PyBpa { inner }),
            Err(doc::DocError::Invalid(e)) => Err(err(e)),
            Err(syntax) => Err(PyValueError::new_err(syntax.to_string())),
        }
    }

    fn frame(&self) -> PyFrame {
        PyFrame {
            inner: self.inner.frame().clone(),
        }
    }

    fn focal_count(&self) -> usize {
        self.inner.focal_count()
    }

    /// Focal elements as (elements, mass) pairs in canonical order.
    fn masses(&self) -> Vec<(Vec<String>, f64)> {
        let frame = self.inner.frame();
        self.inner
            .iter()
            .map(|(set, mass)| {
                (
                    frame
                        .labels_of(set)
                        .into_iter()
                        .map(str::to_string)
                        .collect(),
                    mass,
                )
            })
            .collect()
    }

    /// Mass assigned to exactly this set (0 when not focal).
    fn mass(&self, elements: Vec<String>) -> PyResult<f64> {
        Ok(self.inner.mass(self.resolve(elements)?))
    }

    /// Dempster's rule of combination.
    fn combine(&self, other: &PyBpa) -> PyResult<PyBpa> {
        Ok(PyBpa {
            inner: self.inner.combine(&other.inner).map_err(err)?,
        })
    }

    /// Conflict mass the combination with `other` would discard.
    fn conflict(&self, other: &PyBpa) -> PyResult<f64> {
        Ok(self
            .inner
            .combine_report(&other.inner)
            .map_err(err)?
            .conflict)
    }

    fn belief(&self, elements: Vec<String>) -> PyResult<f64> {
        self.inner.belief(self.resolve(elements)?).map_err(err)
    }

    fn plausibility(&self, elements: Vec<String>) -> PyResult<f64> {
        self.inner
            .plausibility(self.resolve(elements)?)
            .map_err(err)
    }

    /// Pignistic probabilities, indexed like the frame's labels.
    fn pignistic(&self) -> Vec<f64> {
        self.inner.pignistic().probs().to_vec()
    }

    fn approx_bayesian(&self) -> PyBpa {
        PyBpa {
            inner: evidential::approx::bayesian(&self.inner),
        }
    }

    #[pyo3(signature = (k, l = None, x = 0.0))]
    fn approx_klx(&self, k: usize, l: Option<usize>, x: f64) -> PyResult<PyBpa> {
        let method = ApproxMethod::Klx { k, l, x };
        method.validate().map_err(err)?;
        Ok(PyBpa {
            inner: method.apply(&self.inner),
        })
    }

    fn approx_summarize(&self, k: usize) -> PyResult<PyBpa> {
        let method = ApproxMethod::Summarize { k };
        method.validate().map_err(err)?;
        Ok(PyBpa {
            inner: method.apply(&self.inner),
        })
    }

    fn approx_d1(&self, k: usize) -> PyResult<PyBpa> {
        let method = ApproxMethod::D1 { k };
        method.validate().map_err(err)?;
        Ok(PyBpa {
            inner: method.apply(&self.inner),
        })
    }

    /// Renders the text document format.
    fn to_document(&self) -> String {
        doc::format_bpa(&self.inner)
    }

    fn __repr__(&self) -> String {
        let parts: Vec<String> = self
            .inner
            .iter()
            .map(|(set, mass)| {
                format!(
                    "{{{}}}: {mass}",
                    self.inner.frame().labels_of(set).join(",")
                )
            })
            .collect();
        format!("Bpa({})", parts.join(", "))
    }
}

fn check_pair(p0: &[f64], papp: &[f64]) -> PyResult<()> {
    if p0.len() != papp.len() || p0.is_empty() {
        return Err(PyValueError::new_err(format!(
            "distributions must share a nonempty frame, got lengths {} and {}",
            p0.len(),
            papp.len()
        )));
    }
    Ok(())
}

/// Largest probability gap any subset can see between the two distributions.
#[pyfunction]
fn error1(p0: Vec<f64>, papp: Vec<f64>) -> PyResult<f64> {
    check_pair(&p0, &papp)?;
    Ok(metrics::error1_probs(&p0, &papp))
}

/// (error2, error3): rank damage of deciding from `papp` instead of `p0`.
#[pyfunction]
fn error23(p0: Vec<f64>, papp: Vec<f64>) -> PyResult<(usize, usize)> {
    check_pair(&p0, &papp)?;
    Ok(metrics::error23_probs(&p0, &papp))
}

/// (best, ranking) for a probability vector; ties prefer the lowest index.
#[pyfunction]
fn decide(probs: Vec<f64>) -> PyResult<(usize, Vec<usize>)> {
    if probs.is_empty() {
        return Err(PyValueError::new_err("cannot decide over an empty frame"));
    }
    let report = metrics::decide_probs(&probs);
    Ok((report.best, report.ranking))
}

/// Names of the canonical benchmark methods, in report order.
#[pyfunction]
fn default_method_names() -> Vec<String> {
    testbed::default_method_suite()
        .into_iter()
        .map(|nm| nm.name)
        .collect()
}

/// Draws a random bpa the way benchmark trials do (trial stream 0).
#[pyfunction]
#[pyo3(signature = (seed, frame_size = 32, focal_count = 8, lambda = 1.0))]
fn generate_random_bpa(
    seed: u64,
    frame_size: usize,
    focal_count: usize,
    lambda: f64,
) -> PyResult<PyBpa> {
    let cfg = testbed::GenConfig {
        frame_size,
        focal_count,
        seed,
        lambda,
    };
    let mut rng = testbed::trial_rng(seed, 0);
    Ok(PyBpa {
        inner: testbed::gen_random_bpa(&cfg, &mut rng).map_err(err)?,
    })
}

/// Runs the benchmark and returns (trials_csv, stats_csv) as strings.
#[pyfunction]
#[pyo3(signature = (
    seed,
    trials = 200,
    combinations = 5,
    frame_size = 32,
    focal_count = 8,
    lambda = 1.0,
    methods = None,
    track = "cumulative",
))]
#[allow(clippy::too_many_arguments)]
fn run_benchmark(
    seed: u64,
    trials: usize,
    combinations: usize,
    frame_size: usize,
    focal_count: usize,
    lambda: f64,
    methods: Option<Vec<String>>,
    track: &str,
) -> PyResult<(String, String)> {
    let methods = match methods {
        Some(names) => {
            report::parse_method_list(&names.join(",")).map_err(PyValueError::new_err)?
        }
        None => testbed::default_method_suite(),
    };
    let cfg = testbed::ExperimentConfig {
        gen: testbed::GenConfig {
            frame_size,
            focal_count,
            seed,
            lambda,
        },
        methods,
        combinations,
        trials,
        track: track.parse().map_err(PyValueError::new_err)?,
        parallel: true,
    };
    let output = testbed::run_experiment(&cfg).map_err(err)?;
    Ok((
        report::trials_csv(&output.records),
        report::stats_csv(&cfg, &output.stats),
    ))
}

/// Validates error1 inputs the same way PignisticDist does; exposed so Python
/// callers can check hand-built distributions.
#[pyfunction]
fn validate_distribution(labels: Vec<String>, probs: Vec<f64>) -> PyResult<()> {
    let frame = Frame::new(labels).map_err(err)?;
    PignisticDist::new(frame, probs).map_err(err)?;
    Ok(())
}

#[pymodule]
fn evidential_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyFrame>()?;
    m.add_class::<PyBpa>()?;
    m.add_function(wrap_pyfunction!(error1, m)?)?;
    m.add_function(wrap_pyfunction!(error23, m)?)?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(default_method_names, m)?)?;
    m.add_function(wrap_pyfunction!(generate_random_bpa, m)?)?;
    m.add_function(wrap_pyfunction!(run_benchmark, m)?)?;
    m.add_function(wrap_pyfunction!(validate_distribution, m)?)?;
    Ok(())
}
