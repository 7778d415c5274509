//! Python bindings. Reports come back as plain dicts with the same layout as
//! the command-line JSON.

use chamberlain::git::{secondary_fan, GitProblem};
use chamberlain::lattice::{hermite_normal_form, kernel_basis, smith_normal_form, IntMatrix};
use chamberlain::problem::{parse, serialize, ProblemFile};
use chamberlain::report::{self, Command};
use chamberlain::wallcross::Side;
use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(chamberlain_py, ChamberlainError, PyException, "Computation or input error; `code` names the kind.");
create_exception!(chamberlain_py, UndefinedSideError, ChamberlainError);

fn to_py_err(e: chamberlain::Error) -> PyErr {
    let err = match &e {
        chamberlain::Error::UndefinedSide(_) => UndefinedSideError::new_err(e.to_string()),
        _ => ChamberlainError::new_err(e.to_string()),
    };
    Python::attach(|py| {
        let _ = err.value(py).setattr("code", e.code());
    });
    err
}

fn to_dict(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).expect("serializable");
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn matrix(rows: Vec<Vec<BigInt>>) -> PyResult<IntMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(ChamberlainError::new_err("ragged matrix"));
    }
    Ok(IntMatrix::from_rows(cols, &rows))
}

/// A parsed problem file.
#[pyclass(name = "Problem")]
struct PyProblem {
    inner: ProblemFile,
    #[pyo3(get)]
    warnings: Vec<String>,
}

impl PyProblem {
    fn run(&self, py: Python<'_>, command: Command, seed: Option<u64>) -> PyResult<Py<PyAny>> {
        let mut p = self.inner.clone();
        if let Some(s) = seed {
            p.options.seed = s;
        }
        let doc = report::run(command, &p).map_err(to_py_err)?;
        to_dict(py, &doc)
    }
}

#[pymethods]
impl PyProblem {
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let parsed = parse(text).map_err(to_py_err)?;
        Ok(PyProblem {
            inner: parsed.problem,
            warnings: parsed.warnings,
        })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ChamberlainError::new_err(format!("{path}: {e}")))?;
        Self::from_toml(&text)
    }

    fn to_toml(&self) -> PyResult<String> {
        serialize(&self.inner).map_err(to_py_err)
    }

    #[getter]
    fn coordinate_names(&self) -> Vec<String> {
        self.inner.coordinates.iter().map(|c| c.name.clone()).collect()
    }

    fn gkz(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        self.run(py, Command::Gkz, None)
    }

    fn kuznetsov(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        self.run(py, Command::Kuznetsov, None)
    }

    /// `side` is "K" or "-K"; defaults to the file's option.
    #[pyo3(signature = (side=None, seed=None))]
    fn sod(&self, py: Python<'_>, side: Option<&str>, seed: Option<u64>) -> PyResult<Py<PyAny>> {
        let side = match side {
            Some(s) => s.parse::<Side>().map_err(to_py_err)?,
            None => self.inner.options.side,
        };
        self.run(py, Command::Sod(side), seed)
    }

    fn ci(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        self.run(py, Command::Ci, None)
    }

    fn cy(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        self.run(py, Command::Cy, None)
    }

    fn visitor(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        self.run(py, Command::Visitor, None)
    }

    #[pyo3(signature = (seed=None))]
    fn audit(&self, py: Python<'_>, seed: Option<u64>) -> PyResult<Py<PyAny>> {
        self.run(py, Command::Audit, seed)
    }

    fn dot(&self) -> PyResult<String> {
        report::dot_for(&self.inner).map_err(to_py_err)
    }
}

/// Returns `(u, s, v)` with `u·a·v = s` in Smith normal form.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn smith(a: Vec<Vec<BigInt>>) -> PyResult<(Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>)> {
    let d = smith_normal_form(&matrix(a)?);
    Ok((d.u.row_vecs(), d.s.row_vecs(), d.v.row_vecs()))
}

#[pyfunction]
fn hermite(a: Vec<Vec<BigInt>>) -> PyResult<Vec<Vec<BigInt>>> {
    Ok(hermite_normal_form(&matrix(a)?).row_vecs())
}

/// Integer kernel basis, one vector per entry.
#[pyfunction]
fn kernel(a: Vec<Vec<BigInt>>) -> PyResult<Vec<Vec<BigInt>>> {
    Ok(kernel_basis(&matrix(a)?).col_vecs())
}

/// `(chamber count, wall count)` for a torus acting with the given weights.
#[pyfunction]
fn chamber_counts(weights: Vec<Vec<i64>>) -> PyResult<(usize, usize)> {
    let git = GitProblem::from_weights(&weights).map_err(to_py_err)?;
    let fan = secondary_fan(&git).map_err(to_py_err)?;
    Ok((fan.chambers().len(), fan.walls().len()))
}

#[pymodule]
fn chamberlain_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(smith, m)?)?;
    m.add_function(wrap_pyfunction!(hermite, m)?)?;
    m.add_function(wrap_pyfunction!(kernel, m)?)?;
    m.add_function(wrap_pyfunction!(chamber_counts, m)?)?;
    m.add("ChamberlainError", m.py().get_type::<ChamberlainError>())?;
    m.add("UndefinedSideError", m.py().get_type::<UndefinedSideError>())?;
    Ok(())
}
