//! Python bindings for the `shipctl` library.
//!
//! Scenario and model errors raise `ValueError`; a diverging run raises
//! `RuntimeError`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use shipctl::cli::{csv_header, parse_config, run_suite, to_config_string, write_csv_to};
use shipctl::model::{derive_reduced, input_from_reduced, input_to_reduced, ReducedInputs, TrueInputs, Velocity};
use shipctl::sim::{presets, Detail, Mode};
use shipctl::SimError;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Inertia and damping entries of the hull.
#[pyclass(name = "ShipParams", module = "pyshipctl", get_all, set_all, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyShipParams {
    m11: f64,
    m22: f64,
    m23: f64,
    m33: f64,
    d11: f64,
    d22: f64,
    d23: f64,
    d32: f64,
    d33: f64,
}

impl From<shipctl::ShipParams> for PyShipParams {
    fn from(p: shipctl::ShipParams) -> Self {
        Self {
            m11: p.m11,
            m22: p.m22,
            m23: p.m23,
            m33: p.m33,
            d11: p.d11,
            d22: p.d22,
            d23: p.d23,
            d32: p.d32,
            d33: p.d33,
        }
    }
}

impl From<PyShipParams> for shipctl::ShipParams {
    fn from(p: PyShipParams) -> Self {
        Self {
            m11: p.m11,
            m22: p.m22,
            m23: p.m23,
            m33: p.m33,
            d11: p.d11,
            d22: p.d22,
            d23: p.d23,
            d32: p.d32,
            d33: p.d33,
        }
    }
}

#[pymethods]
impl PyShipParams {
    /// Defaults to the bundled scale model; keywords override single entries.
    #[new]
    #[pyo3(signature = (**overrides))]
    fn new(overrides: Option<&Bound<'_, pyo3::types::PyDict>>) -> PyResult<Self> {
        let mut p = Self::from(shipctl::ShipParams::default());
        if let Some(kw) = overrides {
            let obj = Bound::new(kw.py(), p)?;
            for (k, v) in kw.iter() {
                let name: String = k.extract()?;
                if !FIELDS.contains(&name.as_str()) {
                    return Err(value_error(format!("unknown model entry `{name}`")));
                }
                obj.setattr(name.as_str(), v)?;
            }
            p = *obj.borrow();
        }
        Ok(p)
    }

    /// `m22·m33 − m23²`
    fn delta(&self) -> f64 {
        shipctl::ShipParams::from(*self).delta()
    }

    /// Raises `ValueError` if the entries do not describe a valid hull.
    fn validate(&self) -> PyResult<()> {
        shipctl::ShipParams::from(*self).validate().map_err(value_error)
    }

    /// Reduced constants `(a, b, c, d)`.
    fn reduced(&self) -> PyResult<(f64, f64, f64, f64)> {
        let rp = derive_reduced(&(*self).into()).map_err(value_error)?;
        Ok((rp.a, rp.b, rp.c, rp.d))
    }

    /// Reduced inputs `(tau1, tau2)` for body velocities and true inputs.
    fn reduce_inputs(&self, vel: (f64, f64, f64), tau: (f64, f64)) -> (f64, f64) {
        let ri = input_to_reduced(&velocity(vel), &TrueInputs { tau_u: tau.0, tau_r: tau.1 }, &(*self).into());
        (ri.tau1, ri.tau2)
    }

    /// True inputs `(tau_u, tau_r)` producing the given reduced inputs.
    fn true_inputs(&self, vel: (f64, f64, f64), tau: (f64, f64)) -> (f64, f64) {
        let ti = input_from_reduced(&velocity(vel), &ReducedInputs { tau1: tau.0, tau2: tau.1 }, &(*self).into());
        (ti.tau_u, ti.tau_r)
    }

    fn __repr__(&self) -> String {
        let p = shipctl::ShipParams::from(*self);
        format!("ShipParams({p:?})")
    }
}

const FIELDS: [&str; 9] = ["m11", "m22", "m23", "m33", "d11", "d22", "d23", "d32", "d33"];

fn velocity((u, v, r): (f64, f64, f64)) -> Velocity {
    Velocity { u, v, r }
}

/// A complete run description: model, controller, initial states, grid.
#[pyclass(name = "Scenario", module = "pyshipctl", skip_from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: shipctl::Scenario,
}

#[pymethods]
impl PyScenario {
    /// Parses a `key = value` scenario file.
    #[staticmethod]
    fn from_config(text: &str) -> PyResult<Self> {
        parse_config(text).map(|inner| Self { inner }).map_err(value_error)
    }

    /// One of `stabilize_offset`, `stabilize_lateral`, `track_straight_line`,
    /// `track_circle`.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        let inner = match name {
            "stabilize_offset" => presets::stabilize_offset(),
            "stabilize_lateral" => presets::stabilize_lateral(),
            "track_straight_line" => presets::track_straight_line(),
            "track_circle" => presets::track_circle(),
            _ => return Err(value_error(format!("unknown preset `{name}`"))),
        };
        Ok(Self { inner })
    }

    fn to_config(&self) -> String {
        to_config_string(&self.inner)
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode().name()
    }

    #[getter]
    fn params(&self) -> PyShipParams {
        self.inner.params.into()
    }

    #[setter]
    fn set_params(&mut self, p: PyRef<'_, PyShipParams>) {
        self.inner.params = (*p).into();
    }

    #[getter]
    fn duration(&self) -> f64 {
        self.inner.duration
    }

    #[setter]
    fn set_duration(&mut self, v: f64) {
        self.inner.duration = v;
    }

    #[getter]
    fn step(&self) -> f64 {
        self.inner.step
    }

    #[setter]
    fn set_step(&mut self, v: f64) {
        self.inner.step = v;
    }

    /// Runs the closed loop and returns the sampled trajectory.
    fn simulate(&self, py: Python<'_>) -> PyResult<PyRun> {
        let sc = self.inner.clone();
        let ts = py.detach(move || shipctl::simulate(&sc)).map_err(|e| match e {
            SimError::InvalidScenario(_) | SimError::Model(_) | SimError::Gain(_) => value_error(e),
            _ => PyRuntimeError::new_err(e.to_string()),
        })?;
        Ok(PyRun { inner: ts })
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(mode={}, step={}, duration={})",
            self.mode(),
            self.inner.step,
            self.inner.duration
        )
    }
}

/// Output of `Scenario.simulate`.
#[pyclass(name = "Run", module = "pyshipctl", frozen)]
struct PyRun {
    inner: shipctl::TimeSeries,
}

#[pymethods]
impl PyRun {
    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode().name()
    }

    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }

    fn times(&self) -> Vec<f64> {
        self.inner.times()
    }

    /// Rows `(x, y, psi, u, v, r)`.
    fn states(&self) -> Vec<[f64; 6]> {
        self.inner.samples.iter().map(|s| s.state.to_array()).collect()
    }

    /// Rows `(tau_u, tau_r)`.
    fn inputs(&self) -> Vec<(f64, f64)> {
        self.inner.samples.iter().map(|s| (s.inputs.tau_u, s.inputs.tau_r)).collect()
    }

    /// Reference ship states; empty for stabilization runs.
    fn reference_states(&self) -> Vec<[f64; 6]> {
        self.inner.reference_states().iter().map(|s| s.to_array()).collect()
    }

    /// Tracking error norms; empty unless the run tracks a reference.
    fn error_norms(&self) -> Vec<f64> {
        self.inner.error_norms()
    }

    /// `‖state(T)‖ / ‖state(0)‖` for stabilization runs.
    fn decay_ratio(&self) -> Option<f64> {
        let norm = |s: &shipctl::ShipState| s.to_array().iter().map(|x| x * x).sum::<f64>().sqrt();
        match (self.inner.samples.first(), self.inner.samples.last()) {
            (Some(a), Some(b)) if matches!(a.detail, Detail::Stabilize(_)) => Some(norm(&b.state) / norm(&a.state)),
            _ => None,
        }
    }

    /// Whether the reference passed the excitation check, if it was run.
    #[getter]
    fn excited(&self) -> Option<bool> {
        self.inner.pe.as_ref().map(|pe| pe.satisfied)
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        write_csv_to(&self.inner, &mut buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        String::from_utf8(buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
}

/// CSV header line for `stabilize`, `track` or `reference`.
#[pyfunction]
fn header(mode: &str) -> PyResult<String> {
    Mode::parse(mode).map(csv_header).ok_or_else(|| value_error(format!("unknown mode `{mode}`")))
}

/// Runs the property suite; returns `(name, passed, detail)` per check.
#[pyfunction]
fn verify(py: Python<'_>) -> Vec<(String, bool, String)> {
    py.detach(run_suite).into_iter().map(|r| (r.name.to_string(), r.passed, r.detail)).collect()
}

#[pymodule]
fn pyshipctl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyShipParams>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(header, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
