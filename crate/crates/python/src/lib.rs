//! Python bindings: build or parse networks, then ask for rates and POVMs.
//!
//! ```python
//! import qdn
//! net = qdn.build_scenario("franson_iii")
//! t = net.rates({"theta1": 0.785, ..., "phi1": 0.0, "phi2": 0.0})
//! t.coincidence_rate([1, 2])
//! ```

use std::collections::BTreeMap;

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use qdn_core::{
    netdsl, realize, Binding, Complex64, Label, NetworkDescription, RateTable as CoreRates, Scenario,
};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_binding(values: Option<BTreeMap<String, f64>>) -> Binding {
    values.unwrap_or_default().into_iter().collect()
}

fn to_label(bits: i64) -> PyResult<Label> {
    Label::try_from(bits).map_err(value_error)
}

/// Probability per final labstate label.
#[pyclass(frozen, name = "RateTable", module = "qdn")]
pub struct RateTable {
    inner: CoreRates,
}

#[pymethods]
impl RateTable {
    /// Rate of the exact label (0 when absent).
    fn rate(&self, label: i64) -> PyResult<f64> {
        Ok(self.inner.rate(to_label(label)?))
    }

    /// Probability that exactly this detector set signals.
    fn coincidence_rate(&self, detectors: Vec<u32>) -> f64 {
        self.inner.coincidence_rate(&detectors)
    }

    /// Probability that `detector` signals, whatever else does.
    fn detector_marginal(&self, detector: u32) -> f64 {
        self.inner.detector_marginal(detector)
    }

    fn total(&self) -> f64 {
        self.inner.total()
    }

    fn labels(&self) -> Vec<u32> {
        self.inner.labels().map(Label::bits).collect()
    }

    fn to_dict(&self) -> BTreeMap<u32, f64> {
        self.inner.iter().map(|(l, p)| (l.bits(), p)).collect()
    }

    #[getter]
    fn network(&self) -> String {
        self.inner.network().to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __getitem__(&self, label: i64) -> PyResult<f64> {
        let label = to_label(label)?;
        if self.inner.labels().any(|l| l == label) {
            Ok(self.inner.rate(label))
        } else {
            Err(PyKeyError::new_err(label.bits()))
        }
    }

    fn __contains__(&self, label: i64) -> bool {
        to_label(label).is_ok_and(|l| self.inner.labels().any(|x| x == l))
    }

    fn __repr__(&self) -> String {
        let body: Vec<String> = self.inner.iter().map(|(l, p)| format!("{}: {p}", l.bits())).collect();
        format!("RateTable({{{}}})", body.join(", "))
    }
}

/// A complete detector network.
#[pyclass(frozen, name = "Network", module = "qdn")]
pub struct Network {
    inner: NetworkDescription,
}

#[pymethods]
impl Network {
    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn parameters(&self) -> Vec<String> {
        self.inner.parameters().to_vec()
    }

    #[getter]
    fn stage_count(&self) -> usize {
        self.inner.stages().len()
    }

    /// `(suo, label)` pairs of the initial stage, in matrix order.
    #[getter]
    fn initial_basis(&self) -> Vec<(u32, u32)> {
        self.inner.initial_stage().basis().iter().map(|e| (e.suo, e.label.bits())).collect()
    }

    #[getter]
    fn final_basis(&self) -> Vec<(u32, u32)> {
        self.inner.final_stage().basis().iter().map(|e| (e.suo, e.label.bits())).collect()
    }

    #[pyo3(signature = (binding=None, normalize=false))]
    fn rates(&self, binding: Option<BTreeMap<String, f64>>, normalize: bool) -> PyResult<RateTable> {
        let inner = self.inner.rates(&to_binding(binding), normalize).map_err(value_error)?;
        Ok(RateTable { inner })
    }

    /// `[(label, matrix)]` with each POVM element as nested lists of complex.
    #[pyo3(signature = (binding=None))]
    fn povms(&self, binding: Option<BTreeMap<String, f64>>) -> PyResult<Vec<(u32, Vec<Vec<Complex64>>)>> {
        let set = self.inner.povms(&to_binding(binding)).map_err(value_error)?;
        Ok(set
            .elements()
            .iter()
            .map(|e| {
                let m = e.matrix();
                let rows = (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect();
                (e.label().bits(), rows)
            })
            .collect())
    }

    #[pyo3(signature = (binding=None))]
    fn completeness_defect(&self, binding: Option<BTreeMap<String, f64>>) -> PyResult<f64> {
        let set = self.inner.povms(&to_binding(binding)).map_err(value_error)?;
        Ok(set.completeness_defect())
    }

    /// One defect per stage map.
    #[pyo3(signature = (binding=None))]
    fn semi_unitarity_defects(&self, binding: Option<BTreeMap<String, f64>>) -> PyResult<Vec<f64>> {
        let b = to_binding(binding);
        self.inner
            .maps()
            .iter()
            .map(|m| realize(m, &b).map(|t| t.semi_unitarity_defect()).map_err(value_error))
            .collect()
    }

    /// Final-stage amplitudes as `{(suo, label): amplitude}`.
    #[pyo3(signature = (binding=None))]
    fn evolve(&self, binding: Option<BTreeMap<String, f64>>) -> PyResult<BTreeMap<(u32, u32), Complex64>> {
        let out = self.inner.evolve(&to_binding(binding)).map_err(value_error)?;
        Ok(out
            .stage()
            .basis()
            .iter()
            .zip(out.coefficients())
            .map(|(e, a)| ((e.suo, e.label.bits()), *a))
            .collect())
    }

    /// Validation messages, e.g. unused parameters.
    fn validate(&self) -> Vec<String> {
        netdsl::validate(&self.inner).iter().map(ToString::to_string).collect()
    }

    fn to_qdn(&self) -> String {
        netdsl::to_qdn(&self.inner)
    }

    fn __eq__(&self, other: &Network) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Network(name={:?}, stages={}, parameters={:?})",
            self.inner.name(),
            self.inner.stages().len(),
            self.inner.parameters()
        )
    }
}

#[pyfunction]
fn build_scenario(name: &str) -> PyResult<Network> {
    let inner = qdn_core::build_scenario(name).map_err(value_error)?;
    Ok(Network { inner })
}

#[pyfunction]
fn scenarios() -> Vec<&'static str> {
    Scenario::ALL.iter().map(|s| s.name()).collect()
}

/// Parses `.qdn` text; all error diagnostics are joined into the ValueError.
#[pyfunction]
fn parse_network(source: &str) -> PyResult<Network> {
    netdsl::parse_network(source)
        .map(|inner| Network { inner })
        .map_err(|diags| {
            let lines: Vec<String> = diags.iter().filter(|d| d.is_error()).map(ToString::to_string).collect();
            PyValueError::new_err(lines.join("\n"))
        })
}

#[pyfunction]
fn labstate_label(detectors: Vec<i64>) -> PyResult<u32> {
    qdn_core::labstate_label(detectors).map_err(value_error)
}

#[pyfunction]
fn label_detectors(label: i64) -> PyResult<Vec<u32>> {
    Ok(qdn_core::label_detectors(label).map_err(value_error)?.into_iter().collect())
}

/// Evaluates an amplitude expression such as `cos(t) * cis(phi)`.
#[pyfunction]
#[pyo3(signature = (text, binding=None))]
fn eval_expr(text: &str, binding: Option<BTreeMap<String, f64>>) -> PyResult<Complex64> {
    let expr = netdsl::parse_expr(text).map_err(|d| value_error(&d))?;
    expr.eval(&to_binding(binding)).map_err(value_error)
}

#[pymodule]
fn qdn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Network>()?;
    m.add_class::<RateTable>()?;
    m.add_function(wrap_pyfunction!(build_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(parse_network, m)?)?;
    m.add_function(wrap_pyfunction!(labstate_label, m)?)?;
    m.add_function(wrap_pyfunction!(label_detectors, m)?)?;
    m.add_function(wrap_pyfunction!(eval_expr, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binding_conversion() {
        let b = to_binding(Some(BTreeMap::from([("phi1".to_string(), 0.5)])));
        assert_eq!(b.get("phi1"), Some(0.5));
        assert!(to_binding(None).is_empty());
    }

    #[test]
    fn labels_are_checked() {
        assert_eq!(to_label(12).unwrap().bits(), 12);
        assert!(to_label(-1).is_err());
    }
}
