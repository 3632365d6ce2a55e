//! Python bindings. Matrices cross the boundary as lists of rows of
//! `complex`; reports cross as JSON strings.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qid_core::attacks::{make_attack, AttackSpec};
use qid_core::experiment::{run_experiment as core_run, to_report_json, ExperimentConfig};
use qid_core::protocol::{equivalence_check, receiver_state};
use qid_core::tradeoff::{self, analyze_side, VerifyOptions};
use qid_core::{Basis, ComplexMatrix, DensityOperator, Message, ProtocolInstance, Projector, QuantumChannel, Side};

create_exception!(qid, QidError, PyValueError);
create_exception!(qid, CapacityError, QidError);

fn err(e: qid_core::Error) -> PyErr {
    match e {
        qid_core::Error::Capacity(msg) => CapacityError::new_err(msg),
        other => QidError::new_err(other.to_string()),
    }
}

type Rows = Vec<Vec<Complex64>>;

fn to_rows(m: &ComplexMatrix) -> Rows {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn from_rows(rows: Rows) -> PyResult<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(QidError::new_err("ragged matrix"));
    }
    ComplexMatrix::new(r, c, rows.into_iter().flatten().collect()).map_err(err)
}

fn qubit_dims(d: usize) -> Vec<usize> {
    if d.is_power_of_two() && d >= 2 {
        vec![2; d.trailing_zeros() as usize]
    } else {
        vec![d]
    }
}

fn side(s: &str) -> PyResult<Side> {
    match s {
        "B" | "b" | "bob" => Ok(Side::B),
        "E" | "e" | "eve" => Ok(Side::E),
        _ => Err(QidError::new_err(format!("unknown side '{s}'"))),
    }
}

fn basis(s: &str) -> PyResult<Basis> {
    match s {
        "Z" | "z" => Ok(Basis::Z),
        "X" | "x" => Ok(Basis::X),
        _ => Err(QidError::new_err(format!("unknown basis '{s}'"))),
    }
}

fn attack_spec(kind: &str, p: Option<f64>, theta: Option<f64>) -> PyResult<AttackSpec> {
    let spec = match kind {
        "identity" => AttackSpec::Identity,
        "measure_z" => AttackSpec::MeasureZ,
        "measure_x" => AttackSpec::MeasureX,
        "cnot_probe" => AttackSpec::CnotProbe,
        "universal_cloner" => AttackSpec::UniversalCloner,
        "depolarize" => AttackSpec::Depolarize { p: p.unwrap_or(0.5) },
        "intercept_resend_angle" => AttackSpec::InterceptResendAngle {
            theta: theta.unwrap_or(std::f64::consts::FRAC_PI_4),
        },
        _ => return Err(QidError::new_err(format!("unknown attack '{kind}'"))),
    };
    spec.validate().map_err(err)?;
    Ok(spec)
}

/// Kraus-form channel with output split into Bob's and Eve's systems.
#[pyclass(name = "Channel", module = "qid", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyChannel {
    inner: QuantumChannel,
    spec: Option<AttackSpec>,
}

#[pymethods]
impl PyChannel {
    /// Channel of a library attack acting on `n` qubits.
    #[staticmethod]
    #[pyo3(signature = (kind, n, p=None, theta=None))]
    fn attack(kind: &str, n: usize, p: Option<f64>, theta: Option<f64>) -> PyResult<Self> {
        let spec = attack_spec(kind, p, theta)?;
        Ok(Self {
            inner: make_attack(&spec, n).map_err(err)?,
            spec: Some(spec),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: QuantumChannel::from_json(text).map_err(err)?,
            spec: None,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }

    #[getter]
    fn dim_b(&self) -> usize {
        self.inner.dim_b()
    }

    #[getter]
    fn dim_e(&self) -> usize {
        self.inner.dim_e()
    }

    #[getter]
    fn num_kraus(&self) -> usize {
        self.inner.kraus().len()
    }

    /// Largest entry of `sum K^dagger K - I`.
    fn completeness_violation(&self) -> f64 {
        qid_core::validate_channel(&self.inner, 1e-9).completeness_violation
    }

    /// Output on `B (x) E` for an input density matrix.
    fn apply(&self, rho: Rows) -> PyResult<Rows> {
        let m = from_rows(rho)?;
        let dims = self.inner.in_dims().to_vec();
        let rho = DensityOperator::new(m, dims).map_err(err)?;
        let out = qid_core::apply_channel(&self.inner, &rho).map_err(err)?;
        Ok(to_rows(out.matrix()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Channel(name='{}', in_dim={}, dim_b={}, dim_e={}, kraus={})",
            self.inner.name(),
            self.inner.in_dim(),
            self.inner.dim_b(),
            self.inner.dim_e(),
            self.inner.kraus().len()
        )
    }
}

/// A channel at a fixed message length with cached receiver states.
#[pyclass(name = "Protocol", module = "qid", frozen)]
struct PyProtocol {
    inst: ProtocolInstance,
    spec: Option<AttackSpec>,
}

#[pymethods]
impl PyProtocol {
    #[new]
    fn new(channel: &PyChannel, n: usize) -> PyResult<Self> {
        Ok(Self {
            inst: ProtocolInstance::new(n, channel.inner.clone()).map_err(err)?,
            spec: channel.spec,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inst.n()
    }

    /// Receiver's reduced state for a message given as a bit string.
    #[pyo3(signature = (bits, basis_name, side_name))]
    fn receiver_state(&self, bits: &str, basis_name: &str, side_name: &str) -> PyResult<Rows> {
        let msg = Message::from_bits(bits).map_err(err)?;
        let rho = receiver_state(&self.inst, msg, basis(basis_name)?, side(side_name)?).map_err(err)?;
        Ok(to_rows(rho.matrix()))
    }

    /// `(max probability deviation, max state deviation, passed)`.
    #[pyo3(signature = (tol=1e-10))]
    fn equivalence(&self, tol: f64) -> PyResult<(f64, f64, bool)> {
        let r = equivalence_check(&self.inst, tol).map_err(err)?;
        Ok((r.max_probability_deviation, r.max_state_deviation, r.passed))
    }

    /// Distinguishable classes as lists of bit strings.
    fn partition(&self, side_name: &str) -> PyResult<Vec<Vec<String>>> {
        let a = analyze_side(&self.inst, side(side_name)?, qid_core::tolerance::DECISION).map_err(err)?;
        Ok(a.partition
            .iter()
            .map(|c| c.members.iter().map(Message::bits).collect())
            .collect())
    }

    /// `(codeword, members)` for each catalogue entry.
    fn catalogue(&self, side_name: &str) -> PyResult<Vec<(String, Vec<String>)>> {
        let a = analyze_side(&self.inst, side(side_name)?, qid_core::tolerance::DECISION).map_err(err)?;
        Ok(a.catalogue
            .entries()
            .iter()
            .map(|e| (e.codeword.clone(), e.class.members.iter().map(Message::bits).collect()))
            .collect())
    }

    /// Proxy complexity per message, indexed by message.
    fn profile(&self, side_name: &str) -> PyResult<Vec<usize>> {
        let a = analyze_side(&self.inst, side(side_name)?, qid_core::tolerance::DECISION).map_err(err)?;
        Ok(a.profile.lengths)
    }

    /// Full trade-off report as JSON. Needs a channel built from an attack.
    #[pyo3(signature = (c_offset=0))]
    fn verify(&self, c_offset: i32) -> PyResult<String> {
        let spec = self
            .spec
            .ok_or_else(|| QidError::new_err("verify needs a channel built with Channel.attack"))?;
        let opts = VerifyOptions {
            c_offset,
            ..VerifyOptions::default()
        };
        let report = tradeoff::verify_tradeoff(&self.inst, &spec, &opts).map_err(err)?;
        to_report_json(&report).map_err(err)
    }
}

#[pyfunction]
#[pyo3(signature = (l, m, n, c_offset=0))]
fn tradeoff_bound(l: usize, m: usize, n: usize, c_offset: i32) -> f64 {
    tradeoff::tradeoff_bound(l, m, n, c_offset)
}

#[pyfunction]
#[pyo3(signature = (l, m, n, c_offset=0))]
fn theorem_bound(l: usize, m: usize, n: usize, c_offset: i32) -> f64 {
    tradeoff::theorem_bound(l, m, n, c_offset)
}

#[pyfunction]
fn conjugate_overlap_norm(x: &str, z: &str) -> PyResult<f64> {
    let x = Message::from_bits(x).map_err(err)?;
    let z = Message::from_bits(z).map_err(err)?;
    tradeoff::conjugate_overlap_norm(x, z, x.n()).map_err(err)
}

#[pyfunction]
fn mutual_information(table: Vec<Vec<f64>>) -> PyResult<f64> {
    tradeoff::mutual_information(&table).map_err(err)
}

/// `(lhs, rhs, holds)` for a projector family and a state.
#[pyfunction]
fn landau_pollak(projectors: Vec<Rows>, rho: Rows) -> PyResult<(f64, f64, bool)> {
    let rho = from_rows(rho)?;
    let dims = qubit_dims(rho.rows());
    let family = projectors
        .into_iter()
        .map(|p| Projector::new(from_rows(p)?, dims.clone()).map_err(err))
        .collect::<PyResult<Vec<_>>>()?;
    let rho = DensityOperator::new(rho, dims).map_err(err)?;
    let out = tradeoff::landau_pollak_check(&family, &rho).map_err(err)?;
    Ok((out.lhs, out.rhs, out.holds))
}

/// `(avg_sum, count_sum, theorem_bound, pre_constant_bound)` for the
/// synthetic profile at length `n`.
#[pyfunction]
fn average_versus_counting(n: usize) -> PyResult<(f64, u64, f64, f64)> {
    let r = tradeoff::average_versus_counting(n).map_err(err)?;
    Ok((r.avg_sum, r.count_sum, r.theorem_bound, r.pre_constant_bound))
}

/// Runs a JSON config; returns `(exit_code, summary_json)`.
#[pyfunction]
#[pyo3(signature = (config_json, out_dir=None))]
fn run_experiment(config_json: &str, out_dir: Option<std::path::PathBuf>) -> PyResult<(i32, String)> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(err)?;
    let outcome = core_run(&cfg, out_dir.as_deref()).map_err(err)?;
    Ok((outcome.exit_code, to_report_json(&outcome.summary).map_err(err)?))
}

#[pyfunction]
fn attack_kinds() -> Vec<&'static str> {
    AttackSpec::library().iter().map(AttackSpec::kind).collect()
}

#[pymodule]
fn qid(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("QidError", m.py().get_type::<QidError>())?;
    m.add("CapacityError", m.py().get_type::<CapacityError>())?;
    m.add_class::<PyChannel>()?;
    m.add_class::<PyProtocol>()?;
    m.add_function(wrap_pyfunction!(tradeoff_bound, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_bound, m)?)?;
    m.add_function(wrap_pyfunction!(conjugate_overlap_norm, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(landau_pollak, m)?)?;
    m.add_function(wrap_pyfunction!(average_versus_counting, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(attack_kinds, m)?)?;
    Ok(())
}
