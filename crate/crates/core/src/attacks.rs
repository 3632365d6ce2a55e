//! Named eavesdropping channels. Every attack acts independently on each
//! transmitted qubit; the `N`-qubit channel is the tensor power with outputs
//! regrouped as `B_1..B_N E_1..E_N`. Eve holds one qubit per transmitted
//! qubit in every attack, so `H_E` has dimension `2^N`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::channel::{isometry_to_channel, OutputLayout, QuantumChannel};
use crate::error::{Error, Result};
use crate::linalg::{tensor_vec, ComplexMatrix, C64};
use crate::protocol::MAX_N;

/// Attack kind plus its parameters. Serialized as
/// `{"kind": "depolarize", "params": {"p": 0.5}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum AttackSpec {
    /// Qubit forwarded untouched; Eve keeps `|0>`.
    Identity,
    /// Projective Z measurement; outcome state to Bob, outcome record to Eve.
    MeasureZ,
    /// Projective X measurement; outcome state to Bob, outcome record to Eve.
    MeasureX,
    /// CNOT from the transmitted qubit onto Eve's fresh `|0>` probe.
    CnotProbe,
    /// Symmetric universal 1 -> 2 cloner; Bob and Eve each get a clone.
    UniversalCloner,
    /// Depolarizing noise with probability `p` on the way to Bob.
    Depolarize { p: f64 },
    /// Intercept-resend in the basis at Bloch angle `theta` from Z.
    InterceptResendAngle { theta: f64 },
}

impl AttackSpec {
    /// One representative of each kind.
    pub fn library() -> Vec<AttackSpec> {
        vec![
            AttackSpec::Identity,
            AttackSpec::MeasureZ,
            AttackSpec::MeasureX,
            AttackSpec::CnotProbe,
            AttackSpec::UniversalCloner,
            AttackSpec::Depolarize { p: 0.5 },
            AttackSpec::InterceptResendAngle { theta: FRAC_PI_4 },
        ]
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AttackSpec::Identity => "identity",
            AttackSpec::MeasureZ => "measure_z",
            AttackSpec::MeasureX => "measure_x",
            AttackSpec::CnotProbe => "cnot_probe",
            AttackSpec::UniversalCloner => "universal_cloner",
            AttackSpec::Depolarize { .. } => "depolarize",
            AttackSpec::InterceptResendAngle { .. } => "intercept_resend_angle",
        }
    }

    /// File-name friendly label including parameters.
    pub fn slug(&self) -> String {
        match self {
            AttackSpec::Depolarize { p } => format!("depolarize_p{p}"),
            AttackSpec::InterceptResendAngle { theta } => {
                format!("intercept_resend_angle_theta{:.6}", theta)
            }
            other => other.kind().to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AttackSpec::Depolarize { p } if !(0.0..=1.0).contains(&p) => Err(
                Error::InvalidParameter(format!("depolarize probability {p} outside [0, 1]")),
            ),
            AttackSpec::InterceptResendAngle { theta } if !(0.0..=FRAC_PI_2).contains(&theta) => {
                Err(Error::InvalidParameter(format!(
                    "intercept-resend angle {theta} outside [0, pi/2]"
                )))
            }
            _ => Ok(()),
        }
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn ket(bit: usize) -> [C64; 2] {
    if bit == 0 {
        [c(1.0), c(0.0)]
    } else {
        [c(0.0), c(1.0)]
    }
}

/// `sum_k |out_k><in_k|` style operator `|b>_B |e>_E <a|` from vectors.
fn kraus_from(b: &[C64], e: &[C64], a: &[C64]) -> ComplexMatrix {
    ComplexMatrix::outer2(&tensor_vec(b, e), a)
}

/// Orthonormal measurement basis at Bloch angle `theta` from Z.
fn rotated_basis(theta: f64) -> [[C64; 2]; 2] {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co), c(s)], [c(-s), c(co)]]
}

fn measurement_kraus(basis: [[C64; 2]; 2]) -> Vec<ComplexMatrix> {
    (0..2)
        .map(|k| kraus_from(&basis[k], &ket(k), &basis[k]))
        .collect()
}

/// Bužek-Hillery cloner: `|0> -> sqrt(2/3)|00>|0> + sqrt(1/6)(|01>+|10>)|1>`,
/// `|1> -> sqrt(2/3)|11>|1> + sqrt(1/6)(|01>+|10>)|0>`, output order
/// `B E ancilla`.
fn cloner_isometry() -> ComplexMatrix {
    let a = (2.0f64 / 3.0).sqrt();
    let b = (1.0f64 / 6.0).sqrt();
    let mut v = ComplexMatrix::zeros(8, 2);
    let idx = |bq: usize, eq: usize, anc: usize| bq * 4 + eq * 2 + anc;
    v[(idx(0, 0, 0), 0)] = c(a);
    v[(idx(0, 1, 1), 0)] = c(b);
    v[(idx(1, 0, 1), 0)] = c(b);
    v[(idx(1, 1, 1), 1)] = c(a);
    v[(idx(0, 1, 0), 1)] = c(b);
    v[(idx(1, 0, 0), 1)] = c(b);
    v
}

fn single_qubit_channel(spec: &AttackSpec) -> Result<QuantumChannel> {
    let q = vec![2];
    let zero = ket(0);
    let z_basis = [ket(0), ket(1)];
    let kraus = match *spec {
        AttackSpec::Identity => vec![ComplexMatrix::from_fn(4, 2, |r, col| {
            if r == 2 * col {
                c(1.0)
            } else {
                c(0.0)
            }
        })],
        AttackSpec::MeasureZ => measurement_kraus(z_basis),
        AttackSpec::MeasureX => measurement_kraus(rotated_basis(FRAC_PI_2)),
        AttackSpec::CnotProbe => vec![
            kraus_from(&ket(0), &ket(0), &ket(0))
                .add(&kraus_from(&ket(1), &ket(1), &ket(1)))?,
        ],
        AttackSpec::UniversalCloner => {
            return isometry_to_channel(
                "universal_cloner",
                &cloner_isometry(),
                q.clone(),
                OutputLayout {
                    b: q.clone(),
                    e: q.clone(),
                    traced: q,
                },
            );
        }
        AttackSpec::Depolarize { p } => {
            let paulis = [
                ComplexMatrix::identity(2),
                ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
                ComplexMatrix::from_fn(2, 2, |r, col| match (r, col) {
                    (0, 1) => C64::new(0.0, -1.0),
                    (1, 0) => C64::new(0.0, 1.0),
                    _ => c(0.0),
                }),
                ComplexMatrix::real_diagonal(&[1.0, -1.0]),
            ];
            let weights = [1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p];
            let append = ComplexMatrix::from_fn(2, 1, |r, _| zero[r]);
            paulis
                .iter()
                .zip(weights)
                .filter(|(_, w)| *w > 0.0)
                .map(|(s, w)| {
                    // (sigma (x) |0>_E) scaled by sqrt(w)
                    Ok(s.kron(&append)?.scale_real(w.sqrt()))
                })
                .collect::<Result<Vec<_>>>()?
        }
        AttackSpec::InterceptResendAngle { theta } => measurement_kraus(rotated_basis(theta)),
    };
    QuantumChannel::new(spec.kind(), kraus, q.clone(), q.clone(), q)
}

/// Builds and validates the `n`-qubit channel for an attack.
pub fn make_attack(spec: &AttackSpec, n: usize) -> Result<QuantumChannel> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("attack needs n >= 1".into()));
    }
    if n > MAX_N {
        return Err(Error::Capacity(format!(
            "attack on N = {n} qubits exceeds the limit of {MAX_N}"
        )));
    }
    let single = single_qubit_channel(spec)?;
    Ok(single.tensor_power(n)?.with_name(spec.slug()))
}

/// Projective measurement in the computational basis of a `dim`-dimensional
/// space, as POVM elements.
pub fn computational_pvm(dim: usize) -> Vec<ComplexMatrix> {
    (0..dim)
        .map(|i| {
            let mut m = ComplexMatrix::zeros(dim, dim);
            m[(i, i)] = c(1.0);
            m
        })
        .collect()
}

/// Product X-basis measurement on `n` qubits.
pub fn conjugate_pvm(n: usize) -> Vec<ComplexMatrix> {
    crate::protocol::Message::all(n)
        .map(|m| ComplexMatrix::outer(&crate::protocol::encode(m, crate::protocol::Basis::X)))
        .collect()
}

/// Measurements Bob and Eve use in the Shannon-information check: Bob
/// always measures Z on his qubits; Eve reads her register in the
/// computational basis, except for the cloner where she measures her clone
/// in X.
pub fn natural_povms(spec: &AttackSpec, n: usize) -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
    let bob = computational_pvm(1 << n);
    let eve = match spec {
        AttackSpec::UniversalCloner => conjugate_pvm(n),
        _ => computational_pvm(1 << n),
    };
    (bob, eve)
}

/// First Breidbart basis vector, `cos(pi/8)|0> + sin(pi/8)|1>`.
pub fn breidbart_vector() -> [C64; 2] {
    rotated_basis(FRAC_PI_4)[0]
}
