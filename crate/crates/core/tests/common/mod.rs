#![allow(dead_code)]

use qid_core::channel::{isometry_to_channel, OutputLayout, QuantumChannel};
use qid_core::linalg::{ComplexMatrix, C64};

/// Two-qubit channel that hands the first qubit to Bob and the second to
/// Eve, padding each with `|0>`: `|a b> -> |a 0>_B |0 b>_E`. Both receivers
/// end up with nontrivial catalogues, unlike the per-qubit library attacks.
pub fn split_channel() -> QuantumChannel {
    let mut v = ComplexMatrix::zeros(16, 4);
    for a in 0..2 {
        for b in 0..2 {
            // B = (a, 0), E = (0, b)
            let row = (a * 2) * 4 + b;
            v[(row, a * 2 + b)] = C64::new(1.0, 0.0);
        }
    }
    isometry_to_channel(
        "split",
        &v,
        vec![2, 2],
        OutputLayout {
            b: vec![2, 2],
            e: vec![2, 2],
            traced: vec![],
        },
    )
    .expect("split channel is an isometry")
}
