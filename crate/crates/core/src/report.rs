// SPDX-License-Identifier: Apache-2.0

//! Number formatting shared by CSV writers.

/// Round-trippable CSV cell: 17 significant digits in scientific notation,
/// `inf` for infinite budgets.
pub fn csv_float(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

/// Console value with six decimals; `inf` stays `inf`.
pub fn console_float(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.6}")
    }
}
