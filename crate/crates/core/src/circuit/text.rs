//! One gate per line: `H 0`, `RZ 0 -3.0`, `CNOT 0 1`, `U3 2 1.5 0.0 3.14`.
//! Blank lines and `#` comments are ignored. An optional `qubits N` header
//! fixes the width; otherwise it is inferred from the highest index used.

use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn write_circuit<T: Real>(c: &Circuit<T>) -> String {
    let mut s = format!("qubits {}\n", c.n_qubits());
    for g in c.gates() {
        let line = match *g {
            Gate::H(q) => format!("H {q}"),
            Gate::Rx(q, a) => format!("RX {q} {a:?}"),
            Gate::Rz(q, a) => format!("RZ {q} {a:?}"),
            Gate::U1(q, a) => format!("U1 {q} {a:?}"),
            Gate::U2 { qubit, phi, lambda } => format!("U2 {qubit} {phi:?} {lambda:?}"),
            Gate::U3 {
                qubit,
                theta,
                phi,
                lambda,
            } => format!("U3 {qubit} {theta:?} {phi:?} {lambda:?}"),
            Gate::Cnot { control, target } => format!("CNOT {control} {target}"),
            Gate::Swap(a, b) => format!("SWAP {a} {b}"),
        };
        let _ = writeln!(s, "{line}");
    }
    s
}

pub fn parse_circuit<T: Real>(text: &str) -> Result<Circuit<T>> {
    let mut width = None;
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let mut parts = line.split_whitespace();
        let op = parts.next().unwrap_or_default().to_ascii_uppercase();
        let args: Vec<&str> = parts.collect();
        let qubit = |i: usize| -> Result<usize> {
            args.get(i)
                .ok_or_else(|| err(format!("{op}: missing qubit")))?
                .parse()
                .map_err(|e| err(format!("{op}: {e}")))
        };
        let angle = |i: usize| -> Result<T> {
            let v: f64 = args
                .get(i)
                .ok_or_else(|| err(format!("{op}: missing angle")))?
                .parse()
                .map_err(|e| err(format!("{op}: {e}")))?;
            Ok(T::lit(v))
        };
        let expect_args = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(err(format!("{op}: expected {k} arguments, got {}", args.len())))
            }
        };
        let gate = match op.as_str() {
            "QUBITS" => {
                expect_args(1)?;
                width = Some(qubit(0)?);
                continue;
            }
            "H" => {
                expect_args(1)?;
                Gate::H(qubit(0)?)
            }
            "RX" => {
                expect_args(2)?;
                Gate::Rx(qubit(0)?, angle(1)?)
            }
            "RZ" => {
                expect_args(2)?;
                Gate::Rz(qubit(0)?, angle(1)?)
            }
            "U1" => {
                expect_args(2)?;
                Gate::U1(qubit(0)?, angle(1)?)
            }
            "U2" => {
                expect_args(3)?;
                Gate::U2 {
                    qubit: qubit(0)?,
                    phi: angle(1)?,
                    lambda: angle(2)?,
                }
            }
            "U3" => {
                expect_args(4)?;
                Gate::U3 {
                    qubit: qubit(0)?,
                    theta: angle(1)?,
                    phi: angle(2)?,
                    lambda: angle(3)?,
                }
            }
            "CNOT" | "CX" => {
                expect_args(2)?;
                Gate::Cnot {
                    control: qubit(0)?,
                    target: qubit(1)?,
                }
            }
            "SWAP" => {
                expect_args(2)?;
                Gate::Swap(qubit(0)?, qubit(1)?)
            }
            other => return Err(err(format!("unknown gate {other}"))),
        };
        gates.push((line_no, gate));
    }
    let inferred = gates
        .iter()
        .map(|(_, g)| {
            let (a, b) = g.qubits();
            a.max(b.unwrap_or(0)) + 1
        })
        .max()
        .unwrap_or(0);
    let n = width.unwrap_or(inferred);
    let mut c = Circuit::new(n);
    for (line, g) in gates {
        c.push(g).map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
    }
    Ok(c)
}
