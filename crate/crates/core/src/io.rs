//! File formats.
//!
//! JSON is written compactly with fixed field order and every float printed
//! with 17 significant digits, so identical inputs give byte-identical files.
//! Complex numbers are `[re, im]` pairs everywhere.

use std::io::{self, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::model::{Block, ModelSpace};
use crate::operator::{AntiLinearOperator, JacobiParameters, Termination};
use crate::poly::ComplexPolynomial;
use crate::spectral::{NodeClass, SpectralData};
use crate::C64;

/// JSON formatter printing floats as `d.ddddddddddddddddE±x`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", format_float(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Negative zero prints as zero so that sign noise never changes the bytes.
pub fn format_float(value: f64) -> String {
    let value = if value == 0.0 { 0.0 } else { value };
    format!("{value:.16e}")
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// `{"matrix": [[[re, im], …], …]}`, plus `"cyclic"` when the cyclic vector
/// is not `e₀`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub matrix: Vec<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclic: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Block>>,
}

impl OperatorFile {
    pub fn from_operator(op: &AntiLinearOperator) -> Self {
        let m = op.matrix();
        let matrix = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect();
        let cyclic = (!op.cyclic_is_origin()).then(|| op.cyclic().iter().copied().collect());
        Self { matrix, cyclic, blocks: None }
    }

    pub fn from_model(op: &AntiLinearOperator, space: &ModelSpace) -> Self {
        Self { blocks: Some(space.blocks.clone()), ..Self::from_operator(op) }
    }

    pub fn to_operator(&self) -> Result<AntiLinearOperator> {
        let n = self.matrix.len();
        if let Some(row) = self.matrix.iter().find(|row| row.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: row.len() });
        }
        let matrix = DMatrix::from_fn(n, n, |i, j| self.matrix[i][j]);
        match &self.cyclic {
            None => AntiLinearOperator::new(matrix),
            Some(v) => AntiLinearOperator::with_cyclic(matrix, DVector::from_column_slice(v)),
        }
    }
}

/// `{"a": [...], "b": [[re, im], ...]}` with optional run metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiFile {
    pub a: Vec<f64>,
    pub b: Vec<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<Termination>,
    /// Deviation from an independent route to the same parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<f64>,
}

impl JacobiFile {
    pub fn new(params: &JacobiParameters, termination: Option<Termination>) -> Self {
        Self {
            a: params.a.clone(),
            b: params.b.clone(),
            count: Some(params.len()),
            termination,
            cross_check: None,
        }
    }

    pub fn params(&self) -> Result<JacobiParameters> {
        JacobiParameters::new(self.a.clone(), self.b.clone())
    }
}

/// Array of polynomials, each an array of `[re, im]` coefficients.
pub type PolynomialBatch = Vec<ComplexPolynomial>;

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Columns `s, w, re_psi, im_psi, class`.
pub fn write_spectral_csv<W: Write>(out: W, data: &SpectralData, tol_phase: f64) -> Result<()> {
    let classes = data.classify(tol_phase);
    let mut w = csv_writer(out);
    w.write_record(["s", "w", "re_psi", "im_psi", "class"])?;
    for j in 0..data.len() {
        let psi = data.phases[j];
        w.write_record([
            format_float(data.nodes[j]),
            format_float(data.weights[j]),
            format_float(psi.re),
            format_float(psi.im),
            NodeClass::label(classes[j]).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `s, density`.
pub fn write_density_csv<W: Write>(out: W, curve: &[(f64, f64)]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["s", "density"])?;
    for &(s, d) in curve {
        w.write_record([format_float(s), format_float(d)])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `s, re_psi, im_psi`.
pub fn write_phase_csv<W: Write>(out: W, curve: &[(f64, C64)]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["s", "re_psi", "im_psi"])?;
    for &(s, psi) in curve {
        w.write_record([format_float(s), format_float(psi.re), format_float(psi.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// One line of a coefficient table with the deviation from reference values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub n: usize,
    /// `a_n`; absent for the last diagonal entry.
    pub a: Option<f64>,
    pub b: C64,
    pub error: f64,
}

/// Columns `n, a_n, re_b_n, im_b_n, abs_error`; `a_n` is empty when absent.
pub fn write_coefficient_csv<W: Write>(out: W, rows: &[CoefficientRow]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["n", "a_n", "re_b_n", "im_b_n", "abs_error"])?;
    for row in rows {
        w.write_record([
            row.n.to_string(),
            row.a.map(format_float).unwrap_or_default(),
            format_float(row.b.re),
            format_float(row.b.im),
            format_float(row.error),
        ])?;
    }
    w.flush()?;
    Ok(())
}
