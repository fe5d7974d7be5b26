//! Matrix JSON interchange: `{"n": int, "re": [[..]], "im": [[..]]}`,
//! row-major. `im` may be omitted for real matrices. Numbers are written
//! with 17 significant digits so every f64 survives a round trip.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::{ComplexMatrix, C64};
use crate::error::{RadlabError, Result};

#[derive(Debug, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn into_matrix(self) -> Result<ComplexMatrix> {
        let n = self.n;
        check_rows(&self.re, n, "re")?;
        if let Some(im) = &self.im {
            check_rows(im, n, "im")?;
        }
        let rows: Vec<Vec<C64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
                        C64::new(self.re[i][j], im)
                    })
                    .collect()
            })
            .collect();
        ComplexMatrix::from_rows(&rows)
    }
}

fn check_rows(rows: &[Vec<f64>], n: usize, name: &str) -> Result<()> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(RadlabError::Parse(format!(
            "\"{name}\" must be an {n}x{n} array"
        )));
    }
    Ok(())
}

fn push_number(out: &mut String, x: f64) {
    // {:.16e} is 17 significant digits; serde_json reads the exponent form.
    write!(out, "{x:.16e}").unwrap();
}

fn push_block(out: &mut String, m: &ComplexMatrix, part: impl Fn(C64) -> f64) {
    let n = m.dim();
    out.push('[');
    for i in 0..n {
        if i > 0 {
            out.push_str(", ");
        }
        out.push('[');
        for j in 0..n {
            if j > 0 {
                out.push_str(", ");
            }
            push_number(out, part(m.get(i, j)));
        }
        out.push(']');
    }
    out.push(']');
}

impl ComplexMatrix {
    pub fn to_json_string(&self) -> String {
        let mut out = String::new();
        write!(out, "{{\"n\": {}, \"re\": ", self.dim()).unwrap();
        push_block(&mut out, self, |z| z.re);
        if self.as_dmatrix().iter().any(|z| z.im.to_bits() != 0) {
            out.push_str(", \"im\": ");
            push_block(&mut out, self, |z| z.im);
        }
        out.push('}');
        out
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let parsed: MatrixJson = serde_json::from_str(s)?;
        parsed.into_matrix()
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}
