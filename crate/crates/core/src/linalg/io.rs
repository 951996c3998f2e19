//! Matrix CSV: one matrix row per line, each entry written as the two
//! adjacent columns `re,im`.

use std::io::{Read, Write};

use super::{CMatrix, C64};
use crate::error::{Error, Result};

pub fn read_matrix_csv(reader: impl Read) -> Result<CMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() % 2 != 0 {
            return Err(Error::Csv(format!(
                "row {line}: odd column count {} (entries are re,im pairs)",
                record.len()
            )));
        }
        let vals: Vec<f64> = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| Error::Csv(format!("row {line}: {f:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        rows.push(vals.chunks(2).map(|p| C64::new(p[0], p[1])).collect());
    }
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != rows[0].len()) {
        return Err(Error::Csv(format!(
            "row {i} has {} entries, expected {}",
            r.len(),
            rows[0].len()
        )));
    }
    let m = rows.first().map_or(0, Vec::len);
    Ok(CMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

pub fn write_matrix_csv(m: &CMatrix, writer: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .flat_map(|j| [m[(i, j)].re.to_string(), m[(i, j)].im.to_string()])
            .collect();
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}
