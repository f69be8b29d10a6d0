//! CSV data files: a header row of variable names, then one sample per row.
//! Lines starting with `#` are comments.

use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;

pub fn read_csv(path: &Path) -> Result<(Vec<String>, DMatrix<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for field in rec.iter() {
            let v: f64 = field
                .parse()
                .with_context(|| format!("row {}: `{field}` is not a number", i + 1))?;
            values.push(v);
        }
        rows += 1;
    }
    if names.is_empty() || rows == 0 {
        bail!("{} has no data", path.display());
    }
    Ok((
        names.clone(),
        DMatrix::from_row_slice(rows, names.len(), &values),
    ))
}

pub fn write_matrix(out: &mut String, names: &[String], m: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(names)?;
    for r in 0..m.nrows() {
        w.write_record((0..m.ncols()).map(|c| format!("{}", m[(r, c)])))?;
    }
    out.push_str(std::str::from_utf8(&w.into_inner()?)?);
    Ok(())
}
