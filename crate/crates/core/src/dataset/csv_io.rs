use std::io::{Read, Write};
use std::path::Path;

use super::{CoPyrolysisRecord, ProductYields, RAW_INPUTS, RAW_INPUT_NAMES, YIELD_NAMES};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "id,biomass_c,biomass_h,biomass_n,biomass_s,biomass_o,biomass_vm,biomass_fc,biomass_ash,polymer_c,polymer_h,polymer_n,polymer_s,polymer_o,polymer_vm,polymer_fc,polymer_ash,blend_pct,temp_c,heat_rate_c_min,time_min,oil_yield,char_yield,syngas_yield";

fn csv_err(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
        _ => Error::Format(e.to_string()),
    }
}

fn parse_number(raw: &str, row: usize, column: &str) -> Result<f64> {
    let value: f64 = raw.trim().parse().map_err(|_| Error::MalformedNumber {
        row,
        column: column.to_string(),
        value: raw.to_string(),
    })?;
    if !value.is_finite() {
        return Err(Error::MalformedNumber {
            row,
            column: column.to_string(),
            value: raw.to_string(),
        });
    }
    Ok(value)
}

/// Every row of a CSV file: the records that passed and one error per
/// rejected row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvScan {
    pub records: Vec<CoPyrolysisRecord>,
    pub violations: Vec<Error>,
}

impl CsvScan {
    pub fn rows(&self) -> usize {
        self.records.len() + self.violations.len()
    }
}

/// Parse every row, collecting row-level violations instead of stopping at
/// the first. Header problems are still returned as errors.
pub fn scan_csv<R: Read>(source: R) -> Result<CsvScan> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::Headers)
        .from_reader(source);
    let headers = reader.headers().map_err(csv_err)?.clone();
    let column = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let id_col = column("id")?;
    let input_cols = RAW_INPUT_NAMES
        .iter()
        .map(|n| column(n))
        .collect::<Result<Vec<_>>>()?;
    let yield_cols = YIELD_NAMES
        .iter()
        .map(|n| column(n))
        .collect::<Result<Vec<_>>>()?;

    let parse_row = |row_no: usize, row: &csv::StringRecord| -> Result<CoPyrolysisRecord> {
        let cell = |c: usize| row.get(c).unwrap_or("");
        let mut inputs = [0.0; RAW_INPUTS];
        for (k, &c) in input_cols.iter().enumerate() {
            inputs[k] = parse_number(cell(c), row_no, RAW_INPUT_NAMES[k])?;
        }
        let yield_cells: Vec<&str> = yield_cols.iter().map(|&c| cell(c).trim()).collect();
        let yields = if yield_cells.iter().all(|s| s.is_empty()) {
            None
        } else {
            let mut y = [0.0; 3];
            for k in 0..3 {
                y[k] = parse_number(yield_cells[k], row_no, YIELD_NAMES[k])?;
            }
            Some(ProductYields::from_array(y))
        };
        let mut record = CoPyrolysisRecord::from_raw_inputs(cell(id_col), &inputs);
        record.yields = yields;
        record.validate(row_no)?;
        Ok(record)
    };

    let mut scan = CsvScan {
        records: Vec::new(),
        violations: Vec::new(),
    };
    for (i, row) in reader.records().enumerate() {
        let outcome = row
            .map_err(csv_err)
            .and_then(|row| parse_row(i + 1, &row));
        match outcome {
            Ok(r) => scan.records.push(r),
            Err(Error::Io(e)) => return Err(Error::Io(e)),
            Err(e) => scan.violations.push(e),
        }
    }
    Ok(scan)
}

/// Parse records from CSV, failing on the first bad row. Rows are numbered
/// from 1 (first data row) in errors.
pub fn load_csv<R: Read>(source: R) -> Result<Vec<CoPyrolysisRecord>> {
    let scan = scan_csv(source)?;
    if let Some(e) = scan.violations.into_iter().next() {
        return Err(e);
    }
    if scan.records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(scan.records)
}

pub fn load_csv_path(path: impl AsRef<Path>) -> Result<Vec<CoPyrolysisRecord>> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    load_csv(std::io::BufReader::new(file))
}

pub fn scan_csv_path(path: impl AsRef<Path>) -> Result<CsvScan> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    scan_csv(std::io::BufReader::new(file))
}

/// Write records using the canonical header. Numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(records: &[CoPyrolysisRecord], sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().from_writer(sink);
    writer
        .write_record(CSV_HEADER.split(','))
        .map_err(csv_err)?;
    for r in records {
        let mut fields = Vec::with_capacity(24);
        fields.push(r.id.clone());
        fields.extend(r.raw_inputs().iter().map(|v| v.to_string()));
        match r.yields {
            Some(y) => fields.extend(y.to_array().iter().map(|v| v.to_string())),
            None => fields.extend(std::iter::repeat_n(String::new(), 3)),
        }
        writer.write_record(&fields).map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}
