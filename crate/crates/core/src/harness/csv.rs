use std::io::{Read, Write};

use super::ExperimentRecord;

pub const CSV_HEADER: &str =
    "algorithm,N,r,k,seed,trial,success,f_queries,g_queries,total_queries,table_space";

/// Writes a header row and one line per record, `\n`-terminated.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<(), ::csv::Error> {
    let mut writer = ::csv::WriterBuilder::new()
        .terminator(::csv::Terminator::Any(b'\n'))
        .from_writer(out);
    if records.is_empty() {
        writer.write_record(CSV_HEADER.split(','))?;
    }
    for rec in records {
        writer.serialize(rec)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ExperimentRecord>, ::csv::Error> {
    let mut reader = ::csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER.split(',').collect::<Vec<_>>() {
        return Err(::csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected CSV header: {}", headers.iter().collect::<Vec<_>>().join(",")),
        )));
    }
    reader.deserialize().collect()
}
