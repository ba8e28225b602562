use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::CliResult;
use crate::table::{fmt_f64, sink, write_err};

#[derive(Args, Debug, Serialize)]
pub struct ExportArgs {
    /// Dataset file to read.
    #[arg(long)]
    pub input: PathBuf,
    /// CSV to write; stdout if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &ExportArgs) -> CliResult<()> {
    let d = Dataset::read(&args.input)?;
    let out = sink(args.output.as_ref())?;
    let mut w = csv::Writer::from_writer(out);
    let (n, p) = (d.n_rows(), d.n_cols());
    let err = |e: csv::Error| write_err(args.output.as_ref(), e.into());
    w.write_record((0..p).map(|j| format!("x{j}"))).map_err(err)?;
    let cols: Vec<Vec<f64>> = (0..p).map(|j| d.column_values(j)).collect();
    for i in 0..n {
        w.write_record(cols.iter().map(|c| match d {
            Dataset::Binary(_) => format!("{}", c[i] as i8),
            Dataset::Real(_) => fmt_f64(c[i]),
        }))
        .map_err(err)?;
    }
    w.flush().map_err(|e| write_err(args.output.as_ref(), e))?;
    Ok(())
}
