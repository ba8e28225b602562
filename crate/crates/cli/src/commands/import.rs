use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use xyz_core::{PackedMatrix, RealMatrix};

use crate::dataset::Dataset;
use crate::error::{CliError, CliResult};
use crate::table::read_columns;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Binary,
    Real,
}

#[derive(Args, Debug, Serialize)]
pub struct ImportArgs {
    /// CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Dataset file to write.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "real")]
    pub kind: Kind,
    /// Binary input given as 0/1; stored as -1/+1.
    #[arg(long)]
    pub zero_one: bool,
}

pub fn build(args: &ImportArgs) -> CliResult<Dataset> {
    let (_, cols) = read_columns(&args.input)?;
    match args.kind {
        Kind::Real => {
            if args.zero_one {
                return Err(CliError::Usage("--zero-one applies to binary data only".into()));
            }
            Ok(Dataset::Real(RealMatrix::from_columns(&cols)?))
        }
        Kind::Binary => {
            let (neg, pos) = if args.zero_one { (0.0, 1.0) } else { (-1.0, 1.0) };
            let mut signs = Vec::with_capacity(cols.len());
            for (j, col) in cols.iter().enumerate() {
                let mut out = Vec::with_capacity(col.len());
                for (i, &v) in col.iter().enumerate() {
                    out.push(if v == pos {
                        1i8
                    } else if v == neg {
                        -1
                    } else {
                        return Err(CliError::Data(format!(
                            "row {}, column {}: {v} is not {neg} or {pos}",
                            i + 1,
                            j + 1
                        )));
                    });
                }
                signs.push(out);
            }
            Ok(Dataset::Binary(PackedMatrix::from_columns(&signs)?))
        }
    }
}

pub fn summary(d: &Dataset) -> String {
    let (n, p) = (d.n_rows(), d.n_cols());
    match d {
        Dataset::Binary(x) => {
            let ones: u64 = x.words().iter().map(|w| u64::from(w.count_ones())).sum();
            format!("binary n={n} p={p} fraction_plus_one={:.4}", ones as f64 / (n * p) as f64)
        }
        Dataset::Real(x) => {
            let v = x.as_slice();
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            format!("real n={n} p={p} min={min} max={max} mean={mean:.6}")
        }
    }
}

pub fn run(args: &ImportArgs) -> CliResult<()> {
    let d = build(args)?;
    d.write(&args.output)?;
    println!("{}", summary(&d));
    Ok(())
}
