//! `tables`: machine-readable reproduction of the benchmark strategy tables.

use clap::Args;
use std::io::Write;
use std::path::Path;

use measure_change::scenarios::{self, ScenarioRow};

use super::{require_out, require_seed, write_json};
use crate::errors::CmdError;

#[derive(Args)]
pub struct TablesArgs {
    /// Original-sample count per case.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
}

const HEADER: &str = "table,case,original,updated,support,is_ess,augment_n_a,augment_n_star,filter_n_reject,filter_n_star,mixed_n_a_plus,mixed_n_star";

fn write_table(path: &Path, rows: &[ScenarioRow]) -> Result<(), CmdError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.table,
            r.case,
            r.original,
            r.updated,
            r.support,
            r.is_ess.render(),
            r.augment_n_a.render(),
            r.augment_n_star.render(),
            r.filter_n_reject.render(),
            r.filter_n_star.render(),
            r.mixed_n_a_plus.render(),
            r.mixed_n_star.render()
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: &TablesArgs, seed: Option<u64>, out: Option<&Path>) -> Result<(), CmdError> {
    let seed = require_seed(seed)?;
    let out = require_out(out)?;

    let mut table1 = Vec::new();
    let mut table2 = Vec::new();
    for sc in scenarios::all_cases() {
        let row = scenarios::emit_row(&sc, args.n, seed)?;
        if sc.table == 1 {
            table1.push(row);
        } else {
            table2.push(row);
        }
    }
    write_table(&out.join("table1.csv"), &table1)?;
    write_table(&out.join("table2.csv"), &table2)?;
    write_json(&out.join("table1.json"), &serde_json::to_value(&table1)?)?;
    write_json(&out.join("table2.json"), &serde_json::to_value(&table2)?)?;
    println!(
        "wrote {} + {} rows to {}",
        table1.len(),
        table2.len(),
        out.display()
    );
    Ok(())
}
