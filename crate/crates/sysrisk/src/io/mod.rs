//! File formats: CSV network ingestion/serialization and MPS export.
//!
//! Two CSV files describe a network:
//!
//! * banks file, header `bank_id,equity[,total_assets,total_liabilities][,kappa]`
//!   — balance-sheet totals derive kappa through the leverage ratio; an
//!   explicit `kappa` column (written by [`write_network`] so that files
//!   round-trip exactly) takes precedence; with neither, kappa is 1.
//! * exposures file, header `debtor_id,creditor_id,amount` — amounts on
//!   duplicate (debtor, creditor) pairs are summed; self-loops and unknown
//!   ids are errors.

pub mod mps;

use crate::matrix::SquareMatrix;
use crate::network::{leverage_kappa, BankingSystem};
use crate::{Error, Result};
use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_amount(field: &str, line: u64, what: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from {field:?}")))
}

struct BankRows {
    ids: Vec<String>,
    equity: Vec<f64>,
    kappa: Vec<f64>,
}

fn parse_banks(reader: impl Read) -> Result<BankRows> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let id_col = col("bank_id").ok_or_else(|| parse_err(1, "missing bank_id column"))?;
    let equity_col = col("equity").ok_or_else(|| parse_err(1, "missing equity column"))?;
    let ta_col = col("total_assets");
    let tl_col = col("total_liabilities");
    let kappa_col = col("kappa");
    if ta_col.is_some() != tl_col.is_some() {
        return Err(parse_err(
            1,
            "total_assets and total_liabilities must appear together",
        ));
    }

    let mut ids = Vec::new();
    let mut equity = Vec::new();
    let mut total_assets = Vec::new();
    let mut total_liabilities = Vec::new();
    let mut kappa_explicit = Vec::new();
    for record in csv_reader.records() {
        let record = record.map_err(|e| parse_err(0, e.to_string()))?;
        let line = record_line(&record);
        let get = |idx: usize| {
            record
                .get(idx)
                .ok_or_else(|| parse_err(line, "row has too few fields"))
        };
        ids.push(get(id_col)?.to_string());
        equity.push(parse_amount(get(equity_col)?, line, "equity")?);
        if let (Some(ta), Some(tl)) = (ta_col, tl_col) {
            let ta_field = get(ta)?;
            let tl_field = get(tl)?;
            if !ta_field.is_empty() || !tl_field.is_empty() {
                total_assets.push(parse_amount(ta_field, line, "total_assets")?);
                total_liabilities.push(parse_amount(tl_field, line, "total_liabilities")?);
            }
        }
        if let Some(kc) = kappa_col {
            let field = get(kc)?;
            if !field.is_empty() {
                kappa_explicit.push(parse_amount(field, line, "kappa")?);
            }
        }
    }

    let n = ids.len();
    let kappa = if !kappa_explicit.is_empty() {
        if kappa_explicit.len() != n {
            return Err(parse_err(0, "kappa column must be filled for every bank"));
        }
        kappa_explicit
    } else if !total_assets.is_empty() {
        if total_assets.len() != n {
            return Err(parse_err(
                0,
                "balance-sheet totals must be filled for every bank",
            ));
        }
        leverage_kappa(&total_assets, &total_liabilities)?
    } else {
        vec![1.0; n]
    };
    Ok(BankRows { ids, equity, kappa })
}

fn parse_exposures(reader: impl Read, index: &HashMap<&str, usize>) -> Result<SquareMatrix> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let debtor_col = col("debtor_id").ok_or_else(|| parse_err(1, "missing debtor_id column"))?;
    let creditor_col =
        col("creditor_id").ok_or_else(|| parse_err(1, "missing creditor_id column"))?;
    let amount_col = col("amount").ok_or_else(|| parse_err(1, "missing amount column"))?;

    let mut liabilities = SquareMatrix::zeros(index.len());
    for record in csv_reader.records() {
        let record = record.map_err(|e| parse_err(0, e.to_string()))?;
        let line = record_line(&record);
        let get = |idx: usize| {
            record
                .get(idx)
                .ok_or_else(|| parse_err(line, "row has too few fields"))
        };
        let debtor = get(debtor_col)?;
        let creditor = get(creditor_col)?;
        let amount = parse_amount(get(amount_col)?, line, "amount")?;
        let &i = index
            .get(debtor)
            .ok_or_else(|| parse_err(line, format!("unknown debtor id {debtor:?}")))?;
        let &j = index
            .get(creditor)
            .ok_or_else(|| parse_err(line, format!("unknown creditor id {creditor:?}")))?;
        if i == j {
            return Err(parse_err(
                line,
                format!("self-loop on bank {debtor:?} is not allowed"),
            ));
        }
        liabilities.set(i, j, liabilities.get(i, j) + amount);
    }
    Ok(liabilities)
}

/// Parse a banking system from its banks and exposures CSV files.
pub fn parse_network(banks_path: &Path, exposures_path: &Path) -> Result<BankingSystem> {
    let banks_file = std::fs::File::open(banks_path)?;
    let banks = parse_banks(banks_file)?;
    let index: HashMap<&str, usize> = banks
        .ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    if index.len() != banks.ids.len() {
        return Err(Error::InvalidSystem("duplicate bank ids".into()));
    }
    let exposures_file = std::fs::File::open(exposures_path)?;
    let liabilities = parse_exposures(exposures_file, &index)?;
    BankingSystem::with_kappa(banks.ids, banks.equity, liabilities, banks.kappa)
}

/// Parse from in-memory CSV text (used by tests and the synth round trip).
pub fn parse_network_str(banks_csv: &str, exposures_csv: &str) -> Result<BankingSystem> {
    let banks = parse_banks(banks_csv.as_bytes())?;
    let index: HashMap<&str, usize> = banks
        .ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    if index.len() != banks.ids.len() {
        return Err(Error::InvalidSystem("duplicate bank ids".into()));
    }
    let liabilities = parse_exposures(exposures_csv.as_bytes(), &index)?;
    BankingSystem::with_kappa(banks.ids, banks.equity, liabilities, banks.kappa)
}

/// Render a system as (banks CSV, exposures CSV) that parse back identically.
pub fn write_network_strings(system: &BankingSystem) -> (String, String) {
    let uniform_kappa = system.kappa().iter().all(|&k| k == 1.0);
    let mut banks = String::new();
    if uniform_kappa {
        banks.push_str("bank_id,equity\n");
    } else {
        banks.push_str("bank_id,equity,kappa\n");
    }
    for i in 0..system.n() {
        if uniform_kappa {
            banks.push_str(&format!(
                "{},{:.16e}\n",
                system.bank_ids()[i],
                system.equity()[i]
            ));
        } else {
            banks.push_str(&format!(
                "{},{:.16e},{:.16e}\n",
                system.bank_ids()[i],
                system.equity()[i],
                system.kappa()[i]
            ));
        }
    }
    let mut exposures = String::from("debtor_id,creditor_id,amount\n");
    for i in 0..system.n() {
        for j in 0..system.n() {
            let v = system.liabilities().get(i, j);
            if v > 0.0 {
                exposures.push_str(&format!(
                    "{},{},{:.16e}\n",
                    system.bank_ids()[i],
                    system.bank_ids()[j],
                    v
                ));
            }
        }
    }
    (banks, exposures)
}

/// Write the two CSV files for a system.
pub fn write_network(
    system: &BankingSystem,
    banks_path: &Path,
    exposures_path: &Path,
) -> Result<()> {
    let (banks, exposures) = write_network_strings(system);
    std::fs::write(banks_path, banks)?;
    std::fs::write(exposures_path, exposures)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_bank_example() {
        let banks = "bank_id,equity\nA,10\nB,10\n";
        let exposures = "debtor_id,creditor_id,amount\nA,B,5\n";
        let sys = parse_network_str(banks, exposures).unwrap();
        assert_eq!(sys.n(), 2);
        assert_eq!(sys.liabilities().get(0, 1), 5.0);
        assert_eq!(sys.kappa(), &[1.0, 1.0]);
    }

    #[test]
    fn duplicate_exposure_rows_are_summed() {
        let banks = "bank_id,equity\nA,10\nB,10\n";
        let exposures = "debtor_id,creditor_id,amount\nA,B,2\nA,B,3\n";
        let sys = parse_network_str(banks, exposures).unwrap();
        assert_eq!(sys.liabilities().get(0, 1), 5.0);
    }

    #[test]
    fn self_loop_is_an_error() {
        let banks = "bank_id,equity\nA,10\nB,10\n";
        let exposures = "debtor_id,creditor_id,amount\nA,A,1\n";
        let err = parse_network_str(banks, exposures).unwrap_err();
        assert!(err.to_string().contains("self-loop"), "{err}");
    }

    #[test]
    fn unknown_id_is_an_error_with_line() {
        let banks = "bank_id,equity\nA,10\nB,10\n";
        let exposures = "debtor_id,creditor_id,amount\nA,B,1\nC,B,1\n";
        let err = parse_network_str(banks, exposures).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unknown debtor"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn malformed_amount_reports_line() {
        let banks = "bank_id,equity\nA,10\nB,10\n";
        let exposures = "debtor_id,creditor_id,amount\nA,B,notanumber\n";
        let err = parse_network_str(banks, exposures).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn leverage_kappa_from_balance_sheet_columns() {
        let banks = "bank_id,equity,total_assets,total_liabilities\nA,10,100,90\nB,10,100,0\n";
        let exposures = "debtor_id,creditor_id,amount\nA,B,5\n";
        let sys = parse_network_str(banks, exposures).unwrap();
        assert_eq!(sys.kappa(), &[10.0, 1.0]);
    }

    #[test]
    fn insolvent_balance_sheet_is_an_error() {
        let banks = "bank_id,equity,total_assets,total_liabilities\nA,10,100,100\nB,10,50,0\n";
        let exposures = "debtor_id,creditor_id,amount\n";
        assert!(parse_network_str(banks, exposures).is_err());
    }

    #[test]
    fn round_trip_identical() {
        let banks = "bank_id,equity,total_assets,total_liabilities\nA,10,100,90\nB,7.25,80,40\n";
        let exposures = "debtor_id,creditor_id,amount\nA,B,5.5\nB,A,0.125\n";
        let sys = parse_network_str(banks, exposures).unwrap();
        let (banks2, exposures2) = write_network_strings(&sys);
        let sys2 = parse_network_str(&banks2, &exposures2).unwrap();
        assert_eq!(sys, sys2);
    }
}
