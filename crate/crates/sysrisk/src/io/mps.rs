//! Free-format MPS export of the rewiring MILP, plus a reader that parses
//! such files back for interoperability checks.
//!
//! Naming is deterministic: the objective row is `obj`, constraint rows are
//! `r_a1_<k>`, `r_a2_<i>`, `r_a3_<i>`, `r_a4_<i>`, columns are `y_<k>` and
//! `d_<k>`. Numbers are rendered with 17 significant digits, so values
//! survive a write/parse cycle bit-exactly. Binaries that presolve fixed
//! through their bounds are emitted as fixed continuous columns; only free
//! binaries sit inside the INTORG/INTEND marker block.

use crate::model::{MilpProblem, RowSense, SparseBlock};
use crate::{Error, Result};
use std::collections::HashMap;
use std::fmt::Write as _;

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Render the problem as a free-format MPS document.
pub fn export_mps(problem: &MilpProblem) -> String {
    let n = problem.n_banks;
    let p = n * n;
    let mut out = String::new();
    let _ = writeln!(out, "* sysrisk rewiring MILP, {n} banks");
    let _ = writeln!(
        out,
        "* direction: {}",
        match problem.direction {
            crate::model::Direction::Minimize => "minimize",
            crate::model::Direction::Maximize => "maximize",
        }
    );
    let _ = writeln!(out, "NAME sysrisk_milp_n{n}");

    let _ = writeln!(out, "ROWS");
    let _ = writeln!(out, " N obj");
    for k in 0..4 * p {
        let _ = writeln!(out, " L r_a1_{k}");
    }
    for i in 0..n {
        let _ = writeln!(out, " E r_a2_{i}");
    }
    for i in 0..n {
        let _ = writeln!(out, " E r_a3_{i}");
    }
    let risk_tag = match problem.risk_sense {
        crate::model::RiskSense::Equality => 'E',
        crate::model::RiskSense::GreaterEqual => 'G',
    };
    for i in 0..n {
        let _ = writeln!(out, " {risk_tag} r_a4_{i}");
    }

    // Column-major views of the blocks.
    let mut col_entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); 4 * p];
    let mut add_block = |block: &SparseBlock, prefix: &str| {
        let mut sorted = block.entries.clone();
        sorted.sort_by_key(|&(r, c, _)| (c, r));
        for (r, c, v) in sorted {
            col_entries[c].push((format!("{prefix}{r}"), v));
        }
    };
    add_block(&problem.a1, "r_a1_");
    add_block(&problem.a2, "r_a2_");
    add_block(&problem.a3, "r_a3_");
    add_block(&problem.a4, "r_a4_");

    let col_name = |j: usize| {
        if j < 2 * p {
            format!("y_{j}")
        } else {
            format!("d_{}", j - 2 * p)
        }
    };

    let _ = writeln!(out, "COLUMNS");
    let write_col = |out: &mut String, j: usize| {
        let name = col_name(j);
        if problem.c[j] != 0.0 {
            let _ = writeln!(out, "    {name} obj {}", fmt_f64(problem.c[j]));
        }
        for (row, v) in &col_entries[j] {
            let _ = writeln!(out, "    {name} {row} {}", fmt_f64(*v));
        }
    };
    for j in 0..2 * p {
        write_col(&mut out, j);
    }
    let free_binary = |j: usize| problem.integer[j] && problem.lower[j] < problem.upper[j];
    let _ = writeln!(out, "    M1 'MARKER' 'INTORG'");
    for j in 2 * p..4 * p {
        if free_binary(j) {
            write_col(&mut out, j);
        }
    }
    let _ = writeln!(out, "    M2 'MARKER' 'INTEND'");
    for j in 2 * p..4 * p {
        if !free_binary(j) {
            write_col(&mut out, j);
        }
    }

    let _ = writeln!(out, "RHS");
    for (i, &v) in problem.rhs_assets.iter().enumerate() {
        if v != 0.0 {
            let _ = writeln!(out, "    RHS r_a2_{i} {}", fmt_f64(v));
        }
    }
    for (i, &v) in problem.rhs_liabilities.iter().enumerate() {
        if v != 0.0 {
            let _ = writeln!(out, "    RHS r_a3_{i} {}", fmt_f64(v));
        }
    }
    for (i, &v) in problem.rhs_risk.iter().enumerate() {
        if v != 0.0 {
            let _ = writeln!(out, "    RHS r_a4_{i} {}", fmt_f64(v));
        }
    }

    let _ = writeln!(out, "BOUNDS");
    for j in 0..4 * p {
        let name = col_name(j);
        if problem.lower[j] == problem.upper[j] {
            let _ = writeln!(out, " FX BND {name} {}", fmt_f64(problem.lower[j]));
        } else {
            if problem.lower[j] != 0.0 {
                let _ = writeln!(out, " LO BND {name} {}", fmt_f64(problem.lower[j]));
            }
            let _ = writeln!(out, " UP BND {name} {}", fmt_f64(problem.upper[j]));
        }
    }
    let _ = writeln!(out, "ENDATA");
    out
}

/// Parsed content of an MPS file, in generic form.
#[derive(Debug, Clone, Default)]
pub struct MpsFile {
    pub name: String,
    /// Constraint rows in declaration order (objective row excluded).
    pub rows: Vec<(String, RowSense)>,
    pub objective_row: String,
    /// Objective coefficients by column name.
    pub objective: HashMap<String, f64>,
    /// Constraint coefficients by (row, column).
    pub entries: HashMap<(String, String), f64>,
    /// Columns in first-appearance order.
    pub columns: Vec<String>,
    pub rhs: HashMap<String, f64>,
    /// (lower, upper) by column; defaults to (0, +inf).
    pub bounds: HashMap<String, (f64, f64)>,
    /// Columns declared inside INTORG/INTEND markers.
    pub integers: Vec<String>,
}

/// Parse a free-format MPS document.
pub fn parse_mps(text: &str) -> Result<MpsFile> {
    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Rows,
        Columns,
        Rhs,
        Bounds,
        Done,
    }
    let mut file = MpsFile::default();
    let mut section = Section::Preamble;
    let mut in_integers = false;
    let mut seen_cols: HashMap<String, ()> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('*') {
            continue;
        }
        let starts_at_margin = !raw.starts_with(' ') && !raw.starts_with('\t');
        let fields: Vec<&str> = line.split_whitespace().collect();
        if starts_at_margin {
            match fields[0] {
                "NAME" => {
                    file.name = fields.get(1).unwrap_or(&"").to_string();
                    continue;
                }
                "ROWS" => {
                    section = Section::Rows;
                    continue;
                }
                "COLUMNS" => {
                    section = Section::Columns;
                    continue;
                }
                "RHS" => {
                    section = Section::Rhs;
                    continue;
                }
                "BOUNDS" => {
                    section = Section::Bounds;
                    continue;
                }
                "RANGES" => {
                    return Err(parse_err(line_no, "RANGES sections are not supported"));
                }
                "ENDATA" => {
                    section = Section::Done;
                    continue;
                }
                other => return Err(parse_err(line_no, format!("unknown section {other:?}"))),
            }
        }
        match section {
            Section::Rows => {
                if fields.len() != 2 {
                    return Err(parse_err(line_no, "ROWS lines need a type and a name"));
                }
                let name = fields[1].to_string();
                match fields[0] {
                    "N" => file.objective_row = name,
                    "L" => file.rows.push((name, RowSense::LessEqual)),
                    "E" => file.rows.push((name, RowSense::Equal)),
                    "G" => file.rows.push((name, RowSense::GreaterEqual)),
                    other => {
                        return Err(parse_err(line_no, format!("unknown row type {other:?}")))
                    }
                }
            }
            Section::Columns => {
                if fields.len() >= 3 && fields[1] == "'MARKER'" {
                    match fields[2] {
                        "'INTORG'" => in_integers = true,
                        "'INTEND'" => in_integers = false,
                        other => {
                            return Err(parse_err(line_no, format!("unknown marker {other:?}")))
                        }
                    }
                    continue;
                }
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(parse_err(
                        line_no,
                        "COLUMNS lines need a column then row/value pairs",
                    ));
                }
                let col = fields[0].to_string();
                if seen_cols.insert(col.clone(), ()).is_none() {
                    file.columns.push(col.clone());
                    if in_integers {
                        file.integers.push(col.clone());
                    }
                }
                for pair in fields[1..].chunks(2) {
                    let row = pair[0].to_string();
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad number {:?}", pair[1])))?;
                    if row == file.objective_row {
                        if file.objective.insert(col.clone(), value).is_some() {
                            return Err(parse_err(line_no, "duplicate objective entry"));
                        }
                    } else if file
                        .entries
                        .insert((row.clone(), col.clone()), value)
                        .is_some()
                    {
                        return Err(parse_err(
                            line_no,
                            format!("duplicate entry for ({row}, {col})"),
                        ));
                    }
                }
            }
            Section::Rhs => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(parse_err(line_no, "RHS lines need a set name then pairs"));
                }
                for pair in fields[1..].chunks(2) {
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad number {:?}", pair[1])))?;
                    file.rhs.insert(pair[0].to_string(), value);
                }
            }
            Section::Bounds => {
                if fields.len() < 4 {
                    return Err(parse_err(
                        line_no,
                        "BOUNDS lines need type, set, column, value",
                    ));
                }
                let value: f64 = fields[3]
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad number {:?}", fields[3])))?;
                let col = fields[2].to_string();
                let entry = file.bounds.entry(col).or_insert((0.0, f64::INFINITY));
                match fields[0] {
                    "UP" => entry.1 = value,
                    "LO" => entry.0 = value,
                    "FX" => *entry = (value, value),
                    other => {
                        return Err(parse_err(line_no, format!("unknown bound type {other:?}")))
                    }
                }
            }
            Section::Preamble | Section::Done => {
                return Err(parse_err(line_no, "data outside of any section"));
            }
        }
    }
    Ok(file)
}

/// View of a [`MilpProblem`] in the same generic shape as a parsed file,
/// for exact comparison in round-trip checks.
pub fn problem_as_mps_view(problem: &MilpProblem) -> MpsFile {
    let n = problem.n_banks;
    let p = n * n;
    let mut file = MpsFile {
        name: format!("sysrisk_milp_n{n}"),
        objective_row: "obj".into(),
        ..Default::default()
    };
    for k in 0..4 * p {
        file.rows.push((format!("r_a1_{k}"), RowSense::LessEqual));
    }
    for i in 0..n {
        file.rows.push((format!("r_a2_{i}"), RowSense::Equal));
    }
    for i in 0..n {
        file.rows.push((format!("r_a3_{i}"), RowSense::Equal));
    }
    let risk_sense = match problem.risk_sense {
        crate::model::RiskSense::Equality => RowSense::Equal,
        crate::model::RiskSense::GreaterEqual => RowSense::GreaterEqual,
    };
    for i in 0..n {
        file.rows.push((format!("r_a4_{i}"), risk_sense));
    }
    let col_name = |j: usize| {
        if j < 2 * p {
            format!("y_{j}")
        } else {
            format!("d_{}", j - 2 * p)
        }
    };
    for j in 0..4 * p {
        if problem.c[j] != 0.0 {
            file.objective.insert(col_name(j), problem.c[j]);
        }
        file.bounds
            .insert(col_name(j), (problem.lower[j], problem.upper[j]));
        if problem.integer[j] && problem.lower[j] < problem.upper[j] {
            file.integers.push(col_name(j));
        }
    }
    let mut add = |block: &SparseBlock, prefix: &str| {
        for &(r, c, v) in &block.entries {
            file.entries.insert((format!("{prefix}{r}"), col_name(c)), v);
        }
    };
    add(&problem.a1, "r_a1_");
    add(&problem.a2, "r_a2_");
    add(&problem.a3, "r_a3_");
    add(&problem.a4, "r_a4_");
    for (i, &v) in problem.rhs_assets.iter().enumerate() {
        if v != 0.0 {
            file.rhs.insert(format!("r_a2_{i}"), v);
        }
    }
    for (i, &v) in problem.rhs_liabilities.iter().enumerate() {
        if v != 0.0 {
            file.rhs.insert(format!("r_a3_{i}"), v);
        }
    }
    for (i, &v) in problem.rhs_risk.iter().enumerate() {
        if v != 0.0 {
            file.rhs.insert(format!("r_a4_{i}"), v);
        }
    }
    file
}

/// Compare two MPS views field by field; returns the first difference.
pub fn mps_difference(a: &MpsFile, b: &MpsFile) -> Option<String> {
    if a.name != b.name {
        return Some(format!("name: {} vs {}", a.name, b.name));
    }
    if a.rows != b.rows {
        return Some("row set or senses differ".into());
    }
    if a.objective != b.objective {
        return Some("objective coefficients differ".into());
    }
    if a.entries != b.entries {
        return Some("constraint entries differ".into());
    }
    if a.rhs != b.rhs {
        return Some("rhs differs".into());
    }
    // Bounds: compare over the union of columns (absent means default).
    let cols: std::collections::HashSet<&String> =
        a.bounds.keys().chain(b.bounds.keys()).collect();
    for col in cols {
        let da = a.bounds.get(col).copied().unwrap_or((0.0, f64::INFINITY));
        let db = b.bounds.get(col).copied().unwrap_or((0.0, f64::INFINITY));
        if da != db {
            return Some(format!("bounds for {col}: {da:?} vs {db:?}"));
        }
    }
    let mut ia = a.integers.clone();
    let mut ib = b.integers.clone();
    ia.sort();
    ib.sort();
    if ia != ib {
        return Some("integer column sets differ".into());
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SquareMatrix;
    use crate::model::{build_problem, presolve, Direction, RiskSense};
    use crate::network::BankingSystem;

    fn sample_problem() -> MilpProblem {
        let l = SquareMatrix::from_nested(&[&[0.0, 12.0, 1.0], &[2.0, 0.0, 9.0], &[7.0, 4.0, 0.0]])
            .unwrap();
        let sys = BankingSystem::with_default_ids(vec![3.0, 5.0, 4.0], l).unwrap();
        presolve(&build_problem(&sys, Direction::Minimize, RiskSense::Equality))
    }

    #[test]
    fn round_trip_bit_exact() {
        let problem = sample_problem();
        let text = export_mps(&problem);
        let parsed = parse_mps(&text).unwrap();
        let expected = problem_as_mps_view(&problem);
        assert_eq!(mps_difference(&parsed, &expected), None);
    }

    #[test]
    fn intorg_block_counts_free_binaries() {
        let problem = sample_problem();
        let text = export_mps(&problem);
        let parsed = parse_mps(&text).unwrap();
        let free = (0..problem.n_vars())
            .filter(|&j| problem.integer[j] && problem.lower[j] < problem.upper[j])
            .count();
        assert_eq!(parsed.integers.len(), free);
        assert_eq!(free, 2 * problem.n_entries() - problem.fixed_binaries - 2 * 3);
        // (two binaries per diagonal entry are fixed at build time)
    }

    #[test]
    fn degenerate_single_bank_file_is_valid() {
        let sys = BankingSystem::with_default_ids(vec![1.0], SquareMatrix::zeros(1)).unwrap();
        let problem = build_problem(&sys, Direction::Minimize, RiskSense::Equality);
        let text = export_mps(&problem);
        let parsed = parse_mps(&text).unwrap();
        assert_eq!(mps_difference(&parsed, &problem_as_mps_view(&problem)), None);
        assert!(parsed.integers.is_empty());
    }

    #[test]
    fn greater_equal_risk_rows_round_trip() {
        let l = SquareMatrix::from_nested(&[&[0.0, 5.0], &[3.0, 0.0]]).unwrap();
        let sys = BankingSystem::with_kappa(
            vec!["a".into(), "b".into()],
            vec![10.0, 10.0],
            l,
            vec![2.0, 3.0],
        )
        .unwrap();
        let problem = build_problem(&sys, Direction::Maximize, RiskSense::GreaterEqual);
        let parsed = parse_mps(&export_mps(&problem)).unwrap();
        assert_eq!(mps_difference(&parsed, &problem_as_mps_view(&problem)), None);
        assert!(parsed
            .rows
            .iter()
            .any(|(name, sense)| name == "r_a4_0" && *sense == RowSense::GreaterEqual));
    }

    #[test]
    fn rejects_malformed_sections() {
        assert!(parse_mps("GARBAGE\n").is_err());
        assert!(parse_mps("ROWS\n N obj\nCOLUMNS\n    y_0 obj\n").is_err());
    }
}
