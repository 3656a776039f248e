//! Parsing of poset and matrix arguments.

use std::io::Read;

use gridposet::matrix::{j_matrix, pattern_family_of, BinaryMatrix, PatternFamily};
use gridposet::{Error, Poset};

pub fn read_text(path: &str) -> Result<String, Error> {
    let mut s = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| s = t)
    };
    res.map_err(|e| Error::Precondition(format!("cannot read `{path}`: {e}")))?;
    Ok(s)
}

/// A builtin `name:p`, or else a cover-relation file.
pub fn poset(spec: &str) -> Result<Poset, Error> {
    match Poset::builtin(spec) {
        Err(Error::UnknownBuiltin(_)) if std::path::Path::new(spec).is_file() => Poset::parse_covers(&read_text(spec)?),
        other => other,
    }
}

pub fn matrix(spec: &str) -> Result<BinaryMatrix, Error> {
    match spec.strip_prefix("rows:") {
        Some(rows) => rows.replace('/', "\n").parse(),
        None => read_text(spec)?.parse(),
    }
}

/// All patterns named by the arguments, merged and deduplicated.
pub fn pattern_family(specs: &[String]) -> Result<PatternFamily, Error> {
    let mut all = Vec::new();
    for spec in specs {
        if let Some(s) = spec.strip_prefix("J:") {
            let s: usize = s.parse().map_err(|_| Error::InvalidMatrix(format!("bad size in `{spec}`")))?;
            all.push(j_matrix(s)?);
        } else if let Some(p) = spec.strip_prefix("poset:") {
            all.extend(pattern_family_of(&poset(p)?)?.matrices().cloned());
        } else {
            all.push(matrix(spec)?);
        }
    }
    PatternFamily::new(all)
}
