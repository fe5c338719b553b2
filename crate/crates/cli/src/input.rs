//! Loading networks, rate files, concentration vectors and faces.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use toric_crn::corpus::bundled_source;
use toric_crn::rates::parse_rational;
use toric_crn::{parse_network, ParsedNetwork, Rate, RateAssignment, ReactionNetwork};

use crate::CliError;

/// Reads a network from a path, falling back to the bundled example of the
/// same file name when the path does not exist.
pub fn load_network(arg: &str) -> Result<ParsedNetwork, CliError> {
    let path = Path::new(arg);
    let text = if path.exists() {
        fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{arg}: {e}")))?
    } else {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or(arg);
        bundled_source(name)
            .ok_or_else(|| CliError::Usage(format!("{arg}: no such file or bundled network")))?
            .to_string()
    };
    parse_network(&text).map_err(|e| CliError::Usage(format!("{arg}: {e}")))
}

/// Parses `i j value` lines (1-based complex indices, `#` comments) into
/// per-edge overrides.
pub fn parse_rates_file(net: &ReactionNetwork, text: &str) -> Result<Vec<(usize, Rate)>, CliError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| CliError::Usage(format!("rates line {}: {msg}", k + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [i, j, value] = fields[..] else {
            return Err(bad("expected `i j value`"));
        };
        let index = |t: &str| -> Result<usize, CliError> {
            match t.parse::<usize>() {
                Ok(x) if (1..=net.n()).contains(&x) => Ok(x - 1),
                _ => Err(bad(&format!("complex index `{t}` out of range 1..={}", net.n()))),
            }
        };
        let (i, j) = (index(i)?, index(j)?);
        let edge = net
            .edge_index(i, j)
            .ok_or_else(|| bad(&format!("no reaction {} -> {}", i + 1, j + 1)))?;
        if !seen.insert(edge) {
            return Err(bad(&format!("duplicate rate for {} -> {}", i + 1, j + 1)));
        }
        let rate = match parse_rational(value) {
            Some(q) => Rate::Exact(q),
            None => Rate::Float(value.parse::<f64>().map_err(|_| bad(&format!("bad rate `{value}`")))?),
        };
        if !rate.is_positive() {
            return Err(bad(&format!("rate must be strictly positive, got `{value}`")));
        }
        out.push((edge, rate));
    }
    Ok(out)
}

/// Inline rates overridden edge by edge by the optional rates file.
pub fn resolve_rates(parsed: &ParsedNetwork, rates_file: Option<&Path>) -> Result<RateAssignment, CliError> {
    let net = &parsed.network;
    let mut values = parsed.inline_rates.clone();
    if let Some(path) = rates_file {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        for (edge, rate) in parse_rates_file(net, &text)? {
            values[edge] = Some(rate);
        }
    }
    let missing: Vec<String> = values
        .iter()
        .zip(net.edges())
        .filter(|(v, _)| v.is_none())
        .map(|(_, e)| format!("{} -> {}", e.source + 1, e.target + 1))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Usage(format!("no rate given for {}", missing.join(", "))));
    }
    RateAssignment::new(net, values.into_iter().flatten().collect()).map_err(CliError::from)
}

/// A comma- or whitespace-separated vector, given inline or as a file path.
pub fn parse_vector(arg: &str, expected: usize) -> Result<Vec<f64>, CliError> {
    let path = Path::new(arg);
    let text = if path.is_file() {
        fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    let values = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Usage(format!("bad number `{t}` in vector")))
        })
        .collect::<Result<Vec<f64>, CliError>>()?;
    if values.len() != expected {
        return Err(CliError::Usage(format!(
            "vector has {} entries, the network has {expected} species",
            values.len()
        )));
    }
    Ok(values)
}

/// `I=1,3` or `1,3`, 1-based species indices, returned 0-based.
pub fn parse_face(arg: &str, species: usize) -> Result<Vec<usize>, CliError> {
    let body = arg.strip_prefix("I=").unwrap_or(arg);
    let mut face = Vec::new();
    for t in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match t.parse::<usize>() {
            Ok(k) if (1..=species).contains(&k) => face.push(k - 1),
            _ => {
                return Err(CliError::Usage(format!(
                    "face index `{t}` out of range 1..={species}"
                )))
            }
        }
    }
    if face.is_empty() {
        return Err(CliError::Usage("face index set must be non-empty".into()));
    }
    face.sort_unstable();
    face.dedup();
    Ok(face)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> ParsedNetwork {
        load_network("triangle.crn").unwrap()
    }

    #[test]
    fn bundled_fallback_by_file_name() {
        assert_eq!(load_network("examples/triangle.crn").unwrap(), triangle());
        assert!(matches!(load_network("nowhere/none.crn"), Err(CliError::Usage(_))));
    }

    #[test]
    fn rates_file_overrides_inline_values() {
        let p = triangle();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.rates");
        fs::write(&path, "# override\n1 2 2\n3 1 0.5\n").unwrap();
        let r = resolve_rates(&p, Some(&path)).unwrap();
        let e12 = p.network.edge_index(0, 1).unwrap();
        let e31 = p.network.edge_index(2, 0).unwrap();
        assert_eq!(r.values()[e12].to_string(), "2");
        assert_eq!(r.values()[e31].to_string(), "1/2");
        assert_eq!(r.values().iter().filter(|v| v.to_string() == "1").count(), 4);
    }

    #[test]
    fn rates_file_errors() {
        let net = triangle().network;
        for bad in ["1 2", "1 9 1", "1 2 -1", "1 2 x", "1 2 1\n1 2 3"] {
            assert!(parse_rates_file(&net, bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn vectors_and_faces() {
        assert_eq!(parse_vector("1, 2.5", 2).unwrap(), vec![1.0, 2.5]);
        assert!(parse_vector("1 2 3", 2).is_err());
        assert!(parse_vector("1 nan", 2).is_err());
        assert_eq!(parse_face("I=3,1", 3).unwrap(), vec![0, 2]);
        assert_eq!(parse_face("2", 3).unwrap(), vec![1]);
        assert!(parse_face("I=", 3).is_err());
        assert!(parse_face("I=4", 3).is_err());
    }
}
