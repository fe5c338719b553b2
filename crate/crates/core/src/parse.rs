//! Text format for reaction networks.
//!
//! ```text
//! # comment
//! species: A, B          (optional; fixes species order)
//! complexes: A + B, 2 B  (optional; fixes complex order)
//! A + B -> 2 B ; k=3/2
//! 2 B <-> 0 ; kf=1, kr=0.5
//! ```
//!
//! Species and complexes not declared up front are numbered in order of first
//! appearance. Vector-equal complexes are merged into one node.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::{Complex, Edge, ReactionNetwork};
use crate::rates::{parse_rational, Rate, RateAssignment};

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedNetwork {
    pub network: ReactionNetwork,
    /// Inline rate per edge, if one was given.
    pub inline_rates: Vec<Option<Rate>>,
}

impl ParsedNetwork {
    /// The inline rates, when every edge has one.
    pub fn rates(&self) -> Option<RateAssignment> {
        let values: Option<Vec<Rate>> = self.inline_rates.iter().cloned().collect();
        values.and_then(|v| RateAssignment::new(&self.network, v).ok())
    }
}

#[derive(Default)]
struct Builder {
    species: Vec<String>,
    species_index: HashMap<String, usize>,
    complexes: Vec<HashMap<usize, u32>>,
    edges: Vec<Edge>,
    rates: Vec<Option<Rate>>,
}

impl Builder {
    fn species_id(&mut self, name: &str) -> usize {
        if let Some(&i) = self.species_index.get(name) {
            return i;
        }
        self.species.push(name.to_string());
        self.species_index.insert(name.to_string(), self.species.len() - 1);
        self.species.len() - 1
    }

    fn complex_id(&mut self, terms: HashMap<usize, u32>) -> usize {
        match self.complexes.iter().position(|c| *c == terms) {
            Some(i) => i,
            None => {
                self.complexes.push(terms);
                self.complexes.len() - 1
            }
        }
    }

    fn add_edge(&mut self, line: usize, source: usize, target: usize, rate: Option<Rate>) -> Result<()> {
        if source == target {
            return Err(Error::SelfLoop(source + 1));
        }
        let e = Edge::new(source, target);
        if self.edges.contains(&e) {
            return Err(Error::DuplicateReaction {
                line,
                source_complex: source + 1,
                target_complex: target + 1,
            });
        }
        self.edges.push(e);
        self.rates.push(rate);
        Ok(())
    }

    fn finish(self) -> Result<ParsedNetwork> {
        let s = self.species.len();
        let complexes = self
            .complexes
            .iter()
            .map(|terms| {
                let mut y = vec![0; s];
                for (&k, &e) in terms {
                    y[k] = e;
                }
                Complex(y)
            })
            .collect();
        let network = ReactionNetwork::new(self.species, complexes, self.edges)?;
        Ok(ParsedNetwork {
            network,
            inline_rates: self.rates,
        })
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Parses `text` (a complex) starting at 1-based `column` of `line`.
fn parse_complex(b: &mut Builder, text: &str, line: usize, column: usize) -> Result<HashMap<usize, u32>> {
    let trimmed = text.trim();
    let col = column + (text.len() - text.trim_start().len());
    if trimmed.is_empty() {
        return Err(syntax(line, col, "expected a complex"));
    }
    let mut terms = HashMap::new();
    if trimmed == "0" {
        return Ok(terms);
    }
    let mut offset = 0;
    for raw in trimmed.split('+') {
        let term_col = col + offset + (raw.len() - raw.trim_start().len());
        offset += raw.len() + 1;
        let term = raw.trim();
        if term.is_empty() {
            return Err(syntax(line, term_col, "empty term in complex"));
        }
        let split = term
            .find(|c: char| !(c.is_ascii_digit() || c == '-'))
            .unwrap_or(term.len());
        let (coeff_text, name) = (term[..split].trim(), term[split..].trim());
        if !is_identifier(name) {
            return Err(syntax(line, term_col, format!("invalid species name `{name}`")));
        }
        let coeff: i64 = if coeff_text.is_empty() {
            1
        } else {
            coeff_text
                .parse()
                .map_err(|_| syntax(line, term_col, format!("invalid coefficient `{coeff_text}`")))?
        };
        if coeff < 0 {
            return Err(Error::NegativeCoefficient {
                line,
                species: name.to_string(),
            });
        }
        if coeff == 0 {
            return Err(syntax(line, term_col, "zero coefficient"));
        }
        let id = b.species_id(name);
        *terms.entry(id).or_insert(0) += coeff as u32;
    }
    Ok(terms)
}

fn parse_rate_value(text: &str, line: usize, column: usize) -> Result<Rate> {
    let q = parse_rational(text).ok_or_else(|| syntax(line, column, format!("invalid number `{text}`")))?;
    let rate = Rate::Exact(q);
    if !rate.is_positive() {
        return Err(Error::NonPositiveRate {
            line,
            value: text.to_string(),
        });
    }
    Ok(rate)
}

/// Parses `; key=value, key=value` into a map with value columns.
fn parse_rate_spec(text: &str, line: usize, column: usize) -> Result<Vec<(String, Rate)>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(',') {
        let part_col = column + offset + (part.len() - part.trim_start().len());
        offset += part.len() + 1;
        let Some((key, value)) = part.split_once('=') else {
            return Err(syntax(line, part_col, "expected `key=value`"));
        };
        let value_col = part_col + key.len() + 1;
        out.push((key.trim().to_string(), parse_rate_value(value.trim(), line, value_col)?));
    }
    Ok(out)
}

fn take_rate(spec: &mut Vec<(String, Rate)>, key: &str) -> Option<Rate> {
    spec.iter().position(|(k, _)| k == key).map(|i| spec.remove(i).1)
}

pub fn parse_network(text: &str) -> Result<ParsedNetwork> {
    let mut b = Builder::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let lead = content.len() - content.trim_start().len();
        let body = content.trim_start();

        if let Some(rest) = body.strip_prefix("species:") {
            let mut col = lead + "species:".len() + 1;
            for name in rest.split(',') {
                let n = name.trim();
                if !is_identifier(n) {
                    return Err(syntax(line, col, format!("invalid species name `{n}`")));
                }
                b.species_id(n);
                col += name.len() + 1;
            }
            continue;
        }
        if let Some(rest) = body.strip_prefix("complexes:") {
            let mut col = lead + "complexes:".len() + 1;
            for cx in rest.split(',') {
                let terms = parse_complex(&mut b, cx, line, col)?;
                b.complex_id(terms);
                col += cx.len() + 1;
            }
            continue;
        }

        let (reaction, rate_text, rate_col) = match content.split_once(';') {
            Some((r, t)) => (r, Some(t), r.len() + 2),
            None => (content, None, 0),
        };
        let (reversible, arrow_at, arrow_len) = if let Some(i) = reaction.find("<->") {
            (true, i, 3)
        } else if let Some(i) = reaction.find("->") {
            (false, i, 2)
        } else {
            return Err(syntax(line, lead + 1, "expected `->` or `<->`"));
        };
        let lhs_text = &reaction[..arrow_at];
        let rhs_text = &reaction[arrow_at + arrow_len..];
        if rhs_text.contains("->") {
            return Err(syntax(line, arrow_at + arrow_len + 1, "more than one arrow"));
        }
        let lhs = parse_complex(&mut b, lhs_text, line, 1)?;
        let rhs = parse_complex(&mut b, rhs_text, line, arrow_at + arrow_len + 1)?;
        let mut spec = match rate_text {
            Some(t) if !t.trim().is_empty() => parse_rate_spec(t, line, rate_col)?,
            Some(_) => return Err(syntax(line, rate_col, "empty rate specification")),
            None => Vec::new(),
        };
        let i = b.complex_id(lhs);
        let j = b.complex_id(rhs);
        if reversible {
            let kf = take_rate(&mut spec, "kf");
            let kr = take_rate(&mut spec, "kr");
            if kf.is_some() != kr.is_some() {
                return Err(syntax(line, rate_col, "reversible reaction needs both `kf` and `kr`"));
            }
            if let Some((k, _)) = spec.first() {
                return Err(syntax(line, rate_col, format!("unexpected rate key `{k}`")));
            }
            b.add_edge(line, i, j, kf)?;
            b.add_edge(line, j, i, kr)?;
        } else {
            let k = take_rate(&mut spec, "k");
            if let Some((key, _)) = spec.first() {
                return Err(syntax(line, rate_col, format!("unexpected rate key `{key}`")));
            }
            b.add_edge(line, i, j, k)?;
        }
    }
    b.finish()
}

/// Renders the network (and optionally its rates) back to the text format,
/// one directed edge per line. Parsing the output yields the same network.
pub fn to_dsl(net: &ReactionNetwork, rates: Option<&RateAssignment>) -> String {
    let sp = net.species();
    let mut out = String::new();
    let _ = writeln!(out, "species: {}", sp.join(", "));
    let cx: Vec<String> = net
        .complexes()
        .iter()
        .map(|y| y.display(sp).to_string())
        .collect();
    let _ = writeln!(out, "complexes: {}", cx.join(", "));
    for (k, e) in net.edges().iter().enumerate() {
        let _ = write!(out, "{} -> {}", cx[e.source], cx[e.target]);
        if let Some(r) = rates {
            let _ = write!(out, " ; k={}", r.values()[k]);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_network() {
        let p = parse_network("A -> B ; k=1").unwrap();
        assert_eq!(p.network.n(), 2);
        assert_eq!(p.network.s(), 2);
        assert_eq!(p.network.edges().len(), 1);
        assert!(p.rates().is_some());
    }

    #[test]
    fn self_loop_is_rejected() {
        assert_eq!(parse_network("A -> A ; k=1").unwrap_err(), Error::SelfLoop(1));
    }

    #[test]
    fn reversible_expands_to_two_edges() {
        let p = parse_network("2 c1 <-> c1 + c2 ; kf=1, kr=3/2").unwrap();
        assert_eq!(p.network.edges(), &[Edge::new(0, 1), Edge::new(1, 0)]);
        assert_eq!(p.network.edges()[0].label(), "k1_2");
        assert_eq!(p.network.edges()[1].label(), "k2_1");
        assert_eq!(p.inline_rates[1], Some("3/2".parse().unwrap()));
    }

    #[test]
    fn merges_textually_distinct_equal_complexes() {
        let p = parse_network("A + A -> B\nB -> 2 A").unwrap();
        assert_eq!(p.network.n(), 2);
        assert_eq!(p.network.complexes()[0], Complex(vec![2, 0]));
    }

    #[test]
    fn zero_complex() {
        let p = parse_network("S <-> 0 ; kf=1, kr=2").unwrap();
        assert!(p.network.complexes()[1].is_zero());
    }

    #[test]
    fn error_reports() {
        assert!(matches!(
            parse_network("A -> B\n-1 A -> B").unwrap_err(),
            Error::NegativeCoefficient { line: 2, .. }
        ));
        assert!(matches!(
            parse_network("A -> B ; k=0").unwrap_err(),
            Error::NonPositiveRate { line: 1, .. }
        ));
        assert!(matches!(
            parse_network("A -> B ; k=-2").unwrap_err(),
            Error::NonPositiveRate { .. }
        ));
        assert!(matches!(
            parse_network("A -> B\nA <-> B").unwrap_err(),
            Error::DuplicateReaction { line: 2, .. }
        ));
        assert_eq!(
            parse_network("A => B").unwrap_err(),
            Error::Syntax {
                line: 1,
                column: 1,
                message: "expected `->` or `<->`".into()
            }
        );
        match parse_network("A -> B + \n").unwrap_err() {
            Error::Syntax { line, column, .. } => {
                assert_eq!(line, 1);
                assert_eq!(column, 9);
            }
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(
            parse_network("A -> B ; kf=1").unwrap_err(),
            Error::Syntax { .. }
        ));
    }

    #[test]
    fn declarations_fix_order() {
        let p = parse_network("species: B, A\ncomplexes: A, B\nB -> A ; k=1").unwrap();
        assert_eq!(p.network.species(), &["B".to_string(), "A".to_string()]);
        assert_eq!(p.network.complexes()[0], Complex(vec![0, 1]));
        assert_eq!(p.network.edges(), &[Edge::new(1, 0)]);
    }

    #[test]
    fn serialize_round_trip() {
        let text = "species: B, A\nA + B <-> 2 B ; kf=1/3, kr=2\n2 B -> 0 ; k=0.5\n";
        let p = parse_network(text).unwrap();
        let again = parse_network(&to_dsl(&p.network, p.rates().as_ref())).unwrap();
        assert_eq!(again, p);
    }
}
