//! Line-oriented text formats for genomes and decoded weights.
//!
//! A genome file starts with a single header line
//!
//! ```text
//! k <k> lengths <l_1> ... <l_k> scheme <psi1|psi2|psi3|direct> p <p> arch <theta1|theta2>
//! ```
//!
//! followed by one coefficient per line in genome order, printed with full
//! round-trip precision. `scheme direct` marks a genome whose "coefficients"
//! are raw weights in flat layout.
//!
//! A weights file starts with `n <n> i <i>`, then `n` input rows, `n`
//! recurrent rows, and one bias row, space-separated.

use super::{ActionMode, Genome, NetworkWeights, SchemeName};
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// Encoding named in a genome file header: a mapping scheme or the direct
/// weight layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodingName {
    Scheme(SchemeName),
    Direct,
}

impl std::fmt::Display for EncodingName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EncodingName::Scheme(s) => write!(f, "{s}"),
            EncodingName::Direct => write!(f, "direct"),
        }
    }
}

impl std::str::FromStr for EncodingName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("direct") {
            Ok(EncodingName::Direct)
        } else {
            Ok(EncodingName::Scheme(s.parse()?))
        }
    }
}

/// Architecture name in file headers and CLI flags: `theta1` is the 8-neuron
/// meta-action controller, `theta2` the raw-action controller.
pub fn arch_name(mode: ActionMode) -> &'static str {
    match mode {
        ActionMode::Meta => "theta1",
        ActionMode::Raw => "theta2",
    }
}

pub fn parse_arch_name(s: &str) -> Result<ActionMode> {
    match s.to_ascii_lowercase().as_str() {
        "theta1" | "meta" => Ok(ActionMode::Meta),
        "theta2" | "raw" => Ok(ActionMode::Raw),
        other => Err(Error::Config(format!("unknown architecture `{other}`"))),
    }
}

/// A parsed genome file.
#[derive(Debug, Clone, PartialEq)]
pub struct GenomeFile {
    pub genome: Genome,
    pub encoding: EncodingName,
    pub compartments: usize,
    pub action_mode: ActionMode,
}

pub fn format_genome(
    genome: &Genome,
    encoding: EncodingName,
    compartments: usize,
    action_mode: ActionMode,
) -> String {
    let mut out = String::new();
    write!(out, "k {} lengths", genome.chromosome_lengths().len()).unwrap();
    for len in genome.chromosome_lengths() {
        write!(out, " {len}").unwrap();
    }
    writeln!(
        out,
        " scheme {encoding} p {compartments} arch {}",
        arch_name(action_mode)
    )
    .unwrap();
    for c in genome.coefficients() {
        // Shortest representation that parses back to the same f64.
        writeln!(out, "{c:?}").unwrap();
    }
    out
}

pub fn write_genome_file(
    path: &Path,
    genome: &Genome,
    encoding: EncodingName,
    compartments: usize,
    action_mode: ActionMode,
) -> Result<()> {
    std::fs::write(path, format_genome(genome, encoding, compartments, action_mode))?;
    Ok(())
}

struct HeaderCursor<'a> {
    tokens: Vec<&'a str>,
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn expect(&mut self, word: &str) -> Result<()> {
        if self.tokens.get(self.pos) != Some(&word) {
            return Err(Error::GenomeFile(format!(
                "expected `{word}` at header position {}",
                self.pos
            )));
        }
        self.pos += 1;
        Ok(())
    }

    fn token(&mut self, what: &str) -> Result<&'a str> {
        let t = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| Error::GenomeFile(format!("missing {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        self.token(what)?
            .parse()
            .map_err(|_| Error::GenomeFile(format!("bad {what}")))
    }
}

pub fn parse_genome(text: &str) -> Result<GenomeFile> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::GenomeFile("missing header line".into()))?;
    let mut cursor = HeaderCursor {
        tokens: header.split_whitespace().collect(),
        pos: 0,
    };

    cursor.expect("k")?;
    let k: usize = cursor.number("chromosome count")?;
    cursor.expect("lengths")?;
    let mut lengths = Vec::with_capacity(k);
    for _ in 0..k {
        lengths.push(cursor.number("chromosome length")?);
    }
    cursor.expect("scheme")?;
    let encoding: EncodingName = cursor.token("scheme name")?.parse()?;
    cursor.expect("p")?;
    let compartments: usize = cursor.number("compartment count")?;
    cursor.expect("arch")?;
    let action_mode = parse_arch_name(cursor.token("architecture name")?)?;
    if cursor.pos != cursor.tokens.len() {
        return Err(Error::GenomeFile("trailing tokens in header".into()));
    }

    let mut coefficients = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value: f64 = line
            .parse()
            .map_err(|_| Error::GenomeFile(format!("bad coefficient on line {}", i + 2)))?;
        coefficients.push(value);
    }
    let genome = Genome::new(coefficients, lengths)
        .map_err(|e| Error::GenomeFile(format!("inconsistent layout: {e}")))?;
    Ok(GenomeFile {
        genome,
        encoding,
        compartments,
        action_mode,
    })
}

pub fn read_genome_file(path: &Path) -> Result<GenomeFile> {
    parse_genome(&std::fs::read_to_string(path)?)
}

pub fn format_weights(weights: &NetworkWeights) -> String {
    let mut out = String::new();
    let n = weights.neurons();
    let i = weights.inputs();
    writeln!(out, "n {n} i {i}").unwrap();
    for row in weights.input.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    for row in weights.recurrent.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    let bias: Vec<String> = weights.bias.iter().map(|v| format!("{v:?}")).collect();
    writeln!(out, "{}", bias.join(" ")).unwrap();
    out
}

pub fn write_weights_file(path: &Path, weights: &NetworkWeights) -> Result<()> {
    std::fs::write(path, format_weights(weights))?;
    Ok(())
}
