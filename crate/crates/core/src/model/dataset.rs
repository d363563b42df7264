use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::tensor::{format_bits, parse_bits, Term, WeightedTermList};
use crate::{Error, Result};

/// A computational-basis string, leftmost character on the lowest qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// The `n`-bit string of `value`, most significant bit first.
    pub fn from_index(value: usize, n: usize) -> Self {
        Self((0..n).map(|q| (value >> (n - 1 - q)) & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Integer value, most significant bit first.
    pub fn value(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_bits(&self.0))
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('|').trim_end_matches('⟩').trim_end_matches('>');
        parse_bits(s).map(Self)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Yes => "YES",
            Side::No => "NO",
        })
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "YES" | "1" | "+" => Ok(Side::Yes),
            "NO" | "0" | "-" => Ok(Side::No),
            _ => Err(Error::InvalidDataset(format!("unknown label `{s}`"))),
        }
    }
}

/// YES and NO bitstrings over the data register.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDataset {
    yes: Vec<BitString>,
    no: Vec<BitString>,
}

impl LabeledDataset {
    /// Duplicates within a side are dropped (first occurrence kept).
    pub fn new(yes: Vec<BitString>, no: Vec<BitString>) -> Result<Self> {
        let dedup = |v: Vec<BitString>| {
            let mut seen = BTreeSet::new();
            v.into_iter().filter(|s| seen.insert(s.clone())).collect::<Vec<_>>()
        };
        let (yes, no) = (dedup(yes), dedup(no));
        let width = yes.iter().chain(&no).map(|s| s.len()).next();
        if let Some(w) = width {
            if let Some(bad) = yes.iter().chain(&no).find(|s| s.len() != w) {
                return Err(Error::InvalidDataset(format!(
                    "`{bad}` has {} bits, expected {w}",
                    bad.len()
                )));
            }
        }
        if let Some(both) = yes.iter().find(|s| no.contains(s)) {
            return Err(Error::InvalidDataset(format!("`{both}` is labelled both YES and NO")));
        }
        Ok(Self { yes, no })
    }

    /// Convenience constructor from string literals.
    pub fn from_strs(yes: &[&str], no: &[&str]) -> Result<Self> {
        let parse = |v: &[&str]| v.iter().map(|s| s.parse()).collect::<Result<Vec<BitString>>>();
        Self::new(parse(yes)?, parse(no)?)
    }

    /// Parses `<bitstring> <YES|NO>` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let (mut yes, mut no) = (Vec::new(), Vec::new());
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(bits), Some(label), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::InvalidDataset(format!("line {}: `{line}`", i + 1)));
            };
            let bits: BitString = bits
                .parse()
                .map_err(|e| Error::InvalidDataset(format!("line {}: {e}", i + 1)))?;
            match label.parse()? {
                Side::Yes => yes.push(bits),
                Side::No => no.push(bits),
            }
        }
        Self::new(yes, no)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        self.records().map(|(b, s)| format!("{b} {s}\n")).collect()
    }

    pub fn yes(&self) -> &[BitString] {
        &self.yes
    }

    pub fn no(&self) -> &[BitString] {
        &self.no
    }

    pub fn side(&self, side: Side) -> &[BitString] {
        match side {
            Side::Yes => &self.yes,
            Side::No => &self.no,
        }
    }

    /// Number of data bits, `None` for an empty dataset.
    pub fn n_bits(&self) -> Option<usize> {
        self.yes.iter().chain(&self.no).map(|s| s.len()).next()
    }

    pub fn records(&self) -> impl Iterator<Item = (&BitString, Side)> {
        self.yes
            .iter()
            .map(|s| (s, Side::Yes))
            .chain(self.no.iter().map(|s| (s, Side::No)))
    }

    pub fn label_of(&self, s: &BitString) -> Option<Side> {
        if self.yes.contains(s) {
            Some(Side::Yes)
        } else if self.no.contains(s) {
            Some(Side::No)
        } else {
            None
        }
    }

    /// Errors unless both sides are non-empty and the width matches `n_data`.
    pub fn check_trainable(&self, n_data: usize) -> Result<()> {
        if self.yes.is_empty() {
            return Err(Error::EmptySide("YES"));
        }
        if self.no.is_empty() {
            return Err(Error::EmptySide("NO"));
        }
        self.check_width(n_data)
    }

    pub fn check_width(&self, n_data: usize) -> Result<()> {
        match self.n_bits() {
            Some(w) if w != n_data => Err(Error::InvalidDataset(format!(
                "dataset strings have {w} bits but the graph has {n_data} data vertices"
            ))),
            _ => Ok(()),
        }
    }
}

/// `Π = Σ_l |l⟩⟨l|` on `data_qubits`, identity elsewhere. Each component is
/// a product of single-qubit projectors. An empty list gives the zero
/// operator.
pub fn data_projector(strings: &[BitString], data_qubits: &[usize]) -> Result<WeightedTermList> {
    if strings.is_empty() {
        log::warn!("data projector over an empty side is the zero operator");
    }
    let mut seen = BTreeSet::new();
    let mut list = WeightedTermList::new();
    for s in strings {
        if s.len() != data_qubits.len() {
            return Err(Error::DimensionMismatch(format!(
                "`{s}` has {} bits for {} data qubits",
                s.len(),
                data_qubits.len()
            )));
        }
        if seen.insert(s) {
            list.push(Term::projector(1.0, data_qubits, s.bits()))?;
        }
    }
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_text_format() {
        let d = LabeledDataset::parse("# NOT\n01 YES\n10 YES\n\n00 NO\n11 no\n").unwrap();
        assert_eq!(d.yes().len(), 2);
        assert_eq!(d.no()[1].to_string(), "11");
        assert_eq!(d.n_bits(), Some(2));
        assert_eq!(LabeledDataset::parse(&d.to_text()).unwrap(), d);
    }

    #[test]
    fn rejects_bad_records() {
        assert!(LabeledDataset::parse("01 YES\n01 NO\n").is_err());
        assert!(LabeledDataset::parse("012 YES\n").is_err());
        assert!(LabeledDataset::parse("01 MAYBE\n").is_err());
        assert!(LabeledDataset::parse("01 YES\n011 NO\n").is_err());
        assert!(LabeledDataset::parse("01\n").is_err());
    }

    #[test]
    fn bitstring_value() {
        let b: BitString = "|110⟩".parse().unwrap();
        assert_eq!(b.value(), 6);
        assert_eq!(BitString::from_index(6, 3), b);
    }

    #[test]
    fn empty_side_projector_is_zero() {
        assert!(data_projector(&[], &[0, 1]).unwrap().is_empty());
    }

    #[test]
    fn trainability() {
        let d = LabeledDataset::from_strs(&["01"], &[]).unwrap();
        assert!(matches!(d.check_trainable(2), Err(Error::EmptySide("NO"))));
        let d = LabeledDataset::from_strs(&["01"], &["00"]).unwrap();
        assert!(d.check_trainable(3).is_err());
        assert!(d.check_trainable(2).is_ok());
    }
}
