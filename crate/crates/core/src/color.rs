//! Red-versus-blue color task: embedded training colors, star graphs and
//! RGB decoding.
//!
//! A `3k`-bit color is three `k`-bit channels in R, G, B order. Within a
//! channel the leftmost bit is the most significant, so `001 100 111` is a
//! little red, half green and full blue.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{presets, BitString, InteractionGraph, LabeledDataset, SetName};
use crate::{Error, Result};

pub const RED_9: [&str; 10] = [
    "110000000", "011000000", "100000000", "111001000", "110010001", "110001000", "101000001",
    "111000000", "100000001", "100001000",
];

pub const BLUE_9: [&str; 10] = [
    "000001100", "001001110", "000000010", "000000110", "001010111", "001000110", "001001111",
    "000000111", "000000011", "000001111",
];

pub const RED_6: [&str; 5] = ["110001", "110100", "110000", "100000", "100100"];

/// The last entry has only five bits in the source table; see
/// [`normalize_color_literal`].
pub const BLUE_6: [&str; 5] = ["000001", "000011", "001011", "000111", "00010"];

/// Color depth of the task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColorBits {
    Six,
    Nine,
}

impl ColorBits {
    pub fn from_bits(bits: usize) -> Result<Self> {
        match bits {
            6 => Ok(Self::Six),
            9 => Ok(Self::Nine),
            _ => Err(Error::InvalidArgument(format!("color depth must be 6 or 9, got {bits}"))),
        }
    }

    pub fn total(self) -> usize {
        match self {
            Self::Six => 6,
            Self::Nine => 9,
        }
    }

    pub fn per_channel(self) -> usize {
        self.total() / 3
    }
}

impl fmt::Display for ColorBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-bit", self.total())
    }
}

/// Pads a too-short literal with trailing zeros, warning loudly.
pub fn normalize_color_literal(s: &str, width: usize) -> Result<BitString> {
    if s.len() > width {
        return Err(Error::InvalidDataset(format!("`{s}` is longer than {width} bits")));
    }
    if s.len() < width {
        let padded = format!("{s:0<width$}");
        static ONCE: std::sync::Once = std::sync::Once::new();
        ONCE.call_once(|| log::warn!("training color `{s}` has {} bits; using `{padded}`", s.len()));
        return padded.parse();
    }
    s.parse()
}

/// Embedded training colors: blue is YES, red is NO.
pub fn color_dataset(bits: ColorBits) -> Result<LabeledDataset> {
    let (red, blue): (&[&str], &[&str]) = match bits {
        ColorBits::Six => (&RED_6, &BLUE_6),
        ColorBits::Nine => (&RED_9, &BLUE_9),
    };
    let parse = |v: &[&str]| {
        v.iter()
            .map(|s| normalize_color_literal(s, bits.total()))
            .collect::<Result<Vec<_>>>()
    };
    LabeledDataset::new(parse(blue)?, parse(red)?)
}

/// Star graph: one data vertex per color bit (`r1 r2 … b_k`) around a
/// hidden center, projector interactions on every edge.
pub fn color_graph(bits: ColorBits) -> InteractionGraph {
    let k = bits.per_channel();
    let ids: Vec<String> = ["r", "g", "b"]
        .iter()
        .flat_map(|c| (1..=k).map(move |i| format!("{c}{i}")))
        .collect();
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    presets::star(&refs, SetName::Proj)
}

/// Channel values of a color bitstring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rgb {
    pub r: u32,
    pub g: u32,
    pub b: u32,
    /// Bits per channel.
    pub depth: u32,
}

impl Rgb {
    pub fn decode(s: &BitString) -> Result<Self> {
        if s.len() % 3 != 0 || s.is_empty() {
            return Err(Error::InvalidArgument(format!("`{s}` is not three equal channels")));
        }
        let k = s.len() / 3;
        let ch = |c: usize| {
            s.bits()[c * k..(c + 1) * k]
                .iter()
                .fold(0u32, |a, &b| (a << 1) | b as u32)
        };
        Ok(Self {
            r: ch(0),
            g: ch(1),
            b: ch(2),
            depth: k as u32,
        })
    }

    /// Channels scaled to `[0, 1]`.
    pub fn unit(&self) -> (f64, f64, f64) {
        let m = ((1u32 << self.depth) - 1) as f64;
        (self.r as f64 / m, self.g as f64 / m, self.b as f64 / m)
    }

    /// Hue in degrees, `[0, 360)`, by the hexagonal formula; greys get 0.
    pub fn hue(&self) -> f64 {
        let (r, g, b) = self.unit();
        let max = r.max(g).max(b);
        let min = r.min(g).min(b);
        let c = max - min;
        if c == 0.0 {
            return 0.0;
        }
        let h = if max == r {
            ((g - b) / c).rem_euclid(6.0)
        } else if max == g {
            (b - r) / c + 2.0
        } else {
            (r - g) / c + 4.0
        };
        60.0 * h
    }

    /// `#rrggbb` for plotting.
    pub fn hex(&self) -> String {
        let (r, g, b) = self.unit();
        let q = |x: f64| (x * 255.0).round() as u8;
        format!("#{:02x}{:02x}{:02x}", q(r), q(g), q(b))
    }
}

/// Permutation that orders `colors` by hue, ties broken by integer value.
pub fn hue_sort(colors: &[BitString]) -> Result<Vec<usize>> {
    let keys: Vec<(f64, usize)> = colors
        .iter()
        .map(|c| Ok((Rgb::decode(c)?.hue(), c.value())))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..colors.len()).collect();
    order.sort_by(|&a, &b| keys[a].0.total_cmp(&keys[b].0).then(keys[a].1.cmp(&keys[b].1)));
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rgb(s: &str) -> Rgb {
        Rgb::decode(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn channel_order_example() {
        let c = rgb("001100111");
        assert_eq!((c.r, c.g, c.b), (1, 4, 7));
    }

    #[test]
    fn primary_hues() {
        assert_eq!(rgb("100000000").hue(), 0.0);
        assert_eq!(rgb("000100000").hue(), 120.0);
        assert_eq!(rgb("000000001").hue(), 240.0);
        assert_eq!(rgb("000000100").hue(), 240.0);
        assert_eq!(rgb("111111000").hue(), 60.0);
        assert_eq!(rgb("101000101").hue(), 300.0);
        assert_eq!(rgb("010010010").hue(), 0.0);
    }

    #[test]
    fn embedded_tables() {
        let d9 = color_dataset(ColorBits::Nine).unwrap();
        assert_eq!((d9.yes().len(), d9.no().len()), (10, 10));
        assert_eq!(d9.no()[0].to_string(), "110000000");
        assert_eq!(d9.no()[1].to_string(), "011000000");
        let d6 = color_dataset(ColorBits::Six).unwrap();
        assert_eq!(d6.yes()[4].to_string(), "000100");
        assert_eq!(d6.n_bits(), Some(6));
    }

    #[test]
    fn graph_shapes() {
        let g = color_graph(ColorBits::Nine);
        assert_eq!(g.n_vertices(), 10);
        assert_eq!(g.vertices()[6].id, "b1");
        assert_eq!(g.hidden_vertices(), vec![9]);
        assert_eq!(color_graph(ColorBits::Six).edges().len(), 6);
    }

    #[test]
    fn hue_sort_breaks_ties_by_value() {
        let c: Vec<BitString> = ["000000001", "100000000", "000000000", "000000010"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        // hues: 240, 0, 0 (grey), 240
        assert_eq!(hue_sort(&c).unwrap(), vec![2, 1, 0, 3]);
    }
}
