//! The standard chromatic subdivision `χ(Δⁿ)`.
//!
//! A simplex is a sequence of disjoint nonempty blocks `B_1, ..., B_t` of
//! `{0, ..., n}` together with nonempty color sets `C_i ⊆ B_i`. Its vertices
//! are the pairs `(c, B_i)` with `c ∈ C_i`.

use std::fmt;

use crate::complex::is_simplex_of;
use crate::error::{Error, Result};
use crate::round_counter::RoundCounter;
use crate::witness::{format_set, parse_set, Layer, Simplex};
use crate::{ProcessId, ProcessSet};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChromaticSimplex {
    blocks: Vec<ProcessSet>,
    colors: Vec<ProcessSet>,
}

impl ChromaticSimplex {
    pub fn new(blocks: Vec<ProcessSet>, colors: Vec<ProcessSet>) -> Result<Self> {
        if blocks.len() != colors.len() {
            return Err(Error::InvalidChromatic(format!(
                "{} blocks but {} color sets",
                blocks.len(),
                colors.len()
            )));
        }
        let mut seen = ProcessSet::new();
        for (b, c) in blocks.iter().zip(&colors) {
            if c.is_empty() {
                return Err(Error::InvalidChromatic("empty color set".into()));
            }
            if !c.is_subset(b) {
                return Err(Error::InvalidChromatic(format!(
                    "colors {{{}}} not inside block {{{}}}",
                    format_set(c),
                    format_set(b)
                )));
            }
            if !seen.is_disjoint(b) {
                return Err(Error::InvalidChromatic("blocks overlap".into()));
            }
            seen.extend(b.iter().copied());
        }
        Ok(ChromaticSimplex { blocks, colors })
    }

    /// The empty simplex.
    pub fn empty() -> Self {
        ChromaticSimplex {
            blocks: Vec::new(),
            colors: Vec::new(),
        }
    }

    pub fn blocks(&self) -> &[ProcessSet] {
        &self.blocks
    }

    pub fn colors(&self) -> &[ProcessSet] {
        &self.colors
    }

    /// `|C_1| + ... + |C_t| − 1`.
    pub fn dimension(&self) -> i64 {
        self.colors.iter().map(|c| c.len() as i64).sum::<i64>() - 1
    }

    pub fn vertices(&self) -> Vec<(ProcessId, ProcessSet)> {
        let mut out: Vec<(ProcessId, ProcessSet)> = self
            .blocks
            .iter()
            .zip(&self.colors)
            .flat_map(|(b, c)| c.iter().map(move |&p| (p, b.clone())))
            .collect();
        out.sort();
        out
    }

    /// Every simplex of `χ(Δⁿ)`, the empty one included.
    pub fn all(n: ProcessId) -> Vec<ChromaticSimplex> {
        let mut out = Vec::new();
        let mut blocks = Vec::new();
        let mut colors = Vec::new();
        let all: Vec<ProcessId> = (0..=n).collect();
        extend_all(&all, &mut blocks, &mut colors, &mut out);
        out.sort();
        out
    }
}

fn subsets(items: &[ProcessId]) -> impl Iterator<Item = ProcessSet> + '_ {
    (1u64..1 << items.len()).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &p)| p)
            .collect()
    })
}

fn extend_all(
    free: &[ProcessId],
    blocks: &mut Vec<ProcessSet>,
    colors: &mut Vec<ProcessSet>,
    out: &mut Vec<ChromaticSimplex>,
) {
    out.push(ChromaticSimplex {
        blocks: blocks.clone(),
        colors: colors.clone(),
    });
    for block in subsets(free) {
        let rest: Vec<ProcessId> = free.iter().copied().filter(|p| !block.contains(p)).collect();
        let members: Vec<ProcessId> = block.iter().copied().collect();
        for c in subsets(&members) {
            blocks.push(block.clone());
            colors.push(c);
            extend_all(&rest, blocks, colors, out);
            blocks.pop();
            colors.pop();
        }
    }
}

impl fmt::Display for ChromaticSimplex {
    /// `B_1/C_1;B_2/C_2;...`, e.g. `0,1/0;2/2`; the empty simplex is `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self
            .blocks
            .iter()
            .zip(&self.colors)
            .map(|(b, c)| format!("{}/{}", format_set(b), format_set(c)))
            .collect();
        f.write_str(&parts.join(";"))
    }
}

impl std::str::FromStr for ChromaticSimplex {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "-" || text.is_empty() {
            return Ok(ChromaticSimplex::empty());
        }
        let mut blocks = Vec::new();
        let mut colors = Vec::new();
        for part in text.split(';') {
            let (b, c) = part
                .split_once('/')
                .ok_or_else(|| Error::Parse(format!("expected B/C, got {part:?}")))?;
            blocks.push(parse_set(b)?);
            colors.push(parse_set(c)?);
        }
        ChromaticSimplex::new(blocks, colors)
    }
}

/// The face obtained by deleting the vertex colored `p`.
pub fn chromatic_faces(t: &ChromaticSimplex, p: ProcessId) -> Result<ChromaticSimplex> {
    let k = t
        .colors
        .iter()
        .position(|c| c.contains(&p))
        .ok_or_else(|| Error::InvalidChromatic(format!("{p} is not a color of {t}")))?;
    let mut out = t.clone();
    if out.colors[k].len() >= 2 {
        out.colors[k].remove(&p);
    } else if k + 1 < out.blocks.len() {
        let merged = out.blocks.remove(k);
        out.colors.remove(k);
        out.blocks[k].extend(merged);
    } else {
        out.blocks.pop();
        out.colors.pop();
    }
    Ok(out)
}

/// The witness structure `((∪B, [n] ∖ ∪B), (C_1, B_1 ∖ C_1), ...)`.
pub fn chromatic_to_witness(t: &ChromaticSimplex, n: ProcessId) -> Result<Simplex> {
    let all: ProcessSet = (0..=n).collect();
    let covered: ProcessSet = t.blocks.iter().flatten().copied().collect();
    if !covered.is_subset(&all) {
        return Err(Error::InvalidChromatic(format!("{t} uses processes beyond {n}")));
    }
    let mut layers = vec![Layer::new(
        covered.clone(),
        all.difference(&covered).copied().collect(),
    )];
    layers.extend(
        t.blocks
            .iter()
            .zip(&t.colors)
            .map(|(b, c)| Layer::new(c.clone(), b.difference(c).copied().collect())),
    );
    Simplex::new(layers)
}

/// `((W_1 ∪ G_1, ..., W_t ∪ G_t), (W_1, ..., W_t))` for a simplex of
/// `P(1, ..., 1)` over `{0, ..., n}`.
pub fn witness_to_chromatic(s: &Simplex) -> Result<ChromaticSimplex> {
    let support = s.support();
    let n = support.len() as u32;
    let dense = support.iter().copied().eq(0..n);
    if !dense || !is_simplex_of(s, &RoundCounter::dense(&vec![1; n as usize])) {
        return Err(Error::InvalidChromatic(format!(
            "{s} is not a simplex of P(1,...,1)"
        )));
    }
    let layers = &s.layers()[1..];
    ChromaticSimplex::new(
        layers.iter().map(Layer::union).collect(),
        layers.iter().map(|l| l.seen.clone()).collect(),
    )
}
