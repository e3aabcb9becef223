use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A partition of `{1, ..., p}`. Blocks are sorted internally and ordered
/// by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Partition {
    p: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(p: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; p + 1];
        let mut norm = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            if b.is_empty() {
                return Err(Error::InvalidSequence("empty block".into()));
            }
            b.sort_unstable();
            for &j in &b {
                if j == 0 || j > p {
                    return Err(Error::InvalidSequence(format!("index {j} outside 1..={p}")));
                }
                if seen[j] {
                    return Err(Error::InvalidSequence(format!("index {j} appears twice")));
                }
                seen[j] = true;
            }
            norm.push(b);
        }
        if let Some(j) = (1..=p).find(|&j| !seen[j]) {
            return Err(Error::InvalidSequence(format!("index {j} is not covered")));
        }
        norm.sort();
        Ok(Partition { p, blocks: norm })
    }

    /// Every index in its own block.
    pub fn discrete(p: usize) -> Self {
        Partition {
            p,
            blocks: (1..=p).map(|j| vec![j]).collect(),
        }
    }

    /// A single block (no blocks when `p = 0`).
    pub fn whole(p: usize) -> Self {
        Partition {
            p,
            blocks: if p == 0 { vec![] } else { vec![(1..=p).collect()] },
        }
    }

    /// From a block label per index: `labels[j - 1]` is the block of `j`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let p = labels.len();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index = std::collections::BTreeMap::new();
        for (i, &l) in labels.iter().enumerate() {
            let b = *index.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i + 1);
        }
        Partition::new(p, blocks).expect("labels cover every index")
    }

    pub fn ground(&self) -> usize {
        self.p
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Position of the block holding `j`.
    pub fn block_of(&self, j: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&j))
    }

    /// `(a, b)` grouped. Every in-range index is grouped with itself.
    pub fn grouped(&self, a: usize, b: usize) -> bool {
        match (self.block_of(a), self.block_of(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    pub fn isolated(&self, j: usize) -> bool {
        self.blocks.iter().any(|b| b.as_slice() == [j])
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> Result<bool> {
        if self.p != other.p {
            return Err(Error::InvalidSequence(format!(
                "ground sets differ: {} vs {}",
                self.p, other.p
            )));
        }
        Ok(self
            .blocks
            .iter()
            .all(|b| other.blocks.iter().any(|o| b.iter().all(|j| o.contains(j)))))
    }

    /// All partitions of `{1..p}` in lexicographic order of their
    /// restricted growth strings.
    pub fn all(p: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut labels = vec![0usize; p];
        fn rec(i: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if i == labels.len() {
                out.push(Partition::from_labels(labels));
                return;
            }
            for l in 0..=max + 1 {
                if i == 0 && l > 0 {
                    break;
                }
                labels[i] = l;
                rec(i + 1, max.max(l), labels, out);
            }
        }
        if p == 0 {
            return vec![Partition::discrete(0)];
        }
        rec(0, 0, &mut labels, &mut out);
        out
    }

    /// All partitions refining `self`.
    pub fn refinements(&self) -> Vec<Partition> {
        Partition::all(self.p)
            .into_iter()
            .filter(|q| q.refines(self).unwrap_or(false))
            .collect()
    }

    /// Parses `1,2|3`; an empty string is the partition of the empty set.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Partition::new(0, vec![]);
        }
        let mut blocks = Vec::new();
        for part in text.split('|') {
            let mut b = Vec::new();
            for item in part.split(',') {
                let item = item.trim();
                let j: usize = item
                    .parse()
                    .map_err(|_| Error::InvalidSequence(format!("bad index {item:?}")))?;
                b.push(j);
            }
            blocks.push(b);
        }
        let p = blocks.iter().map(Vec::len).sum();
        Partition::new(p, blocks)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}
