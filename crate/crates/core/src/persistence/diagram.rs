use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A birth–death pair in level coordinates. Super-level features are born
/// at a high level and die at a lower one; classes that never die carry
/// `death = −∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub birth: f64,
    pub death: f64,
}

impl Pair {
    pub fn new(birth: f64, death: f64) -> Self {
        Self { birth, death }
    }

    pub fn essential(birth: f64) -> Self {
        Self {
            birth,
            death: f64::NEG_INFINITY,
        }
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::NEG_INFINITY
    }

    /// `birth − death`; infinite for essential classes.
    pub fn persistence(&self) -> f64 {
        self.birth - self.death
    }

    fn canonical_cmp(&self, o: &Self) -> Ordering {
        o.birth
            .total_cmp(&self.birth)
            .then(o.death.total_cmp(&self.death))
    }
}

/// The persistence diagram of one homological degree, pairs kept in a
/// canonical order (birth descending, then death descending).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    degree: usize,
    pairs: Vec<Pair>,
}

impl PersistenceDiagram {
    pub fn empty(degree: usize) -> Self {
        Self {
            degree,
            pairs: Vec::new(),
        }
    }

    pub fn new(degree: usize, mut pairs: Vec<Pair>) -> Result<Self> {
        for p in &pairs {
            if !p.birth.is_finite() {
                return Err(invalid(format!("birth {} is not finite", p.birth)));
            }
            if !(p.is_essential() || (p.death.is_finite() && p.birth > p.death)) {
                return Err(invalid(format!(
                    "pair ({}, {}) needs birth > death",
                    p.birth, p.death
                )));
            }
        }
        pairs.sort_by(Pair::canonical_cmp);
        Ok(Self { degree, pairs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn essential_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.is_essential()).count()
    }

    /// Number of classes present at `level`: born at or above it and not
    /// yet dead (`death < level`).
    pub fn alive_at(&self, level: f64) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.birth >= level && p.death < level)
            .count()
    }

    /// Rank of the map from the homology at level `hi` into the homology at
    /// level `lo ≤ hi`: classes born at or above `hi` still alive at `lo`.
    pub fn persistent_rank(&self, hi: f64, lo: f64) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.birth >= hi && p.death < lo)
            .count()
    }

    /// Persistence values sorted in decreasing order (essentials first).
    pub fn persistences(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.pairs.iter().map(Pair::persistence).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// The diagram of the filtration stopped at level `floor`: deaths below
    /// it (essential classes included) move up to `floor`, and pairs born at
    /// or below it vanish.
    pub fn truncated(&self, floor: f64) -> Self {
        let pairs = self
            .pairs
            .iter()
            .filter(|p| p.birth > floor)
            .map(|p| Pair::new(p.birth, p.death.max(floor)))
            .collect();
        Self::new(self.degree, pairs).expect("finite pairs")
    }

    /// Pairs with persistence at least `min_length` (essentials always kept).
    pub fn filtered(&self, min_length: f64) -> Self {
        Self {
            degree: self.degree,
            pairs: self
                .pairs
                .iter()
                .copied()
                .filter(|p| p.persistence() >= min_length)
                .collect(),
        }
    }
}

fn fmt_level(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        // shortest representation that parses back to the same value
        format!("{x:?}")
    }
}

/// Writes `degree<TAB>birth<TAB>death` lines, degrees ascending.
pub fn write_tsv(diagrams: &[PersistenceDiagram]) -> String {
    let mut sorted: Vec<&PersistenceDiagram> = diagrams.iter().collect();
    sorted.sort_by_key(|d| d.degree);
    let mut out = String::new();
    for d in sorted {
        for p in &d.pairs {
            let _ = writeln!(
                out,
                "{}\t{}\t{}",
                d.degree,
                fmt_level(p.birth),
                fmt_level(p.death)
            );
        }
    }
    out
}

/// Parses diagram TSV. Blank lines and lines starting with `#` are skipped.
/// Returns one diagram per degree from 0 to the largest degree present.
pub fn parse_tsv(text: &str) -> Result<Vec<PersistenceDiagram>> {
    let mut by_degree: Vec<Vec<Pair>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(err(format!(
                "expected 3 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let degree: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| err(format!("bad degree `{}`", fields[0])))?;
        let num = |s: &str| -> Result<f64> {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|_| err(format!("bad number `{s}`")))
        };
        let (birth, death) = (num(fields[1])?, num(fields[2])?);
        let pair = Pair::new(birth, death);
        if !birth.is_finite() || !(pair.is_essential() || (death.is_finite() && birth > death)) {
            return Err(err(format!("invalid pair ({birth}, {death})")));
        }
        if by_degree.len() <= degree {
            by_degree.resize(degree + 1, Vec::new());
        }
        by_degree[degree].push(pair);
    }
    by_degree
        .into_iter()
        .enumerate()
        .map(|(k, pairs)| PersistenceDiagram::new(k, pairs))
        .collect()
}

/// The diagram of `degree` from a parsed file; an absent degree is empty.
pub fn degree_of(diagrams: &[PersistenceDiagram], degree: usize) -> PersistenceDiagram {
    diagrams
        .iter()
        .find(|d| d.degree == degree)
        .cloned()
        .unwrap_or_else(|| PersistenceDiagram::empty(degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn truncation_at_a_floor() {
        let d = PersistenceDiagram::new(
            0,
            vec![
                Pair::essential(3.0),
                Pair::new(2.0, 0.5),
                Pair::new(1.0, -1.0),
                Pair::essential(-0.5),
            ],
        )
        .unwrap();
        let t = d.truncated(0.0);
        assert_eq!(
            t.pairs(),
            &[
                Pair::new(3.0, 0.0),
                Pair::new(2.0, 0.5),
                Pair::new(1.0, 0.0)
            ]
        );
        assert_eq!(t.essential_count(), 0);
    }

    #[test]
    fn rejects_inverted_pairs() {
        assert!(PersistenceDiagram::new(0, vec![Pair::new(1.0, 2.0)]).is_err());
        assert!(PersistenceDiagram::new(0, vec![Pair::new(1.0, 1.0)]).is_err());
        assert!(PersistenceDiagram::new(0, vec![Pair::new(f64::INFINITY, 1.0)]).is_err());
        assert!(PersistenceDiagram::new(0, vec![Pair::essential(1.0)]).is_ok());
    }

    #[test]
    fn tsv_format() {
        let d =
            PersistenceDiagram::new(0, vec![Pair::essential(2.0), Pair::new(2.0, 1.0)]).unwrap();
        let h1 = PersistenceDiagram::new(1, vec![Pair::new(1.0, 0.0)]).unwrap();
        let text = write_tsv(&[h1, d]);
        assert_eq!(text, "0\t2.0\t1.0\n0\t2.0\t-inf\n1\t1.0\t0.0\n");
        let back = parse_tsv(&text).unwrap();
        assert_eq!(write_tsv(&back), text);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_tsv("0\t1\t0\n\n0\t1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_tsv("0\t0\t1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_tsv("x\t1\t0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn absent_degree_is_empty() {
        let ds = parse_tsv("2\t1\t0\n").unwrap();
        assert_eq!(ds.len(), 3);
        assert!(degree_of(&ds, 0).is_empty());
        assert!(degree_of(&ds, 7).is_empty());
        assert_eq!(degree_of(&ds, 2).len(), 1);
    }

    #[test]
    fn rank_queries() {
        let d = PersistenceDiagram::new(
            1,
            vec![
                Pair::new(3.0, 1.0),
                Pair::new(2.0, 0.0),
                Pair::essential(0.5),
            ],
        )
        .unwrap();
        assert_eq!(d.alive_at(2.0), 2);
        assert_eq!(d.alive_at(0.5), 2);
        assert_eq!(d.persistent_rank(2.0, 1.0), 1);
        assert_eq!(d.persistent_rank(3.0, 0.5), 0);
    }

    proptest! {
        #[test]
        fn tsv_round_trips(raw in prop::collection::vec((0usize..3, -1e6f64..1e6, 1e-3f64..1e3, any::<bool>()), 0..30)) {
            let mut per: Vec<Vec<Pair>> = vec![Vec::new(); 3];
            for (k, b, len, ess) in raw {
                per[k].push(if ess { Pair::essential(b) } else { Pair::new(b, b - len) });
            }
            let ds: Vec<PersistenceDiagram> = per.into_iter().enumerate().map(|(k, p)| PersistenceDiagram::new(k, p).unwrap()).collect();
            let text = write_tsv(&ds);
            let back = parse_tsv(&text).unwrap();
            for d in &ds {
                prop_assert_eq!(&degree_of(&back, d.degree()), d);
            }
            prop_assert_eq!(write_tsv(&back), text);
        }
    }
}
