//! Finite concept-class algebra: construction, restriction, realizability,
//! and the stock class generators.
//!
//! A concept is a total boolean labeling of a finite instance space, stored as
//! a packed bit row. A class is a deduplicated, order-preserving list of
//! concepts over a shared domain. Version spaces (the sub-classes consistent
//! with a set of examples) are represented downstream as index masks over the
//! parent class, so restriction reduces to a bitwise AND; this module also
//! offers a materializing `restrict` for the public API.

use std::fmt::Write as _;
use std::path::Path;

use crate::bits::Bits;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Index into the instance space `{0, ..., n-1}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Instance(pub usize);

/// A labeled example `(x, y)` with boolean label.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct LabeledExample {
    pub x: Instance,
    pub y: bool,
}

impl LabeledExample {
    pub fn new(x: usize, y: bool) -> Self {
        LabeledExample { x: Instance(x), y }
    }
}

pub type ExampleSequence = Vec<LabeledExample>;

/// A total labeling of the instance space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Concept {
    row: Bits,
}

impl Concept {
    pub fn from_bools(labels: &[bool]) -> Self {
        Concept {
            row: Bits::from_bools(labels),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.row.len()
    }

    #[inline]
    pub fn label(&self, x: Instance) -> bool {
        self.row.get(x.0)
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.row.len()).map(|i| self.row.get(i)).collect()
    }
}

impl std::fmt::Debug for Concept {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.row)
    }
}

/// Deduplicated finite set of concepts over a shared instance space.
///
/// Immutable after construction. `label_mask(x, y)` gives the set of concept
/// indices labeling `x` as `y`, precomputed so that version-space restriction
/// is a single AND.
#[derive(Clone, PartialEq, Eq)]
pub struct ConceptClass {
    domain_size: usize,
    concepts: Vec<Concept>,
    /// `masks[x]` = indices of concepts labeling `x` as 1.
    masks_one: Vec<Bits>,
}

impl ConceptClass {
    /// Build a class from label rows. Duplicate rows are dropped, keeping
    /// first-occurrence order. An empty row list is rejected; use
    /// [`ConceptClass::empty`] when the empty class is genuinely meant.
    pub fn new(rows: &[Vec<bool>]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyClass)?;
        let n = first.len();
        if n == 0 {
            return Err(Error::ZeroLengthRow);
        }
        let mut concepts: Vec<Concept> = Vec::new();
        for row in rows {
            if row.len() != n {
                return Err(Error::RaggedRows {
                    expected: n,
                    got: row.len(),
                });
            }
            let c = Concept::from_bools(row);
            if !concepts.contains(&c) {
                concepts.push(c);
            }
        }
        Ok(Self::from_concepts_unchecked(n, concepts))
    }

    /// The empty class over a given domain. Only constructible explicitly;
    /// it exists so that the Littlestone recursion's base case has a home.
    pub fn empty(domain_size: usize) -> Self {
        Self::from_concepts_unchecked(domain_size, Vec::new())
    }

    fn from_concepts_unchecked(domain_size: usize, concepts: Vec<Concept>) -> Self {
        let m = concepts.len();
        let masks_one = (0..domain_size)
            .map(|x| {
                let mut b = Bits::zeros(m);
                for (i, c) in concepts.iter().enumerate() {
                    if c.label(Instance(x)) {
                        b.set(i, true);
                    }
                }
                b
            })
            .collect();
        ConceptClass {
            domain_size,
            concepts,
            masks_one,
        }
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concept(&self, i: usize) -> &Concept {
        &self.concepts[i]
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn instances(&self) -> impl Iterator<Item = Instance> {
        (0..self.domain_size).map(Instance)
    }

    pub fn index_of(&self, c: &Concept) -> Option<usize> {
        self.concepts.iter().position(|d| d == c)
    }

    fn check_instance(&self, x: Instance) -> Result<()> {
        if x.0 >= self.domain_size {
            Err(Error::InstanceOutOfRange {
                x: x.0,
                domain: self.domain_size,
            })
        } else {
            Ok(())
        }
    }

    /// Borrowed mask of concepts labeling `x` as 1 (hot path for recursions).
    #[inline]
    pub fn mask_one(&self, x: Instance) -> &Bits {
        &self.masks_one[x.0]
    }

    /// Mask over concept indices: concepts labeling `x` as `y`.
    pub fn label_mask(&self, x: Instance, y: bool) -> Bits {
        if y {
            self.masks_one[x.0].clone()
        } else {
            let mut b = Bits::ones(self.concepts.len());
            for i in self.masks_one[x.0].iter_ones() {
                b.set(i, false);
            }
            b
        }
    }

    /// Mask of all concepts.
    pub fn full_mask(&self) -> Bits {
        Bits::ones(self.concepts.len())
    }

    /// Restrict a mask by one example (the AND mentioned above).
    pub fn restrict_mask(&self, mask: &Bits, e: LabeledExample) -> Bits {
        mask.and(&self.label_mask(e.x, e.y))
    }

    /// Mask of concepts consistent with every example in `seq`.
    pub fn consistent_mask(&self, seq: &[LabeledExample]) -> Bits {
        let mut m = self.full_mask();
        for &e in seq {
            m = self.restrict_mask(&m, e);
        }
        m
    }

    /// The class `C_{(x,y)}` of concepts consistent with `e`. May be empty.
    pub fn restrict(&self, e: LabeledExample) -> Result<ConceptClass> {
        self.check_instance(e.x)?;
        let keep: Vec<Concept> = self
            .concepts
            .iter()
            .filter(|c| c.label(e.x) == e.y)
            .cloned()
            .collect();
        Ok(Self::from_concepts_unchecked(self.domain_size, keep))
    }

    /// The sub-class selected by a mask.
    pub fn subclass(&self, mask: &Bits) -> ConceptClass {
        let keep: Vec<Concept> = mask.iter_ones().map(|i| self.concepts[i].clone()).collect();
        Self::from_concepts_unchecked(self.domain_size, keep)
    }

    /// True iff some concept is consistent with every example in `seq`.
    pub fn is_realizable(&self, seq: &[LabeledExample]) -> bool {
        if seq.iter().any(|e| e.x.0 >= self.domain_size) {
            return false;
        }
        !self.consistent_mask(seq).is_empty()
    }

    /// Add extra concepts (deduplicated) to form a hypothesis class; keeps
    /// the original order, appending new rows at the end.
    pub fn union(&self, extra: &ConceptClass) -> Result<ConceptClass> {
        if extra.domain_size != self.domain_size {
            return Err(Error::DomainMismatch {
                left: self.domain_size,
                right: extra.domain_size,
            });
        }
        let mut concepts = self.concepts.clone();
        for c in &extra.concepts {
            if !concepts.contains(c) {
                concepts.push(c.clone());
            }
        }
        Ok(Self::from_concepts_unchecked(self.domain_size, concepts))
    }

    pub fn with_all_zero(&self) -> ConceptClass {
        let zero = Concept::from_bools(&vec![false; self.domain_size]);
        let mut concepts = self.concepts.clone();
        if !concepts.contains(&zero) {
            concepts.push(zero);
        }
        Self::from_concepts_unchecked(self.domain_size, concepts)
    }

    // ---- generators ------------------------------------------------------

    /// `n` singleton indicators over `n` instances (identity matrix).
    pub fn singletons(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroLengthRow);
        }
        let rows: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|x| x == i).collect()).collect();
        Self::new(&rows)
    }

    /// The `n + 1` threshold functions `h_i(x) = 1[x >= i]` over `n` instances.
    pub fn thresholds(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroLengthRow);
        }
        let rows: Vec<Vec<bool>> = (0..=n).map(|i| (0..n).map(|x| x >= i).collect()).collect();
        Self::new(&rows)
    }

    /// All `2^d` labelings of `d` instances. Capped at `d <= 16`.
    pub fn powerset(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroLengthRow);
        }
        if d > 16 {
            return Err(Error::CapExceeded {
                what: "powerset domain",
                limit: 16,
            });
        }
        let rows: Vec<Vec<bool>> = (0..1u32 << d)
            .map(|bits| (0..d).map(|x| bits >> x & 1 == 1).collect())
            .collect();
        Self::new(&rows)
    }

    /// `m` random rows over `n` instances (deduplicated, so the class may be
    /// smaller). Deterministic for a given seed.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroLengthRow);
        }
        if m == 0 {
            return Err(Error::EmptyClass);
        }
        let mut rng = SplitMix64::new(seed);
        let rows: Vec<Vec<bool>> = (0..m)
            .map(|_| (0..n).map(|_| rng.next_bool()).collect())
            .collect();
        Self::new(&rows)
    }

    // ---- file format -----------------------------------------------------
    //
    // First non-comment line: "n m" (domain size, concept count), then m rows
    // of n characters in {0,1}. Lines starting with '#' are comments; blank
    // lines and surrounding whitespace are ignored.

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::ParseClass {
            line: 0,
            message: "missing header line".into(),
        })?;
        let mut parts = header.split_whitespace();
        let n: usize =
            parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::ParseClass {
                    line: 1,
                    message: "header must be `n m`".into(),
                })?;
        let m: usize =
            parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::ParseClass {
                    line: 1,
                    message: "header must be `n m`".into(),
                })?;
        let mut rows = Vec::with_capacity(m);
        for (k, line) in lines.enumerate() {
            if rows.len() == m {
                return Err(Error::ParseClass {
                    line: k + 2,
                    message: "more rows than declared".into(),
                });
            }
            let row: Vec<bool> = line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::ParseClass {
                        line: k + 2,
                        message: format!("unexpected character {other:?}"),
                    }),
                })
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(Error::ParseClass {
                    line: k + 2,
                    message: format!("row has {} labels, expected {n}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != m {
            return Err(Error::ParseClass {
                line: 0,
                message: format!("declared {m} rows, found {}", rows.len()),
            });
        }
        if m == 0 {
            return Ok(Self::empty(n));
        }
        Self::new(&rows)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.domain_size, self.concepts.len());
        for c in &self.concepts {
            for x in 0..self.domain_size {
                out.push(if c.label(Instance(x)) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_file_string()).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })
    }
}

impl std::fmt::Debug for ConceptClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ConceptClass[n={}; ", self.domain_size)?;
        let rows: Vec<String> = self.concepts.iter().map(|c| format!("{c:?}")).collect();
        write!(f, "{}]", rows.join(","))
    }
}

/// Descriptor for the class sources, as accepted by the CLI.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    Singletons(usize),
    Thresholds(usize),
    Powerset(usize),
    Random { n: usize, m: usize, seed: u64 },
    FromFile(std::path::PathBuf),
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<ConceptClass> {
        match self {
            GeneratorSpec::Singletons(n) => ConceptClass::singletons(*n),
            GeneratorSpec::Thresholds(n) => ConceptClass::thresholds(*n),
            GeneratorSpec::Powerset(d) => ConceptClass::powerset(*d),
            GeneratorSpec::Random { n, m, seed } => ConceptClass::random(*n, *m, *seed),
            GeneratorSpec::FromFile(path) => ConceptClass::from_file(path),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn make_class_dedups_in_order() {
        let c = ConceptClass::new(&[b("100"), b("010"), b("001")]).unwrap();
        assert_eq!(c.len(), 3);
        let d = ConceptClass::new(&[b("00"), b("00")]).unwrap();
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn make_class_rejects_bad_input() {
        assert!(matches!(
            ConceptClass::new(&[b("10"), b("1")]),
            Err(Error::RaggedRows { .. })
        ));
        assert!(matches!(ConceptClass::new(&[]), Err(Error::EmptyClass)));
        assert!(matches!(
            ConceptClass::new(&[vec![]]),
            Err(Error::ZeroLengthRow)
        ));
        let empty = ConceptClass::empty(3);
        assert!(empty.is_empty());
        assert_eq!(empty.domain_size(), 3);
    }

    #[test]
    fn restrict_matches_definition() {
        let s3 = ConceptClass::singletons(3).unwrap();
        let r = s3.restrict(LabeledExample::new(0, false)).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(format!("{:?}", r.concept(0)), "010");
        assert_eq!(format!("{:?}", r.concept(1)), "001");
        let r1 = s3.restrict(LabeledExample::new(0, true)).unwrap();
        assert_eq!(r1.len(), 1);
        assert_eq!(format!("{:?}", r1.concept(0)), "100");
        let p2 = ConceptClass::powerset(2).unwrap();
        let rp = p2.restrict(LabeledExample::new(0, true)).unwrap();
        let rows: Vec<String> = rp.concepts().iter().map(|c| format!("{c:?}")).collect();
        assert_eq!(rows, vec!["10", "11"]);
        assert!(s3.restrict(LabeledExample::new(7, true)).is_err());
    }

    #[test]
    fn realizability() {
        let s3 = ConceptClass::singletons(3).unwrap();
        assert!(!s3.is_realizable(&[LabeledExample::new(0, true), LabeledExample::new(1, true)]));
        assert!(s3.is_realizable(&[LabeledExample::new(0, false), LabeledExample::new(1, false)]));
        assert!(s3.is_realizable(&[]));
    }

    #[test]
    fn generators() {
        let s3 = ConceptClass::singletons(3).unwrap();
        assert_eq!(s3.len(), 3);
        let t4 = ConceptClass::thresholds(4).unwrap();
        assert_eq!(t4.len(), 5);
        let rows: Vec<String> = t4.concepts().iter().map(|c| format!("{c:?}")).collect();
        assert_eq!(rows, vec!["1111", "0111", "0011", "0001", "0000"]);
        let p2 = ConceptClass::powerset(2).unwrap();
        assert_eq!(p2.len(), 4);
        assert!(ConceptClass::powerset(17).is_err());
        let r1 = ConceptClass::random(5, 10, 1).unwrap();
        let r2 = ConceptClass::random(5, 10, 1).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn file_round_trip() {
        let t = ConceptClass::thresholds(3).unwrap();
        let text = t.to_file_string();
        let back = ConceptClass::parse(&text).unwrap();
        assert_eq!(t, back);
        let commented = format!("# threshold class\n  {}", text);
        assert_eq!(ConceptClass::parse(&commented).unwrap(), t);
        assert!(ConceptClass::parse("2 1\n012\n").is_err());
        assert!(ConceptClass::parse("2 2\n01\n").is_err());
    }

    #[test]
    fn masks_agree_with_restrict() {
        let p2 = ConceptClass::powerset(2).unwrap();
        let e = LabeledExample::new(1, true);
        let via_mask = p2.subclass(&p2.restrict_mask(&p2.full_mask(), e));
        let direct = p2.restrict(e).unwrap();
        assert_eq!(via_mask, direct);
    }
}
