use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::field::Field;
use super::scalar::ExactScalar;
use super::subspace::Subspace;
use super::ExactError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `F_i ⊆ F_{i+1}`.
    Increasing,
    /// `F^p ⊇ F^{p+1}`.
    Decreasing,
}

/// A finite filtration of `F^n`.
///
/// Pieces are stored for indices `lo..=hi`. For an increasing flag the piece
/// is zero below `lo` and the full space above `hi`; for a decreasing flag it
/// is the full space below `lo` and zero above `hi`. A decreasing flag is
/// read as an increasing one through `F_i = F^{-i}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Flag<F> {
    ambient: usize,
    convention: Convention,
    lo: i64,
    pieces: Vec<Subspace<F>>,
}

impl<F: Field> Flag<F> {
    /// Validates monotonicity; `pieces[j]` is the piece at index `lo + j`.
    pub fn new(ambient: usize, convention: Convention, lo: i64, pieces: Vec<Subspace<F>>) -> Result<Self, ExactError> {
        for (j, p) in pieces.iter().enumerate() {
            if p.ambient_dim() != ambient {
                return Err(ExactError::AmbientMismatch { left: ambient, right: p.ambient_dim() });
            }
            if j > 0 {
                let prev = &pieces[j - 1];
                let ok = match convention {
                    Convention::Increasing => p.contains(prev),
                    Convention::Decreasing => prev.contains(p),
                };
                if !ok {
                    return Err(ExactError::NotMonotone { index: lo + j as i64 });
                }
            }
        }
        Ok(Flag { ambient, convention, lo, pieces }.normalized())
    }

    /// Drops stored pieces that equal the implicit boundary value, so that
    /// equal filtrations have equal representations.
    fn normalized(mut self) -> Self {
        let (low_trivial, high_trivial): (fn(&Subspace<F>) -> bool, fn(&Subspace<F>) -> bool) = match self.convention {
            Convention::Increasing => (Subspace::is_zero, Subspace::is_full),
            Convention::Decreasing => (Subspace::is_full, Subspace::is_zero),
        };
        while self.pieces.last().is_some_and(high_trivial) {
            self.pieces.pop();
        }
        let skip = self.pieces.iter().take_while(|p| low_trivial(p)).count();
        self.pieces.drain(..skip);
        self.lo += skip as i64;
        self
    }

    /// The flag with `F_i = V` for `i ≥ 0` and zero below, or its decreasing
    /// analogue `F^p = V` for `p ≤ 0`.
    pub fn trivial(ambient: usize, convention: Convention) -> Self {
        Flag { ambient, convention, lo: 0, pieces: vec![Subspace::full(ambient)] }.normalized()
    }

    /// Builds a decreasing flag from a single jump per basis vector: vector
    /// `v` with level `p` lies in `F^q` for all `q ≤ p`.
    pub fn decreasing_from_levels(ambient: usize, vectors: &[(i64, Vec<F>)]) -> Self {
        if vectors.is_empty() {
            return Flag { ambient, convention: Convention::Decreasing, lo: 0, pieces: vec![] };
        }
        let lo = vectors.iter().map(|(p, _)| *p).min().unwrap();
        let hi = vectors.iter().map(|(p, _)| *p).max().unwrap();
        let pieces = (lo..=hi)
            .map(|q| {
                let vs: Vec<Vec<F>> = vectors.iter().filter(|(p, _)| *p >= q).map(|(_, v)| v.clone()).collect();
                Subspace::span(ambient, &vs)
            })
            .collect();
        Flag { ambient, convention: Convention::Decreasing, lo, pieces }.normalized()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Stored index range `(lo, hi)`. Empty storage gives `hi = lo - 1`, and
    /// `lo` still marks where the flag jumps from one boundary value to the
    /// other.
    pub fn range(&self) -> (i64, i64) {
        (self.lo, self.lo + self.pieces.len() as i64 - 1)
    }

    /// The piece at `index` in the flag's own convention.
    pub fn at(&self, index: i64) -> Subspace<F> {
        let (lo, hi) = self.range();
        if index < lo {
            return match self.convention {
                Convention::Increasing => Subspace::zero(self.ambient),
                Convention::Decreasing => Subspace::full(self.ambient),
            };
        }
        if index > hi {
            return match self.convention {
                Convention::Increasing => Subspace::full(self.ambient),
                Convention::Decreasing => Subspace::zero(self.ambient),
            };
        }
        self.pieces[(index - lo) as usize].clone()
    }

    /// `F_i` read increasingly.
    pub fn inc(&self, i: i64) -> Subspace<F> {
        match self.convention {
            Convention::Increasing => self.at(i),
            Convention::Decreasing => self.at(-i),
        }
    }

    /// `F^p` read decreasingly.
    pub fn dec(&self, p: i64) -> Subspace<F> {
        match self.convention {
            Convention::Increasing => self.at(-p),
            Convention::Decreasing => self.at(p),
        }
    }

    /// An index range in the flag's convention outside of which the pieces
    /// are constant.
    pub fn support(&self) -> std::ops::RangeInclusive<i64> {
        let (lo, hi) = self.range();
        (lo - 1)..=(hi + 1)
    }

    /// Decreasing range `p` outside of which `F^p` is `V` or `0`.
    pub fn dec_support(&self) -> std::ops::RangeInclusive<i64> {
        let (lo, hi) = self.range();
        match self.convention {
            Convention::Decreasing => (lo - 1)..=(hi + 1),
            Convention::Increasing => (-hi - 1)..=(-lo + 1),
        }
    }

    /// Same filtration re-expressed in the other convention.
    pub fn reindexed(&self, convention: Convention) -> Self {
        if convention == self.convention {
            return self.clone();
        }
        let (_, hi) = self.range();
        let mut pieces = self.pieces.clone();
        pieces.reverse();
        Flag { ambient: self.ambient, convention, lo: -hi, pieces }
    }

    /// Shifts indices: the new piece at `i` is the old piece at `i + s`.
    pub fn shifted(&self, s: i64) -> Self {
        Flag { ambient: self.ambient, convention: self.convention, lo: self.lo - s, pieces: self.pieces.clone() }
    }

    /// Restriction to `sub`, in coordinates of the echelon basis of `sub`.
    pub fn restrict(&self, sub: &Subspace<F>) -> Self {
        let pieces = self.pieces.iter().map(|p| sub.relative(&p.intersection(sub))).collect();
        Flag { ambient: sub.dim(), convention: self.convention, lo: self.lo, pieces }.normalized()
    }

    /// Intersection of every piece with `sub`, kept in the ambient space.
    pub fn intersect_each(&self, sub: &Subspace<F>) -> Vec<(i64, Subspace<F>)> {
        self.support().map(|i| (i, self.at(i).intersection(sub))).collect()
    }

    /// Direct sum of flags on a direct sum of spaces.
    pub fn direct_sum(flags: &[Self], convention: Convention) -> Self {
        let ambient: usize = flags.iter().map(|f| f.ambient).sum();
        let flags: Vec<Self> = flags.iter().map(|f| f.reindexed(convention)).collect();
        let lo = flags.iter().map(|f| f.range().0).min().unwrap_or(0);
        let hi = flags.iter().map(|f| f.range().1).max().unwrap_or(-1);
        let pieces = (lo..=hi)
            .map(|i| {
                let mut vecs = Vec::new();
                let mut offset = 0;
                for f in &flags {
                    for v in f.at(i).vectors() {
                        let mut w = vec![F::zero(); ambient];
                        for (j, x) in v.into_iter().enumerate() {
                            w[offset + j] = x;
                        }
                        vecs.push(w);
                    }
                    offset += f.ambient;
                }
                Subspace::span(ambient, &vecs)
            })
            .collect();
        Flag { ambient, convention, lo, pieces }.normalized()
    }
}

#[derive(Serialize, Deserialize)]
struct PieceRepr {
    index: i64,
    basis: Vec<Vec<ExactScalar>>,
}

#[derive(Serialize, Deserialize)]
struct FlagRepr {
    ambient_dim: usize,
    convention: Convention,
    pieces: Vec<PieceRepr>,
}

impl Serialize for Flag<ExactScalar> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FlagRepr {
            ambient_dim: self.ambient,
            convention: self.convention,
            pieces: self.support().map(|i| PieceRepr { index: i, basis: self.at(i).vectors() }).collect(),
        }
        .serialize(serializer)
    }
}

/// Pieces may be listed sparsely; a missing index between listed ones
/// repeats the nearest listed piece on the side where the flag is smaller.
impl<'de> Deserialize<'de> for Flag<ExactScalar> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = FlagRepr::deserialize(deserializer)?;
        let n = repr.ambient_dim;
        let mut listed: Vec<(i64, Subspace<ExactScalar>)> = Vec::new();
        for p in repr.pieces {
            if let Some(bad) = p.basis.iter().find(|v| v.len() != n) {
                return Err(de::Error::custom(format!(
                    "flag piece {} has a vector of length {}, expected {n}",
                    p.index,
                    bad.len()
                )));
            }
            listed.push((p.index, Subspace::span(n, &p.basis)));
        }
        listed.sort_by_key(|(i, _)| *i);
        if listed.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(de::Error::custom("duplicate flag index"));
        }
        let Some(lo) = listed.first().map(|x| x.0) else {
            return Ok(Flag { ambient: n, convention: repr.convention, lo: 0, pieces: vec![] });
        };
        let hi = listed.last().unwrap().0;
        let pieces = (lo..=hi)
            .map(|i| match repr.convention {
                Convention::Increasing => listed.iter().rev().find(|(j, _)| *j <= i).unwrap().1.clone(),
                Convention::Decreasing => listed.iter().find(|(j, _)| *j >= i).unwrap().1.clone(),
            })
            .collect();
        Flag::new(n, repr.convention, lo, pieces).map_err(de::Error::custom)
    }
}
