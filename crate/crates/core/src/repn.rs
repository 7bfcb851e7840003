//! Exact representation-theoretic counting for tensor powers of the
//! defining representation of sl(r+1).
//!
//! All multiplicities are `BigUint`; floating point only appears in the
//! logarithmic efficiency figures, which are derived from the exact integers.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Irrep `D_j` of sl(2), stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IrrepLabelSl2 {
    pub two_j: u32,
}

impl IrrepLabelSl2 {
    pub fn j(&self) -> f64 {
        f64::from(self.two_j) / 2.0
    }
}

impl fmt::Display for IrrepLabelSl2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j.is_multiple_of(2) {
            write!(f, "D_{}", self.two_j / 2)
        } else {
            write!(f, "D_{}/2", self.two_j)
        }
    }
}

/// Partition shape, rows weakly decreasing and strictly positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YoungDiagram {
    rows: Vec<usize>,
}

impl YoungDiagram {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.contains(&0) {
            return Err(Error::InvalidPartition(format!("{rows:?} has an empty row")));
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{rows:?} is not weakly decreasing")));
        }
        Ok(Self { rows })
    }

    /// `n` rows by `m` columns.
    pub fn rectangle(n: usize, m: usize) -> Self {
        if m == 0 {
            return Self { rows: Vec::new() };
        }
        Self { rows: vec![m; n] }
    }

    pub fn empty() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn box_count(&self) -> usize {
        self.rows.iter().sum()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Column lengths.
    pub fn conjugate(&self) -> Vec<usize> {
        let width = self.rows.first().copied().unwrap_or(0);
        (0..width).map(|j| self.rows.iter().filter(|&&r| r > j).count()).collect()
    }

    fn hooks(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let cols = self.conjugate();
        self.rows.iter().enumerate().flat_map(move |(i, &len)| {
            let cols = cols.clone();
            (0..len).map(move |j| (i, j, (len - j - 1) + (cols[j] - i - 1) + 1))
        })
    }

    /// Rows at which a box may be added while staying a partition with at most `max_rows` rows.
    fn addable_rows(&self, max_rows: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for i in 0..=self.rows.len() {
            if i >= max_rows {
                break;
            }
            let cur = self.rows.get(i).copied().unwrap_or(0);
            if i == 0 || self.rows[i - 1] > cur {
                out.push(i);
            }
        }
        out
    }

    fn with_box(&self, row: usize) -> Self {
        let mut rows = self.rows.clone();
        if row == rows.len() {
            rows.push(1);
        } else {
            rows[row] += 1;
        }
        Self { rows }
    }

    /// Strips full columns of height `height` (equivalent sl(height) irrep).
    fn reduce(&self, height: usize) -> Self {
        if self.rows.len() < height {
            return self.clone();
        }
        let full = self.rows[height - 1];
        let rows = self.rows.iter().map(|&r| r - full).filter(|&r| r > 0).collect();
        Self { rows }
    }

    /// Dimension of the sl(rank+1) irrep with this highest weight (hook-content formula).
    pub fn sl_dimension(&self, rank: usize) -> BigUint {
        let d = rank + 1;
        if self.rows.len() > d {
            return BigUint::zero();
        }
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for (i, j, hook) in self.hooks() {
            num *= BigUint::from(d + j - i);
            den *= BigUint::from(hook);
        }
        num / den
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows.iter().map(usize::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Label of an irreducible summand; knows its own dimension.
pub trait IrrepLabel: Clone + Ord {
    fn dimension(&self, rank: usize) -> BigUint;
}

impl IrrepLabel for IrrepLabelSl2 {
    fn dimension(&self, _rank: usize) -> BigUint {
        BigUint::from(self.two_j + 1)
    }
}

impl IrrepLabel for YoungDiagram {
    fn dimension(&self, rank: usize) -> BigUint {
        self.sl_dimension(rank)
    }
}

/// Multiplicity table of a tensor power, ordered by descending irrep dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition<L> {
    pub rank: usize,
    pub replicas: usize,
    pub entries: Vec<(L, BigUint)>,
}

impl<L: IrrepLabel> Decomposition<L> {
    fn from_map(rank: usize, replicas: usize, map: BTreeMap<L, BigUint>) -> Self {
        let mut entries: Vec<_> = map.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        // descending dimension; ties broken by descending label for determinism
        entries.sort_by(|(a, _), (b, _)| {
            b.dimension(rank).cmp(&a.dimension(rank)).then_with(|| b.cmp(a))
        });
        Self { rank, replicas, entries }
    }

    pub fn multiplicity(&self, label: &L) -> BigUint {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, m)| m.clone())
            .unwrap_or_default()
    }

    /// `Σ n_j dim(D_j)`; equals `d^N` for a correct decomposition.
    pub fn dimension_sum(&self) -> BigUint {
        self.entries.iter().map(|(l, m)| m * l.dimension(self.rank)).sum()
    }
}

/// `D_{1/2}^{⊗N}` by adding one spin-½ at a time.
pub fn cg_sl2(replicas: usize) -> Result<Decomposition<IrrepLabelSl2>> {
    if replicas == 0 {
        return Err(Error::NoReplicas);
    }
    let mut counts: BTreeMap<u32, BigUint> = BTreeMap::from([(1, BigUint::one())]);
    for _ in 1..replicas {
        let mut next: BTreeMap<u32, BigUint> = BTreeMap::new();
        for (two_j, m) in counts {
            *next.entry(two_j + 1).or_default() += &m;
            if two_j > 0 {
                *next.entry(two_j - 1).or_default() += m;
            }
        }
        counts = next;
    }
    let map = counts.into_iter().map(|(two_j, m)| (IrrepLabelSl2 { two_j }, m)).collect();
    Ok(Decomposition::from_map(1, replicas, map))
}

/// Full decomposition of the N-th tensor power of the defining sl(r+1) rep,
/// labelled by partitions of N with at most r+1 rows.
pub fn tensor_power_decomposition(replicas: usize, rank: usize) -> Result<Decomposition<YoungDiagram>> {
    if rank < 1 {
        return Err(Error::InvalidRank(rank));
    }
    if replicas == 0 {
        return Err(Error::NoReplicas);
    }
    let map = box_walk(replicas, rank + 1, None);
    Ok(Decomposition::from_map(rank, replicas, map))
}

/// Counts box-adding paths of length `steps`; with `reduce_height` set, full
/// columns are stripped after every step so the state space stays small.
fn box_walk(steps: usize, height: usize, reduce_height: Option<usize>) -> BTreeMap<YoungDiagram, BigUint> {
    let mut layer: BTreeMap<YoungDiagram, BigUint> = BTreeMap::from([(YoungDiagram::empty(), BigUint::one())]);
    for _ in 0..steps {
        let mut next: BTreeMap<YoungDiagram, BigUint> = BTreeMap::new();
        for (shape, count) in &layer {
            for row in shape.addable_rows(height) {
                let mut grown = shape.with_box(row);
                if let Some(h) = reduce_height {
                    grown = grown.reduce(h);
                }
                *next.entry(grown).or_default() += count;
            }
        }
        layer = next;
    }
    layer
}

/// Multiplicity `n(N)` of the trivial irrep of sl(r+1) in the N-th tensor power.
pub fn singlet_multiplicity(replicas: usize, rank: usize) -> BigUint {
    let d = rank.max(1) + 1;
    if replicas == 0 || !replicas.is_multiple_of(d) {
        return BigUint::zero();
    }
    box_walk(replicas, d, Some(d)).remove(&YoungDiagram::empty()).unwrap_or_default()
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// `N! / ((N/2)! (N/2 + 1)!)`.
pub fn catalan_singlets(replicas: usize) -> Result<BigUint> {
    if replicas < 2 || !replicas.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "closed form needs an even replica count >= 2, got {replicas}"
        )));
    }
    let half = replicas / 2;
    Ok(factorial(replicas) / (factorial(half) * factorial(half + 1)))
}

/// Number of standard Young tableaux of `shape` via the hook-length formula.
pub fn hook_length_count(shape: &YoungDiagram) -> BigUint {
    let hooks: BigUint = shape.hooks().map(|(_, _, h)| BigUint::from(h)).product();
    factorial(shape.box_count()) / hooks
}

/// Largest shape [`enumerate_syt`] will walk.
pub const SYT_ENUMERATION_GUARD: usize = 12;

/// Exhaustive count of standard fillings by placing `1..=n` one at a time.
pub fn enumerate_syt(shape: &YoungDiagram) -> Result<u64> {
    let n = shape.box_count();
    if n > SYT_ENUMERATION_GUARD {
        return Err(Error::EnumerationGuard { boxes: n, limit: SYT_ENUMERATION_GUARD });
    }
    fn place(filled: &mut Vec<usize>, target: &[usize]) -> u64 {
        if filled.iter().eq(target.iter()) {
            return 1;
        }
        let mut total = 0;
        for i in 0..target.len() {
            // the next number may go at the end of row i if the row has room
            // and the cell above it is already filled
            let above_ok = i == 0 || filled[i - 1] > filled[i];
            if filled[i] < target[i] && above_ok {
                filled[i] += 1;
                total += place(filled, target);
                filled[i] -= 1;
            }
        }
        total
    }
    let mut filled = vec![0; shape.rows.len()];
    Ok(place(&mut filled, &shape.rows))
}

/// All partitions of `n`, in reverse lexicographic order.
pub fn partitions(n: usize) -> Vec<YoungDiagram> {
    fn rec(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<YoungDiagram>) {
        if remaining == 0 {
            out.push(YoungDiagram { rows: prefix.clone() });
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// `log2` of a big integer from its bit length and leading 64 bits.
pub fn big_log2(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().expect("fits in 64 bits") as f64).log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("64 leading bits");
    (top as f64).log2() + shift as f64
}

/// Storage figures of merit for the code of N replicas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EncodingEfficiency {
    pub log2_n: f64,
    /// `log2 n(N) / N`, logical qubits per replica.
    pub per_replica: f64,
    /// `log2(n(N) / d^N)`; kept logarithmic since the fraction underflows quickly.
    pub log2_hilbert_fraction: f64,
}

impl EncodingEfficiency {
    /// `n(N)/d^N` as an `f64` (zero once it underflows).
    pub fn hilbert_fraction(&self) -> f64 {
        self.log2_hilbert_fraction.exp2()
    }

    /// The Hilbert-space fraction in scientific notation, valid beyond `f64` range.
    pub fn hilbert_fraction_display(&self) -> String {
        let log10 = self.log2_hilbert_fraction * std::f64::consts::LOG10_2;
        let exp = log10.floor();
        let mantissa = 10f64.powf(log10 - exp);
        format!("{mantissa:.6}e{}", exp as i64)
    }
}

pub fn encoding_efficiency(replicas: usize, rank: usize) -> Result<EncodingEfficiency> {
    let n = singlet_multiplicity(replicas, rank);
    if n.is_zero() {
        return Err(Error::EmptyCode(format!(
            "n({replicas}) = 0 for rank {rank}; N must be a positive multiple of {}",
            rank + 1
        )));
    }
    let log2_n = big_log2(&n);
    let d = (rank + 1) as f64;
    Ok(EncodingEfficiency {
        log2_n,
        per_replica: log2_n / replicas as f64,
        log2_hilbert_fraction: log2_n - replicas as f64 * d.log2(),
    })
}
