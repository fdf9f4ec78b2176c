//! Finite posets, their Hasse arrows, and slice sequences.
//!
//! Three flavours share one [`Poset`] type:
//!
//! * grid windows `[lower, lower + shape]` of Z^d with the componentwise order,
//! * zigzag posets on `{1, ..., n}` whose Hasse quiver is an A_n quiver,
//! * arbitrary finite posets given by their covering relation.
//!
//! Elements are addressed by [`Point`]s. Grid points are coordinate vectors and
//! may lie outside the stored window (modules extend by zero there); zigzag
//! points are `[k]` with `1 <= k <= n`; elements of a finite poset are `[i]`
//! with `i` the 0-based position in the element list.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub Vec<i64>);

impl Point {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        Point(coords.into())
    }

    pub fn zero(dim: usize) -> Self {
        Point(vec![0; dim])
    }

    /// The diagonal vector `(e, ..., e)`.
    pub fn diagonal(dim: usize, e: i64) -> Self {
        Point(vec![e; dim])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm1(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn plus(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn offset(&self, e: i64) -> Point {
        Point(self.0.iter().map(|a| a + e).collect())
    }

    pub fn componentwise_le(&self, other: &Point) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Point)
            .map_err(|_| Error::UnknownElement(s.to_string()))
    }
}

impl From<Vec<i64>> for Point {
    fn from(v: Vec<i64>) -> Self {
        Point(v)
    }
}

impl<const N: usize> From<[i64; N]> for Point {
    fn from(v: [i64; N]) -> Self {
        Point(v.to_vec())
    }
}

/// The window `[lower, lower + shape]` of Z^d.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridPoset {
    lower: Vec<i64>,
    shape: Vec<usize>,
}

impl GridPoset {
    /// The grid `[0, l_1] x ... x [0, l_d]`.
    pub fn new(shape: impl Into<Vec<usize>>) -> Self {
        let shape = shape.into();
        GridPoset { lower: vec![0; shape.len()], shape }
    }

    pub fn with_lower(lower: impl Into<Vec<i64>>, shape: impl Into<Vec<usize>>) -> Result<Self> {
        let (lower, shape) = (lower.into(), shape.into());
        if lower.len() != shape.len() {
            return Err(Error::DimensionMismatch(lower.len(), shape.len()));
        }
        Ok(GridPoset { lower, shape })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn lower(&self) -> Point {
        Point(self.lower.clone())
    }

    pub fn upper(&self) -> Point {
        Point(self.lower.iter().zip(&self.shape).map(|(l, s)| l + *s as i64).collect())
    }

    pub fn len(&self) -> usize {
        self.shape.iter().map(|s| s + 1).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.dim() == self.dim()
            && x.0.iter().zip(self.lower.iter().zip(&self.shape)).all(|(c, (l, s))| *c >= *l && *c <= l + *s as i64)
    }

    /// Position of `x` in lexicographic order, if inside the window.
    pub fn index_of(&self, x: &Point) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let mut idx = 0usize;
        for ((c, l), s) in x.0.iter().zip(&self.lower).zip(&self.shape) {
            idx = idx * (s + 1) + (c - l) as usize;
        }
        Some(idx)
    }

    pub fn point(&self, mut idx: usize) -> Point {
        let mut coords = vec![0i64; self.dim()];
        for k in (0..self.dim()).rev() {
            let r = self.shape[k] + 1;
            coords[k] = self.lower[k] + (idx % r) as i64;
            idx /= r;
        }
        Point(coords)
    }

    /// All window points in lexicographic order.
    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// The window moved by `-delta` (the window of the shifted module `M[delta]`).
    pub fn translated_back(&self, delta: &Point) -> GridPoset {
        GridPoset { lower: self.lower.iter().zip(&delta.0).map(|(l, d)| l - d).collect(), shape: self.shape.clone() }
    }
}

/// Orientation of the Hasse arrow between `k` and `k + 1` in a zigzag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arrow {
    /// `k -> k+1`
    Forward,
    /// `k+1 -> k`
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZigzagPoset {
    orientation: Vec<Arrow>,
}

impl ZigzagPoset {
    /// `orientation` has length `n - 1` over `{F, B}`; `F` at position `k`
    /// (0-based) is the arrow `k+1 -> k+2`.
    pub fn new(n: usize, orientation: &str) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPoset("a zigzag needs at least one vertex".into()));
        }
        if orientation.chars().count() != n - 1 {
            return Err(Error::InvalidPoset(format!("orientation {orientation:?} must have length {}", n - 1)));
        }
        let orientation = orientation
            .chars()
            .map(|c| match c {
                'F' | 'f' => Ok(Arrow::Forward),
                'B' | 'b' => Ok(Arrow::Backward),
                other => Err(Error::InvalidPoset(format!("orientation letter {other:?} is not F or B"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ZigzagPoset { orientation })
    }

    pub fn equioriented(n: usize) -> Self {
        ZigzagPoset { orientation: vec![Arrow::Forward; n.saturating_sub(1)] }
    }

    /// All `2^(n-1)` orientations, in binary order with `F` as 0.
    pub fn all(n: usize) -> Vec<ZigzagPoset> {
        assert!(n >= 1);
        (0..1usize << (n - 1))
            .map(|mask| ZigzagPoset {
                orientation: (0..n - 1)
                    .map(|k| if mask >> k & 1 == 0 { Arrow::Forward } else { Arrow::Backward })
                    .collect(),
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.orientation.len() + 1
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.orientation
    }

    pub fn orientation_string(&self) -> String {
        self.orientation.iter().map(|a| if *a == Arrow::Forward { 'F' } else { 'B' }).collect()
    }

    /// `a <= b` in the path order, 1-based.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Equal => true,
            Less => self.orientation[a - 1..b - 1].iter().all(|&x| x == Arrow::Forward),
            Greater => self.orientation[b - 1..a - 1].iter().all(|&x| x == Arrow::Backward),
        }
    }

    fn check_range(&self, i: usize, j: usize) -> Result<()> {
        if i < 1 || i > j || j > self.n() {
            return Err(Error::RangeError(format!("need 1 <= i <= j <= {}, got i={i}, j={j}", self.n())));
        }
        Ok(())
    }

    /// Minimal and maximal elements of `{i, ..., j}` under the zigzag order.
    pub fn slices(&self, i: usize, j: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        self.check_range(i, j)?;
        let range: Vec<usize> = (i..=j).collect();
        let minimal = range.iter().copied().filter(|&k| !range.iter().any(|&m| m != k && self.leq(m, k))).collect();
        let maximal = range.iter().copied().filter(|&k| !range.iter().any(|&m| m != k && self.leq(k, m))).collect();
        Ok((minimal, maximal))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PosetKind {
    Grid(GridPoset),
    Zigzag(ZigzagPoset),
    Finite { names: Vec<String> },
}

/// A finite poset with its Hasse arrows and reachability closure.
#[derive(Clone, Debug)]
pub struct Poset {
    kind: PosetKind,
    len: usize,
    covering: Vec<(usize, usize)>,
    arrow_ids: HashMap<(usize, usize), usize>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
    /// Reachability matrix; grids answer from coordinates instead.
    closure: Option<Vec<bool>>,
    topo: Vec<usize>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.covering == other.covering
    }
}

impl Eq for Poset {}

impl Poset {
    pub fn grid(grid: GridPoset) -> Self {
        let len = grid.len();
        let mut covering = Vec::new();
        for idx in 0..len {
            let x = grid.point(idx);
            for k in 0..grid.dim() {
                let mut y = x.clone();
                y.0[k] += 1;
                if let Some(j) = grid.index_of(&y) {
                    covering.push((idx, j));
                }
            }
        }
        // lexicographic index order is a linear extension of the product order
        let topo = (0..len).collect();
        Self::assemble(PosetKind::Grid(grid), len, covering, None, topo)
    }

    pub fn zigzag(zz: ZigzagPoset) -> Self {
        let n = zz.n();
        let covering: Vec<(usize, usize)> = zz
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, a)| match a {
                Arrow::Forward => (k, k + 1),
                Arrow::Backward => (k + 1, k),
            })
            .collect();
        let closure: Vec<bool> = (0..n * n).map(|c| zz.leq(c / n + 1, c % n + 1)).collect();
        let topo = topo_order(n, &covering).expect("zigzags are acyclic");
        Self::assemble(PosetKind::Zigzag(zz), n, covering, Some(closure), topo)
    }

    /// A finite poset from element names and its covering pairs. Rejects cycles
    /// and covering pairs implied by longer paths.
    pub fn finite(names: Vec<String>, covering: Vec<(usize, usize)>) -> Result<Self> {
        let n = names.len();
        let mut seen = BTreeSet::new();
        for &(a, b) in &covering {
            if a >= n || b >= n {
                return Err(Error::InvalidPoset(format!("covering pair ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidPoset(format!("self-loop at {}", names[a])));
            }
            if !seen.insert((a, b)) {
                return Err(Error::InvalidPoset(format!("duplicate covering pair ({a},{b})")));
            }
        }
        let topo =
            topo_order(n, &covering).ok_or_else(|| Error::InvalidPoset("covering relation has a cycle".into()))?;
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in &covering {
            succ[a].push(b);
        }
        let mut closure = vec![false; n * n];
        for &v in topo.iter().rev() {
            closure[v * n + v] = true;
            for &w in &succ[v] {
                for t in 0..n {
                    if closure[w * n + t] {
                        closure[v * n + t] = true;
                    }
                }
            }
        }
        for &(a, b) in &covering {
            // a -> b is redundant if b is reachable through another successor
            if succ[a].iter().any(|&c| c != b && closure[c * n + b]) {
                return Err(Error::InvalidPoset(format!(
                    "covering pair {} -> {} is implied by a longer path",
                    names[a], names[b]
                )));
            }
        }
        let mut covering = covering;
        covering.sort_unstable();
        Ok(Self::assemble(PosetKind::Finite { names }, n, covering, Some(closure), topo))
    }

    fn assemble(
        kind: PosetKind,
        len: usize,
        covering: Vec<(usize, usize)>,
        closure: Option<Vec<bool>>,
        topo: Vec<usize>,
    ) -> Self {
        let mut incoming = vec![Vec::new(); len];
        let mut outgoing = vec![Vec::new(); len];
        let mut arrow_ids = HashMap::with_capacity(covering.len());
        for (id, &(a, b)) in covering.iter().enumerate() {
            incoming[b].push(id);
            outgoing[a].push(id);
            arrow_ids.insert((a, b), id);
        }
        Poset { kind, len, covering, arrow_ids, incoming, outgoing, closure, topo }
    }

    pub fn kind(&self) -> &PosetKind {
        &self.kind
    }

    pub fn as_grid(&self) -> Option<&GridPoset> {
        match &self.kind {
            PosetKind::Grid(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_zigzag(&self) -> Option<&ZigzagPoset> {
        match &self.kind {
            PosetKind::Zigzag(z) => Some(z),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Hasse arrows as `(source, target)` element indices.
    pub fn hasse_arrows(&self) -> &[(usize, usize)] {
        &self.covering
    }

    pub fn arrow_id(&self, source: usize, target: usize) -> Option<usize> {
        self.arrow_ids.get(&(source, target)).copied()
    }

    /// Ids of Hasse arrows ending at `v`.
    pub fn incoming(&self, v: usize) -> &[usize] {
        &self.incoming[v]
    }

    pub fn outgoing(&self, v: usize) -> &[usize] {
        &self.outgoing[v]
    }

    /// A linear extension of the order.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn index_of(&self, x: &Point) -> Option<usize> {
        match &self.kind {
            PosetKind::Grid(g) => g.index_of(x),
            PosetKind::Zigzag(z) => match x.0.as_slice() {
                [k] if *k >= 1 && *k as usize <= z.n() => Some(*k as usize - 1),
                _ => None,
            },
            PosetKind::Finite { names } => match x.0.as_slice() {
                [k] if *k >= 0 && (*k as usize) < names.len() => Some(*k as usize),
                _ => None,
            },
        }
    }

    pub fn point(&self, idx: usize) -> Point {
        match &self.kind {
            PosetKind::Grid(g) => g.point(idx),
            PosetKind::Zigzag(_) => Point(vec![idx as i64 + 1]),
            PosetKind::Finite { .. } => Point(vec![idx as i64]),
        }
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len).map(|i| self.point(i)).collect()
    }

    /// Name used in files and reports: `"x1,x2"` on grids, `"k"` on zigzags,
    /// the element name on finite posets.
    pub fn key(&self, x: &Point) -> String {
        match &self.kind {
            PosetKind::Finite { names } => match self.index_of(x) {
                Some(i) => names[i].clone(),
                None => x.to_string(),
            },
            _ => x.to_string(),
        }
    }

    pub fn parse_key(&self, key: &str) -> Result<Point> {
        let p = match &self.kind {
            PosetKind::Finite { names } => names
                .iter()
                .position(|n| n == key)
                .map(|i| Point(vec![i as i64]))
                .ok_or_else(|| Error::UnknownElement(key.to_string()))?,
            _ => key.parse::<Point>()?,
        };
        self.check_point(&p)?;
        Ok(p)
    }

    /// Grid points may lie anywhere in Z^d of the right dimension; other posets
    /// only accept their own elements.
    pub fn check_point(&self, x: &Point) -> Result<()> {
        let ok = match &self.kind {
            PosetKind::Grid(g) => x.dim() == g.dim(),
            _ => self.index_of(x).is_some(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnknownElement(x.to_string()))
        }
    }

    pub fn leq_idx(&self, a: usize, b: usize) -> bool {
        match (&self.kind, &self.closure) {
            (PosetKind::Grid(g), _) => g.point(a).componentwise_le(&g.point(b)),
            (_, Some(c)) => c[a * self.len + b],
            _ => unreachable!("non-grid posets carry a closure"),
        }
    }

    pub fn leq(&self, x: &Point, y: &Point) -> Result<bool> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(match &self.kind {
            PosetKind::Grid(_) => x.componentwise_le(y),
            _ => self.leq_idx(self.index_of(x).unwrap(), self.index_of(y).unwrap()),
        })
    }

    pub fn lt(&self, x: &Point, y: &Point) -> Result<bool> {
        Ok(x != y && self.leq(x, y)?)
    }

    /// Some Hasse path from `a` to `b` as a list of arrow ids; `None` if `a` is not below `b`.
    pub fn hasse_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        if !self.leq_idx(a, b) {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = a;
        while cur != b {
            let next = self.outgoing[cur]
                .iter()
                .copied()
                .find(|&id| self.leq_idx(self.covering[id].1, b))
                .expect("reachable target has a next step");
            path.push(next);
            cur = self.covering[next].1;
        }
        Some(path)
    }
}

fn topo_order(n: usize, covering: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in covering {
        indeg[b] += 1;
        succ[a].push(b);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// An ordered tuple of finite slices. Points inside a slice are kept sorted
/// lexicographically; that order fixes the basis of every operator built
/// from the sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceSequence {
    slices: Vec<Vec<Point>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SliceWarningKind {
    /// two points of one slice are comparable
    ComparableWithinSlice,
    /// a point of slice i+1 lies strictly below a point of slice i
    BackwardPair,
    /// a point of slice i has nothing strictly above it in slice i+1
    NoSuccessor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceWarning {
    pub kind: SliceWarningKind,
    pub slice: usize,
    pub message: String,
}

impl SliceSequence {
    pub fn new(slices: Vec<Vec<Point>>) -> Self {
        let slices = slices.into_iter().map(|s| s.into_iter().collect::<BTreeSet<_>>().into_iter().collect()).collect();
        SliceSequence { slices }
    }

    /// Singleton slices `({p_1}, ..., {p_n})`.
    pub fn singletons(points: impl IntoIterator<Item = Point>) -> Self {
        Self::new(points.into_iter().map(|p| vec![p]).collect())
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn slices(&self) -> &[Vec<Point>] {
        &self.slices
    }

    pub fn slice(&self, i: usize) -> &[Point] {
        &self.slices[i]
    }

    /// All points, slice by slice.
    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.slices.iter().flatten()
    }

    pub fn check_disjoint(&self) -> Result<()> {
        let mut owner: HashMap<&Point, usize> = HashMap::new();
        for (i, s) in self.slices.iter().enumerate() {
            for p in s {
                if let Some(&j) = owner.get(p) {
                    return Err(Error::OverlappingSlices(j + 1, i + 1, p.to_string()));
                }
                owner.insert(p, i);
            }
        }
        Ok(())
    }

    pub fn check_len(&self) -> Result<()> {
        if self.slices.len() < 2 {
            return Err(Error::TooFewSlices(self.slices.len()));
        }
        Ok(())
    }
}

/// Checks disjointness (an error) and, when `strict`, the three usual
/// well-formedness conditions on consecutive slices (warnings only).
pub fn validate_slices(poset: &Poset, slices: &SliceSequence, strict: bool) -> Result<Vec<SliceWarning>> {
    for p in slices.points() {
        poset.check_point(p)?;
    }
    slices.check_disjoint()?;
    let mut warnings = Vec::new();
    if !strict {
        return Ok(warnings);
    }
    let n = slices.len();
    for (i, s) in slices.slices().iter().enumerate() {
        'pairs: for (a, x) in s.iter().enumerate() {
            for y in &s[a + 1..] {
                if poset.leq(x, y)? || poset.leq(y, x)? {
                    warnings.push(SliceWarning {
                        kind: SliceWarningKind::ComparableWithinSlice,
                        slice: i + 1,
                        message: format!("comparable elements within a slice: {x} and {y} in S{}", i + 1),
                    });
                    break 'pairs;
                }
            }
        }
        if i + 1 == n {
            continue;
        }
        let next = slices.slice(i + 1);
        for x in s {
            for y in next {
                if poset.lt(y, x)? {
                    warnings.push(SliceWarning {
                        kind: SliceWarningKind::BackwardPair,
                        slice: i + 1,
                        message: format!("{y} in S{} lies below {x} in S{}", i + 2, i + 1),
                    });
                }
            }
            let mut has_successor = false;
            for y in next {
                if poset.lt(x, y)? {
                    has_successor = true;
                    break;
                }
            }
            if !has_successor {
                warnings.push(SliceWarning {
                    kind: SliceWarningKind::NoSuccessor,
                    slice: i + 1,
                    message: format!("{x} in S{} has no point above it in S{}", i + 1, i + 2),
                });
            }
        }
    }
    Ok(warnings)
}

/// Slices a grid by coordinate sum: slice `i` (1-based) holds the points whose
/// coordinate sum exceeds that of the lower corner by `i - 1`.
pub fn norm_slices(grid: &GridPoset) -> SliceSequence {
    let base = grid.lower().norm1();
    let n = grid.shape().iter().sum::<usize>() + 1;
    let mut slices = vec![Vec::new(); n];
    for p in grid.points() {
        slices[(p.norm1() - base) as usize].push(p);
    }
    SliceSequence::new(slices)
}

/// Minimal and maximal elements of `{i, ..., j}` in a zigzag (1-based).
pub fn zigzag_slices(zz: &ZigzagPoset, i: usize, j: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    zz.slices(i, j)
}

/// Points `x` of Z^d such that some `x + z` with `z` in a slice lies in the
/// window; outside this set every restricted space of a shifted module is zero.
pub fn minkowski_window(grid: &GridPoset, slices: &SliceSequence) -> Vec<Point> {
    let window = grid.points();
    let mut out = BTreeSet::new();
    for z in slices.points() {
        for g in &window {
            out.insert(g.minus(z));
        }
    }
    out.into_iter().collect()
}
