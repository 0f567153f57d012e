//! Finite-depth substitution: tilings, digit expansions and paths,
//! recurrence of patches, and the measure-preserving projection to 1-D.

mod check;
mod project;

pub use check::{attractor_hulls, verify_geometry, GeometryReport};
pub use project::{project_to_1d, Projection};

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::{Frame, Planar, Polygon, Polyline, Similarity};
use crate::rules::{PartitionMatrix, RuleSystem, Shape};

pub const DEFAULT_TILE_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Children shrink by `1/ρ` per level inside the fixed root shape.
    DecomposeInPlace,
    /// The root is magnified by `ρ^depth`; leaves keep reference size.
    InflateOutward,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlacedTile {
    pub type_id: usize,
    pub transform: Similarity,
}

#[derive(Clone, Debug)]
pub struct Tiling {
    pub rule: RuleSystem,
    pub root_type: usize,
    pub depth: u32,
    pub mode: Mode,
    /// Depth-first, in declared piece order.
    pub tiles: Vec<PlacedTile>,
}

impl Tiling {
    pub fn frame(&self) -> Frame {
        self.rule.frame()
    }

    /// Placed polygons, for rules with polygonal shapes.
    pub fn polygons(&self) -> Option<Vec<Polygon>> {
        let frame = self.frame();
        self.tiles
            .iter()
            .map(|t| {
                self.rule.types[t.type_id]
                    .polygon()
                    .map(|p| p.transform(&frame, &t.transform))
            })
            .collect()
    }

    /// Placed intervals `[a, b]`, for 1-D rules.
    pub fn intervals(&self) -> Option<Vec<(f64, f64)>> {
        let frame = self.frame();
        self.tiles
            .iter()
            .map(|t| match &self.rule.types[t.type_id].shape {
                Shape::Interval(len) => {
                    let a = frame.apply(&t.transform, Complex64::new(0.0, 0.0)).re;
                    let b = frame.apply(&t.transform, Complex64::new(len.to_f64(), 0.0)).re;
                    Some((a.min(b), a.max(b)))
                }
                _ => None,
            })
            .collect()
    }

    /// The root shape in the coordinates of the tiles.
    pub fn root_transform(&self) -> Similarity {
        match self.mode {
            Mode::DecomposeInPlace => Similarity::IDENTITY,
            Mode::InflateOutward => Similarity {
                scale: self.depth as i32,
                ..Similarity::IDENTITY
            },
        }
    }

    pub fn decorations(&self) -> Vec<Polyline> {
        let frame = self.frame();
        self.tiles
            .iter()
            .flat_map(|t| {
                self.rule.types[t.type_id]
                    .decorations
                    .iter()
                    .map(|d| d.transform(&frame, &t.transform))
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

/// `Σ_j (U^k)[root][j]` for `k = 0..=n`.
pub fn tile_counts(u: &PartitionMatrix, root: usize, n: u32) -> Vec<BigUint> {
    let size = u.size();
    let mut v: Vec<BigUint> = (0..size)
        .map(|j| if j == root { BigUint::one() } else { BigUint::zero() })
        .collect();
    let mut out = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        out.push(v.iter().sum());
        if k < n {
            v = (0..size)
                .map(|j| (0..size).map(|i| &v[i] * u.get(i, j)).sum())
                .collect();
        }
    }
    out
}

fn check_root(rule: &RuleSystem, root: usize) -> Result<()> {
    if root >= rule.types.len() {
        return Err(Error::invalid(format!(
            "root type {root} out of range; rule '{}' has {} types",
            rule.name,
            rule.types.len()
        )));
    }
    Ok(())
}

/// Refuses expansions whose leaf count exceeds `cap`; returns the count.
pub fn check_cap(rule: &RuleSystem, root: usize, depth: u32, cap: u64) -> Result<u64> {
    check_root(rule, root)?;
    let count = tile_counts(&rule.partition_matrix(), root, depth)
        .pop()
        .expect("counts are non-empty");
    match count.to_u64() {
        Some(c) if c <= cap => Ok(c),
        _ => Err(Error::CapExceeded {
            count: count.to_string(),
            cap,
        }),
    }
}

/// Leaves of the substitution tree of `root` to `depth`, with the composed
/// decompose-in-place maps and the piece indices leading to them.
fn leaves(rule: &RuleSystem, root: usize, depth: u32, base: Similarity) -> Vec<(usize, Similarity, Vec<usize>)> {
    let frame = rule.frame();
    let maps: Vec<Vec<Similarity>> = rule
        .pieces
        .iter()
        .map(|row| row.iter().map(|p| p.similarity(&frame)).collect())
        .collect();
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(depth as usize);
    #[allow(clippy::too_many_arguments)]
    fn walk(
        rule: &RuleSystem,
        frame: &Frame,
        maps: &[Vec<Similarity>],
        t: usize,
        s: Similarity,
        left: u32,
        path: &mut Vec<usize>,
        out: &mut Vec<(usize, Similarity, Vec<usize>)>,
    ) {
        if left == 0 {
            out.push((t, s, path.clone()));
            return;
        }
        for (k, p) in rule.pieces[t].iter().enumerate() {
            path.push(k);
            walk(
                rule,
                frame,
                maps,
                p.child,
                frame.compose(&s, &maps[t][k]),
                left - 1,
                path,
                out,
            );
            path.pop();
        }
    }
    walk(rule, &frame, &maps, root, base, depth, &mut path, &mut out);
    out
}

/// Substitutes `root` `depth` times inside its own reference shape.
pub fn decompose(rule: &RuleSystem, root: usize, depth: u32, cap: u64) -> Result<Tiling> {
    check_cap(rule, root, depth, cap)?;
    let tiles = leaves(rule, root, depth, Similarity::IDENTITY)
        .into_iter()
        .map(|(type_id, transform, _)| PlacedTile { type_id, transform })
        .collect();
    Ok(Tiling {
        rule: rule.clone(),
        root_type: root,
        depth,
        mode: Mode::DecomposeInPlace,
        tiles,
    })
}

/// The same tree as [`decompose`], magnified by `ρ^depth` so that leaves
/// are copies of the reference shapes.
pub fn inflate_outward(rule: &RuleSystem, root: usize, depth: u32, cap: u64) -> Result<Tiling> {
    check_cap(rule, root, depth, cap)?;
    let base = Similarity {
        scale: depth as i32,
        ..Similarity::IDENTITY
    };
    let tiles = leaves(rule, root, depth, base)
        .into_iter()
        .map(|(type_id, transform, _)| PlacedTile { type_id, transform })
        .collect();
    Ok(Tiling {
        rule: rule.clone(),
        root_type: root,
        depth,
        mode: Mode::InflateOutward,
        tiles,
    })
}

/// One digit of an expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionStep {
    /// Index of the piece in its parent's row.
    pub piece: usize,
    /// Index of the digit in the rule's digit set.
    pub digit: usize,
    /// Type reached after this step.
    pub child: usize,
    pub rot: i32,
    pub conj: bool,
}

/// A finite expansion `z = Σ_k ρ^{-k} u_k(z_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DigitExpansion {
    pub root: usize,
    pub steps: Vec<ExpansionStep>,
    /// Partial sums after `0, 1, …, len` digits.
    pub partials: Vec<Planar>,
}

impl DigitExpansion {
    pub fn value(&self) -> Planar {
        *self.partials.last().expect("partials include the empty sum")
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// The expansion selecting the given piece indices from `root` downwards.
pub fn expansion_from_pieces(rule: &RuleSystem, root: usize, pieces: &[usize]) -> Result<DigitExpansion> {
    check_root(rule, root)?;
    let frame = rule.frame();
    let digits = rule.digit_set();
    let mut t = root;
    let mut s = Similarity::IDENTITY;
    let mut steps = Vec::with_capacity(pieces.len());
    let mut partials = vec![Complex64::new(0.0, 0.0)];
    for (level, &k) in pieces.iter().enumerate() {
        let p = rule.pieces[t].get(k).ok_or_else(|| {
            Error::invalid(format!(
                "digit {level}: type '{}' has no piece {k} (it has {})",
                rule.types[t].name,
                rule.pieces[t].len()
            ))
        })?;
        s = frame.compose(&s, &p.similarity(&frame));
        partials.push(s.translation);
        let v = p.digit.value();
        steps.push(ExpansionStep {
            piece: k,
            digit: digits
                .iter()
                .position(|d| (d - v).norm() < 1e-12)
                .expect("digit in set"),
            child: p.child,
            rot: p.rot,
            conj: p.conj,
        });
        t = p.child;
    }
    Ok(DigitExpansion { root, steps, partials })
}

/// One expansion per leaf of the depth-`depth` substitution tree of `root`.
pub fn expansions(rule: &RuleSystem, root: usize, depth: u32, cap: u64) -> Result<Vec<DigitExpansion>> {
    if depth == 0 {
        return Err(Error::invalid("expansions need depth at least 1"));
    }
    check_cap(rule, root, depth, cap)?;
    leaves(rule, root, depth, Similarity::IDENTITY)
        .into_iter()
        .map(|(_, _, path)| expansion_from_pieces(rule, root, &path))
        .collect()
}

/// Polygonal path through the partial sums of an expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct DigitPath {
    pub polyline: Polyline,
    /// Set when every digit is zero; the path is then two copies of 0.
    pub degenerate: bool,
}

/// Vertices are the distinct successive partial sums; zero digits add no
/// segment.
pub fn path(e: &DigitExpansion) -> Result<DigitPath> {
    if e.is_empty() {
        return Err(Error::invalid("path needs a non-empty expansion"));
    }
    let mut vs: Vec<Planar> = vec![e.partials[0]];
    for &p in &e.partials[1..] {
        if (p - *vs.last().unwrap()).norm() > 0.0 {
            vs.push(p);
        }
    }
    let degenerate = vs.len() == 1;
    if degenerate {
        vs.push(vs[0]);
    }
    Ok(DigitPath {
        polyline: Polyline::new(vs)?,
        degenerate,
    })
}

/// Follows `splice` (piece indices) from `root`; if it ends at a tile of
/// type `root`, compares the depth-`k` tree of `root` with the subtree
/// hanging below the splice, leaf by leaf.
pub fn recurrence_check(rule: &RuleSystem, root: usize, k: u32, splice: &[usize]) -> Result<bool> {
    let e = expansion_from_pieces(rule, root, splice)?;
    let end = e.steps.last().map_or(root, |s| s.child);
    if end != root {
        return Ok(false);
    }
    let frame = rule.frame();
    let mut a = Similarity::IDENTITY;
    let mut t = root;
    for &i in splice {
        a = frame.compose(&a, &rule.pieces[t][i].similarity(&frame));
        t = rule.pieces[t][i].child;
    }
    let base = leaves(rule, root, k, Similarity::IDENTITY);
    let spliced = leaves(rule, end, k, a);
    if base.len() != spliced.len() {
        return Ok(false);
    }
    let scale = frame.radix_pow(a.scale).norm().max(1e-300);
    Ok(base.iter().zip(&spliced).all(|((t1, s1, p1), (t2, s2, p2))| {
        let expect = frame.compose(&a, s1);
        t1 == t2
            && p1 == p2
            && expect.scale == s2.scale
            && expect.rot == s2.rot
            && expect.conj == s2.conj
            && (expect.translation - s2.translation).norm() <= 1e-12 * scale.max(1.0)
    }))
}
