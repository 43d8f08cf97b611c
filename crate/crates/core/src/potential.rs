//! Radial, non-negative, compactly supported pair potentials.

use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};

/// Shape of the potential on one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// `v = +∞` on the segment.
    Infinite,
    /// Linear interpolation between the end values.
    Linear { v_lo: f64, v_hi: f64 },
}

impl Shape {
    fn constant(v: f64) -> Shape {
        if v.is_infinite() {
            Shape::Infinite
        } else {
            Shape::Linear { v_lo: v, v_hi: v }
        }
    }
}

/// `v` restricted to `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub shape: Shape,
}

impl Segment {
    /// Value at `r`, using this segment's formula regardless of whether `r`
    /// lies inside; used for one-sided evaluation at break points.
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        match self.shape {
            Shape::Infinite => f64::INFINITY,
            Shape::Linear { v_lo, v_hi } => {
                if v_lo == v_hi || self.hi == self.lo {
                    v_lo
                } else {
                    v_lo + (v_hi - v_lo) * (r - self.lo) / (self.hi - self.lo)
                }
            }
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.shape, Shape::Infinite)
    }

    pub fn max_value(&self) -> f64 {
        match self.shape {
            Shape::Infinite => f64::INFINITY,
            Shape::Linear { v_lo, v_hi } => v_lo.max(v_hi),
        }
    }

    fn restrict(&self, lo: f64, hi: f64) -> Segment {
        let shape = match self.shape {
            Shape::Infinite => Shape::Infinite,
            Shape::Linear { .. } => Shape::Linear {
                v_lo: self.eval(lo),
                v_hi: self.eval(hi),
            },
        };
        Segment { lo, hi, shape }
    }
}

/// How the potential was specified.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Zero,
    HardCore { radius: f64 },
    HardShell { inner: f64, outer: f64 },
    SquareWell { height: f64, range: f64 },
    /// `values[i]` on `(breakpoints[i], breakpoints[i+1]]`; values may be `+∞`.
    PiecewiseConstant { breakpoints: Vec<f64>, values: Vec<f64> },
    /// Linear interpolation of `samples` on `grid`; a repeated grid node
    /// encodes a jump.
    Tabulated { grid: Vec<f64>, samples: Vec<f64> },
    Sum { terms: Vec<RadialPotential> },
    /// Result of an operation that fits none of the named shapes.
    Piecewise,
}

/// A radial potential, stored as contiguous segments covering `[0, range]`
/// and zero beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPotential {
    kind: PotentialKind,
    segments: Vec<Segment>,
}

fn positive_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPotential(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

fn nonneg_value(name: &str, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        Err(Error::InvalidPotential(format!(
            "{name} must be non-negative, got {x}"
        )))
    } else {
        Ok(())
    }
}

impl RadialPotential {
    pub fn zero() -> Self {
        RadialPotential {
            kind: PotentialKind::Zero,
            segments: Vec::new(),
        }
    }

    pub fn hard_core(radius: f64) -> Result<Self> {
        positive_finite("hard-core radius", radius)?;
        Ok(RadialPotential {
            kind: PotentialKind::HardCore { radius },
            segments: vec![Segment {
                lo: 0.0,
                hi: radius,
                shape: Shape::Infinite,
            }],
        })
    }

    pub fn hard_shell(inner: f64, outer: f64) -> Result<Self> {
        positive_finite("shell inner radius", inner)?;
        positive_finite("shell outer radius", outer)?;
        if outer <= inner {
            return Err(Error::InvalidPotential(format!(
                "shell outer radius {outer} must exceed inner radius {inner}"
            )));
        }
        Ok(RadialPotential {
            kind: PotentialKind::HardShell { inner, outer },
            segments: vec![
                Segment {
                    lo: 0.0,
                    hi: inner,
                    shape: Shape::constant(0.0),
                },
                Segment {
                    lo: inner,
                    hi: outer,
                    shape: Shape::Infinite,
                },
            ],
        })
    }

    pub fn square_well(height: f64, range: f64) -> Result<Self> {
        nonneg_value("square-well height", height)?;
        if height.is_infinite() {
            return Err(Error::InvalidPotential(
                "square-well height must be finite; use a hard core".into(),
            ));
        }
        positive_finite("square-well range", range)?;
        Ok(RadialPotential {
            kind: PotentialKind::SquareWell { height, range },
            segments: vec![Segment {
                lo: 0.0,
                hi: range,
                shape: Shape::constant(height),
            }],
        })
    }

    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidPotential(format!(
                "piecewise-constant potential needs n + 1 breakpoints for n values, got {} and {}",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidPotential(
                "first breakpoint must be 0".into(),
            ));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidPotential(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        for v in &values {
            nonneg_value("piece value", *v)?;
        }
        let segments = breakpoints
            .windows(2)
            .zip(&values)
            .map(|(w, &v)| Segment {
                lo: w[0],
                hi: w[1],
                shape: Shape::constant(v),
            })
            .collect();
        Ok(RadialPotential {
            kind: PotentialKind::PiecewiseConstant {
                breakpoints,
                values,
            },
            segments,
        })
    }

    pub fn tabulated(grid: Vec<f64>, samples: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != samples.len() {
            return Err(Error::InvalidPotential(format!(
                "tabulated potential needs matching grid and samples of length >= 2, got {} and {}",
                grid.len(),
                samples.len()
            )));
        }
        if grid[0] != 0.0 {
            return Err(Error::InvalidPotential("tabulation must start at r = 0".into()));
        }
        if grid.iter().any(|g| !g.is_finite()) || grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidPotential(
                "tabulation grid must be finite and non-decreasing".into(),
            ));
        }
        if grid.windows(3).any(|w| w[0] == w[1] && w[1] == w[2]) {
            return Err(Error::InvalidPotential(
                "a grid node may repeat at most once".into(),
            ));
        }
        if *grid.last().unwrap() <= 0.0 {
            return Err(Error::InvalidPotential("tabulation has zero range".into()));
        }
        for s in &samples {
            nonneg_value("sample", *s)?;
            if s.is_infinite() {
                return Err(Error::InvalidPotential(
                    "tabulated samples must be finite".into(),
                ));
            }
        }
        let segments = (0..grid.len() - 1)
            .filter(|&i| grid[i + 1] > grid[i])
            .map(|i| Segment {
                lo: grid[i],
                hi: grid[i + 1],
                shape: Shape::Linear {
                    v_lo: samples[i],
                    v_hi: samples[i + 1],
                },
            })
            .collect();
        Ok(RadialPotential {
            kind: PotentialKind::Tabulated { grid, samples },
            segments,
        })
    }

    pub fn sum(terms: Vec<RadialPotential>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidPotential("empty sum".into()));
        }
        let mut cuts: Vec<f64> = terms
            .iter()
            .flat_map(|t| t.segments.iter().flat_map(|s| [s.lo, s.hi]))
            .collect();
        cuts.push(0.0);
        sort_dedup(&mut cuts);
        let mut segments = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = 0.5 * (lo + hi);
            let mut inf = false;
            let (mut a, mut b) = (0.0, 0.0);
            for t in &terms {
                if let Some(s) = t.segment_containing(mid) {
                    match s.shape {
                        Shape::Infinite => inf = true,
                        Shape::Linear { .. } => {
                            a += s.eval(lo);
                            b += s.eval(hi);
                        }
                    }
                }
            }
            segments.push(Segment {
                lo,
                hi,
                shape: if inf {
                    Shape::Infinite
                } else {
                    Shape::Linear { v_lo: a, v_hi: b }
                },
            });
        }
        Ok(RadialPotential {
            kind: PotentialKind::Sum { terms },
            segments: trim_trailing_zeros(segments),
        })
    }

    /// Builds a potential from canonical segments, recovering the most
    /// specific named kind.
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        let segments = merge_segments(trim_trailing_zeros(segments));
        let mut last = 0.0;
        for s in &segments {
            if s.lo != last || s.hi <= s.lo {
                return Err(Error::InvalidPotential(
                    "segments must be contiguous from r = 0".into(),
                ));
            }
            if let Shape::Linear { v_lo, v_hi } = s.shape {
                nonneg_value("segment value", v_lo)?;
                nonneg_value("segment value", v_hi)?;
                if v_lo.is_infinite() || v_hi.is_infinite() {
                    return Err(Error::InvalidPotential(
                        "linear segment with infinite end value".into(),
                    ));
                }
            }
            last = s.hi;
        }
        let is_const = |s: &Segment| match s.shape {
            Shape::Infinite => true,
            Shape::Linear { v_lo, v_hi } => v_lo == v_hi,
        };
        let value = |s: &Segment| match s.shape {
            Shape::Infinite => f64::INFINITY,
            Shape::Linear { v_lo, .. } => v_lo,
        };
        let kind = match segments.as_slice() {
            [] => PotentialKind::Zero,
            [s] if s.is_infinite() => PotentialKind::HardCore { radius: s.hi },
            [s] if is_const(s) => PotentialKind::SquareWell {
                height: value(s),
                range: s.hi,
            },
            [z, s] if is_const(z) && value(z) == 0.0 && s.is_infinite() => {
                PotentialKind::HardShell {
                    inner: z.hi,
                    outer: s.hi,
                }
            }
            segs if segs.iter().all(is_const) => PotentialKind::PiecewiseConstant {
                breakpoints: std::iter::once(0.0).chain(segs.iter().map(|s| s.hi)).collect(),
                values: segs.iter().map(value).collect(),
            },
            _ => PotentialKind::Piecewise,
        };
        Ok(RadialPotential { kind, segments })
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Radius beyond which `v` vanishes.
    pub fn range(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.hi)
    }

    /// Largest radius where `v = +∞`; zero if there is no hard part. The
    /// zero-energy solution vanishes on `[0, core_radius]`.
    pub fn core_radius(&self) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.is_infinite())
            .map(|s| s.hi)
            .fold(0.0, f64::max)
    }

    pub fn has_hard_core(&self) -> bool {
        self.core_radius() > 0.0
    }

    /// Segments outside the hard core.
    pub fn active_segments(&self) -> impl Iterator<Item = &Segment> {
        let rc = self.core_radius();
        self.segments.iter().filter(move |s| s.lo >= rc)
    }

    /// Largest finite value attained outside the core.
    pub fn max_finite_value(&self) -> f64 {
        self.active_segments()
            .map(Segment::max_value)
            .fold(0.0, f64::max)
    }

    /// Segment endpoints, including 0 and the range.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = std::iter::once(0.0)
            .chain(self.segments.iter().map(|s| s.hi))
            .collect();
        sort_dedup(&mut b);
        b
    }

    fn segment_containing(&self, r: f64) -> Option<&Segment> {
        if r < 0.0 || r > self.range() {
            return None;
        }
        let i = self.segments.partition_point(|s| s.hi < r);
        self.segments.get(i)
    }

    /// `v(r)`, taking the left segment at break points.
    pub fn eval(&self, r: f64) -> f64 {
        if r == 0.0 {
            return self.segments.first().map_or(0.0, |s| s.eval(0.0));
        }
        self.segment_containing(r).map_or(0.0, |s| s.eval(r))
    }

    /// Discontinuities `(r, v(r⁺) − v(r⁻))` of a potential without hard parts.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut left = (0.0, 0.0);
        for seg in &self.segments {
            let (start, end) = match seg.shape {
                Shape::Infinite => (f64::INFINITY, f64::INFINITY),
                Shape::Linear { v_lo, v_hi } => (v_lo, v_hi),
            };
            let before = if left.0 == seg.lo { left.1 } else { 0.0 };
            if left.0 != seg.lo && left.1 != 0.0 {
                out.push((left.0, -left.1));
            }
            if start != before && seg.lo > 0.0 {
                out.push((seg.lo, start - before));
            }
            left = (seg.hi, end);
        }
        if left.1 != 0.0 && left.0 > 0.0 {
            out.push((left.0, -left.1));
        }
        out
    }

    /// `4π ∫ v r² dr`; `+∞` for potentials with a hard part.
    pub fn l1_norm(&self) -> f64 {
        if self.has_hard_core() {
            return f64::INFINITY;
        }
        let mut total = 0.0;
        for s in &self.segments {
            if let Shape::Linear { v_lo, v_hi } = s.shape {
                // exact integral of a linear function times r^2
                let (a, b) = (s.lo, s.hi);
                let slope = (v_hi - v_lo) / (b - a);
                let c0 = v_lo - slope * a;
                total += c0 * (b.powi(3) - a.powi(3)) / 3.0 + slope * (b.powi(4) - a.powi(4)) / 4.0;
            }
        }
        4.0 * std::f64::consts::PI * total
    }

    /// `min(v, n)`.
    pub fn truncate(&self, n: f64) -> Result<Self> {
        positive_finite("truncation level", n)?;
        let mut out = Vec::new();
        for s in &self.segments {
            match s.shape {
                Shape::Infinite => out.push(Segment {
                    lo: s.lo,
                    hi: s.hi,
                    shape: Shape::constant(n),
                }),
                Shape::Linear { v_lo, v_hi } => {
                    if v_lo <= n && v_hi <= n {
                        out.push(*s);
                    } else if v_lo >= n && v_hi >= n {
                        out.push(Segment {
                            lo: s.lo,
                            hi: s.hi,
                            shape: Shape::constant(n),
                        });
                    } else {
                        let x = s.lo + (n - v_lo) / (v_hi - v_lo) * (s.hi - s.lo);
                        let (first, second) = (s.restrict(s.lo, x), s.restrict(x, s.hi));
                        let clip = |seg: Segment| {
                            if seg.max_value() > n {
                                Segment {
                                    shape: Shape::constant(n),
                                    ..seg
                                }
                            } else {
                                seg
                            }
                        };
                        for seg in [first, second] {
                            if seg.hi > seg.lo {
                                out.push(clip(seg));
                            }
                        }
                    }
                }
            }
        }
        Self::from_segments(out)
    }

    /// Splits into `(v 1(r ≤ radius), v 1(r > radius))`.
    pub fn split_range(&self, radius: f64) -> Result<(Self, Self)> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "split radius must be finite and non-negative, got {radius}"
            )));
        }
        let mut inner = Vec::new();
        let mut outer = Vec::new();
        if radius > 0.0 && self.range() > 0.0 {
            outer.push(Segment {
                lo: 0.0,
                hi: radius.min(self.range()),
                shape: Shape::constant(0.0),
            });
        }
        for s in &self.segments {
            if s.hi <= radius {
                inner.push(*s);
            } else if s.lo >= radius {
                outer.push(*s);
            } else {
                inner.push(s.restrict(s.lo, radius));
                outer.push(s.restrict(radius, s.hi));
            }
        }
        Ok((Self::from_segments(inner)?, Self::from_segments(outer)?))
    }

    /// `λ^{-2} v(r / λ)`: the potential seen after stretching lengths by `λ`.
    pub fn rescale(&self, lambda: f64) -> Result<Self> {
        positive_finite("scale factor", lambda)?;
        let k = 1.0 / (lambda * lambda);
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                lo: s.lo * lambda,
                hi: s.hi * lambda,
                shape: match s.shape {
                    Shape::Infinite => Shape::Infinite,
                    Shape::Linear { v_lo, v_hi } => Shape::Linear {
                        v_lo: v_lo * k,
                        v_hi: v_hi * k,
                    },
                },
            })
            .collect();
        let kind = match &self.kind {
            PotentialKind::Zero => PotentialKind::Zero,
            PotentialKind::HardCore { radius } => PotentialKind::HardCore {
                radius: radius * lambda,
            },
            PotentialKind::HardShell { inner, outer } => PotentialKind::HardShell {
                inner: inner * lambda,
                outer: outer * lambda,
            },
            PotentialKind::SquareWell { height, range } => PotentialKind::SquareWell {
                height: height * k,
                range: range * lambda,
            },
            PotentialKind::PiecewiseConstant {
                breakpoints,
                values,
            } => PotentialKind::PiecewiseConstant {
                breakpoints: breakpoints.iter().map(|b| b * lambda).collect(),
                values: values.iter().map(|v| v * k).collect(),
            },
            PotentialKind::Tabulated { grid, samples } => PotentialKind::Tabulated {
                grid: grid.iter().map(|b| b * lambda).collect(),
                samples: samples.iter().map(|v| v * k).collect(),
            },
            PotentialKind::Sum { terms } => PotentialKind::Sum {
                terms: terms
                    .iter()
                    .map(|t| t.rescale(lambda))
                    .collect::<Result<_>>()?,
            },
            PotentialKind::Piecewise => PotentialKind::Piecewise,
        };
        Ok(RadialPotential { kind, segments })
    }

    /// Serialises to the potential file format.
    pub fn to_toml_string(&self) -> String {
        let mut table = self.to_toml_table();
        table.insert("range".into(), toml::Value::Float(self.range()));
        toml::to_string(&table).expect("potential tables always serialise")
    }

    fn to_toml_table(&self) -> toml::Table {
        let floats = |xs: &[f64]| toml::Value::Array(xs.iter().map(|&x| toml::Value::Float(x)).collect());
        let mut params = toml::Table::new();
        let kind = match &self.kind {
            PotentialKind::Zero => "zero",
            PotentialKind::HardCore { radius } => {
                params.insert("radius".into(), toml::Value::Float(*radius));
                "hard_core"
            }
            PotentialKind::HardShell { inner, outer } => {
                params.insert("inner".into(), toml::Value::Float(*inner));
                params.insert("outer".into(), toml::Value::Float(*outer));
                "hard_shell"
            }
            PotentialKind::SquareWell { height, range } => {
                params.insert("height".into(), toml::Value::Float(*height));
                params.insert("range".into(), toml::Value::Float(*range));
                "square_well"
            }
            PotentialKind::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                params.insert("breakpoints".into(), floats(breakpoints));
                params.insert("values".into(), floats(values));
                "piecewise_constant"
            }
            PotentialKind::Tabulated { grid, samples } => {
                params.insert("grid".into(), floats(grid));
                params.insert("samples".into(), floats(samples));
                "tabulated"
            }
            PotentialKind::Sum { terms } => {
                params.insert(
                    "terms".into(),
                    toml::Value::Array(
                        terms
                            .iter()
                            .map(|t| toml::Value::Table(t.to_toml_table()))
                            .collect(),
                    ),
                );
                "sum"
            }
            PotentialKind::Piecewise if self.segments.iter().any(Segment::is_infinite) => {
                let terms = self
                    .segments
                    .iter()
                    .map(|s| match s.shape {
                        Shape::Infinite if s.lo == 0.0 => RadialPotential::hard_core(s.hi),
                        Shape::Infinite => RadialPotential::hard_shell(s.lo, s.hi),
                        Shape::Linear { v_lo, v_hi } if s.lo == 0.0 => {
                            RadialPotential::tabulated(vec![0.0, s.hi], vec![v_lo, v_hi])
                        }
                        Shape::Linear { v_lo, v_hi } => RadialPotential::tabulated(
                            vec![0.0, s.lo, s.lo, s.hi],
                            vec![0.0, 0.0, v_lo, v_hi],
                        ),
                    })
                    .map(|t| toml::Value::Table(t.expect("segments are valid").to_toml_table()))
                    .collect();
                params.insert("terms".into(), toml::Value::Array(terms));
                "sum"
            }
            PotentialKind::Piecewise => {
                // A tabulation with every joint doubled.
                let mut grid = Vec::new();
                let mut samples = Vec::new();
                for s in &self.segments {
                    if let Shape::Linear { v_lo, v_hi } = s.shape {
                        grid.extend([s.lo, s.hi]);
                        samples.extend([v_lo, v_hi]);
                    }
                }
                params.insert("grid".into(), floats(&grid));
                params.insert("samples".into(), floats(&samples));
                "tabulated"
            }
        };
        let mut t = toml::Table::new();
        t.insert("kind".into(), toml::Value::String(kind.into()));
        if !params.is_empty() {
            t.insert("params".into(), toml::Value::Table(params));
        }
        t
    }

    /// Parses the potential file format.
    pub fn from_toml_str(source: &str) -> Result<Self> {
        let spec: PotentialSpec = toml::from_str(source)
            .map_err(|e| Error::InvalidPotential(e.to_string().trim_end().to_string()))?;
        spec.build(source)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
            .map_err(|e| match e {
                Error::InvalidPotential(m) => {
                    Error::InvalidPotential(format!("{}: {m}", path.display()))
                }
                other => other,
            })
    }
}

fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
}

fn trim_trailing_zeros(mut segments: Vec<Segment>) -> Vec<Segment> {
    while let Some(s) = segments.last() {
        match s.shape {
            Shape::Linear { v_lo, v_hi } if v_lo == 0.0 && v_hi == 0.0 => {
                segments.pop();
            }
            _ => break,
        }
    }
    segments
}

fn merge_segments(segments: Vec<Segment>) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
    for s in segments {
        if let Some(last) = out.last_mut() {
            let same = match (last.shape, s.shape) {
                (Shape::Infinite, Shape::Infinite) => true,
                (Shape::Linear { v_lo: a, v_hi: b }, Shape::Linear { v_lo: c, v_hi: d }) => {
                    a == b && b == c && c == d
                }
                _ => false,
            };
            if same {
                last.hi = s.hi;
                continue;
            }
        }
        out.push(s);
    }
    out
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialSpec {
    kind: Spanned<String>,
    #[serde(default)]
    params: Option<ParamSpec>,
    #[serde(default)]
    range: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ParamSpec {
    radius: Option<Spanned<f64>>,
    inner: Option<Spanned<f64>>,
    outer: Option<Spanned<f64>>,
    height: Option<Spanned<f64>>,
    range: Option<Spanned<f64>>,
    breakpoints: Option<Spanned<Vec<f64>>>,
    values: Option<Spanned<Vec<f64>>>,
    grid: Option<Spanned<Vec<f64>>>,
    samples: Option<Spanned<Vec<f64>>>,
    terms: Option<Vec<PotentialSpec>>,
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

fn at<T>(source: &str, s: &Spanned<T>, key: &str, e: Error) -> Error {
    let msg = match e {
        Error::InvalidPotential(m) => m,
        other => other.to_string(),
    };
    Error::InvalidPotential(format!(
        "line {}, key `{key}`: {msg}",
        line_of(source, s.span().start)
    ))
}

impl PotentialSpec {
    fn build(&self, source: &str) -> Result<RadialPotential> {
        let empty = ParamSpec::default();
        let params = self.params.as_ref().unwrap_or(&empty);
        let kind = self.kind.get_ref().as_str();
        let allowed: &[&str] = match kind {
            "zero" => &[],
            "hard_core" => &["radius"],
            "hard_shell" => &["inner", "outer"],
            "square_well" => &["height", "range"],
            "piecewise_constant" => &["breakpoints", "values"],
            "tabulated" => &["grid", "samples"],
            "sum" => &["terms"],
            other => {
                return Err(Error::InvalidPotential(format!(
                    "line {}, key `kind`: unknown potential kind `{other}`",
                    line_of(source, self.kind.span().start)
                )))
            }
        };
        let present: [(&str, Option<std::ops::Range<usize>>); 10] = [
            ("radius", params.radius.as_ref().map(|s| s.span())),
            ("inner", params.inner.as_ref().map(|s| s.span())),
            ("outer", params.outer.as_ref().map(|s| s.span())),
            ("height", params.height.as_ref().map(|s| s.span())),
            ("range", params.range.as_ref().map(|s| s.span())),
            ("breakpoints", params.breakpoints.as_ref().map(|s| s.span())),
            ("values", params.values.as_ref().map(|s| s.span())),
            ("grid", params.grid.as_ref().map(|s| s.span())),
            ("samples", params.samples.as_ref().map(|s| s.span())),
            (
                "terms",
                params
                    .terms
                    .as_ref()
                    .map(|t| t.first().map_or(0..0, |s| s.kind.span())),
            ),
        ];
        for (name, span) in &present {
            if let Some(span) = span {
                if !allowed.contains(name) {
                    return Err(Error::InvalidPotential(format!(
                        "line {}, key `params.{name}`: not a parameter of kind `{kind}`",
                        line_of(source, span.start)
                    )));
                }
            }
        }
        let kind_line = line_of(source, self.kind.span().start);
        let missing = |name: &str| {
            Error::InvalidPotential(format!(
                "line {kind_line}, key `params.{name}`: required for kind `{kind}`"
            ))
        };
        fn get<'a, T>(
            x: &'a Option<Spanned<T>>,
            name: &str,
            missing: &dyn Fn(&str) -> Error,
        ) -> Result<&'a Spanned<T>> {
            x.as_ref().ok_or_else(|| missing(name))
        }
        let v = match kind {
            "zero" => RadialPotential::zero(),
            "hard_core" => {
                let r = get(&params.radius, "radius", &missing)?;
                RadialPotential::hard_core(*r.get_ref())
                    .map_err(|e| at(source, r, "params.radius", e))?
            }
            "hard_shell" => {
                let i = get(&params.inner, "inner", &missing)?;
                let o = get(&params.outer, "outer", &missing)?;
                RadialPotential::hard_shell(*i.get_ref(), *o.get_ref())
                    .map_err(|e| at(source, o, "params.outer", e))?
            }
            "square_well" => {
                let h = get(&params.height, "height", &missing)?;
                let r = get(&params.range, "range", &missing)?;
                RadialPotential::square_well(*h.get_ref(), *r.get_ref())
                    .map_err(|e| at(source, h, "params.height", e))?
            }
            "piecewise_constant" => {
                let b = get(&params.breakpoints, "breakpoints", &missing)?;
                let vals = get(&params.values, "values", &missing)?;
                RadialPotential::piecewise_constant(b.get_ref().clone(), vals.get_ref().clone())
                    .map_err(|e| at(source, b, "params.breakpoints", e))?
            }
            "tabulated" => {
                let g = get(&params.grid, "grid", &missing)?;
                let s = get(&params.samples, "samples", &missing)?;
                RadialPotential::tabulated(g.get_ref().clone(), s.get_ref().clone())
                    .map_err(|e| at(source, g, "params.grid", e))?
            }
            "sum" => {
                let t = params.terms.as_ref().ok_or_else(|| missing("terms"))?;
                let terms = t
                    .iter()
                    .map(|spec| spec.build(source))
                    .collect::<Result<Vec<_>>>()?;
                RadialPotential::sum(terms).map_err(|e| match e {
                    Error::InvalidPotential(m) => Error::InvalidPotential(format!(
                        "line {kind_line}, key `params.terms`: {m}"
                    )),
                    other => other,
                })?
            }
            _ => unreachable!(),
        };
        if let Some(r) = &self.range {
            let want = *r.get_ref();
            let have = v.range();
            if (want - have).abs() > 1e-12 * have.abs().max(1.0) {
                return Err(Error::InvalidPotential(format!(
                    "line {}, key `range`: declared range {want} does not match the support {have}",
                    line_of(source, r.span().start)
                )));
            }
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn jump_list() {
        let v = RadialPotential::square_well(8.0, 1.0).unwrap();
        assert_eq!(v.jumps(), vec![(1.0, -8.0)]);
        let v = RadialPotential::piecewise_constant(vec![0.0, 0.5, 1.0, 2.0], vec![3.0, 1.0, 1.0])
            .unwrap();
        assert_eq!(v.jumps(), vec![(0.5, -2.0), (2.0, -1.0)]);
        let v = RadialPotential::tabulated(vec![0.0, 1.0, 2.0], vec![4.0, 2.0, 0.0]).unwrap();
        assert!(v.jumps().is_empty());
        assert!(RadialPotential::zero().jumps().is_empty());
    }

    #[test]
    fn square_well_basics() {
        let v = RadialPotential::square_well(8.0, 1.0).unwrap();
        assert_eq!(v.range(), 1.0);
        assert_eq!(v.eval(0.5), 8.0);
        assert_eq!(v.eval(1.5), 0.0);
        assert!((v.l1_norm() - 8.0 * 4.0 * PI / 3.0).abs() < 1e-13);
        assert_eq!(v.core_radius(), 0.0);
    }

    #[test]
    fn hard_core_and_shell() {
        let v = RadialPotential::hard_core(1.0).unwrap();
        assert_eq!(v.core_radius(), 1.0);
        assert!(v.l1_norm().is_infinite());
        let s = RadialPotential::hard_shell(0.5, 2.0).unwrap();
        assert_eq!(s.core_radius(), 2.0);
        assert_eq!(s.eval(0.25), 0.0);
        assert!(s.eval(1.0).is_infinite());
    }

    #[test]
    fn truncating_a_hard_core_gives_a_square_well() {
        let v = RadialPotential::hard_core(1.0).unwrap().truncate(8.0).unwrap();
        assert_eq!(
            v.kind(),
            &PotentialKind::SquareWell {
                height: 8.0,
                range: 1.0
            }
        );
    }

    #[test]
    fn truncation_splits_linear_segments() {
        let v = RadialPotential::tabulated(vec![0.0, 1.0], vec![10.0, 0.0]).unwrap();
        let t = v.truncate(4.0).unwrap();
        assert_eq!(t.segments().len(), 2);
        assert!((t.segments()[0].hi - 0.6).abs() < 1e-15);
        assert_eq!(t.eval(0.3), 4.0);
        assert!((t.eval(0.8) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn split_range_partitions() {
        let v = RadialPotential::piecewise_constant(vec![0.0, 0.5, 1.5], vec![3.0, 1.0]).unwrap();
        let (a, b) = v.split_range(1.0).unwrap();
        assert_eq!(a.range(), 1.0);
        assert_eq!(b.range(), 1.5);
        assert_eq!(b.eval(0.7), 0.0);
        assert_eq!(b.eval(1.2), 1.0);
        assert!((a.l1_norm() + b.l1_norm() - v.l1_norm()).abs() < 1e-12);
    }

    #[test]
    fn tabulated_jumps() {
        let v = RadialPotential::tabulated(vec![0.0, 1.0, 1.0, 2.0], vec![5.0, 5.0, 1.0, 1.0])
            .unwrap();
        assert_eq!(v.eval(0.5), 5.0);
        assert_eq!(v.eval(1.5), 1.0);
        assert_eq!(v.breakpoints(), vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn sums_add_pointwise() {
        let a = RadialPotential::square_well(2.0, 1.0).unwrap();
        let b = RadialPotential::square_well(3.0, 2.0).unwrap();
        let s = RadialPotential::sum(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(s.eval(0.5), 5.0);
        assert_eq!(s.eval(1.5), 3.0);
        assert!((s.l1_norm() - a.l1_norm() - b.l1_norm()).abs() < 1e-12);
    }

    #[test]
    fn toml_round_trip() {
        let src = r#"
kind = "square_well"
range = 1.0
[params]
height = 8.0
range = 1.0
"#;
        let v = RadialPotential::from_toml_str(src).unwrap();
        assert_eq!(v, RadialPotential::square_well(8.0, 1.0).unwrap());
        let back = RadialPotential::from_toml_str(&v.to_toml_string()).unwrap();
        assert_eq!(back, v);
        let sum = RadialPotential::sum(vec![
            RadialPotential::hard_core(0.5).unwrap(),
            RadialPotential::tabulated(vec![0.0, 1.0, 1.0, 2.0], vec![5.0, 5.0, 1.0, 0.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(RadialPotential::from_toml_str(&sum.to_toml_string()).unwrap(), sum);
    }

    #[test]
    fn toml_errors_carry_line_and_key() {
        let src = "kind = \"square_well\"\n[params]\nheight = -1.0\nrange = 1.0\n";
        let e = RadialPotential::from_toml_str(src).unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("params.height"), "{e}");
        let src = "kind = \"hard_core\"\n[params]\nradius = 1.0\nheight = 2.0\n";
        let e = RadialPotential::from_toml_str(src).unwrap_err().to_string();
        assert!(e.contains("line 4") && e.contains("params.height"), "{e}");
        let src = "kind = \"hard_core\"\ncolour = 1\n";
        let e = RadialPotential::from_toml_str(src).unwrap_err().to_string();
        assert!(e.contains("colour"), "{e}");
        let src = "kind = \"hard_core\"\nrange = 2.0\n[params]\nradius = 1.0\n";
        let e = RadialPotential::from_toml_str(src).unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("range"), "{e}");
    }

    fn arb_piecewise() -> impl Strategy<Value = RadialPotential> {
        prop::collection::vec((0.05f64..1.0, 0.0f64..20.0), 1..6).prop_map(|pieces| {
            let mut b = vec![0.0];
            let mut vals = Vec::new();
            for (w, v) in pieces {
                b.push(b.last().unwrap() + w);
                vals.push(v);
            }
            RadialPotential::piecewise_constant(b, vals).unwrap()
        })
    }

    proptest! {
        #[test]
        fn truncation_is_monotone(v in arb_piecewise(), n in 0.1f64..30.0, m in 0.1f64..30.0) {
            let (lo, hi) = if n < m { (n, m) } else { (m, n) };
            let a = v.truncate(lo).unwrap();
            let b = v.truncate(hi).unwrap();
            for i in 0..200 {
                let r = v.range() * (i as f64 + 0.5) / 200.0;
                prop_assert!(a.eval(r) <= b.eval(r) + 1e-12);
                prop_assert!(b.eval(r) <= v.eval(r) + 1e-12);
            }
        }

        #[test]
        fn split_preserves_l1(v in arb_piecewise(), t in 0.0f64..1.0) {
            let (a, b) = v.split_range(t * v.range()).unwrap();
            let total = v.l1_norm();
            prop_assert!((a.l1_norm() + b.l1_norm() - total).abs() <= 1e-12 * total.max(1.0));
        }

        #[test]
        fn rescaling_scales_l1(v in arb_piecewise(), lam in 0.2f64..5.0) {
            let w = v.rescale(lam).unwrap();
            prop_assert!((w.l1_norm() - lam * v.l1_norm()).abs() <= 1e-12 * lam * v.l1_norm().max(1.0));
        }
    }
}
