//! Adaptive Gauss–Kronrod quadrature and fixed Gauss–Legendre rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

use super::Tolerance;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Result of a numerical integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Integration domain. `ToInfinity` is mapped onto `[0, 1)` by
/// `x = lo + scale * t / (1 - t)`; `scale` should be the decay length of the
/// integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite { lo: f64, hi: f64 },
    ToInfinity { lo: f64, scale: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    piece: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = hl * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * hl;
    resabs *= hl.abs();
    resasc *= hl.abs();
    let mut err = ((resk - resg) * hl).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

/// Integrates `f` over the given domain.
pub fn integrate<F: Fn(f64) -> f64>(f: F, domain: Domain, tol: &Tolerance) -> Result<Integral> {
    integrate_pieces(f, &[domain], tol)
}

/// Integrates `f` over `[lo, hi]`.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: &Tolerance,
) -> Result<Integral> {
    integrate(f, Domain::Finite { lo, hi }, tol)
}

/// Integrates `f` over `[lo, ∞)` with the given decay length.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    scale: f64,
    tol: &Tolerance,
) -> Result<Integral> {
    integrate(f, Domain::ToInfinity { lo, scale }, tol)
}

/// Integrates over `breaks[0]..breaks[n]` split at the interior break points,
/// optionally continuing from the last break point to infinity.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    tail_scale: Option<f64>,
    tol: &Tolerance,
) -> Result<Integral> {
    if breaks.is_empty() {
        return Err(Error::InvalidInterval {
            lo: f64::NAN,
            hi: f64::NAN,
        });
    }
    let mut pieces: Vec<Domain> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| Domain::Finite { lo: w[0], hi: w[1] })
        .collect();
    if let Some(scale) = tail_scale {
        pieces.push(Domain::ToInfinity {
            lo: *breaks.last().unwrap(),
            scale,
        });
    }
    integrate_pieces(f, &pieces, tol)
}

fn integrate_pieces<F: Fn(f64) -> f64>(f: F, pieces: &[Domain], tol: &Tolerance) -> Result<Integral> {
    for p in pieces {
        match *p {
            Domain::Finite { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite()) || hi < lo {
                    return Err(Error::InvalidInterval { lo, hi });
                }
            }
            Domain::ToInfinity { lo, scale } => {
                if !lo.is_finite() || !(scale > 0.0) || !scale.is_finite() {
                    return Err(Error::InvalidInterval {
                        lo,
                        hi: f64::INFINITY,
                    });
                }
            }
        }
    }
    let mut evaluations = 0usize;
    let eval_panel = |piece: usize, a: f64, b: f64, evaluations: &mut usize| -> Panel {
        *evaluations += 21;
        let (value, error) = match pieces[piece] {
            Domain::Finite { .. } => kronrod21(&mut |x| f(x), a, b),
            Domain::ToInfinity { lo, scale } => kronrod21(
                &mut |t| {
                    let d = 1.0 - t;
                    let y = f(lo + scale * t / d);
                    if y == 0.0 {
                        0.0
                    } else {
                        y * scale / (d * d)
                    }
                },
                a,
                b,
            ),
        };
        Panel {
            piece,
            a,
            b,
            value,
            error,
        }
    };

    let mut heap = BinaryHeap::new();
    for (i, p) in pieces.iter().enumerate() {
        let (a, b) = match *p {
            Domain::Finite { lo, hi } => (lo, hi),
            Domain::ToInfinity { .. } => (0.0, 1.0),
        };
        if b > a {
            heap.push(eval_panel(i, a, b, &mut evaluations));
        }
    }
    let mut refinements = 0usize;
    loop {
        let (value, error) = totals(&heap);
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        let Some(worst) = heap.pop() else {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        let width = worst.b - worst.a;
        if refinements >= tol.max_refinements
            || width <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE)
        {
            heap.push(worst);
            let (value, error) = totals(&heap);
            return Err(Error::NonConvergent {
                value,
                error,
                refinements,
            });
        }
        refinements += 1;
        heap.push(eval_panel(worst.piece, worst.a, mid, &mut evaluations));
        heap.push(eval_panel(worst.piece, mid, worst.b, &mut evaluations));
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| {
        (x.piece, x.a)
            .partial_cmp(&(y.piece, y.a))
            .unwrap_or(Ordering::Equal)
    });
    let mut value = 0.0;
    let mut comp = 0.0;
    let mut error = 0.0;
    for p in panels {
        // Neumaier summation keeps the total independent of panel count.
        let t = value + p.value;
        if value.abs() >= p.value.abs() {
            comp += (value - t) + p.value;
        } else {
            comp += (p.value - t) + value;
        }
        value = t;
        error += p.error;
    }
    (value + comp, error)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A Gauss–Legendre rule mapped onto an arbitrary interval.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        GaussRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights on `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}
