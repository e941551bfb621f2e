//! Parameter model for the I-function
//!
//! ```text
//!            [ (a_1, α_1, A_1), …, (a_p, α_p, A_p) ]
//! I^{m,n}_{p,q}[ z |                                  ]
//!            [ (b_1, β_1, B_1), …, (b_q, β_q, B_q) ]
//! ```
//!
//! The `upper` list holds the `(a_j, α_j, A_j)` triples and `lower` holds the
//! `(b_j, β_j, B_j)` triples. The first `n` upper triples and the first `m`
//! lower triples contribute numerator gamma factors; the rest go to the
//! denominator. Group boundaries are stored explicitly.
//!
//! Besides validation this module carries the exact parameter rewrites that
//! leave the function value unchanged (up to a known factor): cancellation of
//! matching triples, the `z^σ` shift, slope rescaling and inversion `z → 1/z`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One `(a, α, A)` or `(b, β, B)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "TripleDoc", into = "TripleDoc")]
pub struct GammaTriple {
    /// The shift `a_j` (or `b_j`).
    pub a: Complex64,
    /// The slope `α_j` (or `β_j`), must be positive.
    pub alpha: f64,
    /// The gamma power `A_j` (or `B_j`), must be positive.
    pub exponent: f64,
}

impl GammaTriple {
    pub fn new(a: f64, alpha: f64, exponent: f64) -> Self {
        Self {
            a: Complex64::new(a, 0.0),
            alpha,
            exponent,
        }
    }

    pub fn complex(a: Complex64, alpha: f64, exponent: f64) -> Self {
        Self { a, alpha, exponent }
    }

    /// True when the gamma power is a positive integer, i.e. the factor has
    /// poles rather than branch points.
    pub fn has_integer_exponent(&self) -> bool {
        is_near_integer(self.exponent, INTEGER_TOL)
    }
}

#[derive(Serialize, Deserialize)]
struct TripleDoc {
    a_re: f64,
    #[serde(default)]
    a_im: f64,
    alpha: f64,
    exp: f64,
}

impl From<TripleDoc> for GammaTriple {
    fn from(d: TripleDoc) -> Self {
        Self {
            a: Complex64::new(d.a_re, d.a_im),
            alpha: d.alpha,
            exponent: d.exp,
        }
    }
}

impl From<GammaTriple> for TripleDoc {
    fn from(t: GammaTriple) -> Self {
        Self {
            a_re: t.a.re,
            a_im: t.a.im,
            alpha: t.alpha,
            exp: t.exponent,
        }
    }
}

/// The full parameter set of `I^{m,n}_{p,q}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IFunctionParams {
    pub m: usize,
    pub n: usize,
    pub upper: Vec<GammaTriple>,
    pub lower: Vec<GammaTriple>,
}

impl IFunctionParams {
    pub fn new(m: usize, n: usize, upper: Vec<GammaTriple>, lower: Vec<GammaTriple>) -> Self {
        Self { m, n, upper, lower }
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    /// `upper[1..n]`: factors `Γ^{A_j}(1 − a_j + α_j s)` in the numerator.
    pub fn upper_numerator(&self) -> &[GammaTriple] {
        &self.upper[..self.n.min(self.upper.len())]
    }

    /// `upper[n+1..p]`: factors `Γ^{A_j}(a_j − α_j s)` in the denominator.
    pub fn upper_denominator(&self) -> &[GammaTriple] {
        &self.upper[self.n.min(self.upper.len())..]
    }

    /// `lower[1..m]`: factors `Γ^{B_j}(b_j − β_j s)` in the numerator.
    pub fn lower_numerator(&self) -> &[GammaTriple] {
        &self.lower[..self.m.min(self.lower.len())]
    }

    /// `lower[m+1..q]`: factors `Γ^{B_j}(1 − b_j + β_j s)` in the denominator.
    pub fn lower_denominator(&self) -> &[GammaTriple] {
        &self.lower[self.m.min(self.lower.len())..]
    }

    /// Iterates over every gamma factor of the integrand.
    pub fn factors(&self) -> impl Iterator<Item = Factor> + '_ {
        let lower = self.lower.iter().enumerate().map(move |(j, t)| Factor {
            kind: if j < self.m {
                FactorKind::LowerNumerator
            } else {
                FactorKind::LowerDenominator
            },
            index: j,
            triple: *t,
        });
        let upper = self.upper.iter().enumerate().map(move |(j, t)| Factor {
            kind: if j < self.n {
                FactorKind::UpperNumerator
            } else {
                FactorKind::UpperDenominator
            },
            index: j,
            triple: *t,
        });
        lower.chain(upper)
    }

    /// Returns `Err(InvalidParams)` listing every violation, if any.
    pub fn validated(self) -> Result<Self> {
        let v = validate(&self);
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(v))
        }
    }
}

/// Which of the four groups a gamma factor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    /// `Γ^{B}(b − βs)`, poles to the right of the contour.
    LowerNumerator,
    /// `1/Γ^{B}(1 − b + βs)`.
    LowerDenominator,
    /// `Γ^{A}(1 − a + αs)`, poles to the left of the contour.
    UpperNumerator,
    /// `1/Γ^{A}(a − αs)`.
    UpperDenominator,
}

/// A single gamma factor `Γ^{power}(offset + slope·s)` of the integrand,
/// entering with sign `+1` (numerator) or `−1` (denominator).
#[derive(Debug, Clone, Copy)]
pub struct Factor {
    pub kind: FactorKind,
    pub index: usize,
    pub triple: GammaTriple,
}

impl Factor {
    pub fn is_numerator(&self) -> bool {
        matches!(
            self.kind,
            FactorKind::LowerNumerator | FactorKind::UpperNumerator
        )
    }

    /// `(offset, slope)` such that the gamma argument is `offset + slope·s`.
    pub fn linear_map(&self) -> (Complex64, f64) {
        let t = &self.triple;
        match self.kind {
            FactorKind::LowerNumerator => (t.a, -t.alpha),
            FactorKind::LowerDenominator => (1.0 - t.a, t.alpha),
            FactorKind::UpperNumerator => (1.0 - t.a, t.alpha),
            FactorKind::UpperDenominator => (t.a, -t.alpha),
        }
    }

    pub fn argument(&self, s: Complex64) -> Complex64 {
        let (offset, slope) = self.linear_map();
        offset + slope * s
    }

    /// Signed power: `+A` for numerator factors, `−A` for denominator ones.
    pub fn signed_power(&self) -> f64 {
        if self.is_numerator() {
            self.triple.exponent
        } else {
            -self.triple.exponent
        }
    }

    /// Location of the `r`-th singular point (gamma argument `= −r`).
    pub fn singular_point(&self, r: u32) -> Complex64 {
        let (offset, slope) = self.linear_map();
        (-(r as f64) - offset) / slope
    }

    pub fn label(&self) -> String {
        let (side, letter) = match self.kind {
            FactorKind::LowerNumerator | FactorKind::LowerDenominator => ("lower", 'B'),
            FactorKind::UpperNumerator | FactorKind::UpperDenominator => ("upper", 'A'),
        };
        format!("{side}[{}] ({letter}={})", self.index + 1, self.triple.exponent)
    }
}

pub(crate) const INTEGER_TOL: f64 = 1e-12;

pub(crate) fn is_near_integer(x: f64, tol: f64) -> bool {
    (x - x.round()).abs() <= tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        })
    }
}

/// A violated structural condition. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    MExceedsQ { m: usize, q: usize },
    NExceedsP { n: usize, p: usize },
    NonPositiveSlope { side: Side, index: usize, value: f64 },
    NonPositiveExponent { side: Side, index: usize, value: f64 },
    NonFiniteShift { side: Side, index: usize },
    /// Pole `r` of `Γ(b_j − β_j s)` meets pole `r'` of `Γ(1 − a_k + α_k s)`.
    SingularityCoincidence {
        lower_index: usize,
        r: u32,
        upper_index: usize,
        r_prime: u32,
        s: [f64; 2],
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MExceedsQ { m, q } => write!(f, "m ≤ q fails (m = {m}, q = {q})"),
            Violation::NExceedsP { n, p } => write!(f, "n ≤ p fails (n = {n}, p = {p})"),
            Violation::NonPositiveSlope { side, index, value } => {
                write!(f, "{side}[{index}] slope must be positive, got {value}")
            }
            Violation::NonPositiveExponent { side, index, value } => {
                write!(f, "{side}[{index}] exponent must be positive, got {value}")
            }
            Violation::NonFiniteShift { side, index } => {
                write!(f, "{side}[{index}] shift is not finite")
            }
            Violation::SingularityCoincidence {
                lower_index,
                r,
                upper_index,
                r_prime,
                s,
            } => write!(
                f,
                "singularity {r} of lower[{lower_index}] coincides with singularity {r_prime} \
                 of upper[{upper_index}] at s = {}{:+}i",
                s[0], s[1]
            ),
        }
    }
}

/// Bounds for the singularity-coincidence scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    /// Largest `r`, `r'` enumerated.
    pub scan_bound: u32,
    /// Points closer than this are treated as coincident.
    pub tolerance: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            scan_bound: 64,
            tolerance: 1e-12,
        }
    }
}

pub fn validate(params: &IFunctionParams) -> Vec<Violation> {
    validate_with(params, &ValidateOptions::default())
}

pub fn validate_with(params: &IFunctionParams, opts: &ValidateOptions) -> Vec<Violation> {
    let mut out = Vec::new();
    if params.m > params.q() {
        out.push(Violation::MExceedsQ {
            m: params.m,
            q: params.q(),
        });
    }
    if params.n > params.p() {
        out.push(Violation::NExceedsP {
            n: params.n,
            p: params.p(),
        });
    }

    let sides = [(Side::Upper, &params.upper), (Side::Lower, &params.lower)];
    let mut finite = true;
    for (side, list) in sides {
        for (j, t) in list.iter().enumerate() {
            let index = j + 1;
            if !(t.alpha > 0.0 && t.alpha.is_finite()) {
                out.push(Violation::NonPositiveSlope {
                    side,
                    index,
                    value: t.alpha,
                });
                finite = false;
            }
            if !(t.exponent > 0.0 && t.exponent.is_finite()) {
                out.push(Violation::NonPositiveExponent {
                    side,
                    index,
                    value: t.exponent,
                });
            }
            if !(t.a.re.is_finite() && t.a.im.is_finite()) {
                out.push(Violation::NonFiniteShift { side, index });
                finite = false;
            }
        }
    }
    if !finite {
        return out;
    }

    for (j, b) in params.lower_numerator().iter().enumerate() {
        for (k, a) in params.upper_numerator().iter().enumerate() {
            if let Some((r, r_prime, s)) = first_coincidence(b, a, opts) {
                out.push(Violation::SingularityCoincidence {
                    lower_index: j + 1,
                    r,
                    upper_index: k + 1,
                    r_prime,
                    s: [s.re, s.im],
                });
            }
        }
    }
    out
}

/// Smallest `(r, r')` with `(b + r)/β ≈ (a − 1 − r')/α`.
fn first_coincidence(
    b: &GammaTriple,
    a: &GammaTriple,
    opts: &ValidateOptions,
) -> Option<(u32, u32, Complex64)> {
    for r in 0..=opts.scan_bound {
        let right = (b.a + r as f64) / b.alpha;
        for r_prime in 0..=opts.scan_bound {
            let left = (a.a - 1.0 - r_prime as f64) / a.alpha;
            if (right - left).norm() <= opts.tolerance {
                return Some((r, r_prime, right));
            }
        }
    }
    None
}

/// Cancels matching numerator/denominator triples until none remain.
///
/// A triple in `upper[1..n]` equal to one in `lower[m+1..q]` cancels with it
/// (`n`, `p`, `q` each drop by one); a triple in `upper[n+1..p]` equal to one
/// in `lower[1..m]` cancels likewise (`m`, `p`, `q` drop). Equality is exact.
pub fn reduce(params: &IFunctionParams) -> IFunctionParams {
    let mut out = params.clone();
    loop {
        let (m, n) = (out.m.min(out.q()), out.n.min(out.p()));
        if let Some((i, j)) = find_match(&out.upper[..n], &out.lower[m..]) {
            out.upper.remove(i);
            out.lower.remove(m + j);
            out.n -= 1;
            continue;
        }
        if let Some((i, j)) = find_match(&out.upper[n..], &out.lower[..m]) {
            out.upper.remove(n + i);
            out.lower.remove(j);
            out.m -= 1;
            continue;
        }
        return out;
    }
}

fn find_match(xs: &[GammaTriple], ys: &[GammaTriple]) -> Option<(usize, usize)> {
    xs.iter()
        .enumerate()
        .find_map(|(i, x)| ys.iter().position(|y| y == x).map(|j| (i, j)))
}

/// `a_j → a_j + σα_j`, `b_j → b_j + σβ_j`; the new function is `z^σ` times the old.
pub fn shift(params: &IFunctionParams, sigma: Complex64) -> IFunctionParams {
    let move_all = |list: &[GammaTriple]| {
        list.iter()
            .map(|t| GammaTriple {
                a: t.a + sigma * t.alpha,
                ..*t
            })
            .collect()
    };
    IFunctionParams {
        m: params.m,
        n: params.n,
        upper: move_all(&params.upper),
        lower: move_all(&params.lower),
    }
}

/// Multiplies every slope by `c > 0`; then `I_old(z) = c · I_new(z^c)`.
pub fn rescale(params: &IFunctionParams, c: f64) -> Result<IFunctionParams> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!(
            "rescale factor must be positive and finite, got {c}"
        )));
    }
    let scale = |list: &[GammaTriple]| {
        list.iter()
            .map(|t| GammaTriple {
                alpha: t.alpha * c,
                ..*t
            })
            .collect()
    };
    Ok(IFunctionParams {
        m: params.m,
        n: params.n,
        upper: scale(&params.upper),
        lower: scale(&params.lower),
    })
}

/// Maps `I^{m,n}_{p,q}` to `I^{n,m}_{q,p}` with `(1 − b_j, β_j, B_j)` on top and
/// `(1 − a_j, α_j, A_j)` below, so that `I_old(z) = I_new(1/z)`.
pub fn invert(params: &IFunctionParams) -> IFunctionParams {
    let flip = |list: &[GammaTriple]| {
        list.iter()
            .map(|t| GammaTriple {
                a: 1.0 - t.a,
                ..*t
            })
            .collect()
    };
    IFunctionParams {
        m: params.n,
        n: params.m,
        upper: flip(&params.lower),
        lower: flip(&params.upper),
    }
}
