//! The TOML problem-file dialect.
//!
//! ```toml
//! theta = [1]
//!
//! [group]
//! free_rank = 1
//! torsion = []
//!
//! [[coordinate]]
//! name = "x1"
//! weight = [1]
//! chi = 0
//! ```
//!
//! Integers may be written as TOML integers or as decimal strings (for values
//! beyond 64 bits); θ entries may also be `"p/q"` strings.

use std::ops::Range;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{Error, Result};
use crate::git::{Character, GitProblem};
use crate::glsm::{build_ci_glsm, CiProblem, Glsm, Potential};
use crate::lattice::rational::{format_rational, Rational};
use crate::lattice::{FinAbGroup, IntVec};
use crate::visitor::VisitorInput;
use crate::wallcross::Side;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateSpec {
    pub name: String,
    pub weight: IntVec,
    pub torsion: IntVec,
    pub chi: Option<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisorSpec {
    /// Coefficients per coordinate, one row per divisor.
    Coefficients(Vec<IntVec>),
    /// Free parts of the divisor classes.
    Classes(Vec<IntVec>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisitorSpec {
    pub w_weights: Vec<IntVec>,
    pub w_torsion: Vec<IntVec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub side: Side,
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            side: Side::K,
            seed: 0,
            format: OutputFormat::Json,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    pub coordinates: Vec<CoordinateSpec>,
    pub theta: Option<Vec<Rational>>,
    pub divisors: Option<DivisorSpec>,
    pub visitor: Option<VisitorSpec>,
    pub potential: Option<Potential>,
    pub options: Options,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub problem: ProblemFile,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
enum NumLit {
    Int(i64),
    Str(String),
}

type SNum = Spanned<NumLit>;
type SVec = Spanned<Vec<SNum>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    theta: Option<SVec>,
    group: Spanned<RawGroup>,
    #[serde(default)]
    coordinate: Vec<Spanned<RawCoordinate>>,
    divisors: Option<Spanned<RawDivisors>>,
    visitor: Option<Spanned<RawVisitor>>,
    potential: Option<Spanned<RawPotential>>,
    options: Option<Spanned<RawOptions>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    free_rank: Spanned<i64>,
    #[serde(default)]
    torsion: Vec<SNum>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoordinate {
    name: Spanned<String>,
    weight: SVec,
    torsion: Option<SVec>,
    chi: Option<SNum>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDivisors {
    coefficients: Option<Spanned<Vec<SVec>>>,
    classes: Option<Spanned<Vec<SVec>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVisitor {
    w_weights: Spanned<Vec<SVec>>,
    w_torsion: Option<Spanned<Vec<SVec>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    kind: Spanned<String>,
    monomials: Option<Spanned<Vec<Spanned<Vec<Spanned<i64>>>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    side: Option<Spanned<String>>,
    seed: Option<Spanned<i64>>,
    format: Option<Spanned<String>>,
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, span: Range<usize>, message: impl Into<String>) -> Error {
        let (line, column) = position(self.text, span.start);
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn int(&self, n: &SNum) -> Result<BigInt> {
        match n.get_ref() {
            NumLit::Int(i) => Ok(BigInt::from(*i)),
            NumLit::Str(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|_| self.err(n.span(), format!("malformed integer {s:?}"))),
        }
    }

    fn rational(&self, n: &SNum) -> Result<Rational> {
        match n.get_ref() {
            NumLit::Int(i) => Ok(Rational::from_integer(BigInt::from(*i))),
            NumLit::Str(s) => {
                let s = s.trim();
                let parsed = match s.split_once('/') {
                    Some((p, q)) => p.trim().parse::<BigInt>().ok().zip(q.trim().parse::<BigInt>().ok()),
                    None => s.parse::<BigInt>().ok().map(|p| (p, BigInt::from(1))),
                };
                match parsed {
                    Some((_, q)) if q.is_zero() => Err(self.err(n.span(), "zero denominator")),
                    Some((p, q)) => Ok(Rational::new(p, q)),
                    None => Err(self.err(n.span(), format!("malformed rational {s:?}"))),
                }
            }
        }
    }

    fn ints(&self, v: &SVec) -> Result<IntVec> {
        v.get_ref().iter().map(|x| self.int(x)).collect()
    }

    fn sized(&self, v: &SVec, len: usize, what: &str) -> Result<IntVec> {
        if v.get_ref().len() != len {
            return Err(self.err(
                v.span(),
                format!("{what} has length {}, expected {len}", v.get_ref().len()),
            ));
        }
        self.ints(v)
    }
}

fn normalise_torsion(
    ctx: &Ctx,
    group: &FinAbGroup,
    raw: &SVec,
    what: &str,
    warnings: &mut Vec<String>,
) -> Result<IntVec> {
    let t = ctx.sized(raw, group.torsion_rank(), what)?;
    let reduced = group.reduce_torsion(&t);
    if reduced != t {
        let (line, column) = position(ctx.text, raw.span().start);
        warnings.push(format!(
            "line {line}, column {column}: {what} residues normalised into the invariant factors"
        ));
    }
    Ok(reduced)
}

pub fn parse(text: &str) -> Result<Parsed> {
    let ctx = Ctx { text };
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| position(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let mut warnings = Vec::new();

    let g = raw.group.get_ref();
    let free_rank = usize::try_from(*g.free_rank.get_ref())
        .map_err(|_| ctx.err(g.free_rank.span(), "free_rank must be nonnegative"))?;
    let mut torsion = Vec::new();
    for t in &g.torsion {
        let a = ctx.int(t)?;
        if a < BigInt::from(2) {
            return Err(ctx.err(t.span(), "invariant factors must be at least 2"));
        }
        torsion.push(a);
    }
    let group = FinAbGroup::new(free_rank, torsion.clone())
        .map_err(|e| ctx.err(raw.group.span(), e.to_string()))?;

    let mut coordinates: Vec<CoordinateSpec> = Vec::new();
    for c in &raw.coordinate {
        let c = c.get_ref();
        let name = c.name.get_ref().clone();
        if coordinates.iter().any(|x| x.name == name) {
            return Err(ctx.err(c.name.span(), format!("duplicate coordinate name {name:?}")));
        }
        let weight = ctx.sized(&c.weight, free_rank, "weight")?;
        let torsion = match &c.torsion {
            Some(t) => normalise_torsion(&ctx, &group, t, "torsion", &mut warnings)?,
            None => vec![BigInt::zero(); group.torsion_rank()],
        };
        let chi = c.chi.as_ref().map(|x| ctx.int(x)).transpose()?;
        coordinates.push(CoordinateSpec {
            name,
            weight,
            torsion,
            chi,
        });
    }
    if coordinates.is_empty() {
        return Err(ctx.err(0..0, "at least one [[coordinate]] is required"));
    }
    let with_chi = coordinates.iter().filter(|c| c.chi.is_some()).count();
    if with_chi != 0 && with_chi != coordinates.len() {
        let first = raw
            .coordinate
            .iter()
            .find(|c| c.get_ref().chi.is_none())
            .expect("some coordinate lacks chi");
        return Err(ctx.err(first.span(), "either every coordinate or none carries chi"));
    }

    let theta = match &raw.theta {
        None => None,
        Some(t) => {
            if t.get_ref().len() != free_rank {
                return Err(ctx.err(
                    t.span(),
                    format!("theta has length {}, expected {free_rank}", t.get_ref().len()),
                ));
            }
            Some(t.get_ref().iter().map(|x| ctx.rational(x)).collect::<Result<Vec<_>>>()?)
        }
    };

    let divisors = match &raw.divisors {
        None => None,
        Some(d) => {
            let dr = d.get_ref();
            match (&dr.coefficients, &dr.classes) {
                (Some(c), None) => Some(DivisorSpec::Coefficients(
                    c.get_ref()
                        .iter()
                        .map(|row| ctx.sized(row, coordinates.len(), "divisor coefficients"))
                        .collect::<Result<_>>()?,
                )),
                (None, Some(c)) => Some(DivisorSpec::Classes(
                    c.get_ref()
                        .iter()
                        .map(|row| ctx.sized(row, free_rank, "divisor class"))
                        .collect::<Result<_>>()?,
                )),
                _ => return Err(ctx.err(d.span(), "[divisors] needs exactly one of coefficients, classes")),
            }
        }
    };

    let visitor = match &raw.visitor {
        None => None,
        Some(v) => {
            let vr = v.get_ref();
            let w_weights: Vec<IntVec> = vr
                .w_weights
                .get_ref()
                .iter()
                .map(|row| ctx.sized(row, free_rank, "W-weight"))
                .collect::<Result<_>>()?;
            let w_torsion = match &vr.w_torsion {
                None => vec![vec![BigInt::zero(); group.torsion_rank()]; w_weights.len()],
                Some(t) => {
                    if t.get_ref().len() != w_weights.len() {
                        return Err(ctx.err(t.span(), "one w_torsion row per W-weight"));
                    }
                    t.get_ref()
                        .iter()
                        .map(|row| normalise_torsion(&ctx, &group, row, "w_torsion", &mut warnings))
                        .collect::<Result<_>>()?
                }
            };
            Some(VisitorSpec { w_weights, w_torsion })
        }
    };

    let potential = match &raw.potential {
        None => None,
        Some(p) => {
            let pr = p.get_ref();
            Some(match (pr.kind.get_ref().as_str(), &pr.monomials) {
                ("generic", None) => Potential::GenericPairing,
                ("zero", None) => Potential::Zero,
                ("monomials", Some(ms)) => {
                    let mut out = Vec::new();
                    for m in ms.get_ref() {
                        if m.get_ref().len() != coordinates.len() {
                            return Err(ctx.err(m.span(), "one exponent per coordinate"));
                        }
                        out.push(
                            m.get_ref()
                                .iter()
                                .map(|e| {
                                    u32::try_from(*e.get_ref())
                                        .map_err(|_| ctx.err(e.span(), "exponents must be nonnegative"))
                                })
                                .collect::<Result<Vec<u32>>>()?,
                        );
                    }
                    Potential::Monomials(out)
                }
                ("monomials", None) => return Err(ctx.err(pr.kind.span(), "monomials list missing")),
                (k @ ("generic" | "zero"), Some(ms)) => {
                    return Err(ctx.err(ms.span(), format!("kind {k:?} takes no monomials")))
                }
                (other, _) => {
                    return Err(ctx.err(
                        pr.kind.span(),
                        format!("unknown potential kind {other:?}; use generic, zero or monomials"),
                    ))
                }
            })
        }
    };

    let mut options = Options::default();
    if let Some(o) = &raw.options {
        let or = o.get_ref();
        if let Some(s) = &or.side {
            options.side = s.get_ref().parse().map_err(|e: Error| ctx.err(s.span(), e.to_string()))?;
        }
        if let Some(s) = &or.seed {
            options.seed =
                u64::try_from(*s.get_ref()).map_err(|_| ctx.err(s.span(), "seed must be nonnegative"))?;
        }
        if let Some(f) = &or.format {
            options.format = match f.get_ref().as_str() {
                "json" => OutputFormat::Json,
                "text" => OutputFormat::Text,
                other => return Err(ctx.err(f.span(), format!("unknown format {other:?}"))),
            };
        }
    }

    Ok(Parsed {
        problem: ProblemFile {
            free_rank,
            torsion,
            coordinates,
            theta,
            divisors,
            visitor,
            potential,
            options,
        },
        warnings,
    })
}

#[derive(Serialize)]
struct OutFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<Vec<NumLit>>,
    group: OutGroup,
    coordinate: Vec<OutCoordinate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    divisors: Option<OutDivisors>,
    #[serde(skip_serializing_if = "Option::is_none")]
    visitor: Option<OutVisitor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    potential: Option<OutPotential>,
    options: OutOptions,
}

#[derive(Serialize)]
struct OutGroup {
    free_rank: i64,
    torsion: Vec<NumLit>,
}

#[derive(Serialize)]
struct OutCoordinate {
    name: String,
    weight: Vec<NumLit>,
    torsion: Vec<NumLit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chi: Option<NumLit>,
}

#[derive(Serialize)]
struct OutDivisors {
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<Vec<NumLit>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classes: Option<Vec<Vec<NumLit>>>,
}

#[derive(Serialize)]
struct OutVisitor {
    w_weights: Vec<Vec<NumLit>>,
    w_torsion: Vec<Vec<NumLit>>,
}

#[derive(Serialize)]
struct OutPotential {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    monomials: Option<Vec<Vec<u32>>>,
}

#[derive(Serialize)]
struct OutOptions {
    side: String,
    seed: i64,
    format: String,
}

fn lit(x: &BigInt) -> NumLit {
    x.to_i64().map_or_else(|| NumLit::Str(x.to_string()), NumLit::Int)
}

fn lits(v: &[BigInt]) -> Vec<NumLit> {
    v.iter().map(lit).collect()
}

/// Writes a problem back to the dialect; `parse` inverts it.
pub fn serialize(p: &ProblemFile) -> Result<String> {
    let out = OutFile {
        theta: p.theta.as_ref().map(|t| {
            t.iter()
                .map(|x| {
                    if x.is_integer() {
                        lit(x.numer())
                    } else {
                        NumLit::Str(format_rational(x))
                    }
                })
                .collect()
        }),
        group: OutGroup {
            free_rank: p.free_rank as i64,
            torsion: lits(&p.torsion),
        },
        coordinate: p
            .coordinates
            .iter()
            .map(|c| OutCoordinate {
                name: c.name.clone(),
                weight: lits(&c.weight),
                torsion: lits(&c.torsion),
                chi: c.chi.as_ref().map(lit),
            })
            .collect(),
        divisors: p.divisors.as_ref().map(|d| match d {
            DivisorSpec::Coefficients(rows) => OutDivisors {
                coefficients: Some(rows.iter().map(|r| lits(r)).collect()),
                classes: None,
            },
            DivisorSpec::Classes(rows) => OutDivisors {
                coefficients: None,
                classes: Some(rows.iter().map(|r| lits(r)).collect()),
            },
        }),
        visitor: p.visitor.as_ref().map(|v| OutVisitor {
            w_weights: v.w_weights.iter().map(|r| lits(r)).collect(),
            w_torsion: v.w_torsion.iter().map(|r| lits(r)).collect(),
        }),
        potential: p.potential.as_ref().map(|pot| match pot {
            Potential::GenericPairing => OutPotential {
                kind: "generic".into(),
                monomials: None,
            },
            Potential::Zero => OutPotential {
                kind: "zero".into(),
                monomials: None,
            },
            Potential::Monomials(ms) => OutPotential {
                kind: "monomials".into(),
                monomials: Some(ms.clone()),
            },
        }),
        options: OutOptions {
            side: p.options.side.as_str().into(),
            seed: p.options.seed as i64,
            format: match p.options.format {
                OutputFormat::Json => "json".into(),
                OutputFormat::Text => "text".into(),
            },
        },
    };
    toml::to_string(&out).map_err(|e| Error::Internal(e.to_string()))
}

impl ProblemFile {
    pub fn group(&self) -> Result<FinAbGroup> {
        FinAbGroup::new(self.free_rank, self.torsion.clone())
    }

    /// The GIT problem on all coordinates (for GLSM files: the `ker χ` problem).
    pub fn git_problem(&self) -> Result<GitProblem> {
        GitProblem::new(
            self.group()?,
            self.coordinates
                .iter()
                .map(|c| (c.name.clone(), Character::new(c.weight.clone(), c.torsion.clone())))
                .collect(),
        )
    }

    pub fn has_chi(&self) -> bool {
        self.coordinates.iter().any(|c| c.chi.is_some())
    }

    pub fn theta(&self) -> Result<Vec<Rational>> {
        self.theta
            .clone()
            .ok_or_else(|| Error::InvalidInput("this command needs theta".into()))
    }

    /// Complete-intersection data: from `[divisors]` on a base file, or read off a GLSM file.
    pub fn ci_problem(&self) -> Result<CiProblem> {
        if self.has_chi() {
            return CiProblem::from_glsm(&self.glsm()?);
        }
        let base = self.git_problem()?;
        let theta = self.theta()?;
        match &self.divisors {
            None => Err(Error::InvalidInput("this command needs [divisors] or chi weights".into())),
            Some(DivisorSpec::Coefficients(rows)) => CiProblem::new(base, theta, rows.clone()),
            Some(DivisorSpec::Classes(rows)) => CiProblem::from_classes(
                base,
                theta,
                &rows.iter().map(|r| Character::free(r.clone())).collect::<Vec<_>>(),
            ),
        }
    }

    pub fn glsm(&self) -> Result<Glsm> {
        if !self.has_chi() {
            return build_ci_glsm(&self.ci_problem()?);
        }
        let kernel = self.git_problem()?;
        let chi: Vec<BigInt> = self
            .coordinates
            .iter()
            .map(|c| c.chi.clone().expect("every coordinate carries chi"))
            .collect();
        let potential = self.potential.clone().unwrap_or_else(|| {
            if chi.iter().all(Zero::is_zero) {
                Potential::Zero
            } else {
                Potential::GenericPairing
            }
        });
        Glsm::split(&kernel, &chi, self.theta()?, potential)
    }

    pub fn visitor_input(&self) -> Result<VisitorInput> {
        let v = self
            .visitor
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("this command needs a [visitor] section".into()))?;
        VisitorInput::new(
            self.git_problem()?,
            self.theta()?,
            v.w_weights
                .iter()
                .zip(&v.w_torsion)
                .map(|(w, t)| Character::new(w.clone(), t.clone()))
                .collect(),
        )
    }
}
