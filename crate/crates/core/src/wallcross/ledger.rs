use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{crossing_event, plan_path, wall_certificates, CrossingEvent, PathPlan, WallCertificates};
use crate::error::{Error, Result};
use crate::glsm::{cy_classification, kuznetsov_chambers, CiProblem, CyLabel, Glsm, KuznetsovData};
use crate::lattice::rational::{to_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    K,
    AntiK,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::K => "K",
            Side::AntiK => "-K",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "K" | "k" => Ok(Side::K),
            "-K" | "-k" | "antiK" | "anti-K" => Ok(Side::AntiK),
            other => Err(Error::InvalidInput(format!("unknown side {other:?}; use K or -K"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SodOptions {
    pub seed: u64,
    /// Which chamber among those touching `θ_{±K}`; by default the geometric
    /// chamber when it qualifies, otherwise the lowest id.
    pub chamber: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub label: String,
    pub chamber: usize,
    /// Euler characteristic of the block (additive along semiorthogonal decompositions).
    pub euler_characteristic: Option<Rational>,
    pub cy_labels: Vec<CyLabel>,
    pub q: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    Residual(Residual),
    Exceptional {
        count: BigInt,
        wall: usize,
        r: BigInt,
        wall_rank: BigInt,
    },
    /// A crossing whose hypotheses could not be certified; counted only as a lower bound.
    StackBlock {
        wall: usize,
        r: BigInt,
        wall_stack: String,
        reasons: Vec<String>,
    },
}

#[derive(Clone, Debug)]
pub struct CrossingRecord {
    pub event: CrossingEvent,
    pub certificates: Option<WallCertificates>,
}

#[derive(Clone, Debug)]
pub struct SodLedger {
    pub side: Side,
    /// The category being decomposed.
    pub ambient: String,
    pub ambient_euler_characteristic: Option<Rational>,
    pub plan: PathPlan,
    pub crossings: Vec<CrossingRecord>,
    /// Residual first, then the crossing blocks in path order.
    pub blocks: Vec<Block>,
    pub total_exceptional: BigInt,
    /// Set when some crossing was downgraded to a stack block.
    pub lower_bound: bool,
}

impl SodLedger {
    pub fn residual(&self) -> &Residual {
        match &self.blocks[0] {
            Block::Residual(r) => r,
            _ => unreachable!("ledgers start with the residual"),
        }
    }
}

/// Euler characteristic of the zero locus presented by a geometric GLSM.
fn geometric_euler(glsm: &Glsm) -> Option<Rational> {
    CiProblem::from_glsm(glsm).ok()?.euler_characteristic().ok()
}

fn describe_stack(ev: &CrossingEvent) -> String {
    match &ev.wall_stack {
        Ok(sf) => format!(
            "wall stack on {} fixed coordinates: {} rays, {} maximal cones, rank {}",
            ev.fixed.len(),
            sf.rays.len(),
            sf.cones.len(),
            ev.wall_rank
                .as_ref()
                .map_or_else(|| "unavailable".to_string(), |r| r.to_string())
        ),
        Err(e) => format!("wall stack unavailable: {e}"),
    }
}

pub fn assemble_sod(glsm: &Glsm, side: Side) -> Result<SodLedger> {
    assemble_sod_with(glsm, side, &SodOptions::default())
}

fn choose_chamber(kd: &KuznetsovData, side: Side, options: &SodOptions) -> Result<(usize, Vec<Rational>)> {
    let placement = match side {
        Side::K => &kd.k,
        Side::AntiK => &kd.anti_k,
    };
    if !placement.is_defined() {
        return Err(Error::UndefinedSide(format!(
            "θ_{} lies outside the support of the secondary fan",
            side.as_str()
        )));
    }
    let idx = match options.chamber {
        Some(c) => placement.chambers.iter().position(|&x| x == c).ok_or_else(|| {
            Error::NotAChamber(format!("chamber {c} does not contain θ_{}", side.as_str()))
        })?,
        None => kd
            .geometric_chamber
            .and_then(|g| placement.chambers.iter().position(|&x| x == g))
            .unwrap_or(0),
    };
    Ok((placement.chambers[idx], placement.perturbed[idx].clone()))
}

pub fn assemble_sod_with(glsm: &Glsm, side: Side, options: &SodOptions) -> Result<SodLedger> {
    let kd = kuznetsov_chambers(glsm)?;
    let source = kd
        .geometric_chamber
        .ok_or_else(|| Error::NotAChamber("θ is not generic".into()))?;
    let (chamber, target) = choose_chamber(&kd, side, options)?;
    let plan = plan_path(&kd.fan, source, &target, options.seed)?;
    let theta_k = &kd.canonical.theta_k.free;
    let kernel = &kd.kernel.kernel;

    let mut crossings = Vec::new();
    let mut crossing_blocks = Vec::new();
    let mut total = BigInt::zero();
    let mut lower_bound = false;
    for c in &plan.crossings {
        let event = crossing_event(kernel, &kd.fan, c.wall, c.from, theta_k)?;
        let expected_sign = match side {
            Side::K => 1,
            Side::AntiK => -1,
        };
        if !event.r.is_zero() && (event.r.signum() != BigInt::from(expected_sign)) {
            return Err(Error::Internal(format!(
                "crossing of wall {} pairs with θ_K against the path direction",
                c.wall
            )));
        }
        if event.r.is_zero() {
            crossings.push(CrossingRecord {
                event,
                certificates: None,
            });
            continue;
        }
        let certs = wall_certificates(glsm, &event);
        let mut reasons = certs.failures();
        if event.wall_rank.is_none() {
            reasons.push(describe_stack(&event));
        }
        if reasons.is_empty() {
            let count = event.object_count().expect("rank available");
            total += &count;
            crossing_blocks.push(Block::Exceptional {
                count,
                wall: c.wall,
                r: event.r.clone(),
                wall_rank: event.wall_rank.clone().expect("rank available"),
            });
        } else {
            lower_bound = true;
            crossing_blocks.push(Block::StackBlock {
                wall: c.wall,
                r: event.r.clone(),
                wall_stack: describe_stack(&event),
                reasons,
            });
        }
        crossings.push(CrossingRecord {
            event,
            certificates: Some(certs),
        });
    }

    let chi_z = geometric_euler(glsm);
    let (ambient, ambient_euler, residual) = match side {
        Side::K => {
            let (cy_labels, q) = CiProblem::from_glsm(glsm)
                .ok()
                .filter(|ci| ci.r() == 1)
                .and_then(|ci| cy_classification(&ci).ok())
                .map_or((Vec::new(), None), |c| (c.labels, c.q));
            let label = if plan.crossings.is_empty() { "K = D^b(Z)" } else { "K" };
            (
                "D^b(Z)".to_string(),
                chi_z.clone(),
                Residual {
                    label: label.into(),
                    chamber,
                    euler_characteristic: chi_z.filter(|_| !lower_bound).map(|x| x - Rational::from_integer(total.clone())),
                    cy_labels,
                    q,
                },
            )
        }
        Side::AntiK => (
            "-K".to_string(),
            chi_z.clone().filter(|_| !lower_bound).map(|x| x + Rational::from_integer(total.clone())),
            Residual {
                label: "D^b(Z)".into(),
                chamber: source,
                euler_characteristic: chi_z,
                cy_labels: Vec::new(),
                q: None,
            },
        ),
    };
    let mut blocks = vec![Block::Residual(residual)];
    blocks.extend(crossing_blocks);
    Ok(SodLedger {
        side,
        ambient,
        ambient_euler_characteristic: ambient_euler,
        plan,
        crossings,
        blocks,
        total_exceptional: total,
        lower_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathComparison {
    pub chamber: usize,
    pub seed: u64,
    pub walls: Vec<usize>,
    pub total: BigInt,
    pub lower_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub kuznetsov_chambers: Vec<usize>,
    /// Walls between Kuznetsov chambers that contain θ_K, with their pairing `r`.
    pub connecting_walls: Vec<(usize, BigInt)>,
    pub connected: bool,
    pub comparisons: Vec<PathComparison>,
    pub distinct_paths: usize,
    pub totals_agree: bool,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.connected && self.connecting_walls.iter().all(|(_, r)| r.is_zero()) && self.totals_agree
    }
}

/// Checks that the Kuznetsov chambers are linked by `r = 0` walls and compares
/// ledgers along several paths.
pub fn independence_audit(glsm: &Glsm, seeds: &[u64]) -> Result<AuditReport> {
    let kd = kuznetsov_chambers(glsm)?;
    let chambers = kd.k.chambers.clone();
    if chambers.is_empty() {
        return Err(Error::UndefinedSide("θ_K lies outside the support of the secondary fan".into()));
    }
    let theta_k = kd.canonical.theta_k.free.clone();
    let theta_q = to_rational(&theta_k);
    let mut connecting_walls = Vec::new();
    for (w, wall) in kd.fan.walls().iter().enumerate() {
        let (a, b) = wall.chambers;
        if chambers.contains(&a) && chambers.contains(&b) && wall.cone.contains(&theta_q) {
            let r: BigInt = wall.normal.iter().zip(&theta_k).map(|(x, y)| x * y).sum();
            connecting_walls.push((w, r));
        }
    }
    let mut reached = BTreeSet::from([chambers[0]]);
    loop {
        let before = reached.len();
        for (w, _) in &connecting_walls {
            let (a, b) = kd.fan.walls()[*w].chambers;
            if reached.contains(&a) || reached.contains(&b) {
                reached.insert(a);
                reached.insert(b);
            }
        }
        if reached.len() == before {
            break;
        }
    }
    let connected = chambers.iter().all(|c| reached.contains(c));

    let mut comparisons = Vec::new();
    for &c in &chambers {
        for &seed in seeds {
            let ledger = assemble_sod_with(
                glsm,
                Side::K,
                &SodOptions {
                    seed,
                    chamber: Some(c),
                },
            )?;
            comparisons.push(PathComparison {
                chamber: c,
                seed,
                walls: ledger.plan.crossings.iter().map(|x| x.wall).collect(),
                total: ledger.total_exceptional.clone(),
                lower_bound: ledger.lower_bound,
            });
        }
    }
    let distinct_paths = comparisons
        .iter()
        .map(|p| p.walls.clone())
        .collect::<BTreeSet<_>>()
        .len();
    let totals_agree = comparisons
        .windows(2)
        .all(|w| w[0].total == w[1].total && w[0].lower_bound == w[1].lower_bound);
    Ok(AuditReport {
        kuznetsov_chambers: chambers,
        connecting_walls,
        connected,
        comparisons,
        distinct_paths,
        totals_agree,
    })
}
