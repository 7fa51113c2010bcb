use serde::{Deserialize, Serialize};

use crate::metric::Edge;
use crate::partition::CreditLedger;

use super::canonical::{CanonicalFailure, CanonicalPair};
use super::cluster::Origin;
use super::level::BuiltLevel;

/// Who settles one level edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Payer {
    /// A lower-level cluster outside every reserve set.
    Cluster(usize),
    /// Spread over the listed clusters in proportion to their credit.
    Pool(Vec<usize>),
    /// The level-wide pool used once a canonical pair is missing.
    Fallback,
}

#[derive(Clone, Debug, PartialEq)]
enum Side {
    Pays(Payer),
    ShortInternal,
    NoHost,
}

/// Reserve per new cluster, with the spare cluster that pays on its behalf.
#[derive(Clone, Debug, Default, PartialEq)]
struct Plan {
    reserve: Vec<usize>,
    spare: Option<usize>,
    walk: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnpaidEdge {
    pub edge: Edge,
    /// Both endpoint clusters are internal short Phase-4 clusters.
    pub both_short_internal: bool,
}

/// Everything a level needs once `c` is known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelAccounts {
    /// Credit of each lower-level cluster, in units of `c`.
    pub units: Vec<f64>,
    pub reserved: Vec<bool>,
    /// Weight charged to each lower-level cluster.
    pub charge: Vec<f64>,
    pub transfers: Vec<(Payer, Edge)>,
    pub b_edges: Vec<Edge>,
    pub unpaid: Vec<UnpaidEdge>,
    /// Set when the level pays from a shared pool.
    pub fallback: Option<FallbackPool>,
    /// Credit units of each new cluster.
    pub retained: Vec<f64>,
    /// New clusters below their DC1 floor: `(cluster, have, need)`.
    pub dc1_failures: Vec<(usize, f64, f64)>,
    /// MST pieces between lower-level clusters, before and after the level.
    pub free_pieces_before: usize,
    pub free_pieces_after: usize,
    pub piece_units: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FallbackPool {
    pub pool_units: f64,
    pub reserve_units: f64,
    pub paid: f64,
}

impl LevelAccounts {
    pub fn paid_weight(&self) -> f64 {
        self.transfers.iter().fold(0.0, |a, (_, e)| a + e.w)
    }

    pub fn b_weight(&self) -> f64 {
        self.b_edges.iter().fold(0.0, |a, e| a + e.w)
    }

    /// Smallest `c` meeting every payment constraint of the level, or
    /// `None` when no `c` does.
    pub fn min_c(&self) -> Option<f64> {
        if !self.dc1_failures.is_empty() || !self.unpaid.is_empty() {
            return None;
        }
        let mut c = 1.0f64;
        for (x, &w) in self.charge.iter().enumerate() {
            if w > 0.0 {
                if self.units[x] <= 0.0 {
                    return None;
                }
                c = c.max(w / self.units[x]);
            }
        }
        if let Some(f) = &self.fallback {
            if f.paid > 0.0 {
                let spare = f.pool_units - f.reserve_units;
                if spare <= 0.0 {
                    return None;
                }
                c = c.max(f.paid / spare);
            }
        }
        Some(c)
    }

    /// True when all payments clear at credit constant `c`.
    pub fn feasible(&self, c: f64) -> bool {
        if !self.dc1_failures.is_empty() || !self.unpaid.is_empty() {
            return false;
        }
        let slack = 1.0 + 1e-12;
        let accounts = self
            .charge
            .iter()
            .zip(&self.units)
            .all(|(&w, &u)| w <= c * u * slack);
        let pool = self
            .fallback
            .as_ref()
            .map_or(true, |f| f.paid <= c * (f.pool_units - f.reserve_units) * slack);
        accounts && pool
    }

    /// Replays the level's payments through real accounts at `c`.
    pub fn replay(&self, c: f64) -> Replay {
        let mut ledger = CreditLedger {
            c,
            piece_credit: Vec::new(),
            accounts: Vec::new(),
            payments: Vec::new(),
        };
        let mut account = vec![usize::MAX; self.units.len()];
        let pooled = self.fallback.is_some();
        let mut pool = usize::MAX;
        if let Some(f) = &self.fallback {
            pool = ledger.open("pool", c * (f.pool_units - f.reserve_units).max(0.0));
        } else {
            for (x, &u) in self.units.iter().enumerate() {
                if !self.reserved[x] {
                    account[x] = ledger.open(format!("cluster {x}"), c * u);
                }
            }
        }
        let mut negative = Vec::new();
        let mut pay = |ledger: &mut CreditLedger, a: usize, e: Edge, amount: f64| {
            if a == usize::MAX {
                negative.push(e);
            } else if ledger.pay(a, e, amount).is_err() {
                negative.push(e);
            }
        };
        for (payer, e) in &self.transfers {
            match payer {
                Payer::Cluster(x) => pay(&mut ledger, account[*x], *e, e.w),
                Payer::Fallback => pay(&mut ledger, pool, *e, e.w),
                Payer::Pool(nodes) => {
                    let total: f64 = nodes.iter().map(|&x| self.units[x]).sum();
                    for &x in nodes {
                        pay(&mut ledger, account[x], *e, e.w * self.units[x] / total);
                    }
                }
            }
        }
        let surplus = ledger.accounts.iter().fold(0.0, |s, a| s + a.balance);
        let retained = if pooled {
            c * self.fallback.as_ref().map_or(0.0, |f| f.reserve_units)
        } else {
            c * self.retained.iter().sum::<f64>()
        };
        let initial = c * (self.units.iter().sum::<f64>() + self.free_pieces_before as f64 * self.piece_units);
        let carried = c * self.free_pieces_after as f64 * self.piece_units;
        let paid = ledger.total_paid();
        let residual = initial - (retained + carried + paid + surplus);
        Replay {
            initial,
            retained,
            carried,
            paid,
            surplus,
            residual,
            negative,
        }
    }
}

/// Credit flow of one level at a fixed `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Replay {
    pub initial: f64,
    pub retained: f64,
    pub carried: f64,
    pub paid: f64,
    pub surplus: f64,
    /// `initial - (retained + carried + paid + surplus)`.
    pub residual: f64,
    /// Edges whose payment would overdraw an account.
    pub negative: Vec<Edge>,
}

impl Replay {
    pub fn conserved(&self) -> bool {
        self.residual.abs() <= 1e-9 * self.initial.abs().max(1.0)
    }
}

/// Inputs to the payment step of one level.
pub struct PaymentInput<'a> {
    pub built: &'a BuiltLevel,
    pub canonical: &'a [Option<Result<CanonicalPair, CanonicalFailure>>],
    /// Vertex to lower-level cluster.
    pub owner: &'a [usize],
    pub units: &'a [f64],
    pub free_pieces_before: usize,
    pub piece_units: f64,
    pub level_edges: &'a [Edge],
    pub ell: f64,
    pub eps: f64,
    pub g: f64,
}

/// Chooses reserve sets, retained credit and one payer per level edge.
pub fn assign_payments(inp: &PaymentInput) -> LevelAccounts {
    let built = inp.built;
    let k = inp.units.len();
    let keep = ((2.0 * inp.g / inp.eps).floor() as usize).max(1);
    let fallback = inp.canonical.iter().any(|c| matches!(c, Some(Err(_))));
    let plans: Vec<Plan> = built
        .drafts
        .iter()
        .zip(inp.canonical)
        .map(|(d, can)| match (d.origin, can) {
            (_, Some(Ok(pair))) => Plan {
                reserve: pair.reserve.clone(),
                spare: Some(pair.spare),
                walk: pair.walk.clone(),
            },
            (Origin::Phase4, _) if d.phase4.is_some_and(|s| s.long) => {
                let spare = d.members.get(keep).copied();
                Plan {
                    reserve: d.members[..keep.min(d.members.len())].to_vec(),
                    spare,
                    walk: Vec::new(),
                }
            }
            _ => Plan {
                reserve: d.members.clone(),
                spare: None,
                walk: Vec::new(),
            },
        })
        .collect();

    let mut reserved = vec![false; k];
    let mut retained = Vec::with_capacity(plans.len());
    let mut dc1_failures = Vec::new();
    for (id, (plan, c)) in plans.iter().zip(&built.clusters).enumerate() {
        for &x in &plan.reserve {
            reserved[x] = true;
        }
        let need = if c.undersized {
            c.diameter
        } else {
            c.diameter.max(inp.ell / 2.0)
        };
        let have = if fallback {
            need
        } else {
            plan.reserve.iter().map(|&x| inp.units[x]).sum::<f64>()
                + built.connecting_pieces[id] as f64 * inp.piece_units
        };
        if have < need * (1.0 - 1e-9) {
            dc1_failures.push((id, have, need));
        }
        retained.push(have);
    }

    let side = |x: usize| -> Side {
        if fallback {
            return Side::Pays(Payer::Fallback);
        }
        let id = built.assign[x];
        let d = &built.drafts[id];
        let plan = &plans[id];
        if let Some(spare) = plan.spare {
            let held = x == spare || plan.reserve.contains(&x);
            return Side::Pays(Payer::Cluster(if held { spare } else { x }));
        }
        match (d.origin, d.phase4) {
            (Origin::Phase4, Some(shape)) if shape.affix => match &d.sibling {
                Some(sib) => {
                    let host = &plans[sib.host];
                    match host.spare {
                        Some(y) if sib.nodes.iter().any(|n| host.walk.contains(n)) => Side::Pays(Payer::Cluster(y)),
                        _ => Side::Pays(Payer::Pool(sib.nodes.clone())),
                    }
                }
                None => Side::NoHost,
            },
            (Origin::Phase4, _) => Side::ShortInternal,
            _ => Side::NoHost,
        }
    };

    let exceptional = built.exceptional();
    let mut acc = LevelAccounts {
        units: inp.units.to_vec(),
        reserved,
        charge: vec![0.0; k],
        transfers: Vec::new(),
        b_edges: Vec::new(),
        unpaid: Vec::new(),
        fallback: None,
        retained,
        dc1_failures,
        free_pieces_before: inp.free_pieces_before,
        free_pieces_after: inp.free_pieces_before - built.connecting_pieces.iter().sum::<usize>(),
        piece_units: inp.piece_units,
    };
    let mut fallback_paid = 0.0;
    let mut edges = inp.level_edges.to_vec();
    crate::metric::sort_edges(&mut edges);
    for e in edges {
        let (sx, sy) = (side(inp.owner[e.u]), side(inp.owner[e.v]));
        let payer = match (&sx, &sy) {
            (Side::Pays(p), _) | (_, Side::Pays(p)) => Some(p.clone()),
            _ => None,
        };
        match payer {
            Some(Payer::Cluster(x)) => {
                acc.charge[x] += e.w;
                acc.transfers.push((Payer::Cluster(x), e));
            }
            Some(Payer::Pool(nodes)) => {
                let total: f64 = nodes.iter().map(|&x| inp.units[x]).sum();
                if total > 0.0 {
                    for &x in &nodes {
                        acc.charge[x] += e.w * inp.units[x] / total;
                    }
                    acc.transfers.push((Payer::Pool(nodes), e));
                } else {
                    acc.unpaid.push(UnpaidEdge {
                        edge: e,
                        both_short_internal: false,
                    });
                }
            }
            Some(Payer::Fallback) => {
                fallback_paid += e.w;
                acc.transfers.push((Payer::Fallback, e));
            }
            None if exceptional => acc.b_edges.push(e),
            None => acc.unpaid.push(UnpaidEdge {
                edge: e,
                both_short_internal: sx == Side::ShortInternal && sy == Side::ShortInternal,
            }),
        }
    }
    if fallback {
        let connecting: usize = built.connecting_pieces.iter().sum();
        acc.fallback = Some(FallbackPool {
            pool_units: inp.units.iter().sum::<f64>() + connecting as f64 * inp.piece_units,
            reserve_units: acc.retained.iter().sum(),
            paid: fallback_paid,
        });
    }
    acc
}

/// Smallest three-significant-digit `c` in `[lo, hi]` for which
/// `feasible` holds, assuming feasibility is monotone in `c`.
pub fn search_min_c<F: Fn(f64) -> bool>(feasible: F, lo: f64, hi: f64) -> Option<f64> {
    if !feasible(hi) {
        return None;
    }
    if feasible(lo) {
        return Some(lo);
    }
    let (mut a, mut b) = (lo, hi);
    while (b - a) > 1e-7 * b {
        let mid = 0.5 * (a + b);
        if feasible(mid) {
            b = mid;
        } else {
            a = mid;
        }
    }
    let mut c = round_up_3(a);
    while !feasible(c) && c < b {
        c = round_up_3(c * (1.0 + 1e-4));
    }
    Some(c.min(round_up_3(b)))
}

/// Rounds up to three significant digits.
pub fn round_up_3(x: f64) -> f64 {
    if x <= 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(2 - x.log10().floor() as i32);
    let r = (x * scale * (1.0 - 1e-12)).ceil() / scale;
    if r < x {
        r + 1.0 / scale
    } else {
        r
    }
}
