//! Checks of the constructed final coalgebras: membership of unfolded
//! elements, the unfold equation and bounded uniqueness of unfold.

use crate::final_coalgebra::{build_final, counter_coalgebra, stream_nf, Coalgebra, FinalCoalgebra, FinalError};
use crate::functors::inject;
use crate::kernel::{Fuel, PFun, PVal, Ty};
use crate::surface::{ElabEnv, TypeEntry};

use super::{err, run, CheckConfig, CheckResult};

/// Labels sampled from each summand's label type.
fn label_samples(handle: &FinalCoalgebra) -> Result<Vec<Vec<PVal>>, String> {
    handle.nf().summands.iter().map(|(a, _)| a.samples(3).map_err(err)).collect()
}

/// Every label of `labels` injected at its summand.
pub fn tagged_labels(labels: &[Vec<PVal>]) -> Vec<PVal> {
    let n = labels.len();
    labels.iter().enumerate().flat_map(|(i, ls)| ls.iter().map(move |a| inject(i, n, a.clone()))).collect()
}

/// A coalgebra on seeds `0, 1, 2`: seed `k` picks the first summand at or
/// after `k mod n` with a label, the `k`-th label there, and sends
/// direction `y` to seed `(k + 1 + index of y) mod 3`.
pub fn generic_coalgebra(handle: &FinalCoalgebra, labels: Vec<Vec<PVal>>) -> Option<(Coalgebra, Vec<PVal>)> {
    let n = handle.summands();
    if labels.iter().all(Vec::is_empty) {
        return None;
    }
    let nf = handle.nf().clone();
    let exps: Vec<Vec<PVal>> = handle.exponents().to_vec();
    let d = Coalgebra::new(move |z, _| {
        let k = z.as_u64().ok_or_else(|| FinalError::NotInCarrier(format!("seed {z}")))? as usize;
        let i = (k..k + n).map(|j| j % n).find(|j| !labels[*j].is_empty()).expect("some summand has labels");
        let a = labels[i][k % labels[i].len()].clone();
        let dirs = exps[i].clone();
        let g = PFun::new(move |y, _| {
            Ok(dirs.iter().position(|v| v.structurally_eq(y)).map_or(PVal::Undefined, |p| PVal::nat(((k + 1 + p) % 3) as u64)))
        })
        .with_domain(nf.summands[i].1.clone());
        Ok(nf.build(i, a, PVal::Fun(g))?)
    });
    Some((d, (0..3).map(PVal::nat).collect()))
}

/// Membership, the unfold equation at every seed and uniqueness of unfold
/// among maps into `candidates` plus undefined.
pub fn coalgebra_checks(
    prefix: &str,
    handle: &FinalCoalgebra,
    d: &Coalgebra,
    seeds: &[PVal],
    candidates: &[PVal],
    cfg: &CheckConfig,
) -> Vec<CheckResult> {
    let depth = cfg.obs_depth;
    vec![
        run(format!("{prefix}/membership"), || {
            for z in seeds {
                let t = handle.unfold(d, z);
                if let Err(e) = handle.check_membership(&t, depth, &mut Fuel::new(cfg.fuel)) {
                    return Ok(Err(format!("unfold at seed {z}: {e}")));
                }
            }
            Ok(Ok(format!("{} seeds, paths up to length {depth}", seeds.len())))
        }),
        run(format!("{prefix}/unfold-equation"), || {
            for z in seeds {
                if !handle.check_unfold_equation(d, z, depth, &mut Fuel::new(cfg.fuel)).map_err(err)? {
                    return Ok(Err(format!("structure after unfold differs from F unfold after d at seed {z}")));
                }
            }
            Ok(Ok(format!("{} seeds, paths up to length {depth}", seeds.len())))
        }),
        run(format!("{prefix}/unfold-uniqueness"), || {
            let mut fuel = Fuel::new(cfg.fuel.saturating_mul(100));
            let (count, agrees) = handle.unfold_uniqueness(d, seeds, candidates, depth, &mut fuel).map_err(err)?;
            if count != 1 || !agrees {
                return Ok(Err(format!("{count} solutions up to length {depth}, agrees with unfold: {agrees}")));
            }
            Ok(Ok(format!("one solution over {} candidate labels up to length {depth}", candidates.len())))
        }),
    ]
}

/// The counter stream `d n = (n, λ_. n + 1)` over `Nat`: the coalgebra
/// checks and the observation at the path of length `k` for `k ≤ 8`.
pub fn counter_stream_checks(cfg: &CheckConfig) -> Vec<CheckResult> {
    let prefix = "final/builtin/counter";
    let handle = match build_final(&stream_nf(Ty::Nat)) {
        Ok(h) => h,
        Err(e) => return vec![CheckResult::fail(prefix, e.to_string())],
    };
    let d = counter_coalgebra();
    let seeds: Vec<PVal> = (0..3).map(PVal::nat).collect();
    let bound = 3 + cfg.obs_depth as u64 + 2;
    let candidates: Vec<PVal> = (0..=bound).map(PVal::nat).collect();
    let mut out = coalgebra_checks(prefix, &handle, &d, &seeds, &candidates, cfg);
    out.push(run(format!("{prefix}/observation"), || {
        let t = handle.unfold(&d, &PVal::nat(0));
        let mut fuel = Fuel::new(cfg.fuel);
        for k in 0..=8u64 {
            let v = t.observe(&vec![PVal::Unit; k as usize], &mut fuel).map_err(err)?;
            if v.as_u64() != Some(k) {
                return Ok(Err(format!("observation at the path of length {k} is {v}")));
            }
        }
        Ok(Ok("observation at length k is k for k ≤ 8".into()))
    }));
    out
}

/// Checks every cotype of the environment, parameters set to `Bool`, with
/// the generic coalgebra, and the counter stream.
pub fn final_suite(env: &ElabEnv, cfg: &CheckConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for name in env.type_names() {
        if !matches!(env.entry(name), Some(TypeEntry::Co(_))) {
            continue;
        }
        let prefix = format!("final/{name}");
        let handle = match env.instantiate_all(name, &Ty::Bool) {
            Ok(TypeEntry::Co(e)) => e.handle,
            Ok(_) => continue,
            Err(e) => {
                out.push(CheckResult::skip(prefix, format!("cannot instantiate: {e}")));
                continue;
            }
        };
        let labels = match label_samples(&handle) {
            Ok(l) => l,
            Err(e) => {
                out.push(CheckResult::skip(prefix, format!("labels cannot be sampled: {e}")));
                continue;
            }
        };
        let candidates = tagged_labels(&labels);
        match generic_coalgebra(&handle, labels) {
            Some((d, seeds)) => out.extend(coalgebra_checks(&prefix, &handle, &d, &seeds, &candidates, cfg)),
            None => out.push(CheckResult::skip(prefix, "every label type is empty")),
        }
    }
    out.extend(counter_stream_checks(cfg));
    out
}
