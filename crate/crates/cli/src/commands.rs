//! Command dispatch. Every compute command produces a [`Rendered`] value;
//! `verify` produces reports and decides the exit code.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use ctasep::continuum::{
    conj_table, correlations_exact, correlations_mc, g_poly, harmonic_census, p_exact, p_mc,
    p_w0_formula,
};
use ctasep::count::{
    g_pi_brute, g_skw0_formula, g_sw0_formula, g_w0_formula, mlq_census, w0, Comparison,
    PositionVector, DEFAULT_MLQ_CAP,
};
use ctasep::markov::{
    is_stationary, k_transition_matrix, last_row_matrix, mc_stationary, stationary_for_type,
    stationary_rotation_lumped, McConfig,
};
use ctasep::mlq::{bottom_word, label_mlq};
use ctasep::poly::{vandermonde, OperatorExpr};
use ctasep::primitives::rational_to_string;
use ctasep::rs::{apply_e, apply_e_set, enumerate_patterns, rs_stationary, LinkingPattern};
use ctasep::tableaux::{
    discrete_mlq_to_ssyt, f_pi_initial, fw_brute, fw_count, gt_pattern_count, ssyt_brute,
    ssyt_count_hook_content, ssyt_count_jacobi_trudi, Partition, DEFAULT_FW_CAP, DEFAULT_SSYT_CAP,
};
use ctasep::{tasep_step, DiscreteMLQ, Permutation, RingWord, TypeVector};

use crate::args::{
    Command, ContinuumCheck, ContinuumCmd, CountArgs, FormulaSpec, MlqCmd, PolyCmd, RsCmd,
    SsytRoute, TabCmd, TasepCmd, TypeArgs,
};
use crate::emit::{Rendered, Table};
use crate::report::{Severity, VerificationReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] ctasep::Error),
    #[error(transparent)]
    Emit(#[from] crate::emit::EmitError),
    #[error(transparent)]
    Suite(#[from] crate::suite::SuiteError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = Result<T, CliError>;

fn type_vector(ty: &TypeArgs) -> CliResult<TypeVector> {
    Ok(TypeVector::new(ty.m.clone(), ty.sites)?)
}

fn permutation(s: &str) -> CliResult<Permutation> {
    Ok(s.parse()?)
}

/// Rows such as `5;3,4;2,3,7` (0-based positions, top row first).
pub fn parse_rows(s: &str) -> CliResult<Vec<Vec<usize>>> {
    s.split(';')
        .map(|row| {
            let row = row.trim();
            if row.is_empty() {
                return Ok(Vec::new());
            }
            row.split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| CliError::Usage(format!("bad position {p:?} in --rows")))
                })
                .collect()
        })
        .collect()
}

/// Runs a compute command. `verify` is handled by the caller.
pub fn run(cmd: &Command, seed: u64) -> CliResult<Rendered> {
    match cmd {
        Command::Tasep(c) => tasep(c, seed),
        Command::Mlq(c) => mlq(c),
        Command::Count(a) => count(a),
        Command::Continuum(c) => continuum(c, seed),
        Command::Poly(c) => poly(c),
        Command::Tab(c) => tab(c),
        Command::Rs(c) => rs(c),
        Command::Verify(_) => Err(CliError::Usage("verify is not a compute command".into())),
    }
}

fn tasep(cmd: &TasepCmd, seed: u64) -> CliResult<Rendered> {
    match cmd {
        TasepCmd::Stationary { ty, mc: false, .. } => {
            let d = stationary_for_type(&type_vector(ty)?)?;
            Ok(Rendered::json(&d).map_table("state", "probability"))
        }
        TasepCmd::Stationary {
            ty,
            mc: true,
            samples,
            burn_in,
            ..
        } => {
            let cfg = McConfig {
                burn_in: *burn_in,
                samples: *samples,
                seed,
                ..McConfig::default()
            };
            let est = mc_stationary(&type_vector(ty)?, &cfg)?;
            let mut t = Table::new(&["state", "estimate", "stderr"]);
            for (w, (p, se)) in &est.entries {
                t.push(vec![w.clone(), p.to_string(), se.to_string()]);
            }
            Ok(Rendered::json(&est).with_table(t))
        }
        TasepCmd::Step { word, site } => {
            let w: RingWord = word.parse()?;
            let next = tasep_step(&w, *site)?;
            Ok(Rendered::json(
                json!({"before": w.to_string(), "site": site, "after": next.to_string()}),
            ))
        }
        TasepCmd::KCheck { ty, k } => {
            let t = type_vector(ty)?;
            if *k == 0 || *k > t.sites() {
                return Err(CliError::Usage(format!(
                    "k = {k} outside 1..={}",
                    t.sites()
                )));
            }
            let base = stationary_for_type(&t)?;
            let (space, p) = k_transition_matrix(&t, *k)?;
            let (method, same) = if *k < t.sites() {
                (
                    "unique stationary law compared",
                    stationary_rotation_lumped(&space, &p)? == base,
                )
            } else {
                ("pi P = pi", is_stationary(&base.to_vector(&space), &p))
            };
            Ok(Rendered::json(json!({
                "m": ty.m, "N": ty.sites, "k": k, "method": method, "same_as_tasep": same,
            })))
        }
        TasepCmd::LastRow { ty } => {
            let t = type_vector(ty)?;
            let (space, p) = last_row_matrix(&t)?;
            let pi = stationary_for_type(&t)?.to_vector(&space);
            Ok(Rendered::json(
                json!({"m": ty.m, "N": ty.sites, "fixed": p.left_mul(&pi) == pi}),
            ))
        }
    }
}

fn mlq(cmd: &MlqCmd) -> CliResult<Rendered> {
    match cmd {
        MlqCmd::Label { ty, rows } => {
            let q = DiscreteMLQ::new(type_vector(ty)?, parse_rows(rows)?)?;
            let l = label_mlq(&q);
            let mut v = serde_json::to_value(&l).map_err(crate::emit::EmitError::from)?;
            v["bottom"] = Value::String(bottom_word(&l).to_string());
            Ok(Rendered::json(v))
        }
        MlqCmd::Count(a) => count(a),
        MlqCmd::Census { ty } => {
            let census = mlq_census(&type_vector(ty)?, DEFAULT_MLQ_CAP)?;
            let m: BTreeMap<String, u64> = census
                .into_iter()
                .map(|(w, c)| (w.to_string(), c))
                .collect();
            Ok(Rendered::json(m).map_table("state", "count"))
        }
    }
}

fn count(a: &CountArgs) -> CliResult<Rendered> {
    let n = a.b.len();
    let pi = match (&a.pi, &a.formula) {
        (Some(p), _) => permutation(p)?,
        (None, Some(f)) => f.permutation(n),
        (None, None) => return Err(CliError::Usage("give --pi or --formula".into())),
    };
    let b = PositionVector::new(a.b.clone(), a.sites)?;
    let brute = g_pi_brute(&pi, &b)?;
    let mut out = json!({"pi": pi.to_string(), "b": a.b, "N": a.sites, "count": brute.to_string()});
    if let Some(f) = &a.formula {
        let (name, value) = match f {
            FormulaSpec::W0 => ("w0".to_string(), g_w0_formula(&b)?),
            FormulaSpec::Skw0(k) => (format!("skw0:{k}"), g_skw0_formula(*k, &b)?),
            FormulaSpec::Sw0(ks) => {
                let list: Vec<String> = ks.iter().map(|k| k.to_string()).collect();
                (format!("sw0:{}", list.join(",")), g_sw0_formula(ks, &b)?)
            }
        };
        let mut cmp = Comparison::default();
        let expected_pi = f.permutation(n);
        cmp.record(|| "permutation".into(), &expected_pi, &pi);
        cmp.record(|| format!("b={:?} N={}", a.b, a.sites), brute, &value);
        out["formula"] = json!({
            "name": name,
            "value": value.to_string(),
            "status": if cmp.is_match() { "match" } else { "mismatch" },
            "mismatches": cmp.mismatches,
        });
    }
    Ok(Rendered::json(out))
}

fn continuum(cmd: &ContinuumCmd, seed: u64) -> CliResult<Rendered> {
    match cmd {
        ContinuumCmd::Pdist { n, mc: false, .. } => {
            Ok(Rendered::json(p_exact(*n)?).map_table("pi", "probability"))
        }
        ContinuumCmd::Pdist {
            n,
            mc: true,
            samples,
        } => {
            let est = p_mc(*n, *samples, seed)?;
            let mut t = Table::new(&["pi", "estimate", "stderr"]);
            let mut m = BTreeMap::new();
            for (pi, (p, se)) in &est {
                t.push(vec![pi.to_string(), p.to_string(), se.to_string()]);
                m.insert(pi.to_string(), json!({"estimate": p, "stderr": se}));
            }
            Ok(
                Rendered::json(json!({"n": n, "samples": samples, "seed": seed, "entries": m}))
                    .with_table(t),
            )
        }
        ContinuumCmd::Gpoly { pi } => Ok(Rendered::json(g_poly(&permutation(pi)?)?)),
        ContinuumCmd::Corr { n, mc: false, .. } => {
            let exact = correlations_exact(*n)?;
            let conj = conj_table(*n)?;
            let mut t = Table::new(&["i", "j", "exact", "conjecture"]);
            for i in 1..=*n {
                for j in 1..=*n {
                    t.push(vec![
                        i.to_string(),
                        j.to_string(),
                        rational_to_string(exact.get(i, j)),
                        rational_to_string(conj.get(i, j)),
                    ]);
                }
            }
            Ok(Rendered::json(json!({"n": n, "exact": exact, "conjecture": conj})).with_table(t))
        }
        ContinuumCmd::Corr {
            n,
            mc: true,
            samples,
        } => {
            let est = correlations_mc(*n, *samples, seed)?;
            let conj = conj_table(*n)?;
            let mut t = Table::new(&["i", "j", "estimate", "stderr", "conjecture"]);
            let mut rows = Vec::new();
            for i in 1..=*n {
                for j in 1..=*n {
                    let (e, se) = est.get(i, j);
                    let c = rational_to_string(conj.get(i, j));
                    t.push(vec![
                        i.to_string(),
                        j.to_string(),
                        e.to_string(),
                        se.to_string(),
                        c.clone(),
                    ]);
                    rows.push(
                        json!({"i": i, "j": j, "estimate": e, "stderr": se, "conjecture": c}),
                    );
                }
            }
            Ok(
                Rendered::json(json!({"n": n, "samples": samples, "seed": seed, "entries": rows}))
                    .with_table(t),
            )
        }
        ContinuumCmd::Pw0 { n } => {
            let exact = p_exact(*n)?.get(&w0(*n));
            let closed = p_w0_formula(*n);
            Ok(Rendered::json(json!({
                "n": n,
                "exact": rational_to_string(&exact),
                "closed_form": rational_to_string(&closed),
                "equal": exact == closed,
            })))
        }
        ContinuumCmd::Harmonic { n } => Ok(Rendered::json(harmonic_census(*n)?)),
        ContinuumCmd::Verify {
            what: ContinuumCheck::CorrConjecture,
            n,
        } => {
            let start = std::time::Instant::now();
            let exact = correlations_exact(*n)?;
            let conj = conj_table(*n)?;
            let mut cmp = Comparison::default();
            for i in 1..=*n {
                for j in 1..=*n {
                    cmp.record(
                        || format!("c({i},{j})"),
                        rational_to_string(conj.get(i, j)),
                        rational_to_string(exact.get(i, j)),
                    );
                }
            }
            let r = VerificationReport::from_comparison(
                &format!("conj-corr-n{n}"),
                8,
                Severity::Conjecture,
                json!({"n": n}),
                cmp,
                None,
                start.elapsed().as_millis() as u64,
            );
            Ok(Rendered::json(r))
        }
    }
}

fn poly(cmd: &PolyCmd) -> CliResult<Rendered> {
    match cmd {
        PolyCmd::Vandermonde { n } => Ok(Rendered::json(vandermonde(*n))),
        PolyCmd::Apply { op, pi } => {
            let op: OperatorExpr = op.parse()?;
            Ok(Rendered::json(op.apply(&g_poly(&permutation(pi)?)?)?))
        }
        PolyCmd::Laplacian { pi, n } => {
            let pi = permutation(pi)?;
            if let Some(n) = n {
                if *n != pi.len() {
                    return Err(CliError::Usage(format!(
                        "--n {n} but pi has {} entries",
                        pi.len()
                    )));
                }
            }
            Ok(Rendered::json(g_poly(&pi)?.laplacian()))
        }
    }
}

/// Completes a composition of `sites` by appending the missing last part.
fn full_composition(m: &[usize], sites: usize) -> CliResult<Vec<usize>> {
    let sum: usize = m.iter().sum();
    match sum.cmp(&sites) {
        std::cmp::Ordering::Equal => Ok(m.to_vec()),
        std::cmp::Ordering::Less => Ok(m.iter().copied().chain([sites - sum]).collect()),
        std::cmp::Ordering::Greater => Err(CliError::Usage(format!(
            "parts of --m sum to {sum} > N = {sites}"
        ))),
    }
}

fn tab(cmd: &TabCmd) -> CliResult<Rendered> {
    match cmd {
        TabCmd::SsytCount { shape, t, route } => {
            let lam = Partition::new(shape.clone())?;
            let value = match route {
                SsytRoute::Hook => ssyt_count_hook_content(&lam, *t),
                SsytRoute::Jt => ssyt_count_jacobi_trudi(&lam, *t)?,
                SsytRoute::Brute => ssyt_brute(&lam, *t, DEFAULT_SSYT_CAP)?.len().into(),
            };
            Ok(Rendered::json(
                json!({"shape": lam, "t": t, "count": value.to_string()}),
            ))
        }
        TabCmd::Fw { m, sites, brute } => {
            let full = full_composition(m, *sites)?;
            let c = fw_count(&full)?;
            let mut v = serde_json::to_value(&c).map_err(crate::emit::EmitError::from)?;
            if *brute {
                v["brute"] = Value::String(fw_brute(&full, DEFAULT_FW_CAP)?.to_string());
            }
            Ok(Rendered::json(v))
        }
        TabCmd::Fpi { x, sites } => {
            let p = f_pi_initial(x, *sites)?;
            Ok(Rendered::json(
                json!({"x": x, "N": sites, "probability": rational_to_string(&p)}),
            ))
        }
        TabCmd::Ssyt { m, sites, rows } => {
            let sum: usize = m.iter().sum();
            let ty = if sum == *sites {
                &m[..m.len() - 1]
            } else {
                &m[..]
            };
            let q = DiscreteMLQ::new(TypeVector::new(ty.to_vec(), *sites)?, parse_rows(rows)?)?;
            let tab = discrete_mlq_to_ssyt(&q)?;
            Ok(Rendered::json(json!({
                "tableau": tab.to_string(),
                "rows": tab.rows(),
                "shape": tab.shape(),
            })))
        }
        TabCmd::Gt { n } => Ok(Rendered::json(gt_pattern_count(*n)?)),
    }
}

fn rs(cmd: &RsCmd) -> CliResult<Rendered> {
    match cmd {
        RsCmd::Patterns { n } => {
            let ps = enumerate_patterns(*n)?;
            let mut t = Table::new(&["pattern", "nesting"]);
            for p in &ps {
                t.push(vec![p.to_string(), p.nesting().to_string()]);
            }
            Ok(Rendered::json(&ps).with_table(t))
        }
        RsCmd::Apply { pattern, e } => {
            let l: LinkingPattern = pattern.parse()?;
            let bad = e.iter().find(|&&i| i == 0 || i > 2 * l.size());
            if let Some(i) = bad {
                return Err(CliError::Usage(format!(
                    "e_{i} outside 1..={}",
                    2 * l.size()
                )));
            }
            let out = if e.len() == 1 {
                apply_e(&l, e[0])
            } else {
                apply_e_set(&l, e)
            };
            Ok(Rendered::json(
                json!({"before": l, "e": e, "after": out, "display": out.to_string()}),
            ))
        }
        RsCmd::Stationary { n, k } => {
            Ok(Rendered::json(rs_stationary(*n, *k)?).map_table("pattern", "probability"))
        }
    }
}
