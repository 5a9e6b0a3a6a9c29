//! CSV tables. Floats are written with 17 significant digits.

use std::fmt::Write;

use crate::branching::CountSummary;
use crate::diffset::IntervalEstimate;
use crate::kernel::kernel_m;
use crate::params::Params;
use crate::spectral::{QuadratureGrid, SpectralResult, SweepRow};
use crate::typespace::TypeSpace;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `(x, y, m(x, y))` on an `n x n` cell-centred grid over `[-1, 1]^2`.
pub fn kernel_heatmap(p: &Params, ts: &TypeSpace, n: usize) -> String {
    let node = |i: usize| -1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
    let mut out = String::from("x,y,m\n");
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (node(i), node(j));
            writeln!(out, "{},{},{}", num(x), num(y), num(kernel_m(x, y, p, ts))).unwrap();
        }
    }
    out
}

pub fn components(ts: &TypeSpace) -> String {
    table(
        "index,lo,hi,length",
        ts.components()
            .iter()
            .enumerate()
            .map(|(i, c)| vec![i.to_string(), num(c.lo), num(c.hi), num(c.length())]),
    )
}

pub fn ledger(ts: &TypeSpace) -> String {
    table(
        "round,address,u,v,length",
        ts.ledger.iter().map(|r| {
            let addr: String = r.address.iter().map(|d| char::from(b'0' + d)).collect();
            vec![
                r.round.to_string(),
                addr,
                num(r.u),
                num(r.v),
                num(r.v - r.u),
            ]
        }),
    )
}

pub fn sweep(rows: &[SweepRow]) -> String {
    table(
        "epsilon,step,rho",
        rows.iter()
            .map(|r| vec![num(r.epsilon), num(r.step), num(r.rho)]),
    )
}

pub fn eigenfunctions(g: &QuadratureGrid, s: &SpectralResult) -> String {
    table(
        "node,weight,mu,nu",
        (0..g.len()).map(|i| {
            vec![
                num(g.nodes[i]),
                num(g.weights[i]),
                num(s.mu[i]),
                num(s.nu[i]),
            ]
        }),
    )
}

pub fn harris(errors: &[f64]) -> String {
    table(
        "n,max_rel_error",
        errors
            .iter()
            .enumerate()
            .map(|(i, e)| vec![(i + 1).to_string(), num(*e)]),
    )
}

pub fn counts(summaries: &[CountSummary]) -> String {
    let rows = summaries.iter().flat_map(|s| {
        s.sets.iter().enumerate().map(move |(k, set)| {
            let q = set
                .w_quantiles
                .map_or([String::new(), String::new(), String::new()], |q| {
                    q.map(num)
                });
            let [q10, q50, q90] = q;
            vec![
                num(s.x),
                s.n.to_string(),
                k.to_string(),
                num(set.lo),
                num(set.hi),
                num(set.mean),
                num(set.std_error),
                num(set.survival),
                q10,
                q50,
                q90,
            ]
        })
    });
    table(
        "x,n,set,lo,hi,mean,std_error,survival,w_q10,w_q50,w_q90",
        rows,
    )
}

pub fn coverage(est: &IntervalEstimate, union_length: Option<&[f64]>) -> String {
    table(
        "depth,covered,trials,estimate,ci_lo,ci_hi,mean_hits,mean_union_length",
        est.per_depth.iter().enumerate().map(|(d, pr)| {
            vec![
                (d + 1).to_string(),
                pr.successes.to_string(),
                pr.trials.to_string(),
                num(pr.estimate),
                num(pr.lo),
                num(pr.hi),
                num(est.mean_hits[d]),
                union_length.map_or(String::new(), |u| num(u[d])),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typespace;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1.0380036823431367] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn heatmap_shape() {
        let p = Params::new(0.26, 0.01).unwrap();
        let ts = typespace::build(&p, typespace::default_epsilon(&p)).unwrap();
        let csv = kernel_heatmap(&p, &ts, 10);
        assert_eq!(csv.lines().count(), 101);
        assert!(csv.starts_with("x,y,m\n"));
    }
}
