//! Markov kernels: finite conditional tables and linear-Gaussian kernels.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::dist::finite::domain_product;
use crate::dist::Family;
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// Distribution over a node's domain; only positive entries are kept.
pub type Row = BTreeMap<i64, Rational>;

/// Builds a row, dropping zero entries.
pub fn row(entries: &[(i64, Rational)]) -> Row {
    entries
        .iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(v, p)| (*v, p.clone()))
        .collect()
}

/// Conditional table with one row per parent assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteKernel {
    node_domain: Vec<i64>,
    parent_domains: Vec<Vec<i64>>,
    rows: BTreeMap<Vec<i64>, Row>,
}

impl FiniteKernel {
    pub fn new(
        node_domain: Vec<i64>,
        parent_domains: Vec<Vec<i64>>,
        rows: BTreeMap<Vec<i64>, Row>,
    ) -> Result<Self> {
        if node_domain.is_empty() {
            return Err(Error::InvalidKernel("empty node domain".into()));
        }
        let keys = domain_product(&parent_domains);
        if keys.len() != rows.len() || keys.iter().any(|k| !rows.contains_key(k)) {
            return Err(Error::InvalidKernel(
                "rows must cover the parent domain product exactly".into(),
            ));
        }
        let mut clean = BTreeMap::new();
        for (pa, r) in rows {
            let mut total = Rational::zero();
            let mut kept = Row::new();
            for (v, p) in r {
                if !node_domain.contains(&v) {
                    return Err(Error::InvalidKernel(format!(
                        "value {v} outside the node domain"
                    )));
                }
                if p.is_negative() {
                    return Err(Error::InvalidKernel(format!(
                        "negative probability in row {pa:?}"
                    )));
                }
                total += &p;
                if !p.is_zero() {
                    kept.insert(v, p);
                }
            }
            if !total.is_one() {
                return Err(Error::InvalidKernel(format!("row {pa:?} sums to {total}")));
            }
            clean.insert(pa, kept);
        }
        Ok(FiniteKernel {
            node_domain,
            parent_domains,
            rows: clean,
        })
    }

    /// Kernel with row `f(pa)` at every parent assignment.
    pub fn from_fn(
        node_domain: Vec<i64>,
        parent_domains: Vec<Vec<i64>>,
        f: impl Fn(&[i64]) -> Row,
    ) -> Result<Self> {
        let rows = domain_product(&parent_domains)
            .into_iter()
            .map(|pa| {
                let r = f(&pa);
                (pa, r)
            })
            .collect();
        FiniteKernel::new(node_domain, parent_domains, rows)
    }

    /// Kernel ignoring its parents.
    pub fn constant(node_domain: Vec<i64>, parent_domains: Vec<Vec<i64>>, r: Row) -> Result<Self> {
        FiniteKernel::from_fn(node_domain, parent_domains, |_| r.clone())
    }

    /// Point mass at `value` for every parent assignment.
    pub fn point(node_domain: Vec<i64>, parent_domains: Vec<Vec<i64>>, value: i64) -> Result<Self> {
        FiniteKernel::constant(
            node_domain,
            parent_domains,
            [(value, Rational::one())].into_iter().collect(),
        )
    }

    pub fn node_domain(&self) -> &[i64] {
        &self.node_domain
    }

    pub fn parent_domains(&self) -> &[Vec<i64>] {
        &self.parent_domains
    }

    pub fn rows(&self) -> &BTreeMap<Vec<i64>, Row> {
        &self.rows
    }

    pub fn row(&self, pa: &[i64]) -> Option<&Row> {
        self.rows.get(pa)
    }

    pub fn prob(&self, pa: &[i64], v: i64) -> Rational {
        self.rows
            .get(pa)
            .and_then(|r| r.get(&v))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_perfect(&self) -> bool {
        let mut it = self.rows.values();
        match it.next() {
            Some(first) => it.all(|r| r == first),
            None => true,
        }
    }
}

/// `Z | pa ~ N(intercept + weights·pa, variance)`; zero variance is a
/// conditional point mass.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGaussianKernel {
    pub intercept: f64,
    pub weights: Vec<f64>,
    pub variance: f64,
}

impl LinearGaussianKernel {
    pub fn new(intercept: f64, weights: Vec<f64>, variance: f64) -> Result<Self> {
        if !intercept.is_finite() || weights.iter().any(|w| !w.is_finite()) || !variance.is_finite()
        {
            return Err(Error::InvalidKernel("non-finite parameter".into()));
        }
        if variance < 0.0 {
            return Err(Error::InvalidKernel(format!(
                "negative variance {variance}"
            )));
        }
        Ok(LinearGaussianKernel {
            intercept,
            weights,
            variance,
        })
    }

    /// `N(mean, variance)` ignoring `n_parents` parents.
    pub fn constant(mean: f64, variance: f64, n_parents: usize) -> Result<Self> {
        LinearGaussianKernel::new(mean, vec![0.0; n_parents], variance)
    }

    pub fn is_perfect(&self) -> bool {
        self.weights.iter().all(|w| *w == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    Finite(FiniteKernel),
    LinearGaussian(LinearGaussianKernel),
}

impl From<FiniteKernel> for Kernel {
    fn from(k: FiniteKernel) -> Self {
        Kernel::Finite(k)
    }
}

impl From<LinearGaussianKernel> for Kernel {
    fn from(k: LinearGaussianKernel) -> Self {
        Kernel::LinearGaussian(k)
    }
}

impl Kernel {
    pub fn family(&self) -> Family {
        match self {
            Kernel::Finite(_) => Family::Finite,
            Kernel::LinearGaussian(_) => Family::Gaussian,
        }
    }

    pub fn n_parents(&self) -> usize {
        match self {
            Kernel::Finite(k) => k.parent_domains.len(),
            Kernel::LinearGaussian(k) => k.weights.len(),
        }
    }

    /// Identical conditional for every parent value.
    pub fn is_perfect(&self) -> bool {
        match self {
            Kernel::Finite(k) => k.is_perfect(),
            Kernel::LinearGaussian(k) => k.is_perfect(),
        }
    }

    /// One-line human description, e.g. `N(0.5·A, 0.75)` or `{0: 2/5, 1: 3/5}`.
    pub fn describe(&self, parents: &[String]) -> String {
        match self {
            Kernel::LinearGaussian(k) => {
                let mut mean = String::new();
                let mut first = true;
                if k.intercept != 0.0 || k.weights.iter().all(|w| *w == 0.0) {
                    write!(mean, "{}", fmt_num(k.intercept)).ok();
                    first = false;
                }
                for (w, p) in k.weights.iter().zip(parents) {
                    if *w == 0.0 {
                        continue;
                    }
                    let sign = if *w < 0.0 { "-" } else { "+" };
                    if first {
                        if *w < 0.0 {
                            mean.push('-');
                        }
                    } else {
                        write!(mean, " {sign} ").ok();
                    }
                    first = false;
                    if w.abs() == 1.0 {
                        mean.push_str(p);
                    } else {
                        write!(mean, "{}·{p}", fmt_num(w.abs())).ok();
                    }
                }
                if k.variance == 0.0 {
                    format!("δ({mean})")
                } else {
                    format!("N({mean}, {})", fmt_num(k.variance))
                }
            }
            Kernel::Finite(k) => {
                let fmt_row = |r: &Row| {
                    let parts: Vec<String> = r
                        .iter()
                        .map(|(v, p)| format!("{v}: {}", format_rational(p)))
                        .collect();
                    format!("{{{}}}", parts.join(", "))
                };
                if k.is_perfect() {
                    return k.rows.values().next().map(fmt_row).unwrap_or_default();
                }
                let parts: Vec<String> = k
                    .rows
                    .iter()
                    .map(|(pa, r)| {
                        let cond: Vec<String> = parents
                            .iter()
                            .zip(pa)
                            .map(|(n, v)| format!("{n}={v}"))
                            .collect();
                        format!("[{}] {}", cond.join(","), fmt_row(r))
                    })
                    .collect();
                parts.join("; ")
            }
        }
    }
}

/// Short decimal form with at most 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    let r = (x * 1e12).round() / 1e12;
    let s = format!("{r}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}
