use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::metric::Element;
use crate::rational::Rational;

/// A finite metric space given by labels and a row-major distance matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSpaceTable {
    labels: Vec<String>,
    dist: Vec<Rational>,
}

impl FiniteSpaceTable {
    /// Checks only the shape: a non-empty label list without duplicates and
    /// an `n * n` matrix. Metric axioms are left to the caller.
    pub fn unchecked(labels: Vec<String>, dist: Vec<Rational>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidFiniteTable("no labels".into()));
        }
        if dist.len() != n * n {
            return Err(Error::InvalidFiniteTable(format!(
                "{n} labels need {} matrix entries, got {}",
                n * n,
                dist.len()
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::InvalidFiniteTable(format!("duplicate label {l:?}")));
            }
        }
        Ok(FiniteSpaceTable { labels, dist })
    }

    /// Exhaustively validates the metric axioms and requires every
    /// off-diagonal entry to be strictly positive.
    pub fn new(labels: Vec<String>, dist: Vec<Rational>) -> Result<Self> {
        let table = Self::unchecked(labels, dist)?;
        let n = table.len();
        for i in 0..n {
            for j in 0..n {
                let d = table.entry(i, j);
                let a = &table.labels[i];
                let b = &table.labels[j];
                if i == j && !d.is_zero() {
                    return Err(Error::InvalidFiniteTable(format!("d({a},{a}) = {d}, expected 0")));
                }
                if i != j && (d.is_zero() || d.is_negative()) {
                    return Err(Error::InvalidFiniteTable(format!("d({a},{b}) = {d} is not positive")));
                }
                if d != table.entry(j, i) {
                    return Err(Error::InvalidFiniteTable(format!(
                        "d({a},{b}) = {d} but d({b},{a}) = {}",
                        table.entry(j, i)
                    )));
                }
                for k in 0..n {
                    let via = table.entry(i, k) + table.entry(k, j);
                    if d > &via {
                        let c = &table.labels[k];
                        return Err(Error::InvalidFiniteTable(format!(
                            "triangle inequality fails at ({a}, {c}, {b}): d({a},{b}) = {d} > {via}"
                        )));
                    }
                }
            }
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &[Rational] {
        &self.dist
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i * self.labels.len() + j]
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        match e {
            Element::Label(l) => self.labels.iter().position(|x| x == l),
            _ => None,
        }
    }

    pub fn elements(&self) -> Vec<Element> {
        self.labels.iter().cloned().map(Element::Label).collect()
    }

    /// Smallest off-diagonal distance, or `None` for a one-point space.
    pub fn min_positive_distance(&self) -> Option<Rational> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.entry(i, j).clone())
            .min()
    }

    /// Smallest `N` with `2^-N + 2^-(N+1) < min distance`. Any regular
    /// sequence over this space is constant from index `N` on.
    pub fn stabilization_index(&self) -> u32 {
        let Some(delta) = self.min_positive_distance() else {
            return 0;
        };
        let mut n = 0;
        while Rational::pow2_neg(n) + Rational::pow2_neg(n + 1) >= delta {
            n += 1;
        }
        n
    }
}
