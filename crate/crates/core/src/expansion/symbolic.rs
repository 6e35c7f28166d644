use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{GmcError, Result};
use crate::specfun::{rat, Rational};

/// Largest vertex index a monomial may carry.
pub const MAX_ARITY: usize = 15;

/// A product of edge symbols g[i,j] (i < j) and vertex symbols f[i], each with multiplicity.
///
/// Stored as a sorted list of symbol codes; edges sort before vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    codes: Vec<u16>,
}

const VERTEX_BASE: u16 = 1 << 8;

fn edge_code(i: usize, j: usize) -> u16 {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    ((a as u16) << 4) | b as u16
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn edge(i: usize, j: usize) -> Self {
        assert!(i != j && i <= MAX_ARITY && j <= MAX_ARITY && i > 0 && j > 0);
        Monomial {
            codes: vec![edge_code(i, j)],
        }
    }

    pub fn vertex(i: usize) -> Self {
        assert!(i > 0 && i <= MAX_ARITY);
        Monomial {
            codes: vec![VERTEX_BASE + i as u16],
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut codes = self.codes.clone();
        codes.extend_from_slice(&other.codes);
        codes.sort_unstable();
        Monomial { codes }
    }

    /// Number of symbol factors, counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.codes.len()
    }

    /// Edge factors (i, j) with i < j, with multiplicity.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.codes
            .iter()
            .filter(|c| **c < VERTEX_BASE)
            .map(|c| ((c >> 4) as usize, (c & 15) as usize))
    }

    /// Vertex factors f_i, with multiplicity.
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.codes
            .iter()
            .filter(|c| **c >= VERTEX_BASE)
            .map(|c| (c - VERTEX_BASE) as usize)
    }

    /// Distinct indices touched by any factor.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.edges().flat_map(|(i, j)| [i, j]).chain(self.vertices()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn max_index(&self) -> usize {
        self.support().last().copied().unwrap_or(0)
    }

    /// Relabel index i as perm[i] (perm[0] unused).
    pub fn relabel(&self, perm: &[usize]) -> Monomial {
        let mut codes: Vec<u16> = self
            .codes
            .iter()
            .map(|&c| {
                if c >= VERTEX_BASE {
                    VERTEX_BASE + perm[(c - VERTEX_BASE) as usize] as u16
                } else {
                    edge_code(perm[(c >> 4) as usize], perm[(c & 15) as usize])
                }
            })
            .collect();
        codes.sort_unstable();
        Monomial { codes }
    }

    /// The orbit under relabelling of 1..=k, by breadth-first search over adjacent swaps.
    pub fn orbit(&self, k: usize) -> Vec<Monomial> {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.clone());
        queue.push_back(self.clone());
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..=k).collect();
        while let Some(m) = queue.pop_front() {
            for a in 1..k {
                perm.swap(a, a + 1);
                let next = m.relabel(&perm);
                perm.swap(a, a + 1);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
            out.push(m);
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.codes.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.codes.len() {
            let c = self.codes[i];
            let mut mult = 1;
            while i + mult < self.codes.len() && self.codes[i + mult] == c {
                mult += 1;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if c >= VERTEX_BASE {
                write!(f, "f[{}]", c - VERTEX_BASE)?;
            } else {
                write!(f, "g[{},{}]", c >> 4, c & 15)?;
            }
            if mult > 1 {
                write!(f, "^{mult}")?;
            }
            i += mult;
        }
        Ok(())
    }
}

fn parse_index(s: &str) -> Result<usize> {
    let v: usize = s.trim().parse().map_err(|_| GmcError::Parse(format!("bad index '{s}'")))?;
    if v == 0 || v > MAX_ARITY {
        return Err(GmcError::Parse(format!("index {v} out of range 1..={MAX_ARITY}")));
    }
    Ok(v)
}

impl FromStr for Monomial {
    type Err = GmcError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Monomial::one());
        }
        let mut m = Monomial::one();
        for factor in s.split(' ').filter(|t| !t.is_empty()) {
            let (base, mult) = match factor.split_once('^') {
                Some((b, e)) => (
                    b,
                    e.parse::<usize>()
                        .map_err(|_| GmcError::Parse(format!("bad exponent in '{factor}'")))?,
                ),
                None => (factor, 1),
            };
            let sym = if let Some(inner) = base.strip_prefix("g[").and_then(|r| r.strip_suffix(']')) {
                let (a, b) = inner
                    .split_once(',')
                    .ok_or_else(|| GmcError::Parse(format!("bad edge '{base}'")))?;
                let (a, b) = (parse_index(a)?, parse_index(b)?);
                if a >= b {
                    return Err(GmcError::Parse(format!("edge '{base}' must have i < j")));
                }
                Monomial::edge(a, b)
            } else if let Some(inner) = base.strip_prefix("f[").and_then(|r| r.strip_suffix(']')) {
                Monomial::vertex(parse_index(inner)?)
            } else {
                return Err(GmcError::Parse(format!("unknown factor '{factor}'")));
            };
            for _ in 0..mult {
                m = m.mul(&sym);
            }
        }
        Ok(m)
    }
}

/// Polynomial in the g and f symbols with exact rational coefficients.
///
/// Every term carries the implicit factor phi(x_1) ... phi(x_k).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymbolicCoefficient {
    pub arity: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl SymbolicCoefficient {
    pub fn zero(arity: usize) -> Self {
        SymbolicCoefficient {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(arity: usize, m: Monomial, c: Rational) -> Self {
        let mut s = Self::zero(arity);
        s.add_term(m, c);
        s
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&mut self, other: &SymbolicCoefficient) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// Multiply by a polynomial given as (monomial, coefficient) pairs and relabel the arity.
    pub fn times(&self, factor: &[(Monomial, Rational)], arity: usize) -> SymbolicCoefficient {
        let mut out = Self::zero(arity);
        for (m, c) in &self.terms {
            for (fm, fc) in factor {
                out.add_term(m.mul(fm), c * fc);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> SymbolicCoefficient {
        let mut out = Self::zero(self.arity);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    /// Average over all relabellings of 1..=arity.
    ///
    /// Leaves every integral against a symmetric kernel unchanged and gives the
    /// canonical symmetric representative.
    pub fn symmetrize(&self) -> SymbolicCoefficient {
        let mut remaining = self.terms.clone();
        let mut out = Self::zero(self.arity);
        while let Some((m, _)) = remaining.first_key_value() {
            let orbit = m.clone().orbit(self.arity);
            let mut total = Rational::zero();
            for o in &orbit {
                if let Some(c) = remaining.remove(o) {
                    total += c;
                }
            }
            if total.is_zero() {
                continue;
            }
            let share = total / Rational::from_integer((orbit.len() as i64).into());
            for o in orbit {
                out.add_term(o, share.clone());
            }
        }
        out
    }

    /// Canonical text: terms "c * monomial" sorted by monomial text, joined by " + ".
    pub fn to_canonical_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut items: Vec<(String, &Rational)> = self.terms.iter().map(|(m, c)| (m.to_string(), c)).collect();
        items.sort_by(|a, b| a.0.cmp(&b.0));
        items
            .iter()
            .map(|(m, c)| format!("{c} * {m}"))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parse the canonical text form; the arity is the largest index used.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let mut out = Self::zero(0);
        if text == "0" {
            return Ok(out);
        }
        for term in text.split(" + ") {
            let (c, m) = term
                .split_once(" * ")
                .ok_or_else(|| GmcError::Parse(format!("term '{term}' lacks ' * '")))?;
            let c: Rational = c
                .trim()
                .parse()
                .map_err(|_| GmcError::Parse(format!("bad coefficient '{c}'")))?;
            if c.is_zero() {
                return Err(GmcError::Parse(format!("zero coefficient in '{term}'")));
            }
            let m: Monomial = m.parse()?;
            out.arity = out.arity.max(m.max_index());
            if out.terms.contains_key(&m) {
                return Err(GmcError::Parse(format!("duplicate monomial '{m}'")));
            }
            out.add_term(m, c);
        }
        Ok(out)
    }
}

impl fmt::Display for SymbolicCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

/// sum_{i<j<=k} g_ij (+ sum_{i<=k} f_i).
fn all_pairs(k: usize, with_f: bool) -> Vec<(Monomial, Rational)> {
    let mut v = Vec::new();
    for j in 2..=k {
        for i in 1..j {
            v.push((Monomial::edge(i, j), Rational::one()));
        }
    }
    if with_f {
        for i in 1..=k {
            v.push((Monomial::vertex(i), Rational::one()));
        }
    }
    v
}

/// sum_{i<k} g_ik (+ f_k).
fn new_vertex(k: usize, with_f: bool) -> Vec<(Monomial, Rational)> {
    let mut v: Vec<(Monomial, Rational)> = (1..k).map(|i| (Monomial::edge(i, k), Rational::one())).collect();
    if with_f {
        v.push((Monomial::vertex(k), Rational::one()));
    }
    v
}

/// h_{n,k} straight from the three-term recurrence, without symmetrization.
///
/// h_{n+1,k} = 1/2 h_{n,k-2} g_{k-1,k} + h_{n,k-1} (sum_{i<k} g_ik + f_k)
///           + h_{n,k} (sum_{i<j<=k} g_ij + sum_i f_i).
pub fn h_symbolic_raw(n: usize, with_f: bool) -> Result<BTreeMap<usize, SymbolicCoefficient>> {
    if n == 0 || n > 6 {
        return Err(GmcError::Domain(format!("h_symbolic supports 1 <= n <= 6, got {n}")));
    }
    let mut cur: BTreeMap<usize, SymbolicCoefficient> = BTreeMap::new();
    if with_f {
        cur.insert(1, SymbolicCoefficient::monomial(1, Monomial::vertex(1), Rational::one()));
    }
    cur.insert(2, SymbolicCoefficient::monomial(2, Monomial::edge(1, 2), rat(1, 2)));
    for m in 1..n {
        let mut next = BTreeMap::new();
        let k_lo = if with_f { 1 } else { 2 };
        for k in k_lo..=2 * (m + 1) {
            let mut h = SymbolicCoefficient::zero(k);
            if k >= 2 {
                if let Some(prev) = cur.get(&(k - 2)) {
                    h.add(&prev.times(&[(Monomial::edge(k - 1, k), rat(1, 2))], k));
                }
            }
            if let Some(prev) = cur.get(&(k - 1)) {
                h.add(&prev.times(&new_vertex(k, with_f), k));
            }
            if let Some(prev) = cur.get(&k) {
                h.add(&prev.times(&all_pairs(k, with_f), k));
            }
            if !h.is_empty() {
                next.insert(k, h);
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// h_{n,k} for every k with a nonzero coefficient, in symmetric canonical form.
pub fn h_symbolic(n: usize, with_f: bool) -> Result<BTreeMap<usize, SymbolicCoefficient>> {
    Ok(h_symbolic_raw(n, with_f)?
        .into_iter()
        .map(|(k, h)| (k, h.symmetrize()))
        .filter(|(_, h)| !h.is_empty())
        .collect())
}
