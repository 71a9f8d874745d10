//! Exact linear feasibility over the rationals with a fraction-free
//! (integer-preserving) simplex. Entries are kept as integers over a common
//! denominator, the previous pivot, so every division is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<i64>,
    pub relation: Relation,
    pub rhs: i64,
}

/// `constraints` over variables `x ≥ 0`; optional nonnegative cost to minimize.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    pub n_vars: usize,
    pub constraints: Vec<Constraint>,
    pub cost: Option<Vec<i64>>,
}

impl LinearSystem {
    pub fn new(n_vars: usize) -> Self {
        LinearSystem {
            n_vars,
            constraints: Vec::new(),
            cost: None,
        }
    }

    pub fn push(&mut self, coeffs: Vec<i64>, relation: Relation, rhs: i64) {
        debug_assert_eq!(coeffs.len(), self.n_vars);
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// A feasible point (optimal for the cost, if any), or `None`.
    pub fn solve(&self) -> Option<Vec<BigRational>> {
        match run::<i128>(self) {
            Ok(r) => r,
            Err(Overflow) => run::<BigInt>(self).expect("big integers do not overflow"),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.solve().is_some()
    }
}

#[derive(Debug)]
struct Overflow;

trait Exact: Clone + std::fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn mul(&self, o: &Self) -> Result<Self, Overflow>;
    fn sub(&self, o: &Self) -> Result<Self, Overflow>;
    fn div_exact(&self, o: &Self) -> Self;
    fn signum(&self) -> i32;
    fn neg(&self) -> Self;
    fn to_big(&self) -> BigInt;
}

impl Exact for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn mul(&self, o: &Self) -> Result<Self, Overflow> {
        self.checked_mul(*o).ok_or(Overflow)
    }
    fn sub(&self, o: &Self) -> Result<Self, Overflow> {
        self.checked_sub(*o).ok_or(Overflow)
    }
    fn div_exact(&self, o: &Self) -> Self {
        debug_assert_eq!(self % o, 0);
        self / o
    }
    fn signum(&self) -> i32 {
        i128::signum(*self) as i32
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Exact for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn mul(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self * o)
    }
    fn sub(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self - o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

struct Tableau<T> {
    /// Constraint rows, then the objective row last. Last column is the rhs.
    t: Vec<Vec<T>>,
    basis: Vec<usize>,
    d: T,
}

impl<T: Exact> Tableau<T> {
    fn rows(&self) -> usize {
        self.t.len() - 1
    }

    fn cols(&self) -> usize {
        self.t[0].len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<(), Overflow> {
        let p = self.t[r][c].clone();
        let width = self.t[0].len();
        for i in 0..self.t.len() {
            if i == r {
                continue;
            }
            let f = self.t[i][c].clone();
            for j in 0..width {
                let v = p.mul(&self.t[i][j])?.sub(&f.mul(&self.t[r][j])?)?;
                self.t[i][j] = v.div_exact(&self.d);
            }
        }
        self.d = p;
        self.basis[r] = c;
        if self.d.signum() < 0 {
            for row in self.t.iter_mut() {
                for v in row.iter_mut() {
                    *v = v.neg();
                }
            }
            self.d = self.d.neg();
        }
        Ok(())
    }

    /// Bland's rule minimization over columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize) -> Result<bool, Overflow> {
        let m = self.rows();
        let rhs = self.cols();
        loop {
            let Some(c) = (0..allowed).find(|&j| self.t[m][j].signum() < 0) else {
                return Ok(true);
            };
            let mut best: Option<usize> = None;
            for i in 0..m {
                if self.t[i][c].signum() <= 0 {
                    continue;
                }
                best = match best {
                    None => Some(i),
                    Some(b) => {
                        // t[i][rhs]/t[i][c] vs t[b][rhs]/t[b][c]
                        let lhs = self.t[i][rhs].mul(&self.t[b][c])?;
                        let rhs_v = self.t[b][rhs].mul(&self.t[i][c])?;
                        let s = lhs.sub(&rhs_v)?.signum();
                        if s < 0 || (s == 0 && self.basis[i] < self.basis[b]) {
                            Some(i)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            match best {
                None => return Ok(false),
                Some(r) => self.pivot(r, c)?,
            }
        }
    }
}

fn run<T: Exact>(sys: &LinearSystem) -> Result<Option<Vec<BigRational>>, Overflow> {
    let n = sys.n_vars;
    // structural variables, then one slack per inequality
    let n_slack = sys.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let m = sys.constraints.len();
    let n_orig = n + n_slack;
    let width = n_orig + m + 1;
    let mut t: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    let mut slack = n;
    for (i, c) in sys.constraints.iter().enumerate() {
        let mut row = vec![T::from_i64(0); width];
        for (j, &a) in c.coeffs.iter().enumerate() {
            row[j] = T::from_i64(a);
        }
        match c.relation {
            Relation::Eq => {}
            Relation::Ge => {
                row[slack] = T::from_i64(-1);
                slack += 1;
            }
            Relation::Le => {
                row[slack] = T::from_i64(1);
                slack += 1;
            }
        }
        row[width - 1] = T::from_i64(c.rhs);
        if c.rhs < 0 {
            for v in row.iter_mut() {
                *v = v.neg();
            }
        }
        row[n_orig + i] = T::from_i64(1);
        t.push(row);
    }
    // phase one: minimize the sum of artificials
    let mut obj = vec![T::from_i64(0); width];
    for j in 0..width {
        if j >= n_orig && j < n_orig + m {
            continue;
        }
        let mut s = T::from_i64(0);
        for row in &t {
            s = s.sub(&row[j])?;
        }
        obj[j] = s;
    }
    t.push(obj);
    let mut tab = Tableau {
        t,
        basis: (n_orig..n_orig + m).collect(),
        d: T::from_i64(1),
    };
    tab.optimize(n_orig + m)?;
    if tab.t[m][width - 1].signum() != 0 {
        return Ok(None);
    }

    // drive zero-level artificials out of the basis, dropping redundant rows
    let mut i = 0;
    while i < tab.rows() {
        if tab.basis[i] >= n_orig {
            match (0..n_orig).find(|&j| tab.t[i][j].signum() != 0) {
                Some(j) => tab.pivot(i, j)?,
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    for row in tab.t.iter_mut() {
        let rhs = row[width - 1].clone();
        row.truncate(n_orig);
        row.push(rhs);
    }

    if let Some(cost) = &sys.cost {
        let rows = tab.rows();
        let w = n_orig + 1;
        let cost_of = |j: usize| if j < n { cost[j] } else { 0 };
        let mut obj = vec![T::from_i64(0); w];
        for j in 0..w {
            let mut v = if j < n_orig {
                tab.d.mul(&T::from_i64(cost_of(j)))?
            } else {
                T::from_i64(0)
            };
            for r in 0..rows {
                let cb = cost_of(tab.basis[r]);
                if cb != 0 {
                    v = v.sub(&T::from_i64(cb).mul(&tab.t[r][j])?)?;
                }
            }
            obj[j] = v;
        }
        let last = tab.t.len() - 1;
        tab.t[last] = obj;
        if !tab.optimize(n_orig)? {
            // nonnegative costs over x ≥ 0 cannot be unbounded
            unreachable!("unbounded with nonnegative cost");
        }
    }

    let mut x = vec![BigRational::zero(); n];
    let d = tab.d.to_big();
    let rhs = tab.cols();
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = BigRational::new(tab.t[r][rhs].to_big(), d.clone());
        }
    }
    Ok(Some(x))
}

/// Converts a rational vector to integers by clearing denominators.
pub fn integer_witness(x: &[BigRational]) -> Option<Vec<i64>> {
    use num_integer::Integer;
    let mut l = BigInt::from(1);
    for v in x {
        l = l.lcm(v.denom());
    }
    let mut g = BigInt::zero();
    let ints: Vec<BigInt> = x.iter().map(|v| (v * BigRational::from_integer(l.clone())).to_integer()).collect();
    for v in &ints {
        g = g.gcd(v);
    }
    if g.is_zero() {
        g = BigInt::from(1);
    }
    ints.iter().map(|v| (v / &g).to_i64()).collect()
}
