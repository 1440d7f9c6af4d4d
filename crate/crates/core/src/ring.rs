//! Truncated graded-commutative ring engine over exact rationals.
//!
//! A [`RingPresentation`] lists named generators by degree together with a
//! full multiplication table on basis elements; products landing above
//! `top_degree` are silently dropped (cohomology above the dimension
//! vanishes). [`GradedClass`] is a coefficient vector over such a basis.
//! All values are immutable and all operations are pure.

use std::fmt;
use std::sync::Arc;

use crate::error::CoreError;
use crate::scalar::Rat;

/// A named basis element of fixed (even) degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElem {
    pub name: String,
    pub degree: usize,
}

impl BasisElem {
    pub fn new(name: impl Into<String>, degree: usize) -> Self {
        BasisElem { name: name.into(), degree }
    }
}

type SparseVec = Vec<(usize, Rat)>;

/// A finite presentation of a truncated graded-commutative ring.
#[derive(Debug)]
pub struct RingPresentation {
    pub name: String,
    pub top_degree: usize,
    pub basis: Vec<BasisElem>,
    /// `table[i][j]` = product of basis elements `i`, `j`, sparse over the basis.
    table: Vec<Vec<SparseVec>>,
}

impl RingPresentation {
    /// Builds a presentation and validates gradedness and commutativity of
    /// the supplied table. The unit must be basis element 0 with degree 0.
    pub fn new(
        name: impl Into<String>,
        top_degree: usize,
        basis: Vec<BasisElem>,
        table: Vec<Vec<SparseVec>>,
    ) -> Result<Arc<Self>, CoreError> {
        let name = name.into();
        let n = basis.len();
        if n == 0 || basis[0].degree != 0 {
            return Err(CoreError::InvalidPresentation(format!(
                "{name}: basis element 0 must be the unit in degree 0"
            )));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(CoreError::InvalidPresentation(format!(
                "{name}: multiplication table must be {n}x{n}"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let want = basis[i].degree + basis[j].degree;
                for (k, c) in &table[i][j] {
                    if *k >= n {
                        return Err(CoreError::InvalidPresentation(format!(
                            "{name}: product ({i},{j}) references basis {k}"
                        )));
                    }
                    if !c.is_zero() && basis[*k].degree != want {
                        return Err(CoreError::InvalidPresentation(format!(
                            "{name}: product {}*{} has a component of degree {} (expected {})",
                            basis[i].name, basis[j].name, basis[*k].degree, want
                        )));
                    }
                }
                if want > top_degree && !table[i][j].is_empty() {
                    return Err(CoreError::InvalidPresentation(format!(
                        "{name}: product above top degree must be zero"
                    )));
                }
                if table[i][j] != table[j][i] {
                    return Err(CoreError::InvalidPresentation(format!(
                        "{name}: table not commutative at ({}, {})",
                        basis[i].name, basis[j].name
                    )));
                }
            }
            // unit row
            if table[0][i] != vec![(i, Rat::one())] {
                return Err(CoreError::InvalidPresentation(format!(
                    "{name}: 1*{} must be {}",
                    basis[i].name, basis[i].name
                )));
            }
        }
        Ok(Arc::new(RingPresentation { name, top_degree, basis, table }))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Index of the (unique) top-degree basis element, if any.
    pub fn point_index(&self) -> Option<usize> {
        let mut found = None;
        for (i, b) in self.basis.iter().enumerate() {
            if b.degree == self.top_degree {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }

    /// Exhaustive associativity check over all basis triples. Quadratic
    /// tables can hide subtle errors; this is the oracle the shipped
    /// presentations must pass.
    pub fn check_associativity(self: &Arc<Self>) -> Result<(), String> {
        let n = self.dim();
        for i in 0..n {
            let a = self.basis_class(i);
            for j in 0..n {
                let b = self.basis_class(j);
                let ab = a.mul(&b).unwrap();
                for k in 0..n {
                    let c = self.basis_class(k);
                    let bc = b.mul(&c).unwrap();
                    let left = ab.mul(&c).unwrap();
                    let right = a.mul(&bc).unwrap();
                    if left != right {
                        return Err(format!(
                            "associativity fails at ({}, {}, {})",
                            self.basis[i].name, self.basis[j].name, self.basis[k].name
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn zero(self: &Arc<Self>) -> GradedClass {
        GradedClass { ring: Arc::clone(self), coeffs: vec![Rat::zero(); self.dim()] }
    }

    pub fn one(self: &Arc<Self>) -> GradedClass {
        self.basis_class(0)
    }

    pub fn basis_class(self: &Arc<Self>, idx: usize) -> GradedClass {
        let mut c = self.zero();
        c.coeffs[idx] = Rat::one();
        c
    }

    pub fn from_coeffs(self: &Arc<Self>, coeffs: Vec<Rat>) -> GradedClass {
        assert_eq!(coeffs.len(), self.dim(), "coefficient vector length");
        GradedClass { ring: Arc::clone(self), coeffs }
    }
}

/// An even-cohomology class: exact rational coefficients over the basis of
/// a fixed presentation.
#[derive(Debug, Clone)]
pub struct GradedClass {
    ring: Arc<RingPresentation>,
    coeffs: Vec<Rat>,
}

impl PartialEq for GradedClass {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) && self.coeffs == other.coeffs
    }
}

impl Eq for GradedClass {}

impl GradedClass {
    pub fn ring(&self) -> &Arc<RingPresentation> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: usize) -> &Rat {
        &self.coeffs[idx]
    }

    pub fn set_coeff(mut self, idx: usize, c: Rat) -> Self {
        self.coeffs[idx] = c;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    fn same_ring(&self, other: &Self) -> Result<(), CoreError> {
        if Arc::ptr_eq(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(CoreError::PresentationMismatch(
                self.ring.name.clone(),
                other.ring.name.clone(),
            ))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, CoreError> {
        self.same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(GradedClass { ring: Arc::clone(&self.ring), coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CoreError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rat::from_int(-1))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        GradedClass { ring: Arc::clone(&self.ring), coeffs }
    }

    /// Bilinear extension of the multiplication table; components above
    /// `top_degree` are dropped by construction of the table.
    pub fn mul(&self, other: &Self) -> Result<Self, CoreError> {
        self.same_ring(other)?;
        let mut out = vec![Rat::zero(); self.ring.dim()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in &self.ring.table[i][j] {
                    out[*k] += &ab * c;
                }
            }
        }
        Ok(GradedClass { ring: Arc::clone(&self.ring), coeffs: out })
    }

    pub fn pow(&self, exp: u32) -> Result<Self, CoreError> {
        let mut out = self.ring.one();
        for _ in 0..exp {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Extracts the degree-`d` component.
    pub fn component(&self, d: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if self.ring.basis[i].degree == d { c.clone() } else { Rat::zero() })
            .collect();
        GradedClass { ring: Arc::clone(&self.ring), coeffs }
    }

    pub fn degree_zero_part(&self) -> Rat {
        self.coeffs
            .iter()
            .enumerate()
            .find(|(i, _)| self.ring.basis[*i].degree == 0)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Σ aᵏ/k! truncated at `top_degree`; requires the degree-0 component to
    /// vanish so that the sum is finite.
    pub fn exp_nilpotent(&self) -> Result<Self, CoreError> {
        let d0 = self.degree_zero_part();
        if !d0.is_zero() {
            return Err(CoreError::NotNilpotent(d0.to_string()));
        }
        let max_pow = self.ring.top_degree / 2; // lowest possible positive degree is 2
        let mut out = self.ring.one();
        let mut term = self.ring.one();
        let mut factorial = Rat::one();
        for k in 1..=max_pow.max(1) {
            term = term.mul(self)?;
            factorial = factorial * Rat::from_int(k as i64);
            out = out.add(&term.scale(&factorial.recip()?))?;
            if term.is_zero() {
                break;
            }
        }
        Ok(out)
    }

    /// Binomial series (1+x)^{1/2}; requires degree-0 component exactly 1.
    /// The square of the result reproduces the input exactly.
    pub fn sqrt_unit(&self) -> Result<Self, CoreError> {
        let d0 = self.degree_zero_part();
        if !d0.is_one() {
            return Err(CoreError::NotUnitOne(d0.to_string()));
        }
        let x = self.sub(&self.ring.one())?;
        let max_pow = self.ring.top_degree / 2;
        let mut out = self.ring.one();
        let mut term = self.ring.one();
        let mut coeff = Rat::one();
        for k in 1..=max_pow.max(1) {
            term = term.mul(&x)?;
            // binomial(1/2, k) built incrementally
            let kk = Rat::from_int(k as i64);
            coeff = coeff * (Rat::new(1, 2) - (kk.clone() - Rat::one())) * kk.recip()?;
            out = out.add(&term.scale(&coeff))?;
            if term.is_zero() {
                break;
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse of a unit `u0 + nilpotent` via the geometric
    /// series.
    pub fn inv_unit(&self) -> Result<Self, CoreError> {
        let d0 = self.degree_zero_part();
        if d0.is_zero() {
            return Err(CoreError::NotUnit);
        }
        let inv0 = d0.recip()?;
        let normalized = self.scale(&inv0);
        let x = normalized.sub(&self.ring.one())?;
        let max_pow = self.ring.top_degree / 2;
        let mut out = self.ring.one();
        let mut term = self.ring.one();
        let mut sign = Rat::one();
        for _ in 1..=max_pow.max(1) {
            term = term.mul(&x)?;
            sign = -sign;
            out = out.add(&term.scale(&sign))?;
            if term.is_zero() {
                break;
            }
        }
        Ok(out.scale(&inv0))
    }

    /// Coefficient of the point class (the unique top-degree basis element).
    pub fn integrate(&self) -> Rat {
        match self.ring.point_index() {
            Some(i) => self.coeffs[i].clone(),
            None => Rat::zero(),
        }
    }
}

impl fmt::Display for GradedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = &self.ring.basis[i].name;
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            if name == "1" {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "({c}){name}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
