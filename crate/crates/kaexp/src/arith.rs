//! Tetration, iterated ceiling-log and integer square roots over exact naturals.

use num_bigint::BigUint;
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("result needs more than {max_bits} bits")]
    CapExceeded { max_bits: u64 },
    #[error("klog is undefined on 0")]
    DomainError,
    #[error("tower height must be at least 1")]
    ZeroHeight,
    #[error("invalid polynomial: {0}")]
    BadPolynomial(String),
    #[error("resource cap must allow at least 64 bits, got {0}")]
    BadCap(u64),
}

/// Unsigned integer types the helpers below work over.
pub trait Natural: Integer + Roots + Clone {
    fn bit_len(&self) -> u64;
    fn from_u64(v: u64) -> Self;
}

impl Natural for u64 {
    fn bit_len(&self) -> u64 {
        64 - u64::from(self.leading_zeros())
    }
    fn from_u64(v: u64) -> Self {
        v
    }
}

impl Natural for u128 {
    fn bit_len(&self) -> u64 {
        128 - u64::from(self.leading_zeros())
    }
    fn from_u64(v: u64) -> Self {
        u128::from(v)
    }
}

impl Natural for BigUint {
    fn bit_len(&self) -> u64 {
        self.bits()
    }
    fn from_u64(v: u64) -> Self {
        BigUint::from(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceCap {
    max_result_bits: u64,
}

impl ResourceCap {
    pub fn new(max_result_bits: u64) -> Result<Self, ArithError> {
        if max_result_bits < 64 {
            return Err(ArithError::BadCap(max_result_bits));
        }
        Ok(ResourceCap { max_result_bits })
    }

    pub fn max_result_bits(&self) -> u64 {
        self.max_result_bits
    }
}

impl Default for ResourceCap {
    fn default() -> Self {
        ResourceCap { max_result_bits: 1 << 20 }
    }
}

/// tetra(0,n) = n, tetra(k,n) = 2^tetra(k-1,n).
pub fn tetra(k: u32, n: u64, cap: ResourceCap) -> Result<BigUint, ArithError> {
    let mut v = BigUint::from(n);
    for _ in 0..k {
        // 2^v has v+1 bits
        let e = match v.to_u64() {
            Some(e) if e < cap.max_result_bits => e,
            _ => {
                return Err(ArithError::CapExceeded {
                    max_bits: cap.max_result_bits,
                })
            }
        };
        v = BigUint::one() << e;
    }
    Ok(v)
}

/// Same as [`tetra`] but as a machine integer, when it fits.
pub fn tetra_usize(k: u32, n: u64, cap: ResourceCap) -> Result<usize, ArithError> {
    let v = tetra(k, n, cap)?;
    v.to_usize().ok_or(ArithError::CapExceeded {
        max_bits: usize::BITS as u64,
    })
}

/// ⌈log₂ x⌉, with ⌈log₂ 0⌉ clamped to 0 (only reached inside klog chains).
pub fn ceil_log2<T: Natural>(x: &T) -> u64 {
    if x.is_zero() {
        return 0;
    }
    let pred = x.clone() - T::one();
    pred.bit_len()
}

/// k-fold iterated ceiling log. Intermediate zeros stay zero.
pub fn klog<T: Natural>(k: u32, m: &T) -> Result<u64, ArithError> {
    if m.is_zero() {
        return Err(ArithError::DomainError);
    }
    if k == 0 {
        return Err(ArithError::ZeroHeight);
    }
    let mut v = ceil_log2(m);
    for _ in 1..k {
        v = ceil_log2(&v);
    }
    Ok(v)
}

pub fn isqrt<T: Natural>(m: &T) -> T {
    m.sqrt()
}

/// m > tetra(k, n), decided through klog.
pub fn exceeds_tetra<T: Natural>(m: &T, k: u32, n: u64) -> bool {
    match klog(k, m) {
        Ok(v) => v > n,
        Err(_) => false,
    }
}

/// len >= tetra(k, f(base))², decided as klog_k(isqrt(len) + 1) > f(base).
pub fn at_least_h_squared<T: Natural>(len: &T, k: u32, f: &Polynomial, base: u64) -> bool {
    let fb = f.eval(&BigUint::from(base));
    let root = isqrt(len) + T::one();
    match klog(k, &root) {
        Ok(v) => BigUint::from(v) > fb,
        Err(_) => false,
    }
}

/// p(x) = Σ cᵢ xⁱ, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coefficients: Vec<u64>,
    shaped: bool,
}

impl Polynomial {
    pub fn new(coefficients: Vec<u64>) -> Result<Self, ArithError> {
        if coefficients.is_empty() {
            return Err(ArithError::BadPolynomial("no coefficients".into()));
        }
        Ok(Polynomial {
            coefficients,
            shaped: false,
        })
    }

    /// αx^d + β with α, β, d >= 1.
    pub fn shaped(alpha: u64, d: usize, beta: u64) -> Result<Self, ArithError> {
        if alpha == 0 || beta == 0 || d == 0 {
            return Err(ArithError::BadPolynomial(format!(
                "shape needs alpha, d, beta >= 1 (got {alpha}, {d}, {beta})"
            )));
        }
        let mut c = vec![0; d + 1];
        c[0] = beta;
        c[d] = alpha;
        Ok(Polynomial {
            coefficients: c,
            shaped: true,
        })
    }

    pub fn constant(c: u64) -> Self {
        Polynomial {
            coefficients: vec![c],
            shaped: false,
        }
    }

    /// p(x) = x
    pub fn identity() -> Self {
        Polynomial {
            coefficients: vec![0, 1],
            shaped: false,
        }
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn is_shaped(&self) -> bool {
        self.shaped
    }

    /// Marks an existing polynomial as αx^d+β after checking it has that form.
    pub fn into_shaped(self) -> Result<Self, ArithError> {
        let nz: Vec<usize> = (0..self.coefficients.len())
            .filter(|&i| self.coefficients[i] != 0)
            .collect();
        if nz.len() != 2 || nz[0] != 0 {
            return Err(ArithError::BadPolynomial(format!(
                "{:?} is not of the form a*x^d + b",
                self.coefficients
            )));
        }
        Polynomial::shaped(self.coefficients[nz[1]], nz[1], self.coefficients[0])
    }

    pub fn eval(&self, x: &BigUint) -> BigUint {
        // Horner
        let mut acc = BigUint::zero();
        for c in self.coefficients.iter().rev() {
            acc = acc * x + BigUint::from(*c);
        }
        acc
    }

    pub fn eval_u64(&self, x: u64) -> Option<u64> {
        let mut acc: u64 = 0;
        for c in self.coefficients.iter().rev() {
            acc = acc.checked_mul(x)?.checked_add(*c)?;
        }
        Some(acc)
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate().rev() {
            if *c == 0 && !(i == 0 && first) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}x")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub checked: u64,
    pub skipped: u64,
    pub failures: u64,
    pub counterexamples: Vec<String>,
}

impl LemmaCheck {
    fn new(name: &'static str) -> Self {
        LemmaCheck { name, checked: 0, skipped: 0, failures: 0, counterexamples: Vec::new() }
    }

    fn record(&mut self, ok: bool, case: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.counterexamples.len() < 16 {
                self.counterexamples.push(case());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }
}

/// The four arithmetic property suites; cases whose values exceed `cap`
/// are counted as skipped. `max_m` bounds the klog differential.
pub fn lemma_suite(max_m: u64, cap: ResourceCap) -> Vec<LemmaCheck> {
    let mut poly = LemmaCheck::new("polynomial-tower");
    for k in 1..=3 {
        for n in 1..=3u64 {
            for alpha in 1..=3 {
                for d in 1..=2 {
                    for beta in 1..=3 {
                        let p = Polynomial::shaped(alpha, d, beta).expect("valid shape");
                        let pn = p.eval_u64(n).expect("small");
                        match (tetra(k, pn, cap), tetra(k, n, cap)) {
                            (Ok(rhs), Ok(t)) => poly.record(p.eval(&t) <= rhs, || format!("k={k} n={n} p={p}")),
                            _ => poly.skipped += 1,
                        }
                    }
                }
            }
        }
    }
    let mut square = LemmaCheck::new("square-tower");
    for k in 1..=3 {
        for n in 1..=4u64 {
            match (tetra(k, n, cap), tetra(k, 2 * n, cap)) {
                (Ok(a), Ok(b)) => square.record(&a * &a <= b, || format!("k={k} n={n}")),
                _ => square.skipped += 1,
            }
        }
    }
    let mut klog_diff = LemmaCheck::new("klog-threshold");
    for k in 1..=2 {
        for n in 1..=4u64 {
            let t = tetra(k, n, cap).ok().and_then(|t| t.to_u64());
            for m in 1..=max_m {
                match t {
                    Some(t) => klog_diff.record(exceeds_tetra(&m, k, n) == (m > t), || format!("k={k} n={n} m={m}")),
                    None => klog_diff.skipped += 1,
                }
            }
        }
    }
    let mut roots = LemmaCheck::new("isqrt");
    for m in 0..=1000u64 {
        let r = isqrt(&m);
        for n in 0..=1000u64 {
            roots.record((m >= n * n) == (r >= n), || format!("m={m} n={n}"));
        }
    }
    vec![poly, square, klog_diff, roots]
}
