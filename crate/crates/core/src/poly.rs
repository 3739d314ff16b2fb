//! Integer polynomials and their local data: evaluation, reduction mod p,
//! distinct-root counting `omega_f(p)`, irreducibility screening, and
//! admissibility of polynomial families.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::primes::{self, is_prime_u64, mul_mod, pow_mod};

/// A nonconstant integer polynomial in canonical form: coefficients stored
/// constant-term first, trailing zeros trimmed, positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Build from constant-first coefficients. Fails unless the trimmed
    /// polynomial has degree >= 1 and a positive leading coefficient.
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::Domain(
                "polynomial must have degree at least 1".into(),
            ));
        }
        if !coeffs.last().unwrap().is_positive() {
            return Err(Error::Domain(
                "polynomial must have a positive leading coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    /// Constant-first coefficients.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Exact Horner evaluation.
    pub fn evaluate(&self, n: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }

    /// Coefficients as i128 when they all fit, for fast repeated evaluation.
    pub fn coeffs_i128(&self) -> Option<Vec<i128>> {
        self.coeffs.iter().map(|c| c.to_i128()).collect()
    }

    /// GCD of the coefficients (positive).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Divide out the content; returns (primitive part, removed content).
    pub fn primitive_part(&self) -> (IntPolynomial, BigInt) {
        let g = self.content();
        if g.is_one() {
            return (self.clone(), g);
        }
        let coeffs = self.coeffs.iter().map(|c| c / &g).collect();
        (IntPolynomial { coeffs }, g)
    }

    /// Product of two polynomials.
    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial { coeffs: out }
    }

    /// Reduce mod p into a constant-first `F_p` coefficient vector
    /// (trailing zeros trimmed; empty means identically zero).
    pub fn reduce_mod(&self, p: u64) -> Vec<u64> {
        let pb = BigInt::from(p);
        let mut out: Vec<u64> = self
            .coeffs
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect();
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    /// Parse integer polynomials in standard notation: `x^2+x+1`, `2x^3-5`,
    /// `x + 2`. Non-integer coefficients are rejected.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let bad = |tok: &str| Error::Parse(format!("invalid polynomial term '{tok}' in '{s}'"));

        // Split into signed terms.
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 {
                terms.push(std::mem::take(&mut cur));
                cur.push(ch);
            } else {
                cur.push(ch);
            }
        }
        terms.push(cur);

        let mut coeffs: Vec<BigInt> = Vec::new();
        for term in &terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, term.strip_prefix('+').unwrap_or(term)),
            };
            if body.is_empty() {
                return Err(bad(term));
            }
            let (coeff_str, exp) = match body.find('x') {
                None => (body, 0usize),
                Some(xi) => {
                    let after = &body[xi + 1..];
                    let exp = if after.is_empty() {
                        1
                    } else {
                        let e = after.strip_prefix('^').ok_or_else(|| bad(term))?;
                        e.parse::<usize>().map_err(|_| bad(term))?
                    };
                    (body[..xi].trim_end_matches('*'), exp)
                }
            };
            let coeff: BigInt = if coeff_str.is_empty() {
                BigInt::one()
            } else {
                coeff_str.parse().map_err(|_| bad(term))?
            };
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, BigInt::zero());
            }
            coeffs[exp] += sign * coeff;
        }
        IntPolynomial::new(coeffs)
    }
}

/// Number of distinct roots of a polynomial in `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootCount {
    pub p: u64,
    pub omega: u64,
}

fn require_prime(p: u64) -> Result<()> {
    if !is_prime_u64(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    Ok(())
}

/// `omega_f(p)` by exhaustive scan of all residues. If `f` vanishes
/// identically mod p, every residue is a root and `omega = p`.
pub fn count_roots_bruteforce(f: &IntPolynomial, p: u64) -> Result<RootCount> {
    require_prime(p)?;
    let reduced = f.reduce_mod(p);
    if reduced.is_empty() {
        return Ok(RootCount { p, omega: p });
    }
    let mut omega = 0;
    for l in 0..p {
        let mut acc = 0u64;
        for c in reduced.iter().rev() {
            acc = (mul_mod(acc, l, p) + c) % p;
        }
        if acc == 0 {
            omega += 1;
        }
    }
    Ok(RootCount { p, omega })
}

/// `omega_f(p)` as `deg gcd(x^p - x, f mod p)`, counting distinct roots.
///
/// `x^p mod f` is computed by square-and-multiply in `F_p[x]/(f)`. Degree
/// drops from `p` dividing the leading coefficient are handled by reducing
/// first; a polynomial that is a nonzero constant mod p has no roots. An
/// identically-zero reduction is signaled so the caller can fall back to
/// the brute-force path.
pub fn count_roots_frobenius(f: &IntPolynomial, p: u64) -> Result<RootCount> {
    require_prime(p)?;
    let reduced = f.reduce_mod(p);
    if reduced.is_empty() {
        return Err(Error::ZeroModP { p });
    }
    if reduced.len() == 1 {
        return Ok(RootCount { p, omega: 0 });
    }
    let monic = fp::monicize(&reduced, p);
    let xp = fp::pow_x(p, &monic, p);
    // x^p - x mod f
    let mut h = xp;
    if h.len() < 2 {
        h.resize(2, 0);
    }
    h[1] = (h[1] + p - 1) % p;
    fp::trim(&mut h);
    let g = fp::gcd(&monic, &h, p);
    Ok(RootCount {
        p,
        omega: (g.len().max(1) - 1) as u64,
    })
}

/// Dispatching root count: brute force for tiny p (where degenerate
/// reductions cluster and a scan is cheaper), Frobenius-gcd above.
pub fn count_roots(f: &IntPolynomial, p: u64) -> Result<RootCount> {
    if p <= 64 {
        return count_roots_bruteforce(f, p);
    }
    match count_roots_frobenius(f, p) {
        Err(Error::ZeroModP { .. }) => count_roots_bruteforce(f, p),
        other => other,
    }
}

/// Arithmetic in `F_p[x]`; polynomials are trimmed constant-first vectors.
mod fp {
    use super::{mul_mod, pow_mod};

    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn monicize(a: &[u64], p: u64) -> Vec<u64> {
        let lead = *a.last().unwrap();
        if lead == 1 {
            return a.to_vec();
        }
        let inv = pow_mod(lead, p - 2, p);
        a.iter().map(|&c| mul_mod(c, inv, p)).collect()
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder of `a` mod monic `m`.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        debug_assert_eq!(*m.last().unwrap(), 1);
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        while r.len() > dm {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            if lead != 0 {
                for (i, &mc) in m.iter().enumerate() {
                    let idx = i + shift;
                    r[idx] = (r[idx] + p - mul_mod(lead, mc, p)) % p;
                }
            }
            r.pop();
            trim(&mut r);
            if r.is_empty() {
                break;
            }
        }
        r
    }

    /// `x^e mod m` in `F_p[x]` for monic `m` of degree >= 1.
    pub fn pow_x(e: u64, m: &[u64], p: u64) -> Vec<u64> {
        pow(&[0, 1], e, m, p)
    }

    /// `b^e mod m` by square-and-multiply.
    pub fn pow(b: &[u64], e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut base = rem(b, m, p);
        let mut acc = rem(&[1], m, p);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &base, p), m, p);
            }
            base = rem(&mul(&base, &base, p), m, p);
            e >>= 1;
        }
        acc
    }

    /// Monic gcd; `a` must be monic.
    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let ym = monicize(&y, p);
            let r = rem(&x, &ym, p);
            x = ym;
            y = r;
        }
        if x.is_empty() {
            x
        } else {
            monicize(&x, p)
        }
    }

    /// Rabin irreducibility test over `F_p` for monic squarefree-checked input.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let n = f.len() - 1;
        if n == 1 {
            return true;
        }
        // x^{p^n} == x mod f, and gcd(x^{p^{n/q}} - x, f) = 1 for primes q | n.
        let frob_iter = |steps: usize| -> Vec<u64> {
            let mut g = vec![0, 1];
            for _ in 0..steps {
                g = pow(&g, p, f, p);
            }
            g
        };
        let sub_x = |mut g: Vec<u64>, p: u64| -> Vec<u64> {
            if g.len() < 2 {
                g.resize(2, 0);
            }
            g[1] = (g[1] + p - 1) % p;
            trim(&mut g);
            g
        };
        let top = sub_x(frob_iter(n), p);
        if !top.is_empty() {
            return false;
        }
        let mut divs = Vec::new();
        let mut m = n;
        let mut q = 2;
        while q * q <= m {
            if m.is_multiple_of(q) {
                divs.push(q);
                while m.is_multiple_of(q) {
                    m /= q;
                }
            }
            q += 1;
        }
        if m > 1 {
            divs.push(m);
        }
        for q in divs {
            let g = sub_x(frob_iter(n / q), p);
            let d = gcd(f, &g, p);
            if d.len() != 1 {
                return false;
            }
        }
        true
    }
}

/// Outcome of the cheap irreducibility screen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScreenVerdict {
    /// Irreducible over Q; `Some(p)` records the certifying prime (absent
    /// for the trivial degree-1 case).
    CertifiedIrreducible(Option<u64>),
    /// The screen could not decide; the polynomial stays usable, flagged.
    Inconclusive,
    /// Reducible, with a witness factorization.
    Reducible(IntPolynomial, IntPolynomial),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScreenResult {
    pub verdict: ScreenVerdict,
    /// True when a content > 1 was divided out before screening.
    pub content_divided: bool,
}

/// Cheap irreducibility screen: degree-1 certification, rational-root and
/// content checks (reducible with witness), then a search for a prime
/// `p <= prime_budget` with `f mod p` irreducible over `F_p` (a sufficient
/// condition). Anything else is inconclusive.
pub fn irreducibility_screen(f: &IntPolynomial, prime_budget: u64) -> Result<ScreenResult> {
    let (prim, content) = f.primitive_part();
    let content_divided = !content.is_one();
    let f = &prim;
    if f.degree() == 1 {
        return Ok(ScreenResult {
            verdict: ScreenVerdict::CertifiedIrreducible(None),
            content_divided,
        });
    }

    if let Some(witness) = rational_root_factor(f) {
        return Ok(ScreenResult {
            verdict: ScreenVerdict::Reducible(witness.0, witness.1),
            content_divided,
        });
    }

    let lead = f.coeffs().last().unwrap().clone();
    let mut p = 2u64;
    while p <= prime_budget {
        if is_prime_u64(p) && !(&lead % BigInt::from(p)).is_zero() {
            let reduced = f.reduce_mod(p);
            if reduced.len() == f.coeffs().len() {
                let monic = fp::monicize(&reduced, p);
                if fp::is_irreducible(&monic, p) {
                    return Ok(ScreenResult {
                        verdict: ScreenVerdict::CertifiedIrreducible(Some(p)),
                        content_divided,
                    });
                }
            }
        }
        p += 1;
    }
    Ok(ScreenResult {
        verdict: ScreenVerdict::Inconclusive,
        content_divided,
    })
}

/// Search for a linear factor `qx - r` from the rational-root theorem and
/// return it with the exact cofactor. Skipped (None) when the constant or
/// leading coefficient is too large to factor comfortably.
fn rational_root_factor(f: &IntPolynomial) -> Option<(IntPolynomial, IntPolynomial)> {
    let a0 = f.coeffs().first().unwrap();
    let lead = f.coeffs().last().unwrap();
    if a0.is_zero() {
        // Root 0: factor x out.
        let x = IntPolynomial::from_i64(&[0, 1]).unwrap();
        let quot = IntPolynomial::new(f.coeffs()[1..].to_vec()).ok()?;
        return Some((x, quot));
    }
    let a0u = a0.abs().to_u64()?;
    let leadu = lead.abs().to_u64()?;
    let mut rs = divisors(a0u);
    rs.sort_unstable();
    let qs = divisors(leadu);
    for &r in &rs {
        for &q in &qs {
            for sign in [1i64, -1] {
                let rq = BigInt::from(sign) * BigInt::from(r);
                // f(r/q) = 0 iff sum a_i r^i q^{d-i} = 0.
                let d = f.degree() as usize;
                let mut acc = BigInt::zero();
                let qb = BigInt::from(q);
                for (i, c) in f.coeffs().iter().enumerate() {
                    acc += c * rq.pow(i as u32) * qb.pow((d - i) as u32);
                }
                if acc.is_zero() {
                    if let Some(pair) = divide_by_linear(f, &rq, q) {
                        return Some(pair);
                    }
                }
            }
        }
    }
    None
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = vec![1];
    for (p, e) in primes::factorize(n) {
        let prev = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk = pk.saturating_mul(p);
            out.extend(prev.iter().map(|&d| d.saturating_mul(pk)));
        }
    }
    out
}

/// Exact division of primitive `f` by `qx - r` (Gauss: the quotient has
/// integer coefficients when r/q is a root in lowest terms).
fn divide_by_linear(
    f: &IntPolynomial,
    r: &BigInt,
    q: u64,
) -> Option<(IntPolynomial, IntPolynomial)> {
    let qb = BigInt::from(q);
    let d = f.degree() as usize;
    let mut b = vec![BigInt::zero(); d]; // quotient coefficients
                                         // a_d = q b_{d-1};   a_i = q b_{i-1} - r b_i  for 1 <= i < d.
    let (bd, rem) = f.coeffs()[d].div_rem(&qb);
    if !rem.is_zero() {
        return None;
    }
    b[d - 1] = bd;
    for i in (1..d).rev() {
        let num = &f.coeffs()[i] + r * &b[i];
        let (bi, rem) = num.div_rem(&qb);
        if !rem.is_zero() {
            return None;
        }
        b[i - 1] = bi;
    }
    let mut linear = IntPolynomial::new(vec![-r.clone(), qb]).ok()?;
    let mut quot = IntPolynomial { coeffs: b };
    // Canonical form demands positive leading coefficients; flip signs in
    // pairs if the division produced a negative-led factor.
    if !quot.coeffs.last().unwrap().is_positive() {
        quot = IntPolynomial::new(quot.coeffs.iter().map(|c| -c).collect()).ok()?;
        linear = IntPolynomial::new(linear.coeffs.iter().map(|c| -c).collect()).ok()?;
    }
    Some((linear, quot))
}

/// Admissibility state of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admissibility {
    Admissible,
    /// Inadmissible with the obstructing prime: `omega_f(p) = p`.
    FixedDivisor(u64),
    Unchecked,
}

/// An ordered family `f_1, ..., f_k` together with the product `f` and its
/// admissibility state.
#[derive(Debug, Clone)]
pub struct PolynomialFamily {
    members: Vec<IntPolynomial>,
    product: IntPolynomial,
    admissible: Admissibility,
}

impl PolynomialFamily {
    /// Build a family; members must be pairwise distinct in canonical form.
    /// Admissibility starts out unchecked.
    pub fn new(members: Vec<IntPolynomial>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Validation(
                "family must have at least one member".into(),
            ));
        }
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if members[i] == members[j] {
                    return Err(Error::Validation(format!(
                        "duplicate family member '{}'",
                        members[i]
                    )));
                }
            }
        }
        let mut product = members[0].clone();
        for m in &members[1..] {
            product = product.mul(m);
        }
        Ok(Self {
            members,
            product,
            admissible: Admissibility::Unchecked,
        })
    }

    /// Parse a comma-separated family, e.g. `"x,x+2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let members = s
            .split(',')
            .map(|t| t.parse())
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn members(&self) -> &[IntPolynomial] {
        &self.members
    }

    pub fn k(&self) -> u32 {
        self.members.len() as u32
    }

    /// `deg f = sum of member degrees`.
    pub fn product_degree(&self) -> u32 {
        self.product.degree()
    }

    /// Product of the member degrees; this is the divisor of the counting
    /// main term, since `prod_i log f_i(n) ~ (prod_i deg f_i) (log n)^k`.
    pub fn degree_product(&self) -> u64 {
        self.members.iter().map(|m| m.degree() as u64).product()
    }

    /// The product polynomial `f = f_1 ... f_k`.
    pub fn product(&self) -> &IntPolynomial {
        &self.product
    }

    pub fn admissibility(&self) -> Admissibility {
        self.admissible
    }

    pub fn is_admissible(&self) -> bool {
        self.admissible == Admissibility::Admissible
    }

    /// `omega_f(p)`: distinct roots of the product mod p.
    pub fn omega(&self, p: u64) -> Result<u64> {
        Ok(count_roots(&self.product, p)?.omega)
    }

    /// Decide admissibility by checking `omega_f(p) < p` for every prime
    /// `p <= max(deg f, largest prime dividing the content of f)`.
    ///
    /// This finite check suffices: for `p > deg f` not dividing every
    /// coefficient, `omega_f(p) <= deg f < p` automatically.
    pub fn check_admissibility(mut self) -> Result<Self> {
        let content = self.product.content();
        if !content.is_one() {
            // Every value of f is divisible by each prime factor of the
            // content, so the smallest one already obstructs.
            let p = smallest_prime_factor(&content)?;
            self.admissible = Admissibility::FixedDivisor(p);
            return Ok(self);
        }
        let deg = self.product.degree() as u64;
        let mut p = 2u64;
        while p <= deg {
            if is_prime_u64(p) {
                let omega = count_roots_bruteforce(&self.product, p)?.omega;
                if omega == p {
                    self.admissible = Admissibility::FixedDivisor(p);
                    return Ok(self);
                }
            }
            p += 1;
        }
        self.admissible = Admissibility::Admissible;
        Ok(self)
    }

    /// Comma-joined display form, used in reports and manifests.
    pub fn description(&self) -> String {
        self.members
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn smallest_prime_factor(n: &BigInt) -> Result<u64> {
    let nu = n
        .to_u64()
        .ok_or_else(|| Error::Validation(format!("coefficient content {n} too large to factor")))?;
    Ok(primes::factorize(nu)
        .first()
        .map(|&(p, _)| p)
        .expect("content > 1 has a prime factor"))
}
