//! Arithmetic in the extension field `F = GF(p^(m*t))` together with its
//! subfield `B = GF(p^m)` and the field trace `Tr_{F/B}`.
//!
//! A single representation is used throughout: every value is an element of
//! `F`, stored as its polynomial-basis coefficient vector over `GF(p)` packed
//! into a base-`p` integer code. `B` is the Frobenius-fixed subset
//! `{x : x^|B| = x}`, so sub-symbols need no second arithmetic layer.
//!
//! Elements are enumerated in the canonical order `0, 1, g, g^2, ...,
//! g^(n-2)` for the primitive generator `g`; golden tables and all
//! deterministic basis choices rely on this order.

use crate::error::{Error, Result};

/// Default cap on the field order; keeps exhaustive sweeps at desk scale.
pub const DEFAULT_MAX_FIELD: u64 = 1 << 20;

/// Hard ceiling for cap overrides (the log/antilog tables are dense).
const ABSOLUTE_MAX_FIELD: u64 = 1 << 26;

/// An element of `F`, stored as its coefficient vector over `GF(p)` packed
/// into a base-`p` integer. Code `0` is the zero element and code `1` is the
/// multiplicative identity regardless of `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fel(pub u32);

impl Fel {
    pub const ZERO: Fel = Fel(0);
    pub const ONE: Fel = Fel(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A sub-symbol: an element of `F` lying in the subfield `B`.
pub type Bel = Fel;

/// The pair `(F, B)` with `F = GF(p^(m*t))`, `B = GF(p^m)`, and the data
/// needed for fast arithmetic: the defining polynomial, log/antilog tables
/// for the primitive generator, and a precomputed solver for coordinates of
/// `F` over `B` relative to the power basis `{1, g, ..., g^(t-1)}`.
pub struct FieldTower {
    p: u32,
    m: u32,
    t: u32,
    deg: u32,
    order: u64,
    b_order: u64,
    defining_poly: Vec<u32>,
    /// `exp[i]` is the code of `g^i`, `i` in `0..order-1`.
    exp: Vec<Fel>,
    /// `log[code]` is the exponent of the element; `log[0]` is a sentinel.
    log: Vec<u32>,
    /// `|B|^i mod (order-1)` for `i` in `0..t`.
    frob: Vec<u64>,
    /// Power basis `{1, g, ..., g^(t-1)}` of `F` over `B`.
    power_basis: Vec<Fel>,
    /// `GF(p)`-basis of `B`: powers of the subfield generator.
    b_basis_gfp: Vec<Fel>,
    /// Inverse of the `GF(p)`-matrix whose columns are the digit vectors of
    /// `g^i * zeta^j`; maps digits of `x` to its `(i,j)`-coordinates.
    coord_inv: Vec<Vec<u32>>,
}

impl std::fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldTower(p={}, m={}, t={})", self.p, self.m, self.t)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn checked_pow(base: u64, exp: u32, cap: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

impl FieldTower {
    /// Builds the tower `F = GF(p^(m*t))` over `B = GF(p^m)` with the default
    /// size cap.
    pub fn new(p: u64, m: u32, t: u32) -> Result<FieldTower> {
        Self::with_cap(p, m, t, DEFAULT_MAX_FIELD)
    }

    /// Same as [`FieldTower::new`] with an explicit cap on `|F|`.
    pub fn with_cap(p: u64, m: u32, t: u32, cap: u64) -> Result<FieldTower> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if m == 0 || t == 0 {
            return Err(Error::DegenerateInput("m and t must be at least 1"));
        }
        let cap = cap.min(ABSOLUTE_MAX_FIELD);
        let deg = m
            .checked_mul(t)
            .ok_or(Error::SizeCap { order: u64::MAX, cap })?;
        let order = checked_pow(p, deg, cap).ok_or(Error::SizeCap { order: u64::MAX, cap })?;
        if order > cap {
            return Err(Error::SizeCap { order, cap });
        }
        let p = p as u32;

        let (defining_poly, gen_code) = canonical_polynomial(p, deg, order)?;
        let (exp, log) = build_log_tables(p, deg, order, &defining_poly, gen_code)?;

        let b_order = checked_pow(p as u64, m, cap).expect("subfield order below cap");
        let mut frob = Vec::with_capacity(t as usize);
        let modulus = order - 1;
        let mut f = 1u64;
        for _ in 0..t {
            frob.push(f);
            f = if modulus > 0 { f * b_order % modulus.max(1) } else { 0 };
        }

        let mut tower = FieldTower {
            p,
            m,
            t,
            deg,
            order,
            b_order,
            defining_poly,
            exp,
            log,
            frob,
            power_basis: Vec::new(),
            b_basis_gfp: Vec::new(),
            coord_inv: Vec::new(),
        };
        tower.init_coordinate_solver()?;
        Ok(tower)
    }

    fn init_coordinate_solver(&mut self) -> Result<()> {
        let gen = self.generator();
        let mut power_basis = Vec::with_capacity(self.t as usize);
        let mut acc = Fel::ONE;
        for _ in 0..self.t {
            power_basis.push(acc);
            acc = self.mul(acc, gen);
        }

        // Subfield generator: g^((n-1)/(|B|-1)), of multiplicative order |B|-1.
        let zeta = if self.order == 2 {
            Fel::ONE
        } else {
            let e = (self.order - 1) / (self.b_order - 1);
            self.exp[(e % (self.order - 1)) as usize]
        };
        let mut b_basis_gfp = Vec::with_capacity(self.m as usize);
        let mut acc = Fel::ONE;
        for _ in 0..self.m {
            b_basis_gfp.push(acc);
            acc = self.mul(acc, zeta);
        }

        // Column (i*m + j) holds the GF(p)-digits of g^i * zeta^j.
        let d = self.deg as usize;
        let mut mat = vec![vec![0u32; d]; d];
        for (i, &bi) in power_basis.iter().enumerate() {
            for (j, &zj) in b_basis_gfp.iter().enumerate() {
                let digits = self.unpack(self.mul(bi, zj));
                let col = i * self.m as usize + j;
                for (row, &dg) in digits.iter().enumerate() {
                    mat[row][col] = dg;
                }
            }
        }
        let inv = gfp_invert(self.p, &mat)
            .ok_or(Error::Internal("product basis of F over GF(p) is singular"))?;

        self.power_basis = power_basis;
        self.b_basis_gfp = b_basis_gfp;
        self.coord_inv = inv;
        Ok(())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// `|F| = p^(m*t)`; equals the code length `n` when `F` is the alphabet.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// `|B| = p^m`.
    pub fn subfield_order(&self) -> u64 {
        self.b_order
    }

    /// Monic irreducible defining polynomial, coefficients ascending over `GF(p)`.
    pub fn defining_poly(&self) -> &[u32] {
        &self.defining_poly
    }

    /// The designated primitive element of `F`.
    pub fn generator(&self) -> Fel {
        self.exp[if self.order == 2 { 0 } else { 1 }]
    }

    /// Power basis `{1, g, ..., g^(t-1)}` of `F` over `B` — the fixed basis
    /// behind all canonical coordinate computations.
    pub fn power_basis(&self) -> &[Fel] {
        &self.power_basis
    }

    /// True when the extension degree `t` is divisible by the characteristic.
    pub fn char_divides_t(&self) -> bool {
        self.t.is_multiple_of(self.p)
    }

    fn unpack(&self, a: Fel) -> Vec<u32> {
        let mut digits = vec![0u32; self.deg as usize];
        let mut code = a.0;
        for d in digits.iter_mut() {
            *d = code % self.p;
            code /= self.p;
        }
        debug_assert_eq!(code, 0);
        digits
    }

    fn pack(&self, digits: &[u32]) -> Fel {
        let mut code = 0u32;
        for &d in digits.iter().rev() {
            code = code * self.p + d;
        }
        Fel(code)
    }

    /// Coefficient vector of `a` over `GF(p)` (length `m*t`, ascending).
    pub fn coeffs(&self, a: Fel) -> Vec<u32> {
        self.unpack(a)
    }

    /// Builds an element from its `GF(p)` coefficient vector.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fel> {
        if coeffs.len() != self.deg as usize {
            return Err(Error::ShapeError("coefficient vector length must be m*t"));
        }
        if coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::DegenerateInput("coefficient outside GF(p)"));
        }
        Ok(self.pack(coeffs))
    }

    pub fn add(&self, a: Fel, b: Fel) -> Fel {
        if self.p == 2 {
            return Fel(a.0 ^ b.0);
        }
        let (mut out, mut scale, mut x, mut y) = (0u32, 1u32, a.0, b.0);
        while x != 0 || y != 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * scale;
            x /= self.p;
            y /= self.p;
            scale *= self.p;
        }
        Fel(out)
    }

    pub fn neg(&self, a: Fel) -> Fel {
        if self.p == 2 {
            return a;
        }
        let (mut out, mut scale, mut x) = (0u32, 1u32, a.0);
        while x != 0 {
            let d = (self.p - x % self.p) % self.p;
            out += d * scale;
            x /= self.p;
            scale *= self.p;
        }
        Fel(out)
    }

    pub fn sub(&self, a: Fel, b: Fel) -> Fel {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fel, b: Fel) -> Fel {
        if a.is_zero() || b.is_zero() {
            return Fel::ZERO;
        }
        let n1 = (self.order - 1) as u32;
        if n1 == 0 {
            return Fel::ONE; // GF(2): the only nonzero product
        }
        let e = (self.log[a.0 as usize] + self.log[b.0 as usize]) % n1;
        self.exp[e as usize]
    }

    pub fn inv(&self, a: Fel) -> Result<Fel> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n1 = (self.order - 1) as u32;
        if n1 == 0 {
            return Ok(Fel::ONE);
        }
        let e = (n1 - self.log[a.0 as usize]) % n1;
        Ok(self.exp[e as usize])
    }

    pub fn div(&self, a: Fel, b: Fel) -> Result<Fel> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fel, e: u64) -> Fel {
        if a.is_zero() {
            return if e == 0 { Fel::ONE } else { Fel::ZERO };
        }
        let n1 = self.order - 1;
        if n1 == 0 {
            return Fel::ONE;
        }
        let e = (self.log[a.0 as usize] as u64 * (e % n1)) % n1;
        self.exp[e as usize]
    }

    /// The field trace `Tr_{F/B}(a) = sum_{i=0}^{t-1} a^(|B|^i)`, always a
    /// sub-symbol in `B`.
    pub fn trace(&self, a: Fel) -> Bel {
        if a.is_zero() {
            return Fel::ZERO;
        }
        let n1 = self.order - 1;
        if n1 == 0 {
            // F = GF(2): the trace of 1 is t mod 2.
            return if self.t % 2 == 1 { Fel::ONE } else { Fel::ZERO };
        }
        let e = self.log[a.0 as usize] as u64;
        let mut acc = Fel::ZERO;
        for &f in &self.frob {
            acc = self.add(acc, self.exp[(e * f % n1) as usize]);
        }
        acc
    }

    /// Tests membership in `B` via the Frobenius fix `x^|B| = x`.
    pub fn is_subfield_element(&self, a: Fel) -> bool {
        self.pow(a, self.b_order) == a
    }

    /// Canonical enumeration `0, 1, g, g^2, ..., g^(n-2)`.
    pub fn elements(&self) -> impl Iterator<Item = Fel> + '_ {
        std::iter::once(Fel::ZERO).chain(self.exp.iter().copied())
    }

    /// Element at position `i` of the canonical enumeration.
    pub fn element_at(&self, i: usize) -> Fel {
        if i == 0 {
            Fel::ZERO
        } else {
            self.exp[i - 1]
        }
    }

    /// Position of `a` in the canonical enumeration.
    pub fn index_of(&self, a: Fel) -> usize {
        if a.is_zero() {
            0
        } else {
            self.log[a.0 as usize] as usize + 1
        }
    }

    /// Subfield elements in canonical enumeration order (`|B|` of them).
    pub fn subfield_elements(&self) -> Vec<Fel> {
        self.elements().filter(|&a| self.is_subfield_element(a)).collect()
    }

    /// Coordinates of `a` over `B` relative to the power basis; length `t`,
    /// entries lie in `B`.
    pub fn subfield_coords(&self, a: Fel) -> Vec<Bel> {
        let digits = self.unpack(a);
        let lambda = gfp_mat_vec(self.p, &self.coord_inv, &digits);
        let m = self.m as usize;
        (0..self.t as usize)
            .map(|i| {
                let mut c = Fel::ZERO;
                for (j, &bj) in self.b_basis_gfp.iter().enumerate() {
                    let scalar = Fel(lambda[i * m + j]); // GF(p) digit as a field element
                    c = self.add(c, self.mul(scalar, bj));
                }
                c
            })
            .collect()
    }

    /// Inverse of [`FieldTower::subfield_coords`].
    pub fn from_subfield_coords(&self, coords: &[Bel]) -> Result<Fel> {
        if coords.len() != self.t as usize {
            return Err(Error::ShapeError("coordinate vector length must be t"));
        }
        let mut acc = Fel::ZERO;
        for (c, b) in coords.iter().zip(&self.power_basis) {
            acc = self.add(acc, self.mul(*c, *b));
        }
        Ok(acc)
    }

    /// Renders an element in the textual notation: `0`, `1`, or `x^k`.
    pub fn format(&self, a: Fel) -> String {
        if a.is_zero() {
            "0".to_string()
        } else {
            let e = if self.order == 2 { 0 } else { self.log[a.0 as usize] };
            if e == 0 {
                "1".to_string()
            } else {
                format!("x^{e}")
            }
        }
    }

    /// Parses `0`, `1`, `x`, `x^k`, or the coefficient form `[c0,c1,...]`.
    pub fn parse(&self, s: &str) -> Result<Fel> {
        let s = s.trim();
        match s {
            "0" => return Ok(Fel::ZERO),
            "1" => return Ok(Fel::ONE),
            "x" => return Ok(self.generator()),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("x^") {
            let e: u64 = rest
                .parse()
                .map_err(|_| Error::DegenerateInput("malformed exponent in element notation"))?;
            return Ok(self.pow(self.generator(), e));
        }
        if let Some(body) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let coeffs: std::result::Result<Vec<u32>, _> =
                body.split(',').map(|c| c.trim().parse::<u32>()).collect();
            let coeffs =
                coeffs.map_err(|_| Error::DegenerateInput("malformed coefficient vector"))?;
            return self.from_coeffs(&coeffs);
        }
        Err(Error::DegenerateInput("unrecognized element notation"))
    }
}

/// Finds the canonical defining polynomial: the first monic primitive
/// polynomial of the given degree in ascending packed-coefficient order.
/// For `GF(4)` and `GF(16)` this yields `x^2+x+1` and `x^4+x+1`.
/// Returns the polynomial and the code of the generator (a root of it).
fn canonical_polynomial(p: u32, deg: u32, order: u64) -> Result<(Vec<u32>, u32)> {
    if deg == 1 {
        // F = GF(p): pick the smallest primitive root.
        let g = (1..p as u64)
            .find(|&g| gfp_order(g, p as u64) == p as u64 - 1)
            .ok_or(Error::Internal("prime field has no primitive root"))?;
        let poly = vec![(p as u64 - g) as u32 % p, 1]; // x - g
        return Ok((poly, g as u32));
    }

    let prime_divisors_of_deg = prime_divisors(deg as u64);
    let prime_divisors_of_order = prime_divisors(order - 1);

    let lower_count = checked_pow(p as u64, deg, u64::MAX).expect("within cap");
    debug_assert_eq!(lower_count, order);
    for lower in 0..order {
        let mut poly = vec![0u32; deg as usize + 1];
        let mut code = lower;
        for c in poly.iter_mut().take(deg as usize) {
            *c = (code % p as u64) as u32;
            code /= p as u64;
        }
        poly[deg as usize] = 1;
        if poly[0] == 0 {
            continue; // x divides the candidate
        }
        if !poly_is_irreducible(p, &poly, &prime_divisors_of_deg) {
            continue;
        }
        if !poly_root_is_primitive(p, &poly, order, &prime_divisors_of_order) {
            continue;
        }
        // The generator is x itself.
        return Ok((poly, p));
    }
    Err(Error::Internal("no primitive polynomial found"))
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn gfp_order(g: u64, p: u64) -> u64 {
    let mut acc = g;
    let mut k = 1;
    while acc != 1 {
        acc = acc * g % p;
        k += 1;
    }
    k
}

// --- dense polynomial arithmetic over GF(p), used only during construction ---

fn poly_mul_mod(p: u32, a: &[u32], b: &[u32], modulus: &[u32]) -> Vec<u32> {
    let deg = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai as u64 * bj as u64) % p as u64;
        }
    }
    // Reduce by the monic modulus.
    for i in (deg..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (k, &mk) in modulus.iter().enumerate().take(deg) {
            let idx = i - deg + k;
            prod[idx] = (prod[idx] + (p as u64 - mk as u64) * c) % p as u64;
        }
    }
    prod.truncate(deg);
    prod.resize(deg, 0);
    prod.iter().map(|&c| c as u32).collect()
}

fn poly_pow_mod(p: u32, base: &[u32], mut e: u64, modulus: &[u32]) -> Vec<u32> {
    let deg = modulus.len() - 1;
    let mut result = vec![0u32; deg];
    result[0] = 1;
    let mut acc = base.to_vec();
    acc.resize(deg, 0);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mul_mod(p, &result, &acc, modulus);
        }
        acc = poly_mul_mod(p, &acc, &acc, modulus);
        e >>= 1;
    }
    result
}

fn poly_gcd(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    let norm = |v: &[u32]| {
        let mut v = v.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let mut a = norm(a);
    let mut b = norm(b);
    while !b.is_empty() {
        // a mod b
        let lead_inv = gfp_inv(p, b[b.len() - 1]);
        while a.len() >= b.len() && !a.is_empty() {
            let shift = a.len() - b.len();
            let factor = a[a.len() - 1] as u64 * lead_inv as u64 % p as u64;
            for (k, &bk) in b.iter().enumerate() {
                let idx = shift + k;
                a[idx] =
                    ((a[idx] as u64 + (p as u64 - bk as u64) * factor % p as u64) % p as u64) as u32;
            }
            a = norm(&a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn poly_is_irreducible(p: u32, poly: &[u32], deg_prime_divisors: &[u64]) -> bool {
    let deg = (poly.len() - 1) as u32;
    let x = {
        let mut v = vec![0u32; deg as usize];
        if deg >= 2 {
            v[1] = 1;
        } else {
            v[0] = 0;
        }
        v
    };
    // Frobenius criterion: x^(p^deg) == x mod poly, and for each prime l | deg
    // the polynomial x^(p^(deg/l)) - x is coprime to poly.
    let q_deg = match checked_pow(p as u64, deg, u64::MAX / 2) {
        Some(v) => v,
        None => return false,
    };
    let frob_full = poly_pow_mod(p, &x, q_deg, poly);
    if frob_full != x {
        return false;
    }
    for &l in deg_prime_divisors {
        let sub = deg as u64 / l;
        let q_sub = checked_pow(p as u64, sub as u32, u64::MAX / 2).expect("below full power");
        let mut diff = poly_pow_mod(p, &x, q_sub, poly);
        // diff -= x
        if diff.len() >= 2 {
            diff[1] = (diff[1] + p - 1) % p;
        }
        let g = poly_gcd(p, &diff, poly);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn poly_root_is_primitive(p: u32, poly: &[u32], order: u64, order_prime_divisors: &[u64]) -> bool {
    let deg = poly.len() - 1;
    let x = {
        let mut v = vec![0u32; deg];
        v[1] = 1;
        v
    };
    let one = {
        let mut v = vec![0u32; deg];
        v[0] = 1;
        v
    };
    for &l in order_prime_divisors {
        if poly_pow_mod(p, &x, (order - 1) / l, poly) == one {
            return false;
        }
    }
    true
}

/// Builds the antilog/log tables by iterating multiplication by the
/// generator in the coefficient domain. Verifies that the generator's
/// multiplicative order is exactly `order - 1`.
fn build_log_tables(
    p: u32,
    deg: u32,
    order: u64,
    poly: &[u32],
    gen_code: u32,
) -> Result<(Vec<Fel>, Vec<u32>)> {
    let n1 = (order - 1) as usize;
    let mut exp = Vec::with_capacity(n1.max(1));
    let mut log = vec![u32::MAX; order as usize];

    if n1 == 0 {
        // GF(2)
        exp.push(Fel::ONE);
        log[1] = 0;
        return Ok((exp, log));
    }

    let mut digits = vec![0u32; deg as usize];
    digits[0] = 1;
    let pack = |digits: &[u32]| {
        let mut code = 0u32;
        for &d in digits.iter().rev() {
            code = code * p + d;
        }
        code
    };

    for i in 0..n1 {
        let code = pack(&digits);
        if code == 1 && i > 0 {
            return Err(Error::Internal("generator order is below |F| - 1"));
        }
        exp.push(Fel(code));
        log[code as usize] = i as u32;
        if deg == 1 {
            digits[0] = (digits[0] as u64 * gen_code as u64 % p as u64) as u32;
        } else {
            // Multiply by x and reduce by the monic defining polynomial.
            let carry = digits[deg as usize - 1];
            for k in (1..deg as usize).rev() {
                digits[k] = digits[k - 1];
            }
            digits[0] = 0;
            if carry != 0 {
                for (k, &ck) in poly.iter().enumerate().take(deg as usize) {
                    digits[k] =
                        ((digits[k] as u64 + (p as u64 - ck as u64) * carry as u64) % p as u64)
                            as u32;
                }
            }
        }
    }
    let closes = pack(&digits);
    if closes != 1 {
        return Err(Error::Internal("generator powers do not cycle back to 1"));
    }
    Ok((exp, log))
}

// --- tiny GF(p) matrix helpers for the coordinate solver ---

fn gfp_inv(p: u32, a: u32) -> u32 {
    // Fermat: a^(p-2) mod p.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

#[allow(clippy::needless_range_loop)] // elimination reads one row while writing another
fn gfp_invert(p: u32, mat: &[Vec<u32>]) -> Option<Vec<Vec<u32>>> {
    let n = mat.len();
    let mut work: Vec<Vec<u32>> = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| work[r][col] != 0)?;
        work.swap(col, pivot);
        let inv = gfp_inv(p, work[col][col]);
        for v in work[col].iter_mut() {
            *v = (*v as u64 * inv as u64 % p as u64) as u32;
        }
        for r in 0..n {
            if r != col && work[r][col] != 0 {
                let factor = work[r][col] as u64;
                for c in 0..2 * n {
                    let sub = (p as u64 - work[col][c] as u64) * factor % p as u64;
                    work[r][c] = ((work[r][c] as u64 + sub) % p as u64) as u32;
                }
            }
        }
    }
    Some(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

fn gfp_mat_vec(p: u32, mat: &[Vec<u32>], v: &[u32]) -> Vec<u32> {
    mat.iter()
        .map(|row| {
            let mut acc = 0u64;
            for (a, b) in row.iter().zip(v) {
                acc = (acc + *a as u64 * *b as u64) % p as u64;
            }
            acc as u32
        })
        .collect()
}
