//! `O_K / π^L` for `O_K = O_F[x]/(E)` and `O_F = Z_p[y]/(u)`.
//!
//! An element is `Σ_{i<e} a_i(y)·x^i`; coordinate `i·f + a` holds the
//! coefficient of `x^i y^a`, reduced modulo `p^{c_i}` with
//! `c_i = ceil((L - i)/e)`. For `L = N = ke + 1` this keeps `a_0` modulo
//! `p^{k+1}` and the others modulo `p^k`.

use crate::error::{Error, Result};
use crate::padic::spec::FieldSpec;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueElem(pub(crate) Vec<u64>);

impl ResidueElem {
    /// Canonical coordinates, `x^i y^a` at position `i·f + a`.
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Debug, Clone)]
pub struct ResidueRing {
    p: u64,
    f: usize,
    e: usize,
    len: u32,
    guard: u64,
    /// `p^{c_i}` for each power of `x`.
    block_mod: Vec<u64>,
    block_exp: Vec<u32>,
    u_low: Vec<u64>,
    e_low: Vec<Vec<u64>>,
    size: u128,
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl ResidueRing {
    /// The ring `O_K / π^len`. Arithmetic runs modulo `p^guard_exp`,
    /// by default one more than the largest coordinate exponent.
    pub fn new(spec: &FieldSpec, len: u32, guard_exp: Option<u32>) -> Result<ResidueRing> {
        let (p, f, e) = (spec.p, spec.f(), spec.e());
        let block_exp: Vec<u32> = (0..e as u32).map(|i| (len.saturating_sub(i)).div_ceil(e as u32)).collect();
        let top = block_exp[0];
        let g = guard_exp.unwrap_or(top + 1);
        if g < top.max(1) {
            return Err(Error::InvalidSpec(format!("guard precision p^{g} is below p^{top}")));
        }
        let guard = p
            .checked_pow(g)
            .filter(|m| *m < 1 << 62)
            .ok_or_else(|| Error::InvalidSpec(format!("guard precision p^{g} overflows")))?;
        let block_mod: Vec<u64> = block_exp.iter().map(|&c| p.pow(c)).collect();
        let red = |c: i64| c.rem_euclid(guard as i64) as u64;
        let size = (spec.q() as u128)
            .checked_pow(len)
            .ok_or_else(|| Error::cap("ring elements", u128::MAX, u128::MAX))?;
        Ok(ResidueRing {
            p,
            f,
            e,
            len,
            guard,
            block_mod,
            block_exp,
            u_low: spec.u[..f].iter().map(|&c| red(c)).collect(),
            e_low: spec.e_poly[..e].iter().map(|c| c.iter().map(|&a| red(a)).collect()).collect(),
            size,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn e(&self) -> usize {
        self.e
    }

    /// Truncation length `L`: the ring is `O_K / π^L`.
    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.size == 1
    }

    pub fn size(&self) -> u128 {
        self.size
    }

    pub fn block_exponents(&self) -> &[u32] {
        &self.block_exp
    }

    fn coord_mod(&self, j: usize) -> u64 {
        self.block_mod[j / self.f]
    }

    fn canonical(&self, mut raw: Vec<u64>) -> ResidueElem {
        for (j, c) in raw.iter_mut().enumerate() {
            *c %= self.coord_mod(j);
        }
        ResidueElem(raw)
    }

    /// Element from raw coordinates (reduced into canonical range).
    pub fn from_coords(&self, coords: &[i64]) -> ResidueElem {
        let mut raw = vec![0u64; self.e * self.f];
        for (j, &c) in coords.iter().enumerate().take(raw.len()) {
            raw[j] = c.rem_euclid(self.coord_mod(j) as i64) as u64;
        }
        ResidueElem(raw)
    }

    pub fn zero(&self) -> ResidueElem {
        ResidueElem(vec![0; self.e * self.f])
    }

    pub fn from_int(&self, n: i64) -> ResidueElem {
        let mut c = vec![0i64; self.e * self.f];
        c[0] = n;
        self.from_coords(&c)
    }

    pub fn one(&self) -> ResidueElem {
        self.from_int(1)
    }

    pub fn is_zero(&self, a: &ResidueElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    /// The uniformizer: the class of `x`, which is `-E_0` when `e = 1`.
    pub fn pi(&self) -> ResidueElem {
        let mut raw = vec![0u64; self.e * self.f + self.f];
        raw[self.f] = 1;
        self.canonical(self.reduce_x(raw))
    }

    /// Reduces a polynomial in `x` (blocks of `f` coefficients modulo the
    /// guard) by `x^e = -Σ E_i x^i`.
    fn reduce_x(&self, mut raw: Vec<u64>) -> Vec<u64> {
        let (e, f, m) = (self.e, self.f, self.guard);
        let mut deg = raw.len() / f;
        while deg > e {
            deg -= 1;
            let top: Vec<u64> = raw[deg * f..(deg + 1) * f].to_vec();
            raw.truncate(deg * f);
            if top.iter().all(|&c| c == 0) {
                continue;
            }
            for (i, ei) in self.e_low.iter().enumerate() {
                let prod = self.of_mul(&top, ei);
                let base = (deg - e + i) * f;
                for a in 0..f {
                    raw[base + a] = (raw[base + a] + m - prod[a]) % m;
                }
            }
        }
        raw
    }

    /// Product in `O_F` modulo the guard.
    fn of_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (f, m) = (self.f, self.guard);
        let mut prod = vec![0u64; 2 * f - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mulmod(x, y, m)) % m;
            }
        }
        for d in (f..2 * f - 1).rev() {
            let lead = prod[d];
            if lead == 0 {
                continue;
            }
            for (j, &uj) in self.u_low.iter().enumerate() {
                let idx = d - f + j;
                prod[idx] = (prod[idx] + m - mulmod(lead, uj, m)) % m;
            }
        }
        prod.truncate(f);
        prod
    }

    pub fn add(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        ResidueElem(
            a.0.iter()
                .zip(&b.0)
                .enumerate()
                .map(|(j, (x, y))| (x + y) % self.coord_mod(j))
                .collect(),
        )
    }

    pub fn neg(&self, a: &ResidueElem) -> ResidueElem {
        ResidueElem(
            a.0.iter()
                .enumerate()
                .map(|(j, &x)| {
                    let m = self.coord_mod(j);
                    (m - x % m) % m
                })
                .collect(),
        )
    }

    pub fn sub(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        let (e, f, m) = (self.e, self.f, self.guard);
        let mut raw = vec![0u64; (2 * e - 1) * f];
        for i in 0..e {
            let ai = &a.0[i * f..(i + 1) * f];
            if ai.iter().all(|&c| c == 0) {
                continue;
            }
            for j in 0..e {
                let bj = &b.0[j * f..(j + 1) * f];
                if bj.iter().all(|&c| c == 0) {
                    continue;
                }
                let prod = self.of_mul(ai, bj);
                for c in 0..f {
                    let idx = (i + j) * f + c;
                    raw[idx] = (raw[idx] + prod[c]) % m;
                }
            }
        }
        self.canonical(self.reduce_x(raw))
    }

    pub fn pow(&self, a: &ResidueElem, mut n: u64) -> ResidueElem {
        let (mut acc, mut base) = (self.one(), a.clone());
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// Normalized valuation `min_i (e·v_p(a_i) + i)`; `None` for zero (`v >= L`).
    pub fn valuation(&self, a: &ResidueElem) -> Option<u32> {
        let mut best: Option<u32> = None;
        for (j, &c) in a.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut vp = 0u32;
            let mut x = c;
            while x % self.p == 0 {
                x /= self.p;
                vp += 1;
            }
            let v = self.e as u32 * vp + (j / self.f) as u32;
            best = Some(best.map_or(v, |b| b.min(v)));
        }
        best
    }

    pub fn is_unit(&self, a: &ResidueElem) -> bool {
        a.0[..self.f].iter().any(|&c| c % self.p != 0)
    }

    /// Position in the little-endian mixed-radix enumeration.
    pub fn index_of(&self, a: &ResidueElem) -> usize {
        let mut idx = 0usize;
        for j in (0..a.0.len()).rev() {
            idx = idx * self.coord_mod(j) as usize + a.0[j] as usize;
        }
        idx
    }

    pub fn element_at(&self, mut index: usize) -> ResidueElem {
        let mut raw = vec![0u64; self.e * self.f];
        for (j, slot) in raw.iter_mut().enumerate() {
            let m = self.coord_mod(j) as usize;
            *slot = (index % m) as u64;
            index /= m;
        }
        ResidueElem(raw)
    }

    /// Image in `target`, a ring of the same spec with shorter truncation.
    pub fn reduce(&self, a: &ResidueElem, target: &ResidueRing) -> ResidueElem {
        debug_assert!(target.len <= self.len);
        target.canonical(a.0.clone())
    }

    /// A lift of `a` from a ring of shorter truncation (same coordinates).
    pub fn lift(&self, a: &ResidueElem) -> ResidueElem {
        self.canonical(a.0.clone())
    }

    /// The block of `f` coordinates multiplying `x^i`.
    pub fn block<'a>(&self, a: &'a ResidueElem, i: usize) -> &'a [u64] {
        &a.0[i * self.f..(i + 1) * self.f]
    }

    /// Residue of `E_0 / p` as `f` coordinates modulo `p`.
    pub(crate) fn e0_over_p(&self) -> Vec<u64> {
        self.e_low[0].iter().map(|&c| (c / self.p) % self.p).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(json: &str) -> FieldSpec {
        FieldSpec::parse_json(json, u128::MAX).unwrap()
    }

    #[test]
    fn z_mod_9() {
        let s = spec(r#"{"p":3,"u":[0,1],"E":[-3,1],"k":1}"#);
        let r = ResidueRing::new(&s, s.big_n(), None).unwrap();
        assert_eq!(r.size(), 9);
        let five = r.from_int(5);
        assert_eq!(r.mul(&five, &five), r.from_int(7));
        assert_eq!(r.pi(), r.from_int(3));
        assert_eq!(r.valuation(&r.from_int(3)), Some(1));
        assert_eq!(r.valuation(&r.from_int(9)), None);
        assert_eq!(r.valuation(&r.from_int(2)), Some(0));
        for i in 0..9 {
            assert_eq!(r.index_of(&r.element_at(i)), i);
        }
    }

    #[test]
    fn ramified_quadratic() {
        // x^2 = 2, N = 3: coordinates a_0 mod 4, a_1 mod 2
        let s = spec(r#"{"p":2,"u":[0,1],"E":[-2,0,1],"k":1}"#);
        let r = ResidueRing::new(&s, s.big_n(), None).unwrap();
        assert_eq!(r.size(), 8);
        assert_eq!(r.block_exponents(), &[2, 1]);
        let x = r.pi();
        assert_eq!(r.mul(&x, &x), r.from_int(2));
        assert_eq!(r.valuation(&r.from_int(2)), Some(2));
        assert_eq!(r.valuation(&x), Some(1));
        assert!(r.is_zero(&r.pow(&x, 3)));
    }

    #[test]
    fn field_with_four_elements() {
        let s = spec(r#"{"p":2,"u":[1,1,1],"E":[-2,1],"k":0}"#);
        let r = ResidueRing::new(&s, s.big_n(), None).unwrap();
        assert_eq!(r.size(), 4);
        let y = r.from_coords(&[0, 1]);
        // y^2 = y + 1 over F_2
        assert_eq!(r.mul(&y, &y), r.from_coords(&[1, 1]));
        for i in 1..4 {
            assert_eq!(r.pow(&r.element_at(i), 3), r.one());
        }
    }
}
