//! Teichmüller representatives and π-adic digit expansions.

use crate::error::{Error, Result};
use crate::padic::ring::{ResidueElem, ResidueRing};
use crate::padic::spec::FieldSpec;

/// A digit is `None` for zero or `Some(i)` for `μ^i`.
pub type Digit = Option<u32>;

#[derive(Debug, Clone)]
pub struct Digits {
    /// The residue field, `O_K / π`.
    pub field: ResidueRing,
    q: u64,
    /// `μ^i` in the ring, `0 <= i < q - 1`.
    teich: Vec<ResidueElem>,
    /// Residue field index to discrete log base `μ̄`.
    log: Vec<Option<u32>>,
    /// `π^j` for `j < L`.
    pi_pow: Vec<ResidueElem>,
    /// `(-w̄)^{-s}` where `E_0 = p·w`, for `s < ceil(L/e)`.
    p_correction: Vec<ResidueElem>,
}

/// Teichmüller lift of the residue `r` in `ring`: the fixpoint of `t ↦ t^q`
/// starting from the naive lift.
pub fn teichmuller(ring: &ResidueRing, field: &ResidueRing, r: &ResidueElem) -> Result<ResidueElem> {
    let q = field.size() as u64;
    let mut t = ring.lift(r);
    let cap = 4 * ring.len().max(1);
    for _ in 0..cap {
        let next = ring.pow(&t, q);
        if next == t {
            return Ok(t);
        }
        t = next;
    }
    Err(Error::NonConvergence(format!("Teichmüller iteration did not settle within {cap} steps")))
}

impl Digits {
    pub fn new(spec: &FieldSpec, ring: &ResidueRing) -> Result<Digits> {
        let field = ResidueRing::new(spec, 1, None)?;
        let q = field.size() as u64;
        let mut generator = None;
        'search: for idx in 1..q as usize {
            let g = field.element_at(idx);
            let mut x = g.clone();
            for _ in 1..q - 1 {
                if x == field.one() {
                    continue 'search;
                }
                x = field.mul(&x, &g);
            }
            generator = Some(g);
            break;
        }
        let gen = generator.ok_or_else(|| Error::InvalidSpec("residue field has no generator".into()))?;
        let mu = teichmuller(ring, &field, &gen)?;
        let mut teich = Vec::with_capacity(q as usize - 1);
        let mut log = vec![None; q as usize];
        let (mut t, mut r) = (ring.one(), field.one());
        for i in 0..q - 1 {
            log[field.index_of(&r)] = Some(i as u32);
            teich.push(t.clone());
            t = ring.mul(&t, &mu);
            r = field.mul(&r, &gen);
        }
        let pi = ring.pi();
        let mut pi_pow = vec![ring.one()];
        for _ in 1..ring.len() {
            pi_pow.push(ring.mul(pi_pow.last().expect("non-empty"), &pi));
        }
        let w = field.from_coords(&ring.e0_over_p().iter().map(|&c| c as i64).collect::<Vec<_>>());
        let minus_w = field.neg(&w);
        let inv = field.pow(&minus_w, q - 2);
        let steps = ring.len().div_ceil(ring.e() as u32) as usize;
        let mut p_correction = vec![field.one()];
        for _ in 1..steps.max(1) {
            p_correction.push(field.mul(p_correction.last().expect("non-empty"), &inv));
        }
        Ok(Digits {
            field,
            q,
            teich,
            log,
            pi_pow,
            p_correction,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `μ`, the Teichmüller lift of the chosen generator of `F_q^*`.
    pub fn mu(&self) -> &ResidueElem {
        &self.teich[1 % self.teich.len()]
    }

    pub fn teichmuller_powers(&self) -> &[ResidueElem] {
        &self.teich
    }

    pub fn pi_powers(&self) -> &[ResidueElem] {
        &self.pi_pow
    }

    /// Residue of `z / π^j`, assuming `v(z) >= j`.
    fn leading_residue(&self, ring: &ResidueRing, z: &ResidueElem, j: u32) -> ResidueElem {
        let e = ring.e() as u32;
        let (s, t) = (j / e, (j % e) as usize);
        let ps = ring.p().pow(s);
        let block: Vec<i64> = ring.block(z, t).iter().map(|&c| ((c / ps) % ring.p()) as i64).collect();
        let r = self.field.from_coords(&block);
        self.field.mul(&r, &self.p_correction[s as usize])
    }

    pub fn to_digits(&self, ring: &ResidueRing, z: &ResidueElem) -> Vec<Digit> {
        let mut z = z.clone();
        let mut out = Vec::with_capacity(ring.len() as usize);
        for j in 0..ring.len() {
            if ring.valuation(&z) != Some(j) {
                out.push(None);
                continue;
            }
            let r = self.leading_residue(ring, &z, j);
            let d = self.log[self.field.index_of(&r)].expect("nonzero residue");
            let term = ring.mul(&self.teich[d as usize], &self.pi_pow[j as usize]);
            z = ring.sub(&z, &term);
            out.push(Some(d));
        }
        debug_assert!(ring.is_zero(&z));
        out
    }

    pub fn from_digits(&self, ring: &ResidueRing, digits: &[Digit]) -> ResidueElem {
        let mut z = ring.zero();
        for (j, d) in digits.iter().enumerate().take(ring.len() as usize) {
            if let Some(i) = d {
                z = ring.add(&z, &ring.mul(&self.teich[*i as usize % self.teich.len()], &self.pi_pow[j]));
            }
        }
        z
    }

    /// The digit vector at `index` in the enumeration of all `q^L` vectors.
    pub fn digits_at(&self, len: u32, mut index: usize) -> Vec<Digit> {
        let q = self.q as usize;
        (0..len)
            .map(|_| {
                let d = index % q;
                index /= q;
                (d > 0).then(|| d as u32 - 1)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_mod_9() {
        let s = FieldSpec::parse_json(r#"{"p":3,"u":[0,1],"E":[-3,1],"k":1}"#, u128::MAX).unwrap();
        let r = ResidueRing::new(&s, s.big_n(), None).unwrap();
        let d = Digits::new(&s, &r).unwrap();
        assert_eq!(teichmuller(&r, &d.field, &d.field.from_int(2)).unwrap(), r.from_int(8));
        assert_eq!(teichmuller(&r, &d.field, &d.field.from_int(1)).unwrap(), r.one());
        assert_eq!(d.mu(), &r.from_int(8));
        // 5 = 8 + 8·3
        assert_eq!(d.to_digits(&r, &r.from_int(5)), vec![Some(1), Some(1)]);
        assert_eq!(d.to_digits(&r, &r.zero()), vec![None, None]);
        for i in 0..9 {
            let z = r.element_at(i);
            assert_eq!(d.from_digits(&r, &d.to_digits(&r, &z)), z);
        }
    }

    #[test]
    fn bijection_on_ramified_rings() {
        for json in [
            r#"{"p":2,"u":[0,1],"E":[-2,0,1],"k":2}"#,
            r#"{"p":3,"u":[1,0,1],"E":[[3,3],[3,0],1],"k":1}"#,
            r#"{"p":2,"u":[1,1,1],"E":[[2,2],1],"k":2}"#,
        ] {
            let s = FieldSpec::parse_json(json, u128::MAX).unwrap();
            let r = ResidueRing::new(&s, s.big_n(), None).unwrap();
            let d = Digits::new(&s, &r).unwrap();
            let n = r.size() as usize;
            let mut seen = vec![false; n];
            for i in 0..n {
                let z = r.element_at(i);
                let dig = d.to_digits(&r, &z);
                assert_eq!(d.from_digits(&r, &dig), z, "{json} {i}");
                let back = r.index_of(&d.from_digits(&r, &d.digits_at(r.len(), i)));
                assert!(!seen[back]);
                seen[back] = true;
            }
        }
    }
}
