use std::collections::BTreeMap;

use fbp_core::fingroup::{decompose, invariant_factors_of, iso_check, FinAbGroup, GroupElem, DEFAULT_CAP_ELEMENTS};
use proptest::prelude::*;

/// Cyclic order lists `n_1 <= ... <= n_s` (each >= 2) with product <= `max`.
fn presentations(max: u64) -> Vec<Vec<u64>> {
    fn go(min: u64, budget: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        out.push(cur.clone());
        for n in min..=budget {
            cur.push(n);
            go(n, budget / n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(2, max, &mut Vec::new(), &mut out);
    out
}

/// Operation table of `Z/n_1 × ... × Z/n_s`, elements in mixed radix.
fn product_table(orders: &[u64]) -> Vec<Vec<usize>> {
    let n: usize = orders.iter().product::<u64>() as usize;
    let digits = |mut i: usize| -> Vec<u64> {
        let mut d = vec![0; orders.len()];
        for (slot, &m) in d.iter_mut().zip(orders).rev() {
            *slot = (i % m as usize) as u64;
            i /= m as usize;
        }
        d
    };
    let index = |d: &[u64]| d.iter().zip(orders).fold(0usize, |acc, (&x, &m)| acc * m as usize + x as usize);
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let s: Vec<u64> = digits(a).iter().zip(digits(b)).zip(orders).map(|((x, y), m)| (x + y) % m).collect();
                    index(&s)
                })
                .collect()
        })
        .collect()
}

fn order_histogram(table: &[Vec<usize>]) -> BTreeMap<usize, usize> {
    let e = (0..table.len()).find(|&e| table[e][0] == 0 && table[e].iter().enumerate().all(|(i, &x)| i == x)).unwrap();
    let mut hist = BTreeMap::new();
    for g in 0..table.len() {
        let (mut x, mut k) = (g, 1);
        while x != e {
            x = table[x][g];
            k += 1;
        }
        *hist.entry(k).or_insert(0) += 1;
    }
    hist
}

/// Backtracking search for an isomorphism sending the cyclic generators of
/// the first presentation to elements of the second.
fn isomorphic_by_search(a: &[u64], b: &[u64]) -> bool {
    let (ta, tb) = (product_table(a), product_table(b));
    if ta.len() != tb.len() {
        return false;
    }
    let gens_a: Vec<usize> = (0..a.len())
        .map(|i| a[i + 1..].iter().product::<u64>() as usize)
        .collect();
    fn extend(i: usize, images: &mut Vec<usize>, a: &[u64], gens: &[usize], ta: &[Vec<usize>], tb: &[Vec<usize>]) -> bool {
        let n = ta.len();
        if i == gens.len() {
            // map sum of c_j * gen_j to sum of c_j * image_j
            let mut phi = vec![usize::MAX; n];
            let mut elems = vec![(0usize, 0usize)];
            for (j, &m) in a.iter().enumerate() {
                let mut next = Vec::new();
                for &(x, y) in &elems {
                    let (mut x, mut y) = (x, y);
                    for _ in 0..m {
                        next.push((x, y));
                        x = ta[x][gens[j]];
                        y = tb[y][images[j]];
                    }
                }
                elems = next;
            }
            let mut hit = vec![false; n];
            for (x, y) in elems {
                if phi[x] != usize::MAX || hit[y] {
                    return false;
                }
                phi[x] = y;
                hit[y] = true;
            }
            return (0..n).all(|x| (0..n).all(|y| phi[ta[x][y]] == tb[phi[x]][phi[y]]));
        }
        for cand in 0..n {
            // the image must have order dividing the generator's order
            let mut z = 0;
            for _ in 0..a[i] {
                z = tb[z][cand];
            }
            if z != 0 {
                continue;
            }
            images.push(cand);
            if extend(i + 1, images, a, gens, ta, tb) {
                return true;
            }
            images.pop();
        }
        false
    }
    extend(0, &mut Vec::new(), a, &gens_a, &ta, &tb)
}

#[test]
fn nth_power_criterion_matches_search() {
    for orders in presentations(100) {
        let h = FinAbGroup::from_cyclic_orders(&orders);
        let all = h.enumerate(DEFAULT_CAP_ELEMENTS).unwrap();
        for n in 1..=12u64 {
            let powers: std::collections::BTreeSet<GroupElem> = all.iter().map(|g| h.scale(g, n as i64)).collect();
            for g in &all {
                assert_eq!(h.is_nth_power(g, n), powers.contains(g), "{h} n={n} g={g:?}");
            }
        }
    }
}

#[test]
fn iso_check_matches_isomorphism_search() {
    let pres = presentations(16);
    for a in &pres {
        for b in &pres {
            if a.iter().product::<u64>() != b.iter().product::<u64>() {
                continue;
            }
            let (ga, gb) = (FinAbGroup::from_cyclic_orders(a), FinAbGroup::from_cyclic_orders(b));
            assert_eq!(iso_check(&ga, &gb), isomorphic_by_search(a, b), "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn table_decomposition_matches_presentation() {
    for orders in presentations(64) {
        let table = product_table(&orders);
        let h = invariant_factors_of(&table).unwrap();
        assert_eq!(h, FinAbGroup::from_cyclic_orders(&orders), "{orders:?}");
        let hist = order_histogram(&product_table(h.invariant_factors()));
        assert_eq!(hist, order_histogram(&table));
    }
}

#[test]
fn unit_groups_of_residue_rings() {
    for m in 2..=300usize {
        let units: Vec<usize> = (1..m).filter(|&x| num_integer::gcd(x, m) == 1).collect();
        let pos: BTreeMap<usize, usize> = units.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let table: Vec<Vec<usize>> = units.iter().map(|&a| units.iter().map(|&b| pos[&(a * b % m)]).collect()).collect();
        let d = decompose(units.len(), |a, b| table[a][b]).unwrap();
        assert_eq!(d.group.order(), units.len() as u128);
        let hist = order_histogram(&product_table(d.group.invariant_factors()));
        assert_eq!(hist, order_histogram(&table), "units mod {m}");
        for (i, &x) in d.elements.iter().enumerate() {
            assert_eq!(d.group.index_of(&d.coords[x]), i);
        }
    }
}

#[test]
fn orders_divide_exponent_in_z2_z6() {
    let h = FinAbGroup::parse("Z/2xZ/6").unwrap();
    for g in h.enumerate(DEFAULT_CAP_ELEMENTS).unwrap() {
        assert_eq!(6 % h.order_of(&g), 0);
    }
}

proptest! {
    #[test]
    fn element_count_is_product(orders in prop::collection::vec(1u64..=12, 0..4)) {
        let h = FinAbGroup::from_cyclic_orders(&orders);
        let all = h.enumerate(DEFAULT_CAP_ELEMENTS).unwrap();
        prop_assert_eq!(all.len() as u64, orders.iter().product::<u64>());
        let distinct: std::collections::BTreeSet<_> = all.iter().collect();
        prop_assert_eq!(distinct.len(), all.len());
    }

    #[test]
    fn element_orders(orders in prop::collection::vec(1u64..=12, 0..4), seed in any::<u64>()) {
        let h = FinAbGroup::from_cyclic_orders(&orders);
        let g = h.element_at((seed % h.order() as u64) as usize);
        let o = h.order_of(&g);
        prop_assert_eq!(h.exponent() % o, 0);
        prop_assert_eq!(h.scale(&g, o as i64), h.identity());
        for k in 1..o {
            prop_assert_ne!(h.scale(&g, k as i64), h.identity());
        }
        let max = h.enumerate(DEFAULT_CAP_ELEMENTS).unwrap().iter().map(|x| h.order_of(x)).max().unwrap();
        prop_assert_eq!(max, h.exponent());
    }
}
