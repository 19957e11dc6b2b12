//! Order-preserving surjections `[m] ↠ [k]` encoded as jump masks.
//!
//! A surjection is determined by the positions `j ∈ 0..m` where it steps
//! (`σ(j+1) = σ(j) + 1`). Bit `j` of the mask is set for each such step, so
//! the mask has exactly `k` bits among the low `m` bits. These encode the
//! basis of the Dold–Kan construction: the level-`m` summand indexed by `σ`
//! is a copy of the degree-`k` chains.

/// Largest simplicial level representable in a mask.
pub const MAX_LEVEL: usize = 40;

/// Effect of the face `d_i` on a surjection under the Dold–Kan rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Face {
    /// `σ δ^i` is still surjective.
    Surjective(u64),
    /// `σ δ^i = δ^k τ`: the face applies the chain differential and lands
    /// on the summand indexed by `τ` (mask over `m - 1` positions, `k - 1` bits).
    Boundary(u64),
    /// Any other factorization; the face is zero on this summand.
    Zero,
}

#[inline]
pub fn full(m: usize) -> u64 {
    debug_assert!(m <= MAX_LEVEL);
    (1u64 << m) - 1
}

#[inline]
fn low(bits: usize) -> u64 {
    (1u64 << bits) - 1
}

/// All masks with `k` bits among `m` positions, increasing.
pub fn masks(m: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    if k == 0 {
        out.push(0);
        return out;
    }
    // Gosper's hack
    let mut x = low(k);
    let limit = 1u64 << m;
    while x < limit {
        out.push(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// `d_i` applied to the surjection with mask `mask` at level `m` (`m ≥ 1`).
pub fn face(mask: u64, m: usize, i: usize) -> Face {
    debug_assert!(m >= 1 && i <= m);
    if i == 0 {
        if mask & 1 == 1 {
            Face::Zero
        } else {
            Face::Surjective(mask >> 1)
        }
    } else if i == m {
        let top = 1u64 << (m - 1);
        if mask & top != 0 {
            Face::Boundary(mask & !top)
        } else {
            Face::Surjective(mask)
        }
    } else {
        let before = (mask >> (i - 1)) & 1;
        let after = (mask >> i) & 1;
        if before == 1 && after == 1 {
            Face::Zero
        } else {
            let merged = (before | after) << (i - 1);
            Face::Surjective((mask & low(i - 1)) | merged | ((mask >> (i + 1)) << i))
        }
    }
}

/// `s_j` applied to the surjection with mask `mask` at level `m`; result at level `m + 1`.
#[inline]
pub fn degeneracy(mask: u64, j: usize) -> u64 {
    (mask & low(j)) | ((mask >> j) << (j + 1))
}

/// Mask of `ρ ∘ τ` where `τ` has mask `tau` and `ρ` has mask `rho` (over the
/// positions of `τ`'s target).
pub fn compose(rho: u64, tau: u64) -> u64 {
    let mut out = 0u64;
    let mut t = tau;
    let mut rank = 0;
    while t != 0 {
        let j = t.trailing_zeros();
        if (rho >> rank) & 1 == 1 {
            out |= 1u64 << j;
        }
        rank += 1;
        t &= t - 1;
    }
    out
}

/// Evaluates the surjection at a vertex (test helper and documentation of the encoding).
pub fn eval(mask: u64, vertex: usize) -> usize {
    (mask & low(vertex)).count_ones() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn as_fn(mask: u64, m: usize) -> Vec<usize> {
        (0..=m).map(|v| eval(mask, v)).collect()
    }

    fn from_fn(f: &[usize]) -> Option<u64> {
        let mut mask = 0;
        for j in 0..f.len() - 1 {
            match f[j + 1] as i64 - f[j] as i64 {
                0 => {}
                1 => mask |= 1 << j,
                _ => return None,
            }
        }
        if f[0] == 0 {
            Some(mask)
        } else {
            None
        }
    }

    #[test]
    fn mask_counts() {
        for m in 0..8 {
            for k in 0..=m + 1 {
                assert_eq!(masks(m, k).len(), binomial(m, k));
            }
        }
        assert_eq!(masks(3, 2), vec![0b011, 0b101, 0b110]);
    }

    #[test]
    fn faces_match_composition_with_cofaces() {
        for m in 1..7 {
            for k in 0..=m {
                for mask in masks(m, k) {
                    let f = as_fn(mask, m);
                    for i in 0..=m {
                        let g: Vec<usize> = (0..m).map(|v| f[if v < i { v } else { v + 1 }]).collect();
                        let surjective = (0..=k).all(|x| g.contains(&x));
                        match face(mask, m, i) {
                            Face::Surjective(nm) => {
                                assert!(surjective);
                                assert_eq!(Some(nm), from_fn(&g));
                            }
                            Face::Boundary(tau) => {
                                assert!(!surjective);
                                assert!(!g.contains(&k));
                                assert_eq!(Some(tau), from_fn(&g));
                            }
                            Face::Zero => {
                                assert!(!surjective);
                                assert!(g.contains(&k));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degeneracy_and_compose() {
        for m in 0..6 {
            for k in 0..=m {
                for mask in masks(m, k) {
                    let f = as_fn(mask, m);
                    for j in 0..=m {
                        let g: Vec<usize> = (0..=m + 1).map(|v| f[if v <= j { v } else { v - 1 }]).collect();
                        assert_eq!(Some(degeneracy(mask, j)), from_fn(&g));
                    }
                    for k2 in 0..=k {
                        for rho in masks(k, k2) {
                            let r = as_fn(rho, k);
                            let g: Vec<usize> = f.iter().map(|&x| r[x]).collect();
                            assert_eq!(Some(compose(rho, mask)), from_fn(&g));
                        }
                    }
                }
            }
        }
    }
}
