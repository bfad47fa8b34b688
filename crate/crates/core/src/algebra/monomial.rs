//! Degree-graded indexing of the monomials of k[x,y].
//!
//! `x^i y^j` sits at position `d(d+1)/2 + j` with `d = i + j`, so the monomials of
//! degree `< n` occupy exactly the first `n(n+1)/2` positions. Coordinates of
//! `k[x,y]/m^n` are therefore a prefix of those of `k[x,y]/m^N` for every `N >= n`,
//! and the lowest nonzero column of a vector is a monomial of least degree.

#[inline]
pub fn index(i: u32, j: u32) -> u32 {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// Number of monomials of degree `< order`.
#[inline]
pub fn dim_below(order: u32) -> usize {
    (order as usize) * (order as usize + 1) / 2
}

#[inline]
pub fn degree_of(c: u32) -> u32 {
    let mut d = (((8.0 * c as f64 + 1.0).sqrt() - 1.0) / 2.0) as u32;
    while d * (d + 1) / 2 > c {
        d -= 1;
    }
    while (d + 1) * (d + 2) / 2 <= c {
        d += 1;
    }
    d
}

#[inline]
pub fn exponents(c: u32) -> (u32, u32) {
    let d = degree_of(c);
    let j = c - d * (d + 1) / 2;
    (d - j, j)
}

#[inline]
pub fn times(c: u32, i: u32, j: u32) -> u32 {
    let (a, b) = exponents(c);
    index(a + i, b + j)
}

#[inline]
pub fn shift_x(c: u32) -> u32 {
    c + degree_of(c) + 1
}

#[inline]
pub fn shift_y(c: u32) -> u32 {
    c + degree_of(c) + 2
}

/// Multiplies every monomial of a sorted sparse vector by `x` (or `y`), dropping
/// results of degree `>= order`. Output stays sorted.
pub fn shift(v: &[(u32, u32)], by_y: bool, order: u32) -> Vec<(u32, u32)> {
    let limit = dim_below(order) as u32;
    let mut out = Vec::with_capacity(v.len());
    for &(c, val) in v {
        let n = if by_y { shift_y(c) } else { shift_x(c) };
        if n >= limit {
            break;
        }
        out.push((n, val));
    }
    out
}

pub fn format_monomial(c: u32) -> String {
    let (i, j) = exponents(c);
    let mut parts = Vec::new();
    match i {
        0 => {}
        1 => parts.push("x".to_string()),
        _ => parts.push(format!("x^{i}")),
    }
    match j {
        0 => {}
        1 => parts.push("y".to_string()),
        _ => parts.push(format!("y^{j}")),
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        for d in 0..60u32 {
            for j in 0..=d {
                let c = index(d - j, j);
                assert_eq!(exponents(c), (d - j, j));
                assert_eq!(degree_of(c), d);
            }
        }
        assert_eq!(dim_below(3), 6);
        assert_eq!(index(0, 0), 0);
        assert_eq!(index(1, 0), 1);
        assert_eq!(index(0, 1), 2);
    }

    #[test]
    fn shifts_match_exponents() {
        for c in 0..500u32 {
            let (i, j) = exponents(c);
            assert_eq!(shift_x(c), index(i + 1, j));
            assert_eq!(shift_y(c), index(i, j + 1));
            assert_eq!(times(c, 2, 3), index(i + 2, j + 3));
        }
    }

    #[test]
    fn shift_truncates() {
        // x^2 (deg 2) times x is degree 3, dropped at order 3
        let v = vec![(index(1, 0), 1), (index(2, 0), 5)];
        assert_eq!(shift(&v, false, 3), vec![(index(2, 0), 1)]);
    }
}
