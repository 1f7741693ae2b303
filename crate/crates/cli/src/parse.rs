use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// `7`, `-7/2` or `3.25`, exactly.
pub fn rational(s: &str) -> Result<BigRational, String> {
    let t = s.trim();
    let bad = || format!("not a rational number: {s:?}");
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((i, f)) = t.split_once('.') {
        if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = i.starts_with('-');
        let i: BigInt = if i.is_empty() || i == "-" || i == "+" { BigInt::zero() } else { i.parse().map_err(|_| bad())? };
        let scale = BigInt::from(10u32).pow(f.len() as u32);
        let frac: BigInt = f.parse().map_err(|_| bad())?;
        let mag = i.abs() * &scale + frac;
        return Ok(BigRational::new(if neg { -mag } else { mag }, scale));
    }
    Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?))
}

pub fn positive_rational(s: &str) -> Result<BigRational, String> {
    let r = rational(s)?;
    if r.is_positive() {
        Ok(r)
    } else {
        Err(format!("threshold must be positive, got {s}"))
    }
}

/// A comma-separated list, or `geometric:a:b:n` for `n` integers spaced
/// geometrically from `a` to `b`. Sorted, without repeats.
pub fn threshold_list(s: &str) -> Result<Vec<BigRational>, String> {
    let mut out = if let Some(rest) = s.trim().strip_prefix("geometric:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected geometric:a:b:n, got {s:?}"));
        }
        let a: f64 = parts[0].parse().map_err(|_| format!("bad start {:?}", parts[0]))?;
        let b: f64 = parts[1].parse().map_err(|_| format!("bad end {:?}", parts[1]))?;
        let n: usize = parts[2].parse().map_err(|_| format!("bad length {:?}", parts[2]))?;
        if !(a >= 1.0 && b >= a && n >= 1) {
            return Err(format!("need 1 <= a <= b and n >= 1 in {s:?}"));
        }
        (0..n)
            .map(|i| {
                let x = if n == 1 { a } else { a * (b / a).powf(i as f64 / (n - 1) as f64) };
                BigRational::from_integer(BigInt::from(x.round() as u64))
            })
            .collect::<Vec<_>>()
    } else {
        s.split(',').map(positive_rational).collect::<Result<Vec<_>, _>>()?
    };
    if out.is_empty() {
        return Err("empty threshold list".into());
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Integer part of a nonnegative threshold, for counts over integer values.
pub fn floor_u64(s: &BigRational) -> Result<u64, String> {
    s.floor().to_integer().to_u64().ok_or_else(|| format!("threshold {s} out of range"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(rational("7/2").unwrap(), BigRational::new(7.into(), 2.into()));
        assert_eq!(rational("-3.25").unwrap(), BigRational::new((-13).into(), 4.into()));
        assert_eq!(rational("12").unwrap(), BigRational::from_integer(12.into()));
        assert!(rational("1/0").is_err());
        assert!(rational("x").is_err());
        assert!(positive_rational("0").is_err());
    }

    #[test]
    fn ladders() {
        let v = threshold_list("geometric:10:1000:3").unwrap();
        assert_eq!(v, vec![BigRational::from_integer(10.into()), BigRational::from_integer(100.into()), BigRational::from_integer(1000.into())]);
        assert_eq!(threshold_list("5,3,5").unwrap().len(), 2);
        assert!(threshold_list("geometric:0:10:3").is_err());
        assert!(threshold_list("").is_err());
    }
}
