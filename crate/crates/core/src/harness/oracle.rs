//! Extended-precision evaluation of the scalar chains.
//!
//! Everything is recomputed from the inputs at 320 bits: `r_k` and `m_k`
//! come from the distance of `2^k ν` to the nearest integer (not from the
//! halving recursion), powers are `exp(x ln a)`, and middles are the literal
//! `arith − Σ` forms.

use astro_float::{BigFloat, Consts, RoundingMode};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::ChainResult;

/// Working precision in bits (about 96 decimal digits).
pub const ORACLE_PRECISION: usize = 320;

const RM: RoundingMode = RoundingMode::ToEven;

struct Hp {
    p: usize,
    cc: Consts,
}

type Big = BigFloat;

impl Hp {
    fn new() -> Result<Self> {
        let cc = Consts::new().map_err(|e| Error::Oracle(format!("constant cache: {e:?}")))?;
        Ok(Self {
            p: ORACLE_PRECISION,
            cc,
        })
    }

    fn num(&self, x: f64) -> Big {
        BigFloat::from_f64(x, self.p)
    }

    fn add(&self, x: &Big, y: &Big) -> Big {
        x.add(y, self.p, RM)
    }

    fn sub(&self, x: &Big, y: &Big) -> Big {
        x.sub(y, self.p, RM)
    }

    fn mul(&self, x: &Big, y: &Big) -> Big {
        x.mul(y, self.p, RM)
    }

    fn div(&self, x: &Big, y: &Big) -> Big {
        x.div(y, self.p, RM)
    }

    fn sq(&self, x: &Big) -> Big {
        self.mul(x, x)
    }

    fn sqrt(&self, x: &Big) -> Big {
        x.sqrt(self.p, RM)
    }

    fn exp(&mut self, x: &Big) -> Big {
        x.exp(self.p, RM, &mut self.cc)
    }

    fn ln(&mut self, x: &Big) -> Big {
        x.ln(self.p, RM, &mut self.cc)
    }

    fn min(&self, x: &Big, y: &Big) -> Big {
        if x.cmp(y).is_some_and(|c| c <= 0) {
            x.clone()
        } else {
            y.clone()
        }
    }

    /// `K(t)^e`.
    fn kantorovich_pow(&mut self, t: &Big, e: &Big) -> Big {
        let one = self.num(1.0);
        let four = self.num(4.0);
        let k = self.div(&self.sq(&self.add(&one, t)), &self.mul(&four, t));
        let lk = self.ln(&k);
        self.exp(&self.mul(e, &lk))
    }

    fn to_f64(&self, x: &Big) -> Result<f64> {
        if x.is_nan() || x.is_inf() {
            return Err(Error::Oracle(format!("non-finite value {x}")));
        }
        let s = x.to_string();
        s.parse::<f64>()
            .map_err(|e| Error::Oracle(format!("cannot convert {s}: {e}")))
    }
}

/// Refinement data of `ν` at extended precision.
struct Seq {
    /// `r_0 ..= r_n`.
    r: Vec<Big>,
    /// `m_0 ..= m_n`.
    m: Vec<Big>,
    /// `2^{-k}`.
    scale: Vec<Big>,
}

fn sequence(hp: &Hp, nu: f64, n: usize) -> Seq {
    let one = hp.num(1.0);
    let mut r = Vec::with_capacity(n + 1);
    let mut m = Vec::with_capacity(n + 1);
    let mut scale = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let pow = hp.num((k as f64).exp2());
        let v = hp.mul(&pow, &hp.num(nu));
        let mk = v.floor();
        let frac = hp.sub(&v, &mk);
        r.push(hp.min(&frac, &hp.sub(&one, &frac)));
        m.push(mk);
        scale.push(hp.div(&one, &pow));
    }
    Seq { r, m, scale }
}

/// Every scalar chain at one instance, rounded to `f64`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleValues {
    pub y1: [f64; 3],
    pub y2_rhs: f64,
    pub y3: [f64; 3],
    pub y4_rhs: f64,
    pub y5: [f64; 3],
    pub y6_rhs: f64,
    pub heinz: [f64; 3],
    pub heinz_rev_rhs: f64,
}

struct Pair {
    ln_a: Big,
    ln_b: Big,
    a: Big,
    b: Big,
}

impl Pair {
    fn new(hp: &mut Hp, a: Big, b: Big) -> Self {
        Self {
            ln_a: hp.ln(&a),
            ln_b: hp.ln(&b),
            a,
            b,
        }
    }

    fn squared(&self, hp: &mut Hp) -> Self {
        let two = hp.num(2.0);
        Self {
            ln_a: hp.mul(&two, &self.ln_a),
            ln_b: hp.mul(&two, &self.ln_b),
            a: hp.sq(&self.a),
            b: hp.sq(&self.b),
        }
    }

    fn swapped(&self) -> Self {
        Self {
            ln_a: self.ln_b.clone(),
            ln_b: self.ln_a.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// `a^{1−x} b^x`.
    fn geo(&self, hp: &mut Hp, x: &Big) -> Big {
        let one = hp.num(1.0);
        let e = hp.add(&hp.mul(&hp.sub(&one, x), &self.ln_a), &hp.mul(x, &self.ln_b));
        hp.exp(&e)
    }

    /// `b/a`.
    fn ratio(&self, hp: &Hp) -> Big {
        hp.div(&self.b, &self.a)
    }

    fn arith(&self, hp: &Hp, nu: &Big) -> Big {
        let one = hp.num(1.0);
        hp.add(&hp.mul(&hp.sub(&one, nu), &self.a), &hp.mul(nu, &self.b))
    }

    /// Interval `[m_k/2^k, (m_k+1)/2^k]` and its midpoint.
    fn interval(hp: &Hp, seq: &Seq, k: usize) -> (Big, Big, Big) {
        let one = hp.num(1.0);
        let x = hp.mul(&seq.m[k], &seq.scale[k]);
        let y = hp.mul(&hp.add(&seq.m[k], &one), &seq.scale[k]);
        let mid = hp.div(&hp.add(&x, &y), &hp.num(2.0));
        (x, mid, y)
    }

    /// `Σ_{k ∈ range} r_k (√(a♯_x b) − √(a♯_y b))²`.
    fn root_sum(&self, hp: &mut Hp, seq: &Seq, range: std::ops::Range<usize>) -> Big {
        let mut s = hp.num(0.0);
        for k in range {
            let (x, _, y) = Self::interval(hp, seq, k);
            let gx = self.geo(hp, &x);
            let gy = self.geo(hp, &y);
            let d = hp.sub(&hp.sqrt(&gx), &hp.sqrt(&gy));
            s = hp.add(&s, &hp.mul(&seq.r[k], &hp.sq(&d)));
        }
        s
    }

    /// `Σ_{k ∈ range} r_k (a♯_x b − a♯_y b)²`.
    fn plain_sum(&self, hp: &mut Hp, seq: &Seq, range: std::ops::Range<usize>) -> Big {
        let mut s = hp.num(0.0);
        for k in range {
            let (x, _, y) = Self::interval(hp, seq, k);
            let gx = self.geo(hp, &x);
            let gy = self.geo(hp, &y);
            let d = hp.sub(&gx, &gy);
            s = hp.add(&s, &hp.mul(&seq.r[k], &hp.sq(&d)));
        }
        s
    }

    fn heinz(&self, hp: &mut Hp, x: &Big) -> Big {
        let one = hp.num(1.0);
        let g1 = self.geo(hp, x);
        let g2 = self.geo(hp, &hp.sub(&one, x));
        hp.div(&hp.add(&g1, &g2), &hp.num(2.0))
    }

    /// `Σ_{k<n} r_k [H_x − 2H_mid + H_y]`.
    fn heinz_sum(&self, hp: &mut Hp, seq: &Seq, n: usize) -> Big {
        let two = hp.num(2.0);
        let mut s = hp.num(0.0);
        for k in 0..n {
            let (x, mid, y) = Self::interval(hp, seq, k);
            let hx = self.heinz(hp, &x);
            let hm = self.heinz(hp, &mid);
            let hy = self.heinz(hp, &y);
            let b = hp.add(&hp.sub(&hx, &hp.mul(&two, &hm)), &hy);
            s = hp.add(&s, &hp.mul(&seq.r[k], &b));
        }
        s
    }
}

struct Factors {
    lower: Big,
    upper: Big,
    reverse: Big,
}

/// `K(h^{1/2^j})^{r_n}`, `^{R_n}` and `^{−r_n}`.
fn factors(hp: &mut Hp, seq: &Seq, ratio: &Big, j: usize, n: usize) -> Factors {
    let one = hp.num(1.0);
    let root = if j == 0 {
        ratio.clone()
    } else {
        let l = hp.ln(ratio);
        hp.exp(&hp.mul(&l, &seq.scale[j]))
    };
    let r = seq.r[n].clone();
    let big_r = hp.sub(&one, &r);
    Factors {
        lower: hp.kantorovich_pow(&root, &r),
        upper: hp.kantorovich_pow(&root, &big_r),
        reverse: hp.kantorovich_pow(&root, &r.neg()),
    }
}

fn root_gap_sq(hp: &Hp, p: &Pair) -> Big {
    hp.sq(&hp.sub(&hp.sqrt(&p.a), &hp.sqrt(&p.b)))
}

/// `[lower, middle, upper]` of the root chain and the reverse right side.
fn root_chain(hp: &mut Hp, p: &Pair, nu: &Big, seq: &Seq, n: usize) -> Result<([f64; 3], f64)> {
    let f = factors(hp, seq, &p.ratio(hp), n, n);
    let g = p.geo(hp, nu);
    let sum = p.root_sum(hp, seq, 0..n);
    let middle = hp.sub(&p.arith(hp, nu), &sum);
    let swapped = p.swapped().root_sum(hp, seq, 0..n);
    let rhs = hp.sub(&hp.add(&hp.mul(&f.reverse, &g), &root_gap_sq(hp, p)), &swapped);
    Ok((
        [
            hp.to_f64(&hp.mul(&f.lower, &g))?,
            hp.to_f64(&middle)?,
            hp.to_f64(&hp.mul(&f.upper, &g))?,
        ],
        hp.to_f64(&rhs)?,
    ))
}

/// All scalar chains at `(a, b, ν, n)`; fails hard on any non-finite value.
pub fn highprec_all(a: f64, b: f64, nu: f64, n: usize) -> Result<OracleValues> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!(
            "oracle needs positive finite a, b; got {a}, {b}"
        )));
    }
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::domain(format!("weight {nu} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::usage("depth must be at least 1"));
    }
    let mut hp = Hp::new()?;
    let seq = sequence(&hp, nu, n);
    let nu_b = hp.num(nu);
    let one = hp.num(1.0);
    let two = hp.num(2.0);
    let pa = hp.num(a);
    let pb = hp.num(b);
    let p = Pair::new(&mut hp, pa, pb);
    let sq = p.squared(&mut hp);

    let (y1, y2_rhs) = root_chain(&mut hp, &p, &nu_b, &seq, n)?;
    let (y3, y4_rhs) = root_chain(&mut hp, &sq, &nu_b, &seq, n)?;

    // squared family: factor K(h^{1/2^{n−1}})
    let ratio = p.ratio(&hp);
    let f = factors(&mut hp, &seq, &ratio, n - 1, n);
    let g = p.geo(&mut hp, &nu_b);
    let g2 = hp.sq(&g);
    let diff2 = hp.sq(&hp.sub(&p.a, &p.b));
    let arith = p.arith(&hp, &nu_b);
    let r0sq = hp.sq(&seq.r[0]);
    let tail = p.plain_sum(&mut hp, &seq, 1..n);
    let y5_mid = hp.sub(&hp.sub(&hp.sq(&arith), &hp.mul(&r0sq, &diff2)), &tail);
    let big_r0 = hp.sub(&one, &seq.r[0]);
    let tail_sw = p.swapped().plain_sum(&mut hp, &seq, 1..n);
    let y6_rhs = hp.sub(
        &hp.add(&hp.mul(&f.reverse, &g2), &hp.mul(&hp.sq(&big_r0), &diff2)),
        &tail_sw,
    );
    let y5 = [
        hp.to_f64(&hp.mul(&f.lower, &g2))?,
        hp.to_f64(&y5_mid)?,
        hp.to_f64(&hp.mul(&f.upper, &g2))?,
    ];

    let f = factors(&mut hp, &seq, &ratio, n, n);
    let h = p.heinz(&mut hp, &nu_b);
    let hsum = p.heinz_sum(&mut hp, &seq, n);
    let half_sum = hp.div(&hp.add(&p.a, &p.b), &two);
    let heinz = [
        hp.to_f64(&hp.mul(&f.lower, &h))?,
        hp.to_f64(&hp.sub(&half_sum, &hsum))?,
        hp.to_f64(&hp.mul(&f.upper, &h))?,
    ];
    let hrev = hp.sub(&hp.add(&hp.mul(&f.reverse, &h), &root_gap_sq(&hp, &p)), &hsum);

    Ok(OracleValues {
        y1,
        y2_rhs,
        y3,
        y4_rhs,
        y5,
        y6_rhs: hp.to_f64(&y6_rhs)?,
        heinz,
        heinz_rev_rhs: hp.to_f64(&hrev)?,
    })
}

/// The root chain `K^{r_n} a♯_ν b <= a∇_ν b − Σ … <= K^{R_n} a♯_ν b` at
/// extended precision.
pub fn highprec_chain_oracle(a: f64, b: f64, nu: f64, n: usize) -> Result<ChainResult> {
    let v = highprec_all(a, b, nu, n)?;
    Ok(ChainResult {
        lower: v.y1[0],
        middle: v.y1[1],
        upper: v.y1[2],
        terms: Vec::new(),
        degenerate: nu == 0.0 || nu == 1.0,
    })
}
