//! Truncated multivariate power series: the finite-dimensional rings
//! C_p[[x]] = C[[x]] / m^{p+1}, with coefficients in Q(i).
//!
//! A series never stores a coefficient of degree above its order, and never
//! stores zeros. Binary operations truncate to the smaller of the two orders;
//! missing tail data is treated as unknown, not as zero.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gaussian::GaussianRational;
use crate::multiindex::MultiIndex;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    nvars: usize,
    order: u32,
    coeffs: BTreeMap<MultiIndex, GaussianRational>,
}

impl TruncatedSeries {
    pub fn zero(nvars: usize, order: u32) -> Self {
        TruncatedSeries { nvars, order, coeffs: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, order: u32, c: GaussianRational) -> Self {
        let mut s = Self::zero(nvars, order);
        if !c.is_zero() {
            s.coeffs.insert(MultiIndex::zero(nvars), c);
        }
        s
    }

    pub fn one(nvars: usize, order: u32) -> Self {
        Self::constant(nvars, order, GaussianRational::one())
    }

    /// The coordinate series x_{i+1}.
    pub fn variable(nvars: usize, order: u32, i: usize) -> Self {
        assert!(i < nvars);
        Self::monomial(nvars, order, MultiIndex::unit(nvars, i), GaussianRational::one())
    }

    pub fn monomial(nvars: usize, order: u32, alpha: MultiIndex, c: GaussianRational) -> Self {
        assert_eq!(alpha.nvars(), nvars);
        let mut s = Self::zero(nvars, order);
        if !c.is_zero() && alpha.degree() <= order {
            s.coeffs.insert(alpha, c);
        }
        s
    }

    pub fn from_terms(
        nvars: usize,
        order: u32,
        terms: impl IntoIterator<Item = (MultiIndex, GaussianRational)>,
    ) -> Self {
        let mut s = Self::zero(nvars, order);
        for (alpha, c) in terms {
            s.add_term(&alpha, &c);
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &GaussianRational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> GaussianRational {
        self.coeffs.get(alpha).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff(&MultiIndex::zero(self.nvars))
    }

    pub fn set_coeff(&mut self, alpha: MultiIndex, c: GaussianRational) {
        assert_eq!(alpha.nvars(), self.nvars);
        if c.is_zero() || alpha.degree() > self.order {
            self.coeffs.remove(&alpha);
        } else {
            self.coeffs.insert(alpha, c);
        }
    }

    fn add_term(&mut self, alpha: &MultiIndex, c: &GaussianRational) {
        if c.is_zero() || alpha.degree() > self.order {
            return;
        }
        let entry = self.coeffs.entry(alpha.clone()).or_insert_with(GaussianRational::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.coeffs.remove(alpha);
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableCountMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let order = self.order.min(other.order);
        let mut out = Self::zero(self.nvars, order);
        for (a, c) in &self.coeffs {
            out.add_term(a, c);
        }
        for (a, c) in &other.coeffs {
            out.add_term(a, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.order);
        }
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v = &*v * c;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let order = self.order.min(other.order);
        let mut out = Self::zero(self.nvars, order);
        for (a, ca) in &self.coeffs {
            if a.degree() > order {
                continue;
            }
            for (b, cb) in &other.coeffs {
                if a.degree() + b.degree() > order {
                    break;
                }
                out.add_term(&a.add(b), &(ca * cb));
            }
        }
        Ok(out)
    }

    /// Multiplication by the monomial x^gamma, truncating at the order.
    pub fn shift(&self, gamma: &MultiIndex) -> Self {
        let mut out = Self::zero(self.nvars, self.order);
        for (a, c) in &self.coeffs {
            let idx = a.add(gamma);
            if idx.degree() <= self.order {
                out.coeffs.insert(idx, c.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars, self.order);
        for _ in 0..k {
            out = out.mul(self).expect("same variable count");
        }
        out
    }

    /// Substitutes `args` for the variables of self. Every argument must have
    /// zero constant term, so the substitution is well defined at finite
    /// order. The result order is the minimum over self and all arguments.
    pub fn compose(&self, args: &[TruncatedSeries]) -> Result<Self> {
        if args.len() != self.nvars {
            return Err(Error::VariableCountMismatch { expected: self.nvars, found: args.len() });
        }
        let nvars_out = args.first().map_or(self.nvars, TruncatedSeries::nvars);
        let mut order = self.order;
        for g in args {
            if g.nvars() != nvars_out {
                return Err(Error::VariableCountMismatch {
                    expected: nvars_out,
                    found: g.nvars(),
                });
            }
            if !g.constant_term().is_zero() {
                return Err(Error::NonzeroConstantTerm);
            }
            order = order.min(g.order);
        }
        Ok(self.compose_rec(args, nvars_out, order))
    }

    /// Horner evaluation in the first variable; coefficients (series in the
    /// remaining variables) are composed recursively.
    fn compose_rec(&self, args: &[TruncatedSeries], nvars_out: usize, order: u32) -> Self {
        if self.nvars == 0 || args.is_empty() {
            return TruncatedSeries::constant(nvars_out, order, self.constant_term());
        }
        let top = self.coeffs.keys().map(|a| a.0[0]).max().unwrap_or(0);
        let g1 = &args[0];
        let rest = &args[1..];
        let mut acc = TruncatedSeries::zero(nvars_out, order);
        for k in (0..=top).rev() {
            let slice = self.first_var_slice(k);
            let evaluated = slice.compose_rec(rest, nvars_out, order);
            acc = acc.mul(g1).expect("same variable count");
            acc = acc.add(&evaluated).expect("same variable count");
        }
        acc
    }

    /// The series in the remaining variables multiplying x1^k.
    fn first_var_slice(&self, k: u32) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.nvars - 1, self.order);
        for (a, c) in &self.coeffs {
            if a.0[0] == k {
                out.coeffs.insert(MultiIndex(a.0[1..].to_vec()), c.clone());
            }
        }
        out
    }

    /// Multiplicative inverse of a unit, by Newton iteration h <- h(2 - fh).
    pub fn invert_unit(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let mut h = Self::constant(self.nvars, self.order, c0.inv()?);
        let two = Self::constant(self.nvars, self.order, GaussianRational::from_int(2));
        let mut correct: u32 = 0;
        while correct < self.order {
            let fh = self.mul(&h)?;
            h = h.mul(&two.sub(&fh)?)?;
            correct = correct * 2 + 1;
        }
        debug_assert!(self.mul(&h).unwrap() == Self::one(self.nvars, self.order));
        Ok(h)
    }

    /// Minimal degree of a nonzero coefficient; None when the jet is zero
    /// (order of vanishing at least order + 1).
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().map(MultiIndex::degree).min()
    }

    /// Partial derivative with respect to x_{i+1}. The top coefficients of a
    /// p-jet's derivative depend on degree p+1 data, so the result is a
    /// (p-1)-jet.
    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let order = self.order.saturating_sub(1);
        let mut out = Self::zero(self.nvars, order);
        for (a, c) in &self.coeffs {
            if a.0[i] == 0 {
                continue;
            }
            let mut idx = a.clone();
            idx.0[i] -= 1;
            let scaled = c * &GaussianRational::from_int(a.0[i] as i64);
            out.add_term(&idx, &scaled);
        }
        out
    }

    /// Reinterprets the jet at a lower order, dropping high-degree terms.
    pub fn truncate(&self, order: u32) -> Self {
        let mut out = Self::zero(self.nvars, order.min(self.order));
        for (a, c) in &self.coeffs {
            if a.degree() <= out.order {
                out.coeffs.insert(a.clone(), c.clone());
            }
        }
        out
    }

    /// Renders with the given variable names (defaults are x1, x2, ...).
    pub fn to_text(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.nvars);
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (alpha, c) in &self.coeffs {
            let piece = render_term(alpha, c, names);
            if out.is_empty() {
                out.push_str(&piece);
            } else if let Some(tail) = piece.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(tail);
            } else {
                out.push_str(" + ");
                out.push_str(&piece);
            }
        }
        out
    }

    /// Parses an expression in the named variables: sums, differences and
    /// products of numeric literals and variable powers, with parentheses.
    pub fn parse(text: &str, names: &[&str], order: u32) -> Result<Self> {
        let mut p = SeriesParser { bytes: text.as_bytes(), pos: 0, names, order };
        p.skip_ws();
        let s = p.parse_expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(Error::Parse { pos: p.pos, msg: "unexpected trailing input".into() });
        }
        Ok(s)
    }
}

fn render_term(alpha: &MultiIndex, c: &GaussianRational, names: &[&str]) -> String {
    let mono = render_monomial(alpha, names);
    match mono {
        None => format!("{c}"),
        Some(m) => {
            if c.is_one() {
                m
            } else if (-c).is_one() {
                format!("-{m}")
            } else if c.is_real() || c.num_re().is_zero() {
                format!("{c}*{m}")
            } else {
                // Both parts nonzero: the printed form contains an interior
                // sign and must be parenthesized to survive re-parsing.
                format!("({c})*{m}")
            }
        }
    }
}

fn render_monomial(alpha: &MultiIndex, names: &[&str]) -> Option<String> {
    if alpha.degree() == 0 {
        return None;
    }
    let mut parts = Vec::new();
    for (i, &e) in alpha.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].to_string()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    Some(parts.join("*"))
}

struct SeriesParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    names: &'a [&'a str],
    order: u32,
}

impl<'a> SeriesParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn parse_expr(&mut self) -> Result<TruncatedSeries> {
        let mut negate = false;
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negate = true;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        let mut acc = self.parse_product()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.parse_product()?;
                    acc = acc.add(&t)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.parse_product()?;
                    acc = acc.sub(&t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_product(&mut self) -> Result<TruncatedSeries> {
        let mut acc = self.parse_factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                let f = self.parse_factor()?;
                acc = acc.mul(&f)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_factor(&mut self) -> Result<TruncatedSeries> {
        self.skip_ws();
        match self.peek() {
            None => Err(Error::Parse { pos: self.pos, msg: "expected a term".into() }),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(Error::Parse { pos: self.pos, msg: "expected ')'".into() });
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.parse_factor()?.neg())
            }
            Some(c) if c.is_ascii_digit() || c == b'i' => self.parse_number(),
            Some(_) => self.parse_variable_power(),
        }
    }

    /// Literals: "7", "3/5", "2i", "4/5i", "i".
    fn parse_number(&mut self) -> Result<TruncatedSeries> {
        let start = self.pos;
        if self.peek() == Some(b'i') && !self.next_is_name_char(self.pos + 1) {
            self.pos += 1;
            return Ok(self.constant(GaussianRational::i()));
        }
        let num = self.parse_digits()?;
        let den = if self.peek() == Some(b'/') {
            self.pos += 1;
            let d = self.parse_digits()?;
            if d == 0 {
                return Err(Error::Parse { pos: start, msg: "zero denominator".into() });
            }
            d
        } else {
            1
        };
        let imaginary = self.peek() == Some(b'i') && !self.next_is_name_char(self.pos + 1);
        if imaginary {
            self.pos += 1;
        }
        let value = if imaginary {
            GaussianRational::from_parts(0, num, den)
        } else {
            GaussianRational::from_parts(num, 0, den)
        }
        .map_err(|_| Error::Parse { pos: start, msg: "invalid literal".into() })?;
        Ok(self.constant(value))
    }

    fn next_is_name_char(&self, pos: usize) -> bool {
        self.bytes.get(pos).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
    }

    fn parse_digits(&mut self) -> Result<i64> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::Parse { pos: start, msg: "expected digits".into() });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "number too large".into() })
    }

    fn parse_variable_power(&mut self) -> Result<TruncatedSeries> {
        let start = self.pos;
        while self.next_is_name_char(self.pos) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::Parse { pos: start, msg: "expected a variable or number".into() });
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let Some(index) = self.names.iter().position(|n| *n == name) else {
            return Err(Error::Parse { pos: start, msg: format!("unknown variable '{name}'") });
        };
        let mut exp = 1u32;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.parse_digits()?;
            exp = u32::try_from(e)
                .map_err(|_| Error::Parse { pos: self.pos, msg: "exponent too large".into() })?;
        }
        let mut alpha = MultiIndex::zero(self.names.len());
        alpha.0[index] = exp;
        Ok(TruncatedSeries::monomial(
            self.names.len(),
            self.order,
            alpha,
            GaussianRational::one(),
        ))
    }

    fn constant(&self, c: GaussianRational) -> TruncatedSeries {
        TruncatedSeries::constant(self.names.len(), self.order, c)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write!(f, "{}", self.to_text(&refs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> GaussianRational {
        GaussianRational::from_int(v)
    }

    fn s1(text: &str, order: u32) -> TruncatedSeries {
        TruncatedSeries::parse(text, &["x"], order).unwrap()
    }

    fn s2(text: &str, order: u32) -> TruncatedSeries {
        TruncatedSeries::parse(text, &["x", "y"], order).unwrap()
    }

    #[test]
    fn products_truncate() {
        let a = s1("1+x", 2);
        let b = s1("1-x", 2);
        assert_eq!(a.mul(&b).unwrap(), s1("1-x^2", 2));

        let x = s1("x", 1);
        assert!(x.mul(&x).unwrap().is_zero());

        let c = s2("1+x+y", 2);
        assert_eq!(c.mul(&c).unwrap(), s2("1+2*x+2*y+x^2+2*x*y+y^2", 2));
    }

    #[test]
    fn compose_basic() {
        let f = s1("x^2", 2);
        let g = s2("x+y", 2);
        assert_eq!(f.compose(&[g]).unwrap(), s2("x^2+2*x*y+y^2", 2));

        let f = s2("1+x+3*x*y", 4);
        let id = [s2("x", 4), s2("y", 4)];
        assert_eq!(f.compose(&id).unwrap(), f);
    }

    #[test]
    fn compose_geometric_with_quadratic() {
        let f = s1("x+x^2+x^3+x^4", 4);
        let g = s1("x+x^2", 4);
        assert_eq!(f.compose(&[g]).unwrap(), s1("x+2*x^2+3*x^3+5*x^4", 4));
    }

    #[test]
    fn compose_rejects_nonzero_constant() {
        let f = s1("x", 3);
        let g = s1("1+x", 3);
        assert!(matches!(f.compose(&[g]), Err(Error::NonzeroConstantTerm)));
    }

    #[test]
    fn inversion() {
        assert_eq!(s1("1-x", 3).invert_unit().unwrap(), s1("1+x+x^2+x^3", 3));
        assert_eq!(
            s1("3", 2).invert_unit().unwrap(),
            TruncatedSeries::constant(1, 2, GaussianRational::from_ratio(1, 3).unwrap())
        );
        assert_eq!(
            s2("1+x+y", 2).invert_unit().unwrap(),
            s2("1-x-y+x^2+2*x*y+y^2", 2)
        );
        assert!(s1("x", 3).invert_unit().is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(s1("x^2+x^3", 4).valuation(), Some(2));
        assert_eq!(TruncatedSeries::zero(1, 5).valuation(), None);
        let cube = s2("x+y", 4).pow(3);
        assert_eq!(cube.valuation(), Some(3));
    }

    #[test]
    fn partial_derivative_drops_top_degree() {
        let f = s2("x^2*y + y^2", 3);
        let fx = f.partial(0);
        assert_eq!(fx.order(), 2);
        assert_eq!(fx, s2("2*x*y", 2));
        let fy = f.partial(1);
        assert_eq!(fy, s2("x^2+2*y", 2));
    }

    #[test]
    fn text_round_trip() {
        let cases = [
            "0",
            "1",
            "x",
            "-x",
            "x - y",
            "1/2*x + 2i*y",
            "(1+2i)*x^2*y",
            "x^3 - 1/3*y^3 + i",
        ];
        for case in cases {
            let s = s2(case, 5);
            let printed = s.to_text(&["x", "y"]);
            assert_eq!(s2(&printed, 5), s, "round trip through {printed}");
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = TruncatedSeries::parse("x + z", &["x", "y"], 3).unwrap_err();
        match err {
            Error::Parse { pos, .. } => assert_eq!(pos, 4),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(TruncatedSeries::parse("x +", &["x"], 3).is_err());
        assert!(TruncatedSeries::parse("(x", &["x"], 3).is_err());
    }

    #[test]
    fn scale_and_shift() {
        let f = s2("x + y^2", 3);
        assert_eq!(f.scale(&q(2)), s2("2*x + 2*y^2", 3));
        let shifted = f.shift(&MultiIndex(vec![1, 0]));
        assert_eq!(shifted, s2("x^2 + x*y^2", 3));
        let top = f.shift(&MultiIndex(vec![2, 0]));
        assert_eq!(top, s2("x^3", 3));
    }
}
