//! Symbolic descriptions of symmetric sequence spaces and of Köthe spaces on
//! the grid `ℕ × ℕ`, with their canonical text form.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! gauge := "lp:" exp | "kyfan:" int
//!        | "dual(" gauge ")"
//!        | "conv(" gauge "," num ")" | "conc(" gauge "," num ")"
//!        | "prod(" gauge "," gauge ")"
//!        | "decl(" gauge ("," ("convex" | "concave") "=" exp)* ")"
//! kfs   := "mixed(" gauge "," exp ")" | "t(" kfs ")"
//!        | "sum(" kfs "," kfs ")" | "cap(" kfs "," kfs ")"
//!        | "l2grid" | "lpgrid:" exp
//! exp   := num | "inf"
//! num   := integer | integer "/" integer | decimal
//! ```

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exponent::{fmt_ratio, parse_ratio, Exponent, Ratio};

/// Symmetric gauge on finite sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GaugeSpec {
    Lp(Exponent),
    /// Sum of the `k` largest moduli.
    KyFan(usize),
    /// Köthe dual.
    Dual(Box<GaugeSpec>),
    /// `r`-convexification: `‖ |v|^r ‖^{1/r}`.
    Convexify(Box<GaugeSpec>, Ratio),
    /// `r`-concavification: `‖ |v|^{1/r} ‖^r`.
    Concavify(Box<GaugeSpec>, Ratio),
    /// Pointwise product space with the infimum-of-products norm.
    Product(Box<GaugeSpec>, Box<GaugeSpec>),
    /// Transparent wrapper that carries convexity/concavity flags declared by
    /// the caller or established by [`crate::gauge::convexity_probe`].
    Declared { base: Box<GaugeSpec>, flags: DeclaredFlags },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeclaredFlags {
    /// `p` such that the space is `p`-convex with constant 1.
    pub convex: Option<Exponent>,
    /// `q` such that the space is `q`-concave with constant 1.
    pub concave: Option<Exponent>,
}

/// Best known lattice exponents of a gauge: `convex`-convex and
/// `concave`-concave, both with constant 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Profile {
    pub convex: Exponent,
    pub concave: Exponent,
}

impl Profile {
    pub fn is_convex(&self, p: Exponent) -> bool {
        self.convex >= p
    }

    pub fn is_concave(&self, q: Exponent) -> bool {
        self.concave <= q
    }
}

impl GaugeSpec {
    pub fn lp(p: i64) -> Self {
        GaugeSpec::Lp(Exponent::int(p))
    }

    pub fn lp_inf() -> Self {
        GaugeSpec::Lp(Exponent::Infinite)
    }

    pub fn dual(self) -> Self {
        GaugeSpec::Dual(Box::new(self))
    }

    pub fn convexify(self, r: Ratio) -> Self {
        GaugeSpec::Convexify(Box::new(self), r)
    }

    pub fn concavify(self, r: Ratio) -> Self {
        GaugeSpec::Concavify(Box::new(self), r)
    }

    pub fn product(self, other: GaugeSpec) -> Self {
        GaugeSpec::Product(Box::new(self), Box::new(other))
    }

    pub fn declare(self, flags: DeclaredFlags) -> Self {
        GaugeSpec::Declared { base: Box::new(self), flags }
    }

    /// Lattice exponents derived from the catalog and the combinator rules,
    /// combined with any declared flags. Fails on a malformed or inadmissible
    /// spec (bad exponents, a concavification without matching convexity, a
    /// product of factors that are not 2-convex).
    pub fn profile(&self) -> Result<Profile> {
        match self {
            GaugeSpec::Lp(p) => {
                p.validate()?;
                Ok(Profile { convex: *p, concave: *p })
            }
            GaugeSpec::KyFan(k) => match k {
                0 => Err(Error::domain("Ky Fan index must be >= 1")),
                1 => Ok(Profile { convex: Exponent::Infinite, concave: Exponent::Infinite }),
                _ => Ok(Profile { convex: Exponent::ONE, concave: Exponent::Infinite }),
            },
            GaugeSpec::Dual(b) => {
                let p = b.profile()?;
                Ok(Profile { convex: p.concave.conjugate(), concave: p.convex.conjugate() })
            }
            GaugeSpec::Convexify(b, r) => {
                check_factor(r)?;
                let p = b.profile()?;
                Ok(Profile { convex: p.convex.mul(*r), concave: p.concave.mul(*r) })
            }
            GaugeSpec::Concavify(b, r) => {
                check_factor(r)?;
                let p = b.profile()?;
                let need = Exponent::Finite(*r);
                if p.convex < need {
                    return Err(Error::inadmissible(format!(
                        "conc({b},{}) requires {b} to be {}-convex with constant 1 (known: {}-convex)",
                        RatioDisplay(r),
                        need,
                        p.convex
                    )));
                }
                Ok(Profile { convex: p.convex.div(*r), concave: p.concave.div(*r) })
            }
            GaugeSpec::Product(g, h) => {
                let pg = g.profile()?;
                let ph = h.profile()?;
                for (f, p) in [(g, pg), (h, ph)] {
                    if !p.is_convex(Exponent::TWO) {
                        return Err(Error::inadmissible(format!(
                            "product factor {f} must be 2-convex with constant 1"
                        )));
                    }
                }
                let convex = Exponent::from_recip(pg.convex.recip() + ph.convex.recip())?;
                // Concavity only propagates exactly through the ℓ_p closed form.
                let concave = match (resolve_closed_form(g), resolve_closed_form(h)) {
                    (GaugeSpec::Lp(_), GaugeSpec::Lp(_)) => {
                        Exponent::from_recip(pg.concave.recip() + ph.concave.recip())?
                    }
                    _ => Exponent::Infinite,
                };
                Ok(Profile { convex, concave })
            }
            GaugeSpec::Declared { base, flags } => {
                let mut p = base.profile()?;
                if let Some(c) = flags.convex {
                    c.validate()?;
                    p.convex = p.convex.max(c);
                }
                if let Some(q) = flags.concave {
                    q.validate()?;
                    p.concave = p.concave.min(q);
                }
                Ok(p)
            }
        }
    }

    /// Checks that the spec can be evaluated.
    pub fn validate(&self) -> Result<()> {
        self.profile().map(|_| ())
    }

    /// Strips `Declared` wrappers.
    pub fn bare(&self) -> &GaugeSpec {
        match self {
            GaugeSpec::Declared { base, .. } => base.bare(),
            other => other,
        }
    }

    /// `Some(p)` when the spec resolves to `ℓ_p`.
    pub fn as_lp(&self) -> Option<Exponent> {
        match resolve_closed_form(self) {
            GaugeSpec::Lp(p) => Some(p),
            GaugeSpec::KyFan(1) => Some(Exponent::Infinite),
            _ => None,
        }
    }
}

fn check_factor(r: &Ratio) -> Result<()> {
    if *r <= Ratio::one() {
        Err(Error::domain(format!("convexification factor {} must exceed 1", RatioDisplay(r))))
    } else {
        Ok(())
    }
}

/// Rewrites combinator chains over `ℓ_p` bases into a single `ℓ_p` wherever
/// the identity is exact; anything else is returned unchanged (with its
/// children resolved).
pub fn resolve_closed_form(spec: &GaugeSpec) -> GaugeSpec {
    match spec {
        GaugeSpec::Lp(_) | GaugeSpec::KyFan(_) => spec.clone(),
        GaugeSpec::Dual(b) => match resolve_closed_form(b) {
            GaugeSpec::Lp(p) => GaugeSpec::Lp(p.conjugate()),
            other => GaugeSpec::Dual(Box::new(other)),
        },
        GaugeSpec::Convexify(b, r) => match resolve_closed_form(b) {
            GaugeSpec::Lp(p) => GaugeSpec::Lp(p.mul(*r)),
            other => GaugeSpec::Convexify(Box::new(other), *r),
        },
        GaugeSpec::Concavify(b, r) => match resolve_closed_form(b) {
            GaugeSpec::Lp(p) if p >= Exponent::Finite(*r) => GaugeSpec::Lp(p.div(*r)),
            other => GaugeSpec::Concavify(Box::new(other), *r),
        },
        GaugeSpec::Product(g, h) => match (resolve_closed_form(g), resolve_closed_form(h)) {
            (GaugeSpec::Lp(a), GaugeSpec::Lp(b)) => {
                let r = a.recip() + b.recip();
                if r <= Ratio::one() {
                    GaugeSpec::Lp(Exponent::from_recip(r).expect("nonnegative reciprocal"))
                } else {
                    GaugeSpec::Product(Box::new(GaugeSpec::Lp(a)), Box::new(GaugeSpec::Lp(b)))
                }
            }
            (a, b) => GaugeSpec::Product(Box::new(a), Box::new(b)),
        },
        GaugeSpec::Declared { base, flags } => match resolve_closed_form(base) {
            lp @ GaugeSpec::Lp(_) => lp,
            other => GaugeSpec::Declared { base: Box::new(other), flags: *flags },
        },
    }
}

/// Köthe function space on `ℕ × ℕ`, evaluated on finite matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum KfsSpec {
    /// `E(ℓ_p)`: outer gauge over the row-wise `ℓ_p` norms.
    MixedRow(GaugeSpec, Exponent),
    Transpose(Box<KfsSpec>),
    Sum(Box<KfsSpec>, Box<KfsSpec>),
    Intersect(Box<KfsSpec>, Box<KfsSpec>),
    L2Grid,
    LpGrid(Exponent),
}

impl KfsSpec {
    pub fn mixed(e: GaugeSpec, p: Exponent) -> Self {
        KfsSpec::MixedRow(e, p)
    }

    pub fn transpose(self) -> Self {
        KfsSpec::Transpose(Box::new(self))
    }

    pub fn sum(self, other: KfsSpec) -> Self {
        KfsSpec::Sum(Box::new(self), Box::new(other))
    }

    pub fn intersect(self, other: KfsSpec) -> Self {
        KfsSpec::Intersect(Box::new(self), Box::new(other))
    }

    /// `X(ℓ_p) + ᵗX(ℓ_p)` for an outer gauge `g`.
    pub fn symmetric_sum(g: GaugeSpec, p: Exponent) -> Self {
        let x = KfsSpec::MixedRow(g, p);
        x.clone().sum(x.transpose())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            KfsSpec::MixedRow(g, p) => {
                p.validate()?;
                g.validate()
            }
            KfsSpec::Transpose(x) => x.validate(),
            KfsSpec::Sum(x, y) | KfsSpec::Intersect(x, y) => {
                x.validate()?;
                y.validate()
            }
            KfsSpec::L2Grid => Ok(()),
            KfsSpec::LpGrid(p) => p.validate(),
        }
    }

    /// Köthe dual: `E(ℓ_p)' = E'(ℓ_{p'})`, `(X+Y)' = X'∩Y'`, `(X∩Y)' = X'+Y'`.
    pub fn dual(&self) -> KfsSpec {
        match self {
            KfsSpec::MixedRow(g, p) => KfsSpec::MixedRow(resolve_closed_form(&g.clone().dual()), p.conjugate()),
            KfsSpec::Transpose(x) => x.dual().transpose(),
            KfsSpec::Sum(x, y) => x.dual().intersect(y.dual()),
            KfsSpec::Intersect(x, y) => x.dual().sum(y.dual()),
            KfsSpec::L2Grid => KfsSpec::L2Grid,
            KfsSpec::LpGrid(p) => KfsSpec::LpGrid(p.conjugate()),
        }
    }
}

struct RatioDisplay<'a>(&'a Ratio);

impl fmt::Display for RatioDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_ratio(self.0, f)
    }
}

impl fmt::Display for GaugeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaugeSpec::Lp(p) => write!(f, "lp:{p}"),
            GaugeSpec::KyFan(k) => write!(f, "kyfan:{k}"),
            GaugeSpec::Dual(b) => write!(f, "dual({b})"),
            GaugeSpec::Convexify(b, r) => write!(f, "conv({b},{})", RatioDisplay(r)),
            GaugeSpec::Concavify(b, r) => write!(f, "conc({b},{})", RatioDisplay(r)),
            GaugeSpec::Product(g, h) => write!(f, "prod({g},{h})"),
            GaugeSpec::Declared { base, flags } => {
                write!(f, "decl({base}")?;
                if let Some(c) = flags.convex {
                    write!(f, ",convex={c}")?;
                }
                if let Some(q) = flags.concave {
                    write!(f, ",concave={q}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for KfsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KfsSpec::MixedRow(g, p) => write!(f, "mixed({g},{p})"),
            KfsSpec::Transpose(x) => write!(f, "t({x})"),
            KfsSpec::Sum(x, y) => write!(f, "sum({x},{y})"),
            KfsSpec::Intersect(x, y) => write!(f, "cap({x},{y})"),
            KfsSpec::L2Grid => write!(f, "l2grid"),
            KfsSpec::LpGrid(p) => write!(f, "lpgrid:{p}"),
        }
    }
}

/// Either kind of space, as accepted on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceSpec {
    Gauge(GaugeSpec),
    Kfs(KfsSpec),
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { s: &compact, pos: 0 };
        let out = if p.peek_kfs() { SpaceSpec::Kfs(p.kfs()?) } else { SpaceSpec::Gauge(p.gauge()?) };
        p.end()?;
        Ok(out)
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Gauge(g) => g.fmt(f),
            SpaceSpec::Kfs(k) => k.fmt(f),
        }
    }
}

impl FromStr for GaugeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { s: &compact, pos: 0 };
        let g = p.gauge()?;
        p.end()?;
        Ok(g)
    }
}

impl FromStr for KfsSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { s: &compact, pos: 0 };
        let k = p.kfs()?;
        p.end()?;
        Ok(k)
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(GaugeSpec);
string_serde!(KfsSpec);

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.s[self.pos..]
    }

    fn err(&self, what: &str) -> Error {
        Error::parse(format!("expected {what} at offset {} in `{}`", self.pos, self.s))
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("`{tok}`")))
        }
    }

    fn end(&self) -> Result<()> {
        if self.rest().is_empty() {
            Ok(())
        } else {
            Err(self.err("end of input"))
        }
    }

    /// Token up to the next `,` or `)`.
    fn atom(&mut self) -> &str {
        let rest = self.rest();
        let len = rest.find([',', ')']).unwrap_or(rest.len());
        let start = self.pos;
        self.pos += len;
        &self.s[start..start + len]
    }

    fn exponent(&mut self) -> Result<Exponent> {
        let a = self.atom().to_string();
        a.parse()
    }

    fn ratio(&mut self) -> Result<Ratio> {
        let a = self.atom().to_string();
        parse_ratio(&a)
    }

    fn peek_kfs(&self) -> bool {
        ["mixed(", "t(", "sum(", "cap(", "l2grid", "lpgrid:"].iter().any(|t| self.rest().starts_with(t))
    }

    fn gauge(&mut self) -> Result<GaugeSpec> {
        if self.eat("lp:") {
            return Ok(GaugeSpec::Lp(self.exponent()?));
        }
        if self.eat("kyfan:") {
            let a = self.atom().to_string();
            let k: usize = a.parse().map_err(|_| Error::parse(format!("invalid Ky Fan index `{a}`")))?;
            return Ok(GaugeSpec::KyFan(k));
        }
        if self.eat("dual(") {
            let b = self.gauge()?;
            self.expect(")")?;
            return Ok(b.dual());
        }
        for (tok, conv) in [("conv(", true), ("conc(", false)] {
            if self.eat(tok) {
                let b = self.gauge()?;
                self.expect(",")?;
                let r = self.ratio()?;
                self.expect(")")?;
                return Ok(if conv { b.convexify(r) } else { b.concavify(r) });
            }
        }
        if self.eat("prod(") {
            let g = self.gauge()?;
            self.expect(",")?;
            let h = self.gauge()?;
            self.expect(")")?;
            return Ok(g.product(h));
        }
        if self.eat("decl(") {
            let base = self.gauge()?;
            let mut flags = DeclaredFlags::default();
            while self.eat(",") {
                if self.eat("convex=") {
                    flags.convex = Some(self.exponent()?);
                } else if self.eat("concave=") {
                    flags.concave = Some(self.exponent()?);
                } else {
                    return Err(self.err("`convex=` or `concave=`"));
                }
            }
            self.expect(")")?;
            return Ok(base.declare(flags));
        }
        Err(self.err("a gauge (lp:, kyfan:, dual(, conv(, conc(, prod(, decl()"))
    }

    fn kfs(&mut self) -> Result<KfsSpec> {
        if self.eat("mixed(") {
            let g = self.gauge()?;
            self.expect(",")?;
            let p = self.exponent()?;
            self.expect(")")?;
            return Ok(KfsSpec::MixedRow(g, p));
        }
        if self.eat("t(") {
            let x = self.kfs()?;
            self.expect(")")?;
            return Ok(x.transpose());
        }
        for (tok, sum) in [("sum(", true), ("cap(", false)] {
            if self.eat(tok) {
                let x = self.kfs()?;
                self.expect(",")?;
                let y = self.kfs()?;
                self.expect(")")?;
                return Ok(if sum { x.sum(y) } else { x.intersect(y) });
            }
        }
        if self.eat("l2grid") {
            return Ok(KfsSpec::L2Grid);
        }
        if self.eat("lpgrid:") {
            return Ok(KfsSpec::LpGrid(self.exponent()?));
        }
        Err(self.err("a function space (mixed(, t(, sum(, cap(, l2grid, lpgrid:)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaugeSpec {
        s.parse().unwrap()
    }

    #[test]
    fn parses_documented_examples() {
        for s in [
            "lp:4",
            "kyfan:3",
            "dual(lp:3)",
            "conv(lp:1,2)",
            "conc(lp:4,2)",
            "prod(lp:4,lp:4)",
            "decl(kyfan:2,convex=2,concave=inf)",
        ] {
            assert_eq!(g(s).to_string(), s);
        }
        for s in ["mixed(lp:2,inf)", "sum(mixed(lp:2,inf),t(mixed(lp:2,inf)))", "cap(l2grid,lpgrid:2)"] {
            let k: KfsSpec = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
    }

    #[test]
    fn parser_ignores_whitespace_and_rejects_junk() {
        assert_eq!(g(" conv( lp:1 , 2 ) "), GaugeSpec::lp(1).convexify(Ratio::from_integer(2)));
        assert!("lp:".parse::<GaugeSpec>().is_err());
        assert!("dual(lp:3".parse::<GaugeSpec>().is_err());
        assert!("lp:3)".parse::<GaugeSpec>().is_err());
        assert!("frob".parse::<GaugeSpec>().is_err());
        assert!("kyfan:x".parse::<GaugeSpec>().is_err());
    }

    #[test]
    fn space_spec_dispatches_on_prefix() {
        assert!(matches!("lp:2".parse::<SpaceSpec>().unwrap(), SpaceSpec::Gauge(_)));
        assert!(matches!("t(l2grid)".parse::<SpaceSpec>().unwrap(), SpaceSpec::Kfs(_)));
    }

    #[test]
    fn closed_form_chains() {
        assert_eq!(resolve_closed_form(&g("dual(lp:3)")), g("lp:3/2"));
        assert_eq!(resolve_closed_form(&g("conv(dual(conc(lp:4,2)),2)")), g("lp:4"));
        assert_eq!(resolve_closed_form(&g("conv(dual(conc(lp:inf,2)),2)")), g("lp:2"));
        assert_eq!(resolve_closed_form(&g("prod(lp:2,lp:inf)")), g("lp:2"));
        assert_eq!(resolve_closed_form(&g("prod(lp:4,lp:4)")), g("lp:2"));
        // not exact: left alone
        assert_eq!(resolve_closed_form(&g("dual(kyfan:2)")), g("dual(kyfan:2)"));
        assert_eq!(resolve_closed_form(&g("prod(lp:1,lp:1)")), g("prod(lp:1,lp:1)"));
    }

    #[test]
    fn profiles_follow_combinator_rules() {
        let p = g("lp:4").profile().unwrap();
        assert_eq!((p.convex, p.concave), (Exponent::int(4), Exponent::int(4)));
        let p = g("dual(lp:4)").profile().unwrap();
        assert_eq!((p.convex, p.concave), (Exponent::ratio(4, 3), Exponent::ratio(4, 3)));
        let p = g("conc(lp:6,2)").profile().unwrap();
        assert_eq!(p.convex, Exponent::int(3));
        let p = g("kyfan:2").profile().unwrap();
        assert_eq!((p.convex, p.concave), (Exponent::ONE, Exponent::Infinite));
    }

    #[test]
    fn concavify_requires_flag() {
        assert!(matches!(g("conc(lp:1,2)").validate(), Err(Error::Inadmissible(_))));
        assert!(matches!(g("conc(kyfan:2,2)").validate(), Err(Error::Inadmissible(_))));
        assert!(g("conc(decl(kyfan:2,convex=2),2)").validate().is_ok());
        assert!(g("conc(lp:2,2)").validate().is_ok());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(g("lp:1/2").validate(), Err(Error::Domain(_))));
        assert!(matches!(g("kyfan:0").validate(), Err(Error::Domain(_))));
        assert!(matches!(g("conv(lp:2,1)").validate(), Err(Error::Domain(_))));
        assert!(matches!(g("prod(lp:1,lp:4)").validate(), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn kfs_duals() {
        let k: KfsSpec = "sum(mixed(lp:2,inf),t(mixed(lp:2,inf)))".parse().unwrap();
        assert_eq!(k.dual().to_string(), "cap(mixed(lp:2,1),t(mixed(lp:2,1)))");
        assert_eq!(KfsSpec::LpGrid(Exponent::int(4)).dual(), KfsSpec::LpGrid(Exponent::ratio(4, 3)));
    }
}
