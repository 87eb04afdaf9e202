//! Conventional shape-invariant superpotentials.
//!
//! Every superpotential here has the form `W(x, a) = a f1(x) + f2(x)`, where
//! the class-dependent `u(a)` term is folded into `f2` (it is `B/a` for
//! Class II and `alpha * a` for Class I is carried by `f1 = alpha`).
//! The functions satisfy
//!
//! ```text
//! Class I    f1 = alpha,             alpha f2 - f2' = eps   (eps = -omega/2)
//! Class II   f1^2 - f1' = lambda,    f2 = B/a
//! Class III  f1^2 - f1' = lambda,    f1 f2 - f2' = eps      (eps = -omega for IIIA, 0 for IIIB)
//! ```
//!
//! Units are `2m = 1`; `hbar` stays a free parameter. The partner potentials
//! are `V(-/+) = W^2 -/+ hbar W'`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics;

/// Default distance from a pole inside which closed forms refuse to evaluate.
pub const DEFAULT_EXCLUSION: f64 = 1e-9;

/// Number of points on a standard evaluation grid.
pub const STANDARD_GRID_POINTS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassTag {
    IA,
    IB,
    IIA,
    IIB,
    IIIA,
    #[serde(rename = "IIIB_neg_lambda")]
    IIIBNegLambda,
    #[serde(rename = "IIIB_pos_lambda_bounded")]
    IIIBPosLambdaBounded,
    #[serde(rename = "IIIB_pos_lambda_unbounded")]
    IIIBPosLambdaUnbounded,
}

impl ClassTag {
    pub const ALL: [ClassTag; 8] = [
        ClassTag::IA,
        ClassTag::IB,
        ClassTag::IIA,
        ClassTag::IIB,
        ClassTag::IIIA,
        ClassTag::IIIBNegLambda,
        ClassTag::IIIBPosLambdaBounded,
        ClassTag::IIIBPosLambdaUnbounded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::IA => "IA",
            ClassTag::IB => "IB",
            ClassTag::IIA => "IIA",
            ClassTag::IIB => "IIB",
            ClassTag::IIIA => "IIIA",
            ClassTag::IIIBNegLambda => "IIIB_neg_lambda",
            ClassTag::IIIBPosLambdaBounded => "IIIB_pos_lambda_bounded",
            ClassTag::IIIBPosLambdaUnbounded => "IIIB_pos_lambda_unbounded",
        }
    }

    pub fn is_class_i(self) -> bool {
        matches!(self, ClassTag::IA | ClassTag::IB)
    }

    pub fn is_class_ii(self) -> bool {
        matches!(self, ClassTag::IIA | ClassTag::IIB)
    }

    pub fn is_iiib(self) -> bool {
        matches!(
            self,
            ClassTag::IIIBNegLambda
                | ClassTag::IIIBPosLambdaBounded
                | ClassTag::IIIBPosLambdaUnbounded
        )
    }

    /// Tags whose Riccati constant `lambda` is zero by definition.
    pub fn lambda_is_zero(self) -> bool {
        matches!(self, ClassTag::IA | ClassTag::IB | ClassTag::IIA | ClassTag::IIIA)
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassTag::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown class tag '{s}'")))
    }
}

fn default_hbar() -> f64 {
    1.0
}

/// Parameters of a superpotential. Fields that carry no meaning for the
/// instance's class are `None`; see [`SuperpotentialInstance::new`] for the
/// accepted combinations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRecord {
    pub a: f64,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl ParamRecord {
    /// Record with only `a` and `hbar = 1` set.
    pub fn new(a: f64) -> Self {
        ParamRecord {
            a,
            b: None,
            alpha: None,
            lambda: None,
            epsilon: None,
            hbar: 1.0,
            omega: None,
        }
    }

    pub fn with_b(mut self, b: f64) -> Self {
        self.b = Some(b);
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = Some(omega);
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    /// `B`, treated as zero when absent.
    pub fn b(&self) -> f64 {
        self.b.unwrap_or(0.0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or(0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(0.0)
    }

    pub fn omega(&self) -> f64 {
        self.omega.unwrap_or(0.0)
    }

    /// Left-hand constant of the `f2` constraint for the given class.
    pub fn epsilon(&self, tag: ClassTag) -> f64 {
        match tag {
            ClassTag::IA => -0.5 * self.omega(),
            ClassTag::IIIA => -self.omega(),
            _ => 0.0,
        }
    }

    /// Checks field presence and ranges for `tag` and returns the normalised
    /// record (epsilon folded into omega, zero-valued lambda/epsilon dropped
    /// where the class fixes them).
    pub fn normalized(mut self, tag: ClassTag) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParams(format!("{tag}: {msg}")));

        for (name, v) in [
            ("a", Some(self.a)),
            ("B", self.b),
            ("alpha", self.alpha),
            ("lambda", self.lambda),
            ("epsilon", self.epsilon),
            ("hbar", Some(self.hbar)),
            ("omega", self.omega),
        ] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return bad(format!("{name} must be finite, got {v}"));
                }
            }
        }
        if self.hbar <= 0.0 {
            return bad(format!("hbar must be positive, got {}", self.hbar));
        }

        if tag.lambda_is_zero() {
            match self.lambda {
                Some(l) if l != 0.0 => return bad(format!("lambda is fixed to 0, got {l}")),
                _ => self.lambda = None,
            }
        }

        // omega/epsilon carry the same information for IA and IIIA.
        if matches!(tag, ClassTag::IA | ClassTag::IIIA) {
            let scale = if tag == ClassTag::IA { -2.0 } else { -1.0 };
            let omega = match (self.omega, self.epsilon) {
                (Some(w), None) => w,
                (None, Some(e)) => scale * e,
                (Some(w), Some(e)) => {
                    if (scale * e - w).abs() > 1e-12 * w.abs().max(1.0) {
                        return bad(format!("omega = {w} and epsilon = {e} disagree"));
                    }
                    w
                }
                (None, None) => return bad("omega (or epsilon) is required".into()),
            };
            if tag == ClassTag::IIIA && omega <= 0.0 {
                return bad(format!("epsilon = -omega must be negative, got omega = {omega}"));
            }
            if omega == 0.0 {
                return bad("omega must be nonzero".into());
            }
            self.omega = Some(omega);
            self.epsilon = None;
        } else {
            if self.omega.is_some() {
                return bad("omega is not a parameter of this class".into());
            }
            match self.epsilon {
                Some(e) if e != 0.0 => {
                    return bad(format!("epsilon is fixed to 0 in the canonical form, got {e}"))
                }
                _ => self.epsilon = None,
            }
        }

        match tag {
            ClassTag::IA => {
                match self.alpha {
                    Some(al) if al != 0.0 => return bad(format!("alpha must be 0, got {al}")),
                    _ => self.alpha = None,
                }
                if self.b.is_some() {
                    return bad("B is not a parameter of Class IA".into());
                }
            }
            ClassTag::IB => {
                match self.alpha {
                    Some(al) if al != 0.0 => {}
                    _ => return bad("a nonzero alpha is required".into()),
                }
                if self.b.is_some() {
                    return bad("B is not a parameter of Class IB".into());
                }
            }
            ClassTag::IIA | ClassTag::IIB => {
                if self.alpha.is_some() {
                    return bad("alpha is not a parameter of Class II".into());
                }
                if self.b.is_none() {
                    return bad("B is required".into());
                }
                if self.a == 0.0 {
                    return bad("a = 0 makes B/a singular".into());
                }
                if tag == ClassTag::IIB {
                    match self.lambda {
                        Some(l) if l > 0.0 => {}
                        Some(l) => {
                            return bad(format!(
                                "only the lambda > 0 (coth) representative is provided, got {l}"
                            ))
                        }
                        None => return bad("lambda is required".into()),
                    }
                }
            }
            ClassTag::IIIA => {
                if self.alpha.is_some() || self.b.is_some() {
                    return bad("alpha and B are not parameters of Class IIIA".into());
                }
            }
            ClassTag::IIIBNegLambda
            | ClassTag::IIIBPosLambdaBounded
            | ClassTag::IIIBPosLambdaUnbounded => {
                if self.alpha.is_some() {
                    return bad("alpha is not a parameter of Class III".into());
                }
                if self.b.is_none() {
                    return bad("B is required".into());
                }
                let l = match self.lambda {
                    Some(l) => l,
                    None => return bad("lambda is required".into()),
                };
                let want_negative = tag == ClassTag::IIIBNegLambda;
                if (want_negative && l >= 0.0) || (!want_negative && l <= 0.0) {
                    return bad(format!("lambda = {l} has the wrong sign for this sub-case"));
                }
                if self.a == 0.0 && self.b() == 0.0 {
                    return bad("a = B = 0 gives W = 0".into());
                }
            }
        }
        Ok(self)
    }
}

/// Open interval `(lower, upper)`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(rename = "xL", with = "endpoint")]
    pub lower: f64,
    #[serde(rename = "xR", with = "endpoint")]
    pub upper: f64,
}

impl DomainSpec {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(Error::InvalidParams(format!(
                "domain ({lower}, {upper}) is empty"
            )));
        }
        Ok(DomainSpec { lower, upper })
    }

    pub fn real_line() -> Self {
        DomainSpec { lower: f64::NEG_INFINITY, upper: f64::INFINITY }
    }

    pub fn positive_half_line() -> Self {
        DomainSpec { lower: 0.0, upper: f64::INFINITY }
    }

    pub fn negative_half_line() -> Self {
        DomainSpec { lower: f64::NEG_INFINITY, upper: 0.0 }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }

    pub fn endpoint(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.lower,
            Side::Right => self.upper,
        }
    }

    pub fn is_finite_at(&self, side: Side) -> bool {
        self.endpoint(side).is_finite()
    }

    fn approx_eq(&self, other: &DomainSpec) -> bool {
        let close = |p: f64, q: f64| {
            if p.is_infinite() || q.is_infinite() {
                p == q
            } else {
                (p - q).abs() <= 1e-12 * p.abs().max(1.0)
            }
        };
        close(self.lower, other.lower) && close(self.upper, other.upper)
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: f64| {
            if v == f64::INFINITY {
                "∞".to_string()
            } else if v == f64::NEG_INFINITY {
                "-∞".to_string()
            } else if (v.abs() - FRAC_PI_2).abs() < 1e-15 {
                if v < 0.0 { "-π/2".into() } else { "π/2".into() }
            } else {
                format!("{v}")
            }
        };
        write!(f, "({},{})", show(self.lower), show(self.upper))
    }
}

/// Infinite endpoints are encoded as the strings `"-inf"` / `"+inf"`.
mod endpoint {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("+inf")
        } else if *v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct EndpointVisitor;

        impl<'de> Visitor<'de> for EndpointVisitor {
            type Value = f64;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"-inf\", \"+inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "+inf" | "inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        d.deserialize_any(EndpointVisitor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partner {
    Minus,
    Plus,
}

impl fmt::Display for Partner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Partner::Minus => "minus",
            Partner::Plus => "plus",
        })
    }
}

/// Leading behaviour of `W` at a domain boundary, taken from the closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Asymptote {
    /// `|W| -> inf` with the given sign.
    Divergent { sign: f64 },
    /// `W -> value != 0`.
    Finite { value: f64 },
    /// `W -> 0`, approached from the side given by `sign`.
    Vanishing { sign: f64 },
}

impl Asymptote {
    fn negate(self) -> Self {
        match self {
            Asymptote::Divergent { sign } => Asymptote::Divergent { sign: -sign },
            Asymptote::Finite { value } => Asymptote::Finite { value: -value },
            Asymptote::Vanishing { sign } => Asymptote::Vanishing { sign: -sign },
        }
    }

    /// `lim W^2` at this boundary.
    pub fn limit_w2(&self) -> f64 {
        match *self {
            Asymptote::Divergent { .. } => f64::INFINITY,
            Asymptote::Finite { value } => value * value,
            Asymptote::Vanishing { .. } => 0.0,
        }
    }
}

fn sign_or_zero(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn at_const(v: f64, fallback_sign: f64) -> Asymptote {
    if v != 0.0 {
        Asymptote::Finite { value: v }
    } else {
        Asymptote::Vanishing { sign: fallback_sign }
    }
}

fn at_pole(coefficient: f64, fallback_sign: f64) -> Asymptote {
    if coefficient != 0.0 {
        Asymptote::Divergent { sign: sign_or_zero(coefficient) }
    } else {
        Asymptote::Vanishing { sign: fallback_sign }
    }
}

/// A catalog entry: a class tag, its parameters, the domain and the closed
/// forms `f1`, `f2` that follow from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceDoc", into = "InstanceDoc")]
pub struct SuperpotentialInstance {
    name: String,
    tag: ClassTag,
    params: ParamRecord,
    domain: DomainSpec,
    negated: bool,
    exclusion: f64,
    f1_shift: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct InstanceDoc {
    name: String,
    tag: ClassTag,
    params: ParamRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    negated: bool,
}

impl TryFrom<InstanceDoc> for SuperpotentialInstance {
    type Error = Error;

    fn try_from(doc: InstanceDoc) -> Result<Self> {
        let mut sp = match doc.domain {
            Some(d) => SuperpotentialInstance::with_domain(doc.name, doc.tag, doc.params, d)?,
            None => SuperpotentialInstance::new(doc.name, doc.tag, doc.params)?,
        };
        sp.negated = doc.negated;
        Ok(sp)
    }
}

impl From<SuperpotentialInstance> for InstanceDoc {
    fn from(sp: SuperpotentialInstance) -> Self {
        InstanceDoc {
            name: sp.name,
            tag: sp.tag,
            params: sp.params,
            domain: Some(sp.domain),
            negated: sp.negated,
        }
    }
}

impl SuperpotentialInstance {
    /// Builds an instance on the natural domain of `tag`.
    pub fn new(name: impl Into<String>, tag: ClassTag, params: ParamRecord) -> Result<Self> {
        let params = params.normalized(tag)?;
        let domain = natural_domain(tag, &params);
        Ok(SuperpotentialInstance {
            name: name.into(),
            tag,
            params,
            domain,
            negated: false,
            exclusion: DEFAULT_EXCLUSION,
            f1_shift: 0.0,
        })
    }

    /// Builds an instance on an explicit domain. The domain must be the
    /// natural one, except that `IIIB_pos_lambda_unbounded` also accepts the
    /// negative half-line, where `f1 = -sqrt(lambda) coth(sqrt(lambda) x)` is
    /// positive.
    pub fn with_domain(
        name: impl Into<String>,
        tag: ClassTag,
        params: ParamRecord,
        domain: DomainSpec,
    ) -> Result<Self> {
        let mut sp = Self::new(name, tag, params)?;
        if domain.approx_eq(&sp.domain) {
            return Ok(sp);
        }
        if tag == ClassTag::IIIBPosLambdaUnbounded
            && domain.approx_eq(&DomainSpec::negative_half_line())
        {
            sp.domain = DomainSpec::negative_half_line();
            return Ok(sp);
        }
        Err(Error::InvalidParams(format!(
            "{tag}: domain {domain} does not match the closed form (expected {})",
            sp.domain
        )))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tag(&self) -> ClassTag {
        self.tag
    }

    pub fn params(&self) -> &ParamRecord {
        &self.params
    }

    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn hbar(&self) -> f64 {
        self.params.hbar
    }

    pub fn a(&self) -> f64 {
        self.params.a
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda()
    }

    pub fn epsilon(&self) -> f64 {
        self.params.epsilon(self.tag)
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    pub fn is_perturbed(&self) -> bool {
        self.f1_shift != 0.0
    }

    /// Whether `f1 > 0` on the domain (only the negative-half-line branch of
    /// `IIIB_pos_lambda_unbounded`).
    pub fn f1_positive_branch(&self) -> bool {
        self.tag == ClassTag::IIIBPosLambdaUnbounded && self.domain.upper <= 0.0
    }

    pub fn rename(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Same instance with new parameters (re-validated).
    pub fn with_params(&self, params: ParamRecord) -> Result<Self> {
        let mut sp = Self::with_domain(self.name.clone(), self.tag, params, self.domain)?;
        sp.negated = self.negated;
        sp.exclusion = self.exclusion;
        sp.f1_shift = self.f1_shift;
        Ok(sp)
    }

    pub fn with_a(&self, a: f64) -> Result<Self> {
        self.with_params(ParamRecord { a, ..self.params })
    }

    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        self.with_params(ParamRecord { hbar, ..self.params })
    }

    /// `W -> -W`. This swaps `V-` and `V+`.
    pub fn negated(&self) -> Self {
        let mut sp = self.clone();
        sp.negated = !sp.negated;
        sp
    }

    pub fn with_exclusion(mut self, radius: f64) -> Self {
        self.exclusion = radius;
        self
    }

    pub fn exclusion(&self) -> f64 {
        self.exclusion
    }

    /// Replaces `f1` by `f1 + delta` in `W` and in the Riccati check while
    /// keeping `f1'` unchanged. Only useful for negative tests of the
    /// identity checks.
    pub fn perturb_f1(mut self, delta: f64) -> Self {
        self.f1_shift = delta;
        self
    }

    fn root_lambda(&self) -> f64 {
        self.lambda().abs().sqrt()
    }

    fn base_f1(&self, x: f64) -> f64 {
        let k = self.root_lambda();
        match self.tag {
            ClassTag::IA => 0.0,
            ClassTag::IB => self.params.alpha(),
            ClassTag::IIA | ClassTag::IIIA => -1.0 / x,
            ClassTag::IIB | ClassTag::IIIBPosLambdaUnbounded => -k / (k * x).tanh(),
            ClassTag::IIIBNegLambda => k * (k * x).tan(),
            ClassTag::IIIBPosLambdaBounded => -k * (k * x).tanh(),
        }
    }

    /// `f1(x)`; no domain checks.
    pub fn f1(&self, x: f64) -> f64 {
        self.base_f1(x) + self.f1_shift
    }

    /// `f1'(x)`, from the closed form.
    pub fn f1_prime(&self, x: f64) -> f64 {
        let k = self.root_lambda();
        match self.tag {
            ClassTag::IA | ClassTag::IB => 0.0,
            ClassTag::IIA | ClassTag::IIIA => 1.0 / (x * x),
            ClassTag::IIB | ClassTag::IIIBPosLambdaUnbounded => {
                let s = (k * x).sinh();
                k * k / (s * s)
            }
            ClassTag::IIIBNegLambda => {
                let c = (k * x).cos();
                k * k / (c * c)
            }
            ClassTag::IIIBPosLambdaBounded => {
                let c = (k * x).cosh();
                -k * k / (c * c)
            }
        }
    }

    /// `f2(x)`; no domain checks.
    pub fn f2(&self, x: f64) -> f64 {
        let p = &self.params;
        let k = self.root_lambda();
        match self.tag {
            ClassTag::IA => 0.5 * p.omega() * x,
            ClassTag::IB => -(p.alpha() * x).exp(),
            ClassTag::IIA | ClassTag::IIB => p.b() / p.a,
            ClassTag::IIIA => 0.5 * self.epsilon() / self.base_f1(x),
            ClassTag::IIIBNegLambda => p.b() * k / (k * x).cos(),
            ClassTag::IIIBPosLambdaBounded => p.b() * k / (k * x).cosh(),
            ClassTag::IIIBPosLambdaUnbounded => p.b() * k / (k * x).sinh().abs(),
        }
    }

    /// `f2'(x)`, from the closed form.
    pub fn f2_prime(&self, x: f64) -> f64 {
        let p = &self.params;
        let k = self.root_lambda();
        match self.tag {
            ClassTag::IA => 0.5 * p.omega(),
            ClassTag::IB => -p.alpha() * (p.alpha() * x).exp(),
            ClassTag::IIA | ClassTag::IIB => 0.0,
            ClassTag::IIIA => {
                let f1 = self.base_f1(x);
                -0.5 * self.epsilon() * self.f1_prime(x) / (f1 * f1)
            }
            ClassTag::IIIBNegLambda => {
                let c = (k * x).cos();
                p.b() * k * k * (k * x).sin() / (c * c)
            }
            ClassTag::IIIBPosLambdaBounded => {
                let c = (k * x).cosh();
                -p.b() * k * k * (k * x).sinh() / (c * c)
            }
            ClassTag::IIIBPosLambdaUnbounded => {
                let s = (k * x).sinh();
                -p.b() * k * k * (k * x).cosh() / (s * s.abs())
            }
        }
    }

    fn orientation(&self) -> f64 {
        if self.negated {
            -1.0
        } else {
            1.0
        }
    }

    /// `W(x)` without domain checks. May be infinite or NaN outside the domain.
    pub fn w_unchecked(&self, x: f64) -> f64 {
        self.orientation() * (self.params.a * self.f1(x) + self.f2(x))
    }

    /// `W'(x)` without domain checks.
    pub fn w_prime_unchecked(&self, x: f64) -> f64 {
        self.orientation() * (self.params.a * self.f1_prime(x) + self.f2_prime(x))
    }

    pub fn check_point(&self, x: f64) -> Result<()> {
        let d = self.domain;
        if !d.contains(x) {
            return Err(Error::Domain { x, lower: d.lower, upper: d.upper });
        }
        // every finite endpoint of a catalog domain is a pole of f1
        let near = |e: f64| e.is_finite() && (x - e).abs() < self.exclusion;
        if near(d.lower) || near(d.upper) {
            return Err(Error::Singularity { x });
        }
        Ok(())
    }

    pub fn evaluate_w(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        finite_or_singular(x, self.w_unchecked(x))
    }

    pub fn evaluate_w_prime(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        finite_or_singular(x, self.w_prime_unchecked(x))
    }

    /// `V(-/+)(x) = W^2 -/+ hbar W'`.
    pub fn partner_potential(&self, x: f64, which: Partner) -> Result<f64> {
        let w = self.evaluate_w(x)?;
        let wp = self.evaluate_w_prime(x)?;
        let v = match which {
            Partner::Minus => w * w - self.hbar() * wp,
            Partner::Plus => w * w + self.hbar() * wp,
        };
        finite_or_singular(x, v)
    }

    /// Leading behaviour of `W` at `side`, read off the closed form.
    pub fn asymptote(&self, side: Side) -> Asymptote {
        let p = &self.params;
        let (a, b) = (p.a, p.b());
        let k = self.root_lambda();
        let left = side == Side::Left;
        let s = sign_or_zero;
        let raw = match self.tag {
            // W = omega x / 2
            ClassTag::IA => {
                let w = p.omega();
                Asymptote::Divergent { sign: if left { -s(w) } else { s(w) } }
            }
            // W = alpha a - exp(alpha x)
            ClassTag::IB => {
                let al = p.alpha();
                let exp_side_is_left = al < 0.0;
                if left == exp_side_is_left {
                    Asymptote::Divergent { sign: -1.0 }
                } else {
                    at_const(al * a, -1.0)
                }
            }
            // W = -a/x + B/a on (0, inf)
            ClassTag::IIA => {
                if left {
                    Asymptote::Divergent { sign: -s(a) }
                } else {
                    at_const(b / a, -s(a))
                }
            }
            // W = -a k coth(kx) + B/a on (0, inf)
            ClassTag::IIB => {
                if left {
                    Asymptote::Divergent { sign: -s(a) }
                } else {
                    at_const(-a * k + b / a, -s(a))
                }
            }
            // W = -a/x + omega x / 2 on (0, inf)
            ClassTag::IIIA => {
                if left {
                    at_pole(-a, s(p.omega()))
                } else {
                    Asymptote::Divergent { sign: s(p.omega()) }
                }
            }
            // W = a k tan(kx) + B k sec(kx); at the left wall W ~ (B - a)/u,
            // and for a = B, W = a k cos/(1 - sin) ~ a k^2 u / 2
            ClassTag::IIIBNegLambda => {
                if left {
                    at_pole(b - a, s(a))
                } else {
                    at_pole(a + b, -s(a))
                }
            }
            // W = -a k tanh(kx) + B k sech(kx)
            ClassTag::IIIBPosLambdaBounded => {
                if left {
                    at_const(a * k, s(b))
                } else {
                    at_const(-a * k, s(b))
                }
            }
            // W = -a k coth(kx) + B k |csch(kx)|
            ClassTag::IIIBPosLambdaUnbounded => {
                if self.f1_positive_branch() {
                    // x in (-inf, 0): W -> a k at -inf, W ~ (a + B)/|x| at 0-
                    if left {
                        at_const(a * k, s(b))
                    } else {
                        at_pole(a + b, s(a))
                    }
                } else if left {
                    // W ~ (B - a)/x at 0+; for a = B, W = -a k tanh(kx/2)
                    at_pole(b - a, -s(a))
                } else {
                    at_const(-a * k, s(b))
                }
            }
        };
        if self.negated {
            raw.negate()
        } else {
            raw
        }
    }

    /// Human-readable leading term used as evidence in phase reports.
    pub fn leading_term(&self, side: Side) -> String {
        let u = match (side, self.domain.endpoint(side)) {
            (_, e) if e == f64::INFINITY => "x -> +inf".to_string(),
            (_, e) if e == f64::NEG_INFINITY => "x -> -inf".to_string(),
            (Side::Left, e) => format!("x -> {e}+"),
            (Side::Right, e) => format!("x -> {e}-"),
        };
        match self.asymptote(side) {
            Asymptote::Divergent { sign } => {
                format!("W -> {}inf as {u}", if sign > 0.0 { "+" } else { "-" })
            }
            Asymptote::Finite { value } => format!("W -> {value} as {u}"),
            Asymptote::Vanishing { sign } => {
                format!("W -> 0{} as {u}", if sign > 0.0 { "+" } else { "-" })
            }
        }
    }

    /// Interval used for standard grids: the domain with a 5% margin at
    /// finite ends, `[0.1, 40]` on half-lines and a class-specific window on
    /// the full line.
    pub fn window(&self) -> (f64, f64) {
        let d = self.domain;
        match (d.lower.is_finite(), d.upper.is_finite()) {
            (true, true) => {
                let m = 0.05 * (d.upper - d.lower);
                (d.lower + m, d.upper - m)
            }
            (true, false) => (d.lower + 0.1, d.lower + 40.0),
            (false, true) => (d.upper - 40.0, d.upper - 0.1),
            (false, false) => match self.tag {
                ClassTag::IB => {
                    let al = self.params.alpha();
                    if al < 0.0 {
                        (-3.0 / al.abs(), 15.0 / al.abs())
                    } else {
                        (-15.0 / al, 3.0 / al)
                    }
                }
                ClassTag::IIIBPosLambdaBounded => {
                    let k = self.root_lambda();
                    (-10.0 / k, 10.0 / k)
                }
                _ => (-10.0, 10.0),
            },
        }
    }

    /// The instance's standard evaluation grid: 512 points on [`Self::window`],
    /// log-spaced on half-lines and uniform otherwise.
    pub fn standard_grid(&self) -> Vec<f64> {
        self.grid(STANDARD_GRID_POINTS)
    }

    pub fn grid(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.window();
        let d = self.domain;
        let half_line = d.lower.is_finite() != d.upper.is_finite();
        if half_line && lo * hi > 0.0 {
            numerics::log_spaced(lo, hi, n)
        } else {
            numerics::uniform(lo, hi, n)
        }
    }
}

fn finite_or_singular(x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Singularity { x })
    }
}

fn natural_domain(tag: ClassTag, p: &ParamRecord) -> DomainSpec {
    match tag {
        ClassTag::IA | ClassTag::IB | ClassTag::IIIBPosLambdaBounded => DomainSpec::real_line(),
        ClassTag::IIA | ClassTag::IIB | ClassTag::IIIA | ClassTag::IIIBPosLambdaUnbounded => {
            DomainSpec::positive_half_line()
        }
        ClassTag::IIIBNegLambda => {
            let half = FRAC_PI_2 / p.lambda().abs().sqrt();
            DomainSpec { lower: -half, upper: half }
        }
    }
}

/// Max over `grid` of the applicable constraint residuals
/// `|f1^2 - f1' - lambda|` and `|alpha f2 - f2' - eps|` / `|f1 f2 - f2' - eps|`.
pub fn check_riccati(sp: &SuperpotentialInstance, grid: &[f64]) -> Result<f64> {
    let lambda = sp.lambda();
    let eps = sp.epsilon();
    let mut worst: f64 = 0.0;
    for &x in grid {
        sp.check_point(x)?;
        let f1 = sp.f1(x);
        let f1p = sp.f1_prime(x);
        let f2 = sp.f2(x);
        let f2p = sp.f2_prime(x);
        let r = match sp.tag() {
            // f1 = alpha is constant; only the f2 constraint is live
            ClassTag::IA | ClassTag::IB => (f1 * f2 - f2p - eps).abs().max(f1p.abs()),
            ClassTag::IIA | ClassTag::IIB => (f1 * f1 - f1p - lambda).abs(),
            _ => (f1 * f1 - f1p - lambda).abs().max((f1 * f2 - f2p - eps).abs()),
        };
        if !r.is_finite() {
            return Err(Error::Singularity { x });
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

/// The shipped catalog: one or more named instances per class tag, each
/// labelled with the phase it realises at its default parameters.
pub fn catalog() -> Vec<SuperpotentialInstance> {
    let entries: [(&str, ClassTag, ParamRecord); 14] = [
        ("harmonic", ClassTag::IA, ParamRecord::new(0.0).with_omega(1.0)),
        ("morse", ClassTag::IB, ParamRecord::new(-10.0).with_alpha(-1.0)),
        ("morse-broken", ClassTag::IB, ParamRecord::new(2.0).with_alpha(-1.0)),
        ("coulomb", ClassTag::IIA, ParamRecord::new(1.0).with_b(1.0)),
        ("coulomb-broken", ClassTag::IIA, ParamRecord::new(1.0).with_b(-1.0)),
        ("eckart", ClassTag::IIB, ParamRecord::new(1.0).with_b(8.0).with_lambda(0.01)),
        ("eckart-broken", ClassTag::IIB, ParamRecord::new(1.0).with_b(-1.0).with_lambda(0.01)),
        ("oscillator-3d", ClassTag::IIIA, ParamRecord::new(-3.0).with_omega(1.0)),
        ("oscillator-3d-unbroken", ClassTag::IIIA, ParamRecord::new(3.0).with_omega(1.0)),
        ("scarf1", ClassTag::IIIBNegLambda, ParamRecord::new(1.0).with_b(2.0).with_lambda(-1.0)),
        (
            "scarf1-unbroken",
            ClassTag::IIIBNegLambda,
            ParamRecord::new(3.0).with_b(1.0).with_lambda(-1.0),
        ),
        (
            "scarf2",
            ClassTag::IIIBPosLambdaBounded,
            ParamRecord::new(-10.0).with_b(1.0).with_lambda(1.0),
        ),
        (
            "poschl-teller",
            ClassTag::IIIBPosLambdaUnbounded,
            ParamRecord::new(-14.0).with_b(-11.0).with_lambda(1.0),
        ),
        (
            "poschl-teller-unbroken",
            ClassTag::IIIBPosLambdaUnbounded,
            ParamRecord::new(-9.0).with_b(-12.0).with_lambda(1.0),
        ),
    ];
    entries
        .into_iter()
        .map(|(name, tag, p)| {
            SuperpotentialInstance::new(name, tag, p).expect("catalog parameters are valid")
        })
        .collect()
}

/// Looks up a catalog entry by name.
pub fn lookup(name: &str) -> Result<SuperpotentialInstance> {
    catalog()
        .into_iter()
        .find(|sp| sp.name() == name)
        .ok_or_else(|| Error::UnknownInstance(name.to_string()))
}

/// The catalog entry of the same family in the other phase, if shipped
/// (`oscillator-3d` <-> `oscillator-3d-unbroken`, `morse` <-> `morse-broken`).
pub fn sibling(name: &str) -> Option<SuperpotentialInstance> {
    let candidates = if let Some(base) = name.strip_suffix("-broken") {
        vec![base.to_string(), format!("{base}-unbroken")]
    } else if let Some(base) = name.strip_suffix("-unbroken") {
        vec![base.to_string(), format!("{base}-broken")]
    } else {
        vec![format!("{name}-broken"), format!("{name}-unbroken")]
    };
    candidates.iter().find_map(|c| lookup(c).ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn osc(l: f64) -> SuperpotentialInstance {
        SuperpotentialInstance::new("osc", ClassTag::IIIA, ParamRecord::new(l).with_omega(1.0))
            .unwrap()
    }

    fn scarf(a: f64, b: f64) -> SuperpotentialInstance {
        SuperpotentialInstance::new(
            "scarf",
            ClassTag::IIIBNegLambda,
            ParamRecord::new(a).with_b(b).with_lambda(-1.0),
        )
        .unwrap()
    }

    #[test]
    fn oscillator_w_values() {
        let x = 6f64.sqrt();
        // W = r/2 + 3/r at r = sqrt 6
        assert!((osc(-3.0).evaluate_w(x).unwrap() - 6f64.sqrt()).abs() < 1e-14);
        assert!(osc(3.0).evaluate_w(x).unwrap().abs() < 1e-15);
        // W' = 1/2 - 3/r^2 vanishes at the minimum r = sqrt 6
        assert!(osc(-3.0).evaluate_w_prime(x).unwrap().abs() < 1e-15);
        assert!((osc(-3.0).evaluate_w_prime(1.0).unwrap() + 2.5).abs() < 1e-15);
    }

    #[test]
    fn scarf_values_at_origin() {
        let sp = scarf(1.0, 2.0);
        assert!((sp.evaluate_w(0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((sp.evaluate_w_prime(0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partner_potentials() {
        let x = 6f64.sqrt();
        // V- = r^2/4 + 5/2 + 12/r^2
        let v = osc(-3.0).partner_potential(x, Partner::Minus).unwrap();
        assert!((v - 6.0).abs() < 1e-13);
        let v = osc(-3.0).partner_potential(1.0, Partner::Minus).unwrap();
        assert!((v - 14.75).abs() < 1e-13);

        let ia = lookup("harmonic").unwrap();
        assert!((ia.evaluate_w_prime(1.7).unwrap() - 0.5).abs() < 1e-15);
        assert!((ia.partner_potential(0.0, Partner::Minus).unwrap() + 0.5).abs() < 1e-15);
        let diff = ia.partner_potential(3.0, Partner::Plus).unwrap()
            - ia.partner_potential(3.0, Partner::Minus).unwrap();
        assert!((diff - 1.0).abs() < 1e-14);
    }

    #[test]
    fn domain_and_singularity_errors() {
        let sp = osc(-3.0);
        assert!(matches!(sp.evaluate_w(-1.0), Err(Error::Domain { .. })));
        assert!(matches!(sp.evaluate_w(0.0), Err(Error::Domain { .. })));
        assert!(matches!(sp.evaluate_w(1e-10), Err(Error::Singularity { .. })));
        let s = scarf(1.0, 2.0);
        assert!(matches!(s.evaluate_w(FRAC_PI_2 - 1e-12), Err(Error::Singularity { .. })));
        assert!(s.with_exclusion(1e-14).evaluate_w(FRAC_PI_2 - 1e-12).is_ok());
    }

    #[test]
    fn params_reject_meaningless_fields() {
        let bad = [
            (ClassTag::IA, ParamRecord::new(0.0).with_omega(1.0).with_b(1.0)),
            (ClassTag::IB, ParamRecord::new(1.0)),
            (ClassTag::IIA, ParamRecord::new(1.0).with_b(1.0).with_lambda(0.5)),
            (ClassTag::IIIA, ParamRecord::new(1.0).with_omega(-1.0)),
            (ClassTag::IIIA, ParamRecord::new(1.0).with_omega(1.0).with_epsilon(-2.0)),
            (ClassTag::IIIBNegLambda, ParamRecord::new(1.0).with_b(1.0).with_lambda(1.0)),
            (ClassTag::IIIBPosLambdaBounded, ParamRecord::new(0.0).with_b(0.0).with_lambda(1.0)),
            (ClassTag::IIIA, ParamRecord::new(1.0).with_omega(1.0).with_hbar(0.0)),
        ];
        for (tag, p) in bad {
            assert!(SuperpotentialInstance::new("x", tag, p).is_err(), "{tag} {p:?}");
        }
        // epsilon is accepted in place of omega
        let sp = SuperpotentialInstance::new(
            "x",
            ClassTag::IIIA,
            ParamRecord::new(-3.0).with_epsilon(-1.0),
        )
        .unwrap();
        assert_eq!(sp.params().omega, Some(1.0));
        assert_eq!(sp.epsilon(), -1.0);
    }

    #[test]
    fn catalog_shape() {
        let cat = catalog();
        for tag in ClassTag::ALL {
            assert!(cat.iter().any(|sp| sp.tag() == tag), "no entry for {tag}");
        }
        let osc = cat.iter().find(|sp| sp.name() == "oscillator-3d").unwrap();
        assert_eq!(osc.tag(), ClassTag::IIIA);
        let tan = cat
            .iter()
            .find(|sp| sp.tag() == ClassTag::IIIBNegLambda && sp.lambda() == -1.0)
            .unwrap();
        assert!((tan.f1(0.3) - 0.3f64.tan()).abs() < 1e-15);
    }

    #[test]
    fn catalog_riccati_residuals() {
        for sp in catalog() {
            let r = check_riccati(&sp, &sp.standard_grid()).unwrap();
            assert!(r < 1e-10, "{}: {r:e}", sp.name());
        }
        let o = lookup("oscillator-3d").unwrap();
        assert!(check_riccati(&o, &numerics::log_spaced(0.1, 20.0, 100)).unwrap() < 1e-10);
        let s = lookup("scarf1").unwrap();
        assert!(check_riccati(&s, &numerics::uniform(-1.4, 1.4, 100)).unwrap() < 1e-10);
    }

    #[test]
    fn perturbed_f1_breaks_riccati() {
        for name in ["oscillator-3d", "scarf1", "eckart", "poschl-teller"] {
            let sp = lookup(name).unwrap().perturb_f1(0.01);
            let r = check_riccati(&sp, &sp.standard_grid()).unwrap();
            assert!(r > 1e-3, "{name}: {r:e}");
        }
    }

    #[test]
    fn oscillator_matches_particular_solution_form() {
        let sp = osc(-3.0);
        for x in sp.standard_grid() {
            let closed = 0.5 * x + 3.0 / x;
            let split = sp.a() * sp.f1(x) + 0.5 * sp.epsilon() / sp.f1(x);
            let w = sp.evaluate_w(x).unwrap();
            assert!((w - closed).abs() <= 1e-12 * closed.abs());
            assert!((w - split).abs() <= 1e-12 * closed.abs());
        }
    }

    #[test]
    fn json_round_trip_and_infinite_endpoints() {
        let sp = lookup("poschl-teller").unwrap();
        let text = serde_json::to_string(&sp).unwrap();
        assert!(text.contains("\"xR\":\"+inf\""), "{text}");
        let back: SuperpotentialInstance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sp);

        let doc = r#"{"name":"neg","tag":"IIIB_pos_lambda_unbounded",
            "params":{"a":2.0,"B":1.0,"lambda":1.0,"hbar":1.0},
            "domain":{"xL":"-inf","xR":0}}"#;
        let neg: SuperpotentialInstance = serde_json::from_str(doc).unwrap();
        assert!(neg.f1_positive_branch());
        assert!(neg.f1(-0.5) > 0.0);

        let wrong = r#"{"name":"x","tag":"IIIA","params":{"a":1,"omega":1},
            "domain":{"xL":"-inf","xR":"+inf"}}"#;
        assert!(serde_json::from_str::<SuperpotentialInstance>(wrong).is_err());
    }

    #[test]
    fn sibling_lookup() {
        assert_eq!(sibling("oscillator-3d").unwrap().name(), "oscillator-3d-unbroken");
        assert_eq!(sibling("morse").unwrap().name(), "morse-broken");
        assert_eq!(sibling("morse-broken").unwrap().name(), "morse");
        assert!(sibling("harmonic").is_none());
    }
}
