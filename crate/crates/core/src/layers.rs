//! Exposure layer taxonomy and per-layer sign policies.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ten canonical interbank exposure layers, in their fixed index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CanonicalLayer {
    UnsecuredLending,
    SecuredLending,
    MarketableSecurities,
    CdsNetSold,
    SecuritiesFinancing,
    DerivIr,
    DerivFx,
    DerivCredit,
    DerivEquity,
    DerivCommodity,
}

impl CanonicalLayer {
    pub const ALL: [CanonicalLayer; 10] = [
        CanonicalLayer::UnsecuredLending,
        CanonicalLayer::SecuredLending,
        CanonicalLayer::MarketableSecurities,
        CanonicalLayer::CdsNetSold,
        CanonicalLayer::SecuritiesFinancing,
        CanonicalLayer::DerivIr,
        CanonicalLayer::DerivFx,
        CanonicalLayer::DerivCredit,
        CanonicalLayer::DerivEquity,
        CanonicalLayer::DerivCommodity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CanonicalLayer::UnsecuredLending => "UNSECURED_LENDING",
            CanonicalLayer::SecuredLending => "SECURED_LENDING",
            CanonicalLayer::MarketableSecurities => "MARKETABLE_SECURITIES",
            CanonicalLayer::CdsNetSold => "CDS_NET_SOLD",
            CanonicalLayer::SecuritiesFinancing => "SECURITIES_FINANCING",
            CanonicalLayer::DerivIr => "DERIV_IR",
            CanonicalLayer::DerivFx => "DERIV_FX",
            CanonicalLayer::DerivCredit => "DERIV_CREDIT",
            CanonicalLayer::DerivEquity => "DERIV_EQUITY",
            CanonicalLayer::DerivCommodity => "DERIV_COMMODITY",
        }
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&l| l == self).unwrap()
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name().eq_ignore_ascii_case(name.trim()))
    }

    /// Default sign handling: issuer-risk layers report signed positions.
    pub fn default_policy(self) -> SignRule {
        match self {
            CanonicalLayer::CdsNetSold => SignRule::ShortOnly,
            CanonicalLayer::MarketableSecurities => SignRule::LongOnly,
            _ => SignRule::NonnegativeOnly,
        }
    }
}

/// A canonical layer or a user-defined extension layer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LayerId {
    Canonical(CanonicalLayer),
    Custom(String),
}

impl LayerId {
    pub fn name(&self) -> &str {
        match self {
            LayerId::Canonical(c) => c.name(),
            LayerId::Custom(s) => s,
        }
    }
}

impl fmt::Display for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<CanonicalLayer> for LayerId {
    fn from(c: CanonicalLayer) -> Self {
        LayerId::Canonical(c)
    }
}

impl Serialize for LayerId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for LayerId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Ok(CanonicalLayer::from_name(&name).map_or(LayerId::Custom(name), LayerId::Canonical))
    }
}

/// Ordered set of layers known to a parser: the canonical ten first, then
/// registered extensions in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerTaxonomy {
    layers: Vec<LayerId>,
}

impl Default for LayerTaxonomy {
    fn default() -> Self {
        Self::canonical()
    }
}

impl LayerTaxonomy {
    pub fn canonical() -> Self {
        Self { layers: CanonicalLayer::ALL.into_iter().map(LayerId::Canonical).collect() }
    }

    pub fn with_extensions<I, S>(extensions: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut extra: Vec<String> = extensions.into_iter().map(Into::into).collect();
        for name in &extra {
            if name.trim().is_empty() || CanonicalLayer::from_name(name).is_some() {
                return Err(Error::InvalidParameter(format!("invalid extension layer name `{name}`")));
            }
        }
        extra.sort();
        extra.dedup();
        let mut tax = Self::canonical();
        tax.layers.extend(extra.into_iter().map(LayerId::Custom));
        Ok(tax)
    }

    pub fn layers(&self) -> &[LayerId] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn index_of(&self, layer: &LayerId) -> Option<usize> {
        self.layers.iter().position(|l| l == layer)
    }

    /// Case-insensitive lookup.
    pub fn resolve(&self, name: &str) -> Result<LayerId> {
        let name = name.trim();
        self.layers
            .iter()
            .find(|l| l.name().eq_ignore_ascii_case(name))
            .cloned()
            .ok_or_else(|| Error::UnknownLayer(name.to_string()))
    }
}

/// How signed amounts reported for a layer become non-negative weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SignRule {
    NonnegativeOnly,
    LongOnly,
    ShortOnly,
    Absolute,
}

impl SignRule {
    /// `Ok(None)` means the record carries no exposure and is dropped.
    pub fn apply(self, amount: f64, layer: &LayerId) -> Result<Option<f64>> {
        let v = match self {
            SignRule::NonnegativeOnly => {
                if amount < 0.0 {
                    return Err(Error::NegativeAmount { layer: layer.to_string(), amount });
                }
                amount
            }
            SignRule::LongOnly => amount.max(0.0),
            SignRule::ShortOnly => (-amount).max(0.0),
            SignRule::Absolute => amount.abs(),
        };
        Ok((v > 0.0).then_some(v))
    }
}

/// Per-layer sign rules. Layers without an override use the canonical default
/// (extension layers default to [`SignRule::NonnegativeOnly`]).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SignPolicy {
    overrides: Vec<(LayerId, SignRule)>,
}

impl SignPolicy {
    pub fn with_override(mut self, layer: LayerId, rule: SignRule) -> Self {
        self.overrides.retain(|(l, _)| *l != layer);
        self.overrides.push((layer, rule));
        self
    }

    pub fn rule_for(&self, layer: &LayerId) -> SignRule {
        if let Some((_, r)) = self.overrides.iter().find(|(l, _)| l == layer) {
            return *r;
        }
        match layer {
            LayerId::Canonical(c) => c.default_policy(),
            LayerId::Custom(_) => SignRule::NonnegativeOnly,
        }
    }
}
