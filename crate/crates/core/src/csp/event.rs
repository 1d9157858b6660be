use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::{Name, Value};

/// The fixed family of channels the translation produces. `Custom` is for hand-built terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ChannelBase {
    Ce,
    Oe,
    Update,
    Clear,
    EndDiagram,
    StartActivity,
    EndActivity,
    Signal,
    Behavior,
    Dc,
    Get,
    Set,
    Sysdone,
    /// Token count exceeded the configured bound (strict mode only).
    Overflow,
    Custom(Name),
}

impl ChannelBase {
    pub fn as_str(&self) -> &str {
        match self {
            ChannelBase::Ce => "ce",
            ChannelBase::Oe => "oe",
            ChannelBase::Update => "update",
            ChannelBase::Clear => "clear",
            ChannelBase::EndDiagram => "endDiagram",
            ChannelBase::StartActivity => "startActivity",
            ChannelBase::EndActivity => "endActivity",
            ChannelBase::Signal => "signal",
            ChannelBase::Behavior => "behavior",
            ChannelBase::Dc => "dc",
            ChannelBase::Get => "get",
            ChannelBase::Set => "set",
            ChannelBase::Sysdone => "sysdone",
            ChannelBase::Overflow => "overflow",
            ChannelBase::Custom(n) => n,
        }
    }

    /// Parses a base name as used by the visibility flags.
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ce" => ChannelBase::Ce,
            "oe" => ChannelBase::Oe,
            "update" => ChannelBase::Update,
            "clear" => ChannelBase::Clear,
            "endDiagram" => ChannelBase::EndDiagram,
            "startActivity" => ChannelBase::StartActivity,
            "endActivity" => ChannelBase::EndActivity,
            "signal" => ChannelBase::Signal,
            "behavior" => ChannelBase::Behavior,
            "dc" => ChannelBase::Dc,
            "get" => ChannelBase::Get,
            "set" => ChannelBase::Set,
            "sysdone" => ChannelBase::Sysdone,
            "overflow" => ChannelBase::Overflow,
            _ => return None,
        })
    }
}

/// A channel: base plus optional node (or signal) and activity qualifiers.
/// Renders as `<base>[_<node>][_<activity>]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChannelName {
    pub base: ChannelBase,
    pub node: Option<Name>,
    pub activity: Option<Name>,
}

impl ChannelName {
    pub fn new(base: ChannelBase, node: Option<&str>, activity: Option<&str>) -> Self {
        ChannelName {
            base,
            node: node.map(Into::into),
            activity: activity.map(Into::into),
        }
    }

    pub fn simple(base: ChannelBase) -> Self {
        ChannelName {
            base,
            node: None,
            activity: None,
        }
    }

    pub fn custom(name: &str) -> Self {
        Self::simple(ChannelBase::Custom(name.into()))
    }
}

impl Ord for ChannelName {
    fn cmp(&self, other: &Self) -> Ordering {
        self.base
            .as_str()
            .cmp(other.base.as_str())
            .then_with(|| self.node.cmp(&other.node))
            .then_with(|| self.activity.cmp(&other.activity))
    }
}

impl PartialOrd for ChannelName {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ChannelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base.as_str())?;
        if let Some(n) = &self.node {
            write!(f, "_{n}")?;
        }
        if let Some(a) = &self.activity {
            write!(f, "_{a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VisibleEvent {
    pub channel: ChannelName,
    pub values: Vec<Value>,
}

/// A communication label. Ordered visible-first (by channel then values), then tick, then tau.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    Visible(Arc<VisibleEvent>),
    Tick,
    Tau,
}

impl Event {
    pub fn new(channel: ChannelName, values: Vec<Value>) -> Self {
        Event::Visible(Arc::new(VisibleEvent { channel, values }))
    }

    pub fn named(name: &str) -> Self {
        Self::new(ChannelName::custom(name), Vec::new())
    }

    pub fn visible(&self) -> Option<&VisibleEvent> {
        match self {
            Event::Visible(v) => Some(v),
            _ => None,
        }
    }

    pub fn channel(&self) -> Option<&ChannelName> {
        self.visible().map(|v| &v.channel)
    }

    pub fn is_visible(&self) -> bool {
        matches!(self, Event::Visible(_))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Tau => f.write_str("tau"),
            Event::Tick => f.write_str("tick"),
            Event::Visible(v) => {
                write!(f, "{}", v.channel)?;
                for val in &v.values {
                    write!(f, ".{val}")?;
                }
                Ok(())
            }
        }
    }
}

/// A set of visible events described by productions: a channel together with a value
/// prefix. An empty prefix covers every event on the channel.
#[derive(Clone)]
pub struct EventSet(Arc<EventSetInner>);

struct EventSetInner {
    hash: u64,
    prods: BTreeMap<ChannelName, Vec<Vec<Value>>>,
}

impl EventSet {
    pub fn new(prods: impl IntoIterator<Item = (ChannelName, Vec<Value>)>) -> Self {
        let mut map: BTreeMap<ChannelName, Vec<Vec<Value>>> = BTreeMap::new();
        for (c, p) in prods {
            map.entry(c).or_default().push(p);
        }
        for v in map.values_mut() {
            v.sort();
            v.dedup();
            if v.iter().any(Vec::is_empty) {
                v.retain(Vec::is_empty);
            }
        }
        let mut h = std::hash::DefaultHasher::new();
        for (c, ps) in &map {
            c.hash(&mut h);
            ps.hash(&mut h);
        }
        EventSet(Arc::new(EventSetInner {
            hash: h.finish(),
            prods: map,
        }))
    }

    pub fn empty() -> Self {
        Self::new(std::iter::empty())
    }

    /// Whole-channel productions for each channel.
    pub fn channels(chans: impl IntoIterator<Item = ChannelName>) -> Self {
        Self::new(chans.into_iter().map(|c| (c, Vec::new())))
    }

    pub fn events<'a>(events: impl IntoIterator<Item = &'a Event>) -> Self {
        Self::new(
            events
                .into_iter()
                .filter_map(|e| e.visible().map(|v| (v.channel.clone(), v.values.clone()))),
        )
    }

    pub fn contains(&self, e: &Event) -> bool {
        match e {
            Event::Visible(v) => self
                .0
                .prods
                .get(&v.channel)
                .is_some_and(|ps| ps.iter().any(|p| v.values.starts_with(p))),
            _ => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.prods.is_empty()
    }

    pub fn productions(&self) -> impl Iterator<Item = (&ChannelName, &[Value])> {
        self.0
            .prods
            .iter()
            .flat_map(|(c, ps)| ps.iter().map(move |p| (c, p.as_slice())))
    }
}

impl PartialEq for EventSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash && self.0.prods == other.0.prods)
    }
}

impl Eq for EventSet {}

impl Hash for EventSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{|")?;
        for (i, (c, p)) in self.productions().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
            for v in p {
                super::print::write_value(f, v)?;
            }
        }
        f.write_str("|}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ce(act: &str, i: i64) -> Event {
        Event::new(
            ChannelName::new(ChannelBase::Ce, None, Some(act)),
            vec![Value::Int(i)],
        )
    }

    #[test]
    fn channel_naming_scheme() {
        let c = ChannelName::new(ChannelBase::Behavior, Some("act1"), Some("ad"));
        assert_eq!(c.to_string(), "behavior_act1_ad");
        assert_eq!(ce("ad", 1).to_string(), "ce_ad.1");
    }

    #[test]
    fn prefix_membership() {
        let oe = ChannelName::new(ChannelBase::Oe, None, Some("ad"));
        let s = EventSet::new([(oe.clone(), vec![Value::Int(3)])]);
        assert!(s.contains(&Event::new(oe.clone(), vec![Value::Int(3), Value::Bool(true)])));
        assert!(!s.contains(&Event::new(oe, vec![Value::Int(4), Value::Bool(true)])));
        assert!(!s.contains(&Event::Tau));
    }

    #[test]
    fn whole_channel_production_absorbs_prefixes() {
        let c = ChannelName::new(ChannelBase::Ce, None, Some("ad"));
        let a = EventSet::new([(c.clone(), vec![Value::Int(1)]), (c.clone(), vec![])]);
        let b = EventSet::channels([c]);
        assert_eq!(a, b);
    }

    #[test]
    fn event_order_is_by_channel_then_values() {
        let mut evs = [Event::Tau, ce("ad", 2), Event::Tick, ce("ad", 1), Event::named("behavior")];
        evs.sort();
        let names: Vec<String> = evs.iter().map(|e| e.to_string()).collect();
        assert_eq!(names, vec!["behavior", "ce_ad.1", "ce_ad.2", "tick", "tau"]);
    }
}
