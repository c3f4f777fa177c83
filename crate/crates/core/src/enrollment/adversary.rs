use std::collections::BTreeMap;

use rand::Rng;

use crate::cert::Role;
use crate::enrollment::channel::{ChannelKind, ChannelMessage};
use crate::rng::SeedSource;

/// Network adversary on every simulated hop. It draws from its own seeded
/// stream, so with every flag off a run is byte-identical to one without an
/// adversary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdversaryConfig {
    /// Passive observation; counts messages into `observed`.
    pub eavesdrop: bool,
    /// Per-hop probability of flipping one byte of the serialized message.
    pub modify_probability: f64,
    /// Restricts modification to one channel kind; `None` means both.
    pub modify_channel: Option<ChannelKind>,
    /// Re-injects the previous message of a link ahead of the next one.
    pub replay: bool,
    pub record_for_later: bool,
    /// Swaps the frontend chain for an impostor chain with the same
    /// subject names and a recomputed integrity tag.
    pub substitute_frontend: bool,
    pub random_seed: u64,
    pub recorded_log: Vec<Vec<u8>>,
    pub observed: usize,
}

impl AdversaryConfig {
    pub fn passive() -> Self {
        Self::default()
    }

    pub fn is_active(&self) -> bool {
        self.modify_probability > 0.0 || self.replay || self.substitute_frontend
    }
}

/// Per-run adversary state.
pub(crate) struct Interceptor<'a> {
    pub(crate) config: &'a mut AdversaryConfig,
    rng: SeedSource,
    last_on_link: BTreeMap<(Role, Role), Vec<u8>>,
    replayed: bool,
}

impl<'a> Interceptor<'a> {
    pub(crate) fn new(config: &'a mut AdversaryConfig) -> Self {
        let rng = SeedSource::from_u64(config.random_seed);
        Self { config, rng, last_on_link: BTreeMap::new(), replayed: false }
    }

    /// Returns the byte strings actually delivered, in order.
    /// `substitute` rewrites a message before any other tampering.
    pub(crate) fn intercept(
        &mut self,
        msg: &ChannelMessage,
        substitute: impl FnOnce(&mut SeedSource, &ChannelMessage) -> Option<ChannelMessage>,
    ) -> Vec<Vec<u8>> {
        let mut bytes = msg.encode();
        if self.config.eavesdrop {
            self.config.observed += 1;
        }
        if self.config.record_for_later {
            self.config.recorded_log.push(bytes.clone());
        }
        if self.config.substitute_frontend {
            if let Some(fake) = substitute(&mut self.rng, msg) {
                bytes = fake.encode();
            }
        }
        let targeted = self.config.modify_channel.is_none_or(|k| k == msg.channel_kind);
        if self.config.modify_probability > 0.0 && targeted && self.rng.gen::<f64>() < self.config.modify_probability {
            let at = self.rng.gen_range(0..bytes.len());
            bytes[at] ^= self.rng.gen_range(1..=255u8);
        }
        let link = (msg.sender, msg.receiver);
        let mut delivered = Vec::with_capacity(2);
        if self.config.replay && !self.replayed {
            if let Some(old) = self.last_on_link.get(&link) {
                delivered.push(old.clone());
                self.replayed = true;
            }
        }
        self.last_on_link.insert(link, bytes.clone());
        delivered.push(bytes);
        delivered
    }
}
