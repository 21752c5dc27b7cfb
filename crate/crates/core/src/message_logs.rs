//! Duplicate suppression for TC messages: which `(originator, sqn)` pairs
//! have been processed and which have been received for forwarding.

use std::collections::BTreeSet;

use crate::types::{NodeId, Sqn};

/// A set of `(originator, sqn)` pairs. Entries never expire.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MessageLog(BTreeSet<(NodeId, Sqn)>);

/// Pairs already applied to the topology.
pub type ProcessedSet = MessageLog;
/// Pairs already considered for forwarding.
pub type ReceivedSet = MessageLog;

impl MessageLog {
    pub fn contains(&self, oip: &NodeId, sqn: Sqn) -> bool {
        self.0.contains(&(oip.clone(), sqn))
    }

    /// Returns a log that also contains `(oip, sqn)`.
    pub fn with(&self, oip: &NodeId, sqn: Sqn) -> MessageLog {
        let mut out = self.clone();
        out.insert(oip, sqn);
        out
    }

    /// Returns whether the pair was new.
    pub fn insert(&mut self, oip: &NodeId, sqn: Sqn) -> bool {
        self.0.insert((oip.clone(), sqn))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(NodeId, Sqn)> {
        self.0.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership() {
        let a = NodeId::from("A");
        let log = MessageLog::default().with(&a, 3);
        assert!(log.contains(&a, 3));
        assert!(!log.contains(&a, 4));
        assert!(!log.contains(&NodeId::from("B"), 3));
        assert_eq!(log.with(&a, 3), log);
    }
}
