//! Lossless, zero-latency message bus. Payloads travel in their wire form so
//! every exchange goes through the same encoders a real link would use.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadKind {
    StateReport,
    GuidanceBroadcast,
    TrajectoryShare,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BusMessage {
    pub sender: usize,
    pub cycle: u64,
    pub kind: PayloadKind,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Default)]
pub struct Bus {
    pending: Vec<BusMessage>,
    bytes_sent: usize,
}

impl Bus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn send(&mut self, sender: usize, cycle: u64, kind: PayloadKind, bytes: Vec<u8>) {
        self.bytes_sent += bytes.len();
        self.pending.push(BusMessage {
            sender,
            cycle,
            kind,
            bytes,
        });
    }

    /// Removes and returns all pending messages of `kind`, in send order.
    pub fn take(&mut self, kind: PayloadKind) -> Vec<BusMessage> {
        let (taken, rest): (Vec<_>, Vec<_>) = std::mem::take(&mut self.pending).into_iter().partition(|m| m.kind == kind);
        self.pending = rest;
        taken
    }

    pub fn bytes_sent(&self) -> usize {
        self.bytes_sent
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn take_filters_and_preserves_order() {
        let mut bus = Bus::new();
        bus.send(1, 0, PayloadKind::StateReport, vec![1]);
        bus.send(0, 0, PayloadKind::GuidanceBroadcast, vec![2, 3]);
        bus.send(2, 0, PayloadKind::StateReport, vec![4]);
        let reports = bus.take(PayloadKind::StateReport);
        assert_eq!(reports.iter().map(|m| m.sender).collect::<Vec<_>>(), vec![1, 2]);
        assert!(!bus.is_empty());
        assert_eq!(bus.take(PayloadKind::GuidanceBroadcast).len(), 1);
        assert!(bus.is_empty());
        assert_eq!(bus.bytes_sent(), 4);
    }
}
