use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use langbar_core::{BoundTool, Clock, CompositionError};
use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};

/// Default capacity of the GUI event ring.
pub const DEFAULT_EVENT_CAPACITY: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuiEventKind {
    Navigation,
    ParameterEdit,
    UserClick,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuiEvent {
    pub timestamp: u64,
    pub kind: GuiEventKind,
    pub screen_id: String,
    pub detail: String,
}

/// An immutable generation of published tools.
#[derive(Debug, Default)]
pub struct ToolSet {
    pub generation: u64,
    tools: Vec<BoundTool>,
    index: HashMap<String, usize>,
}

impl ToolSet {
    pub fn tools(&self) -> &[BoundTool] {
        &self.tools
    }

    pub fn get(&self, name: &str) -> Option<&BoundTool> {
        self.index.get(name).map(|&i| &self.tools[i])
    }

    pub fn len(&self) -> usize {
        self.tools.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }
}

/// Current tool set plus a bounded ring of GUI events.
///
/// The tool set is swapped wholesale; readers hold an `Arc` to the
/// generation they looked up and never see a mixture.
pub struct SessionRegistry {
    current: RwLock<Arc<ToolSet>>,
    events: Mutex<VecDeque<GuiEvent>>,
    capacity: usize,
    clock: Arc<dyn Clock>,
}

impl SessionRegistry {
    pub fn new(clock: Arc<dyn Clock>) -> Self {
        Self::with_capacity(clock, DEFAULT_EVENT_CAPACITY)
    }

    pub fn with_capacity(clock: Arc<dyn Clock>, capacity: usize) -> Self {
        Self {
            current: RwLock::new(Arc::new(ToolSet::default())),
            events: Mutex::new(VecDeque::with_capacity(capacity)),
            capacity: capacity.max(1),
            clock,
        }
    }

    pub fn current(&self) -> Arc<ToolSet> {
        self.current.read().clone()
    }

    pub fn generation(&self) -> u64 {
        self.current.read().generation
    }

    /// Swaps in a new tool set. Duplicate names are rejected and the old
    /// set is kept.
    pub fn replace_tools(&self, tools: Vec<BoundTool>) -> Result<u64, CompositionError> {
        let mut index = HashMap::with_capacity(tools.len());
        for (i, t) in tools.iter().enumerate() {
            if let Some(&j) = index.get(t.name()) {
                let first: &BoundTool = &tools[j];
                return Err(CompositionError {
                    name: t.name().to_string(),
                    first_owner: first.owner.clone(),
                    second_owner: t.owner.clone(),
                });
            }
            index.insert(t.name().to_string(), i);
        }
        let mut guard = self.current.write();
        let generation = guard.generation + 1;
        *guard = Arc::new(ToolSet {
            generation,
            tools,
            index,
        });
        Ok(generation)
    }

    pub fn record(&self, kind: GuiEventKind, screen_id: impl Into<String>, detail: impl Into<String>) {
        let mut events = self.events.lock();
        let now = self.clock.now_ms();
        let timestamp = events.back().map_or(now, |last| now.max(last.timestamp));
        if events.len() == self.capacity {
            events.pop_front();
        }
        events.push_back(GuiEvent {
            timestamp,
            kind,
            screen_id: screen_id.into(),
            detail: detail.into(),
        });
    }

    /// Ring contents, oldest first.
    pub fn events(&self) -> Vec<GuiEvent> {
        self.events.lock().iter().cloned().collect()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}
