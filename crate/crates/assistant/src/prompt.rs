use std::fmt;
use std::str::FromStr;

use langbar_core::{ToolSpec, ViewContext};
use serde::{Deserialize, Serialize};

use crate::history::ConversationEntry;
use crate::wire::{ChatMessage, ChatRequest, ToolDef};

pub const EN_SYSTEM_PROMPT: &str = include_str!("../prompts/en.txt");
pub const NL_SYSTEM_PROMPT: &str = include_str!("../prompts/nl.txt");

pub const OUTPUT_CONTRACT: &str = "Respond only with tool calls.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    #[default]
    En,
    Nl,
}

impl Language {
    pub fn system_prompt(self) -> &'static str {
        match self {
            Language::En => EN_SYSTEM_PROMPT,
            Language::Nl => NL_SYSTEM_PROMPT,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::Nl => "nl",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(Language::En),
            "nl" => Ok(Language::Nl),
            other => Err(format!("unknown language `{other}` (expected en or nl)")),
        }
    }
}

/// Everything sent to the model for one turn.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PromptBundle {
    pub system_prompt: String,
    /// Conversation so far, ending with the current user utterance.
    pub history: Vec<ConversationEntry>,
    pub tools: Vec<ToolSpec>,
    pub screen_parameters: ViewContext,
    /// Screen text of the active view.
    pub screen_text: String,
    pub output_contract: String,
}

impl PromptBundle {
    fn context_message(&self) -> ChatMessage {
        ChatMessage::system(format!(
            "Current screen: {}\n{}\n\n{}",
            self.screen_parameters.screen_id, self.screen_text, self.output_contract
        ))
    }

    /// Conversation messages without tools.
    pub fn messages(&self) -> Vec<ChatMessage> {
        let mut messages = vec![ChatMessage::system(self.system_prompt.clone()), self.context_message()];
        messages.extend(crate::history::to_messages(&self.history));
        messages
    }

    pub fn to_request(&self, model: &str) -> ChatRequest {
        ChatRequest::new(model, self.messages()).with_tools(self.tools.iter().map(ToolDef::from_spec).collect())
    }
}
