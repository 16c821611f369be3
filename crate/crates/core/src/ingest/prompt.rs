use serde::{Deserialize, Serialize};

use super::{IngestError, NaturalLanguageSpec};

/// System block of the schema-generation prompt (CO-STAR layout).
pub const SYSTEM_PROMPT: &str = "# CONTEXT #
You are a tool called PDDL Modeling Assistant. You are a technical experts in constructing Planning Domain Definition Language (PDDL) models via the natural language context.

# OBJECTIVE #
* Construct parameters, preconditions and effects based on the domain information, action description and the action name.
* All variables in the preconditions and effects must be listed in the action's parameters. This restriction helps maintain the action's scope and prevents ambiguity in the planning process.
* Do not use predicates that are not defined in the available predicates list to construct the preconditions and effects.
* When the natural language description is ambiguous or certain predicate changes are implied, make reasonable assumptions based on common sense to fill up the implicit predicate in the PDDL action.

# STYLE #
Follow the writing style of technical experts. The output can be parsed by a machine, so it is important to follow the structured format.

# TONE #
Be precise and concise in constructing the PDDL action. The PDDL action should be clear and unambiguous.

# AUDIENCE #
Your audience is someone who is trying to learn how to construct PDDL actions from natural language descriptions.

# RESPONSE #
The response should be in the following format:
---
**Explanation:** [Your explanation here]

**Response:**
Parameters:
1. ?x - [type]: [parameter description]
2. ...

Preconditions:
```
(and
    ([predicate_1] ?x)
)
```

Effects:
```
(and
    (not ([predicate_2] ?x))
    ([predicate_2] ?x)
    ...
)
```
---";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    fn new(role: &str, content: impl Into<String>) -> Self {
        ChatMessage {
            role: role.to_string(),
            content: content.into(),
        }
    }
}

/// One in-context query/answer pair taken from a training domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotExample {
    pub human: String,
    pub ai: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub action: String,
    pub messages: Vec<ChatMessage>,
}

impl Prompt {
    /// Flat transcript, the text that replay digests are computed over.
    pub fn text(&self) -> String {
        self.messages
            .iter()
            .map(|m| format!("{}: {}", m.role, m.content))
            .collect::<Vec<_>>()
            .join("\n\n")
    }

    /// The final user turn.
    pub fn human_turn(&self) -> &str {
        self.messages.last().map_or("", |m| m.content.as_str())
    }
}

pub fn render_prompt(
    spec: &NaturalLanguageSpec,
    action: &str,
    examples: &[FewShotExample],
) -> Result<Prompt, IngestError> {
    let description = spec
        .description(action)
        .ok_or_else(|| IngestError::UnknownAction(action.to_string()))?;
    let mut messages = vec![ChatMessage::new("system", SYSTEM_PROMPT)];
    for ex in examples {
        messages.push(ChatMessage::new("user", ex.human.trim_end()));
        messages.push(ChatMessage::new("assistant", ex.ai.trim_end()));
    }
    let human = format!(
        "Question: Here is the task.\n\
         A natural language description of the domain\n\
         Domain information: {}\n\n\
         A list of available predicates\n{}\n\n\
         Action Description: {}\n\n\
         Action name: {}",
        spec.domain_description.trim(),
        spec.predicate_list,
        description.trim(),
        action
    );
    messages.push(ChatMessage::new("user", human));
    Ok(Prompt {
        action: action.to_string(),
        messages,
    })
}
