//! Prompt templates and hint-block emission.
//!
//! The three templates are stored as literal assets. Rendering substitutes
//! only the declared `{name}` placeholders; everything else, including
//! brace characters, passes through untouched.

use crate::error::{PipelineError, PipelineResult};
use kphint_core::{KnowledgePoint, Problem};

/// Template for extracting knowledge points from a verified solution.
/// Placeholders: `{question}`, `{solution}`.
pub const EXTRACTION_TEMPLATE: &str = include_str!("../assets/extract_kps.txt");

/// Template for the strong-coupling (leakage) review of one KP.
/// Placeholders: `{question}`, `{knowledge}`.
pub const LEAKAGE_TEMPLATE: &str = include_str!("../assets/leakage_check.txt");

/// Skeleton of the hint-augmented prompt. Placeholders: `{question}`,
/// `{hint}`. `emit_prompt` additionally drops the hint section entirely
/// when the hint is empty.
pub const PROMPT_SKELETON: &str = include_str!("../assets/prompt_skeleton.txt");

const CLOSING_INSTRUCTION: &str =
    "Please reason step by step, and put your final answer within \\boxed{}.";
const HINT_HEADER: &str = "## Hint";
const KNOWLEDGE_MARKER: &str = "**Knowledge Point**: ";
const CONSIDERATIONS_MARKER: &str = "**Key Considerations**: ";

/// Replaces each `{name}` placeholder with its value. Only the given
/// names are substituted.
pub fn render(template: &str, substitutions: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (name, value) in substitutions {
        out = out.replace(&format!("{{{name}}}"), value);
    }
    out
}

/// Formats final KPs as the hint block: a `## Hint` header, then per KP a
/// numbered knowledge line and a considerations line. Empty input yields
/// an empty string with no header.
pub fn emit_hint_block(kps: &[KnowledgePoint]) -> PipelineResult<String> {
    if kps.is_empty() {
        return Ok(String::new());
    }
    let mut lines = vec![HINT_HEADER.to_string()];
    for (pos, kp) in kps.iter().enumerate() {
        if !kp.status.is_final() {
            return Err(PipelineError::NonFinalKp {
                problem_id: kp.problem_id.clone(),
                index: kp.index,
            });
        }
        lines.push(format!("{}. {}{}", pos + 1, KNOWLEDGE_MARKER, kp.knowledge));
        lines.push(format!("{}{}", CONSIDERATIONS_MARKER, kp.considerations));
    }
    Ok(lines.join("\n"))
}

/// Inverse of `emit_hint_block` for its own output. Lines that start
/// neither a numbered knowledge entry nor a considerations entry continue
/// the preceding field.
pub fn parse_hint_block(block: &str) -> PipelineResult<Vec<(String, String)>> {
    let bad = |message: String| PipelineError::HintParse { message };
    if block.is_empty() {
        return Ok(Vec::new());
    }
    let mut lines = block.lines();
    if lines.next() != Some(HINT_HEADER) {
        return Err(bad(format!("missing {HINT_HEADER} header")));
    }
    let mut items: Vec<(String, String)> = Vec::new();
    let mut in_considerations = false;
    for line in lines {
        if let Some(rest) = knowledge_entry(line) {
            if !items.is_empty() && !in_considerations {
                return Err(bad(format!(
                    "item {} has no considerations line",
                    items.len()
                )));
            }
            let number = items.len() + 1;
            if !line.starts_with(&format!("{number}. ")) {
                return Err(bad(format!("expected item {number}, got: {line}")));
            }
            items.push((rest.to_string(), String::new()));
            in_considerations = false;
        } else if !in_considerations && line.starts_with(CONSIDERATIONS_MARKER) {
            let rest = &line[CONSIDERATIONS_MARKER.len()..];
            let item = items
                .last_mut()
                .ok_or_else(|| bad("considerations before any knowledge entry".into()))?;
            item.1 = rest.to_string();
            in_considerations = true;
        } else {
            let item = items
                .last_mut()
                .ok_or_else(|| bad(format!("unexpected line: {line}")))?;
            let field = if in_considerations { &mut item.1 } else { &mut item.0 };
            field.push('\n');
            field.push_str(line);
        }
    }
    if items.is_empty() {
        return Err(bad("no items after the header".into()));
    }
    if !in_considerations {
        return Err(bad(format!(
            "item {} has no considerations line",
            items.len()
        )));
    }
    Ok(items)
}

fn knowledge_entry(line: &str) -> Option<&str> {
    let dot = line.find(". ")?;
    if !line[..dot].chars().all(|c| c.is_ascii_digit()) || dot == 0 {
        return None;
    }
    line[dot + 2..].strip_prefix(KNOWLEDGE_MARKER)
}

/// Statement, optional hint block, and the closing instruction, each
/// separated by one blank line. An empty hint omits the section entirely.
pub fn emit_prompt(problem: &Problem, hint_block: &str) -> String {
    if hint_block.is_empty() {
        format!("{}\n\n{}", problem.statement, CLOSING_INSTRUCTION)
    } else {
        format!("{}\n\n{}\n\n{}", problem.statement, hint_block, CLOSING_INSTRUCTION)
    }
}
