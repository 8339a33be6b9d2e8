//! The three-stage curation flow: solve, extract KPs, review for leakage.

use crate::answer::AnswerMatcher;
use crate::config::EndpointConfig;
use crate::error::{PipelineError, PipelineResult};
use crate::template::{emit_prompt, render, EXTRACTION_TEMPLATE, LEAKAGE_TEMPLATE};
use crate::transport::{send_with_retry, ChatRequest, ChatTransport};
use kphint_core::{KnowledgePoint, KpStatus, Problem};
use kphint_store::Store;
use serde::{Deserialize, Serialize};

/// Review outcome for one KP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageVerdict {
    pub problem_id: String,
    pub kp_index: u32,
    pub strongly_coupled: bool,
    pub reason: String,
}

/// Samples unhinted completions until one matches the gold answer.
/// Returns the winning response text and the number of attempts spent.
pub fn generate_solution(
    problem: &Problem,
    transport: &dyn ChatTransport,
    endpoint: &EndpointConfig,
    matcher: &dyn AnswerMatcher,
    max_attempts: u32,
) -> PipelineResult<(String, u32)> {
    let prompt = emit_prompt(problem, "");
    for attempt in 1..=max_attempts {
        let tag = format!("{}|solve|{attempt}", problem.id);
        let request = ChatRequest::user(endpoint, prompt.clone());
        let response = send_with_retry(transport, endpoint, &tag, &request)?;
        if matcher.matches(&response, &problem.gold_answer) {
            return Ok((response, attempt));
        }
    }
    Err(PipelineError::Unsolved {
        problem_id: problem.id.clone(),
        attempts: max_attempts,
    })
}

/// Prompts for the indispensable knowledge behind a verified solution and
/// parses the numbered (a)/(b) reply into raw KPs indexed from 0.
pub fn extract_kps(
    problem: &Problem,
    solution: &str,
    transport: &dyn ChatTransport,
    endpoint: &EndpointConfig,
) -> PipelineResult<Vec<KnowledgePoint>> {
    let prompt = render(
        EXTRACTION_TEMPLATE,
        &[("question", &problem.statement), ("solution", solution)],
    );
    let tag = format!("{}|extract", problem.id);
    let request = ChatRequest::user(endpoint, prompt);
    let reply = send_with_retry(transport, endpoint, &tag, &request)?;
    let items = parse_numbered_items(&reply).map_err(|message| PipelineError::ExtractionParse {
        problem_id: problem.id.clone(),
        message,
        raw: reply.clone(),
    })?;
    Ok(items
        .into_iter()
        .enumerate()
        .map(|(i, (knowledge, considerations))| KnowledgePoint {
            problem_id: problem.id.clone(),
            index: i as u32,
            knowledge,
            considerations,
            status: KpStatus::Raw,
        })
        .collect())
}

/// Parses a numbered list whose items carry an `(a)` knowledge part and a
/// `(b)` considerations part. Line breaks inside a part are joined with
/// single spaces.
fn parse_numbered_items(reply: &str) -> Result<Vec<(String, String)>, String> {
    let mut items: Vec<Vec<&str>> = Vec::new();
    for line in reply.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if item_number(trimmed) == Some(items.len() + 1) {
            items.push(vec![trimmed]);
        } else if let Some(current) = items.last_mut() {
            current.push(trimmed);
        } else {
            return Err(format!("text before item 1: {trimmed}"));
        }
    }
    if items.is_empty() {
        return Err("no numbered items found".into());
    }
    items
        .iter()
        .enumerate()
        .map(|(i, lines)| split_item(i + 1, &lines.join(" ")))
        .collect()
}

/// Leading list number of a line shaped like `3. ...` or `3) ...`.
fn item_number(line: &str) -> Option<usize> {
    let end = line.find(['.', ')'])?;
    if end == 0 || !line[..end].chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    line[..end].parse().ok()
}

fn split_item(number: usize, text: &str) -> Result<(String, String), String> {
    let body = {
        let after_number = text.find(['.', ')']).map(|i| &text[i + 1..]).unwrap_or(text);
        after_number.trim()
    };
    let a = body
        .find("(a)")
        .ok_or_else(|| format!("item {number} missing part (a)"))?;
    let b = body[a..]
        .find("(b)")
        .map(|i| a + i)
        .ok_or_else(|| format!("item {number} missing part (b)"))?;
    let knowledge = body[a + 3..b].trim().to_string();
    let considerations = body[b + 3..].trim().to_string();
    if knowledge.is_empty() {
        return Err(format!("item {number} has an empty part (a)"));
    }
    if considerations.is_empty() {
        return Err(format!("item {number} has an empty part (b)"));
    }
    Ok((knowledge, considerations))
}

/// Asks the reviewer whether one KP is strongly coupled to its problem and
/// parses the structured verdict from the first balanced brace block.
pub fn verify_leakage(
    problem: &Problem,
    kp: &KnowledgePoint,
    transport: &dyn ChatTransport,
    endpoint: &EndpointConfig,
) -> PipelineResult<LeakageVerdict> {
    let prompt = render(
        LEAKAGE_TEMPLATE,
        &[("question", &problem.statement), ("knowledge", &kp.knowledge)],
    );
    let tag = format!("{}|leakage|{}", problem.id, kp.index);
    let request = ChatRequest::user(endpoint, prompt);
    let reply = send_with_retry(transport, endpoint, &tag, &request)?;
    let parse_err = |message: String| PipelineError::VerdictParse {
        problem_id: problem.id.clone(),
        kp_index: kp.index,
        message,
        raw: reply.clone(),
    };

    #[derive(Deserialize)]
    struct Reply {
        strongly_coupled: bool,
        #[serde(default)]
        reason: String,
    }

    let block = first_balanced_block(&reply)
        .ok_or_else(|| parse_err("no balanced {...} block in reply".into()))?;
    let parsed: Reply = serde_json::from_str(block).map_err(|e| parse_err(e.to_string()))?;
    Ok(LeakageVerdict {
        problem_id: problem.id.clone(),
        kp_index: kp.index,
        strongly_coupled: parsed.strongly_coupled,
        reason: parsed.reason,
    })
}

/// First top-level `{...}` span, tracking string literals so braces inside
/// quoted text do not close the block.
fn first_balanced_block(text: &str) -> Option<&str> {
    let start = text.find('{')?;
    let mut depth = 0u32;
    let mut in_string = false;
    let mut escaped = false;
    for (offset, ch) in text[start..].char_indices() {
        if in_string {
            match ch {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match ch {
            '"' => in_string = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&text[start..start + offset + ch.len_utf8()]);
                }
            }
            _ => {}
        }
    }
    None
}

/// Per-problem result of the full three-stage flow.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurationOutcome {
    pub problem_id: String,
    /// Attempts stage 1 spent; 0 when a reference solution already existed.
    pub solve_attempts: u32,
    pub kps_extracted: usize,
    pub verified: usize,
    pub needs_revision: usize,
}

/// Runs solve, extract, and review for one problem, persisting the
/// reference solution and the reviewed KPs into the store.
pub fn curate_problem(
    store: &Store,
    problem_id: &str,
    transport: &dyn ChatTransport,
    endpoint: &EndpointConfig,
    matcher: &dyn AnswerMatcher,
    max_attempts: u32,
) -> PipelineResult<CurationOutcome> {
    let mut problem = store
        .problem(problem_id)
        .ok_or_else(|| PipelineError::UnknownProblem {
            id: problem_id.to_string(),
        })?;

    let (solution, solve_attempts) = match &problem.reference_solution {
        Some(existing) => (existing.clone(), 0),
        None => {
            let (solution, attempts) =
                generate_solution(&problem, transport, endpoint, matcher, max_attempts)?;
            problem.reference_solution = Some(solution.clone());
            store.put_problem(problem.clone());
            (solution, attempts)
        }
    };

    let mut kps = extract_kps(&problem, &solution, transport, endpoint)?;
    let mut verified = 0;
    let mut needs_revision = 0;
    for kp in &mut kps {
        let verdict = verify_leakage(&problem, kp, transport, endpoint)?;
        kp.status = if verdict.strongly_coupled {
            needs_revision += 1;
            KpStatus::NeedsRevision
        } else {
            verified += 1;
            KpStatus::Verified
        };
    }
    let kps_extracted = kps.len();
    store.put_kps(problem_id, kps)?;
    Ok(CurationOutcome {
        problem_id: problem_id.to_string(),
        solve_attempts,
        kps_extracted,
        verified,
        needs_revision,
    })
}
