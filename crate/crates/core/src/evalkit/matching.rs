use std::collections::HashSet;

use super::{EvalError, PromptSet, Verdict};

/// Frequent English words and fragments that appear in ordinary answers.
const DEFAULT_STOPWORDS: &[&str] = &[
    "the", "and", "for", "are", "but", "not", "you", "all", "any", "can", "had", "her", "was", "one", "our",
    "out", "day", "get", "has", "him", "his", "how", "man", "new", "now", "old", "see", "two", "way", "who",
    "boy", "did", "its", "let", "put", "say", "she", "too", "use", "yes", "yet", "may", "off", "own", "why",
    "try", "ask", "few", "big", "end", "far", "set", "top", "low", "red", "per", "via", "etc", "ago", "age",
    "this", "that", "with", "have", "from", "they", "will", "what", "when", "your", "said", "each", "which",
    "their", "there", "been", "more", "some", "them", "than", "then", "these", "would", "make", "like",
    "into", "time", "look", "only", "could", "other", "also", "come", "made", "over", "such", "many",
    "most", "very", "after", "where", "just", "well", "here", "does", "seem", "seems", "appear", "appears",
    "image", "images", "picture", "photo", "view", "views", "hidden", "number", "numbers", "letter",
    "letters", "word", "words", "character", "characters", "chinese", "english", "digit", "digits",
    "text", "shape", "pattern", "patterns", "background", "noise", "texture", "stripe", "stripes", "line",
    "lines", "dot", "dots", "black", "white", "gray", "grey", "color", "colour", "light", "dark", "left",
    "right", "center", "middle", "upper", "lower", "large", "small", "visible", "clear", "clearly",
    "answer", "response", "result", "sure", "think", "believe", "likely", "possibly", "probably",
    "maybe", "perhaps", "based", "analysis", "analyze", "careful", "carefully", "identify", "hide",
    "embedded", "illusion", "optical", "global", "original", "same", "inside", "within", "form", "forms",
    "shows", "show", "display", "displays", "contains", "contain", "read", "reads", "spell", "spells",
    "correct", "incorrect", "none", "cannot", "unable", "there's", "it's", "is", "it", "in", "on", "at",
    "an", "as", "be", "by", "do", "go", "he", "if", "me", "my", "no", "of", "or", "so", "to", "up", "us",
    "we", "ing", "ion", "ent", "ers", "est", "ly", "ed", "es", "re", "th", "er", "st", "nd",
];

/// Strings whose presence in a response says nothing about the answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Default for Stoplist {
    fn default() -> Self {
        Self::new(DEFAULT_STOPWORDS.iter().copied())
    }
}

impl Stoplist {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            words: words.into_iter().map(|w| normalize(w.as_ref())).collect(),
        }
    }

    pub fn empty() -> Self {
        Self { words: HashSet::new() }
    }

    pub fn contains(&self, s: &str) -> bool {
        self.words.contains(&normalize(s))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

// Lowercasing leaves CJK untouched, so Latin matches case-insensitively
// and CJK exactly.
fn normalize(s: &str) -> String {
    s.trim().to_lowercase()
}

/// First-stage verdict from containment alone.
pub fn string_match(truth: &str, response: &str, stoplist: &Stoplist) -> Verdict {
    let y = normalize(truth);
    if y.is_empty() || !response.to_lowercase().contains(&y) {
        return Verdict::Incorrect;
    }
    if y.chars().count() >= 3 && !stoplist.contains(&y) {
        Verdict::Correct
    } else {
        Verdict::NeedsJudge
    }
}

/// Maps a judge reply to a verdict: the earliest of "incorrect" and a
/// standalone "correct" wins, case-insensitively.
pub fn parse_judge_output(text: &str) -> Result<Verdict, EvalError> {
    let lower = text.to_lowercase();
    let incorrect = lower.find("incorrect");
    let correct = lower
        .match_indices("correct")
        .map(|(i, _)| i)
        .find(|&i| !lower[..i].ends_with("in"));
    match (correct, incorrect) {
        (Some(c), Some(i)) if c < i => Ok(Verdict::Correct),
        (Some(_), None) => Ok(Verdict::Correct),
        (_, Some(_)) => Ok(Verdict::Incorrect),
        (None, None) => Err(EvalError::MalformedJudgeOutput(text.chars().take(200).collect())),
    }
}

/// Second-stage evaluator, normally a language model.
pub trait Judge: Send + Sync {
    /// Returns the judge's raw reply to a fully rendered judge prompt.
    fn ask(&self, prompt: &str) -> Result<String, EvalError>;
}

impl<F> Judge for F
where
    F: Fn(&str) -> Result<String, EvalError> + Send + Sync,
{
    fn ask(&self, prompt: &str) -> Result<String, EvalError> {
        self(prompt)
    }
}

pub fn judge(truth: &str, response: &str, judge: &dyn Judge, prompts: &PromptSet) -> Result<Verdict, EvalError> {
    let reply = judge.ask(&prompts.render_judge(truth, response))?;
    parse_judge_output(&reply)
}

pub const FLAG_JUDGE_UNAVAILABLE: &str = "judge_unavailable";
pub const FLAG_JUDGE_MALFORMED: &str = "judge_malformed";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scored {
    pub verdict: Verdict,
    pub judge_used: bool,
    pub flags: Vec<String>,
}

/// Full pipeline; always ends in `Correct` or `Incorrect`. Without a judge,
/// or when it fails, undecided cases score `Incorrect` and are flagged.
pub fn score(
    truth: &str,
    response: &str,
    stoplist: &Stoplist,
    judge_client: Option<&dyn Judge>,
    prompts: &PromptSet,
) -> Scored {
    let first = string_match(truth, response, stoplist);
    if first != Verdict::NeedsJudge {
        return Scored {
            verdict: first,
            judge_used: false,
            flags: Vec::new(),
        };
    }
    let unavailable = || Scored {
        verdict: Verdict::Incorrect,
        judge_used: false,
        flags: vec![FLAG_JUDGE_UNAVAILABLE.to_string()],
    };
    let Some(j) = judge_client else {
        return unavailable();
    };
    match judge(truth, response, j, prompts) {
        Ok(verdict) => Scored {
            verdict,
            judge_used: true,
            flags: Vec::new(),
        },
        Err(EvalError::MalformedJudgeOutput(_)) => Scored {
            verdict: Verdict::Incorrect,
            judge_used: true,
            flags: vec![FLAG_JUDGE_MALFORMED.to_string()],
        },
        Err(_) => unavailable(),
    }
}
