use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EvalError;

pub const HIDDEN_TYPE_SLOT: &str = "[hidden_type]";
pub const GROUND_TRUTH_SLOT: &str = "[GROUND_TRUTH]";
pub const RESPONSE_SLOT: &str = "[RESPONSE]";

pub const VANILLA_TEMPLATE: &str = "There is a [hidden_type] in the image, what is it ?";

pub const COT_TEMPLATE: &str = "You are an expert in solving visual puzzles and optical illusions. \
Your task is to identify the hidden [hidden_type] embedded in the image.

The image is designed as an optical illusion, where the character is subtly integrated into the \
semantic background or noise patterns.
To identify the hidden content, you can simulate human visual behaviors:
1. Imagine squinting your eyes or slightly blurring your vision. Ignore the sharp, high frequency \
details, textures and noise in the image.
2. Imagine viewing the image from a long distance. You can resize the image smaller in your mind to \
get a global view of the image.
You can combine the two strategies to enhance your perception of the hidden character.

Now, please analyze the image carefully, and identify the hidden [hidden_type].";

pub const SMSP_TEMPLATE: &str = "I provide four views of the SAME image, the original view and the \
global views. There is a SAME [hidden_type] embedded in these images, with the help of the views, \
what is it ?";

pub const JUDGE_TEMPLATE: &str = "You are a strict evaluator. Your task is to determine whether the \
model's response correctly identifies the hidden number(s), letter(s), word(s), or Chinese \
character(s) in the image.

You will be given a ground truth answer, which is the correct hidden content, and a model response, \
which is the content identified by a specific model. You should compare the model response with the \
ground truth answer and decide if the model's identification is correct.
- [Correct]: If the model response exactly matches the ground truth answer.
- [Incorrect]: If the model response does not match the ground truth answer.
Your output should only contain your evaluation result, either \"Correct\" or \"Incorrect\".

# Example 1
Ground Truth Answer: 5
Model Response: Looking at the image carefully, I can identify the hidden number: 5.
Evaluation: Correct
# Example 2
Ground Truth Answer: animal
Model Response: The hidden word in the image is \"ANIMAL\".
Evaluation: Correct
# Example 3
Ground Truth Answer: A
Model Response: The hidden letter in the image is B.
Evaluation: Incorrect
# Example 4
Ground Truth Answer: 我
Model Response: The hidden Chinese character in the image is 我.
Evaluation: Correct
# Example 5
Ground Truth Answer: 你好吗
Model Response: The hidden Chinese characters in the image are 我好嘛.
Evaluation: Incorrect

Now it's your turn to evaluate.

Ground Truth Answer: [GROUND_TRUTH]
Model Response: [RESPONSE]
Evaluation:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptKind {
    Vanilla,
    Cot,
    Smsp,
}

impl fmt::Display for PromptKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PromptKind::Vanilla => "vanilla",
            PromptKind::Cot => "cot",
            PromptKind::Smsp => "smsp",
        })
    }
}

impl FromStr for PromptKind {
    type Err = EvalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "vanilla" => Ok(PromptKind::Vanilla),
            "cot" => Ok(PromptKind::Cot),
            "smsp" => Ok(PromptKind::Smsp),
            _ => Err(EvalError::UnknownKind(s.to_string())),
        }
    }
}

/// The three question templates; each may be replaced from configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptSet {
    pub vanilla: String,
    pub cot: String,
    pub smsp: String,
    pub judge: String,
}

impl Default for PromptSet {
    fn default() -> Self {
        Self {
            vanilla: VANILLA_TEMPLATE.into(),
            cot: COT_TEMPLATE.into(),
            smsp: SMSP_TEMPLATE.into(),
            judge: JUDGE_TEMPLATE.into(),
        }
    }
}

fn count_word(n: usize) -> String {
    const WORDS: [&str; 11] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    ];
    WORDS.get(n).map_or_else(|| n.to_string(), |w| w.to_string())
}

impl PromptSet {
    pub fn template(&self, kind: PromptKind) -> &str {
        match kind {
            PromptKind::Vanilla => &self.vanilla,
            PromptKind::Cot => &self.cot,
            PromptKind::Smsp => &self.smsp,
        }
    }

    /// Fills every `[hidden_type]` slot. For multi-view prompts the view
    /// count follows `image_count` when it differs from four.
    pub fn render(&self, kind: PromptKind, hidden_type: &str, image_count: usize) -> Result<String, EvalError> {
        if hidden_type.trim().is_empty() {
            return Err(EvalError::EmptyHiddenType);
        }
        let mut text = self.template(kind).replace(HIDDEN_TYPE_SLOT, hidden_type);
        if kind == PromptKind::Smsp && image_count != 4 {
            text = text.replacen("four views", &format!("{} views", count_word(image_count)), 1);
        }
        Ok(text)
    }

    pub fn render_judge(&self, truth: &str, response: &str) -> String {
        // Fill the response last so its text is never re-scanned for slots.
        let (head, tail) = self.judge.split_once(RESPONSE_SLOT).unwrap_or((&self.judge, ""));
        let head = head.replace(GROUND_TRUTH_SLOT, truth);
        let tail = tail.replace(GROUND_TRUTH_SLOT, truth);
        if self.judge.contains(RESPONSE_SLOT) {
            format!("{head}{response}{tail}")
        } else {
            head
        }
    }
}

/// Default templates with four views for the multi-view prompt.
pub fn render_prompt(kind: PromptKind, hidden_type: &str) -> Result<String, EvalError> {
    PromptSet::default().render(kind, hidden_type, 4)
}

pub fn render_judge_prompt(truth: &str, response: &str) -> String {
    PromptSet::default().render_judge(truth, response)
}
