/// System/user prompt pair with `{text}` and `{length}` placeholders in the
/// user part.
///
/// The default template states the three correction constraints the rest of
/// the pipeline relies on: the output keeps the input length, only in-place
/// substitutions are allowed, and unrecoverable segments become runs of `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub system: String,
    pub user: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        PromptTemplate {
            system: "You repair text that was corrupted by a noisy communication channel. \
                     Some characters were replaced by wrong ones."
                .to_string(),
            user: "Correct the corrupted text below. Rules: \
                   (1) your answer must have exactly the same length as the input, \
                   {length} characters; \
                   (2) only substitute characters in place, never insert or delete any; \
                   (3) if a segment is too corrupted to recover, replace that segment with \
                   'X' characters of equal length. \
                   Reply with the corrected text only, on a single line.\n\n{text}"
                .to_string(),
        }
    }
}

impl PromptTemplate {
    /// Fills the placeholders and returns the (system, user) message pair.
    pub fn render(&self, text: &str) -> (String, String) {
        let length = text.chars().count().to_string();
        let user = self.user.replace("{length}", &length).replace("{text}", text);
        let system = self.system.replace("{length}", &length);
        (system, user)
    }
}
