//! Prompt templates. Placeholders are written `{{name}}`; everything else in a
//! body is sent verbatim.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub type Bindings = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TemplateName {
    SentenceDecomposition,
    AtomicExpansion,
    PassageGen,
    EntailmentCheck,
    ChunkSummarization,
    MergeFacts,
    ZeroShotEval,
    Decontextualize,
    C2dSimpSupport,
    C2dSimpNonsupport,
    D2cSimpEdit,
    MultiClaimEval,
}

impl TemplateName {
    pub const ALL: [TemplateName; 12] = [
        TemplateName::SentenceDecomposition,
        TemplateName::AtomicExpansion,
        TemplateName::PassageGen,
        TemplateName::EntailmentCheck,
        TemplateName::ChunkSummarization,
        TemplateName::MergeFacts,
        TemplateName::ZeroShotEval,
        TemplateName::Decontextualize,
        TemplateName::C2dSimpSupport,
        TemplateName::C2dSimpNonsupport,
        TemplateName::D2cSimpEdit,
        TemplateName::MultiClaimEval,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TemplateName::SentenceDecomposition => "sentence-decomposition",
            TemplateName::AtomicExpansion => "atomic-expansion",
            TemplateName::PassageGen => "passage-gen",
            TemplateName::EntailmentCheck => "entailment-check",
            TemplateName::ChunkSummarization => "chunk-summarization",
            TemplateName::MergeFacts => "merge-facts",
            TemplateName::ZeroShotEval => "zero-shot-eval",
            TemplateName::Decontextualize => "decontextualize",
            TemplateName::C2dSimpSupport => "c2d-simp-support",
            TemplateName::C2dSimpNonsupport => "c2d-simp-nonsupport",
            TemplateName::D2cSimpEdit => "d2c-simp-edit",
            TemplateName::MultiClaimEval => "multi-claim-eval",
        }
    }

    pub fn template(self) -> PromptTemplate {
        PromptTemplate {
            name: self,
            body: body(self),
        }
    }
}

impl fmt::Display for TemplateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemplateName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TemplateName::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown prompt template {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PromptTemplate {
    pub name: TemplateName,
    pub body: &'static str,
}

impl PromptTemplate {
    /// Placeholder names in order of first appearance.
    pub fn placeholders(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = Vec::new();
        for (_, name, _) in scan(self.body) {
            if !out.contains(&name) {
                out.push(name);
            }
        }
        out
    }

    /// Fills every placeholder. Returns the first unbound name on failure.
    pub fn render(&self, bindings: &Bindings) -> Result<String, String> {
        let mut out = String::with_capacity(self.body.len());
        let mut last = 0;
        for (start, name, end) in scan(self.body) {
            let value = bindings.get(name).ok_or_else(|| name.to_string())?;
            out.push_str(&self.body[last..start]);
            out.push_str(value);
            last = end;
        }
        out.push_str(&self.body[last..]);
        Ok(out)
    }
}

fn scan(body: &'static str) -> Vec<(usize, &'static str, usize)> {
    let mut found = Vec::new();
    let mut from = 0;
    while let Some(open) = body[from..].find("{{") {
        let start = from + open;
        let Some(close) = body[start + 2..].find("}}") else { break };
        let name = &body[start + 2..start + 2 + close];
        let end = start + 2 + close + 2;
        if !name.is_empty() && name.chars().all(|c| c.is_ascii_lowercase() || c == '_') {
            found.push((start, name, end));
        }
        from = end;
    }
    found
}

/// Stable digest of a binding map, used to key mock fixtures.
pub fn binding_digest(bindings: &Bindings) -> String {
    let mut hasher = Sha256::new();
    for (k, v) in bindings {
        hasher.update(k.as_bytes());
        hasher.update([0u8]);
        hasher.update(v.as_bytes());
        hasher.update([0u8]);
    }
    hex::encode(hasher.finalize().as_slice())[..16].to_string()
}

/// Renders a list as the `-item` lines used by the fact-list prompts.
pub fn dash_list<S: AsRef<str>>(items: &[S]) -> String {
    items.iter().map(|s| format!("-{}", s.as_ref())).collect::<Vec<_>>().join("\n")
}

/// Renders a list as `- item` lines, the layout of the merge prompt's exemplars.
pub fn bullet_list<S: AsRef<str>>(items: &[S]) -> String {
    items.iter().map(|s| format!("- {}", s.as_ref())).collect::<Vec<_>>().join("\n")
}

/// Renders claims with bracketed 1-based indices, one per line.
pub fn indexed_claims<S: AsRef<str>>(claims: &[S]) -> String {
    claims
        .iter()
        .enumerate()
        .map(|(i, c)| format!("[{}] {}", i + 1, c.as_ref()))
        .collect::<Vec<_>>()
        .join("\n")
}

fn body(name: TemplateName) -> &'static str {
    match name {
        TemplateName::SentenceDecomposition => SENTENCE_DECOMPOSITION,
        TemplateName::AtomicExpansion => ATOMIC_EXPANSION,
        TemplateName::PassageGen => PASSAGE_GEN,
        TemplateName::EntailmentCheck => ENTAILMENT_CHECK,
        TemplateName::ChunkSummarization => CHUNK_SUMMARIZATION,
        TemplateName::MergeFacts => MERGE_FACTS,
        TemplateName::ZeroShotEval => ZERO_SHOT_EVAL,
        TemplateName::Decontextualize => DECONTEXTUALIZE,
        TemplateName::C2dSimpSupport => C2D_SIMP_SUPPORT,
        TemplateName::C2dSimpNonsupport => C2D_SIMP_NONSUPPORT,
        TemplateName::D2cSimpEdit => D2C_SIMP_EDIT,
        TemplateName::MultiClaimEval => MULTI_CLAIM_EVAL,
    }
}

const SENTENCE_DECOMPOSITION: &str = r#"Segment the following sentence into individual facts:

Sentence: Other title changes included Lord Steven Regal and The Nasty Boys winning the World Television Championship and the World Tag Team Championship respectively.
Facts:
- Lord Steven Regal won the World Television Championship.
- The Nasty Boys won the World Tag Team Championship.

Sentence: The parkway was opened in 2001 after just under a year of construction and almost two decades of community requests.
Facts:
- The parkway was opened in 2001.
- The parkway was opened after just under a year of construction.
- The parkway was opened after two decades of community requests.

Sentence: Touring began in Europe in April-June with guitarist Paul Gilbert as the opening act, followed by Australia and New Zealand in July, Mexico and South America in late July-August, and concluding in North America in October-November.
Facts:
- Touring began in Europe in April-June.
- The opening act of the tour was guitarist Paul Gilbert.
- The tour was in Australia and New Zealand in July.
- The tour was in Mexico and South America in late July-August.
- The tour was concluded in North America in October-November.

Sentence: In March 2018, the company partnered With Amazon Web Services (AWS) to offer Al-enabled conversational solutions to customers in India.
Facts:
- The company partnered with Amazon Web Services (AWS) in March 2018.
- The two companies partnered to offer Al-enabled conversational solutions to customers in India.

Sentence: The most significant of these is in Germany, which now has a Yazidi community of more than 200,000 living primarily in Hannover, Bielefeld, Celle, Bremen, Bad Oeynhausen, Pforzheim and Oldenburg.
Facts:
- The most significant of these is in Germany.
- Germany now has a Yazidi community of more than 200,000.
- Yazidi community in Germany lives primarily in Hannover, Bielefeld, Celle, Bremen, Bad Oeynhausen, Pforzheim and Oldenburg.

Sentence: A previous six-time winner of the Nations' Cup, Sebastian Vettel became Champion of Champions for the first time, defeating Tom Kristensen, who made the final for the fourth time, 2-0.
Facts:
- Sebastian Vettel is a previous six-time winner of the Nations' Cup.
- Sebastian Vettel became Champion of Champions for the first time, defeating Tom Kristensen, 2-0.
- Tom Kristensen made the final for the fourth time.

Sentence: {{sentence}}
Facts:"#;

const ATOMIC_EXPANSION: &str = r#"Your task is to generate a pair of sentences so that the provided claim can be entailed by the sentence pair. You must make sure that the claim can only be deduced by combining the information from the two sentences that contain unique information.

Examples:
Provided Claim: The investigation is into allegations that his mayoral campaign received illegal foreign funds.
Sentence 1: During the period leading up to the mayoral election, there was a notable increase in his campaign's financial resources.
Sentence 2: Investigation shows the funds having origins beyond national boundaries, a detail raising questions under current campaign laws.

Provided Claim: Approximately 1,000 fans fainted at the concert.
Sentence 1: Emergency services reported an unusually high number of calls for medical assistance during the concert with an attendance of 20,000.
Sentence 2: Venue officials estimated that approximately 5% of the audience required medical attention for fainting.

Provided Claim: The interest rate hikes were intended to manage inflation and moderate economic growth.
Sentence 1: Central bank officials expressed concern over the rising consumer price index and the overheating of the economy.
Sentence 2: The monetary policy committee decided to adjust the interest rates as a response to these economic indicators.

Provided Claim: Several advertisers are considering halting their ads on social media platform X.
Sentence 1: Some companies are re-evaluating their marketing strategies to avoid association with platforms that fail to address misinformation.
Sentence 2: Recent reports show that platform X has received criticism for its handling of false information spreading unchecked.

Please make sure that NEITHER sentence alone supports the claim.

Your turn:
Provided Claim: {{claim}}"#;

const PASSAGE_GEN: &str = r#"We are creating a news article (one paragraph) in the style of The New York Times. We will give you a list of facts to use when writing your article. You must include all the facts in the list. Never state deduced facts or conclusions. The article should stick to the fact list pretty closely. Include as many sentences as needed to write each fact from the list of facts.

Facts you must include:
{{facts}}"#;

const ENTAILMENT_CHECK: &str = r#"Source: {{source}}
Claim: {{claim}}

Is the claim fully entailed, or implied, by the source? Please answer with "yes" or "no"."#;

const CHUNK_SUMMARIZATION: &str = r#"Document:
{{document}}

Please generate a summary for the document with the following requirements:
1. The summary should be a fluent and grammatical sentence.
2. The summary should be no more than 15 words.
3. The summary should cover information across the document.
Summary:"#;

const MERGE_FACTS: &str = r#"Merge the following individual facts into a single sentence:

Facts:
- Lord Steven Regal wan the World Television Championship.
- The Nasty Boys wan and the World Tag Team Championship.
Sentence: Other title changes included Lord Steven Regal and The Nasty Boys winning the World Television Championship and the World Tag Team Championship respectively.

Facts:
- The parkway was opened in 2001.
- The parkway was opened after just under a year of construction.
- The parkway was opened after two decades of community requests.
Sentence: The parkway was opened in 2001 after just under a year of construction and almost two decades of community requests.

Facts:
- Touring began in Europe in April-June.
- The opening act was guitarist Paul Gilbert.
- There was a tour in Australia in July.
- There was a tour in New Zealand in July.
- There was a tour in Mexico in late July-August.
- There was a tour in South America in late July-August
- The tour was concluded in North America in October-November.
Sentence: Touring began in Europe in April-June with guitarist Paul Gilbert as the opening act, followed by Australia and New Zealand in July, Mexico and South America in late July-August, and concluding in North America in October-November.

Facts:
- The company partnered with Amazon Web Services (AWS) in March 2018.
- The two companies partnered to offer Al-enabled conversational solutions to customers in India.
Sentence: In March 2018, the company partnered With Amazon Web Services (AWS) to offer Al-enabled conversational solutions to customers in India.

Facts:
- The most significant of these is in Germany.
- Germany now has a Yazidi community of more than 200,000.
- Yazidi community in Germany lives primarily in Hannover.
- Yazidi community in Germany lives primarily in Bielefeld.
- Yazidi community in Germany lives primarily in Celle.
- Yazidi community in Germany lives primarily in Bremen.
- Yazidi community in Germany lives primarily in Bad Oeynhausen.
- Yazidi community in Germany lives primarily in Pforzheim.
- Yazidi community in Germany lives primarily in Oldenburg.
Sentence: The most significant of these is in Germany, which now has a Yazidi community of more than 200,000 living primarily in Hannover, Bielefeld, Celle, Bremen, Bad Oeynhausen, Pforzheim and Oldenburg.

Facts:
- Sebastian Vettel is a previous six-time winner of the Nations' Cup.
- Sebastian Vettel became Champion of Champions for the first time.
- Sebastian Vettel defeated Tom Kristensen.
- Tom Kristensen made the final for the fourth time.
- The score was 2-0.
Sentence: A previous six-time winner of the Nations' Cup, Sebastian Vettel became Champion of Champions for the first time, defeating Tom Kristensen, who made the final for the fourth time, 2-0.

Facts:
{{facts}}
Sentence:"#;

const ZERO_SHOT_EVAL: &str = r#"Determine whether the provided claim is consistent with the corresponding document. Consistency in this context implies that all information presented in the claim is substantiated by the document. If not, it should be considered inconsistent.
Document: {{document}}
Claim: {{claim}}
Please assess the claim's consistency with the document by responding with either "yes" or "no".
Answer:"#;

const DECONTEXTUALIZE: &str = r#"You are provied with a context and a claim. Please first determine if the claim can stand alone whitout the conext. If not, provide a decontextualzied version of the claim that incorporates necessary information from the context to make it self-contained. The revision should be as minimum as possible. Please respond with a JSON format: {"label": "yes"/"no", "decontext": "NA"/decontextualized claim}.

Example 1:
Context: There are many reasons why poetry is important for children. Poetry can help children build confidence through memorizing and reciting poems. It can also provide an easy way for children to remember a lesson or value.
Claim: It can also provide an easy way for children to remember a lesson or value.
Answer: {"label": "no", "decontext": "Poetry can provide an easy way for children to remember a lesson or value."}

Example 2:
Context: Yes, ancient societies had concepts of rights. The concept of rights first appeared in the theory of natural law which existed in the state of nature. In this state, people enjoyed certain rights sanctioned by natural law.
Claim: In this state, people enjoyed certain rights sanctioned by natural law.
Answer: {"label": "no", "decontext": "In the state of nature, people enjoyed certain rights sanctioned by natural law"}

Example 3:
Context: The ancient Greeks had some concept of human rights, although there is no single word in classical Greek that captures the sense of "rights" as it is used in modern political thought. However, Greek customs and institutions provided protection to private property unique in the ancient world, instilling a strong sense of equality. The idea of human rights spread quickly from Babylon to Greece and eventually Rome, where the concept of "natural law" arose.
Claim: The idea of human rights spread quickly from Babylon to Greece and eventually Rome, where the concept of "natural law" arose.
Answer: {"label": "yes", "decontext": "NA"}

Your Turn:
Context: {{context}}
Claim: {{claim}}
Answer:"#;

const C2D_SIMP_SUPPORT: &str = r#"We are creating a news article (one paragraph) in the style of The New York Times. We will give you a claim that must be covered when writing your article. All information in the claim must be supported by weaving together various pieces of evidence within the text. That is, the claim should not be directly supported by using one sentence from the article. The generated article should be around 140 words.

Claim: {{claim}}
Article:"#;

const C2D_SIMP_NONSUPPORT: &str = r#"You are presented with a claim and an article that fully support the claim. You task is to minimally modify the article with the following requirements:

1. The modified article no longer fully supports the claim. Some (but not all) statements in the claim should be supported by the modified article.
2. The edited article looks close to the original claim.
3. The edited claim article should have the similar length with the original article.

The followings are the type of revisions you can use to revise the article:
- Entity revision: An entity (like a person, place, organization, etc.) from a claim is being edited or not mentioned in the revised article.
- Number revision: A number from a claim is being edited or not mentioned in the revised article.
- Attribute revision: A syntax unit (either a word, phrase or clause) that modifies a noun is being edited or not mentioned in the revised article.
- Predicate revision: A main content verb or content like adverbs that closely relate to the verb is being edited or not mentioned in the revised article.

Claim: {{claim}}
Article: {{article}}

Please respond in a JSON format: {"revision_type": ..., "revised_article": ...}."#;

const D2C_SIMP_EDIT: &str = r#"Document:
{{document}}

Consistent Summary:
{{summary}}

Given the document and consistent summary above, generate 10 slightly modified versions of the summary such that the modifications introduce a factual inconsistency. For example, you can modify a number, date, or entity, and negate or modify a statement. Here are some rules to follow:
- Each modification should change at most 3-4 words from the original summary, and keep the rest the same.
- Each modification should change a different part of the original summary.
- Your modifications should be challenging to detect: modify minimally while still introducing a factual inconsistency.
- The factual inconsistency you introduce should be subtle. For example, if you replace an entity, make sure you replace it with another entity from the document.
- Each modification should start with "[FIRST_THREE_WORDS] [...]", and end with "[LAST_THREE_WORDS]"

Please respond in a JSON format with the following structure:
{"inconsistent_summaries": ["First inconsistent summary", "Second inconsistent summary", ...]}"#;

const MULTI_CLAIM_EVAL: &str = r#"Determine whether each of the provided claims are consistent with the corresponding document. Consistency in this context implies that all information presented in a claim is substantiated by the document. If not, it should be considered inconsistent.
Document: {{document}}
Claims: {{claims}}

Claims are displayed with sentence indices. Please evaluate each claim's consistency with the document by responding with either "yes" or "no" in the JSON format: {"[1]": ..., "[2]": ..., ...}.
Answer:"#;
