//! Provider-agnostic chat-completion gateway.
//!
//! Every LLM call in the toolkit goes through [`Gateway::complete`]: a named
//! [`TemplateName`] plus placeholder bindings is rendered into a prompt,
//! routed to a model, dispatched to a [`Backend`] (scripted mock or live
//! chat-completions HTTP) under a retry policy and an in-flight cap, and
//! metered into the [`CostLedger`].

pub mod backend;
pub mod config;
pub mod gateway;
pub mod http;
pub mod ledger;
pub mod mock;
pub mod parse;
pub mod template;

pub use backend::{Backend, BackendError, Dispatch};
pub use config::GatewayConfig;
pub use gateway::{Completion, Gateway, GatewayError, LlmRequest, RetryPolicy, Routing};
pub use http::HttpBackend;
pub use ledger::{estimate_cost, CostEstimate, CostLedger, LedgerSnapshot, ModelUsage, Price, PriceTable};
pub use mock::{MockBackend, MockReply};
pub use template::{binding_digest, Bindings, PromptTemplate, TemplateName};
