use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use thiserror::Error;

use crate::backend::{Backend, BackendError, Dispatch};
use crate::ledger::CostLedger;
use crate::template::{binding_digest, Bindings, TemplateName};

pub const DEFAULT_MODEL: &str = "gpt-4-0125-preview";
pub const LIGHT_MODEL: &str = "gpt-3.5-turbo-0125";
pub const DEFAULT_MAX_IN_FLIGHT: usize = 8;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("template {template}: placeholder {{{{{name}}}}} is unbound")]
    UnboundPlaceholder { template: TemplateName, name: String },
    #[error("fixture missing: template {template}, binding digest {digest}")]
    FixtureMissing { template: TemplateName, digest: String },
    #[error("{template} failed after {attempts} attempt(s): {source}")]
    Backend {
        template: TemplateName,
        attempts: u32,
        #[source]
        source: BackendError,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LlmRequest {
    pub template: TemplateName,
    pub bindings: Bindings,
    pub temperature: f64,
    /// Overrides the routing table when set.
    pub model_tag: Option<String>,
}

impl LlmRequest {
    /// A request at temperature zero, the setting every pipeline call uses.
    pub fn new(template: TemplateName) -> Self {
        Self {
            template,
            bindings: Bindings::new(),
            temperature: 0.0,
            model_tag: None,
        }
    }

    pub fn bind(mut self, name: &str, value: impl Into<String>) -> Self {
        self.bindings.insert(name.to_string(), value.into());
        self
    }

    pub fn model(mut self, tag: impl Into<String>) -> Self {
        self.model_tag = Some(tag.into());
        self
    }

    pub fn digest(&self) -> String {
        binding_digest(&self.bindings)
    }
}

/// Template → model assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Routing {
    pub default_model: String,
    pub overrides: BTreeMap<TemplateName, String>,
}

impl Default for Routing {
    /// Decomposition and merging on the lighter model, everything else on the
    /// stronger one.
    fn default() -> Self {
        let mut overrides = BTreeMap::new();
        overrides.insert(TemplateName::SentenceDecomposition, LIGHT_MODEL.to_string());
        overrides.insert(TemplateName::MergeFacts, LIGHT_MODEL.to_string());
        Self {
            default_model: DEFAULT_MODEL.to_string(),
            overrides,
        }
    }
}

impl Routing {
    pub fn model_for(&self, template: TemplateName) -> &str {
        self.overrides.get(&template).unwrap_or(&self.default_model)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            base_delay: Duration::from_millis(500),
        }
    }
}

impl RetryPolicy {
    pub fn no_delay() -> Self {
        Self {
            base_delay: Duration::ZERO,
            ..Self::default()
        }
    }

    fn delay_before(&self, attempt: u32) -> Duration {
        self.base_delay * 2u32.saturating_pow(attempt.saturating_sub(2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub request_id: u64,
    pub text: String,
    pub model: String,
    pub attempts: u32,
}

#[derive(Debug)]
struct InFlight {
    cap: usize,
    active: Mutex<usize>,
    freed: Condvar,
}

struct Permit<'a>(&'a InFlight);

impl InFlight {
    fn new(cap: usize) -> Self {
        Self {
            cap: cap.max(1),
            active: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut active = self.active.lock().unwrap();
        while *active >= self.cap {
            active = self.freed.wait(active).unwrap();
        }
        *active += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.active.lock().unwrap() -= 1;
        self.0.freed.notify_one();
    }
}

/// Thread-safe entry point for every LLM call.
pub struct Gateway {
    backend: Arc<dyn Backend>,
    routing: Routing,
    retry: RetryPolicy,
    in_flight: InFlight,
    ledger: CostLedger,
    next_id: AtomicU64,
}

impl Gateway {
    pub fn new(backend: impl Backend + 'static) -> Self {
        Self::from_arc(Arc::new(backend))
    }

    pub fn from_arc(backend: Arc<dyn Backend>) -> Self {
        Self {
            backend,
            routing: Routing::default(),
            retry: RetryPolicy::default(),
            in_flight: InFlight::new(DEFAULT_MAX_IN_FLIGHT),
            ledger: CostLedger::new(),
            next_id: AtomicU64::new(0),
        }
    }

    pub fn with_routing(mut self, routing: Routing) -> Self {
        self.routing = routing;
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_max_in_flight(mut self, cap: usize) -> Self {
        self.in_flight = InFlight::new(cap);
        self
    }

    pub fn routing(&self) -> &Routing {
        &self.routing
    }

    pub fn max_in_flight(&self) -> usize {
        self.in_flight.cap
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    pub fn backend_identity(&self) -> String {
        self.backend.identity()
    }

    pub fn complete(&self, req: &LlmRequest) -> Result<String, GatewayError> {
        self.complete_traced(req).map(|c| c.text)
    }

    pub fn complete_traced(&self, req: &LlmRequest) -> Result<Completion, GatewayError> {
        let template = req.template.template();
        let prompt = template
            .render(&req.bindings)
            .map_err(|name| GatewayError::UnboundPlaceholder {
                template: req.template,
                name,
            })?;
        let digest = req.digest();
        let model = req
            .model_tag
            .clone()
            .unwrap_or_else(|| self.routing.model_for(req.template).to_string());
        let request_id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let call = Dispatch {
            request_id,
            template: req.template,
            digest: &digest,
            model: &model,
            prompt: &prompt,
            temperature: req.temperature,
        };

        let max_attempts = self.retry.max_attempts.max(1);
        let mut attempt = 0;
        loop {
            attempt += 1;
            if attempt > 1 {
                std::thread::sleep(self.retry.delay_before(attempt));
            }
            let result = {
                let _permit = self.in_flight.acquire();
                self.backend.send(&call)
            };
            match result {
                Ok(text) => {
                    self.ledger.record(&model, &prompt, &text);
                    tracing::debug!(request_id, template = %req.template, attempt, "completion received");
                    return Ok(Completion {
                        request_id,
                        text,
                        model,
                        attempts: attempt,
                    });
                }
                Err(BackendError::FixtureMissing { template, digest }) => {
                    return Err(GatewayError::FixtureMissing { template, digest });
                }
                Err(err) => {
                    tracing::warn!(request_id, template = %req.template, attempt, error = %err, "backend call failed");
                    if !err.is_retryable() || attempt >= max_attempts {
                        return Err(GatewayError::Backend {
                            template: req.template,
                            attempts: attempt,
                            source: err,
                        });
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mock::{MockBackend, MockReply};
    use std::sync::atomic::AtomicUsize;

    fn entail(source: &str, claim: &str) -> LlmRequest {
        LlmRequest::new(TemplateName::EntailmentCheck)
            .bind("source", source)
            .bind("claim", claim)
    }

    #[test]
    fn scripted_mock_echo() {
        let mock = Arc::new(MockBackend::new());
        let req = entail("s", "c");
        mock.script(TemplateName::EntailmentCheck, &req.bindings, "yes");
        let gw = Gateway::from_arc(mock);
        assert_eq!(gw.complete(&req).unwrap(), "yes");
        assert_eq!(req.temperature, 0.0);
    }

    #[test]
    fn unbound_placeholder_fails_before_dispatch() {
        let mock = Arc::new(MockBackend::new());
        let gw = Gateway::from_arc(mock.clone());
        let req = LlmRequest::new(TemplateName::EntailmentCheck).bind("source", "s");
        let err = gw.complete(&req).unwrap_err();
        assert!(matches!(err, GatewayError::UnboundPlaceholder { ref name, .. } if name == "claim"));
        assert!(mock.calls().is_empty());
    }

    #[test]
    fn two_transient_failures_then_success() {
        let mock = Arc::new(MockBackend::new());
        let req = entail("s", "c");
        mock.script_sequence(
            TemplateName::EntailmentCheck,
            &req.bindings,
            vec![MockReply::transport("reset"), MockReply::status(502), MockReply::Text("no".into())],
        );
        let gw = Gateway::from_arc(mock.clone()).with_retry(RetryPolicy::no_delay());
        let done = gw.complete_traced(&req).unwrap();
        assert_eq!(done.text, "no");
        assert_eq!(done.attempts, 3);
        assert_eq!(mock.calls().len(), 3);
        assert_eq!(gw.ledger().snapshot()[DEFAULT_MODEL].calls, 1);
    }

    #[test]
    fn retries_exhausted() {
        let mock = Arc::new(MockBackend::new());
        let req = entail("s", "c");
        mock.script_sequence(TemplateName::EntailmentCheck, &req.bindings, vec![MockReply::status(500)]);
        let gw = Gateway::from_arc(mock.clone()).with_retry(RetryPolicy::no_delay());
        let err = gw.complete(&req).unwrap_err();
        assert!(matches!(err, GatewayError::Backend { attempts: 3, .. }));
        assert!(gw.ledger().snapshot().is_empty());
    }

    #[test]
    fn client_errors_are_not_retried() {
        let mock = Arc::new(MockBackend::new());
        let req = entail("s", "c");
        mock.script_sequence(TemplateName::EntailmentCheck, &req.bindings, vec![MockReply::status(400)]);
        let gw = Gateway::from_arc(mock.clone()).with_retry(RetryPolicy::no_delay());
        assert!(matches!(gw.complete(&req).unwrap_err(), GatewayError::Backend { attempts: 1, .. }));
        assert_eq!(mock.calls().len(), 1);
    }

    #[test]
    fn unscripted_key_is_fixture_missing() {
        let gw = Gateway::new(MockBackend::new());
        assert!(matches!(gw.complete(&entail("a", "b")), Err(GatewayError::FixtureMissing { .. })));
    }

    #[test]
    fn routing_defaults_and_overrides() {
        let routing = Routing::default();
        assert_eq!(routing.model_for(TemplateName::SentenceDecomposition), LIGHT_MODEL);
        assert_eq!(routing.model_for(TemplateName::MergeFacts), LIGHT_MODEL);
        assert_eq!(routing.model_for(TemplateName::EntailmentCheck), DEFAULT_MODEL);

        let mock = Arc::new(MockBackend::new());
        let req = entail("s", "c").model("local-model");
        mock.script(TemplateName::EntailmentCheck, &req.bindings, "yes");
        let gw = Gateway::from_arc(mock);
        assert_eq!(gw.complete_traced(&req).unwrap().model, "local-model");
        assert!(gw.ledger().snapshot().contains_key("local-model"));
    }

    #[test]
    fn backoff_doubles() {
        let p = RetryPolicy {
            max_attempts: 4,
            base_delay: Duration::from_millis(10),
        };
        assert_eq!(p.delay_before(2), Duration::from_millis(10));
        assert_eq!(p.delay_before(3), Duration::from_millis(20));
        assert_eq!(p.delay_before(4), Duration::from_millis(40));
    }

    struct Counting {
        active: AtomicUsize,
        peak: AtomicUsize,
    }

    impl Backend for Counting {
        fn identity(&self) -> String {
            "counting".into()
        }

        fn send(&self, _call: &Dispatch<'_>) -> Result<String, BackendError> {
            let now = self.active.fetch_add(1, Ordering::SeqCst) + 1;
            self.peak.fetch_max(now, Ordering::SeqCst);
            std::thread::sleep(Duration::from_millis(5));
            self.active.fetch_sub(1, Ordering::SeqCst);
            Ok("yes".into())
        }
    }

    #[test]
    fn in_flight_cap_is_respected() {
        let backend = Arc::new(Counting {
            active: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
        });
        let gw = Gateway::from_arc(backend.clone()).with_max_in_flight(3);
        std::thread::scope(|s| {
            for i in 0..16 {
                let gw = &gw;
                s.spawn(move || {
                    let out = gw.complete_traced(&entail("s", &i.to_string())).unwrap();
                    assert_eq!(out.text, "yes");
                });
            }
        });
        assert!(backend.peak.load(Ordering::SeqCst) <= 3);
        assert_eq!(gw.ledger().snapshot()[DEFAULT_MODEL].calls, 16);
    }
}
