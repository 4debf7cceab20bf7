import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from cov19ir.errors import ProtocolError, RemoteError, TransportError
from cov19ir.scoring import RemoteParaphraseScorer, RemoteSpanExtractor, ScoredSpan

from stubserver import StubScoringServer

CONTEXT = (
    "MERS-CoV is a human betacoronavirus responsible of a severe viral "
    "respiratory disease, first identified in Saudi Arabia in 2012."
)
NEEDLE = "Saudi Arabia"
START = CONTEXT.index(NEEDLE)


def span_handler(path, payload):
    assert path == "/v1/span"
    return 200, {"text": NEEDLE, "start": START, "end": START + len(NEEDLE), "score": 0.91}


def test_remote_span_accepted_when_offsets_match():
    with StubScoringServer(span_handler) as server:
        extractor = RemoteSpanExtractor(server.endpoint, timeout=5, retries=0)
        span = extractor.extract("Regions affected?", CONTEXT)
        extractor.close()
    assert span == ScoredSpan(NEEDLE, START, START + len(NEEDLE), 0.91)
    assert CONTEXT[span.start_char : span.end_char] == span.text


def test_remote_span_offset_mismatch_is_protocol_error():
    def handler(path, payload):
        return 200, {"text": NEEDLE, "start": 0, "end": len(NEEDLE), "score": 0.9}

    with StubScoringServer(handler) as server:
        extractor = RemoteSpanExtractor(server.endpoint, timeout=5, retries=0)
        with pytest.raises(ProtocolError):
            extractor.extract("q", CONTEXT)
        extractor.close()


def test_remote_span_score_out_of_range_is_protocol_error():
    def handler(path, payload):
        return 200, {"text": NEEDLE, "start": START, "end": START + len(NEEDLE), "score": 1.3}

    with StubScoringServer(handler) as server:
        extractor = RemoteSpanExtractor(server.endpoint, timeout=5, retries=0)
        with pytest.raises(ProtocolError):
            extractor.extract("q", CONTEXT)
        extractor.close()


def test_remote_span_empty_context_short_circuits():
    extractor = RemoteSpanExtractor("http://127.0.0.1:9", timeout=1, retries=0)
    assert extractor.extract("q", "") == ScoredSpan.empty()
    extractor.close()


def test_remote_unreachable_raises_transport_error_after_retries():
    extractor = RemoteSpanExtractor("http://127.0.0.1:9", timeout=0.2, retries=2)
    with pytest.raises(TransportError):
        extractor.extract("q", CONTEXT)
    extractor.close()


def test_remote_non_2xx_raises_remote_error():
    def handler(path, payload):
        return 500, {"detail": "model exploded"}

    with StubScoringServer(handler) as server:
        extractor = RemoteSpanExtractor(server.endpoint, timeout=5, retries=0)
        with pytest.raises(RemoteError, match="model exploded"):
            extractor.extract("q", CONTEXT)
        extractor.close()


def test_remote_paraphrase_score_roundtrip():
    def handler(path, payload):
        assert path == "/v1/paraphrase"
        assert payload == {"text_a": "a", "text_b": "b"}
        return 200, {"score": 0.87}

    with StubScoringServer(handler) as server:
        scorer = RemoteParaphraseScorer(server.endpoint, timeout=5, retries=0)
        assert scorer.score("a", "b") == 0.87
        scorer.close()


def test_remote_paraphrase_zero_is_valid():
    with StubScoringServer(lambda p, q: (200, {"score": 0.0})) as server:
        scorer = RemoteParaphraseScorer(server.endpoint, timeout=5, retries=0)
        assert scorer.score("a", "b") == 0.0
        scorer.close()


def test_remote_paraphrase_out_of_range_is_protocol_error():
    with StubScoringServer(lambda p, q: (200, {"score": 1.3})) as server:
        scorer = RemoteParaphraseScorer(server.endpoint, timeout=5, retries=0)
        with pytest.raises(ProtocolError):
            scorer.score("a", "b")
        scorer.close()


def test_remote_paraphrase_missing_field_is_protocol_error():
    with StubScoringServer(lambda p, q: (200, {"value": 0.5})) as server:
        scorer = RemoteParaphraseScorer(server.endpoint, timeout=5, retries=0)
        with pytest.raises(ProtocolError):
            scorer.score("a", "b")
        scorer.close()


@pytest.fixture(scope="module")
def mutable_server():
    server = StubScoringServer()
    with server:
        yield server


@settings(max_examples=40, deadline=None, suppress_health_check=list(HealthCheck))
@given(
    shift=st.integers(-10, 10),
    score=st.floats(-0.5, 1.5, allow_nan=False),
)
def test_misbehaving_server_never_corrupts_spans(mutable_server, shift, score):
    """Any accepted span reproduces its text from the context by offsets."""

    def handler(path, payload):
        start = max(0, min(len(CONTEXT), START + shift))
        end = max(start, min(len(CONTEXT), start + len(NEEDLE)))
        return 200, {"text": NEEDLE, "start": start, "end": end, "score": score}

    mutable_server.handler = handler
    extractor = RemoteSpanExtractor(mutable_server.endpoint, timeout=5, retries=0)
    try:
        span = extractor.extract("q", CONTEXT)
    except ProtocolError:
        pass
    else:
        assert CONTEXT[span.start_char : span.end_char] == span.text
        assert 0.0 <= span.score <= 1.0
    finally:
        extractor.close()
