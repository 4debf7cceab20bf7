"""Literature retrieval and extractive question answering over chunked
scholarly corpora, with rule-based trainfile generation."""

__version__ = "0.1.0"

from .corpus import Chunk, ChunkPolicy, CorpusIndex, Document, chunk_document, load_corpus, parse_document, write_chunk_index
from .errors import (
    ConfigError,
    Cov19IrError,
    EmptyCorpus,
    EmptySquad,
    MalformedAnnotations,
    MalformedLexicon,
    MalformedRecord,
    NoTriplets,
    ProtocolError,
    RemoteError,
    ScorerError,
    TransportError,
)
from .lexicon import (
    EmbeddingProvider,
    KeywordLexicon,
    RewriteResult,
    TableEmbedding,
    WordVectorEmbedding,
    build_lexicon,
    extract_keywords,
    extract_proper_nouns,
    load_lexicon,
    rewrite_unseen_query,
    save_lexicon,
)
from .qa import QAResult, answer
from .retrieval import (
    ChunkScore,
    RankedDocument,
    combine_scores,
    rank_documents,
    retrieve,
    score_chunk,
    score_document,
)
from .scoring import (
    LexicalParaphraseScorer,
    LexicalSpanExtractor,
    ParaphraseScorer,
    RemoteParaphraseScorer,
    RemoteSpanExtractor,
    ScoredSpan,
    SpanExtractor,
    lexical_extract_span,
    lexical_paraphrase_score,
    validate_span,
)
from .sentences import Sentence, split_sentences
from .traindata import (
    Entity,
    MrpcFile,
    MrpcPair,
    SquadFile,
    SquadTriplet,
    build_mrpc,
    build_squad,
    load_squad,
    recognize_entities,
    select_keyword_lines,
    validate_mrpc,
    validate_squad,
)
