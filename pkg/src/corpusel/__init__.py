"""corpusel: entity-centric corpus selection over an annotated document collection.

Expand root concepts through a category graph, prune candidate entities
against a target period, preview and count their corpus mentions (including
the ones that never occur), sculpt the final query reversibly, and export the
resulting corpus with full provenance.
"""
from .errors import (
    ConflictError,
    CorpuselError,
    DuplicateIdError,
    RecordError,
    UnknownIdError,
)
from .index import (
    CorpusIndex,
    FrequencyReport,
    PreviewSnippet,
    RetrievedDoc,
    aggregate,
    build_index,
    frequencies,
    load_snapshot,
    preview,
    retrieve,
    save_snapshot,
)
from .ingest import (
    AnnotatedDocument,
    EntityAnnotation,
    FixtureMix,
    build_fixture,
    demo_graph,
    demo_mix,
    generate_fixture,
    parse_corpus,
    serialize_corpus,
)
from .kb_graph import (
    DEFAULT_MAX_DEPTH,
    EdgeKind,
    EntityNode,
    KnowledgeGraph,
    TemporalClues,
    descendant_categories,
    descendant_depths,
    extract_clues,
    load_graph,
    member_entities,
    serialize_graph,
)
from .session import (
    AuditRecord,
    EffectiveQuery,
    SessionState,
    Verdict,
    assess_document,
    create_session,
    effective_query,
    export_corpus,
    missing_entities,
    read_export,
    replay_session,
    toggle_category,
    toggle_entity,
    write_audit,
)
from .temporal_filter import (
    CandidateTree,
    CategoryDecision,
    ClassificationFeatures,
    Period,
    TemporalClass,
    candidate_set,
    classify_entity,
    compute_features,
    prune_categories,
)

__version__ = "0.1.0"
