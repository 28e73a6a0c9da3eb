"""Annotated-corpus parsing, serialization, and synthetic fixture generation.

Documents arrive as JSON lines carrying text, metadata, and stand-off entity
annotations produced upstream by an imperfect linker. Broken annotations are
data, not errors: they are dropped with a warning while the document is kept.
All offsets are Unicode code points.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import date as Date
from typing import Iterable, Mapping

from .errors import DuplicateIdError, RecordError, UnknownIdError
from .kb_graph import EntityId, EntityNode, KnowledgeGraph, extract_clues

DocId = str


@dataclass(frozen=True)
class EntityAnnotation:
    entity: EntityId
    begin: int
    end: int
    surface: str
    confidence: float


@dataclass(frozen=True)
class AnnotatedDocument:
    doc_id: DocId
    text: str
    date: Date
    speaker: str
    party: str
    debate_title: str
    annotations: tuple[EntityAnnotation, ...] = ()

    @property
    def year(self) -> int:
        return self.date.year


_DOC_FIELDS = ("doc_id", "text", "date", "speaker", "party", "debate_title", "annotations")


def _check_annotation(raw: object, text: str) -> EntityAnnotation | str:
    """Return a validated annotation, or a reason string when it must be dropped."""
    if not isinstance(raw, dict):
        return "annotation is not an object"
    entity = raw.get("entity")
    begin = raw.get("begin")
    end = raw.get("end")
    surface = raw.get("surface")
    confidence = raw.get("confidence")
    if not isinstance(entity, str) or not entity:
        return "missing or empty entity id"
    if not isinstance(begin, int) or not isinstance(end, int) or isinstance(begin, bool) or isinstance(end, bool):
        return "offsets must be integers"
    if begin < 0 or begin >= end or end > len(text):
        return f"offsets [{begin}, {end}) out of bounds for text of length {len(text)}"
    if not isinstance(surface, str) or text[begin:end] != surface:
        return f"surface form does not match text slice at [{begin}, {end})"
    if not isinstance(confidence, (int, float)) or isinstance(confidence, bool) or not 0 <= confidence <= 1:
        return "confidence outside [0, 1]"
    return EntityAnnotation(entity=entity, begin=begin, end=end, surface=surface,
                            confidence=float(confidence))


def parse_record(raw: dict, line_no: int | None = None) -> tuple[AnnotatedDocument, list[str]]:
    """Build one document from a decoded corpus record; unknown keys are ignored."""
    for name in _DOC_FIELDS:
        if name not in raw:
            raise RecordError(f"missing field {name!r}", line_no)
    doc_id = raw["doc_id"]
    text = raw["text"]
    if not isinstance(doc_id, str) or not doc_id:
        raise RecordError("doc_id must be a non-empty string", line_no)
    if not isinstance(text, str):
        raise RecordError("text must be a string", line_no)
    for name in ("speaker", "party", "debate_title"):
        if not isinstance(raw[name], str):
            raise RecordError(f"{name} must be a string", line_no)
    if not isinstance(raw["date"], str):
        raise RecordError("date must be an ISO-8601 string", line_no)
    try:
        doc_date = Date.fromisoformat(raw["date"])
    except ValueError:
        raise RecordError(f"invalid date {raw['date']!r}", line_no) from None
    if not isinstance(raw["annotations"], list):
        raise RecordError("annotations must be an array", line_no)

    warnings = []
    kept = []
    for ann_raw in raw["annotations"]:
        result = _check_annotation(ann_raw, text)
        if isinstance(result, str):
            warnings.append(f"doc {doc_id}: dropped annotation: {result}")
        else:
            kept.append(result)
    kept.sort(key=lambda a: (a.begin, a.end, a.entity))
    doc = AnnotatedDocument(
        doc_id=doc_id, text=text, date=doc_date, speaker=raw["speaker"],
        party=raw["party"], debate_title=raw["debate_title"], annotations=tuple(kept),
    )
    return doc, warnings


def parse_corpus(source: Iterable[str]) -> tuple[list[AnnotatedDocument], list[str]]:
    """Parse a JSON-lines corpus stream into documents plus dropped-annotation warnings.

    Malformed records and duplicate doc ids are hard errors; invalid
    annotations inside an otherwise valid record only produce warnings.
    """
    documents: list[AnnotatedDocument] = []
    seen: set[DocId] = set()
    warnings: list[str] = []
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordError(f"invalid JSON: {exc.msg}", line_no) from None
        if not isinstance(raw, dict):
            raise RecordError("record is not a JSON object", line_no)
        doc, doc_warnings = parse_record(raw, line_no)
        if doc.doc_id in seen:
            raise DuplicateIdError(doc.doc_id, f"line {line_no}: duplicate doc_id {doc.doc_id!r}")
        seen.add(doc.doc_id)
        warnings.extend(doc_warnings)
        documents.append(doc)
    return documents, warnings


def document_to_record(doc: AnnotatedDocument) -> dict:
    return {
        "doc_id": doc.doc_id,
        "date": doc.date.isoformat(),
        "speaker": doc.speaker,
        "party": doc.party,
        "debate_title": doc.debate_title,
        "text": doc.text,
        "annotations": [
            {"entity": a.entity, "begin": a.begin, "end": a.end,
             "surface": a.surface, "confidence": a.confidence}
            for a in doc.annotations
        ],
    }


def serialize_corpus(documents: Iterable[AnnotatedDocument]) -> str:
    return "".join(
        json.dumps(document_to_record(doc), ensure_ascii=False) + "\n"
        for doc in documents
    )


@dataclass(frozen=True)
class FixtureMix:
    """Knobs for the synthetic corpus: parties, date spread, mention density.

    ``entity_weights`` restricts which entities get mentioned and how often;
    None means every graph entity with weight 1. Entities missing from the
    map are never mentioned (they still appear in the truth file at zero).
    """

    parties: tuple[str, ...] = ("Harbor Party", "Meadow Union", "Civic League", "Northern Bloc")
    year_range: tuple[int, int] = (1995, 2014)
    mentions_per_doc: tuple[int, int] = (0, 4)
    entity_weights: Mapping[EntityId, int] | None = None


_TOPICS = (
    "harbor levies", "the charter renewal", "coastal defenses",
    "the spice tariff", "archive funding", "the survey commission",
)
_OPENINGS = (
    "The assembly convened to consider {topic}.",
    "Under a crowded gallery the house took up {topic}.",
    "After the recess the debate on {topic} resumed.",
)
_MENTION_TEMPLATES = (
    "The deliberations returned to {surface} more than once.",
    "One member recalled {surface} at considerable length.",
    "Several speakers cited {surface} in support of the motion.",
    "An amendment referencing {surface} was tabled.",
    "The minutes record a pointed exchange about {surface}.",
)
_FILLERS = (
    "Procedural points took up much of the morning.",
    "The chair urged brevity.",
    "A division was called and the motion carried.",
    "Questions to the minister followed.",
    "The gallery was cleared for the vote.",
)


def build_fixture(
    seed: int,
    n_docs: int,
    graph: KnowledgeGraph,
    mix: FixtureMix = FixtureMix(),
) -> tuple[list[AnnotatedDocument], dict[EntityId, dict[str, int]]]:
    """Deterministically synthesize an annotated corpus with known ground truth.

    Returns the documents and a truth map entity -> {mentions, documents}
    covering every entity in the graph, zero-mention ones included.
    """
    if n_docs <= 0:
        raise ValueError(f"n_docs must be positive, got {n_docs}")
    if not graph.entities:
        raise ValueError("fixture generation needs a graph with entities")
    if mix.entity_weights is None:
        weights = {entity: 1 for entity in graph.entities}
    else:
        for entity in mix.entity_weights:
            if entity not in graph.entities:
                raise UnknownIdError(entity, f"weight for unknown entity {entity!r}")
        weights = dict(mix.entity_weights)
    population = sorted(e for e, w in weights.items() if w > 0)
    pop_weights = [weights[e] for e in population]

    rng = random.Random(seed)
    documents = []
    truth = {entity: {"mentions": 0, "documents": 0} for entity in sorted(graph.entities)}
    for i in range(n_docs):
        topic = rng.choice(_TOPICS)
        parts = [rng.choice(_OPENINGS).format(topic=topic)]
        length = len(parts[0])
        annotations = []
        mentioned: set[EntityId] = set()
        n_mentions = rng.randint(*mix.mentions_per_doc) if population else 0
        for _ in range(n_mentions):
            entity = rng.choices(population, weights=pop_weights)[0]
            node = graph.entities[entity]
            surface = node.label or node.id
            template = rng.choice(_MENTION_TEMPLATES)
            prefix = template.split("{surface}")[0]
            sentence = template.format(surface=surface)
            begin = length + 1 + len(prefix)  # +1 for the joining space
            annotations.append(EntityAnnotation(
                entity=entity, begin=begin, end=begin + len(surface),
                surface=surface, confidence=round(0.4 + 0.6 * rng.random(), 2),
            ))
            parts.append(sentence)
            length += 1 + len(sentence)
            truth[entity]["mentions"] += 1
            mentioned.add(entity)
            if rng.random() < 0.5:
                filler = rng.choice(_FILLERS)
                parts.append(filler)
                length += 1 + len(filler)
        for entity in mentioned:
            truth[entity]["documents"] += 1
        documents.append(AnnotatedDocument(
            doc_id=f"doc-{i:04d}",
            text=" ".join(parts),
            date=Date(rng.randint(*mix.year_range), rng.randint(1, 12), rng.randint(1, 28)),
            speaker=f"Member {rng.randint(1, 40):02d}",
            party=rng.choice(mix.parties),
            debate_title=f"Debate on {topic}",
            annotations=tuple(sorted(annotations, key=lambda a: (a.begin, a.end, a.entity))),
        ))
    return documents, truth


def generate_fixture(
    seed: int,
    n_docs: int,
    graph: KnowledgeGraph,
    mix: FixtureMix,
    corpus_path,
    truth_path,
) -> int:
    """Write the synthetic corpus and its truth sidecar; returns document count."""
    documents, truth = build_fixture(seed, n_docs, graph, mix)
    with open(corpus_path, "w", encoding="utf-8") as fh:
        fh.write(serialize_corpus(documents))
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return len(documents)


def demo_graph() -> KnowledgeGraph:
    """A small fixed maritime-history graph for demos and tests.

    Mixes dated, interval-dated, and undated entities, multi-membership, a
    deeper branch, and one broader-edge cycle.
    """
    categories = {
        "c:age_of_sail": "Age of Sail",
        "c:trading_companies": "Chartered Trading Companies",
        "c:naval_battles": "Naval Battles",
        "c:explorers": "Explorers and Cartographers",
        "c:ship_types": "Ship Types",
        "c:port_cities": "Port Cities",
        "c:northern_ports": "Northern Ports",
        "c:monopoly_era": "Monopoly Era",
        "c:steam_transition": "Steam Transition",
    }
    entity_rows = [
        ("e:united_spice_company", "United Spice Company",
         "Chartered in 1602, the company dominated the eastern trade until its dissolution in 1799."),
        ("e:meridian_trading_house", "Meridian Trading House",
         "Founded 1621, collapsed in 1674 after the harbor fire."),
        ("e:polar_fur_exchange", "Polar Fur Exchange",
         "Active 1668-1870 across the northern routes."),
        ("e:silk_route_consortium", "Silk Route Consortium",
         "A loose alliance of merchant families along the overland routes."),
        ("e:battle_of_narrow_sound", "Battle of the Narrow Sound",
         "Fought in 1639 between rival fleets at the mouth of the sound."),
        ("e:raid_on_tin_islands", "Raid on the Tin Islands",
         "A raid of 1667 remembered for the towed flagship."),
        ("e:battle_of_pearl_banks", "Battle of the Pearl Banks",
         "An engagement of 1816 that ended the corsair tolls."),
        ("e:adrian_veld", "Adrian Veld",
         "Adrian Veld, 1587-1629, charted the southern passage."),
        ("e:maren_koster", "Maren Koster",
         "Cartographer of the estuary school, 1601-1665."),
        ("e:yusuf_al_tayyar", "Yusuf al-Tayyar",
         "Navigator celebrated in port ballads; no reliable dates survive."),
        ("e:fluyt_hendrika", "Fluyt Hendrika",
         "A cargo hull of the type developed around 1590."),
        ("e:galleon_nova", "Galleon Nova",
         "Refitted class of 1712 built for the southern convoys."),
        ("e:ironclad_meridian", "Ironclad Meridian",
         "Launched 1860, the last hull of the old yard."),
        ("e:harbor_of_velsund", "Harbor of Velsund",
         "The harbor grew rapidly after 1610 behind the new mole."),
        ("e:port_anker", "Port Anker",
         "Its charter of 1350 predates the boom era by centuries."),
        ("e:fogbay", "Fogbay",
         "A fishing town of shifting sandbanks and uncertain records."),
        ("e:tariff_wars", "Tariff Wars",
         "Recurring disputes, 1652-1784, over the tenth-penny levies."),
        ("e:coalferry_line", "Coalferry Line",
         "Opened 1841 as the first scheduled steam crossing."),
        ("e:last_clipper", "Last Clipper",
         "Launched 1869 and scrapped 1907 after the canal took the tea trade."),
    ]
    entities = {
        eid: EntityNode(id=eid, label=label, description=desc, clues=extract_clues(desc))
        for eid, label, desc in entity_rows
    }
    from .kb_graph import EdgeKind  # local import keeps module top uncluttered

    B, M = EdgeKind.BROADER, EdgeKind.MEMBER_OF
    edges = {
        ("c:trading_companies", B, "c:age_of_sail"),
        ("c:naval_battles", B, "c:age_of_sail"),
        ("c:explorers", B, "c:age_of_sail"),
        ("c:ship_types", B, "c:age_of_sail"),
        ("c:port_cities", B, "c:age_of_sail"),
        ("c:northern_ports", B, "c:port_cities"),
        # Deliberate cycle: the monopoly era and its companies reference each other.
        ("c:monopoly_era", B, "c:trading_companies"),
        ("c:trading_companies", B, "c:monopoly_era"),
        ("e:united_spice_company", M, "c:trading_companies"),
        ("e:united_spice_company", M, "c:monopoly_era"),
        ("e:meridian_trading_house", M, "c:trading_companies"),
        ("e:polar_fur_exchange", M, "c:trading_companies"),
        ("e:silk_route_consortium", M, "c:trading_companies"),
        ("e:battle_of_narrow_sound", M, "c:naval_battles"),
        ("e:raid_on_tin_islands", M, "c:naval_battles"),
        ("e:battle_of_pearl_banks", M, "c:naval_battles"),
        ("e:adrian_veld", M, "c:explorers"),
        ("e:maren_koster", M, "c:explorers"),
        ("e:yusuf_al_tayyar", M, "c:explorers"),
        ("e:fluyt_hendrika", M, "c:ship_types"),
        ("e:galleon_nova", M, "c:ship_types"),
        ("e:ironclad_meridian", M, "c:ship_types"),
        ("e:harbor_of_velsund", M, "c:northern_ports"),
        ("e:port_anker", M, "c:northern_ports"),
        ("e:fogbay", M, "c:northern_ports"),
        ("e:tariff_wars", M, "c:monopoly_era"),
        ("e:coalferry_line", M, "c:steam_transition"),
        ("e:last_clipper", M, "c:steam_transition"),
    }
    return KnowledgeGraph(categories=categories, entities=entities, edges=frozenset(edges))


def demo_mix() -> FixtureMix:
    """Mention weights for the demo graph: a few loud entities, two silent ones."""
    graph = demo_graph()
    weights = {entity: 1 for entity in graph.entities}
    weights["e:united_spice_company"] = 4
    weights["e:battle_of_narrow_sound"] = 3
    weights["e:tariff_wars"] = 2
    weights["e:fogbay"] = 0
    weights["e:yusuf_al_tayyar"] = 0
    return FixtureMix(entity_weights=weights)
