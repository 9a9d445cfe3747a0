"""Spread-activation frame disambiguation over the lexicon's relation graph.

For each sentence a layered graph is built (word form -> lemma -> lexical
unit -> frame -> related frames, plus qualia links between LU peers within
a cluster), energy is seeded at the word forms and propagated forward with a
decaying output function, then pushed back from the frames to the LUs over
reversed links.  Each lemma span is assigned the frame evoked by its
highest-scoring LU.

The propagation schedule is a single layered pass: every node fires once,
in layer order, accumulating inputs additively; qualia contributions are
applied in a micro-pass between the initial LU firing and the frame layer,
using the pre-qualia outputs, so peer links never form cycles.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from scylla.ingest import Cluster, LemmaSpan, ParsedSentence, build_clusters, match_mwes
from scylla.lexicon import Lexicon, LexicalUnit, lus_for_lemma, qualia_between

# Fixed decay weight per relation kind.
LINK_WEIGHTS = {
    "evocation": 1.0,
    "inheritance": 1.0,
    "perspective": 0.9,
    "subframe": 0.8,
    "fe_to_frame": 0.5,
    "qualia": 0.9,
}

# Lexicon frame-relation types mapped onto graph link kinds. "using" has no
# weight in the schedule and is not expanded into the graph.
_FREL_KINDS = {
    "inheritance": "inheritance",
    "perspective_on": "perspective",
    "subframe": "subframe",
}

NODE_KINDS = ("word_form", "lemma", "lu", "frame")


@dataclass
class ActivationNode:
    id: str
    kind: str
    payload: str
    activation: float = 0.0
    output: float = 0.0


@dataclass(frozen=True)
class ActivationLink:
    source: str
    target: str
    weight: float
    relation_kind: str


@dataclass
class ActivationGraph:
    nodes: dict[str, ActivationNode] = field(default_factory=dict)
    links: list[ActivationLink] = field(default_factory=list)

    def add_node(self, node_id: str, kind: str, payload: str) -> ActivationNode:
        if kind not in NODE_KINDS:
            raise ValueError(f"unknown node kind {kind!r}")
        if node_id not in self.nodes:
            self.nodes[node_id] = ActivationNode(id=node_id, kind=kind, payload=payload)
        return self.nodes[node_id]

    def add_link(self, source: str, target: str, relation_kind: str) -> ActivationLink:
        weight = LINK_WEIGHTS[relation_kind]
        link = ActivationLink(source=source, target=target, weight=weight, relation_kind=relation_kind)
        self.links.append(link)
        return link

    def nodes_of_kind(self, kind: str) -> list[ActivationNode]:
        return [n for n in self.nodes.values() if n.kind == kind]

    def dump(self) -> str:
        """Deterministic edge-list text form for debugging and golden tests."""
        lines = []
        for node in sorted(self.nodes.values(), key=lambda n: (n.kind, n.id)):
            lines.append(f"NODE\t{node.id}\t{node.kind}\t{node.payload}\t{node.activation:.9f}\t{node.output:.9f}")
        for link in sorted(self.links, key=lambda l: (l.source, l.target, l.relation_kind)):
            lines.append(f"LINK\t{link.source}\t{link.target}\t{link.relation_kind}\t{link.weight}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FrameAssignment:
    lemma_span: LemmaSpan
    chosen_frame: str
    chosen_lu: str
    lu_scores: dict[str, float]


def output_fn(activation: float) -> float:
    """Decaying output of a node: (1 - exp(-5*A)) / (1 + exp(-A)).

    Strictly increasing, 0 at A=0, and bounded below 1 for finite input so
    repeated accumulation cannot blow up.
    """
    if not math.isfinite(activation) or activation < 0.0:
        raise ValueError(f"activation must be finite and non-negative, got {activation!r}")
    value = (1.0 - math.exp(-5.0 * activation)) / (1.0 + math.exp(-activation))
    # both exponentials underflow past ~A=37; keep the documented open bound
    return min(value, math.nextafter(1.0, 0.0))


def _wf_id(span: LemmaSpan) -> str:
    return f"wf:{span.start}"


def _lemma_id(span: LemmaSpan) -> str:
    return f"lm:{span.start}"


def _lu_id(span: LemmaSpan, lu: LexicalUnit) -> str:
    return f"lu:{span.start}:{lu.id}"


def _frame_id(frame: str) -> str:
    return f"fr:{frame}"


def build_graph(
    clusters: list[Cluster],
    lexicon: Lexicon,
    language: str,
    sentence: ParsedSentence | None = None,
) -> ActivationGraph:
    """Build the activation graph for a clustered sentence.

    Word-form, lemma and LU nodes are per span (senses compete span by
    span); frame nodes are shared so that context accumulates.  Frames one
    relation step away from an evoked frame are included, as are the
    FE-to-frame neighbours; qualia links connect LU peers within a cluster.
    """
    graph = ActivationGraph()
    lu_nodes_by_span: dict[tuple[int, ...], list[tuple[LexicalUnit, str]]] = {}

    for cluster in clusters:
        for span in cluster.members:
            surface = span.surface_lemma
            if sentence is not None:
                surface = " ".join(sentence.token(i).form for i in span.token_indices)
            wf = graph.add_node(_wf_id(span), "word_form", surface)
            lm = graph.add_node(_lemma_id(span), "lemma", span.surface_lemma)
            graph.add_link(wf.id, lm.id, "evocation")
            units = lus_for_lemma(lexicon, span.surface_lemma, language)
            lu_nodes_by_span[span.token_indices] = []
            for lu in units:
                node = graph.add_node(_lu_id(span, lu), "lu", lu.id)
                graph.add_link(lm.id, node.id, "evocation")
                lu_nodes_by_span[span.token_indices].append((lu, node.id))

    # Qualia links between LU instances within the same cluster.
    for cluster in clusters:
        member_lus: list[tuple[LexicalUnit, str]] = []
        for span in cluster.members:
            member_lus.extend(lu_nodes_by_span.get(span.token_indices, ()))
        for i, (lu_a, node_a) in enumerate(member_lus):
            for lu_b, node_b in member_lus[i + 1 :]:
                for _ in qualia_between(lexicon, lu_a, lu_b):
                    graph.add_link(node_a, node_b, "qualia")
                    graph.add_link(node_b, node_a, "qualia")

    # Evoked frames, then frames one relation step away.
    evoked: dict[str, None] = {}
    for units in lu_nodes_by_span.values():
        for lu, node_id in units:
            frame_node = graph.add_node(_frame_id(lu.evokes), "frame", lu.evokes)
            graph.add_link(node_id, frame_node.id, "evocation")
            evoked.setdefault(lu.evokes, None)

    for frame in evoked:
        for rel in lexicon.frame_relations:
            kind = _FREL_KINDS.get(rel.relation_type)
            if kind is None:
                continue
            other = None
            if rel.child == frame:
                other = rel.parent
            elif rel.parent == frame:
                other = rel.child
            if other is None:
                continue
            target = graph.add_node(_frame_id(other), "frame", other)
            graph.add_link(_frame_id(frame), target.id, kind)
        for ferel in lexicon.fe_frame_relations:
            owner = lexicon.frame_elements[ferel.frame_element].owner_frame
            other = None
            if owner == frame:
                other = ferel.target_frame
            elif ferel.target_frame == frame:
                other = owner
            if other is None:
                continue
            target = graph.add_node(_frame_id(other), "frame", other)
            graph.add_link(_frame_id(frame), target.id, "fe_to_frame")

    return graph


def _links_by_phase(graph: ActivationGraph) -> dict[str, list[ActivationLink]]:
    phases: dict[str, list[ActivationLink]] = {
        "wf_lemma": [],
        "lemma_lu": [],
        "qualia": [],
        "evocation": [],
        "frame_frame": [],
    }
    for link in graph.links:
        src = graph.nodes[link.source].kind
        tgt = graph.nodes[link.target].kind
        if src == "word_form" and tgt == "lemma":
            phases["wf_lemma"].append(link)
        elif src == "lemma" and tgt == "lu":
            phases["lemma_lu"].append(link)
        elif src == "lu" and tgt == "lu":
            phases["qualia"].append(link)
        elif src == "lu" and tgt == "frame":
            phases["evocation"].append(link)
        elif src == "frame" and tgt == "frame":
            phases["frame_frame"].append(link)
        else:
            raise ValueError(f"link {link.source}->{link.target} does not fit the layer schedule")
    return phases


def spread(graph: ActivationGraph, seeds: list[str] | None = None) -> ActivationGraph:
    """Seed the word forms at 1.0 and propagate activation out to the frames.

    Accumulation follows A_k = sum_j O_j * W_jk per layer; a node receiving
    from several sources sums their contributions.  Propagation stops once
    the frame layer (including one-step related frames) has fired.
    """
    phases = _links_by_phase(graph)
    if seeds is None:
        seeds = [n.id for n in graph.nodes.values() if n.kind == "word_form"]

    for node in graph.nodes.values():
        node.activation = 0.0
        node.output = 0.0
    for node_id in seeds:
        node = graph.nodes[node_id]
        node.activation = 1.0
        node.output = output_fn(1.0)

    def fire(links: list[ActivationLink]):
        snapshot = {n.id: n.output for n in graph.nodes.values()}
        touched = set()
        for link in links:
            graph.nodes[link.target].activation += snapshot[link.source] * link.weight
            touched.add(link.target)
        for node_id in sorted(touched):
            node = graph.nodes[node_id]
            node.output = output_fn(node.activation)

    fire(phases["wf_lemma"])
    fire(phases["lemma_lu"])
    fire(phases["qualia"])  # peer micro-pass over pre-qualia outputs
    fire(phases["evocation"])
    fire(phases["frame_frame"])  # one step out from the evoked frames
    return graph


def backpropagate(graph: ActivationGraph) -> dict[str, float]:
    """Push frame activation back to the LUs over reversed links.

    Every frame enters the backward pass with its accumulated forward
    activation; reversed frame-frame links fire first, then frames feed
    their LUs, then the qualia micro-pass runs among the LUs.  Returns the
    backward activation per node id (frames and LUs).
    """
    phases = _links_by_phase(graph)
    back: dict[str, float] = {}
    for node in graph.nodes.values():
        if node.kind == "frame":
            back[node.id] = node.activation

    def fire(links: list[ActivationLink], default: float = 0.0):
        snapshot = {nid: output_fn(val) for nid, val in back.items()}
        touched = set()
        for link in links:
            back.setdefault(link.target, default)
            back[link.target] += snapshot.get(link.source, 0.0) * link.weight
            touched.add(link.target)
        return touched

    reversed_frame = [
        ActivationLink(l.target, l.source, l.weight, l.relation_kind) for l in phases["frame_frame"]
    ]
    reversed_evocation = [
        ActivationLink(l.target, l.source, l.weight, l.relation_kind) for l in phases["evocation"]
    ]
    fire(reversed_frame)
    fire(reversed_evocation)
    fire(phases["qualia"])  # reversal of a symmetric pair is the same pair
    return back


def backpropagate_and_score(
    graph: ActivationGraph,
    clusters: list[Cluster],
    lexicon: Lexicon,
    language: str,
) -> list[FrameAssignment]:
    """Assign one frame per span: highest LU relative weight wins.

    The relative weight of an LU is its backward activation divided by the
    number of LUs competing for the same span.  Ties prefer LUs evoking a
    declared domain frame, then the lexicographically first frame name.
    """
    back = backpropagate(graph)
    domain = set(lexicon.domain_frames)
    assignments: list[FrameAssignment] = []
    for cluster in clusters:
        for span in cluster.members:
            units = lus_for_lemma(lexicon, span.surface_lemma, language)
            if not units:
                continue
            scores = {lu.id: back.get(_lu_id(span, lu), 0.0) / len(units) for lu in units}
            best = min(
                units,
                key=lambda lu: (
                    -scores[lu.id],
                    0 if lu.evokes in domain else 1,
                    lu.evokes,
                    lu.id,
                ),
            )
            assignments.append(
                FrameAssignment(
                    lemma_span=span, chosen_frame=best.evokes, chosen_lu=best.id, lu_scores=scores
                )
            )
    assignments.sort(key=lambda a: a.lemma_span.start)
    return assignments


def assignments_for_sentence(
    sentence: ParsedSentence, lexicon: Lexicon, language: str
) -> tuple[list[FrameAssignment], ActivationGraph, list[Cluster]]:
    """Run the full per-sentence pipeline: spans, clusters, graph, spread, scoring."""
    spans = match_mwes(sentence, lexicon, language)
    clusters = build_clusters(sentence, spans)
    graph = build_graph(clusters, lexicon, language, sentence=sentence)
    spread(graph)
    assignments = backpropagate_and_score(graph, clusters, lexicon, language)
    return assignments, graph, clusters


def frames_of_sentence(sentence: ParsedSentence, lexicon: Lexicon, language: str) -> Counter:
    """Multiset of frames chosen for the sentence, one per assigned span."""
    assignments, _, _ = assignments_for_sentence(sentence, lexicon, language)
    return Counter(a.chosen_frame for a in assignments)


def frames_of_clusters(clusters: list[Cluster], lexicon: Lexicon, language: str) -> Counter:
    """Same as :func:`frames_of_sentence` but starting from prebuilt clusters."""
    graph = build_graph(clusters, lexicon, language)
    spread(graph)
    assignments = backpropagate_and_score(graph, clusters, lexicon, language)
    return Counter(a.chosen_frame for a in assignments)
