"""Multilingual qualia-enriched frame lexicon: data model, loader and queries.

The lexicon is a line-oriented, tab-separated text format (UTF-8, ``#``
comments) so that desk-scale lexica can be written and diffed by hand.
Record types, one per line:

    LEXICON <name>
    DOMAIN  <frame>
    FRAME   <name> [definition]
    FE      <owner_frame> <name> <core|non_core>
    FREL    <inheritance|perspective_on|subframe|using> <parent> <child>
    FEREL   <owner_frame> <fe_name> <target_frame>
    LU      <language> <lemma> <pos> <frame> [equivalents]
    TQR     <quale> <relation_key> <frame> <fe1> <fe2> <lu_ref> <lu_ref>

LU references have the form ``language:lemma.pos@Frame`` and the optional
``equivalents`` column is a comma-separated list of them.  Equivalence is
closed symmetrically at load time.  Ternary qualia relation (TQR) instances
must match one of the 41 relation schemas shipped with the package
(``data/tqr_schemas.lex``), keyed by quale, relation key, mediating frame
and the two core frame elements.

A loaded :class:`Lexicon` is immutable and safe for concurrent reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

QUALIA = ("agentive", "constitutive", "formal", "telic")
POS_TAGS = ("n", "v", "a", "adv", "other")
FRAME_RELATION_TYPES = ("inheritance", "perspective_on", "subframe", "using")
CORENESS = ("core", "non_core")


class LexiconError(Exception):
    """Base class for lexicon loading and query errors."""


class LexiconParseError(LexiconError):
    """Syntactically invalid lexicon file; carries the offending location."""

    def __init__(self, message: str, path: str | None = None, line_no: int | None = None):
        self.path = path
        self.line_no = line_no
        where = f"{path or '<string>'}:{line_no}" if line_no is not None else (path or "<string>")
        super().__init__(f"{where}: {message}")


class DanglingReferenceError(LexiconError):
    """A record references an identifier that does not exist."""

    def __init__(self, missing_id: str, context: str = ""):
        self.missing_id = missing_id
        suffix = f" ({context})" if context else ""
        super().__init__(f"dangling reference: {missing_id!r}{suffix}")


class SchemaViolationError(LexiconError):
    """A TQR instance does not match any loaded relation schema."""


class UnknownLexicalUnitError(LexiconError):
    """Query named a lexical unit that is not in the lexicon."""


@dataclass(frozen=True)
class Frame:
    id: str
    name: str
    frame_elements: tuple[str, ...]
    definition: str | None = None


@dataclass(frozen=True)
class FrameElement:
    id: str
    name: str
    owner_frame: str
    coreness: str


@dataclass(frozen=True)
class LexicalUnit:
    id: str
    lemma: str
    pos: str
    language: str
    evokes: str
    equivalents: tuple[str, ...] = ()


@dataclass(frozen=True)
class FrameRelation:
    relation_type: str
    parent: str
    child: str


@dataclass(frozen=True)
class FeFrameRelation:
    frame_element: str
    target_frame: str


@dataclass(frozen=True)
class TqrSchema:
    quale: str
    relation_key: str
    mediating_frame: str
    fe1: str
    fe2: str

    @property
    def key(self) -> tuple[str, str, str, str, str]:
        return (self.quale, self.relation_key, self.mediating_frame, self.fe1, self.fe2)


@dataclass(frozen=True)
class TernaryQualiaRelation:
    quale: str
    relation_key: str
    mediating_frame: str
    fe1: str
    fe2: str
    lu1: str
    lu2: str


def lu_ref(language: str, lemma: str, pos: str, frame: str) -> str:
    """Canonical LU identifier, also used for cross references in files."""
    return f"{language}:{lemma}.{pos}@{frame}"


def parse_lu_ref(ref: str) -> tuple[str, str, str, str]:
    """Split ``language:lemma.pos@Frame`` into its four parts."""
    head, sep, frame = ref.partition("@")
    if not sep or not frame:
        raise ValueError(f"bad LU reference (missing @frame): {ref!r}")
    language, sep, rest = head.partition(":")
    if not sep or not language:
        raise ValueError(f"bad LU reference (missing language prefix): {ref!r}")
    lemma, sep, pos = rest.rpartition(".")
    if not sep or not lemma or pos not in POS_TAGS:
        raise ValueError(f"bad LU reference (expected lemma.pos): {ref!r}")
    return language, lemma, pos, frame


def fe_id(owner_frame: str, name: str) -> str:
    return f"{owner_frame}.{name}"


@dataclass(frozen=True)
class Lexicon:
    """Cross-linked, validated lexicon. Do not mutate after load."""

    name: str
    frames: dict[str, Frame]
    frame_elements: dict[str, FrameElement]
    lexical_units: dict[str, LexicalUnit]
    frame_relations: tuple[FrameRelation, ...]
    fe_frame_relations: tuple[FeFrameRelation, ...]
    tqrs: tuple[TernaryQualiaRelation, ...]
    schemas: tuple[TqrSchema, ...]
    domain_frames: tuple[str, ...] = ()
    _lus_by_lemma: dict[tuple[str, str], tuple[str, ...]] = field(default_factory=dict, repr=False)
    _tqrs_by_pair: dict[tuple[str, str], tuple[TernaryQualiaRelation, ...]] = field(
        default_factory=dict, repr=False
    )

    def frame(self, name: str) -> Frame:
        try:
            return self.frames[name]
        except KeyError:
            raise DanglingReferenceError(name, "frame lookup") from None

    def lu(self, ref: str) -> LexicalUnit:
        try:
            return self.lexical_units[ref]
        except KeyError:
            raise UnknownLexicalUnitError(f"unknown lexical unit: {ref!r}") from None

    def languages(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for lu in self.lexical_units.values():
            seen.setdefault(lu.language, None)
        return tuple(seen)

    def mwe_lemmas(self, language: str) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for lu in self.lexical_units.values():
            if lu.language == language and " " in lu.lemma:
                seen.setdefault(lu.lemma, None)
        return tuple(seen)


def lus_for_lemma(lexicon: Lexicon, lemma: str, language: str) -> list[LexicalUnit]:
    """All LUs whose lemma matches under case-insensitive (diacritic-preserving) comparison."""
    ids = lexicon._lus_by_lemma.get((lemma.casefold(), language), ())
    return [lexicon.lexical_units[i] for i in ids]


def qualia_between(
    lexicon: Lexicon, lu_a: LexicalUnit | str, lu_b: LexicalUnit | str
) -> list[TernaryQualiaRelation]:
    """All TQRs linking the two LUs, regardless of argument order."""
    ref_a = lu_a.id if isinstance(lu_a, LexicalUnit) else lu_a
    ref_b = lu_b.id if isinstance(lu_b, LexicalUnit) else lu_b
    lexicon.lu(ref_a)
    lexicon.lu(ref_b)
    pair = (ref_a, ref_b) if ref_a <= ref_b else (ref_b, ref_a)
    return list(lexicon._tqrs_by_pair.get(pair, ()))


def equivalents_of(
    lexicon: Lexicon, lu: LexicalUnit | str, target_language: str
) -> list[LexicalUnit]:
    """Equivalents of an LU in the target language, in declaration order."""
    ref = lu.id if isinstance(lu, LexicalUnit) else lu
    unit = lexicon.lu(ref)
    return [
        lexicon.lexical_units[e]
        for e in unit.equivalents
        if lexicon.lexical_units[e].language == target_language
    ]


def replicate_tqrs(
    lexicon: Lexicon, source_language: str, target_language: str
) -> list[TernaryQualiaRelation]:
    """Replicate source-language TQR instances onto target-language equivalents.

    Each source instance yields one target instance per pair of equivalents
    (cross product), so an instance whose LUs have k1 and k2 target
    equivalents produces k1*k2 instances.
    """
    out: list[TernaryQualiaRelation] = []
    for tqr in lexicon.tqrs:
        lu1 = lexicon.lu(tqr.lu1)
        lu2 = lexicon.lu(tqr.lu2)
        if lu1.language != source_language or lu2.language != source_language:
            continue
        for eq1 in equivalents_of(lexicon, lu1, target_language):
            for eq2 in equivalents_of(lexicon, lu2, target_language):
                out.append(
                    TernaryQualiaRelation(
                        quale=tqr.quale,
                        relation_key=tqr.relation_key,
                        mediating_frame=tqr.mediating_frame,
                        fe1=tqr.fe1,
                        fe2=tqr.fe2,
                        lu1=eq1.id,
                        lu2=eq2.id,
                    )
                )
    return out


def _read_records(text: str, path: str | None) -> list[tuple[int, list[str]]]:
    records = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        records.append((line_no, line.split("\t")))
    return records


def load_tqr_schemas(path: str | Path | None = None) -> tuple[TqrSchema, ...]:
    """Load the TQR schema table; defaults to the bundled 41-schema file."""
    if path is None:
        text = resources.files("scylla").joinpath("data/tqr_schemas.lex").read_text("utf-8")
        src = "<bundled tqr_schemas.lex>"
    else:
        text = Path(path).read_text("utf-8")
        src = str(path)
    schemas: list[TqrSchema] = []
    seen: set[tuple[str, str, str, str, str]] = set()
    for line_no, fields_ in _read_records(text, src):
        if fields_[0] != "TQRSCHEMA" or len(fields_) != 6:
            raise LexiconParseError(
                f"expected 'TQRSCHEMA<TAB>quale<TAB>key<TAB>frame<TAB>fe1<TAB>fe2', got {fields_!r}",
                src,
                line_no,
            )
        _, quale, key, frame, fe1, fe2 = fields_
        if quale not in QUALIA:
            raise LexiconParseError(f"unknown quale {quale!r}", src, line_no)
        schema = TqrSchema(quale, key, frame, fe1, fe2)
        if schema.key in seen:
            raise LexiconParseError(f"duplicate schema {schema.key!r}", src, line_no)
        seen.add(schema.key)
        schemas.append(schema)
    return tuple(schemas)


@dataclass
class ValidationIssue:
    """One machine-readable invariant violation found while loading."""

    code: str
    message: str
    line_no: int | None = None

    def as_dict(self) -> dict:
        d = {"code": self.code, "message": self.message}
        if self.line_no is not None:
            d["line"] = self.line_no
        return d


class LexiconValidationError(LexiconError):
    """Raised when semantic validation fails; carries every issue found."""

    def __init__(self, issues: list[ValidationIssue]):
        self.issues = issues
        first = issues[0]
        more = f" (+{len(issues) - 1} more)" if len(issues) > 1 else ""
        super().__init__(f"{first.code}: {first.message}{more}")


def load_lexicon(
    path: str | Path, schemas: Sequence[TqrSchema] | None = None
) -> Lexicon:
    """Load and validate a lexicon file.

    Raises :class:`LexiconParseError` for malformed lines and a typed
    :class:`LexiconError` subclass (with an ``issues`` list where applicable)
    for referential or schema violations.
    """
    p = Path(path)
    return loads_lexicon(p.read_text("utf-8"), schemas=schemas, source=str(p))


def loads_lexicon(
    text: str,
    schemas: Sequence[TqrSchema] | None = None,
    source: str | None = None,
) -> Lexicon:
    schema_table = tuple(schemas) if schemas is not None else load_tqr_schemas()
    schema_keys = {s.key for s in schema_table}

    name: str | None = None
    domain: list[str] = []
    frames: dict[str, Frame] = {}
    frame_fes: dict[str, list[str]] = {}
    frame_defs: dict[str, str | None] = {}
    fes: dict[str, FrameElement] = {}
    lus: dict[str, LexicalUnit] = {}
    lu_equivalents: dict[str, list[str]] = {}
    pending_equivalents: list[tuple[int, str, str]] = []
    frels: list[FrameRelation] = []
    ferels: list[tuple[int, str, str, str]] = []
    tqrs: list[tuple[int, TernaryQualiaRelation]] = []

    issues: list[ValidationIssue] = []

    def fail(message: str, line_no: int):
        raise LexiconParseError(message, source, line_no)

    records = _read_records(text, source)
    if not records or records[0][1][0] != "LEXICON":
        line = records[0][0] if records else 1
        fail("file must start with a 'LEXICON<TAB>name' header record", line)

    for line_no, f in records:
        tag = f[0]
        if tag == "LEXICON":
            if len(f) != 2:
                fail("LEXICON record takes exactly one field (the name)", line_no)
            if name is not None:
                fail("duplicate LEXICON header", line_no)
            name = f[1]
        elif tag == "DOMAIN":
            if len(f) != 2:
                fail("DOMAIN record takes exactly one field (a frame name)", line_no)
            domain.append(f[1])
        elif tag == "FRAME":
            if len(f) not in (2, 3):
                fail("FRAME record: FRAME<TAB>name[<TAB>definition]", line_no)
            fname = f[1]
            if fname in frames:
                issues.append(
                    ValidationIssue("duplicate-frame", f"frame {fname!r} declared twice", line_no)
                )
                continue
            frames[fname] = Frame(id=fname, name=fname, frame_elements=())
            frame_fes[fname] = []
            frame_defs[fname] = f[2] if len(f) == 3 else None
        elif tag == "FE":
            if len(f) != 4:
                fail("FE record: FE<TAB>owner_frame<TAB>name<TAB>core|non_core", line_no)
            owner, fename, coreness = f[1], f[2], f[3]
            if coreness not in CORENESS:
                fail(f"coreness must be one of {CORENESS}, got {coreness!r}", line_no)
            if owner not in frames:
                issues.append(
                    ValidationIssue(
                        "dangling-frame", f"FE {fename!r} declared for unknown frame {owner!r}", line_no
                    )
                )
                continue
            ident = fe_id(owner, fename)
            if ident in fes:
                issues.append(
                    ValidationIssue(
                        "duplicate-fe", f"frame element {fename!r} declared twice in {owner!r}", line_no
                    )
                )
                continue
            fes[ident] = FrameElement(id=ident, name=fename, owner_frame=owner, coreness=coreness)
            frame_fes[owner].append(ident)
        elif tag == "FREL":
            if len(f) != 4:
                fail("FREL record: FREL<TAB>type<TAB>parent<TAB>child", line_no)
            rtype, parent, child = f[1], f[2], f[3]
            if rtype not in FRAME_RELATION_TYPES:
                fail(f"relation type must be one of {FRAME_RELATION_TYPES}, got {rtype!r}", line_no)
            if parent == child:
                issues.append(
                    ValidationIssue("self-relation", f"frame relation {parent!r} -> itself", line_no)
                )
                continue
            for fr in (parent, child):
                if fr not in frames:
                    issues.append(
                        ValidationIssue("dangling-frame", f"FREL references unknown frame {fr!r}", line_no)
                    )
            frels.append(FrameRelation(relation_type=rtype, parent=parent, child=child))
        elif tag == "FEREL":
            if len(f) != 4:
                fail("FEREL record: FEREL<TAB>owner_frame<TAB>fe_name<TAB>target_frame", line_no)
            ferels.append((line_no, f[1], f[2], f[3]))
        elif tag == "LU":
            if len(f) not in (5, 6):
                fail("LU record: LU<TAB>language<TAB>lemma<TAB>pos<TAB>frame[<TAB>equivalents]", line_no)
            language, lemma, pos, frame = f[1], f[2], f[3], f[4]
            if pos not in POS_TAGS:
                fail(f"pos must be one of {POS_TAGS}, got {pos!r}", line_no)
            ident = lu_ref(language, lemma, pos, frame)
            if ident in lus:
                issues.append(
                    ValidationIssue("duplicate-lu", f"lexical unit {ident!r} declared twice", line_no)
                )
                continue
            if frame not in frames:
                issues.append(
                    ValidationIssue("dangling-frame", f"LU {ident!r} evokes unknown frame {frame!r}", line_no)
                )
                continue
            lus[ident] = LexicalUnit(id=ident, lemma=lemma, pos=pos, language=language, evokes=frame)
            lu_equivalents[ident] = []
            if len(f) == 6 and f[5] and f[5] != "-":
                for ref in f[5].split(","):
                    pending_equivalents.append((line_no, ident, ref.strip()))
        elif tag == "TQR":
            if len(f) != 8:
                fail(
                    "TQR record: TQR<TAB>quale<TAB>key<TAB>frame<TAB>fe1<TAB>fe2<TAB>lu_ref<TAB>lu_ref",
                    line_no,
                )
            quale, key, frame, fe1, fe2, ref1, ref2 = f[1], f[2], f[3], f[4], f[5], f[6], f[7]
            if quale not in QUALIA:
                fail(f"quale must be one of {QUALIA}, got {quale!r}", line_no)
            tqrs.append(
                (
                    line_no,
                    TernaryQualiaRelation(
                        quale=quale,
                        relation_key=key,
                        mediating_frame=frame,
                        fe1=fe_id(frame, fe1),
                        fe2=fe_id(frame, fe2),
                        lu1=ref1,
                        lu2=ref2,
                    ),
                )
            )
        else:
            fail(f"unknown record tag {tag!r}", line_no)

    # Cross-linking passes: resolve references declared in any order.
    for line_no, owner, fename, target in ferels:
        ident = fe_id(owner, fename)
        if ident not in fes:
            issues.append(
                ValidationIssue("dangling-fe", f"FEREL references unknown frame element {ident!r}", line_no)
            )
            continue
        if target not in frames:
            issues.append(
                ValidationIssue("dangling-frame", f"FEREL references unknown frame {target!r}", line_no)
            )
            continue

    for line_no, owner_id, ref in pending_equivalents:
        if ref not in lus:
            issues.append(
                ValidationIssue("dangling-lu", f"equivalent reference to unknown LU {ref!r}", line_no)
            )
            continue
        if lus[ref].language == lus[owner_id].language:
            issues.append(
                ValidationIssue(
                    "same-language-equivalent",
                    f"{owner_id!r} lists {ref!r} as equivalent in the same language",
                    line_no,
                )
            )
            continue
        if ref not in lu_equivalents[owner_id]:
            lu_equivalents[owner_id].append(ref)
        # Symmetric closure: authors only need to declare one direction.
        if owner_id not in lu_equivalents[ref]:
            lu_equivalents[ref].append(owner_id)

    for fr in domain:
        if fr not in frames:
            issues.append(ValidationIssue("dangling-frame", f"DOMAIN names unknown frame {fr!r}"))

    checked_tqrs: list[TernaryQualiaRelation] = []
    for line_no, tqr in tqrs:
        ok = True
        if tqr.mediating_frame not in frames:
            issues.append(
                ValidationIssue(
                    "dangling-frame", f"TQR mediated by unknown frame {tqr.mediating_frame!r}", line_no
                )
            )
            ok = False
        for fe_ref in (tqr.fe1, tqr.fe2):
            fe = fes.get(fe_ref)
            if fe is None:
                issues.append(
                    ValidationIssue("dangling-fe", f"TQR references unknown frame element {fe_ref!r}", line_no)
                )
                ok = False
            elif fe.coreness != "core":
                issues.append(
                    ValidationIssue(
                        "schema-violation",
                        f"TQR frame element {fe_ref!r} is not core in {tqr.mediating_frame!r}",
                        line_no,
                    )
                )
                ok = False
        for ref in (tqr.lu1, tqr.lu2):
            if ref not in lus:
                issues.append(ValidationIssue("dangling-lu", f"TQR references unknown LU {ref!r}", line_no))
                ok = False
        if ok:
            fe1name = fes[tqr.fe1].name
            fe2name = fes[tqr.fe2].name
            key = (tqr.quale, tqr.relation_key, tqr.mediating_frame, fe1name, fe2name)
            if key not in schema_keys:
                issues.append(
                    ValidationIssue(
                        "schema-violation",
                        f"TQR {key!r} matches none of the {len(schema_table)} relation schemas",
                        line_no,
                    )
                )
                ok = False
        if ok:
            checked_tqrs.append(tqr)

    if issues:
        # Raise the most specific error type for the first issue; the full
        # machine-readable list rides along for `lex validate`.
        first = issues[0]
        if first.code == "schema-violation":
            err: LexiconError = SchemaViolationError(first.message)
        elif first.code.startswith("dangling"):
            err = DanglingReferenceError(first.message)
        else:
            err = LexiconValidationError(issues)
        err.issues = issues  # type: ignore[attr-defined]
        raise err

    final_frames = {
        fname: Frame(
            id=fname, name=fname, frame_elements=tuple(frame_fes[fname]), definition=frame_defs[fname]
        )
        for fname in frames
    }
    final_lus = {
        ident: LexicalUnit(
            id=ident,
            lemma=lu.lemma,
            pos=lu.pos,
            language=lu.language,
            evokes=lu.evokes,
            equivalents=tuple(lu_equivalents[ident]),
        )
        for ident, lu in lus.items()
    }

    by_lemma: dict[tuple[str, str], list[str]] = {}
    for ident, lu in final_lus.items():
        by_lemma.setdefault((lu.lemma.casefold(), lu.language), []).append(ident)
    by_pair: dict[tuple[str, str], list[TernaryQualiaRelation]] = {}
    for tqr in checked_tqrs:
        pair = (tqr.lu1, tqr.lu2) if tqr.lu1 <= tqr.lu2 else (tqr.lu2, tqr.lu1)
        by_pair.setdefault(pair, []).append(tqr)

    return Lexicon(
        name=name or "",
        frames=final_frames,
        frame_elements=dict(fes),
        lexical_units=final_lus,
        frame_relations=tuple(frels),
        fe_frame_relations=tuple(
            FeFrameRelation(frame_element=fe_id(owner, fename), target_frame=target)
            for _, owner, fename, target in ferels
        ),
        tqrs=tuple(checked_tqrs),
        schemas=schema_table,
        domain_frames=tuple(domain),
        _lus_by_lemma={k: tuple(v) for k, v in by_lemma.items()},
        _tqrs_by_pair={k: tuple(v) for k, v in by_pair.items()},
    )


def collect_issues(path: str | Path, schemas: Sequence[TqrSchema] | None = None) -> list[ValidationIssue]:
    """Validate a lexicon file, returning every issue instead of raising.

    Used by the ``lex validate`` subcommand for its machine-readable output.
    """
    try:
        load_lexicon(path, schemas=schemas)
    except LexiconParseError as exc:
        return [ValidationIssue("parse-error", str(exc), exc.line_no)]
    except LexiconError as exc:
        found = getattr(exc, "issues", None)
        if found:
            return list(found)
        return [ValidationIssue("error", str(exc))]
    return []
