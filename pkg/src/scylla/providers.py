"""Translation and bilingual-dictionary providers.

The pipelines only ever talk to two small interfaces: an NMT provider with
``translate(request) -> [TranslationHypothesis]`` and a dictionary with
``lookup(word, source_language, target_language) -> DictionaryEntry | None``.
Deterministic table-driven mocks back all tests; a generic HTTP provider
covers live services without any vendor SDK.

Provider configuration lives in a JSON file (paths are resolved relative to
the file).  Mock configs name a table file; HTTP configs carry the endpoint
template, auth header/env-var names, response field paths, no-translate
delimiters and the retry policy.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import requests


class TransportError(Exception):
    """Network-level failure; safe to retry."""


class ProviderError(Exception):
    """The provider answered with an error; retrying will not help."""


class UnsupportedLanguageError(ProviderError):
    pass


@dataclass(frozen=True)
class TranslationRequest:
    source_text: str
    source_language: str
    target_language: str
    n_best: int = 1
    copy_unknown: bool = False

    def __post_init__(self):
        if self.n_best < 1:
            raise ValueError(f"n_best must be >= 1, got {self.n_best}")


@dataclass(frozen=True)
class TranslationHypothesis:
    text: str
    rank: int
    score: float | None = None


@dataclass(frozen=True)
class DictionaryEntry:
    headword: str
    language: str
    translations: tuple[str, ...]
    synonyms: tuple[str, ...] = ()
    lemma: str | None = None


class MockTranslationProvider:
    """Table-driven provider: maps exact source text to a ranked hypothesis list.

    Identical requests always get byte-identical responses.  With
    ``copy_unknown`` set, unknown inputs are copied through verbatim as the
    single hypothesis, mirroring the copy-unknown setting of real systems.
    """

    def __init__(self, table: dict[str, list[str]], languages: tuple[str, str] | None = None):
        self.table = {k.strip(): list(v) for k, v in table.items()}
        self.languages = languages
        self.no_translate_delimiters: tuple[str, str] | None = None

    @classmethod
    def from_file(cls, path: str | Path) -> "MockTranslationProvider":
        table: dict[str, list[str]] = {}
        current: str | None = None
        for line_no, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            tag, sep, rest = line.partition("\t")
            if not sep:
                raise ProviderError(f"{path}:{line_no}: expected 'SRC<TAB>text' or 'HYP<TAB>text'")
            if tag == "SRC":
                current = rest.strip()
                table.setdefault(current, [])
            elif tag == "HYP":
                if current is None:
                    raise ProviderError(f"{path}:{line_no}: HYP before any SRC")
                table[current].append(rest.strip())
            else:
                raise ProviderError(f"{path}:{line_no}: unknown tag {tag!r}")
        return cls(table)

    def translate(self, request: TranslationRequest) -> list[TranslationHypothesis]:
        if self.languages is not None and (request.source_language, request.target_language) != self.languages:
            raise UnsupportedLanguageError(
                f"mock configured for {self.languages}, got "
                f"({request.source_language!r}, {request.target_language!r})"
            )
        key = request.source_text.strip()
        texts = self.table.get(key)
        if texts is None or not texts:
            if request.copy_unknown:
                texts = [key]
            else:
                raise ProviderError(f"no mock translation for {key!r}")
        texts = texts[: request.n_best]
        return [TranslationHypothesis(text=t, rank=i + 1) for i, t in enumerate(texts)]


def _walk_path(payload, path: str):
    cur = payload
    for part in path.split("."):
        if isinstance(cur, list):
            cur = cur[int(part)]
        else:
            cur = cur[part]
    return cur


class HttpTranslationProvider:
    """Generic HTTP provider configured with an endpoint and field paths.

    The request body template may reference ``{text}``, ``{source}``,
    ``{target}`` and ``{n_best}``.  ``hypotheses_path`` is a dot path to the
    list of hypotheses in the JSON response and ``text_field`` the key of
    each hypothesis text.  HTTP errors raise :class:`ProviderError`;
    connection problems raise :class:`TransportError`.
    """

    def __init__(
        self,
        endpoint: str,
        *,
        method: str = "POST",
        body_template: dict | None = None,
        hypotheses_path: str = "translations",
        text_field: str = "text",
        auth_env: str | None = None,
        auth_header: str = "Authorization",
        auth_scheme: str = "Bearer",
        no_translate_delimiters: tuple[str, str] | None = None,
        timeout: float = 30.0,
        session=None,
    ):
        self.endpoint = endpoint
        self.method = method
        self.body_template = body_template or {"q": "{text}", "source": "{source}", "target": "{target}", "n": "{n_best}"}
        self.hypotheses_path = hypotheses_path
        self.text_field = text_field
        self.auth_env = auth_env
        self.auth_header = auth_header
        self.auth_scheme = auth_scheme
        self.no_translate_delimiters = tuple(no_translate_delimiters) if no_translate_delimiters else None
        self.timeout = timeout
        self.session = session or requests.Session()

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.auth_env:
            import os

            token = os.environ.get(self.auth_env)
            if not token:
                raise ProviderError(f"credential environment variable {self.auth_env!r} is not set")
            value = f"{self.auth_scheme} {token}".strip() if self.auth_scheme else token
            headers[self.auth_header] = value
        return headers

    def _fill(self, value):
        if isinstance(value, str):
            return (
                value.replace("{text}", "\0text\0")
                .replace("{source}", "\0source\0")
                .replace("{target}", "\0target\0")
                .replace("{n_best}", "\0n_best\0")
            )
        return value

    def translate(self, request: TranslationRequest) -> list[TranslationHypothesis]:
        subst = {
            "\0text\0": request.source_text,
            "\0source\0": request.source_language,
            "\0target\0": request.target_language,
            "\0n_best\0": str(request.n_best),
        }

        def render(value):
            if isinstance(value, dict):
                return {k: render(v) for k, v in value.items()}
            if isinstance(value, list):
                return [render(v) for v in value]
            if isinstance(value, str):
                out = self._fill(value)
                for marker, real in subst.items():
                    out = out.replace(marker, real)
                return out
            return value

        body = render(self.body_template)
        try:
            response = self.session.request(
                self.method, self.endpoint, json=body, headers=self._headers(), timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if response.status_code >= 400:
            raise ProviderError(f"provider returned {response.status_code}: {response.text[:500]}")
        try:
            payload = response.json()
            items = _walk_path(payload, self.hypotheses_path)
            texts = [item[self.text_field] if isinstance(item, dict) else str(item) for item in items]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from exc
        if not texts:
            raise ProviderError("provider returned no hypotheses")
        texts = texts[: request.n_best]
        return [TranslationHypothesis(text=t, rank=i + 1) for i, t in enumerate(texts)]


class RetryingProvider:
    """Retries transport errors with exponential backoff; provider errors pass through."""

    def __init__(self, inner, max_attempts: int = 3, backoff_seconds: float = 0.1, sleep=time.sleep):
        self.inner = inner
        self.max_attempts = max(1, max_attempts)
        self.backoff_seconds = backoff_seconds
        self._sleep = sleep

    @property
    def no_translate_delimiters(self):
        return getattr(self.inner, "no_translate_delimiters", None)

    def translate(self, request: TranslationRequest) -> list[TranslationHypothesis]:
        delay = self.backoff_seconds
        for attempt in range(1, self.max_attempts + 1):
            try:
                return self.inner.translate(request)
            except TransportError:
                if attempt == self.max_attempts:
                    raise
                self._sleep(delay)
                delay *= 2
        raise AssertionError("unreachable")


class CachedProvider:
    """In-memory response cache; concurrent reads, serialized writes.

    Caching never changes observable results, only the number of calls that
    reach the wrapped provider.
    """

    def __init__(self, inner):
        self.inner = inner
        self._cache: dict[TranslationRequest, list[TranslationHypothesis]] = {}
        self._lock = threading.Lock()
        self.calls = 0

    @property
    def no_translate_delimiters(self):
        return getattr(self.inner, "no_translate_delimiters", None)

    def translate(self, request: TranslationRequest) -> list[TranslationHypothesis]:
        hit = self._cache.get(request)
        if hit is not None:
            return list(hit)
        result = self.inner.translate(request)
        self.calls += 1
        with self._lock:
            self._cache[request] = list(result)
        return list(result)


class FileDictionary:
    """Headword-keyed bilingual dictionary loaded from a tab-separated file.

    Record format (``-`` for an empty field)::

        ENTRY <headword> <language> <target_language> <translations> <synonyms> <lemma>

    ``translations`` and ``synonyms`` are comma-separated; ``lemma`` gives
    the base form for inflected headwords so target-side analysis can map
    surface forms onto lexicon lemmas.
    """

    def __init__(self, entries: dict[tuple[str, str, str], DictionaryEntry]):
        self._entries = entries

    @classmethod
    def from_file(cls, path: str | Path) -> "FileDictionary":
        entries: dict[tuple[str, str, str], DictionaryEntry] = {}
        for line_no, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if cols[0] != "ENTRY" or len(cols) != 7:
                raise ProviderError(
                    f"{path}:{line_no}: expected "
                    "'ENTRY<TAB>headword<TAB>lang<TAB>target<TAB>translations<TAB>synonyms<TAB>lemma'"
                )
            _, headword, lang, target, translations, synonyms, lemma = cols

            def split(fld: str) -> tuple[str, ...]:
                if not fld or fld == "-":
                    return ()
                return tuple(s.strip() for s in fld.split(",") if s.strip())

            entry = DictionaryEntry(
                headword=headword,
                language=lang,
                translations=split(translations),
                synonyms=split(synonyms),
                lemma=None if lemma in ("", "-") else lemma,
            )
            if not entry.translations:
                raise ProviderError(f"{path}:{line_no}: entry {headword!r} has no translations")
            entries[(headword.casefold(), lang, target)] = entry
        return cls(entries)

    def lookup(self, word: str, source_language: str, target_language: str) -> DictionaryEntry | None:
        return self._entries.get((word.casefold(), source_language, target_language))


class NullDictionary:
    """Dictionary that knows nothing; lets pipelines run lexicon-only."""

    def lookup(self, word: str, source_language: str, target_language: str) -> DictionaryEntry | None:
        return None


def strip_no_translate(text: str, delimiters: tuple[str, str] | None) -> str:
    if not delimiters:
        return text
    open_d, close_d = delimiters
    return text.replace(open_d, "").replace(close_d, "")


def load_provider(config_path: str | Path, session=None):
    """Build a provider from a JSON config file; see the module docstring."""
    path = Path(config_path)
    config = json.loads(path.read_text("utf-8"))
    kind = config.get("type")
    if kind == "mock":
        table_path = path.parent / config["table"]
        provider = MockTranslationProvider.from_file(table_path)
        if config.get("no_translate_delimiters"):
            provider.no_translate_delimiters = tuple(config["no_translate_delimiters"])
    elif kind == "http":
        provider = HttpTranslationProvider(
            endpoint=config["endpoint"],
            method=config.get("method", "POST"),
            body_template=config.get("body_template"),
            hypotheses_path=config.get("hypotheses_path", "translations"),
            text_field=config.get("text_field", "text"),
            auth_env=config.get("auth_env"),
            auth_header=config.get("auth_header", "Authorization"),
            auth_scheme=config.get("auth_scheme", "Bearer"),
            no_translate_delimiters=config.get("no_translate_delimiters"),
            timeout=config.get("timeout", 30.0),
            session=session,
        )
    else:
        raise ProviderError(f"unknown provider type {kind!r} in {path}")
    retry = config.get("retry", {})
    wrapped = RetryingProvider(
        provider,
        max_attempts=retry.get("max_attempts", 3),
        backoff_seconds=retry.get("backoff_seconds", 0.1),
    )
    if config.get("cache"):
        return CachedProvider(wrapped)
    return wrapped


def load_dictionary(config_path: str | Path):
    path = Path(config_path)
    config = json.loads(path.read_text("utf-8"))
    kind = config.get("type")
    if kind == "file":
        return FileDictionary.from_file(path.parent / config["path"])
    if kind == "null":
        return NullDictionary()
    raise ProviderError(f"unknown dictionary type {kind!r} in {path}")
