"""Namespace-aware streaming XML event interface and tolerance policy.

This is the small self-contained pull parser that generated parsers (and
the corpus analyzer) are written against.  It is deliberately minimal:
no DTD processing, UTF-8/UTF-16 with BOM detection only, the five
built-in entities plus numeric character references.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import (
    BadSimpleValueError,
    MalformedXmlError,
    MissingRequiredError,
    UnexpectedTextError,
    UnknownElementError,
)
from .model import QName, XML_NAMESPACE


class EventKind(Enum):
    START_ELEMENT = "start"
    TEXT = "text"
    END_ELEMENT = "end"
    END_DOCUMENT = "end-document"


@dataclass
class XmlEvent:
    kind: EventKind
    name: Optional[QName] = None
    attributes: tuple = ()  # of (QName, str)
    text: str = ""
    line: int = 0
    col: int = 0

    def attr(self, namespace: str, local: str) -> Optional[str]:
        for qn, value in self.attributes:
            if qn.local == local and qn.namespace == namespace:
                return value
        return None


class Violation(Enum):
    UNKNOWN_ELEMENT = "UNKNOWN_ELEMENT"
    MISSING_REQUIRED = "MISSING_REQUIRED"
    BAD_SIMPLE_VALUE = "BAD_SIMPLE_VALUE"
    UNEXPECTED_TEXT = "UNEXPECTED_TEXT"


class Recovery(Enum):
    SKIP_SUBTREE = "skip-subtree"
    LEAVE_ABSENT = "leave-absent"
    KEEP_RAW = "keep-raw"
    DISCARD_TEXT = "discard-text"


_RECOVERY = {
    Violation.UNKNOWN_ELEMENT: Recovery.SKIP_SUBTREE,
    Violation.MISSING_REQUIRED: Recovery.LEAVE_ABSENT,
    Violation.BAD_SIMPLE_VALUE: Recovery.KEEP_RAW,
    Violation.UNEXPECTED_TEXT: Recovery.DISCARD_TEXT,
}

_STRICT_ERROR = {
    Violation.UNKNOWN_ELEMENT: UnknownElementError,
    Violation.MISSING_REQUIRED: MissingRequiredError,
    Violation.BAD_SIMPLE_VALUE: BadSimpleValueError,
    Violation.UNEXPECTED_TEXT: UnexpectedTextError,
}


@dataclass
class ParseWarning:
    line: int
    col: int
    code: str
    message: str
    source: str = "<input>"

    def format(self) -> str:
        return f"WARN {self.source}:{self.line}:{self.col} {self.code} {self.message}"


_NAME_RE = re.compile(r"[A-Za-z_:\u00c0-\U000effff][-.\w:\u00b7\u0300-\u036f\u203f-\u2040\u00c0-\U000effff]*")
_ATTR_RE = re.compile(r"""\s*([^\s=/><'"]+)\s*=\s*("([^"<]*)"|'([^'<]*)')""")
_WS_RE = re.compile(r"\s*")

_BUILTIN_ENTITIES = {"amp": "&", "lt": "<", "gt": ">", "apos": "'", "quot": '"'}


def _decode_source(source) -> str:
    if isinstance(source, str):
        return source
    data = bytes(source)
    if data.startswith(b"\xef\xbb\xbf"):
        return data[3:].decode("utf-8")
    if data.startswith(b"\xff\xfe"):
        return data.decode("utf-16-le")[1:]
    if data.startswith(b"\xfe\xff"):
        return data.decode("utf-16-be")[1:]
    return data.decode("utf-8")


class ParseContext:
    """One streaming parse of one document; not shareable across threads."""

    def __init__(self, source, mode="strict", source_name="<input>", ignore_paths=()):
        if mode not in ("strict", "lenient"):
            raise ValueError(f"mode must be strict or lenient, got {mode!r}")
        try:
            self._text = _decode_source(source)
        except UnicodeDecodeError as exc:
            raise MalformedXmlError(f"undecodable input: {exc}", source=source_name)
        self.mode = mode
        self.source_name = source_name
        self.warnings: list = []
        self.ignore_matcher = compile_ignore_paths(ignore_paths)
        self.open_path: list = []  # QNames of currently open elements
        self._last_event: Optional[XmlEvent] = None
        self._peeked: Optional[XmlEvent] = None
        self._tokens = _Tokenizer(self._text, source_name)
        self._ns_stack = [{"xml": XML_NAMESPACE}]
        self._elem_stack: list = []  # raw (prefix, local) for matching end tags
        self._pending_end: Optional[XmlEvent] = None
        self._done = False
        self._seen_root = False

    # ------------------------------------------------------------ event stream

    def next_event(self) -> XmlEvent:
        if self._peeked is not None:
            ev = self._peeked
            self._peeked = None
        else:
            ev = self._produce()
        self._last_event = ev
        if ev.kind is EventKind.START_ELEMENT:
            self.open_path.append(ev.name)
        elif ev.kind is EventKind.END_ELEMENT:
            self.open_path.pop()
        return ev

    def peek(self) -> XmlEvent:
        if self._peeked is None:
            self._peeked = self._produce()
        return self._peeked

    def skip_subtree(self) -> int:
        """Consume events through the END matching the current START.

        Returns the number of elements skipped, including the subtree root.
        Builds no objects.
        """
        last = self._last_event
        if last is None or last.kind is not EventKind.START_ELEMENT:
            raise MalformedXmlError("skip_subtree requires a current START_ELEMENT",
                                    source=self.source_name)
        count = 1
        depth = 1
        while depth:
            ev = self.next_event()
            if ev.kind is EventKind.START_ELEMENT:
                count += 1
                depth += 1
            elif ev.kind is EventKind.END_ELEMENT:
                depth -= 1
            elif ev.kind is EventKind.END_DOCUMENT:
                raise self._error("unexpected end of document while skipping")
        return count

    # ------------------------------------------------------------ tolerance

    def violation(self, kind: Violation, message: str, line=None, col=None) -> Recovery:
        """Apply the tolerance policy for one validation violation."""
        if line is None and self._last_event is not None:
            line, col = self._last_event.line, self._last_event.col
        if self.mode == "strict":
            raise _STRICT_ERROR[kind](message, line=line, col=col, source=self.source_name)
        self.warnings.append(ParseWarning(line or 0, col or 0, kind.value, message,
                                          self.source_name))
        return _RECOVERY[kind]

    def active_namespaces(self) -> dict:
        """Prefix-to-URI bindings in scope at the last START_ELEMENT."""
        return dict(self._ns_stack[-1])

    def at_ignored_path(self) -> bool:
        return self.ignore_matcher(tuple(self.open_path))

    # ------------------------------------------------------------ internals

    def _error(self, message, pos=None):
        line, col = self._tokens.position(pos)
        return MalformedXmlError(message, line=line, col=col, source=self.source_name)

    def _produce(self) -> XmlEvent:
        if self._done:
            raise MalformedXmlError("read past END_DOCUMENT", source=self.source_name)
        if self._pending_end is not None:
            ev = self._pending_end
            self._pending_end = None
            self._close_element()
            return ev

        tok = self._tokens.next_token(in_document=bool(self._elem_stack))
        if tok.kind == "text":
            if not self._elem_stack:
                if tok.value.strip():
                    raise self._error("text content outside the document element", tok.pos)
                return self._produce()
            line, col = self._tokens.position(tok.pos)
            return XmlEvent(EventKind.TEXT, text=tok.value, line=line, col=col)

        if tok.kind == "start":
            if self._seen_root and not self._elem_stack:
                raise self._error("multiple document elements", tok.pos)
            self._seen_root = True
            return self._start_event(tok)

        if tok.kind == "end":
            return self._end_event(tok)

        if tok.kind == "eof":
            if self._elem_stack:
                raise self._error("unexpected end of input: unterminated element "
                                  f"'{self._elem_stack[-1][2]}'", tok.pos)
            if not self._seen_root:
                raise self._error("no document element", tok.pos)
            self._done = True
            line, col = self._tokens.position(tok.pos)
            return XmlEvent(EventKind.END_DOCUMENT, line=line, col=col)

        raise self._error(f"unexpected token {tok.kind}", tok.pos)

    def _start_event(self, tok) -> XmlEvent:
        raw_name, raw_attrs, self_closing, pos = tok.value
        scope = dict(self._ns_stack[-1])
        plain_attrs = []
        seen_raw = set()
        for raw_attr, value, apos in raw_attrs:
            if raw_attr in seen_raw:
                raise self._error(f"duplicate attribute '{raw_attr}'", apos)
            seen_raw.add(raw_attr)
            if raw_attr == "xmlns":
                scope[""] = value
            elif raw_attr.startswith("xmlns:"):
                prefix = raw_attr[6:]
                if not value:
                    scope.pop(prefix, None)
                else:
                    scope[prefix] = value
            else:
                plain_attrs.append((raw_attr, value, apos))
        self._ns_stack.append(scope)

        prefix, local = _split_prefix(raw_name)
        if prefix:
            if prefix not in scope:
                raise self._error(f"undeclared namespace prefix '{prefix}'", pos)
            ns = scope[prefix]
        else:
            ns = scope.get("", "")
        attributes = []
        seen_qnames = set()
        for raw_attr, value, apos in plain_attrs:
            aprefix, alocal = _split_prefix(raw_attr)
            if aprefix:
                if aprefix not in scope:
                    raise self._error(f"undeclared namespace prefix '{aprefix}'", apos)
                aqn = QName(scope[aprefix], alocal)
            else:
                aqn = QName("", alocal)
            if aqn in seen_qnames:
                raise self._error(f"duplicate attribute '{raw_attr}' after namespace "
                                  "resolution", apos)
            seen_qnames.add(aqn)
            attributes.append((aqn, value))

        line, col = self._tokens.position(pos)
        ev = XmlEvent(EventKind.START_ELEMENT, name=QName(ns, local),
                      attributes=tuple(attributes), line=line, col=col)
        self._elem_stack.append((prefix, local, raw_name))
        if self_closing:
            self._pending_end = XmlEvent(EventKind.END_ELEMENT, name=ev.name,
                                         line=line, col=col)
        return ev

    def _end_event(self, tok) -> XmlEvent:
        raw_name, pos = tok.value
        if not self._elem_stack:
            raise self._error(f"end tag '{raw_name}' with no open element", pos)
        _, _, open_raw = self._elem_stack[-1]
        if raw_name != open_raw:
            raise self._error(f"end tag '{raw_name}' does not match open element "
                              f"'{open_raw}'", pos)
        prefix, local = _split_prefix(raw_name)
        scope = self._ns_stack[-1]
        ns = scope.get(prefix, "") if prefix else scope.get("", "")
        line, col = self._tokens.position(pos)
        ev = XmlEvent(EventKind.END_ELEMENT, name=QName(ns, local), line=line, col=col)
        self._close_element()
        return ev

    def _close_element(self):
        self._elem_stack.pop()
        self._ns_stack.pop()


def _split_prefix(raw: str):
    if ":" in raw:
        prefix, _, local = raw.partition(":")
        if not prefix or not local or ":" in local:
            raise MalformedXmlError(f"malformed qualified name '{raw}'")
        return prefix, local
    return "", raw


# ---------------------------------------------------------------- operations

def next_event(ctx: ParseContext) -> XmlEvent:
    return ctx.next_event()


def skip_subtree(ctx: ParseContext) -> int:
    return ctx.skip_subtree()


def lenient_recover(ctx: ParseContext, violation: Violation, message: str) -> Recovery:
    """Recovery action for a violation; raises the typed error in strict mode."""
    return ctx.violation(violation, message)


def compile_ignore_paths(paths):
    """Compile element-QName paths into a matcher over open-element paths.

    A path matches when the document path from the root equals it exactly.
    """
    compiled = [tuple(p) for p in paths]

    def matcher(open_path: tuple) -> bool:
        return any(open_path == p for p in compiled)

    return matcher


# ---------------------------------------------------------------- tokenizer

@dataclass
class _Token:
    kind: str  # "text" | "start" | "end" | "eof"
    value: object = None
    pos: int = 0


class _Tokenizer:
    """Low-level scanner producing raw tags and decoded text runs."""

    def __init__(self, text: str, source_name: str):
        self._s = text
        self._n = len(text)
        self._pos = 0
        self._source = source_name
        self._line_starts = None

    def position(self, pos=None):
        if pos is None:
            pos = self._pos
        if self._line_starts is None:
            starts = [0]
            idx = self._s.find("\n")
            while idx != -1:
                starts.append(idx + 1)
                idx = self._s.find("\n", idx + 1)
            self._line_starts = starts
        line = bisect_right(self._line_starts, pos)
        col = pos - self._line_starts[line - 1] + 1
        return line, col

    def _fail(self, message, pos=None):
        line, col = self.position(pos)
        return MalformedXmlError(message, line=line, col=col, source=self._source)

    def next_token(self, in_document: bool) -> _Token:
        s, n = self._s, self._n
        text_parts = []
        text_pos = self._pos
        while True:
            pos = self._pos
            if pos >= n:
                if text_parts:
                    self._pos = pos
                    return _Token("text", "".join(text_parts), text_pos)
                return _Token("eof", pos=pos)
            if s[pos] != "<":
                lt = s.find("<", pos)
                if lt == -1:
                    lt = n
                chunk = s[pos:lt]
                if "&" in chunk:
                    chunk = self._expand_entities(chunk, pos)
                if "]]>" in chunk:
                    raise self._fail("']]>' not allowed in character data", pos)
                if not text_parts:
                    text_pos = pos
                text_parts.append(chunk)
                self._pos = lt
                continue
            # A tag boundary. Comments/PIs inside text do not break coalescing.
            if s.startswith("<!--", pos):
                end = s.find("-->", pos + 4)
                if end == -1:
                    raise self._fail("unterminated comment", pos)
                if "--" in s[pos + 4:end]:
                    raise self._fail("'--' not allowed inside comment", pos)
                self._pos = end + 3
                continue
            if s.startswith("<![CDATA[", pos):
                end = s.find("]]>", pos + 9)
                if end == -1:
                    raise self._fail("unterminated CDATA section", pos)
                if not text_parts:
                    text_pos = pos
                text_parts.append(s[pos + 9:end])
                self._pos = end + 3
                continue
            if s.startswith("<?", pos):
                end = s.find("?>", pos + 2)
                if end == -1:
                    raise self._fail("unterminated processing instruction", pos)
                self._pos = end + 2
                continue
            if s.startswith("<!DOCTYPE", pos):
                if in_document:
                    raise self._fail("DOCTYPE inside document content", pos)
                self._pos = self._skip_doctype(pos)
                continue
            if s.startswith("<!", pos):
                raise self._fail("unsupported markup declaration", pos)
            # A real start or end tag terminates any accumulated text run.
            if text_parts:
                return _Token("text", "".join(text_parts), text_pos)
            if s.startswith("</", pos):
                return self._end_tag(pos)
            return self._start_tag(pos)

    def _skip_doctype(self, pos: int) -> int:
        s, n = self._s, self._n
        i = pos + 9
        depth = 0
        while i < n:
            c = s[i]
            if c == "[":
                depth += 1
            elif c == "]":
                depth -= 1
            elif c == ">" and depth <= 0:
                return i + 1
            i += 1
        raise self._fail("unterminated DOCTYPE declaration", pos)

    def _start_tag(self, pos: int) -> _Token:
        s = self._s
        m = _NAME_RE.match(s, pos + 1)
        if not m:
            raise self._fail("malformed start tag", pos)
        name = m.group(0)
        i = m.end()
        attrs = []
        while True:
            m = _ATTR_RE.match(s, i)
            if not m:
                break
            value = m.group(3) if m.group(3) is not None else m.group(4)
            if "&" in value:
                value = self._expand_entities(value, m.start(2))
            attrs.append((m.group(1), value, m.start(1)))
            i = m.end()
        i = _WS_RE.match(s, i).end()
        self_closing = False
        if s.startswith("/>", i):
            self_closing = True
            i += 2
        elif s.startswith(">", i):
            i += 1
        else:
            raise self._fail(f"malformed start tag '<{name}...'", pos)
        self._pos = i
        return _Token("start", (name, attrs, self_closing, pos), pos)

    def _end_tag(self, pos: int) -> _Token:
        s = self._s
        m = _NAME_RE.match(s, pos + 2)
        if not m:
            raise self._fail("malformed end tag", pos)
        name = m.group(0)
        i = _WS_RE.match(s, m.end()).end()
        if not s.startswith(">", i):
            raise self._fail(f"malformed end tag '</{name}'", pos)
        self._pos = i + 1
        return _Token("end", (name, pos), pos)

    def _expand_entities(self, chunk: str, base_pos: int) -> str:
        out = []
        i = 0
        while True:
            amp = chunk.find("&", i)
            if amp == -1:
                out.append(chunk[i:])
                return "".join(out)
            out.append(chunk[i:amp])
            semi = chunk.find(";", amp + 1)
            if semi == -1:
                raise self._fail("unterminated entity reference", base_pos + amp)
            ref = chunk[amp + 1:semi]
            if ref.startswith("#x") or ref.startswith("#X"):
                try:
                    out.append(chr(int(ref[2:], 16)))
                except ValueError:
                    raise self._fail(f"bad character reference '&{ref};'", base_pos + amp)
            elif ref.startswith("#"):
                try:
                    out.append(chr(int(ref[1:])))
                except ValueError:
                    raise self._fail(f"bad character reference '&{ref};'", base_pos + amp)
            elif ref in _BUILTIN_ENTITIES:
                out.append(_BUILTIN_ENTITIES[ref])
            else:
                raise self._fail(f"undefined entity '&{ref};'", base_pos + amp)
            i = semi + 1
