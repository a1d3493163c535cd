"""Entry points, dispatch tables, and value conversion. Generated; do not edit."""
from __future__ import annotations

from decimal import Decimal, InvalidOperation
from importlib import import_module

from slimbind.runtime import EventKind, ParseContext, Violation

_XSI = "http://www.w3.org/2001/XMLSchema-instance"

_PARSER_CACHE = {}


def load_parser(module, fn):
    key = (module, fn)
    found = _PARSER_CACHE.get(key)
    if found is None:
        found = getattr(import_module("." + module, __package__), fn)
        _PARSER_CACHE[key] = found
    return found


def is_nil(start):
    return start.attr(_XSI, "nil") in ("true", "1")


def consume_nil(ctx):
    depth = 1
    while depth:
        ev = ctx.next_event()
        if ev.kind is EventKind.START_ELEMENT:
            depth += 1
        elif ev.kind is EventKind.END_ELEMENT:
            depth -= 1
    return None


def xsi_type_of(ctx, ev):
    raw = ev.attr(_XSI, "type")
    if raw is None:
        return None
    raw = raw.strip()
    nsmap = ctx.active_namespaces()
    if ":" in raw:
        prefix, _, local = raw.partition(":")
        return (nsmap.get(prefix, ""), local)
    return (nsmap.get("", ""), raw)


def read_simple(ctx, start, conv, what):
    """Parse an element with text-only content; consumes through its end tag."""
    nil = is_nil(start)
    parts = []
    while True:
        ev = ctx.next_event()
        if ev.kind is EventKind.TEXT:
            parts.append(ev.text)
        elif ev.kind is EventKind.END_ELEMENT:
            break
        else:
            ctx.violation(Violation.UNKNOWN_ELEMENT,
                          f"unexpected element {ev.name} in {what}")
            ctx.skip_subtree()
    if nil:
        return None
    return conv(ctx, "".join(parts), what)


def simple_reader(conv, what):
    def reader(ctx, start):
        return read_simple(ctx, start, conv, what)
    return reader


def read_collapsed(ctx, chain, parse_final, what):
    """Unwrap collapsed single-child wrappers and parse the innermost element."""
    result = None
    opened = 0
    for i, name in enumerate(chain):
        ev = _next_content(ctx, what)
        if ev.kind is EventKind.START_ELEMENT and                 (ev.name.namespace, ev.name.local) == name:
            if i == len(chain) - 1:
                result = parse_final(ctx, ev)
            else:
                opened += 1
            continue
        if ev.kind is EventKind.END_ELEMENT:
            ctx.violation(Violation.MISSING_REQUIRED,
                          f"missing collapsed element {name[1]} in {what}")
            opened -= 1  # that end tag closed one pending wrapper
            break
        ctx.violation(Violation.UNKNOWN_ELEMENT,
                      f"unexpected element {ev.name} in {what}")
        ctx.skip_subtree()
        break
    for _ in range(opened + 1):
        _drain_to_end(ctx, what)
    return result


def _next_content(ctx, what):
    while True:
        ev = ctx.next_event()
        if ev.kind is EventKind.TEXT:
            if ev.text.strip():
                ctx.violation(Violation.UNEXPECTED_TEXT,
                              f"unexpected text in {what}")
            continue
        return ev


def _drain_to_end(ctx, what):
    while True:
        ev = ctx.next_event()
        if ev.kind is EventKind.END_ELEMENT:
            return
        if ev.kind is EventKind.TEXT:
            if ev.text.strip():
                ctx.violation(Violation.UNEXPECTED_TEXT,
                              f"unexpected text in {what}")
            continue
        ctx.violation(Violation.UNKNOWN_ELEMENT,
                      f"unexpected element {ev.name} in {what}")
        ctx.skip_subtree()


def conv_string(ctx, raw, what):
    return raw


def conv_raw(ctx, raw, what):
    return raw


def conv_integer(ctx, raw, what):
    try:
        return int(raw.strip())
    except ValueError:
        ctx.violation(Violation.BAD_SIMPLE_VALUE,
                      f"bad integer {raw!r} in {what}")
        return None


def conv_decimal(ctx, raw, what):
    try:
        return Decimal(raw.strip())
    except InvalidOperation:
        ctx.violation(Violation.BAD_SIMPLE_VALUE,
                      f"bad decimal {raw!r} in {what}")
        return None


def conv_double(ctx, raw, what):
    try:
        return float(raw.strip())
    except ValueError:
        ctx.violation(Violation.BAD_SIMPLE_VALUE,
                      f"bad double {raw!r} in {what}")
        return None


def conv_boolean(ctx, raw, what):
    s = raw.strip()
    if s in ("true", "1"):
        return True
    if s in ("false", "0"):
        return False
    ctx.violation(Violation.BAD_SIMPLE_VALUE,
                  f"bad boolean {raw!r} in {what}")
    return None


def finish_document(ctx, result):
    while True:
        ev = ctx.next_event()
        if ev.kind is EventKind.END_DOCUMENT:
            return result, ctx.warnings


def dispatch_LibraryType_item(ctx, ev):
    _n = (ev.name.namespace, ev.name.local)
    if _n == ('urn:demo:library', 'audiobook'):
        from .c_audiobooktype import parse_AudiobookType
        return parse_AudiobookType(ctx, ev)
    if _n == ('urn:demo:library', 'book'):
        from .c_booktype import parse_BookType
        return parse_BookType(ctx, ev)
    ctx.violation(Violation.UNKNOWN_ELEMENT, f"no dispatch match for {ev.name} in LibraryType.item")
    ctx.skip_subtree()
    return None


def parse_document(source, mode="strict", source_name="<input>"):
    """Parse one document; returns (typed object, warnings)."""
    ctx = ParseContext(source, mode=mode, source_name=source_name)
    ev = ctx.next_event()
    _n = (ev.name.namespace, ev.name.local)
    if _n == ('urn:demo:library', 'library'):
        from .c_librarytype import parse_LibraryType
        return finish_document(ctx, parse_LibraryType(ctx, ev))
    ctx.violation(Violation.UNKNOWN_ELEMENT, f"unknown document root {ev.name}")
    return None, ctx.warnings
