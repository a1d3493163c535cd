"""Parser for complexType:urn:demo:library:LibraryType. Generated code; do not edit."""
from __future__ import annotations

from dataclasses import dataclass, field as _dc_field

from slimbind.runtime import EventKind, Violation

from . import dispatch as _h


@dataclass
class LibraryType:
    item: object = _dc_field(default_factory=list)
    curator: object = None
    branch: object = None


def parse_LibraryType(ctx, start):
    if _h.is_nil(start):
        return _h.consume_nil(ctx)
    obj = LibraryType()
    _seen_branch = False
    for _aq, _av in start.attributes:
        _an = (_aq.namespace, _aq.local)
        if _an == ('', 'branch'):
            _seen_branch = True
            obj.branch = _h.conv_string(ctx, _av, 'LibraryType.branch')
    while True:
        ev = ctx.next_event()
        if ev.kind is EventKind.END_ELEMENT:
            break
        if ev.kind is EventKind.TEXT:
            if ev.text.strip():
                ctx.violation(Violation.UNEXPECTED_TEXT,
                              "unexpected text in LibraryType")
            continue
        _n = (ev.name.namespace, ev.name.local)
        if _n in (('urn:demo:library', 'audiobook'), ('urn:demo:library', 'book')):
            _v = _h.dispatch_LibraryType_item(ctx, ev)
            obj.item.append(_v)
            continue
        if _n == ('urn:demo:library', 'curator'):
            _v = _h.read_collapsed(ctx, (('urn:demo:library', 'fullName'),), _h.simple_reader(_h.conv_string, 'LibraryType.curator'), 'LibraryType.curator')
            obj.curator = _v
            continue
        ctx.violation(Violation.UNKNOWN_ELEMENT,
                      f"unexpected element {ev.name} in LibraryType")
        ctx.skip_subtree()
    if not _seen_branch:
        ctx.violation(Violation.MISSING_REQUIRED, 'missing required attribute branch in LibraryType')
    return obj
