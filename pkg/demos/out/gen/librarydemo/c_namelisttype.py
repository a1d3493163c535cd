"""Parser for complexType:urn:demo:library:NameListType. Generated code; do not edit."""
from __future__ import annotations

from dataclasses import dataclass, field as _dc_field

from slimbind.runtime import EventKind, Violation

from . import dispatch as _h


@dataclass
class NameListType:
    name: object = _dc_field(default_factory=list)


def parse_NameListType(ctx, start):
    if _h.is_nil(start):
        return _h.consume_nil(ctx)
    obj = NameListType()
    while True:
        ev = ctx.next_event()
        if ev.kind is EventKind.END_ELEMENT:
            break
        if ev.kind is EventKind.TEXT:
            if ev.text.strip():
                ctx.violation(Violation.UNEXPECTED_TEXT,
                              "unexpected text in NameListType")
            continue
        _n = (ev.name.namespace, ev.name.local)
        if _n == ('urn:demo:library', 'name'):
            _v = _h.read_simple(ctx, ev, _h.conv_string, 'NameListType.name')
            obj.name.append(_v)
            continue
        ctx.violation(Violation.UNKNOWN_ELEMENT,
                      f"unexpected element {ev.name} in NameListType")
        ctx.skip_subtree()
    return obj
