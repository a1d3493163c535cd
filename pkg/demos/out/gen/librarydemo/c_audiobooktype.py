"""Parser for complexType:urn:demo:library:AudiobookType. Generated code; do not edit."""
from __future__ import annotations

from dataclasses import dataclass, field as _dc_field

from slimbind.runtime import EventKind, Violation

from . import dispatch as _h


@dataclass
class AudiobookType:
    title: object = None
    price: object = None
    minutes: object = None
    id: object = None


def parse_AudiobookType(ctx, start):
    if _h.is_nil(start):
        return _h.consume_nil(ctx)
    obj = AudiobookType()
    _seen_title = False
    _seen_minutes = False
    _seen_id = False
    for _aq, _av in start.attributes:
        _an = (_aq.namespace, _aq.local)
        if _an == ('', 'id'):
            _seen_id = True
            obj.id = _h.conv_integer(ctx, _av, 'AudiobookType.id')
    while True:
        ev = ctx.next_event()
        if ev.kind is EventKind.END_ELEMENT:
            break
        if ev.kind is EventKind.TEXT:
            if ev.text.strip():
                ctx.violation(Violation.UNEXPECTED_TEXT,
                              "unexpected text in AudiobookType")
            continue
        _n = (ev.name.namespace, ev.name.local)
        if _n == ('urn:demo:library', 'title'):
            _seen_title = True
            _v = _h.read_simple(ctx, ev, _h.conv_string, 'AudiobookType.title')
            obj.title = _v
            continue
        if _n == ('urn:demo:library', 'price'):
            from .c_pricetype import parse_PriceType
            _v = parse_PriceType(ctx, ev)
            obj.price = _v
            continue
        if _n == ('urn:demo:library', 'minutes'):
            _seen_minutes = True
            _v = _h.read_simple(ctx, ev, _h.conv_integer, 'AudiobookType.minutes')
            obj.minutes = _v
            continue
        ctx.violation(Violation.UNKNOWN_ELEMENT,
                      f"unexpected element {ev.name} in AudiobookType")
        ctx.skip_subtree()
    if not _seen_title:
        ctx.violation(Violation.MISSING_REQUIRED, 'missing required element title in AudiobookType')
    if not _seen_minutes:
        ctx.violation(Violation.MISSING_REQUIRED, 'missing required element minutes in AudiobookType')
    if not _seen_id:
        ctx.violation(Violation.MISSING_REQUIRED, 'missing required attribute id in AudiobookType')
    return obj
