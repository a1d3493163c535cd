"""Parser for complexType:urn:demo:library:PriceType. Generated code; do not edit."""
from __future__ import annotations

from dataclasses import dataclass, field as _dc_field

from slimbind.runtime import EventKind, Violation

from . import dispatch as _h


@dataclass
class PriceType:
    currency: object = None
    value: object = None


def parse_PriceType(ctx, start):
    if _h.is_nil(start):
        return _h.consume_nil(ctx)
    obj = PriceType()
    for _aq, _av in start.attributes:
        _an = (_aq.namespace, _aq.local)
        if _an == ('', 'currency'):
            obj.currency = _h.conv_string(ctx, _av, 'PriceType.currency')
    _text = []
    while True:
        ev = ctx.next_event()
        if ev.kind is EventKind.END_ELEMENT:
            break
        if ev.kind is EventKind.TEXT:
            _text.append(ev.text)
            continue
        _n = (ev.name.namespace, ev.name.local)
        ctx.violation(Violation.UNKNOWN_ELEMENT,
                      f"unexpected element {ev.name} in PriceType")
        ctx.skip_subtree()
    obj.value = _h.conv_decimal(ctx, "".join(_text), 'PriceType.value')
    return obj
