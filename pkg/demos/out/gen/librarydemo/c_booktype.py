"""Parser for complexType:urn:demo:library:BookType. Generated code; do not edit."""
from __future__ import annotations

from dataclasses import dataclass, field as _dc_field

from slimbind.runtime import EventKind, Violation

from . import dispatch as _h


@dataclass
class BookType:
    title: object = None
    price: object = None
    pages: object = None
    authors: object = None
    id: object = None


def parse_BookType(ctx, start):
    if _h.is_nil(start):
        return _h.consume_nil(ctx)
    obj = BookType()
    _seen_title = False
    _seen_pages = False
    _seen_authors = False
    _seen_id = False
    for _aq, _av in start.attributes:
        _an = (_aq.namespace, _aq.local)
        if _an == ('', 'id'):
            _seen_id = True
            obj.id = _h.conv_integer(ctx, _av, 'BookType.id')
    while True:
        ev = ctx.next_event()
        if ev.kind is EventKind.END_ELEMENT:
            break
        if ev.kind is EventKind.TEXT:
            if ev.text.strip():
                ctx.violation(Violation.UNEXPECTED_TEXT,
                              "unexpected text in BookType")
            continue
        _n = (ev.name.namespace, ev.name.local)
        if _n == ('urn:demo:library', 'title'):
            _seen_title = True
            _v = _h.read_simple(ctx, ev, _h.conv_string, 'BookType.title')
            obj.title = _v
            continue
        if _n == ('urn:demo:library', 'price'):
            from .c_pricetype import parse_PriceType
            _v = parse_PriceType(ctx, ev)
            obj.price = _v
            continue
        if _n == ('urn:demo:library', 'pages'):
            _seen_pages = True
            _v = _h.read_simple(ctx, ev, _h.conv_integer, 'BookType.pages')
            obj.pages = _v
            continue
        if _n == ('urn:demo:library', 'authors'):
            _seen_authors = True
            _v = _h.read_collapsed(ctx, (('urn:demo:library', 'names'),), _h.load_parser('c_namelisttype', 'parse_NameListType'), 'BookType.authors')
            obj.authors = _v
            continue
        ctx.violation(Violation.UNKNOWN_ELEMENT,
                      f"unexpected element {ev.name} in BookType")
        ctx.skip_subtree()
    if not _seen_title:
        ctx.violation(Violation.MISSING_REQUIRED, 'missing required element title in BookType')
    if not _seen_pages:
        ctx.violation(Violation.MISSING_REQUIRED, 'missing required element pages in BookType')
    if not _seen_authors:
        ctx.violation(Violation.MISSING_REQUIRED, 'missing required element authors in BookType')
    if not _seen_id:
        ctx.violation(Violation.MISSING_REQUIRED, 'missing required attribute id in BookType')
    return obj
