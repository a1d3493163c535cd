"""Render parser source files from a binding model and a template set.

The built-in backend emits plain recursive-descent Python parsers against
the package's event runtime: one module per class (dataclass plus its
parse function), one dispatch/entry module with the value-conversion
helpers, dispatch functions, and the document entry point.  Rendering is
deterministic: equal inputs give byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass

from .binding import (
    BindingModel,
    Cardinality,
    FieldKind,
    ValueCategory,
    effective_fields,
)
from .errors import EmptyModelError
from .templates import ManifestEntry, TemplateSet, render_template

_CONV_FN = {
    ValueCategory.STRING: "conv_string",
    ValueCategory.INTEGER: "conv_integer",
    ValueCategory.DECIMAL: "conv_decimal",
    ValueCategory.BOOLEAN: "conv_boolean",
    ValueCategory.DOUBLE: "conv_double",
    ValueCategory.RAW: "conv_raw",
}


@dataclass
class GeneratedArtifact:
    path: str
    content: str

    @property
    def byte_size(self) -> int:
        return len(self.content.encode("utf-8"))

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.content.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------- generic render

def render(model: BindingModel, templates: TemplateSet) -> list:
    """One artifact per manifest entry (per class for per-class entries)."""
    context = build_render_context(model)
    artifacts = []
    seen_paths = set()
    for entry in templates.manifest:
        text = templates.templates[entry.template]
        if entry.per == "class":
            scopes = context["classes"]
        else:
            scopes = [None]
        for scope in scopes:
            ctx = dict(context)
            if scope is not None:
                ctx.update(scope)
            path = render_template(entry.template + ":path", entry.path_pattern, ctx)
            content = render_template(entry.template, text, ctx)
            if path in seen_paths:
                raise ValueError(f"duplicate generated path {path}")
            seen_paths.add(path)
            artifacts.append(GeneratedArtifact(path, content))
    return artifacts


def size_report(artifacts) -> tuple:
    """(total bytes, rows sorted by descending size)."""
    rows = sorted(((a.byte_size, a.path) for a in artifacts),
                  key=lambda r: (-r[0], r[1]))
    total = sum(r[0] for r in rows)
    return total, rows


def format_size_report(artifacts) -> str:
    total, rows = size_report(artifacts)
    lines = [f"{size:>10}  {path}" for size, path in rows]
    lines.append(f"{total:>10}  TOTAL")
    return "\n".join(lines)


# ---------------------------------------------------------------- render context

def _py_tuple(qname) -> str:
    return f"({qname.namespace!r}, {qname.local!r})"


def _module_names(model: BindingModel) -> dict:
    used = {}
    out = {}
    for cls in model.classes:
        base = "c_" + re.sub(r"[^0-9a-z]", "", cls.name.lower())
        n = used.get(base, 0)
        used[base] = n + 1
        out[cls.name] = base if n == 0 else f"{base}_{n + 1}"
    return out


def build_render_context(model: BindingModel) -> dict:
    """The documented context templates render against (see binding-ir.md)."""
    modules = _module_names(model)
    dispatch_fns = []
    classes_ctx = []
    for cls in model.classes:
        classes_ctx.append(_class_context(model, cls, modules, dispatch_fns))
    roots_ctx = _root_contexts(model, modules, dispatch_fns)
    return {
        "model_name": model.name,
        "classes": classes_ctx,
        "roots": roots_ctx,
        "dispatch_fns": dispatch_fns,
        "options": model.options.to_json_dict(),
        "class_count": len(model.classes),
    }


def _value_reader_expr(conv: str, what: str) -> str:
    return f"_h.simple_reader(_h.{conv}, {what!r})"


def _parse_expr(model, modules, target_class, value, what):
    """Lines computing ``_v`` for one parsed child event ``ev``."""
    if target_class is not None:
        module = modules[target_class]
        return [f"from .{module} import parse_{target_class}",
                f"_v = parse_{target_class}(ctx, ev)"]
    conv = _CONV_FN[value] if value is not None else "conv_raw"
    return [f"_v = _h.read_simple(ctx, ev, _h.{conv}, {what!r})"]


def _dispatch_fn(model, modules, dispatch_fns, owner, field) -> str:
    """Register a dispatch function for a field's table; returns its name."""
    name = f"dispatch_{owner}_{field.name}"
    lines = []
    elem_entries = [e for e in field.dispatch if e.via == "element"]
    xsi_entries = [e for e in field.dispatch if e.via == "xsi-type"]
    what = f"{owner}.{field.name}"

    def target_lines(entry, indent):
        pad = "    " * indent
        out = []
        if entry.target_class is not None:
            module = modules.get(entry.target_class)
            if module is None:
                out.append(f"{pad}ctx.violation(Violation.UNKNOWN_ELEMENT, "
                           f"\"no parser for {entry.target_class}\")")
                out.append(f"{pad}ctx.skip_subtree()")
                out.append(f"{pad}return None")
                return out
            out.append(f"{pad}from .{module} import parse_{entry.target_class}")
            out.append(f"{pad}return parse_{entry.target_class}(ctx, ev)")
        else:
            conv = _CONV_FN[entry.value] if entry.value is not None else "conv_raw"
            out.append(f"{pad}return read_simple(ctx, ev, {conv}, {what!r})")
        return out

    if elem_entries:
        lines.append("_n = (ev.name.namespace, ev.name.local)")
        for entry in elem_entries:
            lines.append(f"if _n == {_py_tuple(entry.qname)}:")
            if entry.component == field.source_element and xsi_entries:
                lines.append("    _xt = xsi_type_of(ctx, ev)")
                for xe in xsi_entries:
                    lines.append(f"    if _xt == {_py_tuple(xe.qname)}:")
                    lines.extend(target_lines(xe, 2))
            lines.extend(target_lines(entry, 1))
    else:
        lines.append("_xt = xsi_type_of(ctx, ev)")
        for xe in xsi_entries:
            lines.append(f"if _xt == {_py_tuple(xe.qname)}:")
            lines.extend(target_lines(xe, 1))
        if field.target_class is not None and field.target_class in modules:
            module = modules[field.target_class]
            lines.append(f"from .{module} import parse_{field.target_class}")
            lines.append(f"return parse_{field.target_class}(ctx, ev)")
        elif field.value is not None:
            conv = _CONV_FN[field.value]
            lines.append(f"return read_simple(ctx, ev, {conv}, {what!r})")
    lines.append(f"ctx.violation(Violation.UNKNOWN_ELEMENT, "
                 f"f\"no dispatch match for {{ev.name}} in {what}\")")
    lines.append("ctx.skip_subtree()")
    lines.append("return None")
    dispatch_fns.append({"fn_name": name, "lines": lines})
    return name


def _class_context(model, cls, modules, dispatch_fns) -> dict:
    fields_ctx = []
    element_cases = []
    attr_cases = []
    required_checks = []
    text_field = None
    for f in cls.fields:
        is_list = f.cardinality is Cardinality.LIST
        fields_ctx.append({
            "py_name": f.name,
            "py_default": "_dc_field(default_factory=list)" if is_list else "None",
        })
    # Match cases cover inherited fields too when flattening is off.
    # Element fields take precedence over wildcards for the same name, so
    # wildcard cases are emitted after every element case.
    matchable = effective_fields(model, cls)
    matchable = [f for f in matchable if not f.is_wildcard] + \
        [f for f in matchable if f.is_wildcard]
    for f in matchable:
        is_list = f.cardinality is Cardinality.LIST
        what = f"{cls.name}.{f.name}"
        if f.kind is FieldKind.TEXT_CONTENT:
            text_field = f
            continue
        if f.kind is FieldKind.ATTRIBUTE:
            conv = _CONV_FN[f.value]
            required = f.cardinality is Cardinality.SCALAR_REQUIRED
            attr_cases.append({
                "kw": "elif" if attr_cases else "if",
                "xml_tuple": _py_tuple(f.xml_name),
                "py_name": f.name,
                "conv": conv,
                "what": repr(what),
                "required": required,
            })
            if required:
                required_checks.append({"py_name": f.name,
                                        "message": repr(f"missing required attribute "
                                                        f"{f.xml_name.local} in {cls.name}")})
            continue

        # Element field.
        if f.dispatch:
            match_names = sorted({e.qname for e in f.dispatch if e.via == "element"})
            if not match_names:
                match_names = [f.xml_name]
        else:
            match_names = [f.xml_name]
        if len(match_names) == 1:
            match_expr = f"_n == {_py_tuple(match_names[0])}"
        else:
            match_expr = "_n in (" + ", ".join(_py_tuple(q) for q in match_names) + ")"

        lines = []
        required = f.cardinality is Cardinality.SCALAR_REQUIRED
        if f.ignored:
            lines.append("ctx.skip_subtree()")
        else:
            if required:
                lines.append(f"_seen_{f.name} = True")
            if f.dispatch:
                fn = _dispatch_fn(model, modules, dispatch_fns, cls.name, f)
                lines.append(f"_v = _h.{fn}(ctx, ev)")
            elif f.collapse_chain:
                chain = "(" + ", ".join(_py_tuple(q) for q in f.collapse_chain) + ",)"
                if f.target_class is not None:
                    final = (f"_h.load_parser({modules[f.target_class]!r}, "
                             f"'parse_{f.target_class}')")
                else:
                    conv = _CONV_FN[f.value] if f.value is not None else "conv_raw"
                    final = _value_reader_expr(conv, what)
                lines.append(f"_v = _h.read_collapsed(ctx, {chain}, {final}, {what!r})")
            else:
                lines.extend(_parse_expr(model, modules, f.target_class, f.value, what))
            if is_list:
                lines.append(f"obj.{f.name}.append(_v)")
            else:
                lines.append(f"obj.{f.name} = _v")
        element_cases.append({"match_expr": match_expr, "lines": lines})
        if required and not f.ignored:
            required_checks.append({"py_name": f.name,
                                    "message": repr(f"missing required element "
                                                    f"{f.xml_name.local} in {cls.name}")})

    ctx = {
        "name": cls.name,
        "module": modules[cls.name],
        "xml_type": cls.source_type,
        "fields": fields_ctx,
        "element_cases": element_cases,
        "attr_cases": attr_cases,
        "has_attr_cases": bool(attr_cases),
        "required_flags": [{"py_name": c["py_name"]} for c in required_checks],
        "required_checks": required_checks,
        "is_mixed": cls.mixed,
        "collect_text": text_field is not None,
        "has_base": cls.base is not None,
        "base": cls.base or "",
        "base_module": modules.get(cls.base, "") if cls.base else "",
    }
    if text_field is not None:
        ctx["text_py_name"] = text_field.name
        ctx["text_conv"] = _CONV_FN[text_field.value]
        ctx["text_what"] = repr(f"{cls.name}.{text_field.name}")
        ctx["text_is_mixed"] = cls.mixed
    return ctx


def _root_contexts(model, modules, dispatch_fns) -> list:
    roots = []
    for root in model.roots:
        lines = [f"if _n == {_py_tuple(root.qname)}:"]
        what = f"root {root.qname.local}"
        pad = "    "
        if root.dispatch:
            lines.append(f"{pad}_xt = xsi_type_of(ctx, ev)")
            for entry in root.dispatch:
                if entry.target_class is None or entry.target_class not in modules:
                    continue
                module = modules[entry.target_class]
                lines.append(f"{pad}if _xt == {_py_tuple(entry.qname)}:")
                lines.append(f"{pad}    from .{module} import parse_{entry.target_class}")
                lines.append(f"{pad}    return finish_document("
                             f"ctx, parse_{entry.target_class}(ctx, ev))")
        if root.target_class is not None and root.target_class in modules:
            module = modules[root.target_class]
            lines.append(f"{pad}from .{module} import parse_{root.target_class}")
            lines.append(f"{pad}return finish_document(ctx, "
                         f"parse_{root.target_class}(ctx, ev))")
        else:
            conv = _CONV_FN[root.value] if root.value is not None else "conv_raw"
            lines.append(f"{pad}return finish_document(ctx, "
                         f"read_simple(ctx, ev, {conv}, {what!r}))")
        roots.append({"lines": lines, "qname": str(root.qname)})
    return roots


# ---------------------------------------------------------------- built-in backend

_CLASS_TEMPLATE = '''\
"""Parser for {{xml_type}}. Generated code; do not edit."""
from __future__ import annotations

from dataclasses import dataclass, field as _dc_field

from slimbind.runtime import EventKind, Violation

from . import dispatch as _h
{{#has_base}}
from .{{base_module}} import {{base}}
{{/has_base}}


@dataclass
class {{name}}{{#has_base}}({{base}}){{/has_base}}:
{{#fields}}
    {{py_name}}: object = {{py_default}}
{{/fields}}
{{^fields}}
    pass
{{/fields}}


def parse_{{name}}(ctx, start):
    if _h.is_nil(start):
        return _h.consume_nil(ctx)
    obj = {{name}}()
{{#required_flags}}
    _seen_{{py_name}} = False
{{/required_flags}}
{{#has_attr_cases}}
    for _aq, _av in start.attributes:
        _an = (_aq.namespace, _aq.local)
{{#attr_cases}}
        {{kw}} _an == {{xml_tuple}}:
{{#required}}
            _seen_{{py_name}} = True
{{/required}}
            obj.{{py_name}} = _h.{{conv}}(ctx, _av, {{what}})
{{/attr_cases}}
{{/has_attr_cases}}
{{#collect_text}}
    _text = []
{{/collect_text}}
    while True:
        ev = ctx.next_event()
        if ev.kind is EventKind.END_ELEMENT:
            break
        if ev.kind is EventKind.TEXT:
{{#collect_text}}
            _text.append(ev.text)
{{/collect_text}}
{{^collect_text}}
            if ev.text.strip():
                ctx.violation(Violation.UNEXPECTED_TEXT,
                              "unexpected text in {{name}}")
{{/collect_text}}
            continue
        _n = (ev.name.namespace, ev.name.local)
{{#element_cases}}
        if {{match_expr}}:
{{#lines}}
            {{.}}
{{/lines}}
            continue
{{/element_cases}}
        ctx.violation(Violation.UNKNOWN_ELEMENT,
                      f"unexpected element {ev.name} in {{name}}")
        ctx.skip_subtree()
{{#required_checks}}
    if not _seen_{{py_name}}:
        ctx.violation(Violation.MISSING_REQUIRED, {{message}})
{{/required_checks}}
{{#collect_text}}
{{#text_is_mixed}}
    obj.{{text_py_name}} = "".join(_text) if _text else None
{{/text_is_mixed}}
{{^text_is_mixed}}
    obj.{{text_py_name}} = _h.{{text_conv}}(ctx, "".join(_text), {{text_what}})
{{/text_is_mixed}}
{{/collect_text}}
    return obj
'''

_DISPATCH_TEMPLATE = '''\
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
        if ev.kind is EventKind.START_ELEMENT and \
                (ev.name.namespace, ev.name.local) == name:
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


{{#dispatch_fns}}
def {{fn_name}}(ctx, ev):
{{#lines}}
    {{.}}
{{/lines}}


{{/dispatch_fns}}
def parse_document(source, mode="strict", source_name="<input>"):
    """Parse one document; returns (typed object, warnings)."""
    ctx = ParseContext(source, mode=mode, source_name=source_name)
    ev = ctx.next_event()
    _n = (ev.name.namespace, ev.name.local)
{{#roots}}
{{#lines}}
    {{.}}
{{/lines}}
{{/roots}}
    ctx.violation(Violation.UNKNOWN_ELEMENT, f"unknown document root {ev.name}")
    return None, ctx.warnings
'''

_INIT_TEMPLATE = '''\
"""Generated parser package for model '{{model_name}}'; do not edit."""

from .dispatch import parse_document

__all__ = ["parse_document"]
'''


def builtin_template_set() -> TemplateSet:
    return TemplateSet(
        templates={
            "class.py": _CLASS_TEMPLATE,
            "dispatch.py": _DISPATCH_TEMPLATE,
            "init.py": _INIT_TEMPLATE,
        },
        manifest=[
            ManifestEntry("init.py", "__init__.py", per="model"),
            ManifestEntry("dispatch.py", "dispatch.py", per="model"),
            ManifestEntry("class.py", "{{module}}.py", per="class"),
        ],
    )


def emit_parser_backend(model: BindingModel) -> list:
    """Recursive-descent parser sources for the built-in Python backend."""
    if not model.roots:
        raise EmptyModelError("binding model has no roots")
    return render(model, builtin_template_set())


# ---------------------------------------------------------------- output writing

def write_artifacts(model: BindingModel, artifacts, out_root) -> dict:
    """Write artifacts under ``out_root/gen/<model-name>/`` plus MANIFEST.json.

    Returns the manifest dictionary.
    """
    gen_dir = os.path.join(out_root, "gen", model.name)
    os.makedirs(gen_dir, exist_ok=True)
    entries = []
    for artifact in sorted(artifacts, key=lambda a: a.path):
        path = os.path.join(gen_dir, artifact.path)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(artifact.content)
        entries.append({
            "path": artifact.path,
            "bytes": artifact.byte_size,
            "sha256": artifact.sha256,
        })
    total, _rows = size_report(artifacts)
    manifest = {
        "model": model.name,
        "irVersion": 1,
        "options": model.options.to_json_dict(),
        "classCount": len(model.classes),
        "collapsedClasses": [c.name for c in model.collapsed_classes],
        "artifacts": entries,
        "totalBytes": total,
    }
    with open(os.path.join(gen_dir, "MANIFEST.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
