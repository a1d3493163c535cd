"""Acceptance criteria, one test per criterion.

Each test prints a single ``ACCEPTANCE <name>: PASS`` line (visible with
``pytest -s``) after asserting the criterion at its stated tolerance.
"""

from __future__ import annotations

import json
import statistics
import time
from pathlib import Path

import pytest

from conftest import TNS, XS_HEAD, analyze, cid, schema_of
from genutil import assert_equivalent, build_and_import, compile_model, \
    normalize, unique_model_name
from oracle import Interpreter, brute_retained
from slimbind.analyzer import ParticlePath, UsageReport, analyze_corpus
from slimbind.binding import (
    BindingOptions,
    Cardinality,
    FieldKind,
    build_binding_model,
    effective_fields,
)
from slimbind.cli import main
from slimbind.emitter import emit_parser_backend, size_report
from slimbind.errors import (
    BadSimpleValueError,
    MissingRequiredError,
    UnknownElementError,
)
from slimbind.loader import SchemaSource, load_schema_set
from slimbind.model import XSD_NAMESPACE, QName
from slimbind.runtime import EventKind, ParseContext
from slimbind.simplify import compute_retained_set, emit_reduced_schemas
from synth import generate_case


def report(name, detail=""):
    print(f"ACCEPTANCE {name}: PASS {detail}".rstrip())


# ---------------------------------------------------------------- criterion 1

def build_hundred_global_suite(base: Path):
    """100 globals (50 elements + 50 types); docs exercise exactly 25.

    Element k0 is string-typed; k1..k12 carry complex types W1..W12, so the
    used set is 13 elements + 12 types = 25 globals, closed under the
    mandatory edges by construction.
    """
    lines = [XS_HEAD]
    lines.append('  <xs:element name="k0" type="xs:string"/>')
    for i in range(1, 13):
        lines.append(f'  <xs:element name="k{i}" type="tns:W{i}"/>')
        lines.append(f'  <xs:complexType name="W{i}">')
        lines.append('    <xs:sequence>')
        lines.append(f'      <xs:element name="f{i}" type="xs:int"/>')
        lines.append(f'      <xs:element name="g{i}" type="xs:string" '
                     'minOccurs="0" maxOccurs="unbounded"/>')
        lines.append('    </xs:sequence>')
        lines.append(f'    <xs:attribute name="a{i}" type="xs:int"/>')
        lines.append('  </xs:complexType>')
    # 37 never-used elements and 38 never-used types (some chained).
    for i in range(13, 50):
        lines.append(f'  <xs:element name="k{i}" type="tns:W{i}"/>')
    for i in range(13, 50):
        base_attr = f'tns:W{i + 1}' if 13 <= i < 30 and i + 1 < 50 else None
        if base_attr:
            lines.append(f'  <xs:complexType name="W{i}">')
            lines.append('    <xs:complexContent>')
            lines.append(f'      <xs:extension base="{base_attr}">')
            lines.append(f'        <xs:sequence><xs:element name="x{i}" '
                         'type="xs:string"/></xs:sequence>')
            lines.append('      </xs:extension>')
            lines.append('    </xs:complexContent>')
            lines.append('  </xs:complexType>')
        else:
            lines.append(f'  <xs:complexType name="W{i}">')
            lines.append(f'    <xs:sequence><xs:element name="x{i}" '
                         'type="xs:string"/></xs:sequence>')
            lines.append('  </xs:complexType>')
    lines.append(f'  <xs:complexType name="W50e">'
                 '<xs:sequence/></xs:complexType>')
    lines.append("</xs:schema>")
    text = "\n".join(lines)

    schemas = base / "schemas"
    docs = base / "docs"
    schemas.mkdir()
    docs.mkdir()
    (schemas / "suite.xsd").write_text(text)
    (docs / "d0.xml").write_text(f'<k0 xmlns="{TNS}">zero</k0>')
    for i in range(1, 13):
        (docs / f"d{i}.xml").write_text(
            f'<k{i} xmlns="{TNS}" a{i}="{i}"><f{i}>{i}</f{i}>'
            f'<g{i}>s</g{i}><g{i}>t</g{i}></k{i}>')
    return schemas / "suite.xsd", docs


def test_usage_ratio_reproduction_at_desk_scale(tmp_path, capsys):
    started = time.monotonic()
    schema_file, docs_dir = build_hundred_global_suite(tmp_path)
    out = tmp_path / "out"
    code = main(["simplify", "--schemas", str(schema_file),
                 "--docs", str(docs_dir), "--out", str(out)])
    elapsed = time.monotonic() - started
    captured = capsys.readouterr()
    assert code == 0, captured.err

    schema = load_schema_set([SchemaSource.from_file(schema_file)])
    user_globals = [c for c in schema.globals() if c.namespace == TNS]
    assert len(user_globals) == 100
    usage = UsageReport.from_json((out / "usage-report.json").read_text())
    used_globals = {c.id for c in user_globals if c.id in usage.used_components}
    assert len(used_globals) == 25

    oracle = brute_retained(schema, usage.used_components)
    reduced_files = sorted((out / "reduced").glob("*.xsd"))
    reduced = load_schema_set([SchemaSource.from_file(f) for f in reduced_files])
    reduced_globals = {c.id for c in reduced.globals() if c.namespace == TNS}
    oracle_globals = {c for c in oracle
                      if schema.component(c).is_global
                      and schema.component(c).namespace == TNS}
    assert reduced_globals == oracle_globals  # exact, no tolerance
    assert used_globals == oracle_globals  # suite built to be closure-stable

    rr = json.loads((out / "reduction-report.json").read_text())
    ratio = rr["retainedComponents"] / rr["totalComponents"]
    printed = f"({ratio * 100:.1f}%)"
    assert printed in captured.out
    assert elapsed < 5.0
    report("usage-ratio-desk-scale",
           f"retained {rr['retainedComponents']}/{rr['totalComponents']} "
           f"{printed} in {elapsed:.2f}s")


# ---------------------------------------------------------------- criterion 2

def test_closure_correctness_randomized(tmp_path):
    started = time.monotonic()
    checked = 0
    for seed in range(200):
        _g, xsd, docs = generate_case(seed)
        schema = load_schema_set([SchemaSource(f"mem://{seed}.xsd", raw_text=xsd)])
        usage = analyze_corpus(
            schema, [(f"{seed}-{i}.xml", d) for i, d in enumerate(docs)])
        assert not usage.failures, (seed, usage.failures)
        retained = compute_retained_set(schema, usage)
        assert retained == brute_retained(schema, usage.used_components), seed

        out_dir = tmp_path / f"red{seed}"
        files = emit_reduced_schemas(schema, retained, out_dir)
        reduced = load_schema_set([SchemaSource.from_file(f) for f in files])
        usage2 = analyze_corpus(
            reduced, [(f"{seed}-{i}.xml", d) for i, d in enumerate(docs)])
        assert not usage2.failures, (seed, usage2.failures)
        retained2 = compute_retained_set(reduced, usage2)
        reduced_user = {c for c in reduced.components
                        if reduced.component(c).namespace != XSD_NAMESPACE}
        assert reduced_user <= retained2, seed  # re-analysis is a fixed point
        checked += 1
    elapsed = time.monotonic() - started
    assert checked == 200
    assert elapsed < 60.0
    report("closure-correctness-randomized", f"200 schemas in {elapsed:.1f}s")


# ---------------------------------------------------------------- criterion 3

def test_occurrence_tightening_property():
    cases = 0
    fields_checked = 0
    seed = 0
    while cases < 500:
        _g, xsd, docs = generate_case(seed + 10_000)
        seed += 1
        schema = load_schema_set([SchemaSource("mem://t.xsd", raw_text=xsd)])
        usage = analyze_corpus(schema, [(f"{i}", d) for i, d in enumerate(docs)])
        if usage.failures or not usage.used_components:
            continue
        retained = compute_retained_set(schema, usage)
        model = build_binding_model(schema, retained, usage, BindingOptions(),
                                    model_name="m")
        cases += 1
        for cls in model.classes:
            for f in cls.fields:
                if f.source_particle is None:
                    continue
                pp = ParticlePath.parse(f.source_particle)
                observed = usage.occurrence_maxima.get(pp)
                assert observed is not None and observed >= 1
                is_scalar = f.cardinality is not Cardinality.LIST
                assert is_scalar == (observed <= 1), (
                    f"seed {seed}: {cls.name}.{f.name} cardinality "
                    f"{f.cardinality} vs observed {observed}")
                fields_checked += 1
    report("occurrence-tightening-property",
           f"500 cases, {fields_checked} fields, 0 counterexamples")


# ---------------------------------------------------------------- criterion 4

SUBST_SCHEMA = """
  <xs:complexType name="HT">
    <xs:sequence><xs:element name="hx" type="xs:int" minOccurs="0"/></xs:sequence>
  </xs:complexType>
  <xs:complexType name="HTD">
    <xs:complexContent><xs:extension base="tns:HT">
      <xs:sequence><xs:element name="dx" type="xs:int"/></xs:sequence>
    </xs:extension></xs:complexContent>
  </xs:complexType>
  <xs:element name="h" type="tns:HT"/>
  <xs:element name="m1" type="tns:HT" substitutionGroup="tns:h"/>
  <xs:element name="m2" type="tns:HT" substitutionGroup="tns:m1"/>
  <xs:element name="r" type="tns:R"/>
  <xs:complexType name="R">
    <xs:sequence>
      <xs:element ref="tns:h" maxOccurs="unbounded"/>
      <xs:element name="v" type="tns:HT" minOccurs="0" maxOccurs="unbounded"/>
    </xs:sequence>
  </xs:complexType>"""


def test_substitution_bounding():
    schema = schema_of(SUBST_SCHEMA)
    doc = (f'<r xmlns="{TNS}" xmlns:tns="{TNS}" '
           'xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance">'
           '<m2><hx>1</hx></m2>'
           '<v xsi:type="tns:HTD"><hx>2</hx><dx>3</dx></v><v/></r>')
    usage = analyze(schema, doc)
    retained = compute_retained_set(schema, usage)

    bound = build_binding_model(schema, retained, usage, BindingOptions(),
                                model_name="b")
    h = bound.class_by_name("R").field_by_name("h")
    observed_members = {schema.component(m).detail.qname.local
                        for m in usage.element_substitutions[cid("element", "h")]}
    assert {e.qname.local for e in h.dispatch} == observed_members == {"m2"}
    v = bound.class_by_name("R").field_by_name("v")
    xsi = [e for e in v.dispatch if e.via == "xsi-type"]
    observed_types = {schema.component(t).name.local
                      for t in usage.type_substitutions[cid("element", "R/v")]}
    assert {e.qname.local for e in xsi} == observed_types == {"HTD"}

    unbound = build_binding_model(schema, set(schema.components), usage,
                                  BindingOptions(bound_substitutions=False,
                                                 prune_unused=False),
                                  model_name="u")
    h = unbound.class_by_name("R").field_by_name("h")
    assert {e.qname.local for e in h.dispatch
            if e.via == "element"} == {"h", "m1", "m2"}
    v = unbound.class_by_name("R").field_by_name("v")
    xsi = [e for e in v.dispatch if e.via == "xsi-type"]
    assert {e.qname.local for e in xsi} == {"HTD"}  # all derived types of HT
    report("substitution-bounding",
           "bound == observed; unbound == schema-possible (2-level chain + xsi)")


# ---------------------------------------------------------------- criterion 5

FIXTURE_SUITE = []  # (schema body, docs) registered below

FIXTURE_SUITE.append(("""
  <xs:element name="r" type="tns:D"/>
  <xs:complexType name="B">
    <xs:sequence><xs:element name="b1" type="xs:string"/>
      <xs:element name="b2" type="xs:int" minOccurs="0"/></xs:sequence>
    <xs:attribute name="ab" type="xs:string"/>
  </xs:complexType>
  <xs:complexType name="M">
    <xs:complexContent><xs:extension base="tns:B">
      <xs:sequence><xs:element name="m1" type="xs:double"/></xs:sequence>
    </xs:extension></xs:complexContent>
  </xs:complexType>
  <xs:complexType name="D">
    <xs:complexContent><xs:extension base="tns:M">
      <xs:sequence><xs:element name="d1" type="xs:boolean"/></xs:sequence>
      <xs:attribute name="ad" type="xs:int"/>
    </xs:extension></xs:complexContent>
  </xs:complexType>""", [
    f'<r xmlns="{TNS}" ab="x" ad="4"><b1>s</b1><b2>2</b2><m1>0.5</m1>'
    '<d1>true</d1></r>']))

FIXTURE_SUITE.append(("""
  <xs:element name="r" type="tns:R"/>
  <xs:complexType name="R">
    <xs:sequence>
      <xs:element name="w1" type="tns:W1"/>
      <xs:element name="w2" type="tns:W2"/>
      <xs:element name="keep" type="tns:K" maxOccurs="unbounded"/>
    </xs:sequence>
  </xs:complexType>
  <xs:complexType name="W1">
    <xs:sequence><xs:element name="i1" type="tns:K"/></xs:sequence>
  </xs:complexType>
  <xs:complexType name="W2">
    <xs:sequence><xs:element name="i2" type="xs:int"/></xs:sequence>
  </xs:complexType>
  <xs:complexType name="K">
    <xs:sequence><xs:element name="kx" type="xs:string"/>
      <xs:element name="ky" type="xs:string"/></xs:sequence>
  </xs:complexType>""", [
    f'<r xmlns="{TNS}"><w1><i1><kx>a</kx><ky>b</ky></i1></w1>'
    '<w2><i2>7</i2></w2>'
    '<keep><kx>c</kx><ky>d</ky></keep><keep><kx>e</kx><ky>f</ky></keep></r>']))


def test_flattening_and_collapse_structural_laws():
    # Flattening: per-class field multiset equals base-chain concatenation.
    body, docs = FIXTURE_SUITE[0]
    schema = schema_of(body)
    usage = analyze(schema, *docs)
    retained = compute_retained_set(schema, usage)
    flat = build_binding_model(schema, retained, usage, BindingOptions(),
                               model_name="f")
    unflat = build_binding_model(
        schema, retained, usage, BindingOptions(flatten_inheritance=False),
        model_name="u")
    for cls in flat.classes:
        other = unflat.class_by_name(cls.name)
        assert other is not None
        flat_keys = sorted((f.xml_name, f.kind.value) for f in cls.fields)
        chain_keys = sorted((f.xml_name, f.kind.value)
                            for f in effective_fields(unflat, other))
        assert flat_keys == chain_keys, cls.name
    d = flat.class_by_name("D")
    assert [f.name for f in d.fields if f.kind is FieldKind.ELEMENT] == \
        ["b1", "b2", "m1", "d1"]  # base-to-derived order

    # Collapse: class-count delta equals the collapsed element count.
    deltas = []
    for body, docs in FIXTURE_SUITE:
        schema = schema_of(body)
        usage = analyze(schema, *docs)
        retained = compute_retained_set(schema, usage)
        on = build_binding_model(schema, retained, usage, BindingOptions(),
                                 model_name="on")
        off = build_binding_model(
            schema, retained, usage,
            BindingOptions(collapse_single_child=False), model_name="off")
        delta = len(off.classes) - len(on.classes)
        assert delta >= 0
        assert delta == len(on.collapsed_elements)
        deltas.append(delta)
    assert deltas[1] == 2  # both W1 and W2 wrappers vanish
    report("flattening-and-collapse-laws",
           f"field multisets equal; collapse deltas {deltas}")


# ---------------------------------------------------------------- criterion 6

def test_generated_parser_equals_interpreter_oracle(tmp_path):
    total_docs = 0
    # Hand-built fixtures, default options and no-flatten variant.
    for i, (body, docs) in enumerate(FIXTURE_SUITE):
        schema = schema_of(body)
        for options in (BindingOptions(),
                        BindingOptions(flatten_inheritance=False),
                        BindingOptions(collapse_single_child=False,
                                       tighten_occurrences=False)):
            model, module, _, _ = build_and_import(schema, docs, tmp_path, options)
            assert_equivalent(model, module, docs)
            total_docs += len(docs)
    # Substitution/xsi fixture.
    schema = schema_of(SUBST_SCHEMA)
    docs = [(f'<r xmlns="{TNS}" xmlns:tns="{TNS}" '
             'xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance">'
             '<h/><m1><hx>0</hx></m1><m2/>'
             '<v xsi:type="tns:HTD"><hx>2</hx><dx>3</dx></v><v/></r>')]
    model, module, _, _ = build_and_import(schema, docs, tmp_path)
    assert_equivalent(model, module, docs)
    total_docs += 1
    # Randomized corpora.
    for seed in range(40):
        _g, xsd, docs = generate_case(seed + 20_000)
        schema = load_schema_set([SchemaSource("mem://e.xsd", raw_text=xsd)])
        usage = analyze_corpus(schema, [(f"{i}", d) for i, d in enumerate(docs)])
        if usage.failures or not usage.root_elements:
            continue
        retained = compute_retained_set(schema, usage)
        model = build_binding_model(schema, retained, usage, BindingOptions(),
                                    model_name=unique_model_name("acc"))
        module, _ = compile_model(model, tmp_path)
        assert_equivalent(model, module, docs)
        total_docs += len(docs)
    report("generated-parser-oracle-equivalence",
           f"{total_docs} documents, 100% tree-equal")


# ---------------------------------------------------------------- criterion 7

def test_code_size_direction(tmp_path, capsys):
    schema_file, docs_dir = build_hundred_global_suite(tmp_path)
    out_opt = tmp_path / "opt"
    out_raw = tmp_path / "raw"
    assert main(["generate", "--schemas", str(schema_file),
                 "--docs", str(docs_dir), "--out", str(out_opt)]) == 0
    assert main(["generate", "--schemas", str(schema_file),
                 "--docs", str(docs_dir), "--out", str(out_raw),
                 "--no-flatten", "--no-collapse", "--keep-occurrences",
                 "--all-substitutions", "--no-prune"]) == 0
    opt = json.loads((out_opt / "gen" / "model" / "MANIFEST.json").read_text())
    raw = json.loads((out_raw / "gen" / "model" / "MANIFEST.json").read_text())
    assert opt["totalBytes"] < raw["totalBytes"]
    assert opt["classCount"] < raw["classCount"]
    report("code-size-direction",
           f"optimized {opt['totalBytes']}B/{opt['classCount']} classes vs "
           f"unoptimized {raw['totalBytes']}B/{raw['classCount']} classes")


# ---------------------------------------------------------------- criterion 8

PERF_SCHEMA = """
  <xs:element name="log" type="tns:LogType"/>
  <xs:complexType name="LogType">
    <xs:sequence>
      <xs:element name="rec" type="tns:RecType" maxOccurs="unbounded"/>
    </xs:sequence>
  </xs:complexType>
  <xs:complexType name="RecType">
    <xs:sequence>
      <xs:element name="name" type="xs:string"/>
      <xs:element name="value" type="xs:double"/>
      <xs:element name="note" type="xs:string"/>
    </xs:sequence>
    <xs:attribute name="id" type="xs:int" use="required"/>
  </xs:complexType>"""


def build_megabyte_document():
    chunk = ("Lorem ipsum dolor sit amet, consectetur adipiscing elit, "
             "sed do eiusmod tempor incididunt ut labore et dolore magna.")
    parts = [f'<log xmlns="{TNS}">']
    i = 0
    size = 0
    while size < 1_000_000:
        rec = (f'<rec id="{i}"><name>sensor-{i}</name>'
               f'<value>{i % 97}.25</value><note>{chunk}</note></rec>')
        parts.append(rec)
        size += len(rec)
        i += 1
    parts.append("</log>")
    return "".join(parts), i


def test_parse_overhead_bound(tmp_path):
    schema = schema_of(PERF_SCHEMA)
    doc, n_records = build_megabyte_document()
    sample = (f'<log xmlns="{TNS}"><rec id="1"><name>n</name>'
              '<value>0.5</value><note>x</note></rec>'
              '<rec id="2"><name>m</name>'
              '<value>1.5</value><note>y</note></rec></log>')
    model, module, _, _ = build_and_import(schema, [sample], tmp_path)

    def bare_traversal():
        ctx = ParseContext(doc)
        while ctx.next_event().kind is not EventKind.END_DOCUMENT:
            pass

    def generated_parse():
        obj, _warnings = module.parse_document(doc)
        assert len(obj.rec) == n_records

    for fn in (bare_traversal, generated_parse):
        for _ in range(3):
            fn()
    bare_times, gen_times = [], []
    for _ in range(10):
        t0 = time.perf_counter()
        bare_traversal()
        bare_times.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        generated_parse()
        gen_times.append(time.perf_counter() - t0)
    bare = statistics.median(bare_times)
    gen = statistics.median(gen_times)
    ratio = gen / bare
    assert ratio <= 3.0, f"generated/bare ratio {ratio:.2f} exceeds 3x"
    report("parse-overhead-bound",
           f"{len(doc)} bytes, bare {bare * 1000:.1f}ms, generated "
           f"{gen * 1000:.1f}ms, ratio {ratio:.2f}x (median of 10 after 3 warmups)")


# ---------------------------------------------------------------- criterion 9

def test_lenient_mode_tolerance(tmp_path):
    schema = schema_of(PERF_SCHEMA)
    good = (f'<log xmlns="{TNS}">'
            '<rec id="1"><name>a</name><value>0.5</value><note>n</note></rec>'
            '<rec id="2"><name>b</name><value>1.5</value><note>m</note></rec>'
            '</log>')
    model, module, _, _ = build_and_import(schema, [good], tmp_path)

    injected = {
        "unknown-element": good.replace(
            "<note>n</note>", "<note>n</note><bogus><deep/></bogus>"),
        "missing-required": good.replace("<name>a</name>", ""),
        "bad-numeric": good.replace("<value>0.5</value>",
                                    "<value>not-a-number</value>"),
        "missing-required-attr": good.replace(' id="2"', ""),
    }
    expected_errors = {
        "unknown-element": UnknownElementError,
        "missing-required": MissingRequiredError,
        "bad-numeric": BadSimpleValueError,
        "missing-required-attr": MissingRequiredError,
    }
    for name, doc in injected.items():
        obj, warnings = module.parse_document(doc, mode="lenient",
                                              source_name=name)
        assert obj is not None
        assert len(warnings) == 1, (name, [w.format() for w in warnings])
        with pytest.raises(expected_errors[name]):
            module.parse_document(doc, mode="strict")

    # All four injections in one document parse to completion with 4 warnings.
    combined = good
    combined = combined.replace("<note>n</note>", "<note>n</note><bogus/>")
    combined = combined.replace("<name>a</name>", "")
    combined = combined.replace("<value>1.5</value>", "<value>zzz</value>")
    combined = combined.replace(' id="2"', "")
    obj, warnings = module.parse_document(combined, mode="lenient")
    assert obj is not None and len(obj.rec) == 2
    assert len(warnings) == 4, [w.format() for w in warnings]
    report("lenient-mode-tolerance",
           "warning count == injected violations; strict raises typed errors")
