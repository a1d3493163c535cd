"""Assign schema components to corpus document nodes and accumulate usage facts.

For every XML node the analyzer finds the element declaration and
effective type describing it, walking content models with a single-pass
greedy matcher (valid under XSD 1.0's Unique Particle Attribution rule).
The result is a UsageReport: which components were used, which types
were instanced, observed substitutions and wildcard fillers, per-particle
occurrence maxima, and which elements only ever wrap a single child.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import (
    AmbiguousMatchError,
    InvalidTypeOverrideError,
    MalformedDocumentError,
    MalformedXmlError,
    UnknownRootElementError,
    UnmatchedChildError,
)
from .model import (
    XSI_NAMESPACE,
    ComponentKind,
    ContentKind,
    ElementParticle,
    GroupParticle,
    QName,
    SchemaSet,
    WildcardParticle,
    substitution_members,
)
from .runtime import EventKind, ParseContext


@dataclass(frozen=True, order=True)
class ParticlePath:
    """Addresses one particle: the declaring type plus child indices."""

    owner_type: str
    path: tuple

    def render(self) -> str:
        return f"{self.owner_type}#{'.'.join(str(i) for i in self.path)}"

    @classmethod
    def parse(cls, text: str) -> "ParticlePath":
        owner, _, tail = text.rpartition("#")
        path = tuple(int(p) for p in tail.split(".")) if tail else ()
        return cls(owner, path)


class MatchKind(Enum):
    ELEMENT = "element"
    WILDCARD = "wildcard"
    WILDCARD_OPAQUE = "wildcard-opaque"
    SKIP = "skip"


@dataclass
class Assignment:
    kind: MatchKind
    particle: Optional[ParticlePath] = None
    element: Optional[str] = None  # element component id (wildcard filler included)
    effective_type: Optional[str] = None
    head: Optional[str] = None  # head element id when matched via substitution
    wildcard: Optional[str] = None


# ---------------------------------------------------------------- usage report

@dataclass
class UsageReport:
    used_components: set = field(default_factory=set)
    instanced_types: set = field(default_factory=set)
    type_substitutions: dict = field(default_factory=dict)  # elem id -> set(type id)
    element_substitutions: dict = field(default_factory=dict)  # head id -> set(member)
    wildcard_fillers: dict = field(default_factory=dict)  # wildcard id -> set(elem id)
    occurrence_maxima: dict = field(default_factory=dict)  # ParticlePath -> int
    single_child_elements: set = field(default_factory=set)
    document_count: int = 0
    root_elements: set = field(default_factory=set)
    # Non-serialized bookkeeping.
    failures: list = field(default_factory=list)  # (doc name, error)
    warnings: list = field(default_factory=list)
    _single_child_state: dict = field(default_factory=dict)  # elem id -> bool

    def merge(self, other: "UsageReport") -> "UsageReport":
        """Commutative merge: set union, pointwise max, count sum."""
        out = UsageReport()
        out.used_components = self.used_components | other.used_components
        out.instanced_types = self.instanced_types | other.instanced_types
        for src in (self, other):
            for k, v in src.type_substitutions.items():
                out.type_substitutions.setdefault(k, set()).update(v)
            for k, v in src.element_substitutions.items():
                out.element_substitutions.setdefault(k, set()).update(v)
            for k, v in src.wildcard_fillers.items():
                out.wildcard_fillers.setdefault(k, set()).update(v)
            for k, v in src.occurrence_maxima.items():
                out.occurrence_maxima[k] = max(out.occurrence_maxima.get(k, 0), v)
        for elem in set(self._single_child_state) | set(other._single_child_state):
            a = self._single_child_state.get(elem, True)
            b = other._single_child_state.get(elem, True)
            out._single_child_state[elem] = a and b
        out.single_child_elements = {e for e, ok in out._single_child_state.items() if ok}
        out.document_count = self.document_count + other.document_count
        out.root_elements = self.root_elements | other.root_elements
        out.failures = list(self.failures) + list(other.failures)
        out.warnings = list(self.warnings) + list(other.warnings)
        return out

    # -------------------------------------------------------- serialization

    def to_json_dict(self) -> dict:
        return {
            "documentCount": self.document_count,
            "usedComponents": sorted(self.used_components),
            "instancedTypes": sorted(self.instanced_types),
            "typeSubstitutions": {k: sorted(v) for k, v in
                                  sorted(self.type_substitutions.items())},
            "elementSubstitutions": {k: sorted(v) for k, v in
                                     sorted(self.element_substitutions.items())},
            "wildcardFillers": {k: sorted(v) for k, v in
                                sorted(self.wildcard_fillers.items())},
            "occurrenceMaxima": {pp.render(): n for pp, n in
                                 sorted(self.occurrence_maxima.items())},
            "singleChildElements": sorted(self.single_child_elements),
            "rootElements": sorted(self.root_elements),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "UsageReport":
        data = json.loads(text)
        report = cls()
        report.document_count = data["documentCount"]
        report.used_components = set(data["usedComponents"])
        report.instanced_types = set(data["instancedTypes"])
        report.type_substitutions = {k: set(v) for k, v in
                                     data["typeSubstitutions"].items()}
        report.element_substitutions = {k: set(v) for k, v in
                                        data["elementSubstitutions"].items()}
        report.wildcard_fillers = {k: set(v) for k, v in
                                   data["wildcardFillers"].items()}
        report.occurrence_maxima = {ParticlePath.parse(k): v for k, v in
                                    data["occurrenceMaxima"].items()}
        report.single_child_elements = set(data["singleChildElements"])
        report._single_child_state = {e: True for e in report.single_child_elements}
        report.root_elements = set(data["rootElements"])
        return report


def merge_reports(reports) -> UsageReport:
    out = UsageReport()
    for r in reports:
        out = out.merge(r)
    return out


# ---------------------------------------------------------------- root / child assignment

def assign_root(schema: SchemaSet, root_name: QName,
                xsi_type: Optional[QName] = None):
    """Global element for a document root and its effective type."""
    comp = schema.lookup_global("element", root_name)
    if comp is None:
        raise UnknownRootElementError(f"no global element named {root_name}")
    declared = comp.detail.declared_type
    if xsi_type is None:
        return comp.id, declared
    override = schema.lookup_global("type", xsi_type)
    if override is None:
        raise InvalidTypeOverrideError(f"xsi:type names unknown type {xsi_type}")
    if not schema.is_derived_from(override.id, declared):
        raise InvalidTypeOverrideError(
            f"xsi:type {xsi_type} is not derived from the declared type of {root_name}")
    return comp.id, override.id


class ContentMatcher:
    """Greedy left-to-right matcher for one complex type's content model."""

    def __init__(self, schema: SchemaSet, type_id: str):
        self.schema = schema
        self.type_id = type_id
        self.levels = []
        for declaring, content in schema.effective_content_chain(type_id):
            if content.kind is ContentKind.PARTICLES:
                self.levels.append((declaring, content.root))
        self._first_cache = {}
        self._element_names = {}

    # ------------------------------------------------------------ name tables

    def _element_matches(self, particle: ElementParticle):
        """qname -> (element id, is_substitution) for an element particle."""
        key = id(particle)
        table = self._element_names.get(key)
        if table is not None:
            return table
        table = {}
        comp = self.schema.component(particle.element)
        if not comp.detail.is_abstract:
            table[comp.detail.qname] = (comp.id, False)
        if comp.is_global:
            for member_id in substitution_members(self.schema, comp.id):
                member = self.schema.component(member_id)
                if not member.detail.is_abstract:
                    table.setdefault(member.detail.qname, (member_id, True))
        self._element_names[key] = table
        return table

    def _can_start(self, particle, name: QName) -> bool:
        if isinstance(particle, ElementParticle):
            return name in self._element_matches(particle)
        if isinstance(particle, WildcardParticle):
            wc = self.schema.component(particle.wildcard).detail
            if not wc.admits(name.namespace):
                return False
            if wc.process_contents == "strict":
                return self.schema.lookup_global("element", name) is not None
            return True
        if particle.compositor.value == "sequence":
            for child in particle.children:
                if self._can_start(child, name):
                    return True
                if not self._nullable(child):
                    return False
            return False
        return any(self._can_start(c, name) for c in particle.children)

    def _nullable(self, particle) -> bool:
        if particle.occurs.min == 0:
            return True
        if isinstance(particle, GroupParticle):
            if particle.compositor.value == "choice":
                return any(self._nullable(c) for c in particle.children)
            return all(self._nullable(c) for c in particle.children)
        return False

    # ------------------------------------------------------------ matching

    def match(self, names, strict: bool):
        """Assign each name; in lenient mode unmatched names become SKIPs."""
        state = _MatchState(names)
        while state.more():
            before = state.i
            for declaring, root in self.levels:
                self._match_particle(root, declaring, (), state)
                if not state.more():
                    break
            if state.i == before and state.more():
                if strict:
                    raise UnmatchedChildError(
                        f"child <{state.current()}> at position {state.i} does not "
                        f"match the content model of {self.type_id}")
                state.skip()
            if strict:
                break
        if strict and state.more():
            raise UnmatchedChildError(
                f"child <{state.current()}> at position {state.i} does not match "
                f"the content model of {self.type_id}")
        return state

    def _match_particle(self, particle, declaring, path, state) -> int:
        count = 0
        occurs = particle.occurs
        while state.more() and (occurs.max is None or count < occurs.max):
            if not self._can_start(particle, state.current()):
                break
            if not self._match_once(particle, declaring, path, state):
                break
            count += 1
        return count

    def _match_once(self, particle, declaring, path, state) -> bool:
        if isinstance(particle, ElementParticle):
            name = state.current()
            elem_id, via_subst = self._element_matches(particle)[name]
            pp = ParticlePath(declaring, path)
            elem = self.schema.component(elem_id)
            state.take(Assignment(
                kind=MatchKind.ELEMENT, particle=pp, element=elem_id,
                effective_type=elem.detail.declared_type,
                head=particle.element if via_subst else None), pp)
            return True

        if isinstance(particle, WildcardParticle):
            name = state.current()
            pp = ParticlePath(declaring, path)
            filler = self.schema.lookup_global("element", name)
            if filler is not None and not filler.detail.is_abstract:
                state.take(Assignment(
                    kind=MatchKind.WILDCARD, particle=pp, element=filler.id,
                    effective_type=filler.detail.declared_type,
                    wildcard=particle.wildcard), pp)
            else:
                state.take(Assignment(
                    kind=MatchKind.WILDCARD_OPAQUE, particle=pp,
                    wildcard=particle.wildcard), pp)
            return True

        if particle.ref:
            state.groups_used.add(particle.ref)
        comp = particle.compositor.value
        if comp == "sequence":
            progressed = False
            for i, child in enumerate(particle.children):
                if self._match_particle(child, declaring, path + (i,), state):
                    progressed = True
                if not state.more():
                    break
            return progressed
        if comp == "choice":
            if not state.more():
                return False
            name = state.current()
            candidates = [(i, c) for i, c in enumerate(particle.children)
                          if self._can_start(c, name)]
            non_wild = [(i, c) for i, c in candidates
                        if not isinstance(c, WildcardParticle)]
            pool = non_wild or candidates
            if len(pool) > 1:
                raise AmbiguousMatchError(
                    f"<{name}> matches {len(pool)} branches of a choice in "
                    f"{declaring}; content model is ambiguous")
            if not pool:
                return False
            i, child = pool[0]
            return self._match_particle(child, declaring, path + (i,), state) > 0
        # xs:all -- children in any order, each at most once
        matched = set()
        progressed = False
        while state.more():
            name = state.current()
            candidates = [(i, c) for i, c in enumerate(particle.children)
                          if i not in matched and self._can_start(c, name)]
            if not candidates:
                break
            if len(candidates) > 1:
                raise AmbiguousMatchError(
                    f"<{name}> matches {len(candidates)} members of an all-group in "
                    f"{declaring}")
            i, child = candidates[0]
            if self._match_particle(child, declaring, path + (i,), state):
                matched.add(i)
                progressed = True
            else:
                break
        return progressed


class _MatchState:
    def __init__(self, names):
        self.names = list(names)
        self.i = 0
        self.assignments = [None] * len(self.names)
        self.counts = {}  # ParticlePath -> count under this parent
        self.groups_used = set()

    def more(self):
        return self.i < len(self.names)

    def current(self):
        return self.names[self.i]

    def take(self, assignment, pp):
        self.assignments[self.i] = assignment
        self.counts[pp] = self.counts.get(pp, 0) + 1
        self.i += 1

    def skip(self):
        self.assignments[self.i] = Assignment(kind=MatchKind.SKIP)
        self.i += 1


def assign_children(schema: SchemaSet, parent_type: str, child_names,
                    mode: str = "strict"):
    """Match a child-name sequence against a complex type's content model.

    Returns one Assignment per child; in lenient mode unmatched children get
    SKIP assignments instead of raising.
    """
    matcher = ContentMatcher(schema, parent_type)
    state = matcher.match(list(child_names), strict=(mode == "strict"))
    return state.assignments


# ---------------------------------------------------------------- document analysis

@dataclass
class _INode:
    qname: QName
    attributes: tuple
    xsi_type: Optional[QName]
    nil: bool
    children: list
    has_text: bool
    line: int
    col: int


_XSI_LOCAL_IGNORED = {"schemaLocation", "noNamespaceSchemaLocation"}


def _read_skeleton(data, name: str) -> _INode:
    ctx = ParseContext(data, mode="strict", source_name=name)
    root = None
    stack = []
    while True:
        ev = ctx.next_event()
        if ev.kind is EventKind.START_ELEMENT:
            xsi_type = None
            nil = False
            plain = []
            for qn, value in ev.attributes:
                if qn.namespace == XSI_NAMESPACE:
                    if qn.local == "type":
                        nsmap = ctx.active_namespaces()
                        value = value.strip()
                        if ":" in value:
                            prefix, _, local = value.partition(":")
                            ns = nsmap.get(prefix)
                            if ns is None:
                                raise MalformedXmlError(
                                    f"xsi:type uses undeclared prefix '{prefix}'",
                                    line=ev.line, col=ev.col, source=name)
                            xsi_type = QName(ns, local)
                        else:
                            xsi_type = QName(nsmap.get("", ""), value)
                    elif qn.local == "nil":
                        nil = value.strip() in ("true", "1")
                    elif qn.local in _XSI_LOCAL_IGNORED:
                        continue
                    continue
                plain.append((qn, value))
            node = _INode(ev.name, tuple(plain), xsi_type, nil, [], False,
                          ev.line, ev.col)
            if stack:
                stack[-1].children.append(node)
            elif root is None:
                root = node
            stack.append(node)
        elif ev.kind is EventKind.TEXT:
            if stack and ev.text.strip():
                stack[-1].has_text = True
        elif ev.kind is EventKind.END_ELEMENT:
            stack.pop()
        elif ev.kind is EventKind.END_DOCUMENT:
            return root


class _DocumentAnalyzer:
    def __init__(self, schema: SchemaSet, mode: str, doc_name: str):
        self.schema = schema
        self.strict = mode == "strict"
        self.doc = doc_name
        self.report = UsageReport()
        self._matchers = {}

    def _matcher(self, type_id) -> ContentMatcher:
        m = self._matchers.get(type_id)
        if m is None:
            m = self._matchers[type_id] = ContentMatcher(self.schema, type_id)
        return m

    def warn(self, node, message):
        self.report.warnings.append(f"{self.doc}:{node.line}:{node.col}: {message}")

    def run(self, root: _INode) -> UsageReport:
        elem_id, type_id = assign_root(self.schema, root.qname, root.xsi_type)
        self.report.root_elements.add(elem_id)
        if root.xsi_type is not None and type_id != \
                self.schema.component(elem_id).detail.declared_type:
            self.report.type_substitutions.setdefault(elem_id, set()).add(type_id)
        self.visit(root, elem_id, type_id)
        self.report.document_count = 1
        self.report.single_child_elements = {
            e for e, ok in self.report._single_child_state.items() if ok}
        return self.report

    def _apply_xsi_type(self, node, elem_id, declared):
        if node.xsi_type is None:
            return declared
        override = self.schema.lookup_global("type", node.xsi_type)
        if override is None or not self.schema.is_derived_from(override.id, declared):
            message = (f"xsi:type {node.xsi_type} on <{node.qname}> is not derived "
                       f"from the declared type")
            if self.strict:
                raise InvalidTypeOverrideError(f"{self.doc}:{node.line}: {message}")
            self.warn(node, message)
            return declared
        if override.id != declared:
            self.report.type_substitutions.setdefault(elem_id, set()).add(override.id)
        return override.id

    def visit(self, node: _INode, elem_id: str, type_id: str):
        report = self.report
        report.used_components.add(elem_id)
        report.used_components.add(type_id)
        report.instanced_types.add(type_id)

        comp = self.schema.component(type_id)
        is_complex = comp.kind is ComponentKind.COMPLEX_TYPE

        # Attribute usage.
        declared_attrs = {}
        if is_complex:
            for _level, use in self.schema.effective_attribute_uses(type_id):
                attr = self.schema.component(use.attribute)
                declared_attrs[attr.detail.qname] = use.attribute
        wildcard_attr = None
        if is_complex:
            wildcard_attr = comp.detail.attribute_wildcard
        for qn, _value in node.attributes:
            attr_id = declared_attrs.get(qn)
            if attr_id is not None:
                report.used_components.add(attr_id)
            elif wildcard_attr is not None and self.schema.component(
                    wildcard_attr).detail.admits(qn.namespace):
                report.used_components.add(wildcard_attr)
            else:
                self.warn(node, f"undeclared attribute {qn} on <{node.qname}>")

        # Single-child qualification (per element declaration).
        mixed = is_complex and self.schema.effective_mixed(type_id)
        qualifies = (len(node.children) == 1 and not node.attributes
                     and not node.has_text and not mixed and not node.nil)
        state = report._single_child_state
        state[elem_id] = state.get(elem_id, True) and qualifies

        if node.nil:
            if node.children:
                self._unmatched_children(node, node.children)
            return

        if not node.children:
            return

        if not is_complex or comp.detail.content.kind is ContentKind.SIMPLE or (
                not self._matcher(type_id).levels):
            self._unmatched_children(node, node.children)
            return

        matcher = self._matcher(type_id)
        names = [c.qname for c in node.children]
        try:
            st = matcher.match(names, strict=self.strict)
        except UnmatchedChildError as exc:
            raise UnmatchedChildError(f"{self.doc}:{node.line}: {exc}") from None
        report.used_components.update(st.groups_used)
        for pp, count in st.counts.items():
            report.occurrence_maxima[pp] = max(report.occurrence_maxima.get(pp, 0),
                                               count)
        for child, assignment in zip(node.children, st.assignments):
            self._visit_child(child, assignment)

    def _visit_child(self, child: _INode, assignment: Assignment):
        report = self.report
        if assignment.kind is MatchKind.SKIP:
            self.warn(child, f"unmatched element <{child.qname}> skipped")
            return
        if assignment.kind is MatchKind.WILDCARD_OPAQUE:
            report.used_components.add(assignment.wildcard)
            self.warn(child, f"wildcard content <{child.qname}> has no global "
                             "declaration; subtree recorded against the wildcard")
            return
        if assignment.kind is MatchKind.WILDCARD:
            report.used_components.add(assignment.wildcard)
            report.wildcard_fillers.setdefault(assignment.wildcard, set()).add(
                assignment.element)
        if assignment.head is not None:
            # The head itself is retained later via the SUBSTITUTION_HEAD edge;
            # only the member that actually appeared counts as used.
            report.element_substitutions.setdefault(assignment.head, set()).add(
                assignment.element)
        effective = self._apply_xsi_type(child, assignment.element,
                                         assignment.effective_type)
        self.visit(child, assignment.element, effective)

    def _unmatched_children(self, node, children):
        if self.strict:
            raise UnmatchedChildError(
                f"{self.doc}:{node.line}: <{node.qname}> does not allow element "
                f"children but has <{children[0].qname}>")
        for child in children:
            self.warn(child, f"unmatched element <{child.qname}> skipped")


def _coerce_document(index: int, item):
    if isinstance(item, tuple):
        name, data = item
        return str(name), data
    if isinstance(item, (str, bytes)):
        return f"doc[{index}]", item
    if hasattr(item, "__fspath__"):
        path = os.fspath(item)
        with open(path, "rb") as fh:
            return path, fh.read()
    raise TypeError(f"unsupported document source: {type(item)!r}")


def analyze_document(schema: SchemaSet, name: str, data, mode: str) -> UsageReport:
    try:
        root = _read_skeleton(data, name)
    except MalformedXmlError as exc:
        raise MalformedDocumentError(f"{name}: {exc}") from exc
    if root is None:
        raise MalformedDocumentError(f"{name}: empty document")
    return _DocumentAnalyzer(schema, mode, name).run(root)


def analyze_corpus(schema: SchemaSet, documents, mode: str = "strict") -> UsageReport:
    """Aggregate usage facts over a corpus; document order does not matter.

    Failed documents (malformed, or unmatched in strict mode) are recorded
    in ``report.failures`` and contribute nothing else to the report.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"mode must be strict or lenient, got {mode!r}")
    total = UsageReport()
    for i, item in enumerate(documents):
        name, data = _coerce_document(i, item)
        try:
            part = analyze_document(schema, name, data, mode)
        except (MalformedDocumentError, UnmatchedChildError,
                InvalidTypeOverrideError, UnknownRootElementError,
                AmbiguousMatchError) as exc:
            total.failures.append((name, exc))
            continue
        total = total.merge(part)
    return total
