"""Seeded random schema + conforming corpus generator.

Builds a type DAG (no recursion), renders it to XSD text, and emits
documents by walking the same internal description, so every generated
document is valid against the generated schema in strict mode.  Element
names are globally unique, keeping content models trivially deterministic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

NS = "urn:synth"

_SIMPLE = [
    ("xs:string", "string"),
    ("xs:int", "int"),
    ("xs:decimal", "decimal"),
    ("xs:boolean", "boolean"),
    ("xs:double", "double"),
]


@dataclass
class PSimple:
    name: str
    xs_type: str
    category: str
    min: int
    max: object  # int or None


@dataclass
class PComplex:
    name: str
    type_name: str
    min: int
    max: object


@dataclass
class PChoice:
    branches: list  # of PSimple
    min: int
    max: object


@dataclass
class PHead:
    head: str  # global element name
    min: int
    max: object


@dataclass
class PAny:
    min: int
    max: object


@dataclass
class GType:
    name: str
    base: str = None
    particles: list = field(default_factory=list)
    attrs: list = field(default_factory=list)  # (name, xs_type, category, required)
    has_wildcard: bool = False


@dataclass
class GElement:
    name: str
    type_name: str
    head: str = None
    abstract: bool = False


@dataclass
class GSchema:
    types: dict = field(default_factory=dict)  # name -> GType
    elements: dict = field(default_factory=dict)  # name -> GElement
    roots: list = field(default_factory=list)
    derived: dict = field(default_factory=dict)  # base type -> [derived types]

    def particle_chain(self, type_name):
        """(declaring type, particles) levels, base to derived."""
        t = self.types[type_name]
        own = [(type_name, t.particles)]
        if t.base:
            return self.particle_chain(t.base) + own
        return own

    def attr_chain(self, type_name):
        t = self.types[type_name]
        own = list(t.attrs)
        if t.base:
            return self.attr_chain(t.base) + own
        return own


def generate_schema(rng: random.Random, n_types=None) -> GSchema:
    g = GSchema()
    n_types = n_types or rng.randint(3, 7)
    counter = [0]

    def fresh(prefix):
        counter[0] += 1
        return f"{prefix}{counter[0]}"

    def occurs():
        min_v = rng.choice([0, 1, 1])
        max_v = rng.choice([1, 1, 1, 3, None])
        if max_v is not None and max_v < max(min_v, 1):
            max_v = max(min_v, 1)
        return min_v, max_v

    type_names = []
    for i in range(n_types):
        name = f"T{i}"
        base = None
        if i > 0 and rng.random() < 0.3:
            candidates = [t for t in type_names if not g.types[t].has_wildcard]
            if candidates:
                base = rng.choice(candidates)
        t = GType(name, base=base)
        n_parts = rng.randint(1, 3)
        for _ in range(n_parts):
            roll = rng.random()
            min_v, max_v = occurs()
            if roll < 0.55 or not type_names:
                xs_type, cat = rng.choice(_SIMPLE)
                t.particles.append(PSimple(fresh("e"), xs_type, cat, min_v, max_v))
            elif roll < 0.8:
                t.particles.append(PComplex(fresh("c"), rng.choice(type_names),
                                            min_v, max_v))
            else:
                branches = []
                for _b in range(2):
                    xs_type, cat = rng.choice(_SIMPLE)
                    branches.append(PSimple(fresh("b"), xs_type, cat, 1, 1))
                t.particles.append(PChoice(branches, min_v, max_v or 1))
        if rng.random() < 0.4:
            xs_type, cat = rng.choice(_SIMPLE)
            t.attrs.append((fresh("a"), xs_type, cat, rng.random() < 0.5))
        if rng.random() < 0.15:
            t.particles.append(PAny(0, rng.choice([1, 2])))
            t.has_wildcard = True
        g.types[name] = t
        type_names.append(name)
        if base:
            g.derived.setdefault(base, []).append(name)

    # Substitution group: a head plus one or two members, two levels sometimes.
    # The hosting type must come later in the DAG than every member type so
    # document generation cannot recurse.
    if rng.random() < 0.6 and len(type_names) > 1:
        head_type = rng.choice(type_names[:-1])
        head = GElement(fresh("h"), head_type, abstract=rng.random() < 0.3)
        g.elements[head.name] = head
        member_type = head_type
        if g.derived.get(head_type) and rng.random() < 0.5:
            member_type = rng.choice(g.derived[head_type])
        m1 = GElement(fresh("m"), member_type, head=head.name)
        g.elements[m1.name] = m1
        if rng.random() < 0.5:
            m2 = GElement(fresh("m"), member_type, head=m1.name)
            g.elements[m2.name] = m2
        max_idx = max(type_names.index(head_type), type_names.index(member_type))
        hosts = type_names[max_idx + 1:]
        if hosts:
            t = g.types[rng.choice(hosts)]
            min_v, max_v = occurs()
            t.particles.append(PHead(head.name, min_v, max_v))

    # Roots (always at least one) plus never-used globals for pruning.
    for _ in range(rng.randint(1, 2)):
        root = GElement(fresh("root"), rng.choice(type_names))
        g.elements[root.name] = root
        g.roots.append(root.name)
    for _ in range(rng.randint(1, 3)):
        unused = GType(f"U{fresh('u')}")
        xs_type, cat = rng.choice(_SIMPLE)
        unused.particles.append(PSimple(fresh("e"), xs_type, cat, 1, 1))
        g.types[unused.name] = unused
        if rng.random() < 0.5:
            dead = GElement(fresh("dead"), unused.name)
            g.elements[dead.name] = dead
    return g


# ---------------------------------------------------------------- xsd rendering

def render_xsd(g: GSchema) -> str:
    lines = [
        '<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema"',
        f'           xmlns:tns="{NS}" targetNamespace="{NS}"',
        '           elementFormDefault="qualified">',
    ]

    def occ(min_v, max_v):
        parts = []
        if min_v != 1:
            parts.append(f' minOccurs="{min_v}"')
        if max_v is None:
            parts.append(' maxOccurs="unbounded"')
        elif max_v != 1:
            parts.append(f' maxOccurs="{max_v}"')
        return "".join(parts)

    for elem in g.elements.values():
        attrs = f'name="{elem.name}" type="tns:{elem.type_name}"'
        if elem.head:
            attrs += f' substitutionGroup="tns:{elem.head}"'
        if elem.abstract:
            attrs += ' abstract="true"'
        lines.append(f"  <xs:element {attrs}/>")

    for t in g.types.values():
        body = []
        for p in t.particles:
            if isinstance(p, PSimple):
                body.append(f'      <xs:element name="{p.name}" type="{p.xs_type}"'
                            f'{occ(p.min, p.max)}/>')
            elif isinstance(p, PComplex):
                body.append(f'      <xs:element name="{p.name}" '
                            f'type="tns:{p.type_name}"{occ(p.min, p.max)}/>')
            elif isinstance(p, PHead):
                body.append(f'      <xs:element ref="tns:{p.head}"'
                            f'{occ(p.min, p.max)}/>')
            elif isinstance(p, PChoice):
                body.append(f'      <xs:choice{occ(p.min, p.max)}>')
                for b in p.branches:
                    body.append(f'        <xs:element name="{b.name}" '
                                f'type="{b.xs_type}"/>')
                body.append('      </xs:choice>')
            elif isinstance(p, PAny):
                body.append(f'      <xs:any processContents="lax"'
                            f'{occ(p.min, p.max)}/>')
        attr_lines = [
            f'    <xs:attribute name="{a}" type="{xs}"'
            + (' use="required"' if req else "") + "/>"
            for a, xs, _cat, req in t.attrs]
        inner = ["    <xs:sequence>"] + body + ["    </xs:sequence>"] + attr_lines
        if t.base:
            lines.append(f'  <xs:complexType name="{t.name}">')
            lines.append('    <xs:complexContent>')
            lines.append(f'      <xs:extension base="tns:{t.base}">')
            lines.extend("    " + ln for ln in inner)
            lines.append('      </xs:extension>')
            lines.append('    </xs:complexContent>')
            lines.append('  </xs:complexType>')
        else:
            lines.append(f'  <xs:complexType name="{t.name}">')
            lines.extend(inner)
            lines.append('  </xs:complexType>')
    lines.append("</xs:schema>")
    return "\n".join(lines)


# ---------------------------------------------------------------- documents

_VALUES = {
    "string": lambda rng: rng.choice(["alpha", "beta", "gamma delta", ""]),
    "int": lambda rng: str(rng.randint(-50, 500)),
    "decimal": lambda rng: f"{rng.randint(0, 99)}.{rng.randint(0, 99):02d}",
    "boolean": lambda rng: rng.choice(["true", "false", "0", "1"]),
    "double": lambda rng: rng.choice(["1.5", "-3.25", "4e2", "0.125"]),
}


def _concrete_members(g, head_name):
    """Elements that may appear where head_name is referenced."""
    out = []
    if not g.elements[head_name].abstract:
        out.append(head_name)
    for elem in g.elements.values():
        cursor = elem.head
        while cursor:
            if cursor == head_name:
                if not elem.abstract:
                    out.append(elem.name)
                break
            cursor = g.elements[cursor].head
    return out


def generate_document(rng: random.Random, g: GSchema, root=None) -> str:
    root = root or rng.choice(g.roots)
    out = []
    used_xsi = [False]

    def count_for(min_v, max_v):
        hi = 3 if max_v is None else min(max_v, 3)
        return rng.randint(min_v, max(min_v, hi))

    def emit_value(cat):
        return _VALUES[cat](rng)

    def emit_typed(tag, type_name, indent, force_type=None):
        t_name = type_name
        xsi = ""
        # Depth-capped: derived content can reference base-typed particles,
        # which would otherwise allow unbounded substitution chains.
        if force_type is None and g.derived.get(type_name) and indent <= 6 \
                and rng.random() < 0.3:
            t_name = rng.choice(g.derived[type_name])
            xsi = f' xsi:type="tns:{t_name}"'
            used_xsi[0] = True
        elif force_type is not None:
            t_name = force_type
        attrs = []
        for a, _xs, cat, req in g.attr_chain(t_name):
            if req or rng.random() < 0.6:
                attrs.append(f' {a}="{emit_value(cat)}"')
        pad = "  " * indent
        out.append(f"{pad}<{tag}{xsi}{''.join(attrs)}>")
        for declaring, particles in g.particle_chain(t_name):
            for p in particles:
                emit_particle(p, indent + 1)
        out.append(f"{pad}</{tag}>")

    def emit_particle(p, indent):
        pad = "  " * indent
        if isinstance(p, PSimple):
            for _ in range(count_for(p.min, p.max)):
                out.append(f"{pad}<{p.name}>{emit_value(p.category)}</{p.name}>")
        elif isinstance(p, PComplex):
            for _ in range(count_for(p.min, p.max)):
                emit_typed(p.name, p.type_name, indent)
        elif isinstance(p, PChoice):
            for _ in range(count_for(p.min, p.max)):
                b = rng.choice(p.branches)
                out.append(f"{pad}<{b.name}>{emit_value(b.category)}</{b.name}>")
        elif isinstance(p, PHead):
            members = _concrete_members(g, p.head)
            if not members:
                return
            for _ in range(count_for(p.min, p.max)):
                m = rng.choice(members)
                emit_typed(m, g.elements[m].type_name, indent,
                           force_type=g.elements[m].type_name)
        elif isinstance(p, PAny):
            if indent > 10:
                return  # wildcards re-enter arbitrary globals; cap the depth
            fillers = [e for e in g.elements.values() if not e.abstract]
            for _ in range(count_for(p.min, p.max)):
                f = rng.choice(fillers)
                emit_typed(f.name, f.type_name, indent, force_type=f.type_name)

    root_elem = g.elements[root]
    emit_typed(root, root_elem.type_name, 0, force_type=root_elem.type_name)
    text = "\n".join(out)
    first_close = text.index(">")
    decl = f' xmlns="{NS}"'
    if used_xsi[0]:
        decl += ' xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"' \
                ' xmlns:tns="' + NS + '"'
    return text[:first_close] + decl + text[first_close:]


def generate_case(seed: int, n_docs=None):
    """(xsd text, [doc texts]) for one seeded case."""
    rng = random.Random(seed)
    g = generate_schema(rng)
    n_docs = n_docs or rng.randint(1, 4)
    docs = [generate_document(rng, g) for _ in range(n_docs)]
    return g, render_xsd(g), docs
