"""Shared helpers: compact schema/corpus fixtures used across the suite."""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from slimbind.analyzer import analyze_corpus
from slimbind.loader import SchemaSource, load_schema_set

TNS = "urn:fix"

XS_HEAD = ('<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema" '
           f'xmlns:tns="{TNS}" targetNamespace="{TNS}" '
           'elementFormDefault="qualified">')


def schema_of(body: str, system_id="mem://fixture.xsd"):
    """Load a single-document schema whose body sits inside xs:schema."""
    text = f"{XS_HEAD}\n{body}\n</xs:schema>"
    return load_schema_set([SchemaSource(system_id, raw_text=text)])


def analyze(schema, *docs, mode="strict"):
    report = analyze_corpus(
        schema, [(f"doc{i}.xml", d) for i, d in enumerate(docs)], mode=mode)
    assert not report.failures, f"fixture corpus failed: {report.failures}"
    return report


def cid(kind: str, local_or_path: str, ns: str = TNS) -> str:
    return f"{kind}:{ns}:{local_or_path}"


@pytest.fixture
def po_schema():
    """Purchase-order style schema exercising most constructs."""
    return schema_of("""
  <xs:element name="po" type="tns:POType"/>
  <xs:element name="memo" type="xs:string"/>
  <xs:complexType name="POType">
    <xs:sequence>
      <xs:element name="item" type="tns:ItemType" minOccurs="0" maxOccurs="unbounded"/>
      <xs:element name="shipTo" type="tns:AddressType" minOccurs="0"/>
      <xs:element name="note" type="xs:string" minOccurs="0"/>
    </xs:sequence>
    <xs:attribute name="id" type="xs:int" use="required"/>
  </xs:complexType>
  <xs:complexType name="ItemType">
    <xs:sequence>
      <xs:element name="name" type="xs:string"/>
      <xs:element name="price" type="xs:decimal"/>
    </xs:sequence>
    <xs:attribute name="qty" type="xs:int"/>
  </xs:complexType>
  <xs:complexType name="AddressType">
    <xs:sequence>
      <xs:element name="street" type="xs:string"/>
      <xs:element name="city" type="xs:string"/>
    </xs:sequence>
  </xs:complexType>
  <xs:complexType name="UnusedType">
    <xs:sequence><xs:element name="ghost" type="xs:string"/></xs:sequence>
  </xs:complexType>
""")


PO_DOC = f"""<po xmlns="{TNS}" id="7">
  <item qty="2"><name>widget</name><price>9.99</price></item>
  <item><name>gadget</name><price>1.25</price></item>
  <note>rush order</note>
</po>"""
