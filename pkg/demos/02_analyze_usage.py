"""Corpus analysis: which schema components do the documents actually use?

Loads the library schema set, walks the bundled corpus, and prints the
usage facts that drive every later optimization: used components,
instanced types, substitutions, occurrence maxima, single-child wrappers.
"""

from pathlib import Path

from slimbind.analyzer import analyze_corpus
from slimbind.loader import SchemaSource, load_schema_set

HERE = Path(__file__).parent
schema = load_schema_set([SchemaSource.from_file(HERE / "data" / "library.xsd")])
corpus = sorted((HERE / "data" / "corpus").glob("*.xml"))

report = analyze_corpus(schema, corpus, mode="strict")
assert not report.failures

print(f"analyzed {report.document_count} documents")
print(f"roots observed: {sorted(report.root_elements)}")
print()

user = [c for c in schema.globals() if c.namespace == "urn:demo:library"]
used = [c for c in user if c.id in report.used_components]
print(f"global components used: {len(used)} of {len(user)}")
for comp in sorted(user, key=lambda c: c.id):
    marker = "x" if comp.id in report.used_components else " "
    print(f"  [{marker}] {comp.id}")

print()
print("substitutions observed at the abstract <item> head:")
for head, members in sorted(report.element_substitutions.items()):
    print(f"  {head} <- {sorted(members)}")

print()
print("occurrence maxima (drives list-vs-scalar mapping):")
for pp, count in sorted(report.occurrence_maxima.items()):
    print(f"  {pp.render():70} {count}")

print()
print("elements that only ever wrap a single child (collapse candidates):")
for elem in sorted(report.single_child_elements):
    print(f"  {elem}")

print()
print("the same facts serialize as stable JSON (usage-report.json):")
print("\n".join(report.to_json().splitlines()[:12]) + "\n  ...")
