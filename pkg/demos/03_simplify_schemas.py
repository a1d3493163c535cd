"""Schema subsetting: keep only what the corpus needs, emit valid XSD.

The retained set is the usage report closed under mandatory reference
edges (base types, declared types, attribute types, group refs,
substitution heads) plus inline-definition ownership. The emitted subset
reloads cleanly and re-analyzing the same corpus against it succeeds.
"""

from pathlib import Path

from slimbind.analyzer import analyze_corpus
from slimbind.loader import SchemaSource, load_schema_set
from slimbind.simplify import (
    compute_retained_set,
    emit_reduced_schemas,
    reduction_report,
)

HERE = Path(__file__).parent
OUT = HERE / "out" / "reduced"

schema = load_schema_set([SchemaSource.from_file(HERE / "data" / "library.xsd")])
corpus = sorted((HERE / "data" / "corpus").glob("*.xml"))
usage = analyze_corpus(schema, corpus)
assert not usage.failures

retained = compute_retained_set(schema, usage)
reduction = reduction_report(schema, retained)
print(f"retained {reduction.retained_components} of "
      f"{reduction.total_components} globals ({reduction.percent()})")
print("removed:")
for qname in reduction.removed_globals:
    print(f"  {qname}")

files = emit_reduced_schemas(schema, retained, OUT)
print()
for f in files:
    print(f"wrote {f}")

print()
print("--- reduced schema (every definition the corpus needs, nothing else) ---")
print(Path(files[0]).read_text())

# Round trip: the emitted subset is a real schema set in its own right.
reduced = load_schema_set([SchemaSource.from_file(f) for f in files])
usage2 = analyze_corpus(reduced, corpus)
assert not usage2.failures
assert usage2.used_components == usage.used_components
print("round trip: re-analysis against the reduced schemas matches exactly")
