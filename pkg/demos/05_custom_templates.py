"""The template seam: render something other than parsers from the model.

The built-in Python backend is itself a template set; swapping in custom
templates retargets emission without touching the pipeline. Here the same
binding model renders a Markdown data dictionary.
"""

from pathlib import Path

from slimbind.analyzer import analyze_corpus
from slimbind.binding import BindingOptions, build_binding_model
from slimbind.emitter import render
from slimbind.loader import SchemaSource, load_schema_set
from slimbind.simplify import compute_retained_set
from slimbind.templates import ManifestEntry, TemplateSet

HERE = Path(__file__).parent

schema = load_schema_set([SchemaSource.from_file(HERE / "data" / "library.xsd")])
corpus = sorted((HERE / "data" / "corpus").glob("*.xml"))
usage = analyze_corpus(schema, corpus)
retained = compute_retained_set(schema, usage)
model = build_binding_model(schema, retained, usage, BindingOptions(),
                            model_name="docs")

DICTIONARY = """# Data dictionary for model '{{model_name}}' ({{class_count}} classes)
{{#classes}}

## {{name}}

source: `{{xml_type}}`
{{#fields}}
- `{{py_name}}`
{{/fields}}
{{/classes}}
"""

templates = TemplateSet(
    templates={"dict.md": DICTIONARY},
    manifest=[ManifestEntry("dict.md", "DICTIONARY.md", per="model")])

artifacts = render(model, templates)
print(artifacts[0].content)
