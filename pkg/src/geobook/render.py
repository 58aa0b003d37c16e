"""Document generation: textbook to XML, XML to styled HTML.

The XML schema is deliberately small (see docs/formats.md): a
version-attributed ``<textbook>`` root, nested ``<category>`` elements
in linearization order, and one ``<object>`` element per knowledge
object carrying its natural-language text (with explicit locale
fallback), the canonical pretty-printed formal text, and references to
figure scripts and proofs.  Output is byte-deterministic for identical
inputs, and the HTML transform is an internal template pass; the XML
stays XSLT-friendly for downstream toolchains.
"""

from __future__ import annotations

import html
from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

from . import geolang
from .book import Category, DanglingReference, Leaf, Textbook, linearize
from .store import KnowledgeObject, Store

XML_VERSION = "1"
DEFAULT_LOCALE = "en"


@dataclass(frozen=True)
class Theme:
    name: str
    lang: str
    kind_labels: dict[str, str]
    contents_label: str
    figure_label: str
    proof_label: str
    degenerate_label: str = "degenerate"


_EN_KINDS = {
    "Concept": "Definition",
    "Axiom": "Axiom",
    "Lemma": "Lemma",
    "Theorem": "Theorem",
    "Corollary": "Corollary",
    "Conjecture": "Conjecture",
    "Proof": "Proof",
    "Problem": "Problem",
    "Example": "Example",
    "Exercise": "Exercise",
    "Solution": "Solution",
    "Algorithm": "Algorithm",
    "Introduction": "Introduction",
    "Remark": "Remark",
}

_ZH_KINDS = {
    "Concept": "定义",
    "Axiom": "公理",
    "Lemma": "引理",
    "Theorem": "定理",
    "Corollary": "推论",
    "Conjecture": "猜想",
    "Proof": "证明",
    "Problem": "问题",
    "Example": "例",
    "Exercise": "习题",
    "Solution": "解",
    "Algorithm": "算法",
    "Introduction": "引言",
    "Remark": "注",
}

THEMES = {
    "default-en": Theme(
        "default-en", "en", _EN_KINDS, "Contents", "Figure", "Proof"
    ),
    "default-zh": Theme(
        "default-zh",
        "zh",
        _ZH_KINDS,
        "目录",
        "图",
        "证明",
    ),
}


class RenderError(Exception):
    pass


# --- XML --------------------------------------------------------------------


@dataclass
class DocumentTree:
    """The generated XML document plus enough structure for transforms."""

    xml: str
    book_id: str
    locale: str
    object_order: list[str]

    def to_bytes(self) -> bytes:
        return self.xml.encode("utf-8")


def to_xml(
    book: Textbook,
    store: Store,
    scope: str | None = None,
    locale: str = DEFAULT_LOCALE,
    default_locale: str = DEFAULT_LOCALE,
) -> DocumentTree:
    """Assemble the document for the whole book or one category subtree.

    Missing locale text falls back to the default locale and the
    element says so via a ``fallback`` attribute.  Raises
    :class:`DanglingReference` for leaves missing from the store.
    """
    if scope is None:
        root: Category = book.root
    else:
        found = book.find_category(scope)
        if found is None:
            raise RenderError(f"no category '{scope}' in book '{book.id}'")
        root = found

    order = linearize(Textbook(book.id, book.title, root))
    missing = [oid for oid in order if oid not in store]
    if missing:
        raise DanglingReference(
            "cannot render: missing object(s) " + ", ".join(missing)
        )

    lines: list[str] = ['<?xml version="1.0" encoding="UTF-8"?>']
    attrs = f' version={quoteattr(XML_VERSION)} id={quoteattr(book.id)}'
    attrs += f" title={quoteattr(book.title)} locale={quoteattr(locale)}"
    if scope is not None:
        attrs += f" scope={quoteattr(scope)}"
    lines.append(f"<textbook{attrs}>")
    _category_xml(root, store, locale, default_locale, lines, indent=1)
    lines.append("</textbook>")
    return DocumentTree(
        xml="\n".join(lines) + "\n",
        book_id=book.id,
        locale=locale,
        object_order=order,
    )


def _category_xml(cat: Category, store, locale, default_locale, lines, indent):
    pad = "  " * indent
    lines.append(f"{pad}<category id={quoteattr(cat.id)} title={quoteattr(cat.title)}>")
    for child in cat.children:
        if isinstance(child, Category):
            _category_xml(child, store, locale, default_locale, lines, indent + 1)
        else:
            _object_xml(child, store, locale, default_locale, lines, indent + 1)
    lines.append(f"{pad}</category>")


def _object_xml(leaf: Leaf, store, locale, default_locale, lines, indent):
    pad = "  " * indent
    obj = store.get(leaf.object_id)
    assert isinstance(obj, KnowledgeObject)
    lines.append(
        f"{pad}<object id={quoteattr(obj.id)} kind={quoteattr(obj.kind)} "
        f"name={quoteattr(obj.name)}>"
    )
    inner = "  " * (indent + 1)
    text, used = _natural_text(obj, locale, default_locale)
    if text is not None:
        fallback = "" if used == locale else f" fallback={quoteattr(used)}"
        lines.append(
            f"{inner}<natural locale={quoteattr(used)}{fallback}>"
            f"{escape(text)}</natural>"
        )
    if obj.formal:
        lines.append(f"{inner}<formal>{escape(_canonical_formal(obj.formal))}</formal>")
    if obj.diagram:
        lines.append(f"{inner}<figure-ref object={quoteattr(obj.id)}/>")
    for proof_id in sorted(
        store.query_relation(None, obj.id, "Justification")
    ):
        lines.append(f"{inner}<proof-ref object={quoteattr(proof_id)}/>")
    lines.append(f"{pad}</object>")


def _natural_text(obj: KnowledgeObject, locale: str, default_locale: str):
    if locale in obj.natural:
        return obj.natural[locale], locale
    if default_locale in obj.natural:
        return obj.natural[default_locale], default_locale
    return None, locale


def _canonical_formal(source: str) -> str:
    try:
        return geolang.pretty(geolang.parse(source)).rstrip("\n")
    except geolang.GeoSyntaxError:
        return source


# --- HTML ------------------------------------------------------------------

_CSS = """\
body { font-family: Georgia, 'Times New Roman', serif; margin: 2rem auto;
       max-width: 46rem; line-height: 1.55; color: #1a1a1a; }
h1 { border-bottom: 2px solid #345; padding-bottom: .3rem; }
h2, h3, h4 { color: #234; }
.object { margin: 1.2rem 0; padding: .6rem .9rem; border-left: 3px solid #9ab; }
.object .head { font-weight: bold; }
.object .name { font-weight: normal; font-style: italic; }
.formal { background: #f4f6f8; padding: .6rem; overflow-x: auto;
          font-family: 'DejaVu Sans Mono', Consolas, monospace; font-size: .92em; }
.figure-ref, .proof-ref { font-size: .9em; color: #567; }
nav.contents { background: #f8f8f4; padding: .6rem 1rem; }
nav.contents ul { margin: .2rem 0 .2rem 1rem; padding-left: 1rem; }
"""


def to_html(doc: DocumentTree, store: Store, theme: str = "default-en") -> str:
    """Standalone HTML page from a generated document.

    Objects are numbered per kind in document order (Theorem 1,
    Theorem 2, ..., Definition 1, ...) and anchored by object id.
    """
    th = THEMES.get(theme)
    if th is None:
        raise RenderError(f"unknown theme {theme!r}; shipped: {sorted(THEMES)}")
    import xml.etree.ElementTree as ET

    root = ET.fromstring(doc.xml)
    title = root.get("title", "")
    counters: dict[str, int] = {}
    body: list[str] = []
    toc: list[str] = []

    def walk_category(cat, depth):
        heading = min(depth + 2, 6)
        cat_title = cat.get("title", "")
        cat_id = cat.get("id", "")
        body.append(
            f'<h{heading} id={quoteattr(cat_id)}>{html.escape(cat_title)}</h{heading}>'
        )
        toc.append(
            "  " * depth
            + f'<li><a href="#{html.escape(cat_id, quote=True)}">'
            + html.escape(cat_title)
            + "</a></li>"
        )
        for child in cat:
            if child.tag == "category":
                toc.append("  " * depth + "<ul>")
                walk_category(child, depth + 1)
                toc.append("  " * depth + "</ul>")
            elif child.tag == "object":
                walk_object(child)

    def walk_object(el):
        kind = el.get("kind", "")
        counters[kind] = counters.get(kind, 0) + 1
        label = th.kind_labels.get(kind, kind)
        number = counters[kind]
        oid = el.get("id", "")
        name = el.get("name", "")
        body.append(f'<div class="object" id={quoteattr(oid)}>')
        head = f"{label} {number}"
        if name:
            head += f' <span class="name">({html.escape(name)})</span>'
        body.append(f'<div class="head">{head}</div>')
        for child in el:
            if child.tag == "natural":
                body.append(f"<p>{html.escape(child.text or '')}</p>")
            elif child.tag == "formal":
                body.append(
                    f'<pre class="formal">{html.escape(child.text or "")}</pre>'
                )
            elif child.tag == "figure-ref":
                ref = child.get("object", "")
                body.append(
                    f'<div class="figure-ref">{th.figure_label}: '
                    f'<a href="figure-{html.escape(ref, quote=True)}.json">'
                    f"{html.escape(ref)}</a></div>"
                )
            elif child.tag == "proof-ref":
                ref = child.get("object", "")
                body.append(
                    f'<div class="proof-ref">{th.proof_label}: '
                    f'<a href="#{html.escape(ref, quote=True)}">{html.escape(ref)}</a></div>'
                )
        body.append("</div>")

    for child in root:
        if child.tag == "category":
            toc.append("<ul>")
            walk_category(child, 0)
            toc.append("</ul>")

    toc_html = "\n".join(toc)
    body_html = "\n".join(body)
    return f"""<!DOCTYPE html>
<html lang="{th.lang}">
<head>
<meta charset="utf-8"/>
<title>{html.escape(title)}</title>
<style>
{_CSS}</style>
</head>
<body>
<h1>{html.escape(title)}</h1>
<nav class="contents"><strong>{th.contents_label}</strong>
{toc_html}
</nav>
{body_html}
</body>
</html>
"""
