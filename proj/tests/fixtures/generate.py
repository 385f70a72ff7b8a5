"""Regenerates the fixture corpus: Markdown, sidecars and LLM replay transcripts.

Run from this directory: python3 generate.py
"""

import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
PAGE_BREAK = "<!-- PageBreak -->"

PEOPLE = [("Maria Keller", "she", "her"), ("Jonas Brandt", "he", "his"), ("Amélie Durand", "she", "her"),
          ("Tomás Ruiz", "he", "his"), ("Ingrid Solberg", "she", "her"), ("Paul Okafor", "he", "his")]
ORGS = ["the Agency", "the Board", "the Operator", "the Commission", "the Supplier"]
NOUNS = ["inspection", "record", "shipment", "permit", "audit", "contract", "sensor", "invoice", "budget",
         "schedule", "report", "policy", "procedure", "deadline", "request", "warehouse", "component", "review"]
VERBS = ["approves", "reviews", "archives", "updates", "submits", "verifies", "signs", "rejects", "extends",
         "publishes", "schedules", "tracks"]
ADJS = ["annual", "pending", "revised", "technical", "regional", "external", "detailed", "final", "interim",
        "quarterly", "binding", "optional"]


def sentence(rng, mentions):
    """One sentence; appends (entity_offset, pronoun_end_offset) pairs relative to the sentence."""
    kind = rng.random()
    if kind < 0.35 and PEOPLE:
        name, subj, poss = rng.choice(PEOPLE)
        first = f"{name} {rng.choice(VERBS)} the {rng.choice(ADJS)} {rng.choice(NOUNS)}"
        second = f" before {poss} {rng.choice(NOUNS)} is {rng.choice(['closed', 'filed', 'due', 'renewed'])}"
        text = first + second + "."
        p_start = len(first) + len(" before ")
        mentions.append((0, p_start + len(poss), name, poss))
        return text
    if kind < 0.5:
        org = rng.choice(ORGS)
        cap = org[0].upper() + org[1:]
        text = f"{cap} {rng.choice(VERBS)} each {rng.choice(NOUNS)} and it {rng.choice(VERBS)} the {rng.choice(NOUNS)}."
        at = text.index(" it ") + 1
        mentions.append((0, at + 2, cap, "it"))
        return text
    words = [rng.choice(ADJS + NOUNS) for _ in range(rng.randint(6, 16))]
    words[0] = words[0].capitalize()
    return f"The {' '.join(words[1:])} {rng.choice(VERBS)} the {rng.choice(NOUNS)}{rng.choice(['.', '.', '!', '?'])}"


class Builder:
    def __init__(self):
        self.text = ""
        self.blocks = []
        self.sentences = []
        self.pairs = []
        self.pages = []
        self.last_person = None  # (offset, name, subject pronoun)

    def block(self, body, kind, trailer="\n\n"):
        start = len(self.text)
        self.text += body + trailer
        self.blocks.append([start, len(self.text), kind])
        return start

    def paragraph(self, rng, n):
        start = len(self.text)
        body = ""
        for i in range(n):
            if i:
                body += " "
            mentions = []
            base = start + len(body)
            if self.last_person and rng.random() < 0.3:
                at, name, subj = self.last_person
                s = f"{subj.capitalize()} {rng.choice(VERBS)} the {rng.choice(ADJS)} {rng.choice(NOUNS)}."
                self.pairs.append({"entity_start": at, "pronoun_end": base + len(subj),
                                   "entity_text": name, "pronoun_text": subj.capitalize()})
            else:
                s = sentence(rng, mentions)
                for person in PEOPLE:
                    if s.startswith(person[0]):
                        self.last_person = (base, person[0], person[1])
            self.sentences.append([base, base + len(s)])
            for e, p, et, pt in mentions:
                self.pairs.append({"entity_start": base + e, "pronoun_end": base + p,
                                   "entity_text": et, "pronoun_text": pt})
            body += s
        self.block(body, "paragraph")

    def page_break(self):
        self.pages.append(len(self.text))
        self.block(PAGE_BREAK, "header_footer")


def build(seed, sections, with_pages, with_sentences=True, language="en"):
    rng = random.Random(seed)
    b = Builder()
    b.block(f"# Operating Manual {seed}", "title")
    for s in range(sections):
        b.block(f"## Section {s + 1}: {rng.choice(ADJS).capitalize()} {rng.choice(NOUNS)}s", "title")
        for _ in range(rng.randint(2, 5)):
            b.paragraph(rng, rng.randint(2, 7))
        if rng.random() < 0.4:
            items = "\n".join(f"- {rng.choice(ADJS)} {rng.choice(NOUNS)} – item {i + 1}" for i in range(rng.randint(3, 6)))
            b.block(items, "list")
        if rng.random() < 0.3:
            rows = ["| field | value |", "| --- | --- |"]
            rows += [f"| {rng.choice(NOUNS)} | {rng.randint(1, 999)} |" for _ in range(rng.randint(2, 6))]
            b.block("\n".join(rows), "table")
        if with_pages and rng.random() < 0.6 and s + 1 < sections:
            b.page_break()
    b.text = b.text.rstrip("\n") + "\n"
    b.blocks[-1][1] = len(b.text)
    sidecar = {"blocks": b.blocks, "language": language}
    if with_pages:
        sidecar["page_breaks"] = b.pages
    if with_sentences:
        sidecar["sentences"] = b.sentences
    if language == "en":
        sidecar["coref_pairs"] = b.pairs
    return b.text, sidecar


DOCS = {
    "alpha": dict(seed=11, sections=6, with_pages=True),
    "bravo": dict(seed=22, sections=14, with_pages=True),
    "charlie": dict(seed=33, sections=3, with_pages=False),
    "delta": dict(seed=44, sections=9, with_pages=True, language="de"),
    "echo": dict(seed=55, sections=1, with_pages=False, with_sentences=False),
}

REPLAY = {
    "alpha": "Sections start with a level-two heading.\n<regex>^## </regex>\n",
    "bravo": "<regex>\\n\\n(?=## )</regex>",
    "charlie": "I could not find a reliable delimiter for this document.",
    "delta": "<regex>\\s</regex>",
    "echo": "<regex>(?<=\\.) </regex>",
}


def main():
    corpus = HERE / "corpus"
    replay = HERE / "replay"
    corpus.mkdir(exist_ok=True)
    replay.mkdir(exist_ok=True)
    for name, spec in DOCS.items():
        text, sidecar = build(**spec)
        (corpus / f"{name}.md").write_text(text, encoding="utf-8")
        (corpus / f"{name}.json").write_text(json.dumps(sidecar) + "\n", encoding="utf-8")
        (replay / f"{name}.txt").write_text(REPLAY[name], encoding="utf-8")


if __name__ == "__main__":
    main()
