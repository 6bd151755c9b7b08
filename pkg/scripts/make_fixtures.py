#!/usr/bin/env python3
"""Write the bundled fixture corpus, KB, and hand-derived extraction gold.

Every pm_span, slot sentence, and relevance flag here was derived by hand
from the extraction and linking rules; nothing in this script calls the
pipeline, so the fixtures stay valid oracles for it.
"""

import json
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# (text, ner, head, deprel); heads are 1-based, 0 = root.
DOCS = [
    ("d01", "nyt", [
        [("Protest", "O", 2, "compound"), ("organizers", "O", 3, "nsubj"),
         ("announced", "O", 0, "root"), ("a", "O", 6, "det"), ("new", "O", 6, "amod"),
         ("rally", "O", 3, "obj"), (".", "O", 3, "punct")],
        [("Noam", "PERSON", 2, "compound"), ("Chomsky", "PERSON", 14, "nsubj"),
         (",", "O", 2, "punct"), ("the", "O", 9, "det"),
         ("Massachusetts", "O", 6, "compound"), ("Institute", "O", 9, "compound"),
         ("of", "O", 8, "case"), ("Technology", "O", 6, "nmod"),
         ("professor", "O", 2, "appos"), ("and", "O", 12, "cc"),
         ("antiwar", "O", 12, "amod"), ("activist", "O", 9, "conj"),
         (",", "O", 9, "punct"), ("wrote", "O", 0, "root"), ("about", "O", 16, "case"),
         ("it", "O", 14, "obl"), (".", "O", 14, "punct")],
    ]),
    ("d02", "nyt", [
        [("The", "O", 3, "det"), ("budget", "O", 3, "compound"), ("debate", "O", 4, "nsubj"),
         ("continued", "O", 0, "root"), ("in", "O", 6, "case"), ("London", "LOC", 4, "obl"),
         (".", "O", 4, "punct")],
        [("Kenneth", "PERSON", 2, "compound"), ("Clarke", "PERSON", 11, "nsubj"),
         (",", "O", 2, "punct"), ("a", "O", 6, "det"), ("former", "O", 6, "amod"),
         ("chancellor", "O", 2, "appos"), ("of", "O", 9, "case"), ("the", "O", 9, "det"),
         ("exchequer", "O", 6, "nmod"), (",", "O", 6, "punct"), ("backed", "O", 0, "root"),
         ("the", "O", 13, "det"), ("plan", "O", 11, "obj"), (".", "O", 11, "punct")],
    ]),
    ("d03", "cnn", [
        [("The", "O", 2, "det"), ("expedition", "O", 3, "nsubj"), ("returned", "O", 0, "root"),
         ("yesterday", "O", 3, "advmod"), (".", "O", 3, "punct")],
        [("Robert", "PERSON", 2, "compound"), ("Ballard", "PERSON", 15, "nsubj"),
         (",", "O", 2, "punct"), ("a", "O", 6, "det"), ("famed", "O", 6, "amod"),
         ("explorer", "O", 2, "appos"), (",", "O", 8, "punct"), ("author", "O", 6, "conj"),
         (",", "O", 11, "punct"), ("and", "O", 11, "cc"), ("lecturer", "O", 6, "conj"),
         ("from", "O", 13, "case"), ("Kansas", "LOC", 6, "nmod"), (",", "O", 6, "punct"),
         ("joined", "O", 0, "root"), ("the", "O", 17, "det"), ("crew", "O", 15, "obj"),
         (".", "O", 15, "punct")],
    ]),
    ("d04", "cnn", [
        [("Negotiations", "O", 2, "nsubj"), ("resumed", "O", 0, "root"),
         ("in", "O", 4, "case"), ("Geneva", "LOC", 2, "obl"), (".", "O", 2, "punct")],
        [("John", "PERSON", 2, "compound"), ("Kerry", "PERSON", 8, "nsubj"),
         (",", "O", 2, "punct"), ("the", "O", 6, "det"), ("veteran", "O", 6, "amod"),
         ("diplomat", "O", 2, "appos"), (",", "O", 2, "punct"), ("met", "O", 0, "root"),
         ("Jane", "PERSON", 10, "compound"), ("Doe", "PERSON", 8, "obj"),
         (",", "O", 10, "punct"), ("a", "O", 14, "det"), ("junior", "O", 14, "amod"),
         ("aide", "O", 10, "appos"), (",", "O", 10, "punct"), ("in", "O", 17, "case"),
         ("Geneva", "LOC", 8, "obl"), (".", "O", 8, "punct")],
    ]),
    ("d05", "dm", [
        [("The", "O", 2, "det"), ("summit", "O", 3, "nsubj"), ("opened", "O", 0, "root"),
         ("on", "O", 5, "case"), ("Monday", "DATE", 3, "obl"), (".", "O", 3, "punct")],
        [("Angela", "PERSON", 2, "compound"), ("Merkel", "PERSON", 8, "nsubj"),
         (",", "O", 2, "punct"), ("the", "O", 6, "det"), ("German", "O", 6, "amod"),
         ("chancellor", "O", 2, "appos"), (",", "O", 2, "punct"), ("arrived", "O", 0, "root"),
         ("late", "O", 8, "advmod"), (".", "O", 8, "punct")],
    ]),
    ("d06", "dm", [
        [("The", "O", 2, "det"), ("ceremony", "O", 3, "nsubj"), ("took", "O", 0, "root"),
         ("place", "O", 3, "obj"), ("in", "O", 6, "case"), ("Stockholm", "LOC", 3, "obl"),
         (".", "O", 3, "punct")],
        [("Marie", "PERSON", 2, "compound"), ("Curie", "PERSON", 10, "nsubj"),
         (",", "O", 2, "punct"), ("the", "O", 6, "det"), ("pioneering", "O", 6, "amod"),
         ("physicist", "O", 2, "appos"), ("and", "O", 8, "cc"), ("chemist", "O", 6, "conj"),
         (",", "O", 2, "punct"), ("won", "O", 0, "root"), ("twice", "O", 10, "advmod"),
         (".", "O", 10, "punct")],
    ]),
    ("d07", "nyt", [
        [("The", "O", 2, "det"), ("final", "O", 3, "nsubj"), ("drew", "O", 0, "root"),
         ("a", "O", 6, "det"), ("record", "O", 6, "compound"), ("crowd", "O", 3, "obj"),
         (".", "O", 3, "punct")],
        [("Lionel", "PERSON", 2, "compound"), ("Messi", "PERSON", 8, "nsubj"),
         (",", "O", 2, "punct"), ("the", "O", 6, "det"), ("Barcelona", "ORG", 6, "compound"),
         ("forward", "O", 2, "appos"), (",", "O", 2, "punct"), ("scored", "O", 0, "root"),
         ("three", "O", 10, "nummod"), ("goals", "O", 8, "obj"), (".", "O", 8, "punct")],
    ]),
    ("d08", "cnn", [
        [("Bob", "PERSON", 2, "compound"), ("Dylan", "PERSON", 8, "nsubj"),
         (",", "O", 2, "punct"), ("the", "O", 6, "det"), ("folk", "O", 6, "compound"),
         ("singer", "O", 2, "appos"), (",", "O", 2, "punct"), ("performed", "O", 0, "root"),
         ("last", "O", 10, "amod"), ("night", "O", 8, "advmod"), (".", "O", 8, "punct")],
        [("Dylan", "PERSON", 2, "nsubj"), ("thanked", "O", 0, "root"), ("the", "O", 4, "det"),
         ("audience", "O", 2, "obj"), (".", "O", 2, "punct")],
    ]),
    ("d09", "dm", [
        [("Toni", "PERSON", 2, "compound"), ("Morrison", "PERSON", 8, "nsubj"),
         (",", "O", 2, "punct"), ("the", "O", 6, "det"), ("celebrated", "O", 6, "amod"),
         ("novelist", "O", 2, "appos"), (",", "O", 2, "punct"), ("spoke", "O", 0, "root"),
         ("first", "O", 8, "advmod"), (".", "O", 8, "punct")],
        [("John", "PERSON", 2, "compound"), ("Smith", "PERSON", 8, "nsubj"),
         (",", "O", 2, "punct"), ("the", "O", 6, "det"), ("veteran", "O", 6, "amod"),
         ("goalkeeper", "O", 2, "appos"), (",", "O", 2, "punct"), ("retired", "O", 0, "root"),
         ("on", "O", 10, "case"), ("Friday", "DATE", 8, "obl"), (".", "O", 8, "punct")],
    ]),
    ("d10", "nyt", [
        [("Matthew", "PERSON", 2, "compound"), ("Qvortrup", "PERSON", 8, "nsubj"),
         (",", "O", 2, "punct"), ("a", "O", 6, "det"), ("political", "O", 6, "amod"),
         ("scientist", "O", 2, "appos"), (",", "O", 2, "punct"), ("wrote", "O", 0, "root"),
         ("the", "O", 10, "det"), ("report", "O", 8, "obj"), (".", "O", 8, "punct")],
        [("Wei", "PERSON", 2, "compound"), ("Chen", "PERSON", 10, "nsubj"),
         (",", "O", 2, "punct"), ("a", "O", 5, "det"), ("spokesman", "O", 2, "appos"),
         ("for", "O", 8, "case"), ("the", "O", 8, "det"), ("ministry", "O", 5, "nmod"),
         (",", "O", 2, "punct"), ("declined", "O", 0, "root"), ("comment", "O", 10, "obj"),
         (".", "O", 10, "punct")],
    ]),
]

# Hand-derived extraction gold: one record per expected candidate, in
# corpus order. Spans are 0-based [start, end); pm_head is 0-based.
GOLD_CANDIDATES = [
    {"doc_id": "d01", "source": "nyt", "sent_index": 1, "entity_name": "Noam Chomsky",
     "mention_span": [0, 2], "pm_head": 8, "pm_span": [3, 12],
     "pm_text": "the Massachusetts Institute of Technology professor and antiwar activist",
     "prev_text": "Protest organizers announced a new rally .",
     "sent_with_slot": "Noam Chomsky <pm-slot> wrote about it ."},
    {"doc_id": "d02", "source": "nyt", "sent_index": 1, "entity_name": "Kenneth Clarke",
     "mention_span": [0, 2], "pm_head": 5, "pm_span": [3, 9],
     "pm_text": "a former chancellor of the exchequer",
     "prev_text": "The budget debate continued in London .",
     "sent_with_slot": "Kenneth Clarke <pm-slot> backed the plan ."},
    {"doc_id": "d03", "source": "cnn", "sent_index": 1, "entity_name": "Robert Ballard",
     "mention_span": [0, 2], "pm_head": 5, "pm_span": [3, 13],
     "pm_text": "a famed explorer , author , and lecturer from Kansas",
     "prev_text": "The expedition returned yesterday .",
     "sent_with_slot": "Robert Ballard <pm-slot> joined the crew ."},
    {"doc_id": "d04", "source": "cnn", "sent_index": 1, "entity_name": "John Kerry",
     "mention_span": [0, 2], "pm_head": 5, "pm_span": [3, 6],
     "pm_text": "the veteran diplomat",
     "prev_text": "Negotiations resumed in Geneva .",
     "sent_with_slot": "John Kerry <pm-slot> met Jane Doe , a junior aide , in Geneva ."},
    {"doc_id": "d05", "source": "dm", "sent_index": 1, "entity_name": "Angela Merkel",
     "mention_span": [0, 2], "pm_head": 5, "pm_span": [3, 6],
     "pm_text": "the German chancellor",
     "prev_text": "The summit opened on Monday .",
     "sent_with_slot": "Angela Merkel <pm-slot> arrived late ."},
    {"doc_id": "d06", "source": "dm", "sent_index": 1, "entity_name": "Marie Curie",
     "mention_span": [0, 2], "pm_head": 5, "pm_span": [3, 8],
     "pm_text": "the pioneering physicist and chemist",
     "prev_text": "The ceremony took place in Stockholm .",
     "sent_with_slot": "Marie Curie <pm-slot> won twice ."},
    {"doc_id": "d07", "source": "nyt", "sent_index": 1, "entity_name": "Lionel Messi",
     "mention_span": [0, 2], "pm_head": 5, "pm_span": [3, 6],
     "pm_text": "the Barcelona forward",
     "prev_text": "The final drew a record crowd .",
     "sent_with_slot": "Lionel Messi <pm-slot> scored three goals ."},
    {"doc_id": "d08", "source": "cnn", "sent_index": 0, "entity_name": "Bob Dylan",
     "mention_span": [0, 2], "pm_head": 5, "pm_span": [3, 6],
     "pm_text": "the folk singer",
     "prev_text": "",
     "sent_with_slot": "Bob Dylan <pm-slot> performed last night ."},
    {"doc_id": "d09", "source": "dm", "sent_index": 0, "entity_name": "Toni Morrison",
     "mention_span": [0, 2], "pm_head": 5, "pm_span": [3, 6],
     "pm_text": "the celebrated novelist",
     "prev_text": "",
     "sent_with_slot": "Toni Morrison <pm-slot> spoke first ."},
    {"doc_id": "d09", "source": "dm", "sent_index": 1, "entity_name": "John Smith",
     "mention_span": [0, 2], "pm_head": 5, "pm_span": [3, 6],
     "pm_text": "the veteran goalkeeper",
     "prev_text": "Toni Morrison , the celebrated novelist , spoke first .",
     "sent_with_slot": "John Smith <pm-slot> retired on Friday ."},
    {"doc_id": "d10", "source": "nyt", "sent_index": 0, "entity_name": "Matthew Qvortrup",
     "mention_span": [0, 2], "pm_head": 5, "pm_span": [3, 6],
     "pm_text": "a political scientist",
     "prev_text": "",
     "sent_with_slot": "Matthew Qvortrup <pm-slot> wrote the report ."},
    {"doc_id": "d10", "source": "nyt", "sent_index": 1, "entity_name": "Wei Chen",
     "mention_span": [0, 2], "pm_head": 4, "pm_span": [3, 8],
     "pm_text": "a spokesman for the ministry",
     "prev_text": "Matthew Qvortrup , a political scientist , wrote the report .",
     "sent_with_slot": "Wei Chen <pm-slot> declined comment ."},
]

KB_ENTITIES = [
    {"kb_id": "Q9049", "label": "Noam Chomsky", "aliases": ["Avram Noam Chomsky"],
     "claims": [
         {"key": "employer", "value": "Massachusetts Institute of Technology"},
         {"key": "occupation", "value": "linguist"},
         {"key": "field of work", "value": "antiwar activism"},
         {"key": "occupation", "value": "philosopher"}]},
    {"kb_id": "Q192590", "label": "Kenneth Clarke", "aliases": ["Ken Clarke"],
     "claims": [
         {"key": "position held", "value": "Chancellor of the Exchequer"},
         {"key": "member of political party", "value": "Conservative Party"}]},
    {"kb_id": "Q353663", "label": "Robert Ballard", "aliases": [],
     "claims": [
         {"key": "occupation", "value": "explorer"},
         {"key": "occupation", "value": "author"},
         {"key": "place of birth", "value": "Wichita"}]},
    {"kb_id": "Q22316", "label": "John Kerry", "aliases": ["John Forbes Kerry"],
     "claims": [
         {"key": "occupation", "value": "diplomat"},
         {"key": "position held", "value": "United States Secretary of State"}]},
    {"kb_id": "Q567", "label": "Angela Dorothea Merkel", "aliases": ["Angela Merkel"],
     "claims": [
         {"key": "position held", "value": "Chancellor of Germany"},
         {"key": "country of citizenship", "value": "Germany"}]},
    {"kb_id": "Q7186", "label": "Marie Curie", "aliases": ["Maria Sklodowska-Curie"],
     "claims": [
         {"key": "occupation", "value": "physicist"},
         {"key": "occupation", "value": "chemist"},
         {"key": "award received", "value": "Nobel Prize in Physics"}]},
    {"kb_id": "Q615", "label": "Lionel Messi", "aliases": ["Leo Messi"],
     "claims": [
         {"key": "member of sports team", "value": "FC Barcelona"},
         {"key": "position played", "value": "forward"},
         {"key": "country of citizenship", "value": "Argentina"}]},
    {"kb_id": "Q392", "label": "Bob Dylan", "aliases": ["Robert Zimmerman"],
     "claims": [
         {"key": "occupation", "value": "singer"},
         {"key": "genre", "value": "folk music"},
         {"key": "award received", "value": "Nobel Prize in Literature"}]},
    {"kb_id": "Q72334", "label": "Toni Morrison", "aliases": [],
     "claims": [
         {"key": "occupation", "value": "novelist"},
         {"key": "award received", "value": "Pulitzer Prize for Fiction"}]},
    {"kb_id": "Q105", "label": "John Smith", "aliases": [],
     "claims": [
         {"key": "occupation", "value": "historian"},
         {"key": "employer", "value": "University of Oxford"}]},
    {"kb_id": "Q201", "label": "John Smith", "aliases": [],
     "claims": [
         {"key": "position played", "value": "goalkeeper"},
         {"key": "member of sports team", "value": "Leeds United"}]},
    {"kb_id": "Q777", "label": "Wei Chen", "aliases": [],
     "claims": [
         {"key": "occupation", "value": "engineer"},
         {"key": "place of birth", "value": "Shanghai"}]},
]


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with open(FIXTURES / "corpus.jsonl", "w", encoding="utf-8") as handle:
        for doc_id, source, sentences in DOCS:
            record = {
                "doc_id": doc_id,
                "source": source,
                "sentences": [
                    {"tokens": [
                        {"text": t, "ner": n, "head": h, "deprel": d}
                        for t, n, h, d in sent
                    ]}
                    for sent in sentences
                ],
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    with open(FIXTURES / "gold_candidates.jsonl", "w", encoding="utf-8") as handle:
        for record in GOLD_CANDIDATES:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    with open(FIXTURES / "kb.jsonl", "w", encoding="utf-8") as handle:
        for record in KB_ENTITIES:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    n_sents = sum(len(s) for _, _, s in DOCS)
    print(f"wrote {len(DOCS)} documents / {n_sents} sentences, "
          f"{len(GOLD_CANDIDATES)} gold candidates, {len(KB_ENTITIES)} KB entities")


if __name__ == "__main__":
    main()
