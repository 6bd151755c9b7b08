from hypothesis import given
from hypothesis import strategies as st

from pomo.textutils import (
    content_token_set,
    content_tokens,
    normalize_token,
    normalized_tokens,
    stem,
    stopwords,
)


def test_normalize_token_lowercases_and_strips_edge_punct():
    assert normalize_token("Hello,") == "hello"
    assert normalize_token("(word)") == "word"
    assert normalize_token("6-foot-6-inch") == "6-foot-6-inch"
    assert normalize_token("'s") == "s"
    assert normalize_token("--") == ""
    assert normalize_token(",") == ""


def test_normalized_tokens_drops_empty_results():
    assert normalized_tokens("the cat , sat .") == ["the", "cat", "sat"]
    assert normalized_tokens("") == []


def test_stopword_list_is_fixed_size():
    stops = stopwords()
    assert len(stops) == 179
    for word in ("the", "a", "of", "and", "s"):
        assert word in stops
    assert "forward" not in stops
    assert "chancellor" not in stops


def test_content_tokens_filters_stopwords():
    assert content_tokens("the Bills ' offensive tackle") == [
        "bills",
        "offensive",
        "tackle",
    ]
    assert content_tokens("of the and a") == []


def test_content_token_set_deduplicates():
    assert content_token_set("tackle the tackle") == {"tackle"}


def test_stem_strips_suffixes_with_minimum_stem_length():
    assert stem("singers") == "sing"
    assert stem("walked") == "walk"
    # short words never stem below the minimum stem length
    assert stem("s") == "s"
    assert stem("es") == "es"
    assert stem("sing") == "sing"


def test_stem_idempotent_examples():
    for word in ("cat", "singers", "walkers", "quickly", "activist"):
        once = stem(word)
        assert stem(once) == once


@given(st.text(max_size=20))
def test_normalize_token_never_has_edge_punct(token):
    out = normalize_token(token)
    if out:
        assert out[0].isalnum()
        assert out[-1].isalnum()
        assert out == out.lower()


@given(st.lists(st.text(alphabet="aB,.' ", max_size=8), max_size=8))
def test_content_tokens_subset_of_normalized(parts):
    text = " ".join(parts)
    assert set(content_tokens(text)) <= set(normalized_tokens(text))
    assert content_token_set(text) == set(content_tokens(text))
