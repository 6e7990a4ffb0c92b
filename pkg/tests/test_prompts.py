import pytest
from hypothesis import given
from hypothesis import strategies as st

from rvseg.prompts import OFFLINE_TEMPLATE, ONLINE_TEMPLATE, build_offline_prompt, build_online_prompt


class TestOfflinePrompt:
    def test_template_has_required_wording(self):
        text = OFFLINE_TEMPLATE.template_text
        assert text.startswith("You will act as a keyframe selection agent")
        assert 'The output list begins with the prefix "Output list: "' in text
        assert "Don't use json formatting." in text
        assert "{num_keyframes}" in text and "{query}" in text
        # The worked single-entry example is part of the template.
        assert (
            'Output list: [{object_index: 1, keyframe: 4, object_description: '
            '"the man at the top left corner of the image"}]' in text
        )

    def test_tail_substitution(self):
        prompt = build_offline_prompt(7, "Q")
        assert 'with 7 keyframes. The user query is "Q".' in prompt
        assert prompt.endswith("Follow the instruction and output the index of the best keyframe.")

    def test_no_pluralization(self):
        assert "with 1 keyframes." in build_offline_prompt(1, "x")

    def test_query_with_quotes_embedded_verbatim(self):
        prompt = build_offline_prompt(3, 'say "hi"')
        assert 'The user query is "say "hi"".' in prompt

    def test_query_with_braces_not_retemplated(self):
        prompt = build_offline_prompt(2, "odd {num_keyframes} query")
        assert 'The user query is "odd {num_keyframes} query".' in prompt
        assert "with 2 keyframes." in prompt

    def test_bad_args(self):
        with pytest.raises(ValueError):
            build_offline_prompt(0, "q")
        with pytest.raises(ValueError):
            build_offline_prompt(3, "")

    @given(st.integers(1, 99), st.text(min_size=1, max_size=60).filter(lambda s: s.strip()))
    def test_substituted_values_appear_verbatim(self, count, query):
        prompt = build_offline_prompt(count, query)
        assert f"with {count} keyframes." in prompt
        assert query in prompt


class TestOnlinePrompt:
    def test_template_wording(self):
        text = ONLINE_TEMPLATE.template_text
        assert text.startswith('Consider the query "{query}" for an object tracking task.')
        assert "simple answer with Yes or No" in text
        assert "is <Yes./No.>" in text

    def test_query_substituted(self):
        prompt = build_online_prompt("Who is the parent in the scene?")
        assert 'Consider the query "Who is the parent in the scene?"' in prompt

    def test_whitespace_query_kept_as_is(self):
        assert 'Consider the query "  x  "' in build_online_prompt("  x  ")

    def test_braces_not_retemplated(self):
        assert 'Consider the query "{query}"' in build_online_prompt("{query}")

    def test_empty_query_rejected(self):
        with pytest.raises(ValueError):
            build_online_prompt("")
