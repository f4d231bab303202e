import pytest
from hypothesis import given, settings, strategies as st

from catenae.comp import (
    DistProfile,
    RankedList,
    build_profile,
    compositionality_kl,
    compositionality_rank,
    kl_divergence,
    list_association,
    perturb,
    phrase_occurrences,
    ranked_profile,
)
from catenae.errors import (
    DomainError,
    InsufficientEvidenceError,
    NoOccurrenceError,
    ParameterError,
    UndefinedMetricError,
)
from conftest import doc_from
from oracles import kl_direct, kl_smoothed, kendall_tau_b_ref

NO_STOP = frozenset()


def profile(phrase, dist):
    return DistProfile(phrase=tuple(phrase), dist=dict(dist), support_count=max(1, len(dist)))


def ranked(phrase, entries):
    return RankedList(phrase=tuple(phrase), entries=tuple(entries))


@st.composite
def distributions(draw, terms=tuple("abcdefgh")):
    chosen = draw(st.lists(st.sampled_from(terms), min_size=1, max_size=len(terms), unique=True))
    raw = [draw(st.floats(min_value=0.01, max_value=1.0)) for _ in chosen]
    total = sum(raw)
    return {t: v / total for t, v in zip(chosen, raw)}


class TestBuildProfile:
    def test_contexts_either_side(self):
        corpus = [doc_from("x a b y")]
        p = build_profile(["a", "b"], corpus, window=1, stopwords=NO_STOP)
        assert p.dist == {"x": 0.5, "y": 0.5}
        assert p.support_count == 2

    def test_absent_phrase(self):
        p = build_profile(["q", "r"], [doc_from("x a b y")], window=1, stopwords=NO_STOP)
        assert p.support_count == 0 and p.dist == {}

    def test_repeated_context(self):
        p = build_profile(["a", "b"], [doc_from("x a b x")], window=1, stopwords=NO_STOP)
        assert p.dist == {"x": 1.0}
        assert p.support_count == 2

    def test_phrase_terms_excluded_from_context(self):
        p = build_profile(["a", "b"], [doc_from("b a b a")], window=2, stopwords=NO_STOP)
        assert p.dist == {}
        assert p.support_count == 0

    def test_stopwords_excluded(self):
        p = build_profile(["a", "b"], [doc_from("the a b y")], window=1,
                          stopwords=frozenset({"the"}))
        assert p.dist == {"y": 1.0}

    def test_multiple_occurrences_accumulate(self):
        corpus = [doc_from("x a b y"), doc_from("z a b z")]
        p = build_profile(["a", "b"], corpus, window=1, stopwords=NO_STOP)
        assert p.dist == {"x": 0.25, "y": 0.25, "z": 0.5}
        assert p.support_count == 4

    def test_bad_window(self):
        with pytest.raises(ParameterError):
            build_profile(["a"], [doc_from("a")], window=0)

    def test_occurrence_count(self):
        corpus = [doc_from("a b c a b"), doc_from("a b")]
        assert phrase_occurrences(["a", "b"], corpus) == 3


class TestPerturb:
    def test_pair_with_synonyms(self):
        result = perturb(["red", "tape"], {"red": ("crimson",), "tape": ("ribbon",)})
        assert result == [("crimson", "tape"), ("red", "ribbon")]

    def test_no_synonyms(self):
        assert perturb(["a", "b"], {}) == []

    def test_middle_position(self):
        assert perturb(["a", "b", "c"], {"b": ("x", "y")}) == [("a", "x", "c"), ("a", "y", "c")]

    def test_single_word_phrase(self):
        assert perturb(["red"], {"red": ("crimson",)}) == [("crimson",)]


class TestKLDivergence:
    def test_identity_is_exactly_zero(self):
        p = profile("ab", {"x": 0.5, "y": 0.5})
        q = profile("cd", {"x": 0.5, "y": 0.5})
        assert kl_divergence(p, q) == 0.0

    def test_hand_example_matches_oracle(self):
        # independent summation first: 0.5*log2(2) + 0.5*log2(2/3)
        expected = kl_direct({"a": 0.5, "b": 0.5}, {"a": 0.25, "b": 0.75})
        assert expected == pytest.approx(0.20751875, abs=1e-6)
        p = profile("p", {"a": 0.5, "b": 0.5})
        q = profile("q", {"a": 0.25, "b": 0.75})
        assert kl_divergence(p, q, epsilon=1e-9) == pytest.approx(expected, abs=1e-3)

    def test_asymmetry_witness(self):
        p = profile("p", {"a": 0.5, "b": 0.5})
        q = profile("q", {"a": 0.25, "b": 0.75})
        assert kl_divergence(p, q, 1e-9) != kl_divergence(q, p, 1e-9)

    def test_epsilon_validation(self):
        p = profile("p", {"a": 1.0})
        with pytest.raises(ParameterError):
            kl_divergence(p, p, epsilon=0.0)

    def test_empty_p_rejected(self):
        empty = DistProfile(phrase=("p",), dist={}, support_count=0)
        with pytest.raises(DomainError):
            kl_divergence(empty, profile("q", {"a": 1.0}))

    @given(distributions(), distributions())
    @settings(max_examples=300)
    def test_non_negative(self, d1, d2):
        value = kl_divergence(profile("p", d1), profile("q", d2))
        assert value >= 0.0

    @given(distributions())
    @settings(max_examples=200)
    def test_self_divergence_zero(self, d):
        assert kl_divergence(profile("p", d), profile("q", d)) == 0.0

    @given(distributions(), distributions())
    @settings(max_examples=100)
    def test_matches_smoothed_oracle(self, d1, d2):
        for eps in (1e-3, 1e-6):
            mine = kl_divergence(profile("p", d1), profile("q", d2), eps)
            if d1 == d2:
                # pointwise-equal inputs bypass smoothing entirely
                assert mine == 0.0
            else:
                ref = max(kl_smoothed(d1, d2, eps), 0.0)
                assert mine == pytest.approx(ref, abs=1e-12)

    def test_smoothing_continuity(self):
        # q covers p's support: smoothed value converges to the plain sum
        p_dist = {"a": 0.30, "b": 0.45, "c": 0.25}
        q_dist = {"a": 0.50, "b": 0.20, "c": 0.30}
        exact = kl_direct(p_dist, q_dist)
        p, q = profile("p", p_dist), profile("q", q_dist)
        errors = [abs(kl_divergence(p, q, eps) - exact) for eps in (1e-3, 1e-6, 1e-9)]
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 1e-7


class TestCompositionalityKL:
    corpus = [
        doc_from("rain old mill dust", "d1"),
        doc_from("snow ancient mill fog", "d2"),
    ]

    def test_identity_synonyms_score_zero(self):
        score = compositionality_kl(
            ["old", "mill"], self.corpus, {"old": ("old",), "mill": ("mill",)},
            window=1, stopwords=NO_STOP,
        )
        assert score.score == 0.0

    def test_disjoint_contexts_match_hand_kl(self):
        result = compositionality_kl(
            ["old", "mill"], self.corpus, {"old": ("ancient",)},
            window=1, epsilon=1e-6, stopwords=NO_STOP,
        )
        p = build_profile(["old", "mill"], self.corpus, 1, NO_STOP)
        q = build_profile(["ancient", "mill"], self.corpus, 1, NO_STOP)
        expected = kl_smoothed(dict(p.dist), dict(q.dist), 1e-6)
        assert result.score == pytest.approx(expected, abs=1e-12)
        assert result.per_perturbation == ((("ancient", "mill"), pytest.approx(expected)),)

    def test_unsupported_perturbations_skipped(self):
        synonyms = {"old": ("ancient", "elderly")}  # "elderly mill" never occurs
        result = compositionality_kl(["old", "mill"], self.corpus, synonyms,
                                     window=1, stopwords=NO_STOP)
        assert [p for p, _ in result.per_perturbation] == [("ancient", "mill")]

    def test_absent_phrase_error(self):
        with pytest.raises(NoOccurrenceError):
            compositionality_kl(["missing", "phrase"], self.corpus, {"missing": ("x",)}, 1)

    def test_no_supported_perturbation_error(self):
        with pytest.raises(InsufficientEvidenceError):
            compositionality_kl(["old", "mill"], self.corpus, {}, 1, stopwords=NO_STOP)
        with pytest.raises(InsufficientEvidenceError):
            compositionality_kl(["old", "mill"], self.corpus, {"old": ("nope",)},
                                1, stopwords=NO_STOP)


class TestRankedProfile:
    corpus = [doc_from("x a b x y a b z", "d1")]

    def test_sorted_by_count(self):
        lst = ranked_profile(["a", "b"], self.corpus, window=1, k=1,
                             weighting="tf", stopwords=NO_STOP)
        assert lst.entries == (("x", 2.0),)

    def test_k_larger_than_vocabulary(self):
        lst = ranked_profile(["a", "b"], self.corpus, window=1, k=50,
                             weighting="tf", stopwords=NO_STOP)
        assert lst.entries == (("x", 2.0), ("y", 1.0), ("z", 1.0))

    def test_tie_breaks_lexicographically(self):
        corpus = [doc_from("y a b x", "d1"), doc_from("x a b y", "d2")]
        lst = ranked_profile(["a", "b"], corpus, window=1, k=2,
                             weighting="tf", stopwords=NO_STOP)
        assert lst.terms == ("x", "y")

    def test_tf_idf_demotes_ubiquitous_terms(self):
        corpus = [
            doc_from("x a b q", "d1"),
            doc_from("q a b x", "d2"),
            doc_from("q r s t", "d3"),
            doc_from("q u v w", "d4"),
        ]
        tf = ranked_profile(["a", "b"], corpus, 1, 4, "tf", NO_STOP)
        tfidf = ranked_profile(["a", "b"], corpus, 1, 4, "tf-idf", NO_STOP)
        assert dict(tf.entries)["q"] == dict(tf.entries)["x"]
        assert dict(tfidf.entries)["q"] < dict(tfidf.entries)["x"]

    def test_empty_profile(self):
        lst = ranked_profile(["nope"], self.corpus, window=1, stopwords=NO_STOP)
        assert lst.entries == ()

    def test_bad_k(self):
        with pytest.raises(ParameterError):
            ranked_profile(["a"], self.corpus, window=1, k=0)


class TestListAssociation:
    def test_identical_lists(self):
        l1 = ranked("p", [("a", 3.0), ("b", 2.0), ("c", 1.0)])
        l2 = ranked("q", [("a", 3.0), ("b", 2.0), ("c", 1.0)])
        assert list_association(l1, l2, "spearman") == pytest.approx(1.0)
        assert list_association(l1, l2, "kendall") == pytest.approx(1.0)
        assert list_association(l1, l2, "jaccard") == 1.0
        assert list_association(l1, l2, "overlap") == 1.0

    def test_reversed_rankings(self):
        l1 = ranked("p", [("a", 4.0), ("b", 3.0), ("c", 2.0), ("d", 1.0)])
        l2 = ranked("q", [("d", 4.0), ("c", 3.0), ("b", 2.0), ("a", 1.0)])
        assert list_association(l1, l2, "spearman") == pytest.approx(-1.0)
        assert list_association(l1, l2, "kendall") == pytest.approx(-1.0)

    def test_jaccard_partial_overlap(self):
        l1 = ranked("p", [("a", 3.0), ("b", 2.0), ("c", 1.0)])
        l2 = ranked("q", [("b", 3.0), ("c", 2.0), ("d", 1.0)])
        assert list_association(l1, l2, "jaccard") == 0.5

    def test_symmetry_of_set_metrics(self):
        l1 = ranked("p", [("a", 3.0), ("b", 2.0)])
        l2 = ranked("q", [("b", 9.0), ("c", 5.0), ("d", 1.0)])
        for metric in ("jaccard", "overlap"):
            assert list_association(l1, l2, metric) == list_association(l2, l1, metric)

    def test_both_empty_undefined(self):
        with pytest.raises(UndefinedMetricError):
            list_association(ranked("p", []), ranked("q", []), "jaccard")

    def test_pearson_zero_variance_undefined(self):
        l1 = ranked("p", [("a", 1.0), ("b", 1.0)])
        l2 = ranked("q", [("a", 2.0), ("b", 1.0)])
        with pytest.raises(UndefinedMetricError):
            list_association(l1, l2, "pearson")

    def test_rank_metrics_invariant_under_monotone_transform(self):
        l1 = ranked("p", [("a", 9.0), ("b", 5.0), ("c", 2.0)])
        l2 = ranked("q", [("c", 7.0), ("a", 6.0), ("d", 1.0)])
        squared = ranked("q", [(t, w * w) for t, w in l2.entries])
        for metric in ("spearman", "kendall"):
            assert list_association(l1, l2, metric) == pytest.approx(
                list_association(l1, squared, metric)
            )

    def test_pearson_invariant_under_positive_affine(self):
        l1 = ranked("p", [("a", 9.0), ("b", 5.0), ("c", 2.0)])
        l2 = ranked("q", [("a", 4.0), ("b", 8.0), ("c", 1.0)])
        scaled = ranked("q", [(t, 3.0 * w + 2.0) for t, w in l2.entries])
        assert list_association(l1, l2, "pearson") == pytest.approx(
            list_association(l1, scaled, "pearson")
        )

    def test_kendall_matches_tau_b_oracle(self):
        l1 = ranked("p", [("a", 5.0), ("b", 4.0), ("c", 3.0)])
        l2 = ranked("q", [("b", 9.0), ("d", 7.0), ("a", 2.0)])
        union = sorted({"a", "b", "c", "d"})
        sentinel = len(union) + 1
        r1 = [ {"a": 1, "b": 2, "c": 3}.get(t, sentinel) for t in union]
        r2 = [ {"b": 1, "d": 2, "a": 3}.get(t, sentinel) for t in union]
        assert list_association(l1, l2, "kendall") == pytest.approx(
            kendall_tau_b_ref(r1, r2), abs=1e-12
        )

    def test_unknown_metric(self):
        l1 = ranked("p", [("a", 1.0)])
        with pytest.raises(ParameterError):
            list_association(l1, l1, "cosine")


class TestCompositionalityRank:
    corpus = [
        doc_from("rain old mill dust rain old mill mist", "d1"),
        doc_from("snow ancient mill fog glow ancient mill haze", "d2"),
    ]

    def test_identity_synonyms_zero(self):
        result = compositionality_rank(
            ["old", "mill"], self.corpus, {"old": ("old",), "mill": ("mill",)},
            window=1, metric="jaccard", stopwords=NO_STOP,
        )
        assert result.score == 0.0

    def test_disjoint_lists_jaccard_distance_one(self):
        result = compositionality_rank(
            ["old", "mill"], self.corpus, {"old": ("ancient",)},
            window=1, metric="jaccard", stopwords=NO_STOP,
        )
        assert result.score == 1.0

    def test_scale_invariance_of_rank_metrics(self):
        # same ranking whether weights are counts or scaled counts
        base = compositionality_rank(
            ["old", "mill"], self.corpus, {"old": ("ancient",)},
            window=2, metric="spearman", stopwords=NO_STOP,
        )
        assert all(0.0 <= v <= 2.0 for _, v in base.per_perturbation)

    def test_absent_phrase(self):
        with pytest.raises(NoOccurrenceError):
            compositionality_rank(["zz", "qq"], self.corpus, {"zz": ("x",)}, 1)
