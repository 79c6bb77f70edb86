#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "grace/errors.hpp"
#include "grace/numeric.hpp"
#include "grace/rng.hpp"
#include "grace/text_features.hpp"

using namespace grace;

namespace {

TokenizedNote note(NodeId id, std::vector<std::string> tokens) {
    return TokenizedNote{id, std::move(tokens)};
}

// Independent G-test oracle: both log-likelihoods from first principles.
double llr_oracle(double n11, double n12, double n21, double n22) {
    const double n = n11 + n12 + n21 + n22;
    const auto term = [](double count, double p) {
        return count == 0.0 ? 0.0 : count * std::log(p);
    };
    const double p1 = (n11 + n21) / n;
    const double p2 = (n12 + n22) / n;
    const double ll_null = term(n11, p1) + term(n12, p2) + term(n21, p1) + term(n22, p2);
    const double r1 = n11 + n12, r2 = n21 + n22;
    const double ll_alt = term(n11, n11 / r1) + term(n12, n12 / r1) + term(n21, n21 / r2) +
                          term(n22, n22 / r2);
    return 2.0 * (ll_alt - ll_null);
}

// Quantile oracle: adaptive-Simpson CDF of the chi-squared(1) density plus
// bisection.
double chi2_cdf_simpson(double x) {
    if (x <= 0.0) return 0.0;
    const auto pdf = [](double t) {
        // avoid the integrable singularity at 0 by substitution t = u^2:
        // integral of pdf(t) dt = integral 2u * pdf(u^2) du
        return 2.0 * std::exp(-t * t / 2.0) / std::sqrt(2.0 * 3.14159265358979323846);
    };
    // integrate over u in [0, sqrt(x)] with composite Simpson
    const double b = std::sqrt(x);
    const int steps = 20000;
    const double h = b / steps;
    double acc = pdf(0.0) + pdf(b);
    for (int i = 1; i < steps; ++i) acc += pdf(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double chi2_quantile_oracle(double q) {
    double lo = 0.0, hi = 50.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf_simpson(mid) < q) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("count_trigrams note-level presence") {
    // the same trigram in every note of both classes
    const std::vector<TokenizedNote> notes{
        note(0, {"a", "b", "c"}), note(1, {"a", "b", "c", "d"}),
        note(2, {"a", "b", "c"}), note(3, {"x", "a", "b", "c"})};
    const std::vector<int> labels{0, 0, 1, 1};
    const TrigramStats stats = count_trigrams(notes, labels);
    const auto& cell = stats.cells.at("a b c");
    CHECK(cell.n11 == 2);
    CHECK(cell.n12 == 0);
    CHECK(cell.n21 == 2);
    CHECK(cell.n22 == 0);
}

TEST_CASE("count_trigrams class-exclusive trigram") {
    std::vector<TokenizedNote> notes;
    std::vector<int> labels;
    for (NodeId i = 0; i < 3; ++i) {
        notes.push_back(note(i, {"p", "q", "r", "s"}));
        labels.push_back(0);
    }
    for (NodeId i = 3; i < 6; ++i) {
        notes.push_back(note(i, {"u", "v", "w", "x"}));
        labels.push_back(1);
    }
    const TrigramStats stats = count_trigrams(notes, labels);
    const auto& cell = stats.cells.at("p q r");
    CHECK(cell.n11 == 3);
    CHECK(cell.n12 == 0);
    CHECK(cell.n21 == 0);
    CHECK(cell.n22 == 3);
}

TEST_CASE("count_trigrams ignores notes shorter than three tokens") {
    const std::vector<TokenizedNote> notes{note(0, {"a", "b"}), note(1, {"c", "d", "e"})};
    const std::vector<int> labels{0, 1};
    const TrigramStats stats = count_trigrams(notes, labels);
    CHECK(stats.cells.size() == 1);
    CHECK(stats.cells.count("c d e") == 1);
}

TEST_CASE("count_trigrams rejects a single-class corpus") {
    const std::vector<TokenizedNote> notes{note(0, {"a", "b", "c"}), note(1, {"a", "b", "c"})};
    const std::vector<int> labels{0, 0};
    CHECK_THROWS_AS(count_trigrams(notes, labels), InputError);
}

TEST_CASE("llr_statistic hand values and symmetry") {
    CHECK(llr_statistic(5, 5, 5, 5) == doctest::Approx(0.0));
    CHECK(llr_statistic(10, 0, 0, 10) == doctest::Approx(40.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(llr_statistic(10, 0, 0, 10) == doctest::Approx(27.7259).epsilon(1e-4));

    // class swap and presence/absence column swap
    CHECK(llr_statistic(7, 3, 2, 8) == doctest::Approx(llr_statistic(2, 8, 7, 3)).epsilon(1e-12));
    CHECK(llr_statistic(7, 3, 2, 8) == doctest::Approx(llr_statistic(3, 7, 8, 2)).epsilon(1e-12));

    CHECK_THROWS_AS(llr_statistic(0, 0, 3, 4), InputError);
}

TEST_CASE("llr_statistic equals an independent oracle on random tables") {
    Rng rng(101);
    for (int trial = 0; trial < 20000; ++trial) {
        const auto n11 = rng.uniform_u64(50);
        const auto n12 = 1 + rng.uniform_u64(50);
        const auto n21 = rng.uniform_u64(50);
        const auto n22 = 1 + rng.uniform_u64(50);
        const double fast = llr_statistic(n11, n12, n21, n22);
        const double oracle = llr_oracle(static_cast<double>(n11), static_cast<double>(n12),
                                         static_cast<double>(n21), static_cast<double>(n22));
        CHECK(fast >= 0.0);
        CHECK(std::abs(fast - oracle) <= 1e-10);
    }
}

TEST_CASE("chi-squared quantile pins the selection threshold") {
    CHECK(chi2_quantile_1df(0.99) == doctest::Approx(6.6349).epsilon(1e-4));
    CHECK(chi2_quantile_1df(0.99) ==
          doctest::Approx(chi2_quantile_oracle(0.99)).epsilon(1e-8));
    CHECK(chi2_quantile_1df(0.95) ==
          doctest::Approx(chi2_quantile_oracle(0.95)).epsilon(1e-8));
}

TEST_CASE("select_trigrams keeps indicative trigrams and tags the richer class") {
    TrigramStats stats;
    stats.notes_class_a = 10;
    stats.notes_class_b = 10;
    stats.cells["a a a"] = TrigramCells{10, 0, 0, 10};  // statistic 27.73
    stats.cells["b b b"] = TrigramCells{5, 5, 5, 5};    // statistic 0
    stats.cells["c c c"] = TrigramCells{0, 10, 10, 0};  // class-B indicative

    const SelectedTrigrams sel = select_trigrams(stats, 0.01);
    REQUIRE(sel.size() == 2);
    CHECK(sel.entries[0].statistic == doctest::Approx(40.0 * std::log(2.0)));
    // equal statistics tie-break lexicographically
    CHECK(sel.entries[0].trigram == "a a a");
    CHECK(sel.entries[0].indicative_of == ClassTag::A);
    CHECK(sel.entries[1].trigram == "c c c");
    CHECK(sel.entries[1].indicative_of == ClassTag::B);
}

TEST_CASE("select_trigrams may select nothing") {
    TrigramStats stats;
    stats.notes_class_a = 4;
    stats.notes_class_b = 4;
    stats.cells["x y z"] = TrigramCells{2, 2, 2, 2};
    CHECK(select_trigrams(stats, 0.01).size() == 0);
}

TEST_CASE("select_trigrams false-positive rate under the null") {
    // both classes drawn from the same token distribution
    Rng rng(202);
    std::size_t selected = 0, total = 0;
    for (int seed = 0; seed < 3; ++seed) {
        std::vector<TokenizedNote> notes;
        std::vector<int> labels;
        for (int i = 0; i < 400; ++i) {
            std::vector<std::string> tokens;
            for (int t = 0; t < 40; ++t) {
                tokens.push_back(std::string(1, static_cast<char>('a' + rng.uniform_index(5))));
            }
            notes.push_back(note(static_cast<NodeId>(i), std::move(tokens)));
            labels.push_back(i % 2);
        }
        const TrigramStats stats = count_trigrams(notes, labels);
        const SelectedTrigrams sel = select_trigrams(stats, 0.01);
        selected += sel.size();
        total += stats.cells.size();
    }
    CHECK(static_cast<double>(selected) <= 0.05 * static_cast<double>(total));
}

TEST_CASE("lexical_vector counts raw occurrences in selection order") {
    TrigramStats stats;
    stats.notes_class_a = 2;
    stats.notes_class_b = 2;
    stats.cells["a b c"] = TrigramCells{2, 0, 0, 2};
    stats.cells["d e f"] = TrigramCells{0, 2, 2, 0};
    const SelectedTrigrams sel = select_trigrams(stats, 0.01);
    REQUIRE(sel.size() == 2);

    const auto v1 = lexical_vector(note(0, {"z", "z", "z"}), sel);
    CHECK(v1 == std::vector<double>{0.0, 0.0});

    // "a b c" twice via overlapping windows: a b c a b c
    const auto v2 = lexical_vector(note(1, {"a", "b", "c", "a", "b", "c"}), sel);
    CHECK(v2.size() == sel.size());
    CHECK(v2[0] == 2.0);
    CHECK(v2[1] == 0.0);
}

TEST_CASE("emotive_vector normalizes hits by note length") {
    EmotiveLexicon lexicon;
    lexicon.categories = {"calm", "fear"};
    lexicon.words = {{"rest"}, {"afraid", "panic"}};

    const auto zero = emotive_vector(note(0, {"x", "y"}), lexicon);
    CHECK(zero == std::vector<double>{0.0, 0.0});

    std::vector<std::string> tokens{"afraid", "panic", "a", "b", "c", "d", "e", "f", "g", "h"};
    const auto v = emotive_vector(note(1, std::move(tokens)), lexicon);
    CHECK(v.size() == lexicon.num_categories());
    CHECK(v[1] == doctest::Approx(0.2));

    CHECK_THROWS_AS(emotive_vector(note(2, {}), lexicon), InputError);
}

TEST_CASE("assemble_features concatenates blocks and records the layout") {
    const std::vector<double> base(384, 0.25);
    const std::vector<double> lex(723, 1.0);
    const std::vector<double> emo(194, 0.5);
    const std::vector<double> reason(384, -0.75);

    const FeatureVector full = assemble_features(base, lex, emo, reason);
    CHECK(full.values.size() == 1685);
    CHECK(full.layout.total() == 1685);

    const FeatureVector two = assemble_features(base, lex, {}, {});
    CHECK(two.values.size() == 1107);

    const FeatureVector no_text = assemble_features(base, {}, {}, reason);
    CHECK(no_text.values.size() == 768);
}

TEST_CASE("assemble_features block readback is bit-exact") {
    Rng rng(303);
    std::vector<double> base(13), lex(7), emo(5), reason(11);
    for (auto* block : {&base, &lex, &emo, &reason}) {
        for (double& v : *block) v = rng.normal();
    }
    const FeatureVector fv = assemble_features(base, lex, emo, reason);
    const auto& L = fv.layout;
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(fv.values[L.offset_base() + i] == base[i]);
    }
    for (std::size_t i = 0; i < lex.size(); ++i) CHECK(fv.values[L.offset_lex() + i] == lex[i]);
    for (std::size_t i = 0; i < emo.size(); ++i) CHECK(fv.values[L.offset_emo() + i] == emo[i]);
    for (std::size_t i = 0; i < reason.size(); ++i) {
        CHECK(fv.values[L.offset_reason() + i] == reason[i]);
    }
}
