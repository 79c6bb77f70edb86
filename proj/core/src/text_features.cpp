#include "grace/text_features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "grace/errors.hpp"
#include "grace/numeric.hpp"

namespace grace {

namespace {

std::string join_trigram(const std::vector<std::string>& tokens, std::size_t start) {
    return tokens[start] + " " + tokens[start + 1] + " " + tokens[start + 2];
}

// Distinct trigrams of one note; notes shorter than 3 tokens have none.
std::set<std::string> note_trigram_set(const TokenizedNote& note) {
    std::set<std::string> out;
    if (note.tokens.size() < 3) return out;
    for (std::size_t i = 0; i + 2 < note.tokens.size(); ++i) {
        out.insert(join_trigram(note.tokens, i));
    }
    return out;
}

double xlogx_sum(double count, double prob) {
    // 0 * ln(0) := 0 and also guards p = 0 with zero count.
    if (count == 0.0) return 0.0;
    return count * std::log(prob);
}

}  // namespace

TrigramStats count_trigrams(std::span<const TokenizedNote> notes, std::span<const int> labels) {
    if (notes.size() != labels.size()) throw InputError("notes/labels length mismatch");
    TrigramStats stats;
    for (std::size_t i = 0; i < notes.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) {
            throw InputError("trigram counting expects binary labels 0/1");
        }
        const bool class_a = labels[i] == 0;
        (class_a ? stats.notes_class_a : stats.notes_class_b) += 1;
        for (const std::string& trigram : note_trigram_set(notes[i])) {
            auto& cell = stats.cells[trigram];
            (class_a ? cell.n11 : cell.n21) += 1;
        }
    }
    if (stats.notes_class_a == 0 || stats.notes_class_b == 0) {
        throw InputError("trigram selection needs at least one note in each class");
    }
    for (auto& [trigram, cell] : stats.cells) {
        cell.n12 = stats.notes_class_a - cell.n11;
        cell.n22 = stats.notes_class_b - cell.n21;
    }
    return stats;
}

double llr_statistic(std::uint64_t n11, std::uint64_t n12, std::uint64_t n21, std::uint64_t n22) {
    const double a = static_cast<double>(n11), b = static_cast<double>(n12);
    const double c = static_cast<double>(n21), d = static_cast<double>(n22);
    const double row1 = a + b, row2 = c + d;
    if (row1 == 0.0 || row2 == 0.0) {
        throw InputError("llr statistic needs positive row sums");
    }
    const double n = row1 + row2;
    const double p_present = (a + c) / n;
    const double p_absent = (b + d) / n;
    const double ll_null = xlogx_sum(a, p_present) + xlogx_sum(b, p_absent) +
                           xlogx_sum(c, p_present) + xlogx_sum(d, p_absent);
    const double ll_alt = xlogx_sum(a, a / row1) + xlogx_sum(b, b / row1) +
                          xlogx_sum(c, c / row2) + xlogx_sum(d, d / row2);
    // ll_alt >= ll_null by construction; clamp away a negative epsilon.
    return std::max(0.0, 2.0 * (ll_alt - ll_null));
}

SelectedTrigrams select_trigrams(const TrigramStats& stats, double p_threshold) {
    if (!(p_threshold > 0.0 && p_threshold < 1.0)) {
        throw ConfigError("p threshold must lie in (0, 1)");
    }
    SelectedTrigrams out;
    out.statistic_threshold = chi2_quantile_1df(1.0 - p_threshold);
    for (const auto& [trigram, cell] : stats.cells) {
        const double statistic = llr_statistic(cell.n11, cell.n12, cell.n21, cell.n22);
        if (statistic <= out.statistic_threshold) continue;
        const double rate_a =
            static_cast<double>(cell.n11) / static_cast<double>(cell.n11 + cell.n12);
        const double rate_b =
            static_cast<double>(cell.n21) / static_cast<double>(cell.n21 + cell.n22);
        out.entries.push_back(
            {trigram, rate_a > rate_b ? ClassTag::A : ClassTag::B, statistic});
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const auto& x, const auto& y) {
        if (x.statistic != y.statistic) return x.statistic > y.statistic;
        return x.trigram < y.trigram;
    });
    return out;
}

std::vector<double> lexical_vector(const TokenizedNote& note, const SelectedTrigrams& selected) {
    std::vector<double> out(selected.size(), 0.0);
    if (note.tokens.size() < 3 || selected.size() == 0) return out;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < selected.entries.size(); ++i) {
        index.emplace(selected.entries[i].trigram, i);
    }
    for (std::size_t i = 0; i + 2 < note.tokens.size(); ++i) {
        const auto it = index.find(join_trigram(note.tokens, i));
        if (it != index.end()) out[it->second] += 1.0;
    }
    return out;
}

std::vector<double> emotive_vector(const TokenizedNote& note, const EmotiveLexicon& lexicon) {
    if (note.tokens.empty()) {
        throw InputError("emotive features of an empty note (node " +
                         std::to_string(note.node_id) + ") are undefined");
    }
    std::vector<double> out(lexicon.num_categories(), 0.0);
    const double total = static_cast<double>(note.tokens.size());
    for (std::size_t c = 0; c < lexicon.num_categories(); ++c) {
        const auto& words = lexicon.words[c];
        std::size_t hits = 0;
        for (const std::string& token : note.tokens) {
            if (std::binary_search(words.begin(), words.end(), token)) ++hits;
        }
        out[c] = static_cast<double>(hits) / total;
    }
    return out;
}

FeatureVector assemble_features(std::span<const double> base, std::span<const double> lex,
                                std::span<const double> emo, std::span<const double> reason) {
    FeatureVector out;
    out.layout = BlockLayout{base.size(), lex.size(), emo.size(), reason.size()};
    out.values.reserve(out.layout.total());
    out.values.insert(out.values.end(), base.begin(), base.end());
    out.values.insert(out.values.end(), lex.begin(), lex.end());
    out.values.insert(out.values.end(), emo.begin(), emo.end());
    out.values.insert(out.values.end(), reason.begin(), reason.end());
    for (double v : out.values) {
        if (!std::isfinite(v)) throw InputError("assembled feature vector has non-finite entries");
    }
    return out;
}

}  // namespace grace
