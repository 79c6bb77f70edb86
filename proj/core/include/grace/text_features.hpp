#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "grace/graph.hpp"
#include "grace/matrix.hpp"

namespace grace {

// A preprocessed note: lowercase word tokens keyed by the node they describe.
struct TokenizedNote {
    NodeId node_id = 0;
    std::vector<std::string> tokens;
};

// 2x2 contingency cells per trigram, built from note-level presence:
// n11 = class-A notes containing the trigram, n12 = class-A notes without it,
// n21/n22 the same for class B. Class A is label 0, class B label 1.
struct TrigramCells {
    std::uint64_t n11 = 0;
    std::uint64_t n12 = 0;
    std::uint64_t n21 = 0;
    std::uint64_t n22 = 0;
};

struct TrigramStats {
    // Keys are the three tokens joined by single spaces; the map keeps the
    // iteration order deterministic.
    std::map<std::string, TrigramCells> cells;
    std::uint64_t notes_class_a = 0;
    std::uint64_t notes_class_b = 0;
};

enum class ClassTag { A, B };

struct SelectedTrigram {
    std::string trigram;
    ClassTag indicative_of = ClassTag::A;
    double statistic = 0.0;
};

// Descending statistic, lexicographic tie-break.
struct SelectedTrigrams {
    std::vector<SelectedTrigram> entries;
    double statistic_threshold = 0.0;

    std::size_t size() const { return entries.size(); }
};

// Category name -> word set, category order lexicographic.
struct EmotiveLexicon {
    std::vector<std::string> categories;                 // sorted
    std::vector<std::vector<std::string>> words;         // sorted per category

    std::size_t num_categories() const { return categories.size(); }
};

// Assembled per-node vector with its block layout.
struct FeatureVector {
    std::vector<double> values;
    BlockLayout layout;
};

// Note-level presence counts over a binary-labeled corpus. Labels must be
// 0 or 1 and both classes must occur.
TrigramStats count_trigrams(std::span<const TokenizedNote> notes, std::span<const int> labels);

// G-test statistic: 2 * (ll_alt - ll_null) with 0*ln(0) := 0; chi-squared(1)
// under the independence null. Both row sums must be positive.
double llr_statistic(std::uint64_t n11, std::uint64_t n12, std::uint64_t n21, std::uint64_t n22);

// Keeps trigrams whose statistic exceeds the chi-squared(1) quantile at
// 1 - p_threshold, tagging each by the class with the higher presence rate.
SelectedTrigrams select_trigrams(const TrigramStats& stats, double p_threshold = 0.01);

// Raw occurrence count of each selected trigram in the note, in selection
// order.
std::vector<double> lexical_vector(const TokenizedNote& note, const SelectedTrigrams& selected);

// Per category: tokens belonging to the category divided by total tokens.
std::vector<double> emotive_vector(const TokenizedNote& note, const EmotiveLexicon& lexicon);

// Concatenates base | lex | emo | reason and records the layout. Blocks may
// be empty.
FeatureVector assemble_features(std::span<const double> base, std::span<const double> lex,
                                std::span<const double> emo, std::span<const double> reason);

}  // namespace grace
