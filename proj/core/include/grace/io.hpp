#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "grace/gnn.hpp"
#include "grace/graph.hpp"
#include "grace/matrix.hpp"
#include "grace/text_features.hpp"

namespace grace {

// Dense matrix file: ASCII header "GRMAT1 <rows> <cols>\n" followed by
// row-major little-endian IEEE float32. read_matrix also accepts CSV input,
// auto-detected by the missing magic.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

// Edge list: "u<TAB>v" per line, 0-based decimal ids, '#' comments ignored.
// Files written here carry a "# nodes: N" comment so isolated trailing nodes
// survive the round trip; on read the comment wins, otherwise max id + 1.
void write_edge_list(const std::filesystem::path& path, const Graph& g);
Graph read_edge_list(const std::filesystem::path& path);

// Labels: CSV "node_id,label" with integer class labels.
void write_class_labels(const std::filesystem::path& path, const std::vector<int>& labels);
std::vector<int> read_class_labels(const std::filesystem::path& path, std::size_t num_nodes);

// Multilabel labels: CSV "node_id,name;name;..." (empty second field means no
// labels) against a fixed label-name order.
void write_multilabel(const std::filesystem::path& path, const Matrix& labels,
                      const std::vector<std::string>& names);
Matrix read_multilabel(const std::filesystem::path& path, std::size_t num_nodes,
                       const std::vector<std::string>& names);

// Label-name order file: JSON array of strings.
void write_label_names(const std::filesystem::path& path, const std::vector<std::string>& names);
std::vector<std::string> read_label_names(const std::filesystem::path& path);

// Split file: CSV "node_id,train|test".
enum class SplitSide : std::uint8_t { Train = 0, Test = 1 };
void write_split(const std::filesystem::path& path, const std::vector<SplitSide>& split);
std::vector<SplitSide> read_split(const std::filesystem::path& path, std::size_t num_nodes);

// Token corpus: "node_id<TAB>token token token ..." per line.
std::vector<TokenizedNote> read_token_corpus(const std::filesystem::path& path);
void write_token_corpus(const std::filesystem::path& path,
                        const std::vector<TokenizedNote>& notes);

// Lexicon: JSON object mapping category name to an array of words; category
// order is lexicographic.
EmotiveLexicon read_lexicon(const std::filesystem::path& path);

// Model checkpoint: magic "GRMODEL1", layer-kind tag, dims, task-mode tag,
// then parameter blocks as little-endian float64 in declaration order.
void write_checkpoint(const std::filesystem::path& path, const ModelParams& params);
ModelParams read_checkpoint(const std::filesystem::path& path);

// FNV-1a 64-bit over the file bytes, as 16 lowercase hex digits.
std::string file_hash_hex(const std::filesystem::path& path);

}  // namespace grace
