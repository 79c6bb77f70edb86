#include "grace/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "grace/errors.hpp"
#include "grace/rng.hpp"

namespace grace {

namespace {

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) throw InputError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

void put_u32_le(std::ostream& out, std::uint32_t v) {
    unsigned char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t get_u32_le(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) throw InputError("truncated binary file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    return v;
}

void put_f32_le(std::ostream& out, float f) {
    put_u32_le(out, std::bit_cast<std::uint32_t>(f));
}

float get_f32_le(std::istream& in) { return std::bit_cast<float>(get_u32_le(in)); }

void put_f64_le(std::ostream& out, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_f64_le(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw InputError("truncated binary file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

// Parses one nonnegative integer, rejecting trailing garbage.
std::size_t parse_index(const std::string& field, const std::string& context) {
    std::size_t pos = 0;
    std::size_t value = 0;
    try {
        value = std::stoull(field, &pos);
    } catch (const std::exception&) {
        throw InputError("expected an integer in " + context + ", got '" + field + "'");
    }
    if (pos != field.size()) {
        throw InputError("trailing characters after integer in " + context + ": '" + field + "'");
    }
    return value;
}

Matrix read_matrix_csv(std::istream& in, const std::string& context) {
    Matrix m;
    std::vector<double> values;
    std::string line;
    std::size_t rows = 0, cols = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::size_t this_cols = 0;
        while (std::getline(ss, field, ',')) {
            try {
                values.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw InputError(context + " line " + std::to_string(line_no) +
                                 ": bad number '" + field + "'");
            }
            ++this_cols;
        }
        if (cols == 0) {
            cols = this_cols;
        } else if (this_cols != cols) {
            throw InputError(context + " line " + std::to_string(line_no) +
                             ": expected " + std::to_string(cols) + " columns");
        }
        ++rows;
    }
    m.rows = rows;
    m.cols = cols;
    m.data = std::move(values);
    return m;
}

}  // namespace

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    auto out = open_out(path, std::ios::binary);
    out << "GRMAT1 " << m.rows << " " << m.cols << "\n";
    for (double v : m.data) put_f32_le(out, static_cast<float>(v));
    if (!out) throw InputError("failed writing " + path.string());
}

Matrix read_matrix(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::binary);
    char magic[7] = {};
    in.read(magic, 7);
    if (in.gcount() == 7 && std::memcmp(magic, "GRMAT1 ", 7) == 0) {
        std::string header;
        std::getline(in, header);
        std::stringstream ss(header);
        std::size_t rows = 0, cols = 0;
        if (!(ss >> rows >> cols)) {
            throw InputError(path.string() + ": malformed matrix header");
        }
        Matrix m(rows, cols);
        for (double& v : m.data) v = static_cast<double>(get_f32_le(in));
        return m;
    }
    // Fall back to CSV.
    in.clear();
    in.seekg(0);
    return read_matrix_csv(in, path.string());
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
    auto out = open_out(path, std::ios::binary);
    out << "# nodes: " << g.num_nodes() << "\n";
    for (const auto& [u, v] : g.edge_list()) out << u << "\t" << v << "\n";
    if (!out) throw InputError("failed writing " + path.string());
}

Graph read_edge_list(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in);
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::size_t num_nodes = 0;
    bool have_count = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string rest = line.substr(1);
            const auto pos = rest.find("nodes:");
            if (pos != std::string::npos) {
                std::stringstream ss(rest.substr(pos + 6));
                std::size_t n = 0;
                if (ss >> n) {
                    num_nodes = n;
                    have_count = true;
                }
            }
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw InputError(path.string() + " line " + std::to_string(line_no) +
                             ": expected 'u<TAB>v'");
        }
        const std::string context = path.string() + " line " + std::to_string(line_no);
        const std::size_t u = parse_index(line.substr(0, tab), context);
        const std::size_t v = parse_index(line.substr(tab + 1), context);
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
        if (!have_count) num_nodes = std::max({num_nodes, u + 1, v + 1});
    }
    return Graph::build(edges, num_nodes);
}

void write_class_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
    auto out = open_out(path, std::ios::binary);
    for (std::size_t i = 0; i < labels.size(); ++i) out << i << "," << labels[i] << "\n";
    if (!out) throw InputError("failed writing " + path.string());
}

std::vector<int> read_class_labels(const std::filesystem::path& path, std::size_t num_nodes) {
    auto in = open_in(path, std::ios::in);
    std::vector<int> labels(num_nodes, -1);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        const std::string context = path.string() + " line " + std::to_string(line_no);
        if (comma == std::string::npos) throw InputError(context + ": expected 'node_id,label'");
        const std::size_t node = parse_index(line.substr(0, comma), context);
        if (node >= num_nodes) {
            throw InputError(context + ": node id " + std::to_string(node) + " out of range");
        }
        labels[node] = static_cast<int>(parse_index(line.substr(comma + 1), context));
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) {
            throw InputError(path.string() + ": node " + std::to_string(i) + " has no label");
        }
    }
    return labels;
}

void write_multilabel(const std::filesystem::path& path, const Matrix& labels,
                      const std::vector<std::string>& names) {
    if (labels.cols != names.size()) throw InputError("label matrix/name count mismatch");
    auto out = open_out(path, std::ios::binary);
    for (std::size_t i = 0; i < labels.rows; ++i) {
        out << i << ",";
        bool first = true;
        for (std::size_t l = 0; l < labels.cols; ++l) {
            if (labels(i, l) != 0.0) {
                if (!first) out << ";";
                out << names[l];
                first = false;
            }
        }
        out << "\n";
    }
    if (!out) throw InputError("failed writing " + path.string());
}

Matrix read_multilabel(const std::filesystem::path& path, std::size_t num_nodes,
                       const std::vector<std::string>& names) {
    auto in = open_in(path, std::ios::in);
    Matrix labels(num_nodes, names.size());
    std::vector<bool> seen(num_nodes, false);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        const std::string context = path.string() + " line " + std::to_string(line_no);
        if (comma == std::string::npos) throw InputError(context + ": expected 'node_id,labels'");
        const std::size_t node = parse_index(line.substr(0, comma), context);
        if (node >= num_nodes) {
            throw InputError(context + ": node id " + std::to_string(node) + " out of range");
        }
        seen[node] = true;
        std::stringstream ss(line.substr(comma + 1));
        std::string name;
        while (std::getline(ss, name, ';')) {
            if (name.empty()) continue;
            const auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end()) throw InputError(context + ": unknown label '" + name + "'");
            labels(node, static_cast<std::size_t>(it - names.begin())) = 1.0;
        }
    }
    for (std::size_t i = 0; i < num_nodes; ++i) {
        if (!seen[i]) {
            throw InputError(path.string() + ": node " + std::to_string(i) + " has no label row");
        }
    }
    return labels;
}

void write_label_names(const std::filesystem::path& path, const std::vector<std::string>& names) {
    nlohmann::json doc = names;
    auto out = open_out(path, std::ios::binary);
    out << doc.dump(2) << "\n";
}

std::vector<std::string> read_label_names(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw InputError(path.string() + ": expected a JSON array of names");
    std::vector<std::string> names;
    for (const auto& item : doc) {
        if (!item.is_string()) throw InputError(path.string() + ": label names must be strings");
        names.push_back(item.get<std::string>());
    }
    return names;
}

void write_split(const std::filesystem::path& path, const std::vector<SplitSide>& split) {
    auto out = open_out(path, std::ios::binary);
    for (std::size_t i = 0; i < split.size(); ++i) {
        out << i << "," << (split[i] == SplitSide::Train ? "train" : "test") << "\n";
    }
    if (!out) throw InputError("failed writing " + path.string());
}

std::vector<SplitSide> read_split(const std::filesystem::path& path, std::size_t num_nodes) {
    auto in = open_in(path, std::ios::in);
    std::vector<SplitSide> split(num_nodes, SplitSide::Train);
    std::vector<bool> seen(num_nodes, false);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        const std::string context = path.string() + " line " + std::to_string(line_no);
        if (comma == std::string::npos) {
            throw InputError(context + ": expected 'node_id,train|test'");
        }
        const std::size_t node = parse_index(line.substr(0, comma), context);
        if (node >= num_nodes) {
            throw InputError(context + ": node id " + std::to_string(node) + " out of range");
        }
        const std::string side = line.substr(comma + 1);
        if (side == "train") {
            split[node] = SplitSide::Train;
        } else if (side == "test") {
            split[node] = SplitSide::Test;
        } else {
            throw InputError(context + ": split side must be 'train' or 'test'");
        }
        seen[node] = true;
    }
    for (std::size_t i = 0; i < num_nodes; ++i) {
        if (!seen[i]) {
            throw InputError(path.string() + ": node " + std::to_string(i) + " has no split row");
        }
    }
    return split;
}

std::vector<TokenizedNote> read_token_corpus(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in);
    std::vector<TokenizedNote> notes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        const std::string context = path.string() + " line " + std::to_string(line_no);
        if (tab == std::string::npos) {
            throw InputError(context + ": expected 'node_id<TAB>tokens'");
        }
        TokenizedNote note;
        note.node_id = static_cast<NodeId>(parse_index(line.substr(0, tab), context));
        std::stringstream ss(line.substr(tab + 1));
        std::string token;
        while (ss >> token) note.tokens.push_back(token);
        notes.push_back(std::move(note));
    }
    return notes;
}

void write_token_corpus(const std::filesystem::path& path,
                        const std::vector<TokenizedNote>& notes) {
    auto out = open_out(path, std::ios::binary);
    for (const auto& note : notes) {
        out << note.node_id << "\t";
        for (std::size_t t = 0; t < note.tokens.size(); ++t) {
            if (t > 0) out << " ";
            out << note.tokens[t];
        }
        out << "\n";
    }
    if (!out) throw InputError("failed writing " + path.string());
}

EmotiveLexicon read_lexicon(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw InputError(path.string() + ": expected a JSON object of category -> words");
    }
    EmotiveLexicon lexicon;
    for (const auto& [category, words] : doc.items()) {
        if (!words.is_array()) {
            throw InputError(path.string() + ": category '" + category + "' must map to an array");
        }
        lexicon.categories.push_back(category);
    }
    std::sort(lexicon.categories.begin(), lexicon.categories.end());
    lexicon.words.resize(lexicon.categories.size());
    for (std::size_t c = 0; c < lexicon.categories.size(); ++c) {
        for (const auto& w : doc.at(lexicon.categories[c])) {
            if (!w.is_string()) {
                throw InputError(path.string() + ": words must be strings in '" +
                                 lexicon.categories[c] + "'");
            }
            lexicon.words[c].push_back(w.get<std::string>());
        }
        if (lexicon.words[c].empty()) {
            throw InputError(path.string() + ": category '" + lexicon.categories[c] +
                             "' has no words");
        }
        std::sort(lexicon.words[c].begin(), lexicon.words[c].end());
    }
    return lexicon;
}

void write_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
    auto out = open_out(path, std::ios::binary);
    out.write("GRMODEL1", 8);
    out.put(params.kind == LayerKind::MeanAggregation ? 0 : 1);
    out.put(params.mode == TaskMode::BinarySoftmax ? 0 : 1);
    put_u32_le(out, static_cast<std::uint32_t>(params.dims.input));
    put_u32_le(out, static_cast<std::uint32_t>(params.dims.hidden));
    put_u32_le(out, static_cast<std::uint32_t>(params.dims.outputs));
    for (const auto block : param_blocks(params)) {
        for (double v : block) put_f64_le(out, v);
    }
    if (!out) throw InputError("failed writing " + path.string());
}

ModelParams read_checkpoint(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::binary);
    char magic[8] = {};
    in.read(magic, 8);
    if (in.gcount() != 8 || std::memcmp(magic, "GRMODEL1", 8) != 0) {
        throw InputError(path.string() + ": not a model checkpoint (bad magic)");
    }
    const int kind_tag = in.get();
    const int mode_tag = in.get();
    if (kind_tag < 0 || kind_tag > 1 || mode_tag < 0 || mode_tag > 1) {
        throw InputError(path.string() + ": unknown layer-kind or task tag");
    }
    ModelDims dims;
    dims.input = get_u32_le(in);
    dims.hidden = get_u32_le(in);
    dims.outputs = get_u32_le(in);
    const LayerKind kind = kind_tag == 0 ? LayerKind::MeanAggregation
                                         : LayerKind::NormalizedAdjacency;
    const TaskMode mode = mode_tag == 0 ? TaskMode::BinarySoftmax : TaskMode::MultilabelSigmoid;
    // Shape via init, then overwrite every block from the file.
    ModelParams params = init_params(dims, kind, mode, 0);
    for (auto block : param_blocks(params)) {
        for (double& v : block) v = get_f64_le(in);
    }
    in.peek();
    if (!in.eof()) throw InputError(path.string() + ": trailing bytes after parameter blocks");
    return params;
}

std::string file_hash_hex(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::binary);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buffer[65536];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        const auto got = static_cast<std::size_t>(in.gcount());
        for (std::size_t i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buffer[i]);
            h *= 0x100000001b3ull;
        }
        if (in.eof()) break;
    }
    static const char* digits = "0123456789abcdef";
    std::string hex(16, '0');
    for (int i = 15; i >= 0; --i) {
        hex[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return hex;
}

}  // namespace grace
