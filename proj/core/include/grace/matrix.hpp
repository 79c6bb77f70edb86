#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace grace {

// Dense row-major matrix of doubles. All numeric training state lives in
// these; layouts never change after construction.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    bool operator==(const Matrix& o) const {
        return rows == o.rows && cols == o.cols && data == o.data;
    }
};

// Block structure of an assembled node vector: base embedding, selected
// lexical trigrams, emotive categories, reasoning embedding, concatenated in
// that order. A zero dim means the block is absent.
struct BlockLayout {
    std::size_t base_dim = 0;
    std::size_t lex_dim = 0;
    std::size_t emo_dim = 0;
    std::size_t reason_dim = 0;

    std::size_t total() const { return base_dim + lex_dim + emo_dim + reason_dim; }

    std::size_t offset_base() const { return 0; }
    std::size_t offset_lex() const { return base_dim; }
    std::size_t offset_emo() const { return base_dim + lex_dim; }
    std::size_t offset_reason() const { return base_dim + lex_dim + emo_dim; }

    bool operator==(const BlockLayout&) const = default;
};

// Row-per-node feature matrix. The layout is informative; single-block
// matrices (e.g. synthetic features) use base_dim == cols.
struct FeatureMatrix {
    Matrix values;
    BlockLayout layout;

    FeatureMatrix() = default;
    explicit FeatureMatrix(Matrix m) : values(std::move(m)) {
        layout.base_dim = values.cols;
    }
    FeatureMatrix(Matrix m, BlockLayout l) : values(std::move(m)), layout(l) {}

    std::size_t num_nodes() const { return values.rows; }
    std::size_t dim() const { return values.cols; }
    std::span<const double> row(std::size_t r) const { return values.row(r); }
};

}  // namespace grace
