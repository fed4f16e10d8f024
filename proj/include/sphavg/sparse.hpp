#pragma once

// Minimal CSR matrix with row-parallel matvec.  Row sums are accumulated
// sequentially in entry order, so results are bit-identical for any thread
// count.

#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "sphavg/errors.hpp"

namespace sphavg {

struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double value;
};

class CsrMatrix {
public:
    CsrMatrix() = default;

    // Entries must be unique per (row, col).
    static CsrMatrix from_triplets(std::uint32_t rows, std::uint32_t cols,
                                   std::span<const Triplet> entries) {
        CsrMatrix m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.row_ptr_.assign(rows + 1, 0);
        for (const auto& t : entries) ++m.row_ptr_[t.row + 1];
        for (std::uint32_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
        m.col_.resize(entries.size());
        m.val_.resize(entries.size());
        std::vector<std::uint64_t> cursor(m.row_ptr_.begin(), m.row_ptr_.end() - 1);
        for (const auto& t : entries) {
            auto at = cursor[t.row]++;
            m.col_[at] = t.col;
            m.val_[at] = t.value;
        }
        // columns sorted within each row for a canonical layout
        for (std::uint32_t r = 0; r < rows; ++r)
            sort_row(m, r);
        return m;
    }

    std::uint32_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }
    std::size_t nonzeros() const { return val_.size(); }

    double min_value() const {
        double m = 0.0;
        for (double v : val_)
            if (v < m) m = v;
        return m;
    }

    void matvec(std::span<const double> x, std::span<double> y, int threads = 1) const {
        if (x.size() != cols_ || y.size() != rows_)
            throw input_error("matvec dimension mismatch");
        auto run = [&](std::uint32_t r0, std::uint32_t r1) {
            for (std::uint32_t r = r0; r < r1; ++r) {
                double acc = 0.0;
                for (auto i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i)
                    acc += val_[i] * x[col_[i]];
                y[r] = acc;
            }
        };
        if (threads <= 1 || rows_ < 4096) {
            run(0, rows_);
            return;
        }
        std::vector<std::thread> pool;
        std::uint32_t chunk = (rows_ + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            std::uint32_t r0 = static_cast<std::uint32_t>(t) * chunk;
            std::uint32_t r1 = std::min(rows_, r0 + chunk);
            if (r0 >= r1) break;
            pool.emplace_back(run, r0, r1);
        }
        for (auto& th : pool) th.join();
    }

    CsrMatrix transposed() const {
        CsrMatrix m;
        m.rows_ = cols_;
        m.cols_ = rows_;
        m.row_ptr_.assign(cols_ + 1, 0);
        for (auto c : col_) ++m.row_ptr_[c + 1];
        for (std::uint32_t r = 0; r < cols_; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
        m.col_.resize(col_.size());
        m.val_.resize(val_.size());
        std::vector<std::uint64_t> cursor(m.row_ptr_.begin(), m.row_ptr_.end() - 1);
        for (std::uint32_t r = 0; r < rows_; ++r) {
            for (auto i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i) {
                auto at = cursor[col_[i]]++;
                m.col_[at] = r;
                m.val_[at] = val_[i];
            }
        }
        return m;
    }

    // Column sums of |entries|.
    std::vector<double> column_abs_sums() const {
        std::vector<double> sums(cols_, 0.0);
        for (std::size_t i = 0; i < val_.size(); ++i)
            sums[col_[i]] += std::abs(val_[i]);
        return sums;
    }

    std::span<const std::uint64_t> row_ptr() const { return row_ptr_; }
    std::span<const std::uint32_t> col_indices() const { return col_; }
    std::span<const double> values() const { return val_; }

    friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

private:
    // In-place insertion sort; rows are short and usually already ordered.
    static void sort_row(CsrMatrix& m, std::uint32_t r) {
        auto b = m.row_ptr_[r], e = m.row_ptr_[r + 1];
        for (auto i = b + 1; i < e; ++i) {
            auto c = m.col_[i];
            auto v = m.val_[i];
            auto j = i;
            while (j > b && m.col_[j - 1] > c) {
                m.col_[j] = m.col_[j - 1];
                m.val_[j] = m.val_[j - 1];
                --j;
            }
            m.col_[j] = c;
            m.val_[j] = v;
        }
    }

    std::uint32_t rows_ = 0, cols_ = 0;
    std::vector<std::uint64_t> row_ptr_;
    std::vector<std::uint32_t> col_;
    std::vector<double> val_;
};

} // namespace sphavg
