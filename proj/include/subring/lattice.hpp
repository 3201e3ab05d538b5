#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "subring/bigint.hpp"
#include "subring/core.hpp"

namespace subring::lattice {

using Vec = std::vector<BigInt>;

/// Componentwise product of two integer vectors. This is the multiplication
/// whose closure inside a column span defines a subring.
inline Vec hadamard(const Vec& u, const Vec& v) {
    if (u.size() != v.size())
        throw std::invalid_argument("hadamard: length mismatch");
    Vec out(u.size());
    for (size_t i = 0; i < u.size(); ++i) out[i] = u[i] * v[i];
    return out;
}

/// Upper-triangular integer matrix with positive diagonal and each
/// off-diagonal entry reduced modulo its row's diagonal entry. Columns
/// generate a finite-index sublattice of Z^n with index = det = product of
/// the diagonal.
class HnfMatrix {
public:
    explicit HnfMatrix(std::vector<std::vector<BigInt>> rows) {
        n_ = static_cast<unsigned>(rows.size());
        if (n_ == 0) throw std::invalid_argument("HnfMatrix: empty");
        entries_.reserve(static_cast<size_t>(n_) * n_);
        for (unsigned i = 0; i < n_; ++i) {
            if (rows[i].size() != n_) throw std::invalid_argument("HnfMatrix: ragged rows");
            for (unsigned j = 0; j < n_; ++j) entries_.push_back(std::move(rows[i][j]));
        }
        validate();
    }

    unsigned n() const { return n_; }
    const BigInt& at(unsigned i, unsigned j) const { return entries_[i * n_ + j]; }

    Vec column(unsigned j) const {
        Vec out(n_);
        for (unsigned i = 0; i < n_; ++i) out[i] = at(i, j);
        return out;
    }

    BigInt det() const {
        BigInt d(1);
        for (unsigned i = 0; i < n_; ++i) d *= at(i, i);
        return d;
    }

    bool last_column_all_ones() const {
        for (unsigned i = 0; i < n_; ++i)
            if (at(i, n_ - 1) != BigInt(1)) return false;
        return true;
    }

    static HnfMatrix identity(unsigned n) {
        std::vector<std::vector<BigInt>> rows(n, std::vector<BigInt>(n, BigInt(0)));
        for (unsigned i = 0; i < n; ++i) rows[i][i] = BigInt(1);
        return HnfMatrix(std::move(rows));
    }

private:
    unsigned n_ = 0;
    std::vector<BigInt> entries_;  // row major

    void validate() const {
        for (unsigned i = 0; i < n_; ++i) {
            if (at(i, i) < BigInt(1))
                throw std::invalid_argument("HnfMatrix: diagonal must be positive");
            for (unsigned j = 0; j < i; ++j)
                if (!at(i, j).is_zero())
                    throw std::invalid_argument("HnfMatrix: not upper triangular");
            for (unsigned j = i + 1; j < n_; ++j)
                if (at(i, j).is_negative() || at(i, j) >= at(i, i))
                    throw std::invalid_argument(
                        "HnfMatrix: entry (" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + ") not reduced mod diagonal");
        }
    }
};

/// Decides w in Z-span of the columns of A by exact back-substitution:
/// for i = n..1, r <- w_i - sum_{j>i} A_ij x_j; A_ii must divide r exactly,
/// x_i = r / A_ii. No rational arithmetic is involved.
inline bool col_span_contains(const HnfMatrix& a, const Vec& w) {
    const unsigned n = a.n();
    if (w.size() != n) throw std::invalid_argument("col_span_contains: length mismatch");
    Vec x(n);
    for (unsigned i = n; i-- > 0;) {
        BigInt r = w[i];
        for (unsigned j = i + 1; j < n; ++j) r -= a.at(i, j) * x[j];
        BigInt q, rem;
        BigInt::divmod(r, a.at(i, i), q, rem);
        if (!rem.is_zero()) return false;
        x[i] = std::move(q);
    }
    return true;
}

/// Pairs (i, j), 1 <= i <= j <= n, whose Hadamard column product fails the
/// span-membership test. Empty together with a passing all-ones check means
/// the matrix is a subring matrix.
inline std::set<std::pair<unsigned, unsigned>> closure_violations(const HnfMatrix& a) {
    const unsigned n = a.n();
    std::set<std::pair<unsigned, unsigned>> bad;
    std::vector<Vec> cols;
    cols.reserve(n);
    for (unsigned j = 0; j < n; ++j) cols.push_back(a.column(j));
    for (unsigned i = 1; i <= n; ++i)
        for (unsigned j = i; j <= n; ++j)
            if (!col_span_contains(a, hadamard(cols[i - 1], cols[j - 1])))
                bad.insert({i, j});
    return bad;
}

/// True iff the all-ones vector is in the column span and every pairwise
/// Hadamard product of columns is as well. When the last column is all ones,
/// products against it equal the other factor, so those pairs are skipped.
inline bool is_subring_matrix(const HnfMatrix& a) {
    const unsigned n = a.n();
    const bool ones_column = a.last_column_all_ones();
    if (!ones_column) {
        Vec ones(n, BigInt(1));
        if (!col_span_contains(a, ones)) return false;
    }
    const unsigned limit = ones_column ? n - 1 : n;
    std::vector<Vec> cols;
    cols.reserve(limit);
    for (unsigned j = 0; j < limit; ++j) cols.push_back(a.column(j));
    for (unsigned i = 0; i < limit; ++i)
        for (unsigned j = i; j < limit; ++j)
            if (!col_span_contains(a, hadamard(cols[i], cols[j]))) return false;
    return true;
}

/// One free off-diagonal position of an irreducible subring matrix. The
/// stored entry is p * value, with value drawn from [0, p^range_exponent).
struct Slot {
    unsigned row;  // 1-based
    unsigned col;  // 1-based, row < col <= n-1
    unsigned range_exponent;
};

/// The shape of an irreducible n x n subring matrix with diagonal
/// (p^{e_1}, ..., p^{e_{n-1}}, 1): slots enumerate the free entries a_ij
/// row-major, slot (i,j) ranging over [0, p^{e_i - 1}). Rows with e_i = 1
/// have zero-width slots (the entry is forced to 0).
class IrreducibleTemplate {
public:
    explicit IrreducibleTemplate(core::Composition alpha) : alpha_(std::move(alpha)) {
        const unsigned n = alpha_.n();
        for (unsigned i = 1; i + 1 <= n - 1; ++i)
            for (unsigned j = i + 1; j <= n - 1; ++j)
                slots_.push_back({i, j, alpha_.parts()[i - 1] - 1});
    }

    const core::Composition& alpha() const { return alpha_; }
    unsigned n() const { return alpha_.n(); }
    unsigned e() const { return alpha_.sum(); }
    const std::vector<Slot>& slots() const { return slots_; }

    /// p^{range_exponent} for one slot; throws if it does not fit a u64.
    uint64_t slot_range(size_t idx, uint64_t p) const {
        const unsigned exp = slots_[idx].range_exponent;
        uint64_t r = 1;
        for (unsigned k = 0; k < exp; ++k) {
            if (r > UINT64_MAX / p) throw std::overflow_error("slot range exceeds u64");
            r *= p;
        }
        return r;
    }

    /// Exact search-space size at p: the product of all slot ranges.
    BigInt search_space(uint64_t p) const {
        BigInt total(1);
        for (const Slot& s : slots_) total *= BigInt::pow(BigInt(p), s.range_exponent);
        return total;
    }

private:
    core::Composition alpha_;
    std::vector<Slot> slots_;
};

/// One concrete choice of the free entries, aligned with template slots.
class EntryAssignment {
public:
    EntryAssignment() = default;
    explicit EntryAssignment(std::vector<uint64_t> values) : values_(std::move(values)) {}

    const std::vector<uint64_t>& values() const { return values_; }

    void validate(const IrreducibleTemplate& tmpl, uint64_t p) const {
        if (values_.size() != tmpl.slots().size())
            throw std::invalid_argument("assignment size does not match template");
        for (size_t k = 0; k < values_.size(); ++k)
            if (values_[k] >= tmpl.slot_range(k, p))
                throw std::invalid_argument("assignment value out of range at slot " +
                                            std::to_string(k));
    }

private:
    std::vector<uint64_t> values_;
};

/// Materializes the irreducible matrix: diagonal (p^{e_1},...,p^{e_{n-1}},1),
/// entry (i,j) = p * a_ij for i < j <= n-1, last column all ones.
inline HnfMatrix build_irreducible(const IrreducibleTemplate& tmpl,
                                   const EntryAssignment& assignment, uint64_t p) {
    core::require_prime(p);
    assignment.validate(tmpl, p);
    const unsigned n = tmpl.n();
    std::vector<std::vector<BigInt>> rows(n, std::vector<BigInt>(n, BigInt(0)));
    for (unsigned i = 0; i + 1 < n; ++i)
        rows[i][i] = BigInt::pow(BigInt(p), tmpl.alpha().parts()[i]);
    rows[n - 1][n - 1] = BigInt(1);
    for (unsigned i = 0; i < n; ++i) rows[i][n - 1] = BigInt(1);
    const auto& slots = tmpl.slots();
    for (size_t k = 0; k < slots.size(); ++k)
        rows[slots[k].row - 1][slots[k].col - 1] = BigInt(p) * BigInt(assignment.values()[k]);
    return HnfMatrix(std::move(rows));
}

}  // namespace subring::lattice
