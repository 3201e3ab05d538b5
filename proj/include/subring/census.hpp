#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "subring/bigint.hpp"
#include "subring/core.hpp"
#include "subring/lattice.hpp"

namespace subring::census {

struct Options {
    uint64_t budget = 1'000'000'000;  // max assignments an enumeration may visit
    unsigned threads = 0;             // 0 = hardware concurrency
};

/// Cooperative cancellation for long enumerations. A cancelled run throws
/// core::Cancelled instead of returning a partial count.
inline std::atomic<bool>& cancel_flag() {
    static std::atomic<bool> flag{false};
    return flag;
}
inline void request_cancel() { cancel_flag().store(true, std::memory_order_relaxed); }
inline void reset_cancel() { cancel_flag().store(false, std::memory_order_relaxed); }

/// Which closure pairs (i, j), 1 <= i <= j <= n, a census enforces. ALL means
/// every pair; a proper subset counts assignments whose violations avoid it.
class PairSubset {
public:
    static PairSubset all() { return PairSubset(true, {}); }
    static PairSubset of(std::vector<std::pair<unsigned, unsigned>> pairs) {
        return PairSubset(false, std::move(pairs));
    }

    bool is_all() const { return all_; }
    const std::vector<std::pair<unsigned, unsigned>>& pairs() const { return pairs_; }

    void validate(unsigned n) const {
        for (auto [i, j] : pairs_)
            if (i < 1 || i > j || j > n)
                throw std::invalid_argument("pair (" + std::to_string(i) + "," +
                                            std::to_string(j) + ") out of bounds for n=" +
                                            std::to_string(n));
    }

    std::string str() const {
        if (all_) return "all";
        std::string out;
        for (size_t k = 0; k < pairs_.size(); ++k) {
            if (k) out += ",";
            out += std::to_string(pairs_[k].first) + ":" + std::to_string(pairs_[k].second);
        }
        return out;
    }

private:
    PairSubset(bool all, std::vector<std::pair<unsigned, unsigned>> pairs)
        : all_(all), pairs_(std::move(pairs)) {}
    bool all_;
    std::vector<std::pair<unsigned, unsigned>> pairs_;
};

/// Fixes one free entry to a single value (diagnostic mode).
struct SlotPin {
    unsigned row, col;  // 1-based slot coordinates
    uint64_t value;
};

namespace detail {

inline __int128 to_i128(const BigInt& b) {
    static const BigInt two64 = BigInt::pow(BigInt(2), 64);
    BigInt q, r;
    BigInt::divmod(b.abs(), two64, q, r);
    unsigned __int128 m =
        (static_cast<unsigned __int128>(q.to_u64()) << 64) | r.to_u64();
    return b.is_negative() ? -static_cast<__int128>(m) : static_cast<__int128>(m);
}

struct PlanSlot {
    unsigned row, col;    // 1-based
    uint64_t range;       // values enumerated (1 when pinned)
    bool pinned = false;
    uint64_t pin_value = 0;
};

struct PlanCheck {
    unsigned i, j;  // column pair, i <= j
};

/// Enumeration plan for one (alpha, p, subset, pins) census: slots in
/// row-major order, closure checks bucketed by the number of set slots each
/// needs, exact search-space size, and the word width the back-substitution
/// intermediates fit in.
struct Plan {
    unsigned n = 1;
    uint64_t p = 2;
    std::vector<PlanSlot> slots;
    std::vector<std::vector<PlanCheck>> checks_at;  // index 0..slots.size()
    size_t full_depth = 0;                          // depth after which all checks ran
    std::vector<uint64_t> suffix_product;           // product of ranges from depth d on
    std::vector<BigInt> diag;                       // p^{e_i}, then 1
    BigInt space;
    enum class Width { word64, word128, big } width = Width::word64;

    Plan(const core::Composition& alpha, uint64_t prime, const PairSubset& subset,
         const std::vector<SlotPin>& pins, uint64_t budget) {
        core::require_prime(prime);
        n = alpha.n();
        p = prime;
        subset.validate(n);
        lattice::IrreducibleTemplate tmpl(alpha);

        space = BigInt(1);
        for (const auto& s : tmpl.slots()) {
            PlanSlot ps{s.row, s.col, 0, false, 0};
            BigInt full_range = BigInt::pow(BigInt(p), s.range_exponent);
            for (const SlotPin& pin : pins) {
                if (pin.row == s.row && pin.col == s.col) {
                    if (BigInt(pin.value) >= full_range)
                        throw std::invalid_argument("pin value out of range at slot (" +
                                                    std::to_string(s.row) + "," +
                                                    std::to_string(s.col) + ")");
                    ps.pinned = true;
                    ps.pin_value = pin.value;
                }
            }
            if (!ps.pinned) space *= full_range;
            slots.push_back(ps);
        }
        for (const SlotPin& pin : pins) {
            bool found = false;
            for (const auto& s : tmpl.slots())
                found = found || (s.row == pin.row && s.col == pin.col);
            if (!found)
                throw std::invalid_argument("pin (" + std::to_string(pin.row) + "," +
                                            std::to_string(pin.col) + ") is not a slot");
        }
        if (space > BigInt(budget)) throw core::BudgetExceeded(space, budget);

        // Ranges fit u64 now: each divides the budget-checked space.
        for (size_t k = 0; k < slots.size(); ++k)
            slots[k].range = slots[k].pinned ? 1 : tmpl.slot_range(k, p);

        diag.reserve(n);
        for (unsigned part : alpha.parts()) diag.push_back(BigInt::pow(BigInt(p), part));
        diag.push_back(BigInt(1));

        build_checks(subset);

        suffix_product.assign(slots.size() + 1, 1);
        for (size_t d = slots.size(); d-- > 0;)
            suffix_product[d] = suffix_product[d + 1] * slots[d].range;

        width = select_width();
    }

    size_t slot_index(unsigned row, unsigned col) const {
        for (size_t k = 0; k < slots.size(); ++k)
            if (slots[k].row == row && slots[k].col == col) return k;
        throw std::logic_error("no such slot");
    }

private:
    void build_checks(const PairSubset& subset) {
        std::vector<PlanCheck> pairs;
        if (subset.is_all()) {
            for (unsigned j = 1; j + 1 <= n; ++j)
                for (unsigned i = 1; i <= j; ++i) pairs.push_back({i, j});
        } else {
            for (auto [i, j] : subset.pairs()) pairs.push_back({i, j});
        }
        // Depth of a check = number of leading slots that fix every entry its
        // back-substitution reads: coefficients in rows 1..i up to column i,
        // plus the two factor columns.
        std::vector<std::pair<size_t, PlanCheck>> with_depth;
        for (const PlanCheck& c : pairs) {
            size_t depth = 0;
            auto touch = [&](unsigned r, unsigned col) {
                if (r < col && col <= n - 1 && r <= n - 1)
                    depth = std::max(depth, slot_index(r, col) + 1);
            };
            for (unsigned k = 1; k <= c.i; ++k) {
                for (unsigned m = k + 1; m <= c.i; ++m) touch(k, m);
                touch(k, c.i);
                touch(k, c.j);
            }
            with_depth.push_back({depth, c});
        }
        std::stable_sort(with_depth.begin(), with_depth.end(),
                         [](const auto& a, const auto& b) {
                             if (a.first != b.first) return a.first < b.first;
                             if (a.second.j != b.second.j) return a.second.j < b.second.j;
                             return a.second.i < b.second.i;
                         });
        checks_at.assign(slots.size() + 1, {});
        full_depth = 0;
        for (const auto& [depth, c] : with_depth) {
            checks_at[depth].push_back(c);
            full_depth = std::max(full_depth, depth);
        }
    }

    /// Worst-case magnitude of any back-substitution intermediate, taken over
    /// all pairs: entries in row k are bounded by p^{e_k}, the target vector
    /// by products of two entries, and x_k by the running remainder.
    Width select_width() const {
        BigInt worst(0);
        std::vector<BigInt> xb(n + 1);
        for (unsigned i = 1; i <= n; ++i) {
            xb[i] = diag[i - 1];
            if (worst < xb[i]) worst = xb[i];
            for (unsigned k = i; k-- > 1;) {
                BigInt rb = diag[k - 1] * diag[k - 1];
                for (unsigned m = k + 1; m <= i; ++m) rb += diag[k - 1] * xb[m];
                xb[k] = rb;
                if (worst < rb) worst = rb;
            }
        }
        const BigInt lim64 = BigInt::pow(BigInt(2), 62);
        const BigInt lim128 = BigInt::pow(BigInt(2), 125);
        if (worst < lim64) return Width::word64;
        if (worst < lim128) return Width::word128;
        return Width::big;
    }
};

/// Depth-first enumerator over slot values. A check runs as soon as the last
/// slot it reads is set; a failed check prunes the whole subtree below it,
/// which excludes exactly the assignments sharing the violating prefix. Once
/// every check has run, the remaining slots contribute a plain product.
template <class I>
class Engine {
public:
    explicit Engine(const Plan& plan) : plan_(plan), n_(plan.n) {
        a_.assign(static_cast<size_t>(n_) * n_, I(0));
        x_.assign(n_ + 1, I(0));
        for (unsigned i = 1; i <= n_; ++i) {
            at(i, i) = convert(plan_.diag[i - 1]);
            at(i, n_) = I(1);
        }
        p_ = static_cast<uint64_t>(plan.p);
    }

    uint64_t run_job(uint64_t job_index, size_t prefix_depth) {
        uint64_t rem = job_index;
        for (size_t s = prefix_depth; s-- > 0;) {
            const uint64_t range = plan_.slots[s].range;
            set_slot(s, rem % range);
            rem /= range;
        }
        for (size_t d = 0; d <= prefix_depth; ++d)
            for (const PlanCheck& c : plan_.checks_at[d])
                if (!check(c)) return 0;
        count_ = 0;
        dfs(prefix_depth);
        return count_;
    }

private:
    const Plan& plan_;
    unsigned n_;
    uint64_t p_ = 2;
    std::vector<I> a_;  // current matrix, row major, 1-based access
    std::vector<I> x_;
    uint64_t count_ = 0;
    uint64_t steps_ = 0;

    I& at(unsigned i, unsigned j) { return a_[(i - 1) * static_cast<size_t>(n_) + (j - 1)]; }

    static I convert(const BigInt& b);
    static I entry_value(uint64_t p, uint64_t v);

    void set_slot(size_t k, uint64_t v) {
        const PlanSlot& s = plan_.slots[k];
        at(s.row, s.col) = entry_value(p_, s.pinned ? s.pin_value : v);
        if ((++steps_ & 0xfff) == 0 && cancel_flag().load(std::memory_order_relaxed))
            throw core::Cancelled();
    }

    bool check(const PlanCheck& c) {
        const unsigned i = c.i, j = c.j;
        x_[i] = (i == j) ? at(i, i) : at(i, j);
        for (unsigned k = i; k-- > 1;) {
            I r = at(k, i) * at(k, j);
            for (unsigned m = k + 1; m <= i; ++m) r -= at(k, m) * x_[m];
            if (r % at(k, k) != I(0)) return false;
            x_[k] = r / at(k, k);
        }
        return true;
    }

    void dfs(size_t d) {
        if (d >= plan_.full_depth) {
            count_ += plan_.suffix_product[d];
            return;
        }
        const uint64_t range = plan_.slots[d].range;
        const auto& checks = plan_.checks_at[d + 1];
        for (uint64_t v = 0; v < range; ++v) {
            set_slot(d, v);
            bool ok = true;
            for (const PlanCheck& c : checks)
                if (!check(c)) {
                    ok = false;
                    break;
                }
            if (ok) dfs(d + 1);
        }
    }
};

template <>
inline int64_t Engine<int64_t>::convert(const BigInt& b) {
    return b.to_i64();
}
template <>
inline __int128 Engine<__int128>::convert(const BigInt& b) {
    return to_i128(b);
}
template <>
inline BigInt Engine<BigInt>::convert(const BigInt& b) {
    return b;
}

// Entry magnitudes were bound-checked when the word width was selected, so
// the p*v product is safe in the widths below.
template <>
inline int64_t Engine<int64_t>::entry_value(uint64_t p, uint64_t v) {
    return static_cast<int64_t>(p * v);
}
template <>
inline __int128 Engine<__int128>::entry_value(uint64_t p, uint64_t v) {
    return static_cast<__int128>(static_cast<unsigned __int128>(p) * v);
}
template <>
inline BigInt Engine<BigInt>::entry_value(uint64_t p, uint64_t v) {
    return BigInt(p) * BigInt(v);
}

template <class I>
inline BigInt run_plan_with(const Plan& plan, unsigned threads) {
    // Jobs are prefixes of the row-major slot order; summing per-job counts
    // in job order keeps the total independent of thread count.
    size_t prefix_depth = 0;
    uint64_t jobs = 1;
    const uint64_t target = std::max<uint64_t>(64, 4ull * threads);
    while (prefix_depth < plan.slots.size() && jobs < target) {
        const uint64_t range = plan.slots[prefix_depth].range;
        if (jobs > (1ull << 22) / std::max<uint64_t>(range, 1)) break;
        jobs *= range;
        ++prefix_depth;
    }
    std::vector<uint64_t> partial(jobs, 0);
    const unsigned workers =
        static_cast<unsigned>(std::min<uint64_t>(std::max(1u, threads), jobs));
    if (workers <= 1) {
        Engine<I> engine(plan);
        for (uint64_t job = 0; job < jobs; ++job)
            partial[job] = engine.run_job(job, prefix_depth);
    } else {
        std::atomic<uint64_t> next{0};
        std::atomic<bool> failed{false};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                Engine<I> engine(plan);
                try {
                    while (true) {
                        const uint64_t job = next.fetch_add(1, std::memory_order_relaxed);
                        if (job >= jobs || failed.load(std::memory_order_relaxed)) break;
                        partial[job] = engine.run_job(job, prefix_depth);
                    }
                } catch (const core::Cancelled&) {
                    failed.store(true, std::memory_order_relaxed);
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failed.load()) throw core::Cancelled();
    }
    BigInt total(0);
    for (uint64_t job = 0; job < jobs; ++job) total += BigInt(partial[job]);
    return total;
}

inline BigInt run_plan(const Plan& plan, const Options& opt) {
    unsigned threads = opt.threads ? opt.threads : std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    switch (plan.width) {
        case Plan::Width::word64:
            return run_plan_with<int64_t>(plan, threads);
        case Plan::Width::word128:
            return run_plan_with<__int128>(plan, threads);
        default:
            return run_plan_with<BigInt>(plan, threads);
    }
}

}  // namespace detail

/// g_alpha(p): number of irreducible subring matrices with diagonal
/// (p^{e_1},...,p^{e_{n-1}},1), every entry choice enumerated and every
/// requested closure pair checked numerically. With a proper subset only
/// those pairs are enforced; pins fix chosen entries for diagnostic counts.
inline BigInt count_g_alpha(const core::Composition& alpha, uint64_t p,
                            const PairSubset& subset = PairSubset::all(),
                            const std::vector<SlotPin>& pins = {},
                            const Options& opt = {}) {
    detail::Plan plan(alpha, p, subset, pins, opt.budget);
    return detail::run_plan(plan, opt);
}

inline BigInt search_space_g_alpha(const core::Composition& alpha, uint64_t p) {
    return lattice::IrreducibleTemplate(alpha).search_space(p);
}

/// g_n(p^e) = sum of g_alpha(p) over all compositions of e into n-1 parts.
inline BigInt count_g_n(unsigned n, unsigned e, uint64_t p, const Options& opt = {}) {
    if (n < 1) throw std::invalid_argument("count_g_n: n must be >= 1");
    core::require_prime(p);
    const auto comps = core::compositions(e, n - 1);
    BigInt total_space(0);
    for (const auto& alpha : comps) total_space += search_space_g_alpha(alpha, p);
    if (total_space > BigInt(opt.budget)) throw core::BudgetExceeded(total_space, opt.budget);
    BigInt total(0);
    for (const auto& alpha : comps) total += count_g_alpha(alpha, p, PairSubset::all(), {}, opt);
    return total;
}

/// f_n(p^e) by the irreducible-decomposition recurrence
///   f_n(p^e) = sum_{i<=e} sum_{j<=n} C(n-1, j-1) f_{n-j}(p^{e-i}) g_j(p^i),
/// with f_0(p^0) = 1 and f_0(p^e) = 0 for e > 0. Sub-results are memoized for
/// the duration of one call.
inline BigInt count_f_n_recurrence(unsigned n, unsigned e, uint64_t p,
                                   const Options& opt = {}) {
    core::require_prime(p);
    std::map<std::pair<unsigned, unsigned>, BigInt> g_memo, f_memo;
    auto g_of = [&](unsigned j, unsigned i) -> const BigInt& {
        auto key = std::make_pair(j, i);
        auto it = g_memo.find(key);
        if (it == g_memo.end()) it = g_memo.emplace(key, count_g_n(j, i, p, opt)).first;
        return it->second;
    };
    auto f_of = [&](auto&& self, unsigned nn, unsigned ee) -> BigInt {
        if (nn == 0) return BigInt(ee == 0 ? 1 : 0);
        auto key = std::make_pair(nn, ee);
        if (auto it = f_memo.find(key); it != f_memo.end()) return it->second;
        BigInt total(0);
        for (unsigned i = 0; i <= ee; ++i)
            for (unsigned j = 1; j <= nn; ++j) {
                const BigInt& g = g_of(j, i);
                if (g.is_zero()) continue;
                total += core::binomial(nn - 1, j - 1) * self(self, nn - j, ee - i) * g;
            }
        f_memo.emplace(key, total);
        return total;
    };
    return f_of(f_of, n, e);
}

/// f_n(p^e) by direct enumeration of every HNF matrix with determinant p^e,
/// counting those whose column span is multiplicatively closed and contains
/// the all-ones vector. Independent of the recurrence and of the irreducible
/// fast path; intended as an oracle for small n and e.
inline BigInt count_f_n_direct(unsigned n, unsigned e, uint64_t p, const Options& opt = {}) {
    if (n < 1) throw std::invalid_argument("count_f_n_direct: n must be >= 1");
    core::require_prime(p);

    std::vector<std::vector<unsigned>> diagonals;
    std::vector<unsigned> cur(n, 0);
    auto gen = [&](auto&& self, unsigned pos, unsigned remaining) -> void {
        if (pos + 1 == n) {
            cur[pos] = remaining;
            diagonals.push_back(cur);
            return;
        }
        for (unsigned v = 0; v <= remaining; ++v) {
            cur[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    gen(gen, 0, e);

    BigInt total_space(0);
    for (const auto& d : diagonals) {
        BigInt s(1);
        for (unsigned i = 0; i < n; ++i)
            s *= BigInt::pow(BigInt(p), static_cast<uint64_t>(d[i]) * (n - 1 - i));
        total_space += s;
    }
    if (total_space > BigInt(opt.budget)) throw core::BudgetExceeded(total_space, opt.budget);

    BigInt count(0);
    for (const auto& d : diagonals) {
        std::vector<uint64_t> range;  // per off-diagonal entry, row major
        std::vector<std::pair<unsigned, unsigned>> pos;
        for (unsigned i = 0; i < n; ++i)
            for (unsigned j = i + 1; j < n; ++j) {
                uint64_t r = 1;
                for (unsigned k = 0; k < d[i]; ++k) r *= p;
                range.push_back(r);
                pos.push_back({i, j});
            }
        std::vector<uint64_t> val(range.size(), 0);
        while (true) {
            if (cancel_flag().load(std::memory_order_relaxed)) throw core::Cancelled();
            std::vector<std::vector<BigInt>> rows(n, std::vector<BigInt>(n, BigInt(0)));
            for (unsigned i = 0; i < n; ++i) rows[i][i] = BigInt::pow(BigInt(p), d[i]);
            for (size_t k = 0; k < pos.size(); ++k)
                rows[pos[k].first][pos[k].second] = BigInt(val[k]);
            if (lattice::is_subring_matrix(lattice::HnfMatrix(std::move(rows))))
                count += BigInt(1);
            size_t k = range.size();
            while (k > 0 && ++val[k - 1] == range[k - 1]) val[--k] = 0;
            if (k == 0) break;
        }
    }
    return count;
}

/// a_n(p^e): HNF matrices with determinant p^e and no closure constraint,
/// summed exactly as sum over diagonal exponents of prod_i p^{d_i (n-i)}.
inline BigInt count_subgroups_direct(unsigned n, unsigned e, uint64_t p) {
    if (n < 1) throw std::invalid_argument("count_subgroups_direct: n must be >= 1");
    core::require_prime(p);
    BigInt total(0);
    std::vector<unsigned> cur(n, 0);
    auto gen = [&](auto&& self, unsigned pos, unsigned remaining) -> void {
        if (pos + 1 == n) {
            cur[pos] = remaining;
            BigInt s(1);
            for (unsigned i = 0; i < n; ++i)
                s *= BigInt::pow(BigInt(p), static_cast<uint64_t>(cur[i]) * (n - 1 - i));
            total += s;
            return;
        }
        for (unsigned v = 0; v <= remaining; ++v) {
            cur[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    gen(gen, 0, e);
    return total;
}

}  // namespace subring::census
