#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "subring/bigint.hpp"
#include "subring/census.hpp"
#include "subring/core.hpp"

namespace subring::varieties {

struct Term {
    long long coef;
    std::vector<unsigned> exps;  // one exponent per variable
};

struct Poly {
    std::vector<Term> terms;
};

/// Explicit multivariate polynomial system over the integers, reduced mod p
/// at evaluation time. At least one polynomial; every exponent vector has
/// exactly var_count entries.
class PolySystem {
public:
    PolySystem(std::vector<std::string> vars, std::vector<Poly> polys)
        : vars_(std::move(vars)), polys_(std::move(polys)) {
        if (vars_.empty()) throw std::invalid_argument("PolySystem: no variables");
        if (polys_.empty()) throw std::invalid_argument("PolySystem: no polynomials");
        for (const Poly& poly : polys_)
            for (const Term& term : poly.terms)
                if (term.exps.size() != vars_.size())
                    throw std::invalid_argument(
                        "PolySystem: exponent vector length != variable count");
    }

    unsigned var_count() const { return static_cast<unsigned>(vars_.size()); }
    const std::vector<std::string>& vars() const { return vars_; }
    const std::vector<Poly>& polys() const { return polys_; }

private:
    std::vector<std::string> vars_;
    std::vector<Poly> polys_;
};

/// Number of points of (Z/pZ)^k where every polynomial vanishes, by
/// exhaustive evaluation of all p^k tuples.
inline BigInt count_points(const PolySystem& system, uint64_t p,
                           const census::Options& opt = {}) {
    core::require_prime(p);
    const unsigned k = system.var_count();
    BigInt space = BigInt::pow(BigInt(p), k);
    if (space > BigInt(opt.budget)) throw core::BudgetExceeded(space, opt.budget);

    // coefficients reduced once; exponents applied per point
    std::vector<std::vector<std::pair<uint64_t, std::vector<unsigned>>>> reduced;
    for (const Poly& poly : system.polys()) {
        std::vector<std::pair<uint64_t, std::vector<unsigned>>> terms;
        for (const Term& term : poly.terms) {
            long long c = term.coef % static_cast<long long>(p);
            if (c < 0) c += static_cast<long long>(p);
            if (c != 0) terms.push_back({static_cast<uint64_t>(c), term.exps});
        }
        reduced.push_back(std::move(terms));
    }

    std::vector<uint64_t> point(k, 0);
    uint64_t count = 0;
    uint64_t steps = 0;
    while (true) {
        if ((++steps & 0x3fff) == 0 &&
            census::cancel_flag().load(std::memory_order_relaxed))
            throw core::Cancelled();
        bool all_vanish = true;
        for (const auto& poly : reduced) {
            uint64_t value = 0;
            for (const auto& [coef, exps] : poly) {
                uint64_t term = coef;
                for (unsigned v = 0; v < k; ++v)
                    for (unsigned rep = 0; rep < exps[v]; ++rep)
                        term = term * point[v] % p;
                value = (value + term) % p;
            }
            if (value != 0) {
                all_vanish = false;
                break;
            }
        }
        if (all_vanish) ++count;
        unsigned v = k;
        while (v > 0 && ++point[v - 1] == p) point[--v] = 0;
        if (v == 0) break;
    }
    return BigInt(count);
}

/// Parses the polynomial document format: a JSON object with "vars" (list of
/// names) and "polys" (list of polynomials, each a list of
/// [coefficient, [exponents...]] pairs). Parsing is strict; any deviation is
/// reported with its position.
inline PolySystem load_system(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw std::invalid_argument(std::string("polynomial document: ") + err.what());
    }
    auto fail = [](const std::string& where, const std::string& what) -> void {
        throw std::invalid_argument("polynomial document at " + where + ": " + what);
    };
    if (!doc.is_object()) fail("$", "expected an object with \"vars\" and \"polys\"");
    for (const auto& [key, value] : doc.items())
        if (key != "vars" && key != "polys") fail("$." + key, "unknown field");
    if (!doc.contains("vars") || !doc["vars"].is_array() || doc["vars"].empty())
        fail("$.vars", "expected a nonempty array of variable names");
    std::vector<std::string> vars;
    for (size_t i = 0; i < doc["vars"].size(); ++i) {
        if (!doc["vars"][i].is_string())
            fail("$.vars[" + std::to_string(i) + "]", "expected a string");
        vars.push_back(doc["vars"][i].get<std::string>());
    }
    if (!doc.contains("polys") || !doc["polys"].is_array() || doc["polys"].empty())
        fail("$.polys", "expected a nonempty array of polynomials");
    std::vector<Poly> polys;
    for (size_t i = 0; i < doc["polys"].size(); ++i) {
        const auto& jp = doc["polys"][i];
        const std::string where = "$.polys[" + std::to_string(i) + "]";
        if (!jp.is_array() || jp.empty()) fail(where, "expected a nonempty array of terms");
        Poly poly;
        for (size_t t = 0; t < jp.size(); ++t) {
            const auto& jt = jp[t];
            const std::string twhere = where + "[" + std::to_string(t) + "]";
            if (!jt.is_array() || jt.size() != 2)
                fail(twhere, "expected [coefficient, [exponents...]]");
            if (!jt[0].is_number_integer()) fail(twhere + "[0]", "expected an integer");
            if (!jt[1].is_array() || jt[1].size() != vars.size())
                fail(twhere + "[1]", "expected " + std::to_string(vars.size()) + " exponents");
            Term term;
            term.coef = jt[0].get<long long>();
            for (size_t v = 0; v < jt[1].size(); ++v) {
                if (!jt[1][v].is_number_unsigned())
                    fail(twhere + "[1][" + std::to_string(v) + "]",
                         "expected a nonnegative integer");
                term.exps.push_back(jt[1][v].get<unsigned>());
            }
            poly.terms.push_back(std::move(term));
        }
        polys.push_back(std::move(poly));
    }
    return PolySystem(std::move(vars), std::move(polys));
}

inline PolySystem load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open polynomial document " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_system(buffer.str());
}

/// Named built-in systems, resolvable without a document. "qp-pair" is the
/// 5-variable pair {-a1 a4^2 + a2^2, -a1 a5^2 + a3^2} whose point count
/// depends on the residue class of p.
inline PolySystem builtin_system(const std::string& name) {
    if (name == "qp-pair") {
        std::vector<std::string> vars = {"a1", "a2", "a3", "a4", "a5"};
        Poly p1{{{-1, {1, 0, 0, 2, 0}}, {1, {0, 2, 0, 0, 0}}}};
        Poly p2{{{-1, {1, 0, 0, 0, 2}}, {1, {0, 0, 2, 0, 0}}}};
        return PolySystem(std::move(vars), {p1, p2});
    }
    throw std::invalid_argument("unknown builtin system \"" + name + "\"");
}

}  // namespace subring::varieties
