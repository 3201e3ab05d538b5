#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "subring/census.hpp"
#include "subring/core.hpp"
#include "subring/formulas.hpp"
#include "subring/varieties.hpp"

namespace subring::target {

enum class Method { default_, formula, direct, recurrence };

/// A counting target the fit prober and the CLI can evaluate at any prime:
/// a census (full, subset, or pinned), a closed-form subgroup count, or an
/// affine variety point count.
struct Target {
    enum class Kind { g_alpha, g_n, f_n, subgroups, variety };

    Kind kind;
    core::Composition alpha;                       // g_alpha
    census::PairSubset pairs = census::PairSubset::all();  // g_alpha
    std::vector<census::SlotPin> pins;             // g_alpha
    unsigned n = 0, e = 0;                         // g_n / f_n / subgroups
    Method method = Method::default_;              // f_n / subgroups
    std::optional<varieties::PolySystem> system;   // variety
    std::string system_name;                       // for reporting

    BigInt evaluate(uint64_t p, const census::Options& opt = {}) const {
        switch (kind) {
            case Kind::g_alpha:
                return census::count_g_alpha(alpha, p, pairs, pins, opt);
            case Kind::g_n:
                return census::count_g_n(n, e, p, opt);
            case Kind::f_n:
                if (method == Method::direct) return census::count_f_n_direct(n, e, p, opt);
                return census::count_f_n_recurrence(n, e, p, opt);
            case Kind::subgroups:
                if (method == Method::direct) return census::count_subgroups_direct(n, e, p);
                return formulas::p_binomial(n - 1 + e, e, p);
            case Kind::variety:
                return varieties::count_points(*system, p, opt);
        }
        throw std::logic_error("unhandled target kind");
    }

    core::TargetDescriptor descriptor() const {
        core::TargetDescriptor d;
        switch (kind) {
            case Kind::g_alpha:
                d.kind = pairs.is_all() && pins.empty() ? "g_alpha" : "subset_census";
                d.params.push_back({"alpha", alpha.str()});
                if (!pairs.is_all()) d.params.push_back({"pairs", pairs.str()});
                for (const auto& pin : pins)
                    d.params.push_back({"pin", std::to_string(pin.row) + ":" +
                                                   std::to_string(pin.col) + "=" +
                                                   std::to_string(pin.value)});
                break;
            case Kind::g_n:
                d.kind = "g_n";
                d.params.push_back({"n", std::to_string(n)});
                d.params.push_back({"e", std::to_string(e)});
                break;
            case Kind::f_n:
                d.kind = "f_n";
                d.params.push_back({"n", std::to_string(n)});
                d.params.push_back({"e", std::to_string(e)});
                d.params.push_back({"method", method == Method::direct ? "direct" : "recurrence"});
                break;
            case Kind::subgroups:
                d.kind = "subgroups";
                d.params.push_back({"n", std::to_string(n)});
                d.params.push_back({"e", std::to_string(e)});
                d.params.push_back({"method", method == Method::direct ? "direct" : "formula"});
                break;
            case Kind::variety:
                d.kind = "variety";
                d.params.push_back({"system", system_name});
                break;
        }
        return d;
    }
};

}  // namespace subring::target
