#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subring/census.hpp"
#include "subring/core.hpp"
#include "subring/fitfind.hpp"
#include "subring/formulas.hpp"
#include "subring/lattice.hpp"
#include "subring/target.hpp"
#include "subring/varieties.hpp"

namespace subring::cli {

using nlohmann::ordered_json;

// Exit codes: 0 ok, 1 verification mismatch, 2 usage error, 3 budget exceeded.
inline constexpr int exit_ok = 0;
inline constexpr int exit_mismatch = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_budget = 3;

namespace detail {

class Reporter {
public:
    Reporter(std::ostream& out, bool csv) : out_(out), csv_(csv) {}

    void emit(const std::string& kind, ordered_json params,
              std::optional<uint64_t> prime, std::optional<std::string> count,
              std::optional<std::string> verdict, long long elapsed_ms) {
        if (!csv_) {
            ordered_json line;
            line["kind"] = kind;
            line["params"] = std::move(params);
            if (prime) line["prime"] = *prime;
            if (count) line["count"] = *count;
            if (verdict) line["verdict"] = *verdict;
            line["elapsed_ms"] = elapsed_ms;
            out_ << line.dump() << "\n";
            return;
        }
        if (!header_done_) {
            out_ << "kind,params,prime,count,verdict,elapsed_ms\n";
            header_done_ = true;
        }
        out_ << csv_field(kind) << "," << csv_field(params.dump()) << ","
             << (prime ? std::to_string(*prime) : "") << ","
             << (count ? csv_field(*count) : "") << ","
             << (verdict ? csv_field(*verdict) : "") << "," << elapsed_ms << "\n";
    }

private:
    std::ostream& out_;
    bool csv_;
    bool header_done_ = false;

    static std::string csv_field(const std::string& value) {
        if (value.find_first_of(",\"\n") == std::string::npos) return value;
        std::string quoted = "\"";
        for (char c : value) {
            quoted += c;
            if (c == '"') quoted += '"';
        }
        quoted += "\"";
        return quoted;
    }
};

class Stopwatch {
public:
    long long ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::vector<uint64_t> parse_primes(const std::string& text) {
    if (text.rfind("first:", 0) == 0) {
        const long k = std::stol(text.substr(6));
        if (k < 1) throw std::invalid_argument("--primes first:K needs K >= 1");
        return core::first_primes(static_cast<size_t>(k));
    }
    std::vector<uint64_t> primes;
    std::istringstream in(text);
    std::string piece;
    while (std::getline(in, piece, ',')) {
        const uint64_t p = std::stoull(piece);
        core::require_prime(p);
        primes.push_back(p);
    }
    if (primes.empty()) throw std::invalid_argument("--primes list is empty");
    return primes;
}

inline std::vector<std::pair<unsigned, unsigned>> parse_pairs(const std::string& text) {
    std::vector<std::pair<unsigned, unsigned>> pairs;
    std::istringstream in(text);
    std::string piece;
    while (std::getline(in, piece, ',')) {
        const size_t colon = piece.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("pair \"" + piece + "\" must look like i:j");
        pairs.push_back({static_cast<unsigned>(std::stoul(piece.substr(0, colon))),
                         static_cast<unsigned>(std::stoul(piece.substr(colon + 1)))});
    }
    if (pairs.empty()) throw std::invalid_argument("--pairs list is empty");
    return pairs;
}

inline census::SlotPin parse_pin(const std::string& text) {
    const size_t colon = text.find(':');
    const size_t eq = text.find('=');
    if (colon == std::string::npos || eq == std::string::npos || eq < colon)
        throw std::invalid_argument("pin \"" + text + "\" must look like i:j=value");
    return {static_cast<unsigned>(std::stoul(text.substr(0, colon))),
            static_cast<unsigned>(std::stoul(text.substr(colon + 1, eq - colon - 1))),
            std::stoull(text.substr(eq + 1))};
}

inline ordered_json descriptor_params(const core::TargetDescriptor& d) {
    ordered_json params = ordered_json::object();
    for (const auto& [key, value] : d.params) {
        if (params.contains(key)) {
            if (!params[key].is_array()) params[key] = ordered_json::array({params[key]});
            params[key].push_back(value);
        } else {
            params[key] = value;
        }
    }
    return params;
}

inline ordered_json fit_report_json(const fitfind::FitReport& report) {
    ordered_json out = ordered_json::object();
    out["scope"] = "empirical at the sampled primes";
    out["fitted_points"] = report.fitted_points;
    out["held_out_points"] = report.held_out_points;
    out["max_degree_tried"] = report.max_degree_tried;
    if (report.verdict == fitfind::FitReport::Verdict::polynomial)
        out["polynomial"] = fitfind::polynomial_str(report.coefficients);
    if (report.verdict == fitfind::FitReport::Verdict::quasipolynomial) {
        out["modulus"] = report.modulus;
        ordered_json classes = ordered_json::array();
        for (const auto& cls : report.classes) {
            ordered_json c;
            c["residue"] = cls.residue;
            c["pinned"] = cls.pinned;
            c["polynomial"] = fitfind::polynomial_str(cls.coefficients);
            ordered_json primes = ordered_json::array();
            for (const auto& pt : cls.points) primes.push_back(pt.prime);
            c["primes"] = primes;
            classes.push_back(c);
        }
        out["classes"] = classes;
    }
    return out;
}

/// Shared mutable state while running one verify suite.
struct VerifyRun {
    Reporter& reporter;
    census::Options options;
    unsigned max_n;
    std::vector<uint64_t> primes;
    double budget_seconds;
    Stopwatch clock;
    bool any_fail = false;

    bool out_of_time() const {
        return budget_seconds > 0 && clock.ms() > budget_seconds * 1000.0;
    }

    void result(const std::string& check, ordered_json params, const BigInt& expected,
                const BigInt& actual, long long elapsed_ms) {
        params["check"] = check;
        const bool pass = expected == actual;
        if (!pass) {
            params["expected"] = expected.str();
            params["actual"] = actual.str();
            any_fail = true;
        }
        reporter.emit("verify", std::move(params), std::nullopt, actual.str(),
                      pass ? "pass" : "fail", elapsed_ms);
    }

    void skipped(const std::string& check, ordered_json params) {
        params["check"] = check;
        reporter.emit("verify", std::move(params), std::nullopt, std::nullopt, "skipped", 0);
    }

    /// Runs one expected == actual check unless the time budget is spent.
    void check(const std::string& name, ordered_json params,
               const std::function<BigInt()>& expected,
               const std::function<BigInt()>& actual) {
        if (out_of_time()) {
            skipped(name, std::move(params));
            return;
        }
        Stopwatch watch;
        try {
            const BigInt want = expected();
            const BigInt got = actual();
            result(name, std::move(params), want, got, watch.ms());
        } catch (const core::BudgetExceeded&) {
            params["reason"] = "budget";
            skipped(name, std::move(params));
        }
    }
};

inline void verify_basic(VerifyRun& run) {
    using formulas::FormulaName;
    for (uint64_t p : run.primes)
        run.check("worked_example_g_alpha_3_2", {{"alpha", "3,2"}, {"prime", p}},
                  [&] { return BigInt(p); },
                  [&] {
                      return census::count_g_alpha(core::Composition({3, 2}), p,
                                                   census::PairSubset::all(), {}, run.options);
                  });
    for (unsigned n = 3; n <= std::min(run.max_n, 5u); ++n)
        for (uint64_t p : run.primes)
            for (unsigned e = 0; e <= n; ++e) {
                BigInt want;
                if (e < n - 1)
                    want = BigInt(0);
                else if (e == n - 1)
                    want = BigInt(1);
                else
                    want = formulas::eval_formula(
                        {FormulaName::g_basic_n, {{"n", static_cast<long long>(n)}}}, p);
                run.check("g_n_small_index", {{"n", n}, {"e", e}, {"prime", p}},
                          [&] { return want; },
                          [&] { return census::count_g_n(n, e, p, run.options); });
            }
    for (unsigned n = 2; n <= std::min(run.max_n, 5u); ++n)
        for (unsigned e = 0; e <= 5; ++e)
            for (uint64_t p : run.primes)
                run.check("subgroup_count_identity", {{"n", n}, {"e", e}, {"prime", p}},
                          [&] { return formulas::p_binomial(n - 1 + e, e, p); },
                          [&] { return census::count_subgroups_direct(n, e, p); });
    for (unsigned e = 0; e <= 3; ++e)
        for (uint64_t p : run.primes) {
            if (p > 3) continue;
            run.check("f_n_recurrence_vs_direct", {{"n", 3}, {"e", e}, {"prime", p}},
                      [&] { return census::count_f_n_recurrence(3, e, p, run.options); },
                      [&] { return census::count_f_n_direct(3, e, p, run.options); });
        }
}

inline void verify_lemmas(VerifyRun& run) {
    using formulas::FormulaName;
    const uint64_t lemma_space_cap = 100'000'000;
    for (unsigned n = 3; n <= std::min(run.max_n, 5u); ++n)
        for (uint64_t p : run.primes)
            run.check("g_n_plus_1", {{"n", n}, {"prime", p}},
                      [&] {
                          return formulas::eval_formula(
                              {FormulaName::g_n_plus_1, {{"n", static_cast<long long>(n)}}}, p);
                      },
                      [&] { return census::count_g_n(n, n + 1, p, run.options); });
    for (unsigned n = 3; n <= std::min(run.max_n, 5u); ++n)
        for (uint64_t p : run.primes) {
            if (n >= 5 && p > 3) continue;
            run.check("g_n_plus_2", {{"n", n}, {"prime", p}},
                      [&] {
                          return formulas::eval_formula(
                              {FormulaName::g_n_plus_2, {{"n", static_cast<long long>(n)}}}, p);
                      },
                      [&] { return census::count_g_n(n, n + 2, p, run.options); });
        }
    // Per-diagonal closed forms against brute force, every admissible
    // placement with the search space under the cap.
    auto check_alpha = [&](const std::string& name, const core::Composition& alpha,
                           const formulas::FormulaId& id) {
        for (uint64_t p : run.primes) {
            if (p > 5) continue;
            if (lattice::IrreducibleTemplate(alpha).search_space(p) > BigInt(lemma_space_cap))
                continue;
            run.check(name, {{"alpha", alpha.str()}, {"prime", p}},
                      [&] { return formulas::eval_formula(id, p); },
                      [&] { return census::count_g_alpha(alpha, p, census::PairSubset::all(),
                                                         {}, run.options); });
        }
    };
    for (long long n = 2; n <= run.max_n; ++n) {
        std::vector<unsigned> parts(static_cast<size_t>(n - 1), 1);
        parts[0] = 4;
        check_alpha("lemma_beta4", core::Composition(parts),
                    {FormulaName::lemma_beta4, {{"n", n}}});
    }
    for (long long n = 3; n <= run.max_n; ++n)
        for (long long beta = 2; beta <= 4; ++beta) {
            for (long long k = 2; k <= n - 1; ++k) {
                std::vector<unsigned> parts(static_cast<size_t>(n - 1), 1);
                parts[0] = 2;
                parts[static_cast<size_t>(k - 1)] = static_cast<unsigned>(beta);
                check_alpha("lemma_2beta", core::Composition(parts),
                            {FormulaName::lemma_2beta, {{"n", n}, {"k", k}, {"beta", beta}}});
            }
            for (long long k = 1; k <= n - 2; ++k) {
                std::vector<unsigned> parts(static_cast<size_t>(n - 1), 1);
                parts[0] = 3;
                parts[static_cast<size_t>(k)] = static_cast<unsigned>(beta);
                check_alpha("lemma_3beta", core::Composition(parts),
                            {FormulaName::lemma_3beta, {{"n", n}, {"k", k}, {"beta", beta}}});
            }
        }
    for (long long n = 4; n <= run.max_n; ++n)
        for (long long k = 1; k < n - 2; ++k)
            for (long long l = k + 1; l <= n - 2; ++l) {
                std::vector<unsigned> parts(static_cast<size_t>(n - 1), 1);
                parts[0] = 2;
                parts[static_cast<size_t>(k)] = 2;
                parts[static_cast<size_t>(l)] = 2;
                check_alpha("lemma_222", core::Composition(parts),
                            {FormulaName::lemma_222, {{"n", n}, {"k", k}, {"l", l}}});
            }
    // Corollaries: closed form == sum of constituent lemma evaluations
    // == summed brute force.
    for (long long n = 4; n <= run.max_n; ++n)
        for (uint64_t p : run.primes) {
            if (p > 3) continue;
            run.check("cor_2beta_vs_lemmas", {{"n", n}, {"prime", p}},
                      [&] {
                          return formulas::eval_formula({FormulaName::cor_2beta, {{"n", n}}}, p);
                      },
                      [&] {
                          BigInt sum(0);
                          for (long long k = 2; k <= n - 1; ++k)
                              sum += formulas::eval_formula(
                                  {FormulaName::lemma_2beta, {{"n", n}, {"k", k}, {"beta", 3}}},
                                  p);
                          return sum;
                      });
            run.check("cor_2beta_vs_census", {{"n", n}, {"prime", p}},
                      [&] {
                          return formulas::eval_formula({FormulaName::cor_2beta, {{"n", n}}}, p);
                      },
                      [&] {
                          BigInt sum(0);
                          for (long long k = 2; k <= n - 1; ++k) {
                              std::vector<unsigned> parts(static_cast<size_t>(n - 1), 1);
                              parts[0] = 2;
                              parts[static_cast<size_t>(k - 1)] = 3;
                              sum += census::count_g_alpha(core::Composition(parts), p,
                                                           census::PairSubset::all(), {},
                                                           run.options);
                          }
                          return sum;
                      });
            run.check("cor_32_vs_lemmas", {{"n", n}, {"prime", p}},
                      [&] {
                          return formulas::eval_formula({FormulaName::cor_32, {{"n", n}}}, p);
                      },
                      [&] {
                          BigInt sum(0);
                          for (long long k = 1; k <= n - 2; ++k)
                              sum += formulas::eval_formula(
                                  {FormulaName::lemma_3beta, {{"n", n}, {"k", k}, {"beta", 2}}},
                                  p);
                          return sum;
                      });
            run.check("cor_32_vs_census", {{"n", n}, {"prime", p}},
                      [&] {
                          return formulas::eval_formula({FormulaName::cor_32, {{"n", n}}}, p);
                      },
                      [&] {
                          BigInt sum(0);
                          for (long long k = 1; k <= n - 2; ++k) {
                              std::vector<unsigned> parts(static_cast<size_t>(n - 1), 1);
                              parts[0] = 3;
                              parts[static_cast<size_t>(k)] = 2;
                              sum += census::count_g_alpha(core::Composition(parts), p,
                                                           census::PairSubset::all(), {},
                                                           run.options);
                          }
                          return sum;
                      });
            if (n >= 4) {
                run.check("cor_222_vs_lemmas", {{"n", n}, {"prime", p}},
                          [&] {
                              return formulas::eval_formula({FormulaName::cor_222, {{"n", n}}},
                                                            p);
                          },
                          [&] {
                              BigInt sum(0);
                              for (long long k = 1; k < n - 2; ++k)
                                  for (long long l = k + 1; l <= n - 2; ++l)
                                      sum += formulas::eval_formula(
                                          {FormulaName::lemma_222,
                                           {{"n", n}, {"k", k}, {"l", l}}},
                                          p);
                              return sum;
                          });
                run.check("cor_222_vs_census", {{"n", n}, {"prime", p}},
                          [&] {
                              return formulas::eval_formula({FormulaName::cor_222, {{"n", n}}},
                                                            p);
                          },
                          [&] {
                              BigInt sum(0);
                              for (long long k = 1; k < n - 2; ++k)
                                  for (long long l = k + 1; l <= n - 2; ++l) {
                                      std::vector<unsigned> parts(static_cast<size_t>(n - 1), 1);
                                      parts[0] = 2;
                                      parts[static_cast<size_t>(k)] = 2;
                                      parts[static_cast<size_t>(l)] = 2;
                                      sum += census::count_g_alpha(core::Composition(parts), p,
                                                                   census::PairSubset::all(),
                                                                   {}, run.options);
                                  }
                              return sum;
                          });
            }
        }
}

inline void verify_zeta(VerifyRun& run) {
    for (unsigned n = 2; n <= std::min(run.max_n, 4u); ++n)
        for (uint64_t p : run.primes) {
            if (p > 5) continue;
            if (run.out_of_time()) {
                run.skipped("zeta_vs_recurrence", {{"n", n}, {"prime", p}});
                continue;
            }
            Stopwatch watch;
            try {
                const unsigned max_e = 6;
                const auto series = formulas::zeta_local_coefficients(n, p, max_e);
                for (unsigned e = 0; e <= max_e; ++e)
                    run.result("zeta_vs_recurrence", {{"n", n}, {"e", e}, {"prime", p}},
                               series[e], census::count_f_n_recurrence(n, e, p, run.options),
                               watch.ms());
            } catch (const core::BudgetExceeded&) {
                run.skipped("zeta_vs_recurrence", {{"n", n}, {"prime", p}, {"reason", "budget"}});
            }
        }
}

}  // namespace detail

/// Parses and executes one command line. Reports are written to `out`, one
/// object per line; diagnostics go to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"exact census of subrings, subgroups, and their counting formulas"};
    app.require_subcommand(1);

    std::string format = "json";
    census::Options options;
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--threads", options.threads, "worker threads (default: hardware)");
    app.add_option("--budget", options.budget, "max assignments per enumeration");

    std::string alpha_text, pairs_text, prime_list, formula_name, system_name, poly_file;
    std::string method, suite = "all", target_name;
    std::vector<std::string> pin_texts;
    uint64_t prime = 0;
    unsigned n = 0, e = 0, max_e = 6, max_degree = 8;
    long long kparam = 0, lparam = 0, beta = 0;
    uint64_t max_modulus = 10;
    unsigned max_n = 5;
    double budget_seconds = 0;
    bool have_k = false, have_l = false, have_beta = false, have_e = false;

    auto* g_alpha = app.add_subcommand("g-alpha", "count irreducible subring matrices for one diagonal");
    g_alpha->add_option("--alpha", alpha_text, "diagonal exponents, e.g. 3,2")->required();
    g_alpha->add_option("--prime", prime, "prime p");
    g_alpha->add_option("--primes", prime_list, "prime list: 2,3,5 or first:K");

    auto* g_n = app.add_subcommand("g-n", "count irreducible subrings of index p^e in Z^n");
    g_n->add_option("--n", n, "dimension")->required();
    g_n->add_option("--e", e, "index exponent")->required();
    g_n->add_option("--prime", prime, "prime p");
    g_n->add_option("--primes", prime_list, "prime list");

    auto* f_n = app.add_subcommand("f-n", "count subrings of index p^e in Z^n");
    f_n->add_option("--n", n, "dimension")->required();
    f_n->add_option("--e", e, "index exponent")->required();
    f_n->add_option("--prime", prime, "prime p");
    f_n->add_option("--primes", prime_list, "prime list");
    f_n->add_option("--method", method, "recurrence|direct")
        ->check(CLI::IsMember({"recurrence", "direct"}));

    auto* subgroups = app.add_subcommand("subgroups", "count subgroups of index p^e in Z^n");
    subgroups->add_option("--n", n, "dimension")->required();
    subgroups->add_option("--e", e, "index exponent")->required();
    subgroups->add_option("--prime", prime, "prime p");
    subgroups->add_option("--primes", prime_list, "prime list");
    subgroups->add_option("--method", method, "formula|direct")
        ->check(CLI::IsMember({"formula", "direct"}));

    auto* formula = app.add_subcommand("formula", "evaluate one closed-form count");
    formula->add_option("--name", formula_name, "formula name")->required();
    formula->add_option("--prime", prime, "prime p");
    formula->add_option("--primes", prime_list, "prime list");
    formula->add_option("--n", n, "parameter n");
    formula->add_option("--k", kparam, "parameter k")->each([&](const std::string&) { have_k = true; });
    formula->add_option("--l", lparam, "parameter l")->each([&](const std::string&) { have_l = true; });
    formula->add_option("--beta", beta, "parameter beta")->each([&](const std::string&) { have_beta = true; });
    formula->add_option("--e", e, "parameter e")->each([&](const std::string&) { have_e = true; });

    auto* zeta = app.add_subcommand("zeta", "expand a local subring zeta factor");
    zeta->add_option("--n", n, "dimension, 2..4")->required();
    zeta->add_option("--prime", prime, "prime p")->required();
    zeta->add_option("--max-e", max_e, "highest index exponent");

    auto* variety = app.add_subcommand("variety", "count F_p points of a polynomial system");
    variety->add_option("--system", system_name, "builtin:NAME");
    variety->add_option("--poly-file", poly_file, "polynomial document path");
    variety->add_option("--prime", prime, "prime p");
    variety->add_option("--primes", prime_list, "prime list");

    auto* subset = app.add_subcommand("subset-census", "census enforcing chosen closure pairs");
    subset->add_option("--alpha", alpha_text, "diagonal exponents")->required();
    subset->add_option("--pairs", pairs_text, "pairs i:j,k:l (column indices)");
    subset->add_option("--pin", pin_texts, "fix one entry: i:j=value");
    subset->add_option("--prime", prime, "prime p");
    subset->add_option("--primes", prime_list, "prime list");

    auto* fit = app.add_subcommand("fit", "classify counts across primes");
    fit->add_option("--target", target_name, "g-alpha|subset-census|g-n|f-n|subgroups|variety")
        ->required();
    fit->add_option("--alpha", alpha_text, "diagonal exponents");
    fit->add_option("--pairs", pairs_text, "pairs for subset-census");
    fit->add_option("--pin", pin_texts, "pins for subset-census");
    fit->add_option("--n", n, "dimension");
    fit->add_option("--e", e, "index exponent");
    fit->add_option("--method", method, "counting method");
    fit->add_option("--system", system_name, "builtin:NAME");
    fit->add_option("--poly-file", poly_file, "polynomial document path");
    fit->add_option("--primes", prime_list, "prime list, default first:10");
    fit->add_option("--max-degree", max_degree, "highest degree tried");
    fit->add_option("--max-modulus", max_modulus, "highest residue modulus tried");

    auto* verify = app.add_subcommand("verify", "run formula-versus-census verification");
    verify->add_option("--suite", suite, "basic|lemmas|zeta|all")
        ->check(CLI::IsMember({"basic", "lemmas", "zeta", "all"}));
    verify->add_option("--max-n", max_n, "largest dimension verified");
    verify->add_option("--primes", prime_list, "prime list, default 2,3,5");
    verify->add_option("--budget-seconds", budget_seconds, "soft wall-clock cap; later checks are skipped");

    // Global options (--format, --threads, --budget) are accepted after the
    // subcommand name as well.
    for (CLI::App* sub : {g_alpha, g_n, f_n, subgroups, formula, zeta, variety, subset, fit, verify})
        sub->fallthrough();

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& help) {
        out << app.help() << "\n";
        return exit_ok;
    } catch (const CLI::ParseError& parse_err) {
        err << "error: " << parse_err.what() << "\n";
        return exit_usage;
    }

    detail::Reporter reporter(out, format == "csv");

    auto primes_or_single = [&](std::vector<uint64_t> fallback) {
        if (!prime_list.empty()) return detail::parse_primes(prime_list);
        if (prime != 0) {
            core::require_prime(prime);
            return std::vector<uint64_t>{prime};
        }
        if (!fallback.empty()) return fallback;
        throw std::invalid_argument("need --prime or --primes");
    };

    auto emit_counts = [&](const target::Target& tgt, const std::vector<uint64_t>& primes) {
        for (uint64_t p : primes) {
            detail::Stopwatch watch;
            const BigInt count = tgt.evaluate(p, options);
            const core::TargetDescriptor d = tgt.descriptor();
            reporter.emit(d.kind, detail::descriptor_params(d), p, count.str(), std::nullopt,
                          watch.ms());
        }
    };

    auto build_target = [&](const std::string& name) {
        target::Target tgt;
        if (name == "g-alpha" || name == "subset-census") {
            tgt.kind = target::Target::Kind::g_alpha;
            tgt.alpha = core::Composition::parse(alpha_text);
            if (!pairs_text.empty())
                tgt.pairs = census::PairSubset::of(detail::parse_pairs(pairs_text));
            for (const std::string& text : pin_texts) tgt.pins.push_back(detail::parse_pin(text));
        } else if (name == "g-n") {
            tgt.kind = target::Target::Kind::g_n;
            tgt.n = n;
            tgt.e = e;
        } else if (name == "f-n") {
            tgt.kind = target::Target::Kind::f_n;
            tgt.n = n;
            tgt.e = e;
            tgt.method = method == "direct" ? target::Method::direct : target::Method::recurrence;
        } else if (name == "subgroups") {
            tgt.kind = target::Target::Kind::subgroups;
            tgt.n = n;
            tgt.e = e;
            tgt.method = method == "direct" ? target::Method::direct : target::Method::formula;
        } else if (name == "variety") {
            tgt.kind = target::Target::Kind::variety;
            if (!system_name.empty()) {
                if (system_name.rfind("builtin:", 0) != 0)
                    throw std::invalid_argument("--system must look like builtin:NAME");
                tgt.system = varieties::builtin_system(system_name.substr(8));
                tgt.system_name = system_name;
            } else if (!poly_file.empty()) {
                tgt.system = varieties::load_system_file(poly_file);
                tgt.system_name = poly_file;
            } else {
                throw std::invalid_argument("variety needs --system or --poly-file");
            }
        } else {
            throw std::invalid_argument("unknown target \"" + name + "\"");
        }
        return tgt;
    };

    try {
        if (g_alpha->parsed() || subset->parsed() || g_n->parsed() || f_n->parsed() ||
            subgroups->parsed() || variety->parsed()) {
            std::string name = g_alpha->parsed()   ? "g-alpha"
                               : subset->parsed()  ? "subset-census"
                               : g_n->parsed()     ? "g-n"
                               : f_n->parsed()     ? "f-n"
                               : subgroups->parsed() ? "subgroups"
                                                     : "variety";
            emit_counts(build_target(name), primes_or_single({}));
        } else if (formula->parsed()) {
            formulas::FormulaId id{formulas::formula_name_from_string(formula_name), {}};
            if (n) id.params["n"] = n;
            if (have_k) id.params["k"] = kparam;
            if (have_l) id.params["l"] = lparam;
            if (have_beta) id.params["beta"] = beta;
            if (have_e) id.params["e"] = e;
            for (uint64_t p : primes_or_single({})) {
                detail::Stopwatch watch;
                const BigInt value = formulas::eval_formula(id, p);
                ordered_json params;
                params["name"] = formula_name;
                for (const auto& [key, v] : id.params) params[key] = v;
                reporter.emit("formula", std::move(params), p, value.str(), std::nullopt,
                              watch.ms());
            }
        } else if (zeta->parsed()) {
            detail::Stopwatch watch;
            const auto series = formulas::zeta_local_coefficients(n, prime, max_e);
            for (unsigned i = 0; i < series.size(); ++i)
                reporter.emit("zeta", {{"n", n}, {"e", i}}, prime, series[i].str(), std::nullopt,
                              watch.ms());
        } else if (fit->parsed()) {
            const target::Target tgt = build_target(target_name);
            const auto primes = prime_list.empty() ? core::first_primes(10)
                                                   : detail::parse_primes(prime_list);
            detail::Stopwatch watch;
            std::vector<fitfind::SamplePoint> points;
            try {
                const fitfind::FitReport report = fitfind::probe_polynomiality(
                    [&](uint64_t p) {
                        const BigInt count = tgt.evaluate(p, options);
                        points.push_back({p, count});
                        const core::TargetDescriptor d = tgt.descriptor();
                        reporter.emit(d.kind, detail::descriptor_params(d), p, count.str(),
                                      std::nullopt, watch.ms());
                        return count;
                    },
                    primes, max_degree, max_modulus);
                ordered_json params = detail::fit_report_json(report);
                params["target"] = tgt.descriptor().str();
                reporter.emit("fit", std::move(params), std::nullopt, std::nullopt,
                              report.verdict_str(), watch.ms());
            } catch (const fitfind::ProbeBudgetExceeded& budget_err) {
                err << "error: " << budget_err.what() << " (" << points.size()
                    << " counts completed)\n";
                return exit_budget;
            }
        } else if (verify->parsed()) {
            const auto primes = prime_list.empty() ? std::vector<uint64_t>{2, 3, 5}
                                                   : detail::parse_primes(prime_list);
            detail::VerifyRun run{reporter, options, max_n, primes, budget_seconds, {}};
            if (suite == "basic" || suite == "all") detail::verify_basic(run);
            if (suite == "lemmas" || suite == "all") detail::verify_lemmas(run);
            if (suite == "zeta" || suite == "all") detail::verify_zeta(run);
            return run.any_fail ? exit_mismatch : exit_ok;
        }
    } catch (const core::BudgetExceeded& budget_err) {
        err << "error: " << budget_err.what() << "\n";
        return exit_budget;
    } catch (const core::Cancelled&) {
        err << "error: cancelled\n";
        return 130;
    } catch (const std::exception& any) {
        err << "error: " << any.what() << "\n";
        return exit_usage;
    }
    return exit_ok;
}

}  // namespace subring::cli
