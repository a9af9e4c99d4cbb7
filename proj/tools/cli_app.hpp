#pragma once

// Command-line front end. run() parses argv, dispatches to the library and
// returns the process exit code: 0 success, 1 domain error, 2 usage error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kldiv/io.hpp"
#include "kldiv/kldiv.hpp"
#include "kldiv/verify.hpp"

namespace kldiv::cli {

enum class Format { Json, Csv, Human };

namespace detail {

inline std::string num6(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Human rendering of a tail/probability bound; values >= 1 say nothing.
inline std::string bound6(double v) { return v >= 1.0 ? num6(v) + " (vacuous)" : num6(v); }

inline std::vector<double> parse_real_list(const std::string& text, const char* what) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text.front() == '[' ? text : "[" + text + "]");
    } catch (const nlohmann::json::exception&) {
        throw CLI::ValidationError(what, "expected a JSON array or comma-separated numbers, got '" + text + "'");
    }
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw CLI::ValidationError(what, "non-numeric entry in '" + text + "'");
        out.push_back(v.get<double>());
    }
    return out;
}

inline CategoricalDist parse_dist(const std::string& text) {
    return CategoricalDist(parse_real_list(text, "--p"));
}

inline CountVector parse_counts(const std::string& text) {
    std::vector<std::uint64_t> counts;
    for (double v : parse_real_list(text, "--counts")) {
        if (v < 0 || v != std::floor(v))
            throw CLI::ValidationError("--counts", "counts must be non-negative integers");
        counts.push_back(static_cast<std::uint64_t>(v));
    }
    return CountVector(std::move(counts));
}

inline void emit_json(std::ostream& out, const std::string& kind, nlohmann::ordered_json body) {
    out << io::document(kind, std::move(body)).dump(2) << '\n';
}

inline unsigned default_threads() {
    if (const char* env = std::getenv("KLDIV_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 0;
}

}  // namespace detail

// Options shared across subcommands.
struct Options {
    Format format = Format::Human;
    std::uint64_t n = 0;
    std::vector<std::uint64_t> ns;
    std::uint64_t k = 0;
    std::vector<std::uint64_t> ks;
    double eps = 0.0;
    std::vector<double> eps_list;
    std::vector<double> eps_factors;
    double t = 0.0;
    double alpha = 0.0;
    unsigned m = 1;
    std::string p_text;
    std::string counts_text;
    std::uint64_t cap = kDefaultEnumerationCap;
    std::uint64_t seed = 0;
    std::uint64_t samples = 10000;
    unsigned threads = 0;
    std::string suite = "all";
    std::uint64_t n_max = 20;
    std::string which = "main";
    unsigned p_steps = 100;
    std::string points_csv;
    bool with_atoms = false;
};

inline int cmd_bound(const Options& o, CLI::App& sub, std::ostream& out) {
    std::uint64_t n = o.n;
    std::uint64_t k = o.k;
    double eps = o.eps;
    std::optional<double> statistic;
    if (!o.counts_text.empty()) {
        if (o.p_text.empty()) throw CLI::RequiredError("--p (required with --counts)");
        const CountVector x = detail::parse_counts(o.counts_text);
        const CategoricalDist p = detail::parse_dist(o.p_text);
        n = x.n();
        k = p.size();
        eps = empirical_divergence(x, p).nats;
        statistic = 2.0 * static_cast<double>(n) * eps;
    } else if (sub.count("--n") == 0 || sub.count("--k") == 0 || sub.count("--eps") == 0) {
        throw CLI::RequiredError("--n, --k and --eps (or --counts with --p)");
    }
    const BoundReport r = bound_report(n, k, eps);
    std::vector<std::string> vacuous;
    if (r.this_paper >= 1.0) vacuous.emplace_back("this_paper");
    if (r.method_of_types >= 1.0) vacuous.emplace_back("method_of_types");
    if (r.interpretable_mardia && *r.interpretable_mardia >= 1.0) vacuous.emplace_back("interpretable_mardia");

    switch (o.format) {
        case Format::Json: {
            auto body = io::to_json(r);
            body["vacuous"] = vacuous;
            if (statistic) body["likelihood_ratio_statistic"] = *statistic;
            detail::emit_json(out, "bound_report", std::move(body));
            break;
        }
        case Format::Csv:
            out << io::kBoundCsvHeader << '\n';
            io::write_bound_row(out, r);
            break;
        case Format::Human:
            out << "n = " << n << ", k = " << k << ", eps = " << detail::num6(eps) << '\n';
            if (statistic) out << "likelihood-ratio statistic 2nV = " << detail::num6(*statistic) << '\n';
            out << "  this_paper            " << detail::bound6(r.this_paper) << '\n';
            out << "  method_of_types       " << detail::bound6(r.method_of_types) << '\n';
            out << "  interpretable_mardia  "
                << (r.interpretable_mardia ? detail::bound6(*r.interpretable_mardia) : std::string("n/a (needs 3 <= k <= n)"))
                << '\n';
            out << "  tightest: " << to_string(r.tightest) << '\n';
            break;
    }
    return 0;
}

inline int cmd_mgf(const Options& o, std::ostream& out) {
    std::uint64_t k = o.k;
    std::optional<CategoricalDist> p;
    if (!o.p_text.empty()) {
        p = detail::parse_dist(o.p_text);
        if (k != 0 && k != p->size())
            throw CLI::ValidationError("--k", "--k disagrees with the length of --p");
        k = p->size();
    }
    if (k == 0) throw CLI::RequiredError("--k (or --p)");
    const double bound = mgf_bound(o.n, k, o.t);
    const double x = o.t / static_cast<double>(o.n);
    const double asymptotic = std::exp(-0.5 * static_cast<double>(k - 1) * std::log1p(-x));
    std::optional<double> exact;
    if (p) exact = exact_mgf(o.n, *p, o.t, o.cap);

    switch (o.format) {
        case Format::Json: {
            nlohmann::ordered_json j;
            j["n"] = o.n;
            j["k"] = k;
            j["t"] = o.t;
            j["mgf_bound"] = bound;
            j["gamma_shape"] = k - 1;
            j["gamma_rate"] = o.n;
            j["asymptotic_chi2"] = asymptotic;
            j["exact"] = exact ? nlohmann::ordered_json(*exact) : nlohmann::ordered_json(nullptr);
            detail::emit_json(out, "mgf", std::move(j));
            break;
        }
        case Format::Csv:
            out << "n,k,t,mgf_bound,asymptotic_chi2,exact\n"
                << o.n << ',' << k << ',' << io::num17(o.t) << ',' << io::num17(bound) << ','
                << io::num17(asymptotic) << ',' << (exact ? io::num17(*exact) : std::string()) << '\n';
            break;
        case Format::Human:
            out << "E[exp(t V)] <= " << detail::num6(bound) << "  (Gamma(shape " << k - 1 << ", rate " << o.n
                << ") MGF at t = " << detail::num6(o.t) << ")\n";
            out << "large-n limit:  " << detail::num6(asymptotic) << '\n';
            if (exact) out << "exact:          " << detail::num6(*exact) << '\n';
            break;
    }
    return 0;
}

inline int cmd_threshold(const Options& o, std::ostream& out) {
    const double eps = critical_epsilon(o.n, o.k, o.alpha);
    const double achieved = tail_bound(o.n, o.k, eps);
    const double boundary = tail_region_boundary(o.n, o.k);
    const double mot = method_of_types_threshold(o.n, o.k);
    switch (o.format) {
        case Format::Json: {
            nlohmann::ordered_json j;
            j["n"] = o.n;
            j["k"] = o.k;
            j["alpha"] = o.alpha;
            j["eps"] = eps;
            j["tail_bound_at_eps"] = achieved;
            j["region_boundary"] = boundary;
            j["method_of_types_meaningful_above"] = mot;
            detail::emit_json(out, "threshold", std::move(j));
            break;
        }
        case Format::Csv:
            out << "n,k,alpha,eps,tail_bound_at_eps,region_boundary\n"
                << o.n << ',' << o.k << ',' << io::num17(o.alpha) << ',' << io::num17(eps) << ','
                << io::num17(achieved) << ',' << io::num17(boundary) << '\n';
            break;
        case Format::Human:
            out << "reject when V >= " << detail::num6(eps) << " (level " << detail::num6(o.alpha) << ")\n";
            out << "  equivalently 2nV >= " << detail::num6(2.0 * static_cast<double>(o.n) * eps) << '\n';
            out << "  tail bound valid for eps > " << detail::num6(boundary)
                << "; method of types meaningful only above " << detail::num6(mot) << '\n';
            break;
    }
    return 0;
}

inline int cmd_samplesize(const Options& o, std::ostream& out) {
    const std::uint64_t n = sample_size(o.k, o.eps, o.alpha);
    const double achieved = tail_bound(n, o.k, o.eps);
    switch (o.format) {
        case Format::Json: {
            nlohmann::ordered_json j;
            j["k"] = o.k;
            j["eps"] = o.eps;
            j["alpha"] = o.alpha;
            j["n"] = n;
            j["tail_bound_at_n"] = achieved;
            detail::emit_json(out, "sample_size", std::move(j));
            break;
        }
        case Format::Csv:
            out << "k,eps,alpha,n,tail_bound_at_n\n"
                << o.k << ',' << io::num17(o.eps) << ',' << io::num17(o.alpha) << ',' << n << ','
                << io::num17(achieved) << '\n';
            break;
        case Format::Human:
            out << "n = " << n << " samples (tail bound " << detail::num6(achieved) << ")\n";
            break;
    }
    return 0;
}

inline int cmd_exact(const Options& o, CLI::App& sub, std::ostream& out) {
    const CategoricalDist p = detail::parse_dist(o.p_text);
    const ExactDistribution dist = enumerate_divergence_distribution(o.n, p, o.cap);
    const bool has_eps = sub.count("--eps") > 0;
    const bool has_t = sub.count("--t") > 0;
    const double mean = exact_mean_divergence(dist);
    std::optional<double> tail, mgf;
    if (has_eps) tail = exact_tail(dist, o.eps);
    if (has_t) mgf = exact_mgf(dist, o.t);

    switch (o.format) {
        case Format::Json: {
            nlohmann::ordered_json j;
            j["n"] = dist.n;
            j["k"] = dist.k;
            j["p"] = io::to_json(p);
            j["atoms"] = dist.atoms.size();
            j["total_probability"] = dist.total_probability();
            j["mean"] = mean;
            if (tail) {
                j["eps"] = o.eps;
                j["tail"] = *tail;
            }
            if (mgf) {
                j["t"] = o.t;
                j["mgf"] = *mgf;
            }
            if (o.with_atoms) {
                auto& arr = j["atom_list"] = nlohmann::ordered_json::array();
                for (const Atom& a : dist.atoms) arr.push_back({io::json_number(a.value.nats), a.prob});
            }
            detail::emit_json(out, "exact_distribution", std::move(j));
            break;
        }
        case Format::Csv:
            io::write_atoms_csv(out, dist);
            break;
        case Format::Human:
            out << dist.atoms.size() << " atoms, total probability " << detail::num6(dist.total_probability())
                << '\n';
            out << "E[V] = " << detail::num6(mean) << "  (Paninski bound " << detail::num6(paninski_mean_bound(dist.n, dist.k))
                << ")\n";
            if (tail) out << "P[V >= " << detail::num6(o.eps) << "] = " << detail::num6(*tail) << '\n';
            if (mgf) out << "E[exp(" << detail::num6(o.t) << " V)] = " << detail::num6(*mgf) << '\n';
            break;
    }
    return 0;
}

inline int cmd_moments(const Options& o, std::ostream& out) {
    const CategoricalDist p = detail::parse_dist(o.p_text);
    std::vector<MomentReport> rows;
    std::vector<std::uint64_t> ns = o.ns;
    std::sort(ns.begin(), ns.end());
    for (std::uint64_t n : ns) rows.push_back(moment_report(enumerate_divergence_distribution(n, p, o.cap), o.m));

    switch (o.format) {
        case Format::Json: {
            nlohmann::ordered_json j;
            auto& arr = j["rows"] = nlohmann::ordered_json::array();
            for (const auto& r : rows) arr.push_back(io::to_json(r));
            detail::emit_json(out, "moments", std::move(j));
            break;
        }
        case Format::Csv:
            out << io::kMomentCsvHeader << '\n';
            for (const auto& r : rows) io::write_moment_row(out, r);
            break;
        case Format::Human:
            for (const auto& r : rows)
                out << "n = " << r.n << ": E[(2nV)^" << r.m << "] = " << detail::num6(r.raw_moment)
                    << " (chi2 limit " << detail::num6(r.chi2_target_raw) << "), central "
                    << detail::num6(r.central_moment) << " (limit " << detail::num6(r.chi2_target_central) << ")\n";
            break;
    }
    return 0;
}

inline int cmd_mc(const Options& o, CLI::App& sub, std::ostream& out) {
    const CategoricalDist p = detail::parse_dist(o.p_text);
    const bool tail_mode = sub.count("--eps") > 0;
    const unsigned threads = o.threads ? o.threads : detail::default_threads();
    const mc::McEstimate e = tail_mode ? mc::estimate_tail(o.n, p, o.eps, o.samples, o.seed, threads)
                                       : mc::estimate_moment(o.n, p, o.m, o.samples, o.seed, threads);
    const double key = tail_mode ? o.eps : static_cast<double>(o.m);
    switch (o.format) {
        case Format::Json: {
            auto j = io::to_json(e);
            j["n"] = o.n;
            j["k"] = p.size();
            j["query"] = tail_mode ? "tail" : "moment";
            j["eps_or_m"] = key;
            if (tail_mode && o.eps > tail_region_boundary(o.n, p.size()))
                j["tail_bound"] = tail_bound(o.n, p.size(), o.eps);
            detail::emit_json(out, "mc_estimate", std::move(j));
            break;
        }
        case Format::Csv:
            out << io::kMcCsvHeader << '\n';
            io::write_mc_row(out, o.n, p.size(), key, e);
            break;
        case Format::Human:
            out << (tail_mode ? "P[V >= eps] ~ " : "E[(2nV)^m] ~ ") << detail::num6(e.point) << "  95% CI ["
                << detail::num6(e.ci_low) << ", " << detail::num6(e.ci_high) << "]  (" << e.samples
                << " samples, seed " << e.seed << ")\n";
            break;
    }
    return 0;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
    const auto results = verify::run_suite(o.suite, o.n_max, o.cap);
    const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    switch (o.format) {
        case Format::Json: {
            nlohmann::ordered_json j;
            j["suite"] = o.suite;
            j["n_max"] = o.n_max;
            j["passed"] = ok;
            auto& arr = j["checks"] = nlohmann::ordered_json::array();
            for (const auto& r : results)
                arr.push_back({{"name", r.name}, {"cases", r.cases}, {"worst_slack", io::json_number(r.worst_slack)},
                               {"passed", r.passed}});
            detail::emit_json(out, "verify", std::move(j));
            break;
        }
        case Format::Csv:
            out << "check,cases,worst_slack,passed\n";
            for (const auto& r : results)
                out << '"' << r.name << "\"," << r.cases << ',' << io::num17(r.worst_slack) << ','
                    << (r.passed ? "true" : "false") << '\n';
            break;
        case Format::Human:
            for (const auto& r : results)
                out << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.cases << " cases, worst slack "
                    << detail::num6(r.worst_slack) << ")\n";
            break;
    }
    return ok ? 0 : 1;
}

inline int cmd_conjecture(const Options& o, std::ostream& out) {
    const ScanGrid grid = ScanGrid::standard(o.n_max, o.p_steps);
    std::ofstream points;
    PointSink sink;
    if (!o.points_csv.empty()) {
        points.open(o.points_csv);
        if (!points) throw DomainError("cannot open '" + o.points_csv + "' for writing");
        points << io::kScanCsvHeader << '\n';
        sink = [&points](const ScanPoint& pt) { io::write_scan_row(points, pt); };
    }
    ScanResult r;
    if (o.which == "main")
        r = scan_conjecture_main(grid, sink);
    else if (o.which == "half")
        r = scan_conjecture_half(grid, sink);
    else
        r = scan_naive_asymptotic(grid, sink);

    switch (o.format) {
        case Format::Json:
            detail::emit_json(out, "scan_result", io::to_json(r));
            break;
        case Format::Csv:
            out << "n,worst_margin\n";
            for (const auto& [n, m] : r.worst_by_n) out << n << ',' << io::num17(m) << '\n';
            break;
        case Format::Human:
            out << "conjecture '" << r.conjecture << "' over " << r.points << " points (" << r.grid_spec << ")\n";
            out << "worst margin " << detail::num6(r.worst_margin) << " at (n, p, x) = (" << r.worst_point.n << ", "
                << detail::num6(r.worst_point.p) << ", " << detail::num6(r.worst_point.x) << ")\n";
            out << r.counterexamples.size() << " counterexamples, " << r.tight_points.size() << " tight points\n";
            break;
    }
    return 0;
}

inline int cmd_compare(const Options& o, std::ostream& out) {
    struct Row {
        std::uint64_t n, k;
        double eps;
        std::optional<double> this_paper;
        double method_of_types;
        std::optional<double> mardia;
        std::string tightest;
        std::optional<double> exact;
    };
    std::vector<std::tuple<std::uint64_t, std::uint64_t, double>> keys;
    for (std::uint64_t n : o.ns)
        for (std::uint64_t k : o.ks) {
            for (double e : o.eps_list) keys.emplace_back(n, k, e);
            for (double f : o.eps_factors) keys.emplace_back(n, k, f * tail_region_boundary(n, k));
        }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    std::map<std::pair<std::uint64_t, std::uint64_t>, std::optional<ExactDistribution>> cache;
    std::vector<Row> rows;
    for (const auto& [n, k, eps] : keys) {
        Row row{n, k, eps, std::nullopt, method_of_types_bound(n, k, eps), interpretable_mardia_bound(n, k, eps), "", std::nullopt};
        double best = log_method_of_types_bound(n, k, eps);
        row.tightest = to_string(BoundKind::MethodOfTypes);
        if (eps > tail_region_boundary(n, k)) {
            row.this_paper = tail_bound(n, k, eps);
            const double lt = log_tail_bound(n, k, eps);
            if (lt < best) {
                best = lt;
                row.tightest = to_string(BoundKind::MgfTail);
            }
        }
        if (const auto lm = log_interpretable_mardia_bound(n, k, eps); lm && *lm < best)
            row.tightest = to_string(BoundKind::InterpretableMardia);
        auto [it, inserted] = cache.try_emplace({n, k});
        if (inserted && numeric::composition_count(n, k) <= static_cast<double>(o.cap))
            it->second = enumerate_divergence_distribution(n, CategoricalDist::uniform(k), o.cap);
        if (it->second) row.exact = exact_tail(*it->second, eps);
        rows.push_back(row);
    }

    auto cell = [](const std::optional<double>& v) { return v ? io::num17(*v) : std::string(); };
    switch (o.format) {
        case Format::Json: {
            nlohmann::ordered_json j;
            auto& arr = j["rows"] = nlohmann::ordered_json::array();
            auto opt = [](const std::optional<double>& v) {
                return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
            };
            for (const auto& r : rows)
                arr.push_back({{"n", r.n}, {"k", r.k}, {"eps", r.eps}, {"this_paper", opt(r.this_paper)},
                               {"method_of_types", r.method_of_types}, {"interpretable_mardia", opt(r.mardia)},
                               {"tightest", r.tightest}, {"exact_tail_uniform", opt(r.exact)}});
            detail::emit_json(out, "compare", std::move(j));
            break;
        }
        case Format::Csv:
            out << "n,k,eps,this_paper,method_of_types,interpretable_mardia,tightest,exact_tail_uniform\n";
            for (const auto& r : rows)
                out << r.n << ',' << r.k << ',' << io::num17(r.eps) << ',' << cell(r.this_paper) << ','
                    << io::num17(r.method_of_types) << ',' << cell(r.mardia) << ',' << r.tightest << ','
                    << cell(r.exact) << '\n';
            break;
        case Format::Human:
            for (const auto& r : rows) {
                out << "n=" << r.n << " k=" << r.k << " eps=" << detail::num6(r.eps)
                    << "  this_paper=" << (r.this_paper ? detail::bound6(*r.this_paper) : std::string("n/a"))
                    << "  method_of_types=" << detail::bound6(r.method_of_types)
                    << "  mardia=" << (r.mardia ? detail::bound6(*r.mardia) : std::string("n/a"));
                if (r.exact) out << "  exact(U_k)=" << detail::num6(*r.exact);
                out << '\n';
            }
            break;
    }
    return 0;
}

/// Parses args (without the program name) and runs one subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-sample concentration bounds for the empirical KL divergence", "kldiv"};
    app.require_subcommand(1, 1);
    Options o;

    const std::map<std::string, Format> formats{{"json", Format::Json}, {"csv", Format::Csv}, {"human", Format::Human}};
    auto add_format = [&](CLI::App* s) {
        s->add_option("--format", o.format, "output format: json, csv or human")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    };
    auto add_n = [&](CLI::App* s, bool required) {
        auto* opt = s->add_option("--n", o.n, "number of samples (>= 1)")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 53));
        if (required) opt->required();
    };
    auto add_k = [&](CLI::App* s, bool required) {
        auto* opt = s->add_option("--k", o.k, "alphabet size (>= 2)")->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 40));
        if (required) opt->required();
    };
    auto add_cap = [&](CLI::App* s) {
        s->add_option("--cap", o.cap, "maximum number of enumerated atoms")->check(CLI::PositiveNumber);
    };
    auto add_p = [&](CLI::App* s, bool required) {
        auto* opt = s->add_option("--p", o.p_text, "null distribution, e.g. [0.2,0.3,0.5] or 0.2,0.3,0.5");
        if (required) opt->required();
    };

    auto* bound = app.add_subcommand("bound", "tail bounds at (n, k, eps), or at the divergence of observed counts");
    add_n(bound, false);
    add_k(bound, false);
    bound->add_option("--eps", o.eps, "divergence threshold in nats (> 0)")->check(CLI::PositiveNumber);
    bound->add_option("--counts", o.counts_text, "observed counts, e.g. [3,1]");
    add_p(bound, false);
    add_format(bound);

    auto* mgf = app.add_subcommand("mgf", "MGF bound (1 - t/n)^-(k-1), optionally with the exact MGF");
    add_n(mgf, true);
    add_k(mgf, false);
    mgf->add_option("--t", o.t, "MGF argument in [0, n)")->required()->check(CLI::NonNegativeNumber);
    add_p(mgf, false);
    add_cap(mgf);
    add_format(mgf);

    auto* threshold = app.add_subcommand("threshold", "critical divergence eps with tail bound equal to alpha");
    add_n(threshold, true);
    add_k(threshold, true);
    threshold->add_option("--alpha", o.alpha, "significance level in (0, 1)")->required()->check(CLI::Range(0.0, 1.0));
    add_format(threshold);

    auto* samplesize = app.add_subcommand("samplesize", "samples needed for tail bound <= alpha at eps");
    add_k(samplesize, true);
    samplesize->add_option("--eps", o.eps, "divergence threshold in nats (> 0)")->required()->check(CLI::PositiveNumber);
    samplesize->add_option("--alpha", o.alpha, "significance level in (0, 1)")->required()->check(CLI::Range(0.0, 1.0));
    add_format(samplesize);

    auto* exact = app.add_subcommand("exact", "exact distribution of V by enumeration");
    add_n(exact, true);
    add_p(exact, true);
    exact->add_option("--eps", o.eps, "also report P[V >= eps]")->check(CLI::NonNegativeNumber);
    exact->add_option("--t", o.t, "also report E[exp(t V)]")->check(CLI::NonNegativeNumber);
    exact->add_flag("--with-atoms", o.with_atoms, "include the atom list in JSON output");
    add_cap(exact);
    add_format(exact);

    auto* moments = app.add_subcommand("moments", "exact moments of 2nV and their chi-squared limits");
    moments->add_option("--n", o.ns, "sample counts, e.g. 10,40,160")->required()->delimiter(',')->check(CLI::PositiveNumber);
    add_p(moments, true);
    moments->add_option("--m", o.m, "moment order in [1, 20]")->check(CLI::Range(1u, kMaxMomentOrder));
    add_cap(moments);
    add_format(moments);

    auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of a tail (--eps) or moment (--m)");
    add_n(mc, true);
    add_p(mc, true);
    auto* mc_eps = mc->add_option("--eps", o.eps, "tail threshold")->check(CLI::NonNegativeNumber);
    auto* mc_m = mc->add_option("--m", o.m, "moment order in [1, 20]")->check(CLI::Range(1u, kMaxMomentOrder));
    mc_eps->excludes(mc_m);
    mc->add_option("--samples", o.samples, "number of draws (>= 100)")->check(CLI::Range(std::uint64_t{100}, std::uint64_t{1} << 40));
    mc->add_option("--seed", o.seed, "64-bit seed");
    mc->add_option("--threads", o.threads, "worker threads (0: KLDIV_THREADS or hardware)");
    add_format(mc);

    auto* verify = app.add_subcommand("verify", "numerical checks of the bounds and identities");
    verify->add_option("--suite", o.suite, "lemmas, bounds, moments, conjectures or all")
        ->check(CLI::IsMember({"lemmas", "bounds", "moments", "conjectures", "all"}));
    verify->add_option("--n-max", o.n_max, "largest n checked (enumeration sweeps stop at 12)")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{400}));
    add_cap(verify);
    add_format(verify);

    auto* conjecture = app.add_subcommand("conjecture", "scan a conjectured binomial MGF bound over a grid");
    conjecture->add_option("--which", o.which, "main, half or naive")->check(CLI::IsMember({"main", "half", "naive"}));
    conjecture->add_option("--n-max", o.n_max, "largest n in the grid")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{2000}));
    conjecture->add_option("--p-steps", o.p_steps, "p grid resolution")->check(CLI::Range(1u, 10000u));
    conjecture->add_option("--points-csv", o.points_csv, "write every grid point to this CSV file");
    add_format(conjecture);

    auto* compare = app.add_subcommand("compare", "sweep all bounds over (n, k, eps)");
    compare->add_option("--n", o.ns, "sample counts")->required()->delimiter(',')->check(CLI::PositiveNumber);
    compare->add_option("--k", o.ks, "alphabet sizes")->required()->delimiter(',')->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 40));
    compare->add_option("--eps", o.eps_list, "thresholds")->delimiter(',')->check(CLI::PositiveNumber);
    compare->add_option("--eps-factor", o.eps_factors, "thresholds as multiples of (k-1)/n")->delimiter(',')->check(CLI::PositiveNumber);
    compare->add_option("--cap", o.cap, "enumeration cap for the exact column")->check(CLI::PositiveNumber);
    add_format(compare);

    // CLI11 parses in reverse order from a vector.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*bound) return cmd_bound(o, *bound, out);
        if (*mgf) return cmd_mgf(o, out);
        if (*threshold) return cmd_threshold(o, out);
        if (*samplesize) return cmd_samplesize(o, out);
        if (*exact) return cmd_exact(o, *exact, out);
        if (*moments) return cmd_moments(o, out);
        if (*mc) {
            if (mc->count("--eps") == 0 && mc->count("--m") == 0) throw CLI::RequiredError("--eps or --m");
            return cmd_mc(o, *mc, out);
        }
        if (*verify) return cmd_verify(o, out);
        if (*conjecture) return cmd_conjecture(o, out);
        if (*compare) {
            if (o.eps_list.empty() && o.eps_factors.empty()) throw CLI::RequiredError("--eps or --eps-factor");
            return cmd_compare(o, out);
        }
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const OutOfRegionError& e) {
        err << "error: " << e.what() << " (valid region: eps > " << io::num17(e.boundary()) << ")\n";
        return 1;
    } catch (const EnumerationTooLarge& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace kldiv::cli
