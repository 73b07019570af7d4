// isospec: command-line front end.
//
// Exit codes: 0 success, 1 scientific mismatch, 2 usage or configuration error.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "isospec/pipeline.hpp"

using namespace isospec;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kUsage = 2;

struct Globals {
    std::string config_path;
    std::optional<std::string> cache_dir;
    std::optional<std::string> output;
};

RunConfig load(const Globals& g) {
    RunConfig c = g.config_path.empty() ? RunConfig{} : load_run_config(g.config_path);
    if (g.output) {
        if (*g.output != "json" && *g.output != "text") throw ConfigError("--output must be json or text");
        c.output = *g.output;
    }
    return c;
}

void emit(const Json& report, const std::string& format) {
    if (format == "text") std::cout << render_text(report);
    else std::cout << report.dump(2) << "\n";
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("'" + s + "' is not a comma-separated list of integers");
        }
    }
    return out;
}

struct Context {
    RunConfig config;
    QuaternionAlgebra algebra;
    Order order;
    GlobalLevel level;
    Conjugator x;

    explicit Context(RunConfig c)
        : config(std::move(c)),
          algebra(make_algebra(config)),
          order(make_order(config)),
          level(make_level(config, order)),
          x(make_conjugator(config)) {}
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"isospec: isospectral, non-isometric arithmetic lattices from quaternion algebras"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--cache-dir", g.cache_dir, "Slice cache directory (default: $ISOSPEC_CACHE)");
    app.add_option("--output", g.output, "Report format: json or text");

    int exit_code = kOk;
    std::function<void()> action;

    // algebra info
    auto* algebra = app.add_subcommand("algebra", "Quaternion algebra commands")->require_subcommand(1);
    std::optional<std::string> a_flag, b_flag;
    auto* info = algebra->add_subcommand("info", "Ramification, discriminant and hypotheses H1/H2");
    info->add_option("--a", a_flag, "Override a");
    info->add_option("--b", b_flag, "Override b");
    info->callback([&] {
        action = [&] {
            RunConfig c = load(g);
            if (a_flag) c.a = parse_rational(Json(*a_flag));
            if (b_flag) c.b = parse_rational(Json(*b_flag));
            const QuaternionAlgebra D = make_algebra(c);
            if (!D.ramification().is_division()) throw ConfigError("(a, b) is not a division algebra");
            emit(algebra_json(D), c.output);
        };
    });

    // order maximalize
    auto* order = app.add_subcommand("order", "Order commands")->require_subcommand(1);
    auto* maxim = order->add_subcommand("maximalize", "Maximal order containing the configured order");
    maxim->callback([&] {
        action = [&] {
            const RunConfig c = load(g);
            const QuaternionAlgebra D = make_algebra(c);
            const Order start = c.order ? verify_order(D, *c.order) : standard_order(D);
            const Order big = make_order(c);
            Json r{{"input", order_json(start)}, {"maximal", order_json(big)},
                   {"index", rational_json(Rat(lattice_index(big, start)))}};
            emit(r, c.output);
        };
    });

    // lattice enumerate
    auto* lattice = app.add_subcommand("lattice", "Lattice commands")->require_subcommand(1);
    std::optional<std::int64_t> height, trace_bound;
    bool conjugated = false, list = false;
    auto* enumerate = lattice->add_subcommand("enumerate", "Enumerate Gamma_K (or Gamma_{K^x}) up to a height bound");
    enumerate->add_option("--height", height, "Height bound (overrides the config)");
    enumerate->add_option("--trace-bound", trace_bound, "Trace bound for the spectrum");
    enumerate->add_flag("--conjugated", conjugated, "Enumerate Gamma_{K^x} instead of Gamma_K");
    enumerate->add_flag("--list", list, "Include every element in the report");
    enumerate->callback([&] {
        action = [&] {
            RunConfig c = load(g);
            if (height) c.enumeration.height_bound = *height;
            if (trace_bound) c.enumeration.trace_bound = *trace_bound;
            const Context ctx(c);
            const auto cache = resolve_cache_dir(g.cache_dir, c);
            const LatticeSlice s = cached_slice(ctx.level, conjugated ? ctx.x : Conjugator{}, c.enumeration.height_bound,
                                                c.enumeration.threads, cache, lattice_key(c));
            Json r{{"height_bound", s.height_bound}, {"conjugated", s.conjugated}, {"elements", s.elements.size()}};
            r["spectrum"] = spectrum_json(trace_spectrum(ctx.order, s, c.enumeration.trace_bound));
            r["torsion_free"] = torsion_json(torsion_free_check(ctx.level, ctx.order, s));
            if (list) {
                Json all = Json::array();
                for (const auto& e : s.elements) all.push_back(coords_json(e));
                r["list"] = all;
            }
            emit(r, c.output);
        };
    });

    // spectrum compare
    auto* spectrum = app.add_subcommand("spectrum", "Spectrum commands")->require_subcommand(1);
    std::optional<int> margin;
    auto* compare = spectrum->add_subcommand("compare", "Compare the trace sets of Gamma_K and Gamma_{K^x}");
    compare->add_option("--height", height, "Height bound");
    compare->add_option("--trace-bound", trace_bound, "Trace bound");
    compare->add_option("--margin", margin, "Re-search factor for one-sided values");
    compare->callback([&] {
        action = [&] {
            RunConfig c = load(g);
            if (height) c.enumeration.height_bound = *height;
            if (trace_bound) c.enumeration.trace_bound = *trace_bound;
            if (margin) c.enumeration.margin_factor = *margin;
            const Context ctx(c);
            const auto cache = resolve_cache_dir(g.cache_dir, c);
            const auto& e = c.enumeration;
            const auto sk = cached_slice(ctx.level, {}, e.height_bound, e.threads, cache, lattice_key(c));
            const auto skx = cached_slice(ctx.level, ctx.x, e.height_bound, e.threads, cache, lattice_key(c));
            const SpectrumSide a{&ctx.level, {}, trace_spectrum(ctx.order, sk, e.trace_bound)};
            const SpectrumSide b{&ctx.level, ctx.x, trace_spectrum(ctx.order, skx, e.trace_bound)};
            const auto cmp = compare_spectra(a, b, e.margin_factor, e.threads);
            Json r{{"K", spectrum_json(a.spectrum)}, {"K^x", spectrum_json(b.spectrum)}, {"comparison", comparison_json(cmp)}};
            emit(r, c.output);
            if (!cmp.agree) exit_code = kMismatch;
        };
    });

    // obstruction certify
    auto* obstruction = app.add_subcommand("obstruction", "Obstruction commands")->require_subcommand(1);
    std::optional<int> radius, precision;
    auto* cert = obstruction->add_subcommand("certify", "Reduced-norm non-isometry certificate for the conjugator");
    cert->add_option("--radius", radius, "Tree search radius");
    cert->add_option("--precision", precision, "p-adic precision for exhaustive searches");
    cert->callback([&] {
        action = [&] {
            RunConfig c = load(g);
            if (radius) c.obstruction.radius = *radius;
            if (precision) c.obstruction.precision = *precision;
            const Context ctx(c);
            const Certificate certificate = certify(ctx.level, ctx.x, c.obstruction.radius, c.obstruction.precision);
            emit(certificate_json(certificate), c.output);
            if (c.expect_verdict && certificate.verdict != *c.expect_verdict) exit_code = kMismatch;
        };
    });

    // mult verify
    auto* mult = app.add_subcommand("mult", "Multiplicity identity commands")->require_subcommand(1);
    int max_places = 5;
    std::string d_list = "1,2,4";
    std::string datum_path;
    auto* verify = mult->add_subcommand("verify", "Exhaustive check of the multiplicity-matching identity");
    verify->add_option("--max-places", max_places, "Largest number of active places")->check(CLI::Range(2, 8));
    verify->add_option("--d", d_list, "Comma-separated values of d");
    verify->add_option("--datum", datum_path, "Check one hand-written datum (JSON) instead of sweeping")
        ->check(CLI::ExistingFile);
    verify->callback([&] {
        action = [&] {
            const std::string format = g.output.value_or("json");
            if (format != "json" && format != "text") throw ConfigError("--output must be json or text");
            if (!datum_path.empty()) {
                std::ifstream in(datum_path);
                Json j;
                try {
                    j = Json::parse(in);
                } catch (const nlohmann::json::parse_error& e) {
                    throw ConfigError(datum_path + ": " + e.what());
                }
                const DihedralDatum datum = parse_datum(j);
                const KDatum k = parse_kdatum(j.value("k", Json()));
                std::vector<int> flips;
                for (const auto& f : j.value("flips", Json::array())) flips.push_back(f.get<int>());
                const auto r = verify_identity(datum, k, flips);
                emit(identity_json(r), format);
                if (!r.equal || !r.witness_ok) exit_code = kMismatch;
                return;
            }
            SweepOptions o;
            o.max_places = max_places;
            o.d_values = parse_int_list(d_list);
            const auto r = sweep(o);
            emit(sweep_json(r), format);
            if (r.violations || r.witness_failures || r.negative_multiplicities || r.injectivity_failures)
                exit_code = kMismatch;
        };
    });

    // demo
    bool timing = false;
    auto* demo = app.add_subcommand("demo", "Full pipeline: hypotheses, spectra, comparison and certificate");
    demo->add_flag("--timing", timing, "Include stage timings in the report");
    demo->callback([&] {
        action = [&] {
            const RunConfig c = load(g);
            PipelineOptions opt;
            opt.cache_dir = resolve_cache_dir(g.cache_dir, c);
            opt.timing = timing;
            const RunReport r = run_pipeline(c, opt);
            emit(r.report, c.output);
            exit_code = r.exit_code;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (action) action();
    } catch (const Error& e) {
        std::cerr << "isospec: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "isospec: " << e.what() << "\n";
        return kUsage;
    }
    return exit_code;
}
