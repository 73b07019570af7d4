#include "isospec/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <sstream>

namespace isospec {

std::optional<std::filesystem::path> resolve_cache_dir(const std::optional<std::string>& flag,
                                                       const RunConfig& config) {
    if (flag && !flag->empty()) return std::filesystem::path(*flag);
    if (config.cache_dir && !config.cache_dir->empty()) return std::filesystem::path(*config.cache_dir);
    if (const char* env = std::getenv("ISOSPEC_CACHE"); env && *env) return std::filesystem::path(env);
    return std::nullopt;
}

LatticeSlice cached_slice(const GlobalLevel& level, const Conjugator& x, std::int64_t height_bound, unsigned threads,
                          const std::optional<std::filesystem::path>& cache_dir, const std::string& key,
                          bool* cache_hit) {
    if (cache_hit) *cache_hit = false;
    const std::string full = key + "|conjugated=" + (x.is_identity() ? "0" : "1") + "|height=" +
                             std::to_string(height_bound);
    const std::uint64_t h = fnv1a64(full);
    std::optional<std::filesystem::path> path;
    if (cache_dir) {
        std::ostringstream name;
        name << "slice-" << std::hex << std::setw(16) << std::setfill('0') << h << ".txt";
        path = *cache_dir / name.str();
        if (auto s = load_slice(*path, h); s && s->height_bound == height_bound) {
            if (cache_hit) *cache_hit = true;
            return *s;
        }
    }
    LatticeSlice s = enumerate_lattice(level, x, height_bound, threads);
    if (path) save_slice(*path, h, s);
    return s;
}

namespace {

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

RunReport run_pipeline(const RunConfig& config, const PipelineOptions& options) {
    Stopwatch clock;
    Json timing = Json::object();
    RunReport out;
    Json& rep = out.report;

    const QuaternionAlgebra D = make_algebra(config);
    const auto h = D.check_h1_h2();
    if (!D.ramification().is_division()) throw ConfigError("(a, b) is not a division algebra");
    if (!h.h1) throw ConfigError("hypothesis H1 fails: no finite ramified place");
    if (!h.h2) throw ConfigError("hypothesis H2 fails: D is ramified at infinity");
    const Order O = make_order(config);
    const GlobalLevel level = make_level(config, O);
    const Conjugator x = make_conjugator(config);
    const H3Report h3 = check_h3(level);
    if (!h3.pass) throw ConfigError("hypothesis H3 fails: " + h3.detail);
    rep["config"] = to_json(config);
    rep["algebra"] = algebra_json(D);
    rep["order"] = order_json(O);
    rep["hypotheses"] = {{"h1", h.h1}, {"h2", h.h2}, {"h3", h3_json(h3)}};
    timing["setup"] = clock.lap();

    const auto& e = config.enumeration;
    const std::string key = lattice_key(config);
    bool hit_k = false, hit_kx = false;
    const LatticeSlice sk = cached_slice(level, {}, e.height_bound, e.threads, options.cache_dir, key, &hit_k);
    const LatticeSlice skx = cached_slice(level, x, e.height_bound, e.threads, options.cache_dir, key, &hit_kx);
    timing["enumeration"] = clock.lap();

    const TorsionReport torsion = torsion_free_check(level, O, sk);
    rep["torsion_free"] = torsion_json(torsion);

    const SpectrumSide a{&level, {}, trace_spectrum(O, sk, e.trace_bound)};
    const SpectrumSide b{&level, x, trace_spectrum(O, skx, e.trace_bound)};
    const SpectrumComparison cmp = compare_spectra(a, b, e.margin_factor, e.threads);
    rep["spectra"] = {{"height_bound", e.height_bound},
                      {"K", {{"elements", sk.elements.size()}, {"spectrum", spectrum_json(a.spectrum)}}},
                      {"K^x", {{"elements", skx.elements.size()}, {"spectrum", spectrum_json(b.spectrum)}}}};
    rep["comparison"] = comparison_json(cmp);
    timing["spectra"] = clock.lap();

    const Certificate cert = certify(level, x, config.obstruction.radius, config.obstruction.precision);
    rep["certificate"] = certificate_json(cert);
    timing["obstruction"] = clock.lap();

    out.spectra_agree = cmp.agree;
    out.verdict = cert.verdict;
    if (config.expect_verdict) out.verdict_as_expected = cert.verdict == *config.expect_verdict;
    else out.verdict_as_expected = cert.verdict == Verdict::NonIsometric || x.is_identity();
    out.exit_code = (out.spectra_agree && out.verdict_as_expected) ? 0 : 1;

    std::string summary;
    if (!out.spectra_agree) summary = "trace spectra disagree";
    else if (!out.verdict_as_expected)
        summary = "spectra agree; certificate is " + to_string(cert.verdict) + ", expected " +
                  (config.expect_verdict ? to_string(*config.expect_verdict) : std::string("NonIsometric"));
    else summary = "spectra agree; certificate " + to_string(cert.verdict);
    rep["outcome"] = {{"spectra_agree", out.spectra_agree},
                      {"verdict", to_string(cert.verdict)},
                      {"verdict_as_expected", out.verdict_as_expected},
                      {"exit_code", out.exit_code},
                      {"summary", summary}};
    if (options.timing) {
        timing["cache_hits"] = static_cast<int>(hit_k) + static_cast<int>(hit_kx);
        rep["timing"] = timing;
    }
    return out;
}

}  // namespace isospec
