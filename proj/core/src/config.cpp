#include "isospec/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace isospec {

namespace {

void require_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
T get_int(const Json& j, const std::string& what) {
    if (!j.is_number_integer()) throw ConfigError(what + " must be an integer");
    return j.get<T>();
}

double round10(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return std::stod(buf);
}

}  // namespace

Rat parse_rational(const Json& j) {
    if (j.is_number_integer()) return Rat(Integer(j.get<long>()));
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        Rat r;
        if (s.empty() || r.set_str(s, 10) != 0 || r.get_den() == 0)
            throw ConfigError("'" + s + "' is not a rational number");
        r.canonicalize();
        return r;
    }
    throw ConfigError("expected an integer or a string \"p/q\"");
}

Json rational_json(const Rat& r) {
    if (r.get_den() == 1 && r.get_num().fits_slong_p()) return r.get_num().get_si();
    return r.get_str();
}

RunConfig parse_run_config(const Json& j) {
    require_keys(j, "config",
                 {"algebra", "order", "v0", "locals", "conjugator", "enumeration", "obstruction", "cache_dir", "output",
                  "expect_verdict"});
    RunConfig c;
    if (j.contains("algebra")) {
        const auto& a = j["algebra"];
        require_keys(a, "algebra", {"a", "b"});
        if (!a.contains("a") || !a.contains("b")) throw ConfigError("algebra needs both a and b");
        c.a = parse_rational(a["a"]);
        c.b = parse_rational(a["b"]);
    }
    if (j.contains("order")) {
        const auto& o = j["order"];
        if (!o.is_array() || o.size() != 4) throw ConfigError("order must list four basis elements");
        std::array<QuatElement, 4> basis;
        for (std::size_t r = 0; r < 4; ++r) {
            if (!o[r].is_array() || o[r].size() != 4) throw ConfigError("order rows need four rational coordinates");
            for (std::size_t s = 0; s < 4; ++s) basis[r].x[s] = parse_rational(o[r][s]);
        }
        c.order = basis;
    }
    if (j.contains("v0")) c.v0 = get_int<std::int64_t>(j["v0"], "v0");
    if (j.contains("locals")) {
        if (!j["locals"].is_array()) throw ConfigError("locals must be a list");
        for (const auto& l : j["locals"]) {
            require_keys(l, "locals entry", {"p", "kind", "k"});
            if (!l.contains("p") || !l.contains("kind")) throw ConfigError("locals entries need p and kind");
            LocalLevel level;
            level.p = get_int<std::int64_t>(l["p"], "locals.p");
            if (!l["kind"].is_string()) throw ConfigError("locals.kind must be a string");
            level.kind = parse_level_kind(l["kind"].get<std::string>());
            level.k = l.contains("k") ? get_int<int>(l["k"], "locals.k") : 0;
            c.locals.push_back(level);
        }
    }
    if (j.contains("conjugator")) {
        if (!j["conjugator"].is_array()) throw ConfigError("conjugator must be a list");
        for (const auto& x : j["conjugator"]) {
            require_keys(x, "conjugator entry", {"p", "matrix", "element"});
            if (!x.contains("p")) throw ConfigError("conjugator entries need p");
            LocalConjugator lc;
            lc.p = get_int<std::int64_t>(x["p"], "conjugator.p");
            if (x.contains("matrix") == x.contains("element"))
                throw ConfigError("conjugator entry needs exactly one of matrix and element");
            if (x.contains("matrix")) {
                const auto& m = x["matrix"];
                if (!m.is_array() || m.size() != 2 || !m[0].is_array() || !m[1].is_array() || m[0].size() != 2 ||
                    m[1].size() != 2)
                    throw ConfigError("conjugator matrix must be [[r, r], [r, r]]");
                lc.value = std::array<Rat, 4>{parse_rational(m[0][0]), parse_rational(m[0][1]), parse_rational(m[1][0]),
                                              parse_rational(m[1][1])};
            } else {
                const auto& e = x["element"];
                if (!e.is_array() || e.size() != 4) throw ConfigError("conjugator element must be [r, r, r, r]");
                QuatElement q;
                for (std::size_t s = 0; s < 4; ++s) q.x[s] = parse_rational(e[s]);
                lc.value = q;
            }
            c.conjugator.push_back(lc);
        }
    }
    if (j.contains("enumeration")) {
        const auto& e = j["enumeration"];
        require_keys(e, "enumeration", {"height_bound", "trace_bound", "margin_factor", "threads"});
        if (e.contains("height_bound")) c.enumeration.height_bound = get_int<std::int64_t>(e["height_bound"], "height_bound");
        if (e.contains("trace_bound")) c.enumeration.trace_bound = get_int<std::int64_t>(e["trace_bound"], "trace_bound");
        if (e.contains("margin_factor")) c.enumeration.margin_factor = get_int<int>(e["margin_factor"], "margin_factor");
        if (e.contains("threads")) c.enumeration.threads = get_int<unsigned>(e["threads"], "threads");
    }
    if (c.enumeration.height_bound < 0) throw ConfigError("height_bound must be nonnegative");
    if (c.enumeration.trace_bound < 0) throw ConfigError("trace_bound must be nonnegative");
    if (c.enumeration.margin_factor < 1) throw ConfigError("margin_factor must be at least 1");
    if (j.contains("obstruction")) {
        const auto& o = j["obstruction"];
        require_keys(o, "obstruction", {"radius", "precision"});
        if (o.contains("radius")) c.obstruction.radius = get_int<int>(o["radius"], "radius");
        if (o.contains("precision")) c.obstruction.precision = get_int<int>(o["precision"], "precision");
    }
    if (j.contains("cache_dir")) {
        if (!j["cache_dir"].is_string()) throw ConfigError("cache_dir must be a string");
        c.cache_dir = j["cache_dir"].get<std::string>();
    }
    if (j.contains("output")) {
        if (!j["output"].is_string()) throw ConfigError("output must be a string");
        c.output = j["output"].get<std::string>();
    }
    if (c.output != "json" && c.output != "text") throw ConfigError("output must be json or text");
    if (j.contains("expect_verdict")) {
        const auto v = j["expect_verdict"].is_string() ? j["expect_verdict"].get<std::string>() : std::string();
        if (v == "NonIsometric") c.expect_verdict = Verdict::NonIsometric;
        else if (v == "Inconclusive") c.expect_verdict = Verdict::Inconclusive;
        else throw ConfigError("expect_verdict must be NonIsometric or Inconclusive");
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_run_config(j);
}

Json to_json(const RunConfig& c) {
    Json j;
    j["algebra"] = {{"a", rational_json(c.a)}, {"b", rational_json(c.b)}};
    if (c.order) {
        Json rows = Json::array();
        for (const auto& e : *c.order) {
            Json row = Json::array();
            for (const auto& x : e.x) row.push_back(rational_json(x));
            rows.push_back(row);
        }
        j["order"] = rows;
    }
    if (c.v0) j["v0"] = *c.v0;
    j["locals"] = Json::array();
    for (const auto& l : c.locals) j["locals"].push_back({{"p", l.p}, {"kind", to_string(l.kind)}, {"k", l.k}});
    j["conjugator"] = Json::array();
    for (const auto& x : c.conjugator) {
        Json e{{"p", x.p}};
        if (x.is_matrix()) {
            const auto& m = x.matrix();
            e["matrix"] = {{rational_json(m[0]), rational_json(m[1])}, {rational_json(m[2]), rational_json(m[3])}};
        } else {
            Json el = Json::array();
            for (const auto& v : x.element().x) el.push_back(rational_json(v));
            e["element"] = el;
        }
        j["conjugator"].push_back(e);
    }
    j["enumeration"] = {{"height_bound", c.enumeration.height_bound},
                        {"trace_bound", c.enumeration.trace_bound},
                        {"margin_factor", c.enumeration.margin_factor}};
    j["obstruction"] = {{"radius", c.obstruction.radius}, {"precision", c.obstruction.precision}};
    if (c.expect_verdict) j["expect_verdict"] = to_string(*c.expect_verdict);
    return j;
}

std::string lattice_key(const RunConfig& c) {
    Json j = to_json(c);
    j.erase("enumeration");
    j.erase("obstruction");
    j.erase("expect_verdict");
    // locals and conjugator entries in canonical prime order
    auto by_p = [](const Json& x, const Json& y) { return x["p"].get<std::int64_t>() < y["p"].get<std::int64_t>(); };
    std::sort(j["locals"].begin(), j["locals"].end(), by_p);
    std::sort(j["conjugator"].begin(), j["conjugator"].end(), by_p);
    return j.dump();
}

QuaternionAlgebra make_algebra(const RunConfig& c) { return QuaternionAlgebra(c.a, c.b); }

Order make_order(const RunConfig& c) {
    const QuaternionAlgebra D = make_algebra(c);
    if (!D.ramification().is_division()) throw ConfigError("(a, b) is not a division algebra");
    const Order start = c.order ? verify_order(D, *c.order) : standard_order(D);
    return maximalize(start);
}

GlobalLevel make_level(const RunConfig& c, const Order& maximal) {
    std::optional<std::int64_t> v0 = c.v0;
    if (!v0) v0 = maximal.algebra().check_h1_h2().v0;
    return GlobalLevel(maximal, v0, c.locals);
}

Conjugator make_conjugator(const RunConfig& c) { return Conjugator(c.conjugator); }

// ---------------------------------------------------------------------------

Json algebra_json(const QuaternionAlgebra& D) {
    const auto ram = D.ramification();
    const auto h = D.check_h1_h2();
    Json places = Json::array();
    for (const auto& v : ram.ramified_places) places.push_back(v.to_string());
    Json j;
    j["a"] = rational_json(Rat(D.a()));
    j["b"] = rational_json(Rat(D.b()));
    j["ramified_places"] = places;
    j["reduced_discriminant"] = rational_json(Rat(ram.reduced_discriminant));
    j["division"] = ram.is_division();
    j["h1"] = h.h1;
    j["v0"] = h.v0 ? Json(*h.v0) : Json(nullptr);
    j["h2"] = h.h2;
    return j;
}

Json order_json(const Order& o) {
    Json basis = Json::array();
    for (const auto& e : o.basis()) basis.push_back(e.to_string());
    return {{"basis", basis}, {"reduced_discriminant", rational_json(Rat(o.reduced_discriminant()))}};
}

Json coords_json(const Coords& c) { return Json::array({c[0], c[1], c[2], c[3]}); }

Json spectrum_json(const TraceSpectrum& s) {
    Json values = Json::array();
    for (const auto& v : s.values)
        values.push_back({{"t", v.t}, {"kind", to_string(v.kind)}, {"length", round10(geodesic_length(v.t))},
                          {"witness", coords_json(v.witness)}});
    return {{"trace_bound", s.trace_bound}, {"height_bound", s.height_bound}, {"values", values}};
}

Json comparison_json(const SpectrumComparison& c) {
    Json v = Json::array();
    for (const auto& x : c.violations)
        v.push_back({{"t", x.t},
                     {"present_in", std::string(1, x.present_in)},
                     {"witness", coords_json(x.witness)},
                     {"searched_bound", x.searched_bound}});
    return {{"agree", c.agree}, {"margin_factor", c.margin_factor}, {"violations", v}, {"recovered", c.recovered}};
}

Json torsion_json(const TorsionReport& t) {
    Json j{{"criterion_pass", t.criterion_pass},
           {"criterion_place", t.criterion_place ? Json(*t.criterion_place) : Json(nullptr)},
           {"scan_clean", t.scan_clean},
           {"contains_minus_one", t.contains_minus_one},
           {"detail", t.detail}};
    j["elliptic_witness"] = t.elliptic_witness ? coords_json(*t.elliptic_witness) : Json(nullptr);
    return j;
}

Json h3_json(const H3Report& r) {
    return {{"pass", r.pass},
            {"v0", r.v0},
            {"level", r.level.to_string()},
            {"product_form", r.product_form},
            {"uniformizer", r.uniformizer.to_string()},
            {"normality_checks", r.normality_checks},
            {"detail", r.detail}};
}

Json bound_json(const NormClassBound& b) {
    auto classes = [](const ClassSubgroup& g) {
        Json a = Json::array();
        for (const auto& c : g.classes) a.push_back(c.rep);
        return a;
    };
    Json w = Json::array();
    for (const auto& x : b.witnesses)
        w.push_back({{"class", x.square_class.rep},
                     {"matrix",
                      {{rational_json(x.matrix[0]), rational_json(x.matrix[1])},
                       {rational_json(x.matrix[2]), rational_json(x.matrix[3])}}}});
    return {{"p", b.p},   {"lower", classes(b.certified_lower)}, {"upper", classes(b.assumed_upper)},
            {"exact", b.exact}, {"radius", b.radius}, {"witnesses", w}, {"notes", b.notes}};
}

Json certificate_json(const Certificate& c) {
    Json bounds = Json::array();
    for (const auto& b : c.group.bounds) bounds.push_back(bound_json(b));
    Json rel = Json::array();
    for (const auto& r : c.group.relations) rel.push_back(rational_json(r));
    Json local = Json::array();
    for (const auto& s : c.local_classes) local.push_back(s.rep);
    return {{"support", c.group.support}, {"local_bounds", bounds},     {"relations", rel},
            {"rank", c.group.rank},        {"local_classes", local},     {"class_vector", c.class_vector},
            {"verdict", to_string(c.verdict)}, {"assumptions", c.assumptions}};
}

Json sweep_json(const SweepReport& r) {
    return {{"shapes", r.shapes},
            {"data", r.data},
            {"identities", r.identities},
            {"violations", r.violations},
            {"witness_failures", r.witness_failures},
            {"negative_multiplicities", r.negative_multiplicities},
            {"injectivity_failures", r.injectivity_failures},
            {"by_type", {{"a'", r.by_type[0]}, {"a''", r.by_type[1]}, {"b", r.by_type[2]}}},
            {"first_violations", r.first_violations}};
}

DihedralDatum parse_datum(const Json& j) {
    require_keys(j, "datum", {"type", "d", "v0", "places", "k", "flips"});
    DihedralDatum d;
    if (!j.contains("type") || !j["type"].is_string()) throw ConfigError("datum needs a type");
    d.type = parse_global_type(j["type"].get<std::string>());
    d.d = j.contains("d") ? get_int<int>(j["d"], "d") : 1;
    if (!j.contains("v0")) throw ConfigError("datum needs v0");
    d.v0 = get_int<int>(j["v0"], "v0");
    if (!j.contains("places") || !j["places"].is_array()) throw ConfigError("datum needs a list of places");
    for (const auto& p : j["places"]) {
        require_keys(p, "place", {"place", "split", "ratio_quadratic", "ratio_trivial", "mode"});
        LocalPlaceDatum v;
        v.place = get_int<int>(p.at("place"), "place");
        v.split_for_D = p.value("split", true);
        v.ratio_quadratic = p.value("ratio_quadratic", false);
        v.ratio_trivial = p.value("ratio_trivial", false);
        v.mode = parse_pairing_mode(p.value("mode", std::string("Nondegenerate")));
        d.places.push_back(v);
    }
    d.validate();
    return d;
}

KDatum parse_kdatum(const Json& j) {
    KDatum k;
    if (j.is_null()) return k;
    if (!j.is_object()) throw ConfigError("k must map places to [dim+, dim-]");
    for (const auto& [key, value] : j.items()) {
        if (!value.is_array() || value.size() != 2) throw ConfigError("k entries are [dim+, dim-]");
        int place = 0;
        const auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), place);
        if (ec != std::errc() || end != key.data() + key.size()) throw ConfigError("k key '" + key + "' is not a place");
        k.dims[place] = {get_int<int>(value[0], "dim"), get_int<int>(value[1], "dim")};
    }
    return k;
}

Json identity_json(const IdentityReport& r) {
    Json w = Json::array();
    auto signs = [](const PacketChoice& c) {
        Json o = Json::object();
        for (const auto& [p, s] : c) o[std::to_string(p)] = s;
        return o;
    };
    for (const auto& [a, b] : r.witness) w.push_back({{"pi", signs(a)}, {"pi_prime", signs(b)}});
    return {{"lhs", r.lhs}, {"rhs", r.rhs}, {"equal", r.equal}, {"witness_ok", r.witness_ok}, {"witness", w}};
}

std::string render_text(const Json& report, int indent) {
    std::ostringstream os;
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    auto scalar = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    for (const auto& [key, value] : report.items()) {
        const bool flat_array = value.is_array() && std::none_of(value.begin(), value.end(), [](const Json& e) {
                                    return e.is_object() || (e.is_array() && !e.empty() && e[0].is_array());
                                });
        if (value.is_object()) {
            os << pad << key << ":\n" << render_text(value, indent + 2);
        } else if (value.is_array() && !flat_array) {
            os << pad << key << ":\n";
            for (const auto& e : value) {
                if (e.is_object()) {
                    const std::string inner = render_text(e, indent + 4);
                    os << pad << "  - " << inner.substr(static_cast<std::size_t>(indent + 4));
                } else {
                    os << pad << "  - " << scalar(e) << "\n";
                }
            }
        } else {
            os << pad << key << ": " << scalar(value) << "\n";
        }
    }
    return os.str();
}

}  // namespace isospec
