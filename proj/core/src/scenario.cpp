#include "mfharvest/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>
#include <tuple>

#include "mfharvest/errors.hpp"
#include "mfharvest/expression.hpp"

namespace mfharvest {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ParseError(where + ": " + what); }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) fail(where + "." + it.key(), "unknown key");
    }
}

double number(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) fail(where + "." + key, "missing");
    const json& v = obj.at(key);
    if (!v.is_number()) fail(where + "." + key, "expected a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
    return obj.contains(key) ? number(obj, where, key) : fallback;
}

std::string text(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) fail(where + "." + key, "missing");
    const json& v = obj.at(key);
    if (!v.is_string()) fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

std::uint64_t unsigned_or(const json& obj, const std::string& where, const char* key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(where + "." + key, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::pair<double, double> range_or(const json& obj, const std::string& where, const char* key,
                                   std::pair<double, double> fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        fail(where + "." + key, "expected [lo, hi]");
    const double lo = v[0].get<double>();
    const double hi = v[1].get<double>();
    if (!(lo <= hi)) fail(where + "." + key, "lo must not exceed hi");
    return {lo, hi};
}

Expression compile_at(const std::string& src, const char* var, const std::string& where) {
    try {
        return Expression::compile(src, var);
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what(), e.position());
    }
}

template <class Fn>
auto domain_checked(const std::string& where, Fn&& fn) {
    try {
        return fn();
    } catch (const DomainError& e) {
        fail(where, e.what());
    }
}

Diffusion model_from(const json& m) {
    const std::string where = "model";
    if (!m.is_object()) fail(where, "expected an object");
    const std::string kind = text(m, where, "kind");
    if (kind == "logistic") {
        only_keys(m, where, {"kind", "q", "b", "beta", "y0", "reference"});
        const LogisticParams p{number(m, where, "q"), number(m, where, "b"), number(m, where, "beta")};
        const double y0 = number(m, where, "y0");
        std::optional<double> ref;
        if (m.contains("reference")) ref = number(m, where, "reference");
        return domain_checked(where, [&] { return Diffusion::logistic(p, y0, ref); });
    }
    if (kind == "custom") {
        only_keys(m, where, {"kind", "drift", "vol", "y0", "reference"});
        const std::string d = text(m, where, "drift");
        const std::string v = text(m, where, "vol");
        const Expression de = compile_at(d, "x", where + ".drift");
        const Expression ve = compile_at(v, "x", where + ".vol");
        const double y0 = number(m, where, "y0");
        std::optional<double> ref;
        if (m.contains("reference")) ref = number(m, where, "reference");
        return domain_checked(where, [&] {
            return Diffusion::custom([de](double x) { return de(x); }, [ve](double x) { return ve(x); }, y0, ref, d, v);
        });
    }
    fail(where + ".kind", "expected \"logistic\" or \"custom\", got \"" + kind + "\"");
}

json parse_json(std::string_view src, const char* what) {
    try {
        return json::parse(src.begin(), src.end());
    } catch (const json::parse_error& e) {
        std::ostringstream os;
        os << what << ": malformed JSON at byte " << e.byte;
        throw ParseError(os.str(), e.byte);
    }
}

}  // namespace

Diffusion parse_model(std::string_view src) { return model_from(parse_json(src, "model")); }

Scenario parse_scenario(std::string_view src) {
    const json j = parse_json(src, "scenario");
    only_keys(j, "scenario", {"name", "model", "payoff", "numerics", "single", "simulate", "sweep"});
    Scenario s;
    if (j.contains("name")) s.name = text(j, "scenario", "name");
    if (!j.contains("model")) fail("scenario.model", "missing");
    s.model = model_from(j.at("model"));

    if (!j.contains("payoff")) fail("scenario.payoff", "missing");
    const json& p = j.at("payoff");
    only_keys(p, "payoff", {"K", "phi", "interaction"});
    const double K = number(p, "payoff", "K");
    if (!(K >= 0.0)) fail("payoff.K", "must be >= 0");
    const std::string phi = text(p, "payoff", "phi");
    (void)compile_at(phi, "z", "payoff.phi");
    Interaction kind = Interaction::HarvestRate;
    if (p.contains("interaction")) {
        try {
            kind = parse_interaction(text(p, "payoff", "interaction"));
        } catch (const ParseError& e) {
            fail("payoff.interaction", e.what());
        }
    }
    s.payoff = PayoffSpec::from_expression(K, phi, kind);

    if (j.contains("numerics")) {
        const json& n = j.at("numerics");
        only_keys(n, "numerics", {"tol", "grid", "dt", "seed", "paths", "horizon", "threads"});
        if (n.contains("tol")) {
            const double tol = number(n, "numerics", "tol");
            if (!(tol > 0.0)) fail("numerics.tol", "must be positive");
            s.tolerance.rel = tol;
        }
        const auto grid = static_cast<int>(unsigned_or(n, "numerics", "grid", 500));
        if (grid < 3) fail("numerics.grid", "must be at least 3");
        s.meanfield.scan_points = grid;
        s.meanfield.mfc_points = grid;
        s.sim.dt = number_or(n, "numerics", "dt", s.sim.dt);
        if (!(s.sim.dt > 0.0)) fail("numerics.dt", "must be positive");
        s.sim.seed = unsigned_or(n, "numerics", "seed", s.sim.seed);
        s.paths = static_cast<std::int64_t>(unsigned_or(n, "numerics", "paths", static_cast<std::uint64_t>(s.paths)));
        if (s.paths < 2) fail("numerics.paths", "must be at least 2");
        s.sim.horizon = number_or(n, "numerics", "horizon", s.sim.horizon);
        if (!(s.sim.horizon > 0.0)) fail("numerics.horizon", "must be positive");
        const auto threads = static_cast<unsigned>(unsigned_or(n, "numerics", "threads", 0));
        s.sim.threads = threads;
        s.meanfield.threads = threads;
        s.sweep.threads = threads;
    }
    s.model = s.model.with_tolerance(s.tolerance);

    if (j.contains("single")) {
        const json& q = j.at("single");
        only_keys(q, "single", {"z"});
        s.single_z = number_or(q, "single", "z", 0.0);
    }
    if (j.contains("simulate")) {
        const json& q = j.at("simulate");
        only_keys(q, "simulate", {"threshold", "path_horizon", "stride"});
        if (q.contains("threshold")) s.simulate_threshold = number(q, "simulate", "threshold");
        s.path_horizon = number_or(q, "simulate", "path_horizon", s.path_horizon);
        s.path_stride = static_cast<int>(unsigned_or(q, "simulate", "stride", static_cast<std::uint64_t>(s.path_stride)));
        if (s.path_stride < 1) fail("simulate.stride", "must be >= 1");
    }
    s.sweep.interaction = kind;
    s.sweep.phi = phi;
    if (s.model.logistic_params()) {
        s.sweep.beta = s.model.logistic_params()->beta;
        s.sweep.y0 = s.model.y0();
    }
    if (j.contains("sweep")) {
        const json& q = j.at("sweep");
        only_keys(q, "sweep", {"draws", "seed", "q", "b", "K", "phi"});
        s.sweep.draws = static_cast<int>(unsigned_or(q, "sweep", "draws", 100));
        s.sweep.seed = unsigned_or(q, "sweep", "seed", s.sweep.seed);
        std::tie(s.sweep.q_lo, s.sweep.q_hi) = range_or(q, "sweep", "q", {s.sweep.q_lo, s.sweep.q_hi});
        std::tie(s.sweep.b_lo, s.sweep.b_hi) = range_or(q, "sweep", "b", {s.sweep.b_lo, s.sweep.b_hi});
        std::tie(s.sweep.K_lo, s.sweep.K_hi) = range_or(q, "sweep", "K", {s.sweep.K_lo, s.sweep.K_hi});
        if (q.contains("phi")) {
            s.sweep.phi = text(q, "sweep", "phi");
            (void)compile_at(s.sweep.phi, "z", "sweep.phi");
        }
        if (!(s.sweep.q_hi < 0.0)) fail("sweep.q", "q must stay negative");
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), e.position());
    }
}

}  // namespace mfharvest
