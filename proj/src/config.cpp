#include "dirac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dirac/errors.hpp"

namespace dirac {

namespace {

// Object reader that remembers which keys were consumed so leftovers can be rejected.
class Section {
public:
    Section(const ojson& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const ojson& at(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(path_ + "." + key + " is required");
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(path_ + "." + key + " is required");
        }
        const ojson& v = at(key);
        if (!v.is_number()) throw ConfigError(path_ + "." + key + " must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(path_ + "." + key + " must be finite");
        return d;
    }

    int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(path_ + "." + key + " is required");
        }
        const ojson& v = at(key);
        if (!v.is_number_integer()) throw ConfigError(path_ + "." + key + " must be an integer");
        return v.get<int>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(path_ + "." + key + " is required");
        }
        const ojson& v = at(key);
        if (!v.is_string()) throw ConfigError(path_ + "." + key + " must be a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const ojson& v = at(key);
        if (!v.is_boolean()) throw ConfigError(path_ + "." + key + " must be a boolean");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) return fallback;
        const ojson& v = at(key);
        if (!v.is_array()) throw ConfigError(path_ + "." + key + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(path_ + "." + key + " must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::string path(const std::string& key) const { return path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError("unknown key " + path_ + "." + it.key());
    }

private:
    const ojson& j_;
    std::string path_;
    std::set<std::string> seen_;
};

cplx parse_complex(const ojson& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError(where + " must be a number or a [re, im] pair");
}

Vec2 parse_spinor(const ojson& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(where + " must be a two-component spinor");
    return Vec2(parse_complex(j[0], where + "[0]"), parse_complex(j[1], where + "[1]"));
}

Mat4 parse_matrix4(const ojson& j, const std::string& where) {
    if (!j.is_array() || j.size() != 4) throw ConfigError(where + " must be a 4x4 matrix");
    Mat4 m;
    for (int r = 0; r < 4; ++r) {
        if (!j[r].is_array() || j[r].size() != 4) throw ConfigError(where + " must be a 4x4 matrix");
        for (int c = 0; c < 4; ++c)
            m(r, c) = parse_complex(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

int parse_mode(Section& s, const Geometry& g) {
    const int mode = s.integer("mode", 0);
    const auto modes = g.modes();
    if (std::find(modes.begin(), modes.end(), mode) == modes.end())
        throw ConfigError(s.path("mode") + " is not a carried mode");
    return mode;
}

}  // namespace

TimeFunction parse_time_function(const ojson& j, const std::string& where) {
    if (j.is_number()) return TimeFunction::constant(j.get<double>());
    Section s(j, where);
    const std::string type = s.string("type");
    TimeFunction f;
    if (type == "const") {
        f = TimeFunction::constant(s.number("value"));
    } else if (type == "affine") {
        f = TimeFunction::affine(s.number("a"), s.number("b"));
    } else if (type == "sin_affine") {
        f = TimeFunction::sin_affine(s.number("a"), s.number("b"), s.number("omega"), s.number("phase", 0.0));
    } else if (type == "bump") {
        const double hw = s.number("half_width");
        if (!(hw > 0.0)) throw ConfigError(where + ".half_width must be positive");
        f = TimeFunction::bump(s.number("center"), hw, s.number("amplitude", 1.0));
    } else if (type == "product") {
        const ojson& fs = s.at("factors");
        if (!fs.is_array() || fs.size() < 2) throw ConfigError(where + ".factors must list at least two functions");
        f = parse_time_function(fs[0], where + ".factors[0]");
        for (std::size_t i = 1; i < fs.size(); ++i)
            f = TimeFunction::product(f, parse_time_function(fs[i], where + ".factors[" + std::to_string(i) + "]"));
    } else {
        throw ConfigError(where + ".type '" + type + "' is not one of const, affine, sin_affine, bump, product");
    }
    s.finish();
    return f;
}

ojson time_function_json(const TimeFunction& f) {
    const auto& p = f.params();
    ojson j;
    switch (f.kind()) {
        case TimeFunction::Kind::Const: j = {{"type", "const"}, {"value", p[0]}}; break;
        case TimeFunction::Kind::Affine: j = {{"type", "affine"}, {"a", p[0]}, {"b", p[1]}}; break;
        case TimeFunction::Kind::SinAffine:
            j = {{"type", "sin_affine"}, {"a", p[0]}, {"b", p[1]}, {"omega", p[2]}, {"phase", p[3]}};
            break;
        case TimeFunction::Kind::Bump:
            j = {{"type", "bump"}, {"center", p[0]}, {"half_width", p[1]}, {"amplitude", p[2]}};
            break;
        case TimeFunction::Kind::Product: {
            j = {{"type", "product"}, {"factors", ojson::array()}};
            for (const auto& g : f.factors()) j["factors"].push_back(time_function_json(g));
            break;
        }
    }
    return j;
}

ExperimentConfig parse_config(const ojson& root) {
    ExperimentConfig cfg;
    Section top(root, "config");

    {
        Section g(top.at("geometry"), "geometry");
        const std::string kind = g.string("kind", "strip");
        const double length = g.number("length", 1.0);
        if (!(length > 0.0)) throw ConfigError("geometry.length must be positive");
        if (kind == "strip") {
            cfg.geometry = Geometry::strip(length);
        } else if (kind == "cylinder") {
            const int k = g.integer("mode_cutoff", 0);
            if (k < 0) throw ConfigError("geometry.mode_cutoff must be non-negative");
            const TimeFunction r = g.has("radius") ? parse_time_function(g.at("radius"), "geometry.radius")
                                                   : TimeFunction::constant(1.0);
            cfg.geometry = Geometry::cylinder(k, r, length);
        } else {
            throw ConfigError("geometry.kind must be 'strip' or 'cylinder'");
        }
        if (g.has("lapse")) cfg.geometry.lapse = parse_time_function(g.at("lapse"), "geometry.lapse");
        if (kind == "strip" && (g.has("radius") || g.has("mode_cutoff")))
            throw ConfigError("geometry.radius and geometry.mode_cutoff apply to the cylinder only");
        g.finish();
    }

    {
        Section g(top.at("grid"), "grid");
        cfg.nx = g.integer("nx");
        if (cfg.nx < 16) throw ConfigError("grid.nx must be at least 16");
        const double h = cfg.geometry.length / (cfg.nx - 1);
        if (g.has("dt") && g.has("dt_over_h")) throw ConfigError("grid.dt and grid.dt_over_h are exclusive");
        cfg.dt = g.has("dt") ? g.number("dt") : g.number("dt_over_h", 0.5) * h;
        if (!(cfg.dt > 0.0)) throw ConfigError("grid time step must be positive");
        const auto window = g.numbers("window", {0.0, 1.0});
        if (window.size() != 2 || !(window[0] < window[1])) throw ConfigError("grid.window must be [t_begin, t_end]");
        cfg.t_begin = window[0];
        cfg.t_end = window[1];
        cfg.t_init = g.number("t_init", cfg.t_begin);
        if (cfg.t_init < cfg.t_begin || cfg.t_init > cfg.t_end) throw ConfigError("grid.t_init must lie in the window");
        g.finish();
    }
    try {
        cfg.geometry.validate(cfg.t_begin, cfg.t_end);
    } catch (const PreconditionViolation& e) {
        throw ConfigError(e.what());
    }

    if (top.has("boundary")) {
        Section b(top.at("boundary"), "boundary");
        auto& bc = cfg.boundary;
        bc.family = b.string("family", "transmission");
        static const std::vector<std::string> known{"transmission", "chirality", "aps", "rotated", "custom"};
        if (std::find(known.begin(), known.end(), bc.family) == known.end())
            throw ConfigError("boundary.family '" + bc.family + "' is unknown");
        if (bc.family == "rotated") {
            bc.base = b.string("base", "transmission");
            if (bc.base != "transmission" && bc.base != "chirality" && bc.base != "aps")
                throw ConfigError("boundary.base must be transmission, chirality or aps");
            bc.phi = parse_time_function(b.at("phi"), "boundary.phi");
        }
        if (bc.family == "custom") {
            const ojson& ms = b.at("matrices");
            if (!ms.is_array() || ms.empty()) throw ConfigError("boundary.matrices must be a non-empty array");
            for (std::size_t i = 0; i < ms.size(); ++i)
                bc.matrices.push_back(parse_matrix4(ms[i], "boundary.matrices[" + std::to_string(i) + "]"));
            const std::size_t nm = cfg.geometry.modes().size();
            if (bc.matrices.size() != 1 && bc.matrices.size() != nm)
                throw ConfigError("boundary.matrices needs one block or one per mode");
        }
        if (bc.family == "aps" && cfg.geometry.kind != GeometryKind::Cylinder)
            throw ConfigError("the aps family needs the cylinder geometry");
        b.finish();
    }

    if (top.has("data")) {
        Section d(top.at("data"), "data");
        if (d.has("bumps")) {
            const ojson& bs = d.at("bumps");
            if (!bs.is_array()) throw ConfigError("data.bumps must be an array");
            for (std::size_t i = 0; i < bs.size(); ++i) {
                const std::string where = "data.bumps[" + std::to_string(i) + "]";
                Section s(bs[i], where);
                BumpProfile p;
                p.center = s.number("center");
                p.half_width = s.number("half_width");
                p.amplitude = s.has("amplitude") ? parse_spinor(s.at("amplitude"), where + ".amplitude") : Vec2(1.0, 0.0);
                p.mode = parse_mode(s, cfg.geometry);
                s.finish();
                if (!(p.half_width > 0.0)) throw ConfigError(where + ".half_width must be positive");
                try {
                    p.validate(cfg.geometry.length);
                } catch (const PreconditionViolation& e) {
                    throw ConfigError(where + ": " + e.what());
                }
                cfg.psi0.bumps.push_back(p);
            }
        }
        if (d.has("sources")) {
            const ojson& ss = d.at("sources");
            if (!ss.is_array()) throw ConfigError("data.sources must be an array");
            for (std::size_t i = 0; i < ss.size(); ++i) {
                const std::string where = "data.sources[" + std::to_string(i) + "]";
                Section s(ss[i], where);
                SourceTerm t;
                t.center = s.number("center");
                t.half_width = s.number("half_width");
                t.amplitude = s.has("amplitude") ? parse_spinor(s.at("amplitude"), where + ".amplitude") : Vec2(1.0, 0.0);
                t.envelope = parse_time_function(s.at("envelope"), where + ".envelope");
                t.mode = parse_mode(s, cfg.geometry);
                s.finish();
                if (!(t.half_width > 0.0)) throw ConfigError(where + ".half_width must be positive");
                if (t.center - t.half_width <= 0.0 || t.center + t.half_width >= cfg.geometry.length)
                    throw ConfigError(where + " must stay away from the boundary");
                cfg.sources.push_back(t);
            }
        }
        d.finish();
    }

    if (top.has("run")) {
        Section r(top.at("run"), "run");
        auto& rc = cfg.run;
        rc.scheme = r.string("scheme", "crank-nicolson");
        if (rc.scheme != "crank-nicolson" && rc.scheme != "mollified")
            throw ConfigError("run.scheme must be 'crank-nicolson' or 'mollified'");
        rc.epsilon = r.number("epsilon", 0.1);
        if (!(rc.epsilon > 0.0)) throw ConfigError("run.epsilon must be positive");
        rc.epsilons = r.numbers("epsilons", rc.epsilons);
        for (double e : rc.epsilons)
            if (!(e > 0.0)) throw ConfigError("run.epsilons must be positive");
        const double seed = r.number("seed", 1.0);
        if (seed < 0.0 || seed != std::floor(seed)) throw ConfigError("run.seed must be a non-negative integer");
        rc.seed = static_cast<std::uint64_t>(seed);
        rc.snapshot_every = r.integer("snapshot_every", 1);
        if (rc.snapshot_every < 0) throw ConfigError("run.snapshot_every must be non-negative");
        rc.output_times = r.numbers("output_times", {});
        for (double t : rc.output_times)
            if (t < cfg.t_begin || t > cfg.t_end) throw ConfigError("run.output_times must lie in the window");
        rc.parallel_modes = r.boolean("parallel_modes", true);
        r.finish();
    }

    if (top.has("check")) {
        Section c(top.at("check"), "check");
        auto& cc = cfg.check;
        if (c.has("suites")) {
            const ojson& s = c.at("suites");
            if (!s.is_array()) throw ConfigError("check.suites must be an array of names");
            for (const auto& e : s) {
                if (!e.is_string()) throw ConfigError("check.suites must be an array of names");
                cc.suites.push_back(e.get<std::string>());
            }
        }
        cc.samples = c.integer("samples", cc.samples);
        cc.trials = c.integer("trials", cc.trials);
        if (cc.samples < 2 || cc.trials < 1) throw ConfigError("check.samples >= 2 and check.trials >= 1 required");
        cc.support_threshold = c.number("support_threshold", cc.support_threshold);
        cc.flux_tolerance = c.number("flux_tolerance", cc.flux_tolerance);
        cc.drift_tolerance = c.number("drift_tolerance", cc.drift_tolerance);
        cc.admissibility_tolerance = c.number("admissibility_tolerance", cc.admissibility_tolerance);
        cc.green_tolerance = c.number("green_tolerance", cc.green_tolerance);
        cc.stability_delta = c.number("stability_delta", cc.stability_delta);
        cc.spectrum_points = c.integer("spectrum_points", cc.spectrum_points);
        if (!(cc.support_threshold > 0.0 && cc.support_threshold < 1.0))
            throw ConfigError("check.support_threshold must lie in (0, 1)");
        c.finish();
    }
    top.finish();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    ojson j;
    try {
        j = ojson::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

CauchyData ExperimentConfig::cauchy_data() const {
    CauchyData d;
    d.psi0 = psi0;
    if (!sources.empty()) d.source = Source(sources);
    d.t_init = t_init;
    d.t_begin = t_begin;
    d.t_end = t_end;
    return d;
}

SolverOptions ExperimentConfig::solver_options() const {
    SolverOptions o;
    o.dt = dt;
    o.landing_times = run.output_times;
    o.snapshot_every = run.snapshot_every;
    o.parallel_modes = run.parallel_modes;
    return o;
}

ProjectorFamily make_family(const ExperimentConfig& cfg, const CliffordModel& model) {
    const BoundaryOperatorSpec spec(cfg.geometry, model);
    auto named = [&](const std::string& name) {
        if (name == "transmission") return transmission_family(spec);
        if (name == "chirality") return chirality_family(spec);
        if (name == "aps") return aps_family(spec);
        throw ConfigError("unknown family '" + name + "'");
    };
    const auto& bc = cfg.boundary;
    if (bc.family == "rotated") return rotated_family(spec, named(bc.base), bc.phi);
    if (bc.family == "custom") {
        std::vector<Mat4> blocks = bc.matrices;
        if (blocks.size() == 1) blocks.assign(cfg.geometry.modes().size(), bc.matrices.front());
        return custom_family(blocks);
    }
    return named(bc.family);
}

}  // namespace dirac
