#include "config.hpp"

#include "anharm/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace anharm::cli {

namespace {

// Locates every error at the offending node.
class Reader {
public:
    Reader(YAML::Node node, std::string path, const std::string& source)
        : node_(std::move(node)), path_(std::move(path)), source_(&source) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& field, const std::string& msg) const {
        std::ostringstream os;
        os << *source_;
        if (at.IsDefined()) {
            const YAML::Mark m = at.Mark();
            if (m.line >= 0) os << ":" << m.line + 1 << ":" << m.column + 1;
        }
        os << ": " << field << ": " << msg;
        throw ConfigError(os.str());
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void only(std::initializer_list<const char*> keys) const {
        if (!node_ || node_.IsNull()) return;
        if (!node_.IsMap()) fail(node_, path_.empty() ? "<root>" : path_, "expected a mapping");
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& kv : node_) {
            const std::string k = kv.first.as<std::string>();
            if (!allowed.count(k)) fail(kv.first, field(k), "unknown key");
        }
    }

    bool has(const char* key) const { return node_ && node_.IsMap() && cnode()[key]; }

    Reader section(const char* key) const {
        if (!has(key)) return Reader(YAML::Node(), field(key), *source_);
        return Reader(cnode()[key], field(key), *source_);
    }

    YAML::Node raw(const char* key) const { return cnode()[key]; }
    const YAML::Node& node() const { return node_; }

    double number(const char* key, double def) const {
        if (!has(key)) return def;
        const YAML::Node n = cnode()[key];
        double v = 0.0;
        if (!n.IsScalar() || !YAML::convert<double>::decode(n, v) || !std::isfinite(v)) {
            fail(n, field(key), "expected a finite number");
        }
        return v;
    }

    long long integer(const char* key, long long def) const {
        if (!has(key)) return def;
        const YAML::Node n = cnode()[key];
        long long v = 0;
        if (!n.IsScalar() || !YAML::convert<long long>::decode(n, v)) fail(n, field(key), "expected an integer");
        return v;
    }

    std::string text(const char* key, const std::string& def) const {
        if (!has(key)) return def;
        const YAML::Node n = cnode()[key];
        if (!n.IsScalar()) fail(n, field(key), "expected a string");
        return n.as<std::string>();
    }

    template <class E>
    E choice(const char* key, E def, std::initializer_list<std::pair<const char*, E>> options) const {
        if (!has(key)) return def;
        const std::string s = text(key, "");
        std::string names;
        for (const auto& [name, value] : options) {
            if (s == name) return value;
            names += names.empty() ? name : std::string(", ") + name;
        }
        fail(cnode()[key], field(key), "expected one of: " + names + " (got '" + s + "')");
    }

private:
    const YAML::Node& cnode() const { return node_; }

    YAML::Node node_;
    std::string path_;
    const std::string* source_;
};

Range read_range(const Reader& r, Range def) {
    if (!r.node() || r.node().IsNull()) return def;
    if (r.node().IsSequence()) {
        Range out;
        for (const auto& item : r.node()) {
            double v = 0.0;
            if (!item.IsScalar() || !YAML::convert<double>::decode(item, v) || !std::isfinite(v)) {
                r.fail(item, r.field("[]"), "expected a finite number");
            }
            out.explicit_values.push_back(v);
        }
        if (out.explicit_values.empty()) r.fail(r.node(), r.field(""), "grid must not be empty");
        out.count = static_cast<int>(out.explicit_values.size());
        out.start = out.explicit_values.front();
        out.stop = out.explicit_values.back();
        return out;
    }
    r.only({"start", "stop", "count", "scale"});
    Range out = def;
    out.explicit_values.clear();
    out.start = r.number("start", def.start);
    out.stop = r.number("stop", def.stop);
    const long long count = r.integer("count", def.count);
    if (count < 1 || count > 100000) r.fail(r.node(), r.field("count"), "must lie in [1, 100000]");
    out.count = static_cast<int>(count);
    out.log = r.choice<bool>("scale", def.log, {{"linear", false}, {"log", true}});
    if (out.log && (!(out.start > 0.0) || !(out.stop > 0.0))) {
        r.fail(r.node(), r.field("start"), "log scale needs positive start and stop");
    }
    if (out.count > 1 && out.start == out.stop) r.fail(r.node(), r.field("stop"), "start and stop coincide");
    return out;
}

nlohmann::json range_json(const Range& r) {
    if (!r.explicit_values.empty()) return r.explicit_values;
    return {{"start", r.start}, {"stop", r.stop}, {"count", r.count}, {"scale", r.log ? "log" : "linear"}};
}

void require_positive(const Reader& r, const char* key, double v) {
    if (!(v > 0.0)) r.fail(r.has(key) ? r.raw(key) : r.node(), r.field(key), "must be positive");
}

} // namespace

std::vector<double> Range::values() const {
    if (!explicit_values.empty()) return explicit_values;
    std::vector<double> out(static_cast<std::size_t>(count));
    if (count == 1) {
        out[0] = start;
        return out;
    }
    for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        out[static_cast<std::size_t>(i)] =
            log ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start))) : start + f * (stop - start);
    }
    out.front() = start;
    out.back() = stop;
    return out;
}

const char* to_string(Feed f) { return f == Feed::eigen_split ? "eigen_split" : "ladder"; }

const char* to_string(Observable o) {
    switch (o) {
    case Observable::kerr: return "kerr";
    case Observable::quadrature: return "quadrature";
    case Observable::attractive: return "attractive";
    }
    return "?";
}

const char* to_string(Branch b) {
    switch (b) {
    case Branch::repulsive: return "repulsive";
    case Branch::attractive: return "attractive";
    case Branch::both: return "both";
    }
    return "?";
}

ModelSpec RunConfig::model_spec() const {
    if (model.circuit) {
        return circuit_params_to_model(model.circuit->E_C, model.circuit->E_J, model.circuit->max_order,
                                       truncation.dim)
            .model;
    }
    ModelSpec s;
    s.model = model.kind;
    s.omega_a = model.omega_a;
    s.U = model.U;
    s.extra_orders = model.extra_orders;
    s.dim = truncation.dim;
    return s;
}

std::vector<std::string> RunConfig::model_warnings() const {
    if (!model.circuit) return {};
    return circuit_params_to_model(model.circuit->E_C, model.circuit->E_J, model.circuit->max_order,
                                   truncation.dim)
        .warnings;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    nlohmann::json m = {{"kind", anharm::to_string(model.kind)}, {"omega_a", model.omega_a}, {"U", model.U}};
    nlohmann::json extra = nlohmann::json::array();
    for (const auto& t : model.extra_orders) extra.push_back({t.power, t.coefficient});
    m["extra_orders"] = extra;
    if (model.circuit) {
        m["circuit"] = {{"E_C", model.circuit->E_C}, {"E_J", model.circuit->E_J},
                        {"max_order", model.circuit->max_order}};
    }
    j["model"] = m;
    j["truncation"] = {{"keep", truncation.keep},
                       {"dim", truncation.dim},
                       {"ceiling", truncation.ceiling},
                       {"tolerance", truncation.tolerance}};
    j["bath"] = {{"gamma_a", bath.gamma_a}, {"T", bath.T}};
    j["field"] = {{"quadrature", anharm::to_string(field.quadrature)}, {"feed", to_string(field.feed)}};
    nlohmann::json s = {{"Gamma1", sensors.Gamma1}, {"Gamma2", sensors.Gamma2}, {"grid1", range_json(sensors.grid1)}};
    if (sensors.grid2) s["grid2"] = range_json(*sensors.grid2);
    j["sensors"] = s;
    j["sweep"] = {{"observable", to_string(sweep.observable)},
                  {"quadrature", anharm::to_string(sweep.quadrature)},
                  {"U", range_json(sweep.U)},
                  {"T", range_json(sweep.T)}};
    j["levels"] = {{"U", range_json(levels.U)}, {"count", levels.count}, {"branch", to_string(levels.branch)}};
    j["validate"] = {{"spectrum_points", validate.spectrum_points},
                     {"correlation_points", validate.correlation_points}};
    return j;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        std::ostringstream os;
        os << source << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": " << e.msg;
        throw ConfigError(os.str());
    }
    const Reader top(root, "", source);
    top.only({"model", "truncation", "bath", "field", "sensors", "sweep", "levels", "validate"});
    RunConfig c;

    {
        const Reader r = top.section("model");
        r.only({"kind", "omega_a", "U", "extra_orders", "circuit"});
        c.model.kind = r.choice<Model>("kind", c.model.kind,
                                       {{"kerr", Model::kerr}, {"quartic", Model::quartic}, {"series", Model::series}});
        c.model.omega_a = r.number("omega_a", c.model.omega_a);
        require_positive(r, "omega_a", c.model.omega_a);
        c.model.U = r.number("U", c.model.U);
        if (r.has("extra_orders")) {
            const YAML::Node list = r.raw("extra_orders");
            if (!list.IsSequence()) r.fail(list, r.field("extra_orders"), "expected a list of [power, coefficient]");
            for (const auto& item : list) {
                int p = 0;
                double v = 0.0;
                if (!item.IsSequence() || item.size() != 2 || !YAML::convert<int>::decode(item[0], p) ||
                    !YAML::convert<double>::decode(item[1], v)) {
                    r.fail(item, r.field("extra_orders"), "expected [power, coefficient]");
                }
                if (p < 6 || p % 2 != 0) r.fail(item, r.field("extra_orders"), "power must be even and >= 6");
                c.model.extra_orders.push_back({p, v});
            }
        }
        if (r.has("circuit")) {
            const Reader cr = r.section("circuit");
            cr.only({"E_C", "E_J", "max_order"});
            CircuitConfig cc;
            cc.E_C = cr.number("E_C", 0.0);
            cc.E_J = cr.number("E_J", 0.0);
            require_positive(cr, "E_C", cc.E_C);
            require_positive(cr, "E_J", cc.E_J);
            cc.max_order = static_cast<int>(cr.integer("max_order", 6));
            if (cc.max_order < 4 || cc.max_order % 2 != 0) {
                cr.fail(cr.raw("max_order"), cr.field("max_order"), "must be even and >= 4");
            }
            c.model.circuit = cc;
        }
    }
    {
        const Reader r = top.section("truncation");
        r.only({"keep", "dim", "ceiling", "tolerance"});
        c.truncation.keep = r.integer("keep", c.truncation.keep);
        c.truncation.dim = r.integer("dim", c.truncation.dim);
        c.truncation.ceiling = r.integer("ceiling", c.truncation.ceiling);
        c.truncation.tolerance = r.number("tolerance", c.truncation.tolerance);
        if (c.truncation.keep < 2) r.fail(r.raw("keep"), r.field("keep"), "must be >= 2");
        if (c.truncation.dim < c.truncation.keep) r.fail(r.has("dim") ? r.raw("dim") : r.raw("keep"), r.field("dim"), "must be >= keep");
        if (c.truncation.ceiling < c.truncation.keep) r.fail(r.raw("ceiling"), r.field("ceiling"), "must be >= keep");
        require_positive(r, "tolerance", c.truncation.tolerance);
    }
    {
        const Reader r = top.section("bath");
        r.only({"gamma_a", "T"});
        c.bath.gamma_a = r.number("gamma_a", c.bath.gamma_a);
        c.bath.T = r.number("T", c.bath.T);
        require_positive(r, "gamma_a", c.bath.gamma_a);
        require_positive(r, "T", c.bath.T);
    }
    {
        const Reader r = top.section("field");
        r.only({"quadrature", "feed"});
        c.field.quadrature = r.choice<Quadrature>("quadrature", c.field.quadrature,
                                                  {{"X", Quadrature::X}, {"P", Quadrature::P}});
        c.field.feed = r.choice<Feed>("feed", c.field.feed, {{"eigen_split", Feed::eigen_split}, {"ladder", Feed::ladder}});
    }
    {
        const Reader r = top.section("sensors");
        r.only({"Gamma1", "Gamma2", "grid1", "grid2"});
        c.sensors.Gamma1 = r.number("Gamma1", c.sensors.Gamma1);
        c.sensors.Gamma2 = r.number("Gamma2", c.sensors.Gamma2);
        require_positive(r, "Gamma1", c.sensors.Gamma1);
        require_positive(r, "Gamma2", c.sensors.Gamma2);
        c.sensors.grid1 = read_range(r.section("grid1"), c.sensors.grid1);
        if (r.has("grid2")) c.sensors.grid2 = read_range(r.section("grid2"), c.sensors.grid1);
        for (const Range* g : {&c.sensors.grid1, c.sensors.grid2 ? &*c.sensors.grid2 : nullptr}) {
            if (!g) continue;
            const auto v = g->values();
            for (std::size_t i = 1; i < v.size(); ++i) {
                if (!(v[i] > v[i - 1])) r.fail(r.node(), r.field(g == &c.sensors.grid1 ? "grid1" : "grid2"), "grid must be strictly increasing");
            }
        }
    }
    {
        const Reader r = top.section("sweep");
        r.only({"observable", "quadrature", "U", "T"});
        c.sweep.observable = r.choice<Observable>(
            "observable", c.sweep.observable,
            {{"kerr", Observable::kerr}, {"quadrature", Observable::quadrature}, {"attractive", Observable::attractive}});
        c.sweep.quadrature = r.choice<Quadrature>("quadrature", c.sweep.quadrature,
                                                  {{"X", Quadrature::X}, {"P", Quadrature::P}});
        c.sweep.U = read_range(r.section("U"), c.sweep.U);
        c.sweep.T = read_range(r.section("T"), c.sweep.T);
        for (double t : c.sweep.T.values()) {
            if (!(t > 0.0)) r.fail(r.node(), r.field("T"), "temperatures must be positive");
        }
        if (c.sweep.observable != Observable::quadrature) {
            for (double u : c.sweep.U.values()) {
                if (!(u > 0.0)) {
                    r.fail(r.node(), r.field("U"),
                           "values must be positive (attractive sweeps use |U|)");
                }
            }
        }
    }
    {
        const Reader r = top.section("levels");
        r.only({"U", "count", "branch"});
        c.levels.U = read_range(r.section("U"), c.levels.U);
        c.levels.count = static_cast<int>(r.integer("count", c.levels.count));
        if (c.levels.count < 1) r.fail(r.raw("count"), r.field("count"), "must be >= 1");
        c.levels.branch = r.choice<Branch>("branch", c.levels.branch,
                                           {{"repulsive", Branch::repulsive}, {"attractive", Branch::attractive}, {"both", Branch::both}});
        for (double u : c.levels.U.values()) {
            if (u < 0.0) r.fail(r.node(), r.field("U"), "values must be >= 0 (attractive branch uses -U)");
        }
    }
    {
        const Reader r = top.section("validate");
        r.only({"spectrum_points", "correlation_points"});
        c.validate.spectrum_points = static_cast<int>(r.integer("spectrum_points", c.validate.spectrum_points));
        c.validate.correlation_points =
            static_cast<int>(r.integer("correlation_points", c.validate.correlation_points));
        if (c.validate.spectrum_points < 1) r.fail(r.raw("spectrum_points"), r.field("spectrum_points"), "must be >= 1");
        if (c.validate.correlation_points < 1) {
            r.fail(r.raw("correlation_points"), r.field("correlation_points"), "must be >= 1");
        }
    }

    // Model consistency is checked by the library itself; report it as a
    // config error pointing at the model section.
    try {
        c.model_spec().validate();
    } catch (const std::invalid_argument& e) {
        top.section("model").fail(top.has("model") ? root["model"] : root, "model", e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

} // namespace anharm::cli
