// Copyright 2026 The qme Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qme/scenario.h"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "qme/timeseries.h"

namespace qme {

namespace {

std::string where(const std::string &source, int line, int column) {
    std::ostringstream out;
    out << source;
    if (line > 0) out << ":" << line << ":" << column;
    return out.str();
}

}  // namespace

ScenarioError::ScenarioError(std::string source, std::string field, int line, int column, const std::string &message)
    : std::runtime_error(where(source, line, column) + ": " + (field.empty() ? "" : "field '" + field + "': ") + message),
      field_(std::move(field)),
      line_(line),
      column_(column) {}

namespace {

struct Context {
    std::string source;
    std::vector<std::string> defaulted;
};

// A mapping node together with its dotted path. Unknown keys are rejected on
// construction; lookups record which keys fell back to defaults.
class Fields {
public:
    Fields(const YAML::Node &node, std::string path, Context &ctx, std::set<std::string> allowed)
        : node_(node), path_(std::move(path)), ctx_(ctx) {
        if (!node.IsMap()) fail(node, path_, "expected a mapping");
        for (const auto &kv : node) {
            auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) fail(kv.first, child(key), "unknown key");
        }
    }

    std::string child(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }
    // node_ is const, so lookups never insert keys.
    bool has(const std::string &key) const { return static_cast<bool>(node_[key]); }
    YAML::Node at(const std::string &key) const { return node_[key]; }
    const YAML::Node &node() const { return node_; }

    [[noreturn]] void fail(const YAML::Node &at, const std::string &field, const std::string &message) const {
        auto mark = at.Mark();
        int line = mark.line >= 0 ? mark.line + 1 : 0, column = mark.column >= 0 ? mark.column + 1 : 0;
        throw ScenarioError(ctx_.source, field, line, column, message);
    }
    [[noreturn]] void fail_key(const std::string &key, const std::string &message) const {
        fail(has(key) ? at(key) : node_, child(key), message);
    }

    template <class T>
    T scalar(const YAML::Node &n, const std::string &field, const char *what) const {
        if (!n.IsScalar()) fail(n, field, std::string("expected ") + what);
        try {
            return n.as<T>();
        } catch (const YAML::Exception &) {
            fail(n, field, std::string("expected ") + what + ", got '" + n.Scalar() + "'");
        }
    }

    double number(const std::string &key, std::optional<double> fallback = std::nullopt) const {
        if (!has(key)) return fallback_or(key, fallback);
        double v = scalar<double>(at(key), child(key), "a number");
        if (!std::isfinite(v)) fail_key(key, "must be finite");
        return v;
    }
    long long integer(const std::string &key, std::optional<long long> fallback = std::nullopt) const {
        if (!has(key)) return fallback_or(key, fallback);
        return scalar<long long>(at(key), child(key), "an integer");
    }
    bool flag(const std::string &key, bool fallback) const {
        if (!has(key)) return fallback_or(key, std::optional<bool>(fallback));
        return scalar<bool>(at(key), child(key), "true or false");
    }
    std::string text(const std::string &key, std::optional<std::string> fallback = std::nullopt) const {
        if (!has(key)) return fallback_or(key, fallback);
        return scalar<std::string>(at(key), child(key), "a string");
    }
    std::vector<double> numbers(const std::string &key, size_t count) const {
        if (!has(key)) fail_key(key, "is required");
        const YAML::Node n = at(key);
        if (!n.IsSequence() || n.size() != count)
            fail(n, child(key), "expected a list of " + std::to_string(count) + " numbers");
        std::vector<double> out;
        for (size_t i = 0; i < count; i++) {
            double v = scalar<double>(n[i], child(key) + "[" + std::to_string(i) + "]", "a number");
            if (!std::isfinite(v)) fail(n[i], child(key), "must be finite");
            out.push_back(v);
        }
        return out;
    }
    Vec3 vec3(const std::string &key, std::optional<Vec3> fallback = std::nullopt) const {
        if (!has(key)) return fallback_or(key, fallback);
        auto v = numbers(key, 3);
        return {v[0], v[1], v[2]};
    }

private:
    template <class T>
    T fallback_or(const std::string &key, const std::optional<T> &fallback) const {
        if (!fallback) fail(node_, child(key), "is required");
        ctx_.defaulted.push_back(child(key));
        return *fallback;
    }

    const YAML::Node node_;
    std::string path_;
    Context &ctx_;
};

GateKind parse_gate_kind(const Fields &f, const std::string &key) {
    auto name = f.text(key);
    if (name == "not") return GateKind::not_gate;
    if (name == "hadamard") return GateKind::hadamard;
    if (name == "custom") return GateKind::custom;
    f.fail_key(key, "expected not, hadamard or custom, got '" + name + "'");
}

PulseShape parse_shape(const Fields &f, const std::string &key) {
    auto name = f.text(key, "gaussian");
    if (name == "gaussian") return PulseShape::gaussian;
    if (name == "soft_square") return PulseShape::soft_square;
    f.fail_key(key, "expected gaussian or soft_square, got '" + name + "'");
}

std::string gate_name(GateKind k) {
    switch (k) {
        case GateKind::not_gate:
            return "not";
        case GateKind::hadamard:
            return "hadamard";
        case GateKind::custom:
            break;
    }
    return "custom";
}

std::string reference_name(Reference r) {
    switch (r) {
        case Reference::ideal:
            return "ideal";
        case Reference::initial:
            return "initial";
        case Reference::none:
            break;
    }
    return "none";
}

template <class F>
void each_item(const Fields &f, const std::string &key, F &&fn) {
    if (!f.has(key)) return;
    YAML::Node list = f.at(key);
    if (!list.IsSequence()) f.fail(list, f.child(key), "expected a list");
    for (size_t i = 0; i < list.size(); i++) fn(list[i], f.child(key) + "[" + std::to_string(i) + "]");
}

void check_rate(const Fields &f, const std::string &key, double gamma, bool feedback) {
    if (gamma < 0 && !feedback) f.fail_key(key, "negative rate needs feedback: true");
}

}  // namespace

LindbladOp LindbladConfig::to_op() const {
    if (op == "custom") {
        LindbladOp l;
        l.alpha0 = {re[0], im[0]};
        for (int i = 0; i < 3; i++) l.alpha[i] = {re[i + 1], im[i + 1]};
        l.gamma = gamma;
        return l;
    }
    return LindbladOp::from_matrix(steady_operator(parse_steady_kind(op)), gamma);
}

Scenario parse_scenario(const YAML::Node &root, const std::string &source) {
    Context ctx{source, {}};
    if (!root || root.IsNull()) throw ScenarioError(source, "", 0, 0, "empty scenario");
    Fields top(root, "", ctx,
               {"schema_version", "name", "initial_bloch", "omega_L", "seed", "schedule", "gates", "axis_rotation",
                "lindblad", "noise", "measurements", "beretta", "bath", "combine_23", "feedback", "integrator", "run",
                "outputs"});
    Scenario s;
    s.schema_version = static_cast<int>(top.integer("schema_version"));
    if (s.schema_version != kSchemaVersion)
        top.fail_key("schema_version", "unsupported version " + std::to_string(s.schema_version));
    s.name = top.text("name", "");
    s.initial_bloch = top.vec3("initial_bloch");
    if (s.initial_bloch.norm() > 1 + 1e-9) top.fail_key("initial_bloch", "|P| exceeds 1");
    s.omega_L = top.number("omega_L", 0.2675);
    if (!(s.omega_L > 0)) top.fail_key("omega_L", "must be positive");
    long long seed = top.integer("seed", 0);
    if (seed < 0) top.fail_key("seed", "must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
    s.feedback = top.flag("feedback", false);
    s.combine_23 = top.flag("combine_23", false);

    if (top.has("schedule")) {
        Fields f(top.at("schedule"), "schedule", ctx, {"bias_edge", "extra_periods"});
        s.bias_edge = f.number("bias_edge", 0.005);
        if (!(s.bias_edge > 0)) f.fail_key("bias_edge", "must be positive");
        s.extra_periods = static_cast<int>(f.integer("extra_periods", 0));
        if (s.extra_periods < 0) f.fail_key("extra_periods", "must be >= 0");
    } else {
        ctx.defaulted.push_back("schedule");
    }

    each_item(top, "gates", [&](const YAML::Node &n, const std::string &path) {
        Fields f(n, path, ctx, {"kind", "delay_periods", "width", "shape", "omega"});
        GateConfig g;
        g.kind = parse_gate_kind(f, "kind");
        g.delay_periods = static_cast<int>(f.integer("delay_periods", 2));
        if (g.delay_periods < 1) f.fail_key("delay_periods", "must be >= 1");
        g.width = f.number("width", 0.47);
        if (!(g.width > 0)) f.fail_key("width", "must be positive");
        g.shape = parse_shape(f, "shape");
        if (g.kind == GateKind::custom) {
            auto c = f.numbers("omega", 4);
            std::copy(c.begin(), c.end(), g.custom.begin());
        } else if (f.has("omega")) {
            f.fail_key("omega", "only custom gates take omega");
        }
        s.gates.push_back(g);
    });

    if (top.has("axis_rotation")) {
        Fields f(top.at("axis_rotation"), "axis_rotation", ctx, {"width", "center", "from", "to"});
        AxisRotation rot;
        rot.step.a = f.number("width");
        if (!(rot.step.a > 0)) f.fail_key("width", "must be positive");
        rot.step.t0 = f.number("center");
        rot.from = f.vec3("from", Vec3{0, 0, 1});
        rot.to = f.vec3("to");
        if (std::abs(rot.from.norm() - 1) > 1e-9) f.fail_key("from", "must be a unit vector");
        if (std::abs(rot.to.norm() - 1) > 1e-9) f.fail_key("to", "must be a unit vector");
        s.axis_rotation = rot;
    }

    each_item(top, "lindblad", [&](const YAML::Node &n, const std::string &path) {
        Fields f(n, path, ctx, {"operator", "gamma", "re", "im"});
        LindbladConfig l;
        l.op = f.text("operator");
        if (l.op == "custom") {
            auto re = f.numbers("re", 4), im = f.numbers("im", 4);
            std::copy(re.begin(), re.end(), l.re.begin());
            std::copy(im.begin(), im.end(), l.im.begin());
        } else {
            try {
                parse_steady_kind(l.op);
            } catch (const std::invalid_argument &e) {
                f.fail_key("operator", e.what());
            }
            if (f.has("re") || f.has("im")) f.fail_key("re", "only custom operators take coefficients");
        }
        l.gamma = f.number("gamma");
        check_rate(f, "gamma", l.gamma, s.feedback);
        s.lindblads.push_back(l);
    });

    if (top.has("noise")) {
        Fields f(top.at("noise"), "noise", ctx, {"count", "start", "end", "width", "edge", "gamma", "operator", "friction"});
        auto &nz = s.noise;
        nz.count = static_cast<int>(f.integer("count"));
        if (nz.count < 0) f.fail_key("count", "must be >= 0");
        nz.width = f.number("width", 0.47);
        if (!(nz.width > 0)) f.fail_key("width", "must be positive");
        nz.edge = f.number("edge", 0.02);
        if (!(nz.edge > 0)) f.fail_key("edge", "must be positive");
        nz.gamma = f.number("gamma");
        check_rate(f, "gamma", nz.gamma, s.feedback);
        nz.op = f.text("operator", "random");
        if (nz.op != "random") {
            try {
                parse_steady_kind(nz.op);
            } catch (const std::invalid_argument &e) {
                f.fail_key("operator", e.what());
            }
        }
        nz.friction = f.flag("friction", false);
        if (nz.count > 0) {
            nz.start = f.number("start");
            nz.end = f.number("end");
            if (nz.end - nz.start < nz.count * nz.width - 1e-9) f.fail_key("end", "window is shorter than count x width");
        }
    }

    each_item(top, "measurements", [&](const YAML::Node &n, const std::string &path) {
        Fields f(n, path, ctx, {"start", "gamma", "direction", "halt_precession"});
        MeasurementConfig m;
        m.start = f.number("start");
        m.gamma = f.number("gamma");
        if (!(m.gamma > 0)) f.fail_key("gamma", "must be positive");
        m.direction = f.vec3("direction");
        if (!(m.direction.norm() > 0)) f.fail_key("direction", "must be nonzero");
        m.direction = (1 / m.direction.norm()) * m.direction;
        m.halt_precession = f.flag("halt_precession", true);
        s.measurements.push_back(m);
    });

    if (top.has("beretta")) {
        Fields f(top.at("beretta"), "beretta", ctx, {"gamma2"});
        s.beretta = BerettaSpec{f.number("gamma2")};
        if (!(s.beretta->gamma2 >= 0)) f.fail_key("gamma2", "must be >= 0");
    }

    if (top.has("bath")) {
        Fields f(top.at("bath"), "bath", ctx, {"kind", "gamma3", "temperature"});
        BathSpec b;
        auto kind = f.text("kind", "korsch");
        if (kind == "korsch")
            b.kind = BathKind::korsch;
        else if (kind == "beretta")
            b.kind = BathKind::beretta;
        else
            f.fail_key("kind", "expected korsch or beretta, got '" + kind + "'");
        b.gamma3 = f.number("gamma3");
        if (!(b.gamma3 >= 0)) f.fail_key("gamma3", "must be >= 0");
        b.temperature = f.number("temperature");
        if (!(b.temperature > 0)) f.fail_key("temperature", "must be positive");
        s.bath = b;
    }

    if (top.has("integrator")) {
        Fields f(top.at("integrator"), "integrator", ctx,
                 {"base_step", "pulse_refinement", "validate_every", "samples", "tolerances"});
        auto &c = s.integrator;
        c.base_step = f.number("base_step", 0.0);
        c.pulse_refinement = static_cast<int>(f.integer("pulse_refinement", 50));
        c.validate_every = static_cast<int>(f.integer("validate_every", 100));
        c.samples = static_cast<int>(f.integer("samples", 500));
        if (f.has("tolerances")) {
            Fields t(f.at("tolerances"), "integrator.tolerances", ctx, {"hermiticity", "trace", "positivity"});
            c.tolerances.hermiticity = t.number("hermiticity", 1e-12);
            c.tolerances.trace = t.number("trace", 1e-12);
            c.tolerances.positivity = t.number("positivity", 1e-9);
        } else {
            ctx.defaulted.push_back("integrator.tolerances");
        }
        try {
            c.validate();
        } catch (const std::invalid_argument &e) {
            f.fail(f.node(), "integrator", e.what());
        }
    } else {
        ctx.defaulted.push_back("integrator");
    }

    Schedule schedule;
    try {
        schedule = schedule_of(s);
    } catch (const std::invalid_argument &e) {
        top.fail_key("gates", e.what());
    }

    std::optional<double> t_end;
    if (top.has("run")) {
        Fields f(top.at("run"), "run", ctx, {"t_end"});
        if (f.has("t_end")) {
            t_end = f.number("t_end");
            if (!(*t_end > 0)) f.fail_key("t_end", "must be positive");
        }
    }
    if (t_end) {
        s.t_end = *t_end;
    } else {
        // First Larmor-grid time covering the gates, noise and measurements.
        double target = std::max(schedule.T_f, 10 * schedule.T_L);
        if (s.noise.count > 0) target = std::max(target, s.noise.end);
        for (const auto &m : s.measurements) target = std::max(target, m.window().t2);
        double horizon = target + 2 * schedule.T_L;
        for (const auto &g : schedule.gates) horizon += g.bias.halt_duration();
        s.t_end = target;
        for (double t : schedule.larmor_grid(horizon))
            if (t >= target - 1e-9) {
                s.t_end = t;
                break;
            }
        ctx.defaulted.push_back("run.t_end");
    }
    if (s.t_end < schedule.T_f) top.fail_key("run", "t_end ends before the last gate");

    if (top.has("outputs")) {
        Fields f(top.at("outputs"), "outputs", ctx, {"reference", "grid_report"});
        auto ref = f.text("reference", "ideal");
        if (ref == "ideal")
            s.reference = Reference::ideal;
        else if (ref == "initial")
            s.reference = Reference::initial;
        else if (ref == "none")
            s.reference = Reference::none;
        else
            f.fail_key("reference", "expected ideal, initial or none, got '" + ref + "'");
        s.grid_report = f.flag("grid_report", true);
    } else {
        ctx.defaulted.push_back("outputs");
    }

    s.defaulted = std::move(ctx.defaulted);
    return s;
}

YAML::Node load_yaml(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path, "", 0, 0, "cannot open file");
    try {
        return YAML::Load(in);
    } catch (const YAML::ParserException &e) {
        throw ScenarioError(path, "", e.mark.line + 1, e.mark.column + 1, e.msg);
    }
}

Scenario parse_scenario_text(const std::string &text, const std::string &source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException &e) {
        throw ScenarioError(source, "", e.mark.line + 1, e.mark.column + 1, e.msg);
    }
    return parse_scenario(root, source);
}

Scenario load_scenario(const std::string &path) { return parse_scenario(load_yaml(path), path); }

void set_path(YAML::Node &root, const std::string &path, const std::string &value, const std::string &source) {
    auto fail = [&](const std::string &msg) { throw ScenarioError(source, path, 0, 0, msg); };
    if (path.empty()) fail("empty parameter path");
    // Split "a.b[2].c" into keys and indices.
    std::vector<std::variant<std::string, size_t>> steps;
    std::string token;
    for (size_t i = 0; i <= path.size(); i++) {
        char c = i < path.size() ? path[i] : '.';
        if (c == '.' || c == '[') {
            bool after_index = i > 0 && path[i - 1] == ']';
            if (!token.empty())
                steps.emplace_back(token);
            else if (c == '.' && !after_index)
                fail("malformed parameter path");
            if (c == '.' && i + 1 == path.size()) fail("malformed parameter path");
            token.clear();
            if (c == '[') {
                size_t close = path.find(']', i);
                if (close == std::string::npos) fail("unclosed index");
                try {
                    steps.emplace_back(static_cast<size_t>(std::stoul(path.substr(i + 1, close - i - 1))));
                } catch (const std::exception &) {
                    fail("bad index");
                }
                i = close;
            }
        } else {
            token += c;
        }
    }
    // Walk by reassignment so every step aliases into root.
    std::vector<YAML::Node> chain{root};
    for (size_t k = 0; k + 1 < steps.size(); k++) {
        YAML::Node cur = chain.back();
        YAML::Node next;
        if (auto *key = std::get_if<std::string>(&steps[k])) {
            if (!cur.IsMap() || !cur[*key]) fail("no such field");
            next = cur[*key];
        } else {
            size_t idx = std::get<size_t>(steps[k]);
            if (!cur.IsSequence() || idx >= cur.size()) fail("index out of range");
            next = cur[idx];
        }
        chain.push_back(next);
    }
    YAML::Node parent = chain.back();
    if (auto *key = std::get_if<std::string>(&steps.back())) {
        if (!parent.IsMap() || !parent[*key]) fail("no such field");
        if (!parent[*key].IsScalar()) fail("only scalar fields can be swept");
        parent[*key] = value;
    } else {
        size_t idx = std::get<size_t>(steps.back());
        if (!parent.IsSequence() || idx >= parent.size()) fail("index out of range");
        if (!parent[idx].IsScalar()) fail("only scalar fields can be swept");
        parent[idx] = value;
    }
}

namespace {

void put(YAML::Emitter &out, const char *key, double v) { out << YAML::Key << key << YAML::Value << format_double(v); }

void put_vec(YAML::Emitter &out, const char *key, Vec3 v) {
    out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << format_double(v.x)
        << format_double(v.y) << format_double(v.z) << YAML::EndSeq;
}

void put_list(YAML::Emitter &out, const char *key, const std::array<double, 4> &v) {
    out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double x : v) out << format_double(x);
    out << YAML::EndSeq;
}

}  // namespace

std::string resolved_yaml(const Scenario &s) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "schema_version" << YAML::Value << s.schema_version;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << s.name;
    put_vec(out, "initial_bloch", s.initial_bloch);
    put(out, "omega_L", s.omega_L);
    out << YAML::Key << "seed" << YAML::Value << s.seed;
    out << YAML::Key << "feedback" << YAML::Value << s.feedback;
    out << YAML::Key << "combine_23" << YAML::Value << s.combine_23;
    out << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
    put(out, "bias_edge", s.bias_edge);
    out << YAML::Key << "extra_periods" << YAML::Value << s.extra_periods << YAML::EndMap;
    out << YAML::Key << "gates" << YAML::Value << YAML::BeginSeq;
    for (const auto &g : s.gates) {
        out << YAML::BeginMap << YAML::Key << "kind" << YAML::Value << gate_name(g.kind);
        out << YAML::Key << "delay_periods" << YAML::Value << g.delay_periods;
        put(out, "width", g.width);
        out << YAML::Key << "shape" << YAML::Value << to_string(g.shape);
        if (g.kind == GateKind::custom) put_list(out, "omega", g.custom);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    if (s.axis_rotation) {
        out << YAML::Key << "axis_rotation" << YAML::Value << YAML::BeginMap;
        put(out, "width", s.axis_rotation->step.a);
        put(out, "center", s.axis_rotation->step.t0);
        put_vec(out, "from", s.axis_rotation->from);
        put_vec(out, "to", s.axis_rotation->to);
        out << YAML::EndMap;
    }
    out << YAML::Key << "lindblad" << YAML::Value << YAML::BeginSeq;
    for (const auto &l : s.lindblads) {
        out << YAML::BeginMap << YAML::Key << "operator" << YAML::Value << l.op;
        put(out, "gamma", l.gamma);
        if (l.op == "custom") {
            put_list(out, "re", l.re);
            put_list(out, "im", l.im);
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "count" << YAML::Value << s.noise.count;
    if (s.noise.count > 0) {
        put(out, "start", s.noise.start);
        put(out, "end", s.noise.end);
    }
    put(out, "width", s.noise.width);
    put(out, "edge", s.noise.edge);
    put(out, "gamma", s.noise.gamma);
    out << YAML::Key << "operator" << YAML::Value << s.noise.op;
    out << YAML::Key << "friction" << YAML::Value << s.noise.friction << YAML::EndMap;
    out << YAML::Key << "measurements" << YAML::Value << YAML::BeginSeq;
    for (const auto &m : s.measurements) {
        out << YAML::BeginMap;
        put(out, "start", m.start);
        put(out, "gamma", m.gamma);
        put_vec(out, "direction", m.direction);
        out << YAML::Key << "halt_precession" << YAML::Value << m.halt_precession << YAML::EndMap;
    }
    out << YAML::EndSeq;
    if (s.beretta) {
        out << YAML::Key << "beretta" << YAML::Value << YAML::BeginMap;
        put(out, "gamma2", s.beretta->gamma2);
        out << YAML::EndMap;
    }
    if (s.bath) {
        out << YAML::Key << "bath" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "kind" << YAML::Value << (s.bath->kind == BathKind::korsch ? "korsch" : "beretta");
        put(out, "gamma3", s.bath->gamma3);
        put(out, "temperature", s.bath->temperature);
        out << YAML::EndMap;
    }
    const auto &c = s.integrator;
    out << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
    put(out, "base_step", c.base_step);
    out << YAML::Key << "pulse_refinement" << YAML::Value << c.pulse_refinement;
    out << YAML::Key << "validate_every" << YAML::Value << c.validate_every;
    out << YAML::Key << "samples" << YAML::Value << c.samples;
    out << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap;
    put(out, "hermiticity", c.tolerances.hermiticity);
    put(out, "trace", c.tolerances.trace);
    put(out, "positivity", c.tolerances.positivity);
    out << YAML::EndMap << YAML::EndMap;
    out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
    put(out, "t_end", s.t_end);
    out << YAML::EndMap;
    out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "reference" << YAML::Value << reference_name(s.reference);
    out << YAML::Key << "grid_report" << YAML::Value << s.grid_report << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::uint64_t scenario_hash(const Scenario &s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : resolved_yaml(s)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char *digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; i--, v >>= 4) out[i] = digits[v & 15];
    return out;
}

Schedule schedule_of(const Scenario &s) {
    std::vector<GateSpec> specs;
    for (const auto &g : s.gates) {
        CMat2 omega;
        if (g.kind == GateKind::custom) omega = compose({g.custom[0], {g.custom[1], g.custom[2], g.custom[3]}});
        specs.push_back({g.kind, omega, g.delay_periods, g.width, g.shape});
    }
    return build_schedule(specs, {s.omega_L, s.bias_edge, s.extra_periods});
}

double draw_coefficient(std::mt19937_64 &rng) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2 * u - 1;
}

LindbladOp NoisePulse::to_op(double gamma, double edge) const {
    LindbladOp l;
    l.alpha0 = {a[0], b[0]};
    for (int i = 0; i < 3; i++) l.alpha[i] = {a[i + 1], b[i + 1]};
    l.envelope = SoftSquarePulse{t1, t2, edge, Normalization::unit_peak};
    l.gamma = gamma;
    return l;
}

std::vector<NoisePulse> draw_noise_pulses(const Scenario &s, const Schedule &schedule, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<NoisePulse> out;
    auto draw = [&](double t1, double t2, bool friction) {
        NoisePulse p{t1, t2, {}, {}, friction};
        for (auto &v : p.a) v = draw_coefficient(rng);
        for (auto &v : p.b) v = draw_coefficient(rng);
        out.push_back(p);
    };
    const auto &nz = s.noise;
    std::optional<LindbladOp> fixed;
    if (nz.op != "random") fixed = LindbladOp::from_matrix(steady_operator(parse_steady_kind(nz.op)), 1);
    for (int k = 0; k < nz.count; k++) {
        double spacing = nz.count > 1 ? (nz.end - nz.start - nz.width) / (nz.count - 1) : 0;
        double t1 = nz.start + k * spacing;
        if (!fixed) {
            draw(t1, t1 + nz.width, false);
            continue;
        }
        NoisePulse p{t1, t1 + nz.width, {}, {}, false};
        p.a[0] = fixed->alpha0.real();
        p.b[0] = fixed->alpha0.imag();
        for (int i = 0; i < 3; i++) {
            p.a[i + 1] = fixed->alpha[i].real();
            p.b[i + 1] = fixed->alpha[i].imag();
        }
        out.push_back(p);
    }
    if (nz.friction)
        for (const auto &g : schedule.gates) draw(g.t1, g.t2, true);
    return out;
}

DensityMatrix ideal_reference(const Scenario &s) {
    CMat2 u = CMat2::identity();
    for (const auto &g : schedule_of(s).gates) {
        // exp(−i(π/2)Ω): the gate pulse carries area π/2.
        auto e = eigh(g.omega);
        CMat2 phase = CMat2::zero();
        for (int i = 0; i < 2; i++) phase(i, i) = std::exp(cplx(0, -std::numbers::pi / 2 * e.values[i]));
        u = e.vectors * phase * e.vectors.adjoint() * u;
    }
    CMat2 rho = u * bloch_to_density(s.initial_bloch).matrix() * u.adjoint();
    return DensityMatrix::unchecked(hermitian_part(rho));
}

RunInputs prepare_run(const Scenario &s, std::uint64_t seed) {
    RunInputs in;
    in.schedule = schedule_of(s);
    in.noise = draw_noise_pulses(s, in.schedule, seed);
    auto &g = in.generators;
    g.hamiltonian.omega_L = s.omega_L;
    g.hamiltonian.gates = in.schedule.gates;
    g.hamiltonian.axis_rotation = s.axis_rotation;
    for (const auto &l : s.lindblads) g.lindblads.push_back(l.to_op());
    for (const auto &p : in.noise) g.lindblads.push_back(p.to_op(s.noise.gamma, s.noise.edge));
    for (const auto &m : s.measurements) {
        auto w = m.window();
        auto op = LindbladOp::from_matrix(sigma_dot(w.direction), m.gamma, w.envelope());
        op.measurement = true;
        g.lindblads.push_back(op);
        if (m.halt_precession) g.hamiltonian.halts.push_back(measurement_halt(w));
        in.extra_samples.push_back(w.t1);
        in.extra_samples.push_back(w.t2);
    }
    g.beretta = s.beretta;
    g.bath = s.bath;
    g.combine_23 = s.combine_23;
    g.feedback = s.feedback;
    in.extra_samples.push_back(in.schedule.T_f);
    return in;
}

}  // namespace qme
