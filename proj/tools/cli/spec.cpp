#include "spec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace satdesign::cli {

namespace {

// Walks a parsed document, tracking the field path for diagnostics.
class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
        std::string field;
        for (const auto& s : path) field += (field.empty() || s.front() == '[' ? "" : ".") + s;
        std::ostringstream os;
        if (const auto line = line_of(path)) os << "line " << *line << ", ";
        os << "field '" << field << "': " << message;
        throw SpecError(os.str());
    }

    void check_keys(const json& obj, const std::vector<std::string>& path, const std::set<std::string>& allowed) const {
        if (!obj.is_object()) fail(path, "expected an object");
        for (const auto& [key, value] : obj.items()) {
            if (!allowed.count(key)) {
                auto p = path;
                p.push_back(key);
                fail(p, "unknown field");
            }
        }
    }

    double number(const json& v, const std::vector<std::string>& path) const {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) {
            if (auto x = parse_number(v.get<std::string>())) return *x;
            fail(path, "cannot read '" + v.get<std::string>() + "' as a number");
        }
        fail(path, "expected a number");
    }

    double finite_number(const json& v, const std::vector<std::string>& path) const {
        const double x = number(v, path);
        if (!std::isfinite(x)) fail(path, "expected a finite number");
        return x;
    }

    long long integer(const json& v, const std::vector<std::string>& path) const {
        const double x = finite_number(v, path);
        if (x != std::floor(x) || std::abs(x) > 9.0e15) fail(path, "expected an integer");
        return static_cast<long long>(x);
    }

    std::size_t count(const json& v, const std::vector<std::string>& path) const {
        const long long x = integer(v, path);
        if (x < 0) fail(path, "expected a nonnegative integer");
        return static_cast<std::size_t>(x);
    }

    std::uint64_t u64(const json& v, const std::vector<std::string>& path) const {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        return static_cast<std::uint64_t>(count(v, path));
    }

    bool boolean(const json& v, const std::vector<std::string>& path) const {
        if (!v.is_boolean()) fail(path, "expected true or false");
        return v.get<bool>();
    }

    std::string string(const json& v, const std::vector<std::string>& path) const {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const json& v, const std::vector<std::string>& path, bool finite = true) const {
        if (!v.is_array()) fail(path, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto p = path;
            p.push_back("[" + std::to_string(i) + "]");
            out.push_back(finite ? finite_number(v[i], p) : number(v[i], p));
        }
        return out;
    }

    const json& require(const json& obj, const std::vector<std::string>& path, const std::string& key) const {
        if (!obj.contains(key)) {
            auto p = path;
            p.push_back(key);
            fail(p, "missing required field");
        }
        return obj.at(key);
    }

private:
    // Line of the last key of `path`, searching each key after its parent.
    std::optional<std::size_t> line_of(const std::vector<std::string>& path) const {
        std::size_t pos = 0;
        std::optional<std::size_t> found;
        for (const auto& key : path) {
            if (key.front() == '[') continue;
            const auto at = text_.find("\"" + key + "\"", pos);
            if (at == std::string::npos) break;
            pos = at + key.size() + 2;
            found = at;
        }
        if (!found) return std::nullopt;
        return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(*found), '\n'));
    }

    const std::string& text_;
};

using Path = std::vector<std::string>;

Path operator+(Path p, const std::string& key) {
    p.push_back(key);
    return p;
}

const std::set<std::string> kEfficiencyKinds{"constant", "1-x", "1+x", "exp(-x)", "jacobi", "laguerre", "gauss", "cauchy"};
const std::set<std::string> kCriterionKinds{"D", "A", "phi_p", "c", "e", "compound"};
const std::set<std::string> kOracleMethods{"closed_form", "owea", "reduce"};

EfficiencyLiteral read_efficiency(const Reader& r, const json& v, const Path& path) {
    EfficiencyLiteral e;
    e.kind = r.string(r.require(v, path, "kind"), path + "kind");
    if (!kEfficiencyKinds.count(e.kind)) r.fail(path + "kind", "unknown efficiency function '" + e.kind + "'");
    std::set<std::string> keys{"kind"};
    if (e.kind == "jacobi") keys.insert({"u", "v"});
    if (e.kind == "laguerre") keys.insert("u");
    if (e.kind == "cauchy") keys.insert("t");
    r.check_keys(v, path, keys);
    if (v.contains("u")) e.u = r.finite_number(v["u"], path + "u");
    if (v.contains("v")) e.v = r.finite_number(v["v"], path + "v");
    if (e.kind == "cauchy") e.t = r.finite_number(r.require(v, path, "t"), path + "t");
    return e;
}

ModelLiteral read_model(const Reader& r, const json& v, const Path& path) {
    r.check_keys(v, path, {"name", "theta", "efficiency"});
    ModelLiteral m;
    m.name = r.string(r.require(v, path, "name"), path + "name");
    m.theta = r.numbers(r.require(v, path, "theta"), path + "theta");
    if (v.contains("efficiency")) m.efficiency = read_efficiency(r, v["efficiency"], path + "efficiency");
    return m;
}

RegionLiteral read_region(const Reader& r, const json& v, const Path& path) {
    r.check_keys(v, path, {"L", "U", "closed_L", "closed_U"});
    RegionLiteral g;
    g.lower = r.number(r.require(v, path, "L"), path + "L");
    g.upper = r.number(r.require(v, path, "U"), path + "U");
    if (v.contains("closed_L")) g.closed_lower = r.boolean(v["closed_L"], path + "closed_L");
    if (v.contains("closed_U")) g.closed_upper = r.boolean(v["closed_U"], path + "closed_U");
    return g;
}

TransformLiteral read_transform(const Reader& r, const json& v, const Path& path) {
    TransformLiteral t;
    if (v.is_string()) {
        if (v.get<std::string>() != "identity") r.fail(path, "expected \"identity\" or an object");
        t.kind = "identity";
        return t;
    }
    if (!v.is_object()) r.fail(path, "expected \"identity\" or an object");
    if (v.contains("K")) {
        r.check_keys(v, path, {"K"});
        t.kind = "matrix";
        const json& K = v["K"];
        if (!K.is_array() || K.empty()) r.fail(path + "K", "expected a nonempty array of rows");
        for (std::size_t i = 0; i < K.size(); ++i) t.K.push_back(r.numbers(K[i], path + "K" + ("[" + std::to_string(i) + "]")));
        for (const auto& row : t.K) {
            if (row.size() != t.K.front().size() || row.empty()) r.fail(path + "K", "rows must have equal nonzero length");
        }
        return t;
    }
    r.check_keys(v, path, {"a", "epsilon"});
    t.a = r.numbers(r.require(v, path, "a"), path + "a");
    t.kind = "c";
    if (v.contains("epsilon")) {
        t.kind = "epsilon";
        t.epsilon = r.finite_number(v["epsilon"], path + "epsilon");
    }
    return t;
}

CriterionLiteral read_criterion(const Reader& r, const json& v, const Path& path) {
    CriterionLiteral c;
    if (!v.is_object()) r.fail(path, "expected an object");
    c.kind = r.string(r.require(v, path, "criterion"), path + "criterion");
    if (!kCriterionKinds.count(c.kind)) r.fail(path + "criterion", "unknown criterion '" + c.kind + "'");
    if (c.kind == "D" || c.kind == "A") r.check_keys(v, path, {"criterion", "g"});
    if (c.kind == "phi_p") {
        r.check_keys(v, path, {"criterion", "p", "g"});
        c.p = r.finite_number(r.require(v, path, "p"), path + "p");
    }
    if (c.kind == "c") {
        r.check_keys(v, path, {"criterion", "a"});
        c.a = r.numbers(r.require(v, path, "a"), path + "a");
    }
    if (c.kind == "e") {
        r.check_keys(v, path, {"criterion", "index"});
        c.index = r.count(r.require(v, path, "index"), path + "index");
    }
    if (c.kind == "compound") {
        r.check_keys(v, path, {"criterion", "p", "p_prime", "beta"});
        c.inner_p = r.finite_number(r.require(v, path, "p"), path + "p");
        c.outer_p = r.finite_number(r.require(v, path, "p_prime"), path + "p_prime");
        if (v.contains("beta")) {
            const json& b = v["beta"];
            if (b.is_string()) {
                if (b.get<std::string>() != "uniform") r.fail(path + "beta", "expected \"uniform\" or an array");
            } else {
                c.beta = r.numbers(b, path + "beta");
                if (c.beta.empty()) r.fail(path + "beta", "expected a nonempty array");
            }
        }
    }
    if (v.contains("g")) c.transform = read_transform(r, v["g"], path + "g");
    return c;
}

DesignLiteral read_design(const Reader& r, const json& v, const Path& path) {
    r.check_keys(v, path, {"points", "weights"});
    DesignLiteral d;
    d.points = r.numbers(r.require(v, path, "points"), path + "points");
    d.weights = r.numbers(r.require(v, path, "weights"), path + "weights");
    if (d.points.size() != d.weights.size()) r.fail(path, "points and weights differ in length");
    return d;
}

OptionsLiteral read_options(const Reader& r, const json& v, const Path& path) {
    r.check_keys(v, path, {"max_iter", "grad_tol", "multistart", "seed", "epsilon_schedule", "certify", "scan_resolution",
                           "sensitivity_tol", "initial_design"});
    OptionsLiteral o;
    if (v.contains("max_iter")) o.max_iter = static_cast<int>(r.count(v["max_iter"], path + "max_iter"));
    if (v.contains("grad_tol")) o.grad_tol = r.finite_number(v["grad_tol"], path + "grad_tol");
    if (v.contains("multistart")) o.multistart = static_cast<int>(r.count(v["multistart"], path + "multistart"));
    if (v.contains("seed")) o.seed = r.u64(v["seed"], path + "seed");
    if (v.contains("epsilon_schedule")) o.epsilon_schedule = r.numbers(v["epsilon_schedule"], path + "epsilon_schedule");
    if (v.contains("certify")) o.certify = r.boolean(v["certify"], path + "certify");
    if (v.contains("scan_resolution")) o.scan_resolution = r.count(v["scan_resolution"], path + "scan_resolution");
    if (v.contains("sensitivity_tol")) o.sensitivity_tol = r.finite_number(v["sensitivity_tol"], path + "sensitivity_tol");
    if (v.contains("initial_design")) o.initial_design = read_design(r, v["initial_design"], path + "initial_design");
    return o;
}

OracleLiteral read_oracle(const Reader& r, const json& v, const Path& path) {
    OracleLiteral o;
    if (!v.is_object()) r.fail(path, "expected an object");
    o.method = r.string(r.require(v, path, "method"), path + "method");
    if (!kOracleMethods.count(o.method)) r.fail(path + "method", "unknown oracle '" + o.method + "'");
    if (o.method == "closed_form") {
        r.check_keys(v, path, {"method", "tag"});
        o.tag = r.string(r.require(v, path, "tag"), path + "tag");
        if (*o.tag != "D" && *o.tag != "e2" && *o.tag != "e3") r.fail(path + "tag", "expected D, e2 or e3");
    } else if (o.method == "owea") {
        r.check_keys(v, path, {"method", "kappa", "coarse", "refine_radius"});
        if (v.contains("kappa")) o.kappa = r.count(v["kappa"], path + "kappa");
        if (v.contains("coarse")) o.coarse = r.count(v["coarse"], path + "coarse");
        if (v.contains("refine_radius")) o.refine_radius = r.count(v["refine_radius"], path + "refine_radius");
    } else {
        r.check_keys(v, path, {"method"});
    }
    return o;
}

EpsilonLiteral read_epsilon(const Reader& r, const json& v, const Path& path) {
    r.check_keys(v, path, {"a", "p"});
    EpsilonLiteral e;
    e.a = r.numbers(r.require(v, path, "a"), path + "a");
    if (v.contains("p")) e.p = r.finite_number(v["p"], path + "p");
    return e;
}

json number_json(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

json numbers_json(const std::vector<double>& xs) {
    json out = json::array();
    for (double x : xs) out.push_back(number_json(x));
    return out;
}

json design_json(const DesignLiteral& d) {
    return json{{"points", numbers_json(d.points)}, {"weights", numbers_json(d.weights)}};
}

} // namespace

std::string to_string(Mode mode) {
    switch (mode) {
    case Mode::solve: return "solve";
    case Mode::classify: return "classify";
    case Mode::verify: return "verify";
    case Mode::oracle: return "oracle";
    case Mode::epsilon_c: return "epsilon-c";
    case Mode::bench: return "bench";
    case Mode::reproduce_table: return "reproduce-table";
    }
    return "unknown";
}

std::optional<Mode> mode_from_string(const std::string& text) {
    for (Mode m : {Mode::solve, Mode::classify, Mode::verify, Mode::oracle, Mode::epsilon_c, Mode::bench, Mode::reproduce_table}) {
        if (to_string(m) == text) return m;
    }
    return std::nullopt;
}

std::optional<double> parse_number(const std::string& raw) {
    std::string text = raw;
    text.erase(0, text.find_first_not_of(" \t"));
    text.erase(text.find_last_not_of(" \t") + 1);
    if (text == "inf" || text == "+inf" || text == "Infinity") return kInfinity;
    if (text == "-inf" || text == "-Infinity") return -kInfinity;
    auto read = [](const std::string& s) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        const char* first = s.data();
        if (*first == '+') ++first;
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), x);
        if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) return std::nullopt;
        return x;
    };
    const auto slash = text.find('/');
    if (slash == std::string::npos) return read(text);
    const auto num = read(text.substr(0, slash));
    const auto den = read(text.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
}

ProblemSpec parse_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        // Byte offset → line and column.
        const std::size_t at = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(at), '\n');
        const auto nl = text.rfind('\n', at == 0 ? 0 : at - 1);
        const std::size_t column = nl == std::string::npos || at == 0 ? at + 1 : at - nl;
        std::ostringstream os;
        os << "line " << line << ", column " << column << ": ";
        if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
            os << "empty spec";
        } else {
            // Drop the library's own "[json.exception...] parse error at line L, column C: " prefix.
            const std::string what = e.what();
            const auto colon = what.find(": ", what.find("column"));
            os << (colon == std::string::npos ? what : what.substr(colon + 2));
        }
        throw SpecError(os.str());
    }
    Reader r(text);
    const Path root;
    r.check_keys(doc, root, {"mode", "model", "region", "criterion", "options", "design", "oracle", "epsilon_c", "table"});
    ProblemSpec spec;
    if (doc.contains("mode")) {
        const auto text_mode = r.string(doc["mode"], {"mode"});
        spec.mode = mode_from_string(text_mode);
        if (!spec.mode) r.fail({"mode"}, "unknown mode '" + text_mode + "'");
    }
    if (doc.contains("model")) spec.model = read_model(r, doc["model"], {"model"});
    if (doc.contains("region")) spec.region = read_region(r, doc["region"], {"region"});
    if (doc.contains("criterion")) spec.criterion = read_criterion(r, doc["criterion"], {"criterion"});
    if (doc.contains("options")) spec.options = read_options(r, doc["options"], {"options"});
    if (doc.contains("design")) spec.design = read_design(r, doc["design"], {"design"});
    if (doc.contains("oracle")) spec.oracle = read_oracle(r, doc["oracle"], {"oracle"});
    if (doc.contains("epsilon_c")) spec.epsilon_c = read_epsilon(r, doc["epsilon_c"], {"epsilon_c"});
    if (doc.contains("table")) spec.table = static_cast<int>(r.integer(doc["table"], {"table"}));
    return spec;
}

ProblemSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_spec(buffer.str());
}

json to_json(const ProblemSpec& spec) {
    json out = json::object();
    if (spec.mode) out["mode"] = to_string(*spec.mode);
    if (spec.model) {
        json m{{"name", spec.model->name}, {"theta", numbers_json(spec.model->theta)}};
        if (const auto& e = spec.model->efficiency) {
            json ej{{"kind", e->kind}};
            if (e->kind == "jacobi") {
                ej["u"] = e->u;
                ej["v"] = e->v;
            }
            if (e->kind == "laguerre") ej["u"] = e->u;
            if (e->kind == "cauchy") ej["t"] = e->t;
            m["efficiency"] = ej;
        }
        out["model"] = m;
    }
    if (spec.region) {
        json g{{"L", number_json(spec.region->lower)}, {"U", number_json(spec.region->upper)}};
        if (spec.region->closed_lower) g["closed_L"] = *spec.region->closed_lower;
        if (spec.region->closed_upper) g["closed_U"] = *spec.region->closed_upper;
        out["region"] = g;
    }
    if (spec.criterion) {
        const auto& c = *spec.criterion;
        json cj{{"criterion", c.kind}};
        if (c.kind == "compound") {
            cj["p"] = *c.inner_p;
            cj["p_prime"] = *c.outer_p;
            cj["beta"] = c.beta.empty() ? json("uniform") : numbers_json(c.beta);
        }
        if (c.p) cj["p"] = *c.p;
        if (c.kind == "c") cj["a"] = numbers_json(c.a);
        if (c.index) cj["index"] = *c.index;
        if (c.transform) {
            const auto& t = *c.transform;
            if (t.kind == "identity") {
                cj["g"] = "identity";
            } else if (t.kind == "matrix") {
                json K = json::array();
                for (const auto& row : t.K) K.push_back(numbers_json(row));
                cj["g"] = json{{"K", K}};
            } else {
                json tj{{"a", numbers_json(t.a)}};
                if (t.kind == "epsilon") tj["epsilon"] = t.epsilon;
                cj["g"] = tj;
            }
        }
        out["criterion"] = cj;
    }
    if (spec.options) {
        const auto& o = *spec.options;
        json oj = json::object();
        if (o.max_iter) oj["max_iter"] = *o.max_iter;
        if (o.grad_tol) oj["grad_tol"] = *o.grad_tol;
        if (o.multistart) oj["multistart"] = *o.multistart;
        if (o.seed) oj["seed"] = *o.seed;
        if (o.epsilon_schedule) oj["epsilon_schedule"] = numbers_json(*o.epsilon_schedule);
        if (o.certify) oj["certify"] = *o.certify;
        if (o.scan_resolution) oj["scan_resolution"] = *o.scan_resolution;
        if (o.sensitivity_tol) oj["sensitivity_tol"] = *o.sensitivity_tol;
        if (o.initial_design) oj["initial_design"] = design_json(*o.initial_design);
        out["options"] = oj;
    }
    if (spec.design) out["design"] = design_json(*spec.design);
    if (spec.oracle) {
        const auto& o = *spec.oracle;
        json oj{{"method", o.method}};
        if (o.tag) oj["tag"] = *o.tag;
        if (o.kappa) oj["kappa"] = *o.kappa;
        if (o.coarse) oj["coarse"] = *o.coarse;
        if (o.refine_radius) oj["refine_radius"] = *o.refine_radius;
        out["oracle"] = oj;
    }
    if (spec.epsilon_c) out["epsilon_c"] = json{{"a", numbers_json(spec.epsilon_c->a)}, {"p", spec.epsilon_c->p}};
    if (spec.table) out["table"] = *spec.table;
    return out;
}

ModelPtr build_model(const ModelLiteral& literal) {
    ModelOptions options;
    if (const auto& e = literal.efficiency) {
        EfficiencyFunction f;
        using K = EfficiencyFunction::Kind;
        static const std::map<std::string, K> kinds{{"constant", K::constant}, {"1-x", K::one_minus_x}, {"1+x", K::one_plus_x},
                                                    {"exp(-x)", K::exp_neg_x}, {"jacobi", K::jacobi},   {"laguerre", K::laguerre},
                                                    {"gauss", K::gauss},       {"cauchy", K::cauchy}};
        f.kind = kinds.at(e->kind);
        f.u = e->u;
        f.v = e->v;
        f.t = e->t;
        options.efficiency = f;
    }
    const Vector theta = Eigen::Map<const Vector>(literal.theta.data(), static_cast<Eigen::Index>(literal.theta.size()));
    try {
        return builtin_models().make(literal.name, theta, options);
    } catch (const Error& e) {
        throw SpecError(std::string("field 'model': ") + e.what());
    }
}

DesignSpace build_region(const RegionLiteral& literal) {
    try {
        return DesignSpace(literal.lower, literal.upper, literal.closed_lower.value_or(std::isfinite(literal.lower)),
                           literal.closed_upper.value_or(std::isfinite(literal.upper)));
    } catch (const Error& e) {
        throw SpecError(std::string("field 'region': ") + e.what());
    }
}

namespace {

Vector to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

TransformSpec build_transform(const TransformLiteral& t) {
    if (t.kind == "identity") return TransformSpec::identity();
    if (t.kind == "c") return TransformSpec::c_vector(to_vector(t.a));
    if (t.kind == "epsilon") return TransformSpec::epsilon_augmented(to_vector(t.a), t.epsilon);
    Matrix K(static_cast<Eigen::Index>(t.K.size()), static_cast<Eigen::Index>(t.K.front().size()));
    for (std::size_t i = 0; i < t.K.size(); ++i)
        for (std::size_t j = 0; j < t.K[i].size(); ++j) K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.K[i][j];
    return TransformSpec::matrix(K);
}

} // namespace

CriterionSpec build_criterion(const CriterionLiteral& c, std::size_t d) {
    try {
        CriterionSpec spec;
        const TransformSpec transform = c.transform ? build_transform(*c.transform) : TransformSpec::identity();
        if (c.kind == "D") spec = CriterionSpec::phi_p(0.0, transform);
        if (c.kind == "A") spec = CriterionSpec::phi_p(-1.0, transform);
        if (c.kind == "phi_p") spec = CriterionSpec::phi_p(*c.p, transform);
        if (c.kind == "c") spec = CriterionSpec::c(to_vector(c.a));
        if (c.kind == "e") spec = CriterionSpec::e(d, *c.index);
        if (c.kind == "compound") spec = CriterionSpec::mixture(d, *c.inner_p, *c.outer_p, c.beta);
        spec.validate(d);
        return spec;
    } catch (const SpecError&) {
        throw;
    } catch (const Error& e) {
        throw SpecError(std::string("field 'criterion': ") + e.what());
    }
}

Design build_design(const DesignLiteral& literal) {
    try {
        return Design(literal.points, literal.weights);
    } catch (const Error& e) {
        throw SpecError(std::string("field 'design': ") + e.what());
    }
}

SolveOptions build_options(const std::optional<OptionsLiteral>& literal) {
    SolveOptions o;
    if (!literal) return o;
    if (literal->max_iter) o.max_iter = *literal->max_iter;
    if (literal->grad_tol) o.grad_tol = *literal->grad_tol;
    if (literal->multistart) o.multistart = *literal->multistart;
    if (literal->seed) o.seed = *literal->seed;
    if (literal->epsilon_schedule) o.epsilon_schedule = *literal->epsilon_schedule;
    if (literal->certify) o.certify = *literal->certify;
    if (literal->scan_resolution) o.scan_resolution = *literal->scan_resolution;
    if (literal->sensitivity_tol) o.sensitivity_tol = *literal->sensitivity_tol;
    if (literal->initial_design) {
        try {
            o.initial_design = Design(literal->initial_design->points, literal->initial_design->weights);
        } catch (const Error& e) {
            throw SpecError(std::string("field 'options.initial_design': ") + e.what());
        }
    }
    try {
        o.validate();
    } catch (const Error& e) {
        throw SpecError(std::string("field 'options': ") + e.what());
    }
    return o;
}

} // namespace satdesign::cli
