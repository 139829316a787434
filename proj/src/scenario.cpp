#include "sepfx/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sepfx::cli {

using Json = nlohmann::ordered_json;

namespace {

// --- line map -------------------------------------------------------------

// Line of the first character of every value, keyed by path ("roles.D", "variables[2].support").
// The text has already been accepted by the JSON parser.
class LineScanner {
public:
    explicit LineScanner(std::string_view text) : text_(text) {
        skip_ws();
        value("");
    }
    const std::map<std::string, int>& lines() const { return lines_; }

private:
    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
                                       text_[pos_] == '\n')) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }
    std::string string_token() {
        std::string out;
        ++pos_;  // opening quote
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\') out += text_[pos_++];
            out += text_[pos_++];
        }
        ++pos_;
        return out;
    }
    void value(const std::string& path) {
        lines_.emplace(path, line_);
        if (pos_ >= text_.size()) return;
        const char c = text_[pos_];
        if (c == '{') {
            ++pos_;
            skip_ws();
            while (pos_ < text_.size() && text_[pos_] != '}') {
                const std::string key = string_token();
                skip_ws();
                ++pos_;  // colon
                skip_ws();
                value(path.empty() ? key : path + "." + key);
                skip_ws();
                if (text_[pos_] == ',') ++pos_;
                skip_ws();
            }
            ++pos_;
        } else if (c == '[') {
            ++pos_;
            skip_ws();
            for (std::size_t i = 0; pos_ < text_.size() && text_[pos_] != ']'; ++i) {
                value(path + "[" + std::to_string(i) + "]");
                skip_ws();
                if (text_[pos_] == ',') ++pos_;
                skip_ws();
            }
            ++pos_;
        } else if (c == '"') {
            string_token();
        } else {
            while (pos_ < text_.size() && std::string_view(",]} \t\r\n").find(text_[pos_]) == std::string_view::npos)
                ++pos_;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

// --- schema reader --------------------------------------------------------

class Reader {
public:
    explicit Reader(const std::map<std::string, int>& lines) : lines_(lines) {}

    int line_of(std::string path) const {
        for (;;) {
            const auto it = lines_.find(path);
            if (it != lines_.end()) return it->second;
            const auto cut = path.find_last_of(".[");
            if (cut == std::string::npos) return path.empty() ? 1 : line_of("");
            path.resize(cut);
        }
    }
    [[noreturn]] void fail(const std::string& path, const std::string& message) const {
        throw ParseError(line_of(path), path, message);
    }

    void keys(const Json& obj, const std::string& path, const std::set<std::string>& allowed) const {
        if (!obj.is_object()) fail(path, "expected an object");
        for (const auto& [key, _] : obj.items())
            if (!allowed.count(key)) fail(join(path, key), "unknown key '" + key + "'");
    }
    const Json& required(const Json& obj, const std::string& path, const std::string& key) const {
        if (!obj.contains(key)) fail(path, "missing key '" + key + "'");
        return obj.at(key);
    }
    std::string string(const Json& v, const std::string& path) const {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
    }
    int integer(const Json& v, const std::string& path) const {
        if (!v.is_number_integer()) fail(path, "expected an integer");
        const auto x = v.get<long long>();
        if (x < -1000000000LL || x > 1000000000LL) fail(path, "integer out of range");
        return static_cast<int>(x);
    }
    double number(const Json& v, const std::string& path) const {
        if (!v.is_number()) fail(path, "expected a number");
        return v.get<double>();
    }
    const Json& array(const Json& v, const std::string& path) const {
        if (!v.is_array()) fail(path, "expected an array");
        return v;
    }
    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
    static std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

private:
    const std::map<std::string, int>& lines_;
};

// Key path a validation message most likely refers to.
std::string path_for(const std::string& message) {
    static const std::vector<std::pair<std::regex, std::string>> rules{
        {std::regex("^missing role (\\w+)"), "roles.$1"},
        {std::regex("^role (\\w+) "), "roles.$1"},
        {std::regex("^partial table for (\\S+)"), "mechanisms.$1.table"},
        {std::regex("^table of (\\S+) yields"), "mechanisms.$1.table"},
        {std::regex("^(?:unknown|duplicate) parent '[^']*' of (\\S+)"), "mechanisms.$1.parents"},
        {std::regex("^normalization: .* for (\\S+)"), "noise.$1"},
        {std::regex("^normalization: weights of (\\S+) sum"), "noise.$1"},
        {std::regex("^exogenous (\\S+) "), "noise"},
        {std::regex("^endogenous (\\S+) "), "mechanisms"},
        {std::regex("^cyclic"), "mechanisms"},
    };
    for (const auto& [re, fmt] : rules) {
        std::smatch m;
        if (std::regex_search(message, m, re)) return m.format(fmt);
    }
    return "";
}

VariableKind parse_kind(const Reader& r, const Json& v, const std::string& path) {
    const auto s = r.string(v, path);
    if (s == "exogenous") return VariableKind::exogenous;
    if (s == "endogenous") return VariableKind::endogenous;
    r.fail(path, "kind must be \"exogenous\" or \"endogenous\"");
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    Json root;
    try {
        root = Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        int line = 1;
        for (std::size_t i = 0; i < upto; ++i)
            if (text[i] == '\n') ++line;
        std::string what = e.what();
        const auto colon = what.find("syntax error");
        throw ParseError(line, "", colon == std::string::npos ? what : what.substr(colon));
    }

    const LineScanner scanner(text);
    const Reader r(scanner.lines());
    r.keys(root, "", {"name", "description", "variables", "noise", "mechanisms", "roles", "truncation", "calibration"});

    Scenario s;
    if (root.contains("name")) s.name = r.string(root["name"], "name");
    if (root.contains("description")) s.description = r.string(root["description"], "description");
    StructuralModel& m = s.model;

    const auto& vars = r.array(r.required(root, "", "variables"), "variables");
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const auto p = Reader::index("variables", i);
        r.keys(vars[i], p, {"name", "support", "kind"});
        FiniteVariable v;
        v.name = r.string(r.required(vars[i], p, "name"), Reader::join(p, "name"));
        const auto sp = Reader::join(p, "support");
        const auto& support = r.array(r.required(vars[i], p, "support"), sp);
        for (std::size_t j = 0; j < support.size(); ++j) v.support.push_back(r.integer(support[j], Reader::index(sp, j)));
        v.kind = parse_kind(r, r.required(vars[i], p, "kind"), Reader::join(p, "kind"));
        m.variables.push_back(std::move(v));
    }

    const auto& noise = r.required(root, "", "noise");
    if (!noise.is_object()) r.fail("noise", "expected an object");
    for (const auto& [var, weights] : noise.items()) {
        const auto p = Reader::join("noise", var);
        NoiseSpec n;
        n.variable = var;
        for (std::size_t j = 0; j < r.array(weights, p).size(); ++j)
            n.weights.push_back(r.number(weights[j], Reader::index(p, j)));
        m.noise.push_back(std::move(n));
    }

    const auto& mechs = r.required(root, "", "mechanisms");
    if (!mechs.is_object()) r.fail("mechanisms", "expected an object");
    for (const auto& [target, body] : mechs.items()) {
        const auto p = Reader::join("mechanisms", target);
        r.keys(body, p, {"parents", "table"});
        Mechanism mech;
        mech.target = target;
        const auto pp = Reader::join(p, "parents");
        const auto& parents = r.array(r.required(body, p, "parents"), pp);
        for (std::size_t j = 0; j < parents.size(); ++j) mech.parents.push_back(r.string(parents[j], Reader::index(pp, j)));
        const auto tp = Reader::join(p, "table");
        const auto& table = r.array(r.required(body, p, "table"), tp);
        for (std::size_t j = 0; j < table.size(); ++j) mech.table.push_back(r.integer(table[j], Reader::index(tp, j)));
        m.mechanisms.push_back(std::move(mech));
    }

    const auto& roles = r.required(root, "", "roles");
    r.keys(roles, "roles", {role::A, role::A_D, role::A_Y, role::D_A, role::D, role::Y, role::U, role::L, role::M});
    for (const auto& [name, var] : roles.items()) m.roles[name] = r.string(var, Reader::join("roles", name));

    if (root.contains("truncation")) {
        if (!root["truncation"].is_boolean()) r.fail("truncation", "expected true or false");
        m.truncation = root["truncation"].get<bool>();
    }

    if (root.contains("calibration")) {
        const auto& cal = root["calibration"];
        r.keys(cal, "calibration", {"targets", "tolerance"});
        const auto& t = r.required(cal, "calibration", "targets");
        r.keys(t, "calibration.targets", {"d0_a1", "d0_a0", "y1_a1", "y1_a0"});
        zoo::CalibrationTarget c;
        auto field = [&](const char* key) {
            return r.number(r.required(t, "calibration.targets", key), std::string("calibration.targets.") + key);
        };
        c.d0_a1 = field("d0_a1");
        c.d0_a0 = field("d0_a0");
        c.y1_a1 = field("y1_a1");
        c.y1_a0 = field("y1_a0");
        if (cal.contains("tolerance")) c.tolerance = r.number(cal["tolerance"], "calibration.tolerance");
        try {
            c.validate();
        } catch (const Error& e) {
            r.fail("calibration", e.what());
        }
        s.calibration = c;
    }

    const auto report = validate_model(m);
    if (!report.ok()) {
        const auto path = path_for(report.errors.front());
        std::string message;
        for (const auto& e : report.errors) message += (message.empty() ? "" : "; ") + e;
        r.fail(path, message);
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

namespace {

template <class T>
std::string inline_array(const std::vector<T>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + Json(xs[i]).dump();
    return out + "]";
}

}  // namespace

std::string export_scenario(const Scenario& s) {
    const auto& m = s.model;
    std::ostringstream out;
    out << "{\n";
    if (!s.name.empty()) out << "  \"name\": " << Json(s.name).dump() << ",\n";
    if (!s.description.empty()) out << "  \"description\": " << Json(s.description).dump() << ",\n";

    out << "  \"variables\": [\n";
    for (std::size_t i = 0; i < m.variables.size(); ++i) {
        const auto& v = m.variables[i];
        out << "    {\"name\": " << Json(v.name).dump() << ", \"support\": " << inline_array(v.support)
            << ", \"kind\": \"" << (v.kind == VariableKind::exogenous ? "exogenous" : "endogenous") << "\"}"
            << (i + 1 < m.variables.size() ? "," : "") << "\n";
    }
    out << "  ],\n  \"noise\": {\n";
    for (std::size_t i = 0; i < m.noise.size(); ++i)
        out << "    " << Json(m.noise[i].variable).dump() << ": " << inline_array(m.noise[i].weights)
            << (i + 1 < m.noise.size() ? "," : "") << "\n";
    out << "  },\n  \"mechanisms\": {\n";
    for (std::size_t i = 0; i < m.mechanisms.size(); ++i) {
        const auto& mech = m.mechanisms[i];
        out << "    " << Json(mech.target).dump() << ": {\"parents\": " << inline_array(mech.parents)
            << ", \"table\": " << inline_array(mech.table) << "}" << (i + 1 < m.mechanisms.size() ? "," : "") << "\n";
    }
    out << "  },\n  \"roles\": {";
    std::size_t k = 0;
    for (const auto& [r, v] : m.roles) out << (k++ ? ", " : "") << Json(r).dump() << ": " << Json(v).dump();
    out << "},\n  \"truncation\": " << (m.truncation ? "true" : "false");
    if (s.calibration) {
        const auto& c = *s.calibration;
        out << ",\n  \"calibration\": {\"targets\": {\"d0_a1\": " << Json(c.d0_a1).dump()
            << ", \"d0_a0\": " << Json(c.d0_a0).dump() << ", \"y1_a1\": " << Json(c.y1_a1).dump()
            << ", \"y1_a0\": " << Json(c.y1_a0).dump() << "}, \"tolerance\": " << Json(c.tolerance).dump() << "}";
    }
    out << "\n}\n";
    return out.str();
}

Scenario fixture_scenario(const std::string& name) {
    static const std::map<std::string, std::string> descriptions{
        {"toy1", "Surgery trial: death D truncates quality of life Y; U causes both"},
        {"toy1V", "Surgery trial with a U -> D_A pathway (independent mechanisms violated)"},
        {"pie", "Sufficient-component causes for the event; no pie joins A and U"},
        {"with_l", "Treatment-affected measured common cause L of D_A, D and Y"},
        {"adherence", "Smoking-cessation trial: NRT (A=1) vs e-cigarettes (A=0), D non-adherence"},
        {"birthweight", "Maternal smoking A, low birth weight D, infant mortality Y"},
        {"null", "Surgery layout where neither treatment component acts"},
    };
    Scenario s;
    s.name = name;
    s.model = zoo::build_fixture(name);
    if (const auto it = descriptions.find(name); it != descriptions.end()) s.description = it->second;
    if (name == "adherence") s.calibration = zoo::CalibrationTarget::published();
    return s;
}

std::optional<std::array<double, 4>> calibration_residuals(const Scenario& s) {
    if (!s.calibration) return std::nullopt;
    const auto moments = zoo::adherence_moments(s.model);
    const auto& c = *s.calibration;
    const std::array<double, 4> targets{c.d0_a1, c.d0_a0, c.y1_a1, c.y1_a0};
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) out[i] = moments[i] - targets[i];
    return out;
}

std::string scenario_hash(const Scenario& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : export_scenario(s)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sepfx::cli
