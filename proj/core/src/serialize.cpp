#include "caflow/serialize.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "caflow/rational.hpp"

namespace caflow {

using nlohmann::json;

Rational parse_rational(const std::string& text) {
    std::string s = text;
    // strip spaces
    std::string t;
    for (char c : s)
        if (!isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.empty()) throw ConfigError("empty rational");
    auto slash = t.find('/');
    try {
        if (slash != std::string::npos) {
            long long num = std::stoll(t.substr(0, slash));
            long long den = std::stoll(t.substr(slash + 1));
            return Rational(num, den);
        }
        auto dot = t.find('.');
        if (dot != std::string::npos) {
            std::string ip = t.substr(0, dot);
            std::string fp = t.substr(dot + 1);
            if (fp.size() > 15) throw ConfigError("decimal literal too long: " + text);
            bool neg = !ip.empty() && ip[0] == '-';
            long long whole = ip.empty() || ip == "-" ? 0 : std::stoll(ip);
            long long den = 1;
            for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
            long long frac = fp.empty() ? 0 : std::stoll(fp);
            long long num = whole * den + (neg ? -frac : frac);
            return Rational(num, den);
        }
        return Rational(std::stoll(t), 1);
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad rational: " + text);
    } catch (const std::out_of_range&) {
        throw ConfigError("rational out of range: " + text);
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_window(const Window& w, const Alphabet& alphabet) {
    std::string out = std::to_string(w.offset) + ":";
    int comps = alphabet.component_count();
    for (int i = 0; i < w.size(); ++i) {
        int s = w.cells[static_cast<std::size_t>(i)];
        if (comps == 1) {
            if (alphabet.size <= 10) {
                out.push_back(static_cast<char>('0' + s));
            } else {
                if (i) out.push_back(',');
                out += std::to_string(s);
            }
        } else {
            if (i) out.push_back(',');
            for (int c = 0; c < comps; ++c)
                out.push_back(static_cast<char>('0' + alphabet.project(s, c)));
        }
    }
    return out;
}

Window parse_window(const std::string& text, const Alphabet& alphabet) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("window text needs '<offset>:<word>'");
    int offset = 0;
    try {
        offset = std::stoi(text.substr(0, colon));
    } catch (...) {
        throw ConfigError("bad window offset: " + text);
    }
    std::string body = text.substr(colon + 1);
    std::vector<Symbol> cells;
    int comps = alphabet.component_count();
    if (comps == 1 && alphabet.size <= 10) {
        for (char c : body) {
            if (c < '0' || c >= '0' + alphabet.size)
                throw ConfigError("window digit out of range");
            cells.push_back(static_cast<Symbol>(c - '0'));
        }
    } else {
        std::stringstream ss(body);
        std::string group;
        while (std::getline(ss, group, ',')) {
            if (comps == 1) {
                int v = std::stoi(group);
                if (v < 0 || v >= alphabet.size) throw ConfigError("window symbol out of range");
                cells.push_back(static_cast<Symbol>(v));
            } else {
                if (static_cast<int>(group.size()) != comps)
                    throw ConfigError("window group arity mismatch");
                std::vector<int> parts;
                for (int c = 0; c < comps; ++c) {
                    int digit = group[static_cast<std::size_t>(c)] - '0';
                    if (digit < 0 || digit >= alphabet.component_size(c))
                        throw ConfigError("window component digit out of range");
                    parts.push_back(digit);
                }
                cells.push_back(static_cast<Symbol>(alphabet.encode(parts)));
            }
        }
    }
    if (cells.empty()) throw ConfigError("empty window");
    return Window(offset, std::move(cells));
}

std::string format_rule_file(const LocalRule& rule) {
    std::string out = "k=" + std::to_string(rule.k()) + " r=" + std::to_string(rule.radius);
    if (!rule.label.empty()) out += " label=" + rule.label;
    out += "\n";
    for (std::size_t i = 0; i < rule.table.size(); ++i) {
        if (i) out += " ";
        out += std::to_string(static_cast<int>(rule.table[i]));
    }
    out += "\n";
    return out;
}

LocalRule parse_rule_file(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) throw ConfigError("rule file: missing header line");
    int k = -1, r = -1;
    std::string label;
    {
        std::istringstream hs(header);
        std::string tok;
        while (hs >> tok) {
            if (tok.rfind("k=", 0) == 0)
                k = std::stoi(tok.substr(2));
            else if (tok.rfind("r=", 0) == 0)
                r = std::stoi(tok.substr(2));
            else if (tok.rfind("label=", 0) == 0)
                label = tok.substr(6);
            else
                throw ConfigError("rule file: bad header token '" + tok + "'");
        }
    }
    if (k < 2 || r < 0) throw ConfigError("rule file: header must set k>=2 and r>=0");
    std::vector<Symbol> table;
    long long v;
    while (in >> v) {
        if (v < 0 || v >= k) throw ConfigError("rule file: symbol out of range");
        table.push_back(static_cast<Symbol>(v));
    }
    return make_rule(k, r, std::move(table), label);
}

namespace {

std::vector<Rational> rational_array(const json& arr, const char* what) {
    if (!arr.is_array()) throw ConfigError(std::string(what) + " must be an array");
    std::vector<Rational> out;
    for (const auto& v : arr) {
        if (v.is_string())
            out.push_back(parse_rational(v.get<std::string>()));
        else if (v.is_number_integer())
            out.push_back(Rational(v.get<long long>(), 1));
        else
            throw ConfigError(std::string(what) + ": probabilities must be rational text");
    }
    return out;
}

MeasureModel measure_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw ConfigError("measure config needs a 'type' field");
    std::string type = j.at("type").get<std::string>();
    if (type == "uniform") {
        int k = j.value("k", 2);
        return MeasureModel::uniform(k);
    }
    if (type == "bernoulli") return MeasureModel::bernoulli(rational_array(j.at("p"), "bernoulli p"));
    if (type == "markov") {
        if (!j.contains("P") || !j.at("P").is_array())
            throw ConfigError("markov config needs a 'P' matrix");
        std::vector<std::vector<Rational>> P;
        for (const auto& row : j.at("P")) P.push_back(rational_array(row, "markov row"));
        std::vector<Rational> pi;
        if (j.contains("pi")) pi = rational_array(j.at("pi"), "markov pi");
        return MeasureModel::markov(P, pi);
    }
    if (type == "product") {
        std::vector<MeasureModel> comps;
        for (const auto& c : j.at("components")) comps.push_back(measure_from_json(c));
        return MeasureModel::product(std::move(comps));
    }
    if (type == "sturmian") {
        SturmianParams params;
        if (j.contains("num")) params.num = j.at("num").get<long long>();
        if (j.contains("den")) params.den = j.at("den").get<long long>();
        if (j.contains("threshold"))
            params.threshold = parse_rational(j.at("threshold").get<std::string>());
        return MeasureModel::sturmian(params);
    }
    throw ConfigError("unknown measure type: " + type);
}

} // namespace

MeasureModel measure_from_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("measure config is not valid JSON");
    return measure_from_json(j);
}

} // namespace caflow
