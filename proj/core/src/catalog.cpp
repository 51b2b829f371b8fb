#include "caflow/catalog.hpp"

#include <charconv>

namespace caflow {

namespace {

bool parse_suffix_int(const std::string& name, const std::string& prefix, int* value) {
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) return false;
    const char* begin = name.data() + prefix.size();
    const char* end = name.data() + name.size();
    auto [ptr, ec] = std::from_chars(begin, end, *value);
    return ec == std::errc() && ptr == end;
}

} // namespace

LocalRule catalog_rule(const std::string& name) {
    if (name == "identity") return identity_rule(2);
    if (name == "shift") return shift_rule(2, 1);
    if (name == "rshift") return shift_rule(2, -1);
    int v = 0;
    if (parse_suffix_int(name, "shift", &v)) return shift_rule(2, v);
    if (parse_suffix_int(name, "rule", &v)) return elementary_rule(v);
    if (parse_suffix_int(name, "prod", &v)) {
        // sigma x sigma^r on the product alphabet {0,1}x{0,1}.
        LocalRule r = product_rule(shift_rule(2, 1), shift_rule(2, v));
        r.label = "prod" + std::to_string(v);
        return r;
    }
    if (parse_suffix_int(name, "id_x_shift", &v)) {
        LocalRule r = product_rule(identity_rule(2), shift_rule(2, v));
        r.label = name;
        return r;
    }
    if (name == "shift2_x_id") {
        LocalRule r = product_rule(shift_rule(2, 2), identity_rule(2));
        r.label = name;
        return r;
    }
    throw ConfigError("unknown catalog rule: " + name);
}

std::vector<CatalogEntry> rule_catalog() {
    std::vector<CatalogEntry> entries;
    auto add = [&entries](const std::string& name, const std::string& summary) {
        LocalRule r = catalog_rule(name);
        entries.push_back(CatalogEntry{name, summary, r.k(), r.radius, is_bipermutative(r)});
    };
    add("identity", "identity in radius-0 form");
    add("shift", "left shift sigma");
    add("shift2", "sigma^2");
    add("shift3", "sigma^3");
    add("rshift", "right shift sigma^-1");
    add("prod2", "sigma x sigma^2 on the 4-symbol product alphabet");
    add("prod3", "sigma x sigma^3 on the 4-symbol product alphabet");
    add("id_x_shift2", "identity x sigma^2 product");
    add("shift2_x_id", "sigma^2 x identity product");
    for (int code = 0; code < 256; ++code)
        add("rule" + std::to_string(code), "elementary rule " + std::to_string(code));
    return entries;
}

MeasureModel preset_measure(const std::string& name, int k_hint) {
    if (name == "uniform") return MeasureModel::uniform(k_hint < 2 ? 2 : k_hint);
    if (name == "bernoulli_1_3")
        return MeasureModel::bernoulli({Rational(1, 3), Rational(2, 3)});
    if (name == "sturmian") return MeasureModel::sturmian();
    if (name == "markov_9_1") {
        std::vector<std::vector<Rational>> P{{Rational(9, 10), Rational(1, 10)},
                                             {Rational(1, 10), Rational(9, 10)}};
        return MeasureModel::markov(P);
    }
    if (name == "uniform_x_uniform")
        return MeasureModel::product({MeasureModel::uniform(2), MeasureModel::uniform(2)});
    if (name == "uniform_x_sturmian")
        return MeasureModel::product({MeasureModel::uniform(2), MeasureModel::sturmian()});
    if (name == "bernoulli_x_bernoulli")
        return MeasureModel::product(
            {MeasureModel::bernoulli({Rational(1, 3), Rational(2, 3)}),
             MeasureModel::bernoulli({Rational(1, 3), Rational(2, 3)})});
    throw ConfigError("unknown measure preset: " + name);
}

std::vector<std::string> measure_preset_names() {
    return {"uniform",           "bernoulli_1_3",      "sturmian",
            "markov_9_1",        "uniform_x_uniform",  "uniform_x_sturmian",
            "bernoulli_x_bernoulli"};
}

} // namespace caflow
