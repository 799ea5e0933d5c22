#include "whf/config.hpp"

#include "whf/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

namespace whf {

namespace {

using nlohmann::json;

const std::set<std::string> kKeys{"problem",     "variant",      "phi_list", "order",         "grid_points",
                                  "mu",          "c_mu",         "strategy", "explicit_constants", "output_dir",
                                  "refine_check", "route",       "atol",     "empirical_c_mu", "custom"};

double real_of(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(key, "must be finite");
    return d;
}

int int_of(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
    return v.get<int>();
}

// A number or a [re, im] pair.
cplx complex_of(const json& v, const std::string& key) {
    if (v.is_number()) return {real_of(v, key), 0.0};
    if (v.is_array() && v.size() == 2) return {real_of(v[0], key), real_of(v[1], key)};
    throw ConfigError(key, "expected a number or a [re, im] pair");
}

CMatrix matrix_of(const json& v, const std::string& key) {
    if (!v.is_array() || v.empty()) throw ConfigError(key, "expected a square matrix as a list of rows");
    const auto n = static_cast<Eigen::Index>(v.size());
    CMatrix m(n, n);
    for (Eigen::Index p = 0; p < n; ++p) {
        const json& row = v[static_cast<std::size_t>(p)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw ConfigError(key, "rows must have " + std::to_string(n) + " entries");
        for (Eigen::Index q = 0; q < n; ++q) m(p, q) = complex_of(row[static_cast<std::size_t>(q)], key);
    }
    return m;
}

// {"coef": z, "phase": a, "pole": z, "order": m}: coef e^{i a x} (x - pole)^{-order}; order 0 is a constant.
ExpRational entry_of(const json& v, const std::string& key) {
    if (!v.is_array()) throw ConfigError(key, "an entry is a list of terms");
    ExpRational out;
    for (const json& t : v) {
        if (!t.is_object()) throw ConfigError(key, "a term is an object");
        for (const auto& [k, _] : t.items())
            if (k != "coef" && k != "phase" && k != "pole" && k != "order")
                throw ConfigError(key, "unknown term field '" + k + "'");
        if (!t.contains("coef")) throw ConfigError(key, "term needs 'coef'");
        const cplx c = complex_of(t["coef"], key);
        const double a = t.contains("phase") ? real_of(t["phase"], key) : 0.0;
        const int m = t.contains("order") ? int_of(t["order"], key) : 0;
        if (m == 0) {
            if (a != 0.0) throw ConfigError(key, "an oscillating term needs a pole of order >= 1 to stay in the class");
            if (t.contains("pole")) throw ConfigError(key, "a constant term has no pole");
            out += ExpRational::constant(c);
            continue;
        }
        if (m < 0) throw ConfigError(key, "order must be nonnegative");
        if (!t.contains("pole")) throw ConfigError(key, "term of order >= 1 needs 'pole'");
        const cplx p = complex_of(t["pole"], key);
        if (p.imag() == 0.0) throw ConfigError(key, "poles on the real line are not allowed");
        out += ExpRational::term(c, a, p, m);
    }
    return out;
}

CustomProblem custom_of(const json& v) {
    if (!v.is_object()) throw ConfigError("custom", "expected an object");
    for (const auto& [k, _] : v.items())
        if (k != "indices" && k != "lambda_s" && k != "m0") throw ConfigError("custom." + k, "unknown key");
    if (!v.contains("indices")) throw ConfigError("custom.indices", "required");
    if (!v.contains("m0")) throw ConfigError("custom.m0", "required");
    CustomProblem c;
    const json& idx = v["indices"];
    if (!idx.is_array() || idx.empty()) throw ConfigError("custom.indices", "expected a nonempty integer list");
    for (const json& i : idx) c.indices.push_back(int_of(i, "custom.indices"));
    try {
        split_indices(c.indices);
    } catch (const InvalidArgument& e) {
        throw ConfigError("custom.indices", e.what());
    }
    if (v.contains("lambda_s") && int_of(v["lambda_s"], "custom.lambda_s") != c.indices.back())
        throw ConfigError("custom.lambda_s", "must equal the smallest index");
    const json& m = v["m0"];
    const std::size_t n = c.indices.size();
    if (!m.is_array() || m.size() != n) throw ConfigError("custom.m0", "expected " + std::to_string(n) + " rows");
    c.m0 = ExpRationalMatrix(n);
    for (std::size_t p = 0; p < n; ++p) {
        if (!m[p].is_array() || m[p].size() != n)
            throw ConfigError("custom.m0", "rows must have " + std::to_string(n) + " entries");
        for (std::size_t q = 0; q < n; ++q) c.m0(p, q) = entry_of(m[p][q], "custom.m0");
    }
    return c;
}

} // namespace

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("<document>", "expected a JSON object");
    for (const auto& [k, _] : doc.items())
        if (!kKeys.contains(k)) throw ConfigError(k, "unknown key");

    RunConfig c;
    if (!doc.contains("problem")) throw ConfigError("problem", "required");
    const json& problem = doc["problem"];
    if (problem == "example") c.problem = ProblemKind::Example;
    else if (problem == "custom") c.problem = ProblemKind::Custom;
    else throw ConfigError("problem", "must be \"example\" or \"custom\"");

    if (!doc.contains("order")) throw ConfigError("order", "required");
    c.order = int_of(doc["order"], "order");

    if (c.problem == ProblemKind::Example) {
        if (!doc.contains("variant")) throw ConfigError("variant", "required for the example problem");
        if (!doc.contains("phi_list")) throw ConfigError("phi_list", "required for the example problem");
        if (doc.contains("custom")) throw ConfigError("custom", "only valid for problem \"custom\"");
        c.variant = int_of(doc["variant"], "variant");
        const json& phis = doc["phi_list"];
        if (!phis.is_array()) throw ConfigError("phi_list", "expected a list of numbers");
        for (const json& p : phis) c.phi_list.push_back(real_of(p, "phi_list"));
    } else {
        if (doc.contains("variant")) throw ConfigError("variant", "only valid for problem \"example\"");
        if (doc.contains("phi_list")) throw ConfigError("phi_list", "only valid for problem \"example\"");
        if (!doc.contains("custom")) throw ConfigError("custom", "required for problem \"custom\"");
        c.custom = custom_of(doc["custom"]);
    }

    if (doc.contains("grid_points")) {
        const int g = int_of(doc["grid_points"], "grid_points");
        if (g < 64) throw ConfigError("grid_points", "must be at least 64");
        c.grid_points = static_cast<std::size_t>(g);
    }
    if (doc.contains("mu")) c.mu = real_of(doc["mu"], "mu");
    if (doc.contains("c_mu")) c.c_mu = real_of(doc["c_mu"], "c_mu");
    if (doc.contains("strategy")) {
        if (!doc["strategy"].is_string()) throw ConfigError("strategy", "expected a string");
        c.strategy = doc["strategy"].get<std::string>();
    }
    if (doc.contains("explicit_constants")) {
        const json& list = doc["explicit_constants"];
        if (!list.is_array()) throw ConfigError("explicit_constants", "expected a list of matrices");
        for (const json& m : list) c.explicit_constants.push_back(matrix_of(m, "explicit_constants"));
    }
    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string()) throw ConfigError("output_dir", "expected a string");
        c.output_dir = doc["output_dir"].get<std::string>();
    }
    if (doc.contains("refine_check")) c.refine_check = int_of(doc["refine_check"], "refine_check");
    if (doc.contains("route")) {
        const json& r = doc["route"];
        if (r == "auto") c.route = OperatorRoute::Automatic;
        else if (r == "quadrature") c.route = OperatorRoute::Quadrature;
        else if (r == "closed-form") c.route = OperatorRoute::ClosedForm;
        else throw ConfigError("route", "must be \"auto\", \"quadrature\" or \"closed-form\"");
    }
    if (doc.contains("atol")) c.atol = real_of(doc["atol"], "atol");
    if (doc.contains("empirical_c_mu")) {
        if (!doc["empirical_c_mu"].is_boolean()) throw ConfigError("empirical_c_mu", "expected true or false");
        c.empirical_c_mu = doc["empirical_c_mu"].get<bool>();
    }
    if (c.strategy != "explicit" && doc.contains("explicit_constants"))
        throw ConfigError("explicit_constants", "only valid with strategy \"explicit\"");
    validate_config(c);
    return c;
}

void validate_config(const RunConfig& c) {
    if (c.problem == ProblemKind::Example) {
        if (c.variant < 0 || c.variant > 3) throw ConfigError("variant", "must be 0, 1, 2 or 3");
        if (c.phi_list.empty()) throw ConfigError("phi_list", "must not be empty");
        for (double p : c.phi_list)
            if (!(p > 0.0)) throw ConfigError("phi_list", "values must be positive");
    }
    if (c.order < 1) throw ConfigError("order", "must be at least 1");
    if (c.grid_points < 64) throw ConfigError("grid_points", "must be at least 64");
    if (!(c.mu > 0.0 && c.mu < 1.0)) throw ConfigError("mu", "must lie in (0, 1)");
    if (!(c.c_mu > 0.0)) throw ConfigError("c_mu", "must be positive");
    if (c.refine_check < 1) throw ConfigError("refine_check", "must be at least 1");
    if (!(c.atol >= 0.0)) throw ConfigError("atol", "must be nonnegative");
    if (c.strategy != "canonical-zero" && c.strategy != "explicit" && c.strategy != "minimize-remainder-infinity")
        throw ConfigError("strategy", "must be \"canonical-zero\", \"explicit\" or \"minimize-remainder-infinity\"");
    if (c.strategy == "explicit") {
        if (c.explicit_constants.empty()) throw ConfigError("explicit_constants", "required with strategy \"explicit\"");
        const std::size_t n = c.problem == ProblemKind::Example ? 2 : c.custom->indices.size();
        const std::size_t needed = static_cast<std::size_t>(c.order) - (c.problem == ProblemKind::Example ? 1 : 0);
        if (c.explicit_constants.size() < needed)
            throw ConfigError("explicit_constants", "needs " + std::to_string(needed) + " matrices for order " +
                                                        std::to_string(c.order));
        for (const auto& m : c.explicit_constants)
            if (static_cast<std::size_t>(m.rows()) != n)
                throw ConfigError("explicit_constants", "matrices must be " + std::to_string(n) + " x " + std::to_string(n));
    }
}

StrategyPtr make_strategy(const RunConfig& c) {
    if (c.strategy == "minimize-remainder-infinity") return minimize_remainder_infinity_strategy();
    if (c.strategy == "explicit") {
        // Example runs fix step one through the variant, so the list starts at step two.
        std::vector<CMatrix> total = c.explicit_constants;
        if (c.problem == ProblemKind::Example) total.insert(total.begin(), CMatrix::Zero(2, 2));
        return explicit_strategy(std::move(total));
    }
    return canonical_zero_strategy();
}

} // namespace whf
