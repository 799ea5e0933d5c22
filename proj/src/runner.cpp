#include "whf/runner.hpp"

#include "whf/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace whf {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const char* kComponents[] = {"h_minus", "h_plus", "lambda", "g1"};

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json matrix_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index p = 0; p < m.rows(); ++p) {
        json row = json::array();
        for (Eigen::Index q = 0; q < m.cols(); ++q) row.push_back({number(m(p, q).real()), number(m(p, q).imag())});
        rows.push_back(row);
    }
    return rows;
}

json vector_json(const std::vector<double>& v) {
    json a = json::array();
    for (double d : v) a.push_back(number(d));
    return a;
}

json run_json(const FactorizationResult& r, std::optional<double> phi) {
    const auto& d = r.diagnostics;
    json constants = json::array();
    for (const auto& c : r.state.constants_total) constants.push_back(matrix_json(c));
    json j{{"phi", phi ? number(*phi) : json(nullptr)},
           {"order_reached", r.order},
           {"stopped_early", r.stopped_early},
           {"residual_sup", number(r.residual_sup)},
           {"residual_refined", r.residual_refined ? number(*r.residual_refined) : json(nullptr)},
           {"A", number(d.A)},
           {"inverse_A", d.A > 0.0 ? number(1.0 / d.A) : json(nullptr)},
           {"epsilon_bound", number(d.epsilon_bound)},
           {"C_mu_used", number(d.C_mu_used)},
           {"hoelder_norm", {{"total", number(d.hoelder.total)},
                             {"sup", number(d.hoelder.sup_part)},
                             {"seminorm", number(d.hoelder.seminorm_part)},
                             {"mu", number(d.hoelder.mu)}}},
           {"small_enough", d.small_enough},
           {"c_mu_empirical_lower_bound",
            d.c_mu_empirical_lower_bound ? number(*d.c_mu_empirical_lower_bound) : json(nullptr)},
           {"c_mu_below_empirical", d.c_mu_below_empirical},
           {"plus_step_norms", vector_json(d.plus_step_norms)},
           {"minus_step_norms", vector_json(d.minus_step_norms)},
           {"remainder_norms", vector_json(d.remainder_norms)},
           {"constants_total", constants},
           {"factor_conditions", {{"minus_at_minus_i_defect", number(r.factor_conditions.minus_at_minus_i_defect)},
                                  {"minus_at_minus_i_ok", r.factor_conditions.minus_at_minus_i_ok},
                                  {"infinity_product_defect", number(r.factor_conditions.infinity_product_defect)}}},
           {"min_det_h_minus", number(d.min_det_h_minus)},
           {"min_det_h_plus", number(d.min_det_h_plus)}};
    return j;
}

void append_factors(std::string& out, const FactorizationResult& r, const std::string& phi) {
    const SampledMatrixFunction* parts[] = {&r.h_minus, &r.h_plus, &r.lambda, &r.g1};
    const GridPtr& grid = r.g1.grid_ptr();
    for (std::size_t j = 0; j < grid->size(); ++j) {
        const std::string x = format_number(grid->x(j));
        for (std::size_t c = 0; c < 4; ++c) {
            const CMatrix& m = (*parts[c])[j];
            for (Eigen::Index p = 0; p < m.rows(); ++p)
                for (Eigen::Index q = 0; q < m.cols(); ++q) {
                    out += phi;
                    out += ',';
                    out += x;
                    out += ',';
                    out += kComponents[c];
                    out += ',' + std::to_string(p + 1) + ',' + std::to_string(q + 1) + ',';
                    out += format_number(m(p, q).real());
                    out += ',';
                    out += format_number(m(p, q).imag());
                    out += '\n';
                }
        }
    }
}

class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
    ~OutputSet() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& p : written_) fs::remove(p, ec);
    }
    void write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        written_.push_back(p);
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("output_dir", "cannot write " + p.string());
        f << content;
        f.close();
        if (!f) throw ConfigError("output_dir", "failed writing " + p.string());
    }
    std::vector<fs::path> commit() {
        committed_ = true;
        return written_;
    }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
    bool committed_ = false;
};

RunOptions options_of(const RunConfig& c) {
    RunOptions o;
    o.order = c.order;
    o.atol = c.atol;
    o.route = c.route;
    o.mu = c.mu;
    o.c_mu = c.c_mu;
    o.empirical_c_mu = c.empirical_c_mu;
    o.refine_check = c.refine_check;
    return o;
}

} // namespace

std::string format_number(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string figure_csv(const std::vector<FigureRow>& rows) {
    std::string out = "variant,phi,x,p,q,re,im,abs,x_abs\n";
    for (const auto& r : rows) {
        out += std::to_string(r.variant) + ',' + format_number(r.phi) + ',' + format_number(r.x) + ',' +
               std::to_string(r.p) + ',' + std::to_string(r.q) + ',' + format_number(r.re) + ',' +
               format_number(r.im) + ',' + format_number(r.abs) + ',' + format_number(r.x_abs) + '\n';
    }
    return out;
}

std::string alpha_table(int r_max) {
    std::string out = "r,numerator,denominator,value,bound,holds\n";
    for (const auto& a : alpha_coefficients(r_max)) {
        out += std::to_string(a.r) + ',' + a.numerator + ',' + a.denominator + ',' + format_number(a.value) + ',';
        if (a.r > 3) {
            const double bound = 1.0 / (16.0 * (a.r - 3));
            out += format_number(bound) + ',' + (a.value < bound ? "true" : "false");
        } else {
            out += ',';
        }
        out += '\n';
    }
    return out;
}

FactorizationResult run_custom(const CustomProblem& problem, const GridPtr& grid, const RunOptions& options,
                               const ConstantStrategy& strategy) {
    const PartialIndexProfile profile = split_indices(problem.indices);
    const auto n = static_cast<Eigen::Index>(problem.indices.size());
    const SampledMatrixFunction lambda0 = index_factor(grid, n, profile.k);
    const SampledMatrixFunction m0 = sample(ClosedForm{"custom_m0", problem.m0}, grid);
    return run_factorization(lambda0, m0, profile, options, strategy);
}

std::vector<fs::path> run_experiment(const RunConfig& config) {
    validate_config(config);
    if (config.output_dir.empty()) throw ConfigError("output_dir", "required (or pass --output-dir)");
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw ConfigError("output_dir", "cannot create directory " + dir.string());

    const GridPtr grid = make_grid(config.grid_points);
    const RunOptions options = options_of(config);
    const StrategyPtr strategy = make_strategy(config);

    std::string factors = "phi,x,component,p,q,re,im\n";
    std::vector<FigureRow> remainder_rows;
    json runs = json::array();
    json table = json::array();

    if (config.problem == ProblemKind::Example) {
        std::vector<double> residuals;
        for (double phi : config.phi_list) {
            const FactorizationResult r = run_example(phi, config.variant, grid, options, strategy);
            append_factors(factors, r, format_number(phi));
            const auto rows = figure_rows(config.variant, phi, first_remainder(phi, config.variant, grid, config.route));
            remainder_rows.insert(remainder_rows.end(), rows.begin(), rows.end());
            runs.push_back(run_json(r, phi));
            residuals.push_back(r.residual_sup);
        }
        for (std::size_t k = 0; k < residuals.size(); ++k) {
            json row{{"phi", number(config.phi_list[k])}, {"residual_sup", number(residuals[k])}};
            row["ratio_to_next"] = k + 1 < residuals.size() ? number(residuals[k] / residuals[k + 1]) : json(nullptr);
            table.push_back(row);
        }
    } else {
        const FactorizationResult r = run_custom(*config.custom, grid, options, *strategy);
        append_factors(factors, r, "");
        if (r.state.remainders.size() > 1) {
            // Normalization 1 and variant -1 mark a custom problem.
            auto rows = figure_rows(-1, 1.0, r.state.remainders[1]);
            remainder_rows.insert(remainder_rows.end(), rows.begin(), rows.end());
        }
        runs.push_back(run_json(r, std::nullopt));
        table.push_back({{"phi", nullptr}, {"residual_sup", number(r.residual_sup)}, {"ratio_to_next", nullptr}});
    }

    json alphas = json::array();
    for (const auto& a : alpha_coefficients(config.order))
        alphas.push_back({{"r", a.r}, {"numerator", a.numerator}, {"denominator", a.denominator}, {"value", a.value}});

    json diag{{"problem", config.problem == ProblemKind::Example ? "example" : "custom"},
              {"variant", config.problem == ProblemKind::Example ? json(config.variant) : json(nullptr)},
              {"order", config.order},
              {"grid_points", config.grid_points},
              {"mu", config.mu},
              {"c_mu", config.c_mu},
              {"strategy", config.strategy},
              {"alpha", alphas},
              {"runs", runs},
              {"residual_table", table}};

    OutputSet out(dir);
    out.write("factors.csv", factors);
    out.write("remainders.csv", figure_csv(remainder_rows));
    out.write("diagnostics.json", diag.dump(2) + "\n");
    return out.commit();
}

} // namespace whf
