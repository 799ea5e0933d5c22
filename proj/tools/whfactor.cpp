#include "whf/errors.hpp"
#include "whf/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw whf::ConfigError("<file>", "cannot read " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw whf::ConfigError("--output", "cannot write " + path);
    f << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate Wiener-Hopf factorization of matrix functions with stable partial indices"};
    app.require_subcommand(1);

    std::string config_path, output_dir;
    std::optional<int> order;
    std::optional<std::size_t> grid_points;
    auto* run = app.add_subcommand("run", "Factorize the problem described by a JSON config");
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--output-dir", output_dir, "Override output_dir");
    run->add_option("--order", order, "Override order");
    run->add_option("--grid-points", grid_points, "Override grid_points");

    int variant = 0;
    std::vector<double> phis;
    std::size_t fig_points = 2048;
    std::string fig_output;
    auto* figures = app.add_subcommand("figures", "Normalized first remainder of the example as CSV");
    figures->add_option("--variant", variant, "Constant variant")->required()->check(CLI::Range(0, 3));
    figures->add_option("--phi", phis, "Parameter values")->required()->delimiter(',');
    figures->add_option("--grid-points", fig_points, "Grid size")->check(CLI::Range(64, 1 << 24));
    figures->add_option("--output", fig_output, "CSV file (default stdout)");

    int r_max = 12;
    std::string alpha_output;
    auto* alphas = app.add_subcommand("alphas", "Exact majorant coefficients as CSV");
    alphas->add_option("--max", r_max, "Largest index")->check(CLI::Range(1, 10000));
    alphas->add_option("--output", alpha_output, "CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) {
            whf::RunConfig config = whf::parse_config(read_file(config_path));
            if (!output_dir.empty()) config.output_dir = output_dir;
            if (order) config.order = *order;
            if (grid_points) config.grid_points = *grid_points;
            for (const auto& p : whf::run_experiment(config)) std::cout << p.string() << '\n';
        } else if (*figures) {
            const auto grid = whf::make_grid(fig_points);
            emit(whf::figure_csv(whf::figure_data(variant, phis, grid)), fig_output);
        } else if (*alphas) {
            emit(whf::alpha_table(r_max), alpha_output);
        }
    } catch (const whf::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
