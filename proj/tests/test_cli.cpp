#include "whf/errors.hpp"
#include "whf/runner.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace whf;
namespace fs = std::filesystem;

namespace {

fs::path scratch_root() { return fs::temp_directory_path() / ("whf_cli_" + std::to_string(::getpid())); }

// Removes the scratch tree when the test binary exits.
struct ScratchCleanup {
    ~ScratchCleanup() {
        std::error_code ec;
        fs::remove_all(scratch_root(), ec);
    }
} scratch_cleanup;

fs::path scratch(const std::string& name) {
    const fs::path p = scratch_root() / name;
    fs::remove_all(p);
    fs::create_directories(p.parent_path());
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

std::string config_key_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

struct NodeFactors {
    std::map<std::string, CMatrix> parts;
};

// factors.csv grouped by (phi, x); every component is 2 x 2 or n x n.
std::map<std::pair<std::string, std::string>, NodeFactors> load_factors(const fs::path& p, Eigen::Index n) {
    std::ifstream f(p);
    std::string line;
    std::getline(f, line);
    REQUIRE(line == "phi,x,component,p,q,re,im");
    std::map<std::pair<std::string, std::string>, NodeFactors> out;
    while (std::getline(f, line)) {
        const auto c = split(line);
        REQUIRE(c.size() == 7);
        auto& parts = out[{c[0], c[1]}].parts;
        auto it = parts.find(c[2]);
        if (it == parts.end()) it = parts.emplace(c[2], CMatrix::Zero(n, n)).first;
        it->second(std::stoi(c[3]) - 1, std::stoi(c[4]) - 1) = {std::stod(c[5]), std::stod(c[6])};
    }
    return out;
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

int run_binary(const std::string& args) {
    const char* bin = std::getenv("WHFACTOR_BIN");
    REQUIRE(bin != nullptr);
    const int status = std::system((std::string(bin) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kExample = R"({"problem":"example","variant":0,"phi_list":[0.2,0.1,0.05],"order":1,"grid_points":512})";

const char* kZeroCustom = R"({"problem":"custom","order":2,"grid_points":256,
  "custom":{"indices":[1,0],"m0":[[[],[]],[[],[]]]}})";

} // namespace

TEST_CASE("config errors name the offending key") {
    CHECK(config_key_of(R"({"problem":"example","variant":5,"phi_list":[0.1],"order":1})") == "variant");
    CHECK(config_key_of(R"({"problem":"example","variant":0,"phi_list":[0.1],"order":2,"strategy":"explicit"})") ==
          "explicit_constants");
    CHECK(config_key_of(R"({"problem":"example","variant":0,"phi_list":[0.1],"order":1,"colour":1})") == "colour");
    CHECK(config_key_of(R"({"problem":"example","variant":0,"order":1})") == "phi_list");
    CHECK(config_key_of(R"({"variant":0,"phi_list":[0.1],"order":1})") == "problem");
    CHECK(config_key_of(R"({"problem":"example","variant":0,"phi_list":[0.1],"order":0})") == "order");
    CHECK(config_key_of(R"({"problem":"example","variant":0,"phi_list":[-0.1],"order":1})") == "phi_list");
    CHECK(config_key_of(R"({"problem":"example","variant":0,"phi_list":[0.1],"order":1,"mu":1.5})") == "mu");
    CHECK(config_key_of(R"({"problem":"example","variant":0,"phi_list":[0.1],"order":1,"grid_points":8})") ==
          "grid_points");
    CHECK(config_key_of(R"({"problem":"example","variant":0,"phi_list":[0.1],)") == "<document>");
    CHECK(config_key_of(R"({"problem":"custom","order":1,"custom":{"indices":[2,0],"m0":[[[],[]],[[],[]]]}})") ==
          "custom.indices");
    CHECK(config_key_of(R"({"problem":"custom","order":1,
        "custom":{"indices":[0],"m0":[[[{"coef":1,"pole":[1,0],"order":1}]]]}})") == "custom.m0");
    CHECK(config_key_of(R"({"problem":"custom","order":1,"variant":1,
        "custom":{"indices":[0],"m0":[[[]]]}})") == "variant");
}

TEST_CASE("explicit constants parse in the total frame") {
    const RunConfig c = parse_config(R"({"problem":"example","variant":1,"phi_list":[0.1],"order":3,
        "strategy":"explicit","explicit_constants":[[[0,0],[1,[0,2]]],[[0,0],[0,0]]]})");
    REQUIRE(c.explicit_constants.size() == 2);
    CHECK(c.explicit_constants[0](1, 1) == cplx(0.0, 2.0));
    CHECK(make_strategy(c)->name().size() > 0);
    RunConfig short_list = c;
    short_list.explicit_constants.pop_back();
    CHECK_THROWS_AS(validate_config(short_list), ConfigError);
}

TEST_CASE("missing output_dir is a config error") {
    RunConfig c = parse_config(kExample);
    c.output_dir.clear();
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
}

TEST_CASE("identical configs give byte-identical outputs") {
    RunConfig c = parse_config(kExample);
    const fs::path first = scratch("det_a"), second = scratch("det_b");
    c.output_dir = first.string();
    run_experiment(c);
    c.output_dir = second.string();
    run_experiment(c);
    for (const char* name : {"factors.csv", "remainders.csv", "diagnostics.json"}) {
        const std::string a = slurp(first / name);
        const std::string b = slurp(second / name);
        CHECK(!a.empty());
        CHECK(a == b);
        CHECK(a.find('\r') == std::string::npos);
    }
}

TEST_CASE("reloaded factors reproduce the reported residual") {
    RunConfig c = parse_config(kExample);
    c.order = 2;
    c.output_dir = scratch("roundtrip").string();
    run_experiment(c);
    const auto diag = load_json(fs::path(c.output_dir) / "diagnostics.json");
    const auto nodes = load_factors(fs::path(c.output_dir) / "factors.csv", 2);
    CHECK(nodes.size() == 3 * 512);
    std::map<std::string, double> residual;
    for (const auto& [key, f] : nodes) {
        const auto& p = f.parts;
        const CMatrix d = p.at("h_minus") * p.at("lambda") * p.at("h_plus") - p.at("g1");
        residual[key.first] = std::max(residual[key.first], matrix_norm(d));
    }
    REQUIRE(diag["runs"].size() == 3);
    for (const auto& run : diag["runs"]) {
        const std::string phi = format_number(run["phi"].get<double>());
        CHECK(std::abs(residual.at(phi) - run["residual_sup"].get<double>()) < 1e-10);
    }
}

TEST_CASE("residual ratios near four at order one") {
    RunConfig c = parse_config(kExample);
    c.output_dir = scratch("ratios").string();
    run_experiment(c);
    const auto diag = load_json(fs::path(c.output_dir) / "diagnostics.json");
    const auto& table = diag["residual_table"];
    REQUIRE(table.size() == 3);
    for (int k = 0; k < 2; ++k) {
        const double ratio = table[k]["ratio_to_next"].get<double>();
        CHECK(ratio > 3.6);
        CHECK(ratio < 4.4);
    }
    CHECK(table[2]["ratio_to_next"].is_null());
    CHECK(diag["alpha"].size() == 1);
    CHECK(diag["runs"][0]["inverse_A"].get<double>() > 0.0);
}

TEST_CASE("variant 3 remainder vanishes at the extreme nodes") {
    RunConfig c = parse_config(R"({"problem":"example","variant":3,"phi_list":[0.1],"order":1,"grid_points":2048})");
    c.output_dir = scratch("variant3").string();
    run_experiment(c);
    std::ifstream f(fs::path(c.output_dir) / "remainders.csv");
    std::string line;
    std::getline(f, line);
    REQUIRE(line == "variant,phi,x,p,q,re,im,abs,x_abs");
    double x_min = 0.0, x_max = 0.0, at_min = 0.0, at_max = 0.0, peak = 0.0;
    while (std::getline(f, line)) {
        const auto c2 = split(line);
        const double x = std::stod(c2[2]), a = std::stod(c2[7]);
        peak = std::max(peak, a);
        if (x < x_min) x_min = x, at_min = 0.0;
        if (x > x_max) x_max = x, at_max = 0.0;
        if (x == x_min) at_min = std::max(at_min, a);
        if (x == x_max) at_max = std::max(at_max, a);
    }
    CHECK(peak > 0.1);
    CHECK(at_min < 0.02 * peak);
    CHECK(at_max < 0.02 * peak);
}

TEST_CASE("zero perturbation gives identity factors") {
    RunConfig c = parse_config(kZeroCustom);
    c.output_dir = scratch("zero").string();
    run_experiment(c);
    const auto diag = load_json(fs::path(c.output_dir) / "diagnostics.json");
    CHECK(diag["runs"][0]["residual_sup"].get<double>() == 0.0);
    const auto nodes = load_factors(fs::path(c.output_dir) / "factors.csv", 2);
    CHECK(nodes.size() == 256);
    for (const auto& [key, f] : nodes) {
        CHECK(key.first.empty());
        CHECK(matrix_norm(f.parts.at("h_minus") - CMatrix::Identity(2, 2)) == 0.0);
        CHECK(matrix_norm(f.parts.at("h_plus") - CMatrix::Identity(2, 2)) == 0.0);
    }
}

TEST_CASE("alpha table") {
    const std::string t = alpha_table(12);
    CHECK(t.rfind("r,numerator,denominator,value,bound,holds\n", 0) == 0);
    CHECK(t.find("\n1,1,2,0.5,,\n") != std::string::npos);
    CHECK(t.find("\n12,29393,4194304,") != std::string::npos);
    CHECK(t.find(",false\n") != std::string::npos);
}

TEST_CASE("binary exit codes") {
    const fs::path dir = scratch("bin");
    fs::create_directories(dir);
    write_text(dir / "good.json", kExample);
    write_text(dir / "bad.json", R"({"problem":"example","variant":5,"phi_list":[0.1],"order":1})");
    write_text(dir / "broken.json", "{");
    CHECK(run_binary("run --config " + (dir / "good.json").string() + " --output-dir " + (dir / "out").string()) ==
          0);
    CHECK(fs::exists(dir / "out" / "factors.csv"));
    CHECK(run_binary("run --config " + (dir / "good.json").string()) == 2);
    CHECK(run_binary("run --config " + (dir / "bad.json").string() + " --output-dir " + (dir / "o2").string()) == 2);
    CHECK(run_binary("run --config " + (dir / "broken.json").string() + " --output-dir " + (dir / "o3").string()) ==
          2);
    CHECK(run_binary("run --config " + (dir / "missing.json").string()) == 2);
    CHECK(run_binary("run --config " + (dir / "good.json").string() + " --order 0 --output-dir " +
                     (dir / "o4").string()) == 2);
    CHECK(run_binary("alphas --max 20") == 0);
    CHECK(run_binary("figures --variant 4 --phi 0.1") == 2);
    CHECK(run_binary("figures --variant 1 --phi 0.1,0.2 --grid-points 256 --output " + (dir / "fig.csv").string()) ==
          0);
    CHECK(slurp(dir / "fig.csv").rfind("variant,phi,x,p,q,re,im,abs,x_abs\n", 0) == 0);
    CHECK(run_binary("") == 2);
}
