#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "gk/csv.hpp"
#include "gk/experiments.hpp"

using namespace gk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("gk_exp_test_" + name);
    fs::remove_all(p);
    return p;
}

exp::ExperimentConfig config(const std::string& json, const fs::path& out) {
    exp::ExperimentConfig cfg = exp::parse_config(json);
    cfg.output_dir = out;
    return cfg;
}

void validate_all(const fs::path& dir, const exp::RunReport& rep) {
    for (const auto& f : rep.files) {
        const std::string name = f.filename().string();
        std::string schema;
        if (name.rfind("sweep_rows", 0) == 0) schema = "sweep_rows";
        else if (name.rfind("sweep_aggregate", 0) == 0) schema = "sweep_aggregate";
        else if (name.rfind("branch_", 0) == 0) schema = "branch";
        else if (name.rfind("folds_", 0) == 0) schema = "folds";
        else if (name.rfind("profile_compare_", 0) == 0) schema = "profile_compare";
        else if (name.rfind("profile_", 0) == 0) schema = "sync_state";
        else if (name.rfind("meanfield_", 0) == 0) schema = "meanfield_curve";
        else if (name.rfind("convergence", 0) == 0) schema = "convergence";
        CAPTURE(name);
        REQUIRE(!schema.empty());
        CHECK_NOTHROW(io::validate_csv(io::read_file(dir / f), io::schema::by_name(schema)));
    }
}

}  // namespace

TEST_CASE("number formatting round-trips") {
    for (const double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22, 4.0 / std::numbers::pi}) CHECK(std::stod(io::fmt(v)) == v);
    CHECK(io::fmt(std::nan("")) == "nan");
    CHECK(io::fmt(-INFINITY) == "-inf");
    CHECK(io::fmt(2.0) == "2");
}

TEST_CASE("CSV validation names line and column") {
    const auto& s = io::schema::sweep_aggregate();
    CHECK_NOTHROW(io::validate_csv("# comment\nn,mean,std,count\n100,1.2,0.1,30\n", s));
    CHECK_THROWS_WITH(io::validate_csv("n,mean,sd,count\n", s), doctest::Contains("line 1: column 3"));
    CHECK_THROWS_WITH(io::validate_csv("n,mean,std,count\n100,1.2,x,30\n", s), doctest::Contains("line 2: column 'std'"));
    CHECK_THROWS_WITH(io::validate_csv("n,mean,std,count\n100,1.2\n", s), doctest::Contains("line 2"));
    CHECK_THROWS(io::validate_csv("", s));
    CHECK_NOTHROW(io::validate_csv("n,seed,K_crit_n,method,rel_err\n5,7,1.2,SweepBisection,0.01\n",
                                   io::schema::sweep_rows()));
    CHECK_THROWS_AS(io::schema::by_name("nope"), std::invalid_argument);
    io::CsvTable t(s);
    CHECK_THROWS_AS(t.add_row({"1", "2"}), std::invalid_argument);
}

TEST_CASE("atomic writes leave no temporary behind") {
    const fs::path dir = scratch("atomic");
    io::write_atomic(dir / "a" / "x.csv", "hello\n");
    io::write_atomic(dir / "a" / "x.csv", "again\n");
    CHECK(io::read_file(dir / "a" / "x.csv") == "again\n");
    CHECK(!fs::exists(dir / "a" / "x.csv.tmp"));
    fs::remove_all(dir);
}

TEST_CASE("graphon and frequency specs") {
    CHECK(std::get<ErdosRenyi>(exp::parse_graphon("er:0.5").kind()).p == 0.5);
    CHECK(std::get<ErdosRenyi>(exp::parse_graphon("complete").kind()).p == 1.0);
    const auto sw = std::get<SmallWorld>(exp::parse_graphon("smallworld:0.9,0.1,0.25").kind());
    CHECK(sw.radius == 0.25);
    CHECK_THROWS_AS(exp::parse_graphon("er:"), std::invalid_argument);
    CHECK_THROWS_AS(exp::parse_graphon("er:0.5,0.2"), std::invalid_argument);
    CHECK_THROWS_AS(exp::parse_graphon("ring"), std::invalid_argument);
    CHECK(exp::parse_frequency("arcsine-cosine").kind() == FrequencyModel::Kind::ArcsineCosine);
    CHECK(exp::parse_frequency("cauchy_like").kind() == FrequencyModel::Kind::CauchyLike);
    CHECK_THROWS_AS(exp::parse_frequency("gaussian"), std::invalid_argument);
    CHECK(exp::graphon_degree(exp::parse_graphon("smallworld:0.9,0.1,0.25")) == doctest::Approx(0.5));
}

TEST_CASE("graphon K_crit reports") {
    CHECK(exp::kcrit_graphon_json(FrequencyModel::uniform(), 1.0)["K_crit"].get<double>() ==
          doctest::Approx(1.2732).epsilon(1e-4));
    CHECK(exp::kcrit_graphon_json(FrequencyModel::arcsine_cosine(), 1.0)["K_crit"].get<double>() ==
          doctest::Approx(1.4892).epsilon(1e-4));
    CHECK(exp::kcrit_graphon_json(FrequencyModel::cauchy_like(), 0.5)["K_crit"].get<double>() ==
          doctest::Approx(2.4143).epsilon(1e-4));
    const auto sp = exp::spectrum_json(FrequencyModel::arcsine_cosine(), 0.5, 4.0);
    CHECK(sp["stable"].get<bool>());
    CHECK(sp["ess_hi"].get<double>() < 0.0);
}

TEST_CASE("config errors are line-anchored") {
    auto line_of = [](const std::string& text) {
        try {
            (void)exp::parse_config(text);
        } catch (const exp::ConfigError& e) {
            return e.line();
        }
        return std::size_t{999};
    };
    CHECK(line_of("{\n \"experiment\": \"fig9\",\n \"n\": [10], \"seeds\": 1}") == 2);
    CHECK(line_of("{\"experiment\": \"fig1_kcrit_sweep\",\n\"n\": [10],\n\"seeds\": 1,\n\"colour\": 3}") == 4);
    CHECK(line_of("{\"experiment\": \"fig1_kcrit_sweep\",\n\"n\": [10],\n\"seeds\": []}") == 3);
    CHECK(line_of("{\"experiment\": \"fig1_kcrit_sweep\",\n\"n\": [10], \"seeds\": 2,\n\"tolerances\": {\n"
                  "  \"newton\": 0}}") == 4);
    CHECK(line_of("{\"experiment\": \"fig1_kcrit_sweep\",\n\"n\": [10,\n\"seeds\": 2}") == 3);
    CHECK(line_of("{\"experiment\": \"fig1_kcrit_sweep\", \"seeds\": 2}") == 1);
    CHECK(line_of("{\"experiment\": \"fig1_kcrit_sweep\",\n\"n\": [10], \"seeds\": 2,\n\"K\": {\"hi\": 2, \"min\": 3}}") == 3);
    CHECK_THROWS_WITH(exp::parse_config("{\"experiment\": \"fig1_kcrit_sweep\",\n\"n\": [10], \"seeds\": 2,\n"
                                        "\"graphon\": \"er:2\"}"),
                      doctest::Contains("line 3: graphon"));

    const auto cfg = exp::parse_config(R"({"experiment": "fig5_smallworld", "n": [500], "seeds": [3, 8],
        "K": {"hi": 15, "min": 3}, "ds": 0.1})");
    CHECK(cfg.graphons == std::vector<std::string>{"smallworld:0.9,0.1,0.25"});
    CHECK(cfg.frequency == "arcsine_cosine");
    CHECK(cfg.graphs.size() == 3);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 8});
    CHECK(*cfg.K_min == 3.0);
}

TEST_CASE("sweep experiment: files, manifest, byte-identical rerun") {
    const std::string json = R"({"experiment": "fig1_kcrit_sweep", "graphon": "er:1", "frequency": "uniform",
        "n": [30, 50], "seeds": 3, "master_seed": 4, "workers": 2})";
    const fs::path a = scratch("sweep_a"), b = scratch("sweep_b");
    const auto ra = exp::run(config(json, a));
    const auto rb = exp::run(config(json, b));
    CHECK(ra.exit_code == exp::kExitOk);
    CHECK(ra.failures.empty());
    REQUIRE(ra.files.size() == 2);
    validate_all(a, ra);
    for (const auto& f : ra.files) CHECK(io::read_file(a / f) == io::read_file(b / f));
    const auto manifest = nlohmann::json::parse(io::read_file(a / "manifest.json"));
    CHECK(manifest["config_hash"] == nlohmann::json::parse(io::read_file(b / "manifest.json"))["config_hash"]);
    CHECK(manifest["master_seed"] == 4);
    CHECK(manifest["failed_tasks"].empty());
    CHECK(manifest.contains("wall_time_s"));
    const std::string summary = io::read_file(a / "summary.txt");
    CHECK(summary.find("1.27324") != std::string::npos);
    CHECK(summary.find("1.2372") != std::string::npos);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("profile, bifurcation and diagnostics experiments write valid CSVs") {
    const fs::path dir = scratch("misc");
    const auto prof = exp::run(config(R"({"experiment": "fig2_profile_uniform", "graphon": "er:1",
        "n": [60], "seeds": 1})", dir / "fig2"));
    CHECK(prof.exit_code == exp::kExitOk);
    validate_all(dir / "fig2", prof);
    CHECK(prof.summary.find("sup |u_j - u*(x_j)|") != std::string::npos);

    const auto bif = exp::run(config(R"({"experiment": "fig4_bifurcation_cosine", "n": [80], "seeds": 1,
        "max_points": 400})", dir / "fig4"));
    CHECK(bif.exit_code == exp::kExitOk);
    validate_all(dir / "fig4", bif);
    const std::string branch = io::read_file(dir / "fig4" / "branch_er_0_5_n80_s0.csv");
    CHECK(branch.find(",1\n") != std::string::npos);  // a fold flag

    const auto diag = exp::run(config(R"({"experiment": "convergence_diag", "n": [100, 400], "seeds": 3})",
                                      dir / "diag"));
    CHECK(diag.exit_code == exp::kExitOk);
    validate_all(dir / "diag", diag);
    fs::remove_all(dir);
}

TEST_CASE("task failures give exit code 2 and are listed") {
    const fs::path dir = scratch("fail");
    const auto rep = exp::run(config(R"({"experiment": "fig4_bifurcation_cosine", "n": [40], "seeds": 2,
        "K": {"hi": 0.3}})", dir));
    CHECK(rep.exit_code == exp::kExitTaskFailure);
    CHECK(rep.failures.size() >= 2);
    const auto manifest = nlohmann::json::parse(io::read_file(dir / "manifest.json"));
    CHECK(manifest["failed_tasks"].size() == rep.failures.size());
    CHECK(fs::exists(dir / "summary.txt"));
    fs::remove_all(dir);
}

TEST_CASE("shipped configs parse") {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(fs::path(GK_SOURCE_DIR) / "configs")) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW((void)exp::load_config(entry.path()));
        ++count;
    }
    CHECK(count == 6);
}
