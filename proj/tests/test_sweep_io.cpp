#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "nhchain/config.hpp"
#include "nhchain/errors.hpp"
#include "nhchain/sweep.hpp"
#include "nhchain/table.hpp"

using namespace nhchain;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("nhchain_test_" + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("table shape validation") {
  CHECK_THROWS_AS(Table({}), std::invalid_argument);
  Table t({"a", "b"});
  CHECK_THROWS_AS(t.append_row({1.0}), std::invalid_argument);
  t.append_row({1.0, std::int64_t{2}});
  CHECK(t.row_count() == 1);
}

TEST_CASE("csv serialization is exact and stable") {
  Table t({"x", "name", "flag"});
  t.append_row({0.1, std::string("plain"), std::int64_t{1}});
  t.append_row({std::numeric_limits<double>::quiet_NaN(), std::string("with,comma"),
                std::int64_t{-3}});
  t.append_row({-std::numeric_limits<double>::infinity(), std::string("q\"uote"),
                std::int64_t{0}});
  const std::string csv = to_csv(t);
  CHECK(csv ==
        "x,name,flag\n"
        "0.10000000000000001,plain,1\n"
        "nan,\"with,comma\",-3\n"
        "-inf,\"q\"\"uote\",0\n");

  // empty table: header only
  CHECK(to_csv(Table({"only", "header"})) == "only,header\n");

  // 17 significant digits round-trip doubles exactly
  const double val = M_PI * 1e-7;
  CHECK(std::stod(format_double(val)) == val);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("json serialization round trips including nan") {
  Table t({"x", "tag"});
  t.append_row({1.5, std::string("a")});
  t.append_row({std::numeric_limits<double>::quiet_NaN(), std::string("b")});
  const auto doc = to_json(t);
  CHECK(doc.at("row_count") == 2);
  CHECK(doc.at("columns").at("x")[0] == 1.5);
  CHECK(std::isnan(doc.at("columns").at("x")[1].get<double>()));

  // NaN serializes as null and comes back as NaN
  const auto reparsed = nlohmann::ordered_json::parse(doc.dump());
  CHECK(reparsed.at("columns").at("x")[1].is_null());

  const Table back = table_from_json(reparsed);
  REQUIRE(back.row_count() == 2);
  CHECK(back.columns() == t.columns());
  CHECK(std::get<double>(back.rows()[0][0]) == 1.5);
  CHECK(std::isnan(std::get<double>(back.rows()[1][0])));
  CHECK(std::get<std::string>(back.rows()[1][1]) == "b");
}

TEST_CASE("emit writes payload plus metadata sidecar") {
  Table t({"x"});
  t.append_row({2.0});
  const auto path = temp_file("emit.csv");
  nlohmann::ordered_json meta;
  meta["note"] = "unit";
  emit(t, path, EmitFormat::Csv, meta);

  CHECK(slurp(path) == "x\n2\n");
  const auto sidecar = nlohmann::json::parse(slurp(path.string() + ".meta.json"));
  CHECK(sidecar.at("software").at("name") == "nhchain");
  CHECK(sidecar.at("software").contains("version"));
  CHECK(sidecar.at("columns")[0] == "x");
  CHECK(sidecar.at("row_count") == 1);
  CHECK(sidecar.at("run").at("note") == "unit");

  CHECK_THROWS_AS(
      emit(t, "/nonexistent_dir_nhchain/out.csv", EmitFormat::Csv, meta), IoError);
  fs::remove(path);
  fs::remove(path.string() + ".meta.json");
}

TEST_CASE("linspace endpoints and degenerate count") {
  const auto v = linspace(0.0, M_PI / 2.0, 25);
  REQUIRE(v.size() == 25);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == M_PI / 2.0);  // exact endpoint, not lo + 24 * step
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);

  const auto single = linspace(0.7, 9.9, 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == 0.7);

  CHECK_THROWS_AS(linspace(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("theta sweep output is deterministic across thread counts") {
  SweepGrid grid;
  grid.chain = ChainSpec{AlternatingParams{1.0, -1.0}, 8, Boundary::Open};
  grid.sizes = {8, 13};
  grid.t_values = {0.5, 1.0};
  grid.theta_values = {0.0, M_PI / 2.0};

  const auto rows1 = run_theta_sweep(grid, 1);
  const auto rows2 = run_theta_sweep(grid, 2);
  REQUIRE(rows1.size() == 8);
  CHECK(to_csv(to_table(rows1)) == to_csv(to_table(rows2)));

  // row order: size outer, then T, then theta
  CHECK(rows1[0].n == 8);
  CHECK(rows1[0].t == 0.5);
  CHECK(rows1[0].theta == 0.0);
  CHECK(rows1[1].theta == M_PI / 2.0);
  CHECK(rows1[2].t == 1.0);
  CHECK(rows1[4].n == 13);

  // Hermitian rows carry unit rigidity
  CHECK(rows1[0].rigidity_max_state == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rows1[0].mipr_se == 0.0);
}

TEST_CASE("disorder replicas aggregate a spread") {
  SweepGrid grid;
  grid.chain = ChainSpec{RandomDisorderParams{-1.0, 0.5, 42}, 21, Boundary::Open};
  grid.sizes = {21};
  grid.t_values = {1.0};
  grid.theta_values = {0.0};
  grid.replicas = 4;

  const auto rows = run_theta_sweep(grid, 2);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].replicas == 4);
  CHECK(rows[0].mipr > 0.0);
  CHECK(rows[0].mipr_se > 0.0);

  // replica aggregation equals the mean over individually seeded runs
  double acc = 0.0;
  for (int r = 0; r < 4; ++r) {
    ChainSpec c = grid.chain;
    std::get<RandomDisorderParams>(c.model).seed = 42 + static_cast<std::uint64_t>(r);
    acc += mipr(eig(build_hamiltonian(c, Hopping(1.0, 0.0)).entries));
  }
  CHECK(rows[0].mipr == doctest::Approx(acc / 4.0).epsilon(1e-14));

  // replicas only make sense with the random model
  SweepGrid bad = grid;
  bad.chain.model = AlternatingParams{};
  CHECK_THROWS_AS(run_theta_sweep(bad, 1), ConfigError);
}

TEST_CASE("substitution chain sweeps demand substitution-word sizes") {
  SweepGrid grid;
  grid.chain = ChainSpec{FibonacciWordParams{10, 1.0, -1.0}, 89, Boundary::Open};
  grid.sizes = {90};
  grid.t_values = {1.0};
  grid.theta_values = {0.0};
  CHECK_THROWS_AS(run_theta_sweep(grid, 1), ConfigError);

  grid.sizes = {13, 21};  // the order is re-derived per size
  const auto rows = run_theta_sweep(grid, 1);
  CHECK(rows.size() == 2);
}

TEST_CASE("landscape quantities and guards") {
  SweepGrid grid;
  grid.chain = ChainSpec{FibonacciWordParams{8, 1.0, -1.0}, 34, Boundary::Open};
  grid.sizes = {8, 13, 21, 34};
  grid.t_values = {13.0};
  grid.theta_values = {0.0, M_PI / 2.0};

  const auto rows = run_landscape(grid, ExtremeMode::MaxIpr, LandscapeQuantity::D2, 2);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.d2));
    CHECK(r.d2_residual >= 0.0);
    CHECK(r.log_ipr < 0.0);
    CHECK(r.rigidity > 0.0);
    CHECK(r.state >= 0);
    CHECK(r.state < 34);
  }

  SweepGrid thin = grid;
  thin.sizes = {21, 34};
  CHECK_THROWS_AS(run_landscape(thin, ExtremeMode::MaxIpr, LandscapeQuantity::D2, 1),
                  ConfigError);
  // other quantities work from a single size
  const auto li = run_landscape(thin, ExtremeMode::MinIpr, LandscapeQuantity::LogIpr, 1);
  CHECK(li.size() == 2);
  CHECK(std::isnan(li[0].d2));

  SweepGrid rep = grid;
  rep.replicas = 2;
  CHECK_THROWS_AS(run_landscape(rep, ExtremeMode::MaxIpr, LandscapeQuantity::D2, 1),
                  ConfigError);
}

TEST_CASE("localization length run returns normalized profiles") {
  SweepGrid grid;
  grid.chain = ChainSpec{FibonacciWordParams{8, 1.0, -1.0}, 34, Boundary::Open};
  grid.sizes = {34};
  grid.t_values = {3.0};
  grid.theta_values = {0.0, M_PI / 2.0};

  const auto out = run_localization_length(grid, 1);
  REQUIRE(out.rows.size() == 2);
  REQUIRE(out.profiles.size() == 2);
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    CHECK(out.rows[i].xi > 0.0);
    CHECK(out.rows[i].ipr > 0.0);
    CHECK(out.profiles[i].size() == 34);
    CHECK(out.profiles[i].sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.profiles[i].minCoeff() >= 0.0);
  }

  const Table prof = profile_table(out);
  CHECK(prof.row_count() == 2 * 34);

  SweepGrid multi = grid;
  multi.sizes = {21, 34};
  CHECK_THROWS_AS(run_localization_length(multi, 1), ConfigError);
}

TEST_CASE("complex plane records for one chain") {
  ChainSpec chain{AlternatingParams{1.0, -1.0}, 8, Boundary::Periodic};
  const auto recs = run_complex_plane(chain, Hopping(0.7, 0.9));
  REQUIRE(recs.size() == 8);
  for (const auto& r : recs) CHECK(std::isfinite(r.sigma_z));
}

TEST_CASE("angle parsing accepts numbers and pi fractions") {
  CHECK(parse_angle(nlohmann::json(0.25)) == 0.25);
  CHECK(parse_angle(nlohmann::json("pi")) == M_PI);
  CHECK(parse_angle(nlohmann::json("pi/2")) == M_PI / 2.0);
  CHECK(parse_angle(nlohmann::json("17pi/36")) == 17.0 * M_PI / 36.0);
  CHECK(parse_angle(nlohmann::json("0.25pi")) == 0.25 * M_PI);
  CHECK(parse_angle(nlohmann::json("-pi/4")) == -M_PI / 4.0);
  CHECK(parse_angle(nlohmann::json(" pi / 2 ")) == M_PI / 2.0);
  CHECK(parse_angle(nlohmann::json("1.5")) == 1.5);
  CHECK_THROWS_AS(parse_angle(nlohmann::json("two pi")), ConfigError);
  CHECK_THROWS_AS(parse_angle(nlohmann::json("pi/0")), ConfigError);
  CHECK_THROWS_AS(parse_angle(nlohmann::json(nullptr)), ConfigError);
}

TEST_CASE("settings parsing: defaults, overrides and failure modes") {
  // all defaults
  const auto s = parse_settings(nlohmann::json::object());
  CHECK(std::holds_alternative<AAFParams>(s.chain.model));
  CHECK(s.sizes == std::vector<Eigen::Index>{987});
  CHECK(s.t_values == std::vector<double>{1.0});
  CHECK(s.theta_values == std::vector<double>{0.0});
  CHECK(s.replicas == 1);
  CHECK_FALSE(s.seed_given);
  CHECK(s.format == EmitFormat::Csv);

  // resolved fibonacci model with grids
  const auto f = parse_settings(nlohmann::json::parse(R"({
    "model": "fibonacci", "v": 1.0, "T": [0.2, 13.0],
    "theta": ["0", "pi/2"], "sizes": [89, 144, 233, 377, 610, 987],
    "boundary": "periodic", "format": "json", "threads": 2
  })"));
  const auto& fib = std::get<FibonacciWordParams>(f.chain.model);
  CHECK(fib.order == 15);  // derived from the largest size
  CHECK(fib.v_a == 1.0);
  CHECK(fib.v_b == -1.0);
  CHECK(f.chain.boundary == Boundary::Periodic);
  CHECK(f.theta_values[1] == M_PI / 2.0);
  CHECK(f.format == EmitFormat::Json);
  CHECK(f.threads == 2);

  // theta grids via count
  const auto g = parse_settings(nlohmann::json::parse(R"({"theta_count": 25})"));
  REQUIRE(g.theta_values.size() == 25);
  CHECK(g.theta_values.front() == 0.0);
  CHECK(g.theta_values.back() == M_PI / 2.0);

  // aaf parameters, beta as string
  const auto a = parse_settings(nlohmann::json::parse(
      R"({"model": "aaf", "lambda": 2.0, "beta": "inf", "phi": "pi/3"})"));
  const auto& aaf = std::get<AAFParams>(a.chain.model);
  CHECK(aaf.lambda == 2.0);
  CHECK(std::isinf(aaf.beta));
  CHECK(aaf.phi == doctest::Approx(M_PI / 3.0).epsilon(1e-15));

  // the random model resolves the seed into its parameters
  const auto r = parse_settings(nlohmann::json::parse(
      R"({"model": "random", "seeds": 42, "replicas": 20, "sizes": 233})"));
  CHECK(std::get<RandomDisorderParams>(r.chain.model).seed == 42);
  CHECK(r.replicas == 20);
  CHECK(r.seed_given);

  CHECK_THROWS_AS(parse_settings(nlohmann::json::parse(R"({"model": "random"})")),
                  ConfigError);  // no seed
  CHECK_THROWS_AS(parse_settings(nlohmann::json::parse(R"({"model": "nope"})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_settings(nlohmann::json::parse(R"({"bogus_key": 1})")),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_settings(nlohmann::json::parse(R"({"theta": 0.0, "theta_count": 5})")),
      ConfigError);
  CHECK_THROWS_AS(
      parse_settings(nlohmann::json::parse(R"({"model": "fibonacci", "sizes": 90})")),
      ConfigError);
  CHECK_THROWS_AS(parse_settings(nlohmann::json::parse(R"({"replicas": 3})")),
                  ConfigError);  // replicas need the random model
  CHECK_THROWS_AS(parse_settings(nlohmann::json::parse(R"({"T": -1.0})")), ConfigError);
  CHECK_THROWS_AS(parse_settings(nlohmann::json::parse(R"({"sizes": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_settings(nlohmann::json::parse(R"({"format": "xml"})")),
                  ConfigError);

  // grid assembly copies the resolved pieces
  const auto grid = f.grid();
  CHECK(grid.sizes == f.sizes);
  CHECK(grid.t_values == f.t_values);
  CHECK(grid.theta_values == f.theta_values);
  CHECK(grid.replicas == 1);
}

TEST_CASE("settings metadata reflects the resolved run") {
  const auto s = parse_settings(nlohmann::json::parse(
      R"({"model": "random", "seeds": 7, "center": -1.0, "halfwidth": 0.5,
          "T": 4.0, "theta": ["0", "pi/2"], "sizes": 233, "replicas": 20})"));
  const auto meta = settings_metadata(s);
  CHECK(meta.at("model") == "random");
  CHECK(meta.at("seed") == 7);
  CHECK(meta.at("replicas") == 20);
  CHECK(meta.at("sizes")[0] == 233);
  CHECK(meta.at("T")[0] == 4.0);

  // no seed key unless one was given
  const auto bare = settings_metadata(parse_settings(nlohmann::json::object()));
  CHECK_FALSE(bare.contains("seed"));
  CHECK(bare.at("model") == "aaf");
  CHECK(bare.at("beta") == 0.0);
}
