#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "widomlab/experiment.hpp"

using namespace widomlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> rows_of(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

class Workdir {
 public:
  Workdir() : dir_(fs::temp_directory_path() / ("widomlab_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }
  fs::path file(const std::string& name, const std::string& body) const {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << body;
    return p;
  }
  const fs::path& path() const { return dir_; }

 private:
  fs::path dir_;
};

// Runs the binary through the shell; stdout goes to `out`, stderr is discarded.
int run(const std::string& args, const fs::path& out, const std::string& env = "") {
  const std::string cmd = env + " '" WIDOMLAB_BIN "' " + args + " > '" + out.string() + "' 2>/dev/null";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

const fs::path kConfigs{WIDOMLAB_CONFIG_DIR};
const fs::path kGolden{WIDOMLAB_GOLDEN_DIR};

} // namespace

TEST(Config, ParsesAllSetKinds) {
  const char* sets[] = {
      R"({"kind":"interval","a":-2,"b":2})",           R"({"kind":"arc","alpha":1.5707963})",
      R"({"kind":"star_even","m":3})",                 R"({"kind":"star_odd","m":3})",
      R"({"kind":"quadratic","a":0,"b":[0,0.5]})",     R"({"kind":"poly_preimage","coeffs":[0,0,1],"target":[-2,2]})",
      R"({"kind":"spiked_circle","n":1,"l":1})",       R"({"kind":"shabat"})"};
  for (const char* s : sets) {
    const auto c = parse_config_text(std::string(R"({"set":)") + s + R"(,"degrees":[1,3]})");
    ASSERT_TRUE(c.set.has_value()) << s;
    EXPECT_EQ(c.degrees(), (std::vector<int>{1, 2, 3})) << s;
  }
  const auto q = parse_config_text(R"({"set":{"kind":"quadratic","a":[1,2],"b":3},"degree":5,"tol":1e-8,"seed":7})");
  EXPECT_EQ(std::get<QuadraticPreimage>(*q.set).a, cplx(1.0, 2.0));
  EXPECT_EQ(q.degree, 5);
  EXPECT_EQ(q.tol, 1e-8);
  EXPECT_EQ(q.seed, 7u);
}

TEST(Config, IsStrict) {
  const char* bad[] = {
      R"({"set":{"kind":"star_even","m":2},"degrees":[1,3],"colour":"red"})",
      R"({"set":{"kind":"star_even","m":2,"n":1},"degrees":[1,3]})",
      R"({"set":{"kind":"heart"},"degrees":[1,3]})",
      R"({"set":{"kind":"star_even","m":0},"degrees":[1,3]})",
      R"({"set":{"kind":"star_even","m":2.5},"degrees":[1,3]})",
      R"({"set":{"kind":"interval","a":2,"b":-2},"degrees":[1,3]})",
      R"({"set":{"kind":"star_even","m":2},"degrees":[1,401]})",
      R"({"set":{"kind":"star_even","m":2},"degrees":[3,1]})",
      R"({"set":{"kind":"star_even","m":2},"degrees":[1,3],"tol":1e-11})",
      R"({"set":{"kind":"star_even","m":2},"degrees":[1,3],"tol":0.5})",
      R"({"set":{"kind":"star_even","m":2},"degrees":[1,3],"seed":-1})",
      R"({"set":{"kind":"star_even","m":2},"degrees":[1,3],"emit":["pdf"]})",
      R"({"set":{"kind":"star_even","m":2},"degrees":[1,3],"route":"fast"})",
      R"({"set":{"kind":"star_even","m":2},"degrees":[1,3],})",
      R"([1,2,3])",
  };
  for (const char* s : bad) EXPECT_THROW(parse_config_text(s), ConfigError) << s;
}

TEST(Commands, StarThreeExactPowers) {
  auto c = parse_config_text(R"({"set":{"kind":"star_even","m":3},"degrees":[1,5]})");
  const auto r = cmd_norms(c);
  EXPECT_EQ(r.exit_code, 0);
  std::string expect = "degree,route,norm,capacity,widom_factor,gap\n";
  for (int k = 1; k <= 5; ++k) {
    char v[64];
    std::snprintf(v, sizeof v, "%.12g", std::pow(2.0, k / 3.0));
    expect += std::to_string(k) + ",exact," + v + ",1," + v + ",0\n";
  }
  EXPECT_EQ(r.csv, expect);
}

TEST(Commands, IntervalFactorTwo) {
  const auto r = cmd_norms(parse_config_text(R"({"set":{"kind":"interval","a":-2,"b":2},"degrees":[1,5]})"));
  const auto rows = rows_of(r.csv);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][4], "2");
}

TEST(Commands, Limits) {
  auto lim = [](const char* set) { return cmd_limits(parse_config_text(std::string(R"({"set":)") + set + "}")); };
  const auto q = rows_of(lim(R"({"kind":"quadratic","a":0,"b":3})").csv);
  ASSERT_EQ(q.size(), 3u);
  EXPECT_NEAR(std::stod(q[2][1]), 1.0 + std::sqrt(5.0), 1e-10);
  const auto a = rows_of(lim(R"({"kind":"arc","alpha":1.5707963})").csv);
  EXPECT_NEAR(std::stod(a[1][1]), 1.707107, 1e-6);
  EXPECT_EQ(rows_of(lim(R"({"kind":"star_even","m":7})").csv)[1][1], "2");
  const auto sh = lim(R"({"kind":"shabat"})");
  EXPECT_EQ(rows_of(sh.csv)[1][2], "true");
  EXPECT_NE(sh.log.find("conjectural"), std::string::npos);
  EXPECT_EQ(lim(R"({"kind":"spiked_circle","n":1,"l":1})").exit_code, 1);
}

TEST(Commands, ShabatCrossCheck) {
  const auto r = cmd_shabat(parse_config_text(R"({"set":{"kind":"shabat"},"degrees":[6,7]})"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.log.find("cross-check degree 7"), std::string::npos);
  EXPECT_NEAR(std::stod(rows_of(r.csv)[2][4]), 2.0, 1e-3);
  EXPECT_THROW(cmd_shabat(parse_config_text(R"({"degrees":[1,41]})")), ConfigError);
}

TEST(Commands, PreimageOfStarAtDegreeFourIsTheStar) {
  const auto r = cmd_preimage(parse_config_text(R"({"set":{"kind":"star_even","m":2},"degree":4,"samples":16})"));
  int set_points = 0;
  for (const auto& row : rows_of(r.csv)) {
    if (row[0] != "set") continue;
    ++set_points;
    const cplx z{std::stod(row[1]), std::stod(row[2])};
    EXPECT_LE(std::abs((z * z).imag()), 1e-7) << z;
    EXPECT_LE(std::abs((z * z).real()), 2.0 + 1e-7) << z;
  }
  EXPECT_EQ(set_points, 4 * 16);
}

TEST(Commands, PreimageAtDegreeNineContainsTheStar) {
  const auto r = cmd_preimage(parse_config_text(R"({"set":{"kind":"star_even","m":2},"degree":9,"samples":64})"));
  const auto t = *star_norm(2, 9, 1e-12).poly;
  const double norm = star_norm(2, 9, 1e-12).norm;
  std::vector<cplx> cloud;
  for (const auto& row : rows_of(r.csv))
    if (row[0] == "set") cloud.push_back({std::stod(row[1]), std::stod(row[2])});
  for (const cplx z : cloud) {
    const cplx w = t(z);  // on the cross of radius norm
    EXPECT_LE(std::min(std::abs(w.real()), std::abs(w.imag())), 1e-6 * norm);
    EXPECT_LE(std::abs(w), norm * (1.0 + 1e-6));
  }
  for (int k = 0; k <= 20; ++k)
    for (int q = 0; q < 4; ++q) {
      const cplx e = std::pow(cplx{0.0, 1.0}, q) * (std::sqrt(2.0) * k / 20.0);
      double best = 1e9;
      for (const cplx z : cloud) best = std::min(best, std::abs(z - e));
      EXPECT_LE(best, 0.1) << e;
    }
}

TEST(Commands, ShabatTree) {
  const auto r = cmd_preimage(parse_config_text(R"({"set":{"kind":"shabat"},"degree":7,"samples":64})"));
  EXPECT_EQ(rows_of(r.csv).size(), 1u + 7u * 64u);
  EXPECT_THROW(cmd_preimage(parse_config_text(R"({"set":{"kind":"shabat"},"degree":8})")), ConfigError);
}

TEST(Binary, GoldenFiles) {
  Workdir w;
  const std::pair<const char*, const char*> cases[] = {
      {"norms --config '" WIDOMLAB_CONFIG_DIR "/star_even_2.json'", "star_even_2_norms.csv"},
      {"limits --config '" WIDOMLAB_CONFIG_DIR "/quadratic_limits.json'", "quadratic_limits.csv"},
      {"shabat --config '" WIDOMLAB_CONFIG_DIR "/shabat_7.json'", "shabat_7.csv"},
  };
  for (const auto& [args, golden] : cases) {
    const fs::path out = w.path() / golden;
    ASSERT_EQ(run(args, out), 0) << args;
    EXPECT_EQ(slurp(out), slurp(kGolden / golden)) << golden;
  }
}

TEST(Binary, GoldenValuesMatchOracles) {
  const auto rows = rows_of(slurp(kGolden / "star_even_2_norms.csv"));
  ASSERT_EQ(rows.size(), 13u);
  for (int d = 2; d <= 12; d += 2) EXPECT_EQ(rows[d][2], "2");
  EXPECT_NEAR(std::stod(rows[1][2]), std::sqrt(2.0), 1e-11);
  EXPECT_NEAR(std::stod(rows[3][2]), std::pow(2.0, 1.5), 1e-11);
  EXPECT_NEAR(std::stod(rows[5][2]), 1.846662, 1e-6);
  for (int d = 5; d <= 12; d += 2) EXPECT_NEAR(std::stod(rows[d][2]), star_norm(2, d, 1e-12).norm, 1e-9);
  const auto sh = rows_of(slurp(kGolden / "shabat_7.csv"));
  EXPECT_NEAR(std::stod(sh[1][4]), 2.0, 1e-3);
}

TEST(Binary, ByteStableAcrossThreadCounts) {
  Workdir w;
  const std::string cfg = w.file("c.json", R"({"set":{"kind":"star_odd","m":3},"degrees":[1,9],"route":"discrete","per_edge":40})").string();
  ASSERT_EQ(run("norms --config '" + cfg + "'", w.path() / "a.csv", "WIDOMLAB_THREADS=1"), 0);
  ASSERT_EQ(run("norms --config '" + cfg + "'", w.path() / "b.csv", "WIDOMLAB_THREADS=3"), 0);
  ASSERT_EQ(run("norms --config '" + cfg + "'", w.path() / "c.csv", "WIDOMLAB_THREADS=3"), 0);
  EXPECT_EQ(slurp(w.path() / "a.csv"), slurp(w.path() / "b.csv"));
  EXPECT_EQ(slurp(w.path() / "b.csv"), slurp(w.path() / "c.csv"));
  EXPECT_EQ(slurp(w.path() / "a.csv").find('\r'), std::string::npos);
}

TEST(Binary, ExitCodesAndOutputs) {
  Workdir w;
  const fs::path sink = w.path() / "sink";
  const auto ok = w.file("ok.json", R"({"set":{"kind":"star_even","m":2},"degrees":[1,6],"emit":["csv","svg"]})");
  const auto unknown = w.file("bad.json", R"({"set":{"kind":"star_even","m":2},"degrees":[1,6],"degres":1})");
  const auto garbage = w.file("garbage.json", "{not json");
  const auto spiked = w.file("spiked.json", R"({"set":{"kind":"spiked_circle","n":1,"l":1}})");

  EXPECT_EQ(run("norms --config '" + unknown.string() + "'", sink), 2);
  EXPECT_EQ(run("norms --config '" + garbage.string() + "'", sink), 2);
  EXPECT_EQ(run("norms --config '" + (w.path() / "missing.json").string() + "'", sink), 2);
  EXPECT_EQ(run("norms", sink), 2);
  EXPECT_EQ(run("frobnicate --config '" + ok.string() + "'", sink), 2);
  EXPECT_EQ(run("norms --config '" + ok.string() + "' --tol 1", sink), 2);
  EXPECT_EQ(run("limits --config '" + spiked.string() + "'", sink), 1);

  const std::string prefix = (w.path() / "run").string();
  ASSERT_EQ(run("norms --config '" + ok.string() + "' --out '" + prefix + "' --seed 3 --tol 1e-9", sink), 0);
  const std::string csv = slurp(prefix + ".csv");
  const std::string svg = slurp(prefix + ".svg");
  EXPECT_EQ(csv.rfind("degree,route,norm,capacity,widom_factor,gap\n", 0), 0u);
  EXPECT_EQ(rows_of(csv).size(), 7u);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("<circle"), std::string::npos);
}
