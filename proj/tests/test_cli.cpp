#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "tastic");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = tastic::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tastic_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
    return path(name);
  }
  std::string five_series() const {
    return write("five.csv",
                 "id,t1,t2,t3,t4,t5\n"
                 "x1,7.59,7.72,6.27,6.07,8.51\n"
                 "x2,7.78,7.76,6.93,6.04,8.37\n"
                 "x3,7.63,7.79,7.39,6.58,5.79\n"
                 "x4,7.96,8.65,9.10,9.42,8.25\n"
                 "x5,8.18,9.19,9.01,9.47,9.20\n");
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenPresetIsDeterministic) {
  ASSERT_EQ(run({"gen", "G3_1", "--seed", "7", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(run({"gen", "G3_1", "--seed", "7", "--out", path("b.csv")}).code, 0);
  const auto a = slurp(path("a.csv"));
  EXPECT_EQ(a, slurp(path("b.csv")));
  const auto loaded = tastic::io::load_dataset(path("a.csv"));
  EXPECT_EQ(loaded.data.size(), 90u);
  EXPECT_EQ(loaded.truth->k, 7);
  const auto direct = tastic::generate(*tastic::preset("G3_1", 7));
  for (std::size_t i = 0; i < 90; ++i) EXPECT_EQ(loaded.data[i].values, direct.data[i].values);
}

TEST_F(Cli, GenFromSpecFile) {
  const auto spec = write("spec.json", R"({"class": 2, "length": 6, "shift_range": 1, "seed": 3,
    "clusters": [{"count": 2, "level": 1, "amplitude": 0.5, "period": 4},
                 {"count": 3, "level": 5, "trend": 0.2, "noise_sd": 0.1}]})");
  const auto r = run({"gen", spec});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto d = tastic::io::read_dataset(in);
  EXPECT_EQ(d.data.size(), 5u);
  EXPECT_EQ(d.data[0].values.size(), 6u);
  EXPECT_EQ(d.truth->cluster_sizes(), (std::vector<std::size_t>{2, 3}));
}

TEST_F(Cli, GenErrors) {
  EXPECT_EQ(run({"gen", "G9_9"}).code, 2);
  EXPECT_EQ(run({"gen", write("bad.json", "{\"clusters\": [{\"count\": 0}]}")}).code, 2);
  EXPECT_EQ(run({"gen", write("junk.json", "{oops")}).code, 2);
}

TEST_F(Cli, DistmatIdenticalRowsGiveZeros) {
  const auto in = write("same.csv", "id,t1,t2,t3,t4,t5\na,1,2,3,2,1\nb,1,2,3,2,1\nc,1,2,3,2,1\n");
  const auto r = run({"distmat", in});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "id,a,b,c\na,0,0,0\nb,0,0,0\nc,0,0,0\n");
}

TEST_F(Cli, DistmatMixedLengthRowsFail) {
  const auto in = write("mixed.csv", "id,t1,t2,t3\na,1,2,3\nb,1,2\n");
  const auto r = run({"distmat", in});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("row 3"), std::string::npos) << r.err;
}

TEST_F(Cli, DistmatSameBytesForAnyThreadCount) {
  ASSERT_EQ(run({"gen", "G3_2", "--seed", "2", "--out", path("d.csv")}).code, 0);
  std::string first;
  for (const char* t : {"1", "4", "8"}) {
    const auto r = run({"distmat", path("d.csv"), "--threads", t});
    ASSERT_EQ(r.code, 0) << r.err;
    if (first.empty()) first = r.out;
    EXPECT_EQ(r.out, first) << "threads " << t;
  }
}

TEST_F(Cli, ThreadsFromEnvironment) {
  ASSERT_EQ(run({"gen", "G1_1", "--out", path("d.csv")}).code, 0);
  const auto base = run({"distmat", path("d.csv")});
  ::setenv("TASTIC_THREADS", "3", 1);
  const auto env = run({"distmat", path("d.csv")});
  ::setenv("TASTIC_THREADS", "zero", 1);
  const auto bad = run({"distmat", path("d.csv")});
  ::unsetenv("TASTIC_THREADS");
  EXPECT_EQ(env.code, 0);
  EXPECT_EQ(env.out, base.out);
  EXPECT_EQ(bad.code, 2);
}

TEST_F(Cli, DistmatReproducesFiveSeriesCuts) {
  const auto in = five_series();
  const auto r = run({"distmat", in, "--L", "0", "--p", "0", "--epsilon", "0.4"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream s(r.out);
  const auto m = tastic::io::read_matrix(s);
  const auto labels = tastic::cut(tastic::agglomerate(m, tastic::Linkage::average), 2);
  EXPECT_EQ(labels.assignments, (std::vector<int>{1, 1, 2, 2, 2}));
}

TEST_F(Cli, ClusterFiveSeries) {
  const auto in = five_series();
  auto r = run({"cluster", in, "--k", "2", "--L", "0", "--p", "0", "--E=-0.4,0,0.4", "--summary",
                path("s.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "id,label\nx1,1\nx2,1\nx3,2\nx4,2\nx5,2\n");
  const auto summary = json::parse(slurp(path("s.json")));
  EXPECT_EQ(summary["k"], 2);
  EXPECT_EQ(summary["sizes"], json::array({2, 3}));
  EXPECT_EQ(summary["alpha_source"], "percentile");
  EXPECT_DOUBLE_EQ(summary["alpha"].get<double>(),
                   tastic::default_alpha(tastic::io::load_dataset(in).data, 0.0));
  EXPECT_GT(summary["wcd"].get<double>(), 0.0);

  r = run({"cluster", in, "--k", "2", "--L", "0", "--p", "0", "--E", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "id,label\nx1,1\nx2,1\nx3,1\nx4,2\nx5,2\n");
}

TEST_F(Cli, ClusterEdgeCases) {
  const auto in = five_series();
  auto r = run({"cluster", in, "--k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "id,label\nx1,1\nx2,1\nx3,1\nx4,1\nx5,1\n");
  EXPECT_EQ(run({"cluster", in, "--k", "6"}).code, 2);
  EXPECT_EQ(run({"cluster", in}).code, 2);
  EXPECT_EQ(run({"cluster", in, "--k", "2", "--linkage", "ward"}).code, 2);
  EXPECT_EQ(run({"cluster", in, "--k", "2", "--measure", "dtw"}).code, 2);
  EXPECT_EQ(run({"cluster", in, "--k", "2", "--alpha", "0.5", "--p", "0.1"}).code, 2);
  EXPECT_EQ(run({"cluster", in, "--k", "2", "--alpha", "1.5"}).code, 2);
  EXPECT_EQ(run({"cluster", in, "--k", "2", "--E", "0.1,0.2"}).code, 2);
  EXPECT_EQ(run({"cluster", in, "--k", "2", "--L", "5"}).code, 2);
  EXPECT_EQ(run({"cluster", path("missing.csv"), "--k", "2"}).code, 2);
  r = run({"cluster", in, "--k", "3", "--measure", "euclidean", "--alpha", "0.3"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(json::parse(r.err)["alpha"].is_null());
}

TEST_F(Cli, ElbowDefaultsAndEndpoint) {
  ASSERT_EQ(run({"gen", "G3_3", "--out", path("d.csv")}).code, 0);
  auto r = run({"elbow", path("d.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream s(r.out);
  std::string line;
  std::getline(s, line);
  EXPECT_EQ(line, "k,wcd");
  std::vector<std::pair<int, double>> pts;
  while (std::getline(s, line)) {
    const auto comma = line.find(',');
    pts.emplace_back(std::stoi(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  ASSERT_EQ(pts.size(), 9u);
  EXPECT_EQ(pts.front().first, 2);
  EXPECT_EQ(pts.back().first, 10);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LE(pts[i].second, pts[i - 1].second);

  const auto in = five_series();
  r = run({"elbow", in, "--kmin", "1", "--kmax", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n5,0\n"), std::string::npos) << r.out;
  EXPECT_EQ(run({"elbow", in, "--kmin", "4", "--kmax", "3"}).code, 2);
}

TEST_F(Cli, Eval) {
  const auto truth = write("truth.csv", "id,label\na,1\nb,1\nc,2\nd,2\ne,3\n");
  auto r = run({"eval", truth, truth});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["accuracy"], 1.0);
  EXPECT_EQ(j["ari"], 1.0);

  const auto perm = write("perm.csv", "id,label\ne,z\nc,y\nd,y\na,x\nb,x\n");
  j = json::parse(run({"eval", perm, truth}).out);
  EXPECT_EQ(j["accuracy"], 1.0);
  EXPECT_EQ(j["ari"], 1.0);

  const auto pred = write("pred.csv", "id,label\na,1\nb,2\nc,2\nd,2\ne,1\n");
  j = json::parse(run({"eval", pred, truth}).out);
  const auto p = tastic::ClusterLabels::from_raw({1, 2, 2, 2, 1});
  const auto t = tastic::ClusterLabels::from_raw({1, 1, 2, 2, 3});
  EXPECT_DOUBLE_EQ(j["accuracy"].get<double>(), 0.6);
  EXPECT_DOUBLE_EQ(j["ari"].get<double>(), tastic::ari(p, t));

  const auto other = write("other.csv", "id,label\na,1\nb,1\nc,2\nd,2\nq,3\n");
  EXPECT_EQ(run({"eval", other, truth}).code, 2);
  const auto short_file = write("short.csv", "id,label\na,1\n");
  EXPECT_EQ(run({"eval", short_file, truth}).code, 2);
}

TEST_F(Cli, Profile) {
  const auto in = write("d.csv",
                        "id,label,t1,t2,t3,t4\n"
                        "a,g,6,7,8,9\n"
                        "b,g,6,7.5,8.5,9.5\n"
                        "c,h,5,5,5,5\n");
  auto r = run({"profile", in});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["bins"].size(), 6u);
  EXPECT_EQ(j["bins"][0], "[-inf,6.5)");
  ASSERT_EQ(j["groups"].size(), 2u);
  EXPECT_EQ(j["groups"][0]["size"], 2);
  EXPECT_EQ(j["groups"][0]["counts_at_least"].size(), 3u);
  EXPECT_EQ(j["groups"][1]["mean_last3"], 5.0);
  EXPECT_EQ(j["groups"][1]["mean_argmax"], 1.0);
  EXPECT_TRUE(j["groups"][1]["mean_within_corr"].is_null());

  r = run({"profile", in, "--thresholds", ""});
  ASSERT_EQ(r.code, 0) << r.err;
  j = json::parse(r.out);
  EXPECT_FALSE(j["groups"][0].contains("counts_at_least"));

  const auto labels = write("l.csv", "id,label\nc,1\nb,2\na,2\n");
  r = run({"profile", in, "--labels", labels});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["groups"][0]["size"], 2);

  const auto nolabel = write("n.csv", "id,t1,t2\na,1,2\n");
  EXPECT_EQ(run({"profile", nolabel}).code, 2);
  EXPECT_EQ(run({"profile", in, "--bins", "7,6"}).code, 2);
}

TEST_F(Cli, Compare) {
  ASSERT_EQ(run({"gen", "G1_1", "--seed", "4", "--out", path("d.csv")}).code, 0);
  auto r = run({"compare", path("d.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream s(r.out);
  std::string line;
  std::vector<std::string> names;
  std::getline(s, line);
  EXPECT_EQ(line, "method,accuracy,ari");
  while (std::getline(s, line)) names.push_back(line.substr(0, line.find(',')));
  EXPECT_EQ(names.size(), tastic::all_methods().size());
  EXPECT_EQ(names.front(), "kmeans");
  EXPECT_EQ(names.back(), "tastic");

  r = run({"compare", path("d.csv"), "--methods", "tastic,pearson"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 27), "method,accuracy,ari\ntastic,");
  EXPECT_EQ(run({"compare", path("d.csv"), "--methods", "gak"}).code, 2);
}

TEST_F(Cli, ConfigFiles) {
  const auto in = five_series();
  const auto flat = write("run.cfg", "# five-series run\nL = 0\np = 0\nepsilon = 0.4\nk = 2\n");
  auto r = run({"cluster", in, "--config", flat});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "id,label\nx1,1\nx2,1\nx3,2\nx4,2\nx5,2\n");

  const auto js = write("run.json", R"({"L": 0, "p": 0, "E": [0], "k": 2})");
  r = run({"cluster", "--config=" + js, in});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "id,label\nx1,1\nx2,1\nx3,1\nx4,2\nx5,2\n");

  r = run({"cluster", in, "--config", flat, "--k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "id,label\nx1,1\nx2,1\nx3,1\nx4,1\nx5,1\n");

  EXPECT_EQ(run({"cluster", in, "--config", write("bad.cfg", "L 0\n")}).code, 2);
  EXPECT_EQ(run({"cluster", in, "--config", write("u.cfg", "bogus = 1\nk = 2\n")}).code, 2);
  EXPECT_EQ(run({"cluster", in, "--config", path("none.cfg")}).code, 2);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"distmat", "--help"}).code, 0);
}
