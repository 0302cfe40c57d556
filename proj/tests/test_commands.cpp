// Copyright 2026 The uhdiqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "corpus.hpp"
#include "support.hpp"
#include "uhdiqa/commands.hpp"

using namespace uhdiqa;
using namespace testing_support;

namespace {

std::ostringstream sink;

cli::RunConfig config(const fs::path& out, std::uint64_t seed = 1, unsigned threads = 1) {
  cli::RunConfig c;
  c.out_dir = out;
  c.seed = seed;
  c.threads = threads;
  c.log = &sink;
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(UHDIQA_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// Manifest-only corpus (no images) with 900 test rows, 300 exclusive.
fs::path test_split_manifest(const fs::path& dir, std::vector<double>& mos) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  std::string text = "image_id,path,mos,split,exclusive,categories\n";
  for (int i = 0; i < 40; ++i) text += "tr" + std::to_string(i) + ",x.png,0.5,train,false,\n";
  mos.clear();
  for (int i = 0; i < 900; ++i) {
    mos.push_back(u(g));
    text += "t" + std::to_string(i) + ",x.png," + csv::format_double(mos.back()) + ",test," +
            (i % 3 == 0 ? "true" : "false") + ",\n";
  }
  write_text(dir / "manifest.csv", text);
  return dir / "manifest.csv";
}

void write_predictions(const fs::path& p, const std::vector<double>& scores, std::size_t skip = SIZE_MAX) {
  std::string text = "image_id,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (i != skip) text += "t" + std::to_string(i) + "," + csv::format_double(scores[i]) + "\n";
  write_text(p, text);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  const auto t = csv::read(in);
  auto rows = t.rows;
  rows.insert(rows.begin(), t.header);
  return rows;
}

}  // namespace

TEST(Evaluate, PerfectPredictionsAllFormats) {
  TempDir dir("eval");
  std::vector<double> mos;
  const auto manifest = test_split_manifest(dir.path(), mos);
  write_predictions(dir / "p.csv", mos);
  auto cfg = config(dir / "out");
  const auto r = cli::cmd_evaluate({manifest, dir / "p.csv", Split::Test, false}, cfg);
  EXPECT_EQ(r.n, 900u);
  EXPECT_EQ(r.report.mae, 0.0);
  EXPECT_EQ(r.report.rmse, 0.0);
  EXPECT_DOUBLE_EQ(r.report.plcc, 1.0);
  EXPECT_DOUBLE_EQ(r.report.srcc, 1.0);
  EXPECT_DOUBLE_EQ(r.report.krcc, 1.0);
  EXPECT_EQ(slurp(dir / "out" / "metrics.csv"), "n,mae,rmse,plcc,srcc,krcc\n900,0,0,1,1,1\n");
  cfg.format = cli::Format::Json;
  cli::cmd_evaluate({manifest, dir / "p.csv", Split::Test, false}, cfg);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "out" / "metrics.json")).at("n"), 900);
}

TEST(Evaluate, ExclusiveSliceUsesThreeHundredRows) {
  TempDir dir("eval_ex");
  std::vector<double> mos;
  const auto manifest = test_split_manifest(dir.path(), mos);
  std::vector<double> p(mos);
  std::mt19937_64 g(2);
  std::normal_distribution<double> noise(0, 0.05);
  for (auto& v : p) v += noise(g);
  write_predictions(dir / "p.csv", p);
  const auto all = cli::cmd_evaluate({manifest, dir / "p.csv", Split::Test, false}, config(dir / "a"));
  const auto ex = cli::cmd_evaluate({manifest, dir / "p.csv", Split::Test, true}, config(dir / "b"));
  EXPECT_EQ(all.n, 900u);
  EXPECT_EQ(ex.n, 300u);
  EXPECT_NE(all.report.mae, ex.report.mae);
}

TEST(Evaluate, MissingIdIsNamed) {
  TempDir dir("eval_missing");
  std::vector<double> mos;
  const auto manifest = test_split_manifest(dir.path(), mos);
  write_predictions(dir / "p.csv", mos, 17);
  try {
    cli::cmd_evaluate({manifest, dir / "p.csv", Split::Test, false}, config(dir / "out"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnmatchedIds);
    EXPECT_NE(std::string(e.what()).find("t17"), std::string::npos);
  }
  EXPECT_EQ(run_cli("evaluate --manifest " + manifest.string() + " --predictions " + (dir / "p.csv").string() +
                    " --out " + (dir / "o").string()),
            1);
}

TEST(Rank, PublishedReportsViaBinary) {
  TempDir dir("rank_reports");
  ASSERT_EQ(run_cli(std::string("rank --reports ") + UHDIQA_TEST_DATA + "/team_test_reports.csv --out " +
                    dir.path().string()),
            0);
  const auto rows = read_csv(dir / "leaderboard.csv");
  ASSERT_EQ(rows.size(), 9u);  // header + 8 teams; baseline excluded
  EXPECT_EQ(rows[1][0], "SJTU");
  EXPECT_EQ(rows[1][6], "1.4");
  EXPECT_EQ(rows[2][0], "GS-PIQA");
  EXPECT_EQ(rows[3][0], "CIPLAB");
  ASSERT_EQ(run_cli(std::string("rank --include-baseline --reports ") + UHDIQA_TEST_DATA +
                    "/team_test_reports.csv --out " + dir.path().string()),
            0);
  EXPECT_EQ(read_csv(dir / "leaderboard.csv").size(), 10u);
}

TEST(Rank, SubmissionDirectory) {
  TempDir dir("rank_dir");
  std::vector<double> mos;
  const auto manifest = test_split_manifest(dir.path(), mos);
  fs::create_directories(dir / "subs");
  std::vector<double> good(mos), bad(mos);
  std::mt19937_64 g(3);
  std::normal_distribution<double> small(0, 0.01), big(0, 0.2);
  for (std::size_t i = 0; i < mos.size(); ++i) good[i] += small(g), bad[i] += big(g);
  write_predictions(dir / "subs" / "good.csv", good);
  write_predictions(dir / "subs" / "bad.csv", bad);
  const auto lb = cli::cmd_rank({manifest, dir / "subs", {}, Split::Test, false, false, "baseline"}, config(dir / "out"));
  ASSERT_EQ(lb.rows.size(), 2u);
  EXPECT_EQ(lb.rows[0].team, "good");
  EXPECT_EQ(lb.rows[0].score, 1.0);
  EXPECT_EQ(lb.rows[1].score, 2.0);
  EXPECT_TRUE(fs::exists(dir / "out" / "leaderboard.txt"));
  EXPECT_EQ(read_csv(dir / "out" / "reports.csv").size(), 3u);

  write_predictions(dir / "subs" / "good.txt", good);
  try {
    cli::cmd_rank({manifest, dir / "subs", {}, Split::Test, false, false, "baseline"}, config(dir / "out"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateTeam);
  }
}

TEST(Report, IdentityAndQuadraticFits) {
  TempDir dir("report");
  std::vector<double> mos;
  const auto manifest = test_split_manifest(dir.path(), mos);
  write_predictions(dir / "p.csv", mos);
  const auto id = cli::cmd_report({manifest, dir / "p.csv", Split::Test, false, 20, 101, true}, config(dir / "a"));
  EXPECT_NEAR(id.fit.a0, 0, 1e-9);
  EXPECT_NEAR(id.fit.a1, 1, 1e-9);
  EXPECT_NEAR(id.fit.a2, 0, 1e-9);
  EXPECT_TRUE(fs::exists(dir / "a" / "scatter.svg"));
  EXPECT_TRUE(fs::exists(dir / "a" / "density.svg"));

  std::vector<double> sq(mos);
  for (auto& v : sq) v *= v;
  write_predictions(dir / "q.csv", sq);
  const auto quad = cli::cmd_report({manifest, dir / "q.csv", Split::Test, false, 20, 101, false}, config(dir / "b"));
  EXPECT_NEAR(quad.fit.a0, 0, 1e-9);
  EXPECT_NEAR(quad.fit.a1, 0, 1e-9);
  EXPECT_NEAR(quad.fit.a2, 1, 1e-9);
}

TEST(Report, CurveSamplesEvaluateEmittedCoefficients) {
  TempDir dir("report_curve");
  std::vector<double> mos;
  const auto manifest = test_split_manifest(dir.path(), mos);
  std::vector<double> p(mos);
  std::mt19937_64 g(4);
  std::normal_distribution<double> noise(0, 0.1);
  for (auto& v : p) v = std::sin(3 * v) + noise(g);
  write_predictions(dir / "p.csv", p);
  cli::cmd_report({manifest, dir / "p.csv", Split::Test, false, 20, 101, false}, config(dir / "o"));
  const auto coef = read_csv(dir / "o" / "poly2.csv");
  const double a0 = std::stod(coef[1][0]), a1 = std::stod(coef[1][1]), a2 = std::stod(coef[1][2]);
  const auto curve = read_csv(dir / "o" / "curve.csv");
  ASSERT_EQ(curve.size(), 102u);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double x = std::stod(curve[i][0]);
    EXPECT_NEAR(std::stod(curve[i][1]), a0 + a1 * x + a2 * x * x, 1e-12);
  }
  EXPECT_EQ(read_csv(dir / "o" / "points.csv").size(), 901u);
  EXPECT_EQ(read_csv(dir / "o" / "density.csv").size(), 41u);  // overall + exclusive, 20 bins
}

TEST(Sample, IdentityGridAndRerun) {
  TempDir dir("sample");
  fs::create_directories(dir / "imgs");
  const Image small = noise_image(64, 48, 1);
  io::write_png(dir / "imgs" / "small.png", small);
  Image uhd(3840, 2160);
  for (int y = 0; y < 2160; ++y)
    for (int x = 0; x < 3840; ++x) {
      auto* p = uhd.pixel(x, y);
      p[0] = static_cast<std::uint8_t>(x), p[1] = static_cast<std::uint8_t>(y), p[2] = static_cast<std::uint8_t>(x ^ y);
    }
  io::write_png(dir / "imgs" / "uhd.png", uhd);

  write_text(dir / "id.json", R"({"name":"id","views":[{"kind":"identity"}]})");
  cli::cmd_sample({dir / "imgs", dir / "id.json", false}, config(dir / "id_out"));
  EXPECT_EQ(io::read_image(dir / "id_out" / "small__0.png"), small);

  write_text(dir / "grid.json", R"({"name":"g","views":[{"kind":"grid_sample","grid_n":16,"fragment_n":24,"output_k":384,"seed":3},{"kind":"identity"}]})");
  // The small image cannot host 16x16 fragments of 24 px: collected, not fatal.
  const auto r1 = cli::cmd_sample({dir / "imgs", dir / "grid.json", false}, config(dir / "g1", 7, 1));
  ASSERT_EQ(r1.errors.size(), 1u);
  EXPECT_NE(r1.errors[0].find("small.png"), std::string::npos);
  const Image g = io::read_image(dir / "g1" / "uhd__0.png");
  EXPECT_EQ(g.width(), 384);
  EXPECT_EQ(g.height(), 384);

  const auto r2 = cli::cmd_sample({dir / "imgs", dir / "grid.json", false}, config(dir / "g2", 7, 3));
  ASSERT_EQ(r2.written.size(), r1.written.size());
  for (std::size_t i = 0; i < r1.written.size(); ++i)
    EXPECT_EQ(slurp(r1.written[i]), slurp(r2.written[i])) << r1.written[i];
  cli::cmd_sample({dir / "imgs", dir / "grid.json", false}, config(dir / "g3", 8, 1));
  EXPECT_NE(slurp(dir / "g1" / "uhd__0.png"), slurp(dir / "g3" / "uhd__0.png"));

  EXPECT_EQ(run_cli("sample --images " + (dir / "imgs").string() + " --views " + (dir / "grid.json").string() +
                    " --out " + (dir / "g4").string()),
            1);
}

TEST(Sample, RawSeedsAndEnvironmentSeed) {
  TempDir dir("sample_seed");
  fs::create_directories(dir / "imgs");
  const Image img = noise_image(96, 96, 2);
  io::write_png(dir / "imgs" / "a.png", img);
  write_text(dir / "v.json", R"({"views":[{"kind":"grid_sample","grid_n":4,"fragment_n":16,"seed":5}]})");
  cli::cmd_sample({dir / "imgs", dir / "v.json", true}, config(dir / "raw"));
  EXPECT_EQ(io::read_image(dir / "raw" / "a__0.png"), grid_sample(img, {4, 16, 64, 5}));

  const std::string base = "sample --images " + (dir / "imgs").string() + " --views " + (dir / "v.json").string();
  ASSERT_EQ(run_cli(base + " --seed 42 --out " + (dir / "s1").string()), 0);
  ASSERT_EQ(run_cli("--out " + (dir / "s2").string() + " " + base), 0);
  const std::string env = "UHDIQA_SEED=42 " + std::string(UHDIQA_CLI) + " --out " + (dir / "s3").string() + " " +
                          base + " >/dev/null 2>&1";
  ASSERT_EQ(std::system(env.c_str()), 0);
  EXPECT_EQ(slurp(dir / "s1" / "a__0.png"), slurp(dir / "s3" / "a__0.png"));
  EXPECT_NE(slurp(dir / "s1" / "a__0.png"), slurp(dir / "s2" / "a__0.png"));
}

TEST(Macs, ExitCodes) {
  TempDir dir("macs");
  const std::string data = UHDIQA_TEST_DATA;
  EXPECT_EQ(run_cli("macs --graph " + data + "/graph_4_2g.json --budget 50 --out " + dir.path().string()), 0);
  EXPECT_EQ(run_cli("macs --graph " + data + "/graph_46_73g.json --out " + dir.path().string()), 0);
  EXPECT_EQ(run_cli("macs --graph " + data + "/graph_359_74g.json --out " + dir.path().string()), 2);
  const auto j = nlohmann::json::parse(slurp(dir / "macs.json"));
  EXPECT_EQ(j.at("total_macs"), 359'740'000'000ull);
  EXPECT_FALSE(j.at("pass").get<bool>());
  write_text(dir / "bad.json", R"({"input":[1,1,1],"layers":[{"kind":"nope"}]})");
  EXPECT_EQ(run_cli("macs --graph " + (dir / "bad.json").string() + " --out " + dir.path().string()), 1);
  EXPECT_EQ(run_cli("macs --graph " + (dir / "missing.json").string()), 1);
  EXPECT_EQ(run_cli("macs --graph " + data + "/graph_46_73g.json --budget 46.73 --strict --out " + dir.path().string()), 2);
}

TEST(FitPredict, FeatureTableRoundTrip) {
  TempDir dir("fit_table");
  std::mt19937_64 g(5);
  std::normal_distribution<double> d(0, 1);
  std::string manifest = "image_id,path,mos,split,exclusive,categories\n", feats = "image_id,v0.a,v0.b,v1.a,v1.b\n";
  for (int i = 0; i < 60; ++i) {
    const double a = d(g), b = d(g), c = d(g), e = d(g);
    const std::string id = "r" + std::to_string(i);
    manifest += id + ",x.png," + csv::format_double(0.5 + 0.1 * a - 0.05 * c + 0.01 * d(g)) + "," +
                (i < 40 ? "train" : "validation") + ",false,\n";
    feats += id + "," + csv::format_double(a) + "," + csv::format_double(b) + "," + csv::format_double(c) + "," +
             csv::format_double(e) + "\n";
  }
  write_text(dir / "m.csv", manifest);
  write_text(dir / "f.csv", feats);

  for (bool ensemble : {false, true}) {
    cli::FitArgs fa;
    fa.manifest = dir / "m.csv";
    fa.features = dir / "f.csv";
    fa.ensemble = ensemble;
    const auto fit = cli::cmd_fit(fa, config(dir / "out"));
    cli::PredictArgs pa;
    pa.model = fit.written;
    pa.features = dir / "f.csv";
    const auto preds = cli::cmd_predict(pa, config(dir / "out"));
    std::ifstream in(dir / "f.csv");
    const auto table = read_feature_table(in);
    const auto direct = fit.model.model(table);
    ASSERT_EQ(preds.size(), 60u);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      EXPECT_EQ(preds[i].first, table.ids[i]);
      EXPECT_EQ(preds[i].second, direct[i]);
    }
    const auto csv_rows = read_csv(dir / "out" / "predictions.csv");
    EXPECT_EQ(std::stod(csv_rows[5][1]), direct[4]);
  }

  // Student fitted on train plus teacher-labelled validation rows.
  cli::FitArgs teacher_fit;
  teacher_fit.manifest = dir / "m.csv";
  teacher_fit.features = dir / "f.csv";
  teacher_fit.model_out = "teacher.json";
  cli::cmd_fit(teacher_fit, config(dir / "out"));
  cli::FitArgs student = teacher_fit;
  student.model_out = "student.json";
  student.teacher = dir / "out" / "teacher.json";
  student.pseudo_weight = 0.5;
  EXPECT_NO_THROW(cli::cmd_fit(student, config(dir / "out")));
}

TEST(FitPredict, ImagesThroughViewSetViaBinary) {
  TempDir dir("fit_images");
  const auto manifest = write_corpus(dir.path(), blur_corpus(25, 48, 48, 3));
  const std::string m = manifest.string(), o = (dir / "out").string();
  ASSERT_EQ(run_cli("fit --manifest " + m + " --views " + UHDIQA_TEST_DATA + "/views_three_branch.json --out " + o), 0);
  ASSERT_EQ(run_cli("predict --model " + o + "/model.json --manifest " + m + " --split test --samples 3 --out " + o), 0);
  ASSERT_EQ(run_cli("evaluate --manifest " + m + " --predictions " + o + "/predictions.csv --format json --out " + o), 0);
  EXPECT_TRUE(nlohmann::json::parse(slurp(dir / "out" / "metrics.json")).contains("srcc"));
  const std::string first = slurp(dir / "out" / "predictions.csv");
  ASSERT_EQ(run_cli("--threads 4 predict --model " + o + "/model.json --manifest " + m +
                    " --split test --samples 3 --out " + o),
            0);
  EXPECT_EQ(slurp(dir / "out" / "predictions.csv"), first);
}

TEST(Stats, CountsAndDensities) {
  TempDir dir("stats");
  std::vector<double> mos;
  const auto manifest = test_split_manifest(dir.path(), mos);
  const auto st = cli::cmd_stats({manifest, 10, false, {"overall", "exclusive", "test"}}, config(dir / "o"));
  EXPECT_EQ(st.counts.at(Split::Test), 900u);
  EXPECT_EQ(st.exclusive_counts.at(Split::Test), 300u);
  EXPECT_EQ(read_csv(dir / "o" / "stats.csv").size(), 31u);
  EXPECT_EQ(run_cli("stats --kde --manifest " + manifest.string() + " --out " + (dir / "o").string()), 0);
}

TEST(Cli, UsageErrorsExitNonZero) {
  EXPECT_NE(run_cli(""), 0);
  EXPECT_NE(run_cli("evaluate"), 0);
  EXPECT_NE(run_cli("bogus"), 0);
  EXPECT_EQ(run_cli("--help"), 0);
}
