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

// Command-line front end: uhdiqa <command> [options]
//
// Exit status: 0 on success, 1 on any error, 2 when `macs` finds a model
// over budget.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "uhdiqa/commands.hpp"

namespace {

using namespace uhdiqa;
namespace fs = std::filesystem;

CLI::Option* add_split(CLI::App* app, Split& split, const std::string& what, const std::string& flag = "--split") {
  return app
      ->add_option_function<std::string>(
          flag, [&split](const std::string& s) { split = parse_split(s); }, what)
      ->check(CLI::IsMember({"train", "validation", "val", "test"}, CLI::ignore_case));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quality assessment toolkit for high-resolution images"};
  app.require_subcommand(1);
  app.fallthrough();

  cli::RunConfig cfg;
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = 1;
  app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", format, "Metric output format")
      ->check(CLI::IsMember({"csv", "json", "text"}))
      ->capture_default_str();
  app.add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t s) { seed = s, seed_given = true; }, "Root seed (default: $UHDIQA_SEED or 0)");
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();

  cli::EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against MOS");
  evaluate->add_option("--manifest", ev.manifest)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--predictions", ev.predictions)->required()->check(CLI::ExistingFile);
  add_split(evaluate, ev.split, "Split to score (default test)");
  evaluate->add_flag("--exclusive-only", ev.exclusive_only, "Restrict to the exclusive slice");

  cli::RankArgs rk;
  auto* rank = app.add_subcommand("rank", "Rank teams by mean per-metric rank");
  rank->add_option("--manifest", rk.manifest)->check(CLI::ExistingFile);
  auto* subs_opt = rank->add_option("--submissions", rk.submissions_dir, "Directory of <team>.csv files")
                       ->check(CLI::ExistingDirectory);
  auto* reports_opt =
      rank->add_option("--reports", rk.reports, "CSV of team,mae,rmse,plcc,srcc,krcc")->check(CLI::ExistingFile);
  subs_opt->excludes(reports_opt);
  add_split(rank, rk.split, "Split to score (default test)");
  rank->add_flag("--exclusive-only", rk.exclusive_only);
  rank->add_flag("--include-baseline", rk.include_baseline, "Rank the baseline entry as well");
  rank->add_option("--baseline-name", rk.baseline_name)->capture_default_str();

  cli::ReportArgs rp;
  auto* report = app.add_subcommand("report", "Scatter, poly2 fit and MOS density data");
  report->add_option("--manifest", rp.manifest)->required()->check(CLI::ExistingFile);
  report->add_option("--predictions", rp.predictions)->required()->check(CLI::ExistingFile);
  add_split(report, rp.split, "Split to plot (default test)");
  report->add_flag("--exclusive-only", rp.exclusive_only);
  report->add_option("--bins", rp.bins)->capture_default_str()->check(CLI::PositiveNumber);
  report->add_flag("--svg", rp.svg, "Also write scatter.svg and density.svg");

  cli::SampleArgs sp;
  auto* sample = app.add_subcommand("sample", "Materialise the views of every image");
  sample->add_option("--images", sp.images_dir)->required()->check(CLI::ExistingDirectory);
  sample->add_option("--views", sp.viewset, "View set JSON")->required()->check(CLI::ExistingFile);
  sample->add_flag("--raw-seeds", sp.raw_seeds, "Use the seeds in the view set as written");

  cli::MacsArgs mc;
  auto* macs = app.add_subcommand("macs", "Count multiply-accumulates and check the budget");
  macs->add_option("--graph", mc.graph, "Model graph JSON")->required()->check(CLI::ExistingFile);
  macs->add_option("--budget", mc.budget_gmacs, "Budget in GMACs")->capture_default_str();
  macs->add_flag("--strict", mc.strict, "Fail when the total equals the budget");

  cli::FitArgs ft;
  auto* fit = app.add_subcommand("fit", "Fit a ridge (or ensemble) quality predictor");
  fit->add_option("--manifest", ft.manifest)->required()->check(CLI::ExistingFile);
  add_split(fit, ft.split, "Labeled split (default train)");
  auto* feat_opt = fit->add_option("--features", ft.features, "Feature table CSV")->check(CLI::ExistingFile);
  fit->add_option("--views", ft.viewset, "View set JSON for image features")
      ->check(CLI::ExistingFile)
      ->excludes(feat_opt);
  fit->add_flag("--ensemble", ft.ensemble, "Fit the leave-one-group-out ensemble");
  fit->add_option("--split-fraction", ft.split_fraction)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  fit->add_option("--teacher", ft.teacher, "Model JSON used to pseudo-label")->check(CLI::ExistingFile);
  add_split(fit, ft.unlabeled_split, "Split pseudo-labeled by the teacher (default validation)", "--unlabeled-split");
  fit->add_option("--pseudo-weight", ft.pseudo_weight)->capture_default_str()->check(CLI::NonNegativeNumber);
  fit->add_option("--model-out", ft.model_out)->capture_default_str();

  cli::PredictArgs pr;
  Split predict_split = Split::Test;
  auto* predict = app.add_subcommand("predict", "Predict quality scores");
  predict->add_option("--model", pr.model)->required()->check(CLI::ExistingFile);
  auto* pfeat = predict->add_option("--features", pr.features)->check(CLI::ExistingFile);
  predict->add_option("--manifest", pr.manifest)->check(CLI::ExistingFile)->excludes(pfeat);
  auto* psplit = add_split(predict, predict_split, "Only predict this manifest split");
  predict->add_option("--samples", pr.samples, "Stochastic samples averaged per image")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  predict->add_option("--predictions-out", pr.predictions_out)->capture_default_str();

  cli::StatsArgs st;
  auto* stats = app.add_subcommand("stats", "Split counts and MOS densities");
  stats->add_option("--manifest", st.manifest)->required()->check(CLI::ExistingFile);
  stats->add_option("--bins", st.bins)->capture_default_str()->check(CLI::PositiveNumber);
  stats->add_flag("--kde", st.kde, "Gaussian KDE instead of a histogram");
  stats->add_option("--subsets", st.subsets, "Subsets: overall, exclusive, train, validation, test")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? cli::kExitOk : cli::kExitError;
  }

  try {
    cfg.seed = seed_given ? seed : cli::seed_from_env();
    cfg.format = cli::parse_format(format);
    cfg.threads = threads == 0 ? default_threads() : threads;

    if (*evaluate) cli::cmd_evaluate(ev, cfg);
    else if (*rank) {
      if (rk.reports.empty() && (rk.submissions_dir.empty() || rk.manifest.empty()))
        fail(ErrorCode::InvalidInput, "rank needs --reports, or --manifest with --submissions");
      cli::cmd_rank(rk, cfg);
    } else if (*report) cli::cmd_report(rp, cfg);
    else if (*sample) {
      const auto res = cli::cmd_sample(sp, cfg);
      if (!res.errors.empty()) return cli::kExitError;
    } else if (*macs) {
      if (!cli::cmd_macs(mc, cfg).pass) return cli::kExitBudgetFail;
    } else if (*fit) cli::cmd_fit(ft, cfg);
    else if (*predict) {
      if (*psplit) pr.split = predict_split;
      cli::cmd_predict(pr, cfg);
    } else if (*stats) cli::cmd_stats(st, cfg);
  } catch (const Error& e) {
    std::cerr << "uhdiqa: " << to_string(e.code()) << ": " << e.what() << '\n';
    return cli::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "uhdiqa: " << e.what() << '\n';
    return cli::kExitError;
  }
  return cli::kExitOk;
}
