// smx: score-guided mixing augmentation toolkit.
// Subcommands: make-data, train-score, augment, train-gan, ablate-mu, eval.
// Exit codes: 0 success, 1 runtime failure (divergence), 2 usage/config error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smx/augment.hpp"
#include "smx/config.hpp"
#include "smx/dataset.hpp"
#include "smx/errors.hpp"
#include "smx/field.hpp"
#include "smx/gan.hpp"
#include "smx/metrics.hpp"
#include "smx/plot.hpp"
#include "smx/scorenet.hpp"

namespace fs = std::filesystem;
using namespace smx;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- config ---

// Merge: file config first, then --set overrides (flags win).
RunConfig merged_config(const std::string& config_path,
                        const std::vector<std::string>& overrides) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = RunConfig::parse_file(config_path);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw SchemaError("--set expects key=value, got: " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write " + path);
  out << body;
}

fs::path make_run_dir(const RunConfig& cfg) {
  const std::string dir = cfg.get_string("out_dir", "");
  if (dir.empty()) throw PreconditionError("out_dir is required");
  fs::create_directories(dir);
  return dir;
}

GaussianMixture oracle_from(const RunConfig& cfg) {
  const std::string name = cfg.get_string("oracle", "");
  if (name.empty()) throw PreconditionError("oracle preset is required");
  if (name == "gauss1")
    return preset_gauss1(cfg.get_double("oracle_tau", 0.5),
                         static_cast<int>(cfg.get_long("oracle_dim", 2)));
  return preset_by_name(name);
}

// "analytic" (oracle score), or a path to an SMXN checkpoint.
std::unique_ptr<ScoreField> field_from(const RunConfig& cfg) {
  const std::string spec = cfg.get_string("field", "analytic");
  if (spec == "analytic")
    return std::make_unique<AnalyticScoreField>(oracle_from(cfg));
  return std::make_unique<LearnedScoreField>(load_smxn(spec));
}

MixConfig mix_from(const RunConfig& cfg) {
  MixConfig mix;
  mix.alpha = cfg.get_double("mix.alpha", mix.alpha);
  mix.eta = cfg.get_double("mix.eta", mix.eta);
  mix.steps = static_cast<int>(cfg.get_long("mix.steps", mix.steps));
  mix.t0 = cfg.get_double("mix.t0", mix.t0);
  mix.clamp01 = cfg.get_bool("mix.clamp01", mix.clamp01);
  mix.seed = static_cast<std::uint64_t>(cfg.get_long("mix.seed", 0));
  return mix;
}

void echo_mix(RunConfig& echo, const MixConfig& mix) {
  echo.set("mix.alpha", fmt17(mix.alpha));
  echo.set("mix.eta", fmt17(mix.eta));
  echo.set("mix.steps", std::to_string(mix.steps));
  echo.set("mix.t0", fmt17(mix.t0));
  echo.set("mix.clamp01", mix.clamp01 ? "true" : "false");
  echo.set("mix.seed", std::to_string(mix.seed));
}

GanTrainConfig gan_from(const RunConfig& cfg) {
  GanTrainConfig g;
  g.pipeline = pipeline_from_string(
      cfg.get_string("gan.pipeline", pipeline_to_string(g.pipeline)));
  g.mu = cfg.get_double("gan.mu", g.mu);
  g.growing = cfg.get_bool("gan.growing", g.growing);
  g.grow_probability = cfg.get_double("gan.grow_probability", g.grow_probability);
  g.epochs = static_cast<int>(cfg.get_long("gan.epochs", g.epochs));
  g.batch_size = static_cast<int>(cfg.get_long("gan.batch_size", g.batch_size));
  g.eval_every = static_cast<int>(cfg.get_long("gan.eval_every", g.eval_every));
  g.lr_g = cfg.get_double("gan.lr_g", g.lr_g);
  g.lr_d = cfg.get_double("gan.lr_d", g.lr_d);
  g.early_stop_patience = static_cast<int>(
      cfg.get_long("gan.early_stop_patience", g.early_stop_patience));
  g.seed = static_cast<std::uint64_t>(cfg.get_long("gan.seed", 0));
  g.latent_dim = static_cast<int>(cfg.get_long("gan.latent_dim", g.latent_dim));
  g.eval_samples = static_cast<int>(
      cfg.get_long("gan.eval_samples", g.eval_samples));
  return g;
}

void echo_gan(RunConfig& echo, const GanTrainConfig& g) {
  echo.set("gan.pipeline", pipeline_to_string(g.pipeline));
  echo.set("gan.mu", fmt17(g.mu));
  echo.set("gan.growing", g.growing ? "true" : "false");
  echo.set("gan.grow_probability", fmt17(g.grow_probability));
  echo.set("gan.epochs", std::to_string(g.epochs));
  echo.set("gan.batch_size", std::to_string(g.batch_size));
  echo.set("gan.eval_every", std::to_string(g.eval_every));
  echo.set("gan.lr_g", fmt17(g.lr_g));
  echo.set("gan.lr_d", fmt17(g.lr_d));
  echo.set("gan.early_stop_patience", std::to_string(g.early_stop_patience));
  echo.set("gan.seed", std::to_string(g.seed));
  echo.set("gan.latent_dim", std::to_string(g.latent_dim));
  echo.set("gan.eval_samples", std::to_string(g.eval_samples));
}

void echo_oracle(RunConfig& echo, const RunConfig& cfg) {
  echo.set("oracle", cfg.get_string("oracle", ""));
  if (cfg.get_string("oracle", "") == "gauss1") {
    echo.set("oracle_tau", fmt17(cfg.get_double("oracle_tau", 0.5)));
    echo.set("oracle_dim", std::to_string(cfg.get_long("oracle_dim", 2)));
  }
}

// --------------------------------------------------------------- commands ---

int cmd_make_data(const std::string& preset, long count, long seed,
                  const std::string& out, double tau, long dim) {
  GaussianMixture gmm = preset == "gauss1"
                            ? preset_gauss1(tau, static_cast<int>(dim))
                            : preset_by_name(preset);
  Dataset ds = sample_gmm(gmm, static_cast<std::size_t>(count),
                          static_cast<std::uint64_t>(seed));
  ds.range_bounded = preset_is_range_bounded(preset);
  if (const fs::path dir = fs::path(out).parent_path(); !dir.empty())
    fs::create_directories(dir);
  save_smxd(ds, out);
  std::printf("wrote %s: preset=%s d=%d count=%zu seed=%ld\n", out.c_str(),
              preset.c_str(), ds.dimension, ds.size(), seed);
  return 0;
}

int cmd_train_score(const RunConfig& cfg) {
  cfg.validate_keys({"data", "out_dir", "score.learning_rate",
                     "score.batch_size", "score.steps", "score.seed",
                     "score.sum_all_scales", "score.warm_start"});
  const fs::path dir = make_run_dir(cfg);
  Dataset ds = load_smxd(cfg.get_string("data", ""));
  NoiseSchedule schedule = make_schedule(ds);

  ScoreTrainConfig tc;
  tc.learning_rate = cfg.get_double("score.learning_rate", tc.learning_rate);
  tc.batch_size = static_cast<int>(cfg.get_long("score.batch_size", tc.batch_size));
  tc.steps = cfg.get_long("score.steps", tc.steps);
  tc.seed = static_cast<std::uint64_t>(cfg.get_long("score.seed", 0));
  tc.sum_all_scales = cfg.get_bool("score.sum_all_scales", tc.sum_all_scales);
  tc.warm_start = cfg.get_bool("score.warm_start", tc.warm_start);

  RunConfig echo;
  echo.set("data", cfg.get_string("data", ""));
  echo.set("out_dir", cfg.get_string("out_dir", ""));
  echo.set("score.learning_rate", fmt17(tc.learning_rate));
  echo.set("score.batch_size", std::to_string(tc.batch_size));
  echo.set("score.steps", std::to_string(tc.steps));
  echo.set("score.seed", std::to_string(tc.seed));
  echo.set("score.sum_all_scales", tc.sum_all_scales ? "true" : "false");
  echo.set("score.warm_start", tc.warm_start ? "true" : "false");
  write_text((dir / "config.txt").string(), echo.to_text());

  ScoreTrainResult res = train_scorenet(ds, schedule, tc);
  save_smxn(res.net, (dir / "score.smxn").string());

  std::ofstream csv(dir / "loss.csv");
  csv << "step,loss\n";
  for (std::size_t i = 0; i < res.loss_trajectory.size(); ++i)
    csv << i + 1 << "," << fmt17(res.loss_trajectory[i]) << "\n";
  csv.close();

  const std::size_t n = res.loss_trajectory.size();
  const std::size_t window = std::min<std::size_t>(500, n);
  double tail = 0.0;
  for (std::size_t i = n - window; i < n; ++i) tail += res.loss_trajectory[i];
  std::printf("trained %ld steps over %d scales; final smoothed loss %.6g\n",
              tc.steps, schedule.scale_count(),
              window ? tail / window : std::nan(""));
  return 0;
}

int cmd_augment(const RunConfig& cfg) {
  cfg.validate_keys({"data", "out_dir", "mu", "field", "oracle", "oracle_tau",
                     "oracle_dim", "mix.alpha", "mix.eta", "mix.steps",
                     "mix.t0", "mix.clamp01", "mix.seed"});
  const fs::path dir = make_run_dir(cfg);
  Dataset ds = load_smxd(cfg.get_string("data", ""));
  std::unique_ptr<ScoreField> field = field_from(cfg);
  MixConfig mix = mix_from(cfg);
  const double mu = cfg.get_double("mu", 1.0);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("mix.seed", 0));

  RunConfig echo;
  echo.set("data", cfg.get_string("data", ""));
  echo.set("out_dir", cfg.get_string("out_dir", ""));
  echo.set("mu", fmt17(mu));
  echo.set("field", cfg.get_string("field", "analytic"));
  if (cfg.has("oracle")) echo_oracle(echo, cfg);
  echo_mix(echo, mix);
  write_text((dir / "config.txt").string(), echo.to_text());

  AugmentResult res = augment_batch(ds, *field, mix, mu, seed);
  save_smxd(res.augmented, (dir / "augmented.smxd").string());
  save_smxa(res, (dir / "audit.smxa").string());

  std::printf("augmented %zu -> %zu samples (mu=%.3g)\n", ds.size(),
              res.augmented.size(), mu);
  if (cfg.has("oracle")) {
    GaussianMixture oracle = oracle_from(cfg);
    std::size_t gained = 0;
    double mean_gain = 0.0;
    for (const AugmentationRecord& r : res.records) {
      const double gain =
          oracle.log_density(r.x_star) - oracle.log_density(r.x_mixed);
      mean_gain += gain;
      if (gain >= -1e-9) ++gained;
    }
    if (!res.records.empty()) {
      std::printf("density gain: %.1f%% of samples, mean %.4g nats\n",
                  100.0 * gained / res.records.size(),
                  mean_gain / res.records.size());
    }
  }
  return 0;
}

const std::vector<std::string> kGanKeys = {
    "data", "out_dir", "field", "oracle", "oracle_tau", "oracle_dim",
    "gan.pipeline", "gan.mu", "gan.growing", "gan.grow_probability",
    "gan.epochs", "gan.batch_size", "gan.eval_every", "gan.lr_g", "gan.lr_d",
    "gan.early_stop_patience", "gan.seed", "gan.latent_dim",
    "gan.eval_samples", "mix.alpha", "mix.eta", "mix.steps", "mix.t0",
    "mix.clamp01", "mix.seed"};

void echo_gan_run(RunConfig& echo, const RunConfig& cfg,
                  const GanTrainConfig& gc, const MixConfig& mix) {
  echo.set("data", cfg.get_string("data", ""));
  echo.set("out_dir", cfg.get_string("out_dir", ""));
  echo.set("field", cfg.get_string("field", "analytic"));
  echo_oracle(echo, cfg);
  echo_gan(echo, gc);
  echo_mix(echo, mix);
}

void emit_trace_artifacts(const TrainingTrace& trace, const fs::path& dir,
                          const GaussianMixture& oracle) {
  save_trace_csv(trace, (dir / "trace.csv").string());
  PlotSeries frechet{"frechet", {}, {}};
  PlotSeries coverage{"mode_coverage", {}, {}};
  for (const TraceRow& r : trace.rows) {
    frechet.x.push_back(r.epoch);
    frechet.y.push_back(r.frechet);
    coverage.x.push_back(r.epoch);
    coverage.y.push_back(r.coverage);
  }
  save_svg_plot({frechet, coverage}, "training metrics", "epoch", "value",
                (dir / "metrics.svg").string());
  // generated pool from the best checkpoint, for downstream `eval`
  std::vector<SampleVec> best =
      generate_samples(trace.best_checkpoint, 4096, 0x5eedbea7ULL);
  Dataset out;
  out.dimension = oracle.dimension();
  out.samples = std::move(best);
  save_smxd(out, (dir / "best_samples.smxd").string());
}

int cmd_train_gan(const RunConfig& cfg) {
  cfg.validate_keys(kGanKeys);
  const fs::path dir = make_run_dir(cfg);
  Dataset ds = load_smxd(cfg.get_string("data", ""));
  GaussianMixture oracle = oracle_from(cfg);
  GanTrainConfig gc = gan_from(cfg);
  MixConfig mix = mix_from(cfg);
  std::unique_ptr<ScoreField> field;
  const bool wants_aug = gc.mu > 0.0 || gc.growing ||
                         gc.pipeline == Pipeline::conditional_aug_input;
  if (wants_aug && gc.pipeline != Pipeline::mixup_baseline)
    field = field_from(cfg);

  RunConfig echo;
  echo_gan_run(echo, cfg, gc, mix);
  write_text((dir / "config.txt").string(), echo.to_text());

  TrainingTrace trace = train_gan(ds, field.get(), mix, gc, oracle);
  emit_trace_artifacts(trace, dir, oracle);
  std::printf("pipeline=%s mu=%.3g: best frechet %.6g at epoch %d "
              "(stopped at %d)\n",
              pipeline_to_string(gc.pipeline).c_str(), gc.mu,
              trace.best_metric, trace.best_epoch, trace.stopped_at);
  return 0;
}

int cmd_ablate_mu(const RunConfig& cfg, const std::string& mu_list_flag) {
  std::vector<std::string> keys = kGanKeys;
  keys.insert(keys.end(), {"ablate.mu_list", "ablate.seeds",
                           "ablate.include_growing", "ablate.grow_probability"});
  cfg.validate_keys(keys);
  const fs::path dir = make_run_dir(cfg);
  Dataset ds = load_smxd(cfg.get_string("data", ""));
  GaussianMixture oracle = oracle_from(cfg);
  GanTrainConfig base = gan_from(cfg);
  MixConfig mix = mix_from(cfg);

  const std::string mu_list = !mu_list_flag.empty()
                                  ? mu_list_flag
                                  : cfg.get_string("ablate.mu_list", "0,1,10");
  std::vector<double> mus;
  std::stringstream ss(mu_list);
  for (std::string tok; std::getline(ss, tok, ',');) mus.push_back(std::stod(tok));
  if (mus.empty()) throw PreconditionError("ablate.mu_list is empty");
  const int n_seeds = static_cast<int>(cfg.get_long("ablate.seeds", 5));
  const bool include_growing = cfg.get_bool("ablate.include_growing", true);
  const double grow_p = cfg.get_double("ablate.grow_probability", 1.0);

  RunConfig echo;
  echo_gan_run(echo, cfg, base, mix);
  echo.set("ablate.mu_list", mu_list);
  echo.set("ablate.seeds", std::to_string(n_seeds));
  echo.set("ablate.include_growing", include_growing ? "true" : "false");
  echo.set("ablate.grow_probability", fmt17(grow_p));
  write_text((dir / "config.txt").string(), echo.to_text());

  std::unique_ptr<ScoreField> field = field_from(cfg);

  struct Row {
    std::string regime;
    double mu;
    int seed_index;
    double best_frechet, final_frechet;
    int best_epoch, stopped_at;
  };
  std::vector<Row> rows;
  auto run_one = [&](const std::string& regime, double mu, bool growing,
                     int seed_index) {
    GanTrainConfig gc = base;
    gc.mu = mu;
    gc.growing = growing;
    gc.grow_probability = growing ? grow_p : 0.0;
    gc.seed = base.seed + static_cast<std::uint64_t>(seed_index);
    const ScoreField* f = (mu > 0.0 || growing) ? field.get() : nullptr;
    TrainingTrace trace = train_gan(ds, f, mix, gc, oracle);
    std::ostringstream name;
    name << "trace_" << regime << "_mu" << mu << "_seed" << seed_index
         << ".csv";
    save_trace_csv(trace, (dir / name.str()).string());
    rows.push_back({regime, mu, seed_index, trace.best_metric,
                    trace.rows.back().frechet, trace.best_epoch,
                    trace.stopped_at});
    return trace;
  };

  for (double mu : mus)
    for (int k = 0; k < n_seeds; ++k) run_one("static", mu, false, k);
  if (include_growing)
    for (int k = 0; k < n_seeds; ++k) run_one("growing", 0.0, true, k);

  std::ofstream csv(dir / "ablation.csv");
  csv << "regime,mu,seed_index,best_frechet,final_frechet,best_epoch,"
         "stopped_at\n";
  for (const Row& r : rows)
    csv << r.regime << "," << fmt17(r.mu) << "," << r.seed_index << ","
        << fmt17(r.best_frechet) << "," << fmt17(r.final_frechet) << ","
        << r.best_epoch << "," << r.stopped_at << "\n";
  csv.close();

  auto median_of = [&](const std::string& regime, double mu, bool best) {
    std::vector<double> v;
    for (const Row& r : rows)
      if (r.regime == regime && (regime == "growing" || r.mu == mu))
        v.push_back(best ? r.best_frechet : r.final_frechet);
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };

  PlotSeries med{"median best frechet", {}, {}};
  for (double mu : mus) {
    med.x.push_back(mu);
    med.y.push_back(median_of("static", mu, true));
  }
  save_svg_plot({med}, "augmentation ratio ablation", "mu", "frechet",
                (dir / "ablation.svg").string());

  bool monotone = true;
  for (std::size_t i = 1; i < med.y.size(); ++i)
    if (med.y[i] > med.y[i - 1]) monotone = false;
  std::printf("median best frechet over mu {%s}:", mu_list.c_str());
  for (double v : med.y) std::printf(" %.6g", v);
  std::printf("\nmonotonicity (non-increasing in mu): %s\n",
              monotone ? "holds" : "violated");
  if (include_growing) {
    const double grow_final = median_of("growing", 0.0, false);
    const double top_final = median_of("static", mus.back(), false);
    std::printf("growing final frechet %.6g vs mu=%g final %.6g: %s\n",
                grow_final, mus.back(), top_final,
                grow_final > top_final ? "growing is worse (destabilizes)"
                                       : "growing is not worse");
  }
  return 0;
}

int cmd_eval(const std::string& samples_path, const std::string& oracle_name,
             double tau, long dim, const std::string& reference_path,
             long ref_count, long ref_seed, const std::string& out_path) {
  Dataset samples = load_smxd(samples_path);
  GaussianMixture oracle = oracle_name == "gauss1"
                               ? preset_gauss1(tau, static_cast<int>(dim))
                               : preset_by_name(oracle_name);
  std::vector<SampleVec> reference;
  if (!reference_path.empty()) {
    reference = load_smxd(reference_path).samples;
  } else {
    reference = sample_gmm(oracle, static_cast<std::size_t>(ref_count),
                           static_cast<std::uint64_t>(ref_seed))
                    .samples;
  }
  MetricReport report = evaluate_samples(samples.samples, oracle, reference);
  std::ostringstream body;
  body << "metric,value\n"
       << "frechet," << fmt17(report.frechet) << "\n"
       << "mode_coverage," << fmt17(report.mode_coverage) << "\n"
       << "high_quality_fraction," << fmt17(report.high_quality_fraction) << "\n"
       << "mean_log_density," << fmt17(report.mean_log_density) << "\n"
       << "sample_count," << report.sample_count << "\n";
  std::fputs(body.str().c_str(), stdout);
  if (!out_path.empty()) write_text(out_path, body.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"score-guided mixing augmentation toolkit"};
  app.require_subcommand(1);

  // make-data
  std::string md_preset, md_out;
  long md_count = 1000, md_seed = 0, md_dim = 2;
  double md_tau = 0.5;
  CLI::App* make_data = app.add_subcommand("make-data", "sample a preset mixture");
  make_data->add_option("--preset", md_preset, "grid25 | ring8 | gauss1")->required();
  make_data->add_option("--count", md_count);
  make_data->add_option("--seed", md_seed);
  make_data->add_option("--out", md_out)->required();
  make_data->add_option("--tau", md_tau, "gauss1 std");
  make_data->add_option("--dim", md_dim, "gauss1 dimension");

  // config-driven commands share --config/--set
  std::map<std::string, std::pair<std::string, std::vector<std::string>>> cc;
  for (const char* name : {"train-score", "augment", "train-gan", "ablate-mu"}) {
    CLI::App* sub = app.add_subcommand(name, "");
    auto& slot = cc[name];
    sub->add_option("--config", slot.first, "key=value config file");
    sub->add_option("--set", slot.second, "override key=value (repeatable)");
  }
  cc["train-score"];
  app.get_subcommand("train-score")->description("fit the noise-conditional score network");
  app.get_subcommand("augment")->description("build a score-guided augmented pool");
  app.get_subcommand("train-gan")->description("train a GAN under one augmentation pipeline");
  app.get_subcommand("ablate-mu")->description("sweep the augmentation ratio");
  std::string ab_mu_list;
  app.get_subcommand("ablate-mu")->add_option("--mu-list", ab_mu_list, "comma-separated ratios");

  // eval
  std::string ev_samples, ev_oracle, ev_reference, ev_out;
  double ev_tau = 0.5;
  long ev_dim = 2, ev_ref_count = 4096, ev_ref_seed = 0;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score a sample file against an oracle");
  eval_cmd->add_option("--samples", ev_samples)->required();
  eval_cmd->add_option("--oracle", ev_oracle)->required();
  eval_cmd->add_option("--tau", ev_tau);
  eval_cmd->add_option("--dim", ev_dim);
  eval_cmd->add_option("--reference", ev_reference, "SMXD reference pool (default: oracle draw)");
  eval_cmd->add_option("--ref-count", ev_ref_count);
  eval_cmd->add_option("--ref-seed", ev_ref_seed);
  eval_cmd->add_option("--out", ev_out, "write the report CSV here too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (make_data->parsed())
      return cmd_make_data(md_preset, md_count, md_seed, md_out, md_tau, md_dim);
    if (eval_cmd->parsed())
      return cmd_eval(ev_samples, ev_oracle, ev_tau, ev_dim, ev_reference,
                      ev_ref_count, ev_ref_seed, ev_out);
    for (auto& [name, slot] : cc) {
      if (!app.get_subcommand(name)->parsed()) continue;
      RunConfig cfg = merged_config(slot.first, slot.second);
      if (name == "train-score") return cmd_train_score(cfg);
      if (name == "augment") return cmd_augment(cfg);
      if (name == "train-gan") return cmd_train_gan(cfg);
      if (name == "ablate-mu") return cmd_ablate_mu(cfg, ab_mu_list);
    }
    return 2;
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const UnsupportedError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return 1;
  }
}
