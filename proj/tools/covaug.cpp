#include "covaug/datasets.hpp"
#include "covaug/metrics.hpp"
#include "covaug/npy.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Machine-readable report line: one JSON object per line on standard
/// output.  Human summaries go to standard error.
void emit(const nlohmann::json& line) { std::cout << line.dump() << "\n"; }

/// --out falls back to $COVAUG_OUT_DIR/<name> (or ./<name>).
std::filesystem::path resolve_out(const std::string& out, const std::string& name) {
  if (!out.empty()) return out;
  const char* base = std::getenv("COVAUG_OUT_DIR");
  return std::filesystem::path(base != nullptr ? base : ".") / name;
}

int count_failed(const covaug::Dataset& dataset) {
  int failed = 0;
  for (const covaug::SampleRecord& record : dataset.samples)
    if (record.status == "failed") ++failed;
  return failed;
}

/// Prints per-sample verdicts and the overall tally; returns the exit code.
int report_verification(const covaug::Dataset& dataset, double tolerance,
                        const std::string& label) {
  const covaug::VerificationReport report = covaug::verify_dataset(dataset, tolerance);
  for (const covaug::SampleVerdict& v : report.verdicts) {
    nlohmann::json line{{"event", "verdict"},
                        {"index", v.index},
                        {"status", v.status},
                        {"rel_l2", v.rel_l2},
                        {"tolerance", v.tolerance}};
    if (!v.note.empty()) line["note"] = v.note;
    emit(line);
  }
  emit(nlohmann::json{{"event", "verified"},
                      {"passed", report.passed()},
                      {"failed", report.failed()},
                      {"skipped", report.skipped()},
                      {"ok", report.ok()}});
  std::cerr << label << ": " << report.passed() << " pass, " << report.failed()
            << " fail, " << report.skipped() << " skipped\n";
  return report.ok() ? 0 : 1;
}

/// Reshapes an NPY array to (samples, flattened sample) for the error metric.
Eigen::MatrixXd as_sample_matrix(const covaug::NpyArray& array) {
  if (array.shape.empty() || array.data.empty())
    throw std::invalid_argument("metrics: empty array");
  const auto rows = static_cast<Eigen::Index>(array.shape.size() > 1 ? array.shape[0] : 1);
  const auto cols = static_cast<Eigen::Index>(array.data.size()) / rows;
  return Eigen::Map<const covaug::RowMatrixXd>(array.data.data(), rows, cols);
}

struct GenerateArgs {
  std::string equation;
  std::string complexity = "simple";
  std::string out;
  int samples = 100;
  std::uint64_t seed = 0;
  int grid = 0;
  int nt = 0;
  int jobs = 1;
};

int cmd_generate(const GenerateArgs& args) {
  covaug::DatasetSpec spec =
      covaug::default_spec(args.equation, covaug::complexity_from_name(args.complexity));
  spec.n_samples = args.samples;
  spec.master_seed = args.seed;
  if (args.grid > 0) spec.n = args.grid;
  if (args.nt > 0) spec.nt = args.nt;

  const auto start = Clock::now();
  const covaug::Dataset dataset = covaug::generate_dataset(spec, args.jobs);
  const std::filesystem::path out = resolve_out(args.out, spec.name);
  covaug::write_dataset(dataset, out);
  const double elapsed = seconds_since(start);

  const int failed = count_failed(dataset);
  std::vector<std::string> channel_names;
  for (const covaug::Channel& ch : dataset.channels) channel_names.push_back(ch.name);
  emit(nlohmann::json{{"event", "generated"},
                      {"spec", covaug::manifest_json(dataset).at("spec")},
                      {"out", out.string()},
                      {"channels", channel_names},
                      {"samples", spec.n_samples},
                      {"failed", failed},
                      {"seconds", elapsed}});
  std::cerr << spec.name << ": " << spec.n_samples << " samples (" << failed
            << " failed) in " << elapsed << " s -> " << out.string() << "\n";
  return failed == 0 ? 0 : 1;
}

struct AugmentArgs {
  std::string in;
  std::string out;
  int factor = 1;
  std::uint64_t seed = 0;
  int map_modes = -1;
  double map_beta = -1.0;
  bool verify = false;
  int jobs = 1;
};

int cmd_augment(const AugmentArgs& args) {
  const covaug::Dataset source = covaug::read_dataset(args.in);
  covaug::AugmentOptions options;
  options.factor = args.factor;
  options.seed = args.seed;
  options.map_modes = args.map_modes;
  options.map_beta = args.map_beta;
  options.jobs = args.jobs;

  const auto start = Clock::now();
  const covaug::Dataset augmented = covaug::augment_dataset(source, options);
  const std::filesystem::path out =
      resolve_out(args.out, std::filesystem::path(args.in).filename().string() + "_aug");
  covaug::write_dataset(augmented, out);
  const double elapsed = seconds_since(start);

  emit(nlohmann::json{{"event", "augmented"},
                      {"in", args.in},
                      {"out", out.string()},
                      {"factor", args.factor},
                      {"options", augmented.augmentation},
                      {"samples", augmented.spec.n_samples},
                      {"seconds", elapsed}});
  std::cerr << augmented.spec.name << ": " << source.spec.n_samples << " -> "
            << augmented.spec.n_samples << " samples (factor " << args.factor << ") in "
            << elapsed << " s -> " << out.string() << "\n";
  if (args.verify) return report_verification(augmented, 0.0, out.string());
  return 0;
}

int cmd_verify(const std::string& in, double tolerance) {
  return report_verification(covaug::read_dataset(in), tolerance, in);
}

int cmd_metrics(const std::string& pred_path, const std::string& target_path,
                double baseline) {
  const Eigen::MatrixXd pred = as_sample_matrix(covaug::read_npy(pred_path));
  const Eigen::MatrixXd target = as_sample_matrix(covaug::read_npy(target_path));
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw std::invalid_argument("metrics: prediction and target shapes differ");

  const double error = covaug::rel_l2_error(pred, target);
  nlohmann::json line{{"event", "metrics"},
                      {"rel_l2", error},
                      {"samples", pred.rows()}};
  std::cerr << "rel L2 " << error << " over " << pred.rows() << " samples";
  if (baseline > 0.0) {
    const double gain = covaug::relative_gain(baseline, error);
    line["baseline"] = baseline;
    line["relative_gain_percent"] = gain;
    std::cerr << ", gain " << gain << "% vs baseline " << baseline;
  }
  std::cerr << "\n";
  emit(line);
  return 0;
}

int cmd_inspect(const std::string& in) {
  const covaug::Dataset dataset = covaug::read_dataset(in);
  nlohmann::json manifest = covaug::manifest_json(dataset);
  nlohmann::json status_counts = nlohmann::json::object();
  for (const covaug::SampleRecord& record : dataset.samples) {
    const auto it = status_counts.find(record.status);
    status_counts[record.status] = (it == status_counts.end() ? 0 : it->get<int>()) + 1;
  }
  nlohmann::json line{{"event", "dataset"},
                      {"in", in},
                      {"spec", manifest.at("spec")},
                      {"channels", manifest.at("channels")},
                      {"samples", dataset.spec.n_samples},
                      {"status_counts", status_counts}};
  if (!dataset.augmentation.is_null()) line["augmentation"] = dataset.augmentation;
  emit(line);
  std::cerr << dataset.spec.name << ": " << dataset.spec.n_samples << " samples, "
            << dataset.channels.size() << " channels\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PDE dataset generation and coordinate-change augmentation"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand(
      "generate", "Sample a PDE dataset and write NPY channels plus a manifest");
  generate->add_option("-e,--equation", gen.equation, "Dataset recipe name")
      ->required()
      ->check(CLI::IsMember(covaug::known_recipes()));
  generate->add_option("-n,--samples", gen.samples, "Number of samples")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("-s,--seed", gen.seed, "Master seed");
  generate->add_option("-o,--out", gen.out,
                       "Output directory (default: $COVAUG_OUT_DIR/<recipe>)");
  generate->add_option("-c,--complexity", gen.complexity, "Field roughness variant")
      ->check(CLI::IsMember({"simple", "complex"}));
  generate->add_option("-g,--grid", gen.grid, "Override nodes per axis")
      ->check(CLI::PositiveNumber);
  generate->add_option("--nt", gen.nt, "Override time levels")->check(CLI::PositiveNumber);
  generate->add_option("-j,--jobs", gen.jobs, "Worker threads")->check(CLI::PositiveNumber);

  AugmentArgs aug;
  CLI::App* augment = app.add_subcommand(
      "augment", "Append coordinate-changed replicas of an existing dataset");
  augment->add_option("-i,--in", aug.in, "Input dataset directory")->required();
  augment->add_option("-m,--factor", aug.factor, "Replicas per sample")
      ->check(CLI::NonNegativeNumber);
  augment->add_option("-s,--seed", aug.seed, "Augmentation seed");
  augment->add_option("-o,--out", aug.out,
                      "Output directory (default: $COVAUG_OUT_DIR/<in>_aug)");
  augment->add_option("--map-modes", aug.map_modes,
                      "Trigonometric modes per map (default 5 in 1D, 6 in 2D)");
  augment->add_option("--map-beta", aug.map_beta,
                      "Positivity margin of the map density (default 1 in 1D, 1e-5 in 2D)");
  augment->add_flag("--verify", aug.verify, "Check residuals of the augmented dataset");
  augment->add_option("-j,--jobs", aug.jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string verify_in;
  double verify_tol = 0.0;
  CLI::App* verify =
      app.add_subcommand("verify", "Check equation residuals of a stored dataset");
  verify->add_option("-i,--in", verify_in, "Dataset directory")->required();
  verify->add_option("-t,--tol", verify_tol,
                     "Residual tolerance (default: calibrated per recipe)");

  std::string pred_path, target_path;
  double baseline = 0.0;
  CLI::App* metrics =
      app.add_subcommand("metrics", "Mean relative L2 error between two NPY arrays");
  metrics->add_option("-p,--pred", pred_path, "Predictions (.npy)")->required();
  metrics->add_option("-t,--target", target_path, "Targets (.npy)")->required();
  metrics->add_option("-b,--baseline", baseline,
                      "Baseline error; adds the relative gain in percent");

  std::string inspect_in;
  CLI::App* inspect =
      app.add_subcommand("inspect", "Describe a stored dataset without modifying it");
  inspect->add_option("-i,--in", inspect_in, "Dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (augment->parsed()) return cmd_augment(aug);
    if (verify->parsed()) return cmd_verify(verify_in, verify_tol);
    if (metrics->parsed()) return cmd_metrics(pred_path, target_path, baseline);
    if (inspect->parsed()) return cmd_inspect(inspect_in);
  } catch (const std::invalid_argument& e) {
    std::cerr << "covaug: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "covaug: " << e.what() << "\n";
    return 1;
  }
  return 2;  // unreachable with require_subcommand(1)
}
